//! The monoid of continuous nondecreasing surjections of `b^ω`.
//!
//! A [`Surjection`] is either backed by a [`Filtering`] (its cells `U^f_s`,
//! canonically extended past the stored depth) or is a lazy composition
//! `f∘h`, whose cells are `h^{-1}(U^f_s)`. Every cell is a clopen interval,
//! so a depth is fully described by the maxima of its cells; the maximum of
//! `h^{-1}(U^f_s)` is [`Surjection::preimage_max`] of `max U^f_s`.
//!
//! Cells are memoized per value behind a lock, so a surjection can be shared
//! between threads and extended lazily.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::cantor::{node_max, node_min, Distance, Point};
use crate::error::{Error, Result};
use crate::intervals::{
    boundary_depth, children_of, greedy_split, index_to_word, is_refinement, pow, CellSource, ClopenInterval,
    Filtering, Refinement,
};

pub use crate::intervals::BoundaryTuple;

pub const DEFAULT_DEPTH_CAP: u32 = 64;

/// Largest number of live nodes [`distance`] keeps per level.
const FRONTIER_BUDGET: usize = 1 << 12;

enum Repr {
    Filtering(Filtering),
    Chain { outer: Surjection, inner: Surjection },
}

struct Inner {
    base: u8,
    repr: Repr,
    /// Filtering-backed: cells below the stored depth. Chains: cell maxima.
    cells: RwLock<HashMap<Vec<u8>, ClopenInterval>>,
    maxima: RwLock<HashMap<Vec<u8>, Point>>,
}

#[derive(Clone)]
pub struct Surjection {
    inner: Arc<Inner>,
}

impl Surjection {
    fn wrap(base: u8, repr: Repr) -> Self {
        Surjection {
            inner: Arc::new(Inner {
                base,
                repr,
                cells: RwLock::new(HashMap::new()),
                maxima: RwLock::new(HashMap::new()),
            }),
        }
    }

    pub fn identity(base: u8) -> Self {
        Self::wrap(base, Repr::Filtering(Filtering::standard(base)))
    }

    pub fn from_filtering(filtering: Filtering) -> Result<Self> {
        filtering.validate().map_err(Error::InvalidFiltering)?;
        Ok(Self::wrap(filtering.base(), Repr::Filtering(filtering)))
    }

    pub fn base(&self) -> u8 {
        self.inner.base
    }

    /// The stored filtering, for filtering-backed values.
    pub fn as_filtering(&self) -> Option<&Filtering> {
        match &self.inner.repr {
            Repr::Filtering(f) => Some(f),
            Repr::Chain { .. } => None,
        }
    }

    /// `(outer, inner)` for a composition `outer ∘ inner`.
    pub fn as_chain(&self) -> Option<(&Surjection, &Surjection)> {
        match &self.inner.repr {
            Repr::Filtering(_) => None,
            Repr::Chain { outer, inner } => Some((outer, inner)),
        }
    }

    pub fn ptr_eq(&self, other: &Surjection) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }

    fn filtering_cell(&self, filtering: &Filtering, word: &[u8]) -> ClopenInterval {
        let k = (filtering.support_depth() as usize).min(word.len());
        if word.len() == k {
            return filtering.stored_cell(word);
        }
        let memo = &self.inner.cells;
        if let Some(c) = memo.read().expect("cell memo poisoned").get(word) {
            return c.clone();
        }
        let (mut start, mut cell) = (k, None);
        for len in (k + 1..word.len()).rev() {
            if let Some(c) = memo.read().expect("cell memo poisoned").get(&word[..len]) {
                start = len;
                cell = Some(c.clone());
                break;
            }
        }
        let mut cell = cell.unwrap_or_else(|| filtering.stored_cell(&word[..k]));
        let mut prefix = word[..start].to_vec();
        for &d in &word[start..] {
            let children = children_of(&cell, &greedy_split(&cell));
            let mut guard = memo.write().expect("cell memo poisoned");
            for (i, child) in children.iter().enumerate() {
                prefix.push(i as u8);
                guard.entry(prefix.clone()).or_insert_with(|| child.clone());
                prefix.pop();
            }
            drop(guard);
            prefix.push(d);
            cell = children[d as usize].clone();
        }
        cell
    }

    /// `max U^f_s`.
    pub fn cell_max(&self, word: &[u8]) -> Point {
        match &self.inner.repr {
            Repr::Filtering(f) => self.filtering_cell(f, word).hi().clone(),
            Repr::Chain { outer, inner } => {
                if let Some(m) = self.inner.maxima.read().expect("max memo poisoned").get(word) {
                    return m.clone();
                }
                let m = inner
                    .preimage_max(&outer.cell_max(word))
                    .expect("cell maxima are eventually b-1");
                self.inner
                    .maxima
                    .write()
                    .expect("max memo poisoned")
                    .insert(word.to_vec(), m.clone());
                m
            }
        }
    }

    /// `U^f_s` as a clopen interval.
    pub fn cell_of(&self, word: &[u8]) -> ClopenInterval {
        if let Repr::Filtering(f) = &self.inner.repr {
            return self.filtering_cell(f, word);
        }
        let hi = self.cell_max(word);
        // the cell before `word` at the same depth ends right below this one
        let lo = match word.iter().rposition(|&d| d > 0) {
            None => Point::min(self.base()),
            Some(i) => {
                let mut prev = word.to_vec();
                prev[i] -= 1;
                for d in &mut prev[i + 1..] {
                    *d = self.base() - 1;
                }
                self.cell_max(&prev)
                    .interval_successor()
                    .expect("inner cell maxima lie in A_b")
            }
        };
        ClopenInterval::new_unchecked(lo, hi)
    }

    /// The depth-`depth` fingerprint `(max U^f_{s_i})_{i < b^depth - 1}`.
    pub fn boundary_tuple(&self, depth: u32) -> Result<BoundaryTuple> {
        if let Repr::Filtering(f) = &self.inner.repr {
            if let Some(t) = f.stored_tuple(depth) {
                return Ok(t);
            }
        }
        let n = pow(self.base(), depth)?;
        let entries = (0..n - 1)
            .map(|i| self.cell_max(&index_to_word(self.base(), depth, i)))
            .collect();
        Ok(BoundaryTuple::new_unchecked(self.base(), depth, entries))
    }

    /// `max f^{-1}([min b^ω, y])` for `y` eventually `b-1`.
    pub fn preimage_max(&self, y: &Point) -> Result<Point> {
        if y.base() != self.base() {
            return Err(Error::BaseMismatch {
                left: self.base(),
                right: y.base(),
            });
        }
        if !y.is_eventually_max_digit() {
            return Err(Error::NotEventuallyMax(y.clone()));
        }
        if y.is_max() {
            return Ok(y.clone());
        }
        // y = max W_w for its stem w
        Ok(self.cell_max(y.stem()))
    }

    /// First `n` digits of `f(x)`, and `f(x)` itself when `x` is the maximum
    /// or minimum of a cell of depth at most `max(n, cap)`.
    pub fn evaluate(&self, x: &Point, n: usize, cap: u32) -> Result<Evaluation> {
        if x.base() != self.base() {
            return Err(Error::BaseMismatch {
                left: self.base(),
                right: x.base(),
            });
        }
        let base = self.base();
        let limit = n.max(cap as usize);
        let mut word = Vec::new();
        let mut cell = ClopenInterval::whole(base);
        let mut exact = None;
        loop {
            if x == cell.hi() {
                exact = Some(node_max(base, &word));
                break;
            }
            if x == cell.lo() {
                exact = Some(node_min(base, &word));
                break;
            }
            if word.len() >= limit {
                break;
            }
            let maxima = self.child_maxima(&word);
            let i = maxima.partition_point(|m| m < x);
            let lo = if i == 0 {
                cell.lo().clone()
            } else {
                maxima[i - 1].interval_successor().expect("cell maxima lie in A_b")
            };
            let hi = maxima.get(i).cloned().unwrap_or_else(|| cell.hi().clone());
            cell = ClopenInterval::new_unchecked(lo, hi);
            word.push(i as u8);
        }
        let digits = match &exact {
            Some(y) => y.prefix(n),
            None => word[..n].to_vec(),
        };
        Ok(Evaluation { digits, exact })
    }

    /// Depth-`depth` cell maxima as a sorted list (`Y_f` truncated).
    pub fn max_set(&self, depth: u32) -> Result<Vec<Point>> {
        Ok(self.boundary_tuple(depth)?.into_entries())
    }

    /// `f(x)` for a cell maximum `x`, found by searching up to `cap`.
    pub fn image_of_boundary(&self, x: &Point, cap: u32) -> Result<Point> {
        match boundary_depth(self, x, cap) {
            Some((_, word)) => Ok(node_max(self.base(), &word)),
            None => Err(Error::NotInMaxSet { point: x.clone(), cap }),
        }
    }

    fn canonical_below(&self, depth: usize) -> bool {
        matches!(&self.inner.repr, Repr::Filtering(f) if depth >= f.support_depth() as usize)
    }
}

impl CellSource for Surjection {
    fn base(&self) -> u8 {
        self.inner.base
    }

    fn cell(&self, word: &[u8]) -> ClopenInterval {
        self.cell_of(word)
    }

    fn child_maxima(&self, word: &[u8]) -> Vec<Point> {
        let mut w = word.to_vec();
        (0..self.base() - 1)
            .map(|i| {
                w.push(i);
                let m = self.cell_max(&w);
                w.pop();
                m
            })
            .collect()
    }
}

impl fmt::Debug for Surjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.inner.repr {
            Repr::Filtering(fl) => write!(f, "Surjection(b={}, support={})", self.base(), fl.support_depth()),
            Repr::Chain { outer, inner } => write!(f, "({outer:?} ∘ {inner:?})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub digits: Vec<u8>,
    pub exact: Option<Point>,
}

pub fn from_filtering(filtering: Filtering) -> Result<Surjection> {
    Surjection::from_filtering(filtering)
}

/// The filtering `D(f)` materialized through `depth`.
pub fn to_filtering(f: &Surjection, depth: u32) -> Result<Filtering> {
    Ok(Filtering::from_tuple(&f.boundary_tuple(depth)?))
}

/// `f ∘ h`, kept as a lazy chain.
pub fn compose(f: &Surjection, h: &Surjection) -> Result<Surjection> {
    if f.base() != h.base() {
        return Err(Error::BaseMismatch {
            left: f.base(),
            right: h.base(),
        });
    }
    Ok(Surjection::wrap(
        f.base(),
        Repr::Chain {
            outer: f.clone(),
            inner: h.clone(),
        },
    ))
}

/// Materializes depth `depth` and extends canonically. The result is within
/// `2^{-depth}` of `f` but generally differs from it below that depth.
pub fn truncate(f: &Surjection, depth: u32) -> Result<Surjection> {
    Surjection::from_filtering(to_filtering(f, depth)?)
}

/// A value of `ρ∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupDistance {
    /// `2^{-exponent}`: fingerprints agree through depth `exponent`, differ below.
    Exact { exponent: u32 },
    /// Fingerprints agree at every depth up to `cap`.
    ZeroToCap { cap: u32 },
}

impl SupDistance {
    pub fn as_distance(self) -> Distance {
        match self {
            SupDistance::Exact { exponent } => Distance::PowNeg(exponent),
            SupDistance::ZeroToCap { .. } => Distance::Zero,
        }
    }
}

impl fmt::Display for SupDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SupDistance::Exact { exponent: 0 } => write!(f, "1"),
            SupDistance::Exact { exponent } => write!(f, "2^-{exponent}"),
            SupDistance::ZeroToCap { cap } => write!(f, "0 (to cap {cap})"),
        }
    }
}

/// `ρ∞(f, g) = 2^{-k}` where `k` is the deepest level at which the two
/// fingerprints agree. Subtrees below two identical canonically-extended
/// cells are skipped, so equal filtering-backed values resolve exactly.
pub fn distance(f: &Surjection, g: &Surjection, cap: u32) -> Result<SupDistance> {
    if f.base() != g.base() {
        return Err(Error::BaseMismatch {
            left: f.base(),
            right: g.base(),
        });
    }
    if f.ptr_eq(g) {
        return Ok(SupDistance::ZeroToCap { cap });
    }
    let base = f.base();
    let mut frontier: Vec<Vec<u8>> = vec![Vec::new()];
    for depth in 1..=cap {
        let mut next = Vec::new();
        for word in &frontier {
            if f.child_maxima(word) != g.child_maxima(word) {
                return Ok(SupDistance::Exact { exponent: depth - 1 });
            }
            for d in 0..base {
                let mut child = word.clone();
                child.push(d);
                let settled = f.canonical_below(child.len())
                    && g.canonical_below(child.len())
                    && f.cell_of(&child) == g.cell_of(&child);
                if !settled {
                    next.push(child);
                }
            }
        }
        if next.is_empty() {
            return Ok(SupDistance::ZeroToCap { cap });
        }
        if next.len() > FRONTIER_BUDGET {
            return Ok(SupDistance::ZeroToCap { cap: depth });
        }
        frontier = next;
    }
    Ok(SupDistance::ZeroToCap { cap })
}

/// `f` with `g = f ∘ h` through `depth`, when `D(g) ⪯ D(h)`.
pub fn factor_through(g: &Surjection, h: &Surjection, depth: u32, cap: u32) -> Result<Surjection> {
    if let Refinement::UndecidedAtCap { witness, cap } = is_refinement(g, h, depth, cap)? {
        return Err(Error::NotARefinement { witness, cap });
    }
    let target = g.boundary_tuple(depth)?;
    let images = target
        .entries()
        .iter()
        .map(|x| h.image_of_boundary(x, cap))
        .collect::<Result<Vec<_>>>()?;
    let f = tuple_to_surjection(&BoundaryTuple::new(g.base(), depth, images)?)?;
    let check = compose(&f, h)?.boundary_tuple(depth)?;
    if check != target {
        return Err(Error::Consistency(format!(
            "factor does not reproduce the depth-{depth} fingerprint"
        )));
    }
    Ok(f)
}

/// A surjection whose depth-`k` fingerprint is `tuple`.
pub fn tuple_to_surjection(tuple: &BoundaryTuple) -> Result<Surjection> {
    Surjection::from_filtering(Filtering::from_tuple(tuple))
}

/// `f` with `boundary_tuple(f ∘ h, k) = tuple`, for a tuple drawn from `Y_h`.
pub fn tuple_to_factor(h: &Surjection, tuple: &BoundaryTuple, cap: u32) -> Result<Surjection> {
    if tuple.base() != h.base() {
        return Err(Error::BaseMismatch {
            left: h.base(),
            right: tuple.base(),
        });
    }
    let images = tuple
        .entries()
        .iter()
        .map(|x| h.image_of_boundary(x, cap))
        .collect::<Result<Vec<_>>>()?;
    let f = tuple_to_surjection(&BoundaryTuple::new(h.base(), tuple.depth(), images)?)?;
    let check = compose(&f, h)?.boundary_tuple(tuple.depth())?;
    if check != *tuple {
        return Err(Error::Consistency(
            "composed fingerprint differs from the requested tuple".into(),
        ));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(base: u8, stem: &[u8], tail: u8) -> Point {
        Point::new(base, stem.to_vec(), tail).unwrap()
    }

    fn one_boundary(stem: &[u8]) -> Surjection {
        tuple_to_surjection(&BoundaryTuple::new(2, 1, vec![p(2, stem, 1)]).unwrap()).unwrap()
    }

    #[test]
    fn identity_evaluates_to_prefixes() {
        let id = Surjection::identity(2);
        let x = p(2, &[1, 0, 1, 1, 0, 0, 1], 0);
        let e = id.evaluate(&x, 5, 16).unwrap();
        assert_eq!(e.digits, x.prefix(5));
        assert_eq!(e.exact, Some(x));
    }

    #[test]
    fn evaluation_follows_cells() {
        let f = one_boundary(&[0, 0]);
        let e = f.evaluate(&p(2, &[0], 1), 1, 8).unwrap();
        assert_eq!(e.digits, vec![1]);
        let e = f.evaluate(&p(2, &[0, 0], 1), 3, 8).unwrap();
        assert_eq!(e.exact, Some(p(2, &[0], 1)));
        assert_eq!(e.digits, vec![0, 1, 1]);
    }

    #[test]
    fn identity_max_set_depth_two() {
        let id = Surjection::identity(2);
        assert_eq!(
            id.max_set(2).unwrap(),
            vec![p(2, &[0, 0], 1), p(2, &[0], 1), p(2, &[1, 0], 1)]
        );
    }

    #[test]
    fn distance_examples() {
        let id = Surjection::identity(2);
        let g = one_boundary(&[0, 0]);
        assert_eq!(distance(&id, &g, 64).unwrap(), SupDistance::Exact { exponent: 0 });
        assert_eq!(
            distance(&g, &g.clone(), 64).unwrap(),
            SupDistance::ZeroToCap { cap: 64 }
        );
        let g2 = tuple_to_surjection(&BoundaryTuple::new(2, 1, vec![p(2, &[0, 0], 1)]).unwrap()).unwrap();
        assert_eq!(distance(&g, &g2, 64).unwrap(), SupDistance::ZeroToCap { cap: 64 });
        // same depth-1 split as the identity, different depth-2 split
        let t = BoundaryTuple::new(2, 2, vec![p(2, &[0, 0, 0], 1), p(2, &[0], 1), p(2, &[1, 0], 1)]).unwrap();
        let h = tuple_to_surjection(&t).unwrap();
        assert_eq!(distance(&id, &h, 64).unwrap(), SupDistance::Exact { exponent: 1 });
        assert_eq!(SupDistance::ZeroToCap { cap: 64 }.to_string(), "0 (to cap 64)");
    }

    #[test]
    fn preimage_max_examples() {
        let id = Surjection::identity(3);
        let y = p(3, &[1, 0], 2);
        assert_eq!(id.preimage_max(&y).unwrap(), y);
        let h = one_boundary(&[0, 0]);
        assert_eq!(h.preimage_max(&Point::max(2)).unwrap(), Point::max(2));
        assert_eq!(h.preimage_max(&p(2, &[0], 1)).unwrap(), p(2, &[0, 0], 1));
        assert!(matches!(
            h.preimage_max(&p(2, &[0], 0)),
            Err(Error::NotEventuallyMax(_))
        ));
    }

    #[test]
    fn compose_with_identity_is_neutral() {
        let f = one_boundary(&[0, 1, 0]);
        let id = Surjection::identity(2);
        for d in 0..=6 {
            let t = f.boundary_tuple(d).unwrap();
            assert_eq!(compose(&f, &id).unwrap().boundary_tuple(d).unwrap(), t);
            assert_eq!(compose(&id, &f).unwrap().boundary_tuple(d).unwrap(), t);
        }
    }

    #[test]
    fn chain_cells_match_materialized() {
        let f = one_boundary(&[1, 0]);
        let h = one_boundary(&[0, 0]);
        let fh = compose(&f, &h).unwrap();
        let flat = truncate(&fh, 4).unwrap();
        for i in 0..16 {
            let w = index_to_word(2, 4, i);
            assert_eq!(fh.cell_of(&w), flat.cell_of(&w));
        }
    }

    #[test]
    fn factor_through_self_is_identity() {
        let h = one_boundary(&[0, 1, 0]);
        let f = factor_through(&h, &h, 4, 64).unwrap();
        for d in 0..=4 {
            assert_eq!(f.boundary_tuple(d).unwrap(), BoundaryTuple::standard(2, d).unwrap());
        }
    }

    #[test]
    fn factor_through_reports_missing_boundary() {
        let g = one_boundary(&[0, 1, 1, 0, 1, 0]);
        let h = Surjection::identity(2);
        match factor_through(&g, &h, 1, 3) {
            Err(Error::NotARefinement { witness, cap: 3 }) => assert_eq!(witness, p(2, &[0, 1, 1, 0, 1, 0], 1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tuple_to_factor_rejects_points_outside_truncated_max_set() {
        let h = one_boundary(&[0, 0]);
        let t = BoundaryTuple::new(2, 1, vec![p(2, &[0, 1, 0, 1, 0, 0, 0], 1)]).unwrap();
        assert!(matches!(tuple_to_factor(&h, &t, 3), Err(Error::NotInMaxSet { .. })));
        assert!(tuple_to_factor(&h, &t, 64).is_ok());
    }
}
