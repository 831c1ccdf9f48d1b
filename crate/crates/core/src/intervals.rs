//! Clopen lex-intervals, depth-`k` interval partitions and filterings.
//!
//! A filtering is stored by its boundary tuples: for each depth `j` the maxima
//! of all depth-`j` cells except the last one (which is always `max b^ω`).
//! Cells are closed on both ends: the minimum is eventually `0`, the maximum
//! eventually `b-1`. Depths beyond the stored ones are produced by the
//! canonical greedy split rule in [`greedy_split`].

use std::cmp::Ordering;
use std::fmt;

use crate::cantor::{first_a_point_in, Point};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClopenInterval {
    lo: Point,
    hi: Point,
}

impl ClopenInterval {
    pub fn new(lo: Point, hi: Point) -> Result<Self> {
        if lo.base() != hi.base() {
            return Err(Error::BaseMismatch {
                left: lo.base(),
                right: hi.base(),
            });
        }
        if !lo.is_eventually_zero() {
            return Err(Error::NotEventuallyMin(lo));
        }
        if !hi.is_eventually_max_digit() {
            return Err(Error::NotEventuallyMax(hi));
        }
        if lo > hi {
            return Err(Error::InvalidArgument(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(ClopenInterval { lo, hi })
    }

    pub(crate) fn new_unchecked(lo: Point, hi: Point) -> Self {
        debug_assert!(lo.is_eventually_zero() && hi.is_eventually_max_digit() && lo <= hi);
        ClopenInterval { lo, hi }
    }

    pub fn whole(base: u8) -> Self {
        ClopenInterval {
            lo: Point::min(base),
            hi: Point::max(base),
        }
    }

    /// The interval `W_s`.
    pub fn of_node(base: u8, word: &[u8]) -> Self {
        ClopenInterval {
            lo: crate::cantor::node_min(base, word),
            hi: crate::cantor::node_max(base, word),
        }
    }

    pub fn base(&self) -> u8 {
        self.lo.base()
    }

    pub fn lo(&self) -> &Point {
        &self.lo
    }

    pub fn hi(&self) -> &Point {
        &self.hi
    }

    pub fn contains(&self, x: &Point) -> bool {
        x.base() == self.base() && self.lo <= *x && *x <= self.hi
    }

    pub fn is_subset_of(&self, other: &ClopenInterval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn intersect(&self, other: &ClopenInterval) -> Option<ClopenInterval> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo <= hi).then(|| ClopenInterval::new_unchecked(lo, hi))
    }
}

impl fmt::Display for ClopenInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

pub(crate) fn pow(base: u8, depth: u32) -> Result<usize> {
    (base as usize)
        .checked_pow(depth)
        .filter(|&n| n <= 1 << 28)
        .ok_or_else(|| Error::InvalidArgument(format!("{base}^{depth} cells is too many to materialize")))
}

/// Digits of `index` as a word of length `depth`.
pub fn index_to_word(base: u8, depth: u32, mut index: usize) -> Vec<u8> {
    let mut word = vec![0u8; depth as usize];
    for d in word.iter_mut().rev() {
        *d = (index % base as usize) as u8;
        index /= base as usize;
    }
    word
}

pub fn word_to_index(base: u8, word: &[u8]) -> usize {
    word.iter().fold(0, |acc, &d| acc * base as usize + d as usize)
}

/// An increasing tuple in `[𝒜_b]^{b^k - 1}`: the maxima of all depth-`k` cells
/// of a partition except the last.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoundaryTuple {
    base: u8,
    depth: u32,
    entries: Vec<Point>,
}

impl BoundaryTuple {
    pub fn new(base: u8, depth: u32, entries: Vec<Point>) -> Result<Self> {
        crate::cantor::check_base(base as u32)?;
        let expected = pow(base, depth)? - 1;
        if entries.len() != expected {
            return Err(Error::InvalidTuple(format!(
                "depth {depth} needs {expected} entries, got {}",
                entries.len()
            )));
        }
        for (i, x) in entries.iter().enumerate() {
            if x.base() != base {
                return Err(Error::BaseMismatch {
                    left: base,
                    right: x.base(),
                });
            }
            if !x.in_a() {
                return Err(Error::InvalidTuple(format!("entry {i} = {x} is not in A_b")));
            }
            if i > 0 && entries[i - 1] >= *x {
                return Err(Error::InvalidTuple(format!(
                    "entries {} and {i} are not increasing",
                    i - 1
                )));
            }
        }
        Ok(BoundaryTuple { base, depth, entries })
    }

    pub(crate) fn new_unchecked(base: u8, depth: u32, entries: Vec<Point>) -> Self {
        BoundaryTuple { base, depth, entries }
    }

    pub fn base(&self) -> u8 {
        self.base
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn entries(&self) -> &[Point] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Point> {
        self.entries
    }

    /// The standard tuple `(max W_s)` over `b^k` minus the last node.
    pub fn standard(base: u8, depth: u32) -> Result<Self> {
        let n = pow(base, depth)?;
        let entries = (0..n - 1)
            .map(|i| crate::cantor::node_max(base, &index_to_word(base, depth, i)))
            .collect();
        Ok(BoundaryTuple { base, depth, entries })
    }

    /// The forced coarser tuple at `depth <= self.depth`.
    pub fn coarsen(&self, depth: u32) -> BoundaryTuple {
        assert!(depth <= self.depth);
        let step = (self.base as usize).pow(self.depth - depth);
        let count = (self.base as usize).pow(depth) - 1;
        let entries = (0..count).map(|i| self.entries[(i + 1) * step - 1].clone()).collect();
        BoundaryTuple {
            base: self.base,
            depth,
            entries,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthPartition {
    depth: u32,
    cells: Vec<ClopenInterval>,
}

impl DepthPartition {
    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn cells(&self) -> &[ClopenInterval] {
        &self.cells
    }

    pub fn boundary_tuple(&self) -> BoundaryTuple {
        let base = self.cells[0].base();
        let entries = self.cells[..self.cells.len() - 1]
            .iter()
            .map(|c| c.hi.clone())
            .collect();
        BoundaryTuple::new_unchecked(base, self.depth, entries)
    }

    /// Index of the cell containing `x`; a cell maximum belongs to its own cell.
    pub fn cell_containing(&self, x: &Point) -> usize {
        self.cells.partition_point(|c| c.hi < *x).min(self.cells.len() - 1)
    }
}

pub fn partition_from_tuple(tuple: &BoundaryTuple) -> DepthPartition {
    let base = tuple.base;
    let mut cells = Vec::with_capacity(tuple.entries.len() + 1);
    let mut lo = Point::min(base);
    for hi in &tuple.entries {
        let next = hi.interval_successor().expect("tuple entries lie in A_b");
        cells.push(ClopenInterval::new_unchecked(lo, hi.clone()));
        lo = next;
    }
    cells.push(ClopenInterval::new_unchecked(lo, Point::max(base)));
    DepthPartition {
        depth: tuple.depth,
        cells,
    }
}

/// The canonical split of a cell into `b` children: returns the `b - 1`
/// maxima of all children but the last. The `p`-th split point is the first
/// element of `𝒜_b` (by stem length, then lex) lying strictly above the
/// previous split point and strictly below the cell maximum.
pub fn greedy_split(cell: &ClopenInterval) -> Vec<Point> {
    let base = cell.base();
    let mut out: Vec<Point> = Vec::with_capacity(base as usize - 1);
    let mut lo = cell.lo.clone();
    for _ in 0..base - 1 {
        let y = first_a_point_in(&lo, &cell.hi).expect("nonempty clopen interval contains A_b points");
        lo = y.interval_successor().expect("split points lie in A_b");
        out.push(y);
    }
    out
}

/// Children of a cell given its `b - 1` interior maxima.
pub fn children_of(cell: &ClopenInterval, maxima: &[Point]) -> Vec<ClopenInterval> {
    let mut lo = cell.lo.clone();
    let mut out = Vec::with_capacity(maxima.len() + 1);
    for hi in maxima {
        let next = hi.interval_successor().expect("split points lie in A_b");
        out.push(ClopenInterval::new_unchecked(lo, hi.clone()));
        lo = next;
    }
    out.push(ClopenInterval::new_unchecked(lo, cell.hi.clone()));
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Clause {
    /// `U_∅ = b^ω`
    Root,
    /// children of a cell form a disjoint partition of it
    Partition,
    /// sibling maxima are increasing
    IncreasingMaxima,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::Root => "(i) root cell is the whole space",
            Clause::Partition => "(ii) children partition their parent",
            Clause::IncreasingMaxima => "(iii) sibling maxima increase",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub clause: Clause,
    /// The node whose cell is at fault.
    pub path: Vec<u8>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path: Vec<String> = self.path.iter().map(|d| d.to_string()).collect();
        write!(
            f,
            "{} violated at node \"{}\": {}",
            self.clause,
            path.join(""),
            self.detail
        )
    }
}

/// Checks the filtering axioms on raw boundary levels (`levels[j-1]` holds
/// depth `j`). Reports the first violation by depth, then by cell index.
pub fn validate_levels(base: u8, levels: &[Vec<Point>]) -> std::result::Result<(), Violation> {
    let b = base as usize;
    for (j0, level) in levels.iter().enumerate() {
        let depth = j0 as u32 + 1;
        let cells = b.checked_pow(depth).unwrap_or(usize::MAX);
        let at = |i: usize| index_to_word(base, depth, i);
        if level.len() + 1 != cells {
            return Err(Violation {
                clause: if j0 == 0 { Clause::Root } else { Clause::Partition },
                path: Vec::new(),
                detail: format!("depth {depth} needs {} boundaries, found {}", cells - 1, level.len()),
            });
        }
        for (i, x) in level.iter().enumerate() {
            if x.base() != base || !x.in_a() {
                return Err(Violation {
                    clause: Clause::Partition,
                    path: at(i),
                    detail: format!("cell maximum {x} is not in A_b"),
                });
            }
            if i > 0 {
                let prev = &level[i - 1];
                let siblings = (i - 1) / b == i / b;
                match prev.cmp(x) {
                    Ordering::Less => {}
                    Ordering::Equal => {
                        return Err(Violation {
                            clause: Clause::Partition,
                            path: at(i),
                            detail: format!("maximum {x} repeats the previous one; cells overlap"),
                        })
                    }
                    Ordering::Greater => {
                        return Err(Violation {
                            clause: if siblings {
                                Clause::IncreasingMaxima
                            } else {
                                Clause::Partition
                            },
                            path: at(i),
                            detail: format!("maximum {x} lies below the previous maximum {prev}"),
                        })
                    }
                }
            }
        }
        if j0 > 0 {
            let parent = &levels[j0 - 1];
            for (pi, y) in parent.iter().enumerate() {
                let last_child = pi * b + b - 1;
                if level[last_child] != *y {
                    return Err(Violation {
                        clause: Clause::Partition,
                        path: index_to_word(base, depth - 1, pi),
                        detail: format!(
                            "children end at {} instead of the parent maximum {y}",
                            level[last_child]
                        ),
                    });
                }
            }
        }
    }
    Ok(())
}

/// A filtering of `b^ω`, materialized to `support_depth` and extended beyond
/// it by [`greedy_split`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Filtering {
    base: u8,
    levels: Vec<Vec<Point>>,
}

impl Filtering {
    pub fn new(base: u8, levels: Vec<Vec<Point>>) -> Result<Self> {
        crate::cantor::check_base(base as u32)?;
        validate_levels(base, &levels).map_err(Error::InvalidFiltering)?;
        Ok(Filtering { base, levels })
    }

    /// The filtering `U_s = W_s`, with nothing materialized.
    pub fn standard(base: u8) -> Self {
        Filtering {
            base,
            levels: Vec::new(),
        }
    }

    /// The filtering whose depth-`k` partition is given by `tuple`; coarser
    /// levels are forced.
    pub fn from_tuple(tuple: &BoundaryTuple) -> Self {
        let levels = (1..=tuple.depth).map(|j| tuple.coarsen(j).entries).collect();
        Filtering {
            base: tuple.base,
            levels,
        }
    }

    pub fn base(&self) -> u8 {
        self.base
    }

    pub fn support_depth(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn levels(&self) -> &[Vec<Point>] {
        &self.levels
    }

    pub fn validate(&self) -> std::result::Result<(), Violation> {
        validate_levels(self.base, &self.levels)
    }

    pub fn stored_tuple(&self, depth: u32) -> Option<BoundaryTuple> {
        if depth == 0 {
            return Some(BoundaryTuple::new_unchecked(self.base, 0, Vec::new()));
        }
        self.levels
            .get(depth as usize - 1)
            .map(|l| BoundaryTuple::new_unchecked(self.base, depth, l.clone()))
    }

    /// Cell of a stored node (`|word| <= support_depth`).
    pub(crate) fn stored_cell(&self, word: &[u8]) -> ClopenInterval {
        let depth = word.len();
        if depth == 0 {
            return ClopenInterval::whole(self.base);
        }
        let level = &self.levels[depth - 1];
        let i = word_to_index(self.base, word);
        let hi = level.get(i).cloned().unwrap_or_else(|| Point::max(self.base));
        let lo = if i == 0 {
            Point::min(self.base)
        } else {
            level[i - 1].interval_successor().expect("stored maxima lie in A_b")
        };
        ClopenInterval::new_unchecked(lo, hi)
    }
}

/// Canonical extension of `filtering` to (at least) depth `depth`.
pub fn refine_canonical(filtering: &Filtering, depth: u32) -> Result<Filtering> {
    let mut levels = filtering.levels.clone();
    while (levels.len() as u32) < depth {
        let current = levels.len() as u32;
        pow(filtering.base, current + 1)?;
        let parent_cells: Vec<ClopenInterval> = match levels.last() {
            None => vec![ClopenInterval::whole(filtering.base)],
            Some(last) => {
                let tuple = BoundaryTuple::new_unchecked(filtering.base, current, last.clone());
                partition_from_tuple(&tuple).cells
            }
        };
        let mut next = Vec::new();
        for (i, cell) in parent_cells.iter().enumerate() {
            next.extend(greedy_split(cell));
            if i + 1 < parent_cells.len() {
                next.push(cell.hi.clone());
            }
        }
        levels.push(next);
    }
    Ok(Filtering {
        base: filtering.base,
        levels,
    })
}

/// Anything that can report the cell `U_s` of a filtering for every node.
pub trait CellSource {
    fn base(&self) -> u8;
    fn cell(&self, word: &[u8]) -> ClopenInterval;

    /// Maxima of the children of `word` except the last.
    fn child_maxima(&self, word: &[u8]) -> Vec<Point> {
        let mut w = word.to_vec();
        (0..self.base() - 1)
            .map(|i| {
                w.push(i);
                let hi = self.cell(&w).hi;
                w.pop();
                hi
            })
            .collect()
    }
}

impl CellSource for Filtering {
    fn base(&self) -> u8 {
        self.base
    }

    fn cell(&self, word: &[u8]) -> ClopenInterval {
        let k = word.len().min(self.levels.len());
        let mut cell = self.stored_cell(&word[..k]);
        for &d in &word[k..] {
            let maxima = greedy_split(&cell);
            cell = children_of(&cell, &maxima).swap_remove(d as usize);
        }
        cell
    }
}

/// The least depth `n <= cap` at which `y` is the maximum of a cell, together
/// with that cell's node.
pub fn boundary_depth<S: CellSource + ?Sized>(source: &S, y: &Point, cap: u32) -> Option<(u32, Vec<u8>)> {
    if y.is_max() {
        return Some((0, Vec::new()));
    }
    if !y.in_a() || y.base() != source.base() {
        return None;
    }
    let mut word = Vec::new();
    for depth in 1..=cap {
        let maxima = source.child_maxima(&word);
        let i = maxima.partition_point(|m| m < y);
        word.push(i as u8);
        if maxima.get(i) == Some(y) {
            return Some((depth, word));
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Refinement {
    /// Every boundary was found among the coarse boundaries by `depth`.
    Holds { depth: u32 },
    /// This boundary was not a coarse boundary at any depth `<= cap`.
    UndecidedAtCap { witness: Point, cap: u32 },
}

impl Refinement {
    pub fn holds(&self) -> bool {
        matches!(self, Refinement::Holds { .. })
    }
}

/// Whether the depth-`<= depth` cells of `fine` lie in the algebra generated
/// by the cells of `coarse`: every boundary of `fine` must be a boundary of
/// `coarse` at some depth, searched up to `cap`.
pub fn is_refinement<V, U>(fine: &V, coarse: &U, depth: u32, cap: u32) -> Result<Refinement>
where
    V: CellSource + ?Sized,
    U: CellSource + ?Sized,
{
    if fine.base() != coarse.base() {
        return Err(Error::BaseMismatch {
            left: fine.base(),
            right: coarse.base(),
        });
    }
    let n = pow(fine.base(), depth)?;
    let mut needed = 0;
    for i in 0..n - 1 {
        let y = fine.cell(&index_to_word(fine.base(), depth, i)).hi;
        match boundary_depth(coarse, &y, cap) {
            Some((d, _)) => needed = needed.max(d),
            None => return Ok(Refinement::UndecidedAtCap { witness: y, cap }),
        }
    }
    Ok(Refinement::Holds { depth: needed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(base: u8, stem: &[u8], tail: u8) -> Point {
        Point::new(base, stem.to_vec(), tail).unwrap()
    }

    #[test]
    fn partition_from_tuple_examples() {
        let t = BoundaryTuple::new(2, 1, vec![p(2, &[0], 1)]).unwrap();
        let part = partition_from_tuple(&t);
        assert_eq!(part.cells()[0], ClopenInterval::of_node(2, &[0]));
        assert_eq!(part.cells()[1], ClopenInterval::of_node(2, &[1]));

        let t = BoundaryTuple::standard(2, 2).unwrap();
        let part = partition_from_tuple(&t);
        for (i, cell) in part.cells().iter().enumerate() {
            assert_eq!(*cell, ClopenInterval::of_node(2, &index_to_word(2, 2, i)));
        }
        assert_eq!(part.boundary_tuple(), t);

        let t = BoundaryTuple::new(2, 1, vec![p(2, &[0, 0], 1)]).unwrap();
        let part = partition_from_tuple(&t);
        assert_eq!(
            part.cells()[0],
            ClopenInterval::new(Point::min(2), p(2, &[0, 0], 1)).unwrap()
        );
        assert_eq!(
            part.cells()[1],
            ClopenInterval::new(p(2, &[0, 1], 0), Point::max(2)).unwrap()
        );
    }

    #[test]
    fn tuple_validation_errors() {
        assert!(BoundaryTuple::new(2, 2, vec![p(2, &[1, 0], 1), p(2, &[0], 1), p(2, &[0, 0], 1)]).is_err());
        assert!(BoundaryTuple::new(2, 1, vec![p(2, &[0], 0)]).is_err());
        assert!(BoundaryTuple::new(2, 1, vec![Point::max(2)]).is_err());
        assert!(BoundaryTuple::new(2, 2, vec![p(2, &[0], 1)]).is_err());
    }

    #[test]
    fn cell_containing_examples() {
        let part = partition_from_tuple(&BoundaryTuple::standard(2, 2).unwrap());
        assert_eq!(part.cell_containing(&p(2, &[0], 1)), 1);
        assert_eq!(part.cell_containing(&p(2, &[0, 0], 1)), 0);
        assert_eq!(part.cell_containing(&Point::min(2)), 0);
        assert_eq!(part.cell_containing(&Point::max(2)), 3);
        assert_eq!(part.cell_containing(&p(2, &[1, 0], 0)), 2);
    }

    #[test]
    fn validate_reports_equal_maxima() {
        let x = p(3, &[1], 2);
        let v = validate_levels(3, &[vec![x.clone(), x]]).unwrap_err();
        assert_eq!(v.clause, Clause::Partition);
        assert_eq!(v.path, vec![1]);
        let v = validate_levels(3, &[vec![p(3, &[1], 2), p(3, &[0], 2)]]).unwrap_err();
        assert_eq!(v.clause, Clause::IncreasingMaxima);
        assert!(validate_levels(
            2,
            &[
                vec![p(2, &[0], 1)],
                vec![p(2, &[0, 0], 1), p(2, &[1], 1), p(2, &[1, 0], 1)]
            ]
        )
        .is_err());
    }

    #[test]
    fn standard_filtering_validates_and_refines_to_itself() {
        let f = Filtering::standard(3);
        assert!(f.validate().is_ok());
        for d in 1..=4 {
            let r = refine_canonical(&f, d).unwrap();
            assert!(r.validate().is_ok());
            assert_eq!(r.stored_tuple(d).unwrap(), BoundaryTuple::standard(3, d).unwrap());
        }
    }

    #[test]
    fn greedy_split_of_a_short_cell() {
        let cell = ClopenInterval::new(Point::min(2), p(2, &[0, 0], 1)).unwrap();
        assert_eq!(greedy_split(&cell), vec![p(2, &[0, 0, 0], 1)]);
    }

    #[test]
    fn deep_cells_agree_with_materialized_levels() {
        let t = BoundaryTuple::new(2, 1, vec![p(2, &[0, 0], 1)]).unwrap();
        let f = Filtering::from_tuple(&t);
        let r = refine_canonical(&f, 4).unwrap();
        for i in 0..16 {
            let w = index_to_word(2, 4, i);
            assert_eq!(f.cell(&w), r.stored_cell(&w));
        }
    }

    #[test]
    fn boundary_depth_of_standard_maxima() {
        let f = Filtering::standard(2);
        assert_eq!(boundary_depth(&f, &p(2, &[0], 1), 8), Some((1, vec![0])));
        assert_eq!(boundary_depth(&f, &p(2, &[1, 0, 1, 0], 1), 8).map(|x| x.0), Some(4));
        assert_eq!(boundary_depth(&f, &p(2, &[1, 0, 1, 0], 1), 3), None);
    }

    #[test]
    fn refinement_is_reflexive_and_capped() {
        let t = BoundaryTuple::new(2, 1, vec![p(2, &[0, 0], 1)]).unwrap();
        let f = Filtering::from_tuple(&t);
        assert!(is_refinement(&f, &f, 3, 8).unwrap().holds());
        let std = Filtering::standard(2);
        // 001^ω is a depth-2 boundary of the standard filtering
        assert_eq!(is_refinement(&f, &std, 1, 8).unwrap(), Refinement::Holds { depth: 2 });
        let deep = BoundaryTuple::new(2, 1, vec![p(2, &[0, 1, 1, 0, 1, 0], 1)]).unwrap();
        let g = Filtering::from_tuple(&deep);
        assert_eq!(
            is_refinement(&g, &std, 1, 4).unwrap(),
            Refinement::UndecidedAtCap {
                witness: p(2, &[0, 1, 1, 0, 1, 0], 1),
                cap: 4
            }
        );
    }
}
