//! The colorings and experiments: the type coloring of surjections and its
//! realization, the ω-coloring of copies of the rationals inside `𝒜_2` with
//! its witness construction, and the search for small color sets.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::time::Instant;

use num_bigint::BigUint;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cantor::{check_base, node_max, node_min, Point};
use crate::devlin::{canonical_coloring, enumerate_types, search_tuple_of_type, tangent_number, TreeType};
use crate::error::{Error, Result};
use crate::intervals::{boundary_depth, children_of, pow, BoundaryTuple, CellSource, ClopenInterval, Filtering};
use crate::random;
use crate::surjections::{compose, distance, tuple_to_factor, SupDistance, Surjection};

/// Largest `ℓ` for which [`epsilon_parameters`] computes `t_ℓ`.
pub const TANGENT_INDEX_LIMIT: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsilonParameters {
    pub k: u32,
    pub l: usize,
    pub t: BigUint,
}

/// `k = ⌊log₂(1/ε)⌋ + 1`, `ℓ = b^k - 1` and `t = t_ℓ`.
pub fn epsilon_parameters(base: u8, epsilon: f64) -> Result<EpsilonParameters> {
    check_base(base as u32)?;
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    // the largest m with 2^m ε <= 1; doubling is exact in binary floating point
    let mut m = 0u32;
    let mut scaled = epsilon;
    while scaled * 2.0 <= 1.0 {
        scaled *= 2.0;
        m += 1;
    }
    let k = m + 1;
    let l = pow(base, k)? - 1;
    if l > TANGENT_INDEX_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "l = {l} exceeds the limit {TANGENT_INDEX_LIMIT}"
        )));
    }
    Ok(EpsilonParameters {
        k,
        l,
        t: tangent_number(l)?,
    })
}

/// The canonical coloring of `f`'s depth-`k` fingerprint.
pub fn lower_bound_coloring(f: &Surjection, k: u32) -> Result<u32> {
    let l = pow(f.base(), k)? - 1;
    canonical_coloring(f.boundary_tuple(k)?.entries(), l)
}

fn within_ball(d: SupDistance, k: u32) -> bool {
    match d {
        SupDistance::Exact { exponent } => exponent >= k,
        SupDistance::ZeroToCap { .. } => true,
    }
}

/// A surjection with the same depth-`k` fingerprint as `g` that splits its
/// deeper cells pseudo-randomly instead of canonically.
fn perturbed(g: &Surjection, k: u32, seed: u64) -> Result<Surjection> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = random::filtering_extending(&mut rng, g, k, k + 2)?;
    Surjection::from_filtering(f)
}

/// Checks that surjections sharing `g`'s depth-`k` fingerprint lie within
/// `2^{-k}` of it and receive `color` under `coloring`.
fn ball_invariant<C>(g: &Surjection, k: u32, seed: u64, color: u32, coloring: C) -> Result<bool>
where
    C: Fn(&Surjection) -> Result<u32>,
{
    let near = [crate::surjections::truncate(g, k)?, perturbed(g, k, seed)?];
    for n in &near {
        // agreement down to depth k already places n in the ball
        if !within_ball(distance(n, g, k)?, k) || coloring(n)? != color {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColorWitness {
    pub color: u32,
    #[serde(rename = "type")]
    pub type_encoding: String,
    /// Depth of the max-set of `h` the tuple was drawn from.
    pub depth: u32,
    pub tuple: Vec<Point>,
    /// Depth-`k` fingerprint of the factor `f`.
    pub factor: Vec<Point>,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub b: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub k: u32,
    pub l: usize,
    pub t: String,
    pub realized: Vec<ColorWitness>,
    pub missing: Vec<u32>,
    pub caps_hit: Vec<String>,
    pub all_realized: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

/// For each color `r < t_ℓ`, searches `Y_h` for a tuple of the `r`-th type,
/// factors it through `h` and checks that `f ∘ h` and its fingerprint class
/// have color `r`.
pub fn realize_all_colors(h: &Surjection, k: u32, cap: u32) -> Result<ExperimentReport> {
    let start = Instant::now();
    let b = h.base();
    let l = pow(b, k)? - 1;
    let types = enumerate_types(l)?;
    let outcomes = types
        .par_iter()
        .enumerate()
        .map(|(r, target)| realize_one(h, k, r as u32, target, cap))
        .collect::<Result<Vec<_>>>()?;
    let mut realized = Vec::new();
    let mut missing = Vec::new();
    let mut caps_hit = Vec::new();
    for (r, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Some(w) => realized.push(w),
            None => {
                missing.push(r as u32);
                caps_hit.push(format!("color {r}: no tuple of type {} within depth {cap}", types[r]));
            }
        }
    }
    let all_realized = missing.is_empty() && realized.iter().all(|w| w.verified);
    Ok(ExperimentReport {
        b,
        epsilon: None,
        k,
        l,
        t: types.len().to_string(),
        realized,
        missing,
        caps_hit,
        all_realized,
        elapsed_ms: Some(start.elapsed().as_millis() as u64),
    })
}

fn realize_one(h: &Surjection, k: u32, r: u32, target: &TreeType, cap: u32) -> Result<Option<ColorWitness>> {
    let Some(hit) = search_tuple_of_type(h, target, cap)? else {
        return Ok(None);
    };
    let tuple = BoundaryTuple::new(h.base(), k, hit.tuple)?;
    let f = tuple_to_factor(h, &tuple, cap.max(hit.depth))?;
    let g = compose(&f, h)?;
    let color = lower_bound_coloring(&g, k)?;
    let ball = ball_invariant(&g, k, r as u64, color, |n| lower_bound_coloring(n, k))?;
    Ok(Some(ColorWitness {
        color: r,
        type_encoding: target.encoding(),
        depth: hit.depth,
        tuple: tuple.into_entries(),
        factor: f.boundary_tuple(k)?.into_entries(),
        verified: color == r && ball,
    }))
}

/// A finitely described copy of the rationals inside `𝒜_2`:
/// `Y = Y_h ∩ (P_0 ∪ … ∪ P_n)` for clopen intervals `P_i`.
#[derive(Clone, Debug)]
pub struct QCopy {
    h: Surjection,
    pieces: Vec<ClopenInterval>,
    cap: u32,
}

#[derive(Serialize, Deserialize)]
struct QCopyRepr {
    h: Surjection,
    pieces: Vec<ClopenInterval>,
    #[serde(default = "default_cap")]
    cap: u32,
}

fn default_cap() -> u32 {
    crate::surjections::DEFAULT_DEPTH_CAP
}

impl Serialize for QCopy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QCopyRepr {
            h: self.h.clone(),
            pieces: self.pieces.clone(),
            cap: self.cap,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QCopy {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = QCopyRepr::deserialize(d)?;
        QCopy::new(r.h, r.pieces, r.cap).map_err(serde::de::Error::custom)
    }
}

/// The node of the first cell of `h` containing `j.lo()` that fits inside
/// `j`, searched down to depth `cap`.
fn full_cell(h: &Surjection, j: &ClopenInterval, cap: u32) -> Option<Vec<u8>> {
    let mut word = Vec::new();
    let mut cell = ClopenInterval::whole(h.base());
    loop {
        if cell.is_subset_of(j) {
            return Some(word);
        }
        if word.len() as u32 >= cap {
            return None;
        }
        let maxima = h.child_maxima(&word);
        let i = maxima.partition_point(|m| m < j.lo());
        cell = children_of(&cell, &maxima).swap_remove(i);
        word.push(i as u8);
    }
}

fn merge_pieces(mut pieces: Vec<ClopenInterval>) -> Vec<ClopenInterval> {
    pieces.sort_by(|a, b| a.lo().cmp(b.lo()).then(a.hi().cmp(b.hi())));
    let mut out: Vec<ClopenInterval> = Vec::with_capacity(pieces.len());
    for p in pieces {
        if let Some(last) = out.last_mut() {
            let touches = match last.hi().interval_successor() {
                Ok(next) => p.lo() <= &next,
                Err(_) => true,
            };
            if touches {
                let hi = last.hi().max(p.hi()).clone();
                *last = ClopenInterval::new_unchecked(last.lo().clone(), hi);
                continue;
            }
        }
        out.push(p);
    }
    out
}

impl QCopy {
    /// Normalizes the pieces (sorted, overlapping or adjacent ones merged)
    /// and checks that each contains a full cell of `h` within depth `cap`.
    pub fn new(h: Surjection, pieces: Vec<ClopenInterval>, cap: u32) -> Result<Self> {
        if h.base() != 2 {
            return Err(Error::InvalidQCopy(format!(
                "h has base {}; encode into base 2 first",
                h.base()
            )));
        }
        if pieces.is_empty() {
            return Err(Error::InvalidQCopy("no pieces".into()));
        }
        if let Some(p) = pieces.iter().find(|p| p.base() != 2) {
            return Err(Error::InvalidQCopy(format!("piece {p} is not binary")));
        }
        let pieces = merge_pieces(pieces);
        for p in &pieces {
            if full_cell(&h, p, cap).is_none() {
                return Err(Error::InvalidQCopy(format!(
                    "piece {p} contains no cell of h within depth {cap}"
                )));
            }
        }
        Ok(QCopy { h, pieces, cap })
    }

    /// Builds from raw endpoint pairs, rejecting pairs that do not bound a
    /// clopen interval.
    pub fn from_bounds(h: Surjection, bounds: Vec<(Point, Point)>, cap: u32) -> Result<Self> {
        let pieces = bounds
            .into_iter()
            .map(|(lo, hi)| {
                let shown = format!("[{lo}, {hi}]");
                ClopenInterval::new(lo, hi).map_err(|e| Error::InvalidQCopy(format!("{shown}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(h, pieces, cap)
    }

    /// `Y_h` itself.
    pub fn unrestricted(h: Surjection, cap: u32) -> Result<Self> {
        Self::new(h, vec![ClopenInterval::whole(2)], cap)
    }

    pub fn h(&self) -> &Surjection {
        &self.h
    }

    pub fn pieces(&self) -> &[ClopenInterval] {
        &self.pieces
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// `min` of the closure of `Y`.
    pub fn min_point(&self) -> &Point {
        self.pieces[0].lo()
    }

    /// `max` of the closure of `Y`.
    pub fn max_point(&self) -> &Point {
        self.pieces[self.pieces.len() - 1].hi()
    }

    /// Membership in `Y`, with `Y_h` decided down to the cap.
    pub fn contains(&self, x: &Point) -> bool {
        x.base() == 2
            && x.in_a()
            && self.pieces.iter().any(|p| p.contains(x))
            && boundary_depth(&self.h, x, self.cap).is_some()
    }

    /// Whether `Y`'s pieces all lie in pieces of `other` over the same `h`.
    pub fn is_subset_of(&self, other: &QCopy) -> bool {
        self.h.ptr_eq(&other.h)
            && self
                .pieces
                .iter()
                .all(|p| other.pieces.iter().any(|q| p.is_subset_of(q)))
    }

    /// `t ∈ T_Y`: `W_t ∩ Y` is not scattered, i.e. `W_t` meets some piece
    /// in a set containing a full cell of `h`.
    pub fn in_tree(&self, word: &[u8]) -> bool {
        let node = ClopenInterval::of_node(2, word);
        self.pieces
            .iter()
            .filter_map(|p| p.intersect(&node))
            .any(|j| full_cell(&self.h, &j, self.cap).is_some())
    }

    /// Levels `n < below` at which `branch|n` is a splitting node of `T_Y`.
    /// `branch` is assumed to be a branch of `T_Y`.
    pub fn splitting_levels(&self, branch: &Point, below: usize) -> Vec<usize> {
        (0..below)
            .filter(|&n| {
                let mut u = branch.prefix(n + 1);
                u[n] = 0;
                let left = self.in_tree(&u);
                u[n] = 1;
                left && self.in_tree(&u)
            })
            .collect()
    }

    fn depth_schedule(&self) -> impl Iterator<Item = usize> {
        let cap = self.cap as usize;
        std::iter::successors(Some(16usize.min(cap)), move |&d| (d < cap).then(|| (2 * d).min(cap)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaColoring {
    pub color: u64,
    /// `|t_0|, |t_1|` on the minimum branch.
    pub t_levels: Vec<usize>,
    /// `|s_i| < |t_1|` on the maximum branch.
    pub s_levels: Vec<usize>,
}

/// `c(Y) = max{i : |s_i| < |t_1|}` for the splitting nodes `t_i` on the
/// minimum and `s_i` on the maximum branch of `T_Y`.
pub fn omega_coloring(y: &QCopy) -> Result<u64> {
    omega_coloring_details(y).map(|c| c.color)
}

pub fn omega_coloring_details(y: &QCopy) -> Result<OmegaColoring> {
    for below in y.depth_schedule() {
        let t = y.splitting_levels(y.min_point(), below);
        if t.len() >= 2 {
            let s = y.splitting_levels(y.max_point(), t[1]);
            if s.first() != t.first() {
                return Err(Error::Consistency(
                    "the branches do not share their first splitting node".into(),
                ));
            }
            return Ok(OmegaColoring {
                color: s.len() as u64 - 1,
                t_levels: t[..2].to_vec(),
                s_levels: s,
            });
        }
    }
    Err(Error::CapExhausted {
        what: "second splitting node on the minimum branch".into(),
        cap: y.cap,
    })
}

/// A sub-copy `Z ⊆ Y` with `omega_coloring(Z) = r`: `Y` minus the open
/// interval between `max W_{t_n}` and `min W_{s_{m-r+1}}`, for the least `n`
/// with `m = max{i : |s_i| < |t_n|} >= r`.
pub fn build_witness(y: &QCopy, r: u64) -> Result<QCopy> {
    let lo_branch = y.min_point();
    let hi_branch = y.max_point();
    for below in y.depth_schedule() {
        let t = y.splitting_levels(lo_branch, below);
        let s = y.splitting_levels(hi_branch, below);
        for &tn in t.iter().skip(1) {
            let count = s.iter().take_while(|&&l| l < tn).count() as u64;
            if count == 0 || count - 1 < r {
                continue;
            }
            let m = count - 1;
            let t0 = lo_branch.prefix(tn);
            let s0 = hi_branch.prefix(s[(m - r + 1) as usize]);
            let left = ClopenInterval::new_unchecked(Point::min(2), node_max(2, &t0));
            let right = ClopenInterval::new_unchecked(node_min(2, &s0), Point::max(2));
            let pieces = y
                .pieces
                .iter()
                .flat_map(|p| [p.intersect(&left), p.intersect(&right)])
                .flatten()
                .collect();
            let z = QCopy::new(y.h.clone(), pieces, y.cap)?;
            let got = omega_coloring(&z)?;
            if got != r {
                return Err(Error::Consistency(format!("witness for color {r} has color {got}")));
            }
            return Ok(z);
        }
    }
    Err(Error::CapExhausted {
        what: format!("splitting levels supporting color {r}"),
        cap: y.cap,
    })
}

fn word_string(w: &[u8]) -> String {
    w.iter().map(|d| char::from(b'0' + d)).collect()
}

/// `T_Y` down to a fixed depth. Words are written as digit strings, the
/// root as `""`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerfectTree {
    pub depth: u32,
    /// Nodes in breadth-first order.
    pub nodes: Vec<String>,
    /// Nodes of depth `< depth` with both children in the tree.
    pub splitting: Vec<String>,
    /// Nodes with no splitting node at or below them above `depth`.
    pub pending: Vec<String>,
}

pub fn perfect_tree(y: &QCopy, d: u32) -> PerfectTree {
    let mut levels: Vec<Vec<Vec<u8>>> = vec![vec![Vec::new()]];
    for _ in 0..d {
        let next = levels
            .last()
            .expect("at least the root level")
            .iter()
            .flat_map(|w| {
                [0u8, 1].into_iter().filter_map(move |c| {
                    let mut child = w.clone();
                    child.push(c);
                    y.in_tree(&child).then_some(child)
                })
            })
            .collect();
        levels.push(next);
    }
    let members: HashSet<&[u8]> = levels.iter().flatten().map(|w| w.as_slice()).collect();
    let mut has_split: HashMap<Vec<u8>, bool> = HashMap::new();
    let mut splitting = Vec::new();
    for level in levels.iter().rev() {
        for w in level {
            let mut kids = [w.clone(), w.clone()];
            kids[0].push(0);
            kids[1].push(1);
            let here = (w.len() as u32) < d && kids.iter().all(|c| members.contains(c.as_slice()));
            if here {
                splitting.push(w.clone());
            }
            let below = kids.iter().any(|c| has_split.get(c).copied().unwrap_or(false));
            has_split.insert(w.clone(), here || below);
        }
    }
    splitting.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    let nodes: Vec<&Vec<u8>> = levels.iter().flatten().collect();
    PerfectTree {
        depth: d,
        nodes: nodes.iter().map(|w| word_string(w)).collect(),
        splitting: splitting.iter().map(|w| word_string(w)).collect(),
        pending: nodes
            .iter()
            .filter(|w| !has_split[w.as_slice()])
            .map(|w| word_string(w))
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub tuple: Vec<Point>,
    pub color: u32,
}

/// How a [`ColoringSpec`] maps depth-`k` fingerprints to colors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColoringRule {
    Constant {
        color: u32,
    },
    /// `map[canonical_coloring(tuple)]`.
    Relabel {
        map: Vec<u32>,
    },
    /// FNV-1a of the fingerprint, reduced mod the color count.
    Hashed {
        seed: u64,
    },
    /// Listed fingerprints get their color, everything else `default`.
    Table {
        entries: Vec<TableEntry>,
        default: u32,
    },
}

/// A coloring of surjections that factors through depth-`k` fingerprints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringSpec {
    pub b: u8,
    pub depth: u32,
    pub colors: u32,
    pub rule: ColoringRule,
}

fn fnv1a(seed: u64, tuple: &[Point]) -> u64 {
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    let mut feed = |byte: u8| {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(PRIME);
    };
    seed.to_le_bytes().into_iter().for_each(&mut feed);
    for p in tuple {
        p.stem().iter().for_each(|&d| feed(d));
        feed(0xff);
        feed(p.tail());
        feed(0xfe);
    }
    hash
}

impl ColoringSpec {
    pub fn validate(&self) -> Result<()> {
        check_base(self.b as u32)?;
        if self.colors == 0 {
            return Err(Error::InvalidArgument("a coloring needs at least one color".into()));
        }
        let l = pow(self.b, self.depth)? - 1;
        let in_range = |c: u32| {
            if c < self.colors {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "color {c} is not below {}",
                    self.colors
                )))
            }
        };
        match &self.rule {
            ColoringRule::Constant { color } => in_range(*color),
            ColoringRule::Relabel { map } => {
                let t = enumerate_types(l)?.len();
                if map.len() != t {
                    return Err(Error::InvalidArgument(format!(
                        "relabeling has {} entries, expected {t}",
                        map.len()
                    )));
                }
                map.iter().try_for_each(|&c| in_range(c))
            }
            ColoringRule::Hashed { .. } => Ok(()),
            ColoringRule::Table { entries, default } => {
                in_range(*default)?;
                for e in entries {
                    in_range(e.color)?;
                    BoundaryTuple::new(self.b, self.depth, e.tuple.clone())?;
                }
                Ok(())
            }
        }
    }

    /// Whether the color is a function of the similarity type.
    pub fn factors_through_types(&self) -> bool {
        matches!(self.rule, ColoringRule::Constant { .. } | ColoringRule::Relabel { .. })
    }

    pub fn color(&self, tuple: &BoundaryTuple) -> Result<u32> {
        if tuple.base() != self.b || tuple.depth() != self.depth {
            return Err(Error::InvalidArgument(format!(
                "coloring expects depth-{} fingerprints in base {}",
                self.depth, self.b
            )));
        }
        Ok(match &self.rule {
            ColoringRule::Constant { color } => *color,
            ColoringRule::Relabel { map } => map[canonical_coloring(tuple.entries(), tuple.entries().len())? as usize],
            ColoringRule::Hashed { seed } => (fnv1a(*seed, tuple.entries()) % self.colors as u64) as u32,
            ColoringRule::Table { entries, default } => entries
                .iter()
                .find(|e| e.tuple.as_slice() == tuple.entries())
                .map_or(*default, |e| e.color),
        })
    }

    pub fn color_of(&self, f: &Surjection) -> Result<u32> {
        self.color(&f.boundary_tuple(self.depth)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// The coloring factors through the type coloring: the bound is proved
    /// by sweeping every type.
    Exact,
    /// Arbitrary coloring: sampled color sets, no bound claimed.
    Heuristic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OscillationWitness {
    pub color: u32,
    #[serde(default, rename = "type", skip_serializing_if = "Option::is_none")]
    pub type_encoding: Option<String>,
    /// Depth-`k` fingerprint of `f ∘ h`.
    pub fingerprint: Vec<Point>,
    /// Surjections sharing the fingerprint lie in the `ε`-ball and get the same color.
    pub ball_verified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillationReport {
    pub regime: Regime,
    pub b: u8,
    pub epsilon: f64,
    pub k: u32,
    pub l: usize,
    pub t: String,
    /// The color set `B` found for the chosen `h`.
    pub colors: Vec<u32>,
    /// Exact regime only: `|B| <= t` with every color witnessed.
    pub bound_verified: bool,
    pub witnesses: Vec<OscillationWitness>,
    /// Materialized levels of the chosen `h`.
    pub h: Filtering,
    pub evaluations: usize,
}

/// Looks for `h` making the set of colors `{c(f ∘ h)}` small.
pub fn oscillation_search(c: &ColoringSpec, epsilon: f64, budget: usize, seed: u64) -> Result<OscillationReport> {
    c.validate()?;
    let params = epsilon_parameters(c.b, epsilon)?;
    if params.k != c.depth {
        return Err(Error::InvalidArgument(format!(
            "epsilon {epsilon} resolves depth {}, the coloring reads depth {}",
            params.k, c.depth
        )));
    }
    let mut report = OscillationReport {
        regime: Regime::Exact,
        b: c.b,
        epsilon,
        k: params.k,
        l: params.l,
        t: params.t.to_string(),
        colors: Vec::new(),
        bound_verified: false,
        witnesses: Vec::new(),
        h: Filtering::standard(c.b),
        evaluations: 0,
    };
    let cap = crate::surjections::DEFAULT_DEPTH_CAP;
    let identity = Surjection::identity(c.b);
    let witness = |fingerprint: BoundaryTuple,
                   color: u32,
                   type_encoding: Option<String>,
                   salt: u64|
     -> Result<OscillationWitness> {
        let g = crate::surjections::tuple_to_surjection(&fingerprint)?;
        let ball = ball_invariant(&g, params.k, seed ^ salt, color, |n| c.color_of(n))?;
        Ok(OscillationWitness {
            color,
            type_encoding,
            fingerprint: fingerprint.into_entries(),
            ball_verified: ball,
        })
    };
    match &c.rule {
        ColoringRule::Constant { color } => {
            let fp = identity.boundary_tuple(params.k)?;
            report.evaluations = 1;
            report.witnesses.push(witness(fp, *color, None, 0)?);
        }
        ColoringRule::Relabel { map } => {
            let types = enumerate_types(params.l)?;
            let found = types
                .par_iter()
                .enumerate()
                .map(|(r, target)| -> Result<(u32, BoundaryTuple, String)> {
                    let hit = search_tuple_of_type(&identity, target, cap)?.ok_or_else(|| Error::CapExhausted {
                        what: format!("tuple of type {target}"),
                        cap,
                    })?;
                    let tuple = BoundaryTuple::new(c.b, params.k, hit.tuple)?;
                    let f = tuple_to_factor(&identity, &tuple, cap)?;
                    let fp = compose(&f, &identity)?.boundary_tuple(params.k)?;
                    let color = c.color(&fp)?;
                    if color != map[r] {
                        return Err(Error::Consistency(format!(
                            "type {r} got color {color}, expected {}",
                            map[r]
                        )));
                    }
                    Ok((color, fp, target.encoding()))
                })
                .collect::<Result<Vec<_>>>()?;
            report.evaluations = found.len();
            let mut first: BTreeMap<u32, (BoundaryTuple, String)> = BTreeMap::new();
            for (color, fp, enc) in found {
                first.entry(color).or_insert((fp, enc));
            }
            for (color, (fp, enc)) in first {
                report.witnesses.push(witness(fp, color, Some(enc), color as u64)?);
            }
        }
        ColoringRule::Hashed { .. } | ColoringRule::Table { .. } => {
            report.regime = Regime::Heuristic;
            heuristic_search(c, &params, budget, seed, &mut report)?;
            let chosen = std::mem::take(&mut report.witnesses);
            for w in chosen {
                let fp = BoundaryTuple::new(c.b, params.k, w.fingerprint)?;
                report.witnesses.push(witness(fp, w.color, None, w.color as u64)?);
            }
        }
    }
    report.colors = report.witnesses.iter().map(|w| w.color).collect();
    report.bound_verified = report.regime == Regime::Exact
        && BigUint::from(report.colors.len()) <= params.t
        && report.witnesses.iter().all(|w| w.ball_verified);
    Ok(report)
}

/// Samples tuples from `Y_h` for a few candidate `h` and keeps the one with
/// the fewest observed colors.
fn heuristic_search(
    c: &ColoringSpec,
    params: &EpsilonParameters,
    budget: usize,
    seed: u64,
    report: &mut OscillationReport,
) -> Result<()> {
    let candidates = (budget / 64).clamp(1, 16);
    let per = (budget / candidates).max(1);
    let b = c.b;
    let l = params.l;
    // the smallest max-set holding at least 2ℓ points
    let mut pool_depth = params.k + 1;
    while pow(b, pool_depth)? - 1 < 2 * l {
        pool_depth += 1;
    }
    let results = (0..candidates as u64)
        .into_par_iter()
        .map(|j| -> Result<(Filtering, BTreeMap<u32, BoundaryTuple>, usize)> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(j));
            let filtering = if j == 0 {
                Filtering::standard(b)
            } else {
                let depth = rng.gen_range(1..=3);
                random::filtering(&mut rng, b, depth)?
            };
            let h = Surjection::from_filtering(filtering.clone())?;
            let pool = h.max_set(pool_depth)?;
            let mut seen = BTreeMap::new();
            for _ in 0..per {
                let mut idx = sample(&mut rng, pool.len(), l).into_vec();
                idx.sort_unstable();
                let tuple = BoundaryTuple::new(b, params.k, idx.iter().map(|&i| pool[i].clone()).collect())?;
                let f = tuple_to_factor(&h, &tuple, pool_depth)?;
                let fp = compose(&f, &h)?.boundary_tuple(params.k)?;
                seen.entry(c.color(&fp)?).or_insert(fp);
            }
            Ok((filtering, seen, per))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<(Filtering, BTreeMap<u32, BoundaryTuple>)> = None;
    for (filtering, seen, evaluated) in results {
        report.evaluations += evaluated;
        if best.as_ref().is_none_or(|(_, b)| seen.len() < b.len()) {
            best = Some((filtering, seen));
        }
    }
    let (filtering, seen) = best.expect("at least one candidate");
    report.h = filtering;
    report.witnesses = seen
        .into_iter()
        .map(|(color, fp)| OscillationWitness {
            color,
            type_encoding: None,
            fingerprint: fp.into_entries(),
            ball_verified: false,
        })
        .collect();
    Ok(())
}

/// A random Q-copy over a random `h` of support depth at most 3, with one to
/// three pieces.
pub fn random_qcopy<R: Rng + ?Sized>(rng: &mut R, cap: u32) -> Result<QCopy> {
    let h = random::surjection(rng, 2, 3)?;
    let count = rng.gen_range(1..=3);
    let pieces = (0..count).map(|_| random::binary_interval(rng, 4)).collect();
    QCopy::new(h, pieces, cap)
}
