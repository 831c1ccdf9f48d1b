//! Seeded generators for points, filterings, surjections and Q-copies.
//!
//! Stems are kept short (a few digits below the first place where the
//! enclosing interval's endpoints differ) so that generated objects stay
//! within reach of brute-force oracles.

use rand::Rng;

use crate::cantor::{first_a_point_in, node_max, node_min, Point};
use crate::error::Result;
use crate::intervals::{greedy_split, partition_from_tuple, BoundaryTuple, ClopenInterval, Filtering};
use crate::surjections::Surjection;

const ATTEMPTS: usize = 32;

/// A point of `𝒜_b` in `[lo, hi)`, if there is one.
pub fn a_point_in<R: Rng + ?Sized>(rng: &mut R, lo: &Point, hi: &Point) -> Option<Point> {
    let base = lo.base();
    let top = base - 1;
    let p = lo.first_difference(hi)?;
    for _ in 0..ATTEMPTS {
        let len = p + 1 + rng.gen_range(0..3);
        let mut word = lo.prefix(p);
        word.extend((p..len).map(|_| rng.gen_range(0..base)));
        if word[len - 1] == top {
            continue;
        }
        let candidate = Point::new(base, word, top).expect("digits are in range");
        if candidate >= *lo && candidate < *hi {
            return Some(candidate);
        }
    }
    first_a_point_in(lo, hi)
}

/// `b - 1` distinct sorted split points of `cell`, falling back to the
/// canonical split when sampling keeps colliding.
pub fn split<R: Rng + ?Sized>(rng: &mut R, cell: &ClopenInterval) -> Vec<Point> {
    let need = cell.base() as usize - 1;
    let mut chosen: Vec<Point> = Vec::with_capacity(need);
    for _ in 0..ATTEMPTS * need {
        if chosen.len() == need {
            break;
        }
        if let Some(y) = a_point_in(rng, cell.lo(), cell.hi()) {
            if let Err(at) = chosen.binary_search(&y) {
                chosen.insert(at, y);
            }
        }
    }
    if chosen.len() == need {
        chosen
    } else {
        greedy_split(cell)
    }
}

/// Extends `levels` with random levels until there are `depth` of them.
pub fn extend_levels<R: Rng + ?Sized>(
    rng: &mut R,
    base: u8,
    mut levels: Vec<Vec<Point>>,
    depth: u32,
) -> Vec<Vec<Point>> {
    while (levels.len() as u32) < depth {
        let current = levels.len() as u32;
        let cells = match levels.last() {
            None => vec![ClopenInterval::whole(base)],
            Some(last) => {
                let tuple = BoundaryTuple::new(base, current, last.clone()).expect("levels are valid");
                partition_from_tuple(&tuple).cells().to_vec()
            }
        };
        let mut next = Vec::with_capacity(cells.len() * base as usize);
        for (i, cell) in cells.iter().enumerate() {
            next.extend(split(rng, cell));
            if i + 1 < cells.len() {
                next.push(cell.hi().clone());
            }
        }
        levels.push(next);
    }
    levels
}

/// A filtering with exactly `depth` random materialized levels.
pub fn filtering<R: Rng + ?Sized>(rng: &mut R, base: u8, depth: u32) -> Result<Filtering> {
    Filtering::new(base, extend_levels(rng, base, Vec::new(), depth))
}

/// A filtering agreeing with `f` through depth `keep`, random below it
/// down to `depth`.
pub fn filtering_extending<R: Rng + ?Sized>(rng: &mut R, f: &Surjection, keep: u32, depth: u32) -> Result<Filtering> {
    let levels = (1..=keep)
        .map(|j| f.boundary_tuple(j).map(BoundaryTuple::into_entries))
        .collect::<Result<Vec<_>>>()?;
    Filtering::new(f.base(), extend_levels(rng, f.base(), levels, depth.max(keep)))
}

/// A surjection backed by a random filtering of support depth in `0..=max_depth`.
pub fn surjection<R: Rng + ?Sized>(rng: &mut R, base: u8, max_depth: u32) -> Result<Surjection> {
    let depth = rng.gen_range(0..=max_depth);
    Surjection::from_filtering(filtering(rng, base, depth)?)
}

/// A random binary word of length `1..=max_len`.
pub fn word<R: Rng + ?Sized>(rng: &mut R, max_len: usize) -> Vec<u8> {
    let len = rng.gen_range(1..=max_len);
    (0..len).map(|_| rng.gen_range(0..2)).collect()
}

/// A clopen interval of `2^ω` spanning from one random basic clopen to another.
pub fn binary_interval<R: Rng + ?Sized>(rng: &mut R, max_len: usize) -> ClopenInterval {
    let u = word(rng, max_len);
    let v = word(rng, max_len);
    let (lo, hi) = (node_min(2, &u), node_max(2, &v));
    if lo <= hi {
        ClopenInterval::new(lo, hi).expect("node endpoints are clopen endpoints")
    } else {
        ClopenInterval::new(node_min(2, &v), node_max(2, &u)).expect("node endpoints are clopen endpoints")
    }
}
