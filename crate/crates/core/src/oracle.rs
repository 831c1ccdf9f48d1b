//! Brute-force reference implementations. Each one recomputes a quantity
//! the library derives by a smarter route, so that the two can be compared.

use std::collections::{BTreeMap, BTreeSet};

use crate::cantor::Point;
use crate::error::Result;
use crate::intervals::ClopenInterval;
use crate::surjections::Surjection;

/// Number of permutations `a_1 < a_2 > a_3 < …` of `n` elements.
pub fn alternating_permutations(n: usize) -> u64 {
    fn go(used: &mut Vec<bool>, last: Option<usize>, placed: usize, n: usize) -> u64 {
        if placed == n {
            return 1;
        }
        let rising = placed % 2 == 1;
        let mut total = 0;
        for v in 0..n {
            if used[v] {
                continue;
            }
            if let Some(prev) = last {
                if rising != (v > prev) {
                    continue;
                }
            }
            used[v] = true;
            total += go(used, Some(v), placed + 1, n);
            used[v] = false;
        }
        total
    }
    go(&mut vec![false; n], None, 0, n)
}

/// All words of length `len` over `base` digits, in lexicographic order.
fn words(base: u8, len: usize) -> Vec<Vec<u8>> {
    let mut out: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..base).map(move |d| {
                    let mut v = w.clone();
                    v.push(d);
                    v
                })
            })
            .collect();
    }
    out
}

/// The first `w·(b-1)^ω` (by `|w|`, then lex) in `[lo, hi)`, by enumeration.
/// Every point between `lo` and `hi` extends their longest common prefix, so
/// only words with that prefix are tried.
pub fn first_a_point(lo: &Point, hi: &Point) -> Option<Point> {
    let base = lo.base();
    let top = base - 1;
    let p = lo.first_difference(hi)?;
    let shared = lo.prefix(p);
    let bound = lo.stem().len().max(hi.stem().len()) + 3;
    for len in 1..=bound {
        let candidates: Vec<Vec<u8>> = if len <= p {
            vec![shared[..len].to_vec()]
        } else {
            words(base, len - p)
                .into_iter()
                .map(|tail| shared.iter().copied().chain(tail).collect())
                .collect()
        };
        for w in candidates {
            if w[len - 1] == top {
                continue;
            }
            let p = Point::new(base, w, top).expect("digits in range");
            if p >= *lo && p < *hi {
                return Some(p);
            }
        }
    }
    None
}

/// Extends filtering levels to `depth` by greedily splitting every cell.
pub fn greedy_levels(base: u8, mut levels: Vec<Vec<Point>>, depth: usize) -> Vec<Vec<Point>> {
    while levels.len() < depth {
        let bounds = levels.last().cloned().unwrap_or_default();
        let mut lo = Point::min(base);
        let mut next = Vec::new();
        for (i, hi) in bounds
            .iter()
            .cloned()
            .chain(std::iter::once(Point::max(base)))
            .enumerate()
        {
            let mut from = lo.clone();
            for _ in 0..base - 1 {
                let y = first_a_point(&from, &hi).expect("cells contain A_b points");
                from = y.interval_successor().expect("A_b point");
                next.push(y);
            }
            if i < bounds.len() {
                next.push(hi.clone());
                lo = hi.interval_successor().expect("A_b point");
            }
        }
        levels.push(next);
    }
    levels
}

/// All points with stem length at most `max_stem` and tail `0` or `b-1`.
pub fn sample_points(base: u8, max_stem: usize) -> Vec<Point> {
    let mut set = BTreeSet::new();
    for len in 0..=max_stem {
        for w in words(base, len) {
            set.insert(Point::new(base, w.clone(), 0).expect("digits in range"));
            set.insert(Point::new(base, w, base - 1).expect("digits in range"));
        }
    }
    set.into_iter().collect()
}

/// `min_x (first index where f(x) and g(x) differ)` over `points`, looking at
/// `precision` digits; `None` when no difference shows.
pub fn sup_distance_exponent(
    f: &Surjection,
    g: &Surjection,
    points: &[Point],
    precision: usize,
) -> Result<Option<u32>> {
    let mut best: Option<u32> = None;
    for x in points {
        // only an earlier difference can improve on the best so far
        let n = best.map_or(precision, |e| e as usize);
        let a = f.evaluate(x, n, n as u32)?.digits;
        let b = g.evaluate(x, n, n as u32)?.digits;
        if let Some(i) = a.iter().zip(&b).position(|(p, q)| p != q) {
            let i = i as u32;
            if best.is_none_or(|e| i < e) {
                best = Some(i);
                if i == 0 {
                    break;
                }
            }
        }
    }
    Ok(best)
}

fn common_prefix(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// For lexicographically increasing binary stems: the dense ranks of the
/// leaf lengths followed by those of the consecutive meet lengths, or `None`
/// unless the stems form an antichain whose `2ℓ - 1` meet-closure nodes
/// all have distinct lengths.
pub fn diagonal_signature(stems: &[Vec<u8>]) -> Option<Vec<usize>> {
    for (i, a) in stems.iter().enumerate() {
        for b in &stems[i + 1..] {
            let c = common_prefix(a, b);
            if c == a.len() || c == b.len() {
                return None;
            }
        }
    }
    let mut meets: BTreeSet<Vec<u8>> = BTreeSet::new();
    for (i, a) in stems.iter().enumerate() {
        for b in &stems[i + 1..] {
            meets.insert(a[..common_prefix(a, b)].to_vec());
        }
    }
    if meets.len() + 1 != stems.len() {
        return None;
    }
    let mut lengths: Vec<usize> = stems.iter().map(Vec::len).collect();
    lengths.extend(stems.windows(2).map(|w| common_prefix(&w[0], &w[1])));
    let distinct: BTreeSet<usize> = lengths.iter().copied().collect();
    let meet_lengths: BTreeSet<usize> = meets.iter().map(Vec::len).collect();
    if distinct.len() != lengths.len() || meet_lengths.len() != meets.len() {
        return None;
    }
    let rank: BTreeMap<usize, usize> = distinct.iter().enumerate().map(|(r, &v)| (v, r)).collect();
    Some(lengths.iter().map(|v| rank[v]).collect())
}

/// Distinct diagonal signatures among increasing `l`-tuples of points
/// `w 1^ω` of `𝒜_2` with `|w| <= max_len`, each with a sample stem tuple.
pub fn brute_force_types(l: usize, max_len: usize) -> BTreeMap<Vec<usize>, Vec<Vec<u8>>> {
    let mut stems: Vec<Vec<u8>> = (1..=max_len)
        .flat_map(|len| words(2, len))
        .filter(|w| w.last() == Some(&0))
        .collect();
    stems.sort();
    let mut found = BTreeMap::new();
    let mut chosen: Vec<usize> = Vec::new();
    fn go(stems: &[Vec<u8>], l: usize, chosen: &mut Vec<usize>, found: &mut BTreeMap<Vec<usize>, Vec<Vec<u8>>>) {
        if chosen.len() == l {
            let tuple: Vec<Vec<u8>> = chosen.iter().map(|&i| stems[i].clone()).collect();
            if let Some(sig) = diagonal_signature(&tuple) {
                found.entry(sig).or_insert(tuple);
            }
            return;
        }
        let start = chosen.last().map_or(0, |&i| i + 1);
        for i in start..stems.len() {
            chosen.push(i);
            go(stems, l, chosen, found);
            chosen.pop();
        }
    }
    go(&stems, l, &mut chosen, &mut found);
    found
}

/// Whether some cell of `h` at depth `<= cap` lies inside `j`, by scanning
/// every cell of every depth.
pub fn has_full_cell(h: &Surjection, j: &ClopenInterval, cap: u32) -> Result<bool> {
    for depth in 0..=cap {
        let n = (h.base() as usize).pow(depth);
        if n > 1 << 16 {
            break;
        }
        let tuple = h.boundary_tuple(depth)?;
        let mut lo = Point::min(h.base());
        for hi in tuple
            .entries()
            .iter()
            .cloned()
            .chain(std::iter::once(Point::max(h.base())))
        {
            if lo >= *j.lo() && hi <= *j.hi() {
                return Ok(true);
            }
            if hi.is_max() {
                break;
            }
            lo = hi.interval_successor().expect("cell maxima lie in A_b");
        }
    }
    Ok(false)
}
