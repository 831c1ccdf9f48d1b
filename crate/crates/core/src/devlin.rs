//! Odd tangent numbers and similarity types of strongly diagonal tuples.
//!
//! A tuple of points of `𝒜_2` is read through its stems (`x = w·1^ω`). For a
//! strongly diagonal tuple the stems together with their pairwise meets form
//! a binary tree whose `2ℓ - 1` nodes sit at pairwise distinct levels; the
//! type records the tree shape (which fixes the child directions) and the
//! relative order of the levels. Points of `𝒜_b` for `b > 2` go through
//! [`Point::encode_binary`] first.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::cantor::Point;
use crate::error::{Error, Result};
use crate::surjections::Surjection;

/// Largest `ℓ` for which [`enumerate_types`] materializes the type list.
pub const TYPE_ENUMERATION_CAP: usize = 6;

/// `t_1, …, t_n`: the derivatives `tan^{(2k-1)}(0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentTable {
    values: Vec<BigUint>,
}

impl TangentTable {
    /// Uses `tan' = 1 + tan²`: with `a_m = tan^{(m)}(0)`,
    /// `a_{m+1} = [m = 0] + Σ_i C(m, i) a_i a_{m-i}`.
    pub fn new(n: usize) -> Self {
        let top = 2 * n;
        let mut a: Vec<BigUint> = vec![BigUint::zero(); top.max(1)];
        let mut binom: Vec<BigUint> = vec![BigUint::one()];
        for m in 0..top.saturating_sub(1) {
            let mut next = if m == 0 { BigUint::one() } else { BigUint::zero() };
            for i in 0..=m {
                if !a[i].is_zero() && !a[m - i].is_zero() {
                    next += &binom[i] * &a[i] * &a[m - i];
                }
            }
            a[m + 1] = next;
            let mut row = vec![BigUint::one(); m + 2];
            for i in 1..=m {
                row[i] = &binom[i - 1] + &binom[i];
            }
            binom = row;
        }
        TangentTable {
            values: (1..=n).map(|k| a[2 * k - 1].clone()).collect(),
        }
    }

    /// `t_k`, for `1 <= k <= len`.
    pub fn get(&self, k: usize) -> Option<&BigUint> {
        k.checked_sub(1).and_then(|i| self.values.get(i))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn tangent_number(k: usize) -> Result<BigUint> {
    if k < 1 {
        return Err(Error::InvalidArgument("tangent numbers are indexed from 1".into()));
    }
    Ok(TangentTable::new(k).values.pop().expect("table has k entries"))
}

/// The binary stem of a point of `𝒜_b`.
pub fn binary_stem(x: &Point) -> Result<Vec<u8>> {
    let y = x.encode_binary()?;
    if !y.in_a() {
        return Err(Error::InvalidArgument(format!("{x} is not in A_b")));
    }
    Ok(y.stem().to_vec())
}

fn lcp(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

fn is_prefix(a: &[u8], b: &[u8]) -> bool {
    a.len() <= b.len() && b[..a.len()] == *a
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureNode {
    pub word: Vec<u8>,
    /// Index into the tuple when this node is a stem.
    pub leaf: Option<usize>,
    /// Index of the longest proper prefix within the closure.
    pub parent: Option<usize>,
    /// Digit following the parent's word.
    pub direction: Option<u8>,
}

/// Stems of a tuple together with all pairwise meets, sorted by length then
/// lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeetClosure {
    pub nodes: Vec<ClosureNode>,
}

impl MeetClosure {
    pub fn meets(&self) -> impl Iterator<Item = &ClosureNode> {
        self.nodes.iter().filter(|n| n.leaf.is_none())
    }
}

pub fn meet_closure(tuple: &[Point]) -> Result<MeetClosure> {
    let stems = tuple.iter().map(binary_stem).collect::<Result<Vec<_>>>()?;
    meet_closure_of_stems(&stems)
}

pub fn meet_closure_of_stems(stems: &[Vec<u8>]) -> Result<MeetClosure> {
    let distinct: BTreeSet<&Vec<u8>> = stems.iter().collect();
    if distinct.len() != stems.len() {
        return Err(Error::DuplicateEntries);
    }
    let mut words: BTreeSet<(usize, Vec<u8>)> = stems.iter().map(|s| (s.len(), s.clone())).collect();
    for (i, a) in stems.iter().enumerate() {
        for b in &stems[i + 1..] {
            let n = lcp(a, b);
            words.insert((n, a[..n].to_vec()));
        }
    }
    let words: Vec<Vec<u8>> = words.into_iter().map(|(_, w)| w).collect();
    let nodes = words
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let parent = (0..i)
                .rev()
                .find(|&j| words[j].len() < w.len() && is_prefix(&words[j], w));
            ClosureNode {
                word: w.clone(),
                leaf: stems.iter().position(|s| s == w),
                parent,
                direction: parent.map(|j| w[words[j].len()]),
            }
        })
        .collect();
    Ok(MeetClosure { nodes })
}

/// Stems form an antichain, the `ℓ - 1` meets are distinct, and all `2ℓ - 1`
/// closure nodes have distinct lengths.
pub fn stems_strongly_diagonal(stems: &[Vec<u8>]) -> bool {
    let l = stems.len();
    for (i, a) in stems.iter().enumerate() {
        for b in &stems[i + 1..] {
            if is_prefix(a, b) || is_prefix(b, a) {
                return false;
            }
        }
    }
    match meet_closure_of_stems(stems) {
        Ok(c) => {
            let lengths: BTreeSet<usize> = c.nodes.iter().map(|n| n.word.len()).collect();
            c.nodes.len() == 2 * l - 1 && lengths.len() == c.nodes.len()
        }
        Err(_) => false,
    }
}

pub fn is_strongly_diagonal(tuple: &[Point]) -> Result<bool> {
    let stems = tuple.iter().map(binary_stem).collect::<Result<Vec<_>>>()?;
    let distinct: BTreeSet<&Vec<u8>> = stems.iter().collect();
    if distinct.len() != stems.len() {
        return Err(Error::DuplicateEntries);
    }
    Ok(stems_strongly_diagonal(&stems))
}

const LEAF: u8 = 0x80;

/// A similarity type: the meet tree in preorder, each node carrying its
/// level rank, with leaves flagged. Leaves appear in tuple order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeType {
    leaves: usize,
    code: Vec<u8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TypeNode {
    pub rank: u8,
    pub parent: Option<usize>,
    /// `0` for a left child, `1` for a right child.
    pub side: Option<u8>,
    pub children: Option<(usize, usize)>,
}

impl TreeType {
    pub fn leaves(&self) -> usize {
        self.leaves
    }

    pub fn code(&self) -> &[u8] {
        &self.code
    }

    /// Nodes in preorder.
    pub fn nodes(&self) -> Vec<TypeNode> {
        fn go(code: &[u8], pos: &mut usize, parent: Option<usize>, side: Option<u8>, out: &mut Vec<TypeNode>) -> usize {
            let me = out.len();
            let c = code[*pos];
            *pos += 1;
            out.push(TypeNode {
                rank: c & !LEAF,
                parent,
                side,
                children: None,
            });
            if c & LEAF == 0 {
                let l = go(code, pos, Some(me), Some(0), out);
                let r = go(code, pos, Some(me), Some(1), out);
                out[me].children = Some((l, r));
            }
            me
        }
        let mut out = Vec::with_capacity(self.code.len());
        go(&self.code, &mut 0, None, None, &mut out);
        out
    }

    /// The type induced on the leaves `0..count`.
    pub fn restrict_to_first(&self, count: usize) -> TreeType {
        let nodes = self.nodes();
        // preorder leaf numbering
        let mut leaf_index = vec![usize::MAX; nodes.len()];
        let mut seen = 0;
        for (i, n) in nodes.iter().enumerate() {
            if n.children.is_none() {
                leaf_index[i] = seen;
                seen += 1;
            }
        }
        fn keep(i: usize, nodes: &[TypeNode], leaf_index: &[usize], count: usize, out: &mut Vec<(u8, bool)>) -> bool {
            match nodes[i].children {
                None => {
                    if leaf_index[i] < count {
                        out.push((nodes[i].rank, true));
                        true
                    } else {
                        false
                    }
                }
                Some((l, r)) => {
                    let at = out.len();
                    out.push((nodes[i].rank, false));
                    let mut left = Vec::new();
                    let mut right = Vec::new();
                    let kl = keep(l, nodes, leaf_index, count, &mut left);
                    let kr = keep(r, nodes, leaf_index, count, &mut right);
                    match (kl, kr) {
                        (true, true) => {
                            out.extend(left);
                            out.extend(right);
                            true
                        }
                        (true, false) | (false, true) => {
                            out.truncate(at);
                            out.extend(if kl { left } else { right });
                            true
                        }
                        (false, false) => {
                            out.truncate(at);
                            false
                        }
                    }
                }
            }
        }
        let mut kept = Vec::new();
        keep(0, &nodes, &leaf_index, count, &mut kept);
        let mut ranks: Vec<u8> = kept.iter().map(|&(r, _)| r).collect();
        ranks.sort_unstable();
        let code = kept
            .iter()
            .map(|&(r, leaf)| {
                let rank = ranks.binary_search(&r).expect("rank present") as u8;
                if leaf {
                    rank | LEAF
                } else {
                    rank
                }
            })
            .collect();
        TreeType {
            leaves: count.min(self.leaves),
            code,
        }
    }

    /// Nested form, e.g. `(0 (1 3 4) 2)`: a meet is `(rank left right)`, a leaf
    /// is its rank.
    pub fn encoding(&self) -> String {
        fn go(code: &[u8], pos: &mut usize, out: &mut String) {
            let c = code[*pos];
            *pos += 1;
            if c & LEAF != 0 {
                out.push_str(&(c & !LEAF).to_string());
            } else {
                out.push('(');
                out.push_str(&c.to_string());
                out.push(' ');
                go(code, pos, out);
                out.push(' ');
                go(code, pos, out);
                out.push(')');
            }
        }
        let mut s = String::new();
        go(&self.code, &mut 0, &mut s);
        s
    }

    pub fn parse(s: &str) -> Result<TreeType> {
        let tokens: Vec<String> = s
            .replace('(', " ( ")
            .replace(')', " ) ")
            .split_whitespace()
            .map(String::from)
            .collect();
        fn go(t: &[String], pos: &mut usize, code: &mut Vec<u8>, leaves: &mut usize) -> Option<()> {
            let tok = t.get(*pos)?;
            *pos += 1;
            if tok == "(" {
                let rank: u8 = t.get(*pos)?.parse().ok()?;
                *pos += 1;
                code.push(rank);
                go(t, pos, code, leaves)?;
                go(t, pos, code, leaves)?;
                (t.get(*pos)? == ")").then_some(())?;
                *pos += 1;
            } else {
                let rank: u8 = tok.parse().ok()?;
                code.push(rank | LEAF);
                *leaves += 1;
            }
            Some(())
        }
        let (mut code, mut leaves, mut pos) = (Vec::new(), 0, 0);
        let bad = || Error::InvalidArgument(format!("cannot parse type encoding {s:?}"));
        go(&tokens, &mut pos, &mut code, &mut leaves).ok_or_else(bad)?;
        if pos != tokens.len() {
            return Err(bad());
        }
        let t = TreeType { leaves, code };
        let mut ranks: Vec<u8> = t.code.iter().map(|c| c & !LEAF).collect();
        ranks.sort_unstable();
        let ordered = ranks.iter().enumerate().all(|(i, &r)| r as usize == i);
        let nodes = t.nodes();
        let monotone = nodes
            .iter()
            .all(|n| n.parent.map_or(n.rank == 0, |p| nodes[p].rank < n.rank));
        if !ordered || !monotone {
            return Err(bad());
        }
        Ok(t)
    }
}

impl fmt::Display for TreeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encoding())
    }
}

/// Type of a strongly diagonal antichain of binary stems in lex order.
pub fn type_of_stems(stems: &[Vec<u8>]) -> Result<TreeType> {
    if stems.is_empty() || !stems_strongly_diagonal(stems) {
        return Err(Error::NotStronglyDiagonal);
    }
    let mut sorted: Vec<&[u8]> = stems.iter().map(|s| s.as_slice()).collect();
    sorted.sort_unstable();
    if sorted.iter().zip(stems).any(|(a, b)| *a != b.as_slice()) {
        return Err(Error::InvalidArgument("tuple is not increasing".into()));
    }
    fn build(stems: &[&[u8]], out: &mut Vec<(usize, bool)>) {
        if stems.len() == 1 {
            out.push((stems[0].len(), true));
            return;
        }
        let m = lcp(stems[0], stems[stems.len() - 1]);
        out.push((m, false));
        let split = stems.partition_point(|s| s[m] == 0);
        build(&stems[..split], out);
        build(&stems[split..], out);
    }
    let mut flat = Vec::with_capacity(2 * stems.len() - 1);
    build(&sorted, &mut flat);
    let mut lengths: Vec<usize> = flat.iter().map(|&(n, _)| n).collect();
    lengths.sort_unstable();
    let code = flat
        .iter()
        .map(|&(n, leaf)| {
            let rank = lengths.binary_search(&n).expect("length present") as u8;
            if leaf {
                rank | LEAF
            } else {
                rank
            }
        })
        .collect();
    Ok(TreeType {
        leaves: stems.len(),
        code,
    })
}

pub fn similarity_type(tuple: &[Point]) -> Result<TreeType> {
    let stems = tuple.iter().map(binary_stem).collect::<Result<Vec<_>>>()?;
    type_of_stems(&stems)
}

#[derive(Clone, Debug)]
enum Shape {
    Leaf,
    Meet(Box<Shape>, Box<Shape>),
}

fn shapes(leaves: usize) -> Vec<Shape> {
    if leaves == 1 {
        return vec![Shape::Leaf];
    }
    let mut out = Vec::new();
    for left in 1..leaves {
        for l in shapes(left) {
            for r in shapes(leaves - left) {
                out.push(Shape::Meet(Box::new(l.clone()), Box::new(r)));
            }
        }
    }
    out
}

/// Every assignment of distinct levels to the nodes of `shape` that increases
/// along branches.
fn level_orders(shape: &Shape, out: &mut Vec<TreeType>, leaves: usize) {
    let mut kinds = Vec::new();
    let mut parents = Vec::new();
    fn flatten(s: &Shape, parent: Option<usize>, kinds: &mut Vec<bool>, parents: &mut Vec<Option<usize>>) {
        let me = kinds.len();
        kinds.push(matches!(s, Shape::Leaf));
        parents.push(parent);
        if let Shape::Meet(l, r) = s {
            flatten(l, Some(me), kinds, parents);
            flatten(r, Some(me), kinds, parents);
        }
    }
    flatten(shape, None, &mut kinds, &mut parents);
    let n = kinds.len();
    let mut rank = vec![u8::MAX; n];
    fn place(
        next: u8,
        n: usize,
        rank: &mut Vec<u8>,
        parents: &[Option<usize>],
        kinds: &[bool],
        out: &mut Vec<TreeType>,
        leaves: usize,
    ) {
        if next as usize == n {
            let code = (0..n)
                .map(|i| if kinds[i] { rank[i] | LEAF } else { rank[i] })
                .collect();
            out.push(TreeType { leaves, code });
            return;
        }
        for i in 0..n {
            let ready = rank[i] == u8::MAX && parents[i].is_none_or(|p| rank[p] != u8::MAX);
            if ready {
                rank[i] = next;
                place(next + 1, n, rank, parents, kinds, out, leaves);
                rank[i] = u8::MAX;
            }
        }
    }
    place(0, n, &mut rank, &parents, &kinds, out, leaves);
}

fn build_types(l: usize) -> Vec<TreeType> {
    let mut out = Vec::new();
    for shape in shapes(l) {
        level_orders(&shape, &mut out, l);
    }
    out.sort_unstable();
    out
}

static TYPES: [OnceLock<Vec<TreeType>>; TYPE_ENUMERATION_CAP + 1] =
    [const { OnceLock::new() }; TYPE_ENUMERATION_CAP + 1];

/// All similarity types of strongly diagonal `ℓ`-tuples, in canonical order.
pub fn enumerate_types(l: usize) -> Result<&'static [TreeType]> {
    if l == 0 {
        return Err(Error::InvalidArgument("l must be at least 1".into()));
    }
    if l > TYPE_ENUMERATION_CAP {
        return Err(Error::TypeCapExceeded {
            l,
            cap: TYPE_ENUMERATION_CAP,
        });
    }
    Ok(TYPES[l].get_or_init(|| build_types(l)))
}

pub fn type_index(t: &TreeType) -> Result<usize> {
    enumerate_types(t.leaves)?
        .binary_search(t)
        .map_err(|_| Error::InvalidArgument(format!("{t} is not a realizable type")))
}

/// Color in `{0, …, t_ℓ - 1}`: the index of the similarity type for strongly
/// diagonal tuples, `0` for everything else.
pub fn canonical_coloring(tuple: &[Point], l: usize) -> Result<u32> {
    if tuple.len() != l {
        return Err(Error::InvalidArgument(format!(
            "expected {l} points, got {}",
            tuple.len()
        )));
    }
    if tuple.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("tuple is not increasing".into()));
    }
    let stems = tuple.iter().map(binary_stem).collect::<Result<Vec<_>>>()?;
    if !stems_strongly_diagonal(&stems) {
        if l > TYPE_ENUMERATION_CAP {
            return Err(Error::TypeCapExceeded {
                l,
                cap: TYPE_ENUMERATION_CAP,
            });
        }
        return Ok(0);
    }
    Ok(type_index(&type_of_stems(&stems)?)? as u32)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeHit {
    pub tuple: Vec<Point>,
    /// Depth of the max-set the tuple was drawn from.
    pub depth: u32,
}

/// Searches `[max_set(h, d)]^ℓ` for `d = 1, 2, …, cap` for a tuple of type
/// `target`, returning the first hit in index order at the least depth.
pub fn search_tuple_of_type(h: &Surjection, target: &TreeType, cap: u32) -> Result<Option<TypeHit>> {
    let l = target.leaves;
    let prefixes: Vec<TreeType> = (1..=l).map(|j| target.restrict_to_first(j)).collect();
    for depth in 1..=cap {
        let points = h.max_set(depth)?;
        if points.len() < l {
            continue;
        }
        let stems = points.iter().map(binary_stem).collect::<Result<Vec<_>>>()?;
        let mut chosen: Vec<usize> = Vec::with_capacity(l);
        if extend(&stems, &prefixes, &mut chosen) {
            return Ok(Some(TypeHit {
                tuple: chosen.iter().map(|&i| points[i].clone()).collect(),
                depth,
            }));
        }
    }
    Ok(None)
}

fn extend(stems: &[Vec<u8>], prefixes: &[TreeType], chosen: &mut Vec<usize>) -> bool {
    let l = prefixes.len();
    if chosen.len() == l {
        return true;
    }
    let start = chosen.last().map_or(0, |&i| i + 1);
    // leave room for the remaining leaves
    let end = stems.len() + chosen.len() + 1 - l;
    let mut partial: Vec<Vec<u8>> = chosen.iter().map(|&i| stems[i].clone()).collect();
    for i in start..end {
        partial.push(stems[i].clone());
        let fits = type_of_stems(&partial).is_ok_and(|t| t == prefixes[partial.len() - 1]);
        if fits {
            chosen.push(i);
            if extend(stems, prefixes, chosen) {
                return true;
            }
            chosen.pop();
        }
        partial.pop();
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2(stem: &[u8]) -> Point {
        Point::new(2, stem.to_vec(), 1).unwrap()
    }

    #[test]
    fn tangent_values() {
        let t = TangentTable::new(5);
        let got: Vec<u64> = (1..=5).map(|k| t.get(k).unwrap().try_into().unwrap()).collect();
        assert_eq!(got, vec![1, 2, 16, 272, 7936]);
        assert!(tangent_number(0).is_err());
        assert_eq!(tangent_number(3).unwrap(), BigUint::from(16u32));
    }

    #[test]
    fn closure_of_a_pair() {
        let c = meet_closure(&[a2(&[0]), a2(&[1, 0])]).unwrap();
        let words: Vec<&[u8]> = c.nodes.iter().map(|n| n.word.as_slice()).collect();
        assert_eq!(words, vec![&[][..], &[0][..], &[1, 0][..]]);
        assert_eq!(c.meets().count(), 1);
        assert_eq!(c.nodes[2].parent, Some(0));
        assert_eq!(c.nodes[2].direction, Some(1));
        assert!(matches!(
            meet_closure(&[a2(&[0]), a2(&[0])]),
            Err(Error::DuplicateEntries)
        ));
    }

    #[test]
    fn diagonal_examples() {
        assert!(is_strongly_diagonal(&[a2(&[0]), a2(&[1, 0])]).unwrap());
        assert!(!is_strongly_diagonal(&[a2(&[0]), a2(&[0, 0])]).unwrap());
        // meets "0" and "1" share a level
        assert!(
            !is_strongly_diagonal(&[a2(&[0, 0, 0]), a2(&[0, 1, 0]), a2(&[1, 0, 0, 0]), a2(&[1, 1, 0, 0])]).unwrap()
        );
        assert!(is_strongly_diagonal(&[a2(&[0, 1, 0])]).unwrap());
    }

    #[test]
    fn pair_types() {
        let types = enumerate_types(2).unwrap();
        assert_eq!(types.len(), 2);
        let left_shallow = similarity_type(&[a2(&[0]), a2(&[1, 0])]).unwrap();
        let right_shallow = similarity_type(&[a2(&[0, 0]), a2(&[1, 0])]).unwrap_err();
        assert_eq!(right_shallow, Error::NotStronglyDiagonal);
        let right_shallow = similarity_type(&[a2(&[0, 0, 0]), a2(&[1, 0])]).unwrap();
        assert_eq!(left_shallow.encoding(), "(0 1 2)");
        assert_eq!(right_shallow.encoding(), "(0 2 1)");
        assert_ne!(left_shallow, right_shallow);
    }

    #[test]
    fn type_parse_roundtrip() {
        for t in enumerate_types(3).unwrap() {
            assert_eq!(&TreeType::parse(&t.encoding()).unwrap(), t);
        }
        assert!(TreeType::parse("(1 0 2)").is_err());
        assert!(TreeType::parse("(0 1").is_err());
    }

    #[test]
    fn restriction_drops_trailing_leaves() {
        let t = TreeType::parse("(0 (1 3 4) 2)").unwrap();
        assert_eq!(t.restrict_to_first(2).encoding(), "(0 1 2)");
        assert_eq!(t.restrict_to_first(1).encoding(), "0");
        let t = TreeType::parse("(0 1 (2 3 4))").unwrap();
        assert_eq!(t.restrict_to_first(2).encoding(), "(0 1 2)");
    }

    #[test]
    fn coloring_conventions() {
        assert_eq!(canonical_coloring(&[a2(&[0]), a2(&[0, 0])], 2).unwrap_or(99), 99);
        assert_eq!(canonical_coloring(&[a2(&[0, 0]), a2(&[0])], 2).unwrap(), 0);
        let types = enumerate_types(2).unwrap();
        let c = canonical_coloring(&[a2(&[0]), a2(&[1, 0])], 2).unwrap();
        assert_eq!(types[c as usize].encoding(), "(0 1 2)");
        assert_eq!(canonical_coloring(&[a2(&[0, 1, 0])], 1).unwrap(), 0);
    }
}
