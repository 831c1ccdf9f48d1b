//! Eventually-constant points of `b^ω`, the lexicographic order, the metric
//! `ρ_b` and the basic clopen sets `W_s`.
//!
//! A [`Point`] is a finite stem followed by a tail digit repeated forever. The
//! stem never ends with the tail digit, so two points are equal exactly when
//! their fields are equal.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

pub(crate) fn check_base(base: u32) -> Result<u8> {
    if (2..=u8::MAX as u32).contains(&base) {
        Ok(base as u8)
    } else {
        Err(Error::InvalidBase(base))
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Point {
    base: u8,
    stem: Vec<u8>,
    tail: u8,
}

impl Point {
    /// Builds a point, canonicalizing the stem.
    pub fn new(base: u8, stem: Vec<u8>, tail: u8) -> Result<Self> {
        Self::new_reporting(base, stem, tail).map(|(p, _)| p)
    }

    /// Like [`Point::new`], also reporting whether the stem had to be shortened.
    pub fn new_reporting(base: u8, mut stem: Vec<u8>, tail: u8) -> Result<(Self, bool)> {
        check_base(base as u32)?;
        for &d in stem.iter().chain(std::iter::once(&tail)) {
            if d >= base {
                return Err(Error::DigitOutOfRange { digit: d as u32, base });
            }
        }
        let before = stem.len();
        while stem.last() == Some(&tail) {
            stem.pop();
        }
        let changed = stem.len() != before;
        Ok((Point { base, stem, tail }, changed))
    }

    pub(crate) fn from_canonical(base: u8, stem: Vec<u8>, tail: u8) -> Self {
        debug_assert!(stem.last() != Some(&tail));
        debug_assert!(stem.iter().all(|&d| d < base) && tail < base);
        Point { base, stem, tail }
    }

    /// `min b^ω = 0^ω`.
    pub fn min(base: u8) -> Self {
        Point {
            base,
            stem: Vec::new(),
            tail: 0,
        }
    }

    /// `max b^ω = (b-1)^ω`.
    pub fn max(base: u8) -> Self {
        Point {
            base,
            stem: Vec::new(),
            tail: base - 1,
        }
    }

    pub fn base(&self) -> u8 {
        self.base
    }

    pub fn stem(&self) -> &[u8] {
        &self.stem
    }

    pub fn tail(&self) -> u8 {
        self.tail
    }

    pub fn digit_at(&self, n: usize) -> u8 {
        self.stem.get(n).copied().unwrap_or(self.tail)
    }

    /// The first `n` digits.
    pub fn prefix(&self, n: usize) -> Vec<u8> {
        (0..n).map(|i| self.digit_at(i)).collect()
    }

    pub fn is_max(&self) -> bool {
        self.stem.is_empty() && self.tail == self.base - 1
    }

    pub fn is_min(&self) -> bool {
        self.stem.is_empty() && self.tail == 0
    }

    pub fn is_eventually_max_digit(&self) -> bool {
        self.tail == self.base - 1
    }

    pub fn is_eventually_zero(&self) -> bool {
        self.tail == 0
    }

    /// Membership in `𝒜_b`: eventually `b-1`, and not `max b^ω`.
    pub fn in_a(&self) -> bool {
        self.is_eventually_max_digit() && !self.is_max()
    }

    /// Index of the first digit where the two points differ, `None` if equal.
    pub fn first_difference(&self, other: &Point) -> Option<usize> {
        let n = self.stem.len().max(other.stem.len());
        (0..=n).find(|&i| self.digit_at(i) != other.digit_at(i))
    }

    fn same_base(&self, other: &Point) -> Result<()> {
        if self.base == other.base {
            Ok(())
        } else {
            Err(Error::BaseMismatch {
                left: self.base,
                right: other.base,
            })
        }
    }

    pub fn lex_compare(&self, other: &Point) -> Result<Ordering> {
        self.same_base(other)?;
        Ok(self.lex_cmp_unchecked(other))
    }

    fn lex_cmp_unchecked(&self, other: &Point) -> Ordering {
        match self.first_difference(other) {
            None => Ordering::Equal,
            Some(i) => self.digit_at(i).cmp(&other.digit_at(i)),
        }
    }

    pub fn rho(&self, other: &Point) -> Result<Distance> {
        self.same_base(other)?;
        Ok(match self.first_difference(other) {
            None => Distance::Zero,
            Some(n) => Distance::PowNeg(n as u32),
        })
    }

    /// `w·(d+1)·0^ω` for `x = w·d·(b-1)^ω`: the least point above `x`.
    pub fn interval_successor(&self) -> Result<Point> {
        if !self.is_eventually_max_digit() {
            return Err(Error::NotEventuallyMax(self.clone()));
        }
        let mut stem = self.stem.clone();
        match stem.pop() {
            None => Err(Error::NoSuccessor(self.clone())),
            Some(d) => {
                stem.push(d + 1);
                Ok(Point::from_canonical(self.base, stem, 0))
            }
        }
    }

    /// `w·(d-1)·(b-1)^ω` for `x = w·d·0^ω`: the greatest point below `x`.
    pub fn interval_predecessor(&self) -> Result<Point> {
        if !self.is_eventually_zero() {
            return Err(Error::NotEventuallyMin(self.clone()));
        }
        let mut stem = self.stem.clone();
        match stem.pop() {
            None => Err(Error::NoPredecessor(self.clone())),
            Some(d) => {
                stem.push(d - 1);
                Ok(Point::from_canonical(self.base, stem, self.base - 1))
            }
        }
    }

    /// Order embedding into `2^ω`: digit `d < b-1` becomes `1^d 0`, digit
    /// `b-1` becomes `1^(b-1)`. Only points with tail `0` or `b-1` have an
    /// eventually-constant image.
    pub fn encode_binary(&self) -> Result<Point> {
        if self.base == 2 {
            return Ok(self.clone());
        }
        let top = self.base - 1;
        let tail = match self.tail {
            0 => 0,
            t if t == top => 1,
            _ => return Err(Error::NonConstantImage(self.clone())),
        };
        let mut stem = Vec::with_capacity(self.stem.len() * self.base as usize);
        for &d in &self.stem {
            stem.extend(std::iter::repeat_n(1, d as usize));
            if d < top {
                stem.push(0);
            }
        }
        Point::new(2, stem, tail)
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Base first, then lexicographic. Within a base this is `≤_lex`.
impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        self.base.cmp(&other.base).then_with(|| self.lex_cmp_unchecked(other))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.base > 10 { "." } else { "" };
        let stem: Vec<String> = self.stem.iter().map(|d| d.to_string()).collect();
        write!(f, "{}({})^ω", stem.join(sep), self.tail)?;
        if self.base != 2 {
            write!(f, "[b={}]", self.base)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A word `s ∈ b^{<ω}`, naming the basic clopen set `W_s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node {
    base: u8,
    word: Vec<u8>,
}

impl Node {
    pub fn new(base: u8, word: Vec<u8>) -> Result<Self> {
        check_base(base as u32)?;
        if let Some(&d) = word.iter().find(|&&d| d >= base) {
            return Err(Error::DigitOutOfRange { digit: d as u32, base });
        }
        Ok(Node { base, word })
    }

    pub fn root(base: u8) -> Self {
        Node { base, word: Vec::new() }
    }

    pub fn base(&self) -> u8 {
        self.base
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn child(&self, digit: u8) -> Node {
        let mut word = self.word.clone();
        word.push(digit);
        Node { base: self.base, word }
    }

    /// `max W_s = s·(b-1)^ω`.
    pub fn max_point(&self) -> Point {
        node_max(self.base, &self.word)
    }

    /// `min W_s = s·0^ω`.
    pub fn min_point(&self) -> Point {
        node_min(self.base, &self.word)
    }

    pub fn contains(&self, x: &Point) -> bool {
        x.base == self.base && self.word.iter().enumerate().all(|(i, &d)| x.digit_at(i) == d)
    }
}

pub fn node_max(base: u8, word: &[u8]) -> Point {
    let top = base - 1;
    let end = word.iter().rposition(|&d| d != top).map_or(0, |i| i + 1);
    Point::from_canonical(base, word[..end].to_vec(), top)
}

pub fn node_min(base: u8, word: &[u8]) -> Point {
    let end = word.iter().rposition(|&d| d != 0).map_or(0, |i| i + 1);
    Point::from_canonical(base, word[..end].to_vec(), 0)
}

/// An exact value of `ρ_b`: either `0` or `2^{-n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Distance {
    Zero,
    PowNeg(u32),
}

impl Distance {
    pub fn to_f64(self) -> f64 {
        match self {
            Distance::Zero => 0.0,
            Distance::PowNeg(n) => 0.5f64.powi(n as i32),
        }
    }
}

impl PartialOrd for Distance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Distance {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Distance::Zero, Distance::Zero) => Ordering::Equal,
            (Distance::Zero, _) => Ordering::Less,
            (_, Distance::Zero) => Ordering::Greater,
            (Distance::PowNeg(a), Distance::PowNeg(b)) => b.cmp(a),
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Zero => write!(f, "0"),
            Distance::PowNeg(n) => write!(f, "2^-{n}"),
        }
    }
}

/// Increments `w` as a base-`b` counter; `false` on overflow.
fn increment(word: &mut [u8], base: u8) -> bool {
    for d in word.iter_mut().rev() {
        if *d + 1 < base {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}

/// The first element of `𝒜_b`, in the enumeration ordered by stem length and
/// then lexicographically, that lies in `[lo, hi)`.
pub fn first_a_point_in(lo: &Point, hi: &Point) -> Option<Point> {
    let base = lo.base;
    let top = base - 1;
    let bound = lo.stem.len().max(hi.stem.len()) + 3;
    for len in 1..=bound {
        let mut word = lo.prefix(len);
        // points w·(b-1)^ω with |w| = len are increasing in w, and the first
        // one not below lo extends lo|len.
        let mut ok = true;
        while word[len - 1] == top {
            if !increment(&mut word, base) {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        let candidate = Point::from_canonical(base, word, top);
        if candidate >= *lo && candidate < *hi {
            return Some(candidate);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(base: u8, stem: &[u8], tail: u8) -> Point {
        Point::new(base, stem.to_vec(), tail).unwrap()
    }

    #[test]
    fn canonical_form_strips_tail_digits() {
        let x = p(2, &[0, 1, 1], 1);
        assert_eq!(x.stem(), &[0]);
        let (_, changed) = Point::new_reporting(2, vec![0, 1], 1).unwrap();
        assert!(changed);
        let (_, changed) = Point::new_reporting(2, vec![0, 1], 0).unwrap();
        assert!(!changed);
    }

    #[test]
    fn rejects_bad_digits_and_bases() {
        assert!(matches!(Point::new(2, vec![2], 0), Err(Error::DigitOutOfRange { .. })));
        assert!(matches!(Point::new(3, vec![], 3), Err(Error::DigitOutOfRange { .. })));
        assert!(matches!(Point::new(1, vec![], 0), Err(Error::InvalidBase(1))));
    }

    #[test]
    fn lex_examples() {
        let a = p(2, &[0], 1);
        let zero = Point::min(2);
        assert_eq!(a.lex_compare(&zero).unwrap(), Ordering::Greater);
        assert_eq!(a.lex_compare(&a).unwrap(), Ordering::Equal);
        let top = Point::max(2);
        for other in [a, zero, p(2, &[1, 1, 0], 1)] {
            assert_eq!(top.lex_compare(&other).unwrap(), Ordering::Greater);
        }
        assert!(matches!(
            top.lex_compare(&Point::max(3)),
            Err(Error::BaseMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn rho_examples() {
        let a = p(2, &[0], 1);
        assert_eq!(a.rho(&Point::min(2)).unwrap(), Distance::PowNeg(1));
        assert_eq!(a.rho(&a).unwrap(), Distance::Zero);
        assert_eq!(
            p(2, &[0, 0, 1], 1).rho(&p(2, &[0, 0, 0], 1)).unwrap(),
            Distance::PowNeg(2)
        );
        assert!(a.rho(&Point::min(3)).is_err());
    }

    #[test]
    fn node_extremes() {
        let m = node_max(2, &[0, 1]);
        assert_eq!(m, p(2, &[0], 1));
        assert_eq!(m, node_max(2, &[0]));
        assert_eq!(node_min(2, &[1]), p(2, &[1], 0));
        assert_eq!(node_max(2, &[]), Point::max(2));
        assert_eq!(node_min(3, &[2, 0, 0]), p(3, &[2], 0));
        let n = Node::new(3, vec![1, 2]).unwrap();
        assert!(n.contains(&n.max_point()) && n.contains(&n.min_point()));
        assert!(!n.contains(&Point::max(3)));
    }

    #[test]
    fn successor_examples() {
        assert_eq!(p(2, &[0, 0], 1).interval_successor().unwrap(), p(2, &[0, 1], 0));
        assert_eq!(p(2, &[0], 1).interval_successor().unwrap(), p(2, &[1], 0));
        assert_eq!(p(3, &[0, 1], 2).interval_successor().unwrap(), p(3, &[0, 2], 0));
        assert!(matches!(Point::max(2).interval_successor(), Err(Error::NoSuccessor(_))));
        assert!(matches!(
            p(2, &[1], 0).interval_successor(),
            Err(Error::NotEventuallyMax(_))
        ));
        assert_eq!(p(3, &[0, 2], 0).interval_predecessor().unwrap(), p(3, &[0, 1], 2));
        assert!(matches!(
            Point::min(2).interval_predecessor(),
            Err(Error::NoPredecessor(_))
        ));
    }

    #[test]
    fn encode_examples() {
        let x = p(2, &[1, 0, 1, 0], 1);
        assert_eq!(x.encode_binary().unwrap(), x);
        assert_eq!(p(3, &[1], 2).encode_binary().unwrap(), p(2, &[1, 0], 1));
        assert_eq!(Point::max(3).encode_binary().unwrap(), Point::max(2));
        assert!(matches!(p(3, &[0], 1).encode_binary(), Err(Error::NonConstantImage(_))));
    }

    #[test]
    fn first_a_point_examples() {
        // cell [0^ω, 001^ω]: nothing of stem length <= 2 lies strictly below its max
        let lo = Point::min(2);
        let hi = p(2, &[0, 0], 1);
        assert_eq!(first_a_point_in(&lo, &hi), Some(p(2, &[0, 0, 0], 1)));
        // whole space: the first element of the enumeration
        assert_eq!(first_a_point_in(&lo, &Point::max(2)), Some(p(2, &[0], 1)));
        assert_eq!(first_a_point_in(&Point::min(3), &Point::max(3)), Some(p(3, &[0], 2)));
        assert_eq!(first_a_point_in(&p(3, &[1], 0), &Point::max(3)), Some(p(3, &[1], 2)));
    }
}
