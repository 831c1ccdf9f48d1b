use cantor_ramsey::cantor::{node_max, Distance};
use cantor_ramsey::{Error, Point};
use proptest::prelude::*;

fn point_in(base: u8) -> impl Strategy<Value = Point> {
    (prop::collection::vec(0..base, 0..8), 0..base).prop_map(move |(stem, tail)| Point::new(base, stem, tail).unwrap())
}

fn based_point() -> impl Strategy<Value = Point> {
    (2u8..=4).prop_flat_map(point_in)
}

fn a_point() -> impl Strategy<Value = Point> {
    (2u8..=4)
        .prop_flat_map(|b| prop::collection::vec(0..b, 1..8).prop_map(move |w| (b, w)))
        .prop_filter_map("stem must not end with b-1", |(b, w)| {
            (w.last() != Some(&(b - 1))).then(|| Point::new(b, w, b - 1).unwrap())
        })
}

fn triple() -> impl Strategy<Value = (Point, Point, Point)> {
    (2u8..=4).prop_flat_map(|b| (point_in(b), point_in(b), point_in(b)))
}

/// The first `n` digits.
fn digits(p: &Point, n: usize) -> Vec<u8> {
    (0..n).map(|i| p.digit_at(i)).collect()
}

proptest! {
    #[test]
    fn canonicalizing_twice_changes_nothing(p in based_point()) {
        let (again, changed) = Point::new_reporting(p.base(), p.stem().to_vec(), p.tail()).unwrap();
        prop_assert_eq!(&again, &p);
        prop_assert!(!changed);
    }

    #[test]
    fn padded_stems_collapse(p in based_point(), extra in 1usize..4) {
        let mut stem = p.stem().to_vec();
        stem.extend(std::iter::repeat_n(p.tail(), extra));
        let (q, changed) = Point::new_reporting(p.base(), stem, p.tail()).unwrap();
        prop_assert_eq!(q, p);
        prop_assert!(changed);
    }

    #[test]
    fn rho_is_an_ultrametric((x, y, z) in triple()) {
        let xz = x.rho(&z).unwrap();
        let bound = x.rho(&y).unwrap().max(y.rho(&z).unwrap());
        prop_assert!(xz <= bound);
        prop_assert_eq!(x.rho(&x).unwrap(), Distance::Zero);
    }

    #[test]
    fn order_follows_the_first_difference((x, y, _) in triple()) {
        match x.first_difference(&y) {
            None => prop_assert_eq!(&x, &y),
            Some(n) => {
                prop_assert_eq!(digits(&x, n), digits(&y, n));
                prop_assert_eq!(x < y, x.digit_at(n) < y.digit_at(n));
            }
        }
    }

    #[test]
    fn successor_is_the_next_point(x in a_point(), z in based_point()) {
        let y = x.interval_successor().unwrap();
        prop_assert!(y.is_eventually_zero());
        prop_assert!(x < y);
        prop_assert_eq!(y.interval_predecessor().unwrap(), x.clone());
        if z.base() == x.base() {
            // nothing lies strictly between x and its successor
            prop_assert!(!(x < z && z < y));
        }
    }
}

#[test]
fn maximum_has_no_successor() {
    let top = Point::max(3);
    assert!(matches!(top.interval_successor(), Err(Error::NoSuccessor(_))));
    assert!(matches!(
        Point::min(2).interval_predecessor(),
        Err(Error::NoPredecessor(_))
    ));
    assert_eq!(
        node_max(2, &[0]).interval_successor().unwrap(),
        Point::new(2, vec![1], 0).unwrap()
    );
}

/// Every ternary point with stem length at most 6 and tail 0 or 2.
fn ternary_points() -> Vec<Point> {
    let mut words: Vec<Vec<u8>> = vec![Vec::new()];
    let mut all = Vec::new();
    for _ in 0..=6 {
        let mut next = Vec::new();
        for w in &words {
            for tail in [0, 2] {
                if w.last() != Some(&tail) {
                    all.push(Point::new(3, w.clone(), tail).unwrap());
                }
            }
            for d in 0..3 {
                let mut v = w.clone();
                v.push(d);
                next.push(v);
            }
        }
        words = next;
    }
    all.sort();
    all.dedup();
    all
}

#[test]
fn binary_encoding_is_injective_and_monotone() {
    let points = ternary_points();
    let codes: Vec<Point> = points.iter().map(|p| p.encode_binary().unwrap()).collect();
    assert!(codes.iter().all(|c| c.base() == 2));
    for w in codes.windows(2) {
        assert!(w[0] < w[1], "{} !< {}", w[0], w[1]);
    }
    assert_eq!(points.len(), codes.len());
}

#[test]
fn binary_encoding_needs_extreme_tails() {
    let p = Point::new(3, vec![0], 1).unwrap();
    assert!(matches!(p.encode_binary(), Err(Error::NonConstantImage(_))));
}
