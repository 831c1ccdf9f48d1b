use cantor_ramsey::surjections::{
    compose, distance, factor_through, from_filtering, to_filtering, truncate, tuple_to_factor,
};
use cantor_ramsey::{random, Error, Filtering, Point, SupDistance, Surjection};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn binary_point() -> impl Strategy<Value = Point> {
    (prop::collection::vec(0u8..2, 0..10), 0u8..2).prop_map(|(stem, tail)| Point::new(2, stem, tail).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluation_is_monotone(seed: u64, x in binary_point(), y in binary_point()) {
        let f = random::surjection(&mut rng(seed), 2, 4).unwrap();
        let (x, y) = if x <= y { (x, y) } else { (y, x) };
        let fx = f.evaluate(&x, 10, 0).unwrap().digits;
        let fy = f.evaluate(&y, 10, 0).unwrap().digits;
        prop_assert!(fx <= fy, "f({x}) = {fx:?} but f({y}) = {fy:?}");
    }

    #[test]
    fn filtering_roundtrip(seed: u64, base in 2u8..=3, depth in 1u32..=3) {
        let fl = random::filtering(&mut rng(seed), base, depth).unwrap();
        let f = from_filtering(fl.clone()).unwrap();
        prop_assert_eq!(to_filtering(&f, depth).unwrap(), fl);
    }

    #[test]
    fn identity_is_neutral(seed: u64) {
        let f = random::surjection(&mut rng(seed), 2, 3).unwrap();
        let id = Surjection::identity(2);
        let want = f.boundary_tuple(5).unwrap();
        prop_assert_eq!(compose(&id, &f).unwrap().boundary_tuple(5).unwrap(), want.clone());
        prop_assert_eq!(compose(&f, &id).unwrap().boundary_tuple(5).unwrap(), want);
    }

    #[test]
    fn composites_factor_back(seed: u64, depth in 1u32..=4) {
        let mut r = rng(seed);
        let f = random::surjection(&mut r, 2, 3).unwrap();
        let h = random::surjection(&mut r, 2, 3).unwrap();
        let g = compose(&f, &h).unwrap();
        let back = factor_through(&g, &h, depth, 64).unwrap();
        prop_assert_eq!(back.boundary_tuple(depth).unwrap(), f.boundary_tuple(depth).unwrap());
        let tuple = g.boundary_tuple(depth).unwrap();
        let again = tuple_to_factor(&h, &tuple, 64).unwrap();
        prop_assert_eq!(compose(&again, &h).unwrap().boundary_tuple(depth).unwrap(), tuple);
    }

    #[test]
    fn distance_is_symmetric(seed: u64) {
        let mut r = rng(seed);
        let f = random::surjection(&mut r, 2, 3).unwrap();
        let g = random::surjection(&mut r, 2, 3).unwrap();
        prop_assert_eq!(distance(&f, &g, 16).unwrap(), distance(&g, &f, 16).unwrap());
        prop_assert_eq!(distance(&f, &f, 16).unwrap(), SupDistance::ZeroToCap { cap: 16 });
    }

    #[test]
    fn truncation_keeps_shallow_cells(seed: u64, depth in 0u32..=4) {
        let f = random::surjection(&mut rng(seed), 2, 5).unwrap();
        let t = truncate(&f, depth).unwrap();
        for d in 1..=depth {
            prop_assert_eq!(t.boundary_tuple(d).unwrap(), f.boundary_tuple(d).unwrap());
        }
        // agreeing through `depth` puts them within 2^-depth
        match distance(&f, &t, 16).unwrap() {
            SupDistance::Exact { exponent } => prop_assert!(exponent >= depth),
            SupDistance::ZeroToCap { .. } => {}
        }
    }
}

#[test]
fn deep_boundaries_defeat_a_small_cap() {
    let y = Point::new(2, vec![0; 7], 1).unwrap();
    let g = from_filtering(Filtering::new(2, vec![vec![y.clone()]]).unwrap()).unwrap();
    let h = Surjection::identity(2);
    match factor_through(&g, &h, 1, 3) {
        Err(Error::NotARefinement { witness, cap }) => {
            assert_eq!(witness, y);
            assert_eq!(cap, 3);
        }
        other => panic!("expected NotARefinement, got {other:?}"),
    }
    let f = factor_through(&g, &h, 1, 8).unwrap();
    assert_eq!(f.boundary_tuple(1).unwrap().entries(), &[y]);
}

#[test]
fn images_of_extreme_points_are_exact() {
    let f = random::surjection(&mut rng(7), 3, 3).unwrap();
    for p in [Point::min(3), Point::max(3)] {
        assert_eq!(f.evaluate(&p, 4, 0).unwrap().exact, Some(p.clone()));
    }
}
