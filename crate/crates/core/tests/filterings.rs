use cantor_ramsey::intervals::{is_refinement, partition_from_tuple, refine_canonical, CellSource, Refinement};
use cantor_ramsey::surjections::compose;
use cantor_ramsey::{random, BoundaryTuple, Filtering, Point, Surjection};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn filtering(seed: u64, base: u8, depth: u32) -> Filtering {
    random::filtering(&mut ChaCha8Rng::seed_from_u64(seed), base, depth).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cells_tile_the_space(seed: u64, base in 2u8..=3, support in 0u32..=3, depth in 0u32..=4) {
        let f = refine_canonical(&filtering(seed, base, support), depth).unwrap();
        prop_assert!(f.validate().is_ok());
        let tuple = f.stored_tuple(depth).unwrap();
        let cells = partition_from_tuple(&tuple).cells().to_vec();
        prop_assert_eq!(cells.len(), (base as usize).pow(depth));
        prop_assert_eq!(cells[0].lo(), &Point::min(base));
        prop_assert_eq!(cells[cells.len() - 1].hi(), &Point::max(base));
        for w in cells.windows(2) {
            // consecutive cells abut: no gap and no overlap
            prop_assert_eq!(&w[0].hi().interval_successor().unwrap(), w[1].lo());
            prop_assert!(w[0].hi() < w[1].hi());
        }
    }

    #[test]
    fn partition_and_tuple_are_inverse(seed: u64, base in 2u8..=3, depth in 1u32..=3) {
        let f = filtering(seed, base, depth);
        let tuple = f.stored_tuple(depth).unwrap();
        let partition = partition_from_tuple(&tuple);
        prop_assert_eq!(partition.boundary_tuple(), tuple.clone());
        let rebuilt = BoundaryTuple::new(base, depth, tuple.entries().to_vec()).unwrap();
        prop_assert_eq!(partition_from_tuple(&rebuilt), partition);
    }

    #[test]
    fn canonical_refinement_is_deterministic_and_nested(seed: u64, base in 2u8..=3, support in 0u32..=3) {
        let f = filtering(seed, base, support);
        let a = refine_canonical(&f, support + 2).unwrap();
        let b = refine_canonical(&f, support + 2).unwrap();
        prop_assert_eq!(&a, &b);
        let shallow = refine_canonical(&f, support + 1).unwrap();
        prop_assert_eq!(&a.levels()[..shallow.levels().len()], shallow.levels());
        prop_assert_eq!(&a.levels()[..support as usize], f.levels());
    }

    #[test]
    fn refinement_is_a_preorder(seed: u64, d in 1u32..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random::surjection(&mut rng, 2, 2).unwrap();
        let g = compose(&random::surjection(&mut rng, 2, 2).unwrap(), &h).unwrap();
        let f = compose(&random::surjection(&mut rng, 2, 2).unwrap(), &g).unwrap();
        prop_assert!(is_refinement(&h, &h, d, 64).unwrap().holds());
        // a composite's boundaries are boundaries of its inner factor
        prop_assert!(is_refinement(&g, &h, d, 64).unwrap().holds());
        let fg = is_refinement(&f, &g, d, 64).unwrap();
        let gh = is_refinement(&g, &h, d, 64).unwrap();
        if fg.holds() && gh.holds() {
            prop_assert!(is_refinement(&f, &h, d, 64).unwrap().holds());
        }
    }
}

#[test]
fn refinement_reports_the_cap() {
    // 0^5 1^ω only becomes a standard boundary at depth 5
    let fine = Filtering::new(2, vec![vec![Point::new(2, vec![0, 0, 0, 0, 0], 1).unwrap()]]).unwrap();
    let coarse = Filtering::standard(2);
    match is_refinement(&fine, &coarse, 1, 3).unwrap() {
        Refinement::UndecidedAtCap { cap, .. } => assert_eq!(cap, 3),
        other => panic!("expected an undecided result, got {other:?}"),
    }
    assert_eq!(
        is_refinement(&fine, &coarse, 1, 6).unwrap(),
        Refinement::Holds { depth: 5 }
    );
}

#[test]
fn invalid_levels_are_rejected() {
    let y = |w: &[u8]| Point::new(2, w.to_vec(), 1).unwrap();
    // second level does not keep the first level's boundary
    assert!(Filtering::new(2, vec![vec![y(&[0])], vec![y(&[0, 0]), y(&[1, 0]), y(&[1, 1, 0])]]).is_err());
    // decreasing maxima
    assert!(Filtering::new(2, vec![vec![y(&[0])], vec![y(&[0]), y(&[0]), y(&[1, 0])]]).is_err());
    assert!(Filtering::new(2, vec![vec![y(&[0])], vec![y(&[0, 0]), y(&[0]), y(&[1, 0])]]).is_ok());
}

#[test]
fn standard_filtering_cells_are_basic_clopens() {
    let f = Filtering::standard(3);
    for word in [&[][..], &[0], &[2, 1], &[1, 0, 2]] {
        let cell = f.cell(word);
        assert_eq!(cell.lo(), &cantor_ramsey::cantor::node_min(3, word));
        assert_eq!(cell.hi(), &cantor_ramsey::cantor::node_max(3, word));
    }
    let s = Surjection::identity(3);
    assert_eq!(s.boundary_tuple(2).unwrap(), BoundaryTuple::standard(3, 2).unwrap());
}
