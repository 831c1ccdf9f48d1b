use cantor_ramsey::intervals::{BoundaryTuple, ClopenInterval};
use cantor_ramsey::lab::{
    build_witness, epsilon_parameters, lower_bound_coloring, omega_coloring, perfect_tree, random_qcopy,
    realize_all_colors, QCopy,
};
use cantor_ramsey::surjections::{compose, tuple_to_surjection};
use cantor_ramsey::{oracle, random, Error, Surjection};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn qcopy(seed: u64, cap: u32) -> Option<QCopy> {
    // a piece too thin to hold a cell is rejected; such seeds are skipped
    random_qcopy(&mut ChaCha8Rng::seed_from_u64(seed), cap).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn witnesses_are_subcopies_of_the_requested_color(seed: u64, r in 0u64..=6) {
        let Some(y) = qcopy(seed, 64) else { return Ok(()) };
        match build_witness(&y, r) {
            Ok(z) => {
                prop_assert!(z.is_subset_of(&y));
                prop_assert_eq!(omega_coloring(&z).unwrap(), r);
            }
            Err(Error::CapExhausted { .. }) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn perfect_tree_is_prefix_closed(seed: u64, d in 1u32..=6) {
        let Some(y) = qcopy(seed, 32) else { return Ok(()) };
        let tree = perfect_tree(&y, d);
        prop_assert!(tree.nodes.contains(&String::new()));
        for node in &tree.nodes {
            if !node.is_empty() {
                let parent = &node[..node.len() - 1];
                prop_assert!(tree.nodes.iter().any(|n| n == parent), "{node} has no parent");
            }
            let splits_below = tree.splitting.iter().any(|s| s.starts_with(node.as_str()));
            prop_assert!(splits_below || tree.pending.contains(node), "{node} neither splits nor is pending");
        }
    }

    #[test]
    fn tree_membership_matches_a_cell_scan(seed: u64, word in prop::collection::vec(0u8..2, 0..5)) {
        let Some(y) = qcopy(seed, 10) else { return Ok(()) };
        let node = ClopenInterval::of_node(2, &word);
        let mut expected = false;
        for piece in y.pieces() {
            if let Some(j) = piece.intersect(&node) {
                expected |= oracle::has_full_cell(y.h(), &j, 10).unwrap();
            }
        }
        prop_assert_eq!(y.in_tree(&word), expected);
    }

    #[test]
    fn epsilon_brackets_the_scale(eps in 0.001f64..=1.0) {
        let p = epsilon_parameters(2, eps).unwrap();
        let scale = 0.5f64.powi(p.k as i32);
        prop_assert!(scale < eps && eps <= 2.0 * scale);
        prop_assert_eq!(p.l, (1usize << p.k) - 1);
        let finer = epsilon_parameters(2, eps / 2.0).unwrap();
        prop_assert_eq!(finer.k, p.k + 1);
    }

    #[test]
    fn qcopy_json_roundtrip(seed: u64) {
        let Some(y) = qcopy(seed, 64) else { return Ok(()) };
        let text = serde_json::to_string(&y).unwrap();
        let back: QCopy = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
        prop_assert_eq!(omega_coloring(&back).unwrap(), omega_coloring(&y).unwrap());
    }
}

#[test]
fn realized_colors_reverify_from_the_factor() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for h in [Surjection::identity(2), random::surjection(&mut rng, 2, 3).unwrap()] {
        let report = realize_all_colors(&h, 2, 20).unwrap();
        assert!(report.all_realized, "missing {:?}", report.missing);
        assert_eq!(report.realized.len(), 16);
        for w in &report.realized {
            let f = tuple_to_surjection(&BoundaryTuple::new(2, 2, w.factor.clone()).unwrap()).unwrap();
            let g = compose(&f, &h).unwrap();
            assert_eq!(lower_bound_coloring(&g, 2).unwrap(), w.color);
            assert_eq!(g.boundary_tuple(2).unwrap().entries(), w.tuple.as_slice());
        }
    }
}

#[test]
fn witnesses_on_the_full_space() {
    let y = QCopy::unrestricted(Surjection::identity(2), 64).unwrap();
    for r in 0..=8 {
        let z = build_witness(&y, r).unwrap();
        assert_eq!(omega_coloring(&z).unwrap(), r);
    }
}
