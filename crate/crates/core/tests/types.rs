use cantor_ramsey::devlin::{
    enumerate_types, search_tuple_of_type, similarity_type, stems_strongly_diagonal, tangent_number, type_of_stems,
    TreeType,
};
use cantor_ramsey::{random, Surjection};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn stems() -> impl Strategy<Value = Vec<Vec<u8>>> {
    prop::collection::btree_set(prop::collection::vec(0u8..2, 1..8), 1..5).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #[test]
    fn prefixing_keeps_the_type(s in stems(), prefix in prop::collection::vec(0u8..2, 0..4)) {
        prop_assume!(stems_strongly_diagonal(&s));
        let moved: Vec<Vec<u8>> = s.iter().map(|w| [prefix.as_slice(), w].concat()).collect();
        prop_assert_eq!(type_of_stems(&moved).unwrap(), type_of_stems(&s).unwrap());
    }

    #[test]
    fn padding_a_level_keeps_the_type(s in stems(), j in 0usize..8) {
        prop_assume!(stems_strongly_diagonal(&s));
        let padded: Vec<Vec<u8>> = s
            .iter()
            .map(|w| {
                let mut w = w.clone();
                if w.len() >= j {
                    w.insert(j, 0);
                }
                w
            })
            .collect();
        prop_assert!(stems_strongly_diagonal(&padded));
        prop_assert_eq!(type_of_stems(&padded).unwrap(), type_of_stems(&s).unwrap());
    }

    #[test]
    fn encodings_parse_back(l in 1usize..=4, i: prop::sample::Index) {
        let types = enumerate_types(l).unwrap();
        let t = &types[i.index(types.len())];
        prop_assert_eq!(&TreeType::parse(&t.encoding()).unwrap(), t);
    }

    #[test]
    fn hits_have_the_requested_type(seed: u64, i: prop::sample::Index) {
        let h = random::surjection(&mut ChaCha8Rng::seed_from_u64(seed), 2, 3).unwrap();
        let types = enumerate_types(3).unwrap();
        let target = &types[i.index(types.len())];
        if let Some(hit) = search_tuple_of_type(&h, target, 12).unwrap() {
            prop_assert_eq!(&similarity_type(&hit.tuple).unwrap(), target);
            prop_assert!(hit.tuple.windows(2).all(|w| w[0] < w[1]));
        }
    }
}

#[test]
fn pair_type_encodings() {
    let got: Vec<String> = enumerate_types(2).unwrap().iter().map(|t| t.encoding()).collect();
    assert_eq!(got, ["(0 1 2)", "(0 2 1)"]);
}

#[test]
fn type_counts_are_tangent_numbers() {
    for l in 1..=5 {
        let t: usize = tangent_number(l).unwrap().try_into().unwrap();
        assert_eq!(enumerate_types(l).unwrap().len(), t, "l = {l}");
    }
    assert_eq!(tangent_number(6).unwrap(), 353_792u32.into());
}

#[test]
fn identity_realizes_triples_by_depth_six() {
    let id = Surjection::identity(2);
    let depths: Vec<u32> = enumerate_types(3)
        .unwrap()
        .iter()
        .map(|t| {
            search_tuple_of_type(&id, t, 12)
                .unwrap()
                .expect("identity realizes every type")
                .depth
        })
        .collect();
    assert_eq!(depths.iter().max(), Some(&6));
}
