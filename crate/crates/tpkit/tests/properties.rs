//! Property tests over randomly generated shapes, trees and systems.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tpkit::gen::{random_system, random_tree, shuffle_domain};
use tpkit::patterns::{canonical_witness, verify, Certificate, Dims, Kind, LabeledTree, Subset};
use tpkit::pfc::{check_pfc_amalgam, pfc_amalgamate, random_problem, BaseClassOracle, EquivalenceOracle, GraphOracle};
use tpkit::search::{naive_search, search, Outcome, SearchSpec};
use tpkit::treeidx::{qftp, Lang, Node, TreeShape};
use tpkit::treeops::{apply_intersect, elongation, identity, stretching, widening};

fn shape() -> impl Strategy<Value = TreeShape> {
    (1u32..=3, 1usize..=4).prop_map(|(b, d)| TreeShape::new(b, d).unwrap())
}

fn node_in(s: TreeShape) -> impl Strategy<Value = Node> {
    (0..s.node_count()).prop_map(move |i| s.node_at(i).unwrap())
}

fn tree_kind() -> impl Strategy<Value = Kind> {
    prop_oneof![
        Just(Kind::Tp1),
        Just(Kind::Sct),
        (2usize..=3).prop_map(|k| Kind::Tp { k }),
        (2usize..=3).prop_map(|n| Kind::CdtN { n }),
        (2usize..=3).prop_map(|k| Kind::WeakKTp1 { k }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn node_text_round_trip(entries in proptest::collection::vec(0u32..5, 0..5)) {
        let n = Node::new(entries);
        prop_assert_eq!(n.to_string().parse::<Node>().unwrap(), n);
    }

    #[test]
    fn canonical_index_round_trip(s in shape()) {
        for (i, n) in s.nodes().iter().enumerate() {
            prop_assert_eq!(s.index_of(n), Some(i));
            prop_assert_eq!(&s.node_at(i).unwrap(), n);
        }
        prop_assert_eq!(s.nodes().len(), s.node_count());
    }

    #[test]
    fn meet_is_a_semilattice((_, a, b, c) in shape().prop_flat_map(|s| (Just(s), node_in(s), node_in(s), node_in(s)))) {
        prop_assert_eq!(a.meet(&b), b.meet(&a));
        prop_assert_eq!(a.meet(&a), a.clone());
        prop_assert_eq!(a.meet(&b).meet(&c), a.meet(&b.meet(&c)));
        prop_assert!(a.meet(&b).is_prefix_of(&a));
    }

    #[test]
    fn qftp_ignores_a_common_prefix((_, t) in shape().prop_flat_map(|s| (Just(s), proptest::collection::vec(node_in(s), 1..4)))) {
        // Prepending the same entry to every node is an L0 embedding.
        let shifted: Vec<Node> = t.iter().map(|n| Node::new([1].iter().chain(n.entries()).copied().collect())).collect();
        prop_assert_eq!(qftp(&t, Lang::L0), qftp(&shifted, Lang::L0));
    }

    #[test]
    fn identity_pullback_is_identity(s in shape(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_tree(&mut rng, s, 4, 0.5);
        prop_assert_eq!(apply_intersect(&identity(s), &t).unwrap(), t);
    }

    #[test]
    fn composition_maps_through_both(s in shape(), k in 1usize..=2) {
        let w = widening(2, 1, s).unwrap();
        let st = stretching(k, 1, w.source).unwrap();
        let both = w.then(&st).unwrap();
        prop_assert_eq!(both.source, st.source);
        for n in s.nodes() {
            let direct = st.map_tuple(w.image(&n).unwrap()).unwrap();
            prop_assert_eq!(both.image(&n).unwrap(), &direct[..]);
        }
    }

    #[test]
    fn elongation_preserves_ls_types_sampled((s, a, b) in shape().prop_flat_map(|s| {
        let pair = || proptest::collection::vec(node_in(s), 2);
        (Just(s), pair(), pair())
    })) {
        let m = elongation(2, s).unwrap();
        if qftp(&a, Lang::Ls) == qftp(&b, Lang::Ls) {
            prop_assert_eq!(qftp(&m.map_tuple(&a).unwrap(), Lang::Ls), qftp(&m.map_tuple(&b).unwrap(), Lang::Ls));
        }
    }

    #[test]
    fn certificate_json_round_trip(s in shape(), kind in tree_kind(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = verify(&Certificate::tree(kind, random_tree(&mut rng, s, 5, 0.6))).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        let back: Certificate = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(verify(&back).unwrap(), c);
    }

    #[test]
    fn verdicts_ignore_domain_relabeling(s in shape(), kind in tree_kind(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_tree(&mut rng, s, 4, 0.6);
        let u: LabeledTree = shuffle_domain(&mut rng, &t);
        let a = verify(&Certificate::tree(kind.clone(), t)).unwrap().is_verified();
        let b = verify(&Certificate::tree(kind, u)).unwrap().is_verified();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn canonical_witnesses_verify(b in 2u32..=3, d in 1usize..=4, kind in tree_kind()) {
        let s = TreeShape::new(b, d).unwrap();
        let c = canonical_witness(&kind, Dims::Tree(s), Default::default()).unwrap();
        prop_assert!(verify(&c).unwrap().is_verified());
    }

    #[test]
    fn subset_algebra(a in proptest::collection::vec(0usize..8, 0..8), b in proptest::collection::vec(0usize..8, 0..8)) {
        let x = Subset::from_elems(8, a.iter().copied());
        let y = Subset::from_elems(8, b.iter().copied());
        prop_assert_eq!(x.intersection(&y), y.intersection(&x));
        prop_assert_eq!(x.is_disjoint(&y), x.intersection(&y).is_empty());
        prop_assert!(x.intersection(&y).is_subset(&x));
    }

    #[test]
    fn pruned_search_matches_naive(seed in any::<u64>(), kind in tree_kind(), b in 1u32..=2, d in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random_system(&mut rng, 4, 3, 0.5);
        let spec = SearchSpec::new(kind, Dims::Tree(TreeShape::new(b, d).unwrap()));
        let naive = naive_search(&spec, &sys).unwrap().map(|(a, _)| a);
        let pruned = match search(&spec, &sys).unwrap().outcome {
            Outcome::Found { assignment, certificate } => {
                prop_assert!(certificate.is_verified());
                Some(assignment)
            }
            Outcome::NoWitness => None,
            Outcome::Unknown { reason } => return Err(TestCaseError::fail(reason)),
        };
        prop_assert_eq!(pruned, naive);
    }

    #[test]
    fn amalgams_satisfy_the_square(seed in any::<u64>(), graph in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let o: &dyn BaseClassOracle = if graph { &GraphOracle } else { &EquivalenceOracle };
        let p = random_problem(&mut rng, o);
        let am = pfc_amalgamate(o, &p.common, &p.left, &p.right).unwrap();
        prop_assert!(check_pfc_amalgam(o, &p.common, &p.left, &p.right, &am).is_ok());
    }
}
