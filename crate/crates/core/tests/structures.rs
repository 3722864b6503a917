mod common;

use amalgam::groups::all_permutations;
use amalgam::structures::{
    all_embeddings, automorphisms, generated_substructure, isomorphic, parse_structure, write_structure,
};
use common::{class, random_member, random_perm, random_structure, CLASSES};
use proptest::prelude::*;

fn class_index() -> impl Strategy<Value = usize> {
    0..CLASSES.len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn embeddings_preserve_and_reflect(ci in class_index(), na in 0usize..=3, nb in 0usize..=4, seed in any::<u64>()) {
        let c = class(CLASSES[ci]);
        let (Some(a), Some(b)) = (random_member(&*c, na, seed), random_member(&*c, nb, seed.rotate_left(7))) else {
            return Ok(());
        };
        for e in all_embeddings(&a, &b).unwrap() {
            prop_assert!(e.check(&a, &b).is_ok());
        }
    }

    #[test]
    fn automorphisms_form_a_group(ci in class_index(), n in 0usize..=5, seed in any::<u64>()) {
        let m = random_structure(&*class(CLASSES[ci]), n, seed);
        prop_assume!(m.is_valid());
        let g = automorphisms(&m).unwrap();
        prop_assert!(g.check_closed().is_ok());
        prop_assert!(g.elements().iter().any(|p| p.is_identity()));
        for p in g.elements() {
            prop_assert!(g.contains(&p.inverse()));
            for q in g.elements() {
                prop_assert!(g.contains(&p.compose(q)));
            }
        }
    }

    #[test]
    fn automorphisms_match_permutation_filter(ci in class_index(), n in 0usize..=5, seed in any::<u64>()) {
        let m = random_structure(&*class(CLASSES[ci]), n, seed);
        prop_assume!(m.is_valid());
        let mut searched: Vec<Vec<usize>> =
            automorphisms(&m).unwrap().elements().iter().map(|p| p.images().to_vec()).collect();
        searched.sort();
        let brute: Vec<Vec<usize>> = all_permutations(n).into_iter().filter(|p| m.relabel(p) == m).collect();
        prop_assert_eq!(searched, brute);
    }

    #[test]
    fn relational_generated_substructure_keeps_size(n in 0usize..=5, mask in any::<u32>(), seed in any::<u64>()) {
        for name in ["lo", "bipartite", "div:lo", "mix:sets:lo"] {
            let m = random_structure(&*class(name), n, seed);
            let subset: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            let (sub, inc) = generated_substructure(&m, &subset).unwrap();
            prop_assert_eq!(sub.size(), subset.len());
            prop_assert!(inc.check(&sub, &m).is_ok());
        }
    }

    #[test]
    fn isomorphism_is_an_equivalence(ci in class_index(), n in 0usize..=4, seed in any::<u64>()) {
        let m = random_structure(&*class(CLASSES[ci]), n, seed);
        prop_assume!(m.is_valid());
        let a = m.relabel(&random_perm(n, seed ^ 1));
        let b = a.relabel(&random_perm(n, seed ^ 2));
        prop_assert!(isomorphic(&m, &m).unwrap().is_some());
        let ab = isomorphic(&a, &b).unwrap();
        let ba = isomorphic(&b, &a).unwrap();
        prop_assert_eq!(ab.is_some(), ba.is_some());
        prop_assert!(isomorphic(&m, &a).unwrap().is_some());
        prop_assert!(isomorphic(&m, &b).unwrap().is_some());
        if let Some(e) = ab {
            prop_assert!(e.is_bijective_onto(n) && e.check(&a, &b).is_ok());
        }
        let other = random_structure(&*class(CLASSES[ci]), n, seed ^ 3);
        if other.is_valid() {
            let direct = isomorphic(&m, &other).unwrap().is_some();
            prop_assert_eq!(direct, isomorphic(&b, &other).unwrap().is_some());
        }
    }

    #[test]
    fn text_format_round_trips(ci in class_index(), n in 0usize..=5, seed in any::<u64>()) {
        let m = random_structure(&*class(CLASSES[ci]), n, seed);
        prop_assume!(m.is_valid());
        prop_assert_eq!(parse_structure(&write_structure(&m)).unwrap(), m);
    }
}
