mod common;

use std::collections::BTreeSet;

use amalgam::groups::{
    element_orders, h_embed, identify, is_free_action, symdiff_compose, GAction, GroupTable, Perm,
};
use amalgam::structures::{automorphisms, automorphisms_with_cap};
use common::{class, random_member, random_perm, CLASSES};
use proptest::prelude::*;

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn subset_of_ten() -> impl Strategy<Value = BTreeSet<i64>> {
    proptest::collection::btree_set(1i64..=10, 0..=10)
}

fn table() -> impl Strategy<Value = GroupTable> {
    prop_oneof![
        (1usize..=12).prop_map(|n| GroupTable::cyclic(n).unwrap()),
        (1usize..=4).prop_map(|n| GroupTable::symmetric(n).unwrap()),
        ((1usize..=4), (1usize..=4)).prop_map(|(a, b)| {
            GroupTable::product(&GroupTable::cyclic(a).unwrap(), &GroupTable::cyclic(b).unwrap())
        }),
    ]
}

proptest! {
    #[test]
    fn h_embed_is_a_homomorphism_with_trivial_kernel(a in subset_of_ten(), b in subset_of_ten()) {
        let (ha, hb) = (h_embed(&a).unwrap(), h_embed(&b).unwrap());
        prop_assert_eq!(ha.compose(&hb), h_embed(&symdiff_compose(&a, &b)).unwrap());
        prop_assert_eq!(ha.is_identity(), a.is_empty());
    }

    #[test]
    fn cayley_action_is_free_and_transitive(g in table()) {
        let a = GAction::cayley(&g);
        prop_assert!(is_free_action(&a).is_ok());
        prop_assert!(a.is_transitive());
    }

    #[test]
    fn cyclic_element_orders(m in 1usize..=30) {
        let g = automorphisms_with_cap(&amalgam::catalog::RotatingMachines::new().wheel(m), m).unwrap();
        let mut expected: Vec<usize> = (0..m).map(|k| m / gcd(k, m)).collect();
        expected.sort_unstable();
        prop_assert_eq!(element_orders(&g), expected);
    }

    #[test]
    fn identify_is_conjugation_invariant(ci in 0..CLASSES.len(), n in 1usize..=5, seed in any::<u64>()) {
        let Some(m) = random_member(&*class(CLASSES[ci]), n, seed) else {
            return Ok(());
        };
        let g = automorphisms(&m).unwrap();
        let sigma = Perm::new(random_perm(n, seed ^ 5)).unwrap();
        prop_assert_eq!(identify(&g), identify(&g.conjugate(&sigma)));
    }
}
