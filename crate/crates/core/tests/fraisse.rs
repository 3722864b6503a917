mod common;

use amalgam::fraisse::{build_limit, validate_amalgam, LimitParams, TaskStatus};
use amalgam::structures::{all_embeddings, Embedding};
use common::{class, random_member, rng};
use proptest::prelude::*;
use rand::seq::SliceRandom;

/// Classes with cheap limits at small caps.
const LIMIT_CLASSES: &[&str] = &["sets", "lo", "bipartite", "rot", "div:lo", "mix:sets:lo"];

/// Classes whose amalgamation operator accepts arbitrary spans.
const SPAN_CLASSES: &[&str] = &["sets", "lo", "bipartite", "rot", "div:lo", "divg:lo:Z2", "mix:sets:lo", "mix:sets:sets"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn chain_is_monotone_and_ledger_sound(ci in 0..LIMIT_CLASSES.len(), steps in 1usize..=25, cap in 1usize..=2, seed in any::<u64>()) {
        let c = class(LIMIT_CLASSES[ci]);
        let apx = build_limit(&*c, LimitParams { steps, task_size_cap: cap, seed: Some(seed) }).unwrap();
        for i in 0..apx.stage_count() {
            let stage = apx.stage(i);
            prop_assert!(c.is_member(&stage));
            if i + 1 < apx.stage_count() {
                let next = apx.stage(i + 1);
                let inclusion = Embedding::identity(stage.size());
                prop_assert!(inclusion.check(&stage, &next).is_ok());
            }
        }
        for t in &apx.tasks {
            let (TaskStatus::Found { stage, map } | TaskStatus::Built { stage, map }) = &t.status else {
                continue;
            };
            let tpl = &apx.templates[t.template];
            prop_assert!(Embedding::new(map.clone()).check(&tpl.b, &apx.stage(*stage)).is_ok());
            for (i, &x) in tpl.subset.iter().enumerate() {
                prop_assert_eq!(map[x], t.embedding[i]);
            }
        }
    }

    #[test]
    fn limits_are_deterministic(ci in 0..LIMIT_CLASSES.len(), steps in 1usize..=25, seed in any::<u64>()) {
        let c = class(LIMIT_CLASSES[ci]);
        let params = LimitParams { steps, task_size_cap: 2, seed: Some(seed) };
        let (a, b) = (build_limit(&*c, params).unwrap(), build_limit(&*c, params).unwrap());
        prop_assert_eq!(a.manifest(), b.manifest());
        prop_assert_eq!(a.ledger(), b.ledger());
        prop_assert_eq!(a.top, b.top);
    }

    #[test]
    fn operator_amalgams_are_valid(ci in 0..SPAN_CLASSES.len(), nz in 0usize..=2, nx in 0usize..=2, ny in 0usize..=2, seed in any::<u64>()) {
        let c = class(SPAN_CLASSES[ci]);
        let members = (
            random_member(&*c, nz, seed),
            random_member(&*c, nz + nx, seed ^ 1),
            random_member(&*c, nz + ny, seed ^ 2),
        );
        let (Some(z), Some(x), Some(y)) = members else {
            return Ok(());
        };
        let mut r = rng(seed);
        let (Some(f), Some(g)) = (
            all_embeddings(&z, &x).unwrap().choose(&mut r).cloned(),
            all_embeddings(&z, &y).unwrap().choose(&mut r).cloned(),
        ) else {
            return Ok(());
        };
        let am = c.amalgamate(&z, &x, &y, &f, &g).unwrap();
        prop_assert_eq!(validate_amalgam(&*c, &z, &x, &y, &f, &g, &am), Ok(()));
    }
}
