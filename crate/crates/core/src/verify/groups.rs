use std::collections::BTreeSet;

use rand::Rng;

use super::{check, rng, run_checks, Bounds, Outcome, SuiteReport};
use crate::catalog::{consumer_products, cp_model, BipartiteGraphs, LinearOrders, PureSets, RotatingMachines};
use crate::fraisse::FraisseClass;
use crate::groups::{
    has_element_of_order, h_embed, is_free_action, symdiff_compose, GAction, GroupTable,
};
use crate::structures::{automorphisms, FinStructure};

/// Subsets of `{1..n}` indexed by bitmask.
pub(crate) fn subsets(n: u32) -> Vec<BTreeSet<i64>> {
    (0u32..1 << n)
        .map(|mask| (1..=n).filter(|&i| mask >> (i - 1) & 1 == 1).map(i64::from).collect())
        .collect()
}

fn show(a: &BTreeSet<i64>) -> String {
    format!("{a:?}")
}

/// `h_{A △ B} = h_A ∘ h_B` for one pair.
pub(crate) fn h_law_holds(a: &BTreeSet<i64>, b: &BTreeSet<i64>) -> bool {
    match (h_embed(a), h_embed(b), h_embed(&symdiff_compose(a, b))) {
        (Ok(ha), Ok(hb), Ok(hab)) => ha.compose(&hb) == hab,
        _ => false,
    }
}

/// Exhaustive over `{1..n}` pairs plus seeded pairs over `{1..10}`.
pub(crate) fn h_embed_law(n: u32, samples: usize, seed: u64) -> Outcome {
    let sets = subsets(n);
    let mut failures = Vec::new();
    for a in &sets {
        for b in &sets {
            if !h_law_holds(a, b) {
                failures.push(format!("A = {} B = {}", show(a), show(b)));
            }
        }
    }
    let mut r = rng(seed);
    for _ in 0..samples {
        let pick = |r: &mut rand_chacha::ChaCha8Rng| (1..=10).filter(|_| r.gen_bool(0.5)).collect();
        let (a, b): (BTreeSet<i64>, BTreeSet<i64>) = (pick(&mut r), pick(&mut r));
        if !h_law_holds(&a, &b) {
            failures.push(format!("A = {} B = {}", show(&a), show(&b)));
        }
    }
    Outcome::tally(
        format!("{} exhaustive pairs over {{1..{n}}}, {samples} sampled over {{1..10}}", sets.len() * sets.len()),
        failures,
    )
}

/// `h_A` is the identity only for `A = ∅`, and always an involution.
pub(crate) fn h_embed_kernel(n: u32) -> Outcome {
    let sets = subsets(n);
    let failures = sets
        .iter()
        .filter_map(|a| {
            let h = h_embed(a).ok()?;
            let ok = h.is_identity() == a.is_empty() && h.compose(&h).is_identity();
            (!ok).then(|| format!("A = {}", show(a)))
        })
        .collect();
    Outcome::tally(format!("{} subsets of {{1..{n}}}", sets.len()), failures)
}

fn symdiff_laws() -> Outcome {
    let sets = subsets(4);
    let empty = BTreeSet::new();
    let mut failures = Vec::new();
    for a in &sets {
        if symdiff_compose(a, &empty) != *a || !symdiff_compose(a, a).is_empty() {
            failures.push(format!("identity/inverse at A = {}", show(a)));
        }
        for b in &sets {
            if symdiff_compose(a, b) != symdiff_compose(b, a) {
                failures.push(format!("commutativity at A = {} B = {}", show(a), show(b)));
            }
            for c in &sets {
                let left = symdiff_compose(&symdiff_compose(a, b), c);
                let right = symdiff_compose(a, &symdiff_compose(b, c));
                if left != right {
                    failures.push(format!("associativity at {} {} {}", show(a), show(b), show(c)));
                }
            }
        }
    }
    Outcome::tally(format!("{} triples over {{1..4}}", sets.len().pow(3)), failures)
}

/// Small catalog structures with their names.
fn catalog_samples() -> Vec<(String, FinStructure)> {
    let mut out = Vec::new();
    let sets = PureSets::new();
    let lo = LinearOrders::new();
    let rot = RotatingMachines::new();
    let bip = BipartiteGraphs::new();
    for n in 1..=4 {
        out.push((format!("set {n}"), sets.empty().grown(n)));
        out.push((format!("chain {n}"), lo.chain(n)));
    }
    for n in 1..=6 {
        out.push((format!("wheel {n}"), rot.wheel(n)));
    }
    out.push(("wheels 2,3".into(), rot.wheel_stack(&[2, 3])));
    for (n, k) in [(2, 2), (3, 1), (2, 3)] {
        if let Ok(g) = rot.gadget(n, k) {
            out.push((format!("gadget {n} {k}"), g));
        }
    }
    out.push(("bipartite K(1,2)".into(), bip.graph(1, 2, &[(0, 0), (0, 1)])));
    out.push(("bipartite 2+2 matching".into(), bip.graph(2, 2, &[(0, 0), (1, 1)])));
    if let Ok(d) = consumer_products() {
        out.push(("cp equal orders".into(), cp_model(&d, 2, &[vec![0, 1], vec![0, 1]])));
        out.push(("cp opposite orders".into(), cp_model(&d, 2, &[vec![0, 1], vec![1, 0]])));
    }
    out
}

/// By Cauchy, an element of order 2 exists iff the order is even; the
/// detection must agree with that on every catalog automorphism group.
fn order_two_detection() -> Outcome {
    let samples = catalog_samples();
    let failures = samples
        .iter()
        .filter_map(|(name, m)| match automorphisms(m) {
            Err(e) => Some(format!("{name}: {e}")),
            Ok(g) => {
                let found = has_element_of_order(&g, 2);
                (found != (g.order() % 2 == 0)).then(|| format!("{name}: |Aut| = {}, order-2 element {found}", g.order()))
            }
        })
        .collect();
    Outcome::tally(format!("{} catalog structures", samples.len()), failures)
}

pub(crate) fn small_groups(max_order: usize) -> Vec<GroupTable> {
    let mut out: Vec<GroupTable> = (1..=max_order).filter_map(|n| GroupTable::cyclic(n).ok()).collect();
    let z2 = GroupTable::cyclic(2).expect("Z2");
    let z3 = GroupTable::cyclic(3).expect("Z3");
    for g in [GroupTable::product(&z2, &z2), GroupTable::product(&z2, &z3)] {
        if g.order() <= max_order {
            out.push(g);
        }
    }
    if max_order >= 6 {
        out.push(GroupTable::symmetric(3).expect("S3"));
    }
    out
}

fn cayley_actions(max_order: usize) -> Outcome {
    let groups = small_groups(max_order);
    let mut failures = Vec::new();
    for g in &groups {
        let a = GAction::cayley(g);
        if let Err(fp) = is_free_action(&a) {
            failures.push(format!("{}: Cayley action fixes {fp:?}", g.name()));
        }
        if !a.is_transitive() {
            failures.push(format!("{}: Cayley action not transitive", g.name()));
        }
        if !g.is_trivial() && is_free_action(&GAction::trivial(g, 1)).is_ok() {
            failures.push(format!("{}: trivial action reported free", g.name()));
        }
    }
    Outcome::tally(format!("{} groups of order <= {max_order}", groups.len()), failures)
}

pub fn suite_groups(bounds: &Bounds) -> SuiteReport {
    let (samples, seed, order) = (bounds.samples, bounds.seed, bounds.group_order);
    let checks = vec![
        check("groups.h-embed.law", move || h_embed_law(6, samples, seed)),
        check("groups.h-embed.kernel", || h_embed_kernel(10)),
        check("groups.symdiff.laws", symdiff_laws),
        check("groups.order-two.detection", order_two_detection),
        check("groups.cayley.free-transitive", move || cayley_actions(order)),
    ];
    run_checks("groups", bounds, checks)
}
