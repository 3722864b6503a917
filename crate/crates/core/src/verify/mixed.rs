use std::sync::Arc;

use rayon::prelude::*;

use super::{check, law_checks, run_checks, Bounds, Outcome, SuiteReport};
use crate::catalog::{class_by_name, mixed_sum, BipartiteGraphs, LinearOrders, MixedSum, PureSets};
use crate::fraisse::{
    brief, build_limit, certify_extension_level, enumerate_members, ClassRef, FraisseClass, LimitParams,
};
use crate::structures::{automorphisms, embeddings_where, FinStructure};

/// Mixed classes whose distinguishing witness is exercised; `mix:sets:lo`
/// alone would be vacuous since its `R`-side is rigid.
pub const WITNESS_CLASSES: &[&str] = &["mix:sets:lo", "mix:sets:sets", "mix:lo:sets"];

fn mixed(name: &str) -> Result<MixedSum, String> {
    let mut parts = name.splitn(3, ':');
    let (Some("mix"), Some(l), Some(r)) = (parts.next(), parts.next(), parts.next()) else {
        return Err(format!("{name} is not a mixed sum"));
    };
    let side = |n: &str| -> Result<ClassRef, String> { class_by_name(n).map_err(|e| e.to_string()) };
    mixed_sum(side(l)?, side(r)?).map_err(|e| e.to_string())
}

/// For every automorphism `h` of `m` and every `R`-point `b0` it moves:
/// the witness is a member extending `m`, and no automorphism of it
/// extends `h` while fixing `a0`. Returns the number of `(h, b0)` pairs.
pub fn witness_facts(class: &MixedSum, m: &FinStructure) -> Result<usize, String> {
    let r = m.rel("R");
    let aut = automorphisms(m).map_err(|e| e.to_string())?;
    let mut pairs = 0;
    for h in aut.elements() {
        for b0 in (0..m.size()).filter(|&b| m.holds(r, &[b]) && !h.fixes(b)) {
            pairs += 1;
            let (w, a0) = class
                .distinguishing_witness(m, h.images(), b0)
                .map_err(|e| format!("h = {:?}, b0 = {b0}: {e}", h.images()))?;
            class
                .membership(&w)
                .map_err(|e| format!("h = {:?}, b0 = {b0}: witness not a member: {e}", h.images()))?;
            if w.induced(&(0..m.size()).collect::<Vec<_>>()) != *m {
                return Err(format!("h = {:?}, b0 = {b0}: witness does not extend M", h.images()));
            }
            let mut partial: Vec<(usize, usize)> = h.images().iter().copied().enumerate().collect();
            partial.push((a0, a0));
            if !embeddings_where(&w, &w, true, &partial, &|_, _| true, Some(1)).is_empty() {
                return Err(format!("h = {:?}, b0 = {b0}: an extension of h fixes a0", h.images()));
            }
        }
    }
    Ok(pairs)
}

/// Every iso type of `class` with at most `max_size` elements.
pub(crate) fn witness_sweep(name: &str, max_size: usize) -> Outcome {
    let class = match mixed(name) {
        Ok(c) => c,
        Err(e) => return Outcome::fail("construction", e),
    };
    let mut members = Vec::new();
    for n in 0..=max_size {
        match enumerate_members(&class, n) {
            Ok(ms) => members.extend(ms),
            Err(e) => return Outcome::fail("enumeration", e.to_string()),
        }
    }
    let results: Vec<Result<usize, String>> = members
        .par_iter()
        .map(|m| witness_facts(&class, m).map_err(|e| format!("{e}: M = {}", brief(m))))
        .collect();
    let pairs: usize = results.iter().filter_map(|r| r.as_ref().ok()).sum();
    let failures = results.into_iter().filter_map(Result::err).collect();
    Outcome::tally(format!("{} members, {pairs} (h, b0) pairs, |M| <= {max_size}", members.len()), failures)
}

/// An edge-free member with `n` plain `L`-points and no `R`-points has
/// automorphism group of order `n!`.
fn symmetric_groups(max_n: usize) -> Outcome {
    let class = match mixed_sum(Arc::new(PureSets::new()), Arc::new(LinearOrders::new())) {
        Ok(c) => c,
        Err(e) => return Outcome::fail("construction", e.to_string()),
    };
    let failures = (0..=max_n)
        .filter_map(|n| {
            let m = class.compose(&PureSets::new().empty().grown(n), &LinearOrders::new().empty(), &[]);
            let expected: usize = (1..=n).product();
            match automorphisms(&m) {
                Ok(g) if g.order() == expected => None,
                Ok(g) => Some(format!("|L| = {n}: |Aut| = {}, expected {expected}", g.order())),
                Err(e) => Some(format!("|L| = {n}: {e}")),
            }
        })
        .collect();
    Outcome::tally(format!("|L| = 0..={max_n}"), failures)
}

/// Finite chains are rigid, so every automorphism of a `mix:sets:lo`
/// member fixes its `R`-side pointwise.
fn rigidity(max_n: usize) -> Outcome {
    let lo = LinearOrders::new();
    let mut failures: Vec<String> = (0..=max_n + 1)
        .filter_map(|n| match automorphisms(&lo.chain(n)) {
            Ok(g) if g.order() == 1 => None,
            Ok(g) => Some(format!("chain {n}: |Aut| = {}", g.order())),
            Err(e) => Some(format!("chain {n}: {e}")),
        })
        .collect();
    let class = match mixed("mix:sets:lo") {
        Ok(c) => c,
        Err(e) => return Outcome::fail("construction", e),
    };
    let mut tested = 0;
    for n in 0..=max_n {
        let members = match enumerate_members(&class, n) {
            Ok(ms) => ms,
            Err(e) => return Outcome::fail("enumeration", e.to_string()),
        };
        for m in members {
            tested += 1;
            let r = m.rel("R");
            let rs: Vec<usize> = (0..m.size()).filter(|&x| m.holds(r, &[x])).collect();
            match automorphisms(&m) {
                Ok(g) => {
                    if let Some(p) = g.elements().iter().find(|p| rs.iter().any(|&b| !p.fixes(b))) {
                        failures.push(format!("{:?} moves the R-side of {}", p.images(), brief(&m)));
                    }
                }
                Err(e) => failures.push(e.to_string()),
            }
        }
    }
    Outcome::tally(format!("chains up to {}, {tested} mix:sets:lo members", max_n + 1), failures)
}

/// Bipartite extension condition: for disjoint `A, B` inside `E_j` with `|A ∪ B| < level`,
/// some `ℓ ∈ L` and `r ∈ R` of the top outside `A ∪ B` see exactly `A`.
/// Returns the number of `(A, B)` pairs checked.
pub fn star_audit(top: &FinStructure, prefix_size: usize, level: usize) -> Result<usize, String> {
    let (l, r, adj) = (top.rel("L"), top.rel("R"), top.rel("adj"));
    let mut tested = 0;
    let mut chosen: Vec<usize> = Vec::new();
    fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        if cur.len() == k {
            return;
        }
        for x in start..n {
            cur.push(x);
            subsets(n, k, x + 1, cur, out);
            cur.pop();
        }
    }
    let mut all = Vec::new();
    subsets(prefix_size, level - 1, 0, &mut chosen, &mut all);
    for s in all {
        for colour in 0u32..1 << s.len() {
            tested += 1;
            let in_a = |i: usize| colour >> i & 1 == 1;
            let fits = |side: usize, other: usize, v: usize| {
                top.holds(side, &[v])
                    && !s.contains(&v)
                    && s.iter().enumerate().all(|(i, &x)| {
                        !top.holds(other, &[x]) || top.holds(adj, &[v, x]) == in_a(i)
                    })
            };
            let ell = (0..top.size()).any(|v| fits(l, r, v));
            let arr = (0..top.size()).any(|v| fits(r, l, v));
            if !ell || !arr {
                let (a, b): (Vec<usize>, Vec<usize>) = (0..s.len()).partition(|&i| in_a(i));
                let a: Vec<usize> = a.into_iter().map(|i| s[i]).collect();
                let b: Vec<usize> = b.into_iter().map(|i| s[i]).collect();
                return Err(format!("A = {a:?}, B = {b:?}: l found {ell}, r found {arr}"));
            }
        }
    }
    Ok(tested)
}

/// Builds an approximation of `class`, certifies it at `level` and runs the
/// bipartite extension audit on the reduct to `L, R, adj` over the certified prefix.
fn star(class: ClassRef, steps: usize, level: usize, seed: u64) -> Outcome {
    let params = LimitParams {
        steps,
        task_size_cap: level,
        seed: Some(seed),
    };
    let built = build_limit(&*class, params).and_then(|apx| {
        certify_extension_level(&*class, &apx, level).map(|c| (apx, c))
    });
    let (apx, cert) = match built {
        Ok(x) => x,
        Err(e) => return Outcome::fail("limit construction", e.to_string()),
    };
    let Some(j) = cert.prefix else {
        return Outcome::fail(format!("level {level} not certified"), format!("missing {:?}", cert.missing.first()));
    };
    let top = apx.top.reduct(BipartiteGraphs::new().signature());
    match star_audit(&top, apx.sizes[j], level) {
        Ok(n) => Outcome::pass(format!(
            "{n} (A, B) pairs in certified E_{j} of size {}, top {}",
            apx.sizes[j],
            top.size()
        )),
        Err(w) => Outcome::fail(format!("certified prefix E_{j}"), w),
    }
}

pub fn suite_mixed_sum(bounds: &Bounds) -> SuiteReport {
    let b = bounds.clone();
    let mut checks = law_checks("mix", "mix:sets:lo", b.class_size);
    for name in WITNESS_CLASSES {
        let size = b.mixed_size;
        checks.push(check(format!("mix.witness.{name}"), move || witness_sweep(name, size)));
    }
    let size = b.mixed_size;
    checks.push(check("mix.symmetric-groups", move || symmetric_groups(size)));
    checks.push(check("mix.rigidity", move || rigidity(size)));
    let (steps, level, seed) = (b.steps, b.star_level, b.seed);
    checks.push(check("mix.star.bipartite", move || {
        star(Arc::new(BipartiteGraphs::new()), steps, level, seed)
    }));
    checks.push(check("mix.star.mix:sets:lo", move || match class_by_name("mix:sets:lo") {
        Ok(c) => star(c, steps, level, seed),
        Err(e) => Outcome::fail("construction", e.to_string()),
    }));
    run_checks("mixed-sum", bounds, checks)
}
