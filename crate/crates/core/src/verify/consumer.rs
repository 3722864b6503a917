use rayon::prelude::*;

use super::{check, run_checks, Bounds, Outcome, SuiteReport};
use crate::catalog::{consumer_products, cp_preference_distinct, distinct_among, plain_types, Diversification};
use crate::fraisse::{brief, build_limit, certify_extension_level, LimitParams};
use crate::groups::PermGroup;
use crate::structures::{automorphisms, FinStructure};

/// Kernel facts for one preference-distinct model: restriction to products
/// is injective, consumer stabilizers are trivial, and no automorphism fixes
/// a consumer while moving another.
pub fn kernel_facts(m: &FinStructure, aut: &PermGroup) -> Result<(), String> {
    let products = Diversification::products(m);
    let consumers = Diversification::consumers(m);
    let mut restrictions: Vec<Vec<usize>> = aut
        .elements()
        .iter()
        .map(|p| products.iter().map(|&x| p.apply(x)).collect())
        .collect();
    restrictions.sort();
    restrictions.dedup();
    if restrictions.len() != aut.order() {
        return Err(format!(
            "{} automorphisms but {} restrictions to products",
            aut.order(),
            restrictions.len()
        ));
    }
    for &c in &consumers {
        if let Some(p) = aut.elements().iter().find(|p| p.fixes(c) && !p.is_identity()) {
            return Err(format!("stabilizer of consumer {c} contains {:?}", p.images()));
        }
    }
    let moves_consumers = |p: &crate::groups::Perm| consumers.iter().any(|&d| !p.fixes(d));
    if let Some(p) = aut
        .elements()
        .iter()
        .find(|p| consumers.iter().any(|&c| p.fixes(c)) && moves_consumers(p))
    {
        return Err(format!("{:?} fixes a consumer and moves another", p.images()));
    }
    Ok(())
}

fn kernel(products: usize, consumers: usize) -> Outcome {
    let d = match consumer_products() {
        Ok(d) => d,
        Err(e) => return Outcome::fail("construction", e.to_string()),
    };
    let types = plain_types(&d, products, consumers);
    let results: Vec<Option<Result<(), String>>> = types
        .par_iter()
        .map(|m| {
            if cp_preference_distinct(&d, m).is_err() {
                return None;
            }
            Some(
                automorphisms(m)
                    .map_err(|e| e.to_string())
                    .and_then(|aut| kernel_facts(m, &aut))
                    .map_err(|e| format!("{e}: M = {}", brief(m))),
            )
        })
        .collect();
    let skipped = results.iter().filter(|r| r.is_none()).count();
    let detail = format!("{} types, {skipped} skipped (shared preferences)", types.len());
    if skipped == types.len() {
        return Outcome::skip(detail);
    }
    Outcome::tally(detail, results.into_iter().flatten().filter_map(Result::err).collect())
}

/// The hypothesis is needed: two consumers with one preference can be
/// swapped by an automorphism that fixes every product.
fn shared_preferences_swap(max_products: usize, max_consumers: usize) -> Outcome {
    let d = match consumer_products() {
        Ok(d) => d,
        Err(e) => return Outcome::fail("construction", e.to_string()),
    };
    let mut tested = 0;
    let mut failures = Vec::new();
    for p in 1..=max_products {
        for c in 2..=max_consumers {
            for m in plain_types(&d, p, c) {
                let Err((a, b)) = cp_preference_distinct(&d, &m) else {
                    continue;
                };
                tested += 1;
                let products = Diversification::products(&m);
                let found = automorphisms(&m).is_ok_and(|aut| {
                    aut.elements()
                        .iter()
                        .any(|g| g.apply(a) == b && products.iter().all(|&x| g.fixes(x)))
                });
                if !found {
                    failures.push(format!("no swap of {a} and {b}: M = {}", brief(&m)));
                }
            }
        }
    }
    Outcome::tally(format!("{tested} models with shared preferences"), failures)
}

fn limit_certificate(steps: usize, cap: usize, seed: u64) -> Outcome {
    let d = match consumer_products() {
        Ok(d) => d,
        Err(e) => return Outcome::fail("construction", e.to_string()),
    };
    let params = LimitParams {
        steps,
        task_size_cap: cap,
        seed: Some(seed),
    };
    let cert = build_limit(&d, params).and_then(|apx| certify_extension_level(&d, &apx, cap).map(|c| (apx, c)));
    match cert {
        Err(e) => Outcome::fail("limit construction", e.to_string()),
        Ok((apx, c)) if c.certified => Outcome::pass(format!(
            "top {} after {} steps, certified at level {cap} on E_0..E_{}",
            apx.top.size(),
            apx.steps_taken,
            c.prefix.unwrap_or(0)
        )),
        Ok((_, c)) => Outcome::fail(
            format!("level {cap} not certified"),
            format!("missing {:?} unsound {:?}", c.missing.first(), c.unsound.first()),
        ),
    }
}

/// Seeds tried, in order from the given one, for a certified prefix that
/// holds at least two consumers.
pub const PREFIX_SEED_ATTEMPTS: u64 = 5;

/// Two consumers of a level-4 certified prefix are separated in the top:
/// `{c, d} ⊂ {c, d, p, q}` with opposite orders on `p, q` is a task.
fn prefix_distinct(steps: usize, seed: u64) -> Outcome {
    let d = match consumer_products() {
        Ok(d) => d,
        Err(e) => return Outcome::fail("construction", e.to_string()),
    };
    let mut last = String::new();
    for s in seed..seed + PREFIX_SEED_ATTEMPTS {
        let params = LimitParams {
            steps,
            task_size_cap: 4,
            seed: Some(s),
        };
        let (apx, cert) = match build_limit(&d, params).and_then(|apx| certify_extension_level(&d, &apx, 4).map(|c| (apx, c))) {
            Ok(x) => x,
            Err(e) => return Outcome::fail("limit construction", e.to_string()),
        };
        let Some(j) = cert.prefix else {
            return Outcome::fail(format!("seed {s}: level 4 not certified"), format!("missing {:?}", cert.missing.first()));
        };
        let consumers: Vec<usize> = Diversification::consumers(&apx.top)
            .into_iter()
            .filter(|&c| c < apx.sizes[j])
            .collect();
        let whole = if cp_preference_distinct(&d, &apx.top).is_ok() {
            "distinct"
        } else {
            "not distinct"
        };
        last = format!(
            "seed {s}: {} consumers in certified E_{j} of size {}; whole top ({} elements) {whole}",
            consumers.len(),
            apx.sizes[j],
            apx.top.size()
        );
        if consumers.len() < 2 {
            continue;
        }
        return match distinct_among(&d, &apx.top, &consumers) {
            Ok(()) => Outcome::pass(last),
            Err((a, b)) => Outcome::fail(last, format!("consumers {a} and {b} share a preference")),
        };
    }
    Outcome::skip(last)
}

pub fn suite_consumer_product(bounds: &Bounds) -> SuiteReport {
    let b = bounds.clone();
    let mut checks = Vec::new();
    for p in 1..=b.max_products {
        for c in 1..=b.max_consumers {
            checks.push(check(format!("cp.kernel.P{p}.C{c}"), move || kernel(p, c)));
        }
    }
    let (mp, mc) = (b.max_products, b.max_consumers);
    checks.push(check("cp.shared-preferences.swap", move || shared_preferences_swap(mp, mc)));
    let (steps, cap, seed, cp_steps) = (b.steps, b.cap, b.seed, b.cp_steps);
    checks.push(check("cp.limit.certificate", move || limit_certificate(steps, cap, seed)));
    checks.push(check("cp.limit.prefix-distinct", move || prefix_distinct(cp_steps, seed)));
    run_checks("consumer-product", bounds, checks)
}
