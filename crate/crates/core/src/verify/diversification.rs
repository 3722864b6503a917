use std::sync::Arc;

use super::{check, law_checks, run_checks, Bounds, Outcome, SuiteReport};
use crate::catalog::{diversify, diversify_with_action, Diversification, FixedPart, LinearOrders, RotatingMachines};
use crate::fraisse::{
    audit_extension, build_limit, enumerate_members, extension_templates, Amalgam, ClassError, ClassRef,
    FraisseClass, LimitParams,
};
use crate::groups::{acts_by_automorphisms, is_free_action, GroupTable};
use crate::structures::{Embedding, FinStructure, Signature};

/// The group choices of the suite, cut at `max_order`.
pub fn diversification_groups(max_order: usize) -> Vec<GroupTable> {
    ["Z2", "Z3", "Z4", "S3"]
        .iter()
        .filter_map(|n| GroupTable::by_name(n).ok())
        .filter(|g| g.order() <= max_order)
        .collect()
}

fn lo() -> ClassRef {
    Arc::new(LinearOrders::new())
}

fn brief(m: &FinStructure) -> String {
    crate::fraisse::brief(m)
}

/// Checks one orbit completion of `x`: size, freeness, action by
/// automorphisms, membership of `X^G` and of its reduct, the embedding of
/// `x`, and that a fixed part keeps its own action.
pub fn check_completion(
    div: &Diversification,
    x: &FinStructure,
    fixed: Option<&FixedPart>,
) -> Result<(), String> {
    let q = div.group().order();
    let oc = div.orbit_completion(x, fixed).map_err(|e| e.to_string())?;
    let kept = fixed.map_or(0, |f| f.elements.len());
    let expected = kept + q * (x.size() - kept);
    if oc.structure.size() != expected {
        return Err(format!("|X^G| = {}, expected {expected}", oc.structure.size()));
    }
    is_free_action(&oc.action).map_err(|fp| format!("action not free: {fp:?}"))?;
    let plain = div.forget_action(&oc.structure);
    match acts_by_automorphisms(&oc.action, &plain) {
        Ok(Ok(())) => {}
        Ok(Err(v)) => return Err(format!("action breaks the structure: {v:?}")),
        Err(e) => return Err(e.to_string()),
    }
    div.membership(&oc.structure)
        .map_err(|r| format!("X^G is not a member: {r}"))?;
    let read = div.action_of(&oc.structure).map_err(|e| e.to_string())?;
    if read != oc.action {
        return Err("action symbols disagree with the returned action".into());
    }
    let flat = diversify(div.base().clone()).map_err(|e| e.to_string())?;
    flat.membership(&plain)
        .map_err(|r| format!("reduct of X^G is not a member: {r}"))?;
    oc.embedding
        .check(x, &plain)
        .map_err(|v| format!("X does not embed: {v}"))?;
    if let Some(fp) = fixed {
        for (i, &e) in fp.elements.iter().enumerate() {
            for g in 0..q {
                let moved = oc.embedding.apply(fp.elements[fp.action.act(i, g)]);
                if oc.action.act(oc.embedding.apply(e), g) != moved {
                    return Err(format!("fixed point {e} changed its orbit under element {g}"));
                }
            }
        }
    }
    Ok(())
}

/// Every iso type of nonempty `D(lo)` members with at most `max_size`
/// elements.
pub fn completion_inputs(max_size: usize) -> Result<Vec<FinStructure>, ClassError> {
    let flat = diversify(lo())?;
    let mut out = Vec::new();
    for n in 1..=max_size {
        out.extend(enumerate_members(&flat, n)?);
    }
    Ok(out)
}

fn completion_plain(group: GroupTable, max_size: usize) -> Outcome {
    let div = match diversify_with_action(lo(), group) {
        Ok(d) => d,
        Err(e) => return Outcome::fail("construction", e.to_string()),
    };
    let inputs = match completion_inputs(max_size) {
        Ok(i) => i,
        Err(e) => return Outcome::fail("enumeration", e.to_string()),
    };
    let failures = inputs
        .iter()
        .filter_map(|x| check_completion(&div, x, None).err().map(|e| format!("{e}: X = {}", brief(x))))
        .collect();
    Outcome::tally(format!("{} types, 1 <= |X| <= {max_size}", inputs.len()), failures)
}

/// Grows a completed `X0^G` by one product or one consumer and completes
/// again with `X0^G` as the fixed part; also completes `X0^G` over itself,
/// which must be the identity.
fn completion_fixed(group: GroupTable, max_size: usize) -> Outcome {
    let div = match diversify_with_action(lo(), group) {
        Ok(d) => d,
        Err(e) => return Outcome::fail("construction", e.to_string()),
    };
    let flat = match diversify(lo()) {
        Ok(d) => d,
        Err(e) => return Outcome::fail("construction", e.to_string()),
    };
    let inputs = match completion_inputs(max_size.min(2)) {
        Ok(i) => i,
        Err(e) => return Outcome::fail("enumeration", e.to_string()),
    };
    let one_consumer = flat.plain_model(0, &[LinearOrders::new().empty()]);
    let mut failures = Vec::new();
    let mut tested = 0;
    for x0 in &inputs {
        let base = match div.orbit_completion(x0, None) {
            Ok(oc) => oc,
            Err(e) => {
                failures.push(format!("{e}: X0 = {}", brief(x0)));
                continue;
            }
        };
        let y = div.forget_action(&base.structure);
        let whole = FixedPart {
            elements: (0..y.size()).collect(),
            action: base.action.clone(),
        };
        tested += 1;
        match div.orbit_completion(&y, Some(&whole)) {
            Ok(oc) if oc.embedding == Embedding::identity(y.size()) && oc.structure == base.structure => {}
            Ok(_) => failures.push(format!("completion over itself is not the identity: Y = {}", brief(&y))),
            Err(e) => failures.push(format!("{e}: Y = {}", brief(&y))),
        }
        let grown: Vec<Result<(FinStructure, Embedding), ClassError>> = vec![
            flat.generic_extend(&y, 1),
            flat.amalgamate(&flat.empty(), &y, &one_consumer, &Embedding::empty(), &Embedding::empty())
                .map(|am: Amalgam| (am.structure, am.left)),
        ];
        for g in grown {
            tested += 1;
            match g {
                Err(e) => failures.push(format!("growing Y: {e}")),
                Ok((y1, inc)) => {
                    let fixed = FixedPart {
                        elements: inc.map().to_vec(),
                        action: base.action.clone(),
                    };
                    if let Err(e) = check_completion(&div, &y1, Some(&fixed)) {
                        failures.push(format!("{e}: Y' = {}", brief(&y1)));
                    }
                }
            }
        }
    }
    Outcome::tally(format!("{tested} completions over fixed parts"), failures)
}

/// Forgetting the action keeps `D_G` members inside `D`.
fn reduct_soundness(group: GroupTable) -> Outcome {
    let q = group.order();
    let (div, flat) = match (diversify_with_action(lo(), group), diversify(lo())) {
        (Ok(d), Ok(f)) => (d, f),
        (Err(e), _) | (_, Err(e)) => return Outcome::fail("construction", e.to_string()),
    };
    let mut failures = Vec::new();
    let mut tested = 0;
    for n in (q..=6).step_by(q) {
        match enumerate_members(&div, n) {
            Err(e) => failures.push(e.to_string()),
            Ok(ms) => {
                for m in ms {
                    tested += 1;
                    if let Err(r) = flat.membership(&div.forget_action(&m)) {
                        failures.push(format!("{r}: M = {}", brief(&m)));
                    }
                }
            }
        }
    }
    Outcome::tally(format!("{tested} members of size <= 6"), failures)
}

/// Linear orders that refuse to claim disjoint amalgamation.
#[derive(Debug)]
struct WithoutDisjointness(LinearOrders);

impl FraisseClass for WithoutDisjointness {
    fn name(&self) -> String {
        "lo-glued".into()
    }

    fn signature(&self) -> &Arc<Signature> {
        self.0.signature()
    }

    fn check_member(&self, m: &FinStructure) -> Result<(), String> {
        self.0.check_member(m)
    }

    fn amalgamate(
        &self,
        z: &FinStructure,
        x: &FinStructure,
        y: &FinStructure,
        f: &Embedding,
        g: &Embedding,
    ) -> Result<Amalgam, ClassError> {
        self.0.amalgamate(z, x, y, f, g)
    }

    fn generic_extend(&self, m: &FinStructure, k: usize) -> Result<(FinStructure, Embedding), ClassError> {
        self.0.generic_extend(m, k)
    }

    fn claims_disjoint(&self) -> bool {
        false
    }
}

fn bad_bases_rejected() -> Outcome {
    let mut failures = Vec::new();
    if diversify(Arc::new(WithoutDisjointness(LinearOrders::new()))).is_ok() {
        failures.push("base without disjoint amalgamation accepted".to_string());
    }
    if diversify(Arc::new(RotatingMachines::new())).is_ok() {
        failures.push("base with a function symbol accepted".to_string());
    }
    let div = match diversify_with_action(lo(), GroupTable::cyclic(2).expect("Z2")) {
        Ok(d) => d,
        Err(e) => return Outcome::fail("construction", e.to_string()),
    };
    // one orbit of two products whose action is the identity
    let mut m = div.model(1, &[]);
    m.set_fun(0, 0, 0);
    m.set_fun(0, 1, 1);
    if div.is_member(&m) {
        failures.push("non-free action accepted".to_string());
    }
    Outcome::tally("3 malformed inputs", failures)
}

/// A `D_{Z2}(lo)` approximation whose reduct must satisfy the `D(lo)`
/// extension property on a prefix: templates of size `level` in `D` need
/// task cap `2 level` in `D_{Z2}`.
fn limit_as_plain(steps: usize, level: usize, seed: u64) -> Outcome {
    let z2 = GroupTable::cyclic(2).expect("Z2");
    let (div, flat) = match (diversify_with_action(lo(), z2), diversify(lo())) {
        (Ok(d), Ok(f)) => (d, f),
        (Err(e), _) | (_, Err(e)) => return Outcome::fail("construction", e.to_string()),
    };
    let params = LimitParams {
        steps,
        task_size_cap: 2 * level,
        seed: Some(seed),
    };
    let apx = match build_limit(&div, params) {
        Ok(a) => a,
        Err(e) => return Outcome::fail("limit construction", e.to_string()),
    };
    let templates = match extension_templates(&flat, level) {
        Ok(t) => t,
        Err(e) => return Outcome::fail("templates", e.to_string()),
    };
    let top = div.forget_action(&apx.top);
    let (prefix, missing) = audit_extension(&templates, &top, &apx.sizes, level);
    let detail = format!(
        "top {} after {} steps, level {level} as {}",
        apx.top.size(),
        apx.steps_taken,
        flat.name()
    );
    match prefix {
        Some(j) => Outcome::pass(format!("{detail}, certified prefix E_{j} of size {}", apx.sizes[j])),
        None => Outcome::fail(
            detail,
            missing
                .first()
                .map(|t| format!("E_0 task: template {} embedding {:?}", t.template, t.embedding))
                .unwrap_or_default(),
        ),
    }
}

pub fn suite_diversification(bounds: &Bounds) -> SuiteReport {
    let b = bounds.clone();
    let mut checks = law_checks("div", "div:lo", b.class_size);
    for g in diversification_groups(b.group_order) {
        checks.extend(law_checks("div", &format!("divg:lo:{}", g.name()), b.class_size));
    }
    for g in diversification_groups(b.group_order) {
        let name = g.name().to_string();
        let size = b.completion_size;
        let (g1, g2, g3) = (g.clone(), g.clone(), g);
        checks.push(check(format!("div.completion.{name}"), move || completion_plain(g1.clone(), size)));
        checks.push(check(format!("div.completion-fixed.{name}"), move || completion_fixed(g2.clone(), size)));
        checks.push(check(format!("div.reduct.{name}"), move || reduct_soundness(g3.clone())));
    }
    checks.push(check("div.rejects-bad-bases", bad_bases_rejected));
    let (steps, level, seed) = (b.steps, b.cap, b.seed);
    checks.push(check("div.limit-as-plain.Z2", move || limit_as_plain(steps, level, seed)));
    run_checks("diversification", bounds, checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s3_on_two_points_gives_twelve() {
        let div = diversify_with_action(lo(), GroupTable::symmetric(3).unwrap()).unwrap();
        let flat = diversify(lo()).unwrap();
        let x = flat.plain_model(1, &[LinearOrders::new().chain(1)]);
        let oc = div.orbit_completion(&x, None).unwrap();
        assert_eq!(oc.structure.size(), 12);
        assert!(check_completion(&div, &x, None).is_ok());
    }
}
