//! Named verification suites. Each check is a bounded, exhaustive or seeded
//! sweep standing in for a statement about an infinite limit; a failing
//! check carries a one-line witness that replays through the operation it
//! names.

mod consumer;
mod diversification;
mod groups;
mod mixed;
mod rotating;

use std::fmt::{self, Write as _};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::catalog::class_by_name;
use crate::fraisse::{check_amalgamation, check_hereditary, check_jep, AmalgamationOptions, ClassReport};

pub use consumer::{kernel_facts, suite_consumer_product, PREFIX_SEED_ATTEMPTS};
pub use diversification::{check_completion, completion_inputs, diversification_groups, suite_diversification};
pub use groups::suite_groups;
pub use mixed::{star_audit, suite_mixed_sum, witness_facts, WITNESS_CLASSES};
pub use rotating::{
    gadget_automorphisms, orders_nontrivial_on_c, predicted_gadget_orders, suite_rotating_machines,
};

pub const SUITES: &[&str] = &[
    "groups",
    "rotating-machines",
    "diversification",
    "consumer-product",
    "mixed-sum",
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("unknown suite `{0}` (known: {known})", known = SUITES.join(", "))]
    UnknownSuite(String),
    #[error("bad bounds: {0}")]
    BadBounds(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        })
    }
}

/// Size and step limits shared by every suite. The defaults keep the full
/// battery within a few minutes on one core.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    /// Size bound of the class-law sweeps.
    pub class_size: usize,
    /// Largest group order used in the diversification suite.
    pub group_order: usize,
    /// Largest `|X|` fed to orbit completion.
    pub completion_size: usize,
    pub max_products: usize,
    pub max_consumers: usize,
    /// Largest mixed-sum member fed to the distinguishing witness.
    pub mixed_size: usize,
    /// Gadgets are checked for `1 <= n <= gadget_n`, `1 <= k <= gadget_k`.
    pub gadget_n: usize,
    pub gadget_k: usize,
    /// Every rotating machine up to this size is checked for abelian `Aut`.
    pub machine_size: usize,
    /// Wheel sizes for edge-free stacks are distinct values up to this bound.
    pub wheel_size: usize,
    pub steps: usize,
    pub cap: usize,
    /// Task cap (and certification level) of the bipartite approximation
    /// behind the bipartite extension audit.
    pub star_level: usize,
    /// Steps of the level-4 consumer-product approximation.
    pub cp_steps: usize,
    pub seed: u64,
    /// Random pairs drawn on top of the exhaustive sweeps.
    pub samples: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            class_size: 3,
            group_order: 6,
            completion_size: 4,
            max_products: 4,
            max_consumers: 3,
            mixed_size: 5,
            gadget_n: 5,
            gadget_k: 4,
            machine_size: 7,
            wheel_size: 5,
            steps: 200,
            cap: 2,
            star_level: 3,
            cp_steps: 30,
            seed: 0,
            samples: 100,
        }
    }
}

impl Bounds {
    /// Bounds small enough for smoke tests.
    pub fn quick() -> Self {
        Bounds {
            class_size: 2,
            group_order: 3,
            completion_size: 2,
            max_products: 3,
            max_consumers: 2,
            mixed_size: 3,
            gadget_n: 3,
            gadget_k: 3,
            machine_size: 4,
            wheel_size: 3,
            steps: 20,
            cap: 2,
            star_level: 2,
            cp_steps: 10,
            seed: 0,
            samples: 10,
        }
    }

    /// Rejects bounds outside what the searches can handle.
    pub fn validate(&self) -> Result<(), VerifyError> {
        let limits = [
            ("class-size", self.class_size, 1, 4),
            ("group-order", self.group_order, 1, 6),
            ("completion-size", self.completion_size, 1, 6),
            ("max-products", self.max_products, 1, 6),
            ("max-consumers", self.max_consumers, 1, 4),
            ("mixed-size", self.mixed_size, 1, 6),
            ("gadget-n", self.gadget_n, 1, 8),
            ("gadget-k", self.gadget_k, 1, 6),
            ("machine-size", self.machine_size, 1, 7),
            ("wheel-size", self.wheel_size, 1, 6),
            ("steps", self.steps, 1, 100_000),
            ("cap", self.cap, 1, 4),
            ("star-level", self.star_level, 2, 4),
            ("cp-steps", self.cp_steps, 1, 200),
        ];
        for (name, value, lo, hi) in limits {
            if !(lo..=hi).contains(&value) {
                return Err(VerifyError::BadBounds(format!("{name} = {value}, expected {lo}..={hi}")));
            }
        }
        Ok(())
    }

    fn describe(&self) -> String {
        format!(
            "class-size={} group-order={} completion-size={} max-products={} max-consumers={} \
             mixed-size={} gadget-n={} gadget-k={} machine-size={} wheel-size={} steps={} cap={} \
             star-level={} cp-steps={} seed={} samples={}",
            self.class_size,
            self.group_order,
            self.completion_size,
            self.max_products,
            self.max_consumers,
            self.mixed_size,
            self.gadget_n,
            self.gadget_k,
            self.machine_size,
            self.wheel_size,
            self.steps,
            self.cap,
            self.star_level,
            self.cp_steps,
            self.seed,
            self.samples
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckRecord {
    pub id: String,
    pub status: Status,
    /// What was swept, e.g. instance counts.
    pub detail: String,
    /// Present on every failure.
    pub witness: Option<String>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: String,
    pub bounds: Bounds,
    pub records: Vec<CheckRecord>,
}

impl SuiteReport {
    pub fn count(&self, status: Status) -> usize {
        self.records.iter().filter(|r| r.status == status).count()
    }

    pub fn passed(&self) -> bool {
        self.count(Status::Fail) == 0
    }

    pub fn record(&self, id: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    /// Machine-readable form: `check <id> <status> <witness-ref>` lines,
    /// then the referenced witnesses. Contains no timings, so it is
    /// byte-identical across runs with the same bounds.
    pub fn to_lines(&self) -> String {
        let mut out = format!("suite {}\nbounds {}\n", self.suite, self.bounds.describe());
        let mut witnesses = Vec::new();
        for r in &self.records {
            let reference = match &r.witness {
                Some(w) => {
                    witnesses.push(w);
                    format!("w{}", witnesses.len())
                }
                None => "-".to_string(),
            };
            let _ = writeln!(out, "check {} {} {}", r.id, r.status, reference);
        }
        for (i, w) in witnesses.iter().enumerate() {
            let _ = writeln!(out, "witness w{} {}", i + 1, w);
        }
        let _ = writeln!(
            out,
            "summary pass {} fail {} skip {}",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skip)
        );
        out
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {}", self.suite)?;
        writeln!(f, "  bounds: {}", self.bounds.describe())?;
        for r in &self.records {
            let status = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skip => "SKIP",
            };
            writeln!(f, "  {status} {:<48} {:>9.1?}  {}", r.id, r.elapsed, r.detail)?;
            if let Some(w) = &r.witness {
                writeln!(f, "       witness: {w}")?;
            }
        }
        write!(
            f,
            "  {} passed, {} failed, {} skipped",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skip)
        )
    }
}

pub fn run_suite(name: &str, bounds: &Bounds) -> Result<SuiteReport, VerifyError> {
    bounds.validate()?;
    Ok(match name {
        "groups" => suite_groups(bounds),
        "rotating-machines" => suite_rotating_machines(bounds),
        "diversification" => suite_diversification(bounds),
        "consumer-product" => suite_consumer_product(bounds),
        "mixed-sum" => suite_mixed_sum(bounds),
        _ => return Err(VerifyError::UnknownSuite(name.to_string())),
    })
}

/// Result of one check before timing is attached.
#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    status: Status,
    detail: String,
    witness: Option<String>,
}

impl Outcome {
    pub(crate) fn pass(detail: impl Into<String>) -> Self {
        Outcome {
            status: Status::Pass,
            detail: detail.into(),
            witness: None,
        }
    }

    pub(crate) fn fail(detail: impl Into<String>, witness: impl Into<String>) -> Self {
        Outcome {
            status: Status::Fail,
            detail: detail.into(),
            witness: Some(witness.into()),
        }
    }

    pub(crate) fn skip(detail: impl Into<String>) -> Self {
        Outcome {
            status: Status::Skip,
            detail: detail.into(),
            witness: None,
        }
    }

    /// Pass iff `failures` is empty; the first failure becomes the witness.
    pub(crate) fn tally(detail: impl Into<String>, failures: Vec<String>) -> Self {
        let detail = detail.into();
        match failures.first() {
            None => Outcome::pass(detail),
            Some(first) => Outcome::fail(format!("{detail}; {} failures", failures.len()), first.clone()),
        }
    }
}

pub(crate) type CheckFn = Box<dyn Fn() -> Outcome + Send + Sync>;

pub(crate) struct Check {
    id: String,
    run: CheckFn,
}

pub(crate) fn check(id: impl Into<String>, run: impl Fn() -> Outcome + Send + Sync + 'static) -> Check {
    Check {
        id: id.into(),
        run: Box::new(run),
    }
}

/// Runs checks in parallel and assembles the report in declaration order.
pub(crate) fn run_checks(suite: &str, bounds: &Bounds, checks: Vec<Check>) -> SuiteReport {
    let records = checks
        .par_iter()
        .map(|c| {
            let start = Instant::now();
            let outcome = (c.run)();
            CheckRecord {
                id: c.id.clone(),
                status: outcome.status,
                detail: outcome.detail,
                witness: outcome.witness,
                elapsed: start.elapsed(),
            }
        })
        .collect();
    SuiteReport {
        suite: suite.to_string(),
        bounds: bounds.clone(),
        records,
    }
}

fn law_outcome(report: Result<ClassReport, crate::fraisse::ClassError>) -> Outcome {
    match report {
        Err(e) => Outcome::fail("sweep aborted", e.to_string()),
        Ok(r) => {
            let mut detail = format!("{} instances, n <= {}", r.tested, r.max_n);
            for note in &r.notes {
                detail.push_str("; ");
                detail.push_str(note);
            }
            match r.failures.first() {
                None => Outcome::pass(detail),
                Some(f) => Outcome::fail(
                    format!("{detail}; {} failures", r.failures.len()),
                    format!("{}: {}", f.description, f.witness),
                ),
            }
        }
    }
}

/// Hereditary, JEP and amalgamation (with oracle agreement) sweeps for a
/// registry class.
pub(crate) fn law_checks(prefix: &str, class: &str, n: usize) -> Vec<Check> {
    let laws: [(&str, fn(&str, usize) -> Outcome); 3] = [
        ("hereditary", |c, n| law_outcome(class_by_name(c).and_then(|c| check_hereditary(&*c, n)))),
        ("jep", |c, n| law_outcome(class_by_name(c).and_then(|c| check_jep(&*c, n)))),
        ("amalgamation", |c, n| {
            law_outcome(class_by_name(c).and_then(|c| check_amalgamation(&*c, &AmalgamationOptions::new(n))))
        }),
    ];
    laws.into_iter()
        .map(|(law, run)| {
            let class = class.to_string();
            check(format!("{prefix}.laws.{class}.{law}"), move || run(&class, n))
        })
        .collect()
}

/// Seeded generator shared by the sampling checks.
pub(crate) fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_and_bad_bounds() {
        assert_eq!(
            run_suite("no-such-suite", &Bounds::default()),
            Err(VerifyError::UnknownSuite("no-such-suite".into()))
        );
        let bounds = Bounds {
            cap: 0,
            ..Bounds::default()
        };
        assert!(matches!(run_suite("groups", &bounds), Err(VerifyError::BadBounds(_))));
    }

    #[test]
    fn line_format_refers_to_witnesses() {
        let checks = vec![
            check("a", || Outcome::pass("ok")),
            check("b", || Outcome::fail("bad", "x = 1")),
            check("c", || Outcome::skip("none")),
        ];
        let r = run_checks("demo", &Bounds::quick(), checks);
        let lines = r.to_lines();
        assert!(lines.contains("check a pass -\ncheck b fail w1\ncheck c skip -\nwitness w1 x = 1\n"));
        assert!(lines.ends_with("summary pass 1 fail 1 skip 1\n"));
        assert!(!r.passed());
    }
}
