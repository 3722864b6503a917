//! Pluggable Fraïssé class definitions, exhaustive law checkers and finite
//! approximations of Fraïssé limits.

mod checks;
mod enumerate;
mod limit;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::groups::GroupError;
use crate::structures::{Embedding, FinStructure, Signature, StructureError};

pub use checks::{
    brief, check_amalgamation, check_hereditary, check_jep, validate_amalgam, AmalgamationOptions,
    ClassFailure, ClassReport, OracleBound,
};
pub use enumerate::{
    dedupe_up_to_iso, enumerate_members, enumerate_members_with_cap, MemberTable,
    DEFAULT_ENUMERATION_CAP,
};
pub use limit::{
    audit_extension, build_limit, certify_extension_level, extension_templates, Certificate, LimitApproximation,
    LimitParams, MissingTask, Task, TaskStatus, Template,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassError {
    #[error("{class}: not a member: {reason}")]
    NotMember { class: String, reason: String },
    #[error("{class}: amalgamation failed: {reason}")]
    AmalgamationFailed { class: String, reason: String },
    #[error("{class}: {reason}")]
    Unsupported { class: String, reason: String },
    #[error("enumeration size {size} exceeds cap {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Result of amalgamating `X <-f- Z -g-> Y`: `W` with `left: X -> W` and
/// `right: Y -> W` such that `left ∘ f = right ∘ g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Amalgam {
    pub structure: FinStructure,
    pub left: Embedding,
    pub right: Embedding,
}

/// A class of finite structures closed under isomorphism, with an explicit
/// amalgamation operator and a canonical way to grow members.
pub trait FraisseClass: Send + Sync {
    fn name(&self) -> String;

    fn signature(&self) -> &Arc<Signature>;

    /// Class axioms only; the caller has already checked the signature and
    /// the structure invariants.
    fn check_member(&self, m: &FinStructure) -> Result<(), String>;

    fn membership(&self, m: &FinStructure) -> Result<(), String> {
        if !m.same_signature(&FinStructure::empty(self.signature().clone())) {
            return Err(format!("signature {} is not {}", m.signature(), self.signature()));
        }
        if let Some(v) = m.validate().first() {
            return Err(v.to_string());
        }
        self.check_member(m)
    }

    fn is_member(&self, m: &FinStructure) -> bool {
        self.membership(m).is_ok()
    }

    fn amalgamate(
        &self,
        z: &FinStructure,
        x: &FinStructure,
        y: &FinStructure,
        f: &Embedding,
        g: &Embedding,
    ) -> Result<Amalgam, ClassError>;

    /// A member containing `m` with exactly `k` more elements, plus the
    /// inclusion.
    fn generic_extend(&self, m: &FinStructure, k: usize)
        -> Result<(FinStructure, Embedding), ClassError>;

    fn claims_disjoint(&self) -> bool;

    /// Members of size `n` covering every isomorphism type (duplicates
    /// allowed). Defaults to [`FraisseClass::labeled_members`].
    fn type_candidates(&self, n: usize) -> Vec<FinStructure> {
        self.labeled_members(n)
    }

    /// True when [`FraisseClass::type_candidates`] are pairwise
    /// non-isomorphic, so enumeration may skip deduplication.
    fn candidates_are_types(&self) -> bool {
        false
    }

    /// Every member on the labeled universe `{0..n-1}`. The default walks all
    /// structures of the signature and only suits tiny signatures.
    fn labeled_members(&self, n: usize) -> Vec<FinStructure> {
        brute_force_members(self, n)
    }

    fn empty(&self) -> FinStructure {
        FinStructure::empty(self.signature().clone())
    }
}

pub type ClassRef = Arc<dyn FraisseClass>;

impl fmt::Debug for dyn FraisseClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FraisseClass({})", self.name())
    }
}

/// Upper bound on the number of free bits brute-force generation will walk.
const BRUTE_FORCE_BITS: u32 = 22;

/// Filters every structure of the class signature on `n` points. Only usable
/// for tiny signatures and sizes; panics beyond [`BRUTE_FORCE_BITS`].
pub fn brute_force_members<C: FraisseClass + ?Sized>(class: &C, n: usize) -> Vec<FinStructure> {
    all_structures(class.signature(), n)
        .into_iter()
        .filter(|m| class.check_member(m).is_ok())
        .collect()
}

/// Every valid structure of `sig` on `n` points.
pub fn all_structures(sig: &Arc<Signature>, n: usize) -> Vec<FinStructure> {
    let tuple_lists: Vec<Vec<Vec<usize>>> = sig
        .relations()
        .iter()
        .map(|r| all_tuples(n, r.arity))
        .collect();
    let rel_bits: usize = tuple_lists.iter().map(Vec::len).sum();
    let fun_bits = sig.functions().len() as f64 * (n.max(1) as f64).log2() * n as f64;
    assert!(
        rel_bits as f64 + fun_bits <= BRUTE_FORCE_BITS as f64,
        "brute-force enumeration of {sig} at size {n} is too large"
    );
    let fun_count = n.pow(n as u32).pow(sig.functions().len() as u32);
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << rel_bits) {
        let mut base = FinStructure::new(sig.clone(), n);
        let mut bit = 0;
        for (r, tuples) in tuple_lists.iter().enumerate() {
            for t in tuples {
                if mask >> bit & 1 == 1 {
                    base.insert(r, t);
                }
                bit += 1;
            }
        }
        for code in 0..fun_count {
            let mut m = base.clone();
            let mut rest = code;
            for f in 0..sig.functions().len() {
                for x in 0..n {
                    m.set_fun(f, x, rest % n);
                    rest /= n;
                }
            }
            out.push(m);
        }
    }
    out
}

/// All `n^k` tuples in lexicographic order.
pub fn all_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |e| {
                    let mut t = t.clone();
                    t.push(e);
                    t
                })
            })
            .collect();
    }
    out
}

/// Element bookkeeping for the disjoint union `X ⊔_Z Y`: `X` keeps its
/// numbering, the elements of `Y` outside `g(Z)` follow in `Y` order.
#[derive(Debug, Clone)]
pub struct Pushout {
    pub x_size: usize,
    pub size: usize,
    /// Image in `W` of each element of `Y`.
    pub y_to_w: Vec<usize>,
    /// Elements of `Y` outside `g(Z)`, ascending.
    pub y_only: Vec<usize>,
}

impl Pushout {
    pub fn new(x: &FinStructure, y: &FinStructure, f: &Embedding, g: &Embedding) -> Self {
        let mut y_to_w = vec![usize::MAX; y.size()];
        for (z, &gz) in g.map().iter().enumerate() {
            y_to_w[gz] = f.apply(z);
        }
        let mut next = x.size();
        let mut y_only = Vec::new();
        for (e, slot) in y_to_w.iter_mut().enumerate() {
            if *slot == usize::MAX {
                *slot = next;
                next += 1;
                y_only.push(e);
            }
        }
        Pushout {
            x_size: x.size(),
            size: next,
            y_to_w,
            y_only,
        }
    }

    pub fn left(&self) -> Embedding {
        Embedding::identity(self.x_size)
    }

    pub fn right(&self) -> Embedding {
        Embedding::new(self.y_to_w.clone())
    }

    /// Copies every tuple and function value of `x` and `y` into a fresh
    /// structure on the pushout universe.
    pub fn union(&self, x: &FinStructure, y: &FinStructure) -> FinStructure {
        let mut w = FinStructure::new(x.signature().clone(), self.size);
        let relations = x.signature().relations().len();
        for r in 0..relations {
            for t in x.tuples(r) {
                w.insert(r, t);
            }
            for t in y.tuples(r) {
                let mapped: Vec<usize> = t.iter().map(|&e| self.y_to_w[e]).collect();
                w.insert(r, &mapped);
            }
        }
        for fun in 0..x.signature().functions().len() {
            for e in 0..x.size() {
                w.set_fun(fun, e, x.fun(fun, e));
            }
            for e in 0..y.size() {
                w.set_fun(fun, self.y_to_w[e], self.y_to_w[y.fun(fun, e)]);
            }
        }
        w
    }
}

pub(crate) fn require_member(class: &dyn FraisseClass, m: &FinStructure) -> Result<(), ClassError> {
    class.membership(m).map_err(|reason| ClassError::NotMember {
        class: class.name(),
        reason,
    })
}

/// Checks the amalgamation inputs: members and genuine embeddings.
pub(crate) fn require_span(
    class: &dyn FraisseClass,
    z: &FinStructure,
    x: &FinStructure,
    y: &FinStructure,
    f: &Embedding,
    g: &Embedding,
) -> Result<(), ClassError> {
    for m in [z, x, y] {
        require_member(class, m)?;
    }
    for (e, cod, label) in [(f, x, "f"), (g, y, "g")] {
        e.check(z, cod).map_err(|v| ClassError::AmalgamationFailed {
            class: class.name(),
            reason: format!("{label} is not an embedding: {v}"),
        })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuples_and_structures() {
        assert_eq!(all_tuples(2, 2).len(), 4);
        assert_eq!(all_tuples(3, 0), vec![Vec::<usize>::new()]);
        let sig = Signature::of(&[("p", 1)], &["f"]);
        // 2 unary bits x 2^2 maps
        assert_eq!(all_structures(&sig, 2).len(), 16);
    }
}
