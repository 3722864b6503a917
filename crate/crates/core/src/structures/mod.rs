//! Finite models over a signature of relation symbols and unary function
//! symbols, their embeddings, and exhaustive isomorphism search.
//!
//! The universe of a structure of size `n` is always `{0, .., n-1}`. Relation
//! tables are kept sorted so that iteration order, serialization and every
//! derived report are reproducible.

mod embedding;
mod format;
mod search;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use embedding::{Embedding, EmbeddingViolation};
pub use format::{parse_structure, write_structure, ParseError};
pub use search::{
    all_embeddings, automorphisms, automorphisms_with_cap, embeddings_where, extend_embedding,
    isomorphic, isomorphisms, DEFAULT_AUTOMORPHISM_CAP,
};

/// A tuple of universe elements, stored boxed so tables can be probed with a
/// plain slice.
pub type Tuple = Box<[usize]>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("signature mismatch between `{left}` and `{right}`")]
    SignatureMismatch { left: String, right: String },
    #[error("structure of size {size} exceeds the search cap {cap}")]
    SizeCapExceeded { size: usize, cap: usize },
    #[error("element {element} is outside a universe of size {size}")]
    ElementOutOfRange { element: usize, size: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelationSymbol {
    pub name: String,
    pub arity: usize,
}

/// Relation symbols with arities plus unary function symbols. No constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Signature {
    relations: Vec<RelationSymbol>,
    functions: Vec<String>,
}

impl Signature {
    pub fn new<R, F>(relations: R, functions: F) -> Result<Self, StructureError>
    where
        R: IntoIterator<Item = (String, usize)>,
        F: IntoIterator<Item = String>,
    {
        let relations: Vec<RelationSymbol> = relations
            .into_iter()
            .map(|(name, arity)| RelationSymbol { name, arity })
            .collect();
        let functions: Vec<String> = functions.into_iter().collect();
        let mut seen = BTreeSet::new();
        for name in relations.iter().map(|r| &r.name).chain(functions.iter()) {
            if !is_identifier(name) {
                return Err(StructureError::InvalidSignature(format!(
                    "`{name}` is not a valid symbol name"
                )));
            }
            if !seen.insert(name.clone()) {
                return Err(StructureError::InvalidSignature(format!(
                    "symbol `{name}` declared twice"
                )));
            }
        }
        if let Some(r) = relations.iter().find(|r| r.arity == 0) {
            return Err(StructureError::InvalidSignature(format!(
                "relation `{}` has arity 0",
                r.name
            )));
        }
        Ok(Signature {
            relations,
            functions,
        })
    }

    /// Shorthand for literal signatures; panics on invalid input.
    pub fn of(relations: &[(&str, usize)], functions: &[&str]) -> Arc<Self> {
        Arc::new(
            Signature::new(
                relations.iter().map(|&(n, a)| (n.to_string(), a)),
                functions.iter().map(|f| f.to_string()),
            )
            .expect("literal signature must be valid"),
        )
    }

    pub fn empty() -> Arc<Self> {
        Arc::new(Signature::default())
    }

    pub fn relations(&self) -> &[RelationSymbol] {
        &self.relations
    }

    pub fn functions(&self) -> &[String] {
        &self.functions
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }

    pub fn function_index(&self, name: &str) -> Option<usize> {
        self.functions.iter().position(|f| f == name)
    }

    pub fn is_relational(&self) -> bool {
        self.functions.is_empty()
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .relations
            .iter()
            .map(|r| format!("{}/{}", r.name, r.arity))
            .collect();
        parts.extend(self.functions.iter().map(|g| format!("{g}()")));
        write!(f, "{{{}}}", parts.join(", "))
    }
}

fn is_identifier(name: &str) -> bool {
    !name.is_empty()
        && !name.starts_with('#')
        && name
            .chars()
            .all(|c| !c.is_whitespace() && !c.is_control())
}

/// One broken [`FinStructure`] invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    ArityMismatch {
        relation: String,
        tuple: Vec<usize>,
    },
    EntryOutOfRange {
        relation: String,
        tuple: Vec<usize>,
        entry: usize,
    },
    FunctionNotTotal {
        function: String,
        len: usize,
    },
    FunctionValueOutOfRange {
        function: String,
        arg: usize,
        value: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ArityMismatch { relation, tuple } => {
                write!(f, "arity mismatch: {relation}{tuple:?}")
            }
            Violation::EntryOutOfRange {
                relation,
                tuple,
                entry,
            } => write!(f, "entry out of range: {entry} in {relation}{tuple:?}"),
            Violation::FunctionNotTotal { function, len } => {
                write!(f, "function {function} defined on {len} elements")
            }
            Violation::FunctionValueOutOfRange {
                function,
                arg,
                value,
            } => write!(f, "function value out of range: {function}({arg}) = {value}"),
        }
    }
}

/// A finite model: universe `{0..size}`, one tuple table per relation symbol
/// and one total map per function symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinStructure {
    sig: Arc<Signature>,
    size: usize,
    relations: Vec<BTreeSet<Tuple>>,
    functions: Vec<Vec<usize>>,
}

impl PartialOrd for Signature {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Signature {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let key = |s: &Signature| {
            (
                s.relations
                    .iter()
                    .map(|r| (r.name.clone(), r.arity))
                    .collect::<Vec<_>>(),
                s.functions.clone(),
            )
        };
        key(self).cmp(&key(other))
    }
}

impl FinStructure {
    /// Structure with empty relations; every function starts as the identity.
    pub fn new(sig: Arc<Signature>, size: usize) -> Self {
        let relations = vec![BTreeSet::new(); sig.relations.len()];
        let functions = vec![(0..size).collect(); sig.functions.len()];
        FinStructure {
            sig,
            size,
            relations,
            functions,
        }
    }

    pub fn empty(sig: Arc<Signature>) -> Self {
        Self::new(sig, 0)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn same_signature(&self, other: &FinStructure) -> bool {
        Arc::ptr_eq(&self.sig, &other.sig) || self.sig == other.sig
    }

    pub(crate) fn require_same_signature(&self, other: &FinStructure) -> Result<(), StructureError> {
        if self.same_signature(other) {
            Ok(())
        } else {
            Err(StructureError::SignatureMismatch {
                left: self.sig.to_string(),
                right: other.sig.to_string(),
            })
        }
    }

    /// Relation index by name; panics when the symbol is unknown.
    pub fn rel(&self, name: &str) -> usize {
        self.sig
            .relation_index(name)
            .unwrap_or_else(|| panic!("no relation `{name}` in {}", self.sig))
    }

    /// Function index by name; panics when the symbol is unknown.
    pub fn func(&self, name: &str) -> usize {
        self.sig
            .function_index(name)
            .unwrap_or_else(|| panic!("no function `{name}` in {}", self.sig))
    }

    /// Inserts without range checks; see [`FinStructure::validate`].
    pub fn insert(&mut self, rel: usize, tuple: &[usize]) -> bool {
        self.relations[rel].insert(tuple.into())
    }

    pub fn remove(&mut self, rel: usize, tuple: &[usize]) -> bool {
        self.relations[rel].remove(tuple)
    }

    pub fn holds(&self, rel: usize, tuple: &[usize]) -> bool {
        self.relations[rel].contains(tuple)
    }

    pub fn tuples(&self, rel: usize) -> impl Iterator<Item = &[usize]> + '_ {
        self.relations[rel].iter().map(|t| &t[..])
    }

    pub fn tuple_count(&self, rel: usize) -> usize {
        self.relations[rel].len()
    }

    pub fn set_fun(&mut self, fun: usize, x: usize, y: usize) {
        self.functions[fun][x] = y;
    }

    pub fn fun(&self, fun: usize, x: usize) -> usize {
        self.functions[fun][x]
    }

    pub fn fun_table(&self, fun: usize) -> &[usize] {
        &self.functions[fun]
    }

    /// Every broken invariant, in signature order. Empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (r, sym) in self.sig.relations.iter().enumerate() {
            for t in &self.relations[r] {
                if t.len() != sym.arity {
                    out.push(Violation::ArityMismatch {
                        relation: sym.name.clone(),
                        tuple: t.to_vec(),
                    });
                }
                if let Some(&e) = t.iter().find(|&&e| e >= self.size) {
                    out.push(Violation::EntryOutOfRange {
                        relation: sym.name.clone(),
                        tuple: t.to_vec(),
                        entry: e,
                    });
                }
            }
        }
        for (f, name) in self.sig.functions.iter().enumerate() {
            let table = &self.functions[f];
            if table.len() != self.size {
                out.push(Violation::FunctionNotTotal {
                    function: name.clone(),
                    len: table.len(),
                });
            }
            for (x, &y) in table.iter().enumerate() {
                if y >= self.size {
                    out.push(Violation::FunctionValueOutOfRange {
                        function: name.clone(),
                        arg: x,
                        value: y,
                    });
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Closure of `seeds` under every function symbol, sorted ascending.
    pub fn closure(&self, seeds: &[usize]) -> Vec<usize> {
        let mut inside = vec![false; self.size];
        let mut stack: Vec<usize> = Vec::new();
        for &s in seeds {
            if !inside[s] {
                inside[s] = true;
                stack.push(s);
            }
        }
        while let Some(x) = stack.pop() {
            for table in &self.functions {
                let y = table[x];
                if !inside[y] {
                    inside[y] = true;
                    stack.push(y);
                }
            }
        }
        (0..self.size).filter(|&x| inside[x]).collect()
    }

    pub fn is_closed(&self, subset: &[usize]) -> bool {
        let set: BTreeSet<usize> = subset.iter().copied().collect();
        self.functions
            .iter()
            .all(|table| set.iter().all(|&x| set.contains(&table[x])))
    }

    /// Substructure induced on `elems`, renumbered so that `elems[i]` becomes
    /// `i`. The caller guarantees `elems` is duplicate-free and closed.
    pub fn induced(&self, elems: &[usize]) -> FinStructure {
        let mut index = vec![usize::MAX; self.size];
        for (i, &e) in elems.iter().enumerate() {
            index[e] = i;
        }
        let mut sub = FinStructure::new(self.sig.clone(), elems.len());
        for (r, table) in self.relations.iter().enumerate() {
            for t in table {
                if t.iter().all(|&e| index[e] != usize::MAX) {
                    let mapped: Vec<usize> = t.iter().map(|&e| index[e]).collect();
                    sub.relations[r].insert(mapped.into());
                }
            }
        }
        for (f, table) in self.functions.iter().enumerate() {
            sub.functions[f] = elems
                .iter()
                .map(|&e| {
                    let img = index[table[e]];
                    debug_assert!(img != usize::MAX, "induced on a non-closed subset");
                    img
                })
                .collect();
        }
        sub
    }

    /// Copy with element `x` renamed to `perm[x]`.
    pub fn relabel(&self, perm: &[usize]) -> FinStructure {
        assert_eq!(perm.len(), self.size);
        let mut out = FinStructure::new(self.sig.clone(), self.size);
        for (r, table) in self.relations.iter().enumerate() {
            for t in table {
                let mapped: Vec<usize> = t.iter().map(|&e| perm[e]).collect();
                out.relations[r].insert(mapped.into());
            }
        }
        for (f, table) in self.functions.iter().enumerate() {
            for (x, &y) in table.iter().enumerate() {
                out.functions[f][perm[x]] = perm[y];
            }
        }
        out
    }

    /// Copy with `extra` fresh elements appended; functions fix them.
    pub fn grown(&self, extra: usize) -> FinStructure {
        let mut out = self.clone();
        out.size += extra;
        for table in &mut out.functions {
            table.extend(self.size..self.size + extra);
        }
        out
    }

    /// Restriction to the symbols of `target`, matched by name.
    pub fn reduct(&self, target: &Arc<Signature>) -> FinStructure {
        let mut out = FinStructure::new(target.clone(), self.size);
        for (r, sym) in target.relations.iter().enumerate() {
            if let Some(src) = self.sig.relation_index(&sym.name) {
                out.relations[r] = self.relations[src].clone();
            }
        }
        for (f, name) in target.functions.iter().enumerate() {
            if let Some(src) = self.sig.function_index(name) {
                out.functions[f] = self.functions[src].clone();
            }
        }
        out
    }

    /// Iso-invariant fingerprint used to bucket candidates before exact
    /// isomorphism tests.
    pub fn fingerprint(&self) -> Vec<u64> {
        let mut profiles: Vec<Vec<u64>> = (0..self.size).map(|x| self.profile(x)).collect();
        profiles.sort();
        let mut key = vec![self.size as u64];
        key.extend(self.relations.iter().map(|t| t.len() as u64));
        for p in profiles {
            key.extend(p);
        }
        key
    }

    /// Per-element counts that any isomorphism must preserve: occurrences at
    /// each relation position, diagonal occurrences, and function fixed
    /// points, preimage counts and cycle data.
    pub(crate) fn profile(&self, x: usize) -> Vec<u64> {
        let mut p = Vec::new();
        for (r, sym) in self.sig.relations.iter().enumerate() {
            let mut counts = vec![0u64; sym.arity + 1];
            for t in &self.relations[r] {
                for (i, &e) in t.iter().enumerate() {
                    if e == x {
                        counts[i] += 1;
                    }
                }
                if t.iter().all(|&e| e == x) {
                    counts[sym.arity] += 1;
                }
            }
            p.extend(counts);
        }
        for table in &self.functions {
            let pre = table.iter().filter(|&&y| y == x).count() as u64;
            let (tail, cycle) = orbit_shape(table, x);
            p.extend([pre, tail as u64, cycle as u64]);
        }
        p
    }
}

/// Tail length and cycle length of the forward orbit of `x`.
fn orbit_shape(table: &[usize], x: usize) -> (usize, usize) {
    let mut seen = vec![usize::MAX; table.len()];
    let mut cur = x;
    let mut step = 0;
    while seen[cur] == usize::MAX {
        seen[cur] = step;
        cur = table[cur];
        step += 1;
    }
    (seen[cur], step - seen[cur])
}

/// The substructure generated by `subset` together with its inclusion.
pub fn generated_substructure(
    m: &FinStructure,
    subset: &[usize],
) -> Result<(FinStructure, Embedding), StructureError> {
    if let Some(&e) = subset.iter().find(|&&e| e >= m.size()) {
        return Err(StructureError::ElementOutOfRange {
            element: e,
            size: m.size(),
        });
    }
    let elems = m.closure(subset);
    let sub = m.induced(&elems);
    Ok((sub, Embedding::new(elems)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wheel(n: usize) -> FinStructure {
        let sig = Signature::of(&[("lt", 2), ("adj", 2)], &["s"]);
        let mut m = FinStructure::new(sig, n);
        for x in 0..n {
            m.set_fun(0, x, (x + 1) % n);
        }
        m
    }

    #[test]
    fn empty_bipartite_is_valid() {
        let sig = Signature::of(&[("L", 1), ("R", 1), ("adj", 2)], &[]);
        assert!(FinStructure::empty(sig).validate().is_empty());
    }

    #[test]
    fn out_of_range_entry_reported() {
        let sig = Signature::of(&[("adj", 2)], &[]);
        let mut m = FinStructure::new(sig, 2);
        m.insert(0, &[0, 3]);
        let v = m.validate();
        assert_eq!(v.len(), 1);
        assert!(v[0].to_string().contains("entry out of range"));
    }

    #[test]
    fn wheel_is_valid() {
        assert!(wheel(4).is_valid());
    }

    #[test]
    fn signature_rejects_duplicates_and_zero_arity() {
        assert!(Signature::new([("a".to_string(), 1)], ["a".to_string()]).is_err());
        assert!(Signature::new([("a".to_string(), 0)], Vec::<String>::new()).is_err());
    }

    #[test]
    fn generated_substructure_of_wheel_is_whole_wheel() {
        let (sub, emb) = generated_substructure(&wheel(4), &[1]).unwrap();
        assert_eq!(sub.size(), 4);
        assert_eq!(emb.map(), &[0, 1, 2, 3]);
    }

    #[test]
    fn generated_substructure_in_disjoint_wheels() {
        let sig = Signature::of(&[("lt", 2), ("adj", 2)], &["s"]);
        let mut m = FinStructure::new(sig, 5);
        for (x, y) in [(0, 1), (1, 0), (2, 3), (3, 4), (4, 2)] {
            m.set_fun(0, x, y);
        }
        let (sub, emb) = generated_substructure(&m, &[1]).unwrap();
        assert_eq!(sub.size(), 2);
        assert_eq!(emb.map(), &[0, 1]);
        assert!(emb.check(&sub, &m).is_ok());
    }

    #[test]
    fn relational_substructure_keeps_subset() {
        let sig = Signature::of(&[("lt", 2)], &[]);
        let mut m = FinStructure::new(sig, 4);
        m.insert(0, &[3, 1]);
        m.insert(0, &[1, 0]);
        let (sub, emb) = generated_substructure(&m, &[3, 1]).unwrap();
        assert_eq!(sub.size(), 2);
        // order inherited from M: 1 -> 0, 3 -> 1
        assert_eq!(emb.map(), &[1, 3]);
        assert!(sub.holds(0, &[1, 0]));
    }
}
