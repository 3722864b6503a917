use std::fmt;

use rayon::prelude::*;

use super::{Amalgam, FraisseClass, MemberTable};
use crate::structures::{all_embeddings, embeddings_where, extend_embedding, Embedding, FinStructure};

/// Largest amalgam the oracle layer searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OracleBound {
    /// `|X| + |Y| - |Z|`, enough for classes with disjoint amalgamation.
    #[default]
    Disjoint,
    /// `|X| + |Y|`.
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AmalgamationOptions {
    pub max_n: usize,
    pub oracle: OracleBound,
}

impl AmalgamationOptions {
    pub fn new(max_n: usize) -> Self {
        AmalgamationOptions {
            max_n,
            oracle: OracleBound::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassFailure {
    pub description: String,
    pub witness: String,
}

/// Outcome of one exhaustive law sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassReport {
    pub class: String,
    pub check: String,
    pub max_n: usize,
    /// Number of instances examined (subsets, pairs or spans).
    pub tested: usize,
    pub notes: Vec<String>,
    pub failures: Vec<ClassFailure>,
}

impl ClassReport {
    fn new(class: &dyn FraisseClass, check: &str, max_n: usize) -> Self {
        ClassReport {
            class: class.name(),
            check: check.to_string(),
            max_n,
            tested: 0,
            notes: Vec::new(),
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for ClassReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "pass" } else { "FAIL" };
        write!(
            f,
            "{} {} (n <= {}): {status}, {} tested, {} failures",
            self.check,
            self.class,
            self.max_n,
            self.tested,
            self.failures.len()
        )?;
        for note in &self.notes {
            write!(f, "\n  note: {note}")?;
        }
        for fail in &self.failures {
            write!(f, "\n  {}: {}", fail.description, fail.witness)?;
        }
        Ok(())
    }
}

/// One-line rendering of a structure for witnesses.
pub fn brief(m: &FinStructure) -> String {
    crate::structures::write_structure(m)
        .lines()
        .filter(|l| !l.starts_with("sig"))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Every function-closed subset of every member up to `max_n` must induce a
/// member.
pub fn check_hereditary(class: &dyn FraisseClass, max_n: usize) -> Result<ClassReport, super::ClassError> {
    let table = MemberTable::new(class, max_n)?;
    let mut report = ClassReport::new(class, "hereditary", max_n);
    for m in table.up_to(max_n) {
        let n = m.size();
        for mask in 0u32..(1 << n) {
            let subset: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            if !m.is_closed(&subset) {
                continue;
            }
            report.tested += 1;
            let sub = m.induced(&subset);
            if let Err(reason) = class.membership(&sub) {
                report.failures.push(ClassFailure {
                    description: format!("substructure on {subset:?} not a member ({reason})"),
                    witness: brief(m),
                });
            }
        }
    }
    Ok(report)
}

/// Joint embedding, through amalgamation over the empty structure when that
/// is a member and through direct search otherwise.
pub fn check_jep(class: &dyn FraisseClass, max_n: usize) -> Result<ClassReport, super::ClassError> {
    let table = MemberTable::new(class, max_n)?;
    let mut report = ClassReport::new(class, "jep", max_n);
    let empty = class.empty();
    let via_empty = class.is_member(&empty);
    let oracle = if via_empty {
        None
    } else {
        report
            .notes
            .push("empty structure is not a member; JEP checked by direct search".into());
        Some(MemberTable::new(class, 2 * max_n)?)
    };
    let members: Vec<&FinStructure> = table.up_to(max_n).collect();
    let pairs: Vec<(usize, usize)> = (0..members.len())
        .flat_map(|i| (0..members.len()).map(move |j| (i, j)))
        .collect();
    let failures: Vec<Option<ClassFailure>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (x, y) = (members[i], members[j]);
            let outcome = match &oracle {
                None => class
                    .amalgamate(&empty, x, y, &Embedding::empty(), &Embedding::empty())
                    .map_err(|e| e.to_string())
                    .and_then(|am| {
                        validate_amalgam(class, &empty, x, y, &Embedding::empty(), &Embedding::empty(), &am)
                    }),
                Some(table) => {
                    let found = (x.size().max(y.size())..=x.size() + y.size()).any(|n| {
                        table.of_size(n).iter().any(|w| {
                            !embeddings_where(x, w, false, &[], &|_, _| true, Some(1)).is_empty()
                                && !embeddings_where(y, w, false, &[], &|_, _| true, Some(1)).is_empty()
                        })
                    });
                    if found {
                        Ok(())
                    } else {
                        Err("no joint extension found".to_string())
                    }
                }
            };
            outcome.err().map(|reason| ClassFailure {
                description: reason,
                witness: format!("X = {} | Y = {}", brief(x), brief(y)),
            })
        })
        .collect();
    report.tested = pairs.len();
    report.failures = failures.into_iter().flatten().collect();
    Ok(report)
}

/// Checks that `am` is an amalgam of the span inside the class, disjoint
/// when the class claims so.
pub fn validate_amalgam(
    class: &dyn FraisseClass,
    z: &FinStructure,
    x: &FinStructure,
    y: &FinStructure,
    f: &Embedding,
    g: &Embedding,
    am: &Amalgam,
) -> Result<(), String> {
    let w = &am.structure;
    class.membership(w).map_err(|r| format!("amalgam not a member: {r}"))?;
    am.left
        .check(x, w)
        .map_err(|v| format!("left map is not an embedding: {v}"))?;
    am.right
        .check(y, w)
        .map_err(|v| format!("right map is not an embedding: {v}"))?;
    if am.left.after(f) != am.right.after(g) {
        return Err("square does not commute".into());
    }
    if class.claims_disjoint() {
        let right: std::collections::BTreeSet<usize> = am.right.map().iter().copied().collect();
        let shared = am.left.map().iter().filter(|e| right.contains(e)).count();
        if shared != z.size() {
            return Err(format!(
                "images share {shared} points, common part has {}",
                z.size()
            ));
        }
    }
    Ok(())
}

/// Embedding-invariant key of an element: its unary relations and, per
/// function symbol, the tail and cycle length of its forward orbit. An
/// embedding preserves keys exactly because its image is closed.
fn element_key(m: &FinStructure, x: usize) -> Vec<usize> {
    let sig = m.signature();
    let mut key: Vec<usize> = sig
        .relations()
        .iter()
        .enumerate()
        .filter(|(_, r)| r.arity == 1)
        .map(|(i, _)| usize::from(m.holds(i, &[x])))
        .collect();
    for f in 0..sig.functions().len() {
        let mut seen = vec![usize::MAX; m.size()];
        let (mut cur, mut step) = (x, 0);
        while seen[cur] == usize::MAX {
            seen[cur] = step;
            cur = m.fun(f, cur);
            step += 1;
        }
        key.push(seen[cur]);
        key.push(step - seen[cur]);
    }
    key
}

fn key_multiset(m: &FinStructure) -> Vec<Vec<usize>> {
    let mut keys: Vec<Vec<usize>> = (0..m.size()).map(|x| element_key(m, x)).collect();
    keys.sort();
    keys
}

/// Sorted multiset inclusion.
fn sub_multiset(small: &[Vec<usize>], big: &[Vec<usize>]) -> bool {
    let mut j = 0;
    for k in small {
        while j < big.len() && big[j] < *k {
            j += 1;
        }
        if j == big.len() || big[j] != *k {
            return false;
        }
        j += 1;
    }
    true
}

/// Oracle candidates of one size with their key multisets.
struct OracleTable {
    by_size: Vec<Vec<(FinStructure, Vec<Vec<usize>>)>>,
}

impl OracleTable {
    fn new(table: MemberTable) -> Self {
        let by_size = (0..=table.max_size())
            .map(|n| {
                table
                    .of_size(n)
                    .iter()
                    .map(|w| (w.clone(), key_multiset(w)))
                    .collect()
            })
            .collect();
        OracleTable { by_size }
    }

    /// Does some member `W` with `|W|` in `sizes` admit `f'`, `g'` closing
    /// the square? Exhaustive over the enumerated types.
    fn amalgam_exists(
        &self,
        sizes: std::ops::RangeInclusive<usize>,
        x: &FinStructure,
        y: &FinStructure,
        f: &Embedding,
        g: &Embedding,
    ) -> bool {
        let (xk, yk) = (key_multiset(x), key_multiset(y));
        sizes.rev().any(|n| {
            self.by_size.get(n).into_iter().flatten().any(|(w, wk)| {
                sub_multiset(&xk, wk)
                    && sub_multiset(&yk, wk)
                    && embeddings_where(x, w, false, &[], &|_, _| true, None)
                        .into_iter()
                        .any(|fp| {
                            let partial: Vec<(usize, usize)> = g
                                .map()
                                .iter()
                                .enumerate()
                                .map(|(zi, &gz)| (gz, fp[f.apply(zi)]))
                                .collect();
                            extend_embedding(y, w, &partial).is_some()
                        })
            })
        })
    }
}

/// Two-layer amalgamation sweep over every span `X <- Z -> Y` of members
/// with at most `max_n` elements: the class operator must produce a valid
/// amalgam exactly when the exhaustive oracle finds one.
pub fn check_amalgamation(
    class: &dyn FraisseClass,
    options: &AmalgamationOptions,
) -> Result<ClassReport, super::ClassError> {
    let max_n = options.max_n;
    let table = MemberTable::new(class, max_n)?;
    let oracle_table = OracleTable::new(MemberTable::new(class, 2 * max_n)?);
    let mut report = ClassReport::new(class, "amalgamation", max_n);
    let members: Vec<&FinStructure> = table.up_to(max_n).collect();

    let mut spans: Vec<(usize, usize, usize, Embedding, Embedding)> = Vec::new();
    for (zi, z) in members.iter().enumerate() {
        for (xi, x) in members.iter().enumerate() {
            if x.size() < z.size() {
                continue;
            }
            let fs = all_embeddings(z, x)?;
            if fs.is_empty() {
                continue;
            }
            for (yi, y) in members.iter().enumerate() {
                if y.size() < z.size() {
                    continue;
                }
                let gs = all_embeddings(z, y)?;
                for f in &fs {
                    for g in &gs {
                        spans.push((zi, xi, yi, f.clone(), g.clone()));
                    }
                }
            }
        }
    }

    let failures: Vec<Option<ClassFailure>> = spans
        .par_iter()
        .map(|(zi, xi, yi, f, g)| {
            let (z, x, y) = (members[*zi], members[*xi], members[*yi]);
            let operator = class
                .amalgamate(z, x, y, f, g)
                .map_err(|e| e.to_string())
                .and_then(|am| validate_amalgam(class, z, x, y, f, g, &am));
            let upper = match options.oracle {
                OracleBound::Disjoint => x.size() + y.size() - z.size(),
                OracleBound::Sum => x.size() + y.size(),
            };
            let lower = x.size().max(y.size());
            let oracle = oracle_table.amalgam_exists(lower..=upper, x, y, f, g);
            let description = match (&operator, oracle) {
                (Ok(()), true) => return None,
                (Err(reason), false) => format!("no amalgam exists and operator failed: {reason}"),
                (Err(reason), true) => format!("operator failed but an amalgam exists: {reason}"),
                (Ok(()), false) => "operator succeeded but oracle found no amalgam".to_string(),
            };
            Some(ClassFailure {
                description,
                witness: format!(
                    "Z = {} | X = {} | Y = {} | f = {f} | g = {g}",
                    brief(z),
                    brief(x),
                    brief(y)
                ),
            })
        })
        .collect();
    report.tested = spans.len();
    report.failures = failures.into_iter().flatten().collect();
    if class.claims_disjoint() {
        report.notes.push("disjointness asserted".into());
    }
    Ok(report)
}
