use std::collections::BTreeMap;

use super::{ClassError, FraisseClass};
use crate::structures::{isomorphic, FinStructure};

pub const DEFAULT_ENUMERATION_CAP: usize = 12;

/// Members of size exactly `n`, one per isomorphism type, in the order the
/// class generates candidates.
pub fn enumerate_members(class: &dyn FraisseClass, n: usize) -> Result<Vec<FinStructure>, ClassError> {
    enumerate_members_with_cap(class, n, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_members_with_cap(
    class: &dyn FraisseClass,
    n: usize,
    cap: usize,
) -> Result<Vec<FinStructure>, ClassError> {
    if n > cap {
        return Err(ClassError::CapExceeded { size: n, cap });
    }
    let candidates = class
        .type_candidates(n)
        .into_iter()
        .filter(|m| class.is_member(m));
    if class.candidates_are_types() {
        return Ok(candidates.collect());
    }
    Ok(dedupe_up_to_iso(candidates))
}

/// Keeps the first structure of each isomorphism class. Candidates are
/// bucketed by fingerprint; exact tests run only within a bucket.
pub fn dedupe_up_to_iso(candidates: impl IntoIterator<Item = FinStructure>) -> Vec<FinStructure> {
    let mut reps: Vec<FinStructure> = Vec::new();
    let mut buckets: BTreeMap<Vec<u64>, Vec<usize>> = BTreeMap::new();
    for m in candidates {
        let bucket = buckets.entry(m.fingerprint()).or_default();
        let seen = bucket.iter().any(|&i| {
            isomorphic(&reps[i], &m)
                .map(|iso| iso.is_some())
                .unwrap_or(false)
        });
        if !seen {
            bucket.push(reps.len());
            reps.push(m);
        }
    }
    reps
}

/// Isomorphism types of a class for every size up to a bound.
#[derive(Debug, Clone)]
pub struct MemberTable {
    by_size: Vec<Vec<FinStructure>>,
}

impl MemberTable {
    pub fn new(class: &dyn FraisseClass, max_n: usize) -> Result<Self, ClassError> {
        let by_size = (0..=max_n)
            .map(|n| enumerate_members_with_cap(class, n, max_n.max(DEFAULT_ENUMERATION_CAP)))
            .collect::<Result<_, _>>()?;
        Ok(MemberTable { by_size })
    }

    pub fn max_size(&self) -> usize {
        self.by_size.len() - 1
    }

    pub fn of_size(&self, n: usize) -> &[FinStructure] {
        self.by_size.get(n).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn up_to(&self, n: usize) -> impl Iterator<Item = &FinStructure> + '_ {
        self.by_size
            .iter()
            .take(n + 1)
            .flat_map(|v| v.iter())
    }

    pub fn counts(&self) -> Vec<usize> {
        self.by_size.iter().map(Vec::len).collect()
    }
}
