//! Finite-support permutations of the integers and the sign-flip embedding
//! of (finite subsets of `{1,2,..}`, △) into them.

use std::collections::{BTreeMap, BTreeSet};

use super::GroupError;

/// A bijection of ℤ moving only finitely many points, stored as the map on
/// its support.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPermutation {
    moved: BTreeMap<i64, i64>,
}

impl IntPermutation {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Builds from explicit pairs; fixed pairs are dropped. Fails unless the
    /// pairs form a bijection of their support.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (i64, i64)>) -> Result<Self, GroupError> {
        let moved: BTreeMap<i64, i64> = pairs.into_iter().filter(|(x, y)| x != y).collect();
        let domain: BTreeSet<i64> = moved.keys().copied().collect();
        let range: BTreeSet<i64> = moved.values().copied().collect();
        if domain != range || range.len() != moved.len() {
            return Err(GroupError::NotAPermutation(Vec::new()));
        }
        Ok(IntPermutation { moved })
    }

    pub fn apply(&self, x: i64) -> i64 {
        self.moved.get(&x).copied().unwrap_or(x)
    }

    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        self.moved.keys().copied()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &IntPermutation) -> IntPermutation {
        let points: BTreeSet<i64> = self.support().chain(other.support()).collect();
        let moved = points
            .into_iter()
            .map(|x| (x, self.apply(other.apply(x))))
            .filter(|(x, y)| x != y)
            .collect();
        IntPermutation { moved }
    }

    pub fn inverse(&self) -> IntPermutation {
        IntPermutation {
            moved: self.moved.iter().map(|(&x, &y)| (y, x)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.moved.is_empty()
    }

    pub fn order(&self) -> usize {
        let mut p = self.clone();
        let mut k = 1;
        while !p.is_identity() {
            p = p.compose(self);
            k += 1;
        }
        k
    }
}

pub fn symdiff_compose(a: &BTreeSet<i64>, b: &BTreeSet<i64>) -> BTreeSet<i64> {
    a.symmetric_difference(b).copied().collect()
}

/// `x ↦ -x` on `A`, identity elsewhere. `A` must avoid 0 and negatives.
pub fn h_embed(a: &BTreeSet<i64>) -> Result<IntPermutation, GroupError> {
    if let Some(&bad) = a.iter().find(|&&x| x <= 0) {
        return Err(GroupError::NonPositiveElement(bad));
    }
    IntPermutation::from_pairs(a.iter().flat_map(|&x| [(x, -x), (-x, x)]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[i64]) -> BTreeSet<i64> {
        xs.iter().copied().collect()
    }

    #[test]
    fn symdiff_examples() {
        let a = set(&[1, 2]);
        assert!(symdiff_compose(&a, &a).is_empty());
        assert_eq!(symdiff_compose(&a, &set(&[2, 3])), set(&[1, 3]));
        assert_eq!(symdiff_compose(&set(&[]), &set(&[4])), set(&[4]));
    }

    #[test]
    fn h_embed_examples() {
        assert!(h_embed(&set(&[])).unwrap().is_identity());
        let h1 = h_embed(&set(&[1])).unwrap();
        assert_eq!(h1.apply(1), -1);
        assert_eq!(h1.apply(-1), 1);
        assert_eq!(h1.order(), 2);
        let (a, b) = (set(&[1, 2]), set(&[2, 3]));
        let lhs = h_embed(&a).unwrap().compose(&h_embed(&b).unwrap());
        assert_eq!(lhs, h_embed(&symdiff_compose(&a, &b)).unwrap());
        assert!(matches!(
            h_embed(&set(&[0, 1])),
            Err(GroupError::NonPositiveElement(0))
        ));
    }

    #[test]
    fn from_pairs_requires_bijection() {
        assert!(IntPermutation::from_pairs([(1, 2)]).is_err());
        let c = IntPermutation::from_pairs([(1, 2), (2, 3), (3, 1)]).unwrap();
        assert_eq!(c.order(), 3);
        assert!(c.compose(&c.inverse()).is_identity());
    }
}
