use std::fmt;

use super::GroupError;

/// A permutation of `{0..n-1}` stored by its images.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn new(images: Vec<usize>) -> Result<Self, GroupError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &y in &images {
            if y >= n || std::mem::replace(&mut seen[y], true) {
                return Err(GroupError::NotAPermutation(images));
            }
        }
        Ok(Perm(images))
    }

    pub(crate) fn from_images_unchecked(images: Vec<usize>) -> Self {
        Perm(images)
    }

    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&y| self.0[y]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (x, &y) in self.0.iter().enumerate() {
            inv[y] = x;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(x, &y)| x == y)
    }

    /// Least common multiple of the cycle lengths.
    pub fn order(&self) -> usize {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut order = 1;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.0[x];
                len += 1;
            }
            order = lcm(order, len);
        }
        order
    }

    pub fn fixes(&self, x: usize) -> bool {
        self.0[x] == x
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|y| y.to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// A finite permutation group held as its full, sorted element list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermGroup {
    degree: usize,
    elements: Vec<Perm>,
}

impl PermGroup {
    /// Validates that the list is a group: identity present, closed under
    /// composition and inverse.
    pub fn from_elements(degree: usize, elements: Vec<Perm>) -> Result<Self, GroupError> {
        if elements.iter().any(|p| p.degree() != degree) {
            return Err(GroupError::DegreeMismatch);
        }
        let g = Self::from_elements_unchecked(degree, elements);
        g.check_closed()?;
        Ok(g)
    }

    pub(crate) fn from_elements_unchecked(degree: usize, mut elements: Vec<Perm>) -> Self {
        elements.sort();
        elements.dedup();
        PermGroup { degree, elements }
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup {
            degree,
            elements: vec![Perm::identity(degree)],
        }
    }

    /// All `n!` permutations.
    pub fn symmetric(n: usize) -> Self {
        let elements = all_permutations(n).into_iter().map(Perm).collect();
        PermGroup {
            degree: n,
            elements,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    pub fn check_closed(&self) -> Result<(), GroupError> {
        if !self.contains(&Perm::identity(self.degree)) {
            return Err(GroupError::MissingIdentity);
        }
        for a in &self.elements {
            if !self.contains(&a.inverse()) {
                return Err(GroupError::NotClosed(format!("inverse of {a}")));
            }
            for b in &self.elements {
                let ab = a.compose(b);
                if !self.contains(&ab) {
                    return Err(GroupError::NotClosed(format!("{a} ∘ {b}")));
                }
            }
        }
        Ok(())
    }

    pub fn is_abelian(&self) -> bool {
        self.elements.iter().enumerate().all(|(i, a)| {
            self.elements[i + 1..]
                .iter()
                .all(|b| a.compose(b) == b.compose(a))
        })
    }

    /// The group conjugated by `sigma`: every `p` becomes `σ p σ⁻¹`.
    pub fn conjugate(&self, sigma: &Perm) -> PermGroup {
        let inv = sigma.inverse();
        Self::from_elements_unchecked(
            self.degree,
            self.elements
                .iter()
                .map(|p| sigma.compose(&p.compose(&inv)))
                .collect(),
        )
    }
}

/// Every permutation of `{0..n-1}` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perm_basics() {
        let p = Perm::new(vec![1, 2, 0]).unwrap();
        assert_eq!(p.order(), 3);
        assert_eq!(p.compose(&p.inverse()), Perm::identity(3));
        assert!(Perm::new(vec![0, 0]).is_err());
        // apply right factor first
        let swap01 = Perm::new(vec![1, 0, 2]).unwrap();
        assert_eq!(p.compose(&swap01).apply(0), p.apply(1));
    }

    #[test]
    fn permutations_in_lex_order() {
        let all = all_permutations(3);
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1, 2]);
        assert_eq!(all[5], vec![2, 1, 0]);
        assert_eq!(all_permutations(0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn symmetric_group_is_closed() {
        let s3 = PermGroup::symmetric(3);
        assert!(s3.check_closed().is_ok());
        assert!(!s3.is_abelian());
    }

    #[test]
    fn rejects_non_closed_lists() {
        let p = Perm::new(vec![1, 2, 0]).unwrap();
        assert!(PermGroup::from_elements(3, vec![Perm::identity(3), p]).is_err());
    }
}
