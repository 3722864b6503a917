use super::{GroupError, GroupTable};
use crate::structures::FinStructure;

/// A right action of an abstract finite group on `{0..n-1}`:
/// `act(x, g)` is `x^g`, with `(x^g)^h = x^(gh)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GAction {
    group: GroupTable,
    images: Vec<Vec<usize>>,
}

/// A point fixed by a non-identity element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedPoint {
    pub point: usize,
    pub element: usize,
}

/// A tuple whose image under a group element breaks the structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionViolation {
    pub element: usize,
    pub symbol: String,
    pub tuple: Vec<usize>,
}

impl GAction {
    /// `images[g][x]` is `x^g`. Checks identity, bijectivity and
    /// compatibility with the group law.
    pub fn new(group: GroupTable, images: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        if images.len() != group.order() {
            return Err(GroupError::InvalidAction(
                "one image row per group element required".into(),
            ));
        }
        let n = images[0].len();
        for (g, row) in images.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::InvalidAction(format!("row {g} has wrong length")));
            }
            let mut seen = vec![false; n];
            for &y in row {
                if y >= n || std::mem::replace(&mut seen[y], true) {
                    return Err(GroupError::InvalidAction(format!(
                        "element {g} does not act bijectively"
                    )));
                }
            }
        }
        if images[0].iter().enumerate().any(|(x, &y)| x != y) {
            return Err(GroupError::InvalidAction("identity acts nontrivially".into()));
        }
        for g in 0..group.order() {
            for h in 0..group.order() {
                let gh = group.mul(g, h);
                if let Some(x) = (0..n).find(|&x| images[h][images[g][x]] != images[gh][x]) {
                    return Err(GroupError::InvalidAction(format!(
                        "(x^{g})^{h} != x^({g}{h}) at x = {x}"
                    )));
                }
            }
        }
        Ok(GAction { group, images })
    }

    /// The group acting on itself by right multiplication.
    pub fn cayley(group: &GroupTable) -> Self {
        let images = (0..group.order())
            .map(|g| (0..group.order()).map(|x| group.mul(x, g)).collect())
            .collect();
        GAction {
            group: group.clone(),
            images,
        }
    }

    pub fn trivial(group: &GroupTable, n: usize) -> Self {
        GAction {
            group: group.clone(),
            images: vec![(0..n).collect(); group.order()],
        }
    }

    pub fn group(&self) -> &GroupTable {
        &self.group
    }

    pub fn carrier_size(&self) -> usize {
        self.images[0].len()
    }

    pub fn act(&self, x: usize, g: usize) -> usize {
        self.images[g][x]
    }

    pub fn images(&self, g: usize) -> &[usize] {
        &self.images[g]
    }

    /// The orbit of `x`, indexed by group element.
    pub fn orbit(&self, x: usize) -> Vec<usize> {
        (0..self.group.order()).map(|g| self.act(x, g)).collect()
    }

    pub fn is_transitive(&self) -> bool {
        let n = self.carrier_size();
        if n == 0 {
            return true;
        }
        let mut orbit = self.orbit(0);
        orbit.sort_unstable();
        orbit.dedup();
        orbit.len() == n
    }

    /// Restriction to an invariant subset, renumbered by position in `subset`.
    pub fn restrict(&self, subset: &[usize]) -> Result<GAction, GroupError> {
        let mut index = vec![usize::MAX; self.carrier_size()];
        for (i, &x) in subset.iter().enumerate() {
            index[x] = i;
        }
        let mut images = Vec::with_capacity(self.group.order());
        for g in 0..self.group.order() {
            let row = subset
                .iter()
                .map(|&x| {
                    let y = index[self.act(x, g)];
                    (y != usize::MAX)
                        .then_some(y)
                        .ok_or_else(|| GroupError::InvalidAction("subset is not invariant".into()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            images.push(row);
        }
        Ok(GAction {
            group: self.group.clone(),
            images,
        })
    }
}

/// `Ok` when only the identity has fixed points; otherwise the first
/// `(point, element)` witness in lexicographic order.
pub fn is_free_action(a: &GAction) -> Result<(), FixedPoint> {
    for x in 0..a.carrier_size() {
        for g in 1..a.group().order() {
            if a.act(x, g) == x {
                return Err(FixedPoint { point: x, element: g });
            }
        }
    }
    Ok(())
}

/// Whether every group element induces an automorphism of `m`.
pub fn acts_by_automorphisms(
    a: &GAction,
    m: &FinStructure,
) -> Result<Result<(), ActionViolation>, GroupError> {
    if a.carrier_size() != m.size() {
        return Err(GroupError::SizeMismatch {
            carrier: a.carrier_size(),
            structure: m.size(),
        });
    }
    let sig = m.signature();
    for g in 0..a.group().order() {
        let img = a.images(g);
        for (r, sym) in sig.relations().iter().enumerate() {
            for t in m.tuples(r) {
                let mapped: Vec<usize> = t.iter().map(|&x| img[x]).collect();
                // a bijection preserving a finite table also reflects it
                if !m.holds(r, &mapped) {
                    return Ok(Err(ActionViolation {
                        element: g,
                        symbol: sym.name.clone(),
                        tuple: t.to_vec(),
                    }));
                }
            }
        }
        for (f, name) in sig.functions().iter().enumerate() {
            if let Some(x) = (0..m.size()).find(|&x| img[m.fun(f, x)] != m.fun(f, img[x])) {
                return Ok(Err(ActionViolation {
                    element: g,
                    symbol: name.clone(),
                    tuple: vec![x],
                }));
            }
        }
    }
    Ok(Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::Signature;

    #[test]
    fn cayley_actions_are_free_and_transitive() {
        for g in [
            GroupTable::cyclic(4).unwrap(),
            GroupTable::symmetric(3).unwrap(),
            GroupTable::trivial(),
        ] {
            let a = GAction::cayley(&g);
            assert!(GAction::new(g.clone(), a.images.clone()).is_ok());
            assert!(is_free_action(&a).is_ok());
            assert!(a.is_transitive());
        }
    }

    #[test]
    fn trivial_action_is_not_free() {
        let a = GAction::trivial(&GroupTable::cyclic(2).unwrap(), 1);
        assert_eq!(is_free_action(&a), Err(FixedPoint { point: 0, element: 1 }));
    }

    #[test]
    fn swapping_a_chain_is_not_by_automorphisms() {
        let mut chain = FinStructure::new(Signature::of(&[("lt", 2)], &[]), 2);
        chain.insert(0, &[0, 1]);
        let z2 = GroupTable::cyclic(2).unwrap();
        let swap = GAction::new(z2.clone(), vec![vec![0, 1], vec![1, 0]]).unwrap();
        let v = acts_by_automorphisms(&swap, &chain).unwrap().unwrap_err();
        assert_eq!(v.element, 1);
        assert!(acts_by_automorphisms(&GAction::trivial(&z2, 2), &chain)
            .unwrap()
            .is_ok());
        let one = GAction::trivial(&GroupTable::trivial(), 3);
        assert!(acts_by_automorphisms(&one, &chain).is_err());
    }

    #[test]
    fn rotations_act_on_wheels() {
        let n = 5;
        let mut wheel = FinStructure::new(Signature::of(&[("lt", 2), ("adj", 2)], &["s"]), n);
        for x in 0..n {
            wheel.set_fun(0, x, (x + 1) % n);
        }
        let zn = GroupTable::cyclic(n).unwrap();
        let rot = GAction::new(
            zn.clone(),
            (0..n).map(|g| (0..n).map(|x| (x + g) % n).collect()).collect(),
        )
        .unwrap();
        assert!(acts_by_automorphisms(&rot, &wheel).unwrap().is_ok());
    }

    #[test]
    fn rejects_incompatible_rows() {
        let z3 = GroupTable::cyclic(3).unwrap();
        // generator rotates, its square should too
        let rows = vec![vec![0, 1, 2], vec![1, 2, 0], vec![1, 2, 0]];
        assert!(GAction::new(z3, rows).is_err());
    }
}
