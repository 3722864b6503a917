//! Mixed sums `E ⋈ F`: an `E`-structure on `L`, an `F`-structure on `R` and
//! an arbitrary cross graph `adj`.

use std::sync::Arc;

use super::basic::check_bipartite;
use crate::fraisse::{enumerate_members, require_span, Amalgam, ClassError, ClassRef, FraisseClass};
use crate::structures::{Embedding, FinStructure, Signature};

const L: usize = 0;
const R: usize = 1;
const ADJ: usize = 2;

#[derive(Debug)]
pub struct MixedSum {
    left: ClassRef,
    right: ClassRef,
    sig: Arc<Signature>,
    /// First relation index of the `l_` and `r_` blocks.
    l_offset: usize,
    r_offset: usize,
}

/// The mixed sum of two relational classes with disjoint amalgamation.
pub fn mixed_sum(left: ClassRef, right: ClassRef) -> Result<MixedSum, ClassError> {
    for base in [&left, &right] {
        let reason = if !base.signature().is_relational() {
            "has function symbols"
        } else if !base.claims_disjoint() {
            "lacks disjoint amalgamation"
        } else {
            continue;
        };
        return Err(ClassError::Unsupported {
            class: format!("mix:{}:{}", left.name(), right.name()),
            reason: format!("base {} {reason}", base.name()),
        });
    }
    let mut relations = vec![("L".to_string(), 1), ("R".to_string(), 1), ("adj".to_string(), 2)];
    let l_offset = relations.len();
    relations.extend(
        left.signature()
            .relations()
            .iter()
            .map(|r| (format!("l_{}", r.name), r.arity)),
    );
    let r_offset = relations.len();
    relations.extend(
        right
            .signature()
            .relations()
            .iter()
            .map(|r| (format!("r_{}", r.name), r.arity)),
    );
    let sig = Arc::new(Signature::new(relations, Vec::<String>::new())?);
    Ok(MixedSum {
        left,
        right,
        sig,
        l_offset,
        r_offset,
    })
}

/// One side of a mixed structure: its elements in index order and the base
/// structure on them.
#[derive(Debug, Clone)]
pub struct Side {
    pub elements: Vec<usize>,
    pub structure: FinStructure,
}

impl MixedSum {
    pub fn left_class(&self) -> &ClassRef {
        &self.left
    }

    pub fn right_class(&self) -> &ClassRef {
        &self.right
    }

    fn side(&self, m: &FinStructure, which: usize) -> Side {
        let (class, offset) = if which == L {
            (&self.left, self.l_offset)
        } else {
            (&self.right, self.r_offset)
        };
        let elements: Vec<usize> = (0..m.size()).filter(|&x| m.holds(which, &[x])).collect();
        let mut pos = vec![usize::MAX; m.size()];
        for (i, &e) in elements.iter().enumerate() {
            pos[e] = i;
        }
        let mut s = FinStructure::new(class.signature().clone(), elements.len());
        for r in 0..class.signature().relations().len() {
            for t in m.tuples(offset + r) {
                if t.iter().all(|&e| pos[e] != usize::MAX) {
                    let mapped: Vec<usize> = t.iter().map(|&e| pos[e]).collect();
                    s.insert(r, &mapped);
                }
            }
        }
        Side {
            elements,
            structure: s,
        }
    }

    pub fn left_side(&self, m: &FinStructure) -> Side {
        self.side(m, L)
    }

    pub fn right_side(&self, m: &FinStructure) -> Side {
        self.side(m, R)
    }

    /// Builds `l ⊔ r` with `L` first and the cross edges `(i, j)` between
    /// left point `i` and right point `j`.
    pub fn compose(&self, l: &FinStructure, r: &FinStructure, edges: &[(usize, usize)]) -> FinStructure {
        let a = l.size();
        let mut m = FinStructure::new(self.sig.clone(), a + r.size());
        for x in 0..a {
            m.insert(L, &[x]);
        }
        for x in a..m.size() {
            m.insert(R, &[x]);
        }
        for rel in 0..self.left.signature().relations().len() {
            for t in l.tuples(rel) {
                m.insert(self.l_offset + rel, t);
            }
        }
        for rel in 0..self.right.signature().relations().len() {
            for t in r.tuples(rel) {
                let shifted: Vec<usize> = t.iter().map(|&e| e + a).collect();
                m.insert(self.r_offset + rel, &shifted);
            }
        }
        for &(i, j) in edges {
            m.insert(ADJ, &[i, a + j]);
            m.insert(ADJ, &[a + j, i]);
        }
        m
    }

    /// Writes `s` (element `i` is `over[i]`) into the block at `offset`.
    fn write_side(&self, m: &mut FinStructure, offset: usize, over: &[usize], s: &FinStructure) {
        for rel in 0..s.signature().relations().len() {
            for t in s.tuples(rel) {
                let mapped: Vec<usize> = t.iter().map(|&i| over[i]).collect();
                m.insert(offset + rel, &mapped);
            }
        }
    }

    /// Adds a fresh `L`-point `a0` adjacent to `b0` only, with the `L`-part
    /// grown by the left class's generic extension. Returns the extension and
    /// `a0`.
    pub fn distinguishing_witness(
        &self,
        m: &FinStructure,
        h: &[usize],
        b0: usize,
    ) -> Result<(FinStructure, usize), ClassError> {
        let bad = |reason: String| ClassError::Unsupported {
            class: self.name(),
            reason,
        };
        crate::fraisse::require_member(self, m)?;
        let hm = Embedding::new(h.to_vec());
        if !hm.is_bijective_onto(m.size()) || hm.check(m, m).is_err() {
            return Err(bad("h is not an automorphism".into()));
        }
        if b0 >= m.size() || !m.holds(R, &[b0]) {
            return Err(bad(format!("{b0} is not an R-point")));
        }
        if h[b0] == b0 {
            return Err(bad(format!("h fixes {b0}")));
        }
        let left = self.left_side(m);
        let (ext, inc) = self.left.generic_extend(&left.structure, 1)?;
        let a0 = m.size();
        let mut w = m.grown(1);
        w.insert(L, &[a0]);
        let mut over = vec![a0; ext.size()];
        for (i, &e) in left.elements.iter().enumerate() {
            over[inc.apply(i)] = e;
        }
        self.write_side(&mut w, self.l_offset, &over, &ext);
        w.insert(ADJ, &[a0, b0]);
        w.insert(ADJ, &[b0, a0]);
        Ok((w, a0))
    }
}

impl FraisseClass for MixedSum {
    fn name(&self) -> String {
        format!("mix:{}:{}", self.left.name(), self.right.name())
    }

    fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    fn check_member(&self, m: &FinStructure) -> Result<(), String> {
        check_bipartite(m, L, R, ADJ)?;
        for (side, offset, count) in [
            (L, self.l_offset, self.left.signature().relations().len()),
            (R, self.r_offset, self.right.signature().relations().len()),
        ] {
            for rel in offset..offset + count {
                if let Some(t) = m.tuples(rel).find(|t| t.iter().any(|&e| !m.holds(side, &[e]))) {
                    return Err(format!(
                        "{}{:?} leaves its side",
                        self.sig.relations()[rel].name,
                        t
                    ));
                }
            }
        }
        self.left
            .membership(&self.left_side(m).structure)
            .map_err(|r| format!("L-part: {r}"))?;
        self.right
            .membership(&self.right_side(m).structure)
            .map_err(|r| format!("R-part: {r}"))
    }

    /// Each side amalgamates in its own class; `W` lists the `L`-amalgam then
    /// the `R`-amalgam, and `adj` is the union of the two edge sets.
    fn amalgamate(
        &self,
        z: &FinStructure,
        x: &FinStructure,
        y: &FinStructure,
        f: &Embedding,
        g: &Embedding,
    ) -> Result<Amalgam, ClassError> {
        require_span(self, z, x, y, f, g)?;
        let mut left_map = vec![usize::MAX; x.size()];
        let mut right_map = vec![usize::MAX; y.size()];
        let mut parts = Vec::new();
        let mut base = 0;
        for (which, class, offset) in [(L, &self.left, self.l_offset), (R, &self.right, self.r_offset)] {
            let (zs, xs, ys) = (self.side(z, which), self.side(x, which), self.side(y, which));
            let pos = |list: &[usize], e: usize| list.iter().position(|&p| p == e).expect("side element");
            let fs = Embedding::new(zs.elements.iter().map(|&e| pos(&xs.elements, f.apply(e))).collect());
            let gs = Embedding::new(zs.elements.iter().map(|&e| pos(&ys.elements, g.apply(e))).collect());
            let am = class.amalgamate(&zs.structure, &xs.structure, &ys.structure, &fs, &gs)?;
            for (i, &e) in xs.elements.iter().enumerate() {
                left_map[e] = base + am.left.apply(i);
            }
            for (i, &e) in ys.elements.iter().enumerate() {
                right_map[e] = base + am.right.apply(i);
            }
            let size = am.structure.size();
            parts.push((which, offset, base, am.structure));
            base += size;
        }
        let mut w = FinStructure::new(self.sig.clone(), base);
        for (which, offset, start, s) in &parts {
            let over: Vec<usize> = (*start..*start + s.size()).collect();
            for &e in &over {
                w.insert(*which, &[e]);
            }
            self.write_side(&mut w, *offset, &over, s);
        }
        for (m, map) in [(x, &left_map), (y, &right_map)] {
            for t in m.tuples(ADJ) {
                w.insert(ADJ, &[map[t[0]], map[t[1]]]);
            }
        }
        Ok(Amalgam {
            structure: w,
            left: Embedding::new(left_map),
            right: Embedding::new(right_map),
        })
    }

    /// Grows the `L`-part through the left class; no new edges.
    fn generic_extend(&self, m: &FinStructure, k: usize) -> Result<(FinStructure, Embedding), ClassError> {
        let left = self.left_side(m);
        let (ext, inc) = self.left.generic_extend(&left.structure, k)?;
        let n = m.size();
        let mut w = m.grown(k);
        let mut over = vec![usize::MAX; ext.size()];
        for (i, &e) in left.elements.iter().enumerate() {
            over[inc.apply(i)] = e;
        }
        let mut next = n;
        for slot in over.iter_mut().filter(|o| **o == usize::MAX) {
            *slot = next;
            w.insert(L, &[next]);
            next += 1;
        }
        self.write_side(&mut w, self.l_offset, &over, &ext);
        Ok((w, Embedding::identity(n)))
    }

    fn claims_disjoint(&self) -> bool {
        true
    }

    fn type_candidates(&self, n: usize) -> Vec<FinStructure> {
        let mut out = Vec::new();
        for a in 0..=n {
            let b = n - a;
            let (Ok(ls), Ok(rs)) = (enumerate_members(&*self.left, a), enumerate_members(&*self.right, b)) else {
                continue;
            };
            let pairs: Vec<(usize, usize)> = (0..a).flat_map(|i| (0..b).map(move |j| (i, j))).collect();
            for l in &ls {
                for r in &rs {
                    for mask in 0u64..(1u64 << pairs.len()) {
                        let edges: Vec<(usize, usize)> = pairs
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| mask >> i & 1 == 1)
                            .map(|(_, &p)| p)
                            .collect();
                        out.push(self.compose(l, r, &edges));
                    }
                }
            }
        }
        out
    }

    fn labeled_members(&self, n: usize) -> Vec<FinStructure> {
        let perms = crate::groups::all_permutations(n);
        let mut out: Vec<FinStructure> = self
            .type_candidates(n)
            .iter()
            .flat_map(|m| perms.iter().map(move |p| m.relabel(p)))
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::basic::{LinearOrders, PureSets};
    use crate::structures::automorphisms;

    fn sets_lo() -> MixedSum {
        mixed_sum(Arc::new(PureSets::new()), Arc::new(LinearOrders::new())).unwrap()
    }

    #[test]
    fn one_edge_member() {
        let c = sets_lo();
        let l = FinStructure::new(Signature::empty(), 1);
        let r = LinearOrders::new().chain(1);
        assert!(c.is_member(&c.compose(&l, &r, &[(0, 0)])));
    }

    #[test]
    fn witness_separates_swapped_points() {
        let c = mixed_sum(Arc::new(PureSets::new()), Arc::new(PureSets::new())).unwrap();
        let m = c.compose(
            &FinStructure::new(Signature::empty(), 0),
            &FinStructure::new(Signature::empty(), 2),
            &[],
        );
        let (w, a0) = c.distinguishing_witness(&m, &[1, 0], 0).unwrap();
        assert!(c.is_member(&w));
        let aut = automorphisms(&w).unwrap();
        for p in aut.elements() {
            if p.apply(0) == 1 && p.apply(1) == 0 {
                assert_ne!(p.apply(a0), a0);
            }
        }
        assert!(c.distinguishing_witness(&m, &[0, 1], 0).is_err());
    }

    #[test]
    fn non_disjoint_base_rejected_by_name() {
        assert_eq!(sets_lo().name(), "mix:sets:lo");
    }
}
