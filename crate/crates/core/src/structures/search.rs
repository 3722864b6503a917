//! Backtracking search for embeddings between finite structures.
//!
//! Domain elements are visited in a connectivity-first order. Assigning an
//! element forces the images of its function values, and every assignment is
//! checked against all relation tuples over the already-mapped elements, in
//! both directions, so complete maps are embeddings by construction. For
//! bijective searches, candidates are pruned by relation-degree profiles.

use std::ops::ControlFlow;

use super::{Embedding, FinStructure, StructureError};
use crate::groups::{Perm, PermGroup};

pub const DEFAULT_AUTOMORPHISM_CAP: usize = 10;

const UNMAPPED: usize = usize::MAX;

struct Search<'a> {
    dom: &'a FinStructure,
    cod: &'a FinStructure,
    allowed: &'a dyn Fn(usize, usize) -> bool,
    profiles: Option<(Vec<Vec<u64>>, Vec<Vec<u64>>)>,
    order: Vec<usize>,
    map: Vec<usize>,
    used: Vec<bool>,
    mapped: Vec<usize>,
    tuple: Vec<usize>,
    image: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(
        dom: &'a FinStructure,
        cod: &'a FinStructure,
        bijective: bool,
        allowed: &'a dyn Fn(usize, usize) -> bool,
    ) -> Self {
        let profiles = bijective.then(|| {
            (
                (0..dom.size()).map(|x| dom.profile(x)).collect(),
                (0..cod.size()).map(|y| cod.profile(y)).collect(),
            )
        });
        Search {
            dom,
            cod,
            allowed,
            profiles,
            order: visit_order(dom),
            map: vec![UNMAPPED; dom.size()],
            used: vec![false; cod.size()],
            mapped: Vec::with_capacity(dom.size()),
            tuple: Vec::new(),
            image: Vec::new(),
        }
    }

    fn admissible(&self, x: usize, y: usize) -> bool {
        if !(self.allowed)(x, y) {
            return false;
        }
        match &self.profiles {
            Some((dp, cp)) => dp[x] == cp[y],
            None => true,
        }
    }

    /// Maps `x` to `y` and everything that forces. On failure the partial
    /// state must be rolled back with `undo` by the caller.
    fn assign(&mut self, x: usize, y: usize) -> bool {
        let mut pending = vec![(x, y)];
        while let Some((a, b)) = pending.pop() {
            if self.map[a] != UNMAPPED {
                if self.map[a] != b {
                    return false;
                }
                continue;
            }
            if self.used[b] || !self.admissible(a, b) {
                return false;
            }
            self.map[a] = b;
            self.used[b] = true;
            self.mapped.push(a);
            if !self.consistent(a) {
                return false;
            }
            for f in 0..self.dom.signature().functions().len() {
                pending.push((self.dom.fun(f, a), self.cod.fun(f, b)));
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.mapped.len() > mark {
            let a = self.mapped.pop().unwrap();
            self.used[self.map[a]] = false;
            self.map[a] = UNMAPPED;
        }
    }

    /// Every tuple over mapped elements that mentions `a` holds in the
    /// domain exactly when its image holds in the codomain.
    fn consistent(&mut self, a: usize) -> bool {
        let m = self.mapped.len();
        for (r, sym) in self.dom.signature().relations().iter().enumerate() {
            let k = sym.arity;
            self.tuple.resize(k, 0);
            self.image.resize(k, 0);
            for code in 0..m.pow(k as u32) {
                let mut rest = code;
                let mut has_a = false;
                for i in 0..k {
                    let e = self.mapped[rest % m];
                    rest /= m;
                    has_a |= e == a;
                    self.tuple[i] = e;
                    self.image[i] = self.map[e];
                }
                if has_a && self.dom.holds(r, &self.tuple) != self.cod.holds(r, &self.image) {
                    return false;
                }
            }
        }
        true
    }

    fn run(&mut self, emit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>) -> ControlFlow<()> {
        let Some(&x) = self.order.iter().find(|&&x| self.map[x] == UNMAPPED) else {
            return emit(&self.map);
        };
        for y in 0..self.cod.size() {
            if self.used[y] {
                continue;
            }
            let mark = self.mapped.len();
            if self.assign(x, y) {
                self.run(emit)?;
            }
            self.undo(mark);
        }
        ControlFlow::Continue(())
    }
}

/// Greedy order: start from the element in most tuples, then repeatedly take
/// the element sharing most tuples with those already chosen.
fn visit_order(m: &FinStructure) -> Vec<usize> {
    let n = m.size();
    let mut link = vec![vec![0u32; n]; n];
    let mut weight = vec![0u32; n];
    for r in 0..m.signature().relations().len() {
        for t in m.tuples(r) {
            for &a in t.iter() {
                weight[a] += 1;
                for &b in t.iter() {
                    if a != b {
                        link[a][b] += 1;
                    }
                }
            }
        }
    }
    for f in 0..m.signature().functions().len() {
        for x in 0..n {
            let y = m.fun(f, x);
            if x != y {
                link[x][y] += 1;
                link[y][x] += 1;
            }
        }
    }
    let mut chosen = vec![false; n];
    let mut score = vec![0u32; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let next = (0..n)
            .filter(|&x| !chosen[x])
            .max_by_key(|&x| (score[x], weight[x], std::cmp::Reverse(x)))
            .unwrap();
        chosen[next] = true;
        order.push(next);
        for y in 0..n {
            score[y] += link[next][y];
        }
    }
    order
}

/// Maps of every embedding `dom -> cod` that extends `partial` and respects
/// `allowed`, sorted lexicographically. `limit` stops the search early.
pub fn embeddings_where(
    dom: &FinStructure,
    cod: &FinStructure,
    bijective: bool,
    partial: &[(usize, usize)],
    allowed: &dyn Fn(usize, usize) -> bool,
    limit: Option<usize>,
) -> Vec<Vec<usize>> {
    let mut found = Vec::new();
    if dom.size() > cod.size() || (bijective && dom.size() != cod.size()) {
        return found;
    }
    if partial
        .iter()
        .any(|&(x, y)| x >= dom.size() || y >= cod.size())
    {
        return found;
    }
    let mut search = Search::new(dom, cod, bijective, allowed);
    for &(x, y) in partial {
        if !search.assign(x, y) {
            return found;
        }
    }
    let _ = search.run(&mut |map| {
        found.push(map.to_vec());
        if limit.is_some_and(|l| found.len() >= l) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    found.sort();
    found
}

/// Every embedding of `a` into `b`, lexicographic on the map.
pub fn all_embeddings(a: &FinStructure, b: &FinStructure) -> Result<Vec<Embedding>, StructureError> {
    a.require_same_signature(b)?;
    Ok(embeddings_where(a, b, false, &[], &|_, _| true, None)
        .into_iter()
        .map(Embedding::new)
        .collect())
}

/// Some embedding of `dom` into `cod` agreeing with `partial`, if one exists.
pub fn extend_embedding(
    dom: &FinStructure,
    cod: &FinStructure,
    partial: &[(usize, usize)],
) -> Option<Embedding> {
    if !dom.same_signature(cod) {
        return None;
    }
    embeddings_where(dom, cod, false, partial, &|_, _| true, Some(1))
        .pop()
        .map(Embedding::new)
}

pub fn isomorphisms(a: &FinStructure, b: &FinStructure) -> Result<Vec<Embedding>, StructureError> {
    a.require_same_signature(b)?;
    Ok(embeddings_where(a, b, true, &[], &|_, _| true, None)
        .into_iter()
        .map(Embedding::new)
        .collect())
}

/// A bijective embedding `a -> b` if the structures are isomorphic.
pub fn isomorphic(a: &FinStructure, b: &FinStructure) -> Result<Option<Embedding>, StructureError> {
    a.require_same_signature(b)?;
    if a.size() != b.size() || a.fingerprint() != b.fingerprint() {
        return Ok(None);
    }
    Ok(embeddings_where(a, b, true, &[], &|_, _| true, Some(1))
        .pop()
        .map(Embedding::new))
}

/// The full automorphism group with the default size cap.
pub fn automorphisms(m: &FinStructure) -> Result<PermGroup, StructureError> {
    automorphisms_with_cap(m, DEFAULT_AUTOMORPHISM_CAP)
}

pub fn automorphisms_with_cap(m: &FinStructure, cap: usize) -> Result<PermGroup, StructureError> {
    if m.size() > cap {
        return Err(StructureError::SizeCapExceeded {
            size: m.size(),
            cap,
        });
    }
    let elements = embeddings_where(m, m, true, &[], &|_, _| true, None)
        .into_iter()
        .map(Perm::from_images_unchecked)
        .collect();
    Ok(PermGroup::from_elements_unchecked(m.size(), elements))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::Signature;

    fn chain(n: usize) -> FinStructure {
        let mut m = FinStructure::new(Signature::of(&[("lt", 2)], &[]), n);
        for i in 0..n {
            for j in i + 1..n {
                m.insert(0, &[i, j]);
            }
        }
        m
    }

    fn wheel(n: usize) -> FinStructure {
        let mut m = FinStructure::new(Signature::of(&[("lt", 2), ("adj", 2)], &["s"]), n);
        for x in 0..n {
            m.set_fun(0, x, (x + 1) % n);
        }
        m
    }

    fn pure(n: usize) -> FinStructure {
        FinStructure::new(Signature::empty(), n)
    }

    #[test]
    fn embedding_counts() {
        assert_eq!(all_embeddings(&pure(1), &pure(3)).unwrap().len(), 3);
        let e = all_embeddings(&chain(2), &chain(3)).unwrap();
        let maps: Vec<&[usize]> = e.iter().map(|e| e.map()).collect();
        assert_eq!(maps, vec![&[0, 1][..], &[0, 2], &[1, 2]]);
        assert!(all_embeddings(&wheel(3), &wheel(4)).unwrap().is_empty());
    }

    #[test]
    fn signature_mismatch_is_an_error() {
        assert!(matches!(
            all_embeddings(&pure(1), &chain(1)),
            Err(StructureError::SignatureMismatch { .. })
        ));
    }

    #[test]
    fn automorphism_groups() {
        assert_eq!(automorphisms(&pure(4)).unwrap().order(), 24);
        assert_eq!(automorphisms(&chain(5)).unwrap().order(), 1);
        let g = automorphisms(&wheel(6)).unwrap();
        assert_eq!(g.order(), 6);
        assert!(g.contains(&Perm::from_images_unchecked(vec![1, 2, 3, 4, 5, 0])));
    }

    #[test]
    fn automorphism_cap() {
        assert!(matches!(
            automorphisms(&pure(11)),
            Err(StructureError::SizeCapExceeded { size: 11, cap: 10 })
        ));
    }

    #[test]
    fn isomorphism_of_wheels() {
        assert!(isomorphic(&wheel(3), &wheel(3)).unwrap().is_some());
        assert!(isomorphic(&wheel(3), &wheel(4)).unwrap().is_none());
    }

    #[test]
    fn bipartite_sides_are_preserved() {
        let sig = Signature::of(&[("L", 1), ("R", 1), ("adj", 2)], &[]);
        // one L and two R points vs two L and one R point
        let mut a = FinStructure::new(sig.clone(), 3);
        a.insert(0, &[0]);
        a.insert(1, &[1]);
        a.insert(1, &[2]);
        let mut b = FinStructure::new(sig, 3);
        b.insert(1, &[0]);
        b.insert(0, &[1]);
        b.insert(0, &[2]);
        assert!(isomorphic(&a, &b).unwrap().is_none());
    }

    #[test]
    fn partial_maps_are_respected() {
        let e = extend_embedding(&chain(2), &chain(4), &[(0, 2)]).unwrap();
        assert_eq!(e.map(), &[2, 3]);
        assert!(extend_embedding(&chain(2), &chain(4), &[(0, 3)]).is_none());
    }

    #[test]
    fn reflection_is_enforced() {
        // an edge-free pair must not land on an edge
        let sig = Signature::of(&[("adj", 2)], &[]);
        let a = FinStructure::new(sig.clone(), 2);
        let mut b = FinStructure::new(sig, 2);
        b.insert(0, &[0, 1]);
        b.insert(0, &[1, 0]);
        assert!(all_embeddings(&a, &b).unwrap().is_empty());
    }
}
