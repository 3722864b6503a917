//! Diversifications `D(E)` and `D_G(E)`: products `P` and consumers `C`,
//! each consumer carrying an `E`-structure on the products, optionally with a
//! free action of a finite group preserving everything.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::fraisse::{
    dedupe_up_to_iso, require_member, require_span, Amalgam, ClassError, ClassRef, FraisseClass,
    Pushout,
};
use crate::groups::{acts_by_automorphisms, is_free_action, GAction, GroupTable};
use crate::structures::{Embedding, FinStructure, Signature};

const P: usize = 0;
const C: usize = 1;

/// `D_G(base)`; with the trivial group this is `D(base)`.
#[derive(Debug)]
pub struct Diversification {
    base: ClassRef,
    group: GroupTable,
    sig: Arc<Signature>,
    plain_sig: Arc<Signature>,
}

/// Part of a structure that already carries a free action, given by its
/// elements and an action on positions in `elements`.
#[derive(Debug, Clone)]
pub struct FixedPart {
    pub elements: Vec<usize>,
    pub action: GAction,
}

/// Output of [`Diversification::orbit_completion`].
#[derive(Debug, Clone)]
pub struct OrbitCompletion {
    /// `X^G` in the signature of `D_G(E)`.
    pub structure: FinStructure,
    /// `X -> X^G` as a map of plain diversified structures.
    pub embedding: Embedding,
    pub action: GAction,
}

/// `D(base)`. The base must be relational with disjoint amalgamation.
pub fn diversify(base: ClassRef) -> Result<Diversification, ClassError> {
    Diversification::new(base, GroupTable::trivial())
}

/// `D_G(base)` for a finite group `G`.
pub fn diversify_with_action(base: ClassRef, group: GroupTable) -> Result<Diversification, ClassError> {
    Diversification::new(base, group)
}

impl Diversification {
    fn new(base: ClassRef, group: GroupTable) -> Result<Self, ClassError> {
        let reject = |reason: &str| ClassError::Unsupported {
            class: format!("div:{}", base.name()),
            reason: reason.to_string(),
        };
        if !base.signature().is_relational() {
            return Err(reject("base signature has function symbols"));
        }
        if !base.claims_disjoint() {
            return Err(reject("base class lacks disjoint amalgamation"));
        }
        let relations: Vec<(String, usize)> = [("P".to_string(), 1), ("C".to_string(), 1)]
            .into_iter()
            .chain(
                base.signature()
                    .relations()
                    .iter()
                    .map(|r| (format!("d_{}", r.name), r.arity + 1)),
            )
            .collect();
        let plain_sig = Arc::new(Signature::new(relations.clone(), Vec::<String>::new())?);
        let acts: Vec<String> = (1..group.order()).map(|g| format!("act{g}")).collect();
        let sig = Arc::new(Signature::new(relations, acts)?);
        Ok(Diversification {
            base,
            group,
            sig,
            plain_sig,
        })
    }

    pub fn base(&self) -> &ClassRef {
        &self.base
    }

    pub fn group(&self) -> &GroupTable {
        &self.group
    }

    /// Signature of `D(base)`, without action symbols.
    pub fn plain_signature(&self) -> &Arc<Signature> {
        &self.plain_sig
    }

    fn q(&self) -> usize {
        self.group.order()
    }

    /// `x^g` read from the action symbols.
    fn act(&self, m: &FinStructure, x: usize, g: usize) -> usize {
        if g == 0 {
            x
        } else {
            m.fun(g - 1, x)
        }
    }

    pub fn products(m: &FinStructure) -> Vec<usize> {
        (0..m.size()).filter(|&x| m.holds(P, &[x])).collect()
    }

    pub fn consumers(m: &FinStructure) -> Vec<usize> {
        (0..m.size()).filter(|&x| m.holds(C, &[x])).collect()
    }

    /// The base structure consumer `c` induces on `over` (listed products,
    /// renumbered by position).
    pub fn slice_on(&self, m: &FinStructure, c: usize, over: &[usize]) -> FinStructure {
        let mut s = FinStructure::new(self.base.signature().clone(), over.len());
        let mut pos = vec![usize::MAX; m.size()];
        for (i, &p) in over.iter().enumerate() {
            pos[p] = i;
        }
        for r in 0..self.base.signature().relations().len() {
            for t in m.tuples(2 + r) {
                let (last, head) = t.split_last().expect("arity at least 2");
                if *last == c && head.iter().all(|&x| pos[x] != usize::MAX) {
                    let mapped: Vec<usize> = head.iter().map(|&x| pos[x]).collect();
                    s.insert(r, &mapped);
                }
            }
        }
        s
    }

    /// Slice of `c` on all products in index order.
    pub fn slice(&self, m: &FinStructure, c: usize) -> FinStructure {
        self.slice_on(m, c, &Self::products(m))
    }

    /// Writes the base structure `s` (element `i` is product `over[i]`) as
    /// the slice of `c`.
    fn write_slice(&self, m: &mut FinStructure, c: usize, over: &[usize], s: &FinStructure) {
        for r in 0..self.base.signature().relations().len() {
            for t in s.tuples(r) {
                let mut mapped: Vec<usize> = t.iter().map(|&i| over[i]).collect();
                mapped.push(c);
                m.insert(2 + r, &mapped);
            }
        }
    }

    /// Copies the slice of `c` to every `c^g` along the action:
    /// `R(x⃗^g, c^g)` for each `R(x⃗, c)`.
    fn transport(&self, m: &mut FinStructure, c: usize) {
        let rels = self.base.signature().relations().len();
        for g in 1..self.q() {
            let cg = self.act(m, c, g);
            for r in 0..rels {
                let moved: Vec<Vec<usize>> = m
                    .tuples(2 + r)
                    .filter(|t| t[t.len() - 1] == c)
                    .map(|t| {
                        let mut u: Vec<usize> = t[..t.len() - 1].iter().map(|&x| self.act(m, x, g)).collect();
                        u.push(cg);
                        u
                    })
                    .collect();
                for u in moved {
                    m.insert(2 + r, &u);
                }
            }
        }
    }

    /// The action read from the symbols `act<g>`; fails if they do not form
    /// a group action.
    pub fn action_of(&self, m: &FinStructure) -> Result<GAction, ClassError> {
        let images = (0..self.q())
            .map(|g| (0..m.size()).map(|x| self.act(m, x, g)).collect())
            .collect();
        Ok(GAction::new(self.group.clone(), images)?)
    }

    /// Forgets the action.
    pub fn forget_action(&self, m: &FinStructure) -> FinStructure {
        m.reduct(&self.plain_sig)
    }

    /// Plain diversified structure with `products` products followed by one
    /// consumer per entry of `slices` (each a base member on the products).
    pub fn plain_model(&self, products: usize, slices: &[FinStructure]) -> FinStructure {
        let n = products + slices.len();
        let mut m = FinStructure::new(self.plain_sig.clone(), n);
        for x in 0..products {
            m.insert(P, &[x]);
        }
        let over: Vec<usize> = (0..products).collect();
        for (i, s) in slices.iter().enumerate() {
            m.insert(C, &[products + i]);
            self.write_slice(&mut m, products + i, &over, s);
        }
        m
    }

    /// Canonical free model: `a` product orbits then one consumer orbit per
    /// slice; orbit `i` is `{(i, h)}` at index `i·|G| + h` with
    /// `(i, h)^g = (i, hg)`. Each slice is the structure of the consumer
    /// `(i, 1)` on all products in index order.
    pub fn model(&self, product_orbits: usize, slices: &[FinStructure]) -> FinStructure {
        let q = self.q();
        let orbits = product_orbits + slices.len();
        let mut m = FinStructure::new(self.sig.clone(), orbits * q);
        for i in 0..orbits {
            for h in 0..q {
                let x = i * q + h;
                m.insert(if i < product_orbits { P } else { C }, &[x]);
                for g in 1..q {
                    m.set_fun(g - 1, x, i * q + self.group.mul(h, g));
                }
            }
        }
        let over: Vec<usize> = (0..product_orbits * q).collect();
        for (j, s) in slices.iter().enumerate() {
            let c = (product_orbits + j) * q;
            self.write_slice(&mut m, c, &over, s);
            self.transport(&mut m, c);
        }
        m
    }

    /// Resolves the consumer `c` of `w` whose slice is known on `known`
    /// (as `s`) but not on the products `fresh`, via the base generic
    /// extension.
    fn extend_slice(
        &self,
        w: &mut FinStructure,
        c: usize,
        known: &[usize],
        s: &FinStructure,
        fresh: &[usize],
    ) -> Result<(), ClassError> {
        let (ext, inc) = self.base.generic_extend(s, fresh.len())?;
        let mut over = vec![usize::MAX; ext.size()];
        for (i, &p) in known.iter().enumerate() {
            over[inc.apply(i)] = p;
        }
        let mut rest = fresh.iter();
        for slot in over.iter_mut().filter(|o| **o == usize::MAX) {
            *slot = *rest.next().expect("generic extension adds exactly the requested points");
        }
        self.write_slice(w, c, &over, &ext);
        Ok(())
    }

    /// `X^G`: adds the missing copies `(x, g)` of every element outside the
    /// fixed part, ordered by `(g, x)` after the elements of `X`. New
    /// consumers get base generic extensions of their slices; consumers of
    /// the fixed part get the iterated disjoint amalgam of the slices their
    /// orbit already prescribes.
    pub fn orbit_completion(
        &self,
        x: &FinStructure,
        fixed: Option<&FixedPart>,
    ) -> Result<OrbitCompletion, ClassError> {
        let plain = Diversification {
            base: self.base.clone(),
            group: GroupTable::trivial(),
            sig: self.plain_sig.clone(),
            plain_sig: self.plain_sig.clone(),
        };
        require_member(&plain, x)?;
        if x.is_empty() {
            return Err(ClassError::Unsupported {
                class: self.name(),
                reason: "orbit completion of the empty structure".into(),
            });
        }
        let q = self.q();
        let n = x.size();
        let mut in_fixed = vec![false; n];
        if let Some(fp) = fixed {
            self.check_fixed_part(x, fp)?;
            for &e in &fp.elements {
                in_fixed[e] = true;
            }
        }
        let outside: Vec<usize> = (0..n).filter(|&e| !in_fixed[e]).collect();
        // copy[e][g] = index of e^g
        let mut copy = vec![vec![usize::MAX; q]; n];
        if let Some(fp) = fixed {
            for (i, &e) in fp.elements.iter().enumerate() {
                for g in 0..q {
                    copy[e][g] = fp.elements[fp.action.act(i, g)];
                }
            }
        }
        let mut next = n;
        for &e in &outside {
            copy[e][0] = e;
        }
        for g in 1..q {
            for &e in &outside {
                copy[e][g] = next;
                next += 1;
            }
        }
        let mut w = FinStructure::new(self.sig.clone(), next);
        for e in 0..n {
            let sort = if x.holds(P, &[e]) { P } else { C };
            for h in 0..q {
                let xh = copy[e][h];
                w.insert(sort, &[xh]);
                for g in 1..q {
                    w.set_fun(g - 1, xh, copy[e][self.group.mul(h, g)]);
                }
            }
        }
        let x_products = Self::products(x);
        let all_products = Self::products(&w);
        let x_set: BTreeSet<usize> = x_products.iter().copied().collect();
        let fresh: Vec<usize> = all_products.iter().copied().filter(|p| !x_set.contains(p)).collect();
        let mut done = vec![false; n];
        for c in Self::consumers(x) {
            if done[c] {
                continue;
            }
            if in_fixed[c] {
                self.complete_fixed_consumer(x, &mut w, c, &copy, &in_fixed)?;
            } else {
                let s = self.slice_on(x, c, &x_products);
                self.extend_slice(&mut w, c, &x_products, &s, &fresh)?;
            }
            self.transport(&mut w, c);
            for &cg in &copy[c] {
                if cg < n {
                    done[cg] = true;
                }
            }
        }
        let action = self.action_of(&w)?;
        Ok(OrbitCompletion {
            structure: w,
            embedding: Embedding::identity(n),
            action,
        })
    }

    /// Slice of a fixed-part consumer `c`: for each `g`, the slice of `c^g`
    /// in `X` pulled back along `g` lives on `(P^X)^{g⁻¹}`; all pieces agree
    /// on the fixed products and are glued by base disjoint amalgamation.
    fn complete_fixed_consumer(
        &self,
        x: &FinStructure,
        w: &mut FinStructure,
        c: usize,
        copy: &[Vec<usize>],
        in_fixed: &[bool],
    ) -> Result<(), ClassError> {
        let x_products = Self::products(x);
        let core: Vec<usize> = x_products.iter().copied().filter(|&p| in_fixed[p]).collect();
        let core_slice = self.slice_on(x, c, &core);
        // Accumulated structure on `covered` (W indices), core first.
        let mut covered = core.clone();
        let mut acc = core_slice.clone();
        for g in 0..self.q() {
            let ginv = self.group.inverse(g);
            let cg = copy[c][g];
            let pieces_over: Vec<usize> = x_products.iter().map(|&p| copy[p][ginv]).collect();
            let piece = self.slice_on(x, cg, &x_products);
            let extra: Vec<usize> = (0..x_products.len())
                .filter(|&i| !in_fixed[x_products[i]])
                .collect();
            if extra.is_empty() {
                continue;
            }
            // core -> acc is the identity on the first |core| points;
            // core -> piece sends each core product to its position.
            let core_in_piece: Vec<usize> = core
                .iter()
                .map(|&p| {
                    x_products
                        .iter()
                        .position(|&q| copy[q][ginv] == p)
                        .expect("fixed products stay fixed")
                })
                .collect();
            let am = self.base.amalgamate(
                &core_slice,
                &acc,
                &piece,
                &Embedding::identity(core.len()),
                &Embedding::new(core_in_piece),
            )?;
            if am.structure.size() != acc.size() + extra.len() {
                return Err(ClassError::AmalgamationFailed {
                    class: self.name(),
                    reason: "base amalgam identified points".into(),
                });
            }
            let mut next_cover = vec![usize::MAX; am.structure.size()];
            for (i, &p) in covered.iter().enumerate() {
                next_cover[am.left.apply(i)] = p;
            }
            for (i, &p) in pieces_over.iter().enumerate() {
                next_cover[am.right.apply(i)] = p;
            }
            covered = next_cover;
            acc = am.structure;
        }
        self.write_slice(w, c, &covered, &acc);
        Ok(())
    }

    fn check_fixed_part(&self, x: &FinStructure, fp: &FixedPart) -> Result<(), ClassError> {
        let bad = |reason: String| ClassError::Unsupported {
            class: self.name(),
            reason,
        };
        if fp.action.carrier_size() != fp.elements.len() || fp.action.group() != &self.group {
            return Err(bad("fixed part action does not match its elements or group".into()));
        }
        if let Some(&e) = fp.elements.iter().find(|&&e| e >= x.size()) {
            return Err(bad(format!("fixed part element {e} out of range")));
        }
        if let Err(fpnt) = is_free_action(&fp.action) {
            return Err(bad(format!(
                "fixed part action is not free: {} fixes {}",
                fpnt.element, fpnt.point
            )));
        }
        let sub = x.induced(&fp.elements);
        match acts_by_automorphisms(&fp.action, &sub)? {
            Ok(()) => Ok(()),
            Err(v) => Err(bad(format!(
                "fixed part action breaks {} at {:?} under {}",
                v.symbol, v.tuple, v.element
            ))),
        }
    }
}

impl FraisseClass for Diversification {
    fn name(&self) -> String {
        if self.group.is_trivial() {
            format!("div:{}", self.base.name())
        } else {
            format!("divg:{}:{}", self.base.name(), self.group.name())
        }
    }

    fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    fn check_member(&self, m: &FinStructure) -> Result<(), String> {
        for e in 0..m.size() {
            if m.holds(P, &[e]) == m.holds(C, &[e]) {
                return Err(format!("element {e} is not exactly one of P, C"));
            }
        }
        for (r, sym) in self.sig.relations().iter().enumerate().skip(2) {
            for t in m.tuples(r) {
                let (last, head) = t.split_last().expect("arity at least 2");
                if !m.holds(C, &[*last]) || head.iter().any(|&x| !m.holds(P, &[x])) {
                    return Err(format!("{}{:?} is not products then a consumer", sym.name, t));
                }
            }
        }
        for c in Self::consumers(m) {
            self.base
                .membership(&self.slice(m, c))
                .map_err(|r| format!("slice of consumer {c}: {r}"))?;
        }
        if self.q() > 1 {
            let action = self.action_of(m).map_err(|e| e.to_string())?;
            if let Err(fp) = is_free_action(&action) {
                return Err(format!("action not free: {} fixes {}", fp.element, fp.point));
            }
            match acts_by_automorphisms(&action, &self.forget_action(m)) {
                Ok(Ok(())) => {}
                Ok(Err(v)) => {
                    return Err(format!(
                        "group element {} breaks {} at {:?}",
                        v.element, v.symbol, v.tuple
                    ))
                }
                Err(e) => return Err(e.to_string()),
            }
        }
        Ok(())
    }

    /// Pushout of the elements, then per consumer orbit (represented by its
    /// least element): an orbit common to both sides gets the base disjoint
    /// amalgam of its two slices; an orbit from one side only gets the base
    /// generic extension over the other side's new products. Slices are then
    /// carried along the orbit by the action.
    fn amalgamate(
        &self,
        z: &FinStructure,
        x: &FinStructure,
        y: &FinStructure,
        f: &Embedding,
        g: &Embedding,
    ) -> Result<Amalgam, ClassError> {
        require_span(self, z, x, y, f, g)?;
        let po = Pushout::new(x, y, f, g);
        let mut w = po.union(x, y);
        let right = po.right();
        let x_products = Self::products(x);
        let y_products = Self::products(y);
        let y_products_w: Vec<usize> = y_products.iter().map(|&p| right.apply(p)).collect();
        let x_only_products: Vec<usize> = {
            let common: BTreeSet<usize> = y_products_w.iter().copied().collect();
            x_products.iter().copied().filter(|p| !common.contains(p)).collect()
        };
        let y_only_products: Vec<usize> = y_products_w
            .iter()
            .copied()
            .filter(|&p| p >= x.size())
            .collect();
        let mut w_to_y = vec![usize::MAX; w.size()];
        for (e, &we) in right.map().iter().enumerate() {
            w_to_y[we] = e;
        }
        let mut w_to_z = vec![usize::MAX; w.size()];
        for (e, &xe) in f.map().iter().enumerate() {
            w_to_z[xe] = e;
        }
        let mut done = vec![false; w.size()];
        for c in Self::consumers(&w) {
            if done[c] {
                continue;
            }
            for h in 0..self.q() {
                done[self.act(&w, c, h)] = true;
            }
            let in_x = c < x.size();
            let in_y = w_to_y[c] != usize::MAX;
            match (in_x, in_y) {
                (true, true) => {
                    let zc = w_to_z[c];
                    let z_products = Self::products(z);
                    let sz = self.slice_on(z, zc, &z_products);
                    let sx = self.slice_on(x, c, &x_products);
                    let sy = self.slice_on(y, w_to_y[c], &y_products);
                    let pos = |list: &[usize], e: usize| list.iter().position(|&p| p == e).expect("product");
                    let fz = Embedding::new(z_products.iter().map(|&p| pos(&x_products, f.apply(p))).collect());
                    let gz = Embedding::new(z_products.iter().map(|&p| pos(&y_products, g.apply(p))).collect());
                    let am = self.base.amalgamate(&sz, &sx, &sy, &fz, &gz)?;
                    let mut over = vec![usize::MAX; am.structure.size()];
                    for (i, &p) in x_products.iter().enumerate() {
                        over[am.left.apply(i)] = p;
                    }
                    for (i, &p) in y_products_w.iter().enumerate() {
                        let slot = &mut over[am.right.apply(i)];
                        if *slot != usize::MAX && *slot != p {
                            return Err(ClassError::AmalgamationFailed {
                                class: self.name(),
                                reason: "base amalgam identified distinct products".into(),
                            });
                        }
                        *slot = p;
                    }
                    if over.contains(&usize::MAX) {
                        return Err(ClassError::AmalgamationFailed {
                            class: self.name(),
                            reason: "base amalgam added points".into(),
                        });
                    }
                    self.write_slice(&mut w, c, &over, &am.structure);
                }
                (true, false) => {
                    let sx = self.slice_on(x, c, &x_products);
                    self.extend_slice(&mut w, c, &x_products, &sx, &y_only_products)?;
                }
                (false, _) => {
                    let sy = self.slice_on(y, w_to_y[c], &y_products);
                    self.extend_slice(&mut w, c, &y_products_w, &sy, &x_only_products)?;
                }
            }
            self.transport(&mut w, c);
        }
        Ok(Amalgam {
            structure: w,
            left: po.left(),
            right,
        })
    }

    /// Adds `k / |G|` free product orbits, amalgamated over the empty
    /// structure.
    fn generic_extend(&self, m: &FinStructure, k: usize) -> Result<(FinStructure, Embedding), ClassError> {
        if k % self.q() != 0 {
            return Err(ClassError::Unsupported {
                class: self.name(),
                reason: format!("cannot add {k} points in orbits of size {}", self.q()),
            });
        }
        let fresh = self.model(k / self.q(), &[]);
        let am = self.amalgamate(&self.empty(), m, &fresh, &Embedding::empty(), &Embedding::empty())?;
        Ok((am.structure, am.left))
    }

    fn claims_disjoint(&self) -> bool {
        true
    }

    /// Canonical models: every split into product and consumer orbits and
    /// every multiset of labeled base slices.
    fn type_candidates(&self, n: usize) -> Vec<FinStructure> {
        let q = self.q();
        if n % q != 0 {
            return Vec::new();
        }
        let orbits = n / q;
        let mut out = Vec::new();
        for a in 0..=orbits {
            let b = orbits - a;
            let slices = dedupe_labeled(self.base.labeled_members(a * q));
            if slices.is_empty() && b > 0 {
                continue;
            }
            for choice in multisets(slices.len(), b) {
                let chosen: Vec<FinStructure> = choice.iter().map(|&i| slices[i].clone()).collect();
                out.push(self.model(a, &chosen));
            }
        }
        out
    }

    fn labeled_members(&self, n: usize) -> Vec<FinStructure> {
        self.type_candidates(n)
    }
}

fn dedupe_labeled(mut v: Vec<FinStructure>) -> Vec<FinStructure> {
    v.sort();
    v.dedup();
    v
}

/// Non-decreasing sequences of length `len` over `0..k`.
fn multisets(k: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|s: Vec<usize>| {
                let from = s.last().copied().unwrap_or(0);
                (from..k).map(move |i| {
                    let mut t = s.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

/// Iso-type reps of the plain diversified members with `products`
/// products and `consumers` consumers.
pub fn plain_types(div: &Diversification, products: usize, consumers: usize) -> Vec<FinStructure> {
    let slices = dedupe_labeled(div.base.labeled_members(products));
    let models = multisets(slices.len(), consumers).into_iter().map(|choice| {
        let chosen: Vec<FinStructure> = choice.iter().map(|&i| slices[i].clone()).collect();
        div.plain_model(products, &chosen)
    });
    dedupe_up_to_iso(models)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::basic::LinearOrders;
    use crate::fraisse::enumerate_members;
    use crate::groups::is_free_action;

    fn lo() -> ClassRef {
        Arc::new(LinearOrders::new())
    }

    #[test]
    fn two_consumers_with_equal_orders_are_members() {
        let d = diversify(lo()).unwrap();
        let l = LinearOrders::new();
        let m = d.plain_model(2, &[l.chain(2), l.chain(2)]);
        assert!(d.is_member(&m));
    }

    #[test]
    fn case_two_extends_slice() {
        let d = diversify(lo()).unwrap();
        let l = LinearOrders::new();
        let z = d.plain_model(0, &[l.chain(0)]);
        let x = d.plain_model(1, &[l.chain(1)]);
        let y = d.plain_model(0, &[l.chain(0), l.chain(0)]);
        let am = d
            .amalgamate(&z, &x, &y, &Embedding::new(vec![1]), &Embedding::new(vec![0]))
            .unwrap();
        assert_eq!(am.structure.size(), 3);
        assert!(d.is_member(&am.structure));
    }

    #[test]
    fn trivial_group_matches_plain() {
        let a = diversify(lo()).unwrap();
        let b = diversify_with_action(lo(), GroupTable::trivial()).unwrap();
        assert_eq!(a.signature(), b.signature());
        assert_eq!(a.name(), "div:lo");
        for n in 0..=3 {
            assert_eq!(
                enumerate_members(&a, n).unwrap().len(),
                enumerate_members(&b, n).unwrap().len()
            );
        }
    }

    #[test]
    fn z2_amalgam_of_consumer_orbit_and_product_orbit() {
        let d = diversify_with_action(lo(), GroupTable::cyclic(2).unwrap()).unwrap();
        let x = d.model(0, &[LinearOrders::new().chain(0)]);
        let y = d.model(1, &[]);
        let am = d
            .amalgamate(&d.empty(), &x, &y, &Embedding::empty(), &Embedding::empty())
            .unwrap();
        assert!(d.is_member(&am.structure));
        assert_eq!(am.structure.size(), 4);
    }

    #[test]
    fn non_free_action_is_rejected() {
        let d = diversify_with_action(lo(), GroupTable::cyclic(2).unwrap()).unwrap();
        let mut m = d.model(1, &[]);
        m.set_fun(0, 0, 0);
        m.set_fun(0, 1, 1);
        assert!(!d.is_member(&m));
    }

    #[test]
    fn orbit_completion_mirrors_slice() {
        let d = diversify_with_action(lo(), GroupTable::cyclic(2).unwrap()).unwrap();
        let plain = diversify(lo()).unwrap();
        let x = plain.plain_model(2, &[LinearOrders::new().chain(2)]);
        let oc = d.orbit_completion(&x, None).unwrap();
        assert_eq!(oc.structure.size(), 6);
        assert!(d.is_member(&oc.structure));
        assert!(is_free_action(&oc.action).is_ok());
        oc.embedding
            .check(&x, &d.forget_action(&oc.structure))
            .unwrap();
        assert_eq!(Diversification::consumers(&oc.structure).len(), 2);
    }

    #[test]
    fn orbit_completion_of_free_structure_is_identity() {
        let d = diversify_with_action(lo(), GroupTable::cyclic(2).unwrap()).unwrap();
        let m = d.model(1, &[LinearOrders::new().chain(2)]);
        let action = d.action_of(&m).unwrap();
        let fixed = FixedPart {
            elements: (0..m.size()).collect(),
            action,
        };
        let oc = d.orbit_completion(&d.forget_action(&m), Some(&fixed)).unwrap();
        assert_eq!(oc.structure, m);
    }

    #[test]
    fn empty_orbit_completion_fails() {
        let d = diversify_with_action(lo(), GroupTable::cyclic(2).unwrap()).unwrap();
        let empty = FinStructure::empty(d.plain_signature().clone());
        assert!(d.orbit_completion(&empty, None).is_err());
    }
}
