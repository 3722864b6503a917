//! Rotating machines: block-ordered disjoint unions of successor cycles with
//! a successor-compatible graph between wheels.

use std::sync::Arc;

use super::basic::merge_chains;
use crate::fraisse::{require_span, Amalgam, ClassError, FraisseClass, Pushout};
use crate::groups::GroupTable;
use crate::structures::{Embedding, FinStructure, Signature};

const LT: usize = 0;
const ADJ: usize = 1;
const S: usize = 0;

#[derive(Debug, Clone)]
pub struct RotatingMachines {
    sig: Arc<Signature>,
}

impl Default for RotatingMachines {
    fn default() -> Self {
        Self::new()
    }
}

/// Successor orbits, each listed from its least element along `s`, sorted by
/// least element.
pub fn wheels(m: &FinStructure) -> Vec<Vec<usize>> {
    let mut seen = vec![false; m.size()];
    let mut out = Vec::new();
    for start in 0..m.size() {
        if seen[start] {
            continue;
        }
        let mut wheel = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            wheel.push(x);
            x = m.fun(S, x);
        }
        out.push(wheel);
    }
    out
}

/// Orbits of the pair map `(i, j) ↦ (i+1 mod a, j+1 mod b)`: `gcd(a, b)` of
/// them, each of size `lcm(a, b)`, listed from `(0, d)` for `d < gcd`.
pub fn diagonal_orbits(a: usize, b: usize) -> Vec<Vec<(usize, usize)>> {
    let d = gcd(a, b);
    let l = a / d * b;
    (0..d)
        .map(|start| (0..l).map(|t| (t % a, (start + t) % b)).collect())
        .collect()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A layout: wheel sizes from the bottom block up and, for each pair of
/// wheels `(u, v)` with `u < v` in lexicographic order, a bitmask over
/// [`diagonal_orbits`] choosing the edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub sizes: Vec<usize>,
    pub edges: Vec<u64>,
}

impl Layout {
    /// Number of free edge bits of a size sequence.
    pub fn edge_bits(sizes: &[usize]) -> Vec<usize> {
        let mut out = Vec::new();
        for u in 0..sizes.len() {
            for v in u + 1..sizes.len() {
                out.push(gcd(sizes[u], sizes[v]));
            }
        }
        out
    }
}

impl Layout {
    /// Layout whose edge masks are consecutive bit fields of `code`, first
    /// pair lowest.
    pub fn from_code(sizes: &[usize], code: u64) -> Layout {
        let mut rest = code;
        let edges = Self::edge_bits(sizes)
            .iter()
            .map(|&b| {
                let m = rest & ((1u64 << b) - 1);
                rest >>= b;
                m
            })
            .collect();
        Layout {
            sizes: sizes.to_vec(),
            edges,
        }
    }

    /// The layout after rotating wheel `u` by `turns[u]`. Rotations are the
    /// only isomorphisms between layouts with the same sizes: wheels keep
    /// their block, and an edge orbit `j - i ≡ d (mod gcd)` moves to
    /// `d + turns[v] - turns[u]`.
    pub fn rotated(&self, turns: &[usize]) -> Layout {
        let mut edges = Vec::with_capacity(self.edges.len());
        let mut pair = 0;
        for u in 0..self.sizes.len() {
            for v in u + 1..self.sizes.len() {
                let g = gcd(self.sizes[u], self.sizes[v]);
                let shift = (turns[v] % g + g - turns[u] % g) % g;
                let mask = self.edges.get(pair).copied().unwrap_or(0);
                let moved = (0..g)
                    .filter(|&o| mask >> o & 1 == 1)
                    .fold(0u64, |acc, o| acc | 1 << ((o + shift) % g));
                edges.push(moved);
                pair += 1;
            }
        }
        Layout {
            sizes: self.sizes.clone(),
            edges,
        }
    }

    /// Least edge vector over all wheel rotations.
    pub fn canonical(&self) -> Layout {
        let mut turns = vec![0; self.sizes.len()];
        let mut best = self.rotated(&turns);
        loop {
            let Some(u) = (0..turns.len()).find(|&u| turns[u] + 1 < self.sizes[u]) else {
                return best;
            };
            turns[u] += 1;
            for t in &mut turns[..u] {
                *t = 0;
            }
            let r = self.rotated(&turns);
            if r.edges < best.edges {
                best = r;
            }
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical().edges == self.rotated(&vec![0; self.sizes.len()]).edges
    }
}

/// Layouts on a fixed size sequence, one per edge code.
pub fn layouts_of(sizes: &[usize]) -> impl Iterator<Item = Layout> + '_ {
    let total: usize = Layout::edge_bits(sizes).iter().sum();
    (0u64..1 << total).map(move |code| Layout::from_code(sizes, code))
}

/// Ordered compositions of `n` into positive parts.
pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl RotatingMachines {
    pub fn new() -> Self {
        RotatingMachines {
            sig: Signature::of(&[("lt", 2), ("adj", 2)], &["s"]),
        }
    }

    /// Machine for a layout; wheel `i` occupies a consecutive index block.
    pub fn from_layout(&self, layout: &Layout) -> FinStructure {
        let n: usize = layout.sizes.iter().sum();
        let mut m = FinStructure::new(self.sig.clone(), n);
        let mut starts = Vec::new();
        let mut next = 0;
        for &size in &layout.sizes {
            starts.push(next);
            for i in 0..size {
                m.set_fun(S, next + i, next + (i + 1) % size);
            }
            next += size;
        }
        let mut pair = 0;
        for u in 0..layout.sizes.len() {
            for v in u + 1..layout.sizes.len() {
                let (a, b) = (layout.sizes[u], layout.sizes[v]);
                for i in 0..a {
                    for j in 0..b {
                        m.insert(LT, &[starts[u] + i, starts[v] + j]);
                    }
                }
                let mask = layout.edges.get(pair).copied().unwrap_or(0);
                for (o, orbit) in diagonal_orbits(a, b).iter().enumerate() {
                    if mask >> o & 1 == 1 {
                        for &(i, j) in orbit {
                            m.insert(ADJ, &[starts[u] + i, starts[v] + j]);
                            m.insert(ADJ, &[starts[v] + j, starts[u] + i]);
                        }
                    }
                }
                pair += 1;
            }
        }
        m
    }

    /// Edge-free machine with the given wheels from the bottom up.
    pub fn wheel_stack(&self, sizes: &[usize]) -> FinStructure {
        self.from_layout(&Layout {
            sizes: sizes.to_vec(),
            edges: Vec::new(),
        })
    }

    pub fn wheel(&self, n: usize) -> FinStructure {
        self.wheel_stack(&[n])
    }

    /// Every layout with `n` elements; together they cover all isomorphism
    /// types, with repetitions.
    pub fn layouts(&self, n: usize) -> Vec<Layout> {
        compositions(n).iter().flat_map(|sizes| layouts_of(sizes)).collect()
    }

    /// Wheels of `m` from the lowest block up.
    pub fn block_order(m: &FinStructure) -> Vec<Vec<usize>> {
        let mut ws = wheels(m);
        let mut below = vec![0usize; m.size()];
        for t in m.tuples(LT) {
            below[t[1]] += 1;
        }
        ws.sort_by_key(|w| below[w[0]]);
        ws
    }

    /// The machine `C ∪ D` with `C = Z_n` below `D = Z_{nk}` and
    /// `c_x ~ d_y` iff `x ≡ y (mod n)`.
    pub fn gadget(&self, n: usize, k: usize) -> Result<FinStructure, ClassError> {
        if n == 0 || k == 0 {
            return Err(ClassError::Unsupported {
                class: self.name(),
                reason: format!("gadget needs n, k >= 1, got n = {n}, k = {k}"),
            });
        }
        let m = n * k;
        let mut g = self.wheel_stack(&[n, m]);
        for x in 0..n {
            for y in 0..m {
                if x == y % n {
                    g.insert(ADJ, &[x, n + y]);
                    g.insert(ADJ, &[n + y, x]);
                }
            }
        }
        Ok(g)
    }

    /// Rotation of each wheel of an edge-free stack as a group action
    /// table: `Z_{n1} × … × Z_{nr}`.
    pub fn rotation_group(sizes: &[usize]) -> Result<GroupTable, ClassError> {
        let mut g = GroupTable::trivial();
        for &n in sizes {
            g = GroupTable::product(&g, &GroupTable::cyclic(n)?);
        }
        Ok(g)
    }
}

impl FraisseClass for RotatingMachines {
    fn name(&self) -> String {
        "rot".into()
    }

    fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    fn check_member(&self, m: &FinStructure) -> Result<(), String> {
        let n = m.size();
        let mut wheel_of = vec![usize::MAX; n];
        let mut hits = vec![0usize; n];
        for x in 0..n {
            hits[m.fun(S, x)] += 1;
        }
        if let Some(x) = (0..n).find(|&x| hits[x] != 1) {
            return Err(format!("successor is not a bijection at {x}"));
        }
        let ws = wheels(m);
        for (i, w) in ws.iter().enumerate() {
            for &x in w {
                wheel_of[x] = i;
            }
        }
        for rel in [LT, ADJ] {
            for t in m.tuples(rel) {
                if wheel_of[t[0]] == wheel_of[t[1]] {
                    return Err(format!("relation inside a wheel at ({},{})", t[0], t[1]));
                }
            }
        }
        for t in m.tuples(ADJ) {
            let (a, b) = (t[0], t[1]);
            if !m.holds(ADJ, &[b, a]) {
                return Err(format!("adj({a},{b}) without adj({b},{a})"));
            }
            let (sa, sb) = (m.fun(S, a), m.fun(S, b));
            if !m.holds(ADJ, &[sa, sb]) {
                return Err(format!("adj({a},{b}) but not adj(s {a}, s {b})"));
            }
        }
        // Once wheels are block ordered, lt is transitive iff the induced
        // tournament on wheels is, i.e. iff no two wheels have equally many
        // wheels below them.
        let mut wheels_below = vec![0usize; ws.len()];
        for u in 0..ws.len() {
            for v in 0..ws.len() {
                if u == v {
                    continue;
                }
                let below = ws[u]
                    .iter()
                    .all(|&a| ws[v].iter().all(|&b| m.holds(LT, &[a, b]) && !m.holds(LT, &[b, a])));
                let above = ws[u]
                    .iter()
                    .all(|&a| ws[v].iter().all(|&b| m.holds(LT, &[b, a]) && !m.holds(LT, &[a, b])));
                if !below && !above {
                    return Err(format!("wheels of {} and {} are not block ordered", ws[u][0], ws[v][0]));
                }
                wheels_below[u] += usize::from(above);
            }
        }
        let mut seen = vec![false; ws.len()];
        for (u, &k) in wheels_below.iter().enumerate() {
            if std::mem::replace(&mut seen[k], true) {
                return Err(format!("lt not transitive through the wheel of {}", ws[u][0]));
            }
        }
        Ok(())
    }

    /// Wheels merge like points of a linear order: each keeps its gap among
    /// the common wheels and `X`-wheels precede `Y`-wheels inside a gap.
    /// Edges and successors are the unions.
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
        for t in w.tuples(LT).map(|t| t.to_vec()).collect::<Vec<_>>() {
            w.remove(LT, &t);
        }
        // One quotient point per wheel, numbered in block order; common
        // wheels are the images of the wheels of Z.
        let x_blocks = Self::block_order(x);
        let y_blocks = Self::block_order(y);
        let block_index = |blocks: &[Vec<usize>], e: usize| {
            blocks.iter().position(|b| b.contains(&e)).expect("element lies on a wheel")
        };
        let z_wheels = wheels(z);
        let fq = Embedding::new(z_wheels.iter().map(|w| block_index(&x_blocks, f.apply(w[0]))).collect());
        let gq = Embedding::new(z_wheels.iter().map(|w| block_index(&y_blocks, g.apply(w[0]))).collect());
        let qx = FinStructure::new(Signature::empty(), x_blocks.len());
        let qy = FinStructure::new(Signature::empty(), y_blocks.len());
        let qpo = Pushout::new(&qx, &qy, &fq, &gq);
        let x_seq: Vec<usize> = (0..x_blocks.len()).collect();
        let y_seq: Vec<usize> = (0..y_blocks.len()).collect();
        let order = merge_chains(&x_seq, &y_seq, fq.map(), &qpo);
        // W-elements of each quotient point.
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); qpo.size];
        for (i, b) in x_blocks.iter().enumerate() {
            members[i] = b.clone();
        }
        for &yb in &qpo.y_only {
            members[qpo.y_to_w[yb]] = y_blocks[yb].iter().map(|&e| po.y_to_w[e]).collect();
        }
        for (i, &lower) in order.iter().enumerate() {
            for &upper in &order[i + 1..] {
                for &a in &members[lower] {
                    for &b in &members[upper] {
                        w.insert(LT, &[a, b]);
                    }
                }
            }
        }
        Ok(Amalgam {
            structure: w,
            left: po.left(),
            right: po.right(),
        })
    }

    /// One new `k`-wheel above every existing block.
    fn generic_extend(&self, m: &FinStructure, k: usize) -> Result<(FinStructure, Embedding), ClassError> {
        let n = m.size();
        let mut w = m.grown(k);
        for i in 0..k {
            w.set_fun(S, n + i, n + (i + 1) % k);
            for a in 0..n {
                w.insert(LT, &[a, n + i]);
            }
        }
        Ok((w, Embedding::identity(n)))
    }

    fn claims_disjoint(&self) -> bool {
        true
    }

    fn type_candidates(&self, n: usize) -> Vec<FinStructure> {
        self.layouts(n)
            .iter()
            .filter(|l| l.is_canonical())
            .map(|l| self.from_layout(l))
            .collect()
    }

    fn candidates_are_types(&self) -> bool {
        true
    }

    /// Layout machines under every relabeling; only for tiny `n`.
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
    use crate::fraisse::enumerate_members;
    use crate::structures::automorphisms;

    #[test]
    fn diagonal_orbit_counts() {
        let o = diagonal_orbits(2, 4);
        assert_eq!(o.len(), 2);
        assert!(o.iter().all(|orb| orb.len() == 4));
        assert_eq!(diagonal_orbits(2, 3).len(), 1);
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(4).len(), 8);
        assert_eq!(compositions(0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn layouts_are_members() {
        let c = RotatingMachines::new();
        for n in 0..=4 {
            for m in c.type_candidates(n) {
                assert!(c.is_member(&m), "{m:?}");
            }
        }
    }

    #[test]
    fn canonical_layouts_are_the_types() {
        let c = RotatingMachines::new();
        for n in 0..=5 {
            let all = c.layouts(n).iter().map(|l| c.from_layout(l)).collect::<Vec<_>>();
            assert_eq!(
                crate::fraisse::dedupe_up_to_iso(all).len(),
                c.type_candidates(n).len(),
                "n = {n}"
            );
        }
    }

    #[test]
    fn brute_force_agrees_on_two_points() {
        let c = RotatingMachines::new();
        let sig = c.signature().clone();
        let brute: Vec<FinStructure> = crate::fraisse::all_structures(&sig, 2)
            .into_iter()
            .filter(|m| c.check_member(m).is_ok())
            .collect();
        let a = crate::fraisse::dedupe_up_to_iso(brute);
        let b = enumerate_members(&c, 2).unwrap();
        assert_eq!(a.len(), b.len());
    }

    #[test]
    fn gadget_shape() {
        let c = RotatingMachines::new();
        let g = c.gadget(2, 2).unwrap();
        assert_eq!(g.size(), 6);
        assert!(c.is_member(&g));
        assert_eq!(automorphisms(&g).unwrap().order(), 4);
        assert!(c.gadget(0, 2).is_err());
        // wrap-around pair x = 2, y = 5 of gadget(3, 2)
        let g = c.gadget(3, 2).unwrap();
        assert!(g.holds(ADJ, &[2, 3 + 5]));
        assert!(g.holds(ADJ, &[0, 3]));
        assert!(c.is_member(&g));
    }

    #[test]
    fn two_wheels_over_empty_stack_x_below_y() {
        let c = RotatingMachines::new();
        let (x, y) = (c.wheel(2), c.wheel(3));
        let am = c
            .amalgamate(&c.empty(), &x, &y, &Embedding::empty(), &Embedding::empty())
            .unwrap();
        let w = &am.structure;
        assert!(c.is_member(w));
        assert!(w.holds(LT, &[0, 2]));
        assert_eq!(w.tuple_count(ADJ), 0);
    }
}
