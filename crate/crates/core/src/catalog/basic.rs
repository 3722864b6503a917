//! Pure sets, linear orders and bipartite graphs.

use std::sync::Arc;

use crate::fraisse::{require_span, Amalgam, ClassError, FraisseClass, Pushout};
use crate::groups::all_permutations;
use crate::structures::{Embedding, FinStructure, Signature};

#[derive(Debug, Clone)]
pub struct PureSets {
    sig: Arc<Signature>,
}

impl PureSets {
    pub fn new() -> Self {
        PureSets {
            sig: Signature::empty(),
        }
    }
}

impl Default for PureSets {
    fn default() -> Self {
        Self::new()
    }
}

impl FraisseClass for PureSets {
    fn name(&self) -> String {
        "sets".into()
    }

    fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    fn check_member(&self, _: &FinStructure) -> Result<(), String> {
        Ok(())
    }

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
        Ok(Amalgam {
            structure: po.union(x, y),
            left: po.left(),
            right: po.right(),
        })
    }

    fn generic_extend(&self, m: &FinStructure, k: usize) -> Result<(FinStructure, Embedding), ClassError> {
        Ok((m.grown(k), Embedding::identity(m.size())))
    }

    fn claims_disjoint(&self) -> bool {
        true
    }

    fn type_candidates(&self, n: usize) -> Vec<FinStructure> {
        vec![FinStructure::new(self.sig.clone(), n)]
    }
}

/// Strict linear orders in the single relation `lt`.
#[derive(Debug, Clone)]
pub struct LinearOrders {
    sig: Arc<Signature>,
}

impl LinearOrders {
    pub fn new() -> Self {
        LinearOrders {
            sig: Signature::of(&[("lt", 2)], &[]),
        }
    }

    /// The order listing `order[0] < order[1] < …`.
    pub fn from_sequence(&self, order: &[usize]) -> FinStructure {
        chain(&self.sig, order)
    }

    /// `0 < 1 < … < n-1`.
    pub fn chain(&self, n: usize) -> FinStructure {
        self.from_sequence(&(0..n).collect::<Vec<_>>())
    }
}

impl Default for LinearOrders {
    fn default() -> Self {
        Self::new()
    }
}

fn chain(sig: &Arc<Signature>, order: &[usize]) -> FinStructure {
    let mut m = FinStructure::new(sig.clone(), order.len());
    for (i, &a) in order.iter().enumerate() {
        for &b in &order[i + 1..] {
            m.insert(0, &[a, b]);
        }
    }
    m
}

/// Elements of a strict linear order from least to greatest.
pub fn order_sequence(m: &FinStructure, rel: usize) -> Vec<usize> {
    let mut below = vec![0usize; m.size()];
    for t in m.tuples(rel) {
        below[t[1]] += 1;
    }
    let mut seq: Vec<usize> = (0..m.size()).collect();
    seq.sort_by_key(|&x| below[x]);
    seq
}

/// Checks that `rel` is a strict linear order on the listed elements.
pub fn check_linear(m: &FinStructure, rel: usize, elems: &[usize]) -> Result<(), String> {
    // A strict total relation is transitive iff no two points have the same
    // number of points below them.
    let mut below_count: Vec<(usize, usize)> = Vec::with_capacity(elems.len());
    for &a in elems {
        if m.holds(rel, &[a, a]) {
            return Err(format!("{a} < {a}"));
        }
        let mut below = 0;
        for &b in elems {
            if a == b {
                continue;
            }
            let ba = m.holds(rel, &[b, a]);
            if ba == m.holds(rel, &[a, b]) {
                return Err(format!("{a} and {b} are not strictly comparable"));
            }
            below += usize::from(ba);
        }
        below_count.push((below, a));
    }
    below_count.sort_unstable();
    if let Some(w) = below_count.windows(2).find(|w| w[0].0 == w[1].0) {
        let (a, b) = (w[0].1, w[1].1);
        let (lo, hi) = if m.holds(rel, &[a, b]) { (a, b) } else { (b, a) };
        let c = elems
            .iter()
            .copied()
            .find(|&c| m.holds(rel, &[hi, c]) && m.holds(rel, &[c, lo]))
            .expect("equal scores in a tournament force a 3-cycle through the pair");
        return Err(format!("{hi} < {c} < {lo} but not {hi} < {lo}"));
    }
    Ok(())
}

/// Merges two extensions of a common chain. Elements keep their gap (the
/// number of common elements below them); inside a gap the `X`-only points
/// come first, then the `Y`-only points, each in their own order. The result
/// lists `W` from least to greatest in pushout numbering.
pub(crate) fn merge_chains(
    x_seq: &[usize],
    y_seq: &[usize],
    z_in_x: &[usize],
    po: &Pushout,
) -> Vec<usize> {
    let x_rank: Vec<usize> = rank_of(x_seq);
    let y_rank: Vec<usize> = rank_of(y_seq);
    let mut z_ranks: Vec<usize> = z_in_x.iter().map(|&x| x_rank[x]).collect();
    z_ranks.sort_unstable();
    let gap = |rank: usize| z_ranks.partition_point(|&r| r < rank);
    let z_set: std::collections::BTreeSet<usize> = z_in_x.iter().copied().collect();
    // (gap, 0 = gap member / 1 = common point, side, rank)
    let mut keyed: Vec<((usize, u8, u8, usize), usize)> = Vec::new();
    for (x, &r) in x_rank.iter().enumerate() {
        let key = if z_set.contains(&x) {
            (gap(r), 1, 0, 0)
        } else {
            (gap(r), 0, 0, r)
        };
        keyed.push((key, x));
    }
    let y_common: Vec<usize> = {
        let mut v: Vec<usize> = y_seq
            .iter()
            .filter(|&&y| po.y_to_w[y] < po.x_size)
            .map(|&y| y_rank[y])
            .collect();
        v.sort_unstable();
        v
    };
    for &y in &po.y_only {
        let r = y_rank[y];
        keyed.push(((y_common.partition_point(|&c| c < r), 0, 1, r), po.y_to_w[y]));
    }
    keyed.sort_unstable();
    keyed.into_iter().map(|(_, w)| w).collect()
}

fn rank_of(seq: &[usize]) -> Vec<usize> {
    let mut rank = vec![0; seq.len()];
    for (i, &e) in seq.iter().enumerate() {
        rank[e] = i;
    }
    rank
}

impl FraisseClass for LinearOrders {
    fn name(&self) -> String {
        "lo".into()
    }

    fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    fn check_member(&self, m: &FinStructure) -> Result<(), String> {
        check_linear(m, 0, &(0..m.size()).collect::<Vec<_>>())
    }

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
        let seq = merge_chains(&order_sequence(x, 0), &order_sequence(y, 0), f.map(), &po);
        Ok(Amalgam {
            structure: chain(&self.sig, &seq),
            left: po.left(),
            right: po.right(),
        })
    }

    /// New points go above everything, in index order.
    fn generic_extend(&self, m: &FinStructure, k: usize) -> Result<(FinStructure, Embedding), ClassError> {
        let mut seq = order_sequence(m, 0);
        seq.extend(m.size()..m.size() + k);
        Ok((chain(&self.sig, &seq), Embedding::identity(m.size())))
    }

    fn claims_disjoint(&self) -> bool {
        true
    }

    fn type_candidates(&self, n: usize) -> Vec<FinStructure> {
        vec![self.chain(n)]
    }

    fn labeled_members(&self, n: usize) -> Vec<FinStructure> {
        all_permutations(n)
            .iter()
            .map(|p| self.from_sequence(p))
            .collect()
    }
}

/// Bipartite graphs with sides `L`, `R` and symmetric cross edges `adj`.
#[derive(Debug, Clone)]
pub struct BipartiteGraphs {
    sig: Arc<Signature>,
}

impl BipartiteGraphs {
    pub fn new() -> Self {
        BipartiteGraphs {
            sig: Signature::of(&[("L", 1), ("R", 1), ("adj", 2)], &[]),
        }
    }

    /// Graph with `left` L-points followed by `right` R-points and the given
    /// cross edges `(l, r)`, `r` counted from the first R-point.
    pub fn graph(&self, left: usize, right: usize, edges: &[(usize, usize)]) -> FinStructure {
        let mut m = FinStructure::new(self.sig.clone(), left + right);
        for x in 0..left {
            m.insert(0, &[x]);
        }
        for x in left..left + right {
            m.insert(1, &[x]);
        }
        for &(l, r) in edges {
            m.insert(2, &[l, left + r]);
            m.insert(2, &[left + r, l]);
        }
        m
    }
}

impl Default for BipartiteGraphs {
    fn default() -> Self {
        Self::new()
    }
}

/// Sides partition the universe; `adj` is symmetric and only crosses sides.
pub(crate) fn check_bipartite(m: &FinStructure, l: usize, r: usize, adj: usize) -> Result<(), String> {
    for x in 0..m.size() {
        if m.holds(l, &[x]) == m.holds(r, &[x]) {
            return Err(format!("element {x} is not on exactly one side"));
        }
    }
    for t in m.tuples(adj) {
        let (a, b) = (t[0], t[1]);
        if !m.holds(adj, &[b, a]) {
            return Err(format!("adj({a},{b}) without adj({b},{a})"));
        }
        if m.holds(l, &[a]) == m.holds(l, &[b]) {
            return Err(format!("adj({a},{b}) inside one side"));
        }
    }
    Ok(())
}

impl FraisseClass for BipartiteGraphs {
    fn name(&self) -> String {
        "bipartite".into()
    }

    fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    fn check_member(&self, m: &FinStructure) -> Result<(), String> {
        check_bipartite(m, 0, 1, 2)
    }

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
        Ok(Amalgam {
            structure: po.union(x, y),
            left: po.left(),
            right: po.right(),
        })
    }

    /// New isolated `L`-points.
    fn generic_extend(&self, m: &FinStructure, k: usize) -> Result<(FinStructure, Embedding), ClassError> {
        let mut w = m.grown(k);
        for x in m.size()..m.size() + k {
            w.insert(0, &[x]);
        }
        Ok((w, Embedding::identity(m.size())))
    }

    fn claims_disjoint(&self) -> bool {
        true
    }

    fn type_candidates(&self, n: usize) -> Vec<FinStructure> {
        let mut out = Vec::new();
        for left in 0..=n {
            let right = n - left;
            let pairs: Vec<(usize, usize)> = (0..left)
                .flat_map(|l| (0..right).map(move |r| (l, r)))
                .collect();
            for mask in 0u64..(1u64 << pairs.len()) {
                let edges: Vec<(usize, usize)> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &p)| p)
                    .collect();
                out.push(self.graph(left, right, &edges));
            }
        }
        out
    }

    fn labeled_members(&self, n: usize) -> Vec<FinStructure> {
        let mut out = Vec::new();
        for sides in 0u32..(1 << n) {
            let lefts: Vec<usize> = (0..n).filter(|&i| sides >> i & 1 == 1).collect();
            let rights: Vec<usize> = (0..n).filter(|&i| sides >> i & 1 == 0).collect();
            let pairs: Vec<(usize, usize)> = lefts
                .iter()
                .flat_map(|&l| rights.iter().map(move |&r| (l, r)))
                .collect();
            for mask in 0u64..(1u64 << pairs.len()) {
                let mut m = FinStructure::new(self.sig.clone(), n);
                for &l in &lefts {
                    m.insert(0, &[l]);
                }
                for &r in &rights {
                    m.insert(1, &[r]);
                }
                for (i, &(l, r)) in pairs.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        m.insert(2, &[l, r]);
                        m.insert(2, &[r, l]);
                    }
                }
                out.push(m);
            }
        }
        out
    }
}
