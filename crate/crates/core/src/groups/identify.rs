use std::fmt;

use super::perm::{gcd, PermGroup};

/// Isomorphism-invariant summary of a finite group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupIdentity {
    pub order: usize,
    pub is_abelian: bool,
    pub is_cyclic: bool,
    /// `d_1 | d_2 | ... | d_r`, all `> 1`; present only for abelian groups.
    pub invariant_factors: Option<Vec<usize>>,
    /// Prime-power cyclic factors, ascending; abelian groups only.
    pub elementary_divisors: Option<Vec<usize>>,
    /// Sorted multiset of element orders.
    pub element_orders: Vec<usize>,
}

impl fmt::Display for GroupIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_cyclic {
            write!(f, "cyclic order {}", self.order)
        } else if self.is_abelian {
            write!(
                f,
                "abelian order {} invariant factors {:?}",
                self.order,
                self.invariant_factors.as_deref().unwrap_or(&[])
            )
        } else {
            write!(f, "order {} non-abelian", self.order)
        }
    }
}

pub fn element_orders(g: &PermGroup) -> Vec<usize> {
    let mut orders: Vec<usize> = g.elements().iter().map(|p| p.order()).collect();
    orders.sort_unstable();
    orders
}

pub fn has_element_of_order(g: &PermGroup, k: usize) -> bool {
    g.elements().iter().any(|p| p.order() == k)
}

pub fn identify(g: &PermGroup) -> GroupIdentity {
    identify_from(g.order(), g.is_abelian(), element_orders(g))
}

/// Builds the record from order data alone; the abelian flag must come from
/// the caller.
pub fn identify_from(order: usize, is_abelian: bool, mut orders: Vec<usize>) -> GroupIdentity {
    orders.sort_unstable();
    let is_cyclic = orders.last().copied() == Some(order);
    let (invariant_factors, elementary_divisors) = if is_abelian {
        let (inv, elem) = abelian_invariants(order, &orders);
        (Some(inv), Some(elem))
    } else {
        (None, None)
    };
    GroupIdentity {
        order,
        is_abelian,
        is_cyclic,
        invariant_factors,
        elementary_divisors,
        element_orders: orders,
    }
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut ps = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            ps.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        ps.push(n);
    }
    ps
}

/// Invariant factors and elementary divisors of an abelian group from its
/// element orders. For each prime `p`, the number of elements whose order
/// divides `p^i` is `p^(Σ_j min(λ_j, i))` where `λ` is the partition of the
/// `p`-primary part; successive quotients give the number of parts `≥ i`.
fn abelian_invariants(order: usize, orders: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut elementary = Vec::new();
    // per prime: exponents of the cyclic p-factors, descending
    let mut partitions: Vec<(usize, Vec<u32>)> = Vec::new();
    for p in prime_factors(order) {
        let mut counts = vec![1usize]; // elements of order dividing p^0
        let mut pk = 1usize;
        loop {
            pk *= p;
            let c = orders.iter().filter(|&&o| pk % o == 0).count();
            counts.push(c);
            if c == counts[counts.len() - 2] {
                counts.pop();
                break;
            }
        }
        // parts_at_least[i-1] = number of parts >= i
        let parts_at_least: Vec<u32> = counts
            .windows(2)
            .map(|w| (w[1] / w[0]).ilog(p))
            .collect();
        let num_parts = parts_at_least.first().copied().unwrap_or(0) as usize;
        let mut exps = vec![0u32; num_parts];
        for (i, &k) in parts_at_least.iter().enumerate() {
            for e in exps.iter_mut().take(k as usize) {
                *e = i as u32 + 1;
            }
        }
        for &e in &exps {
            elementary.push(p.pow(e));
        }
        partitions.push((p, exps));
    }
    elementary.sort_unstable();
    let width = partitions.iter().map(|(_, e)| e.len()).max().unwrap_or(0);
    let mut invariant = vec![1usize; width];
    for (p, exps) in &partitions {
        // largest exponents feed the largest factors
        for (slot, &e) in invariant.iter_mut().rev().zip(exps.iter()) {
            *slot *= p.pow(e);
        }
    }
    debug_assert!(invariant.windows(2).all(|w| w[1] % w[0] == 0));
    (invariant, elementary)
}

/// Invariant factors of `Z_{n_1} × ... × Z_{n_r}` straight from the cyclic
/// factors (Smith normal form of a diagonal matrix via gcd/lcm exchange).
pub fn invariant_factors_of_product(cyclic: &[usize]) -> Vec<usize> {
    let mut d: Vec<usize> = cyclic.iter().copied().filter(|&n| n > 1).collect();
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = gcd(d[i], d[j]);
            let l = d[i] / g * d[j];
            d[i] = g;
            d[j] = l;
        }
    }
    d.retain(|&n| n > 1);
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::Perm;

    fn cyclic_perm_group(n: usize) -> PermGroup {
        let elems = (0..n)
            .map(|k| Perm::new((0..n).map(|x| (x + k) % n).collect()).unwrap())
            .collect();
        PermGroup::from_elements(n, elems).unwrap()
    }

    #[test]
    fn element_orders_examples() {
        assert_eq!(element_orders(&PermGroup::trivial(3)), vec![1]);
        assert_eq!(element_orders(&PermGroup::symmetric(3)), vec![1, 2, 2, 2, 3, 3]);
        assert_eq!(element_orders(&cyclic_perm_group(4)), vec![1, 2, 4, 4]);
    }

    #[test]
    fn identify_cyclic_and_symmetric() {
        let c6 = identify(&cyclic_perm_group(6));
        assert!(c6.is_cyclic && c6.is_abelian);
        assert_eq!(c6.invariant_factors, Some(vec![6]));
        assert_eq!(c6.elementary_divisors, Some(vec![2, 3]));
        assert_eq!(c6.to_string(), "cyclic order 6");
        let s3 = identify(&PermGroup::symmetric(3));
        assert_eq!(s3.to_string(), "order 6 non-abelian");
        assert_eq!(s3.invariant_factors, None);
    }

    #[test]
    fn klein_four_and_friends() {
        // Z2 x Z2 orders {1,2,2,2}; Z2 x Z4 orders {1,2,2,2,4,4,4,4}
        let v4 = identify_from(4, true, vec![1, 2, 2, 2]);
        assert_eq!(v4.invariant_factors, Some(vec![2, 2]));
        assert!(!v4.is_cyclic);
        let z2z4 = identify_from(8, true, vec![1, 2, 2, 2, 4, 4, 4, 4]);
        assert_eq!(z2z4.invariant_factors, Some(vec![2, 4]));
        let trivial = identify_from(1, true, vec![1]);
        assert_eq!(trivial.invariant_factors, Some(vec![]));
        assert!(trivial.is_cyclic);
    }

    #[test]
    fn product_invariant_factors() {
        assert_eq!(invariant_factors_of_product(&[2, 3]), vec![6]);
        assert_eq!(invariant_factors_of_product(&[2, 4]), vec![2, 4]);
        assert_eq!(invariant_factors_of_product(&[4, 6]), vec![2, 12]);
        assert_eq!(invariant_factors_of_product(&[1, 1]), Vec::<usize>::new());
        assert_eq!(invariant_factors_of_product(&[2, 2, 3]), vec![2, 6]);
    }

    #[test]
    fn has_order_two() {
        assert!(has_element_of_order(&PermGroup::symmetric(2), 2));
        assert!(!has_element_of_order(&cyclic_perm_group(5), 2));
    }
}
