use rayon::prelude::*;

use super::{check, law_checks, run_checks, Bounds, Outcome, SuiteReport};
use crate::catalog::{compositions, layouts_of, RotatingMachines};
use crate::groups::{identify, invariant_factors_of_product, PermGroup};
use crate::structures::{automorphisms, automorphisms_with_cap};

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `Aut(gadget(n, k))` by search.
pub fn gadget_automorphisms(n: usize, k: usize) -> Result<PermGroup, String> {
    let m = RotatingMachines::new().gadget(n, k).map_err(|e| e.to_string())?;
    automorphisms_with_cap(&m, n + n * k).map_err(|e| e.to_string())
}

/// Orders of the gadget automorphisms that move some point of `C`, which
/// occupies indices `0..n`.
pub fn orders_nontrivial_on_c(aut: &PermGroup, n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = aut
        .elements()
        .iter()
        .filter(|p| (0..n).any(|x| !p.fixes(x)))
        .map(|p| p.order())
        .collect();
    out.sort_unstable();
    out
}

/// Element orders predicted by rotation pairs: rotating `D` by `b` forces
/// `C` to rotate by `b mod n`, so the order is that of `b` in `Z_{nk}`.
pub fn predicted_gadget_orders(n: usize, k: usize) -> Vec<usize> {
    let m = n * k;
    let mut out: Vec<usize> = (0..m).map(|b| m / gcd(b, m)).collect();
    out.sort_unstable();
    out
}

fn gadget_cyclic(max_n: usize, max_k: usize) -> Outcome {
    let mut failures = Vec::new();
    let mut tested = 0;
    for n in 1..=max_n {
        for k in 1..=max_k {
            tested += 1;
            match gadget_automorphisms(n, k) {
                Err(e) => failures.push(format!("gadget({n},{k}): {e}")),
                Ok(g) => {
                    let id = identify(&g);
                    if !id.is_cyclic || id.order != n * k {
                        failures.push(format!("gadget({n},{k}): {id}, expected cyclic order {}", n * k));
                    }
                    let mut orders = id.element_orders.clone();
                    orders.sort_unstable();
                    if orders != predicted_gadget_orders(n, k) {
                        failures.push(format!("gadget({n},{k}): element orders {orders:?} differ from rotation pairs"));
                    }
                }
            }
        }
    }
    Outcome::tally(format!("{tested} gadgets, n <= {max_n}, k <= {max_k}"), failures)
}

/// The finite content of torsion-freeness: an automorphism of finite order
/// dividing `k` cannot move `C`.
fn gadget_no_small_order(max_n: usize, max_k: usize) -> Outcome {
    let mut failures = Vec::new();
    let mut tested = 0;
    for n in 1..=max_n {
        for k in 2..=max_k {
            tested += 1;
            match gadget_automorphisms(n, k) {
                Err(e) => failures.push(format!("gadget({n},{k}): {e}")),
                Ok(g) => {
                    if let Some(o) = orders_nontrivial_on_c(&g, n).into_iter().find(|o| k % o == 0) {
                        failures.push(format!("gadget({n},{k}): element moving C has order {o} dividing {k}"));
                    }
                }
            }
        }
    }
    Outcome::tally(format!("{tested} gadgets, n <= {max_n}, 2 <= k <= {max_k}"), failures)
}

/// Brute-force `Aut` of every machine up to `max_size`, one canonical layout
/// per isomorphism type.
pub(crate) fn all_machines_abelian(max_size: usize) -> Outcome {
    let rot = RotatingMachines::new();
    let shapes: Vec<Vec<usize>> = (0..=max_size).flat_map(compositions).collect();
    let (count, failures) = shapes
        .par_iter()
        .map(|sizes| {
            let mut count = 0usize;
            let mut failures = Vec::new();
            for layout in layouts_of(sizes).filter(|l| l.is_canonical()) {
                count += 1;
                let m = rot.from_layout(&layout);
                match automorphisms(&m) {
                    Ok(g) if g.is_abelian() => {}
                    Ok(g) => failures.push(format!("{layout:?}: non-abelian of order {}", g.order())),
                    Err(e) => failures.push(format!("{layout:?}: {e}")),
                }
            }
            (count, failures)
        })
        .reduce(
            || (0, Vec::new()),
            |(c1, mut f1), (c2, f2)| {
                f1.extend(f2);
                (c1 + c2, f1)
            },
        );
    Outcome::tally(format!("{count} machines, |M| <= {max_size}"), failures)
}

/// Edge-free stacks of distinct wheel sizes up to `max_wheel`.
fn edge_free_products(max_wheel: usize) -> Outcome {
    let rot = RotatingMachines::new();
    let mut failures = Vec::new();
    let mut tested = 0;
    for mask in 1u32..1 << max_wheel {
        let sizes: Vec<usize> = (1..=max_wheel).filter(|&s| mask >> (s - 1) & 1 == 1).collect();
        let total: usize = sizes.iter().sum();
        tested += 1;
        let m = rot.wheel_stack(&sizes);
        match automorphisms_with_cap(&m, total) {
            Err(e) => failures.push(format!("wheels {sizes:?}: {e}")),
            Ok(g) => {
                let id = identify(&g);
                let expected = invariant_factors_of_product(&sizes);
                let order: usize = sizes.iter().product();
                if !id.is_abelian || id.order != order || id.invariant_factors.as_ref() != Some(&expected) {
                    failures.push(format!("wheels {sizes:?}: {id}, expected factors {expected:?}"));
                }
            }
        }
    }
    Outcome::tally(format!("{tested} wheel sets of distinct sizes <= {max_wheel}"), failures)
}

fn wheels_cyclic(max_wheel: usize) -> Outcome {
    let rot = RotatingMachines::new();
    let failures = (1..=max_wheel + 1)
        .filter_map(|n| match automorphisms(&rot.wheel(n)) {
            Err(e) => Some(format!("wheel({n}): {e}")),
            Ok(g) => {
                let id = identify(&g);
                (!id.is_cyclic || id.order != n).then(|| format!("wheel({n}): {id}"))
            }
        })
        .collect();
    Outcome::tally(format!("wheels of size 1..={}", max_wheel + 1), failures)
}

pub fn suite_rotating_machines(bounds: &Bounds) -> SuiteReport {
    let b = bounds.clone();
    let mut checks = law_checks("rot", "rot", b.class_size);
    let (n, k, size, wheel) = (b.gadget_n, b.gadget_k, b.machine_size, b.wheel_size);
    checks.push(check("rot.gadget.cyclic", move || gadget_cyclic(n, k)));
    checks.push(check("rot.gadget.no-order-dividing-k", move || gadget_no_small_order(n, k)));
    checks.push(check("rot.machines.abelian", move || all_machines_abelian(size)));
    checks.push(check("rot.edge-free.products", move || edge_free_products(wheel)));
    checks.push(check("rot.wheels.cyclic", move || wheels_cyclic(wheel)));
    run_checks("rotating-machines", bounds, checks)
}
