#![allow(dead_code)]

use amalgam::catalog::class_by_name;
use amalgam::fraisse::{enumerate_members, ClassRef, FraisseClass};
use amalgam::structures::FinStructure;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Registry names covering every catalog signature.
pub const CLASSES: &[&str] = &["sets", "lo", "bipartite", "rot", "div:lo", "divg:lo:Z2", "mix:sets:lo"];

pub fn class(name: &str) -> ClassRef {
    class_by_name(name).expect("registered class")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A structure of the class signature with random tuples and total random
/// functions; not necessarily a member.
pub fn random_structure(class: &dyn FraisseClass, n: usize, seed: u64) -> FinStructure {
    let mut r = rng(seed);
    let sig = class.signature().clone();
    let mut m = FinStructure::new(sig.clone(), n);
    if n == 0 {
        return m;
    }
    for (rel, sym) in sig.relations().iter().enumerate() {
        let total = n.pow(sym.arity as u32);
        for code in 0..total {
            if r.gen_bool(0.3) {
                let tuple: Vec<usize> = (0..sym.arity).map(|i| code / n.pow(i as u32) % n).collect();
                m.insert(rel, &tuple);
            }
        }
    }
    for f in 0..sig.functions().len() {
        for x in 0..n {
            m.set_fun(f, x, r.gen_range(0..n));
        }
    }
    m
}

pub fn random_perm(n: usize, seed: u64) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(&mut rng(seed));
    p
}

/// A randomly relabelled member of size `n`, if the class has one.
pub fn random_member(class: &dyn FraisseClass, n: usize, seed: u64) -> Option<FinStructure> {
    let members = enumerate_members(class, n).expect("enumeration");
    let m = members.choose(&mut rng(seed))?;
    Some(m.relabel(&random_perm(n, seed ^ 0x9e37)))
}
