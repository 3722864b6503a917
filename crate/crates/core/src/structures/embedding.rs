use std::fmt;

use super::FinStructure;

/// An injective map between universes that preserves and reflects every
/// relation and commutes with every function. The structures it relates are
/// passed alongside; the embedding only owns the element map.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Embedding {
    map: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbeddingViolation {
    SignatureMismatch,
    WrongDomainSize { expected: usize, found: usize },
    ImageOutOfRange { element: usize, image: usize },
    NotInjective { image: usize },
    NotPreserved { relation: String, tuple: Vec<usize> },
    NotReflected { relation: String, tuple: Vec<usize> },
    NotCommuting { function: String, element: usize },
}

impl fmt::Display for EmbeddingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SignatureMismatch => write!(f, "signature mismatch"),
            Self::WrongDomainSize { expected, found } => {
                write!(f, "map has {found} entries, domain has {expected}")
            }
            Self::ImageOutOfRange { element, image } => {
                write!(f, "{element} maps to {image}, outside the codomain")
            }
            Self::NotInjective { image } => write!(f, "two elements map to {image}"),
            Self::NotPreserved { relation, tuple } => {
                write!(f, "{relation}{tuple:?} not preserved")
            }
            Self::NotReflected { relation, tuple } => {
                write!(f, "{relation}{tuple:?} not reflected")
            }
            Self::NotCommuting { function, element } => {
                write!(f, "{function} does not commute at {element}")
            }
        }
    }
}

impl Embedding {
    pub fn new(map: Vec<usize>) -> Self {
        Embedding { map }
    }

    pub fn identity(n: usize) -> Self {
        Embedding {
            map: (0..n).collect(),
        }
    }

    pub fn empty() -> Self {
        Embedding { map: Vec::new() }
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn into_map(self) -> Vec<usize> {
        self.map
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// `self` after `first`: x ↦ self(first(x)).
    pub fn after(&self, first: &Embedding) -> Embedding {
        Embedding {
            map: first.map.iter().map(|&y| self.map[y]).collect(),
        }
    }

    pub fn image(&self) -> Vec<usize> {
        let mut img = self.map.clone();
        img.sort_unstable();
        img
    }

    pub fn is_bijective_onto(&self, n: usize) -> bool {
        self.map.len() == n && {
            let mut seen = vec![false; n];
            self.map
                .iter()
                .all(|&y| y < n && !std::mem::replace(&mut seen[y], true))
        }
    }

    /// Checks every embedding invariant directly against the tables (no
    /// search), reporting the first violation.
    pub fn check(&self, dom: &FinStructure, cod: &FinStructure) -> Result<(), EmbeddingViolation> {
        if !dom.same_signature(cod) {
            return Err(EmbeddingViolation::SignatureMismatch);
        }
        if self.map.len() != dom.size() {
            return Err(EmbeddingViolation::WrongDomainSize {
                expected: dom.size(),
                found: self.map.len(),
            });
        }
        let mut preimage = vec![usize::MAX; cod.size()];
        for (x, &y) in self.map.iter().enumerate() {
            if y >= cod.size() {
                return Err(EmbeddingViolation::ImageOutOfRange { element: x, image: y });
            }
            if preimage[y] != usize::MAX {
                return Err(EmbeddingViolation::NotInjective { image: y });
            }
            preimage[y] = x;
        }
        let sig = dom.signature();
        for (r, sym) in sig.relations().iter().enumerate() {
            for t in dom.tuples(r) {
                let img: Vec<usize> = t.iter().map(|&e| self.map[e]).collect();
                if !cod.holds(r, &img) {
                    return Err(EmbeddingViolation::NotPreserved {
                        relation: sym.name.clone(),
                        tuple: t.to_vec(),
                    });
                }
            }
            // reflection: every codomain tuple inside the image comes from
            // dom; walk whichever side is smaller
            let reflected = |pre: &[usize]| {
                let img: Vec<usize> = pre.iter().map(|&e| self.map[e]).collect();
                !cod.holds(r, &img) || dom.holds(r, pre)
            };
            let image_tuples = dom.size().checked_pow(sym.arity as u32).unwrap_or(usize::MAX);
            let bad = if image_tuples <= cod.tuple_count(r) {
                let mut pre = vec![0; sym.arity];
                let mut bad = None;
                if dom.size() > 0 || sym.arity == 0 {
                    loop {
                        if !reflected(&pre) {
                            bad = Some(pre.clone());
                            break;
                        }
                        let Some(i) = (0..sym.arity).rev().find(|&i| pre[i] + 1 < dom.size()) else {
                            break;
                        };
                        pre[i] += 1;
                        for p in &mut pre[i + 1..] {
                            *p = 0;
                        }
                    }
                }
                bad
            } else {
                cod.tuples(r)
                    .filter(|t| t.iter().all(|&e| preimage[e] != usize::MAX))
                    .map(|t| t.iter().map(|&e| preimage[e]).collect::<Vec<_>>())
                    .find(|pre| !dom.holds(r, pre))
            };
            if let Some(tuple) = bad {
                return Err(EmbeddingViolation::NotReflected {
                    relation: sym.name.clone(),
                    tuple,
                });
            }
        }
        for (f, name) in sig.functions().iter().enumerate() {
            for x in 0..dom.size() {
                if self.map[dom.fun(f, x)] != cod.fun(f, self.map[x]) {
                    return Err(EmbeddingViolation::NotCommuting {
                        function: name.clone(),
                        element: x,
                    });
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.map.iter().map(|y| y.to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}
