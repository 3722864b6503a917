use std::fmt;

use super::perm::all_permutations;
use super::GroupError;

/// An abstract finite group given by its multiplication table. Index 0 is the
/// identity; `mul(a, b)` is the product `ab`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    name: String,
    table: Vec<Vec<usize>>,
}

impl GroupTable {
    /// Validates identity at 0, closure, inverses and associativity.
    pub fn new(name: impl Into<String>, table: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let g = GroupTable {
            name: name.into(),
            table,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<(), GroupError> {
        let m = self.table.len();
        if m == 0 {
            return Err(GroupError::InvalidTable("empty table".into()));
        }
        for (a, row) in self.table.iter().enumerate() {
            if row.len() != m {
                return Err(GroupError::InvalidTable(format!("row {a} has wrong length")));
            }
            if let Some(&c) = row.iter().find(|&&c| c >= m) {
                return Err(GroupError::InvalidTable(format!("entry {c} out of range")));
            }
        }
        for a in 0..m {
            if self.table[0][a] != a || self.table[a][0] != a {
                return Err(GroupError::InvalidTable(format!(
                    "0 is not an identity at {a}"
                )));
            }
            if !(0..m).any(|b| self.table[a][b] == 0 && self.table[b][a] == 0) {
                return Err(GroupError::InvalidTable(format!("{a} has no inverse")));
            }
        }
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]] {
                        return Err(GroupError::InvalidTable(format!(
                            "associativity fails at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn trivial() -> Self {
        GroupTable {
            name: "Z1".into(),
            table: vec![vec![0]],
        }
    }

    pub fn cyclic(n: usize) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::InvalidTable("cyclic group of order 0".into()));
        }
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Ok(GroupTable {
            name: format!("Z{n}"),
            table,
        })
    }

    /// `S_n` on lexicographically ordered permutations; `ab` applies `a` first.
    pub fn symmetric(n: usize) -> Result<Self, GroupError> {
        if n == 0 || n > 6 {
            return Err(GroupError::InvalidTable(format!(
                "symmetric group S{n} outside the supported range 1..=6"
            )));
        }
        let perms = all_permutations(n);
        let index = |p: &[usize]| perms.binary_search_by(|q| q.as_slice().cmp(p)).unwrap();
        let table = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| {
                        let ab: Vec<usize> = a.iter().map(|&x| b[x]).collect();
                        index(&ab)
                    })
                    .collect()
            })
            .collect();
        Ok(GroupTable {
            name: format!("S{n}"),
            table,
        })
    }

    /// Direct product; element `(i, j)` has index `i * |right| + j`.
    pub fn product(left: &GroupTable, right: &GroupTable) -> Self {
        let (m, k) = (left.order(), right.order());
        let table = (0..m * k)
            .map(|a| {
                (0..m * k)
                    .map(|b| left.mul(a / k, b / k) * k + right.mul(a % k, b % k))
                    .collect()
            })
            .collect();
        GroupTable {
            name: format!("{}x{}", left.name, right.name),
            table,
        }
    }

    /// Resolves `Z<n>`, `S<n>`, `cyclic:<n>`, `sym:<n>`, `prod:<g>,<h>`.
    pub fn by_name(spec: &str) -> Result<Self, GroupError> {
        let unknown = || GroupError::UnknownGroup(spec.to_string());
        if let Some(rest) = spec.strip_prefix("prod:") {
            let (a, b) = split_top_level(rest).ok_or_else(unknown)?;
            return Ok(GroupTable::product(&Self::by_name(a)?, &Self::by_name(b)?));
        }
        let (kind, n) = if let Some(n) = spec.strip_prefix("cyclic:") {
            ("Z", n)
        } else if let Some(n) = spec.strip_prefix("sym:") {
            ("S", n)
        } else if let Some(n) = spec.strip_prefix('Z') {
            ("Z", n)
        } else if let Some(n) = spec.strip_prefix('S') {
            ("S", n)
        } else {
            return Err(unknown());
        };
        let n: usize = n.parse().map_err(|_| unknown())?;
        match kind {
            "Z" => Self::cyclic(n),
            _ => Self::symmetric(n),
        }
    }

    /// Text format: `order <m>` then `mul <i> <j> <k>` lines; `#` comments.
    pub fn parse(text: &str) -> Result<Self, GroupError> {
        let mut table: Option<Vec<Vec<Option<usize>>>> = None;
        for (idx, raw) in text.lines().enumerate() {
            let bad = |msg: &str| GroupError::Parse {
                line: idx + 1,
                message: msg.to_string(),
            };
            let toks: Vec<&str> = raw.split('#').next().unwrap_or("").split_whitespace().collect();
            match toks.as_slice() {
                [] => {}
                ["order", m] => {
                    if table.is_some() {
                        return Err(bad("duplicate `order`"));
                    }
                    let m: usize = m.parse().map_err(|_| bad("bad order"))?;
                    table = Some(vec![vec![None; m]; m]);
                }
                ["mul", i, j, k] => {
                    let t = table.as_mut().ok_or_else(|| bad("`mul` before `order`"))?;
                    let m = t.len();
                    let parse = |s: &str| -> Result<usize, GroupError> {
                        s.parse::<usize>()
                            .ok()
                            .filter(|&v| v < m)
                            .ok_or_else(|| bad("index out of range"))
                    };
                    let (i, j, k) = (parse(i)?, parse(j)?, parse(k)?);
                    if t[i][j].replace(k).is_some() {
                        return Err(bad("product defined twice"));
                    }
                }
                _ => return Err(bad("expected `order <m>` or `mul <i> <j> <k>`")),
            }
        }
        let t = table.ok_or(GroupError::Parse {
            line: 0,
            message: "missing `order`".into(),
        })?;
        let full = t
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                row.into_iter()
                    .enumerate()
                    .map(|(j, v)| {
                        v.ok_or_else(|| {
                            GroupError::InvalidTable(format!("product {i}·{j} undefined"))
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        GroupTable::new("table", full)
    }

    pub fn write(&self) -> String {
        let mut out = format!("order {}\n", self.order());
        for (i, row) in self.table.iter().enumerate() {
            for (j, k) in row.iter().enumerate() {
                out.push_str(&format!("mul {i} {j} {k}\n"));
            }
        }
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.order()).find(|&b| self.table[a][b] == 0).unwrap()
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|a| (0..self.order()).all(|b| self.mul(a, b) == self.mul(b, a)))
    }
}

impl fmt::Display for GroupTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// Splits `a,b` at the first comma outside nested `prod:` operands.
fn split_top_level(s: &str) -> Option<(&str, &str)> {
    if s.starts_with("prod:") {
        // nested product on the left: find the comma that closes it
        let inner = &s[5..];
        let (_, rest) = split_top_level(inner)?;
        let right_start = s.len() - rest.len();
        let rest_split = rest.find(',')?;
        let cut = right_start + rest_split;
        return Some((&s[..cut], &s[cut + 1..]));
    }
    let i = s.find(',')?;
    Some((&s[..i], &s[i + 1..]))
}
