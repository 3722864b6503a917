//! Line-based text format for finite structures.
//!
//! ```text
//! sig rel <name> <arity>
//! sig fun <name>
//! size <n>
//! rel <name> <i1> ... <ik>
//! fun <name> <i> <j>
//! ```
//!
//! `#` starts a comment. Declarations come first, then `size`, then the
//! tables. Every function must list each element exactly once.

use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use super::{FinStructure, Signature};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

fn number(line: usize, tok: &str) -> Result<usize, ParseError> {
    tok.parse::<usize>()
        .or_else(|_| err(line, format!("expected a non-negative integer, found `{tok}`")))
}

pub fn parse_structure(text: &str) -> Result<FinStructure, ParseError> {
    let mut relations: Vec<(String, usize)> = Vec::new();
    let mut functions: Vec<String> = Vec::new();
    let mut structure: Option<FinStructure> = None;
    let mut defined: Vec<Vec<bool>> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        let Some((&head, rest)) = toks.split_first() else {
            continue;
        };
        match head {
            "sig" => {
                if structure.is_some() {
                    return err(line, "`sig` after `size`");
                }
                match rest {
                    ["rel", name, arity] => relations.push((name.to_string(), number(line, arity)?)),
                    ["fun", name] => functions.push(name.to_string()),
                    _ => return err(line, "expected `sig rel <name> <arity>` or `sig fun <name>`"),
                }
            }
            "size" => {
                if structure.is_some() {
                    return err(line, "duplicate `size`");
                }
                let [n] = rest else {
                    return err(line, "expected `size <n>`");
                };
                let n = number(line, n)?;
                let sig = Signature::new(relations.clone(), functions.clone())
                    .or_else(|e| err(line, e.to_string()))?;
                defined = vec![vec![false; n]; sig.functions().len()];
                structure = Some(FinStructure::new(Arc::new(sig), n));
            }
            "rel" => {
                let Some(m) = structure.as_mut() else {
                    return err(line, "`rel` before `size`");
                };
                let Some((name, args)) = rest.split_first() else {
                    return err(line, "expected `rel <name> <entries>`");
                };
                let Some(r) = m.signature().relation_index(name) else {
                    return err(line, format!("unknown relation `{name}`"));
                };
                let arity = m.signature().relations()[r].arity;
                if args.len() != arity {
                    return err(
                        line,
                        format!("relation `{name}` has arity {arity}, got {} entries", args.len()),
                    );
                }
                let tuple = args
                    .iter()
                    .map(|t| number(line, t))
                    .collect::<Result<Vec<_>, _>>()?;
                if let Some(&e) = tuple.iter().find(|&&e| e >= m.size()) {
                    return err(line, format!("entry {e} out of range"));
                }
                m.insert(r, &tuple);
            }
            "fun" => {
                let Some(m) = structure.as_mut() else {
                    return err(line, "`fun` before `size`");
                };
                let [name, x, y] = rest else {
                    return err(line, "expected `fun <name> <i> <j>`");
                };
                let Some(f) = m.signature().function_index(name) else {
                    return err(line, format!("unknown function `{name}`"));
                };
                let (x, y) = (number(line, x)?, number(line, y)?);
                if x >= m.size() || y >= m.size() {
                    return err(line, "function entry out of range");
                }
                if std::mem::replace(&mut defined[f][x], true) {
                    return err(line, format!("`{name}` defined twice at {x}"));
                }
                m.set_fun(f, x, y);
            }
            other => return err(line, format!("unknown directive `{other}`")),
        }
    }

    let Some(m) = structure else {
        return err(text.lines().count().max(1), "missing `size`");
    };
    for (f, name) in m.signature().functions().iter().enumerate() {
        if let Some(x) = defined[f].iter().position(|d| !d) {
            return err(
                text.lines().count().max(1),
                format!("function `{name}` undefined at {x}"),
            );
        }
    }
    Ok(m)
}

/// Canonical serialization: declarations in signature order, tuples in
/// sorted order, function graphs by argument.
pub fn write_structure(m: &FinStructure) -> String {
    let mut out = String::new();
    let sig = m.signature();
    for r in sig.relations() {
        let _ = writeln!(out, "sig rel {} {}", r.name, r.arity);
    }
    for f in sig.functions() {
        let _ = writeln!(out, "sig fun {f}");
    }
    let _ = writeln!(out, "size {}", m.size());
    for (r, sym) in sig.relations().iter().enumerate() {
        for t in m.tuples(r) {
            let _ = write!(out, "rel {}", sym.name);
            for e in t {
                let _ = write!(out, " {e}");
            }
            out.push('\n');
        }
    }
    for (f, name) in sig.functions().iter().enumerate() {
        for x in 0..m.size() {
            let _ = writeln!(out, "fun {name} {x} {}", m.fun(f, x));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const WHEEL: &str = "\
# a 3-wheel
sig rel lt 2
sig rel adj 2
sig fun s
size 3
fun s 0 1
fun s 1 2
fun s 2 0
";

    #[test]
    fn parses_and_round_trips() {
        let m = parse_structure(WHEEL).unwrap();
        assert_eq!(m.size(), 3);
        assert_eq!(m.fun(0, 2), 0);
        assert_eq!(parse_structure(&write_structure(&m)).unwrap(), m);
    }

    #[test]
    fn rejects_unknown_directive() {
        let e = parse_structure("size 1\nfoo 1\n").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn rejects_arity_mismatch() {
        assert!(parse_structure("sig rel lt 2\nsize 2\nrel lt 0\n").is_err());
    }

    #[test]
    fn rejects_partial_function() {
        let text = "sig fun s\nsize 2\nfun s 0 1\n";
        let e = parse_structure(text).unwrap_err();
        assert!(e.message.contains("undefined at 1"));
    }

    #[test]
    fn rejects_double_definition_and_range() {
        assert!(parse_structure("sig fun s\nsize 1\nfun s 0 0\nfun s 0 0\n").is_err());
        assert!(parse_structure("sig rel p 1\nsize 1\nrel p 1\n").is_err());
        assert!(parse_structure("sig rel p 1\n").is_err());
    }
}
