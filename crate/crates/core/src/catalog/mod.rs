//! The concrete classes: pure sets, linear orders, bipartite graphs,
//! rotating machines, diversifications and mixed sums, plus a registry that
//! resolves class names such as `divg:lo:S3` or `mix:sets:lo`.

mod basic;
mod cp;
mod diversify;
mod mixed;
mod rotating;

use std::sync::Arc;

pub use basic::{check_linear, order_sequence, BipartiteGraphs, LinearOrders, PureSets};
pub use cp::{consumer_products, cp_model, cp_preference_distinct, distinct_among, preference};
pub use diversify::{
    diversify, diversify_with_action, plain_types, Diversification, FixedPart, OrbitCompletion,
};
pub use mixed::{mixed_sum, MixedSum, Side};
pub use rotating::{compositions, diagonal_orbits, layouts_of, wheels, Layout, RotatingMachines};

use crate::fraisse::{ClassError, ClassRef};
use crate::groups::GroupTable;

/// Resolves a registry name. Grammar: `sets | lo | bipartite | rot |
/// div:<class> | divg:<class>:<group> | mix:<class>:<class>`, where a group
/// is `Zn`, `Sn`, `cyclic:n`, `sym:n` or `prod:<g>,<h>` (last).
pub fn class_by_name(name: &str) -> Result<ClassRef, ClassError> {
    let tokens: Vec<&str> = name.split(':').collect();
    let (class, used) = parse_class(&tokens).ok_or_else(|| ClassError::UnknownClass(name.into()))??;
    if used != tokens.len() {
        return Err(ClassError::UnknownClass(name.into()));
    }
    Ok(class)
}

type Parsed = Option<Result<(ClassRef, usize), ClassError>>;

fn parse_class(tokens: &[&str]) -> Parsed {
    let head = *tokens.first()?;
    let leaf = |c: ClassRef| Some(Ok((c, 1)));
    match head {
        "sets" => leaf(Arc::new(PureSets::new())),
        "lo" => leaf(Arc::new(LinearOrders::new())),
        "bipartite" => leaf(Arc::new(BipartiteGraphs::new())),
        "rot" => leaf(Arc::new(RotatingMachines::new())),
        "div" => {
            let (base, used) = match parse_class(&tokens[1..])? {
                Ok(p) => p,
                Err(e) => return Some(Err(e)),
            };
            Some(diversify(base).map(|d| (Arc::new(d) as ClassRef, used + 1)))
        }
        "divg" => {
            let (base, used) = match parse_class(&tokens[1..])? {
                Ok(p) => p,
                Err(e) => return Some(Err(e)),
            };
            let rest = &tokens[1 + used..];
            let (group, g_used) = match parse_group(rest)? {
                Ok(p) => p,
                Err(e) => return Some(Err(e)),
            };
            Some(
                diversify_with_action(base, group)
                    .map(|d| (Arc::new(d) as ClassRef, 1 + used + g_used)),
            )
        }
        "mix" => {
            let (left, l_used) = match parse_class(&tokens[1..])? {
                Ok(p) => p,
                Err(e) => return Some(Err(e)),
            };
            let (right, r_used) = match parse_class(&tokens[1 + l_used..])? {
                Ok(p) => p,
                Err(e) => return Some(Err(e)),
            };
            Some(mixed_sum(left, right).map(|m| (Arc::new(m) as ClassRef, 1 + l_used + r_used)))
        }
        _ => None,
    }
}

fn parse_group(tokens: &[&str]) -> Option<Result<(GroupTable, usize), ClassError>> {
    let head = *tokens.first()?;
    let (spec, used) = match head {
        "cyclic" | "sym" => (format!("{head}:{}", tokens.get(1)?), 2),
        "prod" => (tokens.join(":"), tokens.len()),
        _ => (head.to_string(), 1),
    };
    Some(
        GroupTable::by_name(&spec)
            .map(|g| (g, used))
            .map_err(ClassError::from),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_round_trip() {
        for name in ["sets", "lo", "bipartite", "rot", "div:lo", "divg:lo:Z2", "divg:lo:S3", "mix:sets:lo"] {
            assert_eq!(class_by_name(name).unwrap().name(), name);
        }
        assert_eq!(class_by_name("divg:lo:cyclic:3").unwrap().name(), "divg:lo:Z3");
        assert_eq!(class_by_name("divg:lo:sym:3").unwrap().name(), "divg:lo:S3");
        assert_eq!(class_by_name("mix:lo:div:lo").unwrap().name(), "mix:lo:div:lo");
    }

    #[test]
    fn registry_rejections() {
        assert!(matches!(class_by_name("nope"), Err(ClassError::UnknownClass(_))));
        assert!(class_by_name("lo:lo").is_err());
        assert!(class_by_name("div").is_err());
        assert!(class_by_name("div:rot").is_err());
        assert!(class_by_name("divg:lo:Q8").is_err());
    }
}
