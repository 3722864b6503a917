//! Finite permutation groups, abstract group tables, group actions and the
//! sign-flip gadgets on ℤ.

mod action;
mod identify;
mod intperm;
mod perm;
mod table;

use thiserror::Error;

pub use action::{acts_by_automorphisms, is_free_action, ActionViolation, FixedPoint, GAction};
pub use identify::{
    element_orders, has_element_of_order, identify, identify_from, invariant_factors_of_product,
    GroupIdentity,
};
pub use intperm::{h_embed, symdiff_compose, IntPermutation};
pub use perm::{all_permutations, Perm, PermGroup};
pub use table::GroupTable;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("not a permutation: {0:?}")]
    NotAPermutation(Vec<usize>),
    #[error("permutations of different degrees")]
    DegreeMismatch,
    #[error("element list lacks the identity")]
    MissingIdentity,
    #[error("element list not closed: {0}")]
    NotClosed(String),
    #[error("invalid group table: {0}")]
    InvalidTable(String),
    #[error("unknown group `{0}`")]
    UnknownGroup(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("action carrier has {carrier} points, structure has {structure}")]
    SizeMismatch { carrier: usize, structure: usize },
    #[error("h_A needs A ⊆ {{1, 2, ...}}, found {0}")]
    NonPositiveElement(i64),
}
