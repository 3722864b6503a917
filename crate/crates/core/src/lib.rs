//! Workbench for finite homogeneous-structure theory: finite structures and
//! their automorphism groups, Fraïssé class checkers, finite approximations
//! of Fraïssé limits, and the class constructions (diversification, mixed
//! sums, rotating machines) whose limits have non-universal automorphism
//! groups.

pub mod catalog;
pub mod fraisse;
pub mod groups;
pub mod structures;
pub mod verify;
