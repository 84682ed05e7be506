//! Families of pairwise graph-different permutations for distance graphs on the
//! natural numbers.
//!
//! Two permutations of `[n]` are *G-different* when some position carries the two
//! endpoints of an edge of `G`. For a difference set `D`, `T(n, D)` is the largest
//! size of a family of pairwise `G(D)`-different permutations. This crate provides
//! the explicit constructions, exact closed forms and bounds, an exact branch-and-bound
//! solver used as an oracle, and the residue-graph machinery linking `T` to the
//! capacity of a finite graph within a type.

pub mod arith;
pub mod bounds;
pub mod capacity;
pub mod constructions;
pub mod distance_sets;
pub mod error;
pub mod perm;
pub mod solver;

pub use bounds::{BoundReport, BoundValue, Provenance, SplitStrengthEstimate};
pub use capacity::{QuotientGraph, TypeVector};
pub use constructions::CosetPartition;
pub use distance_sets::{ex_valuation, DistanceSet, InducedGraph};
pub use error::{Error, Result};
pub use perm::{
    g_different, verify_family, verify_strong_certificate, PermFamily, Permutation, Relation,
    VerifyMode, VerifyReport, VerifyStatus,
};
pub use solver::{Budget, ConflictGraph, SolveResult};

pub use num_bigint::BigUint;
