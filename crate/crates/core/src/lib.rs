//! Novikov and Hom-Novikov algebras over exact coefficients.
//!
//! Structure constants, identity checkers, the Yau twist and its relatives,
//! morphism families with branch-wise verification, finite-field enumeration,
//! a text catalog of the low-dimensional classification, and a sampled check
//! on the infinite-dimensional polynomial examples.

pub mod algebra;
pub mod axioms;
pub mod catalog;
pub mod constructions;
pub mod free_examples;
pub mod morphisms;
pub mod par;
pub mod scalars;
