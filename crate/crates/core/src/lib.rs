//! Finite Swiss cheese sets and numerical checks of the derivation
//! `D(f)(g) = ∫_T f'(z) g(z) dz` on rational functions with poles off the set.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] builds and validates cheeses and their `Σ r / s²` certificate;
//! * [`rational`] represents `R_0(X)` with factored denominators;
//! * [`quadrature`] integrates over circles and provides a residue oracle;
//! * [`norms`] estimates `|f|_T` and `|f|_X` by boundary sampling;
//! * [`derivation`] evaluates `D` and checks the identities and inequalities around it;
//! * [`verify`] runs seeded sweeps and assembles reports, [`render`] draws SVGs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod derivation;
pub mod error;
pub mod geometry;
pub mod json;
pub mod norms;
pub mod quadrature;
pub mod rational;
pub mod render;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{annulus_budget, generate_cheese, AnnulusRecord, Disc, SwissCheese, Violation};
pub use num_complex::Complex64;
pub use quadrature::{IntegralResult, Orientation, QuadratureSpec};
pub use rational::{random_member, FamilySpec, Placement, PoleFactor, Polynomial, RationalFunction};
