//! Exact symbolic verification of the Benoit-Saint-Aubin null-vector
//! operator identities, plus two independent oracles.
//!
//! The engine expands the order-r operator (a weighted sum over integer
//! compositions of r) against an abstract term algebra of P/Q symbols with
//! coefficients in the field of rational functions of the coupling, and
//! proves by exact arithmetic that every coefficient of the expansion
//! cancels. Two oracles confirm the statement through entirely different
//! routes: a nilpotent truncated-Taylor computation applies the raw
//! differential operators to the power-product integrand at random rational
//! points, and an adaptive-quadrature computation differentiates screened
//! Coulomb-type integrals under the integral sign with purely imaginary
//! parameters.

// Index arithmetic over 1-based insertion slots reads better as ranges.
#![allow(clippy::needless_range_loop)]

pub mod bsa;
pub mod evalconfig;
pub mod jet;
mod lowering;
pub mod nilpotent;
pub mod oracle_coulomb;
pub mod oracle_jet;
pub mod quadrature;
pub mod ratfunc;
pub mod termalg;
pub mod virasoro;

pub use ratfunc::{chi, conformal_weight, degenerate_weight, q_charge, ChiMode, RatFunc};
pub use termalg::{canonicalize, LinComb, TermKey};
