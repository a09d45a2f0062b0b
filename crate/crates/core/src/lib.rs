//! Exact straightening-relation calculus for spherical functions on
//! nondegenerate Hermitian, symmetric and alternating matrix spaces over
//! p-adic fields.
//!
//! Everything here is exact symbolic computation: Laurent polynomials in a
//! single variable `u` over dyadic rationals, a noncommutative rewrite
//! engine for the straightening relations, the minuscule Hecke action
//! computed two independent ways, the free-module bases of the spherical
//! function spaces, the spherical-transform factorization identities, and
//! brute-force oracles over finite fields and truncated p-adic rings that
//! cross-check all of it at desk scale.
//!
//! Module map:
//! - [`coeff`]: scalars (Laurent polynomials in `u` over dyadics), case
//!   configuration.
//! - [`typmon`]: the graded type monoid, sparse elements, orbit types,
//!   translations, the normalized pairing.
//! - [`qcomb`]: q-Pochhammer symbols, q-binomials, inversion statistics,
//!   and the closed-form subspace counts.
//! - [`straighten`]: relation generators, rewrite rules, normal forms, the
//!   orbit quotient map, and the diamond-lemma confluence checker.
//! - [`hecke`]: translation operators, the minuscule operator families,
//!   the lattice-count action and its straightening-relation equivalent,
//!   and the adjoint action on normal-form words.
//! - [`structure`]: the centered-lexicographic preorder, the explicit free
//!   bases, triangular expansion over the Hecke algebra, and rank reports.
//! - [`transforms`]: spherical-transform factorization and recursion
//!   identities in the commutative translation-operator algebra.
//! - [`oracle`]: finite-field subspace enumeration and truncated p-adic
//!   lattice enumeration with Jordan splitting.
//! - [`suites`]: the end-to-end verification suites wired into the CLI and
//!   the acceptance tests.

pub mod coeff;
pub mod hecke;
pub mod oracle;
pub mod qcomb;
pub mod straighten;
pub mod structure;
pub mod suites;
pub mod transforms;
pub mod typmon;

pub use coeff::{Case, CaseConfig, CoeffError, Dyadic, Scalar, Sign};
pub use typmon::{Element, Letter, Monomial, OrbitCombination, OrbitType};
