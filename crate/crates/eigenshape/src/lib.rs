//! A numerical toolkit for a mass-penalized Dirichlet eigenvalue on planar
//! domains.
//!
//! For a bounded open set and a penalty strength `alpha`, the quantity of
//! interest is the minimum over nonzero functions vanishing on the boundary
//! of
//!
//! ```text
//!         integral |grad v|^2  +  alpha * | integral |v| v |
//! Q(v) = ----------------------------------------------------
//!                        integral v^2
//! ```
//!
//! The crate computes this minimum two independent ways on rasterized
//! domains, compares both against a closed-form two-ball lower bound, and
//! ships the experiment drivers behind the `eigenshape` command-line tool.
//!
//! # Modules
//!
//! * [`special`] — Bessel functions and their first zeros.
//! * [`closed_form`] — ball eigenvalues, the critical penalty, and the
//!   two-ball lower-bound envelope.
//! * [`grid`] — rasterized domains ([`grid::DomainMask`]), grid functions,
//!   and the five-point stiffness operator.
//! * [`eigensolver`] — plain Dirichlet eigenvalues: CG-based inverse
//!   iteration, with a dense cross-check path for small masks.
//! * [`variational`] — the penalized minimum via two routes: the
//!   minimum-of-two-eigenvalues characterization and direct projected
//!   descent on the penalized quotient.
//! * [`rearrangement`] — decreasing rearrangement onto grid balls and the
//!   symmetrization chain behind the lower-bound comparison.
//! * [`config`], [`experiment`], [`svg`] — config parsing, deterministic
//!   experiment runners (CSV/SVG emitters), and chart rendering for the
//!   CLI.
//!
//! # Example
//!
//! Compute the penalized eigenvalue of a unit-measure disk both ways:
//!
//! ```
//! use eigenshape::grid::make_disk;
//! use eigenshape::variational::{mu_characterization, mu_direct};
//! use std::sync::Arc;
//!
//! let mask = Arc::new(make_disk(0.564189583547756, 1.0 / 24.0).unwrap());
//! let alpha = 2.0;
//! let a = mu_characterization(&mask, alpha, 1e-8).unwrap();
//! let b = mu_direct(&mask, alpha, 1e-8).unwrap();
//! assert!((a.value - b.value).abs() <= 1e-3 * a.value);
//! ```

// Guards written as `!(x > 0.0)` are deliberate: unlike `x <= 0.0`,
// the negated form also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed_form;
pub mod config;
pub mod eigensolver;
pub mod error;
pub mod experiment;
pub mod grid;
pub mod rearrangement;
pub mod special;
pub mod svg;
pub mod variational;

pub use error::{Error, Result};
