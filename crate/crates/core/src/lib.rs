//! Numerical laboratory for Orlicz–Schatten ideals on truncated quantum tori.
//!
//! Everything lives on a finite Fourier truncation: lattice points `n` with
//! `|n|_inf <= R` carry the monomials `U^n` of the twisted torus algebra, the
//! Laplacian is diagonal with eigenvalues `4 pi^2 |n|^2`, and operators are
//! dense complex matrices acting on that basis. On top of this sit Orlicz
//! sequence norms (Luxemburg gauges), Schatten and Orlicz–Schatten norms,
//! Sobolev-embedding factorization diagnostics, an elliptic/heat solver, and
//! Lip-norm transport bounds. Inequality and convergence checks return a
//! three-valued [`verdict::Verdict`] with numeric margins or witnesses.
//!
//! Module map:
//! - [`young`]: Young functions, Luxemburg norms, series convergence verdicts
//! - [`qtorus`]: twisted convolution algebra, lattice grids, matrix representations
//! - [`spectral`]: singular values, Schatten/Orlicz–Schatten norms, Weyl fits
//! - [`embed`]: Sobolev factorization, summing-norm estimators, optimality scans
//! - [`pde`]: elliptic operator `-Delta + V`, spectral gap, heat semigroup
//! - [`metric`]: Lip-norms, spectral-distance lower bounds, transport checks

// `!(x > 0.0)` guards reject NaN along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod embed;
pub mod error;
pub mod metric;
pub mod pde;
pub mod qtorus;
pub mod rng;
pub mod spectral;
pub mod verdict;
pub mod young;

pub use error::{Error, Result};
pub use verdict::Verdict;
