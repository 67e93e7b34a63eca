//! Capacity analysis of correlated-fading MIMO broadcast channels.
//!
//! The crate models a downlink with an `M`-antenna base station and `K`
//! single-antenna users whose channels carry transmit-side correlation
//! (Kronecker model with identity receive correlation). It provides:
//!
//! * one-ring transmit correlation matrices, their eigen-structures and
//!   Toeplitz eigenvalue spectra ([`covariance`]),
//! * grouped eigenspace structures (unitary / tall-unitary) and the
//!   effective-channel dimension reduction they enable ([`grouping`]),
//! * closed-form high-SNR, large-system and large-user-count sum-capacity
//!   expressions with explicit constant-term brackets ([`capacity`]),
//! * a deterministic Monte Carlo estimator of the dual-MAC ergodic sum
//!   capacity via sum-power water-filling ([`montecarlo`]),
//! * pilot-overhead optimization for pilot-aided systems and TDD
//!   large-scale limits ([`pilot`]),
//! * the special functions and determinant bounds all of the above
//!   consume ([`numerics`]).
//!
//! Capacity values are in bits per channel use unless a function is
//! documented as returning nats; internal special-function math is done
//! in natural log and converted at the capacity-facing surface.
//!
//! ## Example
//!
//! ```rust
//! use txcorr::covariance::{OneRingGeometry, one_ring_correlation, eigen_decompose};
//!
//! // A 16-antenna ULA serving a user at broadside with 10 degrees of
//! // angular spread and half-wavelength spacing.
//! let geom = OneRingGeometry::from_degrees(0.0, 10.0, 0.5, 16).unwrap();
//! let r = one_ring_correlation(&geom).unwrap();
//! let es = eigen_decompose(&r, 1e-8).unwrap();
//!
//! // Correlation concentrates the trace on a fraction of the modes.
//! assert!(es.effective_rank() < 12);
//! let trace: f64 = es.eigenvalues().iter().sum();
//! assert!((trace - 16.0).abs() < 1e-9);
//! ```

pub mod capacity;
pub mod covariance;
pub mod error;
pub mod grouping;
pub mod montecarlo;
pub mod numerics;
pub mod pilot;

pub use error::{Error, Result};

use nalgebra::{Complex, DMatrix};

/// Dense complex matrix used throughout the crate.
pub type CMatrix = DMatrix<Complex<f64>>;
