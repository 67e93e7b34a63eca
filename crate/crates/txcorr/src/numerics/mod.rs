//! Special functions, determinant bounds, and quadrature.
//!
//! Everything here is a pure function of its inputs and safe to call from
//! any number of threads. All logarithms in this module are natural (nats);
//! conversion to bits happens in the capacity-facing modules.

mod detbounds;
mod digamma;
mod quadrature;

pub use detbounds::{bai_trln_bounds, fiedler_det_bounds, Interval};
pub use digamma::{
    digamma_asymptotic, digamma_int, digamma_mean_identity, harmonic_approx, harmonic_number,
    harmonic_range, wishart_expected_logdet, wishart_logdet_asymptotic, EULER_MASCHERONI,
};
pub use quadrature::{adaptive_bisect, gauss_legendre, gauss_legendre_with_tol, DEFAULT_QUAD_TOL};
