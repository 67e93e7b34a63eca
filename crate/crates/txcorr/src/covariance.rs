//! One-ring transmit correlation matrices and their eigen-structures.
//!
//! A user at azimuth `theta` surrounded by a ring of scatterers with
//! angular spread `delta`, served by a uniform linear array with antenna
//! spacing `spacing` (in wavelengths), sees the Hermitian Toeplitz
//! transmit correlation
//!
//!   R[p, q] = (1 / 2 delta) * integral_{-delta}^{delta}
//!             exp(j 2 pi D (p - q) sin(alpha + theta)) d alpha.
//!
//! The matrix has unit diagonal and trace M. Its eigenvalue spectrum (in
//! the Toeplitz/Fourier sense) is supported on the image of the scattering
//! arc under `xi = D sin(.)` folded into [-1/2, 1/2], which is what makes
//! the effective rank proportional to M with a geometry-determined factor.

use crate::error::{Error, Result};
use crate::numerics::{adaptive_bisect, gauss_legendre, gauss_legendre_with_tol};
use crate::CMatrix;
use nalgebra::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default relative truncation threshold for [`eigen_decompose`].
pub const DEFAULT_TRUNCATION: f64 = 1e-8;

/// Band-edge regularization for the Toeplitz spectrum: the summand of
/// [`szego_spectrum`] is capped at 1/sqrt(DELTA_EDGE * D).
pub const DELTA_EDGE: f64 = 1e-12;

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Scattering geometry that defines a one-ring transmit correlation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneRingGeometry {
    /// Azimuth angle of departure, radians, |theta| <= pi.
    pub theta: f64,
    /// Angular spread half-width, radians, 0 < delta <= pi/2.
    pub delta: f64,
    /// Antenna spacing in wavelengths, > 0.
    pub spacing: f64,
    /// Number of BS antennas, >= 1.
    pub antennas: usize,
}

impl OneRingGeometry {
    pub fn new(theta: f64, delta: f64, spacing: f64, antennas: usize) -> Result<Self> {
        if !(delta > 0.0 && delta <= PI / 2.0) {
            return Err(Error::Validation(format!("angular spread {delta} outside (0, pi/2]")));
        }
        if !(spacing > 0.0) {
            return Err(Error::Validation("antenna spacing must be positive".into()));
        }
        if antennas == 0 {
            return Err(Error::Validation("need at least one antenna".into()));
        }
        if !(theta.abs() <= PI) {
            return Err(Error::Validation(format!("azimuth {theta} outside [-pi, pi]")));
        }
        Ok(Self { theta, delta, spacing, antennas })
    }

    /// Convenience constructor with angles in degrees.
    pub fn from_degrees(theta_deg: f64, delta_deg: f64, spacing: f64, antennas: usize) -> Result<Self> {
        Self::new(theta_deg.to_radians(), delta_deg.to_radians(), spacing, antennas)
    }
}

/// Hermitian PSD transmit correlation matrix with trace M.
///
/// Matrices built from a [`OneRingGeometry`] are Toeplitz and keep their
/// generating lags for exact JSON round-tripping.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    entries: CMatrix,
    lags: Option<Vec<Complex<f64>>>,
}

impl CorrelationMatrix {
    /// Identity correlation (uncorrelated antennas).
    pub fn identity(m: usize) -> Self {
        let mut lags = vec![Complex::new(0.0, 0.0); m];
        lags[0] = Complex::new(1.0, 0.0);
        Self { entries: CMatrix::identity(m, m), lags: Some(lags) }
    }

    /// Hermitian Toeplitz matrix from its first-column lags; lag 0 must be 1.
    pub fn from_lags(lags: Vec<Complex<f64>>) -> Result<Self> {
        if lags.is_empty() {
            return Err(Error::Validation("need at least one lag".into()));
        }
        if (lags[0] - Complex::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(Error::Validation("zero-lag correlation must be 1".into()));
        }
        let m = lags.len();
        let entries = CMatrix::from_fn(m, m, |p, q| {
            if p >= q {
                lags[p - q]
            } else {
                lags[q - p].conj()
            }
        });
        Ok(Self { entries, lags: Some(lags) })
    }

    /// General Hermitian matrix, renormalized so that its trace equals M.
    pub fn from_hermitian(entries: CMatrix) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::Dimension("correlation matrix must be square".into()));
        }
        let m = entries.nrows();
        for p in 0..m {
            for q in 0..=p {
                if (entries[(p, q)] - entries[(q, p)].conj()).norm() > 1e-12 {
                    return Err(Error::Validation(format!("not Hermitian at ({p}, {q})")));
                }
            }
        }
        let trace: f64 = (0..m).map(|i| entries[(i, i)].re).sum();
        if !(trace > 0.0) {
            return Err(Error::Validation("trace must be positive".into()));
        }
        let scale = Complex::new(m as f64 / trace, 0.0);
        Ok(Self { entries: entries * scale, lags: None })
    }

    pub fn m(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    /// Toeplitz lags when the matrix was built from them.
    pub fn lags(&self) -> Option<&[Complex<f64>]> {
        self.lags.as_deref()
    }

    /// JSON form `{"m": .., "lags": [[re, im], ..]}` (Toeplitz matrices only).
    pub fn to_json(&self) -> Result<String> {
        let lags = self
            .lags
            .as_ref()
            .ok_or_else(|| Error::Validation("matrix is not Toeplitz; no lag form".into()))?;
        let doc = CorrelationMatrixJson {
            m: self.m(),
            lags: lags.iter().map(|c| [c.re, c.im]).collect(),
        };
        serde_json::to_string(&doc).map_err(|e| Error::Validation(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CorrelationMatrixJson =
            serde_json::from_str(text).map_err(|e| Error::Validation(e.to_string()))?;
        if doc.lags.len() != doc.m {
            return Err(Error::Dimension(format!(
                "expected {} lags, got {}",
                doc.m,
                doc.lags.len()
            )));
        }
        Self::from_lags(doc.lags.into_iter().map(|[re, im]| Complex::new(re, im)).collect())
    }
}

#[derive(Serialize, Deserialize)]
struct CorrelationMatrixJson {
    m: usize,
    lags: Vec<[f64; 2]>,
}

/// Karhunen-Loeve factorization R = U diag(eigenvalues) U^H restricted to
/// the retained (dominant) eigenvalues, renormalized to trace M.
#[derive(Debug, Clone)]
pub struct EigenStructure {
    basis: CMatrix,
    eigenvalues: Vec<f64>,
}

impl EigenStructure {
    /// Assemble from a tall column-orthonormal basis and a positive
    /// descending spectrum.
    pub fn new(basis: CMatrix, eigenvalues: Vec<f64>) -> Result<Self> {
        if basis.ncols() != eigenvalues.len() {
            return Err(Error::Dimension(format!(
                "basis has {} columns but spectrum has {} entries",
                basis.ncols(),
                eigenvalues.len()
            )));
        }
        if eigenvalues.is_empty() {
            return Err(Error::Validation("empty spectrum".into()));
        }
        if eigenvalues.windows(2).any(|w| w[0] < w[1]) || *eigenvalues.last().unwrap() <= 0.0 {
            return Err(Error::Validation("spectrum must be positive and descending".into()));
        }
        let gram = basis.adjoint() * &basis;
        let resid = (&gram - CMatrix::identity(gram.nrows(), gram.ncols())).norm();
        if resid > 1e-10 {
            return Err(Error::Validation(format!(
                "basis columns not orthonormal (residual {resid:.2e})"
            )));
        }
        Ok(Self { basis, eigenvalues })
    }

    pub fn m(&self) -> usize {
        self.basis.nrows()
    }

    pub fn effective_rank(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Condition number zeta = lambda_1 / lambda_r of the retained spectrum.
    pub fn condition(&self) -> f64 {
        self.eigenvalues[0] / self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// Reconstruct U diag(lambda) U^H.
    pub fn reconstruct(&self) -> CMatrix {
        let r = self.effective_rank();
        let lam = CMatrix::from_fn(r, r, |i, j| {
            if i == j {
                Complex::new(self.eigenvalues[i], 0.0)
            } else {
                Complex::new(0.0, 0.0)
            }
        });
        &self.basis * lam * self.basis.adjoint()
    }
}

/// One-ring correlation matrix for the given geometry.
///
/// Only the M distinct lags are integrated (the matrix is Toeplitz in
/// p - q); real and imaginary parts of each lag go through adaptive
/// Gauss-Legendre quadrature at 1e-10 relative tolerance.
pub fn one_ring_correlation(geom: &OneRingGeometry) -> Result<CorrelationMatrix> {
    let OneRingGeometry { theta, delta, spacing, antennas } = *geom;
    let mut lags = Vec::with_capacity(antennas);
    lags.push(Complex::new(1.0, 0.0));
    let norm = 1.0 / (2.0 * delta);
    for k in 1..antennas {
        let w = 2.0 * PI * spacing * k as f64;
        let re = gauss_legendre(|a: f64| (w * (a + theta).sin()).cos(), -delta, delta)?;
        let im = gauss_legendre(|a: f64| (w * (a + theta).sin()).sin(), -delta, delta)?;
        lags.push(Complex::new(re * norm, im * norm));
    }
    CorrelationMatrix::from_lags(lags)
}

/// Hermitian eigendecomposition of a correlation matrix with relative
/// truncation at `truncation * lambda_1` and trace renormalized to M.
///
/// Eigenvalues are strictly descending with a deterministic tie-break
/// (larger first-coordinate magnitude, then lower original index).
/// Fails if the matrix is not numerically PSD (min eigenvalue below
/// -1e-8 * lambda_max).
pub fn eigen_decompose(r: &CorrelationMatrix, truncation: f64) -> Result<EigenStructure> {
    if !(0.0..1.0).contains(&truncation) {
        return Err(Error::Validation(format!("truncation {truncation} outside [0, 1)")));
    }
    let m = r.m();
    let se = r.entries().clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    let vals = &se.eigenvalues;
    let vecs = &se.eigenvectors;
    order.sort_by(|&i, &j| {
        vals[j]
            .partial_cmp(&vals[i])
            .expect("non-finite eigenvalue")
            .then_with(|| {
                let ai = vecs[(0, i)].norm();
                let aj = vecs[(0, j)].norm();
                aj.partial_cmp(&ai).unwrap().then(i.cmp(&j))
            })
    });
    let lambda_max = vals[order[0]];
    if !(lambda_max > 0.0) {
        return Err(Error::Validation("correlation matrix has no positive eigenvalue".into()));
    }
    let lambda_min = vals[order[m - 1]];
    if lambda_min < -1e-8 * lambda_max {
        return Err(Error::Validation(format!(
            "matrix is not numerically PSD: min eigenvalue {lambda_min:.3e} vs max {lambda_max:.3e}"
        )));
    }

    let kept: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| vals[i] > truncation * lambda_max)
        .collect();
    let kept_sum: f64 = kept.iter().map(|&i| vals[i]).sum();
    let scale = m as f64 / kept_sum;

    let basis = CMatrix::from_fn(m, kept.len(), |row, col| vecs[(row, kept[col])]);
    let eigenvalues: Vec<f64> = kept.iter().map(|&i| vals[i] * scale).collect();
    EigenStructure::new(basis, eigenvalues)
}

/// Image of the scattering arc under xi = D sin(.): the (lo, hi) band that
/// determines both the spectrum support and its singular points.
fn sin_band(geom: &OneRingGeometry) -> (f64, f64) {
    let a = geom.spacing * (geom.theta - geom.delta).sin();
    let b = geom.spacing * (geom.theta + geom.delta).sin();
    (a.min(b), a.max(b))
}

fn band_k_range(band: (f64, f64)) -> std::ops::RangeInclusive<i64> {
    // k - xi must land in [lo, hi] for some xi in [-1/2, 1/2].
    let kmin = (band.0 - 0.5).ceil() as i64;
    let kmax = (band.1 + 0.5).floor() as i64;
    kmin..=kmax
}

/// Toeplitz eigenvalue spectrum S(xi) of the one-ring correlation at
/// frequency xi in [-1/2, 1/2].
///
/// S(xi) = (1/2 delta) * sum over integers k with k - xi in the sin-band
/// of 1/sqrt(D^2 - (k - xi)^2); exact band-edge hits are capped at
/// 1/sqrt([`DELTA_EDGE`] * D) rather than returning infinity.
pub fn szego_spectrum(geom: &OneRingGeometry, xi: f64) -> Result<f64> {
    if !(xi.abs() <= 0.5) {
        return Err(Error::Domain(format!("xi = {xi} outside [-1/2, 1/2]")));
    }
    let d = geom.spacing;
    let (lo, hi) = sin_band(geom);
    let mut s = 0.0;
    for k in band_k_range((lo, hi)) {
        let m = k as f64 - xi;
        if m < lo || m > hi {
            continue;
        }
        let denom_sq = (d * d - m * m).max(DELTA_EDGE * d);
        s += 1.0 / denom_sq.sqrt();
    }
    Ok(s / (2.0 * geom.delta))
}

/// Support of S as a list of disjoint intervals inside [-1/2, 1/2].
pub fn szego_support(geom: &OneRingGeometry) -> Vec<(f64, f64)> {
    let band = sin_band(geom);
    let mut pieces: Vec<(f64, f64)> = Vec::new();
    for k in band_k_range(band) {
        let lo = (k as f64 - band.1).max(-0.5);
        let hi = (k as f64 - band.0).min(0.5);
        if hi > lo {
            pieces.push((lo, hi));
        }
    }
    pieces.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for p in pieces {
        match merged.last_mut() {
            Some(last) if p.0 <= last.1 => last.1 = last.1.max(p.1),
            _ => merged.push(p),
        }
    }
    merged
}

/// Lebesgue measure of the spectrum support; the effective-rank fraction
/// rho with r ~ rho * M for large arrays (valid for D <= 1/2).
pub fn szego_support_measure(geom: &OneRingGeometry) -> f64 {
    szego_support(geom).iter().map(|(a, b)| b - a).sum()
}

/// Support-averaged log of the Toeplitz spectrum,
/// (1/rho) * integral over {S > 0} of ln S(xi) d xi  (nats per retained
/// dimension) — the large-M limit of (1/r) ln|Lambda|.
///
/// Quadrature panels split at the band edges, where S has integrable
/// inverse-square-root singularities, and at support boundaries.
pub fn szego_logdet_rate(geom: &OneRingGeometry) -> Result<f64> {
    let support = szego_support(geom);
    let rho: f64 = support.iter().map(|(a, b)| b - a).sum();
    if rho <= 0.0 {
        return Err(Error::Domain("empty spectrum support".into()));
    }
    let band = sin_band(geom);
    let d = geom.spacing;

    // Singular/breakpoints: band-edge preimages and all piece endpoints.
    let mut breaks: Vec<f64> = Vec::new();
    for k in band_k_range(band) {
        for cand in [k as f64 - d, k as f64 + d] {
            if cand > -0.5 && cand < 0.5 {
                breaks.push(cand);
            }
        }
    }

    let mut total = 0.0;
    for &(a, b) in &support {
        let mut pts: Vec<f64> = vec![a, b];
        pts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
        pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for w in pts.windows(2) {
            if w[1] - w[0] < 1e-14 {
                continue;
            }
            total += adaptive_bisect(
                |xi: f64| szego_spectrum(geom, xi).unwrap_or(0.0).max(1e-300).ln(),
                w[0],
                w[1],
                1e-9,
            )?;
        }
    }
    Ok(total / rho)
}

/// Closed-form lower bound on ln|Lambda_g| from the trace pair
/// (tr = M, tr-of-square <= M^2) and the smallest retained eigenvalue.
///
/// Uses the Gauss companion node tau = (lambda_min M - M^2) /
/// (lambda_min r - M); an equal-eigenvalue spectrum collapses to the
/// exact value r ln(M/r).
pub fn bai_logdet_lower(lambda_min: f64, m: usize, r: usize, g: usize) -> Result<f64> {
    if r == 0 || g == 0 || m == 0 {
        return Err(Error::Domain("dimensions must be positive".into()));
    }
    if r * g > m {
        return Err(Error::Domain(format!("need r*G <= M, got r={r}, G={g}, M={m}")));
    }
    let mf = m as f64;
    let rf = r as f64;
    if !(lambda_min > 0.0 && lambda_min <= mf / rf) {
        return Err(Error::Domain(format!(
            "lambda_min must lie in (0, M/r] = (0, {}], got {lambda_min}",
            mf / rf
        )));
    }
    // All eigenvalues equal (lambda_min = M/r): exact point value.
    if (lambda_min * rf - mf).abs() <= 1e-9 * mf || r == 1 {
        return Ok(rf * (mf / rf).ln());
    }
    let l = lambda_min;
    let tau = (l * mf - mf * mf) / (l * rf - mf);
    let det = l * tau * tau - tau * l * l;
    if det.abs() < 1e-300 {
        return Ok(rf * (mf / rf).ln());
    }
    Ok((l.ln() * (tau * tau * mf - tau * mf * mf) + tau.ln() * (-l * l * mf + l * mf * mf)) / det)
}

/// Draw `users` channel columns h = U Lambda^(1/2) w, w ~ CN(0, I_r),
/// from the caller-owned RNG stream. E[h h^H] equals the truncated R.
///
/// Draw order is fixed (per column, per row: real then imaginary part),
/// so a given RNG state yields a bit-identical matrix.
pub fn sample_channel<R: Rng + ?Sized>(
    es: &EigenStructure,
    users: usize,
    rng: &mut R,
) -> CMatrix {
    &es.basis * sample_whitened(&es.eigenvalues, users, rng)
}

/// Draw the reduced-dimension (whitened) channels Lambda^(1/2) W directly:
/// an r x users matrix whose columns have covariance diag(eigenvalues).
pub fn sample_whitened<R: Rng + ?Sized>(
    eigenvalues: &[f64],
    users: usize,
    rng: &mut R,
) -> CMatrix {
    let r = eigenvalues.len();
    let mut data = Vec::with_capacity(r * users);
    for _ in 0..users {
        for &lam in eigenvalues {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let s = lam.sqrt() * SQRT_HALF;
            data.push(Complex::new(re * s, im * s));
        }
    }
    CMatrix::from_vec(r, users, data)
}

/// i.i.d. CN(0, 1) matrix in the same draw order as [`sample_whitened`].
pub fn sample_iid<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let ones = vec![1.0; rows];
    sample_whitened(&ones, cols, rng)
}

/// High-resolution trapezoid integration of the lag integrand; the
/// independent oracle used by tests against the quadrature path.
#[doc(hidden)]
pub fn one_ring_lag_trapezoid(geom: &OneRingGeometry, lag: usize, n: usize) -> Complex<f64> {
    let w = 2.0 * PI * geom.spacing * lag as f64;
    let f = |a: f64| {
        let phase = w * (a + geom.theta).sin();
        Complex::new(phase.cos(), phase.sin())
    };
    let (a, b) = (-geom.delta, geom.delta);
    let h = (b - a) / n as f64;
    let mut s = (f(a) + f(b)) * Complex::new(0.5, 0.0);
    for i in 1..n {
        s += f(a + i as f64 * h);
    }
    s * Complex::new(h / (2.0 * geom.delta), 0.0)
}

/// Panel-splitting quadrature of a scalar function of xi over explicit
/// intervals; used by tests for the `integral of S = 1` identity.
#[doc(hidden)]
pub fn integrate_over_support(
    geom: &OneRingGeometry,
    f: impl Fn(f64) -> f64,
    tol: f64,
) -> Result<f64> {
    let mut total = 0.0;
    for (a, b) in szego_support(geom) {
        total += gauss_legendre_with_tol(&f, a, b, tol).or_else(|e| match e {
            Error::Accuracy { best, .. } => Ok(best),
            other => Err(other),
        })?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn geom(theta_deg: f64, delta_deg: f64, m: usize) -> OneRingGeometry {
        OneRingGeometry::from_degrees(theta_deg, delta_deg, 0.5, m).unwrap()
    }

    #[test]
    fn unit_diagonal_and_hermitian_toeplitz() {
        let r = one_ring_correlation(&geom(20.0, 10.0, 8)).unwrap();
        let e = r.entries();
        for p in 0..8 {
            assert_abs_diff_eq!(e[(p, p)].re, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(e[(p, p)].im, 0.0, epsilon = 1e-12);
            for q in 0..8 {
                assert!((e[(p, q)] - e[(q, p)].conj()).norm() < 1e-12);
                if p >= 1 && q >= 1 {
                    assert!((e[(p, q)] - e[(p - 1, q - 1)]).norm() < 1e-12, "not Toeplitz");
                }
            }
        }
    }

    #[test]
    fn matches_trapezoid_oracle() {
        let g = geom(0.0, 10.0, 8);
        let r = one_ring_correlation(&g).unwrap();
        let lags = r.lags().unwrap();
        for (k, lag) in lags.iter().enumerate() {
            let oracle = one_ring_lag_trapezoid(&g, k, 1 << 18);
            assert!((lag - oracle).norm() < 1e-8, "lag {k}: {lag:?} vs {oracle:?}");
        }
    }

    #[test]
    fn vanishing_spread_is_rank_one() {
        let g = OneRingGeometry::new(0.4, 1e-6, 0.5, 6).unwrap();
        let r = one_ring_correlation(&g).unwrap();
        // entries approach exp(j 2 pi D (p-q) sin theta)
        let lags = r.lags().unwrap();
        for (k, lag) in lags.iter().enumerate() {
            let phase = 2.0 * PI * 0.5 * k as f64 * 0.4f64.sin();
            let ideal = Complex::new(phase.cos(), phase.sin());
            assert!((lag - ideal).norm() < 1e-9, "lag {k}");
        }
        let es = eigen_decompose(&r, DEFAULT_TRUNCATION).unwrap();
        assert_eq!(es.effective_rank(), 1);
        assert_abs_diff_eq!(es.eigenvalues()[0], 6.0, epsilon = 1e-9);
    }

    #[test]
    fn identity_decomposition() {
        let r = CorrelationMatrix::identity(5);
        let es = eigen_decompose(&r, DEFAULT_TRUNCATION).unwrap();
        assert_eq!(es.effective_rank(), 5);
        for &l in es.eigenvalues() {
            assert_abs_diff_eq!(l, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn reconstruction_and_trace() {
        let g = geom(-30.0, 12.0, 16);
        let r = one_ring_correlation(&g).unwrap();
        let es = eigen_decompose(&r, DEFAULT_TRUNCATION).unwrap();
        let trace: f64 = es.eigenvalues().iter().sum();
        assert_abs_diff_eq!(trace, 16.0, epsilon = 1e-10);
        let resid = (es.reconstruct() - r.entries()).norm() / r.entries().norm();
        assert!(resid < 1e-6, "residual {resid}");
        // U^H U = I
        let gram = es.basis().adjoint() * es.basis();
        let n = gram.nrows();
        assert!((gram - CMatrix::identity(n, n)).norm() < 1e-10);
    }

    #[test]
    fn psd_and_toeplitz_over_random_geometries() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let theta = rng.random_range(-1.0f64..1.0);
            let delta = rng.random_range(0.01f64..0.5);
            let m = rng.random_range(2usize..12);
            let g = OneRingGeometry::new(theta, delta, 0.5, m).unwrap();
            let r = one_ring_correlation(&g).unwrap();
            let se = r.entries().clone().symmetric_eigen();
            let lmax = se.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
            let lmin = se.eigenvalues.iter().cloned().fold(f64::MAX, f64::min);
            assert!(lmin >= -1e-8 * lmax, "not PSD: {lmin} vs {lmax}");
        }
    }

    #[test]
    fn spectrum_outside_band_is_zero() {
        let g = OneRingGeometry::from_degrees(0.0, 2.0, 0.5, 8).unwrap();
        assert_eq!(szego_spectrum(&g, 0.49).unwrap(), 0.0);
        assert!(szego_spectrum(&g, 0.0).unwrap() > 0.0);
        assert!(szego_spectrum(&g, 0.6).is_err());
    }

    #[test]
    fn spectrum_integrates_to_one() {
        for (theta, delta) in [(0.0, 10.0), (30.0, 5.0), (55.0, 20.0)] {
            let g = OneRingGeometry::from_degrees(theta, delta, 0.5, 4).unwrap();
            let total =
                integrate_over_support(&g, |xi| szego_spectrum(&g, xi).unwrap(), 1e-9).unwrap();
            assert!((total - 1.0).abs() < 1e-6, "theta={theta} delta={delta}: {total}");
        }
    }

    #[test]
    fn logdet_rate_flat_spectrum_is_zero() {
        // Synthetic flat spectrum S == 1 on the full interval: the
        // support-averaged log integral of a constant-1 spectrum is 0.
        let v = adaptive_bisect(|_| 1f64.ln(), -0.5, 0.5, 1e-10).unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn logdet_rate_matches_large_matrix() {
        // theta=0, delta=10 deg at M=512: support-rank log-det mean within 3%.
        let g0 = geom(0.0, 10.0, 512);
        let rate = szego_logdet_rate(&g0).unwrap();
        let r = one_ring_correlation(&g0).unwrap();
        let se = r.entries().clone().symmetric_eigen();
        let mut ev: Vec<f64> = se.eigenvalues.iter().cloned().collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let rhat = (szego_support_measure(&g0) * 512.0).round() as usize;
        let mean_ln: f64 = ev[..rhat].iter().map(|&x| x.ln()).sum::<f64>() / rhat as f64;
        assert!(
            (mean_ln - rate).abs() / rate.abs() < 0.03,
            "mean_ln={mean_ln} rate={rate}"
        );

        // off-broadside geometry: finite negative-free value, still close.
        let g1 = geom(30.0, 5.0, 512);
        let rate1 = szego_logdet_rate(&g1).unwrap();
        assert!(rate1.is_finite());
        let r1 = one_ring_correlation(&g1).unwrap();
        let se1 = r1.entries().clone().symmetric_eigen();
        let mut ev1: Vec<f64> = se1.eigenvalues.iter().cloned().collect();
        ev1.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let rhat1 = (szego_support_measure(&g1) * 512.0).round() as usize;
        let mean_ln1: f64 = ev1[..rhat1].iter().map(|&x| x.ln()).sum::<f64>() / rhat1 as f64;
        assert!((mean_ln1 - rate1).abs() / rate1.abs() < 0.05);
    }

    #[test]
    fn effective_rank_tracks_support() {
        // Measured behavior: eps-truncation keeps the transition band on
        // top of the rho*M bulk (about +7 at this size), and the spectrum
        // plunges right past the support rank.
        let g = geom(0.0, 15.0, 32);
        let r = one_ring_correlation(&g).unwrap();
        let es = eigen_decompose(&r, DEFAULT_TRUNCATION).unwrap();
        let rho_m = szego_support_measure(&g) * 32.0;
        let rank = es.effective_rank() as f64;
        assert!(rank >= rho_m - 2.0 && rank <= rho_m + 8.0, "rank={rank} rho*M={rho_m}");
        let ev = es.eigenvalues();
        assert!(ev[10] / ev[0] < 0.05, "no plunge: {:?}", &ev[..12.min(ev.len())]);
    }

    #[test]
    fn bai_lower_bound_holds() {
        // flat spectrum: bound must stay below the equal-eigenvalue ceiling.
        let exact = 16.0 * 4.0f64.ln();
        let b = bai_logdet_lower(4.0, 64, 16, 4).unwrap();
        assert!(b <= exact + 1e-9);

        // random admissible spectra with fixed (lambda_min, trace M).
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let (m, r, g) = (64usize, 16usize, 4usize);
            let lam_min = 0.5;
            let bound = bai_logdet_lower(lam_min, m, r, g).unwrap();
            // lambda_min plus r-1 random positives scaled to the leftover trace
            let mut rest: Vec<f64> = (0..r - 1).map(|_| rng.random_range(0.2f64..1.0)).collect();
            let rest_sum: f64 = rest.iter().sum();
            let target = m as f64 - lam_min;
            for x in rest.iter_mut() {
                *x *= target / rest_sum;
            }
            // keep lambda_min the minimum
            if rest.iter().any(|&x| x < lam_min) {
                continue;
            }
            let logdet: f64 = rest.iter().map(|x| x.ln()).sum::<f64>() + lam_min.ln();
            assert!(bound <= logdet + 1e-9, "bound {bound} vs logdet {logdet}");
        }
    }

    #[test]
    fn bai_lower_bound_large_r_limit() {
        // (1/M) * bound approaches ln(lambda_min) from above as r grows.
        let (r, g) = (1000usize, 4usize);
        let m = r * g;
        let b = bai_logdet_lower(0.5, m, r, g).unwrap();
        assert!(b / m as f64 >= 0.5f64.ln() - 1e-2, "{}", b / m as f64);
    }

    #[test]
    fn sampling_covariance_and_determinism() {
        let g = geom(0.0, 10.0, 8);
        let r = one_ring_correlation(&g).unwrap();
        let es = eigen_decompose(&r, DEFAULT_TRUNCATION).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 100_000usize;
        let h = sample_channel(&es, n, &mut rng);
        let mut est = CMatrix::zeros(8, 8);
        for c in 0..n {
            let col = h.column(c);
            est += col * col.adjoint();
        }
        est /= Complex::new(n as f64, 0.0);
        let rel = (est - r.entries()).norm() / r.entries().norm();
        assert!(rel < 0.02, "sample covariance off by {rel}");

        // determinism: same seed, same matrix, bit for bit
        let mut r1 = ChaCha8Rng::seed_from_u64(9);
        let mut r2 = ChaCha8Rng::seed_from_u64(9);
        let a = sample_channel(&es, 3, &mut r1);
        let b = sample_channel(&es, 3, &mut r2);
        assert_eq!(a, b);

        // rank-1 structure: single basis column scaled per user
        let g1 = OneRingGeometry::new(0.1, 1e-6, 0.5, 4).unwrap();
        let es1 = eigen_decompose(&one_ring_correlation(&g1).unwrap(), DEFAULT_TRUNCATION).unwrap();
        assert_eq!(es1.effective_rank(), 1);
        let mut r3 = ChaCha8Rng::seed_from_u64(13);
        let h1 = sample_channel(&es1, 2, &mut r3);
        let u = es1.basis().column(0);
        for c in 0..2 {
            let col = h1.column(c);
            // col is u times a scalar: residual after projecting onto u is ~0
            let coef = (u.adjoint() * col)[(0, 0)];
            let resid = (col - u * coef).norm();
            assert!(resid < 1e-12);
        }
    }

    #[test]
    fn json_round_trip() {
        let g = geom(10.0, 8.0, 6);
        let r = one_ring_correlation(&g).unwrap();
        let text = r.to_json().unwrap();
        let back = CorrelationMatrix::from_json(&text).unwrap();
        assert_eq!(back.m(), 6);
        assert!((back.entries() - r.entries()).norm() < 1e-15);
        // non-Toeplitz matrices have no lag form
        let dense = CorrelationMatrix::from_hermitian(CMatrix::identity(3, 3) * Complex::new(2.0, 0.0)).unwrap();
        assert!(dense.to_json().is_err());
    }

    #[test]
    fn geometry_validation() {
        assert!(OneRingGeometry::new(0.0, 0.0, 0.5, 4).is_err());
        assert!(OneRingGeometry::new(0.0, 2.0, 0.5, 4).is_err());
        assert!(OneRingGeometry::new(0.0, 0.1, -0.5, 4).is_err());
        assert!(OneRingGeometry::new(0.0, 0.1, 0.5, 0).is_err());
    }
}
