//! Closed-form sum-capacity asymptotes and their constant-term brackets.
//!
//! All values are in bits per channel use. Every asymptote is returned as
//! a [`CapacityResult`]: `value_bits` is the displayed expression with the
//! additive constant set to zero, and `bracket` is the admissible range of
//! that constant, so the true asymptote lies in
//! `value_bits + [bracket.lo, bracket.hi]` up to o(1).

use crate::error::{Error, Result};
use crate::grouping::SystemParams;
use crate::numerics::{digamma_int, harmonic_range, Interval, EULER_MASCHERONI};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// Which asymptotic law produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    RLtKp,
    RGeKp,
    LargeSystemMuLt1,
    LargeSystemMuGe1,
    LargeK,
    IidBaseline,
    PartialCoop,
}

/// A capacity value with its constant-term bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    /// Asymptote evaluated with the additive constant at zero.
    pub value_bits: f64,
    /// Admissible range of the additive constant (bits).
    pub bracket: Interval,
    pub regime: Regime,
    /// True when the value is a per-antenna or per-user ratio rather than
    /// a total.
    pub per_dimension: bool,
}

/// The Wishart log-determinant constant
/// kappa(x, y, G) = y G (-gamma + sum_{l=2}^{x} 1/l
///                       + ((x-y)/y) sum_{l=x-y+1}^{x} 1/l) log2 e,
/// equal to G log2(e) E[ln det(W W^H)] for a y-by-x Gaussian W.
pub fn kappa(x: usize, y: usize, g: usize) -> Result<f64> {
    if x == 0 || y == 0 || g == 0 {
        return Err(Error::Domain("kappa arguments must be positive".into()));
    }
    if x < y {
        return Err(Error::Domain(format!("kappa requires x >= y, got x={x}, y={y}")));
    }
    let mut inner = -EULER_MASCHERONI + harmonic_range(2, x);
    if x > y {
        inner += ((x - y) as f64 / y as f64) * harmonic_range(x - y + 1, x);
    }
    Ok((y * g) as f64 * inner * LOG2_E)
}

fn sum_log2(spectrum: &[f64]) -> f64 {
    spectrum.iter().map(|l| l.log2()).sum()
}

fn validate_spectra(params: &SystemParams, spectra: &[Vec<f64>]) -> Result<()> {
    if spectra.len() != params.g {
        return Err(Error::Dimension(format!(
            "expected {} group spectra, got {}",
            params.g,
            spectra.len()
        )));
    }
    for (g, s) in spectra.iter().enumerate() {
        if s.len() != params.r {
            return Err(Error::Dimension(format!(
                "group {g}: expected rank {}, got {}",
                params.r,
                s.len()
            )));
        }
        if s.windows(2).any(|w| w[0] < w[1]) || s.iter().any(|&l| l <= 0.0) {
            return Err(Error::Validation(format!(
                "group {g}: spectrum must be positive descending"
            )));
        }
    }
    Ok(())
}

/// High-SNR sum-capacity asymptote of the grouped MIMO broadcast channel
/// under the (tall) unitary structure.
///
/// For r < K' the law is
/// `rG log2(P/(rG)) + sum_g log2|Lambda_g| + kappa(K', r, G)` with
/// constant in `[-rG log2(K'/r), 0]`; for r >= K' it is
/// `K log2(P/K) + sum_g sum_{i<=K'} log2 lambda_{g,i} + kappa(r, K', G)`
/// with constant in `[sum_g sum_i log2(lambda_{g,r-i+1}/lambda_{g,i}), 0]`.
/// Tall structures (rG < M) enter only through rG, which replaces M.
pub fn highsnr_sum_capacity(
    params: &SystemParams,
    spectra: &[Vec<f64>],
    p: f64,
) -> Result<CapacityResult> {
    if !(p > 0.0) {
        return Err(Error::Domain("SNR must be positive".into()));
    }
    validate_spectra(params, spectra)?;
    let (r, kp, g, k) = (params.r, params.kp, params.g, params.k);
    let m_eff = (r * g) as f64;
    let eigen_gain_full: f64 = spectra.iter().map(|s| sum_log2(s)).sum();

    if r < kp {
        let value = m_eff * (p / m_eff).log2() + eigen_gain_full + kappa(kp, r, g)?;
        let lo = -m_eff * (kp as f64 / r as f64).log2();
        Ok(CapacityResult {
            value_bits: value,
            bracket: Interval::new(lo, 0.0)?,
            regime: Regime::RLtKp,
            per_dimension: false,
        })
    } else {
        let kf = k as f64;
        let top_gain: f64 = spectra.iter().map(|s| sum_log2(&s[..kp])).sum();
        let value = kf * (p / kf).log2() + top_gain + kappa(r, kp, g)?;
        let mut lo = 0.0;
        for s in spectra {
            for i in 0..kp {
                lo += (s[r - 1 - i] / s[i]).log2();
            }
        }
        Ok(CapacityResult {
            value_bits: value,
            bracket: Interval::new(lo.min(0.0), 0.0)?,
            regime: Regime::RGeKp,
            per_dimension: false,
        })
    }
}

/// High-SNR sum capacity of the i.i.d. Rayleigh BC with full CSI, M >= K:
/// `K log2(P/K) + kappa(M, K, 1)` with a tight (zero-width) constant.
///
/// Coincides with [`highsnr_sum_capacity`] at G = 1 and an identity
/// covariance for every M >= K, and with the M log2(P/M) form at M = K.
pub fn iid_baseline(m: usize, k: usize, p: f64) -> Result<CapacityResult> {
    if m < k {
        return Err(Error::Domain(format!("iid baseline stated for M >= K, got M={m}, K={k}")));
    }
    if k == 0 || !(p > 0.0) {
        return Err(Error::Domain("need K >= 1 and P > 0".into()));
    }
    let kf = k as f64;
    Ok(CapacityResult {
        value_bits: kf * (p / kf).log2() + kappa(m, k, 1)?,
        bracket: Interval::point(0.0),
        regime: Regime::IidBaseline,
        per_dimension: false,
    })
}

/// Upper bound on the correlated-vs-iid rate gap at r = K' with flat
/// spectra: ((G-1)/2 - (G^2-1)/(12 M)) log2 e.
pub fn rate_gap_equal_eigen(m: usize, g: usize) -> Result<f64> {
    if g == 0 || m == 0 || m % g != 0 {
        return Err(Error::Domain(format!("G = {g} must divide M = {m}")));
    }
    let (mf, gf) = (m as f64, g as f64);
    Ok(((gf - 1.0) / 2.0 - (gf * gf - 1.0) / (12.0 * mf)) * LOG2_E)
}

/// Large-system per-dimension capacity ratio at fixed mu = M/K.
///
/// mu < 1: `log2(P/(e mu)) + ((1-mu)/mu) log2(1/(1-mu))` per antenna,
/// constant in `[log2(mu lambda_min / G), 0]` (iid: `[0, 0]`);
/// mu >= 1: `log2(mu P / e) + (mu-1) log2(mu/(mu-1))` per user, constant
/// in `[log2(lambda_min / G), log2 mu]` (iid: `[0, 0]`). The mu = 1
/// singular terms are taken as their limits.
pub fn large_system_ratio(
    mu: f64,
    p: f64,
    lambda_min: f64,
    g: usize,
    iid: bool,
) -> Result<CapacityResult> {
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("mu must be positive, got {mu}")));
    }
    if !(p > 0.0) || g == 0 {
        return Err(Error::Domain("need P > 0 and G >= 1".into()));
    }
    if !iid && !(lambda_min > 0.0) {
        return Err(Error::Domain("lambda_min must be positive".into()));
    }
    let e = std::f64::consts::E;
    let gf = g as f64;
    if mu < 1.0 {
        let value = (p / (e * mu)).log2() + ((1.0 - mu) / mu) * (1.0 / (1.0 - mu)).log2();
        let bracket = if iid {
            Interval::point(0.0)
        } else {
            Interval::new((mu * lambda_min / gf).log2().min(0.0), 0.0)?
        };
        Ok(CapacityResult {
            value_bits: value,
            bracket,
            regime: Regime::LargeSystemMuLt1,
            per_dimension: true,
        })
    } else {
        let edge = if mu == 1.0 { 0.0 } else { (mu - 1.0) * (mu / (mu - 1.0)).log2() };
        let value = (mu * p / e).log2() + edge;
        let bracket = if iid {
            Interval::point(0.0)
        } else {
            Interval::ordered((lambda_min / gf).log2(), mu.log2())
        };
        Ok(CapacityResult {
            value_bits: value,
            bracket,
            regime: Regime::LargeSystemMuGe1,
            per_dimension: true,
        })
    }
}

/// Power-allocation mode for the large-K law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LargeKMode {
    /// Multiuser diversity only: M log2 log2 K.
    NoCoop,
    /// Receiver cooperation inside each group: M log2 K'.
    PartialCoop,
}

/// Large-K sum-capacity scaling at fixed M (r < K'):
/// `M log2(P/M) + M log2 log2 K + sum_g log2|Lambda_g|` without
/// cooperation, with `M log2 K'` replacing the multiuser-diversity term
/// under partial (intra-group) cooperation.
pub fn large_k_scaling(
    m: usize,
    k: usize,
    p: f64,
    spectra: &[Vec<f64>],
    mode: LargeKMode,
) -> Result<CapacityResult> {
    if k <= 1 {
        return Err(Error::Domain("large-K law needs K > 1".into()));
    }
    if !(p > 0.0) || m == 0 || spectra.is_empty() {
        return Err(Error::Domain("need P > 0, M >= 1 and at least one group".into()));
    }
    let g = spectra.len();
    if k % g != 0 {
        return Err(Error::Domain(format!("G = {g} must divide K = {k}")));
    }
    let mf = m as f64;
    let eigen_gain: f64 = spectra.iter().map(|s| sum_log2(s)).sum();
    let (diversity, regime) = match mode {
        LargeKMode::NoCoop => (mf * (k as f64).log2().log2(), Regime::LargeK),
        LargeKMode::PartialCoop => (mf * ((k / g) as f64).log2(), Regime::PartialCoop),
    };
    Ok(CapacityResult {
        value_bits: mf * (p / mf).log2() + diversity + eigen_gain,
        bracket: Interval::point(0.0),
        regime,
        per_dimension: false,
    })
}

/// E[ln det(W^H Lambda W)] for a Gaussian r x K' matrix W and a distinct
/// positive spectrum, in nats, via the modified-Vandermonde construction:
/// sum_{k=1..K'} det(Omega_k) / det(Omega), where Omega is the r x r
/// Vandermonde in the eigenvalues and Omega_k reweights data column
/// r - K' + k by (psi(k) + ln lambda_i).
///
/// Restricted to r <= 12 with pairwise relative separation >= 1e-6; the
/// Vandermonde determinant ratio is numerically meaningless beyond that.
pub fn expected_logdet_weighted(spectrum: &[f64], kp: usize) -> Result<f64> {
    let r = spectrum.len();
    if kp == 0 || r == 0 {
        return Err(Error::Domain("need r >= K' >= 1".into()));
    }
    if r < kp {
        return Err(Error::Domain(format!("need r >= K', got r={r}, K'={kp}")));
    }
    if r > 12 {
        return Err(Error::UnsupportedSize(format!("Vandermonde path limited to r <= 12, got {r}")));
    }
    if spectrum.iter().any(|&l| l <= 0.0) {
        return Err(Error::Domain("spectrum must be positive".into()));
    }
    for i in 0..r {
        for j in (i + 1)..r {
            let sep = (spectrum[i] - spectrum[j]).abs() / spectrum[i].max(spectrum[j]);
            if sep < 1e-6 {
                return Err(Error::IllConditioned(format!(
                    "repeated eigenvalues: lambda[{i}] = {} vs lambda[{j}] = {}",
                    spectrum[i], spectrum[j]
                )));
            }
        }
    }

    let omega = DMatrix::<f64>::from_fn(r, r, |i, j| spectrum[i].powi(j as i32));
    let det_omega = omega.clone().lu().determinant();
    if det_omega == 0.0 || !det_omega.is_finite() {
        return Err(Error::IllConditioned("Vandermonde determinant underflowed".into()));
    }
    let mut total = 0.0;
    for k in 1..=kp {
        let col = r - kp + k - 1;
        let psi = digamma_int(k)?;
        let mut mk = omega.clone();
        for i in 0..r {
            mk[(i, col)] = (psi + spectrum[i].ln()) * spectrum[i].powi(col as i32);
        }
        total += mk.lu().determinant() / det_omega;
    }
    Ok(total)
}

/// High-SNR asymptote in the r >= K' regime through the Vandermonde route:
/// `K log2(P/K) + log2(e) sum_g E[ln det(W_g^H Lambda_g W_g)]`.
/// An independent cross-check of [`highsnr_sum_capacity`].
pub fn vandermonde_highsnr(p: f64, spectra: &[Vec<f64>], kp: usize) -> Result<f64> {
    if !(p > 0.0) || spectra.is_empty() {
        return Err(Error::Domain("need P > 0 and at least one group".into()));
    }
    let k = kp * spectra.len();
    let kf = k as f64;
    let mut total = kf * (p / kf).log2();
    for s in spectra {
        total += LOG2_E * expected_logdet_weighted(s, kp)?;
    }
    Ok(total)
}
