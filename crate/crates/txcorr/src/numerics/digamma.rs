//! Integer-argument digamma, harmonic sums, and Wishart log-determinant means.
//!
//! The digamma function at positive integer arguments is
//!
//!   psi(n) = -gamma + sum_{l=1}^{n-1} 1/l
//!
//! and the expected log-determinant of an m x n central Wishart matrix
//! W W^H (n >= m, i.i.d. CN(0,1) entries) is sum_{l=0}^{m-1} psi(n - l).
//! Both are evaluated by exact summation; the asymptotic forms below are
//! only used for large-argument approximations and carry documented
//! O(1/k) / O(1/m) gaps to the exact sums.

use crate::error::{Error, Result};

/// Euler-Mascheroni constant to full f64 precision.
pub const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_9;

/// H_n = sum_{l=1}^{n} 1/l by direct left-to-right summation. H_0 = 0.
pub fn harmonic_number(n: usize) -> f64 {
    let mut s = 0.0;
    for l in 1..=n {
        s += 1.0 / l as f64;
    }
    s
}

/// sum_{l=a}^{b} 1/l; zero when the range is empty (a > b).
pub fn harmonic_range(a: usize, b: usize) -> f64 {
    let mut s = 0.0;
    for l in a.max(1)..=b {
        s += 1.0 / l as f64;
    }
    s
}

/// Digamma at a positive integer: psi(n) = -gamma + H_{n-1}.
///
/// Summation runs low-to-high so that psi(n+1) - psi(n) = 1/n holds
/// bit-exactly, which the recurrence self-test relies on.
pub fn digamma_int(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("digamma_int requires n >= 1".into()));
    }
    Ok(-EULER_MASCHERONI + harmonic_number(n - 1))
}

/// Large-argument approximation psi(k) ~ ln k, with |psi(k) - ln k| = O(1/k).
pub fn digamma_asymptotic(k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("digamma_asymptotic requires k >= 1".into()));
    }
    Ok((k as f64).ln())
}

/// Harmonic-number expansion gamma + ln n + 1/(2n) - 1/(12n^2) + 1/(120n^4).
///
/// Error is O(n^-6); at n = 1 the absolute error is below 3e-3.
pub fn harmonic_approx(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("harmonic_approx requires n >= 1".into()));
    }
    let x = n as f64;
    Ok(EULER_MASCHERONI + x.ln() + 0.5 / x - 1.0 / (12.0 * x * x) + 1.0 / (120.0 * x.powi(4)))
}

/// E[ln det(W W^H)] for an m x n Gaussian W with n >= m: sum_{l=0}^{m-1} psi(n-l).
pub fn wishart_expected_logdet(m: usize, n: usize) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(Error::Domain("wishart dimensions must be positive".into()));
    }
    if n < m {
        return Err(Error::Domain(format!(
            "singular Wishart: need n >= m, got m={m}, n={n}"
        )));
    }
    let mut s = 0.0;
    for l in 0..m {
        s += digamma_int(n - l)?;
    }
    Ok(s)
}

/// Per-dimension large-m limit of E[ln det(W W^H)]/m at aspect ratio eta = n/m:
/// (eta - 1) ln(eta/(eta-1)) + ln(eta m) - 1, with the eta = 1 term taken as
/// its limit 0.
pub fn wishart_logdet_asymptotic(m: usize, eta: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("wishart_logdet_asymptotic requires m >= 1".into()));
    }
    if !(eta >= 1.0) {
        return Err(Error::Domain(format!("aspect ratio eta must be >= 1, got {eta}")));
    }
    let edge = if eta == 1.0 {
        0.0
    } else {
        (eta - 1.0) * (eta / (eta - 1.0)).ln()
    };
    Ok(edge + (eta * m as f64).ln() - 1.0)
}

/// (1/k) sum_{l=1}^{k} psi(l). Equals psi(k+1) - 1 exactly; kept as a
/// separate summation so it doubles as a self-test of `digamma_int`.
pub fn digamma_mean_identity(k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("digamma_mean_identity requires k >= 1".into()));
    }
    // psi(l) = -gamma + H_{l-1}; accumulate H incrementally to stay O(k).
    let mut h = 0.0;
    let mut s = 0.0;
    for l in 1..=k {
        s += -EULER_MASCHERONI + h;
        h += 1.0 / l as f64;
    }
    Ok(s / k as f64)
}
