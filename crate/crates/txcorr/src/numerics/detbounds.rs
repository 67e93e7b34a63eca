//! Determinant and trace-log bounds for Hermitian matrices with known spectra.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A closed interval [lo, hi], used for determinant brackets and for the
/// additive constant ranges attached to capacity asymptotes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::Validation(format!("interval bounds out of order: [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    /// Interval from two values in unknown order.
    pub fn ordered(a: f64, b: f64) -> Self {
        Self { lo: a.min(b), hi: a.max(b) }
    }

    /// Degenerate point interval [x, x].
    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Containment with a relative slack on both ends.
    pub fn contains(&self, x: f64, rtol: f64) -> bool {
        let slack = rtol * self.lo.abs().max(self.hi.abs()).max(1.0);
        x >= self.lo - slack && x <= self.hi + slack
    }

    /// Both endpoints scaled by a non-negative factor.
    pub fn scaled(&self, s: f64) -> Self {
        Self::ordered(self.lo * s, self.hi * s)
    }
}

/// Bounds on det(A + B) over all Hermitian A, B with the given spectra.
///
/// When the smallest eigenvalue sum is non-negative, all pairings are
/// non-negative and the two extremal pairings are the identically-ordered
/// and the reversed one; both are computed and ordered into the interval.
/// Otherwise all permutations are enumerated, which restricts the length
/// to 8 (8! products).
pub fn fiedler_det_bounds(eig_a: &[f64], eig_b: &[f64]) -> Result<Interval> {
    if eig_a.len() != eig_b.len() {
        return Err(Error::Dimension(format!(
            "spectra lengths differ: {} vs {}",
            eig_a.len(),
            eig_b.len()
        )));
    }
    if eig_a.is_empty() {
        return Err(Error::Domain("empty spectra".into()));
    }
    let mut a = eig_a.to_vec();
    let mut b = eig_b.to_vec();
    a.sort_by(|x, y| y.partial_cmp(x).expect("non-finite eigenvalue"));
    b.sort_by(|x, y| y.partial_cmp(x).expect("non-finite eigenvalue"));
    let n = a.len();

    if a[n - 1] + b[n - 1] >= 0.0 {
        let same: f64 = (0..n).map(|i| a[i] + b[i]).product();
        let rev: f64 = (0..n).map(|i| a[i] + b[n - 1 - i]).product();
        return Ok(Interval::ordered(same, rev));
    }

    if n > 8 {
        return Err(Error::UnsupportedSize(format!(
            "permutation enumeration limited to n <= 8, got {n}"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    permute(&mut idx, 0, &mut |perm| {
        let p: f64 = (0..n).map(|i| a[i] + b[perm[i]]).product();
        lo = lo.min(p);
        hi = hi.max(p);
    });
    Interval::new(lo, hi)
}

fn permute(idx: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == idx.len() {
        visit(idx);
        return;
    }
    for i in k..idx.len() {
        idx.swap(k, i);
        permute(idx, k + 1, visit);
        idx.swap(k, i);
    }
}

/// Two-point Gauss-quadrature bracket on tr(ln A) for an n x n symmetric
/// positive definite A with trace `xi1`, trace-of-square `xi2`, and extreme
/// eigenvalues `lambda_min`, `lambda_max`.
///
/// Each side evaluates [ln l, ln t] [[l, t], [l^2, t^2]]^-1 [xi1, xi2]^T
/// with t = (l xi1 - xi2)/(l n - xi1) and l the respective extreme
/// eigenvalue. A spectrum with all eigenvalues equal makes the companion
/// node degenerate; that case returns the exact point [n ln(xi1/n)].
pub fn bai_trln_bounds(
    xi1: f64,
    xi2: f64,
    lambda_min: f64,
    lambda_max: f64,
    n: usize,
) -> Result<Interval> {
    if n == 0 {
        return Err(Error::Domain("matrix dimension must be positive".into()));
    }
    if !(lambda_min > 0.0 && lambda_min <= lambda_max) {
        return Err(Error::Domain(format!(
            "need 0 < lambda_min <= lambda_max, got {lambda_min}, {lambda_max}"
        )));
    }
    if !(xi1 > 0.0) {
        return Err(Error::Domain("trace must be positive".into()));
    }
    let nf = n as f64;
    if xi2 < xi1 * xi1 / nf - 1e-9 * xi1 * xi1 {
        return Err(Error::Domain(format!(
            "xi2 = {xi2} below Cauchy-Schwarz floor {}",
            xi1 * xi1 / nf
        )));
    }
    // All eigenvalues equal: both companion nodes collapse.
    let degenerate = lambda_max - lambda_min <= 1e-12 * lambda_max
        || (lambda_min * nf - xi1).abs() <= 1e-12 * xi1
        || (lambda_max * nf - xi1).abs() <= 1e-12 * xi1;
    if degenerate {
        return Ok(Interval::point(nf * (xi1 / nf).ln()));
    }

    // The closed 2x2 solve, evaluated once per side.
    let eval = |l: f64| -> Result<f64> {
        let denom = l * nf - xi1;
        let t = (l * xi1 - xi2) / denom;
        if !(t > 0.0) {
            return Err(Error::Domain(format!("companion node t = {t} not positive")));
        }
        let det = l * t * t - t * l * l;
        if det.abs() < 1e-300 {
            return Ok(nf * (xi1 / nf).ln());
        }
        Ok((l.ln() * (t * t * xi1 - t * xi2) + t.ln() * (-l * l * xi1 + l * xi2)) / det)
    };
    let lo = eval(lambda_min)?;
    let hi = eval(lambda_max)?;
    Ok(Interval::ordered(lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_invariants() {
        assert!(Interval::new(1.0, 0.0).is_err());
        let i = Interval::ordered(2.0, -1.0);
        assert_eq!((i.lo, i.hi), (-1.0, 2.0));
        assert!(i.contains(0.0, 0.0));
    }

    #[test]
    fn fiedler_trivial_cases() {
        let i = fiedler_det_bounds(&[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert_eq!((i.lo, i.hi), (4.0, 4.0));

        // B = 0: both sides collapse to det(A).
        let i = fiedler_det_bounds(&[3.0, 2.0, 0.5], &[0.0, 0.0, 0.0]).unwrap();
        assert!((i.lo - 3.0).abs() < 1e-12 && (i.hi - 3.0).abs() < 1e-12);

        // Sorted-vs-reversed pairings: [3,1] + [2,0] -> {5, 9}.
        let i = fiedler_det_bounds(&[3.0, 1.0], &[2.0, 0.0]).unwrap();
        assert_eq!((i.lo, i.hi), (5.0, 9.0));
    }

    #[test]
    fn fiedler_negative_branch_enumerates() {
        // Mixed-sign spectra take the permutation branch.
        let i = fiedler_det_bounds(&[2.0, -1.0], &[1.5, -0.8]).unwrap();
        // products over the two pairings: (3.5)(-1.8)=-6.3, (1.2)(0.5)=0.6
        assert!((i.lo - -6.3).abs() < 1e-12);
        assert!((i.hi - 0.6).abs() < 1e-12);
        // the size cap applies to the enumeration branch only
        let too_big = vec![-1.0; 9];
        assert!(matches!(
            fiedler_det_bounds(&too_big, &too_big),
            Err(Error::UnsupportedSize(_))
        ));
        let fine = vec![1.0; 9];
        assert!(fiedler_det_bounds(&fine, &fine).is_ok());
    }

    #[test]
    fn bai_identity_and_123() {
        // A = I_n: degenerate branch, exact [0, 0].
        let i = bai_trln_bounds(4.0, 4.0, 1.0, 1.0, 4).unwrap();
        assert_eq!((i.lo, i.hi), (0.0, 0.0));

        // spectrum {1, 2, 3}: xi1 = 6, xi2 = 14, bracket must contain ln 6.
        let i = bai_trln_bounds(6.0, 14.0, 1.0, 3.0, 3).unwrap();
        let target = 6.0f64.ln();
        assert!(i.lo <= target && target <= i.hi, "{i:?} vs {target}");
        assert!(i.width() < 0.2);
    }
}
