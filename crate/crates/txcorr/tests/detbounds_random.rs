//! Determinant-bound containment over random Hermitian matrices with
//! prescribed spectra: the brute-force side of the bracket lemmas.

use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use txcorr::numerics::{bai_trln_bounds, fiedler_det_bounds};
use txcorr::CMatrix;

fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let gauss = CMatrix::from_fn(n, n, |_, _| {
        Complex::new(rng.random_range(-1.0f64..1.0), rng.random_range(-1.0f64..1.0))
    });
    let qr = gauss.qr();
    qr.q()
}

fn hermitian_with_spectrum(spec: &[f64], rng: &mut ChaCha8Rng) -> CMatrix {
    let n = spec.len();
    let q = random_unitary(n, rng);
    let d = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex::new(spec[i], 0.0)
        } else {
            Complex::new(0.0, 0.0)
        }
    });
    &q * d * q.adjoint()
}

/// det(A + B) sits inside the pairing bracket for 1000 random Hermitian
/// pairs with fixed (possibly sign-mixed) spectra, n <= 6.
#[test]
fn determinant_sum_bracket_contains_truth() {
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    for trial in 0..1000 {
        let n = rng.random_range(1usize..=6);
        let mut spec_a: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0f64..4.0)).collect();
        let mut spec_b: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0f64..4.0)).collect();
        spec_a.sort_by(|x, y| y.partial_cmp(x).unwrap());
        spec_b.sort_by(|x, y| y.partial_cmp(x).unwrap());
        let bounds = fiedler_det_bounds(&spec_a, &spec_b).unwrap();

        let a = hermitian_with_spectrum(&spec_a, &mut rng);
        let b = hermitian_with_spectrum(&spec_b, &mut rng);
        let det = (a + b).lu().determinant().re;
        assert!(
            bounds.contains(det, 1e-9),
            "trial {trial}: det {det} outside {bounds:?} for {spec_a:?} + {spec_b:?}"
        );
    }
}

/// tr(ln A) sits inside the two-point quadrature bracket for 1000 random
/// SPD matrices, n <= 12.
#[test]
fn trace_log_bracket_contains_truth() {
    let mut rng = ChaCha8Rng::seed_from_u64(2002);
    for trial in 0..1000 {
        let n = rng.random_range(1usize..=12);
        let spec: Vec<f64> = (0..n).map(|_| rng.random_range(0.05f64..8.0)).collect();
        let xi1: f64 = spec.iter().sum();
        let xi2: f64 = spec.iter().map(|l| l * l).sum();
        let lmin = spec.iter().cloned().fold(f64::MAX, f64::min);
        let lmax = spec.iter().cloned().fold(f64::MIN, f64::max);
        let bounds = bai_trln_bounds(xi1, xi2, lmin, lmax, n).unwrap();
        let truth: f64 = spec.iter().map(|l| l.ln()).sum();
        assert!(
            bounds.contains(truth, 1e-9),
            "trial {trial}: tr ln = {truth} outside {bounds:?} for spectrum {spec:?}"
        );
        // the bracket is achieved through an actual rotated matrix too
        let a = hermitian_with_spectrum(&spec, &mut rng);
        let tr: f64 = (0..n).map(|i| a[(i, i)].re).sum();
        assert!((tr - xi1).abs() < 1e-8 * xi1.abs().max(1.0));
    }
}
