//! `validate` command: run the library's cross-cutting invariants end to
//! end and print one PASS/FAIL line per property.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use txcorr::capacity::{iid_baseline, kappa, large_system_ratio};
use txcorr::covariance::{
    eigen_decompose, integrate_over_support, one_ring_correlation, sample_whitened,
    szego_spectrum, OneRingGeometry, DEFAULT_TRUNCATION,
};
use txcorr::grouping::{build_unitary_structure, flat_spectra};
use txcorr::montecarlo::{
    dual_mac_sum_capacity, ergodic_sum_capacity, trial_rng, MonteCarloConfig,
};
use txcorr::numerics::{digamma_int, digamma_mean_identity, wishart_expected_logdet};
use txcorr::pilot::{multiclass_prelog, optimal_antennas, system2_optimize, tdd_limits, TddConfig};
use txcorr::CMatrix;

type Check = (&'static str, fn() -> Result<(), String>);

fn digamma_recurrence() -> Result<(), String> {
    let mut prev = digamma_int(1).map_err(|e| e.to_string())?;
    for n in 1..2000usize {
        let next = digamma_int(n + 1).map_err(|e| e.to_string())?;
        let diff = next - prev - 1.0 / n as f64;
        if diff.abs() > 1e-13 {
            return Err(format!("recurrence off by {diff} at n={n}"));
        }
        prev = next;
    }
    Ok(())
}

fn digamma_mean() -> Result<(), String> {
    for k in [1usize, 7, 100, 5000] {
        let lhs = digamma_mean_identity(k).map_err(|e| e.to_string())?;
        let rhs = digamma_int(k + 1).map_err(|e| e.to_string())? - 1.0;
        if (lhs - rhs).abs() > 1e-12 {
            return Err(format!("identity off by {} at k={k}", lhs - rhs));
        }
    }
    Ok(())
}

fn kappa_linearity() -> Result<(), String> {
    for (x, y) in [(6usize, 3usize), (12, 12), (30, 11)] {
        let k1 = kappa(x, y, 1).map_err(|e| e.to_string())?;
        for g in [2usize, 4, 9] {
            let kg = kappa(x, y, g).map_err(|e| e.to_string())?;
            if (kg - g as f64 * k1).abs() > 1e-9 {
                return Err(format!("kappa({x},{y},{g}) != {g} kappa({x},{y},1)"));
            }
        }
        let w = wishart_expected_logdet(y, x).map_err(|e| e.to_string())?;
        if (k1 - w * std::f64::consts::LOG2_E).abs() > 1e-9 {
            return Err(format!("kappa({x},{y},1) disagrees with the Wishart mean"));
        }
    }
    Ok(())
}

fn large_system_continuity() -> Result<(), String> {
    let eps = 1e-6;
    let l = large_system_ratio(1.0 - eps, 40.0, 1.0, 1, true).map_err(|e| e.to_string())?;
    let r = large_system_ratio(1.0 + eps, 40.0, 1.0, 1, true).map_err(|e| e.to_string())?;
    if (l.value_bits - r.value_bits).abs() > 1e-9 {
        return Err(format!("jump of {} at mu = 1", l.value_bits - r.value_bits));
    }
    Ok(())
}

fn wishart_sample_mean() -> Result<(), String> {
    let (m, n) = (2usize, 4usize);
    let expect = wishart_expected_logdet(m, n).map_err(|e| e.to_string())?;
    let trials = 10_000usize;
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for t in 0..trials {
        let mut rng = trial_rng(2024, t as u64);
        let ones = vec![1.0; m];
        let w = sample_whitened(&ones, n, &mut rng);
        let v = (&w * w.adjoint()).lu().determinant().re.max(f64::MIN_POSITIVE).ln();
        sum += v;
        sumsq += v * v;
    }
    let mean = sum / trials as f64;
    let se = ((sumsq / trials as f64 - mean * mean) / trials as f64).sqrt();
    if (mean - expect).abs() > 6.0 * se {
        return Err(format!("sample {mean} vs {expect} (se {se})"));
    }
    Ok(())
}

fn one_ring_structure() -> Result<(), String> {
    let geom = OneRingGeometry::from_degrees(0.0, 10.0, 0.5, 16).map_err(|e| e.to_string())?;
    let r = one_ring_correlation(&geom).map_err(|e| e.to_string())?;
    let e = r.entries();
    for p in 0..16 {
        if (e[(p, p)].re - 1.0).abs() > 1e-12 || e[(p, p)].im.abs() > 1e-12 {
            return Err("diagonal not 1".into());
        }
        for q in 0..16 {
            if (e[(p, q)] - e[(q, p)].conj()).norm() > 1e-12 {
                return Err("not Hermitian".into());
            }
        }
    }
    let es = eigen_decompose(&r, DEFAULT_TRUNCATION).map_err(|e| e.to_string())?;
    let trace: f64 = es.eigenvalues().iter().sum();
    if (trace - 16.0).abs() > 1e-10 {
        return Err(format!("trace renormalization off: {trace}"));
    }
    let resid = (es.reconstruct() - e).norm() / e.norm();
    if resid > 1e-6 {
        return Err(format!("reconstruction residual {resid}"));
    }
    Ok(())
}

fn szego_mass() -> Result<(), String> {
    let geom = OneRingGeometry::from_degrees(0.0, 10.0, 0.5, 8).map_err(|e| e.to_string())?;
    let total = integrate_over_support(&geom, |xi| szego_spectrum(&geom, xi).unwrap(), 1e-9)
        .map_err(|e| e.to_string())?;
    if (total - 1.0).abs() > 1e-6 {
        return Err(format!("spectrum mass {total}"));
    }
    Ok(())
}

fn prelog_properties() -> Result<(), String> {
    for &(m, k) in &[(64usize, 64usize), (100, 40)] {
        let mut prev = 0.0;
        for g in 1..=12usize {
            let p = optimal_antennas(m, k, 24, g, true).map_err(|e| e.to_string())?.prelog;
            if p + 1e-12 < prev {
                return Err(format!("prelog fell at G={g}"));
            }
            prev = p;
        }
    }
    let iid = optimal_antennas(100, 100, 32, 1, false).map_err(|e| e.to_string())?;
    if iid.prelog != 8.0 {
        return Err(format!("Tc=32 saturation is {} not 8", iid.prelog));
    }
    Ok(())
}

fn multiclass_consistency() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let m = rng.random_range(1usize..200);
        let k = rng.random_range(1usize..200);
        let tc = rng.random_range(2usize..128);
        let g = rng.random_range(1usize..10);
        let mc = multiclass_prelog(m, k, tc, g, 1).map_err(|e| e.to_string())?;
        let oa = optimal_antennas(m, k, tc, g, true).map_err(|e| e.to_string())?;
        if (mc - oa.prelog).abs() > 1e-12 {
            return Err(format!("T=1 mismatch at M={m} K={k} Tc={tc} G={g}"));
        }
    }
    Ok(())
}

fn tdd_brute_force() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let n2 = rng.random_range(1usize..10);
        let n1 = n2 + rng.random_range(1usize..16);
        let cfg = TddConfig::new(
            rng.random_range(1.0f64..16.0),
            rng.random_range(2usize..128),
            n1,
            n2,
            rng.random_range(1usize..1500),
        )
        .map_err(|e| e.to_string())?;
        let k = rng.random_range(1usize..300);
        let row = tdd_limits(&[k], &cfg).map_err(|e| e.to_string())?.rows[0];
        let lln = cfg.alpha * k as f64 >= cfg.n_lln as f64;
        let dof = |q: usize| {
            let qf = q as f64;
            if lln {
                qf * (cfg.tc as f64 - qf / cfg.n1 as f64 - 1.0)
            } else {
                qf * (cfg.tc as f64 - qf / cfg.n1 as f64 - qf / cfg.n2 as f64)
            }
        };
        let mut best = 1usize;
        for q in 2..=k {
            if dof(q) > dof(best) {
                best = q;
            }
        }
        if row.q_opt != best {
            return Err(format!("q mismatch at {cfg:?} K={k}"));
        }
    }
    Ok(())
}

fn system2_certificate() -> Result<(), String> {
    let res = system2_optimize(200, 40, 64, 10, 30.0).map_err(|e| e.to_string())?;
    let best = res.m_p2_star.unwrap();
    if best <= res.m_star {
        return Err(format!("M_p2 = {best} did not exceed M* = {}", res.m_star));
    }
    let f_best = res.f_curve.iter().find(|(q, _)| *q == best).unwrap().1;
    if res.f_curve.iter().any(|&(_, f)| f > f_best) {
        return Err("curve exceeds the returned argmax".into());
    }
    Ok(())
}

fn dual_mac_grid_oracle() -> Result<(), String> {
    let mut rng = trial_rng(42, 0);
    let h = sample_whitened(&[1.0, 1.0], 2, &mut rng);
    let p = 10.0;
    let sol = dual_mac_sum_capacity(std::slice::from_ref(&h), p).map_err(|e| e.to_string())?;
    let complex = |x: f64| nalgebra::Complex::new(x, 0.0);
    let mut best = f64::MIN;
    for i in 0..=10_000 {
        let p1 = p * i as f64 / 10_000.0;
        let a = CMatrix::identity(2, 2)
            + h.column(0) * h.column(0).adjoint() * complex(p1)
            + h.column(1) * h.column(1).adjoint() * complex(p - p1);
        best = best.max(a.lu().determinant().re.log2());
    }
    if (sol.value_bits - best).abs() > 1e-4 {
        return Err(format!("solver {} vs grid {best}", sol.value_bits));
    }
    Ok(())
}

fn mc_determinism() -> Result<(), String> {
    let gs = build_unitary_structure(4, &flat_spectra(4, 2).unwrap(), 2)
        .map_err(|e| e.to_string())?;
    let cfg = MonteCarloConfig { trials: 64, seed: 3, ..Default::default() };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| ergodic_sum_capacity(&gs, &cfg, 100.0))
    };
    let a = run(1).map_err(|e| e.to_string())?;
    let b = run(4).map_err(|e| e.to_string())?;
    if a.mean_bits.to_bits() != b.mean_bits.to_bits() {
        return Err("means differ across thread counts".into());
    }
    Ok(())
}

fn theorem1_reduction() -> Result<(), String> {
    let m = 4;
    let g = 2;
    let kp = 2;
    let gs = build_unitary_structure(m, &flat_spectra(m, g).unwrap(), kp)
        .map_err(|e| e.to_string())?;
    for t in 0..128u64 {
        let mut rng = trial_rng(5, t);
        let whitened: Vec<CMatrix> = gs
            .groups()
            .iter()
            .map(|es| sample_whitened(es.eigenvalues(), kp, &mut rng))
            .collect();
        let mut full = CMatrix::zeros(m, g * kp);
        for (gi, w) in whitened.iter().enumerate() {
            let h = gs.groups()[gi].basis() * w;
            for c in 0..kp {
                full.set_column(gi * kp + c, &h.column(c));
            }
        }
        let v_full = dual_mac_sum_capacity(&[full], 50.0).map_err(|e| e.to_string())?;
        let v_red = dual_mac_sum_capacity(&whitened, 50.0).map_err(|e| e.to_string())?;
        if (v_full.value_bits - v_red.value_bits).abs() > 1e-3 {
            return Err(format!(
                "trial {t}: full {} vs reduced {}",
                v_full.value_bits, v_red.value_bits
            ));
        }
    }
    Ok(())
}

fn iid_baseline_against_mc() -> Result<(), String> {
    let gs = build_unitary_structure(8, &[vec![1.0; 8]], 4).map_err(|e| e.to_string())?;
    let cfg = MonteCarloConfig { trials: 400, seed: 77, ..Default::default() };
    let est = ergodic_sum_capacity(&gs, &cfg, 1e3).map_err(|e| e.to_string())?;
    let base = iid_baseline(8, 4, 1e3).map_err(|e| e.to_string())?.value_bits;
    if (est.mean_bits - base).abs() > 1.0 {
        return Err(format!("MC {} vs baseline {base}", est.mean_bits));
    }
    Ok(())
}

/// Run every invariant; returns (passed, failed).
pub fn run_validation() -> (usize, usize) {
    let checks: Vec<Check> = vec![
        ("digamma_recurrence", digamma_recurrence),
        ("digamma_mean_identity", digamma_mean),
        ("kappa_g_linearity", kappa_linearity),
        ("large_system_continuity", large_system_continuity),
        ("wishart_sample_mean", wishart_sample_mean),
        ("one_ring_structure", one_ring_structure),
        ("szego_spectrum_mass", szego_mass),
        ("prelog_properties", prelog_properties),
        ("multiclass_consistency", multiclass_consistency),
        ("tdd_brute_force", tdd_brute_force),
        ("system2_certificate", system2_certificate),
        ("dual_mac_grid_oracle", dual_mac_grid_oracle),
        ("mc_determinism", mc_determinism),
        ("theorem1_reduction", theorem1_reduction),
        ("iid_baseline_monte_carlo", iid_baseline_against_mc),
    ];
    let mut passed = 0;
    let mut failed = 0;
    for (name, check) in checks {
        match check() {
            Ok(()) => {
                println!("PASS {name}");
                passed += 1;
            }
            Err(msg) => {
                println!("FAIL {name}: {msg}");
                failed += 1;
            }
        }
    }
    (passed, failed)
}
