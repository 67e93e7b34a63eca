//! Per-command dataset builders.

use crate::config::*;
use crate::output::{sig12, Table};
use txcorr::capacity::highsnr_sum_capacity;
use txcorr::covariance::{one_ring_correlation, OneRingGeometry};
use txcorr::grouping::{flat_spectra, SystemParams};
use txcorr::montecarlo::{figure4_dataset, figure7_dataset, GeometryDistribution, MonteCarloConfig};
use txcorr::pilot::{figure1_dataset, figure5_dataset, system2_optimize, tdd_limits, TddConfig, TddRegime};

pub struct RunOutput {
    pub table: Table,
    /// Count of Monte Carlo trials whose solver hit the iteration cap.
    pub nonconverged: usize,
}

fn grid(lo: usize, hi: usize, step: usize) -> Result<Vec<usize>, ConfigError> {
    if step == 0 {
        return Err(ConfigError("grid step must be positive".into()));
    }
    if hi < lo {
        return Err(ConfigError(format!("grid range [{lo}, {hi}] is empty")));
    }
    Ok((lo..=hi).step_by(step).collect())
}

pub fn run_figure1(p: &Figure1Params) -> Result<RunOutput, txcorr::Error> {
    let g = (1..=p.min_mk_max)
        .step_by(p.min_mk_step.max(1))
        .collect::<Vec<_>>();
    let rows = figure1_dataset(&p.tc_list, &p.g_list, &g)?;
    let mut table = Table::new(vec!["min_mk", "tc", "g", "prelog"]);
    for r in rows {
        table.push(vec![
            r.min_mk.to_string(),
            r.tc.to_string(),
            r.g.to_string(),
            sig12(r.prelog),
        ]);
    }
    Ok(RunOutput { table, nonconverged: 0 })
}

pub fn run_figure3(p: &Figure3Params) -> Result<RunOutput, txcorr::Error> {
    let res = system2_optimize(p.m, p.k, p.tc, p.g, p.p)?;
    let best = res.m_p2_star.unwrap_or(res.m_star);
    let mut table = Table::new(vec!["q", "f_q", "is_optimal"]);
    for (q, f) in &res.f_curve {
        table.push(vec![
            q.to_string(),
            sig12(*f),
            if *q == best { "1".into() } else { "0".into() },
        ]);
    }
    Ok(RunOutput { table, nonconverged: 0 })
}

pub fn run_figure4(p: &Figure4Params, seed: u64) -> Result<RunOutput, txcorr::Error> {
    let cfg = MonteCarloConfig {
        trials: p.trials,
        seed,
        snr_grid_db: p.snr_grid_db.clone(),
        ..Default::default()
    };
    let geo = GeometryDistribution {
        theta_deg: p.theta_deg,
        delta_deg: p.delta_deg,
        spacing: p.spacing,
    };
    let rows = figure4_dataset(&cfg, &geo, p.m, &p.k_list)?;
    let mut table =
        Table::new(vec!["snr_db", "k", "m", "variant", "mean_bits", "stderr_bits", "trials"]);
    let mut nonconverged = 0;
    for r in rows {
        nonconverged = nonconverged.max(r.sample.nonconverged);
        table.push(vec![
            sig12(r.snr_db),
            r.k.to_string(),
            r.m.to_string(),
            r.variant.to_string(),
            sig12(r.sample.mean_bits),
            sig12(r.sample.std_error_bits),
            r.sample.trials_used.to_string(),
        ]);
    }
    Ok(RunOutput { table, nonconverged })
}

pub fn run_figure5(p: &Figure5Params) -> Result<RunOutput, Box<dyn std::error::Error>> {
    let xs = grid(p.min_mk_min, p.min_mk_max, p.min_mk_step)?;
    let rows = figure5_dataset(p.mu, p.g, p.p, &p.tc_list, &xs)?;
    let mut table = Table::new(vec!["min_mk", "tc", "system", "rate_bits"]);
    for r in rows {
        table.push(vec![
            r.min_mk.to_string(),
            r.tc.to_string(),
            r.system.to_string(),
            sig12(r.rate_bits),
        ]);
    }
    Ok(RunOutput { table, nonconverged: 0 })
}

pub fn run_figure6(p: &Figure6Params) -> Result<RunOutput, Box<dyn std::error::Error>> {
    let cfg = TddConfig::new(p.alpha, p.tc, p.n1, p.n2, p.n_lln)?;
    let ks = grid(p.k_step.max(1), p.k_max, p.k_step)?;
    let t = tdd_limits(&ks, &cfg)?;
    let mut table = Table::new(vec!["k", "regime", "dof"]);
    for r in &t.rows {
        let regime = match r.regime {
            TddRegime::Linear => "linear",
            TddRegime::Saturated => "saturated",
            TddRegime::Lln => "lln",
        };
        table.push(vec![r.k.to_string(), regime.to_string(), sig12(r.dof)]);
    }
    Ok(RunOutput { table, nonconverged: 0 })
}

pub fn run_figure7(p: &Figure7Params, seed: u64) -> Result<RunOutput, txcorr::Error> {
    let cfg = MonteCarloConfig { trials: p.trials, seed, ..Default::default() };
    let geo = GeometryDistribution {
        theta_deg: p.theta_deg,
        delta_deg: p.delta_deg,
        spacing: p.spacing,
    };
    let rows = figure7_dataset(&cfg, &geo, &p.m_list, &p.k_list, p.snr_db, p.preselect_factor)?;
    let mut table =
        Table::new(vec!["k", "m", "delta_range", "variant", "mean_bits", "stderr_bits"]);
    let mut nonconverged = 0;
    for r in rows {
        nonconverged = nonconverged.max(r.sample.nonconverged);
        table.push(vec![
            r.k.to_string(),
            r.m.to_string(),
            format!("{}-{}", sig12(r.delta_deg.0), sig12(r.delta_deg.1)),
            r.variant.to_string(),
            sig12(r.sample.mean_bits),
            sig12(r.sample.std_error_bits),
        ]);
    }
    Ok(RunOutput { table, nonconverged })
}

pub fn run_bounds(p: &BoundsParams) -> Result<RunOutput, txcorr::Error> {
    let params = SystemParams::symmetric(p.m, p.k, p.g, p.tc, 1.0)?;
    let spectra = flat_spectra(p.m, p.g)?;
    let iid_params = SystemParams::symmetric(p.m, p.k, 1, p.tc, 1.0)?;
    let iid_spectra = vec![vec![1.0; p.m]];
    let mut table = Table::new(vec![
        "p_db",
        "m",
        "k",
        "g",
        "regime",
        "value_bits",
        "bracket_lo_bits",
        "bracket_hi_bits",
        "iid_bits",
        "gap_bits",
    ]);
    for &p_db in &p.p_db_list {
        let snr = 10f64.powf(p_db / 10.0);
        let corr = highsnr_sum_capacity(&params, &spectra, snr)?;
        let iid = highsnr_sum_capacity(&iid_params, &iid_spectra, snr)?;
        let regime = serde_json::to_string(&corr.regime)
            .map(|s| s.trim_matches('"').to_string())
            .unwrap_or_default();
        table.push(vec![
            sig12(p_db),
            p.m.to_string(),
            p.k.to_string(),
            p.g.to_string(),
            regime,
            sig12(corr.value_bits),
            sig12(corr.bracket.lo),
            sig12(corr.bracket.hi),
            sig12(iid.value_bits),
            sig12(corr.value_bits - iid.value_bits),
        ]);
    }
    Ok(RunOutput { table, nonconverged: 0 })
}

pub enum CovarianceOutput {
    Json(String),
    Table(Table),
}

pub fn run_covariance(
    p: &CovarianceParams,
    format: OutputFormat,
) -> Result<CovarianceOutput, txcorr::Error> {
    let geom = OneRingGeometry::from_degrees(p.theta_deg, p.delta_deg, p.spacing, p.m)?;
    let r = one_ring_correlation(&geom)?;
    match format {
        OutputFormat::Json => {
            let mut text = r.to_json()?;
            text.push('\n');
            Ok(CovarianceOutput::Json(text))
        }
        OutputFormat::Csv => {
            let mut table = Table::new(vec!["lag", "re", "im"]);
            for (k, lag) in r.lags().expect("one-ring matrices are Toeplitz").iter().enumerate() {
                table.push(vec![k.to_string(), sig12(lag.re), sig12(lag.im)]);
            }
            Ok(CovarianceOutput::Table(table))
        }
    }
}
