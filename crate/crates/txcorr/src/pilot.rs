//! Pilot-overhead optimization for pilot-aided downlink systems.
//!
//! Training consumes channel uses out of each coherence block of `Tc`
//! symbols. With G mutually orthogonal group eigenspaces a common pilot
//! can be reused across groups, so training Q antennas costs only
//! ceil(Q/G) symbols. System I picks the antenna count that maximizes the
//! pre-log factor alone; system II also counts the power gain from using
//! more than K antennas when M > K. The TDD limits account for the
//! downlink per-user demodulation pilot that conventional large-scale
//! arrays cannot share until they reach the law-of-large-numbers regime.

use crate::capacity::{kappa, large_system_ratio, CapacityResult, Regime};
use crate::error::{Error, Result};
use crate::grouping::SystemParams;
use serde::{Deserialize, Serialize};

const E: f64 = std::f64::consts::E;

/// Which pilot-aided law produced a [`PilotSystemResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PilotRegime {
    Correlated,
    Iid,
    SystemTwo,
    /// M <= K: system II collapses onto system I.
    SystemTwoDegenerate,
}

/// Result of a pilot-overhead optimization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PilotSystemResult {
    /// DoF-optimal antenna/stream count min(M, K, floor(Tc G / 2)).
    pub m_star: usize,
    /// Net multiplexing gain M* (1 - M*/(Tc G)).
    pub prelog: f64,
    /// System II antenna count, when evaluated.
    pub m_p2_star: Option<usize>,
    /// Full objective curve (Q, f(Q)) scanned by system II.
    pub f_curve: Vec<(usize, f64)>,
    /// Per-user rate ratio at the system II optimum (constant at zero).
    pub ratio_per_k: Option<f64>,
    pub regime: PilotRegime,
}

fn check_positive(vals: &[(usize, &str)]) -> Result<()> {
    for &(v, name) in vals {
        if v == 0 {
            return Err(Error::Domain(format!("{name} must be positive")));
        }
    }
    Ok(())
}

/// Exact net pre-log M* (1 - M*/(Tc G)) computed in integer arithmetic:
/// M* (Tc G - M*) / (Tc G).
fn prelog_exact(m_star: usize, tc_g: usize) -> f64 {
    (m_star * (tc_g - m_star)) as f64 / tc_g as f64
}

/// DoF-optimal transmit antenna count and net multiplexing gain of
/// pilot-aided system I. The i.i.d. case is the G = 1 special case and
/// must be called with `correlated = false`, `g = 1`.
pub fn optimal_antennas(
    m: usize,
    k: usize,
    tc: usize,
    g: usize,
    correlated: bool,
) -> Result<PilotSystemResult> {
    check_positive(&[(m, "M"), (k, "K"), (tc, "Tc"), (g, "G")])?;
    if !correlated && g != 1 {
        return Err(Error::Domain("iid case requires G = 1".into()));
    }
    let tc_g = tc * g;
    let m_star = m.min(k).min(tc_g / 2);
    if m_star == 0 {
        return Err(Error::Domain(format!("no feasible training: Tc G = {tc_g} < 2")));
    }
    Ok(PilotSystemResult {
        m_star,
        prelog: prelog_exact(m_star, tc_g),
        m_p2_star: None,
        f_curve: Vec::new(),
        ratio_per_k: None,
        regime: if correlated { PilotRegime::Correlated } else { PilotRegime::Iid },
    })
}

/// One point of the multiplexing-gain figure.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Figure1Row {
    pub min_mk: usize,
    pub tc: usize,
    pub g: usize,
    pub prelog: f64,
}

/// Net pre-log vs min(M, K) for each (Tc, G) pair; G = 1 rows are the
/// uncorrelated baseline.
pub fn figure1_dataset(
    tc_list: &[usize],
    g_list: &[usize],
    min_mk_grid: &[usize],
) -> Result<Vec<Figure1Row>> {
    let mut rows = Vec::new();
    for &tc in tc_list {
        for &g in g_list {
            for &x in min_mk_grid {
                let res = optimal_antennas(x, x, tc, g, g > 1)?;
                rows.push(Figure1Row { min_mk: x, tc, g, prelog: res.prelog });
            }
        }
    }
    Ok(rows)
}

/// Asymptotic regime selector for [`system1_rate_ratio`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum System1Regime {
    /// G grows with M; r_p1 = M*/G and K' stay finite.
    LargeG,
    /// r grows with M at fixed G.
    LargeR,
}

/// Per-M* rate ratio of pilot-aided system I, scaled by the training
/// factor (1 - nu) with nu = M*/(Tc G).
///
/// Large-G with mu < 1 follows the r < K' high-SNR law (regime tag
/// `RLtKp`), large-G with mu >= 1 the r >= K' law (`RGeKp`), and large-r
/// the large-system law at mu_p1 = M*/K <= 1 (`LargeSystemMuLt1`). The
/// bracket is the constant range of the underlying law scaled by (1 - nu);
/// `zeta` is the eigenvalue condition-number bound, 1 for flat spectra.
pub fn system1_rate_ratio(
    params: &SystemParams,
    regime: System1Regime,
    lambda_min: f64,
    zeta: f64,
) -> Result<CapacityResult> {
    if !(zeta >= 1.0) {
        return Err(Error::Domain(format!("condition bound zeta must be >= 1, got {zeta}")));
    }
    let p = params.p;
    let m_star = params.m_star();
    let nu = params.nu();
    let scale = 1.0 - nu;
    match regime {
        System1Regime::LargeG => {
            let r_p1 = m_star / params.g;
            if r_p1 == 0 {
                return Err(Error::Domain(format!(
                    "G = {} exceeds M* = {m_star}; no per-group rank left",
                    params.g
                )));
            }
            let kp = params.kp;
            let mu = params.mu();
            if mu < 1.0 {
                let inner = (p / r_p1 as f64).log2() + kappa(kp, r_p1, 1)? / r_p1 as f64;
                let lo = (mu / zeta).log2().min(0.0);
                Ok(CapacityResult {
                    value_bits: scale * inner,
                    bracket: crate::numerics::Interval::new(lo, 0.0)?.scaled(scale),
                    regime: Regime::RLtKp,
                    per_dimension: true,
                })
            } else {
                let inner = (p / r_p1 as f64).log2() + kappa(kp, kp, 1)? / kp as f64;
                Ok(CapacityResult {
                    value_bits: scale * inner,
                    bracket: crate::numerics::Interval::ordered(-(zeta.log2()), mu.log2())
                        .scaled(scale),
                    regime: Regime::RGeKp,
                    per_dimension: true,
                })
            }
        }
        System1Regime::LargeR => {
            let mu_p1 = m_star as f64 / params.k as f64;
            if mu_p1 > 1.0 {
                return Err(Error::Domain(format!(
                    "mu_p1 = {mu_p1} > 1 cannot occur in system I"
                )));
            }
            let ls = large_system_ratio(mu_p1, p, lambda_min, params.g, false)?;
            Ok(CapacityResult {
                value_bits: scale * ls.value_bits,
                bracket: ls.bracket.scaled(scale),
                regime: Regime::LargeSystemMuLt1,
                per_dimension: true,
            })
        }
    }
}

/// System II objective: total-bits proxy
/// f(Q) = M* (Tc - ceil(Q/G)) [log2((P/e)(Q/K)) + (Q/K - 1) log2(Q/(Q-K))
///        + log2(Q/K)], with the Q = K middle term at its limit 0.
fn system2_objective(m_star: usize, tc: usize, g: usize, k: usize, p: f64, q: usize) -> f64 {
    let train = q.div_ceil(g);
    let symbols = tc as f64 - train as f64;
    let mu = q as f64 / k as f64;
    let edge = if q == k { 0.0 } else { (mu - 1.0) * (mu / (mu - 1.0)).log2() };
    let per_user = (p / E * mu).log2() + edge + mu.log2();
    m_star as f64 * symbols * per_user
}

/// Optimal antenna count for pilot-aided system II (M > K): exhaustive
/// integer argmax of f(Q) over Q in [max(M*, K), M], ties broken toward
/// the smallest Q. Returns the full curve, the argmax, and the per-user
/// rate ratio at the optimum. For M <= K the system degenerates to
/// system I. The scan never drops below K, where the power-gain bracket
/// (a mu >= 1 law) is undefined; M* falls below K only when
/// floor(Tc G / 2) < K.
pub fn system2_optimize(
    m: usize,
    k: usize,
    tc: usize,
    g: usize,
    p: f64,
) -> Result<PilotSystemResult> {
    check_positive(&[(m, "M"), (k, "K"), (tc, "Tc"), (g, "G")])?;
    if !(p > 0.0) {
        return Err(Error::Domain("transmit SNR must be positive".into()));
    }
    let tc_g = tc * g;
    let m_star = m.min(k).min(tc_g / 2);
    if m_star == 0 {
        return Err(Error::Domain(format!("no feasible training: Tc G = {tc_g} < 2")));
    }
    let prelog = prelog_exact(m_star, tc_g);
    if m <= k {
        return Ok(PilotSystemResult {
            m_star,
            prelog,
            m_p2_star: Some(m_star),
            f_curve: Vec::new(),
            ratio_per_k: None,
            regime: PilotRegime::SystemTwoDegenerate,
        });
    }

    let scan_lo = m_star.max(k);
    let mut f_curve = Vec::with_capacity(m - scan_lo + 1);
    let mut best_q = scan_lo;
    let mut best_f = f64::NEG_INFINITY;
    for q in scan_lo..=m {
        let f = system2_objective(m_star, tc, g, k, p, q);
        f_curve.push((q, f));
        if f > best_f {
            best_f = f;
            best_q = q;
        }
    }

    let nu_p2 = best_q as f64 / tc_g as f64;
    let mu_p2 = best_q as f64 / k as f64;
    let edge = if best_q == k { 0.0 } else { (mu_p2 - 1.0) * (mu_p2 / (mu_p2 - 1.0)).log2() };
    let ratio = (1.0 - nu_p2) * ((mu_p2 * p / E).log2() + edge);

    Ok(PilotSystemResult {
        m_star,
        prelog,
        m_p2_star: Some(best_q),
        f_curve,
        ratio_per_k: Some(ratio),
        regime: PilotRegime::SystemTwo,
    })
}

/// One point of the system I vs system II comparison.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Figure5Row {
    pub min_mk: usize,
    pub tc: usize,
    /// 1 = system I, 2 = system II.
    pub system: u8,
    pub rate_bits: f64,
}

/// Asymptotic sum-rate upper bounds of the two pilot-aided systems vs
/// min(M, K) = K at fixed mu = M/K > 1.
pub fn figure5_dataset(
    mu: f64,
    g: usize,
    p: f64,
    tc_list: &[usize],
    min_mk_grid: &[usize],
) -> Result<Vec<Figure5Row>> {
    if !(mu >= 1.0) {
        return Err(Error::Domain("figure 5 comparison needs mu >= 1".into()));
    }
    check_positive(&[(g, "G")])?;
    let mut rows = Vec::new();
    for &tc in tc_list {
        for &x in min_mk_grid {
            let k = x;
            let m = (mu * x as f64).round() as usize;
            let tc_g = tc * g;
            let m_star = m.min(k).min(tc_g / 2);
            let nu = m_star as f64 / tc_g as f64;
            let mu_p1 = m_star as f64 / k as f64;
            let inner = large_system_ratio(mu_p1, p, 1.0, g, true)?.value_bits;
            let rate1 = m_star as f64 * (1.0 - nu) * inner;
            rows.push(Figure5Row { min_mk: x, tc, system: 1, rate_bits: rate1 });

            let s2 = system2_optimize(m, k, tc, g, p)?;
            let rate2 = match s2.ratio_per_k {
                Some(ratio) => k as f64 * ratio,
                None => rate1,
            };
            rows.push(Figure5Row { min_mk: x, tc, system: 2, rate_bits: rate2 });
        }
    }
    Ok(rows)
}

/// Net pre-log with T user classes served on orthogonal resources:
/// M* (1 - M* T/(Tc G)) with M* = min(M, K, floor(Tc G/(2T))); zero when
/// Tc G < 2T leaves no feasible training split.
pub fn multiclass_prelog(m: usize, k: usize, tc: usize, g: usize, t: usize) -> Result<f64> {
    check_positive(&[(m, "M"), (k, "K"), (tc, "Tc"), (g, "G"), (t, "T")])?;
    let tc_g = tc * g;
    if tc_g < 2 * t {
        return Ok(0.0);
    }
    let m_star = m.min(k).min(tc_g / (2 * t));
    Ok((m_star * (tc_g - m_star * t)) as f64 / tc_g as f64)
}

/// TDD large-scale configuration: M = alpha K antennas, frequency
/// smoothness intervals N1 (common pilot) > N2 (per-user demodulation
/// pilot), and the LLN antenna threshold above which the demodulation
/// pilot is shared.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TddConfig {
    pub alpha: f64,
    pub tc: usize,
    pub n1: usize,
    pub n2: usize,
    pub n_lln: usize,
}

impl TddConfig {
    pub fn new(alpha: f64, tc: usize, n1: usize, n2: usize, n_lln: usize) -> Result<Self> {
        if !(alpha >= 1.0) {
            return Err(Error::Validation(format!("alpha must be >= 1, got {alpha}")));
        }
        if n2 == 0 || n1 <= n2 {
            return Err(Error::Validation(format!("need N1 > N2 >= 1, got N1={n1}, N2={n2}")));
        }
        if tc == 0 || n_lln == 0 {
            return Err(Error::Validation("Tc and N_LLN must be positive".into()));
        }
        Ok(Self { alpha, tc, n1, n2, n_lln })
    }
}

/// Operating regime of a conventional TDD large-scale system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TddRegime {
    /// All K users scheduled; DoF grow linearly.
    Linear,
    /// Per-user pilot overhead caps the schedule below K.
    Saturated,
    /// M >= N_LLN: demodulation pilot shared, cap relaxes.
    Lln,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TddRow {
    pub k: usize,
    pub regime: TddRegime,
    /// Optimal number of scheduled users.
    pub q_opt: usize,
    /// Total DoF objective at the optimum.
    pub dof: f64,
}

/// Regime breakpoints of the DoF-vs-K curve (real-valued).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TddBreakpoints {
    /// K where the below-LLN schedule saturates: Tc N1 N2 / (2(N1 + N2)).
    pub saturation_start: f64,
    /// K where M = alpha K reaches N_LLN.
    pub lln_entry: f64,
    /// Post-LLN schedule ceiling (Tc - 1) N1 / 2.
    pub post_lln_ceiling: f64,
    /// True when the three breakpoints are strictly increasing (the
    /// figure's ordering assumption); reported, never enforced.
    pub ordering_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TddTable {
    pub breakpoints: TddBreakpoints,
    pub rows: Vec<TddRow>,
}

/// Best integer q in [1, k] for a concave quadratic with real maximizer
/// `q_star`: the better of floor/ceil after clamping, smaller q on ties.
fn best_integer_q(q_star: f64, k: usize, f: impl Fn(usize) -> f64) -> usize {
    let clamp = |q: f64| -> usize { (q.max(1.0).min(k as f64)) as usize };
    let lo = clamp(q_star.floor());
    let hi = clamp(q_star.ceil());
    if lo == hi {
        return lo;
    }
    if f(hi) > f(lo) {
        hi
    } else {
        lo
    }
}

fn dof_below_lln(cfg: &TddConfig, q: usize) -> f64 {
    let qf = q as f64;
    qf * (cfg.tc as f64 - qf / cfg.n1 as f64 - qf / cfg.n2 as f64)
}

fn dof_above_lln(cfg: &TddConfig, q: usize) -> f64 {
    let qf = q as f64;
    qf * (cfg.tc as f64 - qf / cfg.n1 as f64 - 1.0)
}

/// Optimal scheduled-user count per K in `k_grid`, plus the regime
/// breakpoints. Below the LLN threshold orthogonal per-user pilots cost
/// Q/N2 extra symbols; above it only the common pilot and one shared
/// demodulation symbol remain.
pub fn tdd_limits(k_grid: &[usize], cfg: &TddConfig) -> Result<TddTable> {
    TddConfig::new(cfg.alpha, cfg.tc, cfg.n1, cfg.n2, cfg.n_lln)?;
    let (n1, n2, tc) = (cfg.n1 as f64, cfg.n2 as f64, cfg.tc as f64);
    let saturation_start = tc * n1 * n2 / (2.0 * (n1 + n2));
    let lln_entry = cfg.n_lln as f64 / cfg.alpha;
    let post_lln_ceiling = (tc - 1.0) * n1 / 2.0;
    let ordering_ok = saturation_start < lln_entry && lln_entry < post_lln_ceiling;

    let mut rows = Vec::with_capacity(k_grid.len());
    for &k in k_grid {
        if k == 0 {
            return Err(Error::Domain("K grid entries must be positive".into()));
        }
        let m = cfg.alpha * k as f64;
        let row = if m < cfg.n_lln as f64 {
            let q = best_integer_q(saturation_start, k, |q| dof_below_lln(cfg, q));
            let regime = if q == k { TddRegime::Linear } else { TddRegime::Saturated };
            TddRow { k, regime, q_opt: q, dof: dof_below_lln(cfg, q) }
        } else {
            let q = best_integer_q(post_lln_ceiling, k, |q| dof_above_lln(cfg, q));
            TddRow { k, regime: TddRegime::Lln, q_opt: q, dof: dof_above_lln(cfg, q) }
        };
        rows.push(row);
    }
    Ok(TddTable {
        breakpoints: TddBreakpoints { saturation_start, lln_entry, post_lln_ceiling, ordering_ok },
        rows,
    })
}
