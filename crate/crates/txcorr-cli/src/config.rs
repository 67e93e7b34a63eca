//! Experiment configuration: a single flat JSON document fully determines
//! one artifact. Unknown fields are rejected so a config cannot silently
//! carry typos.

use serde::Deserialize;
use serde_json::Value;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
#[derive(Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}


#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Figure1,
    Figure3,
    Figure4,
    Figure5,
    Figure6,
    Figure7,
    Bounds,
    Covariance,
    Validate,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default)]
    pub parameters: Value,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_path: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError(format!("invalid config: {e}")))
    }

    /// Parse `parameters` into the per-command struct, rejecting unknown
    /// keys and filling documented defaults.
    pub fn params<T: serde::de::DeserializeOwned>(&self) -> Result<T, ConfigError> {
        let v = if self.parameters.is_null() {
            Value::Object(serde_json::Map::new())
        } else {
            self.parameters.clone()
        };
        serde_json::from_value(v).map_err(|e| ConfigError(format!("invalid parameters: {e}")))
    }
}

fn default_tc_list() -> Vec<usize> {
    vec![32, 100]
}
fn default_g_list() -> Vec<usize> {
    vec![1, 4, 8]
}
fn default_min_mk_max() -> usize {
    256
}
fn default_one() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Figure1Params {
    #[serde(default = "default_tc_list")]
    pub tc_list: Vec<usize>,
    #[serde(default = "default_g_list")]
    pub g_list: Vec<usize>,
    #[serde(default = "default_min_mk_max")]
    pub min_mk_max: usize,
    #[serde(default = "default_one")]
    pub min_mk_step: usize,
}

fn default_m200() -> usize {
    200
}
fn default_k40() -> usize {
    40
}
fn default_tc64() -> usize {
    64
}
fn default_g10() -> usize {
    10
}
fn default_p30() -> f64 {
    30.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Figure3Params {
    #[serde(default = "default_m200")]
    pub m: usize,
    #[serde(default = "default_k40")]
    pub k: usize,
    #[serde(default = "default_tc64")]
    pub tc: usize,
    #[serde(default = "default_g10")]
    pub g: usize,
    #[serde(default = "default_p30")]
    pub p: f64,
}

fn default_m8() -> usize {
    8
}
fn default_fig4_k() -> Vec<usize> {
    vec![4, 32]
}
fn default_snr_grid() -> Vec<f64> {
    vec![-20.0, -10.0, 0.0, 10.0, 15.0, 20.0, 25.0, 30.0]
}
fn default_trials_1000() -> usize {
    1000
}
fn default_theta_range() -> (f64, f64) {
    (-60.0, 60.0)
}
fn default_delta_fig4() -> (f64, f64) {
    (5.0, 10.0)
}
fn default_half() -> f64 {
    0.5
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Figure4Params {
    #[serde(default = "default_m8")]
    pub m: usize,
    #[serde(default = "default_fig4_k")]
    pub k_list: Vec<usize>,
    #[serde(default = "default_snr_grid")]
    pub snr_grid_db: Vec<f64>,
    #[serde(default = "default_trials_1000")]
    pub trials: usize,
    #[serde(default = "default_theta_range")]
    pub theta_deg: (f64, f64),
    #[serde(default = "default_delta_fig4")]
    pub delta_deg: (f64, f64),
    #[serde(default = "default_half")]
    pub spacing: f64,
}

fn default_mu2() -> f64 {
    2.0
}
fn default_fig5_tc() -> Vec<usize> {
    vec![32, 128]
}
fn default_min_mk_min10() -> usize {
    10
}
fn default_min_mk_max100() -> usize {
    100
}
fn default_step10() -> usize {
    10
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Figure5Params {
    #[serde(default = "default_mu2")]
    pub mu: f64,
    #[serde(default = "default_g10")]
    pub g: usize,
    #[serde(default = "default_p30")]
    pub p: f64,
    #[serde(default = "default_fig5_tc")]
    pub tc_list: Vec<usize>,
    #[serde(default = "default_min_mk_min10")]
    pub min_mk_min: usize,
    #[serde(default = "default_min_mk_max100")]
    pub min_mk_max: usize,
    #[serde(default = "default_step10")]
    pub min_mk_step: usize,
}

fn default_alpha10() -> f64 {
    10.0
}
fn default_tc40() -> usize {
    40
}
fn default_n1_12() -> usize {
    12
}
fn default_n2_4() -> usize {
    4
}
fn default_nlln600() -> usize {
    600
}
fn default_k400() -> usize {
    400
}
fn default_step5() -> usize {
    5
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Figure6Params {
    #[serde(default = "default_alpha10")]
    pub alpha: f64,
    #[serde(default = "default_tc40")]
    pub tc: usize,
    #[serde(default = "default_n1_12")]
    pub n1: usize,
    #[serde(default = "default_n2_4")]
    pub n2: usize,
    #[serde(default = "default_nlln600")]
    pub n_lln: usize,
    #[serde(default = "default_k400")]
    pub k_max: usize,
    #[serde(default = "default_step5")]
    pub k_step: usize,
}

fn default_fig7_m() -> Vec<usize> {
    vec![4, 8]
}
fn default_fig7_k() -> Vec<usize> {
    vec![64, 256, 1024, 2048]
}
fn default_snr10() -> f64 {
    10.0
}
fn default_trials_200() -> usize {
    200
}
fn default_delta_fig7() -> (f64, f64) {
    (2.0, 5.0)
}
fn default_preselect4() -> usize {
    4
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Figure7Params {
    #[serde(default = "default_fig7_m")]
    pub m_list: Vec<usize>,
    #[serde(default = "default_fig7_k")]
    pub k_list: Vec<usize>,
    #[serde(default = "default_snr10")]
    pub snr_db: f64,
    #[serde(default = "default_trials_200")]
    pub trials: usize,
    #[serde(default = "default_theta_range")]
    pub theta_deg: (f64, f64),
    #[serde(default = "default_delta_fig7")]
    pub delta_deg: (f64, f64),
    #[serde(default = "default_half")]
    pub spacing: f64,
    #[serde(default = "default_preselect4")]
    pub preselect_factor: usize,
}

fn default_k8() -> usize {
    8
}
fn default_g2() -> usize {
    2
}
fn default_tc32() -> usize {
    32
}
fn default_p_db_list() -> Vec<f64> {
    vec![0.0, 10.0, 20.0, 30.0, 40.0]
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsParams {
    #[serde(default = "default_m8")]
    pub m: usize,
    #[serde(default = "default_k8")]
    pub k: usize,
    #[serde(default = "default_g2")]
    pub g: usize,
    #[serde(default = "default_tc32")]
    pub tc: usize,
    #[serde(default = "default_p_db_list")]
    pub p_db_list: Vec<f64>,
}

fn default_zero_f64() -> f64 {
    0.0
}
fn default_delta10() -> f64 {
    10.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovarianceParams {
    #[serde(default = "default_m8")]
    pub m: usize,
    #[serde(default = "default_zero_f64")]
    pub theta_deg: f64,
    #[serde(default = "default_delta10")]
    pub delta_deg: f64,
    #[serde(default = "default_half")]
    pub spacing: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateParams {}
