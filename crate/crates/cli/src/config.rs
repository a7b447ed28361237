//! TOML run configuration. Every section except `[model]` is optional; the
//! defaults below are the documented ones.

use std::path::{Path, PathBuf};

use nhkpm::model::ModelParams;
use nhkpm::nhkpm::FrequencyGrid;
use nhkpm::tn::Truncation;
use nhkpm::vectorize::VectorizationBasis;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;
pub const OUTPUT_DIR_ENV: &str = "NHKPM_OUTPUT_DIR";

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub model: ModelSection,
    #[serde(default)]
    pub basis: Basis,
    #[serde(default)]
    pub backend: BackendKind,
    #[serde(default)]
    pub kpm: KpmSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub mps: MpsSection,
    #[serde(default)]
    pub times: TimesSection,
    pub gamma_scan: Option<GammaScan>,
    #[serde(default)]
    pub rk4: Rk4Section,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub n_spins: usize,
    pub jx: f64,
    pub jy: f64,
    #[serde(default)]
    pub jz: f64,
    #[serde(default)]
    pub b: f64,
    pub gamma: f64,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    #[default]
    Permuted,
    Naive,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    #[default]
    Dense,
    Mps,
}

/// `n_moments = 512`; `scale` defaults to the centred norm bound with a 10% margin.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct KpmSection {
    #[serde(default = "default_moments")]
    pub n_moments: usize,
    pub scale: Option<f64>,
    /// Evaluate only Im ω ≥ 0 on grids symmetric about the real axis and
    /// fill the rest from G(ω*) = G(ω)*.
    #[serde(default = "yes")]
    pub mirror: bool,
}

/// Defaults to Re ω ∈ [−1.2, 0.3], Im ω ∈ [−3, 3] at spacing 0.03 (51 × 201 nodes).
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub n_re: usize,
    pub n_im: usize,
}

/// `max_bond = 128`, `cutoff = 1e-8`, `budget = 16384`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MpsSection {
    #[serde(default = "default_bond")]
    pub max_bond: usize,
    #[serde(default = "default_cutoff")]
    pub cutoff: f64,
    #[serde(default = "default_budget")]
    pub budget: usize,
}

/// `t_max = 20`, `n_samples = 401`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TimesSection {
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GammaScan {
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub n_points: usize,
}

/// `step = 1e-3`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Rk4Section {
    #[serde(default = "default_rk4_step")]
    pub step: f64,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_moments() -> usize {
    512
}
fn yes() -> bool {
    true
}
fn default_bond() -> usize {
    128
}
fn default_cutoff() -> f64 {
    1e-8
}
fn default_budget() -> usize {
    1 << 14
}
fn default_t_max() -> f64 {
    20.0
}
fn default_samples() -> usize {
    401
}
fn default_rk4_step() -> f64 {
    1e-3
}

impl Default for KpmSection {
    fn default() -> Self {
        Self { n_moments: default_moments(), scale: None, mirror: true }
    }
}

impl Default for GridSection {
    fn default() -> Self {
        Self { re_min: -1.2, re_max: 0.3, im_min: -3.0, im_max: 3.0, n_re: 51, n_im: 201 }
    }
}

impl Default for MpsSection {
    fn default() -> Self {
        Self { max_bond: default_bond(), cutoff: default_cutoff(), budget: default_budget() }
    }
}

impl Default for TimesSection {
    fn default() -> Self {
        Self { t_max: default_t_max(), n_samples: default_samples() }
    }
}

impl Default for Rk4Section {
    fn default() -> Self {
        Self { step: default_rk4_step() }
    }
}

impl RunConfig {
    /// The N = 2 model used when no config file is given.
    pub fn default_model() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            model: ModelSection { n_spins: 2, jx: 0.75, jy: 0.5, jz: 0.0, b: 0.0, gamma: 0.2 },
            basis: Basis::default(),
            backend: BackendKind::default(),
            kpm: KpmSection::default(),
            grid: GridSection::default(),
            mps: MpsSection::default(),
            times: TimesSection::default(),
            gamma_scan: None,
            rk4: Rk4Section::default(),
            output_dir: default_output_dir(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let cfg: Self = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks everything that does not need a computation.
    pub fn validate(&self) -> Result<(), String> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(format!(
                "schema_version = {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        self.params().map_err(|e| format!("[model] {e}"))?;
        self.frequency_grid().map_err(|e| format!("[grid] {e}"))?;
        if self.kpm.n_moments < nhkpm::nhkpm::MIN_MOMENTS {
            return Err(format!("[kpm] n_moments = {} is below {}", self.kpm.n_moments, nhkpm::nhkpm::MIN_MOMENTS));
        }
        if let Some(a) = self.kpm.scale {
            if !(a.is_finite() && a > 0.0) {
                return Err(format!("[kpm] scale = {a} must be positive"));
            }
        }
        if self.mps.max_bond == 0 || self.mps.budget == 0 || !(self.mps.cutoff >= 0.0) {
            return Err("[mps] max_bond and budget must be positive and cutoff nonnegative".into());
        }
        if self.backend == BackendKind::Mps && self.basis == Basis::Naive {
            return Err("backend = \"mps\" needs basis = \"permuted\": the naive layout couples sites N apart".into());
        }
        if !(self.times.t_max >= 0.0 && self.times.t_max.is_finite()) || self.times.n_samples == 0 {
            return Err("[times] t_max must be finite and nonnegative and n_samples positive".into());
        }
        if !(self.rk4.step > 0.0) {
            return Err("[rk4] step must be positive".into());
        }
        if let Some(s) = &self.gamma_scan {
            if s.n_points == 0
                || !(s.gamma_min >= 0.0)
                || s.gamma_max < s.gamma_min
                || (s.n_points > 1 && s.gamma_max == s.gamma_min)
            {
                return Err("[gamma_scan] needs 0 <= gamma_min <= gamma_max and n_points >= 1".into());
            }
        }
        Ok(())
    }

    pub fn params(&self) -> nhkpm::Result<ModelParams<f64>> {
        let m = &self.model;
        ModelParams::new(m.n_spins, m.jx, m.jy, m.jz, m.b, m.gamma)
    }

    pub fn params_with_gamma(&self, gamma: f64) -> nhkpm::Result<ModelParams<f64>> {
        let mut p = self.params()?;
        p.gamma = gamma;
        p.validate()?;
        Ok(p)
    }

    pub fn frequency_grid(&self) -> nhkpm::Result<FrequencyGrid<f64>> {
        let g = &self.grid;
        FrequencyGrid::new(g.re_min, g.re_max, g.im_min, g.im_max, g.n_re, g.n_im)
    }

    pub fn basis(&self) -> VectorizationBasis {
        match self.basis {
            Basis::Permuted => VectorizationBasis::Permuted,
            Basis::Naive => VectorizationBasis::Naive,
        }
    }

    pub fn truncation(&self) -> Truncation<f64> {
        Truncation { max_bond: self.mps.max_bond, cutoff: self.mps.cutoff, budget: self.mps.budget }
    }

    pub fn gammas(&self) -> Option<Vec<f64>> {
        self.gamma_scan.as_ref().map(|s| {
            if s.n_points == 1 {
                return vec![s.gamma_min];
            }
            let h = (s.gamma_max - s.gamma_min) / (s.n_points - 1) as f64;
            // Rounded to 12 decimals so that CSV keys read as written, e.g. 0.3 not 0.30000000000000004.
            (0..s.n_points).map(|k| ((s.gamma_min + h * k as f64) * 1e12).round() / 1e12).collect()
        })
    }
}
