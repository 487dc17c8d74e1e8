//! Strict JSON run configuration for the command-line front end.
//! Unknown keys are rejected everywhere so that a typo in a pipeline
//! config fails loudly instead of silently running defaults.

use crate::error::{Error, Result};
use crate::model::LevyModel;
use crate::profile::ProfileSpec;
use crate::schrodinger::PotentialSpec;
use serde::Deserialize;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Versions {
    pub config: u32,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub dim: usize,
    pub profile: ProfileSpec,
    #[serde(default = "default_comparability")]
    pub comparability: f64,
}

fn default_comparability() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiBlock {
    pub xi: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaBlock {
    pub xi: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaSweepBlock {
    pub alphas: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatBlock {
    pub t: f64,
    pub points: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolventBlock {
    pub alpha: f64,
    pub points: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KfBlock {
    pub r: f64,
    pub probes: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionBlock {
    pub alphas: Vec<f64>,
    pub points: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundStateBlock {
    pub potential: PotentialSpec,
    pub half_width: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyBlock {
    pub probe_radii: Vec<f64>,
}

/// The full run configuration: a model plus one optional parameter block
/// per subcommand. Each subcommand requires its own block to be present.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub versions: Versions,
    pub model: ModelConfig,
    #[serde(default)]
    pub psi: Option<PsiBlock>,
    #[serde(default)]
    pub omega: Option<OmegaBlock>,
    #[serde(default)]
    pub gamma_sweep: Option<GammaSweepBlock>,
    #[serde(default)]
    pub heat: Option<HeatBlock>,
    #[serde(default)]
    pub resolvent: Option<ResolventBlock>,
    #[serde(default)]
    pub kf: Option<KfBlock>,
    #[serde(default)]
    pub transition: Option<TransitionBlock>,
    #[serde(default)]
    pub boundstate: Option<BoundStateBlock>,
    #[serde(default)]
    pub classify: Option<ClassifyBlock>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("bad config: {e}")))?;
        if cfg.versions.config != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                cfg.versions.config
            )));
        }
        Ok(cfg)
    }

    pub fn build_model(&self) -> Result<LevyModel> {
        LevyModel::new(
            self.model.dim,
            self.model.profile.clone(),
            self.model.comparability,
        )
    }
}
