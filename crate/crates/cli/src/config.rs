//! Experiment configuration: JSON on disk, with CLI overrides applied after
//! loading. Every run embeds a hash of the fully resolved config in its
//! outputs so results stay traceable.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use centroid_core::detection::{default_rho, Method};
use centroid_core::states::{default_noon_sigma, NoonState, StateModel};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorConfig {
    /// Smallest detector size; also the shift increment.
    pub d0_min: f64,
    /// Sizes evaluated are d0_min times each multiplier.
    pub size_multipliers: Vec<usize>,
    /// Evaluation extent; defaults to 7λ·2/N when absent.
    pub rho: Option<f64>,
}

impl DetectorConfig {
    fn default_for() -> DetectorConfig {
        DetectorConfig {
            d0_min: 1.0 / 1000.0,
            size_multipliers: default_multipliers(),
            rho: None,
        }
    }
}

/// The default size grid: a roughly geometric ladder from λ/1000 to 1.2λ in
/// units of d0_min = λ/1000, passing exactly through λ/4, λ/2 and λ.
pub fn default_multipliers() -> Vec<usize> {
    vec![
        1, 2, 4, 7, 10, 16, 25, 40, 63, 100, 140, 200, 250, 320, 400, 500, 630, 800, 1000, 1200,
    ]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub state: StateModel,
    #[serde(default = "default_events")]
    pub n_events: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "DetectorConfig::default_for")]
    pub detector: DetectorConfig,
    #[serde(default = "default_method")]
    pub method: String,
    /// Comparison window in λ; defaults to ±3.5·2/N.
    #[serde(default)]
    pub window: Option<(f64, f64)>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_events() -> usize {
    1_000_000
}

fn default_seed() -> u64 {
    1
}

fn default_method() -> String {
    "I".into()
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            state: StateModel::Noon(NoonState {
                n_photons: 2,
                sigma: default_noon_sigma(),
            }),
            n_events: default_events(),
            seed: default_seed(),
            detector: DetectorConfig::default_for(),
            method: default_method(),
            window: None,
            output_dir: default_output_dir(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> anyhow::Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {path:?}: {e}"))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| anyhow::anyhow!("malformed config {path:?}: {e}"))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.state
            .validate()
            .map_err(|e| anyhow::anyhow!("invalid state: {e}"))?;
        if self.n_events == 0 {
            anyhow::bail!("n_events must be positive");
        }
        if !(self.detector.d0_min > 0.0) || !self.detector.d0_min.is_finite() {
            anyhow::bail!("d0_min must be positive, got {}", self.detector.d0_min);
        }
        if self.detector.size_multipliers.is_empty() {
            anyhow::bail!("size_multipliers must be nonempty");
        }
        if self.detector.size_multipliers.iter().any(|&m| m == 0) {
            anyhow::bail!("size multipliers must be positive");
        }
        if let Some(rho) = self.detector.rho {
            if !(rho > 0.0) || !rho.is_finite() {
                anyhow::bail!("rho must be positive, got {rho}");
            }
        }
        if let Some((lo, hi)) = self.window {
            if !(lo < hi) {
                anyhow::bail!("window [{lo}, {hi}] is empty");
            }
        }
        self.parse_method()?;
        Ok(())
    }

    pub fn parse_method(&self) -> anyhow::Result<Method> {
        self.method
            .parse()
            .map_err(|e| anyhow::anyhow!("invalid method {:?}: {e}", self.method))
    }

    pub fn rho(&self) -> f64 {
        self.detector
            .rho
            .unwrap_or_else(|| default_rho(self.state.n_photons()))
    }

    pub fn window(&self) -> (f64, f64) {
        self.window.unwrap_or_else(|| {
            let half = 3.5 * 2.0 / self.state.n_photons() as f64;
            (-half, half)
        })
    }

    /// Hash of the canonical JSON serialization of the resolved config.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        hex[..16].to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_losslessly() {
        let cfg = ExperimentConfig::default();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
        assert_eq!(back.hash(), cfg.hash());
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg: ExperimentConfig =
            serde_json::from_str(r#"{"state":{"type":"noon","n":2,"sigma":17.77}}"#).unwrap();
        assert_eq!(cfg.n_events, 1_000_000);
        assert_eq!(cfg.seed, 1);
        assert_eq!(cfg.rho(), 7.0);
        assert_eq!(cfg.window(), (-3.5, 3.5));
        cfg.validate().unwrap();
    }

    #[test]
    fn rho_and_window_scale_with_n() {
        let cfg: ExperimentConfig =
            serde_json::from_str(r#"{"state":{"type":"noon","n":4,"sigma":17.77}}"#).unwrap();
        assert_eq!(cfg.rho(), 3.5);
        assert_eq!(cfg.window(), (-1.75, 1.75));
    }

    #[test]
    fn bad_configs_are_rejected() {
        let bad: ExperimentConfig = serde_json::from_str(
            r#"{"state":{"type":"noon","n":2,"sigma":17.77},"n_events":0}"#,
        )
        .unwrap();
        assert!(bad.validate().is_err());

        let bad: ExperimentConfig = serde_json::from_str(
            r#"{"state":{"type":"noon","n":2,"sigma":17.77},"method":"III"}"#,
        )
        .unwrap();
        assert!(bad.validate().is_err());

        assert!(serde_json::from_str::<ExperimentConfig>(
            r#"{"state":{"type":"noon","n":2,"sigma":17.77},"unknown":1}"#
        )
        .is_err());
    }

    #[test]
    fn default_grid_contains_resonances() {
        let m = default_multipliers();
        assert!(m.contains(&250) && m.contains(&500) && m.contains(&1000));
        assert_eq!(*m.first().unwrap(), 1);
        assert_eq!(*m.last().unwrap(), 1200);
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::default();
        let mut b = ExperimentConfig::default();
        b.seed = 999;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
    }
}
