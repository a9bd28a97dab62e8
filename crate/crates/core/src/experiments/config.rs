use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::kernels::{HawkesParams, KernelSpec};

/// Default replications per histogram for the presets.
pub const DEFAULT_RUNS: u64 = 10_000;
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

impl Preset {
    pub const ALL: [Preset; 5] = [Preset::Fig1, Preset::Fig2, Preset::Fig3, Preset::Fig4, Preset::Fig5];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
        }
    }

    /// Base parameters; the distribution presets vary one of them per cell.
    pub fn params(self) -> HawkesParams<f64> {
        let p = |lambda0, alpha, beta, nu, gamma| HawkesParams { lambda0, alpha, beta, nu, gamma };
        match self {
            Preset::Fig1 => p(1.0, 0.1, 0.9, 1.0, 0.1),
            Preset::Fig2 => p(1.0, 0.01, 0.99, 0.01, 1.0),
            Preset::Fig3 | Preset::Fig4 => p(1.0, 0.5, 0.99, 0.01, 1.0),
            Preset::Fig5 => p(1.0, 0.5, 0.7, 1.0, 1.0),
        }
    }

    pub fn t_values(self) -> Vec<f64> {
        match self {
            Preset::Fig1 => (1..=1500).map(|i| i as f64 / 100.0).collect(),
            Preset::Fig2 => vec![1.0, 15.0],
            Preset::Fig3 | Preset::Fig4 | Preset::Fig5 => vec![1.0, 10.0],
        }
    }

    /// The parameter each distribution preset varies, with its values.
    pub fn variant(self) -> Option<(Varied, Vec<f64>)> {
        match self {
            Preset::Fig1 => None,
            Preset::Fig2 => Some((Varied::Beta, vec![0.9, 0.99])),
            Preset::Fig3 | Preset::Fig4 => Some((Varied::Alpha, vec![0.1, 0.5])),
            Preset::Fig5 => Some((Varied::Beta, vec![0.5, 0.7])),
        }
    }

    /// The process the tempered kernel is compared with.
    pub fn comparison(self) -> Option<Comparison> {
        match self {
            Preset::Fig1 => None,
            Preset::Fig2 | Preset::Fig5 => Some(Comparison::Poisson),
            Preset::Fig3 => Some(Comparison::Exponential),
            Preset::Fig4 => Some(Comparison::MittagLeffler),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| invalid("preset", format!("unknown preset `{s}`; expected one of fig1..fig5")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Varied {
    Alpha,
    Beta,
}

impl Varied {
    pub fn name(self) -> &'static str {
        match self {
            Varied::Alpha => "alpha",
            Varied::Beta => "beta",
        }
    }

    pub fn apply(self, params: &HawkesParams<f64>, value: f64) -> HawkesParams<f64> {
        match self {
            Varied::Alpha => HawkesParams { alpha: value, ..*params },
            Varied::Beta => HawkesParams { beta: value, ..*params },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Homogeneous Poisson process with rate `lambda0`.
    Poisson,
    /// Hawkes process with exponential kernel, same `lambda0`, `alpha`, `gamma`.
    Exponential,
    /// Hawkes process with untempered Mittag-Leffler kernel.
    MittagLeffler,
}

impl Comparison {
    pub fn kernel(self, params: &HawkesParams<f64>) -> KernelSpec<f64> {
        match self {
            Comparison::Poisson => KernelSpec::None,
            Comparison::Exponential => KernelSpec::Exponential { gamma: params.gamma },
            Comparison::MittagLeffler => KernelSpec::MittagLeffler { beta: params.beta, gamma: params.gamma },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(invalid("format", format!("expected csv or json, got `{s}`"))),
        }
    }
}

/// One source of settings: a config file or the command-line flags. Every field
/// is optional; later layers win.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub preset: Option<Preset>,
    pub lambda0: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub nu: Option<f64>,
    pub gamma: Option<f64>,
    pub kernel: Option<KernelSpec<f64>>,
    pub t_values: Option<Vec<f64>>,
    pub n_runs: Option<u64>,
    pub master_seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl ConfigLayer {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| invalid("config", e.to_string()))
    }

    /// `self` with every field set in `over` replaced.
    pub fn merge(self, over: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            preset: over.preset.or(self.preset),
            lambda0: over.lambda0.or(self.lambda0),
            alpha: over.alpha.or(self.alpha),
            beta: over.beta.or(self.beta),
            nu: over.nu.or(self.nu),
            gamma: over.gamma.or(self.gamma),
            kernel: over.kernel.or(self.kernel),
            t_values: over.t_values.or(self.t_values),
            n_runs: over.n_runs.or(self.n_runs),
            master_seed: over.master_seed.or(self.master_seed),
            output: over.output.or(self.output),
            format: over.format.or(self.format),
        }
    }
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub preset: Option<Preset>,
    pub params: HawkesParams<f64>,
    pub kernel: KernelSpec<f64>,
    pub t_values: Vec<f64>,
    pub n_runs: u64,
    pub master_seed: u64,
    pub output: Option<PathBuf>,
    pub format: Format,
    /// Fields set explicitly on top of a preset.
    pub overrides: Vec<String>,
}

impl ExperimentConfig {
    /// Preset values first, then `layer`. Without a preset, `lambda0`, `beta`,
    /// `gamma` must be given; `alpha` and `nu` default to zero.
    pub fn resolve(layer: ConfigLayer) -> Result<Self> {
        let preset = layer.preset;
        let base = preset.map(Preset::params);
        let mut overrides = Vec::new();
        let mut pick = |name: &str, value: Option<f64>, from_preset: Option<f64>, fallback: Option<f64>| -> Result<f64> {
            match (value, from_preset) {
                (Some(v), Some(_)) => {
                    overrides.push(name.to_string());
                    Ok(v)
                }
                (Some(v), None) => Ok(v),
                (None, Some(p)) => Ok(p),
                (None, None) => fallback.ok_or_else(|| invalid(static_name(name), "is required without a preset")),
            }
        };
        let params = HawkesParams {
            lambda0: pick("lambda0", layer.lambda0, base.map(|b| b.lambda0), None)?,
            alpha: pick("alpha", layer.alpha, base.map(|b| b.alpha), Some(0.0))?,
            beta: pick("beta", layer.beta, base.map(|b| b.beta), None)?,
            nu: pick("nu", layer.nu, base.map(|b| b.nu), Some(0.0))?,
            gamma: pick("gamma", layer.gamma, base.map(|b| b.gamma), None)?,
        };
        params.validate()?;
        let kernel = layer.kernel.unwrap_or_else(|| params.kernel());
        kernel.validate()?;
        if preset.is_some() && layer.kernel.is_some() {
            overrides.push("kernel".into());
        }
        let t_values = match (layer.t_values, preset) {
            (Some(t), p) => {
                if p.is_some() {
                    overrides.push("t_values".into());
                }
                t
            }
            (None, Some(p)) => p.t_values(),
            (None, None) => Vec::new(),
        };
        if let Some(bad) = t_values.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
            return Err(invalid("t_values", format!("must be finite and non-negative, got {bad}")));
        }
        if preset.is_some() {
            if layer.n_runs.is_some() {
                overrides.push("n_runs".into());
            }
            if layer.master_seed.is_some() {
                overrides.push("master_seed".into());
            }
        }
        let n_runs = layer.n_runs.unwrap_or(DEFAULT_RUNS);
        if n_runs < 100 {
            return Err(invalid("n_runs", format!("must be at least 100, got {n_runs}")));
        }
        Ok(Self {
            preset,
            params,
            kernel,
            t_values,
            n_runs,
            master_seed: layer.master_seed.unwrap_or(DEFAULT_SEED),
            output: layer.output,
            format: layer.format.unwrap_or_default(),
            overrides,
        })
    }
}

fn static_name(name: &str) -> &'static str {
    match name {
        "lambda0" => "lambda0",
        "beta" => "beta",
        "gamma" => "gamma",
        _ => "config",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layers_override_in_order() {
        let file = ConfigLayer { preset: Some(Preset::Fig3), n_runs: Some(500), alpha: Some(0.2), ..Default::default() };
        let flags = ConfigLayer { n_runs: Some(800), ..Default::default() };
        let cfg = ExperimentConfig::resolve(file.merge(flags)).unwrap();
        assert_eq!(cfg.n_runs, 800);
        assert_eq!(cfg.params.alpha, 0.2);
        assert_eq!(cfg.params.beta, 0.99);
        assert_eq!(cfg.overrides, vec!["alpha", "n_runs"]);
    }

    #[test]
    fn missing_required_field_is_named() {
        let err = ExperimentConfig::resolve(ConfigLayer { lambda0: Some(1.0), ..Default::default() }).unwrap_err();
        assert!(err.to_string().contains("beta"), "{err}");
        assert!(ConfigLayer::from_json(r#"{"lamda0": 1}"#).is_err());
    }

    #[test]
    fn preset_names() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("fig6".parse::<Preset>().is_err());
    }
}
