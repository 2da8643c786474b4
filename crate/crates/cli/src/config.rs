//! Declarative run configuration: a TOML file of key = value sections,
//! overridden by command-line flags (flags win).

use std::fs;
use std::path::{Path, PathBuf};

use ceo_bounds::bound::RdfHook;
use ceo_bounds::density::{MixtureComponent, NumericConfig, SourceDensity, Tabulated};
use ceo_bounds::region::OptimizerConfig;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub source: SourceSection,
    #[serde(default)]
    pub channel: ChannelSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub rdf: RdfSection,
    #[serde(default)]
    pub jscc: JsccSection,
    #[serde(default)]
    pub region: RegionSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub tolerances: ToleranceSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSection {
    pub family: String,
    pub mean: Option<f64>,
    pub variance: Option<f64>,
    pub location: Option<f64>,
    pub scale: Option<f64>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub weights: Option<Vec<f64>>,
    pub means: Option<Vec<f64>>,
    pub variances: Option<Vec<f64>>,
    /// Path of a tabulated density file (`# grid=<n>` header).
    pub path: Option<PathBuf>,
}

impl Default for SourceSection {
    fn default() -> Self {
        SourceSection {
            family: "gaussian".into(),
            mean: None,
            variance: None,
            location: None,
            scale: None,
            lo: None,
            hi: None,
            weights: None,
            means: None,
            variances: None,
            path: None,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    /// Common observation-noise variance.
    pub noise_var: Option<f64>,
    /// Per-agent observation-noise variances (overrides `noise_var`).
    pub noise_vars: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub d: Option<Vec<f64>>,
    pub m: Option<Vec<usize>>,
    pub alpha: Option<Vec<f64>>,
    pub s: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RdfSection {
    /// "shannon-lb-mse" or "gaussian-exact"; default picks per family.
    pub kind: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsccSection {
    pub power: Option<f64>,
    pub channel_noise_var: Option<f64>,
    pub obs_noise_var: Option<f64>,
    /// Target distortion for the agents-needed analysis.
    pub target_d: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSection {
    pub rates: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub format: Option<String>,
    pub path: Option<PathBuf>,
    pub seed: Option<u64>,
    pub bits: Option<bool>,
    pub samples: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSection {
    pub quad_rel: Option<f64>,
    pub quad_abs: Option<f64>,
    pub tail_mass: Option<f64>,
    pub optimizer_improve: Option<f64>,
    pub optimizer_grid_starts: Option<usize>,
    pub optimizer_random_starts: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("cannot parse {}: {e}", path.display())))
    }

    pub fn numeric_config(&self) -> NumericConfig<f64> {
        let mut cfg = NumericConfig::default();
        if let Some(v) = self.tolerances.quad_rel {
            cfg.quad.rel_tol = v;
        }
        if let Some(v) = self.tolerances.quad_abs {
            cfg.quad.abs_tol = v;
        }
        if let Some(v) = self.tolerances.tail_mass {
            cfg.tail_mass = v;
        }
        cfg
    }

    pub fn optimizer_config(&self, seed: u64) -> OptimizerConfig<f64> {
        let mut cfg = OptimizerConfig::default();
        cfg.seed = seed;
        if let Some(v) = self.tolerances.optimizer_improve {
            cfg.improve_tol = v;
        }
        if let Some(v) = self.tolerances.optimizer_grid_starts {
            cfg.grid_starts = v;
        }
        if let Some(v) = self.tolerances.optimizer_random_starts {
            cfg.random_starts = v;
        }
        cfg
    }

    pub fn density(&self) -> Result<SourceDensity<f64>, CliError> {
        let s = &self.source;
        let bad = |msg: &str| CliError::Config(format!("[source] {msg}"));
        let density = match s.family.as_str() {
            "gaussian" => SourceDensity::gaussian(
                s.mean.unwrap_or(0.0),
                s.variance.unwrap_or(1.0),
            ),
            "laplace" => SourceDensity::laplace(
                s.location.or(s.mean).unwrap_or(0.0),
                s.scale.unwrap_or(1.0),
            ),
            "uniform" => SourceDensity::uniform(s.lo.unwrap_or(0.0), s.hi.unwrap_or(1.0)),
            "gaussian-mixture" => {
                let w = s.weights.as_deref().ok_or_else(|| bad("mixture needs weights"))?;
                let mu = s.means.as_deref().ok_or_else(|| bad("mixture needs means"))?;
                let vv = s
                    .variances
                    .as_deref()
                    .ok_or_else(|| bad("mixture needs variances"))?;
                if w.len() != mu.len() || w.len() != vv.len() {
                    return Err(bad("weights, means, variances must have equal length"));
                }
                SourceDensity::gaussian_mixture(
                    w.iter()
                        .zip(mu)
                        .zip(vv)
                        .map(|((&weight, &mean), &variance)| MixtureComponent {
                            weight,
                            mean,
                            variance,
                        })
                        .collect(),
                )
            }
            "tabulated" => {
                let path = s.path.as_ref().ok_or_else(|| bad("tabulated needs path"))?;
                let file = fs::File::open(path).map_err(|e| {
                    CliError::Config(format!("cannot open {}: {e}", path.display()))
                })?;
                Tabulated::from_reader(std::io::BufReader::new(file)).map(SourceDensity::tabulated)
            }
            other => return Err(bad(&format!("unknown family '{other}'"))),
        };
        density.map_err(|e| CliError::Config(format!("[source] {e}")))
    }

    pub fn rdf_hook(&self, density: &SourceDensity<f64>) -> Result<RdfHook<f64>, CliError> {
        match self.rdf.kind.as_deref() {
            None => Ok(RdfHook::default_for(density)),
            Some("shannon-lb-mse") => Ok(RdfHook::ShannonLbMse),
            Some("gaussian-exact") => Ok(RdfHook::GaussianExact),
            Some(other) => Err(CliError::Config(format!("[rdf] unknown kind '{other}'"))),
        }
    }

    /// Per-agent noise variances for a given agent count.
    pub fn noise_vars(&self, m: usize) -> Result<Vec<f64>, CliError> {
        if let Some(list) = &self.channel.noise_vars {
            if list.len() != m {
                return Err(CliError::Config(format!(
                    "[channel] noise_vars has {} entries but m = {m}",
                    list.len()
                )));
            }
            return Ok(list.clone());
        }
        Ok(vec![self.channel.noise_var.unwrap_or(1.0); m])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_defaults() {
        let cfg: FileConfig = toml::from_str(
            r#"
            [source]
            family = "laplace"
            scale = 0.5

            [grid]
            d = [0.4, 0.5]
            m = [2]

            [tolerances]
            quad_rel = 1e-9
            "#,
        )
        .unwrap();
        let d = cfg.density().unwrap();
        assert_eq!(d.family_name(), "laplace");
        assert_eq!(cfg.grid.d.as_deref(), Some(&[0.4, 0.5][..]));
        assert_eq!(cfg.numeric_config().quad.rel_tol, 1e-9);
        assert_eq!(cfg.noise_vars(3).unwrap(), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn rejects_unknown_keys() {
        let r: Result<FileConfig, _> = toml::from_str("[source]\nfamly = \"gaussian\"\n");
        assert!(r.is_err());
    }

    #[test]
    fn mixture_needs_matching_lengths() {
        let cfg: FileConfig = toml::from_str(
            r#"
            [source]
            family = "gaussian-mixture"
            weights = [0.5, 0.5]
            means = [-1.0]
            variances = [1.0, 1.0]
            "#,
        )
        .unwrap();
        assert!(cfg.density().is_err());
    }
}
