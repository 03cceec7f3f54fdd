//! Experiment configuration files: one JSON document per run, selected by
//! its `command` field. Unknown keys are rejected everywhere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitting::FitWindow;
use crate::fracsolve::WeightScheme;
use crate::lindblad::{GeneratorFile, StateFile};
use crate::specfun::FractionalOrder;
use crate::spinboson::{BathSpec, Regime};
use crate::subordination::SubordinationQuad;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// Sample times: `n_points` values from `t_min` to `t_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub n_points: usize,
    #[serde(default = "linear")]
    pub spacing: Spacing,
}

fn linear() -> Spacing {
    Spacing::Linear
}

impl GridSpec {
    pub fn times(&self) -> Result<Vec<f64>> {
        let GridSpec { t_min, t_max, n_points, spacing } = *self;
        if n_points == 0 {
            return Err(Error::validation("grid.n_points must be at least 1"));
        }
        if !(t_min >= 0.0 && t_max >= t_min && t_max.is_finite()) {
            return Err(Error::validation(format!("grid needs 0 <= t_min <= t_max, got [{t_min}, {t_max}]")));
        }
        if n_points == 1 {
            return Ok(vec![t_min]);
        }
        if !(t_max > t_min) {
            return Err(Error::validation("grid with several points needs t_max > t_min"));
        }
        let last = (n_points - 1) as f64;
        let times = match spacing {
            Spacing::Linear => (0..n_points)
                .map(|k| if k + 1 == n_points { t_max } else { t_min + (t_max - t_min) * k as f64 / last })
                .collect(),
            Spacing::Log => {
                if !(t_min > 0.0) {
                    return Err(Error::validation("log-spaced grid needs t_min > 0"));
                }
                let ratio = (t_max / t_min).ln();
                (0..n_points)
                    .map(|k| if k + 1 == n_points { t_max } else { t_min * (ratio * k as f64 / last).exp() })
                    .collect()
            }
        };
        Ok(times)
    }
}

/// Exact dephasing run: Q(t), |u(t)| and a leading-order asymptote.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactConfig {
    pub bath: BathSpec,
    pub grid: GridSpec,
    /// Asymptotic form to overlay; chosen from the grid and χ when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<Regime>,
}

/// Constant-rate and time-local models against the exact coherence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkovConfig {
    pub bath: BathSpec,
    #[serde(default)]
    pub epsilon: f64,
    pub grid: GridSpec,
    pub window: FitWindow,
}

/// How the fractional fit treats the long-time plateau.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PlateauSetting {
    #[serde(with = "plateau_keyword")]
    Keyword(PlateauKeyword),
    Value(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlateauKeyword {
    None,
    Auto,
}

impl Default for PlateauSetting {
    fn default() -> Self {
        PlateauSetting::Keyword(PlateauKeyword::None)
    }
}

mod plateau_keyword {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::PlateauKeyword;

    pub fn serialize<S: Serializer>(k: &PlateauKeyword, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(match k {
            PlateauKeyword::None => "none",
            PlateauKeyword::Auto => "auto",
        })
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<PlateauKeyword, D::Error> {
        match String::deserialize(d)?.as_str() {
            "none" => Ok(PlateauKeyword::None),
            "auto" => Ok(PlateauKeyword::Auto),
            other => {
                Err(serde::de::Error::custom(format!("plateau must be \"none\", \"auto\" or a number, got {other:?}")))
            }
        }
    }
}

/// (α, λ) fit of the fractional relaxation model to the exact coherence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FracfitConfig {
    pub bath: BathSpec,
    pub grid: GridSpec,
    pub window: FitWindow,
    #[serde(default)]
    pub plateau: PlateauSetting,
}

/// Semigroup-defect probe E(t) vs E(t−τ)E(τ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefectProbe {
    pub lambda: f64,
    pub t: f64,
    pub tau: f64,
}

/// Subordinated dephasing qubit: quadrature, spectral and Monte-Carlo
/// estimates of ⟨σ_x⟩ from |+⟩.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubordinateConfig {
    pub alpha: FractionalOrder,
    /// Dephasing rate of the Markovian generator.
    pub gamma: f64,
    #[serde(default)]
    pub epsilon: f64,
    pub times: Vec<f64>,
    /// One Monte-Carlo estimate per entry.
    pub samples: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub quad: SubordinationQuad,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub divisibility: Vec<DefectProbe>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMethod {
    Dense,
    Soe,
    Spectral,
}

/// General fractional GKSL run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub generator: GeneratorFile,
    pub initial: StateFile,
    pub alpha: FractionalOrder,
    pub step: f64,
    pub steps: usize,
    #[serde(default = "default_scheme")]
    pub scheme: WeightScheme,
    #[serde(default = "default_method")]
    pub method: SolveMethod,
    #[serde(default = "default_soe_tol")]
    pub soe_tol: f64,
    /// Step counts for a convergence study over the same horizon; the
    /// output then holds (h, steps, error, order) rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<Vec<usize>>,
}

fn default_scheme() -> WeightScheme {
    WeightScheme::StandardDFF
}

fn default_method() -> SolveMethod {
    SolveMethod::Dense
}

fn default_soe_tol() -> f64 {
    1e-10
}

/// A complete experiment file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum ExperimentConfig {
    Exact(ExactConfig),
    Markov(MarkovConfig),
    Fracfit(FracfitConfig),
    Subordinate(SubordinateConfig),
    Solve(SolveConfig),
}

impl ExperimentConfig {
    pub fn command(&self) -> &'static str {
        match self {
            ExperimentConfig::Exact(_) => "exact",
            ExperimentConfig::Markov(_) => "markov",
            ExperimentConfig::Fracfit(_) => "fracfit",
            ExperimentConfig::Subordinate(_) => "subordinate",
            ExperimentConfig::Solve(_) => "solve",
        }
    }

    /// Parses a document, reporting the JSON path of the first offending
    /// field.
    pub fn from_json(text: &str) -> Result<Self> {
        // The tag is split off by hand: an internally tagged enum buffers its
        // content and the field path of nested errors is lost.
        let mut doc: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::validation(format!("config is not valid JSON: {e}")))?;
        let command = match doc.as_object_mut().map(|o| o.remove("command")) {
            Some(Some(serde_json::Value::String(c))) => c,
            Some(_) => return Err(Error::validation("config field `command`: missing or not a string")),
            None => return Err(Error::validation("config must be a JSON object")),
        };
        fn body<T: serde::de::DeserializeOwned>(doc: serde_json::Value) -> Result<T> {
            serde_path_to_error::deserialize(doc)
                .map_err(|e| Error::validation(format!("config field `{}`: {}", e.path(), e.inner())))
        }
        let cfg = match command.as_str() {
            "exact" => ExperimentConfig::Exact(body(doc)?),
            "markov" => ExperimentConfig::Markov(body(doc)?),
            "fracfit" => ExperimentConfig::Fracfit(body(doc)?),
            "subordinate" => ExperimentConfig::Subordinate(body(doc)?),
            "solve" => ExperimentConfig::Solve(body(doc)?),
            other => {
                return Err(Error::validation(format!(
                    "config field `command`: unknown command {other:?}, expected exact, markov, fracfit, subordinate or solve"
                )))
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks the physical parameters against their module invariants.
    pub fn validate(&self) -> Result<()> {
        let field = |name: &str, r: Result<()>| r.map_err(|e| Error::validation(format!("config field `{name}`: {e}")));
        match self {
            ExperimentConfig::Exact(c) => {
                field("bath", c.bath.validate())?;
                field("grid", c.grid.times().map(drop))
            }
            ExperimentConfig::Markov(c) => {
                field("bath", c.bath.validate())?;
                field("grid", c.grid.times().map(drop))?;
                field("window", c.window.validate())?;
                field("epsilon", finite(c.epsilon))
            }
            ExperimentConfig::Fracfit(c) => {
                field("bath", c.bath.validate())?;
                field("grid", c.grid.times().map(drop))?;
                field("window", c.window.validate())?;
                if let PlateauSetting::Value(p) = c.plateau {
                    if !(0.0..1.0).contains(&p) {
                        return field("plateau", Err(Error::validation("must lie in [0, 1)")));
                    }
                }
                Ok(())
            }
            ExperimentConfig::Subordinate(c) => {
                if !(c.gamma > 0.0 && c.gamma.is_finite()) {
                    return field("gamma", Err(Error::validation("must be positive")));
                }
                field("epsilon", finite(c.epsilon))?;
                if c.times.is_empty() || c.times.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
                    return field("times", Err(Error::validation("need at least one positive time")));
                }
                if c.samples.is_empty() || c.samples.iter().any(|&m| m < 2) {
                    return field("samples", Err(Error::validation("each entry must be at least 2")));
                }
                for (k, p) in c.divisibility.iter().enumerate() {
                    if !(p.lambda > 0.0 && 0.0 < p.tau && p.tau < p.t && p.t.is_finite()) {
                        return field(
                            &format!("divisibility[{k}]"),
                            Err(Error::validation("need lambda > 0 and 0 < tau < t")),
                        );
                    }
                }
                Ok(())
            }
            ExperimentConfig::Solve(c) => {
                field("generator", c.generator.clone().into_generator().map(drop))?;
                field("initial", c.initial.clone().into_state().map(drop))?;
                if !(c.step > 0.0 && c.step.is_finite()) {
                    return field("step", Err(Error::validation("must be positive")));
                }
                if c.steps == 0 {
                    return field("steps", Err(Error::validation("must be at least 1")));
                }
                if !(c.soe_tol > 0.0) {
                    return field("soe_tol", Err(Error::validation("must be positive")));
                }
                if let Some(list) = &c.convergence {
                    if list.len() < 2 || list.contains(&0) {
                        return field("convergence", Err(Error::validation("need two or more positive step counts")));
                    }
                }
                Ok(())
            }
        }
    }
}

fn finite(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::validation("must be finite"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_command() {
        let exact = r#"{"command":"exact","bath":{"eta":1,"chi":1.5,"omega_c":1,"beta":"inf"},
            "grid":{"t_min":0.001,"t_max":0.2,"n_points":20,"spacing":"log"}}"#;
        let cfg = ExperimentConfig::from_json(exact).unwrap();
        assert_eq!(cfg.command(), "exact");

        let fit = r#"{"command":"fracfit","bath":{"eta":1,"chi":1.5,"omega_c":1},
            "grid":{"t_min":0,"t_max":100,"n_points":11},"window":{"t_start":2,"t_end":20},"plateau":"auto"}"#;
        match ExperimentConfig::from_json(fit).unwrap() {
            ExperimentConfig::Fracfit(c) => assert_eq!(c.plateau, PlateauSetting::Keyword(PlateauKeyword::Auto)),
            other => panic!("{other:?}"),
        }
        let fixed = fit.replace("\"auto\"", "0.3");
        match ExperimentConfig::from_json(&fixed).unwrap() {
            ExperimentConfig::Fracfit(c) => assert_eq!(c.plateau, PlateauSetting::Value(0.3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_and_invalid_fields() {
        let extra = r#"{"command":"exact","bath":{"eta":1,"chi":1,"omega_c":1},
            "grid":{"t_min":0,"t_max":1,"n_points":3},"colour":"red"}"#;
        let err = ExperimentConfig::from_json(extra).unwrap_err().to_string();
        assert!(err.contains("colour"), "{err}");

        let nested = r#"{"command":"exact","bath":{"eta":1,"chi":1,"omega_c":1,"temp":3},
            "grid":{"t_min":0,"t_max":1,"n_points":3}}"#;
        let err = ExperimentConfig::from_json(nested).unwrap_err().to_string();
        assert!(err.contains("bath"), "{err}");

        let bad = r#"{"command":"exact","bath":{"eta":-1,"chi":1,"omega_c":1},
            "grid":{"t_min":0,"t_max":1,"n_points":3}}"#;
        let err = ExperimentConfig::from_json(bad).unwrap_err().to_string();
        assert!(err.contains("`bath`"), "{err}");

        assert!(ExperimentConfig::from_json(r#"{"command":"plot"}"#).is_err());
    }

    #[test]
    fn grids() {
        let g = GridSpec { t_min: 1.0, t_max: 100.0, n_points: 3, spacing: Spacing::Log };
        let t = g.times().unwrap();
        assert!((t[1] - 10.0).abs() < 1e-12 && t[2] == 100.0);
        let single = GridSpec { t_min: 0.5, t_max: 0.5, n_points: 1, spacing: Spacing::Linear };
        assert_eq!(single.times().unwrap(), vec![0.5]);
        let g = GridSpec { t_min: 0.0, t_max: 1.0, n_points: 3, spacing: Spacing::Log };
        assert!(g.times().is_err());
    }
}
