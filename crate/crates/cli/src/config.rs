//! Experiment configuration: one JSON document per experiment.

use std::sync::Arc;

use inflap_core::{
    build_grid, AbsorptionParams64, EpsilonSchedule, ExactProfile64, Grid64, GridSpec64,
    RightHandSide64, SolverConfig64, WeightKind, WeightSampling,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    VerifyExact,
    Solve,
    Deadcore,
    Exponent,
    Nondegeneracy,
    Gradient,
    Harnack,
    Liouville,
    Borderline,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::VerifyExact => "verify-exact",
            Experiment::Solve => "solve",
            Experiment::Deadcore => "deadcore",
            Experiment::Exponent => "exponent",
            Experiment::Nondegeneracy => "nondegeneracy",
            Experiment::Gradient => "gradient",
            Experiment::Harnack => "harnack",
            Experiment::Liouville => "liouville",
            Experiment::Borderline => "borderline",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub dimension: usize,
    #[serde(default)]
    pub center: [f64; 2],
    pub outer_radius: f64,
    #[serde(default)]
    pub inner_radius: f64,
    pub spacing: f64,
}

impl Geometry {
    pub fn spec(&self) -> GridSpec64 {
        self.spec_with_spacing(self.spacing)
    }

    pub fn spec_with_spacing(&self, spacing: f64) -> GridSpec64 {
        GridSpec64 {
            dimension: self.dimension,
            center: self.center,
            outer_radius: self.outer_radius,
            inner_radius: self.inner_radius,
            spacing,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub alpha: f64,
    pub m: f64,
    /// Weight anchor `x0`.
    #[serde(default)]
    pub anchor: [f64; 2],
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightConfig {
    #[default]
    Power,
    ShiftedPower {
        shift: f64,
    },
    DistancePower {
        set: Vec<[f64; 2]>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    Radial,
    OneDim {
        #[serde(default)]
        axis: usize,
    },
    /// Uses the geometry's outer radius and `boundary_value`.
    DeadCore,
    Aronsson {
        coefficients: Vec<f64>,
    },
    DistanceWeight {
        shift: f64,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    Point,
    CellAverage,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradient_floor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_sweeps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bisection_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_schedule: Option<ScheduleOverrides>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relaxation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_sampling: Option<Sampling>,
    /// Fixed penalization; replaces the ε ladder with a single level when positive.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

/// Experiment-specific knobs. Unset fields take the documented defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisOptions {
    /// Plateau threshold; default `max(10 * sweep_tol, h^2)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plateau_tol: Option<f64>,
    /// Base point of fits and shells; default the free-boundary point `center + (r0, 0)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_radii: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradient_window: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacings: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_order: Option<f64>,
    /// Minimum distance from the non-smooth set for residual samples; default `5 * max h`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exclusion: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scalings: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth_shift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contrast_m: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub geometry: Geometry,
    pub params: Params,
    #[serde(default)]
    pub weight: WeightConfig,
    /// Dirichlet constant `c`; dead-core experiments default to `tau`, others to 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileConfig>,
    #[serde(default)]
    pub solver: SolverOverrides,
    #[serde(default)]
    pub analysis: AnalysisOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    /// Reserved. No experiment is stochastic, so only `false` is accepted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<bool>,
}

impl ExperimentConfig {
    /// Parses and validates a config document.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CliError::config("malformed config", e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.random == Some(true) {
            return Err(CliError::Config(
                "random: no experiment is stochastic; the flag must be absent or false".into(),
            ));
        }
        let params = self.absorption()?;
        self.geometry
            .spec()
            .validate()
            .map_err(|e| CliError::config("geometry", e))?;
        self.solver_config()?
            .validate()
            .map_err(|e| CliError::config("solver", e))?;
        if let Some(eps) = self.solver.epsilon {
            if !(eps >= 0.0 && eps.is_finite()) {
                return Err(CliError::Config(format!(
                    "solver: epsilon must be nonnegative and finite, got {eps}"
                )));
            }
        }
        if !(self.params.scale > 0.0 && self.params.scale.is_finite()) {
            return Err(CliError::Config(format!(
                "params: scale must be positive and finite, got {}",
                self.params.scale
            )));
        }
        if let Some(c) = self.boundary_value {
            if !(c > 0.0 && c.is_finite()) {
                return Err(CliError::Config(format!(
                    "boundary_value must be positive and finite, got {c}"
                )));
            }
        }
        self.rhs_from_weight(params)?
            .validate()
            .map_err(|e| CliError::config("weight", e))?;
        self.validate_analysis()?;
        match self.experiment {
            Experiment::VerifyExact | Experiment::Solve => {
                self.profile()?;
            }
            Experiment::Borderline => {
                for &m in self.exponents() {
                    AbsorptionParams64::new(self.params.alpha, m)
                        .map_err(|e| CliError::config("analysis.exponents", e))?;
                }
                AbsorptionParams64::new(self.params.alpha, self.contrast_m())
                    .map_err(|e| CliError::config("analysis.contrast_m", e))?;
            }
            Experiment::Deadcore
            | Experiment::Exponent
            | Experiment::Nondegeneracy
            | Experiment::Gradient => {
                self.dead_core_profile()?;
            }
            Experiment::Harnack | Experiment::Liouville => {}
        }
        Ok(())
    }

    fn validate_analysis(&self) -> Result<(), CliError> {
        let a = &self.analysis;
        let positive = [
            ("plateau_tol", a.plateau_tol),
            ("r_min", a.r_min),
            ("r_max", a.r_max),
            ("band", a.band),
            ("slope_tol", a.slope_tol),
            ("ratio_min", a.ratio_min),
            ("error_tol", a.error_tol),
            ("radius_tol", a.radius_tol),
            ("residual_tol", a.residual_tol),
            ("growth_shift", a.growth_shift),
        ];
        for (name, v) in positive {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(CliError::Config(format!(
                        "analysis.{name} must be positive and finite, got {v}"
                    )));
                }
            }
        }
        if let Some(v) = a.exclusion {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!(
                    "analysis.exclusion must be nonnegative and finite, got {v}"
                )));
            }
        }
        if let (Some(lo), Some(hi)) = (a.r_min, a.r_max) {
            if lo >= hi {
                return Err(CliError::Config(
                    "analysis: r_min must be below r_max".into(),
                ));
            }
        }
        if let Some(n) = a.n_radii {
            if n < 3 {
                return Err(CliError::Config(format!(
                    "analysis.n_radii must be >= 3, got {n}"
                )));
            }
        }
        if let Some([lo, hi]) = a.gradient_window {
            if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
                return Err(CliError::Config(
                    "analysis.gradient_window must satisfy 0 <= lo < hi".into(),
                ));
            }
        }
        let lists = [
            ("radii", &a.radii),
            ("spacings", &a.spacings),
            ("scalings", &a.scalings),
        ];
        for (name, list) in lists {
            if let Some(list) = list {
                if list.is_empty() || list.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                    return Err(CliError::Config(format!(
                        "analysis.{name} must be a nonempty list of positive numbers"
                    )));
                }
            }
        }
        if let Some(hs) = &a.spacings {
            for &h in hs {
                self.geometry
                    .spec_with_spacing(h)
                    .validate()
                    .map_err(|e| CliError::config("analysis.spacings", e))?;
            }
        }
        if a.samples == Some(0) {
            return Err(CliError::Config("analysis.samples must be positive".into()));
        }
        if matches!(&a.exponents, Some(ms) if ms.is_empty()) {
            return Err(CliError::Config(
                "analysis.exponents must be nonempty".into(),
            ));
        }
        Ok(())
    }

    pub fn absorption(&self) -> Result<AbsorptionParams64, CliError> {
        AbsorptionParams64::new(self.params.alpha, self.params.m)
            .map_err(|e| CliError::config("params", e))
    }

    pub fn spacing(&self) -> f64 {
        self.geometry.spacing
    }

    pub fn grid(&self) -> Result<Arc<Grid64>, CliError> {
        self.grid_with_spacing(self.geometry.spacing)
    }

    pub fn grid_with_spacing(&self, spacing: f64) -> Result<Arc<Grid64>, CliError> {
        build_grid(self.geometry.spec_with_spacing(spacing))
            .map(Arc::new)
            .map_err(|e| CliError::config("geometry", e))
    }

    pub fn solver_config(&self) -> Result<SolverConfig64, CliError> {
        let d = SolverConfig64::default();
        let s = &self.solver;
        let sched = s.epsilon_schedule.clone().unwrap_or_default();
        Ok(SolverConfig64 {
            gradient_floor: s.gradient_floor.unwrap_or(d.gradient_floor),
            sweep_tol: s.sweep_tol.unwrap_or(d.sweep_tol),
            max_sweeps: s.max_sweeps.unwrap_or(d.max_sweeps),
            bisection_tol: s.bisection_tol.unwrap_or(d.bisection_tol),
            epsilon_schedule: EpsilonSchedule {
                initial: sched.initial.unwrap_or(d.epsilon_schedule.initial),
                decay: sched.decay.unwrap_or(d.epsilon_schedule.decay),
                steps: sched.steps.unwrap_or(d.epsilon_schedule.steps),
            },
            relaxation: s.relaxation.unwrap_or(d.relaxation),
            weight_sampling: match s.weight_sampling {
                Some(Sampling::Point) => WeightSampling::Point,
                Some(Sampling::CellAverage) => WeightSampling::CellAverage,
                None => d.weight_sampling,
            },
        })
    }

    /// Epsilon levels a solve with this config runs through.
    pub fn epsilon_ladder(&self) -> Vec<f64> {
        match self.solver.epsilon {
            Some(e) if e > 0.0 => vec![e],
            _ => self
                .solver_config()
                .map(|c| c.epsilon_schedule.levels())
                .unwrap_or_default(),
        }
    }

    /// Right-hand side from the `weight` section with the given exponents.
    pub fn rhs_from_weight(&self, params: AbsorptionParams64) -> Result<RightHandSide64, CliError> {
        let kind = match &self.weight {
            WeightConfig::Power => WeightKind::Power,
            WeightConfig::ShiftedPower { shift } => WeightKind::ShiftedPower { shift: *shift },
            WeightConfig::DistancePower { set } => WeightKind::DistancePower { set: set.clone() },
        };
        Ok(RightHandSide64::new(kind, params)
            .with_anchor(self.params.anchor)
            .with_scale(self.params.scale)
            .with_epsilon(self.solver.epsilon.unwrap_or(0.0)))
    }

    pub fn plateau_tol(&self) -> f64 {
        let h = self.geometry.spacing;
        let tol = self
            .solver
            .sweep_tol
            .unwrap_or(SolverConfig64::default().sweep_tol);
        self.analysis.plateau_tol.unwrap_or((10.0 * tol).max(h * h))
    }

    pub fn boundary_value_or(&self, default: f64) -> f64 {
        self.boundary_value.unwrap_or(default)
    }

    pub fn profile(&self) -> Result<ExactProfile64, CliError> {
        let Some(profile) = &self.profile else {
            return Err(CliError::Config(format!(
                "experiment {} needs a profile section",
                self.experiment.name()
            )));
        };
        let params = self.absorption()?;
        let anchor = self.params.anchor;
        let p = match profile {
            ProfileConfig::Radial => ExactProfile64::radial(params).with_anchor(anchor),
            ProfileConfig::OneDim { axis } if *axis >= self.geometry.dimension => {
                return Err(CliError::Config(format!(
                    "profile: one_dim axis {axis} must be below the dimension {}",
                    self.geometry.dimension
                )))
            }
            ProfileConfig::OneDim { axis } => ExactProfile64::one_dim(params, *axis)
                .map_err(|e| CliError::config("profile", e))?
                .with_anchor(anchor),
            ProfileConfig::DeadCore => self.dead_core_profile()?,
            ProfileConfig::Aronsson { coefficients } => {
                if coefficients.len() != self.geometry.dimension {
                    return Err(CliError::Config(format!(
                        "profile: aronsson needs {} coefficients for dimension {}",
                        self.geometry.dimension, self.geometry.dimension
                    )));
                }
                ExactProfile64::aronsson(coefficients.clone())
                    .map_err(|e| CliError::config("profile", e))?
            }
            ProfileConfig::DistanceWeight { shift } => {
                ExactProfile64::distance_weight(params.alpha(), *shift)
                    .map_err(|e| CliError::config("profile", e))?
                    .with_anchor(anchor)
            }
        };
        Ok(p)
    }

    /// Closed-form dead core on the geometry's ball with boundary value `c` (default `tau`).
    pub fn dead_core_profile(&self) -> Result<ExactProfile64, CliError> {
        let params = self.absorption()?;
        let c = self.boundary_value_or(params.tau());
        ExactProfile64::dead_core(params, self.geometry.outer_radius, c)
            .map(|p| p.with_anchor(self.geometry.center))
            .map_err(|e| CliError::config("dead core", e))
    }

    pub fn exponents(&self) -> &[f64] {
        const DEFAULT: [f64; 3] = [2.0, 2.5, 2.9];
        self.analysis.exponents.as_deref().unwrap_or(&DEFAULT)
    }

    pub fn contrast_m(&self) -> f64 {
        self.analysis.contrast_m.unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> serde_json::Value {
        serde_json::json!({
            "experiment": "deadcore",
            "geometry": {"dimension": 1, "outer_radius": 2.0, "spacing": 0.01},
            "params": {"alpha": 0.0, "m": 0.0}
        })
    }

    fn parse(v: &serde_json::Value) -> Result<ExperimentConfig, CliError> {
        ExperimentConfig::from_json(&v.to_string())
    }

    #[test]
    fn minimal_config_parses() {
        let cfg = parse(&base()).unwrap();
        assert_eq!(cfg.experiment, Experiment::Deadcore);
        assert_eq!(cfg.weight, WeightConfig::Power);
        assert_eq!(cfg.epsilon_ladder().len(), 13);
        assert!((cfg.plateau_tol() - 1e-4).abs() < 1e-18);
        let p = cfg.dead_core_profile().unwrap();
        assert!((p.plateau_radius().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inadmissible_m_names_the_invariant() {
        let mut v = base();
        v["experiment"] = "exponent".into();
        v["params"]["m"] = 3.5.into();
        let err = parse(&v).unwrap_err();
        assert!(err.to_string().contains("0 ≤ m < 3"), "{err}");
        assert_eq!(err.exit_status().code(), 2);
    }

    #[test]
    fn rejections() {
        let cases: Vec<(&str, serde_json::Value)> = vec![
            ("random", serde_json::json!(true)),
            ("unknown_field", serde_json::json!(1)),
        ];
        for (key, val) in cases {
            let mut v = base();
            v[key] = val;
            assert!(matches!(parse(&v), Err(CliError::Config(_))), "{key}");
        }
        let mut v = base();
        v["random"] = false.into();
        assert!(parse(&v).is_ok());

        let mut v = base();
        v["geometry"]["spacing"] = 3.0.into();
        assert!(parse(&v).unwrap_err().to_string().contains("spacing"));

        let mut v = base();
        v["solver"] = serde_json::json!({"relaxation": 2.5});
        assert!(parse(&v).is_err());

        let mut v = base();
        v["experiment"] = "verify-exact".into();
        assert!(parse(&v).unwrap_err().to_string().contains("profile"));

        let mut v = base();
        v["boundary_value"] = 10.0.into();
        assert!(parse(&v).unwrap_err().to_string().contains("no dead core"));

        let mut v = base();
        v["analysis"] = serde_json::json!({"n_radii": 2});
        assert!(parse(&v).is_err());

        let mut v = base();
        v["experiment"] = "borderline".into();
        v["analysis"] = serde_json::json!({"exponents": [2.0, 3.0]});
        assert!(parse(&v).unwrap_err().to_string().contains("0 ≤ m < 3"));
    }

    #[test]
    fn round_trip() {
        let mut v = base();
        v["solver"] = serde_json::json!({"relaxation": 1.98, "epsilon_schedule": {"decay": 0.1, "steps": 10}});
        v["weight"] = serde_json::json!({"kind": "shifted_power", "shift": 0.5});
        let cfg = parse(&v).unwrap();
        let back = ExperimentConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(cfg.epsilon_ladder().len(), 11);
        assert!((cfg.epsilon_ladder()[10] - 1e-12).abs() < 1e-24);
    }
}
