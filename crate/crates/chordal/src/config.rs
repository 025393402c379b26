//! JSON experiment configuration: schema, validation, and builders for the
//! domain objects. Unknown keys are rejected; complex numbers are `[re, im]`
//! arrays.

use std::path::Path;

use serde::Deserialize;

use crate::cdf::QuadratureSpec;
use crate::densities::{Cov2, DensityModel};
use crate::error::{Error, Result};
use crate::lti::{linear_space, log_space, RationalTF};
use crate::quadrature::InnerRule;
use crate::riemann::PlanePoint;

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub density: Option<DensitySpec>,
    pub nominal: Option<[f64; 2]>,
    pub plant: Option<TfSpec>,
    pub controller: Option<TfSpec>,
    pub freq_grid: Option<GridSpec>,
    pub d_grid: Option<GridSpec>,
    pub quadrature: Option<QuadConfig>,
    pub mass_tolerance: Option<f64>,
    pub trials: Option<usize>,
    pub noise_sigma: Option<f64>,
    pub record_length: Option<usize>,
    pub sample_time: Option<f64>,
    pub prbs_amplitude: Option<f64>,
    pub init_guess: Option<[f64; 2]>,
    pub mc_samples: Option<usize>,
    pub seed: Option<u64>,
    pub out_dir: Option<String>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn require_density(&self) -> Result<DensityModel> {
        self.density
            .as_ref()
            .ok_or_else(|| Error::Config("missing required key \"density\"".into()))?
            .build()
    }

    pub fn require_nominal(&self) -> Result<PlanePoint> {
        let n = self
            .nominal
            .ok_or_else(|| Error::Config("missing required key \"nominal\"".into()))?;
        Ok(PlanePoint::new(n[0], n[1]))
    }

    pub fn require_plant(&self) -> Result<RationalTF> {
        self.plant
            .as_ref()
            .ok_or_else(|| Error::Config("missing required key \"plant\"".into()))?
            .build()
    }

    pub fn require_controller(&self) -> Result<RationalTF> {
        self.controller
            .as_ref()
            .ok_or_else(|| Error::Config("missing required key \"controller\"".into()))?
            .build()
    }

    pub fn require_freq_grid(&self) -> Result<Vec<f64>> {
        self.freq_grid
            .as_ref()
            .ok_or_else(|| Error::Config("missing required key \"freq_grid\"".into()))?
            .build()
    }

    /// Threshold grid for CDF evaluation; 21 points over [0, 1] by default.
    pub fn d_grid(&self) -> Result<Vec<f64>> {
        match &self.d_grid {
            Some(g) => g.build(),
            None => Ok(linear_space(0.0, 1.0, 21)),
        }
    }

    /// Quadrature spec assembled from the config with optional CLI override
    /// of the tolerances.
    pub fn quadrature_spec(&self, tol_override: Option<f64>) -> Result<QuadratureSpec> {
        let mut spec = match &self.quadrature {
            Some(q) => q.build()?,
            None => QuadratureSpec::default(),
        };
        if let Some(mt) = self.mass_tolerance {
            if !(mt > 0.0 && mt < 1e-3) {
                return Err(Error::Config(format!(
                    "mass_tolerance must lie in (0, 1e-3), got {mt}"
                )));
            }
            spec.mass_tolerance = mt;
        }
        if let Some(tol) = tol_override {
            if !(tol > 0.0) {
                return Err(Error::Config(format!("--tol must be positive, got {tol}")));
            }
            spec.abs_tol = tol;
            spec.rel_tol = tol;
        }
        Ok(spec)
    }
}

/// Density specification: `"type"` selects the variant, the remaining keys
/// must match it exactly.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySpec {
    #[serde(rename = "type")]
    pub kind: String,
    pub mean: Option<[f64; 2]>,
    pub cov: Option<[[f64; 2]; 2]>,
    pub center: Option<[f64; 2]>,
    pub radius: Option<f64>,
    pub trunc_sigma: Option<f64>,
}

impl DensitySpec {
    pub fn build(&self) -> Result<DensityModel> {
        let forbid = |key: &str, present: bool| {
            if present {
                Err(Error::Config(format!(
                    "density key \"{key}\" does not apply to type \"{}\"",
                    self.kind
                )))
            } else {
                Ok(())
            }
        };
        let mean_cov = || -> Result<(PlanePoint, Cov2)> {
            let mean = self
                .mean
                .ok_or_else(|| Error::Config("gaussian density requires \"mean\"".into()))?;
            let cov = self
                .cov
                .ok_or_else(|| Error::Config("gaussian density requires \"cov\"".into()))?;
            if (cov[0][1] - cov[1][0]).abs() > 1e-12 * cov[0][0].abs().max(cov[1][1].abs()) {
                return Err(Error::Config("\"cov\" must be symmetric".into()));
            }
            Ok((
                PlanePoint::new(mean[0], mean[1]),
                Cov2::new(cov[0][0], 0.5 * (cov[0][1] + cov[1][0]), cov[1][1])?,
            ))
        };
        match self.kind.as_str() {
            "gaussian" => {
                forbid("center", self.center.is_some())?;
                forbid("radius", self.radius.is_some())?;
                forbid("trunc_sigma", self.trunc_sigma.is_some())?;
                let (mean, cov) = mean_cov()?;
                DensityModel::gaussian(mean, cov)
            }
            "truncated-gaussian" => {
                forbid("center", self.center.is_some())?;
                forbid("radius", self.radius.is_some())?;
                let (mean, cov) = mean_cov()?;
                // Default truncation keeps the Gaussian picture intact while
                // making the support honestly compact.
                let trunc = self.trunc_sigma.unwrap_or(8.0);
                DensityModel::truncated_gaussian(mean, cov, trunc)
            }
            "uniform-disc" => {
                forbid("mean", self.mean.is_some())?;
                forbid("cov", self.cov.is_some())?;
                forbid("trunc_sigma", self.trunc_sigma.is_some())?;
                let center = self
                    .center
                    .ok_or_else(|| Error::Config("uniform-disc requires \"center\"".into()))?;
                let radius = self
                    .radius
                    .ok_or_else(|| Error::Config("uniform-disc requires \"radius\"".into()))?;
                DensityModel::uniform_disc(PlanePoint::new(center[0], center[1]), radius)
            }
            other => Err(Error::Config(format!(
                "unknown density type \"{other}\" (expected gaussian, truncated-gaussian, or uniform-disc)"
            ))),
        }
    }
}

/// Transfer function coefficients, ascending powers of `s`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TfSpec {
    pub num: Vec<f64>,
    pub den: Vec<f64>,
}

impl TfSpec {
    pub fn build(&self) -> Result<RationalTF> {
        RationalTF::new(self.num.clone(), self.den.clone())
            .map_err(|e| Error::Config(format!("invalid transfer function: {e}")))
    }
}

/// Grid specification: `min`, `max`, exactly one of `count` or `spacing`,
/// and an optional scale (`"linear"` default, or `"log"`).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: Option<usize>,
    pub spacing: Option<f64>,
    pub scale: Option<String>,
}

impl GridSpec {
    pub fn build(&self) -> Result<Vec<f64>> {
        if !(self.min.is_finite() && self.max.is_finite() && self.max > self.min) {
            return Err(Error::Config(format!(
                "grid needs finite min < max, got [{}, {}]",
                self.min, self.max
            )));
        }
        let log = match self.scale.as_deref() {
            None | Some("linear") => false,
            Some("log") => true,
            Some(other) => {
                return Err(Error::Config(format!(
                    "unknown grid scale \"{other}\" (expected \"linear\" or \"log\")"
                )))
            }
        };
        let count = match (self.count, self.spacing) {
            (Some(c), None) => {
                if c < 2 {
                    return Err(Error::Config("grid count must be at least 2".into()));
                }
                c
            }
            (None, Some(step)) => {
                if !(step > 0.0) {
                    return Err(Error::Config("grid spacing must be positive".into()));
                }
                if log {
                    return Err(Error::Config(
                        "spacing applies to linear grids; use count for log grids".into(),
                    ));
                }
                let span = self.max - self.min;
                let steps = (span / step + 1e-9).floor() as usize;
                steps + 1
            }
            _ => {
                return Err(Error::Config(
                    "grid needs exactly one of \"count\" or \"spacing\"".into(),
                ))
            }
        };
        if log {
            log_space(self.min, self.max, count)
        } else if let Some(step) = self.spacing {
            Ok((0..count).map(|i| self.min + step * i as f64).collect())
        } else {
            Ok(linear_space(self.min, self.max, count))
        }
    }
}

/// Quadrature tolerances and rule selection.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadConfig {
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub max_subdivisions: Option<usize>,
    pub inner_rule: Option<InnerRule>,
}

impl QuadConfig {
    pub fn build(&self) -> Result<QuadratureSpec> {
        let mut spec = QuadratureSpec::default();
        if let Some(a) = self.abs_tol {
            if !(a > 0.0) {
                return Err(Error::Config("abs_tol must be positive".into()));
            }
            spec.abs_tol = a;
        }
        if let Some(r) = self.rel_tol {
            if !(r >= 0.0) {
                return Err(Error::Config("rel_tol must be nonnegative".into()));
            }
            spec.rel_tol = r;
        }
        if let Some(m) = self.max_subdivisions {
            spec.max_subdivisions = m;
        }
        if let Some(rule) = self.inner_rule {
            spec.inner_rule = rule;
        }
        Ok(spec)
    }
}
