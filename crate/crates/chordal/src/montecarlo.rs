//! Sampling oracle for the chordal distance: empirical CDFs, DKW bands, and
//! the quadrature-vs-sampling comparison harness.

use rayon::prelude::*;

use crate::cdf::CdfCurve;
use crate::densities::DensityModel;
use crate::error::{Error, Result};
use crate::riemann::{chordal_distance, PlanePoint};

/// Sorted chordal-distance samples.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    /// Ascending sample values, all in `[0, 1]`.
    pub samples: Vec<f64>,
    pub seed: u64,
}

impl EmpiricalCdf {
    /// `F_n(d)`: fraction of samples `<= d`.
    pub fn value_at(&self, d: f64) -> f64 {
        let count = self.samples.partition_point(|&k| k <= d);
        count as f64 / self.samples.len() as f64
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Draw `n` plant values, map each through the chordal distance to the
/// nominal, and sort.
pub fn sample_kappa(
    model: &DensityModel,
    nominal: PlanePoint,
    n: usize,
    seed: u64,
) -> Result<EmpiricalCdf> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "sample count must be at least 1".into(),
        ));
    }
    let mut samples: Vec<f64> = (0..n as u64)
        .into_par_iter()
        .map(|i| chordal_distance(model.sample_at(seed, i), nominal))
        .collect();
    samples.sort_by(f64::total_cmp);
    Ok(EmpiricalCdf { samples, seed })
}

/// The Dvoretzky-Kiefer-Wolfowitz band `sqrt(ln(2 / alpha) / (2 n))`:
/// `sup_d |F_n(d) - F(d)|` exceeds it with probability at most `alpha`.
pub fn dkw_band(n: usize, alpha: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    Ok(((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt())
}

/// Per-threshold verdict of a quadrature curve against an empirical CDF.
#[derive(Debug, Clone)]
pub struct ThresholdCheck {
    pub d: f64,
    pub quadrature: f64,
    pub empirical: f64,
    pub deviation: f64,
    pub allowed: f64,
    pub pass: bool,
}

/// Comparison report: pass iff every threshold deviation stays inside the
/// DKW band plus the quadrature error bound.
#[derive(Debug, Clone)]
pub struct CompareReport {
    pub checks: Vec<ThresholdCheck>,
    pub max_deviation: f64,
    pub dkw: f64,
    pub pass: bool,
    pub warning: Option<String>,
}

pub fn compare(curve: &CdfCurve, emp: &EmpiricalCdf, alpha: f64) -> Result<CompareReport> {
    let dkw = dkw_band(emp.len(), alpha)?;
    if curve.thresholds.is_empty() {
        return Ok(CompareReport {
            checks: Vec::new(),
            max_deviation: 0.0,
            dkw,
            pass: true,
            warning: Some("empty threshold grid: nothing compared".into()),
        });
    }
    let mut checks = Vec::with_capacity(curve.thresholds.len());
    let mut max_deviation: f64 = 0.0;
    let mut pass = true;
    for (i, &d) in curve.thresholds.iter().enumerate() {
        let quadrature = curve.values[i];
        let empirical = emp.value_at(d);
        let deviation = (quadrature - empirical).abs();
        let allowed = dkw + curve.err_bounds[i];
        let ok = deviation <= allowed;
        pass &= ok;
        max_deviation = max_deviation.max(deviation);
        checks.push(ThresholdCheck {
            d,
            quadrature,
            empirical,
            deviation,
            allowed,
            pass: ok,
        });
    }
    Ok(CompareReport {
        checks,
        max_deviation,
        dkw,
        pass,
        warning: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cdf::{cdf_curve, linear_grid, CdfMethod, QuadratureSpec};

    #[test]
    fn dkw_values() {
        assert!((dkw_band(1_000_000, 0.01).unwrap() - 0.0016282).abs() < 1e-6);
        assert!((dkw_band(100, 0.05).unwrap() - 0.1358102).abs() < 1e-6);
        assert!(dkw_band(100, 2.0).is_err());
        assert!(dkw_band(0, 0.5).is_err());
    }

    #[test]
    fn degenerate_support_gives_tiny_kappa() {
        let nominal = PlanePoint::new(0.7, -0.4);
        let model = DensityModel::uniform_disc(nominal, 1e-12).unwrap();
        let emp = sample_kappa(&model, nominal, 10_000, 3).unwrap();
        assert!(emp.samples.iter().all(|&k| k < 1e-9));
    }

    #[test]
    fn empirical_cdf_is_valid() {
        let model = DensityModel::uniform_disc(PlanePoint::ZERO, 2.0).unwrap();
        let emp = sample_kappa(&model, PlanePoint::new(0.5, 0.5), 50_000, 8).unwrap();
        assert!(emp.samples.windows(2).all(|w| w[0] <= w[1]));
        assert!(emp.samples.iter().all(|&k| (0.0..=1.0).contains(&k)));
        assert_eq!(emp.value_at(1.0), 1.0);
        assert_eq!(emp.value_at(-0.1), 0.0);
    }

    #[test]
    fn analytic_quarter_mass() {
        // nominal 0, uniform disc radius 2: F(1/sqrt(2)) = 1/4.
        let model = DensityModel::uniform_disc(PlanePoint::ZERO, 2.0).unwrap();
        let n = 1_000_000;
        let emp = sample_kappa(&model, PlanePoint::ZERO, n, 21).unwrap();
        let f = emp.value_at(std::f64::consts::FRAC_1_SQRT_2);
        let band = dkw_band(n, 0.01).unwrap();
        assert!((f - 0.25).abs() < band, "F = {f}");
    }

    #[test]
    fn sampling_deterministic() {
        let model = DensityModel::uniform_disc(PlanePoint::ZERO, 1.0).unwrap();
        let a = sample_kappa(&model, PlanePoint::new(0.2, 0.0), 10_000, 5).unwrap();
        let b = sample_kappa(&model, PlanePoint::new(0.2, 0.0), 10_000, 5).unwrap();
        assert_eq!(a.samples, b.samples);
    }

    #[test]
    fn band_shrinks_at_root_n_rate() {
        let b1 = dkw_band(250_000, 0.01).unwrap();
        let b2 = dkw_band(1_000_000, 0.01).unwrap();
        assert!((b1 / b2 - 2.0).abs() < 0.2);
    }

    #[test]
    fn compare_passes_for_matching_curve_and_fails_when_shifted() {
        let model = DensityModel::uniform_disc(PlanePoint::new(0.6, 0.3), 0.9).unwrap();
        let nominal = PlanePoint::new(0.5, 0.2);
        let grid = linear_grid(0.0, 1.0, 11);
        let spec = QuadratureSpec::default();
        let curve = cdf_curve(&model, nominal, &grid, CdfMethod::Ball, &spec).unwrap();
        let emp = sample_kappa(&model, nominal, 1_000_000, 17).unwrap();
        let report = compare(&curve, &emp, 0.01).unwrap();
        assert!(report.pass, "max deviation {}", report.max_deviation);

        let mut corrupted = curve.clone();
        for v in &mut corrupted.values {
            *v = (*v + 0.05).min(1.0);
        }
        let report = compare(&corrupted, &emp, 0.01).unwrap();
        assert!(!report.pass);
    }

    #[test]
    fn empty_grid_trivially_passes_with_warning() {
        let curve = CdfCurve {
            thresholds: vec![],
            values: vec![],
            err_bounds: vec![],
            method: CdfMethod::Ball,
            abs_tol: 1e-6,
            rel_tol: 1e-6,
        };
        let model = DensityModel::uniform_disc(PlanePoint::ZERO, 1.0).unwrap();
        let emp = sample_kappa(&model, PlanePoint::ZERO, 100, 1).unwrap();
        let report = compare(&curve, &emp, 0.01).unwrap();
        assert!(report.pass && report.warning.is_some());
    }
}
