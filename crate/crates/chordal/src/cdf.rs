//! The CDF of the chordal distance `K = kappa(P, nominal)`.
//!
//! Two independent quadrature routes compute `F_K(d)`:
//!
//! - [`cdf_double_integral`] evaluates the double integral of the pushforward
//!   density over the region `{(l, t) : l <= t d^2 (1 + r^2)}`, with the
//!   inner variable running between the square-root singularities of the
//!   Jacobian. The outer integral is truncated to
//!   `t in [1 + rho_min^2, 1 + rho_max^2]` from the support bound, outside
//!   which the integrand vanishes (exactly for compact supports, up to the
//!   mass tolerance for the Gaussian).
//! - [`cdf_ball`] integrates the plane density over the exact planar image
//!   of the chordal ball intersected with the support, in polar coordinates
//!   about the ball center. It handles all three image kinds and a nominal
//!   at the origin, and is the default route.
//!
//! A Monte-Carlo route through [`crate::montecarlo`] provides the
//! independent oracle for both.

use rayon::prelude::*;

use crate::densities::DensityModel;
use crate::error::{Error, Result};
use crate::montecarlo;
use crate::pushforward::integrate_z_slice;
use crate::quadrature::{adaptive, adaptive_with_breakpoints, InnerRule, QuadResult};
use crate::riemann::{chordal_ball_plane, PlaneDisc, PlanePoint};

/// One CDF evaluation request.
#[derive(Debug, Clone, Copy)]
pub struct CdfQuery<'a> {
    pub model: &'a DensityModel,
    pub nominal: PlanePoint,
    pub d: f64,
}

impl<'a> CdfQuery<'a> {
    pub fn new(model: &'a DensityModel, nominal: PlanePoint, d: f64) -> Result<Self> {
        if !nominal.is_finite() {
            return Err(Error::NonFinite("nominal"));
        }
        if !(0.0..=1.0).contains(&d) {
            return Err(Error::RadiusOutOfRange(d));
        }
        Ok(Self { model, nominal, d })
    }
}

/// Tolerances, subdivision budget, inner rule, and the mass tolerance that
/// controls outer truncation for unbounded densities.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub inner_rule: InnerRule,
    pub mass_tolerance: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-6,
            rel_tol: 1e-6,
            max_subdivisions: 800,
            inner_rule: InnerRule::DoubleExponential,
            mass_tolerance: 1e-9,
        }
    }
}

impl QuadratureSpec {
    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol >= 0.0) {
            return Err(Error::InvalidParameter(
                "quadrature tolerances must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Which route produced a CDF curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CdfMethod {
    DoubleIntegral,
    Ball,
    MonteCarlo { n: usize, seed: u64 },
}

impl CdfMethod {
    pub fn label(&self) -> &'static str {
        match self {
            CdfMethod::DoubleIntegral => "double-integral",
            CdfMethod::Ball => "ball",
            CdfMethod::MonteCarlo { .. } => "monte-carlo",
        }
    }
}

/// A sampled CDF: `values[i] = F(thresholds[i])`, nondecreasing in `[0, 1]`.
#[derive(Debug, Clone)]
pub struct CdfCurve {
    pub thresholds: Vec<f64>,
    pub values: Vec<f64>,
    pub err_bounds: Vec<f64>,
    pub method: CdfMethod,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

fn finish(value: f64, err_bound: f64, spec: &QuadratureSpec, context: &str) -> Result<QuadResult> {
    let tol = spec.abs_tol.max(spec.rel_tol * value.abs());
    if err_bound > tol {
        return Err(Error::Convergence {
            best: value,
            err_bound,
            context: context.to_string(),
        });
    }
    // Estimates may poke out of [0, 1] by less than the error bound.
    if value < -(err_bound + 1e-9) || value > 1.0 + err_bound + 1e-9 {
        return Err(Error::Convergence {
            best: value,
            err_bound,
            context: format!("{context}: estimate outside [0, 1]"),
        });
    }
    Ok(QuadResult {
        value: value.clamp(0.0, 1.0),
        err_bound,
    })
}

/// CDF by the double integral over the pushforward density.
pub fn cdf_double_integral(q: &CdfQuery, spec: &QuadratureSpec) -> Result<QuadResult> {
    spec.validate()?;
    if !(0.0..=1.0).contains(&q.d) {
        return Err(Error::RadiusOutOfRange(q.d));
    }
    let r = q.nominal.modulus();
    if r < 1e-6 {
        return Err(Error::DegenerateNominal { r });
    }
    if q.d == 0.0 {
        return Ok(QuadResult {
            value: 0.0,
            err_bound: 0.0,
        });
    }
    let bound = q.model.support_bound(spec.mass_tolerance)?;
    let t_lo = 1.0 + bound.rho_min * bound.rho_min;
    let t_hi = 1.0 + bound.rho_max * bound.rho_max;
    let r_sq = r * r;
    let q_level = q.d * q.d * (1.0 + r_sq);
    let nominal = q.nominal;
    let model = q.model;

    let inner_budget = 0.25 * spec.abs_tol;
    let inner_tol = (inner_budget / (t_hi - t_lo).max(1e-3)).max(1e-15);
    let rule = spec.inner_rule;
    let max_sub = spec.max_subdivisions;

    let breaks = double_integral_breakpoints(r, q_level, q.model);
    let outer = adaptive_with_breakpoints(
        |t: f64| {
            let rho = (t - 1.0).max(0.0).sqrt();
            let lower = (r - rho) * (r - rho);
            let upper = (r + rho) * (r + rho);
            let cut = t * q_level;
            integrate_z_slice(
                model,
                nominal,
                r_sq,
                t,
                lower,
                upper.min(cut),
                lower,
                upper,
                rule,
                inner_tol,
                max_sub,
            )
        },
        t_lo,
        t_hi,
        &breaks,
        0.5 * spec.abs_tol,
        0.5 * spec.rel_tol,
        spec.max_subdivisions,
    );
    let err = outer.err_bound + inner_budget + spec.mass_tolerance;
    finish(outer.value, err, spec, "double-integral outer route")
}

/// Outer-variable abscissae where the double integral changes character:
/// the window edges where the inner interval becomes nonempty (the moving
/// cut crossing the lower Jacobian zero), the kink where it crosses the
/// upper one, the branch point of `|r - sqrt(t - 1)|`, and hard-support
/// tangency radii. Seeding the outer rule with these keeps narrow support
/// windows visible at any threshold.
fn double_integral_breakpoints(r: f64, q_level: f64, model: &DensityModel) -> Vec<f64> {
    let r_sq = r * r;
    let mut out = vec![1.0 + r_sq];
    // (1 + s^2) q - (s -+ r)^2 = 0 over s = sqrt(t - 1) >= 0.
    for sign in [1.0f64, -1.0] {
        let a2 = q_level - 1.0;
        let b1 = sign * 2.0 * r;
        let c0 = q_level - r_sq;
        if a2.abs() < 1e-14 {
            if b1 != 0.0 {
                let s = -c0 / b1;
                if s > 0.0 {
                    out.push(1.0 + s * s);
                }
            }
            continue;
        }
        let disc = b1 * b1 - 4.0 * a2 * c0;
        if disc < 0.0 {
            continue;
        }
        let sq = disc.sqrt();
        let q_root = -0.5 * (b1 + b1.signum() * sq);
        for s in [
            q_root / a2,
            if q_root != 0.0 { c0 / q_root } else { f64::NAN },
        ] {
            if s.is_finite() && s > 0.0 {
                out.push(1.0 + s * s);
            }
        }
    }
    if let Some((sc, sr)) = model.hard_disc() {
        let d = sc.modulus();
        out.push(1.0 + (d - sr) * (d - sr));
        out.push(1.0 + (d + sr) * (d + sr));
    }
    out
}

/// CDF by integrating the plane density over the planar chordal ball.
pub fn cdf_ball(q: &CdfQuery, spec: &QuadratureSpec) -> Result<QuadResult> {
    spec.validate()?;
    if !(0.0..=1.0).contains(&q.d) {
        return Err(Error::RadiusOutOfRange(q.d));
    }
    if q.d == 0.0 {
        return Ok(QuadResult {
            value: 0.0,
            err_bound: 0.0,
        });
    }
    if q.d == 1.0 {
        // kappa < 1 excludes only the antipodal point, which carries no mass.
        return Ok(QuadResult {
            value: 1.0,
            err_bound: spec.mass_tolerance,
        });
    }
    let (sc, sr) = q.model.effective_disc(spec.mass_tolerance)?;
    let disc = chordal_ball_plane(q.nominal, q.d)?;
    let res = match disc {
        PlaneDisc::Interior { center, radius } => {
            disc_region_mass(q.model, center, radius, sc, sr, spec)
        }
        PlaneDisc::Exterior { center, radius } => {
            let inside = disc_region_mass(q.model, center, radius, sc, sr, spec);
            QuadResult {
                value: 1.0 - inside.value,
                err_bound: inside.err_bound,
            }
        }
        PlaneDisc::HalfPlane {
            boundary_point,
            inward_normal,
        } => half_plane_mass(q.model, boundary_point, inward_normal, sc, sr, spec),
    };
    finish(
        res.value,
        res.err_bound + spec.mass_tolerance,
        spec,
        "ball-route integral",
    )
}

/// Mass of `model` inside `disc(center, radius) intersected with disc(sc, sr)`, in polar
/// coordinates about `center`. The angular extent of the support disc at
/// each radius is computed in closed form so the inner integrand stays
/// smooth for Gaussian densities and constant for uniform ones.
fn disc_region_mass(
    model: &DensityModel,
    center: PlanePoint,
    radius: f64,
    sc: PlanePoint,
    sr: f64,
    spec: &QuadratureSpec,
) -> QuadResult {
    let offset = sc - center;
    let dist = offset.modulus();
    let rho_lo = (dist - sr).max(0.0);
    let rho_hi = radius.min(dist + sr);
    if rho_hi <= rho_lo {
        return QuadResult {
            value: 0.0,
            err_bound: 0.0,
        };
    }
    let phi0 = if dist > f64::EPSILON * (sr + radius) {
        offset.im.atan2(offset.re)
    } else {
        0.0
    };
    let concentric = dist <= f64::EPSILON * (sr + radius);

    let inner_budget = 0.25 * spec.abs_tol;
    let inner_tol =
        (inner_budget / (0.5 * (rho_hi * rho_hi - rho_lo * rho_lo)).max(1e-3)).max(1e-15);

    let ring = |rho: f64| -> f64 {
        if rho <= 0.0 {
            return 0.0;
        }
        let (lo, hi) = if concentric {
            if rho <= sr {
                (-std::f64::consts::PI, std::f64::consts::PI)
            } else {
                return 0.0;
            }
        } else if rho + dist <= sr {
            (-std::f64::consts::PI, std::f64::consts::PI)
        } else if rho >= dist + sr || dist >= rho + sr {
            return 0.0;
        } else {
            let cos_alpha = (rho * rho + dist * dist - sr * sr) / (2.0 * rho * dist);
            let alpha = cos_alpha.clamp(-1.0, 1.0).acos();
            (phi0 - alpha, phi0 + alpha)
        };
        let arc = adaptive(
            |phi: f64| {
                model.pdf(PlanePoint::new(
                    center.re + rho * phi.cos(),
                    center.im + rho * phi.sin(),
                ))
            },
            lo,
            hi,
            inner_tol,
            1e-12,
            200,
        );
        rho * arc.value
    };
    let outer = adaptive(
        ring,
        rho_lo,
        rho_hi,
        0.5 * spec.abs_tol,
        0.5 * spec.rel_tol,
        spec.max_subdivisions,
    );
    QuadResult {
        value: outer.value,
        err_bound: outer.err_bound + inner_budget,
    }
}

/// Mass of `model` in the half-plane `<p - p0, n> > 0` intersected with the
/// support disc, integrated in rotated Cartesian coordinates aligned with
/// the normal.
fn half_plane_mass(
    model: &DensityModel,
    p0: PlanePoint,
    n: PlanePoint,
    sc: PlanePoint,
    sr: f64,
    spec: &QuadratureSpec,
) -> QuadResult {
    let n_perp = PlanePoint::new(-n.im, n.re);
    let rel = sc - p0;
    let su = rel.dot(&n);
    let sv = rel.dot(&n_perp);
    let u_lo = (su - sr).max(0.0);
    let u_hi = su + sr;
    if u_hi <= u_lo {
        return QuadResult {
            value: 0.0,
            err_bound: 0.0,
        };
    }
    let inner_budget = 0.25 * spec.abs_tol;
    let inner_tol = (inner_budget / ((u_hi - u_lo) * 2.0 * sr).max(1e-3)).max(1e-15);
    let strip = |u: f64| -> f64 {
        let du = u - su;
        let half_chord_sq = sr * sr - du * du;
        if half_chord_sq <= 0.0 {
            return 0.0;
        }
        let beta = half_chord_sq.sqrt();
        adaptive(
            |v: f64| {
                model.pdf(PlanePoint::new(
                    p0.re + n.re * u + n_perp.re * v,
                    p0.im + n.im * u + n_perp.im * v,
                ))
            },
            sv - beta,
            sv + beta,
            inner_tol,
            1e-12,
            200,
        )
        .value
    };
    let outer = adaptive(
        strip,
        u_lo,
        u_hi,
        0.5 * spec.abs_tol,
        0.5 * spec.rel_tol,
        spec.max_subdivisions,
    );
    QuadResult {
        value: outer.value,
        err_bound: outer.err_bound + inner_budget,
    }
}

/// Evaluate a CDF curve on an ascending threshold grid.
pub fn cdf_curve(
    model: &DensityModel,
    nominal: PlanePoint,
    grid: &[f64],
    method: CdfMethod,
    spec: &QuadratureSpec,
) -> Result<CdfCurve> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty threshold grid".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) || grid.iter().any(|d| !(0.0..=1.0).contains(d)) {
        return Err(Error::InvalidParameter(
            "threshold grid must be strictly ascending within [0, 1]".into(),
        ));
    }
    let (values, err_bounds): (Vec<f64>, Vec<f64>) = match method {
        CdfMethod::DoubleIntegral | CdfMethod::Ball => {
            let results: Vec<Result<QuadResult>> = grid
                .par_iter()
                .map(|&d| {
                    let q = CdfQuery::new(model, nominal, d)?;
                    match method {
                        CdfMethod::DoubleIntegral => cdf_double_integral(&q, spec),
                        _ => cdf_ball(&q, spec),
                    }
                })
                .collect();
            let mut values = Vec::with_capacity(grid.len());
            let mut errs = Vec::with_capacity(grid.len());
            for (d, res) in grid.iter().zip(results) {
                let r = res.map_err(|e| annotate_threshold(e, *d))?;
                values.push(r.value);
                errs.push(r.err_bound);
            }
            (values, errs)
        }
        CdfMethod::MonteCarlo { n, seed } => {
            let emp = montecarlo::sample_kappa(model, nominal, n, seed)?;
            let band = montecarlo::dkw_band(n, 0.01)?;
            (
                grid.iter().map(|&d| emp.value_at(d)).collect(),
                vec![band; grid.len()],
            )
        }
    };
    let values = enforce_monotone(values, &err_bounds, grid)?;
    Ok(CdfCurve {
        thresholds: grid.to_vec(),
        values,
        err_bounds,
        method,
        abs_tol: spec.abs_tol,
        rel_tol: spec.rel_tol,
    })
}

/// Make per-threshold estimates nondecreasing.
///
/// Adjacent thresholds are integrated independently, so their errors do not
/// cancel; tiny downward wobbles inside the certified error bounds are
/// lifted to the running maximum. A drop the error bounds cannot explain
/// (plus the 1e-9 slack) is a quadrature failure and is reported as such.
pub(crate) fn enforce_monotone(
    mut values: Vec<f64>,
    err_bounds: &[f64],
    grid: &[f64],
) -> Result<Vec<f64>> {
    for i in 1..values.len() {
        if values[i] < values[i - 1] {
            let drop = values[i - 1] - values[i];
            if drop > err_bounds[i] + err_bounds[i - 1] + 1e-9 {
                return Err(Error::Monotonicity {
                    threshold: grid[i],
                    drop,
                });
            }
            values[i] = values[i - 1];
        }
    }
    Ok(values)
}

fn annotate_threshold(e: Error, d: f64) -> Error {
    match e {
        Error::Convergence {
            best,
            err_bound,
            context,
        } => Error::Convergence {
            best,
            err_bound,
            context: format!("{context} at threshold d = {d}"),
        },
        other => other,
    }
}

/// An evenly spaced threshold grid over `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (count - 1) as f64;
    (0..count).map(|i| lo + step * i as f64).collect()
}
