//! Joint density of the pair `z = |P - nominal|^2`, `w = |P|^2 + 1` under a
//! plane density for `P`.
//!
//! For fixed `(z, w)` the preimages of the map are the intersections of two
//! circles: radius `sqrt(z)` around the nominal point and radius
//! `sqrt(w - 1)` around the origin. The circles meet twice when
//! `|r - sqrt(w - 1)| < sqrt(z) < r + sqrt(w - 1)` (with `r` the nominal
//! modulus), touch at the boundary of that region, and miss otherwise. On
//! the two-intersection region the density is the plane density summed over
//! both preimages divided by the Jacobian `4 r^2 c2`, which vanishes like a
//! square root at the region boundary — an integrable singularity that the
//! quadrature rules in [`crate::quadrature`] are built to absorb.

use crate::densities::DensityModel;
use crate::error::{Error, Result};
use crate::quadrature::{adaptive_with_breakpoints, inner_integral, InnerRule, QuadResult};
use crate::riemann::PlanePoint;

/// A point of the transformed plane: squared distance to the nominal and
/// one plus squared modulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZWPoint {
    pub z: f64,
    pub w: f64,
}

impl ZWPoint {
    pub fn new(z: f64, w: f64) -> Result<Self> {
        if !(z.is_finite() && w.is_finite()) {
            return Err(Error::NonFinite("zw point"));
        }
        if z < 0.0 || w < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "require z >= 0 and w >= 1, got z = {z}, w = {w}"
            )));
        }
        Ok(Self { z, w })
    }
}

/// How many preimages a `(z, w)` pair has.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Two,
    Tangent,
    Empty,
}

/// The two circle intersection points together with the coefficients that
/// generated them.
#[derive(Debug, Clone, Copy)]
pub struct IntersectionPair {
    pub p1: PlanePoint,
    pub p2: PlanePoint,
    pub c1: f64,
    pub c2: f64,
}

/// Joint density value with a marker for the measure-zero tangency set,
/// where the density is left undefined and reported as zero.
#[derive(Debug, Clone, Copy)]
pub struct ZwDensity {
    pub value: f64,
    pub boundary: bool,
}

fn nominal_radius(nominal: PlanePoint) -> Result<f64> {
    let r = nominal.modulus();
    if !nominal.is_finite() {
        return Err(Error::NonFinite("nominal"));
    }
    if r < 1e-12 {
        return Err(Error::DegenerateNominal { r });
    }
    Ok(r)
}

/// Classify a `(z, w)` pair by its number of preimages.
pub fn classify(zw: ZWPoint, nominal: PlanePoint) -> Result<Classification> {
    let r = nominal_radius(nominal)?;
    let rho = (zw.w - 1.0).max(0.0).sqrt();
    let sz = zw.z.sqrt();
    let inner = (r - rho).abs();
    let outer = r + rho;
    if (sz - inner).abs() <= 1e-12 || (sz - outer).abs() <= 1e-12 {
        Ok(Classification::Tangent)
    } else if inner < sz && sz < outer {
        Ok(Classification::Two)
    } else {
        Ok(Classification::Empty)
    }
}

/// The two intersection points for a pair classified as [`Classification::Two`].
pub fn intersections(zw: ZWPoint, nominal: PlanePoint) -> Result<IntersectionPair> {
    if classify(zw, nominal)? != Classification::Two {
        return Err(Error::Precondition(format!(
            "(z, w) = ({}, {}) has no two-point preimage for nominal {:?}",
            zw.z, zw.w, nominal
        )));
    }
    let r = nominal_radius(nominal)?;
    let r_sq = r * r;
    let (c1, c2_sq) = intersection_coefficients(zw.z, zw.w, r_sq);
    let c2 = c2_sq.max(0.0).sqrt();
    let (a, b) = (nominal.re, nominal.im);
    Ok(IntersectionPair {
        p1: PlanePoint::new(c1 * a - c2 * b, c1 * b + c2 * a),
        p2: PlanePoint::new(c1 * a + c2 * b, c1 * b - c2 * a),
        c1,
        c2,
    })
}

#[inline]
fn intersection_coefficients(z: f64, w: f64, r_sq: f64) -> (f64, f64) {
    let c1 = 0.5 - (z - w + 1.0) / (2.0 * r_sq);
    let c2_sq =
        0.25 * (2.0 * (z + w - 1.0) / r_sq - (z - w + 1.0) * (z - w + 1.0) / (r_sq * r_sq) - 1.0);
    (c1, c2_sq)
}

/// The joint density of `(z, w)`.
pub fn joint_density_zw(
    zw: ZWPoint,
    nominal: PlanePoint,
    model: &DensityModel,
) -> Result<ZwDensity> {
    match classify(zw, nominal)? {
        Classification::Empty => Ok(ZwDensity {
            value: 0.0,
            boundary: false,
        }),
        Classification::Tangent => Ok(ZwDensity {
            value: 0.0,
            boundary: true,
        }),
        Classification::Two => {
            let pair = intersections(zw, nominal)?;
            let r_sq = nominal.modulus_sq();
            let value = (model.pdf(pair.p1) + model.pdf(pair.p2)) / (4.0 * r_sq * pair.c2);
            Ok(ZwDensity {
                value: if value.is_finite() { value } else { 0.0 },
                boundary: false,
            })
        }
    }
}

/// Values of `z` strictly inside `(B-, B+)` at which an intersection point
/// crosses the circle `|p - sc| = sr`, where the hard-support indicator of a
/// density jumps. Splitting inner integrals there keeps each piece smooth.
///
/// The crossing condition `<p_i(z, w), sc> = h` squares to one quadratic in
/// `z` covering both branches; spurious roots from the squaring are harmless
/// as split points.
pub(crate) fn support_circle_crossings(
    w: f64,
    nominal: PlanePoint,
    r_sq: f64,
    sc: PlanePoint,
    sr: f64,
) -> [Option<f64>; 2] {
    let rho_sq = w - 1.0;
    if rho_sq <= 0.0 {
        return [None, None];
    }
    let alpha = nominal.re * sc.re + nominal.im * sc.im;
    let beta = -nominal.im * sc.re + nominal.re * sc.im;
    let norm = alpha * alpha + beta * beta;
    if norm < 1e-300 {
        // Support concentric with the origin: membership depends on w only.
        return [None, None];
    }
    let r = r_sq.sqrt();
    let rho = rho_sq.sqrt();
    let b_minus = (r - rho) * (r - rho);
    let b_plus = (r + rho) * (r + rho);
    let h = 0.5 * (rho_sq + sc.modulus_sq() - sr * sr);
    let k0 = 2.0 * r_sq * h - alpha * (r_sq + w - 1.0);
    let b_quad = 2.0 * k0 * alpha - beta * beta * (b_plus + b_minus);
    let c_quad = k0 * k0 + beta * beta * b_plus * b_minus;
    let disc = b_quad * b_quad - 4.0 * norm * c_quad;
    if disc <= 0.0 {
        // Grazing contact collapses to a double root (beta = 0 when support
        // center and nominal are collinear); keep it as a split point.
        let scale = b_quad * b_quad + 4.0 * (norm * c_quad).abs();
        if disc > -1e-10 * scale {
            return [Some(-0.5 * b_quad / norm), None];
        }
        return [None, None];
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b_quad + b_quad.signum() * sq);
    let r1 = q / norm;
    let r2 = if q != 0.0 { c_quad / q } else { r1 };
    [Some(r1.min(r2)), Some(r1.max(r2))]
}

/// Integral of the joint density in `z` over `[lo, hi]` at fixed `w`.
///
/// `[lo, hi]` must lie inside `[b_minus, b_plus]`, the square-root zeros of
/// the Jacobian at this `w`. The integrand is evaluated from exact endpoint
/// distances (`4 r^4 c2^2 = (B+ - z)(z - B-)` in product form), and hard
/// support boundaries split the interval so every piece is smooth.
#[allow(clippy::too_many_arguments)]
pub(crate) fn integrate_z_slice(
    model: &DensityModel,
    nominal: PlanePoint,
    r_sq: f64,
    w: f64,
    lo: f64,
    hi: f64,
    b_minus: f64,
    b_plus: f64,
    rule: InnerRule,
    abs_tol: f64,
    max_subdivisions: usize,
) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let mut cuts = vec![lo, hi];
    if let Some((sc, sr)) = model.hard_disc() {
        for root in support_circle_crossings(w, nominal, r_sq, sc, sr)
            .into_iter()
            .flatten()
        {
            if root > lo && root < hi {
                cuts.push(root);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    let (a, b) = (nominal.re, nominal.im);
    let piece_tol = abs_tol / (cuts.len() - 1) as f64;
    let mut total = 0.0;
    for pair in cuts.windows(2) {
        let (s0, s1) = (pair[0], pair[1]);
        if s1 <= s0 {
            continue;
        }
        let base_lo = (s0 - b_minus).max(0.0);
        let base_hi = (b_plus - s1).max(0.0);
        let f = |da: f64, db: f64| -> f64 {
            let from_minus = base_lo + da;
            let from_plus = base_hi + db;
            let c2_sq = from_minus * from_plus / (4.0 * r_sq * r_sq);
            if c2_sq <= 0.0 {
                return 0.0;
            }
            let c2 = c2_sq.sqrt();
            let z = if da <= db { s0 + da } else { s1 - db };
            let c1 = (r_sq + w - 1.0 - z) / (2.0 * r_sq);
            let p1 = PlanePoint::new(c1 * a - c2 * b, c1 * b + c2 * a);
            let p2 = PlanePoint::new(c1 * a + c2 * b, c1 * b - c2 * a);
            let v = (model.pdf(p1) + model.pdf(p2)) / (4.0 * r_sq * c2);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        total += inner_integral(rule, f, s0, s1, piece_tol, max_subdivisions).value;
    }
    total
}

/// Integral of the joint density over `[z0, z1] x [w0, w1]`, clipped to the
/// valid region.
pub fn mass_in_zw_rect(
    model: &DensityModel,
    nominal: PlanePoint,
    z_range: (f64, f64),
    w_range: (f64, f64),
    abs_tol: f64,
) -> Result<QuadResult> {
    let r = nominal_radius(nominal)?;
    let r_sq = r * r;
    let w_lo = w_range.0.max(1.0);
    let w_hi = w_range.1;
    if !(w_hi > w_lo) || !(z_range.1 > z_range.0) {
        return Ok(QuadResult {
            value: 0.0,
            err_bound: 0.0,
        });
    }
    let inner_tol = (abs_tol / (w_hi - w_lo)).max(1e-14) * 0.2;
    // Abscissae where the clipped inner interval gains or loses an endpoint,
    // plus hard-support tangency radii; the adaptive rule must see them.
    let mut breaks = vec![1.0 + r_sq];
    for z_edge in [z_range.0, z_range.1] {
        let sz = z_edge.max(0.0).sqrt();
        breaks.push(1.0 + (r - sz) * (r - sz));
        breaks.push(1.0 + (r + sz) * (r + sz));
    }
    if let Some((sc, sr)) = model.hard_disc() {
        let d = sc.modulus();
        breaks.push(1.0 + (d - sr) * (d - sr));
        breaks.push(1.0 + (d + sr) * (d + sr));
    }
    let outer = adaptive_with_breakpoints(
        |w: f64| {
            let rho = (w - 1.0).max(0.0).sqrt();
            let b_minus = (r - rho) * (r - rho);
            let b_plus = (r + rho) * (r + rho);
            integrate_z_slice(
                model,
                nominal,
                r_sq,
                w,
                z_range.0.max(b_minus),
                z_range.1.min(b_plus),
                b_minus,
                b_plus,
                InnerRule::DoubleExponential,
                inner_tol,
                300,
            )
        },
        w_lo,
        w_hi,
        &breaks,
        abs_tol * 0.8,
        1e-10,
        600,
    );
    Ok(QuadResult {
        value: outer.value,
        err_bound: outer.err_bound + abs_tol * 0.2,
    })
}
