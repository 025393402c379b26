//! Geometry of the Riemann sphere of unit diameter, tangent to the complex
//! plane at the origin.
//!
//! The sphere models the extended complex plane: a plane point `c` lifts to
//! `(Re c, Im c, |c|^2) / (1 + |c|^2)`, the south pole `(0,0,0)` is the
//! origin and the north pole `(0,0,1)` is the point at infinity. The chordal
//! distance between two plane points is the straight-line 3-space distance
//! between their lifts, and is bounded by 1.
//!
//! Besides the lift/projection pair and the metric, this module computes the
//! exact planar image of a chordal ball `{P : kappa(P, nominal) < d}` along
//! two independent routes: an algebraic expansion of the defining inequality
//! ([`chordal_ball_plane`]) and the constructive meridian-intersection
//! argument on the sphere ([`meridian_ball`]).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A point of the Nyquist plane, i.e. a complex number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePoint {
    pub re: f64,
    pub im: f64,
}

impl PlanePoint {
    pub const ZERO: PlanePoint = PlanePoint { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn modulus_sq(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn dist(&self, other: &PlanePoint) -> f64 {
        (self.re - other.re).hypot(self.im - other.im)
    }

    /// Real inner product with `other`, treating points as vectors in R^2.
    pub fn dot(&self, other: &PlanePoint) -> f64 {
        self.re * other.re + self.im * other.im
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

impl From<Complex64> for PlanePoint {
    fn from(c: Complex64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

impl std::ops::Add for PlanePoint {
    type Output = PlanePoint;
    fn add(self, rhs: PlanePoint) -> PlanePoint {
        PlanePoint::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl std::ops::Sub for PlanePoint {
    type Output = PlanePoint;
    fn sub(self, rhs: PlanePoint) -> PlanePoint {
        PlanePoint::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl std::ops::Mul<f64> for PlanePoint {
    type Output = PlanePoint;
    fn mul(self, s: f64) -> PlanePoint {
        PlanePoint::new(self.re * s, self.im * s)
    }
}

/// A point on the sphere, in Cartesian 3-space coordinates.
///
/// Valid points satisfy `x^2 + y^2 + z^2 = z` and `z < 1` (the north pole is
/// not the lift of any plane point).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SpherePoint {
    pub const SOUTH_POLE: SpherePoint = SpherePoint {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    /// Residual of the on-sphere identity `x^2 + y^2 + z^2 - z`.
    pub fn sphere_residual(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z - self.z
    }

    pub fn dist(&self, other: &SpherePoint) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// Lift a plane point onto the sphere (inverse stereographic projection).
pub fn lift(c: PlanePoint) -> Result<SpherePoint> {
    if !c.is_finite() {
        return Err(Error::NonFinite("lift"));
    }
    let denom = 1.0 + c.modulus_sq();
    Ok(SpherePoint {
        x: c.re / denom,
        y: c.im / denom,
        z: c.modulus_sq() / denom,
    })
}

/// Project a sphere point back to the plane along the ray from the north pole.
pub fn project(r: SpherePoint) -> Result<PlanePoint> {
    if !(r.x.is_finite() && r.y.is_finite() && r.z.is_finite()) {
        return Err(Error::NonFinite("project"));
    }
    if r.z >= 1.0 - 1e-15 {
        return Err(Error::NorthPole { z: r.z });
    }
    let denom = 1.0 - r.z;
    Ok(PlanePoint::new(r.x / denom, r.y / denom))
}

/// Chordal distance between two plane points, in `[0, 1]`.
///
/// Equals the Euclidean 3-space distance between the lifts.
pub fn chordal_distance(p: PlanePoint, q: PlanePoint) -> f64 {
    let num = p.dist(&q);
    let den = (1.0 + p.modulus_sq()).sqrt() * (1.0 + q.modulus_sq()).sqrt();
    (num / den).min(1.0)
}

/// The planar image of a chordal ball.
///
/// Depending on whether the spherical cap stays below, reaches, or covers the
/// north pole, the image is an open disc, an open half-plane, or the open
/// exterior of a closed disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlaneDisc {
    Interior {
        center: PlanePoint,
        radius: f64,
    },
    Exterior {
        center: PlanePoint,
        radius: f64,
    },
    HalfPlane {
        /// A point on the boundary line.
        boundary_point: PlanePoint,
        /// Unit normal pointing into the set.
        inward_normal: PlanePoint,
    },
}

impl PlaneDisc {
    /// Strict membership test (the chordal ball is open).
    pub fn contains(&self, p: PlanePoint) -> bool {
        match self {
            PlaneDisc::Interior { center, radius } => p.dist(center) < *radius,
            PlaneDisc::Exterior { center, radius } => p.dist(center) > *radius,
            PlaneDisc::HalfPlane {
                boundary_point,
                inward_normal,
            } => (p - *boundary_point).dot(inward_normal) > 0.0,
        }
    }
}

/// The exact plane set `{P : kappa(P, nominal) < d}` for `d` in `(0, 1)`.
///
/// Expanding `|P - nominal|^2 < d^2 (1 + |nominal|^2)(1 + |P|^2)` with
/// `k := d^2 (1 + |nominal|^2)` gives, after completing the square,
/// a disc of center `nominal / (1 - k)` and radius
/// `d (1 + |nominal|^2) sqrt(1 - d^2) / |1 - k|`; the set is its interior
/// for `k < 1`, a half-plane at `k = 1`, and the exterior for `k > 1`.
pub fn chordal_ball_plane(nominal: PlanePoint, d: f64) -> Result<PlaneDisc> {
    if !nominal.is_finite() {
        return Err(Error::NonFinite("chordal_ball_plane"));
    }
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::RadiusOutOfRange(d));
    }
    let c_sq = 1.0 + nominal.modulus_sq();
    let k = d * d * c_sq;
    if (k - 1.0).abs() <= 1e-12 {
        // Cap through the north pole: the image degenerates to a half-plane
        // {P : <P, nominal> > (|nominal|^2 - 1) / 2}. Here |nominal| > 0
        // because k = 1 with d < 1 forces |nominal|^2 = 1/d^2 - 1 > 0.
        let r = nominal.modulus();
        let n = nominal * (1.0 / r);
        let offset = (nominal.modulus_sq() - 1.0) / (2.0 * r);
        return Ok(PlaneDisc::HalfPlane {
            boundary_point: n * offset,
            inward_normal: n,
        });
    }
    let center = nominal * (1.0 / (1.0 - k));
    let radius = d * c_sq * (1.0 - d * d).sqrt() / (1.0 - k).abs();
    if k < 1.0 {
        Ok(PlaneDisc::Interior { center, radius })
    } else {
        Ok(PlaneDisc::Exterior { center, radius })
    }
}

/// The projected disc of the spherical chordal ball `B_d(rbar)`, by the
/// meridian construction.
///
/// The cap of chordal radius `d` around `rbar` spans polar angles
/// `theta_bar +- delta` with `sin(delta / 2) = d` (polar angle measured from
/// the north pole, `cos(theta_bar) = 2 z - 1`). The meridian through `rbar`
/// meets the cap boundary at two points whose projections `p1 = cot(theta1/2)`
/// and `p2 = cot(theta2/2)` (signed, along the azimuth of `rbar`) span a
/// diameter of the projected disc, so its center is `(p1 + p2)/2` and its
/// radius `(p1 - p2)/2`. Fails if the closed cap reaches the north pole.
///
/// For caps away from the poles this agrees exactly with
/// [`chordal_ball_plane`] applied to `project(rbar)`.
pub fn meridian_ball(rbar: SpherePoint, d: f64) -> Result<PlaneDisc> {
    if !(rbar.x.is_finite() && rbar.y.is_finite() && rbar.z.is_finite()) {
        return Err(Error::NonFinite("meridian_ball"));
    }
    if rbar.sphere_residual().abs() > 1e-6 {
        return Err(Error::InvalidParameter(format!(
            "point not on the sphere (residual {})",
            rbar.sphere_residual()
        )));
    }
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::RadiusOutOfRange(d));
    }
    let theta_bar = (2.0 * rbar.z - 1.0).clamp(-1.0, 1.0).acos();
    let half_span = 2.0 * d.asin();
    let theta_near = theta_bar - half_span; // cap edge closest to the north pole
    let theta_far = theta_bar + half_span;
    if theta_near <= 1e-12 {
        return Err(Error::BallTouchesNorthPole { theta: theta_near });
    }
    // cot(theta/2) stays accurate near theta = 0 where sin/(1-cos) cancels.
    let p_near = 1.0 / (0.5 * theta_near).tan();
    let p_far = 1.0 / (0.5 * theta_far).tan();
    let azimuth = if rbar.x == 0.0 && rbar.y == 0.0 {
        0.0
    } else {
        rbar.y.atan2(rbar.x)
    };
    let magnitude = 0.5 * (p_near + p_far);
    let radius = 0.5 * (p_near - p_far);
    let center = PlanePoint::new(magnitude * azimuth.cos(), magnitude * azimuth.sin());
    Ok(PlaneDisc::Interior { center, radius })
}
