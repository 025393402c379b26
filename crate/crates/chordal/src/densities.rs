//! Probability models for the uncertain plant value at a fixed frequency:
//! density evaluation, deterministic sampling, and modulus support bounds.
//!
//! Three variants are supported. The plain Gaussian has unbounded support;
//! wherever a compact region is required (quadrature limits, support
//! bounds) it is replaced by an effective disc around the mean whose
//! excluded mass is below a caller-supplied tolerance. The truncated
//! Gaussian hard-limits the Gaussian to a disc of radius `trunc_sigma`
//! standard deviations (largest covariance eigenvalue) around the mean and
//! renormalizes, giving honest compact support.

use crate::error::{Error, Result};
use crate::quadrature::adaptive;
use crate::riemann::PlanePoint;
use crate::rng::CounterRng;

use std::f64::consts::{PI, TAU};

/// A 2x2 symmetric positive definite matrix, stored by its upper triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cov2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Cov2 {
    pub fn new(xx: f64, xy: f64, yy: f64) -> Result<Self> {
        let c = Self { xx, xy, yy };
        if !(xx.is_finite() && xy.is_finite() && yy.is_finite()) {
            return Err(Error::NonFinite("covariance"));
        }
        if !c.is_spd() {
            return Err(Error::NotSpd);
        }
        Ok(c)
    }

    pub fn diagonal(xx: f64, yy: f64) -> Result<Self> {
        Self::new(xx, 0.0, yy)
    }

    /// Build without the SPD check, for symmetric matrices that may be
    /// degenerate (zero-noise parameter covariances, propagated Jacobian
    /// products). Density constructors revalidate.
    pub fn symmetric_unchecked(xx: f64, xy: f64, yy: f64) -> Self {
        Self { xx, xy, yy }
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn is_spd(&self) -> bool {
        self.xx > 0.0 && self.det() > 0.0
    }

    /// Eigenvalues, largest first. Both are positive for an SPD matrix.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let tr = self.xx + self.yy;
        let disc = ((self.xx - self.yy).hypot(2.0 * self.xy)).abs();
        ((tr + disc) / 2.0, (tr - disc) / 2.0)
    }

    /// Lower Cholesky factor `(l11, l21, l22)`.
    pub fn cholesky(&self) -> (f64, f64, f64) {
        let l11 = self.xx.sqrt();
        let l21 = self.xy / l11;
        let l22 = (self.yy - l21 * l21).max(0.0).sqrt();
        (l11, l21, l22)
    }

    pub fn inverse(&self) -> Cov2 {
        let det = self.det();
        Cov2 {
            xx: self.yy / det,
            xy: -self.xy / det,
            yy: self.xx / det,
        }
    }

    /// Quadratic form `v^T M v`.
    pub fn quad_form(&self, v: PlanePoint) -> f64 {
        self.xx * v.re * v.re + 2.0 * self.xy * v.re * v.im + self.yy * v.im * v.im
    }

    /// Clamp eigenvalues from below, reporting whether anything changed.
    pub fn floor_eigenvalues(&self, min_eig: f64) -> (Cov2, bool) {
        let (l1, l2) = self.eigenvalues();
        if l2 >= min_eig {
            return (*self, false);
        }
        // Eigenvector basis of the symmetric matrix.
        let theta = 0.5 * (2.0 * self.xy).atan2(self.xx - self.yy);
        let (c, s) = (theta.cos(), theta.sin());
        let e1 = l1.max(min_eig);
        let e2 = l2.max(min_eig);
        (
            Cov2 {
                xx: e1 * c * c + e2 * s * s,
                xy: (e1 - e2) * c * s,
                yy: e1 * s * s + e2 * c * c,
            },
            true,
        )
    }
}

/// Modulus bounds `rho_min <= |P| <= rho_max` over the (effective) support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportBound {
    pub rho_min: f64,
    pub rho_max: f64,
}

#[derive(Debug, Clone)]
struct GaussianCore {
    mean: PlanePoint,
    cov: Cov2,
    inv: Cov2,
    chol: (f64, f64, f64),
    /// Peak density `1 / (2 pi sqrt(det))`.
    height: f64,
}

impl GaussianCore {
    fn new(mean: PlanePoint, cov: Cov2) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::NonFinite("gaussian mean"));
        }
        Ok(Self {
            mean,
            cov,
            inv: cov.inverse(),
            chol: cov.cholesky(),
            height: 1.0 / (TAU * cov.det().sqrt()),
        })
    }

    fn pdf(&self, p: PlanePoint) -> f64 {
        let d = p - self.mean;
        self.height * (-0.5 * self.inv.quad_form(d)).exp()
    }

    fn draw(&self, rng: &mut CounterRng) -> PlanePoint {
        let (z1, z2) = rng.normal_pair();
        let (l11, l21, l22) = self.chol;
        PlanePoint::new(self.mean.re + l11 * z1, self.mean.im + l21 * z1 + l22 * z2)
    }

    fn sigma_max(&self) -> f64 {
        self.cov.eigenvalues().0.sqrt()
    }
}

/// A probability model for the uncertain plant value `P(jw)`.
#[derive(Debug, Clone)]
pub enum DensityModel {
    Gaussian(Gaussian),
    UniformDisc(UniformDisc),
    TruncatedGaussian(TruncatedGaussian),
}

#[derive(Debug, Clone)]
pub struct Gaussian {
    core: GaussianCore,
}

#[derive(Debug, Clone)]
pub struct UniformDisc {
    pub center: PlanePoint,
    pub radius: f64,
    height: f64,
}

#[derive(Debug, Clone)]
pub struct TruncatedGaussian {
    core: GaussianCore,
    pub trunc_sigma: f64,
    /// Disc radius `trunc_sigma * sigma_max` around the mean.
    pub trunc_radius: f64,
    /// Reciprocal of the Gaussian mass inside the truncation disc.
    renorm: f64,
}

impl DensityModel {
    pub fn gaussian(mean: PlanePoint, cov: Cov2) -> Result<Self> {
        Ok(DensityModel::Gaussian(Gaussian {
            core: GaussianCore::new(mean, cov)?,
        }))
    }

    pub fn uniform_disc(center: PlanePoint, radius: f64) -> Result<Self> {
        if !center.is_finite() || !radius.is_finite() {
            return Err(Error::NonFinite("uniform disc"));
        }
        if radius <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "uniform disc radius must be positive, got {radius}"
            )));
        }
        Ok(DensityModel::UniformDisc(UniformDisc {
            center,
            radius,
            height: 1.0 / (PI * radius * radius),
        }))
    }

    /// Gaussian restricted to the disc of radius `trunc_sigma * sigma_max`
    /// around the mean. Truncation tighter than 0.1 sigma is rejected: the
    /// rejection sampler would accept almost nothing.
    pub fn truncated_gaussian(mean: PlanePoint, cov: Cov2, trunc_sigma: f64) -> Result<Self> {
        if trunc_sigma < 0.1 {
            return Err(Error::InvalidParameter(format!(
                "truncation radius {trunc_sigma} sigma is below the 0.1 sigma minimum"
            )));
        }
        let core = GaussianCore::new(mean, cov)?;
        let trunc_radius = trunc_sigma * core.sigma_max();
        let mass = gaussian_mass_in_disc(&core, mean, trunc_radius);
        Ok(DensityModel::TruncatedGaussian(TruncatedGaussian {
            renorm: 1.0 / mass,
            core,
            trunc_sigma,
            trunc_radius,
        }))
    }

    /// Density value at `p`; zero outside hard support.
    pub fn pdf(&self, p: PlanePoint) -> f64 {
        match self {
            DensityModel::Gaussian(g) => g.core.pdf(p),
            DensityModel::UniformDisc(u) => {
                if p.dist(&u.center) <= u.radius {
                    u.height
                } else {
                    0.0
                }
            }
            DensityModel::TruncatedGaussian(t) => {
                if p.dist(&t.core.mean) <= t.trunc_radius {
                    t.renorm * t.core.pdf(p)
                } else {
                    0.0
                }
            }
        }
    }

    /// Draw number `index` of the stream identified by `seed`.
    ///
    /// A pure function of `(seed, index)`, so any index range can be
    /// evaluated on any thread in any order with identical results.
    pub fn sample_at(&self, seed: u64, index: u64) -> PlanePoint {
        let mut rng = CounterRng::new(seed, index);
        match self {
            DensityModel::Gaussian(g) => g.core.draw(&mut rng),
            DensityModel::UniformDisc(u) => {
                let rho = u.radius * rng.uniform().sqrt();
                let phi = TAU * rng.uniform();
                PlanePoint::new(u.center.re + rho * phi.cos(), u.center.im + rho * phi.sin())
            }
            DensityModel::TruncatedGaussian(t) => loop {
                let p = t.core.draw(&mut rng);
                if p.dist(&t.core.mean) <= t.trunc_radius {
                    return p;
                }
            },
        }
    }

    /// `n` i.i.d. draws, deterministic for a fixed seed.
    pub fn sample(&self, seed: u64, n: usize) -> Vec<PlanePoint> {
        (0..n as u64).map(|i| self.sample_at(seed, i)).collect()
    }

    /// The disc around the model's center containing all mass up to
    /// `mass_tolerance` (exactly all of it for compact variants).
    pub fn effective_disc(&self, mass_tolerance: f64) -> Result<(PlanePoint, f64)> {
        match self {
            DensityModel::Gaussian(g) => {
                if !(mass_tolerance > 0.0 && mass_tolerance < 1e-3) {
                    return Err(Error::InvalidParameter(format!(
                        "mass tolerance must lie in (0, 1e-3) for a Gaussian, got {mass_tolerance}"
                    )));
                }
                // ||P - mean||^2 <= sigma_max^2 chi^2_2, so a disc of radius
                // k sigma_max excludes mass at most exp(-k^2 / 2).
                let k = (-2.0 * mass_tolerance.ln()).sqrt();
                Ok((g.core.mean, k * g.core.sigma_max()))
            }
            DensityModel::UniformDisc(u) => Ok((u.center, u.radius)),
            DensityModel::TruncatedGaussian(t) => Ok((t.core.mean, t.trunc_radius)),
        }
    }

    /// Hard support disc, if the model has one.
    pub fn hard_disc(&self) -> Option<(PlanePoint, f64)> {
        match self {
            DensityModel::Gaussian(_) => None,
            DensityModel::UniformDisc(u) => Some((u.center, u.radius)),
            DensityModel::TruncatedGaussian(t) => Some((t.core.mean, t.trunc_radius)),
        }
    }

    /// Modulus bounds over the effective support.
    pub fn support_bound(&self, mass_tolerance: f64) -> Result<SupportBound> {
        let (center, radius) = self.effective_disc(mass_tolerance)?;
        let rho = center.modulus();
        Ok(SupportBound {
            rho_min: (rho - radius).max(0.0),
            rho_max: rho + radius,
        })
    }

    /// Distribution mean.
    pub fn mean(&self) -> PlanePoint {
        match self {
            DensityModel::Gaussian(g) => g.core.mean,
            DensityModel::UniformDisc(u) => u.center,
            // Truncation disc is centered on the mean, so the mean is kept.
            DensityModel::TruncatedGaussian(t) => t.core.mean,
        }
    }
}

/// Gaussian mass inside a disc, by polar quadrature about the disc center.
fn gaussian_mass_in_disc(core: &GaussianCore, center: PlanePoint, radius: f64) -> f64 {
    let ring = |rho: f64| {
        let arc = adaptive(
            |phi: f64| {
                core.pdf(PlanePoint::new(
                    center.re + rho * phi.cos(),
                    center.im + rho * phi.sin(),
                ))
            },
            0.0,
            TAU,
            1e-13,
            1e-12,
            60,
        );
        rho * arc.value
    };
    adaptive(ring, 0.0, radius, 1e-11, 1e-10, 150).value
}
