//! Pointwise robustness margins: the closed-loop gang-of-four matrix, the
//! margin `rho` (reciprocal largest singular value), the chordal
//! degradation inequality, and a grid-approximated stability margin `b`.
//!
//! `rho(P, C) >= rho(Pbar, C) - kappa(P, Pbar)` holds at every frequency for
//! every well-posed triple; it is the bridge between the chordal-distance
//! distribution and closed-loop performance degradation, and the central
//! property test of this module.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lti::{eval_freq, RationalTF};
use crate::riemann::{chordal_distance, PlanePoint};

/// Plant and controller values at one frequency.
#[derive(Debug, Clone, Copy)]
pub struct FreqPoint {
    pub omega: f64,
    pub plant: PlanePoint,
    pub controller: PlanePoint,
}

impl FreqPoint {
    pub fn new(omega: f64, plant: PlanePoint, controller: PlanePoint) -> Result<Self> {
        if !(omega.is_finite() && plant.is_finite() && controller.is_finite()) {
            return Err(Error::NonFinite("frequency point"));
        }
        Ok(Self {
            omega,
            plant,
            controller,
        })
    }

    fn loop_denominator(&self) -> Complex64 {
        Complex64::new(1.0, 0.0) - self.controller.as_complex() * self.plant.as_complex()
    }
}

/// 2x2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2C {
    pub m: [[Complex64; 2]; 2],
}

/// The gang-of-four matrix `[P; 1] (1 - C P)^(-1) [-C, 1]`.
///
/// Rank one by construction: it is an outer product scaled by the loop
/// denominator.
pub fn gang_of_four(fp: &FreqPoint) -> Result<Matrix2C> {
    let den = fp.loop_denominator();
    if den.norm() <= 1e-12 {
        return Err(Error::SingularInterconnection {
            modulus: den.norm(),
        });
    }
    let p = fp.plant.as_complex();
    let c = fp.controller.as_complex();
    let inv = Complex64::new(1.0, 0.0) / den;
    Ok(Matrix2C {
        m: [[-p * c * inv, p * inv], [-c * inv, inv]],
    })
}

/// Largest singular value of a 2x2 complex matrix, from the eigenvalues of
/// `M^H M` via the quadratic formula with a hypot-stabilized discriminant.
pub fn sigma_max_2x2(m: &Matrix2C) -> f64 {
    let col1_sq = m.m[0][0].norm_sqr() + m.m[1][0].norm_sqr();
    let col2_sq = m.m[0][1].norm_sqr() + m.m[1][1].norm_sqr();
    let cross = m.m[0][0].conj() * m.m[0][1] + m.m[1][0].conj() * m.m[1][1];
    let disc = (col1_sq - col2_sq).hypot(2.0 * cross.norm());
    (0.5 * (col1_sq + col2_sq + disc)).max(0.0).sqrt()
}

/// Smallest singular value; used to verify the rank-one structure.
pub fn sigma_min_2x2(m: &Matrix2C) -> f64 {
    let det = (m.m[0][0] * m.m[1][1] - m.m[0][1] * m.m[1][0]).norm();
    let smax = sigma_max_2x2(m);
    if smax == 0.0 {
        0.0
    } else {
        det / smax
    }
}

/// Pointwise margin `rho = 1 / sigma_max(H)`.
pub fn rho(fp: &FreqPoint) -> Result<f64> {
    Ok(1.0 / sigma_max_2x2(&gang_of_four(fp)?))
}

/// `rho` with the singular interconnection reported as zero margin.
pub fn rho_or_zero(fp: &FreqPoint) -> f64 {
    match rho(fp) {
        Ok(v) => v,
        Err(_) => 0.0,
    }
}

/// Rank-one closed form `|1 - C P| / sqrt((1 + |P|^2)(1 + |C|^2))`.
///
/// Agrees with the singular-value route to machine precision; kept for
/// cross-checking and as the cheap path in sampling loops.
pub fn rho_closed_form(fp: &FreqPoint) -> f64 {
    let num = fp.loop_denominator().norm();
    let den = (1.0 + fp.plant.modulus_sq()).sqrt() * (1.0 + fp.controller.modulus_sq()).sqrt();
    num / den
}

/// Slack in the degradation inequality:
/// `rho(P, C) - [rho(Pbar, C) - kappa(P, Pbar)]`, nonnegative up to rounding.
pub fn degradation_gap(fp_perturbed: &FreqPoint, nominal_plant: PlanePoint) -> f64 {
    let nominal = FreqPoint {
        omega: fp_perturbed.omega,
        plant: nominal_plant,
        controller: fp_perturbed.controller,
    };
    let kappa = chordal_distance(fp_perturbed.plant, nominal_plant);
    rho_or_zero(fp_perturbed) - (rho_or_zero(&nominal) - kappa)
}

/// Roots of a real polynomial in ascending coefficients, via the companion
/// matrix. Returns `None` for (near-)zero polynomials.
fn polynomial_roots(coeffs: &[f64]) -> Result<Option<Vec<Complex64>>> {
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if scale == 0.0 {
        return Ok(None);
    }
    let mut c: Vec<f64> = coeffs.to_vec();
    while c.len() > 1 && c.last().unwrap().abs() <= 1e-14 * scale {
        c.pop();
    }
    let n = c.len() - 1;
    if n == 0 {
        return Ok(Some(Vec::new()));
    }
    let lead = c[n];
    let mut companion = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        companion[(i, n - 1)] = -c[i] / lead;
    }
    let schur =
        nalgebra::linalg::Schur::try_new(companion, 1e-14, 20_000).ok_or(Error::EigenFailure)?;
    let eigs = schur.complex_eigenvalues();
    Ok(Some(
        eigs.iter().map(|e| Complex64::new(e.re, e.im)).collect(),
    ))
}

/// Grid approximation of the stability margin `b = ||H||_inf^(-1)`.
///
/// Internal stability is decided from the roots of the closed-loop
/// characteristic polynomial `den_P den_C - num_P num_C` formed without
/// cancellations; an unstable (or singular) loop returns zero. The infinity
/// norm is approximated from above by the grid minimum of `rho`, so
/// refining the grid can only lower the result.
pub fn b_margin_grid(plant: &RationalTF, controller: &RationalTF, grid: &[f64]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty frequency grid".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "frequency grid must be strictly ascending".into(),
        ));
    }
    let char_poly = {
        let pd = conv(plant.den(), controller.den());
        let pn = conv(plant.num(), controller.num());
        let len = pd.len().max(pn.len());
        let mut c = vec![0.0; len];
        for (i, v) in pd.iter().enumerate() {
            c[i] += v;
        }
        for (i, v) in pn.iter().enumerate() {
            c[i] -= v;
        }
        c
    };
    match polynomial_roots(&char_poly)? {
        None => Ok(0.0), // identically singular loop
        Some(roots) => {
            if roots.iter().any(|r| r.re >= -1e-9) {
                return Ok(0.0);
            }
            let mut min_rho = 1.0f64;
            for &omega in grid {
                let fp = FreqPoint::new(
                    omega,
                    eval_freq(plant, omega)?,
                    eval_freq(controller, omega)?,
                )?;
                min_rho = min_rho.min(rho_or_zero(&fp));
            }
            Ok(min_rho)
        }
    }
}

fn conv(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lti::linear_space;
    use crate::rng::CounterRng;

    fn fp(p: (f64, f64), c: (f64, f64)) -> FreqPoint {
        FreqPoint::new(1.0, PlanePoint::new(p.0, p.1), PlanePoint::new(c.0, c.1)).unwrap()
    }

    #[test]
    fn gang_of_four_direct_substitution() {
        let h = gang_of_four(&fp((0.0, 0.0), (0.0, 0.0))).unwrap();
        let expect = [[0.0, 0.0], [0.0, 1.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((h.m[i][j].re - expect[i][j]).abs() < 1e-15);
                assert!(h.m[i][j].im.abs() < 1e-15);
            }
        }

        let h = gang_of_four(&fp((1.0, 0.0), (0.0, 0.0))).unwrap();
        let expect = [[0.0, 1.0], [0.0, 1.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((h.m[i][j].re - expect[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn gang_of_four_is_rank_one() {
        for i in 0..10_000u64 {
            let mut rng = CounterRng::new(0x60F4, i);
            let point = fp(
                ((rng.uniform() - 0.5) * 6.0, (rng.uniform() - 0.5) * 6.0),
                ((rng.uniform() - 0.5) * 6.0, (rng.uniform() - 0.5) * 6.0),
            );
            match gang_of_four(&point) {
                Ok(h) => {
                    let smax = sigma_max_2x2(&h);
                    assert!(
                        sigma_min_2x2(&h) < 1e-10 * smax,
                        "rank-1 violated at {point:?}"
                    );
                }
                Err(Error::SingularInterconnection { .. }) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn sigma_examples() {
        let eye = Matrix2C {
            m: [
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            ],
        };
        assert!((sigma_max_2x2(&eye) - 1.0).abs() < 1e-15);

        let diag = Matrix2C {
            m: [
                [Complex64::new(3.0, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(-4.0, 0.0)],
            ],
        };
        assert!((sigma_max_2x2(&diag) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn sigma_matches_power_iteration() {
        for i in 0..2_000u64 {
            let mut rng = CounterRng::new(0x516, i);
            let mut draw = || Complex64::new(rng.uniform() * 4.0 - 2.0, rng.uniform() * 4.0 - 2.0);
            let m = Matrix2C {
                m: [[draw(), draw()], [draw(), draw()]],
            };
            // Power iteration on M^H M.
            let mut v = [Complex64::new(1.0, 0.3), Complex64::new(0.7, -0.2)];
            let mut lambda = 0.0f64;
            for _ in 0..500 {
                let w = [
                    m.m[0][0] * v[0] + m.m[0][1] * v[1],
                    m.m[1][0] * v[0] + m.m[1][1] * v[1],
                ];
                let u = [
                    m.m[0][0].conj() * w[0] + m.m[1][0].conj() * w[1],
                    m.m[0][1].conj() * w[0] + m.m[1][1].conj() * w[1],
                ];
                let norm = (u[0].norm_sqr() + u[1].norm_sqr()).sqrt();
                if norm == 0.0 {
                    break;
                }
                lambda = norm;
                v = [u[0] / norm, u[1] / norm];
            }
            assert!(
                (sigma_max_2x2(&m) - lambda.sqrt()).abs() < 1e-12 * lambda.sqrt().max(1.0),
                "sigma mismatch"
            );
        }
    }

    #[test]
    fn rho_examples() {
        assert!((rho(&fp((0.0, 0.0), (0.0, 0.0))).unwrap() - 1.0).abs() < 1e-15);
        // 1 - CP = 0: singular, reported as zero margin.
        assert!(matches!(
            rho(&fp((1.0, 0.0), (1.0, 0.0))),
            Err(Error::SingularInterconnection { .. })
        ));
        assert_eq!(rho_or_zero(&fp((1.0, 0.0), (1.0, 0.0))), 0.0);
    }

    #[test]
    fn rho_closed_form_matches_svd_route() {
        for i in 0..10_000u64 {
            let mut rng = CounterRng::new(0xF00D, i);
            let point = fp(
                ((rng.uniform() - 0.5) * 8.0, (rng.uniform() - 0.5) * 8.0),
                ((rng.uniform() - 0.5) * 8.0, (rng.uniform() - 0.5) * 8.0),
            );
            let closed = rho_closed_form(&point);
            match rho(&point) {
                Ok(svd) => {
                    assert!((svd - closed).abs() < 1e-10, "{svd} vs {closed}");
                    assert!((0.0..=1.0 + 1e-12).contains(&svd));
                }
                Err(_) => assert!(closed < 1e-11),
            }
        }
    }

    #[test]
    fn degradation_gap_identity_case() {
        let nominal = PlanePoint::new(0.4, -1.2);
        let point = FreqPoint::new(2.0, nominal, PlanePoint::new(0.3, 0.8)).unwrap();
        assert_eq!(degradation_gap(&point, nominal), 0.0);
    }

    #[test]
    fn degradation_inequality_holds_randomly() {
        for i in 0..10_000u64 {
            let mut rng = CounterRng::new(0xE93, i);
            let perturbed = fp(
                ((rng.uniform() - 0.5) * 10.0, (rng.uniform() - 0.5) * 10.0),
                ((rng.uniform() - 0.5) * 10.0, (rng.uniform() - 0.5) * 10.0),
            );
            let nominal =
                PlanePoint::new((rng.uniform() - 0.5) * 10.0, (rng.uniform() - 0.5) * 10.0);
            let gap = degradation_gap(&perturbed, nominal);
            assert!(gap >= -1e-9, "gap {gap} at {perturbed:?} vs {nominal:?}");
        }
    }

    #[test]
    fn degradation_inequality_adversarial_controller() {
        // Controller near 1/Pbar makes the nominal loop nearly singular.
        for i in 0..2_000u64 {
            let mut rng = CounterRng::new(0xAD5, i);
            let nominal = PlanePoint::new(0.5 + rng.uniform(), 0.5 + rng.uniform());
            let inv = Complex64::new(1.0, 0.0) / nominal.as_complex();
            let eps = 1e-7 * (rng.uniform() - 0.5);
            let controller = PlanePoint::new(inv.re + eps, inv.im - eps);
            let perturbed = FreqPoint::new(
                1.0,
                PlanePoint::new(
                    nominal.re + (rng.uniform() - 0.5) * 0.4,
                    nominal.im + (rng.uniform() - 0.5) * 0.4,
                ),
                controller,
            )
            .unwrap();
            let gap = degradation_gap(&perturbed, nominal);
            assert!(gap >= -1e-9, "gap {gap}");
        }
    }

    #[test]
    fn b_margin_trivial_cases() {
        let zero = RationalTF::new(vec![0.0], vec![1.0]).unwrap();
        let grid = linear_space(0.1, 10.0, 50);
        let b = b_margin_grid(&zero, &zero, &grid).unwrap();
        assert!((b - 1.0).abs() < 1e-15);

        // Unstable plant with no feedback: margin zero.
        let unstable = RationalTF::new(vec![1.0], vec![-1.0, 1.0]).unwrap();
        let b = b_margin_grid(&unstable, &zero, &grid).unwrap();
        assert_eq!(b, 0.0);

        // Identically singular interconnection.
        let one = RationalTF::new(vec![1.0], vec![1.0]).unwrap();
        let b = b_margin_grid(&one, &one, &grid).unwrap();
        assert_eq!(b, 0.0);
    }

    #[test]
    fn b_margin_grid_refinement() {
        let plant = RationalTF::three_pole(2.0, 0.1).unwrap();
        // Unity negative feedback: in the (1 - C P) convention of the
        // gang-of-four matrix the stabilizing unity loop is C = -1
        // (C = +1 makes 1 - C P vanish at a real frequency and b = 0).
        let unity_nfb = RationalTF::new(vec![-1.0], vec![1.0]).unwrap();
        let coarse = crate::lti::log_space(1e-2, 1e4, 2000).unwrap();
        let fine = crate::lti::log_space(1e-2, 1e4, 20_000).unwrap();
        let b1 = b_margin_grid(&plant, &unity_nfb, &coarse).unwrap();
        let b2 = b_margin_grid(&plant, &unity_nfb, &fine).unwrap();
        assert!(b2 <= b1 + 1e-15, "refinement raised the margin");
        assert!((b1 - b2).abs() < 1e-4, "grid not converged: {b1} vs {b2}");
        assert!(b1 > 0.0 && b1 < 1.0);

        // Positive unity feedback destabilizes this plant: Eq-style zero.
        let unity_pfb = RationalTF::new(vec![1.0], vec![1.0]).unwrap();
        assert_eq!(b_margin_grid(&plant, &unity_pfb, &coarse).unwrap(), 0.0);
    }
}
