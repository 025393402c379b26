//! SISO rational transfer functions: frequency response, exact zero-order-
//! hold discretization, and time-domain simulation.
//!
//! Coefficients are stored in ascending powers of `s`. Discretization goes
//! through the controllable canonical realization and the augmented matrix
//! exponential, which is exact for piecewise-constant inputs — the
//! identification study feeds binary excitation, so no integrator tolerance
//! enters the simulated data.

use nalgebra::{Complex, DMatrix, DVector, RowDVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::riemann::PlanePoint;
use crate::rng::CounterRng;

/// Proper real-rational transfer function, coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalTF {
    num: Vec<f64>,
    den: Vec<f64>,
}

fn trim_high_order_zeros(mut coeffs: Vec<f64>) -> Vec<f64> {
    while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
        coeffs.pop();
    }
    coeffs
}

impl RationalTF {
    pub fn new(num: Vec<f64>, den: Vec<f64>) -> Result<Self> {
        if num.iter().chain(den.iter()).any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("transfer function coefficients"));
        }
        let num = trim_high_order_zeros(if num.is_empty() { vec![0.0] } else { num });
        let den = trim_high_order_zeros(den);
        if den.is_empty() || *den.last().unwrap() == 0.0 {
            return Err(Error::InvalidParameter(
                "denominator must have a nonzero leading coefficient".into(),
            ));
        }
        if num.len() > den.len() && num.iter().skip(den.len()).any(|c| *c != 0.0) {
            return Err(Error::InvalidParameter(
                "improper transfer function: numerator degree exceeds denominator".into(),
            ));
        }
        Ok(Self { num, den })
    }

    /// The three-pole lag `b / (1 + tau s)^3`.
    pub fn three_pole(b: f64, tau: f64) -> Result<Self> {
        if tau <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "three-pole time constant must be positive, got {tau}"
            )));
        }
        Self::new(
            vec![b],
            vec![1.0, 3.0 * tau, 3.0 * tau * tau, tau * tau * tau],
        )
    }

    pub fn num(&self) -> &[f64] {
        &self.num
    }

    pub fn den(&self) -> &[f64] {
        &self.den
    }

    pub fn order(&self) -> usize {
        self.den.len() - 1
    }
}

fn polyval(coeffs: &[f64], s: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * s + c;
    }
    acc
}

/// Frequency response value `P(jw)` as a Nyquist-plane point.
pub fn eval_freq(tf: &RationalTF, omega: f64) -> Result<PlanePoint> {
    if !omega.is_finite() {
        return Err(Error::NonFinite("frequency"));
    }
    let s = Complex64::new(0.0, omega);
    let den = polyval(&tf.den, s);
    if den.norm() < 1e-300 {
        return Err(Error::InvalidParameter(format!(
            "pole on the imaginary axis at omega = {omega}"
        )));
    }
    Ok(PlanePoint::from(polyval(&tf.num, s) / den))
}

/// Discrete state-space model produced by zero-order-hold discretization.
#[derive(Debug, Clone)]
pub struct DiscreteSim {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: RowDVector<f64>,
    pub d: f64,
    pub ts: f64,
}

impl DiscreteSim {
    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }
}

/// Exact zero-order-hold discretization via the augmented matrix exponential.
pub fn zoh_discretize(tf: &RationalTF, ts: f64) -> Result<DiscreteSim> {
    if !(ts > 0.0 && ts.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "sample time must be positive, got {ts}"
        )));
    }
    let n = tf.order();
    let lead = *tf.den.last().unwrap();
    let monic_den: Vec<f64> = tf.den.iter().map(|c| c / lead).collect();
    let mut scaled_num: Vec<f64> = tf.num.iter().map(|c| c / lead).collect();
    scaled_num.resize(n + 1, 0.0);
    // Biproper part becomes the feedthrough.
    let d = scaled_num[n];
    let c_coeffs: Vec<f64> = (0..n).map(|i| scaled_num[i] - d * monic_den[i]).collect();

    if n == 0 {
        return Ok(DiscreteSim {
            a: DMatrix::zeros(0, 0),
            b: DVector::zeros(0),
            c: RowDVector::zeros(0),
            d,
            ts,
        });
    }

    // Controllable canonical realization, then exp([A B; 0 0] Ts).
    let mut aug = DMatrix::<f64>::zeros(n + 1, n + 1);
    for i in 0..n - 1 {
        aug[(i, i + 1)] = 1.0;
    }
    for j in 0..n {
        aug[(n - 1, j)] = -monic_den[j];
    }
    aug[(n - 1, n)] = 1.0;
    let exp = (aug * ts).exp();

    let a = exp.view((0, 0), (n, n)).into_owned();
    let b = exp.view((0, n), (n, 1)).column(0).into_owned();
    let c = RowDVector::from_row_slice(&c_coeffs);
    Ok(DiscreteSim { a, b, c, d, ts })
}

/// Linear recursion from zero initial state; output length equals input length.
pub fn simulate(sim: &DiscreteSim, input: &[f64]) -> Vec<f64> {
    let n = sim.state_dim();
    let mut x = DVector::<f64>::zeros(n);
    let mut out = Vec::with_capacity(input.len());
    for &u in input {
        let y = if n == 0 { 0.0 } else { (&sim.c * &x)[0] };
        out.push(y + sim.d * u);
        if n > 0 {
            x = &sim.a * x + &sim.b * u;
        }
    }
    out
}

/// Frequency response of the discrete model at `omega` rad/s,
/// `C (zI - A)^{-1} B + D` with `z = exp(j omega Ts)`.
pub fn discrete_freq_response(sim: &DiscreteSim, omega: f64) -> Result<Complex64> {
    let n = sim.state_dim();
    let z = Complex64::from_polar(1.0, omega * sim.ts);
    if n == 0 {
        return Ok(Complex64::new(sim.d, 0.0));
    }
    let mut m = DMatrix::<Complex<f64>>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = Complex::new(-sim.a[(i, j)], 0.0);
        }
        m[(i, i)] += z;
    }
    let rhs =
        DVector::<Complex<f64>>::from_iterator(n, sim.b.iter().map(|&v| Complex::new(v, 0.0)));
    let x = m.lu().solve(&rhs).ok_or(Error::EigenFailure)?;
    let mut acc = Complex64::new(sim.d, 0.0);
    for i in 0..n {
        acc += Complex64::new(sim.c[i], 0.0) * Complex64::new(x[i].re, x[i].im);
    }
    Ok(acc)
}

/// Pseudo-random binary sequence with values `+-amplitude`, equiprobable and
/// independent per index, deterministic per seed.
pub fn prbs(seed: u64, length: usize, amplitude: f64) -> Vec<f64> {
    (0..length as u64)
        .map(|i| CounterRng::new(seed, i).sign() * amplitude)
        .collect()
}

/// Ascending linear grid including both endpoints.
pub fn linear_space(min: f64, max: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![min];
    }
    let step = (max - min) / (count - 1) as f64;
    (0..count).map(|i| min + step * i as f64).collect()
}

/// Ascending logarithmic grid including both endpoints; requires `min > 0`.
pub fn log_space(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
    if min <= 0.0 || max <= min {
        return Err(Error::InvalidParameter(format!(
            "log grid needs 0 < min < max, got [{min}, {max}]"
        )));
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    let (l0, l1) = (min.ln(), max.ln());
    let step = (l1 - l0) / (count - 1) as f64;
    Ok((0..count).map(|i| (l0 + step * i as f64).exp()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nominal_plant() -> RationalTF {
        RationalTF::three_pole(2.0, 0.1).unwrap()
    }

    #[test]
    fn construction_rules() {
        assert!(RationalTF::new(vec![1.0, 2.0], vec![1.0]).is_err()); // improper
        assert!(RationalTF::new(vec![1.0], vec![0.0]).is_err());
        assert!(RationalTF::new(vec![1.0], vec![1.0, f64::NAN]).is_err());
        // Trailing high-order zeros trim away.
        let tf = RationalTF::new(vec![1.0, 0.0], vec![1.0, 1.0, 0.0]).unwrap();
        assert_eq!(tf.num(), &[1.0]);
        assert_eq!(tf.den(), &[1.0, 1.0]);
    }

    #[test]
    fn dc_gain_of_three_pole() {
        let p = eval_freq(&nominal_plant(), 0.0).unwrap();
        assert!((p.re - 2.0).abs() < 1e-15 && p.im == 0.0);
    }

    #[test]
    fn rolloff_at_high_frequency() {
        let p = eval_freq(&nominal_plant(), 1e9).unwrap();
        assert!(p.modulus() < 1e-20, "|P| = {}", p.modulus());
    }

    #[test]
    fn phase_crossover_point() {
        // At omega = sqrt(3)/tau the response is exactly -b/8.
        let omega = 3.0f64.sqrt() / 0.1;
        let p = eval_freq(&nominal_plant(), omega).unwrap();
        assert!((p.re + 0.25).abs() < 1e-12, "re {}", p.re);
        assert!(p.im.abs() < 1e-12, "im {}", p.im);
    }

    #[test]
    fn conjugate_symmetry() {
        let tf = RationalTF::new(vec![0.3, 1.0], vec![2.0, 0.5, 1.0]).unwrap();
        for i in 0..200 {
            let omega = -50.0 + i as f64 * 0.5;
            let p = eval_freq(&tf, omega).unwrap();
            let m = eval_freq(&tf, -omega).unwrap();
            assert!((p.re - m.re).abs() < 1e-12 && (p.im + m.im).abs() < 1e-12);
        }
    }

    #[test]
    fn first_order_pole_maps_exactly() {
        let tf = RationalTF::new(vec![1.0], vec![1.0, 1.0]).unwrap();
        let sim = zoh_discretize(&tf, 0.1).unwrap();
        assert_eq!(sim.state_dim(), 1);
        assert!((sim.a[(0, 0)] - (-0.1f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn zoh_rejects_bad_sample_time() {
        let tf = RationalTF::new(vec![1.0], vec![1.0, 1.0]).unwrap();
        assert!(zoh_discretize(&tf, 0.0).is_err());
        assert!(zoh_discretize(&tf, -0.1).is_err());
        assert!(zoh_discretize(&tf, f64::NAN).is_err());
    }

    #[test]
    fn triple_pole_discretizes_to_triple_discrete_pole() {
        let ts = 0.01;
        let tau = 0.1;
        let sim = zoh_discretize(&nominal_plant(), ts).unwrap();
        let pole = (-ts / tau).exp();
        // Repeated eigenvalues are ill-conditioned individually, so check the
        // well-conditioned symmetric functions tightly and each root loosely.
        let trace: f64 = (0..3).map(|i| sim.a[(i, i)]).sum();
        assert!((trace - 3.0 * pole).abs() < 1e-12, "trace {trace}");
        let det = sim.a.determinant();
        assert!((det - pole.powi(3)).abs() < 1e-12, "det {det}");
        let eigs = sim.a.complex_eigenvalues();
        for e in eigs.iter() {
            assert!((e.re - pole).abs() < 1e-4 && e.im.abs() < 1e-4);
        }
    }

    #[test]
    fn dc_gain_preserved() {
        for (tf, ts) in [
            (nominal_plant(), 0.01),
            (
                RationalTF::new(vec![0.5, 1.0], vec![1.0, 2.0, 1.0]).unwrap(),
                0.05,
            ),
            (
                RationalTF::new(vec![1.0, 1.0], vec![2.0, 1.0]).unwrap(),
                0.2,
            ), // biproper
        ] {
            let sim = zoh_discretize(&tf, ts).unwrap();
            let n = sim.state_dim();
            let eye = DMatrix::<f64>::identity(n, n);
            let gain = if n == 0 {
                sim.d
            } else {
                ((&sim.c * (eye - &sim.a).lu().solve(&sim.b).unwrap())[0]) + sim.d
            };
            let expect = tf.num()[0] / tf.den()[0];
            assert!((gain - expect).abs() < 1e-10, "gain {gain} vs {expect}");
        }
    }

    #[test]
    fn step_response_matches_analytic_triple_pole() {
        let b = 2.0;
        let tau = 0.1;
        let ts = 0.01;
        let sim = zoh_discretize(&RationalTF::three_pole(b, tau).unwrap(), ts).unwrap();
        let steps = 300;
        let y = simulate(&sim, &vec![1.0; steps]);
        for (k, yk) in y.iter().enumerate() {
            let t = k as f64 * ts;
            let e = (-t / tau).exp();
            let analytic = b * (1.0 - e * (1.0 + t / tau + t * t / (2.0 * tau * tau)));
            assert!((yk - analytic).abs() < 1e-8, "k {k}: {yk} vs {analytic}");
        }
    }

    #[test]
    fn simulate_is_linear_and_time_invariant() {
        let sim = zoh_discretize(&nominal_plant(), 0.02).unwrap();
        let u1 = prbs(1, 400, 1.0);
        let u2 = prbs(2, 400, 0.7);
        let y_zero = simulate(&sim, &vec![0.0; 400]);
        assert!(y_zero.iter().all(|&y| y == 0.0));

        let y1 = simulate(&sim, &u1);
        let y2 = simulate(&sim, &u2);
        let combined: Vec<f64> = u1.iter().zip(&u2).map(|(a, b)| a + b).collect();
        let y12 = simulate(&sim, &combined);
        for i in 0..400 {
            assert!((y12[i] - y1[i] - y2[i]).abs() < 1e-10);
        }

        // Shifting the input shifts the output (zero initial state).
        let shift = 7;
        let mut shifted = vec![0.0; shift];
        shifted.extend_from_slice(&u1[..400 - shift]);
        let ys = simulate(&sim, &shifted);
        for i in shift..400 {
            assert!((ys[i] - y1[i - shift]).abs() < 1e-10);
        }
    }

    #[test]
    fn impulse_response_equals_markov_parameters() {
        let sim = zoh_discretize(&nominal_plant(), 0.05).unwrap();
        let mut impulse = vec![0.0; 20];
        impulse[0] = 1.0;
        let y = simulate(&sim, &impulse);
        // Markov parameters: d, c b, c A b, c A^2 b, ...
        assert!((y[0] - sim.d).abs() < 1e-14);
        let mut v = sim.b.clone();
        for yk in y.iter().skip(1) {
            let expect = (&sim.c * &v)[0];
            assert!((yk - expect).abs() < 1e-12);
            v = &sim.a * v;
        }
    }

    #[test]
    fn zoh_frequency_response_second_order_accurate() {
        // With the half-sample delay compensated, the discrete response
        // converges to the continuous one at O(Ts^2).
        let tf = nominal_plant();
        let omega = 3.0;
        let err = |ts: f64| -> f64 {
            let sim = zoh_discretize(&tf, ts).unwrap();
            let hd = discrete_freq_response(&sim, omega).unwrap();
            let shift = Complex64::from_polar(1.0, omega * ts / 2.0);
            let p = eval_freq(&tf, omega).unwrap().as_complex();
            (hd * shift - p).norm()
        };
        let e1 = err(0.01);
        let e2 = err(0.005);
        let ratio = e1 / e2;
        assert!(
            (3.3..4.7).contains(&ratio),
            "convergence ratio {ratio} (errors {e1}, {e2})"
        );
    }

    #[test]
    fn prbs_contract() {
        let a = prbs(42, 1000, 1.5);
        let b = prbs(42, 1000, 1.5);
        assert_eq!(a, b);
        assert!(a.iter().all(|&v| v == 1.5 || v == -1.5));

        let n = 1_000_000;
        let seq = prbs(7, n, 1.0);
        let plus = seq.iter().filter(|&&v| v > 0.0).count() as f64;
        let bound = 3.0 * (n as f64).sqrt() / 2.0;
        assert!((plus - n as f64 / 2.0).abs() < bound, "imbalance {plus}");
    }

    #[test]
    fn grids() {
        let lin = linear_space(0.0, 1.0, 5);
        assert_eq!(lin, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let log = log_space(1e-2, 1e2, 5).unwrap();
        assert!((log[2] - 1.0).abs() < 1e-12);
        assert!(log_space(0.0, 1.0, 5).is_err());
    }
}
