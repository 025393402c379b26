//! A compact run of the repeated-identification study: excite the
//! three-pole plant with binary sequences, add measurement noise, refit the
//! model, and look at the spread of the chordal distance to the truth.
//!
//! ```bash
//! cargo run --release --example sysid_study
//! ```

use chordal::sysid::{freq_uncertainty, median_surrogate, run_trials, TrialConfig};

fn main() {
    let config = TrialConfig {
        trials: 50,
        base_seed: 7,
        ..TrialConfig::default()
    };
    println!(
        "true plant: b = {}, tau = {}; {} trials, noise sigma {}, {} samples at Ts = {}",
        config.true_b,
        config.true_tau,
        config.trials,
        config.noise_sigma,
        config.record_length,
        config.sample_time
    );

    let ensemble = run_trials(&config).unwrap();
    println!(
        "converged: {} / {}",
        config.trials - ensemble.failed,
        config.trials
    );

    let (mut b_lo, mut b_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut t_lo, mut t_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for fit in ensemble.fits.iter().filter(|f| f.converged) {
        b_lo = b_lo.min(fit.b_hat);
        b_hi = b_hi.max(fit.b_hat);
        t_lo = t_lo.min(fit.tau_hat);
        t_hi = t_hi.max(fit.tau_hat);
    }
    println!("b_hat range   [{b_lo:.5}, {b_hi:.5}]");
    println!("tau_hat range [{t_lo:.6}, {t_hi:.6}]");
    println!(
        "median gap surrogate (max kappa over a dense grid): {:.6}",
        median_surrogate(&ensemble)
    );

    // Worst-case kappa per frequency across the ensemble.
    println!("\n{:>8} {:>12} {:>12}", "omega", "max kappa", "mean kappa");
    for (i, &omega) in ensemble.freq_grid.iter().enumerate().step_by(4) {
        let column: Vec<f64> = ensemble
            .kappa
            .iter()
            .filter(|row| !row.is_empty())
            .map(|row| row[i])
            .collect();
        let max = column.iter().fold(0.0f64, |m, v| m.max(*v));
        let mean = column.iter().sum::<f64>() / column.len() as f64;
        println!("{omega:>8.1} {max:>12.6} {mean:>12.6}");
    }

    // The delta-method ellipse of the first fit at one frequency.
    let reference = ensemble.fits.iter().find(|f| f.converged).unwrap();
    let omega = 15.0;
    let (mean, cov, _) = freq_uncertainty(reference, omega).unwrap();
    println!(
        "\nreference fit at omega = {omega}: P = {:+.4}{:+.4}i, response covariance [[{:.2e}, {:.2e}], [{:.2e}, {:.2e}]]",
        mean.re, mean.im, cov.xx, cov.xy, cov.xy, cov.yy
    );
}
