//! Validate a quadrature CDF curve against the sampling oracle with a
//! distribution-free DKW acceptance band.
//!
//! ```bash
//! cargo run --release --example mc_validation
//! ```

use chordal::cdf::{cdf_curve, linear_grid, CdfMethod};
use chordal::montecarlo::{compare, sample_kappa};
use chordal::{Cov2, DensityModel, PlanePoint, QuadratureSpec};

fn main() {
    let nominal = PlanePoint::new(0.8, -0.6);
    let model = DensityModel::truncated_gaussian(
        PlanePoint::new(1.0, -0.5),
        Cov2::new(0.5, 0.1, 0.3).unwrap(),
        6.0,
    )
    .unwrap();
    let spec = QuadratureSpec::default();
    let grid = linear_grid(0.0, 1.0, 21);

    let curve = cdf_curve(&model, nominal, &grid, CdfMethod::Ball, &spec).unwrap();
    let n = 1_000_000;
    let emp = sample_kappa(&model, nominal, n, 99).unwrap();
    let report = compare(&curve, &emp, 0.01).unwrap();

    println!("n = {n}, DKW band = {:.6}", report.dkw);
    println!(
        "{:>5} {:>12} {:>12} {:>10} {:>8}",
        "d", "quadrature", "empirical", "dev", "ok"
    );
    for c in report.checks.iter().step_by(2) {
        println!(
            "{:>5.2} {:>12.7} {:>12.7} {:>10.2e} {:>8}",
            c.d, c.quadrature, c.empirical, c.deviation, c.pass
        );
    }
    println!(
        "\noverall: {} (max deviation {:.2e})",
        if report.pass { "PASS" } else { "FAIL" },
        report.max_deviation
    );

    // Sensitivity: a corrupted curve must fail.
    let mut shifted = curve.clone();
    for v in &mut shifted.values {
        *v = (*v + 0.05).min(1.0);
    }
    let bad = compare(&shifted, &emp, 0.01).unwrap();
    println!(
        "shifted curve detected as: {}",
        if bad.pass { "PASS (!)" } else { "FAIL" }
    );
}
