//! CDF of the chordal distance for a Gaussian plant value centered on the
//! nominal point, by both quadrature routes and Monte Carlo.
//!
//! ```bash
//! cargo run --release --example cdf_gaussian
//! ```

use chordal::cdf::{cdf_ball, cdf_double_integral, CdfQuery};
use chordal::montecarlo::{dkw_band, sample_kappa};
use chordal::{Cov2, DensityModel, PlanePoint, QuadratureSpec};

fn main() {
    let nominal = PlanePoint::new(1.0, 1.0);
    let model = DensityModel::gaussian(nominal, Cov2::diagonal(1.0, 0.25).unwrap()).unwrap();
    let spec = QuadratureSpec::default();

    let n = 1_000_000;
    let emp = sample_kappa(&model, nominal, n, 42).unwrap();
    let band = dkw_band(n, 0.01).unwrap();
    println!("Monte-Carlo oracle: n = {n}, DKW(0.01) band = {band:.6}\n");

    println!(
        "{:>5} {:>14} {:>14} {:>14} {:>11}",
        "d", "F double-int", "F ball", "F empirical", "max |diff|"
    );
    let mut worst: f64 = 0.0;
    for i in 0..=10 {
        let d = i as f64 / 10.0;
        let q = CdfQuery::new(&model, nominal, d).unwrap();
        let f1 = cdf_double_integral(&q, &spec).unwrap().value;
        let f2 = cdf_ball(&q, &spec).unwrap().value;
        let fe = emp.value_at(d);
        let spread = (f1 - fe).abs().max((f2 - fe).abs()).max((f1 - f2).abs());
        worst = worst.max(spread);
        println!("{d:>5.2} {f1:>14.8} {f2:>14.8} {fe:>14.8} {spread:>11.2e}");
    }
    println!("\nworst disagreement across routes: {worst:.2e} (band {band:.2e})");
}
