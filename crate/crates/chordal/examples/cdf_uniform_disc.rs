//! Analytically checkable CDF: uniform plant value on a disc around the
//! origin, nominal at the origin. The chordal ball of radius d is then the
//! centered disc of radius d / sqrt(1 - d^2), so F(d) is an area ratio.
//!
//! ```bash
//! cargo run --release --example cdf_uniform_disc
//! ```

use chordal::cdf::{cdf_ball, CdfQuery};
use chordal::{DensityModel, PlanePoint, QuadratureSpec};

fn main() {
    let support_radius = 2.0;
    let model = DensityModel::uniform_disc(PlanePoint::ZERO, support_radius).unwrap();
    let spec = QuadratureSpec::default();

    println!("uniform disc radius {support_radius}, nominal at the origin");
    println!(
        "{:>6} {:>14} {:>14} {:>10}",
        "d", "F computed", "F analytic", "error"
    );
    for i in 1..10 {
        let d = i as f64 / 10.0;
        let q = CdfQuery::new(&model, PlanePoint::ZERO, d).unwrap();
        let f = cdf_ball(&q, &spec).unwrap().value;
        let ball_radius = d / (1.0 - d * d).sqrt();
        let analytic = (ball_radius / support_radius).powi(2).min(1.0);
        println!(
            "{d:>6.2} {f:>14.9} {analytic:>14.9} {:>10.2e}",
            (f - analytic).abs()
        );
        assert!((f - analytic).abs() < 1e-6);
    }

    // The quarter-mass point: at d = 1/sqrt(2) the ball radius is exactly 1.
    let d = std::f64::consts::FRAC_1_SQRT_2;
    let q = CdfQuery::new(&model, PlanePoint::ZERO, d).unwrap();
    let f = cdf_ball(&q, &spec).unwrap().value;
    println!("\nF(1/sqrt(2)) = {f:.9} (analytic 0.25)");
}
