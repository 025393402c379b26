//! The pointwise degradation inequality
//! `rho(P, C) >= rho(Pbar, C) - kappa(P, Pbar)` over random perturbations,
//! plus the grid stability margin of the three-pole loop.
//!
//! ```bash
//! cargo run --release --example degradation_margin
//! ```

use chordal::lti::{eval_freq, log_space, RationalTF};
use chordal::margins::{b_margin_grid, degradation_gap, rho_or_zero, FreqPoint};
use chordal::riemann::chordal_distance;
use chordal::rng::CounterRng;
use chordal::PlanePoint;

fn main() {
    let plant = RationalTF::three_pole(2.0, 0.1).unwrap();
    // Unity negative feedback written in the (1 - C P) convention.
    let controller = RationalTF::new(vec![-1.0], vec![1.0]).unwrap();
    let grid = log_space(1e-2, 1e4, 2000).unwrap();

    let b = b_margin_grid(&plant, &controller, &grid).unwrap();
    println!("grid stability margin b = {b:.6}\n");

    println!("degradation inequality at a few frequencies, 1000 perturbations each:");
    println!(
        "{:>10} {:>10} {:>12} {:>12}",
        "omega", "rho_nom", "min gap", "mean kappa"
    );
    for omega in [0.5, 5.0, 17.0, 60.0] {
        let p_nom = eval_freq(&plant, omega).unwrap();
        let c_nom = eval_freq(&controller, omega).unwrap();
        let nominal_fp = FreqPoint::new(omega, p_nom, c_nom).unwrap();
        let rho_nom = rho_or_zero(&nominal_fp);
        let mut min_gap = f64::INFINITY;
        let mut kappa_sum = 0.0;
        for i in 0..1000u64 {
            let mut rng = CounterRng::new(omega.to_bits(), i);
            let perturbed = PlanePoint::new(
                p_nom.re + (rng.uniform() - 0.5) * 0.4,
                p_nom.im + (rng.uniform() - 0.5) * 0.4,
            );
            let fp = FreqPoint::new(omega, perturbed, c_nom).unwrap();
            min_gap = min_gap.min(degradation_gap(&fp, p_nom));
            kappa_sum += chordal_distance(perturbed, p_nom);
        }
        println!(
            "{omega:>10.2} {rho_nom:>10.6} {min_gap:>12.3e} {:>12.6}",
            kappa_sum / 1000.0
        );
        assert!(min_gap >= -1e-9);
    }
    println!("\nno violation below -1e-9 observed");
}
