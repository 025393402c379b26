//! Frequency response of the three-pole lag along the positive imaginary
//! axis: DC gain, phase crossover, rolloff.
//!
//! ```bash
//! cargo run --release --example nyquist_three_pole
//! ```

use chordal::lti::{eval_freq, RationalTF};

fn main() {
    let b = 2.0;
    let tau = 0.1;
    let plant = RationalTF::three_pole(b, tau).unwrap();

    println!("P(s) = {b} / (1 + {tau} s)^3");
    println!(
        "{:>10} {:>12} {:>12} {:>10} {:>10}",
        "omega", "Re", "Im", "|P|", "deg"
    );
    for omega in [0.0, 1.0, 5.0, 10.0, 17.0, 25.0, 50.0, 100.0, 1000.0] {
        let p = eval_freq(&plant, omega).unwrap();
        println!(
            "{omega:>10.2} {:>12.6} {:>12.6} {:>10.6} {:>10.2}",
            p.re,
            p.im,
            p.modulus(),
            p.im.atan2(p.re).to_degrees()
        );
    }

    let crossover = 3.0f64.sqrt() / tau;
    let p = eval_freq(&plant, crossover).unwrap();
    println!("\nphase crossover at omega = sqrt(3)/tau = {crossover:.6} rad/s:");
    println!(
        "P = {:+.12}{:+.12}i (exact value -b/8 = {})",
        p.re,
        p.im,
        -b / 8.0
    );
}
