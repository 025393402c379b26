//! Lift Nyquist-plane points onto the Riemann sphere and back.
//!
//! ```bash
//! cargo run --release --example lift_project
//! ```

use chordal::{chordal_distance, lift, project, PlanePoint};

fn main() {
    let points = [
        PlanePoint::new(0.0, 0.0),
        PlanePoint::new(1.0, 0.0),
        PlanePoint::new(1.0, 1.0),
        PlanePoint::new(-2.5, 0.7),
        PlanePoint::new(100.0, -40.0),
    ];

    println!(
        "{:>16} {:>34} {:>14}",
        "plane point", "lift (x, y, z)", "round trip"
    );
    for c in points {
        let r = lift(c).expect("finite point");
        let back = project(r).expect("below the north pole");
        println!(
            "{:>7.2} {:+.2}i   ({:+.6}, {:+.6}, {:.6})   {:.2e}",
            c.re,
            c.im,
            r.x,
            r.y,
            r.z,
            back.dist(&c)
        );
        assert!(r.sphere_residual().abs() < 1e-12);
    }

    // The chordal distance is the straight-line distance between lifts.
    let p = PlanePoint::new(0.3, -0.4);
    let q = PlanePoint::new(2.0, 1.0);
    let kappa = chordal_distance(p, q);
    let through_space = lift(p).unwrap().dist(&lift(q).unwrap());
    println!("\nkappa(p, q)            = {kappa:.15}");
    println!("|lift(p) - lift(q)|    = {through_space:.15}");
    println!(
        "difference             = {:.2e}",
        (kappa - through_space).abs()
    );

    // Distant points converge to the north pole; kappa saturates below 1.
    let far = PlanePoint::new(1e6, 0.0);
    println!(
        "\nlift(1e6) = (x: {:.2e}, y: 0, z: {:.12}), kappa(0, 1e6) = {:.9}",
        lift(far).unwrap().x,
        lift(far).unwrap().z,
        chordal_distance(PlanePoint::ZERO, far)
    );
}
