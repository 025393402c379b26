//! The planar image of a chordal ball `{P : kappa(P, nominal) < d}`:
//! interior disc, half-plane, or exterior of a disc, computed two ways.
//!
//! ```bash
//! cargo run --release --example chordal_ball
//! ```

use chordal::riemann::{chordal_ball_plane, chordal_distance, lift, meridian_ball, PlaneDisc};
use chordal::PlanePoint;

fn describe(disc: &PlaneDisc) -> String {
    match disc {
        PlaneDisc::Interior { center, radius } => {
            format!(
                "interior disc, center {:+.4}{:+.4}i, radius {:.4}",
                center.re, center.im, radius
            )
        }
        PlaneDisc::Exterior { center, radius } => {
            format!(
                "exterior of disc, center {:+.4}{:+.4}i, radius {:.4}",
                center.re, center.im, radius
            )
        }
        PlaneDisc::HalfPlane {
            boundary_point,
            inward_normal,
        } => format!(
            "half-plane through {:+.4}{:+.4}i, inward normal {:+.4}{:+.4}i",
            boundary_point.re, boundary_point.im, inward_normal.re, inward_normal.im
        ),
    }
}

fn main() {
    let nominal = PlanePoint::new(1.0, 1.0);
    println!(
        "chordal balls around {:+.1}{:+.1}i:",
        nominal.re, nominal.im
    );
    for d in [0.2, 0.5, (1.0f64 / 3.0).sqrt(), 0.7, 0.9] {
        let ball = chordal_ball_plane(nominal, d).unwrap();
        println!("  d = {d:.4}: {}", describe(&ball));
    }

    // Membership agrees with the defining inequality.
    let d = 0.5;
    let ball = chordal_ball_plane(nominal, d).unwrap();
    let probes = [
        PlanePoint::new(1.0, 1.0),
        PlanePoint::new(4.0, 4.0),
        PlanePoint::new(9.0, 4.0),
        PlanePoint::new(-1.0, 0.0),
    ];
    println!("\nmembership at d = {d}:");
    for p in probes {
        let kappa = chordal_distance(p, nominal);
        println!(
            "  P = {:+.1}{:+.1}i: kappa = {kappa:.4}, in ball = {}",
            p.re,
            p.im,
            ball.contains(p)
        );
        assert_eq!(ball.contains(p), kappa < d);
    }

    // The meridian construction on the sphere reproduces the algebraic disc.
    let rbar = lift(nominal).unwrap();
    match (meridian_ball(rbar, d).unwrap(), ball) {
        (
            PlaneDisc::Interior {
                center: c1,
                radius: r1,
            },
            PlaneDisc::Interior {
                center: c2,
                radius: r2,
            },
        ) => {
            println!(
                "\nmeridian-construction disc agrees with the algebraic one to {:.1e} (center), {:.1e} (radius)",
                c1.dist(&c2),
                (r1 - r2).abs()
            );
        }
        other => panic!("unexpected ball kinds: {other:?}"),
    }
}
