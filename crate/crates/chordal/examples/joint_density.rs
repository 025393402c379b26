//! The pushforward density of (squared distance to nominal, squared modulus
//! plus one): preimage classification, circle intersections, and the
//! normalization check.
//!
//! ```bash
//! cargo run --release --example joint_density
//! ```

use chordal::densities::DensityModel;
use chordal::pushforward::{
    classify, intersections, joint_density_zw, mass_in_zw_rect, Classification, ZWPoint,
};
use chordal::PlanePoint;

fn main() {
    let nominal = PlanePoint::new(1.0, 0.0);

    println!(
        "classification against nominal {:+.1}{:+.1}i:",
        nominal.re, nominal.im
    );
    for (z, w) in [(1.0, 2.0), (4.0, 2.0), (0.01, 5.0)] {
        let c = classify(ZWPoint::new(z, w).unwrap(), nominal).unwrap();
        println!("  (z, w) = ({z}, {w}): {c:?}");
        if c == Classification::Two {
            let pair = intersections(ZWPoint::new(z, w).unwrap(), nominal).unwrap();
            println!(
                "    preimages ({:+.6}, {:+.6}) and ({:+.6}, {:+.6}), jacobian factor c2 = {:.6}",
                pair.p1.re, pair.p1.im, pair.p2.re, pair.p2.im, pair.c2
            );
        }
    }

    // Density values under a uniform-disc plant distribution.
    let model = DensityModel::uniform_disc(PlanePoint::new(0.8, 0.5), 1.2).unwrap();
    println!("\njoint density under a uniform disc:");
    for (z, w) in [(0.5, 2.0), (1.5, 3.0), (0.2, 1.3)] {
        let f = joint_density_zw(ZWPoint::new(z, w).unwrap(), nominal, &model).unwrap();
        println!("  f_zw({z}, {w}) = {:.6}", f.value);
    }

    // The density integrates to one over the valid region.
    let bound = model.support_bound(1e-9).unwrap();
    let r = nominal.modulus();
    let z_hi = (bound.rho_max + r).powi(2) + 0.1;
    let w_hi = 1.0 + bound.rho_max * bound.rho_max;
    let mass = mass_in_zw_rect(&model, nominal, (0.0, z_hi), (1.0, w_hi), 1e-6).unwrap();
    println!(
        "\ntotal mass = {:.8} (error bound {:.1e})",
        mass.value, mass.err_bound
    );
}
