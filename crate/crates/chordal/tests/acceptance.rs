//! Acceptance suite: every release gate runs here, one test per criterion,
//! each printing a PASS/FAIL line (visible with `--nocapture`).
//!
//! ```bash
//! cargo test -p chordal --test acceptance -- --nocapture
//! ```

use std::time::{Duration, Instant};

use chordal::cdf::{cdf_ball, cdf_curve, linear_grid, CdfMethod, CdfQuery, QuadratureSpec};
use chordal::densities::{Cov2, DensityModel};

use chordal::margins::{degradation_gap, rho, rho_closed_form, FreqPoint};
use chordal::montecarlo::{dkw_band, sample_kappa};
use chordal::pushforward::{classify, intersections, mass_in_zw_rect, Classification, ZWPoint};
use chordal::riemann::{meridian_ball, PlaneDisc};
use chordal::rng::CounterRng;
use chordal::sysid::{freq_uncertainty, median_surrogate, run_trials, TrialConfig};
use chordal::{chordal_distance, lift, project, PlanePoint, SpherePoint};

struct Criterion {
    name: &'static str,
    budget: Option<Duration>,
    start: Instant,
}

impl Criterion {
    fn new(name: &'static str, budget_secs: Option<f64>) -> Self {
        Self {
            name,
            budget: budget_secs.map(Duration::from_secs_f64),
            start: Instant::now(),
        }
    }

    fn finish(self, failures: Vec<String>) {
        let elapsed = self.start.elapsed();
        let mut ok = failures.is_empty();
        let mut notes = failures;
        if let Some(budget) = self.budget {
            if elapsed > budget {
                ok = false;
                notes.push(format!("runtime {elapsed:?} exceeded budget {budget:?}"));
            }
        }
        println!(
            "{}: {} ({elapsed:.2?})",
            self.name,
            if ok { "PASS" } else { "FAIL" }
        );
        assert!(ok, "{}:\n{}", self.name, notes.join("\n"));
    }
}

fn random_point(rng: &mut CounterRng, scale: f64) -> PlanePoint {
    PlanePoint::new(
        (rng.uniform() - 0.5) * 2.0 * scale,
        (rng.uniform() - 0.5) * 2.0 * scale,
    )
}

#[test]
fn criterion_1_geometry_round_trips() {
    let c = Criterion::new("criterion 1 (geometry round trips)", Some(1.0));
    let mut failures = Vec::new();
    for i in 0..100_000u64 {
        let mut rng = CounterRng::new(0xA001, i);
        let p = random_point(&mut rng, 10.0);
        let lifted = lift(p).unwrap();
        if lifted.sphere_residual().abs() >= 1e-12 {
            failures.push(format!("on-sphere residual at {p:?}"));
            break;
        }
        let back = project(lifted).unwrap();
        if back.dist(&p) / p.modulus().max(1.0) >= 1e-12 {
            failures.push(format!("plane round trip at {p:?}"));
            break;
        }
        let z = rng.uniform() * (1.0 - 1e-6);
        let phi = rng.uniform() * std::f64::consts::TAU;
        let rho = (z * (1.0 - z)).max(0.0).sqrt();
        let s = SpherePoint {
            x: rho * phi.cos(),
            y: rho * phi.sin(),
            z,
        };
        if lift(project(s).unwrap()).unwrap().dist(&s) >= 1e-12 {
            failures.push(format!("sphere round trip at {s:?}"));
            break;
        }
    }
    c.finish(failures);
}

#[test]
fn criterion_2_chordal_metric_equivalence() {
    let c = Criterion::new("criterion 2 (chordal metric equivalence)", None);
    let mut failures = Vec::new();
    for i in 0..100_000u64 {
        let mut rng = CounterRng::new(0xA002, i);
        let p = random_point(&mut rng, 15.0);
        let q = random_point(&mut rng, 15.0);
        let direct = chordal_distance(p, q);
        let lifted = lift(p).unwrap().dist(&lift(q).unwrap());
        if (direct - lifted).abs() >= 1e-12 {
            failures.push(format!("kappa vs lift distance at {p:?}, {q:?}"));
            break;
        }
        // Metric axioms on a random triple.
        let m = random_point(&mut rng, 15.0);
        let pq = chordal_distance(p, q);
        if pq != chordal_distance(q, p) {
            failures.push("symmetry violated".into());
            break;
        }
        if !(0.0..=1.0).contains(&pq) {
            failures.push("range violated".into());
            break;
        }
        if pq > chordal_distance(p, m) + chordal_distance(m, q) + 1e-12 {
            failures.push(format!("triangle inequality at {p:?}, {q:?}, {m:?}"));
            break;
        }
    }
    c.finish(failures);
}

#[test]
fn criterion_3_pushforward_validation() {
    let c = Criterion::new("criterion 3 (pushforward density validation)", Some(120.0));
    let mut failures = Vec::new();

    // (a) intersection points satisfy both circle equations to 1e-10.
    for i in 0..20_000u64 {
        let mut rng = CounterRng::new(0xA003, i);
        let nominal = random_point(&mut rng, 3.0);
        if nominal.modulus() < 0.05 {
            continue;
        }
        let rho = rng.uniform() * 3.0;
        let lo = (nominal.modulus() - rho).abs();
        let hi = nominal.modulus() + rho;
        let sz = lo + (0.02 + 0.96 * rng.uniform()) * (hi - lo);
        let zw = ZWPoint::new(sz * sz, 1.0 + rho * rho).unwrap();
        if classify(zw, nominal).unwrap() != Classification::Two {
            continue;
        }
        let pair = intersections(zw, nominal).unwrap();
        for p in [pair.p1, pair.p2] {
            let res1 = (p.modulus_sq() - (zw.w - 1.0)).abs();
            let res2 = (p.dist(&nominal).powi(2) - zw.z).abs();
            if res1 >= 1e-10 || res2 >= 1e-10 {
                failures.push(format!("circle residuals {res1}, {res2} at {zw:?}"));
            }
        }
        if !failures.is_empty() {
            break;
        }
    }

    // (b) density normalization for a uniform disc.
    let nominal = PlanePoint::new(1.1, 0.4);
    let model = DensityModel::uniform_disc(PlanePoint::new(0.7, 0.6), 1.3).unwrap();
    let bound = model.support_bound(1e-9).unwrap();
    let z_hi = (bound.rho_max + nominal.modulus()).powi(2) + 0.1;
    let w_hi = 1.0 + bound.rho_max * bound.rho_max;
    let mass = mass_in_zw_rect(&model, nominal, (0.0, z_hi), (1.0, w_hi), 1e-5)
        .unwrap()
        .value;
    if (mass - 1.0).abs() >= 1e-3 {
        failures.push(format!("normalization gave {mass}"));
    }

    // (c) rectangle probabilities vs 1e6-sample Monte Carlo, 20 rectangles.
    let n = 1_000_000usize;
    let samples: Vec<(f64, f64)> = (0..n as u64)
        .map(|i| {
            let p = model.sample_at(0xA003C, i);
            (p.dist(&nominal).powi(2), p.modulus_sq() + 1.0)
        })
        .collect();
    for ri in 0..20u64 {
        let mut rng = CounterRng::new(0xA003D, ri);
        let z0 = rng.uniform() * 4.5;
        let z1 = z0 + 0.2 + rng.uniform() * 2.0;
        let w0 = 1.0 + rng.uniform() * 4.0;
        let w1 = w0 + 0.2 + rng.uniform() * 2.0;
        let quad = mass_in_zw_rect(&model, nominal, (z0, z1), (w0, w1), 1e-6).unwrap();
        let count = samples
            .iter()
            .filter(|(z, w)| *z >= z0 && *z <= z1 && *w >= w0 && *w <= w1)
            .count();
        let freq = count as f64 / n as f64;
        let sigma = (quad.value.max(1e-12) * (1.0 - quad.value).max(0.0) / n as f64).sqrt();
        let band = 3.0 * sigma + quad.err_bound + 1e-6;
        if (freq - quad.value).abs() > band {
            failures.push(format!(
                "rectangle {ri}: quadrature {} vs frequency {freq} (band {band})",
                quad.value
            ));
        }
    }
    c.finish(failures);
}

#[test]
fn criterion_4_two_route_agreement() {
    let c = Criterion::new("criterion 4 (double integral vs ball route)", Some(300.0));
    let mut failures = Vec::new();
    let grid = linear_grid(0.0, 1.0, 21);
    let spec = QuadratureSpec {
        abs_tol: 1e-5,
        rel_tol: 1e-6,
        ..QuadratureSpec::default()
    };
    for i in 0..10u64 {
        let mut rng = CounterRng::new(0xACC4, i);
        let dir = rng.uniform() * std::f64::consts::TAU;
        let mag = 0.2 + 2.0 * rng.uniform();
        let nominal = PlanePoint::new(mag * dir.cos(), mag * dir.sin());
        let center = PlanePoint::new(
            nominal.re + (rng.uniform() - 0.5),
            nominal.im + (rng.uniform() - 0.5),
        );
        let radius = 0.3 + 1.2 * rng.uniform();
        let model = DensityModel::uniform_disc(center, radius).unwrap();
        let a = cdf_curve(&model, nominal, &grid, CdfMethod::DoubleIntegral, &spec).unwrap();
        let b = cdf_curve(&model, nominal, &grid, CdfMethod::Ball, &spec).unwrap();
        let max_dev = a
            .values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max);
        if max_dev > 1e-3 {
            failures.push(format!(
                "config {i} (nominal {nominal:?}, disc {center:?} r {radius}): max dev {max_dev}"
            ));
        }
    }
    c.finish(failures);
}

#[test]
fn criterion_5_gaussian_reproduction() {
    let c = Criterion::new("criterion 5 (Gaussian study reproduction)", Some(120.0));
    let mut failures = Vec::new();
    let nominal = PlanePoint::new(1.0, 1.0);
    let model = DensityModel::gaussian(nominal, Cov2::diagonal(1.0, 0.25).unwrap()).unwrap();
    let spec = QuadratureSpec::default();
    let grid = linear_grid(0.0, 1.0, 21);

    let curve = cdf_curve(&model, nominal, &grid, CdfMethod::DoubleIntegral, &spec).unwrap();
    if curve.values[0] != 0.0 {
        failures.push(format!("F(0) = {}", curve.values[0]));
    }
    if curve.values.windows(2).any(|w| w[1] < w[0]) {
        failures.push("curve not monotone".into());
    }
    let last = *curve.values.last().unwrap();
    if last < 0.999 {
        failures.push(format!("F(1) = {last}, expected saturation toward 1"));
    }

    let n = 1_000_000;
    let emp = sample_kappa(&model, nominal, n, 0xA005).unwrap();
    let band = dkw_band(n, 0.01).unwrap() + 2e-3;
    for (d, f) in grid.iter().zip(&curve.values) {
        let fe = emp.value_at(*d);
        if (f - fe).abs() > band {
            failures.push(format!(
                "d = {d}: quadrature {f} vs empirical {fe} (band {band})"
            ));
        }
    }
    c.finish(failures);
}

#[test]
fn criterion_6_analytic_cases() {
    let c = Criterion::new("criterion 6 (analytic CDF and projected ball)", None);
    let mut failures = Vec::new();

    let model = DensityModel::uniform_disc(PlanePoint::ZERO, 2.0).unwrap();
    let d = std::f64::consts::FRAC_1_SQRT_2;
    let q = CdfQuery::new(&model, PlanePoint::ZERO, d).unwrap();
    let f = cdf_ball(&q, &QuadratureSpec::default()).unwrap().value;
    if (f - 0.25).abs() >= 1e-4 {
        failures.push(format!("quarter-mass case gave {f}"));
    }

    for i in 1..=9 {
        let d = i as f64 / 10.0;
        match meridian_ball(SpherePoint::SOUTH_POLE, d).unwrap() {
            PlaneDisc::Interior { center, radius } => {
                let expect = d / (1.0 - d * d).sqrt();
                if (radius - expect).abs() >= 1e-10 || center.modulus() >= 1e-12 {
                    failures.push(format!(
                        "south-pole projected ball at d = {d}: radius {radius} vs {expect}"
                    ));
                }
            }
            other => failures.push(format!("unexpected ball kind {other:?}")),
        }
    }
    c.finish(failures);
}

#[test]
fn criterion_7_degradation_inequality() {
    let c = Criterion::new("criterion 7 (margin degradation inequality)", None);
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for i in 0..10_000u64 {
        let mut rng = CounterRng::new(0xA007, i);
        let perturbed = FreqPoint::new(
            1.0,
            random_point(&mut rng, 5.0),
            random_point(&mut rng, 5.0),
        )
        .unwrap();
        let nominal = random_point(&mut rng, 5.0);
        let gap = degradation_gap(&perturbed, nominal);
        if gap < -1e-9 {
            failures.push(format!("gap {gap} at {perturbed:?} vs {nominal:?}"));
            break;
        }
        if let Ok(svd_rho) = rho(&perturbed) {
            let closed = rho_closed_form(&perturbed);
            if (svd_rho - closed).abs() >= 1e-10 {
                failures.push(format!("rho routes disagree: {svd_rho} vs {closed}"));
                break;
            }
        }
        checked += 1;
    }
    if checked < 10_000 && failures.is_empty() {
        failures.push(format!("only {checked} triples checked"));
    }
    c.finish(failures);
}

#[test]
fn criterion_8_identification_study() {
    let c = Criterion::new("criterion 8 (identification study)", Some(300.0));
    let mut failures = Vec::new();

    // Zero-noise trials recover the true parameters.
    let clean = TrialConfig {
        trials: 20,
        base_seed: 0xA008,
        noise_sigma: 0.0,
        ..TrialConfig::default()
    };
    let ensemble = run_trials(&clean).unwrap();
    for (t, fit) in ensemble.fits.iter().enumerate() {
        if (fit.b_hat - 2.0).abs() >= 1e-6 || (fit.tau_hat - 0.1).abs() >= 1e-6 {
            failures.push(format!(
                "zero-noise trial {t} gave ({}, {})",
                fit.b_hat, fit.tau_hat
            ));
        }
    }

    // Noisy ensemble at the documented defaults.
    let noisy = TrialConfig {
        trials: 200,
        base_seed: 0xA008B,
        ..TrialConfig::default()
    };
    let ensemble = run_trials(&noisy).unwrap();
    let median = median_surrogate(&ensemble);
    if !(median < 0.1) {
        failures.push(format!("median gap surrogate {median}"));
    }

    // The 5-sigma ellipse of the first fit covers the per-trial responses.
    let reference = ensemble.fits.iter().find(|f| f.converged).unwrap();
    let fitted: Vec<_> = ensemble
        .fits
        .iter()
        .filter(|f| f.converged)
        .map(|f| f.plant().unwrap())
        .collect();
    for &omega in &ensemble.freq_grid {
        let (mean, cov, _) = freq_uncertainty(reference, omega).unwrap();
        let inv = cov.inverse();
        let mut inside = 0usize;
        for tf in &fitted {
            let p = chordal::lti::eval_freq(tf, omega).unwrap();
            let dx = p - mean;
            if inv.quad_form(dx) <= 25.0 {
                inside += 1;
            }
        }
        let coverage = inside as f64 / fitted.len() as f64;
        if coverage < 0.98 {
            failures.push(format!("coverage {coverage} at omega = {omega}"));
        }
    }
    c.finish(failures);
}

#[test]
fn criterion_9_cli_determinism() {
    let c = Criterion::new("criterion 9 (CLI determinism)", None);
    let mut failures = Vec::new();
    let bin = env!("CARGO_BIN_EXE_chordal");
    let base = std::env::temp_dir().join(format!("chordal-accept-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&base);
    std::fs::create_dir_all(&base).unwrap();

    let cdf_cfg = base.join("cdf.json");
    std::fs::write(
        &cdf_cfg,
        r#"{
  "density": { "type": "truncated-gaussian", "mean": [1.0, 1.0], "cov": [[1.0, 0.0], [0.0, 0.25]] },
  "nominal": [1.0, 1.0],
  "d_grid": { "min": 0.0, "max": 1.0, "count": 11 },
  "quadrature": { "abs_tol": 1e-5, "rel_tol": 1e-6 }
}"#,
    )
    .unwrap();
    let nyq_cfg = base.join("nyquist.json");
    std::fs::write(
        &nyq_cfg,
        r#"{
  "plant": { "num": [2.0], "den": [1.0, 0.3, 0.03, 0.001] },
  "freq_grid": { "min": 0.0, "max": 50.0, "count": 301 }
}"#,
    )
    .unwrap();
    let sysid_cfg = base.join("sysid.json");
    std::fs::write(
        &sysid_cfg,
        r#"{
  "plant": { "num": [2.0], "den": [1.0, 0.3, 0.03, 0.001] },
  "freq_grid": { "min": 0.0, "max": 100.0, "spacing": 5.0 },
  "trials": 16,
  "record_length": 1024,
  "noise_sigma": 0.1
}"#,
    )
    .unwrap();
    let margin_cfg = base.join("margin.json");
    std::fs::write(
        &margin_cfg,
        r#"{
  "plant": { "num": [2.0], "den": [1.0, 0.3, 0.03, 0.001] },
  "controller": { "num": [-1.0], "den": [1.0] },
  "density": { "type": "uniform-disc", "center": [0.0, 0.0], "radius": 0.2 },
  "freq_grid": { "min": 0.1, "max": 100.0, "count": 10, "scale": "log" }
}"#,
    )
    .unwrap();

    // Each command runs three times: twice single-threaded, once with four
    // threads. All runs must produce byte-identical artifacts.
    let runs: Vec<(&str, Vec<String>)> = vec![
        (
            "cdf",
            vec![
                "cdf".into(),
                "--config".into(),
                cdf_cfg.display().to_string(),
                "--method".into(),
                "both".into(),
                "--seed".into(),
                "5".into(),
            ],
        ),
        (
            "mc",
            vec![
                "mc".into(),
                "--config".into(),
                cdf_cfg.display().to_string(),
                "--samples".into(),
                "200000".into(),
                "--seed".into(),
                "5".into(),
            ],
        ),
        (
            "nyquist",
            vec![
                "nyquist".into(),
                "--config".into(),
                nyq_cfg.display().to_string(),
                "--seed".into(),
                "5".into(),
            ],
        ),
        (
            "sysid",
            vec![
                "sysid".into(),
                "--config".into(),
                sysid_cfg.display().to_string(),
                "--seed".into(),
                "5".into(),
            ],
        ),
        (
            "margin",
            vec![
                "margin".into(),
                "--config".into(),
                margin_cfg.display().to_string(),
                "--samples".into(),
                "25".into(),
                "--seed".into(),
                "5".into(),
            ],
        ),
    ];

    for (name, args) in &runs {
        let mut snapshots: Vec<std::collections::BTreeMap<String, Vec<u8>>> = Vec::new();
        for (run_idx, threads) in ["1", "1", "4"].iter().enumerate() {
            let out_dir = base.join(format!("{name}-{run_idx}"));
            std::fs::create_dir_all(&out_dir).unwrap();
            // The mc command compares against an existing cdf.csv when
            // present; give it one deterministically.
            if *name == "mc" {
                let cdf_out = base.join("cdf-0").join("cdf.csv");
                if cdf_out.exists() {
                    std::fs::copy(&cdf_out, out_dir.join("cdf.csv")).unwrap();
                }
            }
            let output = std::process::Command::new(bin)
                .args(args)
                .arg("--out-dir")
                .arg(&out_dir)
                .env("RAYON_NUM_THREADS", threads)
                .output()
                .unwrap();
            if !output.status.success() {
                failures.push(format!(
                    "{name} run {run_idx} failed: {}",
                    String::from_utf8_lossy(&output.stderr)
                ));
                continue;
            }
            let mut snapshot = std::collections::BTreeMap::new();
            for entry in std::fs::read_dir(&out_dir).unwrap() {
                let entry = entry.unwrap();
                snapshot.insert(
                    entry.file_name().to_string_lossy().into_owned(),
                    std::fs::read(entry.path()).unwrap(),
                );
            }
            snapshot.insert("__stdout".into(), output.stdout.clone());
            snapshots.push(snapshot);
        }
        for later in &snapshots[1..] {
            if later.keys().ne(snapshots[0].keys()) {
                failures.push(format!("{name}: runs produced different file sets"));
            } else {
                for (file, bytes) in later {
                    if snapshots[0][file] != *bytes {
                        failures.push(format!("{name}: {file} differs between runs"));
                    }
                }
            }
        }
    }
    let _ = std::fs::remove_dir_all(&base);
    c.finish(failures);
}
