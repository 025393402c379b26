//! Batch pipelines behind the CLI subcommands: experiment config in, CSV
//! (and optional SVG) out. All outputs are deterministic for a fixed config
//! and seed, independent of thread count.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::cdf::{cdf_ball, cdf_double_integral, CdfCurve, CdfMethod, CdfQuery, QuadratureSpec};
use crate::config::ExperimentConfig;
use crate::densities::DensityModel;
use crate::error::{Error, Result};
use crate::lti::{eval_freq, RationalTF};
use crate::margins::{b_margin_grid, degradation_gap, rho_or_zero, FreqPoint};
use crate::montecarlo::{compare, dkw_band, sample_kappa};
use crate::riemann::{chordal_distance, PlanePoint};
use crate::rng::derive;
use crate::svg;
use crate::sysid::{freq_uncertainty, median_surrogate, run_trials, TrialConfig};

/// Options shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct CommonOpts {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub tol: Option<f64>,
    pub svg: bool,
}

impl CommonOpts {
    fn seed(&self, cfg: &ExperimentConfig) -> u64 {
        self.seed.or(cfg.seed).unwrap_or(1)
    }

    fn out_dir(&self, cfg: &ExperimentConfig) -> Result<PathBuf> {
        let dir = self
            .out_dir
            .clone()
            .or_else(|| cfg.out_dir.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        std::fs::create_dir_all(&dir)?;
        Ok(dir)
    }
}

/// Which CDF route(s) the `cdf` subcommand runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodFlag {
    DoubleIntegral,
    Ball,
    Both,
    MonteCarlo,
}

impl std::str::FromStr for MethodFlag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "double-integral" => Ok(MethodFlag::DoubleIntegral),
            "ball" => Ok(MethodFlag::Ball),
            "both" => Ok(MethodFlag::Both),
            "mc" | "monte-carlo" => Ok(MethodFlag::MonteCarlo),
            other => Err(Error::Config(format!(
                "unknown method \"{other}\" (expected double-integral, ball, both, or mc)"
            ))),
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents)?;
    Ok(())
}

struct CdfRows {
    rows: String,
    curve: Option<CdfCurve>,
    first_error: Option<Error>,
}

/// Evaluate one quadrature route per threshold, keeping going past failures
/// so the CSV can record every threshold; failed ones carry NaN values.
fn evaluate_rows(
    model: &DensityModel,
    nominal: PlanePoint,
    grid: &[f64],
    method: CdfMethod,
    spec: &QuadratureSpec,
) -> CdfRows {
    let results: Vec<Result<crate::quadrature::QuadResult>> = grid
        .par_iter()
        .map(|&d| {
            let q = CdfQuery::new(model, nominal, d)?;
            match method {
                CdfMethod::DoubleIntegral => cdf_double_integral(&q, spec),
                _ => cdf_ball(&q, spec),
            }
        })
        .collect();
    let mut raw = Vec::with_capacity(grid.len());
    let mut errs = Vec::with_capacity(grid.len());
    let mut first_error = None;
    for res in results {
        match res {
            Ok(r) => {
                raw.push(r.value);
                errs.push(r.err_bound);
            }
            Err(e) => {
                raw.push(f64::NAN);
                errs.push(f64::INFINITY);
                if first_error.is_none() {
                    first_error = Some(e);
                }
            }
        }
    }
    let curve = if first_error.is_none() {
        match crate::cdf::enforce_monotone(raw.clone(), &errs, grid) {
            Ok(values) => {
                raw = values.clone();
                Some(CdfCurve {
                    thresholds: grid.to_vec(),
                    values,
                    err_bounds: errs.clone(),
                    method,
                    abs_tol: spec.abs_tol,
                    rel_tol: spec.rel_tol,
                })
            }
            Err(e) => {
                first_error = Some(e);
                None
            }
        }
    } else {
        None
    };
    let mut rows = String::new();
    for i in 0..grid.len() {
        let _ = writeln!(
            rows,
            "{},{},{},{}",
            grid[i],
            raw[i],
            method.label(),
            errs[i]
        );
    }
    CdfRows {
        rows,
        curve,
        first_error,
    }
}

/// `cdf` subcommand: write `cdf.csv` (and optionally `cdf.svg`).
pub fn cmd_cdf(cfg: &ExperimentConfig, method: MethodFlag, opts: &CommonOpts) -> Result<()> {
    let model = cfg.require_density()?;
    let nominal = cfg.require_nominal()?;
    let grid = cfg.d_grid()?;
    let spec = cfg.quadrature_spec(opts.tol)?;
    let out_dir = opts.out_dir(cfg)?;
    let seed = opts.seed(cfg);

    let mut csv = String::from("d,F,method,abs_err_bound\n");
    let mut curves: Vec<CdfCurve> = Vec::new();
    let mut first_error = None;

    let methods: Vec<CdfMethod> = match method {
        MethodFlag::DoubleIntegral => vec![CdfMethod::DoubleIntegral],
        MethodFlag::Ball => vec![CdfMethod::Ball],
        MethodFlag::Both => vec![CdfMethod::DoubleIntegral, CdfMethod::Ball],
        MethodFlag::MonteCarlo => {
            let n = cfg.mc_samples.unwrap_or(1_000_000);
            vec![CdfMethod::MonteCarlo { n, seed }]
        }
    };
    for m in methods {
        match m {
            CdfMethod::MonteCarlo { .. } => {
                let curve = crate::cdf::cdf_curve(&model, nominal, &grid, m, &spec)?;
                for i in 0..grid.len() {
                    let _ = writeln!(
                        csv,
                        "{},{},{},{}",
                        grid[i],
                        curve.values[i],
                        m.label(),
                        curve.err_bounds[i]
                    );
                }
                curves.push(curve);
            }
            _ => {
                let out = evaluate_rows(&model, nominal, &grid, m, &spec);
                csv.push_str(&out.rows);
                if let Some(c) = out.curve {
                    curves.push(c);
                }
                if first_error.is_none() {
                    first_error = out.first_error;
                }
            }
        }
    }
    if let Some(e) = &first_error {
        let _ = writeln!(csv, "# error: {e}");
    }
    write_file(&out_dir.join("cdf.csv"), &csv)?;

    if method == MethodFlag::Both && curves.len() == 2 {
        let max_dev = curves[0]
            .values
            .iter()
            .zip(&curves[1].values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        println!("max |F_double_integral - F_ball| over the grid = {max_dev}");
    }

    if opts.svg {
        let series: Vec<(&str, Vec<(f64, f64)>)> = curves
            .iter()
            .map(|c| {
                (
                    c.method.label(),
                    c.thresholds
                        .iter()
                        .zip(&c.values)
                        .map(|(&d, &f)| (d, f))
                        .collect(),
                )
            })
            .collect();
        let borrowed: Vec<(&str, &[(f64, f64)])> =
            series.iter().map(|(n, s)| (*n, s.as_slice())).collect();
        write_file(
            &out_dir.join("cdf.svg"),
            &svg::line_chart("chordal distance CDF", "d", "F(d)", &borrowed),
        )?;
    }
    match first_error {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// `mc` subcommand: write `mc.csv`, and when `cdf.csv` is already present in
/// the output directory, compare against it and write `mc_report.txt`.
pub fn cmd_mc(cfg: &ExperimentConfig, samples: Option<usize>, opts: &CommonOpts) -> Result<()> {
    let model = cfg.require_density()?;
    let nominal = cfg.require_nominal()?;
    let grid = cfg.d_grid()?;
    let out_dir = opts.out_dir(cfg)?;
    let seed = opts.seed(cfg);
    let n = samples.or(cfg.mc_samples).unwrap_or(1_000_000);
    if n == 0 {
        return Err(Error::Config("--samples must be at least 1".into()));
    }
    let emp = sample_kappa(&model, nominal, n, seed)?;

    let mut csv = String::from("d,F_emp\n");
    for &d in &grid {
        let _ = writeln!(csv, "{d},{}", emp.value_at(d));
    }
    write_file(&out_dir.join("mc.csv"), &csv)?;

    let cdf_path = out_dir.join("cdf.csv");
    if cdf_path.exists() {
        let curves = read_cdf_csv(&cdf_path)?;
        let mut report = String::new();
        let _ = writeln!(
            report,
            "monte carlo check: n = {n}, seed = {seed}, alpha = 0.01"
        );
        let _ = writeln!(report, "dkw band = {}", dkw_band(n, 0.01)?);
        let mut all_pass = true;
        for curve in &curves {
            let r = compare(curve, &emp, 0.01)?;
            all_pass &= r.pass;
            let _ = writeln!(
                report,
                "method {}: {} (max deviation {})",
                curve.method.label(),
                if r.pass { "PASS" } else { "FAIL" },
                r.max_deviation
            );
            for c in &r.checks {
                let _ = writeln!(
                    report,
                    "  d={} quad={} emp={} dev={} allowed={} {}",
                    c.d,
                    c.quadrature,
                    c.empirical,
                    c.deviation,
                    c.allowed,
                    if c.pass { "pass" } else { "FAIL" }
                );
            }
        }
        if curves.is_empty() {
            let _ = writeln!(report, "no quadrature curves found in cdf.csv");
        }
        write_file(&out_dir.join("mc_report.txt"), &report)?;
        println!(
            "mc comparison vs cdf.csv: {}",
            if all_pass { "PASS" } else { "FAIL" }
        );
    }
    Ok(())
}

/// Parse `cdf.csv` back into one curve per quadrature method.
fn read_cdf_csv(path: &Path) -> Result<Vec<CdfCurve>> {
    let text = std::fs::read_to_string(path)?;
    let mut groups: Vec<(String, Vec<(f64, f64, f64)>)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 4 {
            return Err(Error::Config(format!(
                "{}: malformed row \"{line}\"",
                path.display()
            )));
        }
        let method = parts[2].to_string();
        if method == "monte-carlo" {
            continue;
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::Config(format!("{}: bad number \"{s}\"", path.display())))
        };
        let row = (parse(parts[0])?, parse(parts[1])?, parse(parts[3])?);
        if !row.1.is_finite() {
            continue; // annotated failure row
        }
        match groups.iter_mut().find(|(m, _)| *m == method) {
            Some((_, rows)) => rows.push(row),
            None => groups.push((method, vec![row])),
        }
    }
    Ok(groups
        .into_iter()
        .map(|(m, rows)| CdfCurve {
            thresholds: rows.iter().map(|r| r.0).collect(),
            values: rows.iter().map(|r| r.1).collect(),
            err_bounds: rows.iter().map(|r| r.2).collect(),
            method: if m == "double-integral" {
                CdfMethod::DoubleIntegral
            } else {
                CdfMethod::Ball
            },
            abs_tol: 0.0,
            rel_tol: 0.0,
        })
        .collect())
}

/// `nyquist` subcommand: frequency response of the configured plant.
pub fn cmd_nyquist(cfg: &ExperimentConfig, opts: &CommonOpts) -> Result<()> {
    let plant = cfg.require_plant()?;
    let grid = cfg.require_freq_grid()?;
    let out_dir = opts.out_dir(cfg)?;
    let mut csv = String::from("omega,re,im\n");
    let mut points = Vec::with_capacity(grid.len());
    for &omega in &grid {
        let p = eval_freq(&plant, omega)?;
        let _ = writeln!(csv, "{omega},{},{}", p.re, p.im);
        points.push((p.re, p.im));
    }
    write_file(&out_dir.join("nyquist.csv"), &csv)?;
    if opts.svg {
        write_file(
            &out_dir.join("nyquist.svg"),
            &svg::line_chart("Nyquist plot", "Re", "Im", &[("P(jw)", &points)]),
        )?;
    }
    Ok(())
}

fn three_pole_params(plant: &RationalTF) -> Result<(f64, f64)> {
    let num = plant.num();
    let den = plant.den();
    if num.len() == 1 && den.len() == 4 && den[0] != 0.0 {
        let b = num[0] / den[0];
        let tau = (den[3] / den[0]).cbrt();
        let expect = [1.0, 3.0 * tau, 3.0 * tau * tau, tau * tau * tau];
        let close = den
            .iter()
            .zip(expect.iter())
            .all(|(a, e)| (a / den[0] - e).abs() <= 1e-9 * e.abs().max(1.0));
        if tau > 0.0 && close {
            return Ok((b, tau));
        }
    }
    Err(Error::Config(
        "sysid requires a plant of the form b / (1 + tau s)^3".into(),
    ))
}

/// `sysid` subcommand: run the identification study and write its tables.
pub fn cmd_sysid(cfg: &ExperimentConfig, trials: Option<usize>, opts: &CommonOpts) -> Result<()> {
    let out_dir = opts.out_dir(cfg)?;
    let defaults = TrialConfig::default();
    let (true_b, true_tau) = match &cfg.plant {
        Some(spec) => three_pole_params(&spec.build()?)?,
        None => (defaults.true_b, defaults.true_tau),
    };
    let config = TrialConfig {
        trials: trials.or(cfg.trials).unwrap_or(defaults.trials),
        base_seed: opts.seed(cfg),
        true_b,
        true_tau,
        noise_sigma: cfg.noise_sigma.unwrap_or(defaults.noise_sigma),
        record_length: cfg.record_length.unwrap_or(defaults.record_length),
        sample_time: cfg.sample_time.unwrap_or(defaults.sample_time),
        prbs_amplitude: cfg.prbs_amplitude.unwrap_or(defaults.prbs_amplitude),
        init: cfg
            .init_guess
            .map(|g| (g[0], g[1]))
            .unwrap_or(defaults.init),
        figure_grid: match &cfg.freq_grid {
            Some(g) => g.build()?,
            None => defaults.figure_grid.clone(),
        },
        surrogate_grid: defaults.surrogate_grid.clone(),
    };
    let ensemble = run_trials(&config)?;

    let mut trials_csv = String::from("trial,b_hat,tau_hat,converged,gap_surrogate\n");
    for (t, fit) in ensemble.fits.iter().enumerate() {
        let _ = writeln!(
            trials_csv,
            "{t},{},{},{},{}",
            fit.b_hat, fit.tau_hat, fit.converged, ensemble.gap_surrogates[t]
        );
    }
    write_file(&out_dir.join("trials.csv"), &trials_csv)?;

    let mut surface_csv = String::from("trial,omega,kappa\n");
    for (t, row) in ensemble.kappa.iter().enumerate() {
        for (i, k) in row.iter().enumerate() {
            let _ = writeln!(surface_csv, "{t},{},{k}", ensemble.freq_grid[i]);
        }
    }
    write_file(&out_dir.join("kappa_surface.csv"), &surface_csv)?;

    // Per-frequency uncertainty model from the first converged fit, the
    // single-identification picture the study starts from.
    let reference = ensemble
        .fits
        .iter()
        .find(|f| f.converged)
        .ok_or_else(|| Error::Precondition("no converged trials".into()))?;
    let mut unc_csv = String::from("omega,mean_re,mean_im,cov_xx,cov_xy,cov_yy\n");
    for &omega in &ensemble.freq_grid {
        let (mean, cov, _) = freq_uncertainty(reference, omega)?;
        let _ = writeln!(
            unc_csv,
            "{omega},{},{},{},{},{}",
            mean.re, mean.im, cov.xx, cov.xy, cov.yy
        );
    }
    write_file(&out_dir.join("nyquist_uncertainty.csv"), &unc_csv)?;

    let finite: Vec<f64> = ensemble
        .gap_surrogates
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .collect();
    let bins = histogram_bins(&finite, 20);
    let mut hist_csv = String::from("bin_left,bin_right,count\n");
    for (l, r, c) in &bins {
        let _ = writeln!(hist_csv, "{l},{r},{c}");
    }
    write_file(&out_dir.join("histogram.csv"), &hist_csv)?;

    if opts.svg {
        write_file(
            &out_dir.join("histogram.svg"),
            &svg::histogram("gap surrogate histogram", "max-over-grid kappa", &bins),
        )?;
        let rows: Vec<Vec<f64>> = ensemble
            .kappa
            .iter()
            .filter(|r| !r.is_empty())
            .cloned()
            .collect();
        let trial_axis: Vec<f64> = (0..rows.len()).map(|i| i as f64).collect();
        write_file(
            &out_dir.join("kappa_surface.svg"),
            &svg::heatmap(
                "kappa realizations",
                "omega",
                "trial",
                &ensemble.freq_grid,
                &trial_axis,
                &rows,
            ),
        )?;
    }

    println!(
        "trials = {}, failed = {}, median gap surrogate = {}",
        config.trials,
        ensemble.failed,
        median_surrogate(&ensemble)
    );
    Ok(())
}

fn histogram_bins(values: &[f64], bins: usize) -> Vec<(f64, f64, usize)> {
    if values.is_empty() {
        return Vec::new();
    }
    let hi = values.iter().fold(0.0f64, |m, v| m.max(*v)).max(1e-12) * (1.0 + 1e-9);
    let width = hi / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let idx = ((v / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (i as f64 * width, (i + 1) as f64 * width, c))
        .collect()
}

/// `margin` subcommand: nominal margins and the degradation triple over
/// sampled plant perturbations, plus the grid stability margin on stdout.
pub fn cmd_margin(cfg: &ExperimentConfig, samples: Option<usize>, opts: &CommonOpts) -> Result<()> {
    let plant = cfg.require_plant()?;
    let controller = cfg.require_controller()?;
    let model = cfg.require_density()?;
    let grid = cfg.require_freq_grid()?;
    let out_dir = opts.out_dir(cfg)?;
    let seed = opts.seed(cfg);
    let per_freq = samples.unwrap_or(100);
    if per_freq == 0 {
        return Err(Error::Config("--samples must be at least 1".into()));
    }

    let b = b_margin_grid(&plant, &controller, &grid)?;
    println!("b_margin (grid approximation) = {b}");

    let center = model.mean();
    let mut csv = String::from("omega,rho_nominal,rho,kappa,gap\n");
    for (wi, &omega) in grid.iter().enumerate() {
        let p_nom = eval_freq(&plant, omega)?;
        let c_nom = eval_freq(&controller, omega)?;
        let nominal_fp = FreqPoint::new(omega, p_nom, c_nom)?;
        let rho_nom = rho_or_zero(&nominal_fp);
        let stream = derive(seed, wi as u64);
        for i in 0..per_freq {
            let draw = model.sample_at(stream, i as u64);
            let perturbed = PlanePoint::new(
                p_nom.re + draw.re - center.re,
                p_nom.im + draw.im - center.im,
            );
            let fp = FreqPoint::new(omega, perturbed, c_nom)?;
            let rho_p = rho_or_zero(&fp);
            let kappa = chordal_distance(perturbed, p_nom);
            let gap = degradation_gap(&fp, p_nom);
            if gap < -1e-9 {
                return Err(Error::Precondition(format!(
                    "degradation inequality violated at omega = {omega}: gap = {gap}"
                )));
            }
            let _ = writeln!(csv, "{omega},{rho_nom},{rho_p},{kappa},{gap}");
        }
    }
    write_file(&out_dir.join("margin.csv"), &csv)?;
    Ok(())
}
