//! End-to-end acceptance: twelve criteria, one PASS/FAIL line each.

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use levy_scl::entropy::{ito_correction, noise_distance, EntropyFamily, M1, M2};
use levy_scl::estimators::ensemble_mean;
use levy_scl::experiments::{
    emit_report, experiment_preset, ExperimentConfig, ExperimentReport, RunOptions, Verdict,
};
use levy_scl::levy_noise::{
    Atom, JumpCoefficient, LevyMeasure, PowerLaw, SeedDerivation, SpatialProfile, StreamPurpose,
};
use levy_scl::solvers::{
    heat_kernel_solution, solve, Field, FluxModel, Grid1D, NumericalFlux, SolverConfig,
};

type Outcome = Result<(bool, String), Box<dyn std::error::Error>>;
type Criterion = (&'static str, fn() -> Outcome);

fn preset(name: &str) -> Result<ExperimentConfig, Box<dyn std::error::Error>> {
    let text = experiment_preset(name).ok_or_else(|| format!("missing preset {name}"))?;
    Ok(ExperimentConfig::parse(text)?)
}

fn run(
    cfg: &ExperimentConfig,
    threads: usize,
) -> Result<ExperimentReport, Box<dyn std::error::Error>> {
    Ok(levy_scl::experiments::run_experiment(
        cfg,
        &RunOptions { threads },
    )?)
}

fn all_threads() -> usize {
    RunOptions::default().threads
}

fn failed_verdicts(report: &ExperimentReport) -> Vec<&Verdict> {
    report.verdicts.iter().filter(|v| !v.passed).collect()
}

fn l1(a: &Field, b: &Field) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs())
        .sum::<f64>()
        * a.grid().dx()
}

fn heat_kernel() -> Outcome {
    let start = Instant::now();
    let grid = Grid1D::new(-8.0, 8.0, 400)?;
    let s = 0.5f64;
    let u0 = Field::from_fn(grid, |x| (-x * x / (2.0 * s * s)).exp());
    let cfg = SolverConfig {
        epsilon: 0.05,
        snapshot_times: vec![0.5],
        ..SolverConfig::default()
    };
    let path = levy_scl::levy_noise::JumpPath::empty(0.5);
    let measure = LevyMeasure::atomic_exact(vec![Atom {
        mark: 1.0,
        weight: 1.0,
    }]);
    let traj = solve(
        &u0,
        &FluxModel::zero(),
        &JumpCoefficient::zero(),
        &measure,
        &cfg,
        &path,
    )?;
    let oracle = heat_kernel_solution(&u0, 0.05, 0.5)?;
    let err = l1(traj.last_snapshot().ok_or("no snapshot")?, &oracle);
    let elapsed = start.elapsed();
    Ok((
        err <= 1e-3 && elapsed < Duration::from_secs(5),
        format!(
            "L1 error {err:.3e} (<= 1e-3), {:.2} s (< 5 s)",
            elapsed.as_secs_f64()
        ),
    ))
}

fn burgers_shock() -> Outcome {
    let (x_min, x_max, t) = (-2.0, 2.0, 1.0);
    let grid = Grid1D::new(x_min, x_max, 400)?;
    let dx = grid.dx();
    let u0 = Field::from_fn(grid, |x| if x < 0.0 { 1.0 } else { 0.0 });
    let cfg = SolverConfig {
        numerical_flux: NumericalFlux::Godunov,
        snapshot_times: vec![t],
        ..SolverConfig::default()
    };
    let measure = LevyMeasure::atomic_exact(vec![Atom {
        mark: 1.0,
        weight: 1.0,
    }]);
    let traj = solve(
        &u0,
        &FluxModel::burgers(),
        &JumpCoefficient::zero(),
        &measure,
        &cfg,
        &levy_scl::levy_noise::JumpPath::empty(t),
    )?;
    let u = traj.last_snapshot().ok_or("no snapshot")?;
    // the periodic wrap adds a rarefaction fan from x_min
    let exact = Field::from_fn(grid, |x| {
        if x < x_min + t {
            (x - x_min) / t
        } else if x < t / 2.0 {
            1.0
        } else {
            0.0
        }
    });
    let err = l1(u, &exact);
    // shock = first crossing of 1/2 to the right of the plateau
    let v = u.values();
    let i = (0..v.len() - 1)
        .find(|&i| grid.center(i) > 0.0 && v[i] >= 0.5 && v[i + 1] < 0.5)
        .ok_or("no shock found")?;
    let (xa, xb) = (grid.center(i), grid.center(i + 1));
    let pos = xa + (v[i] - 0.5) / (v[i] - v[i + 1]) * (xb - xa);
    let off = (pos - t / 2.0).abs();
    Ok((
        off <= 2.0 * dx && err <= 5.0 * dx,
        format!(
            "shock at {pos:.4} (|off| = {:.2} dx <= 2 dx), L1 error {:.2} dx (<= 5 dx)",
            off / dx,
            err / dx
        ),
    ))
}

fn viscosity_rate() -> Outcome {
    let start = Instant::now();
    let report = run(&preset("error_rate")?, all_threads())?;
    let slope = report.row("slope").ok_or("no slope")?.mean;
    let worst_rse = report
        .verdicts
        .iter()
        .filter(|v| v.name.starts_with("relative_std_error"))
        .map(|v| v.value)
        .fold(0.0, f64::max);
    let ok = (0.35..=1.2).contains(&slope) && worst_rse < 0.2 && report.passed();
    Ok((
        ok,
        format!(
            "slope {slope:.3} in [0.35, 1.2], max std_error/mean {worst_rse:.3} (< 0.2), {:.1} s",
            start.elapsed().as_secs_f64()
        ),
    ))
}

fn bv_monotone() -> Outcome {
    let cfg = preset("bv_monotone")?;
    let report = run(&cfg, all_threads())?;
    let mut worst = f64::NEG_INFINITY;
    let mut strict = true;
    for &e in &cfg.eps_list {
        let b0 = report
            .row(&format!("bv{{eps={e},t=0}}"))
            .ok_or("no t=0 row")?
            .mean;
        for &t in &cfg.snapshots {
            let bt = report
                .row(&format!("bv{{eps={e},t={t}}}"))
                .ok_or("no bv row")?
                .mean;
            worst = worst.max(bt / b0);
            strict &= bt <= 1.05 * b0;
        }
    }
    let det = run(&preset("bv_monotone_deterministic")?, all_threads())?;
    let det_failed = failed_verdicts(&det);
    Ok((
        strict && report.passed() && det_failed.is_empty(),
        format!(
            "max E|u(t)|_BV / E|u(0)|_BV = {worst:.4} (<= 1.05); deterministic pathwise: {}",
            if det_failed.is_empty() {
                "ok"
            } else {
                "violated"
            }
        ),
    ))
}

fn noise_dependence() -> Outcome {
    let cfg = preset("continuous_dependence")?;
    let report = run(&cfg, all_threads())?;
    let slope = report.row("slope").ok_or("no slope")?.mean;
    let sweep = cfg.sweep.as_ref().ok_or("no sweep")?;
    let eta = cfg.u.noise;
    let mut ratios = Vec::new();
    for &c in &sweep.values {
        let sigma = eta
            .scaled(1.0 + c)
            .with_lambda_star(eta.lambda_star.max(eta.scale * (1.0 + c)));
        let d = noise_distance(
            &eta,
            &sigma,
            &cfg.measure,
            cfg.distance.u_range,
            cfg.distance.n_u,
        )?;
        ratios.push(d.value / (c * c));
    }
    let spread = ratios
        .iter()
        .map(|r| (r / ratios[0] - 1.0).abs())
        .fold(0.0, f64::max);
    Ok((
        (slope - 0.5).abs() <= 0.15 && spread <= 1e-10,
        format!("slope {slope:.4} (0.5 +- 0.15), D/c^2 relative spread {spread:.1e} (<= 1e-10)"),
    ))
}

fn flux_dependence() -> Outcome {
    let report = run(&preset("continuous_dependence_flux")?, all_threads())?;
    let slope = report.row("slope").ok_or("no slope")?.mean;
    Ok((
        (slope - 1.0).abs() <= 0.2,
        format!("slope {slope:.4} (1.0 +- 0.2)"),
    ))
}

fn beta_invariants() -> Outcome {
    let mut ok = true;
    let mut worst_peak = 0.0f64;
    for xi in [1e-2, 1e-1, 1.0] {
        let fam = EntropyFamily::new(xi)?;
        let n = 1000;
        let mut peak = f64::NEG_INFINITY;
        for j in 0..=n {
            let r = xi * (-10.0 + 20.0 * j as f64 / n as f64);
            let b = fam.beta(r);
            ok &= b <= r.abs() && b >= r.abs() - M1 * xi;
            if r.abs() > xi {
                ok &= fam.beta_second(r) == 0.0;
            }
            peak = peak.max(fam.beta_second(r));
        }
        let at_zero = fam.beta_second(0.0);
        ok &= peak == at_zero;
        let rel = (at_zero - M2 / xi).abs() / (M2 / xi);
        worst_peak = worst_peak.max(rel);
    }
    ok &= worst_peak <= 1e-12;
    Ok((
        ok,
        format!("sandwich and support exact on 3 x 1001 points, max beta'' relative error {worst_peak:.1e}"),
    ))
}

fn ito_nonnegative() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let measures = [
        LevyMeasure::atomic_exact(vec![
            Atom {
                mark: 1.0,
                weight: 2.0,
            },
            Atom {
                mark: -0.3,
                weight: 5.0,
            },
        ]),
        LevyMeasure::density(
            PowerLaw {
                alpha: 0.7,
                scale: 1.0,
                z_max: 2.0,
                symmetric: true,
            },
            1e-3,
        ),
    ];
    let coeffs = [
        JumpCoefficient::linear(0.4),
        JumpCoefficient::tanh(0.6),
        JumpCoefficient::linear(0.3).with_profile(SpatialProfile::Bump {
            center: 0.0,
            width: 0.5,
        }),
    ];
    let mut min = f64::INFINITY;
    for i in 0..10_000 {
        let fam = EntropyFamily::new(rng.random_range(0.01..1.0))?;
        let coeff = &coeffs[i % coeffs.len()];
        let measure = &measures[(i / coeffs.len()) % measures.len()];
        let v = ito_correction(
            &fam,
            coeff,
            measure,
            rng.random_range(-2.0..2.0),
            rng.random_range(-3.0..3.0),
            rng.random_range(-2.0..2.0),
        )?;
        min = min.min(v);
    }
    let unit = LevyMeasure::atomic_exact(vec![Atom {
        mark: 1.0,
        weight: 1.0,
    }]);
    let identity = JumpCoefficient::linear(1.0);
    let worked = ito_correction(&EntropyFamily::new(1.0)?, &identity, &unit, 0.0, 2.0, 0.0)?;
    Ok((
        min >= 0.0 && worked == 0.0,
        format!("min over 10^4 tuples {min:.3e} (>= 0), worked example {worked:e} (== 0)"),
    ))
}

fn mean_mass() -> Outcome {
    let grid = Grid1D::new(-2.0, 2.0, 256)?;
    let u0 = Field::from_fn(grid, |x| if x.abs() < 0.5 { 1.0 } else { 0.0 });
    let measure = LevyMeasure::atomic_exact(vec![Atom {
        mark: 1.0,
        weight: 2.0,
    }]);
    let eta = JumpCoefficient::linear(0.2);
    let times = vec![0.1, 0.2, 0.3, 0.4, 0.5];
    let cfg = SolverConfig {
        epsilon: 0.01,
        snapshot_times: times.clone(),
        ..SolverConfig::default()
    };
    let seeds = SeedDerivation::new(9);
    let m = 256;
    let mut masses = vec![Vec::with_capacity(m); times.len()];
    for p in 0..m {
        let mut rng = seeds.stream(p as u64, StreamPurpose::JumpPath);
        let path = measure.sample_path(measure.cut, 0.5, &mut rng)?;
        let traj = solve(&u0, &FluxModel::burgers(), &eta, &measure, &cfg, &path)?;
        for (j, r) in traj.snapshots.iter().enumerate() {
            masses[j].push(r.field.mass());
        }
    }
    let m0 = u0.mass();
    let mut worst = 0.0f64;
    for col in &masses {
        let s = ensemble_mean(col)?;
        worst = worst.max((s.mean - m0).abs() / s.std_error);
    }
    Ok((
        worst <= 3.0,
        format!("max |E mass(t) - mass(0)| = {worst:.2} std_errors (<= 3)"),
    ))
}

fn entropy_residual() -> Outcome {
    let mut cfg = preset("entropy_check")?;
    let report = run(&cfg, all_threads())?;
    let tol = report.row("tolerance").ok_or("no tolerance")?.mean;
    let worst = cfg
        .entropy
        .k_values
        .iter()
        .map(|k| report.row(&format!("residual{{k={k}}}")).map(|s| s.mean))
        .collect::<Option<Vec<f64>>>()
        .ok_or("missing residual row")?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    cfg.entropy.inject_expansion_shock = true;
    let injected = run(&cfg, all_threads())?;
    let shock = injected
        .row("residual_expansion_shock{k=0}")
        .ok_or("no expansion shock row")?
        .mean;
    Ok((
        worst >= -tol && shock < -0.1,
        format!("min residual {worst:.3e} (>= -{tol:.3e}), expansion shock {shock:.3e} (< -0.1)"),
    ))
}

fn fractional_bv() -> Outcome {
    let report = run(&preset("fractional_bv")?, all_threads())?;
    let r = report.row("exponent").ok_or("no exponent")?.mean;
    let monotone = report
        .verdict("omega_non_decreasing")
        .is_some_and(|v| v.passed);
    let besov = report
        .rows
        .iter()
        .find(|row| row.name.starts_with("besov_u0"))
        .map(|row| row.stat.mean)
        .ok_or("no besov row")?;
    Ok((
        monotone && r > 0.1 && r <= 1.0 && besov.is_finite(),
        format!("omega non-decreasing: {monotone}, exponent {r:.3} in (0.1, 1.0], besov(u0, 0.75) = {besov:.4}"),
    ))
}

fn dir_bytes(dir: &Path) -> std::io::Result<Vec<(String, Vec<u8>)>> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d)? {
            let p = entry?.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap_or(&p).display().to_string();
                out.push((rel, fs::read(&p)?));
            }
        }
    }
    out.sort();
    Ok(out)
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir()?;
    let mut checked = Vec::new();
    for name in ["error_rate", "continuous_dependence", "entropy_check"] {
        let mut cfg = preset(name)?;
        cfg.paths = 16;
        let mut reference: Option<Vec<(String, Vec<u8>)>> = None;
        for (i, threads) in [1, 8, 1, 8].into_iter().enumerate() {
            let dir = tmp.path().join(format!("{name}-{i}"));
            emit_report(&run(&cfg, threads)?, &dir)?;
            let bytes = dir_bytes(&dir)?;
            match &reference {
                None => reference = Some(bytes),
                Some(r) if *r != bytes => {
                    return Ok((
                        false,
                        format!("{name}: output differs at {threads} threads (run {i})"),
                    ));
                }
                Some(_) => {}
            }
        }
        checked.push(name);
    }
    Ok((
        true,
        format!(
            "byte-identical CSV at 1 and 8 workers, twice each: {}",
            checked.join(", ")
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("heat kernel oracle", heat_kernel),
        ("deterministic Burgers shock", burgers_shock),
        ("viscosity rate", viscosity_rate),
        ("BV monotonicity", bv_monotone),
        ("continuous dependence in noise", noise_dependence),
        ("continuous dependence in flux", flux_dependence),
        ("entropy family invariants", beta_invariants),
        ("Ito correction", ito_nonnegative),
        ("mean mass conservation", mean_mass),
        ("entropy residual", entropy_residual),
        ("fractional BV", fractional_bv),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (passed, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failures += 1;
        }
        println!(
            "{} criterion {:>2} {name}: {detail}",
            if passed { "PASS" } else { "FAIL" },
            i + 1
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
