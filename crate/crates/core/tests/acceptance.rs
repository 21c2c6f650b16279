//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.
//!
//! Criterion 8 (full-scale Monte Carlo, hours of CPU) runs only with
//! `DYNMIX_FULL_SCALE=1`.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::*;
use dynmix::distributions::{standard_normal, RngStream};
use dynmix::gibbs::{default_priors_from_data, run_chain, ChainConfig};
use dynmix::inference::point_estimates;
use dynmix::shrinkage::*;
use dynmix::simgen::{
    band_coverage, generate_series, run_monte_carlo, weight_curve, ScenarioConfig, StudyResult,
    WeightCurve,
};
use dynmix::wavelet::{dwt, idwt, WaveletFilter};
use rand::Rng;

type Outcome = Result<String, String>;
type Check = fn() -> Result<(), String>;
/// (mean, lower, upper)
type Cell = (f64, f64, f64);

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    let note = format!("{:.1} s", took.as_secs_f64());
    match (out, limit) {
        (Ok(msg), Some(l)) if took > l => {
            Err(format!("{msg}; took {note}, limit {} s", l.as_secs()))
        }
        (Ok(msg), _) => Ok(format!("{msg}; {note}")),
        (Err(msg), _) => Err(format!("{msg}; {note}")),
    }
}

fn transform() -> Outcome {
    let f = WaveletFilter::coif3();
    let mut worst_orth: f64 = 0.0;
    let mut worst_trip: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    for n in [64usize, 128, 256] {
        // Columns of W from the naive convolution oracle.
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                naive_dwt(&e, f.lowpass())
            })
            .collect();
        for i in 0..n {
            for j in i..n {
                let dot: f64 = (0..n).map(|k| cols[k][i] * cols[k][j]).sum();
                worst_orth = worst_orth.max((dot - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        let mut rng = RngStream::new(1, n as u64);
        for _ in 0..100 {
            let y: Vec<f64> = (0..n).map(|_| standard_normal(&mut rng)).collect();
            let c = dwt(&y, &f).map_err(|e| e.to_string())?;
            let back = idwt(&c, &f).map_err(|e| e.to_string())?;
            worst_trip = worst_trip.max(
                y.iter()
                    .zip(&back)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max),
            );
            let want = naive_dwt(&y, f.lowpass());
            worst_oracle = worst_oracle.max(
                c.as_slice()
                    .iter()
                    .zip(&want)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max),
            );
        }
    }
    let msg = format!(
        "max|WW'-I| {worst_orth:.1e}, roundtrip {worst_trip:.1e}, dwt vs oracle {worst_oracle:.1e}"
    );
    if worst_orth < 1e-8 && worst_trip < 1e-10 && worst_oracle < 1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn shrinkage_math() -> Outcome {
    let mut worst: f64 = 0.0;
    for a in [0.1, 0.5, 1.0, 3.0] {
        for d in [0.0, 0.5, -0.5, 2.0, -2.0, 8.0, -8.0, 30.0, -30.0] {
            let want = laplace_marginal_quadrature(d, a);
            let got = log_marginal_density(d, SlabFamily::Laplace { scale: a }).exp();
            worst = worst.max(((got - want) / want).abs());
        }
    }
    let eta: f64 = [0.1, 0.5, 1.0, 3.0]
        .iter()
        .map(|&a| (eta_weight(0.0, a) - 0.5).abs())
        .fold(0.0, f64::max);
    let post = posterior_spike_weight(0.0, 0.5, SlabFamily::Gaussian { variance: 1.0 });
    let post_err = (post - 1.0 / (1.0 + 2f64.sqrt())).abs();
    let msg = format!("g_a rel err {worst:.1e}, eta(0) err {eta:.1e}, pi_post err {post_err:.1e}");
    if worst < 1e-8 && eta < 1e-12 && post_err < 1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn full_conditionals() -> Outcome {
    let checks: [(&str, Check); 4] = [
        ("z", conditionals::allocations),
        ("l", conditionals::latents),
        ("mu/tau2", conditionals::component_params),
        ("theta", conditionals::coefficients),
    ];
    let mut fails = vec![];
    for (name, check) in checks {
        if let Err(e) = check() {
            fails.push(format!("{name}: {e}"));
        }
    }
    if fails.is_empty() {
        Ok(format!(
            "z, l, mu, tau2, theta match over {} draws",
            conditionals::DRAWS
        ))
    } else {
        Err(fails.join("; "))
    }
}

fn optimizer() -> Outcome {
    let mut rng = RngStream::new(4, 0);
    let mut worst_gap = f64::NEG_INFINITY;
    for kind in [FamilyKind::Gaussian, FamilyKind::Laplace] {
        for _ in 0..20 {
            let pi: f64 = rng.random_range(0.0..1.0);
            let sd: f64 = rng.random_range(0.2..8.0);
            let level: Vec<f64> = (0..64)
                .map(|_| {
                    let s = if rng.random::<f64>() < pi {
                        sd * standard_normal(&mut rng)
                    } else {
                        0.0
                    };
                    s + standard_normal(&mut rng)
                })
                .collect();
            let fit = fit_level_hyperparams(&level, kind).map_err(|e| e.to_string())?;
            let ll =
                log_marginal_likelihood(&level, fit.pi, fit.slab).map_err(|e| e.to_string())?;
            worst_gap = worst_gap.max(grid_best(&level, kind) - ll);
        }
    }
    let msg = format!("worst (grid best - fitted) {worst_gap:.2e} over 40 levels");
    if worst_gap <= 1e-6 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn desk_chain(family: FamilyKind) -> ChainConfig {
    ChainConfig {
        iterations: 3000,
        burn_in: 500,
        thin: 5,
        seed: 2024,
        family,
        ..ChainConfig::default()
    }
}

fn study(
    curve: WeightCurve,
    n: usize,
    replicates: usize,
    chain: ChainConfig,
) -> Result<StudyResult, String> {
    run_monte_carlo(&ScenarioConfig::standard(curve, n, replicates, chain))
        .map_err(|e| e.to_string())
}

fn column_means(s: &StudyResult) -> [f64; 4] {
    let r = s.replicates.len() as f64;
    let mut m = [0.0; 4];
    for rep in &s.replicates {
        for (acc, v) in m.iter_mut().zip(rep.estimates) {
            *acc += v / r;
        }
    }
    m
}

fn desk_monte_carlo(sinusoid: &BTreeMap<&'static str, StudyResult>) -> Outcome {
    let mut lines = vec![];
    let mut ok = true;
    for (name, s) in sinusoid {
        let [m1, t1, m2, t2] = column_means(s);
        let pass = m1.abs() <= 0.1
            && (m2 - 2.0).abs() <= 0.1
            && (t1 - 4.0).abs() <= 0.8
            && (t2 - 4.0).abs() <= 0.8;
        ok &= pass && s.replicates.len() == 30;
        lines.push(format!(
            "{name}: mu1 {m1:.3} tau2_1 {t1:.3} mu2 {m2:.3} tau2_2 {t2:.3} ({} replicates)",
            s.replicates.len()
        ));
    }
    if ok {
        Ok(lines.join(", "))
    } else {
        Err(lines.join(", "))
    }
}

fn curve_recovery(sinusoid: &BTreeMap<&'static str, StudyResult>) -> Outcome {
    let mut lines = vec![];
    let mut ok = true;
    for (name, s) in sinusoid {
        let cov = band_coverage(&s.alpha_band);
        ok &= cov >= 0.8;
        lines.push(format!("{name} sinusoid coverage {cov:.3}"));
    }
    for family in [FamilyKind::Gaussian, FamilyKind::Laplace] {
        let s = study(WeightCurve::bumps(), 256, 30, desk_chain(family))?;
        let zeros: Vec<usize> = (0..s.truth.len()).filter(|&t| s.truth[t] == 0.0).collect();
        let mut total = 0.0;
        for rep in &s.replicates {
            total += zeros.iter().map(|&t| rep.alpha_hat[t]).sum::<f64>();
        }
        let m = total / (zeros.len() * s.replicates.len()) as f64;
        ok &= m < 0.15 && !zeros.is_empty();
        lines.push(format!(
            "{} bumps mean alpha on {} true zeros {m:.4}",
            family.acronym(),
            zeros.len()
        ));
    }
    if ok {
        Ok(lines.join(", "))
    } else {
        Err(lines.join(", "))
    }
}

fn static_weight() -> Outcome {
    let truth =
        weight_curve(&WeightCurve::Constant { level: 0.5 }, 256).map_err(|e| e.to_string())?;
    let mut rng = RngStream::new(7, 0);
    let y = generate_series(&mut rng, &truth, [0.0, 2.0], [4.0, 4.0])
        .map_err(|e| e.to_string())?
        .y;
    let priors = default_priors_from_data(&y).map_err(|e| e.to_string())?;
    let mut lines = vec![];
    let mut ok = true;
    for family in [FamilyKind::Gaussian, FamilyKind::Laplace] {
        let chains = run_chain(&y, &desk_chain(family), &priors).map_err(|e| e.to_string())?;
        let alpha = point_estimates(&chains).map_err(|e| e.to_string())?.alpha;
        let avg = mean(&alpha);
        ok &= (avg - 0.5).abs() <= 0.1;
        lines.push(format!("{} time-averaged alpha {avg:.4}", family.acronym()));
    }
    if ok {
        Ok(lines.join(", "))
    } else {
        Err(lines.join(", "))
    }
}

/// Full-scale sinusoidal reference values for mu1, tau2_1, mu2, tau2_2.
const FULL_SCALE_REFERENCE: [(&str, [Cell; 4]); 2] = [
    (
        "SSG",
        [
            (0.00, -0.04, 0.06),
            (4.00, 3.58, 4.65),
            (2.00, 1.95, 2.04),
            (4.00, 3.40, 4.59),
        ],
    ),
    (
        "SSL",
        [
            (0.00, -0.05, 0.05),
            (4.05, 3.50, 4.62),
            (2.00, 1.95, 2.04),
            (3.99, 3.49, 4.50),
        ],
    ),
];

fn full_scale() -> Outcome {
    let mut lines = vec![];
    let mut ok = true;
    for (family, (name, rows)) in [FamilyKind::Gaussian, FamilyKind::Laplace]
        .into_iter()
        .zip(FULL_SCALE_REFERENCE)
    {
        let chain = ChainConfig {
            seed: 2024,
            family,
            ..ChainConfig::default()
        };
        let s = study(WeightCurve::Sinusoidal, 1024, 1000, chain)?;
        for (c, (m, lo, hi)) in rows.iter().enumerate() {
            let got = s.summary[c];
            let pass = (got.mean - m).abs() <= 0.05
                && (got.lower - lo).abs() <= 0.1
                && (got.upper - hi).abs() <= 0.1;
            ok &= pass;
            lines.push(format!(
                "{name} {}: {:.2} ({:.2};{:.2}) vs {m:.2} ({lo:.2};{hi:.2})",
                dynmix::inference::PARAMETER_NAMES[c],
                got.mean,
                got.lower,
                got.upper
            ));
        }
    }
    if ok {
        Ok(lines.join(", "))
    } else {
        Err(lines.join(", "))
    }
}

fn dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .into_iter()
        .flatten()
        .flatten()
        .map(|e| {
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap_or_default(),
            )
        })
        .collect()
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = tmp.path();
    let bin = env!("CARGO_BIN_EXE_dynmix");
    let run = |args: Vec<std::ffi::OsString>| -> Result<(), String> {
        let out = Command::new(bin)
            .args(&args)
            .output()
            .map_err(|e| e.to_string())?;
        if out.status.success() {
            Ok(())
        } else {
            Err(format!(
                "{:?}: {}",
                args,
                String::from_utf8_lossy(&out.stderr).trim()
            ))
        }
    };
    let os = |items: &[&str]| {
        items
            .iter()
            .map(Into::into)
            .collect::<Vec<std::ffi::OsString>>()
    };
    let p = |name: &str| d.join(name).into_os_string();

    let mut a = os(&[
        "simulate", "--curve", "bumps", "--n", "128", "--seed", "11", "--out",
    ]);
    a.push(p("simulate"));
    run(a)?;
    let mut a = os(&[
        "fit",
        "--value-column",
        "y",
        "--iterations",
        "400",
        "--burn-in",
        "100",
        "--input",
    ]);
    a.push(d.join("simulate").join("series.csv").into_os_string());
    a.extend(os(&["--out"]));
    a.push(p("fit"));
    run(a)?;
    let mut a = os(&[
        "mc",
        "--n",
        "32",
        "--replicates",
        "20",
        "--iterations",
        "200",
        "--burn-in",
        "50",
        "--out",
    ]);
    a.push(p("mc"));
    run(a)?;

    let mut checked = vec![];
    for (dir, cmd) in [("simulate", "simulate"), ("fit", "fit"), ("mc", "mc")] {
        let mut a = os(&[cmd, "--config"]);
        a.push(d.join(dir).join("metadata.json").into_os_string());
        a.extend(os(&["--out"]));
        a.push(p(&format!("{dir}-rerun")));
        run(a)?;
        let first = dir_bytes(&d.join(dir));
        let second = dir_bytes(&d.join(format!("{dir}-rerun")));
        if first.is_empty() || first != second {
            return Err(format!("{cmd}: rerun from metadata differs"));
        }
        checked.push(format!("{cmd} ({} files)", first.len()));
    }
    Ok(format!("identical reruns: {}", checked.join(", ")))
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |n: u32, out: Outcome| match out {
        Ok(msg) => println!("criterion {n}: PASS  {msg}"),
        Err(msg) => {
            failed += 1;
            println!("criterion {n}: FAIL  {msg}");
        }
    };
    report(1, timed(Some(Duration::from_secs(5)), transform));
    report(2, timed(Some(Duration::from_secs(10)), shrinkage_math));
    report(3, timed(Some(Duration::from_secs(120)), full_conditionals));
    report(4, timed(Some(Duration::from_secs(60)), optimizer));

    let start = Instant::now();
    let mut sinusoid = BTreeMap::new();
    let mut mc_error = None;
    for family in [FamilyKind::Gaussian, FamilyKind::Laplace] {
        match study(WeightCurve::Sinusoidal, 256, 30, desk_chain(family)) {
            Ok(s) => {
                sinusoid.insert(family.acronym(), s);
            }
            Err(e) => mc_error = Some(e),
        }
    }
    let elapsed = start.elapsed();
    let five = match mc_error {
        Some(e) => Err(e),
        None => desk_monte_carlo(&sinusoid),
    };
    report(
        5,
        five.map(|m| format!("{m}; {:.0} s (target 900 s)", elapsed.as_secs_f64()))
            .and_then(|m| {
                if elapsed > Duration::from_secs(900) {
                    Err(m)
                } else {
                    Ok(m)
                }
            }),
    );
    report(6, timed(None, || curve_recovery(&sinusoid)));
    report(7, timed(None, static_weight));
    if std::env::var("DYNMIX_FULL_SCALE").is_ok_and(|v| v == "1") {
        report(8, timed(None, full_scale));
    } else {
        println!("criterion 8: SKIPPED  full-scale run; set DYNMIX_FULL_SCALE=1 to run it");
    }
    report(9, timed(None, determinism));

    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
