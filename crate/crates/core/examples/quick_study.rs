//! Fits one simulated replicate per slab family and prints timings.
//!
//! `cargo run --release --example quick_study -- [curve] [n] [iterations]`

use std::time::Instant;

use dynmix::gibbs::ChainConfig;
use dynmix::shrinkage::FamilyKind;
use dynmix::simgen::{run_replicate, weight_curve, ScenarioConfig, WeightCurve};

fn main() -> dynmix::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let curve = WeightCurve::parse(args.first().map(String::as_str).unwrap_or("sinusoidal"))?;
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(256);
    let iterations: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(3000);
    for family in [FamilyKind::Gaussian, FamilyKind::Laplace] {
        let chain = ChainConfig {
            iterations,
            burn_in: iterations / 6,
            thin: 5,
            seed: 7,
            family,
            ..ChainConfig::default()
        };
        let scenario = ScenarioConfig::standard(curve.clone(), n, 1, chain);
        let truth = weight_curve(&curve, n)?;
        let start = Instant::now();
        let rep = run_replicate(&scenario, &truth, 0)?;
        let elapsed = start.elapsed();
        let err: f64 = rep
            .alpha_hat
            .iter()
            .zip(&truth)
            .map(|(a, t)| (a - t).abs())
            .sum::<f64>()
            / n as f64;
        println!(
            "{family}: {:.2?} ({:.2} ms/sweep) estimates {:?} mean |alpha error| {err:.3}",
            elapsed,
            elapsed.as_secs_f64() * 1e3 / iterations as f64,
            rep.estimates
        );
    }
    Ok(())
}
