//! Simulate GARCH(1,1)-t paths and report how well joint MLE recovers them.

use std::time::Instant;

use newsvol_core::garch::{fit, simulate, FitOptions};
use newsvol_core::{DMatrix, Distribution, EstimationMode, GarchParams};

fn main() {
    let truth = GarchParams::new(0.0, 0.1, 0.1, 0.8).with_nu(8.0);
    let seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let x = DMatrix::zeros(5000, 0);
    let total = Instant::now();
    for seed in 1..=seeds {
        let start = Instant::now();
        let (y, _) = simulate(&truth, None, 5000, seed, Distribution::StudentT).unwrap();
        let f = fit(&y, &x, Distribution::StudentT, EstimationMode::Joint, &FitOptions::default()).unwrap();
        println!(
            "seed {seed:2}: a1+b1 {:.4} nu {:.3} converged {} iters {} {:.2}s",
            f.params.persistence(),
            f.params.nu.unwrap(),
            f.converged,
            f.iterations,
            start.elapsed().as_secs_f64()
        );
    }
    println!("total {:.1}s", total.elapsed().as_secs_f64());
}
