// Exact Wasserstein distances with an optimal plan and its certificate.

use std::sync::Arc;

use metric_thickenings::metric_space::Norm;
use metric_thickenings::wasserstein::{wasserstein, wasserstein_bruteforce};
use metric_thickenings::{FiniteMeasure, MetricSpace, Result, WassersteinConfig};

pub fn run_example() -> Result<()> {
    let coords = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 1.0]];
    let labels = ["o", "e", "n", "f"].iter().map(|s| s.to_string()).collect();
    let x = Arc::new(MetricSpace::from_points(labels, &coords, Norm::L2)?);

    let mu = FiniteMeasure::from_labels(x.clone(), &[("o", 0.5), ("e", 0.5)])?;
    let nu = FiniteMeasure::from_labels(x.clone(), &[("n", 0.25), ("f", 0.75)])?;

    for p in [1.0, 2.0] {
        let config = WassersteinConfig::with_p(p)?;
        let t = wasserstein(&mu, &nu, &config)?;
        let brute = wasserstein_bruteforce(&mu, &nu, &config)?;
        println!("W_{p}(µ, ν) = {:.6} (enumeration: {brute:.6})", t.distance);
        for (from, to, mass) in t.plan.as_ref().expect("finite distance").entries() {
            println!("  {from} -> {to}: {mass}");
        }
        assert!(t.is_certified_optimal(&config));
        assert!((t.distance - brute).abs() < 1e-9);
    }

    let d = wasserstein(
        &FiniteMeasure::delta(x.clone(), 0)?,
        &FiniteMeasure::delta(x.clone(), 3)?,
        &WassersteinConfig::default(),
    )?;
    assert_eq!(d.distance, x.d(0, 3));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example runs");
}
