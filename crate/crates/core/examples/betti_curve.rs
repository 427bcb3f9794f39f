// Betti numbers of the VR complexes of a regular hexagon.

use std::sync::Arc;

use metric_thickenings::homology::betti_curve;
use metric_thickenings::metric_space::Norm;
use metric_thickenings::thickening::Family;
use metric_thickenings::{Convention, MetricSpace, Result};

pub fn run_example() -> Result<()> {
    let coords: Vec<Vec<f64>> = (0..6)
        .map(|k| {
            let a = k as f64 * std::f64::consts::PI / 3.0;
            vec![a.cos(), a.sin()]
        })
        .collect();
    let labels = (0..6).map(|k| format!("h{k}")).collect();
    let hexagon = Arc::new(MetricSpace::from_points(labels, &coords, Norm::L2)?);

    let grid: Vec<f64> = (0..=22).map(|k| k as f64 * 0.1).collect();
    for row in betti_curve(&hexagon, Family::Vr, Convention::Closed, &grid, 3)? {
        println!("r = {:.1}  betti = {}", row.r, row.betti);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example runs");
}
