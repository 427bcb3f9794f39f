// Sampled check of the product and wedge deformation retractions.

use metric_thickenings::homotopy::{verify_deformation, DeformationTarget, ProductDeformation, WedgeDeformation};
use metric_thickenings::sample::{random_planar_space, rng};
use metric_thickenings::suites::two_segments;
use metric_thickenings::thickening::{thickening_wedge, vietoris_rips};
use metric_thickenings::{PointedThickening, Result, ScaleParameter};

pub fn run_example() -> Result<()> {
    let mut g = rng(5);
    let x = random_planar_space(&mut g, 3, "x");
    let y = random_planar_space(&mut g, 4, "y");
    let s = ScaleParameter::closed(6.0);
    let product = ProductDeformation::new(&vietoris_rips(&x, s), &vietoris_rips(&y, s));
    let report = verify_deformation(DeformationTarget::Product(&product), 50, 1)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    assert!(report.passed());

    let (a, b) = two_segments();
    let s = ScaleParameter::closed(2.0);
    let m = PointedThickening::at_point(vietoris_rips(&a.space, s), a.basepoint)?;
    let n = PointedThickening::at_point(vietoris_rips(&b.space, s), b.basepoint)?;
    let v = vietoris_rips(thickening_wedge(&m, &n)?.thickening.space(), s);
    let wedge = WedgeDeformation::new(&v, &m, &n)?;
    let report = verify_deformation(DeformationTarget::Wedge(&wedge), 50, 1)?;
    println!(
        "wedge: pass = {}, sampled Lipschitz ratio ≤ {:.3}",
        report.passed(),
        report.sampled_lipschitz
    );
    assert!(report.passed());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example runs");
}
