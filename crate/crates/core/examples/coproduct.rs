// Disjoint unions: complexes split along the components, and measures on
// different components are at infinite Wasserstein distance.

use metric_thickenings::metric_space::coproduct;
use metric_thickenings::sample::{random_planar_space, rng};
use metric_thickenings::thickening::{thickening_coproduct, vietoris_rips};
use metric_thickenings::wasserstein::wasserstein;
use metric_thickenings::{FiniteMeasure, Result, ScaleParameter, WassersteinConfig};

pub fn run_example() -> Result<()> {
    let mut rng = rng(11);
    let x = random_planar_space(&mut rng, 3, "a");
    let y = random_planar_space(&mut rng, 3, "b");
    let xy = coproduct(&x, &y);
    println!("flavor of X ⊔ Y: {:?}", xy.flavor());

    let s = ScaleParameter::closed(1e6);
    let direct = vietoris_rips(&xy, s);
    let summed = thickening_coproduct(&vietoris_rips(&x, s), &vietoris_rips(&y, s));
    println!("VR(X ⊔ Y) = {:?}", direct.complex().canonical_faces());
    assert!(direct.complex().same_faces(summed.complex()));

    let left = FiniteMeasure::uniform(xy.clone(), &[0, 1])?;
    let right = FiniteMeasure::delta(xy.clone(), 4)?;
    let t = wasserstein(&left, &right, &WassersteinConfig::default())?;
    println!("W(left, right) = {}", t.distance);
    assert!(t.distance.is_infinite() && t.plan.is_none());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example runs");
}
