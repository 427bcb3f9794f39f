// Two unit segments glued at an endpoint: at r = 2 the VR complex of the
// wedge has the extra edge {x, y}, yet its homology matches the glued
// complexes, and the wedge retraction pushes mass onto the basepoint.

use metric_thickenings::homology::betti;
use metric_thickenings::homotopy::{wedge_homotopy, wedge_retract};
use metric_thickenings::metric_space::wedge;
use metric_thickenings::suites::{mixed_faces, two_segments};
use metric_thickenings::thickening::{faces_not_in, thickening_wedge, vietoris_rips};
use metric_thickenings::{FiniteMeasure, PointedThickening, Result, ScaleParameter};

pub fn run_example() -> Result<()> {
    let (x, y) = two_segments();
    let w = wedge(&x, &y);
    let s = ScaleParameter::closed(2.0);

    let direct = vietoris_rips(&w.space, s);
    let m = PointedThickening::at_point(vietoris_rips(&x.space, s), x.basepoint)?;
    let n = PointedThickening::at_point(vietoris_rips(&y.space, s), y.basepoint)?;
    let glued = thickening_wedge(&m, &n)?;

    println!("d(x, y) = {}", w.space.d(1, 2));
    println!("VR(X ∨ Y; 2)       {:?}", direct.complex().canonical_faces());
    println!("VR(X; 2) ∨ VR(Y; 2) {:?}", glued.thickening.complex().canonical_faces());
    println!("extra faces: {:?}", faces_not_in(&direct, &glued.thickening));
    println!("mixed faces: {:?}", mixed_faces(&direct)?);
    let (a, b) = (betti(direct.complex(), 3), betti(glued.thickening.complex(), 3));
    println!("Betti {a} and {b}");
    assert_eq!(a, b);

    let mu = FiniteMeasure::from_labels(w.space.clone(), &[("⋆", 0.25), ("x", 0.25), ("y", 0.5)])?;
    let rho = wedge_retract(&mu)?;
    println!("ρ(¼⋆ + ¼x + ½y) = {:?}", rho.support_labels().iter().zip(rho.atoms()).map(|(l, a)| (*l, a.1)).collect::<Vec<_>>());
    for t in [0.0, 0.5, 1.0] {
        println!("H({t}) = {:?}", wedge_homotopy(t, &mu)?.atoms());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example runs");
}
