// VR of an L∞ product equals the product of the VR complexes, and the
// product homotopy on a sample measure.

use metric_thickenings::homotopy::{product_homotopy, product_retract};
use metric_thickenings::metric_space::linf_product;
use metric_thickenings::sample::{random_measure_on, random_planar_space, rng};
use metric_thickenings::simplicial_complex::product;
use metric_thickenings::suites::{critical_grid, GRID_EPS};
use metric_thickenings::thickening::{contains, thickening_product, vietoris_rips};
use metric_thickenings::{Result, ScaleParameter};

pub fn run_example() -> Result<()> {
    let mut rng = rng(7);
    let x = random_planar_space(&mut rng, 4, "x");
    let y = random_planar_space(&mut rng, 3, "y");
    let xy = linf_product(&x, &y);

    let grid = critical_grid([x.as_ref(), y.as_ref()], GRID_EPS);
    for &r in &grid {
        let s = ScaleParameter::closed(r);
        let direct = vietoris_rips(&xy, s);
        let factored = product(vietoris_rips(&x, s).complex(), vietoris_rips(&y, s).complex());
        assert!(direct.complex().same_faces(&factored), "differ at r = {r}");
    }
    println!("VR(X × Y; r) = VR(X; r) × VR(Y; r) at all {} grid scales", grid.len());

    let s = ScaleParameter::closed(grid[grid.len() / 2]);
    let p = thickening_product(&vietoris_rips(&x, s), &vietoris_rips(&y, s));
    let face = p.maximal_point_faces().into_iter().max_by_key(Vec::len).expect("nonempty");
    let alpha = random_measure_on(&mut rng, p.space(), &face);
    let (mu, nu) = product_retract(&alpha)?;
    println!("α = {:?}", alpha.atoms());
    println!("marginals: {:?} and {:?}", mu.atoms(), nu.atoms());
    for t in [0.0, 0.5, 1.0] {
        let h = product_homotopy(t, &alpha)?;
        assert!(contains(&p, &h)?);
        println!("H({t}) has {} atoms", h.atoms().len());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example runs");
}
