// Vietoris–Rips and Čech complexes of a small space across scales.

use std::sync::Arc;

use metric_thickenings::thickening::{cech, vietoris_rips};
use metric_thickenings::{MetricSpace, Result, ScaleParameter};

pub fn run_example() -> Result<()> {
    let x = Arc::new(MetricSpace::new(
        vec!["a".into(), "b".into(), "c".into()],
        vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 2.0], vec![1.0, 2.0, 0.0]],
    )?);
    for r in [0.0, 1.0, 2.0] {
        for s in [ScaleParameter::closed(r), ScaleParameter::open(r)] {
            let vr = vietoris_rips(&x, s);
            let ch = cech(&x, s);
            println!(
                "r = {r} ({:?}): VR {:?}  Čech {:?}",
                s.convention,
                vr.complex().canonical_faces(),
                ch.complex().canonical_faces()
            );
        }
    }
    // At r = 1 the Čech ball around `a` already reaches `b` and `c`.
    let ch = cech(&x, ScaleParameter::closed(1.0));
    assert!(ch.is_face_of_points(&[0, 1, 2]));
    assert!(!vietoris_rips(&x, ScaleParameter::closed(1.0)).is_face_of_points(&[1, 2]));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example runs");
}
