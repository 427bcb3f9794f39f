//! Seeded verification suites. Each suite draws its instances from a
//! single seed and reports every failed check with a witness.

use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::homology::{betti, boundary_squares_to_zero};
use crate::homotopy::{verify_deformation, DeformationTarget, HomotopyReport, ProductDeformation, WedgeDeformation};
use crate::measure::FiniteMeasure;
use crate::metric_space::{self, linf_product, MetricSpace, PointedMetricSpace, WedgeOrigin};
use crate::sample::{random_measure_on, random_planar_space, random_support, rng};
use crate::simplicial_complex::{self, DEFAULT_DIM_CAP};
use crate::thickening::{
    faces_not_in, thickening_coproduct, thickening_wedge, Convention, Family, PointedThickening,
    ScaleParameter,
};
use crate::wasserstein::{is_coupling, wasserstein, wasserstein_bruteforce, WassersteinConfig};

/// Offset used to straddle each critical distance in scale grids.
pub const GRID_EPS: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    ProductIso,
    CechProductIso,
    WedgeBetti,
    WedgeStrictContainment,
    Coproduct,
    MetricAxioms,
    HomotopyProduct,
    HomotopyWedge,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::ProductIso,
        Suite::CechProductIso,
        Suite::WedgeBetti,
        Suite::WedgeStrictContainment,
        Suite::Coproduct,
        Suite::MetricAxioms,
        Suite::HomotopyProduct,
        Suite::HomotopyWedge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::ProductIso => "product-iso",
            Suite::CechProductIso => "cech-product-iso",
            Suite::WedgeBetti => "wedge-betti",
            Suite::WedgeStrictContainment => "wedge-strict-containment",
            Suite::Coproduct => "coproduct",
            Suite::MetricAxioms => "metric-axioms",
            Suite::HomotopyProduct => "homotopy-product",
            Suite::HomotopyWedge => "homotopy-wedge",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Random instances (space pairs) per suite.
    pub instances: usize,
    /// Samples per instance for the measure-based suites.
    pub samples: usize,
    pub dim_cap: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            instances: 10,
            samples: 100,
            dim_cap: DEFAULT_DIM_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub seed: u64,
    pub pass: bool,
    pub checks: usize,
    pub failures: Vec<String>,
    /// A face exhibiting strict containment, where the suite asks for one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub homotopy: Vec<HomotopyReport>,
    /// Largest deviation seen in a tolerance-based check.
    pub max_error: f64,
}

impl SuiteReport {
    fn new(suite: Suite, seed: u64) -> Self {
        SuiteReport {
            suite: suite.name(),
            seed,
            pass: true,
            checks: 0,
            failures: Vec::new(),
            witness: None,
            homotopy: Vec::new(),
            max_error: 0.0,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.pass = false;
            self.failures.push(what());
        }
    }
}

/// `0` and every finite distance `d` of the spaces together with `d ± ε`,
/// sorted and deduplicated. Negative entries are skipped.
pub fn critical_grid<'a>(spaces: impl IntoIterator<Item = &'a MetricSpace>, eps: f64) -> Vec<f64> {
    let mut grid = vec![0.0];
    for x in spaces {
        for d in x.distinct_distances().into_iter().filter(|d| d.is_finite()) {
            grid.extend([d - eps, d, d + eps].into_iter().filter(|&r| r >= 0.0));
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

const CONVENTIONS: [Convention; 2] = [Convention::Closed, Convention::Open];

pub fn run_suite(suite: Suite, config: &SuiteConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(suite, config.seed);
    match suite {
        Suite::ProductIso => product_iso(Family::Vr, config, &mut report),
        Suite::CechProductIso => product_iso(Family::Cech, config, &mut report),
        Suite::WedgeBetti => wedge_betti(config, &mut report)?,
        Suite::WedgeStrictContainment => strict_containment(config, &mut report)?,
        Suite::Coproduct => coproduct(config, &mut report),
        Suite::MetricAxioms => metric_axioms(config, &mut report)?,
        Suite::HomotopyProduct => homotopy_product(config, &mut report)?,
        Suite::HomotopyWedge => homotopy_wedge(config, &mut report)?,
    }
    Ok(report)
}

fn product_iso(family: Family, config: &SuiteConfig, report: &mut SuiteReport) {
    let mut rng = rng(config.seed);
    for inst in 0..config.instances {
        let nx = rng.gen_range(4..=6);
        let ny = rng.gen_range(4..=6);
        let x = random_planar_space(&mut rng, nx, "x");
        let y = random_planar_space(&mut rng, ny, "y");
        let xy = linf_product(&x, &y);
        for r in critical_grid([x.as_ref(), y.as_ref()], GRID_EPS) {
            for conv in CONVENTIONS {
                let s = ScaleParameter::new(r, conv).expect("grid is nonnegative");
                let direct = family.build(&xy, s);
                let factored = simplicial_complex::product(family.build(&x, s).complex(), family.build(&y, s).complex());
                report.check(direct.complex().same_faces(&factored), || {
                    format!(
                        "instance {inst}, r={r}, {conv:?}: complexes differ, e.g. {:?}",
                        direct.complex().canonical_faces().symmetric_difference(&factored.canonical_faces()).next()
                    )
                });
            }
        }
    }
}

fn random_pointed<R: Rng>(rng: &mut R, lo: usize, hi: usize, prefix: &str) -> PointedMetricSpace {
    let n = rng.gen_range(lo..=hi);
    let x = random_planar_space(rng, n, prefix);
    let base = rng.gen_range(0..n);
    PointedMetricSpace::new(x, base).expect("basepoint in range")
}

fn pointed_thickening(family: Family, x: &PointedMetricSpace, s: ScaleParameter) -> PointedThickening {
    PointedThickening::at_point(family.build(&x.space, s), x.basepoint).expect("basepoint in range")
}

/// Betti vectors of `F(X ∨ Y)` against `F(X) ∨ F(Y)` over the whole
/// critical grid of the wedge.
fn compare_wedge_betti(
    x: &PointedMetricSpace,
    y: &PointedMetricSpace,
    cap: usize,
    label: &str,
    report: &mut SuiteReport,
) -> Result<()> {
    let w = metric_space::wedge(x, y);
    for r in critical_grid([w.space.as_ref()], GRID_EPS) {
        for conv in CONVENTIONS {
            let s = ScaleParameter::new(r, conv)?;
            let direct = Family::Vr.build(&w.space, s);
            let glued = thickening_wedge(&pointed_thickening(Family::Vr, x, s), &pointed_thickening(Family::Vr, y, s))?;
            let (a, b) = (betti(direct.complex(), cap), betti(glued.thickening.complex(), cap));
            report.check(a == b, || format!("{label}, r={r}, {conv:?}: Betti {a} vs {b}"));
            for k in [direct.complex(), glued.thickening.complex()] {
                let bad = boundary_squares_to_zero(k, cap)?;
                report.check(bad.is_none(), || format!("{label}, r={r}: ∂∘∂ ≠ 0 in dimension {bad:?}"));
            }
        }
    }
    Ok(())
}

fn wedge_betti(config: &SuiteConfig, report: &mut SuiteReport) -> Result<()> {
    let mut rng = rng(config.seed);
    for inst in 0..config.instances {
        let x = random_pointed(&mut rng, 3, 5, "x");
        let y = random_pointed(&mut rng, 3, 5, "y");
        compare_wedge_betti(&x, &y, config.dim_cap, &format!("instance {inst}"), report)?;
    }
    Ok(())
}

/// Two unit segments glued at an endpoint: the spaces of the strict
/// containment example.
pub fn two_segments() -> (PointedMetricSpace, PointedMetricSpace) {
    let seg = |far: &str| {
        let x = MetricSpace::new(vec!["s".into(), far.into()], vec![vec![0.0, 1.0], vec![1.0, 0.0]])
            .expect("valid segment");
        PointedMetricSpace::new(Arc::new(x), 0).expect("basepoint in range")
    };
    (seg("x"), seg("y"))
}

/// Smallest faces of `F(X ∨ Y)` meeting both sides, which the glued
/// complex cannot contain.
pub fn mixed_faces(direct: &crate::thickening::Thickening) -> Result<Vec<Vec<String>>> {
    let sides = match direct.space().provenance() {
        metric_space::SpaceProvenance::Wedge { origin, .. } => origin.clone(),
        _ => return Err(Error::domain("not a wedge space")),
    };
    let mut out = Vec::new();
    for i in 0..sides.len() {
        for j in (i + 1)..sides.len() {
            let mixed = matches!(
                (sides[i], sides[j]),
                (WedgeOrigin::Left(_), WedgeOrigin::Right(_)) | (WedgeOrigin::Right(_), WedgeOrigin::Left(_))
            );
            if mixed && direct.is_face_of_points(&[i, j]) {
                let mut f = vec![direct.space().label(i).to_owned(), direct.space().label(j).to_owned()];
                f.sort();
                out.push(f);
            }
        }
    }
    Ok(out)
}

fn strict_containment(config: &SuiteConfig, report: &mut SuiteReport) -> Result<()> {
    let (x, y) = two_segments();
    let s = ScaleParameter::closed(2.0);
    let w = metric_space::wedge(&x, &y);
    let direct = Family::Vr.build(&w.space, s);
    let glued = thickening_wedge(&pointed_thickening(Family::Vr, &x, s), &pointed_thickening(Family::Vr, &y, s))?;
    let dxy = w.space.d(
        w.space.index_of("x").expect("x survives the wedge"),
        w.space.index_of("y").expect("y survives the wedge"),
    );
    report.check(dxy == 2.0, || format!("d(x,y) = {dxy}, expected 2"));
    report.check(glued.thickening.complex().is_subcomplex_of(direct.complex()), || {
        "glued wedge is not a subcomplex".into()
    });
    let extra = faces_not_in(&direct, &glued.thickening);
    report.check(!extra.is_empty(), || "containment is not strict".into());
    let mixed = mixed_faces(&direct)?;
    report.check(mixed == vec![vec!["x".to_owned(), "y".to_owned()]], || {
        format!("mixed faces {mixed:?}, expected [[x, y]]")
    });
    report.witness = mixed.into_iter().next();
    let (a, b) = (betti(direct.complex(), config.dim_cap), betti(glued.thickening.complex(), config.dim_cap));
    report.check(a == b, || format!("Betti {a} vs {b} at r = 2"));
    Ok(())
}

fn coproduct(config: &SuiteConfig, report: &mut SuiteReport) {
    let mut rng = rng(config.seed);
    for inst in 0..config.instances {
        let nx = rng.gen_range(3..=5);
        let ny = rng.gen_range(3..=5);
        let x = random_planar_space(&mut rng, nx, "a");
        // Every other instance reuses the labels, to exercise relabelling.
        let y = random_planar_space(&mut rng, ny, if inst % 2 == 0 { "b" } else { "a" });
        let xy = metric_space::coproduct(&x, &y);
        for r in critical_grid([x.as_ref(), y.as_ref()], GRID_EPS) {
            for conv in CONVENTIONS {
                for family in [Family::Vr, Family::Cech] {
                    let s = ScaleParameter::new(r, conv).expect("grid is nonnegative");
                    let direct = family.build(&xy, s);
                    let summed = thickening_coproduct(&family.build(&x, s), &family.build(&y, s));
                    report.check(direct.complex().same_faces(summed.complex()), || {
                        format!("instance {inst}, {family:?}, r={r}, {conv:?}: complexes differ")
                    });
                }
            }
        }
    }
}

fn metric_axioms(config: &SuiteConfig, report: &mut SuiteReport) -> Result<()> {
    let mut rng = rng(config.seed);
    let tol = 1e-9;
    let brute_tol = 1e-6;
    for sample in 0..config.samples {
        let x = random_planar_space(&mut rng, 5, "p");
        let measures: Vec<FiniteMeasure> = (0..3)
            .map(|_| {
                let s = random_support(&mut rng, &x, 5);
                random_measure_on(&mut rng, &x, &s)
            })
            .collect();
        let (mu, nu, eta) = (&measures[0], &measures[1], &measures[2]);
        for p in [1.0, 2.0] {
            let cfg = WassersteinConfig::with_p(p)?;
            let w = |a: &FiniteMeasure, b: &FiniteMeasure| wasserstein(a, b, &cfg);
            let self_d = w(mu, mu)?.distance;
            report.check(self_d == 0.0, || format!("sample {sample}, p={p}: W(µ,µ) = {self_d}"));
            let t_mn = w(mu, nu)?;
            let (d_mn, d_nm) = (t_mn.distance, w(nu, mu)?.distance);
            let (d_ne, d_me) = (w(nu, eta)?.distance, w(mu, eta)?.distance);
            report.max_error = report.max_error.max((d_mn - d_nm).abs());
            report.check((d_mn - d_nm).abs() <= tol, || {
                format!("sample {sample}, p={p}: asymmetric {d_mn} vs {d_nm}")
            });
            report.check(d_me <= d_mn + d_ne + tol, || {
                format!("sample {sample}, p={p}: triangle {d_me} > {d_mn} + {d_ne}")
            });
            report.check(t_mn.is_certified_optimal(&cfg), || {
                format!("sample {sample}, p={p}: plan fails its optimality certificate")
            });
            if let Some(plan) = &t_mn.plan {
                let c = is_coupling(plan, tol);
                report.check(c.is_coupling(), || format!("sample {sample}, p={p}: {c:?}"));
            }
            if mu.atoms().len() <= 3 && nu.atoms().len() <= 3 {
                let b = wasserstein_bruteforce(mu, nu, &cfg)?;
                report.max_error = report.max_error.max((b - d_mn).abs());
                report.check((b - d_mn).abs() <= brute_tol, || {
                    format!("sample {sample}, p={p}: simplex {d_mn} vs enumeration {b}")
                });
            }
        }
    }
    Ok(())
}

fn homotopy_product(config: &SuiteConfig, report: &mut SuiteReport) -> Result<()> {
    let mut rng = rng(config.seed);
    for inst in 0..config.instances {
        let nx = rng.gen_range(3..=4);
        let ny = rng.gen_range(3..=4);
        let x = random_planar_space(&mut rng, nx, "x");
        let y = random_planar_space(&mut rng, ny, "y");
        let family = if inst % 2 == 0 { Family::Vr } else { Family::Cech };
        let grid = critical_grid([x.as_ref(), y.as_ref()], 0.0);
        let s = ScaleParameter::closed(grid[rng.gen_range(0..grid.len())]);
        let d = ProductDeformation::new(&family.build(&x, s), &family.build(&y, s));
        let seed = config.seed.wrapping_add(inst as u64);
        let h = verify_deformation(DeformationTarget::Product(&d), config.samples, seed)?;
        report.check(h.passed(), || format!("instance {inst}: {:?}", h.failures.first()));
        report.max_error = report.max_error.max(h.max_retraction_error).max(h.max_endpoint_error);
        report.homotopy.push(h);
    }
    Ok(())
}

fn homotopy_wedge(config: &SuiteConfig, report: &mut SuiteReport) -> Result<()> {
    let mut rng = rng(config.seed);
    for inst in 0..config.instances {
        let (x, y, s) = if inst == 0 {
            let (x, y) = two_segments();
            (x, y, ScaleParameter::closed(2.0))
        } else {
            let x = random_pointed(&mut rng, 3, 4, "x");
            let y = random_pointed(&mut rng, 3, 4, "y");
            let w = metric_space::wedge(&x, &y);
            let grid = critical_grid([w.space.as_ref()], 0.0);
            (x, y, ScaleParameter::closed(grid[rng.gen_range(0..grid.len())]))
        };
        let m = pointed_thickening(Family::Vr, &x, s);
        let n = pointed_thickening(Family::Vr, &y, s);
        let w = thickening_wedge(&m, &n)?;
        let v = Family::Vr.build(w.thickening.space(), s);
        let d = WedgeDeformation::new(&v, &m, &n)?;
        let seed = config.seed.wrapping_add(inst as u64);
        let h = verify_deformation(DeformationTarget::Wedge(&d), config.samples, seed)?;
        report.check(h.passed(), || format!("instance {inst}: {:?}", h.failures.first()));
        report.max_error = report.max_error.max(h.max_retraction_error).max(h.max_endpoint_error);
        report.homotopy.push(h);
    }
    Ok(())
}
