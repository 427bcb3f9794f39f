//! Simplicial metric thickenings `(X, K, φ)`: a metric space, a complex and
//! a bijection from the complex's vertices onto the points. The metric
//! realization consists of the finitely-supported measures whose support
//! is (the image of) a face.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::cliques::maximal_cliques;
use crate::error::{Error, Result};
use crate::measure::{same_ambient, FiniteMeasure};
use crate::metric_space::{
    self, is_short, linf_product, CoproductOrigin, MetricSpace, PointedMetricSpace, Shortness, SpaceProvenance,
    WedgeOrigin,
};
use crate::simplicial_complex::{self, is_simplicial_map, SimplicialComplex};

/// Whether faces are admitted at `≤ r` or `< r`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    #[default]
    Closed,
    Open,
}

impl std::str::FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(Convention::Closed),
            "open" => Ok(Convention::Open),
            other => Err(Error::domain(format!("unknown convention `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScaleParameter {
    pub r: f64,
    pub convention: Convention,
}

impl ScaleParameter {
    pub fn new(r: f64, convention: Convention) -> Result<Self> {
        if r.is_nan() || r < 0.0 {
            return Err(Error::domain(format!("scale must lie in [0, +∞], got {r}")));
        }
        Ok(ScaleParameter { r, convention })
    }

    /// Closed convention; panics on a negative or NaN scale.
    pub fn closed(r: f64) -> Self {
        Self::new(r, Convention::Closed).expect("valid scale")
    }

    /// Open convention; panics on a negative or NaN scale.
    pub fn open(r: f64) -> Self {
        Self::new(r, Convention::Open).expect("valid scale")
    }

    #[inline]
    pub fn admits(&self, d: f64) -> bool {
        match self.convention {
            Convention::Closed => d <= self.r,
            Convention::Open => d < self.r,
        }
    }
}

/// How a thickening was produced.
#[derive(Clone, Debug, PartialEq)]
pub enum Construction {
    Vr(ScaleParameter),
    Cech(ScaleParameter),
    Product {
        left: Arc<Thickening>,
        right: Arc<Thickening>,
    },
    Wedge {
        left: Arc<PointedThickening>,
        right: Arc<PointedThickening>,
    },
    Coproduct,
    Custom,
}

impl Construction {
    /// Short tag: `vr`, `vr-strict`, `cech`, `cech-strict`, `product`,
    /// `wedge`, `coproduct` or `custom`.
    pub fn tag(&self) -> &'static str {
        match self {
            Construction::Vr(s) if s.convention == Convention::Open => "vr-strict",
            Construction::Vr(_) => "vr",
            Construction::Cech(s) if s.convention == Convention::Open => "cech-strict",
            Construction::Cech(_) => "cech",
            Construction::Product { .. } => "product",
            Construction::Wedge { .. } => "wedge",
            Construction::Coproduct => "coproduct",
            Construction::Custom => "custom",
        }
    }
}

#[derive(Clone, PartialEq)]
pub struct Thickening {
    space: Arc<MetricSpace>,
    complex: SimplicialComplex,
    /// `phi[v]` is the point of vertex `v`.
    phi: Vec<usize>,
    phi_inv: Vec<usize>,
    construction: Construction,
}

impl fmt::Debug for Thickening {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Thickening")
            .field("construction", &self.construction.tag())
            .field("vertices", &self.complex.vertices())
            .field("maximal_faces", &self.complex.maximal_faces())
            .finish()
    }
}

fn invert(phi: &[usize], n_points: usize) -> Result<Vec<usize>> {
    if phi.len() != n_points {
        return Err(Error::domain(format!(
            "φ has {} vertices but the space has {n_points} points",
            phi.len()
        )));
    }
    let mut inv = vec![usize::MAX; n_points];
    for (v, &p) in phi.iter().enumerate() {
        if p >= n_points || inv[p] != usize::MAX {
            return Err(Error::domain("φ is not a bijection onto the points"));
        }
        inv[p] = v;
    }
    Ok(inv)
}

impl Thickening {
    /// A custom thickening; `phi` must be a bijection from the complex's
    /// vertices onto the space's points.
    pub fn new(space: Arc<MetricSpace>, complex: SimplicialComplex, phi: Vec<usize>) -> Result<Self> {
        Self::with_construction(space, complex, phi, Construction::Custom)
    }

    fn with_construction(
        space: Arc<MetricSpace>,
        complex: SimplicialComplex,
        phi: Vec<usize>,
        construction: Construction,
    ) -> Result<Self> {
        if complex.num_vertices() != phi.len() {
            return Err(Error::domain("φ must be defined on every vertex"));
        }
        let phi_inv = invert(&phi, space.len())?;
        Ok(Thickening {
            space,
            complex,
            phi,
            phi_inv,
            construction,
        })
    }

    /// Custom thickening with `φ` matching vertices to points by label.
    pub fn by_labels(space: Arc<MetricSpace>, complex: SimplicialComplex) -> Result<Self> {
        let phi = complex
            .vertices()
            .iter()
            .map(|l| {
                space
                    .index_of(l)
                    .ok_or_else(|| Error::domain(format!("vertex `{l}` is not a point of the space")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, complex, phi)
    }

    pub fn space(&self) -> &Arc<MetricSpace> {
        &self.space
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn phi(&self) -> &[usize] {
        &self.phi
    }

    pub fn construction(&self) -> &Construction {
        &self.construction
    }

    /// The vertex sitting over point `p`.
    pub fn vertex_of(&self, p: usize) -> usize {
        self.phi_inv[p]
    }

    /// Whether a set of points is the image of a face.
    pub fn is_face_of_points(&self, points: &[usize]) -> bool {
        if points.is_empty() {
            return false;
        }
        let mut verts: Vec<usize> = points.iter().map(|&p| self.phi_inv[p]).collect();
        verts.sort_unstable();
        verts.dedup();
        self.complex.contains_sorted(&verts)
    }

    /// Maximal faces as sorted point-index sets.
    pub fn maximal_point_faces(&self) -> Vec<Vec<usize>> {
        self.complex
            .maximal_faces()
            .iter()
            .map(|f| {
                let mut v: Vec<usize> = f.iter().map(|&x| self.phi[x]).collect();
                v.sort_unstable();
                v
            })
            .collect()
    }
}

/// The Vietoris–Rips thickening: faces are the sets of diameter `≤ r`
/// (or `< r`). Built as the clique complex of the scale-`r` graph.
pub fn vietoris_rips(x: &Arc<MetricSpace>, scale: ScaleParameter) -> Thickening {
    let n = x.len();
    let faces = maximal_cliques(n, |i, j| scale.admits(x.d(i, j)));
    let complex = SimplicialComplex::from_maximal_unchecked(x.labels().to_vec(), faces);
    Thickening::with_construction(Arc::clone(x), complex, (0..n).collect(), Construction::Vr(scale))
        .expect("identity is a bijection")
}

/// The intrinsic Čech thickening: `σ` is a face when some point `w` of the
/// space is within `r` (closed balls) or `< r` (open) of every member.
/// Singletons are always faces.
pub fn cech(x: &Arc<MetricSpace>, scale: ScaleParameter) -> Thickening {
    let n = x.len();
    let balls: Vec<Vec<usize>> = (0..n)
        .map(|w| (0..n).filter(|&p| scale.admits(x.d(w, p))).collect())
        .collect();
    let complex = SimplicialComplex::from_faces(x.labels().to_vec(), balls).expect("ball indices are in range");
    Thickening::with_construction(Arc::clone(x), complex, (0..n).collect(), Construction::Cech(scale))
        .expect("identity is a bijection")
}

/// The two metric constructions, selectable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Vr,
    Cech,
}

impl Family {
    pub fn build(self, x: &Arc<MetricSpace>, scale: ScaleParameter) -> Thickening {
        match self {
            Family::Vr => vietoris_rips(x, scale),
            Family::Cech => cech(x, scale),
        }
    }

    /// Parses `vr`, `vr-strict`, `cech` or `cech-strict`. The `-strict`
    /// forms force the open convention; the plain forms leave it to the
    /// caller.
    pub fn parse(s: &str) -> Result<(Family, Option<Convention>)> {
        match s {
            "vr" => Ok((Family::Vr, None)),
            "vr-strict" => Ok((Family::Vr, Some(Convention::Open))),
            "cech" => Ok((Family::Cech, None)),
            "cech-strict" => Ok((Family::Cech, Some(Convention::Open))),
            other => Err(Error::domain(format!("unknown construction `{other}`"))),
        }
    }
}

/// Whether `mu` is a point of the metric realization of `t`.
pub fn contains(t: &Thickening, mu: &FiniteMeasure) -> Result<bool> {
    if !same_ambient(t.space(), mu.space()) {
        return Err(Error::domain("measure lives on a different space than the thickening"));
    }
    Ok(t.is_face_of_points(&mu.support()))
}

/// When `mu` is not in `t`, an inclusion-minimal subset of its support
/// that is not a face (as point labels). `None` when `mu` is in `t`.
pub fn non_face_witness(t: &Thickening, mu: &FiniteMeasure) -> Result<Option<Vec<String>>> {
    if contains(t, mu)? {
        return Ok(None);
    }
    let mut s = mu.support();
    let mut i = 0;
    while i < s.len() {
        let mut smaller = s.clone();
        smaller.remove(i);
        if !smaller.is_empty() && !t.is_face_of_points(&smaller) {
            s = smaller;
        } else {
            i += 1;
        }
    }
    Ok(Some(s.iter().map(|&p| t.space.label(p).to_owned()).collect()))
}

/// `(X × Y, K × L, φ × ψ)`.
pub fn thickening_product(m: &Thickening, n: &Thickening) -> Thickening {
    let space = linf_product(&m.space, &n.space);
    let complex = simplicial_complex::product(&m.complex, &n.complex);
    let (nl, ny) = (n.complex.num_vertices(), n.space.len());
    let phi = (0..complex.num_vertices())
        .map(|v| m.phi[v / nl] * ny + n.phi[v % nl])
        .collect();
    let construction = Construction::Product {
        left: Arc::new(m.clone()),
        right: Arc::new(n.clone()),
    };
    Thickening::with_construction(space, complex, phi, construction).expect("product of bijections")
}

/// A thickening with a basepoint vertex, lying over the basepoint of its
/// space.
#[derive(Clone, Debug, PartialEq)]
pub struct PointedThickening {
    pub thickening: Thickening,
    pub vertex_base: usize,
}

impl PointedThickening {
    /// `point_base` must be `φ(vertex_base)`.
    pub fn new(thickening: Thickening, vertex_base: usize, point_base: usize) -> Result<Self> {
        if vertex_base >= thickening.phi.len() || thickening.phi[vertex_base] != point_base {
            return Err(Error::domain("basepoints do not match under φ"));
        }
        Ok(PointedThickening {
            thickening,
            vertex_base,
        })
    }

    /// Pointed at the vertex over point `point_base`.
    pub fn at_point(thickening: Thickening, point_base: usize) -> Result<Self> {
        if point_base >= thickening.space.len() {
            return Err(Error::domain(format!("basepoint {point_base} is not a point")));
        }
        let v = thickening.phi_inv[point_base];
        Self::new(thickening, v, point_base)
    }

    pub fn point_base(&self) -> usize {
        self.thickening.phi[self.vertex_base]
    }

    pub fn pointed_space(&self) -> PointedMetricSpace {
        PointedMetricSpace {
            space: Arc::clone(&self.thickening.space),
            basepoint: self.point_base(),
        }
    }
}

/// `(X ∨ Y, K ∨ L, φ ∨ ψ)`, pointed at the glued basepoint.
pub fn thickening_wedge(m: &PointedThickening, n: &PointedThickening) -> Result<PointedThickening> {
    let ws = metric_space::wedge(&m.pointed_space(), &n.pointed_space());
    let SpaceProvenance::Wedge { origin: point_origin, .. } = ws.space.provenance() else {
        unreachable!("wedge records its provenance")
    };
    let point_index = |o: WedgeOrigin| point_origin.iter().position(|&q| q == o).expect("origin present");
    let (complex, vertex_origin) =
        simplicial_complex::wedge(&m.thickening.complex, m.vertex_base, &n.thickening.complex, n.vertex_base)?;
    let phi = vertex_origin
        .iter()
        .map(|&o| match o {
            WedgeOrigin::Basepoint => point_index(WedgeOrigin::Basepoint),
            WedgeOrigin::Left(v) => point_index(WedgeOrigin::Left(m.thickening.phi[v])),
            WedgeOrigin::Right(w) => point_index(WedgeOrigin::Right(n.thickening.phi[w])),
        })
        .collect();
    let construction = Construction::Wedge {
        left: Arc::new(m.clone()),
        right: Arc::new(n.clone()),
    };
    let t = Thickening::with_construction(ws.space, complex, phi, construction)?;
    let vertex_base = t.phi_inv[ws.basepoint];
    Ok(PointedThickening {
        thickening: t,
        vertex_base,
    })
}

/// Disjoint union of thickenings over the coproduct space.
pub fn thickening_coproduct(m: &Thickening, n: &Thickening) -> Thickening {
    let space = metric_space::coproduct(&m.space, &n.space);
    let (complex, origin) = simplicial_complex::coproduct(&m.complex, &n.complex);
    let nx = m.space.len();
    let phi = origin
        .iter()
        .map(|&o| match o {
            CoproductOrigin::Left(v) => m.phi[v],
            CoproductOrigin::Right(w) => nx + n.phi[w],
        })
        .collect();
    Thickening::with_construction(space, complex, phi, Construction::Coproduct).expect("disjoint bijections")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MorphismCheck {
    pub valid: bool,
    pub diagnostics: Vec<String>,
}

/// Checks that `(f, g)` is a morphism `M → N`: `f` short, `g` simplicial
/// and `f(φ(v)) = ψ(g(v))` for every vertex `v`.
pub fn validate_morphism(f: &[usize], g: &[usize], m: &Thickening, n: &Thickening) -> MorphismCheck {
    let mut diagnostics = Vec::new();
    match is_short(f, &m.space, &n.space) {
        Ok(Shortness::Short) => {}
        Ok(Shortness::Violated {
            pair: (a, b),
            source_distance,
            image_distance,
        }) => diagnostics.push(format!(
            "f is not short: d({}, {}) = {source_distance} but the images are {image_distance} apart",
            m.space.label(a),
            m.space.label(b)
        )),
        Err(e) => diagnostics.push(format!("f: {e}")),
    }
    match is_simplicial_map(g, &m.complex, &n.complex) {
        Ok(true) => {}
        Ok(false) => diagnostics.push("g does not send faces to faces".to_owned()),
        Err(e) => diagnostics.push(format!("g: {e}")),
    }
    if f.len() == m.space.len() && g.len() == m.complex.num_vertices() {
        for v in 0..g.len() {
            let via_space = f[m.phi[v]];
            let via_complex = n.phi.get(g[v]).copied();
            if via_complex != Some(via_space) {
                diagnostics.push(format!(
                    "square does not commute at vertex `{}`",
                    m.complex.vertices()[v]
                ));
                break;
            }
        }
    }
    MorphismCheck {
        valid: diagnostics.is_empty(),
        diagnostics,
    }
}

/// Outcome of [`wedge_hypothesis_check`]. Faces are reported as point
/// labels of the wedge space.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WedgeHypothesis {
    pub holds: bool,
    /// A face of `K ∨ L` missing from `S`.
    pub missing_wedge_face: Option<Vec<String>>,
    /// A face of `S` meeting both sides whose extension by `⋆` is not in `S`.
    pub unextendable_face: Option<Vec<String>>,
}

/// Side of each point of a wedge space.
pub(crate) fn wedge_sides(space: &MetricSpace) -> Result<&[WedgeOrigin]> {
    match space.provenance() {
        SpaceProvenance::Wedge { origin, .. } => Ok(origin),
        _ => Err(Error::domain("space is not a recorded wedge sum")),
    }
}

pub(crate) fn is_mixed(points: &[usize], sides: &[WedgeOrigin]) -> bool {
    let left = points.iter().any(|&p| matches!(sides[p], WedgeOrigin::Left(_)));
    let right = points.iter().any(|&p| matches!(sides[p], WedgeOrigin::Right(_)));
    left && right
}

/// Checks that `V = (X ∨ Y, S, φ)` contains `M ∨ N` and that every face of
/// `S` meeting both sides stays a face after adding the basepoint.
pub fn wedge_hypothesis_check(v: &Thickening, m: &PointedThickening, n: &PointedThickening) -> Result<WedgeHypothesis> {
    let w = thickening_wedge(m, n)?;
    if !v.space.same_metric(&w.thickening.space) {
        return Err(Error::domain("V does not live on the wedge of the two spaces"));
    }
    let labels = |pts: &[usize]| -> Vec<String> { pts.iter().map(|&p| v.space.label(p).to_owned()).collect() };
    let mut report = WedgeHypothesis {
        holds: true,
        missing_wedge_face: None,
        unextendable_face: None,
    };
    if let Some(f) = w
        .thickening
        .maximal_point_faces()
        .into_iter()
        .find(|f| !v.is_face_of_points(f))
    {
        report.holds = false;
        report.missing_wedge_face = Some(labels(&f));
    }
    let sides = wedge_sides(&w.thickening.space)?;
    let base = w.point_base();
    for f in v.maximal_point_faces() {
        if is_mixed(&f, sides) {
            let mut ext = f.clone();
            ext.push(base);
            if !v.is_face_of_points(&ext) {
                report.holds = false;
                report.unextendable_face = Some(labels(&f));
                break;
            }
        }
    }
    Ok(report)
}

/// Faces (as label sets) of `a` that are not faces of `b`, among the
/// maximal faces of `a`. Both must share point labels.
pub fn faces_not_in(a: &Thickening, b: &Thickening) -> BTreeSet<Vec<String>> {
    a.complex
        .canonical_faces()
        .into_iter()
        .filter(|f| {
            let pts: Option<Vec<usize>> = f.iter().map(|l| b.space.index_of(l)).collect();
            !pts.is_some_and(|p| b.is_face_of_points(&p))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> Arc<MetricSpace> {
        Arc::new(
            MetricSpace::new(
                vec!["a".into(), "b".into(), "c".into()],
                vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 2.0], vec![1.0, 2.0, 0.0]],
            )
            .unwrap(),
        )
    }

    fn line(n: usize) -> Arc<MetricSpace> {
        let labels = (0..n).map(|i| i.to_string()).collect();
        let rows = (0..n).map(|i| (0..n).map(|j| (i as f64 - j as f64).abs()).collect()).collect();
        Arc::new(MetricSpace::new(labels, rows).unwrap())
    }

    fn segment(label_a: &str, label_b: &str, d: f64) -> Arc<MetricSpace> {
        Arc::new(MetricSpace::new(vec![label_a.into(), label_b.into()], vec![vec![0.0, d], vec![d, 0.0]]).unwrap())
    }

    #[test]
    fn vr_examples() {
        let x = abc();
        let t = vietoris_rips(&x, ScaleParameter::closed(0.0));
        assert_eq!(t.complex().maximal_faces(), &[vec![0], vec![1], vec![2]]);
        let t = vietoris_rips(&x, ScaleParameter::closed(1.0));
        assert_eq!(t.complex().maximal_faces(), &[vec![0, 1], vec![0, 2]]);
        let t = vietoris_rips(&x, ScaleParameter::open(1.0));
        assert_eq!(t.complex().maximal_faces().len(), 3);
        let t = vietoris_rips(&x, ScaleParameter::closed(f64::INFINITY));
        assert_eq!(t.complex().maximal_faces(), &[vec![0, 1, 2]]);
        assert_eq!(t.construction().tag(), "vr");
    }

    #[test]
    fn vr_open_at_zero_keeps_vertices() {
        let t = vietoris_rips(&abc(), ScaleParameter::open(0.0));
        assert_eq!(t.complex().maximal_faces().len(), 3);
        let c = cech(&abc(), ScaleParameter::open(0.0));
        assert_eq!(c.complex().maximal_faces().len(), 3);
    }

    #[test]
    fn cech_examples() {
        let x = line(3);
        let t = cech(&x, ScaleParameter::closed(1.0));
        assert_eq!(t.complex().maximal_faces(), &[vec![0, 1, 2]]);
        let t = cech(&x, ScaleParameter::closed(0.0));
        assert_eq!(t.complex().maximal_faces().len(), 3);
        // VR at the same scale is also the full simplex only at r = 2.
        assert_eq!(vietoris_rips(&x, ScaleParameter::closed(1.0)).complex().maximal_faces().len(), 2);
    }

    #[test]
    fn containment() {
        let x = abc();
        let t = vietoris_rips(&x, ScaleParameter::closed(1.0));
        for p in 0..3 {
            assert!(contains(&t, &FiniteMeasure::delta(x.clone(), p).unwrap()).unwrap());
        }
        let bc = FiniteMeasure::uniform(x.clone(), &[1, 2]).unwrap();
        assert!(!contains(&t, &bc).unwrap());
        let ab = FiniteMeasure::uniform(x.clone(), &[0, 1]).unwrap();
        assert!(contains(&t, &ab).unwrap());
        let elsewhere = FiniteMeasure::delta(line(3), 0).unwrap();
        assert!(matches!(contains(&t, &elsewhere), Err(Error::Domain(_))));
    }

    #[test]
    fn phi_must_be_bijective() {
        let x = abc();
        let k = SimplicialComplex::from_faces(x.labels().to_vec(), vec![vec![0, 1]]).unwrap();
        assert!(Thickening::new(x.clone(), k.clone(), vec![0, 0, 1]).is_err());
        assert!(Thickening::new(x.clone(), k.clone(), vec![0, 1]).is_err());
        let t = Thickening::new(x, k, vec![2, 1, 0]).unwrap();
        assert_eq!(t.maximal_point_faces(), vec![vec![1, 2], vec![0]]);
    }

    #[test]
    fn product_with_point_thickening() {
        let pt = Arc::new(MetricSpace::new(vec!["*".into()], vec![vec![0.0]]).unwrap());
        let s = ScaleParameter::closed(1.0);
        let p = thickening_product(&vietoris_rips(&pt, s), &vietoris_rips(&abc(), s));
        assert_eq!(p.complex().maximal_faces(), &[vec![0, 1], vec![0, 2]]);
        assert_eq!(p.construction().tag(), "product");
    }

    #[test]
    fn wedge_thickening_and_strict_containment() {
        let s = ScaleParameter::closed(2.0);
        let x = segment("s", "x", 1.0);
        let y = segment("s", "y", 1.0);
        let m = PointedThickening::at_point(vietoris_rips(&x, s), 0).unwrap();
        let n = PointedThickening::at_point(vietoris_rips(&y, s), 0).unwrap();
        let w = thickening_wedge(&m, &n).unwrap();
        assert_eq!(w.thickening.complex().maximal_faces(), &[vec![0, 1], vec![0, 2]]);

        let ws = PointedMetricSpace {
            space: w.thickening.space().clone(),
            basepoint: 0,
        };
        let v = vietoris_rips(&ws.space, s);
        assert_eq!(v.complex().maximal_faces(), &[vec![0, 1, 2]]);
        let extra = faces_not_in(&v, &w.thickening);
        assert_eq!(extra, BTreeSet::from([vec!["x".to_string(), "y".to_string(), "⋆".to_string()]]));
        let h = wedge_hypothesis_check(&v, &m, &n).unwrap();
        assert!(h.holds, "{h:?}");
        assert!(wedge_hypothesis_check(&w.thickening, &m, &n).unwrap().holds);
    }

    #[test]
    fn hypothesis_fails_without_basepoint_extension() {
        let s = ScaleParameter::closed(2.0);
        let m = PointedThickening::at_point(vietoris_rips(&segment("s", "x", 1.0), s), 0).unwrap();
        let n = PointedThickening::at_point(vietoris_rips(&segment("s", "y", 1.0), s), 0).unwrap();
        let w = thickening_wedge(&m, &n).unwrap();
        let space = w.thickening.space().clone();
        // S = {⋆,x}, {⋆,y}, {x,y} but not {⋆,x,y}
        let k = SimplicialComplex::from_faces(space.labels().to_vec(), vec![vec![0, 1], vec![0, 2], vec![1, 2]]).unwrap();
        let bad = Thickening::new(space, k, vec![0, 1, 2]).unwrap();
        let h = wedge_hypothesis_check(&bad, &m, &n).unwrap();
        assert!(!h.holds);
        assert_eq!(h.unextendable_face, Some(vec!["x".to_string(), "y".to_string()]));
        assert!(matches!(
            wedge_hypothesis_check(&vietoris_rips(&abc(), s), &m, &n),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn pointed_basepoint_mismatch() {
        let t = vietoris_rips(&abc(), ScaleParameter::closed(1.0));
        assert!(matches!(PointedThickening::new(t, 0, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn coproduct_matches_construction_on_coproduct() {
        let s = ScaleParameter::closed(1.5);
        let a = abc();
        let b = line(3);
        let lhs = vietoris_rips(&metric_space::coproduct(&a, &b), s);
        let rhs = thickening_coproduct(&vietoris_rips(&a, s), &vietoris_rips(&b, s));
        assert!(lhs.complex().same_faces(rhs.complex()));
    }

    #[test]
    fn morphisms() {
        let x = abc();
        let s = ScaleParameter::closed(1.0);
        let t = vietoris_rips(&x, s);
        let id = [0, 1, 2];
        assert!(validate_morphism(&id, &id, &t, &t).valid);
        // collapse onto a: short, and simplicial into any VR complex
        let c = [0, 0, 0];
        assert!(validate_morphism(&c, &c, &t, &t).valid);
        // swap a and b: d(a,c)=1 but d(b,c)=2
        let swap = [1, 0, 2];
        let check = validate_morphism(&swap, &swap, &t, &t);
        assert!(!check.valid);
        assert!(check.diagnostics[0].contains("not short"));
        // square fails when g disagrees with f
        let check = validate_morphism(&id, &c, &t, &t);
        assert!(check.diagnostics.iter().any(|d| d.contains("commute")));
    }
}
