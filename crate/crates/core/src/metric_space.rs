//! Finite metric spaces with extended, pseudo-metric distance matrices and
//! the constructions on them: L∞ product, wedge sum, coproduct and the
//! discrete spaces `D_r`.
//!
//! Distances are `f64` with `f64::INFINITY` standing for +∞. IEEE addition
//! already follows the extended convention `x + ∞ = ∞`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance for comparisons downstream of the axiom checks (morphisms,
/// containment of distances, plan marginals).
pub const DIST_ATOL: f64 = 1e-9;

/// Label of the glued basepoint of a wedge sum.
pub const BASEPOINT_LABEL: &str = "⋆";

/// Relative slack allowed in the triangle inequality: sums of distances
/// round, so `d(x,z) = d(x,y) + d(y,z)` may come out a few ulps high.
const TRIANGLE_REL_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    Classical,
    Pseudo,
    Extended,
    ExtendedPseudo,
}

impl Flavor {
    pub fn is_extended(self) -> bool {
        matches!(self, Flavor::Extended | Flavor::ExtendedPseudo)
    }

    pub fn is_pseudo(self) -> bool {
        matches!(self, Flavor::Pseudo | Flavor::ExtendedPseudo)
    }
}

/// Where a point of a wedge sum came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WedgeOrigin {
    Basepoint,
    Left(usize),
    Right(usize),
}

/// Where a point of a coproduct came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoproductOrigin {
    Left(usize),
    Right(usize),
}

/// How a space was built. Measures on products and wedges need this to
/// take marginals and to split mass by side.
#[derive(Clone, Debug, PartialEq)]
pub enum SpaceProvenance {
    Plain,
    /// Points are `(left[i], right[j])` at index `i * right.len() + j`.
    Product {
        left: Arc<MetricSpace>,
        right: Arc<MetricSpace>,
    },
    Wedge {
        left: PointedMetricSpace,
        right: PointedMetricSpace,
        origin: Vec<WedgeOrigin>,
    },
    Coproduct {
        left: Arc<MetricSpace>,
        right: Arc<MetricSpace>,
        origin: Vec<CoproductOrigin>,
    },
}

/// A finite extended pseudo-metric space given by its distance matrix.
#[derive(Clone, PartialEq)]
pub struct MetricSpace {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    dist: Vec<f64>,
    flavor: Flavor,
    provenance: SpaceProvenance,
}

impl fmt::Debug for MetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricSpace")
            .field("labels", &self.labels)
            .field("flavor", &self.flavor)
            .finish_non_exhaustive()
    }
}

/// A single failed axiom, with the indices that witness it.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "axiom", rename_all = "kebab-case")]
pub enum Violation {
    /// `d(i,i) != 0`.
    NonzeroDiagonal { i: usize, value: f64 },
    Negative { i: usize, j: usize, value: f64 },
    Asymmetric { i: usize, j: usize },
    /// `d(i,k) > d(i,j) + d(j,k)`.
    Triangle { i: usize, j: usize, k: usize },
}

/// Choice of norm for building a space from coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
        match self {
            Norm::L1 => diffs.sum(),
            Norm::L2 => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            Norm::Linf => diffs.fold(0.0, f64::max),
        }
    }
}

impl std::str::FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(Norm::L1),
            "l2" => Ok(Norm::L2),
            "linf" => Ok(Norm::Linf),
            other => Err(Error::domain(format!("unknown metric `{other}` (expected l1, l2 or linf)"))),
        }
    }
}

fn build_index(labels: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(labels.len());
    for (i, l) in labels.iter().enumerate() {
        if index.insert(l.clone(), i).is_some() {
            return Err(Error::domain(format!("duplicate point label `{l}`")));
        }
    }
    Ok(index)
}

fn flavor_of(n: usize, dist: &[f64]) -> Flavor {
    let mut extended = false;
    let mut pseudo = false;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = dist[i * n + j];
            if d.is_infinite() {
                extended = true;
            } else if d == 0.0 {
                pseudo = true;
            }
        }
    }
    match (extended, pseudo) {
        (false, false) => Flavor::Classical,
        (false, true) => Flavor::Pseudo,
        (true, false) => Flavor::Extended,
        (true, true) => Flavor::ExtendedPseudo,
    }
}

impl MetricSpace {
    /// Builds a space from labels and a square matrix. Only the shape and
    /// the absence of NaN are checked here; see [`MetricSpace::validate`].
    pub fn new(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = labels.len();
        if rows.len() != n {
            return Err(Error::structural(format!(
                "{} labels but {} matrix rows",
                n,
                rows.len()
            )));
        }
        let mut dist = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::structural(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some(j) = row.iter().position(|d| d.is_nan()) {
                return Err(Error::structural(format!("NaN distance at ({i}, {j})")));
            }
            dist.extend(row);
        }
        Self::from_flat(labels, dist, SpaceProvenance::Plain)
    }

    fn from_flat(labels: Vec<String>, dist: Vec<f64>, provenance: SpaceProvenance) -> Result<Self> {
        let index = build_index(&labels)?;
        let flavor = flavor_of(labels.len(), &dist);
        Ok(MetricSpace {
            labels,
            index,
            dist,
            flavor,
            provenance,
        })
    }

    /// Point cloud with the chosen norm.
    pub fn from_points(labels: Vec<String>, coords: &[Vec<f64>], norm: Norm) -> Result<Self> {
        if labels.len() != coords.len() {
            return Err(Error::structural("label and coordinate counts differ"));
        }
        if let Some(dim) = coords.first().map(Vec::len) {
            if coords.iter().any(|c| c.len() != dim) {
                return Err(Error::structural("points have differing dimensions"));
            }
        }
        let n = coords.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = norm.distance(&coords[i], &coords[j]);
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        Self::from_flat(labels, dist, SpaceProvenance::Plain)
    }

    pub fn empty() -> Self {
        Self::from_flat(Vec::new(), Vec::new(), SpaceProvenance::Plain).expect("empty space")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.len() + j]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn provenance(&self) -> &SpaceProvenance {
        &self.provenance
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.dist[i * n..(i + 1) * n]
    }

    /// All distinct off-diagonal distances, ascending.
    pub fn distinct_distances(&self) -> Vec<f64> {
        let n = self.len();
        let mut out: Vec<f64> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| self.d(i, j))
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Exhaustive axiom scan. Empty result iff the matrix is an extended
    /// pseudo-metric.
    pub fn validate(&self) -> Vec<Violation> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            let v = self.d(i, i);
            if v != 0.0 {
                out.push(Violation::NonzeroDiagonal { i, value: v });
            }
            for j in 0..n {
                let v = self.d(i, j);
                if v < 0.0 {
                    out.push(Violation::Negative { i, j, value: v });
                }
                if j > i && v != self.d(j, i) {
                    out.push(Violation::Asymmetric { i, j });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i == k || j == i || j == k {
                        continue;
                    }
                    let via = self.d(i, j) + self.d(j, k);
                    let direct = self.d(i, k);
                    if direct > via + TRIANGLE_REL_SLACK * via.max(1.0) {
                        out.push(Violation::Triangle { i, j, k });
                    }
                }
            }
        }
        out
    }

    /// Largest pairwise distance within `subset`; zero for singletons.
    pub fn diameter(&self, subset: &[usize]) -> Result<f64> {
        if subset.is_empty() {
            return Err(Error::domain("diameter of the empty set is undefined"));
        }
        if let Some(&bad) = subset.iter().find(|&&i| i >= self.len()) {
            return Err(Error::domain(format!("point index {bad} out of range")));
        }
        let mut diam = 0.0_f64;
        for (a, &i) in subset.iter().enumerate() {
            for &j in &subset[a + 1..] {
                diam = diam.max(self.d(i, j));
            }
        }
        Ok(diam)
    }

    /// Same labels and bit-identical distance matrix (provenance ignored).
    pub fn same_metric(&self, other: &MetricSpace) -> bool {
        self.labels == other.labels && self.dist == other.dist
    }
}

/// A space with a distinguished basepoint.
#[derive(Clone, Debug, PartialEq)]
pub struct PointedMetricSpace {
    pub space: Arc<MetricSpace>,
    pub basepoint: usize,
}

impl PointedMetricSpace {
    pub fn new(space: Arc<MetricSpace>, basepoint: usize) -> Result<Self> {
        if basepoint >= space.len() {
            return Err(Error::domain(format!(
                "basepoint {basepoint} is not a point of a {}-point space",
                space.len()
            )));
        }
        Ok(PointedMetricSpace { space, basepoint })
    }
}

/// Product with the max metric. Points are enumerated row-major and
/// labelled `(a,b)`.
pub fn linf_product(x: &Arc<MetricSpace>, y: &Arc<MetricSpace>) -> Arc<MetricSpace> {
    let (nx, ny) = (x.len(), y.len());
    let n = nx * ny;
    let labels = (0..nx)
        .flat_map(|i| (0..ny).map(move |j| (i, j)))
        .map(|(i, j)| format!("({},{})", x.label(i), y.label(j)))
        .collect();
    let mut dist = vec![0.0; n * n];
    for a in 0..n {
        let (i, j) = (a / ny, a % ny);
        for b in 0..n {
            let (k, l) = (b / ny, b % ny);
            dist[a * n + b] = x.d(i, k).max(y.d(j, l));
        }
    }
    let provenance = SpaceProvenance::Product {
        left: Arc::clone(x),
        right: Arc::clone(y),
    };
    // Pair labels can only collide if component labels contain commas and
    // parentheses in adversarial ways; fall back to positional labels then.
    match MetricSpace::from_flat(labels, dist.clone(), provenance.clone()) {
        Ok(s) => Arc::new(s),
        Err(_) => {
            let labels = (0..n).map(|a| format!("({},{})", a / ny, a % ny)).collect();
            Arc::new(MetricSpace::from_flat(labels, dist, provenance).expect("positional labels are distinct"))
        }
    }
}

/// Labels for a disjoint union; both sides get an `L:`/`R:` prefix when the
/// plain labels would collide (or clash with `reserved`).
pub(crate) fn disjoint_labels<'a>(
    left: impl Iterator<Item = &'a str> + Clone,
    right: impl Iterator<Item = &'a str> + Clone,
    reserved: Option<&str>,
) -> (Vec<String>, Vec<String>) {
    let left_set: std::collections::HashSet<&str> = left.clone().collect();
    let clash = right.clone().any(|l| left_set.contains(l))
        || reserved.is_some_and(|r| left.clone().chain(right.clone()).any(|l| l == r));
    if clash {
        (
            left.map(|l| format!("L:{l}")).collect(),
            right.map(|l| format!("R:{l}")).collect(),
        )
    } else {
        (left.map(str::to_owned).collect(), right.map(str::to_owned).collect())
    }
}

/// Wedge sum: basepoints glued to a single point `⋆` (index 0), then the
/// remaining points of `x`, then those of `y`. Cross distances pass
/// through the basepoint.
pub fn wedge(x: &PointedMetricSpace, y: &PointedMetricSpace) -> PointedMetricSpace {
    let mut origin = vec![WedgeOrigin::Basepoint];
    origin.extend((0..x.space.len()).filter(|&i| i != x.basepoint).map(WedgeOrigin::Left));
    origin.extend((0..y.space.len()).filter(|&j| j != y.basepoint).map(WedgeOrigin::Right));

    let xl = origin.iter().filter_map(|o| match o {
        WedgeOrigin::Left(i) => Some(x.space.label(*i)),
        _ => None,
    });
    let yl = origin.iter().filter_map(|o| match o {
        WedgeOrigin::Right(j) => Some(y.space.label(*j)),
        _ => None,
    });
    let (xl, yl) = disjoint_labels(xl, yl, Some(BASEPOINT_LABEL));
    let mut labels = vec![BASEPOINT_LABEL.to_owned()];
    labels.extend(xl);
    labels.extend(yl);

    // Distance of a wedge point to the basepoint, and its side.
    let to_base = |o: WedgeOrigin| match o {
        WedgeOrigin::Basepoint => 0.0,
        WedgeOrigin::Left(i) => x.space.d(i, x.basepoint),
        WedgeOrigin::Right(j) => y.space.d(y.basepoint, j),
    };
    let n = origin.len();
    let mut dist = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            dist[a * n + b] = match (origin[a], origin[b]) {
                (WedgeOrigin::Left(i), WedgeOrigin::Left(k)) => x.space.d(i, k),
                (WedgeOrigin::Right(j), WedgeOrigin::Right(l)) => y.space.d(j, l),
                (WedgeOrigin::Basepoint, other) => to_base(other),
                (other, WedgeOrigin::Basepoint) => to_base(other),
                (WedgeOrigin::Left(i), WedgeOrigin::Right(l)) => {
                    x.space.d(i, x.basepoint) + y.space.d(y.basepoint, l)
                }
                (WedgeOrigin::Right(j), WedgeOrigin::Left(k)) => {
                    x.space.d(k, x.basepoint) + y.space.d(y.basepoint, j)
                }
            };
        }
    }
    let provenance = SpaceProvenance::Wedge {
        left: x.clone(),
        right: y.clone(),
        origin,
    };
    let space = MetricSpace::from_flat(labels, dist, provenance).expect("wedge labels are distinct");
    PointedMetricSpace {
        space: Arc::new(space),
        basepoint: 0,
    }
}

/// Disjoint union with every cross distance `+∞`.
pub fn coproduct(x: &Arc<MetricSpace>, y: &Arc<MetricSpace>) -> Arc<MetricSpace> {
    let (nx, ny) = (x.len(), y.len());
    let (xl, yl) = disjoint_labels(
        x.labels().iter().map(String::as_str),
        y.labels().iter().map(String::as_str),
        None,
    );
    let mut labels = xl;
    labels.extend(yl);
    let n = nx + ny;
    let mut dist = vec![f64::INFINITY; n * n];
    for a in 0..n {
        for b in 0..n {
            dist[a * n + b] = match (a < nx, b < nx) {
                (true, true) => x.d(a, b),
                (false, false) => y.d(a - nx, b - nx),
                _ => f64::INFINITY,
            };
        }
    }
    let origin = (0..nx)
        .map(CoproductOrigin::Left)
        .chain((0..ny).map(CoproductOrigin::Right))
        .collect();
    let provenance = SpaceProvenance::Coproduct {
        left: Arc::clone(x),
        right: Arc::clone(y),
        origin,
    };
    Arc::new(MetricSpace::from_flat(labels, dist, provenance).expect("coproduct labels are distinct"))
}

/// The discrete space `D_r`: every pair of distinct points at distance `r`.
pub fn discrete<S: AsRef<str>>(labels: &[S], r: f64) -> Result<MetricSpace> {
    if r.is_nan() || r < 0.0 {
        return Err(Error::domain(format!("discrete distance must be in [0, +∞], got {r}")));
    }
    let n = labels.len();
    let mut dist = vec![r; n * n];
    for i in 0..n {
        dist[i * n + i] = 0.0;
    }
    MetricSpace::from_flat(
        labels.iter().map(|l| l.as_ref().to_owned()).collect(),
        dist,
        SpaceProvenance::Plain,
    )
}

/// Outcome of a 1-Lipschitz check.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Shortness {
    Short,
    Violated {
        pair: (usize, usize),
        source_distance: f64,
        image_distance: f64,
    },
}

impl Shortness {
    pub fn is_short(&self) -> bool {
        matches!(self, Shortness::Short)
    }
}

/// Checks `d(f(a), f(b)) <= d(a, b)` for every pair. `f[i]` is the image of
/// point `i` of `x`.
pub fn is_short(f: &[usize], x: &MetricSpace, y: &MetricSpace) -> Result<Shortness> {
    if f.len() != x.len() {
        return Err(Error::domain(format!(
            "map defined on {} points, source has {}",
            f.len(),
            x.len()
        )));
    }
    if let Some(&bad) = f.iter().find(|&&v| v >= y.len()) {
        return Err(Error::domain(format!("image point {bad} is outside the target")));
    }
    for a in 0..x.len() {
        for b in (a + 1)..x.len() {
            let src = x.d(a, b);
            let img = y.d(f[a], f[b]);
            let ok = img <= src || (img.is_finite() && img <= src + DIST_ATOL);
            if !ok {
                return Ok(Shortness::Violated {
                    pair: (a, b),
                    source_distance: src,
                    image_distance: img,
                });
            }
        }
    }
    Ok(Shortness::Short)
}
