//! Abstract simplicial complexes stored by their maximal faces.
//!
//! A face is any nonempty subset of a stored maximal face, so downward
//! closure holds by construction. Faces are sorted vectors of vertex
//! indices; the list of maximal faces is kept in lexicographic order so
//! that two complexes built from the same data compare equal.

use std::collections::BTreeSet;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::metric_space::{disjoint_labels, CoproductOrigin, WedgeOrigin, BASEPOINT_LABEL};

/// Default cap on enumerated simplex dimension for homology work.
pub const DEFAULT_DIM_CAP: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertices: Vec<String>,
    maximal: Vec<Vec<usize>>,
    dim_cap: Option<usize>,
}

/// `a ⊆ b` for sorted, duplicate-free slices.
pub(crate) fn is_sorted_subset(a: &[usize], b: &[usize]) -> bool {
    if a.len() > b.len() {
        return false;
    }
    let mut it = b.iter();
    'outer: for x in a {
        for y in it.by_ref() {
            if y == x {
                continue 'outer;
            }
            if y > x {
                return false;
            }
        }
        return false;
    }
    true
}

fn prune_dominated(mut faces: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    faces.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    faces.dedup();
    let mut kept: Vec<Vec<usize>> = Vec::with_capacity(faces.len());
    for f in faces {
        if !kept.iter().any(|k| is_sorted_subset(&f, k)) {
            kept.push(f);
        }
    }
    kept.sort();
    kept
}

impl SimplicialComplex {
    pub fn empty() -> Self {
        SimplicialComplex {
            vertices: Vec::new(),
            maximal: Vec::new(),
            dim_cap: None,
        }
    }

    /// Builds the downward closure of `faces`. Empty faces are ignored,
    /// vertices not covered by any face become singleton faces, and faces
    /// contained in others are dropped.
    pub fn from_faces(vertices: Vec<String>, faces: Vec<Vec<usize>>) -> Result<Self> {
        let n = vertices.len();
        let distinct: BTreeSet<&String> = vertices.iter().collect();
        if distinct.len() != n {
            return Err(Error::domain("duplicate vertex labels"));
        }
        let mut covered = vec![false; n];
        let mut cleaned = Vec::with_capacity(faces.len());
        for mut f in faces {
            if let Some(&bad) = f.iter().find(|&&v| v >= n) {
                return Err(Error::domain(format!("vertex index {bad} out of range")));
            }
            f.sort_unstable();
            f.dedup();
            if f.is_empty() {
                continue;
            }
            for &v in &f {
                covered[v] = true;
            }
            cleaned.push(f);
        }
        cleaned.extend((0..n).filter(|&v| !covered[v]).map(|v| vec![v]));
        Ok(SimplicialComplex {
            vertices,
            maximal: prune_dominated(cleaned),
            dim_cap: None,
        })
    }

    /// Same as [`from_faces`](Self::from_faces), with faces given by label.
    pub fn from_label_faces(vertices: Vec<String>, faces: &[Vec<String>]) -> Result<Self> {
        let lookup = |l: &String| {
            vertices
                .iter()
                .position(|v| v == l)
                .ok_or_else(|| Error::domain(format!("face mentions unknown vertex `{l}`")))
        };
        let idx = faces
            .iter()
            .map(|f| f.iter().map(lookup).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_faces(vertices, idx)
    }

    /// Faces known to be sorted, maximal and covering every vertex.
    pub(crate) fn from_maximal_unchecked(vertices: Vec<String>, mut maximal: Vec<Vec<usize>>) -> Self {
        maximal.sort();
        SimplicialComplex {
            vertices,
            maximal,
            dim_cap: None,
        }
    }

    pub fn with_dim_cap(mut self, cap: usize) -> Self {
        self.dim_cap = Some(cap);
        self
    }

    pub fn dim_cap(&self) -> Option<usize> {
        self.dim_cap
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_index(&self, label: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == label)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn maximal_faces(&self) -> &[Vec<usize>] {
        &self.maximal
    }

    /// Dimension of the largest face, `None` for the empty complex.
    pub fn dimension(&self) -> Option<usize> {
        self.maximal.iter().map(|f| f.len() - 1).max()
    }

    /// Whether `sigma` is a face. The empty set is not considered a face.
    pub fn membership(&self, sigma: &[usize]) -> Result<bool> {
        if sigma.is_empty() {
            return Err(Error::domain("the empty set is not a simplex"));
        }
        if let Some(&bad) = sigma.iter().find(|&&v| v >= self.vertices.len()) {
            return Err(Error::domain(format!("vertex {bad} is not in the complex")));
        }
        let mut s = sigma.to_vec();
        s.sort_unstable();
        s.dedup();
        Ok(self.contains_sorted(&s))
    }

    pub(crate) fn contains_sorted(&self, sigma: &[usize]) -> bool {
        self.maximal.iter().any(|m| is_sorted_subset(sigma, m))
    }

    /// All faces with exactly `dim + 1` vertices, in lexicographic order.
    /// Empty past the dimension cap.
    pub fn faces(&self, dim: usize) -> Vec<Vec<usize>> {
        if self.dim_cap.is_some_and(|cap| dim > cap) {
            return Vec::new();
        }
        let k = dim + 1;
        let set: BTreeSet<Vec<usize>> = self
            .maximal
            .iter()
            .filter(|m| m.len() >= k)
            .flat_map(|m| m.iter().copied().combinations(k))
            .collect();
        set.into_iter().collect()
    }

    /// Maximal faces as sorted label lists, themselves sorted. Two complexes
    /// with equal canonical forms have the same faces up to vertex order.
    pub fn canonical_faces(&self) -> BTreeSet<Vec<String>> {
        self.maximal
            .iter()
            .map(|f| {
                let mut v: Vec<String> = f.iter().map(|&i| self.vertices[i].clone()).collect();
                v.sort();
                v
            })
            .collect()
    }

    pub fn same_faces(&self, other: &SimplicialComplex) -> bool {
        let a: BTreeSet<&String> = self.vertices.iter().collect();
        let b: BTreeSet<&String> = other.vertices.iter().collect();
        a == b && self.canonical_faces() == other.canonical_faces()
    }

    /// Every face of `self` is a face of `other` (matched by label).
    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.maximal.iter().all(|f| {
            let mapped: Option<Vec<usize>> = f.iter().map(|&v| other.vertex_index(&self.vertices[v])).collect();
            match mapped {
                Some(mut m) => {
                    m.sort_unstable();
                    other.contains_sorted(&m)
                }
                None => false,
            }
        })
    }
}

/// Categorical product: a set of pairs is a face iff both coordinate
/// projections are faces. Vertices are `(a,b)` in row-major order.
pub fn product(k: &SimplicialComplex, l: &SimplicialComplex) -> SimplicialComplex {
    let nl = l.num_vertices();
    let vertices = k
        .vertices
        .iter()
        .cartesian_product(l.vertices.iter())
        .map(|(a, b)| format!("({a},{b})"))
        .collect();
    let maximal = k
        .maximal
        .iter()
        .cartesian_product(l.maximal.iter())
        .map(|(s, t)| s.iter().cartesian_product(t.iter()).map(|(&i, &j)| i * nl + j).sorted().collect())
        .collect();
    SimplicialComplex::from_maximal_unchecked(vertices, maximal)
}

/// Disjoint union; vertices of `l` follow those of `k`.
pub fn coproduct(k: &SimplicialComplex, l: &SimplicialComplex) -> (SimplicialComplex, Vec<CoproductOrigin>) {
    let nk = k.num_vertices();
    let (kl, ll) = disjoint_labels(
        k.vertices.iter().map(String::as_str),
        l.vertices.iter().map(String::as_str),
        None,
    );
    let mut vertices = kl;
    vertices.extend(ll);
    let maximal = k
        .maximal
        .iter()
        .cloned()
        .chain(l.maximal.iter().map(|f| f.iter().map(|&v| v + nk).collect()))
        .collect();
    let origin = (0..nk)
        .map(CoproductOrigin::Left)
        .chain((0..l.num_vertices()).map(CoproductOrigin::Right))
        .collect();
    let mut out = SimplicialComplex::from_maximal_unchecked(vertices, maximal);
    out.dim_cap = k.dim_cap.max(l.dim_cap);
    (out, origin)
}

/// Index of each vertex in the glued complex; `⋆` is vertex 0, then the
/// other vertices of the left side, then those of the right side.
pub(crate) fn wedge_layout(n_left: usize, left_base: usize, n_right: usize, right_base: usize) -> Vec<WedgeOrigin> {
    let mut origin = vec![WedgeOrigin::Basepoint];
    origin.extend((0..n_left).filter(|&i| i != left_base).map(WedgeOrigin::Left));
    origin.extend((0..n_right).filter(|&j| j != right_base).map(WedgeOrigin::Right));
    origin
}

/// Wedge sum of pointed complexes, glued at `k_base ∼ l_base`.
pub fn wedge(
    k: &SimplicialComplex,
    k_base: usize,
    l: &SimplicialComplex,
    l_base: usize,
) -> Result<(SimplicialComplex, Vec<WedgeOrigin>)> {
    if k_base >= k.num_vertices() || l_base >= l.num_vertices() {
        return Err(Error::domain("wedge basepoint is not a vertex of its complex"));
    }
    let origin = wedge_layout(k.num_vertices(), k_base, l.num_vertices(), l_base);
    let mut from_left = vec![0; k.num_vertices()];
    let mut from_right = vec![0; l.num_vertices()];
    for (idx, o) in origin.iter().enumerate() {
        match *o {
            WedgeOrigin::Basepoint => {
                from_left[k_base] = idx;
                from_right[l_base] = idx;
            }
            WedgeOrigin::Left(i) => from_left[i] = idx,
            WedgeOrigin::Right(j) => from_right[j] = idx,
        }
    }
    let kl = origin.iter().filter_map(|o| match o {
        WedgeOrigin::Left(i) => Some(k.vertices[*i].as_str()),
        _ => None,
    });
    let ll = origin.iter().filter_map(|o| match o {
        WedgeOrigin::Right(j) => Some(l.vertices[*j].as_str()),
        _ => None,
    });
    let (kl, ll) = disjoint_labels(kl, ll, Some(BASEPOINT_LABEL));
    let mut vertices = vec![BASEPOINT_LABEL.to_owned()];
    vertices.extend(kl);
    vertices.extend(ll);

    let relabel = |f: &Vec<usize>, map: &[usize]| -> Vec<usize> { f.iter().map(|&v| map[v]).sorted().collect() };
    let faces = k
        .maximal
        .iter()
        .map(|f| relabel(f, &from_left))
        .chain(l.maximal.iter().map(|f| relabel(f, &from_right)))
        .collect();
    // Only {⋆} can end up dominated, when one side's basepoint is isolated.
    let mut out = SimplicialComplex::from_faces(vertices, faces)?;
    out.dim_cap = k.dim_cap.max(l.dim_cap);
    Ok((out, origin))
}

/// Whether the vertex map `g` (`g[v]` is the image of vertex `v`) sends
/// faces of `k` to faces of `l`.
pub fn is_simplicial_map(g: &[usize], k: &SimplicialComplex, l: &SimplicialComplex) -> Result<bool> {
    if g.len() != k.num_vertices() {
        return Err(Error::domain(format!(
            "vertex map defined on {} vertices, complex has {}",
            g.len(),
            k.num_vertices()
        )));
    }
    if let Some(&bad) = g.iter().find(|&&w| w >= l.num_vertices()) {
        return Err(Error::domain(format!("image vertex {bad} is outside the target")));
    }
    Ok(k.maximal.iter().all(|f| {
        let image: Vec<usize> = f.iter().map(|&v| g[v]).sorted().dedup().collect();
        l.contains_sorted(&image)
    }))
}
