//! Simplicial homology with coefficients in the two-element field.

use std::collections::HashMap;
use std::sync::Arc;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric_space::MetricSpace;
use crate::simplicial_complex::SimplicialComplex;
use crate::thickening::{Family, ScaleParameter};

/// A GF(2) matrix stored as one bitset per column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryMatrix {
    rows: usize,
    columns: Vec<Vec<u64>>,
}

impl BoundaryMatrix {
    fn zero(rows: usize, cols: usize) -> Self {
        BoundaryMatrix {
            rows,
            columns: vec![vec![0; rows.div_ceil(64)]; cols],
        }
    }

    fn set(&mut self, row: usize, col: usize) {
        self.columns[col][row / 64] |= 1 << (row % 64);
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.columns[col][row / 64] >> (row % 64) & 1 == 1
    }

    pub fn ones(&self) -> usize {
        self.columns.iter().flatten().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().flatten().all(|&w| w == 0)
    }

    /// `self · other` over GF(2).
    pub fn compose(&self, other: &BoundaryMatrix) -> Result<BoundaryMatrix> {
        if self.cols() != other.rows {
            return Err(Error::Structural(format!(
                "cannot compose {}×{} with {}×{}",
                self.rows,
                self.cols(),
                other.rows,
                other.cols()
            )));
        }
        let mut out = BoundaryMatrix::zero(self.rows, other.cols());
        for (c, col) in other.columns.iter().enumerate() {
            for k in (0..other.rows).filter(|&k| col[k / 64] >> (k % 64) & 1 == 1) {
                for (w, &bits) in out.columns[c].iter_mut().zip(&self.columns[k]) {
                    *w ^= bits;
                }
            }
        }
        Ok(out)
    }

    /// Rank by column reduction: each column is cleared against earlier
    /// pivots keyed by their highest set row.
    pub fn rank(&self) -> usize {
        let mut pivots: HashMap<usize, Vec<u64>> = HashMap::new();
        for col in &self.columns {
            let mut col = col.clone();
            while let Some(top) = highest_bit(&col) {
                match pivots.get(&top) {
                    Some(p) => col.iter_mut().zip(p).for_each(|(a, b)| *a ^= b),
                    None => {
                        pivots.insert(top, col);
                        break;
                    }
                }
            }
        }
        pivots.len()
    }
}

fn highest_bit(bits: &[u64]) -> Option<usize> {
    bits.iter()
        .enumerate()
        .rev()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
}

/// All faces with `dim + 1` vertices in lexicographic order, regardless of
/// any cap stored on the complex.
fn faces_uncapped(k: &SimplicialComplex, dim: usize) -> Vec<Vec<usize>> {
    k.maximal_faces()
        .iter()
        .filter(|m| m.len() > dim)
        .flat_map(|m| m.iter().copied().combinations(dim + 1))
        .sorted()
        .dedup()
        .collect()
}

fn boundary_between(lower: &[Vec<usize>], upper: &[Vec<usize>]) -> BoundaryMatrix {
    let index: HashMap<&[usize], usize> = lower.iter().enumerate().map(|(i, f)| (f.as_slice(), i)).collect();
    let mut m = BoundaryMatrix::zero(lower.len(), upper.len());
    for (c, f) in upper.iter().enumerate() {
        if f.len() < 2 {
            continue;
        }
        for skip in 0..f.len() {
            let facet: Vec<usize> = f.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
            m.set(index[facet.as_slice()], c);
        }
    }
    m
}

fn check_cap(dim: usize, cap: usize) -> Result<()> {
    if dim > cap + 1 {
        return Err(Error::Refused(format!(
            "boundary in dimension {dim} needs faces above the dimension cap {cap}; raise --dim-cap"
        )));
    }
    Ok(())
}

/// `∂_dim` from `dim`-faces to `(dim − 1)`-faces, both in lexicographic
/// order. `∂_0` has no rows. Dimensions up to `cap + 1` are allowed, since
/// Betti numbers through `cap` need that boundary.
pub fn boundary_matrix(k: &SimplicialComplex, dim: usize, cap: usize) -> Result<BoundaryMatrix> {
    check_cap(dim, cap)?;
    let upper = faces_uncapped(k, dim);
    if dim == 0 {
        return Ok(BoundaryMatrix::zero(0, upper.len()));
    }
    Ok(boundary_between(&faces_uncapped(k, dim - 1), &upper))
}

/// Checks `∂_{d} ∘ ∂_{d+1} = 0` for `d = 1 ..= cap`. Returns the first
/// dimension where it fails.
pub fn boundary_squares_to_zero(k: &SimplicialComplex, cap: usize) -> Result<Option<usize>> {
    let faces: Vec<Vec<Vec<usize>>> = (0..=cap + 1).map(|d| faces_uncapped(k, d)).collect();
    for d in 1..=cap {
        let lower = boundary_between(&faces[d - 1], &faces[d]);
        let upper = boundary_between(&faces[d], &faces[d + 1]);
        if !lower.compose(&upper)?.is_zero() {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiVector {
    /// `values[k]` is the `k`-th Betti number, for `k = 0 ..= dim_cap`.
    pub values: Vec<usize>,
    pub dim_cap: usize,
}

impl BettiVector {
    /// Componentwise sum; the caps must agree.
    pub fn add(&self, other: &BettiVector) -> Result<BettiVector> {
        if self.dim_cap != other.dim_cap {
            return Err(Error::Structural("Betti vectors with different caps".into()));
        }
        Ok(BettiVector {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
            dim_cap: self.dim_cap,
        })
    }
}

impl std::fmt::Display for BettiVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({})", self.values.iter().join(", "))
    }
}

/// Betti numbers in dimensions `0 ..= cap`.
pub fn betti(k: &SimplicialComplex, cap: usize) -> BettiVector {
    let faces: Vec<Vec<Vec<usize>>> = (0..=cap + 1).map(|d| faces_uncapped(k, d)).collect();
    // ranks[d] = rank ∂_d, with ∂_0 = 0.
    let mut ranks = vec![0usize; cap + 2];
    for d in 1..=cap + 1 {
        ranks[d] = boundary_between(&faces[d - 1], &faces[d]).rank();
    }
    let values = (0..=cap).map(|d| faces[d].len() - ranks[d] - ranks[d + 1]).collect();
    BettiVector { values, dim_cap: cap }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveRow {
    pub r: f64,
    pub betti: BettiVector,
    pub maximal_faces: usize,
}

/// One Betti vector per scale in `r_grid`, which must be sorted.
pub fn betti_curve(
    x: &Arc<MetricSpace>,
    family: Family,
    convention: crate::thickening::Convention,
    r_grid: &[f64],
    cap: usize,
) -> Result<Vec<CurveRow>> {
    if r_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Precondition("r grid must be sorted".into()));
    }
    r_grid
        .iter()
        .map(|&r| {
            let t = family.build(x, ScaleParameter::new(r, convention)?);
            Ok(CurveRow {
                r,
                betti: betti(t.complex(), cap),
                maximal_faces: t.complex().maximal_faces().len(),
            })
        })
        .collect()
}
