//! Finitely-supported probability measures `Σ λᵢ δ_{xᵢ}` on a finite
//! metric space.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::metric_space::{linf_product, MetricSpace, SpaceProvenance};

/// Tolerance on total mass and on weight comparisons.
pub const MASS_ATOL: f64 = 1e-12;

/// Atoms lighter than this after arithmetic are removed.
pub const DROP_THRESHOLD: f64 = 1e-15;

#[derive(Clone, Debug)]
pub struct FiniteMeasure {
    space: Arc<MetricSpace>,
    /// Sorted by point index, distinct points, strictly positive weights.
    atoms: Vec<(usize, f64)>,
}

impl PartialEq for FiniteMeasure {
    fn eq(&self, other: &Self) -> bool {
        same_ambient(&self.space, &other.space) && self.atoms == other.atoms
    }
}

pub(crate) fn same_ambient(a: &Arc<MetricSpace>, b: &Arc<MetricSpace>) -> bool {
    Arc::ptr_eq(a, b) || a.same_metric(b)
}

fn check_ambient(a: &Arc<MetricSpace>, b: &Arc<MetricSpace>) -> Result<()> {
    if same_ambient(a, b) {
        Ok(())
    } else {
        Err(Error::domain("measures live on different spaces"))
    }
}

impl FiniteMeasure {
    /// Validates and stores the atoms. Weights must be positive, points
    /// distinct, total mass 1 within [`MASS_ATOL`], and no two support
    /// points may be at infinite distance.
    pub fn new(space: Arc<MetricSpace>, mut atoms: Vec<(usize, f64)>) -> Result<Self> {
        atoms.sort_by_key(|a| a.0);
        for w in atoms.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::domain(format!("point {} appears twice", space.label(w[0].0))));
            }
        }
        for &(p, w) in &atoms {
            if p >= space.len() {
                return Err(Error::domain(format!("point index {p} is not in the space")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::domain(format!(
                    "weight {w} at {} is not strictly positive",
                    space.label(p)
                )));
            }
        }
        let mass: f64 = atoms.iter().map(|a| a.1).sum();
        if (mass - 1.0).abs() > MASS_ATOL {
            return Err(Error::domain(format!("total mass {mass} is not 1")));
        }
        for (a, &(p, _)) in atoms.iter().enumerate() {
            for &(q, _) in &atoms[a + 1..] {
                if space.d(p, q).is_infinite() {
                    return Err(Error::domain(format!(
                        "support spans infinite distance ({} to {})",
                        space.label(p),
                        space.label(q)
                    )));
                }
            }
        }
        Ok(FiniteMeasure { space, atoms })
    }

    pub fn from_labels(space: Arc<MetricSpace>, atoms: &[(&str, f64)]) -> Result<Self> {
        let idx = atoms
            .iter()
            .map(|&(l, w)| {
                space
                    .index_of(l)
                    .map(|i| (i, w))
                    .ok_or_else(|| Error::domain(format!("unknown point `{l}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, idx)
    }

    /// Result of weight arithmetic: merges repeated points, drops atoms
    /// below [`DROP_THRESHOLD`] and renormalizes if anything was dropped.
    pub(crate) fn from_arithmetic(space: Arc<MetricSpace>, weights: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
        for (p, w) in weights {
            *merged.entry(p).or_insert(0.0) += w;
        }
        let dropped: f64 = merged.values().filter(|&&w| w < DROP_THRESHOLD).sum();
        let mut atoms: Vec<(usize, f64)> = merged.into_iter().filter(|&(_, w)| w >= DROP_THRESHOLD).collect();
        if dropped != 0.0 {
            log::debug!("dropped {dropped:e} of mass in sub-threshold atoms; renormalizing");
            let mass: f64 = atoms.iter().map(|a| a.1).sum();
            for a in &mut atoms {
                a.1 /= mass;
            }
        }
        Self::new(space, atoms)
    }

    pub fn delta(space: Arc<MetricSpace>, x: usize) -> Result<Self> {
        if x >= space.len() {
            return Err(Error::domain(format!("point index {x} is not in the space")));
        }
        Ok(FiniteMeasure {
            space,
            atoms: vec![(x, 1.0)],
        })
    }

    /// Equal weights on the given points.
    pub fn uniform(space: Arc<MetricSpace>, points: &[usize]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::domain("uniform measure needs at least one point"));
        }
        let w = 1.0 / points.len() as f64;
        Self::from_arithmetic(space, points.iter().map(|&p| (p, w)))
    }

    pub fn space(&self) -> &Arc<MetricSpace> {
        &self.space
    }

    pub fn atoms(&self) -> &[(usize, f64)] {
        &self.atoms
    }

    pub fn support(&self) -> Vec<usize> {
        self.atoms.iter().map(|a| a.0).collect()
    }

    pub fn support_labels(&self) -> Vec<&str> {
        self.atoms.iter().map(|a| self.space.label(a.0)).collect()
    }

    pub fn weight(&self, point: usize) -> f64 {
        self.atoms
            .binary_search_by_key(&point, |a| a.0)
            .map(|i| self.atoms[i].1)
            .unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    /// Largest absolute weight difference over the union of supports.
    pub fn max_weight_diff(&self, other: &FiniteMeasure) -> f64 {
        let mut diff = 0.0_f64;
        for &(p, w) in &self.atoms {
            diff = diff.max((w - other.weight(p)).abs());
        }
        for &(p, w) in &other.atoms {
            diff = diff.max((w - self.weight(p)).abs());
        }
        diff
    }

    pub fn approx_eq(&self, other: &FiniteMeasure, atol: f64) -> bool {
        same_ambient(&self.space, &other.space) && self.max_weight_diff(other) <= atol
    }
}

/// `ν ≪ µ`, i.e. `supp ν ⊆ supp µ`.
pub fn is_absolutely_continuous(nu: &FiniteMeasure, mu: &FiniteMeasure) -> Result<bool> {
    check_ambient(&nu.space, &mu.space)?;
    Ok(nu.atoms.iter().all(|&(p, _)| mu.weight(p) > 0.0))
}

/// `f#µ`: moves each atom to its image, summing weights over fibers.
/// `f` returns `None` where it is undefined.
pub fn pushforward<F>(f: F, mu: &FiniteMeasure, target: &Arc<MetricSpace>) -> Result<FiniteMeasure>
where
    F: Fn(usize) -> Option<usize>,
{
    let moved = mu
        .atoms
        .iter()
        .map(|&(p, w)| {
            f(p).filter(|&q| q < target.len())
                .map(|q| (q, w))
                .ok_or_else(|| Error::domain(format!("map is undefined at {}", mu.space.label(p))))
        })
        .collect::<Result<Vec<_>>>()?;
    FiniteMeasure::from_arithmetic(Arc::clone(target), moved)
}

/// Product measure `Σ λᵢηⱼ δ_{(xᵢ,yⱼ)}` on a freshly built L∞ product.
pub fn product_measure(mu: &FiniteMeasure, nu: &FiniteMeasure) -> FiniteMeasure {
    let target = linf_product(&mu.space, &nu.space);
    product_measure_in(&target, mu, nu).expect("target is the product of the factor spaces")
}

/// Product measure on an existing product space.
pub fn product_measure_in(target: &Arc<MetricSpace>, mu: &FiniteMeasure, nu: &FiniteMeasure) -> Result<FiniteMeasure> {
    let SpaceProvenance::Product { left, right } = target.provenance() else {
        return Err(Error::domain("target space is not a recorded product"));
    };
    check_ambient(left, &mu.space)?;
    check_ambient(right, &nu.space)?;
    let ny = right.len();
    let mut atoms = Vec::with_capacity(mu.atoms.len() * nu.atoms.len());
    for &(i, l) in &mu.atoms {
        for &(j, e) in &nu.atoms {
            atoms.push((i * ny + j, l * e));
        }
    }
    FiniteMeasure::from_arithmetic(Arc::clone(target), atoms)
}

/// Both marginals of a measure on a recorded product space.
pub fn marginals(alpha: &FiniteMeasure) -> Result<(FiniteMeasure, FiniteMeasure)> {
    let SpaceProvenance::Product { left, right } = alpha.space.provenance() else {
        return Err(Error::domain("measure does not live on a recorded product space"));
    };
    let ny = right.len();
    let first = alpha.atoms.iter().map(|&(a, w)| (a / ny, w));
    let second = alpha.atoms.iter().map(|&(a, w)| (a % ny, w));
    Ok((
        FiniteMeasure::from_arithmetic(Arc::clone(left), first)?,
        FiniteMeasure::from_arithmetic(Arc::clone(right), second)?,
    ))
}

/// `t µ + (1 − t) ν`.
pub fn convex_combination(t: f64, mu: &FiniteMeasure, nu: &FiniteMeasure) -> Result<FiniteMeasure> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::domain(format!("t = {t} is outside [0, 1]")));
    }
    check_ambient(&mu.space, &nu.space)?;
    let weights = mu
        .atoms
        .iter()
        .map(|&(p, w)| (p, t * w))
        .chain(nu.atoms.iter().map(|&(p, w)| (p, (1.0 - t) * w)));
    FiniteMeasure::from_arithmetic(Arc::clone(&mu.space), weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> Arc<MetricSpace> {
        let labels = (0..n).map(|i| format!("p{i}")).collect();
        let rows = (0..n).map(|i| (0..n).map(|j| (i as f64 - j as f64).abs()).collect()).collect();
        Arc::new(MetricSpace::new(labels, rows).unwrap())
    }

    #[test]
    fn deltas() {
        let x = line(3);
        let d = FiniteMeasure::delta(x.clone(), 1).unwrap();
        assert_eq!(d.support(), vec![1]);
        assert_eq!(d.total_mass(), 1.0);
        assert_ne!(d, FiniteMeasure::delta(x.clone(), 2).unwrap());
        assert!(matches!(FiniteMeasure::delta(x, 7), Err(Error::Domain(_))));
    }

    #[test]
    fn invariants_are_enforced() {
        let x = line(3);
        assert!(FiniteMeasure::new(x.clone(), vec![(0, 0.5), (1, 0.4)]).is_err());
        assert!(FiniteMeasure::new(x.clone(), vec![(0, 0.5), (0, 0.5)]).is_err());
        assert!(FiniteMeasure::new(x.clone(), vec![(0, 1.5), (1, -0.5)]).is_err());
        assert!(FiniteMeasure::new(x.clone(), vec![(0, 1.0), (1, 0.0)]).is_err());
        let m = FiniteMeasure::new(x, vec![(2, 0.5), (0, 0.5)]).unwrap();
        assert_eq!(m.support(), vec![0, 2]);
    }

    #[test]
    fn infinite_support_is_rejected() {
        let a = Arc::new(crate::metric_space::discrete(&["a", "b"], f64::INFINITY).unwrap());
        assert!(FiniteMeasure::new(a, vec![(0, 0.5), (1, 0.5)]).is_err());
    }

    #[test]
    fn absolute_continuity() {
        let x = line(3);
        let mu = FiniteMeasure::uniform(x.clone(), &[0, 1]).unwrap();
        let da = FiniteMeasure::delta(x.clone(), 0).unwrap();
        let ac = FiniteMeasure::uniform(x.clone(), &[0, 2]).unwrap();
        assert!(is_absolutely_continuous(&mu, &mu).unwrap());
        assert!(is_absolutely_continuous(&da, &mu).unwrap());
        assert!(!is_absolutely_continuous(&ac, &mu).unwrap());
        let other = FiniteMeasure::delta(line(2), 0).unwrap();
        assert!(matches!(is_absolutely_continuous(&other, &mu), Err(Error::Domain(_))));
    }

    #[test]
    fn pushforward_merges_fibers() {
        let x = line(3);
        let mu = FiniteMeasure::uniform(x.clone(), &[0, 1]).unwrap();
        assert_eq!(pushforward(Some, &mu, &x).unwrap(), mu);
        let c = pushforward(|_| Some(2), &mu, &x).unwrap();
        assert_eq!(c, FiniteMeasure::delta(x.clone(), 2).unwrap());
        let err = pushforward(|p| (p == 0).then_some(0), &mu, &x).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn product_and_marginals() {
        let x = line(2);
        let y = line(3);
        let mu = FiniteMeasure::uniform(x.clone(), &[0, 1]).unwrap();
        let dy = FiniteMeasure::delta(y.clone(), 2).unwrap();
        let p = product_measure(&mu, &dy);
        assert_eq!(p.support_labels(), vec!["(p0,p2)", "(p1,p2)"]);
        assert!((p.total_mass() - 1.0).abs() < MASS_ATOL);

        let (a, b) = marginals(&p).unwrap();
        assert!(a.approx_eq(&mu, MASS_ATOL));
        assert!(b.approx_eq(&dy, MASS_ATOL));

        // ½δ(x0,y0) + ½δ(x1,y1)
        let s = p.space().clone();
        let diag = FiniteMeasure::new(s.clone(), vec![(0, 0.5), (4, 0.5)]).unwrap();
        let (a, b) = marginals(&diag).unwrap();
        assert_eq!(a.atoms(), &[(0, 0.5), (1, 0.5)]);
        assert_eq!(b.atoms(), &[(0, 0.5), (1, 0.5)]);

        assert!(matches!(marginals(&mu), Err(Error::Domain(_))));
    }

    #[test]
    fn convex_combinations() {
        let x = line(3);
        let a = FiniteMeasure::delta(x.clone(), 0).unwrap();
        let b = FiniteMeasure::delta(x.clone(), 1).unwrap();
        assert_eq!(convex_combination(1.0, &a, &b).unwrap(), a);
        assert_eq!(convex_combination(0.0, &a, &b).unwrap(), b);
        let half = convex_combination(0.5, &a, &b).unwrap();
        assert_eq!(half.atoms(), &[(0, 0.5), (1, 0.5)]);
        assert!(matches!(convex_combination(1.5, &a, &b), Err(Error::Domain(_))));
    }

    #[test]
    fn tiny_atoms_are_dropped_and_renormalized() {
        let x = line(2);
        let m = FiniteMeasure::from_arithmetic(x, vec![(0, 1.0), (1, 1e-17)]).unwrap();
        assert_eq!(m.atoms(), &[(0, 1.0)]);
    }
}
