//! The explicit homotopy equivalences for products and wedge sums of
//! thickenings, and a sampling harness that checks them.
//!
//! Product: `ι` sends a pair of measures to their product measure, `ρ`
//! takes both marginals. Wedge: `ι` is the inclusion of `M ∨ N` into a
//! thickening `V` over `X ∨ Y`, and `ρ` pushes the lighter side's mass onto
//! the basepoint. In both cases `H(t, µ) = t µ + (1 − t) ι(ρ(µ))`.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{convex_combination, marginals, product_measure_in, FiniteMeasure, MASS_ATOL};
use crate::metric_space::{MetricSpace, SpaceProvenance, WedgeOrigin};
use crate::sample::{random_contained_measure, rng};
use crate::thickening::{
    contains, is_mixed, thickening_product, thickening_wedge, wedge_hypothesis_check, wedge_sides, Construction,
    PointedThickening, Thickening,
};
use crate::wasserstein::{wasserstein, WassersteinConfig};

/// Tolerance for `ρ ∘ ι = id` and the endpoint identities of `H`.
pub const IDENTITY_ATOL: f64 = 1e-12;

fn check_t(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::domain(format!("t = {t} is outside [0, 1]")))
    }
}

/// `ι(µ, ν) = Σ λᵢηⱼ δ_{(xᵢ,yⱼ)}` on the product space `target`.
pub fn product_inject(mu: &FiniteMeasure, nu: &FiniteMeasure, target: &Arc<MetricSpace>) -> Result<FiniteMeasure> {
    product_measure_in(target, mu, nu)
}

/// `ρ(α)`: the two marginals.
pub fn product_retract(alpha: &FiniteMeasure) -> Result<(FiniteMeasure, FiniteMeasure)> {
    marginals(alpha)
}

/// `H(t, α) = t α + (1 − t) ι(ρ(α))`.
pub fn product_homotopy(t: f64, alpha: &FiniteMeasure) -> Result<FiniteMeasure> {
    check_t(t)?;
    let (mu, nu) = product_retract(alpha)?;
    let back = product_inject(&mu, &nu, alpha.space())?;
    convex_combination(t, alpha, &back)
}

/// Which piece of the wedge retraction formula to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WedgeBranch {
    /// `λ ≥ η`: keep the left side.
    Left,
    /// `η ≥ λ`: keep the right side.
    Right,
}

/// Mass of a measure on a wedge split as `(ε, λ, η)`: at the basepoint, on
/// the left side and on the right side.
pub fn wedge_masses(mu: &FiniteMeasure) -> Result<(f64, f64, f64)> {
    let sides = wedge_sides(mu.space())?;
    let (mut eps, mut lambda, mut eta) = (0.0, 0.0, 0.0);
    for &(p, w) in mu.atoms() {
        match sides[p] {
            WedgeOrigin::Basepoint => eps += w,
            WedgeOrigin::Left(_) => lambda += w,
            WedgeOrigin::Right(_) => eta += w,
        }
    }
    Ok((eps, lambda, eta))
}

/// Raw weights of one branch of the retraction formula, without checking
/// that the branch applies. Outside its region a branch produces negative
/// weights; this is exposed to test that the branches meet at `λ = η`.
pub fn wedge_retract_branch(mu: &FiniteMeasure, branch: WedgeBranch) -> Result<Vec<(usize, f64)>> {
    let sides = wedge_sides(mu.space())?;
    let base = sides
        .iter()
        .position(|&o| o == WedgeOrigin::Basepoint)
        .expect("wedge has a basepoint");
    let (eps, lambda, eta) = wedge_masses(mu)?;
    let (keep, other) = match branch {
        WedgeBranch::Left => (lambda, eta),
        WedgeBranch::Right => (eta, lambda),
    };
    let ratio = if keep == 0.0 { 1.0 } else { other / keep };
    let mut out = vec![(base, 2.0 * other + eps)];
    for &(p, w) in mu.atoms() {
        let kept = match (sides[p], branch) {
            (WedgeOrigin::Left(_), WedgeBranch::Left) | (WedgeOrigin::Right(_), WedgeBranch::Right) => true,
            _ => false,
        };
        if kept {
            out.push((p, (1.0 - ratio) * w));
        }
    }
    Ok(out)
}

/// `ρ(µ)` for a measure on a recorded wedge space. Ties `λ = η` use the
/// left branch; both give `δ_⋆` there.
pub fn wedge_retract(mu: &FiniteMeasure) -> Result<FiniteMeasure> {
    let (_, lambda, eta) = wedge_masses(mu)?;
    let branch = if lambda >= eta { WedgeBranch::Left } else { WedgeBranch::Right };
    let weights = wedge_retract_branch(mu, branch)?;
    FiniteMeasure::from_arithmetic(Arc::clone(mu.space()), weights)
}

/// `H(t, µ) = t µ + (1 − t) ρ(µ)` on a wedge space (with `ι` the identity
/// on measures).
pub fn wedge_homotopy(t: f64, mu: &FiniteMeasure) -> Result<FiniteMeasure> {
    check_t(t)?;
    let back = wedge_retract(mu)?;
    convex_combination(t, mu, &back)
}

/// The product deformation between `|M| × |N|` and `|M ∏ N|`.
#[derive(Clone, Debug)]
pub struct ProductDeformation {
    pub left: Thickening,
    pub right: Thickening,
    pub product: Thickening,
}

impl ProductDeformation {
    pub fn new(left: &Thickening, right: &Thickening) -> Self {
        ProductDeformation {
            left: left.clone(),
            right: right.clone(),
            product: thickening_product(left, right),
        }
    }

    /// Recovers the factors of a thickening built by
    /// [`thickening_product`].
    pub fn from_product(product: &Thickening) -> Result<Self> {
        match product.construction() {
            Construction::Product { left, right } => Ok(ProductDeformation {
                left: (**left).clone(),
                right: (**right).clone(),
                product: product.clone(),
            }),
            _ => Err(Error::domain("thickening was not built as a product")),
        }
    }

    pub fn inject(&self, mu: &FiniteMeasure, nu: &FiniteMeasure) -> Result<FiniteMeasure> {
        if !contains(&self.left, mu)? || !contains(&self.right, nu)? {
            return Err(Error::Precondition("measures are not in the factor thickenings".into()));
        }
        product_inject(mu, nu, self.product.space())
    }

    pub fn retract(&self, alpha: &FiniteMeasure) -> Result<(FiniteMeasure, FiniteMeasure)> {
        product_retract(alpha)
    }

    pub fn homotopy(&self, t: f64, alpha: &FiniteMeasure) -> Result<FiniteMeasure> {
        if !contains(&self.product, alpha)? {
            return Err(Error::Precondition("measure is not in the product thickening".into()));
        }
        product_homotopy(t, alpha)
    }
}

/// The wedge deformation between `|V|` and `|M ∨ N|`, available once the
/// wedge hypothesis on `V` has been checked.
#[derive(Clone, Debug)]
pub struct WedgeDeformation {
    pub v: Thickening,
    pub left: PointedThickening,
    pub right: PointedThickening,
    pub wedge: PointedThickening,
}

impl WedgeDeformation {
    pub fn new(v: &Thickening, left: &PointedThickening, right: &PointedThickening) -> Result<Self> {
        let h = wedge_hypothesis_check(v, left, right)?;
        if !h.holds {
            return Err(Error::Precondition(format!("wedge hypothesis fails: {h:?}")));
        }
        wedge_sides(v.space())?;
        Ok(WedgeDeformation {
            v: v.clone(),
            left: left.clone(),
            right: right.clone(),
            wedge: thickening_wedge(left, right)?,
        })
    }

    /// `ι`: a measure of `|M ∨ N|` viewed in `|V|`.
    pub fn inject(&self, mu: &FiniteMeasure) -> Result<FiniteMeasure> {
        if !self.wedge.thickening.space().same_metric(mu.space()) || !self.wedge.thickening.is_face_of_points(&mu.support())
        {
            return Err(Error::Precondition("measure is not in the wedge thickening".into()));
        }
        FiniteMeasure::new(Arc::clone(self.v.space()), mu.atoms().to_vec())
    }

    pub fn retract(&self, mu: &FiniteMeasure) -> Result<FiniteMeasure> {
        wedge_retract(mu)
    }

    pub fn homotopy(&self, t: f64, mu: &FiniteMeasure) -> Result<FiniteMeasure> {
        if !contains(&self.v, mu)? {
            return Err(Error::Precondition("measure is not in V".into()));
        }
        wedge_homotopy(t, mu)
    }
}

/// What [`verify_deformation`] checks.
#[derive(Clone, Copy, Debug)]
pub enum DeformationTarget<'a> {
    Product(&'a ProductDeformation),
    Wedge(&'a WedgeDeformation),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HomotopyReport {
    pub kind: &'static str,
    pub samples: usize,
    pub seed: u64,
    pub retraction_identity_ok: bool,
    pub endpoint_ok: bool,
    pub containment_ok: bool,
    pub support_ok: bool,
    pub mass_ok: bool,
    pub max_retraction_error: f64,
    pub max_endpoint_error: f64,
    /// Largest `W(H(t,µ), H(t,ν)) / W(µ,ν)` seen over consecutive sample
    /// pairs and the `t`-grid.
    pub sampled_lipschitz: f64,
    pub failures: Vec<String>,
}

impl HomotopyReport {
    pub fn passed(&self) -> bool {
        self.retraction_identity_ok && self.endpoint_ok && self.containment_ok && self.support_ok && self.mass_ok
    }
}

/// `t ∈ {0, 0.1, …, 1}`.
pub fn t_grid() -> impl Iterator<Item = f64> {
    (0..=10).map(|k| k as f64 / 10.0)
}

/// Samples `samples` measures in the thickening and checks, for each:
/// `ρ ∘ ι = id`, the endpoints of `H`, and that every `H(t, ·)` on the
/// `t`-grid stays inside the thickening with the expected support.
pub fn verify_deformation(target: DeformationTarget<'_>, samples: usize, seed: u64) -> Result<HomotopyReport> {
    let mut rng = rng(seed);
    let mut report = HomotopyReport {
        kind: match target {
            DeformationTarget::Product(_) => "product",
            DeformationTarget::Wedge(_) => "wedge",
        },
        samples,
        seed,
        retraction_identity_ok: true,
        endpoint_ok: true,
        containment_ok: true,
        support_ok: true,
        mass_ok: true,
        max_retraction_error: 0.0,
        max_endpoint_error: 0.0,
        sampled_lipschitz: 0.0,
        failures: Vec::new(),
    };
    let config = WassersteinConfig::default();
    let mut previous: Option<(FiniteMeasure, Vec<FiniteMeasure>)> = None;

    for k in 0..samples {
        // ρ ∘ ι on the small side.
        let rho_iota_err = match target {
            DeformationTarget::Product(d) => {
                let mu = random_contained_measure(&mut rng, &d.left);
                let nu = random_contained_measure(&mut rng, &d.right);
                let (a, b) = d.retract(&d.inject(&mu, &nu)?)?;
                a.max_weight_diff(&mu).max(b.max_weight_diff(&nu))
            }
            DeformationTarget::Wedge(d) => {
                let mu = random_contained_measure(&mut rng, &d.wedge.thickening);
                let back = d.retract(&d.inject(&mu)?)?;
                back.max_weight_diff(&mu)
            }
        };
        report.max_retraction_error = report.max_retraction_error.max(rho_iota_err);
        if rho_iota_err > IDENTITY_ATOL {
            report.retraction_identity_ok = false;
            report.failures.push(format!("sample {k}: ρ∘ι differs from id by {rho_iota_err:e}"));
        }

        // H on the large side.
        let (big, alpha) = match target {
            DeformationTarget::Product(d) => (&d.product, random_contained_measure(&mut rng, &d.product)),
            DeformationTarget::Wedge(d) => (&d.v, random_contained_measure(&mut rng, &d.v)),
        };
        let allowed = allowed_support(target, &alpha)?;
        let retracted = match target {
            DeformationTarget::Product(d) => {
                let (a, b) = d.retract(&alpha)?;
                product_inject(&a, &b, alpha.space())?
            }
            DeformationTarget::Wedge(d) => d.retract(&alpha)?,
        };
        let mut path = Vec::with_capacity(11);
        for t in t_grid() {
            let h = match target {
                DeformationTarget::Product(d) => d.homotopy(t, &alpha)?,
                DeformationTarget::Wedge(d) => d.homotopy(t, &alpha)?,
            };
            if (h.total_mass() - 1.0).abs() > MASS_ATOL {
                report.mass_ok = false;
                report.failures.push(format!("sample {k}, t={t}: mass {}", h.total_mass()));
            }
            if !contains(big, &h)? {
                report.containment_ok = false;
                report
                    .failures
                    .push(format!("sample {k}, t={t}: H leaves the thickening at {:?}", h.support_labels()));
            }
            if !h.support().iter().all(|p| allowed.contains(p)) {
                report.support_ok = false;
                report.failures.push(format!("sample {k}, t={t}: support escapes {:?}", allowed));
            }
            let endpoint = if t == 1.0 {
                Some(h.max_weight_diff(&alpha))
            } else if t == 0.0 {
                Some(h.max_weight_diff(&retracted))
            } else {
                None
            };
            if let Some(err) = endpoint {
                report.max_endpoint_error = report.max_endpoint_error.max(err);
                if err > IDENTITY_ATOL {
                    report.endpoint_ok = false;
                    report.failures.push(format!("sample {k}: H({t}, ·) endpoint off by {err:e}"));
                }
            }
            path.push(h);
        }

        if let Some((prev_alpha, prev_path)) = &previous {
            let base = wasserstein(prev_alpha, &alpha, &config)?.distance;
            if base > 1e-12 && base.is_finite() {
                for (a, b) in prev_path.iter().zip(&path) {
                    let d = wasserstein(a, b, &config)?.distance;
                    report.sampled_lipschitz = report.sampled_lipschitz.max(d / base);
                }
            }
        }
        previous = Some((alpha, path));
    }
    Ok(report)
}

/// Points that `H(t, α)` may charge: the product of the two projections of
/// `supp α`, or `supp µ ∪ {⋆}` for wedges.
fn allowed_support(target: DeformationTarget<'_>, alpha: &FiniteMeasure) -> Result<BTreeSet<usize>> {
    match target {
        DeformationTarget::Product(_) => {
            let SpaceProvenance::Product { right, .. } = alpha.space().provenance() else {
                return Err(Error::domain("not a product space"));
            };
            let ny = right.len();
            let xs: BTreeSet<usize> = alpha.support().iter().map(|a| a / ny).collect();
            let ys: BTreeSet<usize> = alpha.support().iter().map(|a| a % ny).collect();
            Ok(xs.iter().flat_map(|x| ys.iter().map(move |y| x * ny + y)).collect())
        }
        DeformationTarget::Wedge(_) => {
            let sides = wedge_sides(alpha.space())?;
            let mut s: BTreeSet<usize> = alpha.support().into_iter().collect();
            s.insert(sides.iter().position(|&o| o == WedgeOrigin::Basepoint).expect("basepoint"));
            Ok(s)
        }
    }
}

/// Whether a measure on a wedge space charges both sides.
pub fn is_mixed_measure(mu: &FiniteMeasure) -> Result<bool> {
    Ok(is_mixed(&mu.support(), wedge_sides(mu.space())?))
}
