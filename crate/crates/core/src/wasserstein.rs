//! Exact p-Wasserstein distances between finitely-supported measures.
//!
//! The optimal coupling is found with the transportation simplex (the
//! network simplex specialised to the complete bipartite graph between the
//! two supports) on costs `d^p`. Each solve returns dual potentials, so the
//! optimality of the plan can be re-checked by complementary slackness.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{same_ambient, FiniteMeasure};

const MAX_PIVOTS: usize = 1_000_000;

/// Consecutive degenerate pivots after which the entering rule switches
/// from steepest reduced cost to Bland's rule, which cannot cycle.
const BLAND_AFTER: usize = 32;

/// Largest support size accepted by [`wasserstein_bruteforce`].
pub const BRUTEFORCE_MAX_SUPPORT: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WassersteinConfig {
    pub p: f64,
    pub tolerance: f64,
}

impl Default for WassersteinConfig {
    fn default() -> Self {
        WassersteinConfig { p: 1.0, tolerance: 1e-9 }
    }
}

impl WassersteinConfig {
    pub fn with_p(p: f64) -> Result<Self> {
        let c = WassersteinConfig {
            p,
            ..Default::default()
        };
        c.check()?;
        Ok(c)
    }

    fn check(&self) -> Result<()> {
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(Error::domain(format!("p must lie in [1, ∞), got {}", self.p)));
        }
        Ok(())
    }

    fn cost(&self, d: f64) -> f64 {
        if self.p == 1.0 {
            d
        } else {
            d.powf(self.p)
        }
    }

    fn root(&self, c: f64) -> f64 {
        if self.p == 1.0 {
            c
        } else {
            c.powf(1.0 / self.p)
        }
    }
}

/// A candidate coupling between two measures; `mass[i][j]` moves from the
/// `i`-th atom of the row measure to the `j`-th atom of the column measure.
#[derive(Clone, Debug)]
pub struct TransportPlan {
    row: FiniteMeasure,
    col: FiniteMeasure,
    mass: Vec<Vec<f64>>,
}

/// Result of [`is_coupling`].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum CouplingCheck {
    Coupling,
    Negative { row: usize, col: usize, value: f64 },
    RowSum { row: usize, expected: f64, actual: f64 },
    ColSum { col: usize, expected: f64, actual: f64 },
}

impl CouplingCheck {
    pub fn is_coupling(&self) -> bool {
        matches!(self, CouplingCheck::Coupling)
    }
}

impl TransportPlan {
    pub fn new(row: FiniteMeasure, col: FiniteMeasure, mass: Vec<Vec<f64>>) -> Result<Self> {
        let (m, n) = (row.atoms().len(), col.atoms().len());
        if mass.len() != m || mass.iter().any(|r| r.len() != n) {
            return Err(Error::structural(format!("plan is not {m}×{n}")));
        }
        Ok(TransportPlan { row, col, mass })
    }

    /// The independent coupling `λᵢ ηⱼ`.
    pub fn independent(row: FiniteMeasure, col: FiniteMeasure) -> Self {
        let mass = row
            .atoms()
            .iter()
            .map(|&(_, l)| col.atoms().iter().map(|&(_, e)| l * e).collect())
            .collect();
        TransportPlan { row, col, mass }
    }

    pub fn row_measure(&self) -> &FiniteMeasure {
        &self.row
    }

    pub fn col_measure(&self) -> &FiniteMeasure {
        &self.col
    }

    pub fn mass(&self) -> &[Vec<f64>] {
        &self.mass
    }

    /// `Σ mass · d^p`.
    pub fn cost(&self, config: &WassersteinConfig) -> f64 {
        let space = self.row.space();
        let mut total = 0.0;
        for (i, &(x, _)) in self.row.atoms().iter().enumerate() {
            for (j, &(y, _)) in self.col.atoms().iter().enumerate() {
                let m = self.mass[i][j];
                if m != 0.0 {
                    total += m * config.cost(space.d(x, y));
                }
            }
        }
        total
    }

    /// Nonzero entries as `(from, to, mass)` point labels.
    pub fn entries(&self) -> Vec<(&str, &str, f64)> {
        let space = self.row.space();
        let mut out = Vec::new();
        for (i, &(x, _)) in self.row.atoms().iter().enumerate() {
            for (j, &(y, _)) in self.col.atoms().iter().enumerate() {
                if self.mass[i][j] > 0.0 {
                    out.push((space.label(x), space.label(y), self.mass[i][j]));
                }
            }
        }
        out
    }
}

/// Checks nonnegativity and both marginal constraints within `tolerance`.
pub fn is_coupling(plan: &TransportPlan, tolerance: f64) -> CouplingCheck {
    for (i, row) in plan.mass.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v < 0.0 {
                return CouplingCheck::Negative { row: i, col: j, value: v };
            }
        }
    }
    for (i, &(_, w)) in plan.row.atoms().iter().enumerate() {
        let actual: f64 = plan.mass[i].iter().sum();
        if (actual - w).abs() > tolerance {
            return CouplingCheck::RowSum { row: i, expected: w, actual };
        }
    }
    for (j, &(_, w)) in plan.col.atoms().iter().enumerate() {
        let actual: f64 = plan.mass.iter().map(|r| r[j]).sum();
        if (actual - w).abs() > tolerance {
            return CouplingCheck::ColSum { col: j, expected: w, actual };
        }
    }
    CouplingCheck::Coupling
}

/// An optimal transport together with its optimality certificate.
#[derive(Clone, Debug)]
pub struct Transport {
    pub distance: f64,
    /// `None` when the supports are at infinite distance.
    pub plan: Option<TransportPlan>,
    /// Dual potentials `u` (rows) and `v` (columns) with
    /// `cᵢⱼ − uᵢ − vⱼ ≥ 0`, tight on the support of the plan.
    pub row_potentials: Vec<f64>,
    pub col_potentials: Vec<f64>,
}

impl Transport {
    /// Re-checks complementary slackness and dual feasibility against the
    /// cost matrix `d^p`.
    pub fn is_certified_optimal(&self, config: &WassersteinConfig) -> bool {
        let Some(plan) = &self.plan else {
            return self.distance.is_infinite();
        };
        let space = plan.row.space();
        let scale = 1.0_f64.max(
            plan.row
                .atoms()
                .iter()
                .flat_map(|&(x, _)| plan.col.atoms().iter().map(move |&(y, _)| config.cost(space.d(x, y))))
                .fold(0.0, f64::max),
        );
        let tol = config.tolerance * scale;
        for (i, &(x, _)) in plan.row.atoms().iter().enumerate() {
            for (j, &(y, _)) in plan.col.atoms().iter().enumerate() {
                let reduced = config.cost(space.d(x, y)) - self.row_potentials[i] - self.col_potentials[j];
                if reduced < -tol {
                    return false;
                }
                if plan.mass[i][j] > config.tolerance && reduced.abs() > tol {
                    return false;
                }
            }
        }
        is_coupling(plan, config.tolerance).is_coupling()
    }
}

fn check_inputs(mu: &FiniteMeasure, nu: &FiniteMeasure, config: &WassersteinConfig) -> Result<()> {
    config.check()?;
    if !same_ambient(mu.space(), nu.space()) {
        return Err(Error::domain("measures live on different spaces"));
    }
    Ok(())
}

fn cost_matrix(mu: &FiniteMeasure, nu: &FiniteMeasure, config: &WassersteinConfig) -> Vec<Vec<f64>> {
    let space = mu.space();
    mu.atoms()
        .iter()
        .map(|&(x, _)| nu.atoms().iter().map(|&(y, _)| config.cost(space.d(x, y))).collect())
        .collect()
}

/// Exact p-Wasserstein distance with an optimal plan and dual certificate.
pub fn wasserstein(mu: &FiniteMeasure, nu: &FiniteMeasure, config: &WassersteinConfig) -> Result<Transport> {
    check_inputs(mu, nu, config)?;
    let cost = cost_matrix(mu, nu, config);
    if cost.iter().flatten().any(|c| c.is_infinite()) {
        return Ok(Transport {
            distance: f64::INFINITY,
            plan: None,
            row_potentials: Vec::new(),
            col_potentials: Vec::new(),
        });
    }
    if mu.atoms() == nu.atoms() {
        let n = mu.atoms().len();
        let mass = (0..n)
            .map(|i| (0..n).map(|j| if i == j { mu.atoms()[i].1 } else { 0.0 }).collect())
            .collect();
        return Ok(Transport {
            distance: 0.0,
            plan: Some(TransportPlan::new(mu.clone(), nu.clone(), mass)?),
            row_potentials: vec![0.0; n],
            col_potentials: vec![0.0; n],
        });
    }
    let supply: Vec<f64> = mu.atoms().iter().map(|a| a.1).collect();
    let demand: Vec<f64> = nu.atoms().iter().map(|a| a.1).collect();
    let solved = TransportSimplex::new(&supply, &demand, &cost).solve()?;
    let plan = TransportPlan::new(mu.clone(), nu.clone(), solved.mass)?;
    let total = plan.cost(config);
    Ok(Transport {
        distance: config.root(total.max(0.0)),
        plan: Some(plan),
        row_potentials: solved.u,
        col_potentials: solved.v,
    })
}

struct Solved {
    mass: Vec<Vec<f64>>,
    u: Vec<f64>,
    v: Vec<f64>,
}

/// Transportation simplex. Nodes `0..m` are rows and
/// `m..m+n` are columns; the basis is a spanning tree of `m + n − 1` cells.
struct TransportSimplex<'a> {
    m: usize,
    n: usize,
    cost: &'a [Vec<f64>],
    mass: Vec<Vec<f64>>,
    basic: Vec<Vec<bool>>,
    basis: Vec<(usize, usize)>,
    eps: f64,
}

impl<'a> TransportSimplex<'a> {
    fn new(supply: &[f64], demand: &[f64], cost: &'a [Vec<f64>]) -> Self {
        let (m, n) = (supply.len(), demand.len());
        let mut mass = vec![vec![0.0; n]; m];
        let mut basic = vec![vec![false; n]; m];
        let mut basis = Vec::with_capacity(m + n - 1);
        // North-west corner start: a staircase, hence a spanning tree.
        let (mut a, mut b) = (supply.to_vec(), demand.to_vec());
        let (mut i, mut j) = (0, 0);
        loop {
            let amt = a[i].min(b[j]).max(0.0);
            mass[i][j] = amt;
            basic[i][j] = true;
            basis.push((i, j));
            a[i] -= amt;
            b[j] -= amt;
            if i == m - 1 && j == n - 1 {
                break;
            }
            if i == m - 1 {
                j += 1;
            } else if j == n - 1 || a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
        }
        // Rounding leaves the last cell with the residual; absorb it.
        mass[m - 1][n - 1] = mass[m - 1][n - 1].max(0.0);
        let scale = cost.iter().flatten().fold(1.0_f64, |acc, &c| acc.max(c.abs()));
        TransportSimplex {
            m,
            n,
            cost,
            mass,
            basic,
            basis,
            eps: 1e-12 * scale,
        }
    }

    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        // node -> (neighbour node, basis slot)
        let mut adj = vec![Vec::new(); self.m + self.n];
        for (slot, &(i, j)) in self.basis.iter().enumerate() {
            adj[i].push((self.m + j, slot));
            adj[self.m + j].push((i, slot));
        }
        adj
    }

    fn potentials(&self, adj: &[Vec<(usize, usize)>]) -> (Vec<f64>, Vec<f64>) {
        let (m, n) = (self.m, self.n);
        let mut pot = vec![f64::NAN; m + n];
        pot[0] = 0.0;
        let mut stack = vec![0];
        while let Some(node) = stack.pop() {
            for &(next, slot) in &adj[node] {
                if pot[next].is_nan() {
                    let (i, j) = self.basis[slot];
                    // u_i + v_j = c_ij on basic cells
                    pot[next] = self.cost[i][j] - pot[node];
                    stack.push(next);
                }
            }
        }
        (pot[..m].to_vec(), pot[m..].to_vec())
    }

    /// Basis slots on the tree path from row `i` to column `j`.
    fn tree_path(&self, adj: &[Vec<(usize, usize)>], i: usize, j: usize) -> Vec<usize> {
        let target = self.m + j;
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.m + self.n];
        let mut seen = vec![false; self.m + self.n];
        seen[i] = true;
        let mut queue = std::collections::VecDeque::from([i]);
        while let Some(node) = queue.pop_front() {
            if node == target {
                break;
            }
            for &(next, slot) in &adj[node] {
                if !seen[next] {
                    seen[next] = true;
                    parent[next] = Some((node, slot));
                    queue.push_back(next);
                }
            }
        }
        let mut path = Vec::new();
        let mut node = target;
        while let Some((prev, slot)) = parent[node] {
            path.push(slot);
            node = prev;
        }
        path.reverse();
        path
    }

    fn solve(mut self) -> Result<Solved> {
        let mut degenerate_streak = 0usize;
        for _ in 0..MAX_PIVOTS {
            let adj = self.adjacency();
            let (u, v) = self.potentials(&adj);
            let mut candidates = (0..self.m)
                .flat_map(|i| (0..self.n).map(move |j| (i, j)))
                .filter(|&(i, j)| !self.basic[i][j])
                .map(|(i, j)| ((i, j), self.cost[i][j] - u[i] - v[j]))
                .filter(|&(_, rc)| rc < -self.eps);
            let entering = if degenerate_streak > BLAND_AFTER {
                candidates.next().map(|c| c.0)
            } else {
                candidates.min_by(|a, b| a.1.total_cmp(&b.1)).map(|c| c.0)
            };
            let Some((ei, ej)) = entering else {
                return Ok(Solved {
                    mass: self.mass,
                    u,
                    v,
                });
            };
            // Path from row ei to column ej; cells at odd positions lose mass.
            let path = self.tree_path(&adj, ei, ej);
            let losing = path.iter().step_by(2).copied();
            let theta = losing
                .clone()
                .map(|s| {
                    let (i, j) = self.basis[s];
                    self.mass[i][j]
                })
                .fold(f64::INFINITY, f64::min);
            let leaving = losing
                .filter(|&s| {
                    let (i, j) = self.basis[s];
                    self.mass[i][j] == theta
                })
                .min_by_key(|&s| self.basis[s])
                .expect("cycle has a losing cell");
            if theta == 0.0 {
                degenerate_streak += 1;
            } else {
                degenerate_streak = 0;
            }
            self.mass[ei][ej] += theta;
            for (pos, &s) in path.iter().enumerate() {
                let (i, j) = self.basis[s];
                if pos % 2 == 0 {
                    self.mass[i][j] -= theta;
                } else {
                    self.mass[i][j] += theta;
                }
            }
            let (li, lj) = self.basis[leaving];
            self.mass[li][lj] = 0.0;
            self.basic[li][lj] = false;
            self.basic[ei][ej] = true;
            self.basis[leaving] = (ei, ej);
        }
        Err(Error::Refused(format!("transport solver exceeded {MAX_PIVOTS} pivots")))
    }
}

/// Independent oracle: enumerates every basic solution (spanning tree of
/// cells) of the transportation polytope and keeps the cheapest feasible
/// one. Exponential; refuses supports larger than
/// [`BRUTEFORCE_MAX_SUPPORT`].
pub fn wasserstein_bruteforce(mu: &FiniteMeasure, nu: &FiniteMeasure, config: &WassersteinConfig) -> Result<f64> {
    check_inputs(mu, nu, config)?;
    let (m, n) = (mu.atoms().len(), nu.atoms().len());
    if m > BRUTEFORCE_MAX_SUPPORT || n > BRUTEFORCE_MAX_SUPPORT {
        return Err(Error::Refused(format!(
            "brute-force oracle handles supports up to {BRUTEFORCE_MAX_SUPPORT} atoms, got {m} and {n}"
        )));
    }
    let cost = cost_matrix(mu, nu, config);
    if cost.iter().flatten().any(|c| c.is_infinite()) {
        return Ok(f64::INFINITY);
    }
    let supply: Vec<f64> = mu.atoms().iter().map(|a| a.1).collect();
    let demand: Vec<f64> = nu.atoms().iter().map(|a| a.1).collect();
    let cells: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let k = m + n - 1;
    let mut best = f64::INFINITY;
    let mut chosen = Vec::with_capacity(k);
    enumerate_subsets(&cells, k, 0, &mut chosen, &mut |subset| {
        if let Some(flow) = tree_solution(m, n, subset, &supply, &demand) {
            let c: f64 = subset.iter().zip(&flow).map(|(&(i, j), f)| f * cost[i][j]).sum();
            best = best.min(c);
        }
    });
    Ok(config.root(best.max(0.0)))
}

fn enumerate_subsets<F: FnMut(&[(usize, usize)])>(
    cells: &[(usize, usize)],
    k: usize,
    start: usize,
    chosen: &mut Vec<(usize, usize)>,
    visit: &mut F,
) {
    if chosen.len() == k {
        visit(chosen);
        return;
    }
    let need = k - chosen.len();
    for idx in start..=cells.len().saturating_sub(need) {
        chosen.push(cells[idx]);
        enumerate_subsets(cells, k, idx + 1, chosen, visit);
        chosen.pop();
    }
}

/// Flows on a set of `m + n − 1` cells, if the cells form a spanning tree
/// of the bipartite graph and the forced flows are nonnegative.
fn tree_solution(m: usize, n: usize, cells: &[(usize, usize)], supply: &[f64], demand: &[f64]) -> Option<Vec<f64>> {
    // Acyclicity via union-find; m + n − 1 acyclic edges span the graph.
    let mut parent: Vec<usize> = (0..m + n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for &(i, j) in cells {
        let (a, b) = (find(&mut parent, i), find(&mut parent, m + j));
        if a == b {
            return None;
        }
        parent[a] = b;
    }
    // Peel leaves: a degree-one node forces the flow on its only cell.
    let mut residual: Vec<f64> = supply.iter().chain(demand).copied().collect();
    let mut alive = vec![true; cells.len()];
    let mut flow = vec![0.0; cells.len()];
    for _ in 0..cells.len() {
        let mut degree = vec![0usize; m + n];
        for (e, &(i, j)) in cells.iter().enumerate() {
            if alive[e] {
                degree[i] += 1;
                degree[m + j] += 1;
            }
        }
        let (e, leaf) = cells.iter().enumerate().filter(|(e, _)| alive[*e]).find_map(|(e, &(i, j))| {
            if degree[i] == 1 {
                Some((e, i))
            } else if degree[m + j] == 1 {
                Some((e, m + j))
            } else {
                None
            }
        })?;
        let (i, j) = cells[e];
        let other = if leaf == i { m + j } else { i };
        let f = residual[leaf];
        flow[e] = f;
        residual[leaf] = 0.0;
        residual[other] -= f;
        alive[e] = false;
    }
    if flow.iter().any(|&f| f < -1e-12) {
        return None;
    }
    Some(flow.into_iter().map(|f| f.max(0.0)).collect())
}

/// Distances from a delta to any measure need no optimisation: the only
/// coupling ships every atom from the delta's point.
pub fn wasserstein_from_delta(x: usize, nu: &FiniteMeasure, config: &WassersteinConfig) -> f64 {
    let space: &Arc<_> = nu.space();
    let total: f64 = nu.atoms().iter().map(|&(y, w)| w * config.cost(space.d(x, y))).sum();
    config.root(total)
}
