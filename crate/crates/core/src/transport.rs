//! The exact finite transportation problem: cost matrices, optimal couplings
//! via the transportation simplex, and p-Wasserstein distances.
//!
//! Solver design: northwest-corner initialization + MODI pivoting, Bland's
//! rule for the entering cell, and a lexicographic ratio test. Demand j is
//! perturbed symbolically by eps^(j+1) (the last supply absorbs the sum), so
//! every basic flow is a pair (real part, integer eps-coefficients); because
//! the tree system is totally unimodular the coefficients stay integral. The
//! perturbation is dropped at extraction, where flows are re-solved from the
//! unperturbed marginals on the final basis tree.

use crate::error::{Error, Result};
use crate::linalg;
use crate::measures::DiscreteMeasure;
use std::io::Write;

/// Pivot tolerance: reduced costs above this are not eligible for entering.
pub const PIVOT_TOL: f64 = 1e-12;

/// Nonbasic reduced costs at or below this make the optimal plan's uniqueness
/// numerically dubious (heuristic threshold; see [`TransportPlan::unique_hint`]).
pub const UNIQUENESS_RC_TOL: f64 = 1e-10;

/// Which ground cost a [`CostMatrix`] holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostKind {
    /// ||x - y||^p for the chord metric (points may be off the sphere).
    ChordPower(f64),
    /// c_alpha(x, y) = 2 (1 - ||(1-alpha) x + alpha y||); requires on-sphere inputs.
    CAlpha(f64),
    /// Plain squared Euclidean distance in the ambient space.
    AmbientSquared,
    Custom,
}

/// Dense nonnegative cost matrix between the atoms of two measures.
#[derive(Debug, Clone)]
pub struct CostMatrix {
    entries: Vec<f64>,
    rows: usize,
    cols: usize,
    kind: CostKind,
}

impl CostMatrix {
    pub fn from_fn<F: Fn(&[f64], &[f64]) -> f64>(
        mu: &DiscreteMeasure,
        nu: &DiscreteMeasure,
        kind: CostKind,
        f: F,
    ) -> Result<Self> {
        if mu.ambient_dim() != nu.ambient_dim() {
            return Err(Error::DimensionMismatch(mu.ambient_dim(), nu.ambient_dim()));
        }
        let rows = mu.len();
        let cols = nu.len();
        let mut entries = Vec::with_capacity(rows * cols);
        for p in mu.points() {
            for q in nu.points() {
                let c = f(p, q);
                if !c.is_finite() || c < 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "cost entry {c} is not a finite nonnegative number"
                    )));
                }
                entries.push(c);
            }
        }
        Ok(Self {
            entries,
            rows,
            cols,
            kind,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn kind(&self) -> CostKind {
        self.kind
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }
}

/// `entries[i][j] = ||p_i - q_j||^p`. Off-sphere points are accepted.
pub fn chord_cost(mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: f64) -> Result<CostMatrix> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidArgument(format!("order p = {p} must be >= 1")));
    }
    CostMatrix::from_fn(mu, nu, CostKind::ChordPower(p), |x, y| {
        let d2 = linalg::dist_sq(x, y);
        if p == 2.0 {
            d2
        } else {
            d2.powf(p / 2.0)
        }
    })
}

/// Squared Euclidean cost in the ambient space (for W_2(R^{n+1}) distances).
pub fn squared_cost(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<CostMatrix> {
    CostMatrix::from_fn(mu, nu, CostKind::AmbientSquared, linalg::dist_sq)
}

/// c_alpha(x, y) = 2 (1 - ||(1-alpha) x + alpha y||), the minimal alpha-weighted
/// squared detour through a sphere point. Both measures must be on the sphere.
pub fn c_alpha_cost(mu: &DiscreteMeasure, nu: &DiscreteMeasure, alpha: f64) -> Result<CostMatrix> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!(
            "alpha = {alpha} must lie in [0, 1]"
        )));
    }
    for m in [mu, nu] {
        if !m.on_sphere() {
            let (index, norm) = m
                .points()
                .iter()
                .map(|p| linalg::norm(p))
                .enumerate()
                .max_by(|a, b| (a.1 - 1.0).abs().partial_cmp(&(b.1 - 1.0).abs()).unwrap())
                .unwrap();
            return Err(Error::NotOnSphere { index, norm });
        }
    }
    CostMatrix::from_fn(mu, nu, CostKind::CAlpha(alpha), |x, y| {
        let mid = linalg::add_scaled(&linalg::scale(x, 1.0 - alpha), alpha, y);
        // Clamp tiny negatives from ||mid|| barely above 1 in floating point.
        (2.0 * (1.0 - linalg::norm(&mid))).max(0.0)
    })
}

/// An optimal coupling produced by [`solve_transport`]: a basic solution with
/// at most rows + cols - 1 strictly positive entries.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    matrix: Vec<f64>,
    rows: usize,
    cols: usize,
    row_marginal: Vec<f64>,
    col_marginal: Vec<f64>,
    cost: f64,
    unique_hint: bool,
}

impl TransportPlan {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.cols + j]
    }

    pub fn row_marginal(&self) -> &[f64] {
        &self.row_marginal
    }

    pub fn col_marginal(&self) -> &[f64] {
        &self.col_marginal
    }

    /// Total transport cost <C, pi> of this plan.
    pub fn cost(&self) -> f64 {
        self.cost
    }

    /// False when some nonbasic cell had reduced cost <= 1e-10 at optimality,
    /// i.e. the optimal plan may not be unique. Heuristic, not a certificate.
    pub fn unique_hint(&self) -> bool {
        self.unique_hint
    }

    /// Cells (i, j, mass) with strictly positive mass.
    pub fn support(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let m = self.entry(i, j);
                if m > 0.0 {
                    out.push((i, j, m));
                }
            }
        }
        out
    }

    /// Dense CSV export: header `row,col,mass`, one line per cell.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "row,col,mass")?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                writeln!(w, "{},{},{}", i, j, crate::io::fmt_f64(self.entry(i, j)))?;
            }
        }
        Ok(())
    }
}

/// Flow value under the symbolic demand perturbation: real + sum_j eps[j] * eps^(j+1).
#[derive(Clone, Debug)]
struct LexFlow {
    real: f64,
    eps: Vec<i32>,
}

impl LexFlow {
    fn is_zero(&self) -> bool {
        self.real == 0.0 && self.eps.iter().all(|&e| e == 0)
    }

    fn cmp_lex(&self, other: &Self) -> std::cmp::Ordering {
        match self.real.partial_cmp(&other.real).expect("finite flows") {
            std::cmp::Ordering::Equal => self.eps.cmp(&other.eps),
            ord => ord,
        }
    }

    fn sub_assign(&mut self, other: &Self) {
        self.real -= other.real;
        for (a, b) in self.eps.iter_mut().zip(&other.eps) {
            *a -= b;
        }
    }

    fn add_assign(&mut self, other: &Self) {
        self.real += other.real;
        for (a, b) in self.eps.iter_mut().zip(&other.eps) {
            *a += b;
        }
    }
}

struct Simplex<'a> {
    m: usize,
    n: usize,
    cost: &'a CostMatrix,
    /// basic cell ids (i * n + j), parallel to `flows`
    basis: Vec<usize>,
    flows: Vec<LexFlow>,
    in_basis: Vec<bool>,
}

impl<'a> Simplex<'a> {
    fn new(mu: &DiscreteMeasure, nu: &DiscreteMeasure, cost: &'a CostMatrix) -> Self {
        let m = mu.len();
        let n = nu.len();
        // Perturbed marginals: demand j += eps^(j+1), last supply absorbs the sum.
        let mut supplies: Vec<LexFlow> = mu
            .weights()
            .iter()
            .map(|&w| LexFlow {
                real: w,
                eps: vec![0; n],
            })
            .collect();
        supplies[m - 1].eps = vec![1; n];
        let mut demands: Vec<LexFlow> = nu
            .weights()
            .iter()
            .enumerate()
            .map(|(j, &w)| {
                let mut eps = vec![0; n];
                eps[j] = 1;
                LexFlow { real: w, eps }
            })
            .collect();

        // Northwest corner: always records exactly m + n - 1 cells.
        let mut basis = Vec::with_capacity(m + n - 1);
        let mut flows = Vec::with_capacity(m + n - 1);
        let mut in_basis = vec![false; m * n];
        let (mut i, mut j) = (0usize, 0usize);
        loop {
            let alloc = if supplies[i].cmp_lex(&demands[j]).is_le() {
                supplies[i].clone()
            } else {
                demands[j].clone()
            };
            supplies[i].sub_assign(&alloc);
            demands[j].sub_assign(&alloc);
            basis.push(i * n + j);
            flows.push(alloc);
            in_basis[i * n + j] = true;
            if i == m - 1 && j == n - 1 {
                break;
            }
            if i == m - 1 {
                j += 1;
            } else if j == n - 1 || supplies[i].is_zero() {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self {
            m,
            n,
            cost,
            basis,
            flows,
            in_basis,
        }
    }

    /// Adjacency of the basis tree over nodes 0..m (rows) and m..m+n (cols);
    /// edges carry the index into `basis`.
    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.m + self.n];
        for (b, &cell) in self.basis.iter().enumerate() {
            let (i, j) = (cell / self.n, cell % self.n);
            adj[i].push((self.m + j, b));
            adj[self.m + j].push((i, b));
        }
        adj
    }

    /// MODI duals: u_i + v_j = c_ij on basic cells, u_0 = 0.
    fn duals(&self) -> (Vec<f64>, Vec<f64>) {
        let adj = self.adjacency();
        let mut u = vec![f64::NAN; self.m];
        let mut v = vec![f64::NAN; self.n];
        u[0] = 0.0;
        let mut stack = vec![0usize];
        let mut seen = vec![false; self.m + self.n];
        seen[0] = true;
        while let Some(node) = stack.pop() {
            for &(next, b) in &adj[node] {
                if seen[next] {
                    continue;
                }
                seen[next] = true;
                let cell = self.basis[b];
                let (i, j) = (cell / self.n, cell % self.n);
                let c = self.cost.entry(i, j);
                if next >= self.m {
                    v[next - self.m] = c - u[i];
                } else {
                    u[next] = c - v[j];
                }
                stack.push(next);
            }
        }
        (u, v)
    }

    /// Bland: the first nonbasic cell in row-major order with reduced cost
    /// below -PIVOT_TOL.
    fn entering(&self, u: &[f64], v: &[f64]) -> Option<usize> {
        for (i, &ui) in u.iter().enumerate() {
            for (j, &vj) in v.iter().enumerate() {
                let cell = i * self.n + j;
                if self.in_basis[cell] {
                    continue;
                }
                if self.cost.entry(i, j) - ui - vj < -PIVOT_TOL {
                    return Some(cell);
                }
            }
        }
        None
    }

    /// Tree path from the row node of `cell` to its column node; returns the
    /// basis indices along the path (which alternate -, +, -, ... starting
    /// from the entering cell's +).
    fn cycle_path(&self, cell: usize) -> Vec<usize> {
        let (i, j) = (cell / self.n, cell % self.n);
        let adj = self.adjacency();
        let start = self.m + j;
        let goal = i;
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.m + self.n];
        let mut seen = vec![false; self.m + self.n];
        seen[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(node) = queue.pop_front() {
            if node == goal {
                break;
            }
            for &(next, b) in &adj[node] {
                if !seen[next] {
                    seen[next] = true;
                    parent[next] = Some((node, b));
                    queue.push_back(next);
                }
            }
        }
        let mut path = Vec::new();
        let mut node = goal;
        while let Some((prev, b)) = parent[node] {
            path.push(b);
            node = prev;
        }
        path.reverse(); // now runs from the column node towards the row node
        path
    }

    fn pivot(&mut self, cell: usize) {
        let path = self.cycle_path(cell);
        // Minus cells are the even-indexed path cells (0-based).
        let mut leave: Option<(usize, LexFlow)> = None;
        for (k, &b) in path.iter().enumerate() {
            if k % 2 != 0 {
                continue;
            }
            let candidate = self.flows[b].clone();
            let better = match &leave {
                None => true,
                Some((lb, lf)) => match candidate.cmp_lex(lf) {
                    std::cmp::Ordering::Less => true,
                    std::cmp::Ordering::Equal => self.basis[b] < self.basis[*lb],
                    std::cmp::Ordering::Greater => false,
                },
            };
            if better {
                leave = Some((b, candidate));
            }
        }
        let (leave_idx, theta) = leave.expect("cycle always has a minus cell");
        for (k, &b) in path.iter().enumerate() {
            if k % 2 == 0 {
                self.flows[b].sub_assign(&theta);
            } else {
                self.flows[b].add_assign(&theta);
            }
        }
        self.in_basis[self.basis[leave_idx]] = false;
        self.in_basis[cell] = true;
        self.basis[leave_idx] = cell;
        self.flows[leave_idx] = theta;
    }

    /// Re-solve flows on the final tree from the unperturbed marginals
    /// (leaf elimination), dropping the eps parts.
    fn extract(&self, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Vec<f64> {
        let total = self.m + self.n;
        let mut remaining: Vec<f64> = mu.weights().iter().chain(nu.weights()).copied().collect();
        let mut degree = vec![0usize; total];
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); total];
        for (b, &cell) in self.basis.iter().enumerate() {
            let (i, j) = (cell / self.n, cell % self.n);
            degree[i] += 1;
            degree[self.m + j] += 1;
            incident[i].push(b);
            incident[self.m + j].push(b);
        }
        let mut removed = vec![false; self.basis.len()];
        let mut flows = vec![0.0; self.basis.len()];
        let mut queue: std::collections::VecDeque<usize> = (0..total)
            .filter(|&node| degree[node] == 1)
            .collect();
        while let Some(node) = queue.pop_front() {
            if degree[node] == 0 {
                continue;
            }
            let &b = incident[node]
                .iter()
                .find(|&&b| !removed[b])
                .expect("leaf has one live edge");
            let cell = self.basis[b];
            let (i, j) = (cell / self.n, cell % self.n);
            let other = if node == i { self.m + j } else { i };
            // Degenerate basic cells come out as exact or near-exact zeros.
            flows[b] = remaining[node].max(0.0);
            remaining[other] -= remaining[node];
            remaining[node] = 0.0;
            removed[b] = true;
            degree[node] -= 1;
            degree[other] -= 1;
            if degree[other] == 1 {
                queue.push_back(other);
            }
        }
        flows
    }
}

/// Exact optimal coupling of `mu` and `nu` under the given cost matrix.
pub fn solve_transport(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    cost: &CostMatrix,
) -> Result<TransportPlan> {
    if cost.rows() != mu.len() || cost.cols() != nu.len() {
        return Err(Error::DimensionMismatch(cost.rows(), mu.len()));
    }
    let (m, n) = (mu.len(), nu.len());
    let mut simplex = Simplex::new(mu, nu, cost);
    let cap = 1000 + 100 * m * n;
    let mut unique_hint = true;
    let mut pivots = 0usize;
    loop {
        let (u, v) = simplex.duals();
        match simplex.entering(&u, &v) {
            None => {
                // Optimal; scan nonbasic reduced costs for the uniqueness hint.
                'outer: for (i, &ui) in u.iter().enumerate() {
                    for (j, &vj) in v.iter().enumerate() {
                        let cell = i * n + j;
                        if simplex.in_basis[cell] {
                            continue;
                        }
                        if cost.entry(i, j) - ui - vj <= UNIQUENESS_RC_TOL {
                            unique_hint = false;
                            break 'outer;
                        }
                    }
                }
                break;
            }
            Some(cell) => {
                simplex.pivot(cell);
                pivots += 1;
                if pivots > cap {
                    return Err(Error::SolverStall(cap));
                }
            }
        }
    }
    let flows = simplex.extract(mu, nu);
    let mut matrix = vec![0.0; m * n];
    let mut total_cost = 0.0;
    for (b, &cell) in simplex.basis.iter().enumerate() {
        matrix[cell] = flows[b];
        total_cost += flows[b] * cost.entries[cell];
    }
    Ok(TransportPlan {
        matrix,
        rows: m,
        cols: n,
        row_marginal: mu.weights().to_vec(),
        col_marginal: nu.weights().to_vec(),
        cost: total_cost,
        unique_hint,
    })
}

/// d_{W_p}(mu, nu) under the chord metric: the p-th root of the optimal
/// chord-power transport cost.
pub fn wasserstein_distance(mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: f64) -> Result<f64> {
    let cost = chord_cost(mu, nu, p)?;
    let plan = solve_transport(mu, nu, &cost)?;
    let c = plan.cost().max(0.0);
    Ok(if p == 2.0 { c.sqrt() } else { c.powf(1.0 / p) })
}

/// Squared W_2 distance with the ambient squared-Euclidean cost; accepts
/// off-sphere measures (used by the translation and orthogonality identities).
pub fn ambient_w2_squared(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    let cost = squared_cost(mu, nu)?;
    Ok(solve_transport(mu, nu, &cost)?.cost())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::SpherePoint;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn north() -> Vec<f64> {
        vec![0.0, 1.0]
    }

    fn east() -> Vec<f64> {
        vec![1.0, 0.0]
    }

    #[test]
    fn chord_cost_diameter() {
        let mu = DiscreteMeasure::dirac(&north());
        let nu = DiscreteMeasure::dirac(&[0.0, -1.0]);
        for p in [1.0, 1.5, 2.0, 3.0] {
            let c = chord_cost(&mu, &nu, p).unwrap();
            assert!((c.entry(0, 0) - 2f64.powf(p)).abs() < 1e-12);
        }
    }

    #[test]
    fn chord_cost_identical_atoms_is_zero() {
        let mu = DiscreteMeasure::dirac(&north());
        let c = chord_cost(&mu, &mu, 2.0).unwrap();
        assert_eq!(c.entry(0, 0), 0.0);
    }

    #[test]
    fn chord_cost_north_east_quadratic() {
        let mu = DiscreteMeasure::dirac(&north());
        let nu = DiscreteMeasure::dirac(&east());
        let c = chord_cost(&mu, &nu, 2.0).unwrap();
        assert!((c.entry(0, 0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn c_alpha_vanishes_on_the_diagonal() {
        let mu = DiscreteMeasure::dirac(&north());
        let c = c_alpha_cost(&mu, &mu, 0.3).unwrap();
        assert!(c.entry(0, 0).abs() < 1e-15);
    }

    #[test]
    fn c_alpha_half_antipodal_is_two() {
        let mu = DiscreteMeasure::dirac(&north());
        let nu = DiscreteMeasure::dirac(&[0.0, -1.0]);
        let c = c_alpha_cost(&mu, &nu, 0.5).unwrap();
        assert!((c.entry(0, 0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn c_alpha_half_north_east() {
        let mu = DiscreteMeasure::dirac(&north());
        let nu = DiscreteMeasure::dirac(&east());
        let c = c_alpha_cost(&mu, &nu, 0.5).unwrap();
        assert!((c.entry(0, 0) - (2.0 - std::f64::consts::SQRT_2)).abs() < 1e-15);
    }

    #[test]
    fn c_alpha_rejects_off_sphere() {
        let mu = DiscreteMeasure::dirac(&[0.5, 0.0]);
        let nu = DiscreteMeasure::dirac(&north());
        assert!(matches!(
            c_alpha_cost(&mu, &nu, 0.5),
            Err(Error::NotOnSphere { .. })
        ));
    }

    #[test]
    fn solve_identical_measures_diagonal() {
        let mu = DiscreteMeasure::new(
            vec![north(), east(), vec![0.0, -1.0]],
            vec![0.2, 0.5, 0.3],
        )
        .unwrap();
        let cost = chord_cost(&mu, &mu, 2.0).unwrap();
        let plan = solve_transport(&mu, &mu, &cost).unwrap();
        assert!(plan.cost().abs() < 1e-15);
        for (i, w) in mu.weights().iter().enumerate() {
            assert!((plan.entry(i, i) - w).abs() < 1e-12);
        }
    }

    #[test]
    fn solve_dirac_to_dirac() {
        let mu = DiscreteMeasure::dirac(&north());
        let nu = DiscreteMeasure::dirac(&east());
        let cost = chord_cost(&mu, &nu, 2.0).unwrap();
        let plan = solve_transport(&mu, &nu, &cost).unwrap();
        assert!((plan.cost() - 2.0).abs() < 1e-15);
        assert!((plan.entry(0, 0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn solve_keeps_north_sends_east_south() {
        // mu = (delta_N + delta_E)/2, nu = (delta_N + delta_S)/2 on S^1, p = 2:
        // keep the shared N atom, send E to S at cost ||E - S||^2 = 2, total 1.
        let mu = DiscreteMeasure::new(vec![north(), east()], vec![0.5, 0.5]).unwrap();
        let nu = DiscreteMeasure::new(vec![north(), vec![0.0, -1.0]], vec![0.5, 0.5]).unwrap();
        let cost = chord_cost(&mu, &nu, 2.0).unwrap();
        let plan = solve_transport(&mu, &nu, &cost).unwrap();
        assert!((plan.cost() - 1.0).abs() < 1e-12);
        assert!((plan.entry(0, 0) - 0.5).abs() < 1e-12);
        assert!((plan.entry(1, 1) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn plan_is_basic_and_marginals_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let mu = crate::sampling::random_measure(3, 6, &mut rng);
            let nu = crate::sampling::random_measure(3, 5, &mut rng);
            let cost = chord_cost(&mu, &nu, 2.0).unwrap();
            let plan = solve_transport(&mu, &nu, &cost).unwrap();
            assert!(plan.support().len() < mu.len() + nu.len());
            for i in 0..mu.len() {
                let s: f64 = (0..nu.len()).map(|j| plan.entry(i, j)).sum();
                assert!((s - mu.weights()[i]).abs() < 1e-10);
            }
            for j in 0..nu.len() {
                let s: f64 = (0..mu.len()).map(|i| plan.entry(i, j)).sum();
                assert!((s - nu.weights()[j]).abs() < 1e-10);
            }
            let recomputed: f64 = plan
                .support()
                .iter()
                .map(|&(i, j, m)| m * cost.entry(i, j))
                .sum();
            assert!((recomputed - plan.cost()).abs() < 1e-10);
        }
    }

    #[test]
    fn dirac_distance_is_chord_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x = SpherePoint::random(3, &mut rng);
            let y = SpherePoint::random(3, &mut rng);
            let mu = DiscreteMeasure::dirac(x.coords());
            let nu = DiscreteMeasure::dirac(y.coords());
            for p in [1.0, 1.5, 2.0] {
                let d = wasserstein_distance(&mu, &nu, p).unwrap();
                assert!((d - linalg::dist(x.coords(), y.coords())).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn antipodal_diracs_attain_the_diameter() {
        let mu = DiscreteMeasure::dirac(&north());
        let nu = DiscreteMeasure::dirac(&[0.0, -1.0]);
        let d = wasserstein_distance(&mu, &nu, 2.0).unwrap();
        assert!((d - 2.0).abs() < 1e-15);
    }

    #[test]
    fn half_half_instance_distance_one() {
        let mu = DiscreteMeasure::new(vec![north(), east()], vec![0.5, 0.5]).unwrap();
        let nu = DiscreteMeasure::new(vec![north(), vec![0.0, -1.0]], vec![0.5, 0.5]).unwrap();
        let d = wasserstein_distance(&mu, &nu, 2.0).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn solve_rejects_cost_of_wrong_shape() {
        let mu = DiscreteMeasure::new(vec![north(), east()], vec![0.5, 0.5]).unwrap();
        let nu = DiscreteMeasure::dirac(&north());
        let cost = chord_cost(&nu, &mu, 2.0).unwrap();
        assert!(matches!(
            solve_transport(&mu, &nu, &cost),
            Err(Error::DimensionMismatch(..))
        ));
    }

    #[test]
    fn plan_exports_dense_csv() {
        let mu = DiscreteMeasure::new(vec![north(), east()], vec![0.5, 0.5]).unwrap();
        let nu = DiscreteMeasure::dirac(&north());
        let cost = chord_cost(&mu, &nu, 2.0).unwrap();
        let plan = solve_transport(&mu, &nu, &cost).unwrap();
        let mut out = Vec::new();
        plan.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.trim().lines().collect();
        assert_eq!(lines[0], "row,col,mass");
        assert_eq!(lines.len(), 1 + 2); // header + every cell of the 2x1 plan
        assert!(lines[1].starts_with("0,0,"));
        let mass: f64 = lines[1].split(',').nth(2).unwrap().parse().unwrap();
        assert!((mass - 0.5).abs() < 1e-15);
    }

    #[test]
    fn distance_rejects_mismatched_dimensions() {
        let mu = DiscreteMeasure::dirac(&[0.0, 1.0]);
        let nu = DiscreteMeasure::dirac(&[0.0, 0.0, 1.0]);
        assert!(matches!(
            wasserstein_distance(&mu, &nu, 2.0),
            Err(Error::DimensionMismatch(..))
        ));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn measure_strategy(ambient: usize) -> impl Strategy<Value = DiscreteMeasure> {
            prop::collection::vec(
                (
                    prop::collection::vec(-1.0f64..1.0, ambient),
                    0.05f64..1.0,
                ),
                1..5,
            )
            .prop_filter_map("atoms must project to the sphere", move |atoms| {
                let mut points = Vec::new();
                let mut weights = Vec::new();
                for (raw, w) in atoms {
                    match crate::measures::project_to_sphere(&raw) {
                        Ok(p) => {
                            points.push(p.into());
                            weights.push(w);
                        }
                        Err(_) => return None,
                    }
                }
                DiscreteMeasure::normalized(points, weights).ok()
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn plans_satisfy_marginals_and_basic_support(
                mu in measure_strategy(3),
                nu in measure_strategy(3),
            ) {
                let cost = chord_cost(&mu, &nu, 2.0).unwrap();
                let plan = solve_transport(&mu, &nu, &cost).unwrap();
                prop_assert!(plan.cost() >= 0.0);
                prop_assert!(plan.support().len() < mu.len() + nu.len());
                for i in 0..mu.len() {
                    let s: f64 = (0..nu.len()).map(|j| plan.entry(i, j)).sum();
                    prop_assert!((s - mu.weights()[i]).abs() <= 1e-10);
                }
                for j in 0..nu.len() {
                    let s: f64 = (0..mu.len()).map(|i| plan.entry(i, j)).sum();
                    prop_assert!((s - nu.weights()[j]).abs() <= 1e-10);
                }
            }

            #[test]
            fn distance_is_symmetric(
                mu in measure_strategy(2),
                nu in measure_strategy(2),
            ) {
                let ab = wasserstein_distance(&mu, &nu, 2.0).unwrap();
                let ba = wasserstein_distance(&nu, &mu, 2.0).unwrap();
                prop_assert!((ab - ba).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn unique_hint_false_on_symmetric_instance() {
        // Two antipodal atoms each side with equal weights: both couplings
        // (identity and swap) cost the same, so uniqueness is dubious.
        let z = SpherePoint::new(vec![1.0, 0.0]).unwrap();
        let mu = DiscreteMeasure::antipodal_pair(&z);
        let w = SpherePoint::new(vec![0.0, 1.0]).unwrap();
        let nu = DiscreteMeasure::antipodal_pair(&w);
        let cost = chord_cost(&mu, &nu, 2.0).unwrap();
        let plan = solve_transport(&mu, &nu, &cost).unwrap();
        assert!(!plan.unique_hint());
    }
}
