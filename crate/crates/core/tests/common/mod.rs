//! Shared independent oracles for the integration and acceptance suites.
//! These deliberately avoid the library's solver and Fourier paths so that
//! agreement is evidence, not tautology.

#![allow(dead_code)]

use wsphere::measures::{DiscreteMeasure, SpherePoint};
use wsphere::transport::CostMatrix;

/// Minimum transport cost by enumerating the vertices of the coupling
/// polytope: every basic solution corresponds to a spanning tree of the
/// bipartite support graph, whose flows are uniquely determined by the
/// marginals. Exhaustive and exact for small instances.
pub fn vertex_enumeration_min(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    cost: &CostMatrix,
) -> f64 {
    let m = mu.len();
    let n = nu.len();
    let cells: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .collect();
    let need = m + n - 1;
    let mut best = f64::INFINITY;
    let mut chosen = Vec::with_capacity(need);
    enumerate_subsets(&cells, need, 0, &mut chosen, &mut |subset| {
        if let Some(flows) = solve_tree(subset, mu.weights(), nu.weights(), m, n) {
            if flows.iter().all(|&f| f >= -1e-12) {
                let c: f64 = subset
                    .iter()
                    .zip(&flows)
                    .map(|(&(i, j), &f)| f.max(0.0) * cost.entry(i, j))
                    .sum();
                best = best.min(c);
            }
        }
    });
    best
}

fn enumerate_subsets<F: FnMut(&[(usize, usize)])>(
    cells: &[(usize, usize)],
    need: usize,
    start: usize,
    chosen: &mut Vec<(usize, usize)>,
    visit: &mut F,
) {
    if chosen.len() == need {
        visit(chosen);
        return;
    }
    if cells.len() - start < need - chosen.len() {
        return;
    }
    for idx in start..cells.len() {
        chosen.push(cells[idx]);
        enumerate_subsets(cells, need, idx + 1, chosen, visit);
        chosen.pop();
    }
}

/// Solve the tree equations for the given cell subset; None when the subset
/// is not a spanning tree of the m + n node bipartite graph.
fn solve_tree(
    cells: &[(usize, usize)],
    row_w: &[f64],
    col_w: &[f64],
    m: usize,
    n: usize,
) -> Option<Vec<f64>> {
    let total = m + n;
    let mut degree = vec![0usize; total];
    for &(i, j) in cells {
        degree[i] += 1;
        degree[m + j] += 1;
    }
    if degree.contains(&0) {
        return None;
    }
    let mut remaining: Vec<f64> = row_w.iter().chain(col_w.iter()).copied().collect();
    let mut flows = vec![0.0; cells.len()];
    let mut removed = vec![false; cells.len()];
    let mut queue: Vec<usize> = (0..total).filter(|&v| degree[v] == 1).collect();
    let mut processed = 0usize;
    while let Some(node) = queue.pop() {
        if degree[node] != 1 {
            continue;
        }
        let live = cells.iter().enumerate().find(|(b, &(i, j))| {
            !removed[*b] && (i == node || m + j == node)
        });
        let (b, &(i, j)) = live?;
        let other = if i == node { m + j } else { i };
        flows[b] = remaining[node];
        remaining[other] -= remaining[node];
        remaining[node] = 0.0;
        removed[b] = true;
        degree[node] -= 1;
        degree[other] -= 1;
        processed += 1;
        if degree[other] == 1 {
            queue.push(other);
        }
    }
    // A spanning tree eliminates all but one node; cycles leave live cells.
    if processed != cells.len() {
        return None;
    }
    Some(flows)
}

/// Vertices of the unit icosahedron subdivided `depth` times and projected to
/// the sphere: 12, 42, 162, 642, 2562, 10242 ... quasi-uniform nodes on S^2.
pub fn icosphere(depth: usize) -> Vec<SpherePoint> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let base = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    let mut vertices: Vec<[f64; 3]> = base
        .iter()
        .map(|v| normalize3(*v))
        .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..depth {
        let mut midpoint: std::collections::HashMap<(usize, usize), usize> =
            std::collections::HashMap::new();
        let mut next_faces = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let ab = midpoint_index(a, b, &mut vertices, &mut midpoint);
            let bc = midpoint_index(b, c, &mut vertices, &mut midpoint);
            let ca = midpoint_index(c, a, &mut vertices, &mut midpoint);
            next_faces.push([a, ab, ca]);
            next_faces.push([b, bc, ab]);
            next_faces.push([c, ca, bc]);
            next_faces.push([ab, bc, ca]);
        }
        faces = next_faces;
    }
    vertices
        .into_iter()
        .map(|v| SpherePoint::new(v.to_vec()).expect("icosphere vertices are unit"))
        .collect()
}

fn normalize3(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn midpoint_index(
    a: usize,
    b: usize,
    vertices: &mut Vec<[f64; 3]>,
    cache: &mut std::collections::HashMap<(usize, usize), usize>,
) -> usize {
    let key = (a.min(b), a.max(b));
    if let Some(&idx) = cache.get(&key) {
        return idx;
    }
    let (va, vb) = (vertices[a], vertices[b]);
    let mid = normalize3([
        (va[0] + vb[0]) / 2.0,
        (va[1] + vb[1]) / 2.0,
        (va[2] + vb[2]) / 2.0,
    ]);
    vertices.push(mid);
    let idx = vertices.len() - 1;
    cache.insert(key, idx);
    idx
}

/// Equispaced nodes on S^1 as sphere points.
pub fn circle_nodes(count: usize) -> Vec<SpherePoint> {
    (0..count)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / count as f64;
            SpherePoint::new(vec![t.cos(), t.sin()]).expect("unit")
        })
        .collect()
}
