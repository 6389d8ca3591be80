//! Independent oracles for the exact transport solver: coupling-polytope
//! vertex enumeration, metric axioms, the translation identity, and the
//! minimum form of the detour cost c_alpha.

mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use wsphere::linalg;
use wsphere::measures::{DiscreteMeasure, SpherePoint};
use wsphere::sampling::random_measure;
use wsphere::transport::{
    ambient_w2_squared, c_alpha_cost, chord_cost, solve_transport, wasserstein_distance,
};

#[test]
fn solver_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for trial in 0..60 {
        let dim = if trial % 2 == 0 { 2 } else { 3 };
        let mu = random_measure(dim, 3, &mut rng);
        let nu = random_measure(dim, 3, &mut rng);
        let p = [1.0, 1.5, 2.0][trial % 3];
        let cost = chord_cost(&mu, &nu, p).unwrap();
        let plan = solve_transport(&mu, &nu, &cost).unwrap();
        let oracle = common::vertex_enumeration_min(&mu, &nu, &cost);
        assert!(
            (plan.cost() - oracle).abs() <= 1e-9,
            "trial {trial}: solver {} vs enumeration {}",
            plan.cost(),
            oracle
        );
    }
}

#[test]
fn metric_axioms_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for trial in 0..25 {
        let dim = if trial % 2 == 0 { 2 } else { 3 };
        let p = [1.0, 2.0][trial % 2];
        let a = random_measure(dim, 6, &mut rng);
        let b = random_measure(dim, 6, &mut rng);
        let c = random_measure(dim, 6, &mut rng);
        let dab = wasserstein_distance(&a, &b, p).unwrap();
        let dba = wasserstein_distance(&b, &a, p).unwrap();
        assert!((dab - dba).abs() <= 1e-10, "symmetry: {dab} vs {dba}");
        let dbc = wasserstein_distance(&b, &c, p).unwrap();
        let dac = wasserstein_distance(&a, &c, p).unwrap();
        assert!(
            dac <= dab + dbc + 1e-9,
            "triangle: {dac} > {dab} + {dbc}"
        );
        assert!(wasserstein_distance(&a, &a, p).unwrap() <= 1e-10);
    }
}

#[test]
fn translation_identity_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let mu = random_measure(3, 6, &mut rng);
        let nu = random_measure(3, 6, &mut rng);
        let v: Vec<f64> = (0..3)
            .map(|_| 0.8 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let lhs = ambient_w2_squared(&mu.translate(&v), &nu).unwrap();
        let base = ambient_w2_squared(&mu, &nu).unwrap();
        let inner = linalg::dot(
            &v,
            &linalg::add(
                &v,
                &linalg::scale(&linalg::sub(&mu.barycenter(), &nu.barycenter()), 2.0),
            ),
        );
        assert!(
            (lhs - base - inner).abs() <= 1e-8,
            "identity residual {}",
            lhs - base - inner
        );
    }
}

#[test]
fn translate_detection_corollary_both_directions() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let mu = random_measure(3, 5, &mut rng);
        let v: Vec<f64> = (0..3)
            .map(|_| 0.5 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        // Forward: a translate attains d = ||m(nu) - m(mu)||.
        let nu = mu.translate(&v);
        let d = ambient_w2_squared(&mu, &nu).unwrap().max(0.0).sqrt();
        let gap = linalg::dist(&mu.barycenter(), &nu.barycenter());
        assert!((d - gap).abs() <= 1e-8, "translate: d {d} vs gap {gap}");

        // Converse: recentring a non-translate leaves positive distance, so
        // d strictly exceeds the barycenter gap.
        let other = random_measure(3, 5, &mut rng);
        let centered_mu = mu.translate(&linalg::scale(&mu.barycenter(), -1.0));
        let centered_other = other.translate(&linalg::scale(&other.barycenter(), -1.0));
        if centered_mu.approx_eq(&centered_other, 1e-6, 1e-6) {
            continue;
        }
        let d2 = ambient_w2_squared(&mu, &other).unwrap();
        let gap2 = linalg::dist_sq(&mu.barycenter(), &other.barycenter());
        let centered_dist = ambient_w2_squared(&centered_mu, &centered_other).unwrap();
        assert!(
            (d2 - gap2 - centered_dist).abs() <= 1e-8,
            "recentred decomposition failed"
        );
        assert!(d2 >= gap2 - 1e-9);
    }
}

/// Dense sweep oracle for c_alpha: minimize (1-a)||x-z||^2 + a||z-y||^2 over
/// grid nodes z, then refine locally on shrinking tangent grids.
fn c_alpha_sweep(
    x: &SpherePoint,
    y: &SpherePoint,
    alpha: f64,
    nodes: &[SpherePoint],
) -> (f64, SpherePoint) {
    let objective = |z: &SpherePoint| {
        (1.0 - alpha) * linalg::dist_sq(x.coords(), z.coords())
            + alpha * linalg::dist_sq(z.coords(), y.coords())
    };
    let mut best = nodes[0].clone();
    let mut best_val = objective(&best);
    for z in nodes.iter().skip(1) {
        let v = objective(z);
        if v < best_val {
            best_val = v;
            best = z.clone();
        }
    }
    (best_val, best)
}

fn refine_minimum(
    x: &SpherePoint,
    y: &SpherePoint,
    alpha: f64,
    start: SpherePoint,
    initial_step: f64,
) -> f64 {
    let objective = |z: &SpherePoint| {
        (1.0 - alpha) * linalg::dist_sq(x.coords(), z.coords())
            + alpha * linalg::dist_sq(z.coords(), y.coords())
    };
    let mut center = start;
    let mut best = objective(&center);
    let mut step = initial_step;
    for _ in 0..8 {
        let basis = linalg::orthonormal_complement(center.coords());
        let mut improved = true;
        while improved {
            improved = false;
            for b in &basis {
                for sgn in [-1.0, 1.0] {
                    let candidate = linalg::add_scaled(center.coords(), sgn * step, b);
                    if let Ok(z) = wsphere::project_to_sphere(&candidate) {
                        let v = objective(&z);
                        if v < best {
                            best = v;
                            center = z;
                            improved = true;
                        }
                    }
                }
            }
        }
        step *= 0.2;
    }
    best
}

#[test]
fn c_alpha_matches_sweep_oracle_on_s1() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let nodes = common::circle_nodes(10_000);
    for _ in 0..50 {
        let x = SpherePoint::random(2, &mut rng);
        let y = SpherePoint::random(2, &mut rng);
        let alpha: f64 = rng.random_range(0.05..0.95);
        let closed = 2.0
            * (1.0
                - linalg::norm(&linalg::add_scaled(
                    &linalg::scale(x.coords(), 1.0 - alpha),
                    alpha,
                    y.coords(),
                )));
        let (grid_min, arg) = c_alpha_sweep(&x, &y, alpha, &nodes);
        assert!(
            (closed - grid_min).abs() <= 1e-3,
            "grid bound: closed {closed} vs sweep {grid_min}"
        );
        let refined = refine_minimum(&x, &y, alpha, arg, 2.0 * std::f64::consts::PI / 10_000.0);
        assert!(
            (closed - refined).abs() <= 1e-8,
            "refined: closed {closed} vs {refined}"
        );
    }
}

#[test]
fn c_alpha_matches_sweep_oracle_on_s2() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let nodes = common::icosphere(5); // 10242 quasi-uniform nodes
    for _ in 0..50 {
        let x = SpherePoint::random(3, &mut rng);
        let y = SpherePoint::random(3, &mut rng);
        let alpha: f64 = rng.random_range(0.05..0.95);
        let closed = 2.0
            * (1.0
                - linalg::norm(&linalg::add_scaled(
                    &linalg::scale(x.coords(), 1.0 - alpha),
                    alpha,
                    y.coords(),
                )));
        let (grid_min, arg) = c_alpha_sweep(&x, &y, alpha, &nodes);
        assert!(
            (closed - grid_min).abs() <= 1e-3,
            "grid bound: closed {closed} vs sweep {grid_min}"
        );
        let refined = refine_minimum(&x, &y, alpha, arg, 0.04);
        assert!(
            (closed - refined).abs() <= 1e-8,
            "refined: closed {closed} vs {refined}"
        );
    }
}

#[test]
fn half_spacing_rotation_has_closed_form_cost_at_scale() {
    // Uniform measure on the 64-node grid vs the grid shifted by half a
    // spacing: every atom must move at least 2 sin(pi / 2N), and matching
    // each node to its clockwise neighbor achieves exactly that, so the
    // optimal cost is (2 sin(pi / 2N))^p. Exercises a 64 x 64 instance.
    let n = 64usize;
    let spacing = 2.0 * std::f64::consts::PI / n as f64;
    let mu_points: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let t = spacing * j as f64;
            vec![t.cos(), t.sin()]
        })
        .collect();
    let nu_points: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let t = spacing * (j as f64 + 0.5);
            vec![t.cos(), t.sin()]
        })
        .collect();
    let w = vec![1.0 / n as f64; n];
    let mu = DiscreteMeasure::new(mu_points, w.clone()).unwrap();
    let nu = DiscreteMeasure::new(nu_points, w).unwrap();
    let step = 2.0 * (std::f64::consts::PI / (2 * n) as f64).sin();
    for p in [1.0, 2.0] {
        let cost = chord_cost(&mu, &nu, p).unwrap();
        let plan = solve_transport(&mu, &nu, &cost).unwrap();
        let expect = step.powf(p);
        assert!(
            (plan.cost() - expect).abs() <= 1e-12,
            "p={p}: cost {} vs closed form {expect}",
            plan.cost()
        );
        assert!(plan.support().len() <= 2 * n - 1);
    }
}

#[test]
fn nested_uniform_grids_have_closed_form_cost() {
    // Uniform on the 16 even nodes vs uniform on all 32 nodes: half of the
    // target mass sits on odd nodes at distance >= 2 sin(pi/32) from any
    // source, and routing each odd node from its adjacent even node attains
    // that bound. Maximally degenerate (every shared atom ties).
    let n = 32usize;
    let spacing = 2.0 * std::f64::consts::PI / n as f64;
    let node = |j: usize| {
        let t = spacing * j as f64;
        vec![t.cos(), t.sin()]
    };
    let mu = DiscreteMeasure::new(
        (0..n).step_by(2).map(node).collect(),
        vec![2.0 / n as f64; n / 2],
    )
    .unwrap();
    let nu = DiscreteMeasure::new((0..n).map(node).collect(), vec![1.0 / n as f64; n]).unwrap();
    let step = 2.0 * (std::f64::consts::PI / n as f64).sin();
    for p in [1.0, 2.0] {
        let cost = chord_cost(&mu, &nu, p).unwrap();
        let plan = solve_transport(&mu, &nu, &cost).unwrap();
        let expect = 0.5 * step.powf(p);
        assert!(
            (plan.cost() - expect).abs() <= 1e-12,
            "p={p}: cost {} vs closed form {expect}",
            plan.cost()
        );
    }
}

#[test]
fn concurrent_solves_share_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let instances: Vec<(DiscreteMeasure, DiscreteMeasure)> = (0..8)
        .map(|_| (random_measure(3, 5, &mut rng), random_measure(3, 5, &mut rng)))
        .collect();
    let sequential: Vec<f64> = instances
        .iter()
        .map(|(mu, nu)| wasserstein_distance(mu, nu, 2.0).unwrap())
        .collect();
    let threaded: Vec<f64> = std::thread::scope(|scope| {
        let handles: Vec<_> = instances
            .iter()
            .map(|(mu, nu)| scope.spawn(move || wasserstein_distance(mu, nu, 2.0).unwrap()))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    assert_eq!(sequential, threaded);
}

#[test]
fn cost_is_invariant_under_atom_permutations() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let mu = random_measure(3, 6, &mut rng);
        let nu = random_measure(3, 6, &mut rng);
        let base = wasserstein_distance(&mu, &nu, 2.0).unwrap();
        // Reverse the atom order of both measures.
        let mu_rev = DiscreteMeasure::new(
            mu.points().iter().rev().cloned().collect(),
            mu.weights().iter().rev().copied().collect(),
        )
        .unwrap();
        let nu_rev = DiscreteMeasure::new(
            nu.points().iter().rev().cloned().collect(),
            nu.weights().iter().rev().copied().collect(),
        )
        .unwrap();
        let permuted = wasserstein_distance(&mu_rev, &nu_rev, 2.0).unwrap();
        assert!((base - permuted).abs() <= 1e-12);
    }
}

#[test]
fn c_alpha_cost_matrix_agrees_with_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mu = random_measure(3, 4, &mut rng);
    let nu = random_measure(3, 4, &mut rng);
    let alpha = 0.35;
    let cost = c_alpha_cost(&mu, &nu, alpha).unwrap();
    for (i, x) in mu.points().iter().enumerate() {
        for (j, y) in nu.points().iter().enumerate() {
            let mid = linalg::add_scaled(&linalg::scale(x, 1.0 - alpha), alpha, y);
            let expect = 2.0 * (1.0 - linalg::norm(&mid));
            assert!((cost.entry(i, j) - expect).abs() < 1e-12);
        }
    }
}
