//! Seeded random inputs for the verification batteries and tests.

use crate::measures::{DiscreteMeasure, SpherePoint};
use rand::Rng;

/// Random measure with 1..=max_atoms atoms on the sphere of the given ambient
/// dimension and uniformly drawn, normalized weights.
pub fn random_measure<R: Rng>(ambient_dim: usize, max_atoms: usize, rng: &mut R) -> DiscreteMeasure {
    let atoms = rng.random_range(1..=max_atoms);
    loop {
        let points: Vec<Vec<f64>> = (0..atoms)
            .map(|_| SpherePoint::random(ambient_dim, rng).into())
            .collect();
        let weights: Vec<f64> = (0..atoms).map(|_| rng.random_range(0.05..1.0)).collect();
        if let Ok(mu) = DiscreteMeasure::normalized(points, weights) {
            return mu;
        }
    }
}

/// Random measure supported in the open hemisphere around `pole`
/// (every atom u satisfies <u, pole> >= margin).
pub fn random_hemisphere_measure<R: Rng>(
    pole: &SpherePoint,
    max_atoms: usize,
    margin: f64,
    rng: &mut R,
) -> DiscreteMeasure {
    let atoms = rng.random_range(1..=max_atoms);
    let dim = pole.coords().len();
    let mut points = Vec::with_capacity(atoms);
    while points.len() < atoms {
        let p = SpherePoint::random(dim, rng);
        if crate::linalg::dot(p.coords(), pole.coords()) >= margin {
            points.push(p.into());
        }
    }
    let weights: Vec<f64> = (0..atoms).map(|_| rng.random_range(0.05..1.0)).collect();
    DiscreteMeasure::normalized(points, weights).expect("hemisphere atoms are valid")
}
