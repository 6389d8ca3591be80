//! Points on S^n, finitely supported probability measures in R^{n+1}, and the
//! admissible-translation geometry for equal-weight two-point measures.
//!
//! Measures are stored in ambient coordinates so that translated, off-sphere
//! measures are first-class values; the `on_sphere` flag is recomputed after
//! every operation that can move atoms off the sphere.

use crate::error::{Error, Result};
use crate::linalg;
use rand::Rng;
use rand_distr::StandardNormal;

/// Atoms closer than this are merged at construction; the same tolerance
/// decides the unit-norm invariant.
pub const ATOM_TOL: f64 = 1e-12;

/// Vectors shorter than this cannot be projected to the sphere.
pub const PROJECTION_EPS: f64 = 1e-10;

/// A point on S^n, stored as a unit vector of R^{n+1}.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    coords: Vec<f64>,
}

impl SpherePoint {
    /// Requires `| ||coords|| - 1 | <= 1e-12` and ambient dimension >= 2.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "sphere dimension must be >= 1, got ambient dimension {}",
                coords.len()
            )));
        }
        let n = linalg::norm(&coords);
        if (n - 1.0).abs() > ATOM_TOL {
            return Err(Error::InvalidArgument(format!(
                "not a unit vector: norm = {n:.17}"
            )));
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Sphere dimension n (one less than the ambient dimension).
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn antipode(&self) -> SpherePoint {
        SpherePoint {
            coords: linalg::scale(&self.coords, -1.0),
        }
    }

    /// Uniformly random point of S^n (ambient dimension n+1), via normalized Gaussians.
    pub fn random<R: Rng>(ambient_dim: usize, rng: &mut R) -> SpherePoint {
        loop {
            let v: Vec<f64> = (0..ambient_dim)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect();
            if let Ok(p) = project_to_sphere(&v) {
                return p;
            }
        }
    }
}

impl From<SpherePoint> for Vec<f64> {
    fn from(p: SpherePoint) -> Vec<f64> {
        p.coords
    }
}

/// Radial projection v -> v / ||v||.
///
/// Fails with [`Error::DegenerateVector`] when `||v|| < 1e-10`, which is the
/// signal for the p_alpha singularity.
pub fn project_to_sphere(v: &[f64]) -> Result<SpherePoint> {
    let n = linalg::norm(v);
    if n < PROJECTION_EPS {
        return Err(Error::DegenerateVector {
            norm: n,
            eps: PROJECTION_EPS,
        });
    }
    Ok(SpherePoint {
        coords: linalg::scale(v, 1.0 / n),
    })
}

/// A finitely supported probability measure on R^{n+1}.
///
/// Invariants enforced at construction: weights are nonnegative and sum to 1
/// within 1e-12, atoms are pairwise distinct within 1e-12 (duplicates merged
/// by weight summation, zero-weight atoms dropped).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
    on_sphere: bool,
}

impl DiscreteMeasure {
    /// Strict constructor: rejects weight sums off by more than 1e-12 rather
    /// than silently renormalizing. Use [`DiscreteMeasure::normalized`] when
    /// renormalization is wanted.
    pub fn new(points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > ATOM_TOL {
            return Err(Error::InvalidMeasure(format!(
                "weights sum to {total:.17}, expected 1"
            )));
        }
        Self::build(points, weights)
    }

    /// Renormalizing constructor: scales weights to total mass 1 before the
    /// usual validation.
    pub fn normalized(points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if total.is_nan() || total <= 0.0 {
            return Err(Error::InvalidMeasure(format!(
                "cannot normalize: weights sum to {total}"
            )));
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Self::build(points, weights)
    }

    fn build(points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::DimensionMismatch(points.len(), weights.len()));
        }
        if points.is_empty() {
            return Err(Error::InvalidMeasure("empty support".into()));
        }
        let dim = points[0].len();
        let mut merged_points: Vec<Vec<f64>> = Vec::with_capacity(points.len());
        let mut merged_weights: Vec<f64> = Vec::with_capacity(points.len());
        for (p, w) in points.into_iter().zip(weights) {
            if p.len() != dim {
                return Err(Error::DimensionMismatch(p.len(), dim));
            }
            if !p.iter().all(|x| x.is_finite()) || !w.is_finite() {
                return Err(Error::InvalidMeasure("non-finite entry".into()));
            }
            if w < 0.0 {
                return Err(Error::InvalidMeasure(format!("negative weight {w:.17}")));
            }
            if w == 0.0 {
                continue;
            }
            match merged_points
                .iter()
                .position(|q| linalg::dist(q, &p) <= ATOM_TOL)
            {
                Some(i) => merged_weights[i] += w,
                None => {
                    merged_points.push(p);
                    merged_weights.push(w);
                }
            }
        }
        if merged_points.is_empty() {
            return Err(Error::InvalidMeasure("all weights are zero".into()));
        }
        let on_sphere = merged_points
            .iter()
            .all(|p| (linalg::norm(p) - 1.0).abs() <= ATOM_TOL);
        Ok(Self {
            points: merged_points,
            weights: merged_weights,
            on_sphere,
        })
    }

    /// Unit mass at a single point.
    pub fn dirac(point: &[f64]) -> Self {
        let on_sphere = (linalg::norm(point) - 1.0).abs() <= ATOM_TOL;
        Self {
            points: vec![point.to_vec()],
            weights: vec![1.0],
            on_sphere,
        }
    }

    /// The antipodal pair (delta_z + delta_{-z}) / 2.
    pub fn antipodal_pair(z: &SpherePoint) -> Self {
        Self::new(
            vec![z.coords().to_vec(), z.antipode().coords().to_vec()],
            vec![0.5, 0.5],
        )
        .expect("antipodal pair is a valid measure")
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of atoms in the support.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.points[0].len()
    }

    /// True when every atom was within 1e-12 of the unit sphere at construction.
    pub fn on_sphere(&self) -> bool {
        self.on_sphere
    }

    /// Membership oracle with a caller-chosen tolerance.
    pub fn is_supported_on_sphere(&self, tol: f64) -> bool {
        assert!(tol > 0.0);
        self.points
            .iter()
            .all(|p| (linalg::norm(p) - 1.0).abs() <= tol)
    }

    /// m(mu) = sum_i w_i p_i. Lies in the closed unit ball for on-sphere measures.
    pub fn barycenter(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.ambient_dim()];
        for (p, w) in self.points.iter().zip(&self.weights) {
            for (mk, pk) in m.iter_mut().zip(p) {
                *mk += w * pk;
            }
        }
        m
    }

    /// Shift every atom by `v`; weights unchanged, `on_sphere` recomputed.
    pub fn translate(&self, v: &[f64]) -> DiscreteMeasure {
        assert_eq!(v.len(), self.ambient_dim());
        let points: Vec<Vec<f64>> = self.points.iter().map(|p| linalg::add(p, v)).collect();
        let on_sphere = points
            .iter()
            .all(|p| (linalg::norm(p) - 1.0).abs() <= ATOM_TOL);
        DiscreteMeasure {
            points,
            weights: self.weights.clone(),
            on_sphere,
        }
    }

    /// Image measure under `f`; weights of coinciding images are merged.
    pub fn push_forward<F: Fn(&[f64]) -> Vec<f64>>(&self, f: F) -> DiscreteMeasure {
        let images: Vec<Vec<f64>> = self.points.iter().map(|p| f(p)).collect();
        DiscreteMeasure::build(images, self.weights.clone())
            .expect("push-forward of a valid measure is valid")
    }

    /// Atom-set equality up to tolerances: every atom of `self` is matched by
    /// an atom of `other` within `atom_tol` carrying the same weight within
    /// `weight_tol`, and vice versa.
    pub fn approx_eq(&self, other: &DiscreteMeasure, atom_tol: f64, weight_tol: f64) -> bool {
        if self.ambient_dim() != other.ambient_dim() || self.len() != other.len() {
            return false;
        }
        let mut used = vec![false; other.len()];
        for (p, w) in self.points.iter().zip(&self.weights) {
            let hit = other
                .points
                .iter()
                .enumerate()
                .find(|(j, q)| !used[*j] && linalg::dist(p, q) <= atom_tol);
            match hit {
                Some((j, _)) if (other.weights[j] - w).abs() <= weight_tol => used[j] = true,
                _ => return false,
            }
        }
        true
    }
}

/// The set of vectors v such that the translate of a two-point equal-weight
/// measure by v stays on the sphere: an (n-1)-sphere of radius ||s|| centered
/// at -s inside the affine subspace -s + span{a - b}^perp, where s = (a+b)/2.
/// Degenerates to the singleton {0} for antipodal supports.
#[derive(Debug, Clone)]
pub struct TranslationSphere {
    center: Vec<f64>,
    radius: f64,
    normal_basis: Vec<Vec<f64>>,
}

impl TranslationSphere {
    /// Center -s of the sphere of admissible translations.
    pub fn center(&self) -> &[f64] {
        &self.center
    }

    /// Radius ||s||; zero exactly for antipodal supports.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Orthonormal basis of span{a - b}^perp, the hyperplane the sphere lives in
    /// (after recentering at -s).
    pub fn normal_basis(&self) -> &[Vec<f64>] {
        &self.normal_basis
    }

    pub fn is_degenerate(&self) -> bool {
        self.radius == 0.0
    }

    /// Membership test: v + s must have norm `radius` and lie in span{a-b}^perp.
    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        let rel = linalg::sub(v, &self.center);
        if (linalg::norm(&rel) - self.radius).abs() > tol {
            return false;
        }
        let mut in_plane = vec![0.0; rel.len()];
        for b in &self.normal_basis {
            let c = linalg::dot(&rel, b);
            for (ik, bk) in in_plane.iter_mut().zip(b) {
                *ik += c * bk;
            }
        }
        linalg::dist(&rel, &in_plane) <= tol
    }

    /// A uniformly random member of the set.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        if self.is_degenerate() {
            return self.center.clone();
        }
        loop {
            let coeffs: Vec<f64> = (0..self.normal_basis.len())
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect();
            let n = linalg::norm(&coeffs);
            if n < 1e-8 {
                continue;
            }
            let mut v = self.center.clone();
            for (c, b) in coeffs.iter().zip(&self.normal_basis) {
                for (vk, bk) in v.iter_mut().zip(b) {
                    *vk += self.radius * c / n * bk;
                }
            }
            return v;
        }
    }
}

/// Admissible translations of a two-point measure with weights 1/2, 1/2 on S^n.
///
/// With s = (a+b)/2 the result has center -s, radius ||s||, and normal space
/// span{a - b}^perp; for a = -b it is the singleton {0}.
pub fn admissible_translations(mu: &DiscreteMeasure) -> Result<TranslationSphere> {
    if mu.len() != 2 {
        return Err(Error::NotTwoPoint(format!("support size {}", mu.len())));
    }
    if mu.weights().iter().any(|w| (w - 0.5).abs() > ATOM_TOL) {
        return Err(Error::NotTwoPoint(format!(
            "weights ({:.17}, {:.17}) are not (1/2, 1/2)",
            mu.weights()[0],
            mu.weights()[1]
        )));
    }
    if !mu.on_sphere() {
        let (index, norm) = mu
            .points()
            .iter()
            .map(|p| linalg::norm(p))
            .enumerate()
            .max_by(|a, b| {
                ((a.1 - 1.0).abs())
                    .partial_cmp(&(b.1 - 1.0).abs())
                    .unwrap()
            })
            .unwrap();
        return Err(Error::NotOnSphere { index, norm });
    }
    let a = &mu.points()[0];
    let b = &mu.points()[1];
    let s = linalg::scale(&linalg::add(a, b), 0.5);
    let radius = linalg::norm(&s);
    let center = linalg::scale(&s, -1.0);
    let dir = linalg::sub(a, b);
    let normal_basis = linalg::orthonormal_complement(&dir);
    Ok(TranslationSphere {
        center,
        radius,
        normal_basis,
    })
}
