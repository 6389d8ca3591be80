//! Wasserstein potentials x -> d_{W_p}(delta_x, mu)^p, the closed barycentric
//! distance formulas, dispersion, and the orthogonal-support criterion.

use crate::error::{Error, Result};
use crate::linalg;
use crate::measures::{DiscreteMeasure, SpherePoint};
use crate::transport;

/// T_mu^(p)(x) = sum_i w_i ||x - p_i||^p, the chord-metric Wasserstein
/// potential. Equals d_{W_p}(delta_x, mu)^p because a Dirac has a unique
/// coupling with every measure. `mu` is expected to be on the sphere; the
/// bound 0 <= T <= 2^p only holds there.
pub fn potential(mu: &DiscreteMeasure, x: &SpherePoint, p: f64) -> f64 {
    debug_assert!(p >= 1.0);
    debug_assert!(mu.on_sphere());
    mu.points()
        .iter()
        .zip(mu.weights())
        .map(|(q, w)| {
            let d2 = linalg::dist_sq(x.coords(), q);
            w * if p == 2.0 { d2 } else { d2.powf(p / 2.0) }
        })
        .sum()
}

/// Closed form of the quadratic Dirac distance:
/// d^2_{W_2}(mu, delta_x) = 2 (1 - <x, m(mu)>). Equals `potential(mu, x, 2)`.
pub fn dirac_distance_quadratic(mu: &DiscreteMeasure, x: &SpherePoint) -> f64 {
    debug_assert!(mu.on_sphere());
    2.0 * (1.0 - linalg::dot(x.coords(), &mu.barycenter()))
}

/// d^2_{W_2(R^{n+1})}(mu, delta_{m(mu)}) = 1 - ||m(mu)||^2, the squared
/// ambient distance to the Dirac at the barycenter. In [0, 1] for on-sphere
/// measures.
pub fn dispersion(mu: &DiscreteMeasure) -> f64 {
    debug_assert!(mu.on_sphere());
    // Clamp the Dirac case, where ||m|| = 1 up to rounding.
    (1.0 - linalg::norm_sq(&mu.barycenter())).max(0.0)
}

/// Residual of the orthogonal-support identity in the ambient space:
///
/// ||m(mu) - m(nu)||^2 + dispersion(mu) + dispersion(nu) - d^2_{W_2(R^{n+1})}(mu, nu)
///
/// The sum side is the cost of the independence coupling (after centering,
/// cross terms vanish), so it bounds d^2 from above and the defect is
/// nonnegative up to solver noise; it is zero exactly when the supports lie
/// in orthogonal affine subspaces. Orthogonality is decided by thresholding
/// this defect (1e-7 in the verification batteries), a numeric proxy for the
/// exact characterization.
pub fn orthogonality_defect(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    if !mu.on_sphere() || !nu.on_sphere() {
        return Err(Error::InvalidArgument(
            "orthogonality defect requires on-sphere measures".into(),
        ));
    }
    let d2 = transport::ambient_w2_squared(mu, nu)?;
    let dm = linalg::dist_sq(&mu.barycenter(), &nu.barycenter());
    Ok(dm + dispersion(mu) + dispersion(nu) - d2)
}

/// Evaluations of a potential on a fixed set of sites.
///
/// Generated samples satisfy `values[i] = potential(mu, sites[i], p)`;
/// ingested samples (e.g. read from CSV for deconvolution) are only
/// range-checked against 0 <= v <= 2^p.
#[derive(Debug, Clone)]
pub struct PotentialSamples {
    sites: Vec<SpherePoint>,
    values: Vec<f64>,
    p: f64,
}

impl PotentialSamples {
    /// Evaluate the chord potential of `mu` on the given sites.
    pub fn generate(mu: &DiscreteMeasure, sites: Vec<SpherePoint>, p: f64) -> Self {
        let values = sites.iter().map(|x| potential(mu, x, p)).collect();
        Self { sites, values, p }
    }

    /// Wrap externally produced values; enforces only the range invariant.
    pub fn ingest(sites: Vec<SpherePoint>, values: Vec<f64>, p: f64) -> Result<Self> {
        if sites.len() != values.len() {
            return Err(Error::DimensionMismatch(sites.len(), values.len()));
        }
        if sites.is_empty() {
            return Err(Error::InvalidArgument("no potential samples".into()));
        }
        let bound = 2f64.powf(p);
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || v < -1e-12 || v > bound + 1e-9 {
                return Err(Error::InvalidArgument(format!(
                    "potential value {v} at site {i} outside [0, 2^p]"
                )));
            }
        }
        Ok(Self { sites, values, p })
    }

    pub fn sites(&self) -> &[SpherePoint] {
        &self.sites
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }
}
