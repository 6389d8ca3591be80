//! Projected displacement interpolation on the sphere: the projection p_alpha,
//! the push-forward of a plan through it, the mean squared error Q_alpha and
//! its minimizer, and the injectivity/surjectivity geometry of p_alpha(N, .).
//!
//! The sphere with the chord metric has no geodesics, so there is no true
//! displacement interpolation; the minimizer of Q_alpha is the spherical
//! projection of the ambient interpolation along the optimal c_alpha plan.

use crate::error::{Error, Result};
use crate::linalg;
use crate::measures::{project_to_sphere, DiscreteMeasure, SpherePoint};
use crate::transport::{c_alpha_cost, chord_cost, solve_transport, TransportPlan};

/// Plan mass on pairs with ||x + y|| at or below this counts as antipodal.
pub const ANTIPODAL_TOL: f64 = 1e-9;

/// p_alpha(x, y) = ((1-alpha) x + alpha y) / ||(1-alpha) x + alpha y||.
/// Undefined exactly when alpha = 1/2 and y = -x ([`Error::DegenerateVector`]).
pub fn p_alpha(x: &SpherePoint, y: &SpherePoint, alpha: f64) -> Result<SpherePoint> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!(
            "alpha = {alpha} must lie in [0, 1]"
        )));
    }
    let mid = linalg::add_scaled(&linalg::scale(x.coords(), 1.0 - alpha), alpha, y.coords());
    project_to_sphere(&mid)
}

/// Push-forward of a transport plan through (x, y) -> p_alpha(x, y); atoms of
/// coinciding projections are merged. Fails with [`Error::AntipodalMass`] when
/// alpha = 1/2 and the plan carries mass on antipodal pairs.
pub fn displacement_projection(
    plan: &TransportPlan,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    alpha: f64,
) -> Result<DiscreteMeasure> {
    if plan.rows() != mu.len() || plan.cols() != nu.len() {
        return Err(Error::DimensionMismatch(plan.rows(), mu.len()));
    }
    let support = plan.support();
    let offending: f64 = support
        .iter()
        .filter(|&&(i, j, _)| {
            linalg::norm(&linalg::add(&mu.points()[i], &nu.points()[j])) <= ANTIPODAL_TOL
        })
        .map(|&(_, _, m)| m)
        .sum();
    if offending > 0.0 && (alpha - 0.5).abs() <= 1e-12 {
        return Err(Error::AntipodalMass(offending));
    }
    let mut points = Vec::with_capacity(support.len());
    let mut weights = Vec::with_capacity(support.len());
    for (i, j, mass) in support {
        let x = SpherePoint::new(mu.points()[i].clone())
            .map_err(|_| Error::InvalidArgument("plan marginals must be on the sphere".into()))?;
        let y = SpherePoint::new(nu.points()[j].clone())
            .map_err(|_| Error::InvalidArgument("plan marginals must be on the sphere".into()))?;
        points.push(p_alpha(&x, &y, alpha)?.into());
        weights.push(mass);
    }
    DiscreteMeasure::normalized(points, weights)
}

/// Q_alpha(rho) = (1-alpha) d^2_{W_2}(mu, rho) + alpha d^2_{W_2}(nu, rho).
pub fn q_alpha(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    rho: &DiscreteMeasure,
    alpha: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!(
            "alpha = {alpha} must lie in [0, 1]"
        )));
    }
    let d_mu = solve_transport(mu, rho, &chord_cost(mu, rho, 2.0)?)?.cost();
    let d_nu = solve_transport(nu, rho, &chord_cost(nu, rho, 2.0)?)?.cost();
    Ok((1.0 - alpha) * d_mu + alpha * d_nu)
}

/// Output of [`minimize_q`].
#[derive(Debug, Clone)]
pub struct InterpolationResult {
    /// The minimizing measure; absent on the degenerate branch.
    pub measure: Option<DiscreteMeasure>,
    /// The optimal plan under the c_alpha cost.
    pub plan: TransportPlan,
    /// min Q_alpha = the c_alpha transport cost.
    pub q_value: f64,
    /// True when alpha = 1/2 and the optimal plan carries antipodal mass:
    /// Q_alpha then has infinitely many minimizers and no projection exists.
    pub degenerate: bool,
    /// Forwarded from the solver; when false the reported measure is one of
    /// possibly several minimizers.
    pub unique_hint: bool,
}

/// Minimize Q_alpha over measures on the sphere: solve the transport problem
/// under c_alpha and project the optimal plan through p_alpha. The minimum
/// value is the transport cost; the minimizer is unique whenever the optimal
/// plan is unique and the degenerate antipodal case does not occur.
pub fn minimize_q(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    alpha: f64,
) -> Result<InterpolationResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha = {alpha} must lie in (0, 1)"
        )));
    }
    let cost = c_alpha_cost(mu, nu, alpha)?;
    let plan = solve_transport(mu, nu, &cost)?;
    let q_value = plan.cost();
    let unique_hint = plan.unique_hint();
    let antipodal_mass: f64 = plan
        .support()
        .iter()
        .filter(|&&(i, j, _)| {
            linalg::norm(&linalg::add(&mu.points()[i], &nu.points()[j])) <= ANTIPODAL_TOL
        })
        .map(|&(_, _, m)| m)
        .sum();
    let degenerate = (alpha - 0.5).abs() <= 1e-12 && antipodal_mass > 0.0;
    let measure = if degenerate {
        None
    } else {
        Some(displacement_projection(&plan, mu, nu, alpha)?)
    };
    Ok(InterpolationResult {
        measure,
        plan,
        q_value,
        degenerate,
        unique_hint,
    })
}

/// Inverse of w = p_{1/2}(N, .) on the open upper hemisphere:
/// u = 2 <w, N> w - N. Requires <w, N> > 0.
pub fn invert_half_projection(w: &SpherePoint, pole: &SpherePoint) -> Result<SpherePoint> {
    let c = linalg::dot(w.coords(), pole.coords());
    if c <= 0.0 {
        return Err(Error::NotInUpperHemisphere(c));
    }
    let u = linalg::add_scaled(&linalg::scale(w.coords(), 2.0 * c), -1.0, pole.coords());
    SpherePoint::new(u).map_err(|_| Error::InvalidArgument("inversion left the sphere".into()))
}

/// All u on the circle through `pole` and `w` with p_alpha(pole, u) = w,
/// found by reducing to a quadratic in the 2-plane frame and verified against
/// the forward map (within 1e-9). Size 0, 1, or 2: p_alpha(N, .) is bijective
/// for alpha > 1/2, 2-to-1 onto a polar cap for alpha < 1/2, and at alpha =
/// 1/2 injective with the open upper hemisphere as range.
pub fn preimages_under_p_alpha(
    w: &SpherePoint,
    pole: &SpherePoint,
    alpha: f64,
) -> Vec<SpherePoint> {
    assert!(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
    let c1 = linalg::dot(w.coords(), pole.coords());
    // Component of w orthogonal to the pole spans the second frame axis.
    let orth = linalg::add_scaled(w.coords(), -c1, pole.coords());
    let c2 = linalg::norm(&orth);

    let mut candidates: Vec<SpherePoint> = Vec::new();
    if c2 < 1e-12 {
        // w = +-N: any valid preimage must be +-N itself.
        candidates.push(pole.clone());
        candidates.push(pole.antipode());
    } else {
        let e2 = linalg::scale(&orth, 1.0 / c2);
        // u = t N + s e2 with t^2 + s^2 = 1 and (1-alpha) N + alpha u || w:
        // alpha c1 s = c2 ((1-alpha) + alpha t). Squaring gives
        // alpha^2 t^2 + 2 alpha (1-alpha) c2^2 t + c2^2 (1-alpha)^2 - alpha^2 c1^2 = 0.
        let a = alpha * alpha;
        let b = 2.0 * alpha * (1.0 - alpha) * c2 * c2;
        let c = c2 * c2 * (1.0 - alpha) * (1.0 - alpha) - alpha * alpha * c1 * c1;
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            for t in [(-b + sq) / (2.0 * a), (-b - sq) / (2.0 * a)] {
                if !(-1.0 - 1e-12..=1.0 + 1e-12).contains(&t) {
                    continue;
                }
                let t = t.clamp(-1.0, 1.0);
                let smag = (1.0 - t * t).max(0.0).sqrt();
                let s_candidates = if c1.abs() > 1e-12 {
                    // The linear equation pins the sign of s.
                    vec![c2 * ((1.0 - alpha) + alpha * t) / (alpha * c1)]
                } else {
                    vec![smag, -smag]
                };
                for s in s_candidates {
                    if s.abs() > 1.0 + 1e-9 {
                        continue;
                    }
                    let u = linalg::add_scaled(&linalg::scale(pole.coords(), t), s, &e2);
                    if let Ok(u) = project_to_sphere(&u) {
                        candidates.push(u);
                    }
                }
            }
        }
    }

    // Keep candidates that actually map to w, deduplicated.
    let mut out: Vec<SpherePoint> = Vec::new();
    for u in candidates {
        let ok = match p_alpha(pole, &u, alpha) {
            Ok(img) => linalg::dist(img.coords(), w.coords()) <= 1e-9,
            Err(_) => false,
        };
        if ok && !out.iter().any(|v| linalg::dist(v.coords(), u.coords()) <= 1e-9) {
            out.push(u);
        }
    }
    out
}
