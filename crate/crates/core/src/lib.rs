//! Exact discrete optimal transport for probability measures on spheres with
//! the chord (Euclidean) metric.
//!
//! The toolkit covers:
//!
//! - [`measures`]: points on S^n, discrete measures in R^{n+1}, barycenters,
//!   push-forwards, translations, and the admissible-translation geometry of
//!   two-point measures;
//! - [`transport`]: cost matrices (chord powers, the detour cost c_alpha,
//!   ambient squared), an exact transportation-simplex solver, and
//!   p-Wasserstein distances;
//! - [`potential`]: Wasserstein potentials, the quadratic barycentric distance
//!   formulas, dispersion, and the orthogonal-support criterion;
//! - [`circle`]: Fourier coefficients of the chord-power kernel on S^1 (by
//!   binomial series and by quadrature), circular convolution, and the
//!   deconvolution that recovers grid measures from their potentials for
//!   1 <= p < 2 — including the rank collapse that makes p = 2 fail;
//! - [`interpolate`]: the spherical projection p_alpha, projected displacement
//!   interpolation, the mean squared error Q_alpha and its minimizer, and the
//!   preimage geometry of p_alpha;
//! - [`rigidity`]: executable batteries for the quantities the isometric-
//!   rigidity proof preserves, reported as structured pass/fail records;
//! - [`io`]: the shared measure JSON, potential CSV, and report JSON-line
//!   formats with deterministic 17-significant-digit serialization.

#![forbid(unsafe_code)]

pub mod circle;
pub mod error;
pub mod interpolate;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod potential;
pub mod rigidity;
pub mod sampling;
pub mod transport;

pub use error::{Error, Result};
pub use interpolate::{
    displacement_projection, invert_half_projection, minimize_q, p_alpha,
    preimages_under_p_alpha, q_alpha, InterpolationResult,
};
pub use measures::{
    admissible_translations, project_to_sphere, DiscreteMeasure, SpherePoint, TranslationSphere,
};
pub use potential::{
    dirac_distance_quadratic, dispersion, orthogonality_defect, potential, PotentialSamples,
};
pub use rigidity::{
    bisector_mass, verify_rigidity_battery, verify_translation_identity, BisectorScan,
    PropertyReport,
};
pub use transport::{
    ambient_w2_squared, c_alpha_cost, chord_cost, solve_transport, squared_cost,
    wasserstein_distance, CostKind, CostMatrix, TransportPlan,
};
