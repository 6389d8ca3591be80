use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A vector too close to the origin was handed to the spherical projection.
    /// Signals the `p_alpha` singularity (alpha = 1/2 with antipodal arguments).
    #[error("cannot project: vector norm {norm:.3e} is below {eps:.3e}")]
    DegenerateVector { norm: f64, eps: f64 },

    /// Admissible-translation geometry is only defined for two-point measures
    /// with weights 1/2, 1/2.
    #[error("not a two-point equal-weight measure: {0}")]
    NotTwoPoint(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    /// The pivot cap was hit. With Bland's rule and lexicographic ratio tests
    /// this indicates a bug, never an expected outcome.
    #[error("transportation simplex stalled after {0} pivots")]
    SolverStall(usize),

    #[error("measure is not supported on the sphere: atom {index} has norm {norm}")]
    NotOnSphere { index: usize, norm: f64 },

    /// The kernel-coefficient series could not reach the target accuracy
    /// within the requested truncation cap.
    #[error("series truncation K={cap} too small: tail estimate {estimate:.3e} exceeds 1e-8")]
    TruncationTooSmall { cap: usize, estimate: f64 },

    /// Deconvolution divisors vanish. Expected exactly at p = 2, where the
    /// grid convolution operator has rank 3 and kernel dimension N - 3.
    #[error(
        "singular deconvolution kernel: {} vanishing frequencies, rank {rank}, kernel dimension {kernel_dim}",
        frequencies.len()
    )]
    SingularKernel {
        frequencies: Vec<usize>,
        rank: usize,
        kernel_dim: usize,
    },

    /// At alpha = 1/2 the plan puts the reported mass on antipodal pairs,
    /// where the spherical projection is undefined.
    #[error("plan carries mass {0} on antipodal pairs at alpha = 1/2")]
    AntipodalMass(f64),

    #[error("target is not in the open upper hemisphere: <w, N> = {0}")]
    NotInUpperHemisphere(f64),

    /// Deconvolution recovered a weight below the -1e-9 clamp threshold;
    /// distinguishes conditioning problems from logic bugs.
    #[error("reconstruction failed: weight {weight:.3e} at node {index} is below -1e-9")]
    NegativeWeight { index: usize, weight: f64 },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
