//! Fourier analysis on the unit circle with the distance r(z, w) = |(z - w)/2|,
//! under which the chord-power kernel is f_p(e^{i theta}) = |sin(theta/2)|^p.
//!
//! Everything here lives in the r-normalization (circle diameter 1); the chord
//! metric of the other modules is twice r, so chord potentials are 2^p times
//! the convolution values produced here. The conversion is done explicitly by
//! callers at the module boundary.

use crate::error::{Error, Result};
use crate::measures::SpherePoint;
use crate::potential::PotentialSamples;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Divisors below this magnitude make the grid deconvolution singular.
pub const SINGULAR_DIVISOR_TOL: f64 = 1e-9;

/// Recovered weights below this are a reconstruction failure rather than noise.
pub const WEIGHT_CLAMP: f64 = -1e-9;

/// N equispaced nodes theta_j = 2 pi j / N on the circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircleGrid {
    n: usize,
}

impl CircleGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidArgument(format!(
                "circle grid needs at least 4 nodes, got {n}"
            )));
        }
        Ok(Self { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * (j as f64) / (self.n as f64)
    }

    pub fn thetas(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.theta(j)).collect()
    }

    pub fn point(&self, j: usize) -> SpherePoint {
        let t = self.theta(j);
        SpherePoint::new(vec![t.cos(), t.sin()]).expect("grid nodes are unit vectors")
    }

    pub fn points(&self) -> Vec<SpherePoint> {
        (0..self.n).map(|j| self.point(j)).collect()
    }
}

/// f_p sampled on the grid: `g[j] = |sin(pi j / N)|^p`.
pub fn kernel_samples(grid: CircleGrid, p: f64) -> Vec<f64> {
    let n = grid.len() as f64;
    (0..grid.len())
        .map(|j| (PI * j as f64 / n).sin().abs().powf(p))
        .collect()
}

/// Partial sums of the binomial-series expansion of the Fourier coefficient:
/// terms t_k = binom(p/2, k) (-1)^k 4^{-k} C(2k, k+n) for k = |n| .. k_max.
/// Built by the ratio recurrence t_{k+1}/t_k = (k - p/2)(2k+1) / (2 (k+1+|n|)(k+1-|n|));
/// the k = |n| seed is binom(p/2, |n|) (-1)^{|n|} 4^{-|n|} since C(2|n|, 2|n|) = 1.
fn series_terms(p: f64, n_abs: usize, k_max: usize) -> Vec<f64> {
    let mut t = 1.0;
    for j in 0..n_abs {
        t *= (p / 2.0 - j as f64) / (j as f64 + 1.0);
    }
    if n_abs % 2 == 1 {
        t = -t;
    }
    t *= 4f64.powi(-(n_abs as i32));
    let mut terms = Vec::with_capacity(k_max - n_abs + 1);
    terms.push(t);
    for k in n_abs..k_max {
        let kf = k as f64;
        let ratio = (kf - p / 2.0) * (2.0 * kf + 1.0)
            / (2.0 * (kf + 1.0 + n_abs as f64) * (kf + 1.0 - n_abs as f64));
        t *= ratio;
        terms.push(t);
    }
    terms
}

/// sum_{k >= start} k^{-s} by Euler-Maclaurin.
fn zeta_tail(s: f64, start: f64) -> f64 {
    start.powf(1.0 - s) / (s - 1.0) + 0.5 * start.powf(-s) + s * start.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * start.powf(-s - 3.0) / 720.0
}

/// Tail correction: the terms decay like k^{-s} with s = 3/2 + p/2 (the
/// binomial factor contributes k^{-1-p/2}, the central-binomial factor
/// k^{-1/2}). Fit t_k k^s to a cubic in u = k_max / k on log-spaced samples
/// in [k_max/2, k_max] and sum the fitted model over k > k_max.
/// Returns (order-3 tail, |order-3 - order-2| as the accuracy estimate).
fn tail_correction(terms: &[f64], n_abs: usize, k_max: usize, s: f64) -> (f64, f64) {
    let last = *terms.last().expect("at least one term");
    if last.abs() < 1e-300 {
        return (0.0, 0.0);
    }
    let lo = (k_max / 2).max(n_abs + 1);
    let count = 30usize;
    let (log_lo, log_hi) = ((lo as f64).ln(), (k_max as f64).ln());
    let mut ks: Vec<usize> = (0..count)
        .map(|i| {
            let t = i as f64 / (count - 1) as f64;
            (log_lo + t * (log_hi - log_lo)).exp().round() as usize
        })
        .collect();
    ks.dedup();
    let us: Vec<f64> = ks.iter().map(|&k| k_max as f64 / k as f64).collect();
    let ys: Vec<f64> = ks
        .iter()
        .map(|&k| terms[k - n_abs] * (k as f64).powf(s))
        .collect();
    let scale = ys.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    if scale == 0.0 {
        return (0.0, 0.0);
    }

    // Least squares for basis [1, u, .., u^order] via normal equations;
    // u lies in [1, 2] so the small systems are well-conditioned.
    let fit_tail = |order: usize| -> f64 {
        let dim = order + 1;
        let mut ata = vec![0.0; dim * dim];
        let mut atb = vec![0.0; dim];
        for (&u, &y) in us.iter().zip(&ys) {
            let mut pow = vec![1.0; dim];
            for i in 1..dim {
                pow[i] = pow[i - 1] * u;
            }
            for i in 0..dim {
                atb[i] += pow[i] * y / scale;
                for j in 0..dim {
                    ata[i * dim + j] += pow[i] * pow[j];
                }
            }
        }
        // Gaussian elimination with partial pivoting on the tiny system.
        for col in 0..dim {
            let pivot = (col..dim)
                .max_by(|&a, &b| {
                    ata[a * dim + col]
                        .abs()
                        .partial_cmp(&ata[b * dim + col].abs())
                        .unwrap()
                })
                .unwrap();
            if pivot != col {
                for j in 0..dim {
                    ata.swap(col * dim + j, pivot * dim + j);
                }
                atb.swap(col, pivot);
            }
            for row in col + 1..dim {
                let f = ata[row * dim + col] / ata[col * dim + col];
                for j in col..dim {
                    ata[row * dim + j] -= f * ata[col * dim + j];
                }
                atb[row] -= f * atb[col];
            }
        }
        let mut coef = vec![0.0; dim];
        for row in (0..dim).rev() {
            let mut acc = atb[row];
            for j in row + 1..dim {
                acc -= ata[row * dim + j] * coef[j];
            }
            coef[row] = acc / ata[row * dim + row];
        }
        let start = (k_max + 1) as f64;
        coef.iter()
            .enumerate()
            .map(|(i, &c)| c * scale * (k_max as f64).powi(i as i32) * zeta_tail(s + i as f64, start))
            .sum()
    };
    let t2 = fit_tail(2);
    let t3 = fit_tail(3);
    (t3, (t3 - t2).abs())
}

fn series_value(p: f64, n_abs: usize, k_max: usize) -> (f64, f64) {
    let terms = series_terms(p, n_abs, k_max);
    let partial: f64 = terms.iter().sum();
    let s = 1.5 + p / 2.0;
    let (tail, est) = tail_correction(&terms, n_abs, k_max, s);
    (partial + tail, est)
}

/// Fourier coefficient of f_p by the binomial-series expansion,
/// sum_{k=|n|}^{K} binom(p/2, k) (-1)^k 4^{-k} C(2k, k+n), with an
/// Euler-Maclaurin tail correction for the slowly decaying remainder.
///
/// The coefficient extraction uses (2 + z + z^{-1})^k = z^{-k} (1 + z)^{2k},
/// so the z^n coefficient of the k-th binomial term is 4^{-k} C(2k, k+n).
///
/// `k_cap` bounds the truncation; the sum is extended adaptively (doubling
/// from 256, which also honors the minimum truncation of 200) until the tail
/// estimate drops below 1e-10. [`Error::TruncationTooSmall`] is returned when
/// the estimate still exceeds 1e-8 at the cap.
pub fn kernel_coefficient_series(p: f64, n: i64, k_cap: usize) -> Result<f64> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("p = {p} must lie in [1, 2]")));
    }
    let n_abs = n.unsigned_abs() as usize;
    if k_cap < n_abs + 10 {
        return Err(Error::InvalidArgument(format!(
            "truncation cap {k_cap} must be at least |n| + 10 = {}",
            n_abs + 10
        )));
    }
    let mut k = (n_abs + 16).max(256).min(k_cap);
    loop {
        let (value, est) = series_value(p, n_abs, k);
        if est < 1e-10 {
            return Ok(value);
        }
        if k == k_cap {
            if est <= 1e-8 {
                return Ok(value);
            }
            return Err(Error::TruncationTooSmall {
                cap: k_cap,
                estimate: est,
            });
        }
        k = (k * 2).min(k_cap);
    }
}

/// Fourier coefficient of f_p by trapezoidal quadrature on M equispaced nodes:
/// (1/M) sum_j |sin(theta_j/2)|^p e^{-i n theta_j}. For periodic integrands the
/// error is pure aliasing, O(M^{-1-p}); callers pick M for their tolerance.
/// Requires M >= 2|n| + 16.
pub fn kernel_coefficient_quadrature(p: f64, n: i64, m_nodes: usize) -> f64 {
    assert!((1.0..=2.0).contains(&p), "p must lie in [1, 2]");
    assert!(
        m_nodes >= 2 * n.unsigned_abs() as usize + 16,
        "need M >= 2|n| + 16 nodes"
    );
    let m = m_nodes as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..m_nodes {
        let theta = 2.0 * PI * j as f64 / m;
        let f = (theta / 2.0).sin().abs().powf(p);
        acc += f * Complex64::new(0.0, -(n as f64) * theta).exp();
    }
    acc /= m;
    debug_assert!(acc.im.abs() <= 1e-10, "imaginary residual {}", acc.im);
    acc.re
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMethod {
    Series,
    Quadrature,
}

/// Table of Fourier coefficients of f_p up to a frequency cutoff.
/// Real and even: coefficient(-n) = coefficient(n).
#[derive(Debug, Clone)]
pub struct FourierKernel {
    p: f64,
    method: KernelMethod,
    coeffs: Vec<f64>,
}

impl FourierKernel {
    pub fn by_series(p: f64, max_freq: usize, k_cap: usize) -> Result<Self> {
        let coeffs = (0..=max_freq)
            .map(|n| kernel_coefficient_series(p, n as i64, k_cap))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            p,
            method: KernelMethod::Series,
            coeffs,
        })
    }

    pub fn by_quadrature(p: f64, max_freq: usize, m_nodes: usize) -> Self {
        let coeffs = (0..=max_freq)
            .map(|n| kernel_coefficient_quadrature(p, n as i64, m_nodes))
            .collect();
        Self {
            p,
            method: KernelMethod::Quadrature,
            coeffs,
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn method(&self) -> KernelMethod {
        self.method
    }

    pub fn max_freq(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficient(&self, n: i64) -> f64 {
        self.coeffs[n.unsigned_abs() as usize]
    }
}

/// Potential of a grid measure by circular convolution:
/// `values[j] = sum_k w_k f_p(theta_j - theta_k)`, in the r-normalization.
/// (Multiply by 2^p for the chord-metric potential of the other modules.)
pub fn potential_by_convolution(
    grid: CircleGrid,
    weights: &[f64],
    p: f64,
) -> Result<PotentialSamples> {
    let n = grid.len();
    if weights.len() != n {
        return Err(Error::DimensionMismatch(weights.len(), n));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 || weights.iter().any(|&w| w < 0.0) {
        return Err(Error::InvalidMeasure(format!(
            "grid weights must be nonnegative and sum to 1 (sum = {total:.17})"
        )));
    }
    let g = kernel_samples(grid, p);
    let values: Vec<f64> = (0..n)
        .map(|j| {
            (0..n)
                .map(|k| weights[k] * g[(j + n - k) % n])
                .sum()
        })
        .collect();
    PotentialSamples::ingest(grid.points(), values, p)
}

/// DFT of the grid-sampled kernel: `divisor[m] = sum_j g[j] e^{-2 pi i j m / N}`.
/// Real by symmetry; these are the eigenvalues of the circulant convolution
/// operator (aliased sums of the continuum coefficients, one-signed tails).
pub fn grid_divisors(grid: CircleGrid, p: f64) -> Vec<f64> {
    let n = grid.len();
    let g = kernel_samples(grid, p);
    (0..n)
        .map(|m| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &gj) in g.iter().enumerate() {
                let phase = -2.0 * PI * (j as f64) * (m as f64) / (n as f64);
                acc += gj * Complex64::new(0.0, phase).exp();
            }
            debug_assert!(acc.im.abs() < 1e-9);
            acc.re
        })
        .collect()
}

/// The N x N circulant matrix of the grid convolution operator,
/// `M[j][k] = f_p(theta_j - theta_k)`.
pub fn convolution_matrix(grid: CircleGrid, p: f64) -> Vec<Vec<f64>> {
    let n = grid.len();
    let g = kernel_samples(grid, p);
    (0..n)
        .map(|j| (0..n).map(|k| g[(j + n - k) % n].to_owned()).collect())
        .collect()
}

/// Recover grid weights from r-normalized potential values on the full grid:
/// divide the DFT of the values entrywise by the kernel divisors and invert.
///
/// For 1 <= p < 2 every divisor is nonzero (positive at frequency 0, negative
/// elsewhere); at p = 2 the operator has rank 3 and [`Error::SingularKernel`]
/// reports the N - 3 vanishing frequencies. Recovered weights below -1e-9
/// raise [`Error::NegativeWeight`]; tiny negatives are clamped and the result
/// renormalized.
pub fn deconvolve_grid(grid: CircleGrid, values: &[f64], p: f64) -> Result<Vec<f64>> {
    let n = grid.len();
    if values.len() != n {
        return Err(Error::DimensionMismatch(values.len(), n));
    }
    let divisors = grid_divisors(grid, p);
    let singular: Vec<usize> = divisors
        .iter()
        .enumerate()
        .filter(|(_, d)| d.abs() < SINGULAR_DIVISOR_TOL)
        .map(|(m, _)| m)
        .collect();
    if !singular.is_empty() {
        let kernel_dim = singular.len();
        return Err(Error::SingularKernel {
            frequencies: singular,
            rank: n - kernel_dim,
            kernel_dim,
        });
    }
    // Forward DFT of the samples, entrywise division, inverse DFT.
    let spectrum: Vec<Complex64> = (0..n)
        .map(|m| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &v) in values.iter().enumerate() {
                let phase = -2.0 * PI * (j as f64) * (m as f64) / (n as f64);
                acc += v * Complex64::new(0.0, phase).exp();
            }
            acc / divisors[m]
        })
        .collect();
    let mut weights = Vec::with_capacity(n);
    for j in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, s) in spectrum.iter().enumerate() {
            let phase = 2.0 * PI * (j as f64) * (m as f64) / (n as f64);
            acc += s * Complex64::new(0.0, phase).exp();
        }
        weights.push(acc.re / n as f64);
    }
    for (j, &w) in weights.iter().enumerate() {
        if w < WEIGHT_CLAMP {
            return Err(Error::NegativeWeight {
                index: j,
                weight: w,
            });
        }
    }
    for w in &mut weights {
        *w = w.max(0.0);
    }
    let total: f64 = weights.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::InvalidMeasure(
            "deconvolution recovered zero total mass".into(),
        ));
    }
    for w in &mut weights {
        *w /= total;
    }
    Ok(weights)
}

/// [`deconvolve_grid`] for samples whose sites are the full N-grid in order.
pub fn deconvolve_potential(samples: &PotentialSamples, p: f64) -> Result<Vec<f64>> {
    let n = samples.len();
    let grid = CircleGrid::new(n)?;
    for (j, site) in samples.sites().iter().enumerate() {
        if site.coords().len() != 2 {
            return Err(Error::InvalidArgument(
                "deconvolution requires circle sites".into(),
            ));
        }
        let expect = grid.point(j);
        if crate::linalg::dist(site.coords(), expect.coords()) > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "site {j} is not the grid node theta = 2 pi {j}/{n}"
            )));
        }
    }
    deconvolve_grid(grid, samples.values(), p)
}
