//! Dense vector helpers for points in ambient R^{n+1}.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist_sq(a, b).sqrt()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// a + s * b
pub fn add_scaled(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

/// Orthonormal basis of the hyperplane orthogonal to `dir` (which need not be
/// normalized, but must be nonzero). Gram-Schmidt against the standard basis.
pub fn orthonormal_complement(dir: &[f64]) -> Vec<Vec<f64>> {
    let d = dir.len();
    let n = norm(dir);
    assert!(n > 0.0, "zero direction has no complement basis");
    let unit = scale(dir, 1.0 / n);
    let mut basis: Vec<Vec<f64>> = vec![unit];
    for i in 0..d {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        for b in &basis {
            let c = dot(&v, b);
            for (vk, bk) in v.iter_mut().zip(b) {
                *vk -= c * bk;
            }
        }
        // Re-orthogonalize once; plain Gram-Schmidt loses digits near parallel inputs.
        for b in &basis {
            let c = dot(&v, b);
            for (vk, bk) in v.iter_mut().zip(b) {
                *vk -= c * bk;
            }
        }
        let vn = norm(&v);
        if vn > 1e-8 {
            basis.push(scale(&v, 1.0 / vn));
        }
        if basis.len() == d {
            break;
        }
    }
    debug_assert_eq!(basis.len(), d);
    basis.remove(0);
    basis
}
