//! Dense symmetric eigendecomposition and small SVD, both by Jacobi
//! rotations. Matrices are row-major `Vec<f64>`.

use alloc::vec;
use alloc::vec::Vec;

/// Eigenvalues (descending) and matching unit eigenvectors (as columns of
/// a row-major `n × n` matrix) of a symmetric matrix.
pub(crate) fn symmetric_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut m = a.to_vec();
    let mut v = identity(n);
    let scale: f64 = m.iter().map(|x| x * x).sum::<f64>();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum();
        if off <= 1e-30 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + libm::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j * n + j].total_cmp(&m[i * n + i]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| m[i * n + i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[row * n + col] = v[row * n + src];
        }
    }
    (values, vectors)
}

pub(crate) fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

/// Thin SVD `A = U diag(s) Vᵀ` of a square `n × n` matrix by one-sided
/// Jacobi. Singular values are returned in descending order.
pub(crate) fn svd_square(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    // Orthogonalise the columns of W = A V.
    let mut w = a.to_vec();
    let mut v = identity(n);
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for k in 0..n {
                    let (wp, wq) = (w[k * n + p], w[k * n + q]);
                    alpha += wp * wp;
                    beta += wq * wq;
                    gamma += wp * wq;
                }
                if gamma == 0.0 || gamma.abs() <= 1e-15 * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + libm::sqrt(1.0 + zeta * zeta))
                } else {
                    -1.0 / (-zeta + libm::sqrt(1.0 + zeta * zeta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                for k in 0..n {
                    let (wp, wq) = (w[k * n + p], w[k * n + q]);
                    w[k * n + p] = c * wp - s * wq;
                    w[k * n + q] = s * wp + c * wq;
                    let (vp, vq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vp - s * vq;
                    v[k * n + q] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..n)
        .map(|j| libm::sqrt((0..n).map(|k| w[k * n + j] * w[k * n + j]).sum::<f64>()))
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));

    let mut u = vec![0.0; n * n];
    let mut vs = vec![0.0; n * n];
    let mut s = Vec::with_capacity(n);
    for (col, &src) in order.iter().enumerate() {
        s.push(norms[src]);
        for k in 0..n {
            vs[k * n + col] = v[k * n + src];
            if norms[src] > 0.0 {
                u[k * n + col] = w[k * n + src] / norms[src];
            }
        }
    }
    complete_orthonormal(&mut u, n, &s);
    (u, s, vs)
}

/// Replaces columns of `u` belonging to zero singular values with unit
/// vectors orthogonal to the others (Gram-Schmidt on the standard basis).
fn complete_orthonormal(u: &mut [f64], n: usize, s: &[f64]) {
    let tol = s.first().copied().unwrap_or(0.0) * 1e-13;
    for col in 0..n {
        if s[col] > tol && s[col] > 0.0 {
            continue;
        }
        for e in 0..n {
            let mut cand = vec![0.0; n];
            cand[e] = 1.0;
            for other in 0..n {
                if other == col || (other > col && !(s[other] > tol && s[other] > 0.0)) {
                    continue;
                }
                let dot: f64 = (0..n).map(|k| cand[k] * u[k * n + other]).sum();
                for k in 0..n {
                    cand[k] -= dot * u[k * n + other];
                }
            }
            let norm = libm::sqrt(cand.iter().map(|x| x * x).sum::<f64>());
            if norm > 1e-6 {
                for k in 0..n {
                    u[k * n + col] = cand[k] / norm;
                }
                break;
            }
        }
    }
}

/// Determinant of a small square matrix by Gaussian elimination with
/// partial pivoting.
pub(crate) fn determinant(a: &[f64], n: usize) -> f64 {
    let mut m = a.to_vec();
    let mut det = 1.0;
    for c in 0..n {
        let pivot = (c..n)
            .max_by(|&i, &j| m[i * n + c].abs().total_cmp(&m[j * n + c].abs()))
            .unwrap();
        if m[pivot * n + c] == 0.0 {
            return 0.0;
        }
        if pivot != c {
            for k in 0..n {
                m.swap(c * n + k, pivot * n + k);
            }
            det = -det;
        }
        let d = m[c * n + c];
        det *= d;
        for r in c + 1..n {
            let f = m[r * n + c] / d;
            for k in c..n {
                m[r * n + k] -= f * m[c * n + k];
            }
        }
    }
    det
}
