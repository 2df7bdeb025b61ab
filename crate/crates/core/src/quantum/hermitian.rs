//! Eigenvalues of small Hermitian matrices.
//!
//! A Hermitian `H = A + iB` is embedded as the real symmetric
//! `[[A, -B], [B, A]]`, whose spectrum is that of `H` with every eigenvalue
//! doubled; the real matrix is diagonalized by cyclic Jacobi rotations.

use num_complex::Complex;
use num_traits::Float;

/// Eigenvalues (unordered) of the Hermitian `n × n` row-major matrix `h`.
pub fn hermitian_eigenvalues<R: Float>(h: &[Complex<R>], n: usize) -> Vec<R> {
    assert_eq!(h.len(), n * n);
    let m = 2 * n;
    let mut a = vec![R::zero(); m * m];
    for i in 0..n {
        for j in 0..n {
            let z = h[i * n + j];
            a[i * m + j] = z.re;
            a[(i + n) * m + (j + n)] = z.re;
            a[i * m + (j + n)] = -z.im;
            a[(i + n) * m + j] = z.im;
        }
    }
    let mut all = symmetric_eigenvalues(a, m);
    all.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    // Pairs of equal eigenvalues: keep every other one.
    all.into_iter().step_by(2).collect()
}

/// Eigenvalues of a real symmetric `n × n` matrix by cyclic Jacobi.
pub fn symmetric_eigenvalues<R: Float>(mut a: Vec<R>, n: usize) -> Vec<R> {
    let two = R::one() + R::one();
    let scale = a.iter().fold(R::zero(), |acc, &x| acc + x * x);
    let tiny = R::epsilon() * R::epsilon() * scale.max(R::min_positive_value());
    for _sweep in 0..64 {
        let mut off = R::zero();
        for p in 0..n {
            for q in p + 1..n {
                off = off + a[p * n + q] * a[p * n + q];
            }
        }
        if off <= tiny {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == R::zero() {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + R::one()).sqrt());
                let c = R::one() / (t * t + R::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}
