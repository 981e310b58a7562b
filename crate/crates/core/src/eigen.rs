//! Symmetric tridiagonal eigenproblem by implicit QL with Wilkinson-type
//! shifts, tracking only the first component of each eigenvector
//! (Golub–Welsch). Cost is O(n^2) instead of O(n^3).

use crate::error::{Error, Result};

/// Eigenvalues (ascending) and squared first eigenvector components of the
/// symmetric tridiagonal matrix with diagonal `diag` and off-diagonal `off`
/// (`off.len() == diag.len() - 1`).
pub fn tridiagonal_first_components(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    if off.len() + 1 != n {
        return Err(Error::Eigen(format!(
            "off-diagonal length {} for order {}",
            off.len(),
            n
        )));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n];
    z[0] = 1.0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Eigen(format!(
                    "no convergence for eigenvalue {l} after 60 sweeps"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = idx.iter().map(|&i| d[i]).collect();
    let weights = idx.iter().map(|&i| z[i] * z[i]).collect();
    Ok((values, weights))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_free() {
        let (v, w) = tridiagonal_first_components(&[0.0, 0.0], &[1.0]).unwrap();
        assert!((v[0] + 1.0).abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15);
        assert!((w[0] - 0.5).abs() < 1e-15 && (w[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn free_matrix_matches_chebyshev_nodes() {
        let n = 200;
        let (v, w) = tridiagonal_first_components(&vec![0.0; n], &vec![1.0; n - 1]).unwrap();
        let h = std::f64::consts::PI / (n as f64 + 1.0);
        for k in 1..=n {
            let x = 2.0 * ((n + 1 - k) as f64 * h).cos();
            let lam = 2.0 / (n as f64 + 1.0) * ((n + 1 - k) as f64 * h).sin().powi(2);
            assert!((v[k - 1] - x).abs() < 1e-12, "node {k}");
            assert!((w[k - 1] - lam).abs() < 1e-12, "weight {k}");
        }
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(tridiagonal_first_components(&[1.0, 2.0], &[]).is_err());
    }
}
