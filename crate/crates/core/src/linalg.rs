//! Dense real symmetric matrices and their eigenvalues.
//!
//! Householder reduction to tridiagonal form followed by the implicit-shift
//! QL iteration (Martin, Reinsch and Wilkinson). Only eigenvalues are
//! computed; eigenvectors are never needed by the positivity checks.

use crate::error::{Error, Result};

/// QL sweeps allowed per eigenvalue before giving up.
pub const QL_ITERATIONS_PER_EIGENVALUE: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        SymmetricMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Builds a matrix from its upper triangle; the lower triangle is mirrored
    /// so the result is exactly symmetric.
    pub fn from_upper(n: usize, mut entry: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = entry(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        SymmetricMatrix {
            n: self.n,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `P·A·P` with `P = I − (1/n)·J`, the projection onto mean-zero vectors.
    pub fn center(&self) -> Self {
        let n = self.n;
        if n == 0 {
            return self.clone();
        }
        let nf = n as f64;
        let row_mean: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j)).sum::<f64>() / nf)
            .collect();
        let total_mean = row_mean.iter().sum::<f64>() / nf;
        // A is symmetric, so column means equal row means
        Self::from_upper(n, |i, j| self.get(i, j) - row_mean[i] - row_mean[j] + total_mean)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.n;
        if n == 0 {
            return Ok(Vec::new());
        }
        let mut a = self.data.clone();
        let mut d = vec![0.0; n];
        let mut e = vec![0.0; n];
        tridiagonalize(n, &mut a, &mut d, &mut e);
        tridiagonal_ql(&mut d, &mut e)?;
        d.sort_by(f64::total_cmp);
        Ok(d)
    }
}

/// Householder reduction of the row-major matrix `a` to tridiagonal form:
/// diagonal in `d`, sub-diagonal in `e[1..]`.
fn tridiagonalize(n: usize, a: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let at = |i: usize, j: usize| i * n + j;
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a[at(i, k)].abs()).sum();
            if scale == 0.0 {
                e[i] = a[at(i, l)];
            } else {
                for k in 0..=l {
                    a[at(i, k)] /= scale;
                    h += a[at(i, k)] * a[at(i, k)];
                }
                let f = a[at(i, l)];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[at(i, l)] = f - g;
                let mut f = 0.0;
                for j in 0..=l {
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[at(j, k)] * a[at(i, k)];
                    }
                    for k in j + 1..=l {
                        g += a[at(k, j)] * a[at(i, k)];
                    }
                    e[j] = g / h;
                    f += e[j] * a[at(i, j)];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[at(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[at(j, k)] -= f * e[k] + g * a[at(i, k)];
                    }
                }
            }
        } else {
            e[i] = a[at(i, l)];
        }
        d[i] = h;
    }
    e[0] = 0.0;
    for i in 0..n {
        d[i] = a[at(i, i)];
    }
}

/// Implicit-shift QL on a symmetric tridiagonal matrix. On return `d` holds
/// the (unsorted) eigenvalues.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iterations = 0;
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
            iterations += 1;
            if iterations > QL_ITERATIONS_PER_EIGENVALUE {
                return Err(Error::NoConvergence { iterations });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Relative mismatch between the eigenvalue sum and the trace.
pub fn trace_residual(matrix: &SymmetricMatrix, eigenvalues: &[f64]) -> f64 {
    let trace = matrix.trace();
    let sum: f64 = eigenvalues.iter().sum();
    let scale = trace.abs().max(matrix.frobenius_norm());
    if scale == 0.0 {
        sum.abs()
    } else {
        (sum - trace).abs() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_small_cases() {
        assert!(SymmetricMatrix::zeros(0).eigenvalues().unwrap().is_empty());
        let one = SymmetricMatrix::from_upper(1, |_, _| 4.5);
        assert_eq!(one.eigenvalues().unwrap(), vec![4.5]);
        let diag = SymmetricMatrix::from_upper(3, |i, j| if i == j { [3.0, -1.0, 2.0][i] } else { 0.0 });
        assert_eq!(diag.eigenvalues().unwrap(), vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        let m = SymmetricMatrix::from_upper(2, |i, j| match (i, j) {
            (0, 0) => 2.0,
            (1, 1) => 2.0,
            _ => 1.0,
        });
        let ev = m.eigenvalues().unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn signed_all_ones_pattern() {
        // 5x5 with unit diagonal and -1 elsewhere: eigenvalues -3 and 2 (x4)
        let m = SymmetricMatrix::from_upper(5, |i, j| if i == j { 1.0 } else { -1.0 });
        let ev = m.eigenvalues().unwrap();
        assert!((ev[0] + 3.0).abs() < 1e-12);
        assert!(ev[1..].iter().all(|v| (v - 2.0).abs() < 1e-12));
        assert!(trace_residual(&m, &ev) < 1e-12);
    }

    #[test]
    fn centering_kills_constants() {
        let m = SymmetricMatrix::from_upper(4, |_, _| 7.0).center();
        assert!(m.frobenius_norm() < 1e-12);
    }
}
