//! Dense Gaussian elimination for the small reward systems (n is the pool count).

use crate::error::{Error, Result};

/// LU factorisation with partial pivoting of a row-major `n x n` matrix.
pub(crate) struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    pub(crate) fn factor(n: usize, mut a: Vec<f64>) -> Result<Self> {
        debug_assert_eq!(a.len(), n * n);
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let (pivot_row, pivot) = (col..n)
                .map(|r| (r, a[r * n + col]))
                .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
                .expect("non-empty pivot range");
            if !(pivot.abs() > 1e-300) {
                return Err(Error::SingularSystem { pivot });
            }
            if pivot_row != col {
                for k in 0..n {
                    a.swap(col * n + k, pivot_row * n + k);
                }
                perm.swap(col, pivot_row);
            }
            for r in col + 1..n {
                let factor = a[r * n + col] / pivot;
                a[r * n + col] = factor;
                if factor != 0.0 {
                    for k in col + 1..n {
                        a[r * n + k] -= factor * a[col * n + k];
                    }
                }
            }
        }
        Ok(Self { n, lu: a, perm })
    }

    pub(crate) fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for r in 0..n {
            let mut acc = x[r];
            for k in 0..r {
                acc -= self.lu[r * n + k] * x[k];
            }
            x[r] = acc;
        }
        for r in (0..n).rev() {
            let mut acc = x[r];
            for k in r + 1..n {
                acc -= self.lu[r * n + k] * x[k];
            }
            x[r] = acc / self.lu[r * n + r];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_with_pivoting() {
        // first pivot is zero, forcing a row swap
        let a = vec![0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 2.0, 0.0, 3.0];
        let lu = Lu::factor(3, a.clone()).unwrap();
        let b = [3.0, 2.0, 5.0];
        let x = lu.solve(&b);
        for r in 0..3 {
            let got: f64 = (0..3).map(|k| a[r * 3 + k] * x[k]).sum();
            assert!((got - b[r]).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_is_reported() {
        let err = Lu::factor(2, vec![1.0, 2.0, 2.0, 4.0]).err().unwrap();
        assert!(matches!(err, Error::SingularSystem { .. }));
    }
}
