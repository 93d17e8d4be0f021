//! Dense complex solve for the small change-of-basis systems.

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Solves `a x = b` by LU with partial pivoting. `a` is row-major `n x n`.
pub(crate) fn solve<T: Real>(mut a: Vec<Vec<C<T>>>, mut b: Vec<C<T>>) -> Result<Vec<C<T>>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Error::SolveFailure("dimension mismatch".into()));
    }
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(T::zero(), |m, v| m.max(v.norm()));
    let tiny = scale * T::epsilon() * T::nat(n.max(1));
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].norm().partial_cmp(&a[j][col].norm()).unwrap_or(std::cmp::Ordering::Equal))
            .expect("non-empty range");
        if !(a[piv][col].norm() > tiny) {
            return Err(Error::SolveFailure(format!("singular pivot in column {col}")));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor.norm() == T::zero() {
                continue;
            }
            for k in col..n {
                let v = a[col][k];
                a[row][k] = a[row][k] - factor * v;
            }
            let v = b[col];
            b[row] = b[row] - factor * v;
        }
    }
    let mut x = b;
    for row in (0..n).rev() {
        let mut acc = x[row];
        for k in row + 1..n {
            acc = acc - a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn solves_small_system() {
        let c = Complex64::new;
        let a = vec![
            vec![c(0.0, 0.0), c(2.0, 1.0), c(1.0, 0.0)],
            vec![c(1.0, -1.0), c(0.5, 0.0), c(0.0, 3.0)],
            vec![c(2.0, 0.0), c(0.0, 0.0), c(1.0, 1.0)],
        ];
        let x = vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.0, -1.0)];
        let b: Vec<Complex64> = a
            .iter()
            .map(|r| r.iter().zip(&x).map(|(u, v)| u * v).sum())
            .collect();
        let got = solve(a, b).unwrap();
        for (g, w) in got.iter().zip(&x) {
            assert!((g - w).norm() < 1e-14);
        }
    }

    #[test]
    fn singular_rejected() {
        let c = Complex64::new;
        let a = vec![vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(4.0, 0.0)]];
        assert!(solve(a, vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
    }
}
