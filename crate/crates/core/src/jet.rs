//! Truncated Taylor expansions `c_0 + c_1 h + ... + c_{L-1} h^{L-1}` about a
//! fixed centre.
//!
//! The Schur recurrence divides by `zeta_{k+1}`, which vanishes at
//! `alpha_{k+1}`. Evaluating a remainder at a repeated interpolation node is
//! therefore a `0/0` limit; carrying jets through the recurrence resolves it
//! exactly, one order of the jet being consumed per coincident division.

use crate::scalar::{c0, c1, Real, C};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet<T: Real> {
    coeffs: Vec<C<T>>,
}

impl<T: Real> Jet<T> {
    pub fn new(coeffs: Vec<C<T>>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least one coefficient");
        Self { coeffs }
    }

    pub fn constant(value: C<T>, len: usize) -> Self {
        let mut coeffs = vec![c0(); len.max(1)];
        coeffs[0] = value;
        Self { coeffs }
    }

    /// Jet of the identity map `z = w + h`.
    pub fn variable(center: C<T>, len: usize) -> Self {
        let mut j = Self::constant(center, len);
        if len > 1 {
            j.coeffs[1] = c1();
        }
        j
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn value(&self) -> C<T> {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[C<T>] {
        &self.coeffs
    }

    pub fn truncate(mut self, len: usize) -> Self {
        self.coeffs.truncate(len.max(1));
        self
    }

    fn common(&self, other: &Self) -> usize {
        self.len().min(other.len())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.common(other);
        Self::new((0..n).map(|k| self.coeffs[k] + other.coeffs[k]).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.common(other);
        Self::new((0..n).map(|k| self.coeffs[k] - other.coeffs[k]).collect())
    }

    pub fn add_scalar(&self, s: C<T>) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = out.coeffs[0] + s;
        out
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self::new(self.coeffs.iter().map(|c| *c * s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.common(other);
        let mut out = vec![c0(); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            for (j, b) in other.coeffs.iter().take(n - i).enumerate() {
                out[i + j] = out[i + j] + *a * *b;
            }
        }
        Self::new(out)
    }

    /// Series quotient; the divisor must have a non-zero constant term.
    pub fn div(&self, other: &Self) -> Self {
        let n = self.common(other);
        let d0 = other.coeffs[0];
        let mut out: Vec<C<T>> = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = self.coeffs[k];
            for j in 1..=k.min(other.len() - 1) {
                acc = acc - other.coeffs[j] * out[k - j];
            }
            out.push(acc / d0);
        }
        Self::new(out)
    }

    pub fn recip(&self) -> Self {
        Self::constant(c1(), self.len()).div(self)
    }

    /// Divide by `h`, discarding the constant term (which the caller knows to
    /// vanish). The result is one order shorter.
    pub fn shift_down(&self) -> Self {
        if self.len() == 1 {
            // Nothing left to resolve the limit with.
            return Self::new(vec![C::new(T::nan(), T::nan())]);
        }
        Self::new(self.coeffs[1..].to_vec())
    }

    pub fn exp(&self) -> Self {
        // g' = f' g
        let n = self.len();
        let mut out = vec![c0(); n];
        out[0] = self.coeffs[0].exp();
        for k in 1..n {
            let mut acc = c0::<T>();
            for j in 1..=k {
                acc = acc + self.coeffs[j] * out[k - j] * T::nat(j);
            }
            out[k] = acc / T::nat(k);
        }
        Self::new(out)
    }

    /// Composition `p(self)` where `p` is given by its jet at `self.value()`.
    pub fn compose(&self, outer: &Self) -> Self {
        let n = self.common(outer);
        let mut inner = self.clone().truncate(n);
        inner.coeffs[0] = c0();
        // Horner in the series ring.
        let mut acc = Self::constant(outer.coeffs[n - 1], n);
        for k in (0..n - 1).rev() {
            acc = acc.mul(&inner).add_scalar(outer.coeffs[k]);
        }
        acc
    }

    pub fn conj_coeffs(&self) -> Vec<C<T>> {
        self.coeffs.iter().map(|c| c.conj()).collect()
    }
}

/// Taylor coefficients of the polynomial `sum coeffs[k] z^k` about `w`,
/// truncated to `len` terms.
pub fn poly_taylor<T: Real>(coeffs: &[C<T>], w: C<T>, len: usize) -> Jet<T> {
    // Repeated synthetic division by (z - w).
    let mut work: Vec<C<T>> = coeffs.to_vec();
    if work.is_empty() {
        work.push(c0());
    }
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        if work.is_empty() {
            out.push(c0());
            continue;
        }
        // Horner: quotient and remainder of work / (z - w).
        let deg = work.len() - 1;
        let mut q = vec![c0::<T>(); deg];
        let mut acc = work[deg];
        for k in (0..deg).rev() {
            q[k] = acc;
            acc = work[k] + acc * w;
        }
        out.push(acc);
        work = q;
    }
    Jet::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn poly_taylor_matches_shifted_expansion() {
        // p(z) = 1 + 2z + 3z^2 about w = 0.5: p(w) = 2.75, p' = 2 + 6w = 5, p''/2 = 3
        let j = poly_taylor(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)], c(0.5, 0.0), 4);
        let want = [2.75, 5.0, 3.0, 0.0];
        for (a, b) in j.coeffs().iter().zip(want) {
            assert!((a - c(b, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn div_inverts_mul() {
        let a = Jet::new(vec![c(1.0, 0.5), c(-0.3, 0.2), c(0.7, 0.0), c(0.1, -0.9)]);
        let b = Jet::new(vec![c(2.0, -1.0), c(0.4, 0.4), c(-1.0, 0.3), c(0.0, 0.2)]);
        let back = a.mul(&b).div(&b);
        for (x, y) in back.coeffs().iter().zip(a.coeffs()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn exp_of_identity_is_exponential_series() {
        let j = Jet::variable(c(0.0, 0.0), 6).exp();
        let mut fact = 1.0;
        for (k, v) in j.coeffs().iter().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            assert!((v - c(1.0 / fact, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn compose_square_of_shift() {
        // outer p(u) = u^2 expanded at u0 = inner(0) = 1 -> (1, 2, 1);
        // inner(h) = 1 + h  ->  (1 + h)^2
        let inner = Jet::new(vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let outer = Jet::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
        let r = inner.compose(&outer);
        let want = [1.0, 2.0, 1.0];
        for (a, b) in r.coeffs().iter().zip(want) {
            assert!((a - c(b, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn shift_down_of_scalar_is_nan() {
        let j = Jet::constant(c(0.0, 0.0), 1).shift_down();
        assert!(j.value().re.is_nan());
    }
}
