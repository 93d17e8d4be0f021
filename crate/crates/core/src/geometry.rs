//! Möbius factors, partial Blaschke products, disk metrics and the Poisson
//! kernel.

use crate::error::{Error, Result};
use crate::scalar::{c0, c1, Real, C};

/// Points with `|z| >= 1 - BOUNDARY_GUARD` are not accepted as disk points.
pub const BOUNDARY_GUARD: f64 = 1e-12;
/// Tolerance on `||t| - 1|` for circle points.
pub const CIRCLE_TOL: f64 = 1e-12;
/// Below this `|1 - conj(alpha) z|` an elementary factor is treated as a pole.
pub const POLE_TOL: f64 = 1e-300;
/// `rho` above this value makes the hyperbolic metric overflow.
pub const RHO_OVERFLOW: f64 = 1.0 - 1e-15;

/// A point strictly inside the unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint<T: Real>(C<T>);

impl<T: Real> DiskPoint<T> {
    pub fn new(value: C<T>) -> Result<Self> {
        if !(value.norm() < T::one() - T::lit(BOUNDARY_GUARD)) {
            return Err(Error::OutsideDisk {
                re: value.re.as_f64(),
                im: value.im.as_f64(),
                guard: BOUNDARY_GUARD,
            });
        }
        Ok(Self(value))
    }

    pub fn origin() -> Self {
        Self(c0())
    }

    #[inline]
    pub fn value(self) -> C<T> {
        self.0
    }
}

/// A point on the unit circle, renormalized to exact unit modulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirclePoint<T: Real>(C<T>);

impl<T: Real> CirclePoint<T> {
    pub fn new(value: C<T>) -> Result<Self> {
        let r = value.norm();
        if !((r - T::one()).abs() <= T::lit(CIRCLE_TOL)) {
            return Err(Error::NotOnCircle {
                re: value.re.as_f64(),
                im: value.im.as_f64(),
            });
        }
        Ok(Self(value / r))
    }

    pub fn from_angle(theta: T) -> Self {
        Self(crate::scalar::cis(theta))
    }

    #[inline]
    pub fn value(self) -> C<T> {
        self.0
    }
}

/// Elementary factor `(z - alpha) / (1 - conj(alpha) z)`.
pub fn zeta<T: Real>(alpha: C<T>, z: C<T>) -> Result<C<T>> {
    let den = c1::<T>() - alpha.conj() * z;
    let d = den.norm();
    if d.as_f64() < POLE_TOL {
        return Err(Error::PoleHit(d.as_f64()));
    }
    Ok((z - alpha) / den)
}

/// Elementary factor without the pole check; callers guarantee `|z| <= 1`.
#[inline]
pub(crate) fn zeta_unchecked<T: Real>(alpha: C<T>, z: C<T>) -> C<T> {
    (z - alpha) / (c1::<T>() - alpha.conj() * z)
}

/// Tail product `prod_{k=i}^{n} zeta_k(z)`; `alphas[k]` is `alpha_k` with
/// `alphas[0] = 0`. The empty product (`i = n + 1`) is one.
pub fn blaschke_partial<T: Real>(alphas: &[C<T>], i: usize, n: usize, z: C<T>) -> Result<C<T>> {
    if i == 0 || i > n + 1 {
        return Err(Error::OutOfRange(format!("tail index i = {i} for n = {n}")));
    }
    if n >= alphas.len() {
        return Err(Error::OutOfRange(format!(
            "order {n} exceeds {} available nodes",
            alphas.len().saturating_sub(1)
        )));
    }
    let mut acc = c1::<T>();
    for a in &alphas[i..=n] {
        acc = acc * zeta(*a, z)?;
    }
    Ok(acc)
}

/// Pseudohyperbolic distance `|z - w| / |1 - conj(w) z|` for raw values with
/// `|z|, |w| <= 1`. Returns 0 when both points coincide on the circle.
pub fn rho<T: Real>(z: C<T>, w: C<T>) -> T {
    let num = (z - w).norm();
    if num == T::zero() {
        return T::zero();
    }
    let den = (c1::<T>() - w.conj() * z).norm();
    if den == T::zero() {
        return T::one();
    }
    (num / den).min(T::one())
}

/// Pseudohyperbolic distance between two disk points.
pub fn pseudo_hyperbolic<T: Real>(z: DiskPoint<T>, w: DiskPoint<T>) -> T {
    rho(z.value(), w.value())
}

/// Hyperbolic metric from a pseudohyperbolic distance. `None` signals
/// overflow (`rho > 1 - 1e-15`).
pub fn hyperbolic_from_rho<T: Real>(r: T) -> Option<T> {
    if r.as_f64() > RHO_OVERFLOW {
        return None;
    }
    // log((1+r)/(1-r)) = 2 atanh(r), better conditioned near 0.
    Some(T::lit(2.0) * r.atanh())
}

/// Hyperbolic distance `log((1+rho)/(1-rho))`; `+inf` on overflow.
pub fn hyperbolic<T: Real>(z: DiskPoint<T>, w: DiskPoint<T>) -> T {
    hyperbolic_from_rho(pseudo_hyperbolic(z, w)).unwrap_or_else(T::infinity)
}

/// Poisson kernel `(1 - |w|^2) / |t - w|^2`.
pub fn poisson_kernel<T: Real>(t: CirclePoint<T>, w: DiskPoint<T>) -> T {
    poisson_raw(t.value(), w.value())
}

#[inline]
pub(crate) fn poisson_raw<T: Real>(t: C<T>, w: C<T>) -> T {
    (T::one() - w.norm_sqr()) / (t - w).norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn d(re: f64, im: f64) -> DiskPoint<f64> {
        DiskPoint::new(Complex64::new(re, im)).unwrap()
    }

    #[test]
    fn zeta_basic_cases() {
        let z = Complex64::new(0.3, -0.7);
        assert_eq!(zeta(Complex64::new(0.0, 0.0), z).unwrap(), z);
        let a = Complex64::new(0.2, 0.4);
        assert!(zeta(a, a).unwrap().norm() < 1e-16);
        let v = zeta(Complex64::new(0.5, 0.0), Complex64::new(1.0, 0.0)).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zeta_pole() {
        let a = Complex64::new(0.5, 0.0);
        assert!(matches!(zeta(a, Complex64::new(2.0, 0.0)), Err(Error::PoleHit(_))));
    }

    #[test]
    fn disk_point_guard() {
        assert!(DiskPoint::new(Complex64::new(1.0 - 1e-13, 0.0)).is_err());
        assert!(DiskPoint::new(Complex64::new(1.0 - 1e-11, 0.0)).is_ok());
        assert!(DiskPoint::new(Complex64::new(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn circle_point_renormalizes() {
        let t = CirclePoint::new(Complex64::new(1.0 + 5e-13, 0.0)).unwrap();
        assert_eq!(t.value().norm(), 1.0);
        assert!(CirclePoint::new(Complex64::new(1.1, 0.0)).is_err());
    }

    #[test]
    fn blaschke_partial_cases() {
        let alphas = vec![Complex64::new(0.0, 0.0); 6];
        let z = Complex64::new(0.4, 0.1);
        assert_eq!(blaschke_partial(&alphas, 6, 5, z).unwrap(), Complex64::new(1.0, 0.0));
        let b = blaschke_partial(&alphas, 1, 5, z).unwrap();
        assert!((b - z.powu(5)).norm() < 1e-15);
        assert!(blaschke_partial(&alphas, 0, 5, z).is_err());
        assert!(blaschke_partial(&alphas, 1, 9, z).is_err());
    }

    #[test]
    fn metric_cases() {
        let z = d(0.3, 0.2);
        assert_eq!(pseudo_hyperbolic(z, z), 0.0);
        let w = d(-0.1, 0.6);
        assert!((pseudo_hyperbolic(DiskPoint::origin(), w) - w.value().norm()).abs() < 1e-15);
        assert_eq!(hyperbolic(z, z), 0.0);
        assert!((hyperbolic_from_rho(0.5f64).unwrap() - 3f64.ln()).abs() < 1e-15);
        assert!(hyperbolic_from_rho(1.0 - 1e-16).is_none());
    }

    #[test]
    fn poisson_cases() {
        let t = CirclePoint::from_angle(0.7);
        assert!((poisson_kernel::<f64>(t, DiskPoint::origin()) - 1.0).abs() < 1e-15);
        let one = CirclePoint::new(Complex64::new(1.0, 0.0)).unwrap();
        assert!((poisson_kernel(one, d(0.5, 0.0)) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn poisson_mean_value() {
        let m = 4096;
        for w in [d(0.0, 0.0), d(0.5, -0.3), d(0.9, 0.0), d(0.0, -0.99)] {
            let mean: f64 = (0..m)
                .map(|j| {
                    let t = CirclePoint::from_angle(2.0 * std::f64::consts::PI * j as f64 / m as f64);
                    poisson_kernel(t, w)
                })
                .sum::<f64>()
                / m as f64;
            assert!((mean - 1.0).abs() < 1e-10, "w = {:?}: {mean}", w);
        }
    }

    #[test]
    fn works_in_single_precision() {
        let a = num_complex::Complex32::new(0.5, 0.0);
        let v = zeta(a, num_complex::Complex32::new(1.0, 0.0)).unwrap();
        assert!((v.re - 1.0).abs() < 1e-6);
    }
}
