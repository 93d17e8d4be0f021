//! Wall rational functions `A_n, B_n, A_n*, B_n*`.
//!
//! Two independent evaluation paths:
//!
//! * the transfer product
//!   `prod_{k=n..1} [[1, conj g_k], [g_k, 1]] diag(zeta_k, 1) . [[1, conj g_0], [g_0, 1]]
//!    = [[B*, A*], [A, B]]`, rescaled after every factor;
//! * the Euler convergent ladder `P_k, Q_k`, with `A_n = P_{2n}`, `B_n = Q_{2n}`.

use crate::error::Result;
use crate::geometry::zeta;
use crate::schur::{AlphaSequence, SchurParams};
use crate::scalar::{c0, c1, cr, Real, C};

/// Wall functions at one point, stored as `exp(-log_scale)` times the true
/// values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallEval<T: Real> {
    pub a: C<T>,
    pub b: C<T>,
    pub astar: C<T>,
    pub bstar: C<T>,
    pub log_scale: T,
    pub n: usize,
}

impl<T: Real> WallEval<T> {
    /// True (unscaled) `(A, B, A*, B*)`; may overflow for long products.
    pub fn unscaled(&self) -> [C<T>; 4] {
        let s = self.log_scale.exp();
        [self.a * s, self.b * s, self.astar * s, self.bstar * s]
    }

    /// `A_n / B_n`.
    #[inline]
    pub fn ratio(&self) -> C<T> {
        self.a / self.b
    }

    /// Residual of `B B* - A A* = Bl_n omega_n`, relative to the size of the
    /// products on the left.
    pub fn det_residual(&self, blaschke: C<T>, omega: T) -> T {
        let lhs = self.b * self.bstar - self.a * self.astar;
        let rhs = blaschke * (omega * (-T::lit(2.0) * self.log_scale).exp());
        let size = (self.b * self.bstar).norm() + (self.a * self.astar).norm();
        (lhs - rhs).norm() / size.max(rhs.norm()).max(T::min_positive_value())
    }

    /// Residual of `|B|^2 - |A|^2 = omega_n` on the circle, relative to
    /// `|A|^2 + |B|^2`.
    pub fn circle_det_residual(&self, omega: T) -> T {
        let lhs = self.b.norm_sqr() - self.a.norm_sqr();
        let rhs = omega * (-T::lit(2.0) * self.log_scale).exp();
        (lhs - rhs).abs() / (self.b.norm_sqr() + self.a.norm_sqr())
    }

    /// Same residual relative to `omega_n`. Its condition number is
    /// `(|A|^2 + |B|^2) / omega_n`, which grows geometrically with `n`.
    pub fn circle_det_residual_omega(&self, omega: T) -> T {
        let lhs = self.b.norm_sqr() - self.a.norm_sqr();
        let rhs = omega * (-T::lit(2.0) * self.log_scale).exp();
        (lhs - rhs).abs() / rhs
    }
}

fn max_norm<T: Real>(m: &[[C<T>; 2]; 2]) -> T {
    m.iter()
        .flat_map(|r| r.iter())
        .fold(T::zero(), |a, v| a.max(v.norm()))
}

fn rescale<T: Real>(m: &mut [[C<T>; 2]; 2], log_scale: &mut T) {
    let s = max_norm(m);
    if s > T::zero() {
        for row in m.iter_mut() {
            for v in row.iter_mut() {
                *v = *v / s;
            }
        }
        *log_scale = *log_scale + s.ln();
    }
}

fn to_eval<T: Real>(m: &[[C<T>; 2]; 2], log_scale: T, n: usize) -> WallEval<T> {
    WallEval {
        bstar: m[0][0],
        astar: m[0][1],
        a: m[1][0],
        b: m[1][1],
        log_scale,
        n,
    }
}

/// Wall functions of every order `0..=n_max` at `z`, built incrementally.
pub fn wall_ladder<T: Real>(
    params: &SchurParams<T>,
    alphas: &AlphaSequence<T>,
    n_max: usize,
    z: C<T>,
) -> Result<Vec<WallEval<T>>> {
    params.require(n_max)?;
    let g0 = params.gamma(0);
    let mut m = [[c1::<T>(), g0.conj()], [g0, c1()]];
    let mut log_scale = T::zero();
    rescale(&mut m, &mut log_scale);
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(to_eval(&m, log_scale, 0));
    for k in 1..=n_max {
        let zk = zeta(alphas.get(k), z)?;
        let g = params.gamma(k);
        // diag(zeta, 1) M scales the first row
        let r0 = [m[0][0] * zk, m[0][1] * zk];
        let r1 = m[1];
        m = [
            [r0[0] + g.conj() * r1[0], r0[1] + g.conj() * r1[1]],
            [g * r0[0] + r1[0], g * r0[1] + r1[1]],
        ];
        rescale(&mut m, &mut log_scale);
        out.push(to_eval(&m, log_scale, k));
    }
    Ok(out)
}

/// Transfer-matrix evaluation of the Wall functions of order `n` at `z`.
pub fn wall_eval<T: Real>(
    params: &SchurParams<T>,
    alphas: &AlphaSequence<T>,
    n: usize,
    z: C<T>,
) -> Result<WallEval<T>> {
    Ok(wall_ladder(params, alphas, n, z)?.pop().expect("non-empty ladder"))
}

/// Euler convergents `P_k, Q_k` for `k = -1 ..= 2n+1`; index `k + 1` in the
/// vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerLadder<T: Real> {
    pub p: Vec<C<T>>,
    pub q: Vec<C<T>>,
}

impl<T: Real> EulerLadder<T> {
    /// `P_k` for `k >= -1`.
    pub fn p_at(&self, k: isize) -> C<T> {
        self.p[(k + 1) as usize]
    }

    pub fn q_at(&self, k: isize) -> C<T> {
        self.q[(k + 1) as usize]
    }
}

/// Four-term Euler recurrences up to `P_{2n+1}, Q_{2n+1}` (needs `gamma_n`
/// and `alpha_{n+1}`).
pub fn euler_convergents<T: Real>(
    params: &SchurParams<T>,
    alphas: &AlphaSequence<T>,
    n: usize,
    z: C<T>,
) -> Result<EulerLadder<T>> {
    params.require(n)?;
    let mut p = Vec::with_capacity(2 * n + 3);
    let mut q = Vec::with_capacity(2 * n + 3);
    p.push(c1::<T>());
    q.push(c0::<T>());
    p.push(params.gamma(0));
    q.push(c1::<T>());
    for m in 1..=n + 1 {
        let gp = params.gamma(m - 1);
        let zm = zeta(alphas.get(m), z)?;
        let w = cr(T::one() - gp.norm_sqr());
        // index of P_{2m-2} is 2m-1, of P_{2m-3} is 2m-2
        let i2 = 2 * m - 1;
        let i3 = 2 * m - 2;
        p.push(gp.conj() * zm * p[i2] + w * zm * p[i3]);
        q.push(gp.conj() * zm * q[i2] + w * zm * q[i3]);
        if m <= n {
            let g = params.gamma(m);
            let (po, qo) = (p[2 * m], q[2 * m]);
            p.push(g * po + p[i2]);
            q.push(g * qo + q[i2]);
        }
    }
    Ok(EulerLadder { p, q })
}

/// Schur approximant `A_n(z) / B_n(z)`.
pub fn approximant<T: Real>(
    params: &SchurParams<T>,
    alphas: &AlphaSequence<T>,
    n: usize,
    z: C<T>,
) -> Result<C<T>> {
    Ok(wall_eval(params, alphas, n, z)?.ratio())
}

/// `(A_n + zeta_{n+1} B_n* tail) / (B_n + zeta_{n+1} A_n* tail)`.
pub fn reconstruct_f<T: Real>(
    params: &SchurParams<T>,
    alphas: &AlphaSequence<T>,
    n: usize,
    z: C<T>,
    tail: C<T>,
) -> Result<C<T>> {
    let w = wall_eval(params, alphas, n, z)?;
    let zt = zeta(alphas.get(n + 1), z)? * tail;
    Ok((w.a + zt * w.bstar) / (w.b + zt * w.astar))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schur::{schur_parameters, AlphaGenerator, SchurFunction};
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn classical(n: usize) -> AlphaSequence<f64> {
        AlphaSequence::generate(AlphaGenerator::Classical, n).unwrap()
    }

    #[test]
    fn order_zero() {
        let p = SchurParams::new(vec![c(0.3, 0.4)]).unwrap();
        let w = wall_eval(&p, &classical(2), 0, c(0.2, 0.1)).unwrap();
        let [a, b, astar, bstar] = w.unscaled();
        assert!((a - c(0.3, 0.4)).norm() < 1e-15);
        assert!((b - c(1.0, 0.0)).norm() < 1e-15);
        assert!((astar - c(0.3, -0.4)).norm() < 1e-15);
        assert!((bstar - c(1.0, 0.0)).norm() < 1e-15);
        assert!((approximant(&p, &classical(2), 0, c(0.7, 0.0)).unwrap() - c(0.3, 0.4)).norm() < 1e-15);
    }

    #[test]
    fn zero_parameters() {
        let p = SchurParams::new(vec![c(0.0, 0.0); 6]).unwrap();
        let alphas = AlphaSequence::generate(AlphaGenerator::CompactCircle { r: 0.4, theta_step: 0.9 }, 8).unwrap();
        let w = wall_eval(&p, &alphas, 5, c(0.1, -0.6)).unwrap();
        assert_eq!(w.a, c(0.0, 0.0));
        assert!((w.unscaled()[1] - c(1.0, 0.0)).norm() < 1e-15);
        let e = euler_convergents(&p, &alphas, 5, c(0.1, -0.6)).unwrap();
        for k in 0..=5 {
            assert_eq!(e.p_at(2 * k), c(0.0, 0.0));
            assert!((e.q_at(2 * k) - c(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn circle_determinant_order_zero() {
        let p = SchurParams::new(vec![c(0.5, 0.0)]).unwrap();
        let w = wall_eval(&p, &classical(2), 0, c(0.0, 1.0)).unwrap();
        assert!(w.circle_det_residual(0.75) < 1e-15);
    }

    #[test]
    fn euler_seeds_and_odd_identity() {
        let p = SchurParams::new(vec![c(0.2, 0.1), c(-0.3, 0.5), c(0.1, -0.6), c(0.4, 0.0)]).unwrap();
        let alphas = AlphaSequence::generate(
            AlphaGenerator::Cycle(vec![c(0.0, 0.0), c(0.3, 0.0), c(0.0, 0.5), c(-0.4, 0.0)]),
            6,
        )
        .unwrap();
        let z = c(0.25, -0.35);
        let e = euler_convergents(&p, &alphas, 3, z).unwrap();
        assert_eq!(e.p_at(-1), c(1.0, 0.0));
        assert_eq!(e.q_at(-1), c(0.0, 0.0));
        assert_eq!(e.p_at(0), c(0.2, 0.1));
        assert_eq!(e.q_at(0), c(1.0, 0.0));
        for n in 0..=3 {
            let w = wall_eval(&p, &alphas, n, z).unwrap();
            let [a, b, astar, bstar] = w.unscaled();
            let zn = zeta(alphas.get(n + 1), z).unwrap();
            let n = n as isize;
            assert!((e.p_at(2 * n) - a).norm() < 1e-13);
            assert!((e.q_at(2 * n) - b).norm() < 1e-13);
            assert!((e.p_at(2 * n + 1) - zn * bstar).norm() < 1e-13);
            assert!((e.q_at(2 * n + 1) - zn * astar).norm() < 1e-13);
        }
    }

    #[test]
    fn reconstruction_of_half_z() {
        let f = SchurFunction::scaled_identity(c(0.5, 0.0)).unwrap();
        let alphas = classical(6);
        let p = schur_parameters(&f, &alphas, 4).unwrap();
        for j in 0..100 {
            let t = crate::scalar::cis(std::f64::consts::TAU * j as f64 / 100.0);
            let tail = c(0.0, 0.0); // f_4 = 0
            let v = reconstruct_f(&p, &alphas, 3, t, tail).unwrap();
            assert!((v - t * 0.5).norm() < 1e-9);
        }
        let cst = SchurFunction::constant(c(0.6, 0.0)).unwrap();
        let pc = schur_parameters(&cst, &alphas, 1).unwrap();
        let v = reconstruct_f(&pc, &alphas, 0, c(0.3, 0.3), c(0.0, 0.0)).unwrap();
        assert!((v - c(0.6, 0.0)).norm() < 1e-15);
    }
}
