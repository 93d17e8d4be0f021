//! Orthogonal rational functions of the first and second kind.
//!
//! Three routes:
//!
//! * [`orf_from_params`]: the transfer product
//!   `pref . prod_{k=n..1} [[1, -conj g~_k], [-g~_k, 1]] diag(zeta_{k-1}, 1) . [[1, 1], [1, -1]]
//!    = [[phi, psi], [phi*, -psi*]]` with `g~_k = gamma_{k-1}` and
//!   `pref = sqrt(1 - |alpha_n|^2) / ((1 - conj(alpha_n) z) sqrt(omega_{n-1}))`;
//! * [`orf_gram_schmidt`]: orthonormalization of `Bl_0, ..., Bl_n` in
//!   `L^2(mu)` with the phase fixed by `lambda_n = 1`;
//! * [`psi_integral`]: `psi_n(z) = int (t+z)/(t-z) (phi_n(t) - phi_n(z)) dmu(t)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{zeta, zeta_unchecked};
use crate::linalg::solve;
use crate::measure::CircleMeasure;
use crate::schur::{AlphaSequence, SchurParams};
use crate::scalar::{c0, c1, cis, Real, C};
use crate::wall::wall_eval;

/// Squared residual-to-original norm ratio below which Gram-Schmidt stops.
pub const RANK_TOL: f64 = 1e-12;

/// `phi_n = sum_k a_k Bl_k` together with the nodes `alpha_0..=alpha_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrfCoeffs<T: Real> {
    n: usize,
    alphas: Vec<C<T>>,
    a: Vec<C<T>>,
}

impl<T: Real> OrfCoeffs<T> {
    pub fn new(alphas: &[C<T>], a: Vec<C<T>>) -> Result<Self> {
        if a.is_empty() || alphas.len() < a.len() {
            return Err(Error::InvalidAlphas(format!(
                "{} coefficients need {} nodes, got {}",
                a.len(),
                a.len(),
                alphas.len()
            )));
        }
        let n = a.len() - 1;
        Ok(Self {
            n,
            alphas: alphas[..=n].to_vec(),
            a,
        })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[C<T>] {
        &self.a
    }

    pub fn alphas(&self) -> &[C<T>] {
        &self.alphas
    }

    /// `a_{n,n}`, equal to `conj(phi_n*(alpha_n))`.
    pub fn leading(&self) -> C<T> {
        self.a[self.n]
    }

    /// `|a_{n,n}|`.
    pub fn kappa(&self) -> T {
        self.leading().norm()
    }

    /// `Bl_0(z), ..., Bl_n(z)`.
    fn basis(&self, z: C<T>) -> Result<Vec<C<T>>> {
        let mut out = Vec::with_capacity(self.n + 1);
        let mut acc = c1::<T>();
        out.push(acc);
        for k in 1..=self.n {
            acc = acc * zeta(self.alphas[k], z)?;
            out.push(acc);
        }
        Ok(out)
    }

    /// `Bl_{n,1}(z), ..., Bl_{n,n+1}(z) = 1`.
    fn tail_basis(&self, z: C<T>) -> Result<Vec<C<T>>> {
        let mut out = vec![c1::<T>(); self.n + 1];
        let mut acc = c1::<T>();
        for k in (0..self.n).rev() {
            acc = acc * zeta(self.alphas[k + 1], z)?;
            out[k] = acc;
        }
        Ok(out)
    }

    pub fn eval(&self, z: C<T>) -> Result<C<T>> {
        Ok(self
            .basis(z)?
            .iter()
            .zip(&self.a)
            .fold(c0::<T>(), |acc, (b, a)| acc + *a * *b))
    }

    /// `g*(z) = sum conj(a_k) Bl_{n,k+1}(z)`.
    pub fn eval_star(&self, z: C<T>) -> Result<C<T>> {
        Ok(self
            .tail_basis(z)?
            .iter()
            .zip(&self.a)
            .fold(c0::<T>(), |acc, (b, a)| acc + a.conj() * *b))
    }

    fn scaled(&self, s: C<T>) -> Self {
        Self {
            n: self.n,
            alphas: self.alphas.clone(),
            a: self.a.iter().map(|v| *v * s).collect(),
        }
    }
}

/// JSON form `{"n", "alphas": [[re, im]...], "coeffs": [[re, im]...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrfCoeffsJson {
    pub n: usize,
    pub alphas: Vec<[f64; 2]>,
    pub coeffs: Vec<[f64; 2]>,
}

impl From<&OrfCoeffs<f64>> for OrfCoeffsJson {
    fn from(c: &OrfCoeffs<f64>) -> Self {
        Self {
            n: c.n,
            alphas: c.alphas.iter().map(|v| [v.re, v.im]).collect(),
            coeffs: c.a.iter().map(|v| [v.re, v.im]).collect(),
        }
    }
}

impl TryFrom<OrfCoeffsJson> for OrfCoeffs<f64> {
    type Error = Error;

    fn try_from(j: OrfCoeffsJson) -> Result<Self> {
        if j.coeffs.len() != j.n + 1 {
            return Err(Error::InvalidFunction(format!(
                "degree {} needs {} coefficients",
                j.n,
                j.n + 1
            )));
        }
        let alphas: Vec<C<f64>> = j.alphas.iter().map(|v| C::new(v[0], v[1])).collect();
        OrfCoeffs::new(&alphas, j.coeffs.iter().map(|v| C::new(v[0], v[1])).collect())
    }
}

/// First- and second-kind ORFs and their stars at one point, stored as
/// `exp(-log_scale)` times the true values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrfEval<T: Real> {
    pub phi: C<T>,
    pub phistar: C<T>,
    pub psi: C<T>,
    pub psistar: C<T>,
    pub log_scale: T,
    pub n: usize,
}

impl<T: Real> OrfEval<T> {
    /// `(phi, phi*, psi, psi*)` unscaled.
    pub fn unscaled(&self) -> [C<T>; 4] {
        let s = self.log_scale.exp();
        [self.phi * s, self.phistar * s, self.psi * s, self.psistar * s]
    }

    /// Residual of `phi psi* + phi* psi = 2 Bl_n P(., alpha_n)` on the circle,
    /// relative to the size of the left side.
    pub fn poisson_residual(&self, blaschke: C<T>, poisson: T) -> T {
        let two = T::lit(2.0);
        let lhs = self.phi * self.psistar + self.phistar * self.psi;
        let rhs = blaschke * (two * poisson * (-two * self.log_scale).exp());
        let size = (self.phi * self.psistar).norm() + (self.phistar * self.psi).norm();
        (lhs - rhs).norm() / size.max(rhs.norm())
    }
}

/// ORFs of every order `0..=n_max` at `z`, built incrementally.
pub fn orf_ladder<T: Real>(
    params: &SchurParams<T>,
    alphas: &AlphaSequence<T>,
    n_max: usize,
    z: C<T>,
) -> Result<Vec<OrfEval<T>>> {
    let one = c1::<T>();
    let mut m = [[one, one], [one, -one]];
    let mut log_scale = T::zero();
    if n_max > 0 {
        params.require(n_max - 1)?;
    }
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(OrfEval {
        phi: one,
        psi: one,
        phistar: one,
        psistar: one,
        log_scale,
        n: 0,
    });
    for k in 1..=n_max {
        let g = params.gamma(k - 1);
        let zk = zeta(alphas.get(k - 1), z)?;
        let r0 = [m[0][0] * zk, m[0][1] * zk];
        let r1 = m[1];
        m = [
            [r0[0] - g.conj() * r1[0], r0[1] - g.conj() * r1[1]],
            [r1[0] - g * r0[0], r1[1] - g * r0[1]],
        ];
        let s = m
            .iter()
            .flat_map(|r| r.iter())
            .fold(T::zero(), |a, v| a.max(v.norm()));
        if s > T::zero() {
            for row in m.iter_mut() {
                for v in row.iter_mut() {
                    *v = *v / s;
                }
            }
            log_scale = log_scale + s.ln();
        }
        let ak = alphas.get(k);
        let den = one - ak.conj() * z;
        if den.norm().as_f64() < crate::geometry::POLE_TOL {
            return Err(Error::PoleHit(den.norm().as_f64()));
        }
        let pref = C::new((T::one() - ak.norm_sqr()).sqrt() / params.omega(k - 1).sqrt(), T::zero()) / den;
        out.push(OrfEval {
            phi: pref * m[0][0],
            psi: pref * m[0][1],
            phistar: pref * m[1][0],
            psistar: -pref * m[1][1],
            log_scale,
            n: k,
        });
    }
    Ok(out)
}

/// Transfer-product evaluation of `phi_n, phi_n*, psi_n, psi_n*` at `z`.
pub fn orf_from_params<T: Real>(
    params: &SchurParams<T>,
    alphas: &AlphaSequence<T>,
    n: usize,
    z: C<T>,
) -> Result<OrfEval<T>> {
    Ok(orf_ladder(params, alphas, n, z)?.pop().expect("non-empty ladder"))
}

/// Per-step data of the Gram-Schmidt route: `gamma~_k`, `eta_k`, `lambda_k`
/// for `k = 1..=n` (index `k - 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct GeronimusParams<T: Real> {
    pub gammas_tilde: Vec<C<T>>,
    pub eta: Vec<C<T>>,
    pub lambda: Vec<C<T>>,
}

impl<T: Real> GeronimusParams<T> {
    /// `gamma~_k` for `k >= 1`.
    pub fn gamma_tilde(&self, k: usize) -> C<T> {
        self.gammas_tilde[k - 1]
    }
}

/// `lambda_n` of a candidate `phi_n`, given `kappa_{n-1}`.
fn lambda_of<T: Real>(phi: &OrfCoeffs<T>, kappa_prev: C<T>) -> Result<C<T>> {
    let n = phi.degree();
    let (an, ap) = (phi.alphas[n], phi.alphas[n - 1]);
    let u = c1::<T>() - an * ap.conj();
    let v = phi.eval_star(ap)?.conj();
    let w = kappa_prev.conj();
    Ok(u / u.norm() * (v / v.norm()) * (w / w.norm()))
}

/// Orthonormal `phi_0..=phi_n` in `L^2(mu)`, phase-normalized by
/// `lambda_k = 1`, and the Geronimus parameters they produce.
pub fn orf_gram_schmidt<T: Real>(
    mu: &CircleMeasure<T>,
    alphas: &AlphaSequence<T>,
    n: usize,
) -> Result<(Vec<OrfCoeffs<T>>, GeronimusParams<T>)> {
    if n > alphas.max_index() {
        return Err(Error::OutOfRange(format!("alpha_{n} not generated")));
    }
    let m = T::nat(mu.grid().len());
    let mut points: Vec<C<T>> = mu.grid().nodes().to_vec();
    let mut weights: Vec<T> = mu.density().iter().map(|d| *d / m).collect();
    for a in mu.atoms() {
        points.push(a.position());
        weights.push(a.mass);
    }
    let inner = |u: &[C<T>], v: &[C<T>]| -> C<T> {
        u.iter()
            .zip(v)
            .zip(&weights)
            .fold(c0::<T>(), |acc, ((x, y), w)| acc + *x * y.conj() * *w)
    };

    let mut basis_row: Vec<C<T>> = vec![c1::<T>(); points.len()];
    let mut phis: Vec<Vec<C<T>>> = Vec::with_capacity(n + 1);
    let mut coeffs: Vec<OrfCoeffs<T>> = Vec::with_capacity(n + 1);
    let mut ger = GeronimusParams {
        gammas_tilde: Vec::with_capacity(n),
        eta: Vec::with_capacity(n),
        lambda: Vec::with_capacity(n),
    };
    let nodes = &alphas.points()[..=n];
    for k in 0..=n {
        if k > 0 {
            let ak = alphas.get(k);
            for (b, t) in basis_row.iter_mut().zip(&points) {
                *b = *b * zeta_unchecked(ak, *t);
            }
        }
        let mut v = basis_row.clone();
        let mut c = vec![c0::<T>(); k + 1];
        c[k] = c1();
        let norm0 = inner(&v, &v).re.sqrt();
        for _pass in 0..2 {
            for (j, pj) in phis.iter().enumerate() {
                let h = inner(&v, pj);
                for (x, y) in v.iter_mut().zip(pj) {
                    *x = *x - h * *y;
                }
                for (x, y) in c.iter_mut().zip(coeffs[j].coeffs()) {
                    *x = *x - h * *y;
                }
            }
        }
        let r = inner(&v, &v).re.sqrt();
        if !(r > T::zero()) || (r / norm0).powi(2).as_f64() < RANK_TOL {
            return Err(Error::RankDeficient {
                k,
                condition: (norm0 / r).powi(2).as_f64(),
            });
        }
        let inv = C::new(T::one() / r, T::zero());
        for x in v.iter_mut() {
            *x = *x * inv;
        }
        let mut phi = OrfCoeffs::new(nodes, c.iter().map(|x| *x * inv).collect())?;
        if k > 0 {
            let kappa_prev = coeffs[k - 1].leading();
            let lam = lambda_of(&phi, kappa_prev)?;
            let rot = lam.conj() / lam.norm();
            phi = phi.scaled(rot);
            for x in v.iter_mut() {
                *x = *x * rot;
            }
            let ap = alphas.get(k - 1);
            let an = alphas.get(k);
            ger.gammas_tilde
                .push(-phi.eval(ap)?.conj() / phi.eval_star(ap)?.conj());
            ger.eta
                .push((c1::<T>() - an * ap.conj()) / (c1::<T>() - an.conj() * ap));
            ger.lambda.push(lambda_of(&phi, kappa_prev)?);
        } else {
            // phi_0 = +1 for a probability measure
            let lead = phi.leading();
            let rot = lead.conj() / lead.norm();
            phi = phi.scaled(rot);
            for x in v.iter_mut() {
                *x = *x * rot;
            }
        }
        phis.push(v);
        coeffs.push(phi);
    }
    Ok((coeffs, ger))
}

/// Coefficients of `g*` in the basis `Bl_0..Bl_n`, by collocation at
/// `exp(i pi (2j + 1) / (n + 1))`.
pub fn star_in_basis<T: Real>(coeffs: &OrfCoeffs<T>) -> Result<OrfCoeffs<T>> {
    let n = coeffs.degree();
    let count = T::nat(n + 1);
    let mut rows = Vec::with_capacity(n + 1);
    let mut rhs = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let t = cis(T::PI() * T::nat(2 * j + 1) / count);
        rows.push(coeffs.basis(t)?);
        rhs.push(coeffs.eval_star(t)?);
    }
    let a = solve(rows, rhs)?;
    OrfCoeffs::new(&coeffs.alphas, a)
}

/// `int g dmu` over density nodes and atoms.
fn integrate_fn<T: Real, G>(mu: &CircleMeasure<T>, g: G) -> Result<C<T>>
where
    G: Fn(C<T>) -> Result<C<T>>,
{
    let mut acc = c0::<T>();
    for (t, d) in mu.grid().nodes().iter().zip(mu.density()) {
        acc = acc + g(*t)? * *d;
    }
    acc = acc / T::nat(mu.grid().len());
    for a in mu.atoms() {
        acc = acc + g(a.position())? * a.mass;
    }
    Ok(acc)
}

/// `psi_n(z) = int (t+z)/(t-z) (phi(t) - phi(z)) dmu(t)`; `psi_0 = 1`.
pub fn psi_integral<T: Real, F>(mu: &CircleMeasure<T>, phi: F, n: usize, z: C<T>) -> Result<C<T>>
where
    F: Fn(C<T>) -> Result<C<T>>,
{
    if n == 0 {
        return Ok(c1());
    }
    let pz = phi(z)?;
    integrate_fn(mu, |t| Ok((t + z) / (t - z) * (phi(t)? - pz)))
}

/// `u_n(z) = 2 int conj(phi(t)) / (t - z) dmu(t)`.
pub fn u_n_eval<T: Real, F>(mu: &CircleMeasure<T>, phi: F, z: C<T>) -> Result<C<T>>
where
    F: Fn(C<T>) -> Result<C<T>>,
{
    let two = T::lit(2.0);
    integrate_fn(mu, |t| Ok(phi(t)?.conj() / (t - z) * two))
}

/// `F(z) - psi*(z)/phi*(z) - z Bl_n(z) u_n(z) / phi*(z)`.
pub fn divfmu_residual<T: Real>(
    herglotz: C<T>,
    psistar: C<T>,
    phistar: C<T>,
    z: C<T>,
    blaschke: C<T>,
    u: C<T>,
) -> C<T> {
    herglotz - psistar / phistar - z * blaschke * u / phistar
}

/// Residuals of the Wall/ORF bridge at order `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgeResidual<T: Real> {
    /// `z B_n* - A_n*` against `c phi_{n+1}`.
    pub phi: T,
    /// `B_n - z A_n` against `c phi*_{n+1}`.
    pub phistar: T,
    /// `psi*_{n+1}/phi*_{n+1}` against `(1 + z A_n/B_n)/(1 - z A_n/B_n)`.
    pub mobius: T,
}

impl<T: Real> BridgeResidual<T> {
    pub fn max(&self) -> T {
        self.phi.max(self.phistar).max(self.mobius)
    }
}

fn rel<T: Real>(a: C<T>, b: C<T>) -> T {
    let s = a.norm().max(b.norm());
    if s == T::zero() {
        T::zero()
    } else {
        (a - b).norm() / s
    }
}

/// Relative residuals of the Wall/ORF bridge identities at `z`.
pub fn wall_orf_bridge<T: Real>(
    params: &SchurParams<T>,
    alphas: &AlphaSequence<T>,
    n: usize,
    z: C<T>,
) -> Result<BridgeResidual<T>> {
    let w = wall_eval(params, alphas, n, z)?;
    let o = orf_from_params(params, alphas, n + 1, z)?;
    Ok(bridge_from(&w, &o, alphas.get(n + 1), params.omega(n), z))
}

/// Bridge residuals from `W_n(z)` and `phi_{n+1}(z)` already evaluated.
pub fn bridge_from<T: Real>(
    w: &crate::wall::WallEval<T>,
    o: &OrfEval<T>,
    a1: C<T>,
    omega: T,
    z: C<T>,
) -> BridgeResidual<T> {
    let factor = (c1::<T>() - a1.conj() * z) / (T::one() - a1.norm_sqr()).sqrt()
        * omega.sqrt()
        * (o.log_scale - w.log_scale).exp();
    let lhs_phi = z * w.bstar - w.astar;
    let lhs_star = w.b - z * w.a;
    let r = z * w.a / w.b;
    let mob = (c1::<T>() + r) / (c1::<T>() - r);
    BridgeResidual {
        phi: rel(lhs_phi, factor * o.phi),
        phistar: rel(lhs_star, factor * o.phistar),
        mobius: rel(o.psistar / o.phistar, mob),
    }
}

/// `kappa_n = |phi_n*(alpha_n)|` from the transfer product.
pub fn kappa<T: Real>(params: &SchurParams<T>, alphas: &AlphaSequence<T>, n: usize) -> Result<T> {
    let o = orf_from_params(params, alphas, n, alphas.get(n))?;
    Ok(o.phistar.norm() * o.log_scale.exp())
}

/// Relative residual of `[phi_n; phi_n*] = T_n(z) [phi_{n-1}; phi_{n-1}*]`,
/// with `T_n` built from `gamma~_n = gamma_{n-1}` and `lambda_n = 1`.
pub fn orf_recurrence_residual<T: Real>(
    params: &SchurParams<T>,
    alphas: &AlphaSequence<T>,
    n: usize,
    z: C<T>,
) -> Result<T> {
    if n == 0 {
        return Err(Error::OutOfRange("recurrence needs n >= 1".into()));
    }
    let ladder = orf_ladder(params, alphas, n, z)?;
    recurrence_from(
        &ladder[n - 1],
        &ladder[n],
        alphas.get(n),
        alphas.get(n - 1),
        params.gamma(n - 1),
        z,
    )
}

/// Recurrence residual from consecutive ORF evaluations.
pub fn recurrence_from<T: Real>(
    prev: &OrfEval<T>,
    cur: &OrfEval<T>,
    an: C<T>,
    ap: C<T>,
    g: C<T>,
    z: C<T>,
) -> Result<T> {
    let one = c1::<T>();
    let c = ((T::one() - an.norm_sqr()) / (T::one() - ap.norm_sqr())).sqrt()
        / (T::one() - g.norm_sqr()).sqrt();
    let ratio = (one - ap.conj() * z) / (one - an.conj() * z) * c * (prev.log_scale - cur.log_scale).exp();
    let zp = zeta(ap, z)?;
    let p0 = zp * prev.phi;
    let p1 = prev.phistar;
    let phi = ratio * (p0 - g.conj() * p1);
    let phistar = ratio * (p1 - g * p0);
    let size = cur.phi.norm().max(cur.phistar.norm());
    Ok(((phi - cur.phi).norm().max((phistar - cur.phistar).norm())) / size)
}
