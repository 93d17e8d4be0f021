//! Schur functions, interpolation sequences and the multipoint Schur
//! algorithm
//!
//! ```text
//! f_0 = f,   gamma_k = f_k(alpha_{k+1}),
//! f_{k+1} = (f_k - gamma_k) / ((1 - conj(gamma_k) f_k) zeta_{k+1})
//! ```
//!
//! Parameters are extracted from point evaluations. When
//! `alpha_{k+1}` repeats an earlier node the step is a `0/0` limit; it is
//! resolved by carrying a Taylor jet about the node through the recurrence,
//! one order being consumed by each coincident division. Chains through
//! clustered nodes lose digits geometrically; [`schur_parameters_with`]
//! switches to boundary means there.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{poisson_raw, zeta, zeta_unchecked, DiskPoint, BOUNDARY_GUARD};
use crate::jet::{poly_taylor, Jet};
use crate::measure::{schur_jet_from_herglotz, Atom, CircleGrid, CircleMeasure};
use crate::scalar::{c0, c1, cis, cr, Real, C};

/// A parameter with `|gamma| >= 1 - FINITE_BLASCHKE_TOL` stops the algorithm.
pub const FINITE_BLASCHKE_TOL: f64 = 1e-12;
/// Tolerance on `max |f|` over a validation grid.
pub const SCHUR_BOUND_TOL: f64 = 1e-9;
/// Two nodes closer than this are treated as the same interpolation point.
pub const NODE_MERGE_TOL: f64 = 1e-14;

/// Analytic self-maps of the disk that the library can evaluate.
#[derive(Debug, Clone)]
pub enum SchurFunction<T: Real> {
    Constant(C<T>),
    /// `lambda z`.
    ScaledIdentity(C<T>),
    /// `p / q` with coefficients in increasing degree.
    Rational { num: Vec<C<T>>, den: Vec<C<T>> },
    /// `exp(mass (z + xi) / (z - xi))`, `xi = exp(i theta)`.
    SingularInner { theta: T, mass: T },
    Product(Box<SchurFunction<T>>, Box<SchurFunction<T>>),
    /// `outer(inner(z))`.
    Composition {
        outer: Box<SchurFunction<T>>,
        inner: Box<SchurFunction<T>>,
    },
    /// Schur function of `(1 - sum m) mu_base + sum m delta_tau`, where
    /// `mu_base` is the Herglotz measure of `base`.
    Mixture {
        base: Box<SchurFunction<T>>,
        atoms: Vec<Atom<T>>,
    },
    /// Schur function of a discretized measure.
    Measure(Arc<CircleMeasure<T>>),
}

impl<T: Real> SchurFunction<T> {
    pub fn constant(value: C<T>) -> Result<Self> {
        if !(value.norm() <= T::one()) {
            return Err(Error::InvalidFunction(format!("|constant| = {} > 1", value.norm())));
        }
        Ok(Self::Constant(value))
    }

    pub fn scaled_identity(lambda: C<T>) -> Result<Self> {
        if !(lambda.norm() <= T::one()) {
            return Err(Error::InvalidFunction(format!("|lambda| = {} > 1", lambda.norm())));
        }
        Ok(Self::ScaledIdentity(lambda))
    }

    /// Rational `p/q`, validated on a `check_m`-node grid.
    pub fn rational(num: Vec<C<T>>, den: Vec<C<T>>, check_m: usize) -> Result<Self> {
        if num.is_empty() || den.is_empty() || den.iter().all(|d| d.norm() == T::zero()) {
            return Err(Error::InvalidFunction("empty numerator or zero denominator".into()));
        }
        let f = Self::Rational { num, den };
        let grid = CircleGrid::new(check_m.max(crate::measure::MIN_GRID).next_power_of_two())?;
        let vals = f.grid_values(&grid)?;
        let max = vals.iter().fold(T::zero(), |a, v| a.max(v.norm()));
        if !(max <= T::one() + T::lit(SCHUR_BOUND_TOL)) {
            return Err(Error::InvalidFunction(format!("max |p/q| on the circle is {max}")));
        }
        Ok(f)
    }

    pub fn singular_inner(theta: T, mass: T) -> Result<Self> {
        if !(mass > T::zero()) {
            return Err(Error::InvalidFunction("singular inner mass must be positive".into()));
        }
        Ok(Self::SingularInner { theta, mass })
    }

    pub fn mixture(base: SchurFunction<T>, atoms: Vec<Atom<T>>) -> Result<Self> {
        let total = atoms.iter().fold(T::zero(), |a, b| a + b.mass);
        if atoms.iter().any(|a| !(a.mass > T::zero())) || !(total < T::one()) {
            return Err(Error::InvalidFunction("atom masses must be positive with sum < 1".into()));
        }
        Ok(Self::Mixture {
            base: Box::new(base),
            atoms,
        })
    }

    /// Whether boundary values are continuous on the whole circle.
    pub fn boundary_continuous(&self) -> bool {
        match self {
            Self::SingularInner { .. } => false,
            Self::Product(a, b) => a.boundary_continuous() && b.boundary_continuous(),
            Self::Composition { outer, inner } => {
                outer.boundary_continuous() && inner.boundary_continuous()
            }
            Self::Mixture { base, .. } => base.boundary_continuous(),
            _ => true,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Constant(_) => "constant",
            Self::ScaledIdentity(_) => "scaled_identity",
            Self::Rational { .. } => "rational",
            Self::SingularInner { .. } => "singular_inner",
            Self::Product(..) => "product",
            Self::Composition { .. } => "composition",
            Self::Mixture { .. } => "mixture",
            Self::Measure(_) => "measure",
        }
    }

    /// Value at `z` with `|z| <= 1` (interior only for measure-induced
    /// functions).
    pub fn eval(&self, z: C<T>) -> Result<C<T>> {
        match self {
            Self::Constant(c) => Ok(*c),
            Self::ScaledIdentity(l) => Ok(*l * z),
            Self::Rational { num, den } => {
                let q = horner(den, z);
                if q.norm() == T::zero() {
                    return Err(Error::PoleHit(0.0));
                }
                Ok(horner(num, z) / q)
            }
            Self::SingularInner { theta, mass } => {
                let xi = cis(*theta);
                let d = z - xi;
                if d.norm() < T::lit(1e-300) {
                    // radial limit at the singular point
                    return Ok(c0());
                }
                Ok(((z + xi) / d * *mass).exp())
            }
            Self::Product(a, b) => Ok(a.eval(z)? * b.eval(z)?),
            Self::Composition { outer, inner } => outer.eval(inner.eval(z)?),
            Self::Mixture { base, atoms } => {
                let fz = base.eval(z)?;
                let f = mixture_herglotz(fz, z, atoms)?;
                Ok(omega(f, z))
            }
            Self::Measure(mu) => mu.schur_value(DiskPoint::new(z)?),
        }
    }

    /// Taylor jet of length `len` about the interior point `w`.
    pub fn jet(&self, w: C<T>, len: usize) -> Result<Jet<T>> {
        let len = len.max(1);
        match self {
            Self::Constant(c) => Ok(Jet::constant(*c, len)),
            Self::ScaledIdentity(l) => Ok(Jet::variable(w, len).scale(*l)),
            Self::Rational { num, den } => {
                let q = poly_taylor(den, w, len);
                if q.value().norm() == T::zero() {
                    return Err(Error::PoleHit(0.0));
                }
                Ok(poly_taylor(num, w, len).div(&q))
            }
            Self::SingularInner { theta, mass } => {
                let xi = cis(*theta);
                let z = Jet::variable(w, len);
                let u = z.add_scalar(xi).div(&z.add_scalar(-xi)).scale(cr(*mass));
                Ok(u.exp())
            }
            Self::Product(a, b) => Ok(a.jet(w, len)?.mul(&b.jet(w, len)?)),
            Self::Composition { outer, inner } => {
                let ij = inner.jet(w, len)?;
                let oj = outer.jet(ij.value(), len)?;
                Ok(ij.compose(&oj))
            }
            Self::Mixture { base, atoms } => {
                let z = Jet::variable(w, len + 1);
                let bf = base.jet(w, len + 1)?;
                let zf = z.mul(&bf);
                let one = c1::<T>();
                let fbase = zf.add_scalar(one).div(&zf.scale(-one).add_scalar(one));
                let total = atoms.iter().fold(T::zero(), |a, b| a + b.mass);
                let mut f = fbase.scale(cr(T::one() - total));
                for a in atoms {
                    let tau = a.position();
                    let k = z.add_scalar(tau).div(&z.scale(-one).add_scalar(tau));
                    f = f.add(&k.scale(cr(a.mass)));
                }
                Ok(schur_jet_from_herglotz(&f, w).truncate(len))
            }
            Self::Measure(mu) => {
                let fj = mu.herglotz_jet(w, len + 1)?;
                Ok(schur_jet_from_herglotz(&fj, w).truncate(len))
            }
        }
    }

    /// `1 - |f|^2` at the grid nodes, given the samples `values`; exact zero
    /// for inner factors and computed from the Herglotz function where there
    /// is one.
    pub fn grid_defects(&self, grid: &CircleGrid<T>, values: &[C<T>]) -> Result<Vec<T>> {
        let plain = |v: &C<T>| (T::one() - v.norm()) * (T::one() + v.norm());
        match self {
            Self::SingularInner { .. } => Ok(values.iter().map(|v| if v.norm() == T::zero() { T::one() } else { T::zero() }).collect()),
            Self::Product(a, b) => {
                let av = a.grid_values(grid)?;
                let bv = b.grid_values(grid)?;
                let da = a.grid_defects(grid, &av)?;
                let db = b.grid_defects(grid, &bv)?;
                Ok(da.into_iter().zip(db).map(|(x, y)| x + y - x * y).collect())
            }
            Self::Mixture { base, atoms } => grid
                .nodes()
                .iter()
                .zip(values)
                .map(|(t, v)| {
                    let f = mixture_herglotz(base.eval(*t)?, *t, atoms)?;
                    Ok(herglotz_defect(f).unwrap_or_else(|| plain(v)))
                })
                .collect(),
            Self::Measure(mu) => Ok(mu
                .herglotz_boundary_all()
                .into_iter()
                .zip(values)
                .map(|(f, v)| herglotz_defect(f).unwrap_or_else(|| plain(v)))
                .collect()),
            _ => Ok(values.iter().map(plain).collect()),
        }
    }

    /// Boundary values at the grid nodes.
    pub fn grid_values(&self, grid: &CircleGrid<T>) -> Result<Vec<C<T>>> {
        match self {
            Self::Measure(mu) => {
                if mu.grid() != grid {
                    return Err(Error::InvalidFunction(
                        "measure-induced function sampled on a foreign grid".into(),
                    ));
                }
                Ok(mu
                    .herglotz_boundary_all()
                    .into_iter()
                    .zip(grid.nodes())
                    .map(|(f, t)| omega(f, *t))
                    .collect())
            }
            Self::SingularInner { theta, mass } => {
                // On the circle (t + xi)/(t - xi) = -i cot((arg t - theta)/2),
                // so the samples are unimodular to rounding.
                let half = T::lit(0.5);
                Ok((0..grid.len())
                    .map(|j| {
                        let s = ((grid.angle(j) - *theta) * half).sin();
                        let c = ((grid.angle(j) - *theta) * half).cos();
                        if s.abs() < T::lit(1e-300) {
                            c0()
                        } else {
                            cis(-*mass * c / s)
                        }
                    })
                    .collect())
            }
            Self::Product(a, b) => {
                let av = a.grid_values(grid)?;
                let bv = b.grid_values(grid)?;
                Ok(av.into_iter().zip(bv).map(|(x, y)| x * y).collect())
            }
            _ => grid.nodes().iter().map(|t| self.eval(*t)).collect(),
        }
    }
}

fn horner<T: Real>(coeffs: &[C<T>], z: C<T>) -> C<T> {
    coeffs.iter().rev().fold(c0::<T>(), |acc, c| acc * z + *c)
}

/// `1 - |Omega_t(F)|^2 = 4 Re F / |F + 1|^2` on the circle.
fn herglotz_defect<T: Real>(f: C<T>) -> Option<T> {
    let d = T::lit(4.0) * f.re / (f + c1::<T>()).norm_sqr();
    d.is_finite().then_some(d)
}

/// `Omega_z(F) = (F - 1) / (z (F + 1))`.
#[inline]
fn omega<T: Real>(f: C<T>, z: C<T>) -> C<T> {
    (f - c1::<T>()) / (z * (f + c1::<T>()))
}

fn mixture_herglotz<T: Real>(fz: C<T>, z: C<T>, atoms: &[Atom<T>]) -> Result<C<T>> {
    let one = c1::<T>();
    let total = atoms.iter().fold(T::zero(), |a, b| a + b.mass);
    let mut f = (one + z * fz) / (one - z * fz) * (T::one() - total);
    for a in atoms {
        let tau = a.position();
        if (tau - z).norm() < T::lit(1e-300) {
            return Err(Error::AtomOnPath);
        }
        f = f + (tau + z) / (tau - z) * a.mass;
    }
    Ok(f)
}

/// How the interpolation nodes were produced.
#[derive(Debug, Clone, PartialEq)]
pub enum AlphaGenerator<T: Real> {
    /// `alpha_k = 0`.
    Classical,
    /// `alpha_k = r exp(i k step)`.
    CompactCircle { r: T, theta_step: T },
    /// `alpha_k = (1 - c/(k+1)) exp(i theta)`.
    Radial { theta: T, c: T },
    /// `alpha_k = exp(i theta) (1 - d_k exp(+-i aperture))`, `d_k = c/(k+1)`,
    /// the sign alternating with `k`.
    Nontangential { theta: T, c: T, aperture: T },
    /// `alpha_k = points[(k - 1) mod len]`.
    Cycle(Vec<C<T>>),
    /// `alpha_1, alpha_2, ...` listed explicitly.
    Explicit(Vec<C<T>>),
}

/// Whether `sum (1 - |alpha_k|)` is known to diverge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlaschkeSum {
    Divergent,
    Undetermined,
}

/// `alpha_0 = 0, alpha_1, ..., alpha_N` with generator metadata.
#[derive(Debug, Clone)]
pub struct AlphaSequence<T: Real> {
    points: Vec<C<T>>,
    generator: AlphaGenerator<T>,
    partial_sums: Vec<T>,
}

impl<T: Real> AlphaSequence<T> {
    /// Materializes `alpha_0 ..= alpha_count`.
    pub fn generate(generator: AlphaGenerator<T>, count: usize) -> Result<Self> {
        let mut points = Vec::with_capacity(count + 1);
        points.push(c0());
        for k in 1..=count {
            let a = match &generator {
                AlphaGenerator::Classical => c0(),
                AlphaGenerator::CompactCircle { r, theta_step } => {
                    cis(*theta_step * T::nat(k)) * *r
                }
                AlphaGenerator::Radial { theta, c } => {
                    let r = (T::one() - *c / T::nat(k + 1)).max(T::zero());
                    cis(*theta) * r
                }
                AlphaGenerator::Nontangential { theta, c, aperture } => {
                    let d = *c / T::nat(k + 1);
                    let sign = if k % 2 == 0 { T::one() } else { -T::one() };
                    cis(*theta) * (c1::<T>() - cis(*aperture * sign) * d)
                }
                AlphaGenerator::Cycle(pts) => {
                    if pts.is_empty() {
                        return Err(Error::InvalidAlphas("empty cycle".into()));
                    }
                    pts[(k - 1) % pts.len()]
                }
                AlphaGenerator::Explicit(pts) => *pts.get(k - 1).ok_or_else(|| {
                    Error::InvalidAlphas(format!("explicit list has {} points, {count} needed", pts.len()))
                })?,
            };
            points.push(a);
        }
        Self::build(points, generator)
    }

    /// Sequence from explicit nodes `alpha_0 = 0, alpha_1, ...`.
    pub fn from_points(points: Vec<C<T>>) -> Result<Self> {
        if points.first().map(|p| p.norm() != T::zero()).unwrap_or(true) {
            return Err(Error::InvalidAlphas("alpha_0 must be 0".into()));
        }
        let gen = AlphaGenerator::Explicit(points[1..].to_vec());
        Self::build(points, gen)
    }

    fn build(points: Vec<C<T>>, generator: AlphaGenerator<T>) -> Result<Self> {
        for (k, p) in points.iter().enumerate() {
            if !(p.norm() < T::one() - T::lit(BOUNDARY_GUARD)) {
                return Err(Error::InvalidAlphas(format!("|alpha_{k}| = {} too close to the circle", p.norm())));
            }
        }
        let mut partial_sums = Vec::with_capacity(points.len());
        let mut acc = T::zero();
        for p in &points {
            acc = acc + (T::one() - p.norm());
            partial_sums.push(acc);
        }
        Ok(Self {
            points,
            generator,
            partial_sums,
        })
    }

    pub fn points(&self) -> &[C<T>] {
        &self.points
    }

    /// `alpha_k`.
    #[inline]
    pub fn get(&self, k: usize) -> C<T> {
        self.points[k]
    }

    /// Largest available index `N`.
    pub fn max_index(&self) -> usize {
        self.points.len() - 1
    }

    pub fn generator(&self) -> &AlphaGenerator<T> {
        &self.generator
    }

    /// `sum_{k <= n} (1 - |alpha_k|)`.
    pub fn blaschke_partial_sum(&self, n: usize) -> T {
        self.partial_sums[n]
    }

    /// Declared (not checked) divergence of `sum (1 - |alpha_k|)`.
    pub fn blaschke_sum(&self) -> BlaschkeSum {
        match &self.generator {
            AlphaGenerator::Explicit(_) => BlaschkeSum::Undetermined,
            _ => BlaschkeSum::Divergent,
        }
    }

    /// Number of `j` in `1..=upto` with `alpha_j` equal to `w`.
    pub fn multiplicity(&self, w: C<T>, upto: usize) -> usize {
        self.points[1..=upto]
            .iter()
            .filter(|a| same_node(**a, w))
            .count()
    }

    fn require(&self, n: usize) -> Result<()> {
        if n > self.max_index() {
            return Err(Error::OutOfRange(format!(
                "alpha_{n} requested, only {} generated",
                self.max_index()
            )));
        }
        Ok(())
    }
}

#[inline]
fn same_node<T: Real>(a: C<T>, b: C<T>) -> bool {
    (a - b).norm() <= T::lit(NODE_MERGE_TOL)
}

/// Schur parameters `gamma_0 ..= gamma_n` and the running products
/// `omega_k = prod_{j <= k} (1 - |gamma_j|^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurParams<T: Real> {
    gammas: Vec<C<T>>,
    omegas: Vec<T>,
}

impl<T: Real> SchurParams<T> {
    pub fn new(gammas: Vec<C<T>>) -> Result<Self> {
        let mut omegas = Vec::with_capacity(gammas.len());
        let mut acc = T::one();
        for (k, g) in gammas.iter().enumerate() {
            if !(g.norm() < T::one()) {
                return Err(Error::FiniteBlaschkeDetected {
                    k,
                    modulus: g.norm().as_f64(),
                });
            }
            acc = acc * (T::one() - g.norm_sqr());
            omegas.push(acc);
        }
        Ok(Self { gammas, omegas })
    }

    pub fn gammas(&self) -> &[C<T>] {
        &self.gammas
    }

    #[inline]
    pub fn gamma(&self, k: usize) -> C<T> {
        self.gammas[k]
    }

    pub fn omegas(&self) -> &[T] {
        &self.omegas
    }

    /// `omega_n`.
    #[inline]
    pub fn omega(&self, n: usize) -> T {
        self.omegas[n]
    }

    /// Number of stored parameters (`n + 1` for `gamma_0..=gamma_n`).
    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    pub(crate) fn require(&self, n: usize) -> Result<()> {
        if n >= self.gammas.len() {
            return Err(Error::OutOfRange(format!(
                "gamma_{n} requested, {} available",
                self.gammas.len()
            )));
        }
        Ok(())
    }
}

/// One step of the recurrence on a jet about `w`, dividing by
/// `zeta(alpha)`.
fn step_jet<T: Real>(j: &Jet<T>, gamma: C<T>, alpha: C<T>, w: C<T>) -> Jet<T> {
    let one = c1::<T>();
    let num = j.add_scalar(-gamma);
    let den = j.scale(-gamma.conj()).add_scalar(one);
    let q = num.div(&den);
    if same_node(alpha, w) {
        // 1/zeta(w + h) = ((1 - |w|^2) - conj(w) h) / h
        let q = q.shift_down();
        let lin = Jet::variable(c0(), q.len())
            .scale(-w.conj())
            .add_scalar(cr(T::one() - w.norm_sqr()));
        q.mul(&lin)
    } else {
        let z = Jet::variable(w, q.len());
        let zeta = z.add_scalar(-alpha).div(&z.scale(-alpha.conj()).add_scalar(one));
        q.div(&zeta)
    }
}

/// Jet of `f_n` about `w`, long enough to survive every coincident division.
fn remainder_jet<T: Real>(
    f: &SchurFunction<T>,
    alphas: &AlphaSequence<T>,
    gammas: &[C<T>],
    n: usize,
    w: C<T>,
) -> Result<Jet<T>> {
    let mult = if n == 0 { 0 } else { alphas.multiplicity(w, n) };
    let mut j = f.jet(w, mult + 1)?;
    for k in 0..n {
        j = step_jet(&j, gammas[k], alphas.get(k + 1), w);
    }
    Ok(j)
}

/// `gamma_0 ..= gamma_n` by forward evaluation chains.
pub fn schur_parameters<T: Real>(
    f: &SchurFunction<T>,
    alphas: &AlphaSequence<T>,
    n: usize,
) -> Result<SchurParams<T>> {
    alphas.require(n + 1)?;
    let mut gammas: Vec<C<T>> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let w = alphas.get(k + 1);
        let g = remainder_jet(f, alphas, &gammas, k, w)?.value();
        if !(g.re.is_finite() && g.im.is_finite()) {
            return Err(Error::DerivativeUnavailable { k });
        }
        if g.norm().as_f64() >= 1.0 - FINITE_BLASCHKE_TOL {
            return Err(Error::FiniteBlaschkeDetected {
                k,
                modulus: g.norm().as_f64(),
            });
        }
        gammas.push(g);
    }
    SchurParams::new(gammas)
}

/// How [`schur_parameters_with`] obtains `gamma_k = f_k(alpha_{k+1})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SchurMethod {
    /// Forward point-evaluation chains only.
    Evaluation,
    /// Poisson mean of the boundary samples of `f_k`.
    Boundary,
    /// Evaluation while [`chain_condition`] stays below
    /// [`CHAIN_CONDITION_LIMIT`], boundary means after.
    #[default]
    Auto,
}

/// Largest `eps * chain_condition` accepted by [`SchurMethod::Auto`].
pub const CHAIN_CONDITION_LIMIT: f64 = 1e-11;

/// Error amplification of the chain `f_0(w), ..., f_k(w)` at `w = alpha_{k+1}`:
/// `prod 1 / |zeta_j(w)|` over the earlier nodes distinct from `w`.
///
/// Independent rounding errors in the chain are divided by every such
/// factor, so clustered nodes make the chain useless long before the
/// parameters themselves become sensitive.
pub fn chain_condition<T: Real>(alphas: &AlphaSequence<T>, k: usize) -> T {
    let w = alphas.get(k + 1);
    (1..=k)
        .map(|j| alphas.get(j))
        .filter(|a| !same_node(*a, w))
        .fold(T::one(), |acc, a| acc / zeta_unchecked(a, w).norm())
}

/// Samples of `f_0, f_1, ...` at the grid nodes, one row per order.
pub type GridRemainders<T> = Vec<Vec<C<T>>>;

/// `gamma_0 ..= gamma_n` together with `f_0 ..= f_{n+1}` on `grid`.
///
/// With [`SchurMethod::Boundary`] (or `Auto` past the conditioning limit)
/// `gamma_k` is the normalized Poisson mean of the samples of `f_k` at
/// `alpha_{k+1}`. On the circle every `zeta` is unimodular and the Moebius
/// step runs in defect form, so the boundary recurrence does not compound
/// rounding the way the interior chain does; the quadrature error is of order
/// `|alpha|^M`, which the resolution guard keeps below `e^{-50}`.
pub fn schur_parameters_with<T: Real>(
    f: &SchurFunction<T>,
    alphas: &AlphaSequence<T>,
    n: usize,
    grid: &CircleGrid<T>,
    method: SchurMethod,
) -> Result<(SchurParams<T>, GridRemainders<T>)> {
    alphas.require(n + 1)?;
    let mut gammas: Vec<C<T>> = Vec::with_capacity(n + 1);
    let mut cur = f.grid_values(grid)?;
    let mut defect = f.grid_defects(grid, &cur)?;
    let mut out = Vec::with_capacity(n + 2);
    let limit = T::lit(CHAIN_CONDITION_LIMIT);
    let mut evaluating = method != SchurMethod::Boundary;
    for k in 0..=n {
        let w = alphas.get(k + 1);
        if method == SchurMethod::Auto && evaluating {
            evaluating = chain_condition(alphas, k) * T::epsilon() <= limit;
        }
        let g = if evaluating {
            remainder_jet(f, alphas, &gammas, k, w)?.value()
        } else {
            poisson_mean(grid, &cur, w)
        };
        if !(g.re.is_finite() && g.im.is_finite()) {
            return Err(Error::DerivativeUnavailable { k });
        }
        if g.norm().as_f64() >= 1.0 - FINITE_BLASCHKE_TOL {
            return Err(Error::FiniteBlaschkeDetected {
                k,
                modulus: g.norm().as_f64(),
            });
        }
        gammas.push(g);
        let next = grid_step(grid, &cur, &mut defect, g, w);
        out.push(std::mem::replace(&mut cur, next));
    }
    out.push(cur);
    Ok((SchurParams::new(gammas)?, out))
}

/// One Schur step on boundary samples. With `d = 1 - |v|^2` carried
/// separately, `(v - g)/(1 - conj(g) v) = (v (1 - g conj(v)) - g d)/(1 - conj(g) v)`;
/// the first term keeps `|v|` up to rounding, so unimodular samples stay
/// unimodular instead of picking up `(1 + |g|)/(1 - |g|)` per step.
fn grid_step<T: Real>(grid: &CircleGrid<T>, cur: &[C<T>], defect: &mut [T], g: C<T>, w: C<T>) -> Vec<C<T>> {
    let one = c1::<T>();
    let shrink = (T::one() - g.norm()) * (T::one() + g.norm());
    cur.iter()
        .zip(defect.iter_mut())
        .zip(grid.nodes())
        .map(|((v, d), t)| {
            let den = one - g.conj() * *v;
            let num = *v * (one - g * v.conj()) - g * *d;
            *d = shrink * *d / den.norm_sqr();
            num / (den * zeta_unchecked(w, *t))
        })
        .collect()
}

fn poisson_mean<T: Real>(grid: &CircleGrid<T>, samples: &[C<T>], w: C<T>) -> C<T> {
    let (num, den) = grid
        .nodes()
        .iter()
        .zip(samples)
        .fold((c0::<T>(), T::zero()), |(n, d), (t, v)| {
            let p = poisson_raw(*t, w);
            (n + *v * p, d + p)
        });
    num / den
}

/// Samples of `f_0, ..., f_n` at the grid nodes.
pub fn remainders_on_grid<T: Real>(
    f: &SchurFunction<T>,
    alphas: &AlphaSequence<T>,
    params: &SchurParams<T>,
    n: usize,
    grid: &CircleGrid<T>,
) -> Result<Vec<Vec<C<T>>>> {
    if n > 0 {
        params.require(n - 1)?;
        alphas.require(n)?;
    }
    let mut cur = f.grid_values(grid)?;
    let mut defect = f.grid_defects(grid, &cur)?;
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..n {
        let g = params.gamma(k);
        let a = alphas.get(k + 1);
        let next = grid_step(grid, &cur, &mut defect, g, a);
        out.push(std::mem::replace(&mut cur, next));
    }
    out.push(cur);
    Ok(out)
}

/// Samples of `f_n` at the grid nodes.
pub fn remainder_on_grid<T: Real>(
    f: &SchurFunction<T>,
    alphas: &AlphaSequence<T>,
    params: &SchurParams<T>,
    n: usize,
    grid: &CircleGrid<T>,
) -> Result<Vec<C<T>>> {
    Ok(remainders_on_grid(f, alphas, params, n, grid)?.pop().expect("n + 1 entries"))
}

/// `f_n(z)` at an interior point, resolving coincidences with nodes.
pub fn remainder_at<T: Real>(
    f: &SchurFunction<T>,
    alphas: &AlphaSequence<T>,
    params: &SchurParams<T>,
    n: usize,
    z: DiskPoint<T>,
) -> Result<C<T>> {
    if n > 0 {
        params.require(n - 1)?;
        alphas.require(n)?;
    }
    let v = remainder_jet(f, alphas, &params.gammas()[..n], n, z.value())?.value();
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::DerivativeUnavailable { k: n });
    }
    Ok(v)
}

/// Inverse step `tau_k(omega) = (gamma_k + zeta_{k+1} omega) / (1 + conj(gamma_k) zeta_{k+1} omega)`.
pub fn tau<T: Real>(
    params: &SchurParams<T>,
    alphas: &AlphaSequence<T>,
    k: usize,
    omega: C<T>,
    z: C<T>,
) -> Result<C<T>> {
    params.require(k)?;
    alphas.require(k + 1)?;
    let g = params.gamma(k);
    let zo = zeta(alphas.get(k + 1), z)? * omega;
    Ok((g + zo) / (c1::<T>() + g.conj() * zo))
}

/// `tau_0 o ... o tau_n (tail)`.
pub fn compose_taus<T: Real>(
    params: &SchurParams<T>,
    alphas: &AlphaSequence<T>,
    n: usize,
    tail: C<T>,
    z: C<T>,
) -> Result<C<T>> {
    let mut w = tail;
    for k in (0..=n).rev() {
        w = tau(params, alphas, k, w, z)?;
    }
    Ok(w)
}

/// Report of [`validate_schur`].
#[derive(Debug, Clone, PartialEq)]
pub struct SchurValidation {
    pub max_modulus: f64,
    pub min_modulus: f64,
    pub max_jump: f64,
    pub finite_blaschke: bool,
    pub within_bound: bool,
}

impl SchurValidation {
    pub fn passes(&self) -> bool {
        self.within_bound && !self.finite_blaschke
    }
}

/// Sup/inf modulus, largest adjacent jump and finite-Blaschke flag on a grid.
pub fn validate_schur<T: Real>(f: &SchurFunction<T>, grid: &CircleGrid<T>) -> Result<SchurValidation> {
    let vals = f.grid_values(grid)?;
    let mut max = 0f64;
    let mut min = f64::INFINITY;
    let mut jump = 0f64;
    for (i, v) in vals.iter().enumerate() {
        let r = v.norm().as_f64();
        max = max.max(r);
        min = min.min(r);
        let next = vals[(i + 1) % vals.len()];
        jump = jump.max((next - *v).norm().as_f64());
    }
    Ok(SchurValidation {
        max_modulus: max,
        min_modulus: min,
        max_jump: jump,
        finite_blaschke: min > 1.0 - SCHUR_BOUND_TOL,
        within_bound: max <= 1.0 + SCHUR_BOUND_TOL,
    })
}
