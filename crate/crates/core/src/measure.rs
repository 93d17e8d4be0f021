//! Probability measures on the circle discretized on a uniform grid, their
//! Herglotz transforms inside the disk and on the boundary, the Szegő
//! function and the second-kind measure.
//!
//! The density is stored as samples of `mu'` with respect to normalized
//! Lebesgue measure at the grid nodes; point masses are kept as an explicit
//! atom list and enter every integral through their exact kernels.

use std::sync::Arc;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CirclePoint, DiskPoint};
use crate::jet::Jet;
use crate::scalar::{c0, c1, cis, cr, Real, C};
use crate::schur::SchurFunction;

/// Minimum node count of a grid.
pub const MIN_GRID: usize = 256;
/// `log mu'` is evaluated on `max(mu', DENSITY_FLOOR)`.
pub const DENSITY_FLOOR: f64 = 1e-13;
/// An atom closer than this (in angle) to a node triggers the grid rotation.
pub const ATOM_NODE_TOL: f64 = 1e-9;
/// Fraction of clipped nodes above which a measure is declared non-Szegő.
pub const SZEGO_CLIP_LIMIT: f64 = 0.05;
/// Interior evaluation points should satisfy `M (1 - |z|) >= RESOLUTION_MIN`.
pub const RESOLUTION_MIN: f64 = 50.0;

/// Uniform grid `t_j = exp(i (2 pi j / M + phase))`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleGrid<T: Real> {
    m: usize,
    phase: T,
    nodes: Arc<Vec<C<T>>>,
}

impl<T: Real> CircleGrid<T> {
    pub fn new(m: usize) -> Result<Self> {
        Self::with_phase(m, T::zero())
    }

    pub fn with_phase(m: usize, phase: T) -> Result<Self> {
        if m < MIN_GRID || !m.is_power_of_two() {
            return Err(Error::InvalidGrid(m));
        }
        let step = T::TAU() / T::nat(m);
        let nodes = (0..m)
            .map(|j| cis(step * T::nat(j) + phase))
            .collect();
        Ok(Self {
            m,
            phase,
            nodes: Arc::new(nodes),
        })
    }

    /// Grid of size `m`, rotated by half a spacing if an atom sits on a node.
    pub fn for_atoms(m: usize, atoms: &[Atom<T>]) -> Result<Self> {
        let g = Self::new(m)?;
        if atoms.iter().any(|a| g.nearest_node_distance(a.theta) < T::lit(ATOM_NODE_TOL)) {
            return Self::with_phase(m, T::PI() / T::nat(m));
        }
        Ok(g)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn phase(&self) -> T {
        self.phase
    }

    #[inline]
    pub fn nodes(&self) -> &[C<T>] {
        &self.nodes
    }

    #[inline]
    pub fn node(&self, j: usize) -> C<T> {
        self.nodes[j]
    }

    pub fn angle(&self, j: usize) -> T {
        T::TAU() * T::nat(j) / T::nat(self.m) + self.phase
    }

    /// Angular distance from `theta` to the closest node.
    pub fn nearest_node_distance(&self, theta: T) -> T {
        let step = T::TAU() / T::nat(self.m);
        let x = (theta - self.phase) / step;
        (x - x.round()).abs() * step
    }

    /// Same grid refined by an integer power-of-two factor, same phase.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::with_phase(self.m * factor, self.phase)
    }

    /// Whether `z` is resolved by the grid: `M (1 - |z|) >= 50`.
    pub fn resolves(&self, z: C<T>) -> bool {
        T::nat(self.m) * (T::one() - z.norm()) >= T::lit(RESOLUTION_MIN)
    }
}

/// Trapezoid rule on the periodic grid: the sample mean.
pub fn integrate<T: Real>(grid: &CircleGrid<T>, samples: &[C<T>]) -> C<T> {
    assert_eq!(samples.len(), grid.len(), "one sample per node");
    let sum = samples.iter().fold(c0::<T>(), |acc, s| acc + *s);
    sum / T::nat(grid.len())
}

pub(crate) fn mean_real<T: Real>(samples: impl Iterator<Item = T>, m: usize) -> T {
    samples.fold(T::zero(), |a, b| a + b) / T::nat(m)
}

/// Point mass at `exp(i theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom<T: Real> {
    pub theta: T,
    pub mass: T,
}

impl<T: Real> Atom<T> {
    #[inline]
    pub fn position(&self) -> C<T> {
        cis(self.theta)
    }
}

/// Density samples plus atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleMeasure<T: Real> {
    grid: CircleGrid<T>,
    density: Vec<T>,
    atoms: Vec<Atom<T>>,
    probability: bool,
}

impl<T: Real> CircleMeasure<T> {
    /// Builds a measure on a grid of size `m`, choosing the grid phase from
    /// the atom positions.
    pub fn new(m: usize, density: Vec<T>, atoms: Vec<Atom<T>>, probability: bool) -> Result<Self> {
        let grid = CircleGrid::for_atoms(m, &atoms)?;
        Self::on_grid(grid, density, atoms, probability)
    }

    pub fn on_grid(
        grid: CircleGrid<T>,
        density: Vec<T>,
        atoms: Vec<Atom<T>>,
        probability: bool,
    ) -> Result<Self> {
        if density.len() != grid.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} density samples for a grid of {}",
                density.len(),
                grid.len()
            )));
        }
        if let Some(j) = density.iter().position(|d| !(d.is_finite() && *d >= T::zero())) {
            return Err(Error::InvalidMeasure(format!("density not finite/non-negative at node {j}")));
        }
        for (i, a) in atoms.iter().enumerate() {
            if !(a.mass > T::zero() && a.mass.is_finite() && a.theta.is_finite()) {
                return Err(Error::InvalidMeasure(format!("atom {i} has invalid mass or position")));
            }
            if grid.nearest_node_distance(a.theta) < T::lit(ATOM_NODE_TOL) {
                return Err(Error::AtomCollision((((a.theta - grid.phase()) / T::TAU()
                    * T::nat(grid.len()))
                .round()
                .as_f64() as i64)
                    .rem_euclid(grid.len() as i64) as usize));
            }
            for b in &atoms[..i] {
                if (a.position() - b.position()).norm() < T::lit(ATOM_NODE_TOL) {
                    return Err(Error::InvalidMeasure("coincident atoms".into()));
                }
            }
        }
        let mu = Self {
            grid,
            density,
            atoms,
            probability,
        };
        if probability {
            let mass = mu.total_mass();
            if (mass - T::one()).abs() > T::lit(1e-9) {
                return Err(Error::InvalidMeasure(format!(
                    "flagged probability but total mass is {mass}"
                )));
            }
        }
        Ok(mu)
    }

    /// Normalized Lebesgue measure.
    pub fn lebesgue(m: usize) -> Result<Self> {
        Self::new(m, vec![T::one(); m], Vec::new(), true)
    }

    pub fn grid(&self) -> &CircleGrid<T> {
        &self.grid
    }

    pub fn density(&self) -> &[T] {
        &self.density
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn is_probability(&self) -> bool {
        self.probability
    }

    pub fn total_mass(&self) -> T {
        mean_real(self.density.iter().copied(), self.grid.len())
            + self.atoms.iter().fold(T::zero(), |a, b| a + b.mass)
    }

    /// `int g dmu` for `g` given by its node samples and its atom values.
    pub fn integrate_with<F>(&self, node_values: &[C<T>], atom_fn: F) -> C<T>
    where
        F: Fn(C<T>) -> C<T>,
    {
        let m = self.grid.len();
        let mut acc = c0::<T>();
        for (v, d) in node_values.iter().zip(&self.density) {
            acc = acc + *v * *d;
        }
        acc = acc / T::nat(m);
        for a in &self.atoms {
            acc = acc + atom_fn(a.position()) * a.mass;
        }
        acc
    }

    /// Herglotz transform inside the disk by quadrature.
    pub fn herglotz_interior(&self, z: DiskPoint<T>) -> Result<C<T>> {
        self.herglotz_jet(z.value(), 1).map(|j| j.value())
    }

    /// Taylor jet of `F_mu` about an interior point `w`:
    /// `(t+w)/(t-w)` for the constant term, `2t/(t-w)^{k+1}` for order `k`.
    pub fn herglotz_jet(&self, w: C<T>, len: usize) -> Result<Jet<T>> {
        let len = len.max(1);
        let mut coeffs = vec![c0::<T>(); len];
        let two = T::lit(2.0);
        let mut kernel = |t: C<T>, weight: T| -> Result<()> {
            let d = t - w;
            if d.norm() == T::zero() {
                return Err(Error::AtomOnPath);
            }
            coeffs[0] = coeffs[0] + (t + w) / d * weight;
            let inv = c1::<T>() / d;
            let mut p = t * inv * inv * two;
            for c in coeffs.iter_mut().skip(1) {
                *c = *c + p * weight;
                p = p * inv;
            }
            Ok(())
        };
        let m = T::nat(self.grid.len());
        for (t, d) in self.grid.nodes().iter().zip(&self.density) {
            kernel(*t, *d / m)?;
        }
        for a in &self.atoms {
            kernel(a.position(), a.mass)?;
        }
        Ok(Jet::new(coeffs))
    }

    /// Boundary values of `F_mu` at every grid node:
    /// `mu' + i conj(mu') + sum m_a (tau_a + t)/(tau_a - t)`.
    pub fn herglotz_boundary_all(&self) -> Vec<C<T>> {
        let conj = conjugate_function(&self.density);
        let mut out: Vec<C<T>> = self
            .density
            .iter()
            .zip(&conj)
            .map(|(d, c)| C::new(*d, *c))
            .collect();
        for a in &self.atoms {
            let tau = a.position();
            for (v, t) in out.iter_mut().zip(self.grid.nodes()) {
                *v = *v + (tau + *t) / (tau - *t) * a.mass;
            }
        }
        out
    }

    /// Boundary value of `F_mu` at the grid node `t`.
    pub fn herglotz_boundary(&self, t: CirclePoint<T>) -> Result<C<T>> {
        let j = self.node_index(t)?;
        Ok(self.herglotz_boundary_all()[j])
    }

    /// Index of the grid node equal to `t` (to 1e-9).
    pub fn node_index(&self, t: CirclePoint<T>) -> Result<usize> {
        for a in &self.atoms {
            if (a.position() - t.value()).norm() < T::lit(ATOM_NODE_TOL) {
                return Err(Error::AtomCollision(0));
            }
        }
        let theta = t.value().arg();
        let step = T::TAU() / T::nat(self.grid.len());
        let x = (theta - self.grid.phase()) / step;
        let j = (x.round().as_f64() as i64).rem_euclid(self.grid.len() as i64) as usize;
        if (self.grid.node(j) - t.value()).norm() > T::lit(1e-9) {
            return Err(Error::OutOfRange("point is not a grid node".into()));
        }
        Ok(j)
    }

    /// Schur function value `(F - 1) / (z (F + 1))`, with the `z = 0`
    /// limit taken through the jet of `F`.
    pub fn schur_value(&self, z: DiskPoint<T>) -> Result<C<T>> {
        Ok(schur_jet_from_herglotz(&self.herglotz_jet(z.value(), 2)?, z.value()).value())
    }

    /// Second-kind measure: density `Re(1/F_mu)` at the nodes. Atoms of the
    /// second-kind measure are not reconstructed.
    pub fn second_kind(&self) -> Result<Self> {
        let f = self.herglotz_boundary_all();
        let density: Vec<T> = f.iter().map(|v| (c1::<T>() / *v).re.max(T::zero())).collect();
        Self::on_grid(self.grid.clone(), density, Vec::new(), false)
    }

    /// Szegő function of the absolutely continuous part.
    pub fn szego(&self) -> Result<SzegoFunction<T>> {
        SzegoFunction::new(self)
    }
}

/// `f = (F - 1) / (z (F + 1))` on jets about `w`; at `w = 0` the division by
/// `z` consumes one order.
pub(crate) fn schur_jet_from_herglotz<T: Real>(fj: &Jet<T>, w: C<T>) -> Jet<T> {
    let num = fj.add_scalar(-c1::<T>());
    let den = fj.add_scalar(c1::<T>());
    let q = num.div(&den);
    if w.norm() == T::zero() {
        q.shift_down()
    } else {
        q.div(&Jet::variable(w, q.len()))
    }
}

/// Conjugate function of real periodic samples via the Fourier multiplier
/// `-i sgn(k)`; the mean and the Nyquist mode are dropped.
pub fn conjugate_function<T: Real>(samples: &[T]) -> Vec<T> {
    let m = samples.len();
    let mut buf: Vec<C<T>> = samples.iter().map(|s| cr(*s)).collect();
    let mut planner = FftPlanner::<T>::new();
    planner.plan_fft_forward(m).process(&mut buf);
    for (k, v) in buf.iter_mut().enumerate() {
        *v = if k == 0 || 2 * k == m {
            c0()
        } else if 2 * k < m {
            C::new(v.im, -v.re) // -i v
        } else {
            C::new(-v.im, v.re) // i v
        };
    }
    planner.plan_fft_inverse(m).process(&mut buf);
    let scale = T::nat(m);
    buf.into_iter().map(|v| v.re / scale).collect()
}

/// Density of the Herglotz measure of `f`: `(1 - |f|^2) / |1 - t f|^2`
/// at each node. Returns the measure (not flagged probability) and the
/// number of nodes below the density floor.
pub fn measure_from_schur<T: Real>(
    f: &SchurFunction<T>,
    grid: &CircleGrid<T>,
) -> Result<(CircleMeasure<T>, usize)> {
    let values = f.grid_values(grid)?;
    let density: Vec<T> = values
        .iter()
        .zip(grid.nodes())
        .map(|(v, t)| density_from_value(*v, *t))
        .collect();
    let low = density.iter().filter(|d| d.as_f64() < DENSITY_FLOOR).count();
    Ok((CircleMeasure::on_grid(grid.clone(), density, Vec::new(), false)?, low))
}

#[inline]
pub(crate) fn density_from_value<T: Real>(f: C<T>, t: C<T>) -> T {
    let num = T::one() - f.norm_sqr();
    let den = (c1::<T>() - t * f).norm_sqr();
    if den == T::zero() {
        return T::zero();
    }
    (num / den).max(T::zero())
}

/// Schur function of a measure at an interior point.
pub fn schur_from_measure<T: Real>(mu: &CircleMeasure<T>, z: DiskPoint<T>) -> Result<C<T>> {
    mu.schur_value(z)
}

/// Outer function with `|S|^2 = mu'` on the circle and `S(0) > 0`.
#[derive(Debug, Clone)]
pub struct SzegoFunction<T: Real> {
    grid: CircleGrid<T>,
    half_log: Vec<T>,
    boundary: Vec<C<T>>,
    clipped: usize,
}

impl<T: Real> SzegoFunction<T> {
    pub fn new(mu: &CircleMeasure<T>) -> Result<Self> {
        let floor = T::lit(DENSITY_FLOOR);
        let mut clipped = 0usize;
        let half_log: Vec<T> = mu
            .density()
            .iter()
            .map(|d| {
                if *d < floor {
                    clipped += 1;
                }
                T::lit(0.5) * d.max(floor).ln()
            })
            .collect();
        let m = mu.grid().len();
        if (clipped as f64) > SZEGO_CLIP_LIMIT * m as f64 {
            return Err(Error::NotSzego { clipped, total: m });
        }
        let conj = conjugate_function(&half_log);
        let boundary = half_log
            .iter()
            .zip(&conj)
            .map(|(u, v)| C::new(*u, *v).exp())
            .collect();
        Ok(Self {
            grid: mu.grid().clone(),
            half_log,
            boundary,
            clipped,
        })
    }

    /// `S(z)` for interior `z` by quadrature of the Herglotz kernel.
    pub fn eval(&self, z: C<T>) -> C<T> {
        let m = T::nat(self.grid.len());
        let mut acc = c0::<T>();
        for (t, u) in self.grid.nodes().iter().zip(&self.half_log) {
            acc = acc + (*t + z) / (*t - z) * *u;
        }
        (acc / m).exp()
    }

    /// `S` at the grid nodes.
    pub fn boundary(&self) -> &[C<T>] {
        &self.boundary
    }

    pub fn at_origin(&self) -> T {
        mean_real(self.half_log.iter().copied(), self.grid.len()).exp()
    }

    /// Number of nodes where the density was clipped to the floor.
    pub fn clipped(&self) -> usize {
        self.clipped
    }
}

/// JSON form `{"M", "density", "atoms": [{"theta", "mass"}], "probability"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleMeasureJson {
    #[serde(rename = "M")]
    pub m: usize,
    pub density: Vec<f64>,
    #[serde(default)]
    pub atoms: Vec<Atom<f64>>,
    #[serde(default)]
    pub probability: bool,
}

impl From<&CircleMeasure<f64>> for CircleMeasureJson {
    fn from(mu: &CircleMeasure<f64>) -> Self {
        Self {
            m: mu.grid().len(),
            density: mu.density().to_vec(),
            atoms: mu.atoms().to_vec(),
            probability: mu.is_probability(),
        }
    }
}

impl TryFrom<CircleMeasureJson> for CircleMeasure<f64> {
    type Error = Error;

    fn try_from(j: CircleMeasureJson) -> Result<Self> {
        CircleMeasure::new(j.m, j.density, j.atoms, j.probability)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::poisson_raw;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn dp(re: f64, im: f64) -> DiskPoint<f64> {
        DiskPoint::new(Complex64::new(re, im)).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(CircleGrid::<f64>::new(1000).is_err());
        assert!(CircleGrid::<f64>::new(128).is_err());
        assert_eq!(CircleGrid::<f64>::new(256).unwrap().len(), 256);
    }

    #[test]
    fn integrate_cases() {
        let g = CircleGrid::<f64>::new(1024).unwrap();
        let c = Complex64::new(0.3, -2.0);
        assert!((integrate(&g, &vec![c; 1024]) - c).norm() < 1e-14);
        assert!(integrate(&g, g.nodes()).norm() < 1e-15);
        let w = Complex64::new(0.3, 0.0);
        let p: Vec<Complex64> = g.nodes().iter().map(|t| cr(poisson_raw(*t, w))).collect();
        assert!((integrate(&g, &p) - c1()).norm() < 1e-12);
    }

    #[test]
    fn herglotz_of_lebesgue_is_one() {
        let mu = CircleMeasure::<f64>::lebesgue(1024).unwrap();
        for z in [dp(0.0, 0.0), dp(0.5, 0.3), dp(-0.8, 0.1)] {
            assert!((mu.herglotz_interior(z).unwrap() - c1()).norm() < 1e-12);
        }
        for v in mu.herglotz_boundary_all() {
            assert!((v - c1()).norm() < 1e-12);
        }
    }

    #[test]
    fn herglotz_of_single_atom() {
        let mu = CircleMeasure::<f64>::new(
            256,
            vec![0.0; 256],
            vec![Atom { theta: 0.0, mass: 1.0 }],
            true,
        )
        .unwrap();
        // the atom at a node forces the half-spacing rotation
        assert!(mu.grid().phase() > 0.0);
        let z = Complex64::new(0.2, -0.4);
        let want = (c1::<f64>() + z) / (c1::<f64>() - z);
        assert!((mu.herglotz_interior(DiskPoint::new(z).unwrap()).unwrap() - want).norm() < 1e-14);
        // f = 1 identically: the excluded unimodular-constant case
        let f = schur_from_measure(&mu, DiskPoint::new(z).unwrap()).unwrap();
        assert!((f - c1()).norm() < 1e-12);
    }

    #[test]
    fn boundary_single_harmonic() {
        let m = 512;
        let g = CircleGrid::<f64>::new(m).unwrap();
        let density: Vec<f64> = g.nodes().iter().map(|t| 1.0 + t.re).collect();
        let mu = CircleMeasure::on_grid(g.clone(), density, vec![], true).unwrap();
        for (v, t) in mu.herglotz_boundary_all().iter().zip(g.nodes()) {
            assert!((*v - (c1::<f64>() + *t)).norm() < 1e-12);
        }
        let t = CirclePoint::new(g.node(17)).unwrap();
        assert!((mu.herglotz_boundary(t).unwrap() - (c1::<f64>() + g.node(17))).norm() < 1e-12);
    }

    #[test]
    fn conjugate_of_sine_is_minus_cosine() {
        let m = 256;
        let s: Vec<f64> = (0..m).map(|j| (2.0 * PI * j as f64 / m as f64 * 3.0).sin()).collect();
        let c = conjugate_function(&s);
        for (j, v) in c.iter().enumerate() {
            let want = -(2.0 * PI * j as f64 / m as f64 * 3.0).cos();
            assert!((v - want).abs() < 1e-12);
        }
    }

    #[test]
    fn probability_mass_check() {
        assert!(CircleMeasure::<f64>::new(256, vec![2.0; 256], vec![], true).is_err());
        assert!(CircleMeasure::<f64>::new(256, vec![-1.0; 256], vec![], false).is_err());
        assert!(CircleMeasure::<f64>::new(256, vec![1.0; 255], vec![], false).is_err());
    }

    #[test]
    fn atom_collision_on_explicit_grid() {
        let g = CircleGrid::<f64>::new(256).unwrap();
        let r = CircleMeasure::on_grid(g, vec![0.5; 256], vec![Atom { theta: PI, mass: 0.5 }], true);
        assert!(matches!(r, Err(Error::AtomCollision(128))));
    }

    #[test]
    fn szego_of_lebesgue_and_of_one_minus_z() {
        let mu = CircleMeasure::<f64>::lebesgue(1024).unwrap();
        let s = mu.szego().unwrap();
        assert!((s.eval(Complex64::new(0.4, 0.2)) - c1()).norm() < 1e-12);
        assert!((s.at_origin() - 1.0).abs() < 1e-14);

        // |1 - t|^2 has a zero at t = 1; rotate so no node hits it.
        let m = 4096;
        let g = CircleGrid::<f64>::with_phase(m, PI / m as f64).unwrap();
        let density: Vec<f64> = g.nodes().iter().map(|t| (c1::<f64>() - *t).norm_sqr()).collect();
        let mu = CircleMeasure::on_grid(g, density, vec![], false).unwrap();
        let s = mu.szego().unwrap();
        let z = Complex64::new(0.3, 0.1);
        assert!((s.eval(z) - (c1::<f64>() - z)).norm() < 1e-3);
        assert!((s.at_origin() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn not_szego_when_mostly_zero() {
        let mut d = vec![1.0; 256];
        for v in d.iter_mut().take(40) {
            *v = 0.0;
        }
        let mu = CircleMeasure::<f64>::new(256, d, vec![], false).unwrap();
        assert!(matches!(mu.szego(), Err(Error::NotSzego { clipped: 40, total: 256 })));
    }

    #[test]
    fn json_roundtrip() {
        let mu = CircleMeasure::<f64>::new(
            256,
            vec![0.75; 256],
            vec![Atom { theta: 1.0, mass: 0.25 }],
            true,
        )
        .unwrap();
        let s = serde_json::to_string(&CircleMeasureJson::from(&mu)).unwrap();
        assert!(s.contains("\"M\":256"));
        let back: CircleMeasureJson = serde_json::from_str(&s).unwrap();
        let mu2 = CircleMeasure::try_from(back).unwrap();
        assert_eq!(mu, mu2);
    }
}
