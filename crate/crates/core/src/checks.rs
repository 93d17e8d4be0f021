//! Acceptance criteria and invariant checks with named pass/fail results.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::{kinds, residuals, DiagnosticsReport};
use crate::error::Result;
use crate::fixtures::{oracle, pinned};
use crate::geometry::{zeta, DiskPoint};
use crate::measure::{measure_from_schur, CircleGrid, CircleMeasure};
use crate::orf::{divfmu_residual, orf_from_params, orf_gram_schmidt, psi_integral, u_n_eval};
use crate::output::series_csv;
use crate::scenario::{builtin, AlphaSpec, Scenario, BUILTIN_NAMES};
use crate::schur::{
    compose_taus, remainders_on_grid, schur_parameters, schur_parameters_with, AlphaGenerator, AlphaSequence,
    SchurFunction, SchurMethod, SchurParams,
};
use crate::wall::{euler_convergents, wall_ladder};

/// Seed of the random sampling when none is given.
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Grid size of the acceptance runs.
pub const ACCEPTANCE_M: usize = 4096;

/// Nodes cycled through by the second regime.
pub const CYCLE: [[f64; 2]; 4] = [[0.0, 0.0], [0.3, 0.0], [0.0, 0.5], [-0.4, 0.0]];

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Worst measured value.
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckResult {
    fn below(name: &str, value: f64, tolerance: f64, detail: String) -> Self {
        Self {
            name: name.into(),
            passed: value < tolerance,
            value,
            tolerance,
            detail,
        }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<34} value={:<11.3e} tol={:<9.1e} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.tolerance,
            self.detail
        )
    }
}

fn c(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn worst(values: &[(usize, f64)], upto: usize) -> f64 {
    values
        .iter()
        .filter(|(n, _)| *n <= upto)
        .fold(0f64, |a, (_, v)| if v.is_nan() { f64::NAN } else { a.max(*v) })
}

/// Cycling-node variant of half-z-classical.
pub fn half_z_cycling() -> Scenario {
    let mut s = builtin("half-z-classical").expect("built-in");
    s.id = "half-z-cycling".into();
    s.alphas = AlphaSpec::Cycle { points: CYCLE.to_vec() };
    s
}

/// Reports of every built-in plus the cycling regime, computed once.
pub struct Suite {
    pub reports: BTreeMap<String, DiagnosticsReport>,
    pub seed: u64,
}

impl Suite {
    pub fn new(seed: u64) -> Result<Self> {
        let mut reports = BTreeMap::new();
        let mut all: Vec<Scenario> = BUILTIN_NAMES.iter().filter_map(|n| builtin(n)).collect();
        all.push(half_z_cycling());
        for s in all {
            reports.insert(s.id.clone(), s.run()?);
        }
        Ok(Self { reports, seed })
    }

    pub fn report(&self, id: &str) -> &DiagnosticsReport {
        &self.reports[id]
    }

    fn residual(&self, id: &str, name: &str, upto: usize) -> f64 {
        self.report(id).residual(name).map(|v| worst(v, upto)).unwrap_or(f64::NAN)
    }

    /// The thirteen acceptance criteria, in order.
    pub fn acceptance(&self) -> Result<Vec<CheckResult>> {
        Ok(vec![
            geronimus()?,
            determinant(self.seed)?,
            two_path_wall(self.seed)?,
            interpolation()?,
            self.metric_identity(),
            self.orf_poisson_reconstruction(),
            self.e7_identity(),
            self.szego(),
            self.energy_trend(),
            self.l2_asymptotics(),
            self.stress_floor(),
            psi_cross_path()?,
            determinism()?,
        ])
    }

    /// Invariants beyond the acceptance list.
    pub fn invariants(&self) -> Result<Vec<CheckResult>> {
        let mut out = Vec::new();
        let all = |name: &str| {
            self.reports
                .values()
                .map(|r| r.residual(name).map(|v| worst(v, usize::MAX)).unwrap_or(0.0))
                .fold(0f64, f64::max)
        };
        out.push(CheckResult::below(
            "pseudo_error = remainder_energy(n+1)",
            all(residuals::PSEUDO_VS_ENERGY),
            1e-10,
            "all scenarios".into(),
        ));
        out.push(CheckResult {
            name: "lp_error(n,2) <= 4 energy(n+1)".into(),
            passed: all(residuals::LP_CHAIN) <= 1e-12,
            value: all(residuals::LP_CHAIN),
            tolerance: 1e-12,
            detail: "excess over the bound".into(),
        });
        let mut metric_gap = 0f64;
        for r in self.reports.values() {
            if let (Some(h), Some(p)) = (r.series(kinds::HYPERBOLIC_ERROR), r.series(kinds::PSEUDO_ERROR)) {
                for ((_, h), (_, p)) in h.iter().zip(p) {
                    metric_gap = metric_gap.max(4.0 * p - h - 1e-14 * p.abs());
                }
            }
        }
        out.push(CheckResult {
            name: "hyperbolic >= 4 pseudo".into(),
            passed: metric_gap <= 0.0,
            value: metric_gap.max(0.0),
            tolerance: 0.0,
            detail: "largest violation".into(),
        });
        let max_rem = self
            .reports
            .values()
            .filter_map(|r| r.series(kinds::REMAINDER_MAX))
            .map(|v| worst(v, usize::MAX))
            .fold(0f64, f64::max);
        out.push(CheckResult::below(
            "Schur invariance max|f_n| - 1",
            max_rem - 1.0,
            1e-8,
            "grid maximum over all remainders".into(),
        ));
        for (name, tol) in [
            (residuals::NEVANLINNA, 1e-9),
            (residuals::BRIDGE, 1e-7),
            (residuals::ORF_RECURRENCE, 1e-9),
            (residuals::BOUNDARY_ERROR, 1e-9),
        ] {
            let v = self
                .reports
                .iter()
                .filter(|(id, _)| id.as_str() != "inner-stress")
                .map(|(_, r)| r.residual(name).map(|v| worst(v, usize::MAX)).unwrap_or(0.0))
                .fold(0f64, f64::max);
            out.push(CheckResult::below(name, v, tol, "scenarios with |f| < 1 a.e.".into()));
        }
        out.push(parameter_stability()?);
        out.push(tau_reconstruction()?);
        out.push(herglotz_positivity()?);
        out.push(self.weakstar_lebesgue());
        Ok(out)
    }

    fn metric_identity(&self) -> CheckResult {
        let a = self.residual("half-z-radial", residuals::METRIC, 20);
        let b = self.residual("half-z-cycling", residuals::METRIC, 12);
        let k = self.residual("half-z-classical", residuals::METRIC, 12);
        CheckResult::below(
            "#5 metric identity",
            a.max(b).max(k),
            1e-9,
            format!("radial {a:.1e}, cycling {b:.1e}, classical {k:.1e}"),
        )
    }

    fn orf_poisson_reconstruction(&self) -> CheckResult {
        let mut parts = Vec::new();
        let mut w = 0f64;
        for id in ["half-z-classical", "half-z-cycling"] {
            let p = self.residual(id, residuals::ORF_POISSON, 12);
            let r = self.residual(id, residuals::MEASURE_RECONSTRUCTION, 12);
            w = w.max(p).max(r);
            parts.push(format!("{id}: poisson {p:.1e}, reconstruction {r:.1e}"));
        }
        CheckResult::below("#6 ORF-Poisson / reconstruction", w, 1e-7, parts.join("; "))
    }

    fn e7_identity(&self) -> CheckResult {
        let v = self.residual("half-z-radial", residuals::E7, 20);
        CheckResult::below("#7 e7 harmonic identity", v, 1e-6, "half-z-radial, n <= 20".into())
    }

    fn szego(&self) -> CheckResult {
        let pin = pinned().szego_quantity;
        let max_q = self
            .reports
            .values()
            .filter_map(|r| r.series(kinds::SZEGO_QUANTITY))
            .map(|v| worst(v, usize::MAX))
            .fold(0f64, f64::max);
        let q = self.report("half-z-radial").series(kinds::SZEGO_QUANTITY).unwrap_or(&[]);
        let low = q
            .iter()
            .filter(|(n, _)| *n >= pin.n_star)
            .fold(f64::INFINITY, |a, (_, v)| a.min(*v));
        let passed = max_q <= 1.0 + 1e-8 && low >= pin.threshold && !q.is_empty();
        CheckResult {
            name: "#8 Szego bound and asymptotics".into(),
            passed,
            value: max_q,
            tolerance: 1.0 + 1e-8,
            detail: format!(
                "max quantity over runs {max_q:.12}; min over n >= {} on half-z-radial {low:.6} (needs >= {})",
                pin.n_star, pin.threshold
            ),
        }
    }

    fn energy_trend(&self) -> CheckResult {
        let pin = pinned().energy;
        let e = self.report("half-z-radial").series(kinds::REMAINDER_ENERGY).unwrap_or(&[]);
        let tail = e
            .iter()
            .filter(|(n, _)| *n >= pin.n_star)
            .fold(0f64, |a, (_, v)| a.max(*v));
        let vals: Vec<f64> = e.iter().map(|(_, v)| *v).collect();
        let smooth: Vec<f64> = vals.windows(5).map(|w| w.iter().sum::<f64>() / 5.0).collect();
        let monotone = smooth.windows(2).all(|w| w[1] <= w[0]);
        CheckResult {
            name: "#9 remainder energy trend".into(),
            passed: tail < pin.threshold && monotone && !e.is_empty(),
            value: tail,
            tolerance: pin.threshold,
            detail: format!("max for n >= {}; 5-point smoothed monotone: {monotone}", pin.n_star),
        }
    }

    fn l2_asymptotics(&self) -> CheckResult {
        let p = pinned();
        let r = self.report("half-z-radial");
        let tail = |k: &str, from: usize| {
            r.series(k)
                .map(|v| v.iter().filter(|(n, _)| *n >= from).fold(0f64, |a, (_, x)| a.max(*x)))
                .unwrap_or(f64::NAN)
        };
        let a = tail(kinds::SZEGO_L2_GAP, p.l2_gap.n_star);
        let b = tail(kinds::DUAL_SZEGO_L2_GAP, p.dual_l2_gap.n_star);
        CheckResult {
            name: "#10 L2 Szego asymptotics (+dual)".into(),
            passed: a < p.l2_gap.threshold && b < p.dual_l2_gap.threshold,
            value: a.max(b),
            tolerance: p.l2_gap.threshold.min(p.dual_l2_gap.threshold),
            detail: format!(
                "mu: {a:.3e} for n >= {}; dual: {b:.3e} for n >= {}",
                p.l2_gap.n_star, p.dual_l2_gap.n_star
            ),
        }
    }

    fn stress_floor(&self) -> CheckResult {
        let floor = pinned().inner_stress_floor;
        let e = self.report("inner-stress").series(kinds::REMAINDER_ENERGY).unwrap_or(&[]);
        let low = e
            .iter()
            .filter(|(n, _)| *n <= 40)
            .fold(f64::INFINITY, |a, (_, v)| a.min(*v));
        CheckResult {
            name: "#11 inner-stress floor".into(),
            passed: low >= floor && !e.is_empty(),
            value: low,
            tolerance: floor,
            detail: "min remainder energy for n <= 40 (must stay >= tol)".into(),
        }
    }

    fn weakstar_lebesgue(&self) -> CheckResult {
        let v = self
            .report("lebesgue")
            .series(kinds::WEAKSTAR_GAP)
            .map(|s| s.iter().filter(|(n, _)| *n >= 1).fold(0f64, |a, (_, x)| a.max(*x)))
            .unwrap_or(f64::NAN);
        CheckResult::below("weak-* gap, Lebesgue, n >= 1", v, 1e-8, "trig test functions up to degree 3".into())
    }
}

fn half_z() -> SchurFunction<f64> {
    SchurFunction::scaled_identity(Complex64::new(0.5, 0.0)).expect("valid")
}

/// #1: Gram-Schmidt Geronimus parameters against the Schur parameters.
pub fn geronimus() -> Result<CheckResult> {
    let grid = CircleGrid::new(ACCEPTANCE_M)?;
    let f = half_z();
    let (mu, _) = measure_from_schur(&f, &grid)?;
    let mut w = 0f64;
    let mut parts = Vec::new();
    for (name, gen) in [
        ("classical", AlphaGenerator::Classical),
        ("cycling", AlphaGenerator::Cycle(CYCLE.iter().map(|p| c(*p)).collect())),
    ] {
        let alphas = AlphaSequence::generate(gen, 14)?;
        let params = schur_parameters(&f, &alphas, 12)?;
        let (_, ger) = orf_gram_schmidt(&mu, &alphas, 13)?;
        let d = (0..=12)
            .map(|k| (ger.gamma_tilde(k + 1) - params.gamma(k)).norm())
            .fold(0f64, f64::max);
        w = w.max(d);
        parts.push(format!("{name} {d:.1e}"));
    }
    Ok(CheckResult::below("#1 Geronimus equality", w, 1e-7, parts.join(", ")))
}

fn disk_point(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, std::f64::consts::TAU * rng.gen::<f64>())
}

/// Random `|gamma| <= 0.9`, `|alpha| <= 0.95` cases of order 30.
pub fn random_cases(seed: u64, count: usize) -> Result<Vec<(SchurParams<f64>, AlphaSequence<f64>)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let gammas = (0..=30).map(|_| disk_point(&mut rng, 0.9)).collect();
            let mut pts = vec![Complex64::new(0.0, 0.0)];
            pts.extend((0..31).map(|_| disk_point(&mut rng, 0.95)));
            Ok((SchurParams::new(gammas)?, AlphaSequence::from_points(pts)?))
        })
        .collect()
}

const RANDOM_CASES: usize = 24;
const RANDOM_GRID: usize = 256;

/// #2: `|B|^2 - |A|^2 = omega_n` on the circle.
pub fn determinant(seed: u64) -> Result<CheckResult> {
    let grid = CircleGrid::new(RANDOM_GRID)?;
    let mut size_rel = 0f64;
    let mut omega_rel = 0f64;
    for (p, a) in random_cases(seed, RANDOM_CASES)? {
        for t in grid.nodes() {
            for (n, w) in wall_ladder(&p, &a, 30, *t)?.iter().enumerate() {
                size_rel = size_rel.max(w.circle_det_residual(p.omega(n)));
                omega_rel = omega_rel.max(w.circle_det_residual_omega(p.omega(n)));
            }
        }
    }
    Ok(CheckResult::below(
        "#2 determinant identity on circle",
        size_rel,
        1e-10,
        format!("relative to |A|^2+|B|^2; relative to omega_n: {omega_rel:.2e} (info)"),
    ))
}

/// #3: Euler recurrences against the transfer product.
pub fn two_path_wall(seed: u64) -> Result<CheckResult> {
    let grid = CircleGrid::new(RANDOM_GRID)?;
    let mut w = 0f64;
    for (p, a) in random_cases(seed, RANDOM_CASES)? {
        for t in grid.nodes() {
            let e = euler_convergents(&p, &a, 30, *t)?;
            for (n, wv) in wall_ladder(&p, &a, 30, *t)?.iter().enumerate() {
                let [aa, bb, astar, bstar] = wv.unscaled();
                let zn = zeta(a.get(n + 1), *t)?;
                let k = n as isize;
                let scale = aa.norm().max(bb.norm()).max(astar.norm()).max(bstar.norm());
                let d = [
                    (e.p_at(2 * k) - aa).norm(),
                    (e.q_at(2 * k) - bb).norm(),
                    (e.p_at(2 * k + 1) - zn * bstar).norm(),
                    (e.q_at(2 * k + 1) - zn * astar).norm(),
                ]
                .iter()
                .fold(0f64, |m, x| m.max(*x));
                w = w.max(d / scale);
            }
        }
    }
    Ok(CheckResult::below(
        "#3 Euler vs transfer product",
        w,
        1e-10,
        format!("{RANDOM_CASES} random cases, n <= 30, {RANDOM_GRID} circle nodes"),
    ))
}

/// #4: `A_n/B_n` interpolates `f` at `alpha_1..alpha_{n+1}`.
pub fn interpolation() -> Result<CheckResult> {
    let f = half_z();
    let grid = CircleGrid::new(ACCEPTANCE_M)?;
    let mut w = 0f64;
    let mut parts = Vec::new();
    for (name, gen) in [
        ("radial", AlphaGenerator::Radial { theta: 0.0, c: 1.0 }),
        ("cycling", AlphaGenerator::Cycle(CYCLE.iter().map(|p| c(*p)).collect())),
    ] {
        let alphas = AlphaSequence::generate(gen, 22)?;
        let (params, _) = schur_parameters_with(&f, &alphas, 20, &grid, SchurMethod::Auto)?;
        let mut worst_scaled = 0f64;
        for n in 0..=20 {
            for i in 1..=n + 1 {
                let ai = alphas.get(i);
                let r = crate::wall::approximant(&params, &alphas, n, ai)?;
                let err = (r - f.eval(ai)?).norm() * (1.0 - ai.norm());
                worst_scaled = worst_scaled.max(err);
            }
        }
        w = w.max(worst_scaled);
        parts.push(format!("{name} {worst_scaled:.1e}"));
    }
    Ok(CheckResult::below(
        "#4 interpolation",
        w,
        1e-9,
        format!("max |A/B - f|(1-|alpha_i|): {}", parts.join(", ")),
    ))
}

/// #12: transfer `psi_n`, the integral formula and the divFmu identity at
/// 20 interior points.
pub fn psi_cross_path() -> Result<CheckResult> {
    let f = half_z();
    let grid = CircleGrid::new(ACCEPTANCE_M)?;
    let (mu, _) = measure_from_schur(&f, &grid)?;
    let alphas = AlphaSequence::generate(AlphaGenerator::Radial { theta: 0.0, c: 1.0 }, 8)?;
    let params = schur_parameters(&f, &alphas, 6)?;
    let points: Vec<Complex64> = (0..20)
        .map(|j| Complex64::from_polar(0.05 + 0.8 * j as f64 / 19.0, 2.4 * j as f64))
        .collect();
    let mut psi_gap = 0f64;
    let mut div_gap = 0f64;
    for z in &points {
        let herglotz = mu.herglotz_interior(DiskPoint::new(*z)?)?;
        let mut blaschke = Complex64::new(1.0, 0.0);
        for n in 0..=6 {
            if n > 0 {
                blaschke *= zeta(alphas.get(n), *z)?;
            }
            let [_, phistar, psi, psistar] = orf_from_params(&params, &alphas, n, *z)?.unscaled();
            let phi_n = |t: Complex64| Ok(orf_from_params(&params, &alphas, n, t)?.unscaled()[0]);
            let integral = psi_integral(&mu, phi_n, n, *z)?;
            psi_gap = psi_gap.max((integral - psi).norm() / psi.norm().max(1.0));
            let u = u_n_eval(&mu, phi_n, *z)?;
            let r = divfmu_residual(herglotz, psistar, phistar, *z, blaschke, u);
            div_gap = div_gap.max(r.norm() / herglotz.norm());
        }
    }
    Ok(CheckResult::below(
        "#12 cross-path psi",
        psi_gap.max(div_gap),
        1e-7,
        format!("transfer vs integral {psi_gap:.1e}, divFmu {div_gap:.1e}"),
    ))
}

/// #13 (in process): two runs of every built-in give identical CSV text.
pub fn determinism() -> Result<CheckResult> {
    let mut differing = Vec::new();
    for name in BUILTIN_NAMES {
        let s = builtin(name).expect("built-in");
        let a = s.run()?;
        let b = s.run()?;
        let same = a.series.len() == b.series.len()
            && a
                .series
                .iter()
                .zip(&b.series)
                .all(|((ka, va), (kb, vb))| ka == kb && series_csv(va) == series_csv(vb));
        if !same {
            differing.push(name);
        }
    }
    Ok(CheckResult {
        name: "#13 determinism".into(),
        passed: differing.is_empty(),
        value: differing.len() as f64,
        tolerance: 0.0,
        detail: if differing.is_empty() {
            "all built-ins byte-identical across runs".into()
        } else {
            format!("differing: {differing:?}")
        },
    })
}

/// Doubling `M` moves no parameter of half-z-radial by more than `1e-10`.
pub fn parameter_stability() -> Result<CheckResult> {
    let f = half_z();
    let alphas = AlphaSequence::generate(AlphaGenerator::Radial { theta: 0.0, c: 1.0 }, 42)?;
    let (a, _) = schur_parameters_with(&f, &alphas, 41, &CircleGrid::new(ACCEPTANCE_M)?, SchurMethod::Auto)?;
    let (b, _) = schur_parameters_with(&f, &alphas, 41, &CircleGrid::new(2 * ACCEPTANCE_M)?, SchurMethod::Auto)?;
    let d = a
        .gammas()
        .iter()
        .zip(b.gammas())
        .fold(0f64, |m, (x, y)| m.max((x - y).norm()));
    let o = oracle();
    let od = a
        .gammas()
        .iter()
        .zip(&o.gammas)
        .fold(0f64, |m, (x, y)| m.max((x - c(*y)).norm()));
    Ok(CheckResult::below(
        "parameter stability under M -> 2M",
        d.max(od),
        1e-10,
        format!("M vs 2M {d:.1e}; against {}-digit oracle {od:.1e}", o.digits),
    ))
}

/// `tau_0 o ... o tau_n` of the grid remainder reproduces `f`.
pub fn tau_reconstruction() -> Result<CheckResult> {
    let f = half_z();
    let grid = CircleGrid::new(1024)?;
    let alphas = AlphaSequence::generate(AlphaGenerator::Cycle(CYCLE.iter().map(|p| c(*p)).collect()), 12)?;
    let params = schur_parameters(&f, &alphas, 10)?;
    let rem = remainders_on_grid(&f, &alphas, &params, 11, &grid)?;
    let mut w = 0f64;
    for (j, t) in grid.nodes().iter().enumerate() {
        let back = compose_taus(&params, &alphas, 10, rem[11][j], *t)?;
        w = w.max((back - rem[0][j]).norm());
    }
    Ok(CheckResult::below("tau composition reconstructs f", w, 1e-9, "half z, cycling nodes, n = 10".into()))
}

/// `Re F_mu > 0` at 1000 interior points for every built-in measure.
pub fn herglotz_positivity() -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let pts: Vec<Complex64> = (0..1000).map(|_| disk_point(&mut rng, 0.98)).collect();
    let mut min_re = f64::INFINITY;
    for name in BUILTIN_NAMES {
        let s = builtin(name).expect("built-in");
        let f = s.function.build(1024)?;
        let atoms = match &f {
            SchurFunction::Mixture { atoms, .. } => atoms.clone(),
            _ => Vec::new(),
        };
        let grid = CircleGrid::for_atoms(1024, &atoms)?;
        let (ac, _) = measure_from_schur(&f, &grid)?;
        let mu = CircleMeasure::on_grid(grid, ac.density().to_vec(), atoms, false)?;
        for z in &pts {
            min_re = min_re.min(mu.herglotz_interior(DiskPoint::new(*z)?)?.re);
        }
    }
    Ok(CheckResult {
        name: "Herglotz positivity".into(),
        passed: min_re > 0.0,
        value: min_re,
        tolerance: 0.0,
        detail: "min Re F over 1000 points, all built-ins (must be > tol)".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_cases_are_seeded() {
        let a = random_cases(3, 2).unwrap();
        let b = random_cases(3, 2).unwrap();
        assert_eq!(a[1].0, b[1].0);
        assert!(a[0].0.gammas().iter().all(|g| g.norm() <= 0.9));
        assert!(a[0].1.points().iter().all(|p| p.norm() <= 0.95));
        assert_ne!(random_cases(4, 1).unwrap()[0].0, a[0].0);
    }

    #[test]
    fn display_line() {
        let r = CheckResult::below("x", 1e-12, 1e-10, "d".into());
        let s = r.to_string();
        assert!(s.starts_with("PASS x"));
        assert!(!CheckResult::below("y", f64::NAN, 1.0, String::new()).passed);
    }
}
