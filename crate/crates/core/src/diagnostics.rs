//! Convergence functionals and identity residuals as sequences in `n`.
//!
//! [`ScenarioState`] holds everything shared across orders: the grid, the
//! parameters `gamma_0..=gamma_{n_max+1}`, the remainders on the grid, the
//! Herglotz measure of `f`, and the Szegő functions of `mu` and of the
//! second-kind measure. [`ScenarioState::report`] then makes one pass over
//! the grid nodes, evaluating the Wall and ORF ladders at each node and
//! accumulating every functional for every `n`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{hyperbolic_from_rho, poisson_raw, rho, zeta, zeta_unchecked};
use crate::measure::{
    measure_from_schur, CircleGrid, CircleMeasure, SzegoFunction, DENSITY_FLOOR, RESOLUTION_MIN,
};
use crate::orf::{bridge_from, orf_from_params, orf_gram_schmidt, orf_ladder, recurrence_from};
use crate::schur::{schur_parameters_with, AlphaSequence, SchurFunction, SchurMethod, SchurParams};
use crate::scalar::{c1, cis, Real, C};
use crate::wall::wall_ladder;

/// Series kinds emitted by the runner.
pub mod kinds {
    pub const GAMMA_ABS: &str = "gamma_abs";
    pub const GAMMA_RE: &str = "gamma_re";
    pub const GAMMA_IM: &str = "gamma_im";
    pub const OMEGA: &str = "omega";
    pub const REMAINDER_ENERGY: &str = "remainder_energy";
    pub const PSEUDO_ERROR: &str = "pseudo_error";
    pub const HYPERBOLIC_ERROR: &str = "hyperbolic_error";
    pub const LOG_DEFECT: &str = "log_defect";
    pub const SUP_ERROR: &str = "sup_error";
    pub const APPROXIMANT_MAX: &str = "approximant_max_modulus";
    pub const REMAINDER_MAX: &str = "remainder_max_modulus";
    pub const SZEGO_QUANTITY: &str = "szego_quantity";
    pub const SZEGO_L2_GAP: &str = "szego_l2_gap";
    pub const SZEGO_POINTWISE_GAP: &str = "szego_pointwise_gap";
    pub const DUAL_SZEGO_QUANTITY: &str = "dual_szego_quantity";
    pub const DUAL_SZEGO_L2_GAP: &str = "dual_szego_l2_gap";
    pub const WEAKSTAR_GAP: &str = "weakstar_gap";
    pub const BOUNDARY_UNIFORM_GAP: &str = "boundary_uniform_gap";
    pub const APRIORI_BOUND: &str = "apriori_bound";
    pub const U_N_SUP: &str = "u_n_sup";
    pub const KAPPA: &str = "kappa";

    /// `lp_error_p<p>` for an exponent `p`.
    pub fn lp(p: f64) -> String {
        format!("lp_error_p{p}")
    }
}

/// Residual names in `residual_maxima`.
pub mod residuals {
    pub const DETERMINANT: &str = "determinant";
    pub const METRIC: &str = "metric_identity";
    pub const BOUNDARY_ERROR: &str = "boundary_error_identity";
    pub const NEVANLINNA: &str = "nevanlinna_reconstruction";
    pub const PSEUDO_VS_ENERGY: &str = "pseudo_vs_energy";
    pub const ORF_POISSON: &str = "orf_poisson";
    pub const MEASURE_RECONSTRUCTION: &str = "measure_reconstruction";
    pub const BRIDGE: &str = "wall_orf_bridge";
    pub const ORF_RECURRENCE: &str = "orf_recurrence";
    pub const E7: &str = "e7_identity";
    pub const GERONIMUS: &str = "geronimus";
    pub const FMUQUOT: &str = "herglotz_szego_quotient";
    pub const LP_CHAIN: &str = "lp_chain_excess";
}

/// Closed arc `[start, end]` of the circle (radians, `start < end`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleArc {
    pub start: f64,
    pub end: f64,
}

impl CircleArc {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !(start < end && start.is_finite() && end.is_finite()) {
            return Err(Error::OutOfRange(format!("arc [{start}, {end}] needs start < end")));
        }
        Ok(Self { start, end })
    }

    pub fn contains(&self, theta: f64) -> bool {
        let d = (theta - self.start).rem_euclid(std::f64::consts::TAU);
        d <= self.end - self.start
    }
}

/// Knobs of the diagnostics pass.
#[derive(Debug, Clone)]
pub struct DiagnosticsConfig {
    pub n_max: usize,
    pub lp_exponents: Vec<f64>,
    pub boundary_arc: CircleArc,
    pub apriori_arc: CircleArc,
    /// The sequence `z_n` of the pointwise Szegő gap, held constant.
    pub pointwise_z: (f64, f64),
    pub weakstar_degree: usize,
    /// Run Gram-Schmidt and record the Geronimus residual.
    pub geronimus: bool,
}

impl DiagnosticsConfig {
    pub fn new(n_max: usize) -> Self {
        Self {
            n_max,
            lp_exponents: vec![2.0],
            boundary_arc: CircleArc {
                start: -std::f64::consts::FRAC_PI_2,
                end: std::f64::consts::FRAC_PI_2,
            },
            apriori_arc: CircleArc {
                start: std::f64::consts::FRAC_PI_2,
                end: 3.0 * std::f64::consts::FRAC_PI_2,
            },
            pointwise_z: (0.0, 0.0),
            weakstar_degree: 3,
            geronimus: true,
        }
    }
}

/// Szegő summary of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SzegoSummary {
    pub clipped: usize,
    pub bound_ok: bool,
    pub max_quantity: f64,
    pub dual_available: bool,
}

/// Per-`n` series, residual maxima and warnings of one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub scenario: String,
    #[serde(rename = "M")]
    pub grid_m: usize,
    pub n_max: usize,
    pub series: BTreeMap<String, Vec<(usize, f64)>>,
    pub residual_maxima: BTreeMap<String, Vec<(usize, f64)>>,
    pub szego: Option<SzegoSummary>,
    pub warnings: Vec<String>,
    pub resolution_refused: bool,
    #[serde(default)]
    pub hypotheses: Vec<String>,
}

impl DiagnosticsReport {
    pub fn series(&self, kind: &str) -> Option<&[(usize, f64)]> {
        self.series.get(kind).map(|v| v.as_slice())
    }

    /// Value of a series at `n`.
    pub fn value(&self, kind: &str, n: usize) -> Option<f64> {
        self.series(kind)?.iter().find(|(k, _)| *k == n).map(|(_, v)| *v)
    }

    pub fn residual(&self, name: &str) -> Option<&[(usize, f64)]> {
        self.residual_maxima.get(name).map(|v| v.as_slice())
    }

    /// Largest value of a residual over all `n`.
    pub fn residual_max(&self, name: &str) -> Option<f64> {
        self.residual(name)
            .map(|v| v.iter().fold(0f64, |a, (_, x)| a.max(*x)))
    }

    /// Keeps only the listed series kinds.
    pub fn retain_series(&mut self, kinds: &[String]) {
        self.series.retain(|k, _| kinds.iter().any(|s| s == k));
    }
}

/// Shared, immutable state of a scenario.
#[derive(Debug, Clone)]
pub struct ScenarioState<T: Real> {
    pub id: String,
    pub f: SchurFunction<T>,
    pub alphas: AlphaSequence<T>,
    pub grid: CircleGrid<T>,
    pub n_max: usize,
    /// `gamma_0..=gamma_{n_max+1}`.
    pub params: SchurParams<T>,
    /// Parameters of `-f`.
    pub dual_params: SchurParams<T>,
    /// `f_0..=f_{n_max+1}` on the grid.
    pub remainders: Vec<Vec<C<T>>>,
    pub measure: CircleMeasure<T>,
    /// Whether `measure` is a probability measure (no singular part lost).
    pub measure_ok: bool,
    pub szego: Option<SzegoFunction<T>>,
    pub dual: Option<(CircleMeasure<T>, SzegoFunction<T>)>,
    pub warnings: Vec<String>,
    pub resolution_refused: bool,
}

impl<T: Real> ScenarioState<T> {
    pub fn new(
        id: &str,
        f: SchurFunction<T>,
        alphas: AlphaSequence<T>,
        m: usize,
        n_max: usize,
    ) -> Result<Self> {
        Self::with_method(id, f, alphas, m, n_max, SchurMethod::Auto)
    }

    pub fn with_method(
        id: &str,
        f: SchurFunction<T>,
        alphas: AlphaSequence<T>,
        m: usize,
        n_max: usize,
        method: SchurMethod,
    ) -> Result<Self> {
        let mut warnings = Vec::new();
        let atoms = match &f {
            SchurFunction::Mixture { atoms, .. } => atoms.clone(),
            _ => Vec::new(),
        };
        let grid = match &f {
            SchurFunction::Measure(mu) => mu.grid().clone(),
            _ => CircleGrid::for_atoms(m, &atoms)?,
        };
        let (params, mut remainders) = schur_parameters_with(&f, &alphas, n_max + 1, &grid, method)?;
        remainders.pop();
        let dual_params = SchurParams::new(params.gammas().iter().map(|g| -*g).collect())?;

        let measure = match &f {
            SchurFunction::Measure(mu) => (**mu).clone(),
            _ => {
                let (ac, low) = measure_from_schur(&f, &grid)?;
                if low * 100 > grid.len() {
                    warnings.push(format!(
                        "degenerate density: {low} of {} nodes below {DENSITY_FLOOR:e}",
                        grid.len()
                    ));
                }
                CircleMeasure::on_grid(grid.clone(), ac.density().to_vec(), atoms, false)?
            }
        };
        let mass = measure.total_mass();
        let measure_ok = (mass - T::one()).abs().as_f64() < 1e-6;
        if !measure_ok {
            warnings.push(format!(
                "grid measure has mass {} (singular part not representable); measure-based diagnostics skipped",
                mass.as_f64()
            ));
        }
        let mut szego = None;
        let mut dual = None;
        if measure_ok {
            match measure.szego() {
                Ok(s) => {
                    if s.clipped() > 0 {
                        warnings.push(format!("Szegő: {} nodes clipped to the density floor", s.clipped()));
                    }
                    szego = Some(s);
                    let tilde = measure.second_kind()?;
                    match tilde.szego() {
                        Ok(st) => dual = Some((tilde, st)),
                        Err(e) => warnings.push(format!("second-kind measure: {e}")),
                    }
                }
                Err(e) => warnings.push(format!("Szegő diagnostics skipped: {e}")),
            }
        }

        let mut resolution_refused = false;
        for k in 0..=n_max + 1 {
            let a = alphas.get(k);
            if !grid.resolves(a) {
                resolution_refused = true;
                warnings.push(format!(
                    "under-resolved: M (1 - |alpha_{k}|) = {:.3} < {RESOLUTION_MIN}",
                    T::nat(grid.len()).as_f64() * (1.0 - a.norm().as_f64())
                ));
            }
        }
        Ok(Self {
            id: id.to_string(),
            f,
            alphas,
            grid,
            n_max,
            params,
            dual_params,
            remainders,
            measure,
            measure_ok,
            szego,
            dual,
            warnings,
            resolution_refused,
        })
    }

    fn m(&self) -> T {
        T::nat(self.grid.len())
    }

    /// `A_n / B_n` at every grid node.
    pub fn approximant_samples(&self, n: usize) -> Result<Vec<C<T>>> {
        self.grid
            .nodes()
            .par_iter()
            .map(|t| Ok(crate::wall::wall_eval(&self.params, &self.alphas, n, *t)?.ratio()))
            .collect()
    }

    /// `phi_n` at every grid node, from the transfer product.
    pub fn phi_samples(&self, n: usize) -> Result<Vec<C<T>>> {
        self.grid
            .nodes()
            .par_iter()
            .map(|t| Ok(orf_from_params(&self.params, &self.alphas, n, *t)?.unscaled()[0]))
            .collect()
    }

    /// `kappa_n^2 |S(alpha_n)|^2 (1 - |alpha_n|^2)` for `mu` (or its dual).
    pub fn szego_quantity(&self, n: usize, dual: bool) -> Option<T> {
        let (params, s) = if dual {
            (&self.dual_params, &self.dual.as_ref()?.1)
        } else {
            (&self.params, self.szego.as_ref()?)
        };
        let an = self.alphas.get(n);
        let o = orf_from_params(params, &self.alphas, n, an).ok()?;
        let kappa = o.unscaled()[1].norm();
        Some(kappa * kappa * s.eval(an).norm_sqr() * (T::one() - an.norm_sqr()))
    }

    /// Full diagnostics pass.
    pub fn report(&self, cfg: &DiagnosticsConfig) -> Result<DiagnosticsReport> {
        let n_max = self.n_max.min(cfg.n_max);
        let nn = n_max + 2;
        let m = self.m();
        let alphas = &self.alphas;
        let herglotz = self.measure.herglotz_boundary_all();

        // Per-order constants.
        let alpha: Vec<C<T>> = (0..nn).map(|k| alphas.get(k)).collect();
        let szego_pre = self.szego.as_ref().map(|s| szego_constants(s, &self.params, alphas, n_max, cfg));
        let dual_pre = self
            .dual
            .as_ref()
            .map(|(_, s)| szego_constants(s, &self.dual_params, alphas, n_max, cfg));
        let szego_boundary = self.szego.as_ref().map(|s| s.boundary().to_vec());
        let dual_boundary = self.dual.as_ref().map(|(_, s)| s.boundary().to_vec());
        let lp: Vec<T> = cfg.lp_exponents.iter().map(|p| T::lit(*p)).collect();
        let n_test = 1 + 2 * cfg.weakstar_degree;

        let chunks: Vec<(usize, usize)> = (0..self.grid.len())
            .step_by(CHUNK)
            .map(|s| (s, (s + CHUNK).min(self.grid.len())))
            .collect();
        let partials: Vec<Result<Acc<T>>> = chunks
            .par_iter()
            .map(|&(lo, hi)| {
                let mut acc = Acc::new(nn, lp.len(), n_test);
                for j in lo..hi {
                    self.node(
                        j,
                        n_max,
                        &alpha,
                        &herglotz,
                        szego_pre.as_ref().zip(szego_boundary.as_ref()),
                        dual_pre.as_ref().zip(dual_boundary.as_ref()),
                        &lp,
                        cfg,
                        &mut acc,
                    )?;
                }
                Ok(acc)
            })
            .collect();
        let mut acc = Acc::new(nn, lp.len(), n_test);
        for p in partials {
            acc.merge(&p?);
        }

        let mut series: BTreeMap<String, Vec<(usize, f64)>> = BTreeMap::new();
        let mut res: BTreeMap<String, Vec<(usize, f64)>> = BTreeMap::new();
        let mut warnings = self.warnings.clone();
        let ns = 0..=n_max;
        let put = |map: &mut BTreeMap<String, Vec<(usize, f64)>>, k: &str, n: usize, v: f64| {
            map.entry(k.to_string()).or_default().push((n, v));
        };
        let energy: Vec<f64> = (0..nn).map(|n| (acc.sum[n][S_ENERGY] / m).as_f64()).collect();
        for n in ns.clone() {
            let g = self.params.gamma(n);
            put(&mut series, kinds::GAMMA_ABS, n, g.norm().as_f64());
            put(&mut series, kinds::GAMMA_RE, n, g.re.as_f64());
            put(&mut series, kinds::GAMMA_IM, n, g.im.as_f64());
            put(&mut series, kinds::OMEGA, n, self.params.omega(n).as_f64());
            put(&mut series, kinds::REMAINDER_ENERGY, n, energy[n]);
            let pseudo = (acc.sum[n][S_PSEUDO] / m).as_f64();
            put(&mut series, kinds::PSEUDO_ERROR, n, pseudo);
            put(&mut res, residuals::PSEUDO_VS_ENERGY, n, (pseudo - energy[n + 1]).abs());
            let hyper = if acc.overflow[n] > 0 {
                f64::INFINITY
            } else {
                (acc.sum[n][S_HYPER] / m).as_f64()
            };
            put(&mut series, kinds::HYPERBOLIC_ERROR, n, hyper);
            let logdef = (acc.sum[n][S_LOGDEF] / m).as_f64();
            put(&mut series, kinds::LOG_DEFECT, n, logdef);
            for (i, p) in cfg.lp_exponents.iter().enumerate() {
                let v = (acc.lp[n][i] / m).as_f64();
                put(&mut series, &kinds::lp(*p), n, v);
                if (*p - 2.0).abs() < 1e-15 {
                    put(&mut res, residuals::LP_CHAIN, n, (v - 4.0 * energy[n + 1]).max(0.0));
                }
            }
            put(&mut series, kinds::SUP_ERROR, n, acc.max[n][X_SUP].as_f64());
            put(&mut series, kinds::APPROXIMANT_MAX, n, acc.max[n][X_APPROX].as_f64());
            put(&mut series, kinds::REMAINDER_MAX, n, acc.max[n][X_REM].as_f64());
            put(&mut res, residuals::DETERMINANT, n, acc.max[n][X_DET].as_f64());
            put(&mut res, residuals::METRIC, n, acc.max[n][X_METRIC].as_f64());
            put(&mut res, residuals::BOUNDARY_ERROR, n, acc.max[n][X_BERR].as_f64());
            put(&mut res, residuals::NEVANLINNA, n, acc.max[n][X_NEV].as_f64());
            put(&mut res, residuals::ORF_POISSON, n, acc.max[n][X_POISSON].as_f64());
            put(&mut res, residuals::BRIDGE, n, acc.max[n][X_BRIDGE].as_f64());
            if n >= 1 {
                put(&mut res, residuals::ORF_RECURRENCE, n, acc.max[n][X_RECUR].as_f64());
            }
            if self.measure_ok {
                put(&mut res, residuals::MEASURE_RECONSTRUCTION, n, acc.max[n][X_RECON].as_f64());
                put(&mut series, kinds::BOUNDARY_UNIFORM_GAP, n, acc.max[n][X_BGAP].as_f64());
                put(&mut series, kinds::APRIORI_BOUND, n, acc.max[n][X_APRIORI].as_f64());
                put(&mut series, kinds::U_N_SUP, n, acc.max[n][X_USUP].as_f64());
                let gap = self.weakstar_targets(cfg.weakstar_degree)
                    .iter()
                    .zip(&acc.weak[n])
                    .fold(0f64, |a, (target, s)| a.max((*s / m - *target).norm().as_f64()));
                put(&mut series, kinds::WEAKSTAR_GAP, n, gap);
            }
        }
        if acc.overflow.iter().any(|c| *c > 0) {
            warnings.push("hyperbolic metric overflow (rho > 1 - 1e-15); value set to +inf".into());
        }

        let mut szego_summary = None;
        if let Some(pre) = &szego_pre {
            let mut max_q = 0f64;
            for n in ns.clone() {
                let q = pre.quantity[n].as_f64();
                max_q = max_q.max(q);
                put(&mut series, kinds::SZEGO_QUANTITY, n, q);
                put(&mut series, kinds::KAPPA, n, pre.kappa[n].as_f64());
                put(&mut series, kinds::SZEGO_L2_GAP, n, (acc.sum[n][S_L2] / m).sqrt().as_f64());
                put(&mut series, kinds::SZEGO_POINTWISE_GAP, n, pre.pointwise[n].as_f64());
                let logdef = (acc.sum[n][S_LOGDEF] / m).as_f64();
                put(&mut res, residuals::E7, n, (logdef - q.ln()).abs());
            }
            let bound_ok = max_q <= 1.0 + 1e-8;
            if !bound_ok {
                warnings.push(format!("Szegő quantity exceeds 1: max {max_q}"));
            }
            szego_summary = Some(SzegoSummary {
                clipped: self.szego.as_ref().map(|s| s.clipped()).unwrap_or(0),
                bound_ok,
                max_quantity: max_q,
                dual_available: dual_pre.is_some(),
            });
        }
        if let Some(pre) = &dual_pre {
            for n in ns.clone() {
                put(&mut series, kinds::DUAL_SZEGO_QUANTITY, n, pre.quantity[n].as_f64());
                put(&mut series, kinds::DUAL_SZEGO_L2_GAP, n, (acc.sum[n][S_L2_DUAL] / m).sqrt().as_f64());
            }
        }
        // Point masses make F singular on the circle; the quotient only holds for the ac part.
        if let (Some(s), Some((_, st)), true) = (&self.szego, &self.dual, self.measure.atoms().is_empty()) {
            let worst = s
                .boundary()
                .iter()
                .zip(st.boundary())
                .zip(&herglotz)
                .fold(0f64, |a, ((x, y), f)| {
                    a.max(crate::scalar::rel_diff(*x / *y, *f, T::lit(1e-300)).as_f64())
                });
            put(&mut res, residuals::FMUQUOT, 0, worst);
        }

        if self.measure_ok && cfg.geronimus {
            match orf_gram_schmidt(&self.measure, alphas, n_max + 1) {
                Ok((_, ger)) => {
                    for n in ns.clone() {
                        let d = (ger.gamma_tilde(n + 1) - self.params.gamma(n)).norm().as_f64();
                        put(&mut res, residuals::GERONIMUS, n, d);
                    }
                }
                Err(e) => warnings.push(format!("Gram-Schmidt: {e}")),
            }
        }

        if let Some(v) = series.get(kinds::APRIORI_BOUND) {
            let half = v.len() / 2;
            let first = v[..half.max(1)].iter().fold(0f64, |a, (_, x)| a.max(*x));
            let second = v[half..].iter().fold(0f64, |a, (_, x)| a.max(*x));
            if second > 10.0 * first + 1e-12 {
                warnings.push(format!(
                    "a-priori bound monitor grows: max {second:e} late vs {first:e} early"
                ));
            }
        }

        Ok(DiagnosticsReport {
            scenario: self.id.clone(),
            grid_m: self.grid.len(),
            n_max,
            series,
            residual_maxima: res,
            szego: szego_summary,
            warnings,
            resolution_refused: self.resolution_refused,
            hypotheses: Vec::new(),
        })
    }

    /// `int h dmu` for the weak-* test functions `1, Re t^j, Im t^j`.
    fn weakstar_targets(&self, degree: usize) -> Vec<C<T>> {
        let nodes = self.grid.nodes();
        test_functions(degree)
            .iter()
            .map(|h| {
                let vals: Vec<C<T>> = nodes.iter().map(|t| C::new(h(*t), T::zero())).collect();
                self.measure.integrate_with(&vals, |t| C::new(h(t), T::zero()))
            })
            .collect()
    }

    #[allow(clippy::too_many_arguments)]
    fn node(
        &self,
        j: usize,
        n_max: usize,
        alpha: &[C<T>],
        herglotz: &[C<T>],
        szego: Option<(&SzegoConstants<T>, &Vec<C<T>>)>,
        dual: Option<(&SzegoConstants<T>, &Vec<C<T>>)>,
        lp: &[T],
        cfg: &DiagnosticsConfig,
        acc: &mut Acc<T>,
    ) -> Result<()> {
        let one = c1::<T>();
        let t = self.grid.node(j);
        let theta = self.grid.angle(j).as_f64();
        let f0 = self.remainders[0][j];
        let poisson: Vec<T> = alpha.iter().map(|a| poisson_raw(t, *a)).collect();
        for n in 0..=n_max + 1 {
            let fnv = self.remainders[n][j];
            acc.sum[n][S_ENERGY] = acc.sum[n][S_ENERGY] + fnv.norm_sqr() * poisson[n];
            acc.sum[n][S_LOGDEF] = acc.sum[n][S_LOGDEF] + (T::one() - fnv.norm_sqr()).ln() * poisson[n];
        }
        let walls = wall_ladder(&self.params, &self.alphas, n_max, t)?;
        let orfs = orf_ladder(&self.params, &self.alphas, n_max + 1, t)?;
        let dual_orfs = match dual {
            Some(_) => Some(orf_ladder(&self.dual_params, &self.alphas, n_max, t)?),
            None => None,
        };
        let density = self.measure.density()[j];
        let big_f = herglotz[j];
        let in_boundary = cfg.boundary_arc.contains(theta);
        let in_apriori = cfg.apriori_arc.contains(theta);
        let tests = test_functions(cfg.weakstar_degree);
        let mut blaschke = one;
        for n in 0..=n_max {
            if n > 0 {
                blaschke = blaschke * zeta_unchecked(alpha[n], t);
            }
            let w = &walls[n];
            let r = w.ratio();
            let fn1 = self.remainders[n + 1][j];
            let p1 = poisson[n + 1];
            let row = &mut acc.sum[n];
            let r_rho = rho(f0, r);
            row[S_PSEUDO] = row[S_PSEUDO] + r_rho * r_rho * p1;
            match hyperbolic_from_rho(r_rho) {
                Some(h) => row[S_HYPER] = row[S_HYPER] + h * h * p1,
                None => acc.overflow[n] += 1,
            }
            let d = (f0 - r).norm();
            for (i, p) in lp.iter().enumerate() {
                acc.lp[n][i] = acc.lp[n][i] + d.powf(*p) * p1;
            }
            let mx = &mut acc.max[n];
            upd(&mut mx[X_SUP], d * p1.sqrt());
            upd(&mut mx[X_APPROX], r.norm().max((w.astar / w.b).norm()));
            upd(&mut mx[X_REM], self.remainders[n][j].norm());
            upd(&mut mx[X_DET], w.circle_det_residual(self.params.omega(n)));
            upd(&mut mx[X_METRIC], (r_rho - fn1.norm()).abs());
            upd(&mut mx[X_BERR], (d - fn1.norm() * (one - r * f0.conj()).norm()).abs());
            let zt = zeta(alpha[n + 1], t)? * fn1;
            let rec = (w.a + zt * w.bstar) / (w.b + zt * w.astar);
            upd(&mut mx[X_NEV], (rec - f0).norm());

            let o = &orfs[n];
            upd(&mut mx[X_POISSON], o.poisson_residual(blaschke, poisson[n]));
            upd(
                &mut mx[X_BRIDGE],
                bridge_from(w, &orfs[n + 1], alpha[n + 1], self.params.omega(n), t).max(),
            );
            if n >= 1 {
                let g = self.params.gamma(n - 1);
                upd(&mut mx[X_RECUR], recurrence_from(&orfs[n - 1], o, alpha[n], alpha[n - 1], g, t)?);
            }
            let [phi, phistar, _psi, psistar] = o.unscaled();
            if self.measure_ok {
                let fnv = self.remainders[n][j];
                let zn = zeta_unchecked(alpha[n], t);
                let recon = (T::one() - fnv.norm_sqr()) / (one - zn * (phi / phistar) * fnv).norm_sqr()
                    * poisson[n]
                    / phi.norm_sqr();
                let scale = density.max(recon).max(T::min_positive_value());
                upd(&mut mx[X_RECON], (density - recon).abs() / scale);
                let gap = (big_f * phistar - psistar).norm();
                if in_boundary {
                    upd(&mut mx[X_BGAP], gap);
                }
                if in_apriori {
                    upd(&mut mx[X_APRIORI], density * density * phi.norm_sqr() - density * poisson[n]);
                    upd(&mut mx[X_USUP], gap);
                }
                let weight = poisson[n] / phi.norm_sqr();
                for (s, h) in acc.weak[n].iter_mut().zip(&tests) {
                    *s = *s + C::new(h(t) * weight, T::zero());
                }
            }
            let row = &mut acc.sum[n];
            if let Some((pre, sb)) = szego {
                let target = pre.beta[n] * (T::one() - alpha[n].norm_sqr()).sqrt() / (one - alpha[n].conj() * t);
                row[S_L2] = row[S_L2] + (sb[j] * phistar - target).norm_sqr();
            }
            if let (Some((pre, sb)), Some(dl)) = (dual, &dual_orfs) {
                let ps = dl[n].unscaled()[1];
                let target = pre.beta[n] * (T::one() - alpha[n].norm_sqr()).sqrt() / (one - alpha[n].conj() * t);
                row[S_L2_DUAL] = row[S_L2_DUAL] + (sb[j] * ps - target).norm_sqr();
            }
        }
        Ok(())
    }
}

const CHUNK: usize = 128;

const S_ENERGY: usize = 0;
const S_PSEUDO: usize = 1;
const S_HYPER: usize = 2;
const S_LOGDEF: usize = 3;
const S_L2: usize = 4;
const S_L2_DUAL: usize = 5;
const NS: usize = 6;

const X_SUP: usize = 0;
const X_APPROX: usize = 1;
const X_REM: usize = 2;
const X_DET: usize = 3;
const X_METRIC: usize = 4;
const X_BERR: usize = 5;
const X_NEV: usize = 6;
const X_POISSON: usize = 7;
const X_BRIDGE: usize = 8;
const X_RECUR: usize = 9;
const X_RECON: usize = 10;
const X_BGAP: usize = 11;
const X_APRIORI: usize = 12;
const X_USUP: usize = 13;
const NX: usize = 14;

#[inline]
fn upd<T: Real>(slot: &mut T, v: T) {
    // NaN propagates so that broken identities are not hidden.
    if v.is_nan() || v > *slot {
        *slot = v;
    }
}

struct Acc<T: Real> {
    sum: Vec<[T; NS]>,
    max: Vec<[T; NX]>,
    lp: Vec<Vec<T>>,
    weak: Vec<Vec<C<T>>>,
    overflow: Vec<usize>,
}

impl<T: Real> Acc<T> {
    fn new(nn: usize, n_lp: usize, n_test: usize) -> Self {
        Self {
            sum: vec![[T::zero(); NS]; nn],
            max: vec![[T::neg_infinity(); NX]; nn],
            lp: vec![vec![T::zero(); n_lp]; nn],
            weak: vec![vec![C::new(T::zero(), T::zero()); n_test]; nn],
            overflow: vec![0; nn],
        }
    }

    fn merge(&mut self, o: &Self) {
        for n in 0..self.sum.len() {
            for i in 0..NS {
                self.sum[n][i] = self.sum[n][i] + o.sum[n][i];
            }
            for i in 0..NX {
                upd(&mut self.max[n][i], o.max[n][i]);
            }
            for (a, b) in self.lp[n].iter_mut().zip(&o.lp[n]) {
                *a = *a + *b;
            }
            for (a, b) in self.weak[n].iter_mut().zip(&o.weak[n]) {
                *a = *a + *b;
            }
            self.overflow[n] += o.overflow[n];
        }
    }
}

struct SzegoConstants<T: Real> {
    quantity: Vec<T>,
    kappa: Vec<T>,
    beta: Vec<C<T>>,
    pointwise: Vec<T>,
}

fn szego_constants<T: Real>(
    s: &SzegoFunction<T>,
    params: &SchurParams<T>,
    alphas: &AlphaSequence<T>,
    n_max: usize,
    cfg: &DiagnosticsConfig,
) -> SzegoConstants<T> {
    let one = c1::<T>();
    let zp = C::new(T::lit(cfg.pointwise_z.0), T::lit(cfg.pointwise_z.1));
    let sz = s.eval(zp);
    let mut out = SzegoConstants {
        quantity: Vec::with_capacity(n_max + 1),
        kappa: Vec::with_capacity(n_max + 1),
        beta: Vec::with_capacity(n_max + 1),
        pointwise: Vec::with_capacity(n_max + 1),
    };
    for n in 0..=n_max {
        let an = alphas.get(n);
        let phistar_a = orf_from_params(params, alphas, n, an)
            .map(|o| o.unscaled()[1])
            .unwrap_or(C::new(T::nan(), T::nan()));
        let sa = s.eval(an);
        let kappa = phistar_a.norm();
        let w = sa * phistar_a;
        let beta = w / w.norm();
        out.quantity.push(kappa * kappa * sa.norm_sqr() * (T::one() - an.norm_sqr()));
        out.kappa.push(kappa);
        out.beta.push(beta);
        let phistar_z = orf_from_params(params, alphas, n, zp)
            .map(|o| o.unscaled()[1])
            .unwrap_or(C::new(T::nan(), T::nan()));
        let target = beta * (T::one() - an.norm_sqr()).sqrt() / (one - an.conj() * zp);
        out.pointwise.push((sz * phistar_z - target).norm());
    }
    out
}

type TestFn<T> = Box<dyn Fn(C<T>) -> T + Send + Sync>;

/// `1, Re t, Im t, ..., Re t^d, Im t^d`.
fn test_functions<T: Real>(degree: usize) -> Vec<TestFn<T>> {
    let mut out: Vec<TestFn<T>> = vec![Box::new(|_| T::one())];
    for k in 1..=degree {
        let k = k as i32;
        out.push(Box::new(move |t: C<T>| t.powi(k).re));
        out.push(Box::new(move |t: C<T>| t.powi(k).im));
    }
    out
}

/// `int |f_n|^2 P(., alpha_n) dm` from grid samples of `f_n`.
pub fn remainder_energy<T: Real>(grid: &CircleGrid<T>, rem: &[C<T>], alpha_n: C<T>) -> T {
    weighted_mean(grid, alpha_n, rem.iter().map(|v| v.norm_sqr()))
}

/// `int rho(f, A_n/B_n)^2 P(., alpha_{n+1}) dm`.
pub fn pseudo_error<T: Real>(grid: &CircleGrid<T>, f: &[C<T>], approx: &[C<T>], alpha_next: C<T>) -> T {
    weighted_mean(grid, alpha_next, f.iter().zip(approx).map(|(a, b)| rho(*a, *b).powi(2)))
}

/// `int hyp(f, A_n/B_n)^2 P(., alpha_{n+1}) dm`; `+inf` on overflow.
pub fn hyperbolic_error<T: Real>(grid: &CircleGrid<T>, f: &[C<T>], approx: &[C<T>], alpha_next: C<T>) -> T {
    weighted_mean(
        grid,
        alpha_next,
        f.iter().zip(approx).map(|(a, b)| {
            hyperbolic_from_rho(rho(*a, *b))
                .map(|h| h * h)
                .unwrap_or_else(T::infinity)
        }),
    )
}

/// `int log(1 - |f_n|^2) P(., alpha_n) dm`.
pub fn log_defect<T: Real>(grid: &CircleGrid<T>, rem: &[C<T>], alpha_n: C<T>) -> T {
    weighted_mean(grid, alpha_n, rem.iter().map(|v| (T::one() - v.norm_sqr()).ln()))
}

/// `int |f - A_n/B_n|^p P(., alpha_{n+1}) dm`.
pub fn lp_error<T: Real>(grid: &CircleGrid<T>, f: &[C<T>], approx: &[C<T>], alpha_next: C<T>, p: T) -> T {
    weighted_mean(grid, alpha_next, f.iter().zip(approx).map(|(a, b)| (*a - *b).norm().powf(p)))
}

/// `max |f - A_n/B_n| sqrt(P(., alpha_{n+1}))` over the grid.
pub fn sup_error<T: Real>(grid: &CircleGrid<T>, f: &[C<T>], approx: &[C<T>], alpha_next: C<T>) -> T {
    grid.nodes()
        .iter()
        .zip(f.iter().zip(approx))
        .fold(T::zero(), |acc, (t, (a, b))| {
            acc.max((*a - *b).norm() * poisson_raw(*t, alpha_next).sqrt())
        })
}

/// `max_h |int h P(., alpha_n)/|phi_n|^2 dm - int h dmu|` over supplied test
/// functions given by their node values and atom evaluator.
pub fn weakstar_gap<T: Real, H>(
    mu: &CircleMeasure<T>,
    phi: &[C<T>],
    alpha_n: C<T>,
    tests: &[H],
) -> T
where
    H: Fn(C<T>) -> T,
{
    let grid = mu.grid();
    tests.iter().fold(T::zero(), |acc, h| {
        let lhs = weighted_mean(
            grid,
            alpha_n,
            grid.nodes().iter().zip(phi).map(|(t, p)| h(*t) / p.norm_sqr()),
        );
        let vals: Vec<C<T>> = grid.nodes().iter().map(|t| C::new(h(*t), T::zero())).collect();
        let rhs = mu.integrate_with(&vals, |t| C::new(h(t), T::zero())).re;
        acc.max((lhs - rhs).abs())
    })
}

/// `max_{t in I} |F_mu(t) phi_n*(t) - psi_n*(t)|`.
pub fn boundary_uniform_gap<T: Real>(
    mu: &CircleMeasure<T>,
    phistar: &[C<T>],
    psistar: &[C<T>],
    arc: &CircleArc,
) -> T {
    let f = mu.herglotz_boundary_all();
    let grid = mu.grid();
    (0..grid.len())
        .filter(|j| arc.contains(grid.angle(*j).as_f64()))
        .fold(T::zero(), |acc, j| acc.max((f[j] * phistar[j] - psistar[j]).norm()))
}

fn weighted_mean<T: Real>(grid: &CircleGrid<T>, w: C<T>, vals: impl Iterator<Item = T>) -> T {
    let sum = grid
        .nodes()
        .iter()
        .zip(vals)
        .fold(T::zero(), |acc, (t, v)| acc + v * poisson_raw(*t, w));
    sum / T::nat(grid.len())
}

/// A point on the circle at angle `theta`.
pub fn circle_point<T: Real>(theta: T) -> C<T> {
    cis(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schur::AlphaGenerator;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_function_all_errors_vanish() {
        let f = SchurFunction::constant(c(0.0, 0.0)).unwrap();
        let alphas = AlphaSequence::generate(AlphaGenerator::Radial { theta: 0.0, c: 1.0 }, 12).unwrap();
        let st = ScenarioState::new("zero", f, alphas, 1024, 8).unwrap();
        let r = st.report(&DiagnosticsConfig::new(8)).unwrap();
        for kind in [kinds::REMAINDER_ENERGY, kinds::PSEUDO_ERROR, kinds::HYPERBOLIC_ERROR, kinds::SUP_ERROR] {
            for (_, v) in r.series(kind).unwrap() {
                assert_eq!(*v, 0.0, "{kind}");
            }
        }
        for (_, q) in r.series(kinds::SZEGO_QUANTITY).unwrap() {
            assert!((q - 1.0).abs() < 1e-12);
        }
        for (_, v) in r.series(kinds::APRIORI_BOUND).unwrap() {
            assert!(v.abs() < 1e-10);
        }
        for (_, v) in r.series(kinds::BOUNDARY_UNIFORM_GAP).unwrap() {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn constant_function_classical() {
        let f = SchurFunction::constant(c(0.4, 0.1)).unwrap();
        let alphas = AlphaSequence::generate(AlphaGenerator::Classical, 10).unwrap();
        let st = ScenarioState::new("c", f, alphas, 512, 6).unwrap();
        let r = st.report(&DiagnosticsConfig::new(6)).unwrap();
        for (n, v) in r.series(kinds::REMAINDER_ENERGY).unwrap() {
            if *n >= 1 {
                assert!(v.abs() < 1e-28);
            }
        }
        for (_, v) in r.series(&kinds::lp(2.0)).unwrap() {
            assert!(v.abs() < 1e-28);
        }
    }

    #[test]
    fn half_z_identities() {
        let f = SchurFunction::scaled_identity(c(0.5, 0.0)).unwrap();
        let alphas = AlphaSequence::generate(AlphaGenerator::Radial { theta: 0.0, c: 1.0 }, 20).unwrap();
        let st = ScenarioState::new("h", f, alphas, 4096, 12).unwrap();
        let r = st.report(&DiagnosticsConfig::new(12)).unwrap();
        assert!(r.warnings.is_empty(), "{:?}", r.warnings);
        assert!(r.residual_max(residuals::PSEUDO_VS_ENERGY).unwrap() < 1e-12);
        assert!(r.residual_max(residuals::METRIC).unwrap() < 1e-9);
        assert!(r.residual_max(residuals::E7).unwrap() < 1e-6);
        assert!(r.residual_max(residuals::GERONIMUS).unwrap() < 1e-7);
        assert!(r.residual_max(residuals::MEASURE_RECONSTRUCTION).unwrap() < 1e-7);
        assert!(r.residual_max(residuals::ORF_POISSON).unwrap() < 1e-8);
        assert!(r.residual_max(residuals::FMUQUOT).unwrap() < 1e-6);
        // building blocks agree with the accumulated pass
        let n = 3;
        let approx = st.approximant_samples(n).unwrap();
        let pe = pseudo_error(&st.grid, &st.remainders[0], &approx, st.alphas.get(n + 1));
        assert!((pe - r.value(kinds::PSEUDO_ERROR, n).unwrap()).abs() < 1e-14);
        let en = remainder_energy(&st.grid, &st.remainders[n], st.alphas.get(n));
        assert!((en - r.value(kinds::REMAINDER_ENERGY, n).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn arcs() {
        let a = CircleArc::new(-1.0, 1.0).unwrap();
        assert!(a.contains(0.5));
        assert!(a.contains(std::f64::consts::TAU - 0.5));
        assert!(!a.contains(2.0));
        assert!(CircleArc::new(1.0, 1.0).is_err());
    }
}
