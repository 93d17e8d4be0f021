//! Scenario configuration: JSON loading, validation and the built-in library.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{CircleArc, DiagnosticsConfig, DiagnosticsReport, ScenarioState};
use crate::error::{Error, Result};
use crate::measure::{Atom, CircleMeasure, CircleMeasureJson, MIN_GRID};
use crate::schur::{AlphaGenerator, AlphaSequence, BlaschkeSum, SchurFunction, SchurMethod};

/// Complex number as `[re, im]`.
pub type Pair = [f64; 2];

fn cx(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

/// Schur function specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Constant { value: Pair },
    ScaledIdentity { lambda: Pair },
    Rational { num: Vec<Pair>, den: Vec<Pair> },
    SingularInner { theta: f64, mass: f64 },
    Product { factors: Vec<FunctionSpec> },
    Composition { outer: Box<FunctionSpec>, inner: Box<FunctionSpec> },
    Mixture { base: Box<FunctionSpec>, atoms: Vec<Atom<f64>> },
    Measure { measure: CircleMeasureJson },
}

impl FunctionSpec {
    pub fn build(&self, m: usize) -> Result<SchurFunction<f64>> {
        Ok(match self {
            FunctionSpec::Constant { value } => SchurFunction::constant(cx(*value))?,
            FunctionSpec::ScaledIdentity { lambda } => SchurFunction::scaled_identity(cx(*lambda))?,
            FunctionSpec::Rational { num, den } => SchurFunction::rational(
                num.iter().map(|p| cx(*p)).collect(),
                den.iter().map(|p| cx(*p)).collect(),
                4 * m,
            )?,
            FunctionSpec::SingularInner { theta, mass } => SchurFunction::singular_inner(*theta, *mass)?,
            FunctionSpec::Product { factors } => {
                let mut it = factors.iter();
                let first = it
                    .next()
                    .ok_or_else(|| Error::Validation("product needs at least one factor".into()))?
                    .build(m)?;
                it.try_fold(first, |acc, f| {
                    Ok::<_, Error>(SchurFunction::Product(Box::new(acc), Box::new(f.build(m)?)))
                })?
            }
            FunctionSpec::Composition { outer, inner } => SchurFunction::Composition {
                outer: Box::new(outer.build(m)?),
                inner: Box::new(inner.build(m)?),
            },
            FunctionSpec::Mixture { base, atoms } => SchurFunction::mixture(base.build(m)?, atoms.clone())?,
            FunctionSpec::Measure { measure } => {
                if measure.m != m {
                    return Err(Error::Validation(format!(
                        "measure is sampled on M = {}, scenario M = {m}",
                        measure.m
                    )));
                }
                SchurFunction::Measure(Arc::new(CircleMeasure::try_from(measure.clone())?))
            }
        })
    }
}

/// Interpolation-node generator specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlphaSpec {
    Classical,
    CompactCircle { r: f64, theta_step: f64 },
    /// `alpha_k = (1 - c/(k+1)) exp(i theta)`.
    Radial {
        #[serde(default)]
        theta: f64,
        #[serde(default = "one")]
        c: f64,
    },
    Nontangential {
        #[serde(default)]
        theta: f64,
        #[serde(default = "one")]
        c: f64,
        aperture: f64,
    },
    Cycle { points: Vec<Pair> },
    Explicit { points: Vec<Pair> },
}

fn one() -> f64 {
    1.0
}

impl AlphaSpec {
    pub fn generator(&self) -> AlphaGenerator<f64> {
        match self {
            AlphaSpec::Classical => AlphaGenerator::Classical,
            AlphaSpec::CompactCircle { r, theta_step } => AlphaGenerator::CompactCircle {
                r: *r,
                theta_step: *theta_step,
            },
            AlphaSpec::Radial { theta, c } => AlphaGenerator::Radial { theta: *theta, c: *c },
            AlphaSpec::Nontangential { theta, c, aperture } => AlphaGenerator::Nontangential {
                theta: *theta,
                c: *c,
                aperture: *aperture,
            },
            AlphaSpec::Cycle { points } => AlphaGenerator::Cycle(points.iter().map(|p| cx(*p)).collect()),
            AlphaSpec::Explicit { points } => AlphaGenerator::Explicit(points.iter().map(|p| cx(*p)).collect()),
        }
    }

    pub fn build(&self, count: usize) -> Result<AlphaSequence<f64>> {
        AlphaSequence::generate(self.generator(), count)
    }
}

/// Parameter extraction method as written in configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodSpec {
    #[default]
    Auto,
    Evaluation,
    Boundary,
}

impl From<MethodSpec> for SchurMethod {
    fn from(m: MethodSpec) -> Self {
        match m {
            MethodSpec::Auto => SchurMethod::Auto,
            MethodSpec::Evaluation => SchurMethod::Evaluation,
            MethodSpec::Boundary => SchurMethod::Boundary,
        }
    }
}

/// One scenario as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    pub function: FunctionSpec,
    pub alphas: AlphaSpec,
    #[serde(rename = "M")]
    pub m: usize,
    pub n_max: usize,
    /// Series kinds to emit; all when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
    /// Which hypotheses the scenario claims, as free text.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hypotheses: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lp_exponents: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_arc: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub apriori_arc: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pointwise_z: Option<Pair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weakstar_degree: Option<usize>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub method: MethodSpec,
}

fn is_default(m: &MethodSpec) -> bool {
    *m == MethodSpec::Auto
}

/// Every series kind a report can contain for `lp_exponents`.
pub fn known_kinds(lp_exponents: &[f64]) -> Vec<String> {
    use crate::diagnostics::kinds::*;
    let mut v: Vec<String> = [
        GAMMA_ABS,
        GAMMA_RE,
        GAMMA_IM,
        OMEGA,
        REMAINDER_ENERGY,
        PSEUDO_ERROR,
        HYPERBOLIC_ERROR,
        LOG_DEFECT,
        SUP_ERROR,
        APPROXIMANT_MAX,
        REMAINDER_MAX,
        SZEGO_QUANTITY,
        SZEGO_L2_GAP,
        SZEGO_POINTWISE_GAP,
        DUAL_SZEGO_QUANTITY,
        DUAL_SZEGO_L2_GAP,
        WEAKSTAR_GAP,
        BOUNDARY_UNIFORM_GAP,
        APRIORI_BOUND,
        U_N_SUP,
        KAPPA,
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    v.extend(lp_exponents.iter().map(|p| lp(*p)));
    v
}

impl Scenario {
    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(format!("{}: {m}", self.id)));
        if self.id.is_empty() || self.id.contains(['/', '\\']) || self.id.starts_with('.') {
            return bad(format!("id {:?} is not a plain file stem", self.id));
        }
        if self.n_max < 1 {
            return bad("n_max must be at least 1".into());
        }
        if self.m < MIN_GRID || !self.m.is_power_of_two() {
            return bad(format!("M = {} must be a power of two and at least {MIN_GRID}", self.m));
        }
        for (name, arc) in [("boundary_arc", self.boundary_arc), ("apriori_arc", self.apriori_arc)] {
            if let Some([a, b]) = arc {
                if !(a < b) {
                    return bad(format!("{name} [{a}, {b}] needs theta1 < theta2"));
                }
            }
        }
        if let Some(ps) = &self.lp_exponents {
            if ps.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
                return bad("lp exponents must be positive".into());
            }
        }
        if let Some(z) = self.pointwise_z {
            if !(z[0].hypot(z[1]) < 1.0) {
                return bad("pointwise_z must lie in the open disk".into());
            }
        }
        if let Some(sel) = &self.diagnostics {
            let known = known_kinds(&self.lp());
            if let Some(k) = sel.iter().find(|k| !known.contains(k)) {
                return bad(format!("unknown diagnostic {k:?}"));
            }
        }
        Ok(())
    }

    fn lp(&self) -> Vec<f64> {
        self.lp_exponents.clone().unwrap_or_else(|| vec![2.0])
    }

    pub fn diagnostics_config(&self) -> DiagnosticsConfig {
        let mut cfg = DiagnosticsConfig::new(self.n_max);
        cfg.lp_exponents = self.lp();
        if let Some([a, b]) = self.boundary_arc {
            cfg.boundary_arc = CircleArc { start: a, end: b };
        }
        if let Some([a, b]) = self.apriori_arc {
            cfg.apriori_arc = CircleArc { start: a, end: b };
        }
        if let Some(z) = self.pointwise_z {
            cfg.pointwise_z = (z[0], z[1]);
        }
        if let Some(d) = self.weakstar_degree {
            cfg.weakstar_degree = d;
        }
        cfg
    }

    /// Nodes `alpha_0 ..= alpha_{n_max+2}`.
    pub fn alpha_sequence(&self) -> Result<AlphaSequence<f64>> {
        self.alphas.build(self.n_max + 2)
    }

    pub fn blaschke_sum(&self) -> Result<BlaschkeSum> {
        Ok(self.alpha_sequence()?.blaschke_sum())
    }

    /// Builds the shared state, attaching the scenario id to failures.
    pub fn state(&self) -> Result<ScenarioState<f64>> {
        self.validate()?;
        let wrap = |e: Error| {
            let n = match &e {
                Error::FiniteBlaschkeDetected { k, .. } | Error::DerivativeUnavailable { k } => Some(*k),
                _ => None,
            };
            Error::Scenario {
                id: self.id.clone(),
                n,
                source: Box::new(e),
            }
        };
        let f = self.function.build(self.m).map_err(wrap)?;
        let alphas = self.alpha_sequence().map_err(wrap)?;
        ScenarioState::with_method(&self.id, f, alphas, self.m, self.n_max, self.method.into()).map_err(wrap)
    }

    /// Full pipeline without writing anything. Under-resolved scenarios
    /// run anyway and carry the warning; see [`Scenario::run_guarded`].
    pub fn run(&self) -> Result<DiagnosticsReport> {
        let state = self.state()?;
        self.report_from(&state)
    }

    /// Like [`Scenario::run`], but returns `None` without computing any
    /// series when `M (1 - |alpha_n|) < 50` for some `n` and `force` is off.
    pub fn run_guarded(&self, force: bool) -> Result<Outcome> {
        let state = self.state()?;
        if state.resolution_refused && !force {
            return Ok(Outcome::Refused(state.warnings.clone()));
        }
        Ok(Outcome::Report(Box::new(self.report_from(&state)?)))
    }

    fn report_from(&self, state: &ScenarioState<f64>) -> Result<DiagnosticsReport> {
        let mut report = state.report(&self.diagnostics_config()).map_err(|e| Error::Scenario {
            id: self.id.clone(),
            n: None,
            source: Box::new(e),
        })?;
        if let Some(sel) = &self.diagnostics {
            report.retain_series(sel);
        }
        report.hypotheses = self.hypotheses.clone();
        Ok(report)
    }
}

/// Result of a guarded run.
#[derive(Debug, Clone)]
pub enum Outcome {
    Report(Box<DiagnosticsReport>),
    /// Resolution guard tripped; the warnings say where.
    Refused(Vec<String>),
}

/// Runs scenarios on a pool of `jobs` threads (all cores when `None`).
/// Results come back in input order.
pub fn run_all(scenarios: &[Scenario], jobs: Option<usize>, force: bool) -> Result<Vec<Result<Outcome>>> {
    use rayon::prelude::*;
    let pool = thread_pool(jobs)?;
    Ok(pool.install(|| scenarios.par_iter().map(|s| s.run_guarded(force)).collect()))
}

/// Thread pool of `jobs` workers (all cores when `None`).
pub fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        b = b.num_threads(j.max(1));
    }
    b.build().map_err(|e| Error::Io(e.to_string()))
}

/// A config file holds one scenario or a list.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ConfigFile {
    One(Box<Scenario>),
    Many(Vec<Scenario>),
}

/// Parses and validates config text.
pub fn parse_config(text: &str) -> Result<Vec<Scenario>> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(parse_error)?;
    // Untagged enums swallow field errors; dispatch by shape instead.
    let list: Vec<Scenario> = if v.is_array() {
        serde_json::from_str::<Vec<Scenario>>(text).map_err(parse_error)?
    } else {
        match serde_json::from_str::<ConfigFile>(text) {
            Ok(ConfigFile::One(s)) => vec![*s],
            Ok(ConfigFile::Many(v)) => v,
            Err(_) => vec![serde_json::from_str::<Scenario>(text).map_err(parse_error)?],
        }
    };
    if list.is_empty() {
        return Err(Error::Validation("config lists no scenarios".into()));
    }
    for s in &list {
        s.validate()?;
    }
    let mut ids: Vec<&str> = list.iter().map(|s| s.id.as_str()).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Validation(format!("duplicate scenario id {:?}", w[0])));
    }
    Ok(list)
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

pub fn load_config(path: &Path) -> Result<Vec<Scenario>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 5] = [
    "lebesgue",
    "half-z-classical",
    "half-z-radial",
    "atom-plus-smooth",
    "inner-stress",
];

fn base(id: &str, function: FunctionSpec, alphas: AlphaSpec, n_max: usize) -> Scenario {
    Scenario {
        id: id.into(),
        function,
        alphas,
        m: 4096,
        n_max,
        diagnostics: None,
        out_dir: None,
        hypotheses: Vec::new(),
        lp_exponents: None,
        boundary_arc: None,
        apriori_arc: None,
        pointwise_z: None,
        weakstar_degree: None,
        method: MethodSpec::Auto,
    }
}

fn half_z() -> FunctionSpec {
    FunctionSpec::ScaledIdentity { lambda: [0.5, 0.0] }
}

fn radial() -> AlphaSpec {
    AlphaSpec::Radial { theta: 0.0, c: 1.0 }
}

/// The acceptance scenarios, by name.
pub fn builtin(name: &str) -> Option<Scenario> {
    let s = match name {
        "lebesgue" => {
            let mut s = base(name, FunctionSpec::Constant { value: [0.0, 0.0] }, radial(), 40);
            s.hypotheses = vec!["e04: radial nodes, harmonic divergence".into(), "mu = Lebesgue, Szego".into()];
            s
        }
        "half-z-classical" => {
            let mut s = base(name, half_z(), AlphaSpec::Classical, 12);
            s.hypotheses = vec!["classical nodes alpha_k = 0".into(), "mu' = 3/|2 - t|^2 > 0".into()];
            s
        }
        "half-z-radial" => {
            let mut s = base(name, half_z(), radial(), 40);
            s.lp_exponents = Some(vec![2.0, 4.0, 6.0]);
            s.hypotheses = vec![
                "e04: 1 - |alpha_k| = 1/(k+1)".into(),
                "e08-e083: mu' smooth and positive near Acc(alpha) = {1}".into(),
                "mu in (S)".into(),
            ];
            s
        }
        "atom-plus-smooth" => {
            let mut s = base(
                name,
                FunctionSpec::Mixture {
                    base: Box::new(half_z()),
                    atoms: vec![Atom { theta: PI, mass: 0.2 }],
                },
                radial(),
                40,
            );
            // K stays clear of the atom at -1 and of the accumulation point 1.
            s.apriori_arc = Some([FRAC_PI_2, 2.5]);
            s.hypotheses = vec![
                "e04: radial nodes".into(),
                "mu_s = 0.2 delta_{-1}, away from Acc(alpha) = {1}".into(),
            ];
            s
        }
        "inner-stress" => {
            let mut s = base(name, FunctionSpec::SingularInner { theta: 0.0, mass: 1.0 }, radial(), 40);
            s.hypotheses = vec![
                "|f| = 1 a.e.: Erdos condition fails at Acc(alpha) = {1}".into(),
                "f sampled on the grid".into(),
            ];
            s
        }
        _ => return None,
    };
    Some(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_loads() {
        let s = parse_config(
            r#"{"id":"t","function":{"kind":"constant","value":[0,0]},"alphas":{"kind":"classical"},"M":1024,"n_max":5}"#,
        )
        .unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].m, 1024);
    }

    #[test]
    fn list_config_loads() {
        let s = parse_config(
            r#"[{"id":"a","function":{"kind":"constant","value":[0,0]},"alphas":{"kind":"classical"},"M":256,"n_max":1},
                {"id":"b","function":{"kind":"scaled_identity","lambda":[0.5,0]},"alphas":{"kind":"radial"},"M":512,"n_max":2}]"#,
        )
        .unwrap();
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn non_power_of_two_rejected() {
        let e = parse_config(
            r#"{"id":"t","function":{"kind":"constant","value":[0,0]},"alphas":{"kind":"classical"},"M":1000,"n_max":5}"#,
        )
        .unwrap_err();
        assert!(matches!(e, Error::Validation(_)), "{e}");
    }

    #[test]
    fn unknown_key_rejected_with_position() {
        let e = parse_config(
            r#"{"id":"t","function":{"kind":"constant","value":[0,0]},"alphas":{"kind":"classical"},
"M":1024,"n_max":5,"bogus":1}"#,
        )
        .unwrap_err();
        match e {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("bogus"));
            }
            other => panic!("{other}"),
        }
        let e = parse_config(
            r#"{"id":"t","function":{"kind":"constant","value":[0,0],"extra":2},"alphas":{"kind":"classical"},"M":1024,"n_max":5}"#,
        )
        .unwrap_err();
        assert!(matches!(e, Error::Parse { .. }));
    }

    #[test]
    fn other_invariants() {
        let mut s = builtin("half-z-radial").unwrap();
        s.n_max = 0;
        assert!(s.validate().is_err());
        let mut s = builtin("half-z-radial").unwrap();
        s.boundary_arc = Some([1.0, 0.5]);
        assert!(s.validate().is_err());
        let mut s = builtin("half-z-radial").unwrap();
        s.diagnostics = Some(vec!["nope".into()]);
        assert!(s.validate().is_err());
        let mut s = builtin("half-z-radial").unwrap();
        s.id = "../x".into();
        assert!(s.validate().is_err());
    }

    #[test]
    fn radial_generator_declared_divergent() {
        let s = parse_config(
            r#"{"id":"r","function":{"kind":"constant","value":[0,0]},"alphas":{"kind":"radial","theta":0.3,"c":1},"M":1024,"n_max":5}"#,
        )
        .unwrap();
        let a = s[0].alpha_sequence().unwrap();
        for k in 1..=6 {
            let want = Complex64::from_polar(1.0 - 1.0 / (k as f64 + 1.0), 0.3);
            assert!((a.get(k) - want).norm() < 1e-15);
        }
        assert_eq!(s[0].blaschke_sum().unwrap(), BlaschkeSum::Divergent);
    }

    #[test]
    fn builtins_validate_and_round_trip() {
        for name in BUILTIN_NAMES {
            let s = builtin(name).unwrap();
            s.validate().unwrap();
            let text = serde_json::to_string(&s).unwrap();
            assert_eq!(parse_config(&text).unwrap()[0], s);
        }
        assert!(builtin("nope").is_none());
    }

    #[test]
    fn half_z_classical_gammas() {
        let mut s = builtin("half-z-classical").unwrap();
        s.n_max = 5;
        s.m = 1024;
        let r = s.run().unwrap();
        let g: Vec<f64> = r.series(crate::diagnostics::kinds::GAMMA_ABS).unwrap().iter().map(|x| x.1).collect();
        let want = [0.0, 0.5, 0.0, 0.0, 0.0, 0.0];
        for (a, b) in g.iter().zip(want) {
            assert!((a - b).abs() < 1e-15, "{g:?}");
        }
    }

    #[test]
    fn resolution_guard() {
        let mut s = builtin("half-z-radial").unwrap();
        s.m = 512;
        s.n_max = 20;
        match s.run_guarded(false).unwrap() {
            Outcome::Refused(w) => assert!(w.iter().any(|x| x.contains("under-resolved"))),
            Outcome::Report(_) => panic!("expected refusal"),
        }
        match s.run_guarded(true).unwrap() {
            Outcome::Report(r) => assert!(r.resolution_refused),
            Outcome::Refused(_) => panic!("force ignored"),
        }
        s.n_max = 5;
        assert!(matches!(s.run_guarded(false).unwrap(), Outcome::Report(_)));
    }

    #[test]
    fn run_all_keeps_order() {
        let mut a = builtin("lebesgue").unwrap();
        a.m = 256;
        a.n_max = 2;
        let mut b = a.clone();
        b.id = "b".into();
        b.n_max = 3;
        let out = run_all(&[a, b], Some(2), false).unwrap();
        let ids: Vec<String> = out
            .into_iter()
            .map(|o| match o.unwrap() {
                Outcome::Report(r) => r.scenario,
                Outcome::Refused(_) => panic!(),
            })
            .collect();
        assert_eq!(ids, ["lebesgue", "b"]);
    }

    #[test]
    fn selection_limits_series() {
        let mut s = builtin("lebesgue").unwrap();
        s.m = 1024;
        s.n_max = 3;
        s.diagnostics = Some(vec!["remainder_energy".into()]);
        let r = s.run().unwrap();
        assert_eq!(r.series.len(), 1);
        assert_eq!(r.series["remainder_energy"].len(), 4);
    }
}
