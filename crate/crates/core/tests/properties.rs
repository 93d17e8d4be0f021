use mps_orf::geometry::{rho, zeta};
use mps_orf::output::{format_value, parse_series_csv, series_csv};
use mps_orf::scenario::parse_config;
use mps_orf::schur::{compose_taus, remainders_on_grid, schur_parameters, schur_parameters_with, SchurMethod};
use mps_orf::wall::{approximant, euler_convergents, reconstruct_f, wall_ladder};
use mps_orf::{AlphaSequence, CircleGrid, SchurFunction, SchurParams};
use num_complex::{Complex, Complex64};
use proptest::prelude::*;

fn disk(r: f64) -> impl Strategy<Value = Complex64> {
    (0.0..r, 0.0..std::f64::consts::TAU).prop_map(|(m, a)| Complex64::from_polar(m, a))
}

fn alphas(len: usize) -> impl Strategy<Value = AlphaSequence<f64>> {
    prop::collection::vec(disk(0.8), len).prop_map(|mut v| {
        v.insert(0, Complex64::new(0.0, 0.0));
        AlphaSequence::from_points(v).unwrap()
    })
}

/// `(a + b z) / (1 - c z)` with `|a| + |b| <= 0.5`, `|c| <= 0.5`.
fn mobius_like() -> impl Strategy<Value = SchurFunction<f64>> {
    (disk(0.25), disk(0.25), disk(0.5)).prop_map(|(a, b, c)| {
        SchurFunction::rational(vec![a, b], vec![Complex64::new(1.0, 0.0), -c], 256).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rho_is_automorphism_invariant(z in disk(0.9), w in disk(0.9), a in disk(0.9), phi in 0.0..6.3f64) {
        let m = |x: Complex64| Complex64::from_polar(1.0, phi) * (x - a) / (1.0 - a.conj() * x);
        prop_assert!((rho(m(z), m(w)) - rho(z, w)).abs() <= 1e-12);
    }

    #[test]
    fn omegas_decrease_in_unit_interval(gs in prop::collection::vec(disk(0.95), 1..40)) {
        let p = SchurParams::new(gs).unwrap();
        let o = p.omegas();
        prop_assert!(o.iter().all(|w| *w > 0.0 && *w <= 1.0));
        prop_assert!(o.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn determinant_on_circle(gs in prop::collection::vec(disk(0.9), 13), a in alphas(14), theta in 0.0..6.3f64) {
        let p = SchurParams::new(gs).unwrap();
        let t = Complex64::from_polar(1.0, theta);
        for (n, w) in wall_ladder(&p, &a, 12, t).unwrap().iter().enumerate() {
            prop_assert!(w.circle_det_residual(p.omega(n)) <= 1e-10);
        }
    }

    #[test]
    fn euler_matches_transfer(gs in prop::collection::vec(disk(0.9), 11), a in alphas(12), z in disk(0.99)) {
        let p = SchurParams::new(gs).unwrap();
        let e = euler_convergents(&p, &a, 10, z).unwrap();
        for (n, w) in wall_ladder(&p, &a, 10, z).unwrap().iter().enumerate() {
            let [aa, bb, _, _] = w.unscaled();
            let scale = aa.norm().max(bb.norm());
            prop_assert!((e.p_at(2 * n as isize) - aa).norm() <= 1e-10 * scale);
            prop_assert!((e.q_at(2 * n as isize) - bb).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn remainders_stay_schur(f in mobius_like(), a in alphas(10)) {
        let grid = CircleGrid::new(256).unwrap();
        let (p, rem) = schur_parameters_with(&f, &a, 8, &grid, SchurMethod::Auto).unwrap();
        prop_assert!(p.gammas().iter().all(|g| g.norm() < 1.0));
        for r in &rem {
            prop_assert!(r.iter().all(|v| v.norm() <= 1.0 + 1e-8));
        }
    }

    #[test]
    fn approximant_interpolates(f in mobius_like(), a in alphas(8)) {
        let p = schur_parameters(&f, &a, 6).unwrap();
        for i in 1..=7 {
            let x = a.get(i);
            let d = (approximant(&p, &a, 6, x).unwrap() - f.eval(x).unwrap()).norm();
            prop_assert!(d * (1.0 - x.norm()) <= 1e-9, "i = {i}: {d}");
        }
    }

    #[test]
    fn taus_undo_the_recurrence(f in mobius_like(), a in alphas(8)) {
        let grid = CircleGrid::new(256).unwrap();
        let p = schur_parameters(&f, &a, 6).unwrap();
        let rem = remainders_on_grid(&f, &a, &p, 7, &grid).unwrap();
        for (j, t) in grid.nodes().iter().enumerate().step_by(17) {
            let back = compose_taus(&p, &a, 6, rem[7][j], *t).unwrap();
            prop_assert!((back - rem[0][j]).norm() <= 1e-9);
            let via_wall = reconstruct_f(&p, &a, 6, *t, rem[7][j]).unwrap();
            prop_assert!((via_wall - rem[0][j]).norm() <= 1e-9);
        }
    }

    #[test]
    fn csv_values_round_trip(vs in prop::collection::vec(any::<f64>(), 0..20)) {
        let series: Vec<(usize, f64)> = vs.into_iter().enumerate().collect();
        let back = parse_series_csv(&series_csv(&series)).unwrap();
        prop_assert_eq!(back.len(), series.len());
        for ((n, a), (m, b)) in series.iter().zip(&back) {
            prop_assert_eq!(n, m);
            prop_assert!(a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()), "{}", format_value(*a));
        }
    }

    #[test]
    fn grid_size_must_be_power_of_two(m in 0usize..100_000) {
        let text = format!(
            r#"{{"id": "x", "function": {{"kind": "constant", "value": [0.0, 0.0]}},
                "alphas": {{"kind": "classical"}}, "M": {m}, "n_max": 2}}"#
        );
        let ok = parse_config(&text).is_ok();
        prop_assert_eq!(ok, m.is_power_of_two() && m >= 256);
    }
}

#[test]
fn single_precision_tracks_double() {
    let f64_f = SchurFunction::scaled_identity(Complex64::new(0.5, 0.0)).unwrap();
    let f32_f = SchurFunction::scaled_identity(Complex::<f32>::new(0.5, 0.0)).unwrap();
    let pts = [0.0, 0.3, -0.2, 0.5, 0.1];
    let a64 = AlphaSequence::from_points(pts.iter().map(|x| Complex64::new(*x, 0.1 * x)).collect()).unwrap();
    let a32 = AlphaSequence::from_points(pts.iter().map(|x| Complex::<f32>::new(*x as f32, 0.1 * *x as f32)).collect())
        .unwrap();
    let p64 = schur_parameters(&f64_f, &a64, 3).unwrap();
    let p32 = schur_parameters(&f32_f, &a32, 3).unwrap();
    for (g, h) in p64.gammas().iter().zip(p32.gammas()) {
        assert!((g - Complex64::new(h.re as f64, h.im as f64)).norm() < 1e-5);
    }
    assert!((zeta(Complex::<f32>::new(0.3, 0.0), Complex::new(0.3, 0.0)).unwrap()).norm() < 1e-7);
}

#[test]
fn inner_function_remainders_stay_unimodular() {
    use mps_orf::AlphaGenerator;
    let f = SchurFunction::<f64>::singular_inner(0.0, 1.0).unwrap();
    let a = AlphaSequence::generate(AlphaGenerator::Radial { theta: 0.0, c: 1.0 }, 42).unwrap();
    let grid = CircleGrid::new(4096).unwrap();
    let (_, rem) = schur_parameters_with(&f, &a, 40, &grid, SchurMethod::Auto).unwrap();
    for (k, r) in rem.iter().enumerate() {
        // node 0 sits on the singularity, where the radial limit is 0
        let dev = r[1..].iter().fold(0f64, |m, v| m.max((v.norm() - 1.0).abs()));
        assert!(dev <= 1e-12, "f_{k}: ||f| - 1| = {dev:.3e}");
    }
}
