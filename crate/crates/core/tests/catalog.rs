use std::f64::consts::PI;

use emz_spectral::catalog::{
    eigen_residuals, eigensolve, ordered_rep_data, subspectrum, vector_spectral_measure, BoundaryParam, Family,
    KineticSign, OperatorSpec, OrderedRepData, GOLDEN_RATIO,
};
use emz_spectral::quasidiff::{integrate_span, OdeOptions, QuasiRhs, ShinZettlMatrix};
use emz_spectral::realset::{Interval, RealSet, SpectralMeasureClass, Window};
use emz_spectral::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn w(lo: f64, hi: f64) -> Window {
    Window::new(lo, hi).unwrap()
}

fn kinetic(id: &str, sign: KineticSign, k: BoundaryParam) -> OperatorSpec {
    OperatorSpec::new(id, Family::HalfLineKinetic { sign, k }).unwrap()
}

fn impulse(alpha: f64) -> OperatorSpec {
    OperatorSpec::new("T3", Family::ImpulseOnUnit { alpha }).unwrap()
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for j in 1..panels {
        acc += f(a + j as f64 * h) * if j % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

#[test]
fn kinetic_energy_without_bound_state() {
    let win = w(-20.0, 20.0);
    for k in [
        BoundaryParam::Infinite,
        BoundaryParam::Finite(0.0),
        BoundaryParam::Finite(-1.5),
    ] {
        let s = subspectrum(&kinetic("T1", KineticSign::Minus, k), win).unwrap();
        assert_eq!(s.intervals(), &[Interval::open(0.0, 20.0)]);
        assert!(s.atoms().is_empty());
    }
    assert!(kinetic("T1", KineticSign::Minus, BoundaryParam::Finite(-1.5)).has_unelaborated_bound_state_case());
}

#[test]
fn kinetic_energy_with_bound_state() {
    let win = w(-20.0, 20.0);
    let s = subspectrum(&kinetic("T1", KineticSign::Minus, BoundaryParam::Finite(0.5)), win).unwrap();
    assert_eq!(s.atoms(), &[-4.0]);
    assert_eq!(s.intervals(), &[Interval::open(0.0, 20.0)]);
    let m = subspectrum(&kinetic("T2", KineticSign::Plus, BoundaryParam::Finite(0.5)), win).unwrap();
    assert_eq!(m.atoms(), &[4.0]);
    assert_eq!(m.intervals(), &[Interval::open(-20.0, 0.0)]);
}

#[test]
fn impulse_atoms() {
    let alpha = 0.3;
    let s = subspectrum(&impulse(alpha), w(-20.0, 20.0)).unwrap();
    let want: Vec<f64> = (-3..=3).map(|n| 2.0 * PI * f64::from(n) - alpha).collect();
    assert_eq!(s.atoms().len(), want.len());
    for (a, b) in s.atoms().iter().zip(&want) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn out_of_range_alpha_is_rejected() {
    assert!(matches!(
        OperatorSpec::new("x", Family::ImpulseOnUnit { alpha: 7.0 }),
        Err(Error::Schema(_))
    ));
}

#[test]
fn gesztesy_kirsch_levels() {
    let spec = OperatorSpec::new("gk", Family::GesztesyKirsch).unwrap();
    let s = subspectrum(&spec, w(0.0, 30.0)).unwrap();
    // ℓ(ℓ+1) = 1 gives ℓ + 1 = φ, so the ground state is φ² = φ + 1
    assert!((s.atoms()[0] - (GOLDEN_RATIO + 1.0)).abs() < 1e-12);
    assert_eq!(s.atoms().len(), 4);
    assert!(matches!(
        eigensolve(&spec, w(0.0, 30.0)),
        Err(Error::UnsupportedFamily(_))
    ));
}

proptest! {
    #[test]
    fn mirror_symmetry(s in prop_oneof![Just(f64::INFINITY), -3.0f64..3.0], hw in 1.0f64..30.0) {
        let param = if s.is_finite() { BoundaryParam::Finite(s) } else { BoundaryParam::Infinite };
        let win = w(-hw, hw);
        let minus = subspectrum(&kinetic("a", KineticSign::Minus, param), win).unwrap();
        let plus = subspectrum(&kinetic("b", KineticSign::Plus, param), win).unwrap();
        let reflected_atoms: Vec<f64> = minus.atoms().iter().rev().map(|a| -a).collect();
        let reflected_ivs: Vec<Interval> = minus
            .intervals()
            .iter()
            .rev()
            .map(|iv| Interval::new(-iv.hi, -iv.lo, iv.hi_closed, iv.lo_closed))
            .collect();
        let reflected = RealSet::new(win, reflected_ivs, reflected_atoms).unwrap();
        prop_assert!(plus.approx_eq(&reflected));
    }
}

#[test]
fn impulse_eigenfunctions() {
    let spec = impulse(PI / 2.0);
    let win = w(-10.0, 10.0);
    let data = eigensolve(&spec, win).unwrap();
    let want: Vec<f64> = (-1..=1).map(|n| 2.0 * PI * f64::from(n) - PI / 2.0).collect();
    assert_eq!(data.eigenvalues.len(), want.len());
    for (a, b) in data.eigenvalues.iter().zip(&want) {
        assert!((a - b).abs() < 1e-12);
    }
    let r = eigen_residuals(&spec, &data).unwrap();
    assert!(r.boundary < 1e-10 && r.equation < 1e-8, "{r:?}");
    // orthonormality by quadrature
    for i in 0..data.len() {
        for j in 0..data.len() {
            let re = simpson(
                |t| (data.normalized(i, t) * data.normalized(j, t).conj()).re,
                0.0,
                1.0,
                2000,
            );
            let im = simpson(
                |t| (data.normalized(i, t) * data.normalized(j, t).conj()).im,
                0.0,
                1.0,
                2000,
            );
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((re - want).abs() < 1e-10 && im.abs() < 1e-10);
        }
    }
}

#[test]
fn dirichlet_eigenvalues_by_bisection() {
    let spec = OperatorSpec::new("D", Family::DirichletSLOnPi).unwrap();
    let data = eigensolve(&spec, w(0.0, 50.0)).unwrap();
    assert_eq!(data.len(), 7);
    for (n, l) in (1..=7).zip(&data.eigenvalues) {
        assert!((l - f64::from(n * n)).abs() < 1e-10, "{l}");
    }
    let r = eigen_residuals(&spec, &data).unwrap();
    assert!(r.boundary < 1e-10 && r.equation < 1e-8, "{r:?}");

    // the quasi-derivative integrator reproduces √(2/π) sin(nt)
    let a = ShinZettlMatrix::second_derivative((0.0, PI));
    for (j, &l) in data.eigenvalues.iter().enumerate() {
        let slope = data.functions[j].derivative(1, 0.0) / data.norm_weights[j];
        let t = integrate_span(
            &a,
            &[Complex64::new(0.0, 0.0), slope],
            QuasiRhs::eigen(l),
            (0.0, PI),
            200,
            OdeOptions::default(),
        )
        .unwrap();
        for (x, v) in t.grid.iter().zip(&t.values) {
            assert!((v[0] - data.normalized(j, *x)).norm() < 1e-8);
        }
        assert!(t.last()[0].norm() < 1e-8);
        let norm = simpson(|x| data.normalized(j, x).norm_sqr(), 0.0, PI, 2000);
        assert!((norm - 1.0).abs() < 1e-10);
    }
}

#[test]
fn half_line_bound_state() {
    let spec = kinetic("T1", KineticSign::Minus, BoundaryParam::Finite(0.5));
    let data = eigensolve(&spec, w(-20.0, 20.0)).unwrap();
    assert_eq!(data.eigenvalues, vec![-4.0]);
    for x in [0.0, 0.3, 2.0] {
        assert!((data.normalized(0, x).re - 2.0 * (-2.0 * x).exp()).abs() < 1e-14);
    }
    // ∫ e^{−4x} = 1/4
    let raw = simpson(|x| data.functions[0].eval(x).norm_sqr(), 0.0, 20.0, 40000);
    assert!((raw - 0.25).abs() < 1e-10);
    let r = eigen_residuals(&spec, &data).unwrap();
    assert!(r.boundary < 1e-10 && r.equation < 1e-8);

    let free = kinetic("T1", KineticSign::Minus, BoundaryParam::Infinite);
    assert!(matches!(
        eigensolve(&free, w(-20.0, 20.0)),
        Err(Error::ContinuousSpectrumOnly(_))
    ));
}

#[test]
fn closure_of_subspectrum_is_the_spectrum() {
    let win = w(-20.0, 20.0);
    let cases = [
        impulse(1.1),
        OperatorSpec::new("D", Family::DirichletSLOnPi).unwrap(),
        kinetic("T1", KineticSign::Minus, BoundaryParam::Finite(0.5)),
    ];
    for spec in &cases {
        let sub = subspectrum(spec, win).unwrap();
        let data = eigensolve(spec, win).unwrap();
        let mut spectrum = RealSet::from_atoms(win, data.eigenvalues.clone()).unwrap();
        if let Family::HalfLineKinetic { .. } = spec.family {
            spectrum = spectrum
                .union(&RealSet::from_interval(win, Interval::closed(0.0, 20.0)).unwrap())
                .unwrap();
        }
        assert!(
            sub.closure().approx_eq(&spectrum),
            "{}: {} vs {}",
            spec.id,
            sub.closure(),
            spectrum
        );
    }
}

#[test]
fn ordered_rep_data_of_catalog_families() {
    let win = w(-20.0, 20.0);
    let d = ordered_rep_data(&impulse(0.3), win).unwrap();
    assert_eq!(d.multiplicity(), 1);
    assert!(d.theta.ac_support().is_empty());
    assert_eq!(d.theta.pp_support().atoms().len(), 7);
    assert!((d.pp_weights.unwrap().total_mass() - 1.0).abs() < 1e-12);

    let k = ordered_rep_data(&kinetic("T1", KineticSign::Minus, BoundaryParam::Infinite), win).unwrap();
    assert_eq!(k.multiplicity(), 1);
    assert!(k.theta.pp_support().is_empty());
    assert_eq!(k.theta.ac_support().intervals(), &[Interval::open(0.0, 20.0)]);
    assert!(k.pp_weights.is_none());
}

#[test]
fn symbolic_data_passes_through() {
    let win = w(-5.0, 5.0);
    let ac = RealSet::from_interval(win, Interval::open(-2.0, 2.0)).unwrap();
    let theta = SpectralMeasureClass::new(ac.clone(), RealSet::empty(win)).unwrap();
    let e2 = RealSet::from_interval(win, Interval::open(0.0, 1.0)).unwrap();
    let data = OrderedRepData::new(theta, vec![ac.closure(), e2], None).unwrap();
    let spec = OperatorSpec::new("S", Family::Symbolic(data.clone())).unwrap();
    let back = ordered_rep_data(&spec, win).unwrap();
    assert_eq!(back, data);
    assert_eq!(back.multiplicity(), 2);
    assert_eq!(back.level_at(0.5), 2);
    assert_eq!(back.level_at(-1.0), 1);
    assert_eq!(back.level_at(3.0), 0);
}

#[test]
fn symbolic_levels_must_be_nested_and_charged() {
    let win = w(-5.0, 5.0);
    let ac = RealSet::from_interval(win, Interval::open(-2.0, 2.0)).unwrap();
    let theta = SpectralMeasureClass::new(ac.clone(), RealSet::empty(win)).unwrap();
    let outside = RealSet::from_interval(win, Interval::open(3.0, 4.0)).unwrap();
    assert!(OrderedRepData::new(theta.clone(), vec![ac.clone(), outside], None).is_err());
    let point = RealSet::from_atoms(win, vec![1.0]).unwrap();
    assert!(OrderedRepData::new(theta, vec![ac, point], None).is_err());
}

#[test]
fn vector_measure_examples() {
    let data = eigensolve(&impulse(0.3), w(-20.0, 20.0)).unwrap();
    let mut c = vec![Complex64::new(0.0, 0.0); data.len()];
    c[2] = Complex64::new(1.0, 0.0);
    let m = vector_spectral_measure(&data, &c).unwrap();
    assert_eq!(m.atoms(), &[(data.eigenvalues[2], 1.0)]);

    c[4] = Complex64::new(1.0, 0.0);
    for v in &mut c {
        *v /= 2f64.sqrt();
    }
    let m = vector_spectral_measure(&data, &c).unwrap();
    assert!(m.atoms().iter().all(|a| (a.1 - 0.5).abs() < 1e-15));

    assert!(matches!(
        vector_spectral_measure(&data, &c[..3]),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn vector_measure_mass_is_the_squared_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let data = eigensolve(&impulse(1.9), w(-30.0, 30.0)).unwrap();
    for _ in 0..10 {
        let c: Vec<Complex64> = (0..data.len())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let x = |t: f64| -> Complex64 { c.iter().enumerate().map(|(j, cj)| cj * data.normalized(j, t)).sum() };
        let norm2 = simpson(|t| x(t).norm_sqr(), 0.0, 1.0, 4000);
        let mass = vector_spectral_measure(&data, &c).unwrap().total_mass();
        assert!((mass - norm2).abs() < 1e-10 * norm2.max(1.0), "{mass} vs {norm2}");
    }
}
