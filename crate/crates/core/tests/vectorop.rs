mod common;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use common::{brute_force_min_partition, fixture, oracle_adjacency, random_system};
use emz_spectral::catalog::{BoundaryParam, Family, KineticSign, OperatorSpec, OrderedRepData};
use emz_spectral::realset::{Interval, RealSet, SpectralMeasureClass, Window};
use emz_spectral::vectorop::{
    borel_calculus_apply, build_superposition_graph, cyclic_vector_plan, identity_resolution_apply, spectral_index,
    Certificate, EMZSystem, SampledFunction, SlotVector, VectorFunction,
};
use emz_spectral::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn w20() -> Window {
    Window::new(-20.0, 20.0).unwrap()
}

fn example1(k: BoundaryParam, s: BoundaryParam, alpha: f64) -> EMZSystem {
    let ops = vec![
        OperatorSpec::new(
            "T1",
            Family::HalfLineKinetic {
                sign: KineticSign::Minus,
                k,
            },
        )
        .unwrap(),
        OperatorSpec::new(
            "T2",
            Family::HalfLineKinetic {
                sign: KineticSign::Plus,
                k: s,
            },
        )
        .unwrap(),
        OperatorSpec::new("T3", Family::ImpulseOnUnit { alpha }).unwrap(),
    ];
    EMZSystem::new(w20(), ops).unwrap()
}

fn symbolic(id: &str, w: Window, ac: Vec<Interval>, atoms: Vec<f64>) -> OperatorSpec {
    let theta = SpectralMeasureClass::new(
        RealSet::new(w, ac, Vec::new()).unwrap(),
        RealSet::from_atoms(w, atoms).unwrap(),
    )
    .unwrap();
    let e1 = theta.support().closure();
    OperatorSpec::new(
        id,
        Family::Symbolic(OrderedRepData::new(theta, vec![e1], None).unwrap()),
    )
    .unwrap()
}

fn ids(groups: &[Vec<String>]) -> Vec<Vec<&str>> {
    groups.iter().map(|g| g.iter().map(String::as_str).collect()).collect()
}

fn edge_pairs(sys: &EMZSystem) -> Vec<(String, String)> {
    build_superposition_graph(sys)
        .unwrap()
        .edges
        .into_iter()
        .map(|e| (e.a, e.b))
        .collect()
}

#[test]
fn example_one_without_bound_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let params = [
        BoundaryParam::Infinite,
        BoundaryParam::Finite(0.0),
        BoundaryParam::Finite(-0.7),
    ];
    for k in params {
        for s in params {
            let alpha = rng.random_range(0.0..2.0 * PI);
            let sys = example1(k, s, alpha);
            let edges = edge_pairs(&sys);
            assert!(!edges.contains(&("T1".into(), "T2".into())));
            assert!(edges.contains(&("T1".into(), "T3".into())));
            assert!(edges.contains(&("T2".into(), "T3".into())));
            let p = spectral_index(&sys).unwrap();
            assert_eq!(p.lambda, 2);
            assert_eq!(ids(&p.groups), vec![vec!["T1", "T2"], vec!["T3"]]);
            assert_eq!(p.certificate, Certificate::Exact);
            assert_eq!(p.is_unique(), Some(true));
        }
    }
}

#[test]
fn example_one_with_bound_states() {
    let sys = example1(BoundaryParam::Finite(0.5), BoundaryParam::Finite(0.5), 1.0);
    let graph = build_superposition_graph(&sys).unwrap();
    let t12 = graph.edges.iter().find(|e| e.a == "T1" && e.b == "T2").unwrap();
    // both bound states sit inside the other operator's continuum
    assert_eq!(t12.overlap.atoms(), &[-4.0, 4.0]);
    assert_eq!(t12.charged_by, vec!["T1".to_string(), "T2".into()]);
    let p = spectral_index(&sys).unwrap();
    assert_eq!(p.lambda, 3);
    assert_eq!(ids(&p.groups), vec![vec!["T1"], vec!["T2"], vec!["T3"]]);
}

#[test]
fn example_two_is_a_triangle() {
    let sys = fixture("example2.json");
    assert_eq!(edge_pairs(&sys).len(), 3);
    let p = spectral_index(&sys).unwrap();
    assert_eq!(p.lambda, 3);
    assert_eq!(p.clique_bound, 3);
}

#[test]
fn single_operator() {
    let sys = fixture("single_operator.json");
    assert!(edge_pairs(&sys).is_empty());
    assert_eq!(spectral_index(&sys).unwrap().lambda, 1);
}

#[test]
fn degenerate_boundary_overlaps() {
    let w = Window::new(-3.0, 3.0).unwrap();
    let left = symbolic("L", w, vec![Interval::closed(-2.0, 0.0)], vec![]);
    let right = symbolic("R", w, vec![Interval::closed(0.0, 2.0)], vec![]);
    let point = symbolic("P", w, vec![], vec![0.0]);
    let sys = EMZSystem::new(w, vec![left.clone(), right.clone()]).unwrap();
    assert!(edge_pairs(&sys).is_empty());
    let sys = EMZSystem::new(w, vec![right, point]).unwrap();
    let g = build_superposition_graph(&sys).unwrap();
    assert_eq!(g.edges.len(), 1);
    assert_eq!(g.edges[0].charged_by, vec!["P".to_string()]);
}

#[test]
fn split_levels_are_a_clique() {
    let w = Window::new(-3.0, 3.0).unwrap();
    let theta = SpectralMeasureClass::new(
        RealSet::from_interval(w, Interval::open(-1.0, 1.0)).unwrap(),
        RealSet::from_atoms(w, vec![2.0]).unwrap(),
    )
    .unwrap();
    let e = vec![
        theta.support().closure(),
        RealSet::new(w, vec![Interval::closed(-1.0, 0.5)], vec![2.0]).unwrap(),
        RealSet::from_atoms(w, vec![2.0]).unwrap(),
    ];
    let op = OperatorSpec::new("M", Family::Symbolic(OrderedRepData::new(theta, e, None).unwrap())).unwrap();
    let sys = EMZSystem::new(w, vec![op]).unwrap();
    assert_eq!(sys.slots().len(), 3);
    let p = spectral_index(&sys).unwrap();
    assert_eq!(p.lambda, 3);
    assert_eq!(p.max_multiplicity, 3);
}

#[test]
fn coloring_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    while checked < 40 {
        let sys = random_system(&mut rng, 5, 2, true);
        if sys.slots().len() > 9 {
            continue;
        }
        let graph = build_superposition_graph(&sys).unwrap();
        let adj = oracle_adjacency(&sys);
        assert_eq!(graph.adjacency(), adj.as_slice());
        let p = spectral_index(&sys).unwrap();
        assert_eq!(p.lambda, brute_force_min_partition(&adj));
        assert!(p.lambda >= sys.max_multiplicity());
        assert!(p.lambda >= p.clique_bound);
        checked += 1;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pairwise_null_overlaps_give_one_group(alphas in prop::collection::btree_set(0u32..600, 1..6)) {
        // distinct α give disjoint impulse spectra
        let ops = alphas
            .iter()
            .enumerate()
            .map(|(j, a)| OperatorSpec::new(format!("P{j}"), Family::ImpulseOnUnit { alpha: f64::from(*a) / 100.0 }).unwrap())
            .collect();
        let sys = EMZSystem::new(w20(), ops).unwrap();
        prop_assert_eq!(spectral_index(&sys).unwrap().lambda, 1);
    }

    #[test]
    fn groups_partition_the_slots_into_independent_sets(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random_system(&mut rng, 6, 3, true);
        let graph = build_superposition_graph(&sys).unwrap();
        let p = spectral_index(&sys).unwrap();
        let mut all: Vec<&String> = p.groups.iter().flatten().collect();
        all.sort();
        let mut nodes: Vec<&String> = graph.nodes.iter().collect();
        nodes.sort();
        prop_assert_eq!(all, nodes);
        for g in &p.groups {
            let idx: Vec<usize> = g.iter().map(|id| sys.slot_index(id).unwrap()).collect();
            prop_assert!(graph.is_independent(&idx));
        }
        prop_assert_eq!(p.lambda, p.groups.len());
        prop_assert!(p.lambda >= sys.max_multiplicity());
    }
}

#[test]
fn cyclic_vector_plans() {
    for (name, count) in [
        ("disjoint_pair.json", 1),
        ("example1_case1.json", 2),
        ("example2.json", 3),
    ] {
        let sys = fixture(name);
        let p = spectral_index(&sys).unwrap();
        let plan = cyclic_vector_plan(&sys, &p).unwrap();
        assert_eq!(plan.len(), count, "{name}");
        for v in &plan {
            let has_points = v.components.iter().any(|c| !c.point_coefficients.is_empty());
            if has_points {
                assert!((v.point_norm_sqr() - 1.0).abs() < 1e-12);
            }
        }
    }
    let sys = fixture("disjoint_pair.json");
    let plan = cyclic_vector_plan(&sys, &spectral_index(&sys).unwrap()).unwrap();
    let covered: usize = plan[0].components.iter().map(|c| c.point_coefficients.len()).sum();
    let atoms: usize = sys.slots().iter().map(|s| s.point_spectrum().len()).sum();
    assert_eq!(covered, atoms);
    let ex1 = fixture("example1_case1.json");
    let plan = cyclic_vector_plan(&ex1, &spectral_index(&ex1).unwrap()).unwrap();
    assert!(plan[0].components.iter().all(|c| c.ac_support.is_some()));
}

fn random_vector(rng: &mut ChaCha8Rng, sys: &EMZSystem) -> VectorFunction {
    let mut v = VectorFunction::zero(sys);
    for sv in v.slots.values_mut() {
        for c in &mut sv.coeffs {
            *c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
    }
    v
}

#[test]
fn identity_resolution_filters_coefficients() {
    let sys = fixture("example2.json");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x = random_vector(&mut rng, &sys);
    let w = sys.window();

    let (same, n2) = identity_resolution_apply(&sys, &RealSet::full(w), &x).unwrap();
    assert_eq!(same, x);
    assert!((n2 - x.norm_sqr()).abs() < 1e-12);
    let (zero, n0) = identity_resolution_apply(&sys, &RealSet::empty(w), &x).unwrap();
    assert_eq!(zero.norm_sqr(), 0.0);
    assert_eq!(n0, 0.0);

    let delta = RealSet::from_interval(w, Interval::closed(0.5, 3.5)).unwrap();
    let (got, norm2) = identity_resolution_apply(&sys, &delta, &x).unwrap();
    let mut brute = 0.0;
    for id in ["T1", "T2", "T3"] {
        for ((l, c), (l2, g)) in x.pairs(&sys, id).into_iter().zip(got.pairs(&sys, id)) {
            assert_eq!(l, l2);
            let keep = (0.5..=3.5).contains(&l);
            assert_eq!(g, if keep { c } else { Complex64::new(0.0, 0.0) });
            if keep {
                brute += c.norm_sqr();
            }
        }
    }
    assert!((norm2 - brute).abs() < 1e-12);
    assert!((norm2 - got.norm_sqr()).abs() < 1e-12);
}

#[test]
fn borel_calculus() {
    let sys = fixture("impulse_dirichlet.json");
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let x = random_vector(&mut rng, &sys);

    let one = borel_calculus_apply(&sys, &|_| Complex64::new(1.0, 0.0), &x).unwrap();
    assert_eq!(one, x);

    let delta = RealSet::from_interval(sys.window(), Interval::open(-3.0, 20.0)).unwrap();
    let chi = borel_calculus_apply(
        &sys,
        &|l| Complex64::new(if delta.contains(l) { 1.0 } else { 0.0 }, 0.0),
        &x,
    )
    .unwrap();
    assert_eq!(chi, identity_resolution_apply(&sys, &delta, &x).unwrap().0);

    let l0 = 16.0;
    let e = VectorFunction::eigenvector(&sys, "D", l0).unwrap();
    let te = borel_calculus_apply(&sys, &|l| Complex64::new(l, 0.0), &e).unwrap();
    assert!(te
        .pairs(&sys, "D")
        .iter()
        .all(|(l, c)| (c - if *l == l0 { l0 } else { 0.0 }).norm() < 1e-12));

    // ‖f(T)x‖² = Σ |f(λ)|² μ_x({λ})
    let f = |l: f64| Complex64::new(l.sin(), l.cos() * 0.5);
    let fx = borel_calculus_apply(&sys, &f, &x).unwrap();
    let mut want = 0.0;
    for s in sys.slots() {
        for (l, c) in x.pairs(&sys, &s.id) {
            want += f(l).norm_sqr() * c.norm_sqr();
        }
    }
    assert!((fx.norm_sqr() - want).abs() < 1e-12);

    let sampled = SampledFunction::new(
        vec![-10.0, 50.0],
        vec![Complex64::new(0.0, 0.0), Complex64::new(60.0, 0.0)],
    )
    .unwrap();
    let sx = borel_calculus_apply(&sys, &|l| sampled.eval(l), &e).unwrap();
    assert!((sx.pairs(&sys, "D")[3].1.re - 26.0).abs() < 1e-12);
}

#[test]
fn calculus_errors() {
    let sys = fixture("example2.json");
    let x = VectorFunction::zero(&sys);
    assert!(matches!(
        borel_calculus_apply(&sys, &|l| Complex64::new(1.0 / l, 0.0), &x),
        Err(Error::UnboundedFunction(_))
    ));
    let ex1 = fixture("example1_case1.json");
    let mut v = VectorFunction::default();
    v.slots.insert(
        "T1".into(),
        SlotVector {
            coeffs: vec![],
            ac: None,
        },
    );
    assert!(matches!(
        identity_resolution_apply(&ex1, &RealSet::full(ex1.window()), &v),
        Err(Error::SymbolicACUnsupported(_))
    ));
    let mut bad = VectorFunction::zero(&sys);
    bad.slots.get_mut("T1").unwrap().coeffs.pop();
    assert!(matches!(
        identity_resolution_apply(&sys, &RealSet::full(sys.window()), &bad),
        Err(Error::DimensionMismatch { .. })
    ));
    let pairs: BTreeMap<String, Vec<(f64, Complex64)>> =
        [("T1".to_string(), vec![(0.5, Complex64::new(1.0, 0.0))])].into();
    assert!(VectorFunction::from_pairs(&sys, &pairs).is_err());
}
