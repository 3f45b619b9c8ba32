mod common;

use common::{fixture, fixture_text, random_system};
use emz_spectral::catalog::{Family, OperatorSpec, OrderedRepData};
use emz_spectral::ordered_rep::{
    build_multiplicity_sets, build_ordered_representation, detect_distortion, families_equivalent, oracle_agreement,
    pointwise_multiplicity, probe_points, MaxChoice, OrderedRepresentation, Part, DEFAULT_BUDGET,
};
use emz_spectral::realset::{Interval, RealSet, SpectralMeasureClass, Window};
use emz_spectral::schema::SystemFile;
use emz_spectral::vectorop::EMZSystem;
use emz_spectral::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rep(sys: &EMZSystem) -> OrderedRepresentation {
    build_ordered_representation(sys, DEFAULT_BUDGET).unwrap()
}

fn integers(w: Window) -> RealSet {
    let atoms = (w.lo.ceil() as i64..=w.hi.floor() as i64).map(|n| n as f64).collect();
    RealSet::from_atoms(w, atoms).unwrap()
}

fn example2(w: [f64; 2]) -> EMZSystem {
    let mut file = SystemFile::from_json(&fixture_text("example2.json")).unwrap();
    file.window = w;
    file.system(None).unwrap()
}

/// Multiplicity read off the split slots: slots whose point part holds `λ`
/// if any does, otherwise slots whose closed continuous part holds it.
fn slot_multiplicity(sys: &EMZSystem, lambda: f64) -> usize {
    let pp = sys
        .slots()
        .iter()
        .filter(|s| s.class.pp_support().contains(lambda))
        .count();
    if pp > 0 {
        return pp;
    }
    sys.slots()
        .iter()
        .filter(|s| s.class.ac_support().closure().contains(lambda))
        .count()
}

#[test]
fn example_one_case_one() {
    let sys = fixture("example1_case1.json");
    let r = rep(&sys);
    let w = sys.window();
    let ac = RealSet::new(w, vec![Interval::open(-20.0, 0.0), Interval::open(0.0, 20.0)], vec![]).unwrap();
    assert!(r.theta.ac_support().approx_eq(&ac));
    assert_eq!(r.theta.pp_support().atoms().len(), 7);
    assert_eq!((r.lambda, r.multiplicity, r.distorted), (2, 1, true));
    // the impulse atoms inside the continuum are charged by the impulse alone
    assert!(!r.theta.sign(&r.s(2)).unwrap().is_positive());
}

#[test]
fn example_one_case_two() {
    let sys = fixture("example1_case2.json");
    let d = detect_distortion(&sys).unwrap();
    assert_eq!((d.lambda, d.multiplicity, d.distorted), (3, 1, true));
}

#[test]
fn example_two() {
    for hw in [5.0, 10.0] {
        let sys = example2([-hw, hw]);
        let r = rep(&sys);
        let w = sys.window();
        assert_eq!((r.lambda, r.multiplicity, r.distorted), (3, 2, true));
        assert!(r.s(1).approx_eq(&RealSet::full(w)));
        assert!(r.s(2).approx_eq(&integers(w)), "{}", r.s(2));
        assert!(r.s(3).is_empty());
        // e_2 = [P1 ∩ P2] ∪ [P1 ∩ P3] ∪ [P2 ∩ P3]
        let p: Vec<&RealSet> = sys.operator_reps().iter().map(|r| r.theta.pp_support()).collect();
        let e2 = p[0]
            .intersect(p[1])
            .unwrap()
            .union(&p[0].intersect(p[2]).unwrap())
            .unwrap()
            .union(&p[1].intersect(p[2]).unwrap())
            .unwrap();
        assert!(e2.approx_eq(&r.s(2)));
    }
    let sys = example2([-5.0, 5.0]);
    assert_eq!(pointwise_multiplicity(&sys, 0.0), 2);
    assert_eq!(pointwise_multiplicity(&sys, 3.0), 2);
    assert_eq!(pointwise_multiplicity(&sys, -3.0), 2);
    assert_eq!(pointwise_multiplicity(&sys, 0.5), 0);
}

#[test]
fn single_operator_sets_are_its_own() {
    let w = Window::new(-5.0, 5.0).unwrap();
    let theta = SpectralMeasureClass::new(
        RealSet::from_interval(w, Interval::open(-2.0, 2.0)).unwrap(),
        RealSet::from_atoms(w, vec![3.0, 4.0]).unwrap(),
    )
    .unwrap();
    let e = vec![
        theta.support().closure(),
        RealSet::new(w, vec![Interval::closed(-1.0, 1.0)], vec![3.0, 4.0]).unwrap(),
        RealSet::new(w, vec![Interval::closed(0.0, 1.0)], vec![4.0]).unwrap(),
    ];
    let op = OperatorSpec::new(
        "M",
        Family::Symbolic(OrderedRepData::new(theta.clone(), e.clone(), None).unwrap()),
    )
    .unwrap();
    let sys = EMZSystem::new(w, vec![op]).unwrap();
    let r = rep(&sys);
    assert_eq!(r.multiplicity, 3);
    assert_eq!(r.lambda, 3);
    assert!(!r.distorted);
    assert!(!r.coordinates_simple);
    for n in 2..=3 {
        let s = r.s(n);
        let diff = s
            .difference(&e[n - 1])
            .unwrap()
            .union(&e[n - 1].difference(&s).unwrap())
            .unwrap();
        assert!(!theta.sign(&diff).unwrap().is_positive(), "n={n}: {s} vs {}", e[n - 1]);
    }
    assert!(r.s(4).is_empty());
}

#[test]
fn disjoint_pair_is_simple() {
    let sys = fixture("disjoint_pair.json");
    let r = rep(&sys);
    assert_eq!((r.lambda, r.multiplicity, r.distorted), (1, 1, false));
    assert!(r.s(2).is_empty());
    assert!(r.provenance.steps.iter().all(|s| s.choice == MaxChoice::Disjoint));
}

#[test]
fn double_impulse_sets_one_copy_aside() {
    let sys = fixture("double_impulse.json");
    let r = rep(&sys);
    assert_eq!((r.lambda, r.multiplicity), (2, 2));
    assert!(r.theta.ac_support().is_empty());
    assert!(r.s(2).approx_eq(r.theta.pp_support()));
    let step = r.provenance.steps.iter().find(|s| s.group == 1).unwrap();
    assert_eq!(step.choice, MaxChoice::Equal);
    assert!(step.kept.is_empty());
    assert_eq!(step.discarded.len(), 1);
    assert_eq!(step.discarded[0].slot, "P2");
    assert!(step.discarded[0].support.approx_eq(r.theta.pp_support()));
    let l = r.theta.pp_support().atoms()[0];
    assert_eq!(r.provenance.slots_at(l), vec!["P1", "P2"]);
    let weights = r.theta_pp.unwrap();
    assert!((weights.total_mass() - 1.0).abs() < 1e-12);
}

#[test]
fn equivalence_of_families() {
    let sys = example2([-10.0, 10.0]);
    assert!(families_equivalent(&sys, &sys).unwrap());
    let ops = sys.operators();
    let permuted = EMZSystem::new(sys.window(), vec![ops[2].clone(), ops[0].clone(), ops[1].clone()]).unwrap();
    assert!(families_equivalent(&sys, &permuted).unwrap());
    let first_two = EMZSystem::new(sys.window(), ops[..2].to_vec()).unwrap();
    assert!(!families_equivalent(&sys, &first_two).unwrap());
    let other = example2([-5.0, 5.0]);
    assert!(matches!(
        families_equivalent(&sys, &other),
        Err(Error::WindowMismatch(..))
    ));
}

#[test]
fn budget_is_enforced() {
    let sys = example2([-10.0, 10.0]);
    assert!(matches!(
        build_multiplicity_sets(&sys, 3, 2),
        Err(Error::EnumerationBudgetExceeded { budget: 2 })
    ));
    assert_eq!(build_multiplicity_sets(&sys, 1, 2).unwrap().len(), 1);
}

#[test]
fn atom_on_continuum_endpoint_is_flagged() {
    let text = r#"{
        "window": [-5, 5],
        "operators": [
            {"id": "A", "family": "half_line_kinetic", "params": {"sign": "-", "k": "inf"}},
            {"id": "B", "family": "impulse_on_unit", "params": {"alpha": 0.0}}
        ]
    }"#;
    let sys = SystemFile::from_json(text).unwrap().system(None).unwrap();
    let r = rep(&sys);
    assert_eq!(r.endpoint_coincidences.len(), 1);
    assert_eq!(r.endpoint_coincidences[0].lambda, 0.0);
    assert!(r.s(1).contains(0.0));
    assert_eq!(pointwise_multiplicity(&sys, 0.0), 1);
    assert_eq!(r.multiplicity, 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ordered_representation_invariants(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random_system(&mut rng, 5, 3, true);
        let r = rep(&sys);

        for n in 1..r.s_n.len() {
            prop_assert!(r.s(n + 1).is_subset_of(&r.s(n)).unwrap());
        }
        prop_assert!(r.multiplicity <= sys.total_multiplicity());

        let agreement = oracle_agreement(&sys, &r).unwrap();
        prop_assert!(agreement.agrees(), "{:?}", agreement);
        for x in probe_points(&sys) {
            let m = pointwise_multiplicity(&sys, x);
            prop_assert_eq!(m, slot_multiplicity(&sys, x), "at {}", x);
        }

        // θ is equivalent to the sum of all slot measures
        let mut all = SpectralMeasureClass::zero(sys.window());
        for s in sys.slots() {
            all = all.join(&s.class).unwrap();
        }
        prop_assert!(r.theta.equivalent(&all).unwrap());

        // every slot enters once and its measure is split without loss
        let mut leaves = r.provenance.leaves.clone();
        leaves.sort();
        let mut ids: Vec<String> = sys.slots().iter().map(|s| s.id.clone()).collect();
        ids.sort();
        prop_assert_eq!(leaves, ids);
        for s in sys.slots() {
            for part in [Part::Pp, Part::Cont] {
                let mut got = RealSet::empty(sys.window());
                for p in r.provenance.top.iter().chain(&r.provenance.lower) {
                    if p.slot == s.id && p.part == part {
                        got = got.union(&p.support).unwrap();
                    }
                }
                let want = match part {
                    Part::Pp => s.class.pp_support().clone(),
                    Part::Cont => s.class.ac_support().clone(),
                };
                let sym = got.difference(&want).unwrap().union(&want.difference(&got).unwrap()).unwrap();
                let null = match part {
                    Part::Pp => sym.atoms_only().is_empty(),
                    Part::Cont => !sym.has_interval(),
                };
                prop_assert!(null, "slot {} {:?}: {} vs {}", s.id, part, got, want);
            }
        }

        // what was set aside from the top lives in s_2
        for p in &r.provenance.lower {
            // measured by the piece itself: an ac piece does not charge an atom of θ
            let outside = p.support.difference(&r.s(2)).unwrap();
            let charged = match p.part {
                Part::Pp => !outside.atoms_only().is_empty(),
                Part::Cont => outside.has_interval(),
            };
            prop_assert!(!charged, "{:?} outside s_2", p);
        }
    }
}
