use emz_spectral::quasidiff::{
    bracket, convergence_order, integrate_quasi_derivatives, lagrange_residual, Coefficient, OdeOptions, QuasiFunction,
    QuasiRhs, ShinZettlMatrix,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Random valid order-`n` matrix with polynomial entries on [0, 1].
fn random_matrix(rng: &mut ChaCha8Rng, n: usize, sampled: bool) -> ShinZettlMatrix {
    let poly = |deg: usize, rng: &mut ChaCha8Rng| -> Vec<Complex64> {
        (0..=deg)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    };
    let mut rows = Vec::new();
    for r in 0..n {
        let mut row = Vec::new();
        for s in 0..n {
            let e = if s >= r + 2 {
                Coefficient::Zero
            } else if s == r + 1 {
                // 2 + small perturbation never vanishes on [0, 1]
                let mut p = poly(1, rng);
                for q in &mut p {
                    *q *= 0.3;
                }
                p[0] += 2.0;
                Coefficient::Polynomial(p)
            } else {
                Coefficient::Polynomial(poly(2, rng))
            };
            row.push(e);
        }
        rows.push(row);
    }
    let a = ShinZettlMatrix::new((0.0, 1.0), 201, rows).unwrap();
    if !sampled {
        return a;
    }
    ShinZettlMatrix::from_fn((0.0, 1.0), n, 201, |r, s, x| a.eval(r, s, x)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn adjoint_is_an_involution(seed in any::<u64>(), n in 2usize..6, sampled in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&mut rng, n, sampled);
        prop_assert!(a.validate().is_empty());
        let back = a.lagrange_adjoint().unwrap().lagrange_adjoint().unwrap();
        prop_assert!(a.max_node_difference(&back).unwrap() <= 1e-14);
    }

    #[test]
    fn adjoint_matches_explicit_product(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&mut rng, n, false);
        let plus = a.lagrange_adjoint().unwrap();
        // L with l_{r,n+1-r} = (-1)^{r-1}; L⁻¹ = Lᵀ
        let l = |r: usize, s: usize| -> f64 {
            if r + s == n - 1 { if r.is_multiple_of(2) { 1.0 } else { -1.0 } } else { 0.0 }
        };
        for &x in &[0.0, 0.37, 1.0] {
            for r in 0..n {
                for s in 0..n {
                    let mut v = c(0.0, 0.0);
                    for k in 0..n {
                        for m in 0..n {
                            v += l(k, r) * a.eval(m, k, x).conj() * l(m, s);
                        }
                    }
                    prop_assert!((plus.eval(r, s, x) + v).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn real_order_two_bracket_of_f_with_itself_vanishes(
        f0 in -5.0f64..5.0, f1 in -5.0f64..5.0, lambda in -3.0f64..3.0,
    ) {
        // Sturm-Liouville form [[0, 1/p], [q, 0]] with real p, q is Lagrange symmetric
        let a = ShinZettlMatrix::from_fn((0.0, 1.0), 2, 101, |r, s, x| match (r, s) {
            (0, 1) => c(1.0 / (1.0 + x * x), 0.0),
            (1, 0) => c(x, 0.0),
            _ => c(0.0, 0.0),
        })
        .unwrap();
        prop_assert!(a.is_lagrange_symmetric().unwrap());
        let t = integrate_quasi_derivatives(&a, &[c(f0, 0.0), c(f1, 0.0)], QuasiRhs::eigen(lambda), OdeOptions::default()).unwrap();
        let v = t.values.iter().map(|v| bracket(v, v).norm()).fold(0.0, f64::max);
        prop_assert!(v == 0.0);
    }
}

#[test]
fn lagrange_identity_for_non_symmetric_matrices_of_order_three_and_four() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [3, 4] {
        for _ in 0..5 {
            let a = random_matrix(&mut rng, n, false);
            assert!(!a.is_lagrange_symmetric().unwrap());
            let fi: Vec<Complex64> = (0..n)
                .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let gi: Vec<Complex64> = (0..n)
                .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let lf = rng.random_range(-2.0..2.0);
            let lg = rng.random_range(-2.0..2.0);
            let h = |x: f64| c(x.cos(), x * x);
            let f = QuasiFunction::new(
                fi,
                QuasiRhs {
                    lambda: c(lf, 0.3),
                    forcing: Some(&h),
                },
            );
            let g = QuasiFunction::new(gi, QuasiRhs::eigen(lg));
            let check = lagrange_residual(&a, &f, &g, (0.1, 0.9), 400, OdeOptions::default()).unwrap();
            assert!(check.used_adjoint);
            let scale = 1.0 + check.boundary.norm();
            assert!(check.residual < 1e-8 * scale, "n={n}: residual {:.3e}", check.residual);
        }
    }
}

#[test]
fn lagrange_residual_converges_at_fourth_order() {
    let a = ShinZettlMatrix::second_derivative((0.0, 1.0));
    // f = x³ via forcing, g = cosh x
    let h = |x: f64| c(-6.0 * x, 0.0);
    let f = QuasiFunction::new(vec![c(0.0, 0.0), c(0.0, 0.0)], QuasiRhs::forced(&h));
    let g = QuasiFunction::new(vec![c(1.0, 0.0), c(0.0, 0.0)], QuasiRhs::eigen(-1.0));
    let opts = OdeOptions {
        tol: 1e-14,
        ..OdeOptions::default()
    };
    let fit = convergence_order(&a, &f, &g, (0.0, 1.0), &[4, 8, 16, 32, 64], opts).unwrap();
    assert!(
        (fit.slope - 4.0).abs() < 0.3,
        "slope {} from {:?}",
        fit.slope,
        fit.points
    );
}
