use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::integrate::{i_pow, integrate_span, state_at, OdeOptions, QuasiDerivTrajectory, QuasiRhs};
use super::matrix::{ShinZettlMatrix, LAGRANGE_SYMMETRY_TOL};
use crate::error::{Error, Result};

pub const DEFAULT_TOL_QUAD: f64 = 1e-8;

/// A solution of `M_A[f] = λ f + h` fixed by its quasi-derivatives at the
/// left endpoint of the matrix interval.
#[derive(Clone)]
pub struct QuasiFunction<'a> {
    pub initial: Vec<Complex64>,
    pub rhs: QuasiRhs<'a>,
}

impl<'a> QuasiFunction<'a> {
    pub fn new(initial: Vec<Complex64>, rhs: QuasiRhs<'a>) -> Self {
        QuasiFunction { initial, rhs }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BilinearFormValue {
    pub x: f64,
    pub value: Complex64,
}

/// `[f,g](x) = iⁿ Σᵢ (−1)^{n−i} f^[i−1] conj(g^[n−i])` from quasi-derivative
/// vectors of `f` (relative to `A`) and `g` (relative to `A⁺`).
///
/// The alternating sign is anchored at the last term so that the
/// Lagrange identity holds with `∫ (ḡ M_A[f] − f conj(M_{A⁺}[g]))` on the left;
/// for `n = 2` this is `f ḡ′ − f′ ḡ`.
pub fn bracket(f: &[Complex64], g: &[Complex64]) -> Complex64 {
    let n = f.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 1..=n {
        let term = f[i - 1] * g[n - i].conj();
        if (n - i).is_multiple_of(2) {
            acc += term;
        } else {
            acc -= term;
        }
    }
    i_pow(n) * acc
}

/// The matrix `g` is integrated with: `A` itself when Lagrange symmetric.
fn adjoint_for(a: &ShinZettlMatrix) -> Result<(ShinZettlMatrix, bool)> {
    let plus = a.lagrange_adjoint()?;
    if a.max_node_difference(&plus)? < LAGRANGE_SYMMETRY_TOL {
        Ok((a.clone(), false))
    } else {
        Ok((plus, true))
    }
}

/// `[f,g]_A(x)` with `f`, `g` integrated from the left endpoint.
pub fn lagrange_bracket(
    a: &ShinZettlMatrix,
    f: &QuasiFunction<'_>,
    g: &QuasiFunction<'_>,
    x: f64,
    opts: OdeOptions,
) -> Result<BilinearFormValue> {
    let (plus, _) = adjoint_for(a)?;
    let fx = state_at(a, &f.initial, f.rhs, x, opts)?;
    let gx = state_at(&plus, &g.initial, g.rhs, x, opts)?;
    Ok(BilinearFormValue {
        x,
        value: bracket(&fx, &gx),
    })
}

/// Both sides of the Lagrange identity on `[α, β]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagrangeCheck {
    pub integral: Complex64,
    pub boundary: Complex64,
    pub residual: f64,
    pub panels: usize,
    /// Whether `g` was integrated with a distinct `A⁺`.
    pub used_adjoint: bool,
}

/// Composite Simpson rule over an odd number of equally spaced samples.
pub fn simpson(values: &[Complex64], h: f64) -> Complex64 {
    let m = values.len() - 1;
    let mut acc = values[0] + values[m];
    for (j, v) in values.iter().enumerate().take(m).skip(1) {
        acc += v * if j % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * (h / 3.0)
}

fn trajectories(
    a: &ShinZettlMatrix,
    plus: &ShinZettlMatrix,
    f: &QuasiFunction<'_>,
    g: &QuasiFunction<'_>,
    (alpha, beta): (f64, f64),
    panels: usize,
    opts: OdeOptions,
) -> Result<(QuasiDerivTrajectory, QuasiDerivTrajectory)> {
    let fa = state_at(a, &f.initial, f.rhs, alpha, opts)?;
    let ga = state_at(plus, &g.initial, g.rhs, alpha, opts)?;
    let tf = integrate_span(a, &fa, f.rhs, (alpha, beta), panels, opts)?;
    let tg = integrate_span(plus, &ga, g.rhs, (alpha, beta), panels, opts)?;
    Ok((tf, tg))
}

/// Composite-Simpson residual of the Lagrange identity; no contract applied.
pub fn lagrange_residual(
    a: &ShinZettlMatrix,
    f: &QuasiFunction<'_>,
    g: &QuasiFunction<'_>,
    range: (f64, f64),
    panels: usize,
    opts: OdeOptions,
) -> Result<LagrangeCheck> {
    let (alpha, beta) = range;
    let (lo, hi) = a.interval();
    if !(lo <= alpha && alpha < beta && beta <= hi) {
        return Err(Error::QuadratureFailure(format!(
            "[{alpha}, {beta}] is not a subinterval of [{lo}, {hi}]"
        )));
    }
    if panels < 2 || !panels.is_multiple_of(2) {
        return Err(Error::QuadratureFailure(format!(
            "Simpson needs an even panel count, got {panels}"
        )));
    }
    let (plus, used_adjoint) = adjoint_for(a)?;
    let (tf, tg) = trajectories(a, &plus, f, g, range, panels, opts)?;
    let integrand: Vec<Complex64> = tf
        .grid
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            let fv = tf.values[j][0];
            let gv = tg.values[j][0];
            gv.conj() * f.rhs.expression(x, fv) - fv * g.rhs.expression(x, gv).conj()
        })
        .collect();
    let integral = simpson(&integrand, (beta - alpha) / panels as f64);
    let boundary = bracket(tf.last(), tg.last()) - bracket(&tf.values[0], &tg.values[0]);
    Ok(LagrangeCheck {
        integral,
        boundary,
        residual: (integral - boundary).norm(),
        panels,
        used_adjoint,
    })
}

/// [`lagrange_residual`] with the contract `residual < tol_quad · (β − α)`.
pub fn verify_lagrange_identity(
    a: &ShinZettlMatrix,
    f: &QuasiFunction<'_>,
    g: &QuasiFunction<'_>,
    range: (f64, f64),
    panels: usize,
    opts: OdeOptions,
    tol_quad: f64,
) -> Result<LagrangeCheck> {
    let check = lagrange_residual(a, f, g, range, panels, opts)?;
    let bound = tol_quad * (range.1 - range.0);
    if !(check.residual < bound) {
        return Err(Error::QuadratureFailure(format!(
            "Lagrange residual {:.3e} exceeds {bound:.3e} with {panels} panels",
            check.residual
        )));
    }
    Ok(check)
}

/// Observed convergence of the Lagrange residual under panel refinement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceFit {
    /// `(h, residual)` per panel count.
    pub points: Vec<(f64, f64)>,
    /// Least-squares slope of `log residual` against `log h`.
    pub slope: f64,
}

pub fn convergence_order(
    a: &ShinZettlMatrix,
    f: &QuasiFunction<'_>,
    g: &QuasiFunction<'_>,
    range: (f64, f64),
    panel_counts: &[usize],
    opts: OdeOptions,
) -> Result<ConvergenceFit> {
    let mut points = Vec::with_capacity(panel_counts.len());
    for &p in panel_counts {
        let r = lagrange_residual(a, f, g, range, p, opts)?;
        points.push(((range.1 - range.0) / p as f64, r.residual));
    }
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.1 > 0.0)
        .map(|&(h, r)| (h.ln(), r.ln()))
        .collect();
    if logs.len() < 2 {
        return Err(Error::QuadratureFailure(
            "too few nonzero residuals to fit a convergence order".into(),
        ));
    }
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(ConvergenceFit {
        points,
        slope: sxy / sxx,
    })
}
