use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::{interpolate_uniform, Grid, ShinZettlMatrix};
use crate::error::{Error, Result};

pub const DEFAULT_TOL_ODE: f64 = 1e-10;
pub const DEFAULT_MAX_SUBSTEPS: usize = 4096;

/// Right-hand side of `M_A[f] = λ f + h(x)`.
#[derive(Clone, Copy, Default)]
pub struct QuasiRhs<'a> {
    pub lambda: Complex64,
    pub forcing: Option<&'a dyn Fn(f64) -> Complex64>,
}

impl<'a> QuasiRhs<'a> {
    pub fn homogeneous() -> Self {
        Self::default()
    }

    pub fn eigen(lambda: f64) -> Self {
        QuasiRhs {
            lambda: Complex64::new(lambda, 0.0),
            forcing: None,
        }
    }

    pub fn forced(forcing: &'a dyn Fn(f64) -> Complex64) -> Self {
        QuasiRhs {
            lambda: Complex64::new(0.0, 0.0),
            forcing: Some(forcing),
        }
    }

    /// `M_A[f](x)` given `f(x)`.
    pub fn expression(&self, x: f64, f: Complex64) -> Complex64 {
        let h = self.forcing.map_or(Complex64::new(0.0, 0.0), |h| h(x));
        self.lambda * f + h
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    /// Accepted Richardson estimate, scaled by `1 + |y|`.
    pub tol: f64,
    pub max_substeps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            tol: DEFAULT_TOL_ODE,
            max_substeps: DEFAULT_MAX_SUBSTEPS,
        }
    }
}

/// Sampled quasi-derivatives `f^[0..n−1]` plus `f^[n]` on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiDerivTrajectory {
    pub grid: Vec<f64>,
    pub values: Vec<Vec<Complex64>>,
    #[serde(rename = "final")]
    pub top: Vec<Complex64>,
    pub error_estimate: f64,
    pub substeps: usize,
}

impl QuasiDerivTrajectory {
    pub fn order(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    /// `M_A[f] = iⁿ f^[n]` at every node.
    pub fn expression_values(&self) -> Vec<Complex64> {
        let p = i_pow(self.order());
        self.top.iter().map(|v| p * v).collect()
    }

    pub fn component(&self, k: usize) -> Vec<Complex64> {
        self.values.iter().map(|v| v[k]).collect()
    }

    pub fn last(&self) -> &[Complex64] {
        self.values.last().expect("trajectory has nodes")
    }

    /// Cubic interpolation of `f^[k]` at `x`.
    pub fn eval(&self, k: usize, x: f64) -> Complex64 {
        let grid = Grid {
            a: self.grid[0],
            b: *self.grid.last().expect("non-empty"),
            nodes: self.grid.len(),
        };
        interpolate_uniform(grid, &self.component(k), x)
    }
}

/// `iⁿ`
pub fn i_pow(n: usize) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

struct System<'a> {
    a: &'a ShinZettlMatrix,
    rhs: QuasiRhs<'a>,
    inv_in: Complex64,
}

impl System<'_> {
    /// `y' = A(x) y + eₙ f^[n]` with `f^[n] = (λ y₀ + h) / iⁿ`.
    fn deriv(&self, x: f64, y: &[Complex64], out: &mut [Complex64]) {
        let n = y.len();
        for r in 0..n {
            let top = (r + 2).min(n);
            let mut acc = Complex64::new(0.0, 0.0);
            for (s, ys) in y.iter().enumerate().take(top) {
                acc += self.a.eval(r, s, x) * ys;
            }
            out[r] = acc;
        }
        out[n - 1] += self.top(x, y);
    }

    fn top(&self, x: f64, y: &[Complex64]) -> Complex64 {
        self.rhs.expression(x, y[0]) * self.inv_in
    }

    fn rk4_step(&self, x: f64, h: f64, y: &mut [Complex64], scratch: &mut [Vec<Complex64>; 5]) {
        let n = y.len();
        let [k1, k2, k3, k4, tmp] = scratch;
        self.deriv(x, y, k1);
        for i in 0..n {
            tmp[i] = y[i] + k1[i] * (0.5 * h);
        }
        self.deriv(x + 0.5 * h, tmp, k2);
        for i in 0..n {
            tmp[i] = y[i] + k2[i] * (0.5 * h);
        }
        self.deriv(x + 0.5 * h, tmp, k3);
        for i in 0..n {
            tmp[i] = y[i] + k3[i] * h;
        }
        self.deriv(x + h, tmp, k4);
        for i in 0..n {
            y[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
    }

    fn run(&self, xs: &[f64], y0: &[Complex64], substeps: usize) -> Vec<Vec<Complex64>> {
        let n = y0.len();
        let mut scratch: [Vec<Complex64>; 5] = std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); n]);
        let mut y = y0.to_vec();
        let mut out = Vec::with_capacity(xs.len());
        out.push(y.clone());
        for w in xs.windows(2) {
            let h = (w[1] - w[0]) / substeps as f64;
            for k in 0..substeps {
                self.rk4_step(w[0] + k as f64 * h, h, &mut y, &mut scratch);
            }
            out.push(y.clone());
        }
        out
    }
}

fn uniform(start: f64, end: f64, panels: usize) -> Vec<f64> {
    let h = (end - start) / panels as f64;
    (0..=panels)
        .map(|j| if j == panels { end } else { start + j as f64 * h })
        .collect()
}

/// Integrates the quasi-derivative system from `start` (where `initial`
/// holds `f^[0..n−1]`) to `end` on `panels` uniform panels, doubling RK4
/// substeps until the step-doubling estimate falls below `opts.tol`.
pub fn integrate_span(
    a: &ShinZettlMatrix,
    initial: &[Complex64],
    rhs: QuasiRhs<'_>,
    (start, end): (f64, f64),
    panels: usize,
    opts: OdeOptions,
) -> Result<QuasiDerivTrajectory> {
    let n = a.order();
    if initial.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: initial.len(),
        });
    }
    let (lo, hi) = a.interval();
    let slack = 1e-12 * (hi - lo);
    if start < lo - slack || end > hi + slack || start > hi + slack || end < lo - slack {
        return Err(Error::InvalidMatrix(format!(
            "span [{start}, {end}] leaves the interval [{lo}, {hi}]"
        )));
    }
    if panels == 0 {
        return Err(Error::InvalidMatrix("at least one panel is needed".into()));
    }
    let sys = System {
        a,
        rhs,
        inv_in: i_pow(n).inv(),
    };
    let xs = uniform(start, end, panels);
    let mut substeps = 1;
    let mut coarse = sys.run(&xs, initial, substeps);
    loop {
        let fine = sys.run(&xs, initial, 2 * substeps);
        let estimate = coarse
            .iter()
            .zip(&fine)
            .flat_map(|(c, f)| c.iter().zip(f).map(|(u, v)| (u - v).norm() / 15.0 / (1.0 + v.norm())))
            .fold(0.0, f64::max);
        substeps *= 2;
        if estimate < opts.tol {
            log::debug!("quasi-derivatives converged with {substeps} substeps (estimate {estimate:.2e})");
            let top = xs.iter().zip(&fine).map(|(&x, y)| sys.top(x, y)).collect();
            return Ok(QuasiDerivTrajectory {
                grid: xs,
                values: fine,
                top,
                error_estimate: estimate,
                substeps,
            });
        }
        if substeps >= opts.max_substeps || !estimate.is_finite() {
            return Err(Error::StepSizeTooCoarse {
                estimate,
                tolerance: opts.tol,
                substeps,
            });
        }
        coarse = fine;
    }
}

/// Integrates over the whole matrix interval on its own node grid,
/// with `initial` given at the left endpoint.
pub fn integrate_quasi_derivatives(
    a: &ShinZettlMatrix,
    initial: &[Complex64],
    rhs: QuasiRhs<'_>,
    opts: OdeOptions,
) -> Result<QuasiDerivTrajectory> {
    let grid = a.grid();
    integrate_span(a, initial, rhs, (grid.a, grid.b), grid.nodes - 1, opts)
}

/// Quasi-derivatives at `x`, starting from `initial` at the left endpoint.
pub fn state_at(
    a: &ShinZettlMatrix,
    initial: &[Complex64],
    rhs: QuasiRhs<'_>,
    x: f64,
    opts: OdeOptions,
) -> Result<Vec<Complex64>> {
    let start = a.interval().0;
    if x == start {
        return Ok(initial.to_vec());
    }
    let panels = (((x - start) / a.grid().step()).ceil() as usize).max(1);
    let t = integrate_span(a, initial, rhs, (start, x), panels, opts)?;
    Ok(t.last().to_vec())
}
