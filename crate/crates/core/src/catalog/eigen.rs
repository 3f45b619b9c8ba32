use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::family::{dirichlet_indices, impulse_eigenvalues, BoundaryParam, Family, KineticSign, OperatorSpec};
use crate::error::{Error, Result};
use crate::realset::{WeightedPPMeasure, Window, DEFAULT_EPS_ATOM};

/// Root tolerance for characteristic-function bisection.
pub const ROOT_TOL: f64 = 1e-12;
/// Number of points of the residual check grid.
pub const CHECK_POINTS: usize = 101;

/// Closed-form (unnormalized) eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Eigenfunction {
    /// `e^{iλt}`
    PlaneWave { lambda: f64 },
    /// `sin(ωt)`
    Sine { omega: f64 },
    /// `e^{−x/length}`
    Decay { length: f64 },
}

impl Eigenfunction {
    /// `d^order/dx^order` of the function at `x` (`order ≤ 2`).
    pub fn derivative(&self, order: u32, x: f64) -> Complex64 {
        match *self {
            Eigenfunction::PlaneWave { lambda } => {
                Complex64::new(0.0, lambda).powu(order) * Complex64::from_polar(1.0, lambda * x)
            }
            Eigenfunction::Sine { omega } => {
                let w = omega.powi(order as i32);
                let v = match order % 4 {
                    0 => (omega * x).sin(),
                    1 => (omega * x).cos(),
                    2 => -(omega * x).sin(),
                    _ => -(omega * x).cos(),
                };
                Complex64::new(w * v, 0.0)
            }
            Eigenfunction::Decay { length } => {
                Complex64::new((-1.0 / length).powi(order as i32) * (-x / length).exp(), 0.0)
            }
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.derivative(0, x)
    }
}

/// Eigenvalues in a window with closed-form eigenfunctions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenData {
    pub eigenvalues: Vec<f64>,
    pub functions: Vec<Eigenfunction>,
    /// L² norms of the unnormalized functions.
    pub norm_weights: Vec<f64>,
    /// Interval of the coordinate (`b = ∞` for the half line).
    pub domain: (f64, f64),
}

impl EigenData {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// L²-normalized eigenfunction `j` at `x`.
    pub fn normalized(&self, j: usize, x: f64) -> Complex64 {
        self.functions[j].eval(x) / self.norm_weights[j]
    }

    /// Index of the eigenvalue within `eps` of `lambda`.
    pub fn index_of(&self, lambda: f64, eps: f64) -> Option<usize> {
        self.eigenvalues.iter().position(|l| (l - lambda).abs() <= eps)
    }

    /// Uniform check grid on the domain (the half line is cut at ten decay lengths).
    pub fn check_grid(&self) -> Vec<f64> {
        let (a, b) = self.domain;
        let b = if b.is_finite() {
            b
        } else {
            let len = self
                .functions
                .iter()
                .map(|f| match f {
                    Eigenfunction::Decay { length } => *length,
                    _ => 1.0,
                })
                .fold(1.0, f64::max);
            a + 10.0 * len
        };
        (0..CHECK_POINTS)
            .map(|j| a + (b - a) * j as f64 / (CHECK_POINTS - 1) as f64)
            .collect()
    }
}

/// Largest boundary-condition and differential-equation residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenResiduals {
    pub boundary: f64,
    pub equation: f64,
}

/// `(τ − λ)u` at `x` for the family's expression.
fn equation_residual(family: &Family, f: &Eigenfunction, lambda: f64, x: f64) -> Result<Complex64> {
    let u = f.eval(x);
    let tau = match family {
        Family::HalfLineKinetic {
            sign: KineticSign::Minus,
            ..
        }
        | Family::DirichletSLOnPi => -f.derivative(2, x),
        Family::HalfLineKinetic {
            sign: KineticSign::Plus,
            ..
        } => f.derivative(2, x),
        Family::ImpulseOnUnit { .. } => f.derivative(1, x) * Complex64::new(0.0, -1.0),
        other => return Err(Error::UnsupportedFamily(other.name().into())),
    };
    Ok(tau - u * lambda)
}

fn boundary_residual(family: &Family, f: &Eigenfunction) -> Result<f64> {
    Ok(match family {
        Family::HalfLineKinetic { k, .. } => match k {
            BoundaryParam::Finite(k) => (f.eval(0.0) + f.derivative(1, 0.0) * *k).norm(),
            BoundaryParam::Infinite => f.derivative(1, 0.0).norm(),
        },
        Family::ImpulseOnUnit { alpha } => (f.eval(0.0) - Complex64::from_polar(1.0, *alpha) * f.eval(1.0)).norm(),
        Family::DirichletSLOnPi => f.eval(0.0).norm().max(f.eval(PI).norm()),
        other => return Err(Error::UnsupportedFamily(other.name().into())),
    })
}

/// Residuals of normalized eigenfunctions on the check grid.
pub fn eigen_residuals(spec: &OperatorSpec, data: &EigenData) -> Result<EigenResiduals> {
    let grid = data.check_grid();
    let mut out = EigenResiduals {
        boundary: 0.0,
        equation: 0.0,
    };
    for (j, f) in data.functions.iter().enumerate() {
        let scale = data.norm_weights[j];
        out.boundary = out.boundary.max(boundary_residual(&spec.family, f)? / scale);
        for &x in &grid {
            let r = equation_residual(&spec.family, f, data.eigenvalues[j], x)?.norm() / scale;
            out.equation = out.equation.max(r);
        }
    }
    Ok(out)
}

/// Sign-change bisection to [`ROOT_TOL`].
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Option<f64> {
    let mut flo = f(lo);
    if flo == 0.0 {
        return Some(lo);
    }
    if flo * f(hi) > 0.0 {
        return None;
    }
    while hi - lo > ROOT_TOL * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Characteristic function of the Dirichlet problem on `[0, π]`: the value
/// at `π` of the solution with `u(0) = 0`, `u′(0) = 1`.
pub fn dirichlet_characteristic(lambda: f64) -> f64 {
    if lambda > 0.0 {
        let w = lambda.sqrt();
        (w * PI).sin() / w
    } else if lambda < 0.0 {
        let w = (-lambda).sqrt();
        (w * PI).sinh() / w
    } else {
        PI
    }
}

/// Eigenvalues and eigenfunctions of a pure-point family in the window.
pub fn eigensolve(spec: &OperatorSpec, window: Window) -> Result<EigenData> {
    let data = match &spec.family {
        Family::ImpulseOnUnit { alpha } => {
            let eigenvalues = impulse_eigenvalues(*alpha, window);
            EigenData {
                functions: eigenvalues
                    .iter()
                    .map(|&lambda| Eigenfunction::PlaneWave { lambda })
                    .collect(),
                norm_weights: vec![1.0; eigenvalues.len()],
                eigenvalues,
                domain: (0.0, 1.0),
            }
        }
        Family::DirichletSLOnPi => {
            let mut eigenvalues = Vec::new();
            for n in dirichlet_indices(window) {
                let n = n as f64;
                let lo = (n - 0.5) * (n - 0.5);
                let hi = (n + 0.5) * (n + 0.5);
                let root = bisect(dirichlet_characteristic, lo, hi).ok_or_else(|| {
                    Error::QuadratureFailure(format!("no sign change of the characteristic in [{lo}, {hi}]"))
                })?;
                if window.contains(root) {
                    eigenvalues.push(root);
                }
            }
            let functions: Vec<Eigenfunction> = eigenvalues
                .iter()
                .map(|l| Eigenfunction::Sine { omega: l.sqrt() })
                .collect();
            let norm_weights = functions
                .iter()
                .map(|f| match f {
                    Eigenfunction::Sine { omega } => (PI / 2.0 - (2.0 * omega * PI).sin() / (4.0 * omega)).sqrt(),
                    _ => unreachable!(),
                })
                .collect();
            EigenData {
                eigenvalues,
                functions,
                norm_weights,
                domain: (0.0, PI),
            }
        }
        Family::HalfLineKinetic { sign, k } => {
            let length = k
                .bound_state_length()
                .ok_or_else(|| Error::ContinuousSpectrumOnly(spec.id.clone()))?;
            let lambda = match sign {
                KineticSign::Minus => -1.0 / (length * length),
                KineticSign::Plus => 1.0 / (length * length),
            };
            let mut data = EigenData {
                eigenvalues: Vec::new(),
                functions: Vec::new(),
                norm_weights: Vec::new(),
                domain: (0.0, f64::INFINITY),
            };
            if window.contains(lambda) {
                data.eigenvalues.push(lambda);
                data.functions.push(Eigenfunction::Decay { length });
                data.norm_weights.push((length / 2.0).sqrt());
            }
            data
        }
        other => return Err(Error::UnsupportedFamily(other.name().into())),
    };
    let r = eigen_residuals(spec, &data)?;
    log::debug!(
        "{}: {} eigenvalues, residuals bc {:.2e} eq {:.2e}",
        spec.id,
        data.len(),
        r.boundary,
        r.equation
    );
    Ok(data)
}

/// Spectral measure `μ_x(Δ) = Σ_{λ∈Δ} |c_λ|²` of a vector with eigen-coefficients `coeffs`.
pub fn vector_spectral_measure(data: &EigenData, coeffs: &[Complex64]) -> Result<WeightedPPMeasure> {
    if coeffs.len() != data.len() {
        return Err(Error::DimensionMismatch {
            expected: data.len(),
            got: coeffs.len(),
        });
    }
    let atoms = data
        .eigenvalues
        .iter()
        .zip(coeffs)
        .map(|(l, c)| (*l, c.norm_sqr()))
        .filter(|a| a.1 > 0.0)
        .collect();
    WeightedPPMeasure::new(atoms, DEFAULT_EPS_ATOM)
}
