use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::kernels::{KernelEntry, KernelSet};
use crate::catalog::{Family, KineticSign};
use crate::error::{Error, Result};
use crate::realset::{RealSet, WeightedPPMeasure};
use crate::vectorop::EMZSystem;

/// Tolerance of the pointwise reassembly check, relative to `max(1, sup|Θ|)`.
pub const REASSEMBLY_TOL: f64 = 1e-10;

/// Closed-form solution of `τu = λu`, entire in `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionKind {
    /// `e^{iλt}` for `−i d/dt`.
    PlaneWave,
    /// `cos(ωt)`.
    Cosine,
    /// `sin(ωt)/ω` (`t` at `ω = 0`).
    Sine,
}

/// `σ_s`: one solution on one coordinate. `ω² = sign·λ` for the second-order families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionBasis {
    pub slot: String,
    pub kind: SolutionKind,
    /// `+1` for `−d²`, `−1` for `+d²`; unused for the plane wave.
    pub sign: f64,
}

impl SolutionBasis {
    pub fn omega(&self, lambda: f64) -> Complex64 {
        Complex64::new(self.sign * lambda, 0.0).sqrt()
    }

    pub fn eval(&self, t: f64, lambda: f64) -> Complex64 {
        match self.kind {
            SolutionKind::PlaneWave => Complex64::from_polar(1.0, lambda * t),
            SolutionKind::Cosine => (self.omega(lambda) * t).cos(),
            SolutionKind::Sine => {
                let w = self.omega(lambda);
                if w.norm() < 1e-300 {
                    Complex64::new(t, 0.0)
                } else {
                    (w * t).sin() / w
                }
            }
        }
    }
}

/// `γ_{·k}(λ)` over the global basis at one atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomGamma {
    pub lambda: f64,
    pub gamma: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelDecomposition {
    pub k: usize,
    /// Basis functions with a non-zero coefficient somewhere.
    pub m_k: usize,
    pub atoms: Vec<AtomGamma>,
}

/// `Θ_k(·,λ) = Σ_s γ_{sk}(λ) σ_s(·,λ)` over a basis shared by all `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticDecomposition {
    pub basis: Vec<SolutionBasis>,
    pub kernels: Vec<KernelDecomposition>,
    /// Largest reassembly error over all atoms and check grids.
    pub max_reassembly_error: f64,
}

impl AnalyticDecomposition {
    /// The decomposition of `Θ_k`, empty beyond the multiplicity.
    pub fn kernel(&self, k: usize) -> KernelDecomposition {
        self.kernels.get(k - 1).cloned().unwrap_or(KernelDecomposition {
            k,
            m_k: 0,
            atoms: Vec::new(),
        })
    }
}

fn basis_of(sys: &EMZSystem, slot: &str) -> Result<Vec<SolutionBasis>> {
    let s = sys
        .slot(slot)
        .ok_or_else(|| Error::Schema(format!("unknown slot {slot:?}")))?;
    let family = s.spec.as_ref().map(|o| &o.family);
    let second = |sign: f64| {
        vec![
            SolutionBasis {
                slot: slot.to_string(),
                kind: SolutionKind::Cosine,
                sign,
            },
            SolutionBasis {
                slot: slot.to_string(),
                kind: SolutionKind::Sine,
                sign,
            },
        ]
    };
    match family {
        Some(Family::ImpulseOnUnit { .. }) => Ok(vec![SolutionBasis {
            slot: slot.to_string(),
            kind: SolutionKind::PlaneWave,
            sign: 0.0,
        }]),
        Some(Family::DirichletSLOnPi)
        | Some(Family::HalfLineKinetic {
            sign: KineticSign::Minus,
            ..
        }) => Ok(second(1.0)),
        Some(Family::HalfLineKinetic {
            sign: KineticSign::Plus,
            ..
        }) => Ok(second(-1.0)),
        Some(other) => Err(Error::UnknownSolutionBasis(other.name().into())),
        None => Err(Error::UnknownSolutionBasis(slot.into())),
    }
}

/// Coefficients from the Cauchy data at the left end `0` of every catalog domain.
fn gamma_at(ks: &KernelSet, e: &KernelEntry, basis: &SolutionBasis) -> Complex64 {
    let data = &ks.eigen[&e.slot];
    let f = &data.functions[e.eigen_index];
    let scale = e.scale() / data.norm_weights[e.eigen_index];
    match basis.kind {
        SolutionKind::PlaneWave | SolutionKind::Cosine => f.eval(0.0) * scale,
        SolutionKind::Sine => f.derivative(1, 0.0) * scale,
    }
}

pub fn analytic_decomposition(sys: &EMZSystem, ks: &KernelSet) -> Result<AnalyticDecomposition> {
    let mut basis = Vec::new();
    for slot in sys.slots() {
        basis.extend(basis_of(sys, &slot.id)?);
    }
    let m = basis.len();
    let mut max_err: f64 = 0.0;
    let mut kernels = Vec::new();
    for ker in &ks.kernels {
        let mut used = vec![false; m];
        let mut atoms = Vec::new();
        for e in &ker.entries {
            let mut gamma = vec![Complex64::new(0.0, 0.0); m];
            for (s, b) in basis.iter().enumerate() {
                if b.slot == e.slot {
                    gamma[s] = gamma_at(ks, e, b);
                    used[s] |= gamma[s].norm() > 0.0;
                }
            }
            let grid = ks.eigen[&e.slot].check_grid();
            let vals: Vec<Complex64> = grid.iter().map(|t| ks.value(e, &e.slot, *t)).collect();
            let sup = vals.iter().map(|v| v.norm()).fold(1.0, f64::max);
            for (t, want) in grid.iter().zip(&vals) {
                let got: Complex64 = basis
                    .iter()
                    .zip(&gamma)
                    .filter(|(b, _)| b.slot == e.slot)
                    .map(|(b, g)| g * b.eval(*t, e.lambda))
                    .sum();
                let err = (got - want).norm() / sup;
                max_err = max_err.max(err);
            }
            atoms.push(AtomGamma {
                lambda: e.lambda,
                gamma,
            });
        }
        kernels.push(KernelDecomposition {
            k: ker.k,
            m_k: used.iter().filter(|u| **u).count(),
            atoms,
        });
    }
    if max_err > REASSEMBLY_TOL {
        log::warn!("analytic reassembly error {max_err:e} exceeds {REASSEMBLY_TOL:e}");
    }
    Ok(AnalyticDecomposition {
        basis,
        kernels,
        max_reassembly_error: max_err,
    })
}

/// `ϱ(Δ)` with its symmetry and positivity diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixSpectralMeasure {
    pub dimension: usize,
    pub basis: Vec<SolutionBasis>,
    /// Row-major `ϱ_{sp}(Δ)`.
    pub entries: Vec<Vec<Complex64>>,
    pub hermitian_defect: f64,
    pub min_eigenvalue: f64,
}

impl MatrixSpectralMeasure {
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let n = self.dimension;
        DMatrix::from_fn(n, n, |r, c| self.entries[r][c])
    }

    /// `Σ_{s,p} ϱ_{sp} ξ_s conj(ξ_p)`.
    pub fn quadratic_form(&self, xi: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (s, row) in self.entries.iter().enumerate() {
            for (p, v) in row.iter().enumerate() {
                acc += v * xi[s] * xi[p].conj();
            }
        }
        acc
    }
}

/// `ϱ_{sp}(Δ) = Σ_k Σ_{λ∈Δ} γ_{sk}(λ) conj(γ_{pk}(λ)) θ({λ})`.
pub fn matrix_measure(
    decomp: &AnalyticDecomposition,
    theta_pp: &WeightedPPMeasure,
    delta: &RealSet,
) -> MatrixSpectralMeasure {
    let n = decomp.basis.len();
    let mut rho = DMatrix::<Complex64>::zeros(n, n);
    let eps = delta.eps();
    for kd in &decomp.kernels {
        for a in &kd.atoms {
            if !delta.contains(a.lambda) {
                continue;
            }
            let w = theta_pp.weight_at(a.lambda, eps);
            for s in 0..n {
                if a.gamma[s].norm_sqr() == 0.0 {
                    continue;
                }
                for p in 0..n {
                    rho[(s, p)] += a.gamma[s] * a.gamma[p].conj() * w;
                }
            }
        }
    }
    let defect = (&rho - rho.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max);
    let min_eigenvalue = if n == 0 {
        0.0
    } else {
        let sym = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
        sym.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    };
    MatrixSpectralMeasure {
        dimension: n,
        basis: decomp.basis.clone(),
        entries: (0..n).map(|r| (0..n).map(|c| rho[(r, c)]).collect()).collect(),
        hermitian_defect: defect,
        min_eigenvalue,
    }
}
