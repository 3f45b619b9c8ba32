use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::kernels::KernelSet;
use crate::error::{Error, Result};
use crate::realset::RealSet;
use crate::vectorop::{check_bounded, check_pp_vector, EMZSystem, SlotVector, VectorFunction};

/// `(Uw)^k(λ)` at one atom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub lambda: f64,
    pub value: Complex64,
    /// `θ({λ})`.
    pub weight: f64,
}

impl Coefficient {
    /// `value·√θ({λ})`: the coefficient against the normalized eigenvector.
    pub fn amplitude(&self) -> Complex64 {
        self.value * self.weight.sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionCoefficients {
    /// `per_kernel[k-1]`, ascending in `λ`.
    pub per_kernel: Vec<Vec<Coefficient>>,
}

impl ExpansionCoefficients {
    /// `Σ_k Σ_λ |(Uw)^k(λ)|²·θ({λ})`.
    pub fn weighted_norm_sqr(&self) -> f64 {
        self.per_kernel
            .iter()
            .flatten()
            .map(|c| c.value.norm_sqr() * c.weight)
            .sum()
    }

    pub fn get(&self, k: usize, lambda: f64, eps: f64) -> Option<Complex64> {
        self.per_kernel
            .get(k - 1)?
            .iter()
            .find(|c| (c.lambda - lambda).abs() <= eps)
            .map(|c| c.value)
    }
}

/// `(Uw)^k(λ) = ⟨w, Θ_k(·,λ)⟩`, read off the eigenbasis coefficients of `w`.
pub fn transform(sys: &EMZSystem, ks: &KernelSet, w: &VectorFunction) -> Result<ExpansionCoefficients> {
    check_pp_vector(sys, w)?;
    let per_kernel = ks
        .kernels
        .iter()
        .map(|ker| {
            ker.entries
                .iter()
                .map(|e| {
                    let c = w
                        .slots
                        .get(&e.slot)
                        .map_or(Complex64::new(0.0, 0.0), |v| v.coeffs[e.eigen_index]);
                    Coefficient {
                        lambda: e.lambda,
                        value: c * e.scale(),
                        weight: e.weight,
                    }
                })
                .collect()
        })
        .collect();
    Ok(ExpansionCoefficients { per_kernel })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    pub vector: VectorFunction,
    /// Atoms used, ascending.
    pub kept: Vec<f64>,
    /// `Σ |c|²·θ` over the dropped atoms.
    pub tail: f64,
}

/// `Σ_k Σ_λ (Uw)^k(λ) Θ_k(·,λ) θ({λ})`, over the `truncation` atoms closest
/// to zero (all atoms when `None`).
pub fn expand(
    sys: &EMZSystem,
    ks: &KernelSet,
    coeffs: &ExpansionCoefficients,
    truncation: Option<usize>,
) -> Result<Reconstruction> {
    if coeffs.per_kernel.len() > ks.kernels.len() {
        return Err(Error::DimensionMismatch {
            expected: ks.kernels.len(),
            got: coeffs.per_kernel.len(),
        });
    }
    let mut atoms = ks.atoms();
    if let Some(n) = truncation {
        atoms.sort_by(|a, b| a.abs().total_cmp(&b.abs()).then(a.total_cmp(b)));
        atoms.truncate(n);
        atoms.sort_by(f64::total_cmp);
    }
    let eps = atom_eps(ks);
    let kept = |l: f64| atoms.iter().any(|a| (a - l).abs() <= eps);

    let mut vector = VectorFunction::zero(sys);
    let mut tail = 0.0;
    for (ker, cs) in ks.kernels.iter().zip(&coeffs.per_kernel) {
        for c in cs {
            if !kept(c.lambda) {
                tail += c.value.norm_sqr() * c.weight;
                continue;
            }
            let e = ker
                .entry_at(c.lambda)
                .ok_or_else(|| Error::InvalidMeasure(format!("no kernel {} entry at {}", ker.k, c.lambda)))?;
            let v = vector.slots.get_mut(&e.slot).expect("zero vector has every slot");
            v.coeffs[e.eigen_index] += c.value * e.weight * e.scale();
        }
    }
    Ok(Reconstruction {
        vector,
        kept: atoms,
        tail,
    })
}

fn atom_eps(ks: &KernelSet) -> f64 {
    ks.kernels
        .first()
        .map_or(crate::realset::DEFAULT_EPS_ATOM, |k| k.support.eps())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParsevalReport {
    pub norm_sqr: f64,
    pub coefficient_sum: f64,
    pub residual: f64,
}

pub fn parseval(w: &VectorFunction, coeffs: &ExpansionCoefficients) -> ParsevalReport {
    let norm_sqr = w.norm_sqr();
    let coefficient_sum = coeffs.weighted_norm_sqr();
    ParsevalReport {
        norm_sqr,
        coefficient_sum,
        residual: (norm_sqr - coefficient_sum).abs(),
    }
}

/// `K(F; ·,·) = Σ_k ∫_Δ F Θ_k conj(Θ_k) dθ`, kept as the multiplier `F(λ)χ_Δ(λ)`
/// per kernel entry.
#[derive(Debug, Clone)]
pub struct KernelOperator<'a> {
    ks: &'a KernelSet,
    /// `multipliers[k-1][j]` for `ks.kernels[k-1].entries[j]`.
    multipliers: Vec<Vec<Complex64>>,
}

pub fn kernel_operator<'a>(
    sys: &EMZSystem,
    ks: &'a KernelSet,
    f: &dyn Fn(f64) -> Complex64,
    delta: &RealSet,
) -> Result<KernelOperator<'a>> {
    check_bounded(sys, f)?;
    let multipliers = ks
        .kernels
        .iter()
        .map(|ker| {
            ker.entries
                .iter()
                .map(|e| {
                    if delta.contains(e.lambda) {
                        f(e.lambda)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect()
        })
        .collect();
    Ok(KernelOperator { ks, multipliers })
}

impl KernelOperator<'_> {
    /// `(Kf)(x) = Σ_k Σ_{λ∈Δ} F(λ) Θ_k(x,λ) ⟨f, Θ_k(·,λ)⟩ θ({λ})`.
    pub fn apply(&self, sys: &EMZSystem, f: &VectorFunction) -> Result<VectorFunction> {
        check_pp_vector(sys, f)?;
        let mut out = VectorFunction::zero(sys);
        for (ker, mult) in self.ks.kernels.iter().zip(&self.multipliers) {
            for (e, m) in ker.entries.iter().zip(mult) {
                let Some(v) = f.slots.get(&e.slot) else { continue };
                let inner = v.coeffs[e.eigen_index] * e.scale();
                let o: &mut SlotVector = out.slots.get_mut(&e.slot).expect("zero vector has every slot");
                o.coeffs[e.eigen_index] += m * inner * e.weight * e.scale();
            }
        }
        Ok(out)
    }

    /// `K(F; x, s)` with `x` on coordinate `x_slot` and `s` on `s_slot`.
    pub fn sample(&self, x_slot: &str, x: f64, s_slot: &str, s: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (ker, mult) in self.ks.kernels.iter().zip(&self.multipliers) {
            for (e, m) in ker.entries.iter().zip(mult) {
                if e.slot != x_slot || e.slot != s_slot || m.norm_sqr() == 0.0 {
                    continue;
                }
                acc += m * self.ks.value(e, x_slot, x) * self.ks.value(e, s_slot, s).conj() * e.weight;
            }
        }
        acc
    }
}
