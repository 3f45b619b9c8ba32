use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::coloring::PartitionResult;
use super::system::{check_pp_vector, EMZSystem, SlotVector, VectorFunction};
use crate::error::{Error, Result};
use crate::realset::RealSet;

/// Number of probe points used to check boundedness of a function on the window.
pub const BOUNDEDNESS_PROBES: usize = 1001;

/// One slot's share of a group cyclic vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanComponent {
    pub slot: String,
    /// `(λ, coefficient)` over the slot's eigen-basis.
    pub point_coefficients: Vec<(f64, f64)>,
    /// Continuous support carried symbolically.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ac_support: Option<RealSet>,
}

/// `a_k = ⊕_{i∈A_k} a_i` for one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanVector {
    pub group: usize,
    pub components: Vec<PlanComponent>,
}

impl PlanVector {
    /// Squared norm of the point part.
    pub fn point_norm_sqr(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.point_coefficients.iter())
            .map(|(_, a)| a * a)
            .sum()
    }

    /// The point part as a vector function.
    pub fn to_vector(&self, sys: &EMZSystem) -> VectorFunction {
        let mut out = VectorFunction::default();
        for c in &self.components {
            if sys.slot(&c.slot).is_some_and(|s| s.has_ac()) {
                continue;
            }
            out.slots.insert(
                c.slot.clone(),
                SlotVector {
                    coeffs: c
                        .point_coefficients
                        .iter()
                        .map(|(_, a)| Complex64::new(*a, 0.0))
                        .collect(),
                    ac: None,
                },
            );
        }
        out
    }
}

/// Cyclic vectors of the groups: every eigen-coefficient equal, normalized over the group.
pub fn cyclic_vector_plan(sys: &EMZSystem, partition: &PartitionResult) -> Result<Vec<PlanVector>> {
    partition
        .groups
        .iter()
        .enumerate()
        .map(|(k, group)| {
            let slots = group
                .iter()
                .map(|id| {
                    sys.slot(id)
                        .ok_or_else(|| Error::Schema(format!("partition names unknown slot {id:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            let atoms: usize = slots.iter().map(|s| s.point_spectrum().len()).sum();
            let a = if atoms > 0 { 1.0 / (atoms as f64).sqrt() } else { 0.0 };
            let components = slots
                .iter()
                .map(|s| PlanComponent {
                    slot: s.id.clone(),
                    point_coefficients: s.point_spectrum().iter().map(|l| (*l, a)).collect(),
                    ac_support: s.has_ac().then(|| s.class.ac_support().clone()),
                })
                .collect();
            Ok(PlanVector { group: k, components })
        })
        .collect()
}

/// `E(Δ)x = ⊕ E^i(Δ)x_i` and its squared norm `Σ_i ‖E^i(Δ)x_i‖²`.
pub fn identity_resolution_apply(
    sys: &EMZSystem,
    delta: &RealSet,
    x: &VectorFunction,
) -> Result<(VectorFunction, f64)> {
    check_pp_vector(sys, x)?;
    let mut out = VectorFunction::default();
    let mut norm2 = 0.0;
    for (id, v) in &x.slots {
        let slot = sys.slot(id).expect("checked");
        let coeffs: Vec<Complex64> = slot
            .point_spectrum()
            .iter()
            .zip(&v.coeffs)
            .map(|(l, c)| {
                if delta.contains(*l) {
                    *c
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        norm2 += coeffs.iter().map(Complex64::norm_sqr).sum::<f64>();
        out.slots.insert(id.clone(), SlotVector { coeffs, ac: None });
    }
    Ok((out, norm2))
}

/// A function given by samples, linearly interpolated and zero outside the sample range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    pub xs: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn new(xs: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if xs.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: xs.len(),
                got: values.len(),
            });
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Schema("sample abscissae must increase strictly".into()));
        }
        Ok(SampledFunction { xs, values })
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let n = self.xs.len();
        if n == 0 || x < self.xs[0] || x > self.xs[n - 1] {
            return Complex64::new(0.0, 0.0);
        }
        let j = self.xs.partition_point(|p| *p <= x);
        if j == n {
            return self.values[n - 1];
        }
        let (x0, x1) = (self.xs[j - 1], self.xs[j]);
        let t = (x - x0) / (x1 - x0);
        self.values[j - 1] * (1.0 - t) + self.values[j] * t
    }
}

/// Rejects functions that are non-finite on the probe grid or at an eigenvalue.
pub(crate) fn check_bounded(sys: &EMZSystem, f: &dyn Fn(f64) -> Complex64) -> Result<()> {
    let w = sys.window();
    let probes = (0..BOUNDEDNESS_PROBES).map(|j| w.lo + w.width() * j as f64 / (BOUNDEDNESS_PROBES - 1) as f64);
    let atoms = sys.slots().iter().flat_map(|s| s.point_spectrum().iter().copied());
    for x in probes.chain(atoms) {
        let v = f(x);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::UnboundedFunction(x));
        }
    }
    Ok(())
}

/// `f(T)x = ⊕ f(T_i)x_i`: every coefficient `c_λ` becomes `f(λ)c_λ`.
pub fn borel_calculus_apply(
    sys: &EMZSystem,
    f: &dyn Fn(f64) -> Complex64,
    x: &VectorFunction,
) -> Result<VectorFunction> {
    check_pp_vector(sys, x)?;
    check_bounded(sys, f)?;
    let mut out = VectorFunction::default();
    for (id, v) in &x.slots {
        let slot = sys.slot(id).expect("checked");
        let coeffs = slot
            .point_spectrum()
            .iter()
            .zip(&v.coeffs)
            .map(|(l, c)| f(*l) * c)
            .collect();
        out.slots.insert(id.clone(), SlotVector { coeffs, ac: None });
    }
    Ok(out)
}
