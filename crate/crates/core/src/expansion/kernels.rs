use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::catalog::{eigen_residuals, eigensolve, EigenData};
use crate::error::{Error, Result};
use crate::ordered_rep::OrderedRepresentation;
use crate::quasidiff::simpson;
use crate::realset::{RealSet, WeightedPPMeasure};
use crate::vectorop::EMZSystem;

/// Panels of the quadrature behind the Gram matrices.
pub const GRAM_PANELS: usize = 4000;
/// Decay lengths after which the half line is cut for quadrature.
pub const HALF_LINE_CUT: f64 = 40.0;

/// Where an entry of a kernel came from in the maximal-vector recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "from")]
pub enum Selection {
    /// The piece of the maximal vector carrying `λ`.
    Top,
    /// The `position`-th `min{·,·}` piece carrying `λ`.
    Lower { position: usize },
}

/// `Θ_k(·, λ)` at one atom: the slot eigenfunction scaled by `1/√θ({λ})`,
/// zero on every other coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelEntry {
    pub lambda: f64,
    pub slot: String,
    /// Index into the slot's eigen data.
    pub eigen_index: usize,
    /// `θ({λ})`.
    pub weight: f64,
    pub selection: Selection,
}

impl KernelEntry {
    pub fn scale(&self) -> f64 {
        1.0 / self.weight.sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenKernel {
    /// 1-based multiplicity slot.
    pub k: usize,
    /// Atoms of `s_k`.
    pub support: RealSet,
    pub entries: Vec<KernelEntry>,
}

impl EigenKernel {
    pub fn entry_at(&self, lambda: f64) -> Option<&KernelEntry> {
        let eps = self.support.eps();
        self.entries.iter().find(|e| (e.lambda - lambda).abs() <= eps)
    }
}

/// Kernels of a pure-point catalog system with the eigen data they refer to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSet {
    pub kernels: Vec<EigenKernel>,
    pub eigen: BTreeMap<String, EigenData>,
    pub weights: WeightedPPMeasure,
    /// Largest eigen-equation residual over all slots.
    pub max_residual: f64,
    /// Smallest Gram determinant of `Θ_1..Θ_n` over the atoms.
    pub min_gram_det: f64,
    /// `max_λ θ({λ})·|Θ_k(t, λ)|²` per slot: the essential bound in the truncated setting.
    pub sup_per_slot: BTreeMap<String, f64>,
}

impl KernelSet {
    /// `Θ_k(t, λ)` on coordinate `slot`.
    pub fn value(&self, entry: &KernelEntry, slot: &str, t: f64) -> Complex64 {
        if entry.slot != slot {
            return Complex64::new(0.0, 0.0);
        }
        self.eigen[slot].normalized(entry.eigen_index, t) * entry.scale()
    }

    /// Distinct atoms of θ, ascending.
    pub fn atoms(&self) -> Vec<f64> {
        self.weights.atoms().iter().map(|a| a.0).collect()
    }

    pub fn kernel(&self, k: usize) -> Option<&EigenKernel> {
        self.kernels.get(k - 1)
    }
}

/// Quadrature grid on the slot's coordinate interval.
pub(crate) fn coordinate_grid(data: &EigenData, panels: usize) -> (Vec<f64>, f64) {
    let (a, b) = data.domain;
    let b = if b.is_finite() {
        b
    } else {
        let len = data
            .functions
            .iter()
            .map(|f| match f {
                crate::catalog::Eigenfunction::Decay { length } => *length,
                _ => 1.0,
            })
            .fold(1.0, f64::max);
        a + HALF_LINE_CUT * len
    };
    let h = (b - a) / panels as f64;
    ((0..=panels).map(|j| a + j as f64 * h).collect(), h)
}

/// Kernels `Θ_k` following the provenance: at each atom the top piece gives
/// `Θ_1`, the pieces set aside give `Θ_2, Θ_3, …` in order.
pub fn build_kernels(sys: &EMZSystem, orep: &OrderedRepresentation) -> Result<KernelSet> {
    let window = sys.window();
    let mut eigen = BTreeMap::new();
    let mut max_residual: f64 = 0.0;
    for slot in sys.slots() {
        if slot.has_ac() {
            return Err(Error::SymbolicACUnsupported(slot.id.clone()));
        }
        let spec = slot
            .spec
            .as_ref()
            .ok_or_else(|| Error::UnsupportedFamily(format!("slot {} has no closed-form eigenfunctions", slot.id)))?;
        let data = eigensolve(spec, window)?;
        if data.len() != slot.point_spectrum().len() {
            return Err(Error::DimensionMismatch {
                expected: slot.point_spectrum().len(),
                got: data.len(),
            });
        }
        let eps = slot.class.pp_support().eps();
        for (a, b) in data.eigenvalues.iter().zip(slot.point_spectrum()) {
            if (a - b).abs() > eps {
                return Err(Error::InvalidMeasure(format!(
                    "slot {}: computed eigenvalue {a} does not match the subspectrum atom {b}",
                    slot.id
                )));
            }
        }
        let r = eigen_residuals(spec, &data)?;
        max_residual = max_residual.max(r.equation).max(r.boundary);
        eigen.insert(slot.id.clone(), data);
    }
    let weights = orep
        .theta_pp
        .clone()
        .ok_or_else(|| Error::InvalidMeasure("the ordered representation carries no point weights".into()))?;

    let mut kernels: Vec<EigenKernel> = (1..=orep.multiplicity)
        .map(|k| EigenKernel {
            k,
            support: RealSet::empty(window),
            entries: Vec::new(),
        })
        .collect();
    let mut sup_per_slot: BTreeMap<String, f64> = BTreeMap::new();
    let mut min_gram_det = f64::INFINITY;
    for &(lambda, weight) in weights.atoms() {
        let slots = orep.provenance.slots_at(lambda);
        let mut at = Vec::new();
        for (pos, id) in slots.iter().enumerate() {
            let data = &eigen[*id];
            let eps = weights_eps(sys, id);
            let j = data
                .index_of(lambda, eps)
                .ok_or_else(|| Error::InvalidMeasure(format!("{lambda} is not an eigenvalue of {id}")))?;
            let entry = KernelEntry {
                lambda,
                slot: id.to_string(),
                eigen_index: j,
                weight,
                selection: if pos == 0 {
                    Selection::Top
                } else {
                    Selection::Lower { position: pos }
                },
            };
            at.push(entry);
        }
        if at.len() > kernels.len() || !orep.s(at.len()).contains(lambda) {
            return Err(Error::InvalidMeasure(format!(
                "{} kernels at {lambda} disagree with the multiplicity sets",
                at.len()
            )));
        }
        min_gram_det = min_gram_det.min(gram_determinant(&eigen, &at));
        for (k, entry) in at.into_iter().enumerate() {
            let data = &eigen[&entry.slot];
            let (grid, _) = coordinate_grid(data, 200);
            let sup = grid
                .iter()
                .map(|t| data.normalized(entry.eigen_index, *t).norm_sqr())
                .fold(0.0, f64::max);
            let s = sup_per_slot.entry(entry.slot.clone()).or_insert(0.0);
            *s = s.max(sup);
            kernels[k].entries.push(entry);
        }
    }
    for ker in &mut kernels {
        let atoms = ker.entries.iter().map(|e| e.lambda).collect();
        ker.support = RealSet::from_atoms(window, atoms)?;
    }
    Ok(KernelSet {
        kernels,
        eigen,
        weights,
        max_residual,
        min_gram_det: if min_gram_det.is_finite() { min_gram_det } else { 0.0 },
        sup_per_slot,
    })
}

fn weights_eps(sys: &EMZSystem, slot: &str) -> f64 {
    sys.slot(slot)
        .map_or(crate::realset::DEFAULT_EPS_ATOM, |s| s.class.pp_support().eps())
}

/// Determinant of `(⟨Θ_a, Θ_b⟩)` for the kernels at one atom, by quadrature
/// on each coordinate.
fn gram_determinant(eigen: &BTreeMap<String, EigenData>, at: &[KernelEntry]) -> f64 {
    let n = at.len();
    let mut g = DMatrix::<Complex64>::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            if at[a].slot != at[b].slot {
                continue;
            }
            let data = &eigen[&at[a].slot];
            let (grid, h) = coordinate_grid(data, GRAM_PANELS);
            let vals: Vec<Complex64> = grid
                .iter()
                .map(|t| {
                    data.normalized(at[a].eigen_index, *t)
                        * data.normalized(at[b].eigen_index, *t).conj()
                        * (at[a].scale() * at[b].scale())
                })
                .collect();
            g[(a, b)] = simpson(&vals, h);
        }
    }
    g.determinant().re
}
