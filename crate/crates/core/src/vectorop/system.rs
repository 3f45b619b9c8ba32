use std::collections::{BTreeMap, HashSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::catalog::{ordered_rep_data, OperatorSpec, OrderedRepData};
use crate::error::{Error, Result};
use crate::realset::{SpectralMeasureClass, WeightedPPMeasure, Window};

/// One simple coordinate after redesignation: level `p` of operator `source`.
#[derive(Debug, Clone, PartialEq)]
pub struct Slot {
    pub id: String,
    pub source: String,
    /// 1-based level within the source operator.
    pub level: usize,
    /// Spectral class of the slot's cyclic vector (`θ_i` restricted to `e_p`).
    pub class: SpectralMeasureClass,
    pub pp_weights: Option<WeightedPPMeasure>,
    /// Present for concrete catalog families (always single-level).
    pub spec: Option<OperatorSpec>,
}

impl Slot {
    /// Eigenvalues in the window; the coefficient basis of the slot.
    pub fn point_spectrum(&self) -> &[f64] {
        self.class.pp_support().atoms()
    }

    pub fn has_ac(&self) -> bool {
        !self.class.ac_support().is_empty()
    }
}

/// A window-truncated multi-interval system with every coordinate simple.
#[derive(Debug, Clone, PartialEq)]
pub struct EMZSystem {
    window: Window,
    operators: Vec<OperatorSpec>,
    reps: Vec<OrderedRepData>,
    slots: Vec<Slot>,
}

impl EMZSystem {
    pub fn new(window: Window, operators: Vec<OperatorSpec>) -> Result<Self> {
        let mut seen = HashSet::new();
        for op in &operators {
            if !seen.insert(op.id.clone()) {
                return Err(Error::Schema(format!("duplicate operator id {:?}", op.id)));
            }
        }
        let mut reps = Vec::with_capacity(operators.len());
        let mut slots = Vec::new();
        for op in &operators {
            let rep = ordered_rep_data(op, window)?;
            let m = rep.multiplicity();
            for (p, e) in rep.mult_sets.iter().enumerate() {
                let class = rep.theta.restrict(e)?;
                let pp_weights = match &rep.pp_weights {
                    Some(w) => {
                        let kept: Vec<(f64, f64)> = w
                            .atoms()
                            .iter()
                            .copied()
                            .filter(|(l, _)| class.pp_support().contains(*l))
                            .collect();
                        (!kept.is_empty())
                            .then(|| WeightedPPMeasure::new(kept, class.pp_support().eps()))
                            .transpose()?
                    }
                    None => None,
                };
                let id = if m == 1 {
                    op.id.clone()
                } else {
                    format!("{}#{}", op.id, p + 1)
                };
                if m > 1 && !seen.insert(id.clone()) {
                    return Err(Error::Schema(format!("slot id {id:?} collides with an operator id")));
                }
                slots.push(Slot {
                    id,
                    source: op.id.clone(),
                    level: p + 1,
                    class,
                    pp_weights,
                    spec: op.family.is_concrete().then(|| op.clone()),
                });
            }
            reps.push(rep);
        }
        Ok(EMZSystem {
            window,
            operators,
            reps,
            slots,
        })
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn operators(&self) -> &[OperatorSpec] {
        &self.operators
    }

    /// Ordered-representation data of each operator, aligned with [`Self::operators`].
    pub fn operator_reps(&self) -> &[OrderedRepData] {
        &self.reps
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn slot(&self, id: &str) -> Option<&Slot> {
        self.slots.iter().find(|s| s.id == id)
    }

    pub fn slot_index(&self, id: &str) -> Option<usize> {
        self.slots.iter().position(|s| s.id == id)
    }

    /// `max m_i` over the operators before splitting.
    pub fn max_multiplicity(&self) -> usize {
        self.reps.iter().map(OrderedRepData::multiplicity).max().unwrap_or(0)
    }

    /// `Σ m_i`.
    pub fn total_multiplicity(&self) -> usize {
        self.reps.iter().map(OrderedRepData::multiplicity).sum()
    }

    /// True when no slot carries a continuous part.
    pub fn is_pure_point(&self) -> bool {
        self.slots.iter().all(|s| !s.has_ac())
    }
}

/// Coefficients of one slot component over its eigen-basis.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SlotVector {
    pub coeffs: Vec<Complex64>,
    /// Tag of a symbolic continuous component, which no calculus here evaluates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ac: Option<String>,
}

/// `⊕ x_i`; slots that are absent are zero.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct VectorFunction {
    pub slots: BTreeMap<String, SlotVector>,
}

impl VectorFunction {
    /// The zero vector with explicit zero coefficients on every pure-point slot.
    pub fn zero(sys: &EMZSystem) -> Self {
        let slots = sys
            .slots()
            .iter()
            .filter(|s| !s.has_ac())
            .map(|s| {
                (
                    s.id.clone(),
                    SlotVector {
                        coeffs: vec![Complex64::new(0.0, 0.0); s.point_spectrum().len()],
                        ac: None,
                    },
                )
            })
            .collect();
        VectorFunction { slots }
    }

    /// Normalized eigenvector of `slot` at `lambda`.
    pub fn eigenvector(sys: &EMZSystem, slot: &str, lambda: f64) -> Result<Self> {
        let s = sys
            .slot(slot)
            .ok_or_else(|| Error::Schema(format!("unknown slot {slot:?}")))?;
        let j = basis_index(s, lambda)?;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); s.point_spectrum().len()];
        coeffs[j] = Complex64::new(1.0, 0.0);
        let mut slots = BTreeMap::new();
        slots.insert(slot.to_string(), SlotVector { coeffs, ac: None });
        Ok(VectorFunction { slots })
    }

    /// Builds a vector from `(λ, c)` pairs per slot.
    pub fn from_pairs(sys: &EMZSystem, pairs: &BTreeMap<String, Vec<(f64, Complex64)>>) -> Result<Self> {
        let mut slots = BTreeMap::new();
        for (id, list) in pairs {
            let s = sys
                .slot(id)
                .ok_or_else(|| Error::Schema(format!("unknown slot {id:?}")))?;
            let mut coeffs = vec![Complex64::new(0.0, 0.0); s.point_spectrum().len()];
            for &(l, c) in list {
                coeffs[basis_index(s, l)?] += c;
            }
            slots.insert(id.clone(), SlotVector { coeffs, ac: None });
        }
        Ok(VectorFunction { slots })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.slots
            .values()
            .flat_map(|v| v.coeffs.iter())
            .map(Complex64::norm_sqr)
            .sum()
    }

    /// `‖self − other‖` with absent slots read as zero.
    pub fn distance(&self, other: &VectorFunction) -> f64 {
        let mut acc = 0.0;
        let keys: std::collections::BTreeSet<&String> = self.slots.keys().chain(other.slots.keys()).collect();
        for k in keys {
            let a = self.slots.get(k).map(|v| v.coeffs.as_slice()).unwrap_or(&[]);
            let b = other.slots.get(k).map(|v| v.coeffs.as_slice()).unwrap_or(&[]);
            let zero = Complex64::new(0.0, 0.0);
            for j in 0..a.len().max(b.len()) {
                let d = a.get(j).copied().unwrap_or(zero) - b.get(j).copied().unwrap_or(zero);
                acc += d.norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `(λ, c)` pairs of one slot, in eigenvalue order.
    pub fn pairs(&self, sys: &EMZSystem, slot: &str) -> Vec<(f64, Complex64)> {
        match (sys.slot(slot), self.slots.get(slot)) {
            (Some(s), Some(v)) => s
                .point_spectrum()
                .iter()
                .copied()
                .zip(v.coeffs.iter().copied())
                .collect(),
            _ => Vec::new(),
        }
    }
}

fn basis_index(slot: &Slot, lambda: f64) -> Result<usize> {
    let eps = slot.class.pp_support().eps();
    slot.point_spectrum()
        .iter()
        .position(|l| (l - lambda).abs() <= eps)
        .ok_or_else(|| Error::Schema(format!("{lambda} is not an eigenvalue of slot {:?}", slot.id)))
}

/// Checks that `x` is a finite pure-point vector over the slots of `sys`.
pub(crate) fn check_pp_vector(sys: &EMZSystem, x: &VectorFunction) -> Result<()> {
    for (id, v) in &x.slots {
        let s = sys
            .slot(id)
            .ok_or_else(|| Error::Schema(format!("unknown slot {id:?}")))?;
        if v.ac.is_some() || s.has_ac() {
            return Err(Error::SymbolicACUnsupported(id.clone()));
        }
        if v.coeffs.len() != s.point_spectrum().len() {
            return Err(Error::DimensionMismatch {
                expected: s.point_spectrum().len(),
                got: v.coeffs.len(),
            });
        }
        if v.coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::Schema(format!("slot {id:?} has a non-finite coefficient")));
        }
    }
    Ok(())
}
