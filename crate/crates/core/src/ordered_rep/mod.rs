//! The ordered spectral representation of a system: the measure θ of a
//! maximal vector, the multiplicity sets `s_n`, and distortion.

mod multiplicity;
mod theta;

use serde::{Deserialize, Serialize};

pub use multiplicity::{
    build_multiplicity_sets, build_multiplicity_sets_partial, is_theta_atom, mult_set_formula, pointwise_multiplicity,
    LevelSets, MultiplicitySets, DEFAULT_BUDGET,
};
pub use theta::{build_theta, MaxChoice, MaxVectorProvenance, Part, Piece, Step};

use crate::error::{Error, Result};
use crate::realset::{RealSet, SpectralMeasureClass, WeightedPPMeasure};
use crate::vectorop::{spectral_index, EMZSystem, PartitionResult};

/// Number of uniform probe points for the multiplicity oracle.
pub const PROBE_POINTS: usize = 1001;

/// A point atom of one operator sitting on an endpoint of another operator's
/// continuous support. Counted at its point level only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointCoincidence {
    pub lambda: f64,
    pub atom_of: String,
    pub endpoint_of: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderedRepresentation {
    pub theta: SpectralMeasureClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_pp: Option<WeightedPPMeasure>,
    /// `s_1 ⊇ s_2 ⊇ …`, ending with the first θ-null set.
    pub s_n: Vec<RealSet>,
    pub multiplicity: usize,
    pub lambda: usize,
    pub distorted: bool,
    /// Whether every operator had a simple spectrum before splitting.
    pub coordinates_simple: bool,
    pub provenance: MaxVectorProvenance,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub endpoint_coincidences: Vec<EndpointCoincidence>,
}

impl OrderedRepresentation {
    /// `s_n` for `n ≥ 1`; empty beyond the computed range.
    pub fn s(&self, n: usize) -> RealSet {
        self.s_n
            .get(n - 1)
            .cloned()
            .unwrap_or_else(|| RealSet::empty(self.theta.window()))
    }
}

/// θ, provenance and `s_n` up to the first θ-null set.
pub fn build_ordered_representation(sys: &EMZSystem, budget: usize) -> Result<OrderedRepresentation> {
    let partition = spectral_index(sys)?;
    build_ordered_representation_with(sys, &partition, budget)
}

pub fn build_ordered_representation_with(
    sys: &EMZSystem,
    partition: &PartitionResult,
    budget: usize,
) -> Result<OrderedRepresentation> {
    let (theta, theta_pp, provenance) = build_theta(sys, partition)?;
    // s_{Σm+1} is empty, so this range always reaches a null set
    let n_max = sys.total_multiplicity() + 1;
    let mut s_n = build_multiplicity_sets(sys, n_max, budget)?;
    let mut multiplicity = 0;
    for (j, s) in s_n.iter().enumerate() {
        if theta.sign(s)?.is_positive() {
            multiplicity = j + 1;
        } else {
            break;
        }
    }
    s_n.truncate(multiplicity + 1);
    Ok(OrderedRepresentation {
        theta,
        theta_pp,
        s_n,
        multiplicity,
        lambda: partition.lambda,
        distorted: partition.lambda != multiplicity,
        coordinates_simple: sys.max_multiplicity() <= 1,
        provenance,
        endpoint_coincidences: endpoint_coincidences(sys)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Distortion {
    pub lambda: usize,
    pub multiplicity: usize,
    pub distorted: bool,
}

pub fn detect_distortion(sys: &EMZSystem) -> Result<Distortion> {
    let rep = build_ordered_representation(sys, DEFAULT_BUDGET)?;
    if !rep.coordinates_simple {
        log::info!("distortion is defined for simple coordinate spectra; reporting Λ ≠ multiplicity anyway");
    }
    Ok(Distortion {
        lambda: rep.lambda,
        multiplicity: rep.multiplicity,
        distorted: rep.distorted,
    })
}

/// Equal ordered representations: equivalent θ and `s_n` agreeing up to θ-null sets.
pub fn families_equivalent(a: &EMZSystem, b: &EMZSystem) -> Result<bool> {
    if a.window() != b.window() {
        let (x, y) = (a.window(), b.window());
        return Err(Error::WindowMismatch(x.lo, x.hi, y.lo, y.hi));
    }
    let ra = build_ordered_representation(a, DEFAULT_BUDGET)?;
    let rb = build_ordered_representation(b, DEFAULT_BUDGET)?;
    if !ra.theta.equivalent(&rb.theta)? {
        return Ok(false);
    }
    for n in 1..=ra.s_n.len().max(rb.s_n.len()) {
        let (x, y) = (ra.s(n), rb.s(n));
        let sym = x.difference(&y)?.union(&y.difference(&x)?)?;
        if ra.theta.sign(&sym)?.is_positive() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn endpoint_coincidences(sys: &EMZSystem) -> Result<Vec<EndpointCoincidence>> {
    let mut out = Vec::new();
    for (i, ri) in sys.operator_reps().iter().enumerate() {
        for &a in ri.theta.pp_support().atoms() {
            for (j, rj) in sys.operator_reps().iter().enumerate() {
                if i == j {
                    continue;
                }
                let ac = rj.theta.ac_support();
                if ac
                    .intervals()
                    .iter()
                    .any(|iv| (iv.lo - a).abs() <= ac.eps() || (iv.hi - a).abs() <= ac.eps())
                {
                    out.push(EndpointCoincidence {
                        lambda: a,
                        atom_of: sys.operators()[i].id.clone(),
                        endpoint_of: sys.operators()[j].id.clone(),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Comparison of the `s_n` sets against [`pointwise_multiplicity`] on the probe set.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OracleAgreement {
    pub probes: usize,
    /// Disagreements at atoms of the measure (must be zero).
    pub atom_mismatches: usize,
    /// Disagreements at θ-null points (interval endpoints).
    pub null_mismatches: usize,
    /// Disagreements at points where θ is continuous and the point is interior.
    pub interior_mismatches: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub examples: Vec<(f64, usize, usize)>,
}

impl OracleAgreement {
    pub fn agrees(&self) -> bool {
        self.atom_mismatches == 0 && self.interior_mismatches == 0
    }
}

/// The uniform probe grid plus every atom of every operator.
pub fn probe_points(sys: &EMZSystem) -> Vec<f64> {
    let w = sys.window();
    let mut pts: Vec<f64> = (0..PROBE_POINTS)
        .map(|j| w.lo + w.width() * j as f64 / (PROBE_POINTS - 1) as f64)
        .collect();
    for r in sys.operator_reps() {
        pts.extend(r.theta.pp_support().atoms());
    }
    pts
}

/// Checks `λ ∈ s_n ⇔ m(λ) ≥ n` at every probe point and every `n` up to `max(len, m(λ)+1)`.
pub fn oracle_agreement(sys: &EMZSystem, rep: &OrderedRepresentation) -> Result<OracleAgreement> {
    let mut out = OracleAgreement::default();
    let endpoints: Vec<f64> = sys
        .operator_reps()
        .iter()
        .flat_map(|r| {
            r.mult_sets
                .iter()
                .chain(std::iter::once(r.theta.ac_support()))
                .flat_map(|e| e.intervals().iter().flat_map(|iv| [iv.lo, iv.hi]))
                .collect::<Vec<_>>()
        })
        .collect();
    let eps = rep.theta.pp_support().eps();
    for x in probe_points(sys) {
        out.probes += 1;
        let m = pointwise_multiplicity(sys, x);
        // levels beyond the stored sets are empty by construction
        let got = (1..=rep.s_n.len()).take_while(|&n| rep.s(n).contains(x)).count();
        // s_1 is the whole window, while m(λ) = 0 off the support
        let want = m.clamp(1, rep.s_n.len());
        if got == want {
            continue;
        }
        if is_theta_atom(sys, x) {
            out.atom_mismatches += 1;
        } else if endpoints.iter().any(|e| (e - x).abs() <= eps) {
            out.null_mismatches += 1;
        } else {
            out.interior_mismatches += 1;
        }
        if out.examples.len() < 10 {
            out.examples.push((x, got, m));
        }
    }
    Ok(out)
}
