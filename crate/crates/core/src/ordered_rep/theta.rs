use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::realset::{RealSet, SpectralMeasureClass, WeightedPPMeasure};
use crate::vectorop::{EMZSystem, PartitionResult};

/// Spectral type of a piece of a measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Pp,
    Cont,
}

/// The part of slot `slot`'s cyclic vector measure carried on `support`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub slot: String,
    pub part: Part,
    pub support: RealSet,
}

/// Outcome of `max{w, ψ}` between the current maximal vector `w` and the
/// next group vector `ψ` on one part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxChoice {
    /// Null overlap: the direct sum is maximal.
    Disjoint,
    /// `ψ ≪ w`: `w` is kept and `ψ` goes down entirely.
    Left,
    /// `w ≪ ψ` strictly: `ψ` replaces `w`.
    Right,
    /// Mutually absolutely continuous: `w` is kept.
    Equal,
    /// Incomparable: `w` is kept, `ψ` is split into its excess and `min{w, ψ}`.
    Split,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub group: usize,
    pub part: Part,
    pub choice: MaxChoice,
    pub kept: Vec<Piece>,
    pub discarded: Vec<Piece>,
}

/// Record of the maximal-vector recursion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxVectorProvenance {
    /// Slot cyclic vectors in the order they entered the recursion.
    pub leaves: Vec<String>,
    pub steps: Vec<Step>,
    /// Pieces making up the maximal vector.
    pub top: Vec<Piece>,
    /// `min{·,·}` pieces, in the order they were set aside.
    pub lower: Vec<Piece>,
}

impl MaxVectorProvenance {
    /// Slots charging the atom `λ`, the top piece first.
    pub fn slots_at(&self, lambda: f64) -> Vec<&str> {
        self.top
            .iter()
            .chain(&self.lower)
            .filter(|p| p.part == Part::Pp && p.support.contains(lambda))
            .map(|p| p.slot.as_str())
            .collect()
    }
}

fn part_of(class: &SpectralMeasureClass, part: Part) -> &RealSet {
    match part {
        Part::Pp => class.pp_support(),
        Part::Cont => class.ac_support(),
    }
}

fn is_null(set: &RealSet, part: Part) -> bool {
    match part {
        Part::Pp => set.atoms_only().is_empty(),
        Part::Cont => !set.has_interval(),
    }
}

fn clean(set: RealSet, part: Part) -> RealSet {
    match part {
        Part::Pp => set.atoms_only(),
        Part::Cont => set.intervals_only(),
    }
}

/// Builds the measure of the ordered representation by folding the group
/// cyclic vectors with `max{·,·}`, separately on the point and continuous parts.
pub fn build_theta(
    sys: &EMZSystem,
    partition: &PartitionResult,
) -> Result<(SpectralMeasureClass, Option<WeightedPPMeasure>, MaxVectorProvenance)> {
    let window = sys.window();
    let mut prov = MaxVectorProvenance {
        leaves: Vec::new(),
        steps: Vec::new(),
        top: Vec::new(),
        lower: Vec::new(),
    };
    for (k, group) in partition.groups.iter().enumerate() {
        let slots: Vec<_> = group.iter().filter_map(|id| sys.slot(id)).collect();
        prov.leaves.extend(slots.iter().map(|s| s.id.clone()));
        for part in [Part::Pp, Part::Cont] {
            let incoming: Vec<Piece> = slots
                .iter()
                .map(|s| Piece {
                    slot: s.id.clone(),
                    part,
                    support: part_of(&s.class, part).clone(),
                })
                .filter(|p| !is_null(&p.support, part))
                .collect();
            if incoming.is_empty() {
                continue;
            }
            let mut w = RealSet::empty(window);
            for p in prov.top.iter().filter(|p| p.part == part) {
                w = w.union(&p.support)?;
            }
            let mut psi = RealSet::empty(window);
            for p in &incoming {
                psi = psi.union(&p.support)?;
            }
            let psi_excess = !is_null(&psi.difference(&w)?, part);
            let w_excess = !is_null(&w.difference(&psi)?, part);
            let overlap = !is_null(&w.intersect(&psi)?, part);
            let choice = match (overlap, psi_excess, w_excess) {
                (false, _, _) => MaxChoice::Disjoint,
                (true, false, false) => MaxChoice::Equal,
                (true, false, true) => MaxChoice::Left,
                (true, true, false) => MaxChoice::Right,
                (true, true, true) => MaxChoice::Split,
            };
            let mut step = Step {
                group: k,
                part,
                choice,
                kept: Vec::new(),
                discarded: Vec::new(),
            };
            if choice == MaxChoice::Right {
                let (moved, stay): (Vec<Piece>, Vec<Piece>) = prov.top.drain(..).partition(|p| p.part == part);
                prov.top = stay;
                step.discarded = moved;
                step.kept = incoming;
            } else {
                for p in incoming {
                    let keep = clean(p.support.difference(&w)?, part);
                    let down = clean(p.support.intersect(&w)?, part);
                    if !is_null(&keep, part) {
                        step.kept.push(Piece {
                            support: keep,
                            ..p.clone()
                        });
                    }
                    if !is_null(&down, part) {
                        step.discarded.push(Piece { support: down, ..p });
                    }
                }
            }
            prov.top.extend(step.kept.iter().cloned());
            prov.lower.extend(step.discarded.iter().cloned());
            log::debug!(
                "group {k} {part:?}: {choice:?}, {} kept, {} set aside",
                step.kept.len(),
                step.discarded.len()
            );
            prov.steps.push(step);
        }
    }
    let mut ac = RealSet::empty(window);
    let mut pp = RealSet::empty(window);
    for p in &prov.top {
        match p.part {
            Part::Pp => pp = pp.union(&p.support)?,
            Part::Cont => ac = ac.union(&p.support)?,
        }
    }
    let theta = SpectralMeasureClass::new(ac, pp)?;
    Ok((theta, theta_weights(sys, &prov)?, prov))
}

/// Point weights of θ: each atom weighted as in the slot whose piece carries it
/// in the maximal vector. `None` if some such slot has no weights.
fn theta_weights(sys: &EMZSystem, prov: &MaxVectorProvenance) -> Result<Option<WeightedPPMeasure>> {
    let mut atoms = Vec::new();
    let mut eps = crate::realset::DEFAULT_EPS_ATOM;
    for p in prov.top.iter().filter(|p| p.part == Part::Pp) {
        let Some(slot) = sys.slot(&p.slot) else { continue };
        let Some(w) = &slot.pp_weights else { return Ok(None) };
        eps = eps.max(p.support.eps());
        for &a in p.support.atoms() {
            atoms.push((a, w.weight_at(a, p.support.eps())));
        }
    }
    if atoms.is_empty() {
        return Ok(None);
    }
    WeightedPPMeasure::new(atoms, eps).map(Some)
}
