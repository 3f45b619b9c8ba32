use serde::{Deserialize, Serialize};

use super::set::{RealSet, Window};
use crate::error::{Error, Result};

/// Null-set structure of a spectral measure: the support of its
/// absolutely continuous part and the atoms of its point part.
///
/// Only answers "null or positive" questions, never magnitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ClassRepr", into = "ClassRepr")]
pub struct SpectralMeasureClass {
    ac_support: RealSet,
    pp_support: RealSet,
}

#[derive(Serialize, Deserialize)]
struct ClassRepr {
    ac_support: RealSet,
    pp_support: RealSet,
}

impl TryFrom<ClassRepr> for SpectralMeasureClass {
    type Error = Error;

    fn try_from(r: ClassRepr) -> Result<Self> {
        SpectralMeasureClass::new(r.ac_support, r.pp_support)
    }
}

impl From<SpectralMeasureClass> for ClassRepr {
    fn from(c: SpectralMeasureClass) -> Self {
        ClassRepr {
            ac_support: c.ac_support,
            pp_support: c.pp_support,
        }
    }
}

/// Result of a null-set query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureSign {
    Zero,
    Positive,
}

impl MeasureSign {
    pub fn is_positive(self) -> bool {
        self == MeasureSign::Positive
    }
}

impl SpectralMeasureClass {
    /// Atoms in `ac_support` are Lebesgue-null and are dropped.
    pub fn new(ac_support: RealSet, pp_support: RealSet) -> Result<Self> {
        if ac_support.window() != pp_support.window() {
            let (a, b) = (ac_support.window(), pp_support.window());
            return Err(Error::WindowMismatch(a.lo, a.hi, b.lo, b.hi));
        }
        if pp_support.has_interval() {
            return Err(Error::InvalidMeasure(
                "point-spectrum support must consist of atoms only".into(),
            ));
        }
        Ok(SpectralMeasureClass {
            ac_support: ac_support.intervals_only(),
            pp_support,
        })
    }

    pub fn zero(window: Window) -> Self {
        SpectralMeasureClass {
            ac_support: RealSet::empty(window),
            pp_support: RealSet::empty(window),
        }
    }

    /// Splits a subspectrum into its interval (continuous) and atom (point) parts.
    pub fn from_subspectrum(set: &RealSet) -> Self {
        SpectralMeasureClass {
            ac_support: set.intervals_only(),
            pp_support: set.atoms_only(),
        }
    }

    pub fn window(&self) -> Window {
        self.ac_support.window()
    }

    pub fn ac_support(&self) -> &RealSet {
        &self.ac_support
    }

    pub fn pp_support(&self) -> &RealSet {
        &self.pp_support
    }

    /// Union of both supports (the subspectrum the class is concentrated on).
    pub fn support(&self) -> RealSet {
        self.ac_support
            .union(&self.pp_support)
            .expect("supports share a window")
    }

    pub fn is_zero(&self) -> bool {
        self.ac_support.is_empty() && self.pp_support.is_empty()
    }

    /// Positive iff `s` meets the ac support in positive length or meets an atom.
    pub fn sign(&self, s: &RealSet) -> Result<MeasureSign> {
        let ac = s.intersect(&self.ac_support)?;
        let pp = s.intersect(&self.pp_support)?;
        Ok(if ac.has_interval() || !pp.is_empty() {
            MeasureSign::Positive
        } else {
            MeasureSign::Zero
        })
    }

    /// Class of the sum of two measures.
    pub fn join(&self, other: &SpectralMeasureClass) -> Result<SpectralMeasureClass> {
        Ok(SpectralMeasureClass {
            ac_support: self.ac_support.union(&other.ac_support)?,
            pp_support: self.pp_support.union(&other.pp_support)?,
        })
    }

    /// Restriction of the measure to a set.
    pub fn restrict(&self, s: &RealSet) -> Result<SpectralMeasureClass> {
        Ok(SpectralMeasureClass {
            ac_support: s.intersect(&self.ac_support)?.intervals_only(),
            pp_support: s.intersect(&self.pp_support)?,
        })
    }

    /// Mutual absolute continuity of two classes.
    pub fn equivalent(&self, other: &SpectralMeasureClass) -> Result<bool> {
        let ac_diff = self
            .ac_support
            .difference(&other.ac_support)?
            .union(&other.ac_support.difference(&self.ac_support)?)?;
        let pp_same = self.pp_support.approx_eq(&other.pp_support);
        Ok(!ac_diff.has_interval() && pp_same)
    }
}

/// Sign of `m` on `s`.
pub fn class_measure_sign(m: &SpectralMeasureClass, s: &RealSet) -> Result<MeasureSign> {
    m.sign(s)
}

/// Separates a class into its point part and its continuous part.
pub fn split_pp_cont(m: &SpectralMeasureClass) -> (SpectralMeasureClass, SpectralMeasureClass) {
    let window = m.window();
    let pp = SpectralMeasureClass {
        ac_support: RealSet::empty_with_eps(window, m.ac_support.eps()),
        pp_support: m.pp_support.clone(),
    };
    let cont = SpectralMeasureClass {
        ac_support: m.ac_support.clone(),
        pp_support: RealSet::empty_with_eps(window, m.pp_support.eps()),
    };
    (pp, cont)
}

/// A finite pure-point measure: strictly positive weights at distinct positions.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct WeightedPPMeasure {
    atoms: Vec<(f64, f64)>,
}

impl TryFrom<Vec<(f64, f64)>> for WeightedPPMeasure {
    type Error = Error;

    fn try_from(atoms: Vec<(f64, f64)>) -> Result<Self> {
        WeightedPPMeasure::new(atoms, super::DEFAULT_EPS_ATOM)
    }
}

impl From<WeightedPPMeasure> for Vec<(f64, f64)> {
    fn from(m: WeightedPPMeasure) -> Self {
        m.atoms
    }
}

impl WeightedPPMeasure {
    pub fn new(mut atoms: Vec<(f64, f64)>, eps: f64) -> Result<Self> {
        for &(x, w) in &atoms {
            if !x.is_finite() {
                return Err(Error::InvalidMeasure(format!("atom position {x} is not finite")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidMeasure(format!(
                    "weight {w} at {x} must be positive and finite"
                )));
            }
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(pair) = atoms.windows(2).find(|p| p[1].0 - p[0].0 <= eps) {
            return Err(Error::InvalidMeasure(format!(
                "atoms at {} and {} coincide",
                pair[0].0, pair[1].0
            )));
        }
        Ok(WeightedPPMeasure { atoms })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    /// Mass of the set `s`.
    pub fn mass(&self, s: &RealSet) -> f64 {
        self.atoms.iter().filter(|(x, _)| s.contains(*x)).map(|a| a.1).sum()
    }

    pub fn weight_at(&self, x: f64, eps: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|(p, _)| (p - x).abs() <= eps)
            .map(|a| a.1)
            .sum()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.atoms.iter().map(|&(x, w)| f(x) * w).sum()
    }

    pub fn restrict_to_window(&self, window: Window) -> WeightedPPMeasure {
        WeightedPPMeasure {
            atoms: self
                .atoms
                .iter()
                .copied()
                .filter(|(x, _)| window.contains(*x))
                .collect(),
        }
    }

    pub fn support(&self, window: Window, eps: f64) -> Result<RealSet> {
        RealSet::with_eps(
            window,
            Vec::new(),
            self.atoms.iter().map(|a| a.0).filter(|x| window.contains(*x)).collect(),
            eps,
        )
    }

    /// Sum of measures, merging atoms that coincide within `eps`.
    pub fn sum(measures: &[WeightedPPMeasure], eps: f64) -> WeightedPPMeasure {
        let mut all: Vec<(f64, f64)> = measures.iter().flat_map(|m| m.atoms.iter().copied()).collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(all.len());
        for (x, w) in all {
            match merged.last_mut() {
                Some(last) if x - last.0 <= eps => last.1 += w,
                _ => merged.push((x, w)),
            }
        }
        WeightedPPMeasure { atoms: merged }
    }
}

/// Both evaluation orders of `∫ f d(Σ μᵢ)` over the window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureSumEval {
    /// `Σᵢ ∫ f dμᵢ`
    pub sum_of_integrals: f64,
    /// `∫ f d(Σᵢ μᵢ)`
    pub integral_of_sum: f64,
}

impl MeasureSumEval {
    pub fn relative_gap(&self) -> f64 {
        let scale = self.sum_of_integrals.abs().max(self.integral_of_sum.abs()).max(1.0);
        (self.sum_of_integrals - self.integral_of_sum).abs() / scale
    }
}

pub fn measure_sum_eval(measures: &[WeightedPPMeasure], f: impl Fn(f64) -> f64, window: Window) -> MeasureSumEval {
    let restricted: Vec<WeightedPPMeasure> = measures.iter().map(|m| m.restrict_to_window(window)).collect();
    let sum_of_integrals = restricted.iter().map(|m| m.integrate(&f)).sum();
    let summed = WeightedPPMeasure::sum(&restricted, super::DEFAULT_EPS_ATOM);
    MeasureSumEval {
        sum_of_integrals,
        integral_of_sum: summed.integrate(&f),
    }
}
