use serde::{Deserialize, Serialize};

use super::set::{Interval, RealSet, Window, DEFAULT_EPS_ATOM};
use crate::error::{Error, Result};

/// Interval endpoint as written in input files: a number, `null` for an
/// unbounded end, or the strings `"inf"` / `"-inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Endpoint {
    Value(f64),
    Named(InfName),
    Unbounded(()),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfName {
    #[serde(rename = "inf", alias = "+inf")]
    Pos,
    #[serde(rename = "-inf")]
    Neg,
}

impl Endpoint {
    fn resolve(self, lower: bool) -> f64 {
        match self {
            Endpoint::Value(v) => v,
            Endpoint::Named(InfName::Pos) => f64::INFINITY,
            Endpoint::Named(InfName::Neg) => f64::NEG_INFINITY,
            Endpoint::Unbounded(()) if lower => f64::NEG_INFINITY,
            Endpoint::Unbounded(()) => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSpec {
    pub lo: Endpoint,
    pub hi: Endpoint,
    #[serde(default)]
    pub lo_closed: bool,
    #[serde(default)]
    pub hi_closed: bool,
}

/// Atoms `offset + step·n` for integer `n` in `[n_min, n_max]` minus `exclude`.
/// Missing bounds are unbounded and cut off by the window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Progression {
    #[serde(default)]
    pub offset: f64,
    pub step: f64,
    #[serde(default)]
    pub n_min: Option<i64>,
    #[serde(default)]
    pub n_max: Option<i64>,
    #[serde(default)]
    pub exclude: Vec<i64>,
}

impl Progression {
    pub fn atoms(&self, window: Window) -> Result<Vec<f64>> {
        if !(self.step.is_finite() && self.step > 0.0 && self.offset.is_finite()) {
            return Err(Error::InvalidSet(format!(
                "progression step {} must be positive and finite",
                self.step
            )));
        }
        let first = ((window.lo - self.offset) / self.step).ceil() as i64;
        let last = ((window.hi - self.offset) / self.step).floor() as i64;
        let lo = self.n_min.map_or(first, |m| m.max(first));
        let hi = self.n_max.map_or(last, |m| m.min(last));
        Ok((lo..=hi)
            .filter(|n| !self.exclude.contains(n))
            .map(|n| self.offset + self.step * n as f64)
            .collect())
    }
}

/// Window-independent description of a set; see [`SetSpec::materialize`].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SetSpec {
    #[serde(default)]
    pub intervals: Vec<IntervalSpec>,
    #[serde(default)]
    pub atoms: Vec<f64>,
    #[serde(default)]
    pub progressions: Vec<Progression>,
}

impl SetSpec {
    pub fn materialize(&self, window: Window) -> Result<RealSet> {
        self.materialize_with_eps(window, DEFAULT_EPS_ATOM)
    }

    pub fn materialize_with_eps(&self, window: Window, eps: f64) -> Result<RealSet> {
        let intervals = self
            .intervals
            .iter()
            .map(|iv| Interval::new(iv.lo.resolve(true), iv.hi.resolve(false), iv.lo_closed, iv.hi_closed))
            .collect();
        let mut atoms = self.atoms.clone();
        for p in &self.progressions {
            atoms.extend(p.atoms(window)?);
        }
        RealSet::with_eps(window, intervals, atoms, eps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_progressions() {
        let w = Window::new(-3.5, 3.5).unwrap();
        let spec: SetSpec = serde_json::from_str(r#"{"progressions":[{"step":1,"exclude":[0]}]}"#).unwrap();
        let s = spec.materialize(w).unwrap();
        assert_eq!(s.atoms(), &[-3.0, -2.0, -1.0, 1.0, 2.0, 3.0]);
        let nonneg: SetSpec = serde_json::from_str(r#"{"progressions":[{"step":1,"n_min":0}]}"#).unwrap();
        assert_eq!(nonneg.materialize(w).unwrap().atoms(), &[0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn unbounded_endpoints() {
        let w = Window::new(-2.0, 2.0).unwrap();
        let spec: SetSpec =
            serde_json::from_str(r#"{"intervals":[{"lo":0,"hi":null},{"lo":"-inf","hi":-1,"hi_closed":true}]}"#)
                .unwrap();
        let s = spec.materialize(w).unwrap();
        assert_eq!(
            s.intervals(),
            &[Interval::closed(-2.0, -1.0), Interval::new(0.0, 2.0, false, true)]
        );
    }
}
