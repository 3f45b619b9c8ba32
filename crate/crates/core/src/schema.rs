//! Input files: a window, operators by family or by symbolic spectral data,
//! and optional inline Shin-Zettl matrices.

use serde::{Deserialize, Serialize};

use crate::catalog::{BoundaryParam, Family, KineticSign, OperatorSpec, OrderedRepData};
use crate::error::{Error, Result};
use crate::quasidiff::{ShinZettlMatrix, Violation};
use crate::realset::{
    Endpoint, InfName, RealSet, SetSpec, SpectralMeasureClass, WeightedPPMeasure, Window, DEFAULT_EPS_ATOM,
};
use crate::vectorop::EMZSystem;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    #[serde(default = "default_version")]
    pub schema_version: u32,
    pub window: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_atom: Option<f64>,
    pub operators: Vec<OperatorEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub matrices: Vec<MatrixEntry>,
}

fn default_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorEntry {
    pub id: String,
    pub family: String,
    #[serde(default, skip_serializing_if = "Params::is_empty")]
    pub params: Params,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral_data: Option<SpectralData>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<KineticSign>,
    /// Robin parameter: a number or `"inf"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Endpoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

impl Params {
    fn is_empty(&self) -> bool {
        self.sign.is_none() && self.k.is_none() && self.alpha.is_none()
    }
}

/// Symbolic ordered-representation data. `e_1` is the closure of the support;
/// `mult_sets` lists `e_2, e_3, …`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralData {
    #[serde(default)]
    pub ac: SetSpec,
    #[serde(default)]
    pub pp: SetSpec,
    #[serde(default)]
    pub mult_sets: Vec<SetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pp_weights: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixEntry {
    pub id: String,
    pub matrix: ShinZettlMatrix,
}

impl SystemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn window(&self, override_window: Option<Window>) -> Result<Window> {
        match override_window {
            Some(w) => Ok(w),
            None => Window::new(self.window[0], self.window[1]),
        }
    }

    pub fn eps(&self) -> Result<f64> {
        let eps = self.eps_atom.unwrap_or(DEFAULT_EPS_ATOM);
        if eps > 0.0 && eps.is_finite() {
            Ok(eps)
        } else {
            Err(Error::Schema(format!("eps_atom {eps} must be positive")))
        }
    }

    pub fn operators(&self, window: Window) -> Result<Vec<OperatorSpec>> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let eps = self.eps()?;
        self.operators.iter().map(|op| op.to_spec(window, eps)).collect()
    }

    pub fn system(&self, override_window: Option<Window>) -> Result<EMZSystem> {
        let window = self.window(override_window)?;
        EMZSystem::new(window, self.operators(window)?)
    }

    /// Shin-Zettl violations of every inline matrix.
    pub fn matrix_violations(&self) -> Vec<(String, Violation)> {
        self.matrices
            .iter()
            .flat_map(|m| m.matrix.validate().into_iter().map(|v| (m.id.clone(), v)))
            .collect()
    }
}

impl OperatorEntry {
    pub fn to_spec(&self, window: Window, eps: f64) -> Result<OperatorSpec> {
        let missing = |what: &str| Error::Schema(format!("{}: missing parameter {what:?}", self.id));
        if self.family != "symbolic" && self.spectral_data.is_some() {
            return Err(Error::Schema(format!(
                "{}: spectral_data is only read for the symbolic family",
                self.id
            )));
        }
        let family = match self.family.as_str() {
            "half_line_kinetic" => {
                let sign = self.params.sign.ok_or_else(|| missing("sign"))?;
                let k = match self.params.k.ok_or_else(|| missing("k"))? {
                    Endpoint::Value(k) => BoundaryParam::Finite(k),
                    Endpoint::Named(InfName::Pos) => BoundaryParam::Infinite,
                    _ => {
                        return Err(Error::Schema(format!(
                            "{}: k must be a real number or \"inf\"",
                            self.id
                        )))
                    }
                };
                Family::HalfLineKinetic { sign, k }
            }
            "impulse_on_unit" => Family::ImpulseOnUnit {
                alpha: self.params.alpha.ok_or_else(|| missing("alpha"))?,
            },
            "dirichlet_sl_on_pi" => Family::DirichletSLOnPi,
            "gesztesy_kirsch" => Family::GesztesyKirsch,
            "symbolic" => {
                let data = self.spectral_data.as_ref().ok_or_else(|| missing("spectral_data"))?;
                Family::Symbolic(data.to_rep(window, eps)?)
            }
            other => return Err(Error::Schema(format!("{}: unknown family {other:?}", self.id))),
        };
        OperatorSpec::new(self.id.clone(), family)
    }
}

impl SpectralData {
    pub fn to_rep(&self, window: Window, eps: f64) -> Result<OrderedRepData> {
        let ac = self.ac.materialize_with_eps(window, eps)?;
        let pp = self.pp.materialize_with_eps(window, eps)?;
        if pp.has_interval() {
            return Err(Error::Schema("pp may list atoms and progressions only".into()));
        }
        let theta = SpectralMeasureClass::new(ac, pp)?;
        if theta.is_zero() {
            return Err(Error::Schema("symbolic spectral data is empty in the window".into()));
        }
        let mut mult_sets: Vec<RealSet> = vec![theta.support().closure()];
        for e in &self.mult_sets {
            mult_sets.push(e.materialize_with_eps(window, eps)?);
        }
        let pp_weights = self
            .pp_weights
            .as_ref()
            .map(|w| {
                let kept = w.iter().copied().filter(|(l, _)| window.contains(*l)).collect();
                WeightedPPMeasure::new(kept, eps)
            })
            .transpose()?;
        OrderedRepData::new(theta, mult_sets, pp_weights)
    }
}
