use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::realset::{Interval, RealSet, SpectralMeasureClass, WeightedPPMeasure, Window};

/// Sign of the half-line kinetic expression: `Minus` is `−d²/dt²`,
/// `Plus` the mirrored `+d²/dt²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KineticSign {
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "+")]
    Plus,
}

/// Robin parameter `k` in `f(0) + k f′(0) = 0`; `Infinite` is `f′(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundaryParam {
    Finite(f64),
    Infinite,
}

impl BoundaryParam {
    /// `Some(k)` exactly when `0 < k < ∞`, the only case with a bound state.
    pub fn bound_state_length(self) -> Option<f64> {
        match self {
            BoundaryParam::Finite(k) if k > 0.0 => Some(k),
            _ => None,
        }
    }
}

impl fmt::Display for BoundaryParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryParam::Finite(k) => write!(f, "{k}"),
            BoundaryParam::Infinite => write!(f, "inf"),
        }
    }
}

/// Catalog families plus symbolic spectral data.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `∓d²/dt²` on `[0, ∞)` with `f(0) + k f′(0) = 0`.
    HalfLineKinetic {
        sign: KineticSign,
        k: BoundaryParam,
    },
    /// `(1/i) d/dt` on `[0, 1]` with `f(0) = e^{iα} f(1)`.
    ImpulseOnUnit {
        alpha: f64,
    },
    /// `−d²/dt²` on `[0, π]` with `f(0) = f(π) = 0`.
    DirichletSLOnPi,
    /// `−d²/dx² + 1/cos²x` on one period cell `(−π/2, π/2)`.
    ///
    /// Both endpoints are limit point, so the operator is self-adjoint
    /// without boundary conditions; its spectrum is `{(n + φ)² : n ≥ 0}` with
    /// `φ` the golden ratio (a Pöschl–Teller well with `ℓ(ℓ+1) = 1`).
    /// Carried as spectral data only: no eigen-solver, no expansions.
    GesztesyKirsch,
    Symbolic(OrderedRepData),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::HalfLineKinetic { .. } => "half_line_kinetic",
            Family::ImpulseOnUnit { .. } => "impulse_on_unit",
            Family::DirichletSLOnPi => "dirichlet_sl_on_pi",
            Family::GesztesyKirsch => "gesztesy_kirsch",
            Family::Symbolic(_) => "symbolic",
        }
    }

    /// True for the closed-form families that have an eigen-solver.
    pub fn is_concrete(&self) -> bool {
        matches!(
            self,
            Family::HalfLineKinetic { .. } | Family::ImpulseOnUnit { .. } | Family::DirichletSLOnPi
        )
    }
}

/// One coordinate operator of a system.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec {
    pub id: String,
    pub family: Family,
}

impl OperatorSpec {
    pub fn new(id: impl Into<String>, family: Family) -> Result<Self> {
        let spec = OperatorSpec { id: id.into(), family };
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<()> {
        match &self.family {
            Family::ImpulseOnUnit { alpha } if !(0.0..=2.0 * PI).contains(alpha) => Err(Error::Schema(format!(
                "{}: alpha = {alpha} is outside [0, 2π]",
                self.id
            ))),
            Family::HalfLineKinetic {
                k: BoundaryParam::Finite(k),
                ..
            } if !k.is_finite() => Err(Error::Schema(format!(
                "{}: boundary parameter {k} must be finite or \"inf\"",
                self.id
            ))),
            _ => Ok(()),
        }
    }

    /// `k < 0`: the negative bound state is taken as given rather than
    /// derived, so callers may want to flag it.
    pub fn has_unelaborated_bound_state_case(&self) -> bool {
        matches!(
            self.family,
            Family::HalfLineKinetic { k: BoundaryParam::Finite(k), .. } if k < 0.0
        )
    }
}

/// The golden ratio, offset of the `1/cos²x` levels.
pub const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

/// The set where the spectral measures of the operator are concentrated.
pub fn subspectrum(spec: &OperatorSpec, window: Window) -> Result<RealSet> {
    match &spec.family {
        Family::HalfLineKinetic { sign, k } => {
            let bound = k.bound_state_length().map(|k| 1.0 / (k * k));
            let (cont, atom) = match sign {
                KineticSign::Minus => (
                    (window.hi > 0.0).then(|| Interval::open(0.0_f64.max(window.lo), window.hi)),
                    bound.map(|b| -b),
                ),
                KineticSign::Plus => (
                    (window.lo < 0.0).then(|| Interval::open(window.lo, 0.0_f64.min(window.hi))),
                    bound,
                ),
            };
            RealSet::new(
                window,
                cont.into_iter().collect(),
                atom.into_iter().filter(|a| window.contains(*a)).collect(),
            )
        }
        Family::ImpulseOnUnit { alpha } => {
            let atoms = impulse_eigenvalues(*alpha, window);
            Ok(RealSet::from_atoms(window, atoms)?.with_generator(format!("2*pi*n - {alpha}")))
        }
        Family::DirichletSLOnPi => {
            let atoms = dirichlet_indices(window).map(|n| (n * n) as f64).collect();
            Ok(RealSet::from_atoms(window, atoms)?.with_generator("n^2, n >= 1"))
        }
        Family::GesztesyKirsch => {
            let atoms = gk_levels(window);
            Ok(RealSet::from_atoms(window, atoms)?.with_generator("(n + phi)^2, n >= 0"))
        }
        Family::Symbolic(data) => {
            if data.window() != window {
                let w = data.window();
                return Err(Error::WindowMismatch(w.lo, w.hi, window.lo, window.hi));
            }
            Ok(data.theta.support())
        }
    }
}

pub(crate) fn impulse_eigenvalues(alpha: f64, window: Window) -> Vec<f64> {
    let two_pi = 2.0 * PI;
    let first = ((window.lo + alpha) / two_pi).ceil() as i64;
    let last = ((window.hi + alpha) / two_pi).floor() as i64;
    (first..=last)
        .map(|n| two_pi * n as f64 - alpha)
        .filter(|l| window.contains(*l))
        .collect()
}

pub(crate) fn dirichlet_indices(window: Window) -> impl Iterator<Item = u64> {
    let lo = if window.lo <= 1.0 {
        1
    } else {
        window.lo.sqrt().ceil() as u64
    };
    let hi = if window.hi < 1.0 {
        0
    } else {
        window.hi.sqrt().floor() as u64
    };
    (lo..=hi).filter(move |n| window.contains((n * n) as f64))
}

fn gk_levels(window: Window) -> Vec<f64> {
    let mut out = Vec::new();
    let mut n = 0.0;
    loop {
        let l = (n + GOLDEN_RATIO) * (n + GOLDEN_RATIO);
        if l > window.hi {
            break;
        }
        if l >= window.lo {
            out.push(l);
        }
        n += 1.0;
    }
    out
}

/// Measure class, multiplicity sets and optional point weights of the
/// ordered representation of one coordinate operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderedRepData {
    pub theta: SpectralMeasureClass,
    /// `e_1 ⊇ e_2 ⊇ …`; the length is the number of cyclic vectors.
    pub mult_sets: Vec<RealSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pp_weights: Option<WeightedPPMeasure>,
}

impl OrderedRepData {
    pub fn new(
        theta: SpectralMeasureClass,
        mult_sets: Vec<RealSet>,
        pp_weights: Option<WeightedPPMeasure>,
    ) -> Result<Self> {
        if mult_sets.is_empty() {
            return Err(Error::Schema("at least one multiplicity set is required".into()));
        }
        for (k, e) in mult_sets.iter().enumerate() {
            if !theta.sign(e)?.is_positive() {
                return Err(Error::Schema(format!(
                    "multiplicity set e_{} = {e} is null for the spectral measure",
                    k + 1
                )));
            }
            if k > 0 && !e.is_subset_of(&mult_sets[k - 1])? {
                return Err(Error::Schema(format!(
                    "multiplicity set e_{} is not contained in e_{}",
                    k + 1,
                    k
                )));
            }
        }
        if let Some(w) = &pp_weights {
            let pp = theta.pp_support();
            let support = w.support(theta.window(), pp.eps())?;
            if !support.approx_eq(pp) {
                return Err(Error::Schema(format!(
                    "point weights live on {support} but the point spectrum is {pp}"
                )));
            }
        }
        Ok(OrderedRepData {
            theta,
            mult_sets,
            pp_weights,
        })
    }

    pub fn window(&self) -> Window {
        self.theta.window()
    }

    /// Number of cyclic vectors `m`.
    pub fn multiplicity(&self) -> usize {
        self.mult_sets.len()
    }

    /// Largest `k` with `λ ∈ e_k`, or 0.
    pub fn level_at(&self, lambda: f64) -> usize {
        self.mult_sets.iter().take_while(|e| e.contains(lambda)).count()
    }
}

/// Ordered-representation data: catalog families are simple (`m = 1`,
/// `e_1` the closure of the subspectrum); symbolic data passes through.
pub fn ordered_rep_data(spec: &OperatorSpec, window: Window) -> Result<OrderedRepData> {
    if let Family::Symbolic(data) = &spec.family {
        if data.window() != window {
            let w = data.window();
            return Err(Error::WindowMismatch(w.lo, w.hi, window.lo, window.hi));
        }
        return Ok(data.clone());
    }
    let sub = subspectrum(spec, window)?;
    let theta = SpectralMeasureClass::from_subspectrum(&sub);
    let atoms = sub.atoms();
    let pp_weights = (!atoms.is_empty()).then(|| {
        let w = 1.0 / atoms.len() as f64;
        WeightedPPMeasure::new(atoms.iter().map(|a| (*a, w)).collect(), sub.eps()).expect("distinct canonical atoms")
    });
    if theta.is_zero() {
        return Err(Error::Schema(format!(
            "{} has no spectrum inside [{}, {}]",
            spec.id, window.lo, window.hi
        )));
    }
    OrderedRepData::new(theta, vec![sub.closure()], pp_weights)
}
