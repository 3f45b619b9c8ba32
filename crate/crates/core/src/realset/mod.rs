//! Set algebra on the spectral axis and measure classes built on top of it.
//!
//! All sets live on one shared real line truncated to a closed working
//! window; which operator owns a set is tracked by the caller. Countable
//! atom families are materialized as explicit finite lists inside the window.

mod measure;
mod set;
mod spec;

pub use measure::{
    class_measure_sign, measure_sum_eval, split_pp_cont, MeasureSign, MeasureSumEval, SpectralMeasureClass,
    WeightedPPMeasure,
};
pub use set::{Interval, RealSet, SetOp, Window, DEFAULT_EPS_ATOM};
pub use spec::{Endpoint, InfName, IntervalSpec, Progression, SetSpec};

/// `set_combine`: exact Boolean operation on two sets sharing a window.
pub fn set_combine(a: &RealSet, b: &RealSet, op: SetOp) -> crate::Result<RealSet> {
    a.combine(b, op)
}
