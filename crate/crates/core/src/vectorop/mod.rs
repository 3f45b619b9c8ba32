//! Direct sums of coordinate operators: the superposition graph, the
//! spectral index as a minimal partition, cyclic-vector plans and the
//! coordinatewise functional calculus on pure-point slots.

mod calculus;
mod coloring;
mod graph;
mod system;

pub(crate) use calculus::check_bounded;
pub use calculus::{
    borel_calculus_apply, cyclic_vector_plan, identity_resolution_apply, PlanComponent, PlanVector, SampledFunction,
    BOUNDEDNESS_PROBES,
};
pub use coloring::{
    dsatur, max_clique, partition_graph, spectral_index, Certificate, PartitionResult, COUNT_NODE_LIMIT,
    EXACT_NODE_LIMIT,
};
pub use graph::{build_superposition_graph, Edge, SuperpositionGraph};
pub(crate) use system::check_pp_vector;
pub use system::{EMZSystem, Slot, SlotVector, VectorFunction};
