//! Finite quasigroup approximations of unimodular groups.
//!
//! A compact window of a group is cut into equal-measure cells, the
//! cell-to-cell multiplication tensor is computed (exactly or by Monte
//! Carlo), rounded to an integer amalgam and realized as a Latin square
//! whose indices map into the cells. The core is generic over [`Scalar`];
//! [`Rational`] gives exact arithmetic and `f64` fast sampling.

pub mod flow;
pub mod group;
pub mod latin;
pub mod partition;
pub mod pipeline;
pub mod scalar;
pub mod tensor;

pub use group::*;
pub use latin::*;
pub use partition::*;
pub use pipeline::{
    approximate_compact, approximate_locally_compact, loop_approximate, unimodularity_probe, ApproxMap,
    ApproximationReport, PipelineError, ProbeReport,
};
pub use scalar::{common_denominator, parse_ratio_str, Rational, Scalar};
pub use tensor::*;

pub type ExactModel = GroupModel<Rational>;
pub type FloatModel = GroupModel<f64>;
pub type ExactPartition = Partition<Rational>;
pub type FloatPartition = Partition<f64>;
pub type ExactTensor = WTensor<Rational>;
pub type FloatTensor = WTensor<f64>;
pub type ExactWindow = CompactWindow<Rational>;
pub type FloatWindow = CompactWindow<f64>;
