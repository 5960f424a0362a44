//! Construction of subharmonic functions and integer zero sets with
//! prescribed asymptotic behaviour.

pub mod density;
pub mod discretize;
pub mod glue;
pub mod lower;
pub mod majorant;
pub mod measure_glue;
pub mod partition;
pub mod weak;

pub use density::{max_density_function, MaxDensity};
pub use discretize::{discretize_measure, discretize_zeros, AtomIndex, Discretization, PolarMeasure, RadialMeasure, Rounding, SumMeasure};
pub use glue::{glue_asymptotic, pseudo_trajectory, GluedField, LaplacianGrid, LaplacianReport, PseudoTrajectory};
pub use lower::{lower_indicator_family, LowerFamily, LowerLevel, LowerMember};
pub use majorant::{convex_majorant, ConvexMajorant};
pub use measure_glue::{GluedMeasure, SampledPotential};
pub use partition::{partition_of_unity, PartitionOfUnity, PartitionReport};
pub use weak::TestBump;
