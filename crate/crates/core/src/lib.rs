//! Numerical growth theory of subharmonic and entire functions in the plane.

pub mod bump;
pub mod completeness;
pub mod direction;
pub mod error;
pub mod field;
pub mod indicators;
pub mod kernels;
pub mod limits;
pub mod measure;
pub mod potentials;
pub mod quad;
pub mod scale;
pub mod synthesis;

pub use direction::{CircleMeasure, DirectionFunction};
pub use error::{Error, ErrorCategory, Result};
pub use field::PlaneField;
pub use measure::{Atom, MassDistribution};
pub use num_complex::Complex64;
pub use scale::{GrowthReport, ProximateOrder, RadialSeries};
