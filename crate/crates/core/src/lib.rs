//! Multipoint Schur algorithm on the unit disk, Wall rational functions,
//! orthogonal rational functions on the circle and convergence diagnostics.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to `f64`.

// `!(x < y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod diagnostics;
pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod jet;
mod linalg;
pub mod measure;
pub mod orf;
pub mod output;
pub mod scalar;
pub mod scenario;
pub mod schur;
pub mod wall;

pub use error::{Error, Result};
pub use geometry::{CirclePoint, DiskPoint};
pub use measure::{Atom, CircleGrid, CircleMeasure, SzegoFunction};
pub use scalar::{Real, C};
pub use schur::{AlphaGenerator, AlphaSequence, SchurFunction, SchurParams};

pub type Complex64 = num_complex::Complex64;
pub type DiskPoint64 = DiskPoint<f64>;
pub type CirclePoint64 = CirclePoint<f64>;
pub type CircleGrid64 = CircleGrid<f64>;
pub type CircleMeasure64 = CircleMeasure<f64>;
pub type SchurFunction64 = SchurFunction<f64>;
pub type AlphaSequence64 = AlphaSequence<f64>;
pub type SchurParams64 = SchurParams<f64>;
