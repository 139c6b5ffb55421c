//! Classification, unit-time maps and fractal box dimensions near nilpotent
//! singularities of planar polynomial vector fields.
//!
//! The crate computes, for a planar field with a nilpotent singularity at
//! the origin:
//!
//! - the topological type of the singularity (`classify`),
//! - Taylor jets of the unit-time map and numerically integrated discrete
//!   orbits (`unitmap`),
//! - separatrix Puiseux expansions through quasihomogeneous blow-up
//!   (`blowup`),
//! - closed-form box dimensions of unit-time orbits on separatrices and
//!   independent numerical estimators (`boxdim`),
//! - the two affine charts at infinity with their predicted dimensions
//!   (`infinity`),
//! - the saddle normal form, its chart at infinity and the dual box
//!   dimension (`saddledual`),
//! - a preset library with a cross-checking verification driver, a
//!   two-parameter bifurcation sweep and plot emission (`presets`,
//!   `sweep`, `plot`).
//!
//! Scale evaluations inside the estimators and sweep cells run in parallel
//! when the `parallel` feature (default) is enabled; disabling it yields a
//! fully sequential build with identical results.

pub mod blowup;
pub mod boxdim;
pub mod classify;
pub mod coeff;
pub mod error;
pub mod infinity;
pub mod io;
pub mod model;
pub(crate) mod par;
pub mod plot;
pub mod poly;
pub mod presets;
pub mod saddledual;
pub mod series;
pub mod sweep;
pub mod unitmap;

pub use coeff::{Coeff, QuadExt, Rat};
pub use model::NilpotentModel;
pub use poly::{BiPoly, PlanarVectorField};
pub use series::PuiseuxSeries;
