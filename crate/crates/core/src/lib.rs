//! Dynamics of finitely generated polynomial semigroups with bounded
//! postcritical set.
//!
//! * [`poly`]: polynomial arithmetic, roots, escape radii.
//! * [`semigroup`]: generator sets and postcritical certificates.
//! * [`julia`]: grid and point-cloud approximations of the semigroup Julia
//!   set, its components and their surrounding order.
//! * [`fiber`]: sequences of generators, fiberwise filled Julia sets and
//!   Jordan/quasicircle diagnostics.
//! * [`random_dyn`]: i.i.d. sampling of sequences and Monte Carlo statistics.
//! * [`render`]: PPM/PNG/CSV/JSON output.

pub mod error;
pub mod fiber;
pub mod geom;
pub mod grid;
pub mod julia;
pub mod poly;
pub mod random_dyn;
pub mod render;
pub mod semigroup;

pub use error::{Error, Result};
pub use grid::{GridSpec, Window};
pub use poly::{Polynomial, C64};
pub use semigroup::GeneratorSet;
