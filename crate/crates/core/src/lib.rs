//! Exact enumeration and classification of quasi-smooth hypersurfaces in
//! weighted projective spaces.
//!
//! The headline application is the census of anticanonically embedded
//! quasi-smooth Fano hypersurfaces `X_d` in weighted projective 4-space:
//! 48 one-parameter series and 4442 sporadic weight systems.

pub mod brute;
pub mod census;
pub mod classify;
pub mod cyg;
pub mod error;
pub mod linalg;
pub mod qsmooth;
pub mod search;
pub mod semigroup;
pub mod weights;

pub use error::{Error, Result};
pub use weights::{FamilyKind, HypersurfaceFamily, Monomial, WeightSystem};
