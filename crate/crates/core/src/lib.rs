//! Jordan triple calculus on finite ℓ∞-sums of rectangular complex matrix factors.
//!
//! The triple product `{x,y,z} = ½(xy*z + zy*x)` turns every `M_{m,n}(ℂ)` into a
//! JB*-triple. On top of it the crate provides the Peirce calculus, singular-value
//! functional calculus (range tripotents, generalized inverses, conorms), Brown–Pedersen
//! quasi-invertibility, distances to the extreme points of the unit ball and the
//! λ-function, plus a deterministic experiment harness in [`lab`].

pub mod bp;
pub mod element;
pub mod error;
pub mod geometry;
pub mod lab;
pub mod linalg;
pub mod sampling;
pub mod spectral;
pub mod triple;

pub use element::{CMatrix, SpaceDescriptor, Tolerance, TripleElement, DEFAULT_RTOL};
pub use error::{Result, TripleError};
