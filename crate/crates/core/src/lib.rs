//! Exact computations on finite quasi-metric spaces: weights, distributors,
//! ideals and their colimits, formal balls, and classes of weights, with
//! generators and oracles for checking the theory on small carriers.

#![allow(clippy::result_large_err, clippy::large_enum_variant)]

pub mod balls;
pub mod distributors;
pub mod io;
pub mod ideals;
pub mod monadics;
pub mod numerics;
pub mod space;
pub mod verdict;
pub mod verification;
pub mod weights;

pub use numerics::ExtNonneg;
pub use space::{FiniteSpace, SpaceRef};
pub use weights::{Coweight, Weight};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/spaces.md")]
    mod spaces {}
    #[doc = include_str!("../../../book/src/weights.md")]
    mod weights {}
    #[doc = include_str!("../../../book/src/distributors.md")]
    mod distributors {}
    #[doc = include_str!("../../../book/src/ideals.md")]
    mod ideals {}
    #[doc = include_str!("../../../book/src/formal-balls.md")]
    mod formal_balls {}
    #[doc = include_str!("../../../book/src/streamed.md")]
    mod streamed {}
    #[doc = include_str!("../../../book/src/monadics.md")]
    mod monadics {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
