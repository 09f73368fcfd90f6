//! Quadratic Fourier analysis over `F_p^n`.

pub mod constructions;
pub mod detectors;
pub mod error;
pub mod factors;
pub mod formula;
pub mod fp;
pub mod linalg;
pub mod regularize;
pub mod uniformity;

pub use error::{QfaError, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/groups.md")]
    mod groups {}
    #[doc = include_str!("../../../book/src/factors.md")]
    mod factors {}
    #[doc = include_str!("../../../book/src/constructions.md")]
    mod constructions {}
    #[doc = include_str!("../../../book/src/patterns.md")]
    mod patterns {}
    #[doc = include_str!("../../../book/src/uniformity.md")]
    mod uniformity {}
    #[doc = include_str!("../../../book/src/regularization.md")]
    mod regularization {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
