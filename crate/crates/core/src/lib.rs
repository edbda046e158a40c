#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod kac;
pub mod montecarlo;
pub mod orthopoly;
pub mod quad;
pub mod scaling;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/weights.md")]
    mod weights {}
    #[doc = include_str!("../../../book/src/densities.md")]
    mod densities {}
    #[doc = include_str!("../../../book/src/recurrence.md")]
    mod recurrence {}
    #[doc = include_str!("../../../book/src/kac.md")]
    mod kac {}
    #[doc = include_str!("../../../book/src/montecarlo.md")]
    mod montecarlo {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
