#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod eigensolver;
pub mod error;
pub mod grid;
pub mod halfline;
pub mod lower_bounds;
pub mod quadrature;
pub mod specfun;
pub mod upper_bounds;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/asymptotics.md")]
    mod asymptotics {}
    #[doc = include_str!("../../../book/src/halfline.md")]
    mod halfline {}
    #[doc = include_str!("../../../book/src/lower_bounds.md")]
    mod lower_bounds {}
    #[doc = include_str!("../../../book/src/upper_bounds.md")]
    mod upper_bounds {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
