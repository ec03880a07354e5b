// NaN-rejecting guards are written as `!(x > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curves;
pub mod error;
pub mod limit;
pub mod numeric;
pub mod orderstats;
pub mod rng;
pub mod tensor;
pub mod transport;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/signatures.md")]
    mod signatures {}
    #[doc = include_str!("../../../book/src/orderstats.md")]
    mod orderstats {}
    #[doc = include_str!("../../../book/src/transport.md")]
    mod transport {}
    #[doc = include_str!("../../../book/src/limits.md")]
    mod limits {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
