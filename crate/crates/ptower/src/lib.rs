//! Exact arithmetic for tower constructions over truncated p-adic
//! coefficient rings.
//!
//! Everything here computes on degree-truncated models: polynomials are
//! capped at a total degree `D`, coefficients live in Z/p^N with tracked
//! precision, and every verdict that depends on the truncation is qualified
//! by the window on which it was established.

pub mod cli;
pub mod config;
pub mod deltaring;
pub mod error;
pub mod idealkit;
pub mod exactnum;
pub mod fracpoly;
pub mod limcm;
pub mod report;
pub mod tower;
pub mod window;

pub use error::{Error, Result};
// The guide's code blocks compile and run as doc-tests, so the book in
// book/ can never drift from the library surface.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/windows.md")]
    mod windows {}
    #[doc = include_str!("../../../book/src/delta-rings.md")]
    mod delta_rings {}
    #[doc = include_str!("../../../book/src/ideals.md")]
    mod ideals {}
    #[doc = include_str!("../../../book/src/towers.md")]
    mod towers {}
    #[doc = include_str!("../../../book/src/tilts.md")]
    mod tilts {}
    #[doc = include_str!("../../../book/src/limcm.md")]
    mod limcm {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
