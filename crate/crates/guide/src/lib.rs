//! Doc-test shim for the book.
//!
//! mdbook cannot run code blocks against crate dependencies, so each
//! chapter is included here as module documentation and `cargo test`
//! exercises every `rust` block as an ordinary doc-test. One module per
//! chapter keeps failures attributable to their source file.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/correlation-model.md")]
pub mod correlation_model {}

#[doc = include_str!("../../../book/src/grouping.md")]
pub mod grouping {}

#[doc = include_str!("../../../book/src/capacity-bounds.md")]
pub mod capacity_bounds {}

#[doc = include_str!("../../../book/src/monte-carlo.md")]
pub mod monte_carlo {}

#[doc = include_str!("../../../book/src/pilot-overhead.md")]
pub mod pilot_overhead {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
