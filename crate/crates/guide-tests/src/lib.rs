//! Keeps the book honest: each chapter is included as rustdoc so that
//! `cargo test --doc` compiles and runs every code block the book shows.
//! mdBook cannot link the library into its own test runner, so this shim is
//! the single source of truth for both.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/graphs.md")]
pub mod graphs {}

#[doc = include_str!("../../../book/src/balance.md")]
pub mod balance {}

#[doc = include_str!("../../../book/src/cycles.md")]
pub mod cycles {}

#[doc = include_str!("../../../book/src/stochastic.md")]
pub mod stochastic {}

#[doc = include_str!("../../../book/src/protocols.md")]
pub mod protocols {}

#[doc = include_str!("../../../book/src/cregular.md")]
pub mod cregular {}

#[doc = include_str!("../../../book/src/formats.md")]
pub mod formats {}
