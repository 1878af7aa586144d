//! Compiles the code snippets of the guide in `book/` as doc-tests. Each
//! chapter is a module so a failing snippet points at its chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/distributions.md")]
pub mod distributions {}
#[doc = include_str!("../../../book/src/rates.md")]
pub mod rates {}
#[doc = include_str!("../../../book/src/strategies.md")]
pub mod strategies {}
#[doc = include_str!("../../../book/src/bounds.md")]
pub mod bounds {}
#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
