// The guide's listings are compiled and run as doc-tests by pulling each
// chapter in as the docs of an empty module, one module per chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/graphs.md")]
pub mod graphs {}
#[doc = include_str!("../../../book/src/qubo.md")]
pub mod qubo {}
#[doc = include_str!("../../../book/src/solvers.md")]
pub mod solvers {}
#[doc = include_str!("../../../book/src/scoring.md")]
pub mod scoring {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../book/src/remote.md")]
pub mod remote {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}
