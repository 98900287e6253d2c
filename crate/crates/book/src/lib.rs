// mdbook cannot run listings that depend on workspace crates, so every
// chapter is included here as the docs of an empty module and its listings
// run under `cargo test --doc`. One module per chapter keeps failures
// traceable to their chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/polynomials.md")]
pub mod polynomials {}
#[doc = include_str!("../../../book/src/families.md")]
pub mod families {}
#[doc = include_str!("../../../book/src/smoothness.md")]
pub mod smoothness {}
#[doc = include_str!("../../../book/src/transversality.md")]
pub mod transversality {}
#[doc = include_str!("../../../book/src/isotopy.md")]
pub mod isotopy {}
#[doc = include_str!("../../../book/src/links.md")]
pub mod links {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
