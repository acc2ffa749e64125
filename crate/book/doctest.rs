// mdbook cannot run listings against a library, so each chapter is mounted
// as a module doc and `cargo test --doc` runs its code blocks.

#[doc = include_str!("src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("src/bitprobe.md")]
pub mod bitprobe {}
#[doc = include_str!("src/sparse.md")]
pub mod sparse {}
#[doc = include_str!("src/subblock.md")]
pub mod subblock {}
#[doc = include_str!("src/container.md")]
pub mod container {}
#[doc = include_str!("src/sizing.md")]
pub mod sizing {}
#[doc = include_str!("src/bounds.md")]
pub mod bounds {}
#[doc = include_str!("src/cli.md")]
pub mod cli {}
