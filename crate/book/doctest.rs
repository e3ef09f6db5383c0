// mdbook cannot run snippets that depend on a crate, so every chapter is
// pulled in as a module doc and `cargo test --doc` runs them instead. One
// module per chapter keeps failures traceable to a file.

#[doc = include_str!("src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("src/problems.md")]
pub mod problems {}

#[doc = include_str!("src/patterns.md")]
pub mod patterns {}

#[doc = include_str!("src/derivatives.md")]
pub mod derivatives {}

#[doc = include_str!("src/degeneracy.md")]
pub mod degeneracy {}

#[doc = include_str!("src/interval.md")]
pub mod interval {}

#[doc = include_str!("src/oracle.md")]
pub mod oracle {}

#[doc = include_str!("src/files.md")]
pub mod files {}

#[doc = include_str!("src/cli.md")]
pub mod cli {}
