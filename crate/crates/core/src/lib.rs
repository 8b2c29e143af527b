#![doc = include_str!("../README.md")]

pub mod assets;
pub mod error;
pub mod io;
pub mod market;
pub mod matching;
pub mod oracle;
pub mod replica;
pub mod set;
pub mod tarski;

pub use error::{Error, Result};
pub use market::{ChoiceFunction, Market, Side, Variant};
pub use matching::Matching;
pub use set::AgentSet;

// The guide's code blocks run as doctests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/markets.md")]
    mod markets {}
    #[doc = include_str!("../../../book/src/stability.md")]
    mod stability {}
    #[doc = include_str!("../../../book/src/tarski.md")]
    mod tarski {}
    #[doc = include_str!("../../../book/src/replica.md")]
    mod replica {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
