//! Fewest-rule traffic splitting with prefix tables.
//!
//! A weight vector over `k` targets summing to `2^W` is a [`Partition`].
//! [`complexity`] gives the smallest table that realizes it exactly,
//! [`sequence_to_table`] writes that table, and [`closest`] finds the best
//! partition reachable under a rule budget for several error measures.
//!
//! ```
//! use tcamsplit::{closest, DistanceKind, Partition};
//!
//! let p = Partition::new(vec![4, 1, 1, 1, 1], 3)?;
//! let r = closest(&p, 2, DistanceKind::Linf)?;
//! assert_eq!(r.error.to_integer(), Some(2));
//! # Ok::<(), tcamsplit::Error>(())
//! ```

pub mod approx;
pub mod error;
pub mod experiments;
pub mod lifting;
pub mod oracle;
pub mod partition;
pub mod sequence;
pub mod tcam;

pub use approx::*;
pub use error::{Error, Result};
pub use experiments::*;
pub use lifting::*;
pub use oracle::*;
pub use partition::*;
pub use sequence::*;
pub use tcam::*;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/partitions.md")]
    mod partitions {}
    #[doc = include_str!("../../../book/src/sequences.md")]
    mod sequences {}
    #[doc = include_str!("../../../book/src/tables.md")]
    mod tables {}
    #[doc = include_str!("../../../book/src/lifting.md")]
    mod lifting {}
    #[doc = include_str!("../../../book/src/approximation.md")]
    mod approximation {}
    #[doc = include_str!("../../../book/src/oracles.md")]
    mod oracles {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
