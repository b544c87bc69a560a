//! Noisy sorting and noisy binary search against a simulated comparison
//! channel.
//!
//! Every comparison goes through a [`NoisyOracle`], which hides a strict total
//! order over element ids `0..n` and flips each answer independently with a
//! fixed crossover probability `p < 1/2`. The oracle counts queries per caller
//! tag, so the algorithms' query complexity can be measured directly.
//!
//! - [`primitives`]: channel constants, the sequential `less_than` test, the
//!   majority baseline and the bounded restart wrapper.
//! - [`search`]: posterior gap search and the verify-and-retry search.
//! - [`sort`]: inversion sort, binary insertion sorts, weak sort and the
//!   pivot-and-bucket [`noisy_sort`](sort::noisy_sort).

pub mod error;
pub mod oracle;
pub mod primitives;
pub mod search;
pub mod sort;

pub use error::{NoisyError, Result};
pub use oracle::{ElementId, NoisyOracle, QueryLedger};
