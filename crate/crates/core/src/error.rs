use thiserror::Error;

use crate::oracle::ElementId;

pub type Result<T> = std::result::Result<T, NoisyError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoisyError {
    #[error("crossover probability {0} is outside (0, 1/2)")]
    InvalidCrossover(f64),

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("element {0} compared against itself")]
    SelfComparison(ElementId),

    #[error("unknown element id {id} (domain has {size} elements)")]
    UnknownElement { id: ElementId, size: usize },

    #[error("hidden order is not a permutation of 0..{0}")]
    NotAPermutation(usize),

    #[error("majority vote needs an odd, positive repetition count, got {0}")]
    EvenRepetitions(usize),

    /// Raised by the oracle when the query budget pushed at `level` would be
    /// exceeded by the next comparison.
    #[error("query budget at level {level} exhausted")]
    BudgetExhausted { level: usize },
}

pub(crate) fn check_open_unit(name: &'static str, value: f64, hi: f64, range: &'static str) -> Result<()> {
    if value > 0.0 && value < hi {
        Ok(())
    } else {
        Err(NoisyError::OutOfRange { name, value, range })
    }
}

pub(crate) fn check_crossover(p: f64) -> Result<()> {
    if p > 0.0 && p < 0.5 {
        Ok(())
    } else {
        Err(NoisyError::InvalidCrossover(p))
    }
}
