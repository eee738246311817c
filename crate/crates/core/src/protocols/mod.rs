//! Uncomplexity extraction and expenditure.
//!
//! Both protocols take their circuit from a complexity-entropy witness
//! Q = U†Q₀U and run it through fuzzy gates, so every trial can be compared with
//! the error budget the fuzziness allows.

mod expend;
mod extract;

pub use expend::{expend, BankState, ExpenditurePlan, ExpenditureResult};
pub use extract::{extract, extraction_converse, ExtractionPlan, ExtractionResult};

use crate::{Error, Result};

fn check_delta(delta: f64, allow_zero: bool) -> Result<()> {
    let ok = if allow_zero { (0.0..1.0).contains(&delta) } else { delta > 0.0 && delta <= 1.0 };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("delta = {delta} is out of range")))
    }
}
