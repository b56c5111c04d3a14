use std::collections::BTreeMap;

use num_traits::Zero;

use super::{check_distinct_years, AggregateError, Direction, FinalScoreTable};
use crate::ids::InstitutionId;
use crate::numeric::{exact_to_f64, Exact};
use crate::scoring::ScoreTable;

/// `f(u) = sum over years of f_year(u) / max_year`, with `f_year(u) = 0` when
/// `u` is absent from that year.
///
/// The sum is carried out exactly and rounded once, so the result is
/// bitwise independent of year order and of any positive rescaling of a
/// year. All-zero years contribute nothing.
pub fn normalized_sum(tables: &[ScoreTable]) -> Result<FinalScoreTable, AggregateError> {
    if tables.is_empty() {
        return Err(AggregateError::NoInput);
    }
    check_distinct_years(tables)?;

    let mut sums: BTreeMap<InstitutionId, Exact> = BTreeMap::new();
    for table in tables {
        let max = table.max().cloned().unwrap_or_else(Exact::zero);
        if max.is_zero() && !table.is_empty() {
            log::warn!("year {} has only zero scores; it adds nothing", table.year());
        }
        for (id, score) in table.iter() {
            let entry = sums.entry(id.clone()).or_insert_with(Exact::zero);
            if !max.is_zero() {
                *entry += score / &max;
            }
        }
    }

    let entries = sums.iter().map(|(id, v)| (id.clone(), exact_to_f64(v))).collect();
    Ok(FinalScoreTable::new(entries, Direction::HigherIsBetter))
}
