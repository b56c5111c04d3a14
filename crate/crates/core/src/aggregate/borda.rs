use std::collections::{BTreeMap, BTreeSet};

use super::{AggregateError, BordaVariant, Direction, FinalScoreTable, RankList};
use crate::ids::InstitutionId;
use crate::numeric::fsum;

/// Positional points for one list: `n - rank + 1`, so the head of an
/// `n`-item list gets `n` points and the tail gets 1.
pub fn borda_scores(list: &RankList) -> BTreeMap<InstitutionId, f64> {
    let n = list.len();
    list.items()
        .iter()
        .map(|item| (item.institution.clone(), (n - item.rank + 1) as f64))
        .collect()
}

fn combine(points: &mut [f64], variant: BordaVariant) -> f64 {
    let lists = points.len() as f64;
    match variant {
        BordaVariant::Sum => fsum(points.iter().copied()),
        BordaVariant::Median => {
            points.sort_by(f64::total_cmp);
            let mid = points.len() / 2;
            if points.len() % 2 == 1 {
                points[mid]
            } else {
                (points[mid - 1] + points[mid]) / 2.0
            }
        }
        BordaVariant::GeometricMean => {
            if points.iter().any(|&x| x == 0.0) {
                0.0
            } else {
                (fsum(points.iter().map(|x| x.ln())) / lists).exp()
            }
        }
        BordaVariant::PNorm(p) => fsum(points.iter().map(|x| x.powf(p))) / lists,
    }
}

/// Combines Borda points across lists. An institution missing from a list
/// gets 0 points from it. Higher is better for every variant.
pub fn borda_aggregate(lists: &[RankList], variant: BordaVariant) -> Result<FinalScoreTable, AggregateError> {
    if let BordaVariant::PNorm(p) = variant {
        if !(p.is_finite() && p > 0.0) {
            return Err(AggregateError::InvalidP(p));
        }
    }
    if lists.is_empty() {
        return Err(AggregateError::NoInput);
    }

    let per_list: Vec<BTreeMap<InstitutionId, f64>> = lists.iter().map(borda_scores).collect();
    let universe: BTreeSet<&InstitutionId> = per_list.iter().flat_map(|m| m.keys()).collect();
    let mut points = vec![0.0; lists.len()];
    let entries = universe
        .into_iter()
        .map(|id| {
            for (slot, scores) in points.iter_mut().zip(&per_list) {
                *slot = scores.get(id).copied().unwrap_or(0.0);
            }
            (id.clone(), combine(&mut points, variant))
        })
        .collect();
    Ok(FinalScoreTable::new(entries, Direction::HigherIsBetter))
}
