use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use super::{AggregateError, RankList};
use crate::ids::InstitutionId;
use crate::numeric::mean;

/// Access counts of one [`fagin_topk_traced`] run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaginTrace {
    /// Sorted accesses performed, across all lists.
    pub sorted_accesses: usize,
    /// Random accesses performed to complete seen items.
    pub random_accesses: usize,
    /// Deepest list position reached (1-based).
    pub depth: usize,
}

fn by_score_then_id(a: &(&InstitutionId, f64), b: &(&InstitutionId, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0))
}

fn check_full(lists: &[RankList], k: usize) -> Result<(), AggregateError> {
    if lists.is_empty() {
        return Err(AggregateError::NoInput);
    }
    if k == 0 {
        return Err(AggregateError::InvalidK);
    }
    let universe: BTreeSet<&InstitutionId> = lists[0].ids().collect();
    for (i, list) in lists.iter().enumerate().skip(1) {
        if list.len() != universe.len() {
            return Err(AggregateError::NotFullLists {
                list: i,
                detail: format!("{} items, expected {}", list.len(), universe.len()),
            });
        }
        if let Some(stray) = list.ids().find(|id| !universe.contains(id)) {
            return Err(AggregateError::NotFullLists {
                list: i,
                detail: format!("{stray} is missing from list 0"),
            });
        }
    }
    if k > universe.len() {
        return Err(AggregateError::KTooLarge {
            k,
            universe: universe.len(),
        });
    }
    Ok(())
}

/// Top-`k` institutions by mean score across full, sorted lists.
pub fn fagin_topk(lists: &[RankList], k: usize) -> Result<RankList, AggregateError> {
    fagin_topk_traced(lists, k).map(|(ranking, _)| ranking)
}

/// Fagin's algorithm, also reporting how many accesses it needed.
///
/// Lists are read in parallel by sorted access, one position per list per
/// round. The first time an item is met it is completed by random access to
/// every other list. Reading stops once `k` items have been met in every
/// list. Past that point an unseen item can at best tie the current k-th
/// mean; if the bound from the last scores read still equals it, reading
/// continues until the bound drops below, so that id tie-breaking is exact.
/// The result equals sorting every item by mean and taking the first `k`.
pub fn fagin_topk_traced(lists: &[RankList], k: usize) -> Result<(RankList, FaginTrace), AggregateError> {
    check_full(lists, k)?;
    let n = lists[0].len();
    let m = lists.len();

    let lookup: Vec<HashMap<&InstitutionId, f64>> = lists
        .iter()
        .map(|l| l.items().iter().map(|i| (&i.institution, i.score)).collect())
        .collect();

    // item -> (lists it was met in by sorted access, mean score)
    let mut seen: HashMap<&InstitutionId, (usize, f64)> = HashMap::new();
    let mut complete = 0;
    let mut frontier = vec![f64::INFINITY; m];
    let mut values = vec![0.0; m];
    let mut trace = FaginTrace {
        sorted_accesses: 0,
        random_accesses: 0,
        depth: 0,
    };

    'scan: for depth in 0..n {
        trace.depth = depth + 1;
        for (i, list) in lists.iter().enumerate() {
            let item = &list.items()[depth];
            trace.sorted_accesses += 1;
            frontier[i] = item.score;
            let entry = seen.entry(&item.institution).or_insert_with(|| {
                for (slot, scores) in values.iter_mut().zip(&lookup) {
                    *slot = scores[&item.institution];
                }
                trace.random_accesses += m - 1;
                (0, mean(&values))
            });
            entry.0 += 1;
            if entry.0 == m {
                complete += 1;
            }
            if complete >= k && mean(&frontier) < kth_best(&seen, k) {
                break 'scan;
            }
        }
    }

    let mut ranked: Vec<(&InstitutionId, f64)> = seen.into_iter().map(|(id, (_, v))| (id, v)).collect();
    ranked.sort_by(by_score_then_id);
    ranked.truncate(k);
    let ranking = RankList::from_ordered("fagin", ranked.into_iter().map(|(id, v)| (id.clone(), v)));
    Ok((ranking, trace))
}

fn kth_best(seen: &HashMap<&InstitutionId, (usize, f64)>, k: usize) -> f64 {
    let mut scores: Vec<f64> = seen.values().map(|&(_, v)| v).collect();
    let (_, kth, _) = scores.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
    *kth
}
