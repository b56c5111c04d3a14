use std::path::Path;
use std::thread;

use super::join::{AffiliationBuckets, PaperIndex};
use super::parse::{parse_affiliation_fields, ParsePolicy, ParseStats};
use super::reader::{line_aligned_partitions, open_partition, Partition};
use super::{AffiliationSchema, IngestError};

fn scan_partition(
    path: &Path,
    schema: &AffiliationSchema,
    index: &PaperIndex,
    policy: ParsePolicy,
    partition: Partition,
) -> Result<(AffiliationBuckets, ParseStats), IngestError> {
    let mut reader = open_partition(path, schema, partition)?;
    let mut buckets = AffiliationBuckets::for_index(index);
    let mut stats = ParseStats::default();
    while let Some(row) = reader.read_row()? {
        let Some(fields) = stats.record(parse_affiliation_fields(&row, schema), policy)? else {
            continue;
        };
        if let Some(position) = index.position(fields.paper_id) {
            buckets.push(position, fields.to_owned_row());
        }
    }
    Ok((buckets, stats))
}

/// Streams the affiliation table once and keeps only rows whose paper is in
/// `index`.
///
/// With `partitions > 1` the file is cut into line-aligned byte ranges that
/// are scanned on separate threads; per-partition buckets are concatenated
/// in file order, so the result does not depend on the partition count.
/// Memory is bounded by the index plus the retained rows.
pub fn collect_affiliations(
    path: impl AsRef<Path>,
    schema: &AffiliationSchema,
    index: &PaperIndex,
    policy: ParsePolicy,
    partitions: usize,
) -> Result<(AffiliationBuckets, ParseStats), IngestError> {
    let path = path.as_ref();
    schema.validate()?;
    let ranges = line_aligned_partitions(path, partitions.max(1))?;
    if ranges.len() == 1 {
        return scan_partition(path, schema, index, policy, ranges[0]);
    }

    let results: Vec<_> = thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .iter()
            .map(|&range| scope.spawn(move || scan_partition(path, schema, index, policy, range)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("affiliation scan thread panicked"))
            .collect()
    });

    let mut buckets = AffiliationBuckets::for_index(index);
    let mut stats = ParseStats::default();
    for result in results {
        let (part, part_stats) = result?;
        buckets.absorb(part);
        stats.merge(part_stats);
    }
    Ok((buckets, stats))
}
