use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Seek, SeekFrom};
use std::path::{Path, PathBuf};

use flate2::read::MultiGzDecoder;

use super::{IngestError, RowFault, RowPos, TableSchema};

const GZIP_MAGIC: [u8; 2] = [0x1f, 0x8b];
const READ_BUFFER: usize = 1 << 16;

/// A byte range of a table that starts and ends on line boundaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Partition {
    pub start: u64,
    /// `None` means "to the end of the stream".
    pub end: Option<u64>,
}

impl Partition {
    pub const WHOLE: Partition = Partition { start: 0, end: None };
}

/// A borrowed row. Valid until the next call to [`RowReader::read_row`].
#[derive(Clone, Copy, Debug)]
pub struct RowRef<'a> {
    pub pos: RowPos,
    pub bytes: &'a [u8],
}

impl<'a> RowRef<'a> {
    pub fn text(&self) -> Result<&'a str, IngestError> {
        std::str::from_utf8(self.bytes).map_err(|_| IngestError::MalformedRow {
            pos: self.pos,
            fault: RowFault::InvalidUtf8,
        })
    }
}

/// An owned row, as yielded by the [`Iterator`] impl of [`RowReader`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawRow {
    pub pos: RowPos,
    pub bytes: Vec<u8>,
}

impl RawRow {
    pub fn as_row(&self) -> RowRef<'_> {
        RowRef {
            pos: self.pos,
            bytes: &self.bytes,
        }
    }
}

/// Line-at-a-time reader over one table or one partition of it.
///
/// Memory use is one line buffer plus a fixed read buffer, whatever the size
/// of the file. Blank lines are skipped; a trailing `\r` is stripped.
pub struct RowReader {
    source: Box<dyn BufRead + Send>,
    path: PathBuf,
    buf: Vec<u8>,
    line: u64,
    offset: u64,
    skip_header: bool,
}

impl std::fmt::Debug for RowReader {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RowReader")
            .field("path", &self.path)
            .field("line", &self.line)
            .field("offset", &self.offset)
            .finish()
    }
}

fn is_gzip(reader: &mut BufReader<File>) -> io::Result<bool> {
    Ok(reader.fill_buf()?.starts_with(&GZIP_MAGIC))
}

fn open_file(path: &Path) -> Result<BufReader<File>, IngestError> {
    let file = File::open(path).map_err(|e| IngestError::io(path, RowPos::default(), e))?;
    Ok(BufReader::with_capacity(READ_BUFFER, file))
}

/// Opens a whole table. Gzip input is detected by its magic bytes and
/// decompressed on the fly.
pub fn open_table<C>(path: impl AsRef<Path>, schema: &TableSchema<C>) -> Result<RowReader, IngestError> {
    open_range(path.as_ref(), schema.has_header, Partition::WHOLE)
}

/// Opens one partition produced by [`line_aligned_partitions`]. The header
/// row, if any, is skipped only by the partition that starts at byte 0.
pub fn open_partition<C>(
    path: impl AsRef<Path>,
    schema: &TableSchema<C>,
    partition: Partition,
) -> Result<RowReader, IngestError> {
    open_range(path.as_ref(), schema.has_header, partition)
}

pub(crate) fn open_range(path: &Path, has_header: bool, partition: Partition) -> Result<RowReader, IngestError> {
    let mut reader = open_file(path)?;
    let gzip = is_gzip(&mut reader).map_err(|e| IngestError::io(path, RowPos::default(), e))?;
    let source: Box<dyn BufRead + Send> = if gzip {
        if partition != Partition::WHOLE {
            return Err(IngestError::InvalidSchema(format!(
                "{} is gzip-compressed and cannot be read by byte range",
                path.display()
            )));
        }
        Box::new(BufReader::with_capacity(READ_BUFFER, MultiGzDecoder::new(reader)))
    } else {
        reader
            .seek(SeekFrom::Start(partition.start))
            .map_err(|e| IngestError::io(path, RowPos::default(), e))?;
        match partition.end {
            Some(end) => Box::new(reader.take(end.saturating_sub(partition.start))),
            None => Box::new(reader),
        }
    };
    Ok(RowReader {
        source,
        path: path.to_path_buf(),
        buf: Vec::with_capacity(256),
        line: 0,
        offset: partition.start,
        skip_header: has_header && partition.start == 0,
    })
}

impl RowReader {
    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Reads the next non-blank row.
    pub fn read_row(&mut self) -> Result<Option<RowRef<'_>>, IngestError> {
        loop {
            self.buf.clear();
            let pos = RowPos {
                line: self.line + 1,
                offset: self.offset,
            };
            let n = self
                .source
                .read_until(b'\n', &mut self.buf)
                .map_err(|e| IngestError::io(&self.path, pos, e))?;
            if n == 0 {
                return Ok(None);
            }
            self.line += 1;
            self.offset += n as u64;
            if self.buf.last() == Some(&b'\n') {
                self.buf.pop();
            }
            if self.buf.last() == Some(&b'\r') {
                self.buf.pop();
            }
            if self.skip_header {
                self.skip_header = false;
                continue;
            }
            if self.buf.is_empty() {
                continue;
            }
            return Ok(Some(RowRef {
                pos,
                bytes: &self.buf,
            }));
        }
    }
}

impl Iterator for RowReader {
    type Item = Result<RawRow, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        match self.read_row() {
            Ok(Some(row)) => Some(Ok(RawRow {
                pos: row.pos,
                bytes: row.bytes.to_vec(),
            })),
            Ok(None) => None,
            Err(e) => Some(Err(e)),
        }
    }
}

/// Splits a plain-text table into at most `parts` byte ranges, each starting
/// at the beginning of a line. Gzip files always yield a single
/// [`Partition::WHOLE`].
pub fn line_aligned_partitions(
    path: impl AsRef<Path>,
    parts: usize,
) -> Result<Vec<Partition>, IngestError> {
    let path = path.as_ref();
    let mut reader = open_file(path)?;
    let err = |e| IngestError::io(path, RowPos::default(), e);
    if parts <= 1 || is_gzip(&mut reader).map_err(err)? {
        return Ok(vec![Partition::WHOLE]);
    }
    let size = reader.get_ref().metadata().map_err(err)?.len();

    let mut bounds = vec![0u64];
    let mut scratch = Vec::new();
    for i in 1..parts as u64 {
        let nominal = size * i / parts as u64;
        let last = *bounds.last().expect("bounds start non-empty");
        if nominal <= last {
            continue;
        }
        // First line start at or after `nominal`.
        reader.seek(SeekFrom::Start(nominal - 1)).map_err(err)?;
        scratch.clear();
        let n = reader.read_until(b'\n', &mut scratch).map_err(err)?;
        let bound = (nominal - 1 + n as u64).min(size);
        if bound > last && bound < size {
            bounds.push(bound);
        }
    }
    bounds.push(size);

    let mut partitions: Vec<Partition> = bounds
        .windows(2)
        .map(|w| Partition {
            start: w[0],
            end: Some(w[1]),
        })
        .collect();
    if partitions.is_empty() {
        partitions.push(Partition::WHOLE);
    }
    Ok(partitions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &[u8]) -> tempfile::NamedTempFile {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(content).unwrap();
        file.flush().unwrap();
        file
    }

    fn texts(reader: RowReader) -> Vec<String> {
        reader
            .map(|r| String::from_utf8(r.unwrap().bytes).unwrap())
            .collect()
    }

    #[test]
    fn yields_rows_in_file_order() {
        let file = write_temp(b"a\t1\nb\t2\r\nc\t3");
        let rows: Vec<_> = open_range(file.path(), false, Partition::WHOLE).unwrap().map(Result::unwrap).collect();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[1].bytes, b"b\t2");
        assert_eq!(rows[2].pos, RowPos { line: 3, offset: 9 });
    }

    #[test]
    fn empty_file_is_empty_stream() {
        let file = write_temp(b"");
        assert_eq!(open_range(file.path(), true, Partition::WHOLE).unwrap().count(), 0);
    }

    #[test]
    fn header_and_blank_lines_are_skipped() {
        let file = write_temp(b"id\tyear\n\nx\t1\n\n");
        assert_eq!(texts(open_range(file.path(), true, Partition::WHOLE).unwrap()), vec!["x\t1"]);
    }

    #[test]
    fn missing_file_is_reported_as_not_found() {
        let err = open_range(Path::new("/definitely/not/here.tsv"), false, Partition::WHOLE).unwrap_err();
        assert!(matches!(err, IngestError::FileNotFound { .. }));
    }

    #[test]
    fn gzip_input_is_detected() {
        let mut encoder = flate2::write::GzEncoder::new(Vec::new(), flate2::Compression::fast());
        encoder.write_all(b"p1\t2014\np2\t2015\n").unwrap();
        let file = write_temp(&encoder.finish().unwrap());
        assert_eq!(texts(open_range(file.path(), false, Partition::WHOLE).unwrap()), vec!["p1\t2014", "p2\t2015"]);
        assert_eq!(line_aligned_partitions(file.path(), 4).unwrap(), vec![Partition::WHOLE]);
    }

    #[test]
    fn partitions_cover_every_line_exactly_once() {
        let content: String = (0..500).map(|i| format!("row{i}\t{}\n", "x".repeat(i % 17))).collect();
        let file = write_temp(content.as_bytes());
        let whole = texts(open_range(file.path(), false, Partition::WHOLE).unwrap());
        for parts in [1, 2, 3, 7, 64, 1000] {
            let partitions = line_aligned_partitions(file.path(), parts).unwrap();
            assert!(partitions.len() <= parts.max(1));
            let mut joined = Vec::new();
            for p in partitions {
                joined.extend(texts(open_range(file.path(), false, p).unwrap()));
            }
            assert_eq!(joined, whole, "parts = {parts}");
        }
    }
}
