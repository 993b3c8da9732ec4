use std::io::{self, Write};
use std::time::{Duration, Instant};

use crossbeam::channel::Receiver;

use super::{OutputRow, PipelineError};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WriterStats {
    pub rows: u64,
    pub bytes: u64,
    pub write_calls: u64,
    pub busy: Duration,
}

/// `SMILES<TAB>score` with four fractional digits.
pub fn format_row(row: &OutputRow) -> String {
    let score = format!("{:.4}", row.score);
    let score = if score == "-0.0000" { "0.0000" } else { &score };
    format!("{}\t{score}\n", row.smiles)
}

pub fn parse_row(line: &str, line_no: usize) -> Result<OutputRow, PipelineError> {
    let bad = |reason: &str| PipelineError::BadRow {
        line: line_no,
        reason: reason.to_string(),
    };
    let (smiles, score) = line.split_once('\t').ok_or_else(|| bad("missing tab"))?;
    if smiles.is_empty() {
        return Err(bad("empty SMILES"));
    }
    let score: f64 = score.parse().map_err(|_| bad("score is not a number"))?;
    if !score.is_finite() {
        return Err(bad("score is not finite"));
    }
    Ok(OutputRow {
        smiles: smiles.to_string(),
        score,
    })
}

/// Accumulates rows and hands the sink exactly `capacity` bytes each time
/// the buffer fills, plus one final write for the remainder.
pub struct RowWriter<W: Write> {
    sink: W,
    buf: Vec<u8>,
    capacity: usize,
    stats: WriterStats,
}

impl<W: Write> RowWriter<W> {
    pub fn new(sink: W, capacity: usize) -> Self {
        RowWriter {
            sink,
            buf: Vec::with_capacity(capacity),
            capacity: capacity.max(1),
            stats: WriterStats::default(),
        }
    }

    pub fn push(&mut self, row: &OutputRow) -> io::Result<()> {
        let line = format_row(row);
        let mut bytes = line.as_bytes();
        while !bytes.is_empty() {
            let take = bytes.len().min(self.capacity - self.buf.len());
            self.buf.extend_from_slice(&bytes[..take]);
            bytes = &bytes[take..];
            if self.buf.len() == self.capacity {
                self.flush_buffer()?;
            }
        }
        self.stats.rows += 1;
        Ok(())
    }

    fn flush_buffer(&mut self) -> io::Result<()> {
        self.sink.write_all(&self.buf)?;
        self.stats.write_calls += 1;
        self.stats.bytes += self.buf.len() as u64;
        self.buf.clear();
        Ok(())
    }

    /// Writes what is left and flushes the sink.
    pub fn finish(mut self) -> io::Result<(W, WriterStats)> {
        if !self.buf.is_empty() {
            self.flush_buffer()?;
        }
        self.sink.flush()?;
        Ok((self.sink, self.stats))
    }
}

pub fn stage_writer<W: Write>(rx: &Receiver<OutputRow>, sink: W, buffer_size: usize) -> io::Result<WriterStats> {
    let mut writer = RowWriter::new(sink, buffer_size);
    let mut busy = Duration::ZERO;
    for row in rx {
        let started = Instant::now();
        writer.push(&row)?;
        busy += started.elapsed();
    }
    let started = Instant::now();
    let (_, mut stats) = writer.finish()?;
    stats.busy = busy + started.elapsed();
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Counts `write` calls reaching the sink.
    struct Counting {
        calls: usize,
        bytes: usize,
    }

    impl Write for Counting {
        fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
            self.calls += 1;
            self.bytes += buf.len();
            Ok(buf.len())
        }
        fn flush(&mut self) -> io::Result<()> {
            Ok(())
        }
    }

    #[test]
    fn ten_mib_in_three_writes() {
        let row = OutputRow {
            smiles: "C".repeat(1014),
            score: -12.5,
        };
        let line = format_row(&row).len();
        assert_eq!(line, 1024);
        let mut w = RowWriter::new(Counting { calls: 0, bytes: 0 }, 4 << 20);
        for _ in 0..10 * 1024 {
            w.push(&row).unwrap();
        }
        let (sink, stats) = w.finish().unwrap();
        assert_eq!(sink.calls, 3);
        assert_eq!(stats.write_calls, 3);
        assert_eq!(sink.bytes, 10 << 20);
    }

    #[test]
    fn no_rows_no_writes() {
        let (sink, stats) = RowWriter::new(Counting { calls: 0, bytes: 0 }, 64).finish().unwrap();
        assert_eq!((sink.calls, stats.write_calls, stats.rows), (0, 0, 0));
    }

    #[test]
    fn row_format() {
        let r = |score| OutputRow { smiles: "CCO".into(), score };
        assert_eq!(format_row(&r(1.0)), "CCO\t1.0000\n");
        assert_eq!(format_row(&r(-0.00001)), "CCO\t0.0000\n");
        assert_eq!(format_row(&r(-1.23456)), "CCO\t-1.2346\n");
        let back = parse_row(format_row(&r(2.5)).trim_end(), 1).unwrap();
        assert_eq!(back, r(2.5));
        assert!(parse_row("CCO 1.0", 1).is_err());
        assert!(parse_row("CCO\tinf", 1).is_err());
    }
}
