use std::io::{self, Read, Seek, SeekFrom};
use std::time::{Duration, Instant};

use crossbeam::channel::Sender;

use super::{Chunk, Slab};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReaderStats {
    pub chunks: u64,
    pub bytes: u64,
    pub busy: Duration,
    pub queue_high_water: usize,
}

/// Reads `chunk_size` blocks from the slab start onward until end of file
/// or until the splitter hangs up. Records may run past the slab stop, so
/// the reader does not stop there by itself.
pub fn stage_reader<R: Read + Seek>(mut input: R, slab: Slab, chunk_size: usize, tx: &Sender<Chunk>) -> io::Result<ReaderStats> {
    let mut stats = ReaderStats::default();
    if slab.is_empty() {
        return Ok(stats);
    }
    let started = Instant::now();
    input.seek(SeekFrom::Start(slab.start))?;
    stats.busy += started.elapsed();
    let mut offset = slab.start;
    loop {
        let started = Instant::now();
        let mut bytes = Vec::with_capacity(chunk_size);
        (&mut input).take(chunk_size as u64).read_to_end(&mut bytes)?;
        stats.busy += started.elapsed();
        if bytes.is_empty() {
            break;
        }
        let len = bytes.len() as u64;
        if tx.send(Chunk { bytes, file_offset: offset }).is_err() {
            break;
        }
        stats.queue_high_water = stats.queue_high_water.max(tx.len());
        stats.chunks += 1;
        stats.bytes += len;
        offset += len;
        if len < chunk_size as u64 {
            break;
        }
    }
    Ok(stats)
}
