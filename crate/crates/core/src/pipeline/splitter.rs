use std::time::{Duration, Instant};

use crossbeam::channel::{Receiver, Sender};

use super::{Chunk, PipelineError, Slab, WorkItem};
use crate::molmodel::codec::{check_frame, decode_record, scan_record_start, Frame, Scan, FILE_HEADER_LEN};
use crate::molmodel::CodecError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SplitterStats {
    pub items: u64,
    pub skipped: u64,
    pub busy: Duration,
    pub queue_high_water: usize,
}

/// Byte window over the file, fed by chunks.
struct Window<'a> {
    rx: &'a Receiver<Chunk>,
    buf: Vec<u8>,
    /// File offset of `buf[0]`.
    base: u64,
    eof: bool,
}

impl Window<'_> {
    /// Appends the next chunk; false once the reader is done.
    fn pull(&mut self, busy: &mut Duration, since: &mut Instant) -> bool {
        *busy += since.elapsed();
        let got = self.rx.recv();
        *since = Instant::now();
        match got {
            Ok(chunk) => {
                debug_assert_eq!(chunk.file_offset, self.base + self.buf.len() as u64);
                self.buf.extend_from_slice(&chunk.bytes);
                true
            }
            Err(_) => {
                self.eof = true;
                false
            }
        }
    }

    /// Drops consumed bytes in front of `pos`, returning the new `pos`.
    fn compact(&mut self, pos: usize) -> usize {
        if pos > (1 << 20) && pos > self.buf.len() / 2 {
            self.buf.drain(..pos);
            self.base += pos as u64;
            return 0;
        }
        pos
    }
}

enum State {
    /// Looking for a record start at or after `pos`. `resync` is set after
    /// damage, where running out of starts is not an error.
    Seeking { resync: bool },
    Framing,
}

/// Frames and decodes the records owned by `slab`: every record whose start
/// offset lies in the slab, including the tail of the last one, which may
/// extend past the slab stop.
pub fn stage_splitter(rx: &Receiver<Chunk>, tx: &Sender<WorkItem>, slab: Slab) -> Result<SplitterStats, PipelineError> {
    let mut stats = SplitterStats::default();
    if slab.is_empty() {
        return Ok(stats);
    }
    let mut since = Instant::now();
    let mut w = Window {
        rx,
        buf: Vec::new(),
        base: slab.start,
        eof: false,
    };
    let header = FILE_HEADER_LEN as u64;
    let mut pos = header.saturating_sub(slab.start) as usize;
    // the first record of the file needs no search
    let mut state = if slab.contains(header) {
        State::Framing
    } else {
        State::Seeking { resync: false }
    };
    let mut seq = 0u64;
    let mut broken: Option<u64> = None;
    loop {
        let limit = (slab.stop - w.base) as usize;
        if pos >= limit {
            break;
        }
        match state {
            State::Seeking { resync } => match scan_record_start(&w.buf, pos, limit, w.eof) {
                Scan::Found(start) => {
                    pos = start;
                    state = State::Framing;
                }
                Scan::NeedMore => {
                    w.pull(&mut stats.busy, &mut since);
                }
                Scan::NotFound { broken_chain } => {
                    if let Some(offset) = broken_chain {
                        broken.get_or_insert(w.base + offset as u64);
                    }
                    if w.buf.len() < limit && !w.eof {
                        pos = pos.max(w.buf.len());
                        w.pull(&mut stats.busy, &mut since);
                        continue;
                    }
                    if let (Some(offset), false) = (broken, resync) {
                        return Err(PipelineError::Codec(CodecError::CorruptStream(offset as usize)));
                    }
                    break;
                }
            },
            State::Framing => match check_frame(&w.buf, pos) {
                Frame::Valid(len) if pos + len <= w.buf.len() => {
                    match decode_record(&w.buf, pos) {
                        Ok((ligand, _)) => {
                            stats.busy += since.elapsed();
                            let sent = tx.send(WorkItem { ligand, sequence_id: seq });
                            since = Instant::now();
                            if sent.is_err() {
                                break;
                            }
                            stats.queue_high_water = stats.queue_high_water.max(tx.len());
                            seq += 1;
                            stats.items += 1;
                        }
                        Err(e) => {
                            log::warn!("skipping record at offset {}: {e}", w.base + pos as u64);
                            stats.skipped += 1;
                        }
                    }
                    pos = w.compact(pos + len);
                }
                Frame::Valid(_) | Frame::Incomplete if !w.eof => {
                    w.pull(&mut stats.busy, &mut since);
                }
                Frame::Valid(_) | Frame::Incomplete => {
                    log::warn!("truncated record at offset {}", w.base + pos as u64);
                    stats.skipped += 1;
                    break;
                }
                Frame::Invalid => {
                    log::warn!("damaged record at offset {}, resynchronising", w.base + pos as u64);
                    stats.skipped += 1;
                    pos += 1;
                    broken = None;
                    state = State::Seeking { resync: true };
                }
            },
        }
    }
    stats.busy += since.elapsed();
    Ok(stats)
}
