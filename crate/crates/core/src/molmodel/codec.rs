//! Compact binary ligand records (`.xslb` files).
//!
//! ```text
//! file    := "XSLB" version:u8=1 reserved:[u8;3]=0 record*
//! record  := 0xD0 0xC5 record_len:u32 body          (record_len = body length)
//! body    := name_len:u16 name n_atoms:u16 n_bonds:u16 n_torsions:u16
//!            (x:f32 y:f32 z:f32 element:u8 flags:u8){n_atoms}
//!            (a:u16 b:u16 order:u8){n_bonds}
//!            (bond_index:u16){n_torsions}
//! ```
//!
//! All integers and floats are little-endian, nothing is padded. The sync
//! marker plus the self-consistent length lets a reader dropped at an
//! arbitrary byte offset find the next record boundary.

use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use super::{graph, Atom, Bond, BondOrder, Element, Ligand, TorsionalBond, Vec3};

pub const MAGIC: &[u8; 4] = b"XSLB";
pub const VERSION: u8 = 1;
pub const FILE_HEADER_LEN: usize = 8;
pub const SYNC: [u8; 2] = [0xD0, 0xC5];
/// Sync marker plus the length field.
pub const FRAME_LEN: usize = 6;

const ATOM_BYTES: usize = 14;
const BOND_BYTES: usize = 5;
const TORSION_BYTES: usize = 2;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("no sync marker at offset {0}")]
    BadSync(usize),
    #[error("record at offset {0} is truncated")]
    Truncated(usize),
    #[error("record at offset {offset} declares {declared} bytes but its contents need {actual}")]
    LengthMismatch {
        offset: usize,
        declared: usize,
        actual: usize,
    },
    #[error("not an xslb file (bad magic)")]
    BadMagic,
    #[error("unknown xslb version {0}")]
    UnknownVersion(u8),
    #[error("invalid record at offset {offset}: {reason}")]
    InvalidRecord { offset: usize, reason: String },
    #[error("corrupt record stream: no valid record chain after offset {0}")]
    CorruptStream(usize),
    #[error("ligand too large for the record format: {0}")]
    TooLarge(&'static str),
}

fn invalid(offset: usize, reason: impl Into<String>) -> CodecError {
    CodecError::InvalidRecord {
        offset,
        reason: reason.into(),
    }
}

pub fn file_header() -> [u8; FILE_HEADER_LEN] {
    [MAGIC[0], MAGIC[1], MAGIC[2], MAGIC[3], VERSION, 0, 0, 0]
}

pub fn check_file_header(bytes: &[u8]) -> Result<(), CodecError> {
    if bytes.len() < FILE_HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(CodecError::BadMagic);
    }
    if bytes[4] != VERSION {
        return Err(CodecError::UnknownVersion(bytes[4]));
    }
    Ok(())
}

pub fn encode_record(ligand: &Ligand) -> Result<Vec<u8>, CodecError> {
    let name = ligand.name.as_bytes();
    let small = |n: usize, what| u16::try_from(n).map_err(|_| CodecError::TooLarge(what));
    let name_len = small(name.len(), "name")?;
    let n_atoms = small(ligand.atoms.len(), "atoms")?;
    let n_bonds = small(ligand.bonds.len(), "bonds")?;
    let n_torsions = small(ligand.torsions.len(), "torsions")?;
    let body_len = body_len(name.len(), ligand.atoms.len(), ligand.bonds.len(), ligand.torsions.len());

    let mut out = Vec::with_capacity(FRAME_LEN + body_len);
    out.extend_from_slice(&SYNC);
    out.extend_from_slice(&(body_len as u32).to_le_bytes());
    out.extend_from_slice(&name_len.to_le_bytes());
    out.extend_from_slice(name);
    out.extend_from_slice(&n_atoms.to_le_bytes());
    out.extend_from_slice(&n_bonds.to_le_bytes());
    out.extend_from_slice(&n_torsions.to_le_bytes());
    for atom in &ligand.atoms {
        for c in atom.position.iter() {
            out.extend_from_slice(&(*c as f32).to_le_bytes());
        }
        out.push(atom.element.code());
        out.push(atom.is_heavy as u8);
    }
    for bond in &ligand.bonds {
        out.extend_from_slice(&(bond.a as u16).to_le_bytes());
        out.extend_from_slice(&(bond.b as u16).to_le_bytes());
        out.push(bond.order.code());
    }
    for torsion in &ligand.torsions {
        out.extend_from_slice(&(torsion.bond_index as u16).to_le_bytes());
    }
    debug_assert_eq!(out.len(), FRAME_LEN + body_len);
    Ok(out)
}

fn body_len(name: usize, atoms: usize, bonds: usize, torsions: usize) -> usize {
    2 + name + 6 + ATOM_BYTES * atoms + BOND_BYTES * bonds + TORSION_BYTES * torsions
}

fn u16_at(bytes: &[u8], at: usize) -> usize {
    u16::from_le_bytes([bytes[at], bytes[at + 1]]) as usize
}

fn f32_at(bytes: &[u8], at: usize) -> f64 {
    f32::from_le_bytes([bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]]) as f64
}

/// Outcome of checking the frame of a candidate record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// Marker present and the declared length matches the counts; the value
    /// is the full record length including the 6 frame bytes.
    Valid(usize),
    /// More bytes are needed to decide.
    Incomplete,
    Invalid,
}

/// Checks the sync marker and that `record_len` agrees with the counts in
/// the body header, without decoding atoms.
pub fn check_frame(bytes: &[u8], offset: usize) -> Frame {
    let rest = &bytes[offset.min(bytes.len())..];
    if rest.len() < 2 {
        return if rest.is_empty() || rest[0] == SYNC[0] {
            Frame::Incomplete
        } else {
            Frame::Invalid
        };
    }
    if rest[..2] != SYNC {
        return Frame::Invalid;
    }
    if rest.len() < FRAME_LEN + 2 {
        return Frame::Incomplete;
    }
    let declared = u32::from_le_bytes([rest[2], rest[3], rest[4], rest[5]]) as usize;
    let name_len = u16_at(rest, 6);
    let counts_at = FRAME_LEN + 2 + name_len;
    if declared < 8 + name_len {
        return Frame::Invalid;
    }
    if rest.len() < counts_at + 6 {
        return Frame::Incomplete;
    }
    let expected = body_len(
        name_len,
        u16_at(rest, counts_at),
        u16_at(rest, counts_at + 2),
        u16_at(rest, counts_at + 4),
    );
    if expected != declared {
        return Frame::Invalid;
    }
    Frame::Valid(FRAME_LEN + declared)
}

pub fn decode_record(bytes: &[u8], offset: usize) -> Result<(Ligand, usize), CodecError> {
    if bytes.len() < offset + 2 {
        return Err(CodecError::Truncated(offset));
    }
    if bytes[offset..offset + 2] != SYNC {
        return Err(CodecError::BadSync(offset));
    }
    if bytes.len() < offset + FRAME_LEN {
        return Err(CodecError::Truncated(offset));
    }
    let declared = u32::from_le_bytes(bytes[offset + 2..offset + 6].try_into().unwrap()) as usize;
    let end = offset + FRAME_LEN + declared;
    if bytes.len() < end {
        return Err(CodecError::Truncated(offset));
    }
    let body = &bytes[offset + FRAME_LEN..end];
    let mismatch = |actual| CodecError::LengthMismatch {
        offset,
        declared,
        actual,
    };
    if body.len() < 2 {
        return Err(mismatch(8));
    }
    let name_len = u16_at(body, 0);
    if body.len() < 2 + name_len + 6 {
        return Err(mismatch(8 + name_len));
    }
    let name = std::str::from_utf8(&body[2..2 + name_len])
        .ok()
        .filter(|s| s.is_ascii())
        .ok_or_else(|| invalid(offset, "name is not ASCII"))?
        .to_owned();
    let mut at = 2 + name_len;
    let (n_atoms, n_bonds, n_torsions) = (u16_at(body, at), u16_at(body, at + 2), u16_at(body, at + 4));
    at += 6;
    let actual = body_len(name_len, n_atoms, n_bonds, n_torsions);
    if actual != declared {
        return Err(mismatch(actual));
    }

    let mut atoms = Vec::with_capacity(n_atoms);
    for i in 0..n_atoms {
        let position = Vec3::new(f32_at(body, at), f32_at(body, at + 4), f32_at(body, at + 8));
        let element = Element::from_code(body[at + 12])
            .ok_or_else(|| invalid(offset, format!("atom {i} has unknown element code {}", body[at + 12])))?;
        let flags = body[at + 13];
        if flags & !1 != 0 {
            return Err(invalid(offset, format!("atom {i} has reserved flag bits set")));
        }
        atoms.push(Atom {
            element,
            position,
            is_heavy: flags & 1 == 1,
        });
        at += ATOM_BYTES;
    }
    let mut bonds = Vec::with_capacity(n_bonds);
    for i in 0..n_bonds {
        let order = BondOrder::from_code(body[at + 4])
            .ok_or_else(|| invalid(offset, format!("bond {i} has unknown order code {}", body[at + 4])))?;
        bonds.push(Bond::new(u16_at(body, at), u16_at(body, at + 2), order));
        at += BOND_BYTES;
    }
    let mut ligand = Ligand::new(name, atoms, bonds);
    ligand.validate().map_err(|e| invalid(offset, e.to_string()))?;
    for _ in 0..n_torsions {
        let bond_index = u16_at(body, at);
        at += TORSION_BYTES;
        let (left_set, right_set) = graph::bridge_partition(&ligand, bond_index)
            .ok_or_else(|| invalid(offset, format!("torsion bond {bond_index} is not a bridge")))?;
        ligand.torsions.push(TorsionalBond {
            bond_index,
            left_set,
            right_set,
        });
    }
    Ok((ligand, end))
}

/// Result of [`find_record_start`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordStart {
    At(usize),
    EndOfData,
}

/// Incremental form of the record-start search, for callers that hold only
/// a window of the stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scan {
    /// First validated record start in `[from, limit)`.
    Found(usize),
    /// A candidate before `limit` cannot be decided without more bytes.
    NeedMore,
    /// No record starts in `[from, limit)`. `broken_chain` is the first
    /// candidate whose own frame was valid but whose successor was not.
    NotFound { broken_chain: Option<usize> },
}

/// Scans `bytes[from..]` for the first offset below `limit` that carries a
/// valid frame followed either by the end of data (`at_eof`) or by another
/// valid frame.
pub fn scan_record_start(bytes: &[u8], from: usize, limit: usize, at_eof: bool) -> Scan {
    let mut broken_chain = None;
    let mut pos = from;
    let limit = limit.min(bytes.len());
    while pos < limit {
        let Some(hit) = bytes[pos..].iter().position(|&b| b == SYNC[0]) else {
            break;
        };
        let candidate = pos + hit;
        if candidate >= limit {
            break;
        }
        pos = candidate + 1;
        match check_frame(bytes, candidate) {
            Frame::Invalid => continue,
            Frame::Incomplete if at_eof => continue,
            Frame::Incomplete => return Scan::NeedMore,
            Frame::Valid(len) => {
                let next = candidate + len;
                if next > bytes.len() {
                    if at_eof {
                        continue;
                    }
                    return Scan::NeedMore;
                }
                if next == bytes.len() {
                    if at_eof {
                        return Scan::Found(candidate);
                    }
                    return Scan::NeedMore;
                }
                match check_frame(bytes, next) {
                    Frame::Valid(_) => return Scan::Found(candidate),
                    Frame::Incomplete if !at_eof => return Scan::NeedMore,
                    _ => {
                        broken_chain.get_or_insert(candidate);
                    }
                }
            }
        }
    }
    Scan::NotFound { broken_chain }
}

/// Smallest validated record start at or after `slab_start` in a record
/// stream (file header excluded).
pub fn find_record_start(bytes: &[u8], slab_start: usize) -> Result<RecordStart, CodecError> {
    match scan_record_start(bytes, slab_start, bytes.len(), true) {
        Scan::Found(offset) => Ok(RecordStart::At(offset)),
        Scan::NotFound { broken_chain: None } => Ok(RecordStart::EndOfData),
        Scan::NotFound {
            broken_chain: Some(offset),
        } => Err(CodecError::CorruptStream(offset)),
        Scan::NeedMore => unreachable!("scan at end of data never needs more"),
    }
}

/// Iterates over the records of a stream, yielding each decode result and
/// resynchronising after framing damage.
pub fn decode_stream(bytes: &[u8]) -> Vec<Result<Ligand, CodecError>> {
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        match check_frame(bytes, pos) {
            Frame::Valid(len) if pos + len <= bytes.len() => {
                out.push(decode_record(bytes, pos).map(|(l, _)| l));
                pos += len;
            }
            _ => {
                out.push(Err(CodecError::BadSync(pos)));
                match scan_record_start(bytes, pos + 1, bytes.len(), true) {
                    Scan::Found(next) => pos = next,
                    _ => break,
                }
            }
        }
    }
    out
}

/// Writes a complete `.xslb` file.
pub fn write_file<'a>(path: &Path, ligands: impl IntoIterator<Item = &'a Ligand>) -> io::Result<usize> {
    let mut out = io::BufWriter::new(std::fs::File::create(path)?);
    out.write_all(&file_header())?;
    let mut written = FILE_HEADER_LEN;
    for ligand in ligands {
        let record = encode_record(ligand).map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
        out.write_all(&record)?;
        written += record.len();
    }
    out.flush()?;
    Ok(written)
}

/// Reads and decodes every record of an `.xslb` file.
pub fn read_file(path: &Path) -> Result<Vec<Result<Ligand, CodecError>>, io::Error> {
    let bytes = std::fs::read(path)?;
    check_file_header(&bytes).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    Ok(decode_stream(&bytes[FILE_HEADER_LEN..]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molmodel::{detect_torsions, parse_smiles};

    fn sample(smiles: &str) -> Ligand {
        let mut l = detect_torsions(parse_smiles(smiles).unwrap());
        for (i, a) in l.atoms.iter_mut().enumerate() {
            a.position = Vec3::new(i as f64 * 1.25, -0.5 * i as f64, 0.375);
        }
        l
    }

    #[test]
    fn layout_is_bit_exact() {
        let l = sample("CO");
        let bytes = encode_record(&l).unwrap();
        let body = 2 + 2 + 6 + 2 * 14 + 5;
        assert_eq!(bytes.len(), 6 + body);
        assert_eq!(&bytes[..2], &[0xD0, 0xC5]);
        assert_eq!(&bytes[2..6], &(body as u32).to_le_bytes());
        assert_eq!(&bytes[6..8], &[2, 0]);
        assert_eq!(&bytes[8..10], b"CO");
        assert_eq!(&bytes[10..16], &[2, 0, 1, 0, 0, 0]);
        // second atom: x=1.25, y=-0.5, z=0.375, O, heavy
        assert_eq!(&bytes[30..34], &1.25f32.to_le_bytes());
        assert_eq!(&bytes[34..38], &(-0.5f32).to_le_bytes());
        assert_eq!(&bytes[42..44], &[8, 1]);
        assert_eq!(&bytes[44..49], &[0, 0, 1, 0, 1]);
    }

    #[test]
    fn round_trip_with_torsions() {
        let l = sample("CCCCC(=O)N");
        assert!(!l.torsions.is_empty());
        let bytes = encode_record(&l).unwrap();
        let (back, next) = decode_record(&bytes, 0).unwrap();
        assert_eq!(back, l);
        assert_eq!(next, bytes.len());
    }

    #[test]
    fn decode_errors() {
        let bytes = encode_record(&sample("CCO")).unwrap();
        assert_eq!(decode_record(&bytes, 1).unwrap_err(), CodecError::BadSync(1));
        assert_eq!(decode_record(&bytes[..bytes.len() - 1], 0).unwrap_err(), CodecError::Truncated(0));
        let mut wrong_len = bytes.clone();
        wrong_len[2] -= 2;
        assert!(matches!(decode_record(&wrong_len, 0), Err(CodecError::LengthMismatch { .. })));
        let mut header = file_header().to_vec();
        header[4] = 9;
        assert_eq!(check_file_header(&header), Err(CodecError::UnknownVersion(9)));
        assert_eq!(check_file_header(b"MOL2...."), Err(CodecError::BadMagic));
    }

    #[test]
    fn record_start_examples() {
        let records: Vec<Vec<u8>> = ["CCO", "c1ccccc1CC", "CC(C)C(=O)O"]
            .iter()
            .map(|s| encode_record(&sample(s)).unwrap())
            .collect();
        let stream = records.concat();
        let third = records[0].len() + records[1].len();
        assert_eq!(find_record_start(&stream, 0), Ok(RecordStart::At(0)));
        assert_eq!(find_record_start(&stream, records[0].len() + 3), Ok(RecordStart::At(third)));
        assert_eq!(find_record_start(&stream, third + 1), Ok(RecordStart::EndOfData));
    }

    #[test]
    fn broken_successor_is_corrupt_stream() {
        let a = encode_record(&sample("CCO")).unwrap();
        let mut b = encode_record(&sample("CCN")).unwrap();
        b[0] = 0x00;
        let stream = [a.clone(), b].concat();
        assert_eq!(find_record_start(&stream, 0), Err(CodecError::CorruptStream(0)));
    }
}
