#![allow(dead_code)]

use std::path::Path;

use xscreen_core::dockengine::ScoringConfig;
use xscreen_core::molmodel::codec::{encode_record, file_header, FILE_HEADER_LEN};
use xscreen_core::molmodel::Ligand;
use xscreen_core::synth;
use xscreen_core::workflow::prepare_ligand;

/// Prepared ligands from a generated library; all must prepare.
pub fn ligands(n: usize, seed: u64, min_pieces: usize, max_pieces: usize) -> Vec<Ligand> {
    synth::library(n, seed, min_pieces, max_pieces)
        .iter()
        .map(|s| prepare_ligand(s).unwrap_or_else(|e| panic!("{s}: {e}")))
        .collect()
}

/// File bytes and the absolute offset of every record.
pub fn file_bytes(ligands: &[Ligand]) -> (Vec<u8>, Vec<u64>) {
    let mut bytes = file_header().to_vec();
    let mut offsets = Vec::new();
    for l in ligands {
        offsets.push(bytes.len() as u64);
        bytes.extend(encode_record(l).unwrap());
    }
    assert_eq!(offsets.first().copied().unwrap_or(FILE_HEADER_LEN as u64), FILE_HEADER_LEN as u64);
    (bytes, offsets)
}

pub fn write_file(path: &Path, ligands: &[Ligand]) -> Vec<u64> {
    let (bytes, offsets) = file_bytes(ligands);
    std::fs::write(path, bytes).unwrap();
    offsets
}

/// A cheaper search for tests that only need determinism or plumbing.
pub fn quick_scoring() -> ScoringConfig {
    ScoringConfig {
        restarts: 8,
        rescored: 4,
        ..ScoringConfig::default()
    }
}
