use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::writer::parse_row;
use super::{OutputRow, PipelineError};

/// Concatenates rank outputs in the given order into `dest`, returning the
/// number of rows. Every input must exist.
pub fn merge_outputs<P: AsRef<Path>>(paths: &[P], dest: &Path) -> Result<u64, PipelineError> {
    for p in paths {
        let p = p.as_ref();
        if !p.is_file() {
            return Err(PipelineError::io(p, io::Error::new(io::ErrorKind::NotFound, "rank output is missing")));
        }
    }
    let out = File::create(dest).map_err(|e| PipelineError::io(dest, e))?;
    let mut out = BufWriter::new(out);
    let mut rows = 0;
    for p in paths {
        let p = p.as_ref();
        let mut input = BufReader::new(File::open(p).map_err(|e| PipelineError::io(p, e))?);
        let mut line = Vec::new();
        loop {
            line.clear();
            let n = input.read_until(b'\n', &mut line).map_err(|e| PipelineError::io(p, e))?;
            if n == 0 {
                break;
            }
            if line.last() != Some(&b'\n') {
                line.push(b'\n');
            }
            out.write_all(&line).map_err(|e| PipelineError::io(dest, e))?;
            rows += 1;
        }
    }
    out.flush().map_err(|e| PipelineError::io(dest, e))?;
    Ok(rows)
}

/// Parses an output file back into rows.
pub fn read_rows(path: &Path) -> Result<Vec<OutputRow>, PipelineError> {
    let file = File::open(path).map_err(|e| PipelineError::io(path, e))?;
    let mut rows = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| PipelineError::io(path, e))?;
        rows.push(parse_row(&line, i + 1)?);
    }
    Ok(rows)
}
