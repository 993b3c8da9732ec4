use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{library_smiles, prepare_record, WorkflowError};
use crate::molmodel::codec::{file_header, FILE_HEADER_LEN};
use crate::molmodel::smiles_features;
use crate::predictor::{Bucketizer, TimeTree};

pub const MANIFEST_FILE: &str = "manifest.txt";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub records: u64,
    pub bucket: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn to_text(&self) -> String {
        self.entries
            .iter()
            .map(|e| {
                let bucket = e.bucket.map_or("none".to_string(), |b| b.to_string());
                format!("{} records={} bucket={bucket}\n", e.path.display(), e.records)
            })
            .collect()
    }

    pub fn total_records(&self) -> u64 {
        self.entries.iter().map(|e| e.records).sum()
    }
}

/// Reads a manifest; relative paths are resolved against its directory.
pub fn read_manifest(path: &Path) -> Result<Manifest, WorkflowError> {
    let text = fs::read_to_string(path).map_err(|e| WorkflowError::input_io(path, e))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let bad = |line: usize| WorkflowError::Input(format!("{}:{line}: malformed manifest line", path.display()));
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let mut fields = line.rsplitn(3, ' ');
        let bucket = fields.next().and_then(|f| f.strip_prefix("bucket=")).ok_or_else(|| bad(i + 1))?;
        let records = fields
            .next()
            .and_then(|f| f.strip_prefix("records="))
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| bad(i + 1))?;
        let file = fields.next().ok_or_else(|| bad(i + 1))?;
        let bucket = match bucket {
            "none" => None,
            b => Some(b.parse().map_err(|_| bad(i + 1))?),
        };
        entries.push(ManifestEntry {
            path: dir.join(file),
            records,
            bucket,
        });
    }
    Ok(Manifest { entries })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrepReport {
    pub manifest: Manifest,
    pub manifest_path: PathBuf,
    pub prepared: u64,
    pub skipped: u64,
    pub clamped_predictions: u64,
}

/// Output files of one bucket, cut at the target size.
struct Sink {
    bucket: Option<u64>,
    part: usize,
    file: Option<(BufWriter<File>, usize)>,
}

/// Prepares every library line into binary record files of at most
/// `file_size` bytes. With a timing tree, records are routed to one file
/// series per predicted 10 ms bucket.
pub fn cmd_prep(input: &Path, out_dir: &Path, file_size: u64, tree: Option<&TimeTree>) -> Result<PrepReport, WorkflowError> {
    let text = fs::read_to_string(input).map_err(|e| WorkflowError::input_io(input, e))?;
    fs::create_dir_all(out_dir).map_err(|e| WorkflowError::runtime_io(out_dir, e))?;
    let mut report = PrepReport {
        manifest_path: out_dir.join(MANIFEST_FILE),
        ..PrepReport::default()
    };
    let mut bucketizer = Bucketizer::default();
    let mut sinks: BTreeMap<Option<u64>, Sink> = BTreeMap::new();
    let mut entries: Vec<ManifestEntry> = Vec::new();
    let mut entry_of: BTreeMap<(Option<u64>, usize), usize> = BTreeMap::new();
    for (line_no, smiles) in library_smiles(&text) {
        let (_, record) = match prepare_record(smiles) {
            Ok(r) => r,
            Err(e) => {
                log::warn!("{}:{line_no}: skipping {smiles}: {e}", input.display());
                report.skipped += 1;
                continue;
            }
        };
        let bucket = match tree {
            Some(tree) => {
                let features = smiles_features(smiles).map_err(|e| WorkflowError::Runtime(format!("{smiles}: {e}")))?;
                Some(bucketizer.assign(tree.predict(&features)))
            }
            None => None,
        };
        if (FILE_HEADER_LEN + record.len()) as u64 > file_size {
            return Err(WorkflowError::Input(format!(
                "target file size {file_size} cannot hold the {}-byte record of {smiles}",
                record.len()
            )));
        }
        let sink = sinks.entry(bucket).or_insert(Sink { bucket, part: 0, file: None });
        if let Some((_, used)) = &sink.file {
            if (*used + record.len()) as u64 > file_size {
                finish(sink, out_dir)?;
                sink.part += 1;
            }
        }
        if sink.file.is_none() {
            let name = file_name(sink.bucket, sink.part);
            let path = out_dir.join(&name);
            let mut w = BufWriter::new(File::create(&path).map_err(|e| WorkflowError::runtime_io(&path, e))?);
            w.write_all(&file_header()).map_err(|e| WorkflowError::runtime_io(&path, e))?;
            sink.file = Some((w, FILE_HEADER_LEN));
            entry_of.insert((bucket, sink.part), entries.len());
            entries.push(ManifestEntry {
                path: PathBuf::from(name),
                records: 0,
                bucket,
            });
        }
        let (w, used) = sink.file.as_mut().expect("open file");
        w.write_all(&record)
            .map_err(|e| WorkflowError::runtime_io(&out_dir.join(file_name(bucket, sink.part)), e))?;
        *used += record.len();
        entries[entry_of[&(bucket, sink.part)]].records += 1;
        report.prepared += 1;
    }
    for sink in sinks.values_mut() {
        finish(sink, out_dir)?;
    }
    entries.sort_by(|a, b| (a.bucket, &a.path).cmp(&(b.bucket, &b.path)));
    report.manifest = Manifest { entries };
    report.clamped_predictions = bucketizer.clamped;
    fs::write(&report.manifest_path, report.manifest.to_text()).map_err(|e| WorkflowError::runtime_io(&report.manifest_path, e))?;
    report.manifest.entries.iter_mut().for_each(|e| e.path = out_dir.join(&e.path));
    Ok(report)
}

fn file_name(bucket: Option<u64>, part: usize) -> String {
    match bucket {
        Some(b) => format!("ligands-b{b:04}-{part:04}.xslb"),
        None => format!("ligands-{part:04}.xslb"),
    }
}

fn finish(sink: &mut Sink, out_dir: &Path) -> Result<(), WorkflowError> {
    if let Some((mut w, _)) = sink.file.take() {
        w.flush()
            .map_err(|e| WorkflowError::runtime_io(&out_dir.join(file_name(sink.bucket, sink.part)), e))?;
    }
    Ok(())
}
