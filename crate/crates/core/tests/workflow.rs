mod common;

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::Command;

use xscreen_core::dockengine::chem_score;
use xscreen_core::geometry::Conformation;
use xscreen_core::molmodel::codec::read_file;
use xscreen_core::molmodel::{smiles_features, Pocket};
use xscreen_core::pipeline::{read_rows, PipelineConfig, WorkerClass};
use xscreen_core::predictor::{synthetic_samples, train};
use xscreen_core::synth;
use xscreen_core::workflow::{
    cmd_dock, cmd_merge, cmd_prep, cmd_regen, cmd_top, cmd_train, rank_rows, read_jobs, read_manifest, DockOptions, JobStatus, Timing, WorkflowError,
};

const EXE: &str = env!("CARGO_BIN_EXE_xscreen");

fn xscreen(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(EXE).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn options(ranks: usize) -> DockOptions {
    DockOptions {
        ranks,
        pipeline: PipelineConfig {
            workers: vec![WorkerClass::fast(2)],
            scoring: common::quick_scoring(),
            ..PipelineConfig::default()
        },
        spawn: None,
    }
}

fn write_pocket(dir: &Path, id: &str, seed: u64) -> std::path::PathBuf {
    let path = dir.join(format!("{id}.pkt"));
    synth::pocket(id, seed).unwrap().write(&path).unwrap();
    path
}

#[test]
fn prep_conserves_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut lines = synth::library_text(&synth::library(100, 3, 1, 3));
    lines.push_str("C1CC bad-ring\nC(C bad-branch\nCX unknown\n");
    let input = dir.path().join("lib.smi");
    fs::write(&input, lines).unwrap();
    let report = cmd_prep(&input, &dir.path().join("prep"), 4000, None).unwrap();
    assert_eq!(report.prepared, 100);
    assert_eq!(report.skipped, 3);
    let manifest = read_manifest(&report.manifest_path).unwrap();
    assert_eq!(manifest.total_records(), 100);
    assert!(manifest.entries.len() > 1);
    for e in &manifest.entries {
        let records = read_file(&e.path).unwrap();
        assert_eq!(records.len() as u64, e.records);
        assert!(fs::metadata(&e.path).unwrap().len() <= 4000);
        assert_eq!(e.bucket, None);
    }

    let empty = dir.path().join("empty.smi");
    fs::write(&empty, "").unwrap();
    let report = cmd_prep(&empty, &dir.path().join("prep-empty"), 4000, None).unwrap();
    assert!(report.manifest.entries.is_empty());
    assert_eq!(fs::read_to_string(report.manifest_path).unwrap(), "");
}

#[test]
fn bucketed_files_share_one_bucket() {
    let dir = tempfile::tempdir().unwrap();
    let smiles = synth::library(120, 8, 1, 5);
    let input = dir.path().join("lib.smi");
    fs::write(&input, synth::library_text(&smiles)).unwrap();
    // a tree whose buckets follow heavy atom count
    let samples: Vec<_> = synthetic_samples(3000, 1)
        .into_iter()
        .map(|mut s| {
            s.time_ms = 2.0 * s.features.0[0];
            s
        })
        .collect();
    let tree = train(&samples, 16, 5).unwrap();
    let report = cmd_prep(&input, &dir.path().join("prep"), 1 << 20, Some(&tree)).unwrap();
    assert!(report.manifest.entries.len() > 2);
    for e in &report.manifest.entries {
        let bucket = e.bucket.unwrap();
        let mut predicted = Vec::new();
        for l in read_file(&e.path).unwrap() {
            let l = l.unwrap();
            let p = tree.predict(&smiles_features(&l.name).unwrap());
            assert_eq!(xscreen_core::predictor::bucketize(p), bucket);
            predicted.push(p);
        }
        let spread = predicted.iter().cloned().fold(f64::MIN, f64::max) - predicted.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread <= 10.0);
    }
}

#[test]
fn synthetic_training_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("samples.smi");
    fs::write(&input, synth::library_text(&synth::library(200, 4, 1, 5))).unwrap();
    let (a, b) = (dir.path().join("a.tree"), dir.path().join("b.tree"));
    let cfg = common::quick_scoring();
    let ra = cmd_train(None, &input, &a, Timing::Synthetic { seed: 3 }, &cfg, 16, 5).unwrap();
    cmd_train(None, &input, &b, Timing::Synthetic { seed: 3 }, &cfg, 16, 5).unwrap();
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ra.samples, 200);
    assert!(ra.holdout.r_squared > 0.8, "{:?}", ra.holdout);

    let few = dir.path().join("few.smi");
    fs::write(&few, "CCO\nCCN\nCCC\nCCCl\n").unwrap();
    let err = cmd_train(None, &few, &a, Timing::Synthetic { seed: 3 }, &cfg, 16, 5).unwrap_err();
    assert!(matches!(err, WorkflowError::Input(_)), "{err}");

    let pocket = synth::pocket("p", 2).unwrap();
    let measured = cmd_train(Some(&pocket), &input, &a, Timing::Measured, &cfg, 16, 5);
    let measured = measured.unwrap();
    assert_eq!(measured.samples, 200);
}

#[test]
fn ranks_merge_and_regen_agree() {
    let dir = tempfile::tempdir().unwrap();
    let smiles = synth::library(24, 12, 1, 3);
    let input = dir.path().join("lib.smi");
    fs::write(&input, synth::library_text(&smiles)).unwrap();
    let prep = cmd_prep(&input, &dir.path().join("prep"), 1 << 20, None).unwrap();
    let pocket_path = write_pocket(dir.path(), "site", 5);
    let binary = &prep.manifest.entries[0].path;

    let one = cmd_dock(std::slice::from_ref(binary), &pocket_path, &dir.path().join("r1"), &options(1)).unwrap();
    let four = cmd_dock(std::slice::from_ref(binary), &pocket_path, &dir.path().join("r4"), &options(4)).unwrap();
    assert_eq!((one.jobs.len(), four.jobs.len()), (1, 4));
    let (rank1, n1) = cmd_merge(&one.dir).unwrap();
    let (rank4, n4) = cmd_merge(&four.dir).unwrap();
    assert_eq!((n1, n4), (24, 24));
    assert_eq!(fs::read(&rank1).unwrap(), fs::read(&rank4).unwrap());

    let rows = read_rows(&rank1).unwrap();
    for w in rows.windows(2) {
        assert!(w[0].score > w[1].score || (w[0].score == w[1].score && w[0].smiles <= w[1].smiles));
    }
    assert_eq!(cmd_top(&rank1, 3).unwrap(), rows[..3].to_vec());
    assert_eq!(cmd_top(&rank1, 1000).unwrap(), rows);

    // rerunning reuses every finished job
    let again = cmd_dock(std::slice::from_ref(binary), &pocket_path, &dir.path().join("r4"), &options(4)).unwrap();
    assert_eq!((again.ran, again.reused), (0, 4));

    let pocket = Pocket::read(&pocket_path).unwrap();
    let row = &rows[0];
    let regen = cmd_regen(&row.smiles, &pocket, &common::quick_scoring()).unwrap();
    assert_eq!(format!("{:.4}", regen.result.best_score), format!("{:.4}", row.score));
    assert_eq!(chem_score(&pocket, &regen.posed, &Conformation::of(&regen.posed)), regen.result.best_score);
    assert_eq!(regen.mol2, cmd_regen(&row.smiles, &pocket, &common::quick_scoring()).unwrap().mol2);
}

#[test]
fn merge_reports_missing_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let ligands = common::ligands(10, 2, 1, 2);
    let binary = dir.path().join("lib.xslb");
    common::write_file(&binary, &ligands);
    let pocket_path = write_pocket(dir.path(), "site", 1);
    let report = cmd_dock(std::slice::from_ref(&binary), &pocket_path, dir.path(), &options(3)).unwrap();
    fs::remove_file(&report.jobs[1].plan.output_path).unwrap();
    let err = cmd_merge(&report.dir).unwrap_err();
    assert!(err.to_string().contains("job 1"), "{err}");
    let again = cmd_dock(&[binary], &pocket_path, dir.path(), &options(3)).unwrap();
    assert_eq!((again.ran, again.reused), (1, 2));
    assert!(read_jobs(&report.dir).unwrap().iter().all(|j| j.status == JobStatus::Done));
    assert_eq!(cmd_merge(&report.dir).unwrap().1, 10);
}

#[test]
fn ties_rank_by_smiles() {
    use xscreen_core::pipeline::OutputRow;
    let row = |s: &str, score| OutputRow { smiles: s.into(), score };
    let mut rows = vec![row("CCN", 1.0), row("CCC", 2.0), row("CCB", 1.0), row("CCA", 1.0)];
    rank_rows(&mut rows);
    let order: Vec<&str> = rows.iter().map(|r| r.smiles.as_str()).collect();
    assert_eq!(order, ["CCC", "CCA", "CCB", "CCN"]);
}

#[test]
fn cli_round_trip_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = |p: &str| dir.path().join(p).to_string_lossy().into_owned();
    let (code, out, _) = xscreen(&["synth", "--out", &d("s"), "--ligands", "12", "--pockets", "1", "--seed", "4"]);
    assert_eq!(code, 0, "{out}");
    let conf = d("campaign.conf");
    fs::write(&conf, format!("restarts=8\nrescored=4\nfast-workers=2\nranks=2\npocket={}\n", d("s/site0.pkt"))).unwrap();
    let (code, out, err) = xscreen(&["prep", "--input", &d("s/library.smi"), "--out", &d("prep")]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("prepared=12"));
    let (code, out, err) = xscreen(&["--config", &conf, "dock", "--input", &d("prep/manifest.txt"), "--out", &d("run"), "--spawn-processes"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("jobs=2"), "{out}");
    let (code, _, err) = xscreen(&["merge", "--input", &d("run/site0")]);
    assert_eq!(code, 0, "{err}");
    let (code, top, _) = xscreen(&["top", "--input", &d("run/site0/ranking.tsv"), "-k", "2"]);
    assert_eq!(code, 0);
    assert_eq!(top.lines().count(), 2);
    let (code, stats, _) = xscreen(&["stats", "--input", &d("run/site0")]);
    assert_eq!(code, 0);
    assert!(stats.contains("ligands=12"), "{stats}");

    let best = top.lines().next().unwrap().split('\t').next().unwrap().to_string();
    let (code, line, err) = xscreen(&["--config", &conf, "regen", "--smiles", &best, "--out", &d("best.mol2")]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(line.trim_end(), top.lines().next().unwrap());
    assert!(fs::read_to_string(d("best.mol2")).unwrap().starts_with("@<TRIPOS>MOLECULE"));

    assert_eq!(xscreen(&["dock"]).0, 1);
    assert_eq!(xscreen(&["frobnicate"]).0, 1);
    assert_eq!(xscreen(&["prep", "--input", &d("missing.smi"), "--out", &d("x")]).0, 2);
    assert_eq!(xscreen(&["merge", "--input", &d("nowhere")]).0, 2);
    fs::write(d("bad.pkt"), "not a pocket").unwrap();
    assert_eq!(xscreen(&["dock", "--input", &d("prep/manifest.txt"), "--pocket", &d("bad.pkt"), "--out", &d("r")]).0, 2);
    assert_eq!(xscreen(&["--help"]).0, 0);

    let rows: BTreeSet<_> = fs::read_to_string(d("run/site0/ranking.tsv")).unwrap().lines().map(str::to_string).collect();
    assert_eq!(rows.len(), 12);
}
