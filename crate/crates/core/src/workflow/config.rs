use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use super::WorkflowError;

pub type ConfigMap = BTreeMap<String, String>;

/// Flat `key=value` file. Blank lines and `#` comments are ignored; keys
/// may be written with or without leading dashes.
pub fn read_config(path: &Path) -> Result<ConfigMap, WorkflowError> {
    let text = fs::read_to_string(path).map_err(|e| WorkflowError::input_io(path, e))?;
    let mut map = ConfigMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| WorkflowError::Input(format!("{}:{}: expected key=value", path.display(), i + 1)))?;
        map.insert(key.trim().trim_start_matches('-').to_string(), value.trim().to_string());
    }
    Ok(map)
}

use crate::pipeline::{PipelineConfig, WorkerClass, WorkerKind};

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, WorkflowError> {
    value
        .parse()
        .map_err(|_| WorkflowError::Input(format!("bad value for {key}: {value:?}")))
}

/// Applies the pipeline and scoring keys of `map` to `config`; other keys
/// are left for the caller.
pub fn apply_config(map: &ConfigMap, config: &mut PipelineConfig) -> Result<(), WorkflowError> {
    let (mut fast, mut slow, mut slowdown) = worker_counts(config);
    for (key, value) in map {
        let s = &mut config.scoring;
        match key.as_str() {
            "chunk" => config.chunk_size = parse(key, value)?,
            "chunk-queue" => config.chunk_queue = parse(key, value)?,
            "queue" => config.item_queue = parse(key, value)?,
            "row-queue" => config.row_queue = parse(key, value)?,
            "buffer" => config.writer_buffer = parse(key, value)?,
            "fast-workers" => fast = parse(key, value)?,
            "slow-workers" => slow = parse(key, value)?,
            "slowdown" => slowdown = parse(key, value)?,
            "restarts" => s.restarts = parse(key, value)?,
            "rescored" => s.rescored = parse(key, value)?,
            "rmsd-threshold" => s.rmsd_threshold = parse(key, value)?,
            "translation-step" => s.translation_step = parse(key, value)?,
            "rotation-step" => s.rotation_step_deg = parse(key, value)?,
            "torsion-step" => s.torsion_step_deg = parse(key, value)?,
            "min-translation-step" => s.min_translation_step = parse(key, value)?,
            "max-iterations" => s.max_iterations = parse(key, value)?,
            _ => continue,
        }
    }
    config.workers = vec![WorkerClass::fast(fast), WorkerClass::slow(slow, slowdown)];
    Ok(())
}

/// `(fast count, slow count, slow multiplier)` of a worker list.
pub fn worker_counts(config: &PipelineConfig) -> (usize, usize, f64) {
    let count = |kind| config.workers.iter().filter(|w| w.kind == kind).map(|w| w.count).sum();
    let slowdown = config
        .workers
        .iter()
        .find(|w| w.kind == WorkerKind::Slow)
        .map_or(1.0, |w| w.slowdown);
    (count(WorkerKind::Fast), count(WorkerKind::Slow), slowdown)
}

/// Every key understood by [`apply_config`], with the values of `config`.
pub fn config_map(config: &PipelineConfig) -> ConfigMap {
    let (fast, slow, slowdown) = worker_counts(config);
    let s = &config.scoring;
    [
        ("chunk", config.chunk_size.to_string()),
        ("chunk-queue", config.chunk_queue.to_string()),
        ("queue", config.item_queue.to_string()),
        ("row-queue", config.row_queue.to_string()),
        ("buffer", config.writer_buffer.to_string()),
        ("fast-workers", fast.to_string()),
        ("slow-workers", slow.to_string()),
        ("slowdown", slowdown.to_string()),
        ("restarts", s.restarts.to_string()),
        ("rescored", s.rescored.to_string()),
        ("rmsd-threshold", s.rmsd_threshold.to_string()),
        ("translation-step", s.translation_step.to_string()),
        ("rotation-step", s.rotation_step_deg.to_string()),
        ("torsion-step", s.torsion_step_deg.to_string()),
        ("min-translation-step", s.min_translation_step.to_string()),
        ("max-iterations", s.max_iterations.to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

pub fn config_text(map: &ConfigMap) -> String {
    map.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip() {
        let mut config = PipelineConfig {
            workers: vec![WorkerClass::fast(2), WorkerClass::slow(3, 4.5)],
            chunk_size: 4096,
            ..PipelineConfig::default()
        };
        config.scoring.restarts = 17;
        let mut back = PipelineConfig::default();
        apply_config(&config_map(&config), &mut back).unwrap();
        assert_eq!(config_map(&back), config_map(&config));
        assert_eq!(worker_counts(&back), (2, 3, 4.5));
        let bad: ConfigMap = [("restarts".to_string(), "many".to_string())].into();
        assert!(apply_config(&bad, &mut back).is_err());
    }
}
