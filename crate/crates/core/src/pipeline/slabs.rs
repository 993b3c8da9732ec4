use std::path::{Path, PathBuf};

use super::PipelineError;

/// Byte range `[start, stop)` of the input owned by one rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slab {
    pub start: u64,
    pub stop: u64,
}

impl Slab {
    pub fn len(&self) -> u64 {
        self.stop - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.stop
    }

    pub fn contains(&self, offset: u64) -> bool {
        (self.start..self.stop).contains(&offset)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankPlan {
    pub rank: usize,
    pub n_ranks: usize,
    pub slab: Slab,
    pub input_path: PathBuf,
    pub output_path: PathBuf,
}

/// Even split: rank `i` gets `[⌊i·S/R⌋, ⌊(i+1)·S/R⌋)`.
pub fn plan_slabs(file_size: u64, n_ranks: usize) -> Result<Vec<Slab>, PipelineError> {
    if n_ranks == 0 {
        return Err(PipelineError::NoRanks);
    }
    let cut = |i: usize| (i as u128 * file_size as u128 / n_ranks as u128) as u64;
    Ok((0..n_ranks).map(|i| Slab { start: cut(i), stop: cut(i + 1) }).collect())
}

/// Output file of `rank` inside `dir`.
pub fn rank_output(dir: &Path, rank: usize) -> PathBuf {
    dir.join(format!("rank-{rank:04}.tsv"))
}

/// One plan per rank over `input`, writing into `out_dir`.
pub fn plan_ranks(input: &Path, out_dir: &Path, n_ranks: usize) -> Result<Vec<RankPlan>, PipelineError> {
    let size = std::fs::metadata(input)
        .map_err(|e| PipelineError::io(input, e))?
        .len();
    Ok(plan_slabs(size, n_ranks)?
        .into_iter()
        .enumerate()
        .map(|(rank, slab)| RankPlan {
            rank,
            n_ranks,
            slab,
            input_path: input.to_path_buf(),
            output_path: rank_output(out_dir, rank),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bounds(s: u64, r: usize) -> Vec<(u64, u64)> {
        plan_slabs(s, r).unwrap().iter().map(|s| (s.start, s.stop)).collect()
    }

    #[test]
    fn examples() {
        assert_eq!(bounds(100, 4), vec![(0, 25), (25, 50), (50, 75), (75, 100)]);
        assert_eq!(bounds(10, 3), vec![(0, 3), (3, 6), (6, 10)]);
        assert!(matches!(plan_slabs(10, 0), Err(PipelineError::NoRanks)));
        assert_eq!(bounds(u64::MAX, 2)[1].1, u64::MAX);
    }
}
