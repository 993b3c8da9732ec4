use std::fmt::Write as _;

use thiserror::Error;

use super::Sample;
use crate::molmodel::FeatureVector;

pub const DEFAULT_MAX_DEPTH: usize = 16;
pub const DEFAULT_MIN_LEAF: usize = 5;

#[derive(Debug, Error, PartialEq)]
pub enum PredictorError {
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("sample {0} has a negative or non-finite time")]
    BadSample(usize),
    #[error("min_leaf must be at least 1")]
    BadMinLeaf,
    #[error("tree file line {line}: {reason}")]
    Format { line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        mean: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeTree {
    /// Node 0 is the root; children always have larger ids than parents.
    pub nodes: Vec<Node>,
    pub max_depth: usize,
}

struct Best {
    feature: usize,
    threshold: f64,
    cost: f64,
}

/// Variance-reduction regression tree.
pub fn train(samples: &[Sample], max_depth: usize, min_leaf: usize) -> Result<TimeTree, PredictorError> {
    if min_leaf == 0 {
        return Err(PredictorError::BadMinLeaf);
    }
    if samples.len() < min_leaf.max(1) {
        return Err(PredictorError::TooFewSamples {
            needed: min_leaf.max(1),
            got: samples.len(),
        });
    }
    if let Some(i) = samples.iter().position(|s| !(s.time_ms >= 0.0 && s.time_ms.is_finite())) {
        return Err(PredictorError::BadSample(i));
    }
    let mut tree = TimeTree {
        nodes: Vec::new(),
        max_depth,
    };
    let all: Vec<usize> = (0..samples.len()).collect();
    grow(&mut tree, samples, all, 0, max_depth, min_leaf);
    Ok(tree)
}

fn mean_of(samples: &[Sample], idx: &[usize]) -> f64 {
    idx.iter().map(|&i| samples[i].time_ms).sum::<f64>() / idx.len() as f64
}

fn grow(tree: &mut TimeTree, samples: &[Sample], idx: Vec<usize>, depth: usize, max_depth: usize, min_leaf: usize) -> usize {
    let id = tree.nodes.len();
    let mean = mean_of(samples, &idx);
    tree.nodes.push(Node::Leaf { mean });
    let pure = idx.iter().all(|&i| samples[i].time_ms == samples[idx[0]].time_ms);
    if depth >= max_depth || pure || idx.len() < 2 * min_leaf {
        return id;
    }
    let Some(best) = best_split(samples, &idx, mean, min_leaf) else {
        return id;
    };
    let (left, right): (Vec<usize>, Vec<usize>) = idx
        .iter()
        .partition(|&&i| samples[i].features.0[best.feature] <= best.threshold);
    let left = grow(tree, samples, left, depth + 1, max_depth, min_leaf);
    let right = grow(tree, samples, right, depth + 1, max_depth, min_leaf);
    tree.nodes[id] = Node::Split {
        feature: best.feature,
        threshold: best.threshold,
        left,
        right,
    };
    id
}

/// Lowest summed child squared error over all midpoint thresholds; ties go
/// to the lower feature, then the lower threshold. Sums are taken around
/// the node mean to keep the prefix sums well conditioned.
fn best_split(samples: &[Sample], idx: &[usize], mean: f64, min_leaf: usize) -> Option<Best> {
    let n = idx.len();
    let parent: f64 = idx.iter().map(|&i| (samples[i].time_ms - mean).powi(2)).sum();
    let mut best: Option<Best> = None;
    let mut order = idx.to_vec();
    for feature in 0..FeatureVector::LEN {
        let x = |i: usize| samples[i].features.0[feature];
        order.sort_by(|&a, &b| x(a).total_cmp(&x(b)));
        let total: f64 = order.iter().map(|&i| samples[i].time_ms - mean).sum();
        let total_sq: f64 = order.iter().map(|&i| (samples[i].time_ms - mean).powi(2)).sum();
        let (mut s, mut sq) = (0.0, 0.0);
        for k in 1..n {
            let y = samples[order[k - 1]].time_ms - mean;
            s += y;
            sq += y * y;
            let (lo, hi) = (x(order[k - 1]), x(order[k]));
            if lo == hi || k < min_leaf || n - k < min_leaf {
                continue;
            }
            let (nl, nr) = (k as f64, (n - k) as f64);
            let cost = (sq - s * s / nl) + ((total_sq - sq) - (total - s).powi(2) / nr);
            if best.as_ref().is_none_or(|b| cost < b.cost) {
                best = Some(Best {
                    feature,
                    threshold: lo + (hi - lo) / 2.0,
                    cost,
                });
            }
        }
    }
    best.filter(|b| b.cost < parent * (1.0 - 1e-12))
}

impl TimeTree {
    pub fn predict(&self, features: &FeatureVector) -> f64 {
        self.nodes[self.leaf_of(features)].mean()
    }

    /// Id of the leaf reached by `features`.
    pub fn leaf_of(&self, features: &FeatureVector) -> usize {
        let mut id = 0;
        while let Node::Split {
            feature,
            threshold,
            left,
            right,
        } = self.nodes[id]
        {
            id = if features.0[feature] <= threshold { left } else { right };
        }
        id
    }

    /// Longest root-to-leaf path in edges.
    pub fn depth(&self) -> usize {
        let mut depth = vec![0; self.nodes.len()];
        let mut max = 0;
        for (id, node) in self.nodes.iter().enumerate() {
            max = max.max(depth[id]);
            if let Node::Split { left, right, .. } = *node {
                depth[left] = depth[id] + 1;
                depth[right] = depth[id] + 1;
            }
        }
        max
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("timetree v1 depth={}\n", self.max_depth);
        for (id, node) in self.nodes.iter().enumerate() {
            match *node {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => writeln!(out, "node {id} f{feature} <={threshold:?} left={left} right={right}"),
                Node::Leaf { mean } => writeln!(out, "leaf {id} mean={mean:?}"),
            }
            .expect("writing to a String");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<TimeTree, PredictorError> {
        let err = |line: usize, reason: &str| PredictorError::Format {
            line,
            reason: reason.to_string(),
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let (_, header) = lines.next().ok_or_else(|| err(1, "empty file"))?;
        let max_depth = header
            .strip_prefix("timetree v1 depth=")
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| err(1, "expected `timetree v1 depth=<d>`"))?;
        let mut nodes = Vec::new();
        for (no, line) in lines.filter(|(_, l)| !l.is_empty()) {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let id: usize = fields
                .get(1)
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| err(no, "missing node id"))?;
            if id != nodes.len() {
                return Err(err(no, "node ids must be consecutive from 0"));
            }
            let field = |i: usize, prefix: &str| fields.get(i).and_then(|f| f.strip_prefix(prefix)).ok_or_else(|| err(no, "malformed field"));
            let node = match fields[0] {
                "leaf" if fields.len() == 3 => Node::Leaf {
                    mean: field(2, "mean=")?.parse().map_err(|_| err(no, "bad mean"))?,
                },
                "node" if fields.len() == 6 => Node::Split {
                    feature: field(2, "f")?.parse().map_err(|_| err(no, "bad feature"))?,
                    threshold: field(3, "<=")?.parse().map_err(|_| err(no, "bad threshold"))?,
                    left: field(4, "left=")?.parse().map_err(|_| err(no, "bad left id"))?,
                    right: field(5, "right=")?.parse().map_err(|_| err(no, "bad right id"))?,
                },
                _ => return Err(err(no, "expected a `node` or `leaf` line")),
            };
            nodes.push(node);
        }
        if nodes.is_empty() {
            return Err(err(1, "tree has no nodes"));
        }
        for (id, node) in nodes.iter().enumerate() {
            if let Node::Split { feature, left, right, .. } = *node {
                if feature >= FeatureVector::LEN || left <= id || right <= id || left >= nodes.len() || right >= nodes.len() {
                    return Err(err(id + 2, "split refers to an invalid feature or child"));
                }
            }
        }
        Ok(TimeTree { nodes, max_depth })
    }
}

impl Node {
    fn mean(&self) -> f64 {
        match *self {
            Node::Leaf { mean } => mean,
            Node::Split { .. } => unreachable!("descent always ends on a leaf"),
        }
    }
}
