use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::derive_seed;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Random forest hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    /// Fraction of features considered at each split; 1.0 = all.
    pub feature_fraction: f64,
    pub seed: u64,
}

impl RfConfig {
    pub fn new(n_trees: usize, max_depth: usize, seed: u64) -> Result<Self> {
        let cfg = RfConfig {
            n_trees,
            max_depth,
            feature_fraction: 1.0,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::Argument("n_trees must be >= 1".into()));
        }
        if self.max_depth == 0 {
            return Err(Error::Argument("max_depth must be >= 1".into()));
        }
        if !(self.feature_fraction > 0.0 && self.feature_fraction <= 1.0) {
            return Err(Error::Argument("feature_fraction must be in (0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

/// One variance-reduction regression tree, nodes in an arena (root at 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

impl Tree {
    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                TreeNode::Leaf { value } => return *value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if row[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], at: usize) -> usize {
            match &nodes[at] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => {
                    1 + walk(nodes, *left).max(walk(nodes, *right))
                }
            }
        }
        walk(&self.nodes, 0)
    }
}

/// Bagged regression forest: each tree fits a bootstrap resample of the
/// training set. Prediction is the mean of the tree predictions, so it can
/// never leave the training target range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub config: RfConfig,
    pub trees: Vec<Tree>,
}

impl ForestModel {
    pub fn predict(&self, row: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict(row)).sum();
        sum / self.trees.len() as f64
    }
}

pub(crate) fn fit_forest(x: &Matrix, y: &[f64], cfg: &RfConfig) -> Result<ForestModel> {
    cfg.validate()?;
    let n = x.rows();
    if n < 2 {
        return Err(Error::Argument("random forest needs at least 2 rows".into()));
    }
    if y.len() != n {
        return Err(Error::Argument(format!("{n} rows but {} targets", y.len())));
    }
    let trees = (0..cfg.n_trees)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, t as u64));
            let sample: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            let mut builder = TreeBuilder {
                x,
                y,
                cfg,
                rng,
                nodes: Vec::new(),
            };
            builder.build(&sample, 0);
            Tree {
                nodes: builder.nodes,
            }
        })
        .collect();
    Ok(ForestModel {
        config: cfg.clone(),
        trees,
    })
}

struct TreeBuilder<'a> {
    x: &'a Matrix,
    y: &'a [f64],
    cfg: &'a RfConfig,
    rng: ChaCha8Rng,
    nodes: Vec<TreeNode>,
}

impl TreeBuilder<'_> {
    /// Builds the subtree over `rows` (bootstrap indices, duplicates
    /// allowed) and returns its node index.
    fn build(&mut self, rows: &[usize], depth: usize) -> usize {
        let mean = rows.iter().map(|&i| self.y[i]).sum::<f64>() / rows.len() as f64;
        let pure = rows.iter().all(|&i| self.y[i] == self.y[rows[0]]);
        if depth >= self.cfg.max_depth || rows.len() < 2 || pure {
            self.nodes.push(TreeNode::Leaf { value: mean });
            return self.nodes.len() - 1;
        }
        match self.best_split(rows) {
            None => {
                self.nodes.push(TreeNode::Leaf { value: mean });
                self.nodes.len() - 1
            }
            Some((feature, threshold)) => {
                let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
                    .iter()
                    .partition(|&&i| self.x.get(i, feature) <= threshold);
                let at = self.nodes.len();
                // placeholder until the children exist
                self.nodes.push(TreeNode::Leaf { value: mean });
                let left = self.build(&left_rows, depth + 1);
                let right = self.build(&right_rows, depth + 1);
                self.nodes[at] = TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                };
                at
            }
        }
    }

    /// Exhaustive search over (sampled) features and midpoints between
    /// consecutive sorted distinct values, maximizing squared-error
    /// reduction. Ties keep the first candidate in (feature, threshold)
    /// order.
    fn best_split(&mut self, rows: &[usize]) -> Option<(usize, f64)> {
        let p = self.x.cols();
        let features: Vec<usize> = if self.cfg.feature_fraction >= 1.0 {
            (0..p).collect()
        } else {
            let count = ((p as f64 * self.cfg.feature_fraction).ceil() as usize).clamp(1, p);
            let mut all: Vec<usize> = (0..p).collect();
            for i in 0..count {
                let j = self.rng.gen_range(i..all.len());
                all.swap(i, j);
            }
            let mut chosen = all[..count].to_vec();
            chosen.sort_unstable();
            chosen
        };

        let total_sse = sse(self.y, rows);
        let mut best: Option<(f64, usize, f64)> = None; // (reduction, feature, threshold)
        for &f in &features {
            let mut ordered: Vec<(f64, usize)> =
                rows.iter().map(|&i| (self.x.get(i, f), i)).collect();
            ordered.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite features"));

            // prefix sums over the sorted order
            let mut prefix_sum = 0.0;
            let mut prefix_sq = 0.0;
            let total_sum: f64 = ordered.iter().map(|&(_, i)| self.y[i]).sum();
            let total_sq: f64 = ordered.iter().map(|&(_, i)| self.y[i] * self.y[i]).sum();
            let n = ordered.len() as f64;

            for pos in 0..ordered.len() - 1 {
                let yi = self.y[ordered[pos].1];
                prefix_sum += yi;
                prefix_sq += yi * yi;
                let (v, v_next) = (ordered[pos].0, ordered[pos + 1].0);
                if v == v_next {
                    continue; // split only between distinct values
                }
                let threshold = v + (v_next - v) / 2.0;
                let nl = (pos + 1) as f64;
                let nr = n - nl;
                let sse_l = prefix_sq - prefix_sum * prefix_sum / nl;
                let sum_r = total_sum - prefix_sum;
                let sse_r = (total_sq - prefix_sq) - sum_r * sum_r / nr;
                let reduction = total_sse - sse_l - sse_r;
                match best {
                    Some((br, _, _)) if reduction <= br => {}
                    _ => best = Some((reduction, f, threshold)),
                }
            }
        }
        best.filter(|&(reduction, _, _)| reduction > 0.0)
            .map(|(_, f, t)| (f, t))
    }
}

fn sse(y: &[f64], rows: &[usize]) -> f64 {
    let n = rows.len() as f64;
    let mean = rows.iter().map(|&i| y[i]).sum::<f64>() / n;
    rows.iter().map(|&i| (y[i] - mean) * (y[i] - mean)).sum()
}
