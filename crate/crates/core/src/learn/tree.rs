// SPDX-License-Identifier: Apache-2.0

//! CART classification trees: axis-aligned splits chosen by Gini impurity,
//! grown until every leaf is pure or cannot be split.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreeNode {
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        class: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    /// Root at index 0.
    pub nodes: Vec<TreeNode>,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    feature: usize,
    threshold: f64,
    score: f64,
}

impl DecisionTree {
    /// Fits a tree on `samples` (row indices, repeats allowed). At each node
    /// `mtry` features are inspected in a random order; if none of them
    /// separates the node, the remaining features are tried in the same
    /// order until one does.
    pub fn fit(
        x: &[Vec<f64>],
        y: &[usize],
        num_classes: usize,
        samples: &[usize],
        mtry: usize,
        rng: &mut impl Rng,
    ) -> Self {
        let num_features = x.first().map_or(0, Vec::len);
        let mut nodes = vec![TreeNode::Leaf { class: 0 }];
        let mut stack: Vec<(usize, Vec<usize>)> = vec![(0, samples.to_vec())];
        let mut order: Vec<usize> = (0..num_features).collect();

        while let Some((slot, members)) = stack.pop() {
            let counts = class_counts(y, &members, num_classes);
            let majority = majority_class(&counts);
            if counts.iter().filter(|&&c| c > 0).count() <= 1 {
                nodes[slot] = TreeNode::Leaf { class: majority };
                continue;
            }

            order.shuffle(rng);
            let mut best: Option<Candidate> = None;
            for (inspected, &feature) in order.iter().enumerate() {
                if inspected >= mtry && best.is_some() {
                    break;
                }
                if let Some(c) = best_split_on(x, y, num_classes, &members, feature) {
                    let better = match best {
                        None => true,
                        Some(b) => {
                            c.score > b.score || (c.score == b.score && c.feature < b.feature)
                        }
                    };
                    if better {
                        best = Some(c);
                    }
                }
            }

            let Some(split) = best else {
                nodes[slot] = TreeNode::Leaf { class: majority };
                continue;
            };
            let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = members
                .iter()
                .partition(|&&s| x[s][split.feature] <= split.threshold);
            let left = nodes.len();
            nodes.push(TreeNode::Leaf { class: 0 });
            let right = nodes.len();
            nodes.push(TreeNode::Leaf { class: 0 });
            nodes[slot] = TreeNode::Split {
                feature: split.feature,
                threshold: split.threshold,
                left,
                right,
            };
            stack.push((right, right_rows));
            stack.push((left, left_rows));
        }
        DecisionTree { nodes }
    }

    pub fn predict_row(&self, row: &[f64]) -> usize {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                TreeNode::Leaf { class } => return class,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if row[feature] <= threshold {
                        left
                    } else {
                        right
                    }
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], at: usize) -> usize {
            match nodes[at] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => {
                    1 + walk(nodes, left).max(walk(nodes, right))
                }
            }
        }
        walk(&self.nodes, 0)
    }
}

fn class_counts(y: &[usize], members: &[usize], num_classes: usize) -> Vec<usize> {
    let mut counts = vec![0; num_classes];
    for &s in members {
        counts[y[s]] += 1;
    }
    counts
}

/// Most frequent class, lowest index on ties.
pub(crate) fn majority_class(counts: &[usize]) -> usize {
    let mut best = 0;
    for (c, &n) in counts.iter().enumerate() {
        if n > counts[best] {
            best = c;
        }
    }
    best
}

/// Best threshold on one feature, scored by `Σ_children Σ_c n_c²/n_child`,
/// which is maximal exactly where the weighted child Gini impurity is
/// minimal. `None` when the feature is constant over the node.
fn best_split_on(
    x: &[Vec<f64>],
    y: &[usize],
    num_classes: usize,
    members: &[usize],
    feature: usize,
) -> Option<Candidate> {
    let mut sorted: Vec<(f64, usize)> = members.iter().map(|&s| (x[s][feature], y[s])).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    if sorted.first()?.0 == sorted.last()?.0 {
        return None;
    }

    let n = sorted.len();
    let mut left = vec![0usize; num_classes];
    let mut right = vec![0usize; num_classes];
    for &(_, c) in &sorted {
        right[c] += 1;
    }
    let mut best: Option<Candidate> = None;
    for k in 0..n - 1 {
        let c = sorted[k].1;
        left[c] += 1;
        right[c] -= 1;
        let (a, b) = (sorted[k].0, sorted[k + 1].0);
        if a == b {
            continue;
        }
        let nl = (k + 1) as f64;
        let nr = (n - k - 1) as f64;
        let sl: f64 = left.iter().map(|&v| (v * v) as f64).sum::<f64>() / nl;
        let sr: f64 = right.iter().map(|&v| (v * v) as f64).sum::<f64>() / nr;
        let score = sl + sr;
        if best.is_none_or(|bc| score > bc.score) {
            let mid = a + (b - a) / 2.0;
            let threshold = if mid < b { mid } else { a };
            best = Some(Candidate {
                feature,
                threshold,
                score,
            });
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn three_points_hand_traced() {
        // x = 1, 2, 3 with classes 0, 1, 1. Candidate thresholds 1.5 and 2.5:
        //   1.5 -> {0} | {1,1}: score 1/1 + 4/2 = 3
        //   2.5 -> {0,1} | {1}: score 2/2 + 1/1 = 2
        // so the root splits at 1.5 and both children are pure.
        let x = vec![vec![1.0], vec![2.0], vec![3.0]];
        let y = vec![0, 1, 1];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let tree = DecisionTree::fit(&x, &y, 2, &[0, 1, 2], 1, &mut rng);
        assert_eq!(
            tree.nodes,
            vec![
                TreeNode::Split {
                    feature: 0,
                    threshold: 1.5,
                    left: 1,
                    right: 2
                },
                TreeNode::Leaf { class: 0 },
                TreeNode::Leaf { class: 1 },
            ]
        );
        assert_eq!(tree.predict_row(&[0.0]), 0);
        assert_eq!(tree.predict_row(&[1.6]), 1);
    }

    #[test]
    fn xor_needs_depth_two() {
        let x = vec![
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
        ];
        let y = vec![0, 0, 1, 1];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let tree = DecisionTree::fit(&x, &y, 2, &[0, 1, 2, 3], 1, &mut rng);
        assert_eq!(tree.depth(), 2);
        for (row, &c) in x.iter().zip(&y) {
            assert_eq!(tree.predict_row(row), c);
        }
    }

    #[test]
    fn inseparable_duplicates_become_majority_leaf() {
        let x = vec![vec![1.0], vec![1.0], vec![1.0]];
        let y = vec![1, 0, 1];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let tree = DecisionTree::fit(&x, &y, 2, &[0, 1, 2], 1, &mut rng);
        assert_eq!(tree.nodes, vec![TreeNode::Leaf { class: 1 }]);
    }

    #[test]
    fn constant_sampled_feature_falls_through() {
        // Feature 0 is constant; with mtry = 1 the tree must still find feature 1.
        let x = vec![vec![5.0, 0.0], vec![5.0, 1.0]];
        let y = vec![0, 1];
        for seed in 0..8 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tree = DecisionTree::fit(&x, &y, 2, &[0, 1], 1, &mut rng);
            assert!(matches!(tree.nodes[0], TreeNode::Split { feature: 1, .. }));
        }
    }

    #[test]
    fn majority_ties_go_low() {
        assert_eq!(majority_class(&[2, 2, 1]), 0);
        assert_eq!(majority_class(&[0, 3, 3]), 1);
    }
}
