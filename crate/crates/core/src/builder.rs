//! Growing a single tree under each split regime.
//!
//! The two theoretical regimes produce complete trees of depth
//! `ceil(log2 k_n)` with every cut at the midpoint of the chosen side. The
//! CART regime cuts between sample values and grows best-first until the leaf
//! budget is spent.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::seq::index;
use rand::Rng;

use crate::cell::Cell;
use crate::config::{ForestConfig, SplitPolicy, SplitProbabilities};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::tree::{Node, RandomTree};

/// Relative tolerance under which two decreases count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitDecision {
    /// Zero-based coordinate index.
    pub coordinate: usize,
    pub position: f64,
    /// Within-node sum-of-squares decrease (response² units).
    pub decrease: f64,
}

#[inline]
fn is_tied(value: f64, best: f64) -> bool {
    best - value <= TIE_TOLERANCE * best.abs()
}

/// Draws coordinate `j` with probability `p_j` by inverting the cumulative sum.
pub fn choose_coordinate_random<R: Rng + ?Sized>(probs: &SplitProbabilities, rng: &mut R) -> usize {
    let p = probs.as_slice();
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (j, pj) in p.iter().enumerate() {
        acc += pj;
        if u < acc {
            return j;
        }
    }
    // u landed in the rounding gap above the cumulative sum
    p.len() - 1
}

/// Draws `m_try` candidate coordinates out of `d`.
///
/// With replacement the result has exactly `m_try` entries; without
/// replacement it has `m_try` distinct entries and `m_try > d` is an error.
pub fn sample_candidates<R: Rng + ?Sized>(
    d: usize,
    m_try: usize,
    with_replacement: bool,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if d == 0 || m_try == 0 {
        return Err(Error::Config("need d >= 1 and m_try >= 1".into()));
    }
    if with_replacement {
        Ok((0..m_try).map(|_| rng.random_range(0..d)).collect())
    } else if m_try > d {
        Err(Error::Config(format!("cannot draw {m_try} distinct coordinates out of {d}")))
    } else {
        Ok(index::sample(rng, d, m_try).into_vec())
    }
}

/// Probability that a given strong coordinate is cut when `m_try` candidates
/// are drawn with replacement and a strong one is picked uniformly whenever
/// present: `(1/S) [1 - (1 - S/d)^m_try]`.
pub fn ideal_cut_probability(s: usize, d: usize, m_try: usize) -> Result<f64> {
    if s == 0 || s > d || m_try == 0 {
        return Err(Error::Domain(format!(
            "ideal cut probability needs 1 <= S <= d and m_try >= 1 (S={s}, d={d}, m_try={m_try})"
        )));
    }
    let s = s as f64;
    Ok((1.0 - (1.0 - s / d as f64).powi(m_try as i32)) / s)
}

fn sorted_distinct(candidates: &[usize]) -> Vec<usize> {
    let mut c = candidates.to_vec();
    c.sort_unstable();
    c.dedup();
    c
}

/// Midpoint-cut decision over the split-sample rows in a node.
fn midpoint_split_rows<R: Rng + ?Sized>(
    cell: &Cell,
    candidates: &[usize],
    sample: &Dataset,
    rows: &[u32],
    rng: &mut R,
) -> SplitDecision {
    let distinct = sorted_distinct(candidates);
    let decreases: Vec<f64> = distinct
        .iter()
        .map(|&j| {
            let mid = cell.midpoint(j);
            let (mut n_l, mut s_l, mut n_r, mut s_r) = (0usize, 0.0, 0usize, 0.0);
            for &i in rows {
                let i = i as usize;
                let y = sample.y()[i];
                if sample.get(i, j) < mid {
                    n_l += 1;
                    s_l += y;
                } else {
                    n_r += 1;
                    s_r += y;
                }
            }
            if n_l == 0 || n_r == 0 {
                return 0.0;
            }
            let diff = s_l / n_l as f64 - s_r / n_r as f64;
            (n_l * n_r) as f64 / (n_l + n_r) as f64 * diff * diff
        })
        .collect();
    let best = decreases.iter().copied().fold(0.0, f64::max);
    let tied: Vec<usize> = (0..distinct.len()).filter(|&k| is_tied(decreases[k], best)).collect();
    let pick = tied[rng.random_range(0..tied.len())];
    let coordinate = distinct[pick];
    SplitDecision { coordinate, position: cell.midpoint(coordinate), decrease: decreases[pick] }
}

/// Best midpoint cut of `cell` among `candidates`, scored by the within-node
/// sum-of-squares decrease of the split-sample points inside the cell.
///
/// Duplicated candidates are evaluated once; ties (including the empty-node
/// case where every decrease is 0) are broken uniformly at random.
pub fn best_midpoint_split<R: Rng + ?Sized>(
    cell: &Cell,
    candidates: &[usize],
    sample: &Dataset,
    rng: &mut R,
) -> SplitDecision {
    assert!(!candidates.is_empty(), "candidate list must be non-empty");
    let rows: Vec<u32> = (0..sample.n()).filter(|&i| cell.contains(sample.row(i))).map(|i| i as u32).collect();
    midpoint_split_rows(cell, candidates, sample, &rows, rng)
}

/// Scratch space reused across CART split searches.
#[derive(Default)]
struct CartScratch {
    pairs: Vec<(f64, f64)>,
}

fn cart_split_rows<R: Rng + ?Sized>(
    candidates: &[usize],
    sample: &Dataset,
    rows: &[u32],
    rng: &mut R,
    scratch: &mut CartScratch,
) -> Option<SplitDecision> {
    if rows.len() < 2 {
        return None;
    }
    let m = rows.len();
    let total: f64 = rows.iter().map(|&i| sample.y()[i as usize]).sum();
    let mut best: Option<SplitDecision> = None;
    let mut ties = 0u32;
    for &j in &sorted_distinct(candidates) {
        let pairs = &mut scratch.pairs;
        pairs.clear();
        pairs.extend(rows.iter().map(|&i| (sample.get(i as usize, j), sample.y()[i as usize])));
        pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let mut s_l = 0.0;
        for k in 1..m {
            s_l += pairs[k - 1].1;
            let (lo, hi) = (pairs[k - 1].0, pairs[k].0);
            if lo == hi {
                continue;
            }
            let n_l = k as f64;
            let n_r = (m - k) as f64;
            let diff = s_l / n_l - (total - s_l) / n_r;
            let decrease = n_l * n_r / m as f64 * diff * diff;
            let mut position = 0.5 * (lo + hi);
            if position <= lo {
                position = hi;
            }
            let candidate = SplitDecision { coordinate: j, position, decrease };
            match best {
                None => {
                    best = Some(candidate);
                    ties = 1;
                }
                Some(b) if decrease > b.decrease && !is_tied(b.decrease, decrease) => {
                    best = Some(candidate);
                    ties = 1;
                }
                Some(b) if is_tied(decrease, b.decrease.max(decrease)) => {
                    ties += 1;
                    if rng.random_range(0..ties) == 0 {
                        best = Some(candidate);
                    }
                }
                Some(_) => {}
            }
        }
    }
    best
}

/// CART cut of a node: for each candidate coordinate, scans cut positions at
/// midpoints between consecutive distinct sorted values of the node's points
/// and keeps the one with the largest sum-of-squares decrease. Ties are
/// broken uniformly at random.
///
/// Returns `None` when the node is not splittable (fewer than two points, or
/// no candidate coordinate separates them).
pub fn best_cart_split<R: Rng + ?Sized>(
    cell: &Cell,
    candidates: &[usize],
    sample: &Dataset,
    rng: &mut R,
) -> Option<SplitDecision> {
    let rows: Vec<u32> = (0..sample.n()).filter(|&i| cell.contains(sample.row(i))).map(|i| i as u32).collect();
    cart_split_rows(candidates, sample, &rows, rng, &mut CartScratch::default())
}

/// Grows one tree. `data` is the training sample; only the CART regime reads it.
pub fn build_tree<R: Rng + ?Sized>(config: &ForestConfig, data: &Dataset, rng: &mut R) -> Result<RandomTree> {
    let d = data.d();
    config.validate(d)?;
    match &config.policy {
        SplitPolicy::PurelyRandom => {
            let uniform;
            let probs = match &config.probs {
                Some(p) => p,
                None => {
                    uniform = SplitProbabilities::uniform(d)?;
                    &uniform
                }
            };
            Ok(grow_dyadic(
                d,
                config.depth(),
                None,
                |cell, _, rng| {
                    let j = choose_coordinate_random(probs, rng);
                    SplitDecision { coordinate: j, position: cell.midpoint(j), decrease: 0.0 }
                },
                rng,
            ))
        }
        SplitPolicy::SecondSampleGuided(sample) => {
            let m_try = config.m_try;
            Ok(grow_dyadic(
                d,
                config.depth(),
                Some(sample),
                |cell, rows, rng| {
                    let candidates = sample_candidates(d, m_try, true, rng).expect("validated m_try");
                    midpoint_split_rows(cell, &candidates, sample, rows, rng)
                },
                rng,
            ))
        }
        SplitPolicy::CartEmpirical => {
            if data.is_empty() {
                return Err(Error::Config("CART growth needs a non-empty training sample".into()));
            }
            Ok(grow_cart(data, config.m_try.min(d), config.leaf_budget(data.n()), rng))
        }
    }
}

/// Complete midpoint tree of the given depth, grown breadth-first. `decide`
/// sees the node cell and the split-sample rows inside it.
fn grow_dyadic<R, F>(d: usize, depth: u32, sample: Option<&Dataset>, mut decide: F, rng: &mut R) -> RandomTree
where
    R: Rng + ?Sized,
    F: FnMut(&Cell, &[u32], &mut R) -> SplitDecision,
{
    let mut nodes = vec![Node::Leaf { leaf: 0 }];
    let all_rows: Vec<u32> = sample.map_or(Vec::new(), |s| (0..s.n() as u32).collect());
    let mut frontier = vec![(0u32, Cell::unit(d), all_rows)];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for (id, cell, rows) in frontier {
            let decision = decide(&cell, &rows, rng);
            let j = decision.coordinate;
            let (left_cell, right_cell) = cell.split(j, decision.position);
            let (left_rows, right_rows): (Vec<u32>, Vec<u32>) = match sample {
                Some(s) => rows.iter().partition(|&&i| s.get(i as usize, j) < decision.position),
                None => (Vec::new(), Vec::new()),
            };
            let left = nodes.len() as u32;
            nodes.push(Node::Leaf { leaf: 0 });
            nodes.push(Node::Leaf { leaf: 0 });
            nodes[id as usize] = Node::Split { coord: j as u32, threshold: decision.position, left, right: left + 1 };
            next.push((left, left_cell, left_rows));
            next.push((left + 1, right_cell, right_rows));
        }
        frontier = next;
    }
    RandomTree::from_nodes(d, nodes, 0)
}

struct Pending {
    node: u32,
    rows: Vec<u32>,
    decision: SplitDecision,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Pending {}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Pending {
    // Largest decrease first, then the earliest-created node.
    fn cmp(&self, other: &Self) -> Ordering {
        self.decision.decrease.total_cmp(&other.decision.decrease).then_with(|| other.node.cmp(&self.node))
    }
}

/// Best-first CART growth with a fixed leaf budget.
fn grow_cart<R: Rng + ?Sized>(data: &Dataset, m_try: usize, budget: usize, rng: &mut R) -> RandomTree {
    let d = data.d();
    let mut scratch = CartScratch::default();
    let mut nodes = vec![Node::Leaf { leaf: 0 }];
    let mut heap = BinaryHeap::new();
    let mut evaluate = |node: u32, rows: Vec<u32>, rng: &mut R, heap: &mut BinaryHeap<Pending>| {
        if rows.len() < 2 {
            return;
        }
        let candidates = sample_candidates(d, m_try, false, rng).expect("m_try <= d");
        if let Some(decision) = cart_split_rows(&candidates, data, &rows, rng, &mut scratch) {
            heap.push(Pending { node, rows, decision });
        }
    };
    evaluate(0, (0..data.n() as u32).collect(), rng, &mut heap);
    let mut leaves = 1usize;
    while leaves < budget {
        let Some(Pending { node, rows, decision }) = heap.pop() else { break };
        let j = decision.coordinate;
        let (left_rows, right_rows): (Vec<u32>, Vec<u32>) =
            rows.iter().partition(|&&i| data.get(i as usize, j) < decision.position);
        let left = nodes.len() as u32;
        nodes.push(Node::Leaf { leaf: 0 });
        nodes.push(Node::Leaf { leaf: 0 });
        nodes[node as usize] = Node::Split { coord: j as u32, threshold: decision.position, left, right: left + 1 };
        leaves += 1;
        evaluate(left, left_rows, rng, &mut heap);
        evaluate(left + 1, right_rows, rng, &mut heap);
    }
    RandomTree::from_nodes(d, nodes, budget - leaves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn linear_sample(n: usize, d: usize, seed: u64) -> Dataset {
        let mut rng = stream(seed, &[]);
        let x: Vec<f64> = (0..n * d).map(|_| rng.random()).collect();
        let y = (0..n).map(|i| 2.0 * x[i * d]).collect();
        Dataset::new(x, y, d).unwrap()
    }

    #[test]
    fn depth_and_leaf_count() {
        let data = Dataset::empty(3);
        let mut rng = stream(1, &[]);
        let t = build_tree(&ForestConfig::purely_random(2, 1, 0), &data, &mut rng).unwrap();
        assert_eq!(t.n_leaves(), 2);
        assert_eq!(t.depth(), 1);
        let t = build_tree(&ForestConfig::purely_random(1000, 1, 0), &data, &mut rng).unwrap();
        assert_eq!(t.n_leaves(), 1024);
        assert!(t.leaf_cells().iter().all(|c| c.measure() == 2f64.powi(-10)));
    }

    #[test]
    fn near_degenerate_probabilities() {
        let eps = 1e-9;
        let probs = SplitProbabilities::new(vec![1.0 - eps, eps / 2.0, eps / 2.0]).unwrap();
        let mut rng = stream(5, &[]);
        assert!((0..1000).all(|_| choose_coordinate_random(&probs, &mut rng) == 0));
    }

    #[test]
    fn coordinate_frequency_within_three_sigma() {
        let probs = SplitProbabilities::new(vec![0.7, 0.3]).unwrap();
        let mut rng = stream(9, &[]);
        let draws = 100_000;
        let hits = (0..draws).filter(|_| choose_coordinate_random(&probs, &mut rng) == 0).count();
        let freq = hits as f64 / draws as f64;
        // 3 * sqrt(0.7 * 0.3 / 1e5) = 0.00435
        assert!((freq - 0.7).abs() <= 0.0045, "freq = {freq}");
    }

    #[test]
    fn candidate_sampling_shapes() {
        let mut rng = stream(2, &[]);
        let mut full = sample_candidates(7, 7, false, &mut rng).unwrap();
        full.sort_unstable();
        assert_eq!(full, (0..7).collect::<Vec<_>>());
        assert_eq!(sample_candidates(7, 12, true, &mut rng).unwrap().len(), 12);
        assert!(sample_candidates(7, 8, false, &mut rng).is_err());
        let one = sample_candidates(7, 1, true, &mut rng).unwrap();
        assert!(one.len() == 1 && one[0] < 7);
    }

    #[test]
    fn ideal_probability_edge_cases() {
        assert!(ideal_cut_probability(0, 10, 3).is_err());
        for m in [1, 5, 50] {
            assert_eq!(ideal_cut_probability(4, 4, m).unwrap(), 0.25);
        }
        let v = ideal_cut_probability(5, 100, 20).unwrap();
        assert!((v - 0.128_302_815_518_291_6).abs() < 1e-15);
        let big = ideal_cut_probability(5, 100, 2000).unwrap();
        assert!((big - 0.2).abs() < 1e-15);
        assert!(big >= v);
    }

    #[test]
    fn linear_model_prefers_strong_coordinate() {
        let n = 20_000;
        let sample = linear_sample(n, 2, 4);
        let mut rng = stream(3, &[]);
        let dec = best_midpoint_split(&Cell::unit(2), &[0, 1], &sample, &mut rng);
        assert_eq!(dec.coordinate, 0);
        assert_eq!(dec.position, 0.5);
        let per_point = dec.decrease / n as f64;
        assert!((per_point - 0.25).abs() < 0.01, "decrease per point {per_point}");
    }

    #[test]
    fn empty_node_picks_uniformly_with_zero_decrease() {
        let sample = Dataset::new(vec![0.9; 3], vec![1.0], 3).unwrap();
        let cell = Cell { lo: vec![0.0; 3], hi: vec![0.5; 3] };
        let mut rng = stream(8, &[]);
        let mut seen = [0usize; 3];
        for _ in 0..3000 {
            let dec = best_midpoint_split(&cell, &[0, 1, 2, 2], &sample, &mut rng);
            assert_eq!(dec.decrease, 0.0);
            seen[dec.coordinate] += 1;
        }
        // duplicates are evaluated once, so the draw is uniform over {0, 1, 2}
        assert!(seen.iter().all(|&c| (900..1100).contains(&c)), "{seen:?}");
        let dec = best_midpoint_split(&cell, &[1, 1], &sample, &mut rng);
        assert_eq!(dec.coordinate, 1);
    }

    #[test]
    fn cart_two_point_split() {
        let sample = Dataset::new(vec![0.2, 0.5, 0.6, 0.5], vec![0.0, 10.0], 2).unwrap();
        let mut rng = stream(1, &[]);
        let dec = best_cart_split(&Cell::unit(2), &[0, 1], &sample, &mut rng).unwrap();
        assert_eq!(dec.coordinate, 0);
        assert!(dec.position > 0.2 && dec.position < 0.6);
        assert!((dec.decrease - 50.0).abs() < 1e-12);
    }

    #[test]
    fn cart_constant_response_has_zero_decrease() {
        let mut rng = stream(6, &[]);
        let x: Vec<f64> = (0..40).map(|_| rng.random()).collect();
        let sample = Dataset::new(x, vec![2.0; 20], 2).unwrap();
        let dec = best_cart_split(&Cell::unit(2), &[0, 1], &sample, &mut rng).unwrap();
        assert_eq!(dec.decrease, 0.0);
        let single = Dataset::new(vec![0.3, 0.3], vec![1.0], 2).unwrap();
        assert!(best_cart_split(&Cell::unit(2), &[0, 1], &single, &mut rng).is_none());
    }

    #[test]
    fn cart_tree_meets_budget() {
        let data = linear_sample(100, 3, 12);
        let mut rng = stream(0, &[]);
        let cfg = ForestConfig::cart(1, 3, 0);
        let tree = build_tree(&cfg, &data, &mut rng).unwrap();
        assert_eq!(tree.n_leaves(), 20);
        assert_eq!(tree.shortfall(), 0);
        let tiny = Dataset::new(vec![0.1, 0.2, 0.3, 0.4], vec![1.0, 2.0], 2).unwrap();
        let tree = build_tree(&cfg.clone().with_target_leaves(5), &tiny, &mut rng).unwrap();
        assert_eq!(tree.n_leaves(), 2);
        assert_eq!(tree.shortfall(), 3);
    }
}
