//! Distributional checks: split counts along a query path, leaf occupancy,
//! coordinate frequencies and the ideal cut probability.

use rand::Rng;
use rayon::prelude::*;

use super::{BoundParams, BoundReport};
use crate::builder::{build_tree, choose_coordinate_random, ideal_cut_probability, sample_candidates};
use crate::config::{ceil_log2, ForestConfig, SplitProbabilities};
use crate::data::Dataset;
use crate::error::Result;
use crate::rng::{stream, tag};
use crate::stats::{binomial_pmf, chi_square_gof, ChiSquareTest};

/// Significance level of the goodness-of-fit checks.
pub const LAW_ALPHA: f64 = 0.001;

/// Encodes `alpha <= p-value` as a report.
fn law_report(name: String, params: BoundParams, test: &ChiSquareTest) -> BoundReport {
    let extra = format!("chi2={:.4};dof={}", test.statistic, test.dof);
    let params = BoundParams { extra: Some(params.extra.map_or(extra.clone(), |e| format!("{e};{extra}"))), ..params };
    BoundReport::exact(name, params, LAW_ALPHA, test.p_value)
}

/// Number of cuts along each coordinate on the path to a fixed query, over
/// `trees` independent purely random trees, against Binomial(`ceil(log2 k_n)`, `p_j`).
pub fn split_count_law_check(
    probs: &SplitProbabilities,
    k_n: usize,
    trees: usize,
    query: &[f64],
    seed: u64,
) -> Result<Vec<BoundReport>> {
    let d = probs.len();
    let config = ForestConfig::purely_random(k_n, 1, seed).with_probs(probs.clone());
    let shape = Dataset::empty(d);
    let counts = (0..trees)
        .into_par_iter()
        .map(|i| {
            let tree = build_tree(&config, &shape, &mut stream(seed, &[tag::TREE, i as u64]))?;
            Ok(tree.path_split_counts(query))
        })
        .collect::<Result<Vec<_>>>()?;
    let depth = ceil_log2(k_n) as usize;
    Ok((0..d)
        .map(|j| {
            let observed: Vec<usize> = counts.iter().map(|c| c[j] as usize).collect();
            let test = chi_square_gof(&observed, &binomial_pmf(depth, probs.as_slice()[j]));
            let params = BoundParams {
                p: Some(probs.as_slice()[j]),
                d: Some(d),
                k_n: Some(k_n),
                extra: Some(format!("j={};trees={trees}", j + 1)),
                ..Default::default()
            };
            law_report("split count law K_nj".into(), params, &test)
        })
        .collect())
}

/// Occupancy of a uniform query's leaf, one fresh sample, query and tree per
/// replicate, against Binomial(`n`, `2^-ceil(log2 k_n)`).
pub fn occupancy_law_check(d: usize, k_n: usize, n: usize, replicates: usize, seed: u64) -> Result<BoundReport> {
    let config = ForestConfig::purely_random(k_n, 1, seed);
    let shape = Dataset::empty(d);
    let counts = (0..replicates)
        .into_par_iter()
        .map(|rep| {
            let rep = rep as u64;
            let mut rng = stream(seed, &[tag::TRAIN, rep]);
            let x: Vec<f64> = (0..n * d).map(|_| rng.random()).collect();
            let mut qrng = stream(seed, &[tag::QUERY, rep]);
            let query: Vec<f64> = (0..d).map(|_| qrng.random()).collect();
            let tree = build_tree(&config, &shape, &mut stream(seed, &[tag::TREE, rep]))?;
            let cell = tree.leaf_cell(&query);
            Ok(x.chunks_exact(d).filter(|row| cell.contains(row)).count())
        })
        .collect::<Result<Vec<_>>>()?;
    let leaf_mass = 0.5f64.powi(ceil_log2(k_n) as i32);
    let test = chi_square_gof(&counts, &binomial_pmf(n, leaf_mass));
    let params = BoundParams {
        n: Some(n),
        d: Some(d),
        k_n: Some(k_n),
        p: Some(leaf_mass),
        extra: Some(format!("replicates={replicates}")),
        ..Default::default()
    };
    Ok(law_report("leaf occupancy law N_n".into(), params, &test))
}

/// Frequencies of `draws` random coordinate choices against `p`.
pub fn split_coordinate_frequency_check(probs: &SplitProbabilities, draws: usize, seed: u64) -> BoundReport {
    let mut rng = stream(seed, &[tag::TREE]);
    let observed: Vec<usize> = (0..draws).map(|_| choose_coordinate_random(probs, &mut rng)).collect();
    let test = chi_square_gof(&observed, probs.as_slice());
    let params = BoundParams { d: Some(probs.len()), extra: Some(format!("draws={draws}")), ..Default::default() };
    law_report("split coordinate frequencies".into(), params, &test)
}

/// Simulates the idealised guided choice: draw `m_try` candidates with
/// replacement, keep the strong ones (coordinates `0..s`) and pick one of them
/// uniformly. The frequency of coordinate 0 must agree with the closed form.
pub fn ideal_probability_check(s: usize, d: usize, m_try: usize, draws: usize, seed: u64) -> Result<BoundReport> {
    let exact = ideal_cut_probability(s, d, m_try)?;
    let mut rng = stream(seed, &[tag::SPLIT_SAMPLE]);
    let mut hits = 0usize;
    for _ in 0..draws {
        let mut strong: Vec<usize> =
            sample_candidates(d, m_try, true, &mut rng)?.into_iter().filter(|&j| j < s).collect();
        strong.sort_unstable();
        strong.dedup();
        if !strong.is_empty() && strong[rng.random_range(0..strong.len())] == 0 {
            hits += 1;
        }
    }
    let p = hits as f64 / draws as f64;
    let stderr = (exact * (1.0 - exact) / draws as f64).sqrt();
    let params = BoundParams {
        s: Some(s),
        d: Some(d),
        extra: Some(format!("m_try={m_try};draws={draws}")),
        ..Default::default()
    };
    Ok(BoundReport::agreement("ideal cut probability", params, p, stderr, exact))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_count_law_small() {
        let probs = SplitProbabilities::new(vec![0.6, 0.3, 0.1]).unwrap();
        let reports = split_count_law_check(&probs, 8, 3000, &[0.3, 0.6, 0.9], 2).unwrap();
        assert_eq!(reports.len(), 3);
        assert!(reports.iter().all(|r| r.pass), "{reports:?}");
    }

    #[test]
    fn occupancy_law_small() {
        assert!(occupancy_law_check(2, 4, 200, 2000, 8).unwrap().pass);
    }

    #[test]
    fn wrong_law_is_rejected() {
        // counts from p = (0.6, 0.4) tested against (0.5, 0.5)
        let truth = SplitProbabilities::new(vec![0.6, 0.4]).unwrap();
        let mut rng = stream(1, &[0]);
        let observed: Vec<usize> = (0..20_000).map(|_| choose_coordinate_random(&truth, &mut rng)).collect();
        assert!(!chi_square_gof(&observed, &[0.5, 0.5]).passes(LAW_ALPHA));
        let probs = SplitProbabilities::new(vec![0.6, 0.4]).unwrap();
        assert!(split_coordinate_frequency_check(&probs, 20_000, 1).pass);
    }

    #[test]
    fn ideal_probability_simulation() {
        assert!(ideal_probability_check(5, 100, 10, 40_000, 3).unwrap().pass);
        assert!(ideal_probability_check(1, 4, 4, 40_000, 3).unwrap().pass);
    }
}
