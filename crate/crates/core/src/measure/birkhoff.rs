//! Occupation frequencies of float orbits of the golden map.
//!
//! Iterations are split over independent seeded streams; each stream draws
//! its start point from its own ChaCha generator, so the histogram depends
//! only on `(seed, shards, iters)` and not on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{golden_density, golden_masses};
use crate::greedy::golden_step_f64;
use crate::interval::Interval;
use crate::qbeta::QBeta;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct BirkhoffConfig {
    pub iters: u64,
    pub seed: u64,
    pub shards: usize,
    /// Explicit start point; forces a single stream.
    pub start: Option<f64>,
}

impl Default for BirkhoffConfig {
    fn default() -> Self {
        BirkhoffConfig {
            iters: 1_000_000,
            seed: 0,
            shards: 8,
            start: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistogramRow {
    pub bin_left: f64,
    pub bin_right: f64,
    pub observed: f64,
    pub expected: f64,
}

impl HistogramRow {
    pub fn deviation(&self) -> f64 {
        (self.observed - self.expected).abs()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BirkhoffResult {
    pub iters: u64,
    pub rows: Vec<HistogramRow>,
    /// Exact `μ(bin)` behind the `expected` column.
    #[serde(skip)]
    pub exact_expected: Vec<QBeta>,
}

impl BirkhoffResult {
    pub fn max_deviation(&self) -> f64 {
        self.rows
            .iter()
            .map(HistogramRow::deviation)
            .fold(0.0, f64::max)
    }
}

/// The six pieces of the invariant density.
pub fn piece_bins() -> Vec<Interval> {
    golden_density().piece_intervals()
}

/// `[2i/k, 2(i+1)/k)`, `i < k`.
pub fn uniform_bins(k: usize) -> Result<Vec<Interval>> {
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one bin".into()));
    }
    let k = k as i64;
    Ok((0..k)
        .map(|i| Interval::new(QBeta::ratio(2 * i, k), QBeta::ratio(2 * (i + 1), k)))
        .collect())
}

/// Each density piece split into `k` equal parts.
pub fn refined_piece_bins(k: usize) -> Result<Vec<Interval>> {
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one bin".into()));
    }
    Ok(piece_bins()
        .into_iter()
        .flat_map(|p| {
            let len = p.length();
            (0..k as i64).map(move |i| {
                let at = |t: i64| &p.left + &len * QBeta::ratio(t, k as i64);
                Interval::new(at(i), at(i + 1))
            })
        })
        .collect())
}

/// Counts how often the orbit visits each bin and sets the frequencies
/// against the exact invariant masses.
pub fn birkhoff(bins: &[Interval], cfg: &BirkhoffConfig) -> Result<BirkhoffResult> {
    if bins.windows(2).any(|w| w[0].right > w[1].left) || bins.iter().any(Interval::is_empty) {
        return Err(Error::InvalidArgument(
            "bins must be non-empty, sorted and disjoint".into(),
        ));
    }
    if let Some(s) = cfg.start {
        if !(0.0..2.0).contains(&s) {
            return Err(Error::Domain {
                point: s.to_string(),
                domain: "[0, 2)".into(),
            });
        }
    }
    if cfg.iters == 0 {
        return Ok(BirkhoffResult {
            iters: 0,
            rows: Vec::new(),
            exact_expected: Vec::new(),
        });
    }
    let lefts: Vec<f64> = bins.iter().map(|b| b.left.to_f64()).collect();
    let rights: Vec<f64> = bins.iter().map(|b| b.right.to_f64()).collect();
    let shards = if cfg.start.is_some() {
        1
    } else {
        cfg.shards.max(1)
    };
    let per = cfg.iters / shards as u64;
    let extra = cfg.iters % shards as u64;

    let counts = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let n = per + u64::from((shard as u64) < extra);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(shard as u64);
            let mut x = cfg.start.unwrap_or_else(|| rng.gen_range(0.0..2.0));
            let mut counts = vec![0u64; bins.len()];
            for _ in 0..n {
                if let Some(i) = locate(&lefts, &rights, x) {
                    counts[i] += 1;
                }
                x = golden_step_f64(x).1;
            }
            counts
        })
        .reduce(
            || vec![0u64; bins.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );

    let exact = golden_masses(bins);
    let rows = bins
        .iter()
        .zip(&counts)
        .zip(&exact)
        .map(|((bin, &c), mu)| HistogramRow {
            bin_left: bin.left.to_f64(),
            bin_right: bin.right.to_f64(),
            observed: c as f64 / cfg.iters as f64,
            expected: mu.to_f64(),
        })
        .collect();
    Ok(BirkhoffResult {
        iters: cfg.iters,
        rows,
        exact_expected: exact,
    })
}

fn locate(lefts: &[f64], rights: &[f64], x: f64) -> Option<usize> {
    let i = lefts.partition_point(|&l| l <= x);
    if i == 0 {
        return None;
    }
    (x < rights[i - 1]).then_some(i - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_iterations() {
        let r = birkhoff(&piece_bins(), &BirkhoffConfig {
            iters: 0,
            ..Default::default()
        })
        .unwrap();
        assert!(r.rows.is_empty());
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let cfg = BirkhoffConfig {
            iters: 20_000,
            seed: 3,
            shards: 4,
            start: None,
        };
        let a = birkhoff(&piece_bins(), &cfg).unwrap();
        let b = birkhoff(&piece_bins(), &cfg).unwrap();
        assert_eq!(a, b);
        let total: f64 = a.rows.iter().map(|r| r.observed).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expected_masses() {
        let r = birkhoff(&piece_bins(), &BirkhoffConfig {
            iters: 10,
            ..Default::default()
        })
        .unwrap();
        assert!((r.rows[0].expected - 0.21396).abs() < 1e-4);
        assert!((r.rows[5].expected - 0.08174).abs() < 1e-4);
        let sum: QBeta = r.exact_expected.iter().sum();
        assert_eq!(sum, QBeta::integer(1));
    }

    #[test]
    fn bin_builders() {
        assert_eq!(uniform_bins(4).unwrap().len(), 4);
        assert!(uniform_bins(0).is_err());
        let refined = refined_piece_bins(3).unwrap();
        assert_eq!(refined.len(), 18);
        assert_eq!(refined[0].left, QBeta::integer(0));
        assert_eq!(refined[17].right, QBeta::integer(2));
    }

    #[test]
    fn rejects_bad_input() {
        let mut bins = piece_bins();
        bins.swap(0, 1);
        assert!(birkhoff(&bins, &BirkhoffConfig::default()).is_err());
        let cfg = BirkhoffConfig {
            start: Some(2.5),
            ..Default::default()
        };
        assert!(birkhoff(&piece_bins(), &cfg).is_err());
    }

    #[test]
    fn locate_bins() {
        let l = [0.0, 1.0];
        let r = [1.0, 2.0];
        assert_eq!(locate(&l, &r, 0.5), Some(0));
        assert_eq!(locate(&l, &r, 1.0), Some(1));
        assert_eq!(locate(&l, &r, 2.0), None);
        assert_eq!(locate(&[0.5], &[1.0], 0.1), None);
    }
}
