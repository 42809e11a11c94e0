//! Randomized tools: sampling colorings from a step coloring graphon, Monte
//! Carlo rainbow densities, and local search for seed colorings.
//!
//! All randomness comes from `ChaCha8Rng` seeded with `seed_from_u64`;
//! parallel work uses the same seed with one ChaCha stream per batch or
//! restart, so results do not depend on thread count or platform.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::coloring::{blowup_threshold, count_rainbow, pair_count, CopyIndex, EdgeColoring, RainbowCount};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::graphon::{rainbow_density, StepColoringGraphon};
use crate::scalar::{sqrt_upper_bound, Rational, Scalar};

/// Batches used by [`estimate_density`] when enough samples are requested.
pub const DEFAULT_BATCHES: u64 = 100;

/// Consecutive plateau moves allowed before only strict gains are accepted.
pub const PLATEAU_CAP: u32 = 50;

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn pick(weights: &[f64], rng: &mut ChaCha8Rng) -> Option<usize> {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let mut x = rng.gen::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if x < w {
            return Some(i);
        }
        x -= w;
    }
    // rounding: last positive weight
    weights.iter().rposition(|&w| w > 0.0)
}

/// Draws a coloring of `K_n`: each vertex picks a block by block weight,
/// each edge picks a color by the cell values of its endpoint blocks.
///
/// Cells that are zero in every color (the diagonal of an associated
/// graphon) get a uniform color.
pub fn sample_coloring<T: Scalar>(w: &StepColoringGraphon<T>, n: usize, seed: u64) -> Result<EdgeColoring> {
    sample_with(w, n, &mut rng_for(seed, 0))
}

fn sample_with<T: Scalar>(w: &StepColoringGraphon<T>, n: usize, rng: &mut ChaCha8Rng) -> Result<EdgeColoring> {
    if n < 2 {
        return Err(Error::Precondition("sampling needs n >= 2".into()));
    }
    let weights: Vec<f64> = w.block_weights().iter().map(|x| x.to_f64().unwrap_or(0.0)).collect();
    let cells: Vec<Vec<Vec<f64>>> = (0..w.q())
        .map(|a| {
            (0..w.q())
                .map(|b| (0..w.r()).map(|i| w.value(i, a, b).to_f64().unwrap_or(0.0)).collect())
                .collect()
        })
        .collect();
    let blocks: Vec<usize> = (0..n).map(|_| pick(&weights, rng).expect("weights are positive")).collect();
    let r = w.r();
    EdgeColoring::from_fn(n, r, |u, v| {
        pick(&cells[blocks[u]][blocks[v]], rng).unwrap_or_else(|| rng.gen_range(0..r as u32) as usize)
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleReport {
    pub n: usize,
    /// Copy samples drawn.
    pub trials: u64,
    pub batches: u64,
    pub rainbow: u64,
    pub empirical_mean: Rational,
    pub exact_target: Rational,
    pub standard_error_bound: Rational,
    /// `e(h) v(h) / n`.
    pub bias_allowance: Rational,
}

impl SampleReport {
    /// `|mean - target| <= sigmas * se + bias`.
    pub fn within(&self, sigmas: u64) -> bool {
        let diff = (&self.empirical_mean - &self.exact_target).abs();
        diff <= Rational::from_integer(BigInt::from(sigmas)) * &self.standard_error_bound + &self.bias_allowance
    }
}

trait Abs {
    fn abs(&self) -> Self;
}

impl Abs for Rational {
    fn abs(&self) -> Self {
        num_traits::Signed::abs(self)
    }
}

/// Monte Carlo estimate of the rainbow density of `h` in colorings sampled
/// from `w`.
///
/// `trials` copies are split across up to [`DEFAULT_BATCHES`] batches; each
/// batch samples one coloring of `K_n` and checks uniformly random injective
/// vertex tuples. The standard error comes from the spread of batch means.
pub fn estimate_density(
    h: &Graph,
    w: &StepColoringGraphon<Rational>,
    n: usize,
    trials: u64,
    seed: u64,
    density_budget: u128,
) -> Result<SampleReport> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let v = h.n_vertices();
    if v > n {
        return Err(Error::Precondition(format!("pattern has {v} vertices, K_{n} is too small")));
    }
    let exact_target = rainbow_density(h, w, density_budget)?.value;
    let batches = DEFAULT_BATCHES.min(trials);
    let per_batch: Vec<u64> = (0..batches)
        .map(|b| trials / batches + u64::from(b < trials % batches))
        .collect();

    let hits: Vec<u64> = (0..batches)
        .into_par_iter()
        .map(|b| -> Result<u64> {
            let mut rng = rng_for(seed, b);
            let c = sample_with(w, n, &mut rng)?;
            let mut image = vec![0usize; v];
            let mut hits = 0u64;
            for _ in 0..per_batch[b as usize] {
                for i in 0..v {
                    image[i] = loop {
                        let x = rng.gen_range(0..n as u64) as usize;
                        if !image[..i].contains(&x) {
                            break x;
                        }
                    };
                }
                let mut seen = 0u64;
                let rainbow = h.edges().iter().all(|&(a, bb)| {
                    let bit = 1u64 << c.color(image[a], image[bb]);
                    let fresh = seen & bit == 0;
                    seen |= bit;
                    fresh
                });
                hits += u64::from(rainbow);
            }
            Ok(hits)
        })
        .collect::<Result<_>>()?;

    let rainbow: u64 = hits.iter().sum();
    let empirical_mean = Rational::new(BigInt::from(rainbow), BigInt::from(trials));
    let variance_of_mean = if batches > 1 {
        let means: Vec<Rational> = hits
            .iter()
            .zip(&per_batch)
            .map(|(&x, &m)| Rational::new(BigInt::from(x), BigInt::from(m)))
            .collect();
        let avg = means.iter().fold(Rational::zero(), |a, x| a + x) / Rational::from_integer(BigInt::from(batches));
        let ss = means.iter().fold(Rational::zero(), |a, x| {
            let d = x - &avg;
            a + &d * &d
        });
        ss / Rational::from_integer(BigInt::from(batches * (batches - 1)))
    } else {
        let p = empirical_mean.clone();
        &p * (Rational::from_integer(1.into()) - &p) / Rational::from_integer(BigInt::from(trials))
    };
    Ok(SampleReport {
        n,
        trials,
        batches,
        rainbow,
        empirical_mean,
        exact_target,
        standard_error_bound: sqrt_upper_bound(&variance_of_mean),
        bias_allowance: Rational::new(BigInt::from(h.n_edges() * v), BigInt::from(n)),
    })
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub m: usize,
    pub r: usize,
    pub pattern: Graph,
    /// Proposals per restart.
    pub max_steps: u64,
    pub restarts: u64,
    pub seed: u64,
    pub plateau_cap: u32,
}

impl SearchConfig {
    pub const DEFAULT_MAX_STEPS: u64 = 5_000;
    pub const DEFAULT_RESTARTS: u64 = 16;
    pub const DEFAULT_SEED: u64 = 2022;

    pub fn new(pattern: Graph, m: usize, r: usize) -> Self {
        SearchConfig {
            m,
            r,
            pattern,
            max_steps: Self::DEFAULT_MAX_STEPS,
            restarts: Self::DEFAULT_RESTARTS,
            seed: Self::DEFAULT_SEED,
            plateau_cap: PLATEAU_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub best: EdgeColoring,
    pub count: RainbowCount,
    pub threshold: Rational,
    pub beats_threshold: bool,
    /// Restart that produced `best`.
    pub restart: u64,
}

/// Hill climbing with restarts over single-edge recolorings.
///
/// A move recolors a uniformly random edge to a uniformly random different
/// color and is kept when the rainbow count does not drop. After
/// `plateau_cap` consecutive equal-count moves only strict gains are kept
/// until the next gain.
pub fn local_search(cfg: &SearchConfig) -> Result<SearchResult> {
    if cfg.r == 0 || cfg.r > crate::coloring::MAX_COLORS || cfg.m < 2 {
        return Err(Error::Precondition("search needs 1 <= r <= 64 and m >= 2".into()));
    }
    if cfg.restarts == 0 {
        return Err(Error::Precondition("restarts must be at least 1".into()));
    }
    let threshold = blowup_threshold(&cfg.pattern, cfg.r, cfg.m)?;
    let pairs = pair_count(cfg.m);
    if cfg.m < cfg.pattern.n_vertices() {
        // no copies fit; any coloring is optimal
        let best = EdgeColoring::from_vec(cfg.m, cfg.r, vec![0; pairs])?;
        return Ok(SearchResult {
            best,
            count: RainbowCount::empty(),
            beats_threshold: Rational::zero() > threshold,
            threshold,
            restart: 0,
        });
    }
    let index = CopyIndex::new(&cfg.pattern, cfg.m)?;

    let runs: Vec<(u64, u64, EdgeColoring)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng = rng_for(cfg.seed, restart);
            let mut colors: Vec<u8> = (0..pairs).map(|_| rng.gen_range(0..cfg.r as u32) as u8).collect();
            let start = EdgeColoring::from_vec(cfg.m, cfg.r, colors.clone()).expect("colors below r");
            let mut current = index.count(&start);
            let mut best = (current, colors.clone());
            let mut plateau = 0u32;
            if cfg.r >= 2 {
                for _ in 0..cfg.max_steps {
                    let pair = rng.gen_range(0..pairs as u64) as usize;
                    let old = colors[pair];
                    let shift = rng.gen_range(1..cfg.r as u32) as u8;
                    let new = (old + shift) % cfg.r as u8;
                    let before = index.count_through(&colors, pair);
                    colors[pair] = new;
                    let after = index.count_through(&colors, pair);
                    let keep = match after.cmp(&before) {
                        std::cmp::Ordering::Greater => {
                            plateau = 0;
                            true
                        }
                        std::cmp::Ordering::Equal if plateau < cfg.plateau_cap => {
                            plateau += 1;
                            true
                        }
                        _ => false,
                    };
                    if keep {
                        current = current + after - before;
                        if current > best.0 {
                            best = (current, colors.clone());
                        }
                    } else {
                        colors[pair] = old;
                    }
                }
            }
            let c = EdgeColoring::from_vec(cfg.m, cfg.r, best.1).expect("colors below r");
            (restart, best.0, c)
        })
        .collect();

    let (restart, claimed, best) = runs
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .expect("at least one restart");
    let count = count_rainbow(&cfg.pattern, &best)?;
    assert_eq!(count.copies, claimed, "incremental count drifted from a full recount");
    let beats_threshold = Rational::from_integer(BigInt::from(count.copies)) > threshold;
    Ok(SearchResult {
        best,
        count,
        threshold,
        beats_threshold,
        restart,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blowup::fixture_k5;
    use crate::scalar::rational;

    #[test]
    fn reproducible_samples() {
        let w = StepColoringGraphon::<Rational>::uniform(3).unwrap();
        let a = sample_coloring(&w, 12, 7).unwrap();
        let b = sample_coloring(&w, 12, 7).unwrap();
        let c = sample_coloring(&w, 12, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn associated_sample_keeps_colors_across_blocks() {
        let seed_col = fixture_k5();
        let w = StepColoringGraphon::<Rational>::associated(&seed_col).unwrap();
        let mut checked = 0;
        for seed in 0..40 {
            let mut rng = rng_for(seed, 0);
            // replay the block draws to know each vertex's block
            let weights = vec![0.2; 5];
            let blocks: Vec<usize> = (0..5).map(|_| pick(&weights, &mut rng).unwrap()).collect();
            let c = sample_coloring(&w, 5, seed).unwrap();
            for v in 0..5 {
                for u in 0..v {
                    if blocks[u] != blocks[v] {
                        assert_eq!(c.color(u, v), seed_col.color(blocks[u], blocks[v]));
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn too_few_colors_gives_zero() {
        let w = StepColoringGraphon::<Rational>::uniform(2).unwrap();
        let rep = estimate_density(&Graph::cycle(3).unwrap(), &w, 20, 500, 1, 1 << 30).unwrap();
        assert_eq!(rep.rainbow, 0);
        assert_eq!(rep.empirical_mean, rational(0, 1));
    }

    #[test]
    fn tiny_search() {
        let cfg = SearchConfig::new(Graph::cycle(3).unwrap(), 3, 3);
        let res = local_search(&cfg).unwrap();
        assert_eq!(res.count.copies, 1);
        let c3_in_k2 = SearchConfig::new(Graph::cycle(3).unwrap(), 2, 3);
        let res = local_search(&c3_in_k2).unwrap();
        assert_eq!(res.count.copies, 0);
        assert!(!res.beats_threshold);
    }
}
