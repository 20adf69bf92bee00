//! Monte Carlo market simulation: buyers arrive one by one with i.i.d.
//! uniform estimation biases and buy from the payoff-maximizing seller
//! with spare capacity. Identical inputs produce bit-identical output:
//! every (replication, buyer) pair owns its own RNG stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{BuyerOutcome, Choice, ConfigError, MarketConfig, StrategyProfile};
use crate::duopoly::buyer_payoff;

const CHUNK: u64 = 4096;

/// RNG for one buyer in one replication.
fn buyer_rng(seed: u64, replication: u64, buyer: usize) -> ChaCha8Rng {
    debug_assert!(replication < (1 << 32) && (buyer as u64) < (1 << 32));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((replication << 32) | buyer as u64);
    rng
}

/// Everything one market replication produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Replication {
    pub units: Vec<u32>,
    pub profit: Vec<f64>,
    /// Fractional selection credit per seller: each buyer contributes
    /// `1/|argmax|` to every payoff-maximizing available seller, so ties
    /// are valued at their selection probability.
    pub credit: Vec<f64>,
    pub exits: u32,
    pub outcomes: Vec<BuyerOutcome>,
}

/// Runs the K buyers against given biases and tie-break choices.
/// `tie(buyer, m)` picks an index below `m` among tied sellers.
pub fn allocate(
    cfg: &MarketConfig,
    profile: &StrategyProfile,
    biases: &[f64],
    mut tie: impl FnMut(usize, usize) -> usize,
) -> Replication {
    let n = cfg.n_sellers();
    let mut remaining: Vec<u64> = cfg.sellers.iter().map(|s| s.capacity.units_for(cfg.k)).collect();
    let mut units = vec![0u32; n];
    let mut credit = vec![0.0f64; n];
    let mut exits = 0u32;
    let mut outcomes = Vec::with_capacity(biases.len());
    for (b, &eps) in biases.iter().enumerate() {
        let mut best = f64::NEG_INFINITY;
        for (i, s) in cfg.sellers.iter().enumerate() {
            if remaining[i] == 0 {
                continue;
            }
            let u = buyer_payoff(profile.alpha[i], s.quality, profile.prices[i], cfg.q0, eps);
            if u > best {
                best = u;
            }
        }
        if best < 0.0 || best == f64::NEG_INFINITY {
            exits += 1;
            outcomes.push(BuyerOutcome { choice: Choice::Exit, bias: eps, payoff: 0.0 });
            continue;
        }
        let winners: Vec<usize> = cfg
            .sellers
            .iter()
            .enumerate()
            .filter(|(i, s)| {
                remaining[*i] > 0
                    && buyer_payoff(profile.alpha[*i], s.quality, profile.prices[*i], cfg.q0, eps)
                        == best
            })
            .map(|(i, _)| i)
            .collect();
        let share = 1.0 / winners.len() as f64;
        for &w in &winners {
            credit[w] += share;
        }
        let chosen = if winners.len() == 1 { winners[0] } else { winners[tie(b, winners.len())] };
        remaining[chosen] -= 1;
        units[chosen] += 1;
        outcomes.push(BuyerOutcome {
            choice: Choice::Seller(cfg.sellers[chosen].id),
            bias: eps,
            payoff: best,
        });
    }
    let profit: Vec<f64> = (0..n)
        .map(|i| {
            profile.prices[i] * f64::from(units[i]) - cfg.sellers[i].cost * profile.alpha[i]
        })
        .collect();
    Replication { units, profit, credit, exits, outcomes }
}

/// One seeded replication: K buyers, each with its own bias draw and
/// tie-break stream.
pub fn simulate_replication(
    cfg: &MarketConfig,
    profile: &StrategyProfile,
    seed: u64,
    replication: u64,
) -> Replication {
    let biases: Vec<f64> = (0..cfg.k)
        .map(|b| {
            let mut rng = buyer_rng(seed, replication, b);
            (2.0 * rng.gen::<f64>() - 1.0) * cfg.eps0
        })
        .collect();
    allocate(cfg, profile, &biases, |b, m| {
        let mut rng = buyer_rng(seed, replication, b);
        let _ = rng.gen::<f64>(); // bias draw
        rng.gen_range(0..m)
    })
}

/// Streaming mean/variance accumulator with a deterministic merge.
#[derive(Debug, Clone)]
struct Welford {
    n: f64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Welford {
    fn new(dim: usize) -> Self {
        Welford { n: 0.0, mean: vec![0.0; dim], m2: vec![0.0; dim] }
    }

    fn push(&mut self, x: &[f64]) {
        self.n += 1.0;
        for (i, &v) in x.iter().enumerate() {
            let d = v - self.mean[i];
            self.mean[i] += d / self.n;
            self.m2[i] += d * (v - self.mean[i]);
        }
    }

    fn merge(&mut self, other: &Welford) {
        if other.n == 0.0 {
            return;
        }
        if self.n == 0.0 {
            *self = other.clone();
            return;
        }
        let n = self.n + other.n;
        for i in 0..self.mean.len() {
            let d = other.mean[i] - self.mean[i];
            self.mean[i] += d * other.n / n;
            self.m2[i] += other.m2[i] + d * d * self.n * other.n / n;
        }
        self.n = n;
    }

    fn se(&self, i: usize) -> f64 {
        if self.n < 2.0 {
            return f64::INFINITY;
        }
        (self.m2[i] / (self.n - 1.0) / self.n).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SellerStats {
    pub id: usize,
    pub mean_units: f64,
    pub mean_profit: f64,
    pub profit_se: f64,
    /// Mean per-buyer selection probability (fractional tie credit).
    pub selection_frequency: f64,
    pub frequency_se: f64,
}

/// Replication means and standard errors for a fixed strategy profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimSummary {
    pub seed: u64,
    pub draws: u64,
    pub buyers: usize,
    pub sellers: Vec<SellerStats>,
    pub exit_frequency: f64,
    pub mean_units_total: f64,
}

/// Runs `draws` replications and aggregates. Replications are computed in
/// parallel; the aggregation order is fixed, so results are bit-identical
/// across runs and thread counts.
pub fn simulate(
    cfg: &MarketConfig,
    profile: &StrategyProfile,
    seed: u64,
    draws: u64,
) -> Result<SimSummary, ConfigError> {
    cfg.validate()?;
    profile.validate(cfg)?;
    if draws == 0 {
        return Err(ConfigError::NotFinite("draws"));
    }
    let n = cfg.n_sellers();
    // Per chunk: Welford over [profit | credit | units], plus exits.
    let chunks: Vec<(Welford, u64)> = (0..draws.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk_idx| {
            let lo = chunk_idx * CHUNK;
            let hi = (lo + CHUNK).min(draws);
            let mut acc = Welford::new(3 * n);
            let mut exits = 0u64;
            let mut row = vec![0.0f64; 3 * n];
            for rep in lo..hi {
                let r = simulate_replication(cfg, profile, seed, rep);
                for i in 0..n {
                    row[i] = r.profit[i];
                    row[n + i] = r.credit[i];
                    row[2 * n + i] = f64::from(r.units[i]);
                }
                acc.push(&row);
                exits += u64::from(r.exits);
            }
            (acc, exits)
        })
        .collect();
    let mut acc = Welford::new(3 * n);
    let mut exits = 0u64;
    for (chunk, chunk_exits) in &chunks {
        acc.merge(chunk);
        exits += chunk_exits;
    }
    let k = cfg.k as f64;
    let sellers = (0..n)
        .map(|i| SellerStats {
            id: cfg.sellers[i].id,
            mean_units: acc.mean[2 * n + i],
            mean_profit: acc.mean[i],
            profit_se: acc.se(i),
            selection_frequency: acc.mean[n + i] / k,
            frequency_se: acc.se(n + i) / k,
        })
        .collect();
    Ok(SimSummary {
        seed,
        draws,
        buyers: cfg.k,
        sellers,
        exit_frequency: exits as f64 / (draws as f64 * k),
        mean_units_total: (0..n).map(|i| acc.mean[2 * n + i]).sum(),
    })
}

/// Per-seller selection-frequency estimates with standard errors.
pub fn estimate_win_probabilities(
    cfg: &MarketConfig,
    profile: &StrategyProfile,
    seed: u64,
    draws: u64,
) -> Result<SimSummary, ConfigError> {
    if draws < 100 {
        return Err(ConfigError::NotFinite("draws (need >= 100)"));
    }
    simulate(cfg, profile, seed, draws)
}
