//! Brute-force machinery, independent of the closed forms it checks:
//! discretized best-response search, equilibrium verification by exhaustive
//! unilateral-deviation scans, and numeric derivation of behavior patterns
//! and cost thresholds.
//!
//! Payoffs are evaluated exactly: the two-seller game integrates the
//! uniform bias in closed form (with the exit option), and the N-seller
//! game uses an exact dynamic program over the order in which sellers'
//! capacities are depleted.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::config::{MarketConfig, StrategyProfile, DEFAULT_TOL};
use crate::duopoly::{
    self, expected_profits_unchecked, pricing_formulas, Pattern, PricingOutcome,
};

/// Discretization used by all grid searches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub price_step: f64,
    pub price_ceiling: f64,
    pub alpha_step: f64,
    /// A unilateral deviation counts as profitable when its gain exceeds
    /// this. Scales with the price step so refining the grid tightens
    /// verification.
    pub deviation_tol: f64,
}

impl GridSpec {
    /// Defaults sized to a config: price step 0.01, alpha step 0.05,
    /// deviation tolerance `2 * price_step * price_ceiling`. The ceiling
    /// covers every price a seller could ever sell at: one unit above both
    /// the best quality edge over the prior and the prior itself (a
    /// zero-disclosure seller can capture up to the buyer's estimate).
    pub fn for_config(cfg: &MarketConfig) -> GridSpec {
        let q_max = cfg.sellers.iter().map(|s| s.quality).fold(0.0f64, f64::max);
        let ceiling = (q_max - cfg.q0 + 3.0 * cfg.eps0)
            .max(cfg.q0 + cfg.eps0)
            .max(0.0)
            + 1.0;
        GridSpec::with_steps(0.01, ceiling, 0.05)
    }

    pub fn with_steps(price_step: f64, price_ceiling: f64, alpha_step: f64) -> GridSpec {
        assert!(price_step > 0.0 && alpha_step > 0.0 && price_ceiling > 0.0);
        GridSpec {
            price_step,
            price_ceiling,
            alpha_step,
            deviation_tol: 2.0 * price_step * price_ceiling,
        }
    }

    /// Same grid with both steps halved (and the tolerance tightened).
    pub fn refined(&self) -> GridSpec {
        GridSpec::with_steps(self.price_step / 2.0, self.price_ceiling, self.alpha_step / 2.0)
    }

    fn price_points(&self) -> usize {
        (self.price_ceiling / self.price_step).ceil() as usize + 1
    }

    fn price_at(&self, idx: usize) -> f64 {
        (idx as f64 * self.price_step).min(self.price_ceiling)
    }

    fn alpha_points(&self) -> usize {
        (1.0 / self.alpha_step).round() as usize + 1
    }

    fn alpha_at(&self, idx: usize) -> f64 {
        let n = self.alpha_points() - 1;
        idx as f64 / n as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    /// Best-response iteration hit the sweep cap without a fixed point or
    /// cycle.
    NoConvergence { sweeps: usize },
    /// The verified corner set matches none of the four patterns.
    NoPatternMatch { verified: Vec<String> },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            OracleError::NoConvergence { sweeps } => {
                write!(f, "price iteration did not settle after {sweeps} sweeps")
            }
            OracleError::NoPatternMatch { verified } => {
                write!(f, "verified corner set {{{}}} matches no pattern", verified.join(", "))
            }
        }
    }
}

impl std::error::Error for OracleError {}

// ---------------------------------------------------------------------------
// Exact payoff evaluators
// ---------------------------------------------------------------------------

/// Seller `i`'s expected profit in the two-seller, one-buyer game at an
/// arbitrary strategy profile, integrating the uniform bias exactly and
/// honoring the buyer's exit option.
pub fn duo_expected_profit(
    alpha: [f64; 2],
    prices: [f64; 2],
    q: [f64; 2],
    c: [f64; 2],
    cfg: &MarketConfig,
    i: usize,
) -> f64 {
    let j = 1 - i;
    let gap = duopoly::expected_quality_gap(alpha[i], alpha[j], q[i], q[j], cfg.q0);
    let margin = gap - (prices[i] - prices[j]);
    let d_alpha = alpha[i] - alpha[j];
    let base = alpha[i] * q[i] + (1.0 - alpha[i]) * cfg.q0 - prices[i];
    let slope = 1.0 - alpha[i];
    let eps0 = cfg.eps0;
    let cost = c[i] * alpha[i];

    if eps0 == 0.0 {
        // Point-mass bias: the comparison is deterministic, ties split.
        let win = if margin > 0.0 {
            1.0
        } else if margin == 0.0 {
            0.5
        } else {
            0.0
        };
        let p = if base >= 0.0 { win } else { 0.0 };
        return prices[i] * p - cost;
    }

    // Feasible-bias interval where seller i both wins and offers a
    // nonnegative payoff.
    let mut lo = -eps0;
    let mut hi = eps0;
    let mut half_weight = false;
    if d_alpha > 0.0 {
        hi = hi.min(margin / d_alpha);
    } else if d_alpha < 0.0 {
        lo = lo.max(margin / d_alpha);
    } else if margin < 0.0 {
        return -cost;
    } else if margin == 0.0 {
        half_weight = true;
    }
    if slope > 0.0 {
        lo = lo.max(-base / slope);
    } else if base < 0.0 {
        return -cost;
    }
    let len = (hi - lo).max(0.0);
    let mut prob = len / (2.0 * eps0);
    if half_weight {
        prob *= 0.5;
    }
    prices[i] * prob - cost
}

/// Expected units sold by every seller in the N-seller game with binary
/// disclosure, K sequentially arriving buyers, and capacities.
///
/// Disclosers offer the bias-free payoff `q_i - p_i`, so every buyer ranks
/// them identically and their capacities deplete in a fixed order; the
/// non-disclosers deplete in ascending price order. The distribution over
/// (discloser units sold, non-discloser units sold) is then a small exact
/// dynamic program.
pub fn n_expected_units(cfg: &MarketConfig, alpha: &[f64], prices: &[f64]) -> Vec<f64> {
    let k = cfg.k;
    let n = cfg.n_sellers();
    debug_assert!(alpha.iter().all(|&a| a == 0.0 || a == 1.0));

    // (seller index, buyer value, units), disclosers sorted by value desc.
    let mut disc: Vec<(usize, f64, u64)> = Vec::new();
    let mut nond: Vec<(usize, f64, u64)> = Vec::new();
    for (idx, s) in cfg.sellers.iter().enumerate() {
        let units = s.capacity.units_for(k);
        if alpha[idx] == 1.0 {
            disc.push((idx, s.quality - prices[idx], units));
        } else {
            nond.push((idx, prices[idx], units));
        }
    }
    disc.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    nond.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));

    // Per-position lookups, positions capped at K (no buyer can reach
    // beyond the K-th unit of either queue).
    let s_max = disc.iter().map(|d| d.2).sum::<u64>().min(k as u64) as usize;
    let m_max = nond.iter().map(|d| d.2).sum::<u64>().min(k as u64) as usize;
    let mut disc_val = vec![0.0; s_max];
    let mut disc_owner_group = vec![usize::MAX; s_max];
    {
        let mut pos = 0usize;
        'outer: for (g, d) in disc.iter().enumerate() {
            for _ in 0..d.2 {
                if pos >= s_max {
                    break 'outer;
                }
                disc_val[pos] = d.1;
                disc_owner_group[pos] = g;
                pos += 1;
            }
        }
    }
    let mut nond_price = vec![0.0; m_max];
    let mut nond_owner_group = vec![usize::MAX; m_max];
    {
        let mut pos = 0usize;
        'outer: for (g, d) in nond.iter().enumerate() {
            for _ in 0..d.2 {
                if pos >= m_max {
                    break 'outer;
                }
                nond_price[pos] = d.1;
                nond_owner_group[pos] = g;
                pos += 1;
            }
        }
    }

    let eps0 = cfg.eps0;
    // P(bias < x).
    let cdf = |x: f64| -> f64 {
        if eps0 == 0.0 {
            if x > 0.0 {
                1.0
            } else if x == 0.0 {
                0.5
            } else {
                0.0
            }
        } else {
            ((x + eps0) / (2.0 * eps0)).clamp(0.0, 1.0)
        }
    };

    // Fast path: equal-priced non-disclosers that cannot run dry. Only the
    // discloser-queue position matters, so the state space is linear.
    let nd_total: u64 = nond.iter().map(|d| d.2).sum();
    if nd_total >= k as u64 && nond.windows(2).all(|w| w[0].1 == w[1].1) && !nond.is_empty() {
        let pn = nond[0].1;
        let mut prob = vec![0.0f64; s_max + 1];
        prob[0] = 1.0;
        let mut next = vec![0.0f64; s_max + 1];
        let mut expected_exits = 0.0f64;
        let p_exit_no_disc = cdf(pn - cfg.q0);
        for _ in 0..k {
            next.iter_mut().for_each(|p| *p = 0.0);
            for s in 0..=s_max {
                let p = prob[s];
                if p == 0.0 {
                    continue;
                }
                let (p_disc, p_exit) = if s < s_max && disc_val[s] >= 0.0 {
                    (cdf(disc_val[s] - cfg.q0 + pn), 0.0)
                } else {
                    (0.0, p_exit_no_disc)
                };
                expected_exits += p * p_exit;
                if p_disc > 0.0 {
                    next[s + 1] += p * p_disc;
                }
                next[s] += p * (1.0 - p_disc);
            }
            std::mem::swap(&mut prob, &mut next);
        }
        let mut units = vec![0.0f64; n];
        let mut tail_gt = vec![0.0f64; s_max.max(1)];
        let mut running = 0.0;
        for r in (0..s_max).rev() {
            running += prob[r + 1];
            tail_gt[r] = running;
        }
        let mut group_expected = vec![0.0f64; disc.len()];
        for r in 0..s_max {
            group_expected[disc_owner_group[r]] += tail_gt[r];
        }
        split_tied(&disc, &group_expected, &mut units);
        let disc_units: f64 = group_expected.iter().sum();
        let nd_units = (k as f64 - disc_units - expected_exits).max(0.0);
        let cap_sum: f64 = nond.iter().map(|d| d.2 as f64).sum();
        for d in &nond {
            units[d.0] = nd_units * (d.2 as f64) / cap_sum;
        }
        return units;
    }

    let width = m_max + 1;
    let mut prob = vec![0.0f64; (s_max + 1) * width];
    prob[0] = 1.0;
    let mut next = vec![0.0f64; (s_max + 1) * width];
    for _ in 0..k {
        next.iter_mut().for_each(|p| *p = 0.0);
        for s in 0..=s_max {
            for m in 0..=m_max {
                let p = prob[s * width + m];
                if p == 0.0 {
                    continue;
                }
                let disc_avail = s < s_max;
                let nd_avail = m < m_max;
                let (p_disc, p_nd) = match (disc_avail, nd_avail) {
                    (true, true) => {
                        let v = disc_val[s];
                        if v < 0.0 {
                            // Buyer never takes a negative-payoff seller;
                            // takes the non-discloser when that payoff is
                            // nonnegative, otherwise exits.
                            (0.0, 1.0 - cdf(nond_price[m] - cfg.q0))
                        } else {
                            let take_disc = cdf(v - cfg.q0 + nond_price[m]);
                            (take_disc, 1.0 - take_disc)
                        }
                    }
                    (true, false) => {
                        if disc_val[s] >= 0.0 {
                            (1.0, 0.0)
                        } else {
                            (0.0, 0.0)
                        }
                    }
                    (false, true) => (0.0, 1.0 - cdf(nond_price[m] - cfg.q0)),
                    (false, false) => (0.0, 0.0),
                };
                let p_exit = (1.0 - p_disc - p_nd).max(0.0);
                if p_disc > 0.0 {
                    next[(s + 1) * width + m] += p * p_disc;
                }
                if p_nd > 0.0 {
                    next[s * width + m + 1] += p * p_nd;
                }
                if p_exit > 0.0 {
                    next[s * width + m] += p * p_exit;
                }
            }
        }
        std::mem::swap(&mut prob, &mut next);
    }

    // Marginal distributions of units sold from each queue.
    let mut s_tail = vec![0.0f64; s_max + 1];
    let mut m_tail = vec![0.0f64; m_max + 1];
    for s in 0..=s_max {
        for m in 0..=m_max {
            let p = prob[s * width + m];
            if p > 0.0 {
                s_tail[s] += p;
                m_tail[m] += p;
            }
        }
    }
    // E[units at queue position r] = P(final count > r), accumulated per
    // owner; sellers tied on buyer value pool and split by capacity.
    let mut units = vec![0.0f64; n];
    let mut group_expected = vec![0.0f64; disc.len()];
    let mut tail_gt = vec![0.0f64; s_max.max(1)];
    let mut running = 0.0;
    for r in (0..s_max).rev() {
        running += s_tail[r + 1];
        tail_gt[r] = running;
    }
    for r in 0..s_max {
        group_expected[disc_owner_group[r]] += tail_gt[r];
    }
    split_tied(&disc, &group_expected, &mut units);

    let mut nd_tail_gt = vec![0.0f64; m_max.max(1)];
    let mut running = 0.0;
    for r in (0..m_max).rev() {
        running += m_tail[r + 1];
        nd_tail_gt[r] = running;
    }
    let mut nd_group_expected = vec![0.0f64; nond.len()];
    for r in 0..m_max {
        nd_group_expected[nond_owner_group[r]] += nd_tail_gt[r];
    }
    split_tied(&nond, &nd_group_expected, &mut units);
    units
}

/// Pools expected units across sellers tied on the sort key and splits the
/// pool in proportion to capacity (buyers pick among ties at random).
fn split_tied(queue: &[(usize, f64, u64)], expected: &[f64], units: &mut [f64]) {
    let mut g = 0;
    while g < queue.len() {
        let mut end = g + 1;
        while end < queue.len() && queue[end].1 == queue[g].1 {
            end += 1;
        }
        if end - g == 1 {
            units[queue[g].0] = expected[g];
        } else {
            let total: f64 = expected[g..end].iter().sum();
            let cap_sum: f64 = queue[g..end].iter().map(|d| d.2 as f64).sum();
            for d in &queue[g..end] {
                units[d.0] = total * (d.2 as f64) / cap_sum;
            }
        }
        g = end;
    }
}

/// Seller `i`'s expected profit in the N-seller game: income over all K
/// buyers minus the once-per-game disclosure cost.
pub fn n_expected_profit(cfg: &MarketConfig, alpha: &[f64], prices: &[f64], i: usize) -> f64 {
    let units = n_expected_units(cfg, alpha, prices);
    prices[i] * units[i] - cfg.sellers[i].cost * alpha[i]
}

fn is_duo_game(cfg: &MarketConfig) -> bool {
    cfg.n_sellers() == 2 && cfg.k == 1
}

fn profit_of(cfg: &MarketConfig, alpha: &[f64], prices: &[f64], i: usize) -> f64 {
    if is_duo_game(cfg) {
        let q = [cfg.sellers[0].quality, cfg.sellers[1].quality];
        let c = [cfg.sellers[0].cost, cfg.sellers[1].cost];
        duo_expected_profit(
            [alpha[0], alpha[1]],
            [prices[0], prices[1]],
            q,
            c,
            cfg,
            i,
        )
    } else {
        n_expected_profit(cfg, alpha, prices, i)
    }
}

// ---------------------------------------------------------------------------
// Best-response search and the numeric pricing fixed point
// ---------------------------------------------------------------------------

/// Grid argmax of seller `i`'s expected profit in price, holding everyone
/// else fixed. Ties break toward the lower price.
pub fn best_response_price(
    i: usize,
    profile: &StrategyProfile,
    cfg: &MarketConfig,
    grid: &GridSpec,
) -> f64 {
    let mut prices = profile.prices.clone();
    let mut best_p = 0.0;
    let mut best_v = f64::NEG_INFINITY;
    for idx in 0..grid.price_points() {
        let p = grid.price_at(idx);
        prices[i] = p;
        let v = profit_of(cfg, &profile.alpha, &prices, i);
        if v > best_v + 1e-15 {
            best_v = v;
            best_p = p;
        }
    }
    best_p
}

/// Why no pure pricing fixed point was reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Instability {
    /// Best responses revisit earlier price vectors without settling.
    Cycle,
    /// A fixed point exists on the grid but sits against a payoff
    /// discontinuity: the continuum supremum is not attained (undercutting
    /// never settles).
    KnifeEdge,
}

/// Result of iterated best responses on the price grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum NumericPricing {
    Converged(Vec<f64>),
    Unstable(Instability),
}

fn price_indices(prices: &[f64], grid: &GridSpec) -> Vec<u32> {
    prices.iter().map(|p| (p / grid.price_step).round() as u32).collect()
}

/// A zero-priced non-discloser whose zero-priced rivals can already serve
/// every buyer sells nothing at any positive price, so zero is exactly a
/// best response and the scan can be skipped.
fn pinned_nondiscloser(cfg: &MarketConfig, alpha: &[f64], prices: &[f64], j: usize) -> bool {
    if alpha[j] != 0.0 || prices[j] != 0.0 {
        return false;
    }
    let rival_units: u64 = cfg
        .sellers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != j && alpha[i] == 0.0 && prices[i] == 0.0)
        .map(|(_, s)| s.capacity.units_for(cfg.k))
        .sum();
    rival_units >= cfg.k as u64
}

/// Detects a winner-take-all discontinuity right above seller `i`'s best
/// fine-grained price: the signature of a pricing game whose supremum is
/// approached but never attained.
fn knife_edge(i: usize, alpha: &[f64], prices: &[f64], cfg: &MarketConfig, grid: &GridSpec) -> bool {
    if cfg.eps0 == 0.0 {
        // Degenerate bias makes every profile an indicator game; the grid
        // fixed point stands in for the limiting equilibrium.
        return false;
    }
    let fine = grid.price_step / 32.0;
    let center = prices[i];
    let lo = (center - 2.0 * grid.price_step).max(0.0);
    let hi = center + 2.0 * grid.price_step;
    let mut work = prices.to_vec();
    let mut best_p = lo;
    let mut best_v = f64::NEG_INFINITY;
    let steps = ((hi - lo) / fine).round() as usize;
    for s in 0..=steps {
        let p = lo + s as f64 * fine;
        work[i] = p;
        let v = profit_of(cfg, alpha, &work, i);
        if v > best_v + 1e-15 {
            best_v = v;
            best_p = p;
        }
    }
    if best_v <= 1e-9 {
        return false;
    }
    work[i] = best_p + fine;
    let after = profit_of(cfg, alpha, &work, i);
    best_v - after > 0.2 * best_v.abs()
}

/// Iterated best responses over the price grid from several starts until a
/// fixed point or a cycle. A grid fixed point pinned against a payoff
/// discontinuity is reported as unstable rather than as an equilibrium.
pub fn numeric_price_equilibrium(
    alpha: &[f64],
    cfg: &MarketConfig,
    grid: &GridSpec,
) -> Result<NumericPricing, OracleError> {
    let n = cfg.n_sellers();
    let guess: Vec<f64> = if n == 2 {
        match pricing_formulas(
            [alpha[0], alpha[1]],
            [cfg.sellers[0].quality, cfg.sellers[1].quality],
            cfg,
        ) {
            PricingOutcome::Pure { prices, .. } => prices.to_vec(),
            _ => vec![0.0; n],
        }
    } else {
        cfg.sellers
            .iter()
            .enumerate()
            .map(|(i, s)| {
                if alpha[i] == 1.0 {
                    crate::oligopoly::solo_disclosure_price(s.quality, cfg).0
                } else {
                    0.0
                }
            })
            .collect()
    };
    let starts = [vec![0.0; n], guess, vec![grid.price_ceiling; n]];
    let sweep_cap = 4 * grid.price_points() + 64;

    let mut saw_cycle = false;
    let mut saw_knife = false;
    for start in starts {
        let mut prices = start;
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        seen.insert(price_indices(&prices, grid));
        let mut settled = false;
        for _ in 0..sweep_cap {
            let mut changed = false;
            for i in 0..n {
                if pinned_nondiscloser(cfg, alpha, &prices, i) {
                    continue;
                }
                let profile = StrategyProfile::new(alpha.to_vec(), prices.clone());
                let p = best_response_price(i, &profile, cfg, grid);
                if (p - prices[i]).abs() > grid.price_step / 2.0 {
                    changed = true;
                }
                prices[i] = p;
            }
            if !changed {
                settled = true;
                break;
            }
            if !seen.insert(price_indices(&prices, grid)) {
                // Walk the loop once to measure its span.
                let entry = price_indices(&prices, grid);
                let mut lo = prices.clone();
                let mut hi = prices.clone();
                for _ in 0..sweep_cap {
                    for i in 0..n {
                        if pinned_nondiscloser(cfg, alpha, &prices, i) {
                            continue;
                        }
                        let profile = StrategyProfile::new(alpha.to_vec(), prices.clone());
                        prices[i] = best_response_price(i, &profile, cfg, grid);
                    }
                    for i in 0..n {
                        lo[i] = lo[i].min(prices[i]);
                        hi[i] = hi[i].max(prices[i]);
                    }
                    if price_indices(&prices, grid) == entry {
                        break;
                    }
                }
                let span =
                    lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0f64, f64::max);
                if span <= 2.0 * grid.price_step {
                    settled = true;
                } else {
                    saw_cycle = true;
                }
                break;
            }
        }
        if settled {
            let mut pinned = false;
            for i in 0..n {
                if pinned_nondiscloser(cfg, alpha, &prices, i) {
                    continue;
                }
                if knife_edge(i, alpha, &prices, cfg, grid) {
                    pinned = true;
                    break;
                }
            }
            if pinned {
                saw_knife = true;
            } else {
                return Ok(NumericPricing::Converged(prices));
            }
        }
    }
    if saw_knife {
        Ok(NumericPricing::Unstable(Instability::KnifeEdge))
    } else if saw_cycle {
        Ok(NumericPricing::Unstable(Instability::Cycle))
    } else {
        Err(OracleError::NoConvergence { sweeps: sweep_cap })
    }
}

// ---------------------------------------------------------------------------
// Equilibrium verification
// ---------------------------------------------------------------------------

/// A unilateral deviation found by the scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deviation {
    pub seller: usize,
    pub strategy: DeviationStrategy,
    pub gain: f64,
    pub kind: DeviationKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DeviationStrategy {
    Disclosure(f64),
    Price(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DeviationKind {
    /// Strictly profitable beyond the tolerance.
    Strict,
    /// Profit-equivalent but discloses strictly less: a privacy-sensitive
    /// seller walks away from such an equilibrium.
    WeakLessDisclosure,
}

/// Verdict of a deviation scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verification {
    pub verified: bool,
    /// The most profitable (or otherwise invalidating) deviation found.
    pub worst: Option<Deviation>,
}

/// Disclosure-stage value of a two-seller profile under the induced
/// pricing: closed forms for a positive bias, the numeric solver for the
/// degenerate zero-bias benchmark.
fn duo_stage_values(
    alpha: [f64; 2],
    q: [f64; 2],
    c: [f64; 2],
    cfg: &MarketConfig,
    grid: &GridSpec,
) -> [f64; 2] {
    if cfg.eps0 > 0.0 {
        return expected_profits_unchecked(alpha, q, c, cfg);
    }
    match pricing_formulas(alpha, q, cfg) {
        PricingOutcome::ZeroZero => [0.0, 0.0],
        PricingOutcome::NoPureEquilibrium => expected_profits_unchecked(alpha, q, c, cfg),
        PricingOutcome::Pure { .. } => {
            match numeric_price_equilibrium(&[alpha[0], alpha[1]], cfg, grid) {
                Ok(NumericPricing::Converged(p)) => [
                    duo_expected_profit(alpha, [p[0], p[1]], q, c, cfg, 0),
                    duo_expected_profit(alpha, [p[0], p[1]], q, c, cfg, 1),
                ],
                _ => [-c[0] * alpha[0], -c[1] * alpha[1]],
            }
        }
    }
}

/// Scans all gridded unilateral disclosure deviations (with downstream
/// re-pricing) and, when `concept_prices` are given, all price deviations.
/// Returns the first invalidating deviation at `strict_tol`, else the worst
/// gain seen.
fn scan_duo(
    alpha: [f64; 2],
    concept_prices: Option<[f64; 2]>,
    q: [f64; 2],
    c: [f64; 2],
    cfg: &MarketConfig,
    grid: &GridSpec,
    strict_tol: f64,
) -> Verification {
    let tie_eps = DEFAULT_TOL;
    let current = duo_stage_values(alpha, q, c, cfg, grid);
    let mut worst: Option<Deviation> = None;
    let mut note = |d: Deviation| {
        let better = match &worst {
            None => true,
            Some(w) => d.gain > w.gain,
        };
        if better {
            worst = Some(d);
        }
    };

    for i in 0..2 {
        for idx in 0..grid.alpha_points() {
            let a = grid.alpha_at(idx);
            if (a - alpha[i]).abs() < 1e-12 {
                continue;
            }
            let mut dev = alpha;
            dev[i] = a;
            let value = duo_stage_values(dev, q, c, cfg, grid)[i];
            let gain = value - current[i];
            if gain > strict_tol {
                return Verification {
                    verified: false,
                    worst: Some(Deviation {
                        seller: i,
                        strategy: DeviationStrategy::Disclosure(a),
                        gain,
                        kind: DeviationKind::Strict,
                    }),
                };
            }
            if a < alpha[i] - 1e-12 && gain >= -tie_eps {
                return Verification {
                    verified: false,
                    worst: Some(Deviation {
                        seller: i,
                        strategy: DeviationStrategy::Disclosure(a),
                        gain,
                        kind: DeviationKind::WeakLessDisclosure,
                    }),
                };
            }
            note(Deviation {
                seller: i,
                strategy: DeviationStrategy::Disclosure(a),
                gain,
                kind: DeviationKind::Strict,
            });
        }
    }

    if let Some(prices) = concept_prices {
        let base = [
            duo_expected_profit(alpha, prices, q, c, cfg, 0),
            duo_expected_profit(alpha, prices, q, c, cfg, 1),
        ];
        for i in 0..2 {
            for idx in 0..grid.price_points() {
                let p = grid.price_at(idx);
                if (p - prices[i]).abs() < grid.price_step / 4.0 {
                    continue;
                }
                let mut dev = prices;
                dev[i] = p;
                let gain = duo_expected_profit(alpha, dev, q, c, cfg, i) - base[i];
                if gain > strict_tol {
                    return Verification {
                        verified: false,
                        worst: Some(Deviation {
                            seller: i,
                            strategy: DeviationStrategy::Price(p),
                            gain,
                            kind: DeviationKind::Strict,
                        }),
                    };
                }
                note(Deviation {
                    seller: i,
                    strategy: DeviationStrategy::Price(p),
                    gain,
                    kind: DeviationKind::Strict,
                });
            }
        }
    }

    Verification { verified: true, worst }
}

/// Concept prices for a two-seller disclosure pair, used when a candidate
/// profile is verified: the pricing-stage solution when one exists.
fn duo_concept_prices(alpha: [f64; 2], q: [f64; 2], cfg: &MarketConfig, grid: &GridSpec) -> Option<[f64; 2]> {
    if cfg.eps0 == 0.0 {
        if alpha[0] == alpha[1] {
            return if alpha[0] == 0.0 { Some([0.0, 0.0]) } else { None };
        }
        return match numeric_price_equilibrium(&[alpha[0], alpha[1]], cfg, grid) {
            Ok(NumericPricing::Converged(p)) => Some([p[0], p[1]]),
            _ => None,
        };
    }
    pricing_formulas(alpha, q, cfg).prices()
}

/// Verifies a strategy profile: no seller may gain more than the grid's
/// deviation tolerance by any unilateral gridded change of disclosure
/// (with downstream re-pricing) or price, and no seller may cut disclosure
/// at no cost.
pub fn verify_equilibrium(
    profile: &StrategyProfile,
    cfg: &MarketConfig,
    grid: &GridSpec,
) -> Verification {
    verify_equilibrium_at(profile, cfg, grid, grid.deviation_tol)
}

/// [`verify_equilibrium`] with an explicit strict-gain tolerance.
pub fn verify_equilibrium_at(
    profile: &StrategyProfile,
    cfg: &MarketConfig,
    grid: &GridSpec,
    strict_tol: f64,
) -> Verification {
    if is_duo_game(cfg) {
        let q = [cfg.sellers[0].quality, cfg.sellers[1].quality];
        let c = [cfg.sellers[0].cost, cfg.sellers[1].cost];
        let alpha = [profile.alpha[0], profile.alpha[1]];
        let concept = if alpha[0] == alpha[1] && alpha[0] > 0.0 {
            None // no pure pricing stage to deviate within
        } else {
            Some([profile.prices[0], profile.prices[1]])
        };
        scan_duo(alpha, concept, q, c, cfg, grid, strict_tol)
    } else {
        scan_n(profile, cfg, grid, strict_tol)
    }
}

/// N-seller scan: binary disclosure flips (with downstream re-pricing) and
/// price-grid deviations.
fn scan_n(
    profile: &StrategyProfile,
    cfg: &MarketConfig,
    grid: &GridSpec,
    strict_tol: f64,
) -> Verification {
    let n = cfg.n_sellers();
    let tie_eps = DEFAULT_TOL;
    let mut worst: Option<Deviation> = None;
    let current: Vec<f64> =
        (0..n).map(|i| n_expected_profit(cfg, &profile.alpha, &profile.prices, i)).collect();

    for i in 0..n {
        let flipped = if profile.alpha[i] == 1.0 { 0.0 } else { 1.0 };
        let mut alpha = profile.alpha.clone();
        alpha[i] = flipped;
        let value = match reprice_n(&alpha, cfg, grid) {
            Some(prices) => n_expected_profit(cfg, &alpha, &prices, i),
            // Undercutting war: value entry at its floor.
            None => -cfg.sellers[i].cost * flipped,
        };
        let gain = value - current[i];
        let kind = if gain > strict_tol {
            Some(DeviationKind::Strict)
        } else if flipped < profile.alpha[i] && gain >= -tie_eps {
            Some(DeviationKind::WeakLessDisclosure)
        } else {
            None
        };
        let dev = Deviation {
            seller: i,
            strategy: DeviationStrategy::Disclosure(flipped),
            gain,
            kind: kind.unwrap_or(DeviationKind::Strict),
        };
        if kind.is_some() {
            return Verification { verified: false, worst: Some(dev) };
        }
        if worst.as_ref().map_or(true, |w| gain > w.gain) {
            worst = Some(dev);
        }
    }

    let mut prices = profile.prices.clone();
    for i in 0..n {
        let keep = prices[i];
        for idx in 0..grid.price_points() {
            let p = grid.price_at(idx);
            if (p - keep).abs() < grid.price_step / 4.0 {
                continue;
            }
            prices[i] = p;
            let gain = n_expected_profit(cfg, &profile.alpha, &prices, i) - current[i];
            if gain > strict_tol {
                return Verification {
                    verified: false,
                    worst: Some(Deviation {
                        seller: i,
                        strategy: DeviationStrategy::Price(p),
                        gain,
                        kind: DeviationKind::Strict,
                    }),
                };
            }
            if worst.as_ref().map_or(true, |w| gain > w.gain) {
                worst = Some(Deviation {
                    seller: i,
                    strategy: DeviationStrategy::Price(p),
                    gain,
                    kind: DeviationKind::Strict,
                });
            }
        }
        prices[i] = keep;
    }
    Verification { verified: true, worst }
}

/// Stage-I-b prices for a binary N-seller profile: non-disclosers at zero,
/// disclosers from the numeric fixed point. `None` when pricing never
/// settles.
pub fn reprice_n(alpha: &[f64], cfg: &MarketConfig, grid: &GridSpec) -> Option<Vec<f64>> {
    if alpha.iter().all(|&a| a == 0.0) {
        return Some(vec![0.0; alpha.len()]);
    }
    match numeric_price_equilibrium(alpha, cfg, grid) {
        Ok(NumericPricing::Converged(p)) => Some(p),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Pattern derivation
// ---------------------------------------------------------------------------

/// One verified corner equilibrium of the two-seller disclosure game.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CornerEquilibrium {
    pub alpha: [f64; 2],
    pub prices: [f64; 2],
    pub profits: [f64; 2],
}

/// Verifies each corner candidate (only-first, only-second, neither) and
/// returns the surviving ones with their supporting prices and profits.
pub fn verified_corner_equilibria(
    q: [f64; 2],
    c: [f64; 2],
    cfg: &MarketConfig,
    grid: &GridSpec,
    strict_tol: f64,
) -> Vec<CornerEquilibrium> {
    let duo = MarketConfig::duopoly(cfg.q0, cfg.eps0, q, c);
    let mut out = Vec::new();
    for alpha in [[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]] {
        let Some(prices) = duo_concept_prices(alpha, q, &duo, grid) else {
            continue;
        };
        let scan = scan_duo(alpha, Some(prices), q, c, &duo, grid, strict_tol);
        if scan.verified {
            let profits = [
                duo_expected_profit(alpha, prices, q, c, &duo, 0),
                duo_expected_profit(alpha, prices, q, c, &duo, 1),
            ];
            out.push(CornerEquilibrium { alpha, prices, profits });
        }
    }
    out
}

/// A derived pattern plus any interior equilibria the falsification scan
/// turned up (expected none; reported as discrepancies, not errors).
#[derive(Debug, Clone, PartialEq)]
pub struct PatternDerivation {
    pub pattern: Pattern,
    /// The verified corner equilibria behind the pattern.
    pub corners: Vec<CornerEquilibrium>,
    pub interior_equilibria: Vec<[f64; 2]>,
}

/// Derives the behavior pattern at a quality/cost point by brute force:
/// verifies the three corner candidates and maps the surviving set to a
/// pattern, then scans the interior disclosure grid for unexpected
/// equilibria. Requires `q[0] >= q[1]`.
pub fn derive_pattern(
    q: [f64; 2],
    c: [f64; 2],
    cfg: &MarketConfig,
    grid: &GridSpec,
) -> Result<PatternDerivation, OracleError> {
    debug_assert!(q[0] >= q[1]);
    let corners = verified_corner_equilibria(q, c, cfg, grid, DEFAULT_TOL);
    let has = |a: [f64; 2]| corners.iter().any(|e| e.alpha == a);
    let first = has([1.0, 0.0]);
    let second = has([0.0, 1.0]);
    let neither = has([0.0, 0.0]);
    let pattern = match (first, second, neither) {
        (true, false, false) => Pattern::HighOnly,
        (true, true, false) => Pattern::Either,
        (false, true, false) => Pattern::LowOnly,
        (false, false, true) => Pattern::Neither,
        _ => {
            let mut verified = Vec::new();
            if first {
                verified.push("(1,0)".to_string());
            }
            if second {
                verified.push("(0,1)".to_string());
            }
            if neither {
                verified.push("(0,0)".to_string());
            }
            return Err(OracleError::NoPatternMatch { verified });
        }
    };

    let duo = MarketConfig::duopoly(cfg.q0, cfg.eps0, q, c);
    let mut interior = Vec::new();
    let pts = grid.alpha_points();
    for i1 in 0..pts {
        for i2 in 0..pts {
            let a = [grid.alpha_at(i1), grid.alpha_at(i2)];
            if a == [1.0, 0.0] || a == [0.0, 1.0] || a == [0.0, 0.0] {
                continue;
            }
            let scan = scan_duo(a, None, q, c, &duo, grid, DEFAULT_TOL);
            if scan.verified {
                interior.push(a);
            }
        }
    }
    Ok(PatternDerivation { pattern, corners, interior_equilibria: interior })
}

// ---------------------------------------------------------------------------
// Numeric threshold curves
// ---------------------------------------------------------------------------

/// A located pattern change along one grid line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdPoint {
    /// Value of the cost held fixed on this scan line.
    pub fixed_cost: f64,
    /// Where the pattern flips along the scanned cost axis.
    pub at: f64,
    pub below: String,
    pub above: String,
}

/// Numeric surrogates for the cost thresholds separating behavior
/// patterns, located by bisection along grid lines of the cost plane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdCurves {
    /// Flips along the first seller's cost, one scan per second-seller cost.
    pub along_first_cost: Vec<ThresholdPoint>,
    /// Flips along the second seller's cost.
    pub along_second_cost: Vec<ThresholdPoint>,
}

/// Scans the cost plane for pattern boundaries. `resolution` grid points
/// per axis; bisection refines each flip to `1e-6` in cost.
pub fn pattern_thresholds(
    q: [f64; 2],
    cfg: &MarketConfig,
    grid: &GridSpec,
    c_range: [f64; 2],
    resolution: usize,
) -> Result<ThresholdCurves, OracleError> {
    assert!(resolution >= 2);
    let line = |t: usize| c_range[0] + (c_range[1] - c_range[0]) * t as f64 / (resolution - 1) as f64;
    let pattern_at = |c1: f64, c2: f64| -> Result<Pattern, OracleError> {
        Ok(derive_pattern(q, [c1, c2], cfg, grid)?.pattern)
    };

    let mut along_first = Vec::new();
    let mut along_second = Vec::new();
    for fixed_idx in 0..resolution {
        let fixed = line(fixed_idx);
        // Scan c1 with c2 fixed.
        let mut prev = pattern_at(line(0), fixed)?;
        for t in 1..resolution {
            let cur = pattern_at(line(t), fixed)?;
            if cur != prev {
                let mut lo = line(t - 1);
                let mut hi = line(t);
                for _ in 0..40 {
                    let mid = 0.5 * (lo + hi);
                    if pattern_at(mid, fixed)? == prev {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo < 1e-6 {
                        break;
                    }
                }
                along_first.push(ThresholdPoint {
                    fixed_cost: fixed,
                    at: 0.5 * (lo + hi),
                    below: prev.roman().to_string(),
                    above: cur.roman().to_string(),
                });
                prev = cur;
            }
        }
        // Scan c2 with c1 fixed.
        let mut prev = pattern_at(fixed, line(0))?;
        for t in 1..resolution {
            let cur = pattern_at(fixed, line(t))?;
            if cur != prev {
                let mut lo = line(t - 1);
                let mut hi = line(t);
                for _ in 0..40 {
                    let mid = 0.5 * (lo + hi);
                    if pattern_at(fixed, mid)? == prev {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo < 1e-6 {
                        break;
                    }
                }
                along_second.push(ThresholdPoint {
                    fixed_cost: fixed,
                    at: 0.5 * (lo + hi),
                    below: prev.roman().to_string(),
                    above: cur.roman().to_string(),
                });
                prev = cur;
            }
        }
    }
    Ok(ThresholdCurves { along_first_cost: along_first, along_second_cost: along_second })
}
