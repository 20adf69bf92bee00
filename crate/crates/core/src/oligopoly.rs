//! Closed-form N-seller, K-buyer equilibrium characterization with binary
//! disclosure under unlimited, single, and limited capacity, plus the
//! cross-scenario ordering of discloser counts.
//!
//! A disclosing set is supported when every member is eligible (high
//! enough quality, low enough cost for solo disclosure to pay against
//! non-disclosers) and no outsider could displace a member, i.e. each
//! member's quality weakly dominates every outsider's quality net of that
//! outsider's disclosure cost. Capacity then pins how many members an
//! equilibrium can carry.

use std::collections::BTreeSet;

use crate::config::{
    Capacity, ConfigError, Equilibrium, EquilibriumReport, MarketConfig, Scenario,
};
use crate::oracle::{self, GridSpec, NumericPricing};

/// Default cap on enumerated equilibria per report.
pub const ENUMERATION_CAP: usize = 10_000;
/// Numeric pricing detail is computed for at most this many equilibria per
/// report; beyond it only the disclosing sets are listed.
pub const PRICE_DETAIL_CAP: usize = 8;

/// Solo-disclosure eligibility: whether a seller with quality `q` and cost
/// `c` profits from full disclosure when nobody else discloses.
pub fn eligible(q: f64, c: f64, cfg: &MarketConfig) -> Result<bool, ConfigError> {
    if cfg.eps0 == 0.0 {
        return Err(ConfigError::DegenerateBias);
    }
    let lo = cfg.q0 + cfg.eps0;
    let hi = cfg.q0 + 3.0 * cfg.eps0;
    Ok(if q > lo && q < hi {
        c <= (q - cfg.q0 + cfg.eps0).powi(2) / (8.0 * cfg.eps0)
    } else if q >= hi {
        c <= q - cfg.q0 - cfg.eps0
    } else {
        false
    })
}

/// Optimal price and gross per-buyer profit of a sole discloser facing
/// zero-priced non-disclosers: maximizes `p * P(q - p > q0 + eps)`.
pub fn solo_disclosure_price(q: f64, cfg: &MarketConfig) -> (f64, f64) {
    if cfg.eps0 == 0.0 {
        let v = (q - cfg.q0).max(0.0);
        return (v, v);
    }
    if q <= cfg.q0 - cfg.eps0 {
        (0.0, 0.0)
    } else if q < cfg.q0 + 3.0 * cfg.eps0 {
        let p = (q - cfg.q0 + cfg.eps0) / 2.0;
        (p, (q - cfg.q0 + cfg.eps0).powi(2) / (8.0 * cfg.eps0))
    } else {
        let p = q - cfg.q0 - cfg.eps0;
        (p, p)
    }
}

fn eligible_ids(cfg: &MarketConfig) -> Result<Vec<usize>, ConfigError> {
    let mut out = Vec::new();
    for (idx, s) in cfg.sellers.iter().enumerate() {
        if eligible(s.quality, s.cost, cfg)? {
            out.push(idx);
        }
    }
    Ok(out)
}

/// Highest quality-net-of-cost among sellers outside `members`.
fn outsider_bound(cfg: &MarketConfig, members: &BTreeSet<usize>) -> f64 {
    cfg.sellers
        .iter()
        .enumerate()
        .filter(|(idx, _)| !members.contains(idx))
        .map(|(_, s)| s.quality - s.cost)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn min_member_quality(cfg: &MarketConfig, members: &BTreeSet<usize>) -> f64 {
    members.iter().map(|&i| cfg.sellers[i].quality).fold(f64::INFINITY, f64::min)
}

/// No outsider can displace any member.
fn displacement_free(cfg: &MarketConfig, members: &BTreeSet<usize>) -> bool {
    if members.len() == cfg.n_sellers() {
        return true;
    }
    min_member_quality(cfg, members) >= outsider_bound(cfg, members)
}

/// The empty-disclosure equilibrium: everyone prices at zero.
fn no_disclosure_equilibrium(cfg: &MarketConfig) -> Equilibrium {
    let n = cfg.n_sellers();
    Equilibrium {
        disclosers: BTreeSet::new(),
        prices: Some(vec![0.0; n]),
        expected_profits: Some(vec![0.0; n]),
        case: "no-disclosure".to_string(),
        price_basis: "closed-form".to_string(),
    }
}

/// Prices and expected profits for a disclosing set. Singletons use the
/// solo closed form; larger sets use the numeric best-response solver.
fn supportive_prices(
    cfg: &MarketConfig,
    members: &BTreeSet<usize>,
    grid: &GridSpec,
) -> (Option<Vec<f64>>, Option<Vec<f64>>, String, Vec<String>) {
    let n = cfg.n_sellers();
    let alpha: Vec<f64> =
        (0..n).map(|i| if members.contains(&i) { 1.0 } else { 0.0 }).collect();
    let mut warnings = Vec::new();
    let (prices, basis) = if members.len() == 1 {
        let mut p = vec![0.0; n];
        let &solo = members.iter().next().unwrap();
        p[solo] = solo_disclosure_price(cfg.sellers[solo].quality, cfg).0;
        (Some(p), "closed-form")
    } else {
        match oracle::numeric_price_equilibrium(&alpha, cfg, grid) {
            Ok(NumericPricing::Converged(p)) => (Some(p), "numeric"),
            Ok(NumericPricing::Unstable(kind)) => {
                warnings.push(format!("pricing unstable for {members:?}: {kind:?}"));
                (None, "numeric")
            }
            Err(e) => {
                warnings.push(format!("pricing failed for {members:?}: {e}"));
                (None, "numeric")
            }
        }
    };
    let profits = prices.as_ref().map(|p| {
        (0..n).map(|i| oracle::n_expected_profit(cfg, &alpha, p, i)).collect()
    });
    (prices, profits, basis.to_string(), warnings)
}

fn build_report(
    cfg: &MarketConfig,
    scenario: Scenario,
    families: Vec<(BTreeSet<usize>, &'static str)>,
    truncated: bool,
    cardinality: (usize, usize),
    grid: &GridSpec,
) -> EquilibriumReport {
    let mut warnings = Vec::new();
    let mut equilibria = Vec::new();
    for (rank, (members, case)) in families.into_iter().enumerate() {
        if members.is_empty() {
            equilibria.push(no_disclosure_equilibrium(cfg));
            continue;
        }
        if rank < PRICE_DETAIL_CAP {
            let (prices, profits, basis, mut w) = supportive_prices(cfg, &members, grid);
            warnings.append(&mut w);
            equilibria.push(Equilibrium {
                disclosers: members,
                prices,
                expected_profits: profits,
                case: case.to_string(),
                price_basis: basis,
            });
        } else {
            equilibria.push(Equilibrium {
                disclosers: members,
                prices: None,
                expected_profits: None,
                case: case.to_string(),
                price_basis: "omitted".to_string(),
            });
        }
    }
    let multiple = equilibria.len() > 1;
    EquilibriumReport { scenario, equilibria, multiple, truncated, cardinality, warnings }
}

/// Equilibria when every seller has unlimited capacity: at most one seller
/// discloses. Every eligible seller whose quality weakly dominates all
/// rivals' quality-net-of-cost supports a singleton equilibrium; with no
/// eligible seller, universal non-disclosure is the unique equilibrium.
pub fn equilibria_unlimited(cfg: &MarketConfig, grid: &GridSpec) -> Result<EquilibriumReport, ConfigError> {
    cfg.validate()?;
    let elig = eligible_ids(cfg)?;
    if elig.is_empty() {
        return Ok(build_report(
            cfg,
            Scenario::Unlimited,
            vec![(BTreeSet::new(), "no-disclosure")],
            false,
            (0, 0),
            grid,
        ));
    }
    let mut families = Vec::new();
    for &i in &elig {
        let members: BTreeSet<usize> = [i].into_iter().collect();
        if displacement_free(cfg, &members) {
            families.push((members, "solo-discloser"));
        }
    }
    debug_assert!(!families.is_empty());
    Ok(build_report(cfg, Scenario::Unlimited, families, false, (1, 1), grid))
}

/// All subsets of `pool` of size `want`, streamed into `sink` until it
/// returns false.
fn combinations(pool: &[usize], want: usize, sink: &mut dyn FnMut(&[usize]) -> bool) {
    fn rec(pool: &[usize], want: usize, start: usize, cur: &mut Vec<usize>, sink: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == want {
            return sink(cur);
        }
        let need = want - cur.len();
        for i in start..=pool.len().saturating_sub(need) {
            cur.push(pool[i]);
            let keep_going = rec(pool, want, i + 1, cur, sink);
            cur.pop();
            if !keep_going {
                return false;
            }
        }
        true
    }
    rec(pool, want, 0, &mut Vec::new(), sink);
}

/// Equilibria when every seller serves at most one buyer and supply
/// exceeds demand: up to K eligible sellers disclose.
pub fn equilibria_single(cfg: &MarketConfig, grid: &GridSpec) -> Result<EquilibriumReport, ConfigError> {
    cfg.validate()?;
    if cfg.n_sellers() <= cfg.k {
        return Err(ConfigError::SupplyNotAboveDemand {
            supply: cfg.n_sellers() as u64,
            k: cfg.k,
        });
    }
    let elig = eligible_ids(cfg)?;
    if elig.is_empty() {
        return Ok(build_report(
            cfg,
            Scenario::Single,
            vec![(BTreeSet::new(), "no-disclosure")],
            false,
            (0, 0),
            grid,
        ));
    }
    if elig.len() <= cfg.k {
        let members: BTreeSet<usize> = elig.iter().copied().collect();
        debug_assert!(displacement_free(cfg, &members));
        let size = members.len();
        return Ok(build_report(
            cfg,
            Scenario::Single,
            vec![(members, "all-eligible")],
            false,
            (size, size),
            grid,
        ));
    }
    // More eligible sellers than buyers: every displacement-free K-subset.
    let mut families = Vec::new();
    let mut truncated = false;
    combinations(&elig, cfg.k, &mut |subset| {
        let members: BTreeSet<usize> = subset.iter().copied().collect();
        if displacement_free(cfg, &members) {
            if families.len() >= ENUMERATION_CAP {
                truncated = true;
                return false;
            }
            families.push((members, "buyer-matched-subset"));
        }
        true
    });
    Ok(build_report(cfg, Scenario::Single, families, truncated, (cfg.k, cfg.k), grid))
}

fn finite_capacities(cfg: &MarketConfig) -> Result<Vec<u64>, ConfigError> {
    cfg.sellers
        .iter()
        .map(|s| match s.capacity {
            Capacity::Limited(w) => Ok(u64::from(w)),
            Capacity::Unlimited => Err(ConfigError::NotFinite("capacity")),
        })
        .collect()
}

/// The capacity conditions for a limited-capacity disclosing set: members
/// can just cover all buyers, and dropping the member who offers buyers
/// the least payoff leaves them short. The least-payoff member is read
/// from the numeric prices; when several tie, the condition must hold for
/// at least one of them.
fn capacity_conditions(
    cfg: &MarketConfig,
    members: &BTreeSet<usize>,
    caps: &[u64],
    grid: &GridSpec,
) -> bool {
    let total: u64 = members.iter().map(|&i| caps[i]).sum();
    if total < cfg.k as u64 {
        return false;
    }
    if members.len() == 1 {
        // Dropping the only member leaves zero capacity.
        return true;
    }
    // Uniform member capacities make the least-payoff identity irrelevant.
    let first = caps[*members.iter().next().unwrap()];
    if members.iter().all(|&i| caps[i] == first) {
        return total - first < cfg.k as u64;
    }
    let n = cfg.n_sellers();
    let alpha: Vec<f64> =
        (0..n).map(|i| if members.contains(&i) { 1.0 } else { 0.0 }).collect();
    let payoffs: Vec<(usize, f64)> = match oracle::numeric_price_equilibrium(&alpha, cfg, grid) {
        Ok(NumericPricing::Converged(prices)) => members
            .iter()
            .map(|&i| (i, cfg.sellers[i].quality - prices[i]))
            .collect(),
        // Pricing never settled; fall back to the solo closed form as the
        // payoff proxy.
        _ => members
            .iter()
            .map(|&i| {
                let (p, _) = solo_disclosure_price(cfg.sellers[i].quality, cfg);
                (i, cfg.sellers[i].quality - p)
            })
            .collect(),
    };
    let min_payoff = payoffs.iter().map(|&(_, v)| v).fold(f64::INFINITY, f64::min);
    payoffs
        .iter()
        .filter(|&&(_, v)| v - min_payoff <= 1e-9)
        .any(|&(j, _)| total - caps[j] < cfg.k as u64)
}

/// Equilibria when sellers have finite multi-buyer capacities and total
/// supply exceeds demand: the disclosing set just covers all buyers.
pub fn equilibria_limited(cfg: &MarketConfig, grid: &GridSpec) -> Result<EquilibriumReport, ConfigError> {
    cfg.validate()?;
    let caps = finite_capacities(cfg)?;
    let supply: u64 = caps.iter().sum();
    if supply <= cfg.k as u64 {
        return Err(ConfigError::SupplyNotAboveDemand { supply, k: cfg.k });
    }
    let elig = eligible_ids(cfg)?;
    if elig.is_empty() {
        return Ok(build_report(
            cfg,
            Scenario::Limited,
            vec![(BTreeSet::new(), "no-disclosure")],
            false,
            (0, 0),
            grid,
        ));
    }
    let eligible_capacity: u64 = elig.iter().map(|&i| caps[i]).sum();
    if eligible_capacity < cfg.k as u64 {
        // Even all eligible sellers together cannot serve every buyer; all
        // of them disclose and sell out.
        let members: BTreeSet<usize> = elig.iter().copied().collect();
        let size = members.len();
        return Ok(build_report(
            cfg,
            Scenario::Limited,
            vec![(members, "all-eligible")],
            false,
            (size, size),
            grid,
        ));
    }

    // Uniform eligible capacities admit a fixed cover size.
    let uniform = elig.iter().all(|&i| caps[i] == caps[elig[0]]);
    let mut families: Vec<(BTreeSet<usize>, &'static str)> = Vec::new();
    let mut truncated = false;
    let mut card_min = usize::MAX;
    let mut card_max = 0usize;
    if uniform {
        let w = caps[elig[0]];
        let size = ((cfg.k as u64 + w - 1) / w) as usize;
        combinations(&elig, size, &mut |subset| {
            let members: BTreeSet<usize> = subset.iter().copied().collect();
            if displacement_free(cfg, &members) {
                if families.len() >= ENUMERATION_CAP {
                    truncated = true;
                    return false;
                }
                families.push((members, "buyer-cover"));
            }
            true
        });
        card_min = size;
        card_max = size;
    } else {
        // Heterogeneous capacities: search subsets by size.
        'sizes: for size in 1..=elig.len() {
            let mut any_cover_possible = false;
            combinations(&elig, size, &mut |subset| {
                let members: BTreeSet<usize> = subset.iter().copied().collect();
                let total: u64 = members.iter().map(|&i| caps[i]).sum();
                if total >= cfg.k as u64 {
                    any_cover_possible = true;
                }
                if displacement_free(cfg, &members)
                    && capacity_conditions(cfg, &members, &caps, grid)
                {
                    if families.len() >= ENUMERATION_CAP {
                        truncated = true;
                        return false;
                    }
                    card_min = card_min.min(size);
                    card_max = card_max.max(size);
                    families.push((members, "buyer-cover"));
                }
                true
            });
            if truncated {
                break 'sizes;
            }
            // Once every subset of this size over-covers even after
            // dropping its largest member, bigger sizes cannot satisfy
            // the just-cover condition.
            let smallest: Vec<u64> = {
                let mut v: Vec<u64> = elig.iter().map(|&i| caps[i]).collect();
                v.sort_unstable();
                v
            };
            let min_total: u64 = smallest.iter().take(size).sum();
            let max_cap = *smallest.last().unwrap();
            if min_total >= cfg.k as u64 + max_cap && any_cover_possible {
                break;
            }
        }
        if families.is_empty() && !truncated {
            // Fall back to the maximal disclosing set.
            let members: BTreeSet<usize> = elig.iter().copied().collect();
            let size = members.len();
            card_min = size;
            card_max = size;
            families.push((members, "all-eligible"));
        }
    }
    debug_assert!(!families.is_empty());
    Ok(build_report(
        cfg,
        Scenario::Limited,
        families,
        truncated,
        (card_min, card_max),
        grid,
    ))
}

/// Discloser-count comparison across the three capacity regimes for the
/// same roster.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct OrderingReport {
    /// (min, max) discloser counts over each scenario's equilibria.
    pub unlimited: (usize, usize),
    pub limited: (usize, usize),
    pub single: (usize, usize),
    /// Counts ordered for every cross-scenario triple of equilibria.
    pub ordered: bool,
}

fn with_capacity(cfg: &MarketConfig, cap: Capacity) -> MarketConfig {
    let mut out = cfg.clone();
    for s in &mut out.sellers {
        s.capacity = cap;
    }
    out
}

/// Exact (min, max) discloser counts over a scenario's equilibria, without
/// enumerating or pricing the equilibria themselves.
pub fn cardinality_bounds(
    cfg: &MarketConfig,
    scenario: Scenario,
    omega: u32,
) -> Result<(usize, usize), ConfigError> {
    let n_eligible = eligible_ids(cfg)?.len();
    if n_eligible == 0 {
        return Ok((0, 0));
    }
    Ok(match scenario {
        Scenario::Unlimited => (1, 1),
        Scenario::Single => {
            let m = n_eligible.min(cfg.k);
            (m, m)
        }
        Scenario::Limited => {
            let w = u64::from(omega).max(1);
            let cover = ((cfg.k as u64).div_ceil(w) as usize).min(n_eligible);
            (cover, cover)
        }
        Scenario::Duopoly => return Err(ConfigError::NotFinite("scenario")),
    })
}

/// Computes discloser counts under unlimited, limited (`omega` units per
/// seller), and single capacity, and checks the cross-scenario ordering.
/// Counts come from the closed-form cardinality bounds; the full
/// equilibrium listings are available from the `equilibria_*` reports.
pub fn disclosure_count_ordering(
    cfg: &MarketConfig,
    omega: u32,
    _grid: &GridSpec,
) -> Result<OrderingReport, ConfigError> {
    if cfg.n_sellers() <= cfg.k {
        return Err(ConfigError::SupplyNotAboveDemand {
            supply: cfg.n_sellers() as u64,
            k: cfg.k,
        });
    }
    let unl = cardinality_bounds(cfg, Scenario::Unlimited, omega)?;
    let lim = cardinality_bounds(cfg, Scenario::Limited, omega)?;
    let sin = cardinality_bounds(cfg, Scenario::Single, omega)?;
    let ordered = unl.1 <= lim.0 && lim.1 <= sin.0;
    Ok(OrderingReport { unlimited: unl, limited: lim, single: sin, ordered })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SellerParams;

    fn base_cfg(sellers: Vec<SellerParams>, k: usize) -> MarketConfig {
        MarketConfig::new(10.0, 2.0, k, sellers)
    }

    #[test]
    fn eligibility_examples() {
        let cfg = base_cfg(vec![SellerParams::unlimited(0, 14.0, 2.0)], 1);
        assert!(eligible(14.0, 2.0, &cfg).unwrap()); // bound 36/16 = 2.25
        assert!(!eligible(14.0, 2.5, &cfg).unwrap());
        assert!(eligible(20.0, 7.0, &cfg).unwrap()); // bound 8
        assert!(!eligible(12.0, 0.0, &cfg).unwrap()); // region opens above q0 + eps0
    }

    #[test]
    fn eligibility_refuses_degenerate_bias() {
        let cfg = MarketConfig::new(10.0, 0.0, 1, vec![SellerParams::unlimited(0, 14.0, 2.0)]);
        assert!(eligible(14.0, 2.0, &cfg).is_err());
    }

    #[test]
    fn solo_price_examples() {
        let cfg = base_cfg(vec![SellerParams::unlimited(0, 14.0, 2.0)], 1);
        let (p, gross) = solo_disclosure_price(14.0, &cfg);
        assert!((p - 3.0).abs() < 1e-12);
        assert!((gross - 2.25).abs() < 1e-12);
        let (p, gross) = solo_disclosure_price(16.0, &cfg);
        assert!((p - 4.0).abs() < 1e-12);
        assert!((gross - 4.0).abs() < 1e-12);
        // Boundary of the disclosure region: gross profit eps0 / 2.
        let (p, gross) = solo_disclosure_price(12.0, &cfg);
        assert!((p - 2.0).abs() < 1e-12);
        assert!((gross - 1.0).abs() < 1e-12);
        let (_, gross) = solo_disclosure_price(10.0 + 2.0, &cfg);
        assert!((gross - 1.0).abs() < 1e-12);
    }

    #[test]
    fn solo_price_matches_grid_maximization() {
        // Independent check: brute-force the price objective.
        let cfg = base_cfg(vec![SellerParams::unlimited(0, 14.0, 2.0)], 1);
        for q in [11.0, 12.0, 13.0, 14.0, 15.5, 16.0, 18.0] {
            let (p_star, gross_star) = solo_disclosure_price(q, &cfg);
            let mut best = (0.0, 0.0);
            let mut p = 0.0;
            while p <= 12.0 {
                let win = ((q - p - cfg.q0 + cfg.eps0) / (2.0 * cfg.eps0)).clamp(0.0, 1.0);
                if p * win > best.1 {
                    best = (p, p * win);
                }
                p += 1e-4;
            }
            assert!((best.0 - p_star).abs() < 2e-4, "q={q}: {} vs {p_star}", best.0);
            assert!((best.1 - gross_star).abs() < 1e-4);
        }
    }

    #[test]
    fn unlimited_examples() {
        let grid = GridSpec::with_steps(0.01, 12.0, 0.05);
        let cfg = base_cfg(
            vec![SellerParams::unlimited(0, 20.0, 1.0), SellerParams::unlimited(1, 5.0, 1.0)],
            1,
        );
        let report = equilibria_unlimited(&cfg, &grid).unwrap();
        assert_eq!(report.equilibria.len(), 1);
        assert!(report.equilibria[0].disclosers.contains(&0));
        assert_eq!(report.cardinality, (1, 1));

        // No seller eligible: universal non-disclosure, everyone at zero.
        let cfg = base_cfg(
            vec![SellerParams::unlimited(0, 11.0, 1.0), SellerParams::unlimited(1, 5.0, 1.0)],
            1,
        );
        let report = equilibria_unlimited(&cfg, &grid).unwrap();
        assert_eq!(report.cardinality, (0, 0));
        assert!(report.equilibria[0].disclosers.is_empty());
        assert_eq!(report.equilibria[0].prices.as_deref(), Some(&[0.0, 0.0][..]));

        // Two close rivals: both singleton equilibria coexist.
        let cfg = base_cfg(
            vec![SellerParams::unlimited(0, 20.0, 1.0), SellerParams::unlimited(1, 19.5, 1.0)],
            1,
        );
        let report = equilibria_unlimited(&cfg, &grid).unwrap();
        assert_eq!(report.equilibria.len(), 2);
        assert!(report.multiple);
    }

    #[test]
    fn single_capacity_examples() {
        let grid = GridSpec::with_steps(0.01, 12.0, 0.05);
        // Three qualifying sellers, two buyers: each 2-subset.
        let mut sellers = vec![
            SellerParams::new(0, 18.0, 2.0, Capacity::Limited(1)),
            SellerParams::new(1, 17.5, 2.0, Capacity::Limited(1)),
            SellerParams::new(2, 17.0, 2.0, Capacity::Limited(1)),
        ];
        for id in 3..6 {
            sellers.push(SellerParams::new(id, 5.0, 5.0, Capacity::Limited(1)));
        }
        let cfg = base_cfg(sellers, 2);
        let report = equilibria_single(&cfg, &grid).unwrap();
        assert_eq!(report.equilibria.len(), 3);
        assert_eq!(report.cardinality, (2, 2));

        // No eligible sellers.
        let cfg = base_cfg(
            (0..4).map(|id| SellerParams::new(id, 9.0, 1.0, Capacity::Limited(1))).collect(),
            2,
        );
        let report = equilibria_single(&cfg, &grid).unwrap();
        assert_eq!(report.cardinality, (0, 0));

        // One qualifying seller, five buyers: that seller alone.
        let mut sellers = vec![SellerParams::new(0, 18.0, 2.0, Capacity::Limited(1))];
        for id in 1..7 {
            sellers.push(SellerParams::new(id, 8.0, 4.0, Capacity::Limited(1)));
        }
        let cfg = base_cfg(sellers, 5);
        let report = equilibria_single(&cfg, &grid).unwrap();
        assert_eq!(report.equilibria.len(), 1);
        assert_eq!(report.equilibria[0].disclosers, [0].into_iter().collect());
    }

    #[test]
    fn limited_capacity_cover_size() {
        let grid = GridSpec::with_steps(0.01, 12.0, 0.05);
        // K = 32, uniform capacity 8, several qualifying sellers: covers of
        // exactly four disclosers.
        let mut sellers: Vec<SellerParams> = (0..6)
            .map(|id| SellerParams::new(id, 19.0 - 0.1 * id as f64, 1.0, Capacity::Limited(8)))
            .collect();
        for id in 6..40 {
            sellers.push(SellerParams::new(id, 6.0, 5.0, Capacity::Limited(8)));
        }
        let cfg = base_cfg(sellers, 32);
        let report = equilibria_limited(&cfg, &grid).unwrap();
        assert_eq!(report.cardinality, (4, 4));
        for eq in &report.equilibria {
            assert_eq!(eq.disclosers.len(), 4);
        }
    }

    #[test]
    fn limited_specializes_to_single_and_unlimited() {
        let grid = GridSpec::with_steps(0.01, 12.0, 0.05);
        let sellers: Vec<SellerParams> = vec![
            SellerParams::new(0, 18.0, 2.0, Capacity::Limited(1)),
            SellerParams::new(1, 17.5, 2.0, Capacity::Limited(1)),
            SellerParams::new(2, 17.0, 2.0, Capacity::Limited(1)),
            SellerParams::new(3, 5.0, 5.0, Capacity::Limited(1)),
        ];
        let cfg = base_cfg(sellers, 2);
        let as_single = equilibria_single(&cfg, &grid).unwrap();
        let as_limited = equilibria_limited(&cfg, &grid).unwrap();
        let fam_a: Vec<_> = as_single.discloser_families().into_iter().cloned().collect();
        let fam_b: Vec<_> = as_limited.discloser_families().into_iter().cloned().collect();
        assert_eq!(fam_a, fam_b);

        // Capacities at least K behave like unlimited capacity.
        let cfg_big = with_capacity(&cfg, Capacity::Limited(2));
        let as_limited = equilibria_limited(&cfg_big, &grid).unwrap();
        let cfg_unl = with_capacity(&cfg, Capacity::Unlimited);
        let as_unlimited = equilibria_unlimited(&cfg_unl, &grid).unwrap();
        let fam_a: Vec<_> = as_limited.discloser_families().into_iter().cloned().collect();
        let fam_b: Vec<_> = as_unlimited.discloser_families().into_iter().cloned().collect();
        assert_eq!(fam_a, fam_b);
    }

    #[test]
    fn cardinality_bounds_match_enumerated_reports() {
        let grid = GridSpec::with_steps(0.02, 12.0, 0.05);
        let rosters: Vec<Vec<SellerParams>> = vec![
            vec![
                SellerParams::unlimited(0, 20.0, 1.0),
                SellerParams::unlimited(1, 17.0, 2.0),
                SellerParams::unlimited(2, 16.5, 2.0),
                SellerParams::unlimited(3, 8.0, 5.0),
            ],
            (0..5).map(|id| SellerParams::unlimited(id, 9.0, 3.0)).collect(),
            vec![
                SellerParams::unlimited(0, 18.0, 2.0),
                SellerParams::unlimited(1, 17.5, 2.0),
                SellerParams::unlimited(2, 17.0, 2.0),
                SellerParams::unlimited(3, 5.0, 5.0),
            ],
        ];
        for sellers in rosters {
            for omega in [1u32, 2, 3] {
                let cfg = base_cfg(sellers.clone(), 2);
                let unl = equilibria_unlimited(&with_capacity(&cfg, Capacity::Unlimited), &grid)
                    .unwrap();
                assert_eq!(
                    unl.cardinality,
                    cardinality_bounds(&cfg, Scenario::Unlimited, omega).unwrap()
                );
                let sin =
                    equilibria_single(&with_capacity(&cfg, Capacity::Limited(1)), &grid).unwrap();
                assert_eq!(
                    sin.cardinality,
                    cardinality_bounds(&cfg, Scenario::Single, omega).unwrap()
                );
                let lim =
                    equilibria_limited(&with_capacity(&cfg, Capacity::Limited(omega)), &grid)
                        .unwrap();
                assert_eq!(
                    lim.cardinality,
                    cardinality_bounds(&cfg, Scenario::Limited, omega).unwrap()
                );
            }
        }
    }

    #[test]
    fn ordering_examples() {
        let grid = GridSpec::with_steps(0.01, 12.0, 0.05);
        // A dominant discloser plus lesser eligible rivals: counts 1 < 2 < 3.
        let sellers = vec![
            SellerParams::unlimited(0, 20.0, 1.0),
            SellerParams::unlimited(1, 17.0, 2.0),
            SellerParams::unlimited(2, 16.5, 2.0),
            SellerParams::unlimited(3, 8.0, 5.0),
        ];
        let cfg = base_cfg(sellers, 3);
        let report = disclosure_count_ordering(&cfg, 2, &grid).unwrap();
        assert_eq!(report.unlimited, (1, 1));
        assert_eq!(report.limited, (2, 2));
        assert_eq!(report.single, (3, 3));
        assert!(report.ordered);

        // Nobody eligible: all zero, ordering holds with equality.
        let sellers: Vec<SellerParams> =
            (0..5).map(|id| SellerParams::unlimited(id, 9.0, 3.0)).collect();
        let cfg = base_cfg(sellers, 3);
        let report = disclosure_count_ordering(&cfg, 2, &grid).unwrap();
        assert_eq!((report.unlimited, report.limited, report.single), ((0, 0), (0, 0), (0, 0)));
        assert!(report.ordered);
    }
}
