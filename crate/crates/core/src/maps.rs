//! Parameter-sweep grids: the quality-plane structure map and the
//! eligible-at-equilibrium region map for each capacity scenario.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{ConfigError, MarketConfig, Scenario, SellerParams};
use crate::duopoly::{classify_structure_flagged, quality_category, Structure};
use crate::oligopoly::eligible;

/// One sweep axis: `steps` evenly spaced points covering `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepAxis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl SweepAxis {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<SweepAxis, ConfigError> {
        if steps < 2 || !(max > min) {
            return Err(ConfigError::NotFinite("sweep axis"));
        }
        Ok(SweepAxis { min, max, steps })
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let span = self.max - self.min;
        (0..self.steps).map(move |i| self.min + span * i as f64 / (self.steps - 1) as f64)
    }
}

/// One cell of the quality-plane structure map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureCell {
    pub q1: f64,
    pub q2: f64,
    pub structure: Structure,
    /// Quality profile of the ordered pair, e.g. "GM".
    pub profile: String,
    pub near_boundary: bool,
}

/// Classifies every cell of a square quality grid.
pub fn structure_map(cfg: &MarketConfig, axis: SweepAxis) -> Result<Vec<StructureCell>, ConfigError> {
    let step = (axis.max - axis.min) / (axis.steps - 1) as f64;
    let mut out = Vec::with_capacity(axis.steps * axis.steps);
    for q1 in axis.points() {
        for q2 in axis.points() {
            let (structure, near_boundary) = classify_structure_flagged(q1, q2, cfg, step / 2.0)?;
            let (hi, lo) = if q1 >= q2 { (q1, q2) } else { (q2, q1) };
            let profile =
                format!("{}{}", quality_category(hi, cfg), quality_category(lo, cfg));
            out.push(StructureCell { q1, q2, structure, profile, near_boundary });
        }
    }
    Ok(out)
}

/// Deterministic roster: one seller per cell of a quality/cost grid.
pub fn population_grid(
    q_axis: SweepAxis,
    c_axis: SweepAxis,
) -> Vec<SellerParams> {
    let mut out = Vec::with_capacity(q_axis.steps * c_axis.steps);
    for q in q_axis.points() {
        for c in c_axis.points() {
            out.push(SellerParams::unlimited(out.len(), q, c));
        }
    }
    out
}

/// Random roster: `n` sellers uniform over the quality/cost rectangle.
pub fn population_sample(n: usize, q_range: [f64; 2], c_range: [f64; 2], seed: u64) -> Vec<SellerParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|id| {
            let q = rng.gen_range(q_range[0]..=q_range[1]);
            let c = rng.gen_range(c_range[0]..=c_range[1]);
            SellerParams::unlimited(id, q, c)
        })
        .collect()
}

/// Default roster for the region maps: a unit-spaced 20 x 10 grid over
/// qualities `[1, 20]` and costs `[1, 10]`, two hundred sellers.
pub fn default_population() -> Vec<SellerParams> {
    population_grid(
        SweepAxis::new(1.0, 20.0, 20).expect("static axis"),
        SweepAxis::new(1.0, 10.0, 10).expect("static axis"),
    )
}

/// One cell of the eligible-region map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EligibleCell {
    pub q: f64,
    pub c: f64,
    /// Solo-disclosure eligibility of the (q, c) point on its own.
    pub eligible: bool,
    /// Whether a seller with these parameters belongs to some equilibrium's
    /// disclosing set, given the population and scenario.
    pub in_equilibrium: bool,
}

/// Result of an eligible-region sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EligibleMap {
    pub scenario: Scenario,
    /// Quality every equilibrium discloser must weakly dominate: the best
    /// quality-net-of-cost among sellers that cannot all be folded into
    /// the disclosing set.
    pub displacement_bound: f64,
    pub cells: Vec<EligibleCell>,
}

/// How many population sellers can shield a candidate inside one
/// disclosing set, beyond the candidate itself.
fn shield_slots(scenario: Scenario, k: usize, omega: u32) -> usize {
    match scenario {
        Scenario::Unlimited => 0,
        Scenario::Single => k - 1,
        Scenario::Limited => {
            let m = (k as u64).div_ceil(u64::from(omega)) as usize;
            m - 1
        }
        Scenario::Duopoly => 0,
    }
}

/// Sweeps hypothetical sellers over a quality/cost grid and marks the ones
/// that could disclose at some equilibrium against the given population.
pub fn eligible_map(
    cfg: &MarketConfig,
    scenario: Scenario,
    omega: u32,
    population: &[SellerParams],
    q_axis: SweepAxis,
    c_axis: SweepAxis,
) -> Result<EligibleMap, ConfigError> {
    if cfg.eps0 == 0.0 {
        return Err(ConfigError::DegenerateBias);
    }
    let slots = shield_slots(scenario, cfg.k, omega);
    // The best shields are the eligible sellers with the highest quality
    // net of cost: folding them into the set removes their displacement
    // threat. Whatever cannot be folded bounds the members from below.
    let mut eligible_net: Vec<f64> = Vec::new();
    let mut outside_bound = f64::NEG_INFINITY;
    for s in population {
        let net = s.quality - s.cost;
        if eligible(s.quality, s.cost, cfg)? {
            eligible_net.push(net);
        } else if net > outside_bound {
            outside_bound = net;
        }
    }
    eligible_net.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let displacement_bound = eligible_net
        .get(slots)
        .copied()
        .map_or(outside_bound, |v| v.max(outside_bound));

    let mut cells = Vec::with_capacity(q_axis.steps * c_axis.steps);
    for q in q_axis.points() {
        for c in c_axis.points() {
            let solo = eligible(q, c, cfg)?;
            let in_equilibrium = solo && q >= displacement_bound;
            cells.push(EligibleCell { q, c, eligible: solo, in_equilibrium });
        }
    }
    Ok(EligibleMap { scenario, displacement_bound, cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_cfg(k: usize) -> MarketConfig {
        // Only q0 / eps0 / k matter for maps; the roster is the population.
        MarketConfig::new(10.0, 2.0, k, vec![SellerParams::unlimited(0, 10.0, 1.0)])
    }

    #[test]
    fn structure_map_matches_region_inequalities() {
        let cfg = paper_cfg(1);
        let axis = SweepAxis::new(0.5, 20.0, 40).unwrap();
        for cell in structure_map(&cfg, axis).unwrap() {
            let (hi, lo) = if cell.q1 >= cell.q2 { (cell.q1, cell.q2) } else { (cell.q2, cell.q1) };
            if hi < 4.0 {
                assert_eq!(cell.structure, Structure::NoneDiscloses);
            } else if lo < 4.0 {
                assert_eq!(cell.structure, Structure::LowNeverDiscloses);
            }
        }
    }

    #[test]
    fn default_population_has_200_sellers() {
        let pop = default_population();
        assert_eq!(pop.len(), 200);
        assert!(pop.iter().any(|s| s.quality == 20.0 && s.cost == 1.0));
    }

    #[test]
    fn single_capacity_region_is_the_eligibility_frontier() {
        let cfg = paper_cfg(32);
        let pop = default_population();
        let q_axis = SweepAxis::new(1.0, 20.0, 77).unwrap(); // step 0.25
        let c_axis = SweepAxis::new(1.0, 10.0, 37).unwrap(); // step 0.25
        let map =
            eligible_map(&cfg, Scenario::Single, 1, &pop, q_axis, c_axis).unwrap();
        assert!(map.displacement_bound <= 12.0 + 1e-9);
        for cell in &map.cells {
            assert_eq!(cell.in_equilibrium, cell.eligible);
        }
        // The frontier opens just above q = 12 at the cheapest cost.
        let min_q = map
            .cells
            .iter()
            .filter(|c| c.in_equilibrium)
            .map(|c| c.q)
            .fold(f64::INFINITY, f64::min);
        assert!((min_q - 12.25).abs() < 1e-9);
        assert!(!map.cells.iter().any(|c| c.q <= 12.0 && c.in_equilibrium));
    }

    #[test]
    fn unlimited_region_needs_dominant_quality() {
        let cfg = paper_cfg(32);
        let pop = default_population();
        let q_axis = SweepAxis::new(1.0, 20.0, 77).unwrap();
        let c_axis = SweepAxis::new(1.0, 10.0, 37).unwrap();
        let map =
            eligible_map(&cfg, Scenario::Unlimited, 1, &pop, q_axis, c_axis).unwrap();
        assert!((map.displacement_bound - 19.0).abs() < 1e-9);
        for cell in &map.cells {
            assert_eq!(cell.in_equilibrium, cell.eligible && cell.q >= 19.0);
        }
    }

    #[test]
    fn limited_region_sits_strictly_between() {
        let cfg = paper_cfg(32);
        let pop = default_population();
        let q_axis = SweepAxis::new(1.0, 20.0, 77).unwrap();
        let c_axis = SweepAxis::new(1.0, 10.0, 37).unwrap();
        let single =
            eligible_map(&cfg, Scenario::Single, 1, &pop, q_axis, c_axis).unwrap();
        let limited =
            eligible_map(&cfg, Scenario::Limited, 8, &pop, q_axis, c_axis).unwrap();
        let unlimited =
            eligible_map(&cfg, Scenario::Unlimited, 1, &pop, q_axis, c_axis).unwrap();
        // With the unit-spaced 200-seller roster the limited cutoff lands
        // exactly on quality 17.
        assert!((limited.displacement_bound - 17.0).abs() < 1e-9);
        let mut strictly_single = false;
        let mut strictly_limited = false;
        for ((s, l), u) in single.cells.iter().zip(&limited.cells).zip(&unlimited.cells) {
            assert!(u.in_equilibrium <= l.in_equilibrium);
            assert!(l.in_equilibrium <= s.in_equilibrium);
            strictly_single |= s.in_equilibrium && !l.in_equilibrium;
            strictly_limited |= l.in_equilibrium && !u.in_equilibrium;
        }
        assert!(strictly_single && strictly_limited);
    }
}
