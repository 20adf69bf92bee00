//! Closed-form analysis of the two-seller, one-buyer game: buyer choice,
//! expected win probabilities, the pricing equilibrium, disclosure-stage
//! expected profits, and the quality-region classification of which
//! behavior patterns can arise.

use std::fmt;

use serde::Serialize;

use crate::config::{BuyerOutcome, Choice, ConfigError, MarketConfig, StrategyProfile};

/// Which branch of the pricing equilibrium fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PureCase {
    /// First seller prices positive, second at zero (large quality edge).
    FirstCaptures,
    /// Both price positive (small expected-quality gap).
    Shared,
    /// Second seller prices positive, first at zero.
    SecondCaptures,
}

/// Outcome of the pricing stage for fixed disclosure levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PricingOutcome {
    Pure { prices: [f64; 2], case: PureCase },
    /// Equal positive disclosure: undercutting never settles.
    NoPureEquilibrium,
    /// No disclosure at all: plain price competition, both at zero.
    ZeroZero,
}

impl PricingOutcome {
    pub fn prices(&self) -> Option<[f64; 2]> {
        match self {
            PricingOutcome::Pure { prices, .. } => Some(*prices),
            PricingOutcome::ZeroZero => Some([0.0, 0.0]),
            PricingOutcome::NoPureEquilibrium => None,
        }
    }
}

/// Quality relative to the buyers' prior band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Category {
    Good,
    Medium,
    Poor,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(match self {
            Category::Good => "G",
            Category::Medium => "M",
            Category::Poor => "P",
        })
    }
}

/// Which behavior patterns the quality pair admits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Structure {
    /// Every pattern can arise for some costs.
    AllAchievable,
    /// Coexisting equilibria cannot arise; the rest can.
    NoMixedPattern,
    /// The lower-quality seller never discloses; the higher one may.
    LowNeverDiscloses,
    /// Nobody ever discloses, at any cost.
    NoneDiscloses,
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(match self {
            Structure::AllAchievable => "all-achievable",
            Structure::NoMixedPattern => "no-mixed-pattern",
            Structure::LowNeverDiscloses => "low-never-discloses",
            Structure::NoneDiscloses => "none-discloses",
        })
    }
}

/// The equilibrium set of the disclosure stage, for ordered qualities
/// (first seller at least as good as the second).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pattern {
    /// Unique equilibrium: only the higher-quality seller discloses.
    HighOnly,
    /// Two coexisting equilibria: either seller (alone) disclosing.
    Either,
    /// Unique equilibrium: only the lower-quality seller discloses.
    LowOnly,
    /// Unique equilibrium: no disclosure.
    Neither,
}

impl Pattern {
    /// Roman-numeral label used in tables.
    pub fn roman(&self) -> &'static str {
        match self {
            Pattern::HighOnly => "I",
            Pattern::Either => "II",
            Pattern::LowOnly => "III",
            Pattern::Neither => "IV",
        }
    }

    /// Relabels the pattern after swapping the two sellers.
    pub fn swapped(&self) -> Pattern {
        match self {
            Pattern::HighOnly => Pattern::LowOnly,
            Pattern::LowOnly => Pattern::HighOnly,
            other => *other,
        }
    }

    /// Whether this pattern can arise inside the given quality structure.
    pub fn achievable_in(&self, s: Structure) -> bool {
        match s {
            Structure::AllAchievable => true,
            Structure::NoMixedPattern => *self != Pattern::Either,
            Structure::LowNeverDiscloses => {
                matches!(self, Pattern::HighOnly | Pattern::Neither)
            }
            Structure::NoneDiscloses => *self == Pattern::Neither,
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(self.roman())
    }
}

/// Difference of the buyer's expected qualities between the two sellers at
/// zero estimation bias.
pub fn expected_quality_gap(a_i: f64, a_j: f64, q_i: f64, q_j: f64, q0: f64) -> f64 {
    a_i * (q_i - q0) - a_j * (q_j - q0)
}

/// Buyer payoff from choosing a seller with disclosure `a`, price `p`, true
/// quality `q`, at realized bias `eps`.
pub fn buyer_payoff(a: f64, q: f64, p: f64, q0: f64, eps: f64) -> f64 {
    a * q + (1.0 - a) * (q0 + eps) - p
}

/// The buyer's realized decision given a drawn bias.
pub fn buyer_choice(
    profile: &StrategyProfile,
    eps: f64,
    cfg: &MarketConfig,
) -> Result<BuyerOutcome, ConfigError> {
    profile.validate(cfg)?;
    if eps.abs() > cfg.eps0 {
        return Err(ConfigError::BiasOutsideSupport { eps, eps0: cfg.eps0 });
    }
    let payoffs: Vec<f64> = cfg
        .sellers
        .iter()
        .enumerate()
        .map(|(i, s)| buyer_payoff(profile.alpha[i], s.quality, profile.prices[i], cfg.q0, eps))
        .collect();
    let best = payoffs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if best < 0.0 {
        return Ok(BuyerOutcome { choice: Choice::Exit, bias: eps, payoff: 0.0 });
    }
    let winners: Vec<usize> = cfg
        .sellers
        .iter()
        .enumerate()
        .filter(|(i, _)| payoffs[*i] == best)
        .map(|(_, s)| s.id)
        .collect();
    let choice =
        if winners.len() == 1 { Choice::Seller(winners[0]) } else { Choice::Tie(winners) };
    Ok(BuyerOutcome { choice, bias: eps, payoff: best })
}

/// Expected probability of each seller being selected, over the uniform
/// estimation bias. Ignores the exit option; the probabilities always sum
/// to one (exit is impossible at the prices these formulas are used with).
pub fn win_probability(
    alpha: [f64; 2],
    prices: [f64; 2],
    q: [f64; 2],
    cfg: &MarketConfig,
) -> [f64; 2] {
    let gap = expected_quality_gap(alpha[0], alpha[1], q[0], q[1], cfg.q0);
    let margin = gap - (prices[0] - prices[1]);
    let d_alpha = alpha[0] - alpha[1];
    let eps0 = cfg.eps0;
    if eps0 == 0.0 || d_alpha == 0.0 {
        // Degenerate: the comparison no longer depends on the bias draw.
        let p0 = if margin > 0.0 {
            1.0
        } else if margin == 0.0 {
            0.5
        } else {
            0.0
        };
        return [p0, 1.0 - p0];
    }
    let t = margin / d_alpha;
    let p0 = if d_alpha > 0.0 {
        ((t + eps0) / (2.0 * eps0)).clamp(0.0, 1.0)
    } else {
        ((eps0 - t) / (2.0 * eps0)).clamp(0.0, 1.0)
    };
    [p0, 1.0 - p0]
}

/// Pricing-stage equilibrium formulas, valid for any bias half-width.
/// [`pricing_equilibrium`] gates them behind the bias assumption; the
/// oracle applies them as-is.
pub fn pricing_formulas(alpha: [f64; 2], q: [f64; 2], cfg: &MarketConfig) -> PricingOutcome {
    if alpha[0] == alpha[1] {
        return if alpha[0] == 0.0 {
            PricingOutcome::ZeroZero
        } else {
            PricingOutcome::NoPureEquilibrium
        };
    }
    let gap = expected_quality_gap(alpha[0], alpha[1], q[0], q[1], cfg.q0);
    let spread = cfg.eps0 * (alpha[0] - alpha[1]).abs();
    if gap >= 3.0 * spread {
        PricingOutcome::Pure { prices: [gap - spread, 0.0], case: PureCase::FirstCaptures }
    } else if gap <= -3.0 * spread {
        PricingOutcome::Pure { prices: [0.0, -gap - spread], case: PureCase::SecondCaptures }
    } else {
        PricingOutcome::Pure {
            prices: [(3.0 * spread + gap) / 3.0, (3.0 * spread - gap) / 3.0],
            case: PureCase::Shared,
        }
    }
}

/// Equilibrium of the pricing stage for fixed disclosure levels.
pub fn pricing_equilibrium(
    alpha: [f64; 2],
    q: [f64; 2],
    cfg: &MarketConfig,
) -> Result<PricingOutcome, ConfigError> {
    cfg.require_bias_assumption()?;
    Ok(pricing_formulas(alpha, q, cfg))
}

/// Disclosure-stage expected profits under the induced pricing outcome.
///
/// Equal positive disclosure has no pure pricing equilibrium; the ensuing
/// undercutting drives the lower-quality seller to a zero price, so the
/// profile is valued at its limit: the better seller keeps the full payoff
/// edge `a * (q_hi - q_lo)` net of his disclosure cost, the worse one pays
/// his disclosure cost for nothing.
pub(crate) fn expected_profits_unchecked(
    alpha: [f64; 2],
    q: [f64; 2],
    c: [f64; 2],
    cfg: &MarketConfig,
) -> [f64; 2] {
    match pricing_formulas(alpha, q, cfg) {
        PricingOutcome::ZeroZero => [0.0, 0.0],
        PricingOutcome::Pure { prices, .. } => {
            let pr = win_probability(alpha, prices, q, cfg);
            [
                prices[0] * pr[0] - c[0] * alpha[0],
                prices[1] * pr[1] - c[1] * alpha[1],
            ]
        }
        PricingOutcome::NoPureEquilibrium => {
            let a = alpha[0];
            if q[0] > q[1] {
                [a * (q[0] - q[1]) - c[0] * a, -c[1] * a]
            } else if q[1] > q[0] {
                [-c[0] * a, a * (q[1] - q[0]) - c[1] * a]
            } else {
                [-c[0] * a, -c[1] * a]
            }
        }
    }
}

/// Expected profits of both sellers at a disclosure pair, composing the
/// pricing equilibrium with the expected win probabilities.
pub fn expected_profits(
    alpha: [f64; 2],
    q: [f64; 2],
    c: [f64; 2],
    cfg: &MarketConfig,
) -> Result<[f64; 2], ConfigError> {
    cfg.require_bias_assumption()?;
    Ok(expected_profits_unchecked(alpha, q, c, cfg))
}

/// Good / medium / poor relative to the prior band. The upper boundary is
/// closed (a quality exactly at the top of the band counts as good), the
/// lower boundary belongs to the medium band.
pub fn quality_category(q: f64, cfg: &MarketConfig) -> Category {
    if q >= cfg.q0 + 3.0 * cfg.eps0 {
        Category::Good
    } else if q < cfg.q0 - 3.0 * cfg.eps0 {
        Category::Poor
    } else {
        Category::Medium
    }
}

/// Lower edge of the coexistence region as a function of the better
/// seller's quality, on the middle quality band.
fn coexistence_floor(q1: f64, cfg: &MarketConfig) -> f64 {
    let u = q1 - cfg.q0 - 6.0 * cfg.eps0;
    cfg.q0 - 6.0 * cfg.eps0 + (54.0 * cfg.eps0 * cfg.eps0 - u * u).sqrt()
}

/// Classifies which behavior patterns a quality pair admits. Accepts the
/// pair in either order.
pub fn classify_structure(q1: f64, q2: f64, cfg: &MarketConfig) -> Result<Structure, ConfigError> {
    cfg.require_bias_assumption()?;
    if cfg.eps0 == 0.0 {
        // The region geometry collapses; use the numeric oracle benchmark.
        return Err(ConfigError::DegenerateBias);
    }
    if q1 < 0.0 || q2 < 0.0 {
        return Err(ConfigError::NegativeQuality { id: 0, q: q1.min(q2) });
    }
    let (hi, lo) = if q1 >= q2 { (q1, q2) } else { (q2, q1) };
    let floor = cfg.q0 - 3.0 * cfg.eps0;
    let ceiling = cfg.q0 + 3.0 * cfg.eps0;
    let band_split = cfg.q0 + (6.0 - 3.0 * 5f64.sqrt()) * cfg.eps0;
    let coexist_top = cfg.q0 + (3.0 * 5f64.sqrt() - 6.0) * cfg.eps0;
    Ok(if hi < floor {
        Structure::NoneDiscloses
    } else if lo < floor {
        Structure::LowNeverDiscloses
    } else if hi < band_split {
        Structure::AllAchievable
    } else if hi < ceiling {
        if lo >= coexistence_floor(hi, cfg) {
            Structure::AllAchievable
        } else {
            Structure::NoMixedPattern
        }
    } else if lo >= coexist_top {
        Structure::AllAchievable
    } else {
        Structure::NoMixedPattern
    })
}

/// Like [`classify_structure`], also reporting whether the point lies within
/// `tol` of any region boundary (where the written inequalities leave the
/// label convention-dependent).
pub fn classify_structure_flagged(
    q1: f64,
    q2: f64,
    cfg: &MarketConfig,
    tol: f64,
) -> Result<(Structure, bool), ConfigError> {
    let label = classify_structure(q1, q2, cfg)?;
    let (hi, lo) = if q1 >= q2 { (q1, q2) } else { (q2, q1) };
    let floor = cfg.q0 - 3.0 * cfg.eps0;
    let ceiling = cfg.q0 + 3.0 * cfg.eps0;
    let band_split = cfg.q0 + (6.0 - 3.0 * 5f64.sqrt()) * cfg.eps0;
    let coexist_top = cfg.q0 + (3.0 * 5f64.sqrt() - 6.0) * cfg.eps0;
    let mut dist = (hi - floor)
        .abs()
        .min((lo - floor).abs())
        .min((hi - band_split).abs())
        .min((hi - ceiling).abs());
    if hi >= ceiling {
        dist = dist.min((lo - coexist_top).abs());
    } else if hi >= band_split {
        dist = dist.min((lo - coexistence_floor(hi, cfg)).abs());
    }
    Ok((label, dist <= tol))
}

/// Behavior pattern at a quality/cost point, derived by the brute-force
/// oracle and cross-checked against the quality-region classification.
/// Accepts the sellers in either order.
pub fn behavior_pattern(
    q: [f64; 2],
    c: [f64; 2],
    cfg: &MarketConfig,
    grid: &crate::oracle::GridSpec,
) -> Result<Pattern, PatternError> {
    if cfg.eps0 == 0.0 {
        return Err(PatternError::DegenerateBias);
    }
    let structure = classify_structure(q[0], q[1], cfg).map_err(PatternError::Config)?;
    let swap = q[0] < q[1];
    let (qq, cc) = if swap { ([q[1], q[0]], [c[1], c[0]]) } else { (q, c) };
    let derived = crate::oracle::derive_pattern(qq, cc, cfg, grid)
        .map_err(|e| PatternError::Oracle(format!("{e}")))?;
    let canonical = derived.pattern;
    if !canonical.achievable_in(structure) {
        return Err(PatternError::StructureMismatch { pattern: canonical, structure });
    }
    Ok(if swap { canonical.swapped() } else { canonical })
}

/// Errors from [`behavior_pattern`].
#[derive(Debug, Clone, PartialEq)]
pub enum PatternError {
    Config(ConfigError),
    DegenerateBias,
    /// The oracle's verified equilibrium set was ambiguous.
    Oracle(String),
    /// The derived pattern is not achievable in the classified structure.
    StructureMismatch { pattern: Pattern, structure: Structure },
}

impl fmt::Display for PatternError {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            PatternError::Config(e) => write!(f, "{e}"),
            PatternError::DegenerateBias => {
                write!(f, "behavior patterns are undefined at eps0 = 0; use the oracle benchmark")
            }
            PatternError::Oracle(msg) => write!(f, "oracle ambiguity: {msg}"),
            PatternError::StructureMismatch { pattern, structure } => {
                write!(f, "derived pattern {pattern} is not achievable in structure {structure}")
            }
        }
    }
}

impl std::error::Error for PatternError {}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(q: [f64; 2]) -> MarketConfig {
        MarketConfig::duopoly(10.0, 2.0, q, [1.0, 1.0])
    }

    #[test]
    fn quality_gap_examples() {
        assert_eq!(expected_quality_gap(1.0, 0.0, 12.0, 5.0, 10.0), 2.0);
        assert_eq!(expected_quality_gap(0.0, 0.0, 3.0, 99.0, 10.0), 0.0);
        assert_eq!(expected_quality_gap(1.0, 1.0, 7.5, 7.5, 10.0), 0.0);
    }

    #[test]
    fn buyer_choice_examples() {
        let market = cfg([16.0, 9.0]);
        let out = buyer_choice(
            &StrategyProfile::new(vec![1.0, 0.0], vec![4.0, 0.0]),
            0.0,
            &market,
        )
        .unwrap();
        assert_eq!(out.choice, Choice::Seller(0));
        assert_eq!(out.payoff, 12.0);

        let out = buyer_choice(
            &StrategyProfile::new(vec![0.0, 0.0], vec![0.0, 0.0]),
            1.5,
            &market,
        )
        .unwrap();
        assert_eq!(out.choice, Choice::Tie(vec![0, 1]));

        let out = buyer_choice(
            &StrategyProfile::new(vec![0.0, 0.0], vec![15.0, 15.0]),
            1.0,
            &market,
        )
        .unwrap();
        assert_eq!(out.choice, Choice::Exit);
        assert_eq!(out.payoff, 0.0);

        assert!(buyer_choice(
            &StrategyProfile::new(vec![0.0, 0.0], vec![0.0, 0.0]),
            2.5,
            &market,
        )
        .is_err());
    }

    #[test]
    fn win_probability_examples() {
        let market = cfg([16.0, 9.0]);
        assert_eq!(
            win_probability([1.0, 0.0], [4.0, 0.0], [16.0, 9.0], &market),
            [1.0, 0.0]
        );
        let market = cfg([12.0, 9.0]);
        assert_eq!(
            win_probability([1.0, 0.0], [2.0, 0.0], [12.0, 9.0], &market),
            [0.5, 0.5]
        );
        let pr = win_probability([1.0, 0.0], [1.0, 0.0], [12.0, 9.0], &market);
        assert!((pr[0] - 0.75).abs() < 1e-12);
        assert!((pr[0] + pr[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn win_probability_degenerate_bias_is_an_indicator() {
        let market = MarketConfig::duopoly(10.0, 0.0, [12.0, 9.0], [1.0, 1.0]);
        assert_eq!(win_probability([1.0, 0.0], [1.0, 0.0], [12.0, 9.0], &market), [1.0, 0.0]);
        assert_eq!(win_probability([1.0, 0.0], [2.0, 0.0], [12.0, 9.0], &market), [0.5, 0.5]);
        assert_eq!(win_probability([1.0, 0.0], [3.0, 0.0], [12.0, 9.0], &market), [0.0, 1.0]);
    }

    #[test]
    fn pricing_examples() {
        let market = cfg([16.0, 9.0]);
        assert_eq!(
            pricing_equilibrium([1.0, 0.0], [16.0, 9.0], &market).unwrap(),
            PricingOutcome::Pure { prices: [4.0, 0.0], case: PureCase::FirstCaptures }
        );
        assert_eq!(
            pricing_equilibrium([1.0, 0.0], [10.0, 9.0], &market).unwrap(),
            PricingOutcome::Pure { prices: [2.0, 2.0], case: PureCase::Shared }
        );
        assert_eq!(
            pricing_equilibrium([0.5, 0.5], [12.0, 10.0], &market).unwrap(),
            PricingOutcome::NoPureEquilibrium
        );
        assert_eq!(
            pricing_equilibrium([0.0, 0.0], [12.0, 10.0], &market).unwrap(),
            PricingOutcome::ZeroZero
        );
    }

    #[test]
    fn pricing_branches_agree_at_the_seams() {
        // At |gap| = 3 * spread both adjacent formulas give the same prices.
        for eps0 in [0.5, 1.0, 2.0, 3.0] {
            let spread: f64 = eps0; // alpha = (1, 0)
            for sign in [1.0, -1.0] {
                let gap: f64 = sign * 3.0 * spread;
                let edge = [gap - spread, 0.0];
                let shared = [(3.0 * spread + gap) / 3.0, (3.0 * spread - gap) / 3.0];
                if sign > 0.0 {
                    assert!((edge[0] - shared[0]).abs() < 1e-12);
                    assert!((edge[1] - shared[1]).abs() < 1e-12);
                } else {
                    let edge = [0.0, -gap - spread];
                    assert!((edge[0] - shared[0]).abs() < 1e-12);
                    assert!((edge[1] - shared[1]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn expected_profit_examples() {
        let market = cfg([16.0, 9.0]);
        assert_eq!(
            expected_profits([0.0, 0.0], [16.0, 9.0], [1.0, 1.0], &market).unwrap(),
            [0.0, 0.0]
        );
        assert_eq!(
            expected_profits([1.0, 0.0], [16.0, 9.0], [1.0, 1.0], &market).unwrap(),
            [3.0, 0.0]
        );
        let p = expected_profits([0.5, 0.5], [12.0, 10.0], [1.0, 1.0], &market).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12);
        assert!((p[1] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn quality_categories() {
        let market = cfg([16.0, 9.0]);
        assert_eq!(quality_category(17.0, &market), Category::Good);
        assert_eq!(quality_category(16.0, &market), Category::Good); // closed endpoint
        assert_eq!(quality_category(10.0, &market), Category::Medium);
        assert_eq!(quality_category(4.0, &market), Category::Medium);
        assert_eq!(quality_category(3.9999, &market), Category::Poor);
    }

    #[test]
    fn structure_examples() {
        let market = cfg([16.0, 9.0]);
        assert_eq!(classify_structure(3.0, 2.0, &market).unwrap(), Structure::NoneDiscloses);
        assert_eq!(classify_structure(12.0, 3.0, &market).unwrap(), Structure::LowNeverDiscloses);
        assert_eq!(classify_structure(8.0, 5.0, &market).unwrap(), Structure::AllAchievable);
        assert_eq!(classify_structure(18.0, 5.0, &market).unwrap(), Structure::NoMixedPattern);
        // Order-insensitive.
        assert_eq!(classify_structure(5.0, 18.0, &market).unwrap(), Structure::NoMixedPattern);
    }

    #[test]
    fn structure_refuses_degenerate_bias() {
        let market = MarketConfig::duopoly(10.0, 0.0, [12.0, 9.0], [1.0, 1.0]);
        assert!(classify_structure(12.0, 9.0, &market).is_err());
    }

    #[test]
    fn structure_boundary_flag() {
        let market = cfg([16.0, 9.0]);
        let (_, on_edge) = classify_structure_flagged(4.0005, 2.0, &market, 1e-3).unwrap();
        assert!(on_edge);
        let (_, on_edge) = classify_structure_flagged(8.0, 5.0, &market, 1e-3).unwrap();
        assert!(!on_edge);
    }

    #[test]
    fn behavior_pattern_examples() {
        let market = cfg([16.0, 9.0]);
        let grid = crate::oracle::GridSpec::with_steps(0.01, 13.0, 0.05);
        assert_eq!(
            behavior_pattern([3.0, 2.0], [0.0, 0.0], &market, &grid).unwrap(),
            Pattern::Neither
        );
        assert_eq!(
            behavior_pattern([3.0, 2.0], [4.0, 7.0], &market, &grid).unwrap(),
            Pattern::Neither
        );
        assert_eq!(
            behavior_pattern([12.0, 3.0], [0.1, 1.0], &market, &grid).unwrap(),
            Pattern::HighOnly
        );
        assert_eq!(
            behavior_pattern([12.0, 3.0], [5.0, 1.0], &market, &grid).unwrap(),
            Pattern::Neither
        );
        // Unordered input is relabeled.
        assert_eq!(
            behavior_pattern([3.0, 12.0], [1.0, 0.1], &market, &grid).unwrap(),
            Pattern::LowOnly
        );
    }

    #[test]
    fn coexistence_floor_meets_band_edges() {
        let market = cfg([16.0, 9.0]);
        let band_split = 10.0 + (6.0 - 3.0 * 5f64.sqrt()) * 2.0;
        let floor_at_split = coexistence_floor(band_split, &market);
        assert!((floor_at_split - 4.0).abs() < 1e-9);
        let top = coexistence_floor(16.0, &market);
        assert!((top - (10.0 + (3.0 * 5f64.sqrt() - 6.0) * 2.0)).abs() < 1e-9);
    }
}
