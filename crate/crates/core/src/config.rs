//! Domain types and configuration validation shared by every other module.
//!
//! A market is a set of sellers (quality, marginal privacy cost, capacity)
//! facing `k` buyers whose prior belief about undisclosed quality is
//! `q0` with a uniform estimation bias on `[-eps0, eps0]`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Global absolute tolerance for floating-point comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A seller's sharing capacity: how many buyers he can serve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Capacity {
    Limited(u32),
    Unlimited,
}

impl Capacity {
    pub fn as_units(&self) -> Option<u32> {
        match self {
            Capacity::Limited(w) => Some(*w),
            Capacity::Unlimited => None,
        }
    }

    /// Units available against a market with `k` buyers (an unlimited seller
    /// can always absorb all of them).
    pub fn units_for(&self, k: usize) -> u64 {
        match self {
            Capacity::Limited(w) => u64::from(*w),
            Capacity::Unlimited => k as u64,
        }
    }
}

impl Serialize for Capacity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Capacity::Limited(w) => s.serialize_u32(*w),
            Capacity::Unlimited => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Capacity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = Capacity;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a positive integer or \"inf\"")
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<Capacity, E> {
                if v == 0 || v > u64::from(u32::MAX) {
                    return Err(E::custom(format!("capacity {v} out of range")));
                }
                Ok(Capacity::Limited(v as u32))
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<Capacity, E> {
                if v <= 0 {
                    return Err(E::custom(format!("capacity {v} must be >= 1")));
                }
                self.visit_u64(v as u64)
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<Capacity, E> {
                match v {
                    "inf" => Ok(Capacity::Unlimited),
                    other => Err(E::custom(format!("unknown capacity {other:?}"))),
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// One seller: true commodity quality, marginal privacy cost, capacity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SellerParams {
    pub id: usize,
    #[serde(rename = "q")]
    pub quality: f64,
    #[serde(rename = "c")]
    pub cost: f64,
    #[serde(rename = "cap", default = "unlimited")]
    pub capacity: Capacity,
}

fn unlimited() -> Capacity {
    Capacity::Unlimited
}

impl SellerParams {
    pub fn new(id: usize, quality: f64, cost: f64, capacity: Capacity) -> Self {
        SellerParams { id, quality, cost, capacity }
    }

    pub fn unlimited(id: usize, quality: f64, cost: f64) -> Self {
        SellerParams::new(id, quality, cost, Capacity::Unlimited)
    }
}

/// Market configuration: buyer prior, bias half-width, seller roster, buyer count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketConfig {
    /// Buyers' average prior belief about an undisclosed quality.
    pub q0: f64,
    /// Half-width of the uniform estimation bias.
    pub eps0: f64,
    /// Number of buyers.
    pub k: usize,
    pub sellers: Vec<SellerParams>,
}

/// Non-fatal findings from validation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ValidationWarning {
    /// The bias half-width exceeds a third of the prior. Closed-form
    /// operations refuse to run in this regime; the oracle and simulator
    /// still work.
    BiasExceedsThird { eps0: f64, q0: f64 },
}

impl fmt::Display for ValidationWarning {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            ValidationWarning::BiasExceedsThird { eps0, q0 } => {
                write!(f, "eps0 = {eps0} exceeds q0/3 = {}", q0 / 3.0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    NonPositivePrior(f64),
    NegativeBias(f64),
    NoSellers,
    NoBuyers,
    NegativeQuality { id: usize, q: f64 },
    NegativeCost { id: usize, c: f64 },
    DuplicateSellerId(usize),
    /// Strategy profile length does not match the seller roster.
    ProfileLength { expected: usize, got: usize },
    DisclosureOutOfRange { seller: usize, alpha: f64 },
    NegativePrice { seller: usize, price: f64 },
    NotFinite(&'static str),
    /// A closed-form operation was asked to run outside `eps0 <= q0/3`.
    OutsideBiasAssumption { eps0: f64, q0: f64 },
    /// An operation whose geometry needs `eps0 > 0` was given zero bias.
    DegenerateBias,
    /// A realized bias draw falls outside `[-eps0, eps0]`.
    BiasOutsideSupport { eps: f64, eps0: f64 },
    /// Capacity-scenario analysis requires total supply above demand.
    SupplyNotAboveDemand { supply: u64, k: usize },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        use ConfigError::*;
        match self {
            NonPositivePrior(q0) => write!(f, "prior q0 = {q0} must be > 0"),
            NegativeBias(e) => write!(f, "bias eps0 = {e} must be >= 0"),
            NoSellers => write!(f, "seller list is empty"),
            NoBuyers => write!(f, "buyer count k must be >= 1"),
            NegativeQuality { id, q } => write!(f, "seller {id}: quality {q} must be >= 0"),
            NegativeCost { id, c } => write!(f, "seller {id}: cost {c} must be >= 0"),
            DuplicateSellerId(id) => write!(f, "duplicate seller id {id}"),
            ProfileLength { expected, got } => {
                write!(f, "profile has {got} entries for {expected} sellers")
            }
            DisclosureOutOfRange { seller, alpha } => {
                write!(f, "seller {seller}: disclosure {alpha} outside [0, 1]")
            }
            NegativePrice { seller, price } => {
                write!(f, "seller {seller}: price {price} must be >= 0")
            }
            NotFinite(what) => write!(f, "{what} is not finite"),
            OutsideBiasAssumption { eps0, q0 } => write!(
                f,
                "closed forms require eps0 <= q0/3 (got eps0 = {eps0}, q0 = {q0}); \
                 use the numeric oracle instead"
            ),
            DegenerateBias => write!(
                f,
                "operation requires eps0 > 0; run the numeric oracle benchmark at eps0 = 0"
            ),
            BiasOutsideSupport { eps, eps0 } => {
                write!(f, "bias {eps} outside the support [-{eps0}, {eps0}]")
            }
            SupplyNotAboveDemand { supply, k } => {
                write!(f, "total supply {supply} must exceed the {k} buyers")
            }
        }
    }
}

impl std::error::Error for ConfigError {}

impl MarketConfig {
    pub fn new(q0: f64, eps0: f64, k: usize, sellers: Vec<SellerParams>) -> Self {
        MarketConfig { q0, eps0, k, sellers }
    }

    /// Two-seller market with unlimited capacities and one buyer.
    pub fn duopoly(q0: f64, eps0: f64, q: [f64; 2], c: [f64; 2]) -> Self {
        MarketConfig::new(
            q0,
            eps0,
            1,
            vec![
                SellerParams::unlimited(0, q[0], c[0]),
                SellerParams::unlimited(1, q[1], c[1]),
            ],
        )
    }

    /// Checks every invariant. Returns the warnings (possibly empty) on
    /// success; validation is idempotent and never mutates the config.
    pub fn validate(&self) -> Result<Vec<ValidationWarning>, ConfigError> {
        if !self.q0.is_finite() || !self.eps0.is_finite() {
            return Err(ConfigError::NotFinite("prior or bias"));
        }
        if self.q0 <= 0.0 {
            return Err(ConfigError::NonPositivePrior(self.q0));
        }
        if self.eps0 < 0.0 {
            return Err(ConfigError::NegativeBias(self.eps0));
        }
        if self.sellers.is_empty() {
            return Err(ConfigError::NoSellers);
        }
        if self.k == 0 {
            return Err(ConfigError::NoBuyers);
        }
        let mut seen = BTreeSet::new();
        for s in &self.sellers {
            if !s.quality.is_finite() || !s.cost.is_finite() {
                return Err(ConfigError::NotFinite("seller quality or cost"));
            }
            if s.quality < 0.0 {
                return Err(ConfigError::NegativeQuality { id: s.id, q: s.quality });
            }
            if s.cost < 0.0 {
                return Err(ConfigError::NegativeCost { id: s.id, c: s.cost });
            }
            if !seen.insert(s.id) {
                return Err(ConfigError::DuplicateSellerId(s.id));
            }
        }
        let mut warnings = Vec::new();
        if self.eps0 > self.q0 / 3.0 {
            warnings.push(ValidationWarning::BiasExceedsThird { eps0: self.eps0, q0: self.q0 });
        }
        Ok(warnings)
    }

    /// Closed-form results are only derived under `eps0 <= q0/3`; operations
    /// built on them call this and refuse to run outside the assumption.
    pub fn require_bias_assumption(&self) -> Result<(), ConfigError> {
        if self.eps0 > self.q0 / 3.0 {
            return Err(ConfigError::OutsideBiasAssumption { eps0: self.eps0, q0: self.q0 });
        }
        Ok(())
    }

    pub fn n_sellers(&self) -> usize {
        self.sellers.len()
    }

    pub fn seller(&self, id: usize) -> &SellerParams {
        self.sellers.iter().find(|s| s.id == id).expect("unknown seller id")
    }

    /// Total units the roster can serve against this market's buyers.
    pub fn total_supply(&self) -> u64 {
        self.sellers.iter().map(|s| s.capacity.units_for(self.k)).sum()
    }
}

/// Disclosure levels and prices for all sellers, indexed like the roster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyProfile {
    pub alpha: Vec<f64>,
    pub prices: Vec<f64>,
}

impl StrategyProfile {
    pub fn new(alpha: Vec<f64>, prices: Vec<f64>) -> Self {
        StrategyProfile { alpha, prices }
    }

    pub fn validate(&self, cfg: &MarketConfig) -> Result<(), ConfigError> {
        let n = cfg.n_sellers();
        if self.alpha.len() != n {
            return Err(ConfigError::ProfileLength { expected: n, got: self.alpha.len() });
        }
        if self.prices.len() != n {
            return Err(ConfigError::ProfileLength { expected: n, got: self.prices.len() });
        }
        for (i, &a) in self.alpha.iter().enumerate() {
            if !(0.0..=1.0).contains(&a) {
                return Err(ConfigError::DisclosureOutOfRange { seller: i, alpha: a });
            }
        }
        for (i, &p) in self.prices.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(ConfigError::NegativePrice { seller: i, price: p });
            }
        }
        Ok(())
    }
}

/// What a single buyer did.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Choice {
    Seller(usize),
    Tie(Vec<usize>),
    Exit,
}

/// A buyer's realized decision: choice, drawn bias, and realized payoff
/// (zero on exit).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuyerOutcome {
    pub choice: Choice,
    pub bias: f64,
    pub payoff: f64,
}

/// Capacity regime of the N-seller game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Duopoly,
    Unlimited,
    Single,
    Limited,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        let s = match self {
            Scenario::Duopoly => "duopoly",
            Scenario::Unlimited => "unlimited",
            Scenario::Single => "single",
            Scenario::Limited => "limited",
        };
        f.write_str(s)
    }
}

/// One equilibrium: the disclosing set, supporting prices and expected
/// profits (roster order), and which rule produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Equilibrium {
    pub disclosers: BTreeSet<usize>,
    /// `None` when pricing detail was capped for a large report.
    pub prices: Option<Vec<f64>>,
    pub expected_profits: Option<Vec<f64>>,
    pub case: String,
    /// "closed-form" or "numeric" (multi-discloser prices come from the
    /// grid best-response solver).
    pub price_basis: String,
}

/// All equilibria of one scenario, plus exact cardinality bounds that stay
/// valid even when the listing is truncated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub scenario: Scenario,
    pub equilibria: Vec<Equilibrium>,
    pub multiple: bool,
    /// Listing stopped at the enumeration cap.
    pub truncated: bool,
    /// Exact (min, max) of |disclosing set| over all equilibria.
    pub cardinality: (usize, usize),
    pub warnings: Vec<String>,
}

impl EquilibriumReport {
    pub fn discloser_families(&self) -> Vec<&BTreeSet<usize>> {
        self.equilibria.iter().map(|e| &e.disclosers).collect()
    }
}
