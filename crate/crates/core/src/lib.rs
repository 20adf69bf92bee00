//! Equilibria of the two-stage information-disclosure and pricing game
//! among competing sellers in a sharing market.
//!
//! Sellers simultaneously choose how much private commodity information to
//! reveal and what to charge; buyers with noisy priors over undisclosed
//! quality then pick the payoff-maximizing seller with spare capacity.
//! The crate provides:
//!
//! - [`config`]: domain types, validation, and the JSON config schema;
//! - [`duopoly`]: closed forms for the two-seller, one-buyer game — buyer
//!   choice, win probabilities, the pricing equilibrium, disclosure-stage
//!   profits, and the quality-region classification;
//! - [`oligopoly`]: N-seller equilibrium families with binary disclosure
//!   under unlimited, single, and limited capacity, and the discloser-count
//!   ordering across scenarios;
//! - [`oracle`]: brute-force grid search that independently re-derives and
//!   verifies everything the closed forms claim;
//! - [`sim`]: a seeded Monte Carlo market simulator;
//! - [`maps`]: parameter sweeps producing region maps as data.

pub mod config;
pub mod duopoly;
pub mod maps;
pub mod oligopoly;
pub mod oracle;
pub mod sim;

pub use config::{
    BuyerOutcome, Capacity, Choice, ConfigError, Equilibrium, EquilibriumReport, MarketConfig,
    Scenario, SellerParams, StrategyProfile, ValidationWarning, DEFAULT_TOL,
};
pub use duopoly::{Category, Pattern, PricingOutcome, PureCase, Structure};
pub use oracle::GridSpec;
