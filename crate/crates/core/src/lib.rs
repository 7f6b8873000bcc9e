//! Tail statistics of high-frequency returns and trading volumes.
//!
//! The crate ingests tick-level trade data, aggregates it into paired
//! return/volume series under clock-time or trade-count intervals, estimates
//! power-law tail exponents by log-log least squares and the Hill estimator,
//! examines the exponent ratio and the implied price-impact exponent through
//! the conditional expectation E(r^2|V), and fits q-Gaussian distributions
//! to volume data. A deterministic synthetic-market generator provides
//! ground truth for all of it.

// Negated float comparisons are load-bearing here: `!(x > 0.0)` rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bars;
pub mod error;
pub mod impact;
pub mod marketdata;
pub mod optim;
pub mod qgauss;
pub mod quad;
pub mod stats;
pub mod synth;
pub mod tails;

pub use bars::{aggregate, AggregationScheme, BarSeries};
pub use error::{Error, Result};
pub use impact::{ImpactCurve, LinearImpactFit};
pub use marketdata::{parse_trades, TradeRecord, TradeSeries};
pub use qgauss::QGaussianParams;
pub use synth::{gen_market, gen_pareto, MarketSpec, VolumeLaw};
pub use tails::{ccdf, hill, Ccdf, FitMethod, TailFit};
