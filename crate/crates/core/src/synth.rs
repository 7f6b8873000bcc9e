//! Deterministic synthetic market: heavy-tailed volumes driving a price path
//! through a prescribed power-law impact, used as the ground-truth oracle for
//! every estimator in the crate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::marketdata::{TradeRecord, TradeSeries};
use crate::qgauss::QGaussianParams;
use crate::stats;

/// Distribution of per-trade volumes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum VolumeLaw {
    /// P(V > x) = (x/x_min)^-alpha.
    Pareto { alpha: f64, x_min: f64 },
    /// Absolute values of q-Gaussian draws (tail exponent (3-q)/(q-1)).
    QGaussianAbs { q: f64, sigma: f64 },
}

/// Full specification of a synthetic market.
///
/// Per-trade return magnitudes are c V^beta with the constant c fixed so the
/// magnitudes have sample std `return_scale` (unit variance would overflow a
/// 10^6-step log-price random walk, and every estimator here is scale-free).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarketSpec {
    pub symbol: String,
    pub n_trades: usize,
    pub volume_law: VolumeLaw,
    /// Impact exponent in (0, 1).
    pub impact_beta: f64,
    /// Std of the multiplicative lognormal noise on the impact; 0 = exact.
    pub noise_sigma: f64,
    pub base_price: f64,
    /// Uniform inter-trade spacing in milliseconds.
    pub dt_ms: i64,
    /// Sample std of the generated per-trade return magnitudes.
    pub return_scale: f64,
    pub seed: u64,
}

impl Default for MarketSpec {
    fn default() -> Self {
        MarketSpec {
            symbol: "SYNTH".into(),
            n_trades: 100_000,
            volume_law: VolumeLaw::Pareto { alpha: 2.0, x_min: 100.0 },
            impact_beta: 0.5,
            noise_sigma: 0.0,
            base_price: 100.0,
            dt_ms: 1000,
            return_scale: 1e-3,
            seed: 42,
        }
    }
}

impl MarketSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_trades < 2 {
            return Err(Error::Parameter("n_trades must be at least 2".into()));
        }
        match self.volume_law {
            VolumeLaw::Pareto { alpha, x_min } => {
                if !(alpha > 0.0) || !(x_min > 0.0) {
                    return Err(Error::Parameter(
                        "Pareto law needs alpha > 0 and x_min > 0".into(),
                    ));
                }
            }
            VolumeLaw::QGaussianAbs { q, sigma } => {
                if !(q > 1.0 && q < 3.0) || !(sigma > 0.0) {
                    return Err(Error::Parameter(
                        "q-Gaussian law needs 1 < q < 3 and sigma > 0".into(),
                    ));
                }
            }
        }
        if !(self.impact_beta > 0.0 && self.impact_beta < 1.0) {
            return Err(Error::Parameter(format!(
                "impact_beta must lie in (0, 1), got {}",
                self.impact_beta
            )));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(Error::Parameter("noise_sigma must be nonnegative".into()));
        }
        if !(self.base_price > 0.0) {
            return Err(Error::Parameter("base_price must be positive".into()));
        }
        if self.dt_ms < 1 {
            return Err(Error::Parameter("dt_ms must be at least 1".into()));
        }
        if !(self.return_scale > 0.0) {
            return Err(Error::Parameter("return_scale must be positive".into()));
        }
        Ok(())
    }
}

/// Pareto inverse transform: x = x_min u^{-1/alpha} for u in (0, 1].
pub fn pareto_quantile(u: f64, alpha: f64, x_min: f64) -> f64 {
    x_min * u.powf(-1.0 / alpha)
}

/// i.i.d. Pareto draws by inverse transform, deterministic in the seed.
pub fn gen_pareto(alpha: f64, x_min: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    if !(alpha > 0.0) || !(x_min > 0.0) {
        return Err(Error::Parameter("gen_pareto needs alpha > 0 and x_min > 0".into()));
    }
    if n < 1 {
        return Err(Error::Parameter("gen_pareto needs n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| pareto_quantile(1.0 - rng.random::<f64>(), alpha, x_min))
        .collect())
}

/// Generate the full synthetic trade tape.
///
/// Volumes come from the volume law (rounded up to at least one share); the
/// log price moves by sign * c V^beta per trade, optionally roughened by a
/// multiplicative lognormal factor, with the sign a fair coin.
pub fn gen_market(spec: &MarketSpec) -> Result<TradeSeries> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n_trades;

    let raw_volumes: Vec<f64> = match spec.volume_law {
        VolumeLaw::Pareto { alpha, x_min } => (0..n)
            .map(|_| pareto_quantile(1.0 - rng.random::<f64>(), alpha, x_min))
            .collect(),
        VolumeLaw::QGaussianAbs { q, sigma } => {
            let params = QGaussianParams::new(q, 0.0, sigma)?;
            params.sample_with(&mut rng, n).into_iter().map(|v| v.abs()).collect()
        }
    };
    let volumes: Vec<u64> = raw_volumes
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if v > 1e18 {
                return Err(Error::Generation {
                    index: i,
                    msg: format!("volume draw {v:.3e} exceeds the share-count range"),
                });
            }
            Ok((v.round() as u64).max(1))
        })
        .collect::<Result<_>>()?;

    // Impact magnitudes from the recorded (integer) volumes, so the price
    // path reproduces c V^beta exactly.
    let powered: Vec<f64> = volumes[1..]
        .iter()
        .map(|&v| (v as f64).powf(spec.impact_beta))
        .collect();
    // Unit-std scaling of the magnitudes; with a single return (or an
    // all-equal volume stream) fall back to scaling that magnitude itself.
    let scale_base = if powered.len() >= 2 {
        let std = stats::sample_std(&powered);
        if std > 0.0 {
            std
        } else {
            powered[0]
        }
    } else {
        powered[0]
    };
    let c = spec.return_scale / scale_base;

    let mut trades = Vec::with_capacity(n);
    trades.push(TradeRecord { timestamp_ms: 0, price: spec.base_price, volume: volumes[0] });
    let mut ln_price = spec.base_price.ln();
    for (i, m) in powered.iter().enumerate() {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let noise = if spec.noise_sigma > 0.0 {
            let z: f64 = StandardNormal.sample(&mut rng);
            (spec.noise_sigma * z).exp()
        } else {
            1.0
        };
        ln_price += sign * c * m * noise;
        if !(-690.0..=690.0).contains(&ln_price) {
            return Err(Error::Generation {
                index: i + 1,
                msg: format!("log price {ln_price:.2} left the representable range"),
            });
        }
        trades.push(TradeRecord {
            timestamp_ms: (i as i64 + 1) * spec.dt_ms,
            price: ln_price.exp(),
            volume: volumes[i + 1],
        });
    }
    TradeSeries::new(spec.symbol.clone(), trades)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bars::{self, AggregationScheme};
    use crate::marketdata;
    use crate::tails;
    use approx::assert_relative_eq;

    #[test]
    fn pareto_quantile_hand_value() {
        assert_relative_eq!(pareto_quantile(0.25, 2.0, 1.0), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn pareto_ccdf_at_two_x_min() {
        // P(X > 2) = 0.25 for alpha = 2, x_min = 1; 3 sigma binomial band.
        let draws = gen_pareto(2.0, 1.0, 1_000_000, 3).unwrap();
        let frac = draws.iter().filter(|x| **x > 2.0).count() as f64 / draws.len() as f64;
        assert!((frac - 0.25).abs() < 0.0015, "frac = {frac}");
    }

    #[test]
    fn pareto_hill_consistency() {
        let draws = gen_pareto(3.0, 1.0, 1_000_000, 4).unwrap();
        let fit = tails::hill(&draws, 10_000).unwrap();
        assert!((fit.alpha - 3.0).abs() < 0.09, "alpha = {}", fit.alpha);
    }

    #[test]
    fn market_is_deterministic_and_tiny_specs_work() {
        let spec = MarketSpec { n_trades: 2, ..MarketSpec::default() };
        let a = gen_market(&spec).unwrap();
        let b = gen_market(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
        assert!(a.trades().iter().all(|t| t.price > 0.0));
    }

    #[test]
    fn market_passes_validation() {
        let spec = MarketSpec { n_trades: 5_000, ..MarketSpec::default() };
        let series = gen_market(&spec).unwrap();
        let report = marketdata::validate(&series).unwrap();
        assert_eq!(report.n_trades, 5_000);
        assert_eq!(report.duplicate_timestamps, 0);
    }

    #[test]
    fn price_path_recovers_impact_exactly() {
        let spec = MarketSpec { n_trades: 3_000, noise_sigma: 0.0, ..MarketSpec::default() };
        let series = gen_market(&spec).unwrap();
        let trades = series.trades();
        let powered: Vec<f64> = trades[1..]
            .iter()
            .map(|t| (t.volume as f64).powf(spec.impact_beta))
            .collect();
        let c = spec.return_scale / crate::stats::sample_std(&powered);
        for i in 1..trades.len() {
            let r = (trades[i].price / trades[i - 1].price).ln().abs();
            let expect = c * (trades[i].volume as f64).powf(spec.impact_beta);
            assert!((r - expect).abs() < 1e-12, "trade {i}: {r} vs {expect}");
        }
    }

    #[test]
    fn eq5_closure_tick_by_tick() {
        // Pareto(2) volumes with beta = 1/2 must give alpha_V ~ 2 and
        // alpha_r ~ 4 on the tick-by-tick bars.
        let spec = MarketSpec {
            n_trades: 200_000,
            volume_law: VolumeLaw::Pareto { alpha: 2.0, x_min: 100.0 },
            impact_beta: 0.5,
            ..MarketSpec::default()
        };
        let series = gen_market(&spec).unwrap();
        let bars = bars::aggregate(&series, &AggregationScheme::TradeCount { n_t: 1 }).unwrap();
        let abs_r: Vec<f64> = bars.returns.iter().map(|r| r.abs()).collect();
        let hill_v = tails::hill(&bars.volumes, 2_000).unwrap();
        let hill_r = tails::hill(&abs_r, 2_000).unwrap();
        let ratio = hill_r.alpha / hill_v.alpha;
        assert!((hill_v.alpha - 2.0).abs() < 0.2, "alpha_V = {}", hill_v.alpha);
        assert!((ratio - 2.0).abs() < 0.2, "ratio = {ratio}");
    }

    #[test]
    fn seed_independence_of_the_law() {
        let fit = |seed: u64| {
            let draws = gen_pareto(2.0, 1.0, 500_000, seed).unwrap();
            tails::hill(&draws, 5_000).unwrap()
        };
        let a = fit(101);
        let b = fit(202);
        let joint = (a.stderr * a.stderr + b.stderr * b.stderr).sqrt();
        assert!(
            (a.alpha - b.alpha).abs() <= 6.0 * joint,
            "estimates {} vs {} with joint se {joint}",
            a.alpha,
            b.alpha
        );
    }

    #[test]
    fn qgaussian_volume_law_has_matching_tail() {
        let spec = MarketSpec {
            n_trades: 400_000,
            volume_law: VolumeLaw::QGaussianAbs { q: 1.5, sigma: 50.0 },
            ..MarketSpec::default()
        };
        let series = gen_market(&spec).unwrap();
        let volumes: Vec<f64> = series.trades().iter().map(|t| t.volume as f64).collect();
        let fit = tails::hill(&volumes, 4_000).unwrap();
        // alpha_qG(1.5) = 3.
        assert!((fit.alpha - 3.0).abs() < 0.25, "alpha = {}", fit.alpha);
    }

    #[test]
    fn overflow_guard_names_the_trade() {
        let spec = MarketSpec {
            n_trades: 200_000,
            return_scale: 2.0, // forces the log-price walk out of range
            ..MarketSpec::default()
        };
        let err = gen_market(&spec).unwrap_err();
        assert!(matches!(err, Error::Generation { .. }), "{err:?}");
    }
}
