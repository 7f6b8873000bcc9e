//! Aggregation of a trade stream into paired return/volume series.
//!
//! Two interval schemes are supported: fixed clock-time windows and fixed
//! trade-count blocks. Raw log returns are standardized to mean 0 / sample
//! std 1 and interval volumes are normalized to mean 1.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::marketdata::{TradeRecord, TradeSeries};
use crate::stats;

/// How the trade stream is partitioned into intervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum AggregationScheme {
    /// Consecutive `[t, t + delta_t)` wall-clock windows; empty windows are
    /// dropped, not zero-filled.
    ClockTime { delta_t_min: f64 },
    /// Consecutive blocks of exactly `n_t` trades; the remainder is dropped.
    /// `n_t = 1` gives tick-by-tick returns.
    TradeCount { n_t: usize },
}

impl AggregationScheme {
    pub fn validate(&self) -> Result<()> {
        match self {
            AggregationScheme::ClockTime { delta_t_min } => {
                if !(*delta_t_min > 0.0) || !delta_t_min.is_finite() {
                    return Err(Error::Parameter(format!(
                        "delta_t must be a positive number of minutes, got {delta_t_min}"
                    )));
                }
                if (*delta_t_min * 60_000.0).round() < 1.0 {
                    return Err(Error::Parameter("delta_t rounds to less than 1 ms".into()));
                }
            }
            AggregationScheme::TradeCount { n_t } => {
                if *n_t == 0 {
                    return Err(Error::Parameter("n_t must be at least 1".into()));
                }
            }
        }
        Ok(())
    }

    /// Short identifier used in file names: `dt1m`, `dt0.5m`, `nt15`.
    pub fn label(&self) -> String {
        match self {
            AggregationScheme::ClockTime { delta_t_min } => format!("dt{delta_t_min}m"),
            AggregationScheme::TradeCount { n_t } => format!("nt{n_t}"),
        }
    }
}

/// Interval returns and volumes before any normalization. Volumes are in raw
/// share units.
#[derive(Debug, Clone, PartialEq)]
pub struct RawBars {
    pub raw_returns: Vec<f64>,
    pub volumes: Vec<f64>,
}

/// Paired standardized returns and mean-normalized volumes under one scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarSeries {
    pub symbol: String,
    pub scheme: AggregationScheme,
    /// Log returns before standardization.
    pub raw_returns: Vec<f64>,
    /// Standardized returns: mean 0, sample std 1.
    pub returns: Vec<f64>,
    /// Mean-normalized volumes: mean 1, all nonnegative.
    pub volumes: Vec<f64>,
    /// Number of intervals.
    pub k_count: usize,
    /// Mean of the raw returns (recorded for reconstruction).
    pub return_mean: f64,
    /// Sample std of the raw returns.
    pub return_std: f64,
    /// Mean raw interval volume in shares; raw volume = normalized * this.
    pub volume_mean: f64,
}

/// Partition, take log price differences, then standardize/normalize.
pub fn aggregate(series: &TradeSeries, scheme: &AggregationScheme) -> Result<BarSeries> {
    let raw = aggregate_raw(series, scheme)?;
    BarSeries::from_raw(series.symbol(), *scheme, raw)
}

impl BarSeries {
    pub fn from_raw(symbol: &str, scheme: AggregationScheme, raw: RawBars) -> Result<Self> {
        let k_count = raw.raw_returns.len();
        if k_count < 2 {
            return Err(Error::InsufficientData(format!(
                "{k_count} usable intervals, need at least 2"
            )));
        }
        let return_mean = stats::mean(&raw.raw_returns);
        let return_std = stats::sample_std(&raw.raw_returns);
        let returns = standardize(&raw.raw_returns)?;
        let volume_mean = stats::mean(&raw.volumes);
        let volumes = normalize_volume(&raw.volumes)?;
        Ok(BarSeries {
            symbol: symbol.to_string(),
            scheme,
            raw_returns: raw.raw_returns,
            returns,
            volumes,
            k_count,
            return_mean,
            return_std,
            volume_mean,
        })
    }

    /// CSV form `k,raw_return,return,volume` with k counted from 1.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "k,raw_return,return,volume")?;
        for k in 0..self.k_count {
            writeln!(
                w,
                "{},{},{},{}",
                k + 1,
                self.raw_returns[k],
                self.returns[k],
                self.volumes[k]
            )?;
        }
        Ok(())
    }
}

/// Partition the stream and compute raw log returns and share volumes.
///
/// The first trade of a segment (the whole stream, or each session when a
/// calendar is attached) serves as the entry price. Under `ClockTime` its
/// volume is counted in the window containing it; under `TradeCount` it is
/// only the price base and blocks cover the following trades, so no interval
/// ever spans a session boundary.
pub fn aggregate_raw(series: &TradeSeries, scheme: &AggregationScheme) -> Result<RawBars> {
    scheme.validate()?;
    if series.is_empty() {
        return Err(Error::EmptySeries(format!("no trades for {}", series.symbol())));
    }
    if let AggregationScheme::TradeCount { n_t } = scheme {
        if *n_t > series.len() {
            return Err(Error::Parameter(format!(
                "n_t = {} exceeds the number of trades ({})",
                n_t,
                series.len()
            )));
        }
    }

    let mut raw = RawBars { raw_returns: Vec::new(), volumes: Vec::new() };
    for segment in segments(series) {
        match scheme {
            AggregationScheme::ClockTime { delta_t_min } => {
                let delta_ms = (delta_t_min * 60_000.0).round() as i64;
                clock_time_segment(segment.trades, segment.anchor_ms, delta_ms, &mut raw);
            }
            AggregationScheme::TradeCount { n_t } => {
                trade_count_segment(segment.trades, *n_t, &mut raw);
            }
        }
    }

    if raw.raw_returns.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} usable intervals, need at least 2",
            raw.raw_returns.len()
        )));
    }
    Ok(raw)
}

struct Segment<'a> {
    trades: &'a [TradeRecord],
    anchor_ms: i64,
}

/// Without a calendar: one segment anchored at the first trade. With one:
/// one segment per session, anchored at the session open.
fn segments<'a>(series: &'a TradeSeries) -> Vec<Segment<'a>> {
    let trades = series.trades();
    match series.sessions() {
        None => vec![Segment { trades, anchor_ms: trades[0].timestamp_ms }],
        Some(sessions) => {
            let mut out = Vec::new();
            for s in sessions {
                let lo = trades.partition_point(|t| t.timestamp_ms < s.open_ms);
                let hi = trades.partition_point(|t| t.timestamp_ms <= s.close_ms);
                if lo < hi {
                    out.push(Segment { trades: &trades[lo..hi], anchor_ms: s.open_ms });
                }
            }
            out
        }
    }
}

fn clock_time_segment(trades: &[TradeRecord], anchor_ms: i64, delta_ms: i64, out: &mut RawBars) {
    let mut prev_price = trades[0].price;
    let mut i = 0usize;
    while i < trades.len() {
        // Window index of the next trade with any activity.
        let k = (trades[i].timestamp_ms - anchor_ms) / delta_ms;
        let window_end = anchor_ms + (k + 1) * delta_ms;
        let mut volume = 0.0f64;
        let mut close = prev_price;
        while i < trades.len() && trades[i].timestamp_ms < window_end {
            volume += trades[i].volume as f64;
            close = trades[i].price;
            i += 1;
        }
        out.raw_returns.push((close / prev_price).ln());
        out.volumes.push(volume);
        prev_price = close;
    }
}

fn trade_count_segment(trades: &[TradeRecord], n_t: usize, out: &mut RawBars) {
    if trades.len() < 2 {
        return; // nothing beyond the price base
    }
    let mut prev_price = trades[0].price;
    for block in trades[1..].chunks_exact(n_t) {
        let close = block[block.len() - 1].price;
        out.raw_returns.push((close / prev_price).ln());
        out.volumes.push(block.iter().map(|t| t.volume as f64).sum());
        prev_price = close;
    }
}

/// Center and scale to sample std 1 (denominator n-1).
pub fn standardize(raw: &[f64]) -> Result<Vec<f64>> {
    if raw.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "standardize needs at least 2 values, got {}",
            raw.len()
        )));
    }
    let m = stats::mean(raw);
    let s = stats::sample_std(raw);
    if !(s > 0.0) {
        return Err(Error::ZeroVariance);
    }
    Ok(raw.iter().map(|x| (x - m) / s).collect())
}

/// Divide by the sample mean so the result has mean 1.
pub fn normalize_volume(raw: &[f64]) -> Result<Vec<f64>> {
    if raw.is_empty() {
        return Err(Error::InsufficientData("normalize_volume needs at least 1 value".into()));
    }
    if raw.iter().any(|v| *v < 0.0) {
        return Err(Error::Parameter("volumes must be nonnegative".into()));
    }
    let m = stats::mean(raw);
    if !(m > 0.0) {
        return Err(Error::DegenerateVolume);
    }
    Ok(raw.iter().map(|v| v / m).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marketdata::TradeSeries;
    use approx::assert_relative_eq;

    fn t(ts: i64, price: f64, volume: u64) -> TradeRecord {
        TradeRecord { timestamp_ms: ts, price, volume }
    }

    fn three_trades() -> TradeSeries {
        TradeSeries::new(
            "TEST",
            vec![t(0, 100.0, 10), t(30_000, 110.0, 30), t(90_000, 121.0, 20)],
        )
        .unwrap()
    }

    #[test]
    fn clock_time_windowing_hand_walk() {
        // Windows [0, 60s) and [60s, 120s): both returns are ln 1.1, volumes
        // 10+30 = 40 and 20, normalized against mean 30.
        let raw = aggregate_raw(&three_trades(), &AggregationScheme::ClockTime { delta_t_min: 1.0 })
            .unwrap();
        let ln11 = 1.1f64.ln();
        assert_relative_eq!(raw.raw_returns[0], ln11, max_relative = 1e-14);
        assert_relative_eq!(raw.raw_returns[1], ln11, max_relative = 1e-14);
        assert_eq!(raw.volumes, vec![40.0, 20.0]);
        let norm = normalize_volume(&raw.volumes).unwrap();
        assert_relative_eq!(norm[0], 4.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(norm[1], 2.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn tick_by_tick_drops_the_price_base() {
        let raw = aggregate_raw(&three_trades(), &AggregationScheme::TradeCount { n_t: 1 }).unwrap();
        let ln11 = 1.1f64.ln();
        assert_eq!(raw.raw_returns.len(), 2);
        assert_relative_eq!(raw.raw_returns[0], ln11, max_relative = 1e-14);
        assert_relative_eq!(raw.raw_returns[1], ln11, max_relative = 1e-14);
        assert_eq!(raw.volumes, vec![30.0, 20.0]);
    }

    #[test]
    fn constant_price_is_zero_variance() {
        let series = TradeSeries::new(
            "TEST",
            vec![t(0, 100.0, 1), t(60_000, 100.0, 1), t(120_000, 100.0, 1)],
        )
        .unwrap();
        let err = aggregate(&series, &AggregationScheme::ClockTime { delta_t_min: 1.0 }).unwrap_err();
        assert!(matches!(err, Error::ZeroVariance), "{err:?}");
    }

    #[test]
    fn empty_windows_are_dropped_not_zero_filled() {
        // A 10-minute gap: no bars for the empty windows, and the next return
        // spans the gap.
        let series = TradeSeries::new(
            "TEST",
            vec![t(0, 100.0, 1), t(30_000, 110.0, 2), t(600_000, 121.0, 4)],
        )
        .unwrap();
        let raw = aggregate_raw(&series, &AggregationScheme::ClockTime { delta_t_min: 1.0 }).unwrap();
        assert_eq!(raw.raw_returns.len(), 2);
        assert_relative_eq!(raw.raw_returns[1], 1.1f64.ln(), max_relative = 1e-14);
        assert_eq!(raw.volumes, vec![3.0, 4.0]);
    }

    #[test]
    fn standardize_two_points() {
        let out = standardize(&[1.0, 3.0]).unwrap();
        assert_relative_eq!(out[0], -std::f64::consts::FRAC_1_SQRT_2, max_relative = 1e-12);
        assert_relative_eq!(out[1], std::f64::consts::FRAC_1_SQRT_2, max_relative = 1e-12);
    }

    #[test]
    fn standardize_rejects_constant_input() {
        assert!(matches!(standardize(&[5.0, 5.0, 5.0]).unwrap_err(), Error::ZeroVariance));
    }

    #[test]
    fn standardize_is_affine_invariant() {
        let x = [0.3, -1.2, 2.5, 0.0, 4.4];
        let y: Vec<f64> = x.iter().map(|v| 3.5 * v - 7.0).collect();
        let sx = standardize(&x).unwrap();
        let sy = standardize(&y).unwrap();
        for (a, b) in sx.iter().zip(&sy) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn normalize_volume_basics() {
        assert_eq!(normalize_volume(&[7.0]).unwrap(), vec![1.0]);
        let out = normalize_volume(&[40.0, 20.0]).unwrap();
        assert_relative_eq!(out[0], 4.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(out[1], 2.0 / 3.0, max_relative = 1e-14);
        assert!(matches!(normalize_volume(&[0.0, 0.0]).unwrap_err(), Error::DegenerateVolume));
    }

    #[test]
    fn bar_series_invariants_hold() {
        let series = TradeSeries::new(
            "TEST",
            (0..600)
                .map(|i| t(i * 7_000, 100.0 * (1.0 + 0.001 * ((i * i) % 13) as f64), 1 + (i % 9) as u64))
                .collect(),
        )
        .unwrap();
        let bars = aggregate(&series, &AggregationScheme::ClockTime { delta_t_min: 1.0 }).unwrap();
        let n = bars.k_count as f64;
        let mean_r: f64 = bars.returns.iter().sum::<f64>() / n;
        let std_r = stats::sample_std(&bars.returns);
        let mean_v: f64 = bars.volumes.iter().sum::<f64>() / n;
        assert!(mean_r.abs() < 1e-9);
        assert!((std_r - 1.0).abs() < 1e-9);
        assert!((mean_v - 1.0).abs() < 1e-9);
        assert!(bars.volumes.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn trade_count_volume_conservation() {
        let trades: Vec<TradeRecord> =
            (0..32).map(|i| t(i, 100.0 + (i % 5) as f64, 1 + (i % 7) as u64)).collect();
        let series = TradeSeries::new("TEST", trades.clone()).unwrap();
        let n_t = 5usize;
        let raw = aggregate_raw(&series, &AggregationScheme::TradeCount { n_t }).unwrap();
        let used = raw.volumes.len() * n_t;
        let expected: f64 = trades[1..1 + used].iter().map(|t| t.volume as f64).sum();
        let got: f64 = raw.volumes.iter().sum();
        assert_relative_eq!(got, expected, max_relative = 1e-12);
    }

    #[test]
    fn log_return_additivity_across_block_sizes() {
        let trades: Vec<TradeRecord> = (0..25)
            .map(|i| t(i, 100.0 * (1.0 + 0.01 * ((i % 4) as f64 - 1.5)), 1))
            .collect();
        let series = TradeSeries::new("TEST", trades).unwrap();
        let fine = aggregate_raw(&series, &AggregationScheme::TradeCount { n_t: 1 }).unwrap();
        let coarse = aggregate_raw(&series, &AggregationScheme::TradeCount { n_t: 4 }).unwrap();
        for (j, coarse_r) in coarse.raw_returns.iter().enumerate() {
            let sum: f64 = fine.raw_returns[j * 4..(j + 1) * 4].iter().sum();
            assert_relative_eq!(*coarse_r, sum, epsilon = 1e-12);
        }
    }

    #[test]
    fn clock_time_nesting_across_delta() {
        // When both sub-windows trade, the 2-minute return is the sum of its
        // two 1-minute parts.
        let trades: Vec<TradeRecord> = (0..40)
            .map(|i| t(i * 30_000, 100.0 * (1.0 + 0.002 * ((i % 7) as f64 - 3.0)), 1))
            .collect();
        let series = TradeSeries::new("TEST", trades).unwrap();
        let fine = aggregate_raw(&series, &AggregationScheme::ClockTime { delta_t_min: 1.0 }).unwrap();
        let coarse = aggregate_raw(&series, &AggregationScheme::ClockTime { delta_t_min: 2.0 }).unwrap();
        // Every window trades here (one trade each 30 s), so the mapping is 2:1.
        assert_eq!(fine.raw_returns.len(), 2 * coarse.raw_returns.len());
        for (j, coarse_r) in coarse.raw_returns.iter().enumerate() {
            let sum = fine.raw_returns[2 * j] + fine.raw_returns[2 * j + 1];
            assert_relative_eq!(*coarse_r, sum, epsilon = 1e-12);
        }
    }

    #[test]
    fn session_boundaries_exclude_overnight_returns() {
        use crate::marketdata::parse_session_calendar;
        let cal = parse_session_calendar(
            r#"[{"date":"d1","open_ms":0,"close_ms":200000},
                {"date":"d2","open_ms":1000000,"close_ms":1200000}]"#,
        )
        .unwrap();
        // Price doubles overnight; within sessions it moves by 10% inside a
        // single window.
        let series = TradeSeries::new(
            "TEST",
            vec![
                t(0, 100.0, 1),
                t(30_000, 110.0, 1),
                t(1_000_000, 220.0, 1),
                t(1_030_000, 242.0, 1),
            ],
        )
        .unwrap()
        .with_calendar(cal)
        .unwrap();
        let raw = aggregate_raw(&series, &AggregationScheme::ClockTime { delta_t_min: 1.0 }).unwrap();
        let ln11 = 1.1f64.ln();
        // Two returns of ln 1.1; the overnight doubling never appears.
        assert_eq!(raw.raw_returns.len(), 2);
        for r in &raw.raw_returns {
            assert_relative_eq!(*r, ln11, max_relative = 1e-12);
        }
    }

    #[test]
    fn one_interval_is_insufficient() {
        let series = TradeSeries::new("TEST", vec![t(0, 100.0, 1), t(1_000, 101.0, 1)]).unwrap();
        let err =
            aggregate_raw(&series, &AggregationScheme::ClockTime { delta_t_min: 1.0 }).unwrap_err();
        assert!(matches!(err, Error::InsufficientData(_)), "{err:?}");
    }
}
