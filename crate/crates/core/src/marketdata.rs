//! Tick-level trade data: parsing, validation, and the session calendar.
//!
//! Input format is tick CSV, one trade per line as `timestamp_ms,price,volume`
//! with an optional header line (any first line not starting with a digit).

use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;

/// One trade: epoch milliseconds, strictly positive price, share count >= 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeRecord {
    pub timestamp_ms: i64,
    pub price: f64,
    pub volume: u64,
}

/// One trading day's bounds in epoch milliseconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionWindow {
    pub date: String,
    pub open_ms: i64,
    pub close_ms: i64,
}

/// Parse a session calendar from its JSON form:
/// `[{"date": "...", "open_ms": ..., "close_ms": ...}, ...]`.
pub fn parse_session_calendar(json: &str) -> Result<Vec<SessionWindow>> {
    let sessions: Vec<SessionWindow> = serde_json::from_str(json)?;
    for s in &sessions {
        if s.close_ms <= s.open_ms {
            return Err(Error::Validation(format!(
                "session {} closes at or before it opens",
                s.date
            )));
        }
    }
    Ok(sessions)
}

/// A symbol's trades, nondecreasing in timestamp, optionally bound to a
/// session calendar. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeSeries {
    symbol: String,
    trades: Vec<TradeRecord>,
    sessions: Option<Vec<SessionWindow>>,
}

impl TradeSeries {
    /// Build a series from unsorted trades; sorts stably by timestamp and
    /// validates every record.
    pub fn new(symbol: impl Into<String>, mut trades: Vec<TradeRecord>) -> Result<Self> {
        let symbol = symbol.into();
        if trades.is_empty() {
            return Err(Error::EmptySeries(format!("no trades for {symbol}")));
        }
        for (i, t) in trades.iter().enumerate() {
            validate_record(t).map_err(|msg| Error::Validation(format!("{msg}, trade {i}")))?;
        }
        trades.sort_by_key(|t| t.timestamp_ms);
        Ok(TradeSeries { symbol, trades, sessions: None })
    }

    /// Attach a session calendar; every trade must fall inside some session.
    pub fn with_calendar(mut self, sessions: Vec<SessionWindow>) -> Result<Self> {
        for t in &self.trades {
            if !sessions
                .iter()
                .any(|s| t.timestamp_ms >= s.open_ms && t.timestamp_ms <= s.close_ms)
            {
                return Err(Error::Validation(format!(
                    "trade at {} ms falls outside every session",
                    t.timestamp_ms
                )));
            }
        }
        self.sessions = Some(sessions);
        Ok(self)
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn trades(&self) -> &[TradeRecord] {
        &self.trades
    }

    pub fn sessions(&self) -> Option<&[SessionWindow]> {
        self.sessions.as_deref()
    }

    pub fn len(&self) -> usize {
        self.trades.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trades.is_empty()
    }

    /// Drop trades printed exactly at a session open (opening-auction prints).
    /// Requires a calendar.
    pub fn without_opening_auction(&self) -> Result<TradeSeries> {
        let sessions = self.sessions.as_ref().ok_or_else(|| {
            Error::Parameter("opening-auction filter requires a session calendar".into())
        })?;
        let trades: Vec<TradeRecord> = self
            .trades
            .iter()
            .filter(|t| !sessions.iter().any(|s| t.timestamp_ms == s.open_ms))
            .copied()
            .collect();
        if trades.is_empty() {
            return Err(Error::EmptySeries(format!(
                "all trades of {} are opening-auction prints",
                self.symbol
            )));
        }
        Ok(TradeSeries { symbol: self.symbol.clone(), trades, sessions: self.sessions.clone() })
    }

    /// Write the series back out as tick CSV with a header line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "timestamp_ms,price,volume")?;
        for t in &self.trades {
            writeln!(w, "{},{},{}", t.timestamp_ms, t.price, t.volume)?;
        }
        Ok(())
    }
}

fn validate_record(t: &TradeRecord) -> std::result::Result<(), String> {
    if t.timestamp_ms < 0 {
        return Err("negative timestamp".into());
    }
    if !(t.price > 0.0) || !t.price.is_finite() {
        return Err("nonpositive price".into());
    }
    if t.volume == 0 {
        return Err("nonpositive volume".into());
    }
    Ok(())
}

/// Parse tick CSV into a [`TradeSeries`]. Lines are numbered from 1 and
/// blank lines are skipped; the sort by timestamp is stable, so trades with
/// equal timestamps keep file order.
pub fn parse_trades<R: Read>(input: R, symbol: &str) -> Result<TradeSeries> {
    let reader = BufReader::new(input);
    let mut trades: Vec<TradeRecord> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        // Header line: first line not starting with a digit.
        if idx == 0 && !line.starts_with(|c: char| c.is_ascii_digit()) {
            continue;
        }
        let record = parse_line(line, line_no)?;
        trades.push(record);
    }
    if trades.is_empty() {
        return Err(Error::EmptySeries(format!("no data rows for {symbol}")));
    }
    // Records were already validated line by line; construct directly to keep
    // line-numbered errors. The stable sort preserves tape order on ties.
    let mut series = TradeSeries { symbol: symbol.to_string(), trades, sessions: None };
    series.trades.sort_by_key(|t| t.timestamp_ms);
    Ok(series)
}

fn parse_line(line: &str, line_no: usize) -> Result<TradeRecord> {
    let mut fields = line.split(',');
    let (ts, price, volume) = match (fields.next(), fields.next(), fields.next(), fields.next()) {
        (Some(a), Some(b), Some(c), None) => (a.trim(), b.trim(), c.trim()),
        _ => {
            return Err(Error::Parse {
                line: line_no,
                msg: "expected 3 comma-separated fields".into(),
            })
        }
    };
    let timestamp_ms: i64 = ts.parse().map_err(|_| Error::Parse {
        line: line_no,
        msg: format!("invalid timestamp `{ts}`"),
    })?;
    let price: f64 = price.parse().map_err(|_| Error::Parse {
        line: line_no,
        msg: format!("invalid price `{price}`"),
    })?;
    let volume: i64 = volume.parse().map_err(|_| Error::Parse {
        line: line_no,
        msg: format!("invalid volume `{volume}`"),
    })?;

    if timestamp_ms < 0 {
        return Err(Error::InvalidTrade { line: line_no, msg: "negative timestamp".into() });
    }
    if !(price > 0.0) || !price.is_finite() {
        return Err(Error::InvalidTrade { line: line_no, msg: "nonpositive price".into() });
    }
    if volume <= 0 {
        return Err(Error::InvalidTrade { line: line_no, msg: "nonpositive volume".into() });
    }
    Ok(TradeRecord { timestamp_ms, price, volume: volume as u64 })
}

/// Knobs for [`validate`]'s price-jump screen.
#[derive(Debug, Clone)]
pub struct ValidateConfig {
    /// Rolling window of preceding tick-to-tick log returns.
    pub jump_window: usize,
    /// Flag a jump larger than this multiple of the rolling std.
    pub jump_sigma_multiple: f64,
    /// Minimum returns in the window before the screen applies.
    pub min_window: usize,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig { jump_window: 50, jump_sigma_multiple: 5.0, min_window: 10 }
    }
}

/// Informational data-quality counts; never mutates the series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub n_trades: usize,
    /// Trades sharing a timestamp with an earlier trade.
    pub duplicate_timestamps: usize,
    /// Tick-to-tick log returns beyond the configured multiple of rolling std.
    pub price_jump_outliers: usize,
}

/// Validate with default thresholds.
pub fn validate(series: &TradeSeries) -> Result<ValidationReport> {
    validate_with(series, &ValidateConfig::default())
}

/// Count duplicate timestamps and price-jump outliers.
pub fn validate_with(series: &TradeSeries, config: &ValidateConfig) -> Result<ValidationReport> {
    let trades = series.trades();
    if trades.is_empty() {
        return Err(Error::EmptySeries(format!("no trades for {}", series.symbol())));
    }

    let duplicate_timestamps = trades
        .windows(2)
        .filter(|w| w[0].timestamp_ms == w[1].timestamp_ms)
        .count();

    let jumps: Vec<f64> = trades
        .windows(2)
        .map(|w| (w[1].price / w[0].price).ln())
        .collect();
    let mut price_jump_outliers = 0usize;
    for i in 0..jumps.len() {
        let lo = i.saturating_sub(config.jump_window);
        let window = &jumps[lo..i];
        if window.len() < config.min_window {
            continue;
        }
        let sigma = stats::sample_std(window);
        if sigma > 0.0 && jumps[i].abs() > config.jump_sigma_multiple * sigma {
            price_jump_outliers += 1;
        }
    }

    Ok(ValidationReport {
        n_trades: trades.len(),
        duplicate_timestamps,
        price_jump_outliers,
    })
}
