//! Price-impact analysis: return-volume scatter, volume-conditioned return
//! tails, the conditional expectation E(r^2|V) with its linear-law fit,
//! surrogate returns under an assumed impact exponent, and the xi <-> beta
//! bridge.

use serde::Serialize;

use crate::bars::{AggregationScheme, BarSeries};
use crate::error::{Error, Result};
use crate::stats;
use crate::tails::{self, Ccdf, TailFit};

/// E(r^2 | V in bin) over log-spaced volume bins. Bin centers are the mean
/// volume of the observations in the bin, so a deterministic square-root
/// impact makes the curve exactly linear through the origin.
#[derive(Debug, Clone, Serialize)]
pub struct ImpactCurve {
    pub bin_centers: Vec<f64>,
    pub e_r2: Vec<f64>,
    pub counts: Vec<usize>,
    pub scheme: AggregationScheme,
}

impl ImpactCurve {
    /// CSV `v,e_r2,count` for plotting against the linear law.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "v,e_r2,count")?;
        for i in 0..self.bin_centers.len() {
            writeln!(w, "{},{},{}", self.bin_centers[i], self.e_r2[i], self.counts[i])?;
        }
        Ok(())
    }
}

/// OLS fit of E(r^2|V) = a + bV over bins with center >= v_min.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LinearImpactFit {
    pub a: f64,
    pub b: f64,
    pub r_squared: f64,
    pub v_min: f64,
}

/// Units in which conditional-tail breakpoints are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BreakpointUnits {
    /// Raw share counts (converted through the series' mean volume).
    RawShares,
    /// Mean-normalized volume units, as stored in a [`BarSeries`].
    Normalized,
}

/// One volume band of a [`ConditionalTailReport`].
#[derive(Debug, Clone, Serialize)]
pub struct VolumeBand {
    /// Band covers v_lo < V <= v_hi in normalized units (v_hi may be inf).
    pub v_lo: f64,
    pub v_hi: f64,
    pub count: usize,
    /// LS tail fit of |r| within the band; None when the band was flagged.
    pub fit: Option<TailFit>,
    /// Why the band has no fit, if it doesn't.
    pub flag: Option<String>,
    #[serde(skip)]
    pub ccdf: Option<Ccdf>,
}

/// Per-band return tails, partitioning the observed volume range.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionalTailReport {
    pub bands: Vec<VolumeBand>,
}

/// All (V, |r|) pairs plus the three volume quartiles.
#[derive(Debug, Clone)]
pub struct ScatterData {
    pub points: Vec<(f64, f64)>,
    pub volume_quartiles: [f64; 3],
}

/// Emit the scatter of absolute returns against volume, with linearly
/// interpolated quartile markers of V.
pub fn scatter(bars: &BarSeries) -> ScatterData {
    let points: Vec<(f64, f64)> = bars
        .volumes
        .iter()
        .zip(&bars.returns)
        .map(|(&v, &r)| (v, r.abs()))
        .collect();
    let mut sorted: Vec<f64> = bars.volumes.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let volume_quartiles = [
        stats::quantile_sorted(&sorted, 0.25),
        stats::quantile_sorted(&sorted, 0.5),
        stats::quantile_sorted(&sorted, 0.75),
    ];
    ScatterData { points, volume_quartiles }
}

/// Minimum observations for a band to be fitted rather than flagged.
pub const MIN_BAND_OBSERVATIONS: usize = 100;

/// Split the volume range at `breakpoints` and fit the |r| tail per band.
/// Under-populated or unfittable bands are flagged, never fabricated.
pub fn conditional_tails(
    bars: &BarSeries,
    breakpoints: &[f64],
    units: BreakpointUnits,
    tail_fraction: f64,
) -> Result<ConditionalTailReport> {
    if breakpoints.is_empty() {
        return Err(Error::Parameter("need at least one breakpoint".into()));
    }
    if !breakpoints.windows(2).all(|w| w[0] < w[1]) || breakpoints[0] <= 0.0 {
        return Err(Error::Parameter("breakpoints must be positive and increasing".into()));
    }
    let scale = match units {
        BreakpointUnits::Normalized => 1.0,
        BreakpointUnits::RawShares => {
            if !(bars.volume_mean > 0.0) {
                return Err(Error::DegenerateVolume);
            }
            bars.volume_mean
        }
    };
    let cuts: Vec<f64> = breakpoints.iter().map(|b| b / scale).collect();

    let mut edges = vec![0.0];
    edges.extend_from_slice(&cuts);
    edges.push(f64::INFINITY);

    let mut bands = Vec::with_capacity(edges.len() - 1);
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let abs_r: Vec<f64> = bars
            .volumes
            .iter()
            .zip(&bars.returns)
            .filter(|(&v, _)| v > lo && v <= hi)
            .map(|(_, &r)| r.abs())
            .collect();
        let count = abs_r.len();
        let (fit, flag, band_ccdf) = if count < MIN_BAND_OBSERVATIONS {
            (None, Some(format!("only {count} observations, need {MIN_BAND_OBSERVATIONS}")), None)
        } else {
            match tails::ccdf(&abs_r).and_then(|c| {
                let fit = tails::fit_powerlaw_ls(&c, tail_fraction)?;
                Ok((c, fit))
            }) {
                Ok((c, fit)) => (Some(fit), None, Some(c)),
                Err(e) => (None, Some(format!("fit failed: {e}")), None),
            }
        };
        bands.push(VolumeBand { v_lo: lo, v_hi: hi, count, fit, flag, ccdf: band_ccdf });
    }
    Ok(ConditionalTailReport { bands })
}

/// Default minimum observations per E(r^2|V) bin.
pub const DEFAULT_MIN_BIN_COUNT: usize = 30;

/// E(r^2|V) over `n_bins` log-spaced volume bins with defaults.
pub fn conditional_expectation(bars: &BarSeries, n_bins: usize) -> Result<ImpactCurve> {
    conditional_expectation_xy(&bars.returns, &bars.volumes, bars.scheme, n_bins, DEFAULT_MIN_BIN_COUNT)
}

/// E(r^2|V) over paired slices (also used for surrogate returns).
///
/// Bins with fewer than `min_bin_count` observations are merged rightward
/// into their neighbor (the last bin merges leftward if it ends up short).
/// Bin means are accumulated in a single pass in observation order, so a
/// naive per-bin rescan reproduces them bit for bit.
pub fn conditional_expectation_xy(
    returns: &[f64],
    volumes: &[f64],
    scheme: AggregationScheme,
    n_bins: usize,
    min_bin_count: usize,
) -> Result<ImpactCurve> {
    if returns.len() != volumes.len() {
        return Err(Error::Parameter("returns/volumes length mismatch".into()));
    }
    if n_bins < 2 {
        return Err(Error::Parameter("need at least 2 bins".into()));
    }
    let t = returns.len();
    if t < n_bins * min_bin_count {
        return Err(Error::InsufficientData(format!(
            "{t} observations cannot fill {n_bins} bins at {min_bin_count} each"
        )));
    }

    let mut v_lo = f64::INFINITY;
    let mut v_hi = 0.0f64;
    for &v in volumes {
        if v > 0.0 {
            v_lo = v_lo.min(v);
            v_hi = v_hi.max(v);
        }
    }
    if !(v_hi > v_lo) {
        return Err(Error::DegenerateSample("volumes do not span a positive range".into()));
    }

    let edges = log_edges(v_lo, v_hi, n_bins);
    let raw_counts = count_per_bin(volumes, &edges, n_bins);

    // Merge plan: map each raw bin to a final bin, folding short bins into
    // their right neighbor.
    let mut final_of_raw = vec![0usize; n_bins];
    let mut final_counts: Vec<usize> = Vec::new();
    let mut pending = 0usize;
    for j in 0..n_bins {
        pending += raw_counts[j];
        final_of_raw[j] = final_counts.len();
        if pending >= min_bin_count {
            final_counts.push(pending);
            pending = 0;
        }
    }
    if pending > 0 {
        // Short remainder folds into the previous final bin.
        match final_counts.last_mut() {
            Some(last) => {
                *last += pending;
                let merged = final_counts.len() - 1;
                for f in final_of_raw.iter_mut() {
                    if *f >= final_counts.len() {
                        *f = merged;
                    }
                }
            }
            None => {
                return Err(Error::InsufficientData(
                    "all observations fall into one short bin".into(),
                ))
            }
        }
    } else {
        // Raw bins past the last flush still point one past the end.
        let last = final_counts.len() - 1;
        for f in final_of_raw.iter_mut() {
            if *f > last {
                *f = last;
            }
        }
    }

    let n_final = final_counts.len();
    let mut sum_r2 = vec![0.0f64; n_final];
    let mut sum_v = vec![0.0f64; n_final];
    let mut counts = vec![0usize; n_final];
    for (&r, &v) in returns.iter().zip(volumes) {
        if v <= 0.0 {
            continue;
        }
        let raw = bin_index(v, &edges, n_bins);
        let f = final_of_raw[raw];
        sum_r2[f] += r * r;
        sum_v[f] += v;
        counts[f] += 1;
    }

    let bin_centers: Vec<f64> = sum_v.iter().zip(&counts).map(|(s, &c)| s / c as f64).collect();
    let e_r2: Vec<f64> = sum_r2.iter().zip(&counts).map(|(s, &c)| s / c as f64).collect();
    Ok(ImpactCurve { bin_centers, e_r2, counts, scheme })
}

fn log_edges(v_lo: f64, v_hi: f64, n_bins: usize) -> Vec<f64> {
    let l_lo = v_lo.ln();
    let l_hi = v_hi.ln();
    let mut edges: Vec<f64> = (0..=n_bins)
        .map(|j| (l_lo + (l_hi - l_lo) * j as f64 / n_bins as f64).exp())
        .collect();
    edges[0] = v_lo;
    edges[n_bins] = v_hi;
    edges
}

fn bin_index(v: f64, edges: &[f64], n_bins: usize) -> usize {
    // Half-open [e_j, e_{j+1}), last bin closed.
    edges[1..n_bins].partition_point(|e| *e <= v).min(n_bins - 1)
}

fn count_per_bin(volumes: &[f64], edges: &[f64], n_bins: usize) -> Vec<usize> {
    let mut counts = vec![0usize; n_bins];
    for &v in volumes {
        if v > 0.0 {
            counts[bin_index(v, edges, n_bins)] += 1;
        }
    }
    counts
}

/// OLS of E(r^2|V) on bin centers over bins with center >= v_min.
pub fn fit_linear(curve: &ImpactCurve, v_min: f64) -> Result<LinearImpactFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (c, e) in curve.bin_centers.iter().zip(&curve.e_r2) {
        if *c >= v_min {
            xs.push(*c);
            ys.push(*e);
        }
    }
    if xs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} bins at or above v_min = {v_min}, need 3",
            xs.len()
        )));
    }
    let line = stats::ols_line(&xs, &ys);
    Ok(LinearImpactFit { a: line.intercept, b: line.slope, r_squared: line.r_squared, v_min })
}

/// Artificial returns r_i = c V_i^beta with c fixed so the output has unit
/// sample standard deviation; deterministic in the input.
pub fn surrogate_returns(volumes: &[f64], beta: f64) -> Result<Vec<f64>> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Parameter(format!("beta must lie in (0, 1), got {beta}")));
    }
    if volumes.len() < 2 {
        return Err(Error::InsufficientData("need at least 2 volumes".into()));
    }
    if volumes.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Parameter("volumes must be positive".into()));
    }
    let powered: Vec<f64> = volumes.iter().map(|v| v.powf(beta)).collect();
    let std = stats::sample_std(&powered);
    if !(std > 0.0) {
        return Err(Error::ZeroVariance);
    }
    Ok(powered.iter().map(|m| m / std).collect())
}

/// Invert the exponent ratio into an impact exponent: beta = 1/xi.
///
/// Requires xi > 1: a ratio at or below 1 would imply beta >= 1, a convex
/// impact outside the power-law impact model's range.
pub fn implied_beta(xi: f64) -> Result<f64> {
    if !(xi > 1.0) {
        return Err(Error::Domain(format!(
            "implied beta needs xi > 1 (got {xi}); xi <= 1 would mean beta >= 1, \
             a convex impact outside the modeled 0 < beta < 1 range"
        )));
    }
    Ok(1.0 / xi)
}
