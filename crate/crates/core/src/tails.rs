//! Empirical complementary CDFs and power-law tail exponent estimation.
//!
//! Two independent estimators are provided: unweighted least squares on
//! log-log CCDF coordinates and the Hill order-statistics estimator. Their
//! ratio across returns and volumes is the quantity of interest.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats;

/// Empirical P(X > x) over the strictly positive, distinct sample values.
///
/// Points with p = 0 (nothing above the sample maximum) are dropped so that
/// every stored probability is usable on log axes. Sample values <= 0 are
/// not given grid points but still count toward `n`, so for a sign-symmetric
/// sample the stored curve is the true CCDF of the signed variable at x > 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ccdf {
    xs: Vec<f64>,
    ps: Vec<f64>,
    n: usize,
}

impl Ccdf {
    /// Build directly from points (for analytic curves in tests and tools).
    pub fn from_points(xs: Vec<f64>, ps: Vec<f64>, n: usize) -> Result<Ccdf> {
        if xs.len() != ps.len() || xs.is_empty() {
            return Err(Error::Parameter("xs and ps must be nonempty and equal-length".into()));
        }
        if !xs.windows(2).all(|w| w[0] < w[1]) || xs[0] <= 0.0 {
            return Err(Error::Parameter("xs must be strictly increasing and positive".into()));
        }
        if !ps.windows(2).all(|w| w[0] >= w[1]) || ps.iter().any(|p| !(*p > 0.0 && *p <= 1.0)) {
            return Err(Error::Parameter("ps must be nonincreasing and in (0, 1]".into()));
        }
        Ok(Ccdf { xs, ps, n })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ps(&self) -> &[f64] {
        &self.ps
    }

    /// Underlying sample size (including values that got no grid point).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Two-column CSV `x,p` for plotting.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,p")?;
        for (x, p) in self.xs.iter().zip(&self.ps) {
            writeln!(w, "{x},{p}")?;
        }
        Ok(())
    }
}

/// Empirical CCDF with exact counts: p(x) = #{values > x} / n.
pub fn ccdf(sample: &[f64]) -> Result<Ccdf> {
    if sample.is_empty() {
        return Err(Error::DegenerateSample("empty sample".into()));
    }
    let n = sample.len();
    let mut positive: Vec<f64> = sample.iter().copied().filter(|v| *v > 0.0).collect();
    positive.sort_by(|a, b| a.total_cmp(b));
    if positive.is_empty() || positive[0] == positive[positive.len() - 1] {
        return Err(Error::DegenerateSample(
            "need at least 2 distinct positive values".into(),
        ));
    }

    let mut xs = Vec::new();
    let mut ps = Vec::new();
    let mut i = 0usize;
    while i < positive.len() {
        let x = positive[i];
        let mut j = i;
        while j < positive.len() && positive[j] == x {
            j += 1;
        }
        let above = positive.len() - j; // values strictly greater than x
        if above > 0 {
            xs.push(x);
            ps.push(above as f64 / n as f64);
        }
        i = j;
    }
    Ok(Ccdf { xs, ps, n })
}

/// Which estimator produced a [`TailFit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FitMethod {
    LeastSquares,
    Hill,
}

impl std::fmt::Display for FitMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FitMethod::LeastSquares => write!(f, "least-squares"),
            FitMethod::Hill => write!(f, "hill"),
        }
    }
}

/// Estimated tail exponent alpha of P(X > x) ~ x^-alpha.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailFit {
    pub alpha: f64,
    pub stderr: f64,
    pub method: FitMethod,
    /// Order statistics used (Hill) or points in the fit range (LS).
    pub k_used: usize,
    /// (x_lo, x_hi) of the fitted region.
    pub x_range: (f64, f64),
}

/// Least-squares power-law fit over the largest `ceil(tail_fraction * len)`
/// CCDF points; `alpha` is minus the slope of ln p on ln x.
pub fn fit_powerlaw_ls(c: &Ccdf, tail_fraction: f64) -> Result<TailFit> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::Parameter(format!(
            "tail_fraction must be in (0, 1], got {tail_fraction}"
        )));
    }
    let total = c.len();
    let m = ((tail_fraction * total as f64).ceil() as usize).min(total);
    if m < 10 {
        return Err(Error::InsufficientTail { have: m, need: 10 });
    }
    let start = total - m;
    let lx: Vec<f64> = c.xs[start..].iter().map(|x| x.ln()).collect();
    let lp: Vec<f64> = c.ps[start..].iter().map(|p| p.ln()).collect();
    let line = stats::ols_line(&lx, &lp);
    let alpha = -line.slope;
    if !(alpha > 0.0) {
        return Err(Error::FitFailure(format!(
            "nonpositive fitted tail exponent {alpha:.4}"
        )));
    }
    Ok(TailFit {
        alpha,
        stderr: line.slope_stderr,
        method: FitMethod::LeastSquares,
        k_used: m,
        x_range: (c.xs[start], c.xs[total - 1]),
    })
}

/// Hill estimator over the top `k` order statistics:
/// alpha = ( (1/k) sum_{i<=k} ln X_i - ln X_{k+1} )^-1, stderr = alpha/sqrt(k).
pub fn hill(sample: &[f64], k: usize) -> Result<TailFit> {
    let n = sample.len();
    if k < 1 || k + 1 > n {
        return Err(Error::Parameter(format!(
            "hill k must satisfy 1 <= k <= n-1, got k = {k}, n = {n}"
        )));
    }
    // Partition so positions [0..k] hold the k+1 largest values.
    let mut v = sample.to_vec();
    let (_, kth, _) = v.select_nth_unstable_by(k, |a, b| b.total_cmp(a));
    let x_threshold = *kth;
    if !(x_threshold > 0.0) {
        return Err(Error::Domain(
            "hill requires the top k+1 order statistics to be positive".into(),
        ));
    }
    let mut sum_log_ratio = 0.0f64;
    let mut x_hi = x_threshold;
    for &x in &v[..k] {
        sum_log_ratio += (x / x_threshold).ln();
        if x > x_hi {
            x_hi = x;
        }
    }
    let mean_log_ratio = sum_log_ratio / k as f64;
    if !(mean_log_ratio > 0.0) {
        return Err(Error::Domain(
            "degenerate tail: top order statistics are all equal".into(),
        ));
    }
    let alpha = 1.0 / mean_log_ratio;
    Ok(TailFit {
        alpha,
        stderr: alpha / (k as f64).sqrt(),
        method: FitMethod::Hill,
        k_used: k,
        x_range: (x_threshold, x_hi),
    })
}

/// Local log-log slopes of a CCDF at `n_bins` log-spaced bins.
///
/// The curve is interpolated linearly in (ln x, ln p) onto a log grid of
/// `n_bins + window - 1` abscissae spanning the full CCDF range; each emitted
/// bin's slope is the least-squares slope over its own `window` consecutive
/// grid points, reported at the window's geometric center. Returns
/// (x_center, slope) pairs, leftmost first.
pub fn local_slopes(c: &Ccdf, n_bins: usize, window: usize) -> Result<Vec<(f64, f64)>> {
    if window < 2 || n_bins < window {
        return Err(Error::Parameter(format!(
            "need n_bins >= window >= 2, got n_bins = {n_bins}, window = {window}"
        )));
    }
    let x_lo = c.xs[0];
    let x_hi = c.xs[c.len() - 1];
    if x_hi / x_lo < 10.0 {
        return Err(Error::InsufficientRange(format!(
            "CCDF spans {:.3} decades, need at least 1",
            (x_hi / x_lo).log10()
        )));
    }

    let n_grid = n_bins + window - 1;
    let l_lo = x_lo.ln();
    let l_hi = x_hi.ln();
    let step = (l_hi - l_lo) / (n_grid - 1) as f64;
    let grid_lx: Vec<f64> = (0..n_grid).map(|i| l_lo + step * i as f64).collect();
    let grid_lp: Vec<f64> = grid_lx.iter().map(|&lx| interp_log_log(c, lx)).collect();

    let mut out = Vec::with_capacity(n_bins);
    for i in 0..n_bins {
        let seg_x = &grid_lx[i..i + window];
        let seg_p = &grid_lp[i..i + window];
        let line = stats::ols_line(seg_x, seg_p);
        let center = stats::mean(seg_x).exp();
        out.push((center, line.slope));
    }
    Ok(out)
}

/// Piecewise-linear interpolation of ln p at ln x = `lx`.
fn interp_log_log(c: &Ccdf, lx: f64) -> f64 {
    let xs = &c.xs;
    let ps = &c.ps;
    let x = lx.exp();
    let hi = xs.partition_point(|&v| v < x);
    if hi == 0 {
        return ps[0].ln();
    }
    if hi == xs.len() {
        return ps[xs.len() - 1].ln();
    }
    let (lx0, lx1) = (xs[hi - 1].ln(), xs[hi].ln());
    let (lp0, lp1) = (ps[hi - 1].ln(), ps[hi].ln());
    if lx1 == lx0 {
        return lp0;
    }
    lp0 + (lp1 - lp0) * (lx - lx0) / (lx1 - lx0)
}

/// Ratio xi = alpha_r / alpha_V with first-order error propagation.
pub fn tail_ratio(fit_r: &TailFit, fit_v: &TailFit) -> Result<(f64, f64)> {
    if fit_r.method != fit_v.method {
        return Err(Error::MethodMismatch {
            left: fit_r.method.to_string(),
            right: fit_v.method.to_string(),
        });
    }
    let xi = fit_r.alpha / fit_v.alpha;
    let term_r = fit_r.stderr / fit_v.alpha;
    let term_v = fit_r.alpha * fit_v.stderr / (fit_v.alpha * fit_v.alpha);
    Ok((xi, (term_r * term_r + term_v * term_v).sqrt()))
}

/// One symbol's row of the exponent table: both estimators and their ratios.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    pub symbol: String,
    pub alpha_r_ls: f64,
    pub alpha_v_ls: f64,
    pub ratio_ls: f64,
    pub alpha_r_hill: f64,
    pub hill_err_r: f64,
    pub alpha_v_hill: f64,
    pub hill_err_v: f64,
    pub ratio_hill: f64,
}

impl RatioRow {
    pub fn from_fits(
        symbol: impl Into<String>,
        ls_r: &TailFit,
        ls_v: &TailFit,
        hill_r: &TailFit,
        hill_v: &TailFit,
    ) -> Result<RatioRow> {
        let (ratio_ls, _) = tail_ratio(ls_r, ls_v)?;
        let (ratio_hill, _) = tail_ratio(hill_r, hill_v)?;
        Ok(RatioRow {
            symbol: symbol.into(),
            alpha_r_ls: ls_r.alpha,
            alpha_v_ls: ls_v.alpha,
            ratio_ls,
            alpha_r_hill: hill_r.alpha,
            hill_err_r: hill_r.stderr,
            alpha_v_hill: hill_v.alpha,
            hill_err_v: hill_v.stderr,
            ratio_hill,
        })
    }
}

/// Mean and sample std of one column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ColumnSummary {
    pub mean: f64,
    pub std: f64,
}

/// Cross-symbol summary of the exponent table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableSummary {
    pub n_symbols: usize,
    pub ls_alpha_r: ColumnSummary,
    pub ls_alpha_v: ColumnSummary,
    pub ls_ratio: ColumnSummary,
    pub hill_alpha_r: ColumnSummary,
    pub hill_alpha_v: ColumnSummary,
    pub hill_ratio: ColumnSummary,
}

fn column<F: Fn(&RatioRow) -> f64>(rows: &[RatioRow], f: F) -> ColumnSummary {
    let vals: Vec<f64> = rows.iter().map(f).collect();
    ColumnSummary { mean: stats::mean(&vals), std: stats::sample_std(&vals) }
}

/// Unweighted mean and sample std for every exponent/ratio column.
pub fn summarize(rows: &[RatioRow]) -> Result<TableSummary> {
    if rows.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "summary needs at least 2 rows, got {}",
            rows.len()
        )));
    }
    Ok(TableSummary {
        n_symbols: rows.len(),
        ls_alpha_r: column(rows, |r| r.alpha_r_ls),
        ls_alpha_v: column(rows, |r| r.alpha_v_ls),
        ls_ratio: column(rows, |r| r.ratio_ls),
        hill_alpha_r: column(rows, |r| r.alpha_r_hill),
        hill_alpha_v: column(rows, |r| r.alpha_v_hill),
        hill_ratio: column(rows, |r| r.ratio_hill),
    })
}

/// CSV report: one row per symbol plus MEAN and STD rows when a summary is
/// given (error columns are left empty on the summary rows).
pub fn write_table_report<W: Write>(
    rows: &[RatioRow],
    summary: Option<&TableSummary>,
    mut w: W,
) -> std::io::Result<()> {
    writeln!(
        w,
        "symbol,alpha_r_ls,alpha_v_ls,ratio_ls,alpha_r_hill,hill_err_r,alpha_v_hill,hill_err_v,ratio_hill"
    )?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.symbol,
            r.alpha_r_ls,
            r.alpha_v_ls,
            r.ratio_ls,
            r.alpha_r_hill,
            r.hill_err_r,
            r.alpha_v_hill,
            r.hill_err_v,
            r.ratio_hill
        )?;
    }
    if let Some(s) = summary {
        writeln!(
            w,
            "MEAN,{},{},{},{},,{},,{}",
            s.ls_alpha_r.mean,
            s.ls_alpha_v.mean,
            s.ls_ratio.mean,
            s.hill_alpha_r.mean,
            s.hill_alpha_v.mean,
            s.hill_ratio.mean
        )?;
        writeln!(
            w,
            "STD,{},{},{},{},,{},,{}",
            s.ls_alpha_r.std,
            s.ls_alpha_v.std,
            s.ls_ratio.std,
            s.hill_alpha_r.std,
            s.hill_alpha_v.std,
            s.hill_ratio.std
        )?;
    }
    Ok(())
}

/// Default Hill order-statistics count: max(100, floor(0.01 n)), capped at n-1.
pub fn default_hill_k(n: usize) -> usize {
    (n / 100).max(100).min(n.saturating_sub(1)).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ccdf_counts_exactly() {
        let c = ccdf(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(c.xs(), &[1.0, 2.0]);
        assert_relative_eq!(c.ps()[0], 2.0 / 3.0);
        assert_relative_eq!(c.ps()[1], 1.0 / 3.0);
        assert_eq!(c.n(), 3);
    }

    #[test]
    fn ccdf_collapses_ties_and_drops_p_zero() {
        let c = ccdf(&[2.0, 2.0, 4.0]).unwrap();
        assert_eq!(c.xs(), &[2.0]);
        assert_relative_eq!(c.ps()[0], 1.0 / 3.0);
    }

    #[test]
    fn ccdf_rejects_degenerate_samples() {
        assert!(matches!(ccdf(&[5.0, 5.0]).unwrap_err(), Error::DegenerateSample(_)));
        assert!(matches!(ccdf(&[-1.0, 0.0]).unwrap_err(), Error::DegenerateSample(_)));
    }

    #[test]
    fn ccdf_counts_nonpositive_values_in_n() {
        // Sign-symmetric sample: the positive grid carries P(X > x) of the
        // signed variable.
        let c = ccdf(&[-3.0, -1.0, 1.0, 3.0]).unwrap();
        assert_eq!(c.n(), 4);
        assert_eq!(c.xs(), &[1.0]);
        assert_relative_eq!(c.ps()[0], 1.0 / 4.0);
    }

    fn exact_powerlaw_ccdf(alpha: f64, n_points: usize) -> Ccdf {
        let xs: Vec<f64> = (1..=n_points).map(|i| i as f64).collect();
        let ps: Vec<f64> = xs.iter().map(|x| x.powf(-alpha)).collect();
        Ccdf::from_points(xs, ps, 1_000_000).unwrap()
    }

    #[test]
    fn ls_fit_recovers_exact_power_law() {
        let c = exact_powerlaw_ccdf(3.0, 100);
        let fit = fit_powerlaw_ls(&c, 1.0).unwrap();
        assert_relative_eq!(fit.alpha, 3.0, max_relative = 1e-10);
        assert!(fit.stderr < 1e-10);
        assert_eq!(fit.method, FitMethod::LeastSquares);
        assert_eq!(fit.k_used, 100);
    }

    #[test]
    fn ls_fit_requires_ten_tail_points() {
        let c = exact_powerlaw_ccdf(3.0, 100);
        let err = fit_powerlaw_ls(&c, 0.05).unwrap_err();
        assert!(matches!(err, Error::InsufficientTail { have: 5, need: 10 }), "{err:?}");
    }

    #[test]
    fn hill_single_term_case() {
        let c = 7.3;
        let sample = [std::f64::consts::E * c, c, 0.1];
        let fit = hill(&sample, 1).unwrap();
        assert_relative_eq!(fit.alpha, 1.0, max_relative = 1e-12);
        assert_eq!(fit.k_used, 1);
    }

    #[test]
    fn hill_geometric_tail_hand_value() {
        // X_i = e^-i: alpha = 2 / ((k+1) ln b) = 0.5 for b = e, k = 3.
        let sample: Vec<f64> = (1..=6).map(|i| (-(i as f64)).exp()).collect();
        let fit = hill(&sample, 3).unwrap();
        assert_relative_eq!(fit.alpha, 0.5, max_relative = 1e-12);
        assert_relative_eq!(fit.stderr, 0.5 / 3.0f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn hill_rejects_bad_k_and_nonpositive_tails() {
        assert!(hill(&[1.0, 2.0], 2).is_err());
        assert!(hill(&[1.0, 2.0, 3.0], 0).is_err());
        assert!(matches!(hill(&[3.0, 2.0, 0.0], 2).unwrap_err(), Error::Domain(_)));
    }

    #[test]
    fn hill_is_scale_invariant() {
        let sample: Vec<f64> = (1..200).map(|i| 1.0 + (i as f64).sqrt()).collect();
        let base = hill(&sample, 50).unwrap().alpha;
        // Powers of two leave mantissas untouched: exactly equal.
        let doubled: Vec<f64> = sample.iter().map(|x| 1024.0 * x).collect();
        assert_eq!(hill(&doubled, 50).unwrap().alpha, base);
        // Arbitrary scales agree to rounding error.
        let scaled: Vec<f64> = sample.iter().map(|x| 3.7 * x).collect();
        assert_relative_eq!(hill(&scaled, 50).unwrap().alpha, base, max_relative = 1e-12);
    }

    #[test]
    fn local_slopes_constant_for_power_law() {
        let c = exact_powerlaw_ccdf(2.0, 1000);
        let slopes = local_slopes(&c, 25, 5).unwrap();
        assert_eq!(slopes.len(), 25);
        for (_, s) in slopes {
            assert_relative_eq!(s, -2.0, max_relative = 1e-10);
        }
    }

    #[test]
    fn local_slopes_ratio_of_two_power_laws() {
        let c4 = exact_powerlaw_ccdf(4.0, 1000);
        let c2 = exact_powerlaw_ccdf(2.0, 1000);
        let s4 = local_slopes(&c4, 25, 5).unwrap();
        let s2 = local_slopes(&c2, 25, 5).unwrap();
        for ((_, a), (_, b)) in s4.iter().zip(&s2) {
            assert_relative_eq!(a / b, 2.0, max_relative = 1e-10);
        }
    }

    #[test]
    fn local_slopes_steepen_for_lognormal() {
        // Exact standard lognormal CCDF evaluated on a dense log grid.
        use statrs::function::erf::erfc;
        let xs: Vec<f64> = (0..400).map(|i| 10f64.powf(-1.0 + 3.0 * i as f64 / 399.0)).collect();
        let ps: Vec<f64> = xs.iter().map(|x| 0.5 * erfc(x.ln() / std::f64::consts::SQRT_2)).collect();
        let c = Ccdf::from_points(xs, ps, 1_000_000).unwrap();
        let slopes = local_slopes(&c, 25, 5).unwrap();
        for w in slopes.windows(2) {
            assert!(w[1].1 < w[0].1, "slopes must steepen: {:?}", w);
        }
    }

    #[test]
    fn local_slopes_needs_a_decade() {
        let xs = vec![1.0, 2.0, 3.0];
        let ps = vec![0.5, 0.25, 0.125];
        let c = Ccdf::from_points(xs, ps, 100).unwrap();
        assert!(matches!(local_slopes(&c, 25, 5).unwrap_err(), Error::InsufficientRange(_)));
    }

    #[test]
    fn tail_ratio_paper_rows() {
        let f = |alpha: f64, stderr: f64, method: FitMethod| TailFit {
            alpha,
            stderr,
            method,
            k_used: 10,
            x_range: (1.0, 10.0),
        };
        let (xi, _) = tail_ratio(
            &f(4.3, 0.0, FitMethod::LeastSquares),
            &f(2.0, 0.0, FitMethod::LeastSquares),
        )
        .unwrap();
        assert_relative_eq!(xi, 2.15, max_relative = 1e-12);

        let (xi_h, err_h) = tail_ratio(
            &f(4.04, 0.01, FitMethod::Hill),
            &f(1.64, 0.02, FitMethod::Hill),
        )
        .unwrap();
        assert!((xi_h - 2.46).abs() < 0.005, "{xi_h}");
        assert!(err_h > 0.0);

        let same = f(3.0, 0.1, FitMethod::Hill);
        let (one, _) = tail_ratio(&same, &same).unwrap();
        assert_relative_eq!(one, 1.0);

        let err = tail_ratio(
            &f(3.0, 0.1, FitMethod::Hill),
            &f(3.0, 0.1, FitMethod::LeastSquares),
        )
        .unwrap_err();
        assert!(matches!(err, Error::MethodMismatch { .. }));
    }

    #[test]
    fn tail_ratio_inverts() {
        let a = TailFit {
            alpha: 4.2,
            stderr: 0.1,
            method: FitMethod::Hill,
            k_used: 100,
            x_range: (1.0, 5.0),
        };
        let b = TailFit { alpha: 1.9, ..a };
        let (ab, _) = tail_ratio(&a, &b).unwrap();
        let (ba, _) = tail_ratio(&b, &a).unwrap();
        assert_relative_eq!(ab * ba, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn summarize_two_identical_rows() {
        let row = RatioRow {
            symbol: "A".into(),
            alpha_r_ls: 4.0,
            alpha_v_ls: 2.0,
            ratio_ls: 2.0,
            alpha_r_hill: 4.5,
            hill_err_r: 0.01,
            alpha_v_hill: 1.8,
            hill_err_v: 0.02,
            ratio_hill: 2.5,
        };
        let mut row_b = row.clone();
        row_b.symbol = "B".into();
        let s = summarize(&[row, row_b]).unwrap();
        assert_relative_eq!(s.ls_ratio.mean, 2.0);
        assert_relative_eq!(s.ls_ratio.std, 0.0);
        assert_relative_eq!(s.hill_ratio.mean, 2.5);
    }

    #[test]
    fn summarize_needs_two_rows() {
        assert!(matches!(summarize(&[]).unwrap_err(), Error::InsufficientData(_)));
    }

    #[test]
    fn pareto_ccdf_top_decade_slope() {
        // 10^5 Pareto(2) draws: the log-log CCDF slope over the top decade
        // is -2 within 0.1.
        let draws = crate::synth::gen_pareto(2.0, 1.0, 100_000, 21).unwrap();
        let c = ccdf(&draws).unwrap();
        let x_max = c.xs()[c.len() - 1];
        let (mut lx, mut lp) = (Vec::new(), Vec::new());
        for (x, p) in c.xs().iter().zip(c.ps()) {
            if *x >= x_max / 10.0 {
                lx.push(x.ln());
                lp.push(p.ln());
            }
        }
        let slope = stats::ols_line(&lx, &lp).slope;
        assert!((slope + 2.0).abs() <= 0.1, "slope = {slope}");
    }

    #[test]
    fn ls_fit_consistency_on_pareto_draws() {
        // 10^6 continuous Pareto(3) draws, top 1% of CCDF points: the LS
        // exponent stays within [2.85, 3.15] across seeds.
        for seed in [31u64, 32, 33] {
            let draws = crate::synth::gen_pareto(3.0, 1.0, 1_000_000, seed).unwrap();
            let c = ccdf(&draws).unwrap();
            let fit = fit_powerlaw_ls(&c, 0.01).unwrap();
            assert!(
                (2.85..=3.15).contains(&fit.alpha),
                "seed {seed}: alpha = {}",
                fit.alpha
            );
        }
    }
}
