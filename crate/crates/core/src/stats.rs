//! Small shared statistics helpers: moments, ordinary least squares, quantiles.

/// Arithmetic mean. Returns NaN on an empty slice.
pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (denominator n-1). Requires `xs.len() >= 2`.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Sample standard deviation (denominator n-1).
pub fn sample_std(xs: &[f64]) -> f64 {
    sample_variance(xs).sqrt()
}

/// Ordinary least-squares line fit y = intercept + slope * x.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; 0 when the fit is exact or n = 2.
    pub slope_stderr: f64,
    /// Coefficient of determination; 1 for an exact fit.
    pub r_squared: f64,
    pub n: usize,
}

/// Unweighted OLS over paired slices. Panics if lengths differ or n < 2.
pub fn ols_line(x: &[f64], y: &[f64]) -> LineFit {
    assert_eq!(x.len(), y.len(), "ols_line: length mismatch");
    let n = x.len();
    assert!(n >= 2, "ols_line: need at least 2 points");

    let mx = mean(x);
    let my = mean(y);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        let dx = x[i] - mx;
        sxx += dx * dx;
        sxy += dx * (y[i] - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;

    let mut sse = 0.0;
    let mut sst = 0.0;
    for i in 0..n {
        let resid = y[i] - (intercept + slope * x[i]);
        sse += resid * resid;
        let dy = y[i] - my;
        sst += dy * dy;
    }
    // For constant y an exact horizontal line is a perfect fit.
    let r_squared = if sst > 0.0 { 1.0 - sse / sst } else { 1.0 };
    let slope_stderr = if n > 2 { (sse / (n - 2) as f64 / sxx).sqrt() } else { 0.0 };

    LineFit { slope, intercept, slope_stderr, r_squared, n }
}

/// Linear-interpolation quantile (the common "R-7" convention) on sorted data.
///
/// With n points and probability p, the index is h = (n-1)p and the result
/// interpolates between the floor and ceiling order statistics.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty slice");
    assert!((0.0..=1.0).contains(&p), "quantile probability out of range");
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    }
}
