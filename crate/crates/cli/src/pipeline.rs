//! Command implementations: every artifact lands under the run's output
//! directory and is recorded in `manifest.json`.

use std::fs::File;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use retvol::bars::{self, AggregationScheme, BarSeries};
use retvol::impact::{self, BreakpointUnits, LinearImpactFit};
use retvol::marketdata::{self, TradeSeries};
use retvol::qgauss;
use retvol::synth::{self, MarketSpec, VolumeLaw};
use retvol::tails::{self, RatioRow};

use crate::manifest::{digest_inputs, OutDir};
use crate::{
    BarsArgs, EstimatorArgs, ImpactArgs, ImpactParams, IngestArgs, InputArgs, QfitArgs,
    QfitTarget, ReportArgs, SynthArgs, TailsArgs,
};

fn params_json<T: Serialize>(args: &T) -> Result<serde_json::Value> {
    serde_json::to_value(args).context("serializing run parameters")
}

fn symbol_of(path: &Path) -> String {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("UNKNOWN");
    stem.strip_suffix(".ticks").unwrap_or(stem).to_string()
}

fn load_series(input: &InputArgs) -> Result<Vec<TradeSeries>> {
    let calendar = input
        .calendar
        .as_ref()
        .map(|p| {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("marketdata: reading calendar {}", p.display()))?;
            marketdata::parse_session_calendar(&text)
                .with_context(|| format!("marketdata: parsing calendar {}", p.display()))
        })
        .transpose()?;

    let mut out = Vec::with_capacity(input.inputs.len());
    for path in &input.inputs {
        let symbol = symbol_of(path);
        let file = File::open(path)
            .with_context(|| format!("marketdata: opening {}", path.display()))?;
        let mut series = marketdata::parse_trades(file, &symbol)
            .with_context(|| format!("marketdata: parsing {}", path.display()))?;
        if let Some(cal) = &calendar {
            series = series
                .with_calendar(cal.clone())
                .with_context(|| format!("marketdata: applying calendar to {symbol}"))?;
            if input.exclude_opening_auction {
                series = series
                    .without_opening_auction()
                    .with_context(|| format!("marketdata: opening-auction filter on {symbol}"))?;
            }
        }
        out.push(series);
    }
    Ok(out)
}

fn csv_string<F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>>(f: F) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf).context("formatting CSV")?;
    Ok(buf)
}

pub fn ingest(args: &IngestArgs) -> Result<()> {
    let mut out = OutDir::create(&args.out.out)?;
    let series_list = load_series(&args.input)?;
    for series in &series_list {
        let report = marketdata::validate(series)
            .with_context(|| format!("marketdata: validating {}", series.symbol()))?;
        out.write_json(
            &format!("{}.validation.json", series.symbol()),
            &json!({ "symbol": series.symbol(), "report": report }),
        )?;
        out.write(
            &format!("{}.ticks.csv", series.symbol()),
            csv_string(|w| series.write_csv(w))?,
        )?;
        println!(
            "{}: {} trades, {} duplicate timestamps, {} price-jump outliers",
            series.symbol(),
            report.n_trades,
            report.duplicate_timestamps,
            report.price_jump_outliers
        );
    }
    out.finish("ingest", params_json(args)?, digest_inputs(&args.input.inputs)?)
}

pub fn bars(args: &BarsArgs) -> Result<()> {
    let mut out = OutDir::create(&args.out.out)?;
    let scheme = args.scheme.scheme();
    for series in &load_series(&args.input)? {
        let b = bars::aggregate(series, &scheme)
            .with_context(|| format!("bars: aggregating {} under {}", series.symbol(), scheme.label()))?;
        let prefix = format!("{}.{}", series.symbol(), scheme.label());
        out.write(&format!("{prefix}.bars.csv"), csv_string(|w| b.write_csv(w))?)?;
        out.write_json(&format!("{prefix}.bars.json"), &b)?;
        println!("{}: {} bars under {}", series.symbol(), b.k_count, scheme.label());
    }
    out.finish("bars", params_json(args)?, digest_inputs(&args.input.inputs)?)
}

/// Both tail fits for one bar series.
struct SymbolFits {
    row: RatioRow,
    ratio_ls_err: f64,
    ratio_hill_err: f64,
}

#[derive(Serialize)]
struct RatioRowOut {
    #[serde(flatten)]
    row: RatioRow,
    ratio_ls_err: f64,
    ratio_hill_err: f64,
}

fn resolve_hill_k(est: &EstimatorArgs, n: usize) -> usize {
    if est.hill_k == 0 {
        tails::default_hill_k(n)
    } else {
        est.hill_k
    }
}

fn fit_both_series(symbol: &str, b: &BarSeries, est: &EstimatorArgs) -> Result<SymbolFits> {
    let abs_r: Vec<f64> = b.returns.iter().map(|r| r.abs()).collect();
    let fits = fit_pair(symbol, &abs_r, &b.volumes, est)?;
    Ok(fits)
}

fn fit_pair(symbol: &str, abs_r: &[f64], volumes: &[f64], est: &EstimatorArgs) -> Result<SymbolFits> {
    let ccdf_r = tails::ccdf(abs_r)
        .with_context(|| format!("tails: return CCDF for {symbol}"))?;
    let ccdf_v = tails::ccdf(volumes)
        .with_context(|| format!("tails: volume CCDF for {symbol}"))?;
    let ls_r = tails::fit_powerlaw_ls(&ccdf_r, est.tail_fraction)
        .with_context(|| format!("tails: LS fit of {symbol} returns"))?;
    let ls_v = tails::fit_powerlaw_ls(&ccdf_v, est.tail_fraction)
        .with_context(|| format!("tails: LS fit of {symbol} volumes"))?;
    let hill_r = tails::hill(abs_r, resolve_hill_k(est, abs_r.len()))
        .with_context(|| format!("tails: Hill fit of {symbol} returns"))?;
    let hill_v = tails::hill(volumes, resolve_hill_k(est, volumes.len()))
        .with_context(|| format!("tails: Hill fit of {symbol} volumes"))?;
    let (_, ratio_ls_err) = tails::tail_ratio(&ls_r, &ls_v).context("tails: LS ratio")?;
    let (_, ratio_hill_err) = tails::tail_ratio(&hill_r, &hill_v).context("tails: Hill ratio")?;
    let row = RatioRow::from_fits(symbol, &ls_r, &ls_v, &hill_r, &hill_v)
        .context("tails: assembling table row")?;
    Ok(SymbolFits { row, ratio_ls_err, ratio_hill_err })
}

/// CCDF + local-slope artifacts for one (symbol, scheme) pair. With
/// `lenient_slopes` a CCDF too narrow for the slope curves is reported on
/// stderr instead of failing the run.
fn write_distribution_artifacts(
    out: &mut OutDir,
    prefix: &str,
    abs_r: &[f64],
    volumes: &[f64],
    est: &EstimatorArgs,
    lenient_slopes: bool,
) -> Result<()> {
    let ccdf_r = tails::ccdf(abs_r).with_context(|| format!("tails: return CCDF for {prefix}"))?;
    let ccdf_v = tails::ccdf(volumes).with_context(|| format!("tails: volume CCDF for {prefix}"))?;
    out.write(&format!("{prefix}.ccdf_returns.csv"), csv_string(|w| ccdf_r.write_csv(w))?)?;
    out.write(&format!("{prefix}.ccdf_volumes.csv"), csv_string(|w| ccdf_v.write_csv(w))?)?;

    let slopes = tails::local_slopes(&ccdf_r, est.slope_bins, est.slope_window)
        .with_context(|| format!("tails: local slopes of {prefix} returns"))
        .and_then(|r| {
            tails::local_slopes(&ccdf_v, est.slope_bins, est.slope_window)
                .with_context(|| format!("tails: local slopes of {prefix} volumes"))
                .map(|v| (r, v))
        });
    match slopes {
        Ok((slopes_r, slopes_v)) => {
            let mut csv = String::from("bin,x_r,slope_r,x_v,slope_v,local_xi\n");
            for (i, ((xr, sr), (xv, sv))) in slopes_r.iter().zip(&slopes_v).enumerate() {
                csv.push_str(&format!("{},{},{},{},{},{}\n", i + 1, xr, sr, xv, sv, sr / sv));
            }
            out.write(&format!("{prefix}.local_slopes.csv"), csv)?;
        }
        Err(e) if lenient_slopes => eprintln!("note: skipping local slopes: {e:#}"),
        Err(e) => return Err(e),
    }
    Ok(())
}

pub fn tails(args: &TailsArgs, with_summary: bool) -> Result<()> {
    let mut out = OutDir::create(&args.out.out)?;
    let scheme = args.scheme.scheme();
    let series_list = load_series(&args.input)?;

    let mut fits = Vec::new();
    let mut pooled_r: Vec<f64> = Vec::new();
    let mut pooled_v: Vec<f64> = Vec::new();
    for series in &series_list {
        let b = bars::aggregate(series, &scheme)
            .with_context(|| format!("bars: aggregating {} under {}", series.symbol(), scheme.label()))?;
        let abs_r: Vec<f64> = b.returns.iter().map(|r| r.abs()).collect();
        let prefix = format!("{}.{}", series.symbol(), scheme.label());
        write_distribution_artifacts(&mut out, &prefix, &abs_r, &b.volumes, &args.estimators, false)?;
        fits.push(fit_both_series(series.symbol(), &b, &args.estimators)?);
        if args.pool.pooled() && series_list.len() > 1 {
            pooled_r.extend_from_slice(&abs_r);
            pooled_v.extend_from_slice(&b.volumes);
        }
    }

    let rows: Vec<RatioRow> = fits.iter().map(|f| f.row.clone()).collect();
    let summary = if rows.len() >= 2 { Some(tails::summarize(&rows).context("tails: summary")?) } else { None };
    out.write(
        &format!("tails_report.{}.csv", scheme.label()),
        csv_string(|w| tails::write_table_report(&rows, summary.as_ref(), w))?,
    )?;

    let pooled = if !pooled_r.is_empty() {
        let prefix = format!("POOLED.{}", scheme.label());
        write_distribution_artifacts(&mut out, &prefix, &pooled_r, &pooled_v, &args.estimators, false)?;
        Some(fit_pair("POOLED", &pooled_r, &pooled_v, &args.estimators)?)
    } else {
        None
    };

    if with_summary {
        // The ratio's reciprocal is the implied impact exponent when xi > 1.
        let implied = |xi: f64| impact::implied_beta(xi).ok();
        let (beta_ls, beta_hill) = match &summary {
            Some(s) => (implied(s.ls_ratio.mean), implied(s.hill_ratio.mean)),
            None => (implied(fits[0].row.ratio_ls), implied(fits[0].row.ratio_hill)),
        };
        let report = json!({
            "scheme": scheme,
            "rows": fits.iter().map(|f| RatioRowOut {
                row: f.row.clone(),
                ratio_ls_err: f.ratio_ls_err,
                ratio_hill_err: f.ratio_hill_err,
            }).collect::<Vec<_>>(),
            "summary": summary,
            "implied_beta": { "ls": beta_ls, "hill": beta_hill },
            "pooled": pooled.as_ref().map(|p| RatioRowOut {
                row: p.row.clone(),
                ratio_ls_err: p.ratio_ls_err,
                ratio_hill_err: p.ratio_hill_err,
            }),
        });
        out.write_json(&format!("ratio_summary.{}.json", scheme.label()), &report)?;
    }

    for f in &fits {
        println!(
            "{}: ratio LS {:.3} +- {:.3}, Hill {:.3} +- {:.3}",
            f.row.symbol, f.row.ratio_ls, f.ratio_ls_err, f.row.ratio_hill, f.ratio_hill_err
        );
    }
    if let Some(s) = &summary {
        println!(
            "summary over {} symbols: ratio LS {:.3} +- {:.3}, Hill {:.3} +- {:.3}",
            s.n_symbols, s.ls_ratio.mean, s.ls_ratio.std, s.hill_ratio.mean, s.hill_ratio.std
        );
    }
    let command = if with_summary { "ratio" } else { "tails" };
    out.finish(command, params_json(args)?, digest_inputs(&args.input.inputs)?)
}

#[derive(Serialize)]
struct SurrogateFitOut {
    beta: f64,
    fit: LinearImpactFit,
}

fn impact_artifacts(
    out: &mut OutDir,
    prefix: &str,
    b: &BarSeries,
    est: &EstimatorArgs,
    params: &ImpactParams,
) -> Result<()> {
    let scatter = impact::scatter(b);
    let mut csv = String::from("v,abs_r\n");
    for (v, r) in &scatter.points {
        csv.push_str(&format!("{v},{r}\n"));
    }
    out.write(&format!("{prefix}.scatter.csv"), csv)?;

    let curve = impact::conditional_expectation(b, params.bins)
        .with_context(|| format!("impact: E(r^2|V) for {prefix}"))?;
    out.write(&format!("{prefix}.impact_curve.csv"), csv_string(|w| curve.write_csv(w))?)?;
    let linear_fit = impact::fit_linear(&curve, params.v_min)
        .with_context(|| format!("impact: linear fit for {prefix}"))?;

    let units = if params.normalized_breakpoints {
        BreakpointUnits::Normalized
    } else {
        BreakpointUnits::RawShares
    };
    let bands = impact::conditional_tails(b, &params.breakpoints, units, est.tail_fraction)
        .with_context(|| format!("impact: conditional tails for {prefix}"))?;
    for (i, band) in bands.bands.iter().enumerate() {
        if let Some(c) = &band.ccdf {
            out.write(&format!("{prefix}.band{i}.ccdf.csv"), csv_string(|w| c.write_csv(w))?)?;
        }
    }

    let mut surrogates = Vec::new();
    for &beta in &params.beta {
        let returns = impact::surrogate_returns(&b.volumes, beta)
            .with_context(|| format!("impact: beta = {beta} surrogate for {prefix}"))?;
        let s_curve = impact::conditional_expectation_xy(
            &returns,
            &b.volumes,
            b.scheme,
            params.bins,
            impact::DEFAULT_MIN_BIN_COUNT,
        )
        .with_context(|| format!("impact: surrogate E(r^2|V), beta = {beta}, {prefix}"))?;
        out.write(
            &format!("{prefix}.surrogate_b{beta}.impact_curve.csv"),
            csv_string(|w| s_curve.write_csv(w))?,
        )?;
        let fit = impact::fit_linear(&s_curve, params.v_min)
            .with_context(|| format!("impact: surrogate linear fit, beta = {beta}, {prefix}"))?;
        surrogates.push(SurrogateFitOut { beta, fit });
    }

    out.write_json(
        &format!("{prefix}.impact.json"),
        &json!({
            "scheme": b.scheme,
            "volume_quartiles": scatter.volume_quartiles,
            "linear_fit": linear_fit,
            "conditional_tails": bands,
            "surrogates": surrogates,
        }),
    )?;
    println!(
        "{prefix}: E(r^2|V) = {:.4} + {:.4} V (r^2 = {:.4} for V >= {})",
        linear_fit.a, linear_fit.b, linear_fit.r_squared, linear_fit.v_min
    );
    Ok(())
}

pub fn impact(args: &ImpactArgs) -> Result<()> {
    let mut out = OutDir::create(&args.out.out)?;
    let scheme = args.scheme.scheme();
    for series in &load_series(&args.input)? {
        let b = bars::aggregate(series, &scheme)
            .with_context(|| format!("bars: aggregating {} under {}", series.symbol(), scheme.label()))?;
        let prefix = format!("{}.{}", series.symbol(), scheme.label());
        impact_artifacts(&mut out, &prefix, &b, &args.estimators, &args.params)?;
    }
    out.finish("impact", params_json(args)?, digest_inputs(&args.input.inputs)?)
}

fn qfit_one(b: &BarSeries, target: QfitTarget, pin_mu: bool) -> Result<qgauss::QGaussianFit> {
    let (sample, pin) = match target {
        QfitTarget::Volumes => (&b.volumes, pin_mu),
        QfitTarget::Returns => (&b.returns, true),
    };
    let c = tails::ccdf(sample).context("qgauss: building the CCDF")?;
    qgauss::fit_ccdf(&c, pin).context("qgauss: CCDF fit")
}

pub fn qfit(args: &QfitArgs) -> Result<()> {
    let mut out = OutDir::create(&args.out.out)?;
    let scheme = args.scheme.scheme();
    let target_name = match args.target {
        QfitTarget::Volumes => "volumes",
        QfitTarget::Returns => "returns",
    };
    for series in &load_series(&args.input)? {
        let b = bars::aggregate(series, &scheme)
            .with_context(|| format!("bars: aggregating {} under {}", series.symbol(), scheme.label()))?;
        let fit = qfit_one(&b, args.target, args.pin_mu)
            .with_context(|| format!("qgauss: fitting {} {}", series.symbol(), target_name))?;
        let report = fit.report();
        out.write_json(
            &format!("{}.{}.qfit_{target_name}.json", series.symbol(), scheme.label()),
            &report,
        )?;
        println!(
            "{}: q = {:.4}, sigma_q = {:.4}, alpha_qG = {:.3} ({} points, objective {:.3e})",
            series.symbol(),
            report.q,
            report.sigma_q,
            report.alpha_qg,
            report.n_points,
            report.objective
        );
    }
    out.finish("qfit", params_json(args)?, digest_inputs(&args.input.inputs)?)
}

pub fn synth(args: &SynthArgs) -> Result<()> {
    let mut out = OutDir::create(&args.out.out)?;
    let volume_law = match args.law.as_str() {
        "pareto" => VolumeLaw::Pareto { alpha: args.alpha, x_min: args.x_min },
        "qgauss" => VolumeLaw::QGaussianAbs { q: args.q, sigma: args.sigma },
        other => bail!("synth: unknown volume law `{other}` (expected pareto or qgauss)"),
    };
    let spec = MarketSpec {
        symbol: args.symbol.clone(),
        n_trades: args.n,
        volume_law,
        impact_beta: args.beta,
        noise_sigma: args.noise_sigma,
        base_price: args.base_price,
        dt_ms: args.dt_ms,
        return_scale: args.return_scale,
        seed: args.seed,
    };
    let series = synth::gen_market(&spec).context("synth: generating the market")?;
    out.write(&format!("{}.ticks.csv", spec.symbol), csv_string(|w| series.write_csv(w))?)?;
    out.write_json("synth_spec.json", &spec)?;
    println!("{}: generated {} trades (seed {})", spec.symbol, series.len(), spec.seed);
    out.finish("synth", params_json(args)?, Vec::new())
}

pub fn report(args: &ReportArgs) -> Result<()> {
    let mut out = OutDir::create(&args.out.out)?;
    let mut schemes: Vec<AggregationScheme> = args
        .dt_min
        .iter()
        .map(|&delta_t_min| AggregationScheme::ClockTime { delta_t_min })
        .collect();
    schemes.extend(args.n_trades.iter().map(|&n_t| AggregationScheme::TradeCount { n_t }));
    if schemes.is_empty() {
        bail!("report: no schemes requested");
    }
    let primary = schemes[0];
    let series_list = load_series(&args.input)?;

    let mut fits = Vec::new();
    let mut pooled_r: Vec<f64> = Vec::new();
    let mut pooled_v: Vec<f64> = Vec::new();
    for series in &series_list {
        for scheme in &schemes {
            let b = bars::aggregate(series, scheme).with_context(|| {
                format!("bars: aggregating {} under {}", series.symbol(), scheme.label())
            })?;
            let abs_r: Vec<f64> = b.returns.iter().map(|r| r.abs()).collect();
            let prefix = format!("{}.{}", series.symbol(), scheme.label());
            write_distribution_artifacts(&mut out, &prefix, &abs_r, &b.volumes, &args.estimators, true)?;

            let symbol_fits = fit_both_series(series.symbol(), &b, &args.estimators)?;
            out.write_json(&format!("{prefix}.tailfits.json"), &symbol_fits.row)?;

            // A scheme can legitimately leave too few or too narrow volume
            // bars for a distribution fit; record that instead of aborting
            // the survey.
            match qfit_one(&b, QfitTarget::Volumes, false) {
                Ok(fit) => out.write_json(&format!("{prefix}.qfit_volumes.json"), &fit.report())?,
                Err(e) => out.write_json(
                    &format!("{prefix}.qfit_volumes.json"),
                    &json!({ "error": format!("{e:#}") }),
                )?,
            }

            if *scheme == primary {
                impact_artifacts(&mut out, &prefix, &b, &args.estimators, &args.impact)?;
                fits.push(symbol_fits);
                if args.pool.pooled() && series_list.len() > 1 {
                    pooled_r.extend_from_slice(&abs_r);
                    pooled_v.extend_from_slice(&b.volumes);
                }
            }
        }
    }

    let rows: Vec<RatioRow> = fits.iter().map(|f| f.row.clone()).collect();
    let summary =
        if rows.len() >= 2 { Some(tails::summarize(&rows).context("tails: summary")?) } else { None };
    out.write(
        &format!("tails_report.{}.csv", primary.label()),
        csv_string(|w| tails::write_table_report(&rows, summary.as_ref(), w))?,
    )?;
    if !pooled_r.is_empty() {
        let prefix = format!("POOLED.{}", primary.label());
        write_distribution_artifacts(&mut out, &prefix, &pooled_r, &pooled_v, &args.estimators, true)?;
    }
    out.write_json(
        &format!("ratio_summary.{}.json", primary.label()),
        &json!({
            "scheme": primary,
            "rows": fits.iter().map(|f| RatioRowOut {
                row: f.row.clone(),
                ratio_ls_err: f.ratio_ls_err,
                ratio_hill_err: f.ratio_hill_err,
            }).collect::<Vec<_>>(),
            "summary": summary,
        }),
    )?;
    if let Some(s) = &summary {
        println!(
            "summary over {} symbols: ratio LS {:.3} +- {:.3}, Hill {:.3} +- {:.3}",
            s.n_symbols, s.ls_ratio.mean, s.ls_ratio.std, s.hill_ratio.mean, s.hill_ratio.std
        );
    }
    out.finish("report", params_json(args)?, digest_inputs(&args.input.inputs)?)
}
