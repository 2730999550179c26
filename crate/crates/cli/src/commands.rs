use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use log::info;
use serde::Serialize;

use structural_recovery::calibration::{
    bin_points, fit_b_with, BinDomain, BinOptions, CalibrationError, FitOptions, FitReport,
    MaturityComparison, Weighting,
};
use structural_recovery::cohort::{
    ingest, pearson, read_series, rolling_series, write_series, CohortRecord, CohortSpec, Rating,
    Seniority,
};
use structural_recovery::exec::with_threads;
use structural_recovery::format_float;
use structural_recovery::model::{sample_curves, CompoundB, ModelParams};
use structural_recovery::simulator::{generate_dataset, simulate, SimConfig, SyntheticDatasetConfig};

use crate::config::Resolver;
use crate::error::{CliError, Result};
use crate::fit_input;
use crate::values::{FloatList, PathArg, PathList, RatingList, TargetList};
use crate::{
    CohortArgs, CorrelateArgs, CurvesArgs, FitArgs, GenDataArgs, Globals, SimulateArgs,
};

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::io(path, e)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

fn in_out_dir(g: &Globals, name: &str) -> PathArg {
    PathArg(g.out_dir.join(name).display().to_string())
}

pub fn curves(args: CurvesArgs, g: &Globals, r: &mut Resolver) -> Result<()> {
    let bs: FloatList = r.required("b", args.b)?;
    let n: usize = r.value("grid-points", args.grid_points, 99)?;
    r.finish()?;
    if n == 0 {
        return Err(CliError::Usage("grid-points must be positive".into()));
    }
    let b_values = bs
        .0
        .iter()
        .map(|&b| CompoundB::new(b).map_err(|e| CliError::Usage(format!("--b {b}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    let grid: Vec<f64> = (1..=n).map(|i| i as f64 / (n + 1) as f64).collect();
    let curves = sample_curves(&b_values, &grid).map_err(|e| CliError::Usage(e.to_string()))?;

    let path = g.out_dir.join("curves.csv");
    let mut w = csv::Writer::from_writer(create(&path)?);
    w.write_record(["b", "pd", "rr", "loss"]).map_err(csv_err(&path))?;
    for c in &curves {
        for p in &c.points {
            w.write_record([
                format_float(c.b.value()),
                format_float(p.pd.value()),
                format_float(p.rr),
                format_float(p.loss),
            ])
            .map_err(csv_err(&path))?;
        }
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;
    info!("wrote {} curves x {n} points to {}", curves.len(), path.display());
    println!("curves: {} x {} rows -> {}", curves.len(), n, path.display());
    r.write_echo("curves", &g.out_dir.join("curves.resolved.conf"))
}

pub fn simulate_cmd(args: SimulateArgs, g: &Globals, r: &mut Resolver) -> Result<()> {
    let mu = r.value("mu", args.mu, 0.0)?;
    let sigma = r.value("sigma", args.sigma, 0.4)?;
    let c = r.value("c", args.c, 0.5)?;
    let maturity = r.value("maturity", args.maturity, 1.0)?;
    let v0 = r.value("v0", args.v0, 1.0)?;
    // Default face value: the median terminal asset value.
    let median = v0 * ((mu - 0.5 * sigma * sigma) * maturity).exp();
    let face_value = r.value("face-value", args.face_value, median)?;
    let firms = r.value("firms", args.firms, 10_000usize)?;
    let realizations = r.value("realizations", args.realizations, 2_000u64)?;
    r.record("seed", &g.seed);
    r.finish()?;
    let cfg = SimConfig {
        params: ModelParams {
            mu,
            sigma,
            c,
            maturity,
            v0,
            face_value,
        },
        firms,
        realizations,
        seed: g.seed,
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let out = with_threads(g.threads, || simulate(&cfg)).map_err(|e| CliError::Usage(e.to_string()))?;

    let path = g.out_dir.join("simulate.csv");
    let mut w = csv::Writer::from_writer(create(&path)?);
    w.write_record(["realization_index", "pd_real", "rr_real"])
        .map_err(csv_err(&path))?;
    for m in &out {
        w.write_record([
            m.index.to_string(),
            format_float(m.pd_real),
            m.rr_real.map(format_float).unwrap_or_default(),
        ])
        .map_err(csv_err(&path))?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;
    let with_defaults = out.iter().filter(|m| m.rr_real.is_some()).count();
    info!("simulated {realizations} realizations of {firms} firms");
    println!(
        "simulate: {} realizations ({} with defaults), B = {} -> {}",
        out.len(),
        with_defaults,
        structural_recovery::model::compound_b(&cfg.params).value(),
        path.display()
    );
    r.write_echo("simulate", &g.out_dir.join("simulate.resolved.conf"))
}

const DEFAULT_TARGETS: &str = "B1=0.05,B2=0.08,B3=0.12,Caa1=0.18,Caa2=0.25,Caa3=0.35";

fn date(y: i32, m: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, 1).expect("valid date")
}

pub fn gen_data(args: GenDataArgs, g: &Globals, r: &mut Resolver) -> Result<()> {
    let c = r.value("c", args.c, 0.4)?;
    let maturity: u32 = r.value("maturity", args.maturity, 2)?;
    let sigma = match r.optional::<f64>("sigma", args.sigma)? {
        Some(s) => {
            if args.b.is_some() {
                return Err(CliError::Usage("give either --b or --sigma, not both".into()));
            }
            s
        }
        None => {
            let b = r.value("b", args.b, 0.882)?;
            if b.is_nan() || b <= 0.0 || !(0.0..1.0).contains(&c) || maturity == 0 {
                return Err(CliError::Usage(format!(
                    "cannot reach B = {b} with c = {c}, maturity = {maturity}"
                )));
            }
            SyntheticDatasetConfig::sigma_for_b(b, c, maturity)
        }
    };
    let mu = r.value("mu", args.mu, 0.0)?;
    let v0 = r.value("v0", args.v0, 1.0)?;
    let targets: TargetList = r.value("ratings", args.ratings, DEFAULT_TARGETS.parse().unwrap())?;
    let p_w = r.value("withdrawal-prob", args.withdrawal_prob, 0.1)?;
    let per_rating = r.value("issuers-per-rating", args.issuers_per_rating, 500usize)?;
    let first = r.value("first", args.first, date(2000, 1))?;
    let last = r.value("last", args.last, date(2009, 1))?;
    let seniority = r.value("seniority", args.seniority, Seniority::SeniorUnsecured)?;
    r.record("seed", &g.seed);
    r.finish()?;
    if first > last {
        return Err(CliError::Usage(format!("--first {first} is after --last {last}")));
    }
    let cfg = SyntheticDatasetConfig {
        mu,
        sigma,
        c,
        maturity_years: maturity,
        v0,
        ratings: targets.0,
        withdrawal_prob: p_w,
        issuers_per_rating: per_rating,
        start_dates: structural_recovery::cohort::monthly_starts(first, last),
        seniority,
        seed: g.seed,
    };
    let data = with_threads(g.threads, || generate_dataset(&cfg))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    data.write_to_dir(&g.out_dir).map_err(|e| CliError::Io(e.to_string()))?;
    let counts = &data.manifest.row_counts;
    println!(
        "gen-data: {} issuers, {} rating rows, {} events over {} start dates, B = {} -> {}",
        counts.issuers,
        counts.ratings,
        counts.events,
        cfg.start_dates.len(),
        data.manifest.b(),
        g.out_dir.display()
    );
    r.write_echo("gen-data", &g.out_dir.join("gen-data.resolved.conf"))
}

pub fn cohort(args: CohortArgs, g: &Globals, r: &mut Resolver) -> Result<()> {
    let data_dir: PathArg = r.value("data-dir", args.data_dir, PathArg(g.out_dir.display().to_string()))?;
    let base = |name: &str| PathArg(Path::new(&data_dir.0).join(name).display().to_string());
    let issuers: PathArg = r.value("issuers", args.issuers, base("issuers.csv"))?;
    let ratings_path: PathArg = r.value("ratings-file", args.ratings_file, base("ratings.csv"))?;
    let events: PathArg = r.value("events", args.events, base("events.csv"))?;
    let first = r.value("first", args.first, date(2000, 1))?;
    let last = r.value("last", args.last, date(2010, 1))?;
    let maturity: u32 = r.value("maturity", args.maturity, 1)?;
    let ratings: RatingList = r.value("ratings", args.ratings, RatingList(Rating::SPECULATIVE.to_vec()))?;
    let seniority = r.value("seniority", args.seniority, Seniority::SeniorUnsecured)?;
    let split = r.value("split-ratings", args.split_ratings, false)?;
    r.finish()?;
    if maturity == 0 {
        return Err(CliError::Usage("maturity must be at least 1".into()));
    }
    if first > last {
        return Err(CliError::Usage(format!("--first {first} is after --last {last}")));
    }

    let resolve = |p: &PathArg| PathBuf::from(&p.0);
    let store = ingest(&resolve(&issuers), &resolve(&ratings_path), &resolve(&events)).map_err(|e| {
        let mut msg = e.to_string();
        for d in e.diagnostics().iter().take(20) {
            msg.push_str(&format!("\n  {d}"));
        }
        CliError::Data(msg)
    })?;
    info!(
        "ingested {} issuers, {} snapshots, {} events",
        store.issuer_count(),
        store.snapshot_count(),
        store.event_count()
    );

    let groups: Vec<Vec<Rating>> = if split {
        ratings.0.iter().map(|&r| vec![r]).collect()
    } else {
        vec![ratings.0.clone()]
    };
    let mut records = Vec::new();
    for group in groups {
        let spec = CohortSpec::new(first, maturity, group, seniority);
        let series = rolling_series(&store, &spec, first, last).map_err(|e| CliError::Usage(e.to_string()))?;
        let group_records: Vec<CohortRecord> =
            series.iter().map(|p| CohortRecord::from_point(&spec, p)).collect();
        let defined = group_records.iter().filter(|c| c.pd.is_some()).count();
        let usable = group_records.iter().filter(|c| c.pd_rr().is_some()).count();
        if let [only] = group_records.as_slice() {
            println!(
                "cohort {} [{}]: n_c={} n_w={} n_d={} pd={} mean_rr={} status={}",
                only.start,
                only.ratings,
                only.n_c,
                only.n_w,
                only.n_d,
                only.pd.map_or("NA".into(), |v| v.to_string()),
                only.mean_rr.map_or("NA".into(), |v| v.to_string()),
                only.status
            );
        } else {
            println!(
                "cohorts [{}]: {} windows, {} with defined pd, {} with recoveries",
                spec.ratings_label(),
                group_records.len(),
                defined,
                usable
            );
        }
        records.extend(group_records);
    }
    let path = g.out_dir.join("cohorts.csv");
    write_series(create(&path)?, &records).map_err(csv_err(&path))?;
    r.write_echo("cohort", &g.out_dir.join("cohort.resolved.conf"))?;
    if records.iter().all(|c| c.pd.is_none()) {
        return Err(CliError::Degenerate("default rate undefined for every cohort".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct CorrelationSummary {
    series: String,
    pearson: f64,
    n_cohorts: usize,
    n_skipped: usize,
}

pub fn correlate(args: CorrelateArgs, g: &Globals, r: &mut Resolver) -> Result<()> {
    let series: PathArg = r.value("series", args.series, in_out_dir(g, "cohorts.csv"))?;
    r.finish()?;
    let path = PathBuf::from(&series.0);
    let file = File::open(&path).map_err(|e| CliError::io(&path, e))?;
    let records = read_series(file).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let pairs: Vec<(f64, f64)> = records.iter().filter_map(|c| c.pd_rr()).collect();
    let coefficient = pearson(&pairs).map_err(|e| CliError::Degenerate(e.to_string()))?;
    println!("pearson = {coefficient} over {} cohorts", pairs.len());
    write_json(
        &g.out_dir.join("correlation.json"),
        &CorrelationSummary {
            series: series.0.clone(),
            pearson: coefficient,
            n_cohorts: pairs.len(),
            n_skipped: records.len() - pairs.len(),
        },
    )?;
    r.write_echo("correlate", &g.out_dir.join("correlate.resolved.conf"))
}

#[derive(Serialize)]
struct FitEntry {
    input: String,
    report: String,
    maturity_years: Option<f64>,
    b_hat: f64,
    sse: f64,
    n_bins_used: usize,
    n_points: usize,
    n_skipped: usize,
    warning: Option<String>,
}

#[derive(Serialize)]
struct FitSummary {
    fits: Vec<FitEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    maturity_comparison: Option<MaturityComparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

fn parse_choice<T>(key: &str, text: &str, options: &[(&str, T)]) -> Result<T>
where
    T: Copy,
{
    options
        .iter()
        .find(|(name, _)| *name == text)
        .map(|&(_, v)| v)
        .ok_or_else(|| {
            let names: Vec<_> = options.iter().map(|(n, _)| *n).collect();
            CliError::Usage(format!("--{key} must be one of {names:?}, got '{text}'"))
        })
}

pub fn fit(args: FitArgs, g: &Globals, r: &mut Resolver) -> Result<()> {
    let inputs: PathList = r.value("input", args.input, PathList(vec![in_out_dir(g, "cohorts.csv").0]))?;
    let maturities: Option<FloatList> = r.optional("maturities", args.maturities)?;
    let n_bins = r.value("bins", args.bins, 30usize)?;
    let min_count = r.value("min-count", args.min_count, 5usize)?;
    let domain: String = r.value("domain", args.domain, "observed".to_string())?;
    let weighting: String = r.value("weighting", args.weighting, "unweighted".to_string())?;
    let b_lower = r.value("b-lower", args.b_lower, 1e-3)?;
    let b_upper = r.value("b-upper", args.b_upper, 5.0)?;
    r.finish()?;
    let domain = parse_choice("domain", &domain, &[("observed", BinDomain::Observed), ("unit", BinDomain::Unit)])?;
    let weighting = parse_choice(
        "weighting",
        &weighting,
        &[("unweighted", Weighting::Unweighted), ("by-count", Weighting::ByCount)],
    )?;
    if let Some(m) = &maturities {
        if m.0.len() != inputs.0.len() {
            return Err(CliError::Usage(format!(
                "{} maturities for {} inputs",
                m.0.len(),
                inputs.0.len()
            )));
        }
    }
    let bin_options = BinOptions {
        n_bins,
        min_count,
        domain,
    };
    let fit_options = FitOptions {
        b_lower,
        b_upper,
        weighting,
        ..FitOptions::default()
    };

    let mut fits = Vec::new();
    for (k, input) in inputs.0.iter().enumerate() {
        let loaded = fit_input::load(Path::new(input))?;
        let maturity = maturities.as_ref().map(|m| m.0[k]).or(loaded.maturity_years);
        let binned = bin_points(&loaded.points, &bin_options).map_err(|e| match e {
            CalibrationError::EmptyInput => CliError::Degenerate(format!("{input}: no usable points")),
            CalibrationError::InvalidOption(m) => CliError::Usage(m),
            other => CliError::Data(format!("{input}: {other}")),
        })?;
        let result = fit_b_with(&binned, &fit_options).map_err(|e| match e {
            CalibrationError::InvalidOption(m) => CliError::Usage(m),
            other => CliError::Degenerate(format!("{input}: {other}")),
        })?;
        let result = result.with_label(input.clone(), maturity);
        let report_name = if inputs.0.len() == 1 {
            "fit_report.csv".to_string()
        } else {
            format!("fit_report_{}.csv", k + 1)
        };
        let report = FitReport::new(&binned, result.clone());
        let report_path = g.out_dir.join(&report_name);
        report
            .write_csv(create(&report_path)?)
            .map_err(csv_err(&report_path))?;
        if let Some(w) = &result.warning {
            eprintln!("warning: {input}: {w}");
        }
        println!(
            "fit {input}: b_hat = {} sse = {} bins = {} points = {} skipped = {}{}",
            result.b_hat,
            result.sse,
            result.n_bins_used,
            loaded.points.len(),
            loaded.skipped,
            maturity.map_or(String::new(), |t| format!(" maturity = {t}"))
        );
        fits.push(FitEntry {
            input: input.clone(),
            report: report_name,
            maturity_years: maturity,
            b_hat: result.b_hat,
            sse: result.sse,
            n_bins_used: result.n_bins_used,
            n_points: loaded.points.len(),
            n_skipped: loaded.skipped,
            warning: result.warning,
        });
    }

    let with_t: Vec<(f64, f64)> = fits
        .iter()
        .filter_map(|f| f.maturity_years.map(|t| (t, f.b_hat)))
        .collect();
    let comparison = match with_t.as_slice() {
        [a, b, ..] if a.0 != b.0 => Some(MaturityComparison::new(*a, *b)),
        _ => None,
    };
    let note = comparison.as_ref().map(|c| {
        let line = format!(
            "B({}) / B({}) = {} vs sqrt(T ratio) = {}; constant parameters imply B grows like sqrt(T), fitted B {}",
            c.long_years,
            c.short_years,
            c.b_ratio,
            c.sqrt_t_ratio,
            if c.decreasing() { "decreases with T" } else { "does not decrease with T" }
        );
        println!("{line}");
        line
    });
    write_json(
        &g.out_dir.join("fit_summary.json"),
        &FitSummary {
            fits,
            maturity_comparison: comparison,
            note,
        },
    )?;
    r.write_echo("fit", &g.out_dir.join("fit.resolved.conf"))
}
