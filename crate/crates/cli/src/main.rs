//! `modone` command-line front end.
//!
//! Every run writes its data artifacts plus `<name>.manifest.json`, which
//! records the fully resolved parameters; `modone rerun --manifest FILE`
//! reproduces the artifacts byte for byte.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use modone::fourier::{cross_validate, exp_sum_points, points_for_frequencies, r2_fourier_points, FourierWindow};
use modone::localstats::{
    circular_gap_distribution, fmt17, gap_distribution, gap_sandwich, k_level_correlation, k_level_correlation_brute,
    parse_window, poisson_reference, CorrelationEstimate, GapDistribution,
};
use modone::montecarlo::{decay_fit, evaluate, expectation_from, variance_from, ExperimentManifest, ExperimentPlan, GridRow};
use modone::oscint::{canonicalize, vdc_check, write_derivative_csv, AlphaInterval, PhaseSpec};
use modone::seqgen::{
    frac_parts, read_binary, read_text, write_binary, write_text, PointSet, PrecisionPolicy, SequenceSpec,
    DEFAULT_TARGET, MAGIC,
};
use modone::Error;

const OUT_ENV: &str = "MODONE_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "modone", version, about = "Local statistics of {β·n^α} mod 1")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct Global {
    /// Output directory.
    #[arg(long, global = true, env = OUT_ENV, default_value = ".")]
    out: PathBuf,
    /// Artifact format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Artifact base name (defaults to the subcommand).
    #[arg(long, global = true)]
    name: Option<String>,
    /// Worker threads (defaults to the available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Encoding {
    Text,
    Binary,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Algo {
    Direct,
    Brute,
    Fourier,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum GapKindArg {
    Linear,
    Circular,
}

/// Where the points come from: `{β·n^α}` or a file written by `gen`.
#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct Source {
    #[arg(long, value_delimiter = ',')]
    alpha: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    n: Option<usize>,
    /// Point file (text or binary) instead of a generated sequence.
    #[arg(long, conflicts_with = "alpha")]
    points: Option<PathBuf>,
    /// Fixed working precision; automatic when absent.
    #[arg(long)]
    bits: Option<u32>,
    /// Target absolute error of each fractional part.
    #[arg(long, default_value_t = DEFAULT_TARGET)]
    target: f64,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "subcommand", content = "parameters", rename_all = "lowercase")]
enum Command {
    /// Generate a point file.
    Gen {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = Encoding::Text)]
        encoding: Encoding,
    },
    /// k-level correlation sums (one row per α).
    Corr {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// box:a:b, gauss:sigma:radius, bump:radius:order or simplex:x.
        #[arg(long, default_value = "box:-0.5:0.5")]
        window: String,
        #[arg(long, value_enum, default_value_t = Algo::Direct)]
        algorithm: Algo,
        /// Frequency cutoff exponent for the Fourier route.
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
    /// Gap distribution, optionally with sandwich bounds.
    Gaps {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
        x: Vec<f64>,
        #[arg(long, value_enum, default_value_t = GapKindArg::Linear)]
        kind: GapKindArg,
        /// Sandwich orders; bounds compare with the circular distribution.
        #[arg(long = "K", value_delimiter = ',')]
        #[serde(rename = "K")]
        sandwich: Vec<usize>,
    },
    /// Exponential sums S(n), optionally cross-validated against the direct R_2.
    Fourier {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        n_max: Option<i64>,
        #[arg(long)]
        cross_validate: bool,
        #[arg(long, default_value = "gauss:1:8")]
        window: String,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
    /// Repulsion / van der Corput report for one phase.
    Oscint {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        u: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        x: Vec<f64>,
        #[arg(long = "A")]
        #[serde(rename = "A")]
        a: f64,
        #[arg(long = "N")]
        #[serde(rename = "N")]
        n: f64,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long, default_value_t = 1000)]
        grid: usize,
        /// Also dump φ'…φ'''' at this many points.
        #[arg(long)]
        curve_samples: Option<usize>,
    },
    /// Expectation and variance over α ∈ [A, A+1], with a decay fit.
    Variance {
        #[arg(long = "A")]
        #[serde(rename = "A")]
        a: f64,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long = "N-grid", value_delimiter = ',')]
        #[serde(rename = "N_grid")]
        n_grid: Vec<usize>,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "gauss:1:8")]
        window: String,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
    },
    /// Merge manifests into one summary table.
    Report {
        manifests: Vec<PathBuf>,
    },
    /// Re-run the command recorded in a manifest.
    Rerun {
        #[arg(long)]
        manifest: PathBuf,
    },
}

impl Command {
    fn label(&self) -> &'static str {
        match self {
            Command::Gen { .. } => "gen",
            Command::Corr { .. } => "corr",
            Command::Gaps { .. } => "gaps",
            Command::Fourier { .. } => "fourier",
            Command::Oscint { .. } => "oscint",
            Command::Variance { .. } => "variance",
            Command::Report { .. } => "report",
            Command::Rerun { .. } => "rerun",
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RunManifest {
    tool: String,
    version: String,
    #[serde(flatten)]
    command: Command,
    format: Format,
    name: String,
    artifacts: Vec<String>,
    /// Values derived during the run (working precision, degeneracy, ...).
    resolved: Map<String, Value>,
    /// Run-specific record that is not an artifact (e.g. wall-clock time).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    experiment: Option<ExperimentManifest>,
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::PrecisionInfeasible { .. } => 3,
            Error::Budget(_) => 4,
            Error::Io(_) | Error::Json(_) | Error::Format(_) => 5,
            Error::Domain(_) | Error::Precondition(_) | Error::Width(_) => 2,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::from(e).into()
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Error::from(e).into()
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: msg.into(),
    }
}

fn csv_failure(e: csv::Error) -> Failure {
    modone::localstats::csv_err(e).into()
}

struct Run {
    out: PathBuf,
    name: String,
    format: Format,
    artifacts: Vec<String>,
    resolved: Map<String, Value>,
    experiment: Option<ExperimentManifest>,
}

impl Run {
    fn create(&mut self, suffix: &str) -> Result<BufWriter<File>, Failure> {
        let file = format!("{}{suffix}", self.name);
        let path = self.out.join(&file);
        let f = File::create(&path).map_err(|e| Failure {
            code: 5,
            message: format!("cannot create {}: {e}", path.display()),
        })?;
        self.artifacts.push(file);
        Ok(BufWriter::new(f))
    }

    fn resolve(&mut self, key: &str, v: Value) {
        self.resolved.insert(key.to_string(), v);
    }
}

fn policy(source: &Source) -> PrecisionPolicy {
    match source.bits {
        Some(b) => PrecisionPolicy::fixed(b, source.target),
        None => PrecisionPolicy::auto(source.target),
    }
}

fn read_points(path: &Path) -> Result<PointSet, Failure> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Failure {
            code: 5,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
    Ok(if bytes.starts_with(MAGIC.as_bytes()) {
        read_binary(&bytes[..])?
    } else {
        read_text(&bytes[..])?
    })
}

/// `(α or None, points)` for every requested source.
fn point_sets(source: &Source, run: &mut Run) -> Result<Vec<(Option<f64>, PointSet)>, Failure> {
    if let Some(p) = &source.points {
        let ps = read_points(p)?;
        run.resolve("N", json!(ps.len()));
        return Ok(vec![(None, ps)]);
    }
    let n = source.n.ok_or_else(|| usage("--N is required with --alpha"))?;
    if source.alpha.is_empty() {
        return Err(usage("give --alpha or --points"));
    }
    let mut out = Vec::new();
    let mut bits = Vec::new();
    for &alpha in &source.alpha {
        let ps = frac_parts(&SequenceSpec::new(alpha, source.beta, n)?, &policy(source))?;
        bits.push(ps.bits());
        out.push((Some(alpha), ps));
    }
    run.resolve("bits", json!(bits));
    run.resolve("err_bound", json!(out.iter().map(|p| p.1.err_bound()).collect::<Vec<_>>()));
    Ok(out)
}

fn gen(run: &mut Run, source: &Source, encoding: Encoding) -> Result<(), Failure> {
    let sets = point_sets(source, run)?;
    let multiple = sets.len() > 1;
    for (i, (_, ps)) in sets.iter().enumerate() {
        let tag = if multiple { format!(".{i}") } else { String::new() };
        match encoding {
            Encoding::Text => write_text(ps, run.create(&format!("{tag}.txt"))?)?,
            Encoding::Binary => write_binary(ps, run.create(&format!("{tag}.bin"))?)?,
        }
    }
    Ok(())
}

fn corr(run: &mut Run, source: &Source, k: usize, window: &str, algorithm: Algo, eps: f64) -> Result<(), Failure> {
    let w = parse_window(window, k - 1)?;
    let reference = poisson_reference(&w);
    let sets = point_sets(source, run)?;
    let mut rows: Vec<CorrelationEstimate> = Vec::new();
    for (_, ps) in &sets {
        rows.push(match algorithm {
            Algo::Direct => k_level_correlation(ps, &w, k)?,
            Algo::Brute => k_level_correlation_brute(ps, &w, k)?,
            Algo::Fourier => {
                if k != 2 {
                    return Err(usage("the Fourier route computes R_2 only"));
                }
                let fw = FourierWindow::new(w.clone())?;
                if let Some(msg) = fw.warning() {
                    eprintln!("warning: {msg}");
                }
                r2_fourier_points(&fw, ps, eps)?
            }
        });
    }
    run.resolve("reference", json!(reference));
    match run.format {
        Format::Json => {
            let v = json!({ "estimates": rows, "reference": reference });
            write_json(run.create(".json")?, &v)?;
        }
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(run.create(".csv")?);
            wtr.write_record(["alpha", "N", "k", "window", "algorithm", "value", "reference"])
                .map_err(csv_failure)?;
            for r in &rows {
                let alpha = r.alpha.map(fmt17).unwrap_or_else(|| "external".into());
                let algo = serde_json::to_value(r.algorithm)?;
                wtr.write_record([
                    alpha,
                    r.n.to_string(),
                    r.k.to_string(),
                    r.window.clone(),
                    algo.as_str().unwrap_or_default().to_string(),
                    fmt17(r.value),
                    fmt17(reference),
                ])
                .map_err(csv_failure)?;
            }
            wtr.flush()?;
        }
    }
    Ok(())
}

fn gaps(run: &mut Run, source: &Source, xs: &[f64], kind: GapKindArg, sandwich: &[usize]) -> Result<(), Failure> {
    let sets = point_sets(source, run)?;
    if sets.len() != 1 {
        return Err(usage("gaps takes a single α"));
    }
    let ps = &sets[0].1;
    let dist: GapDistribution = match kind {
        GapKindArg::Linear => gap_distribution(ps, xs)?,
        GapKindArg::Circular => circular_gap_distribution(ps, xs)?,
    };
    let circular = if sandwich.is_empty() {
        None
    } else {
        Some(circular_gap_distribution(ps, xs)?)
    };
    let mut bounds = Vec::new();
    for &kk in sandwich {
        bounds.push(xs.iter().map(|&x| gap_sandwich(ps, x, kk)).collect::<modone::Result<Vec<_>>>()?);
    }
    match run.format {
        Format::Json => {
            let v = json!({ "distribution": dist, "circular": circular, "sandwich": bounds });
            write_json(run.create(".json")?, &v)?;
        }
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(run.create(".csv")?);
            let mut header = vec!["x".to_string(), "g".to_string()];
            if circular.is_some() {
                header.push("G_circular".into());
            }
            for kk in sandwich {
                header.push(format!("lower_K{kk}"));
                header.push(format!("upper_K{kk}"));
            }
            wtr.write_record(&header).map_err(csv_failure)?;
            for (i, x) in xs.iter().enumerate() {
                let mut row = vec![fmt17(*x), fmt17(dist.g_values[i])];
                if let Some(c) = &circular {
                    row.push(fmt17(c.g_values[i]));
                }
                for b in &bounds {
                    row.push(fmt17(b[i].lower));
                    row.push(fmt17(b[i].upper));
                }
                wtr.write_record(&row).map_err(csv_failure)?;
            }
            wtr.flush()?;
        }
    }
    Ok(())
}

fn fourier(
    run: &mut Run,
    source: &Source,
    n_max: Option<i64>,
    cross: bool,
    window: &str,
    eps: f64,
) -> Result<(), Failure> {
    if source.points.is_some() || source.alpha.len() != 1 {
        return Err(usage("fourier takes a single generated sequence (--alpha, --N)"));
    }
    let n = source.n.ok_or_else(|| usage("--N is required"))?;
    let spec = SequenceSpec::new(source.alpha[0], source.beta, n)?;
    let t = n_max.unwrap_or(n as i64);
    if t < 0 {
        return Err(usage("--n-max must be nonnegative"));
    }
    let ps = points_for_frequencies(&spec, &policy(source), t)?;
    run.resolve("n_max", json!(t));
    run.resolve("bits", json!(ps.bits()));
    let rows = (-t..=t).map(|m| Ok((m, exp_sum_points(m, &ps)?))).collect::<modone::Result<Vec<_>>>()?;
    match run.format {
        Format::Csv => modone::fourier::write_spectrum_csv(&rows, run.create(".csv")?)?,
        Format::Json => {
            let v: Vec<Value> = rows.iter().map(|(m, s)| json!({"n": m, "re": s.re, "im": s.im})).collect();
            write_json(run.create(".json")?, &v)?;
        }
    }
    if cross {
        let fw = FourierWindow::new(parse_window(window, 1)?)?;
        let cv = cross_validate(&fw, &spec, eps, &policy(source))?;
        write_json(run.create(".cross.json")?, &cv)?;
        if !cv.pass {
            eprintln!(
                "warning: direct and Fourier R_2 differ by {:e}, above the budget {:e}",
                cv.difference, cv.bound
            );
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn oscint(
    run: &mut Run,
    u: &[f64],
    x: &[f64],
    a: f64,
    n: f64,
    eps: f64,
    grid: usize,
    curve_samples: Option<usize>,
) -> Result<(), Failure> {
    PhaseSpec::new(u.to_vec(), x.to_vec())?;
    let (phase, degeneracy) = canonicalize(u, x);
    run.resolve("degeneracy", json!(degeneracy));
    run.resolve("canonical_u", json!(phase.u));
    run.resolve("canonical_x", json!(phase.x));
    let j = AlphaInterval::new(a)?;
    let report = vdc_check(&phase, &j, n, eps, grid)?;
    if report.anomaly {
        eprintln!("warning: |I| exceeds 100·λ^(-1/d); the integral is suspect");
    }
    // Reports are JSON regardless of --format.
    write_json(run.create(".json")?, &[report])?;
    if let Some(s) = curve_samples {
        write_derivative_csv(&phase, &j, s, run.create(".curves.csv")?)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn variance(
    run: &mut Run,
    a: f64,
    k: usize,
    n_grid: &[usize],
    samples: usize,
    seed: u64,
    window: &str,
    beta: f64,
) -> Result<(), Failure> {
    let start = Instant::now();
    let w = parse_window(window, k - 1)?;
    let mut plan = ExperimentPlan::new(k, a, n_grid.to_vec(), samples, seed, w)?;
    plan.beta = beta;
    plan.validate()?;

    // Per-N checkpoint so an interrupted sweep resumes where it stopped.
    let ckpt = run.out.join(format!("{}.checkpoint.json", run.name));
    let mut rows: Vec<GridRow> = match File::open(&ckpt) {
        Ok(f) => {
            let saved: (ExperimentPlan, Vec<GridRow>) = serde_json::from_reader(BufReader::new(f))?;
            if saved.0 == plan {
                eprintln!("resuming from {} ({} of {} N done)", ckpt.display(), saved.1.len(), n_grid.len());
                saved.1
            } else {
                Vec::new()
            }
        }
        Err(_) => Vec::new(),
    };
    for &n in &n_grid[rows.len()..] {
        let values = evaluate(&plan, n)?;
        let reference = plan.reference(n)?;
        rows.push(GridRow {
            n,
            expectation: expectation_from(&values, reference)?,
            variance: variance_from(&values, reference)?,
        });
        serde_json::to_writer(BufWriter::new(File::create(&ckpt)?), &(&plan, &rows))?;
    }
    let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.variance.var)).collect();
    let fit = decay_fit(&pairs).ok();
    match run.format {
        Format::Csv => modone::montecarlo::write_variance_csv(&rows, run.create(".csv")?)?,
        Format::Json => write_json(run.create(".json")?, &json!({ "rows": rows, "fit": fit }))?,
    }
    run.experiment = Some(ExperimentManifest {
        alphas: modone::montecarlo::alpha_draws(&plan),
        plan,
        rows,
        fit,
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    });
    std::fs::remove_file(&ckpt)?;
    Ok(())
}

fn report(run: &mut Run, manifests: &[PathBuf]) -> Result<(), Failure> {
    if manifests.is_empty() {
        return Err(usage("report needs at least one manifest"));
    }
    let mut loaded = Vec::new();
    for p in manifests {
        let f = File::open(p).map_err(|e| Failure {
            code: 5,
            message: format!("cannot read {}: {e}", p.display()),
        })?;
        let m: Value = serde_json::from_reader(BufReader::new(f))?;
        loaded.push((p.display().to_string(), m));
    }
    match run.format {
        Format::Json => {
            let v: Vec<Value> = loaded.iter().map(|(p, m)| json!({"manifest": p, "content": m})).collect();
            write_json(run.create(".json")?, &v)?;
        }
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(run.create(".csv")?);
            wtr.write_record(["manifest", "subcommand", "version", "artifacts", "parameters", "resolved"])
                .map_err(csv_failure)?;
            for (p, m) in &loaded {
                let s = |k: &str| m.get(k).map(|v| v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string()));
                wtr.write_record([
                    p.clone(),
                    s("subcommand").unwrap_or_default(),
                    s("version").unwrap_or_default(),
                    m.get("artifacts")
                        .and_then(|a| a.as_array())
                        .map(|a| a.iter().filter_map(|v| v.as_str()).collect::<Vec<_>>().join(";"))
                        .unwrap_or_default(),
                    s("parameters").unwrap_or_default(),
                    s("resolved").unwrap_or_default(),
                ])
                .map_err(csv_failure)?;
            }
            wtr.flush()?;
        }
    }
    Ok(())
}

fn write_json<W: Write, T: Serialize + ?Sized>(mut out: W, v: &T) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut out, v)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

fn execute(global: &Global, command: Command) -> Result<(), Failure> {
    if let Command::Rerun { manifest } = &command {
        let f = File::open(manifest).map_err(|e| Failure {
            code: 5,
            message: format!("cannot read {}: {e}", manifest.display()),
        })?;
        let m: RunManifest = serde_json::from_reader(BufReader::new(f))?;
        if matches!(m.command, Command::Rerun { .. }) {
            return Err(usage("a manifest cannot record a rerun"));
        }
        let g = Global {
            out: global.out.clone(),
            format: m.format,
            name: global.name.clone().or(Some(m.name)),
            threads: global.threads,
        };
        return execute(&g, m.command);
    }
    std::fs::create_dir_all(&global.out).map_err(|e| Failure {
        code: 5,
        message: format!("cannot create {}: {e}", global.out.display()),
    })?;
    let mut run = Run {
        out: global.out.clone(),
        name: global.name.clone().unwrap_or_else(|| command.label().to_string()),
        format: global.format,
        artifacts: Vec::new(),
        resolved: Map::new(),
        experiment: None,
    };
    match &command {
        Command::Gen { source, encoding } => gen(&mut run, source, *encoding)?,
        Command::Corr {
            source,
            k,
            window,
            algorithm,
            eps,
        } => corr(&mut run, source, *k, window, *algorithm, *eps)?,
        Command::Gaps {
            source,
            x,
            kind,
            sandwich,
        } => gaps(&mut run, source, x, *kind, sandwich)?,
        Command::Fourier {
            source,
            n_max,
            cross_validate,
            window,
            eps,
        } => fourier(&mut run, source, *n_max, *cross_validate, window, *eps)?,
        Command::Oscint {
            u,
            x,
            a,
            n,
            eps,
            grid,
            curve_samples,
        } => oscint(&mut run, u, x, *a, *n, *eps, *grid, *curve_samples)?,
        Command::Variance {
            a,
            k,
            n_grid,
            samples,
            seed,
            window,
            beta,
        } => variance(&mut run, *a, *k, n_grid, *samples, *seed, window, *beta)?,
        Command::Report { manifests } => report(&mut run, manifests)?,
        Command::Rerun { .. } => unreachable!(),
    }
    let manifest = RunManifest {
        tool: "modone".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command,
        format: run.format,
        name: run.name.clone(),
        artifacts: run.artifacts.clone(),
        resolved: run.resolved.clone(),
        experiment: run.experiment.take(),
    };
    write_json(run.create(".manifest.json")?, &manifest)?;
    for a in &run.artifacts {
        println!("{}", run.out.join(a).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot size the worker pool: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(&cli.global, cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
