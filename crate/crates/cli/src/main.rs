use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mupcov::enhance::{vc_instance, Graph, RulesDocument};
use mupcov::report::{MupInput, PlanReport, RunReport, TargetMode};
use mupcov::schema::CsvOptions;
use mupcov::testkit::{diagonal_rows, random_rows};
use mupcov::{
    discover, expand_to_level, greedy_enhance, ingest_path, read_headers, uncovered_with_value_count,
    write_rows, Algorithm, DiscoveryConfig, IndexedDataset, IngestConfig, Schema, TargetSet, Threshold,
    ValidationOracle,
};

const EXIT_USAGE: u8 = 1;
const EXIT_INCOMPLETE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

/// Coverage audits for categorical datasets.
#[derive(Parser)]
#[command(name = "mupcov", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find the maximal uncovered patterns of a dataset.
    Assess(AssessArgs),
    /// Plan which value combinations to collect.
    Enhance(EnhanceArgs),
    /// Write a synthetic CSV fixture with a sidecar config.
    Synth {
        #[command(subcommand)]
        kind: SynthKind,
    },
}

#[derive(Args)]
struct DataArgs {
    /// Input CSV with a header row.
    input: PathBuf,
    /// Ingestion config (TOML). Without it every column is used with
    /// inferred values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
#[group(multiple = false)]
struct ThresholdArgs {
    /// Absolute coverage threshold.
    #[arg(long)]
    threshold: Option<u64>,
    /// Threshold as a fraction of the row count, in (0, 1].
    #[arg(long)]
    threshold_rate: Option<f64>,
}

impl ThresholdArgs {
    fn get(&self) -> Option<Threshold> {
        self.threshold
            .map(Threshold::Count)
            .or(self.threshold_rate.map(Threshold::Rate))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct AssessArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    threshold: ThresholdArgs,
    #[arg(long, default_value = "deepdiver")]
    algorithm: Algorithm,
    /// Only report MUPs up to this level.
    #[arg(long)]
    max_level: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Wall-clock budget in seconds; an expired run exits with code 2.
    #[arg(long)]
    time_budget: Option<f64>,
    /// Evaluate sibling coverage queries in parallel (breaker).
    #[arg(long)]
    parallel: bool,
    /// Validation rules (JSON) used to tag MUPs as valid or invalid.
    #[arg(long)]
    rules: Option<PathBuf>,
    /// Leave invalid MUPs out of the report.
    #[arg(long, requires = "rules")]
    drop_invalid: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EnhanceArgs {
    #[command(flatten)]
    data: DataArgs,
    /// MUP report (JSON or text) or a review file listing the material MUPs.
    /// Without it MUPs are discovered on the fly.
    #[arg(long)]
    mups: Option<PathBuf>,
    /// Raise the maximum covered level to this value.
    #[arg(long, required_unless_present = "min_value_count", conflicts_with = "min_value_count")]
    lambda: Option<usize>,
    /// Cover every pattern with at least this many value combinations.
    #[arg(long)]
    min_value_count: Option<u64>,
    /// Overrides the threshold recorded in the MUP input.
    #[command(flatten)]
    threshold: ThresholdArgs,
    #[arg(long)]
    rules: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the plan as labelled CSV rows, repeated by multiplicity.
    #[arg(long)]
    emit_rows: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SynthKind {
    /// The n x n identity matrix; every level-n/2 zero pattern is a MUP at
    /// threshold n/2 + 1.
    Diagonal {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Independent attributes with geometric value weights.
    Random {
        #[arg(long)]
        seed: u64,
        /// Comma-separated cardinalities, e.g. 2,3,4.
        #[arg(long, value_delimiter = ',', required = true)]
        cards: Vec<u32>,
        #[arg(long)]
        rows: usize,
        /// 0 gives uniform values; closer to 1 makes high codes rarer.
        #[arg(long, default_value_t = 0.0)]
        skew: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Vertex cover reduction: one binary attribute per edge. Also writes
    /// the validation rules next to the CSV.
    Vc {
        #[arg(long)]
        vertices: usize,
        /// Comma-separated edges as u-v pairs, e.g. 0-1,1-2.
        #[arg(long, value_delimiter = ',', required = true)]
        edges: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Assess(a) => assess(a),
        Command::Enhance(a) => enhance(a),
        Command::Synth { kind } => synth(kind),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn load_data(args: &DataArgs) -> Result<IndexedDataset> {
    let config = match &args.config {
        Some(p) => IngestConfig::from_path(p).with_context(|| format!("reading config {}", p.display()))?,
        None => {
            let file = fs::File::open(&args.input).with_context(|| format!("opening {}", args.input.display()))?;
            IngestConfig::for_columns(&read_headers(file, &CsvOptions::default())?)
        }
    };
    ingest_path(&args.input, &config).with_context(|| format!("ingesting {}", args.input.display()))
}

fn load_rules(path: &Path, schema: &Schema) -> Result<ValidationOracle> {
    let text = fs::read_to_string(path).with_context(|| format!("reading rules {}", path.display()))?;
    let doc = RulesDocument::from_json(&text).with_context(|| format!("parsing rules {}", path.display()))?;
    Ok(ValidationOracle::from_document(&doc, schema)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn assess(args: AssessArgs) -> Result<ExitCode> {
    let ds = load_data(&args.data)?;
    let Some(threshold) = args.threshold.get() else {
        bail!("one of --threshold or --threshold-rate is required");
    };
    let mut cfg = DiscoveryConfig::new(args.algorithm, threshold);
    cfg.max_level = args.max_level;
    cfg.parallel = args.parallel;
    if let Some(secs) = args.time_budget {
        cfg.time_budget = Some(Duration::try_from_secs_f64(secs).context("--time-budget")?);
    }
    let oracle = args.rules.as_deref().map(|p| load_rules(p, ds.schema())).transpose()?;

    let started = Instant::now();
    let found = discover(&ds, &cfg)?;
    let report = RunReport::build(&ds, &found, started.elapsed(), oracle.as_ref(), args.drop_invalid)?;
    let text = match args.format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
    };
    emit(args.out.as_deref(), &text)?;
    if !found.complete {
        eprintln!("warning: time budget expired; the report lists only confirmed MUPs");
        return Ok(ExitCode::from(EXIT_INCOMPLETE));
    }
    Ok(ExitCode::SUCCESS)
}

fn enhance(args: EnhanceArgs) -> Result<ExitCode> {
    let ds = load_data(&args.data)?;
    let schema = ds.schema();
    let input = args
        .mups
        .as_deref()
        .map(|p| -> Result<MupInput> {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            MupInput::parse(&text, schema).with_context(|| format!("parsing {}", p.display()))
        })
        .transpose()?;
    let tau = match (args.threshold.get(), input.as_ref().and_then(|i| i.threshold)) {
        (Some(t), _) => t.resolve(ds.n())?,
        (None, Some(t)) => t,
        (None, None) => bail!("the MUP input records no threshold; pass --threshold or --threshold-rate"),
    };
    let oracle = match &args.rules {
        Some(p) => load_rules(p, schema)?,
        None => ValidationOracle::empty(),
    };

    let (targets, mode) = if let Some(lambda) = args.lambda {
        let patterns = match &input {
            Some(MupInput { threshold: Some(found), .. }) if tau > *found => {
                bail!("MUPs found at threshold {found} do not bound the patterns uncovered at {tau}")
            }
            Some(i) if !i.complete_to(lambda) => {
                return Err(mupcov::Error::IncompleteMups(lambda).into());
            }
            Some(i) => i.patterns.clone(),
            None => {
                let mut cfg = DiscoveryConfig::new(Algorithm::Deepdiver, Threshold::Count(tau));
                cfg.max_level = Some(lambda.clamp(1, ds.d()));
                discover(&ds, &cfg)?.mups.sorted()
            }
        };
        let expanded = expand_to_level(&patterns, schema, lambda)?;
        (
            TargetSet::from_dataset(&ds, tau, expanded)?,
            TargetMode { lambda: Some(lambda), min_value_count: None },
        )
    } else {
        let v = args.min_value_count.unwrap_or(1);
        let material = input.as_ref().map(|i| i.patterns.as_slice());
        (
            uncovered_with_value_count(&ds, tau, v, material)?,
            TargetMode { lambda: None, min_value_count: Some(v) },
        )
    };

    let plan = greedy_enhance(&targets, &oracle);
    let report = PlanReport::build(schema, &targets, &plan, mode);
    let text = match args.format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
    };
    emit(args.out.as_deref(), &text)?;
    if let Some(p) = &args.emit_rows {
        let file = fs::File::create(p).with_context(|| format!("writing {}", p.display()))?;
        write_rows(file, schema, &plan.rows())?;
    }
    if !plan.is_complete() {
        eprintln!("error: no valid value combination hits these patterns:");
        for r in &report.residual {
            eprintln!("  {r}");
        }
        return Ok(ExitCode::from(EXIT_INFEASIBLE));
    }
    Ok(ExitCode::SUCCESS)
}

fn sidecar(out: &Path, ext: &str) -> PathBuf {
    out.with_extension(ext)
}

fn write_fixture(out: &Path, schema: &Schema, rows: Vec<Vec<u32>>) -> Result<()> {
    let weighted: Vec<(Vec<u32>, u64)> = rows.into_iter().map(|r| (r, 1)).collect();
    let file = fs::File::create(out).with_context(|| format!("writing {}", out.display()))?;
    write_rows(file, schema, &weighted)?;
    let cfg_path = sidecar(out, "toml");
    fs::write(&cfg_path, IngestConfig::for_schema(schema).to_toml_string())
        .with_context(|| format!("writing {}", cfg_path.display()))?;
    Ok(())
}

fn parse_edge(s: &str) -> Result<(usize, usize)> {
    let (u, v) = s
        .split_once('-')
        .with_context(|| format!("edge `{s}` is not of the form u-v"))?;
    Ok((u.trim().parse()?, v.trim().parse()?))
}

fn synth(kind: SynthKind) -> Result<ExitCode> {
    match kind {
        SynthKind::Diagonal { n, out } => {
            if n == 0 || n % 2 == 1 {
                bail!("--n must be a positive even number");
            }
            write_fixture(&out, &Schema::binary(n), diagonal_rows(n))?;
            eprintln!("threshold: {}", n / 2 + 1);
        }
        SynthKind::Random { seed, cards, rows, skew, out } => {
            if !(0.0..1.0).contains(&skew) {
                bail!("--skew must be in [0, 1)");
            }
            if rows == 0 {
                bail!("--rows must be positive");
            }
            let schema = Schema::with_cardinalities(&cards)?;
            write_fixture(&out, &schema, random_rows(seed, &cards, rows, skew))?;
        }
        SynthKind::Vc { vertices, edges, out } => {
            let edges = edges.iter().map(|e| parse_edge(e)).collect::<Result<Vec<_>>>()?;
            let inst = vc_instance(&Graph::new(vertices, edges)?)?;
            let schema = inst.dataset.schema();
            write_fixture(&out, schema, inst.rows.clone())?;
            let rules_path = sidecar(&out, "rules.json");
            let doc = serde_json::to_string_pretty(&inst.oracle.to_document(schema))?;
            fs::write(&rules_path, doc).with_context(|| format!("writing {}", rules_path.display()))?;
            eprintln!("threshold: {}  lambda: {}", inst.threshold, inst.lambda);
        }
    }
    Ok(ExitCode::SUCCESS)
}
