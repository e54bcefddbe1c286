//! Command-line surface: build, score, neighbors, families, ablate, degrade.
//!
//! Every command writes line-delimited records (`--format tsv` or
//! `json-lines`) starting with a header record that echoes the effective
//! configuration, the seed, and the artifact fingerprint when one is loaded.
//! Exit status: 0 on success (empty results included), 1 for usage or
//! configuration problems, 2 for data problems; failures also emit a
//! machine-readable `error` record on stderr.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Parser, Subcommand};

use popgram::ablation::measure_step;
use popgram::config::parse_tau;
use popgram::{
    artifact, degradation_curve, render_decimal, render_score, similarity, AblationMode,
    AblationReport, DeletionPlan, Engine, Error, Judgment, OutputFormat, PatternId,
    PopulationStore, Record, RunConfig, Schedule, StepReport,
};

#[derive(Parser)]
#[command(
    name = "popgram",
    version,
    about = "Scores word sequences by analogy to a population of attested patterns"
)]
struct Cli {
    /// Output format: tsv or json-lines
    #[arg(long, global = true)]
    format: Option<String>,
    /// Flat key=value config file (window, ngram_min, ngram_max, schedule, tau, format, lowercase)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for randomized deletion plans
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ingest a corpus and write an index artifact
    Build {
        /// Corpus file: one pattern per line, '#' comments, blank lines skipped
        #[arg(long)]
        corpus: PathBuf,
        /// Output artifact path (written atomically)
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        ngram_min: Option<usize>,
        #[arg(long)]
        ngram_max: Option<usize>,
        /// Descending thresholds after the identity level, e.g. "3/4,1/2,1/4,0"
        #[arg(long)]
        schedule: Option<String>,
        /// Coverage requirement: all, most, or a fraction
        #[arg(long)]
        tau: Option<String>,
        /// Fold input to lowercase (true or false)
        #[arg(long)]
        lowercase: Option<bool>,
        /// Also store the pairwise similarity cache section
        #[arg(long, action = ArgAction::SetTrue)]
        sim_cache: bool,
    },
    /// Judge candidates against an index
    Score {
        #[arg(long)]
        index: PathBuf,
        /// File of candidates, one per line
        #[arg(long)]
        candidates: Option<PathBuf>,
        /// Override the index's coverage requirement
        #[arg(long)]
        tau: Option<String>,
        /// Emit the supporting patterns for each judgment
        #[arg(long, action = ArgAction::SetTrue)]
        explain: bool,
        /// Cap the support records per candidate
        #[arg(long)]
        top_k: Option<usize>,
        /// Candidates given directly (quote multi-word sequences)
        candidate: Vec<String>,
    },
    /// Tokens similar to a given token at a threshold
    Neighbors {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        token: String,
        /// Similarity threshold, e.g. "1/2" (0 lists the whole vocabulary)
        #[arg(long)]
        theta: String,
    },
    /// Print the family hierarchy
    Families {
        #[arg(long)]
        index: PathBuf,
        /// Only this level (default: every level)
        #[arg(long)]
        level: Option<usize>,
        /// Include single-member families
        #[arg(long, action = ArgAction::SetTrue)]
        singletons: bool,
    },
    /// Delete patterns once and judge candidates on the result
    Ablate {
        #[arg(long)]
        index: PathBuf,
        /// Pattern ids to delete, comma-separated
        #[arg(long)]
        delete: String,
        /// frozen (keep similarities) or recompute (rebuild from the rest)
        #[arg(long)]
        mode: String,
        #[arg(long)]
        candidates: Option<PathBuf>,
        #[arg(long)]
        tau: Option<String>,
        #[arg(long, action = ArgAction::SetTrue)]
        explain: bool,
        candidate: Vec<String>,
    },
    /// Delete patterns step by step and report the degradation curve
    Degrade {
        #[arg(long)]
        index: PathBuf,
        /// frozen or recompute
        #[arg(long)]
        mode: String,
        /// Explicit step: pattern ids to delete, comma-separated (repeatable)
        #[arg(long)]
        delete: Vec<String>,
        /// Random plan: fraction of surviving patterns to delete per step
        #[arg(long)]
        fraction: Option<String>,
        /// Random plan: number of steps
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        candidates: Option<PathBuf>,
        #[arg(long)]
        tau: Option<String>,
        candidate: Vec<String>,
    },
}

fn main() -> std::process::ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                print!("{err}");
                return std::process::ExitCode::SUCCESS;
            }
            eprint!("{err}");
            return std::process::ExitCode::from(1);
        }
    };

    // resolve the format first so failures still render machine-readably
    let format = resolve_format(&cli).unwrap_or_default();
    match run(&cli, format) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(err) => {
            let code = err.exit_code();
            let record = Record::new("error")
                .with("code", if code == 1 { "config" } else { "data" })
                .with("message", err.to_string());
            eprintln!("{}", record.render(format));
            std::process::ExitCode::from(code)
        }
    }
}

fn resolve_format(cli: &Cli) -> Result<OutputFormat, Error> {
    if let Some(text) = &cli.format {
        return OutputFormat::parse(text);
    }
    if let Some(path) = &cli.config {
        return Ok(RunConfig::load_file(path)?.format);
    }
    Ok(OutputFormat::default())
}

fn run(cli: &Cli, format: OutputFormat) -> Result<(), Error> {
    match &cli.command {
        Command::Build {
            corpus,
            out,
            window,
            ngram_min,
            ngram_max,
            schedule,
            tau,
            lowercase,
            sim_cache,
        } => {
            let mut rc = match &cli.config {
                Some(path) => RunConfig::load_file(path)?,
                None => RunConfig::default(),
            };
            rc.format = format;
            if let Some(w) = window {
                rc.window = *w;
            }
            if let Some(n) = ngram_min {
                rc.ngram_min = *n;
            }
            if let Some(n) = ngram_max {
                rc.ngram_max = *n;
            }
            if let Some(s) = schedule {
                rc.schedule = Schedule::parse(s)?;
            }
            if let Some(t) = tau {
                rc.tau = parse_tau(t)?;
            }
            if let Some(l) = lowercase {
                rc.lowercase = *l;
            }
            rc.validate()?;
            cmd_build(corpus, out, &rc, *sim_cache, cli.seed)
        }
        Command::Score {
            index,
            candidates,
            tau,
            explain,
            top_k,
            candidate,
        } => {
            let (engine, rc) = load_engine(index, format, tau.as_deref())?;
            let lines = gather_candidates(candidate, candidates.as_deref())?;
            cmd_score(&engine, &rc, cli.seed, &lines, *explain, *top_k)
        }
        Command::Neighbors {
            index,
            token,
            theta,
        } => {
            let (engine, rc) = load_engine(index, format, None)?;
            cmd_neighbors(&engine, &rc, cli.seed, token, theta)
        }
        Command::Families {
            index,
            level,
            singletons,
        } => {
            let (engine, rc) = load_engine(index, format, None)?;
            cmd_families(&engine, &rc, cli.seed, *level, *singletons)
        }
        Command::Ablate {
            index,
            delete,
            mode,
            candidates,
            tau,
            explain,
            candidate,
        } => {
            let (engine, rc) = load_engine(index, format, tau.as_deref())?;
            let lines = gather_candidates(candidate, candidates.as_deref())?;
            let ids = parse_pattern_ids(delete)?;
            let mode = AblationMode::parse(mode)?;
            cmd_ablate(&engine, &rc, cli.seed, &ids, mode, &lines, *explain)
        }
        Command::Degrade {
            index,
            mode,
            delete,
            fraction,
            steps,
            candidates,
            tau,
            candidate,
        } => {
            let (engine, rc) = load_engine(index, format, tau.as_deref())?;
            let lines = gather_candidates(candidate, candidates.as_deref())?;
            let mode = AblationMode::parse(mode)?;
            let plan = match (delete.is_empty(), fraction) {
                (false, None) => {
                    let steps = delete
                        .iter()
                        .map(|s| parse_pattern_ids(s))
                        .collect::<Result<Vec<_>, _>>()?;
                    DeletionPlan::Explicit(steps)
                }
                (true, Some(fraction)) => DeletionPlan::Random {
                    fraction: similarity::parse_score(fraction)?,
                    steps: steps
                        .ok_or_else(|| Error::Config("--fraction requires --steps".into()))?,
                    seed: cli.seed,
                },
                (false, Some(_)) => {
                    return Err(Error::Config(
                        "--delete and --fraction are mutually exclusive".into(),
                    ))
                }
                (true, None) => {
                    return Err(Error::Config(
                        "degrade needs either --delete steps or --fraction with --steps".into(),
                    ))
                }
            };
            cmd_degrade(&engine, &rc, cli.seed, &plan, mode, &lines)
        }
    }
}

/// Load an artifact and echo its stored configuration; the output format and
/// an optional tau override come from the command line.
fn load_engine(
    index: &Path,
    format: OutputFormat,
    tau: Option<&str>,
) -> Result<(Engine, RunConfig), Error> {
    let (mut engine, _) = artifact::load(index)?;
    if let Some(tau) = tau {
        engine = engine.with_tau(parse_tau(tau)?)?;
    }
    let store_config = engine.store().config().clone();
    let rc = RunConfig {
        window: engine.options().window,
        ngram_min: store_config.ngram_min,
        ngram_max: store_config.ngram_max,
        schedule: engine.options().schedule.clone(),
        tau: engine.options().tau,
        format,
        lowercase: store_config.lowercase,
    };
    Ok((engine, rc))
}

fn gather_candidates(args: &[String], file: Option<&Path>) -> Result<Vec<String>, Error> {
    let mut lines: Vec<String> = args.to_vec();
    if let Some(path) = file {
        for raw in std::fs::read_to_string(path)?.lines() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            lines.push(line.to_string());
        }
    }
    if lines.is_empty() {
        return Err(Error::Config(
            "no candidates given (use positional arguments or --candidates FILE)".into(),
        ));
    }
    Ok(lines)
}

fn parse_pattern_ids(text: &str) -> Result<Vec<PatternId>, Error> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<u32>()
                .map(PatternId)
                .map_err(|_| Error::Config(format!("bad pattern id {part:?}")))
        })
        .collect()
}

fn header(command: &str, rc: &RunConfig, seed: u64, fingerprint: Option<&str>) -> Record {
    let mut record = Record::new("header")
        .with("command", command)
        .with("seed", seed);
    rc.echo_into(&mut record);
    if let Some(fp) = fingerprint {
        record.set("fingerprint", fp);
    }
    record
}

struct Out {
    format: OutputFormat,
    sink: std::io::Stdout,
}

impl Out {
    fn new(format: OutputFormat) -> Self {
        Out {
            format,
            sink: std::io::stdout(),
        }
    }

    fn emit(&mut self, record: &Record) -> Result<(), Error> {
        writeln!(self.sink, "{}", record.render(self.format))?;
        Ok(())
    }
}

fn cmd_build(
    corpus: &Path,
    out_path: &Path,
    rc: &RunConfig,
    sim_cache: bool,
    seed: u64,
) -> Result<(), Error> {
    let file = std::fs::File::open(corpus)?;
    let reader = std::io::BufReader::new(file);
    let store = PopulationStore::ingest(reader, rc.ingest_config())?;
    let engine = Engine::build(store, rc.engine_options())?;
    artifact::save(&engine, sim_cache, out_path)?;

    let mut out = Out::new(rc.format);
    out.emit(&header(
        "build",
        rc,
        seed,
        Some(engine.store().fingerprint()),
    ))?;
    out.emit(
        &Record::new("built")
            .with("out", out_path.display().to_string())
            .with("patterns", engine.store().patterns().len() as u64)
            .with("sim_cache", sim_cache)
            .with("tokens", engine.store().vocabulary().len() as u64)
            .with("total_tokens", engine.store().total_tokens()),
    )?;
    Ok(())
}

fn judgment_record(judgment: &Judgment) -> Record {
    Record::new("judgment")
        .with("candidate", judgment.text())
        .with("coverage", render_score(&judgment.coverage))
        .with("coverage_decimal", render_decimal(&judgment.coverage))
        .with("level", judgment.level.render())
        .with("nn", render_score(&judgment.nn_score))
        .with("nn_decimal", render_decimal(&judgment.nn_score))
        .with("oov", judgment.oov)
        .with("population", judgment.population)
        .with("supports", judgment.supports.len() as u64)
        .with("tie", judgment.tied_support)
}

fn support_records(judgment: &Judgment, top_k: Option<usize>) -> Vec<Record> {
    let cap = top_k.unwrap_or(judgment.supports.len());
    judgment
        .supports
        .iter()
        .take(cap)
        .map(|support| {
            let slots = support
                .slot_sims
                .iter()
                .map(render_score)
                .collect::<Vec<_>>()
                .join(",");
            Record::new("support")
                .with("candidate", judgment.text())
                .with("min", render_score(&support.min))
                .with("offset", support.offset as u64)
                .with("pattern", support.pattern.0 as u64)
                .with("slots", slots)
        })
        .collect()
}

fn cmd_score(
    engine: &Engine,
    rc: &RunConfig,
    seed: u64,
    lines: &[String],
    explain: bool,
    top_k: Option<usize>,
) -> Result<(), Error> {
    let mut out = Out::new(rc.format);
    out.emit(&header(
        "score",
        rc,
        seed,
        Some(engine.store().fingerprint()),
    ))?;
    for line in lines {
        let judgment = engine.judge_line(line)?;
        out.emit(&judgment_record(&judgment))?;
        if explain {
            for record in support_records(&judgment, top_k) {
                out.emit(&record)?;
            }
        }
    }
    Ok(())
}

fn cmd_neighbors(
    engine: &Engine,
    rc: &RunConfig,
    seed: u64,
    token: &str,
    theta: &str,
) -> Result<(), Error> {
    let theta = similarity::parse_score(theta)?;
    let mut out = Out::new(rc.format);
    out.emit(&header(
        "neighbors",
        rc,
        seed,
        Some(engine.store().fingerprint()),
    ))?;
    for (id, sim) in engine.neighbors(token, theta)? {
        out.emit(
            &Record::new("neighbor")
                .with("id", id.0 as u64)
                .with("neighbor", engine.store().surface(id))
                .with("sim", render_score(&sim))
                .with("sim_decimal", render_decimal(&sim))
                .with("theta", render_score(&theta))
                .with("token", token),
        )?;
    }
    Ok(())
}

fn cmd_families(
    engine: &Engine,
    rc: &RunConfig,
    seed: u64,
    level: Option<usize>,
    singletons: bool,
) -> Result<(), Error> {
    let hierarchy = &engine.knowledge().hierarchy;
    if let Some(level) = level {
        if level >= hierarchy.level_count() {
            return Err(Error::Config(format!(
                "level {level} out of range (hierarchy has {} levels)",
                hierarchy.level_count()
            )));
        }
    }
    let mut out = Out::new(rc.format);
    out.emit(&header(
        "families",
        rc,
        seed,
        Some(engine.store().fingerprint()),
    ))?;
    for (idx, partition) in hierarchy.levels.iter().enumerate() {
        if level.is_some_and(|l| l != idx) {
            continue;
        }
        let threshold = hierarchy
            .schedule
            .threshold(idx)
            .map_or("identity".to_string(), render_score);
        for family in &partition.families {
            if family.len() < 2 && !singletons {
                continue;
            }
            let ids = family
                .iter()
                .map(|t| t.0.to_string())
                .collect::<Vec<_>>()
                .join(",");
            let members = family
                .iter()
                .map(|&t| engine.store().surface(t))
                .collect::<Vec<_>>()
                .join(" ");
            out.emit(
                &Record::new("family")
                    .with("ids", ids)
                    .with("level", idx as u64)
                    .with("members", members)
                    .with("size", family.len() as u64)
                    .with("threshold", threshold.as_str()),
            )?;
        }
    }
    Ok(())
}

fn render_big(value: &num_rational::BigRational) -> String {
    if value.denom() == &num_bigint::BigInt::from(1) {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

fn step_records(step: &StepReport, explain: bool) -> Vec<Record> {
    let mut records = Vec::new();
    let deleted = step
        .deleted
        .iter()
        .map(|p| p.0.to_string())
        .collect::<Vec<_>>()
        .join(",");
    records.push(
        Record::new("step")
            .with("deleted", deleted)
            .with("equal_pairs", step.equal_pairs.len() as u64)
            .with("mean_nn", render_big(&step.mean_nn))
            .with("remaining", step.remaining_patterns)
            .with("step", step.step as u64)
            .with("tied_supports", step.tied_supports),
    );
    for judgment in &step.judgments {
        let mut record = judgment_record(judgment);
        record.set("step", step.step as u64);
        records.push(record);
        if explain {
            for mut support in support_records(judgment, None) {
                support.set("step", step.step as u64);
                records.push(support);
            }
        }
    }
    for &(a, b) in &step.equal_pairs {
        records.push(
            Record::new("tie")
                .with("a", step.judgments[a].text())
                .with("b", step.judgments[b].text())
                .with("step", step.step as u64),
        );
    }
    records
}

fn cmd_ablate(
    engine: &Engine,
    rc: &RunConfig,
    seed: u64,
    ids: &[PatternId],
    mode: AblationMode,
    lines: &[String],
    explain: bool,
) -> Result<(), Error> {
    let reduced = engine.delete_patterns(ids, mode)?;
    let step = measure_step(&reduced, 1, ids.to_vec(), lines)?;
    let mut out = Out::new(rc.format);
    let mut head = header("ablate", rc, seed, Some(engine.store().fingerprint()));
    head.set("mode", mode.render());
    out.emit(&head)?;
    for record in step_records(&step, explain) {
        out.emit(&record)?;
    }
    Ok(())
}

fn cmd_degrade(
    engine: &Engine,
    rc: &RunConfig,
    seed: u64,
    plan: &DeletionPlan,
    mode: AblationMode,
    lines: &[String],
) -> Result<(), Error> {
    let report = degradation_curve(engine, lines, plan, mode)?;
    let mut out = Out::new(rc.format);
    let mut head = header("degrade", rc, seed, Some(engine.store().fingerprint()));
    head.set("mode", mode.render());
    head.set("steps", (report.steps.len() - 1) as u64);
    out.emit(&head)?;
    for step in &report.steps {
        for record in step_records(step, false) {
            out.emit(&record)?;
        }
    }
    print_summary_table(&report);
    Ok(())
}

/// Human-readable summary on stderr; stdout stays machine-parseable.
fn print_summary_table(report: &AblationReport) {
    let mut rows = vec![[
        "step".to_string(),
        "deleted".to_string(),
        "remaining".to_string(),
        "mean_nn".to_string(),
        "ties".to_string(),
    ]];
    for step in &report.steps {
        let deleted = if step.deleted.is_empty() {
            "-".to_string()
        } else {
            step.deleted
                .iter()
                .map(|p| p.0.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        rows.push([
            step.step.to_string(),
            deleted,
            step.remaining_patterns.to_string(),
            render_big(&step.mean_nn),
            step.equal_pairs.len().to_string(),
        ]);
    }
    let widths: Vec<usize> = (0..5)
        .map(|col| rows.iter().map(|r| r[col].len()).max().unwrap_or(0))
        .collect();
    for row in rows {
        let line = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:>w$}"))
            .collect::<Vec<_>>()
            .join("  ");
        eprintln!("{line}");
    }
}
