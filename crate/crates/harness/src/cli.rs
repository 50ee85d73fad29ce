//! `mcqa` command line: validate, run, eval, expand, report.
//!
//! Exit codes: 0 success, 1 domain failure (bad data, bad config, failed
//! criteria), 2 environment or IO failure.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand, ValueEnum};
use mcqa_core::eval::{
    ablation_table, leaderboard, AblationLayout, AblationRow, Baselines, EvalReport, ReportRow,
    MULTILINGUAL,
};
use mcqa_core::item::compute_stats;
use mcqa_core::{Language, Percent, Split, Table};

use crate::augment::{expand_dataset, ExpandOptions, SOURCE_LANGUAGE, TRANSLATOR_ID};
use crate::client::BackendFailure;
use crate::config::{BackendKind, RunConfig, MOCK_BACKEND};
use crate::dataset::{
    load_dataset, validate_dataset, write_issues_jsonl, write_manifest, LoadMode,
};
use crate::mock::{Misbehavior, MockBackend};
use crate::output::{
    captions_from_audit, read_audit, read_submission, write_audit, write_submission,
};
use crate::pipeline::Pipeline;

#[derive(Debug)]
pub enum Failure {
    /// Bad inputs, bad configuration, unmet checks.
    Domain(anyhow::Error),
    /// Unreadable or unwritable files.
    Io(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Io(_) => 2,
        }
    }
}

type CmdResult = Result<(), Failure>;

fn domain(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Domain(e.into())
}

fn io_fail(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Io(e.into())
}

#[derive(Parser, Debug)]
#[command(
    name = "mcqa",
    version,
    about = "Multilingual multiple-choice exam QA harness"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a manifest and its image references.
    Validate(ValidateArgs),
    /// Run the describe → aggregate → reason pipeline over a manifest.
    Run(RunArgs),
    /// Score a submission against gold keys and baselines.
    Eval(EvalArgs),
    /// Translate foreign-language manifests and append them to a base set.
    Expand(ExpandArgs),
    /// Render tables from recorded data.
    #[command(subcommand)]
    Report(ReportCommand),
}

#[derive(Args, Debug, Clone)]
pub struct ManifestArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Directory image references resolve against (defaults to the
    /// manifest's directory).
    #[arg(long)]
    pub image_root: Option<PathBuf>,
    #[arg(long, default_value = "test", value_parser = parse_split)]
    pub split: Split,
    /// Abort on the first bad row (default for train/validation).
    #[arg(long, conflicts_with = "lenient")]
    pub strict: bool,
    /// Skip bad rows (default for test).
    #[arg(long)]
    pub lenient: bool,
}

fn parse_split(s: &str) -> Result<Split, String> {
    s.parse().map_err(|_| format!("unknown split {s:?}"))
}

fn parse_language(s: &str) -> Result<Language, String> {
    Language::lookup(s).ok_or_else(|| format!("unknown language {s:?}"))
}

impl ManifestArgs {
    fn mode(&self) -> LoadMode {
        if self.strict {
            LoadMode::Strict
        } else if self.lenient {
            LoadMode::Lenient
        } else {
            LoadMode::default_for(self.split)
        }
    }

    fn image_root(&self) -> PathBuf {
        self.image_root
            .clone()
            .unwrap_or_else(|| parent_dir(&self.manifest))
    }
}

fn parent_dir(p: &Path) -> PathBuf {
    match p.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub manifest: ManifestArgs,
    /// Print issues as JSON lines.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub image_root: Option<PathBuf>,
    #[arg(long, value_parser = parse_split)]
    pub split: Option<Split>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub parallelism: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub backend: Option<BackendKind>,
    /// Mock reasoner misbehavior: none, overflow, cyrillic, empty, markdown, mixed.
    #[arg(long)]
    pub misbehavior: Option<Misbehavior>,
    #[arg(long)]
    pub cache: Option<PathBuf>,
    #[arg(long, conflicts_with = "resume")]
    pub no_cache: bool,
    /// Continue an interrupted run from its cache.
    #[arg(long)]
    pub resume: bool,
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub skip_stage1_for_text: bool,
    #[arg(long)]
    pub resample_once: bool,
    /// Reasoner template version.
    #[arg(long)]
    pub reasoner_template: Option<String>,
    /// Exit abruptly after this many items complete (for interruption tests).
    #[arg(long, hide = true)]
    pub halt_after: Option<usize>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Submission CSV (`sample_id,answer`).
    #[arg(long)]
    pub predictions: PathBuf,
    /// Manifest carrying the gold keys.
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long, default_value = "validation", value_parser = parse_split)]
    pub split: Split,
    /// CSV with columns `language,baseline[,rank]`; a `Multilingual` row
    /// sets the pooled baseline.
    #[arg(long)]
    pub baselines: Option<PathBuf>,
    /// Directory for report.txt/.csv/.md.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "System")]
    pub system_name: String,
    /// Add the format-compliance report (needs --audit).
    #[arg(long, requires = "audit")]
    pub compliance: bool,
    /// Audit log written by `run`.
    #[arg(long)]
    pub audit: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExpandArgs {
    #[arg(long)]
    pub base: PathBuf,
    #[arg(long = "foreign", required = true)]
    pub foreign: Vec<PathBuf>,
    /// Output manifest (.csv or .jsonl).
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "train", value_parser = parse_split)]
    pub split: Split,
    #[arg(long, default_value = "en", value_parser = parse_language)]
    pub target: Language,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub backend: Option<BackendKind>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub parallelism: Option<usize>,
    #[arg(long)]
    pub cache: Option<PathBuf>,
    #[arg(long)]
    pub no_cache: bool,
    /// Audit log whose captions supply text for image items.
    #[arg(long)]
    pub captions: Option<PathBuf>,
    /// Mock translator fails on prompts containing this text.
    #[arg(long)]
    pub fail_on: Vec<String>,
}

#[derive(Subcommand, Debug)]
pub enum ReportCommand {
    /// Per-language dataset statistics.
    Stats {
        #[command(flatten)]
        manifest: ManifestArgs,
        #[arg(long, value_enum, default_value = "txt")]
        format: Format,
    },
    /// Leaderboard table from recorded accuracies
    /// (`language,baseline,system[,rank]`).
    Leaderboard {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value = "System")]
        system_name: String,
        #[arg(long, value_enum, default_value = "txt")]
        format: Format,
    },
    /// Ablation table from rows (`label,condition,accuracy[,attr...]`).
    Ablation {
        #[arg(long)]
        rows: PathBuf,
        #[arg(long, value_enum, default_value = "grid")]
        layout: LayoutArg,
        #[arg(long, default_value = "Model")]
        label_header: String,
        #[arg(long, value_enum, default_value = "txt")]
        format: Format,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Txt,
    Md,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LayoutArg {
    Grid,
    List,
}

fn render(t: &Table, f: Format) -> String {
    match f {
        Format::Txt => t.to_text(),
        Format::Md => t.to_markdown(),
        Format::Csv => t.to_csv(),
    }
}

fn load(args: &ManifestArgs) -> Result<crate::dataset::Loaded, Failure> {
    load_dataset(&args.manifest, &args.image_root(), args.split, args.mode()).map_err(|e| {
        if e.is_io() {
            io_fail(e)
        } else {
            domain(e)
        }
    })
}

fn cmd_validate(a: &ValidateArgs) -> CmdResult {
    let loaded = load(&a.manifest)?;
    let issues = validate_dataset(&loaded.dataset);
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for s in &loaded.skipped {
        eprintln!("skipped: {s}");
    }
    if a.json {
        write_issues_jsonl(&mut out, &issues).map_err(io_fail)?;
    } else {
        for i in &issues {
            writeln!(out, "{} (rows {:?}): {}", i.sample_id, i.rows, i.reason).map_err(io_fail)?;
        }
    }
    eprintln!(
        "{} items, {} issue(s), {} skipped row(s)",
        loaded.dataset.len(),
        issues.len(),
        loaded.skipped.len()
    );
    if issues.is_empty() && loaded.skipped.is_empty() {
        Ok(())
    } else {
        Err(domain(anyhow!(
            "validation found {} issue(s)",
            issues.len() + loaded.skipped.len()
        )))
    }
}

fn run_config(a: &RunArgs) -> Result<RunConfig, Failure> {
    let mut cfg = match &a.config {
        Some(p) if !p.exists() => return Err(io_fail(anyhow!("config {} not found", p.display()))),
        Some(p) => RunConfig::from_toml_file(p).map_err(domain)?,
        None => RunConfig::default(),
    };
    if let Some(m) = &a.manifest {
        cfg.manifest = Some(m.clone());
    }
    if let Some(r) = &a.image_root {
        cfg.image_root = Some(r.clone());
    }
    if let Some(s) = a.split {
        cfg.split = s;
    }
    if let Some(o) = &a.out {
        cfg.output_dir = o.clone();
    }
    if let Some(p) = a.parallelism {
        cfg.parallelism = p;
    }
    if a.seed.is_some() {
        cfg.seed = a.seed;
    }
    if let Some(b) = a.backend {
        cfg.backend = b;
    }
    if let Some(m) = a.misbehavior {
        cfg.misbehavior = m;
    }
    if let Some(c) = &a.cache {
        cfg.cache_path = Some(c.clone());
    }
    if a.no_cache {
        cfg.use_cache = false;
    }
    if a.strict {
        cfg.strict = Some(true);
    }
    if a.skip_stage1_for_text {
        cfg.pipeline.skip_stage1_for_text = true;
    }
    if a.resample_once {
        cfg.pipeline.resample_once = true;
    }
    if let Some(v) = &a.reasoner_template {
        cfg.templates.reasoner = v.clone();
    }
    Ok(cfg)
}

fn cmd_run(a: &RunArgs) -> CmdResult {
    let mut cfg = run_config(a)?;
    if cfg.backend == BackendKind::Mock {
        cfg.routing.set_backend_all(MOCK_BACKEND);
    }
    let manifest = cfg.manifest.clone().ok_or_else(|| {
        domain(anyhow!(
            "no manifest given (--manifest or `manifest` in the config)"
        ))
    })?;
    let image_root = cfg
        .image_root
        .clone()
        .unwrap_or_else(|| parent_dir(&manifest));
    let mode = match cfg.strict {
        Some(true) => LoadMode::Strict,
        Some(false) => LoadMode::Lenient,
        None => LoadMode::default_for(cfg.split),
    };
    let pipeline_cfg = cfg.pipeline_config().map_err(domain)?;
    if a.resume && cfg.effective_cache_path().is_none() {
        return Err(domain(anyhow!("--resume needs the response cache")));
    }
    fs::create_dir_all(&cfg.output_dir).map_err(io_fail)?;
    let client = cfg.build_client(None).map_err(domain)?;

    let loaded = load_dataset(&manifest, &image_root, cfg.split, mode).map_err(|e| {
        if e.is_io() {
            io_fail(e)
        } else {
            domain(e)
        }
    })?;
    let ds = loaded.dataset;
    let pipeline = Pipeline::new(&client, &pipeline_cfg);
    let halt = a.halt_after;
    let set = pipeline
        .run_dataset(&ds, |done| {
            if halt.is_some_and(|n| done >= n) {
                eprintln!("halting after {done} items");
                std::process::exit(130);
            }
        })
        .map_err(|f| domain(anyhow!("{}: {}", f.sample_id, f.error)))?;

    let submission = cfg.output_dir.join("predictions.csv");
    let audit = cfg.output_dir.join("audit.jsonl");
    write_submission(&submission, &ds, &set).map_err(io_fail)?;
    write_audit(&audit, &cfg, &set).map_err(io_fail)?;

    let compliance = set.compliance();
    let no_answer = set
        .predictions
        .iter()
        .filter(|p| p.answer.is_none())
        .count();
    let from_cache = set
        .predictions
        .iter()
        .flat_map(|p| &p.trace_refs)
        .filter(|t| t.from_cache)
        .count();
    println!(
        "items {}  predictions {}  no answer {}  failures {}  strict rate {}  cached calls {}",
        ds.len(),
        set.predictions.len(),
        no_answer,
        set.failures.len(),
        compliance
            .strict_rate
            .map_or("n/a".to_string(), |r| format!("{:.4}", r)),
        from_cache
    );
    for f in &set.failures {
        eprintln!("failed {} at {}: {}", f.sample_id, f.stage, f.error);
    }
    if ds.items.iter().all(|i| i.answer_key.is_some()) && !ds.is_empty() {
        if let Ok(acc) = mcqa_core::eval::score(&set.answers(), &ds.items) {
            println!(
                "accuracy {}% ({}/{})",
                acc.percent().unwrap_or(Percent::ZERO),
                acc.correct,
                acc.total
            );
        }
    }
    println!("wrote {} and {}", submission.display(), audit.display());
    Ok(())
}

fn read_csv_rows(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), Failure> {
    let file = fs::File::open(path).map_err(|e| io_fail(anyhow!("{}: {e}", path.display())))?;
    let mut rdr = csv::Reader::from_reader(file);
    let headers = rdr
        .headers()
        .map_err(domain)?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(domain)?;
        rows.push(rec.iter().map(|c| c.trim().to_string()).collect());
    }
    Ok((headers, rows))
}

fn column(headers: &[String], name: &str, path: &Path) -> Result<usize, Failure> {
    headers
        .iter()
        .position(|h| h.eq_ignore_ascii_case(name))
        .ok_or_else(|| domain(anyhow!("{}: missing column {name:?}", path.display())))
}

fn parse_percent(s: &str, path: &Path) -> Result<Percent, Failure> {
    s.parse()
        .map_err(|e| domain(anyhow!("{}: {e}", path.display())))
}

pub fn read_baselines(path: &Path) -> Result<Baselines, Failure> {
    let (headers, rows) = read_csv_rows(path)?;
    let lang = column(&headers, "language", path)?;
    let base = column(&headers, "baseline", path)?;
    let rank = headers.iter().position(|h| h.eq_ignore_ascii_case("rank"));
    let mut b = Baselines::default();
    for row in rows {
        let label = &row[lang];
        let value = parse_percent(&row[base], path)?;
        if let Some(r) = rank.and_then(|i| row.get(i)).filter(|r| !r.is_empty()) {
            b.ranks.insert(label.clone(), r.clone());
        }
        if label.eq_ignore_ascii_case(MULTILINGUAL) {
            b.multilingual = Some(value);
        } else {
            let l = Language::lookup(label)
                .ok_or_else(|| domain(anyhow!("{}: unknown language {label:?}", path.display())))?;
            b.per_language.push((l, value));
        }
    }
    Ok(b)
}

/// Leaderboard rows from recorded columns, in file order.
pub fn read_leaderboard_table(path: &Path) -> Result<EvalReport, Failure> {
    let (headers, rows) = read_csv_rows(path)?;
    let lang = column(&headers, "language", path)?;
    let base = column(&headers, "baseline", path)?;
    let sys = column(&headers, "system", path)?;
    let rank = headers.iter().position(|h| h.eq_ignore_ascii_case("rank"));
    let mut out = Vec::new();
    for row in rows {
        let b = parse_percent(&row[base], path)?;
        let s = parse_percent(&row[sys], path)?;
        let r = rank
            .and_then(|i| row.get(i))
            .filter(|r| !r.is_empty())
            .cloned();
        out.push(ReportRow::new(row[lang].clone(), Some(b), s, r));
    }
    Ok(EvalReport::from_rows(out))
}

pub fn read_ablation_rows(path: &Path) -> Result<Vec<AblationRow>, Failure> {
    let (headers, rows) = read_csv_rows(path)?;
    let label = column(&headers, "label", path)?;
    let cond = headers
        .iter()
        .position(|h| h.eq_ignore_ascii_case("condition"));
    let acc = column(&headers, "accuracy", path)?;
    let mut out = Vec::new();
    for row in rows {
        let mut r = AblationRow::new(
            row[label].clone(),
            cond.map(|i| row[i].clone()).unwrap_or_default(),
            parse_percent(&row[acc], path)?,
        );
        for (i, h) in headers.iter().enumerate() {
            if i != label && Some(i) != cond && i != acc {
                r = r.attr(h.clone(), row.get(i).cloned().unwrap_or_default());
            }
        }
        out.push(r);
    }
    Ok(out)
}

fn cmd_eval(a: &EvalArgs) -> CmdResult {
    let preds =
        read_submission(&a.predictions)
            .map_err(|e| if e.is_io() { io_fail(e) } else { domain(e) })?;
    let gold_args = ManifestArgs {
        manifest: a.gold.clone(),
        image_root: None,
        split: a.split,
        strict: true,
        lenient: false,
    };
    let gold = load(&gold_args)?.dataset;
    let acc = mcqa_core::eval::score(&preds, &gold.items).map_err(domain)?;
    let mut text = format!(
        "accuracy {}% ({}/{})\n",
        acc.percent().unwrap_or(Percent::ZERO),
        acc.correct,
        acc.total
    );
    let mut files: Vec<(&str, String)> = Vec::new();
    if let Some(bpath) = &a.baselines {
        let baselines = read_baselines(bpath)?;
        let report = leaderboard(&preds, &gold.items, &baselines).map_err(domain)?;
        for w in &report.warnings {
            eprintln!("warning: {w}");
        }
        let table = report.table(&a.system_name);
        text.push_str(&table.to_text());
        if let Some(m) = report.macro_average {
            text.push_str(&format!("macro-average {m}%\n"));
        }
        text.push_str(&format!(
            "scored {}  no answer {}\n",
            report.n_scored, report.n_no_answer
        ));
        files.push(("report.csv", table.to_csv()));
        files.push(("report.md", table.to_markdown()));
    }
    if a.compliance {
        let audit = a.audit.as_ref().expect("clap enforces --audit");
        let records =
            read_audit(audit).map_err(|e| if e.is_io() { io_fail(e) } else { domain(e) })?;
        let c = mcqa_core::eval::compliance_report(
            records.iter().map(|r| (r.method(), r.strict_compliant)),
        );
        for w in &c.warnings {
            eprintln!("warning: {w}");
        }
        text.push_str(&format!(
            "strict rate {}\n",
            c.strict_rate
                .map_or("null".to_string(), |r| format!("{r:.4}"))
        ));
        let mut t = Table::new(["Method", "Count"]);
        for (k, v) in &c.method_histogram {
            t.push([k.clone(), v.to_string()]);
        }
        text.push_str(&t.to_text());
        files.push((
            "compliance.json",
            serde_json::to_string_pretty(&c).map_err(domain)? + "\n",
        ));
    }
    print!("{text}");
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir).map_err(io_fail)?;
        fs::write(dir.join("report.txt"), &text).map_err(io_fail)?;
        for (name, body) in files {
            fs::write(dir.join(name), body).map_err(io_fail)?;
        }
    }
    Ok(())
}

fn cmd_expand(a: &ExpandArgs) -> CmdResult {
    let mut cfg = match &a.config {
        Some(p) => RunConfig::from_toml_file(p).map_err(domain)?,
        None => RunConfig::default(),
    };
    if let Some(b) = a.backend {
        cfg.backend = b;
    }
    if a.seed.is_some() {
        cfg.seed = a.seed;
    }
    if let Some(p) = a.parallelism {
        cfg.parallelism = p;
    }
    cfg.output_dir = parent_dir(&a.out);
    if let Some(c) = &a.cache {
        cfg.cache_path = Some(c.clone());
    }
    if a.no_cache {
        cfg.use_cache = false;
    }
    let mock = match (cfg.backend, cfg.seed) {
        (BackendKind::Mock, Some(seed)) => {
            let mut m = MockBackend::new(seed);
            for needle in &a.fail_on {
                m = m.fail_on(
                    needle.clone(),
                    BackendFailure::Fatal(format!("injected failure on {needle:?}")),
                );
            }
            Some(m)
        }
        _ => None,
    };
    let client = cfg.build_client(mock).map_err(domain)?;
    let templates = cfg.templates.load().map_err(domain)?;

    let manifest_args = |p: &PathBuf| ManifestArgs {
        manifest: p.clone(),
        image_root: None,
        split: a.split,
        strict: false,
        lenient: false,
    };
    let base = load(&manifest_args(&a.base))?.dataset;
    let mut foreign = Vec::new();
    for f in &a.foreign {
        foreign.push(load(&manifest_args(f))?.dataset);
    }
    let captions = match &a.captions {
        Some(p) => {
            captions_from_audit(p).map_err(|e| if e.is_io() { io_fail(e) } else { domain(e) })?
        }
        None => Default::default(),
    };
    let opts = ExpandOptions {
        target: a.target,
        template: &templates.translator,
        markers: cfg.marker_options(),
        parallelism: cfg.parallelism.max(1),
        captions: &captions,
    };
    let expansion = expand_dataset(&base, &foreign, &client, &opts);
    write_manifest(
        &a.out,
        &expansion.dataset.items,
        &[SOURCE_LANGUAGE, TRANSLATOR_ID],
    )
    .map_err(|e| if e.is_io() { io_fail(e) } else { domain(e) })?;
    let mut failures_path = a.out.clone().into_os_string();
    failures_path.push(".failures.jsonl");
    let mut body = String::new();
    for f in &expansion.failures {
        body.push_str(&serde_json::to_string(f).map_err(domain)?);
        body.push('\n');
    }
    fs::write(&failures_path, body).map_err(io_fail)?;

    for s in &expansion.per_source {
        println!(
            "{}: {} in, {} out, {} failed",
            s.source_path, s.input, s.output, s.failed
        );
    }
    println!("{}", expansion.accounting_line());
    Ok(())
}

fn cmd_report(r: &ReportCommand) -> CmdResult {
    let text = match r {
        ReportCommand::Stats { manifest, format } => {
            let ds = load(manifest)?.dataset;
            render(&compute_stats(&ds.items).table(), *format)
        }
        ReportCommand::Leaderboard {
            table,
            system_name,
            format,
        } => render(&read_leaderboard_table(table)?.table(system_name), *format),
        ReportCommand::Ablation {
            rows,
            layout,
            label_header,
            format,
        } => {
            let rows = read_ablation_rows(rows)?;
            let layout = match layout {
                LayoutArg::Grid => AblationLayout::Grid,
                LayoutArg::List => AblationLayout::List,
            };
            render(
                &ablation_table(&rows, layout, label_header).map_err(domain)?,
                *format,
            )
        }
    };
    print!("{text}");
    Ok(())
}

pub fn execute(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Validate(a) => cmd_validate(a),
        Command::Run(a) => cmd_run(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Expand(a) => cmd_expand(a),
        Command::Report(r) => cmd_report(r),
    }
}

pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Domain(e) | Failure::Io(e)) = &f;
            eprintln!("error: {e:#}");
            ExitCode::from(f.code())
        }
    }
}
