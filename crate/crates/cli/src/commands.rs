use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use cmx_core::augment::{
    collate_datasets, make_views_dataset, merge_monolingual, NoisePolicy, TransliterationTable,
    ViewSpec, ViewTransform,
};
use cmx_core::corpus::{
    parse_conll, parse_tsv_classification, read_jsonl, read_jsonl_as, remap_open_tag, write_jsonl,
    Dataset, LangTag, TagMapping, TaskKind,
};
use cmx_core::quantify::{quantify_dataset, report_json, LidSource, MetricsReport};
use cmx_core::sample::{sample_by_predicate, sample_quantiles, MetricName, SampleMode, SampleSpec};
use cmx_core::{lid, Error, Result};

#[derive(Parser)]
#[command(
    name = "cmx",
    version,
    about = "Process code-mixed text corpora: convert, tag, quantify, augment, sample"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Suppress tables on standard output
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a dataset into the standardized JSONL format
    Convert(ConvertArgs),
    /// Compute code-mixing metrics per record and for the corpus
    Quantify(QuantifyArgs),
    /// Train or apply a token-level language identification model
    #[command(subcommand)]
    Lid(LidCommand),
    /// Attach a spelling-noise view to every record
    Augment(AugmentArgs),
    /// Attach a transliterated view to every record
    Translit(TranslitArgs),
    /// Select a subset of records by metric predicate or quantile bins
    Sample(SampleArgs),
    /// Append label-mapped monolingual records to a classification dataset
    MergeMono(MergeMonoArgs),
    /// Concatenate datasets, prefixing uids by source index
    Collate(CollateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InputFormat {
    Conll,
    Tsv,
    Jsonl,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Jsonl,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TaskArg {
    Classification,
    Tagging,
    Generation,
}

impl From<TaskArg> for TaskKind {
    fn from(value: TaskArg) -> Self {
        match value {
            TaskArg::Classification => TaskKind::Classification,
            TaskArg::Tagging => TaskKind::Tagging,
            TaskArg::Generation => TaskKind::Generation,
        }
    }
}

#[derive(Args)]
struct ConvertArgs {
    #[arg(long, value_enum)]
    from: InputFormat,
    #[arg(long, value_enum)]
    to: OutputFormat,
    #[arg(long, value_enum)]
    task: TaskArg,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Language code to ingest as the lang1 role (e.g. hi)
    #[arg(long)]
    lang1: Option<String>,
    /// Language code to ingest as the lang2 role (e.g. en)
    #[arg(long)]
    lang2: Option<String>,
    /// Carry unknown tags through instead of rejecting them
    #[arg(long)]
    allow_open_tagset: bool,
}

#[derive(Args)]
struct QuantifyArgs {
    #[arg(long)]
    input: PathBuf,
    /// LID model applied to records that carry no lid tags
    #[arg(long)]
    model: Option<PathBuf>,
    /// Also print one table row per record
    #[arg(long)]
    per_record: bool,
    /// Write the JSON report here
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write the dataset back out with per-record metrics attached
    #[arg(long)]
    annotated: Option<PathBuf>,
    /// Treat open tags with this code as lang1
    #[arg(long)]
    lang1: Option<String>,
    /// Treat open tags with this code as lang2
    #[arg(long)]
    lang2: Option<String>,
}

#[derive(Subcommand)]
enum LidCommand {
    /// Train a model on a tagging dataset with lid arrays
    Train(LidTrainArgs),
    /// Tag every record of a dataset with a trained model
    Tag(LidTagArgs),
}

#[derive(Args)]
struct LidTrainArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = 1)]
    ngram_min: usize,
    #[arg(long, default_value_t = 3)]
    ngram_max: usize,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 2)]
    lexicon_min_count: u64,
}

#[derive(Args)]
struct LidTagArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Replace lid arrays that are already present
    #[arg(long)]
    overwrite: bool,
}

#[derive(Args)]
struct AugmentArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Noise pipeline, e.g. drop_vowels:0.1,replace_vowels:0.05
    #[arg(long)]
    ops: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// View name the noised text is stored under
    #[arg(long, default_value = "noised")]
    view: String,
    /// Replace the view if a record already has one with this name
    #[arg(long)]
    overwrite_view: bool,
}

#[derive(Args)]
struct TranslitArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Table TSV path, or builtin:devanagari for the shipped table
    #[arg(long)]
    table: String,
    /// View name the transliterated text is stored under
    #[arg(long, default_value = "translit")]
    view: String,
    /// Replace the view if a record already has one with this name
    #[arg(long)]
    overwrite_view: bool,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// One of cmi, i_index, entropy_bits, switch_points
    #[arg(long)]
    metric: String,
    /// Predicate mode: keep records with metric >= this value
    #[arg(long)]
    min: Option<f64>,
    /// Predicate mode: keep records with metric <= this value
    #[arg(long)]
    max: Option<f64>,
    /// Quantile mode: number of rank bins
    #[arg(long)]
    bins: Option<usize>,
    /// Quantile mode: records drawn per bin
    #[arg(long)]
    per_bin: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct MergeMonoArgs {
    /// The code-mixed classification dataset
    #[arg(long)]
    main: PathBuf,
    /// The monolingual classification dataset to draw from
    #[arg(long)]
    mono: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Label rewrites, e.g. pos=positive,neg=negative
    #[arg(long)]
    label_map: String,
    /// Appended records as a fraction of the main dataset size
    #[arg(long)]
    ratio: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct CollateArgs {
    #[arg(long)]
    output: PathBuf,
    /// Input JSONL datasets, in order
    #[arg(required = true, num_args = 1..)]
    inputs: Vec<PathBuf>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Convert(args) => convert(args),
        Command::Quantify(args) => quantify(args, cli.quiet),
        Command::Lid(LidCommand::Train(args)) => lid_train(args),
        Command::Lid(LidCommand::Tag(args)) => lid_tag(args),
        Command::Augment(args) => augment(args),
        Command::Translit(args) => translit(args),
        Command::Sample(args) => sample(args),
        Command::MergeMono(args) => merge_mono(args),
        Command::Collate(args) => collate(args),
    }
}

fn open_input(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

/// Write through a temp file in the target directory, then rename, so an
/// interrupted run never leaves a truncated output.
fn write_atomic(path: &Path, write_fn: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(parent) if !parent.as_os_str().is_empty() => parent,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    write_fn(&mut tmp)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn write_dataset(path: &Path, dataset: &Dataset) -> Result<()> {
    write_atomic(path, |w| write_jsonl(dataset, w))
}

fn read_dataset(path: &Path) -> Result<Dataset> {
    read_jsonl(open_input(path)?)
}

fn convert(args: ConvertArgs) -> Result<()> {
    let task = TaskKind::from(args.task);
    let dataset = match args.from {
        InputFormat::Conll => {
            if task != TaskKind::Tagging {
                return Err(Error::usage("conll input is a tagging format"));
            }
            let mut mapping = TagMapping::new().with_open_tagset(args.allow_open_tagset);
            if let Some(code) = &args.lang1 {
                mapping = mapping.with_language(code, LangTag::Lang1);
            }
            if let Some(code) = &args.lang2 {
                mapping = mapping.with_language(code, LangTag::Lang2);
            }
            parse_conll(open_input(&args.input)?, &mapping)?
        }
        InputFormat::Tsv => {
            if task != TaskKind::Classification {
                return Err(Error::usage("tsv input is a classification format"));
            }
            parse_tsv_classification(open_input(&args.input)?)?
        }
        InputFormat::Jsonl => read_jsonl_as(open_input(&args.input)?, task)?,
    };
    write_dataset(&args.output, &dataset)
}

fn apply_role_remaps(dataset: &mut Dataset, lang1: Option<&str>, lang2: Option<&str>) {
    if let Some(code) = lang1 {
        remap_open_tag(dataset, code, LangTag::Lang1);
    }
    if let Some(code) = lang2 {
        remap_open_tag(dataset, code, LangTag::Lang2);
    }
}

fn quantify(args: QuantifyArgs, quiet: bool) -> Result<()> {
    let mut dataset = read_dataset(&args.input)?;
    apply_role_remaps(&mut dataset, args.lang1.as_deref(), args.lang2.as_deref());
    let model = args
        .model
        .as_deref()
        .map(|path| lid::load(open_input(path)?))
        .transpose()?;
    let source = match &model {
        Some(model) => LidSource::Model(model),
        None => LidSource::ExistingTags,
    };
    let report = quantify_dataset(&mut dataset, source)?;
    if !quiet {
        print_report(&report, args.per_record);
    }
    if let Some(path) = &args.output {
        let json = report_json(&report)?;
        write_atomic(path, |w| {
            w.write_all(json.as_bytes())?;
            w.write_all(b"\n")?;
            Ok(())
        })?;
    }
    if let Some(path) = &args.annotated {
        write_dataset(path, &dataset)?;
    }
    Ok(())
}

fn print_report(report: &MetricsReport, per_record: bool) {
    let c = &report.corpus;
    println!("corpus metrics");
    println!("  {:<24} {:>12}", "n_records", c.n_records);
    println!("  {:<24} {:>12.4}", "mean_cmi_all", c.mean_cmi_all);
    println!("  {:<24} {:>12.4}", "mean_cmi_mixed", c.mean_cmi_mixed);
    println!("  {:<24} {:>12.4}", "fraction_mixed", c.fraction_mixed);
    println!("  {:<24} {:>12.4}", "m_index", c.m_index);
    println!(
        "  {:<24} {:>12.4}",
        "language_entropy_bits", c.language_entropy_bits
    );
    println!(
        "  {:<24} {:>12.4}",
        "avg_switch_points", c.avg_switch_points
    );
    for (tag, share) in &c.token_share {
        println!("  {:<24} {:>12.4}", format!("token_share[{tag}]"), share);
    }
    if per_record {
        println!();
        println!(
            "{:<16} {:>10} {:>10} {:>14} {:>15}",
            "uid", "cmi", "i_index", "entropy_bits", "switch_points"
        );
        for (uid, m) in &report.per_record {
            println!(
                "{:<16} {:>10.4} {:>10.4} {:>14.4} {:>15}",
                uid, m.cmi, m.i_index, m.entropy_bits, m.switch_points
            );
        }
    }
}

fn lid_train(args: LidTrainArgs) -> Result<()> {
    let dataset = read_dataset(&args.input)?;
    let config = lid::LidConfig {
        ngram_min: args.ngram_min,
        ngram_max: args.ngram_max,
        alpha: args.alpha,
        lexicon_min_count: args.lexicon_min_count,
    };
    let model = lid::train(&dataset, config)?;
    write_atomic(&args.output, |w| lid::save(&model, w))
}

fn lid_tag(args: LidTagArgs) -> Result<()> {
    let model = lid::load(open_input(&args.model)?)?;
    let mut dataset = read_dataset(&args.input)?;
    lid::tag_dataset(&model, &mut dataset, args.overwrite)?;
    write_dataset(&args.output, &dataset)
}

fn augment(args: AugmentArgs) -> Result<()> {
    let policy = NoisePolicy::parse(&args.ops, args.seed)?;
    let mut dataset = read_dataset(&args.input)?;
    let specs = [ViewSpec {
        name: args.view.clone(),
        transform: ViewTransform::Noise(&policy),
    }];
    make_views_dataset(&mut dataset, &specs, args.overwrite_view)?;
    write_dataset(&args.output, &dataset)
}

fn load_table(source: &str) -> Result<TransliterationTable> {
    if let Some(builtin) = source.strip_prefix("builtin:") {
        return match builtin {
            "devanagari" | "devanagari_latin" => Ok(TransliterationTable::builtin_devanagari()),
            other => Err(Error::usage(format!(
                "unknown builtin table `{other}` (available: devanagari)"
            ))),
        };
    }
    let path = Path::new(source);
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "table".to_string());
    TransliterationTable::from_tsv(name, open_input(path)?)
}

fn translit(args: TranslitArgs) -> Result<()> {
    let table = load_table(&args.table)?;
    let mut dataset = read_dataset(&args.input)?;
    let specs = [ViewSpec {
        name: args.view.clone(),
        transform: ViewTransform::Transliterate(&table),
    }];
    make_views_dataset(&mut dataset, &specs, args.overwrite_view)?;
    write_dataset(&args.output, &dataset)
}

fn sample(args: SampleArgs) -> Result<()> {
    let metric: MetricName = args.metric.parse()?;
    let predicate_flags = args.min.is_some() || args.max.is_some();
    let quantile_flags = args.bins.is_some() || args.per_bin.is_some();
    let mode =
        match (predicate_flags, quantile_flags) {
            (true, false) => SampleMode::Predicate {
                min: args.min,
                max: args.max,
            },
            (false, true) => match (args.bins, args.per_bin) {
                (Some(bins), Some(per_bin)) => SampleMode::Quantile { bins, per_bin },
                _ => {
                    return Err(Error::usage(
                        "quantile sampling needs both --bins and --per-bin",
                    ))
                }
            },
            (true, true) => {
                return Err(Error::usage(
                    "choose either predicate (--min/--max) or quantile (--bins/--per-bin) sampling",
                ))
            }
            (false, false) => return Err(Error::usage(
                "pass --min/--max for predicate sampling or --bins/--per-bin for quantile sampling",
            )),
        };
    let spec = SampleSpec {
        metric,
        mode,
        seed: args.seed,
    };
    let dataset = read_dataset(&args.input)?;
    let sampled = match &spec.mode {
        SampleMode::Predicate { .. } => sample_by_predicate(&dataset, &spec)?,
        SampleMode::Quantile { .. } => sample_quantiles(&dataset, &spec)?,
    };
    write_dataset(&args.output, &sampled)
}

fn parse_label_map(raw: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for part in raw.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (from, to) = part.split_once('=').ok_or_else(|| {
            Error::usage(format!("bad label mapping `{part}` (expected `from=to`)"))
        })?;
        if map
            .insert(from.trim().to_string(), to.trim().to_string())
            .is_some()
        {
            return Err(Error::usage(format!(
                "label `{}` mapped twice",
                from.trim()
            )));
        }
    }
    if map.is_empty() {
        return Err(Error::usage("label map is empty"));
    }
    Ok(map)
}

fn merge_mono(args: MergeMonoArgs) -> Result<()> {
    let label_map = parse_label_map(&args.label_map)?;
    let main = read_dataset(&args.main)?;
    let mono = read_dataset(&args.mono)?;
    let merged = merge_monolingual(&main, &mono, &label_map, args.ratio, args.seed)?;
    write_dataset(&args.output, &merged)
}

fn collate(args: CollateArgs) -> Result<()> {
    let datasets: Vec<Dataset> = args
        .inputs
        .iter()
        .map(|path| read_dataset(path))
        .collect::<Result<_>>()?;
    let collated = collate_datasets(&datasets)?;
    write_dataset(&args.output, &collated)
}
