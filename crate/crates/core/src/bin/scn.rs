//! `scn`: train, query and benchmark sparse clustered network memories.
//!
//! Exit codes: 0 success (or a retrieved query), 1 usage/IO/parse error,
//! 2 ambiguous query, 3 failed query.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use scn::experiments::{run_on_store, ExperimentSpec};
use scn::persistence::{parse_query_line, read_messages};
use scn::{
    decode, emit_csv, gen_messages, load_network_file, measure_beta, run_experiment, save_network_file, DecodeConfig,
    DecodeStatus, ErasedPolicy, ExperimentResult, LinkStore, Message, NetworkParams, ResourceReport, Rule,
};

#[derive(Parser)]
#[command(name = "scn", version, about = "Sparse clustered network associative memory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Store messages into a new network file.
    Train(TrainArgs),
    /// Complete one partial message.
    Query(QueryArgs),
    /// Measure the largest activation count after the first iteration.
    BenchBeta(BenchBetaArgs),
    /// Sweep retrieval error rates over message counts and decoders.
    BenchError(BenchErrorArgs),
    /// Print memory, capacity and latency figures.
    Report(ReportArgs),
    /// Summarize a network file.
    Info(InfoArgs),
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["count", "messages"])))]
struct TrainArgs {
    #[arg(long)]
    clusters: usize,
    /// Neurons per cluster (l).
    #[arg(long)]
    neurons: usize,
    /// Number of uniform random messages to generate.
    #[arg(long, requires = "seed")]
    count: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Message file, one message per line.
    #[arg(long)]
    messages: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum DecoderArg {
    Mpd,
    Sd,
    SdBounded,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Skip,
    Strict,
}

impl From<PolicyArg> for ErasedPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Skip => ErasedPolicy::SkipAsOnes,
            PolicyArg::Strict => ErasedPolicy::StrictOr,
        }
    }
}

#[derive(Args)]
struct DecoderFlags {
    #[arg(long, default_value_t = 2)]
    beta: usize,
    #[arg(long, default_value_t = 4)]
    iters: usize,
    #[arg(long, value_enum, default_value = "skip")]
    policy: PolicyArg,
    #[arg(long)]
    early_stop: bool,
}

impl DecoderFlags {
    fn config(&self, decoder: DecoderArg) -> DecodeConfig {
        let rule = match decoder {
            DecoderArg::Mpd => Rule::Mpd,
            DecoderArg::Sd => Rule::Sd,
            DecoderArg::SdBounded => Rule::SdBounded { beta: self.beta },
        };
        DecodeConfig::new(rule, self.iters).with_policy(self.policy.into()).with_early_stop(self.early_stop)
    }
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    net: PathBuf,
    /// Space-separated symbols, `?` for an erased cluster.
    #[arg(long)]
    input: String,
    #[arg(long, value_enum, default_value = "sd")]
    decoder: DecoderArg,
    #[command(flatten)]
    flags: DecoderFlags,
}

/// Where the stored set comes from: a network plus its message file, a
/// message file alone, or generated messages.
#[derive(Args)]
struct SourceArgs {
    #[arg(long, requires = "messages")]
    net: Option<PathBuf>,
    #[arg(long)]
    messages: Option<PathBuf>,
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long)]
    neurons: Option<usize>,
}

#[derive(Args)]
struct BenchBetaArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, conflicts_with_all = ["net", "messages"])]
    count: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long)]
    erase_count: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 4)]
    iters: usize,
    #[arg(long, value_enum, default_value = "skip")]
    policy: PolicyArg,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct BenchErrorArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Comma-separated message counts to sweep.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["net", "messages"])]
    counts: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long)]
    erase_count: usize,
    #[arg(long)]
    seed: u64,
    /// Decoders to run on identical trials; repeat or comma-separate.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "sd")]
    decoder: Vec<DecoderArg>,
    #[command(flatten)]
    flags: DecoderFlags,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    clusters: usize,
    #[arg(long)]
    neurons: usize,
    #[arg(long)]
    count: u64,
    #[arg(long, default_value_t = 2)]
    beta: usize,
    #[arg(long, default_value_t = 4)]
    iters: usize,
}

#[derive(Args)]
struct InfoArgs {
    #[arg(long)]
    net: PathBuf,
}

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Train(a) => train(a),
        Command::Query(a) => query(a),
        Command::BenchBeta(a) => bench_beta(a),
        Command::BenchError(a) => bench_error(a),
        Command::Report(a) => report(a),
        Command::Info(a) => info(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn read_message_file(path: &Path, params: &NetworkParams) -> CliResult<Vec<Message>> {
    let file = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(read_messages(BufReader::new(file), params)?)
}

fn train(a: TrainArgs) -> CliResult<u8> {
    let params = NetworkParams::new(a.clusters, a.neurons)?;
    let messages = match (&a.messages, a.count, a.seed) {
        (Some(path), _, _) => read_message_file(path, &params)?,
        (None, Some(count), Some(seed)) => gen_messages(&params, count, seed),
        _ => unreachable!("clap enforces a message source"),
    };
    let mut store = LinkStore::new(params);
    store.store_all(&messages)?;
    save_network_file(&store, &a.out)?;
    println!("clusters={} neurons={} n={}", params.clusters(), params.neurons(), params.total_neurons());
    println!("messages={}", messages.len());
    println!("density={:.6}", store.density());
    Ok(0)
}

fn query(a: QueryArgs) -> CliResult<u8> {
    let store = load_network_file(&a.net)?;
    let input = parse_query_line(&a.input, store.params())?.ok_or("empty query")?;
    let out = decode(&store, &input, &a.flags.config(a.decoder))?;
    let code = match &out.status {
        DecodeStatus::Retrieved(m) => {
            println!("Retrieved {m}");
            0
        }
        DecodeStatus::Ambiguous => {
            println!("Ambiguous");
            2
        }
        DecodeStatus::Failed => {
            println!("Failed");
            3
        }
    };
    if code != 0 {
        for (i, set) in out.final_state.clusters().iter().enumerate() {
            let active: Vec<String> = set.iter().map(|n| n.to_string()).collect();
            println!("cluster {i}: {}", active.join(" "));
        }
    }
    println!("iterations={}", out.iterations_used);
    println!("cycles={}", out.cycles);
    println!("beta_observed={}", out.max_active_after_first_iter);
    println!("beta_overflow={}", out.beta_overflow);
    Ok(code)
}

/// Store and stored set for the bench commands.
fn bench_source(src: &SourceArgs, count: Option<usize>, seed: u64) -> CliResult<(LinkStore, Vec<Message>)> {
    match (&src.net, &src.messages) {
        (Some(net), Some(msgs)) => {
            let store = load_network_file(net)?;
            let messages = read_message_file(msgs, store.params())?;
            Ok((store, messages))
        }
        (None, Some(msgs)) => {
            let params = geometry(src)?;
            let messages = read_message_file(msgs, &params)?;
            let mut store = LinkStore::new(params);
            store.store_all(&messages)?;
            Ok((store, messages))
        }
        _ => {
            let params = geometry(src)?;
            let count = count.ok_or("--count (or --net/--messages) is required")?;
            let messages = gen_messages(&params, count, seed);
            let mut store = LinkStore::new(params);
            store.store_all(&messages)?;
            Ok((store, messages))
        }
    }
}

fn geometry(src: &SourceArgs) -> CliResult<NetworkParams> {
    match (src.clusters, src.neurons) {
        (Some(c), Some(l)) => Ok(NetworkParams::new(c, l)?),
        _ => Err("--clusters and --neurons are required without --net".into()),
    }
}

fn write_csv(result: &ExperimentResult, path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) => emit_csv(result, BufWriter::new(File::create(p)?))?,
        None => emit_csv(result, io::stdout().lock())?,
    }
    Ok(())
}

/// Summary lines go to stdout when the CSV goes to a file, else to stderr.
fn summary_sink(csv: &Option<PathBuf>) -> Box<dyn Write> {
    if csv.is_some() {
        Box::new(io::stdout())
    } else {
        Box::new(io::stderr())
    }
}

fn bench_beta(a: BenchBetaArgs) -> CliResult<u8> {
    let (store, messages) = bench_source(&a.source, a.count, a.seed)?;
    let config = DecodeConfig::new(Rule::Sd, a.iters).with_policy(a.policy.into());
    let report = measure_beta(&store, &messages, a.trials, a.erase_count, a.seed, &config)?;
    let spec = ExperimentSpec::new(*store.params(), vec![messages.len()], a.trials, a.erase_count, a.seed)
        .with_configs(vec![config]);
    let result = run_on_store(&spec, &store, &messages)?;
    debug_assert_eq!(result.rows[0].beta_max, report.beta);

    let mut out = summary_sink(&a.csv);
    writeln!(out, "messages={} density={:.6}", messages.len(), store.density())?;
    writeln!(out, "beta={} mode={} trials={}", report.beta, report.mode(), report.trials)?;
    for (value, n) in report.histogram.iter().enumerate().filter(|(_, &n)| n > 0) {
        writeln!(out, "  max_active={value}: {n}")?;
    }
    write_csv(&result, a.csv.as_deref())?;
    Ok(0)
}

fn bench_error(a: BenchErrorArgs) -> CliResult<u8> {
    let configs: Vec<DecodeConfig> = a.decoder.iter().map(|&d| a.flags.config(d)).collect();
    let result = if a.source.net.is_some() || a.source.messages.is_some() {
        let (store, messages) = bench_source(&a.source, None, a.seed)?;
        let spec = ExperimentSpec::new(*store.params(), vec![messages.len()], a.trials, a.erase_count, a.seed)
            .with_configs(configs);
        run_on_store(&spec, &store, &messages)?
    } else {
        if a.counts.is_empty() {
            return Err("--counts is required without --net/--messages".into());
        }
        let spec = ExperimentSpec::new(geometry(&a.source)?, a.counts.clone(), a.trials, a.erase_count, a.seed)
            .with_configs(configs);
        run_experiment(&spec)?
    };
    let mut out = summary_sink(&a.csv);
    for row in &result.rows {
        writeln!(
            out,
            "m={} {} error_rate={:.6} overflow_rate={:.6}",
            row.m,
            row.config.rule.name(),
            row.error_rate,
            row.overflow_rate
        )?;
    }
    write_csv(&result, a.csv.as_deref())?;
    Ok(0)
}

fn report(a: ReportArgs) -> CliResult<u8> {
    let params = NetworkParams::new(a.clusters, a.neurons)?;
    if a.beta == 0 || a.iters == 0 {
        return Err("--beta and --iters must be at least 1".into());
    }
    let r = ResourceReport::new(&params, a.count, a.beta, a.iters);
    println!(
        "clusters={} neurons={} n={} messages={}",
        params.clusters(),
        params.neurons(),
        params.total_neurons(),
        a.count
    );
    println!("capacity_bits={} ({:.2} Kbits)", r.capacity_bits, r.capacity_bits as f64 / 1000.0);
    println!("bram_bits={}", r.bram_bits);
    println!("access_delay_sd={} (beta={}, it={})", r.access_delay_sd, a.beta, a.iters);
    println!("access_delay_mpd={} (it={})", r.access_delay_mpd, a.iters);
    println!("efficiency={:.6}", r.efficiency);
    Ok(0)
}

fn info(a: InfoArgs) -> CliResult<u8> {
    let store = load_network_file(&a.net)?;
    let size = fs::metadata(&a.net)?.len();
    let p = store.params();
    println!("clusters={}", p.clusters());
    println!("neurons={}", p.neurons());
    println!("n={}", p.total_neurons());
    println!("stored_count={}", store.stored_count());
    println!("density={:.6}", store.density());
    println!("file_size={size}");
    Ok(0)
}
