//! Monte-Carlo harness: uniform message generation, the cluster-erasure
//! channel, error-rate sweeps, decoder comparison and CSV output.
//!
//! Randomness comes from ChaCha8 streams. Every stream is seeded with the
//! 32 bytes `seed || m || trial || tag` (four little-endian u64), so a trial's
//! query depends only on the experiment seed, the message count and the
//! trial index, never on scheduling.

use std::fmt;
use std::io::Write;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::decoder::{decode, DecodeConfig, DecodeOutcome, DecodeStatus, ErasedPolicy, Rule};
use crate::error::{Error, Result};
use crate::model::{LinkStore, Message, NetworkParams, PartialMessage};

const TAG_MESSAGES: u64 = 1;
const TAG_QUERY: u64 = 2;
const TAG_ERASE: u64 = 3;
const TAG_PROBE: u64 = 4;

/// Deterministic substream for `(seed, m, trial, tag)`.
pub fn substream(seed: u64, m: u64, trial: u64, tag: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    for (chunk, word) in key.chunks_exact_mut(8).zip([seed, m, trial, tag]) {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// `m` messages with every symbol uniform on `[0, l)`. Duplicates are kept.
pub fn gen_messages(params: &NetworkParams, m: usize, seed: u64) -> Vec<Message> {
    let mut rng = substream(seed, m as u64, 0, TAG_MESSAGES);
    (0..m).map(|_| random_message(params, &mut rng)).collect()
}

fn random_message(params: &NetworkParams, rng: &mut impl Rng) -> Message {
    let symbols = (0..params.clusters()).map(|_| rng.random_range(0..params.neurons())).collect();
    Message::new(params, symbols).expect("symbols drawn below l")
}

/// Erase `erase_count` distinct clusters of `msg`, chosen uniformly.
pub fn erase_clusters(msg: &Message, erase_count: usize, seed: u64) -> Result<PartialMessage> {
    erase_clusters_with(msg, erase_count, &mut substream(seed, 0, 0, TAG_ERASE))
}

pub fn erase_clusters_with(msg: &Message, erase_count: usize, rng: &mut impl Rng) -> Result<PartialMessage> {
    if erase_count >= msg.len() {
        return Err(Error::EraseCountTooLarge { erase_count, clusters: msg.len() });
    }
    let erased = sample(rng, msg.len(), erase_count).into_vec();
    Ok(PartialMessage::with_erased(msg, &erased))
}

/// Query for one trial: a stored message picked uniformly, then erased.
/// Returns the index of the picked message alongside the query.
///
/// Panics if `messages` is empty or `erase_count` is not below `c`.
pub fn draw_query(messages: &[Message], erase_count: usize, seed: u64, trial: u64) -> (usize, PartialMessage) {
    let mut rng = substream(seed, messages.len() as u64, trial, TAG_QUERY);
    let index = rng.random_range(0..messages.len());
    let query = erase_clusters_with(&messages[index], erase_count, &mut rng).expect("erase_count below c");
    (index, query)
}

/// Where trial queries come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProbeMode {
    /// Erased copies of stored messages.
    #[default]
    Stored,
    /// Erased copies of fresh random messages, usually not stored.
    Unstored,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub params: NetworkParams,
    pub message_counts: Vec<usize>,
    pub trials: usize,
    pub erase_count: usize,
    /// Every config decodes the same queries.
    pub configs: Vec<DecodeConfig>,
    pub seed: u64,
    pub probe: ProbeMode,
}

impl ExperimentSpec {
    pub fn new(
        params: NetworkParams,
        message_counts: Vec<usize>,
        trials: usize,
        erase_count: usize,
        seed: u64,
    ) -> Self {
        Self {
            params,
            message_counts,
            trials,
            erase_count,
            configs: vec![DecodeConfig::default()],
            seed,
            probe: ProbeMode::Stored,
        }
    }

    pub fn with_configs(mut self, configs: Vec<DecodeConfig>) -> Self {
        self.configs = configs;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1"));
        }
        if self.erase_count >= self.params.clusters() {
            return Err(Error::EraseCountTooLarge { erase_count: self.erase_count, clusters: self.params.clusters() });
        }
        if self.probe == ProbeMode::Stored && self.message_counts.contains(&0) {
            return Err(Error::EmptyMessageSet);
        }
        self.configs.iter().try_for_each(DecodeConfig::validate)
    }
}

/// Aggregates for one `(m, config)` point.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub clusters: usize,
    pub neurons: usize,
    pub m: usize,
    pub trials: usize,
    pub erase_count: usize,
    pub config: DecodeConfig,
    pub density: f64,
    pub error_rate: f64,
    pub ambiguous_rate: f64,
    pub failed_rate: f64,
    /// Trials that retrieved a message other than the probe.
    pub wrong_rate: f64,
    pub overflow_rate: f64,
    pub beta_max: usize,
    pub mean_cycles: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentResult {
    pub rows: Vec<ResultRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TrialClass {
    Correct,
    Wrong,
    Ambiguous,
    Failed,
}

fn classify(outcome: &DecodeOutcome, expected: &Message) -> TrialClass {
    match &outcome.status {
        DecodeStatus::Retrieved(m) if m == expected => TrialClass::Correct,
        DecodeStatus::Retrieved(_) => TrialClass::Wrong,
        DecodeStatus::Ambiguous => TrialClass::Ambiguous,
        DecodeStatus::Failed => TrialClass::Failed,
    }
}

/// Trials decoded under every config: `outcomes[trial][config]`.
struct Point {
    probes: Vec<Message>,
    outcomes: Vec<Vec<DecodeOutcome>>,
}

fn build_store(spec: &ExperimentSpec, m: usize) -> Result<(LinkStore, Vec<Message>)> {
    let messages = gen_messages(&spec.params, m, spec.seed);
    let mut store = LinkStore::new(spec.params);
    store.store_all(&messages)?;
    Ok((store, messages))
}

fn run_point(
    spec: &ExperimentSpec,
    store: &LinkStore,
    messages: &[Message],
    configs: &[DecodeConfig],
) -> Result<Point> {
    let m = messages.len();
    let trials: Vec<(Message, Vec<DecodeOutcome>)> = (0..spec.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let (probe, query) = match spec.probe {
                ProbeMode::Stored => {
                    let (i, q) = draw_query(messages, spec.erase_count, spec.seed, trial);
                    (messages[i].clone(), q)
                }
                ProbeMode::Unstored => {
                    let mut rng = substream(spec.seed, m as u64, trial, TAG_PROBE);
                    let probe = random_message(&spec.params, &mut rng);
                    let q = erase_clusters_with(&probe, spec.erase_count, &mut rng)?;
                    (probe, q)
                }
            };
            let outcomes = configs.iter().map(|cfg| decode(store, &query, cfg)).collect::<Result<Vec<_>>>()?;
            Ok((probe, outcomes))
        })
        .collect::<Result<_>>()?;
    let (probes, outcomes) = trials.into_iter().unzip();
    Ok(Point { probes, outcomes })
}

fn summarize(spec: &ExperimentSpec, store: &LinkStore, m: usize, point: &Point) -> Vec<ResultRow> {
    let density = store.density();
    spec.configs
        .iter()
        .enumerate()
        .map(|(k, config)| {
            let mut counts = [0usize; 4];
            let mut overflow = 0;
            let mut beta_max = 0;
            let mut cycles = 0u64;
            for (probe, outcomes) in point.probes.iter().zip(&point.outcomes) {
                let o = &outcomes[k];
                counts[classify(o, probe) as usize] += 1;
                overflow += usize::from(o.beta_overflow);
                beta_max = beta_max.max(o.max_active_after_first_iter);
                cycles += o.cycles;
            }
            let n = spec.trials as f64;
            let [_, wrong, ambiguous, failed] = counts;
            ResultRow {
                clusters: spec.params.clusters(),
                neurons: spec.params.neurons(),
                m,
                trials: spec.trials,
                erase_count: spec.erase_count,
                config: *config,
                density,
                error_rate: (wrong + ambiguous + failed) as f64 / n,
                ambiguous_rate: ambiguous as f64 / n,
                failed_rate: failed as f64 / n,
                wrong_rate: wrong as f64 / n,
                overflow_rate: overflow as f64 / n,
                beta_max,
                mean_cycles: cycles as f64 / n,
            }
        })
        .collect()
}

/// Sweep every message count and config; one row per `(m, config)`, in
/// `message_counts` order then `configs` order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let mut rows = Vec::new();
    for &m in &spec.message_counts {
        let (store, messages) = build_store(spec, m)?;
        let point = run_point(spec, &store, &messages, &spec.configs)?;
        rows.extend(summarize(spec, &store, m, &point));
    }
    Ok(ExperimentResult { rows })
}

/// Like [`run_experiment`] for a single point, but against an existing store
/// whose stored set is `messages`. `spec.message_counts` is ignored.
pub fn run_on_store(spec: &ExperimentSpec, store: &LinkStore, messages: &[Message]) -> Result<ExperimentResult> {
    spec.validate()?;
    if store.params() != &spec.params {
        return Err(Error::InvalidConfig("store geometry differs from the experiment's"));
    }
    if spec.probe == ProbeMode::Stored && messages.is_empty() {
        return Err(Error::EmptyMessageSet);
    }
    let point = run_point(spec, store, messages, &spec.configs)?;
    Ok(ExperimentResult { rows: summarize(spec, store, messages.len(), &point) })
}

/// Agreement between decoders on identical trials, for one message count and
/// one bounded configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub m: usize,
    pub trials: usize,
    pub bounded: DecodeConfig,
    pub density: f64,
    /// MPD against SD with the strict OR policy.
    pub mpd_vs_sd_strict: f64,
    /// SD with the bypass policy against SD with the strict policy.
    pub sd_skip_vs_sd_strict: f64,
    /// Bounded decoder against unbounded SD with the same policy.
    pub bounded_vs_sd: f64,
    /// As above, restricted to trials without overflow (1.0 when there are
    /// none).
    pub bounded_vs_sd_no_overflow: f64,
    pub overflow_rate: f64,
}

/// Decode identical trials with MPD, SD (strict), SD (bypass) and every
/// bounded config in `spec.configs`, and report how often their outcomes
/// (final state, status and iteration count) agree.
pub fn compare_decoders(spec: &ExperimentSpec) -> Result<Vec<ComparisonRow>> {
    spec.validate()?;
    let bounded: Vec<DecodeConfig> =
        spec.configs.iter().filter(|c| matches!(c.rule, Rule::SdBounded { .. })).copied().collect();
    if bounded.is_empty() {
        return Err(Error::InvalidConfig("comparison needs at least one sd-bounded config"));
    }
    let mut rows = Vec::new();
    for &m in &spec.message_counts {
        let (store, messages) = build_store(spec, m)?;
        for b in &bounded {
            let base = |rule, policy| DecodeConfig { rule, erased_policy: policy, ..*b };
            let configs = [
                base(Rule::Mpd, ErasedPolicy::StrictOr),
                base(Rule::Sd, ErasedPolicy::StrictOr),
                base(Rule::Sd, ErasedPolicy::SkipAsOnes),
                base(Rule::Sd, b.erased_policy),
                *b,
            ];
            let point = run_point(spec, &store, &messages, &configs)?;
            let n = spec.trials as f64;
            let agree =
                |x: usize, y: usize| point.outcomes.iter().filter(|o| o[x].same_result(&o[y])).count() as f64 / n;
            let clean: Vec<_> = point.outcomes.iter().filter(|o| !o[4].beta_overflow).collect();
            let clean_agree = if clean.is_empty() {
                1.0
            } else {
                clean.iter().filter(|o| o[4].same_result(&o[3])).count() as f64 / clean.len() as f64
            };
            rows.push(ComparisonRow {
                m,
                trials: spec.trials,
                bounded: *b,
                density: store.density(),
                mpd_vs_sd_strict: agree(0, 1),
                sd_skip_vs_sd_strict: agree(2, 1),
                bounded_vs_sd: agree(4, 3),
                bounded_vs_sd_no_overflow: clean_agree,
                overflow_rate: (spec.trials - clean.len()) as f64 / n,
            });
        }
    }
    Ok(rows)
}

pub const CSV_HEADER: &str = "c,l,m,trials,erase_count,rule,policy,beta,iters,density,error_rate,\
ambiguous_rate,failed_rate,overflow_rate,beta_max,mean_cycles";

/// `%.6g`-style formatting: six significant digits, trailing zeros removed.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { x.to_string() };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (5 - exp) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

impl fmt::Display for ResultRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.clusters,
            self.neurons,
            self.m,
            self.trials,
            self.erase_count,
            self.config.rule.name(),
            self.config.erased_policy.name(),
            self.config.rule.beta().unwrap_or(0),
            self.config.max_iters,
            format_sig6(self.density),
            format_sig6(self.error_rate),
            format_sig6(self.ambiguous_rate),
            format_sig6(self.failed_rate),
            format_sig6(self.overflow_rate),
            self.beta_max,
            format_sig6(self.mean_cycles),
        )
    }
}

/// Write the header and one line per row. `beta` is 0 for unbounded rules.
pub fn emit_csv(result: &ExperimentResult, mut out: impl Write) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in &result.rows {
        writeln!(out, "{row}")?;
    }
    out.flush()?;
    Ok(())
}
