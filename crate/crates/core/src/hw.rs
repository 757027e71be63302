//! Closed-form resource and latency model of the selective-decoding
//! architecture, and the protocol for measuring the serialization bound.

use rayon::prelude::*;

use crate::decoder::{decode, DecodeConfig, Rule};
use crate::error::{Error, Result};
use crate::experiments::draw_query;
use crate::model::{LinkStore, Message, NetworkParams};

/// Link memory: `c(c-1)` RAM blocks of `l x l` bits.
pub fn bram_bits(clusters: usize, neurons: usize) -> u64 {
    let (c, l) = (clusters as u64, neurons as u64);
    c * (c - 1) * l * l
}

/// Stored information: `m` messages of `c * ceil(log2 l)` bits.
pub fn capacity_bits(clusters: usize, neurons: usize, messages: u64) -> u64 {
    let kappa = u64::from(usize::BITS - (neurons.max(2) - 1).leading_zeros());
    messages * clusters as u64 * kappa
}

/// Retrieval latency of the serialized decoder: `2 + (beta + 1)(it - 1)`.
pub fn access_delay_sd(beta: usize, iterations: usize) -> u64 {
    assert!(beta >= 1 && iterations >= 1);
    2 + (beta as u64 + 1) * (iterations as u64 - 1)
}

/// Retrieval latency of the massively-parallel decoder: `1 + it`.
pub fn access_delay_mpd(iterations: usize) -> u64 {
    assert!(iterations >= 1);
    1 + iterations as u64
}

/// Clock cycles charged for a decode that ran `iterations_used` global steps.
///
/// The first iteration costs 2 cycles under every rule (local decode plus
/// one link read). After that the massively-parallel rule costs 1 cycle per
/// iteration and the serialized rule costs `beta` reads plus one register
/// cycle. The unbounded selective rule is charged as if `beta = l`, the bound
/// under which it coincides with the serialized rule.
pub fn cycle_count(config: &DecodeConfig, neurons: usize, iterations_used: usize) -> u64 {
    let it = iterations_used.max(1);
    match config.rule {
        Rule::Mpd => access_delay_mpd(it),
        Rule::Sd => access_delay_sd(neurons, it),
        Rule::SdBounded { beta } => access_delay_sd(beta, it),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceReport {
    pub bram_bits: u64,
    pub capacity_bits: u64,
    pub access_delay_sd: u64,
    pub access_delay_mpd: u64,
    /// Stored information bits per bit of link memory.
    pub efficiency: f64,
}

impl ResourceReport {
    pub fn new(params: &NetworkParams, messages: u64, beta: usize, iterations: usize) -> Self {
        let bram = bram_bits(params.clusters(), params.neurons());
        let capacity = capacity_bits(params.clusters(), params.neurons(), messages);
        Self {
            bram_bits: bram,
            capacity_bits: capacity,
            access_delay_sd: access_delay_sd(beta, iterations),
            access_delay_mpd: access_delay_mpd(iterations),
            efficiency: capacity as f64 / bram as f64,
        }
    }
}

/// Result of a beta measurement run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaReport {
    /// Largest active count per cluster after the first iteration, per trial.
    pub per_trial: Vec<usize>,
    /// Maximum over all trials.
    pub beta: usize,
    /// `histogram[k]` counts trials whose per-trial value is `k`.
    pub histogram: Vec<usize>,
    pub trials: usize,
    pub erase_count: usize,
    pub seed: u64,
}

impl BetaReport {
    fn from_trials(per_trial: Vec<usize>, erase_count: usize, seed: u64) -> Self {
        let beta = per_trial.iter().copied().max().unwrap_or(0);
        let mut histogram = vec![0; beta + 1];
        for &b in &per_trial {
            histogram[b] += 1;
        }
        Self { trials: per_trial.len(), per_trial, beta, histogram, erase_count, seed }
    }

    /// Most frequent per-trial value; ties go to the smaller value.
    pub fn mode(&self) -> usize {
        self.histogram.iter().enumerate().max_by(|(i, a), (j, b)| a.cmp(b).then(j.cmp(i))).map_or(0, |(i, _)| i)
    }

    /// Fraction of trials whose per-trial value exceeds `beta`.
    pub fn exceed_rate(&self, beta: usize) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        self.per_trial.iter().filter(|&&b| b > beta).count() as f64 / self.trials as f64
    }
}

/// Measure the serialization bound: decode `trials` queries, each a stored
/// message drawn uniformly from `messages` with `erase_count` clusters erased,
/// using the unbounded selective rule, and record the largest per-cluster
/// activation count after the first iteration.
///
/// Queries are drawn exactly as [`crate::experiments::run_experiment`] draws
/// them for `m = messages.len()`, so the two agree trial for trial.
pub fn measure_beta(
    store: &LinkStore,
    messages: &[Message],
    trials: usize,
    erase_count: usize,
    seed: u64,
    config: &DecodeConfig,
) -> Result<BetaReport> {
    if messages.is_empty() || store.stored_count() == 0 {
        return Err(Error::EmptyMessageSet);
    }
    let c = store.params().clusters();
    if erase_count >= c {
        return Err(Error::EraseCountTooLarge { erase_count, clusters: c });
    }
    let config = DecodeConfig { rule: Rule::Sd, ..*config };
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let (_, query) = draw_query(messages, erase_count, seed, trial as u64);
            decode(store, &query, &config).map(|o| o.max_active_after_first_iter)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BetaReport::from_trials(per_trial, erase_count, seed))
}
