//! Retrieval: local decoding, the global-decoding step rules, the serial-pass
//! priority encoder, and the iteration loop.
//!
//! Three global-decoding rules are provided:
//!
//! * [`gd_step_mpd`] evaluates, for every neuron, an AND over the other
//!   clusters of an `l`-input OR of `link & activation`, then ANDs the result
//!   with the neuron's previous activation (the memory effect). This is the
//!   massively-parallel reference.
//! * [`gd_step_sd`] only reads rows addressed by *active* neurons of each
//!   contributing cluster and ORs them. It reads the transposed block, so
//!   agreement with the reference depends on link symmetry.
//! * [`gd_step_bounded`] is the selective rule with at most `beta` row reads
//!   per contributing cluster, picked MSB-first by [`spm_serialize`].

use crate::bits::NeuronSet;
use crate::error::{Error, Result};
use crate::hw;
use crate::model::{ActivationState, LinkStore, Message, NetworkParams, PartialMessage, SubMessage};

/// Global-decoding rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Mpd,
    Sd,
    SdBounded { beta: usize },
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Mpd => "mpd",
            Rule::Sd => "sd",
            Rule::SdBounded { .. } => "sd-bounded",
        }
    }

    pub fn beta(&self) -> Option<usize> {
        match *self {
            Rule::SdBounded { beta } => Some(beta),
            _ => None,
        }
    }
}

/// How a fully active (erased) contributing cluster is treated by the
/// selective rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ErasedPolicy {
    /// Bypass the link store and contribute all ones, as the hardware does
    /// for a raised erase flag.
    #[default]
    SkipAsOnes,
    /// OR the rows of every active neuron, exactly as for any other cluster.
    StrictOr,
}

impl ErasedPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            ErasedPolicy::SkipAsOnes => "skip",
            ErasedPolicy::StrictOr => "strict",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DecodeConfig {
    pub rule: Rule,
    pub max_iters: usize,
    pub erased_policy: ErasedPolicy,
    pub early_stop: bool,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        Self { rule: Rule::Sd, max_iters: 4, erased_policy: ErasedPolicy::SkipAsOnes, early_stop: false }
    }
}

impl DecodeConfig {
    pub fn new(rule: Rule, max_iters: usize) -> Self {
        Self { rule, max_iters, ..Self::default() }
    }

    pub fn with_policy(mut self, policy: ErasedPolicy) -> Self {
        self.erased_policy = policy;
        self
    }

    pub fn with_early_stop(mut self, early_stop: bool) -> Self {
        self.early_stop = early_stop;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1"));
        }
        if self.rule.beta() == Some(0) {
            return Err(Error::InvalidConfig("beta must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DecodeStatus {
    Retrieved(Message),
    Ambiguous,
    Failed,
}

impl DecodeStatus {
    pub fn of(state: &ActivationState) -> Self {
        if state.any_empty() {
            DecodeStatus::Failed
        } else if state.all_singleton() {
            DecodeStatus::Retrieved(encode_singletons(state))
        } else {
            DecodeStatus::Ambiguous
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DecodeStatus::Retrieved(_) => "Retrieved",
            DecodeStatus::Ambiguous => "Ambiguous",
            DecodeStatus::Failed => "Failed",
        }
    }

    pub fn retrieved(&self) -> Option<&Message> {
        match self {
            DecodeStatus::Retrieved(m) => Some(m),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub final_state: ActivationState,
    pub status: DecodeStatus,
    pub iterations_used: usize,
    pub cycles: u64,
    /// Some serialized cluster held more than `beta` active neurons.
    pub beta_overflow: bool,
    /// Largest per-cluster active count after the first global iteration.
    pub max_active_after_first_iter: usize,
}

impl DecodeOutcome {
    /// Equality of everything except the cycle count.
    pub fn same_result(&self, other: &DecodeOutcome) -> bool {
        self.final_state == other.final_state
            && self.status == other.status
            && self.iterations_used == other.iterations_used
    }
}

/// Map a query onto initial activations. Known symbols activate one neuron,
/// erased clusters activate all of them, and partially known symbols activate
/// every neuron whose index agrees on the known bits (the maximum-score set,
/// score `kappa - n_e`).
pub fn local_decode(params: &NetworkParams, input: &PartialMessage) -> Result<ActivationState> {
    let c = params.clusters();
    let l = params.neurons();
    if input.entries().len() != c {
        return Err(Error::WrongArity { expected: c, found: input.entries().len() });
    }
    let kmask = (1usize << params.kappa()) - 1;
    let sets = input
        .entries()
        .iter()
        .enumerate()
        .map(|(cluster, entry)| match *entry {
            SubMessage::Known(symbol) if symbol < l => Ok(NeuronSet::singleton(l, symbol)),
            SubMessage::Known(symbol) => Err(Error::SymbolOutOfRange { cluster, symbol, neurons: l }),
            SubMessage::Erased => Ok(NeuronSet::full(l)),
            SubMessage::PartialBits { value, mask } => {
                let known = !mask & kmask;
                let set = NeuronSet::from_indices(l, (0..l).filter(|j| (j ^ value) & known == 0));
                if set.is_empty() {
                    Err(Error::InconsistentPartialBits { cluster })
                } else {
                    Ok(set)
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ActivationState::from_sets(sets))
}

/// Massively-parallel global decoding step.
pub fn gd_step_mpd(store: &LinkStore, state: &ActivationState) -> ActivationState {
    let c = store.params().clusters();
    let l = store.params().neurons();
    let sets = (0..c)
        .map(|a| {
            // signal for every neuron, active or not, then the memory effect
            let mut signal = NeuronSet::empty(l);
            for i in 0..l {
                let supported = (0..c)
                    .filter(|&b| b != a)
                    .all(|b| state.cluster(b).intersects(store.read_row_unchecked(a, i, b).words()));
                if supported {
                    signal.insert(i);
                }
            }
            signal.and_assign(state.cluster(a).words());
            signal
        })
        .collect();
    ActivationState::from_sets(sets)
}

/// Selective global decoding step.
pub fn gd_step_sd(store: &LinkStore, state: &ActivationState, policy: ErasedPolicy) -> ActivationState {
    selective_step(store, state, policy, |set| (set.iter().collect(), false)).0
}

/// Priority-encode a cluster's active neurons, highest index first, keeping
/// at most `beta` of them. The flag reports whether any were dropped.
pub fn spm_serialize(cluster_bits: &NeuronSet, beta: usize) -> (Vec<usize>, bool) {
    let mut pending = cluster_bits.clone();
    let mut order = Vec::with_capacity(beta.min(pending.count()));
    for _ in 0..beta {
        // clear each emitted bit so the encoder sees the next one
        match pending.highest() {
            Some(i) => {
                pending.remove(i);
                order.push(i);
            }
            None => break,
        }
    }
    (order, !pending.is_empty())
}

/// Selective step with at most `beta` serial row reads per contributing
/// cluster.
pub fn gd_step_bounded(
    store: &LinkStore,
    state: &ActivationState,
    beta: usize,
    policy: ErasedPolicy,
) -> (ActivationState, bool) {
    selective_step(store, state, policy, |set| spm_serialize(set, beta))
}

enum Contribution {
    AllOnes,
    Rows(Vec<usize>),
}

fn selective_step<F>(
    store: &LinkStore,
    state: &ActivationState,
    policy: ErasedPolicy,
    mut select: F,
) -> (ActivationState, bool)
where
    F: FnMut(&NeuronSet) -> (Vec<usize>, bool),
{
    let c = store.params().clusters();
    let l = store.params().neurons();
    let mut overflow = false;
    let contributions: Vec<Contribution> = state
        .clusters()
        .iter()
        .map(|set| {
            if policy == ErasedPolicy::SkipAsOnes && set.is_full() {
                Contribution::AllOnes
            } else {
                let (rows, dropped) = select(set);
                overflow |= dropped;
                Contribution::Rows(rows)
            }
        })
        .collect();

    let mut next = state.clone();
    for a in 0..c {
        for (b, contribution) in contributions.iter().enumerate() {
            if b == a || next.cluster(a).is_empty() {
                continue;
            }
            if let Contribution::Rows(rows) = contribution {
                let mut reached = NeuronSet::empty(l);
                for &j in rows {
                    reached.or_assign(store.read_row_unchecked(b, j, a).words());
                }
                next.cluster_mut(a).and_assign(reached.words());
            }
        }
    }
    (next, overflow)
}

/// Apply one global-decoding step of the configured rule.
pub fn gd_step(store: &LinkStore, state: &ActivationState, config: &DecodeConfig) -> (ActivationState, bool) {
    match config.rule {
        Rule::Mpd => (gd_step_mpd(store, state), false),
        Rule::Sd => (gd_step_sd(store, state, config.erased_policy), false),
        Rule::SdBounded { beta } => gd_step_bounded(store, state, beta, config.erased_policy),
    }
}

/// Full retrieval: local decoding followed by up to `max_iters` global steps.
pub fn decode(store: &LinkStore, input: &PartialMessage, config: &DecodeConfig) -> Result<DecodeOutcome> {
    config.validate()?;
    let mut state = local_decode(store.params(), input)?;
    let mut iterations_used = 0;
    let mut beta_overflow = false;
    let mut max_active_after_first_iter = 0;

    for iteration in 1..=config.max_iters {
        let (next, overflow) = gd_step(store, &state, config);
        beta_overflow |= overflow;
        iterations_used = iteration;
        if iteration == 1 {
            max_active_after_first_iter = next.max_active();
        }
        // activations only shrink, so comparing consecutive states suffices
        let settled = config.early_stop && (next.all_singleton() || next == state);
        state = next;
        if settled {
            break;
        }
    }

    Ok(DecodeOutcome {
        status: DecodeStatus::of(&state),
        final_state: state,
        iterations_used,
        cycles: hw::cycle_count(config, store.params().neurons(), iterations_used),
        beta_overflow,
        max_active_after_first_iter,
    })
}

/// The message spelled by a state whose every cluster has exactly one active
/// neuron.
pub fn encode_output(state: &ActivationState) -> Result<Message> {
    if let Some((cluster, set)) = state.clusters().iter().enumerate().find(|(_, s)| s.count() != 1) {
        return Err(Error::NotSingleton { cluster, active: set.count() });
    }
    Ok(encode_singletons(state))
}

fn encode_singletons(state: &ActivationState) -> Message {
    let l = state.cluster(0).width();
    let symbols = state.clusters().iter().map(|s| s.iter().next().expect("singleton cluster")).collect();
    let params = NetworkParams::new(state.num_clusters(), l).expect("state has valid geometry");
    Message::new(&params, symbols).expect("indices are below l")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(c: usize, l: usize, msgs: &[&[usize]]) -> (NetworkParams, LinkStore) {
        let p = NetworkParams::new(c, l).unwrap();
        let mut s = LinkStore::new(p);
        for m in msgs {
            s.store_message(&Message::new(&p, m.to_vec()).unwrap()).unwrap();
        }
        (p, s)
    }

    fn query(p: &NetworkParams, q: &[Option<usize>]) -> PartialMessage {
        let entries = q.iter().map(|e| e.map_or(SubMessage::Erased, SubMessage::Known)).collect();
        PartialMessage::new(p, entries).unwrap()
    }

    fn sets(state: &ActivationState) -> Vec<Vec<usize>> {
        state.clusters().iter().map(|s| s.iter().collect()).collect()
    }

    #[test]
    fn local_decode_known_and_erased() {
        let p = NetworkParams::new(4, 8).unwrap();
        let st = local_decode(&p, &query(&p, &[Some(3), None, Some(5), Some(0)])).unwrap();
        assert_eq!(sets(&st), vec![vec![3], (0..8).collect(), vec![5], vec![0]]);
    }

    #[test]
    fn local_decode_identity() {
        let p = NetworkParams::new(3, 16).unwrap();
        let m = Message::new(&p, vec![4, 15, 0]).unwrap();
        let st = local_decode(&p, &PartialMessage::from_message(&m)).unwrap();
        assert_eq!(encode_output(&st).unwrap(), m);
    }

    #[test]
    fn local_decode_partial_bits() {
        let p = NetworkParams::new(2, 16).unwrap();
        let q = PartialMessage::new(
            &p,
            vec![SubMessage::PartialBits { value: 0b1001, mask: 0b0100 }, SubMessage::Known(0)],
        )
        .unwrap();
        let st = local_decode(&p, &q).unwrap();
        assert_eq!(sets(&st)[0], vec![9, 13]);
    }

    #[test]
    fn local_decode_partial_bits_respects_l() {
        // l = 5: bit pattern 1?? only admits 4
        let p = NetworkParams::new(2, 5).unwrap();
        let q =
            PartialMessage::new(&p, vec![SubMessage::PartialBits { value: 0b100, mask: 0b011 }, SubMessage::Erased])
                .unwrap();
        assert_eq!(sets(&local_decode(&p, &q).unwrap())[0], vec![4]);
    }

    #[test]
    fn mpd_on_empty_store_clears_everything() {
        let (p, s) = setup(3, 4, &[]);
        let st = local_decode(&p, &query(&p, &[Some(1), None, Some(3)])).unwrap();
        let out = gd_step_mpd(&s, &st);
        assert!(out.clusters().iter().all(NeuronSet::is_empty));
        let out = gd_step_sd(&s, &st, ErasedPolicy::StrictOr);
        assert!(out.clusters().iter().all(NeuronSet::is_empty));
    }

    #[test]
    fn mpd_single_clique() {
        let (p, s) = setup(3, 4, &[&[1, 2, 3]]);
        let st = local_decode(&p, &query(&p, &[Some(1), None, Some(3)])).unwrap();
        let out = gd_step_mpd(&s, &st);
        assert_eq!(sets(&out), vec![vec![1], vec![2], vec![3]]);
        // a stored clique is a fixed point
        assert_eq!(gd_step_mpd(&s, &out), out);
    }

    #[test]
    fn sd_two_messages_keeps_both_candidates() {
        let (p, s) = setup(3, 4, &[&[1, 2, 3], &[1, 0, 3]]);
        let st = local_decode(&p, &query(&p, &[Some(1), None, Some(3)])).unwrap();
        for policy in [ErasedPolicy::StrictOr, ErasedPolicy::SkipAsOnes] {
            let out = gd_step_sd(&s, &st, policy);
            assert_eq!(sets(&out)[1], vec![0, 2]);
        }
        assert_eq!(gd_step_sd(&s, &st, ErasedPolicy::StrictOr), gd_step_mpd(&s, &st));
    }

    #[test]
    fn skip_and_strict_differ_without_known_support() {
        // every other cluster erased: skip lets unlinked neurons survive
        let (p, s) = setup(2, 4, &[&[1, 2]]);
        let st = local_decode(&p, &query(&p, &[None, None])).unwrap();
        let strict = gd_step_sd(&s, &st, ErasedPolicy::StrictOr);
        let skip = gd_step_sd(&s, &st, ErasedPolicy::SkipAsOnes);
        assert_eq!(sets(&strict), vec![vec![1], vec![2]]);
        assert_eq!(skip, st);

        // a partially known cluster is never bypassed
        let (p, s) = setup(3, 4, &[&[1, 2, 3]]);
        let q = PartialMessage::new(
            &p,
            vec![SubMessage::PartialBits { value: 0, mask: 0b01 }, SubMessage::Erased, SubMessage::Known(3)],
        )
        .unwrap();
        let st = local_decode(&p, &q).unwrap();
        assert_eq!(sets(&st)[0], vec![0, 1]);
        for policy in [ErasedPolicy::StrictOr, ErasedPolicy::SkipAsOnes] {
            assert_eq!(sets(&gd_step_sd(&s, &st, policy)), vec![vec![1], vec![2], vec![3]]);
        }
    }

    #[test]
    fn spm_examples() {
        let bits = NeuronSet::from_indices(16, [3, 9, 12]);
        assert_eq!(spm_serialize(&bits, 2), (vec![12, 9], true));
        assert_eq!(spm_serialize(&bits, 3), (vec![12, 9, 3], false));
        assert_eq!(spm_serialize(&NeuronSet::singleton(16, 5), 2), (vec![5], false));
        assert_eq!(spm_serialize(&NeuronSet::empty(16), 1), (vec![], false));
    }

    #[test]
    fn bounded_matches_sd_under_bound() {
        let (p, s) = setup(3, 4, &[&[1, 2, 3], &[1, 0, 3]]);
        let st = local_decode(&p, &query(&p, &[Some(1), None, Some(3)])).unwrap();
        let sd = gd_step_sd(&s, &st, ErasedPolicy::SkipAsOnes);
        let (b, overflow) = gd_step_bounded(&s, &sd, 2, ErasedPolicy::SkipAsOnes);
        assert!(!overflow);
        assert_eq!(b, gd_step_sd(&s, &sd, ErasedPolicy::SkipAsOnes));
        let (b, overflow) = gd_step_bounded(&s, &st, 4, ErasedPolicy::StrictOr);
        assert!(!overflow);
        assert_eq!(b, gd_step_sd(&s, &st, ErasedPolicy::StrictOr));
    }

    /// Brute-force a set of three stored messages that leaves three survivors
    /// in the erased cluster, then check the bounded step overflows and only
    /// loses activations relative to the unbounded one.
    #[test]
    fn bounded_overflow_found_by_search() {
        let p = NetworkParams::new(3, 4).unwrap();
        let all: Vec<Vec<usize>> = (0..64).map(|x| vec![x / 16, (x / 4) % 4, x % 4]).collect();
        let mut found = None;
        'search: for i in 0..64 {
            for j in i + 1..64 {
                for k in j + 1..64 {
                    let mut s = LinkStore::new(p);
                    for m in [&all[i], &all[j], &all[k]] {
                        s.store_message(&Message::new(&p, m.clone()).unwrap()).unwrap();
                    }
                    let q = query(&p, &[Some(all[i][0]), None, Some(all[i][2])]);
                    let st = local_decode(&p, &q).unwrap();
                    let first = gd_step_sd(&s, &st, ErasedPolicy::SkipAsOnes);
                    if first.cluster(1).count() == 3 {
                        found = Some((s, first));
                        break 'search;
                    }
                }
            }
        }
        let (s, first) = found.expect("a three-survivor configuration exists");
        let sd = gd_step_sd(&s, &first, ErasedPolicy::SkipAsOnes);
        let (bounded, overflow) = gd_step_bounded(&s, &first, 2, ErasedPolicy::SkipAsOnes);
        assert!(overflow);
        assert!(bounded.is_subset(&sd));
    }

    #[test]
    fn decode_single_clique_stops_after_one_iteration() {
        let (p, s) = setup(3, 4, &[&[1, 2, 3]]);
        let cfg = DecodeConfig::new(Rule::Sd, 4).with_early_stop(true);
        let out = decode(&s, &query(&p, &[Some(1), None, Some(3)]), &cfg).unwrap();
        assert_eq!(out.status, DecodeStatus::Retrieved(Message::new(&p, vec![1, 2, 3]).unwrap()));
        assert_eq!(out.iterations_used, 1);
        assert_eq!(out.max_active_after_first_iter, 1);
    }

    #[test]
    fn decode_known_message_is_identity() {
        let (p, s) = setup(4, 8, &[&[1, 2, 3, 4], &[7, 6, 5, 4]]);
        let m = Message::new(&p, vec![7, 6, 5, 4]).unwrap();
        for rule in [Rule::Mpd, Rule::Sd, Rule::SdBounded { beta: 1 }] {
            let out = decode(&s, &PartialMessage::from_message(&m), &DecodeConfig::new(rule, 4)).unwrap();
            assert_eq!(out.status, DecodeStatus::Retrieved(m.clone()));
        }
    }

    #[test]
    fn decode_ambiguous_pair() {
        let (p, s) = setup(3, 4, &[&[1, 2, 3], &[1, 2, 0]]);
        let q = query(&p, &[Some(1), Some(2), None]);
        for rule in [Rule::Mpd, Rule::Sd, Rule::SdBounded { beta: 2 }] {
            let out = decode(&s, &q, &DecodeConfig::new(rule, 4)).unwrap();
            assert_eq!(out.status, DecodeStatus::Ambiguous);
            assert_eq!(sets(&out.final_state)[2], vec![0, 3]);
            assert_eq!(out.iterations_used, 4);
        }
        let out = decode(&s, &q, &DecodeConfig::new(Rule::Sd, 4).with_early_stop(true)).unwrap();
        // iteration 2 repeats iteration 1
        assert_eq!(out.iterations_used, 2);
    }

    #[test]
    fn decode_failed_when_no_support() {
        let (p, s) = setup(3, 4, &[&[1, 2, 3]]);
        let out = decode(&s, &query(&p, &[Some(0), None, Some(3)]), &DecodeConfig::default()).unwrap();
        assert_eq!(out.status, DecodeStatus::Failed);
    }

    #[test]
    fn decode_two_clusters() {
        let (p, s) = setup(2, 4, &[&[1, 2], &[3, 0]]);
        let out = decode(&s, &query(&p, &[Some(3), None]), &DecodeConfig::default()).unwrap();
        assert_eq!(out.status.retrieved().unwrap().symbols(), &[3, 0]);
        let strict = DecodeConfig::default().with_policy(ErasedPolicy::StrictOr);
        let out = decode(&s, &query(&p, &[None, None]), &strict).unwrap();
        assert_eq!(out.status, DecodeStatus::Ambiguous);
        assert_eq!(sets(&out.final_state), vec![vec![1, 3], vec![0, 2]]);
        // bypassed erased clusters never prune each other
        let out = decode(&s, &query(&p, &[None, None]), &DecodeConfig::default()).unwrap();
        assert!(out.final_state.clusters().iter().all(NeuronSet::is_full));
    }

    #[test]
    fn decode_rejects_bad_config() {
        let (p, s) = setup(3, 4, &[&[1, 2, 3]]);
        let q = query(&p, &[Some(1), None, Some(3)]);
        assert!(matches!(decode(&s, &q, &DecodeConfig::new(Rule::Sd, 0)), Err(Error::InvalidConfig(_))));
        assert!(decode(&s, &q, &DecodeConfig::new(Rule::SdBounded { beta: 0 }, 4)).is_err());
    }

    #[test]
    fn encode_output_errors() {
        let p = NetworkParams::new(3, 4).unwrap();
        let ok = ActivationState::from_sets(vec![
            NeuronSet::singleton(4, 1),
            NeuronSet::singleton(4, 2),
            NeuronSet::singleton(4, 3),
        ]);
        assert_eq!(encode_output(&ok).unwrap(), Message::new(&p, vec![1, 2, 3]).unwrap());
        let mut empty = ok.clone();
        empty.cluster_mut(1).remove(2);
        assert!(matches!(encode_output(&empty), Err(Error::NotSingleton { cluster: 1, active: 0 })));
        let mut two = ok.clone();
        two.cluster_mut(2).insert(0);
        assert!(matches!(encode_output(&two), Err(Error::NotSingleton { cluster: 2, active: 2 })));
    }
}
