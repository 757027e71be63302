//! Network geometry, messages, activation state and the link store.
//!
//! Neurons are addressed as `(cluster, neuron)` throughout. The link store
//! keeps one `l x l` bit block per *ordered* pair of distinct clusters, so
//! every undirected link is held twice: `block(a,b)[r][t] == block(b,a)[t][r]`.

use std::fmt;
use std::ops::Index;

use crate::bits::{words_for, NeuronSet, RowView, WORD_BITS};
use crate::error::{Error, Result};

/// Cluster count `c`, neurons per cluster `l`, and sub-message width `kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NetworkParams {
    clusters: usize,
    neurons: usize,
    kappa: u32,
}

impl NetworkParams {
    pub fn new(clusters: usize, neurons: usize) -> Result<Self> {
        if clusters < 2 || neurons < 2 {
            return Err(Error::InvalidParams { clusters, neurons });
        }
        // smallest kappa with 2^kappa >= l
        let kappa = usize::BITS - (neurons - 1).leading_zeros();
        Ok(Self { clusters, neurons, kappa })
    }

    /// Number of clusters, `c`.
    pub fn clusters(&self) -> usize {
        self.clusters
    }

    /// Neurons per cluster, `l`.
    pub fn neurons(&self) -> usize {
        self.neurons
    }

    /// Bits per sub-message.
    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    /// `n = c * l`.
    pub fn total_neurons(&self) -> usize {
        self.clusters * self.neurons
    }

    /// `K = c * kappa`.
    pub fn message_bits(&self) -> usize {
        self.clusters * self.kappa as usize
    }

    fn kappa_mask(&self) -> usize {
        (1usize << self.kappa) - 1
    }
}

/// A complete message: one symbol in `[0, l)` per cluster.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Message {
    symbols: Vec<usize>,
}

impl Message {
    pub fn new(params: &NetworkParams, symbols: Vec<usize>) -> Result<Self> {
        if symbols.len() != params.clusters() {
            return Err(Error::WrongArity { expected: params.clusters(), found: symbols.len() });
        }
        if let Some((cluster, &symbol)) = symbols.iter().enumerate().find(|(_, &s)| s >= params.neurons()) {
            return Err(Error::SymbolOutOfRange { cluster, symbol, neurons: params.neurons() });
        }
        Ok(Self { symbols })
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

impl Index<usize> for Message {
    type Output = usize;

    fn index(&self, cluster: usize) -> &usize {
        &self.symbols[cluster]
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.symbols.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// One cluster's slice of a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubMessage {
    Known(usize),
    /// Whole sub-message erased; the erase flag is raised for this cluster.
    Erased,
    /// Some bits known. Bits set in `mask` are erased; `value` supplies the
    /// rest. Both fit in `kappa` bits.
    PartialBits {
        value: usize,
        mask: usize,
    },
}

impl SubMessage {
    /// Number of erased bits, `n_e`.
    pub fn erased_bits(&self, params: &NetworkParams) -> u32 {
        match *self {
            SubMessage::Known(_) => 0,
            SubMessage::Erased => params.kappa(),
            SubMessage::PartialBits { mask, .. } => mask.count_ones(),
        }
    }
}

/// A query: one [`SubMessage`] per cluster.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialMessage {
    entries: Vec<SubMessage>,
}

impl PartialMessage {
    pub fn new(params: &NetworkParams, entries: Vec<SubMessage>) -> Result<Self> {
        if entries.len() != params.clusters() {
            return Err(Error::WrongArity { expected: params.clusters(), found: entries.len() });
        }
        let kmask = params.kappa_mask();
        for (cluster, entry) in entries.iter().enumerate() {
            match *entry {
                SubMessage::Known(symbol) if symbol >= params.neurons() => {
                    return Err(Error::SymbolOutOfRange { cluster, symbol, neurons: params.neurons() })
                }
                SubMessage::PartialBits { value, mask } => {
                    if value & !kmask != 0 || mask & !kmask != 0 {
                        return Err(Error::InconsistentPartialBits { cluster });
                    }
                    // smallest consistent index has every erased bit cleared
                    if value & !mask >= params.neurons() {
                        return Err(Error::InconsistentPartialBits { cluster });
                    }
                }
                _ => {}
            }
        }
        Ok(Self { entries })
    }

    /// Query with no erasures.
    pub fn from_message(msg: &Message) -> Self {
        Self { entries: msg.symbols().iter().map(|&s| SubMessage::Known(s)).collect() }
    }

    /// Copy of `msg` with the listed clusters erased.
    pub fn with_erased(msg: &Message, erased: &[usize]) -> Self {
        let mut query = Self::from_message(msg);
        for &cluster in erased {
            query.entries[cluster] = SubMessage::Erased;
        }
        query
    }

    pub fn entries(&self) -> &[SubMessage] {
        &self.entries
    }

    pub fn erased_clusters(&self) -> usize {
        self.entries.iter().filter(|e| matches!(e, SubMessage::Erased)).count()
    }
}

impl fmt::Display for PartialMessage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match e {
                SubMessage::Known(s) => write!(f, "{s}")?,
                SubMessage::Erased => f.write_str("?")?,
                SubMessage::PartialBits { value, mask } => write!(f, "{value}/{mask:#b}")?,
            }
        }
        Ok(())
    }
}

/// Address of one neuron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NeuronId {
    pub cluster: usize,
    pub neuron: usize,
}

impl NeuronId {
    pub fn new(cluster: usize, neuron: usize) -> Self {
        Self { cluster, neuron }
    }
}

impl From<(usize, usize)> for NeuronId {
    fn from((cluster, neuron): (usize, usize)) -> Self {
        Self { cluster, neuron }
    }
}

/// Active neurons of every cluster.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActivationState {
    clusters: Vec<NeuronSet>,
}

impl ActivationState {
    pub fn empty(params: &NetworkParams) -> Self {
        Self { clusters: vec![NeuronSet::empty(params.neurons()); params.clusters()] }
    }

    /// Panics if the sets disagree in width or there are fewer than two.
    pub fn from_sets(clusters: Vec<NeuronSet>) -> Self {
        assert!(clusters.len() >= 2, "need at least two clusters");
        let width = clusters[0].width();
        assert!(clusters.iter().all(|s| s.width() == width));
        Self { clusters }
    }

    /// One-hot state of a full message.
    pub fn from_message(params: &NetworkParams, msg: &Message) -> Self {
        Self { clusters: msg.symbols().iter().map(|&s| NeuronSet::singleton(params.neurons(), s)).collect() }
    }

    pub fn cluster(&self, index: usize) -> &NeuronSet {
        &self.clusters[index]
    }

    pub fn cluster_mut(&mut self, index: usize) -> &mut NeuronSet {
        &mut self.clusters[index]
    }

    pub fn clusters(&self) -> &[NeuronSet] {
        &self.clusters
    }

    pub fn num_clusters(&self) -> usize {
        self.clusters.len()
    }

    pub fn total_active(&self) -> usize {
        self.clusters.iter().map(NeuronSet::count).sum()
    }

    /// Largest active count over all clusters.
    pub fn max_active(&self) -> usize {
        self.clusters.iter().map(NeuronSet::count).max().unwrap_or(0)
    }

    pub fn all_singleton(&self) -> bool {
        self.clusters.iter().all(|s| s.count() == 1)
    }

    pub fn any_empty(&self) -> bool {
        self.clusters.iter().any(NeuronSet::is_empty)
    }

    pub fn is_subset(&self, other: &ActivationState) -> bool {
        self.clusters.iter().zip(&other.clusters).all(|(a, b)| a.is_subset(b))
    }
}

/// Binary links between neurons of distinct clusters, laid out as `c(c-1)`
/// row-major `l x l` blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkStore {
    params: NetworkParams,
    words_per_row: usize,
    bits: Vec<u64>,
    stored_count: u64,
}

impl LinkStore {
    pub fn new(params: NetworkParams) -> Self {
        let c = params.clusters();
        let l = params.neurons();
        let words_per_row = words_for(l);
        Self { params, words_per_row, bits: vec![0; c * (c - 1) * l * words_per_row], stored_count: 0 }
    }

    /// Empty store for `c` clusters of `l` neurons.
    pub fn with_size(clusters: usize, neurons: usize) -> Result<Self> {
        NetworkParams::new(clusters, neurons).map(Self::new)
    }

    pub fn params(&self) -> &NetworkParams {
        &self.params
    }

    pub fn stored_count(&self) -> u64 {
        self.stored_count
    }

    pub(crate) fn set_stored_count(&mut self, count: u64) {
        self.stored_count = count;
    }

    pub fn num_blocks(&self) -> usize {
        let c = self.params.clusters();
        c * (c - 1)
    }

    /// Bytes held by the link payload.
    pub fn link_bytes(&self) -> usize {
        self.bits.len() * std::mem::size_of::<u64>()
    }

    /// Learn a message by connecting its neurons into a clique.
    pub fn store_message(&mut self, msg: &Message) -> Result<()> {
        let c = self.params.clusters();
        if msg.len() != c {
            return Err(Error::WrongArity { expected: c, found: msg.len() });
        }
        if let Some((cluster, &symbol)) = msg.symbols().iter().enumerate().find(|(_, &s)| s >= self.params.neurons()) {
            return Err(Error::SymbolOutOfRange { cluster, symbol, neurons: self.params.neurons() });
        }
        for a in 0..c {
            for b in (0..c).filter(|&b| b != a) {
                self.set_link(a, msg[a], b, msg[b]);
            }
        }
        self.stored_count += 1;
        Ok(())
    }

    pub fn store_all<'m>(&mut self, msgs: impl IntoIterator<Item = &'m Message>) -> Result<()> {
        msgs.into_iter().try_for_each(|m| self.store_message(m))
    }

    pub fn get_link(&self, src: impl Into<NeuronId>, dst: impl Into<NeuronId>) -> Result<bool> {
        let (src, dst) = (src.into(), dst.into());
        self.check_neuron(src)?;
        self.check_neuron(dst)?;
        if src.cluster == dst.cluster {
            return Err(Error::SameCluster(src.cluster));
        }
        Ok(self.read_row_unchecked(src.cluster, src.neuron, dst.cluster).contains(dst.neuron))
    }

    /// Row `src.neuron` of block `(src.cluster, dst_cluster)`: one RAM read.
    pub fn read_row(&self, src: impl Into<NeuronId>, dst_cluster: usize) -> Result<RowView<'_>> {
        let src = src.into();
        self.check_neuron(src)?;
        if dst_cluster >= self.params.clusters() {
            return Err(Error::IndexOutOfRange { cluster: dst_cluster, neuron: 0 });
        }
        if src.cluster == dst_cluster {
            return Err(Error::SameCluster(dst_cluster));
        }
        Ok(self.read_row_unchecked(src.cluster, src.neuron, dst_cluster))
    }

    /// Fraction of possible inter-cluster links that are set.
    pub fn density(&self) -> f64 {
        let set: u64 = self.bits.iter().map(|w| u64::from(w.count_ones())).sum();
        let l = self.params.neurons() as f64;
        set as f64 / (self.num_blocks() as f64 * l * l)
    }

    /// Verify `block(a,b)` is the transpose of `block(b,a)` for every pair.
    pub fn check_symmetry(&self) -> Result<()> {
        let c = self.params.clusters();
        let l = self.params.neurons();
        for a in 0..c {
            for b in a + 1..c {
                for r in 0..l {
                    let row = self.read_row_unchecked(a, r, b);
                    for t in 0..l {
                        if row.contains(t) != self.read_row_unchecked(b, t, a).contains(r) {
                            return Err(Error::SymmetryViolation { a, b });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn check_neuron(&self, id: NeuronId) -> Result<()> {
        if id.cluster >= self.params.clusters() || id.neuron >= self.params.neurons() {
            return Err(Error::IndexOutOfRange { cluster: id.cluster, neuron: id.neuron });
        }
        Ok(())
    }

    #[inline]
    fn block_index(&self, src: usize, dst: usize) -> usize {
        debug_assert_ne!(src, dst);
        src * (self.params.clusters() - 1) + dst - usize::from(dst > src)
    }

    #[inline]
    fn row_offset(&self, src: usize, row: usize, dst: usize) -> usize {
        (self.block_index(src, dst) * self.params.neurons() + row) * self.words_per_row
    }

    #[inline]
    pub(crate) fn read_row_unchecked(&self, src: usize, row: usize, dst: usize) -> RowView<'_> {
        let off = self.row_offset(src, row, dst);
        RowView::new(&self.bits[off..off + self.words_per_row], self.params.neurons())
    }

    pub(crate) fn row_words_mut(&mut self, src: usize, row: usize, dst: usize) -> &mut [u64] {
        let off = self.row_offset(src, row, dst);
        &mut self.bits[off..off + self.words_per_row]
    }

    fn set_link(&mut self, src: usize, row: usize, dst: usize, target: usize) {
        let off = self.row_offset(src, row, dst);
        self.bits[off + target / WORD_BITS] |= 1u64 << (target % WORD_BITS);
    }
}

/// Expected link density after `messages` uniform random messages:
/// `1 - (1 - 1/l^2)^messages`.
pub fn expected_density(neurons: usize, messages: u64) -> f64 {
    let l = neurons as f64;
    let miss = 1.0 - 1.0 / (l * l);
    1.0 - miss.powf(messages as f64)
}
