//! Fixed-width bit sets packed into 64-bit words.
//!
//! A [`NeuronSet`] holds the active neurons of one cluster; a [`RowView`] is a
//! borrowed row of a link block. Both keep every bit at or above `len` clear.

use std::fmt;

pub(crate) const WORD_BITS: usize = u64::BITS as usize;

#[inline]
pub(crate) fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

#[inline]
fn location(bit: usize) -> (usize, u64) {
    (bit / WORD_BITS, 1u64 << (bit % WORD_BITS))
}

/// Mask of the valid bits in the last word of a `len`-bit set.
#[inline]
fn tail_mask(len: usize) -> u64 {
    match len % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// Set of neuron indices in `[0, len)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NeuronSet {
    words: Vec<u64>,
    len: usize,
}

impl NeuronSet {
    pub fn empty(len: usize) -> Self {
        Self { words: vec![0; words_for(len)], len }
    }

    pub fn full(len: usize) -> Self {
        let mut words = vec![u64::MAX; words_for(len)];
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        Self { words, len }
    }

    pub fn singleton(len: usize, index: usize) -> Self {
        let mut set = Self::empty(len);
        set.insert(index);
        set
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::empty(len);
        for i in indices {
            set.insert(i);
        }
        set
    }

    pub(crate) fn from_words(len: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), words_for(len));
        debug_assert!(words.last().is_none_or(|w| w & !tail_mask(len) == 0));
        Self { words, len }
    }

    /// Width of the set (l), not the number of members.
    pub fn width(&self) -> usize {
        self.len
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn contains(&self, bit: usize) -> bool {
        assert!(bit < self.len, "bit {bit} out of range for width {}", self.len);
        let (i, mask) = location(bit);
        self.words[i] & mask != 0
    }

    pub fn insert(&mut self, bit: usize) -> bool {
        assert!(bit < self.len, "bit {bit} out of range for width {}", self.len);
        let (i, mask) = location(bit);
        let old = self.words[i];
        self.words[i] |= mask;
        old & mask == 0
    }

    pub fn remove(&mut self, bit: usize) -> bool {
        assert!(bit < self.len, "bit {bit} out of range for width {}", self.len);
        let (i, mask) = location(bit);
        let old = self.words[i];
        self.words[i] &= !mask;
        old & mask != 0
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len
    }

    pub fn is_subset(&self, other: &NeuronSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &[u64]) -> bool {
        self.words.iter().zip(other).any(|(a, b)| a & b != 0)
    }

    pub fn and_assign(&mut self, other: &[u64]) {
        for (a, b) in self.words.iter_mut().zip(other) {
            *a &= b;
        }
    }

    pub fn or_assign(&mut self, other: &[u64]) {
        for (a, b) in self.words.iter_mut().zip(other) {
            *a |= b;
        }
    }

    /// Highest set index, i.e. what a priority encoder scanning from the MSB
    /// would emit.
    pub fn highest(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * WORD_BITS + (WORD_BITS - 1 - w.leading_zeros() as usize))
    }

    /// Ascending iteration over member indices.
    pub fn iter(&self) -> Ones<'_> {
        Ones::new(&self.words)
    }
}

impl fmt::Debug for NeuronSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Borrowed l-bit row of a link block: the result of one RAM read.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct RowView<'a> {
    words: &'a [u64],
    len: usize,
}

impl<'a> RowView<'a> {
    pub(crate) fn new(words: &'a [u64], len: usize) -> Self {
        Self { words, len }
    }

    pub fn width(&self) -> usize {
        self.len
    }

    pub fn words(&self) -> &'a [u64] {
        self.words
    }

    pub fn contains(&self, bit: usize) -> bool {
        assert!(bit < self.len);
        let (i, mask) = location(bit);
        self.words[i] & mask != 0
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> Ones<'a> {
        Ones::new(self.words)
    }

    pub fn to_set(&self) -> NeuronSet {
        NeuronSet::from_words(self.len, self.words.to_vec())
    }
}

impl fmt::Debug for RowView<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Iterator over set bit positions, lowest first.
pub struct Ones<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl<'a> Ones<'a> {
    fn new(words: &'a [u64]) -> Self {
        Self { words, index: 0, current: words.first().copied().unwrap_or(0) }
    }
}

impl Iterator for Ones<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.current == 0 {
            self.index += 1;
            if self.index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.index];
        }
        let bit = self.current.trailing_zeros() as usize;
        self.current &= self.current - 1;
        Some(self.index * WORD_BITS + bit)
    }
}
