//! Words and word-count histograms.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sfa::igb::BinningModel;

/// A fixed-length symbol sequence with the source dimension attached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    pub dimension: usize,
    pub symbols: Vec<u8>,
}

impl Word {
    /// Injective base-`alphabet_size` integer encoding, dimension-prefixed.
    pub fn encode(&self, alphabet_size: usize) -> u64 {
        let mut code = self.dimension as u64;
        for &s in &self.symbols {
            code = code * alphabet_size as u64 + s as u64;
        }
        code
    }

    pub fn decode(code: u64, alphabet_size: usize, word_length: usize) -> Self {
        let base = alphabet_size as u64;
        let mut rest = code;
        let mut symbols = vec![0u8; word_length];
        for slot in (0..word_length).rev() {
            symbols[slot] = (rest % base) as u8;
            rest /= base;
        }
        Word {
            dimension: rest as usize,
            symbols,
        }
    }
}

/// Maps each coefficient to its symbol, one per binning-model column.
pub fn symbolize(coeffs: &[f64], model: &BinningModel) -> Word {
    let symbols = coeffs
        .iter()
        .enumerate()
        .map(|(row, &v)| model.symbol_for(row, v) as u8)
        .collect();
    Word {
        dimension: 0,
        symbols,
    }
}

/// Sparse map from encoded word to a strictly positive count.
///
/// Backed by an ordered map so that iteration and serialization are
/// deterministic. The JSON layout is `{"counts": {"<encoded word>": n}}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordHistogram {
    counts: BTreeMap<u64, u32>,
}

impl WordHistogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, code: u64) {
        *self.counts.entry(code).or_insert(0) += 1;
    }

    pub fn count(&self, code: u64) -> u32 {
        self.counts.get(&code).copied().unwrap_or(0)
    }

    /// Number of distinct words.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Total count over all words.
    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| c as u64).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.counts.iter().map(|(&w, &c)| (w, c))
    }

    /// Histogram intersection: sum over words of the smaller count.
    pub fn intersection(&self, other: &WordHistogram) -> u64 {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .counts
            .iter()
            .map(|(word, &count)| count.min(large.count(*word)) as u64)
            .sum()
    }

    /// Symmetric squared count difference over the union of words.
    pub fn squared_difference(&self, other: &WordHistogram) -> u64 {
        let mut total = 0u64;
        for (word, &count) in &self.counts {
            let d = count as i64 - other.count(*word) as i64;
            total += (d * d) as u64;
        }
        for (word, &count) in &other.counts {
            if !self.counts.contains_key(word) {
                total += (count as u64) * (count as u64);
            }
        }
        total
    }
}

/// Checks that dimension-prefixed word codes cannot collide in a `u64`.
pub(crate) fn check_encoding_capacity(
    alphabet_size: usize,
    word_length: usize,
    dimensions: usize,
) -> Result<()> {
    let span = (alphabet_size as u128).pow(word_length as u32);
    if span.saturating_mul(dimensions as u128) > u64::MAX as u128 {
        return Err(Error::InvalidParams(format!(
            "alphabet {alphabet_size} with word length {word_length} and {dimensions} dimensions overflows the word encoding"
        )));
    }
    Ok(())
}
