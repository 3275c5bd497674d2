//! Corpus token frequencies for SIF weighting, plus the dictionary-coverage
//! statistic.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::string::String;

use crate::error::{Error, Result};

/// Token counts over a corpus. Probabilities sum to 1 over known tokens;
/// unseen tokens get probability 0.
#[derive(Debug, Clone, Default)]
pub struct FrequencyTable {
    counts: BTreeMap<String, u64>,
    total: u64,
}

impl FrequencyTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_docs<'a, I>(docs: I) -> Self
    where
        I: IntoIterator<Item = &'a [String]>,
    {
        let mut table = FrequencyTable::new();
        for doc in docs {
            for token in doc {
                table.add(token);
            }
        }
        table
    }

    pub fn add(&mut self, token: &str) {
        *self.counts.entry(String::from(token)).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn count(&self, token: &str) -> u64 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn probability(&self, token: &str) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count(token) as f64 / self.total as f64
        }
    }

    /// Deterministic iteration (sorted by token).
    pub fn entries(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn from_entries<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, u64)>,
    {
        let mut counts = BTreeMap::new();
        let mut total = 0u64;
        for (token, count) in entries {
            if counts.insert(token, count).is_some() {
                return Err(Error::data("frequency table: duplicate token"));
            }
            total += count;
        }
        Ok(FrequencyTable { counts, total })
    }

    /// Merge counts from another shard; deterministic regardless of order.
    pub fn merge(&mut self, other: &FrequencyTable) {
        for (token, count) in &other.counts {
            *self.counts.entry(token.clone()).or_insert(0) += count;
        }
        self.total += other.total;
    }
}

/// Fraction of tokens with at least `min_chars` characters that are absent
/// from `dictionary`. Returns 0 when no token qualifies.
pub fn oov_rate(tokens: &[String], dictionary: &BTreeSet<String>, min_chars: usize) -> f64 {
    let mut eligible = 0usize;
    let mut missing = 0usize;
    for token in tokens {
        if token.chars().count() >= min_chars {
            eligible += 1;
            if !dictionary.contains(token) {
                missing += 1;
            }
        }
    }
    if eligible == 0 {
        0.0
    } else {
        missing as f64 / eligible as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec::Vec;

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn probabilities_sum_to_one_over_known_tokens() {
        let docs = [toks(&["a", "b", "a"]), toks(&["c"])];
        let table = FrequencyTable::from_docs(docs.iter().map(|d| d.as_slice()));
        let sum: f64 = ["a", "b", "c"].iter().map(|t| table.probability(t)).sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert_eq!(table.probability("zzz"), 0.0);
    }

    #[test]
    fn merge_equals_single_pass() {
        let d1 = toks(&["x", "y"]);
        let d2 = toks(&["y", "z", "z"]);
        let mut a = FrequencyTable::from_docs([d1.as_slice()]);
        let b = FrequencyTable::from_docs([d2.as_slice()]);
        a.merge(&b);
        let whole = FrequencyTable::from_docs([d1.as_slice(), d2.as_slice()]);
        assert_eq!(a.total(), whole.total());
        assert_eq!(a.count("y"), whole.count("y"));
    }

    #[test]
    fn oov_rate_extremes() {
        let dict: BTreeSet<String> = ["letter", "memo"].iter().map(|s| s.to_string()).collect();
        let all_known = toks(&["letter", "memo"]);
        assert_eq!(oov_rate(&all_known, &dict, 4), 0.0);
        let none_known = toks(&["zorbl", "fnord"]);
        assert_eq!(oov_rate(&none_known, &dict, 4), 1.0);
    }

    #[test]
    fn oov_rate_ignores_short_tokens() {
        let dict: BTreeSet<String> = BTreeSet::new();
        let tokens = toks(&["ab", "c", "longword"]);
        assert_eq!(oov_rate(&tokens, &dict, 4), 1.0);
        assert_eq!(oov_rate(&toks(&["ab"]), &dict, 4), 0.0);
    }
}
