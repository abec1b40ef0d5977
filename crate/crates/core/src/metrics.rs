//! Vector error counts and loss scalarizers.
//!
//! A metric maps one (hypothesis, reference) pair to a vector of sufficient
//! statistics; corpus statistics are plain componentwise sums, and a
//! scalarizer turns the corpus sum into a loss where lower is better.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Floor applied to n-gram matches and totals before taking logs.
pub const BLEU_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VectorErrorCount(pub Vec<f64>);

impl VectorErrorCount {
    pub fn zeros(m: usize) -> Self {
        Self(vec![0.0; m])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn stats(&self) -> &[f64] {
        &self.0
    }
}

impl Add for &VectorErrorCount {
    type Output = VectorErrorCount;

    fn add(self, rhs: &VectorErrorCount) -> VectorErrorCount {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&VectorErrorCount> for VectorErrorCount {
    fn add_assign(&mut self, rhs: &VectorErrorCount) {
        assert_eq!(self.0.len(), rhs.0.len(), "error count dimensions differ");
        for (a, b) in self.0.iter_mut().zip(&rhs.0) {
            *a += b;
        }
    }
}

pub fn tokenize(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_string).collect()
}

/// `[0]` if the sequences are identical, `[1]` otherwise.
pub fn exact_match_delta<S: AsRef<str>>(hyp: &[S], reference: &[S]) -> VectorErrorCount {
    let same = hyp.len() == reference.len()
        && hyp.iter().zip(reference).all(|(a, b)| a.as_ref() == b.as_ref());
    VectorErrorCount(vec![if same { 0.0 } else { 1.0 }])
}

fn ngram_counts<S: AsRef<str>>(tokens: &[S], n: usize) -> HashMap<Vec<&str>, usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts
                .entry(w.iter().map(|t| t.as_ref()).collect())
                .or_insert(0) += 1;
        }
    }
    counts
}

/// BLEU sufficient statistics against a single reference:
/// `[match_1..match_N, total_1..total_N, hyp_len, ref_len]`.
pub fn bleu_stats<S: AsRef<str>>(hyp: &[S], reference: &[S], max_n: usize) -> VectorErrorCount {
    let mut stats = vec![0.0; 2 * max_n + 2];
    for n in 1..=max_n {
        let hyp_counts = ngram_counts(hyp, n);
        let ref_counts = ngram_counts(reference, n);
        let matched: usize = hyp_counts
            .iter()
            .map(|(g, c)| (*c).min(ref_counts.get(g).copied().unwrap_or(0)))
            .sum();
        stats[n - 1] = matched as f64;
        stats[max_n + n - 1] = hyp.len().saturating_sub(n - 1) as f64;
    }
    stats[2 * max_n] = hyp.len() as f64;
    stats[2 * max_n + 1] = reference.len() as f64;
    VectorErrorCount(stats)
}

/// `1 - BLEU` of aggregated [`bleu_stats`], in `[0, 1]`.
pub fn bleu_loss(stats: &VectorErrorCount) -> f64 {
    let s = stats.stats();
    assert!(s.len() >= 4 && s.len().is_multiple_of(2), "not a BLEU statistics vector");
    let max_n = (s.len() - 2) / 2;
    let log_precision: f64 = (0..max_n)
        .map(|i| (s[i].max(BLEU_FLOOR) / s[max_n + i].max(BLEU_FLOOR)).ln())
        .sum::<f64>()
        / max_n as f64;
    let (hyp_len, ref_len) = (s[2 * max_n], s[2 * max_n + 1]);
    let brevity = if hyp_len < ref_len {
        (1.0 - ref_len / hyp_len.max(BLEU_FLOOR)).exp()
    } else {
        1.0
    };
    (1.0 - brevity * log_precision.exp()).clamp(0.0, 1.0)
}

/// Error count function selected for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Exact,
    Bleu,
}

impl Metric {
    pub const BLEU_ORDER: usize = 4;

    pub fn dim(&self) -> usize {
        match self {
            Metric::Exact => 1,
            Metric::Bleu => 2 * Self::BLEU_ORDER + 2,
        }
    }

    pub fn delta<S: AsRef<str>>(&self, hyp: &[S], reference: &[S]) -> VectorErrorCount {
        match self {
            Metric::Exact => exact_match_delta(hyp, reference),
            Metric::Bleu => bleu_stats(hyp, reference, Self::BLEU_ORDER),
        }
    }

    pub fn default_scalarizer(&self) -> Scalarizer {
        match self {
            Metric::Exact => Scalarizer::Sum,
            Metric::Bleu => Scalarizer::Bleu,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Exact => "exact",
            Metric::Bleu => "bleu",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Metric::Exact),
            "bleu" => Ok(Metric::Bleu),
            other => Err(Error::InvalidArgument(format!("unknown metric {other:?}"))),
        }
    }
}

/// Loss `L: ℝᵐ → ℝ`, lower is better.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scalarizer {
    /// Sum of components; the identity for one-dimensional counts.
    Sum,
    /// `1 - BLEU`.
    Bleu,
}

impl Scalarizer {
    pub fn loss(&self, count: &VectorErrorCount) -> f64 {
        match self {
            Scalarizer::Sum => count.stats().iter().sum(),
            Scalarizer::Bleu => bleu_loss(count),
        }
    }

    pub fn compatible_with(&self, metric: Metric) -> bool {
        !matches!((self, metric), (Scalarizer::Bleu, Metric::Exact))
    }
}

impl FromStr for Scalarizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(Scalarizer::Sum),
            "bleu" => Ok(Scalarizer::Bleu),
            other => Err(Error::InvalidArgument(format!("unknown scalarizer {other:?}"))),
        }
    }
}
