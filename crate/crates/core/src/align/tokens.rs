//! Token-level edit-distance alignment of two transcripts.

use serde::{Deserialize, Serialize};

use crate::corpus::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignOp {
    Match,
    Substitute,
    /// Token present only in transcript A.
    InsertA,
    /// Token present only in transcript B.
    InsertB,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignedPair {
    pub a_idx: Option<usize>,
    pub b_idx: Option<usize>,
    pub op: AlignOp,
}

impl AlignedPair {
    pub fn cost(&self) -> usize {
        usize::from(self.op != AlignOp::Match)
    }
}

pub fn alignment_cost(pairs: &[AlignedPair]) -> usize {
    pairs.iter().map(AlignedPair::cost).sum()
}

/// Aligns two word lists on case-folded tokens.
pub fn align_tokens(words_a: &[Word], words_b: &[Word]) -> Vec<AlignedPair> {
    let a: Vec<String> = words_a.iter().map(|w| w.token.to_lowercase()).collect();
    let b: Vec<String> = words_b.iter().map(|w| w.token.to_lowercase()).collect();
    align_folded(&a, &b)
}

/// Same as [`align_tokens`] on bare strings.
pub fn align_strs<S: AsRef<str>>(a: &[S], b: &[S]) -> Vec<AlignedPair> {
    let a: Vec<String> = a.iter().map(|t| t.as_ref().to_lowercase()).collect();
    let b: Vec<String> = b.iter().map(|t| t.as_ref().to_lowercase()).collect();
    align_folded(&a, &b)
}

/// Minimal unit-cost alignment. A suffix-cost table is filled first; the walk
/// from the front then takes, at every cell, the first optimal move in the
/// order match, substitute, insert_a, insert_b.
fn align_folded(a: &[String], b: &[String]) -> Vec<AlignedPair> {
    let (n, m) = (a.len(), b.len());
    let width = m + 1;
    let mut cost = vec![0u32; (n + 1) * width];
    let at = |i: usize, j: usize| i * width + j;
    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            cost[at(i, j)] = if i == n {
                (m - j) as u32
            } else if j == m {
                (n - i) as u32
            } else {
                let diag = cost[at(i + 1, j + 1)] + u32::from(a[i] != b[j]);
                let down = cost[at(i + 1, j)] + 1;
                let right = cost[at(i, j + 1)] + 1;
                diag.min(down).min(right)
            };
        }
    }

    let mut pairs = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (0, 0);
    while i < n || j < m {
        let here = cost[at(i, j)];
        if i < n && j < m && cost[at(i + 1, j + 1)] + u32::from(a[i] != b[j]) == here {
            let op = if a[i] == b[j] {
                AlignOp::Match
            } else {
                AlignOp::Substitute
            };
            pairs.push(AlignedPair {
                a_idx: Some(i),
                b_idx: Some(j),
                op,
            });
            i += 1;
            j += 1;
        } else if i < n && cost[at(i + 1, j)] + 1 == here {
            pairs.push(AlignedPair {
                a_idx: Some(i),
                b_idx: None,
                op: AlignOp::InsertA,
            });
            i += 1;
        } else {
            pairs.push(AlignedPair {
                a_idx: None,
                b_idx: Some(j),
                op: AlignOp::InsertB,
            });
            j += 1;
        }
    }
    pairs
}
