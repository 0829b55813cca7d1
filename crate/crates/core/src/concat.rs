//! Two-level concatenation of entanglement-assisted codes.
//!
//! A code is summarized by its displacement statistics: how often the
//! decoded value lands k steps (mod d) from the target. The outer level's
//! displacement is undone when the inner level errs by the opposite amount.

use serde::{Deserialize, Serialize};

use crate::earac::{displacement_probability, probability_table, BellRacInstance, BipartiteStrategy};
use crate::error::{Error, Result};
use crate::tolerance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    d: usize,
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    /// `probs[k]` is the probability of decoding target + k (mod d).
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let d = probs.len();
        if d < 2 {
            return Err(Error::contract("need at least two displacements"));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < -tolerance::ALGEBRA) {
            return Err(Error::contract("displacement probabilities must be non-negative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > tolerance::ALGEBRA {
            return Err(Error::contract(format!(
                "displacement probabilities sum to {total}"
            )));
        }
        Ok(Self { d, probs })
    }

    /// All mass on displacement 0.
    pub fn perfect(d: usize) -> Result<Self> {
        let mut probs = vec![0.0; d];
        if let Some(p) = probs.first_mut() {
            *p = 1.0;
        }
        Self::new(probs)
    }

    pub fn uniform(d: usize) -> Result<Self> {
        Self::new(vec![1.0 / d as f64; d])
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn success(&self) -> f64 {
        self.probs[0]
    }
}

/// Σ_k outer[k] · inner[−k mod d].
pub fn concat_success(outer: &OutcomeDistribution, inner: &OutcomeDistribution) -> Result<f64> {
    if outer.d != inner.d {
        return Err(Error::contract(format!(
            "cannot concatenate d = {} with d = {}",
            outer.d, inner.d
        )));
    }
    let d = outer.d;
    Ok((0..d).map(|k| outer.probs[k] * inner.probs[(d - k) % d]).sum())
}

/// Displacement statistics of a strategy, averaged over all (x, y).
pub fn extract_outcome_distribution(
    s: &BipartiteStrategy,
    inst: &BellRacInstance,
) -> Result<OutcomeDistribution> {
    let table = probability_table(inst, s)?;
    let probs = (0..inst.outcomes())
        .map(|k| displacement_probability(inst, &table, k))
        .collect();
    OutcomeDistribution::new(probs)
}
