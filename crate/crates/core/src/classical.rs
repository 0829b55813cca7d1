//! Exact classical bounds by enumeration of deterministic strategies.
//!
//! Shared randomness is a convex mixture of deterministic strategies, so the
//! deterministic optimum is the classical optimum. Decoder tuples are
//! enumerated explicitly; given the decoders, the best message for each data
//! string is chosen independently.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::Scenario;

/// Exact success probability.
pub type Rational = Ratio<u64>;

/// Refuse enumerations estimated above this many inner evaluations.
pub const WORK_CAP: u128 = 5_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalStrategy {
    /// Message sent for each data string, indexed as in [`Scenario::digits`].
    pub encoder: Vec<usize>,
    /// `decoders[y][m]` is Bob's guess for x_y on message m.
    pub decoders: Vec<Vec<usize>>,
}

impl ClassicalStrategy {
    pub fn validate(&self, s: Scenario) -> Result<()> {
        let d = s.d;
        if self.encoder.len() != s.strings() || self.encoder.iter().any(|&m| m >= d) {
            return Err(Error::contract("encoder must map every data string to a message < d"));
        }
        if self.decoders.len() != s.n
            || self
                .decoders
                .iter()
                .any(|dec| dec.len() != d || dec.iter().any(|&g| g >= d))
        {
            return Err(Error::contract("need n decoders, each mapping d messages to guesses < d"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalOptimum {
    pub value: Rational,
    pub witness: ClassicalStrategy,
}

/// Number of (x̄, y) pairs decoded correctly.
fn correct_count(s: &ClassicalStrategy, sc: Scenario) -> u64 {
    let mut count = 0;
    for (idx, &m) in s.encoder.iter().enumerate() {
        for (y, &x_y) in sc.digits(idx).iter().enumerate() {
            if s.decoders[y][m] == x_y {
                count += 1;
            }
        }
    }
    count
}

fn denominator(sc: Scenario) -> u64 {
    (sc.n * sc.strings()) as u64
}

/// Exact average success probability of a deterministic strategy.
pub fn classical_value(s: &ClassicalStrategy, sc: Scenario) -> Result<Rational> {
    s.validate(sc)?;
    Ok(Rational::new(correct_count(s, sc), denominator(sc)))
}

/// (d + 1)/(2d).
pub fn classical_analytic_n2(d: usize) -> Result<Rational> {
    if d < 2 {
        return Err(Error::contract(format!("need d >= 2, got {d}")));
    }
    Ok(Rational::new(d as u64 + 1, 2 * d as u64))
}

/// Number of non-decreasing maps {0..d−1} → {0..d−1}: C(2d−1, d).
fn sorted_decoder_count(d: usize) -> u128 {
    let (n, k) = (2 * d as u128 - 1, d as u128);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Estimated inner evaluations: decoder tuples × data strings × messages × n.
pub fn work_estimate(sc: Scenario) -> u128 {
    let d = sc.d as u128;
    let free = d.saturating_pow((sc.d * (sc.n - 1)) as u32);
    sorted_decoder_count(sc.d)
        .saturating_mul(free)
        .saturating_mul(d.saturating_pow(sc.n as u32))
        .saturating_mul(d)
        .saturating_mul(sc.n as u128)
}

/// Exact classical optimum over deterministic strategies.
///
/// Relabeling messages jointly in all decoders (and the encoder) leaves the
/// value unchanged, so decoder 0 is restricted to non-decreasing maps; every
/// orbit contains such a tuple. Ties resolve to the lexicographically
/// smallest decoder tuple, then the smallest message per data string.
pub fn classical_optimum(sc: Scenario) -> Result<ClassicalOptimum> {
    let estimate = work_estimate(sc);
    if estimate > WORK_CAP {
        return Err(Error::TooLarge {
            estimate,
            cap: WORK_CAP,
        });
    }
    let d = sc.d;
    let strings: Vec<Vec<usize>> = (0..sc.strings()).map(|i| sc.digits(i)).collect();
    let firsts = sorted_maps(d);
    let rest_count = d.pow((d * (sc.n - 1)) as u32);

    // Each worker owns one sorted decoder 0 and scans all remaining decoders.
    let best = firsts
        .par_iter()
        .enumerate()
        .map(|(fi, first)| {
            let mut decoders = vec![first.clone(); sc.n];
            let mut best: Option<(u64, usize)> = None;
            for r in 0..rest_count {
                fill_rest(&mut decoders, r, d);
                let c = best_count(&decoders, &strings, d);
                if best.map_or(true, |(bc, _)| c > bc) {
                    best = Some((c, r));
                }
            }
            let (c, r) = best.expect("at least one decoder tuple");
            (c, fi, r)
        })
        .reduce_with(|a, b| {
            // Larger count wins; ties go to the smaller (first, rest) index.
            if b.0 > a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) {
                b
            } else {
                a
            }
        })
        .expect("non-empty enumeration");

    let (count, fi, r) = best;
    let mut decoders = vec![firsts[fi].clone(); sc.n];
    fill_rest(&mut decoders, r, d);
    let encoder = strings
        .iter()
        .map(|x| best_message(&decoders, x, d).0)
        .collect();
    let witness = ClassicalStrategy { encoder, decoders };
    debug_assert_eq!(correct_count(&witness, sc), count);
    Ok(ClassicalOptimum {
        value: Rational::new(count, denominator(sc)),
        witness,
    })
}

/// All non-decreasing maps {0..d−1} → {0..d−1} in lexicographic order.
fn sorted_maps(d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; d];
    fn rec(pos: usize, lo: usize, d: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == d {
            out.push(cur.clone());
            return;
        }
        for v in lo..d {
            cur[pos] = v;
            rec(pos + 1, v, d, cur, out);
        }
    }
    rec(0, 0, d, &mut cur, &mut out);
    out
}

/// Decoders 1..n from index `r` in base d, decoder 1 message 0 most
/// significant.
fn fill_rest(decoders: &mut [Vec<usize>], mut r: usize, d: usize) {
    for dec in decoders[1..].iter_mut().rev() {
        for slot in dec.iter_mut().rev() {
            *slot = r % d;
            r /= d;
        }
    }
}

fn best_message(decoders: &[Vec<usize>], x: &[usize], d: usize) -> (usize, u64) {
    let hits = |m: usize| decoders.iter().zip(x).filter(|(dec, &xy)| dec[m] == xy).count() as u64;
    let mut best = (0, hits(0));
    for m in 1..d {
        let h = hits(m);
        if h > best.1 {
            best = (m, h);
        }
    }
    best
}

fn best_count(decoders: &[Vec<usize>], strings: &[Vec<usize>], d: usize) -> u64 {
    strings
        .iter()
        .map(|x| best_message(decoders, x, d).1)
        .sum()
}
