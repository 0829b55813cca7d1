use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An n^(d)→1 random access code: n dits of alphabet d squeezed into one
/// d-level message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Scenario {
    pub n: usize,
    pub d: usize,
}

impl Scenario {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if n < 1 || d < 2 {
            return Err(Error::contract(format!(
                "scenario needs n >= 1 and d >= 2, got ({n}, {d})"
            )));
        }
        // Keep d^n representable with room to spare.
        if (n as u32) > 40 || d > 1 << 16 || (d as u128).checked_pow(n as u32).map_or(true, |v| v > 1 << 40) {
            return Err(Error::contract(format!("scenario ({n}, {d}) is too large")));
        }
        Ok(Self { n, d })
    }

    /// d^n, the number of data strings.
    pub fn strings(&self) -> usize {
        self.d.pow(self.n as u32)
    }

    /// Digits x_0..x_{n−1} of data string `index`, x_0 most significant.
    pub fn digits(&self, index: usize) -> Vec<usize> {
        digits(index, self.n, self.d)
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.n, self.d)
    }
}

/// Base-`d` digits of `index`, `len` of them, most significant first.
pub fn digits(mut index: usize, len: usize, d: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = index % d;
        index /= d;
    }
    out
}
