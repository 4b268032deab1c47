use serde::Serialize;

use crate::error::{Error, Result};

/// Which side of `p = 1` an exponent lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `p > 1`: Hardy / weighted-mean upper bounds.
    Forward,
    /// `0 < p < 1`: Copson-type lower bounds.
    Reverse,
    /// `p < 0`.
    Negative,
}

/// Returns `q = p / (p - 1)`.
pub fn conjugate_exponent(p: f64) -> Result<f64> {
    if !p.is_finite() || p == 0.0 || p == 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    Ok(p / (p - 1.0))
}

/// A Hölder pair `(p, q)` with `1/p + 1/q = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentPair {
    p: f64,
    q: f64,
}

impl ExponentPair {
    pub fn new(p: f64) -> Result<Self> {
        let q = conjugate_exponent(p)?;
        Ok(Self { p, q })
    }

    /// Requires `p > 1`.
    pub fn forward(p: f64) -> Result<Self> {
        if !(p > 1.0) {
            return Err(Error::InvalidExponent(p));
        }
        Self::new(p)
    }

    /// Requires `0 < p < 1`.
    pub fn reverse(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidExponent(p));
        }
        Self::new(p)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn inv_p(&self) -> f64 {
        1.0 / self.p
    }

    /// `1/q`, evaluated as `1 - 1/p`.
    pub fn inv_q(&self) -> f64 {
        1.0 - 1.0 / self.p
    }

    pub fn regime(&self) -> Regime {
        if self.p > 1.0 {
            Regime::Forward
        } else if self.p > 0.0 {
            Regime::Reverse
        } else {
            Regime::Negative
        }
    }
}
