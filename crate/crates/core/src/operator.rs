//! Truncated weighted-mean and tail-average operators, ℓ^p norm ratios and
//! extremal searches over parameterized input families.
//!
//! For `p > 1` a ratio is a lower bound on the operator norm; for the tail
//! operator with `0 < p < 1` it is an upper bound on the best reverse
//! constant. Ratios are reported in the p-th-root convention
//! `(Σ (op a)_n^p / Σ a_n^p)^{1/p}`; the bare power-sum ratio is available
//! separately since the reverse constants are stated for it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sum::{prefix_sums, suffix_sums, NeumaierSum};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorKind {
    /// `A_n = Σ_{i<=n} i^{α-1} a_i / Σ_{i<=n} i^{α-1}`; `α = 1` is Cesàro.
    WeightedMean { alpha: f64 },
    /// `T_n = (1/n) Σ_{k>=n} a_k`.
    CopsonTail,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    pub truncation: usize,
    /// Add analytic tails beyond the truncation for power-decay inputs.
    pub tail_correction: bool,
}

impl OperatorSpec {
    pub fn weighted_mean(alpha: f64, truncation: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::OutOfDomain(format!("alpha must be positive, got {alpha}")));
        }
        Self::new(OperatorKind::WeightedMean { alpha }, truncation)
    }

    pub fn cesaro(truncation: usize) -> Result<Self> {
        Self::weighted_mean(1.0, truncation)
    }

    pub fn copson_tail(truncation: usize) -> Result<Self> {
        Self::new(OperatorKind::CopsonTail, truncation)
    }

    fn new(kind: OperatorKind, truncation: usize) -> Result<Self> {
        if truncation == 0 {
            return Err(Error::OutOfDomain("truncation must be at least 1".into()));
        }
        Ok(Self {
            kind,
            truncation,
            tail_correction: false,
        })
    }

    pub fn with_tail_correction(mut self, on: bool) -> Self {
        self.tail_correction = on;
        self
    }

    pub fn apply(&self, a: &[f64]) -> Result<Vec<f64>> {
        match self.kind {
            OperatorKind::WeightedMean { alpha } => apply_weighted_mean(alpha, a, self.truncation),
            OperatorKind::CopsonTail => apply_copson_tail(a, self.truncation),
        }
    }
}

fn check_input(a: &[f64], n: usize) -> Result<()> {
    if a.len() < n {
        return Err(Error::IndexOutOfRange { index: n, len: a.len() });
    }
    if let Some(i) = a[..n].iter().position(|&x| !(x >= 0.0 && x.is_finite())) {
        return Err(Error::NonpositiveWeight {
            sequence: "a",
            index: i + 1,
        });
    }
    Ok(())
}

/// `A_n` for `1 <= n <= N`.
pub fn apply_weighted_mean(alpha: f64, a: &[f64], n: usize) -> Result<Vec<f64>> {
    check_input(a, n)?;
    let weights: Vec<f64> = (1..=n).map(|i| (i as f64).powf(alpha - 1.0)).collect();
    let terms: Vec<f64> = weights.iter().zip(a).map(|(w, x)| w * x).collect();
    let num = prefix_sums(&terms);
    let den = prefix_sums(&weights);
    Ok(num.iter().zip(&den).map(|(s, l)| s / l).collect())
}

/// `T_n = (1/n) Σ_{k=n}^{N} a_k` for `1 <= n <= N`, treating `a_k = 0` past `N`.
pub fn apply_copson_tail(a: &[f64], n: usize) -> Result<Vec<f64>> {
    check_input(a, n)?;
    Ok(suffix_sums(&a[..n])
        .iter()
        .enumerate()
        .map(|(i, s)| s / (i + 1) as f64)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    /// `a_k = k^{-s}`.
    PowerDecay { s: f64 },
    /// `a = (1, 0, 0, ...)`.
    Delta,
    /// `a_k = r^{k-1}`.
    Geometric { r: f64 },
    /// `a_k = u_k k^{-σ}` with `u_k` uniform on `[0, 1)` and `σ` uniform on
    /// `[0, 3)`, both drawn from the seed.
    Random { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SequenceFamily {
    pub kind: FamilyKind,
    pub length: usize,
}

impl SequenceFamily {
    pub fn new(kind: FamilyKind, length: usize) -> Result<Self> {
        match kind {
            FamilyKind::PowerDecay { s } if !s.is_finite() => {
                return Err(Error::OutOfDomain(format!("decay exponent must be finite, got {s}")))
            }
            FamilyKind::Geometric { r } if !(r > 0.0 && r.is_finite()) => {
                return Err(Error::OutOfDomain(format!("ratio must be positive, got {r}")))
            }
            _ => {}
        }
        Ok(Self { kind, length })
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.length;
        match self.kind {
            FamilyKind::PowerDecay { s } => (1..=n).map(|k| (k as f64).powf(-s)).collect(),
            FamilyKind::Delta => (0..n).map(|k| if k == 0 { 1.0 } else { 0.0 }).collect(),
            FamilyKind::Geometric { r } => (0..n).map(|k| r.powi(k as i32)).collect(),
            FamilyKind::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let sigma: f64 = rng.gen_range(0.0..3.0);
                (1..=n)
                    .map(|k| rng.gen::<f64>() * (k as f64).powf(-sigma))
                    .collect()
            }
        }
    }
}

/// Both sums of a norm ratio, plus an optional extension to the infinite
/// sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormRatio {
    pub p: f64,
    /// `Σ_{n<=N} (op a)_n^p` on the truncated input.
    pub numerator: f64,
    /// `Σ_{n<=N} a_n^p`.
    pub denominator: f64,
    pub tail: Option<TailEstimate>,
}

/// Power-sum ratio of the untruncated input: a point estimate for the
/// weighted mean, a rigorous bracket for the tail operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailEstimate {
    pub lower: f64,
    pub upper: f64,
}

impl NormRatio {
    pub fn power_sum_ratio(&self) -> f64 {
        self.numerator / self.denominator
    }

    /// `(Σ (op a)^p / Σ a^p)^{1/p}` on the truncation.
    pub fn ratio(&self) -> f64 {
        self.power_sum_ratio().powf(1.0 / self.p)
    }

    /// The tail-corrected ratio bracket in the p-th-root convention.
    pub fn corrected_ratio(&self) -> Option<(f64, f64)> {
        self.tail
            .map(|t| (t.lower.powf(1.0 / self.p), t.upper.powf(1.0 / self.p)))
    }

    /// The figure used to rank families: the corrected estimate for the
    /// weighted mean when available, the exact truncated instance otherwise.
    pub fn score(&self, kind: OperatorKind) -> f64 {
        match (kind, self.corrected_ratio()) {
            (OperatorKind::WeightedMean { .. }, Some((lo, _))) => lo,
            _ => self.ratio(),
        }
    }
}

fn power_sum(values: &[f64], p: f64) -> f64 {
    let mut acc = NeumaierSum::new();
    for &v in values {
        if v > 0.0 {
            acc.add((p * v.ln()).exp());
        }
    }
    acc.value()
}

/// `(Σ (op a)_n^p / Σ a_n^p)^{1/p}` over the truncation, with the analytic
/// tail when `op` asks for it and the family supports it.
pub fn norm_ratio(op: &OperatorSpec, family: &SequenceFamily, p: f64) -> Result<NormRatio> {
    let a = family.values();
    let mut r = norm_ratio_values(op, &a, p)?;
    if op.tail_correction {
        if let FamilyKind::PowerDecay { s } = family.kind {
            r.tail = tail_estimate(op, s, p, &r);
        }
    }
    Ok(r)
}

/// Norm ratio of an explicit input, without tail correction.
pub fn norm_ratio_values(op: &OperatorSpec, a: &[f64], p: f64) -> Result<NormRatio> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    let out = op.apply(a)?;
    let n = op.truncation;
    let denominator = power_sum(&a[..n], p);
    if denominator == 0.0 {
        return Err(Error::UndefinedRatio);
    }
    Ok(NormRatio {
        p,
        numerator: power_sum(&out, p),
        denominator,
        tail: None,
    })
}

fn tail_estimate(op: &OperatorSpec, s: f64, p: f64, r: &NormRatio) -> Option<TailEstimate> {
    let n = op.truncation;
    match op.kind {
        OperatorKind::CopsonTail => {
            let (lo, hi) = copson_tail_power(s, p, n)?;
            Some(TailEstimate {
                lower: lo / r.denominator,
                upper: hi / r.denominator,
            })
        }
        OperatorKind::WeightedMean { alpha } => {
            let num = weighted_mean_power_tail(alpha, s, p, n)?;
            let den = power_tail_sum(p * s, n)?;
            let v = (r.numerator + num) / (r.denominator + den);
            Some(TailEstimate { lower: v, upper: v })
        }
    }
}

/// `Σ_{k>N} k^{-s} ∈ [N^{1-s}/(s-1) - N^{-s}, N^{1-s}/(s-1)]` for `s > 1`.
pub fn power_tail_bounds(s: f64, n: usize) -> Option<(f64, f64)> {
    if !(s > 1.0) || n == 0 {
        return None;
    }
    let nf = n as f64;
    let upper = nf.powf(1.0 - s) / (s - 1.0);
    Some((upper - nf.powf(-s), upper))
}

/// Euler–Maclaurin estimate of `Σ_{k>N} k^{-σ}` for `σ > 1`.
pub fn power_tail_sum(sigma: f64, n: usize) -> Option<f64> {
    if !(sigma > 1.0) || n == 0 {
        return None;
    }
    let x = n as f64;
    let s = sigma;
    let f = x.powf(-s);
    Some(
        x.powf(1.0 - s) / (s - 1.0) - f / 2.0 + s * f / (12.0 * x)
            - s * (s + 1.0) * (s + 2.0) * f / (720.0 * x.powi(3))
            + s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * f / (30240.0 * x.powi(5)),
    )
}

/// `Σ_{n<=N} T_n^p` for `a_k = k^{-s}` with the true infinite tail of
/// `Σ_{k>=n} a_k`, bracketed via [`power_tail_bounds`].
pub fn copson_tail_power(s: f64, p: f64, n: usize) -> Option<(f64, f64)> {
    let (lo, hi) = power_tail_bounds(s, n)?;
    let a: Vec<f64> = (1..=n).map(|k| (k as f64).powf(-s)).collect();
    let suffix = suffix_sums(&a);
    let bracket = |extra: f64| {
        let mut acc = NeumaierSum::new();
        for (i, t) in suffix.iter().enumerate() {
            acc.add((p * ((t + extra) / (i + 1) as f64).ln()).exp());
        }
        acc.value()
    };
    Some((bracket(lo), bracket(hi)))
}

/// Smooth extension of `Σ_{i<=x} i^t` for `t > -1`: the asymptotic expansion
/// plus the constant that makes it exact at `x = N`.
#[derive(Debug, Clone, Copy)]
struct PowerPartialSum {
    t: f64,
    offset: f64,
}

impl PowerPartialSum {
    fn new(t: f64, n: usize) -> Self {
        let exact: Vec<f64> = (1..=n).map(|i| (i as f64).powf(t)).collect();
        let s_n = crate::sum::sum(exact);
        let mut s = Self { t, offset: 0.0 };
        s.offset = s_n - s.expansion(n as f64);
        s
    }

    fn expansion(&self, x: f64) -> f64 {
        let t = self.t;
        x.powf(t + 1.0) / (t + 1.0) + x.powf(t) / 2.0 + t * x.powf(t - 1.0) / 12.0
            - t * (t - 1.0) * (t - 2.0) * x.powf(t - 3.0) / 720.0
    }

    fn derivative(&self, x: f64) -> f64 {
        let t = self.t;
        x.powf(t) + t * x.powf(t - 1.0) / 2.0 + t * (t - 1.0) * x.powf(t - 2.0) / 12.0
            - t * (t - 1.0) * (t - 2.0) * (t - 3.0) * x.powf(t - 4.0) / 720.0
    }

    /// `(value) (t+1) / x^{t+1}`, which tends to 1.
    fn normalized(&self, x: f64) -> f64 {
        (self.offset + self.expansion(x)) * (self.t + 1.0) / x.powf(self.t + 1.0)
    }

    fn value(&self, x: f64) -> f64 {
        self.offset + self.expansion(x)
    }
}

/// Estimate of `Σ_{n>N} A_n^p` for the weighted mean of `a_k = k^{-s}`.
///
/// Needs `ps > 1` and `α > s`, so that `A_n ~ α/(α-s) n^{-s}`. The sum is
/// `∫_N^∞ g - g(N)/2 - g'(N)/12` with `g = A^p`; the integral is taken in
/// `x = N e^u`, splitting off the exact leading power.
pub fn weighted_mean_power_tail(alpha: f64, s: f64, p: f64, n: usize) -> Option<f64> {
    let eps = p * s - 1.0;
    if !(eps > 0.0 && alpha > s && n > 0) {
        return None;
    }
    let num = PowerPartialSum::new(alpha - 1.0 - s, n);
    let den = PowerPartialSum::new(alpha - 1.0, n);
    let nf = n as f64;
    let lead = |x: f64| alpha / (alpha - s) * x.powf(-s);
    let c0 = nf * lead(nf).powf(p);
    let decay = (alpha - s).min(1.0);
    let u_max = (60.0 / (decay + eps)).min(600.0 - nf.ln());
    let steps = 20_000usize;
    let h = u_max / steps as f64;
    let integrand = |u: f64| {
        let x = nf * u.exp();
        let rel = num.normalized(x) / den.normalized(x);
        c0 * (-eps * u).exp() * (p * rel.ln()).exp_m1()
    };
    let mut acc = NeumaierSum::new();
    for i in 0..=steps {
        let w = if i == 0 || i == steps {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc.add(w * integrand(i as f64 * h));
    }
    let integral = c0 / eps + acc.value() * h / 3.0;
    let mean = num.value(nf) / den.value(nf);
    let dmean = (num.derivative(nf) * den.value(nf) - num.value(nf) * den.derivative(nf)) / den.value(nf).powi(2);
    let g = mean.powf(p);
    let dg = p * mean.powf(p - 1.0) * dmean;
    Some(integral - g / 2.0 - dg / 12.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalResult {
    pub best_ratio: f64,
    pub best_family: SequenceFamily,
    pub evaluations: Vec<(SequenceFamily, NormRatio)>,
}

/// Evaluates every family in parallel. For `p > 1` returns the largest
/// score; for the tail operator with `p < 1` the smallest. Ties go to the
/// earlier grid entry.
pub fn extremal_search(op: &OperatorSpec, p: f64, grid: &[SequenceFamily]) -> Result<ExtremalResult> {
    if grid.is_empty() {
        return Err(Error::OutOfDomain("family grid is empty".into()));
    }
    let minimize = match op.kind {
        OperatorKind::CopsonTail if p < 1.0 => true,
        _ if p > 1.0 => false,
        _ => {
            return Err(Error::Precondition(format!(
                "extremal search needs p > 1, or p < 1 with the tail operator; got p = {p}"
            )))
        }
    };
    let evaluations: Vec<(SequenceFamily, NormRatio)> = grid
        .par_iter()
        .map(|f| norm_ratio(op, f, p).map(|r| (*f, r)))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, (_, r)) in evaluations.iter().enumerate().skip(1) {
        let (cand, cur) = (r.score(op.kind), evaluations[best].1.score(op.kind));
        if (minimize && cand < cur) || (!minimize && cand > cur) {
            best = i;
        }
    }
    Ok(ExtremalResult {
        best_ratio: evaluations[best].1.score(op.kind),
        best_family: evaluations[best].0,
        evaluations,
    })
}
