//! Finite checks of the per-index criterion inequalities.
//!
//! Each check walks an index range, computes a signed slack
//! `(RHS - LHS) / |RHS|` at every index and folds the result into a
//! [`CriterionReport`]. Criteria that quantify over all `n` are verified on a
//! finite horizon only; the report's tail trend says whether the slack was
//! shrinking over the last decade of indices.
//!
//! Where both sides decay polynomially the comparison is carried out on
//! logarithms, and brackets of the form `Q_n - Q_{n+1}` are evaluated as
//! `Q_n * (-expm1(ln Q_{n+1} - ln Q_n))` with the log difference built from
//! exact per-step logarithms.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponent::{ExponentPair, Regime};
use crate::sequences::{knopp_sequence, levin_steckin_sequence, AuxSequence, WeightSequence};
use crate::sum::NeumaierSum;

/// Acceptance thresholds for a single index.
///
/// A strict inequality holds at `n` when `RHS - LHS > abs + rel * |RHS|`;
/// a non-strict one when `RHS - LHS >= -(abs + rel * |RHS|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 0.0, rel: 1e-12 }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Result<Self> {
        if !(abs >= 0.0 && rel >= 0.0) {
            return Err(Error::OutOfDomain(format!(
                "tolerances must be nonnegative, got abs = {abs}, rel = {rel}"
            )));
        }
        Ok(Self { abs, rel })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    Strict,
    NonStrict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailTrend {
    Improving,
    Flat,
    Degrading,
}

/// Outcome of one finite criterion check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub name: String,
    pub comparison: Comparison,
    pub first_index: usize,
    pub last_index: usize,
    pub holds: bool,
    pub first_failure: Option<usize>,
    /// Minimum over the range of `(RHS - LHS) / |RHS|`.
    pub min_slack: f64,
    pub min_slack_index: usize,
    pub tail_trend: TailTrend,
    pub exploratory: bool,
}

impl CriterionReport {
    /// One-line description of what was checked.
    pub fn summary(&self) -> String {
        let verdict = if self.holds { "holds" } else { "fails" };
        let mut s = format!(
            "{}: {verdict} on {}..={} (finite horizon, not a proof), min slack {:.3e} at {}, tail trend {:?}",
            self.name, self.first_index, self.last_index, self.min_slack, self.min_slack_index, self.tail_trend
        );
        if let Some(n) = self.first_failure {
            s.push_str(&format!(", first failure at {n}"));
        }
        if self.exploratory {
            s.push_str(" [exploratory]");
        }
        s
    }
}

/// Folds per-index comparisons into a [`CriterionReport`].
#[derive(Debug, Clone)]
pub struct CriterionBuilder {
    name: String,
    comparison: Comparison,
    tol: Tolerance,
    exploratory: bool,
    slacks: Vec<(usize, f64)>,
    first_failure: Option<usize>,
}

impl CriterionBuilder {
    pub fn new(name: impl Into<String>, comparison: Comparison, tol: Tolerance) -> Self {
        Self {
            name: name.into(),
            comparison,
            tol,
            exploratory: false,
            slacks: Vec::new(),
            first_failure: None,
        }
    }

    pub fn exploratory(mut self, flag: bool) -> Self {
        self.exploratory = flag;
        self
    }

    fn passes(&self, gap: f64, rhs_abs: f64) -> bool {
        let margin = self.tol.abs + self.tol.rel * rhs_abs;
        match self.comparison {
            Comparison::Strict => gap > margin,
            Comparison::NonStrict => gap >= -margin,
        }
    }

    fn record(&mut self, index: usize, slack: f64, pass: bool) {
        if !pass && self.first_failure.is_none() {
            self.first_failure = Some(index);
        }
        self.slacks.push((index, slack));
    }

    /// Records `lhs` vs `rhs` at `index`.
    pub fn push(&mut self, index: usize, lhs: f64, rhs: f64) {
        let gap = rhs - lhs;
        let slack = if rhs != 0.0 {
            gap / rhs.abs()
        } else if lhs == 0.0 {
            0.0
        } else {
            // Vanishing right side: normalize by the left side instead.
            gap / lhs.abs()
        };
        let pass = !gap.is_nan() && self.passes(gap, rhs.abs());
        self.record(index, slack, pass);
    }

    /// Records `exp(log_lhs)` vs `exp(log_rhs)` without leaving log scale.
    pub fn push_log(&mut self, index: usize, log_lhs: f64, log_rhs: f64) {
        let slack = -(log_lhs - log_rhs).exp_m1();
        // gap / |rhs| compared with tol.rel + tol.abs / |rhs|
        let threshold = self.tol.rel + self.tol.abs * (-log_rhs).exp();
        let pass = match self.comparison {
            Comparison::Strict => slack > threshold,
            Comparison::NonStrict => slack >= -threshold,
        };
        self.record(index, slack, !slack.is_nan() && pass);
    }

    /// Records an index whose right-hand bracket `Q_n - Q_{n+1}` is not positive.
    pub fn push_nonpositive_bracket(&mut self, index: usize, lhs: f64, rhs: f64) {
        self.push(index, lhs, rhs);
    }

    pub fn finish(self) -> CriterionReport {
        let (first_index, last_index) = match (self.slacks.first(), self.slacks.last()) {
            (Some(a), Some(b)) => (a.0, b.0),
            _ => (0, 0),
        };
        let mut min_slack = f64::INFINITY;
        let mut min_slack_index = first_index;
        for &(i, s) in &self.slacks {
            if s < min_slack || s.is_nan() {
                min_slack = s;
                min_slack_index = i;
                if s.is_nan() {
                    break;
                }
            }
        }
        CriterionReport {
            tail_trend: tail_trend(&self.slacks),
            name: self.name,
            comparison: self.comparison,
            first_index,
            last_index,
            holds: self.first_failure.is_none() && !self.slacks.is_empty(),
            first_failure: self.first_failure,
            min_slack,
            min_slack_index,
            exploratory: self.exploratory,
        }
    }
}

/// Compares the slack at the start and end of the last decade of indices.
fn tail_trend(slacks: &[(usize, f64)]) -> TailTrend {
    let Some(&(last_idx, end)) = slacks.last() else {
        return TailTrend::Flat;
    };
    let from = (last_idx / 10).max(slacks[0].0);
    let start = slacks
        .iter()
        .find(|(i, _)| *i >= from)
        .map(|&(_, s)| s)
        .unwrap_or(end);
    let scale = start.abs().max(end.abs());
    let change = end - start;
    if !(scale > 0.0) || change.abs() <= 1e-3 * scale {
        TailTrend::Flat
    } else if change > 0.0 {
        TailTrend::Improving
    } else {
        TailTrend::Degrading
    }
}

/// The constant `U` on the right of a Hardy-type bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetConstant {
    pub value: f64,
    pub description: String,
}

impl TargetConstant {
    pub fn new(value: f64, description: impl Into<String>) -> Result<Self> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::OutOfDomain(format!("target constant must be positive, got {value}")));
        }
        Ok(Self {
            value,
            description: description.into(),
        })
    }

    /// `q^p`, the sharp constant of Hardy's inequality.
    pub fn hardy(params: &ExponentPair) -> Result<Self> {
        Self::new(params.q().powf(params.p()), "Hardy constant q^p")
    }

    /// `((alpha+1)p / ((alpha+1)p - 1))^p` for the weights `λ_n = n^alpha`.
    pub fn power_weight(alpha: f64, params: &ExponentPair) -> Result<Self> {
        let ap = (alpha + 1.0) * params.p();
        if !(ap > 1.0) {
            return Err(Error::OutOfDomain(format!("need (alpha+1)p > 1, got {ap}")));
        }
        Self::new(
            (ap / (ap - 1.0)).powf(params.p()),
            "((alpha+1)p/((alpha+1)p-1))^p",
        )
    }

    /// `(p/(1-p))^p`, the improved Copson-type constant for `0 < p <= 1/3`.
    pub fn levin_steckin(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidExponent(p));
        }
        Self::new((p / (1.0 - p)).powf(p), "(p/(1-p))^p")
    }
}

/// Knopp's criterion
/// `W_n^{p-1} < U Λ_n^p (w_n^{p-1}/λ_n^p - w_{n+1}^{p-1}/λ_{n+1}^p)`
/// for `1 <= n <= n_max`.
///
/// A nonpositive bracket is reported as a failure at that index.
pub fn knopp_criterion(
    w: &AuxSequence,
    weights: &WeightSequence,
    params: &ExponentPair,
    target: &TargetConstant,
    n_max: usize,
    tol: Tolerance,
) -> Result<CriterionReport> {
    let mut b = CriterionBuilder::new("knopp", Comparison::Strict, tol).exploratory(w.exploratory());
    knopp_into(&mut b, w, weights, params, target.value, n_max)?;
    Ok(b.finish())
}

fn knopp_into(
    b: &mut CriterionBuilder,
    w: &AuxSequence,
    weights: &WeightSequence,
    params: &ExponentPair,
    u: f64,
    n_max: usize,
) -> Result<()> {
    if params.regime() != Regime::Forward {
        return Err(Error::InvalidExponent(params.p()));
    }
    if n_max == 0 {
        return Err(Error::OutOfDomain("n_max must be at least 1".into()));
    }
    w.require(n_max + 1)?;
    weights.require(n_max + 1)?;
    let p = params.p();
    let ln_u = u.ln();
    for n in 1..=n_max {
        let log_lhs = (p - 1.0) * w.log_partial_sum(n);
        let log_q = (p - 1.0) * w.log_w(n) - p * weights.log_lambda(n);
        let d = (p - 1.0) * w.log_step(n) - p * weights.log_step(n);
        let log_scale = ln_u + p * weights.partial_sum(n).ln() + log_q;
        if d < 0.0 {
            b.push_log(n, log_lhs, log_scale + (-d.exp_m1()).ln());
        } else {
            b.push_nonpositive_bracket(n, log_lhs.exp(), log_scale.exp() * -d.exp_m1());
        }
    }
    Ok(())
}

/// `true` when `(p, alpha)` lies in the range where Knopp's sequence is known
/// to satisfy the power-weight criterion: `p >= 2, 0 <= alpha <= 1/p` or
/// `1 < p <= 4/3, 1/p <= alpha <= 1`.
pub fn power_weight_range_established(p: f64, alpha: f64) -> bool {
    let inv_p = 1.0 / p;
    let eps = 1e-12;
    (p >= 2.0 && alpha >= 0.0 && alpha <= inv_p + eps)
        || (p > 1.0 && p <= 4.0 / 3.0 + eps && alpha >= inv_p - eps && alpha <= 1.0)
}

/// Knopp's criterion for `λ_n = n^alpha` with Knopp's auxiliary sequence and
/// `U = ((alpha+1)p/((alpha+1)p-1))^p`.
pub fn power_weight_criterion(
    alpha: f64,
    params: &ExponentPair,
    n_max: usize,
    tol: Tolerance,
) -> Result<CriterionReport> {
    let w = knopp_sequence(params, alpha, n_max + 1)?;
    let weights = WeightSequence::power(alpha, n_max + 1);
    let u = TargetConstant::power_weight(alpha, params)?;
    let mut b = CriterionBuilder::new("power_weight_knopp", Comparison::Strict, tol)
        .exploratory(!power_weight_range_established(params.p(), alpha));
    knopp_into(&mut b, &w, &weights, params, u.value, n_max)?;
    Ok(b.finish())
}

/// The scalar reduction of the power-weight criterion at a fixed index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedGap {
    /// `f(alpha) = alpha ln(1+1/n) - (1/p) ln(1+(alpha+1/q)/n) - (1/q) ln(1+(alpha-1/p)/n)`.
    pub value: f64,
    /// `f'(1/p) = ln(1+1/n) - 1/n + 1/(p n (n+1))`.
    pub slope_at_inv_p: f64,
}

/// Evaluates `f(alpha)` and `f'(1/p)`; `f(alpha) > 0` is the reduced form of
/// the power-weight criterion at index `n`.
pub fn reduced_gap(alpha: f64, params: &ExponentPair, n: usize) -> Result<ReducedGap> {
    if params.regime() != Regime::Forward {
        return Err(Error::InvalidExponent(params.p()));
    }
    if n == 0 {
        return Err(Error::OutOfDomain("index must be at least 1".into()));
    }
    let nf = n as f64;
    let (inv_p, inv_q) = (params.inv_p(), params.inv_q());
    let a = (alpha + inv_q) / nf;
    let b = (alpha - inv_p) / nf;
    if !(a > -1.0 && b > -1.0) {
        return Err(Error::OutOfDomain(format!(
            "log argument nonpositive at alpha = {alpha}, n = {n}"
        )));
    }
    let l = (1.0 / nf).ln_1p();
    let value = alpha * l - inv_p * a.ln_1p() - inv_q * b.ln_1p();
    let slope_at_inv_p = l - 1.0 / nf + inv_p / (nf * (nf + 1.0));
    Ok(ReducedGap {
        value,
        slope_at_inv_p,
    })
}

/// The reverse (Copson-type) criterion with the Levin–Stečkin sequence:
/// `W_n^{-1/(1-p)} <= ((1-p)/p)^{p/(1-p)} (w_n^{-1/(1-p)} n^{-p/(1-p)} - w_{n+1}^{-1/(1-p)} (n+1)^{-p/(1-p)})`.
pub fn levin_steckin_criterion(p: f64, n_max: usize, tol: Tolerance) -> Result<CriterionReport> {
    if n_max == 0 {
        return Err(Error::OutOfDomain("n_max must be at least 1".into()));
    }
    let w = levin_steckin_sequence(p, n_max + 1)?;
    let e = 1.0 / (1.0 - p);
    let ln_const = p * e * ((1.0 - p) / p).ln();
    let mut b = CriterionBuilder::new("levin_steckin_reverse", Comparison::NonStrict, tol)
        .exploratory(w.exploratory());
    for n in 1..=n_max {
        let nf = n as f64;
        let log_lhs = -e * w.log_partial_sum(n);
        let log_r = -e * w.log_w(n) - p * e * nf.ln();
        let d = -e * w.log_step(n) - p * e * (1.0 / nf).ln_1p();
        let log_scale = ln_const + log_r;
        if d < 0.0 {
            b.push_log(n, log_lhs, log_scale + (-d.exp_m1()).ln());
        } else {
            b.push_nonpositive_bracket(n, log_lhs.exp(), log_scale.exp() * -d.exp_m1());
        }
    }
    Ok(b.finish())
}

/// `f(x) = (1+(1/p-2)x)^{1/(1-p)} - (1+x)^{-p/(1-p)} - ((1-p)/p) x`.
pub fn reverse_gap(p: f64, x: f64) -> f64 {
    let e = 1.0 / (1.0 - p);
    let a = 1.0 / p - 2.0;
    (e * (a * x).ln_1p()).exp() - (-p * e * x.ln_1p()).exp() - (1.0 - p) / p * x
}

/// `g(x) = (1/p-2)^{2(1-p)/(1-2p)} (1+x)^{(2-p)/(1-2p)} - (1+(1/p-2)x)`;
/// `g >= 0` forces `f'' >= 0`.
pub fn reverse_curvature_witness(p: f64, x: f64) -> f64 {
    let a = 1.0 / p - 2.0;
    let d = 1.0 - 2.0 * p;
    a.powf(2.0 * (1.0 - p) / d) * (1.0 + x).powf((2.0 - p) / d) - (1.0 + a * x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReverseConvexity {
    pub f_min: f64,
    pub g_min: f64,
    pub holds: bool,
    pub exploratory: bool,
}

/// Evaluates `f` and `g` on a grid of `x >= 0`; holds when both stay
/// nonnegative (to `1e-12`, scaled by the magnitude of the terms).
pub fn reverse_convexity(p: f64, x_grid: &[f64]) -> Result<ReverseConvexity> {
    if !(p > 0.0 && p < 0.5) {
        return Err(Error::InvalidExponent(p));
    }
    if let Some(&x) = x_grid.iter().find(|&&x| !(x >= 0.0)) {
        return Err(Error::OutOfDomain(format!("grid point {x} is negative")));
    }
    let mut f_min = f64::INFINITY;
    let mut g_min = f64::INFINITY;
    let mut holds = true;
    for &x in x_grid {
        let f = reverse_gap(p, x);
        let g = reverse_curvature_witness(p, x);
        let scale = 1.0 + (1.0 / p - 2.0) * x;
        holds &= f >= -1e-12 * scale.powf(1.0 / (1.0 - p)) && g >= -1e-12 * scale;
        f_min = f_min.min(f);
        g_min = g_min.min(g);
    }
    Ok(ReverseConvexity {
        f_min,
        g_min,
        holds,
        exploratory: p > 1.0 / 3.0,
    })
}

/// The power-weight criterion for the trial sequence `w_n = n^{-1/p}` with
/// constant weights:
/// `(Σ i^{-1/p})^{p-1} < q^p n^p (n^{-1/q} - (n+1)^{-1/q})`.
pub fn inverse_root_weight_criterion(p: f64, n_max: usize, tol: Tolerance) -> Result<CriterionReport> {
    let params = ExponentPair::forward(p)?;
    let (inv_p, inv_q) = (params.inv_p(), params.inv_q());
    let ln_const = p * params.q().ln();
    let mut b = CriterionBuilder::new("inverse_root_weight", Comparison::Strict, tol).exploratory(p < 3.0);
    let mut acc = NeumaierSum::new();
    for n in 1..=n_max {
        let nf = n as f64;
        acc.add(nf.powf(-inv_p));
        let log_lhs = (p - 1.0) * acc.value().ln();
        let bracket = -(-inv_q * (1.0 / nf).ln_1p()).exp_m1();
        let log_rhs = ln_const + (p - inv_q) * nf.ln() + bracket.ln();
        b.push_log(n, log_lhs, log_rhs);
    }
    Ok(b.finish())
}

/// `n` evenly spaced points on `[0, 1/p]`.
pub fn first_index_alpha_grid(p: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points)
            .map(|i| i as f64 / (points - 1) as f64 / p)
            .collect(),
    }
}

/// `1 - 2^{-(p-1)/p - alpha} > (1 - 1/((alpha+1)p))^p` at each grid point;
/// report indices are positions in the grid, starting at 1.
pub fn first_index_bound(p: f64, alpha_grid: &[f64], tol: Tolerance) -> Result<CriterionReport> {
    let params = ExponentPair::forward(p)?;
    let inv_q = params.inv_q();
    let inside = p >= 3.0 && alpha_grid.iter().all(|&a| a >= 0.0 && a <= 1.0 / p + 1e-12);
    let mut b = CriterionBuilder::new("first_index_bound", Comparison::Strict, tol).exploratory(!inside);
    for (i, &alpha) in alpha_grid.iter().enumerate() {
        let ap = (alpha + 1.0) * p;
        if !(ap > 1.0) {
            return Err(Error::OutOfDomain(format!("need (alpha+1)p > 1, got {ap}")));
        }
        let lhs = (1.0 - 1.0 / ap).powf(p);
        let rhs = -(-(inv_q + alpha) * LN_2).exp_m1();
        b.push(i + 1, lhs, rhs);
    }
    Ok(b.finish())
}

/// Whether `alpha -> (1+alpha) 2^{-alpha}` increases along an evenly spaced
/// grid of `points` on `[0, 1/p]`.
pub fn first_index_factor_increasing(p: f64, points: usize) -> bool {
    let grid = first_index_alpha_grid(p, points);
    grid.windows(2).all(|w| {
        let f = |a: f64| (1.0 + a) * (-a * LN_2).exp();
        f(w[1]) > f(w[0])
    })
}

/// The power-weight criterion for `w_n = n^{alpha-1/p}`, `λ_n = n^alpha`:
/// `(Σ i^{alpha-1/p})^{p-1} < U (Σ i^alpha)^p (n^{-(p-1)/p-alpha} - (n+1)^{-(p-1)/p-alpha})`.
pub fn shifted_power_weight_criterion(
    alpha: f64,
    params: &ExponentPair,
    n_max: usize,
    tol: Tolerance,
) -> Result<CriterionReport> {
    if params.regime() != Regime::Forward {
        return Err(Error::InvalidExponent(params.p()));
    }
    let p = params.p();
    let u = TargetConstant::power_weight(alpha, params)?;
    let inside = alpha >= 1.0 && alpha <= 1.0 + params.inv_p() + 1e-12;
    let decay = params.inv_q() + alpha;
    let ln_u = u.value.ln();
    let mut b = CriterionBuilder::new("shifted_power_weight", Comparison::Strict, tol).exploratory(!inside);
    let mut aux = NeumaierSum::new();
    let mut lam = NeumaierSum::new();
    for n in 1..=n_max {
        let nf = n as f64;
        aux.add(nf.powf(alpha - params.inv_p()));
        lam.add(nf.powf(alpha));
        let log_lhs = (p - 1.0) * aux.value().ln();
        let bracket = -(-decay * (1.0 / nf).ln_1p()).exp_m1();
        let log_rhs = ln_u + p * lam.value().ln() - decay * nf.ln() + bracket.ln();
        b.push_log(n, log_lhs, log_rhs);
    }
    Ok(b.finish())
}

/// `(x - x²/2, x - x²/2 + x³/3)`, the bracket around `ln(1+x)` for `x > 0`.
pub fn log1p_taylor_bounds(x: f64) -> (f64, f64) {
    let lower = x - x * x / 2.0;
    (lower, lower + x * x * x / 3.0)
}

/// `n^{-1/q} - (n+1)^{-1/q} >= (1/q) (n+1/2)^{-1-1/q}` on `1..=n_max`.
pub fn midpoint_difference_bound(p: f64, n_max: usize, tol: Tolerance) -> Result<CriterionReport> {
    let params = ExponentPair::forward(p)?;
    let inv_q = params.inv_q();
    let mut b = CriterionBuilder::new("midpoint_difference_bound", Comparison::NonStrict, tol);
    for n in 1..=n_max {
        let nf = n as f64;
        let diff = nf.powf(-inv_q) * -(-inv_q * (1.0 / nf).ln_1p()).exp_m1();
        let bound = inv_q * (nf + 0.5).powf(-1.0 - inv_q);
        b.push(n, bound, diff);
    }
    Ok(b.finish())
}
