//! Redheffer-type recurrent inequalities and the `(c, β)` parameterization
//! of the reverse (Copson-type) bound with `λ_i = 1` and `ν_n = (n - β)/c`.
//!
//! With those choices the reverse bound holds with constant `1/k` as soon as
//!
//! ```text
//! max((1+c-β)^{1-p}, n^p((n+c-β)^{1-p} - (n-1-β)^{1-p})) <= c^{1-p} k    (n >= 2)
//! ```
//!
//! and the sup over `n` reduces to `n = 2` when `f(x) = (1+(c-β)x)^{1-p} -
//! (1-(1+β)x)^{1-p} - c^{1-p} k x` is bounded on `[0, 1/2]` by its endpoint
//! values.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::criteria::{Comparison, CriterionBuilder, CriterionReport, Tolerance};
use crate::error::{Error, Result};
use crate::sum::{prefix_sums, suffix_sums, NeumaierSum};

/// Relative tolerance used for the non-strict branch comparisons.
pub const BRANCH_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RedhefferParams {
    p: f64,
    c: f64,
    beta: f64,
    k: f64,
}

impl RedhefferParams {
    pub fn new(p: f64, c: f64, beta: f64, k: f64) -> Result<Self> {
        Self::validate(p, c, beta)?;
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::OutOfDomain(format!("k must be positive, got {k}")));
        }
        Ok(Self { p, c, beta, k })
    }

    /// Parameters with `k` set to the smallest value passing the branch
    /// condition on `2..=n_max`.
    pub fn with_minimal_k(p: f64, c: f64, beta: f64, n_max: usize) -> Result<Self> {
        Self::validate(p, c, beta)?;
        let k = minimal_k_unchecked(p, c, beta, n_max);
        Ok(Self { p, c, beta, k })
    }

    fn validate(p: f64, c: f64, beta: f64) -> Result<()> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidExponent(p));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::OutOfDomain(format!("c must be positive, got {c}")));
        }
        if !(beta <= 1.0 && beta.is_finite()) {
            return Err(Error::OutOfDomain(format!("beta must be at most 1, got {beta}")));
        }
        if c < beta {
            return Err(Error::OutOfDomain(format!("need c >= beta, got c = {c}, beta = {beta}")));
        }
        Ok(())
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn c_prime(&self) -> f64 {
        1.0 / self.c
    }

    /// `(1 - β)/c`.
    pub fn x(&self) -> f64 {
        (1.0 - self.beta) / self.c
    }

    /// `ν_n = (n - β)/c`.
    pub fn nu(&self, n: usize) -> f64 {
        (n as f64 - self.beta) / self.c
    }

    pub fn with_k(&self, k: f64) -> Result<Self> {
        Self::new(self.p, self.c, self.beta, k)
    }

    /// `(1 + c - β)^{1-p}`.
    pub fn first_branch(&self) -> f64 {
        first_branch(self.p, self.c, self.beta)
    }

    /// `n^p ((n+c-β)^{1-p} - (n-1-β)^{1-p})` for `n >= 2`.
    pub fn index_branch(&self, n: usize) -> f64 {
        index_branch(self.p, self.c, self.beta, n)
    }

    /// `c^{1-p} k`.
    pub fn target(&self) -> f64 {
        self.c.powf(1.0 - self.p) * self.k
    }
}

fn first_branch(p: f64, c: f64, beta: f64) -> f64 {
    (1.0 + c - beta).powf(1.0 - p)
}

fn index_branch(p: f64, c: f64, beta: f64, n: usize) -> f64 {
    let nf = n as f64;
    let base = nf - 1.0 - beta;
    let e = 1.0 - p;
    let diff = if base > 0.0 {
        base.powf(e) * (e * ((c + 1.0) / base).ln_1p()).exp_m1()
    } else {
        (nf + c - beta).powf(e) - base.max(0.0).powf(e)
    };
    nf.powf(p) * diff
}

fn minimal_k_unchecked(p: f64, c: f64, beta: f64, n_max: usize) -> f64 {
    let sup = (2..=n_max.max(2))
        .map(|n| index_branch(p, c, beta, n))
        .fold(first_branch(p, c, beta), f64::max);
    sup / c.powf(1.0 - p)
}

/// The smallest `k` for which the branch condition holds on `2..=n_max`.
pub fn minimal_k(p: f64, c: f64, beta: f64, n_max: usize) -> Result<f64> {
    RedhefferParams::validate(p, c, beta)?;
    Ok(minimal_k_unchecked(p, c, beta, n_max))
}

/// `(1-p)(1+c) < c^{1-p} k`, which makes `f'(0) < 0`.
pub fn slope_condition(params: &RedhefferParams) -> bool {
    (1.0 - params.p) * (1.0 + params.c) < params.target()
}

/// The value of `k` at which the slope condition becomes an equality.
pub fn slope_boundary_k(p: f64, c: f64) -> f64 {
    (1.0 - p) * (1.0 + c) / c.powf(1.0 - p)
}

/// `β < 1/(2p) - 1`: the concave-start requirement for `c = 1/p - 1`.
pub fn curvature_condition(p: f64, beta: f64) -> Result<bool> {
    if !(p > 0.0 && p < 0.5) {
        return Err(Error::InvalidExponent(p));
    }
    Ok(beta < 1.0 / (2.0 * p) - 1.0)
}

/// `f''(0) < 0`, i.e. `1 + β < c - β`, for general `c`.
pub fn concave_start(params: &RedhefferParams) -> bool {
    1.0 + params.beta < params.c - params.beta
}

/// `f(x) = (1+(c-β)x)^{1-p} - (1-(1+β)x)^{1-p} - c^{1-p} k x` on `[0, 1/2]`.
///
/// `f(1/n) <= 0` is equivalent to the branch condition at index `n`.
pub fn reduction_function(params: &RedhefferParams, x: f64) -> f64 {
    let e = 1.0 - params.p;
    let a = ((params.c - params.beta) * x).ln_1p();
    let b = 1.0 - (1.0 + params.beta) * x;
    (e * a).exp() - b.max(0.0).powf(e) - params.target() * x
}

/// The endpoint reduction `f <= max(f(0), f(1/2))` on `[0, 1/2]` applies:
/// either `f` is convex there, or `f` starts concave and non-increasing.
pub fn reduction_applies(params: &RedhefferParams) -> bool {
    if params.beta < -1.0 {
        return false;
    }
    let convex = 1.0 + params.beta >= params.c - params.beta;
    let slope = (1.0 - params.p) * (1.0 + params.c) - params.target();
    let slope_ok = slope < 0.0 || (slope <= BRANCH_REL_TOL * params.target() && concave_start(params));
    convex || slope_ok
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchCheck {
    pub report: CriterionReport,
    pub first_branch: f64,
    pub two_branch: f64,
    pub target: f64,
    /// Verdict of the two-index reduction, when its hypotheses hold.
    pub reduction: Option<bool>,
    /// Whether the direct sweep and the reduction agree (vacuous without a reduction).
    pub agree: bool,
}

/// Checks the branch condition directly for `2 <= n <= n_max`, non-strictly
/// with relative tolerance [`BRANCH_REL_TOL`], and cross-checks it against
/// the two-index reduction.
pub fn branch_condition(params: &RedhefferParams, n_max: usize) -> Result<BranchCheck> {
    if n_max < 2 {
        return Err(Error::OutOfDomain("n_max must be at least 2".into()));
    }
    let tol = Tolerance::new(0.0, BRANCH_REL_TOL)?;
    let target = params.target();
    let first = params.first_branch();
    let mut b = CriterionBuilder::new("redheffer_branches", Comparison::NonStrict, tol);
    for n in 2..=n_max {
        b.push(n, first.max(params.index_branch(n)), target);
    }
    let report = b.finish();
    let two = params.index_branch(2);
    let reduction = reduction_applies(params).then(|| two_index_condition(params));
    let agree = reduction.is_none_or(|r| r == report.holds);
    Ok(BranchCheck {
        report,
        first_branch: first,
        two_branch: two,
        target,
        reduction,
        agree,
    })
}

/// The branch condition at `n = 2` only.
pub fn two_index_condition(params: &RedhefferParams) -> bool {
    let target = params.target();
    let slack = BRANCH_REL_TOL * target;
    params.first_branch() <= target + slack && params.index_branch(2) <= target + slack
}

/// Root of `(1+x)^{1/2} = √2((1+c'+x)^{1/2} - x^{1/2})`:
/// `x = (√((10+4c')² + 28(1+2c')²) - (10+4c'))/14`.
pub fn solve_balance_half(c_prime: f64) -> Result<f64> {
    if !(c_prime >= 0.0 && c_prime.is_finite()) {
        return Err(Error::OutOfDomain(format!("c' must be nonnegative, got {c_prime}")));
    }
    let b = 10.0 + 4.0 * c_prime;
    let s = 1.0 + 2.0 * c_prime;
    // Rationalized form of (sqrt(b² + 28 s²) - b)/14.
    Ok(2.0 * s * s / ((b * b + 28.0 * s * s).sqrt() + b))
}

/// `(1+x)^{1/2} - √2((1+c'+x)^{1/2} - x^{1/2})`.
pub fn balance_half_residual(c_prime: f64, x: f64) -> f64 {
    (1.0 + x).sqrt() - std::f64::consts::SQRT_2 * ((1.0 + c_prime + x).sqrt() - x.sqrt())
}

/// `β = 1 - c x`.
pub fn beta_from_balance(c: f64, x: f64) -> f64 {
    1.0 - c * x
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Slope condition holds strictly with the minimal `k`.
    Strict,
    /// `k` raised to the slope boundary, relying on `f''(0) < 0`.
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub c: f64,
    pub beta: f64,
    /// Minimal `k` from the direct sweep.
    pub k_min: f64,
    /// `max(k_min, slope boundary)`, the constant the argument delivers.
    pub k: f64,
    pub route: Option<Route>,
    pub two_index: bool,
    pub direct: bool,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub p: f64,
    pub n_max: usize,
    pub best: Option<ScanPoint>,
    pub feasible_count: usize,
    pub points: Vec<ScanPoint>,
}

fn scan_point(p: f64, c: f64, beta: f64, n_max: usize) -> ScanPoint {
    let k_min = minimal_k_unchecked(p, c, beta, n_max);
    let k_slope = slope_boundary_k(p, c);
    let (k, route) = if k_min > k_slope {
        (k_min, Some(Route::Strict))
    } else if 1.0 + beta < c - beta {
        (k_slope, Some(Route::Boundary))
    } else {
        (k_slope, None)
    };
    let params = RedhefferParams { p, c, beta, k };
    let two_index = two_index_condition(&params);
    let direct = (2..=n_max).all(|n| {
        params.first_branch().max(params.index_branch(n)) <= params.target() * (1.0 + BRANCH_REL_TOL)
    });
    ScanPoint {
        c,
        beta,
        k_min,
        k,
        route,
        two_index,
        direct,
        feasible: route.is_some() && two_index && direct,
    }
}

/// Evaluates every admissible `(c, β)` grid pair in parallel and returns the
/// feasible point with the smallest delivered `k`; ties go to the smaller
/// `c`, then the smaller `β`.
pub fn scan_params(p: f64, c_grid: &[f64], beta_grid: &[f64], n_max: usize) -> Result<ScanResult> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    if n_max < 2 {
        return Err(Error::OutOfDomain("n_max must be at least 2".into()));
    }
    if c_grid.iter().chain(beta_grid).any(|v| !v.is_finite()) {
        return Err(Error::OutOfDomain("grids must be finite".into()));
    }
    let pairs: Vec<(f64, f64)> = c_grid
        .iter()
        .flat_map(|&c| beta_grid.iter().map(move |&b| (c, b)))
        .filter(|&(c, b)| RedhefferParams::validate(p, c, b).is_ok())
        .collect();
    let points: Vec<ScanPoint> = pairs
        .par_iter()
        .map(|&(c, b)| scan_point(p, c, b, n_max))
        .collect();
    let best = points
        .iter()
        .filter(|pt| pt.feasible)
        .min_by(|a, b| {
            a.k.total_cmp(&b.k)
                .then(a.c.total_cmp(&b.c))
                .then(a.beta.total_cmp(&b.beta))
        })
        .copied();
    Ok(ScanResult {
        p,
        n_max,
        best,
        feasible_count: points.iter().filter(|pt| pt.feasible).count(),
        points,
    })
}

/// `c ∈ [0.1, 10]` in steps of 0.01 and `β ∈ [-1, 1)` in steps of 0.005;
/// pairs with `c < β` are skipped by the scanner.
pub fn default_grids() -> (Vec<f64>, Vec<f64>) {
    let c = (10..=1000).map(|i| i as f64 / 100.0).collect();
    let beta = (0..400).map(|j| -1.0 + j as f64 * 0.005).collect();
    (c, beta)
}

/// Multiplier sequences `μ_i, η_i` (stored from `i = 1`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecurrentSequences {
    mu: Vec<f64>,
    eta: Vec<f64>,
}

impl RecurrentSequences {
    pub fn new(mu: Vec<f64>, eta: Vec<f64>) -> Result<Self> {
        if mu.len() != eta.len() {
            return Err(Error::ParameterMismatch(format!(
                "mu has {} terms, eta has {}",
                mu.len(),
                eta.len()
            )));
        }
        for (name, v) in [("mu", &mu), ("eta", &eta)] {
            if let Some(i) = v.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
                return Err(Error::NonpositiveWeight {
                    sequence: name,
                    index: i + 1,
                });
            }
        }
        Ok(Self { mu, eta })
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn mu(&self, i: usize) -> f64 {
        self.mu[i - 1]
    }

    pub fn eta(&self, i: usize) -> f64 {
        self.eta[i - 1]
    }

    /// `ν_i = μ_i^q - 1` with `q = p/(p-1)`.
    pub fn nu_forward(&self, i: usize, p: f64) -> f64 {
        self.mu(i).powf(p / (p - 1.0)) - 1.0
    }

    /// `ν_i = μ_i^{1/(1-p)} - 1`.
    pub fn nu_reverse(&self, i: usize, p: f64) -> f64 {
        self.mu(i).powf(1.0 / (1.0 - p)) - 1.0
    }
}

fn require_len(len: usize, n: usize) -> Result<()> {
    if len < n {
        Err(Error::IndexOutOfRange { index: n, len })
    } else {
        Ok(())
    }
}

fn require_positive(name: &'static str, v: &[f64]) -> Result<()> {
    match v.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
        Some(i) => Err(Error::NonpositiveWeight {
            sequence: name,
            index: i + 1,
        }),
        None => Ok(()),
    }
}

/// `RHS - LHS` of the forward recurrent inequality
///
/// ```text
/// Σ_{i=2}^{n-1} (μ_i - c_{i+1}) S_i^{1/p} + μ_n S_n^{1/p} <= c_2 (λ_1 a_1)^{1/p} + Σ_{i=2}^n η_i (λ_i a_i)^{1/p}
/// ```
///
/// with `S_n = Σ_{i<=n} λ_i a_i`, `q = p/(p-1)` and `c_i = (μ_i^q - η_i^q)^{1/q}`.
/// Requires `μ_i <= η_i` for `0 < p < 1` and `μ_i >= η_i` for `p < 0`.
/// Equal multipliers make `c_i` infinite and the residual `+inf`.
pub fn forward_recurrent_residual(
    lambda: &[f64],
    a: &[f64],
    seqs: &RecurrentSequences,
    p: f64,
    n: usize,
) -> Result<f64> {
    if !(p < 1.0 && p != 0.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    if n < 2 {
        return Err(Error::OutOfDomain("n must be at least 2".into()));
    }
    for len in [lambda.len(), a.len(), seqs.len()] {
        require_len(len, n)?;
    }
    require_positive("lambda", &lambda[..n])?;
    require_positive("a", &a[..n])?;
    for i in 1..=n {
        let ok = if p > 0.0 {
            seqs.mu(i) <= seqs.eta(i)
        } else {
            seqs.mu(i) >= seqs.eta(i)
        };
        if !ok {
            return Err(Error::Precondition(format!(
                "multiplier ordering violated at i = {i}: mu = {}, eta = {}",
                seqs.mu(i),
                seqs.eta(i)
            )));
        }
    }
    let q = p / (p - 1.0);
    let big_p = 1.0 / p;
    let cc = |i: usize| multiplier_difference(seqs.mu(i), seqs.eta(i), q);
    let terms: Vec<f64> = (0..n).map(|i| lambda[i] * a[i]).collect();
    let s = prefix_sums(&terms);
    let mut lhs = NeumaierSum::new();
    for i in 2..n {
        lhs.add((seqs.mu(i) - cc(i + 1)) * s[i - 1].powf(big_p));
    }
    lhs.add(seqs.mu(n) * s[n - 1].powf(big_p));
    let mut rhs = NeumaierSum::new();
    rhs.add(cc(2) * terms[0].powf(big_p));
    for i in 2..=n {
        rhs.add(seqs.eta(i) * terms[i - 1].powf(big_p));
    }
    Ok(rhs.value() - lhs.value())
}

/// `-d`-shifted single step `μ(1+t)^p - η t^p - (μ^{1/(1-p)} - η^{1/(1-p)})^{1-p}`,
/// nonnegative for `μ >= η > 0`, `t > 0`, `0 < p < 1`.
pub fn tail_recurrent_step_residual(mu: f64, eta: f64, p: f64, t: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    if !(mu >= eta && eta > 0.0) {
        return Err(Error::Precondition(format!("need mu >= eta > 0, got mu = {mu}, eta = {eta}")));
    }
    if !(t >= 0.0) {
        return Err(Error::OutOfDomain(format!("t must be nonnegative, got {t}")));
    }
    Ok(mu * (1.0 + t).powf(p) - eta * t.powf(p) - tail_multiplier(mu, eta, p))
}

/// `(μ^{1/(1-p)} - η^{1/(1-p)})^{1-p}`.
pub fn tail_multiplier(mu: f64, eta: f64, p: f64) -> f64 {
    multiplier_difference(mu, eta, 1.0 / (1.0 - p))
}

/// `(μ^e - η^e)^{1/e}` evaluated as `μ (1 - (η/μ)^e)^{1/e}`, which stays finite
/// for large `|e|`. Requires `(η/μ)^e <= 1`.
fn multiplier_difference(mu: f64, eta: f64, e: f64) -> f64 {
    let gap = -(e * (eta / mu).ln()).exp_m1();
    mu * gap.max(0.0).powf(1.0 / e)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailResidual {
    /// `LHS - RHS`.
    pub residual: f64,
    /// Set when the supplied terms do not visibly decay, so that the tail
    /// sums may be missing a material contribution beyond the truncation.
    pub truncation_warning: Option<String>,
}

/// Relative size of the last supplied term above which a truncation warning
/// is attached.
pub const TRUNCATION_THRESHOLD: f64 = 1e-10;

/// `LHS - RHS` of the tail recurrent inequality
///
/// ```text
/// μ_1 S_1^p + Σ_{i=2}^n (μ_i - d_{i-1}) S_i^p - d_n S_{n+1}^p >= Σ_{i=1}^n η_i λ_i^p a_i^p
/// ```
///
/// with `S_n = Σ_{i>=n} λ_i a_i` over the supplied terms and
/// `d_i = (μ_i^{1/(1-p)} - η_i^{1/(1-p)})^{1-p}`.
pub fn tail_recurrent_residual(
    lambda: &[f64],
    a: &[f64],
    seqs: &RecurrentSequences,
    p: f64,
    n: usize,
) -> Result<TailResidual> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    if n < 2 {
        return Err(Error::OutOfDomain("n must be at least 2".into()));
    }
    if lambda.len() != a.len() {
        return Err(Error::ParameterMismatch(format!(
            "lambda has {} terms, a has {}",
            lambda.len(),
            a.len()
        )));
    }
    require_len(a.len(), n)?;
    require_len(seqs.len(), n)?;
    require_positive("lambda", lambda)?;
    require_positive("a", a)?;
    if let Some(i) = (1..=n).find(|&i| seqs.mu(i) < seqs.eta(i)) {
        return Err(Error::Precondition(format!("need mu >= eta, violated at i = {i}")));
    }
    let terms: Vec<f64> = lambda.iter().zip(a).map(|(l, x)| l * x).collect();
    let s = suffix_sums(&terms);
    let tail = |i: usize| s.get(i - 1).copied().unwrap_or(0.0);
    let d = |i: usize| tail_multiplier(seqs.mu(i), seqs.eta(i), p);
    let mut lhs = NeumaierSum::new();
    lhs.add(seqs.mu(1) * tail(1).powf(p));
    for i in 2..=n {
        lhs.add((seqs.mu(i) - d(i - 1)) * tail(i).powf(p));
    }
    lhs.add(-d(n) * tail(n + 1).powf(p));
    let mut rhs = NeumaierSum::new();
    for i in 1..=n {
        rhs.add(seqs.eta(i) * terms[i - 1].powf(p));
    }
    let last = *terms.last().expect("nonempty");
    let truncation_warning = (last > TRUNCATION_THRESHOLD * tail(1)).then(|| {
        format!(
            "last supplied term is {:.3e} of the total; tail sums may be truncated",
            last / tail(1)
        )
    });
    Ok(TailResidual {
        residual: lhs.value() - rhs.value(),
        truncation_warning,
    })
}

/// Both sides of the forward recurrent inequality rewritten in terms of an
/// auxiliary sequence `w` (exponent `p > 1`):
///
/// ```text
/// Σ_{i=2}^{n-1} W_i^{-(p-1)}(Q_i - Q_{i+1}) Λ_i^p A_i^p + W_n^{-(p-1)} Q_n Λ_n^p A_n^p
///     <= (w_2/w_1)^{p-1} (λ_1/λ_2)^p a_1^p + Σ_{i=2}^n a_i^p
/// ```
///
/// where `Q_i = w_i^{p-1}/λ_i^p`, `W_i = Σ_{j<=i} w_j`, `Λ_i = Σ_{j<=i} λ_j`,
/// `A_i = Σ_{j<=i} λ_j a_j / Λ_i`. Holds for every positive `w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForwardForm {
    pub lhs: f64,
    pub rhs: f64,
}

fn check_forward_inputs(w: &[f64], lambda: &[f64], a: &[f64], p: f64, n: usize) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    if n < 2 {
        return Err(Error::OutOfDomain("n must be at least 2".into()));
    }
    for len in [w.len(), lambda.len(), a.len()] {
        require_len(len, n)?;
    }
    require_positive("w", &w[..n])?;
    require_positive("lambda", &lambda[..n])?;
    require_positive("a", &a[..n])
}

fn weighted_means(lambda: &[f64], a: &[f64], n: usize) -> Vec<f64> {
    let lam = prefix_sums(&lambda[..n]);
    let terms: Vec<f64> = (0..n).map(|i| lambda[i] * a[i]).collect();
    let s = prefix_sums(&terms);
    s.iter().zip(&lam).map(|(s, l)| s / l).collect()
}

pub fn forward_recurrent_form(w: &[f64], lambda: &[f64], a: &[f64], p: f64, n: usize) -> Result<ForwardForm> {
    check_forward_inputs(w, lambda, a, p, n)?;
    let big_w = prefix_sums(&w[..n]);
    let lam = prefix_sums(&lambda[..n]);
    let means = weighted_means(lambda, a, n);
    let q = |i: usize| w[i - 1].powf(p - 1.0) / lambda[i - 1].powf(p);
    let mut lhs = NeumaierSum::new();
    for i in 2..n {
        let coef = big_w[i - 1].powf(1.0 - p) * (q(i) - q(i + 1)) * lam[i - 1].powf(p);
        lhs.add(coef * means[i - 1].powf(p));
    }
    lhs.add(big_w[n - 1].powf(1.0 - p) * q(n) * lam[n - 1].powf(p) * means[n - 1].powf(p));
    let mut rhs = NeumaierSum::new();
    rhs.add((w[1] / w[0]).powf(p - 1.0) * (lambda[0] / lambda[1]).powf(p) * a[0].powf(p));
    for &x in &a[1..n] {
        rhs.add(x.powf(p));
    }
    Ok(ForwardForm {
        lhs: lhs.value(),
        rhs: rhs.value(),
    })
}

/// The chain `(1/U) Σ_{i<=n} A_i^p <= (1/U) a_1^p + form.lhs <= (1/U) a_1^p + form.rhs <= Σ_{i<=n} a_i^p`
/// obtained when `w` satisfies Knopp's criterion with constant `U` on `1..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KnoppRoute {
    pub means_sum: f64,
    pub form: ForwardForm,
    pub first_term: f64,
    pub input_sum: f64,
}

impl KnoppRoute {
    /// `Σ A_i^p <= U Σ a_i^p`, with relative tolerance 1e-12.
    pub fn bound_holds(&self, u: f64) -> bool {
        self.means_sum <= u * self.input_sum * (1.0 + 1e-12)
    }

    /// Every link in the chain, with relative tolerance 1e-12.
    pub fn chain_holds(&self, u: f64) -> bool {
        let le = |a: f64, b: f64| a <= b + 1e-12 * b.abs().max(a.abs());
        le(self.means_sum / u, self.first_term / u + self.form.lhs)
            && le(self.form.lhs, self.form.rhs)
            && le(self.first_term / u + self.form.rhs, self.input_sum)
    }
}

pub fn knopp_route(w: &[f64], lambda: &[f64], a: &[f64], p: f64, n: usize) -> Result<KnoppRoute> {
    let form = forward_recurrent_form(w, lambda, a, p, n)?;
    let means = weighted_means(lambda, a, n);
    Ok(KnoppRoute {
        means_sum: means.iter().map(|m| m.powf(p)).sum(),
        form,
        first_term: a[0].powf(p),
        input_sum: a[..n].iter().map(|x| x.powf(p)).sum(),
    })
}

/// A seeded random instance for either recurrent inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrentInstance {
    pub p: f64,
    pub n: usize,
    pub lambda: Vec<f64>,
    pub a: Vec<f64>,
    pub seqs: RecurrentSequences,
}

fn positive_vec(rng: &mut ChaCha8Rng, len: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Random forward instance; one seed in four uses the `p < 0` regime.
pub fn forward_instance(seed: u64) -> RecurrentInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=50);
    let negative = rng.gen_bool(0.25);
    let p = if negative {
        -rng.gen_range(0.1..3.0)
    } else {
        rng.gen_range(0.05..0.95)
    };
    let lambda = positive_vec(&mut rng, n, 0.1, 2.0);
    let a = positive_vec(&mut rng, n, 0.01, 1.0);
    let eta = positive_vec(&mut rng, n, 0.5, 2.0);
    let mu = eta
        .iter()
        .map(|&e| {
            let r: f64 = rng.gen_range(0.05..1.0);
            if negative {
                e / r
            } else {
                e * r
            }
        })
        .collect();
    RecurrentInstance {
        p,
        n,
        lambda,
        a,
        seqs: RecurrentSequences::new(mu, eta).expect("positive multipliers"),
    }
}

/// Random tail instance with geometrically decaying, finitely supported terms.
pub fn tail_instance(seed: u64) -> RecurrentInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=50);
    let len = n + rng.gen_range(0..=20);
    let p = rng.gen_range(0.05..0.95);
    let ratio: f64 = rng.gen_range(0.2..0.95);
    let lambda = positive_vec(&mut rng, len, 0.1, 2.0);
    let a = (0..len)
        .map(|i| rng.gen_range(0.1..1.0) * ratio.powi(i as i32))
        .collect();
    let eta = positive_vec(&mut rng, len, 0.5, 2.0);
    let mu = eta.iter().map(|&e| e * rng.gen_range(1.0..3.0)).collect();
    RecurrentInstance {
        p,
        n,
        lambda,
        a,
        seqs: RecurrentSequences::new(mu, eta).expect("positive multipliers"),
    }
}

/// `count` random `(μ, η, p, t)` points with `μ >= η > 0`, `t > 0`, `0 < p < 1`.
pub fn step_grid(seed: u64, count: usize) -> Vec<(f64, f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let eta = 10f64.powf(rng.gen_range(-2.0..2.0));
            let mu = eta * 10f64.powf(rng.gen_range(0.0..2.0));
            let p = rng.gen_range(0.01..0.99);
            let t = 10f64.powf(rng.gen_range(-4.0..4.0));
            (mu, eta, p, t)
        })
        .collect()
}
