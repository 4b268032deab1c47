//! Weight sequences `λ_n`, auxiliary sequences `w_n`, and the exact identities
//! and decay conditions they are expected to satisfy.
//!
//! Every auxiliary sequence is normalized to `w_1 = 1`. Values are built from
//! the step ratios `w_{n+1}/w_n`, with the logarithm of each ratio computed
//! directly (`ln_1p` of a small offset) and accumulated with compensated
//! summation, so that the log-scale criteria never have to difference two
//! large logarithms.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponent::{ExponentPair, Regime};
use crate::sum::{self, NeumaierSum};

/// Relative tolerance used for the non-strict power-sum bounds.
const POWER_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum WeightFamily {
    Constant,
    Power { alpha: f64 },
}

/// Weights `λ_n` and partial sums `Λ_n` for `n = 1..=len`.
#[derive(Debug, Clone)]
pub struct WeightSequence {
    family: WeightFamily,
    lambda: Vec<f64>,
    partial: Vec<f64>,
}

impl WeightSequence {
    /// `λ_n = 1`.
    pub fn constant(n_max: usize) -> Self {
        Self {
            family: WeightFamily::Constant,
            lambda: vec![1.0; n_max],
            partial: (1..=n_max).map(|n| n as f64).collect(),
        }
    }

    /// `λ_n = n^alpha`.
    pub fn power(alpha: f64, n_max: usize) -> Self {
        let lambda: Vec<f64> = (1..=n_max).map(|n| (n as f64).powf(alpha)).collect();
        let partial = sum::prefix_sums(&lambda);
        Self {
            family: WeightFamily::Power { alpha },
            lambda,
            partial,
        }
    }

    pub fn family(&self) -> WeightFamily {
        self.family
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    pub fn lambda(&self, n: usize) -> f64 {
        self.lambda[n - 1]
    }

    /// `Λ_n = λ_1 + ... + λ_n`.
    pub fn partial_sum(&self, n: usize) -> f64 {
        self.partial[n - 1]
    }

    pub fn log_lambda(&self, n: usize) -> f64 {
        match self.family {
            WeightFamily::Constant => 0.0,
            WeightFamily::Power { alpha } => alpha * (n as f64).ln(),
        }
    }

    /// `ln(λ_{n+1} / λ_n)`.
    pub fn log_step(&self, n: usize) -> f64 {
        match self.family {
            WeightFamily::Constant => 0.0,
            WeightFamily::Power { alpha } => alpha * (1.0 / n as f64).ln_1p(),
        }
    }

    pub(crate) fn require(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.len() {
            return Err(Error::IndexOutOfRange {
                index: n,
                len: self.len(),
            });
        }
        Ok(())
    }
}

/// How an auxiliary sequence was generated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AuxKind {
    /// `w_{n+1} = ((n + alpha - 1/p) / n) w_n`.
    Knopp { p: f64, alpha: f64 },
    /// `w_{n+1} = ((n + 1/p - 2) / n) w_n`.
    LevinSteckin { p: f64 },
    /// `w_n = n^exponent`.
    Power { exponent: f64 },
    /// `w_n = 1`.
    Constant,
}

/// Auxiliary weights `w_n`, their logarithms, and partial sums `W_n`.
#[derive(Debug, Clone)]
pub struct AuxSequence {
    kind: AuxKind,
    w: Vec<f64>,
    log_w: Vec<f64>,
    // log_step[i] = ln(w_{i+2} / w_{i+1})
    log_step: Vec<f64>,
    partial: Vec<f64>,
    exploratory: bool,
}

impl AuxSequence {
    /// Builds `w_1 = 1, w_{n+1} = ratio(n) w_n`; `step(n)` returns the ratio
    /// together with its logarithm.
    fn from_steps(
        kind: AuxKind,
        n_max: usize,
        exploratory: bool,
        mut step: impl FnMut(usize) -> (f64, f64),
    ) -> Self {
        let mut w = Vec::with_capacity(n_max);
        let mut log_w = Vec::with_capacity(n_max);
        let mut log_step = Vec::with_capacity(n_max.saturating_sub(1));
        let mut log_acc = NeumaierSum::new();
        let mut direct = 1.0_f64;
        for n in 1..=n_max {
            if n > 1 {
                let (ratio, ln_ratio) = step(n - 1);
                direct *= ratio;
                log_acc.add(ln_ratio);
                log_step.push(ln_ratio);
            }
            let lw = log_acc.value();
            log_w.push(lw);
            // Fall back to the log-scale value once the direct product stops
            // being representable.
            w.push(if direct.is_normal() { direct } else { lw.exp() });
        }
        let partial = sum::prefix_sums(&w);
        Self {
            kind,
            w,
            log_w,
            log_step,
            partial,
            exploratory,
        }
    }

    /// `w_n = n^exponent` (so `w_1 = 1`).
    pub fn power(exponent: f64, n_max: usize) -> Self {
        Self::from_steps(AuxKind::Power { exponent }, n_max, false, |n| {
            let ln_ratio = exponent * (1.0 / n as f64).ln_1p();
            (ln_ratio.exp(), ln_ratio)
        })
    }

    pub fn constant(n_max: usize) -> Self {
        Self::from_steps(AuxKind::Constant, n_max, false, |_| (1.0, 0.0))
    }

    /// The same sequence multiplied by `factor > 0`.
    ///
    /// Generators always normalize `w_1 = 1`; this exists so that callers can
    /// confirm that criterion verdicts do not depend on that normalization.
    pub fn scaled(&self, factor: f64) -> Self {
        assert!(factor > 0.0, "scale factor must be positive");
        let ln_factor = factor.ln();
        Self {
            kind: self.kind,
            w: self.w.iter().map(|w| w * factor).collect(),
            log_w: self.log_w.iter().map(|l| l + ln_factor).collect(),
            log_step: self.log_step.clone(),
            partial: self.partial.iter().map(|s| s * factor).collect(),
            exploratory: self.exploratory,
        }
    }

    pub fn kind(&self) -> AuxKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// Generated outside the parameter range where positivity and the
    /// associated criterion are established.
    pub fn exploratory(&self) -> bool {
        self.exploratory
    }

    pub fn w(&self, n: usize) -> f64 {
        self.w[n - 1]
    }

    pub fn log_w(&self, n: usize) -> f64 {
        self.log_w[n - 1]
    }

    /// `ln(w_{n+1} / w_n)`, for `1 <= n < len`.
    pub fn log_step(&self, n: usize) -> f64 {
        self.log_step[n - 1]
    }

    /// `W_n = w_1 + ... + w_n`.
    pub fn partial_sum(&self, n: usize) -> f64 {
        self.partial[n - 1]
    }

    pub fn log_partial_sum(&self, n: usize) -> f64 {
        self.partial[n - 1].ln()
    }

    /// Closed form of `W_n` for the recurrence-defined families.
    pub fn identity_value(&self, n: usize) -> Option<f64> {
        let nf = n as f64;
        match self.kind {
            AuxKind::Knopp { p, alpha } => {
                let shift = alpha - 1.0 / p;
                Some((nf + shift) / (1.0 + shift) * self.w(n))
            }
            AuxKind::LevinSteckin { p } => {
                let a = 1.0 / p;
                Some((nf + a - 2.0) / (a - 1.0) * self.w(n))
            }
            AuxKind::Power { .. } | AuxKind::Constant => None,
        }
    }

    pub(crate) fn require(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.len() {
            return Err(Error::IndexOutOfRange {
                index: n,
                len: self.len(),
            });
        }
        Ok(())
    }
}

/// Knopp's auxiliary sequence for the weights `λ_n = n^alpha`.
pub fn knopp_sequence(params: &ExponentPair, alpha: f64, n_max: usize) -> Result<AuxSequence> {
    if params.regime() != Regime::Forward {
        return Err(Error::InvalidExponent(params.p()));
    }
    // w_2 = (1 + alpha - 1/p) w_1, and later ratios only grow.
    if !(alpha > -params.inv_q()) {
        return Err(Error::NonpositiveWeight {
            sequence: "knopp",
            index: 2,
        });
    }
    let shift = alpha - params.inv_p();
    let kind = AuxKind::Knopp {
        p: params.p(),
        alpha,
    };
    Ok(AuxSequence::from_steps(kind, n_max, false, |n| {
        let x = shift / n as f64;
        (1.0 + x, x.ln_1p())
    }))
}

/// The Levin–Stečkin auxiliary sequence for the reverse (`0 < p < 1`) regime.
///
/// Established for `0 < p <= 1/3`; values up to `p < 1/2` are generated with
/// the exploratory flag set.
pub fn levin_steckin_sequence(p: f64, n_max: usize) -> Result<AuxSequence> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    if p >= 0.5 {
        return Err(Error::OutOfDomain(format!(
            "levin-steckin sequence requires p < 1/2, got {p}"
        )));
    }
    let shift = 1.0 / p - 2.0;
    let kind = AuxKind::LevinSteckin { p };
    Ok(AuxSequence::from_steps(kind, n_max, p > 1.0 / 3.0, |n| {
        let x = shift / n as f64;
        (1.0 + x, x.ln_1p())
    }))
}

fn relative_residual(seq: &AuxSequence, n: usize) -> f64 {
    let direct = seq.partial_sum(n);
    let closed = seq
        .identity_value(n)
        .expect("identity exists for recurrence families");
    (direct - closed).abs() / direct
}

fn same(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-15 * a.abs().max(b.abs())
}

/// `|W_n - ((n+alpha-1/p)/(1+alpha-1/p)) w_n| / W_n` for a Knopp sequence.
pub fn knopp_partial_sum_identity_residual(
    seq: &AuxSequence,
    params: &ExponentPair,
    alpha: f64,
    n: usize,
) -> Result<f64> {
    match seq.kind() {
        AuxKind::Knopp { p, alpha: a } if same(p, params.p()) && same(a, alpha) => {}
        other => {
            return Err(Error::ParameterMismatch(format!(
                "expected knopp sequence with p = {}, alpha = {alpha}; got {other:?}",
                params.p()
            )))
        }
    }
    seq.require(n)?;
    Ok(relative_residual(seq, n))
}

/// `|W_n - ((n+1/p-2)/(1/p-1)) w_n| / W_n` for a Levin–Stečkin sequence.
pub fn levin_steckin_identity_residual(seq: &AuxSequence, p: f64, n: usize) -> Result<f64> {
    match seq.kind() {
        AuxKind::LevinSteckin { p: sp } if same(sp, p) => {}
        other => {
            return Err(Error::ParameterMismatch(format!(
                "expected levin-steckin sequence with p = {p}; got {other:?}"
            )))
        }
    }
    seq.require(n)?;
    Ok(relative_residual(seq, n))
}

/// The two power-sum bounds used to reduce the weighted criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerSumBound {
    /// `Σ i^r >= n (n+1)^r / (r+1)` for `0 <= r <= 1`.
    EndpointPower,
    /// `Σ i^r >= (r/(r+1)) n^r (n+1)^r / ((n+1)^r - n^r)` for `r >= 1`,
    /// reversed for `-1 < r <= 1`.
    DifferenceQuotient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundDirection {
    /// `lhs >= rhs` is asserted.
    AtLeast,
    /// `lhs <= rhs` is asserted.
    AtMost,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerSumCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub direction: BoundDirection,
    pub holds: bool,
}

/// Evaluates one of the power-sum bounds at `(r, n)`, with the left side
/// summed directly.
pub fn power_sum_bound_check(r: f64, n: usize, bound: PowerSumBound) -> Result<PowerSumCheck> {
    if n == 0 {
        return Err(Error::OutOfDomain("power sums need n >= 1".into()));
    }
    if !(r > -1.0) {
        return Err(Error::OutOfDomain(format!("power-sum bounds need r > -1, got {r}")));
    }
    let nf = n as f64;
    let lhs = sum::sum((1..=n).map(|i| (i as f64).powf(r)));
    let (rhs, direction) = match bound {
        PowerSumBound::EndpointPower => {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::OutOfDomain(format!(
                    "endpoint power bound needs 0 <= r <= 1, got {r}"
                )));
            }
            (nf * (nf + 1.0).powf(r) / (r + 1.0), BoundDirection::AtLeast)
        }
        PowerSumBound::DifferenceQuotient => {
            // (n+1)^r - n^r = n^r expm1(r ln(1 + 1/n)); the n^r cancels.
            let l = (1.0 / nf).ln_1p();
            let quotient = if r == 0.0 { 1.0 / l } else { r / (r * l).exp_m1() };
            let rhs = quotient * (nf + 1.0).powf(r) / (r + 1.0);
            let direction = if r >= 1.0 {
                BoundDirection::AtLeast
            } else {
                BoundDirection::AtMost
            };
            (rhs, direction)
        }
    };
    let tol = POWER_SUM_TOL * rhs.abs();
    let holds = match direction {
        BoundDirection::AtLeast => lhs >= rhs - tol,
        BoundDirection::AtMost => lhs <= rhs + tol,
    };
    Ok(PowerSumCheck {
        lhs,
        rhs,
        direction,
        holds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailDecay {
    /// Strictly decreasing over `1..=n_max`.
    pub monotone: bool,
    /// Ratio of the last two values.
    pub last_ratio: f64,
    /// First `n` with value(n+1) >= value(n).
    pub first_non_decrease: Option<usize>,
}

/// Checks that the decay quantity attached to the regime of `params` is
/// strictly decreasing on `1..=n_max`.
///
/// Forward (`p > 1`): `w_n^{p-1} / λ_n^p`.
/// Reverse (`0 < p < 1`): `w_n^{-1/(1-p)} λ_n^{-p/(1-p)}`, where the
/// Copson normalization uses `λ_n = n`.
pub fn tail_decay_check(
    seq: &AuxSequence,
    weights: &WeightSequence,
    params: &ExponentPair,
    n_max: usize,
) -> Result<TailDecay> {
    if n_max < 2 {
        return Err(Error::OutOfDomain("decay check needs n_max >= 2".into()));
    }
    seq.require(n_max)?;
    weights.require(n_max)?;
    let p = params.p();
    let (cw, cl) = match params.regime() {
        Regime::Forward => (p - 1.0, -p),
        Regime::Reverse => (-1.0 / (1.0 - p), -p / (1.0 - p)),
        Regime::Negative => return Err(Error::InvalidExponent(p)),
    };
    let mut first_non_decrease = None;
    let mut last = 0.0;
    for n in 1..n_max {
        let d = cw * seq.log_step(n) + cl * weights.log_step(n);
        if d >= 0.0 && first_non_decrease.is_none() {
            first_non_decrease = Some(n);
        }
        last = d;
    }
    Ok(TailDecay {
        monotone: first_non_decrease.is_none(),
        last_ratio: last.exp(),
        first_non_decrease,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pair(p: f64) -> ExponentPair {
        ExponentPair::new(p).unwrap()
    }

    #[test]
    fn knopp_hand_values() {
        let w = knopp_sequence(&pair(2.0), 0.0, 4).unwrap();
        let expected = [1.0, 0.5, 0.375, 0.3125];
        for (n, e) in (1..=4).zip(expected) {
            assert_relative_eq!(w.w(n), e, max_relative = 1e-15);
        }
        assert_relative_eq!(w.partial_sum(3), 1.875, max_relative = 1e-15);
        assert_relative_eq!(w.identity_value(3).unwrap(), 1.875, max_relative = 1e-15);

        let flat = knopp_sequence(&pair(2.0), 0.5, 3).unwrap();
        assert_eq!(flat.w(2), 1.0);
    }

    #[test]
    fn knopp_matches_binomial_form_for_alpha_zero() {
        // C(n-1-1/p, n-1) = prod_{j=1}^{n-1} (j - 1/p) / j
        let p = 3.0;
        let w = knopp_sequence(&pair(p), 0.0, 12).unwrap();
        let mut binom = 1.0;
        for n in 1..=12 {
            if n > 1 {
                let j = (n - 1) as f64;
                binom *= (j - 1.0 / p) / j;
            }
            assert_relative_eq!(w.w(n), binom, max_relative = 1e-14);
        }
    }

    #[test]
    fn knopp_rejects_nonpositive_weights_and_wrong_regime() {
        // -1/q = -0.5 at p = 2
        assert!(matches!(
            knopp_sequence(&pair(2.0), -0.5, 10),
            Err(Error::NonpositiveWeight { index: 2, .. })
        ));
        assert!(knopp_sequence(&pair(2.0), -0.4999, 10).is_ok());
        assert!(matches!(
            knopp_sequence(&pair(0.5), 0.0, 10),
            Err(Error::InvalidExponent(_))
        ));
    }

    #[test]
    fn knopp_identity_residuals() {
        let w = knopp_sequence(&pair(2.0), 0.0, 3).unwrap();
        assert_eq!(knopp_partial_sum_identity_residual(&w, &pair(2.0), 0.0, 1).unwrap(), 0.0);
        assert!(knopp_partial_sum_identity_residual(&w, &pair(2.0), 0.0, 3).unwrap() <= 1e-14);

        let w = knopp_sequence(&pair(3.0), 0.7, 100).unwrap();
        assert!(knopp_partial_sum_identity_residual(&w, &pair(3.0), 0.7, 100).unwrap() <= 1e-12);
    }

    #[test]
    fn identity_residual_checks_parameters() {
        let w = knopp_sequence(&pair(2.0), 0.0, 10).unwrap();
        assert!(matches!(
            knopp_partial_sum_identity_residual(&w, &pair(2.0), 0.1, 5),
            Err(Error::ParameterMismatch(_))
        ));
        assert!(matches!(
            knopp_partial_sum_identity_residual(&w, &pair(3.0), 0.0, 5),
            Err(Error::ParameterMismatch(_))
        ));
        assert!(matches!(
            knopp_partial_sum_identity_residual(&w, &pair(2.0), 0.0, 11),
            Err(Error::IndexOutOfRange { index: 11, len: 10 })
        ));
        let ls = levin_steckin_sequence(0.25, 10).unwrap();
        assert!(knopp_partial_sum_identity_residual(&ls, &pair(2.0), 0.0, 5).is_err());
        assert!(levin_steckin_identity_residual(&w, 0.25, 5).is_err());
    }

    #[test]
    fn levin_steckin_hand_values() {
        let third = 1.0 / 3.0;
        let w = levin_steckin_sequence(third, 10).unwrap();
        for n in 1..=10 {
            assert_relative_eq!(w.w(n), n as f64, max_relative = 1e-14);
        }
        assert_relative_eq!(w.partial_sum(4), 10.0, max_relative = 1e-14);
        assert_relative_eq!(w.identity_value(4).unwrap(), 10.0, max_relative = 1e-14);
        assert!(!w.exploratory());

        let w = levin_steckin_sequence(0.25, 2).unwrap();
        assert_relative_eq!(w.w(2), 3.0, max_relative = 1e-15);
    }

    #[test]
    fn levin_steckin_domain() {
        assert!(levin_steckin_sequence(0.4, 10).unwrap().exploratory());
        assert!(matches!(levin_steckin_sequence(0.5, 10), Err(Error::OutOfDomain(_))));
        assert!(matches!(levin_steckin_sequence(0.0, 10), Err(Error::InvalidExponent(_))));
        assert!(matches!(levin_steckin_sequence(1.5, 10), Err(Error::InvalidExponent(_))));
    }

    #[test]
    fn levin_steckin_identity_to_ten_thousand() {
        for p in [0.1, 0.2, 0.25, 1.0 / 3.0] {
            let w = levin_steckin_sequence(p, 10_000).unwrap();
            for n in 1..=10_000 {
                assert!(levin_steckin_identity_residual(&w, p, n).unwrap() <= 1e-12, "p={p} n={n}");
            }
        }
    }

    #[test]
    fn log_values_track_direct_values() {
        let seqs = [
            knopp_sequence(&pair(1.25), 0.9, 10_000).unwrap(),
            knopp_sequence(&pair(3.0), 0.0, 10_000).unwrap(),
            levin_steckin_sequence(0.1, 10_000).unwrap(),
            AuxSequence::power(-0.5, 10_000),
        ];
        for seq in &seqs {
            for n in 1..=seq.len() {
                assert_relative_eq!(seq.log_w(n).exp(), seq.w(n), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn power_weights_match_direct_sums() {
        let n = 1_000_000;
        let lam = WeightSequence::power(0.5, n);
        let direct: f64 = sum::sum((1..=n).map(|i| (i as f64).sqrt()));
        assert_relative_eq!(lam.partial_sum(n), direct, max_relative = 1e-12);
        for k in 1..n {
            assert!(lam.partial_sum(k + 1) > lam.partial_sum(k));
        }
    }

    #[test]
    fn power_sum_examples() {
        let c = power_sum_bound_check(1.0, 5, PowerSumBound::EndpointPower).unwrap();
        assert_eq!((c.lhs, c.rhs, c.holds), (15.0, 15.0, true));

        let c = power_sum_bound_check(0.5, 10, PowerSumBound::EndpointPower).unwrap();
        assert_relative_eq!(c.lhs, 22.468278, max_relative = 1e-7);
        assert_relative_eq!(c.rhs, 2.0 / 3.0 * 10.0 * 11f64.sqrt(), max_relative = 1e-14);
        assert!(c.holds);

        let c = power_sum_bound_check(2.0, 3, PowerSumBound::DifferenceQuotient).unwrap();
        assert_eq!(c.lhs, 14.0);
        assert_relative_eq!(c.rhs, 96.0 / 7.0, max_relative = 1e-14);
        assert_eq!(c.direction, BoundDirection::AtLeast);
        assert!(c.holds);
    }

    #[test]
    fn power_sum_domain_errors() {
        assert!(power_sum_bound_check(-1.0, 3, PowerSumBound::DifferenceQuotient).is_err());
        assert!(power_sum_bound_check(1.5, 3, PowerSumBound::EndpointPower).is_err());
        assert!(power_sum_bound_check(-0.5, 3, PowerSumBound::EndpointPower).is_err());
        assert!(power_sum_bound_check(0.5, 0, PowerSumBound::EndpointPower).is_err());
    }

    #[test]
    fn power_sum_grids() {
        for n in 1..=1000 {
            for i in 0..=10 {
                let r = i as f64 / 10.0;
                assert!(power_sum_bound_check(r, n, PowerSumBound::EndpointPower).unwrap().holds);
            }
            for r in [1.0, 1.5, 2.0, 3.0] {
                let c = power_sum_bound_check(r, n, PowerSumBound::DifferenceQuotient).unwrap();
                assert_eq!(c.direction, BoundDirection::AtLeast);
                assert!(c.holds, "r={r} n={n}");
            }
            for r in [-0.9, -0.5, 0.0, 0.5, 1.0] {
                let c = power_sum_bound_check(r, n, PowerSumBound::DifferenceQuotient).unwrap();
                assert!(c.lhs <= c.rhs * (1.0 + 1e-12), "reversed bound r={r} n={n}");
            }
        }
    }

    #[test]
    fn decay_examples() {
        let p2 = pair(2.0);
        let n = 1000;
        let w = knopp_sequence(&p2, 0.0, n).unwrap();
        let d = tail_decay_check(&w, &WeightSequence::constant(n), &p2, n).unwrap();
        assert!(d.monotone);
        assert!(d.last_ratio < 1.0 && d.last_ratio > 0.999);

        let d = tail_decay_check(&AuxSequence::constant(n), &WeightSequence::constant(n), &p2, n).unwrap();
        assert!(!d.monotone);
        assert_eq!(d.first_non_decrease, Some(1));
        assert_eq!(d.last_ratio, 1.0);

        // w_n = n gives w_n^{-3/2} n^{-1/2} = n^{-2} at p = 1/3.
        let third = 1.0 / 3.0;
        let ls = levin_steckin_sequence(third, n).unwrap();
        let d = tail_decay_check(&ls, &WeightSequence::power(1.0, n), &pair(third), n).unwrap();
        assert!(d.monotone);
        let expected = ((n - 1) as f64 / n as f64).powi(2);
        assert_relative_eq!(d.last_ratio, expected, max_relative = 1e-12);
    }

    #[test]
    fn scaled_sequence_keeps_identity() {
        let w = knopp_sequence(&pair(2.0), 0.3, 50).unwrap().scaled(7.5);
        assert_eq!(w.w(1), 7.5);
        assert!(knopp_partial_sum_identity_residual(&w, &pair(2.0), 0.3, 50).unwrap() < 1e-13);
    }
}
