//! Acceptance suite. Runs each criterion at its stated tolerance, prints one
//! PASS/FAIL line per criterion and exits nonzero if any fails.
//!
//! Criteria quantified over all n are checked on a finite horizon only.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hardy_aux::criteria::{
    first_index_alpha_grid, first_index_bound, inverse_root_weight_criterion, knopp_criterion,
    levin_steckin_criterion, power_weight_criterion, reduced_gap, shifted_power_weight_criterion,
    TargetConstant, Tolerance,
};
use hardy_aux::operator::{extremal_search, norm_ratio, FamilyKind, OperatorSpec, SequenceFamily};
use hardy_aux::redheffer::{
    beta_from_balance, curvature_condition, forward_instance, forward_recurrent_residual,
    minimal_k, solve_balance_half, step_grid, tail_instance, tail_recurrent_residual,
    tail_recurrent_step_residual, two_index_condition, RedhefferParams,
};
use hardy_aux::sequences::{
    knopp_sequence, levin_steckin_identity_residual, levin_steckin_sequence, power_sum_bound_check,
    BoundDirection, PowerSumBound, WeightSequence,
};
use hardy_aux::{ExponentPair, DEFAULT_SEED};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fmt_err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn redheffer_constants() -> Outcome {
    let x = solve_balance_half(0.4).map_err(fmt_err)?;
    let beta = beta_from_balance(2.5, x);
    ensure((x - 0.2435).abs() < 5e-4, || format!("x = {x}"))?;
    ensure((beta - 0.3912).abs() < 5e-4, || format!("beta = {beta}"))?;
    let k = minimal_k(0.5, 2.5, beta, 10_000).map_err(fmt_err)?;
    ensure((k - 1.1151).abs() < 1e-3, || format!("k = {k}"))?;
    ensure(1.0 / k > 0.8967 && 1.0 / 1.1152 > 0.8967, || format!("1/k = {}", 1.0 / k))?;
    Ok(format!("x = {x:.6}, beta = {beta:.6}, k = {k:.6}, 1/k = {:.6}", 1.0 / k))
}

fn reverse_floor_half() -> Outcome {
    let floor = 0.8967 - 1e-9;
    let n = 1000;
    let op = OperatorSpec::copson_tail(n).map_err(fmt_err)?;
    let mut worst = f64::INFINITY;
    for seed in DEFAULT_SEED..DEFAULT_SEED + 200 {
        let f = SequenceFamily::new(FamilyKind::Random { seed }, n).map_err(fmt_err)?;
        let r = norm_ratio(&op, &f, 0.5).map_err(fmt_err)?.power_sum_ratio();
        ensure(r >= floor, || format!("seed {seed}: ratio {r}"))?;
        worst = worst.min(r);
    }
    let n = 10_000;
    let op = OperatorSpec::copson_tail(n).map_err(fmt_err)?.with_tail_correction(true);
    let mut parts = Vec::new();
    for s in [1.5, 2.0, 3.0] {
        let f = SequenceFamily::new(FamilyKind::PowerDecay { s }, n).map_err(fmt_err)?;
        let r = norm_ratio(&op, &f, 0.5).map_err(fmt_err)?;
        let t = r.tail.ok_or("missing tail bracket")?;
        ensure(r.power_sum_ratio() >= floor && t.lower >= floor, || {
            format!("s = {s}: truncated {}, corrected [{}, {}]", r.power_sum_ratio(), t.lower, t.upper)
        })?;
        parts.push(format!("s={s}: {:.4}", t.lower));
    }
    Ok(format!("random min {worst:.4}; corrected lower {}", parts.join(", ")))
}

fn reverse_machinery() -> Outcome {
    let n_max = 10_000;
    let mut parts = Vec::new();
    let mut worst_identity: f64 = 0.0;
    for p in [0.1, 0.2, 0.25, 1.0 / 3.0] {
        let r = levin_steckin_criterion(p, n_max, Tolerance::default()).map_err(fmt_err)?;
        ensure(r.holds && r.min_slack >= 0.0, || r.summary())?;
        let seq = levin_steckin_sequence(p, n_max).map_err(fmt_err)?;
        for n in 1..=n_max {
            let res = levin_steckin_identity_residual(&seq, p, n).map_err(fmt_err)?;
            ensure(res <= 1e-12, || format!("identity residual {res} at p = {p}, n = {n}"))?;
            worst_identity = worst_identity.max(res);
        }
        parts.push(format!("p={p:.4}: {:.2e}", r.min_slack));
    }
    Ok(format!("min slack {}; identity residual <= {worst_identity:.1e}", parts.join(", ")))
}

fn boundary_algebra() -> Outcome {
    let beta = 3.0 - 2.0 * 2f64.sqrt();
    let r = RedhefferParams::new(1.0 / 3.0, 2.0, beta, 2f64.cbrt()).map_err(fmt_err)?;
    let first = r.first_branch();
    let rel = (first - r.target()).abs() / r.target();
    ensure(rel <= 1e-12, || format!("first branch {first} vs target {}", r.target()))?;
    let two = r.index_branch(2);
    ensure((two - 1.97199).abs() < 5e-5 && two <= 2.0, || format!("n = 2 branch {two}"))?;
    ensure(two_index_condition(&r), || "two-index condition fails at p = 1/3".into())?;
    ensure(curvature_condition(1.0 / 3.0, beta).map_err(fmt_err)?, || "curvature fails at p = 1/3".into())?;

    let p = 0.34;
    let c = 1.0 / p - 1.0;
    let r34 = RedhefferParams::new(p, c, 0.21, c.powf(p)).map_err(fmt_err)?;
    ensure(two_index_condition(&r34), || "two-index condition fails at p = 0.34".into())?;
    ensure(curvature_condition(p, 0.21).map_err(fmt_err)?, || "curvature fails at p = 0.34".into())?;
    Ok(format!(
        "p=1/3: first branch rel err {rel:.1e}, n=2 branch {two:.6}; p=0.34: branches {:.5}/{:.5} <= {:.5}",
        r34.first_branch(),
        r34.index_branch(2),
        r34.target()
    ))
}

fn power_weight_samples() -> Outcome {
    let samples = [(2.0, 0.0), (2.0, 0.3), (2.0, 0.5), (3.0, 0.2), (4.0 / 3.0, 0.75), (1.25, 0.9), (1.1, 1.0)];
    let mut min_slack = f64::INFINITY;
    for (p, alpha) in samples {
        let params = ExponentPair::forward(p).map_err(fmt_err)?;
        let r = power_weight_criterion(alpha, &params, 10_000, Tolerance::default()).map_err(fmt_err)?;
        ensure(r.holds, || r.summary())?;
        min_slack = min_slack.min(r.min_slack);
    }
    let two = ExponentPair::forward(2.0).map_err(fmt_err)?;
    let four_thirds = ExponentPair::forward(4.0 / 3.0).map_err(fmt_err)?;
    for n in 1..=100 {
        let neg = reduced_gap(0.5, &two, n).map_err(fmt_err)?.slope_at_inv_p;
        let pos = reduced_gap(0.75, &four_thirds, n).map_err(fmt_err)?.slope_at_inv_p;
        ensure(neg < 0.0 && pos > 0.0, || format!("slope signs at n = {n}: {neg}, {pos}"))?;
    }
    Ok(format!("7 samples hold, min slack {min_slack:.2e}; slope sign table matches"))
}

fn inverse_root_claims() -> Outcome {
    let tol = Tolerance::default();
    for p in [3.0, 4.0, 10.0] {
        let r = inverse_root_weight_criterion(p, 10_000, tol).map_err(fmt_err)?;
        ensure(r.holds, || r.summary())?;
    }
    let r = inverse_root_weight_criterion(1.05, 10, tol).map_err(fmt_err)?;
    ensure(r.first_failure == Some(1), || r.summary())?;
    for p in [3.0, 5.0, 10.0] {
        let r = first_index_bound(p, &first_index_alpha_grid(p, 50), tol).map_err(fmt_err)?;
        ensure(r.holds, || r.summary())?;
    }
    for (p, alpha) in [(2.0, 1.0), (2.0, 1.5), (3.0, 4.0 / 3.0)] {
        let params = ExponentPair::forward(p).map_err(fmt_err)?;
        let r = shifted_power_weight_criterion(alpha, &params, 10_000, tol).map_err(fmt_err)?;
        ensure(r.holds, || r.summary())?;
    }
    Ok("inverse-root trial holds for p in {3,4,10}, fails at n=1 for p=1.05; first-index and shifted checks hold".into())
}

fn classic_hardy() -> Outcome {
    let n_max = 10_000;
    for p in [1.25, 2.0, 3.0] {
        let params = ExponentPair::forward(p).map_err(fmt_err)?;
        let w = knopp_sequence(&params, 0.0, n_max + 1).map_err(fmt_err)?;
        let lam = WeightSequence::constant(n_max + 1);
        let u = TargetConstant::hardy(&params).map_err(fmt_err)?;
        let r = knopp_criterion(&w, &lam, &params, &u, n_max, Tolerance::default()).map_err(fmt_err)?;
        ensure(r.holds, || r.summary())?;
    }
    let n = 100_000;
    let op = OperatorSpec::cesaro(n).map_err(fmt_err)?.with_tail_correction(true);
    let grid: Vec<SequenceFamily> = [0.5001, 0.501, 0.51]
        .iter()
        .map(|&s| SequenceFamily::new(FamilyKind::PowerDecay { s }, n))
        .collect::<Result<_, _>>()
        .map_err(fmt_err)?;
    let best = extremal_search(&op, 2.0, &grid).map_err(fmt_err)?;
    ensure(best.best_ratio > 1.9 && best.best_ratio < 2.0, || format!("best ratio {}", best.best_ratio))?;

    let mut checked = 0;
    for p in [1.25, 2.0, 3.0] {
        let q = p / (p - 1.0);
        let mut families: Vec<SequenceFamily> = Vec::new();
        for s in [0.5001, 0.501, 0.51, 0.8, 1.0, 2.0] {
            families.push(SequenceFamily::new(FamilyKind::PowerDecay { s }, 10_000).map_err(fmt_err)?);
        }
        for r in [0.5, 0.9, 0.99] {
            families.push(SequenceFamily::new(FamilyKind::Geometric { r }, 10_000).map_err(fmt_err)?);
        }
        families.push(SequenceFamily::new(FamilyKind::Delta, 10_000).map_err(fmt_err)?);
        for seed in DEFAULT_SEED..DEFAULT_SEED + 20 {
            families.push(SequenceFamily::new(FamilyKind::Random { seed }, 1000).map_err(fmt_err)?);
        }
        for f in &families {
            let op = OperatorSpec::cesaro(f.length).map_err(fmt_err)?.with_tail_correction(true);
            let r = norm_ratio(&op, f, p).map_err(fmt_err)?;
            let hi = r.corrected_ratio().map_or(r.ratio(), |(_, hi)| hi).max(r.ratio());
            ensure(hi <= q + 1e-9, || format!("p = {p}, {f:?}: ratio {hi} > q = {q}"))?;
            checked += 1;
        }
    }
    Ok(format!(
        "Knopp criterion holds for p in {{1.25,2,3}}; best Cesaro ratio {:.6} (s = {:?}); cap ratio <= q on {checked} sequences",
        best.best_ratio, best.best_family.kind
    ))
}

fn property_suites() -> Outcome {
    for n in 1..=1000 {
        for i in 0..=10 {
            let r = i as f64 / 10.0;
            let c = power_sum_bound_check(r, n, PowerSumBound::EndpointPower).map_err(fmt_err)?;
            ensure(c.holds, || format!("endpoint bound r = {r}, n = {n}"))?;
        }
        for r in [-0.9, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0] {
            let c = power_sum_bound_check(r, n, PowerSumBound::DifferenceQuotient).map_err(fmt_err)?;
            let expected = if r >= 1.0 { BoundDirection::AtLeast } else { BoundDirection::AtMost };
            ensure(c.holds && c.direction == expected, || format!("difference bound r = {r}, n = {n}"))?;
        }
    }
    let mut worst_forward = f64::INFINITY;
    let mut worst_tail = f64::INFINITY;
    for seed in DEFAULT_SEED..DEFAULT_SEED + 100 {
        let inst = forward_instance(seed);
        let r = forward_recurrent_residual(&inst.lambda, &inst.a, &inst.seqs, inst.p, inst.n).map_err(fmt_err)?;
        ensure(r >= -1e-12, || format!("forward residual {r} at seed {seed}"))?;
        worst_forward = worst_forward.min(r);
        let inst = tail_instance(seed);
        let r = tail_recurrent_residual(&inst.lambda, &inst.a, &inst.seqs, inst.p, inst.n).map_err(fmt_err)?;
        ensure(r.residual >= -1e-12, || format!("tail residual {} at seed {seed}", r.residual))?;
        worst_tail = worst_tail.min(r.residual);
    }
    let mut worst_step = f64::INFINITY;
    for (mu, eta, p, t) in step_grid(DEFAULT_SEED, 10_000) {
        let r = tail_recurrent_step_residual(mu, eta, p, t).map_err(fmt_err)?;
        ensure(r >= -1e-12, || format!("single step {r} at mu={mu}, eta={eta}, p={p}, t={t}"))?;
        worst_step = worst_step.min(r);
    }
    Ok(format!(
        "power-sum grids hold; min residuals: forward {worst_forward:.2e}, tail {worst_tail:.2e}, step {worst_step:.2e}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("redheffer constants", Duration::from_secs(1), redheffer_constants),
        ("reverse floor at p = 1/2", Duration::from_secs(30), reverse_floor_half),
        ("levin-steckin reverse machinery", Duration::from_secs(10), reverse_machinery),
        ("redheffer boundary algebra", Duration::from_secs(1), boundary_algebra),
        ("power-weight samples", Duration::from_secs(10), power_weight_samples),
        ("inverse-root weight claims", Duration::from_secs(10), inverse_root_claims),
        ("classic hardy bracketing", Duration::from_secs(60), classic_hardy),
        ("recurrent and power-sum suites", Duration::from_secs(10), property_suites),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if elapsed <= *limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; exceeded time limit {limit:?}")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "{status} criterion {} ({name}) [{:.3} s / limit {} s]: {detail}",
            i + 1,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
