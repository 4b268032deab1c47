//! The `verify-paper` aggregate: one verdict per quantitative claim.
//!
//! Claims quantified over all n are checked up to `n_max` only.

use hardy_aux::criteria::{
    first_index_alpha_grid, first_index_bound, inverse_root_weight_criterion, knopp_criterion,
    levin_steckin_criterion, power_weight_criterion, reduced_gap, shifted_power_weight_criterion,
    TargetConstant, Tolerance,
};
use hardy_aux::operator::{extremal_search, norm_ratio, FamilyKind, OperatorSpec, SequenceFamily};
use hardy_aux::redheffer::{
    beta_from_balance, curvature_condition, default_grids, forward_instance, forward_recurrent_residual,
    minimal_k, scan_params, solve_balance_half, step_grid, tail_instance, tail_recurrent_residual,
    tail_recurrent_step_residual, two_index_condition, RedhefferParams,
};
use hardy_aux::sequences::{
    knopp_sequence, levin_steckin_identity_residual, levin_steckin_sequence, power_sum_bound_check,
    BoundDirection, PowerSumBound, WeightSequence,
};
use hardy_aux::{ExponentPair, Result};

use crate::report::{Report, Verdict};

type Check = Box<dyn Fn() -> Result<Vec<Verdict>>>;

const FORWARD_SAMPLES: [(f64, f64); 7] =
    [(2.0, 0.0), (2.0, 0.3), (2.0, 0.5), (3.0, 0.2), (4.0 / 3.0, 0.75), (1.25, 0.9), (1.1, 1.0)];

/// Runs every check and collects the verdicts. Errors inside a check become
/// failing verdicts rather than aborting the run.
pub fn verify_paper(n_max: usize, seed: u64) -> Report {
    let mut report = Report::new("verify-paper");
    report.n_max = Some(n_max);
    report.seed = Some(seed);
    let checks: Vec<(&str, &str, Check)> = vec![
        ("redheffer_half", "§5", Box::new(move || redheffer_half(n_max))),
        ("redheffer_p034", "§5", Box::new(redheffer_p034)),
        ("boundary_third", "(6.49)", Box::new(boundary_third)),
        ("reverse_floor_half", "Theorem 6", Box::new(move || reverse_floor_half(seed))),
        ("reverse", "(3.1)", Box::new(move || reverse(n_max))),
        ("power_weight", "(2.20)", Box::new(move || power_weight(n_max))),
        ("inverse_root", "(2.30)", Box::new(move || inverse_root(n_max))),
        ("classic_hardy", "eq:7", Box::new(move || classic_hardy(n_max, seed))),
        ("recurrent_suites", "(6.1)", Box::new(move || recurrent_suites(seed))),
    ];
    for (name, paper_ref, check) in checks {
        match check() {
            Ok(vs) => vs.into_iter().for_each(|v| report.push(v)),
            Err(e) => report.push(Verdict::flag(name, paper_ref, false).note(format!("error: {e}"))),
        }
    }
    report
}

fn redheffer_half(n_max: usize) -> Result<Vec<Verdict>> {
    let x = solve_balance_half(0.4)?;
    let beta = beta_from_balance(2.5, x);
    let k = minimal_k(0.5, 2.5, beta, n_max.max(2))?;
    Ok(vec![
        Verdict::flag("redheffer_balance_half", "§5", (x - 0.2435).abs() < 5e-4 && (beta - 0.3912).abs() < 5e-4)
            .value("x", x)
            .value("beta", beta),
        Verdict::flag("redheffer_k_half", "§5", (k - 1.1151).abs() < 1e-3).value("k", k),
        Verdict::flag("reciprocal_k_half", "Theorem 6", 1.0 / k > 0.8967).value("reciprocal_k", 1.0 / k),
    ])
}

fn redheffer_p034() -> Result<Vec<Verdict>> {
    let p = 0.34;
    let c = 1.0 / p - 1.0;
    let params = RedhefferParams::new(p, c, 0.21, c.powf(p))?;
    let (c_grid, beta_grid) = default_grids();
    let scan = scan_params(p, &c_grid, &beta_grid, 200)?;
    let mut scan_v = Verdict::flag("redheffer_p034_feasible", "§5", scan.best.is_some())
        .value("feasible_points", scan.feasible_count as f64);
    if let Some(b) = scan.best {
        scan_v = scan_v.value("c", b.c).value("beta", b.beta).value("k", b.k);
    }
    Ok(vec![
        Verdict::flag("redheffer_p034_two_index", "(6.51)", two_index_condition(&params))
            .value("first_branch", params.first_branch())
            .value("n2_branch", params.index_branch(2))
            .value("target", params.target()),
        Verdict::flag("redheffer_p034_curvature", "(6.54)", curvature_condition(p, 0.21)?),
        scan_v,
    ])
}

fn boundary_third() -> Result<Vec<Verdict>> {
    let beta = 3.0 - 2.0 * 2f64.sqrt();
    let r = RedhefferParams::new(1.0 / 3.0, 2.0, beta, 2f64.cbrt())?;
    let rel = (r.first_branch() - r.target()).abs() / r.target();
    let two = r.index_branch(2);
    Ok(vec![
        Verdict::flag("boundary_third_first_branch", "(6.49)", rel <= 1e-12).value("relative_error", rel),
        Verdict::flag("boundary_third_two_index", "(6.51)", two <= 2.0 && two_index_condition(&r))
            .value("n2_branch", two),
        Verdict::flag("boundary_third_curvature", "(6.54)", curvature_condition(1.0 / 3.0, beta)?),
    ])
}

fn reverse_floor_half(seed: u64) -> Result<Vec<Verdict>> {
    let floor = 0.8967 - 1e-9;
    let op = OperatorSpec::copson_tail(1000)?;
    let mut worst = f64::INFINITY;
    for s in seed..seed + 200 {
        let f = SequenceFamily::new(FamilyKind::Random { seed: s }, 1000)?;
        worst = worst.min(norm_ratio(&op, &f, 0.5)?.power_sum_ratio());
    }
    let mut out = vec![Verdict::flag("reverse_floor_random", "Theorem 6", worst >= floor).value("min_ratio", worst)];
    let op = OperatorSpec::copson_tail(10_000)?.with_tail_correction(true);
    for s in [1.5, 2.0, 3.0] {
        let f = SequenceFamily::new(FamilyKind::PowerDecay { s }, 10_000)?;
        let r = norm_ratio(&op, &f, 0.5)?;
        let lower = r.tail.map_or(f64::NAN, |t| t.lower);
        out.push(
            Verdict::flag(format!("reverse_floor_power_s{s}"), "Theorem 6", r.power_sum_ratio() >= floor && lower >= floor)
                .value("truncated", r.power_sum_ratio())
                .value("corrected_lower", lower),
        );
    }
    Ok(out)
}

fn reverse(n_max: usize) -> Result<Vec<Verdict>> {
    let mut out = Vec::new();
    for (label, p) in [("0.1", 0.1), ("0.2", 0.2), ("0.25", 0.25), ("1/3", 1.0 / 3.0)] {
        let r = levin_steckin_criterion(p, n_max, Tolerance::default())?;
        out.push(Verdict::from_report(format!("reverse_criterion_p{label}"), "(3.1)", &r));
        let seq = levin_steckin_sequence(p, n_max)?;
        let mut worst: f64 = 0.0;
        for n in 1..=n_max {
            worst = worst.max(levin_steckin_identity_residual(&seq, p, n)?);
        }
        out.push(
            Verdict::flag(format!("reverse_identity_p{label}"), "(3.3)", worst <= 1e-12).value("max_residual", worst),
        );
    }
    Ok(out)
}

fn power_weight(n_max: usize) -> Result<Vec<Verdict>> {
    let mut out = Vec::new();
    for (p, alpha) in FORWARD_SAMPLES {
        let params = ExponentPair::forward(p)?;
        let r = power_weight_criterion(alpha, &params, n_max, Tolerance::default())?;
        out.push(Verdict::from_report(format!("power_weight_p{p:.4}_a{alpha}"), "(2.20)", &r));
    }
    let two = ExponentPair::forward(2.0)?;
    let four_thirds = ExponentPair::forward(4.0 / 3.0)?;
    let mut signs = true;
    for n in 1..=100 {
        signs &= reduced_gap(0.5, &two, n)?.slope_at_inv_p < 0.0;
        signs &= reduced_gap(0.75, &four_thirds, n)?.slope_at_inv_p > 0.0;
    }
    out.push(Verdict::flag("power_weight_slope_signs", "(2.23)", signs));
    Ok(out)
}

fn inverse_root(n_max: usize) -> Result<Vec<Verdict>> {
    let tol = Tolerance::default();
    let mut out = Vec::new();
    for p in [3.0, 4.0, 10.0] {
        let r = inverse_root_weight_criterion(p, n_max, tol)?;
        out.push(Verdict::from_report(format!("inverse_root_p{p}"), "(2.30)", &r));
    }
    let r = inverse_root_weight_criterion(1.05, 10, tol)?;
    out.push(
        Verdict::flag("inverse_root_p1.05_fails_at_1", "(2.30)", r.first_failure == Some(1))
            .note("expected failure at n = 1"),
    );
    for p in [3.0, 5.0, 10.0] {
        let r = first_index_bound(p, &first_index_alpha_grid(p, 50), tol)?;
        out.push(Verdict::from_report(format!("first_index_p{p}"), "(2.4)", &r));
    }
    for (p, alpha) in [(2.0, 1.0), (2.0, 1.5), (3.0, 4.0 / 3.0)] {
        let params = ExponentPair::forward(p)?;
        let r = shifted_power_weight_criterion(alpha, &params, n_max, tol)?;
        out.push(Verdict::from_report(format!("shifted_power_p{p}_a{alpha:.4}"), "(2.3)", &r));
    }
    Ok(out)
}

fn classic_hardy(n_max: usize, seed: u64) -> Result<Vec<Verdict>> {
    let mut out = Vec::new();
    for p in [1.25, 2.0, 3.0] {
        let params = ExponentPair::forward(p)?;
        let w = knopp_sequence(&params, 0.0, n_max + 1)?;
        let lam = WeightSequence::constant(n_max + 1);
        let u = TargetConstant::hardy(&params)?;
        let r = knopp_criterion(&w, &lam, &params, &u, n_max, Tolerance::default())?;
        out.push(Verdict::from_report(format!("knopp_classic_p{p}"), "eq:7", &r));
    }
    let n = 100_000;
    let op = OperatorSpec::cesaro(n)?.with_tail_correction(true);
    let grid = [0.5001, 0.501, 0.51]
        .iter()
        .map(|&s| SequenceFamily::new(FamilyKind::PowerDecay { s }, n))
        .collect::<Result<Vec<_>>>()?;
    let best = extremal_search(&op, 2.0, &grid)?;
    out.push(
        Verdict::flag("cesaro_extremal_p2", "(1)", best.best_ratio > 1.9 && best.best_ratio < 2.0)
            .value("best_ratio", best.best_ratio),
    );

    let mut worst_gap = f64::INFINITY;
    for p in [1.25, 2.0, 3.0] {
        let q = p / (p - 1.0);
        let mut families = Vec::new();
        for s in [0.5001, 0.501, 0.51, 0.8, 1.0, 2.0] {
            families.push(SequenceFamily::new(FamilyKind::PowerDecay { s }, 10_000)?);
        }
        for r in [0.5, 0.9, 0.99] {
            families.push(SequenceFamily::new(FamilyKind::Geometric { r }, 10_000)?);
        }
        families.push(SequenceFamily::new(FamilyKind::Delta, 10_000)?);
        for s in seed..seed + 20 {
            families.push(SequenceFamily::new(FamilyKind::Random { seed: s }, 1000)?);
        }
        for f in &families {
            let op = OperatorSpec::cesaro(f.length)?.with_tail_correction(true);
            let r = norm_ratio(&op, f, p)?;
            let hi = r.corrected_ratio().map_or(r.ratio(), |(_, hi)| hi).max(r.ratio());
            worst_gap = worst_gap.min(q - hi);
        }
    }
    out.push(Verdict::flag("cesaro_cap", "(1)", worst_gap >= -1e-9).value("min_gap_to_q", worst_gap));
    Ok(out)
}

fn recurrent_suites(seed: u64) -> Result<Vec<Verdict>> {
    let mut power_sums_ok = true;
    for n in 1..=1000 {
        for i in 0..=10 {
            power_sums_ok &= power_sum_bound_check(i as f64 / 10.0, n, PowerSumBound::EndpointPower)?.holds;
        }
        for r in [-0.9, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0] {
            let c = power_sum_bound_check(r, n, PowerSumBound::DifferenceQuotient)?;
            let expected = if r >= 1.0 { BoundDirection::AtLeast } else { BoundDirection::AtMost };
            power_sums_ok &= c.holds && c.direction == expected;
        }
    }
    let mut forward = f64::INFINITY;
    let mut tail = f64::INFINITY;
    let mut warnings = 0;
    for s in seed..seed + 100 {
        let inst = forward_instance(s);
        forward = forward.min(forward_recurrent_residual(&inst.lambda, &inst.a, &inst.seqs, inst.p, inst.n)?);
        let inst = tail_instance(s);
        let r = tail_recurrent_residual(&inst.lambda, &inst.a, &inst.seqs, inst.p, inst.n)?;
        tail = tail.min(r.residual);
        warnings += usize::from(r.truncation_warning.is_some());
    }
    let mut step = f64::INFINITY;
    for (mu, eta, p, t) in step_grid(seed, 10_000) {
        step = step.min(tail_recurrent_step_residual(mu, eta, p, t)?);
    }
    let mut tail_v = Verdict::flag("tail_recurrent", "(6.5)", tail >= -1e-12).value("min_residual", tail);
    if warnings > 0 {
        tail_v = tail_v.note(format!("{warnings} instances with a non-negligible truncated tail"));
    }
    Ok(vec![
        Verdict::flag("power_sum_bounds", "(4), (201)", power_sums_ok),
        Verdict::flag("forward_recurrent", "(6.1)", forward >= -1e-12).value("min_residual", forward),
        tail_v,
        Verdict::flag("single_step_recurrent", "(6.6)", step >= -1e-12).value("min_residual", step),
    ])
}
