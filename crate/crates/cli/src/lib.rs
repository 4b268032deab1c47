//! Command-line front end for the `hardy-aux` workbench.
//!
//! Exit status: 0 when every verdict holds, 1 when some verdict fails, 2 for
//! invalid parameters.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod report;
mod verify;

use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hardy_aux::criteria::{
    first_index_alpha_grid, first_index_bound, inverse_root_weight_criterion, knopp_criterion,
    levin_steckin_criterion, power_weight_criterion, power_weight_range_established,
    shifted_power_weight_criterion, TargetConstant, Tolerance,
};
use hardy_aux::operator::{extremal_search, norm_ratio, FamilyKind, OperatorKind, OperatorSpec, SequenceFamily};
use hardy_aux::redheffer::{
    balance_half_residual, beta_from_balance, branch_condition, concave_start, curvature_condition,
    default_grids, minimal_k, scan_params, slope_condition, solve_balance_half, two_index_condition,
    RedhefferParams,
};
use hardy_aux::sequences::{knopp_sequence, WeightSequence};
use hardy_aux::{ExponentPair, DEFAULT_SEED};

pub use report::{OutputFormat, Report, Table, Verdict};
pub use verify::verify_paper;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid parameters: {0}")]
    Invalid(#[from] hardy_aux::Error),
    #[error("invalid parameters: {0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// Every error ends the run before any verdict exists, so all map to 2.
    pub fn exit_code(&self) -> u8 {
        2
    }

    /// True when the reader closed the output early (e.g. piped into `head`).
    pub fn is_broken_pipe(&self) -> bool {
        let io = match self {
            CliError::Io(e) => Some(e),
            CliError::Csv(e) => match e.kind() {
                csv::ErrorKind::Io(e) => Some(e),
                _ => None,
            },
            CliError::Json(e) => return e.io_error_kind() == Some(std::io::ErrorKind::BrokenPipe),
            _ => None,
        };
        io.is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe)
    }
}

#[derive(Debug, Parser)]
#[command(name = "hardy-aux", version, about = "Finite checks of Hardy-type auxiliary-sequence criteria")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Largest index checked (defaults depend on the command).
    #[arg(long, global = true)]
    pub n_max: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol_rel: f64,
    #[arg(long, global = true, default_value_t = 0.0)]
    pub tol_abs: f64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// Write the report to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ForwardArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Args)]
pub struct RedhefferArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub c: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: f64,
    /// Defaults to the smallest k passing the branch condition up to n-max.
    #[arg(long)]
    pub k: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OperatorArg {
    Cesaro,
    WeightedMean,
    Copson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Power,
    Delta,
    Geometric,
    Random,
}

#[derive(Debug, Clone, Args)]
pub struct OperatorArgs {
    #[arg(long, value_enum, default_value_t = OperatorArg::Cesaro)]
    pub operator: OperatorArg,
    /// Exponent of the weighted mean (weights i^(alpha-1)).
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long)]
    pub p: f64,
    /// Extend power-decay inputs beyond the truncation analytically.
    #[arg(long)]
    pub tail: bool,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Knopp's criterion with Knopp's sequence and weights n^alpha.
    CheckKnopp {
        #[command(flatten)]
        args: ForwardArgs,
        /// Target constant; defaults to ((alpha+1)p/((alpha+1)p-1))^p.
        #[arg(long = "U")]
        u: Option<f64>,
    },
    /// Power-weight criterion with its sharp constant.
    #[command(name = "check-2-20")]
    Check220 {
        #[command(flatten)]
        args: ForwardArgs,
    },
    /// Reverse criterion with the Levin-Steckin sequence.
    CheckReverse {
        #[arg(long)]
        p: f64,
    },
    /// Inverse-root trial sequence w_n = n^(-1/p).
    #[command(name = "check-2-30")]
    Check230 {
        #[arg(long)]
        p: f64,
    },
    /// First-index bound on an alpha grid over [0, 1/p].
    #[command(name = "check-2-4")]
    Check24 {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
    /// Shifted power trial sequence w_n = n^(alpha-1/p).
    #[command(name = "check-2-3")]
    Check23 {
        #[command(flatten)]
        args: ForwardArgs,
    },
    /// Balanced (c, beta) at p = 1/2 and the resulting constant k.
    RedhefferSolve {
        #[arg(long, default_value_t = 2.5)]
        c: f64,
    },
    /// Grid scan over (c, beta) for the smallest delivered k.
    RedhefferScan {
        #[arg(long)]
        p: f64,
    },
    /// Branch, slope and curvature conditions at one (p, c, beta, k).
    RedhefferCheck {
        #[command(flatten)]
        args: RedhefferArgs,
    },
    /// Norm ratio of one operator on one input family.
    NormRatio {
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long, value_enum, default_value_t = FamilyArg::Power)]
        family: FamilyArg,
        /// Decay exponent of the power family.
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        /// Ratio of the geometric family.
        #[arg(long, default_value_t = 0.5)]
        r: f64,
    },
    /// Extremal search over a power-decay or geometric parameter grid.
    ExtremalSearch {
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long, value_enum, default_value_t = FamilyArg::Power)]
        family: FamilyArg,
        /// Comma-separated family parameters (s for power, r for geometric,
        /// seeds for random).
        #[arg(long, value_delimiter = ',', default_value = "0.5001,0.501,0.51")]
        grid: Vec<f64>,
    },
    /// Every quantitative claim in one report.
    VerifyPaper,
}

/// A parsed invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub n_max: Option<usize>,
    pub seed: u64,
    pub tol: Tolerance,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        if cli.common.n_max == Some(0) {
            return Err(CliError::Usage("n-max must be at least 1".into()));
        }
        Ok(Self {
            command: cli.command.clone(),
            n_max: cli.common.n_max,
            seed: cli.common.seed.unwrap_or(DEFAULT_SEED),
            tol: Tolerance::new(cli.common.tol_abs, cli.common.tol_rel)?,
            format: cli.common.format,
        })
    }

    fn n_max_or(&self, default: usize) -> usize {
        self.n_max.unwrap_or(default)
    }
}

/// Exit status for a finished report.
pub fn exit_code(report: &Report) -> u8 {
    if report.all_hold() {
        0
    } else {
        1
    }
}

pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    let start = Instant::now();
    let mut report = dispatch(config)?;
    report.canonicalize();
    report.wall_time = start.elapsed().as_secs_f64();
    Ok(report)
}

fn forward_params(args: &ForwardArgs, report: &mut Report) -> Result<ExponentPair, CliError> {
    report.param("p", args.p);
    report.param("alpha", args.alpha);
    Ok(ExponentPair::forward(args.p)?)
}

fn dispatch(config: &RunConfig) -> Result<Report, CliError> {
    let tol = config.tol;
    match &config.command {
        Command::CheckKnopp { args, u } => {
            let mut report = Report::new("check-knopp");
            let params = forward_params(args, &mut report)?;
            let n = config.n_max_or(10_000);
            report.n_max = Some(n);
            let target = match u {
                Some(u) => TargetConstant::new(*u, "user supplied")?,
                None => TargetConstant::power_weight(args.alpha, &params)?,
            };
            report.param("U", target.value);
            let w = knopp_sequence(&params, args.alpha, n + 1)?;
            let lam = WeightSequence::power(args.alpha, n + 1);
            let r = knopp_criterion(&w, &lam, &params, &target, n, tol)?;
            report.push(Verdict::from_report("knopp_criterion", "eq:7", &r));
            Ok(report)
        }
        Command::Check220 { args } => {
            let mut report = Report::new("check-2-20");
            let params = forward_params(args, &mut report)?;
            let n = config.n_max_or(10_000);
            report.n_max = Some(n);
            let r = power_weight_criterion(args.alpha, &params, n, tol)?;
            let v = Verdict::from_report("power_weight_criterion", "(2.20)", &r);
            report.push(if power_weight_range_established(args.p, args.alpha) {
                v
            } else {
                v.note("outside the established parameter range")
            });
            Ok(report)
        }
        Command::CheckReverse { p } => {
            let mut report = Report::new("check-reverse");
            report.param("p", *p);
            let n = config.n_max_or(10_000);
            report.n_max = Some(n);
            let r = levin_steckin_criterion(*p, n, tol)?;
            report.push(Verdict::from_report("reverse_criterion", "(3.1)", &r));
            Ok(report)
        }
        Command::Check230 { p } => {
            let mut report = Report::new("check-2-30");
            report.param("p", *p);
            let n = config.n_max_or(10_000);
            report.n_max = Some(n);
            let r = inverse_root_weight_criterion(*p, n, tol)?;
            report.push(Verdict::from_report("inverse_root_weight", "(2.30)", &r));
            Ok(report)
        }
        Command::Check24 { p, points } => {
            let mut report = Report::new("check-2-4");
            report.param("p", *p);
            report.param("points", *points as u64);
            if *points == 0 {
                return Err(CliError::Usage("points must be at least 1".into()));
            }
            let r = first_index_bound(*p, &first_index_alpha_grid(*p, *points), tol)?;
            report.push(Verdict::from_report("first_index_bound", "(2.4)", &r));
            Ok(report)
        }
        Command::Check23 { args } => {
            let mut report = Report::new("check-2-3");
            let params = forward_params(args, &mut report)?;
            let n = config.n_max_or(10_000);
            report.n_max = Some(n);
            let r = shifted_power_weight_criterion(args.alpha, &params, n, tol)?;
            report.push(Verdict::from_report("shifted_power_weight", "(2.3)", &r));
            Ok(report)
        }
        Command::RedhefferSolve { c } => redheffer_solve(*c, config.n_max_or(10_000)),
        Command::RedhefferScan { p } => redheffer_scan(*p, config.n_max_or(200)),
        Command::RedhefferCheck { args } => redheffer_check(args, config.n_max_or(10_000)),
        Command::NormRatio { op, family, s, r } => {
            let mut report = Report::new("norm-ratio");
            let n = config.n_max_or(10_000);
            report.n_max = Some(n);
            let spec = operator_spec(op, n, &mut report)?;
            let value = match family {
                FamilyArg::Power => *s,
                FamilyArg::Geometric => *r,
                _ => 0.0,
            };
            let fam = family_of(*family, value, config.seed, n)?;
            report.param("family", format!("{:?}", fam.kind));
            let ratio = norm_ratio(&spec, &fam, op.p)?;
            let mut v = Verdict::flag("norm_ratio", "norm ratio", true)
                .value("ratio", ratio.ratio())
                .value("power_sum_ratio", ratio.power_sum_ratio());
            if let Some((lo, hi)) = ratio.corrected_ratio() {
                v = v.value("corrected_lower", lo).value("corrected_upper", hi);
            }
            report.push(v);
            if op.p > 1.0 {
                let q = op.p / (op.p - 1.0);
                if let OperatorKind::WeightedMean { alpha: 1.0 } = spec.kind {
                    report.push(
                        Verdict::flag("hardy_cap", "(1)", ratio.ratio() <= q + 1e-9).value("q", q),
                    );
                }
            }
            Ok(report)
        }
        Command::ExtremalSearch { op, family, grid } => {
            let mut report = Report::new("extremal-search");
            let n = config.n_max_or(100_000);
            report.n_max = Some(n);
            let spec = operator_spec(op, n, &mut report)?;
            report.param("family", format!("{family:?}").to_lowercase());
            report.param("grid", grid.iter().map(|g| format!("{g}")).collect::<Vec<_>>().join(","));
            let families = grid
                .iter()
                .map(|&g| family_of(*family, g, g as u64, n))
                .collect::<Result<Vec<_>, _>>()?;
            let res = extremal_search(&spec, op.p, &families)?;
            report.push(
                Verdict::flag("extremal_search", "norm bracket", true)
                    .value("best_ratio", res.best_ratio)
                    .note(format!("best family {:?}", res.best_family.kind)),
            );
            let mut rows = Vec::new();
            for (f, r) in &res.evaluations {
                let (lo, hi) = r.corrected_ratio().unwrap_or((f64::NAN, f64::NAN));
                rows.push(vec![
                    format!("{:?}", f.kind),
                    r.ratio().to_string(),
                    lo.to_string(),
                    hi.to_string(),
                ]);
            }
            report.table = Some(Table {
                header: ["family", "ratio", "corrected_lower", "corrected_upper"].map(String::from).to_vec(),
                rows,
            });
            Ok(report)
        }
        Command::VerifyPaper => Ok(verify_paper(config.n_max_or(10_000), config.seed)),
    }
}

fn operator_spec(op: &OperatorArgs, n: usize, report: &mut Report) -> Result<OperatorSpec, CliError> {
    report.param("p", op.p);
    report.param("tail", op.tail);
    let spec = match op.operator {
        OperatorArg::Cesaro => OperatorSpec::cesaro(n)?,
        OperatorArg::WeightedMean => {
            report.param("alpha", op.alpha);
            OperatorSpec::weighted_mean(op.alpha, n)?
        }
        OperatorArg::Copson => OperatorSpec::copson_tail(n)?,
    };
    report.param("operator", format!("{:?}", op.operator).to_lowercase());
    Ok(spec.with_tail_correction(op.tail))
}

fn family_of(kind: FamilyArg, value: f64, seed: u64, n: usize) -> Result<SequenceFamily, CliError> {
    let kind = match kind {
        FamilyArg::Power => FamilyKind::PowerDecay { s: value },
        FamilyArg::Delta => FamilyKind::Delta,
        FamilyArg::Geometric => FamilyKind::Geometric { r: value },
        FamilyArg::Random => FamilyKind::Random { seed },
    };
    Ok(SequenceFamily::new(kind, n)?)
}

fn redheffer_solve(c: f64, n_max: usize) -> Result<Report, CliError> {
    let mut report = Report::new("redheffer-solve");
    report.param("c", c);
    report.param("p", 0.5);
    report.n_max = Some(n_max);
    if !(c > 0.0) {
        return Err(CliError::Usage(format!("c must be positive, got {c}")));
    }
    let c_prime = 1.0 / c;
    let x = solve_balance_half(c_prime)?;
    let beta = beta_from_balance(c, x);
    let residual = balance_half_residual(c_prime, x);
    report.push(
        Verdict::flag("balance_root", "§5", residual.abs() < 1e-12)
            .value("x", x)
            .value("beta", beta)
            .value("residual", residual),
    );
    let k = minimal_k(0.5, c, beta, n_max.max(2))?;
    report.push(
        Verdict::flag("reciprocal_constant", "Theorem 6", 1.0 / k > 0.8967)
            .value("k", k)
            .value("reciprocal", 1.0 / k),
    );
    Ok(report)
}

fn redheffer_check(args: &RedhefferArgs, n_max: usize) -> Result<Report, CliError> {
    let mut report = Report::new("redheffer-check");
    report.param("p", args.p);
    report.param("c", args.c);
    report.param("beta", args.beta);
    let n_max = n_max.max(2);
    report.n_max = Some(n_max);
    let params = match args.k {
        Some(k) => RedhefferParams::new(args.p, args.c, args.beta, k)?,
        None => RedhefferParams::with_minimal_k(args.p, args.c, args.beta, n_max)?,
    };
    report.param("k", params.k());
    let check = branch_condition(&params, n_max)?;
    let mut v = Verdict::from_report("branch_condition", "(6.49)", &check.report)
        .value("first_branch", check.first_branch)
        .value("two_branch", check.two_branch)
        .value("target", check.target);
    if let Some(red) = check.reduction {
        v = v.value("reduction_holds", f64::from(u8::from(red)));
    }
    report.push(v);
    report.push(Verdict::flag("reduction_agreement", "(6.51)", check.agree));
    report.push(Verdict::flag("two_index_condition", "(6.51)", two_index_condition(&params)));
    let slope = slope_condition(&params);
    // The slope condition is optional when the curvature route applies.
    let curvature = if args.p < 0.5 {
        Some(curvature_condition(args.p, args.beta)?)
    } else {
        None
    };
    report.push(
        Verdict::flag("slope_condition", "(6.50)", slope || concave_start(&params))
            .value("strict", f64::from(u8::from(slope)))
            .value("concave_start", f64::from(u8::from(concave_start(&params))))
            .note("holds strictly, or at the boundary with f''(0) < 0"),
    );
    if let Some(cur) = curvature {
        report.push(Verdict::flag("curvature_condition", "(6.54)", cur).exploratory(slope));
    }
    Ok(report)
}

fn redheffer_scan(p: f64, n_max: usize) -> Result<Report, CliError> {
    let mut report = Report::new("redheffer-scan");
    report.param("p", p);
    let n_max = n_max.max(2);
    report.n_max = Some(n_max);
    let (c_grid, beta_grid) = default_grids();
    let res = scan_params(p, &c_grid, &beta_grid, n_max)?;
    let mut v = Verdict::flag("scan_feasible", "(6.50)-(6.54)", res.best.is_some())
        .value("feasible_points", res.feasible_count as f64)
        .value("points", res.points.len() as f64)
        .exploratory(!(p > 0.0 && p <= 1.0 / 3.0) && p != 0.5 && p != 0.34);
    if let Some(b) = res.best {
        v = v.value("c", b.c).value("beta", b.beta).value("k", b.k).value("k_min", b.k_min);
    } else {
        v = v.note("no feasible grid point");
    }
    report.push(v);
    report.table = Some(Table {
        header: ["c", "beta", "k_min", "k", "route", "two_index", "direct", "feasible"]
            .map(String::from)
            .to_vec(),
        rows: res
            .points
            .iter()
            .map(|pt| {
                vec![
                    pt.c.to_string(),
                    pt.beta.to_string(),
                    pt.k_min.to_string(),
                    pt.k.to_string(),
                    pt.route.map(|r| format!("{r:?}").to_lowercase()).unwrap_or_default(),
                    pt.two_index.to_string(),
                    pt.direct.to_string(),
                    pt.feasible.to_string(),
                ]
            })
            .collect(),
    });
    Ok(report)
}
