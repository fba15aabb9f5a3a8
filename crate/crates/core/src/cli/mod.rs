//! Command-line front end for the `ratework` binary.
//!
//! Every command reads a problem configuration (see [`config`]) and prints
//! a CSV table, or JSON with `--json`. Exit status is 0 on success, 1 when
//! the input is rejected and 2 when a solver fails.

pub mod config;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::capacity::{capacity_point, mutual_information};
use crate::chain::ChainSystem;
use crate::error::Error;
use crate::multi::rate_two_distortions;
use crate::numeric::{self, DEFAULT_QUAD_TOL, DEFAULT_SOLVE_TOL};
use crate::oracle::{self, GridSearch, BA_MAX_ITER};
use crate::rd::{RdPoint, RdProblem};

pub use config::ProblemConfig;
pub use report::{Cell, Report};

/// Convergence threshold for Blahut–Arimoto runs that stand in for a
/// missing coding distribution.
const BA_TOL: f64 = 1e-13;

/// Force grid used by `rd curve` when `--grid` is absent.
const DEFAULT_GRID: &str = "-10:0:21";

#[derive(Debug, Parser)]
#[command(name = "ratework", version, about = "Rate functions and rate-distortion curves computed as work")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Problem configuration (JSON or `key = value` lines).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Solver / quadrature tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Force grid: `start:stop:count` or a comma-separated list.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Emit JSON instead of CSV.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rate–distortion curve and single points.
    Rd {
        #[command(subcommand)]
        command: RdCommand,
    },
    /// Channel capacity through the distortion `-ln W`.
    Capacity,
    /// Rate under two simultaneous distortion constraints.
    Rd2 {
        #[arg(long, allow_hyphen_values = true)]
        d1: f64,
        #[arg(long, allow_hyphen_values = true)]
        d2: f64,
    },
    /// Element-array emulator.
    Chain {
        #[command(subcommand)]
        command: ChainCommand,
    },
    /// Independent validation routes.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum RdCommand {
    /// One row per force in `--grid`.
    Curve,
    /// A single point, located by distortion or by force.
    Point {
        #[arg(long, allow_hyphen_values = true, conflicts_with = "force", required_unless_present = "force")]
        distortion: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        force: Option<f64>,
        /// Riemann sandwich bounds on a uniform partition with this many steps.
        #[arg(long)]
        bounds: Option<usize>,
        /// Report the equal-force per-letter allocation.
        #[arg(long)]
        allocation: bool,
        /// Also compute the rate as the integral of `s * mmse(s)`.
        #[arg(long)]
        integral_route: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum ChainCommand {
    /// Quasi-static work to raise the force from 0 to `--force`.
    Work {
        #[arg(long, allow_hyphen_values = true)]
        force: f64,
    },
    /// Force that holds the chain at a given mean length.
    Equilibrium {
        #[arg(long, allow_hyphen_values = true)]
        length: f64,
    },
    /// Work along a stepwise force schedule.
    Protocol {
        /// Comma-separated forces starting at 0.
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["steps", "force"])]
        schedule: Option<String>,
        /// Number of equal steps from 0 to `--force`.
        #[arg(long, requires = "force")]
        steps: Option<usize>,
        #[arg(long, allow_hyphen_values = true, requires = "steps")]
        force: Option<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Exact probability of a block distortion event.
    Exact {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        distortion: f64,
    },
    /// Blahut–Arimoto at a fixed slope.
    Ba {
        #[arg(long, allow_hyphen_values = true)]
        force: f64,
        #[arg(long, default_value_t = BA_MAX_ITER)]
        max_iter: usize,
    },
    /// Exhaustive per-letter allocation search.
    Alloc {
        #[arg(long, allow_hyphen_values = true)]
        distortion: f64,
        #[arg(long, default_value_t = 400)]
        points: usize,
    },
    /// Dense grid maximization of the Legendre objective.
    Grid {
        #[arg(long, allow_hyphen_values = true)]
        distortion: f64,
    },
}

/// A failed command: message plus exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: if e.is_numerical() { 2 } else { 1 }, message: e.to_string() }
    }
}

/// Parses `start:stop:count` (inclusive) or `a,b,c`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, Error> {
    let bad = |why: String| Error::invalid("grid", why);
    let number = |t: &str| t.trim().parse::<f64>().map_err(|_| bad(format!("cannot parse '{}'", t.trim())));
    let parts: Vec<&str> = spec.split(':').collect();
    let grid = match parts.as_slice() {
        [start, stop, count] => {
            let (a, b) = (number(start)?, number(stop)?);
            let n: usize = count.trim().parse().map_err(|_| bad(format!("bad count '{}'", count.trim())))?;
            match n {
                0 => return Err(bad("count must be positive".into())),
                1 => vec![a],
                _ => (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect(),
            }
        }
        [list] => list.split(',').filter(|t| !t.trim().is_empty()).map(number).collect::<Result<_, _>>()?,
        _ => return Err(bad(format!("expected start:stop:count or a list, got '{spec}'"))),
    };
    if grid.is_empty() {
        return Err(bad("empty grid".into()));
    }
    Ok(grid)
}

fn uniform_schedule(force: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|i| if i == steps { force } else { force * i as f64 / steps as f64 }).collect()
}

struct Context<'a> {
    cfg: ProblemConfig,
    global: &'a GlobalArgs,
}

impl Context<'_> {
    fn solve_tol(&self) -> f64 {
        self.global.tol.unwrap_or(DEFAULT_SOLVE_TOL)
    }

    fn quad_tol(&self) -> f64 {
        self.global.tol.unwrap_or(DEFAULT_QUAD_TOL)
    }

    fn fixed_q(&self) -> bool {
        self.cfg.coding_probs.is_some()
    }

    /// Problem whose coding distribution is Blahut–Arimoto optimal at `s`.
    fn optimized_problem(&self, s: f64) -> Result<RdProblem, Error> {
        let source = self.cfg.source_probs()?;
        let distortion = self.cfg.distortion()?;
        let ba = oracle::blahut_arimoto(&source, &distortion, s, BA_TOL, BA_MAX_ITER)?;
        RdProblem::new(source, ba.q_star, distortion)
    }

    /// Problem and force for a distortion target when `Q` is optimized:
    /// bisection on the slope over Blahut–Arimoto runs.
    fn optimized_at_distortion(&self, target: f64) -> Result<(RdProblem, f64), Error> {
        const S_NEAR_ZERO: f64 = -1e-9;
        let source = self.cfg.source_probs()?;
        let distortion = self.cfg.distortion()?;
        let ba_distortion = |s: f64| {
            oracle::blahut_arimoto(&source, &distortion, s, BA_TOL, BA_MAX_ITER).map(|b| b.distortion)
        };
        let top = ba_distortion(S_NEAR_ZERO)?;
        if target >= top {
            return Err(Error::invalid("distortion", format!("{target} is at or above the zero-rate distortion {top}")));
        }
        let min: f64 = source
            .iter()
            .zip(&distortion)
            .map(|(p, row)| p * row.iter().cloned().fold(f64::INFINITY, f64::min))
            .sum();
        if target <= min {
            return Err(Error::invalid("distortion", format!("{target} is not above the minimum achievable {min}")));
        }
        let failure = std::cell::Cell::new(None);
        let g = |s: f64| match ba_distortion(s) {
            Ok(d) => d,
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        };
        let s = numeric::solve_increasing(g, target, -1.0, S_NEAR_ZERO, self.solve_tol() * (top - min))
            .map_err(|_| Error::Numerical(format!("could not bracket the slope for distortion {target}")))?;
        if let Some(e) = failure.take() {
            return Err(e);
        }
        Ok((self.optimized_problem(s)?, s))
    }

    fn chain(&self, problem: &RdProblem) -> Result<ChainSystem, Error> {
        ChainSystem::from_rd_problem_with_k(problem, self.cfg.beta()?, self.cfg.boltzmann_k()?)
    }
}

fn letter_labels(prefix: &str, letters: &[usize]) -> Vec<String> {
    letters.iter().map(|x| format!("{prefix}{x}")).collect()
}

fn push_point(report: &mut Report, problem: &RdProblem, point: &RdPoint, rate: f64) {
    report.push("s", point.s);
    report.push("distortion", point.distortion);
    report.push("rate_nats", rate);
    report.push("mmse", point.mmse);
    for (label, mean) in letter_labels("mean_x", problem.source_letters()).into_iter().zip(&point.per_symbol_mean) {
        report.push(label, *mean);
    }
}

fn rd_curve(ctx: &Context) -> Result<Report, Error> {
    let grid = parse_grid(ctx.global.grid.as_deref().unwrap_or(DEFAULT_GRID))?;
    let mut rows = Vec::with_capacity(grid.len());
    let mut columns = vec!["s".to_string(), "distortion".into(), "rate_nats".into(), "mmse".into()];
    if ctx.fixed_q() {
        let problem = ctx.cfg.rd_problem()?;
        columns.extend(letter_labels("mean_x", problem.source_letters()));
        for p in problem.rd_curve(&grid)? {
            let mut row: Vec<Cell> = vec![p.s.into(), p.distortion.into(), p.rate.into(), p.mmse.into()];
            row.extend(p.per_symbol_mean.iter().map(|m| Cell::Num(*m)));
            rows.push(row);
        }
    } else {
        if let Some(s) = grid.iter().find(|s| !(s.is_finite() && **s <= 0.0)) {
            return Err(Error::invalid("grid", format!("force {s} is not a finite value <= 0")));
        }
        let mut sorted = grid.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        columns.push("q_star".into());
        for s in sorted {
            let problem = ctx.optimized_problem(s)?;
            let p = problem.distortion_at_force(s);
            let q = problem.coding_probs().iter().map(|v| report::format_number(*v)).collect::<Vec<_>>().join(" ");
            rows.push(vec![p.s.into(), p.distortion.into(), p.rate.into(), p.mmse.into(), Cell::Text(q)]);
        }
    }
    Ok(Report::Table { columns, rows })
}

fn rd_point(
    ctx: &Context,
    distortion: Option<f64>,
    force: Option<f64>,
    bounds: Option<usize>,
    allocation: bool,
    integral_route: bool,
) -> Result<Report, Error> {
    let mut report = Report::record();
    let (problem, point, rate, status) = match (distortion, force) {
        (_, Some(s)) => {
            if !(s.is_finite() && s <= 0.0) {
                return Err(Error::invalid("force", format!("must be finite and <= 0, got {s}")));
            }
            let problem = if ctx.fixed_q() { ctx.cfg.rd_problem()? } else { ctx.optimized_problem(s)? };
            let point = problem.distortion_at_force(s);
            let rate = point.rate;
            (problem, point, rate, "interior")
        }
        (Some(target), None) if ctx.fixed_q() => {
            let problem = ctx.cfg.rd_problem()?;
            match problem.force_at_distortion(target, ctx.solve_tol()) {
                Ok(point) => {
                    let rate = problem.rate_legendre(target)?;
                    (problem, point, rate, "interior")
                }
                Err(Error::DistortionAboveZeroForce { point, .. }) => {
                    let rate = point.rate;
                    (problem, *point, rate, "above_zero_force")
                }
                Err(Error::DistortionTooLow { boundary: Some(point), .. }) => {
                    let rate = point.rate;
                    (problem, *point, rate, "minimum_distortion")
                }
                Err(e) => return Err(e),
            }
        }
        (Some(target), None) => {
            let (problem, s) = ctx.optimized_at_distortion(target)?;
            let point = problem.distortion_at_force(s);
            let rate = point.rate;
            (problem, point, rate, "interior")
        }
        (None, None) => return Err(Error::invalid("distortion", "give --distortion or --force")),
    };
    push_point(&mut report, &problem, &point, rate);
    report.push("status", status);
    if !ctx.fixed_q() {
        for (label, q) in letter_labels("q_star_", problem.coding_letters()).into_iter().zip(problem.coding_probs()) {
            report.push(label, *q);
        }
    }
    let s = point.s;
    if let Some(steps) = bounds {
        if steps == 0 {
            return Err(Error::invalid("bounds", "need at least one step"));
        }
        if s.is_finite() && s < 0.0 {
            let (left, right) = problem.sandwich_bounds(&uniform_schedule(s, steps))?;
            report.push("bound_lower", left.min(right));
            report.push("bound_upper", left.max(right));
        } else {
            report.push("bound_lower", rate);
            report.push("bound_upper", rate);
        }
    }
    if allocation {
        let (alloc, alloc_rate) = problem.equal_force_allocation(point.distortion)?;
        for (label, d) in letter_labels("alloc_x", problem.source_letters()).into_iter().zip(&alloc.per_symbol_distortion)
        {
            report.push(label, *d);
        }
        report.push("allocation_rate", alloc_rate);
    }
    if integral_route && s.is_finite() {
        let integral = problem.rate_mmse_integral(s, ctx.quad_tol());
        report.push("rate_integral", integral);
        report.push("route_difference", (integral - rate).abs());
    }
    if let (Some(observable), true) = (&ctx.cfg.observable, s.is_finite()) {
        report.push("observable_direct", problem.observable_mean(observable, s)?);
        report.push("observable_sweep", problem.observable_sweep(observable, s, ctx.quad_tol())?);
    }
    Ok(report)
}

fn capacity(ctx: &Context) -> Result<Report, Error> {
    let channel = ctx.cfg.channel()?;
    let point = capacity_point(&channel)?;
    let mi = mutual_information(&channel);
    let mut report = Report::record();
    report.push("rate_nats", point.rate);
    report.push("s_star", point.s_star);
    report.push("distortion", point.delta);
    report.push("mutual_information", mi);
    report.push("difference", (point.rate - mi).abs());
    Ok(report)
}

fn rd2(ctx: &Context, d1: f64, d2: f64) -> Result<Report, Error> {
    let problem = ctx.cfg.rd_problem2()?;
    let r = rate_two_distortions(&problem, d1, d2, ctx.solve_tol())?;
    let mut report = Report::record();
    report.push("rate_nats", r.rate);
    report.push("s1", r.s1);
    report.push("s2", r.s2);
    report.push("active_1", !r.slack[0]);
    report.push("active_2", !r.slack[1]);
    report.push("iterations", r.iterations);
    Ok(report)
}

fn chain(ctx: &Context, command: &ChainCommand) -> Result<Report, Error> {
    let problem = ctx.cfg.rd_problem()?;
    let system = ctx.chain(&problem)?;
    let mut report = Report::record();
    match command {
        ChainCommand::Work { force } => {
            if !force.is_finite() {
                return Err(Error::invalid("force", "must be finite"));
            }
            let s = system.beta() * force;
            let work = system.quasistatic_work(*force, ctx.quad_tol());
            report.push("force", *force);
            report.push("s", s);
            report.push("length", system.expected_length(*force));
            report.push("work", work);
            if s <= 0.0 {
                let rate_scaled = problem.distortion_at_force(s).rate * system.thermal_energy();
                report.push("rate_times_kT", rate_scaled);
                report.push("difference", (work - rate_scaled).abs());
            }
        }
        ChainCommand::Equilibrium { length } => {
            let eq = system.equilibrium_force(*length, ctx.solve_tol())?;
            report.push("force", eq.force);
            report.push("s", system.beta() * eq.force);
            for (label, l) in letter_labels("length_x", problem.source_letters()).into_iter().zip(&eq.array_lengths) {
                report.push(label, *l);
            }
        }
        ChainCommand::Protocol { schedule, steps, force } => {
            let schedule = match (schedule, steps, force) {
                (Some(text), _, _) => parse_grid(text).map_err(|e| e.in_field("schedule"))?,
                (None, Some(n), Some(f)) if *n > 0 => uniform_schedule(*f, *n),
                _ => return Err(Error::invalid("schedule", "give --schedule or --steps N --force F")),
            };
            let (left, right) = system.protocol_sums(&schedule)?;
            let last = *schedule.last().expect("nonempty schedule");
            let quasi = system.quasistatic_work(last, ctx.quad_tol());
            report.push("steps", schedule.len() - 1);
            report.push("work", right);
            report.push("left_sum", left);
            report.push("quasistatic_work", quasi);
            report.push("excess", right - quasi);
        }
    }
    Ok(report)
}

fn oracle_cmd(ctx: &Context, command: &OracleCommand) -> Result<Report, Error> {
    let mut report = Report::record();
    match command {
        OracleCommand::Exact { n, distortion } => {
            let problem = ctx.cfg.rd_problem()?;
            let ld = oracle::exact_ld_probability(&problem, *n, *distortion)?;
            let rate = problem.rate_legendre(*distortion)?;
            report.push("n", *n);
            report.push("probability", ld.prob);
            report.push("exponent", ld.exponent);
            report.push("rate_nats", rate);
            report.push("gap", ld.exponent - rate);
        }
        OracleCommand::Ba { force, max_iter } => {
            let source = ctx.cfg.source_probs()?;
            let distortion = ctx.cfg.distortion()?;
            let ba = oracle::blahut_arimoto(&source, &distortion, *force, BA_TOL, *max_iter)?;
            let problem = RdProblem::new(source, ba.q_star.clone(), distortion)?;
            let point = problem.distortion_at_force(*force);
            for (j, q) in ba.q_star.iter().enumerate() {
                report.push(format!("q_star_{j}"), *q);
            }
            report.push("rate_nats", ba.rate);
            report.push("distortion", ba.distortion);
            report.push("iterations", ba.iterations);
            report.push("tilting_rate", point.rate);
            report.push("tilting_distortion", point.distortion);
            report.push("rate_difference", (ba.rate - point.rate).abs());
        }
        OracleCommand::Alloc { distortion, points } => {
            let problem = ctx.cfg.rd_problem()?;
            let search = oracle::brute_allocation_min(&problem, *distortion, *points)?;
            let rate = problem.rate_legendre(*distortion)?;
            report.push("brute_rate", search.rate);
            for (label, d) in letter_labels("alloc_x", problem.source_letters()).into_iter().zip(&search.allocation) {
                report.push(label, *d);
            }
            report.push("slack", search.slack);
            report.push("rate_nats", rate);
            report.push("excess", search.rate - rate);
        }
        OracleCommand::Grid { distortion } => {
            let problem = ctx.cfg.rd_problem()?;
            let grid_rate = oracle::legendre_grid_max(&problem, *distortion, GridSearch::default());
            let rate = problem.rate_legendre(*distortion)?;
            report.push("grid_rate", grid_rate);
            report.push("rate_nats", rate);
            report.push("difference", (grid_rate - rate).abs());
        }
    }
    Ok(report)
}

/// Runs a parsed command and returns its report.
pub fn execute(cli: &Cli) -> Result<Report, Failure> {
    if let Some(tol) = cli.global.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::invalid("tol", format!("must be positive, got {tol}")).into());
        }
    }
    let cfg = match &cli.global.config {
        Some(path) => ProblemConfig::load(path)?,
        None => return Err(Error::invalid("config", "missing --config").into()),
    };
    let ctx = Context { cfg, global: &cli.global };
    let report = match &cli.command {
        Command::Rd { command: RdCommand::Curve } => rd_curve(&ctx)?,
        Command::Rd { command: RdCommand::Point { distortion, force, bounds, allocation, integral_route } } => {
            rd_point(&ctx, *distortion, *force, *bounds, *allocation, *integral_route)?
        }
        Command::Capacity => capacity(&ctx)?,
        Command::Rd2 { d1, d2 } => rd2(&ctx, *d1, *d2)?,
        Command::Chain { command } => chain(&ctx, command)?,
        Command::Oracle { command } => oracle_cmd(&ctx, command)?,
    };
    Ok(report)
}

/// Entry point for the binary: parses `args`, runs, writes output and
/// returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return f.code;
        }
    };
    let text = if cli.global.json { report.to_json() } else { report.to_csv() };
    match &cli.global.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: output: cannot write {}: {e}", path.display());
                return 1;
            }
        }
        None => print!("{text}"),
    }
    0
}
