//! Command-line front end. [`run`] parses arguments, dispatches one
//! subcommand and returns the process exit code:
//! 0 on success, 1 on a computation failure or failed verification,
//! 2 on a usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use star_steiner::analytic::{
    c_d_quadrature, c_d_recurrence, g2_closed_form, g2_relaxation, g3_bounds, rho_upper, table1,
    theorem3_envelope, UniformConstant,
};
use star_steiner::matching::{max_matching_with, MatchingMode};
use star_steiner::pointfile::{format_points, read_points};
use star_steiner::search::{maximize, Objective, SearchSpec, StepSchedule};
use star_steiner::stars::{min_star, ratio_report_with};
use star_steiner::verify::{run_all, VerifyConfig};
use star_steiner::weber::{self, WeberOptions, DEFAULT_MAX_ITERS, DEFAULT_TOL};
use star_steiner::Configuration;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    #[value(name = "steiner_ratio", alias = "steiner-ratio")]
    SteinerRatio,
    #[value(name = "sphere_sum", alias = "sphere-sum")]
    SphereSum,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::SteinerRatio => Objective::SteinerRatio,
            ObjectiveArg::SphereSum => Objective::SphereSum,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "star-steiner",
    version,
    about = "Star Steiner ratios, matchings and sphere constants"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// CSV point file, one point per line.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// Weiszfeld residual tolerance per point.
    #[arg(long, default_value_t = DEFAULT_TOL, value_parser = positive_f64)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    max_iters: u64,
}

impl SolverArgs {
    fn options(&self) -> WeberOptions {
        WeberOptions {
            tol: self.tol,
            max_iters: self.max_iters as usize,
            ..Default::default()
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Star Steiner ratio of a point set, with every applicable bound.
    Ratio {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Weber center and minimum Steiner star length.
    Weber {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Star lengths centered at every input point.
    Minstar {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Maximum-weight perfect matching (exact for up to 20 points).
    Matching {
        #[command(flatten)]
        input: InputArgs,
        /// Greedy approximation instead of the exact solver.
        #[arg(long)]
        greedy: bool,
    },
    /// Uniform-distribution constant c_D by recurrence and quadrature.
    Constants {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=100_000))]
        dim: u64,
        /// Quadrature tolerance.
        #[arg(long, default_value_t = 1e-12, value_parser = positive_f64)]
        tol: f64,
    },
    /// Table of lower and upper bounds on the star Steiner ratios.
    Table1,
    /// Maximum pairwise distance sum of N points on the unit sphere in R^D.
    Gsum {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..=100_000))]
        dim: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        n: u64,
    },
    /// Seeded hill-climbing search for extremal configurations.
    Search {
        #[arg(long, value_enum)]
        objective: ObjectiveArg,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        n: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        dim: u64,
        #[arg(long, env = "STEINER_SEED", default_value_t = 0)]
        seed: u64,
        /// Iterations per restart.
        #[arg(long, default_value_t = 20_000, value_parser = clap::value_parser!(u64).range(1..))]
        iters: u64,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
        restarts: u64,
        #[arg(long, default_value_t = 0.3, value_parser = positive_f64)]
        step: f64,
        #[arg(long, default_value_t = 0.999, value_parser = unit_interval)]
        decay: f64,
        /// Write the best configuration as a CSV point file.
        #[arg(long)]
        config_out: Option<PathBuf>,
        /// Write the checkpoint history as CSV.
        #[arg(long)]
        history_out: Option<PathBuf>,
    },
    /// Run the full invariant suite; exits 1 if any check fails.
    Verify {
        /// Random instances per dimension.
        #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
        instances: u64,
        #[arg(long, env = "STEINER_SEED", default_value_t = 0)]
        seed: u64,
    },
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("{v} is not a positive number")),
        Err(e) => Err(e.to_string()),
    }
}

fn unit_interval(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v <= 1.0 => Ok(v),
        Ok(v) => Err(format!("{v} is not in (0, 1]")),
        Err(e) => Err(e.to_string()),
    }
}

/// Outcome of a subcommand: rendered output plus whether it succeeded.
struct Report {
    body: String,
    ok: bool,
}

impl Report {
    fn ok(body: String) -> Self {
        Report { body, ok: true }
    }
}

type CmdResult = Result<Report, String>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(report) => {
            let _ = write!(out, "{}", report.body);
            if report.ok {
                0
            } else {
                1
            }
        }
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn load(input: &InputArgs) -> Result<Configuration, String> {
    read_points(&input.input).map_err(|e| format!("{}: {e}", input.input.display()))
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| e.to_string())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.6}"))
}

fn fmt_point(p: &[f64]) -> String {
    let coords: Vec<String> = p.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", coords.join(", "))
}

fn dispatch(cli: &Cli) -> CmdResult {
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::Ratio { input, solver } => cmd_ratio(&load(input)?, solver, json),
        Command::Weber { input, solver } => cmd_weber(&load(input)?, solver, json),
        Command::Minstar { input } => cmd_minstar(&load(input)?, json),
        Command::Matching { input, greedy } => cmd_matching(&load(input)?, *greedy, json),
        Command::Constants { dim, tol } => cmd_constants(*dim as usize, *tol, json),
        Command::Table1 => {
            let t = table1();
            Ok(Report::ok(if json { to_json(&t)? } else { t.to_text() }))
        }
        Command::Gsum { dim, n } => cmd_gsum(*dim as usize, *n as usize, json),
        Command::Search {
            objective,
            n,
            dim,
            seed,
            iters,
            restarts,
            step,
            decay,
            config_out,
            history_out,
        } => {
            let spec = SearchSpec {
                n: *n as usize,
                d: *dim as usize,
                seed: *seed,
                iterations: *iters as usize,
                objective: (*objective).into(),
                step_schedule: StepSchedule {
                    initial: *step,
                    decay: *decay,
                },
                restarts: *restarts as usize,
            };
            cmd_search(&spec, config_out.as_ref(), history_out.as_ref(), json)
        }
        Command::Verify { instances, seed } => cmd_verify(
            &VerifyConfig {
                instances: *instances,
                seed: *seed,
            },
            json,
        ),
    }
}

fn cmd_ratio(c: &Configuration, solver: &SolverArgs, json: bool) -> CmdResult {
    let r = ratio_report_with(c, &solver.options()).map_err(|e| e.to_string())?;
    if json {
        return Ok(Report::ok(to_json(&r)?));
    }
    let mut s = String::new();
    let _ = writeln!(s, "n               {}", r.n);
    let _ = writeln!(s, "d               {}", r.d);
    let _ = writeln!(s, "steiner_length  {:.6}", r.steiner_length);
    let _ = writeln!(
        s,
        "min_star        {:.6} (index {})",
        r.min_star, r.min_index
    );
    let _ = writeln!(s, "ratio           {:.6}", r.ratio);
    let _ = writeln!(s, "delta           {}", fmt_opt(r.delta));
    let _ = writeln!(s, "bound_fm        {}", fmt_opt(r.bound_fm));
    let _ = writeln!(s, "bound_avg       {}", fmt_opt(r.bound_avg));
    let _ = writeln!(s, "bound_theorem   {}", fmt_opt(r.bound_theorem));
    let _ = writeln!(s, "conjectured     {}", fmt_opt(r.conjectured));
    if r.anchored {
        let _ = writeln!(s, "weber center coincides with an input point");
    }
    for check in r.bound_checks() {
        let verdict = if check.pass { "ok" } else { "VIOLATED" };
        let _ = writeln!(s, "check {:<20} {verdict}", check.name);
    }
    if r.exceeds_conjecture() {
        let _ = writeln!(s, "=== COUNTEREXAMPLE ===");
        let _ = writeln!(
            s,
            "ratio {:.9} exceeds conjectured {:.9}",
            r.ratio,
            r.conjectured.unwrap_or_default()
        );
        let _ = writeln!(s, "=== END COUNTEREXAMPLE ===");
    }
    let ok = r.all_bounds_hold();
    Ok(Report { body: s, ok })
}

fn cmd_weber(c: &Configuration, solver: &SolverArgs, json: bool) -> CmdResult {
    let res = weber::solve(c, &solver.options());
    let ok = res.converged;
    let body = if json {
        to_json(&res)?
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "center          {}", fmt_point(res.center.coords()));
        let _ = writeln!(s, "steiner_length  {:.6}", res.steiner_length);
        let _ = writeln!(s, "residual        {:.6e}", res.residual);
        let _ = writeln!(s, "iterations      {}", res.iterations);
        let _ = writeln!(s, "converged       {}", res.converged);
        let anchor = res.anchored_index.map_or("-".into(), |i| i.to_string());
        let _ = writeln!(s, "anchored_index  {anchor}");
        s
    };
    Ok(Report { body, ok })
}

fn cmd_minstar(c: &Configuration, json: bool) -> CmdResult {
    let s = min_star(c);
    if json {
        return Ok(Report::ok(to_json(&s)?));
    }
    let mut out = String::new();
    let _ = writeln!(out, "min_index   {}", s.min_index);
    let _ = writeln!(out, "min_length  {:.6}", s.min_length);
    for (i, l) in s.lengths.iter().enumerate() {
        let _ = writeln!(out, "S[{i}]  {l:.6}");
    }
    Ok(Report::ok(out))
}

fn cmd_matching(c: &Configuration, greedy: bool, json: bool) -> CmdResult {
    let mode = if greedy {
        MatchingMode::Greedy
    } else {
        MatchingMode::Exact
    };
    let m = max_matching_with(c, mode).map_err(|e| e.to_string())?;
    if json {
        return Ok(Report::ok(to_json(&m)?));
    }
    let mut s = String::new();
    let _ = writeln!(s, "total_weight  {:.6}", m.total_weight);
    let _ = writeln!(s, "exact         {}", m.exact);
    for (i, j) in &m.pairs {
        let _ = writeln!(s, "pair  {i} {j}");
    }
    Ok(Report::ok(s))
}

#[derive(Serialize)]
struct ConstantsReport {
    d: usize,
    recurrence: UniformConstant,
    quadrature: Option<UniformConstant>,
    rho_upper: f64,
    envelope_lower: Option<f64>,
    envelope_upper: Option<f64>,
}

fn cmd_constants(d: usize, tol: f64, json: bool) -> CmdResult {
    let recurrence = c_d_recurrence(d).map_err(|e| e.to_string())?;
    let quadrature = if d >= 2 {
        Some(c_d_quadrature(d, tol).map_err(|e| e.to_string())?)
    } else {
        None
    };
    let rho = rho_upper(recurrence.value).map_err(|e| e.to_string())?;
    let envelope = theorem3_envelope(d).ok();
    let report = ConstantsReport {
        d,
        recurrence,
        quadrature,
        rho_upper: rho,
        envelope_lower: envelope.map(|e| e.lower),
        envelope_upper: envelope.map(|e| e.upper),
    };
    if json {
        return Ok(Report::ok(to_json(&report)?));
    }
    let mut s = String::new();
    let _ = writeln!(s, "d                 {d}");
    let _ = writeln!(s, "c_d recurrence    {:.6}", report.recurrence.value);
    let _ = writeln!(
        s,
        "c_d quadrature    {}",
        fmt_opt(report.quadrature.map(|q| q.value))
    );
    let _ = writeln!(s, "rho_upper(c_d)    {:.6}", report.rho_upper);
    if let Some(e) = envelope {
        let _ = writeln!(s, "closed-form bracket  {:.6} / {:.6}", e.lower, e.upper);
    }
    Ok(Report::ok(s))
}

#[derive(Serialize)]
struct GsumReport {
    d: usize,
    n: usize,
    closed_form: Option<f64>,
    relaxation: Option<f64>,
    lower: Option<f64>,
    upper: f64,
}

fn cmd_gsum(d: usize, n: usize, json: bool) -> CmdResult {
    let c = c_d_recurrence(d).map_err(|e| e.to_string())?.value;
    let uniform_upper = c * (n * n) as f64 / 2.0;
    let report = match d {
        2 => {
            let exact = g2_closed_form(n).map_err(|e| e.to_string())?;
            GsumReport {
                d,
                n,
                closed_form: Some(exact),
                relaxation: Some(g2_relaxation(n)),
                lower: Some(exact),
                upper: exact,
            }
        }
        3 => {
            let b = g3_bounds(n);
            GsumReport {
                d,
                n,
                closed_form: None,
                relaxation: None,
                lower: Some(b.lower),
                upper: b.upper,
            }
        }
        _ => GsumReport {
            d,
            n,
            closed_form: None,
            relaxation: None,
            lower: None,
            upper: uniform_upper,
        },
    };
    if json {
        return Ok(Report::ok(to_json(&report)?));
    }
    let mut s = String::new();
    let _ = writeln!(s, "d            {d}");
    let _ = writeln!(s, "n            {n}");
    let _ = writeln!(s, "closed_form  {}", fmt_opt(report.closed_form));
    let _ = writeln!(s, "relaxation   {}", fmt_opt(report.relaxation));
    let _ = writeln!(s, "lower        {}", fmt_opt(report.lower));
    let _ = writeln!(s, "upper        {:.6}", report.upper);
    Ok(Report::ok(s))
}

fn cmd_search(
    spec: &SearchSpec,
    config_out: Option<&PathBuf>,
    history_out: Option<&PathBuf>,
    json: bool,
) -> CmdResult {
    let res = maximize(spec).map_err(|e| e.to_string())?;
    if let Some(path) = config_out {
        std::fs::write(path, format_points(&res.best_config))
            .map_err(|e| format!("{}: {e}", path.display()))?;
    }
    if let Some(path) = history_out {
        std::fs::write(path, res.history_csv()).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    let mut s = if json {
        to_json(&res)?
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "objective        {:?}", spec.objective);
        let _ = writeln!(s, "n                {}", spec.n);
        let _ = writeln!(s, "d                {}", spec.d);
        let _ = writeln!(s, "seed             {}", spec.seed);
        let _ = writeln!(s, "best_value       {:.6}", res.best_value);
        let _ = writeln!(s, "reference_value  {}", fmt_opt(res.reference_value));
        let _ = writeln!(s, "best_restart     {}", res.best_restart);
        let _ = writeln!(s, "skipped          {}", res.skipped);
        let _ = writeln!(s, "best_config");
        for p in res.best_config.iter() {
            let _ = writeln!(s, "  {}", fmt_point(p));
        }
        s
    };
    if res.counterexample {
        let _ = writeln!(s, "=== COUNTEREXAMPLE ===");
        let _ = writeln!(
            s,
            "best value {} exceeds reference {}",
            res.best_value,
            res.reference_value.unwrap_or_default()
        );
        s.push_str(&format_points(&res.best_config));
        let _ = writeln!(s, "=== END COUNTEREXAMPLE ===");
    }
    Ok(Report::ok(s))
}

fn cmd_verify(cfg: &VerifyConfig, json: bool) -> CmdResult {
    let outcomes = run_all(cfg);
    let ok = outcomes.iter().all(|o| o.passed);
    let mut s = if json {
        to_json(&outcomes)?
    } else {
        let mut s = String::new();
        for o in &outcomes {
            let verdict = if o.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "[{verdict}] {:>2} {:<24} {}", o.id, o.name, o.detail);
        }
        let passed = outcomes.iter().filter(|o| o.passed).count();
        let _ = writeln!(s, "{passed}/{} checks passed", outcomes.len());
        s
    };
    for o in outcomes.iter().filter(|o| o.counterexample) {
        let _ = writeln!(s, "=== COUNTEREXAMPLE ===");
        let _ = writeln!(s, "{}: {}", o.name, o.detail);
        let _ = writeln!(s, "=== END COUNTEREXAMPLE ===");
    }
    Ok(Report { body: s, ok })
}
