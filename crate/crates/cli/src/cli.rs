//! Command-line parsing and subcommands.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use envlab_core::benefit::{expected_benefit, strategy, Bounds, Decision};
use envlab_core::density::catalog_entries;
use envlab_core::host::{run_play, Process};
use envlab_core::oracle::{
    compare, discrete_suite, mc_conditional_benefit_auto, mc_suite, Moments, MC_SUITE_PLAYS,
};
use envlab_core::rng::host_rng;
use serde::Serialize;
use serde_json::json;

use crate::api::{
    evaluate, roots, table_rows, write_csv, DensityArg, EvalRequest, GridScale, RootsRequest, TableRequest,
};
use crate::error::{AppError, Result};
use crate::service::{serve, ServeOptions};

pub const DEFAULT_SEED: u64 = 1;

/// Exit status for an observation the prior cannot produce.
pub const EXIT_UNATTAINABLE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "envlab", version, about = "Two-envelope game engine")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expected benefit of switching at one observation.
    Eval(EvalArgs),
    /// Expected benefit over a grid of observations, as CSV.
    Table(TableArgs),
    /// Roots of the exchange condition on an interval.
    Roots(RootsArgs),
    /// Check the closed forms against enumeration and simulation.
    Verify(VerifyArgs),
    /// List the built-in densities.
    Catalog(CatalogArgs),
    /// Play many games and report gains, or estimate the benefit at one observation.
    Simulate(SimulateArgs),
    /// Run the JSON service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct DensityOpts {
    /// Catalog name, path to a JSON density file, or inline JSON.
    #[arg(long)]
    pub density: String,
    /// Density parameter as key=value; repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE", value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
    #[arg(long, value_parser = parse_process)]
    pub process: Process,
}

impl DensityOpts {
    fn resolve(&self) -> Result<(DensityArg, BTreeMap<String, f64>)> {
        Ok((DensityArg::parse_cli(&self.density)?, self.params.iter().cloned().collect()))
    }
}

fn parse_param(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected KEY=VALUE, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("bad value for `{k}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

fn parse_process(s: &str) -> std::result::Result<Process, String> {
    s.parse().map_err(|e: envlab_core::Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub density: DensityOpts,
    #[arg(long, allow_negative_numbers = true)]
    pub y: f64,
    /// Lower bound on envelope contents.
    #[arg(long)]
    pub x_l: Option<f64>,
    /// Upper bound on envelope contents.
    #[arg(long)]
    pub x_u: Option<f64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub density: DensityOpts,
    #[arg(long, allow_negative_numbers = true)]
    pub start: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub stop: f64,
    #[arg(long)]
    pub count: usize,
    #[arg(long, value_enum, default_value_t = GridScale::Linear)]
    pub scale: GridScale,
    /// Write to a file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RootsArgs {
    #[command(flatten)]
    pub density: DensityOpts,
    #[arg(long)]
    pub lo: f64,
    #[arg(long)]
    pub hi: f64,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub cells: Option<usize>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Discrete,
    Mc,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    #[arg(long, env = "ENVLAB_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Random tables in the discrete suite.
    #[arg(long, default_value_t = 200)]
    pub tables: usize,
    /// Plays per simulation case before escalation.
    #[arg(long, default_value_t = MC_SUITE_PLAYS)]
    pub plays: u64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub density: DensityOpts,
    #[arg(long, default_value_t = 100_000)]
    pub plays: u64,
    #[arg(long, env = "ENVLAB_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Estimate the benefit conditional on observing this amount.
    #[arg(long)]
    pub y: Option<f64>,
    /// Half-width of the conditioning window (default y/128).
    #[arg(long, requires = "y")]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub x_l: Option<f64>,
    #[arg(long)]
    pub x_u: Option<f64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: SocketAddr,
    /// Append-only session log, replayed on start.
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// Seed for sessions created without one.
    #[arg(long, env = "ENVLAB_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

/// Parse and run; returns the process exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

pub fn run(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Eval(a) => cmd_eval(a, out),
        Command::Table(a) => cmd_table(a, out),
        Command::Roots(a) => cmd_roots(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Catalog(a) => cmd_catalog(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Serve(a) => cmd_serve(a),
    }
}

fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string(value).expect("output serializes"))?;
    Ok(())
}

fn cmd_eval(a: EvalArgs, out: &mut dyn Write) -> Result<i32> {
    let (density, params) = a.density.resolve()?;
    let result = evaluate(&EvalRequest {
        density,
        params,
        process: a.density.process,
        y: a.y,
        x_l: a.x_l,
        x_u: a.x_u,
    })?;
    if a.json {
        print_json(out, &result)?;
    } else {
        let r = &result.report;
        writeln!(out, "density           {}", result.density)?;
        writeln!(out, "process           {}", result.process)?;
        writeln!(out, "y                 {}", r.y)?;
        writeln!(out, "numerator         {}", r.numerator)?;
        writeln!(out, "denominator       {}", r.denominator)?;
        writeln!(out, "expected_benefit  {}", r.expected_benefit)?;
        writeln!(out, "decision          {}", r.decision)?;
        writeln!(out, "attainable        {}", r.attainable)?;
        if let Some(s) = &result.strategy {
            writeln!(out, "strategy          {} {} ({:?} region)", s.decision, s.value, s.region)?;
        }
    }
    Ok(if result.report.attainable { 0 } else { EXIT_UNATTAINABLE })
}

fn cmd_table(a: TableArgs, out: &mut dyn Write) -> Result<i32> {
    let (density, params) = a.density.resolve()?;
    let rows = table_rows(&TableRequest {
        density,
        params,
        process: a.density.process,
        start: a.start,
        stop: a.stop,
        count: a.count,
        scale: a.scale,
    })?;
    match &a.output {
        Some(path) => write_csv(&rows, std::fs::File::create(path)?)?,
        None => write_csv(&rows, out)?,
    }
    Ok(0)
}

fn cmd_roots(a: RootsArgs, out: &mut dyn Write) -> Result<i32> {
    let (density, params) = a.density.resolve()?;
    let result = roots(&RootsRequest {
        density,
        params,
        process: a.density.process,
        lo: a.lo,
        hi: a.hi,
        tol: a.tol,
        cells: a.cells,
    })?;
    if a.json {
        print_json(out, &result)?;
    } else {
        writeln!(
            out,
            "{} roots of e(y) for {} / {} on [{}, {}]",
            result.roots.len(),
            result.density,
            result.process,
            result.lo,
            result.hi
        )?;
        for r in &result.roots {
            writeln!(out, "{:.12}  |e| = {:.3e}", r.y, r.residual)?;
        }
    }
    Ok(0)
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let mut pass = true;
    let mut report = serde_json::Map::new();
    if matches!(a.suite, Suite::Discrete | Suite::All) {
        let d = discrete_suite(a.tables, a.seed);
        pass &= d.pass;
        if !a.json {
            writeln!(
                out,
                "{} discrete: {} tables, {} probes ({} attainable), max |closed - enumerated| = {:e}",
                verdict(d.pass),
                d.densities,
                d.probes,
                d.attainable_probes,
                d.max_abs_diff
            )?;
            for f in &d.failures {
                writeln!(out, "  {f}")?;
            }
        }
        report.insert("discrete".into(), serde_json::to_value(&d).expect("serializes"));
    }
    if matches!(a.suite, Suite::Mc | Suite::All) {
        let m = mc_suite(a.plays, a.seed)?;
        pass &= m.pass;
        if !a.json {
            let passed = m.cases.iter().filter(|c| c.comparison.pass).count();
            writeln!(out, "{} mc: {passed}/{} cases within 4 sigma + 2 eps", verdict(m.pass), m.cases.len())?;
            for c in &m.cases {
                writeln!(
                    out,
                    "  {} {:<18} {:<16} y={:<5} analytic {:>10.6}  estimate {:>10.6} ± {:.6}  (n={})",
                    verdict(c.comparison.pass),
                    c.density,
                    c.process.as_str(),
                    c.analytic.y,
                    c.comparison.analytic,
                    c.comparison.estimate,
                    c.comparison.std_error,
                    c.estimate.n_conditioned
                )?;
            }
        }
        report.insert("mc".into(), serde_json::to_value(&m).expect("serializes"));
    }
    if a.json {
        report.insert("pass".into(), pass.into());
        print_json(out, &report)?;
    }
    Ok(if pass { 0 } else { 1 })
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_catalog(a: CatalogArgs, out: &mut dyn Write) -> Result<i32> {
    let entries = catalog_entries();
    if a.json {
        print_json(out, &entries)?;
        return Ok(0);
    }
    for e in entries {
        let params = if e.params.is_empty() {
            String::new()
        } else {
            format!(" [{}]", e.params)
        };
        writeln!(
            out,
            "{:<18} {:<10} {:<8} {}{params}",
            e.name,
            e.kind.to_string(),
            if e.proper { "proper" } else { "improper" },
            e.formula
        )?;
    }
    Ok(0)
}

#[derive(Debug, Serialize)]
struct SimulationSummary {
    density: String,
    process: Process,
    seed: u64,
    plays: u64,
    always_switch: f64,
    never_switch: f64,
    analytic_optimal: f64,
    mean_benefit: f64,
    std_error: f64,
}

fn cmd_simulate(a: SimulateArgs, out: &mut dyn Write) -> Result<i32> {
    let (arg, params) = a.density.resolve()?;
    let density = arg.resolve(&params)?;
    let process = a.density.process;
    if let Some(y) = a.y {
        let analytic = expected_benefit(&density, process, y);
        let estimate = mc_conditional_benefit_auto(&density, process, y, a.epsilon, a.plays, a.seed)?;
        let comparison = compare(&analytic, &estimate, 4.0);
        if a.json {
            print_json(out, &json!({ "analytic": analytic, "estimate": estimate, "comparison": comparison }))?;
        } else {
            writeln!(out, "analytic   {}", analytic.expected_benefit)?;
            writeln!(
                out,
                "estimate   {} ± {} ({} of {} plays in ({}, {}])",
                estimate.mean_benefit,
                estimate.std_error,
                estimate.n_conditioned,
                estimate.n_total,
                y - estimate.epsilon,
                y + estimate.epsilon
            )?;
            writeln!(out, "{} within {} of analytic", verdict(comparison.pass), comparison.tolerance)?;
        }
        return Ok(0);
    }

    if a.plays == 0 {
        return Err(AppError::Usage("need at least one play".into()));
    }
    let bounds = Bounds::new(a.x_l, a.x_u)?;
    let mut rng = host_rng(a.seed);
    let mut moments = Moments::default();
    let mut optimal = 0.0;
    for _ in 0..a.plays {
        let play = run_play(&density, process, &mut rng)?;
        moments.push(play.b);
        let decision = match strategy(&density, process, &bounds, play.y) {
            Ok(s) => s.decision,
            Err(_) => expected_benefit(&density, process, play.y).decision,
        };
        if decision == Decision::Switch {
            optimal += play.b;
        }
    }
    let summary = SimulationSummary {
        density: density.name().to_string(),
        process,
        seed: a.seed,
        plays: a.plays,
        always_switch: moments.sum,
        never_switch: 0.0,
        analytic_optimal: optimal,
        mean_benefit: moments.mean(),
        std_error: moments.std_error(),
    };
    if a.json {
        print_json(out, &summary)?;
    } else {
        writeln!(out, "{} plays of {} / {} (seed {})", summary.plays, summary.density, process, summary.seed)?;
        writeln!(out, "always switch     {}", summary.always_switch)?;
        writeln!(out, "never switch      {}", summary.never_switch)?;
        writeln!(out, "analytic optimal  {}", summary.analytic_optimal)?;
        writeln!(out, "switch gain/play  {} ± {}", summary.mean_benefit, summary.std_error)?;
    }
    Ok(0)
}

fn cmd_serve(a: ServeArgs) -> Result<i32> {
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(serve(ServeOptions {
        addr: a.addr,
        log: a.log,
        default_seed: a.seed,
    }))?;
    Ok(0)
}
