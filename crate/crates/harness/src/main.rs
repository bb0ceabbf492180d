use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use symmflow_core::tableau::builtin_tableau;
use symmflow_harness::check::all_checks;
use symmflow_harness::config::{parse_h_list, Config};
use symmflow_harness::converge::converge;
use symmflow_harness::csv::{emit_csv, emit_report, format_value};
use symmflow_harness::problem::{build, ProblemSpec, SpaceKind};
use symmflow_harness::rng::DEFAULT_SEED;
use symmflow_harness::run::{solve, Method, RunSummary};

#[derive(Parser)]
#[command(name = "symmflow", version, about = "Integrators for ODEs on symmetric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a built-in problem and write the trajectory.
    Run(RunArgs),
    /// Estimate the convergence order over a list of step sizes.
    Converge(ConvergeArgs),
    /// Run the axiom, oracle and identity suites.
    Check {
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct Shared {
    /// sphere, hyperbolic or spd
    #[arg(long)]
    space: Option<String>,
    #[arg(long)]
    problem: Option<String>,
    /// Tableau name [default: rk4]
    #[arg(long)]
    method: Option<String>,
    /// Horizon [default: 1]
    #[arg(long = "T")]
    t_end: Option<f64>,
    /// Truncation of the dExp⁻¹ series; closed form if omitted
    #[arg(long)]
    dexpinv_terms: Option<usize>,
    /// Manifold dimension
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Rigid-body inertia diagonal, e.g. 1,2,3
    #[arg(long, value_parser = parse_triple)]
    inertia: Option<[f64; 3]>,
    /// Rotation axis on S², e.g. 0,0,1
    #[arg(long, value_parser = parse_triple)]
    axis: Option<[f64; 3]>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file with any of the flags; flags win
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    shared: Shared,
    #[arg(long)]
    h: Option<f64>,
    /// Project the field and report discarded normal components
    #[arg(long)]
    diagnostics: bool,
}

#[derive(Args)]
struct ConvergeArgs {
    #[command(flatten)]
    shared: Shared,
    /// Decreasing step sizes, e.g. 0.1,0.05,0.025
    #[arg(long, value_parser = parse_h_list)]
    h_list: Option<::std::vec::Vec<f64>>,
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let v = parse_h_list(s)?;
    v.try_into().map_err(|v: Vec<f64>| format!("expected 3 values, got {}", v.len()))
}

impl Shared {
    fn into_config(self) -> anyhow::Result<Config> {
        let flags = Config {
            space: self.space,
            problem: self.problem,
            method: self.method,
            t_end: self.t_end,
            dexpinv_terms: self.dexpinv_terms,
            n: self.n,
            seed: self.seed,
            inertia: self.inertia,
            axis: self.axis,
            out: self.out,
            ..Config::default()
        };
        Ok(match &self.config {
            Some(path) => Config::load(path)?.overridden_by(flags),
            None => flags,
        })
    }
}

fn spec_of(cfg: &Config) -> anyhow::Result<ProblemSpec> {
    let space: SpaceKind = Config::require(&cfg.space, "space")?.parse()?;
    let problem = Config::require(&cfg.problem, "problem")?;
    let mut spec = ProblemSpec::new(space, problem)
        .with_horizon(cfg.t_end.unwrap_or(1.0))
        .with_seed(cfg.seed.unwrap_or(DEFAULT_SEED));
    if let Some(n) = cfg.n {
        spec = spec.with_dim(n);
    }
    spec.inertia = cfg.inertia;
    spec.axis = cfg.axis;
    spec.validate()?;
    Ok(spec)
}

fn print_summary(s: &RunSummary) {
    println!("space            {}", s.space);
    println!("problem          {}", s.problem);
    println!("method           {}", s.method);
    println!("steps            {}", s.steps);
    println!("h                {}", format_value(s.h));
    println!("max residual     {}", format_value(s.max_residual));
    println!("max raw residual {}", format_value(s.max_raw_residual));
    println!("renormalizations {}", s.renormalizations);
    if s.max_discarded_normal > 0.0 {
        println!("discarded normal {}", format_value(s.max_discarded_normal));
    }
    if let (Some(name), Some(drift)) = (&s.invariant, s.invariant_drift) {
        println!("{name} drift {}", format_value(drift));
    }
    if let Some(e) = s.min_eigenvalue {
        println!("min eigenvalue   {}", format_value(e));
    }
    if let Some(e) = s.endpoint_error {
        println!("endpoint error   {}", format_value(e));
    }
}

fn run(args: RunArgs) -> anyhow::Result<()> {
    let mut flags = args.shared.into_config()?;
    if args.h.is_some() {
        flags.h = args.h;
    }
    if args.diagnostics {
        flags.diagnostics = Some(true);
    }
    let spec = spec_of(&flags)?;
    let h = *Config::require(&flags.h, "h")?;
    let tableau = builtin_tableau(flags.method.as_deref().unwrap_or("rk4"))?;
    let problem = build(&spec)?;
    let method = Method {
        tableau: &tableau,
        dexpinv_terms: flags.dexpinv_terms,
        diagnostics: flags.diagnostics.unwrap_or(false),
    };
    let sol = solve(&problem, spec.space, &spec.problem, method, h, spec.t_end)
        .with_context(|| format!("{} on {}", spec.problem, spec.space))?;
    if let Some(out) = &flags.out {
        emit_csv(out, &sol.columns, &sol.times, &sol.coords)?;
    }
    print_summary(&sol.summary);
    Ok(())
}

fn converge_cmd(args: ConvergeArgs) -> anyhow::Result<()> {
    let mut flags = args.shared.into_config()?;
    if args.h_list.is_some() {
        flags.h_list = args.h_list;
    }
    let spec = spec_of(&flags)?;
    let h_list = Config::require(&flags.h_list, "h-list")?;
    let tableau = builtin_tableau(flags.method.as_deref().unwrap_or("rk4"))?;
    let report = converge(&spec, &tableau, flags.dexpinv_terms, h_list)?;
    if let Some(out) = &flags.out {
        emit_report(out, &report)?;
    }
    println!("reference {:?}", report.reference);
    for (i, (h, e)) in report.h.iter().zip(&report.errors).enumerate() {
        let order = if i == 0 { String::new() } else { format!("{:.3}", report.pair_orders[i - 1]) };
        println!("h = {:<10} error = {}  {order}", h, format_value(*e));
    }
    println!("fitted order {:.4}", report.fitted_order);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Converge(args) => converge_cmd(args),
        Command::Check { seed } => {
            let outcomes = all_checks(seed.unwrap_or(DEFAULT_SEED));
            for o in &outcomes {
                println!("{o}");
            }
            return if outcomes.iter().all(|o| o.passed()) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
