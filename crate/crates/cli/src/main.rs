use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use multicut_core::generate::{random_instance, InstanceSpec, Surface};
use multicut_core::io::{to_file, write_instance};
use multicut_core::oracle::{brute_force_multicut, max_flow_min_cut, BRUTE_FORCE_EDGES};
use multicut_core::topology::Bounds;
use multicut_core::{parse_instance, render_result, solve_multicut, DpMode, Error, Format, SolverConfig};
use serde_json::json;

#[derive(Parser)]
#[command(name = "multicut", version, about = "Minimum multicut on surface-embedded graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file.
    Solve(SolveArgs),
    /// Exhaustive search (and max flow for one pair) on an instance file.
    Oracle { file: PathBuf },
    /// Print a seeded random instance.
    Gen(GenArgs),
}

#[derive(clap::Args)]
struct SolveArgs {
    file: PathBuf,
    /// Multiplier for the number of tree edges.
    #[arg(long, default_value_t = Bounds::default().c_tree, value_parser = positive)]
    c_tree: usize,
    /// Multiplier for the crossings per cut-graph edge.
    #[arg(long, default_value_t = Bounds::default().c_cross, value_parser = positive)]
    c_cross: usize,
    /// Multiplier for the number of dual vertices.
    #[arg(long, default_value_t = Bounds::default().c_vert, value_parser = positive)]
    c_vert: usize,
    /// Multiplier for the total number of crossings with the cut graph.
    #[arg(long, default_value_t = Bounds::default().c_total, value_parser = positive)]
    c_total: usize,
    #[arg(long, value_enum, default_value_t = Dp::Pathdec)]
    dp: Dp,
    /// Check the answer against exhaustive search on small instances.
    #[arg(long)]
    oracle: bool,
    /// Rerun with doubled bounds and warn if the optimum improves.
    #[arg(long)]
    escalate: bool,
    #[arg(long, default_value_t = 1, value_parser = positive)]
    jobs: usize,
    #[arg(long, value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dp {
    Naive,
    Pathdec,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenSurface {
    Plane,
    Torus,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenFormat {
    Text,
    Json,
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value_t = GenSurface::Plane)]
    surface: GenSurface,
    #[arg(long, default_value_t = 6)]
    vertices: usize,
    #[arg(long, default_value_t = 10)]
    edges: usize,
    #[arg(long, default_value_t = 3)]
    terminals: usize,
    #[arg(long, default_value_t = 2)]
    pairs: usize,
    #[arg(long, default_value_t = 1)]
    min_weight: u64,
    #[arg(long, default_value_t = 10)]
    max_weight: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = GenFormat::Text)]
    format: GenFormat,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("`{s}` is not a positive integer")),
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Parse { .. } | Error::Structure(_) | Error::Input(_)) => 2,
        Some(Error::Resource(_)) => 3,
        _ => 1,
    }
}

fn read(file: &PathBuf) -> anyhow::Result<multicut_core::EmbeddedGraph> {
    let text = std::fs::read_to_string(file).with_context(|| format!("cannot read {}", file.display()))?;
    parse_instance(&text).map_err(|e| anyhow::Error::new(e).context(file.display().to_string()))
}

fn solve(args: &SolveArgs) -> anyhow::Result<String> {
    let g = read(&args.file)?;
    let config = SolverConfig {
        bounds: Bounds { c_tree: args.c_tree, c_cross: args.c_cross, c_vert: args.c_vert, c_total: args.c_total },
        dp: match args.dp {
            Dp::Naive => DpMode::Naive,
            Dp::Pathdec => DpMode::Pathdec,
        },
        oracle: args.oracle,
        escalate: args.escalate,
        jobs: args.jobs,
        ..Default::default()
    };
    let sol = solve_multicut(&g, &config)?;
    eprintln!("wall time {:.3}s", sol.stats.elapsed.as_secs_f64());
    let format = match args.format {
        OutFormat::Json => Format::Json,
        OutFormat::Dot => Format::Dot,
    };
    Ok(render_result(&g, &sol, format))
}

fn oracle(file: &PathBuf) -> anyhow::Result<String> {
    let g = read(file)?;
    if g.num_edges() > BRUTE_FORCE_EDGES {
        return Err(Error::Resource(format!("exhaustive search takes at most {BRUTE_FORCE_EDGES} edges")).into());
    }
    let start = Instant::now();
    let best = brute_force_multicut(&g)?;
    let flow = match g.pairs() {
        &[(s, t)] => Some(max_flow_min_cut(&g, s, t)?),
        _ => None,
    };
    eprintln!("wall time {:.3}s", start.elapsed().as_secs_f64());
    let mut out = serde_json::to_string_pretty(&json!({
        "weight": best.weight,
        "edges": best.edges,
        "max_flow": flow,
    }))?;
    out.push('\n');
    Ok(out)
}

fn gen(args: &GenArgs) -> anyhow::Result<String> {
    let g = random_instance(&InstanceSpec {
        surface: match args.surface {
            GenSurface::Plane => Surface::Plane,
            GenSurface::Torus => Surface::Torus,
        },
        vertices: args.vertices,
        edges: args.edges,
        terminals: args.terminals,
        pairs: args.pairs,
        min_weight: args.min_weight,
        max_weight: args.max_weight,
        seed: args.seed,
    })?;
    Ok(match args.format {
        GenFormat::Text => write_instance(&g),
        GenFormat::Json => serde_json::to_string_pretty(&to_file(&g))? + "\n",
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let out = match &cli.command {
        Command::Solve(args) => solve(args),
        Command::Oracle { file } => oracle(file),
        Command::Gen(args) => gen(args),
    };
    match out {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::FAILURE;
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
