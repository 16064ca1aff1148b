//! `regraph`: sample regular graphs with the switch chain, enumerate small
//! state spaces, measure mixing, inspect encodings, and evaluate bounds.

mod commands;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "regraph", version, about = "Switch-chain sampling and mixing analysis for regular graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairingsOutput {
    All,
    Count,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample d-regular graphs on n vertices with the lazy switch chain.
    Sample {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: u32,
        /// Steps between consecutive samples.
        #[arg(long, default_value_t = 10_000)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: u32,
        /// Steps discarded before the first sample.
        #[arg(long, default_value_t = 0)]
        burnin: u64,
        /// Output file; edge lists are separated by blank lines.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Enumerate every labeled d-regular graph on n vertices.
    Enumerate {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = regraph_core::mixing::DEFAULT_ENUMERATION_CAP)]
        cap: usize,
        /// Write all states as edge lists.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Mixing time, spectral gap and total-variation curve.
    Mix {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 0.25, value_parser = parse_eps)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        #[arg(long, default_value_t = 100_000)]
        chains: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Last time on the curve; defaults to twice the mixing time.
        #[arg(long)]
        t_max: Option<u64>,
        /// Spacing of the empirical curve.
        #[arg(long, default_value_t = 1)]
        every: u64,
        /// Cap on states for enumeration and the kernel.
        #[arg(long)]
        cap: Option<usize>,
        /// CSV file for the curve (t,max_tv).
        #[arg(long)]
        out: Option<std::path::PathBuf>,
        /// CSV file for the spectrum (index,eigenvalue).
        #[arg(long)]
        spectrum: Option<std::path::PathBuf>,
    },
    /// Symmetric difference, encoding, colouring and pairings of three graphs.
    Analyze {
        #[arg(long)]
        g: std::path::PathBuf,
        #[arg(long)]
        gprime: std::path::PathBuf,
        #[arg(long)]
        z: std::path::PathBuf,
        #[arg(long, value_enum, default_value_t = PairingsOutput::Count)]
        pairings: PairingsOutput,
        #[arg(long, default_value_t = regraph_core::pairing::DEFAULT_PAIRING_CAP)]
        cap: u64,
    },
    /// Mixing-time and flow bounds.
    Bounds {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 0.25, value_parser = parse_eps)]
        eps: f64,
        /// Enumeration cap used to find |Omega|.
        #[arg(long, default_value_t = regraph_core::mixing::DEFAULT_ENUMERATION_CAP)]
        cap: usize,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Replay the fourteen-bad-pair scenario and check its checkpoints.
    Scenario {
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
}

fn parse_eps(s: &str) -> Result<f64, String> {
    let eps: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if eps > 0.0 && eps < 1.0 {
        Ok(eps)
    } else {
        Err(format!("epsilon must lie in (0, 1), got {s}"))
    }
}

fn configure_threads() {
    let Ok(value) = std::env::var("REGRAPH_THREADS") else {
        return;
    };
    match value.trim().parse::<usize>() {
        Ok(0) => {}
        Ok(k) => {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
        }
        Err(_) => eprintln!("warning: ignoring REGRAPH_THREADS={value}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result = match cli.command {
        Command::Sample {
            n,
            d,
            steps,
            seed,
            count,
            burnin,
            out,
        } => commands::sample(n, d, steps, seed, count, burnin, out.as_deref()),
        Command::Enumerate { n, d, cap, out } => commands::enumerate(n, d, cap, out.as_deref()),
        Command::Mix {
            n,
            d,
            eps,
            method,
            chains,
            seed,
            t_max,
            every,
            cap,
            out,
            spectrum,
        } => commands::mix(commands::MixArgs {
            n,
            d,
            eps,
            method,
            chains,
            seed,
            t_max,
            every,
            cap,
            out,
            spectrum,
        }),
        Command::Analyze {
            g,
            gprime,
            z,
            pairings,
            cap,
        } => commands::analyze(&g, &gprime, &z, pairings, cap),
        Command::Bounds { n, d, eps, cap, out } => commands::bounds(n, d, eps, cap, out.as_deref()),
        Command::Scenario { out } => commands::scenario(out.as_deref()),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
