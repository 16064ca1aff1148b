use std::fmt::Write as _;
use std::io::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};

use regraph_core::chain::{chain_rng, SwitchChain, TransitionMatrix, DEFAULT_MATRIX_CAP};
use regraph_core::graph::{
    circulant_start, color_difference, encode_graphs, parse_graph, serialize_graphs,
    symmetric_difference, Color, RegularGraph,
};
use regraph_core::mixing::{
    self, count_state_space, curve_csv, empirical_tv_curve, enumerate_state_space, mixing_times, spectrum_csv, theorem_bound,
    tv_curve, MixingError, MixingOptions, DEFAULT_ENUMERATION_CAP,
};
use regraph_core::pairing::{
    decompose_circuits, enumerate_pairings, pairing_count, tally_bad_pairs, PairingMode,
};
use regraph_core::scenario::{verify_checkpoints, Scenario};

use crate::{Method, PairingsOutput};

/// Writes to stdout; a closed pipe (as in `| head`) is not an error.
fn say(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => say(text),
    }
}

pub fn sample(n: u32, d: u32, steps: u64, seed: u64, count: u32, burnin: u64, out: Option<&Path>) -> Result<ExitCode> {
    let start = circulant_start(n, d)?;
    let mut rng = chain_rng(seed, 0);
    let mut chain = SwitchChain::new(&start);
    for _ in 0..burnin {
        chain.step(&mut rng);
    }
    let mut samples = Vec::with_capacity(count as usize);
    for _ in 0..count {
        for _ in 0..steps {
            chain.step(&mut rng);
        }
        samples.push(chain.state());
    }
    emit(out, &serialize_graphs(&samples))?;
    Ok(ExitCode::SUCCESS)
}

pub fn enumerate(n: u32, d: u32, cap: usize, out: Option<&Path>) -> Result<ExitCode> {
    let space = enumerate_state_space(n, d, cap)?;
    say(&format!("{}\n", space.len()))?;
    if let Some(path) = out {
        emit(Some(path), &serialize_graphs(space.states()))?;
    }
    Ok(ExitCode::SUCCESS)
}

pub struct MixArgs {
    pub n: u32,
    pub d: u32,
    pub eps: f64,
    pub method: Method,
    pub chains: u64,
    pub seed: u64,
    pub t_max: Option<u64>,
    pub every: u64,
    pub cap: Option<usize>,
    pub out: Option<PathBuf>,
    pub spectrum: Option<PathBuf>,
}

pub fn mix(args: MixArgs) -> Result<ExitCode> {
    let space = enumerate_state_space(args.n, args.d, args.cap.unwrap_or(DEFAULT_ENUMERATION_CAP))?;
    let p = TransitionMatrix::build(space.states(), args.cap.unwrap_or(DEFAULT_MATRIX_CAP))
        .map_err(MixingError::from)?;
    let opts = MixingOptions::default();
    say(&format!("states,{}\n", space.len()))?;
    let tau = mixing_times(&p, &[args.eps], opts)?[0];
    say(&format!("tau,{tau}\n"))?;
    let t_max = args.t_max.unwrap_or((2 * tau).max(10));
    let curve = match args.method {
        Method::Exact => {
            match mixing::spectrum(&p) {
                Ok(values) => {
                    let gap = if values.len() <= 1 { 1.0 } else { 1.0 - values[1] };
                    say(&format!("spectral_gap,{}\n", mixing::format_float(gap)))?;
                    say(&format!("relaxation_time,{}\n", mixing::format_float(1.0 / gap)))?;
                    if let Some(path) = &args.spectrum {
                        emit(Some(path), &spectrum_csv(&values))?;
                    }
                }
                Err(MixingError::StateSpaceTooLarge { cap, .. }) => {
                    say(&format!("spectral_gap,skipped (more than {cap} states)\n"))?;
                }
                Err(e) => return Err(e.into()),
            }
            tv_curve(&p, t_max, opts)
        }
        Method::Empirical => {
            let times: Vec<u64> = (0..=t_max).step_by(args.every.max(1) as usize).collect();
            empirical_tv_curve(&space, &times, args.chains, args.seed)?
        }
    };
    match &args.out {
        Some(path) => emit(Some(path), &curve_csv(&curve))?,
        None => say(&format!("\n{}", curve_csv(&curve)))?,
    }
    Ok(ExitCode::SUCCESS)
}

fn read_graph(path: &Path) -> Result<RegularGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_graph(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn analyze(g: &Path, gprime: &Path, z: &Path, pairings: PairingsOutput, cap: u64) -> Result<ExitCode> {
    let (g, gp, z) = (read_graph(g)?, read_graph(gprime)?, read_graph(z)?);
    let h = symmetric_difference(&g, &gp)?;
    let labels = encode_graphs(&g, &gp, &z)?;
    let colored = color_difference(&h, &z);
    let mut text = String::new();
    writeln!(text, "symmetric difference: {} edges", h.len())?;
    for e in &h {
        let color = match colored.color(*e) {
            Some(Color::Green) => "green",
            _ => "yellow",
        };
        writeln!(text, "  {e} {color}")?;
    }
    writeln!(text, "labels (nonzero):")?;
    for (e, label) in labels.nonzero() {
        let flag = if label == -1 || label == 2 { " bad" } else { "" };
        writeln!(text, "  {e} {label}{flag}")?;
    }
    writeln!(text, "bad edges: {}", labels.bad_edges().len())?;
    writeln!(text, "vertices (green, yellow):")?;
    for v in colored.vertices() {
        let c = colored.counts(v);
        writeln!(text, "  {v} {} {}", c.green, c.yellow)?;
    }
    writeln!(text, "balanced: {}", colored.is_balanced())?;
    if colored.is_balanced() {
        writeln!(text, "alternating pairings: {}", pairing_count(&colored, PairingMode::Alternating)?)?;
    }
    let allow_bad = pairing_count(&colored, PairingMode::AllowBad)?;
    writeln!(text, "pairings allowing bad pairs: {allow_bad}")?;
    if pairings == PairingsOutput::All {
        for (k, psi) in enumerate_pairings(&colored, PairingMode::AllowBad, cap)?.enumerate() {
            let circuits = decompose_circuits(&colored, &psi);
            writeln!(text, "pairing {k}: circuits {:?}", circuits.lengths())?;
            for c in circuits.circuits() {
                writeln!(text, "  circuit {c}")?;
            }
            text.push_str(&tally_bad_pairs(&colored, &psi, &[]).to_csv());
        }
    }
    say(&text)?;
    Ok(ExitCode::SUCCESS)
}

pub fn bounds(n: u32, d: u32, eps: f64, cap: usize, out: Option<&Path>) -> Result<ExitCode> {
    regraph_core::graph::check_parameters(n, d)?;
    let states = match count_state_space(n, d, cap) {
        Ok(count) => Some(count as u64),
        Err(MixingError::StateSpaceTooLarge { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    emit(out, &theorem_bound(n, d, eps, states)?.to_csv())?;
    Ok(ExitCode::SUCCESS)
}

pub fn scenario(out: Option<&Path>) -> Result<ExitCode> {
    let scenario = Scenario::build()?;
    let trajectory = scenario.replay(&Scenario::script());
    emit(out, &trajectory.to_csv())?;
    let verification = verify_checkpoints(&trajectory);
    for failure in &verification.failures {
        eprintln!("checkpoint failure: {failure}");
    }
    Ok(if verification.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
