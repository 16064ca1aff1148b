//! The lazy switch chain on `d`-regular graphs.
//!
//! One step: with probability 1/2 hold. Otherwise pick an unordered pair of
//! non-incident edges uniformly at random, pick one of the three perfect
//! matchings of their four endvertices uniformly at random, and replace the
//! pair with that matching unless a multiple edge would result. The matching
//! equal to the chosen pair is allowed and is a self-loop, so every
//! off-diagonal kernel entry is `0` or `1/(6M)` with `M` the number of
//! non-incident pairs.

use std::collections::{HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{check_parameters, Edge, GraphError, RegularGraph, SwitchMove};

/// Default guard on the number of states for kernel construction.
pub const DEFAULT_MATRIX_CAP: usize = 25_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("StateSpaceTooLarge: {states} states exceeds the cap of {cap} (raise it with --cap)")]
    StateSpaceTooLarge { states: usize, cap: usize },
    #[error("IncompleteStateSpace: a switch from state {from} leaves the supplied state list")]
    IncompleteStateSpace { from: usize },
    #[error("EmptyStateSpace: no states supplied")]
    EmptyStateSpace,
}

/// `C(nd/2, 2) - n C(d, 2)`: unordered pairs of distinct non-incident edges
/// in any `d`-regular graph on `n` vertices.
pub fn nonincident_pair_count(n: u32, d: u32) -> Result<u64, GraphError> {
    check_parameters(n, d)?;
    let (n, d) = (u64::from(n), u64::from(d));
    let m = n * d / 2;
    Ok(m * m.saturating_sub(1) / 2 - n * (d * d.saturating_sub(1) / 2))
}

/// The PRNG for one chain. Distinct `stream`s under one `seed` are
/// independent ChaCha streams.
pub fn chain_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainConfig {
    pub n: u32,
    pub d: u32,
    pub seed: u64,
    pub steps: u64,
}

impl ChainConfig {
    pub fn new(n: u32, d: u32, seed: u64, steps: u64) -> Result<Self, GraphError> {
        check_parameters(n, d)?;
        Ok(ChainConfig { n, d, seed, steps })
    }

    /// Runs from the circulant start state.
    pub fn run(&self) -> Result<RegularGraph, GraphError> {
        let start = crate::graph::circulant_start(self.n, self.d)?;
        Ok(run(&start, self.steps, self.seed))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Proposal {
    Hold,
    Switch(SwitchMove),
}

/// Draws `(i, j, k)`: edge positions `i != j` of a non-incident pair and a
/// matching index `k` in `0..3`, or `None` for a lazy hold.
fn draw<R: Rng + ?Sized>(edges: &[Edge], pairs: u64, rng: &mut R) -> Option<(usize, usize, usize)> {
    if pairs == 0 || rng.gen_bool(0.5) {
        return None;
    }
    let len = edges.len();
    loop {
        let i = rng.gen_range(0..len);
        let j = rng.gen_range(0..len);
        if i != j && !edges[i].shares_endpoint(edges[j]) {
            return Some((i, j, rng.gen_range(0..3)));
        }
    }
}

fn move_for(edges: &[Edge], (i, j, k): (usize, usize, usize)) -> SwitchMove {
    let replacement = SwitchMove::matchings(edges[i], edges[j])[k];
    SwitchMove::new(edges[i], edges[j], replacement).expect("non-incident pair with a valid matching")
}

/// One proposal of the chain from `z`. Holds with probability exactly 1/2,
/// and always when `z` has no non-incident pair.
pub fn propose<R: Rng + ?Sized>(z: &RegularGraph, rng: &mut R) -> Proposal {
    let pairs = nonincident_pair_count(z.n(), z.d()).expect("validated graph");
    match draw(z.edges(), pairs, rng) {
        None => Proposal::Hold,
        Some(choice) => Proposal::Switch(move_for(z.edges(), choice)),
    }
}

/// One transition from `z`. Holds, identity matchings and rejected moves all
/// leave the state unchanged.
pub fn step<R: Rng + ?Sized>(z: &RegularGraph, rng: &mut R) -> RegularGraph {
    let mut chain = SwitchChain::new(z);
    chain.step(rng);
    chain.state()
}

/// Runs `steps` transitions from `z0` with the stream-0 generator for `seed`.
pub fn run(z0: &RegularGraph, steps: u64, seed: u64) -> RegularGraph {
    run_with(z0, steps, seed, |_, _| {})
}

/// Like [`run`], calling `visit(t, state)` for `t = 0..=steps`.
pub fn run_with<F>(z0: &RegularGraph, steps: u64, seed: u64, mut visit: F) -> RegularGraph
where
    F: FnMut(u64, &RegularGraph),
{
    let mut rng = chain_rng(seed, 0);
    let mut chain = SwitchChain::new(z0);
    visit(0, z0);
    for t in 1..=steps {
        chain.step(&mut rng);
        visit(t, &chain.state());
    }
    let out = chain.state();
    debug_assert!(RegularGraph::new(out.n(), out.d(), out.edges().iter().copied()).is_ok());
    out
}

/// Mutable working state for a single chain: the canonical edge list of the
/// current graph, updated in place.
#[derive(Debug, Clone)]
pub struct SwitchChain {
    n: u32,
    d: u32,
    pairs: u64,
    edges: Vec<Edge>,
}

impl SwitchChain {
    pub fn new(start: &RegularGraph) -> Self {
        SwitchChain {
            n: start.n(),
            d: start.d(),
            pairs: nonincident_pair_count(start.n(), start.d()).expect("validated graph"),
            edges: start.edges().to_vec(),
        }
    }

    /// Performs one transition; returns the move when the state changed.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<SwitchMove> {
        let choice = draw(&self.edges, self.pairs, rng)?;
        let mv = move_for(&self.edges, choice);
        if mv.is_identity() {
            return None;
        }
        if mv.added().iter().any(|e| self.edges.binary_search(e).is_ok()) {
            return None;
        }
        for e in mv.removed() {
            let pos = self.edges.binary_search(&e).expect("removed edge present");
            self.edges.remove(pos);
        }
        for e in mv.added() {
            let pos = self.edges.binary_search(&e).unwrap_err();
            self.edges.insert(pos, e);
        }
        Some(mv)
    }

    pub fn state(&self) -> RegularGraph {
        RegularGraph::from_sorted_unchecked(self.n, self.d, self.edges.clone())
    }

    /// Edge-indicator key of the current state, see [`RegularGraph::pair_bitset`].
    pub fn key(&self) -> Vec<u64> {
        let mut bits = vec![0u64; crate::graph::pair_words(self.n)];
        for &e in &self.edges {
            let i = crate::graph::pair_index(self.n, e);
            bits[i / 64] |= 1 << (i % 64);
        }
        bits
    }
}

/// The exact kernel on an enumerated state space. Entry `(i, j)` equals
/// `count(i, j) / denominator`, with `denominator = 6M`.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    states: Vec<RegularGraph>,
    denominator: u64,
    /// Off-diagonal nonzero counts per row, sorted by column.
    rows: Vec<Vec<(usize, u64)>>,
    diagonal: Vec<u64>,
}

impl TransitionMatrix {
    /// Builds the kernel over `states`, which must be closed under switches
    /// (in practice: the full enumeration of the state space).
    pub fn build(states: &[RegularGraph], cap: usize) -> Result<Self, ChainError> {
        if states.is_empty() {
            return Err(ChainError::EmptyStateSpace);
        }
        if states.len() > cap {
            return Err(ChainError::StateSpaceTooLarge {
                states: states.len(),
                cap,
            });
        }
        let (n, d) = (states[0].n(), states[0].d());
        for s in states {
            states[0].ensure_same_parameters(s)?;
        }
        let pairs = nonincident_pair_count(n, d)?;
        if pairs == 0 {
            return Ok(TransitionMatrix {
                states: states.to_vec(),
                denominator: 1,
                rows: vec![Vec::new(); states.len()],
                diagonal: vec![1; states.len()],
            });
        }
        let denominator = 6 * pairs;
        let index: HashMap<Vec<u64>, usize> = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.pair_bitset(), i))
            .collect();

        let rows: Vec<Vec<(usize, u64)>> = states
            .par_iter()
            .enumerate()
            .map(|(i, s)| neighbor_counts(s, &index).ok_or(ChainError::IncompleteStateSpace { from: i }))
            .collect::<Result<_, _>>()?;
        let diagonal = rows
            .iter()
            .map(|row| denominator - row.iter().map(|&(_, c)| c).sum::<u64>())
            .collect();
        Ok(TransitionMatrix {
            states: states.to_vec(),
            denominator,
            rows,
            diagonal,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[RegularGraph] {
        &self.states
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    /// Numerator of entry `(i, j)`.
    pub fn count(&self, i: usize, j: usize) -> u64 {
        if i == j {
            return self.diagonal[i];
        }
        let row = &self.rows[i];
        row.binary_search_by_key(&j, |&(c, _)| c)
            .map(|k| row[k].1)
            .unwrap_or(0)
    }

    pub fn probability(&self, i: usize, j: usize) -> f64 {
        self.count(i, j) as f64 / self.denominator as f64
    }

    /// Off-diagonal nonzero entries of row `i` as `(column, count)`.
    pub fn off_diagonal(&self, i: usize) -> &[(usize, u64)] {
        &self.rows[i]
    }

    /// Full row `i` including the diagonal, sorted by column.
    pub fn row(&self, i: usize) -> Vec<(usize, u64)> {
        let mut row = self.rows[i].clone();
        let pos = row.partition_point(|&(c, _)| c < i);
        row.insert(pos, (i, self.diagonal[i]));
        row
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.len()).all(|i| self.rows[i].iter().all(|&(j, c)| self.count(j, i) == c))
    }

    /// Every row sums to exactly one.
    pub fn rows_stochastic(&self) -> bool {
        (0..self.len()).all(|i| {
            self.diagonal[i] + self.rows[i].iter().map(|&(_, c)| c).sum::<u64>() == self.denominator
        })
    }

    /// Every diagonal entry is at least 1/2.
    pub fn is_lazy(&self) -> bool {
        self.diagonal.iter().all(|&c| 2 * c >= self.denominator)
    }

    /// The uniform vector is exactly fixed: every column sums to one.
    pub fn uniform_is_stationary(&self) -> bool {
        let mut col = self.diagonal.clone();
        for row in &self.rows {
            for &(j, c) in row {
                col[j] += c;
            }
        }
        col.iter().all(|&s| s == self.denominator)
    }

    /// A single communicating class.
    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for &(j, _) in &self.rows[i] {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let k = self.len();
        let den = self.denominator as f64;
        nalgebra::DMatrix::from_fn(k, k, |i, j| self.count(i, j) as f64 / den)
    }
}

fn neighbor_counts(s: &RegularGraph, index: &HashMap<Vec<u64>, usize>) -> Option<Vec<(usize, u64)>> {
    let n = s.n();
    let edges = s.edges();
    let base = s.pair_bitset();
    let mut counts: HashMap<usize, u64> = HashMap::new();
    let toggle = |bits: &mut Vec<u64>, e: Edge| {
        let i = crate::graph::pair_index(n, e);
        bits[i / 64] ^= 1 << (i % 64);
    };
    let present = |e: Edge| {
        let i = crate::graph::pair_index(n, e);
        base[i / 64] >> (i % 64) & 1 == 1
    };
    for a in 0..edges.len() {
        for b in a + 1..edges.len() {
            let (e1, e2) = (edges[a], edges[b]);
            if e1.shares_endpoint(e2) {
                continue;
            }
            for replacement in &SwitchMove::matchings(e1, e2)[1..] {
                if replacement.iter().any(|&e| present(e)) {
                    continue;
                }
                let mut bits = base.clone();
                for e in [e1, e2, replacement[0], replacement[1]] {
                    toggle(&mut bits, e);
                }
                let j = *index.get(&bits)?;
                *counts.entry(j).or_default() += 1;
            }
        }
    }
    let mut row: Vec<(usize, u64)> = counts.into_iter().collect();
    row.sort_unstable();
    Some(row)
}
