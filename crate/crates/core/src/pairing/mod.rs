//! Pairings of the coloured symmetric difference, the circuits they induce,
//! and the bad-pair accounting that bounds how many pairings an encoding can
//! be consistent with.
//!
//! A pairing matches up, at every vertex `v`, the `H`-arcs incident with `v`.
//! An arc is an `(edge, endpoint)` pair; since `H` is simple, the edge alone
//! names the arc at a given vertex. A pair of two arcs with the same colour
//! is a *bad pair* and its vertex is *bad*.

mod circuits;
mod count;

pub use circuits::{decompose_circuits, Circuit, CircuitDecomposition};
pub use count::count_vertex_pairings;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::graph::{Color, ColoredDifference, Edge, VertexId};

/// Default cap on the number of pairings an enumeration may produce.
pub const DEFAULT_PAIRING_CAP: u64 = 10_000_000;

pub const MAX_INTERESTING_EDGES: usize = 4;
pub const MAX_BAD_VERTICES: usize = 6;
pub const MAX_BAD_PAIRS: u32 = 14;
pub const MAX_BAD_PAIRS_PER_COLOR: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PairingError {
    #[error("ParityError: {green} green + {yellow} yellow arcs is odd")]
    Parity { green: u32, yellow: u32 },
    #[error("Overflow: pairing count for ({green}, {yellow}) does not fit in 128 bits")]
    Overflow { green: u32, yellow: u32 },
    #[error("Unbalanced: vertex {vertex} has {green} green and {yellow} yellow arcs")]
    Unbalanced {
        vertex: VertexId,
        green: u32,
        yellow: u32,
    },
    #[error("TooLarge: {count} pairings exceeds the cap of {cap}")]
    TooLarge { count: String, cap: u64 },
    #[error("InvalidPairing: {0}")]
    InvalidPairing(String),
    #[error("LimitViolation: {what} = {value} exceeds {max}")]
    LimitViolation {
        what: &'static str,
        value: usize,
        max: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairingMode {
    /// Every pair joins a yellow arc to a green arc.
    Alternating,
    /// Same-colour pairs are allowed, but two arcs of a vertex's minority
    /// colour are never paired together.
    AllowBad,
}

/// A perfect matching of the `H`-arcs at every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pairing {
    partner: BTreeMap<(VertexId, Edge), Edge>,
}

impl Pairing {
    /// Builds a pairing from `(vertex, arc, arc)` triples, checking that every
    /// arc of `h` is matched exactly once.
    pub fn new(
        h: &ColoredDifference,
        pairs: impl IntoIterator<Item = (VertexId, Edge, Edge)>,
    ) -> Result<Self, PairingError> {
        let mut partner = BTreeMap::new();
        for (v, a, b) in pairs {
            for e in [a, b] {
                if !h.contains(e) || !e.has_endpoint(v) {
                    return Err(PairingError::InvalidPairing(format!("{e} is not an H-arc at {v}")));
                }
            }
            if a == b {
                return Err(PairingError::InvalidPairing(format!("{a} paired with itself at {v}")));
            }
            for (x, y) in [(a, b), (b, a)] {
                if partner.insert((v, x), y).is_some() {
                    return Err(PairingError::InvalidPairing(format!("{x} paired twice at {v}")));
                }
            }
        }
        for v in h.vertices() {
            for &e in h.arcs_at(v) {
                if !partner.contains_key(&(v, e)) {
                    return Err(PairingError::InvalidPairing(format!("{e} unpaired at {v}")));
                }
            }
        }
        Ok(Pairing { partner })
    }

    /// The pairing that makes each closed walk (given as a cyclic vertex
    /// sequence) a circuit: consecutive walk edges are paired at their
    /// shared vertex.
    pub fn from_circuits(h: &ColoredDifference, walks: &[Vec<VertexId>]) -> Result<Self, PairingError> {
        let mut triples = Vec::new();
        for walk in walks {
            let len = walk.len();
            let edge = |i: usize| {
                Edge::from_ids(walk[i % len], walk[(i + 1) % len])
                    .map_err(|e| PairingError::InvalidPairing(e.to_string()))
            };
            for (i, &v) in walk.iter().enumerate() {
                let before = edge(i + len - 1)?;
                let after = edge(i)?;
                triples.push((v, before, after));
            }
        }
        Pairing::new(h, triples)
    }

    /// The arc paired with `e` at `v`.
    pub fn partner(&self, v: VertexId, e: Edge) -> Edge {
        self.partner[&(v, e)]
    }

    /// Pairs at `v`, each listed once with the smaller arc first.
    pub fn pairs_at(&self, v: VertexId) -> Vec<(Edge, Edge)> {
        self.partner
            .range((v, Edge::MIN)..=(v, Edge::MAX))
            .filter(|(&(_, a), &b)| a < b)
            .map(|(&(_, a), &b)| (a, b))
            .collect()
    }

    pub fn vertices(&self) -> BTreeSet<VertexId> {
        self.partner.keys().map(|&(v, _)| v).collect()
    }
}

fn allowed(mode: PairingMode, counts: crate::graph::ArcCounts, a: Color, b: Color) -> bool {
    if a != b {
        return true;
    }
    match mode {
        PairingMode::Alternating => false,
        PairingMode::AllowBad => {
            let minority = if counts.green >= counts.yellow {
                Color::Yellow
            } else {
                Color::Green
            };
            a != minority
        }
    }
}

fn local_matchings(h: &ColoredDifference, v: VertexId, mode: PairingMode) -> Vec<Vec<(Edge, Edge)>> {
    fn extend(
        rest: &[Edge],
        ok: &dyn Fn(Edge, Edge) -> bool,
        current: &mut Vec<(Edge, Edge)>,
        out: &mut Vec<Vec<(Edge, Edge)>>,
    ) {
        let Some((&first, tail)) = rest.split_first() else {
            out.push(current.clone());
            return;
        };
        for (i, &other) in tail.iter().enumerate() {
            if !ok(first, other) {
                continue;
            }
            let remaining: Vec<Edge> = tail[..i].iter().chain(&tail[i + 1..]).copied().collect();
            current.push((first, other));
            extend(&remaining, ok, current, out);
            current.pop();
        }
    }
    let counts = h.counts(v);
    let ok = |a: Edge, b: Edge| allowed(mode, counts, h.color(a).unwrap(), h.color(b).unwrap());
    let mut out = Vec::new();
    extend(h.arcs_at(v), &ok, &mut Vec::new(), &mut out);
    out
}

/// Number of pairings of `h` in `mode`, from the per-vertex product formula.
pub fn pairing_count(h: &ColoredDifference, mode: PairingMode) -> Result<BigUint, PairingError> {
    let mut total = BigUint::one();
    for v in h.vertices() {
        let c = h.counts(v);
        if mode == PairingMode::Alternating && !c.is_balanced() {
            return Err(PairingError::Unbalanced {
                vertex: v,
                green: c.green,
                yellow: c.yellow,
            });
        }
        total *= count_vertex_pairings(c.green, c.yellow)?;
    }
    Ok(total)
}

/// Lazily enumerates every pairing of `h` valid in `mode`, each exactly once.
pub fn enumerate_pairings(
    h: &ColoredDifference,
    mode: PairingMode,
    cap: u64,
) -> Result<PairingIter, PairingError> {
    let total = pairing_count(h, mode)?;
    if total > BigUint::from(cap) {
        return Err(PairingError::TooLarge {
            count: total.to_string(),
            cap,
        });
    }
    let vertices: Vec<VertexId> = h.vertices().collect();
    let options: Vec<_> = vertices.iter().map(|&v| local_matchings(h, v, mode)).collect();
    debug_assert_eq!(
        options.iter().map(|o| o.len() as u64).product::<u64>(),
        total.to_u64().unwrap_or(u64::MAX)
    );
    let done = options.iter().any(Vec::is_empty);
    Ok(PairingIter {
        vertices,
        odometer: vec![0; options.len()],
        options,
        done,
    })
}

pub struct PairingIter {
    vertices: Vec<VertexId>,
    options: Vec<Vec<Vec<(Edge, Edge)>>>,
    odometer: Vec<usize>,
    done: bool,
}

impl Iterator for PairingIter {
    type Item = Pairing;

    fn next(&mut self) -> Option<Pairing> {
        if self.done {
            return None;
        }
        let mut partner = BTreeMap::new();
        for (k, &v) in self.vertices.iter().enumerate() {
            for &(a, b) in &self.options[k][self.odometer[k]] {
                partner.insert((v, a), b);
                partner.insert((v, b), a);
            }
        }
        // Advance the mixed-radix counter.
        self.done = true;
        for k in (0..self.odometer.len()).rev() {
            self.odometer[k] += 1;
            if self.odometer[k] < self.options[k].len() {
                self.done = false;
                break;
            }
            self.odometer[k] = 0;
        }
        Some(Pairing { partner })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InterestingKind {
    /// An odd chord switched while processing a 1-circuit.
    OddChord,
    /// The shortcut edge switched while processing a 2-circuit.
    Shortcut,
}

impl fmt::Display for InterestingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InterestingKind::OddChord => "odd-chord",
            InterestingKind::Shortcut => "shortcut",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InterestingEdge {
    pub edge: Edge,
    pub kind: InterestingKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexTally {
    pub vertex: VertexId,
    pub green: u32,
    pub yellow: u32,
    pub yellow_pairs: u32,
    pub green_pairs: u32,
}

impl VertexTally {
    pub fn bad_pairs(&self) -> u32 {
        self.yellow_pairs + self.green_pairs
    }
}

/// Same-colour pairs of a pairing, per vertex, with the interesting edges of
/// the state the colouring was taken from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadPairReport {
    tallies: Vec<VertexTally>,
    interesting: Vec<InterestingEdge>,
}

impl BadPairReport {
    /// One row per `H`-vertex, in vertex order.
    pub fn tallies(&self) -> &[VertexTally] {
        &self.tallies
    }

    pub fn tally(&self, v: VertexId) -> Option<&VertexTally> {
        self.tallies.iter().find(|t| t.vertex == v)
    }

    pub fn interesting(&self) -> &[InterestingEdge] {
        &self.interesting
    }

    pub fn bad_vertices(&self) -> Vec<VertexId> {
        self.tallies
            .iter()
            .filter(|t| t.bad_pairs() > 0)
            .map(|t| t.vertex)
            .collect()
    }

    /// Total number of bad pairs.
    pub fn b(&self) -> u32 {
        self.tallies.iter().map(VertexTally::bad_pairs).sum()
    }

    /// `(interesting edges, bad vertices, bad pairs)`.
    pub fn signature(&self) -> (usize, usize, u32) {
        (self.interesting.len(), self.bad_vertices().len(), self.b())
    }

    /// At most four interesting edges, six bad vertices, fourteen bad pairs,
    /// and two bad pairs of each colour at any vertex.
    pub fn check_limits(&self) -> Result<(), PairingError> {
        let check = |what, value: usize, max: usize| {
            if value > max {
                Err(PairingError::LimitViolation { what, value, max })
            } else {
                Ok(())
            }
        };
        check("interesting edges", self.interesting.len(), MAX_INTERESTING_EDGES)?;
        check("bad vertices", self.bad_vertices().len(), MAX_BAD_VERTICES)?;
        check("bad pairs", self.b() as usize, MAX_BAD_PAIRS as usize)?;
        for t in &self.tallies {
            let worst = t.yellow_pairs.max(t.green_pairs);
            check("bad pairs of one colour at a vertex", worst as usize, MAX_BAD_PAIRS_PER_COLOR as usize)?;
        }
        Ok(())
    }

    /// Per-vertex rows followed by one summary row.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "kind",
            "vertex",
            "g",
            "y",
            "yellow_yellow",
            "green_green",
            "b",
            "interesting",
            "bad_vertices",
        ])
        .expect("in-memory write");
        for t in &self.tallies {
            w.write_record([
                "vertex".to_string(),
                t.vertex.to_string(),
                t.green.to_string(),
                t.yellow.to_string(),
                t.yellow_pairs.to_string(),
                t.green_pairs.to_string(),
                String::new(),
                String::new(),
                String::new(),
            ])
            .expect("in-memory write");
        }
        w.write_record([
            "summary".to_string(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            self.b().to_string(),
            self.interesting.len().to_string(),
            self.bad_vertices().len().to_string(),
        ])
        .expect("in-memory write");
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

/// Counts same-colour pairs of `psi` at every vertex, without limit checks.
pub fn tally_bad_pairs(
    h: &ColoredDifference,
    psi: &Pairing,
    interesting: &[InterestingEdge],
) -> BadPairReport {
    let tallies = h
        .vertices()
        .map(|v| {
            let counts = h.counts(v);
            let mut t = VertexTally {
                vertex: v,
                green: counts.green,
                yellow: counts.yellow,
                yellow_pairs: 0,
                green_pairs: 0,
            };
            for (a, b) in psi.pairs_at(v) {
                match (h.color(a), h.color(b)) {
                    (Some(Color::Yellow), Some(Color::Yellow)) => t.yellow_pairs += 1,
                    (Some(Color::Green), Some(Color::Green)) => t.green_pairs += 1,
                    _ => {}
                }
            }
            t
        })
        .collect();
    let mut interesting = interesting.to_vec();
    interesting.sort();
    BadPairReport {
        tallies,
        interesting,
    }
}

/// [`tally_bad_pairs`] followed by the structural limit check.
pub fn bad_pair_report(
    h: &ColoredDifference,
    psi: &Pairing,
    interesting: &[InterestingEdge],
) -> Result<BadPairReport, PairingError> {
    let report = tally_bad_pairs(h, psi, interesting);
    report.check_limits()?;
    Ok(report)
}

/// Outcome of comparing the pairing count of a coloured state against the
/// balanced reference count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioCheck {
    /// `prod_v count_vertex_pairings(g_v, y_v)`.
    pub state_pairings: BigUint,
    /// `prod_v theta_v!`.
    pub balanced_pairings: BigUint,
    pub bad_pairs: u32,
    /// `state <= d^b * balanced`.
    pub within_d_pow_b: bool,
    /// `state <= d^14 * balanced`.
    pub within_d_pow_14: bool,
}

impl RatioCheck {
    pub fn holds(&self) -> bool {
        self.within_d_pow_b && self.within_d_pow_14
    }
}

/// Checks that every bad pair contributes a factor of at most `d` to the
/// pairing count of each state.
pub fn check_pairing_ratio(
    states: &[(ColoredDifference, BadPairReport)],
    d: u32,
    cap: u64,
) -> Result<Vec<RatioCheck>, PairingError> {
    states
        .iter()
        .map(|(h, report)| {
            let state_pairings = pairing_count(h, PairingMode::AllowBad)?;
            if state_pairings > BigUint::from(cap) {
                return Err(PairingError::TooLarge {
                    count: state_pairings.to_string(),
                    cap,
                });
            }
            let balanced_pairings = h
                .vertices()
                .map(|v| count::big_factorial(h.theta(v)))
                .fold(BigUint::one(), |acc, x| acc * x);
            let b = report.b();
            let d_big = BigUint::from(d);
            Ok(RatioCheck {
                within_d_pow_b: state_pairings <= d_big.pow(b) * &balanced_pairings,
                within_d_pow_14: state_pairings <= d_big.pow(MAX_BAD_PAIRS) * &balanced_pairings,
                state_pairings,
                balanced_pairings,
                bad_pairs: b,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{color_difference, Edge};

    fn e(a: u32, b: u32) -> Edge {
        Edge::new(a, b).unwrap()
    }

    fn vid(x: u32) -> VertexId {
        VertexId::new(x).unwrap()
    }

    /// Two 4-cycles 1-2-3-4 and 1-5-6-7 through hub 1, alternating colours.
    fn figure_eight() -> ColoredDifference {
        let h: BTreeSet<Edge> = [e(1, 2), e(2, 3), e(3, 4), e(1, 4), e(1, 5), e(5, 6), e(6, 7), e(1, 7)]
            .into_iter()
            .collect();
        let z: BTreeSet<Edge> = [e(1, 2), e(3, 4), e(1, 5), e(6, 7)].into_iter().collect();
        color_difference(&h, &z)
    }

    /// Triangles 1-2-3, 1-4-5, 1-6-7 with arcs at 1 coloured 5 green, 1 yellow.
    fn flower() -> ColoredDifference {
        let h: BTreeSet<Edge> = [e(1, 2), e(1, 3), e(2, 3), e(1, 4), e(1, 5), e(4, 5), e(1, 6), e(1, 7), e(6, 7)]
            .into_iter()
            .collect();
        let z: BTreeSet<Edge> = (2..=6).map(|x| e(1, x)).collect();
        color_difference(&h, &z)
    }

    #[test]
    fn four_cycle_has_one_pairing_and_one_circuit() {
        let h: BTreeSet<Edge> = [e(1, 3), e(3, 4), e(4, 6), e(1, 6)].into_iter().collect();
        let z: BTreeSet<Edge> = [e(1, 3), e(4, 6)].into_iter().collect();
        let colored = color_difference(&h, &z);
        let all: Vec<_> = enumerate_pairings(&colored, PairingMode::Alternating, 100)
            .unwrap()
            .collect();
        assert_eq!(all.len(), 1);
        let c = decompose_circuits(&colored, &all[0]);
        assert_eq!(c.lengths(), vec![4]);
        assert!(c.circuits()[0].alternates(&colored));
        assert_eq!(c.circuits()[0].vertices()[0], vid(1));
        assert_eq!(c.circuits()[0].edges()[0], e(1, 3));
    }

    #[test]
    fn figure_eight_pairings() {
        let h = figure_eight();
        let all: Vec<_> = enumerate_pairings(&h, PairingMode::Alternating, 100)
            .unwrap()
            .collect();
        assert_eq!(all.len(), 2);
        let mut lengths: Vec<Vec<usize>> = all.iter().map(|p| decompose_circuits(&h, p).lengths()).collect();
        lengths.sort();
        assert_eq!(lengths, vec![vec![4, 4], vec![8]]);
        for p in &all {
            for c in decompose_circuits(&h, p).circuits() {
                assert!(c.alternates(&h));
            }
            assert_eq!(tally_bad_pairs(&h, p, &[]).b(), 0);
        }
    }

    #[test]
    fn alternating_requires_balance() {
        let h: BTreeSet<Edge> = [e(1, 2), e(2, 3), e(3, 4), e(1, 4)].into_iter().collect();
        let z: BTreeSet<Edge> = [e(1, 2), e(2, 3)].into_iter().collect();
        let colored = color_difference(&h, &z);
        assert!(matches!(
            enumerate_pairings(&colored, PairingMode::Alternating, 100),
            Err(PairingError::Unbalanced { .. })
        ));
        // Vertex 2 has two green arcs, vertex 4 two yellow: one forced bad pair each.
        let all: Vec<_> = enumerate_pairings(&colored, PairingMode::AllowBad, 100)
            .unwrap()
            .collect();
        assert_eq!(all.len(), 1);
        let report = tally_bad_pairs(&colored, &all[0], &[]);
        assert_eq!(report.b(), 2);
        assert_eq!(report.tally(vid(2)).unwrap().green_pairs, 1);
        assert_eq!(report.tally(vid(4)).unwrap().yellow_pairs, 1);
    }

    #[test]
    fn imbalance_forces_bad_pairs() {
        // Vertex 1 has 5 green and 1 yellow arcs: g - y = 4, so two
        // green-green pairs in every admissible pairing.
        let colored = flower();
        let all: Vec<_> = enumerate_pairings(&colored, PairingMode::AllowBad, 1000)
            .unwrap()
            .collect();
        assert_eq!(all.len(), 15);
        for p in &all {
            let t = *tally_bad_pairs(&colored, p, &[]).tally(vid(1)).unwrap();
            assert_eq!((t.green_pairs, t.yellow_pairs), (2, 0));
        }
    }

    #[test]
    fn too_large_is_refused() {
        let h = figure_eight();
        assert!(matches!(
            enumerate_pairings(&h, PairingMode::Alternating, 1),
            Err(PairingError::TooLarge { .. })
        ));
    }

    #[test]
    fn from_circuits_round_trips() {
        let h = figure_eight();
        let walk = vec![vid(1), vid(2), vid(3), vid(4), vid(1), vid(5), vid(6), vid(7)];
        let psi = Pairing::from_circuits(&h, &[walk]).unwrap();
        let c = decompose_circuits(&h, &psi);
        assert_eq!(c.lengths(), vec![8]);
        assert!(Pairing::from_circuits(&h, &[vec![vid(1), vid(2), vid(3), vid(4)]]).is_err());
    }

    #[test]
    fn limit_violations() {
        let h = figure_eight();
        let psi = enumerate_pairings(&h, PairingMode::Alternating, 10)
            .unwrap()
            .next()
            .unwrap();
        let many: Vec<InterestingEdge> = h
            .edges()
            .take(5)
            .map(|edge| InterestingEdge {
                edge,
                kind: InterestingKind::OddChord,
            })
            .collect();
        assert!(matches!(
            bad_pair_report(&h, &psi, &many),
            Err(PairingError::LimitViolation { value: 5, max: 4, .. })
        ));
        assert!(bad_pair_report(&h, &psi, &many[..4]).is_ok());
    }

    #[test]
    fn report_csv_shape() {
        let h = figure_eight();
        let psi = enumerate_pairings(&h, PairingMode::Alternating, 10)
            .unwrap()
            .next()
            .unwrap();
        let csv = tally_bad_pairs(&h, &psi, &[]).to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 1 + 7 + 1);
        assert_eq!(lines[1], "vertex,1,2,2,0,0,,,");
        assert_eq!(lines[8], "summary,,,,,,0,0,0");
    }

    #[test]
    fn ratio_example() {
        // One vertex with (theta + 2, theta - 2) arcs, theta = 3: 15 <= 3^2 * 3!.
        let colored = flower();
        let psi = enumerate_pairings(&colored, PairingMode::AllowBad, 100)
            .unwrap()
            .next()
            .unwrap();
        let report = tally_bad_pairs(&colored, &psi, &[]);
        let check = &check_pairing_ratio(&[(colored, report)], 3, DEFAULT_PAIRING_CAP).unwrap()[0];
        // Petal vertices contribute factors of 1; vertex 7 adds a forced
        // yellow-yellow pair.
        assert_eq!(check.state_pairings, BigUint::from(15u32));
        assert_eq!(check.balanced_pairings, BigUint::from(6u32));
        assert_eq!(check.bad_pairs, 3);
        assert!(check.holds());
    }
}
