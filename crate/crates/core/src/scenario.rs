//! A scripted trajectory on a fixed coloured symmetric difference that drives
//! the number of bad pairs up to fourteen and back to zero.
//!
//! `H` is the union of five closed walks: one 14-edge walk through `x0`
//! twice and four 4-cycles hanging off it. One extra edge `{x0, x5}` lies in
//! both graphs (so outside `H`) and starts in `Z`. The pairing is fixed by the
//! walks; only the colouring changes as the script switches edges in and out
//! of `Z`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use thiserror::Error;

use crate::graph::{color_difference, ColoredDifference, Edge, GraphError, SwitchMove, VertexId};
use crate::pairing::{
    check_pairing_ratio, pairing_count, tally_bad_pairs, BadPairReport, InterestingEdge, InterestingKind, Pairing,
    PairingError, PairingMode, RatioCheck, DEFAULT_PAIRING_CAP,
};

/// Host degree used for the ratio checks; `x0` has `H`-degree 10.
pub const SCENARIO_DEGREE: u32 = 5;

/// Expected `(interesting edges, bad vertices, bad pairs)` at each checkpoint.
pub const EXPECTED_CHECKPOINTS: [(&str, (usize, usize, u32)); 6] = [
    ("Fig2", (1, 2, 4)),
    ("Fig3", (2, 4, 8)),
    ("Fig4", (4, 6, 14)),
    ("Fig5", (3, 4, 8)),
    ("Fig6", (1, 2, 4)),
    ("Fig7", (0, 0, 0)),
];

const NAMES: [&str; 21] = [
    "x0", "x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9", "x10", "x11", "a", "u1", "u2", "w1", "w2", "v1",
    "v2", "z1", "z2",
];

const WALKS: [&[&str]; 5] = [
    &["x0", "a", "x5", "x4", "x3", "x2", "x1", "x0", "x11", "x10", "x9", "x8", "x7", "x6"],
    &["x9", "u1", "u2", "x0"],
    &["x0", "w1", "w2", "x3"],
    &["x0", "x7", "v1", "v2"],
    &["x5", "x6", "z1", "z2"],
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("ScriptInvalid: {}", .0.join("; "))]
    ScriptInvalid(Vec<String>),
    #[error(transparent)]
    Pairing(#[from] PairingError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Vertex with the given name (`x0`..`x11`, `a`, `u1`, ...).
pub fn vertex(name: &str) -> VertexId {
    let i = NAMES.iter().position(|&n| n == name).unwrap_or_else(|| panic!("unknown vertex {name}"));
    VertexId::new(i as u32 + 1).expect("positive")
}

pub fn vertex_name(v: VertexId) -> &'static str {
    NAMES[v.get() as usize - 1]
}

fn edge(a: &str, b: &str) -> Edge {
    Edge::from_ids(vertex(a), vertex(b)).expect("distinct names")
}

/// One switch of the script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptStep {
    /// Checkpoint emitted after this step, if any.
    pub label: Option<&'static str>,
    pub phase: &'static str,
    /// Index into the walk list of the circuit being processed.
    pub circuit: usize,
    pub mv: SwitchMove,
}

fn step(label: Option<&'static str>, phase: &'static str, circuit: usize, out: [&str; 4], into: [&str; 4]) -> ScriptStep {
    let mv = SwitchMove::new(
        edge(out[0], out[1]),
        edge(out[2], out[3]),
        [edge(into[0], into[1]), edge(into[2], into[3])],
    )
    .expect("script moves are switches");
    ScriptStep {
        label,
        phase,
        circuit,
        mv,
    }
}

/// Colouring, interesting edges and bad-pair tally after a step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioState {
    pub label: Option<&'static str>,
    /// Current `Z` restricted to `H` and the dotted edge.
    pub z: BTreeSet<Edge>,
    pub colored: ColoredDifference,
    pub report: BadPairReport,
}

/// Outcome of one script step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepOutcome {
    pub index: usize,
    pub phase: &'static str,
    /// `Some(reason)` if the move could not be applied; the state is then
    /// unchanged.
    pub rejected: Option<String>,
    pub state: ScenarioState,
    /// Present at checkpoints.
    pub ratio: Option<RatioCheck>,
}

/// The result of replaying a script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub initial: ScenarioState,
    pub steps: Vec<StepOutcome>,
    expected_final: BTreeSet<Edge>,
}

impl Trajectory {
    pub fn checkpoints(&self) -> impl Iterator<Item = &StepOutcome> {
        self.steps.iter().filter(|s| s.state.label.is_some())
    }

    pub fn final_state(&self) -> &ScenarioState {
        self.steps.last().map_or(&self.initial, |s| &s.state)
    }

    pub fn max_bad_pairs(&self) -> u32 {
        self.steps.iter().map(|s| s.state.report.b()).max().unwrap_or(0)
    }

    /// True iff the final `Z` is the initial `Z` with every `H`-edge
    /// flipped and the dotted edge still present.
    pub fn reached_target(&self) -> bool {
        self.final_state().z == self.expected_final
    }

    /// CSV with columns `label,interesting,bad_vertices,bad_pairs,ratio_ok`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["label", "interesting", "bad_vertices", "bad_pairs", "ratio_ok"])
            .expect("in-memory write");
        for s in self.checkpoints() {
            let (i, v, b) = s.state.report.signature();
            let ok = s.ratio.as_ref().is_some_and(RatioCheck::holds);
            w.write_record([
                s.state.label.unwrap_or_default().to_string(),
                i.to_string(),
                v.to_string(),
                b.to_string(),
                ok.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

/// Failures found by [`verify_checkpoints`]; empty means pass.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Verification {
    pub failures: Vec<String>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// The coloured symmetric difference, its pairing and the dotted edge.
#[derive(Debug, Clone)]
pub struct Scenario {
    h: BTreeSet<Edge>,
    z0: BTreeSet<Edge>,
    dotted: Edge,
    walks: Vec<Vec<VertexId>>,
    psi: Pairing,
    candidates: Vec<Vec<InterestingEdge>>,
}

impl Scenario {
    /// Builds `H` from the five walks, colours each walk alternately starting
    /// with green from its first listed vertex, and adds the dotted edge to `Z`.
    pub fn build() -> Result<Self, ScenarioError> {
        let walks: Vec<Vec<VertexId>> = WALKS.iter().map(|w| w.iter().map(|n| vertex(n)).collect()).collect();
        let mut h = BTreeSet::new();
        let mut z0 = BTreeSet::new();
        for walk in &walks {
            for i in 0..walk.len() {
                let e = Edge::from_ids(walk[i], walk[(i + 1) % walk.len()])?;
                h.insert(e);
                if i % 2 == 0 {
                    z0.insert(e);
                }
            }
        }
        let dotted = edge("x0", "x5");
        z0.insert(dotted);
        let colored = color_difference(&h, &z0);
        let psi = Pairing::from_circuits(&colored, &walks)?;
        let odd = |a, b| InterestingEdge {
            edge: edge(a, b),
            kind: InterestingKind::OddChord,
        };
        let mut candidates = vec![Vec::new(); walks.len()];
        candidates[0] = vec![
            InterestingEdge {
                edge: edge("x5", "x6"),
                kind: InterestingKind::Shortcut,
            },
            odd("x0", "x3"),
            odd("x0", "x5"),
            odd("x0", "x7"),
            odd("x0", "x9"),
        ];
        Ok(Scenario {
            h,
            z0,
            dotted,
            walks,
            psi,
            candidates,
        })
    }

    pub fn h(&self) -> &BTreeSet<Edge> {
        &self.h
    }

    pub fn dotted_edge(&self) -> Edge {
        self.dotted
    }

    pub fn pairing(&self) -> &Pairing {
        &self.psi
    }

    pub fn walks(&self) -> &[Vec<VertexId>] {
        &self.walks
    }

    pub fn initial_z(&self) -> &BTreeSet<Edge> {
        &self.z0
    }

    /// The coloured `H` of the initial state.
    pub fn colored(&self) -> ColoredDifference {
        color_difference(&self.h, &self.z0)
    }

    /// Number of alternating pairings of the initial coloured `H`.
    pub fn alternating_pairings(&self) -> Result<BigUint, ScenarioError> {
        Ok(pairing_count(&self.colored(), PairingMode::Alternating)?)
    }

    /// The default script: shortcut switch, one Phase 1 step, three Phase 2
    /// steps, one Phase 3 step, then the four 4-cycles.
    pub fn script() -> Vec<ScriptStep> {
        vec![
            step(Some("Fig2"), "shortcut", 0, ["x0", "a", "x5", "x6"], ["a", "x5", "x0", "x6"]),
            step(Some("Fig3"), "phase 1", 0, ["x0", "x1", "x2", "x3"], ["x1", "x2", "x0", "x3"]),
            step(Some("Fig4"), "phase 2", 0, ["x0", "x7", "x8", "x9"], ["x0", "x9", "x7", "x8"]),
            step(Some("Fig5"), "phase 2", 0, ["x0", "x5", "x6", "x7"], ["x5", "x6", "x0", "x7"]),
            step(Some("Fig6"), "phase 2", 0, ["x0", "x3", "x4", "x5"], ["x3", "x4", "x0", "x5"]),
            step(Some("Fig7"), "phase 3", 0, ["x0", "x9", "x10", "x11"], ["x9", "x10", "x0", "x11"]),
            step(None, "4-cycle", 1, ["x9", "u1", "u2", "x0"], ["x0", "x9", "u1", "u2"]),
            step(None, "4-cycle", 2, ["x0", "w1", "w2", "x3"], ["w1", "w2", "x3", "x0"]),
            step(None, "4-cycle", 3, ["x0", "x7", "v1", "v2"], ["x7", "v1", "v2", "x0"]),
            step(None, "4-cycle", 4, ["x5", "x6", "z1", "z2"], ["x6", "z1", "z2", "x5"]),
        ]
    }

    fn state(&self, label: Option<&'static str>, z: &BTreeSet<Edge>, interesting: &[InterestingEdge]) -> ScenarioState {
        let colored = color_difference(&self.h, z);
        let report = tally_bad_pairs(&colored, &self.psi, interesting);
        ScenarioState {
            label,
            z: z.clone(),
            colored,
            report,
        }
    }

    /// Applies `script` in order. A move that cannot be applied is recorded
    /// as rejected and leaves the state unchanged.
    pub fn replay(&self, script: &[ScriptStep]) -> Trajectory {
        let mut z = self.z0.clone();
        let initial = self.state(None, &z, &[]);
        let mut snapshot = z.clone();
        let mut current = usize::MAX;
        let mut steps = Vec::with_capacity(script.len());
        for (index, s) in script.iter().enumerate() {
            if s.circuit != current {
                current = s.circuit;
                snapshot = z.clone();
            }
            let mut next = z.clone();
            let rejected = match s.mv.apply_to_set(&mut next) {
                Ok(()) => {
                    z = next;
                    None
                }
                Err(e) => Some(e.to_string()),
            };
            let interesting: Vec<InterestingEdge> = self
                .candidates
                .get(s.circuit)
                .into_iter()
                .flatten()
                .filter(|c| z.contains(&c.edge) != snapshot.contains(&c.edge))
                .copied()
                .collect();
            let state = self.state(s.label, &z, &interesting);
            let ratio = s.label.map(|_| {
                check_pairing_ratio(&[(state.colored.clone(), state.report.clone())], SCENARIO_DEGREE, DEFAULT_PAIRING_CAP)
                    .map(|mut v| v.remove(0))
            });
            let (ratio, rejected) = match ratio {
                Some(Err(e)) => (None, Some(rejected.unwrap_or_else(|| format!("ratio check failed: {e}")))),
                Some(Ok(r)) => (Some(r), rejected),
                None => (None, rejected),
            };
            steps.push(StepOutcome {
                index,
                phase: s.phase,
                rejected,
                state,
                ratio,
            });
        }
        let expected_final = self
            .h
            .iter()
            .filter(|e| !self.z0.contains(e))
            .copied()
            .chain(std::iter::once(self.dotted))
            .collect();
        Trajectory {
            initial,
            steps,
            expected_final,
        }
    }

    /// Replays the default script and verifies it.
    pub fn play(&self) -> Result<Trajectory, ScenarioError> {
        let trajectory = self.replay(&Self::script());
        let verification = verify_checkpoints(&trajectory);
        if verification.passed() {
            Ok(trajectory)
        } else {
            Err(ScenarioError::ScriptInvalid(verification.failures))
        }
    }
}

/// Compares checkpoints with [`EXPECTED_CHECKPOINTS`] in order and checks the
/// structural limits at every state, the ratio bound at every checkpoint,
/// and the final colouring.
pub fn verify_checkpoints(trajectory: &Trajectory) -> Verification {
    let mut failures = Vec::new();
    let mut expected = EXPECTED_CHECKPOINTS.iter();
    for s in &trajectory.steps {
        if let Some(reason) = &s.rejected {
            failures.push(format!("step {} ({}) rejected: {reason}", s.index, s.phase));
        }
        if let Err(e) = s.state.report.check_limits() {
            failures.push(format!("step {} ({}): {e}", s.index, s.phase));
        }
        let Some(label) = s.state.label else { continue };
        let found = s.state.report.signature();
        match expected.next() {
            Some(&(want_label, want)) if want_label == label && want == found => {}
            Some(&(want_label, want)) => failures.push(format!(
                "checkpoint {want_label}: expected {want:?}, found {label} {found:?}"
            )),
            None => failures.push(format!("unexpected checkpoint {label} {found:?}")),
        }
        if !s.ratio.as_ref().is_some_and(RatioCheck::holds) {
            failures.push(format!("checkpoint {label}: pairing ratio bound fails"));
        }
    }
    for (label, want) in expected {
        failures.push(format!("checkpoint {label}: expected {want:?}, never reached"));
    }
    if !trajectory.reached_target() {
        failures.push("final state: Z is not the flipped colouring with the dotted edge".to_string());
    }
    Verification { failures }
}

/// Bad pairs of each colour at `v` in `report`, as `(yellow, green)`.
pub fn bad_pairs_at(report: &BadPairReport, v: VertexId) -> (u32, u32) {
    report.tally(v).map_or((0, 0), |t| (t.yellow_pairs, t.green_pairs))
}

/// `H`-degree of each vertex of the initial colouring, by name.
pub fn theta_by_name(scenario: &Scenario) -> BTreeMap<&'static str, u32> {
    let colored = scenario.colored();
    colored.vertices().map(|v| (vertex_name(v), colored.theta(v))).collect()
}
