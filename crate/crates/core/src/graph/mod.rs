//! Labeled regular graphs on `{1, ..., n}` and the edge-set operations the
//! switch chain and the canonical-path accounting are built from.
//!
//! All graph values are immutable after construction. Edges are stored in
//! canonical order (`u < v`, lexicographically sorted), so two graphs are
//! equal exactly when their edge sets are equal.

mod io;

pub use io::{parse_graph, parse_graphs, serialize_graph, serialize_graphs};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("ParityError: n*d = {n}*{d} is odd")]
    Parity { n: u32, d: u32 },
    #[error("DegreeTooLarge: d = {d} exceeds n - 1 for n = {n}")]
    DegreeTooLarge { n: u32, d: u32 },
    #[error("NotRegular: vertex {vertex} has degree {degree}, expected {expected}")]
    NotRegular {
        vertex: u32,
        degree: u32,
        expected: u32,
    },
    #[error("DuplicateEdge: {0} listed more than once")]
    DuplicateEdge(Edge),
    #[error("Loop: vertex {0} joined to itself")]
    Loop(u32),
    #[error("InvalidVertex: vertex ids start at 1, got {0}")]
    InvalidVertex(u32),
    #[error("VertexOutOfRange: vertex {vertex} not in 1..={n}")]
    VertexOutOfRange { vertex: u32, n: u32 },
    #[error("MismatchedParameters: (n, d) = ({n1}, {d1}) vs ({n2}, {d2})")]
    MismatchedParameters { n1: u32, d1: u32, n2: u32, d2: u32 },
    #[error("EdgeAbsent: {0} is not an edge of the current graph")]
    EdgeAbsent(Edge),
    #[error("IncidentEdges: {0} and {1} share an endpoint")]
    IncidentEdges(Edge, Edge),
    #[error("InvalidMatching: replacement is not a perfect matching of the four endvertices")]
    InvalidMatching,
    #[error("WouldCreateMultiEdge: {0} is already present")]
    WouldCreateMultiEdge(Edge),
    #[error("ParseError: line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A vertex of `{1, ..., n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(u32);

impl VertexId {
    pub fn new(index: u32) -> Result<Self, GraphError> {
        if index == 0 {
            return Err(GraphError::InvalidVertex(index));
        }
        Ok(VertexId(index))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An unordered edge, stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    u: VertexId,
    v: VertexId,
}

impl Edge {
    /// Range sentinels below and above every real edge.
    pub(crate) const MIN: Edge = Edge {
        u: VertexId(0),
        v: VertexId(0),
    };
    pub(crate) const MAX: Edge = Edge {
        u: VertexId(u32::MAX),
        v: VertexId(u32::MAX),
    };

    pub fn new(a: u32, b: u32) -> Result<Self, GraphError> {
        let a = VertexId::new(a)?;
        let b = VertexId::new(b)?;
        Self::from_ids(a, b)
    }

    pub fn from_ids(a: VertexId, b: VertexId) -> Result<Self, GraphError> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(Edge { u: a, v: b }),
            std::cmp::Ordering::Greater => Ok(Edge { u: b, v: a }),
            std::cmp::Ordering::Equal => Err(GraphError::Loop(a.0)),
        }
    }

    pub fn u(self) -> VertexId {
        self.u
    }

    pub fn v(self) -> VertexId {
        self.v
    }

    pub fn endpoints(self) -> [VertexId; 2] {
        [self.u, self.v]
    }

    pub fn has_endpoint(self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint that is not `x`. Panics if `x` is not an endpoint.
    pub fn other(self, x: VertexId) -> VertexId {
        if self.u == x {
            self.v
        } else {
            assert_eq!(self.v, x, "{x} is not an endpoint of {self}");
            self.u
        }
    }

    pub fn shares_endpoint(self, other: Edge) -> bool {
        other.has_endpoint(self.u) || other.has_endpoint(self.v)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.u, self.v)
    }
}

/// Anything that can answer "is `e` currently an edge?".
pub trait EdgeMembership {
    fn contains_edge(&self, e: Edge) -> bool;
}

impl EdgeMembership for BTreeSet<Edge> {
    fn contains_edge(&self, e: Edge) -> bool {
        self.contains(&e)
    }
}

/// Checks `n*d` parity and `d <= n - 1`.
pub fn check_parameters(n: u32, d: u32) -> Result<(), GraphError> {
    if (u64::from(n) * u64::from(d)) % 2 == 1 {
        return Err(GraphError::Parity { n, d });
    }
    if d > 0 && d >= n {
        return Err(GraphError::DegreeTooLarge { n, d });
    }
    Ok(())
}

/// A simple `d`-regular graph on `{1, ..., n}`: an element of the state space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RegularGraph {
    n: u32,
    d: u32,
    edges: Vec<Edge>,
}

impl RegularGraph {
    /// Validates and canonicalizes an edge list.
    pub fn new(n: u32, d: u32, edges: impl IntoIterator<Item = Edge>) -> Result<Self, GraphError> {
        check_parameters(n, d)?;
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0]));
        }
        let mut degree = vec![0u32; n as usize + 1];
        for e in &edges {
            for x in e.endpoints() {
                if x.0 > n {
                    return Err(GraphError::VertexOutOfRange { vertex: x.0, n });
                }
                degree[x.0 as usize] += 1;
            }
        }
        if let Some(vertex) = (1..=n).find(|&x| degree[x as usize] != d) {
            return Err(GraphError::NotRegular {
                vertex,
                degree: degree[vertex as usize],
                expected: d,
            });
        }
        Ok(RegularGraph { n, d, edges })
    }

    /// Trusted constructor for edge lists already known to be canonical and regular.
    pub(crate) fn from_sorted_unchecked(n: u32, d: u32, edges: Vec<Edge>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        debug_assert_eq!(edges.len() as u64, u64::from(n) * u64::from(d) / 2);
        RegularGraph { n, d, edges }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// Edges in canonical (sorted) order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    pub fn neighbors(&self, x: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.edges
            .iter()
            .filter(move |e| e.has_endpoint(x))
            .map(move |e| e.other(x))
    }

    /// The complement graph, which is `(n - 1 - d)`-regular.
    pub fn complement(&self) -> RegularGraph {
        let mut edges = Vec::new();
        for a in 1..=self.n {
            for b in a + 1..=self.n {
                let e = Edge {
                    u: VertexId(a),
                    v: VertexId(b),
                };
                if !self.contains(e) {
                    edges.push(e);
                }
            }
        }
        let d = if self.n == 0 { 0 } else { self.n - 1 - self.d };
        RegularGraph::from_sorted_unchecked(self.n, d, edges)
    }

    /// The graph with vertex `i` renamed `perm[i - 1]`; `perm` must be a
    /// permutation of `1..=n`.
    pub fn relabel(&self, perm: &[u32]) -> RegularGraph {
        assert_eq!(perm.len(), self.n as usize, "permutation length");
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (perm[e.u.0 as usize - 1], perm[e.v.0 as usize - 1]);
                Edge {
                    u: VertexId(a.min(b)),
                    v: VertexId(a.max(b)),
                }
            })
            .collect();
        edges.sort_unstable();
        RegularGraph::from_sorted_unchecked(self.n, self.d, edges)
    }

    /// Edge-indicator bitset over the `n(n-1)/2` vertex pairs; a compact
    /// canonical key for hashing states.
    pub fn pair_bitset(&self) -> Vec<u64> {
        let mut bits = vec![0u64; pair_words(self.n)];
        for &e in &self.edges {
            let i = pair_index(self.n, e);
            bits[i / 64] |= 1 << (i % 64);
        }
        bits
    }

    pub fn edge_set(&self) -> BTreeSet<Edge> {
        self.edges.iter().copied().collect()
    }

    pub(crate) fn ensure_same_parameters(&self, other: &RegularGraph) -> Result<(), GraphError> {
        if self.n != other.n || self.d != other.d {
            return Err(GraphError::MismatchedParameters {
                n1: self.n,
                d1: self.d,
                n2: other.n,
                d2: other.d,
            });
        }
        Ok(())
    }
}

impl EdgeMembership for RegularGraph {
    fn contains_edge(&self, e: Edge) -> bool {
        self.contains(e)
    }
}

pub(crate) fn pair_words(n: u32) -> usize {
    let pairs = n as usize * (n as usize).saturating_sub(1) / 2;
    pairs.div_ceil(64).max(1)
}

/// Position of `e` in the lexicographic list of pairs `{a,b}`, `a < b <= n`.
pub(crate) fn pair_index(n: u32, e: Edge) -> usize {
    let (a, b) = (e.u.0 as usize - 1, e.v.0 as usize - 1);
    let n = n as usize;
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// Builds and validates a graph from raw `(u, v)` pairs.
pub fn build_graph(n: u32, d: u32, pairs: &[(u32, u32)]) -> Result<RegularGraph, GraphError> {
    let edges = pairs
        .iter()
        .map(|&(a, b)| Edge::new(a, b))
        .collect::<Result<Vec<_>, _>>()?;
    RegularGraph::new(n, d, edges)
}

/// Deterministic start state: vertex `i` joined to `i +- 1, ..., i +- floor(d/2)`
/// (mod n), plus `i + n/2` when `d` is odd.
pub fn circulant_start(n: u32, d: u32) -> Result<RegularGraph, GraphError> {
    check_parameters(n, d)?;
    let mut offsets: Vec<u32> = (1..=d / 2).collect();
    if d % 2 == 1 {
        offsets.push(n / 2);
    }
    let mut edges = BTreeSet::new();
    for i in 0..n {
        for &k in &offsets {
            let j = (i + k) % n;
            edges.insert(Edge::new(i + 1, j + 1)?);
        }
    }
    RegularGraph::new(n, d, edges)
}

/// `G xor G'` as an edge set.
pub fn symmetric_difference(
    g: &RegularGraph,
    gp: &RegularGraph,
) -> Result<BTreeSet<Edge>, GraphError> {
    g.ensure_same_parameters(gp)?;
    let a = g.edge_set();
    let b = gp.edge_set();
    Ok(a.symmetric_difference(&b).copied().collect())
}

/// A switch: remove two non-incident edges and insert a perfect matching of
/// their four endvertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SwitchMove {
    removed: [Edge; 2],
    added: [Edge; 2],
}

impl SwitchMove {
    pub fn new(e1: Edge, e2: Edge, replacement: [Edge; 2]) -> Result<Self, GraphError> {
        if e1.shares_endpoint(e2) {
            return Err(GraphError::IncidentEdges(e1, e2));
        }
        let matchings = Self::matchings(e1, e2);
        let mut rep = replacement;
        rep.sort_unstable();
        if !matchings.iter().any(|m| {
            let mut m = *m;
            m.sort_unstable();
            m == rep
        }) {
            return Err(GraphError::InvalidMatching);
        }
        let mut removed = [e1, e2];
        removed.sort_unstable();
        Ok(SwitchMove {
            removed,
            added: rep,
        })
    }

    /// The three perfect matchings of the endvertices of two disjoint edges
    /// `{a,b}`, `{c,d}`: `{ab,cd}` (the identity), `{ac,bd}` and `{ad,bc}`.
    pub fn matchings(e1: Edge, e2: Edge) -> [[Edge; 2]; 3] {
        let [a, b] = e1.endpoints();
        let [c, d] = e2.endpoints();
        let mk = |x: VertexId, y: VertexId| Edge::from_ids(x, y).expect("disjoint edges");
        [[e1, e2], [mk(a, c), mk(b, d)], [mk(a, d), mk(b, c)]]
    }

    pub fn removed(&self) -> [Edge; 2] {
        self.removed
    }

    pub fn added(&self) -> [Edge; 2] {
        self.added
    }

    pub fn is_identity(&self) -> bool {
        self.removed == self.added
    }

    pub fn reverse(&self) -> SwitchMove {
        SwitchMove {
            removed: self.added,
            added: self.removed,
        }
    }

    /// Applies the move to an arbitrary edge set in place.
    pub fn apply_to_set(&self, set: &mut BTreeSet<Edge>) -> Result<(), GraphError> {
        self.check(|e| set.contains(&e))?;
        if self.is_identity() {
            return Ok(());
        }
        for e in self.removed {
            set.remove(&e);
        }
        for e in self.added {
            set.insert(e);
        }
        Ok(())
    }

    fn check(&self, contains: impl Fn(Edge) -> bool) -> Result<(), GraphError> {
        for e in self.removed {
            if !contains(e) {
                return Err(GraphError::EdgeAbsent(e));
            }
        }
        if self.is_identity() {
            return Ok(());
        }
        for e in self.added {
            if contains(e) {
                return Err(GraphError::WouldCreateMultiEdge(e));
            }
        }
        Ok(())
    }
}

impl fmt::Display for SwitchMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{} {}] -> [{} {}]",
            self.removed[0], self.removed[1], self.added[0], self.added[1]
        )
    }
}

/// Replaces `mv.removed()` with `mv.added()` in `z`.
pub fn apply_switch(z: &RegularGraph, mv: &SwitchMove) -> Result<RegularGraph, GraphError> {
    mv.check(|e| z.contains(e))?;
    if mv.is_identity() {
        return Ok(z.clone());
    }
    let mut edges: Vec<Edge> = z
        .edges
        .iter()
        .copied()
        .filter(|e| !mv.removed.contains(e))
        .collect();
    edges.extend(mv.added);
    edges.sort_unstable();
    Ok(RegularGraph::from_sorted_unchecked(z.n, z.d, edges))
}

/// The encoding `L(e) = G(e) + G'(e) - Z(e)`. Only nonzero labels are stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeLabeling {
    labels: BTreeMap<Edge, i8>,
}

impl EdgeLabeling {
    pub fn label(&self, e: Edge) -> i8 {
        self.labels.get(&e).copied().unwrap_or(0)
    }

    /// Nonzero labels in canonical edge order.
    pub fn nonzero(&self) -> impl Iterator<Item = (Edge, i8)> + '_ {
        self.labels.iter().map(|(&e, &l)| (e, l))
    }

    /// Edges labelled `-1` or `2`.
    pub fn bad_edges(&self) -> Vec<Edge> {
        self.labels
            .iter()
            .filter(|(_, &l)| l == -1 || l == 2)
            .map(|(&e, _)| e)
            .collect()
    }
}

/// Labels every edge with `G(e) + G'(e) - Z(e)`, where membership is 0/1.
pub fn encode(g: &BTreeSet<Edge>, gp: &BTreeSet<Edge>, z: &BTreeSet<Edge>) -> EdgeLabeling {
    let mut labels = BTreeMap::new();
    for &e in g.union(gp).chain(z.iter()) {
        let label = i8::from(g.contains(&e)) + i8::from(gp.contains(&e)) - i8::from(z.contains(&e));
        if label != 0 {
            labels.insert(e, label);
        } else {
            labels.remove(&e);
        }
    }
    EdgeLabeling { labels }
}

/// [`encode`] for three regular graphs sharing `(n, d)`.
pub fn encode_graphs(
    g: &RegularGraph,
    gp: &RegularGraph,
    z: &RegularGraph,
) -> Result<EdgeLabeling, GraphError> {
    g.ensure_same_parameters(gp)?;
    g.ensure_same_parameters(z)?;
    Ok(encode(&g.edge_set(), &gp.edge_set(), &z.edge_set()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Yellow,
    Green,
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::Yellow => "yellow",
            Color::Green => "green",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ArcCounts {
    pub green: u32,
    pub yellow: u32,
}

impl ArcCounts {
    /// Half the number of arcs at the vertex.
    pub fn theta(self) -> u32 {
        (self.green + self.yellow) / 2
    }

    pub fn is_balanced(self) -> bool {
        self.green == self.yellow
    }
}

/// The symmetric difference `H` with its yellow/green coloring relative to
/// the current state `Z`: green edges lie in `Z`, yellow ones do not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredDifference {
    colors: BTreeMap<Edge, Color>,
    incidence: BTreeMap<VertexId, Vec<Edge>>,
    counts: BTreeMap<VertexId, ArcCounts>,
}

impl ColoredDifference {
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.colors.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.colors.contains_key(&e)
    }

    pub fn color(&self, e: Edge) -> Option<Color> {
        self.colors.get(&e).copied()
    }

    /// Vertices with at least one incident `H`-edge, in increasing order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.incidence.keys().copied()
    }

    /// `H`-edges at `v`, sorted. Each one is an arc at `v`.
    pub fn arcs_at(&self, v: VertexId) -> &[Edge] {
        self.incidence.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn counts(&self, v: VertexId) -> ArcCounts {
        self.counts.get(&v).copied().unwrap_or_default()
    }

    pub fn theta(&self, v: VertexId) -> u32 {
        self.counts(v).theta()
    }

    /// Every vertex carries as many green arcs as yellow ones.
    pub fn is_balanced(&self) -> bool {
        self.counts.values().all(|c| c.is_balanced())
    }
}

/// Colors `h` against `z`: green iff the edge is currently in `z`.
pub fn color_difference<Z: EdgeMembership + ?Sized>(h: &BTreeSet<Edge>, z: &Z) -> ColoredDifference {
    let mut colors = BTreeMap::new();
    let mut incidence: BTreeMap<VertexId, Vec<Edge>> = BTreeMap::new();
    let mut counts: BTreeMap<VertexId, ArcCounts> = BTreeMap::new();
    for &e in h {
        let color = if z.contains_edge(e) {
            Color::Green
        } else {
            Color::Yellow
        };
        colors.insert(e, color);
        for x in e.endpoints() {
            incidence.entry(x).or_default().push(e);
            let c = counts.entry(x).or_default();
            match color {
                Color::Green => c.green += 1,
                Color::Yellow => c.yellow += 1,
            }
        }
    }
    ColoredDifference {
        colors,
        incidence,
        counts,
    }
}
