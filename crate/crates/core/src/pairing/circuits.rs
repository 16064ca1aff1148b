use std::collections::BTreeSet;
use std::fmt;

use crate::graph::{Color, ColoredDifference, Edge, VertexId};

use super::Pairing;

/// A closed walk: `edges[i]` joins `vertices[i]` to `vertices[i + 1]`, and
/// the last edge returns to `vertices[0]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
}

impl Circuit {
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn smallest_edge(&self) -> Edge {
        *self.edges.iter().min().expect("circuits are nonempty")
    }

    /// Colours alternate around the whole closed walk.
    pub fn alternates(&self, h: &ColoredDifference) -> bool {
        let colors: Vec<Color> = self.edges.iter().map(|&e| h.color(e).expect("H-edge")).collect();
        (0..colors.len()).all(|i| colors[i] != colors[(i + 1) % colors.len()])
    }

    /// Rotates/reverses so the walk starts at its smallest vertex and leaves
    /// it along the smallest incident circuit edge.
    fn normalize(mut self) -> Self {
        let len = self.edges.len();
        let s = *self.vertices.iter().min().expect("nonempty");
        let first = self
            .edges
            .iter()
            .copied()
            .filter(|e| e.has_endpoint(s))
            .min()
            .expect("s lies on the circuit");
        let forward = (0..len).find(|&i| self.vertices[i] == s && self.edges[i] == first);
        let start = match forward {
            Some(i) => i,
            None => {
                // Reverse: leaving vertex of reversed step i is vertices[i + 1].
                let vertices: Vec<VertexId> = (0..len).rev().map(|i| self.vertices[(i + 1) % len]).collect();
                let edges: Vec<Edge> = self.edges.iter().rev().copied().collect();
                self.vertices = vertices;
                self.edges = edges;
                (0..len)
                    .find(|&i| self.vertices[i] == s && self.edges[i] == first)
                    .expect("reversed walk leaves s along the edge")
            }
        };
        self.vertices.rotate_left(start);
        self.edges.rotate_left(start);
        self
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", names.join(" "))
    }
}

/// The closed walks induced by a pairing, sorted by smallest contained edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitDecomposition {
    circuits: Vec<Circuit>,
}

impl CircuitDecomposition {
    pub fn circuits(&self) -> &[Circuit] {
        &self.circuits
    }

    pub fn len(&self) -> usize {
        self.circuits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.circuits.is_empty()
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.circuits.iter().map(Circuit::len).collect()
    }
}

/// Follows the pairing: entering a vertex along one arc, leave along the arc
/// it is paired with.
pub fn decompose_circuits(h: &ColoredDifference, psi: &Pairing) -> CircuitDecomposition {
    let mut unused: BTreeSet<Edge> = h.edges().collect();
    let mut circuits = Vec::new();
    // The lexicographically first unused edge starts at the smallest vertex
    // that still has an unused arc.
    while let Some(&e0) = unused.first() {
        let s = e0.u();
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        let (mut at, mut along) = (s, e0);
        loop {
            vertices.push(at);
            edges.push(along);
            unused.remove(&along);
            let next_vertex = along.other(at);
            let next_edge = psi.partner(next_vertex, along);
            if next_vertex == s && next_edge == e0 {
                break;
            }
            at = next_vertex;
            along = next_edge;
        }
        circuits.push(Circuit { vertices, edges }.normalize());
    }
    circuits.sort_by_key(Circuit::smallest_edge);
    CircuitDecomposition { circuits }
}
