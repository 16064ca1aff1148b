use std::collections::HashMap;

use crate::graph::{check_parameters, Edge, RegularGraph, VertexId};

use super::MixingError;

/// Default cap on the number of enumerated states.
pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

/// The complete set of labeled `d`-regular graphs on `{1, ..., n}`, with an
/// index from each graph's edge-indicator key to its position.
#[derive(Debug, Clone)]
pub struct StateSpace {
    n: u32,
    d: u32,
    states: Vec<RegularGraph>,
    index: HashMap<Vec<u64>, usize>,
}

impl StateSpace {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn states(&self) -> &[RegularGraph] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, g: &RegularGraph) -> Option<usize> {
        self.index.get(&g.pair_bitset()).copied()
    }

    pub fn index_of_key(&self, key: &[u64]) -> Option<usize> {
        self.index.get(key).copied()
    }
}

struct Search {
    n: u32,
    d: u32,
    cap: usize,
    degree: Vec<u32>,
    edges: Vec<Edge>,
    /// Keep the graphs, or only count them.
    store: bool,
    found: usize,
    out: Vec<RegularGraph>,
}

impl Search {
    /// Fills the remaining degree of vertex `u` with neighbours `> u`, then
    /// moves on to `u + 1`. Each labeled graph is produced exactly once since
    /// the neighbours above `u` are chosen as an increasing combination.
    fn vertex(&mut self, u: u32) -> Result<(), MixingError> {
        if u > self.n {
            if self.found >= self.cap {
                return Err(MixingError::StateSpaceTooLarge {
                    states: self.found + 1,
                    cap: self.cap,
                });
            }
            self.found += 1;
            if self.store {
                let mut e = self.edges.clone();
                e.sort_unstable();
                self.out.push(RegularGraph::from_sorted_unchecked(self.n, self.d, e));
            }
            return Ok(());
        }
        let need = self.d - self.degree[u as usize];
        let candidates: Vec<u32> = (u + 1..=self.n)
            .filter(|&v| self.degree[v as usize] < self.d)
            .collect();
        if (candidates.len() as u32) < need {
            return Ok(());
        }
        let mut chosen = Vec::with_capacity(need as usize);
        self.combinations(u, &candidates, 0, need, &mut chosen)
    }

    fn combinations(
        &mut self,
        u: u32,
        candidates: &[u32],
        from: usize,
        need: u32,
        chosen: &mut Vec<u32>,
    ) -> Result<(), MixingError> {
        if need == 0 {
            for &v in chosen.iter() {
                self.degree[v as usize] += 1;
                self.edges.push(edge(u, v));
            }
            let before = std::mem::replace(&mut self.degree[u as usize], self.d);
            // Vertices after u must still be completable from vertices after them.
            let feasible = self.tail_feasible(u + 1);
            let result = if feasible { self.vertex(u + 1) } else { Ok(()) };
            for &v in chosen.iter() {
                self.degree[v as usize] -= 1;
                self.edges.pop();
            }
            self.degree[u as usize] = before;
            return result;
        }
        for i in from..candidates.len() {
            if candidates.len() - i < need as usize {
                break;
            }
            chosen.push(candidates[i]);
            let r = self.combinations(u, candidates, i + 1, need - 1, chosen);
            chosen.pop();
            r?;
        }
        Ok(())
    }

    /// Cheap necessary condition: total remaining degree is even and each
    /// vertex `w >= start` needs no more than the number of other vertices
    /// `>= start` that still have room.
    fn tail_feasible(&self, start: u32) -> bool {
        let open: Vec<u32> = (start..=self.n)
            .map(|w| self.d - self.degree[w as usize])
            .collect();
        let total: u32 = open.iter().sum();
        if total % 2 == 1 {
            return false;
        }
        let with_room = open.iter().filter(|&&r| r > 0).count() as u32;
        open.iter().all(|&r| r == 0 || r < with_room)
    }
}

fn edge(a: u32, b: u32) -> Edge {
    Edge::from_ids(VertexId::new(a).unwrap(), VertexId::new(b).unwrap()).unwrap()
}

/// Enumerates every labeled `d`-regular graph on `{1, ..., n}` by
/// backtracking over degree-constrained neighbour sets.
pub fn enumerate_state_space(n: u32, d: u32, cap: usize) -> Result<StateSpace, MixingError> {
    let states = search(n, d, cap, true)?.out;
    let index = states
        .iter()
        .enumerate()
        .map(|(i, g)| (g.pair_bitset(), i))
        .collect();
    Ok(StateSpace { n, d, states, index })
}

fn search(n: u32, d: u32, cap: usize, store: bool) -> Result<Search, MixingError> {
    check_parameters(n, d)?;
    let mut search = Search {
        n,
        d,
        cap,
        degree: vec![0; n as usize + 1],
        edges: Vec::new(),
        store,
        found: 0,
        out: Vec::new(),
    };
    search.vertex(1)?;
    Ok(search)
}

/// `|Omega_{n,d}|` by the same search, without keeping the graphs.
pub fn count_state_space(n: u32, d: u32, cap: usize) -> Result<usize, MixingError> {
    Ok(search(n, d, cap, false)?.found)
}

/// One state from each orbit of `states` under relabeling of the vertices,
/// found by closing under a transposition and an `n`-cycle, which generate
/// the symmetric group. Images outside `states` are ignored.
pub fn orbit_representatives(states: &[RegularGraph]) -> Vec<usize> {
    let Some(first) = states.first() else {
        return Vec::new();
    };
    let n = first.n();
    let index: HashMap<Vec<u64>, usize> = states.iter().enumerate().map(|(i, g)| (g.pair_bitset(), i)).collect();
    let mut parent: Vec<usize> = (0..states.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    if n >= 2 {
        let mut swap: Vec<u32> = (1..=n).collect();
        swap.swap(0, 1);
        let rotate: Vec<u32> = (1..=n).map(|i| i % n + 1).collect();
        for (i, g) in states.iter().enumerate() {
            for perm in [&swap, &rotate] {
                if let Some(&j) = index.get(&g.relabel(perm).pair_bitset()) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    (0..states.len()).filter(|&i| find(&mut parent, i) == i).collect()
}

/// True iff complementation maps `s1` onto `s2` bijectively.
pub fn complement_bijection_check(s1: &StateSpace, s2: &StateSpace) -> Result<bool, MixingError> {
    if s1.n != s2.n || s1.n == 0 || s2.d != s1.n - 1 - s1.d {
        return Err(MixingError::MismatchedParameters {
            expected: (s1.n, s1.n.saturating_sub(1 + s1.d)),
            found: (s2.n, s2.d),
        });
    }
    if s1.len() != s2.len() {
        return Ok(false);
    }
    let mut hit = vec![false; s2.len()];
    for g in &s1.states {
        match s2.index_of(&g.complement()) {
            Some(j) if !hit[j] => hit[j] = true,
            _ => return Ok(false),
        }
    }
    Ok(hit.into_iter().all(|h| h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_spaces() {
        assert_eq!(enumerate_state_space(4, 3, 10).unwrap().len(), 1);
        assert_eq!(enumerate_state_space(4, 0, 10).unwrap().len(), 1);
        assert_eq!(enumerate_state_space(4, 1, 10).unwrap().len(), 3);
        assert_eq!(enumerate_state_space(5, 2, 100).unwrap().len(), 12);
        assert!(matches!(
            enumerate_state_space(5, 3, 10),
            Err(MixingError::Graph(_))
        ));
    }

    #[test]
    fn states_are_distinct_and_valid() {
        let s = enumerate_state_space(6, 3, 1000).unwrap();
        for (i, g) in s.states().iter().enumerate() {
            assert!(RegularGraph::new(6, 3, g.edges().iter().copied()).is_ok());
            assert_eq!(s.index_of(g), Some(i));
        }
        assert_eq!(s.index.len(), s.len());
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            enumerate_state_space(6, 2, 69),
            Err(MixingError::StateSpaceTooLarge { cap: 69, .. })
        ));
        assert_eq!(enumerate_state_space(6, 2, 70).unwrap().len(), 70);
        assert_eq!(count_state_space(6, 2, 70).unwrap(), 70);
        assert_eq!(count_state_space(8, 3, 100_000).unwrap(), 19_355);
    }

    #[test]
    fn orbits() {
        // Six-cycles and pairs of triangles.
        let s = enumerate_state_space(6, 2, 1000).unwrap();
        assert_eq!(orbit_representatives(s.states()).len(), 2);
        // Cubic graphs on six vertices: K_{3,3} and the prism.
        let s = enumerate_state_space(6, 3, 1000).unwrap();
        assert_eq!(orbit_representatives(s.states()).len(), 2);
        assert_eq!(orbit_representatives(enumerate_state_space(4, 3, 10).unwrap().states()), vec![0]);
    }

    #[test]
    fn complement_checks() {
        let a = enumerate_state_space(4, 3, 10).unwrap();
        let b = enumerate_state_space(4, 0, 10).unwrap();
        assert!(complement_bijection_check(&a, &b).unwrap());
        let c = enumerate_state_space(5, 2, 100).unwrap();
        assert!(complement_bijection_check(&c, &c).unwrap());
        assert!(complement_bijection_check(&a, &a).is_err());
    }
}
