use std::collections::BTreeSet;
use std::sync::OnceLock;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use regraph_core::chain::{propose, run, Proposal, SwitchChain};
use regraph_core::graph::{
    apply_switch, circulant_start, color_difference, encode_graphs, parse_graph, serialize_graph,
    symmetric_difference, Edge, RegularGraph,
};
use regraph_core::mixing::{enumerate_state_space, StateSpace};
use regraph_core::pairing::{
    count_vertex_pairings, decompose_circuits, enumerate_pairings, pairing_count, tally_bad_pairs, PairingMode,
};

const PARAMS: [(u32, u32); 5] = [(5, 2), (6, 2), (6, 3), (7, 2), (7, 4)];

fn spaces() -> &'static [StateSpace] {
    static SPACES: OnceLock<Vec<StateSpace>> = OnceLock::new();
    SPACES.get_or_init(|| {
        PARAMS
            .iter()
            .map(|&(n, d)| enumerate_state_space(n, d, 10_000).unwrap())
            .collect()
    })
}

/// Three states of one enumerated space.
fn triple() -> impl Strategy<Value = (RegularGraph, RegularGraph, RegularGraph)> {
    (0..PARAMS.len(), any::<u64>(), any::<u64>(), any::<u64>()).prop_map(|(k, a, b, c)| {
        let s = &spaces()[k].states();
        let pick = |x: u64| s[(x % s.len() as u64) as usize].clone();
        (pick(a), pick(b), pick(c))
    })
}

/// Matchings of `g` green and `y` yellow arcs with no yellow-yellow pair
/// (`yellow_minor`) or no green-green pair (otherwise), counted by pairing
/// off one arc at a time.
fn brute(g: u32, y: u32, yellow_minor: bool) -> u128 {
    if g + y == 0 {
        return 1;
    }
    if g > 0 {
        let mut total = 0;
        if g > 1 && yellow_minor {
            total += u128::from(g - 1) * brute(g - 2, y, yellow_minor);
        }
        if y > 0 {
            total += u128::from(y) * brute(g - 1, y - 1, yellow_minor);
        }
        return total;
    }
    if y > 1 && !yellow_minor {
        u128::from(y - 1) * brute(g, y - 2, yellow_minor)
    } else {
        0
    }
}

#[test]
fn vertex_counts_match_recursion() {
    for g in 0..=12u32 {
        for y in 0..=12 - g {
            if (g + y) % 2 == 1 {
                assert!(count_vertex_pairings(g, y).is_err());
                continue;
            }
            assert_eq!(count_vertex_pairings(g, y).unwrap(), brute(g, y, g >= y), "({g},{y})");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn symmetric_difference_commutes_and_balances((g, gp, _) in triple()) {
        let h = symmetric_difference(&g, &gp).unwrap();
        prop_assert_eq!(&h, &symmetric_difference(&gp, &g).unwrap());
        let colored = color_difference(&h, &g);
        prop_assert!(colored.is_balanced());
        for e in &h {
            prop_assert!(g.contains(*e) != gp.contains(*e));
        }
    }

    #[test]
    fn switches_reverse((z, _, _) in triple(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Proposal::Switch(mv) = propose(&z, &mut rng) {
            match apply_switch(&z, &mv) {
                Ok(next) => {
                    prop_assert!(RegularGraph::new(next.n(), next.d(), next.edges().iter().copied()).is_ok());
                    prop_assert_eq!(apply_switch(&next, &mv.reverse()).unwrap(), z);
                }
                Err(_) => prop_assert!(mv.added().iter().any(|e| z.contains(*e))),
            }
        }
    }

    #[test]
    fn encode_never_marks_h((g, gp, z) in triple()) {
        let h = symmetric_difference(&g, &gp).unwrap();
        let labels = encode_graphs(&g, &gp, &z).unwrap();
        for e in labels.bad_edges() {
            prop_assert!(!h.contains(&e));
        }
        for (e, label) in labels.nonzero() {
            let want = i8::from(g.contains(e)) + i8::from(gp.contains(e)) - i8::from(z.contains(e));
            prop_assert_eq!(label, want);
        }
    }

    #[test]
    fn circuits_cover_h_once((g, gp, _) in triple()) {
        let h = symmetric_difference(&g, &gp).unwrap();
        prop_assume!(!h.is_empty() && h.len() <= 12);
        let colored = color_difference(&h, &g);
        let mut seen = 0u64;
        for psi in enumerate_pairings(&colored, PairingMode::Alternating, 100_000).unwrap() {
            let dec = decompose_circuits(&colored, &psi);
            let mut covered = BTreeSet::new();
            for c in dec.circuits() {
                prop_assert!(c.alternates(&colored));
                for &e in c.edges() {
                    prop_assert!(covered.insert(e), "edge {} used twice", e);
                }
            }
            prop_assert_eq!(&covered, &h);
            prop_assert_eq!(tally_bad_pairs(&colored, &psi, &[]).b(), 0);
            seen += 1;
        }
        let product: u64 = colored.vertices().map(|v| (1..=u64::from(colored.theta(v))).product::<u64>()).product();
        prop_assert_eq!(product, seen);
        prop_assert_eq!(u64::try_from(pairing_count(&colored, PairingMode::Alternating).unwrap()).unwrap(), seen);
    }

    #[test]
    fn allow_bad_counts_factor((g, gp, z) in triple()) {
        let h = symmetric_difference(&g, &gp).unwrap();
        prop_assume!(!h.is_empty() && h.len() <= 12);
        let colored = color_difference(&h, &z);
        let product: u128 = colored
            .vertices()
            .map(|v| {
                let c = colored.counts(v);
                count_vertex_pairings(c.green, c.yellow).unwrap()
            })
            .product();
        let listed = enumerate_pairings(&colored, PairingMode::AllowBad, 1_000_000).unwrap().count();
        prop_assert_eq!(product, listed as u128);
    }

    #[test]
    fn chain_stays_regular(k in 0..PARAMS.len(), seed in any::<u64>()) {
        let (n, d) = PARAMS[k];
        let start = circulant_start(n, d).unwrap();
        let mut chain = SwitchChain::new(&start);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..200 {
            chain.step(&mut rng);
            let z = chain.state();
            prop_assert!(spaces()[k].index_of(&z).is_some());
        }
        prop_assert_eq!(run(&start, 50, seed), run(&start, 50, seed));
    }

    #[test]
    fn edge_list_round_trips((g, _, _) in triple()) {
        let text = serialize_graph(&g);
        prop_assert_eq!(parse_graph(&text).unwrap(), g);
    }

    #[test]
    fn edges_are_canonical(a in 1u32..50, b in 1u32..50) {
        prop_assume!(a != b);
        let e = Edge::new(a, b).unwrap();
        prop_assert_eq!(e, Edge::new(b, a).unwrap());
        prop_assert!(e.u() < e.v());
    }
}
