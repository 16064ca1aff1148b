//! The eight acceptance criteria, one PASS/FAIL line each.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use regraph_core::chain::{SwitchChain, TransitionMatrix, DEFAULT_MATRIX_CAP};
use regraph_core::graph::{color_difference, encode_graphs, symmetric_difference, RegularGraph};
use regraph_core::mixing::{
    complement_bijection_check, empirical_tv, enumerate_state_space, exact_mixing_time, theorem_bound,
    MixingOptions, StateSpace, DEFAULT_ENUMERATION_CAP,
};
use regraph_core::pairing::{
    check_pairing_ratio, count_vertex_pairings, enumerate_pairings, PairingMode, DEFAULT_PAIRING_CAP,
};
use regraph_core::scenario::{bad_pairs_at, vertex, Scenario, EXPECTED_CHECKPOINTS};

/// Exact `tau(1/4)` for (6,2) and (6,3).
const TAU_QUARTER_6_2: u64 = 11;
const TAU_QUARTER_6_3: u64 = 23;
/// Exact `tau(0.01)` for (6,3).
const TAU_HUNDREDTH_6_3: u64 = 72;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let spent = start.elapsed();
    ensure(spent < limit, format!("took {spent:?}, limit {limit:?}"))
}

fn space(n: u32, d: u32) -> Result<StateSpace, String> {
    enumerate_state_space(n, d, DEFAULT_ENUMERATION_CAP).map_err(|e| e.to_string())
}

fn matrix(s: &StateSpace) -> Result<TransitionMatrix, String> {
    TransitionMatrix::build(s.states(), DEFAULT_MATRIX_CAP).map_err(|e| e.to_string())
}

fn kernel_correctness() -> Outcome {
    let start = Instant::now();
    for (n, d) in [(6, 2), (6, 3)] {
        let p = matrix(&space(n, d)?)?;
        ensure(p.len() == 70, format!("({n},{d}) has {} states", p.len()))?;
        ensure(p.is_symmetric(), format!("({n},{d}) not symmetric"))?;
        ensure(p.rows_stochastic(), format!("({n},{d}) rows do not sum to 1"))?;
        ensure(p.is_lazy(), format!("({n},{d}) diagonal below 1/2"))?;
        ensure(p.uniform_is_stationary(), format!("({n},{d}) uniform not stationary"))?;
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("symmetric, stochastic, lazy, uniform-stationary in {:?}", start.elapsed()))
}

/// 2-regular graphs on six vertices counted by subsets of the 15 pairs.
fn brute_force_two_regular_six() -> (usize, usize) {
    let pairs: Vec<(usize, usize)> = (0..6).flat_map(|a| (a + 1..6).map(move |b| (a, b))).collect();
    let (mut hexagons, mut triangles) = (0, 0);
    for mask in 0u32..1 << pairs.len() {
        if mask.count_ones() != 6 {
            continue;
        }
        let mut adj = [[false; 6]; 6];
        let mut deg = [0; 6];
        for (k, &(a, b)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                adj[a][b] = true;
                adj[b][a] = true;
                deg[a] += 1;
                deg[b] += 1;
            }
        }
        if deg.iter().any(|&x| x != 2) {
            continue;
        }
        // Length of the cycle through vertex 0.
        let (mut prev, mut at, mut len) = (0, (0..6).find(|&v| adj[0][v]).unwrap(), 1);
        while at != 0 {
            let next = (0..6).find(|&v| adj[at][v] && v != prev).unwrap();
            prev = at;
            at = next;
            len += 1;
        }
        if len == 6 {
            hexagons += 1;
        } else {
            triangles += 1;
        }
    }
    (hexagons, triangles)
}

fn enumeration_oracles() -> Outcome {
    let start = Instant::now();
    ensure(space(4, 3)?.len() == 1, "|Omega_{4,3}| != 1")?;
    let (hexagons, triangles) = brute_force_two_regular_six();
    ensure(hexagons == 60 && triangles == 10, format!("cycle types {hexagons} + {triangles}"))?;
    let s62 = space(6, 2)?;
    ensure(s62.len() == hexagons + triangles, format!("|Omega_{{6,2}}| = {}", s62.len()))?;
    let s63 = space(6, 3)?;
    ensure(
        complement_bijection_check(&s62, &s63).map_err(|e| e.to_string())?,
        "complement is not a bijection",
    )?;
    within(start, Duration::from_secs(5))?;
    Ok(format!("1, 70 = 60 + 10, complement bijection in {:?}", start.elapsed()))
}

fn mixing_dominance() -> Outcome {
    let mut found = Vec::new();
    for ((n, d), want) in [((6, 2), TAU_QUARTER_6_2), ((6, 3), TAU_QUARTER_6_3)] {
        let s = space(n, d)?;
        let tau = exact_mixing_time(&matrix(&s)?, 0.25, MixingOptions::default()).map_err(|e| e.to_string())?;
        ensure(tau == want, format!("({n},{d}) tau(1/4) = {tau}, regression constant {want}"))?;
        let bound = theorem_bound(n, d, 0.25, Some(s.len() as u64)).map_err(|e| e.to_string())?;
        ensure((tau as f64) <= bound.theorem_bound, format!("({n},{d}) tau exceeds bound"))?;
        found.push(format!("tau({n},{d}) = {tau} <= {:.3e}", bound.theorem_bound));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..5 {
        let n = rng.gen_range(4..40u32);
        let d = rng.gen_range(1..n);
        let eps: f64 = rng.gen_range(1e-6..0.999);
        let r = theorem_bound(n, d, eps, None).map_err(|e| e.to_string())?;
        ensure(r.ratio() == BigUint::from(d).pow(8), format!("ratio at ({n},{d},{eps}) is not d^8"))?;
        ensure(
            r.theorem_prefactor() == &(r.old_prefactor() * BigUint::from(d).pow(8)),
            format!("prefactors at ({n},{d}) differ by other than d^8"),
        )?;
        let float_ratio = r.theorem_bound / r.old_bound;
        let want = f64::from(d).powi(8);
        ensure((float_ratio - want).abs() <= 1e-12 * want, format!("float ratio {float_ratio} vs {want}"))?;
    }
    Ok(format!("{}; ratio d^8 on 5 random triples", found.join(", ")))
}

fn sampler_agreement() -> Outcome {
    let start = Instant::now();
    let s = space(6, 3)?;
    let tau = exact_mixing_time(&matrix(&s)?, 0.01, MixingOptions::default()).map_err(|e| e.to_string())?;
    ensure(tau == TAU_HUNDREDTH_6_3, format!("tau(0.01) = {tau}, regression constant {TAU_HUNDREDTH_6_3}"))?;
    let tv = empirical_tv(&s, tau, 100_000, 2024).map_err(|e| e.to_string())?;
    ensure(tv <= 0.05, format!("empirical TV {tv:.4} > 0.05"))?;
    within(start, Duration::from_secs(120))?;
    Ok(format!("TV = {tv:.4} after {tau} steps, 10^5 chains, {:?}", start.elapsed()))
}

/// Perfect matchings of `g` green and `y` yellow arcs with no pair of two
/// arcs of the smaller colour class (yellow when `g >= y`).
fn brute_force_pairings(g: u32, y: u32) -> u64 {
    fn go(free: &mut Vec<bool>, forbidden: &[bool]) -> u64 {
        let Some(i) = free.iter().position(|&f| f) else {
            return 1;
        };
        free[i] = false;
        let mut total = 0;
        for j in i + 1..free.len() {
            if free[j] && !(forbidden[i] && forbidden[j]) {
                free[j] = false;
                total += go(free, forbidden);
                free[j] = true;
            }
        }
        free[i] = true;
        total
    }
    let yellow_minor = g >= y;
    let forbidden: Vec<bool> = (0..g + y).map(|k| (k >= g) == yellow_minor).collect();
    go(&mut vec![true; (g + y) as usize], &forbidden)
}

fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

fn binomial(n: u32, k: u32) -> BigUint {
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn pairing_formulas() -> Outcome {
    let mut cases = 0;
    for total in (0..=12).step_by(2) {
        for g in 0..=total {
            let y = total - g;
            let got = count_vertex_pairings(g, y).map_err(|e| e.to_string())?;
            let want = brute_force_pairings(g, y);
            ensure(got == u128::from(want), format!("({g},{y}): formula {got}, brute force {want}"))?;
            cases += 1;
        }
    }
    for theta in 2..=8u32 {
        let lhs = BigUint::from(3u32) * binomial(theta + 2, 4) * factorial(theta - 2);
        let rhs8 = BigUint::from((theta + 2) * (theta + 1)) * factorial(theta);
        ensure(lhs.clone() * 8u32 == rhs8, format!("identity fails at theta = {theta}"))?;
        let two = BigUint::from(count_vertex_pairings(theta + 2, theta - 2).map_err(|e| e.to_string())?);
        ensure(two == lhs, format!("count({}, {}) disagrees with the identity", theta + 2, theta - 2))?;
        let theta_fact = factorial(theta);
        ensure(
            two <= BigUint::from(theta * theta) * &theta_fact,
            format!("two-bad-pair factor exceeds theta^2 at {theta}"),
        )?;
        let one = BigUint::from(count_vertex_pairings(theta + 1, theta - 1).map_err(|e| e.to_string())?);
        ensure(
            one <= BigUint::from(theta) * &theta_fact,
            format!("one-bad-pair factor exceeds theta at {theta}"),
        )?;
    }
    Ok(format!("{cases} (g,y) cases match brute force; identity and factor bounds for theta 2..8"))
}

fn alternating_counts() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let spaces: Vec<StateSpace> = [(6, 2), (6, 3), (7, 2), (7, 4), (8, 2)]
        .into_iter()
        .map(|(n, d)| space(n, d))
        .collect::<Result<_, _>>()?;
    let mut checked = 0;
    let mut attempts = 0;
    while checked < 19 {
        attempts += 1;
        ensure(attempts < 10_000, "could not find enough small instances")?;
        let s = &spaces[rng.gen_range(0..spaces.len())];
        let g = &s.states()[rng.gen_range(0..s.len())];
        let gp = &s.states()[rng.gen_range(0..s.len())];
        let h = symmetric_difference(g, gp).map_err(|e| e.to_string())?;
        if h.is_empty() {
            continue;
        }
        let colored = color_difference(&h, g);
        let product: BigUint = colored.vertices().map(|v| factorial(colored.theta(v))).product();
        if product > BigUint::from(10_000u32) {
            continue;
        }
        let count = enumerate_pairings(&colored, PairingMode::Alternating, DEFAULT_PAIRING_CAP)
            .map_err(|e| e.to_string())?
            .count();
        ensure(BigUint::from(count) == product, format!("count {count} vs product {product}"))?;
        checked += 1;
    }
    let scenario = Scenario::build().map_err(|e| e.to_string())?;
    let colored = scenario.colored();
    let count = enumerate_pairings(&colored, PairingMode::Alternating, DEFAULT_PAIRING_CAP)
        .map_err(|e| e.to_string())?
        .count();
    ensure(count == 3840, format!("scenario H has {count} alternating pairings"))?;
    Ok(format!("{checked} random instances plus scenario H (3840)"))
}

fn scenario_reproduction() -> Outcome {
    let start = Instant::now();
    let scenario = Scenario::build().map_err(|e| e.to_string())?;
    let t = scenario.play().map_err(|e| e.to_string())?;
    let table: Vec<_> = t.checkpoints().map(|c| c.state.report.signature()).collect();
    let want: Vec<_> = EXPECTED_CHECKPOINTS.iter().map(|&(_, sig)| sig).collect();
    ensure(table == want, format!("checkpoints {table:?}"))?;
    ensure(t.max_bad_pairs() == 14, format!("max bad pairs {}", t.max_bad_pairs()))?;
    let peak = t
        .steps
        .iter()
        .find(|s| s.state.report.b() == 14)
        .ok_or("no state with 14 bad pairs")?;
    ensure(bad_pairs_at(&peak.state.report, vertex("x0")) == (2, 2), "x0 lacks two bad pairs of each colour")?;
    for s in &t.steps {
        let (interesting, bad_vertices, _) = s.state.report.signature();
        ensure(interesting <= 4 && bad_vertices <= 6, format!("limits exceeded at step {}", s.index))?;
    }
    for c in t.checkpoints() {
        let checks = check_pairing_ratio(&[(c.state.colored.clone(), c.state.report.clone())], 5, DEFAULT_PAIRING_CAP)
            .map_err(|e| e.to_string())?;
        let r = &checks[0];
        let ceiling = r.balanced_pairings.clone() * BigUint::from(5u32).pow(14);
        ensure(r.state_pairings <= ceiling, format!("5^14 ratio fails at {:?}", c.state.label))?;
        ensure(r.within_d_pow_b, format!("5^b ratio fails at {:?}", c.state.label))?;
    }
    within(start, Duration::from_secs(1))?;
    Ok(format!("table matches, max 14, x0 (2,2), ratio ok, {:?}", start.elapsed()))
}

fn valid(g: &RegularGraph) -> bool {
    RegularGraph::new(g.n(), g.d(), g.edges().iter().copied()).is_ok_and(|h| &h == g)
}

fn structural_fuzzing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let spaces: Vec<StateSpace> = [(5, 2), (6, 2), (6, 3), (7, 2), (7, 4), (8, 3)]
        .into_iter()
        .map(|(n, d)| space(n, d))
        .collect::<Result<_, _>>()?;
    let mut steps = 0u64;
    while steps < 10_000 {
        let s = &spaces[rng.gen_range(0..spaces.len())];
        let g = &s.states()[rng.gen_range(0..s.len())];
        let gp = &s.states()[rng.gen_range(0..s.len())];
        let h = symmetric_difference(g, gp).map_err(|e| e.to_string())?;
        let mut chain = SwitchChain::new(g);
        for _ in 0..500 {
            chain.step(&mut rng);
            steps += 1;
            let z = chain.state();
            ensure(valid(&z), format!("invalid graph after {steps} steps: {:?}", z.edges()))?;
            ensure(s.index_of(&z).is_some(), "state left the enumerated space")?;
            let labels = encode_graphs(g, gp, &z).map_err(|e| e.to_string())?;
            for e in labels.bad_edges() {
                ensure(!h.contains(&e), format!("bad label on H-edge {e}"))?;
            }
        }
    }
    Ok(format!("{steps} steps valid, no bad label inside H"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 exact kernel correctness", kernel_correctness),
        ("2 enumeration oracles", enumeration_oracles),
        ("3 mixing dominance", mixing_dominance),
        ("4 sampler agreement", sampler_agreement),
        ("5 pairing formula suite", pairing_formulas),
        ("6 alternating-pairing count", alternating_counts),
        ("7 scenario reproduction", scenario_reproduction),
        ("8 structural invariants under fuzzing", structural_fuzzing),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("criterion {name}: PASS ({detail})"),
            Err(why) => {
                failed += 1;
                println!("criterion {name}: FAIL ({why})");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 8 acceptance criteria passed");
}
