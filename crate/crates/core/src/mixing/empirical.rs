use rayon::prelude::*;

use crate::chain::{chain_rng, SwitchChain};
use crate::graph::circulant_start;

use super::{MixingError, StateSpace};

/// Runs `chains` independent chains from the circulant start and returns the
/// TV distance between their histogram after each time in `times` and the
/// uniform distribution on `space`. `times` must be increasing.
///
/// Chain `c` draws from `chain_rng(seed, c)`, so results do not depend on
/// the number of worker threads.
pub fn empirical_tv_curve(
    space: &StateSpace,
    times: &[u64],
    chains: u64,
    seed: u64,
) -> Result<Vec<(u64, f64)>, MixingError> {
    debug_assert!(times.windows(2).all(|w| w[0] < w[1]));
    let start = circulant_start(space.n(), space.d())?;
    let k = space.len();
    let hist = (0..chains)
        .into_par_iter()
        .fold(
            || vec![vec![0u64; k]; times.len()],
            |mut hist, c| {
                let mut rng = chain_rng(seed, c);
                let mut chain = SwitchChain::new(&start);
                let mut now = 0;
                for (slot, &t) in times.iter().enumerate() {
                    while now < t {
                        chain.step(&mut rng);
                        now += 1;
                    }
                    let i = space.index_of_key(&chain.key()).expect("chain stays in the state space");
                    hist[slot][i] += 1;
                }
                hist
            },
        )
        .reduce(
            || vec![vec![0u64; k]; times.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    for (p, q) in x.iter_mut().zip(y) {
                        *p += q;
                    }
                }
                a
            },
        );
    let u = 1.0 / k as f64;
    Ok(times
        .iter()
        .zip(hist)
        .map(|(&t, counts)| {
            let tv = 0.5
                * counts
                    .iter()
                    .map(|&c| (c as f64 / chains as f64 - u).abs())
                    .sum::<f64>();
            (t, tv)
        })
        .collect())
}

/// TV distance to uniform of the empirical end-state histogram after `t` steps.
pub fn empirical_tv(space: &StateSpace, t: u64, chains: u64, seed: u64) -> Result<f64, MixingError> {
    Ok(empirical_tv_curve(space, &[t], chains, seed)?[0].1)
}
