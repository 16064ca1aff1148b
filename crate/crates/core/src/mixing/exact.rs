//! Worst-case total-variation distance to uniform of `P^t`, computed by
//! repeated multiplication of the kernel into every start row.
//!
//! Small state spaces use exact integer arithmetic: row `i` of `P^t` is kept
//! as integer numerators over the common denominator `(6M)^t`. Larger ones
//! fall back to `f64` with compensated summation.
//!
//! Relabeling vertices commutes with the kernel and fixes the uniform
//! distribution, so the distance from a start depends only on its
//! isomorphism class and one start per class suffices.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::chain::TransitionMatrix;

use super::{orbit_representatives, MixingError};

/// Largest state space evolved in exact arithmetic by default.
pub const DEFAULT_EXACT_LIMIT: usize = 200;
/// Default guard on the number of powering steps.
pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MixingOptions {
    /// Use exact integers when `|Omega| <= exact_limit`.
    pub exact_limit: usize,
    pub max_steps: u64,
}

impl Default for MixingOptions {
    fn default() -> Self {
        MixingOptions {
            exact_limit: DEFAULT_EXACT_LIMIT,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }
}

/// `eps = mantissa / 2^shift` exactly.
fn dyadic(eps: f64) -> (u64, u32) {
    let bits = eps.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut mantissa, mut exp) = if raw_exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), raw_exp - 1075)
    };
    while mantissa != 0 && mantissa % 2 == 0 && exp < 0 {
        mantissa /= 2;
        exp += 1;
    }
    debug_assert!(exp <= 0, "eps < 1 has a non-positive binary exponent");
    (mantissa, (-exp) as u32)
}

/// Converts `num / den` to `f64` without overflowing either operand.
pub(crate) fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = den.bits().saturating_sub(100).min(num.bits().saturating_sub(100));
    let n = (num >> shift).to_f64().unwrap_or(f64::INFINITY);
    let d = (den >> shift).to_f64().unwrap_or(f64::INFINITY);
    if d.is_infinite() {
        let extra = den.bits() - 1000;
        return ratio_to_f64(&(num >> extra), &(den >> extra));
    }
    n / d
}

/// Distances from every start state, one step at a time.
pub(crate) enum Evolution<'a> {
    Exact {
        p: &'a TransitionMatrix,
        cols: Vec<Vec<(usize, u64)>>,
        rows: Vec<Vec<BigUint>>,
        scale: BigUint,
    },
    Float {
        p: &'a TransitionMatrix,
        cols: Vec<Vec<(usize, f64)>>,
        rows: Vec<Vec<f64>>,
    },
}

impl<'a> Evolution<'a> {
    /// Starts from the identity restricted to `starts`.
    pub(crate) fn new(p: &'a TransitionMatrix, starts: &[usize], exact: bool) -> Self {
        let k = p.len();
        if exact {
            let rows = starts
                .iter()
                .map(|&i| {
                    let mut r = vec![BigUint::zero(); k];
                    r[i] = BigUint::from(1u32);
                    r
                })
                .collect();
            Evolution::Exact {
                p,
                cols: (0..k).map(|j| p.row(j)).collect(),
                rows,
                scale: BigUint::from(1u32),
            }
        } else {
            let rows = starts
                .iter()
                .map(|&i| {
                    let mut r = vec![0.0; k];
                    r[i] = 1.0;
                    r
                })
                .collect();
            let den = p.denominator() as f64;
            let cols = (0..k)
                .map(|j| p.row(j).into_iter().map(|(i, c)| (i, c as f64 / den)).collect())
                .collect();
            Evolution::Float { p, cols, rows }
        }
    }

    /// Multiplies every row by `P` on the right. `P` is symmetric, so column
    /// `j` of `P` is its row `j`.
    pub(crate) fn advance(&mut self) {
        match self {
            Evolution::Exact { p, cols, rows, scale } => {
                rows.par_iter_mut().for_each(|row| {
                    let next: Vec<BigUint> = cols
                        .iter()
                        .map(|col| {
                            col.iter()
                                .fold(BigUint::zero(), |acc, &(k, c)| acc + &row[k] * c)
                        })
                        .collect();
                    *row = next;
                });
                *scale *= p.denominator();
            }
            Evolution::Float { cols, rows, .. } => {
                rows.par_iter_mut().for_each(|row| {
                    let next: Vec<f64> = cols
                        .iter()
                        .map(|col| neumaier(col.iter().map(|&(k, w)| row[k] * w)))
                        .collect();
                    *row = next;
                });
            }
        }
    }

    /// Total-variation distance to uniform of each tracked row, and whether
    /// each is at most `eps` (decided exactly in exact mode).
    pub(crate) fn distances(&self, eps: Option<f64>) -> Vec<(f64, bool)> {
        match self {
            Evolution::Exact { p, rows, scale, .. } => {
                let k = BigUint::from(p.len());
                // TV = sum_j |k N_j - scale| / (2 k scale)
                let den = &k * scale * 2u32;
                rows.par_iter()
                    .map(|row| {
                        let sum = row.iter().fold(BigUint::zero(), |acc, x| {
                            let kx = &k * x;
                            if kx >= *scale {
                                acc + (kx - scale)
                            } else {
                                acc + (scale - kx)
                            }
                        });
                        let ok = eps.is_some_and(|e| {
                            let (m, s) = dyadic(e);
                            (&sum << s) <= &den * m
                        });
                        (ratio_to_f64(&sum, &den), ok)
                    })
                    .collect()
            }
            Evolution::Float { p, rows, .. } => {
                let u = 1.0 / p.len() as f64;
                rows.par_iter()
                    .map(|row| {
                        let tv = 0.5 * neumaier(row.iter().map(|&x| (x - u).abs()));
                        (tv, eps.is_some_and(|e| tv <= e))
                    })
                    .collect()
            }
        }
    }
}

/// Neumaier's compensated sum.
fn neumaier(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn check_eps(eps: f64) -> Result<(), MixingError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(MixingError::InvalidEpsilon(eps));
    }
    Ok(())
}

/// Smallest `t` with `max_i TV(P^t[i, .], uniform) <= eps`.
pub fn exact_mixing_time(p: &TransitionMatrix, eps: f64, opts: MixingOptions) -> Result<u64, MixingError> {
    let taus = mixing_times(p, &[eps], opts)?;
    Ok(taus[0])
}

/// Mixing times for several thresholds from one evolution.
pub fn mixing_times(p: &TransitionMatrix, eps: &[f64], opts: MixingOptions) -> Result<Vec<u64>, MixingError> {
    for &e in eps {
        check_eps(e)?;
    }
    if !p.is_connected() {
        return Err(MixingError::NotConnected);
    }
    let starts = orbit_representatives(p.states());
    let mut evo = Evolution::new(p, &starts, p.len() <= opts.exact_limit);
    let mut taus: Vec<Option<u64>> = vec![None; eps.len()];
    let mut t = 0u64;
    loop {
        for (k, &e) in eps.iter().enumerate() {
            if taus[k].is_none() && evo.distances(Some(e)).iter().all(|&(_, ok)| ok) {
                taus[k] = Some(t);
            }
        }
        if taus.iter().all(Option::is_some) {
            return Ok(taus.into_iter().map(Option::unwrap).collect());
        }
        if t >= opts.max_steps {
            return Err(MixingError::NoConvergence { max_steps: opts.max_steps });
        }
        evo.advance();
        t += 1;
    }
}

/// `max_i TV(P^t[i, .], uniform)` for `t = 0..=t_max`.
pub fn tv_curve(p: &TransitionMatrix, t_max: u64, opts: MixingOptions) -> Vec<(u64, f64)> {
    curve(p, &orbit_representatives(p.states()), t_max, opts)
}

/// `TV(P^t[start, .], uniform)` for `t = 0..=t_max`.
pub fn tv_curve_from(p: &TransitionMatrix, start: usize, t_max: u64, opts: MixingOptions) -> Vec<(u64, f64)> {
    curve(p, &[start], t_max, opts)
}

fn curve(p: &TransitionMatrix, starts: &[usize], t_max: u64, opts: MixingOptions) -> Vec<(u64, f64)> {
    let mut evo = Evolution::new(p, starts, p.len() <= opts.exact_limit);
    let mut out = Vec::with_capacity(t_max as usize + 1);
    for t in 0..=t_max {
        let worst = evo
            .distances(None)
            .into_iter()
            .map(|(tv, _)| tv)
            .fold(0.0, f64::max);
        out.push((t, worst));
        if t < t_max {
            evo.advance();
        }
    }
    out
}
