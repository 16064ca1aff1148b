//! State-space enumeration and mixing diagnostics for the switch chain.

mod bounds;
mod empirical;
mod enumerate;
mod exact;

use nalgebra::SymmetricEigen;
use thiserror::Error;

use crate::chain::{ChainError, TransitionMatrix};
use crate::graph::GraphError;

pub use bounds::{theorem_bound, BoundsReport};
pub use empirical::{empirical_tv, empirical_tv_curve};
pub use enumerate::{
    complement_bijection_check, count_state_space, enumerate_state_space, orbit_representatives, StateSpace, DEFAULT_ENUMERATION_CAP,
};
pub use exact::{
    exact_mixing_time, mixing_times, tv_curve, tv_curve_from, MixingOptions, DEFAULT_EXACT_LIMIT,
    DEFAULT_MAX_STEPS,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MixingError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("StateSpaceTooLarge: more than {cap} states (reached {states}); raise the cap to proceed")]
    StateSpaceTooLarge { states: usize, cap: usize },
    #[error("MismatchedParameters: expected (n, d) = {expected:?}, found {found:?}")]
    MismatchedParameters { expected: (u32, u32), found: (u32, u32) },
    #[error("NotConnected: some state is unreachable, so the distance to uniform never vanishes")]
    NotConnected,
    #[error("NumericalFailure: {0}")]
    NumericalFailure(String),
    #[error("NoConvergence: threshold not reached within {max_steps} steps")]
    NoConvergence { max_steps: u64 },
    #[error("InvalidEpsilon: {0} is not in (0, 1)")]
    InvalidEpsilon(f64),
}

/// Formats a float with 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Largest kernel handed to the dense eigensolver.
pub const SPECTRUM_LIMIT: usize = 4_000;

/// Eigenvalues of `P` in decreasing order.
pub fn spectrum(p: &TransitionMatrix) -> Result<Vec<f64>, MixingError> {
    if p.len() > SPECTRUM_LIMIT {
        return Err(MixingError::StateSpaceTooLarge {
            states: p.len(),
            cap: SPECTRUM_LIMIT,
        });
    }
    let dense = p.to_dense();
    let eig = SymmetricEigen::try_new(dense, f64::EPSILON, 0)
        .ok_or_else(|| MixingError::NumericalFailure("symmetric eigensolver did not converge".into()))?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// `1 - lambda_2`; a single state has gap 1.
pub fn spectral_gap(p: &TransitionMatrix) -> Result<f64, MixingError> {
    if p.len() <= 1 {
        return Ok(1.0);
    }
    let values = spectrum(p)?;
    Ok(1.0 - values[1])
}

/// Summary of exact mixing diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingReport {
    pub spectral_gap: f64,
    pub relaxation_time: f64,
    /// `(eps, tau(eps))` in the order requested.
    pub tau: Vec<(f64, u64)>,
    pub empirical_tv: Option<Vec<(u64, f64)>>,
}

impl MixingReport {
    /// Computes the gap and the mixing times for each threshold.
    pub fn compute(p: &TransitionMatrix, eps: &[f64], opts: MixingOptions) -> Result<Self, MixingError> {
        let gap = spectral_gap(p)?;
        let taus = mixing_times(p, eps, opts)?;
        Ok(MixingReport {
            spectral_gap: gap,
            relaxation_time: 1.0 / gap,
            tau: eps.iter().copied().zip(taus).collect(),
            empirical_tv: None,
        })
    }

    pub fn tau(&self, eps: f64) -> Option<u64> {
        self.tau.iter().find(|&&(e, _)| e == eps).map(|&(_, t)| t)
    }
}

/// CSV with columns `t,max_tv`.
pub fn curve_csv(curve: &[(u64, f64)]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "max_tv"]).expect("in-memory write");
    for &(t, tv) in curve {
        w.write_record([t.to_string(), format_float(tv)]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
}

/// CSV with columns `index,eigenvalue`.
pub fn spectrum_csv(values: &[f64]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["index", "eigenvalue"]).expect("in-memory write");
    for (i, &x) in values.iter().enumerate() {
        w.write_record([i.to_string(), format_float(x)]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
}
