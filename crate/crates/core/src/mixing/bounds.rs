//! Closed-form upper bounds on the mixing time and on the multicommodity
//! flow, evaluated with natural logarithms.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::{format_float, MixingError};

/// The four bound formulas at one `(n, d, eps)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub n: u32,
    pub d: u32,
    pub eps: f64,
    /// `|Omega_{n,d}|` when known.
    pub states: Option<u64>,
    /// `d^23 n^8 (dn ln(dn) + ln(1/eps))`.
    pub theorem_bound: f64,
    /// `d^15 n^8 (dn ln(dn) + ln(1/eps))`.
    pub old_bound: f64,
    /// `2 d^20 n^5 / |Omega|`, or `None` when `|Omega|` is unknown.
    pub flow_bound: Option<f64>,
    /// `2 d^22 n^7`.
    pub load_bound: f64,
    theorem_prefactor: BigUint,
    old_prefactor: BigUint,
}

fn pow(base: u32, exp: u32) -> BigUint {
    BigUint::from(base).pow(exp)
}

impl BoundsReport {
    /// `d^23 n^8` exactly.
    pub fn theorem_prefactor(&self) -> &BigUint {
        &self.theorem_prefactor
    }

    /// `d^15 n^8` exactly.
    pub fn old_prefactor(&self) -> &BigUint {
        &self.old_prefactor
    }

    /// The exact ratio of theorem to old bound; always `d^8`.
    pub fn ratio(&self) -> BigUint {
        if self.old_prefactor.is_zero() {
            return pow(self.d, 8);
        }
        &self.theorem_prefactor / &self.old_prefactor
    }

    /// `2 d^20 n^5 / |Omega|` as text, numeric when `|Omega|` is known.
    pub fn flow_bound_text(&self) -> String {
        match self.flow_bound {
            Some(x) => format_float(x),
            None => format!("2*{}^20*{}^5/|Omega|", self.d, self.n),
        }
    }

    /// CSV with columns `name,value`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let rows = [
            ("theorem_bound", format_float(self.theorem_bound)),
            ("old_bound", format_float(self.old_bound)),
            ("flow_bound", self.flow_bound_text()),
            ("load_bound", format_float(self.load_bound)),
            ("ratio", self.ratio().to_string()),
        ];
        w.write_record(["name", "value"]).expect("in-memory write");
        for (name, value) in rows {
            w.write_record([name, value.as_str()]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
    }
}

/// Evaluates all four bounds. `states` is `|Omega_{n,d}|` if known.
pub fn theorem_bound(n: u32, d: u32, eps: f64, states: Option<u64>) -> Result<BoundsReport, MixingError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(MixingError::InvalidEpsilon(eps));
    }
    let dn = f64::from(d) * f64::from(n);
    let log_term = if dn > 0.0 { dn * dn.ln() } else { 0.0 } + (1.0 / eps).ln();
    let n8 = pow(n, 8);
    let theorem_prefactor = pow(d, 23) * &n8;
    let old_prefactor = pow(d, 15) * &n8;
    let big = |x: &BigUint| x.to_f64().unwrap_or(f64::INFINITY);
    let flow_numerator = pow(d, 20) * pow(n, 5) * 2u32;
    let flow_bound = states.filter(|&s| s > 0).map(|s| big(&flow_numerator) / s as f64);
    let load_bound = big(&(pow(d, 22) * pow(n, 7) * 2u32));
    Ok(BoundsReport {
        n,
        d,
        eps,
        states,
        theorem_bound: big(&theorem_prefactor) * log_term,
        old_bound: big(&old_prefactor) * log_term,
        flow_bound,
        load_bound,
        theorem_prefactor,
        old_prefactor,
    })
}
