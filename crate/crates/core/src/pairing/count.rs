use num_bigint::BigUint;
use num_traits::One;

use super::PairingError;

fn binomial(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after the multiplication.
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

fn factorial(n: u128) -> Option<u128> {
    (1..=n).try_fold(1u128, |acc, i| acc.checked_mul(i))
}

fn double_factorial_odd(two_k: u128) -> Option<u128> {
    // (2k - 1)!! = 1 * 3 * ... * (2k - 1); equals 1 for k = 0.
    (1..two_k).step_by(2).try_fold(1u128, |acc, i| acc.checked_mul(i))
}

/// Number of ways to pair up `green + yellow` arcs at one vertex so that no
/// two arcs of the minority colour are paired together.
///
/// With majority `a`, minority `b` and `a - b = 2k`, every such pairing joins
/// `2k` majority arcs among themselves (`k` same-colour pairs) and matches the
/// rest across colours: `C(a, 2k) (2k-1)!! b!`. Balanced vertices give `θ!`.
pub fn count_vertex_pairings(green: u32, yellow: u32) -> Result<u128, PairingError> {
    if (green + yellow) % 2 == 1 {
        return Err(PairingError::Parity { green, yellow });
    }
    let (major, minor) = (green.max(yellow) as u128, green.min(yellow) as u128);
    let two_k = major - minor;
    let overflow = PairingError::Overflow { green, yellow };
    let choose = binomial(major, two_k).ok_or(overflow.clone())?;
    let inner = double_factorial_odd(two_k).ok_or(overflow.clone())?;
    let cross = factorial(minor).ok_or(overflow.clone())?;
    choose
        .checked_mul(inner)
        .and_then(|x| x.checked_mul(cross))
        .ok_or(overflow)
}

pub(crate) fn big_factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}
