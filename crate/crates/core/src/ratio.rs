//! Exact non-negative rationals for stretch factors, overheads and
//! probabilities.
//!
//! Kept deliberately small: packet counts are derived from rationals with
//! explicit rounding, so no floating point enters the parameter arithmetic.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// A reduced fraction `num / den` with `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ratio {
    num: u64,
    den: u64,
}

const fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Ratio {
    pub const ZERO: Ratio = Ratio { num: 0, den: 1 };
    pub const ONE: Ratio = Ratio { num: 1, den: 1 };

    /// Builds a reduced ratio. Fails on a zero denominator.
    pub fn new(num: u64, den: u64) -> Result<Ratio> {
        if den == 0 {
            return Err(Error::BadRatio(format!("{num}/{den}")));
        }
        let g = gcd(num.max(1), den);
        let g = if num == 0 { den } else { g };
        Ok(Ratio {
            num: num / g,
            den: den / g,
        })
    }

    pub fn from_int(v: u64) -> Ratio {
        Ratio { num: v, den: 1 }
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// `ceil(self * v)`, exact in u128 intermediate arithmetic.
    pub fn ceil_mul(&self, v: u64) -> Result<u64> {
        let prod = self.num as u128 * v as u128;
        let q = prod.div_ceil(self.den as u128);
        u64::try_from(q).map_err(|_| Error::CountOverflow)
    }

    /// `round(self * v)` with halves rounding up.
    pub fn round_mul(&self, v: u64) -> Result<u64> {
        let prod = self.num as u128 * v as u128;
        let q = (2 * prod + self.den as u128) / (2 * self.den as u128);
        u64::try_from(q).map_err(|_| Error::CountOverflow)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Ratio) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Ratio) -> Ordering {
        let lhs = self.num as u128 * other.den as u128;
        let rhs = other.num as u128 * self.den as u128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Accepts `"2"`, `"3/2"` and decimal literals like `"1.15"`.
impl FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Ratio> {
        let bad = || Error::BadRatio(s.to_string());
        if let Some((a, b)) = s.split_once('/') {
            let num = a.trim().parse::<u64>().map_err(|_| bad())?;
            let den = b.trim().parse::<u64>().map_err(|_| bad())?;
            return Ratio::new(num, den);
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            if frac_part.is_empty() || frac_part.len() > 18 {
                return Err(bad());
            }
            let int = int_part.trim().parse::<u64>().map_err(|_| bad())?;
            let frac = frac_part.parse::<u64>().map_err(|_| bad())?;
            let scale = 10u64
                .checked_pow(frac_part.len() as u32)
                .ok_or_else(bad)?;
            let num = int
                .checked_mul(scale)
                .and_then(|v| v.checked_add(frac))
                .ok_or_else(bad)?;
            return Ratio::new(num, scale);
        }
        let v = s.trim().parse::<u64>().map_err(|_| bad())?;
        Ok(Ratio::from_int(v))
    }
}
