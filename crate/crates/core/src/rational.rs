//! Exact rationals with a bounded representation.
//!
//! A [`Rat`] stores a reduced fraction whose numerator and denominator both
//! have magnitude below `2^63`. Cross products of two such values fit in an
//! `i128`, so comparison never overflows; arithmetic is checked and reports
//! [`Error::Overflow`] when a reduced result leaves the range.

use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use crate::arith::gcd_u128;
use crate::error::{Error, Result};

const LIMIT: u128 = 1 << 63;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rat {
    num: i128,
    den: i128,
}

impl Rat {
    pub const ZERO: Rat = Rat { num: 0, den: 1 };
    pub const ONE: Rat = Rat { num: 1, den: 1 };

    /// Reduces `num/den`; fails on a zero denominator or an out-of-range result.
    pub fn new(num: i128, den: i128) -> Result<Rat> {
        if den == 0 {
            return Err(Error::invalid("zero denominator"));
        }
        let g = gcd_u128(num.unsigned_abs(), den.unsigned_abs()) as i128;
        let (mut num, mut den) = (num / g, den / g);
        if den < 0 {
            num = -num;
            den = -den;
        }
        if num.unsigned_abs() >= LIMIT || den.unsigned_abs() >= LIMIT {
            return Err(Error::Overflow("rational out of range"));
        }
        Ok(Rat { num, den })
    }

    pub fn from_int(n: i64) -> Rat {
        Rat {
            num: n as i128,
            den: 1,
        }
    }

    pub fn num(&self) -> i128 {
        self.num
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_reduced_fraction(num: i128, den: i128) -> bool {
        den > 0 && gcd_u128(num.unsigned_abs(), den as u128) == 1
    }

    pub fn checked_add(&self, other: &Rat) -> Result<Rat> {
        Rat::new(
            self.num * other.den + other.num * self.den,
            self.den * other.den,
        )
    }

    pub fn checked_sub(&self, other: &Rat) -> Result<Rat> {
        Rat::new(
            self.num * other.den - other.num * self.den,
            self.den * other.den,
        )
    }

    pub fn checked_mul(&self, other: &Rat) -> Result<Rat> {
        // cancel crosswise first so the products stay small
        let g1 = gcd_u128(self.num.unsigned_abs(), other.den as u128).max(1) as i128;
        let g2 = gcd_u128(other.num.unsigned_abs(), self.den as u128).max(1) as i128;
        Rat::new(
            (self.num / g1) * (other.num / g2),
            (self.den / g2) * (other.den / g1),
        )
    }

    pub fn recip(&self) -> Result<Rat> {
        Rat::new(self.den, self.num)
    }

    pub fn neg(&self) -> Rat {
        Rat {
            num: -self.num,
            den: self.den,
        }
    }

    pub fn abs(&self) -> Rat {
        Rat {
            num: self.num.abs(),
            den: self.den,
        }
    }

    pub fn floor(&self) -> i128 {
        self.num.div_euclid(self.den)
    }

    /// Representative of `self mod 1` in `[0, 1)`.
    pub fn frac(&self) -> Rat {
        Rat {
            num: self.num.rem_euclid(self.den),
            den: self.den,
        }
    }

    /// `(k · self) mod 1` without forming `k · self`.
    pub fn mul_int_frac(&self, k: i128) -> Rat {
        let k = k.rem_euclid(self.den);
        let n = self.num.rem_euclid(self.den);
        let prod = ((k as u128 * n as u128) % self.den as u128) as i128;
        // gcd(num, den) = 1 still leaves gcd(k·num, den) to cancel
        let g = gcd_u128(prod as u128, self.den as u128) as i128;
        Rat {
            num: prod / g,
            den: self.den / g,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Default for Rat {
    fn default() -> Self {
        Rat::ZERO
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Parses `p/q`, an integer, or a plain decimal such as `0.22`, `-1.5`.
/// Fractions are reduced; use [`Rat::is_reduced_fraction`] beforehand to
/// reject unreduced input.
impl FromStr for Rat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rat> {
        let s = s.trim();
        let bad = || Error::invalid(alloc::format!("cannot parse '{s}' as a rational"));
        if let Some((n, d)) = s.split_once('/') {
            let n: i128 = n.trim().parse().map_err(|_| bad())?;
            let d: i128 = d.trim().parse().map_err(|_| bad())?;
            return Rat::new(n, d);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 18 {
                return Err(bad());
            }
            let negative = int.starts_with('-');
            let int_digits = int.trim_start_matches(['-', '+']);
            if !int_digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let mut digits = String::from(int_digits);
            digits.push_str(frac);
            let mag: i128 = digits.parse().map_err(|_| bad())?;
            let den = 10i128.pow(frac.len() as u32);
            return Rat::new(if negative { -mag } else { mag }, den);
        }
        let n: i128 = s.parse().map_err(|_| bad())?;
        Rat::new(n, 1)
    }
}
