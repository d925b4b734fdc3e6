//! Integer arithmetic on `u64`: gcd helpers, deterministic primality,
//! factorization and power-full / power-free integers.
//!
//! Factorization supports every `n < 2^64` (in particular `n ≤ 10^18`):
//! trial division by small odd numbers, then Brent's variant of Pollard rho
//! with a deterministic Miller-Rabin test.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Odd trial divisors are tried up to this bound before switching to rho.
const TRIAL_BOUND: u64 = 1 << 12;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `lcm(a, b)`, or `None` when it does not fit in a `u64`.
pub fn lcm(a: u64, b: u64) -> Option<u64> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a / gcd(a, b)).checked_mul(b)
}

/// `gcd(a_1, ..., a_n, q)`. The zero vector gives `q`.
pub fn gcd_vec(a: &[i128], q: u64) -> u64 {
    let q = q as u128;
    let mut g = q;
    for &x in a {
        if g == 1 {
            break;
        }
        g = gcd_u128(g, x.unsigned_abs() % q.max(1));
    }
    g as u64
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    // this base set is a proven witness set for every n < 2^64
    'witness: for a in [2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Finds a nontrivial factor of an odd composite `n` (Brent's cycle search).
fn rho_factor(n: u64) -> u64 {
    const BATCH: u64 = 128;
    let mut c = 1u64;
    loop {
        let step = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
        let mut x = y;
        let mut ys = y;
        let mut g = 1u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = step(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = step(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            // the batch overshot; replay it one step at a time
            loop {
                ys = step(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

/// Prime factorization `n = ∏ p^a` with strictly increasing primes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Builds a factorization from `(prime, exponent)` pairs, checking every
    /// invariant (increasing primes, primality, positive exponents, product).
    pub fn from_factors(n: u64, factors: Vec<(u64, u32)>) -> Result<Self> {
        let mut prod: u64 = 1;
        let mut last = 1u64;
        for &(p, a) in &factors {
            if p <= last {
                return Err(Error::invalid("primes must be strictly increasing"));
            }
            if a == 0 {
                return Err(Error::invalid("exponents must be positive"));
            }
            if !is_prime(p) {
                return Err(Error::invalid(alloc::format!("{p} is not prime")));
            }
            for _ in 0..a {
                prod = prod
                    .checked_mul(p)
                    .ok_or(Error::Overflow("factorization product"))?;
            }
            last = p;
        }
        if prod != n {
            return Err(Error::invalid(alloc::format!(
                "factors multiply to {prod}, not {n}"
            )));
        }
        Ok(Factorization { n, factors })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(r, _)| r == p)
            .map_or(0, |&(_, a)| a)
    }

    /// The coprime prime-power parts `p^a`, in increasing order of `p`.
    pub fn prime_powers(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, a)| p.pow(a))
    }

    pub fn is_prime(&self) -> bool {
        matches!(self.factors.as_slice(), [(_, 1)])
    }
}

pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::invalid("cannot factorize 0"));
    }
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut m = n;
    let tz = m.trailing_zeros();
    if tz > 0 {
        factors.push((2, tz));
        m >>= tz;
    }
    let mut d = 3u64;
    while d <= TRIAL_BOUND && d * d <= m {
        if m.is_multiple_of(d) {
            let mut a = 0;
            while m.is_multiple_of(d) {
                m /= d;
                a += 1;
            }
            factors.push((d, a));
        }
        d += 2;
    }
    if m > 1 {
        if d * d > m {
            factors.push((m, 1));
        } else {
            let mut large = Vec::new();
            split_large(m, &mut large);
            large.sort_unstable();
            let mut iter = large.into_iter().peekable();
            while let Some(p) = iter.next() {
                let mut a = 1;
                while iter.peek() == Some(&p) {
                    iter.next();
                    a += 1;
                }
                factors.push((p, a));
            }
        }
    }
    Ok(Factorization { n, factors })
}

fn split_large(m: u64, out: &mut Vec<u64>) {
    if m == 1 {
        return;
    }
    if is_prime(m) {
        out.push(m);
        return;
    }
    // perfect squares make rho slow to separate equal factors
    let r = isqrt(m);
    if r * r == m {
        split_large(r, out);
        split_large(r, out);
        return;
    }
    let f = rho_factor(m);
    split_large(f, out);
    split_large(m / f, out);
}

pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = libm::sqrt(n as f64) as u64;
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

/// Largest `r` with `r^k ≤ n`.
pub fn iroot(n: u64, k: u32) -> u64 {
    if k == 1 || n < 2 {
        return n;
    }
    let mut r = libm::pow(n as f64, 1.0 / k as f64) as u64;
    while r > 0 && r.checked_pow(k).is_none_or(|v| v > n) {
        r -= 1;
    }
    while (r + 1).checked_pow(k).is_some_and(|v| v <= n) {
        r += 1;
    }
    r
}

fn check_nu(nu: u32) -> Result<()> {
    if nu < 2 {
        return Err(Error::invalid(alloc::format!(
            "nu must be at least 2, got {nu}"
        )));
    }
    Ok(())
}

/// `p | n ⇒ p^ν | n` for every prime `p`. `1` is ν-full for every ν.
pub fn is_power_full(n: u64, nu: u32) -> Result<bool> {
    check_nu(nu)?;
    Ok(factorize(n)?.factors().iter().all(|&(_, a)| a >= nu))
}

/// `p | n ⇒ p^ν ∤ n` for every prime `p`. `1` is ν-free for every ν.
pub fn is_power_free(n: u64, nu: u32) -> Result<bool> {
    check_nu(nu)?;
    Ok(factorize(n)?.factors().iter().all(|&(_, a)| a < nu))
}

/// Primes `≤ limit`, by the sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// The ν-full integers in `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerFullSet {
    pub nu: u32,
    pub lo: u64,
    pub hi: u64,
    pub members: Vec<u64>,
}

impl PowerFullSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.members.binary_search(&n).is_ok()
    }
}

/// Enumerates ν-full integers in `[lo, hi]` by depth-first search over
/// prime exponent vectors with every exponent `≥ ν`. The work is
/// proportional to the number of ν-full integers up to `hi`.
pub fn enumerate_power_full(nu: u32, lo: u64, hi: u64) -> Result<PowerFullSet> {
    check_nu(nu)?;
    if lo == 0 {
        return Err(Error::invalid("lo must be positive"));
    }
    if lo > hi {
        return Err(Error::invalid(alloc::format!("empty range [{lo}, {hi}]")));
    }
    let primes = primes_up_to(iroot(hi, nu));
    let mut members = Vec::new();
    power_full_dfs(&primes, 0, 1, nu, hi, &mut members);
    members.retain(|&m| m >= lo);
    members.sort_unstable();
    Ok(PowerFullSet {
        nu,
        lo,
        hi,
        members,
    })
}

fn power_full_dfs(primes: &[u64], from: usize, cur: u64, nu: u32, hi: u64, out: &mut Vec<u64>) {
    out.push(cur);
    let room = hi / cur;
    for (idx, &p) in primes.iter().enumerate().skip(from) {
        let Some(mut pk) = p.checked_pow(nu) else {
            break;
        };
        if pk > room {
            break;
        }
        loop {
            power_full_dfs(primes, idx + 1, cur * pk, nu, hi, out);
            match pk.checked_mul(p) {
                Some(next) if next <= room => pk = next,
                _ => break,
            }
        }
    }
}

/// `#F_ν(x)`, the number of ν-full integers in `[1, x]`.
pub fn count_power_full(nu: u32, x: u64) -> Result<usize> {
    if x == 0 {
        check_nu(nu)?;
        return Ok(0);
    }
    Ok(enumerate_power_full(nu, 1, x)?.len())
}
