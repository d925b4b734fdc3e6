//! Complete rational exponential sums
//!
//! ```text
//! S_{e,q}(f) = Σ_{n=1}^{q} e_q(f_1 n + … + f_e n^e),   e_q(z) = exp(2πi z / q)
//! ```
//!
//! together with the envelopes used to bound them: the Hua bound
//! `q^{1-1/e}`, the Weil bound `(m-1)√p` at a prime, and the product bound
//! `∏ q_i^{1-1/i}` over the power-structure split `q = q_2 ⋯ q_e`.
//!
//! Every polynomial value is reduced modulo `q` in exact integer arithmetic
//! before it is turned into an angle, so the phase error does not grow with
//! `n`. Sums are accumulated with Neumaier compensation.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{self, gcd, gcd_vec, mul_mod, Factorization};
use crate::error::{Error, Result};
use crate::Budget;

/// Coefficients `(f_1, …, f_e)` of a polynomial without constant term,
/// together with the modulus `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumSpec {
    coeffs: Vec<i128>,
    modulus: u64,
}

impl SumSpec {
    pub fn new(coeffs: Vec<i128>, modulus: u64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("degree must be at least 1"));
        }
        if modulus == 0 {
            return Err(Error::invalid("modulus must be positive"));
        }
        Ok(SumSpec { coeffs, modulus })
    }

    pub fn degree(&self) -> u32 {
        self.coeffs.len() as u32
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    /// Coefficients reduced into `[0, q)`.
    pub fn residues(&self) -> Vec<u64> {
        reduce_all(&self.coeffs, self.modulus)
    }
}

fn reduce_all(coeffs: &[i128], q: u64) -> Vec<u64> {
    coeffs
        .iter()
        .map(|&c| c.rem_euclid(q as i128) as u64)
        .collect()
}

/// Neumaier's variant of Kahan summation.
#[derive(Clone, Copy, Debug, Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct ComplexAccumulator {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexAccumulator {
    #[inline]
    fn add_phase(&mut self, residue: u64, q: u64) {
        let (s, c) = unit_phase(residue, q);
        self.re.add(c);
        self.im.add(s);
    }

    #[inline]
    fn add(&mut self, c: f64, s: f64) {
        self.re.add(c);
        self.im.add(s);
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// `(sin, cos)` of `2π r / q` for `0 ≤ r < q`, with the angle folded into
/// `(-π, π]` first.
#[inline]
fn unit_phase(r: u64, q: u64) -> (f64, f64) {
    let signed = if 2 * (r as u128) > q as u128 {
        r as f64 - q as f64
    } else {
        r as f64
    };
    libm::sincos(TAU * signed / q as f64)
}

/// `f(n) mod q` by Horner's rule, `res` holding `f_1 … f_e` reduced mod `q`.
#[inline]
fn poly_mod(res: &[u64], n: u64, q: u64) -> u64 {
    let mut acc = 0u64;
    if q <= u32::MAX as u64 {
        for &c in res.iter().rev() {
            acc = (acc + c) % q * n % q;
        }
    } else {
        for &c in res.iter().rev() {
            acc = mul_mod((acc + c) % q, n, q);
        }
    }
    acc
}

fn direct_sum(res: &[u64], q: u64) -> Complex64 {
    let mut acc = ComplexAccumulator::default();
    // n = q contributes f(0) = 0, i.e. the term 1
    acc.add(1.0, 0.0);
    for n in 1..q {
        acc.add_phase(poly_mod(res, n, q), q);
    }
    acc.value()
}

/// Term-by-term evaluation under the default direct budget.
pub fn eval_direct(spec: &SumSpec) -> Result<Complex64> {
    eval_direct_limited(spec, Budget::DEFAULT_DIRECT_TERMS)
}

/// Term-by-term evaluation; moduli above `max_terms` are rejected and
/// should go through [`eval_crt`] instead.
pub fn eval_direct_limited(spec: &SumSpec, max_terms: u64) -> Result<Complex64> {
    let q = spec.modulus;
    if q > max_terms {
        return Err(Error::BudgetExceeded {
            what: "direct evaluation (use eval_crt for composite moduli)",
            needed: q as u128,
            limit: max_terms,
        });
    }
    Ok(direct_sum(&spec.residues(), q))
}

/// Multiplicative evaluation over the coprime prime-power parts of `q`.
///
/// For `q = q'q''` with `gcd(q', q'') = 1` and `f(0) = 0`,
/// `S_{q'q''}(f) = S_{q'}(g') · S_{q''}(g'')` where
/// `g'_k = f_k (q'')^{k-1} mod q'` and `g''_k = f_k (q')^{k-1} mod q''`.
/// The split recurses until every factor is a prime power, each summed
/// directly.
pub fn eval_crt(spec: &SumSpec, fact: &Factorization) -> Result<Complex64> {
    eval_crt_limited(spec, fact, Budget::DEFAULT_DIRECT_TERMS)
}

pub fn eval_crt_limited(spec: &SumSpec, fact: &Factorization, max_terms: u64) -> Result<Complex64> {
    if fact.n() != spec.modulus {
        return Err(Error::invalid(alloc::format!(
            "factorization of {} supplied for modulus {}",
            fact.n(),
            spec.modulus
        )));
    }
    let parts: Vec<u64> = fact.prime_powers().collect();
    if let Some(&big) = parts.iter().find(|&&p| p > max_terms) {
        return Err(Error::BudgetExceeded {
            what: "prime-power part of a multiplicative evaluation",
            needed: big as u128,
            limit: max_terms,
        });
    }
    if parts.is_empty() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    Ok(crt_split(&spec.residues(), spec.modulus, &parts))
}

fn crt_split(res: &[u64], q: u64, parts: &[u64]) -> Complex64 {
    let (&head, tail) = parts.split_first().expect("nonempty parts");
    if tail.is_empty() {
        return direct_sum(res, head);
    }
    let rest = q / head;
    let twist = |modulus: u64, by: u64| -> Vec<u64> {
        let by = by % modulus;
        let mut scale = 1 % modulus;
        res.iter()
            .map(|&c| {
                let g = mul_mod(c % modulus, scale, modulus);
                scale = mul_mod(scale, by, modulus);
                g
            })
            .collect()
    };
    let head_res = twist(head, rest);
    let rest_res = twist(rest, head);
    direct_sum(&head_res, head) * crt_split(&rest_res, rest, tail)
}

/// Direct evaluation when `q` is within the direct budget, otherwise the
/// multiplicative route.
pub fn eval_auto(spec: &SumSpec, budget: &Budget) -> Result<Complex64> {
    if spec.modulus <= budget.direct_terms {
        eval_direct_limited(spec, budget.direct_terms)
    } else {
        let fact = arith::factorize(spec.modulus)?;
        eval_crt_limited(spec, &fact, budget.direct_terms)
    }
}

/// Precomputed `e_q(r)` for every residue, for repeated sums with one modulus.
#[derive(Clone, Debug)]
pub struct Twiddles {
    q: u64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Twiddles {
    pub const MAX_MODULUS: u64 = 1 << 24;

    pub fn new(q: u64) -> Result<Self> {
        if q == 0 || q > Self::MAX_MODULUS {
            return Err(Error::invalid(alloc::format!(
                "twiddle table modulus must be in [1, {}]",
                Self::MAX_MODULUS
            )));
        }
        let mut cos = Vec::with_capacity(q as usize);
        let mut sin = Vec::with_capacity(q as usize);
        for r in 0..q {
            let (s, c) = unit_phase(r, q);
            cos.push(c);
            sin.push(s);
        }
        Ok(Twiddles { q, cos, sin })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// `S_{e,q}(f)` for coefficients already reduced mod `q`.
    pub fn sum_residues(&self, res: &[u64]) -> Complex64 {
        let q = self.q;
        let mut acc = ComplexAccumulator::default();
        acc.add(1.0, 0.0);
        for n in 1..q {
            let r = poly_mod(res, n, q) as usize;
            acc.add(self.cos[r], self.sin[r]);
        }
        acc.value()
    }

    pub fn sum(&self, coeffs: &[i128]) -> Complex64 {
        self.sum_residues(&reduce_all(coeffs, self.q))
    }
}

/// `cont_q(f) = gcd(f_1, …, f_e, q)`; the constant term is never part of `f`.
pub fn q_content(f: &[i128], q: u64) -> u64 {
    gcd_vec(f, q)
}

/// Largest `k` with `f_k ≢ 0 (mod q)`, or 0 when every coefficient vanishes.
pub fn reduced_degree(f: &[i128], q: u64) -> u32 {
    f.iter()
        .rposition(|&c| c.rem_euclid(q as i128) != 0)
        .map_or(0, |i| i as u32 + 1)
}

/// The split `q = q_2 ⋯ q_e` obtained by routing each prime power `p^a ∥ q`
/// by its exponent: `a ≤ 2` to `q_2`, `a = i` to `q_i` for `3 ≤ i ≤ e-1`,
/// and `a ≥ e` to `q_e`.
///
/// For `e = 2` there are two parts, both carrying index 2: the cube-free
/// part (`a ≤ 2`) and the cube-full part (`a ≥ 3`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModulusDecomposition {
    q: u64,
    e: u32,
    parts: Vec<u64>,
}

impl ModulusDecomposition {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    /// Raw parts in routing order: `q_2, …, q_e` (or cube-free, cube-full
    /// for `e = 2`).
    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    /// `(i, q_i)` pairs; `i` is the index whose exponent `1 - 1/i` applies.
    pub fn indexed_parts(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        let e = self.e;
        self.parts
            .iter()
            .enumerate()
            .map(move |(j, &v)| ((j as u32 + 2).min(e), v))
    }

    /// `q_i` for `2 ≤ i ≤ e`. For `e = 2` this is the cube-free part.
    pub fn part(&self, i: u32) -> Option<u64> {
        if i < 2 || i > self.e {
            return None;
        }
        self.parts.get((i - 2) as usize).copied()
    }

    /// The cube-full part when `e = 2`.
    pub fn cube_full_part(&self) -> Option<u64> {
        (self.e == 2).then(|| self.parts[1])
    }
}

pub fn decompose_modulus(q: u64, e: u32) -> Result<ModulusDecomposition> {
    let fact = arith::factorize(q)?;
    decompose_factored(&fact, e)
}

pub fn decompose_factored(fact: &Factorization, e: u32) -> Result<ModulusDecomposition> {
    if e < 2 {
        return Err(Error::invalid(alloc::format!(
            "degree must be at least 2, got {e}"
        )));
    }
    let slots = if e == 2 { 2 } else { (e - 1) as usize };
    let mut parts = vec![1u64; slots];
    for &(p, a) in fact.factors() {
        let slot = if a <= 2 {
            0
        } else if e == 2 {
            1
        } else {
            (a.min(e) - 2) as usize
        };
        parts[slot] *= p.pow(a);
    }
    Ok(ModulusDecomposition {
        q: fact.n(),
        e,
        parts,
    })
}

/// `q^{1-1/e}`, without the `q^{o(1)}` factor.
pub fn hua_bound(q: u64, e: u32) -> f64 {
    if e == 0 {
        return 1.0;
    }
    libm::pow(q as f64, 1.0 - 1.0 / e as f64)
}

/// `q^{1-1/e} s^{1/e}` for a polynomial of q-content `s`.
pub fn hua_bound_content(q: u64, e: u32, s: u64) -> f64 {
    hua_bound(q, e) * libm::pow(s as f64, 1.0 / e.max(1) as f64)
}

/// `∏_i q_i^{1-1/i}` over the decomposition.
pub fn refined_bound(dec: &ModulusDecomposition) -> f64 {
    dec.indexed_parts()
        .map(|(i, v)| libm::pow(v as f64, 1.0 - 1.0 / i as f64))
        .product()
}

/// `q ∏_i (q_i / gcd(q_i, s))^{-1/i}` for a polynomial of q-content `s`.
pub fn refined_bound_gcd(dec: &ModulusDecomposition, s: u64) -> Result<f64> {
    if s == 0 || !dec.q.is_multiple_of(s) {
        return Err(Error::invalid(alloc::format!(
            "{s} does not divide {}",
            dec.q
        )));
    }
    let shrink: f64 = dec
        .indexed_parts()
        .map(|(i, v)| libm::pow((v / gcd(v, s)) as f64, -1.0 / i as f64))
        .product();
    Ok(dec.q as f64 * shrink)
}

/// `(m-1)√p` for a polynomial of degree `m` modulo a prime `p`, `1 ≤ m < p`.
pub fn weil_bound(p: u64, m: u32) -> f64 {
    (m.saturating_sub(1)) as f64 * libm::sqrt(p as f64)
}

/// A sum magnitude next to its envelopes.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub abs_sum: f64,
    pub content: u64,
    pub hua: f64,
    pub refined: f64,
    /// Present only when `q` is prime and the reduced degree `m` has `1 ≤ m < q`.
    pub weil: Option<f64>,
}

/// Envelopes for `spec` at the sum magnitude `abs_sum`. Linear sums
/// (`e = 1`) have both envelopes equal to `q^0 = 1`.
pub fn bound_report(spec: &SumSpec, abs_sum: f64) -> Result<BoundReport> {
    let q = spec.modulus;
    let e = spec.degree();
    let hua = hua_bound(q, e);
    let refined = if e >= 2 {
        refined_bound(&decompose_modulus(q, e)?)
    } else {
        hua
    };
    let m = reduced_degree(&spec.coeffs, q);
    let weil = (arith::is_prime(q) && m >= 1 && (m as u64) < q).then(|| weil_bound(q, m));
    Ok(BoundReport {
        abs_sum,
        content: q_content(&spec.coeffs, q),
        hua,
        refined,
        weil,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    Exhaustive,
    Random { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalResult {
    pub max_abs: f64,
    pub argmax: Vec<u64>,
    pub evaluated: u64,
    pub report: BoundReport,
}

/// Largest candidate count an exhaustive search may visit.
pub const EXHAUSTIVE_LIMIT: u64 = 10_000_000;

/// Number of coefficient vectors `[0, q)^e`, if within the exhaustive limit.
pub fn exhaustive_size(q: u64, e: u32) -> Result<u64> {
    let size = (q as u128).checked_pow(e).unwrap_or(u128::MAX);
    if size > EXHAUSTIVE_LIMIT as u128 {
        return Err(Error::BudgetExceeded {
            what: "exhaustive extremal search",
            needed: size,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    Ok(size as u64)
}

/// The coefficient vector with lexicographic rank `index` (`f_1` most
/// significant).
pub fn unrank(mut index: u64, q: u64, e: u32) -> Vec<u64> {
    let mut f = vec![0u64; e as usize];
    for slot in f.iter_mut().rev() {
        *slot = index % q;
        index /= q;
    }
    f
}

/// Best q-primitive candidate among ranks in `range`, as `(|S|, rank)`.
/// Ties keep the smaller rank.
pub fn extremal_scan(tw: &Twiddles, e: u32, range: core::ops::Range<u64>) -> Option<(f64, u64)> {
    let q = tw.modulus();
    let mut best: Option<(f64, u64)> = None;
    let mut signed = vec![0i128; e as usize];
    for idx in range {
        let f = unrank(idx, q, e);
        for (s, &c) in signed.iter_mut().zip(&f) {
            *s = c as i128;
        }
        if q_content(&signed, q) != 1 {
            continue;
        }
        let v = tw.sum_residues(&f).norm();
        if best.is_none_or(|(b, _)| v > b) {
            best = Some((v, idx));
        }
    }
    best
}

/// Merges two partial scan results; schedule independent.
pub fn merge_best(a: Option<(f64, u64)>, b: Option<(f64, u64)>) -> Option<(f64, u64)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) {
                Some(y)
            } else {
                Some(x)
            }
        }
    }
}

/// Maximum of `|S_{e,q}(f)|` over q-primitive `f`: every `f ∈ [0,q)^e` in
/// exhaustive mode, a seeded sample in random mode.
pub fn extremal_search(q: u64, e: u32, mode: SearchMode) -> Result<ExtremalResult> {
    if q == 0 || e == 0 {
        return Err(Error::invalid("q and e must be positive"));
    }
    match mode {
        SearchMode::Exhaustive => {
            let size = exhaustive_size(q, e)?;
            let tw = Twiddles::new(q)?;
            let best = extremal_scan(&tw, e, 0..size).map(|(v, idx)| (v, unrank(idx, q, e)));
            finish_extremal(q, best, size)
        }
        SearchMode::Random { samples, seed } => {
            let (best, evaluated) = extremal_random(q, e, samples, seed)?;
            finish_extremal(q, best, evaluated)
        }
    }
}

pub fn finish_extremal(
    q: u64,
    best: Option<(f64, Vec<u64>)>,
    evaluated: u64,
) -> Result<ExtremalResult> {
    let Some((max_abs, argmax)) = best else {
        return Err(Error::invalid("no q-primitive coefficient vector"));
    };
    let spec = SumSpec::new(argmax.iter().map(|&c| c as i128).collect(), q)?;
    Ok(ExtremalResult {
        max_abs,
        report: bound_report(&spec, max_abs)?,
        argmax,
        evaluated,
    })
}

/// Best `(|S|, f)` found, and the number of primitive candidates evaluated.
type SampledBest = (Option<(f64, Vec<u64>)>, u64);

fn extremal_random(q: u64, e: u32, samples: u64, seed: u64) -> Result<SampledBest> {
    if samples == 0 {
        return Err(Error::invalid("random mode needs at least one sample"));
    }
    let use_table = q <= Twiddles::MAX_MODULUS;
    let tw = if use_table {
        Some(Twiddles::new(q)?)
    } else {
        None
    };
    if !use_table && q > Budget::DEFAULT_DIRECT_TERMS {
        return Err(Error::BudgetExceeded {
            what: "random extremal search",
            needed: q as u128,
            limit: Budget::DEFAULT_DIRECT_TERMS,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<u64>, f64)> = None;
    let mut evaluated = 0u64;
    let mut attempts = 0u64;
    let max_attempts = samples.saturating_mul(64).saturating_add(64);
    let mut signed = vec![0i128; e as usize];
    while evaluated < samples && attempts < max_attempts {
        attempts += 1;
        let f: Vec<u64> = (0..e).map(|_| rng.gen_range(0..q)).collect();
        for (s, &c) in signed.iter_mut().zip(&f) {
            *s = c as i128;
        }
        if q_content(&signed, q) != 1 {
            continue;
        }
        evaluated += 1;
        let v = match &tw {
            Some(tw) => tw.sum_residues(&f).norm(),
            None => direct_sum(&f, q).norm(),
        };
        let better = match &best {
            None => true,
            Some((bf, bv)) => v > *bv || (v == *bv && f < *bf),
        };
        if better {
            best = Some((f, v));
        }
    }
    Ok((best.map(|(f, v)| (v, f)), evaluated))
}
