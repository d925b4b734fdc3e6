//! Polynomial matrix dilations `A(n)X` of rational point sets.
//!
//! This module ties the other pieces together: the matrix type with its
//! degree `e` and height `H`, the pair-denominator histogram `h_q`, the
//! q-content of the bilinear forms `m^t A(X) b`, the bad-set functional
//! evaluated exactly on a finite rational set, the search for the first
//! ε-dense dilation, and the closed-form cardinality bounds.
//!
//! Implied constants of every asymptotic statement are taken to be 1 and
//! all `o(1)` exponents are dropped; the numbers here are envelopes for
//! inspection, not certified inequalities.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{gcd_u128, mul_mod};
use crate::error::{Error, Result};
use crate::expsum::{self, q_content, SumSpec, Twiddles};
use crate::rational::Rat;
use crate::torus::{self, IntMatrix, PointSet, TorusPoint, Verdict};
use crate::Budget;

/// Integer polynomial with ascending coefficients `a_0, a_1, …`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<i64>,
}

impl IntPolynomial {
    pub fn new(coeffs: Vec<i64>) -> Self {
        IntPolynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> i64 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    /// Index of the highest nonzero coefficient (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0).unwrap_or(0)
    }

    pub fn height(&self) -> u64 {
        self.coeffs
            .iter()
            .map(|c| c.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, n: i128) -> Result<i128> {
        self.coeffs.iter().rev().try_fold(0i128, |acc, &c| {
            acc.checked_mul(n)
                .and_then(|v| v.checked_add(c as i128))
                .ok_or(Error::Overflow("polynomial evaluation"))
        })
    }

    /// Value at `n` reduced into `[0, modulus)`.
    pub fn eval_mod(&self, n: i128, modulus: u64) -> i128 {
        let n = n.rem_euclid(modulus as i128) as u64;
        self.coeffs.iter().rev().fold(0u64, |acc, &c| {
            let c = (c as i128).rem_euclid(modulus as i128) as u64;
            ((mul_mod(acc, n, modulus) as u128 + c as u128) % modulus as u128) as u64
        }) as i128
    }
}

/// `A(X) = (a_{r,s}(X))`, a `d × d` matrix of integer polynomials with
/// `a_{r,s}(0) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    dim: usize,
    entries: Vec<IntPolynomial>,
    degree: usize,
    height: u64,
}

impl PolyMatrix {
    /// Row-major entries; every constant term must vanish.
    pub fn new(dim: usize, entries: Vec<IntPolynomial>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::invalid(alloc::format!(
                "a {dim}x{dim} matrix needs {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if let Some(i) = entries.iter().position(|p| p.coeff(0) != 0) {
            return Err(Error::invalid(alloc::format!(
                "entry ({}, {}) has constant term {}; A(0) must be the zero matrix",
                i / dim,
                i % dim,
                entries[i].coeff(0)
            )));
        }
        let degree = entries.iter().map(IntPolynomial::degree).max().unwrap_or(0);
        let height = entries.iter().map(IntPolynomial::height).max().unwrap_or(0);
        Ok(PolyMatrix {
            dim,
            entries,
            degree,
            height,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, r: usize, s: usize) -> &IntPolynomial {
        &self.entries[r * self.dim + s]
    }

    /// Largest degree `e` over the entries.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Largest absolute coefficient `H` over the entries.
    pub fn height(&self) -> u64 {
        self.height
    }

    /// The integer matrix of `X^k` coefficients.
    pub fn coefficient_matrix(&self, k: usize) -> Vec<i128> {
        self.entries.iter().map(|p| p.coeff(k) as i128).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.height == 0
    }
}

/// `A(n)` in exact integers.
pub fn eval_matrix(a: &PolyMatrix, n: i128) -> Result<IntMatrix> {
    let entries = a
        .entries
        .iter()
        .map(|p| p.eval(n))
        .collect::<Result<Vec<_>>>()?;
    IntMatrix::new(a.dim, entries)
}

/// `A(n) mod modulus`, which is all a dilation of points with denominators
/// dividing `modulus` can see.
pub fn eval_matrix_mod(a: &PolyMatrix, n: i128, modulus: u64) -> IntMatrix {
    let entries = a.entries.iter().map(|p| p.eval_mod(n, modulus)).collect();
    IntMatrix::new(a.dim, entries).expect("shape already validated")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NondegeneracyReport {
    /// Nonzero `(u, v)` with `u^t A(X) v` identically zero, if one was found.
    pub witness: Option<(Vec<i64>, Vec<i64>)>,
    pub box_bound: u64,
    pub pairs_checked: u64,
    pub degree: usize,
    pub height: u64,
}

impl NondegeneracyReport {
    pub fn is_clear(&self) -> bool {
        self.witness.is_none()
    }
}

/// Nonzero vectors of `[-b, b]^d` whose first nonzero entry is positive, in
/// increasing max-norm then lexicographic order.
fn sign_reduced_vectors(d: usize, b: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let side = (2 * b + 1) as u64;
    let total = side.pow(d as u32);
    for idx in 0..total {
        let mut v = vec![0i64; d];
        let mut rest = idx;
        for slot in v.iter_mut().rev() {
            *slot = (rest % side) as i64 - b;
            rest /= side;
        }
        if v.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0) {
            out.push(v);
        }
    }
    out.sort_by_key(|v| v.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0));
    out
}

/// Searches `u, v ∈ [-B, B]^d \ {0}` (up to sign) for a pair with
/// `u^t A(X) v ≡ 0`. Finding none only clears the box, not the matrix.
pub fn check_nondegenerate(a: &PolyMatrix, box_bound: u64) -> Result<NondegeneracyReport> {
    if box_bound == 0 {
        return Err(Error::invalid("box bound must be at least 1"));
    }
    let d = a.dim;
    let vecs = sign_reduced_vectors(d, box_bound as i64);
    let coeff_mats: Vec<Vec<i128>> = (1..=a.degree.max(1))
        .map(|k| a.coefficient_matrix(k))
        .collect();
    let mut pairs_checked = 0u64;
    let mut row = vec![0i128; d];
    for u in &vecs {
        for v in &vecs {
            pairs_checked += 1;
            let vanishes = coeff_mats.iter().all(|m| {
                for (s, slot) in row.iter_mut().enumerate() {
                    *slot = (0..d).map(|r| u[r] as i128 * m[r * d + s]).sum();
                }
                row.iter().zip(v).map(|(x, &y)| x * y as i128).sum::<i128>() == 0
            });
            if vanishes {
                return Ok(NondegeneracyReport {
                    witness: Some((u.clone(), v.clone())),
                    box_bound,
                    pairs_checked,
                    degree: a.degree,
                    height: a.height,
                });
            }
        }
    }
    Ok(NondegeneracyReport {
        witness: None,
        box_bound,
        pairs_checked,
        degree: a.degree,
        height: a.height,
    })
}

/// Coefficients `c_1, …, c_e` of `m^t A(X) b` (its constant term is 0).
pub fn form_polynomial(m: &[i128], a: &PolyMatrix, b: &[i128]) -> Result<Vec<i128>> {
    let d = a.dim;
    if m.len() != d || b.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: if m.len() != d { m.len() } else { b.len() },
        });
    }
    (1..=a.degree.max(1))
        .map(|k| {
            let mut acc = 0i128;
            for (r, &mr) in m.iter().enumerate() {
                for (s, &bs) in b.iter().enumerate() {
                    let c = a.entry(r, s).coeff(k) as i128;
                    if c == 0 {
                        continue;
                    }
                    acc = mr
                        .checked_mul(c)
                        .and_then(|v| v.checked_mul(bs))
                        .and_then(|v| acc.checked_add(v))
                        .ok_or(Error::Overflow("bilinear form"))?;
                }
            }
            Ok(acc)
        })
        .collect()
}

/// `cont_q(m^t A(X) b)`.
pub fn content_of_form(m: &[i128], a: &PolyMatrix, b: &[i128], q: u64) -> Result<u64> {
    Ok(q_content(&form_polynomial(m, a, b)?, q))
}

/// The coefficient bound `d² H M max|b|` on `m^t A(X) b` for `m ∈ B(M)`;
/// it caps the q-content of any nonzero form.
pub fn form_coefficient_bound(d: usize, height: u64, m_cutoff: u64, b: &[i128]) -> u128 {
    let bmax = b.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
    (d * d) as u128 * height as u128 * m_cutoff as u128 * bmax
}

/// `q ↦ h_q`: ordered pairs `(i, j)`, diagonal included, whose difference
/// `x_i - x_j` has exact order `q` in `T^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HqHistogram {
    pub dim: usize,
    pub k: u64,
    pub entries: BTreeMap<u64, u64>,
}

impl HqHistogram {
    pub fn get(&self, q: u64) -> u64 {
        self.entries.get(&q).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }

    /// `k q^d`, the ceiling on any single `h_q`.
    pub fn individual_ceiling(&self, q: u64) -> u128 {
        self.k as u128 * (q as u128).saturating_pow(self.dim as u32)
    }
}

pub fn hq_histogram(s: &PointSet) -> Result<HqHistogram> {
    let mut entries = BTreeMap::new();
    for x in s.points() {
        for y in s.points() {
            *entries.entry(x.difference(y)?.order()?).or_insert(0) += 1;
        }
    }
    Ok(HqHistogram {
        dim: s.dim(),
        k: s.len() as u64,
        entries,
    })
}

/// `(q, b)` with `q` the order of `x - y` and `b = q (x - y) mod q`; the
/// minimality of `q` forces `gcd(b, q) = 1`.
pub fn pair_bvector(x: &TorusPoint, y: &TorusPoint) -> Result<(u64, Vec<i128>)> {
    let diff = x.difference(y)?;
    let q = diff.order()?;
    let b = diff
        .coords()
        .iter()
        .map(|c| c.num() * (q as i128 / c.den()))
        .collect();
    Ok((q, b))
}

/// `⌊d / ε⌋`.
pub fn m_cutoff(d: usize, eps: &Rat) -> Result<u64> {
    if *eps <= Rat::ZERO {
        return Err(Error::invalid("eps must be positive"));
    }
    let v = Rat::from_int(d as i64).checked_mul(&eps.recip()?)?.floor();
    u64::try_from(v).map_err(|_| Error::Overflow("frequency cutoff"))
}

/// `ε^{-x}` computed as `(den/num)^x` so that decimal ε stay exact where possible.
fn inv_pow(eps: &Rat, x: f64) -> f64 {
    let base = eps.den() as f64 / eps.num() as f64;
    if x == libm::trunc(x) && libm::fabs(x) < i32::MAX as f64 {
        base.powi_checked(x as i32)
    } else {
        libm::pow(base, x)
    }
}

trait PowI {
    fn powi_checked(self, n: i32) -> f64;
}

impl PowI for f64 {
    /// Repeated squaring; `f64::powi` is not available without std.
    fn powi_checked(self, n: i32) -> f64 {
        let mut base = if n < 0 { 1.0 / self } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = 1.0;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BvecStrategy {
    /// `b_q` from the first ordered pair `(i, j)` whose difference has order `q`.
    FirstPair,
    /// `b_q` maximizing `Σ_m |S|` among all pairs with order `q`.
    MaxOverPairs,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BadSetTerm {
    pub q: u64,
    pub h_q: u64,
    pub b: Vec<i128>,
    /// `Σ_{m ∈ B(M)} |S_{e,q}(m^t A(X) b)|`.
    pub sum_abs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BadSetReport {
    pub m_cutoff: u64,
    pub frequencies: u64,
    /// `k²`.
    pub lhs: u128,
    /// `ε^{-d} Σ_m Σ_q (h_q/q)|S| + ε^{-d} M^d k`.
    pub rhs: f64,
    /// `Σ_m Σ_q (h_q/q)|S|`.
    pub main_sum: f64,
    /// `ε^{-d} M^d k`.
    pub trailing: f64,
    pub terms: Vec<BadSetTerm>,
}

/// Nonzero vectors of `[-M, M]^d`.
fn frequency_box(d: usize, m: u64) -> Vec<Vec<i128>> {
    let side = 2 * m as i128 + 1;
    let total = (side as u128).pow(d as u32);
    let mut out = Vec::with_capacity(total.saturating_sub(1) as usize);
    for idx in 0..total {
        let mut v = vec![0i128; d];
        let mut rest = idx as i128;
        for slot in v.iter_mut().rev() {
            *slot = rest % side - m as i128;
            rest /= side;
        }
        if v.iter().any(|&c| c != 0) {
            out.push(v);
        }
    }
    out
}

/// Evaluates the bad-set inequality's right-hand side exactly, with implied
/// constant 1, next to `k²`. Nothing is asserted about their order.
pub fn bad_set_functional(
    s: &PointSet,
    a: &PolyMatrix,
    eps: &Rat,
    strategy: BvecStrategy,
    budget: &Budget,
) -> Result<BadSetReport> {
    if a.dim != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: a.dim,
        });
    }
    let d = s.dim();
    let m = m_cutoff(d, eps)?;
    let k = s.len() as u64;
    let hist = hq_histogram(s)?;

    // candidate b-vectors per q, first pair first
    let mut candidates: BTreeMap<u64, Vec<Vec<i128>>> = BTreeMap::new();
    for x in s.points() {
        for y in s.points() {
            let (q, b) = pair_bvector(x, y)?;
            let list = candidates.entry(q).or_default();
            let wanted = match strategy {
                BvecStrategy::FirstPair => list.is_empty(),
                BvecStrategy::MaxOverPairs => !list.contains(&b),
            };
            if wanted {
                list.push(b);
            }
        }
    }

    let side = 2 * m as u128 + 1;
    let freq_count = side
        .checked_pow(d as u32)
        .map(|v| v - 1)
        .ok_or(Error::Overflow("frequency count"))?;
    let work: u128 = candidates
        .iter()
        .map(|(&q, bs)| q as u128 * bs.len() as u128)
        .sum::<u128>()
        .saturating_mul(freq_count);
    if work > budget.total_terms as u128 {
        return Err(Error::BudgetExceeded {
            what: "bad-set functional",
            needed: work,
            limit: budget.total_terms,
        });
    }
    let freqs = frequency_box(d, m);
    let e = a.degree.max(1);

    let mut terms = Vec::with_capacity(candidates.len());
    let mut main_sum = 0.0;
    for (&q, bs) in &candidates {
        let table = if q <= Twiddles::MAX_MODULUS {
            Some(Twiddles::new(q)?)
        } else {
            None
        };
        let mut best: Option<(f64, &Vec<i128>)> = None;
        for b in bs {
            let mut total = 0.0;
            for mv in &freqs {
                let f = form_polynomial(mv, a, b)?;
                debug_assert_eq!(f.len(), e);
                total += match &table {
                    Some(tw) => tw.sum(&f).norm(),
                    None => expsum::eval_auto(&SumSpec::new(f, q)?, budget)?.norm(),
                };
            }
            if best.is_none_or(|(v, _)| total > v) {
                best = Some((total, b));
            }
        }
        let (sum_abs, b) = best.expect("every order has a pair");
        let h_q = hist.get(q);
        main_sum += h_q as f64 / q as f64 * sum_abs;
        terms.push(BadSetTerm {
            q,
            h_q,
            b: b.clone(),
            sum_abs,
        });
    }
    let scale = inv_pow(eps, d as f64);
    let trailing = scale * (m as f64).powi_checked(d as i32) * k as f64;
    Ok(BadSetReport {
        m_cutoff: m,
        frequencies: freq_count as u64,
        lhs: k as u128 * k as u128,
        rhs: scale * main_sum + trailing,
        main_sum,
        trailing,
        terms,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchConfig {
    /// Initial grid spacing for `d ≥ 2`.
    pub mesh: f64,
    /// Mesh halvings allowed while the verdict stays `Unknown`.
    pub max_rounds: u32,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            mesh: 0.05,
            max_rounds: 6,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceEntry {
    pub n: u64,
    pub verdict: Verdict,
    /// Exact covering radius of `A(n)X` when `d = 1`.
    pub covering_radius: Option<Rat>,
    /// Distance of the farthest probe (or of the gap midpoint for `d = 1`).
    pub witness_distance: Option<f64>,
    pub mesh: f64,
    /// `#A(n)X` after collapsing repeated images.
    pub support: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GlasnerSearchResult {
    /// Smallest certified-dense `n`, present only when every smaller `n` was
    /// certified not dense.
    pub minimal_n: Option<u64>,
    /// First certified-dense `n`, even if an undecided `n` precedes it.
    pub first_dense: Option<u64>,
    /// Values of `n` whose verdict stayed `Unknown` after refinement.
    pub unresolved: Vec<u64>,
    pub trace: Vec<TraceEntry>,
    pub eps: Rat,
    pub n_max: u64,
}

/// Certifies whether `A(n)X` is ε-dense.
pub fn certify_dilation(
    a: &PolyMatrix,
    s: &PointSet,
    eps: &Rat,
    n: u64,
    cfg: &SearchConfig,
) -> Result<TraceEntry> {
    if a.dim != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: a.dim,
        });
    }
    let m = eval_matrix_mod(a, n as i128, s.lcm_den()?);
    let image = torus::dilate(s, &m)?;
    let cert = torus::certify_density(&image, eps, cfg.mesh, cfg.max_rounds)?;
    Ok(TraceEntry {
        n,
        verdict: cert.verdict,
        covering_radius: cert.covering_radius,
        witness_distance: cert.witness_distance,
        mesh: cert.mesh,
        support: image.len(),
    })
}

/// Builds the result from trace entries for `n = 1, 2, …` in order; the
/// trace is cut after the first dense `n`.
pub fn assemble_search(mut entries: Vec<TraceEntry>, eps: Rat, n_max: u64) -> GlasnerSearchResult {
    entries.sort_by_key(|t| t.n);
    if let Some(pos) = entries.iter().position(|t| t.verdict == Verdict::Dense) {
        entries.truncate(pos + 1);
    }
    let first_dense = entries
        .iter()
        .find(|t| t.verdict == Verdict::Dense)
        .map(|t| t.n);
    let unresolved: Vec<u64> = entries
        .iter()
        .filter(|t| t.verdict == Verdict::Unknown)
        .map(|t| t.n)
        .collect();
    GlasnerSearchResult {
        minimal_n: first_dense.filter(|_| unresolved.is_empty()),
        first_dense,
        unresolved,
        trace: entries,
        eps,
        n_max,
    }
}

/// Scans `n = 1, …, n_max` for the first dilation `A(n)X` that is ε-dense.
pub fn glasner_search(
    a: &PolyMatrix,
    s: &PointSet,
    eps: &Rat,
    n_max: u64,
    cfg: &SearchConfig,
) -> Result<GlasnerSearchResult> {
    if n_max == 0 {
        return Err(Error::invalid("n_max must be positive"));
    }
    let mut trace = Vec::new();
    for n in 1..=n_max {
        let entry = certify_dilation(a, s, eps, n, cfg)?;
        let dense = entry.verdict == Verdict::Dense;
        trace.push(entry);
        if dense {
            break;
        }
    }
    Ok(assemble_search(trace, *eps, n_max))
}

/// Exponents of `H` and `1/ε` in a cardinality bound, stored doubled so
/// that half-integers stay exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KBoundExponents {
    pub height_twice: u64,
    pub eps_twice: u64,
}

impl KBoundExponents {
    /// `H^{d(d+1)} ε^{-d(d+1)(2e+1)}`.
    pub fn prior(d: u64, e: u64) -> Self {
        KBoundExponents {
            height_twice: 2 * d * (d + 1),
            eps_twice: 2 * d * (d + 1) * (2 * e + 1),
        }
    }

    /// `H^{(3d+1)/2} ε^{-d(2d+1)e-(7d+1)/2}`.
    pub fn improved(d: u64, e: u64) -> Self {
        KBoundExponents {
            height_twice: 3 * d + 1,
            eps_twice: 2 * d * (2 * d + 1) * e + 7 * d + 1,
        }
    }

    pub fn height(&self) -> f64 {
        self.height_twice as f64 / 2.0
    }

    pub fn eps(&self) -> f64 {
        self.eps_twice as f64 / 2.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundValue {
    pub value: f64,
    pub log10: f64,
}

fn check_bound_args(d: u64, e: u64, height: u64, eps: &Rat) -> Result<()> {
    if d == 0 {
        return Err(Error::invalid("d must be at least 1"));
    }
    if e < 2 {
        return Err(Error::invalid("e must be at least 2"));
    }
    if height == 0 {
        return Err(Error::invalid("H must be at least 1"));
    }
    if *eps <= Rat::ZERO || *eps >= Rat::ONE {
        return Err(Error::invalid("eps must lie in (0, 1)"));
    }
    Ok(())
}

fn evaluate_bound(ex: KBoundExponents, height: u64, eps: &Rat) -> BoundValue {
    let h = height as f64;
    let value = half_pow(h, ex.height_twice) * inv_pow_half(eps, ex.eps_twice);
    let inv_eps = eps.den() as f64 / eps.num() as f64;
    let log10 = ex.height() * libm::log10(h) + ex.eps() * libm::log10(inv_eps);
    BoundValue { value, log10 }
}

/// `x^{t/2}`.
fn half_pow(x: f64, twice: u64) -> f64 {
    let whole = x.powi_checked((twice / 2) as i32);
    if twice % 2 == 1 {
        whole * libm::sqrt(x)
    } else {
        whole
    }
}

/// `ε^{-t/2}`.
fn inv_pow_half(eps: &Rat, twice: u64) -> f64 {
    let whole = inv_pow(eps, (twice / 2) as f64);
    if twice % 2 == 1 {
        whole * libm::sqrt(eps.den() as f64 / eps.num() as f64)
    } else {
        whole
    }
}

/// Earlier bound on `k_{d,A}(ε)` with `c(d, e)` and `o(1)` dropped.
pub fn k_bound_prior(d: u64, e: u64, height: u64, eps: &Rat) -> Result<BoundValue> {
    check_bound_args(d, e, height, eps)?;
    Ok(evaluate_bound(KBoundExponents::prior(d, e), height, eps))
}

/// Improved bound on `k_{d,A}(ε)` with `c(d, e)` and `o(1)` dropped.
pub fn k_bound_new(d: u64, e: u64, height: u64, eps: &Rat) -> Result<BoundValue> {
    check_bound_args(d, e, height, eps)?;
    Ok(evaluate_bound(KBoundExponents::improved(d, e), height, eps))
}

/// Splitting point `R = C H ε^{-2de-1}` between small and large moduli.
pub fn r_opt(d: u64, e: u64, height: u64, eps: &Rat, c: f64) -> Result<f64> {
    if c.is_nan() || c <= 0.0 {
        return Err(Error::invalid("C must be positive"));
    }
    if d == 0 || e == 0 || *eps <= Rat::ZERO {
        return Err(Error::invalid("d, e and eps must be positive"));
    }
    Ok(c * height as f64 * inv_pow(eps, (2 * d * e + 1) as f64))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineReport {
    pub m_cutoff: u64,
    /// `k H^{d/2} M^{3d/2} R^{d+1/2}`.
    pub s1_envelope: f64,
    /// `k² H^{1/e} M^{d+1/e} R^{-1/e}`.
    pub s2_envelope: f64,
    /// `ε^{-d} M^d k`.
    pub trailing: f64,
    /// `ε^{-d}(S_1 + S_2) + ε^{-d} M^d k`.
    pub combined: f64,
    /// `k²`.
    pub lhs: f64,
}

/// The numeric trade-off between small and large moduli for given
/// parameters. No inequality is asserted.
pub fn proof_pipeline_report(
    d: u64,
    e: u64,
    height: u64,
    eps: &Rat,
    r: f64,
    k: u64,
) -> Result<PipelineReport> {
    if d == 0 || e == 0 || height == 0 || k == 0 || r.is_nan() || r <= 0.0 {
        return Err(Error::invalid("d, e, H, R and k must be positive"));
    }
    let m = m_cutoff(d as usize, eps)?;
    let (df, ef, hf, mf, kf) = (d as f64, e as f64, height as f64, m as f64, k as f64);
    let s1 = kf * libm::pow(hf, df / 2.0) * libm::pow(mf, 1.5 * df) * libm::pow(r, df + 0.5);
    let s2 =
        kf * kf * libm::pow(hf, 1.0 / ef) * libm::pow(mf, df + 1.0 / ef) * libm::pow(r, -1.0 / ef);
    let scale = inv_pow(eps, df);
    let trailing = scale * mf.powi_checked(d as i32) * kf;
    Ok(PipelineReport {
        m_cutoff: m,
        s1_envelope: s1,
        s2_envelope: s2,
        trailing,
        combined: scale * (s1 + s2) + trailing,
        lhs: kf * kf,
    })
}

/// `gcd` over the integer entries of a vector, 0 for the zero vector.
pub fn content_of_vector(v: &[i128]) -> u128 {
    v.iter().fold(0u128, |g, &x| gcd_u128(g, x.unsigned_abs()))
}
