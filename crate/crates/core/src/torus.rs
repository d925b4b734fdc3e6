//! Rational points on the torus `T^d = (R/Z)^d`, identified with `[0,1)^d`.
//!
//! All coordinate arithmetic is exact. Floating point only enters when a
//! Euclidean distance is reported.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::arith::lcm;
use crate::error::{Error, Result};
use crate::rational::Rat;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TorusPoint {
    coords: Vec<Rat>,
}

impl TorusPoint {
    /// Accepts coordinates already in `[0, 1)`.
    pub fn new(coords: Vec<Rat>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid(
                "a torus point needs at least one coordinate",
            ));
        }
        if let Some(i) = coords.iter().position(|c| *c < Rat::ZERO || *c >= Rat::ONE) {
            return Err(Error::invalid(alloc::format!(
                "coordinate {i} = {} is outside [0, 1)",
                coords[i]
            )));
        }
        Ok(TorusPoint { coords })
    }

    /// Reduces every coordinate mod 1.
    pub fn wrapped(coords: Vec<Rat>) -> Result<Self> {
        TorusPoint::new(coords.iter().map(Rat::frac).collect())
    }

    pub fn origin(dim: usize) -> Self {
        TorusPoint {
            coords: alloc::vec![Rat::ZERO; dim.max(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(Rat::to_f64).collect()
    }

    /// `self - other` reduced mod 1.
    pub fn difference(&self, other: &TorusPoint) -> Result<TorusPoint> {
        same_dim(self.dim(), other.dim())?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.checked_sub(b).map(|d| d.frac()))
            .collect::<Result<Vec<_>>>()?;
        Ok(TorusPoint { coords })
    }

    /// Smallest `q ≥ 1` with `q · self ∈ Z^d`.
    pub fn order(&self) -> Result<u64> {
        self.coords.iter().try_fold(1u64, |acc, c| {
            lcm(acc, c.den() as u64).ok_or(Error::Overflow("common denominator"))
        })
    }
}

fn same_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Distinct rational points on `T^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    dim: usize,
    points: Vec<TorusPoint>,
    lcm_den: Option<u64>,
}

impl PointSet {
    /// Rejects an empty list, mixed dimensions and repeated points.
    pub fn new(dim: usize, points: Vec<TorusPoint>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        let mut seen = BTreeSet::new();
        for (i, p) in points.iter().enumerate() {
            same_dim(dim, p.dim())?;
            if !seen.insert(p) {
                return Err(Error::invalid(alloc::format!("point {i} is a repeat")));
            }
        }
        Self::build(dim, points)
    }

    /// Keeps the first copy of each point; order otherwise preserved.
    pub fn collapsed(dim: usize, points: Vec<TorusPoint>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut kept = Vec::with_capacity(points.len());
        for p in points {
            same_dim(dim, p.dim())?;
            if seen.insert(p.clone()) {
                kept.push(p);
            }
        }
        Self::build(dim, kept)
    }

    fn build(dim: usize, points: Vec<TorusPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("a point set needs at least one point"));
        }
        let lcm_den = points
            .iter()
            .try_fold(1u64, |acc, p| lcm(acc, p.order().ok()?));
        Ok(PointSet {
            dim,
            points,
            lcm_den,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[TorusPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Common denominator of all coordinates; fails when it exceeds `u64`.
    pub fn lcm_den(&self) -> Result<u64> {
        self.lcm_den.ok_or(Error::Overflow("common denominator"))
    }
}

/// Per-coordinate wrap-around offsets `min(|a-b|, 1-|a-b|)`, exact.
pub fn wrap_offsets(x: &TorusPoint, y: &TorusPoint) -> Result<Vec<Rat>> {
    let diff = x.difference(y)?;
    Ok(diff
        .coords
        .iter()
        .map(|d| {
            let other = Rat::ONE.checked_sub(d).expect("d in [0,1)");
            if *d <= other {
                *d
            } else {
                other
            }
        })
        .collect())
}

/// Euclidean distance on `T^d`.
pub fn torus_distance(x: &TorusPoint, y: &TorusPoint) -> Result<f64> {
    let w = wrap_offsets(x, y)?;
    Ok(libm::sqrt(
        w.iter().map(|c| c.to_f64() * c.to_f64()).sum::<f64>(),
    ))
}

/// Squared distance as an exact rational, when it stays in range.
pub fn torus_distance_sq_exact(x: &TorusPoint, y: &TorusPoint) -> Result<Rat> {
    wrap_offsets(x, y)?
        .iter()
        .try_fold(Rat::ZERO, |acc, c| acc.checked_add(&c.checked_mul(c)?))
}

/// Half the largest circular gap between consecutive points, exact.
pub fn covering_radius_1d(s: &PointSet) -> Result<Rat> {
    largest_gap_1d(s)?.0.checked_mul(&Rat::new(1, 2)?)
}

/// `(gap length, start point)` of the largest circular gap (first one on ties).
fn largest_gap_1d(s: &PointSet) -> Result<(Rat, Rat)> {
    if s.dim != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: s.dim,
        });
    }
    let mut xs: Vec<Rat> = s.points.iter().map(|p| p.coords[0]).collect();
    xs.sort_unstable();
    let first = xs[0];
    let last = *xs.last().expect("nonempty");
    // wrap gap from the last point around to the first
    let mut best = (Rat::ONE.checked_sub(&last)?.checked_add(&first)?, last);
    for w in xs.windows(2) {
        let gap = w[1].checked_sub(&w[0])?;
        if gap > best.0 {
            best = (gap, w[0]);
        }
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Dense,
    NotDense,
    Unknown,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityCertificate {
    pub verdict: Verdict,
    /// For `NotDense`: a point strictly farther than ε from the set.
    pub witness: Option<TorusPoint>,
    /// Distance from the witness (or the farthest probe) to the set.
    pub witness_distance: Option<f64>,
    /// Exact covering radius, available for `d = 1`.
    pub covering_radius: Option<Rat>,
    /// Probe spacing actually used (`1/N` with `N = ⌈1/mesh⌉`); 0 for `d = 1`.
    pub mesh: f64,
}

/// Probes allowed in one grid certification.
pub const MAX_PROBES: u64 = 1 << 26;

/// Decides whether `s` is ε-dense in `T^d`.
///
/// For `d = 1` the verdict is exact. For `d ≥ 2` the torus is cut into
/// `N^d` cubes of side `h = 1/N ≤ mesh` and the distance from each cube
/// center to the set is computed:
///
/// - some center farther than ε (exact check) gives `NotDense`; the witness is
///   the farthest center;
/// - every center within `ε - h√d/2` gives `Dense`, since each point of the
///   torus lies within `h√d/2` of a center;
/// - anything else is `Unknown`; retry with a finer mesh.
pub fn is_eps_dense(s: &PointSet, eps: &Rat, mesh: f64) -> Result<DensityCertificate> {
    if *eps <= Rat::ZERO {
        return Err(Error::invalid("eps must be positive"));
    }
    if mesh.is_nan() || mesh <= 0.0 {
        return Err(Error::invalid("mesh must be positive"));
    }
    if s.dim == 1 {
        let (gap, start) = largest_gap_1d(s)?;
        let radius = gap.checked_mul(&Rat::new(1, 2)?)?;
        let dense = radius <= *eps;
        let witness = if dense {
            None
        } else {
            let mid = start.checked_add(&radius)?.frac();
            Some(TorusPoint::new(alloc::vec![mid])?)
        };
        return Ok(DensityCertificate {
            verdict: if dense {
                Verdict::Dense
            } else {
                Verdict::NotDense
            },
            witness,
            witness_distance: Some(radius.to_f64()),
            covering_radius: Some(radius),
            mesh: 0.0,
        });
    }
    grid_certify(s, eps, mesh)
}

fn grid_certify(s: &PointSet, eps: &Rat, mesh: f64) -> Result<DensityCertificate> {
    let d = s.dim;
    let n = libm::ceil(1.0 / mesh).max(1.0) as u64;
    let probes = (n as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if probes > MAX_PROBES as u128 {
        return Err(Error::BudgetExceeded {
            what: "grid density certification",
            needed: probes,
            limit: MAX_PROBES,
        });
    }
    let h = 1.0 / n as f64;
    let slack = h * libm::sqrt(d as f64) / 2.0;
    let eps_f = eps.to_f64();
    let pts: Vec<Vec<f64>> = s.points.iter().map(TorusPoint::to_f64).collect();

    let mut idx = alloc::vec![0u64; d];
    let mut center = alloc::vec![0f64; d];
    let mut far_idx = idx.clone();
    let mut far = -1.0f64;
    for _ in 0..probes as u64 {
        for (c, &i) in center.iter_mut().zip(&idx) {
            *c = (2 * i + 1) as f64 / (2 * n) as f64;
        }
        let dist = nearest_sq(&center, &pts);
        if dist > far {
            far = dist;
            far_idx.clone_from(&idx);
        }
        for slot in idx.iter_mut().rev() {
            *slot += 1;
            if *slot < n {
                break;
            }
            *slot = 0;
        }
    }
    let far = libm::sqrt(far);

    let probe = |ix: &[u64]| -> Result<TorusPoint> {
        let coords = ix
            .iter()
            .map(|&i| Rat::new((2 * i + 1) as i128, (2 * n) as i128))
            .collect::<Result<Vec<_>>>()?;
        TorusPoint::new(coords)
    };
    let witness = probe(&far_idx)?;
    // confirm in exact arithmetic: min over the set of |witness - x|^2 > eps^2
    let eps_sq = eps.checked_mul(eps)?;
    let exact_far = s
        .points
        .iter()
        .map(|x| torus_distance_sq_exact(&witness, x))
        .try_fold(None::<Rat>, |acc, r| {
            r.map(|r| Some(acc.map_or(r, |a: Rat| a.min(r))))
        });
    let not_dense = match exact_far {
        Ok(Some(min_sq)) => min_sq > eps_sq,
        _ => far > eps_f * (1.0 + 1e-12),
    };
    let verdict = if not_dense {
        Verdict::NotDense
    } else if far <= eps_f - slack - 1e-12 {
        Verdict::Dense
    } else {
        Verdict::Unknown
    };
    Ok(DensityCertificate {
        verdict,
        witness: (verdict == Verdict::NotDense).then_some(witness),
        witness_distance: Some(far),
        covering_radius: None,
        mesh: h,
    })
}

fn nearest_sq(center: &[f64], pts: &[Vec<f64>]) -> f64 {
    let mut best = f64::INFINITY;
    for p in pts {
        let mut acc = 0.0;
        for (c, x) in center.iter().zip(p) {
            let mut w = libm::fabs(c - x);
            if w > 0.5 {
                w = 1.0 - w;
            }
            acc += w * w;
            if acc >= best {
                break;
            }
        }
        if acc < best {
            best = acc;
        }
    }
    best
}

/// Halves the mesh until the verdict is decided, at most `max_rounds` times.
pub fn certify_density(
    s: &PointSet,
    eps: &Rat,
    mesh: f64,
    max_rounds: u32,
) -> Result<DensityCertificate> {
    let mut mesh = mesh;
    let mut cert = is_eps_dense(s, eps, mesh)?;
    for _ in 0..max_rounds {
        if cert.verdict != Verdict::Unknown {
            break;
        }
        mesh /= 2.0;
        cert = match is_eps_dense(s, eps, mesh) {
            Ok(c) => c,
            // a finer grid than the probe budget allows leaves the verdict open
            Err(e) if e.is_budget() => break,
            Err(e) => return Err(e),
        };
    }
    Ok(cert)
}

/// Integer `d × d` matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<i128>,
}

impl IntMatrix {
    pub fn new(dim: usize, entries: Vec<i128>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::invalid(alloc::format!(
                "a {dim}x{dim} matrix needs {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(IntMatrix { dim, entries })
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = alloc::vec![0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1;
        }
        IntMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> i128 {
        self.entries[r * self.dim + c]
    }

    pub fn entries(&self) -> &[i128] {
        &self.entries
    }

    pub fn checked_mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        same_dim(self.dim, other.dim)?;
        let d = self.dim;
        let mut entries = alloc::vec![0i128; d * d];
        for r in 0..d {
            for c in 0..d {
                let mut acc: i128 = 0;
                for k in 0..d {
                    acc = self
                        .get(r, k)
                        .checked_mul(other.get(k, c))
                        .and_then(|v| acc.checked_add(v))
                        .ok_or(Error::Overflow("matrix product"))?;
                }
                entries[r * d + c] = acc;
            }
        }
        Ok(IntMatrix { dim: d, entries })
    }
}

/// `m · x mod 1`.
pub fn apply(m: &IntMatrix, x: &TorusPoint) -> Result<TorusPoint> {
    same_dim(m.dim, x.dim())?;
    let coords = (0..m.dim)
        .map(|r| {
            x.coords
                .iter()
                .enumerate()
                .try_fold(Rat::ZERO, |acc, (c, xc)| {
                    Ok(acc.checked_add(&xc.mul_int_frac(m.get(r, c)))?.frac())
                })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TorusPoint { coords })
}

/// Images `m · x mod 1` in point order, repeats kept.
pub fn dilate_points(s: &PointSet, m: &IntMatrix) -> Result<Vec<TorusPoint>> {
    s.points.iter().map(|x| apply(m, x)).collect()
}

/// `m X mod 1` with repeated images collapsed; the result may be smaller.
pub fn dilate(s: &PointSet, m: &IntMatrix) -> Result<PointSet> {
    PointSet::collapsed(s.dim, dilate_points(s, m)?)
}

/// `X + t mod 1`.
pub fn translate(s: &PointSet, t: &[Rat]) -> Result<PointSet> {
    same_dim(s.dim, t.len())?;
    let pts = s
        .points
        .iter()
        .map(|p| {
            let coords = p
                .coords
                .iter()
                .zip(t)
                .map(|(a, b)| a.checked_add(b).map(|v| v.frac()))
                .collect::<Result<Vec<_>>>()?;
            Ok(TorusPoint { coords })
        })
        .collect::<Result<Vec<_>>>()?;
    // translation is a bijection, so no collapsing happens
    PointSet::new(s.dim, pts)
}
