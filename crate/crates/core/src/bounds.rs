//! Counting calculus for the upper bound on the number of closed curves of
//! length at most `T` after a large bulge. Every count is an exact big
//! integer; floating point appears only in the final logarithm.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Closed loops per crossing times oriented crossing segments per unit of
/// `g - 1`: 18 · 12(2g-2) = 432(g-1).
pub const LOOPS_TIMES_SEGMENTS: u64 = 432;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub g: u32,
    /// Shortest crossing segment.
    pub cr: f64,
    /// Shortest pants curve.
    pub l: f64,
    /// Extra length per crossing from the cylinder term. The intersection
    /// number with the bulged curve is replaced by the crossing count,
    /// which only makes the bound weaker.
    pub s_extra: f64,
}

impl BoundParams {
    pub fn new(g: u32, cr: f64, l: f64, s_extra: f64) -> Result<Self> {
        if g < 2 {
            return Err(Error::InvalidArgument(format!("genus must be at least 2, got {g}")));
        }
        if !(cr.is_finite() && cr > 0.0) || !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidArgument(format!("need Cr > 0 and L > 0, got {cr} and {l}")));
        }
        if !(s_extra.is_finite() && s_extra >= 0.0) {
            return Err(Error::InvalidArgument(format!("s_extra must be non-negative, got {s_extra}")));
        }
        Ok(BoundParams { g, cr, l, s_extra })
    }

    /// Length charged to one crossing.
    pub fn crossing_cost(&self) -> f64 {
        self.cr + self.s_extra
    }

    /// The base `432g - 432`.
    pub fn base(&self) -> BigUint {
        BigUint::from(LOOPS_TIMES_SEGMENTS) * BigUint::from(self.g - 1)
    }
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite by construction")
}

// floor(num / den) of exact binary rationals, None when negative
fn floor_div(num: &BigRational, den: &BigRational) -> Option<usize> {
    let q = (num / den).floor().to_integer();
    if q < BigInt::zero() {
        None
    } else {
        Some(q.to_usize().expect("floor fits in usize"))
    }
}

/// Largest crossing count that fits in length `t`: `⌊T / (Cr + s_extra)⌋`.
pub fn max_crossings(t: f64, p: &BoundParams) -> usize {
    floor_div(&exact(t), &(exact(p.cr) + exact(p.s_extra))).unwrap_or(0)
}

// ⌊(T - m(Cr + s_extra)) / L⌋, or None if m crossings do not fit
fn max_loops(m: usize, t: f64, p: &BoundParams) -> Option<usize> {
    let rest = exact(t) - (exact(p.cr) + exact(p.s_extra)) * BigRational::from_integer(BigInt::from(m));
    floor_div(&rest, &exact(p.l))
}

// product of lo..hi (exclusive) by binary splitting, so the large
// multiplications run on balanced operands
fn range_product(lo: u64, hi: u64) -> BigUint {
    match hi.saturating_sub(lo) {
        0 => BigUint::one(),
        1 => BigUint::from(lo),
        2 => BigUint::from(lo) * BigUint::from(lo + 1),
        n => {
            let mid = lo + n / 2;
            range_product(lo, mid) * range_product(mid, hi)
        }
    }
}

/// Exact `C(n, k)`.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    range_product(n - k + 1, n + 1) / range_product(1, k + 1)
}

/// Ordered ways to write `k` as a sum of `m` non-negative integers.
pub fn ordered_partitions(m: usize, k: usize) -> BigUint {
    assert!(m >= 1, "at least one part");
    binomial(m + k - 1, k)
}

/// `Σ_{k=0}^{K} C(m+k-1, k)` with `K = ⌊(T - m·Cr)/L⌋`, evaluated through
/// the hockey-stick identity as `C(m+K, K)`.
pub fn f_bound(m: usize, t: f64, p: &BoundParams) -> Result<BigUint> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    let k = max_loops(m, t, p).ok_or(Error::InfeasibleM)?;
    Ok(binomial(m + k, k))
}

/// `(432g-432)^{⌊T/Cr⌋} · Σ_{m=1}^{⌊T/Cr⌋} f(m, T)`.
pub fn count_bound(t: f64, p: &BoundParams) -> Result<BigUint> {
    let (power, sum) = count_bound_parts(t, p)?;
    Ok(power * sum)
}

fn count_bound_parts(t: f64, p: &BoundParams) -> Result<(BigUint, BigUint)> {
    let terms = f_terms(t, p)?;
    let sum = terms.iter().fold(BigUint::zero(), |a, b| a + b);
    Ok((num_traits::pow(p.base(), terms.len()), sum))
}

// f(m, T) for m = 1..=⌊T/Cr⌋
fn f_terms(t: f64, p: &BoundParams) -> Result<Vec<BigUint>> {
    let mm = max_crossings(t, p);
    if mm == 0 {
        return Err(Error::InvalidArgument(format!("T = {t} admits no crossing")));
    }
    (1..=mm).into_par_iter().map(|m| f_bound(m, t, p)).collect()
}

/// Natural log of a big integer: exact bit length plus the log of the
/// leading 64 bits.
pub fn ln_big(n: &BigUint) -> f64 {
    assert!(!n.is_zero(), "log of zero");
    let bits = n.bits();
    if bits <= 64 {
        return (n.to_u64().expect("fits") as f64).ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_u64().expect("64 bits");
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// `(1/T) log count_bound(T)`.
pub fn log_bound_over_t(t: f64, p: &BoundParams) -> Result<f64> {
    log_bound_with_peak(t, p).map(|r| r.0)
}

// (1/T) log count_bound(T) and the crossing count of the largest term
fn log_bound_with_peak(t: f64, p: &BoundParams) -> Result<(f64, usize)> {
    let terms = f_terms(t, p)?;
    let sum = terms.iter().fold(BigUint::zero(), |a, b| a + b);
    let peak = terms.iter().enumerate().max_by(|a, b| a.1.cmp(b.1)).map(|(i, _)| i + 1).expect("nonempty");
    Ok(((terms.len() as f64 * ln_big(&p.base()) + ln_big(&sum)) / t, peak))
}

/// Where the sum over crossing counts peaks at the last grid point: the
/// dominant crossing count `m_s` and its loop count `q_s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub limit: f64,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub m_s: usize,
    pub q_s: usize,
}

/// Default settling tolerance on successive grid values.
pub const SETTLE_TOL: f64 = 1e-4;

/// The limit of `(1/T) log count_bound(T)`: quadratic extrapolation in
/// `1/T` to zero through the last three grid points.
pub fn entropy_bound(p: &BoundParams, t_grid: &[f64]) -> Result<f64> {
    entropy_bound_report(p, t_grid, SETTLE_TOL).map(|r| r.limit)
}

pub fn entropy_bound_report(p: &BoundParams, t_grid: &[f64], tol: f64) -> Result<BoundReport> {
    if t_grid.len() < 3 || t_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("need at least three increasing grid points".into()));
    }
    let runs = t_grid.iter().map(|&t| log_bound_with_peak(t, p)).collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let n = values.len();
    let last_step = (values[n - 1] - values[n - 2]).abs();
    if !(last_step < tol) {
        return Err(Error::NotConverged(last_step));
    }
    let h: Vec<f64> = t_grid[n - 3..].iter().map(|t| 1.0 / t).collect();
    let v = &values[n - 3..];
    let mut limit = 0.0;
    for i in 0..3 {
        let mut w = 1.0;
        for j in 0..3 {
            if j != i {
                w *= h[j] / (h[j] - h[i]);
            }
        }
        limit += w * v[i];
    }
    let m_s = runs[n - 1].1;
    let q_s = max_loops(m_s, t_grid[n - 1], p).expect("peak term is feasible");
    Ok(BoundReport { limit, grid: t_grid.to_vec(), values, m_s, q_s })
}

/// `log C(M+q, q)` exactly and by Stirling's leading terms.
pub fn stirling_check(m: usize, q: usize) -> (f64, f64) {
    let exact = ln_big(&binomial(m + q, q));
    let xlx = |x: f64| x * x.ln();
    let (mf, qf) = (m as f64, q as f64);
    (exact, xlx(mf + qf) - xlx(mf) - xlx(qf))
}

/// `n` grid points from `t_max / 2^{n-1}` up to `t_max`, doubling.
pub fn doubling_grid(t_max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| t_max / f64::powi(2.0, (n - 1 - i) as i32)).collect()
}
