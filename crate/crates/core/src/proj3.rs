//! Real 3x3 projective linear algebra.
//!
//! Everything here works on plain `[[f64; 3]; 3]` arrays. [`ProjectiveMap`]
//! is a determinant-one matrix, [`ProjPoint`] a point of the projective plane
//! with a deterministic representative, and [`HyperbolicSpectrum`] the
//! eigen-data of a hyperbolic element (three distinct positive eigenvalues).

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::Mul;

use crate::{Error, Result};

pub type Mat3 = [[f64; 3]; 3];
pub type Vec3 = [f64; 3];

/// Minimum relative gap between consecutive eigenvalues of a hyperbolic map.
pub const EIGEN_GAP: f64 = 1e-8;
/// Below this `|det|` a matrix is not projectivized.
pub const DET_FLOOR: f64 = 1e-14;
/// Triple-product threshold for collinearity of unit vectors.
pub const COLLINEAR_TOL: f64 = 1e-10;

pub fn identity() -> Mat3 {
    diag(1.0, 1.0, 1.0)
}

pub fn diag(a: f64, b: f64, c: f64) -> Mat3 {
    [[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]]
}

pub fn mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

pub fn apply(m: &Mat3, v: &Vec3) -> Vec3 {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

pub fn transpose(m: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = m[j][i];
        }
    }
    out
}

pub fn trace(m: &Mat3) -> f64 {
    m[0][0] + m[1][1] + m[2][2]
}

pub fn det(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Classical adjugate: `m * adjugate(m) = det(m) * I`.
pub fn adjugate(m: &Mat3) -> Mat3 {
    let c = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    [
        [c(1, 2, 1, 2), -c(0, 2, 1, 2), c(0, 1, 1, 2)],
        [-c(1, 2, 0, 2), c(0, 2, 0, 2), -c(0, 1, 0, 2)],
        [c(1, 2, 0, 1), -c(0, 2, 0, 1), c(0, 1, 0, 1)],
    ]
}

pub fn inverse(m: &Mat3) -> Option<Mat3> {
    let d = det(m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut a = adjugate(m);
    for row in a.iter_mut() {
        for x in row.iter_mut() {
            *x /= d;
        }
    }
    Some(a)
}

pub fn scale(m: &Mat3, k: f64) -> Mat3 {
    let mut out = *m;
    for row in out.iter_mut() {
        for x in row.iter_mut() {
            *x *= k;
        }
    }
    out
}

pub fn sub(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = *a;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] -= b[i][j];
        }
    }
    out
}

/// Largest absolute entry.
pub fn max_abs(m: &Mat3) -> f64 {
    m.iter().flatten().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn max_abs_diff(a: &Mat3, b: &Mat3) -> f64 {
    max_abs(&sub(a, b))
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn unit(a: &Vec3) -> Vec3 {
    let n = norm(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Matrix with the given vectors as columns.
pub fn from_columns(c0: &Vec3, c1: &Vec3, c2: &Vec3) -> Mat3 {
    [[c0[0], c1[0], c2[0]], [c0[1], c1[1], c2[1]], [c0[2], c1[2], c2[2]]]
}

pub fn column(m: &Mat3, j: usize) -> Vec3 {
    [m[0][j], m[1][j], m[2][j]]
}

fn all_finite(m: &Mat3) -> bool {
    m.iter().flatten().all(|x| x.is_finite())
}

/// Scales `m` to determinant one.
///
/// A matrix whose determinant is already within `1e-13` of one, or within
/// the rounding error of the determinant itself (a few ulps of the product
/// of the row norms), is returned bit-for-bit unchanged: the operation is
/// exactly idempotent, and rescaling by a determinant that is only known to
/// that accuracy would add error rather than remove it.
pub fn normalize_det1(m: &Mat3) -> Result<ProjectiveMap> {
    if !all_finite(m) {
        return Err(Error::NonFinite);
    }
    let d = det(m);
    if d.abs() < DET_FLOOR {
        return Err(Error::DegenerateMatrix(d));
    }
    if d < 0.0 {
        return Err(Error::NegativeDeterminant);
    }
    let hadamard: f64 = m.iter().map(norm).product();
    if (d - 1.0).abs() <= 1e-13_f64.max(16.0 * f64::EPSILON * hadamard) {
        return Ok(ProjectiveMap(*m));
    }
    Ok(ProjectiveMap(scale(m, 1.0 / d.cbrt())))
}

/// An element of `SL(3,R)`, acting on the projective plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectiveMap(Mat3);

impl ProjectiveMap {
    pub const IDENTITY: ProjectiveMap = ProjectiveMap([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    /// Same as [`normalize_det1`].
    pub fn new(m: Mat3) -> Result<Self> {
        normalize_det1(&m)
    }

    /// Projectivizes a matrix of either determinant sign. A negative
    /// determinant is handled by negating the matrix, which does not change
    /// its projective action.
    pub fn from_any_sign(m: Mat3) -> Result<Self> {
        if all_finite(&m) && det(&m) < 0.0 {
            normalize_det1(&scale(&m, -1.0))
        } else {
            normalize_det1(&m)
        }
    }

    /// Wraps a matrix known to have determinant one (for example a product of
    /// determinant-one matrices). The determinant is deliberately not
    /// recomputed: for long words it cancels catastrophically.
    pub(crate) fn from_det1(m: Mat3) -> Self {
        ProjectiveMap(m)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn det(&self) -> f64 {
        det(&self.0)
    }

    pub fn trace(&self) -> f64 {
        trace(&self.0)
    }

    /// Inverse through the adjugate (exact formula for determinant one).
    pub fn inverse(&self) -> Self {
        ProjectiveMap(adjugate(&self.0))
    }

    pub fn compose(&self, other: &ProjectiveMap) -> Self {
        ProjectiveMap(mul(&self.0, &other.0))
    }

    /// `self * m * self^-1`, with `inv` the inverse of `self`.
    pub fn conjugate(&self, inv: &ProjectiveMap, m: &ProjectiveMap) -> Self {
        ProjectiveMap(mul(&mul(&self.0, &m.0), &inv.0))
    }

    pub fn apply(&self, p: &ProjPoint) -> ProjPoint {
        ProjPoint::normalized(apply(&self.0, &p.0))
    }

    pub fn apply_vec(&self, v: &Vec3) -> Vec3 {
        apply(&self.0, v)
    }

    pub fn row_major(&self) -> [f64; 9] {
        let m = &self.0;
        [m[0][0], m[0][1], m[0][2], m[1][0], m[1][1], m[1][2], m[2][0], m[2][1], m[2][2]]
    }

    pub fn from_row_major(e: &[f64; 9]) -> Result<Self> {
        normalize_det1(&[[e[0], e[1], e[2]], [e[3], e[4], e[5]], [e[6], e[7], e[8]]])
    }
}

impl Mul for ProjectiveMap {
    type Output = ProjectiveMap;

    fn mul(self, rhs: ProjectiveMap) -> ProjectiveMap {
        self.compose(&rhs)
    }
}

impl Mul for &ProjectiveMap {
    type Output = ProjectiveMap;

    fn mul(self, rhs: &ProjectiveMap) -> ProjectiveMap {
        self.compose(rhs)
    }
}

impl Serialize for ProjectiveMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.row_major().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjectiveMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let e = <[f64; 9]>::deserialize(d)?;
        ProjectiveMap::from_row_major(&e).map_err(serde::de::Error::custom)
    }
}

/// A point of the projective plane. The stored representative has its
/// largest-magnitude coordinate (first one on ties) equal to `+1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjPoint([f64; 3]);

impl ProjPoint {
    pub fn new(v: Vec3) -> Result<Self> {
        if !v.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if v.iter().all(|x| *x == 0.0) {
            return Err(Error::InvalidArgument("zero vector is not a projective point".into()));
        }
        Ok(Self::normalized(v))
    }

    fn normalized(v: Vec3) -> Self {
        let mut k = 0;
        for i in 1..3 {
            if v[i].abs() > v[k].abs() {
                k = i;
            }
        }
        let m = v[k];
        ProjPoint([v[0] / m, v[1] / m, v[2] / m])
    }

    /// The point `(x, y, 1)`.
    pub fn affine(x: f64, y: f64) -> Self {
        Self::normalized([x, y, 1.0])
    }

    pub fn coords(&self) -> &Vec3 {
        &self.0
    }

    /// Sine of the angle between the two lines through the origin; zero iff
    /// the points coincide.
    pub fn separation(&self, other: &ProjPoint) -> f64 {
        norm(&cross(&unit(&self.0), &unit(&other.0)))
    }
}

/// Eigen-data of a hyperbolic element. Index 0 is attracting (largest
/// eigenvalue), 1 neutral, 2 repelling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperbolicSpectrum {
    pub lambda: [f64; 3],
    pub fixed: [ProjPoint; 3],
}

impl HyperbolicSpectrum {
    pub fn attracting(&self) -> &ProjPoint {
        &self.fixed[0]
    }

    pub fn neutral(&self) -> &ProjPoint {
        &self.fixed[1]
    }

    pub fn repelling(&self) -> &ProjPoint {
        &self.fixed[2]
    }

    /// `log` of the eigenvalues, i.e. the `t_i` with `lambda_i = e^{t_i}`.
    pub fn log_eigenvalues(&self) -> [f64; 3] {
        [self.lambda[0].ln(), self.lambda[1].ln(), self.lambda[2].ln()]
    }

    pub fn hilbert_length(&self) -> f64 {
        0.5 * (self.lambda[0] / self.lambda[2]).ln()
    }
}

/// Largest real root of `x^3 - a x^2 + b x - 1`, by Newton's method started
/// above every root and to the right of the inflection point, where the
/// iteration decreases monotonically.
fn largest_root(a: f64, b: f64) -> f64 {
    let p = |x: f64| ((x - a) * x + b) * x - 1.0;
    let dp = |x: f64| (3.0 * x - 2.0 * a) * x + b;
    let mut x = 1.0 + a.abs().max(b.abs()).max(1.0);
    for _ in 0..400 {
        let d = dp(x);
        if d <= 0.0 {
            break;
        }
        let step = p(x) / d;
        let next = x - step;
        if !(next < x) {
            break;
        }
        x = next;
        if step.abs() <= 4.0 * f64::EPSILON * x.abs() {
            // one more step to settle the last bit
            let d = dp(x);
            if d > 0.0 {
                let refined = x - p(x) / d;
                if refined.is_finite() {
                    x = refined;
                }
            }
            break;
        }
    }
    x
}

/// Eigenvalues `lambda_1 > lambda_2 > lambda_3 > 0` of a hyperbolic map,
/// given the map and an independently computed inverse.
///
/// `lambda_1` is the top root of the characteristic polynomial and
/// `lambda_3` the reciprocal of the top root of the inverse's polynomial, so
/// both extremes keep full relative precision even when their ratio is
/// huge. `lambda_2` follows from `det = 1`.
pub fn hyperbolic_eigenvalues(m: &ProjectiveMap, inv: &ProjectiveMap) -> Result<[f64; 3]> {
    let t = m.trace();
    let c = inv.trace();
    if !t.is_finite() || !c.is_finite() {
        return Err(Error::NonFinite);
    }
    let l1 = largest_root(t, c);
    let mu = largest_root(c, t);
    if !(l1 > 0.0 && mu > 0.0 && l1.is_finite() && mu.is_finite()) {
        return Err(Error::NotHyperbolic("no positive real spectrum".into()));
    }
    let l3 = 1.0 / mu;
    let l2 = 1.0 / (l1 * l3);
    if !(l1 - l2 >= EIGEN_GAP * l1 && l2 - l3 >= EIGEN_GAP * l2) {
        return Err(Error::NotHyperbolic(format!(
            "eigenvalues ({l1:e}, {l2:e}, {l3:e}) are not separated (complex or repeated spectrum)"
        )));
    }
    let sum = l1 + l2 + l3;
    if (sum - t).abs() > 1e-6 * l1.max(1.0) {
        return Err(Error::NotHyperbolic(format!("trace {t:e} inconsistent with real spectrum sum {sum:e}")));
    }
    Ok([l1, l2, l3])
}

/// A null vector of `m - lambda I`, refined by one step of inverse iteration
/// when that lowers the residual.
fn eigenvector(m: &Mat3, lambda: f64) -> Option<Vec3> {
    let shifted = |mu: f64| sub(m, &diag(mu, mu, mu));
    let residual = |v: &Vec3| {
        let mv = apply(m, v);
        let r = [mv[0] - lambda * v[0], mv[1] - lambda * v[1], mv[2] - lambda * v[2]];
        norm(&r) / norm(v)
    };
    let adj = adjugate(&shifted(lambda));
    let mut best = (0..3).map(|j| column(&adj, j)).fold([0.0; 3], |acc, c| if norm(&c) > norm(&acc) { c } else { acc });
    if !(norm(&best) > 0.0) || !best.iter().all(|x| x.is_finite()) {
        return None;
    }
    let mu = lambda * (1.0 + 1e-10) + 1e-300;
    let refined = apply(&adjugate(&shifted(mu)), &best);
    if norm(&refined) > 0.0 && refined.iter().all(|x| x.is_finite()) && residual(&refined) < residual(&best) {
        best = refined;
    }
    Some(best)
}

/// Eigen-decomposition of a hyperbolic map; see [`eigen_hyperbolic_with_inverse`].
pub fn eigen_hyperbolic(m: &ProjectiveMap) -> Result<HyperbolicSpectrum> {
    eigen_hyperbolic_with_inverse(m, &m.inverse())
}

/// Eigen-decomposition using a separately computed inverse. The repelling
/// fixed point is taken as the attracting eigenvector of the inverse, which
/// is far better conditioned for long words.
pub fn eigen_hyperbolic_with_inverse(m: &ProjectiveMap, inv: &ProjectiveMap) -> Result<HyperbolicSpectrum> {
    let lambda = hyperbolic_eigenvalues(m, inv)?;
    let fail = || Error::NotHyperbolic("eigenvector extraction failed".into());
    let v1 = eigenvector(m.matrix(), lambda[0]).ok_or_else(fail)?;
    let v3 = eigenvector(inv.matrix(), 1.0 / lambda[2]).ok_or_else(fail)?;
    // The neutral vector is annihilated by the left eigenvectors of the
    // extreme eigenvalues; that route survives when lambda_2 is tiny
    // compared with the entries.
    let neutral = || {
        let w1 = eigenvector(&transpose(m.matrix()), lambda[0])?;
        let w3 = eigenvector(&transpose(inv.matrix()), 1.0 / lambda[2])?;
        Some(cross(&unit(&w1), &unit(&w3)))
    };
    let v2 = eigenvector(m.matrix(), lambda[1])
        .filter(|v| ProjPoint::new(*v).is_ok())
        .or_else(neutral)
        .ok_or_else(fail)?;
    let fixed = [ProjPoint::new(v1)?, ProjPoint::new(v2)?, ProjPoint::new(v3)?];
    Ok(HyperbolicSpectrum { lambda, fixed })
}

/// Hilbert translation length `1/2 log(lambda_1 / lambda_3)`.
pub fn hilbert_length(m: &ProjectiveMap) -> Result<f64> {
    hilbert_length_with_inverse(m, &m.inverse())
}

pub fn hilbert_length_with_inverse(m: &ProjectiveMap, inv: &ProjectiveMap) -> Result<f64> {
    let l = hyperbolic_eigenvalues(m, inv)?;
    Ok(0.5 * (l[0].ln() - l[2].ln()))
}

/// Cross-ratio `|p-y||q-x| / (|p-x||q-y|)` of four collinear points.
///
/// Evaluated with the brackets `[u, v] = (u x v) . (p x q)`, which equal
/// the 2x2 determinants of the points' coordinates on the line up to one
/// common factor; each point appears once in the numerator and once in the
/// denominator, so the choice of representatives cancels.
pub fn cross_ratio(p: &ProjPoint, x: &ProjPoint, y: &ProjPoint, q: &ProjPoint) -> Result<f64> {
    cross_ratio_impl(p, x, y, q, false)
}

/// As [`cross_ratio`], but `x == y` yields `1.0` instead of an error.
pub fn cross_ratio_allow_equal(p: &ProjPoint, x: &ProjPoint, y: &ProjPoint, q: &ProjPoint) -> Result<f64> {
    cross_ratio_impl(p, x, y, q, true)
}

fn cross_ratio_impl(p: &ProjPoint, x: &ProjPoint, y: &ProjPoint, q: &ProjPoint, allow_equal: bool) -> Result<f64> {
    const SAME: f64 = 1e-14;
    let pts = [p, x, y, q];
    for i in 0..4 {
        for j in (i + 1)..4 {
            if pts[i].separation(pts[j]) < SAME {
                if allow_equal && i == 1 && j == 2 {
                    continue;
                }
                return Err(Error::CoincidentPoints);
            }
        }
    }
    let (pu, xu, yu, qu) = (unit(p.coords()), unit(x.coords()), unit(y.coords()), unit(q.coords()));
    for v in [&xu, &yu] {
        let t = dot(&cross(&pu, v), &qu);
        if t.abs() > COLLINEAR_TOL {
            return Err(Error::NotCollinear(t));
        }
    }
    if x.separation(y) < SAME {
        return Ok(1.0);
    }
    let n = cross(&pu, &qu);
    let br = |a: &Vec3, b: &Vec3| dot(&cross(a, b), &n);
    Ok(((br(&pu, &yu) * br(&qu, &xu)) / (br(&pu, &xu) * br(&qu, &yu))).abs())
}

impl fmt::Display for ProjectiveMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.0 {
            writeln!(f, "[{:>14.6e} {:>14.6e} {:>14.6e}]", row[0], row[1], row[2])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_invertible(rng: &mut ChaCha8Rng) -> Mat3 {
        loop {
            let mut m = [[0.0; 3]; 3];
            for row in m.iter_mut() {
                for x in row.iter_mut() {
                    *x = rng.gen_range(-2.0..2.0);
                }
            }
            if det(&m).abs() > 0.2 {
                return m;
            }
        }
    }

    fn conj(p: &Mat3, m: &Mat3) -> ProjectiveMap {
        ProjectiveMap::from_any_sign(mul(&mul(p, m), &inverse(p).unwrap())).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_det1(&identity()).unwrap(), ProjectiveMap::IDENTITY);
        assert_eq!(normalize_det1(&diag(2.0, 2.0, 2.0)).unwrap(), ProjectiveMap::IDENTITY);
        let m = normalize_det1(&diag(8.0, 1.0, 1.0)).unwrap();
        assert_eq!(m.matrix(), &diag(4.0, 0.5, 0.5));
        assert!((m.det() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalize_errors() {
        assert!(matches!(normalize_det1(&diag(1.0, 1.0, 0.0)), Err(Error::DegenerateMatrix(_))));
        assert!(matches!(normalize_det1(&diag(-1.0, 1.0, 1.0)), Err(Error::NegativeDeterminant)));
        assert!(matches!(normalize_det1(&diag(f64::NAN, 1.0, 1.0)), Err(Error::NonFinite)));
        let m = ProjectiveMap::from_any_sign(diag(-1.0, 2.0, 4.0)).unwrap();
        assert!((m.det() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalize_is_idempotent_and_det_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let m = ProjectiveMap::from_any_sign(random_invertible(&mut rng)).unwrap();
            assert!((m.det() - 1.0).abs() < 1e-12);
            assert_eq!(normalize_det1(m.matrix()).unwrap(), m);
        }
    }

    #[test]
    fn diagonal_spectrum() {
        let e = std::f64::consts::E;
        let m = ProjectiveMap::new(diag(e * e, 1.0, 1.0 / (e * e))).unwrap();
        let s = eigen_hyperbolic(&m).unwrap();
        assert!((s.lambda[0] - e * e).abs() < 1e-12);
        assert!((s.lambda[1] - 1.0).abs() < 1e-12);
        assert!((s.lambda[2] - 1.0 / (e * e)).abs() < 1e-14);
        assert_eq!(s.attracting().coords(), &[1.0, 0.0, 0.0]);
        assert_eq!(s.neutral().coords(), &[0.0, 1.0, 0.0]);
        assert_eq!(s.repelling().coords(), &[0.0, 0.0, 1.0]);
        assert!((hilbert_length(&m).unwrap() - 2.0).abs() < 1e-12);
        let m1 = ProjectiveMap::new(diag(e, 1.0, 1.0 / e)).unwrap();
        assert!((hilbert_length(&m1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conjugated_spectrum_recovers_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let p = random_invertible(&mut rng);
            let m = conj(&p, &diag(4.0, 1.0, 0.25));
            let s = eigen_hyperbolic(&m).unwrap();
            for (k, want) in [4.0, 1.0, 0.25].iter().enumerate() {
                assert!((s.lambda[k] - want).abs() < 1e-9 * want.max(1.0));
                let col = ProjPoint::new(column(&p, k)).unwrap();
                assert!(s.fixed[k].separation(&col) < 1e-8, "column {k}");
            }
        }
    }

    #[test]
    fn complex_spectrum_is_rejected() {
        let (c, s) = (0.6_f64, 0.8_f64);
        let rot = [[2.0 * c, -2.0 * s, 0.0], [2.0 * s, 2.0 * c, 0.0], [0.0, 0.0, 0.25]];
        let m = ProjectiveMap::new(rot).unwrap();
        assert!(matches!(eigen_hyperbolic(&m), Err(Error::NotHyperbolic(_))));
        assert!(hilbert_length(&m).is_err());
        // repeated eigenvalue
        let m = ProjectiveMap::new(diag(2.0, 2.0, 0.25)).unwrap();
        assert!(eigen_hyperbolic(&m).is_err());
        // two negative eigenvalues
        let m = ProjectiveMap::new(diag(-2.0, -0.25, 2.0)).unwrap();
        assert!(eigen_hyperbolic(&m).is_err());
    }

    #[test]
    fn spectrum_invariants_on_random_hyperbolics() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let a: f64 = rng.gen_range(0.2..3.0);
            let b: f64 = rng.gen_range(-0.9..0.9) * a;
            let p = random_invertible(&mut rng);
            let m = conj(&p, &diag(a.exp(), b.exp(), (-a - b).exp()));
            let s = eigen_hyperbolic(&m).unwrap();
            let prod = s.lambda[0] * s.lambda[1] * s.lambda[2];
            assert!((prod - 1.0).abs() < 1e-9);
            for k in 0..3 {
                let v = s.fixed[k].coords();
                let mv = apply(m.matrix(), v);
                let r = [mv[0] - s.lambda[k] * v[0], mv[1] - s.lambda[k] * v[1], mv[2] - s.lambda[k] * v[2]];
                assert!(norm(&r) <= 1e-9 * norm(v) * max_abs(m.matrix()).max(1.0), "residual {k}: {}", norm(&r));
            }
            for i in 0..3 {
                for j in (i + 1)..3 {
                    assert!(s.fixed[i].separation(&s.fixed[j]) > 1e-6);
                }
            }
        }
    }

    #[test]
    fn length_is_conjugation_and_inverse_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let base = ProjectiveMap::new(diag(5.0, 0.7, 1.0 / 3.5)).unwrap();
        let l0 = hilbert_length(&base).unwrap();
        for _ in 0..1000 {
            let p = random_invertible(&mut rng);
            let m = conj(&p, base.matrix());
            assert!((hilbert_length(&m).unwrap() - l0).abs() < 1e-9);
            assert!((hilbert_length(&m.inverse()).unwrap() - l0).abs() < 1e-9);
        }
    }

    #[test]
    fn long_word_extremes_keep_precision() {
        // diag(e^20, e^-5, e^-15) conjugated: lambda_3 is 1e-15 of lambda_1
        let p = [[1.0, 0.3, -0.2], [0.1, 1.0, 0.4], [-0.3, 0.2, 1.0]];
        let pinv = inverse(&p).unwrap();
        let d = diag(20f64.exp(), (-5f64).exp(), (-15f64).exp());
        let dinv = diag((-20f64).exp(), 5f64.exp(), 15f64.exp());
        let m = ProjectiveMap::from_det1(mul(&mul(&p, &d), &pinv));
        let mi = ProjectiveMap::from_det1(mul(&mul(&p, &dinv), &pinv));
        let l = hilbert_length_with_inverse(&m, &mi).unwrap();
        assert!((l - 17.5).abs() < 1e-12, "{l}");
    }

    fn line_point(a: &Vec3, b: &Vec3, t: f64) -> ProjPoint {
        ProjPoint::new([a[0] + t * b[0], a[1] + t * b[1], a[2] + t * b[2]]).unwrap()
    }

    #[test]
    fn cross_ratio_examples() {
        let (o, d) = ([0.0, 0.0, 1.0], [1.0, 0.0, 0.0]);
        let (p, x, y, q) = (line_point(&o, &d, -1.0), line_point(&o, &d, 0.0), line_point(&o, &d, 0.5), line_point(&o, &d, 1.0));
        let cr = cross_ratio(&p, &x, &y, &q).unwrap();
        assert!((cr - 3.0).abs() < 1e-14);
        assert!((cr - (2.0 * 0.5f64.atanh()).exp()).abs() < 1e-12);
        assert!(matches!(cross_ratio(&p, &x, &x, &q), Err(Error::CoincidentPoints)));
        assert_eq!(cross_ratio_allow_equal(&p, &x, &x, &q).unwrap(), 1.0);
        let off = ProjPoint::affine(0.2, 0.3);
        assert!(matches!(cross_ratio(&p, &x, &off, &q), Err(Error::NotCollinear(_))));
    }

    #[test]
    fn cross_ratio_projective_invariance_and_cocycle() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..500 {
            let a = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 1.0];
            let b = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.0];
            let mut ts: Vec<f64> = (0..5).map(|_| rng.gen_range(-2.0..2.0)).collect();
            ts.sort_by(f64::total_cmp);
            if ts.windows(2).any(|w| w[1] - w[0] < 0.05) {
                continue;
            }
            let pts: Vec<ProjPoint> = ts.iter().map(|t| line_point(&a, &b, *t)).collect();
            let (p, x, y, z, q) = (&pts[0], &pts[1], &pts[2], &pts[3], &pts[4]);
            let cr_xy = cross_ratio(p, x, y, q).unwrap();
            let cr_yz = cross_ratio(p, y, z, q).unwrap();
            let cr_xz = cross_ratio(p, x, z, q).unwrap();
            assert!(cr_xy > 1.0);
            assert!((cr_xz - cr_xy * cr_yz).abs() < 1e-10 * cr_xz.max(1.0));
            let t = ProjectiveMap::from_any_sign(random_invertible(&mut rng)).unwrap();
            let img = cross_ratio(&t.apply(p), &t.apply(x), &t.apply(y), &t.apply(q)).unwrap();
            assert!((img - cr_xy).abs() < 1e-10 * cr_xy.max(1.0), "{img} vs {cr_xy}");
        }
    }

    #[test]
    fn matrix_json_roundtrip() {
        let m = ProjectiveMap::new([[2.0, 0.1, 0.0], [0.3, 1.0, 0.0], [0.0, 0.0, 0.5]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let back: ProjectiveMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn projpoint_normalization() {
        let p = ProjPoint::new([-2.0, 2.0, 0.5]).unwrap();
        assert_eq!(p.coords(), &[1.0, -1.0, -0.25]);
        assert_eq!(ProjPoint::new(*p.coords()).unwrap(), p);
        assert!(ProjPoint::new([0.0; 3]).is_err());
    }

    proptest::proptest! {
        #[test]
        fn projpoint_normalization_idempotent(x in -1e3f64..1e3, y in -1e3f64..1e3, z in -1e3f64..1e3) {
            proptest::prop_assume!(x != 0.0 || y != 0.0 || z != 0.0);
            let p = ProjPoint::new([x, y, z]).unwrap();
            proptest::prop_assert_eq!(ProjPoint::new(*p.coords()).unwrap(), p);
            proptest::prop_assert!(p.coords().iter().any(|c| *c == 1.0));
        }
    }
}
