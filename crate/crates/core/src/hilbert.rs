//! Convex polygonal domains in an affine chart, with the Hilbert distance,
//! its Finsler norm and the induced (Busemann-Hausdorff) measure.
//!
//! Every metric quantity reduces to where a line through an interior point
//! leaves the polygon, which [`ConvexDomain`] answers in `O(log n)` by an
//! angular binary search, so domains with 10^5 vertices are practical.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::proj3::{self, ProjectiveMap, Vec3};
use crate::{Error, Result};

pub type Vec2 = [f64; 2];

/// Minimum sine of the turning angle at each vertex.
pub const STRICT_CONVEXITY: f64 = 1e-12;
/// Points closer than this to the boundary count as outside.
pub const BOUNDARY_MARGIN: f64 = 1e-13;
/// Tolerances for the edge parameter of a chord-edge intersection.
const EDGE_EPS: [f64; 2] = [1e-12, 1e-9];
/// Default number of rays for unit-ball quadrature inside [`measure`].
pub const DEFAULT_RAYS: usize = 128;

fn sub2(a: &Vec2, b: &Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn cross2(a: &Vec2, b: &Vec2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dot2(a: &Vec2, b: &Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn norm2(a: &Vec2) -> f64 {
    a[0].hypot(a[1])
}

/// A strictly convex polygon, counterclockwise, in the affine chart given by
/// `chart`: the chart coordinates of an ambient homogeneous vector `v` are
/// `(w0/w2, w1/w2)` with `w = chart * v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDomain", into = "RawDomain")]
pub struct ConvexDomain {
    chart: ProjectiveMap,
    vertices: Vec<Vec2>,
}

#[derive(Serialize, Deserialize)]
struct RawDomain {
    chart: ProjectiveMap,
    vertices: Vec<Vec2>,
}

impl TryFrom<RawDomain> for ConvexDomain {
    type Error = Error;

    fn try_from(raw: RawDomain) -> Result<Self> {
        ConvexDomain::with_chart(raw.vertices, raw.chart)
    }
}

impl From<ConvexDomain> for RawDomain {
    fn from(d: ConvexDomain) -> Self {
        RawDomain { chart: d.chart, vertices: d.vertices }
    }
}

impl ConvexDomain {
    /// A domain in the standard chart `z = 1`.
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        Self::with_chart(vertices, ProjectiveMap::IDENTITY)
    }

    pub fn with_chart(vertices: Vec<Vec2>, chart: ProjectiveMap) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidDomain(format!("{n} vertices, need at least 3")));
        }
        if !vertices.iter().flatten().all(|x| x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut turning = 0.0;
        for i in 0..n {
            let e1 = sub2(&vertices[(i + 1) % n], &vertices[i]);
            let e2 = sub2(&vertices[(i + 2) % n], &vertices[(i + 1) % n]);
            let (l1, l2) = (norm2(&e1), norm2(&e2));
            if l1 < 1e-12 {
                return Err(Error::InvalidDomain(format!("repeated vertex at index {i}")));
            }
            let s = cross2(&e1, &e2) / (l1 * l2);
            if !(s > STRICT_CONVEXITY) {
                return Err(Error::InvalidDomain(format!("not strictly convex counterclockwise at vertex {}", (i + 1) % n)));
            }
            turning += s.atan2(dot2(&e1, &e2) / (l1 * l2));
        }
        if (turning - 2.0 * PI).abs() > 1e-6 {
            return Err(Error::InvalidDomain("polygon winds more than once".into()));
        }
        Ok(ConvexDomain { chart, vertices })
    }

    /// Convex hull of a point cloud. Vertices whose turning angle is below
    /// [`STRICT_CONVEXITY`] are dropped.
    pub fn hull(points: &[Vec2], chart: ProjectiveMap) -> Result<Self> {
        Self::with_chart(convex_hull(points), chart)
    }

    /// Regular `n`-gon with the given circumradius, centred at the origin.
    pub fn regular_polygon(n: usize, radius: f64) -> Result<Self> {
        let vs = (0..n)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / n as f64;
                [radius * th.cos(), radius * th.sin()]
            })
            .collect();
        Self::new(vs)
    }

    /// Regular `n`-gon approximating the unit disc. The circumradius is
    /// chosen so the boundary oscillates symmetrically around the unit
    /// circle (vertices outside, edge midpoints inside), halving the
    /// worst-case radial error of the inscribed polygon.
    pub fn disc(n: usize) -> Result<Self> {
        let r = 2.0 / (1.0 + (PI / n as f64).cos());
        Self::regular_polygon(n, r)
    }

    /// The square `(-1, 1)^2`.
    pub fn unit_square() -> Self {
        Self::new(vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]).expect("square is convex")
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn chart(&self) -> &ProjectiveMap {
        &self.chart
    }

    pub fn area(&self) -> f64 {
        polygon_area(&self.vertices)
    }

    pub fn centroid(&self) -> Vec2 {
        let n = self.vertices.len() as f64;
        let s = self.vertices.iter().fold([0.0, 0.0], |a, v| [a[0] + v[0], a[1] + v[1]]);
        [s[0] / n, s[1] / n]
    }

    /// Chart coordinates of an ambient homogeneous vector, `None` on the
    /// chart's line at infinity.
    pub fn to_chart(&self, v: &Vec3) -> Option<Vec2> {
        to_affine(&self.chart.apply_vec(v))
    }

    /// Ambient homogeneous vector of a chart point.
    pub fn from_chart(&self, x: &Vec2) -> Vec3 {
        self.chart.inverse().apply_vec(&[x[0], x[1], 1.0])
    }

    /// Signed distance from `x` to the nearest edge line (positive inside).
    pub fn inner_distance(&self, x: &Vec2) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let e = sub2(&self.vertices[(i + 1) % n], &self.vertices[i]);
                cross2(&e, &sub2(x, &self.vertices[i])) / norm2(&e)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Strict containment, `O(log n)`: wedge search from vertex 0.
    pub fn contains(&self, x: &Vec2) -> bool {
        let v = &self.vertices;
        let n = v.len();
        let rel = sub2(x, &v[0]);
        let side = |i: usize| {
            let e = sub2(&v[i], &v[0]);
            cross2(&e, &rel) / norm2(&e)
        };
        if !(side(1) > BOUNDARY_MARGIN) || !(side(n - 1) < -BOUNDARY_MARGIN) {
            return false;
        }
        // largest i in [1, n-2] with x left of (v0 -> v_i)
        let (mut lo, mut hi) = (1, n - 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if side(mid) >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let e = sub2(&v[lo + 1], &v[lo]);
        cross2(&e, &sub2(x, &v[lo])) / norm2(&e) > BOUNDARY_MARGIN
    }

    fn check_inside(&self, x: &Vec2) -> Result<()> {
        if x.iter().all(|c| c.is_finite()) && self.contains(x) {
            Ok(())
        } else {
            Err(Error::PointOutsideDomain(x[0], x[1]))
        }
    }

    /// Exit parameter `t > 0` of the ray `x + t d` through the boundary, for
    /// `x` strictly inside.
    fn ray_exit(&self, x: &Vec2, d: &Vec2) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        if n <= 16 {
            return self.ray_exit_linear(x, d);
        }
        let a0 = sub2(&v[0], x);
        let angle = |w: &Vec2| {
            let th = cross2(&a0, w).atan2(dot2(&a0, w));
            if th < 0.0 {
                th + 2.0 * PI
            } else {
                th
            }
        };
        let target = angle(d);
        // largest i with angle(v_i - x) <= target; angle(v_0 - x) = 0
        let (mut lo, mut hi) = (0, n);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if angle(&sub2(&v[mid], x)) <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        for eps in EDGE_EPS {
            for k in [lo, (lo + 1) % n, (lo + n - 1) % n] {
                let (a, b) = (&v[k], &v[(k + 1) % n]);
                let e = sub2(b, a);
                let den = cross2(d, &e);
                if den == 0.0 {
                    continue;
                }
                let ax = sub2(a, x);
                let t = cross2(&ax, &e) / den;
                let u = cross2(&ax, d) / den;
                if t > 0.0 && (-eps..=1.0 + eps).contains(&u) {
                    return t;
                }
            }
        }
        self.ray_exit_linear(x, d)
    }

    fn ray_exit_linear(&self, x: &Vec2, d: &Vec2) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            let e = sub2(&v[(i + 1) % n], &v[i]);
            let rate = cross2(&e, d);
            if rate < 0.0 {
                let f0 = cross2(&e, &sub2(x, &v[i]));
                best = best.min(f0 / -rate);
            }
        }
        best
    }
}

fn to_affine(w: &Vec3) -> Option<Vec2> {
    if w[2] == 0.0 || !w.iter().all(|x| x.is_finite()) {
        None
    } else {
        Some([w[0] / w[2], w[1] / w[2]])
    }
}

/// Signed area (positive for counterclockwise order).
pub fn polygon_area(vs: &[Vec2]) -> f64 {
    let n = vs.len();
    if n < 3 {
        return 0.0;
    }
    0.5 * (0..n).map(|i| cross2(&vs[i], &vs[(i + 1) % n])).sum::<f64>()
}

/// Monotone-chain convex hull, counterclockwise, with nearly-flat vertices
/// removed so the result satisfies the strict convexity invariant.
pub fn convex_hull(points: &[Vec2]) -> Vec<Vec2> {
    let mut pts: Vec<Vec2> = points.iter().copied().filter(|p| p.iter().all(|x| x.is_finite())).collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup_by(|a, b| (a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
    if pts.len() < 3 {
        return pts;
    }
    let turn = |o: &Vec2, a: &Vec2, b: &Vec2| {
        let (e1, e2) = (sub2(a, o), sub2(b, a));
        cross2(&e1, &e2) / (norm2(&e1) * norm2(&e2))
    };
    let mut hull: Vec<Vec2> = Vec::with_capacity(pts.len() + 1);
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Vec2>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for p in iter {
            while hull.len() >= start + 2 && turn(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= STRICT_CONVEXITY {
                hull.pop();
            }
            hull.push(*p);
        }
        hull.pop();
    }
    // the wrap-around vertices can still be flat after the two chains join
    loop {
        let n = hull.len();
        if n < 3 {
            break;
        }
        let flat = (0..n).find(|&i| turn(&hull[(i + n - 1) % n], &hull[i], &hull[(i + 1) % n]) <= STRICT_CONVEXITY);
        match flat {
            Some(i) => {
                hull.remove(i);
            }
            None => break,
        }
    }
    hull
}

/// Boundary points `p, q` of the line through `x` and `y`, in the order
/// `p, x, y, q`.
pub fn chord_endpoints(dom: &ConvexDomain, x: &Vec2, y: &Vec2) -> Result<(Vec2, Vec2)> {
    dom.check_inside(x)?;
    dom.check_inside(y)?;
    if x == y {
        return Err(Error::CoincidentPoints);
    }
    let d = sub2(y, x);
    let tq = dom.ray_exit(x, &d);
    let tp = dom.ray_exit(x, &[-d[0], -d[1]]);
    Ok(([x[0] - tp * d[0], x[1] - tp * d[1]], [x[0] + tq * d[0], x[1] + tq * d[1]]))
}

/// Hilbert distance `1/2 log(|p-y||q-x| / (|p-x||q-y|))`.
///
/// Written as `1/2 [log1p(1/a) + log1p(1/b)]` with `a = |p-x|/|x-y|` and
/// `b = |q-y|/|x-y|`, each measured from the nearer interior point, which
/// keeps full precision close to the boundary and is exactly symmetric.
pub fn distance(dom: &ConvexDomain, x: &Vec2, y: &Vec2) -> Result<f64> {
    dom.check_inside(x)?;
    dom.check_inside(y)?;
    if x == y {
        return Ok(0.0);
    }
    let d = sub2(y, x);
    let a = dom.ray_exit(x, &[-d[0], -d[1]]);
    let b = dom.ray_exit(y, &d);
    Ok(0.5 * ((1.0 / a).ln_1p() + (1.0 / b).ln_1p()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentVector {
    pub base: Vec2,
    pub dir: Vec2,
}

/// Finsler norm `1/2 (1/|x-p-| + 1/|x-p+|) |v|`.
pub fn finsler_norm(dom: &ConvexDomain, tv: &TangentVector) -> Result<f64> {
    if tv.dir == [0.0, 0.0] {
        return Err(Error::ZeroVector);
    }
    dom.check_inside(&tv.base)?;
    Ok(norm_unchecked(dom, &tv.base, &tv.dir))
}

fn norm_unchecked(dom: &ConvexDomain, x: &Vec2, v: &Vec2) -> f64 {
    let fwd = dom.ray_exit(x, v);
    let back = dom.ray_exit(x, &[-v[0], -v[1]]);
    0.5 * (1.0 / fwd + 1.0 / back)
}

/// Euclidean area of the Finsler unit ball `{v : |v|_x < 1}`, by polar
/// quadrature over `n_rays` equally spaced directions.
pub fn unit_ball_area(dom: &ConvexDomain, x: &Vec2, n_rays: usize) -> Result<f64> {
    if n_rays < 16 {
        return Err(Error::InvalidArgument(format!("n_rays = {n_rays}, need at least 16")));
    }
    dom.check_inside(x)?;
    Ok(ball_area_unchecked(dom, x, n_rays))
}

fn ball_area_unchecked(dom: &ConvexDomain, x: &Vec2, n_rays: usize) -> f64 {
    let sum: f64 = (0..n_rays)
        .map(|k| {
            let th = 2.0 * PI * k as f64 / n_rays as f64;
            let r = 1.0 / norm_unchecked(dom, x, &[th.cos(), th.sin()]);
            r * r
        })
        .sum();
    PI * sum / n_rays as f64
}

/// Radius of the Finsler unit ball at `x` in the unit direction `angle`.
pub fn unit_ball_radius(dom: &ConvexDomain, x: &Vec2, angle: f64) -> Result<f64> {
    dom.check_inside(x)?;
    Ok(1.0 / norm_unchecked(dom, x, &[angle.cos(), angle.sin()]))
}

/// `mu(A) = int_A dVol / Vol(B_x(1))` with the midpoint rule on a
/// `grid x grid` lattice over the bounding box of `region`, restricted to the
/// region. [`DEFAULT_RAYS`] rays per unit ball.
pub fn measure(dom: &ConvexDomain, region: &[Vec2], grid: usize) -> Result<f64> {
    measure_with(dom, region, grid, DEFAULT_RAYS)
}

pub fn measure_with(dom: &ConvexDomain, region: &[Vec2], grid: usize, n_rays: usize) -> Result<f64> {
    if grid == 0 || n_rays < 16 {
        return Err(Error::InvalidArgument("grid must be positive and n_rays >= 16".into()));
    }
    if region.iter().any(|v| !dom.contains(v)) {
        return Err(Error::RegionNotContained);
    }
    let area = polygon_area(region);
    if region.len() < 3 || area.abs() < 1e-300 {
        return Ok(0.0);
    }
    let region: Vec<Vec2> = if area < 0.0 { region.iter().rev().copied().collect() } else { region.to_vec() };
    let inside = |p: &Vec2| {
        let n = region.len();
        (0..n).all(|i| cross2(&sub2(&region[(i + 1) % n], &region[i]), &sub2(p, &region[i])) > 0.0)
    };
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for v in &region {
        for k in 0..2 {
            lo[k] = lo[k].min(v[k]);
            hi[k] = hi[k].max(v[k]);
        }
    }
    let (w, h) = ((hi[0] - lo[0]) / grid as f64, (hi[1] - lo[1]) / grid as f64);
    let rows: Vec<f64> = (0..grid)
        .into_par_iter()
        .map(|j| {
            let y = lo[1] + (j as f64 + 0.5) * h;
            let vals: Vec<f64> = (0..grid)
                .filter_map(|i| {
                    let p = [lo[0] + (i as f64 + 0.5) * w, y];
                    inside(&p).then(|| 1.0 / ball_area_unchecked(dom, &p, n_rays))
                })
                .collect();
            pairwise_sum(&vals)
        })
        .collect();
    Ok(pairwise_sum(&rows) * w * h)
}

/// Fixed-order pairwise summation; the result does not depend on how the
/// inputs were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n if n <= 8 => xs.iter().sum(),
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

fn same_chart(a: &ConvexDomain, b: &ConvexDomain) -> Result<()> {
    if proj3::max_abs_diff(a.chart.matrix(), b.chart.matrix()) > 1e-12 {
        Err(Error::ChartMismatch)
    } else {
        Ok(())
    }
}

/// Symmetric Hausdorff distance between the vertex sets of two domains.
pub fn hausdorff_distance(a: &ConvexDomain, b: &ConvexDomain) -> Result<f64> {
    same_chart(a, b)?;
    let one_way = |p: &[Vec2], q: &[Vec2]| {
        p.iter().map(|u| q.iter().map(|v| norm2(&sub2(u, v))).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };
    Ok(one_way(&a.vertices, &b.vertices).max(one_way(&b.vertices, &a.vertices)))
}

/// Euclidean distance from a point to a convex polygon (zero inside).
pub fn distance_to_polygon(vs: &[Vec2], x: &Vec2) -> f64 {
    let n = vs.len();
    let inside = (0..n).all(|i| cross2(&sub2(&vs[(i + 1) % n], &vs[i]), &sub2(x, &vs[i])) >= 0.0);
    if inside {
        return 0.0;
    }
    (0..n)
        .map(|i| {
            let (a, b) = (&vs[i], &vs[(i + 1) % n]);
            let e = sub2(b, a);
            let t = (dot2(&sub2(x, a), &e) / dot2(&e, &e)).clamp(0.0, 1.0);
            norm2(&sub2(x, &[a[0] + t * e[0], a[1] + t * e[1]]))
        })
        .fold(f64::INFINITY, f64::min)
}

/// Hausdorff distance between the two convex regions (not just their
/// vertex sets). Distance to a convex set is convex along segments, so the
/// supremum is attained at a vertex and this is exact.
pub fn region_hausdorff(a: &ConvexDomain, b: &ConvexDomain) -> Result<f64> {
    same_chart(a, b)?;
    Ok(region_hausdorff_vertices(&a.vertices, &b.vertices))
}

pub(crate) fn region_hausdorff_vertices(a: &[Vec2], b: &[Vec2]) -> f64 {
    let one = |p: &[Vec2], q: &[Vec2]| p.iter().map(|x| distance_to_polygon(q, x)).fold(0.0, f64::max);
    one(a, b).max(one(b, a))
}

/// Sutherland-Hodgman clip of a convex polygon against a convex window.
pub fn clip_polygon(subject: &[Vec2], window: &[Vec2]) -> Vec<Vec2> {
    let mut out = subject.to_vec();
    let m = window.len();
    for i in 0..m {
        if out.is_empty() {
            break;
        }
        let (a, b) = (window[i], window[(i + 1) % m]);
        let e = sub2(&b, &a);
        let side = |p: &Vec2| cross2(&e, &sub2(p, &a));
        let input = std::mem::take(&mut out);
        let k = input.len();
        for j in 0..k {
            let (p, q) = (input[j], input[(j + 1) % k]);
            let (sp, sq) = (side(&p), side(&q));
            if sp >= 0.0 {
                out.push(p);
            }
            if (sp >= 0.0) != (sq >= 0.0) {
                let t = sp / (sp - sq);
                out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            }
        }
    }
    out
}

impl ConvexDomain {
    /// Image of the domain under a projective map of the chart plane. Fails
    /// if the image meets the line at infinity.
    pub fn transform(&self, t: &ProjectiveMap) -> Result<ConvexDomain> {
        let imgs: Vec<Vec3> = self.vertices.iter().map(|v| t.apply_vec(&[v[0], v[1], 1.0])).collect();
        let sign = imgs[0][2].signum();
        if imgs.iter().any(|w| !(w[2] * sign > 0.0)) {
            return Err(Error::PointAtInfinity);
        }
        let mut vs: Vec<Vec2> = imgs.iter().map(|w| [w[0] / w[2], w[1] / w[2]]).collect();
        if polygon_area(&vs) < 0.0 {
            vs.reverse();
        }
        ConvexDomain::with_chart(vs, self.chart)
    }
}
