//! Inner approximation of the invariant convex domain by the convex hull of
//! fixed points of group elements, affine-chart selection, the triangle
//! spanned by a curve's fixed points, and SVG rendering.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::bulge::{bulge_frame, deform, BulgeFrame};
use crate::group::{orbit_layers, Representation, Word, DEFAULT_ORBIT_BUDGET};
use crate::hilbert::{convex_hull, region_hausdorff_vertices, ConvexDomain, Vec2};
use crate::proj3::{self, Mat3, ProjPoint, ProjectiveMap, Vec3};
use crate::{Error, Result};

/// Two limit points closer than this (in normalized homogeneous
/// coordinates) are the same point.
pub const POINT_DEDUP: f64 = 1e-8;
/// Hull vertices closer than this (chart units) are merged.
pub const VERTEX_DEDUP: f64 = 1e-9;
/// The standard chart is kept when every point has `|z| / |v|` at least
/// this large, i.e. chart coordinates bounded by about 10.
pub const IDENTITY_MARGIN: f64 = 0.1;
/// Smallest acceptable `min f.v` over unit vectors for a separating
/// functional `f`.
pub const MIN_CHART_MARGIN: f64 = 1e-3;

/// Fixed points of a finite part of the group.
#[derive(Clone, Debug)]
pub struct LimitSet {
    pub points: Vec<ProjPoint>,
    /// Elements that were not hyperbolic (the identity excluded).
    pub skipped: usize,
}

struct PointIndex {
    buckets: HashMap<(i64, i64, i64), Vec<usize>>,
}

impl PointIndex {
    fn key(v: &Vec3) -> (i64, i64, i64) {
        let q = |x: f64| (x / (4.0 * POINT_DEDUP)).floor() as i64;
        (q(v[0]), q(v[1]), q(v[2]))
    }

    fn contains(&self, v: &Vec3, pts: &[ProjPoint]) -> bool {
        let (a, b, c) = Self::key(v);
        for da in -1..=1 {
            for db in -1..=1 {
                for dc in -1..=1 {
                    if let Some(ix) = self.buckets.get(&(a + da, b + db, c + dc)) {
                        let hit = ix.iter().any(|&i| {
                            let w = pts[i].coords();
                            (0..3).all(|k| (w[k] - v[k]).abs() <= POINT_DEDUP)
                        });
                        if hit {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    fn push(&mut self, p: ProjPoint, pts: &mut Vec<ProjPoint>) {
        if self.contains(p.coords(), pts) {
            return;
        }
        self.buckets.entry(Self::key(p.coords())).or_default().push(pts.len());
        pts.push(p);
    }
}

/// Attracting and repelling fixed points of every element of the Cayley
/// ball of radius `depth`, deduplicated at [`POINT_DEDUP`], in enumeration
/// order.
///
/// An element `w = p u p⁻¹` with `u` cyclically reduced has the fixed
/// points of `u` moved by `p`. Eigenvectors are taken from `u` only, since
/// the product for `w` can cancel large factors after a deformation.
pub fn limit_points(rep: &Representation, depth: usize) -> Result<LimitSet> {
    let (w, _) = rep.frame();
    let mut pts = Vec::new();
    let mut index = PointIndex { buckets: HashMap::new() };
    let mut skipped = 0;
    let mut words: Vec<Word> = Vec::new();
    orbit_layers(rep, depth, DEFAULT_ORBIT_BUDGET, |k, layer| {
        if k == 0 {
            words = vec![Word::empty()];
            return Ok(());
        }
        let next: Vec<Word> = layer
            .iter()
            .map(|node| {
                let mut l = words[node.parent as usize].letters().to_vec();
                l.push(node.letter);
                Word::new(l)
            })
            .collect();
        let found: Vec<Option<[ProjPoint; 2]>> = next.par_iter().map(|wd| fixed_pair(rep, w, wd)).collect();
        for f in found {
            match f {
                Some([a, r]) => {
                    index.push(a, &mut pts);
                    index.push(r, &mut pts);
                }
                None => skipped += 1,
            }
        }
        words = next;
        Ok(())
    })?;
    Ok(LimitSet { points: pts, skipped })
}

fn fixed_pair(rep: &Representation, w: &Mat3, word: &Word) -> Option<[ProjPoint; 2]> {
    let l = word.letters();
    let mut k = 0;
    while 2 * k + 1 < l.len() && l[k] == -l[l.len() - 1 - k] {
        k += 1;
    }
    let prefix = Word::new(l[..k].to_vec());
    let core = Word::new(l[k..l.len() - k].to_vec());
    let (m, inv) = rep.evaluate_local(&core).ok()?;
    let spec = proj3::eigen_hyperbolic_with_inverse(&ProjectiveMap::from_det1(m), &ProjectiveMap::from_det1(inv)).ok()?;
    let (p, _) = rep.evaluate_local(&prefix).ok()?;
    let wp = proj3::mul(w, &p);
    let a = ProjPoint::new(proj3::apply(&wp, spec.attracting().coords())).ok()?;
    let r = ProjPoint::new(proj3::apply(&wp, spec.repelling().coords())).ok()?;
    Some([a, r])
}

// Minimum-norm point of the convex hull of `vs` (Gilbert's algorithm).
fn min_norm_point(vs: &[Vec3]) -> Vec3 {
    let mut x = vs[0];
    for _ in 0..4000 {
        let (mut best, mut arg) = (f64::INFINITY, 0);
        for (i, v) in vs.iter().enumerate() {
            let d = proj3::dot(&x, v);
            if d < best {
                best = d;
                arg = i;
            }
        }
        let v = vs[arg];
        let d = [v[0] - x[0], v[1] - x[1], v[2] - x[2]];
        let dd = proj3::dot(&d, &d);
        let xx = proj3::dot(&x, &x);
        let gap = xx - best;
        // |x| bounds the achievable margin from above and best / |x| from
        // below, so stop once either decides the outcome
        if dd == 0.0 || gap <= 1e-9 * xx || xx < 0.25 * MIN_CHART_MARGIN * MIN_CHART_MARGIN {
            break;
        }
        let t = (gap / dd).clamp(0.0, 1.0);
        x = [x[0] + t * d[0], x[1] + t * d[1], x[2] + t * d[2]];
    }
    x
}

fn orient(us: &[Vec3], f: &Vec3) -> Vec<Vec3> {
    us.iter().map(|u| if proj3::dot(u, f) < 0.0 { [-u[0], -u[1], -u[2]] } else { *u }).collect()
}

fn margin(vs: &[Vec3], f: &Vec3) -> f64 {
    vs.iter().map(|v| proj3::dot(v, f)).fold(f64::INFINITY, f64::min)
}

/// A chart containing every point: the identity when the points are well
/// inside the standard chart, otherwise the maximum-margin separating
/// functional is sent to the line at infinity and the image is recentred
/// and scaled to unit radius.
pub fn choose_chart(points: &[ProjPoint]) -> Result<ProjectiveMap> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument("need at least three points".into()));
    }
    let us: Vec<Vec3> = points.iter().map(|p| proj3::unit(p.coords())).collect();
    let first = us[0];
    let second = us.iter().find(|u| proj3::norm(&proj3::cross(u, &first)) > 1e-9);
    let collinear = match second {
        None => true,
        Some(s) => {
            let n = proj3::unit(&proj3::cross(&first, s));
            us.iter().all(|u| proj3::dot(u, &n).abs() < 1e-9)
        }
    };
    if collinear {
        return Err(Error::InvalidArgument("points are collinear".into()));
    }
    let e3 = [0.0, 0.0, 1.0];
    if margin(&orient(&us, &e3), &e3) >= IDENTITY_MARGIN {
        return Ok(ProjectiveMap::IDENTITY);
    }
    let mut best: Option<(f64, Vec3)> = None;
    for start in [e3, first] {
        let mut f = start;
        for _ in 0..50 {
            let vs = orient(&us, &f);
            let c = min_norm_point(&vs);
            if proj3::norm(&c) < 1e-12 {
                break;
            }
            let g = proj3::unit(&c);
            let stable = us.iter().all(|u| (proj3::dot(u, &f) < 0.0) == (proj3::dot(u, &g) < 0.0));
            f = g;
            if stable {
                break;
            }
        }
        let m = margin(&orient(&us, &f), &f);
        if best.is_none_or(|(bm, _)| m > bm) {
            best = Some((m, f));
        }
    }
    let (m, f) = best.expect("two starts tried");
    if !(m >= MIN_CHART_MARGIN) {
        return Err(Error::NoSeparatingLine);
    }
    // right-handed orthonormal basis with f last
    let helper = if f[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let a = proj3::unit(&proj3::cross(&helper, &f));
    let b = proj3::cross(&f, &a);
    let t = [a, b, f];
    let xs: Vec<Vec2> = us.iter().map(|u| {
        let w = proj3::apply(&t, u);
        [w[0] / w[2], w[1] / w[2]]
    }).collect();
    let (lo, hi) = bbox(&xs);
    let (cx, cy) = (0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]));
    let r = xs.iter().map(|x| (x[0] - cx).hypot(x[1] - cy)).fold(0.0, f64::max).max(1e-300);
    let k = 1.0 / r;
    let centre = [[k, 0.0, -k * cx], [0.0, k, -k * cy], [0.0, 0.0, 1.0]];
    ProjectiveMap::from_any_sign(proj3::mul(&centre, &t))
}

fn bbox(xs: &[Vec2]) -> (Vec2, Vec2) {
    xs.iter().fold(([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]), |(lo, hi), x| {
        ([lo[0].min(x[0]), lo[1].min(x[1])], [hi[0].max(x[0]), hi[1].max(x[1])])
    })
}

/// Chart coordinates of a projective point, `PointAtInfinity` when it lies
/// (numerically) on the chart's line at infinity.
pub fn chart_coords(chart: &ProjectiveMap, p: &ProjPoint) -> Result<Vec2> {
    let w = chart.apply_vec(&proj3::unit(p.coords()));
    if w[2].abs() <= 1e-12 * proj3::norm(&w) {
        return Err(Error::PointAtInfinity);
    }
    Ok([w[0] / w[2], w[1] / w[2]])
}

/// Convex hull of chart points with vertices closer than [`VERTEX_DEDUP`]
/// merged.
pub fn hull_of(xs: &[Vec2], chart: ProjectiveMap) -> Result<ConvexDomain> {
    let mut vs = convex_hull(xs);
    loop {
        let n = vs.len();
        let close = (0..n).find(|&i| {
            let (a, b) = (vs[i], vs[(i + 1) % n]);
            (a[0] - b[0]).hypot(a[1] - b[1]) < VERTEX_DEDUP
        });
        match close {
            Some(i) if n > 3 => {
                vs.remove(i);
                vs = convex_hull(&vs);
            }
            _ => break,
        }
    }
    ConvexDomain::with_chart(vs, chart)
}

/// Hull of the limit points in a given chart.
pub fn hull_in_chart(points: &[ProjPoint], chart: ProjectiveMap) -> Result<ConvexDomain> {
    let xs = points.iter().map(|p| chart_coords(&chart, p)).collect::<Result<Vec<_>>>()?;
    hull_of(&xs, chart)
}

/// Polygonal inner approximation of the invariant domain in a chart chosen
/// by [`choose_chart`].
pub fn domain_hull(rep: &Representation, depth: usize) -> Result<ConvexDomain> {
    let ls = limit_points(rep, depth)?;
    let chart = choose_chart(&ls.points)?;
    hull_in_chart(&ls.points, chart)
}

/// Largest Hausdorff distance (chart units) between the hull of the points
/// and the hull of their image under a generator. Zero for the true
/// domain; measures the approximation error of the hull.
pub fn invariance_defect(rep: &Representation, points: &[ProjPoint], chart: &ProjectiveMap) -> Result<f64> {
    let xs = points.iter().map(|p| chart_coords(chart, p)).collect::<Result<Vec<_>>>()?;
    let base = convex_hull(&xs);
    let mut worst: f64 = 0.0;
    for g in rep.images() {
        for m in [*g, g.inverse()] {
            let ys = points
                .iter()
                .map(|p| chart_coords(chart, &m.apply(p)))
                .collect::<Result<Vec<_>>>()?;
            worst = worst.max(region_hausdorff_vertices(&base, &convex_hull(&ys)));
        }
    }
    Ok(worst)
}

/// The triangle with vertices at the attracting, neutral and repelling
/// fixed points of the frame's curve, in the given chart.
pub fn limit_triangle(frame: &BulgeFrame, chart: &ProjectiveMap) -> Result<ConvexDomain> {
    let s = frame.spectrum();
    let mut vs = vec![
        chart_coords(chart, s.attracting())?,
        chart_coords(chart, s.neutral())?,
        chart_coords(chart, s.repelling())?,
    ];
    if crate::hilbert::polygon_area(&vs) < 0.0 {
        vs.reverse();
    }
    ConvexDomain::with_chart(vs, *chart)
}

/// Deformations of `rep` along an `s` grid with their hulls, all in the
/// chart chosen for the last grid point (the most deformed, when the grid
/// increases).
pub struct DeformedHulls {
    pub deformed: Vec<Representation>,
    pub hulls: Vec<ConvexDomain>,
    pub chart: ProjectiveMap,
}

pub fn deformed_hulls(rep: &Representation, s_grid: &[f64], t: f64, depth: usize) -> Result<DeformedHulls> {
    if s_grid.is_empty() {
        return Err(Error::InvalidArgument("empty s grid".into()));
    }
    let deformed = s_grid.iter().map(|&s| deform(rep, t, s)).collect::<Result<Vec<_>>>()?;
    let points = deformed.iter().map(|r| limit_points(r, depth).map(|l| l.points)).collect::<Result<Vec<_>>>()?;
    let chart = choose_chart(points.last().expect("grid is nonempty"))?;
    let hulls = points.iter().map(|p| hull_in_chart(p, chart)).collect::<Result<Vec<_>>>()?;
    Ok(DeformedHulls { deformed, hulls, chart })
}

/// Layers for a picture of the domains converging under bulging: one hull
/// per grid value, the limit triangle of the curve and its axis.
pub fn sweep_figure(
    rep: &Representation,
    s_grid: &[f64],
    t: f64,
    depth: usize,
) -> Result<(Vec<(String, ConvexDomain)>, Vec<(String, Overlay)>)> {
    let split = rep.splitting().ok_or(Error::NoSplitting)?;
    let frame = bulge_frame(rep, split.gamma())?;
    let DeformedHulls { hulls, chart, .. } = deformed_hulls(rep, s_grid, t, depth)?;
    let domains = s_grid.iter().zip(hulls).map(|(s, h)| (format!("s = {s}"), h)).collect();
    let sp = frame.spectrum();
    let axis = Overlay::Segment(chart_coords(&chart, sp.attracting())?, chart_coords(&chart, sp.repelling())?);
    let overlays = vec![("triangle".to_string(), Overlay::Triangle(limit_triangle(&frame, &chart)?)), ("axis".to_string(), axis)];
    Ok((domains, overlays))
}

/// Something drawn on top of the domains.
#[derive(Clone, Debug)]
pub enum Overlay {
    Triangle(ConvexDomain),
    Segment(Vec2, Vec2),
}

const CANVAS: f64 = 800.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// SVG document with one polygon per domain and the overlays on top. Chart
/// coordinates are mapped to an 800x800 canvas (y up) with 5% padding;
/// coordinates are printed with two decimals so the bytes are stable.
pub fn svg_string(domains: &[(String, ConvexDomain)], overlays: &[(String, Overlay)]) -> String {
    let mut all: Vec<Vec2> = domains.iter().flat_map(|(_, d)| d.vertices().iter().copied()).collect();
    for (_, o) in overlays {
        match o {
            Overlay::Triangle(t) => all.extend(t.vertices()),
            Overlay::Segment(a, b) => all.extend([*a, *b]),
        }
    }
    let (lo, hi) = if all.is_empty() { ([-1.0, -1.0], [1.0, 1.0]) } else { bbox(&all) };
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    let k = 0.9 * CANVAS / span;
    let (cx, cy) = (0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]));
    let px = |x: &Vec2| (0.5 * CANVAS + k * (x[0] - cx), 0.5 * CANVAS - k * (x[1] - cy));
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(s, "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{CANVAS}\" height=\"{CANVAS}\" viewBox=\"0 0 {CANVAS} {CANVAS}\">");
    for (i, (label, d)) in domains.iter().enumerate() {
        let pts: Vec<String> = d.vertices().iter().map(|v| {
            let (x, y) = px(v);
            format!("{x:.2},{y:.2}")
        }).collect();
        let _ = writeln!(
            s,
            "  <polygon id=\"domain-{i}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"><title>{}</title></polygon>",
            PALETTE[i % PALETTE.len()],
            pts.join(" "),
            escape(label)
        );
    }
    for (i, (label, o)) in overlays.iter().enumerate() {
        match o {
            Overlay::Triangle(t) => {
                let pts: Vec<String> = t.vertices().iter().map(|v| {
                    let (x, y) = px(v);
                    format!("{x:.2},{y:.2}")
                }).collect();
                let _ = writeln!(
                    s,
                    "  <polygon id=\"overlay-{i}\" fill=\"none\" stroke=\"#444444\" stroke-dasharray=\"6,4\" points=\"{}\"><title>{}</title></polygon>",
                    pts.join(" "),
                    escape(label)
                );
            }
            Overlay::Segment(a, b) => {
                let ((x1, y1), (x2, y2)) = (px(a), px(b));
                let _ = writeln!(
                    s,
                    "  <line id=\"overlay-{i}\" stroke=\"#444444\" stroke-dasharray=\"2,3\" x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\"><title>{}</title></line>",
                    escape(label)
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

pub fn render_svg(domains: &[(String, ConvexDomain)], overlays: &[(String, Overlay)], path: &Path) -> Result<()> {
    std::fs::write(path, svg_string(domains, overlays))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bulge::{bulge_frame, deform};
    use crate::hilbert::region_hausdorff;
    use crate::reps::{self, PantsParams, KLEIN_FORM};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn conic_residual(p: &ProjPoint) -> f64 {
        let u = proj3::unit(p.coords());
        proj3::dot(&u, &proj3::apply(&KLEIN_FORM, &u)).abs()
    }

    fn pants() -> Representation {
        reps::pants_amalgam(&PantsParams::new(2.0, 2.0, 2.0).unwrap(), reps::DEFAULT_OFFSET).unwrap()
    }

    #[test]
    fn fuchsian_points_on_conic() {
        let ls = limit_points(&pants(), 4).unwrap();
        assert_eq!(ls.skipped, 0);
        assert!(ls.points.len() > 100);
        let worst = ls.points.iter().map(conic_residual).fold(0.0, f64::max);
        assert!(worst < 1e-7, "{worst}");
    }

    #[test]
    fn depth_monotone() {
        let rep = pants();
        let a = limit_points(&rep, 3).unwrap().points;
        let b = limit_points(&rep, 4).unwrap().points;
        for p in &a {
            assert!(b.iter().any(|q| p.separation(q) < 1e-7));
        }
    }

    #[test]
    fn identity_chart_for_disc_points() {
        let pts: Vec<ProjPoint> = (0..20).map(|k| {
            let th = k as f64 * 0.3;
            ProjPoint::affine(0.9 * th.cos(), 0.9 * th.sin())
        }).collect();
        assert_eq!(choose_chart(&pts).unwrap(), ProjectiveMap::IDENTITY);
    }

    #[test]
    fn chart_for_conic_through_infinity() {
        // the conic x^2 - y z = 0 meets z = 0 at (0, 1, 0)
        let pts: Vec<ProjPoint> = (0..64)
            .map(|k| {
                let th = std::f64::consts::PI * k as f64 / 64.0;
                ProjPoint::new([th.sin() * th.cos(), th.sin() * th.sin(), th.cos() * th.cos()]).unwrap()
            })
            .collect();
        let chart = choose_chart(&pts).unwrap();
        assert_ne!(chart, ProjectiveMap::IDENTITY);
        for p in &pts {
            let x = chart_coords(&chart, p).unwrap();
            assert!(x[0].hypot(x[1]) <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn spread_points_have_no_chart() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<ProjPoint> = (0..2000)
            .map(|_| {
                let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                ProjPoint::new(v).unwrap()
            })
            .collect();
        assert!(matches!(choose_chart(&pts), Err(Error::NoSeparatingLine)));
    }

    #[test]
    fn octagon_hull_fills_disc() {
        let dom = domain_hull(&reps::genus2_octagon(), 5).unwrap();
        assert_eq!(*dom.chart(), ProjectiveMap::IDENTITY);
        let disc = ConvexDomain::disc(512).unwrap();
        let h = region_hausdorff(&dom, &disc).unwrap();
        assert!(h < 0.02, "{h}");
    }

    #[test]
    fn hulls_nested_in_depth() {
        let rep = pants();
        let a = domain_hull(&rep, 3).unwrap();
        let b = hull_in_chart(&limit_points(&rep, 4).unwrap().points, *a.chart()).unwrap();
        for v in a.vertices() {
            assert!(crate::hilbert::distance_to_polygon(b.vertices(), v) < 1e-9);
        }
    }

    #[test]
    fn bulging_moves_hull() {
        let rep = pants();
        let p1 = limit_points(&deform(&rep, 0.0, 1.0).unwrap(), 4).unwrap().points;
        let p2 = limit_points(&deform(&rep, 0.0, 2.0).unwrap(), 4).unwrap().points;
        let chart = choose_chart(&p2).unwrap();
        let (a, b) = (hull_in_chart(&p1, chart).unwrap(), hull_in_chart(&p2, chart).unwrap());
        assert!(region_hausdorff(&a, &b).unwrap() > 1e-3);
    }

    #[test]
    fn triangle_of_diagonal() {
        let m = ProjectiveMap::new(proj3::diag(4.0, 1.0, 0.25)).unwrap();
        let f = BulgeFrame::from_map(&m).unwrap();
        let chart = ProjectiveMap::new([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 1.0]]).unwrap();
        let t = limit_triangle(&f, &chart).unwrap();
        let mut vs: Vec<Vec2> = t.vertices().to_vec();
        vs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(vs, vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]);
        assert!(matches!(limit_triangle(&f, &ProjectiveMap::IDENTITY), Err(Error::PointAtInfinity)));
    }

    #[test]
    fn deformed_arc_inside_triangle() {
        // beyond the axis of the curve the bulged domain stays inside the
        // triangle of its fixed points
        let rep = pants();
        let frame = bulge_frame(&rep, rep.splitting().unwrap().gamma()).unwrap();
        let chart = ProjectiveMap::IDENTITY;
        let tri = limit_triangle(&frame, &chart).unwrap();
        let sp = frame.spectrum();
        let (p, q) = (chart_coords(&chart, sp.attracting()).unwrap(), chart_coords(&chart, sp.repelling()).unwrap());
        let apex = chart_coords(&chart, sp.neutral()).unwrap();
        let side = |x: &Vec2| (q[0] - p[0]) * (x[1] - p[1]) - (q[1] - p[1]) * (x[0] - p[0]);
        let s0 = side(&apex).signum();
        for s in [1.0, 3.0, 6.0] {
            let pts = limit_points(&deform(&rep, 0.0, s).unwrap(), 5).unwrap();
            assert_eq!(pts.skipped, 0);
            let hull = hull_in_chart(&pts.points, chart).unwrap();
            let beyond: Vec<&Vec2> = hull.vertices().iter().filter(|v| side(v) * s0 > 1e-9).collect();
            assert!(beyond.len() > 10);
            for v in beyond {
                let d = crate::hilbert::distance_to_polygon(tri.vertices(), v);
                assert!(d < 1e-7, "s={s} {v:?} {d}");
            }
        }
    }

    #[test]
    fn invariance_defect_small() {
        let rep = pants();
        let ls = limit_points(&rep, 5).unwrap();
        let d = invariance_defect(&rep, &ls.points, &ProjectiveMap::IDENTITY).unwrap();
        let d4 = invariance_defect(&rep, &limit_points(&rep, 4).unwrap().points, &ProjectiveMap::IDENTITY).unwrap();
        assert!(d < d4 && d < 0.1, "{d} {d4}");
    }

    #[test]
    fn svg_basics() {
        let s = svg_string(&[("square".into(), ConvexDomain::unit_square())], &[]);
        assert!(s.starts_with("<?xml"));
        assert_eq!(s.matches("<polygon").count(), 1);
        assert!(s.trim_end().ends_with("</svg>"));
        let e = svg_string(&[], &[]);
        assert_eq!(e.matches("<polygon").count(), 0);
        assert!(e.contains("<svg"));
    }
}
