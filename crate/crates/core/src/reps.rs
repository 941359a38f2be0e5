//! Concrete base representations: Fuchsian groups pushed into SL(3,R)
//! through the symmetric square, Schottky pairs with a ping-pong
//! certificate, a punctured-torus HNN seed and a closed genus-2 group.

use std::f64::consts::PI;

use crate::group::{default_names, Certificate, Representation, Splitting, Word};
use crate::proj3::{self, Mat3, ProjPoint, ProjectiveMap};
use crate::{Error, Result};

pub type Mat2 = [[f64; 2]; 2];

/// Quadratic form `x^2 + y^2 - z^2` preserved by the symmetric square; its
/// null cone is the unit circle of the chart `z = 1`.
pub const KLEIN_FORM: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]];

/// Default ping-pong certification depth.
pub const DEFAULT_PING_PONG_DEPTH: usize = 4;

fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

/// Image of `A` in SO(2,1) under `X ↦ A X Aᵀ` on symmetric matrices
/// `X = [[z+x, y], [y, z-x]]`. `A` is rescaled to determinant one.
pub fn sym2(a: &Mat2) -> Result<ProjectiveMap> {
    let d = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::DegenerateMatrix(d));
    }
    let k = 1.0 / d.sqrt();
    let a = [[a[0][0] * k, a[0][1] * k], [a[1][0] * k, a[1][1] * k]];
    let at = [[a[0][0], a[1][0]], [a[0][1], a[1][1]]];
    let basis: [Mat2; 3] = [[[1.0, 0.0], [0.0, -1.0]], [[0.0, 1.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, 1.0]]];
    let mut m = [[0.0; 3]; 3];
    for (j, x) in basis.iter().enumerate() {
        let y = mul2(&mul2(&a, x), &at);
        m[0][j] = 0.5 * (y[0][0] - y[1][1]);
        m[1][j] = y[0][1];
        m[2][j] = 0.5 * (y[0][0] + y[1][1]);
    }
    // det = (det A)^3 = 1 exactly; recomputing it would only add rounding
    Ok(ProjectiveMap::from_det1(m))
}

/// `max |gᵀ J g - J|` for the form `j`.
pub fn form_residual(g: &ProjectiveMap, j: &Mat3) -> f64 {
    let m = g.matrix();
    proj3::max_abs_diff(&proj3::mul(&proj3::mul(&proj3::transpose(m), j), m), j)
}

/// Rotation of the Klein disc about its centre.
pub fn rotation(theta: f64) -> ProjectiveMap {
    let (s, c) = theta.sin_cos();
    ProjectiveMap::new([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]).expect("rotation has det 1")
}

/// Hyperbolic translation by `d` along the x axis of the Klein disc.
pub fn boost_x(d: f64) -> ProjectiveMap {
    let (c, s) = (d.cosh(), d.sinh());
    ProjectiveMap::new([[c, 0.0, s], [0.0, 1.0, 0.0], [s, 0.0, c]]).expect("boost has det 1")
}

/// Hyperbolic translation by `d` along the y axis of the Klein disc.
pub fn boost_y(d: f64) -> ProjectiveMap {
    let (c, s) = (d.cosh(), d.sinh());
    ProjectiveMap::new([[1.0, 0.0, 0.0], [0.0, c, s], [0.0, s, c]]).expect("boost has det 1")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PantsParams {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
}

impl PantsParams {
    pub fn new(l1: f64, l2: f64, l3: f64) -> Result<Self> {
        if [l1, l2, l3].iter().all(|l| l.is_finite() && *l > 0.0) {
            Ok(PantsParams { l1, l2, l3 })
        } else {
            Err(Error::InvalidArgument(format!("pants lengths must be positive, got {l1}, {l2}, {l3}")))
        }
    }
}

/// SL(2,R) generators of a pair of pants with boundary holonomies `A`, `B`
/// and `(AB)⁻¹` of translation lengths `l1, l2, l3`: `A` is diagonal,
/// `tr B = 2cosh(l2/2)` and `tr AB = -2cosh(l3/2)`.
pub fn pants_matrices(p: &PantsParams) -> (Mat2, Mat2) {
    let al = (p.l1 / 2.0).exp();
    let t2 = 2.0 * (p.l2 / 2.0).cosh();
    let t3 = 2.0 * (p.l3 / 2.0).cosh();
    let x = (-t3 - t2 / al) / (al - 1.0 / al);
    let w = t2 - x;
    let a = [[al, 0.0], [0.0, 1.0 / al]];
    let b = [[x, 1.0], [x * w - 1.0, w]];
    (a, b)
}

/// Fuchsian pair of pants `⟨a, b⟩` whose boundary holonomies `a`, `b`,
/// `(ab)⁻¹` have Hilbert lengths `l1, l2, l3`.
pub fn fuchsian_pants(p: &PantsParams) -> Result<Representation> {
    let (a, b) = pants_matrices(p);
    Representation::new(default_names(2), vec![sym2(&a)?, sym2(&b)?], vec![], None)
}

/// Offset used by [`pants_amalgam`] and [`punctured_torus`] so that the
/// neutral fixed point of the splitting curve is a finite chart point.
pub const DEFAULT_OFFSET: f64 = 0.5;

/// Two copies of the pants glued along the boundary `a`: the second copy is
/// the mirror image across the axis of `a`, so `c = R b R⁻¹` with `R` the
/// reflection. The result is the free group `⟨a, b, c⟩` of a four-holed
/// sphere, split as `⟨a, b⟩ *_⟨a⟩ ⟨a, c⟩`. The whole picture is moved off
/// centre by a translation of length `offset` perpendicular to the axis of
/// `a`, towards the `c` side, which keeps every fixed point of `a` finite.
pub fn pants_amalgam(p: &PantsParams, offset: f64) -> Result<Representation> {
    let (a, b) = pants_matrices(p);
    let c = [[b[0][0], -b[0][1]], [-b[1][0], b[1][1]]];
    let images = vec![sym2(&a)?, sym2(&b)?, sym2(&c)?];
    let side = proj3::eigen_hyperbolic(&images[2])?.attracting().coords()[1].signum();
    let split = Splitting::Amalgam { gamma: Word::generator(0), left_gens: vec![0, 1], right_gens: vec![2] };
    let rep = Representation::new(default_names(3), images, vec![], Some(split))?;
    rep.conjugate_by(&boost_y(side * offset))
}

/// Fuchsian once-punctured torus with `tr a = tr b = 2√2`, `tr ab = 4`, so
/// `tr [a, b] = -2` in SL(2,R), moved off centre like [`pants_amalgam`].
pub fn punctured_torus(offset: f64) -> Result<Representation> {
    let r2 = 2f64.sqrt();
    let a = [[1.0 + r2, 0.0], [0.0, r2 - 1.0]];
    let b = [[r2, 1.0], [1.0, r2]];
    let rep = Representation::new(default_names(2), vec![sym2(&a)?, sym2(&b)?], vec![], None)?;
    rep.conjugate_by(&boost_y(offset))
}

/// Marks a rank-2 representation as an HNN extension along `a` with stable
/// letter `b`.
pub fn punctured_torus_hnn(base: Representation) -> Result<Representation> {
    if base.rank() != 2 {
        return Err(Error::InvalidRepresentation(format!("expected rank 2, got {}", base.rank())));
    }
    proj3::eigen_hyperbolic(&base.images()[0])
        .map_err(|_| Error::NotHyperbolic(format!("generator {} is not hyperbolic", base.gens()[0])))?;
    base.with_splitting(Some(Splitting::Hnn { gamma: Word::generator(0), left_gens: vec![0], stable_letter: 1 }))
}

/// Closed genus-2 surface group from the regular octagon with angles `π/4`,
/// sides labelled `a₁ b₁ a₁⁻¹ b₁⁻¹ a₂ b₂ a₂⁻¹ b₂⁻¹` counterclockwise.
/// The side pairing `g` for sides `j → k` rotates side `j` to angle `π`,
/// translates by twice the inradius and rotates to side `k`.
pub fn genus2_octagon() -> Representation {
    // cosh(inradius) = cot(π/8) = 1 + √2
    let r = (1.0 + 2f64.sqrt()).acosh();
    let mid = |i: usize| 2.0 * PI * i as f64 / 8.0;
    let pairing = |j: usize, k: usize| rotation(mid(k)) * boost_x(2.0 * r) * rotation(PI - mid(j));
    let gens: Vec<String> = ["a1", "b1", "a2", "b2"].iter().map(|s| s.to_string()).collect();
    // Side j carries the label and side j+2 its inverse. The a-generators
    // map side j+2 onto side j and the b-generators side j onto side j+2;
    // with these directions the vertex cycle closes up as the product of
    // the two commutators.
    let images = vec![pairing(2, 0), pairing(1, 3), pairing(6, 4), pairing(5, 7)];
    let w = |v: &[i32]| Word::new(v.to_vec());
    let relator = Word::commutator(&w(&[1]), &w(&[2])).concat(&Word::commutator(&w(&[3]), &w(&[4])));
    let gamma = Word::commutator(&w(&[1]), &w(&[2]));
    let split = Splitting::Amalgam { gamma, left_gens: vec![0, 1], right_gens: vec![2, 3] };
    Representation::new(gens, images, vec![relator], Some(split)).expect("octagon pairings satisfy the surface relation")
}

fn angle_to_plane(p: &[f64; 3], normal: &[f64; 3]) -> f64 {
    proj3::dot(&proj3::unit(p), &proj3::unit(normal)).abs().clamp(0.0, 1.0).asin()
}

fn angle_between(p: &[f64; 3], q: &[f64; 3]) -> f64 {
    let c = proj3::dot(&proj3::unit(p), &proj3::unit(q)).abs().clamp(0.0, 1.0);
    c.acos()
}

/// Two hyperbolic maps as a free group, certified by ping-pong on cones.
///
/// For each letter `x` of `{g, g⁻¹, h, h⁻¹}` let `X_x` be the cone of
/// angular radius `ε` around the attracting point of `x`. The pair is
/// certified if the cones are disjoint and `x(X_y) ⊂ X_x` whenever
/// `y ≠ x⁻¹`, checked on `16·2^depth` boundary directions of each cone and
/// for radii `ε = δ/2, δ/4, ..., δ/2^depth`, `δ` being the least angle between
/// an attracting point and a repelling plane it must avoid.
pub fn schottky_pair(g: ProjectiveMap, h: ProjectiveMap, depth: usize) -> Result<Representation> {
    let letters = [g, g.inverse(), h, h.inverse()];
    let inv_of = [1usize, 0, 3, 2];
    let mut attract = Vec::new();
    let mut plane_normal = Vec::new();
    for x in &letters {
        let sp = proj3::eigen_hyperbolic(x)?;
        attract.push(*sp.attracting().coords());
        // repelling plane of x: spanned by its neutral and repelling points
        plane_normal.push(proj3::cross(sp.neutral().coords(), sp.repelling().coords()));
    }
    let mut delta = f64::INFINITY;
    for x in 0..4 {
        for y in 0..4 {
            if y != inv_of[x] {
                delta = delta.min(angle_to_plane(&attract[y], &plane_normal[x]));
            }
            if y != x {
                delta = delta.min(0.5 * angle_between(&attract[x], &attract[y]));
            }
        }
    }
    if !(delta > 1e-9) {
        return Err(Error::PingPongFailed(format!("attracting points meet repelling planes (separation {delta:e})")));
    }
    let samples = 16usize << depth.min(12);
    for level in 1..=depth.max(1) {
        let eps = delta / (1u64 << level) as f64;
        if let Some(margin) = ping_pong_margin(&letters, &inv_of, &attract, eps, samples) {
            let mut rep = Representation::new(default_names(2), vec![g, h], vec![], None)?;
            rep.set_certificate(Certificate { depth, min_margin: margin });
            return Ok(rep);
        }
    }
    Err(Error::PingPongFailed(format!("no cone radius works down to depth {depth}")))
}

// Smallest relative slack `1 - angle/eps` over all checked images, or None
// if some image leaves its target cone.
fn ping_pong_margin(letters: &[ProjectiveMap; 4], inv_of: &[usize; 4], attract: &[[f64; 3]], eps: f64, samples: usize) -> Option<f64> {
    let mut margin = f64::INFINITY;
    for y in 0..4 {
        let axis = proj3::unit(&attract[y]);
        // orthonormal frame around the cone axis
        let helper = if axis[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let u = proj3::unit(&proj3::cross(&axis, &helper));
        let v = proj3::cross(&axis, &u);
        let (se, ce) = eps.sin_cos();
        for k in 0..samples {
            let th = 2.0 * PI * k as f64 / samples as f64;
            let (s, c) = th.sin_cos();
            let p: [f64; 3] = std::array::from_fn(|i| ce * axis[i] + se * (c * u[i] + s * v[i]));
            for x in 0..4 {
                if x == inv_of[y] {
                    continue;
                }
                let img = letters[x].apply_vec(&p);
                let ang = angle_between(&img, &attract[x]);
                margin = margin.min(1.0 - ang / eps);
            }
        }
    }
    (margin > 0.01).then_some(margin)
}

/// Chart point of a ProjPoint in the standard chart, if finite.
pub fn klein_coords(p: &ProjPoint) -> Option<[f64; 2]> {
    let c = p.coords();
    (c[2] != 0.0).then(|| [c[0] / c[2], c[1] / c[2]])
}
