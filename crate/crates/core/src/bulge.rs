//! Bulging and earthquake deformations along a splitting curve.
//!
//! In the eigenbasis `(γ₊, γ₀, γ₋)` of the curve's holonomy the bulge is
//! `O_s = diag(e^{-s/3}, e^{2s/3}, e^{-s/3})` and the earthquake
//! `τ_t = diag(e^t, 1, e^{-t})`. Both commute with the holonomy, so
//! conjugating one side of an amalgam (or multiplying the stable letter of
//! an HNN extension) by `τ_t O_s` gives a new representation of the same
//! group.

use serde::Serialize;

use crate::group::{Representation, Splitting, Word};
use crate::proj3::{self, HyperbolicSpectrum, Mat3, ProjectiveMap};
use crate::{Error, Result};

/// Largest accepted `|s|` and `|t|`.
pub const MAX_PARAMETER: f64 = 25.0;
/// Maximum off-diagonal residual of the diagonalized holonomy, relative to
/// its largest eigenvalue.
pub const FRAME_RESIDUAL: f64 = 1e-8;

/// Eigenbasis of a hyperbolic holonomy, columns ordered by decreasing
/// eigenvalue and scaled so the basis matrix has determinant one.
#[derive(Clone, Debug)]
pub struct BulgeFrame {
    basis: Mat3,
    basis_inv: Mat3,
    spectrum: HyperbolicSpectrum,
}

impl BulgeFrame {
    /// Frame of a single hyperbolic map.
    pub fn from_map(m: &ProjectiveMap) -> Result<Self> {
        Self::from_pair(m, &m.inverse())
    }

    pub fn from_pair(m: &ProjectiveMap, inv: &ProjectiveMap) -> Result<Self> {
        let spectrum = proj3::eigen_hyperbolic_with_inverse(m, inv)?;
        let cols = [*spectrum.attracting().coords(), *spectrum.neutral().coords(), *spectrum.repelling().coords()];
        let mut p = proj3::from_columns(&cols[0], &cols[1], &cols[2]);
        let d = proj3::det(&p);
        if !(d.abs() > 1e-12) {
            return Err(Error::NotHyperbolic("eigenvectors are nearly dependent".into()));
        }
        if d < 0.0 {
            for row in p.iter_mut() {
                row[1] = -row[1];
            }
        }
        let p = proj3::scale(&p, 1.0 / d.abs().cbrt());
        let pinv = proj3::inverse(&p).ok_or(Error::DegenerateMatrix(d))?;
        let frame = BulgeFrame { basis: p, basis_inv: pinv, spectrum };
        let r = frame.diagonal_residual(m);
        if !(r < FRAME_RESIDUAL) {
            return Err(Error::NotHyperbolic(format!("eigenframe residual {r:e}")));
        }
        Ok(frame)
    }

    pub fn basis(&self) -> ProjectiveMap {
        ProjectiveMap::from_det1(self.basis)
    }

    pub fn spectrum(&self) -> &HyperbolicSpectrum {
        &self.spectrum
    }

    /// `P⁻¹ g P`.
    pub fn in_frame(&self, g: &ProjectiveMap) -> Mat3 {
        proj3::mul(&proj3::mul(&self.basis_inv, g.matrix()), &self.basis)
    }

    /// `P m P⁻¹`.
    pub fn from_frame(&self, m: &Mat3) -> Mat3 {
        proj3::mul(&proj3::mul(&self.basis, m), &self.basis_inv)
    }

    /// Largest off-diagonal entry of `P⁻¹ m P` relative to `λ₁`.
    pub fn diagonal_residual(&self, m: &ProjectiveMap) -> f64 {
        let d = self.in_frame(m);
        let mut off: f64 = 0.0;
        for (i, row) in d.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if i != j {
                    off = off.max(x.abs());
                }
            }
        }
        off / self.spectrum.lambda[0]
    }

    fn diagonal_map(&self, d: [f64; 3]) -> ProjectiveMap {
        ProjectiveMap::from_det1(self.from_frame(&proj3::diag(d[0], d[1], d[2])))
    }
}

/// Frame of `ρ(gamma)`.
pub fn bulge_frame(rep: &Representation, gamma: &Word) -> Result<BulgeFrame> {
    let (m, inv) = rep.evaluate_pair(gamma)?;
    BulgeFrame::from_pair(&m, &inv)
}

/// In-frame diagonal of `τ_t O_s`.
pub fn bulge_diagonal(t: f64, s: f64) -> [f64; 3] {
    [(t - s / 3.0).exp(), (2.0 * s / 3.0).exp(), (-t - s / 3.0).exp()]
}

/// `P diag(e^{-s/3}, e^{2s/3}, e^{-s/3}) P⁻¹`.
pub fn o_s(frame: &BulgeFrame, s: f64) -> ProjectiveMap {
    frame.diagonal_map(bulge_diagonal(0.0, s))
}

/// `P diag(e^t, 1, e^{-t}) P⁻¹`.
pub fn tau_t(frame: &BulgeFrame, t: f64) -> ProjectiveMap {
    frame.diagonal_map(bulge_diagonal(t, 0.0))
}

/// `τ_t O_s`.
pub fn bulge_map(frame: &BulgeFrame, t: f64, s: f64) -> ProjectiveMap {
    frame.diagonal_map(bulge_diagonal(t, s))
}

/// Which side of the curve is moved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Side {
    /// Conjugate the right-hand generators by `X = τ_t O_s` (amalgam), or
    /// replace the stable letter `b` by `X b` (HNN).
    #[default]
    Right,
    /// The same representation conjugated by `X⁻¹`: left generators become
    /// `X⁻¹ g X` (amalgam), or `b` becomes `b X` (HNN).
    Left,
}

fn check_parameter(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x.abs() <= MAX_PARAMETER {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("|{name}| = {x} exceeds {MAX_PARAMETER}")))
    }
}

/// `ρ_{t,s}`: the bulged and twisted representation, moving the right side.
pub fn deform(rep: &Representation, t: f64, s: f64) -> Result<Representation> {
    deform_side(rep, t, s, Side::Right)
}

pub fn deform_side(rep: &Representation, t: f64, s: f64, side: Side) -> Result<Representation> {
    let frame = local_frame(rep)?;
    deform_in_frame(rep, &frame, t, s, side)
}

/// Frame of the splitting curve computed in the representation's working
/// frame (see [`Representation::local_images`]).
pub fn local_frame(rep: &Representation) -> Result<BulgeFrame> {
    let split = rep.splitting().ok_or(Error::NoSplitting)?;
    let (g, gi) = rep.evaluate_local(split.gamma())?;
    BulgeFrame::from_pair(&ProjectiveMap::from_det1(g), &ProjectiveMap::from_det1(gi))
}

/// [`deform_side`] with a precomputed [`local_frame`].
///
/// The result uses the curve's eigenbasis as working frame, so the
/// deformation is a diagonal sandwich (or a row or column scaling for the
/// stable letter) of the stored matrices and never cancels.
pub fn deform_in_frame(rep: &Representation, frame: &BulgeFrame, t: f64, s: f64, side: Side) -> Result<Representation> {
    check_parameter("s", s)?;
    check_parameter("t", t)?;
    let split = rep.splitting().ok_or(Error::NoSplitting)?;
    if s == 0.0 && t == 0.0 {
        return Ok(rep.clone());
    }
    let d = bulge_diagonal(t, s);
    let dinv = [1.0 / d[0], 1.0 / d[1], 1.0 / d[2]];
    let (local, local_inv) = rep.local_images();
    let (p, pinv) = (&frame.basis, &frame.basis_inv);
    let to_frame = |m: &Mat3| proj3::mul(&proj3::mul(pinv, m), p);
    let mut images: Vec<Mat3> = local.iter().map(to_frame).collect();
    let mut inverses: Vec<Mat3> = local_inv.iter().map(to_frame).collect();
    let sandwich = |m: &mut Mat3, l: &[f64; 3], r: &[f64; 3]| {
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x *= l[i] * r[j];
            }
        }
    };
    let one = [1.0; 3];
    match (split, side) {
        (Splitting::Amalgam { right_gens, .. }, Side::Right) => {
            for &g in right_gens {
                sandwich(&mut images[g], &d, &dinv);
                sandwich(&mut inverses[g], &d, &dinv);
            }
        }
        (Splitting::Amalgam { left_gens, .. }, Side::Left) => {
            for &g in left_gens {
                sandwich(&mut images[g], &dinv, &d);
                sandwich(&mut inverses[g], &dinv, &d);
            }
        }
        (Splitting::Hnn { stable_letter: b, .. }, Side::Right) => {
            // b -> X b, b⁻¹ -> b⁻¹ X⁻¹
            sandwich(&mut images[*b], &d, &one);
            sandwich(&mut inverses[*b], &one, &dinv);
        }
        (Splitting::Hnn { stable_letter: b, .. }, Side::Left) => {
            // b -> b X, b⁻¹ -> X⁻¹ b⁻¹
            sandwich(&mut images[*b], &one, &d);
            sandwich(&mut inverses[*b], &dinv, &one);
        }
    }
    let (w, winv) = rep.frame();
    rep.replace_local(proj3::mul(w, p), proj3::mul(pinv, winv), images, inverses)
}

/// One row of a [`TraceProbe`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceSample {
    pub s: f64,
    pub trace: f64,
    pub hilbert_length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceProbe {
    pub samples: Vec<TraceSample>,
    /// Least-squares slope of `log|trace|` against `s` over the upper half
    /// of the grid.
    pub rate: f64,
}

/// Least-squares slope and intercept of `y` on `x`, with `r²`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    (slope, my - slope * mx, r2)
}

/// Trace and Hilbert length of `ρ_s(αβ)` along an `s` grid (`t = 0`).
///
/// For an amalgam `α` must be a word in the left generators and `β` in the
/// right generators (letters of the curve are allowed on both sides). For
/// an HNN extension `β` must contain the stable letter and `α` must not.
pub fn trace_probe(rep: &Representation, alpha: &Word, beta: &Word, s_grid: &[f64]) -> Result<TraceProbe> {
    let split = rep.splitting().ok_or(Error::NoSplitting)?;
    let uses = |w: &Word, allowed: &[usize]| w.letters().iter().all(|l| allowed.contains(&(l.unsigned_abs() as usize - 1)));
    let gamma_gens: Vec<usize> = split.gamma().letters().iter().map(|l| l.unsigned_abs() as usize - 1).collect();
    match split {
        Splitting::Amalgam { left_gens, right_gens, .. } => {
            let mut right = right_gens.clone();
            right.extend(&gamma_gens);
            if !uses(alpha, left_gens) || !uses(beta, &right) {
                return Err(Error::InvalidArgument("alpha must use left generators and beta right generators".into()));
            }
        }
        Splitting::Hnn { stable_letter, .. } => {
            let has_b = |w: &Word| w.letters().iter().any(|l| l.unsigned_abs() as usize - 1 == *stable_letter);
            if has_b(alpha) || !has_b(beta) {
                return Err(Error::InvalidArgument("beta must contain the stable letter and alpha must not".into()));
            }
        }
    }
    if s_grid.len() < 2 {
        return Err(Error::InsufficientData("trace probe needs at least two grid points".into()));
    }
    let frame = local_frame(rep)?;
    let word = alpha.concat(beta);
    let samples = s_grid
        .iter()
        .map(|&s| {
            let r = deform_in_frame(rep, &frame, 0.0, s, Side::Right)?;
            Ok(TraceSample { s, trace: r.trace(&word)?, hilbert_length: r.hilbert_length(&word)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sorted: Vec<&TraceSample> = samples.iter().collect();
    sorted.sort_by(|a, b| a.s.total_cmp(&b.s));
    let top = &sorted[sorted.len() / 2..];
    let xs: Vec<f64> = top.iter().map(|r| r.s).collect();
    let ys: Vec<f64> = top.iter().map(|r| r.trace.abs().ln()).collect();
    let rate = if top.len() >= 2 { linear_fit(&xs, &ys).0 } else { f64::NAN };
    Ok(TraceProbe { samples, rate })
}
