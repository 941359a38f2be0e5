//! Quick-scale property checks across all modules, for `bulging verify`.

use bulging::bounds::{self, BoundParams};
use bulging::bulge::{self, o_s, tau_t};
use bulging::entropy::census;
use bulging::group::{Representation, Word};
use bulging::hilbert::{self, convex_hull, ConvexDomain, Vec2};
use bulging::limitset::limit_points;
use bulging::proj3::max_abs_diff;
use bulging::reps::{self, PantsParams, KLEIN_FORM};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Config;
use crate::Failure;

pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &'static str, pass: bool, detail: String) -> Check {
    Check { name, pass, detail }
}

fn in_disc(rng: &mut ChaCha8Rng, r: f64) -> Vec2 {
    loop {
        let p = [rng.gen_range(-r..r), rng.gen_range(-r..r)];
        if p[0].hypot(p[1]) <= r {
            return p;
        }
    }
}

fn klein_distance(x: &Vec2, y: &Vec2) -> f64 {
    let dot = x[0] * y[0] + x[1] * y[1];
    let n = |v: &Vec2| 1.0 - v[0] * v[0] - v[1] * v[1];
    ((1.0 - dot) / (n(x) * n(y)).sqrt()).max(1.0).acosh()
}

fn klein_agreement(cfg: &Config, rng: &mut ChaCha8Rng) -> Result<Check, Failure> {
    let dom = ConvexDomain::disc(cfg.verify.disc_sides)?;
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.verify.pairs {
        let (x, y) = (in_disc(rng, 0.9), in_disc(rng, 0.9));
        worst = worst.max((hilbert::distance(&dom, &x, &y)? - klein_distance(&x, &y)).abs());
    }
    Ok(check("hilbert: disc metric is hyperbolic", worst < cfg.verify.metric_tol, format!("max error {worst:.3e}")))
}

fn nested_monotone(cfg: &Config, rng: &mut ChaCha8Rng) -> Result<Check, Failure> {
    let mut violations = 0;
    for _ in 0..cfg.verify.pairs {
        let pts: Vec<Vec2> = (0..12).map(|_| in_disc(rng, 1.0)).collect();
        let outer = ConvexDomain::new(convex_hull(&pts))?;
        let c = outer.centroid();
        let shrink = rng.gen_range(0.3..0.95);
        let inner_vs: Vec<Vec2> =
            outer.vertices().iter().map(|v| [c[0] + shrink * (v[0] - c[0]), c[1] + shrink * (v[1] - c[1])]).collect();
        let inner = ConvexDomain::new(inner_vs)?;
        let t = |rng: &mut ChaCha8Rng| rng.gen_range(0.0..0.9) * shrink;
        let (a, b) = (t(rng), t(rng));
        let vs = outer.vertices();
        let (u, w) = (vs[rng.gen_range(0..vs.len())], vs[rng.gen_range(0..vs.len())]);
        let x = [c[0] + a * (u[0] - c[0]), c[1] + a * (u[1] - c[1])];
        let y = [c[0] + b * (w[0] - c[0]), c[1] + b * (w[1] - c[1])];
        if hilbert::distance(&inner, &x, &y)? < hilbert::distance(&outer, &x, &y)? - 1e-12 {
            violations += 1;
        }
    }
    Ok(check("hilbert: larger domain, smaller distance", violations == 0, format!("{violations} violations")))
}

fn amalgam(cfg: &Config) -> Result<Representation, Failure> {
    Ok(reps::pants_amalgam(&PantsParams::new(2.0, 2.0, 2.0)?, cfg.offset)?)
}

fn bulge_commutes(cfg: &Config, rng: &mut ChaCha8Rng) -> Result<Check, Failure> {
    let rep = amalgam(cfg)?;
    let frame = bulge::bulge_frame(&rep, &Word::generator(0))?;
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.verify.pairs {
        let (s, t) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let a = o_s(&frame, s) * tau_t(&frame, t);
        let b = tau_t(&frame, t) * o_s(&frame, s);
        worst = worst.max(max_abs_diff(a.matrix(), b.matrix()));
    }
    Ok(check("bulge: bulging and earthquake commute", worst < cfg.verify.algebra_tol, format!("max entry gap {worst:.3e}")))
}

fn seeds() -> Result<Check, Failure> {
    let rep = reps::genus2_octagon();
    let (m, _) = rep.evaluate_local(&rep.relators()[0])?;
    let residual = max_abs_diff(&m, &bulging::proj3::identity());
    let p = PantsParams::new(1.5, 2.0, 2.5)?;
    let pants = reps::fuchsian_pants(&p)?;
    let ab = Word::new(vec![1, 2]);
    let got = [pants.hilbert_length(&Word::generator(0))?, pants.hilbert_length(&Word::generator(1))?, pants.hilbert_length(&ab)?];
    let gap = got.iter().zip([1.5, 2.0, 2.5]).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max);
    Ok(check(
        "reps: octagon relator and pants lengths",
        residual < 1e-8 && gap < 1e-9,
        format!("relator residual {residual:.1e}, length gap {gap:.1e}"),
    ))
}

fn pure_side_invariance(cfg: &Config) -> Result<Check, Failure> {
    let rep = amalgam(cfg)?;
    let left = rep.splitting().expect("demo is split").left_gens().to_vec();
    let pure = |r: &Representation| -> Result<Vec<f64>, Failure> {
        Ok(census(r, cfg.verify.census_word_len, true)?
            .entries
            .iter()
            .filter(|e| e.word.letters().iter().all(|l| left.contains(&(l.unsigned_abs() as usize - 1))))
            .map(|e| e.hilbert_length)
            .collect())
    };
    let a = pure(&rep)?;
    let mut worst: f64 = 0.0;
    for s in [-5.0, 5.0] {
        let b = pure(&bulge::deform(&rep, 0.0, s)?)?;
        if a.len() != b.len() {
            return Ok(check("entropy: pure-side spectrum fixed by bulging", false, "census sizes differ".into()));
        }
        worst = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(worst, f64::max);
    }
    Ok(check("entropy: pure-side spectrum fixed by bulging", worst < 1e-9, format!("{} words, max change {worst:.1e}", a.len())))
}

fn conic_limit_set(cfg: &Config) -> Result<Check, Failure> {
    let rep = reps::fuchsian_pants(&PantsParams::new(2.0, 2.0, 2.0)?)?;
    let ls = limit_points(&rep, cfg.verify.limit_depth)?;
    let worst = ls
        .points
        .iter()
        .map(|p| {
            let v = p.coords();
            let q: f64 = (0..3).map(|i| KLEIN_FORM[i][i] * v[i] * v[i]).sum();
            q.abs() / (v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
        })
        .fold(0.0, f64::max);
    Ok(check("limitset: Fuchsian limit set on the conic", worst < 1e-7, format!("{} points, residual {worst:.1e}", ls.points.len())))
}

fn bound_calculus() -> Result<Check, Failure> {
    let p = BoundParams::new(2, 10.0, 1.0, 0.0)?;
    let mut mismatches = 0;
    for m in 1..=4usize {
        for k in 0..=8usize {
            let t = 10.0 * m as f64 + k as f64 + 0.5;
            let direct: BigUint = (0..=k).map(|j| bounds::ordered_partitions(m, j)).sum();
            if bounds::f_bound(m, t, &p)? != direct {
                mismatches += 1;
            }
        }
    }
    let (exact, stirling) = bounds::stirling_check(1000, 1000);
    let rel = (exact - stirling).abs() / exact;
    Ok(check(
        "bounds: partition sums and Stirling",
        mismatches == 0 && rel < 0.01,
        format!("{mismatches} mismatches, Stirling gap {:.2}%", 100.0 * rel),
    ))
}

/// Runs every check; a configured representation must also load.
pub fn run(cfg: &Config) -> Result<Vec<Check>, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::new();
    if cfg.representation.is_some() {
        let rep = crate::config::resolve_rep(None, crate::config::Split::Auto, cfg)?;
        out.push(check("config: representation loads", true, format!("rank {}", rep.rank())));
    }
    out.push(klein_agreement(cfg, &mut rng)?);
    out.push(nested_monotone(cfg, &mut rng)?);
    out.push(bulge_commutes(cfg, &mut rng)?);
    out.push(seeds()?);
    out.push(pure_side_invariance(cfg)?);
    out.push(conic_limit_set(cfg)?);
    out.push(bound_calculus()?);
    Ok(out)
}
