//! Length census of closed geodesics, the counting function `N(T)`, growth
//! rate fits, and the orbital-counting estimator of the critical exponent.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bulge::{bulge_frame, linear_fit};
use crate::group::{enumerate_classes, orbit_layers, Representation, Word, DEFAULT_ORBIT_BUDGET};
use crate::hilbert::{self, region_hausdorff, ConvexDomain, Vec2};
use crate::limitset::{chart_coords, deformed_hulls, DeformedHulls};
use crate::proj3::{self, Vec3};
use crate::{fmt_f64, Error, Result};

/// Fraction of the fitted range dropped at the top, where long words are
/// under-counted.
pub const TRUNCATION_FRACTION: f64 = 0.1;
pub const MIN_FIT_POINTS: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct CensusEntry {
    /// Class representative (free groups) or shortest word (otherwise).
    pub word: Word,
    pub hilbert_length: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CensusKind {
    /// One entry per conjugacy class.
    Classes,
    /// One entry per group element.
    Elements,
}

#[derive(Clone, Debug)]
pub struct Census {
    /// Sorted by length, ties by word.
    pub entries: Vec<CensusEntry>,
    pub max_word_len: usize,
    pub oriented: bool,
    pub kind: CensusKind,
    /// Below this length the census is taken to be complete: the shortest
    /// length among entries of the maximal word length.
    pub horizon: f64,
    /// Entries dropped because the element was not hyperbolic.
    pub skipped: usize,
}

impl Census {
    /// A census from bare lengths (tests, external data). The horizon is the
    /// largest length.
    pub fn from_lengths(mut lengths: Vec<f64>) -> Result<Census> {
        if lengths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::InvalidArgument("lengths must be positive and finite".into()));
        }
        lengths.sort_by(f64::total_cmp);
        let horizon = lengths.last().copied().unwrap_or(0.0);
        let entries = lengths.into_iter().map(|l| CensusEntry { word: Word::empty(), hilbert_length: l }).collect();
        Ok(Census { entries, max_word_len: 0, oriented: true, kind: CensusKind::Classes, horizon, skipped: 0 })
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.hilbert_length).collect()
    }

    /// `T,count` rows, one per distinct length.
    pub fn counts_csv(&self) -> String {
        let mut s = String::from("T,count\n");
        let ls = self.lengths();
        for (t, n) in step_points(&ls) {
            s.push_str(&format!("{},{}\n", fmt_f64(t), n));
        }
        s
    }
}

/// Hilbert length of every conjugacy class up to `max_word_len` (free
/// groups) or of every element of the Cayley ball (groups with relators,
/// where the length of an element is that of its cyclic reduction).
pub fn census(rep: &Representation, max_word_len: usize, oriented: bool) -> Result<Census> {
    if max_word_len == 0 {
        return Err(Error::InvalidArgument("max_word_len must be positive".into()));
    }
    let (words, kind) = if rep.is_free() {
        let classes = enumerate_classes(rep.rank(), max_word_len, !oriented)?;
        (classes.into_iter().map(|c| c.rep().clone()).collect::<Vec<_>>(), CensusKind::Classes)
    } else {
        let mut words: Vec<Word> = Vec::new();
        let mut layer_words: Vec<Word> = Vec::new();
        orbit_layers(rep, max_word_len, DEFAULT_ORBIT_BUDGET, |k, layer| {
            let next: Vec<Word> = if k == 0 {
                vec![Word::empty()]
            } else {
                layer
                    .iter()
                    .map(|n| {
                        let mut l = layer_words[n.parent as usize].letters().to_vec();
                        l.push(n.letter);
                        Word::new(l)
                    })
                    .collect()
            };
            if k > 0 {
                words.extend(next.iter().cloned());
            }
            layer_words = next;
            Ok(())
        })?;
        (words, CensusKind::Elements)
    };
    let measured: Vec<Option<f64>> = words
        .par_iter()
        .map(|w| rep.hilbert_length(&w.cyclically_reduce()).ok().filter(|l| *l > 0.0))
        .collect();
    let mut skipped = 0;
    let mut entries = Vec::with_capacity(words.len());
    for (w, l) in words.into_iter().zip(measured) {
        match l {
            Some(l) => entries.push(CensusEntry { word: w, hilbert_length: l }),
            None => skipped += 1,
        }
    }
    entries.sort_by(|a, b| a.hilbert_length.total_cmp(&b.hilbert_length).then_with(|| a.word.cmp(&b.word)));
    let horizon = entries
        .iter()
        .filter(|e| e.word.len() == max_word_len)
        .map(|e| e.hilbert_length)
        .fold(f64::INFINITY, f64::min);
    let horizon = if horizon.is_finite() { horizon } else { entries.last().map_or(0.0, |e| e.hilbert_length) };
    Ok(Census { entries, max_word_len, oriented, kind, horizon, skipped })
}

/// Number of entries with length at most `t`.
pub fn counting_function(c: &Census, t: f64) -> usize {
    c.entries.partition_point(|e| e.hilbert_length <= t)
}

/// Lengths closer than this (relative) are the same length: equal
/// lengths of distinct classes or elements only agree to rounding.
pub const LENGTH_TIE: f64 = 1e-9;

// (T, N(T)) at each distinct value of a sorted sample, merging runs of
// values within LENGTH_TIE of the run's first value.
fn step_points(sorted: &[f64]) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for (i, &t) in sorted.iter().enumerate() {
        match out.last_mut() {
            Some(last) if t - last.0 <= LENGTH_TIE * last.0.abs().max(1.0) => last.1 = i + 1,
            _ => out.push((t, i + 1)),
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub h: f64,
    /// Standard error of the least-squares slope.
    pub stderr: f64,
    pub fit_window: (f64, f64),
    pub r_squared: f64,
    pub n_points: usize,
}

/// Slope of `log N(T)` against `T` over the top `window_fraction` of
/// `[lo, hi]`, without the last [`TRUNCATION_FRACTION`] of it. `sorted` is
/// the full sorted sample, so `N` counts everything below each point.
pub fn fit_growth(sorted: &[f64], lo: f64, hi: f64, window_fraction: f64) -> Result<EntropyEstimate> {
    if !(window_fraction > TRUNCATION_FRACTION && window_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "window fraction must lie in ({TRUNCATION_FRACTION}, 1), got {window_fraction}"
        )));
    }
    let range = hi - lo;
    if !(range > 0.0) {
        return Err(Error::InsufficientData(format!("empty length range [{lo}, {hi}]")));
    }
    let (a, b) = (hi - window_fraction * range, hi - TRUNCATION_FRACTION * range);
    let pts: Vec<(f64, usize)> = step_points(sorted).into_iter().filter(|(t, _)| *t >= a && *t <= b).collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData(format!(
            "{} distinct lengths in the window [{a}, {b}], need {MIN_FIT_POINTS}",
            pts.len()
        )));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| (p.1 as f64).ln()).collect();
    let (slope, intercept, r2) = linear_fit(&xs, &ys);
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = (ssr / (n - 2.0) / sxx).sqrt();
    Ok(EntropyEstimate { h: slope.max(0.0), stderr, fit_window: (a, b), r_squared: r2, n_points: pts.len() })
}

/// Growth rate of the census over `[shortest length, horizon]`.
pub fn fit_entropy(c: &Census, window_fraction: f64) -> Result<EntropyEstimate> {
    let ls = c.lengths();
    let lo = *ls.first().ok_or_else(|| Error::InsufficientData("empty census".into()))?;
    fit_growth(&ls, lo, c.horizon, window_fraction)
}

/// Orbit of a basepoint, as Hilbert distances `d(o, g o)` for every `g`
/// in the Cayley ball (the identity included).
#[derive(Clone, Debug, Serialize)]
pub struct OrbitDistances {
    /// Sorted; `inf` for points that left the approximating domain.
    pub distances: Vec<f64>,
    /// Smallest distance on the outermost sphere. Every element beyond the
    /// ball is at least this far when the sphere minima keep growing with
    /// word length (see `minima_monotone`), so counts below it are
    /// complete.
    pub horizon: f64,
    /// Unconditional completeness radius: the horizon minus the largest
    /// displacement of a generator. Usually far too small to fit over once
    /// generators move the basepoint by very different amounts.
    pub safe_horizon: f64,
    /// Whether the smallest distance per sphere was nondecreasing in the
    /// word length over the computed ball.
    pub minima_monotone: bool,
    pub escaped: usize,
}

/// Distances `d(o, g o)` in `dom`. The point `g o` is found as `g⁻¹`
/// applied letter by letter, which is the same set of distances (the maps
/// are isometries) and keeps each step a single well-conditioned
/// matrix-vector product. Points outside `dom`, which is an inner
/// approximation, count as infinitely far.
pub fn orbit_distances(rep: &Representation, dom: &ConvexDomain, basepoint: &Vec2, radius: usize) -> Result<OrbitDistances> {
    if !dom.contains(basepoint) {
        return Err(Error::PointOutsideDomain(basepoint[0], basepoint[1]));
    }
    let (w, winv) = rep.frame();
    let (w, winv) = (*w, *winv);
    let o = proj3::unit(&proj3::apply(&winv, &dom.from_chart(basepoint)));
    let mut distances = vec![0.0];
    let mut prev: Vec<Vec3> = Vec::new();
    let mut minima: Vec<f64> = Vec::new();
    let mut max_step: f64 = 0.0;
    let mut escaped = 0;
    let measure = |v: &Vec3| -> f64 {
        match dom.to_chart(&proj3::apply(&w, v)) {
            Some(y) if dom.contains(&y) => hilbert::distance(dom, basepoint, &y).unwrap_or(f64::INFINITY),
            _ => f64::INFINITY,
        }
    };
    orbit_layers(rep, radius, DEFAULT_ORBIT_BUDGET, |k, layer| {
        if k == 0 {
            prev = vec![o];
            return Ok(());
        }
        let pts: Vec<Vec3> = layer
            .par_iter()
            .map(|n| {
                let (_, gi) = rep.letter_local(n.letter).expect("letters come from the generator range");
                proj3::unit(&proj3::apply(gi, &prev[n.parent as usize]))
            })
            .collect();
        let ds: Vec<f64> = pts.par_iter().map(measure).collect();
        escaped += ds.iter().filter(|d| d.is_infinite()).count();
        if k == 1 {
            max_step = ds.iter().copied().fold(0.0, f64::max);
        }
        minima.push(ds.iter().copied().fold(f64::INFINITY, f64::min));
        distances.extend(ds);
        prev = pts;
        Ok(())
    })?;
    distances.sort_by(f64::total_cmp);
    let horizon = *minima.last().expect("radius is at least one");
    let minima_monotone = minima.windows(2).all(|p| p[0] <= p[1]);
    Ok(OrbitDistances { distances, horizon, safe_horizon: horizon - max_step, minima_monotone, escaped })
}

/// Critical exponent estimate: growth rate of `#{g : d(o, g o) <= R}`
/// over `[shortest nonzero distance, horizon]`.
pub fn orbit_exponent(rep: &Representation, dom: &ConvexDomain, basepoint: &Vec2, radius: usize, window_fraction: f64) -> Result<EntropyEstimate> {
    let od = orbit_distances(rep, dom, basepoint, radius)?;
    fit_orbit(&od, window_fraction)
}

pub fn fit_orbit(od: &OrbitDistances, window_fraction: f64) -> Result<EntropyEstimate> {
    let lo = od.distances.iter().copied().find(|d| *d > 0.0).unwrap_or(0.0);
    if !(od.horizon > lo) {
        return Err(Error::InsufficientData(format!("orbit horizon {} below the first distance {lo}", od.horizon)));
    }
    fit_growth(&od.distances, lo, od.horizon, window_fraction)
}

/// Estimator settings for [`sweep`]. All fields have defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub census_word_len: usize,
    pub oriented: bool,
    pub window_fraction: f64,
    pub orbit_radius: usize,
    pub hull_depth: usize,
    /// Words for the trace and length columns, in the generator names.
    pub alpha: String,
    pub beta: String,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            census_word_len: 9,
            oriented: true,
            window_fraction: 0.5,
            orbit_radius: 7,
            hull_depth: 5,
            alpha: "b".into(),
            beta: "c".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub s: f64,
    pub t: f64,
    pub h_census: f64,
    pub h_census_stderr: f64,
    pub h_orbit: f64,
    pub h_orbit_stderr: f64,
    pub trace_ab: f64,
    pub length_ab: f64,
    /// Region Hausdorff distance between the hull at this `s` and at the
    /// first grid point, in a shared chart.
    pub hausdorff_drift: f64,
}

pub const SWEEP_HEADER: &str = "s,t,h_census,h_census_stderr,h_orbit,h_orbit_stderr,trace_ab,length_ab,hausdorff_drift";

/// CSV with [`SWEEP_HEADER`], LF line endings and 17 significant digits.
/// Failed estimates are written as `NaN`.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(SWEEP_HEADER);
    s.push('\n');
    for r in rows {
        let cols = [r.s, r.t, r.h_census, r.h_census_stderr, r.h_orbit, r.h_orbit_stderr, r.trace_ab, r.length_ab, r.hausdorff_drift];
        s.push_str(&cols.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(","));
        s.push('\n');
    }
    s
}

/// Both entropy estimators, the trace probe columns and the domain drift
/// along an `s` grid. Estimator failures become `NaN` in their columns;
/// structural errors (no splitting, bad words) abort.
pub fn sweep(rep: &Representation, s_grid: &[f64], t: f64, cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    let split = rep.splitting().ok_or(Error::NoSplitting)?;
    if s_grid.is_empty() {
        return Err(Error::InvalidArgument("empty s grid".into()));
    }
    let ab = rep.parse_word(&cfg.alpha)?.concat(&rep.parse_word(&cfg.beta)?);
    let frame = bulge_frame(rep, split.gamma())?;
    let DeformedHulls { deformed, hulls, chart } = deformed_hulls(rep, s_grid, t, cfg.hull_depth)?;
    // the axis of the curve is preserved by every deformation
    let sp = frame.spectrum();
    let (p, q) = (chart_coords(&chart, sp.attracting())?, chart_coords(&chart, sp.repelling())?);
    let base = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
    let nan = f64::NAN;
    let mut rows = Vec::with_capacity(s_grid.len());
    for ((&s, r), dom) in s_grid.iter().zip(&deformed).zip(&hulls) {
        let hc = census(r, cfg.census_word_len, cfg.oriented).and_then(|c| fit_entropy(&c, cfg.window_fraction)).ok();
        let ho = orbit_exponent(r, dom, &base, cfg.orbit_radius, cfg.window_fraction).ok();
        rows.push(SweepRow {
            s,
            t,
            h_census: hc.map_or(nan, |e| e.h),
            h_census_stderr: hc.map_or(nan, |e| e.stderr),
            h_orbit: ho.map_or(nan, |e| e.h),
            h_orbit_stderr: ho.map_or(nan, |e| e.stderr),
            trace_ab: r.trace(&ab).unwrap_or(nan),
            length_ab: r.hilbert_length(&ab).unwrap_or(nan),
            hausdorff_drift: region_hausdorff(dom, &hulls[0])?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bulge::deform;
    use crate::group::Splitting;
    use crate::proj3::ProjectiveMap;
    use crate::reps::{self, PantsParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rank_one() -> Representation {
        let g = ProjectiveMap::new(proj3::diag(2f64.exp(), 1.0, (-2f64).exp())).unwrap();
        Representation::new(vec!["a".into()], vec![g], vec![], None).unwrap()
    }

    #[test]
    fn rank_one_census() {
        let c = census(&rank_one(), 3, true).unwrap();
        let ls = c.lengths();
        let want = [2.0, 2.0, 4.0, 4.0, 6.0, 6.0];
        assert_eq!(ls.len(), 6);
        for (a, b) in ls.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(counting_function(&c, 1.0), 0);
        assert_eq!(counting_function(&c, 4.0), 4);
        assert_eq!(counting_function(&c, 6.0), 6);
    }

    #[test]
    fn rank_one_growth_vanishes() {
        let rep = rank_one();
        let h40 = fit_entropy(&census(&rep, 40, true).unwrap(), 0.5).unwrap().h;
        let h200 = fit_entropy(&census(&rep, 200, true).unwrap(), 0.5).unwrap().h;
        assert!(h200 < h40 && h200 < 0.02, "{h40} {h200}");
    }

    #[test]
    fn planted_slope() {
        let ls: Vec<f64> = (2..=20000).map(|k| (k as f64).ln() / 0.7).collect();
        let e = fit_entropy(&Census::from_lengths(ls).unwrap(), 0.5).unwrap();
        assert!((e.h - 0.7).abs() < 0.01, "{e:?}");
        assert!(e.r_squared > 0.999);
    }

    #[test]
    fn too_few_points() {
        let c = Census::from_lengths(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(fit_entropy(&c, 0.5), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn counting_is_monotone() {
        let c = census(&reps::fuchsian_pants(&PantsParams::new(2.0, 2.0, 2.0).unwrap()).unwrap(), 6, true).unwrap();
        let mut prev = 0;
        for k in 0..200 {
            let n = counting_function(&c, k as f64 * 0.1);
            assert!(n >= prev);
            prev = n;
        }
        assert_eq!(counting_function(&c, c.entries.last().unwrap().hilbert_length), c.entries.len());
    }

    #[test]
    fn pants_census_matches_two_by_two_lengths() {
        let p = PantsParams::new(2.0, 2.0, 2.0).unwrap();
        let rep = reps::fuchsian_pants(&p).unwrap();
        let (a, b) = reps::pants_matrices(&p);
        let c = census(&rep, 9, true).unwrap();
        let mul = |x: &reps::Mat2, y: &reps::Mat2| {
            [[x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]], [x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]]]
        };
        let inv = |x: &reps::Mat2| [[x[1][1], -x[0][1]], [-x[1][0], x[0][0]]];
        let gens = [a, b, inv(&a), inv(&b)];
        let mut flat = Vec::new();
        for e in &c.entries {
            let mut m = [[1.0, 0.0], [0.0, 1.0]];
            for &l in e.word.letters() {
                let i = (l.unsigned_abs() - 1) as usize + if l < 0 { 2 } else { 0 };
                m = mul(&m, &gens[i]);
            }
            let tr = (m[0][0] + m[1][1]).abs();
            // sym2 squares the eigenvalues: twice the log of the 2x2 one
            let two_by_two = 2.0 * (0.5 * tr).acosh();
            assert!((e.hilbert_length - two_by_two).abs() < 1e-9 * two_by_two.max(1.0));
            flat.push(two_by_two);
        }
        let h3 = fit_entropy(&c, 0.7).unwrap().h;
        let mut c2 = Census::from_lengths(flat).unwrap();
        c2.horizon = c.horizon;
        let h2 = fit_entropy(&c2, 0.7).unwrap().h;
        assert!((h3 - h2).abs() < 0.02);
    }

    #[test]
    fn thinning_is_stable() {
        let p = PantsParams::new(2.0, 2.0, 2.0).unwrap();
        let c = census(&reps::pants_amalgam(&p, reps::DEFAULT_OFFSET).unwrap(), 9, true).unwrap();
        let full = fit_entropy(&c, 0.7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let kept: Vec<f64> = c.lengths().into_iter().filter(|_| rng.gen_bool(0.5)).collect();
        let mut half = Census::from_lengths(kept).unwrap();
        half.horizon = c.horizon;
        let e = fit_entropy(&half, 0.7).unwrap();
        assert!((e.h - full.h).abs() < 3.0 * full.stderr.max(e.stderr), "{full:?} {e:?}");
    }

    #[test]
    fn left_subcensus_fixed_by_bulging() {
        let rep = reps::pants_amalgam(&PantsParams::new(2.0, 2.0, 2.0).unwrap(), reps::DEFAULT_OFFSET).unwrap();
        let left: Vec<usize> = match rep.splitting().unwrap() {
            Splitting::Amalgam { left_gens, .. } => left_gens.clone(),
            _ => unreachable!(),
        };
        let pure = |c: &Census| -> Vec<f64> {
            c.entries
                .iter()
                .filter(|e| e.word.letters().iter().all(|l| left.contains(&(l.unsigned_abs() as usize - 1))))
                .map(|e| e.hilbert_length)
                .collect()
        };
        let c0 = census(&rep, 6, true).unwrap();
        let c1 = census(&deform(&rep, 0.0, 8.0).unwrap(), 6, true).unwrap();
        let (a, b) = (pure(&c0), pure(&c1));
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn orbit_distances_of_fuchsian_pants() {
        // orbit points of a Fuchsian group: Hilbert distance in the disc is
        // the hyperbolic distance, which the SO(2,1) form computes exactly
        let rep = reps::fuchsian_pants(&PantsParams::new(2.0, 2.0, 2.0).unwrap()).unwrap();
        let dom = ConvexDomain::disc(1 << 16).unwrap();
        let od = orbit_distances(&rep, &dom, &[0.0, 0.0], 3).unwrap();
        let mut want: Vec<f64> = crate::group::orbit_ball(&rep, 3)
            .unwrap()
            .iter()
            .map(|e| {
                let v = e.map.apply_vec(&[0.0, 0.0, 1.0]);
                v[2].acosh()
            })
            .collect();
        want.sort_by(f64::total_cmp);
        assert_eq!(od.distances.len(), want.len());
        // the polygon's sag of 6e-10 resolves distances up to about 8
        let near = want.iter().filter(|d| **d < 7.0).count();
        assert!(near > 20);
        for (a, b) in od.distances.iter().zip(&want).take(near) {
            assert!((a - b).abs() < 1e-3 * b.max(1.0), "{a} {b}");
        }
        assert!(od.escaped <= want.len() - near);
    }

    #[test]
    fn sweep_zero_row_is_undeformed() {
        let rep = reps::pants_amalgam(&PantsParams::new(2.0, 2.0, 2.0).unwrap(), reps::DEFAULT_OFFSET).unwrap();
        let cfg = SweepConfig { census_word_len: 9, orbit_radius: 5, hull_depth: 4, ..Default::default() };
        let rows = sweep(&rep, &[0.0, 2.0], 0.0, &cfg).unwrap();
        let c = fit_entropy(&census(&rep, 9, true).unwrap(), 0.5).unwrap();
        assert_eq!(rows[0].h_census, c.h);
        assert_eq!(rows[0].hausdorff_drift, 0.0);
        assert!(rows[1].hausdorff_drift > 0.0);
        let csv = sweep_csv(&rows);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with(SWEEP_HEADER));
    }
}
