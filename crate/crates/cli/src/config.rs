//! Run configuration. Every tolerance and budget the commands use lives
//! here with its default; a config file only needs the fields it changes.

use std::path::Path;

use bulging::entropy::SweepConfig;
use bulging::group::Representation;
use bulging::reps::{self, PantsParams};
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Seed for the randomized checks of `verify`.
    pub seed: u64,
    /// Representation used when `--rep` is absent: a spec string such as
    /// `pants:2,2,2`, or an inline representation object.
    pub representation: Option<RepSource>,
    /// Translation that keeps the splitting curve's neutral point finite.
    pub offset: f64,
    pub census: CensusConfig,
    pub sweep: SweepConfig,
    pub bounds: BoundsConfig,
    pub render: RenderConfig,
    pub verify: VerifyConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 20240611,
            representation: None,
            offset: reps::DEFAULT_OFFSET,
            census: CensusConfig::default(),
            sweep: SweepConfig::default(),
            bounds: BoundsConfig::default(),
            render: RenderConfig::default(),
            verify: VerifyConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CensusConfig {
    pub max_word_len: usize,
    pub oriented: bool,
    pub window_fraction: f64,
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig { max_word_len: 9, oriented: true, window_fraction: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsConfig {
    /// Doubling grid points ending at `--t-max`.
    pub grid_points: usize,
    /// Largest accepted change between the last two grid values.
    pub settle_tol: f64,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        BoundsConfig { grid_points: 6, settle_tol: bulging::bounds::SETTLE_TOL }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderConfig {
    pub depth: usize,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig { depth: 5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Random pairs per metric check.
    pub pairs: usize,
    /// Sides of the polygon standing in for the disc.
    pub disc_sides: usize,
    pub metric_tol: f64,
    pub algebra_tol: f64,
    pub census_word_len: usize,
    pub limit_depth: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { pairs: 200, disc_sides: 512, metric_tol: 1e-4, algebra_tol: 1e-10, census_word_len: 6, limit_depth: 4 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RepSource {
    Spec(String),
    Inline(Box<serde_json::Value>),
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Config, Failure> {
        let Some(path) = path else { return Ok(Config::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
    }

    /// Canonical JSON of the effective configuration, the input to the
    /// manifest's config hash.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

/// How the representation is split for bulging.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Split {
    /// Whatever the source provides (none for pants and torus).
    Auto,
    None,
    /// Two pants glued along `a`, bulging the mirror copy.
    AmalgamDemo,
    /// HNN extension along `a` with stable letter `b` (torus only).
    Hnn,
}

/// Builds a representation from `pants:l1,l2,l3`, `torus`, `genus2` or
/// `file:<path.json>`.
pub fn load_rep(spec: &str, split: Split, offset: f64) -> Result<Representation, Failure> {
    let bad_split = || Failure::Config(format!("split {split:?} does not apply to {spec}"));
    let rep = if let Some(ls) = spec.strip_prefix("pants:") {
        let l: Vec<f64> = ls
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| Failure::Config(format!("bad pants lengths {ls:?}: {e}")))?;
        if l.len() != 3 {
            return Err(Failure::Config(format!("pants needs three lengths, got {}", l.len())));
        }
        let p = PantsParams::new(l[0], l[1], l[2]).map_err(|e| Failure::Config(e.to_string()))?;
        match split {
            Split::Auto | Split::None => reps::fuchsian_pants(&p)?,
            Split::AmalgamDemo => reps::pants_amalgam(&p, offset)?,
            Split::Hnn => return Err(bad_split()),
        }
    } else if spec == "torus" {
        let base = reps::punctured_torus(offset)?;
        match split {
            Split::Auto | Split::None => base,
            Split::Hnn => reps::punctured_torus_hnn(base)?,
            Split::AmalgamDemo => return Err(bad_split()),
        }
    } else if spec == "genus2" {
        let rep = reps::genus2_octagon();
        match split {
            Split::Auto => rep,
            Split::None => rep.with_splitting(None)?,
            _ => return Err(bad_split()),
        }
    } else if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{path}: {e}")))?;
        let rep: Representation = serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{path}: {e}")))?;
        match split {
            Split::Auto => rep,
            Split::None => rep.with_splitting(None)?,
            _ => return Err(bad_split()),
        }
    } else {
        return Err(Failure::Config(format!("unknown representation {spec:?}; expected pants:l1,l2,l3, torus, genus2 or file:<path>")));
    };
    rep.check_generators()?;
    Ok(rep)
}

/// The representation named on the command line, else the one in the
/// config.
pub fn resolve_rep(flag: Option<&str>, split: Split, cfg: &Config) -> Result<Representation, Failure> {
    match (flag, &cfg.representation) {
        (Some(spec), _) => load_rep(spec, split, cfg.offset),
        (None, Some(RepSource::Spec(spec))) => load_rep(spec, split, cfg.offset),
        (None, Some(RepSource::Inline(v))) => {
            let rep: Representation =
                serde_json::from_value((**v).clone()).map_err(|e| Failure::Config(format!("representation: {e}")))?;
            rep.check_generators()?;
            Ok(rep)
        }
        (None, None) => Err(Failure::Config("no representation: pass --rep or set \"representation\" in the config".into())),
    }
}

/// `a:b:step` (inclusive of `b` up to rounding) or a comma list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, Failure> {
    let bad = |why: String| Failure::Config(format!("bad grid {s:?}: {why}"));
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| bad(e.to_string()));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(step > 0.0) || !(b >= a) || !a.is_finite() || !b.is_finite() {
                return Err(bad("need start <= stop and a positive step".into()));
            }
            let n = ((b - a) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| a + i as f64 * step).collect())
        }
        [list] => list.split(',').map(num).collect(),
        _ => Err(bad("expected a:b:step or a comma list".into())),
    }
}
