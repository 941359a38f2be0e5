//! Hilbert geometry on convex projective domains, bulging and earthquake
//! deformations of `SL(3,R)` holonomy representations, and topological
//! entropy estimation.
//!
//! Modules, bottom-up:
//!
//! - [`proj3`]: 3x3 projective linear algebra (normalization, hyperbolic
//!   spectra, cross-ratios, Hilbert translation lengths).
//! - [`hilbert`]: polygonal convex domains with the Hilbert distance, the
//!   Finsler norm and the induced measure.
//! - [`group`]: words, conjugacy-class enumeration, representations and
//!   Cayley-ball orbit enumeration.
//! - [`reps`]: concrete Fuchsian and Schottky seeds.
//! - [`bulge`]: the `O_s` / `tau_t` deformation engine.
//! - [`limitset`]: invariant-domain approximation from fixed points, charts
//!   and SVG rendering.
//! - [`entropy`]: length census, counting function and growth-rate fits.
//! - [`bounds`]: exact big-integer evaluation of the crossing-segment
//!   counting bound.

pub mod bounds;
pub mod bulge;
pub mod entropy;
mod error;
pub mod group;
pub mod hilbert;
pub mod limitset;
pub mod proj3;
pub mod reps;

pub use error::{Error, Result};

/// Formats a float with 17 significant digits, the textual format used by
/// every CSV writer in this crate.
pub fn fmt_f64(x: f64) -> String {
    format!("{:.16e}", x)
}

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
