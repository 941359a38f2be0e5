//! Words in a free generating set, conjugacy-class representatives, and
//! representations of finitely presented groups into SL(3,R).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use crate::proj3::{self, Mat3, ProjectiveMap};
use crate::{Error, Result};

/// Default cap on enumerated classes.
pub const DEFAULT_CLASS_BUDGET: usize = 100_000_000;
/// Default cap on orbit-ball elements (memory bound, roughly 300 bytes each).
pub const DEFAULT_ORBIT_BUDGET: usize = 12_000_000;
/// Relative tolerance under which two matrices are treated as the same
/// group element.
pub const MATRIX_QUANTUM: f64 = 1e-7;
/// Tolerance for relators evaluating to the identity.
pub const RELATOR_TOL: f64 = 1e-8;

/// Letters are signed generator indices starting at 1: `k` is generator
/// `k-1`, `-k` its inverse.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<i32>);

fn letter_key(l: i32) -> u32 {
    2 * (l.unsigned_abs() - 1) + u32::from(l < 0)
}

impl Ord for Word {
    /// Lexicographic with `a < a⁻¹ < b < b⁻¹ < ...`; a proper prefix sorts first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.iter().map(|&l| letter_key(l)).cmp(other.0.iter().map(|&l| letter_key(l)))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Word {
    pub fn new(letters: Vec<i32>) -> Self {
        assert!(letters.iter().all(|&l| l != 0), "letter 0 is not a generator");
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// The single-letter word for generator `index` (0-based).
    pub fn generator(index: usize) -> Self {
        Word(vec![index as i32 + 1])
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reduce(&self) -> Word {
        let mut out: Vec<i32> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != -w[1])
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&l| -l).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn pow(&self, n: usize) -> Word {
        Word(self.0.repeat(n))
    }

    /// `[u, v] = u v u⁻¹ v⁻¹`.
    pub fn commutator(u: &Word, v: &Word) -> Word {
        u.concat(v).concat(&u.inverse()).concat(&v.inverse())
    }

    /// Free reduction followed by stripping cancelling end letters.
    pub fn cyclically_reduce(&self) -> Word {
        let r = self.reduce().0;
        let (mut i, mut j) = (0, r.len());
        while j - i >= 2 && r[i] == -r[j - 1] {
            i += 1;
            j -= 1;
        }
        Word(r[i..j].to_vec())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_reduced() && (self.0.len() < 2 || self.0[0] != -self.0[self.0.len() - 1])
    }

    /// Largest generator index referenced, plus one.
    pub fn rank_used(&self) -> usize {
        self.0.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// Render with the given generator names, inverses as `⁻¹`.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> WordDisplay<'a> {
        WordDisplay { word: self, names }
    }

    /// Parse a word such as `"ab⁻¹a"`, `"a1 b1^-1"` or `"a*b^{-1}"`.
    /// Generator names are matched greedily (longest first). The empty
    /// string and `"1"` parse as the empty word.
    pub fn parse(s: &str, names: &[String]) -> Result<Word> {
        let mut out = Vec::new();
        let mut rest = s.trim();
        if rest == "1" {
            return Ok(Word::empty());
        }
        let mut order: Vec<usize> = (0..names.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(names[i].len()));
        while !rest.is_empty() {
            rest = rest.trim_start_matches(|c: char| c.is_whitespace() || c == '*' || c == '·' || c == '.');
            if rest.is_empty() {
                break;
            }
            let Some(&g) = order.iter().find(|&&i| !names[i].is_empty() && rest.starts_with(names[i].as_str())) else {
                return Err(Error::UnknownGenerator(rest.chars().take(8).collect()));
            };
            rest = &rest[names[g].len()..];
            let mut letter = g as i32 + 1;
            for suffix in ["⁻¹", "^-1", "^{-1}", "'"] {
                if let Some(r) = rest.strip_prefix(suffix) {
                    rest = r;
                    letter = -letter;
                    break;
                }
            }
            out.push(letter);
        }
        Ok(Word(out))
    }
}

/// Names `a, b, c, ...` for up to 26 generators, `x1, x2, ...` beyond.
pub fn default_names(n: usize) -> Vec<String> {
    if n <= 26 {
        (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    names: &'a [String],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return f.write_str("1");
        }
        for &l in &self.word.0 {
            let i = l.unsigned_abs() as usize - 1;
            match self.names.get(i) {
                Some(n) => f.write_str(n)?,
                None => write!(f, "x{}", i + 1)?,
            }
            if l < 0 {
                f.write_str("⁻¹")?;
            }
        }
        Ok(())
    }
}

/// A conjugacy class of the free group, stored by its canonical
/// representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConjClass {
    rep: Word,
}

impl ConjClass {
    pub fn rep(&self) -> &Word {
        &self.rep
    }
}

fn min_rotation(w: &[i32]) -> Vec<i32> {
    let n = w.len();
    let key = |r: usize| (0..n).map(move |i| letter_key(w[(r + i) % n]));
    let best = (1..n).fold(0, |b, r| if key(r).cmp(key(b)) == Ordering::Less { r } else { b });
    (0..n).map(|i| w[(best + i) % n]).collect()
}

/// Canonical representative: cyclically reduce, take the least rotation,
/// and with `unoriented` also the least over the inverse word.
pub fn canonical_class(w: &Word, unoriented: bool) -> Result<ConjClass> {
    let c = w.cyclically_reduce();
    if c.is_empty() {
        return Err(Error::EmptyWord);
    }
    let mut rep = Word(min_rotation(&c.0));
    if unoriented {
        let inv = Word(min_rotation(&c.inverse().0));
        if inv < rep {
            rep = inv;
        }
    }
    Ok(ConjClass { rep })
}

/// One representative per conjugacy class of the free group of rank
/// `n_gens` with cyclically reduced length at most `max_len`, sorted.
pub fn enumerate_classes(n_gens: usize, max_len: usize, unoriented: bool) -> Result<Vec<ConjClass>> {
    enumerate_classes_with_budget(n_gens, max_len, unoriented, DEFAULT_CLASS_BUDGET)
}

pub fn enumerate_classes_with_budget(n_gens: usize, max_len: usize, unoriented: bool, budget: usize) -> Result<Vec<ConjClass>> {
    if n_gens == 0 || max_len == 0 {
        return Err(Error::InvalidArgument("n_gens and max_len must be at least 1".into()));
    }
    let count = AtomicUsize::new(0);
    let letters: Vec<i32> = (1..=n_gens as i32).flat_map(|g| [g, -g]).collect();
    let parts: Vec<Result<Vec<ConjClass>>> = letters
        .par_iter()
        .map(|&first| {
            let mut found = Vec::new();
            let mut word = vec![first];
            dfs_classes(&mut word, &letters, max_len, unoriented, &count, budget, &mut found)?;
            Ok(found)
        })
        .collect();
    let mut all = Vec::new();
    for p in parts {
        all.extend(p?);
    }
    all.sort();
    Ok(all)
}

// Every rotation-minimal word starts with its least letter, so only
// extensions by letters not below the first are explored.
fn dfs_classes(
    word: &mut Vec<i32>,
    letters: &[i32],
    max_len: usize,
    unoriented: bool,
    count: &AtomicUsize,
    budget: usize,
    out: &mut Vec<ConjClass>,
) -> Result<()> {
    let w = Word(word.clone());
    if w.is_cyclically_reduced() && min_rotation(word) == *word {
        let keep = !unoriented || {
            let inv = min_rotation(&w.inverse().0);
            Word(inv) >= w
        };
        if keep {
            if count.fetch_add(1, AtomicOrdering::Relaxed) >= budget {
                return Err(Error::BudgetExceeded(budget));
            }
            out.push(ConjClass { rep: w });
        }
    }
    if word.len() == max_len {
        return Ok(());
    }
    let first = letter_key(word[0]);
    let last = *word.last().unwrap();
    for &l in letters {
        if l == -last || letter_key(l) < first {
            continue;
        }
        word.push(l);
        dfs_classes(word, letters, max_len, unoriented, count, budget, out)?;
        word.pop();
    }
    Ok(())
}

/// Annotation telling the deformation engine how the group splits along
/// the curve `gamma`.
#[derive(Clone, Debug, PartialEq)]
pub enum Splitting {
    /// `Γ = Γ₁ *_⟨γ⟩ Γ₂`; generators in `right_gens` get conjugated.
    Amalgam { gamma: Word, left_gens: Vec<usize>, right_gens: Vec<usize> },
    /// `Γ = ⟨Γ₁, b⟩` with `b` conjugating `γ` into `Γ₁`; `b` gets multiplied.
    Hnn { gamma: Word, left_gens: Vec<usize>, stable_letter: usize },
}

impl Splitting {
    pub fn gamma(&self) -> &Word {
        match self {
            Splitting::Amalgam { gamma, .. } | Splitting::Hnn { gamma, .. } => gamma,
        }
    }

    pub fn left_gens(&self) -> &[usize] {
        match self {
            Splitting::Amalgam { left_gens, .. } | Splitting::Hnn { left_gens, .. } => left_gens,
        }
    }

    /// Generators on the moving side.
    pub fn moving_gens(&self) -> Vec<usize> {
        match self {
            Splitting::Amalgam { right_gens, .. } => right_gens.clone(),
            Splitting::Hnn { stable_letter, .. } => vec![*stable_letter],
        }
    }
}

/// Ping-pong certificate attached to Schottky constructions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub depth: usize,
    pub min_margin: f64,
}

/// Generator images in SL(3,R), relators, and an optional splitting.
///
/// Images are held in a working frame `W`: the stored matrices are
/// `W⁻¹ g W`. Deformations along a curve pick `W` as the curve's eigenbasis,
/// where they act by diagonal scaling, so products of deformed generators
/// keep full relative precision. Conjugation-invariant quantities (traces,
/// lengths, spectra) are read off the stored products directly; ambient
/// matrices are formed once per product.
#[derive(Clone, Debug)]
pub struct Representation {
    gens: Vec<String>,
    images: Vec<ProjectiveMap>,
    local: Vec<Mat3>,
    local_inv: Vec<Mat3>,
    frame: Mat3,
    frame_inv: Mat3,
    relators: Vec<Word>,
    splitting: Option<Splitting>,
    certificate: Option<Certificate>,
}

impl PartialEq for Representation {
    fn eq(&self, other: &Self) -> bool {
        self.gens == other.gens
            && self.images == other.images
            && self.relators == other.relators
            && self.splitting == other.splitting
            && self.certificate == other.certificate
    }
}

fn is_identity(m: &Mat3) -> bool {
    *m == proj3::identity()
}

impl Representation {
    /// Validates generator names, relators (identity within 1e-8) and the
    /// splitting (declared generators, hyperbolic `gamma`).
    pub fn new(gens: Vec<String>, images: Vec<ProjectiveMap>, relators: Vec<Word>, splitting: Option<Splitting>) -> Result<Self> {
        let local: Vec<Mat3> = images.iter().map(|m| *m.matrix()).collect();
        let local_inv = images.iter().map(|m| *m.inverse().matrix()).collect();
        Self::from_local(gens, proj3::identity(), proj3::identity(), local, local_inv, relators, splitting)
    }

    /// Builds from matrices in the working frame `frame` (with inverse
    /// `frame_inv`).
    pub(crate) fn from_local(
        gens: Vec<String>,
        frame: Mat3,
        frame_inv: Mat3,
        local: Vec<Mat3>,
        local_inv: Vec<Mat3>,
        relators: Vec<Word>,
        splitting: Option<Splitting>,
    ) -> Result<Self> {
        if gens.is_empty() || gens.len() != local.len() || local_inv.len() != local.len() {
            return Err(Error::InvalidRepresentation("one image per generator required".into()));
        }
        for (i, n) in gens.iter().enumerate() {
            if n.is_empty() || gens[..i].contains(n) || n.contains(char::is_whitespace) {
                return Err(Error::InvalidRepresentation(format!("bad or duplicate generator name {n:?}")));
            }
        }
        let to_ambient = |m: &Mat3| {
            if is_identity(&frame) {
                ProjectiveMap::from_det1(*m)
            } else {
                ProjectiveMap::from_det1(proj3::mul(&proj3::mul(&frame, m), &frame_inv))
            }
        };
        let images = local.iter().map(to_ambient).collect();
        let rep = Representation { gens, images, local, local_inv, frame, frame_inv, relators, splitting, certificate: None };
        for r in &rep.relators {
            let (m, _) = rep.evaluate_local(r)?;
            let res = proj3::max_abs_diff(&m, &proj3::identity());
            if !(res < RELATOR_TOL) {
                return Err(Error::InvalidRepresentation(format!(
                    "relator {} has residual {res:e}",
                    r.display_with(&rep.gens)
                )));
            }
        }
        if let Some(sp) = &rep.splitting {
            let n = rep.gens.len();
            let mut idx = sp.left_gens().to_vec();
            idx.extend(sp.moving_gens());
            if idx.iter().any(|&i| i >= n) {
                return Err(Error::UnknownGenerator(format!("splitting references generator index beyond {n}")));
            }
            let (g, gi) = rep.evaluate_local(sp.gamma())?;
            proj3::eigen_hyperbolic_with_inverse(&ProjectiveMap::from_det1(g), &ProjectiveMap::from_det1(gi))?;
        }
        Ok(rep)
    }

    /// Fails with the name of the first generator whose image is not
    /// hyperbolic.
    pub fn check_generators(&self) -> Result<()> {
        for (n, m) in self.gens.iter().zip(&self.images) {
            proj3::eigen_hyperbolic(m).map_err(|e| match e {
                Error::NotHyperbolic(why) => Error::NotHyperbolic(format!("generator {n}: {why}")),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn gens(&self) -> &[String] {
        &self.gens
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    /// Generator images in ambient coordinates.
    pub fn images(&self) -> &[ProjectiveMap] {
        &self.images
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn splitting(&self) -> Option<&Splitting> {
        self.splitting.as_ref()
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        self.certificate.as_ref()
    }

    pub fn is_free(&self) -> bool {
        self.relators.is_empty()
    }

    /// Working frame `W` and its inverse.
    pub fn frame(&self) -> (&Mat3, &Mat3) {
        (&self.frame, &self.frame_inv)
    }

    /// Generator images `W⁻¹ g W` and their inverses in the working frame.
    pub fn local_images(&self) -> (&[Mat3], &[Mat3]) {
        (&self.local, &self.local_inv)
    }

    /// `W m W⁻¹`.
    pub fn to_ambient(&self, m: &Mat3) -> ProjectiveMap {
        if is_identity(&self.frame) {
            ProjectiveMap::from_det1(*m)
        } else {
            ProjectiveMap::from_det1(proj3::mul(&proj3::mul(&self.frame, m), &self.frame_inv))
        }
    }

    pub fn with_splitting(self, splitting: Option<Splitting>) -> Result<Self> {
        let cert = self.certificate;
        let mut r = Self::from_local(self.gens, self.frame, self.frame_inv, self.local, self.local_inv, self.relators, splitting)?;
        r.certificate = cert;
        Ok(r)
    }

    pub(crate) fn set_certificate(&mut self, c: Certificate) {
        self.certificate = Some(c);
    }

    pub fn parse_word(&self, s: &str) -> Result<Word> {
        Word::parse(s, &self.gens)
    }

    pub fn word_string(&self, w: &Word) -> String {
        w.display_with(&self.gens).to_string()
    }

    pub(crate) fn letter_local(&self, l: i32) -> Result<(&Mat3, &Mat3)> {
        let i = l.unsigned_abs() as usize - 1;
        if i >= self.local.len() {
            return Err(Error::UnknownGenerator(format!("generator index {}", i + 1)));
        }
        Ok(if l > 0 { (&self.local[i], &self.local_inv[i]) } else { (&self.local_inv[i], &self.local[i]) })
    }

    /// Image of a word and of its inverse in the working frame, each built
    /// as a plain product. Products are not renormalized: each factor has
    /// determinant one, and dividing by a cube root of a computed
    /// determinant would only add cancellation error for long words.
    pub fn evaluate_local(&self, w: &Word) -> Result<(Mat3, Mat3)> {
        let mut m = proj3::identity();
        let mut inv = proj3::identity();
        for &l in &w.0 {
            let (g, gi) = self.letter_local(l)?;
            m = proj3::mul(&m, g);
            inv = proj3::mul(gi, &inv);
        }
        Ok((m, inv))
    }

    /// Image of a word.
    pub fn evaluate(&self, w: &Word) -> Result<ProjectiveMap> {
        Ok(self.to_ambient(&self.evaluate_local(w)?.0))
    }

    /// Image of a word and of its inverse.
    pub fn evaluate_pair(&self, w: &Word) -> Result<(ProjectiveMap, ProjectiveMap)> {
        let (m, inv) = self.evaluate_local(w)?;
        Ok((self.to_ambient(&m), self.to_ambient(&inv)))
    }

    /// Hilbert length of the image of `w`, computed in the working frame.
    pub fn hilbert_length(&self, w: &Word) -> Result<f64> {
        let (m, inv) = self.evaluate_local(w)?;
        proj3::hilbert_length_with_inverse(&ProjectiveMap::from_det1(m), &ProjectiveMap::from_det1(inv))
    }

    /// Trace of the image of `w`.
    pub fn trace(&self, w: &Word) -> Result<f64> {
        Ok(proj3::trace(&self.evaluate_local(w)?.0))
    }

    /// Copy with new working-frame data, keeping names, relators, splitting
    /// and certificate; revalidates.
    pub(crate) fn replace_local(&self, frame: Mat3, frame_inv: Mat3, local: Vec<Mat3>, local_inv: Vec<Mat3>) -> Result<Self> {
        let mut r = Self::from_local(self.gens.clone(), frame, frame_inv, local, local_inv, self.relators.clone(), self.splitting.clone())?;
        r.certificate = self.certificate.clone();
        Ok(r)
    }

    /// Conjugate every generator by `t`: `g ↦ t g t⁻¹`. Only the working
    /// frame changes.
    pub fn conjugate_by(&self, t: &ProjectiveMap) -> Result<Self> {
        let frame = proj3::mul(t.matrix(), &self.frame);
        let frame_inv = proj3::mul(&self.frame_inv, t.inverse().matrix());
        self.replace_local(frame, frame_inv, self.local.clone(), self.local_inv.clone())
    }

    /// The same representation with the identity as working frame.
    pub fn flattened(&self) -> Result<Self> {
        let local = self.images.iter().map(|m| *m.matrix()).collect();
        let local_inv = self.local_inv.iter().map(|m| *self.to_ambient(m).matrix()).collect();
        self.replace_local(proj3::identity(), proj3::identity(), local, local_inv)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawSplitting {
    Amalgam { gamma: String, left_gens: Vec<String>, right_gens: Vec<String> },
    Hnn { gamma: String, left_gens: Vec<String>, stable_letter: String },
}

#[derive(Serialize, Deserialize)]
struct RawRepresentation {
    gens: Vec<String>,
    images: Vec<ProjectiveMap>,
    #[serde(default)]
    relators: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    splitting: Option<RawSplitting>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    certificate: Option<Certificate>,
    /// Working frame and generator images in it, when not the identity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    frame: Option<ProjectiveMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    local_images: Option<Vec<ProjectiveMap>>,
}

impl Serialize for Representation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let name = |i: &usize| self.gens[*i].clone();
        let raw = RawRepresentation {
            gens: self.gens.clone(),
            images: self.images.clone(),
            relators: self.relators.iter().map(|r| self.word_string(r)).collect(),
            splitting: self.splitting.as_ref().map(|sp| match sp {
                Splitting::Amalgam { gamma, left_gens, right_gens } => RawSplitting::Amalgam {
                    gamma: self.word_string(gamma),
                    left_gens: left_gens.iter().map(name).collect(),
                    right_gens: right_gens.iter().map(name).collect(),
                },
                Splitting::Hnn { gamma, left_gens, stable_letter } => RawSplitting::Hnn {
                    gamma: self.word_string(gamma),
                    left_gens: left_gens.iter().map(name).collect(),
                    stable_letter: name(stable_letter),
                },
            }),
            certificate: self.certificate.clone(),
            frame: (!is_identity(&self.frame)).then(|| ProjectiveMap::from_det1(self.frame)),
            local_images: (!is_identity(&self.frame)).then(|| self.local.iter().map(|m| ProjectiveMap::from_det1(*m)).collect()),
        };
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Representation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawRepresentation::deserialize(d)?;
        Representation::from_raw(raw).map_err(serde::de::Error::custom)
    }
}

impl Representation {
    fn from_raw(raw: RawRepresentation) -> Result<Self> {
        let gens = raw.gens;
        let idx = |n: &String| gens.iter().position(|g| g == n).ok_or_else(|| Error::UnknownGenerator(n.clone()));
        let idxs = |v: &[String]| v.iter().map(idx).collect::<Result<Vec<_>>>();
        let relators = raw.relators.iter().map(|r| Word::parse(r, &gens)).collect::<Result<Vec<_>>>()?;
        let splitting = match raw.splitting {
            None => None,
            Some(RawSplitting::Amalgam { gamma, left_gens, right_gens }) => Some(Splitting::Amalgam {
                gamma: Word::parse(&gamma, &gens)?,
                left_gens: idxs(&left_gens)?,
                right_gens: idxs(&right_gens)?,
            }),
            Some(RawSplitting::Hnn { gamma, left_gens, stable_letter }) => Some(Splitting::Hnn {
                gamma: Word::parse(&gamma, &gens)?,
                left_gens: idxs(&left_gens)?,
                stable_letter: idx(&stable_letter)?,
            }),
        };
        let mut rep = match (raw.frame, raw.local_images) {
            (Some(f), Some(local)) => {
                let local_inv = local.iter().map(|m| *m.inverse().matrix()).collect();
                let local = local.iter().map(|m| *m.matrix()).collect();
                Representation::from_local(gens.clone(), *f.matrix(), *f.inverse().matrix(), local, local_inv, relators, splitting)?
            }
            _ => Representation::new(gens.clone(), raw.images, relators, splitting)?,
        };
        rep.certificate = raw.certificate;
        Ok(rep)
    }
}

/// One group element reached by [`orbit_layers`], in the working frame of
/// the representation.
#[derive(Clone, Debug)]
pub struct OrbitNode {
    pub map: Mat3,
    pub inverse: Mat3,
    /// Index of the parent in the previous layer (meaningless in layer 0).
    pub parent: u32,
    /// Last letter of the shortest word (0 for the identity).
    pub letter: i32,
}

/// Element of [`orbit_ball`]: a shortest word and its image.
#[derive(Clone, Debug)]
pub struct OrbitElement {
    pub word: Word,
    pub map: ProjectiveMap,
    pub inverse: ProjectiveMap,
}

type BucketKey = (i64, i64);

struct LayerIndex {
    buckets: HashMap<BucketKey, Vec<u32>>,
}

// Bucket on two entries of the matrix scaled by its largest entry; the
// bucket width exceeds the match tolerance so equal elements always land in
// the same or an adjacent bucket.
fn bucket_coords(m: &Mat3) -> (f64, f64, f64) {
    let s = proj3::max_abs(m).max(1.0);
    let q = 10.0 * MATRIX_QUANTUM * s;
    (m[0][0] / q, m[1][2] / q, s)
}

fn same_element(a: &Mat3, b: &Mat3, scale: f64) -> bool {
    proj3::max_abs_diff(a, b) <= MATRIX_QUANTUM * scale
}

impl LayerIndex {
    fn new() -> Self {
        LayerIndex { buckets: HashMap::new() }
    }

    fn insert(&mut self, m: &Mat3, idx: u32) {
        let (x, y, _) = bucket_coords(m);
        self.buckets.entry((x.floor() as i64, y.floor() as i64)).or_default().push(idx);
    }

    fn find(&self, m: &Mat3, layer: &[OrbitNode]) -> bool {
        let (x, y, s) = bucket_coords(m);
        let (bx, by) = (x.floor() as i64, y.floor() as i64);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(v) = self.buckets.get(&(bx + dx, by + dy)) {
                    if v.iter().any(|&i| same_element(m, &layer[i as usize].map, s)) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

/// Breadth-first enumeration of the Cayley ball by word length, calling
/// `visit(k, layer_k)` on each sphere in turn (layer 0 is the identity).
/// Group elements are deduplicated by matrix comparison against the two
/// previous spheres and the sphere under construction, which suffices
/// because a generator moves an element by at most one sphere. Only three
/// spheres are held in memory. Returns the total element count.
pub fn orbit_layers<F>(rep: &Representation, radius: usize, budget: usize, mut visit: F) -> Result<usize>
where
    F: FnMut(usize, &[OrbitNode]) -> Result<()>,
{
    if radius == 0 {
        return Err(Error::InvalidArgument("radius must be at least 1".into()));
    }
    let letters: Vec<i32> = (1..=rep.rank() as i32).flat_map(|g| [g, -g]).collect();
    let root = OrbitNode { map: proj3::identity(), inverse: proj3::identity(), parent: 0, letter: 0 };
    let mut prev: Vec<OrbitNode> = Vec::new();
    let mut prev_idx = LayerIndex::new();
    let mut cur = vec![root];
    let mut cur_idx = LayerIndex::new();
    cur_idx.insert(&cur[0].map, 0);
    let mut total = 1;
    visit(0, &cur)?;
    let free = rep.is_free();
    for k in 1..=radius {
        let candidates: Vec<OrbitNode> = cur
            .par_iter()
            .enumerate()
            .flat_map_iter(|(pi, node)| {
                letters.iter().filter(move |&&l| l != -node.letter).map(move |&l| {
                    let (g, gi) = rep.letter_local(l).expect("letters come from the generator range");
                    OrbitNode {
                        map: proj3::mul(&node.map, g),
                        inverse: proj3::mul(gi, &node.inverse),
                        parent: pi as u32,
                        letter: l,
                    }
                })
            })
            .collect();
        let mut next: Vec<OrbitNode> = Vec::new();
        let mut next_idx = LayerIndex::new();
        if free {
            next = candidates;
        } else {
            let seen: Vec<bool> = candidates
                .par_iter()
                .map(|c| prev_idx.find(&c.map, &prev) || cur_idx.find(&c.map, &cur))
                .collect();
            for (c, s) in candidates.into_iter().zip(seen) {
                if s || next_idx.find(&c.map, &next) {
                    continue;
                }
                next_idx.insert(&c.map, next.len() as u32);
                next.push(c);
            }
        }
        total += next.len();
        if total > budget {
            return Err(Error::BudgetExceeded(budget));
        }
        visit(k, &next)?;
        prev = std::mem::replace(&mut cur, next);
        prev_idx = std::mem::replace(&mut cur_idx, next_idx);
        if free {
            // nothing to deduplicate against
            prev_idx = LayerIndex::new();
            cur_idx = LayerIndex::new();
            prev.clear();
        }
    }
    Ok(total)
}

/// All group elements of word length at most `radius`, each once with a
/// shortest word, identity first, then by sphere in enumeration order.
pub fn orbit_ball(rep: &Representation, radius: usize) -> Result<Vec<OrbitElement>> {
    orbit_ball_with_budget(rep, radius, DEFAULT_ORBIT_BUDGET)
}

pub fn orbit_ball_with_budget(rep: &Representation, radius: usize, budget: usize) -> Result<Vec<OrbitElement>> {
    let mut out: Vec<OrbitElement> = Vec::new();
    let mut layer_start = 0;
    orbit_layers(rep, radius, budget, |k, layer| {
        let base = out.len();
        for node in layer {
            let word = if k == 0 {
                Word::empty()
            } else {
                let mut w = out[layer_start + node.parent as usize].word.0.clone();
                w.push(node.letter);
                Word(w)
            };
            out.push(OrbitElement { word, map: rep.to_ambient(&node.map), inverse: rep.to_ambient(&node.inverse) });
        }
        layer_start = base;
        Ok(())
    })?;
    Ok(out)
}
