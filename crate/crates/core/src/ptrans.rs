//! Partial injective transformations on a small finite ambient set.
//!
//! Maps are written on the right and composed left to right: `x(ab) = (xa)b`,
//! so `a.compose(&b)` first applies `a`, then `b`.
//!
//! An ambient set is a contiguous range of vertex ids `lo..=hi`. The two
//! ranges that matter for wheels are the rim `{1..n}` and the rim plus hub
//! `{0..n}`. A [`PartialInjection`] stores its image table inline, so values
//! are `Copy`, and equality and hashing reduce to comparing a few bytes.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported ambient set.
pub const MAX_POINTS: usize = 16;

const UNDEF: u8 = u8::MAX;

/// A contiguous ambient set `lo..=hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ambient {
    lo: u8,
    hi: u8,
}

impl Ambient {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if hi < lo {
            return Err(Error::InvalidAmbient(format!("{lo}..{hi} is empty")));
        }
        let len = hi - lo + 1;
        if len > MAX_POINTS {
            return Err(Error::InvalidAmbient(format!(
                "{lo}..{hi} has {len} points, at most {MAX_POINTS} are supported"
            )));
        }
        Ok(Ambient {
            lo: lo as u8,
            hi: hi as u8,
        })
    }

    /// The rim `Ω_n = {1, ..., n}`.
    pub fn rim(n: usize) -> Result<Self> {
        Self::new(1, n)
    }

    /// The wheel vertex set `{0, 1, ..., n}`, hub first.
    pub fn wheel(n: usize) -> Result<Self> {
        Self::new(0, n)
    }

    pub fn lo(&self) -> usize {
        self.lo as usize
    }

    pub fn hi(&self) -> usize {
        self.hi as usize
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo) as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, p: usize) -> bool {
        p >= self.lo() && p <= self.hi()
    }

    pub fn points(&self) -> impl DoubleEndedIterator<Item = usize> + Clone {
        self.lo()..=self.hi()
    }

    /// Bitmask with one bit per ambient point (bit `p - lo`).
    pub fn full_mask(&self) -> u16 {
        if self.len() == 16 {
            u16::MAX
        } else {
            (1u16 << self.len()) - 1
        }
    }

    /// Bitmask of a set of points; errors on points outside the ambient.
    pub fn mask_of<I: IntoIterator<Item = usize>>(&self, points: I) -> Result<u16> {
        let mut mask = 0u16;
        for p in points {
            self.check(p)?;
            mask |= 1 << (p - self.lo());
        }
        Ok(mask)
    }

    /// Points of a mask, ascending.
    pub fn points_of(&self, mask: u16) -> impl Iterator<Item = usize> + '_ {
        let lo = self.lo();
        (0..self.len())
            .filter(move |i| mask & (1 << i) != 0)
            .map(move |i| i + lo)
    }

    fn check(&self, p: usize) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::PointOutsideAmbient {
                point: p,
                ambient: *self,
            })
        }
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == 1 {
            write!(f, "{}", self.hi)
        } else {
            write!(f, "{}..{}", self.lo, self.hi)
        }
    }
}

impl std::str::FromStr for Ambient {
    type Err = Error;

    /// `"n"` is `{1..n}`; `"a..b"` is `{a..b}`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidAmbient(s.to_string()))
        };
        match s.split_once("..") {
            Some((a, b)) => Ambient::new(parse(a)?, parse(b)?),
            None => Ambient::new(1, parse(s)?),
        }
    }
}

/// A partial injective map on an [`Ambient`] set.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PartialInjection {
    ambient: Ambient,
    img: [u8; MAX_POINTS],
    dom: u16,
    im: u16,
}

impl PartialInjection {
    /// The empty map.
    pub fn empty(ambient: Ambient) -> Self {
        PartialInjection {
            ambient,
            img: [UNDEF; MAX_POINTS],
            dom: 0,
            im: 0,
        }
    }

    pub fn identity(ambient: Ambient) -> Self {
        Self::identity_on_mask(ambient, ambient.full_mask())
    }

    /// `id_X`, the identity restricted to `points`.
    pub fn partial_identity<I: IntoIterator<Item = usize>>(ambient: Ambient, points: I) -> Result<Self> {
        let mask = ambient.mask_of(points)?;
        Ok(Self::identity_on_mask(ambient, mask))
    }

    pub(crate) fn identity_on_mask(ambient: Ambient, mask: u16) -> Self {
        let mut out = Self::empty(ambient);
        for p in ambient.points_of(mask) {
            out.img[p - ambient.lo()] = p as u8;
        }
        out.dom = mask;
        out.im = mask;
        out
    }

    /// Builds a map from `(domain point, image point)` pairs in any order.
    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(ambient: Ambient, pairs: I) -> Result<Self> {
        let mut out = Self::empty(ambient);
        for (x, y) in pairs {
            ambient.check(x)?;
            ambient.check(y)?;
            let (bx, by) = (1u16 << (x - ambient.lo()), 1u16 << (y - ambient.lo()));
            if out.dom & bx != 0 {
                return Err(Error::DuplicateDomainPoint(x));
            }
            if out.im & by != 0 {
                return Err(Error::NotInjective(y));
            }
            out.img[x - ambient.lo()] = y as u8;
            out.dom |= bx;
            out.im |= by;
        }
        Ok(out)
    }

    /// Builds a map from a closure over the domain points.
    pub fn from_fn<I, F>(ambient: Ambient, domain: I, f: F) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
        F: Fn(usize) -> usize,
    {
        Self::from_pairs(ambient, domain.into_iter().map(|x| (x, f(x))))
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        if !self.ambient.contains(x) {
            return None;
        }
        match self.img[x - self.ambient.lo()] {
            UNDEF => None,
            y => Some(y as usize),
        }
    }

    /// Pairs sorted by domain point.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let lo = self.ambient.lo();
        self.img[..self.ambient.len()]
            .iter()
            .enumerate()
            .filter(|(_, &y)| y != UNDEF)
            .map(move |(i, &y)| (i + lo, y as usize))
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.ambient.points_of(self.dom)
    }

    pub fn image(&self) -> impl Iterator<Item = usize> + '_ {
        self.ambient.points_of(self.im)
    }

    /// Domain as a bitmask over the ambient (bit `p - lo`).
    pub fn dom_mask(&self) -> u16 {
        self.dom
    }

    pub fn im_mask(&self) -> u16 {
        self.im
    }

    pub fn in_domain(&self, x: usize) -> bool {
        self.apply(x).is_some()
    }

    pub fn in_image(&self, y: usize) -> bool {
        self.ambient.contains(y) && self.im & (1 << (y - self.ambient.lo())) != 0
    }

    pub fn rank(&self) -> usize {
        self.dom.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.dom == 0
    }

    pub fn is_partial_identity(&self) -> bool {
        self.pairs().all(|(x, y)| x == y)
    }

    /// True for the full identity of the ambient.
    pub fn is_identity(&self) -> bool {
        self.dom == self.ambient.full_mask() && self.is_partial_identity()
    }

    /// True when the map is a permutation of the whole ambient.
    pub fn is_unit(&self) -> bool {
        self.dom == self.ambient.full_mask()
    }

    /// Left-to-right composition: `x (self · other) = (x self) other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch {
                left: self.ambient,
                right: other.ambient,
            });
        }
        Ok(self.compose_unchecked(other))
    }

    /// Composition for callers that already know the ambients agree.
    #[inline]
    pub fn compose_unchecked(&self, other: &Self) -> Self {
        debug_assert_eq!(self.ambient, other.ambient);
        let lo = self.ambient.lo() as u8;
        let mut out = Self::empty(self.ambient);
        let mut dom = self.dom;
        while dom != 0 {
            let i = dom.trailing_zeros() as usize;
            dom &= dom - 1;
            let y = other.img[(self.img[i] - lo) as usize];
            if y != UNDEF {
                out.img[i] = y;
                out.dom |= 1 << i;
                out.im |= 1 << (y - lo);
            }
        }
        out
    }

    pub fn inverse(&self) -> Self {
        let lo = self.ambient.lo() as u8;
        let mut out = Self::empty(self.ambient);
        for (i, &y) in self.img[..self.ambient.len()].iter().enumerate() {
            if y != UNDEF {
                out.img[(y - lo) as usize] = i as u8 + lo;
            }
        }
        out.dom = self.im;
        out.im = self.dom;
        out
    }

    /// `self|_X`: keeps the pairs whose domain point lies in `points`.
    pub fn restrict<I: IntoIterator<Item = usize>>(&self, points: I) -> Result<Self> {
        let mask = self.ambient.mask_of(points)?;
        Ok(self.restrict_mask(mask))
    }

    pub(crate) fn restrict_mask(&self, mask: u16) -> Self {
        let lo = self.ambient.lo() as u8;
        let mut out = *self;
        let drop = self.dom & !mask;
        for i in 0..self.ambient.len() {
            if drop & (1 << i) != 0 {
                out.im &= !(1 << (out.img[i] - lo));
                out.img[i] = UNDEF;
            }
        }
        out.dom &= mask;
        out
    }

    /// Same pairs, different (compatible) ambient.
    pub fn with_ambient(&self, ambient: Ambient) -> Result<Self> {
        Self::from_pairs(ambient, self.pairs())
    }

    /// JSON encoding `{"ambient": n | "a..b", "map": [[d, i], ...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ElementJson::from(self)).expect("element encodes")
    }

    /// Parses the JSON encoding. `default_ambient` is used when the
    /// `ambient` field is absent.
    pub fn from_json_str(s: &str, default_ambient: Option<Ambient>) -> Result<Self> {
        let parsed: ElementJson = serde_json::from_str(s)?;
        parsed.into_element(default_ambient)
    }
}

impl Ord for PartialInjection {
    /// Ambient first, then the domain-sorted pair lists lexicographically.
    fn cmp(&self, other: &Self) -> Ordering {
        self.ambient
            .cmp(&other.ambient)
            .then_with(|| self.pairs().cmp(other.pairs()))
    }
}

impl PartialOrd for PartialInjection {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::ops::Mul for PartialInjection {
    type Output = PartialInjection;

    /// Left-to-right composition. Panics on ambient mismatch.
    fn mul(self, rhs: Self) -> Self {
        self.compose(&rhs).expect("ambients agree")
    }
}

impl std::ops::Mul for &PartialInjection {
    type Output = PartialInjection;

    fn mul(self, rhs: Self) -> PartialInjection {
        self.compose(rhs).expect("ambients agree")
    }
}

impl fmt::Debug for PartialInjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.ambient, self)
    }
}

impl fmt::Display for PartialInjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (x, y)) in self.pairs().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}->{y}")?;
        }
        f.write_str("}")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum AmbientJson {
    Count(usize),
    Range(String),
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ambient: Option<AmbientJson>,
    map: Vec<[usize; 2]>,
}

impl From<Ambient> for AmbientJson {
    fn from(amb: Ambient) -> Self {
        if amb.lo() == 1 {
            AmbientJson::Count(amb.hi())
        } else {
            AmbientJson::Range(amb.to_string())
        }
    }
}

/// `n` for `{1..n}`, otherwise the string `"a..b"`.
impl Serialize for Ambient {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AmbientJson::from(*self).serialize(s)
    }
}

impl From<&PartialInjection> for ElementJson {
    fn from(a: &PartialInjection) -> Self {
        ElementJson {
            ambient: Some(a.ambient().into()),
            map: a.pairs().map(|(x, y)| [x, y]).collect(),
        }
    }
}

impl ElementJson {
    fn into_element(self, default_ambient: Option<Ambient>) -> Result<PartialInjection> {
        let ambient = match self.ambient {
            Some(AmbientJson::Count(n)) => Ambient::rim(n)?,
            Some(AmbientJson::Range(s)) => s.parse()?,
            None => default_ambient
                .ok_or_else(|| Error::InvalidAmbient("element has no \"ambient\" field".into()))?,
        };
        PartialInjection::from_pairs(ambient, self.map.into_iter().map(|[x, y]| (x, y)))
    }
}

impl Serialize for PartialInjection {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElementJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PartialInjection {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ElementJson::deserialize(d)?;
        raw.into_element(None).map_err(serde::de::Error::custom)
    }
}
