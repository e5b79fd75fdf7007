//! Named generators and the standard generating sets.
//!
//! Rim generators (`G`, `H`, `E`, `E_i`, `C_j`) live on `{1..n}`; the
//! hub-aware ones (`G0`, `H0`, `E0`, `B_j`, `Iota`, `Z`) live on `{0..n}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::isometry::Symmetry;
use crate::ptrans::{Ambient, PartialInjection};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneratorLabel {
    G,
    H,
    E,
    /// `id` on the rim minus one point.
    Ei(usize),
    C(usize),
    G0,
    H0,
    E0,
    B(usize),
    Iota,
    Z,
}

use GeneratorLabel::*;

/// Largest `j` for which `c_j` and `b_j` exist (0 when none do).
pub fn max_c_index(n: usize) -> usize {
    (n / 2).saturating_sub(2)
}

impl GeneratorLabel {
    /// True for labels whose maps live on `{0..n}`.
    pub fn is_wheel(self) -> bool {
        matches!(self, G0 | H0 | E0 | B(_) | Iota | Z)
    }

    pub fn ambient(self, n: usize) -> Result<Ambient> {
        if self.is_wheel() {
            Ambient::wheel(n)
        } else {
            Ambient::rim(n)
        }
    }

    /// Rim label to its hub-fixing counterpart (`g -> g0`, `c_j -> b_j`).
    pub fn to_plus(self) -> Option<GeneratorLabel> {
        match self {
            G => Some(G0),
            H => Some(H0),
            E => Some(E0),
            C(j) => Some(B(j)),
            _ => None,
        }
    }

    fn check(self, n: usize) -> Result<()> {
        let ok = match self {
            Ei(i) => (1..=n).contains(&i),
            C(j) | B(j) => j >= 1 && j <= max_c_index(n),
            _ => true,
        };
        if n < 4 || !ok {
            return Err(Error::InvalidGenerator { label: self.to_string(), n });
        }
        Ok(())
    }
}

impl fmt::Display for GeneratorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            G => f.write_str("G"),
            H => f.write_str("H"),
            E => f.write_str("E"),
            Ei(i) => write!(f, "E_{i}"),
            C(j) => write!(f, "C_{j}"),
            G0 => f.write_str("G0"),
            H0 => f.write_str("H0"),
            E0 => f.write_str("E0"),
            B(j) => write!(f, "B_{j}"),
            Iota => f.write_str("Iota"),
            Z => f.write_str("Z"),
        }
    }
}

impl FromStr for GeneratorLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Usage(format!("unknown generator label {s:?}"));
        let param = |rest: &str| rest.parse::<usize>().map_err(|_| bad());
        Ok(match s {
            "G" => G,
            "H" => H,
            "E" => E,
            "G0" => G0,
            "H0" => H0,
            "E0" => E0,
            "Iota" => Iota,
            "Z" => Z,
            _ => {
                if let Some(rest) = s.strip_prefix("E_") {
                    Ei(param(rest)?)
                } else if let Some(rest) = s.strip_prefix("C_") {
                    C(param(rest)?)
                } else if let Some(rest) = s.strip_prefix("B_") {
                    B(param(rest)?)
                } else {
                    return Err(bad());
                }
            }
        })
    }
}

impl Serialize for GeneratorLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GeneratorLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Pairs of `c_j` on the rim.
fn c_pairs(n: usize, j: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=j + 1).map(|x| (x, x)).chain((j + 3..n).map(move |x| (x, n + j + 2 - x)))
}

pub fn build(n: usize, label: GeneratorLabel) -> Result<PartialInjection> {
    label.check(n)?;
    let amb = label.ambient(n)?;
    let hub = std::iter::once((0, 0));
    match label {
        G => Ok(Symmetry::rotation(1).to_map(n)),
        H => Ok(Symmetry::reflection(0).to_map(n)),
        E => PartialInjection::partial_identity(amb, 1..n),
        Ei(i) => PartialInjection::partial_identity(amb, (1..=n).filter(|&x| x != i)),
        C(j) => PartialInjection::from_pairs(amb, c_pairs(n, j)),
        G0 => PartialInjection::from_pairs(amb, hub.chain((1..=n).map(|x| (x, x % n + 1)))),
        H0 => PartialInjection::from_pairs(amb, hub.chain((1..=n).map(|x| (x, n + 1 - x)))),
        E0 => PartialInjection::partial_identity(amb, 0..n),
        B(j) => PartialInjection::from_pairs(amb, hub.chain(c_pairs(n, j))),
        Iota => PartialInjection::partial_identity(amb, 1..=n),
        Z => PartialInjection::from_pairs(amb, [(0, 1), (1, 0), (2, 2), (n, n)]),
    }
}

/// A generating set: labels with their maps, in a fixed order.
#[derive(Clone, Debug)]
pub struct GeneratingSet {
    pub ambient: Ambient,
    pub labels: Vec<GeneratorLabel>,
    pub elements: Vec<PartialInjection>,
}

impl GeneratingSet {
    pub fn from_labels(n: usize, labels: Vec<GeneratorLabel>) -> Result<Self> {
        let elements = labels.iter().map(|&l| build(n, l)).collect::<Result<Vec<_>>>()?;
        let ambient = elements.first().map(|e| e.ambient()).unwrap_or(Ambient::rim(n)?);
        if let Some(e) = elements.iter().find(|e| e.ambient() != ambient) {
            return Err(Error::AmbientMismatch { left: ambient, right: e.ambient() });
        }
        Ok(GeneratingSet { ambient, labels, elements })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 4 {
        return Err(Error::TooSmall { family: "generating set", min: 4, n });
    }
    Ok(())
}

/// `{g, h, e, c_1, ..., c_m}` with `m = ⌊n/2⌋ - 2`.
pub fn genset_minus(n: usize) -> Result<GeneratingSet> {
    check_n(n)?;
    let labels = [G, H, E].into_iter().chain((1..=max_c_index(n)).map(C)).collect();
    GeneratingSet::from_labels(n, labels)
}

/// `{g0, h0, e0, b_1, ..., b_m}`.
pub fn genset_plus(n: usize) -> Result<GeneratingSet> {
    check_n(n)?;
    let labels = [G0, H0, E0].into_iter().chain((1..=max_c_index(n)).map(B)).collect();
    GeneratingSet::from_labels(n, labels)
}

/// `genset_plus` together with `ι`.
pub fn genset_union(n: usize) -> Result<GeneratingSet> {
    let mut labels = genset_plus(n)?.labels;
    labels.insert(3, Iota);
    GeneratingSet::from_labels(n, labels)
}

/// `genset_union` together with `z`; for `n = 4` the smaller set
/// `{g0, h0, ι, z}` (there `e0` is a product of the others).
pub fn genset_full(n: usize) -> Result<GeneratingSet> {
    if n == 4 {
        return GeneratingSet::from_labels(n, vec![G0, H0, Iota, Z]);
    }
    let mut labels = genset_union(n)?.labels;
    labels.insert(4, Z);
    GeneratingSet::from_labels(n, labels)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SetKind {
    Minus,
    Plus,
    Union,
    Full,
}

impl SetKind {
    pub fn genset(self, n: usize) -> Result<GeneratingSet> {
        match self {
            SetKind::Minus => genset_minus(n),
            SetKind::Plus => genset_plus(n),
            SetKind::Union => genset_union(n),
            SetKind::Full => genset_full(n),
        }
    }
}

impl FromStr for SetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minus" => Ok(SetKind::Minus),
            "plus" => Ok(SetKind::Plus),
            "union" => Ok(SetKind::Union),
            "full" => Ok(SetKind::Full),
            _ => Err(Error::Usage(format!("unknown generating set {s:?}"))),
        }
    }
}

impl fmt::Display for SetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SetKind::Minus => "minus",
            SetKind::Plus => "plus",
            SetKind::Union => "union",
            SetKind::Full => "full",
        })
    }
}
