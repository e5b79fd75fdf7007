//! Structure specific to the wheel `W_n`: rim arcs and maximal arcs, the
//! arc-based membership test for hub-avoiding isometries, orientation of
//! arcs, J-types, the Minus/Plus/Outside split and the isomorphism `Ψ`.
//!
//! Two ambients are in play. Hub-avoiding elements live on the rim
//! `{1..n}`; everything else lives on `{0..n}`. [`embed`] and [`project`]
//! are the only conversions between the two.
//!
//! Conventions not fixed by the underlying theory:
//! - a full rim `{1..n}` has the single maximal arc `A_{1,n}`, so a
//!   permutation has J-type `(n)`;
//! - the empty map has the empty J-type `()`;
//! - a single-point arc is reported as [`Orientation::Preserves`].

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::rim_mod;
use crate::isometry::{dihedral_witness, Symmetry};
use crate::ptrans::{Ambient, PartialInjection};

/// The cyclic interval `A_{i,j} = {i, i+1, ..., j}` of the rim, indices mod `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Arc {
    pub n: usize,
    pub start: usize,
    pub end: usize,
}

impl Arc {
    pub fn new(n: usize, start: usize, end: usize) -> Result<Self> {
        for p in [start, end] {
            if p == 0 || p > n {
                return Err(Error::PointOutsideAmbient {
                    point: p,
                    ambient: Ambient::rim(n)?,
                });
            }
        }
        Ok(Arc { n, start, end })
    }

    pub fn len(&self) -> usize {
        (self.end + self.n - self.start) % self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Points in cyclic order from `start` to `end`.
    pub fn points(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).map(move |k| rim_mod(self.n, (self.start + k) as i64))
    }

    pub fn contains(&self, x: usize) -> bool {
        x >= 1 && x <= self.n && (x + self.n - self.start) % self.n < self.len()
    }

    /// Smallest point of the arc as a set.
    pub fn least(&self) -> usize {
        if self.contains(1) {
            1
        } else {
            self.start
        }
    }

    /// Rim bitmask (bit `x - 1`).
    pub fn mask(&self) -> u16 {
        self.points().fold(0, |m, x| m | 1 << (x - 1))
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A_{{{},{}}}", self.start, self.end)
    }
}

/// Maximal arcs of a rim subset given as a bitmask (bit `x - 1`), ordered by
/// their least element. The arc through `n` and `1`, if any, comes first.
pub(crate) fn maximal_arcs_mask(n: usize, mask: u16) -> Vec<Arc> {
    let full = if n == 16 { u16::MAX } else { (1u16 << n) - 1 };
    let mask = mask & full;
    if mask == full {
        return vec![Arc { n, start: 1, end: n }];
    }
    let has = |x: usize| mask & (1 << (x - 1)) != 0;
    let mut arcs = Vec::new();
    for x in 1..=n {
        let prev = rim_mod(n, x as i64 - 1);
        if has(x) && !has(prev) {
            let mut end = x;
            while has(rim_mod(n, end as i64 + 1)) {
                end = rim_mod(n, end as i64 + 1);
            }
            arcs.push(Arc { n, start: x, end });
        }
    }
    arcs.sort_by_key(Arc::least);
    arcs
}

/// Maximal arcs of `points ⊆ {1..n}`.
pub fn maximal_arcs<I: IntoIterator<Item = usize>>(n: usize, points: I) -> Result<Vec<Arc>> {
    let mask = Ambient::rim(n)?.mask_of(points)?;
    Ok(maximal_arcs_mask(n, mask))
}

/// Gaps of a rim subset: the rim points missing from it, ascending.
pub fn gaps(n: usize, mask: u16) -> impl Iterator<Item = usize> {
    (1..=n).filter(move |x| mask & (1 << (x - 1)) == 0)
}

/// Hubless element of `{0..n}` from an element of `{1..n}`.
pub fn embed(a: &PartialInjection) -> Result<PartialInjection> {
    let amb = a.ambient();
    if amb.lo() != 1 {
        return Err(Error::InvalidAmbient(format!("embed expects a rim ambient, got {amb}")));
    }
    a.with_ambient(Ambient::wheel(amb.hi())?)
}

/// Inverse of [`embed`]; fails if the hub is in the domain or image.
pub fn project(a: &PartialInjection) -> Result<PartialInjection> {
    let amb = a.ambient();
    if amb.lo() != 0 {
        return Err(Error::InvalidAmbient(format!("project expects a wheel ambient, got {amb}")));
    }
    if a.in_domain(0) || a.in_image(0) {
        return Err(Error::NotInMonoid(format!("{a} involves the hub")));
    }
    a.with_ambient(Ambient::rim(amb.hi())?)
}

/// Accepts either a rim element or a hubless wheel element, returning the
/// rim form.
pub(crate) fn as_rim(n: usize, a: &PartialInjection) -> Result<PartialInjection> {
    let amb = a.ambient();
    if amb == Ambient::rim(n)? {
        Ok(*a)
    } else if amb == Ambient::wheel(n)? {
        project(a)
    } else {
        Err(Error::AmbientMismatch {
            left: amb,
            right: Ambient::rim(n)?,
        })
    }
}

/// Membership in the hub-avoiding part of `DP(W_n)` via maximal arcs:
/// every maximal arc of the domain must map onto a maximal arc of the
/// image, and the restriction to it must be a dihedral restriction.
pub fn char_member_minus(n: usize, a: &PartialInjection) -> Result<bool> {
    let a = match as_rim(n, a) {
        Ok(a) => a,
        Err(Error::NotInMonoid(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    let image_arcs: Vec<u16> = maximal_arcs_mask(n, a.im_mask()).iter().map(Arc::mask).collect();
    for arc in maximal_arcs_mask(n, a.dom_mask()) {
        let img = arc.points().fold(0u16, |m, x| m | 1 << (a.apply(x).unwrap() - 1));
        if !image_arcs.contains(&img) {
            return Ok(false);
        }
        let part = a.restrict_mask(arc.mask());
        if dihedral_witness(n, &part)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Orientation {
    Preserves,
    Reverses,
}

/// Dihedral witness of `a` on an arc of its domain: `g^{iα-i}` when the
/// orientation is preserved, `hg^{iα+i-1}` when reversed (`i` = arc start).
pub fn arc_witness(n: usize, a: &PartialInjection, arc: &Arc) -> Result<(Orientation, Symmetry)> {
    let a = as_rim(n, a)?;
    if !char_member_minus(n, &a)? {
        return Err(Error::NotInMonoid(format!("{a} is not a hub-avoiding isometry of W_{n}")));
    }
    if arc.points().any(|x| !a.in_domain(x)) {
        return Err(Error::ArcNotInDomain { arc: arc.to_string() });
    }
    let i = arc.start as i64;
    let ia = a.apply(arc.start).unwrap() as i64;
    let preserve = Symmetry::rotation(rim_mod(n, ia - i) % n);
    let reverse = Symmetry::reflection(rim_mod(n, ia + i - 1) % n);
    let agrees = |s: &Symmetry| arc.points().all(|x| a.apply(x) == Some(s.apply(n, x)));
    if agrees(&preserve) {
        Ok((Orientation::Preserves, preserve))
    } else if agrees(&reverse) {
        Ok((Orientation::Reverses, reverse))
    } else {
        Err(Error::NotInMonoid(format!("{a} is not dihedral on {arc}")))
    }
}

pub fn orientation(n: usize, a: &PartialInjection, arc: &Arc) -> Result<Orientation> {
    arc_witness(n, a, arc).map(|(o, _)| o)
}

/// Sorted maximal-arc sizes of the domain.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct JType(pub Vec<usize>);

impl JType {
    pub fn of_sizes(mut sizes: Vec<usize>) -> Self {
        sizes.sort_unstable();
        JType(sizes)
    }

    pub fn rank(&self) -> usize {
        self.0.iter().sum()
    }
}

impl fmt::Display for JType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl<const K: usize> From<[usize; K]> for JType {
    fn from(sizes: [usize; K]) -> Self {
        JType::of_sizes(sizes.to_vec())
    }
}

pub fn j_type(n: usize, a: &PartialInjection) -> Result<JType> {
    let a = as_rim(n, a)?;
    if !char_member_minus(n, &a)? {
        return Err(Error::NotInMonoid(format!("{a} is not a hub-avoiding isometry of W_{n}")));
    }
    Ok(j_type_unchecked(n, &a))
}

pub(crate) fn j_type_unchecked(n: usize, a: &PartialInjection) -> JType {
    // accepts rim or hubless wheel masks
    let mask = if a.ambient().lo() == 0 { a.dom_mask() >> 1 } else { a.dom_mask() };
    JType::of_sizes(maximal_arcs_mask(n, mask).iter().map(Arc::len).collect())
}

/// Three-way split of `DP(W_n)` by the behaviour of the hub.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Classification {
    /// Hub neither in the domain nor in the image.
    Minus,
    /// Hub in the domain and fixed.
    Plus,
    /// Hub moved, or in exactly one of domain and image.
    Outside,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Minus => "minus",
            Classification::Plus => "plus",
            Classification::Outside => "outside",
        })
    }
}

/// Rim-ambient maps are hubless and so always `Minus`.
pub fn classify(a: &PartialInjection) -> Classification {
    if a.ambient().lo() != 0 || (!a.in_domain(0) && !a.in_image(0)) {
        Classification::Minus
    } else if a.apply(0) == Some(0) {
        Classification::Plus
    } else {
        Classification::Outside
    }
}

/// `Ψ`: drops the fixed hub of a Plus element.
pub fn psi(a: &PartialInjection) -> Result<PartialInjection> {
    if a.ambient().lo() != 0 || classify(a) != Classification::Plus {
        return Err(Error::NotInMonoid(format!("Ψ needs an element fixing the hub, got {a:?}")));
    }
    let n = a.ambient().hi();
    project(&a.restrict_mask(a.dom_mask() & !1))
        .and_then(|r| r.with_ambient(Ambient::rim(n)?))
}

/// `Ψ⁻¹`: adjoins `0 -> 0` to a hub-avoiding isometry on the rim.
pub fn psi_inv(b: &PartialInjection) -> Result<PartialInjection> {
    let amb = b.ambient();
    if amb.lo() != 1 || !char_member_minus(amb.hi(), b)? {
        return Err(Error::NotInMonoid(format!("Ψ⁻¹ needs a rim isometry of the wheel, got {b:?}")));
    }
    PartialInjection::from_pairs(Ambient::wheel(amb.hi())?, std::iter::once((0, 0)).chain(b.pairs()))
}

/// One of the four hub properties every element of `DP(W_n)` satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SplitProperty {
    /// `0 ∈ Dom`, `0α ≠ 0` forces rank ≤ 4.
    HubMovedForward,
    /// `0 ∈ Im`, `0α⁻¹ ≠ 0` forces rank ≤ 4.
    HubMovedBackward,
    /// Rank ≥ 4: hub in domain iff hub in image.
    HubSymmetric,
    /// Rank ≥ 5 with hub involvement: hub fixed.
    HubFixed,
}

/// Lists the hub properties `a` violates; empty for genuine isometries.
pub fn split_lemma_check(a: &PartialInjection) -> Vec<SplitProperty> {
    if a.ambient().lo() != 0 {
        return Vec::new();
    }
    let k = a.rank();
    let in_dom = a.in_domain(0);
    let in_im = a.in_image(0);
    let fwd = a.apply(0);
    let back = a.inverse().apply(0);
    let mut out = Vec::new();
    if in_dom && fwd != Some(0) && k > 4 {
        out.push(SplitProperty::HubMovedForward);
    }
    if in_im && back != Some(0) && k > 4 {
        out.push(SplitProperty::HubMovedBackward);
    }
    if k >= 4 && in_dom != in_im {
        out.push(SplitProperty::HubSymmetric);
    }
    if k >= 5 && (in_dom || in_im) && !(in_dom && in_im && fwd == Some(0)) {
        out.push(SplitProperty::HubFixed);
    }
    out
}

/// Splits an enumerated `DP(W_n)` into its three parts. The Minus part is
/// returned on the rim ambient.
pub fn split_by_class(elements: &[PartialInjection]) -> Result<Split> {
    let mut split = Split::default();
    for a in elements {
        match classify(a) {
            Classification::Minus => split.minus.push(if a.ambient().lo() == 0 { project(a)? } else { *a }),
            Classification::Plus => split.plus.push(*a),
            Classification::Outside => split.outside.push(*a),
        }
    }
    split.minus.sort();
    Ok(split)
}

#[derive(Clone, Debug, Default)]
pub struct Split {
    pub minus: Vec<PartialInjection>,
    pub plus: Vec<PartialInjection>,
    pub outside: Vec<PartialInjection>,
}
