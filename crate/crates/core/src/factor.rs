//! Words over the named generators, and constructive factorization of every
//! element of `DP(W_n)` into such a word.
//!
//! Hub-avoiding elements are factored recursively: elements of rank at
//! least `n-1`, or with a single maximal arc, are dihedral restrictions;
//! rank `n-2` elements reduce to one of four normal forms; lower ranks are
//! written as products of strictly higher-rank elements. Hub-fixing
//! elements go through `Ψ`, and elements that move the hub are split
//! around one occurrence of `z`.

use std::fmt;

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gens::{build, genset_full, genset_minus, GeneratorLabel, GeneratorLabel::*};
use crate::graphs::{rim_mod, wheel};
use crate::isometry::{dihedral_witness, Metric, Symmetry};
use crate::ptrans::{Ambient, PartialInjection};
use crate::wheel::{as_rim, char_member_minus, classify, gaps, maximal_arcs_mask, project, psi, Arc, Classification};

/// A product of generators, read left to right. The empty word is the
/// identity of its ambient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Word {
    pub ambient: Ambient,
    pub letters: Vec<GeneratorLabel>,
}

impl Word {
    pub fn new(ambient: Ambient, letters: Vec<GeneratorLabel>) -> Self {
        Word { ambient, letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn evaluate(&self) -> Result<PartialInjection> {
        let n = self.ambient.hi();
        let mut cache: FxHashMap<GeneratorLabel, PartialInjection> = FxHashMap::default();
        let mut acc = PartialInjection::identity(self.ambient);
        for &l in &self.letters {
            let g = match cache.get(&l) {
                Some(g) => *g,
                None => {
                    let g = build(n, l)?;
                    cache.insert(l, g);
                    g
                }
            };
            acc = acc.compose(&g)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

fn rotation(n: usize, k: usize) -> PartialInjection {
    Symmetry::rotation(k % n).to_map(n)
}

fn g_letters(n: usize, k: usize) -> Vec<GeneratorLabel> {
    vec![G; k % n]
}

/// `e_t = g^{n-t} e g^t`.
fn e_letters(n: usize, t: usize) -> Vec<GeneratorLabel> {
    let mut w = g_letters(n, n - t);
    w.push(E);
    w.extend(g_letters(n, t));
    w
}

fn sigma_letters(n: usize, s: Symmetry) -> Vec<GeneratorLabel> {
    let mut w = if s.reflect { vec![H] } else { Vec::new() };
    w.extend(g_letters(n, s.shift));
    w
}

fn rim_e(n: usize, t: usize) -> PartialInjection {
    build(n, Ei(t)).expect("t is a rim point")
}

fn rim_map(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<PartialInjection> {
    PartialInjection::from_pairs(Ambient::rim(n)?, pairs)
}

fn product(amb: Ambient, pieces: &[PartialInjection]) -> PartialInjection {
    pieces.iter().fold(PartialInjection::identity(amb), |acc, p| acc.compose_unchecked(p))
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Verification(what()))
    }
}

/// Image of an arc of the domain, as a maximal arc of the image.
fn image_arc(n: usize, a: &PartialInjection, arc: &Arc) -> Result<Arc> {
    let mask = arc.points().fold(0u16, |m, x| m | 1 << (a.apply(x).unwrap() - 1));
    maximal_arcs_mask(n, a.im_mask())
        .into_iter()
        .find(|b| b.mask() == mask)
        .ok_or_else(|| Error::NotInMonoid(format!("{a} does not map {arc} onto an arc")))
}

/// Word over `{g, h, e}` for a dihedral restriction: the partial identities
/// `e_t` for every gap `t`, then the dihedral witness.
pub fn factor_di(n: usize, a: &PartialInjection) -> Result<Word> {
    let a = as_rim(n, a)?;
    let sigma = dihedral_witness(n, &a)?
        .ok_or_else(|| Error::NotInMonoid(format!("{a} is not a dihedral restriction")))?;
    let mut letters: Vec<GeneratorLabel> = gaps(n, a.dom_mask()).flat_map(|t| e_letters(n, t)).collect();
    letters.extend(sigma_letters(n, sigma));
    Ok(Word::new(Ambient::rim(n)?, letters))
}

/// Memoizing factorizer for one `n`.
pub struct Factorizer {
    n: usize,
    minus: FxHashMap<PartialInjection, Vec<GeneratorLabel>>,
    full_gens: Vec<(GeneratorLabel, PartialInjection)>,
}

impl Factorizer {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::TooSmall { family: "factorization", min: 4, n });
        }
        let mut minus = FxHashMap::default();
        let m = genset_minus(n)?;
        for (l, g) in m.labels.into_iter().zip(m.elements) {
            minus.insert(g, vec![l]);
        }
        let f = genset_full(n)?;
        let full_gens = f.labels.into_iter().zip(f.elements).collect();
        Ok(Factorizer { n, minus, full_gens })
    }

    pub fn minus(&mut self, a: &PartialInjection) -> Result<Word> {
        let n = self.n;
        let a = as_rim(n, a)?;
        if !char_member_minus(n, &a)? {
            return Err(Error::NotInMonoid(format!("{a} is not a hub-avoiding isometry of W_{n}")));
        }
        Ok(Word::new(Ambient::rim(n)?, self.minus_letters(&a)?))
    }

    fn minus_letters(&mut self, a: &PartialInjection) -> Result<Vec<GeneratorLabel>> {
        if let Some(w) = self.minus.get(a) {
            return Ok(w.clone());
        }
        let n = self.n;
        let arcs = maximal_arcs_mask(n, a.dom_mask());
        let k = a.rank();
        let w = if k + 1 >= n || arcs.len() <= 1 {
            factor_di(n, a)?.letters
        } else if k + 2 == n {
            self.rank_n_minus_two(a, &arcs)?
        } else {
            let pieces = self.lower_rank_pieces(a, &arcs)?;
            let mut w = Vec::new();
            for p in &pieces {
                check(char_member_minus(n, p)?, || format!("factor {p} of {a} is not a member"))?;
                check(p.rank() > k, || format!("factor {p} of {a} does not raise the rank"))?;
                w.extend(self.minus_letters(p)?);
            }
            w
        };
        self.minus.insert(*a, w.clone());
        Ok(w)
    }

    /// Two maximal arcs, two gaps: conjugate by rotations to a map fixing
    /// `{1..j+1}` and `{j+3..n-1}` setwise, which is one of four products.
    fn rank_n_minus_two(&mut self, a: &PartialInjection, arcs: &[Arc]) -> Result<Vec<GeneratorLabel>> {
        let n = self.n;
        let a1 = if arcs[1].len() < arcs[0].len() { arcs[1] } else { arcs[0] };
        let j = a1.len() - 1;
        let r = a1.start;
        let s = image_arc(n, a, &a1)?.start;
        let beta = rotation(n, r - 1) * *a * rotation(n, n - s + 1);

        let ee: Vec<GeneratorLabel> = [e_letters(n, j + 2), e_letters(n, n)].concat();
        let mut flip = ee.clone();
        flip.push(H);
        flip.extend(g_letters(n, j + 1));
        let mut candidates = vec![ee];
        if j >= 1 {
            candidates.push(vec![C(j)]);
            candidates.push([vec![C(j)], flip.clone()].concat());
        }
        candidates.push(flip);

        let amb = Ambient::rim(n)?;
        for c in candidates {
            if Word::new(amb, c.clone()).evaluate()? == beta {
                let mut w = g_letters(n, n - r + 1);
                w.extend(c);
                w.extend(g_letters(n, s - 1));
                return Ok(w);
            }
        }
        Err(Error::Verification(format!("no normal form matches {beta} (from {a})")))
    }

    /// Writes `a` (rank `k <= n-3`, at least two maximal arcs) as a product
    /// of elements of rank greater than `k`.
    fn lower_rank_pieces(&self, a: &PartialInjection, arcs: &[Arc]) -> Result<Vec<PartialInjection>> {
        let n = self.n;
        let amb = Ambient::rim(n)?;
        let a1 = arcs[0];
        let t = a1.len();
        let r = a1.start;
        let s = image_arc(n, a, &a1)?.start;
        let beta0 = rotation(n, r - 1) * *a * rotation(n, n - s + 1);

        // γ1 undoes the action on {1..t}; it is an involution there
        let gamma1 = PartialInjection::from_fn(amb, beta0.image().collect::<Vec<_>>(), |y| {
            if y <= t {
                beta0.apply(y).unwrap()
            } else {
                y
            }
        })?;
        let beta = beta0 * gamma1;

        let rotated = maximal_arcs_mask(n, beta.dom_mask());
        check(rotated.len() >= 2 && rotated[0] == Arc { n, start: 1, end: t }, || {
            format!("rotated domain of {a} does not start with 1..{t}")
        })?;
        let a2 = rotated[1];
        let p = a2.len();
        let jj = a2.least() - t;
        let b = a2.points().map(|x| beta.apply(x).unwrap()).max().unwrap();
        let lo = t + 2;

        let lambda = rim_map(
            n,
            (b + 2..=n).chain(1..=t).map(|x| (x, x)).chain((lo..=b).map(|x| (x, lo + b - x))),
        )?;
        let bl = beta * lambda;
        let bl_inv = bl.inverse();
        let gamma2 = PartialInjection::from_fn(amb, bl.image().collect::<Vec<_>>(), |y| {
            if (t + 2..=t + p + 1).contains(&y) {
                bl_inv.apply(y).unwrap() + 2 - jj
            } else {
                y
            }
        })?;
        let delta = rim_map(n, (1..=t).map(|x| (x, x)).chain((t + 2..=n + 1 - jj).map(|x| (x, x + jj - 2))))?;
        let eps = delta * bl * gamma2;
        let beta_bar = rim_map(n, eps.pairs().chain([(t + 1, t + 1)]))?;
        let e_t1 = rim_e(n, t + 1);

        let delta_inv = if jj == 3 {
            // two reversals of the long arc, each of rank n-2
            let p1 = rim_map(n, (1..=t).map(|x| (x, x)).chain((t + 2..n).map(|y| (y, n + t + 1 - y))))?;
            let q = rim_map(
                n,
                (1..=t).chain([n]).map(|x| (x, x)).chain((t + 2..=n - 2).map(|y| (y, n + t - y))),
            )?;
            check(p1 * q == delta.inverse(), || format!("δ⁻¹ does not split for {a}"))?;
            vec![p1, q]
        } else if jj >= 4 {
            let d1 = rim_map(n, (1..=t).map(|x| (x, x)).chain((t + 2..=n + 2 - jj).map(|x| (x, x + jj - 3))))?;
            let d2 = rim_map(n, (1..=t + 1).map(|x| (x, x)).chain((t + jj - 1..=n - 2).map(|x| (x, x + 1))))?;
            check(d1 * d2 == delta, || format!("δ does not split for {a}"))?;
            vec![d2.inverse(), d1.inverse()]
        } else {
            vec![delta.inverse()]
        };

        let mut pieces = Vec::new();
        if !(n - r + 1).is_multiple_of(n) {
            pieces.push(rotation(n, n - r + 1));
        }
        pieces.extend(delta_inv);
        pieces.push(e_t1);
        pieces.push(beta_bar);
        pieces.extend(quasi_identity_pieces(n, &gamma2)?);
        pieces.push(lambda);
        pieces.extend(quasi_identity_pieces(n, &gamma1)?);
        if (s - 1) % n != 0 {
            pieces.push(rotation(n, s - 1));
        }
        check(product(amb, &pieces) == *a, || format!("rank-raising product does not give {a}"))?;
        Ok(pieces)
    }

    /// Word over `genset_full(n)` for any partial isometry of `W_n`.
    pub fn full(&mut self, a: &PartialInjection) -> Result<Word> {
        let n = self.n;
        let amb = Ambient::wheel(n)?;
        if a.ambient() != amb {
            return Err(Error::AmbientMismatch { left: a.ambient(), right: amb });
        }
        if !Metric::new(&wheel(n)?)?.is_isometry(a)? {
            return Err(Error::NotInMonoid(format!("{a} is not a partial isometry of W_{n}")));
        }
        let letters = self.full_letters(a)?;
        let letters = if n == 4 {
            letters
                .into_iter()
                .flat_map(|l| if l == E0 { vec![G0, G0, G0, Z, Z, G0] } else { vec![l] })
                .collect()
        } else {
            letters
        };
        Ok(Word::new(amb, letters))
    }

    fn full_letters(&mut self, a: &PartialInjection) -> Result<Vec<GeneratorLabel>> {
        if let Some((l, _)) = self.full_gens.iter().find(|(_, g)| g == a) {
            return Ok(vec![*l]);
        }
        match classify(a) {
            Classification::Minus => {
                let w = self.minus_letters(&project(a)?)?;
                if w.is_empty() {
                    return Ok(vec![Iota]);
                }
                Ok(w.into_iter()
                    .flat_map(|l| [l.to_plus().expect("rim letter"), Iota])
                    .collect())
            }
            Classification::Plus => {
                let w = self.minus_letters(&psi(a)?)?;
                Ok(w.into_iter().map(|l| l.to_plus().expect("rim letter")).collect())
            }
            Classification::Outside => {
                let split = outside_split(self.n, a)?;
                let mut w = Vec::new();
                if let Some(l) = &split.left {
                    w.extend(self.full_letters(l)?);
                }
                w.push(Z);
                if let Some(r) = &split.right {
                    w.extend(self.full_letters(r)?);
                }
                Ok(w)
            }
        }
    }
}

/// Reduction of a quasi-identity `γ` (every maximal arc mapped
/// onto itself, identically on all arcs but at most one) of rank at most
/// `n-3`: `γ = γ̄ · Π e_t` with `γ̄` extending `γ` identically over gaps.
fn quasi_identity_pieces(n: usize, gamma: &PartialInjection) -> Result<Vec<PartialInjection>> {
    let arcs = maximal_arcs_mask(n, gamma.dom_mask());
    let l = arcs.len();
    if l <= 1 {
        return Ok(vec![*gamma]);
    }
    let moved: Vec<usize> =
        (0..l).filter(|&i| arcs[i].points().any(|x| gamma.apply(x) != Some(x))).collect();
    check(moved.len() <= 1, || format!("{gamma} is not a quasi-identity"))?;
    let j = moved.first().copied().unwrap_or(0);
    let dom = |x: i64| gamma.in_domain(rim_mod(n, x));

    let fill: Vec<usize> = if l == 2 {
        let other = arcs[1 - j];
        let (r, s) = (other.start as i64, other.end as i64);
        let t = if !dom(r - 2) { r - 1 } else { s + 1 };
        vec![rim_mod(n, t)]
    } else {
        let i = (0..l).find(|&i| j != i && j != (i + 1) % l).expect("l >= 3");
        let (from, to) = (arcs[i].end, arcs[(i + 1) % l].start);
        let mut v = Vec::new();
        let mut x = rim_mod(n, from as i64 + 1);
        while x != to {
            v.push(x);
            x = rim_mod(n, x as i64 + 1);
        }
        v
    };
    let bar = rim_map(n, gamma.pairs().chain(fill.iter().map(|&x| (x, x))))?;
    let mut pieces = vec![bar];
    pieces.extend(fill.iter().map(|&t| rim_e(n, t)));
    check(product(gamma.ambient(), &pieces) == *gamma, || format!("extension of {gamma} does not restrict back"))?;
    Ok(pieces)
}

/// `a = left · z · right` for an element moving the hub. A missing side
/// stands for the identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OutsideSplit {
    /// Which of the five rank cases applied (rank 4 down to rank 1).
    pub case: u8,
    pub left: Option<PartialInjection>,
    pub right: Option<PartialInjection>,
}

pub fn outside_split(n: usize, a: &PartialInjection) -> Result<OutsideSplit> {
    let amb = Ambient::wheel(n)?;
    let z = build(n, Z)?;
    let map = |pairs: &[(usize, usize)]| PartialInjection::from_pairs(amb, pairs.iter().copied());
    let in_dom = a.in_domain(0);
    let in_im = a.in_image(0);
    let rim_dom: Vec<usize> = a.domain().filter(|&x| x != 0).collect();

    // cases whose hub sits only in the image are handled through the inverse
    let mirror = |inv: OutsideSplit| OutsideSplit {
        case: inv.case,
        left: inv.right.map(|r| r.inverse()),
        right: inv.left.map(|l| l.inverse()),
    };
    let split = match a.rank() {
        4 if in_dom && in_im => {
            let i = a.inverse().apply(0).unwrap();
            let left = map(&[(0, 0), (rim_mod(n, i as i64 - 1), n), (i, 1), (rim_mod(n, i as i64 + 1), 2)])?;
            with_right(1, left, z, a)?
        }
        3 if in_dom && in_im => {
            let i = a.inverse().apply(0).unwrap();
            let other = *rim_dom.iter().find(|&&x| x != i).unwrap();
            with_right(2, map(&[(0, 0), (i, 1), (other, 2)])?, z, a)?
        }
        3 if in_dom => with_right(3, map(&[(0, 0), (rim_dom[0], 2), (rim_dom[1], n)])?, z, a)?,
        3 if in_im => mirror(outside_split(n, &a.inverse())?),
        2 if in_dom && in_im => {
            let i = a.inverse().apply(0).unwrap();
            with_right(4, map(&[(0, 0), (i, 1)])?, z, a)?
        }
        2 if in_dom => with_right(4, map(&[(0, 0), (rim_dom[0], 2)])?, z, a)?,
        2 if in_im => mirror(outside_split(n, &a.inverse())?),
        1 if in_dom => OutsideSplit { case: 5, left: None, right: Some(map(&[(1, a.apply(0).unwrap())])?) },
        1 if in_im => OutsideSplit { case: 5, left: Some(map(&[(rim_dom[0], 1)])?), right: None },
        k => {
            return Err(Error::Verification(format!("{a} of rank {k} moves the hub; no case applies")));
        }
    };

    let metric = Metric::new(&wheel(n)?)?;
    let id = PartialInjection::identity(amb);
    for side in [&split.left, &split.right].into_iter().flatten() {
        check(metric.is_isometry(side)? && classify(side) != Classification::Outside, || {
            format!("factor {side} of {a} is not hub-fixing or hub-avoiding")
        })?;
    }
    let rebuilt = split.left.unwrap_or(id) * z * split.right.unwrap_or(id);
    check(rebuilt == *a, || format!("split of {a} does not multiply back"))?;
    Ok(split)
}

fn with_right(case: u8, left: PartialInjection, z: PartialInjection, a: &PartialInjection) -> Result<OutsideSplit> {
    let right = (left * z).inverse() * *a;
    Ok(OutsideSplit { case, left: Some(left), right: Some(right) })
}

pub fn factor_minus(n: usize, a: &PartialInjection) -> Result<Word> {
    Factorizer::new(n)?.minus(a)
}

pub fn factor_full(n: usize, a: &PartialInjection) -> Result<Word> {
    Factorizer::new(n)?.full(a)
}
