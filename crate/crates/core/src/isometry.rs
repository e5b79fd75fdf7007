//! Partial isometries of a graph, brute-force enumeration of `DP(G)`, and
//! the dihedral group `D_2n` with membership in the dihedral inverse monoid.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::{rim_mod, DistanceMatrix, Graph};
use crate::ptrans::{Ambient, PartialInjection};

/// Default bound on the number of vertices accepted by [`enumerate_dp`].
pub const DEFAULT_VERTEX_CAP: usize = 10;

/// A graph's metric, precomputed for repeated isometry tests.
#[derive(Clone, Debug)]
pub struct Metric {
    ambient: Ambient,
    dist: DistanceMatrix,
}

impl Metric {
    pub fn new(graph: &Graph) -> Result<Self> {
        Ok(Metric {
            ambient: graph.ambient()?,
            dist: graph.distances(),
        })
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn distance(&self, u: usize, v: usize) -> usize {
        self.dist.get(u, v)
    }

    /// Whether `a` preserves distance between every pair of domain points.
    pub fn is_isometry(&self, a: &PartialInjection) -> Result<bool> {
        if a.ambient() != self.ambient {
            return Err(Error::AmbientMismatch {
                left: a.ambient(),
                right: self.ambient,
            });
        }
        let pairs: Vec<_> = a.pairs().collect();
        for (k, &(x, xa)) in pairs.iter().enumerate() {
            for &(y, ya) in &pairs[k + 1..] {
                if self.dist.get(x, y) != self.dist.get(xa, ya) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

pub fn is_partial_isometry(graph: &Graph, a: &PartialInjection) -> Result<bool> {
    Metric::new(graph)?.is_isometry(a)
}

/// All partial isometries of `graph`, sorted by [`PartialInjection`]'s order
/// (lexicographic on the domain-sorted pair lists).
///
/// Candidates are built point by point with distance pruning: a branch is cut
/// as soon as one new pair disagrees with an earlier one. The depth-first
/// pre-order of this search is already the sorted order.
pub fn enumerate_dp(graph: &Graph, vertex_cap: usize) -> Result<Vec<PartialInjection>> {
    if graph.vertex_count() > vertex_cap {
        return Err(Error::EnumerationCap {
            vertices: graph.vertex_count(),
            cap: vertex_cap,
        });
    }
    let metric = Metric::new(graph)?;
    let amb = metric.ambient;
    let points: Vec<usize> = amb.points().collect();

    let roots: Vec<(usize, usize)> = points
        .iter()
        .flat_map(|&x| points.iter().map(move |&y| (x, y)))
        .collect();
    let branches: Vec<Vec<PartialInjection>> = roots
        .par_iter()
        .map(|&(x, y)| {
            let mut out = Vec::new();
            let mut stack = vec![(x, y)];
            extend(&metric, &points, &mut stack, &mut out);
            out
        })
        .collect();

    let mut all = Vec::with_capacity(1 + branches.iter().map(Vec::len).sum::<usize>());
    all.push(PartialInjection::empty(amb));
    all.extend(branches.into_iter().flatten());
    Ok(all)
}

fn extend(metric: &Metric, points: &[usize], stack: &mut Vec<(usize, usize)>, out: &mut Vec<PartialInjection>) {
    out.push(PartialInjection::from_pairs(metric.ambient, stack.iter().copied()).expect("injective by construction"));
    let last = stack.last().expect("nonempty").0;
    for &x in points.iter().filter(|&&x| x > last) {
        for &y in points {
            let ok = stack
                .iter()
                .all(|&(u, v)| v != y && metric.dist.get(u, x) == metric.dist.get(v, y));
            if ok {
                stack.push((x, y));
                extend(metric, points, stack, out);
                stack.pop();
            }
        }
    }
}

/// An element `h^r g^k` of `D_2n` (`r` is 0 or 1), composed left to right.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Symmetry {
    pub reflect: bool,
    pub shift: usize,
}

impl Symmetry {
    pub fn rotation(shift: usize) -> Self {
        Symmetry { reflect: false, shift }
    }

    pub fn reflection(shift: usize) -> Self {
        Symmetry { reflect: true, shift }
    }

    /// Image of rim point `i` under the closed forms
    /// `i g^k = i + k` and `i h g^k = k - i + 1` (mod n, in `1..=n`).
    pub fn apply(&self, n: usize, i: usize) -> usize {
        let (i, k) = (i as i64, self.shift as i64);
        if self.reflect {
            rim_mod(n, k - i + 1)
        } else {
            rim_mod(n, i + k)
        }
    }

    pub fn to_map(&self, n: usize) -> PartialInjection {
        let amb = Ambient::rim(n).expect("n fits");
        PartialInjection::from_fn(amb, 1..=n, |i| self.apply(n, i)).expect("dihedral maps are bijections")
    }
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.reflect {
            write!(f, "hg^{}", self.shift)
        } else {
            write!(f, "g^{}", self.shift)
        }
    }
}

/// The dihedral group of order `2n` acting on the rim `{1..n}`.
#[derive(Clone, Debug)]
pub struct DihedralGroup {
    n: usize,
    symmetries: Vec<Symmetry>,
    elements: Vec<PartialInjection>,
}

impl DihedralGroup {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Elements in the order `g^0, ..., g^{n-1}, hg^0, ..., hg^{n-1}`.
    pub fn elements(&self) -> &[PartialInjection] {
        &self.elements
    }

    pub fn symmetries(&self) -> &[Symmetry] {
        &self.symmetries
    }

    pub fn iter(&self) -> impl Iterator<Item = (Symmetry, &PartialInjection)> {
        self.symmetries.iter().copied().zip(self.elements.iter())
    }

    pub fn contains(&self, a: &PartialInjection) -> bool {
        self.elements.contains(a)
    }
}

/// Builds `D_2n` from the closed forms and checks the defining relations
/// `g^n = 1`, `h^2 = 1`, `hg = g^{n-1}h`.
pub fn dihedral(n: usize) -> Result<DihedralGroup> {
    if n < 3 {
        return Err(Error::TooSmall { family: "dihedral group", min: 3, n });
    }
    Ambient::rim(n)?;
    let symmetries: Vec<Symmetry> = (0..n)
        .map(Symmetry::rotation)
        .chain((0..n).map(Symmetry::reflection))
        .collect();
    let elements: Vec<PartialInjection> = symmetries.iter().map(|s| s.to_map(n)).collect();

    let id = &elements[0];
    let g = &elements[1];
    let h = &elements[n];
    let mut gn = *id;
    for _ in 0..n {
        gn = gn * *g;
    }
    let g_inv = elements[n - 1];
    let relations = gn == *id && *h * *h == *id && *h * *g == g_inv * *h;
    let mut distinct = elements.clone();
    distinct.sort();
    distinct.dedup();
    if !relations || distinct.len() != 2 * n {
        return Err(Error::Verification(format!("dihedral relations fail for n = {n}")));
    }
    Ok(DihedralGroup { n, symmetries, elements })
}

/// If `a` is the restriction of some `σ ∈ D_2n` to its domain, returns the
/// first such `σ` in the order `g^0..g^{n-1}, hg^0..hg^{n-1}`.
///
/// Only two candidates can match a nonempty map: the rotation and the
/// reflection sending the least domain point to its image. Rotations are
/// tried first, which reproduces the full scan order.
pub fn dihedral_witness(n: usize, a: &PartialInjection) -> Result<Option<Symmetry>> {
    let amb = Ambient::rim(n)?;
    if a.ambient() != amb {
        return Err(Error::AmbientMismatch {
            left: a.ambient(),
            right: amb,
        });
    }
    let Some((x, y)) = a.pairs().next() else {
        return Ok(Some(Symmetry::rotation(0)));
    };
    let (x, y) = (x as i64, y as i64);
    let candidates = [
        Symmetry::rotation(rim_mod(n, y - x) % n),
        Symmetry::reflection(rim_mod(n, y + x - 1) % n),
    ];
    Ok(candidates
        .into_iter()
        .find(|s| a.pairs().all(|(p, q)| s.apply(n, p) == q)))
}

/// Membership in the dihedral inverse monoid `DI_n`.
pub fn is_in_di(n: usize, a: &PartialInjection) -> Result<bool> {
    Ok(dihedral_witness(n, a)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{complete, cycle, path, star, wheel};

    fn rim(n: usize) -> Ambient {
        Ambient::rim(n).unwrap()
    }

    /// |I_m| = sum_k C(m,k)^2 k!
    fn count_partial_injections(m: usize) -> usize {
        let binom = |n: usize, k: usize| (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
        let fact = |k: usize| (1..=k).product::<usize>();
        (0..=m).map(|k| binom(m, k).pow(2) * fact(k)).sum()
    }

    /// Every partial injection on `amb`, by brute force over image tables.
    fn all_partial_injections(amb: Ambient) -> Vec<PartialInjection> {
        let pts: Vec<usize> = amb.points().collect();
        let mut out = vec![];
        let mut choice = vec![None; pts.len()];
        fn rec(
            amb: Ambient,
            pts: &[usize],
            i: usize,
            choice: &mut Vec<Option<usize>>,
            out: &mut Vec<PartialInjection>,
        ) {
            if i == pts.len() {
                let pairs = pts.iter().zip(choice.iter()).filter_map(|(&x, y)| y.map(|y| (x, y)));
                out.push(PartialInjection::from_pairs(amb, pairs).unwrap());
                return;
            }
            choice[i] = None;
            rec(amb, pts, i + 1, choice, out);
            for &y in pts {
                if !choice[..i].contains(&Some(y)) {
                    choice[i] = Some(y);
                    rec(amb, pts, i + 1, choice, out);
                }
            }
            choice[i] = None;
        }
        rec(amb, &pts, 0, &mut choice, &mut out);
        out
    }

    #[test]
    fn oracle_counts() {
        assert_eq!(count_partial_injections(3), 34);
        assert_eq!(all_partial_injections(rim(3)).len(), 34);
        assert_eq!(all_partial_injections(rim(5)).len(), count_partial_injections(5));
    }

    #[test]
    fn isometry_predicate() {
        let w6 = wheel(6).unwrap();
        let amb = w6.ambient().unwrap();
        assert!(is_partial_isometry(&w6, &PartialInjection::empty(amb)).unwrap());
        let g = PartialInjection::from_fn(amb, 1..=6, |i| i % 6 + 1).unwrap();
        assert!(is_partial_isometry(&w6, &g).unwrap());
        // d(0,3) = 1 but d(1,4) = 2
        let bad = PartialInjection::from_pairs(amb, [(0, 1), (3, 4)]).unwrap();
        assert_eq!(w6.distance_bfs(0, 3).unwrap(), 1);
        assert_eq!(w6.distance_bfs(1, 4).unwrap(), 2);
        assert!(!is_partial_isometry(&w6, &bad).unwrap());
        let wrong = PartialInjection::identity(rim(6));
        assert!(is_partial_isometry(&w6, &wrong).is_err());
    }

    #[test]
    fn complete_graph_gives_all_partial_injections() {
        for m in 1..=4 {
            let dp = enumerate_dp(&complete(m).unwrap(), DEFAULT_VERTEX_CAP).unwrap();
            assert_eq!(dp.len(), count_partial_injections(m));
        }
        assert_eq!(enumerate_dp(&complete(3).unwrap(), 10).unwrap().len(), 34);
    }

    #[test]
    fn enumeration_matches_filtered_brute_force() {
        let graphs = [wheel(4).unwrap(), cycle(5).unwrap(), path(4).unwrap(), star(5).unwrap()];
        for g in &graphs {
            let metric = Metric::new(g).unwrap();
            let mut brute: Vec<_> = all_partial_injections(g.ambient().unwrap())
                .into_iter()
                .filter(|a| metric.is_isometry(a).unwrap())
                .collect();
            brute.sort();
            let dp = enumerate_dp(g, DEFAULT_VERTEX_CAP).unwrap();
            assert_eq!(dp, brute, "{g}");
        }
    }

    #[test]
    fn enumeration_cap() {
        assert_eq!(
            enumerate_dp(&complete(11).unwrap(), DEFAULT_VERTEX_CAP),
            Err(Error::EnumerationCap { vertices: 11, cap: 10 })
        );
    }

    #[test]
    fn wheel_four_size_is_stable() {
        // Regression value from the brute-force filter above.
        let metric = Metric::new(&wheel(4).unwrap()).unwrap();
        let brute = all_partial_injections(metric.ambient())
            .into_iter()
            .filter(|a| metric.is_isometry(a).unwrap())
            .count();
        let dp = enumerate_dp(&wheel(4).unwrap(), DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!(dp.len(), brute);
        assert_eq!(dp.len(), 410);
    }

    #[test]
    fn dihedral_closed_forms() {
        let d6 = dihedral(6).unwrap();
        assert_eq!(d6.elements().len(), 12);
        let d5 = dihedral(5).unwrap();
        let hg3 = Symmetry::reflection(3).to_map(5);
        assert_eq!(hg3.apply(2), Some(2));
        assert_eq!(hg3.apply(4), Some(5));
        for n in 3..=9 {
            let d = dihedral(n).unwrap();
            for a in 0..n {
                for b in 0..n {
                    assert_eq!(d.elements()[a] * d.elements()[b], d.elements()[(a + b) % n]);
                }
            }
            // closed under composition
            for x in d.elements() {
                for y in d.elements() {
                    assert!(d.contains(&(*x * *y)));
                }
            }
        }
        assert_eq!(d5.elements()[5], Symmetry::reflection(0).to_map(5));
        assert!(dihedral(2).is_err());
    }

    #[test]
    fn dihedral_membership() {
        let amb = rim(6);
        assert_eq!(
            dihedral_witness(6, &PartialInjection::empty(amb)).unwrap(),
            Some(Symmetry::rotation(0))
        );
        let c1 = PartialInjection::from_pairs(amb, [(1, 1), (2, 2), (4, 5), (5, 4)]).unwrap();
        assert!(!is_in_di(6, &c1).unwrap());
        let a = PartialInjection::from_pairs(amb, [(1, 3), (2, 4)]).unwrap();
        assert_eq!(dihedral_witness(6, &a).unwrap(), Some(Symmetry::rotation(2)));
    }

    #[test]
    fn fast_witness_agrees_with_full_scan() {
        for n in 3..=6 {
            let d = dihedral(n).unwrap();
            for a in all_partial_injections(rim(n)) {
                let scan = d
                    .iter()
                    .find(|(_, s)| a.pairs().all(|(x, y)| s.apply(x) == Some(y)))
                    .map(|(sym, _)| sym);
                assert_eq!(dihedral_witness(n, &a).unwrap(), scan, "n={n} {a}");
            }
        }
    }

    #[test]
    fn cycle_isometries_are_dihedral_restrictions() {
        for n in 3..=7 {
            let dp = enumerate_dp(&cycle(n).unwrap(), DEFAULT_VERTEX_CAP).unwrap();
            let di: Vec<_> = all_partial_injections(rim(n))
                .into_iter()
                .filter(|a| is_in_di(n, a).unwrap())
                .collect();
            let mut di = di;
            di.sort();
            assert_eq!(dp, di, "n={n}");
        }
    }
}
