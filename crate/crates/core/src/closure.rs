//! Monoid closure by right-multiplication BFS, Green's relations, and
//! bounds on the rank of a monoid.

use std::collections::VecDeque;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gens::{build, genset_minus, genset_plus, genset_union, max_c_index, GeneratorLabel};
use crate::graphs::wheel;
use crate::isometry::{dihedral, enumerate_dp, is_in_di, DEFAULT_VERTEX_CAP};
use crate::ptrans::{Ambient, PartialInjection};
use crate::wheel::{maximal_arcs_mask, psi, split_by_class, Arc};

pub const DEFAULT_ELEMENT_CAP: usize = 50_000_000;

const ROOT: u32 = u32::MAX;

/// The submonoid generated by a set of partial injections, with a shortest
/// word for every element and the right Cayley graph.
#[derive(Clone, Debug)]
pub struct MonoidClosure {
    ambient: Ambient,
    gens: Vec<PartialInjection>,
    elements: Vec<PartialInjection>,
    index: FxHashMap<PartialInjection, u32>,
    parent: Vec<u32>,
    parent_gen: Vec<u16>,
    depth: Vec<u32>,
    right: Vec<u32>,
}

/// BFS from the identity. Elements are numbered in discovery order, which
/// makes `word` a shortest word, ties going to the earlier generator.
pub fn generate(ambient: Ambient, gens: &[PartialInjection], cap: usize) -> Result<MonoidClosure> {
    if gens.is_empty() {
        return Err(Error::Usage("generate needs at least one generator".into()));
    }
    if let Some(g) = gens.iter().find(|g| g.ambient() != ambient) {
        return Err(Error::AmbientMismatch { left: ambient, right: g.ambient() });
    }
    let k = gens.len();
    let id = PartialInjection::identity(ambient);
    let mut c = MonoidClosure {
        ambient,
        gens: gens.to_vec(),
        elements: vec![id],
        index: FxHashMap::default(),
        parent: vec![ROOT],
        parent_gen: vec![0],
        depth: vec![0],
        right: Vec::new(),
    };
    c.index.insert(id, 0);
    let mut head = 0;
    while head < c.elements.len() {
        let x = c.elements[head];
        for (s, g) in gens.iter().enumerate() {
            let y = x.compose_unchecked(g);
            let next = c.elements.len() as u32;
            let idx = *c.index.entry(y).or_insert(next);
            if idx == next {
                if c.elements.len() >= cap {
                    return Err(Error::ElementCap(cap));
                }
                c.elements.push(y);
                c.parent.push(head as u32);
                c.parent_gen.push(s as u16);
                c.depth.push(c.depth[head] + 1);
            }
            c.right.push(idx);
        }
        head += 1;
    }
    debug_assert_eq!(c.right.len(), c.elements.len() * k);
    Ok(c)
}

impl MonoidClosure {
    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn gens(&self) -> &[PartialInjection] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements in BFS order; index 0 is the identity.
    pub fn elements(&self) -> &[PartialInjection] {
        &self.elements
    }

    pub fn index_of(&self, a: &PartialInjection) -> Option<usize> {
        self.index.get(a).map(|&i| i as usize)
    }

    pub fn contains(&self, a: &PartialInjection) -> bool {
        self.index.contains_key(a)
    }

    /// Elements in canonical order, for set comparisons.
    pub fn sorted_elements(&self) -> Vec<PartialInjection> {
        let mut v = self.elements.clone();
        v.sort_unstable();
        v
    }

    /// Index of `x·s`.
    pub fn right(&self, x: usize, s: usize) -> usize {
        self.right[x * self.gens.len() + s] as usize
    }

    /// Index of `s·x`, looked up on demand.
    pub fn left(&self, x: usize, s: usize) -> usize {
        let y = self.gens[s].compose_unchecked(&self.elements[x]);
        self.index[&y] as usize
    }

    /// Shortest word for element `x` as generator indices.
    pub fn word(&self, x: usize) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.depth[x] as usize);
        let mut i = x;
        while self.parent[i] != ROOT {
            w.push(self.parent_gen[i] as usize);
            i = self.parent[i] as usize;
        }
        w.reverse();
        w
    }

    pub fn max_word_len(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0) as usize
    }
}

/// Set equality between a closure and an element list.
pub fn same_set(c: &MonoidClosure, target: &[PartialInjection]) -> bool {
    c.len() == target.len() && target.iter().all(|a| c.contains(a))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GreenMode {
    /// L, R, H from images and domains; D as the join of L and R.
    ByDomIm,
    /// Strongly connected components of the left, right and two-sided
    /// Cayley graphs.
    ByIdeals,
}

/// Partitions of the closure's element indices, each as a label vector
/// numbered by first appearance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GreenStructure {
    pub l: Vec<u32>,
    pub r: Vec<u32>,
    pub h: Vec<u32>,
    pub d: Vec<u32>,
}

impl GreenStructure {
    pub fn d_count(&self) -> usize {
        class_count(&self.d)
    }

    /// D-classes as sorted index lists, ordered by their first element.
    pub fn d_classes(&self) -> Vec<Vec<usize>> {
        classes(&self.d)
    }
}

pub fn class_count(labels: &[u32]) -> usize {
    labels.iter().copied().max().map_or(0, |m| m as usize + 1)
}

pub fn classes(labels: &[u32]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); class_count(labels)];
    for (i, &l) in labels.iter().enumerate() {
        out[l as usize].push(i);
    }
    out
}

/// Renumbers arbitrary keys by first appearance.
pub fn canonical_labels<K: std::hash::Hash + Eq>(keys: impl IntoIterator<Item = K>) -> Vec<u32> {
    let mut seen: FxHashMap<K, u32> = FxHashMap::default();
    keys.into_iter()
        .map(|k| {
            let next = seen.len() as u32;
            *seen.entry(k).or_insert(next)
        })
        .collect()
}

fn find(p: &mut [usize], mut x: usize) -> usize {
    while p[x] != x {
        p[x] = p[p[x]];
        x = p[x];
    }
    x
}

fn join(l: &[u32], r: &[u32]) -> Vec<u32> {
    let n = l.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut first_l: FxHashMap<u32, usize> = FxHashMap::default();
    let mut first_r: FxHashMap<u32, usize> = FxHashMap::default();
    for i in 0..n {
        for (map, key) in [(&mut first_l, l[i]), (&mut first_r, r[i])] {
            let j = *map.entry(key).or_insert(i);
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            parent[a.max(b)] = a.min(b);
        }
    }
    canonical_labels((0..n).map(|i| find(&mut parent, i)))
}

fn scc_labels(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> Vec<u32> {
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, 0);
    for _ in 0..n {
        g.add_node(());
    }
    for (a, b) in edges {
        g.add_edge(NodeIndex::new(a), NodeIndex::new(b), ());
    }
    let mut comp = vec![0usize; n];
    for (c, members) in tarjan_scc(&g).into_iter().enumerate() {
        for v in members {
            comp[v.index()] = c;
        }
    }
    canonical_labels(comp)
}

pub fn green(c: &MonoidClosure, mode: GreenMode) -> GreenStructure {
    match mode {
        GreenMode::ByDomIm => {
            let l = canonical_labels(c.elements.iter().map(|a| a.im_mask()));
            let r = canonical_labels(c.elements.iter().map(|a| a.dom_mask()));
            let h = canonical_labels(c.elements.iter().map(|a| (a.dom_mask(), a.im_mask())));
            let d = join(&l, &r);
            GreenStructure { l, r, h, d }
        }
        GreenMode::ByIdeals => {
            let n = c.len();
            let k = c.gens.len();
            let right: Vec<(usize, usize)> =
                (0..n).flat_map(|x| (0..k).map(move |s| (x, s))).map(|(x, s)| (x, c.right(x, s))).collect();
            let left: Vec<(usize, usize)> =
                (0..n).flat_map(|x| (0..k).map(move |s| (x, s))).map(|(x, s)| (x, c.left(x, s))).collect();
            let r = scc_labels(n, right.iter().copied());
            let l = scc_labels(n, left.iter().copied());
            let d = scc_labels(n, right.iter().chain(&left).copied());
            let h = canonical_labels(l.iter().zip(&r));
            GreenStructure { l, r, h, d }
        }
    }
}

/// Outcome of checking that a set generates a target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RankUpper {
    Generated(usize),
    /// A target element the generators miss.
    Missing(PartialInjection),
    /// A generated element outside the target.
    Extra(PartialInjection),
}

pub fn rank_upper(ambient: Ambient, gens: &[PartialInjection], target: &[PartialInjection]) -> Result<RankUpper> {
    let c = generate(ambient, gens, DEFAULT_ELEMENT_CAP)?;
    let set: FxHashSet<&PartialInjection> = target.iter().collect();
    if let Some(a) = c.elements().iter().find(|a| !set.contains(a)) {
        return Ok(RankUpper::Extra(*a));
    }
    if let Some(a) = target.iter().find(|a| !c.contains(a)) {
        return Ok(RankUpper::Missing(*a));
    }
    Ok(RankUpper::Generated(gens.len()))
}

fn verify(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Verification(what()))
    }
}

fn image_arc_sizes(n: usize, a: &PartialInjection) -> Vec<usize> {
    let mut v: Vec<usize> = maximal_arcs_mask(n, a.im_mask()).iter().map(Arc::len).collect();
    v.sort_unstable();
    v
}

/// Lower bound on the rank of the hub-avoiding monoid, obtained by checking
/// inside `c` each fact a generating set is forced to respect:
/// two units, one element of rank `n-1`, and for every `c_j` a distinct
/// rank `n-2` element whose image has maximal arcs of sizes `j+1`, `n-j-3`.
pub fn rank_lower_minus(n: usize, c: &MonoidClosure) -> Result<usize> {
    verify(c.ambient() == Ambient::rim(n)?, || format!("closure is on {}, not the rim", c.ambient()))?;
    let minus = split_by_class(&enumerate_dp(&wheel(n)?, DEFAULT_VERTEX_CAP)?)?.minus;
    verify(same_set(c, &minus), || format!("closure is not the hub-avoiding monoid for n = {n}"))?;

    // units: the dihedral group, which is not cyclic
    let units: Vec<PartialInjection> = c.elements().iter().filter(|a| a.rank() == n).copied().collect();
    let d = dihedral(n)?;
    verify(units.len() == 2 * n && units.iter().all(|u| d.contains(u)), || "units are not D_2n".into())?;
    for u in &units {
        let cyc = generate(c.ambient(), std::slice::from_ref(u), DEFAULT_ELEMENT_CAP)?;
        verify(cyc.len() < units.len(), || format!("{u} generates all units"))?;
    }

    // products of units stay units, so rank n-1 needs its own generator
    verify(c.elements().iter().any(|a| a.rank() == n - 1), || "no element of rank n-1".into())?;
    for u in &units {
        for v in &units {
            verify(u.compose_unchecked(v).rank() == n, || "units not closed".into())?;
        }
    }

    let high: Vec<PartialInjection> = c.elements().iter().filter(|a| a.rank() >= n - 1).copied().collect();
    for a in &high {
        verify(is_in_di(n, a)?, || format!("{a} has rank >= n-1 but is not dihedral"))?;
    }
    let di = generate(c.ambient(), &high, DEFAULT_ELEMENT_CAP)?;

    let mut signatures = FxHashSet::default();
    for j in 1..=max_c_index(n) {
        let cj = build(n, GeneratorLabel::C(j))?;
        verify(c.contains(&cj) && cj.rank() == n - 2, || format!("c_{j} missing or wrong rank"))?;
        verify(!is_in_di(n, &cj)?, || format!("c_{j} is dihedral"))?;
        verify(!di.contains(&cj), || format!("c_{j} is a product of rank >= n-1 elements"))?;
        let mut want = vec![j + 1, n - j - 3];
        want.sort_unstable();
        for p in c.elements().iter().filter(|p| p.dom_mask() == cj.dom_mask()) {
            let got = image_arc_sizes(n, p);
            verify(got == want, || format!("{p} shares the domain of c_{j} but has image arcs {got:?}"))?;
        }
        verify(signatures.insert(want), || format!("image signature of c_{j} repeats"))?;
    }
    Ok(3 + max_c_index(n))
}

/// Lower bound on the rank of the whole monoid for `n >= 5`: the elements
/// moving the hub have rank at most 4 while the hub-fixing and hub-avoiding
/// generators all have rank at least 5, so a generating set contains one of
/// `Minus ∪ Plus` plus at least one more element.
pub fn rank_lower_full(n: usize, c: &MonoidClosure) -> Result<usize> {
    if n < 5 {
        return Err(Error::Usage(format!("rank_lower_full needs n >= 5, got {n}; use rank_exact")));
    }
    let amb = Ambient::wheel(n)?;
    verify(c.ambient() == amb, || format!("closure is on {}, not the wheel", c.ambient()))?;
    let dp = enumerate_dp(&wheel(n)?, DEFAULT_VERTEX_CAP)?;
    verify(same_set(c, &dp), || format!("closure is not the full monoid for n = {n}"))?;
    let split = split_by_class(&dp)?;

    if let Some(a) = split.outside.iter().find(|a| a.rank() > 4) {
        return Err(Error::Verification(format!("{a} moves the hub with rank > 4")));
    }
    let union_gens = genset_union(n)?;
    if let Some(a) = union_gens.elements.iter().find(|a| a.rank() < 5) {
        return Err(Error::Verification(format!("generator {a} has rank < 5")));
    }

    let minus_wheel: Vec<PartialInjection> =
        split.minus.iter().map(|a| a.with_ambient(amb)).collect::<Result<_>>()?;
    let mut union_set = minus_wheel.clone();
    union_set.extend(&split.plus);
    let u = generate(amb, &union_gens.elements, DEFAULT_ELEMENT_CAP)?;
    verify(same_set(&u, &union_set), || "union generators miss Minus ∪ Plus".into())?;

    let minus_set: FxHashSet<PartialInjection> = minus_wheel.iter().copied().collect();
    for x in &minus_wheel {
        for s in &union_gens.elements {
            verify(
                minus_set.contains(&x.compose_unchecked(s)) && minus_set.contains(&s.compose_unchecked(x)),
                || format!("Minus is not an ideal at {x}"),
            )?;
        }
    }

    let plus_gens = genset_plus(n)?;
    let p = generate(amb, &plus_gens.elements, DEFAULT_ELEMENT_CAP)?;
    verify(same_set(&p, &split.plus), || "Plus is not generated by its generators".into())?;
    let images: FxHashSet<PartialInjection> = split.plus.iter().map(psi).collect::<Result<_>>()?;
    verify(images.len() == split.plus.len() && images.len() == split.minus.len(), || "Ψ is not a bijection".into())?;
    for x in &split.plus {
        for s in &plus_gens.elements {
            verify(psi(&x.compose_unchecked(s))? == psi(x)?.compose_unchecked(&psi(s)?), || {
                format!("Ψ is not multiplicative at {x}")
            })?;
        }
    }

    let minus_closure = generate(Ambient::rim(n)?, &genset_minus(n)?.elements, DEFAULT_ELEMENT_CAP)?;
    Ok(rank_lower_minus(n, &minus_closure)? + 2)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RankSearch {
    Exact { rank: usize, witness: Vec<PartialInjection> },
    /// The budget of closure computations ran out first.
    Inconclusive { closures: usize },
}

struct Budget {
    left: usize,
    used: usize,
}

impl Budget {
    fn take(&mut self) -> bool {
        if self.left == 0 {
            return false;
        }
        self.left -= 1;
        self.used += 1;
        true
    }
}

/// Visits k-subsets of `0..m` in lexicographic order until `f` returns
/// `Some`.
fn subsets<T>(m: usize, k: usize, mut f: impl FnMut(&[usize]) -> Option<T>) -> Option<T> {
    let mut idx: Vec<usize> = (0..k).collect();
    if k > m {
        return None;
    }
    loop {
        if let Some(t) = f(&idx) {
            return Some(t);
        }
        let mut i = k;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if idx[i] < m - k + i {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Exact rank by search, for small monoids.
///
/// A generating set must contain a generating set of the group of units,
/// and any non-unit generator `x` may be swapped for `u x v` with units
/// `u`, `v` without changing what is generated. So the rank is the rank of
/// the units plus the least number of non-units that, together with the
/// units, generate everything; those are searched one per `x -> u x v`
/// orbit, highest rank first. `budget` bounds the number of closures.
pub fn rank_exact(c: &MonoidClosure, budget: usize) -> Result<RankSearch> {
    let amb = c.ambient();
    let full = amb.len();
    let units: Vec<PartialInjection> = c.elements().iter().filter(|a| a.rank() == full).copied().collect();
    let mut budget = Budget { left: budget, used: 0 };

    // the identity comes for free in a monoid
    let mut unit_gens = (units.len() == 1).then(Vec::new);
    for k in 1..=units.len() {
        if unit_gens.is_some() {
            break;
        }
        let found = subsets(units.len(), k, |ix| {
            if !budget.take() {
                return Some(None);
            }
            let gs: Vec<PartialInjection> = ix.iter().map(|&i| units[i]).collect();
            let g = generate(amb, &gs, DEFAULT_ELEMENT_CAP).ok()?;
            (g.len() == units.len()).then_some(Some(gs))
        });
        match found {
            Some(Some(gs)) => {
                unit_gens = Some(gs);
                break;
            }
            Some(None) => return Ok(RankSearch::Inconclusive { closures: budget.used }),
            None => {}
        }
    }
    let unit_gens = unit_gens.unwrap_or_default();
    if units.len() == c.len() {
        return Ok(RankSearch::Exact { rank: unit_gens.len(), witness: unit_gens });
    }

    let mut seen: FxHashSet<PartialInjection> = FxHashSet::default();
    let mut reps: Vec<PartialInjection> = Vec::new();
    for x in c.elements().iter().filter(|a| a.rank() < full) {
        if seen.contains(x) {
            continue;
        }
        reps.push(*x);
        let mut queue = VecDeque::from([*x]);
        seen.insert(*x);
        while let Some(y) = queue.pop_front() {
            for u in &units {
                for z in [u.compose_unchecked(&y), y.compose_unchecked(u)] {
                    if seen.insert(z) {
                        queue.push_back(z);
                    }
                }
            }
        }
    }
    reps.sort_by_key(|a| std::cmp::Reverse(a.rank()));

    for k in 1..=reps.len() {
        let found = subsets(reps.len(), k, |ix| {
            if !budget.take() {
                return Some(None);
            }
            let mut gs = units.clone();
            gs.extend(ix.iter().map(|&i| reps[i]));
            let g = generate(amb, &gs, DEFAULT_ELEMENT_CAP).ok()?;
            (g.len() == c.len()).then(|| Some(ix.iter().map(|&i| reps[i]).collect::<Vec<_>>()))
        });
        match found {
            Some(Some(extra)) => {
                let mut witness = unit_gens.clone();
                witness.extend(extra);
                return Ok(RankSearch::Exact { rank: witness.len(), witness });
            }
            Some(None) => return Ok(RankSearch::Inconclusive { closures: budget.used }),
            None => {}
        }
    }
    Err(Error::Verification("no subset generates the monoid".into()))
}
