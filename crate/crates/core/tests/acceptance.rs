//! Acceptance criteria 1-10. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line; exits nonzero on any FAIL.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use dpw_core::closure::{
    generate, green, rank_exact, rank_lower_full, rank_lower_minus, GreenMode, MonoidClosure, RankSearch,
    DEFAULT_ELEMENT_CAP,
};
use dpw_core::factor::Factorizer;
use dpw_core::gens::{build, genset_full, genset_minus, GeneratorLabel, SetKind};
use dpw_core::graphs::{wheel, wheel_distance};
use dpw_core::wheel::{char_member_minus, j_type, psi, psi_inv, split_lemma_check};
use dpw_core::{Ambient, PartialInjection};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

const METRIC_BUDGET: Duration = Duration::from_secs(1);
const CHAR_SAMPLES: usize = 1_000_000;
const FACTOR_SAMPLES: usize = 100_000;
const RANK_BUDGET: usize = 100_000;

// ---- oracles ------------------------------------------------------------

/// A map on `{lo..=n}` as `m[v] = Some(image)`.
type Map = Vec<Option<usize>>;

fn wheel_adjacency(n: usize) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n + 1];
    for i in 1..=n {
        let j = i % n + 1;
        adj[0].push(i);
        adj[i].push(0);
        adj[i].push(j);
        adj[j].push(i);
    }
    adj
}

fn bfs_all(n: usize) -> Vec<Vec<usize>> {
    let adj = wheel_adjacency(n);
    (0..=n)
        .map(|s| {
            let mut d = vec![usize::MAX; n + 1];
            d[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &v in &adj[u] {
                    if d[v] == usize::MAX {
                        d[v] = d[u] + 1;
                        q.push_back(v);
                    }
                }
            }
            d
        })
        .collect()
}

fn preserves(d: &[Vec<usize>], m: &Map) -> bool {
    let pairs: Vec<(usize, usize)> = m.iter().enumerate().filter_map(|(x, y)| y.map(|y| (x, y))).collect();
    pairs.iter().all(|&(a, fa)| pairs.iter().all(|&(b, fb)| d[a][b] == d[fa][fb]))
}

fn to_pi(lo: usize, n: usize, m: &Map) -> PartialInjection {
    let amb = Ambient::new(lo, n).unwrap();
    PartialInjection::from_pairs(amb, m.iter().enumerate().filter_map(|(x, y)| y.map(|y| (x, y)))).unwrap()
}

/// Every partial isometry of `W_n`, by depth-first extension with pruning.
fn oracle_dp(n: usize) -> Vec<Map> {
    let d = bfs_all(n);
    let mut out = Vec::new();
    let mut m: Map = vec![None; n + 1];
    let mut used = vec![false; n + 1];
    fn go(v: usize, n: usize, d: &[Vec<usize>], m: &mut Map, used: &mut [bool], out: &mut Vec<Map>) {
        if v > n {
            out.push(m.clone());
            return;
        }
        go(v + 1, n, d, m, used, out);
        for y in 0..=n {
            if used[y] {
                continue;
            }
            if (0..v).all(|u| m[u].is_none_or(|fu| d[u][v] == d[fu][y])) {
                m[v] = Some(y);
                used[y] = true;
                go(v + 1, n, d, m, used, out);
                used[y] = false;
                m[v] = None;
            }
        }
    }
    go(0, n, &d, &mut m, &mut used, &mut out);
    out
}

fn hubless(m: &Map) -> bool {
    m[0].is_none() && !m.contains(&Some(0))
}

fn hub_fixed(m: &Map) -> bool {
    m[0] == Some(0)
}

fn rank(m: &Map) -> usize {
    m.iter().flatten().count()
}

/// Maps on `{1..n}` (index 0 unused), all of them.
fn all_partial_injections(n: usize) -> Vec<Map> {
    let mut out = Vec::new();
    let mut m: Map = vec![None; n + 1];
    let mut used = vec![false; n + 1];
    fn go(v: usize, n: usize, m: &mut Map, used: &mut [bool], out: &mut Vec<Map>) {
        if v > n {
            out.push(m.clone());
            return;
        }
        go(v + 1, n, m, used, out);
        for y in 1..=n {
            if !used[y] {
                used[y] = true;
                m[v] = Some(y);
                go(v + 1, n, m, used, out);
                m[v] = None;
                used[y] = false;
            }
        }
    }
    go(1, n, &mut m, &mut used, &mut out);
    out
}

fn random_partial_injection(n: usize, rng: &mut impl Rng, weights: &[f64]) -> Map {
    let total: f64 = weights.iter().sum();
    let mut r = rng.random::<f64>() * total;
    let mut k = 0;
    while k < n && r >= weights[k] {
        r -= weights[k];
        k += 1;
    }
    let mut dom: Vec<usize> = (1..=n).collect();
    dom.shuffle(rng);
    let mut im: Vec<usize> = (1..=n).collect();
    im.shuffle(rng);
    let mut m = vec![None; n + 1];
    for i in 0..k {
        m[dom[i]] = Some(im[i]);
    }
    m
}

/// Rotations `i -> i+k` and reflections `i -> k-i+1` on `{1..n}`.
fn oracle_dihedral(n: usize) -> Vec<Map> {
    let wrap = |x: i64| ((x - 1).rem_euclid(n as i64) + 1) as usize;
    let mut v = Vec::new();
    for k in 0..n as i64 {
        v.push((0..=n).map(|i| (i > 0).then(|| wrap(i as i64 + k))).collect());
        v.push((0..=n).map(|i| (i > 0).then(|| wrap(k - i as i64 + 1))).collect());
    }
    v
}

/// Sizes of the maximal cyclic runs of `set` within `{1..n}`, sorted.
fn arc_sizes(n: usize, set: &[bool]) -> Vec<usize> {
    let count = (1..=n).filter(|&i| set[i]).count();
    if count == n {
        return vec![n];
    }
    let mut sizes = Vec::new();
    for start in 1..=n {
        let prev = if start == 1 { n } else { start - 1 };
        if set[start] && !set[prev] {
            let mut len = 0;
            let mut i = start;
            while set[i] {
                len += 1;
                i = i % n + 1;
            }
            sizes.push(len);
        }
    }
    sizes.sort_unstable();
    sizes
}

fn dom_set(m: &Map) -> Vec<bool> {
    m.iter().map(Option::is_some).collect()
}

fn drop_hub(m: &Map) -> Map {
    let mut r = m.clone();
    r[0] = None;
    r
}

fn compose(a: &Map, b: &Map) -> Map {
    a.iter().map(|y| y.and_then(|y| b[y])).collect()
}

fn from_pi(a: &PartialInjection, n: usize) -> Map {
    let mut m = vec![None; n + 1];
    for (x, y) in a.pairs() {
        m[x] = Some(y);
    }
    m
}

fn sorted(v: impl IntoIterator<Item = PartialInjection>) -> Vec<PartialInjection> {
    let mut v: Vec<_> = v.into_iter().collect();
    v.sort();
    v
}

struct Parts {
    all: Vec<PartialInjection>,
    minus_rim: Vec<PartialInjection>,
    plus: Vec<PartialInjection>,
    union: Vec<PartialInjection>,
}

fn parts(n: usize) -> Parts {
    let dp = oracle_dp(n);
    Parts {
        all: sorted(dp.iter().map(|m| to_pi(0, n, m))),
        minus_rim: sorted(dp.iter().filter(|m| hubless(m)).map(|m| to_pi(1, n, &drop_hub(m)))),
        plus: sorted(dp.iter().filter(|m| hub_fixed(m)).map(|m| to_pi(0, n, m))),
        union: sorted(dp.iter().filter(|m| hubless(m) || hub_fixed(m)).map(|m| to_pi(0, n, m))),
    }
}

fn closure(n: usize, kind: SetKind) -> MonoidClosure {
    let g = kind.genset(n).unwrap();
    generate(g.ambient, &g.elements, DEFAULT_ELEMENT_CAP).unwrap()
}

/// Same partition, whatever the numbering.
fn same_partition<A: Eq + std::hash::Hash + Clone, B: Eq + std::hash::Hash + Clone>(a: &[A], b: &[B]) -> bool {
    let mut ab = HashMap::new();
    let mut ba = HashMap::new();
    a.iter().zip(b).all(|(x, y)| {
        ab.entry(x.clone()).or_insert_with(|| y.clone()) == y && ba.entry(y.clone()).or_insert_with(|| x.clone()) == x
    })
}

/// Two-sided ideal membership by brute force: the J-class of each element.
fn brute_j(c: &MonoidClosure) -> Vec<usize> {
    let els = c.elements();
    let ideals: Vec<BTreeSet<PartialInjection>> = els
        .iter()
        .map(|a| {
            let left: HashSet<PartialInjection> = els.iter().map(|x| x * a).collect();
            left.iter().flat_map(|xa| els.iter().map(move |y| xa * y)).collect()
        })
        .collect();
    let mut ids: HashMap<&BTreeSet<PartialInjection>, usize> = HashMap::new();
    ideals.iter().map(|i| { let k = ids.len(); *ids.entry(i).or_insert(k) }).collect()
}

// ---- criteria -----------------------------------------------------------

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok { Ok(()) } else { Err(msg()) }
}

fn c1_metric() -> Outcome {
    let t = Instant::now();
    let mut pairs = 0;
    for n in 4..=9 {
        let d = bfs_all(n);
        let g = wheel(n).unwrap();
        for (u, row) in d.iter().enumerate() {
            for (v, &want) in row.iter().enumerate() {
                pairs += 1;
                let closed = wheel_distance(n, u, v).unwrap();
                ensure(closed == want && g.distance_bfs(u, v).unwrap() == want, || format!("n={n} d({u},{v})"))?;
            }
        }
    }
    let el = t.elapsed();
    ensure(el < METRIC_BUDGET, || format!("took {el:?}, budget {METRIC_BUDGET:?}"))?;
    Ok(format!("{pairs} pairs for n=4..9, 0 mismatches, {:.3}s < 1s", el.as_secs_f64()))
}

fn c2_characterization() -> Outcome {
    let mut checked = 0usize;
    let check = |n: usize, d: &[Vec<usize>], m: &Map| -> Result<(), String> {
        let a = to_pi(1, n, m);
        let want = preserves(d, m);
        ensure(char_member_minus(n, &a).unwrap() == want, || format!("n={n}: {a:?} (isometry: {want})"))
    };
    for n in 4..=8 {
        let d = bfs_all(n);
        for m in all_partial_injections(n) {
            check(n, &d, &m)?;
            checked += 1;
        }
    }
    let n = 8;
    let d = bfs_all(n);
    let mut weights = Vec::new();
    let (mut binom, mut fact) = (1f64, 1f64);
    for k in 0..=n {
        if k > 0 {
            binom = binom * (n - k + 1) as f64 / k as f64;
            fact *= k as f64;
        }
        weights.push(binom * binom * fact);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..CHAR_SAMPLES {
        check(n, &d, &random_partial_injection(n, &mut rng, &weights))?;
    }
    Ok(format!("{checked} maps exhaustive over I_4..I_8 plus {CHAR_SAMPLES} uniform samples at n=8, 0 mismatches"))
}

fn c3_collapse() -> Outcome {
    for n in [4, 5] {
        let minus = parts(n).minus_rim;
        let mut di = HashSet::new();
        for u in oracle_dihedral(n) {
            for mask in 0..1u32 << n {
                let r: Map = (0..=n).map(|i| if i > 0 && mask >> (i - 1) & 1 == 1 { u[i] } else { None }).collect();
                di.insert(to_pi(1, n, &r));
            }
        }
        let di = sorted(di);
        ensure(di == minus, || format!("n={n}: |DI|={} |minus|={}", di.len(), minus.len()))?;
    }
    Ok("DPW_4^- = DI_4 (97) and DPW_5^- = DI_5 (286) as sets".into())
}

fn c4_split() -> Outcome {
    let mut total = 0;
    for n in 4..=7 {
        for m in oracle_dp(n) {
            total += 1;
            let a = to_pi(0, n, &m);
            ensure(split_lemma_check(&a).is_empty(), || format!("split violation {a:?}"))?;
            let in_im = m.contains(&Some(0));
            let outside = !hubless(&m) && !hub_fixed(&m);
            ensure(!outside || rank(&m) <= 4, || format!("outside of rank > 4: {a:?}"))?;
            ensure(rank(&m) < 5 || !(m[0].is_some() || in_im) || hub_fixed(&m), || format!("hub not fixed: {a:?}"))?;
        }
    }
    Ok(format!("{total} elements for n=4..7, 0 violations"))
}

fn c5_units() -> Outcome {
    for n in 4..=8 {
        let dp = oracle_dp(n);
        let minus_units = sorted(dp.iter().filter(|m| hubless(m) && rank(m) == n).map(|m| to_pi(1, n, &drop_hub(m))));
        let d = sorted(oracle_dihedral(n).iter().map(|m| to_pi(1, n, m)));
        ensure(minus_units == d && d.len() == 2 * n, || format!("n={n}: rank-n minus elements differ from D_2n"))?;
        let lib = sorted(dpw_core::isometry::dihedral(n).unwrap().elements().iter().copied());
        ensure(lib == d, || format!("n={n}: dihedral() differs"))?;
        let units = dp.iter().filter(|m| rank(m) == n + 1).count();
        ensure(units == 2 * n, || format!("n={n}: {units} units"))?;
    }
    Ok("n=4..8: rank-n minus elements = D_2n, |units| = 2n".into())
}

fn c6_generation() -> Outcome {
    let mut sizes = Vec::new();
    for n in 4..=8 {
        let p = parts(n);
        for (kind, want) in [
            (SetKind::Minus, &p.minus_rim),
            (SetKind::Plus, &p.plus),
            (SetKind::Union, &p.union),
            (SetKind::Full, &p.all),
        ] {
            let got = closure(n, kind).sorted_elements();
            ensure(&got == want, || format!("n={n} {kind}: {} generated, {} expected", got.len(), want.len()))?;
        }
        sizes.push(p.all.len());
    }
    Ok(format!("all four sets generate their targets for n=4..8; |DP(W_n)| = {sizes:?}"))
}

/// The class name of `a` as the classification of J-classes lists it.
fn oracle_class(n: usize, m: &Map) -> String {
    let k = rank(m);
    let in_im = m.contains(&Some(0));
    let sizes = arc_sizes(n, &dom_set(&drop_hub(m)));
    let t = format!("{sizes:?}");
    if k <= 1 {
        return format!("J_{k}");
    }
    if hubless(m) {
        return match (k, sizes.as_slice()) {
            (2, [1, 1]) => "-[1, 1]".into(),
            (2, _) => "J'_2".into(),
            (3, [3]) => "J'_3".into(),
            _ => format!("-{t}"),
        };
    }
    if hub_fixed(m) {
        return match (k, sizes.as_slice()) {
            (2, _) => "J'_2".into(),
            (3, [1, 1]) => "J'_3".into(),
            (3, [2]) => "J''_3".into(),
            (4, [3]) => "J'_4".into(),
            _ => format!("+{t}"),
        };
    }
    match k {
        2 => "J'_2".into(),
        3 if m[0].is_some() && in_im => "J''_3".into(),
        3 => "J'_3".into(),
        4 => "J'_4".into(),
        _ => panic!("outside element of rank {k}"),
    }
}

fn c7_green() -> Outcome {
    for n in 4..=7 {
        let c = closure(n, SetKind::Minus);
        let a = green(&c, GreenMode::ByDomIm);
        let b = green(&c, GreenMode::ByIdeals);
        ensure(a == b, || format!("n={n}: modes disagree on the minus monoid"))?;
        let types: Vec<Vec<usize>> = c.elements().iter().map(|x| arc_sizes(n, &dom_set(&from_pi(x, n)))).collect();
        ensure(same_partition(&a.d, &types), || format!("n={n}: D-classes are not J-type fibers"))?;
        let lib: Vec<Vec<usize>> = c.elements().iter().map(|x| j_type(n, x).unwrap().0).collect();
        ensure(lib == types, || format!("n={n}: j_type differs from arc sizes"))?;
    }
    let mut inventory = Vec::new();
    for n in 5..=7 {
        let c = closure(n, SetKind::Full);
        let a = green(&c, GreenMode::ByDomIm);
        let b = green(&c, GreenMode::ByIdeals);
        ensure(a == b, || format!("n={n}: modes disagree on the full monoid"))?;
        let names: Vec<String> = c.elements().iter().map(|x| oracle_class(n, &from_pi(x, n))).collect();
        ensure(same_partition(&a.d, &names), || format!("n={n}: D-classes differ from the listed classes"))?;
        let low: BTreeSet<&str> = c
            .elements()
            .iter()
            .zip(&names)
            .filter(|(x, _)| x.rank() <= 4)
            .map(|(_, s)| s.as_str())
            .collect();
        let mut want: BTreeSet<&str> =
            ["J_0", "J_1", "J'_2", "-[1, 1]", "J'_3", "J''_3", "J'_4", "-[4]"].into_iter().collect();
        for (name, from) in [
            ("-[1, 2]", 5),
            ("+[1, 2]", 5),
            ("-[1, 1, 1]", 6),
            ("+[1, 1, 1]", 6),
            ("-[1, 3]", 6),
            ("-[2, 2]", 6),
            ("-[1, 1, 2]", 7),
            ("-[1, 1, 1, 1]", 8),
        ] {
            if n >= from {
                want.insert(name);
            }
        }
        ensure(low == want, || format!("n={n}: classes of rank <= 4 {low:?}, expected {want:?}"))?;
        inventory.push(format!("n={n}: {} D-classes", a.d_count()));
    }
    for (n, kind) in [(4, SetKind::Full), (5, SetKind::Minus)] {
        let c = closure(n, kind);
        ensure(same_partition(&green(&c, GreenMode::ByDomIm).d, &brute_j(&c)), || {
            format!("n={n} {kind}: D differs from brute-force J")
        })?;
    }
    Ok(format!("J^- fibers n=4..7; inventory {}; modes agree; brute-force J agrees on DPW_4, DPW_5^-", inventory.join(", ")))
}

fn eval_word(n: usize, letters: &[GeneratorLabel]) -> Map {
    let mut acc: Map = (0..=n).map(Some).collect();
    for &l in letters {
        acc = compose(&acc, &from_pi(&build(n, l).unwrap(), n));
    }
    acc
}

fn c8_factorization() -> Outcome {
    let mut counts = Vec::new();
    for n in 4..=7 {
        let allowed: HashSet<GeneratorLabel> = genset_full(n).unwrap().labels.into_iter().collect();
        let mut f = Factorizer::new(n).unwrap();
        let dp = parts(n).all;
        let mut targets = dp.clone();
        if n == 7 {
            let mut rng = ChaCha8Rng::seed_from_u64(77);
            targets.extend((0..FACTOR_SAMPLES).map(|_| dp[rng.random_range(0..dp.len())]));
        }
        for a in &targets {
            let w = f.full(a).map_err(|e| format!("{a:?}: {e}"))?;
            ensure(w.letters.iter().all(|l| allowed.contains(l)), || format!("{a:?}: letter outside the set"))?;
            ensure(eval_word(n, &w.letters) == from_pi(a, n), || format!("{a:?}: word {w} evaluates wrongly"))?;
        }
        counts.push(targets.len());
    }
    use GeneratorLabel::*;
    let e0 = dpw_core::factor::factor_full(4, &build(4, E0).unwrap()).unwrap();
    ensure(e0.letters == [G0, G0, G0, Z, Z, G0], || format!("e0 = {e0}"))?;
    ensure(eval_word(4, &[G0, G0, G0, Z, Z, G0]) == from_pi(&build(4, E0).unwrap(), 4), || "e0 identity".into())?;
    Ok(format!(
        "factor_full correct on all of DPW_4..6 {:?} and DPW_7 (7737 + {FACTOR_SAMPLES} samples); e0 = {e0}",
        &counts[..3]
    ))
}

fn c9_ranks() -> Outcome {
    let exact = |c: &MonoidClosure, want: usize, what: &str| -> Result<(), String> {
        match rank_exact(c, RANK_BUDGET).unwrap() {
            RankSearch::Exact { rank, witness } => {
                ensure(rank == want, || format!("{what}: rank {rank}, expected {want}"))?;
                let w = generate(c.ambient(), &witness, DEFAULT_ELEMENT_CAP).unwrap();
                ensure(w.sorted_elements() == c.sorted_elements(), || format!("{what}: witness does not generate"))
            }
            RankSearch::Inconclusive { closures } => Err(format!("{what}: inconclusive after {closures} closures")),
        }
    };
    exact(&closure(4, SetKind::Full), 4, "DPW_4")?;
    exact(&closure(5, SetKind::Minus), 3, "DPW_5^-")?;
    for n in 5..=8 {
        let p = parts(n);
        let c = closure(n, SetKind::Minus);
        ensure(c.sorted_elements() == p.minus_rim, || format!("n={n}: minus set does not generate"))?;
        let lo = rank_lower_minus(n, &c).map_err(|e| e.to_string())?;
        let size = genset_minus(n).unwrap().len();
        ensure(lo == size && size == n / 2 + 1, || format!("n={n}: lower {lo}, |set| {size}"))?;
        if n <= 7 {
            let c = closure(n, SetKind::Full);
            ensure(c.sorted_elements() == p.all, || format!("n={n}: full set does not generate"))?;
            let lo = rank_lower_full(n, &c).map_err(|e| e.to_string())?;
            let size = genset_full(n).unwrap().len();
            ensure(lo == size && size == n / 2 + 3, || format!("n={n}: full lower {lo}, |set| {size}"))?;
        }
    }
    Ok("rank(DPW_4)=4, rank(DPW_5^-)=3 exact; minus floor(n/2)+1 for n=5..8; full floor(n/2)+3 for n=5..7".into())
}

fn c10_psi() -> Outcome {
    let mut pairs = 0;
    for n in 4..=6 {
        let p = parts(n);
        let images: Vec<PartialInjection> = p.plus.iter().map(|a| psi(a).unwrap()).collect();
        for (a, b) in p.plus.iter().zip(&images) {
            ensure(*b == to_pi(1, n, &drop_hub(&from_pi(a, n))), || format!("psi({a:?}) = {b:?}"))?;
        }
        ensure(sorted(images.iter().copied()) == p.minus_rim, || format!("n={n}: psi is not a bijection"))?;
        for (i, a) in p.plus.iter().enumerate() {
            for (j, b) in p.plus.iter().enumerate() {
                pairs += 1;
                ensure(psi(&(a * b)).unwrap() == images[i] * images[j], || format!("psi({a:?} {b:?})"))?;
            }
        }
        for (a, b) in p.plus.iter().zip(&images) {
            ensure(psi_inv(b).ok().as_ref() == Some(a), || format!("psi_inv({b:?})"))?;
        }
    }
    Ok(format!("bijective and multiplicative on {pairs} pairs for n=4..6"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("metric correctness", c1_metric),
        ("characterization equivalence", c2_characterization),
        ("small-n collapse", c3_collapse),
        ("split sweep", c4_split),
        ("units", c5_units),
        ("generation", c6_generation),
        ("Green's structure", c7_green),
        ("factorization soundness", c8_factorization),
        ("ranks", c9_ranks),
        ("psi isomorphism", c10_psi),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let label = format!("criterion {}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|s| name.contains(s.as_str()) || label == *s) {
            continue;
        }
        let t = Instant::now();
        let r = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(msg) => println!("{label:>12} PASS {name}: {msg} [{secs:.2}s]"),
            Err(msg) => {
                failed += 1;
                println!("{label:>12} FAIL {name}: {msg} [{secs:.2}s]");
            }
        }
    }
    if failed > 0 { ExitCode::FAILURE } else { ExitCode::SUCCESS }
}
