//! Verification suites over a range of `n`, collected into a [`Report`].

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::distr::weighted::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use crate::closure::{
    canonical_labels, generate, green, rank_exact, rank_lower_full, rank_lower_minus, rank_upper, GreenMode,
    MonoidClosure, RankSearch, RankUpper,
};
use crate::factor::{Factorizer, Word};
use crate::gens::{build, genset_full, genset_minus, GeneratorLabel, SetKind};
use crate::graphs::{complete, wheel, wheel_distance};
use crate::isometry::{dihedral, enumerate_dp, Metric, DEFAULT_VERTEX_CAP};
use crate::wheel::{char_member_minus, classify, embed, j_type, psi, split_by_class, split_lemma_check, Classification};
use crate::{Ambient, Error, PartialInjection, Result};

/// Largest `n` whose wheel fits the enumeration cap.
pub const MAX_N: usize = DEFAULT_VERTEX_CAP - 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Distances,
    Characterization,
    Split,
    Green,
    Generation,
    Factorization,
    Rank,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Distances,
        Suite::Characterization,
        Suite::Split,
        Suite::Green,
        Suite::Generation,
        Suite::Factorization,
        Suite::Rank,
    ];
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => Suite::All,
            "distances" => Suite::Distances,
            "characterization" => Suite::Characterization,
            "split" => Suite::Split,
            "green" => Suite::Green,
            "generation" => Suite::Generation,
            "factorization" => Suite::Factorization,
            "rank" => Suite::Rank,
            _ => return Err(Error::Usage(format!("unknown suite {s:?}"))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).map_err(|_| fmt::Error)?;
        f.write_str(s.as_str().unwrap_or_default())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    /// 0 pass, 1 fail, 2 inconclusive.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub n: usize,
    pub status: Status,
    /// Number of objects examined.
    pub count: usize,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<PartialInjection>,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub n_min: usize,
    pub n_max: usize,
    pub status: Status,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn timings(&self) -> Vec<(String, f64)> {
        self.checks.iter().map(|c| (format!("{}[n={}]", c.name, c.n), c.elapsed.as_secs_f64())).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    pub element_cap: usize,
    /// Characterization is exhaustive over `I_n` up to this many maps and
    /// sampled beyond it.
    pub exhaustive_limit: usize,
    pub samples: usize,
    /// Factorization is exhaustive up to this many elements.
    pub factor_limit: usize,
    /// The Ψ-homomorphism check runs over all pairs up to this many.
    pub pair_limit: usize,
    pub factor_samples: usize,
    pub rank_budget: usize,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            element_cap: crate::closure::DEFAULT_ELEMENT_CAP,
            exhaustive_limit: 200_000,
            samples: 1_000_000,
            factor_limit: 100_000,
            pair_limit: 50_000_000,
            factor_samples: 100_000,
            rank_budget: 100_000,
            seed: 0x5eed,
        }
    }
}

pub fn run(suite: Suite, n_min: usize, n_max: usize, opts: &Options) -> Result<Report> {
    if n_min < 4 || n_min > n_max || n_max > MAX_N {
        return Err(Error::Usage(format!("need 4 <= n_min <= n_max <= {MAX_N}, got {n_min}..{n_max}")));
    }
    let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    let mut checks = Vec::new();
    for s in suites {
        for n in n_min..=n_max {
            let ctx = Ctx { n, opts };
            let out = &mut Sink { n, checks: &mut checks };
            match s {
                Suite::Distances => distances(&ctx, out)?,
                Suite::Characterization => characterization(&ctx, out)?,
                Suite::Split => split(&ctx, out)?,
                Suite::Green => green_suite(&ctx, out)?,
                Suite::Generation => generation(&ctx, out)?,
                Suite::Factorization => factorization(&ctx, out)?,
                Suite::Rank => rank(&ctx, out)?,
                Suite::All => unreachable!(),
            }
        }
    }
    let status = checks.iter().map(|c| c.status).max().unwrap_or(Status::Pass);
    Ok(Report { suite, n_min, n_max, status, checks })
}

struct Ctx<'a> {
    n: usize,
    opts: &'a Options,
}

struct Sink<'a> {
    n: usize,
    checks: &'a mut Vec<Check>,
}

/// What a check body hands back.
struct Outcome {
    status: Status,
    count: usize,
    detail: String,
    witness: Option<PartialInjection>,
}

impl Outcome {
    fn from_mismatch(count: usize, detail: String, witness: Option<PartialInjection>) -> Self {
        let status = if witness.is_some() { Status::Fail } else { Status::Pass };
        Outcome { status, count, detail, witness }
    }
}

impl Sink<'_> {
    fn check(&mut self, name: &str, body: impl FnOnce() -> Result<Outcome>) -> Result<()> {
        let t = Instant::now();
        let o = body()?;
        self.checks.push(Check {
            name: name.to_string(),
            n: self.n,
            status: o.status,
            count: o.count,
            detail: o.detail,
            witness: o.witness,
            elapsed: t.elapsed(),
        });
        Ok(())
    }
}

impl Ctx<'_> {
    fn dp(&self) -> Result<Vec<PartialInjection>> {
        enumerate_dp(&wheel(self.n)?, DEFAULT_VERTEX_CAP)
    }

    fn closure(&self, kind: SetKind) -> Result<MonoidClosure> {
        let g = kind.genset(self.n)?;
        generate(g.ambient, &g.elements, self.opts.element_cap)
    }
}

fn expect_eq<T: PartialEq + fmt::Debug>(got: T, want: T, count: usize) -> Outcome {
    let status = if got == want { Status::Pass } else { Status::Fail };
    Outcome { status, count, detail: format!("got {got:?}, expected {want:?}"), witness: None }
}

fn first_missing(a: &[PartialInjection], b: &[PartialInjection]) -> Option<PartialInjection> {
    let set: FxHashSet<&PartialInjection> = b.iter().collect();
    a.iter().find(|x| !set.contains(x)).copied()
}

fn set_equality(got: &[PartialInjection], want: &[PartialInjection]) -> Outcome {
    let w = first_missing(want, got).or_else(|| first_missing(got, want));
    Outcome::from_mismatch(want.len(), format!("{} generated, {} expected", got.len(), want.len()), w)
}

fn distances(ctx: &Ctx, out: &mut Sink) -> Result<()> {
    let n = ctx.n;
    out.check("wheel-distance-vs-bfs", || {
        let g = wheel(n)?;
        let mut bad = None;
        for u in 0..=n {
            for v in 0..=n {
                if wheel_distance(n, u, v)? != g.distance_bfs(u, v)? && bad.is_none() {
                    bad = Some(format!("d({u},{v})"));
                }
            }
        }
        let status = if bad.is_none() { Status::Pass } else { Status::Fail };
        Ok(Outcome { status, count: (n + 1) * (n + 1), detail: bad.unwrap_or_default(), witness: None })
    })
}

/// `|I_n|` split by rank: `C(n,k)^2 k!`.
fn partial_injection_counts(n: usize) -> Vec<u64> {
    let mut binom = vec![1u64; n + 1];
    for k in 1..=n {
        binom[k] = binom[k - 1] * (n - k + 1) as u64 / k as u64;
    }
    let mut fact = 1u64;
    (0..=n)
        .map(|k| {
            if k > 0 {
                fact *= k as u64;
            }
            binom[k] * binom[k] * fact
        })
        .collect()
}

/// A uniformly random partial injection of `{1..n}`.
pub fn sample_partial_injection<R: Rng>(n: usize, rng: &mut R) -> Result<PartialInjection> {
    let weights = partial_injection_counts(n);
    let k = WeightedIndex::new(&weights).map_err(|e| Error::Usage(e.to_string()))?.sample(rng);
    let dom = rand::seq::index::sample(rng, n, k).into_vec();
    let mut im = rand::seq::index::sample(rng, n, k).into_vec();
    im.shuffle(rng);
    PartialInjection::from_pairs(Ambient::rim(n)?, dom.into_iter().zip(im).map(|(d, i)| (d + 1, i + 1)))
}

fn characterization(ctx: &Ctx, out: &mut Sink) -> Result<()> {
    let n = ctx.n;
    let opts = ctx.opts;
    out.check("char-equals-metric", || {
        let metric = Metric::new(&wheel(n)?)?;
        let total: u64 = partial_injection_counts(n).iter().sum();
        let agree = |a: &PartialInjection| -> Result<bool> {
            Ok(char_member_minus(n, a)? == metric.is_isometry(&embed(a)?)?)
        };
        let (maps, how) = if total as usize <= opts.exhaustive_limit {
            (enumerate_dp(&complete(n)?, DEFAULT_VERTEX_CAP)?, "exhaustive")
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ n as u64);
            let v = (0..opts.samples).map(|_| sample_partial_injection(n, &mut rng)).collect::<Result<Vec<_>>>()?;
            (v, "sampled")
        };
        let bad = maps
            .par_iter()
            .map(|a| agree(a).map(|ok| if ok { None } else { Some(*a) }))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .next();
        Ok(Outcome::from_mismatch(maps.len(), format!("{how} over |I_{n}| = {total}"), bad))
    })?;
    if n <= 5 {
        out.check("minus-equals-di", || {
            let minus = split_by_class(&ctx.dp()?)?.minus;
            let di = di_elements(n)?;
            Ok(set_equality(&minus, &di))
        })?;
    } else {
        out.check("di-strictly-inside-minus", || {
            let minus = split_by_class(&ctx.dp()?)?.minus;
            let di = di_elements(n)?;
            let escaped = first_missing(&di, &minus);
            let mut o = Outcome::from_mismatch(di.len(), format!("|DI| = {}, |minus| = {}", di.len(), minus.len()), escaped);
            if o.status == Status::Pass && di.len() == minus.len() {
                o.status = Status::Fail;
                o.detail.push_str(", expected a proper subset");
            }
            Ok(o)
        })?;
    }
    Ok(())
}

/// All restrictions of dihedral permutations.
fn di_elements(n: usize) -> Result<Vec<PartialInjection>> {
    let d = dihedral(n)?;
    let mut set = FxHashSet::default();
    for u in d.elements() {
        for mask in 0..1u32 << n {
            set.insert(u.restrict((1..=n).filter(|i| mask >> (i - 1) & 1 == 1))?);
        }
    }
    let mut v: Vec<_> = set.into_iter().collect();
    v.sort();
    Ok(v)
}

fn split(ctx: &Ctx, out: &mut Sink) -> Result<()> {
    let (n, opts) = (ctx.n, ctx.opts);
    let dp = ctx.dp()?;
    out.check("split-lemma", || {
        let bad = dp.iter().find(|a| !split_lemma_check(a).is_empty()).copied();
        Ok(Outcome::from_mismatch(dp.len(), String::new(), bad))
    })?;
    out.check("outside-rank-at-most-4", || {
        let outside: Vec<_> = dp.iter().filter(|a| classify(a) == Classification::Outside).collect();
        let bad = outside.iter().find(|a| a.rank() > 4).map(|a| **a);
        Ok(Outcome::from_mismatch(outside.len(), format!("{} outside elements", outside.len()), bad))
    })?;
    out.check("rank-5-hub-fixed", || {
        let hub: Vec<_> = dp.iter().filter(|a| a.rank() >= 5 && (a.in_domain(0) || a.in_image(0))).collect();
        let bad = hub.iter().find(|a| a.apply(0) != Some(0)).map(|a| **a);
        Ok(Outcome::from_mismatch(hub.len(), String::new(), bad))
    })?;
    out.check("psi-isomorphism", || {
        let parts = split_by_class(&dp)?;
        let images = parts.plus.iter().map(psi).collect::<Result<Vec<_>>>()?;
        let mut sorted = images.clone();
        sorted.sort();
        sorted.dedup();
        if sorted != parts.minus {
            let w = first_missing(&parts.minus, &sorted).or_else(|| first_missing(&sorted, &parts.minus));
            return Ok(Outcome::from_mismatch(parts.plus.len(), "Ψ is not a bijection onto the minus part".into(), w));
        }
        let m = parts.plus.len();
        let hom = |i: usize, j: usize| -> bool {
            psi(&(parts.plus[i] * parts.plus[j])).is_ok_and(|ab| ab == images[i] * images[j])
        };
        let (pairs, bad, how) = if m * m <= opts.pair_limit {
            let bad = (0..m).into_par_iter().find_map_first(|i| (0..m).find(|&j| !hom(i, j)).map(|_| parts.plus[i]));
            (m * m, bad, "all products")
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (n as u64) << 16);
            let picks: Vec<(usize, usize)> = (0..opts.samples).map(|_| (rng.random_range(0..m), rng.random_range(0..m))).collect();
            let bad = picks.par_iter().find_map_first(|&(i, j)| (!hom(i, j)).then_some(parts.plus[i]));
            (picks.len(), bad, "sampled products")
        };
        Ok(Outcome::from_mismatch(pairs, how.into(), bad))
    })?;
    Ok(())
}

/// The name of the `J`-class of `a` in `DP(W_n)`, valid for `n >= 5`.
pub fn j_class_name(n: usize, a: &PartialInjection) -> Result<String> {
    let k = a.rank();
    let class = classify(a);
    let t = match class {
        Classification::Minus => Some(j_type(n, a)?),
        Classification::Plus => Some(j_type(n, &psi(a)?)?),
        Classification::Outside => None,
    };
    let named = |sign: &str| format!("J{sign}_{}", t.as_ref().expect("typed"));
    let ts = t.as_ref().map(|t| t.0.as_slice());
    Ok(match (k, class) {
        (0, _) => "J_0".into(),
        (1, _) => "J_1".into(),
        (2, Classification::Minus) if ts == Some(&[1, 1]) => named("-"),
        (2, _) => "J'_2".into(),
        (3, Classification::Outside) if a.in_domain(0) && a.in_image(0) => "J''_3".into(),
        (3, Classification::Outside) => "J'_3".into(),
        (3, Classification::Minus) if ts == Some(&[3]) => "J'_3".into(),
        (3, Classification::Plus) if ts == Some(&[1, 1]) => "J'_3".into(),
        (3, Classification::Plus) if ts == Some(&[2]) => "J''_3".into(),
        (4, Classification::Outside) => "J'_4".into(),
        (4, Classification::Plus) if ts == Some(&[3]) => "J'_4".into(),
        (_, Classification::Outside) => {
            return Err(Error::Verification(format!("outside element of rank {k}: {a:?}")));
        }
        (_, Classification::Minus) => named("-"),
        (_, Classification::Plus) => named("+"),
    })
}

/// Names of the classes of ranks 0..=4 that exist for this `n`,
/// leaving out those too large to fit on the rim.
pub fn j_class_inventory(n: usize) -> Vec<&'static str> {
    let mut v = vec!["J_0", "J_1", "J'_2", "J-_(1,1)", "J'_3", "J''_3", "J'_4", "J-_(4)"];
    let gated: [(&str, usize); 8] = [
        ("J-_(1,2)", 5),
        ("J+_(1,2)", 5),
        ("J-_(1,1,1)", 6),
        ("J+_(1,1,1)", 6),
        ("J-_(1,3)", 6),
        ("J-_(2,2)", 6),
        ("J-_(1,1,2)", 7),
        ("J-_(1,1,1,1)", 8),
    ];
    v.extend(gated.iter().filter(|(_, m)| n >= *m).map(|(s, _)| *s));
    v.sort_unstable();
    v
}

/// First index where the two partitions disagree, if any.
fn partition_mismatch(a: &[u32], b: &[u32]) -> Option<usize> {
    let mut ab: FxHashMap<u32, u32> = FxHashMap::default();
    let mut ba: FxHashMap<u32, u32> = FxHashMap::default();
    (0..a.len()).find(|&i| *ab.entry(a[i]).or_insert(b[i]) != b[i] || *ba.entry(b[i]).or_insert(a[i]) != a[i])
}

fn partition_outcome(c: &MonoidClosure, got: &[u32], want: &[u32], detail: String) -> Outcome {
    let w = partition_mismatch(got, want).map(|i| c.elements()[i]);
    Outcome::from_mismatch(c.len(), detail, w)
}

fn both_modes(out: &mut Sink, c: &MonoidClosure, what: &str) -> Result<Vec<u32>> {
    let mut d = Vec::new();
    out.check(&format!("green-modes-agree-{what}"), || {
        let a = green(c, GreenMode::ByDomIm);
        let b = green(c, GreenMode::ByIdeals);
        let w = [(&a.l, &b.l), (&a.r, &b.r), (&a.h, &b.h), (&a.d, &b.d)]
            .iter()
            .find_map(|(x, y)| partition_mismatch(x, y))
            .map(|i| c.elements()[i]);
        let o = Outcome::from_mismatch(c.len(), format!("{} D-classes", a.d_count()), w);
        d = a.d;
        Ok(o)
    })?;
    Ok(d)
}

fn green_suite(ctx: &Ctx, out: &mut Sink) -> Result<()> {
    let n = ctx.n;

    let minus = ctx.closure(SetKind::Minus)?;
    out.check("units-minus-dihedral", || {
        let units: Vec<_> = minus.sorted_elements().into_iter().filter(|a| a.rank() == n).collect();
        let mut d = dihedral(n)?.elements().to_vec();
        d.sort();
        Ok(set_equality(&units, &d))
    })?;
    let d = both_modes(out, &minus, "minus")?;
    out.check("d-classes-are-jtype-fibers", || {
        let types = minus.elements().iter().map(|a| j_type(n, a)).collect::<Result<Vec<_>>>()?;
        let want = canonical_labels(types);
        Ok(partition_outcome(&minus, &d, &want, format!("{} J-types", crate::closure::class_count(&want))))
    })?;

    let union = ctx.closure(SetKind::Union)?;
    let d = both_modes(out, &union, "union")?;
    out.check("union-d-classes-by-part-and-type", || {
        let keys = union
            .elements()
            .iter()
            .map(|a| {
                let c = classify(a);
                let t = if c == Classification::Plus { j_type(n, &psi(a)?)? } else { j_type(n, a)? };
                Ok((c, t))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(partition_outcome(&union, &d, &canonical_labels(keys), String::new()))
    })?;

    let full = ctx.closure(SetKind::Full)?;
    out.check("units-full", || {
        let units = full.elements().iter().filter(|a| a.rank() == n + 1).count();
        Ok(expect_eq(units, 2 * n, full.len()))
    })?;
    let d = both_modes(out, &full, "full")?;
    if n >= 5 {
        let names = full.elements().iter().map(|a| j_class_name(n, a)).collect::<Result<Vec<_>>>()?;
        out.check("j-class-partition", || {
            Ok(partition_outcome(&full, &d, &canonical_labels(names.iter()), format!("{} D-classes", crate::closure::class_count(&d))))
        })?;
        out.check("j-class-inventory", || {
            let mut got: Vec<&str> = full
                .elements()
                .iter()
                .zip(&names)
                .filter(|(a, _)| a.rank() <= 4)
                .map(|(_, s)| s.as_str())
                .collect();
            got.sort_unstable();
            got.dedup();
            Ok(expect_eq(got, j_class_inventory(n), full.len()))
        })?;
    }
    Ok(())
}

fn generation(ctx: &Ctx, out: &mut Sink) -> Result<()> {
    let parts = split_by_class(&ctx.dp()?)?;
    let mut all: Vec<_> = parts.plus.iter().chain(&parts.outside).copied().collect();
    let wheel_minus = parts.minus.iter().map(embed).collect::<Result<Vec<_>>>()?;
    let mut union: Vec<_> = parts.plus.iter().chain(&wheel_minus).copied().collect();
    all.extend(&wheel_minus);
    all.sort();
    union.sort();
    let targets = [
        (SetKind::Minus, parts.minus.clone()),
        (SetKind::Plus, parts.plus.clone()),
        (SetKind::Union, union),
        (SetKind::Full, all),
    ];
    for (kind, target) in targets {
        out.check(&format!("generate-{kind}"), || {
            let c = ctx.closure(kind)?;
            Ok(set_equality(&c.sorted_elements(), &target))
        })?;
    }
    Ok(())
}

fn factorization(ctx: &Ctx, out: &mut Sink) -> Result<()> {
    let n = ctx.n;
    let opts = ctx.opts;
    let dp = ctx.dp()?;
    let full_labels: FxHashSet<GeneratorLabel> = genset_full(n)?.labels.into_iter().collect();
    let minus_labels: FxHashSet<GeneratorLabel> = genset_minus(n)?.labels.into_iter().collect();

    let targets: Vec<PartialInjection> = if dp.len() <= opts.factor_limit {
        dp.clone()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (n as u64) << 8);
        (0..opts.factor_samples).map(|_| dp[rng.random_range(0..dp.len())]).collect()
    };
    let how = if targets.len() == dp.len() { "exhaustive" } else { "sampled" };

    let sweep = |minus: bool| -> Result<Outcome> {
        let items: Vec<PartialInjection> = if minus {
            split_by_class(&targets)?.minus
        } else {
            targets.clone()
        };
        let allowed = if minus { &minus_labels } else { &full_labels };
        let results = items
            .par_iter()
            .map_init(
                || Factorizer::new(n),
                |f, a| -> Result<(usize, bool)> {
                    let f = f.as_mut().map_err(|e| Error::Usage(e.to_string()))?;
                    let w: Word = if minus { f.minus(a)? } else { f.full(a)? };
                    let ok = w.evaluate()? == *a && w.letters.iter().all(|l| allowed.contains(l));
                    Ok((w.len(), ok))
                },
            )
            .collect::<Result<Vec<_>>>()?;
        let bad = results.iter().position(|(_, ok)| !ok).map(|i| items[i]);
        let longest = results.iter().map(|(l, _)| *l).max().unwrap_or(0);
        Ok(Outcome::from_mismatch(items.len(), format!("{how}, longest word {longest}"), bad))
    };
    out.check("factor-minus", || sweep(true))?;
    out.check("factor-full", || sweep(false))?;
    if n == 4 {
        out.check("e0-identity", || {
            use GeneratorLabel::*;
            let e0 = build(4, E0)?;
            let w = Factorizer::new(4)?.full(&e0)?;
            let want = [G0, G0, G0, Z, Z, G0];
            let ok = w.letters == want && Word::new(Ambient::wheel(4)?, want.to_vec()).evaluate()? == e0;
            let status = if ok { Status::Pass } else { Status::Fail };
            Ok(Outcome { status, count: 1, detail: format!("e0 = {w}"), witness: (!ok).then_some(e0) })
        })?;
    }
    Ok(())
}

fn rank(ctx: &Ctx, out: &mut Sink) -> Result<()> {
    let n = ctx.n;
    let budget = ctx.opts.rank_budget;
    let exact = |c: &MonoidClosure, want: usize| -> Result<Outcome> {
        Ok(match rank_exact(c, budget)? {
            RankSearch::Exact { rank, .. } => expect_eq(rank, want, c.len()),
            RankSearch::Inconclusive { closures } => Outcome {
                status: Status::Inconclusive,
                count: closures,
                detail: format!("budget of {budget} closures exhausted"),
                witness: None,
            },
        })
    };
    let upper = |kind: SetKind| -> Result<Outcome> {
        let g = kind.genset(n)?;
        let c = ctx.closure(kind)?;
        let target = if kind == SetKind::Minus {
            split_by_class(&ctx.dp()?)?.minus
        } else {
            ctx.dp()?
        };
        Ok(match rank_upper(g.ambient, &g.elements, &target)? {
            RankUpper::Generated(k) => expect_eq(k, g.len(), c.len()),
            RankUpper::Missing(a) | RankUpper::Extra(a) => Outcome::from_mismatch(c.len(), "not generated".into(), Some(a)),
        })
    };
    let minus = ctx.closure(SetKind::Minus)?;
    let full = ctx.closure(SetKind::Full)?;
    out.check("upper-minus", || upper(SetKind::Minus))?;
    out.check("upper-full", || upper(SetKind::Full))?;
    if n == 4 {
        out.check("exact-full", || exact(&full, 4))?;
    }
    if n == 5 {
        out.check("exact-minus", || exact(&minus, 3))?;
    }
    if n >= 5 {
        out.check("lower-minus", || {
            let lo = rank_lower_minus(n, &minus)?;
            Ok(expect_eq((lo, genset_minus(n)?.len()), (n / 2 + 1, n / 2 + 1), minus.len()))
        })?;
        out.check("lower-full", || {
            let lo = rank_lower_full(n, &full)?;
            Ok(expect_eq((lo, genset_full(n)?.len()), (n / 2 + 3, n / 2 + 3), full.len()))
        })?;
    }
    Ok(())
}
