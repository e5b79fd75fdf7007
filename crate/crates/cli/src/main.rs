//! `dpw`: enumeration, factorization and verification for partial
//! isometries of wheel graphs.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use dpw_core::closure::{
    classes, generate, green, rank_exact, rank_lower_full, rank_lower_minus, rank_upper, GreenMode, MonoidClosure,
    RankSearch, RankUpper, DEFAULT_ELEMENT_CAP,
};
use dpw_core::factor::{Factorizer, Word};
use dpw_core::gens::SetKind;
use dpw_core::graphs::{wheel, GraphFamily};
use dpw_core::isometry::{enumerate_dp, Metric, DEFAULT_VERTEX_CAP};
use dpw_core::verify::{self, j_class_name, Options, Status, Suite};
use dpw_core::wheel::{classify, j_type, psi, split_by_class, Classification};
use dpw_core::{Ambient, Error, PartialInjection};

const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "dpw", version, about = "Partial isometries of wheel graphs")]
struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Upper bound on closure sizes.
    #[arg(long, global = true, env = "DPW_ELEMENT_CAP", default_value_t = DEFAULT_ELEMENT_CAP)]
    element_cap: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List all partial isometries of a graph.
    Enumerate {
        #[arg(long, value_enum, default_value_t = Family::Wheel)]
        graph: Family,
        #[arg(long)]
        n: usize,
        /// Keep only one part of the wheel monoid.
        #[arg(long, value_enum)]
        filter: Option<Part>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report which part of DP(W_n) an element lies in.
    Classify(ElementArgs),
    /// Maximal-arc sizes of a hub-avoiding element, or of its Ψ-image.
    Jtype(ElementArgs),
    /// Print a generating set.
    Gens {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = SetArg::Full)]
        set: SetArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Close a generating set and compare with the enumerated monoid.
    Close {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        set: SetArg,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// D-classes of a monoid, optionally checked against the classification.
    Green {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        monoid: SetArg,
        #[arg(long, value_enum)]
        check: Option<GreenCheck>,
        #[arg(long, value_enum, default_value_t = ModeArg::DomIm)]
        mode: ModeArg,
        /// Writes the class table; `.csv` selects CSV, anything else JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write an element as a word in the generators.
    Factorize {
        #[command(flatten)]
        element: ElementArgs,
        #[arg(long, value_enum, default_value_t = Style::Constructive)]
        style: Style,
    },
    /// Bounds on, or the exact value of, the rank of a monoid.
    Rank {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        monoid: RankMonoid,
        #[arg(long, value_enum, default_value_t = Method::LowerUpper)]
        method: Method,
        /// Closure computations allowed to the exact search.
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
    /// Run verification suites over a range of n.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 4)]
        n_min: usize,
        #[arg(long, default_value_t = 7)]
        n_max: usize,
        /// Random maps tested when the characterization check is sampled.
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 100_000)]
        factor_samples: usize,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ElementArgs {
    #[arg(long)]
    n: usize,
    /// JSON `{"ambient": ..., "map": [[d, i], ...]}`; the ambient defaults to `0..n`.
    #[arg(long)]
    element: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Wheel,
    Cycle,
    Path,
    Star,
    Complete,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Part {
    Minus,
    Plus,
    Outside,
}

#[derive(Clone, Copy, ValueEnum)]
enum SetArg {
    Minus,
    Plus,
    Union,
    Full,
}

impl From<SetArg> for SetKind {
    fn from(s: SetArg) -> Self {
        match s {
            SetArg::Minus => SetKind::Minus,
            SetArg::Plus => SetKind::Plus,
            SetArg::Union => SetKind::Union,
            SetArg::Full => SetKind::Full,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GreenCheck {
    #[value(name = "theorem-J")]
    TheoremJ,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    DomIm,
    Ideals,
}

#[derive(Clone, Copy, ValueEnum)]
enum Style {
    Constructive,
    Shortest,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RankMonoid {
    Minus,
    Full,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    #[value(name = "lower+upper")]
    LowerUpper,
    Exact,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    All,
    Distances,
    Characterization,
    Split,
    Green,
    Generation,
    Factorization,
    Rank,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::All => Suite::All,
            SuiteArg::Distances => Suite::Distances,
            SuiteArg::Characterization => Suite::Characterization,
            SuiteArg::Split => Suite::Split,
            SuiteArg::Green => Suite::Green,
            SuiteArg::Generation => Suite::Generation,
            SuiteArg::Factorization => Suite::Factorization,
            SuiteArg::Rank => Suite::Rank,
        }
    }
}

/// Command output: the payload, its status and wall-clock timings kept apart
/// so the payload is reproducible.
struct Output {
    result: Value,
    status: Status,
    timings: BTreeMap<String, f64>,
}

impl Output {
    fn pass(result: Value) -> Self {
        Output { result, status: Status::Pass, timings: BTreeMap::new() }
    }
}

type CmdResult = Result<Output, Error>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Some(w) = cli.workers {
        if w == 0 || rayon::ThreadPoolBuilder::new().num_threads(w).build_global().is_err() {
            eprintln!("error: invalid worker count {w}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let start = Instant::now();
    match run(&cli) {
        Ok(mut out) => {
            out.timings.insert("total".into(), start.elapsed().as_secs_f64());
            let envelope = json!({
                "status": out.status,
                "result": out.result,
                "timings": out.timings,
            });
            // a closed pipe downstream is not an error of ours
            let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(&envelope).expect("JSON output"));
            ExitCode::from(out.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::NotInMonoid(_) | Error::Verification(_) => 1,
        _ => EXIT_USAGE,
    }
}

fn run(cli: &Cli) -> CmdResult {
    let cap = cli.element_cap;
    match &cli.cmd {
        Cmd::Enumerate { graph, n, filter, out } => enumerate(*graph, *n, *filter, out.as_ref()),
        Cmd::Classify(e) => classify_cmd(e),
        Cmd::Jtype(e) => jtype_cmd(e),
        Cmd::Gens { n, set, out } => gens_cmd(*n, *set, out.as_ref()),
        Cmd::Close { n, set, report } => close_cmd(*n, *set, cap, report.as_ref()),
        Cmd::Green { n, monoid, check, mode, out } => green_cmd(*n, *monoid, *check, *mode, cap, out.as_ref()),
        Cmd::Factorize { element, style } => factorize_cmd(element, *style, cap),
        Cmd::Rank { n, monoid, method, budget } => rank_cmd(*n, *monoid, *method, *budget, cap),
        Cmd::Verify { suite, n_min, n_max, samples, factor_samples, budget, seed, out } => {
            let opts = Options {
                element_cap: cap,
                samples: *samples,
                factor_samples: *factor_samples,
                rank_budget: *budget,
                seed: *seed,
                ..Options::default()
            };
            let report = verify::run((*suite).into(), *n_min, *n_max, &opts)?;
            let result = serde_json::to_value(&report)?;
            write_json(out.as_ref(), &result)?;
            Ok(Output { result, status: report.status, timings: report.timings().into_iter().collect() })
        }
    }
}

fn check_n(n: usize) -> Result<(), Error> {
    if !(4..=verify::MAX_N).contains(&n) {
        return Err(Error::Usage(format!("n must lie in 4..={}, got {n}", verify::MAX_N)));
    }
    Ok(())
}

fn write_json(path: Option<&PathBuf>, v: &impl Serialize) -> Result<(), Error> {
    if let Some(p) = path {
        let s = serde_json::to_string_pretty(v)?;
        std::fs::write(p, s + "\n").map_err(|e| Error::Usage(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn parse_element(args: &ElementArgs) -> Result<PartialInjection, Error> {
    check_n(args.n)?;
    let a = PartialInjection::from_json_str(&args.element, Some(Ambient::wheel(args.n)?))?;
    let amb = a.ambient();
    if amb != Ambient::wheel(args.n)? && amb != Ambient::rim(args.n)? {
        return Err(Error::Usage(format!("element lives on {amb}, expected 0..{n} or 1..{n}", n = args.n)));
    }
    Ok(a)
}

/// The element on the wheel ambient, after checking it is an isometry.
fn wheel_member(n: usize, a: &PartialInjection) -> Result<PartialInjection, Error> {
    let w = a.with_ambient(Ambient::wheel(n)?)?;
    if !Metric::new(&wheel(n)?)?.is_isometry(&w)? {
        return Err(Error::NotInMonoid(format!("{a} is not a partial isometry of W_{n}")));
    }
    Ok(w)
}

fn enumerate(family: Family, n: usize, filter: Option<Part>, out: Option<&PathBuf>) -> CmdResult {
    let fam = match family {
        Family::Wheel => GraphFamily::Wheel,
        Family::Cycle => GraphFamily::Cycle,
        Family::Path => GraphFamily::Path,
        Family::Star => GraphFamily::Star,
        Family::Complete => GraphFamily::Complete,
    };
    let graph = fam.build(n)?;
    let mut elements = enumerate_dp(&graph, DEFAULT_VERTEX_CAP)?;
    if let Some(part) = filter {
        if !matches!(family, Family::Wheel) {
            return Err(Error::Usage("--filter applies to wheels only".into()));
        }
        let want = match part {
            Part::Minus => Classification::Minus,
            Part::Plus => Classification::Plus,
            Part::Outside => Classification::Outside,
        };
        elements.retain(|a| classify(a) == want);
    }
    let result = json!({
        "graph": graph.name(),
        "n": n,
        "count": elements.len(),
        "elements": elements,
    });
    write_json(out, &result)?;
    Ok(Output::pass(result))
}

fn classify_cmd(args: &ElementArgs) -> CmdResult {
    let a = wheel_member(args.n, &parse_element(args)?)?;
    Ok(Output::pass(json!({
        "element": a,
        "rank": a.rank(),
        "classification": classify(&a).to_string(),
    })))
}

fn jtype_cmd(args: &ElementArgs) -> CmdResult {
    let n = args.n;
    let a = wheel_member(n, &parse_element(args)?)?;
    let (via, t) = match classify(&a) {
        Classification::Minus => ("self", j_type(n, &a)?),
        Classification::Plus => ("psi", j_type(n, &psi(&a)?)?),
        Classification::Outside => {
            return Err(Error::NotInMonoid(format!("{a} moves the hub; J-types are defined on the other two parts")));
        }
    };
    let mut result = json!({ "element": a, "jtype": t.0, "display": t.to_string(), "via": via });
    if n >= 5 {
        result["class"] = json!(j_class_name(n, &a)?);
    }
    Ok(Output::pass(result))
}

fn gens_cmd(n: usize, set: SetArg, out: Option<&PathBuf>) -> CmdResult {
    check_n(n)?;
    let kind: SetKind = set.into();
    let g = kind.genset(n)?;
    let gens: Vec<Value> = g.labels.iter().zip(&g.elements).map(|(l, e)| json!({ "label": l, "map": e })).collect();
    let result = json!({ "set": kind.to_string(), "n": n, "ambient": g.ambient, "size": g.len(), "generators": gens });
    write_json(out, &result)?;
    Ok(Output::pass(result))
}

/// The part of the enumerated monoid a generating set is meant to produce.
fn target(n: usize, kind: SetKind) -> Result<Vec<PartialInjection>, Error> {
    let dp = enumerate_dp(&wheel(n)?, DEFAULT_VERTEX_CAP)?;
    let mut v = match kind {
        SetKind::Minus => split_by_class(&dp)?.minus,
        SetKind::Plus => dp.into_iter().filter(|a| classify(a) == Classification::Plus).collect(),
        SetKind::Union => dp.into_iter().filter(|a| classify(a) != Classification::Outside).collect(),
        SetKind::Full => dp,
    };
    v.sort();
    Ok(v)
}

fn closure_of(n: usize, kind: SetKind, cap: usize) -> Result<MonoidClosure, Error> {
    let g = kind.genset(n)?;
    generate(g.ambient, &g.elements, cap)
}

fn close_cmd(n: usize, set: SetArg, cap: usize, report: Option<&PathBuf>) -> CmdResult {
    check_n(n)?;
    let kind: SetKind = set.into();
    let t = Instant::now();
    let c = closure_of(n, kind, cap)?;
    let closing = t.elapsed().as_secs_f64();
    let want = target(n, kind)?;
    let equal = c.sorted_elements() == want;
    let mut by_rank = BTreeMap::new();
    for a in c.elements() {
        *by_rank.entry(a.rank()).or_insert(0usize) += 1;
    }
    let result = json!({
        "set": kind.to_string(),
        "n": n,
        "ambient": c.ambient(),
        "generators": kind.genset(n)?.labels,
        "size": c.len(),
        "enumerated_size": want.len(),
        "equals_enumerated": equal,
        "max_word_len": c.max_word_len(),
        "by_rank": by_rank,
    });
    write_json(report, &result)?;
    let status = if equal { Status::Pass } else { Status::Fail };
    Ok(Output { result, status, timings: [("closure".to_string(), closing)].into() })
}

fn class_label(n: usize, kind: SetKind, a: &PartialInjection) -> Result<String, Error> {
    Ok(match kind {
        SetKind::Full if n >= 5 => j_class_name(n, a)?,
        SetKind::Full => classify(a).to_string(),
        _ => match classify(a) {
            Classification::Minus => format!("-{}", j_type(n, a)?),
            Classification::Plus => format!("+{}", j_type(n, &psi(a)?)?),
            Classification::Outside => "outside".into(),
        },
    })
}

#[derive(Serialize)]
struct ClassRow {
    class: usize,
    size: usize,
    rank: usize,
    label: String,
    representative: String,
}

fn green_cmd(
    n: usize,
    monoid: SetArg,
    check: Option<GreenCheck>,
    mode: ModeArg,
    cap: usize,
    out: Option<&PathBuf>,
) -> CmdResult {
    check_n(n)?;
    let kind: SetKind = monoid.into();
    let c = closure_of(n, kind, cap)?;
    let t = Instant::now();
    let mode = match mode {
        ModeArg::DomIm => GreenMode::ByDomIm,
        ModeArg::Ideals => GreenMode::ByIdeals,
    };
    let g = green(&c, mode);
    let green_time = t.elapsed().as_secs_f64();
    let mut rows = Vec::new();
    for members in classes(&g.d) {
        let rep = members.iter().map(|&i| c.elements()[i]).min().expect("classes are nonempty");
        rows.push(ClassRow {
            class: 0,
            size: members.len(),
            rank: rep.rank(),
            label: class_label(n, kind, &rep)?,
            representative: serde_json::to_string(&rep)?,
        });
    }
    rows.sort_by(|a, b| b.rank.cmp(&a.rank).then_with(|| a.label.cmp(&b.label)).then_with(|| a.representative.cmp(&b.representative)));
    for (i, r) in rows.iter_mut().enumerate() {
        r.class = i;
    }
    if let Some(p) = out {
        if p.extension().is_some_and(|e| e == "csv") {
            let mut w = csv::Writer::from_path(p).map_err(|e| Error::Usage(format!("{}: {e}", p.display())))?;
            for r in &rows {
                w.serialize(r).map_err(|e| Error::Usage(e.to_string()))?;
            }
            w.flush().map_err(|e| Error::Usage(e.to_string()))?;
        } else {
            write_json(Some(p), &rows)?;
        }
    }
    let mut result = json!({
        "monoid": kind.to_string(),
        "n": n,
        "size": c.len(),
        "d_classes": rows.len(),
        "classes": rows,
    });
    let mut status = Status::Pass;
    let mut timings = BTreeMap::from([("green".to_string(), green_time)]);
    if let Some(GreenCheck::TheoremJ) = check {
        let report = verify::run(Suite::Green, n, n, &Options { element_cap: cap, ..Options::default() })?;
        status = report.status;
        timings.extend(report.timings());
        result["check"] = serde_json::to_value(&report)?;
    }
    Ok(Output { result, status, timings })
}

fn factorize_cmd(args: &ElementArgs, style: Style, cap: usize) -> CmdResult {
    let n = args.n;
    let a = parse_element(args)?;
    let on_rim = a.ambient() == Ambient::rim(n)?;
    let word = match style {
        Style::Constructive => {
            let mut f = Factorizer::new(n)?;
            if on_rim {
                f.minus(&a)?
            } else {
                f.full(&wheel_member(n, &a)?)?
            }
        }
        Style::Shortest => {
            let kind = if on_rim { SetKind::Minus } else { SetKind::Full };
            let g = kind.genset(n)?;
            let c = generate(g.ambient, &g.elements, cap)?;
            let target = if on_rim { a } else { wheel_member(n, &a)? };
            let idx = c
                .index_of(&target)
                .ok_or_else(|| Error::NotInMonoid(format!("{a} is not generated by the {kind} set")))?;
            Word::new(g.ambient, c.word(idx).into_iter().map(|s| g.labels[s]).collect())
        }
    };
    let value = word.evaluate()?;
    let ok = value == a.with_ambient(word.ambient)?;
    let result = json!({
        "element": a,
        "word": word.letters,
        "length": word.len(),
        "display": word.to_string(),
        "evaluates": ok,
    });
    Ok(Output { result, status: if ok { Status::Pass } else { Status::Fail }, timings: BTreeMap::new() })
}

fn rank_cmd(n: usize, monoid: RankMonoid, method: Method, budget: usize, cap: usize) -> CmdResult {
    check_n(n)?;
    let kind = if monoid == RankMonoid::Minus { SetKind::Minus } else { SetKind::Full };
    let c = closure_of(n, kind, cap)?;
    let mut result = json!({ "monoid": kind.to_string(), "n": n, "size": c.len() });
    let status = match method {
        Method::LowerUpper => {
            if monoid == RankMonoid::Full && n == 4 {
                return Err(Error::Usage("no structural lower bound for n = 4; use --method exact".into()));
            }
            let lower = match monoid {
                RankMonoid::Minus => rank_lower_minus(n, &c)?,
                RankMonoid::Full => rank_lower_full(n, &c)?,
            };
            let g = kind.genset(n)?;
            let upper = match rank_upper(g.ambient, &g.elements, &target(n, kind)?)? {
                RankUpper::Generated(k) => k,
                RankUpper::Missing(a) | RankUpper::Extra(a) => {
                    return Err(Error::Verification(format!("the {kind} set does not generate the monoid: {a}")));
                }
            };
            result["lower"] = json!(lower);
            result["upper"] = json!(upper);
            result["generators"] = json!(g.labels);
            if lower == upper {
                result["rank"] = json!(lower);
                Status::Pass
            } else {
                Status::Inconclusive
            }
        }
        Method::Exact => match rank_exact(&c, budget)? {
            RankSearch::Exact { rank, witness } => {
                result["rank"] = json!(rank);
                result["witness"] = json!(witness);
                Status::Pass
            }
            RankSearch::Inconclusive { closures } => {
                result["closures"] = json!(closures);
                Status::Inconclusive
            }
        },
    };
    Ok(Output { result, status, timings: BTreeMap::new() })
}
