//! `tpkit` command-line front end.
//!
//! Exit codes: 0 success or verified, 1 verification false or no witness,
//! 2 usage or data error, 3 budget or deadline reached.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use tpkit::patterns::{canonical_witness, verify_with, Certificate, Dims, InpArray, Kind, LabeledTree, SetSystem,
    WitnessBudget, DEFAULT_CAP};
use tpkit::pfc::{
    imaginary_cover, in_class, oracle_by_name, pasting1_build, pasting2_build, pfc_amalgamate, tp2_demo,
    BaseClassOracle, FinRelStructure, Fragment, PfcError, PfcStructure,
};
use tpkit::search::{search, Outcome, SearchError, SearchSpec};
use tpkit::suites::{self, SuiteReport};
use tpkit::transforms::{self as tf, Dichotomy, TransformError};
use tpkit::treeidx::{qftp, Lang, Node, TreeShape};
use tpkit::treeops::{apply_intersect, build, restriction, OpDesc};

const OK: u8 = 0;
const FALSE: u8 = 1;
const USAGE: u8 = 2;
const UNKNOWN: u8 = 3;

#[derive(Parser)]
#[command(name = "tpkit", version, about = "Tree-indexed patterns: verify, search, transform, amalgamate")]
struct Cli {
    /// Print machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for search and fuzzing.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    threads: u16,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Quantifier-free type of a node tuple.
    Qftp(QftpArgs),
    /// Build a tree operation as a node map, optionally applying it.
    Op(OpArgs),
    /// Re-verify a certificate or a bare payload.
    Verify(VerifyArgs),
    /// Search a set system for a pattern witness.
    Search(SearchArgs),
    /// Run a pattern transform on a certificate.
    Transform(TransformArgs),
    /// Parametrized Fraïssé structures.
    #[command(subcommand)]
    Pfc(PfcCmd),
    /// Canonical witness in the free set system.
    Canonical(CanonicalArgs),
    /// Randomized property suites.
    Fuzz(FuzzArgs),
}

#[derive(Args)]
struct QftpArgs {
    #[arg(long, default_value = "L0")]
    lang: Lang,
    /// Nodes such as `e`, `0`, `1.0.2`.
    #[arg(required = true)]
    nodes: Vec<Node>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OpName {
    Identity,
    Widening,
    Stretching,
    Fattening,
    Restriction,
    Elongation,
    Comb,
    Spread,
    SpreadAt,
    BinaryRestriction,
}

#[derive(Args)]
struct OpArgs {
    #[arg(long)]
    op: OpName,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated levels for restriction.
    #[arg(long, value_delimiter = ',')]
    levels: Vec<usize>,
    /// Target shape (not used by restriction).
    #[arg(long)]
    target: Option<TreeShape>,
    /// Source shape; defaults to the minimal one.
    #[arg(long)]
    source: Option<TreeShape>,
    /// Labeled tree to pull back along the map (labels intersected).
    #[arg(long)]
    apply: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Pattern kind, e.g. `sop2`, `tp:3`, `cdt:2,2`; overrides the certificate's.
    #[arg(long)]
    kind: Option<Kind>,
    #[arg(long, conflicts_with_all = ["tree", "array"])]
    cert: Option<PathBuf>,
    #[arg(long, conflicts_with = "array")]
    tree: Option<PathBuf>,
    #[arg(long)]
    array: Option<PathBuf>,
    /// Most violations listed.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    /// Full search spec as JSON; flags below override its budget.
    #[arg(long, conflicts_with_all = ["kind", "shape", "dims"])]
    spec: Option<PathBuf>,
    #[arg(long)]
    kind: Option<Kind>,
    #[arg(long, conflicts_with = "dims")]
    shape: Option<TreeShape>,
    /// Array dimensions `RxC`.
    #[arg(long)]
    dims: Option<String>,
    #[arg(long)]
    system: PathBuf,
    /// Candidate set names in tie-break order (default: all).
    #[arg(long, value_delimiter = ',')]
    family: Vec<String>,
    /// Enumerate every assignment instead of pruning.
    #[arg(long)]
    no_prune: bool,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    max_space: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    max_visits: Option<u64>,
    /// Wall-clock deadline in seconds.
    #[arg(long, env = "TPKIT_BUDGET_SECONDS")]
    seconds: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformName {
    Cdt2ToSct,
    SctkToCdt2Step,
    SctkToCdt2,
    CdtToSctkOrInp,
    InpHalvingStep,
    InpHalving,
    Aleph1Stage,
    CombTransport,
    Tp1ToSop2,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long)]
    name: TransformName,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Level for aleph1-stage.
    #[arg(long)]
    n: Option<usize>,
    /// Target shape for comb-transport.
    #[arg(long)]
    target: Option<TreeShape>,
}

#[derive(Subcommand)]
enum PfcCmd {
    /// Whether every parameter's structure is in the base class.
    InClass {
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        structure: PathBuf,
    },
    /// Strong amalgam of two extensions of a common part.
    Amalgamate {
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        common: PathBuf,
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Paste one-point extensions, one per parameter, at a new object.
    Pasting1 {
        #[arg(long)]
        oracle: String,
        #[arg(long, value_delimiter = ',')]
        objects: Vec<String>,
        /// JSON list of fragments.
        #[arg(long)]
        fragments: PathBuf,
        #[arg(long, default_value = "*")]
        star: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Add a parameter agreeing with `b0` on A∪C and `b1` on B∪C.
    Pasting2 {
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        structure: PathBuf,
        #[arg(long, value_delimiter = ',')]
        a: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        b: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        c: Vec<String>,
        #[arg(long)]
        b0: String,
        #[arg(long)]
        b1: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Blow each element up into a class of copies.
    Cover {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long, default_value_t = 2)]
        class_size: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tp2 array realized by pasted equivalence relations.
    Tp2Demo {
        #[arg(long, default_value_t = 3)]
        rows: usize,
        #[arg(long, default_value_t = 3)]
        cols: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CanonicalArgs {
    #[arg(long)]
    kind: Kind,
    #[arg(long, conflicts_with = "dims")]
    shape: Option<TreeShape>,
    #[arg(long)]
    dims: Option<String>,
    #[arg(long, default_value_t = 1 << 16)]
    max_domain: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Preservation,
    Index,
    Comb,
    Transforms,
    Aleph1,
    Search,
    Pfc,
    Canonical,
    All,
}

#[derive(Args)]
struct FuzzArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "all")]
    suite: Suite,
    /// Random instances per suite.
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
}

/// A finished command: JSON result, human summary, exit code.
struct Report {
    value: Value,
    human: String,
    code: u8,
}

impl Report {
    fn new(value: impl Serialize, human: impl Into<String>, code: u8) -> Result<Self> {
        Ok(Report {
            value: serde_json::to_value(value)?,
            human: human.into(),
            code,
        })
    }
}

/// Errors with an exit code other than the usage default.
#[derive(Debug)]
struct Coded(u8, String);

impl std::fmt::Display for Coded {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.1)
    }
}

impl std::error::Error for Coded {}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_json(path: &Path, v: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

/// Inputs must exist and outputs must have an existing directory.
fn check_paths<'a>(inputs: impl IntoIterator<Item = &'a PathBuf>, output: Option<&PathBuf>) -> Result<()> {
    for p in inputs {
        if p.as_os_str() != "-" && !p.is_file() {
            bail!("input file {} does not exist", p.display());
        }
    }
    if let Some(o) = output {
        let dir = o.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
        if !dir.is_dir() {
            bail!("output directory {} does not exist", dir.display());
        }
    }
    Ok(())
}

fn parse_dims(shape: Option<TreeShape>, dims: Option<&str>) -> Result<Dims> {
    match (shape, dims) {
        (Some(s), None) => Ok(Dims::Tree(s)),
        (None, Some(d)) => {
            let (r, c) = d.split_once(['x', 'X']).ok_or_else(|| anyhow!("dims must look like RxC, got {d:?}"))?;
            Ok(Dims::Array {
                rows: r.trim().parse().context("rows")?,
                cols: c.trim().parse().context("cols")?,
            })
        }
        _ => bail!("give exactly one of --shape or --dims"),
    }
}

fn verdict_line(c: &Certificate) -> (String, u8) {
    match &c.verdict {
        Some(v) if v.ok => (format!("{}: verified", c.kind), OK),
        Some(v) => (
            format!(
                "{}: not verified, {} violation(s){}: {}",
                c.kind,
                v.violations.len(),
                if v.truncated { " (truncated)" } else { "" },
                serde_json::to_string(&v.violations).unwrap_or_default()
            ),
            FALSE,
        ),
        None => (format!("{}: no verdict", c.kind), FALSE),
    }
}

fn cmd_qftp(a: QftpArgs) -> Result<Report> {
    let t = qftp(&a.nodes, a.lang);
    let human = serde_json::to_string(&t)?;
    Report::new(t, human, OK)
}

fn cmd_op(a: OpArgs) -> Result<Report> {
    check_paths(a.apply.iter(), a.out.as_ref())?;
    let need = |v: Option<usize>, f: &str| v.ok_or_else(|| anyhow!("--{f} is required for this operation"));
    let target = || a.target.ok_or_else(|| anyhow!("--target is required for this operation"));
    let mut map = match a.op {
        OpName::Restriction => {
            let src = a.source.ok_or_else(|| anyhow!("restriction needs --source"))?;
            if a.levels.is_empty() {
                bail!("restriction needs --levels");
            }
            restriction(&a.levels, src)?
        }
        op => {
            let desc = match op {
                OpName::Identity => OpDesc::Identity,
                OpName::Widening => OpDesc::Widening {
                    k: u32::try_from(need(a.k, "k")?)?,
                    n: need(a.n, "n")?,
                },
                OpName::Stretching => OpDesc::Stretching {
                    k: need(a.k, "k")?,
                    n: need(a.n, "n")?,
                },
                OpName::Fattening => OpDesc::Fattening { k: need(a.k, "k")? },
                OpName::Elongation => OpDesc::Elongation { k: need(a.k, "k")? },
                OpName::Comb => OpDesc::Comb,
                OpName::Spread => OpDesc::Spread,
                OpName::SpreadAt => OpDesc::SpreadAt { n: need(a.n, "n")? },
                OpName::BinaryRestriction => OpDesc::BinaryRestriction,
                OpName::Restriction => unreachable!(),
            };
            build(desc, target()?, a.source)?
        }
    };
    let Some(path) = &a.apply else {
        if let Some(o) = &a.out {
            write_json(o, &map)?;
        }
        let human = format!("{:?}: {} -> {}", map.op, map.target, map.source);
        return Report::new(&map, human, OK);
    };
    let tree: LabeledTree = read_json(path)?;
    if a.source.is_none() && map.source != tree.shape {
        map = map.with_source(tree.shape)?;
    }
    let out = apply_intersect(&map, &tree)?;
    if let Some(o) = &a.out {
        write_json(o, &out)?;
    }
    let human = format!("pulled back onto {} ({} elements)", out.shape, out.domain_size);
    Report::new(json!({ "map": map.reference(), "tree": out }), human, OK)
}

fn cmd_verify(a: VerifyArgs) -> Result<Report> {
    check_paths(a.cert.iter().chain(&a.tree).chain(&a.array), a.out.as_ref())?;
    let cert = match (&a.cert, &a.tree, &a.array) {
        (Some(p), None, None) => {
            let mut c: Certificate = read_json(p)?;
            if let Some(k) = a.kind {
                c.kind = k;
            }
            c
        }
        (None, Some(p), None) => {
            let kind = a.kind.ok_or_else(|| anyhow!("--kind is required with --tree"))?;
            Certificate::tree(kind, read_json::<LabeledTree>(p)?)
        }
        (None, None, Some(p)) => {
            let kind = a.kind.ok_or_else(|| anyhow!("--kind is required with --array"))?;
            Certificate::array(kind, read_json::<InpArray>(p)?)
        }
        _ => bail!("give exactly one of --cert, --tree or --array"),
    };
    let checked = verify_with(&cert, a.cap)?;
    if let Some(o) = &a.out {
        write_json(o, &checked)?;
    }
    let (human, code) = verdict_line(&checked);
    Report::new(&checked, human, code)
}

fn cmd_search(a: SearchArgs, threads: usize) -> Result<Report> {
    check_paths(a.spec.iter().chain([&a.system]), a.out.as_ref())?;
    let mut spec = match &a.spec {
        Some(p) => read_json::<SearchSpec>(p)?,
        None => {
            let kind = a.kind.clone().ok_or_else(|| anyhow!("--kind is required without --spec"))?;
            let mut s = SearchSpec::new(kind, parse_dims(a.shape, a.dims.as_deref())?);
            s.family = a.family.clone();
            s.prune = !a.no_prune;
            s
        }
    };
    if a.spec.is_some() && !a.family.is_empty() {
        spec.family = a.family.clone();
    }
    if a.no_prune {
        spec.prune = false;
    }
    if let Some(x) = a.max_space {
        spec.budget.max_space = x.into();
    }
    if let Some(x) = a.max_visits {
        spec.budget.max_visits = x;
    }
    if let Some(s) = a.seconds {
        if !(s > 0.0) {
            bail!("the deadline must be positive");
        }
        spec.budget.deadline = Some(Duration::try_from_secs_f64(s)?);
    }
    spec.threads = spec.threads.max(threads);
    let system: SetSystem = read_json::<SetSystem>(&a.system)?.normalize()?;
    let res = match search(&spec, &system) {
        Err(e @ SearchError::BudgetExceeded { .. }) => return Err(Coded(UNKNOWN, e.to_string()).into()),
        r => r?,
    };
    let base = json!({ "space": res.space.to_string(), "visited": res.visited });
    let (value, human, code) = match &res.outcome {
        Outcome::Found { certificate, assignment } => {
            if let Some(o) = &a.out {
                write_json(o, certificate)?;
            }
            let names: Vec<&String> = if spec.family.is_empty() {
                assignment.iter().map(|&i| system.sets.get_index(i).expect("in family").0).collect()
            } else {
                assignment.iter().map(|&i| &spec.family[i]).collect()
            };
            let v = json!({ "outcome": "found", "certificate": certificate, "assignment": names, "stats": base });
            (v, format!("witness found: {}", serde_json::to_string(&names)?), OK)
        }
        Outcome::NoWitness => (
            json!({ "outcome": "no_witness", "stats": base }),
            "no witness (exhaustive)".to_string(),
            FALSE,
        ),
        Outcome::Unknown { reason } => (
            json!({ "outcome": "unknown", "reason": reason, "stats": base }),
            format!("unknown: {reason}"),
            UNKNOWN,
        ),
    };
    Report::new(value, human, code)
}

fn transform_error(e: TransformError) -> anyhow::Error {
    let code = match &e {
        TransformError::InputRejected { .. }
        | TransformError::Postcondition { .. }
        | TransformError::ExtractionFailed { .. } => FALSE,
        _ => USAGE,
    };
    Coded(code, e.to_string()).into()
}

fn cmd_transform(a: TransformArgs) -> Result<Report> {
    check_paths([&a.input], a.out.as_ref())?;
    let c: Certificate = read_json(&a.input)?;
    let need = |v: Option<usize>, f: &str| v.ok_or_else(|| anyhow!("--{f} is required for this transform"));
    let (main, extra): (tf::Transformed, Value) = match a.name {
        TransformName::Cdt2ToSct => (tf::cdt2_to_sct(&c).map_err(transform_error)?, Value::Null),
        TransformName::SctkToCdt2Step => (tf::sctk_to_cdt2_step(&c, need(a.m, "m")?).map_err(transform_error)?, Value::Null),
        TransformName::SctkToCdt2 => {
            let (t, trail) = tf::sctk_to_cdt2(&c).map_err(transform_error)?;
            (t, json!({ "trail": trail }))
        }
        TransformName::InpHalvingStep => (tf::inp_halving_step(&c, need(a.m, "m")?).map_err(transform_error)?, Value::Null),
        TransformName::InpHalving => {
            let (t, trail) = tf::inp_halving(&c).map_err(transform_error)?;
            (t, json!({ "trail": trail }))
        }
        TransformName::CdtToSctkOrInp => {
            match tf::cdt_to_sctk_or_inp(&c, need(a.k, "k")?, need(a.m, "m")?).map_err(transform_error)? {
                Dichotomy::Sct(t) => (t, json!({ "branch": "sct" })),
                Dichotomy::Inp(t) => (t, json!({ "branch": "inp" })),
            }
        }
        TransformName::Aleph1Stage => {
            let (t, rep) = tf::aleph1_stage(&c, need(a.n, "n")?).map_err(transform_error)?;
            (t, json!({ "report": rep }))
        }
        TransformName::CombTransport => {
            let target = a.target.ok_or_else(|| anyhow!("--target is required for comb-transport"))?;
            (tf::comb_transport(&c, target).map_err(transform_error)?, Value::Null)
        }
        TransformName::Tp1ToSop2 => (tf::tp1_to_sop2(&c).map_err(transform_error)?, Value::Null),
    };
    if let Some(o) = &a.out {
        write_json(o, &main.certificate)?;
    }
    let mut value = serde_json::to_value(&main)?;
    if let Value::Object(m) = extra {
        value.as_object_mut().expect("struct").extend(m);
    }
    let (line, _) = verdict_line(&main.certificate);
    let human = format!("{} ({})", line, main.provenance.case_fired.as_deref().unwrap_or("done"));
    Report::new(value, human, OK)
}

fn oracle(name: &str) -> Result<&'static dyn BaseClassOracle> {
    oracle_by_name(name).ok_or_else(|| anyhow!("unknown oracle {name:?} (expected graph or equivalence)"))
}

fn pfc_error(e: PfcError) -> anyhow::Error {
    let code = if matches!(e, PfcError::Internal(_)) { FALSE } else { USAGE };
    Coded(code, e.to_string()).into()
}

fn save(out: &Option<PathBuf>, v: &impl Serialize) -> Result<()> {
    match out {
        Some(o) => write_json(o, v),
        None => Ok(()),
    }
}

fn cmd_pfc(cmd: PfcCmd) -> Result<Report> {
    match cmd {
        PfcCmd::InClass { oracle: o, structure } => {
            check_paths([&structure], None)?;
            let o = oracle(&o)?;
            let s: PfcStructure = read_json(&structure)?;
            let yes = in_class(&s, o).map_err(pfc_error)?;
            let human = format!("{} in the {} class", if yes { "is" } else { "is not" }, o.name());
            Report::new(json!({ "in_class": yes }), human, if yes { OK } else { FALSE })
        }
        PfcCmd::Amalgamate { oracle: o, common, left, right, out } => {
            check_paths([&common, &left, &right], out.as_ref())?;
            let o = oracle(&o)?;
            let am = pfc_amalgamate(o, &read_json(&common)?, &read_json(&left)?, &read_json(&right)?)
                .map_err(pfc_error)?;
            save(&out, &am.result)?;
            let human = format!(
                "amalgam with {} objects and {} parameters",
                am.result.objects.len(),
                am.result.parameters.len()
            );
            Report::new(&am, human, OK)
        }
        PfcCmd::Pasting1 { oracle: o, objects, fragments, star, out } => {
            check_paths([&fragments], out.as_ref())?;
            let o = oracle(&o)?;
            let frags: Vec<Fragment> = read_json(&fragments)?;
            let s = pasting1_build(o, &objects, &frags, &star).map_err(pfc_error)?;
            save(&out, &s)?;
            Report::new(&s, format!("pasted {} fragment(s) at {star}", frags.len()), OK)
        }
        PfcCmd::Pasting2 { oracle: o, structure, a, b, c, b0, b1, out } => {
            check_paths([&structure], out.as_ref())?;
            let o = oracle(&o)?;
            let m: PfcStructure = read_json(&structure)?;
            let p = pasting2_build(o, &m, &a, &b, &c, &b0, &b1).map_err(pfc_error)?;
            save(&out, &p.structure)?;
            Report::new(&p, format!("added parameter {}", p.parameter), OK)
        }
        PfcCmd::Cover { structure, class_size, out } => {
            check_paths([&structure], out.as_ref())?;
            let m: FinRelStructure = read_json(&structure)?;
            let s = imaginary_cover(&m, class_size).map_err(pfc_error)?;
            save(&out, &s)?;
            Report::new(&s, format!("cover with {} elements", s.universe.len()), OK)
        }
        PfcCmd::Tp2Demo { rows, cols, out } => {
            check_paths([], out.as_ref())?;
            let (s, c) = tp2_demo(rows, cols).map_err(pfc_error)?;
            let c = verify_with(&c, DEFAULT_CAP)?;
            save(&out, &c)?;
            let (human, code) = verdict_line(&c);
            Report::new(json!({ "structure": s, "certificate": c }), human, code)
        }
    }
}

fn cmd_canonical(a: CanonicalArgs) -> Result<Report> {
    check_paths([], a.out.as_ref())?;
    let dims = parse_dims(a.shape, a.dims.as_deref())?;
    let c = canonical_witness(&a.kind, dims, WitnessBudget { max_domain: a.max_domain })?;
    save(&a.out, &c)?;
    let (human, code) = verdict_line(&c);
    Report::new(&c, human, code)
}

fn cmd_fuzz(a: FuzzArgs, threads: usize) -> Result<Report> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(a.seed);
    let n = a.count as usize;
    let want = |s: Suite| a.suite == Suite::All || a.suite == s;
    let shape = |b, d| TreeShape::new(b, d).expect("valid");
    let mut reports: Vec<SuiteReport> = Vec::new();
    if want(Suite::Preservation) {
        reports.push(suites::preservation_suite(3, 3, 2));
        reports.push(suites::preservation_sampled(&mut rng, shape(2, 4), n * 10));
    }
    if want(Suite::Index) {
        reports.push(suites::index_lemma_suite(shape(3, 3)));
    }
    if want(Suite::Comb) {
        reports.push(suites::comb_suite(&mut rng, n, threads));
    }
    if want(Suite::Transforms) {
        reports.extend(suites::transform_suites(&mut rng, n));
    }
    if want(Suite::Aleph1) {
        reports.push(suites::aleph1_suite(&mut rng, n));
    }
    if want(Suite::Search) {
        reports.push(suites::search_agreement(&mut rng, n, 10_000, threads));
    }
    if want(Suite::Pfc) {
        reports.push(suites::pfc_suite(&mut rng, n));
    }
    if want(Suite::Canonical) {
        reports.push(suites::canonical_suite(100, 3, 3));
    }
    let failed = reports.iter().any(|r| !r.passed());
    let human = reports
        .iter()
        .map(|r| {
            let mut line = format!(
                "{}: {} ({} checks, {} failures)",
                r.name,
                if r.passed() { "pass" } else { "FAIL" },
                r.checked,
                r.failures
            );
            for note in &r.notes {
                line.push_str("\n    ");
                line.push_str(note);
            }
            line
        })
        .collect::<Vec<_>>()
        .join("\n");
    Report::new(json!({ "seed": a.seed, "suites": reports }), human, if failed { FALSE } else { OK })
}

fn run(cli: Cli) -> Result<Report> {
    let threads = cli.threads as usize;
    match cli.cmd {
        Cmd::Qftp(a) => cmd_qftp(a),
        Cmd::Op(a) => cmd_op(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Search(a) => cmd_search(a, threads),
        Cmd::Transform(a) => cmd_transform(a),
        Cmd::Pfc(c) => cmd_pfc(c),
        Cmd::Canonical(a) => cmd_canonical(a),
        Cmd::Fuzz(a) => cmd_fuzz(a, threads),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(r) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&r.value).expect("serializable"));
            } else {
                println!("{}", r.human);
            }
            ExitCode::from(r.code)
        }
        Err(e) => {
            let code = e.downcast_ref::<Coded>().map_or(USAGE, |c| c.0);
            if json {
                println!("{}", json!({ "error": format!("{e:#}"), "exit": code }));
            }
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
