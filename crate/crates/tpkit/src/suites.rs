//! Randomized and exhaustive property suites shared by the `fuzz`
//! subcommand and the acceptance run. Each returns counts rather than
//! panicking so callers can report every failure.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use serde::Serialize;

use crate::gen::{allowance_array, allowance_tree, random_cdt2_tree, random_system, shuffle_domain};
use crate::patterns::{
    canonical_witness, verify, Certificate, Dims, InpArray, Kind, LabeledTree, SetSystem, Subset,
};
use crate::pfc::{
    check_pfc_amalgam, in_class, is_embedding, pasting1_build, pasting2_build, pfc_amalgamate,
    random_fragments, random_pasting2, random_problem, tp2_demo, BaseClassOracle, Embedding,
    EquivalenceOracle, GraphOracle,
};
use crate::search::{naive_search, search, Outcome, SearchError, SearchSpec};
use crate::transforms::{
    aleph1_stage, cdt2_to_sct, cdt_to_sctk_or_inp, comb_transport, inp_halving, sctk_to_cdt2, sctk_to_cdt2_step,
    Dichotomy,
};
use crate::treeidx::{qftp, Lang, Node, QfType, TreeShape};
use crate::treeops::{
    binary_restriction, elongation, fattening, restriction, spread_embedding, spread_embedding_at,
    stretching, widening, NodeMap,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub checked: usize,
    pub failures: usize,
    pub notes: Vec<String>,
    /// Failure counts keyed by operation, where the suite tracks them.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub by_op: BTreeMap<String, usize>,
}

impl SuiteReport {
    pub fn new(name: &str) -> Self {
        SuiteReport {
            name: name.to_string(),
            checked: 0,
            failures: 0,
            notes: Vec::new(),
            by_op: BTreeMap::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn record(&mut self, ok: bool, note: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.notes.len() < 8 {
                self.notes.push(note());
            }
        }
    }

    pub fn absorb(&mut self, other: SuiteReport) {
        self.checked += other.checked;
        self.failures += other.failures;
        for (k, v) in other.by_op {
            *self.by_op.entry(k).or_default() += v;
        }
        for n in other.notes {
            if self.notes.len() < 8 {
                self.notes.push(n);
            }
        }
    }
}

fn sh(b: u32, d: usize) -> TreeShape {
    TreeShape::new(b, d).expect("branching >= 1")
}

/// All tuples of length `1..=max_arity` over `nodes`, repetitions allowed.
pub fn tuples(nodes: &[Node], max_arity: usize) -> Vec<Vec<Node>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Node>> = vec![Vec::new()];
    for _ in 0..max_arity {
        layer = layer
            .iter()
            .flat_map(|t| {
                nodes.iter().map(move |n| {
                    let mut u = t.clone();
                    u.push(n.clone());
                    u
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Tuples with equal type in `lang` must map to tuples with equal type.
/// `prefix` is prepended to every mapped tuple. Failures are tallied under
/// `op` as well.
fn preservation(report: &mut SuiteReport, op: &str, label: &str, m: &NodeMap, lang: Lang, ts: &[Vec<Node>], prefix: &[Node]) {
    let mut seen: HashMap<QfType, (QfType, usize)> = HashMap::new();
    let before = report.failures;
    for (i, t) in ts.iter().enumerate() {
        let mut img = prefix.to_vec();
        img.extend(m.map_tuple(t).expect("tuple in target"));
        let out = qftp(&img, lang);
        match seen.entry(qftp(t, lang)) {
            Entry::Occupied(e) => {
                let (prev, j) = e.get();
                report.record(*prev == out, || format!("{label} {lang:?}: {:?} vs {:?}", ts[*j], t))
            }
            Entry::Vacant(e) => {
                e.insert((out, i));
            }
        }
    }
    let failed = report.failures - before;
    if failed > 0 {
        *report.by_op.entry(format!("{op} {lang:?}")).or_default() += failed;
    }
}

fn level_sets(depth: usize) -> Vec<Vec<usize>> {
    (1u32..1 << depth)
        .map(|bits| (0..depth).filter(|i| bits >> i & 1 == 1).collect())
        .collect()
}

/// Exhaustive preservation of qf-types under the tree operations, on all
/// target shapes up to `max_b x max_d` and tuples of arity `<= max_arity`.
pub fn preservation_suite(max_b: u32, max_d: usize, max_arity: usize) -> SuiteReport {
    let mut r = SuiteReport::new("preservation");
    for b in 1..=max_b {
        for d in 1..=max_d {
            let target = sh(b, d);
            let all = tuples(&target.nodes(), max_arity);
            let nonroot: Vec<Node> = target.nodes().into_iter().skip(1).collect();
            let nonroot = tuples(&nonroot, max_arity);
            for k in 1..=2 {
                for n in 1..=2 {
                    let m = widening(k, n, target).expect("valid");
                    preservation(&mut r, "widening", &format!("widening({k},{n}) {target}"), &m, Lang::Ls, &all, &[]);
                }
                for n in 0..=2 {
                    let m = stretching(k as usize, n, target).expect("valid");
                    preservation(&mut r, "stretching", &format!("stretching({k},{n}) {target}"), &m, Lang::Ls, &all, &[]);
                }
                let m = elongation(k as usize, target).expect("valid");
                preservation(&mut r, "elongation", &format!("elongation({k}) {target}"), &m, Lang::Ls, &all, &[]);
                preservation(&mut r, "elongation", &format!("elongation({k}) {target}"), &m, Lang::L0, &nonroot, &[]);
                if b == 2 {
                    let (m, stump) = fattening(k as usize, target).expect("binary");
                    for lang in [Lang::Ls, Lang::L0] {
                        preservation(&mut r, "fattening", &format!("fattening({k}) {target}"), &m, lang, &all, &[]);
                    }
                    preservation(&mut r, "fattening", &format!("fattening({k}) over stump {target}"), &m, Lang::L0, &all, &stump);
                }
            }
            // Restriction: the shape is the source, levels any nonempty set.
            for w in level_sets(d) {
                let m = restriction(&w, target).expect("levels in range");
                let ts = tuples(&m.target.nodes(), max_arity);
                for lang in [Lang::Ls, Lang::L0] {
                    preservation(&mut r, "restriction", &format!("restriction({w:?}) {target}"), &m, lang, &ts, &[]);
                }
            }
            if b == 2 {
                let m = spread_embedding(target).expect("binary");
                preservation(&mut r, "spread", &format!("spread {target}"), &m, Lang::L0, &all, &[]);
                for n in 0..=2 {
                    let m = spread_embedding_at(n, target).expect("binary");
                    preservation(&mut r, &format!("spread_at({n})"), &format!("spread_at({n}) {target}"), &m, Lang::L0, &all, &[]);
                }
            }
            if b >= 2 {
                let bin = sh(2, d);
                let m = binary_restriction(bin, target).expect("wide enough");
                let ts = tuples(&bin.nodes(), max_arity);
                preservation(&mut r, "binary_restriction", &format!("binary_restriction {bin} into {target}"), &m, Lang::L0, &ts, &[]);
            }
        }
    }
    r
}

/// Random arity-4 tuples on `shape`, preservation checked among samples
/// that share a type.
pub fn preservation_sampled(rng: &mut dyn RngCore, shape: TreeShape, samples: usize) -> SuiteReport {
    let mut r = SuiteReport::new("preservation (arity 4, sampled)");
    let nodes = shape.nodes();
    let ts: Vec<Vec<Node>> = (0..samples)
        .map(|_| (0..4).map(|_| nodes.choose(rng).expect("nonempty").clone()).collect())
        .collect();
    let mut maps = vec![
        (Lang::Ls, widening(2, 1, shape).expect("valid")),
        (Lang::Ls, stretching(2, 1, shape).expect("valid")),
        (Lang::Ls, elongation(2, shape).expect("valid")),
    ];
    if shape.branching == 2 {
        maps.push((Lang::L0, fattening(2, shape).expect("binary").0));
        maps.push((Lang::L0, spread_embedding(shape).expect("binary")));
    }
    for (lang, m) in &maps {
        preservation(&mut r, &format!("{:?}", m.op), &format!("{:?}", m.op), m, *lang, &ts, &[]);
    }
    r
}

/// Path tuples share a type; incomparable lex-ordered pairs have the type
/// of `(<0>, <1>)`; child arrays below pairwise incomparable nodes are
/// mutually indiscernible.
pub fn index_lemma_suite(shape: TreeShape) -> SuiteReport {
    let mut r = SuiteReport::new("index lemmas");
    let nodes = shape.nodes();
    for lang in [Lang::L0, Lang::Ls] {
        let paths: Vec<Vec<Node>> = shape
            .maximal_paths()
            .iter()
            .map(|p| (0..=p.level()).map(|l| p.prefix(l)).collect())
            .collect();
        if let Some(first) = paths.first() {
            let want = qftp(first, lang);
            for p in &paths {
                r.record(qftp(p, lang) == want, || format!("path {p:?} in {lang:?}"));
            }
        }
    }
    let model = qftp(&[Node::from([0]), Node::from([1])], Lang::L0);
    for a in &nodes {
        for b in &nodes {
            if a < b && !a.is_comparable(b) {
                r.record(qftp(&[a.clone(), b.clone()], Lang::L0) == model, || format!("pair {a} {b}"));
            }
        }
    }
    // Mutual indiscernibility of rows (η_i⌢⟨j⟩ : j).
    let inner: Vec<Node> = nodes.iter().filter(|n| n.level() + 2 <= shape.depth).cloned().collect();
    let b = shape.branching;
    let col_choices: Vec<Vec<u32>> = (1u32..1 << b)
        .map(|bits| (0..b).filter(|j| bits >> j & 1 == 1).collect())
        .filter(|c: &Vec<u32>| c.len() <= 2)
        .collect();
    let mut fams: Vec<Vec<Node>> = inner.iter().map(|n| vec![n.clone()]).collect();
    for size in 2..=3 {
        let prev: Vec<Vec<Node>> = fams.iter().filter(|f| f.len() == size - 1).cloned().collect();
        for f in prev {
            for n in &inner {
                if f.last().is_some_and(|l| l < n) && f.iter().all(|x| !x.is_comparable(n)) {
                    let mut g = f.clone();
                    g.push(n.clone());
                    fams.push(g);
                }
            }
        }
    }
    for fam in &fams {
        for lang in [Lang::L0, Lang::Ls] {
            // Type by the row lengths of the chosen columns.
            let mut by_shape: HashMap<Vec<usize>, QfType> = HashMap::new();
            let mut pick = vec![0usize; fam.len()];
            loop {
                let cols: Vec<&Vec<u32>> = pick.iter().map(|&i| &col_choices[i]).collect();
                let t: Vec<Node> = fam
                    .iter()
                    .zip(&cols)
                    .flat_map(|(eta, cs)| cs.iter().map(move |&j| eta.child(j)))
                    .collect();
                let key: Vec<usize> = cols.iter().map(|c| c.len()).collect();
                let q = qftp(&t, lang);
                match by_shape.get(&key) {
                    Some(prev) => r.record(*prev == q, || format!("array below {fam:?} in {lang:?}")),
                    None => {
                        by_shape.insert(key, q);
                    }
                }
                let mut i = 0;
                while i < pick.len() {
                    pick[i] += 1;
                    if pick[i] < col_choices.len() {
                        break;
                    }
                    pick[i] = 0;
                    i += 1;
                }
                if i == pick.len() {
                    break;
                }
            }
        }
    }
    r
}

fn found(outcome: &Outcome) -> Option<&Certificate> {
    match outcome {
        Outcome::Found { certificate, .. } => Some(certificate),
        _ => None,
    }
}

/// Searches sop2 at `2x4` on random systems (domain `<= 8`, family `<= 6`)
/// and, since small families rarely admit one, on systems with a planted
/// canonical witness; every found certificate is carried to tp1 at `2x2`
/// and `3x2`.
pub fn comb_suite(rng: &mut dyn RngCore, systems: usize, threads: usize) -> SuiteReport {
    let mut r = SuiteReport::new("comb transport");
    let shape = sh(2, 4);
    let carry = |r: &mut SuiteReport, sys: &SetSystem| -> bool {
        let mut spec = SearchSpec::new(Kind::Sop2, Dims::Tree(shape));
        spec.threads = threads;
        let Ok(res) = search(&spec, sys) else {
            r.record(false, || "search error".into());
            return false;
        };
        let Some(c) = found(&res.outcome) else { return false };
        for target in [sh(2, 2), sh(3, 2)] {
            let ok = comb_transport(c, target).is_ok_and(|t| t.certificate.is_verified());
            r.record(ok, || format!("transport to {target}"));
        }
        true
    };
    let mut random_hits = 0;
    for _ in 0..systems {
        let domain = rng.gen_range(1..=8);
        let family = rng.gen_range(1..=6);
        let sys = random_system(&mut &mut *rng, domain, family, 0.5);
        random_hits += usize::from(carry(&mut r, &sys));
    }
    let canon = canonical_witness(&Kind::Sop2, Dims::Tree(shape), Default::default()).expect("small");
    let base = canon.as_tree().expect("tree").clone();
    let mut planted_hits = 0;
    for _ in 0..systems {
        let t = shuffle_domain(&mut &mut *rng, &base);
        let mut sys = SetSystem::new(t.domain_size);
        let mut sets: Vec<Subset> = t.labels()[1..].to_vec();
        for _ in 0..rng.gen_range(0..=3) {
            sets.push(Subset::from_elems(t.domain_size, (0..t.domain_size).filter(|_| rng.gen_bool(0.5))));
        }
        sets.shuffle(rng);
        for (i, s) in sets.iter().enumerate() {
            sys.add(format!("s{i}"), s.elems()).expect("fresh names");
        }
        planted_hits += usize::from(carry(&mut r, &sys));
    }
    r.notes.insert(0, format!("random systems with a witness: {random_hits}/{systems}; planted: {planted_hits}/{systems}"));
    r
}

fn random_allow_tree(rng: &mut dyn RngCore, shape: TreeShape, max_allow: usize, budget: usize) -> (Vec<usize>, LabeledTree) {
    loop {
        let allow: Vec<usize> = (1..shape.depth)
            .map(|_| rng.gen_range(1..=max_allow.min(shape.branching as usize)))
            .collect();
        if let Some(t) = allowance_tree(shape, &allow, budget) {
            return (allow, shuffle_domain(&mut &mut *rng, &t));
        }
    }
}

/// Round trips of the four tree and array transforms on random verified
/// inputs.
pub fn transform_suites(rng: &mut dyn RngCore, inputs: usize) -> Vec<SuiteReport> {
    let mut a = SuiteReport::new("cdt2_to_sct");
    for _ in 0..inputs {
        let shape = sh(rng.gen_range(1..=3), rng.gen_range(1..=4));
        let extra = rng.gen_range(0..4);
        let t = random_cdt2_tree(&mut &mut *rng, shape, extra);
        let c = Certificate::tree(Kind::CdtN { n: 2 }, t);
        let ok = match cdt2_to_sct(&c) {
            Ok(out) => out.certificate.is_verified() && out.certificate.as_tree().is_some_and(|t| t.is_path_monotone()),
            Err(_) => false,
        };
        a.record(ok, || format!("cdt2_to_sct on {shape}"));
    }

    let mut b = SuiteReport::new("sctk_to_cdt2");
    for i in 0..inputs {
        let m = 1 + i % 3;
        let shape = if m == 3 { sh(2, 10) } else { sh(4, m * m + 1) };
        let (allow, t) = random_allow_tree(rng, shape, 3, 20_000);
        let prod: usize = allow.iter().product();
        let k = prod + rng.gen_range(1..=3);
        let c = Certificate::tree(Kind::SctK { k }, t);
        let ok = match sctk_to_cdt2(&c) {
            Ok((out, trail)) => {
                let t = out.certificate.as_tree().expect("tree");
                out.certificate.kind == Kind::CdtN { n: 2 }
                    && out.certificate.is_verified()
                    && t.shape.depth >= 2
                    && trail.len() <= (usize::BITS - (k - 1).leading_zeros()).max(1) as usize
            }
            Err(_) => false,
        } && sctk_to_cdt2_step(&c, m).is_ok_and(|s| {
            s.certificate.is_verified() && s.certificate.as_tree().is_some_and(|t| t.shape.depth == m + 1)
        });
        b.record(ok, || format!("sctk_to_cdt2 allow {allow:?} k={k} m={m}"));
    }

    let mut c_rep = SuiteReport::new("inp_halving");
    for i in 0..inputs {
        let m = 1 + i % 2;
        let cols = rng.gen_range(2..=6);
        let allow: Vec<usize> = (0..m * m).map(|_| rng.gen_range(1..cols)).collect();
        let Some(arr) = allowance_array(cols, &allow, 200_000) else { continue };
        let k = allow.iter().max().expect("rows") + rng.gen_range(1..=2);
        let arr = shuffle_array(rng, &arr);
        let cert = Certificate::array(Kind::Inp { n: vec![k; m * m] }, arr);
        let ok = match inp_halving(&cert) {
            Ok((out, trail)) => {
                let first = &trail[0];
                let step_bound = if first.case_fired.as_deref() == Some("2") { 2 } else { (k.div_ceil(2)).max(2) };
                out.certificate.is_verified()
                    && matches!(&out.certificate.kind, Kind::Inp { n } if n.iter().all(|&x| x == 2))
                    && step_bound >= 2
            }
            Err(_) => false,
        };
        c_rep.record(ok, || format!("inp_halving allow {allow:?} cols={cols} k={k}"));
    }

    let mut d = SuiteReport::new("cdt_to_sctk_or_inp");
    let (mut sct, mut inp) = (0, 0);
    for i in 0..inputs {
        let m = 1 + i % 2;
        let shape = sh(3, 2 * m + 1);
        let (allow, t) = random_allow_tree(rng, shape, 3, 20_000);
        let k = rng.gen_range(2..=4);
        let c = Certificate::tree(Kind::Cdt { n: allow.iter().map(|x| x + 1).collect() }, t);
        let ok = match cdt_to_sctk_or_inp(&c, k, m) {
            Ok(Dichotomy::Sct(t)) => {
                sct += 1;
                t.certificate.is_verified()
            }
            Ok(Dichotomy::Inp(t)) => {
                inp += 1;
                t.certificate.is_verified()
            }
            Err(_) => false,
        };
        d.record(ok, || format!("dichotomy allow {allow:?} k={k} m={m}"));
    }
    d.notes.insert(0, format!("branches: sct {sct}, inp {inp}"));
    vec![a, b, c_rep, d]
}

fn shuffle_array(rng: &mut dyn RngCore, a: &InpArray) -> InpArray {
    let mut perm: Vec<usize> = (0..a.domain_size).collect();
    perm.shuffle(rng);
    InpArray::from_fn(a.rows, a.cols, a.domain_size, |i, j| {
        Subset::from_elems(a.domain_size, a.cell(i, j).elems().map(|x| perm[x]))
    })
}

/// Finite stage on random path-monotone cdt-patterns of shape `<= 4x4`
/// with a minimal `k`, at every level.
pub fn aleph1_suite(rng: &mut dyn RngCore, inputs: usize) -> SuiteReport {
    let mut r = SuiteReport::new("aleph1_stage");
    let mut done = 0;
    while done < inputs {
        let b = rng.gen_range(2..=4);
        let shape = sh(b, rng.gen_range(2..=4));
        let (allow, t) = random_allow_tree(rng, shape, 3, 50_000);
        let c = Certificate::tree(Kind::Cdt { n: allow.iter().map(|x| x + 1).collect() }, t);
        let mut any = false;
        for n in 0..shape.depth - 1 {
            let exists = (1..).take_while(|&k| 1u32 << k <= b).any(|k| 1usize << k > allow[n]);
            if !exists {
                continue;
            }
            any = true;
            let ok = match aleph1_stage(&c, n) {
                Ok((out, rep)) => out.certificate.is_verified() && rep.all_inconsistent && !rep.pairs.is_empty(),
                Err(_) => false,
            };
            r.record(ok, || format!("aleph1 allow {allow:?} {shape} level {}", n + 1));
        }
        done += usize::from(any);
    }
    r
}

/// Pruned search against the naive enumerator on random instances with
/// assignment space at most `max_space`.
pub fn search_agreement(rng: &mut dyn RngCore, instances: usize, max_space: u128, threads: usize) -> SuiteReport {
    let mut r = SuiteReport::new("search agreement");
    let kinds = [
        Kind::Sct,
        Kind::Sop2,
        Kind::SctK { k: 3 },
        Kind::WeakKTp1 { k: 2 },
        Kind::Tp { k: 2 },
        Kind::CdtN { n: 3 },
        Kind::Sop1,
        Kind::Tp2 { k: 2 },
        Kind::Inp { n: vec![2, 3] },
    ];
    let mut witnesses = 0;
    while r.checked < instances {
        let kind = kinds.choose(rng).expect("nonempty").clone();
        let dims = match &kind {
            Kind::Tp2 { .. } => Dims::Array { rows: rng.gen_range(1..=2), cols: rng.gen_range(1..=3) },
            Kind::Inp { .. } => Dims::Array { rows: 2, cols: rng.gen_range(1..=2) },
            k if k.needs_binary() => Dims::Tree(sh(2, rng.gen_range(1..=3))),
            _ => Dims::Tree(sh(rng.gen_range(1..=3), rng.gen_range(1..=3))),
        };
        let domain = rng.gen_range(1..=5);
        let family = rng.gen_range(1..=4);
        let sys = random_system(&mut &mut *rng, domain, family, 0.5);
        let mut spec = SearchSpec::new(kind.clone(), dims);
        spec.budget.max_space = max_space;
        spec.threads = threads;
        let naive = match naive_search(&spec, &sys) {
            Ok(n) => n.map(|(a, _)| a),
            Err(SearchError::BudgetExceeded { .. }) => continue,
            Err(e) => {
                r.record(false, || format!("naive: {e}"));
                continue;
            }
        };
        let pruned = match search(&spec, &sys).map(|x| x.outcome) {
            Ok(Outcome::Found { assignment, .. }) => Some(assignment),
            Ok(Outcome::NoWitness) => None,
            other => {
                r.record(false, || format!("pruned: {other:?}"));
                continue;
            }
        };
        witnesses += usize::from(naive.is_some());
        r.record(pruned == naive, || format!("{kind} {dims:?}: {pruned:?} vs {naive:?}"));
    }
    r.notes.insert(0, format!("instances with a witness: {witnesses}"));
    r
}

/// Amalgamation, pasting1 and pasting2 on random instances for both
/// built-in oracles.
pub fn pfc_suite(rng: &mut dyn RngCore, instances: usize) -> SuiteReport {
    let mut r = SuiteReport::new("pfc");
    let oracles: [&dyn BaseClassOracle; 2] = [&GraphOracle, &EquivalenceOracle];
    for o in oracles {
        for _ in 0..instances {
            let p = random_problem(rng, o);
            let ok = pfc_amalgamate(o, &p.common, &p.left, &p.right)
                .and_then(|am| check_pfc_amalgam(o, &p.common, &p.left, &p.right, &am).map(|_| am))
                .is_ok_and(|am| am.result.objects.len() <= 6 && am.result.parameters.len() <= 4);
            r.record(ok, || format!("{} amalgam {p:?}", o.name()));

            let (objs, frags) = random_fragments(rng, o);
            let ok = pasting1_build(o, &objs, &frags, "*").is_ok_and(|e| {
                frags.iter().all(|f| {
                    let mut iso: Embedding = objs.iter().map(|x| (x.clone(), x.clone())).collect();
                    iso.insert(f.new_point.clone(), "*".into());
                    e.structure(&f.parameter).is_ok_and(|s| is_embedding(&iso, &f.extended, &s))
                }) && in_class(&e, o).unwrap_or(false)
            });
            r.record(ok, || format!("{} pasting1", o.name()));

            let q = random_pasting2(rng, o);
            let ok = pasting2_build(o, &q.structure, &q.a, &q.b, &q.c, &q.b0, &q.b1).is_ok_and(|out| {
                let s = out.structure.structure(&out.parameter).expect("added");
                let ac: Vec<String> = q.a.iter().chain(&q.c).cloned().collect();
                let bc: Vec<String> = q.b.iter().chain(&q.c).cloned().collect();
                let s0 = q.structure.structure(&q.b0).expect("declared");
                let s1 = q.structure.structure(&q.b1).expect("declared");
                s.restrict(&ac).same_as(&s0.restrict(&ac)) && s.restrict(&bc).same_as(&s1.restrict(&bc))
            });
            r.record(ok, || format!("{} pasting2", o.name()));
        }
    }
    r
}

/// Canonical witnesses verify for sop2, tp1 and sct on every shape with at
/// most `max_nodes` nodes, and tp2 on arrays up to `max_rows x max_cols`;
/// the pasted tp2 array verifies at `3x3`.
pub fn canonical_suite(max_nodes: usize, max_rows: usize, max_cols: usize) -> SuiteReport {
    let mut r = SuiteReport::new("canonical witnesses");
    for b in 1u32.. {
        if 1 + b as usize > max_nodes {
            break;
        }
        for d in 1.. {
            let shape = sh(b, d);
            if shape.node_count() > max_nodes {
                break;
            }
            for kind in [Kind::Sop2, Kind::Tp1, Kind::Sct] {
                if kind.needs_binary() && b != 2 {
                    continue;
                }
                let ok = canonical_witness(&kind, Dims::Tree(shape), Default::default())
                    .is_ok_and(|c| verify(&c).is_ok_and(|v| v.is_verified()));
                r.record(ok, || format!("{kind} at {shape}"));
            }
        }
    }
    for rows in 1..=max_rows {
        for cols in 1..=max_cols {
            let ok = canonical_witness(&Kind::Tp2 { k: 2 }, Dims::Array { rows, cols }, Default::default())
                .is_ok_and(|c| verify(&c).is_ok_and(|v| v.is_verified()));
            r.record(ok, || format!("tp2 at {rows}x{cols}"));
        }
    }
    let ok = tp2_demo(3, 3).is_ok_and(|(_, c)| verify(&c).is_ok_and(|v| v.is_verified()));
    r.record(ok, || "pasted tp2 demo at 3x3".into());
    r
}
