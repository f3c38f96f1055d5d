//! Depth-first search over slots in order, trying family members in order,
//! rejecting a value as soon as it completes a violating family.
//!
//! Every check only looks at constraints whose largest slot is the one just
//! assigned, so a full assignment that survives is a witness and no
//! satisfying completion is ever cut.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use super::{Control, Problem, Run};
use crate::patterns::{Dims, Kind, Subset};

enum Rule {
    /// Sibling families of child level `l` are `bound[l]`-inconsistent.
    Sibling(Vec<usize>),
    Antichain(usize),
    Distant(usize),
    Sop1,
    /// Row bounds; transversals consistent.
    Array(Vec<usize>),
}

struct Ctx<'a> {
    p: &'a Problem,
    rule: Rule,
    b: usize,
    depth: usize,
    cols: usize,
    /// Level of each tree slot's node, indexed by canonical index.
    level: Vec<usize>,
}

struct State {
    assign: Vec<usize>,
    /// Path intersections by canonical index (trees) or, for arrays, the
    /// intersections of all transversals through the completed rows.
    path: Vec<Subset>,
    trans: Vec<Vec<Subset>>,
    scratch: Vec<usize>,
}

impl<'a> Ctx<'a> {
    fn new(p: &'a Problem) -> Self {
        let (b, depth, cols, level) = match p.dims {
            Dims::Tree(shape) => (
                shape.branching as usize,
                shape.depth,
                0,
                shape.nodes().iter().map(|n| n.level()).collect(),
            ),
            Dims::Array { cols, .. } => (0, 0, cols, Vec::new()),
        };
        let rule = match &p.kind {
            Kind::Tp { k } | Kind::CdtN { n: k } => Rule::Sibling(vec![*k; depth.max(1)]),
            Kind::Cdt { n } => Rule::Sibling(std::iter::once(0).chain(n.iter().copied()).collect()),
            Kind::Tp1 | Kind::Sct | Kind::Sop2 => Rule::Antichain(2),
            Kind::KTp1 { k } | Kind::SctK { k } => Rule::Antichain(*k),
            Kind::WeakKTp1 { k } => Rule::Distant(*k),
            Kind::Sop1 => Rule::Sop1,
            Kind::Tp2 { k } => match p.dims {
                Dims::Array { rows, .. } => Rule::Array(vec![*k; rows]),
                Dims::Tree(_) => unreachable!("validated"),
            },
            Kind::Inp { n } => Rule::Array(n.clone()),
        };
        Ctx {
            p,
            rule,
            b,
            depth,
            cols,
            level,
        }
    }

    fn set(&self, v: usize) -> &Subset {
        &self.p.family[v]
    }

    fn state(&self) -> State {
        let n = self.level.len();
        let rows = match self.p.dims {
            Dims::Array { rows, .. } => rows,
            Dims::Tree(_) => 0,
        };
        let mut trans = vec![Vec::new(); rows + 1];
        trans[0] = vec![Subset::full(self.p.domain)];
        State {
            assign: vec![0; self.p.slots],
            path: vec![Subset::full(self.p.domain); n.max(1)],
            trans,
            scratch: vec![0; n.max(1)],
        }
    }

    fn comparable(&self, i: usize, mut j: usize) -> bool {
        while j > i {
            j = (j - 1) / self.b;
        }
        i == j
    }

    fn label(&self, st: &State, i: usize) -> &Subset {
        self.set(st.assign[i - 1])
    }

    /// Accepts value `v` at `slot` given slots before it.
    fn accept(&self, st: &mut State, slot: usize, v: usize) -> bool {
        st.assign[slot] = v;
        match &self.rule {
            Rule::Array(bounds) => self.accept_cell(st, slot, bounds),
            _ => self.accept_node(st, slot + 1),
        }
    }

    fn accept_node(&self, st: &mut State, i: usize) -> bool {
        let lab = self.label(st, i);
        let parent = (i - 1) / self.b;
        let path = st.path[parent].intersection(lab);
        if path.is_empty() && self.depth >= 2 {
            return false;
        }
        st.path[i] = path;
        match &self.rule {
            Rule::Sibling(bound) => {
                let k = bound[self.level[i]];
                let first = parent * self.b + 1;
                lab.elems().all(|x| {
                    1 + (first..i).filter(|&j| self.label(st, j).contains(x)).count() < k
                })
            }
            Rule::Antichain(2) | Rule::Distant(2) => (1..i)
                .all(|j| self.comparable(j, i) || self.label(st, j).is_disjoint(lab)),
            Rule::Antichain(k) => {
                let k = *k;
                let xs = lab.to_vec();
                xs.into_iter().all(|x| self.max_antichain(st, i, x) < k)
            }
            Rule::Distant(k) => {
                let k = *k;
                let xs = lab.to_vec();
                xs.into_iter().all(|x| !self.distant_reaches(st, i, x, k))
            }
            Rule::Sop1 => {
                let node_last = (i - 1) % self.b;
                // i = η⌢1 against η⌢0; deeper nodes above η⌢0 come later.
                if node_last == 1 && !self.label(st, i).is_disjoint(self.label(st, i - 1)) {
                    return false;
                }
                // i above some η⌢0 whose sibling η⌢1 is already placed.
                let mut c = i;
                while c > 0 {
                    let p = (c - 1) / self.b;
                    if (c - 1) % self.b == 0 {
                        let one = c + 1;
                        if one < i && !self.label(st, one).is_disjoint(self.label(st, i)) {
                            return false;
                        }
                    }
                    c = p;
                }
                true
            }
            Rule::Array(_) => unreachable!(),
        }
    }

    /// Largest antichain among placed nodes `1..=i` whose labels hold `x`.
    fn max_antichain(&self, st: &mut State, i: usize, x: usize) -> usize {
        let a = &mut st.scratch;
        for j in (1..=i).rev() {
            let first = j * self.b + 1;
            let s: usize = (first..(first + self.b).min(i + 1)).map(|c| a[c]).sum();
            let own = usize::from(self.set(st.assign[j - 1]).contains(x));
            a[j] = own.max(s);
        }
        (1..(1 + self.b).min(i + 1)).map(|c| a[c]).sum()
    }

    /// Whether placed nodes `1..=i` holding `x` meet `k` child subtrees of
    /// one node.
    fn distant_reaches(&self, st: &mut State, i: usize, x: usize, k: usize) -> bool {
        let s = &mut st.scratch;
        for j in (0..=i).rev() {
            let first = j * self.b + 1;
            let hit = (first..(first + self.b).min(i + 1)).filter(|&c| s[c] == 1).count();
            if hit >= k {
                return true;
            }
            let own = j > 0 && self.set(st.assign[j - 1]).contains(x);
            s[j] = usize::from(own || hit > 0);
        }
        false
    }

    fn accept_cell(&self, st: &mut State, slot: usize, bounds: &[usize]) -> bool {
        let (r, j) = (slot / self.cols, slot % self.cols);
        if j == 0 && r > 0 {
            let prev: Vec<Subset> = st.trans[r - 1]
                .iter()
                .flat_map(|t| (0..self.cols).map(move |c| (t, c)))
                .map(|(t, c)| t.intersection(self.set(st.assign[(r - 1) * self.cols + c])))
                .collect();
            st.trans[r] = prev;
        }
        let cell = self.set(st.assign[slot]);
        let row0 = r * self.cols;
        let k = bounds[r];
        let row_ok = cell
            .elems()
            .all(|x| 1 + (row0..slot).filter(|&s| self.set(st.assign[s]).contains(x)).count() < k);
        row_ok && st.trans[r].iter().all(|t| !t.is_disjoint(cell))
    }

    /// Least completion of slots `slot..` or `None`; `Err` when aborted.
    fn dfs(&self, st: &mut State, slot: usize, ctl: &Control) -> Result<bool, ()> {
        if slot == self.p.slots {
            return Ok(true);
        }
        for v in 0..self.p.family.len() {
            if !ctl.tick() {
                return Err(());
            }
            if self.accept(st, slot, v) && self.dfs(st, slot + 1, ctl)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Partitions by the value of slot 0 across `threads` workers; the least
/// witness is the one with the least first value.
pub(crate) fn run(p: &Problem, ctl: &Control, threads: usize) -> Run {
    let ctx = Ctx::new(p);
    if p.slots == 0 {
        let ok = crate::patterns::check(&p.kind, &p.payload_from(&[]), 0).is_ok_and(|v| v.ok);
        return if ok { Run::Found(Vec::new()) } else { Run::None };
    }
    let f = p.family.len();
    // Per first value: Some(Some(a)) found, Some(None) exhausted.
    let results: Mutex<Vec<Option<Option<Vec<usize>>>>> = Mutex::new(vec![None; f]);
    let best = AtomicUsize::new(usize::MAX);
    let work = |w: usize| {
        let mut st = ctx.state();
        let mut v = w;
        while v < f && v < best.load(Ordering::Relaxed) {
            if !ctl.tick() {
                return;
            }
            let r = if ctx.accept(&mut st, 0, v) {
                match ctx.dfs(&mut st, 1, ctl) {
                    Ok(true) => Some(st.assign.clone()),
                    Ok(false) => None,
                    Err(()) => return,
                }
            } else {
                None
            };
            if r.is_some() {
                best.fetch_min(v, Ordering::Relaxed);
            }
            results.lock().expect("no poisoning")[v] = Some(r);
            v += threads;
        }
    };
    if threads <= 1 {
        work(0);
    } else {
        std::thread::scope(|s| {
            for w in 0..threads.min(f) {
                let work = &work;
                s.spawn(move || work(w));
            }
        });
    }
    for r in results.into_inner().expect("no poisoning") {
        match r {
            Some(Some(a)) => return Run::Found(a),
            Some(None) => continue,
            None => return Run::Aborted,
        }
    }
    Run::None
}
