//! Nucleus, activity, post-critical words, ancestor structures and treewidth bounds.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::error::{Error, Result};
use crate::transducer::{
    key_from_table, Alphabet, ElementKey, GroupElement, Letter, State, Transducer, Word,
    DEFAULT_BISIM_CAP,
};

/// Product seeds handed to one section-graph exploration.
const SEED_CHUNK: usize = 512;

/// Minimal restriction-closed set of elements, as its own transducer.
///
/// State `i` of [`Nucleus::machine`] is the class of `representatives()[i]`
/// (a word over the source machine). State 0 is the identity, named `1`.
#[derive(Clone, Debug)]
pub struct Nucleus {
    machine: Transducer,
    reps: Vec<GroupElement>,
    keys: Vec<ElementKey>,
}

impl Nucleus {
    pub fn machine(&self) -> &Transducer {
        &self.machine
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn representatives(&self) -> &[GroupElement] {
        &self.reps
    }

    pub fn names(&self) -> Vec<String> {
        self.machine.states().iter().map(|s| s.name.clone()).collect()
    }

    /// Index of the class of `g` (a word over the source machine), if it lies in the nucleus.
    pub fn find(&self, source: &Transducer, g: &GroupElement) -> Result<Option<usize>> {
        let k = source.canonical_key(g)?;
        Ok(self.keys.iter().position(|x| *x == k))
    }
}

struct ClassInfo {
    rep: GroupElement,
    row: Vec<(Letter, usize)>,
}

struct Closure<'a> {
    t: &'a Transducer,
    classes: Vec<ClassInfo>,
    keys: Vec<ElementKey>,
    index: HashMap<ElementKey, usize>,
}

impl<'a> Closure<'a> {
    /// Explores `seeds` and returns the classes of the cyclic core of their section graph.
    fn core_of(&mut self, seeds: &[GroupElement]) -> Result<Vec<usize>> {
        let sg = self.t.section_graph(seeds, DEFAULT_BISIM_CAP)?;
        let table = sg.block_table();
        let nb = table.len();
        let mut class_of = vec![usize::MAX; nb];
        for b in 0..nb {
            let key = key_from_table(&table, b);
            let id = match self.index.get(&key) {
                Some(&id) => id,
                None => {
                    let id = self.classes.len();
                    self.index.insert(key.clone(), id);
                    self.keys.push(key);
                    self.classes.push(ClassInfo {
                        rep: GroupElement::identity(),
                        row: Vec::new(),
                    });
                    id
                }
            };
            class_of[b] = id;
        }
        let mut best: HashMap<usize, &GroupElement> = HashMap::new();
        for (i, c) in sg.configs.iter().enumerate() {
            let b = sg.block[i];
            match best.get(&b) {
                Some(prev) if prev.rep_key() <= c.rep_key() => {}
                _ => {
                    best.insert(b, c);
                }
            }
        }
        for b in 0..nb {
            let id = class_of[b];
            let rep = best[&b];
            let info = &mut self.classes[id];
            if info.row.is_empty() {
                info.rep = rep.clone();
                info.row = table[b]
                    .iter()
                    .map(|t| {
                        let (o, j) = t.expect("total machine");
                        (o, class_of[j])
                    })
                    .collect();
            } else if rep.rep_key() < info.rep.rep_key() {
                info.rep = rep.clone();
            }
        }
        let edges: Vec<Vec<usize>> = table
            .iter()
            .map(|row| row.iter().flatten().map(|&(_, j)| j).collect())
            .collect();
        Ok(cyclic_core(&edges).into_iter().map(|b| class_of[b]).collect())
    }
}

/// Vertices lying on a cycle or reachable from one.
fn cyclic_core(edges: &[Vec<usize>]) -> Vec<usize> {
    let n = edges.len();
    let mut g: DiGraph<(), ()> = DiGraph::new();
    let nodes: Vec<NodeIndex> = (0..n).map(|_| g.add_node(())).collect();
    for (i, row) in edges.iter().enumerate() {
        for &j in row {
            g.add_edge(nodes[i], nodes[j], ());
        }
    }
    let mut on_cycle = vec![false; n];
    for scc in tarjan_scc(&g) {
        let cyclic = scc.len() > 1 || {
            let v = scc[0].index();
            edges[v].contains(&v)
        };
        if cyclic {
            for v in scc {
                on_cycle[v.index()] = true;
            }
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| on_cycle[v]).collect();
    let mut seen = on_cycle;
    while let Some(v) = stack.pop() {
        for &j in &edges[v] {
            if !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    (0..n).filter(|&v| seen[v]).collect()
}

/// Computes the nucleus; `max_iter` caps both the number of rounds and of classes.
pub fn nucleus(t: &Transducer, max_iter: usize) -> Result<Nucleus> {
    if !t.is_total() {
        return Err(Error::InvalidInput("nucleus needs a total machine".into()));
    }
    let mut x = vec![GroupElement::identity()];
    for &g in t.generators() {
        if g == t.identity_state() {
            continue;
        }
        if !t.states()[g].invertible {
            return Err(Error::NotInvertible(t.state_name(g).to_string()));
        }
        x.push(GroupElement::state(g));
        x.push(GroupElement::inverse_state(g));
    }
    let mut cl = Closure {
        t,
        classes: Vec::new(),
        keys: Vec::new(),
        index: HashMap::new(),
    };
    let mut members: Vec<usize> = Vec::new();
    let mut member_set: HashSet<usize> = HashSet::new();
    for c in cl.core_of(&x)? {
        if member_set.insert(c) {
            members.push(c);
        }
    }
    let mut old = 0usize;
    let mut round = 0usize;
    loop {
        round += 1;
        if round > max_iter {
            return Err(Error::NotContractingUpToBound(max_iter));
        }
        let cur = members.len();
        let mut seeds = Vec::new();
        let mut grew = false;
        for i in 0..cur {
            for j in 0..cur {
                if i < old && j < old {
                    continue;
                }
                let a = &cl.classes[members[i]].rep;
                let b = &cl.classes[members[j]].rep;
                seeds.push(a.mul(b));
                if seeds.len() >= SEED_CHUNK {
                    grew |= absorb(&mut cl, &seeds, &mut members, &mut member_set, max_iter)?;
                    seeds.clear();
                }
            }
        }
        if !seeds.is_empty() {
            grew |= absorb(&mut cl, &seeds, &mut members, &mut member_set, max_iter)?;
        }
        if !grew {
            break;
        }
        old = cur;
    }
    build_nucleus(t, &cl, &members)
}

fn absorb(
    cl: &mut Closure<'_>,
    seeds: &[GroupElement],
    members: &mut Vec<usize>,
    member_set: &mut HashSet<usize>,
    max_iter: usize,
) -> Result<bool> {
    let mut grew = false;
    for c in cl.core_of(seeds)? {
        if member_set.insert(c) {
            members.push(c);
            grew = true;
            if members.len() > max_iter {
                return Err(Error::NotContractingUpToBound(max_iter));
            }
        }
    }
    Ok(grew)
}

fn build_nucleus(t: &Transducer, cl: &Closure<'_>, members: &[usize]) -> Result<Nucleus> {
    let mut order: Vec<usize> = members.to_vec();
    order.sort_by_key(|&c| cl.classes[c].rep.rep_key());
    let pos: HashMap<usize, usize> = order.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let alphabet = t.alphabet().clone();
    let mut states = Vec::with_capacity(order.len());
    for &c in &order {
        let info = &cl.classes[c];
        let name = if info.rep.is_empty() {
            "1".to_string()
        } else {
            t.render_element(&info.rep)
        };
        let transitions = info
            .row
            .iter()
            .map(|&(o, j)| pos.get(&j).map(|&p| (o, p)))
            .collect::<Vec<_>>();
        if transitions.iter().any(Option::is_none) {
            return Err(Error::Internal("nucleus is not closed under restriction".into()));
        }
        states.push(State {
            name,
            invertible: true,
            transitions,
        });
    }
    let gens: Vec<String> = states.iter().skip(1).map(|s| s.name.clone()).collect();
    let machine = Transducer::new(alphabet, states, "1", &gens)?;
    Ok(Nucleus {
        machine,
        reps: order.iter().map(|&c| cl.classes[c].rep.clone()).collect(),
        keys: order.iter().map(|&c| cl.keys[c].clone()).collect(),
    })
}

/// Boundedness verdict with the activity degree (`None` for non-polynomial activity).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Activity {
    pub bounded: bool,
    pub degree: Option<usize>,
}

struct CycleData {
    /// Non-trivial states reachable from the generators.
    nodes: Vec<usize>,
    on_cycle: HashSet<usize>,
    /// Successors among `nodes`, one entry per letter.
    succ: HashMap<usize, Vec<usize>>,
    activity: Activity,
}

fn cycle_data(t: &Transducer, roots: &[usize]) -> Result<CycleData> {
    let mut trivial = vec![false; t.num_states()];
    for (s, tr) in trivial.iter_mut().enumerate() {
        *tr = s == t.identity_state() || t.is_trivial(&GroupElement::state(s))?;
    }
    let mut nodes = Vec::new();
    let mut seen = HashSet::new();
    let mut stack: Vec<usize> = roots.iter().copied().filter(|&r| !trivial[r]).collect();
    for &r in &stack {
        seen.insert(r);
    }
    while let Some(s) = stack.pop() {
        nodes.push(s);
        for &(_, n) in t.states()[s].transitions.iter().flatten() {
            if !trivial[n] && seen.insert(n) {
                stack.push(n);
            }
        }
    }
    nodes.sort_unstable();
    let mut g: DiGraph<usize, ()> = DiGraph::new();
    let idx: HashMap<usize, NodeIndex> = nodes.iter().map(|&s| (s, g.add_node(s))).collect();
    let mut succ: HashMap<usize, Vec<usize>> = HashMap::new();
    for &s in &nodes {
        let row: Vec<usize> = t.states()[s]
            .transitions
            .iter()
            .flatten()
            .map(|&(_, n)| n)
            .filter(|n| !trivial[*n])
            .collect();
        for &n in &row {
            g.add_edge(idx[&s], idx[&n], ());
        }
        succ.insert(s, row);
    }
    let sccs = tarjan_scc(&g);
    let mut comp = HashMap::new();
    for (ci, scc) in sccs.iter().enumerate() {
        for v in scc {
            comp.insert(g[*v], ci);
        }
    }
    let mut on_cycle = HashSet::new();
    let mut simple = true;
    let mut cyclic = vec![false; sccs.len()];
    for (ci, scc) in sccs.iter().enumerate() {
        let members: Vec<usize> = scc.iter().map(|v| g[*v]).collect();
        let inner = |s: usize| succ[&s].iter().filter(|n| comp[*n] == ci).count();
        let is_cyclic = members.len() > 1 || inner(members[0]) > 0;
        if is_cyclic {
            cyclic[ci] = true;
            for &s in &members {
                on_cycle.insert(s);
                if inner(s) != 1 {
                    simple = false;
                }
            }
        }
    }
    // tarjan_scc yields components in reverse topological order.
    let mut chain = vec![0usize; sccs.len()];
    for (ci, scc) in sccs.iter().enumerate() {
        let mut best = 0;
        for v in scc {
            for n in &succ[&g[*v]] {
                let cj = comp[n];
                if cj != ci {
                    best = best.max(chain[cj]);
                }
            }
        }
        chain[ci] = best + usize::from(cyclic[ci]);
    }
    let longest = chain.iter().copied().max().unwrap_or(0);
    let degree = if simple {
        Some(longest.saturating_sub(1))
    } else {
        None
    };
    Ok(CycleData {
        nodes,
        on_cycle,
        succ,
        activity: Activity {
            bounded: degree == Some(0),
            degree,
        },
    })
}

/// Activity of the machine restricted to states reachable from its generators.
pub fn activity(t: &Transducer) -> Result<Activity> {
    Ok(cycle_data(t, t.generators())?.activity)
}

pub fn is_bounded(n: &Nucleus) -> Result<Activity> {
    let all: Vec<usize> = (0..n.machine.num_states()).collect();
    Ok(cycle_data(&n.machine, &all)?.activity)
}

/// Left-infinite word `^∞period · suffix`, kept canonical.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PostCriticalWord {
    period: Word,
    suffix: Word,
}

impl PostCriticalWord {
    pub fn new(period: Word, suffix: Word) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidInput("empty period".into()));
        }
        let mut period = primitive(&period);
        let mut suffix = suffix;
        while !suffix.is_empty() && suffix[0] == period[0] {
            period.rotate_left(1);
            suffix.remove(0);
        }
        Ok(PostCriticalWord { period, suffix })
    }

    pub fn period(&self) -> &[Letter] {
        &self.period
    }

    pub fn suffix(&self) -> &[Letter] {
        &self.suffix
    }

    /// Letter at distance `i` from the right end (0 is the last letter).
    pub fn letter_from_end(&self, i: usize) -> Letter {
        let m = self.suffix.len();
        if i < m {
            self.suffix[m - 1 - i]
        } else {
            let p = self.period.len();
            self.period[p - 1 - (i - m) % p]
        }
    }

    /// The last `k` letters.
    pub fn tail(&self, k: usize) -> Word {
        (0..k).rev().map(|i| self.letter_from_end(i)).collect()
    }

    pub fn push(&self, s: Letter) -> PostCriticalWord {
        let mut suffix = self.suffix.clone();
        suffix.push(s);
        PostCriticalWord::new(self.period.clone(), suffix).expect("non-empty period")
    }

    /// Splits off the last letter.
    pub fn pop(&self) -> (PostCriticalWord, Letter) {
        let mut period = self.period.clone();
        let mut suffix = self.suffix.clone();
        let last = match suffix.pop() {
            Some(l) => l,
            None => {
                let l = *period.last().unwrap();
                period.rotate_right(1);
                l
            }
        };
        (
            PostCriticalWord::new(period, suffix).expect("non-empty period"),
            last,
        )
    }

    pub fn render(&self, a: &Alphabet) -> String {
        let mut s = format!("^inf {}", a.render(&self.period));
        if !self.suffix.is_empty() {
            s.push(' ');
            s.push_str(&a.render(&self.suffix));
        }
        s
    }

    pub fn parse(a: &Alphabet, text: &str) -> Result<Self> {
        let rest = text
            .trim()
            .strip_prefix("^inf")
            .ok_or_else(|| Error::InvalidInput(format!("bad post-critical word {text}")))?;
        let mut parts = rest.split_whitespace();
        let period = a.parse_compact(parts.next().unwrap_or(""))?;
        let suffix = a.parse_compact(parts.next().unwrap_or(""))?;
        PostCriticalWord::new(period, suffix)
    }
}

fn primitive(w: &[Letter]) -> Word {
    let n = w.len();
    (1..=n)
        .find(|&d| n % d == 0 && (0..n).all(|i| w[i] == w[i % d]))
        .map_or_else(|| w.to_vec(), |d| w[..d].to_vec())
}

/// Left-infinite nucleus path ending at `end`, with its input and output labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathRecord {
    pub input: PostCriticalWord,
    pub output: PostCriticalWord,
    pub end: usize,
}

/// Every left-infinite path of the nucleus ending at a non-identity state.
pub fn post_critical_paths(n: &Nucleus) -> Result<Vec<PathRecord>> {
    let all: Vec<usize> = (0..n.machine.num_states()).collect();
    let cd = cycle_data(&n.machine, &all)?;
    if !cd.activity.bounded {
        return Err(Error::NotBounded);
    }
    let t = &n.machine;
    let mut out = Vec::new();
    for &c in &cd.nodes {
        if !cd.on_cycle.contains(&c) {
            continue;
        }
        let mut pin = Vec::new();
        let mut pout = Vec::new();
        let mut s = c;
        loop {
            let (l, o, nx) = t.states()[s]
                .transitions
                .iter()
                .enumerate()
                .find_map(|(l, tr)| {
                    tr.and_then(|(o, nx)| cd.on_cycle.contains(&nx).then_some((l, o, nx)))
                })
                .expect("cycle state has a cycle edge");
            pin.push(l);
            pout.push(o);
            s = nx;
            if s == c {
                break;
            }
        }
        let mut stack = vec![(c, Vec::new(), Vec::new())];
        while let Some((s, si, so)) = stack.pop() {
            out.push(PathRecord {
                input: PostCriticalWord::new(pin.clone(), si.clone())?,
                output: PostCriticalWord::new(pout.clone(), so.clone())?,
                end: s,
            });
            for (l, tr) in t.states()[s].transitions.iter().enumerate() {
                if let Some((o, nx)) = *tr {
                    if cd.succ.contains_key(&nx) && !cd.on_cycle.contains(&nx) {
                        let mut a = si.clone();
                        a.push(l);
                        let mut b = so.clone();
                        b.push(o);
                        stack.push((nx, a, b));
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn post_critical_set(n: &Nucleus) -> Result<BTreeSet<PostCriticalWord>> {
    Ok(post_critical_paths(n)?.into_iter().map(|r| r.input).collect())
}

/// Length-`k` suffixes of the post-critical words.
pub fn suffix_sets(p: &BTreeSet<PostCriticalWord>, k: usize) -> BTreeSet<Word> {
    p.iter().map(|w| w.tail(k)).collect()
}

/// Finite model `(V, U, {G_s})` with `U` the post-critical set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AncestorStructure {
    pub u: Vec<PostCriticalWord>,
    /// Classes of `P·S`, each listed by its sorted member words.
    pub v: Vec<Vec<PostCriticalWord>>,
    pub embed: Vec<usize>,
    /// `maps[s][i]` is the class of `u[i]·s`.
    pub maps: Vec<Vec<usize>>,
}

impl AncestorStructure {
    /// Checks that `V` is the union of the `G_s(U)` and that each `G_s(U)` leaves `embed(U)`.
    pub fn axioms_hold(&self) -> bool {
        let covered: BTreeSet<usize> = self.maps.iter().flatten().copied().collect();
        if covered.len() != self.v.len() {
            return false;
        }
        if self.u.is_empty() {
            return true;
        }
        let image: BTreeSet<usize> = self.embed.iter().copied().collect();
        self.maps
            .iter()
            .all(|m| m.iter().any(|c| !image.contains(c)))
    }
}

fn uf_find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let nx = parent[y];
        parent[y] = r;
        y = nx;
    }
    r
}

pub fn ancestor_structure(n: &Nucleus) -> Result<AncestorStructure> {
    let records = post_critical_paths(n)?;
    let t = &n.machine;
    let k = t.alphabet().len();
    let u: Vec<PostCriticalWord> = records
        .iter()
        .map(|r| r.input.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut ids: BTreeMap<PostCriticalWord, usize> = BTreeMap::new();
    let id_of = |w: PostCriticalWord, ids: &mut BTreeMap<PostCriticalWord, usize>| {
        let len = ids.len();
        *ids.entry(w).or_insert(len)
    };
    for p in &u {
        for s in 0..k {
            id_of(p.push(s), &mut ids);
        }
    }
    let mut unions = Vec::new();
    for r in &records {
        for s in 0..k {
            let (o, nx) = t.transition(r.end, s).expect("total nucleus");
            if nx == t.identity_state() {
                let a = id_of(r.input.push(s), &mut ids);
                let b = id_of(r.output.push(o), &mut ids);
                unions.push((a, b));
            }
        }
    }
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    for (a, b) in unions {
        let ra = uf_find(&mut parent, a);
        let rb = uf_find(&mut parent, b);
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut members: BTreeMap<usize, BTreeSet<PostCriticalWord>> = BTreeMap::new();
    for p in &u {
        for s in 0..k {
            let w = p.push(s);
            let r = uf_find(&mut parent, ids[&w]);
            members.entry(r).or_default().insert(w);
        }
    }
    let mut v: Vec<Vec<PostCriticalWord>> = members
        .into_values()
        .map(|s| s.into_iter().collect())
        .collect();
    v.sort();
    let class_of = |w: &PostCriticalWord| v.iter().position(|c| c.contains(w));
    let mut maps = vec![Vec::with_capacity(u.len()); k];
    for (s, m) in maps.iter_mut().enumerate() {
        for p in &u {
            m.push(class_of(&p.push(s)).expect("member of P·S"));
        }
    }
    let mut embed = Vec::with_capacity(u.len());
    for p in &u {
        let (head, last) = p.pop();
        let c = class_of(&head.push(last))
            .ok_or_else(|| Error::Internal(format!("{p:?} has no ancestor class")))?;
        embed.push(c);
    }
    Ok(AncestorStructure { u, v, embed, maps })
}

/// Parameters of the tree-decomposition bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreewidthBound {
    pub p: usize,
    pub q: usize,
    pub bound: usize,
}

/// `p`: longest generator-to-cycle path; `q`: longest cycle-to-identity path.
pub fn treewidth_bound(t: &Transducer, post_critical: usize) -> Result<TreewidthBound> {
    let cd = cycle_data(t, t.generators())?;
    if !cd.activity.bounded {
        return Err(Error::NotBounded);
    }
    fn to_cycle(cd: &CycleData, s: usize, memo: &mut HashMap<usize, Option<usize>>) -> Option<usize> {
        if cd.on_cycle.contains(&s) {
            return Some(0);
        }
        if let Some(&m) = memo.get(&s) {
            return m;
        }
        let best = cd.succ[&s]
            .iter()
            .filter_map(|&n| to_cycle(cd, n, memo).map(|d| d + 1))
            .max();
        memo.insert(s, best);
        best
    }
    fn to_identity(t: &Transducer, cd: &CycleData, s: usize, memo: &mut HashMap<usize, usize>) -> usize {
        if let Some(&m) = memo.get(&s) {
            return m;
        }
        let mut best = 0;
        for &(_, n) in t.states()[s].transitions.iter().flatten() {
            if !cd.succ.contains_key(&n) {
                best = best.max(1);
            } else if !cd.on_cycle.contains(&n) {
                best = best.max(1 + to_identity(t, cd, n, memo));
            }
        }
        memo.insert(s, best);
        best
    }
    let mut memo = HashMap::new();
    let p = t
        .generators()
        .iter()
        .filter(|g| cd.succ.contains_key(g))
        .filter_map(|&g| to_cycle(&cd, g, &mut memo))
        .max()
        .unwrap_or(0);
    let mut memo = HashMap::new();
    let q = cd
        .on_cycle
        .iter()
        .map(|&c| to_identity(t, &cd, c, &mut memo))
        .max()
        .unwrap_or(0);
    let k = t.alphabet().len();
    let bound = post_critical
        .checked_mul(k.checked_pow((p + q) as u32).unwrap_or(usize::MAX))
        .unwrap_or(usize::MAX);
    Ok(TreewidthBound { p, q, bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn odometer() -> Transducer {
        Transducer::from_table(
            &["0", "1"],
            "e",
            &[
                ("t", true, &[("0", "1", "e"), ("1", "0", "t")]),
                ("e", true, &[("0", "0", "e"), ("1", "1", "e")]),
            ],
            &["t"],
        )
        .unwrap()
    }

    #[test]
    fn odometer_nucleus_rows() {
        let t = odometer();
        let n = nucleus(&t, 100).unwrap();
        assert_eq!(n.names(), vec!["1", "t", "t^-1"]);
        let m = n.machine();
        assert_eq!(m.transition(1, 1), Some((0, 1)));
        assert_eq!(m.transition(1, 0), Some((1, 0)));
        assert_eq!(m.transition(2, 0), Some((1, 2)));
        assert_eq!(m.transition(2, 1), Some((0, 0)));
    }

    #[test]
    fn pcw_canonical() {
        let w = PostCriticalWord::new(vec![0, 1], vec![0]).unwrap();
        assert_eq!(w, PostCriticalWord::new(vec![1, 0], vec![]).unwrap());
        let (h, l) = w.pop();
        assert_eq!(l, 0);
        assert_eq!(h.push(l), w);
        assert_eq!(w.tail(3), vec![0, 1, 0]);
    }

    #[test]
    fn odometer_structure() {
        let n = nucleus(&odometer(), 100).unwrap();
        let a = ancestor_structure(&n).unwrap();
        assert_eq!(a.u.len(), 2);
        assert_eq!(a.v.len(), 3);
        assert!(a.axioms_hold());
    }

    #[test]
    fn odometer_bound() {
        let b = treewidth_bound(&odometer(), 2).unwrap();
        assert_eq!((b.p, b.q, b.bound), (0, 1, 4));
    }
}
