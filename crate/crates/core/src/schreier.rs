//! Finite Schreier graphs, balls in orbit graphs, and tree decompositions.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::contraction::{suffix_sets, treewidth_bound, PostCriticalWord};
use crate::error::{Error, Result};
use crate::graph::LabelledGraph;
use crate::transducer::{Alphabet, GroupElement, Ray, Transducer, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphKind {
    Full,
    Tile,
    Simple,
}

impl std::str::FromStr for GraphKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(GraphKind::Full),
            "tile" => Ok(GraphKind::Tile),
            "simple" => Ok(GraphKind::Simple),
            _ => Err(Error::InvalidInput(format!("unknown graph kind {s}"))),
        }
    }
}

/// Vertex id of a finite word; the empty word is `ε`.
pub fn word_id(a: &Alphabet, w: &[usize]) -> String {
    if w.is_empty() {
        "ε".to_string()
    } else {
        a.render(w)
    }
}

pub fn parse_word_id(a: &Alphabet, s: &str) -> Result<Word> {
    if s == "ε" {
        Ok(Vec::new())
    } else {
        a.parse_compact(s)
    }
}

/// Resolves generator names (`a`, `a^-1`, products); an empty list means the machine's generators.
pub fn resolve_generators(t: &Transducer, gens: &[String]) -> Result<Vec<(String, GroupElement)>> {
    if gens.is_empty() {
        return Ok(t
            .generators()
            .iter()
            .map(|&g| (t.state_name(g).to_string(), GroupElement::state(g)))
            .collect());
    }
    gens.iter()
        .map(|g| Ok((g.clone(), t.parse_element(g)?)))
        .collect()
}

/// Level-`n` Schreier graph on `S^n`; undefined moves of a partial action give no edge.
pub fn build_graph(t: &Transducer, gens: &[String], n: usize, kind: GraphKind) -> Result<LabelledGraph> {
    let gens = resolve_generators(t, gens)?;
    let a = t.alphabet();
    let words = a.words(n);
    let mut trivial: HashMap<GroupElement, bool> = HashMap::new();
    let mut edges = Vec::with_capacity(words.len() * gens.len());
    for w in &words {
        for (name, g) in &gens {
            let (img, r) = match t.act_word(g, w) {
                Ok(x) => x,
                Err(Error::UndefinedTransition { .. }) => continue,
                Err(e) => return Err(e),
            };
            if kind != GraphKind::Full {
                let triv = match trivial.get(&r) {
                    Some(&b) => b,
                    None => {
                        let b = t.is_trivial(&r)?;
                        trivial.insert(r.clone(), b);
                        b
                    }
                };
                if !triv {
                    continue;
                }
            }
            edges.push((word_id(a, w), name.clone(), word_id(a, &img)));
        }
    }
    let g = LabelledGraph::from_named(
        words.iter().map(|w| word_id(a, w)),
        gens.iter().map(|(n, _)| n.clone()),
        &edges,
        None,
    )?;
    Ok(if kind == GraphKind::Simple {
        g.simplify()
    } else {
        g
    })
}

/// Ball of the given radius around `center` in the orbit graph, explored with generators and inverses.
/// Undefined moves of a partial action are skipped.
pub fn ball_around_ray(
    t: &Transducer,
    gens: &[String],
    center: &Ray,
    radius: usize,
) -> Result<LabelledGraph> {
    let gens = resolve_generators(t, gens)?;
    let a = t.alphabet();
    let mut dist: BTreeMap<Ray, usize> = BTreeMap::new();
    let mut queue = VecDeque::new();
    let mut forward: BTreeMap<(Ray, usize), Ray> = BTreeMap::new();
    dist.insert(center.clone(), 0);
    queue.push_back(center.clone());
    while let Some(r) = queue.pop_front() {
        let d = dist[&r];
        for (gi, (_, g)) in gens.iter().enumerate() {
            let mut images = Vec::new();
            match apply(t, g, &r)? {
                Some(img) => {
                    forward.insert((r.clone(), gi), img.clone());
                    images.push(img);
                }
                None => {}
            }
            if d < radius {
                if let Some(img) = apply(t, &g.inverse(), &r)? {
                    images.push(img);
                }
                for img in images {
                    if !dist.contains_key(&img) {
                        dist.insert(img.clone(), d + 1);
                        queue.push_back(img);
                    }
                }
            }
        }
    }
    let mut edges = Vec::new();
    for ((r, gi), img) in &forward {
        if dist.contains_key(img) {
            edges.push((r.render(a), gens[*gi].0.clone(), img.render(a)));
        }
    }
    LabelledGraph::from_named(
        dist.keys().map(|r| r.render(a)),
        gens.iter().map(|(n, _)| n.clone()),
        &edges,
        Some(&center.render(a)),
    )
}

fn apply(t: &Transducer, g: &GroupElement, r: &Ray) -> Result<Option<Ray>> {
    match t.act_ray(g, r) {
        Ok(img) => Ok(Some(img)),
        Err(Error::UndefinedTransition { .. }) | Err(Error::NotInvertible(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Tree with a bag of graph vertices at every tree vertex.
#[derive(Clone, Debug)]
pub struct TreeDecomposition {
    pub tree: LabelledGraph,
    pub bags: BTreeMap<String, BTreeSet<String>>,
}

impl TreeDecomposition {
    pub fn width(&self) -> usize {
        self.bags.values().map(BTreeSet::len).max().unwrap_or(1).saturating_sub(1)
    }

    /// Checks that the tree is a tree and both decomposition axioms against `g`.
    pub fn verify(&self, g: &LabelledGraph) -> std::result::Result<(), String> {
        let nt = self.tree.num_vertices();
        let nbrs = self.tree.neighbours();
        let edge_count: usize = nbrs.iter().map(Vec::len).sum::<usize>() / 2;
        if nt == 0 || edge_count + 1 != nt || !connected(&nbrs, &vec![true; nt]) {
            return Err("decomposition tree is not a tree".into());
        }
        let mut holders: BTreeMap<&str, Vec<bool>> = BTreeMap::new();
        for (node, bag) in &self.bags {
            let i = self
                .tree
                .vertex_index(node)
                .ok_or_else(|| format!("bag at unknown tree vertex {node}"))?;
            for v in bag {
                holders.entry(v.as_str()).or_insert_with(|| vec![false; nt])[i] = true;
            }
        }
        for v in &g.vertices {
            let mask = holders
                .get(v.as_str())
                .ok_or_else(|| format!("vertex {v} lies in no bag"))?;
            if !connected(&nbrs, mask) {
                return Err(format!("bags containing {v} are not connected"));
            }
        }
        for &(t, _, h) in &g.edges {
            let (a, b) = (&g.vertices[t], &g.vertices[h]);
            if !self.bags.values().any(|bag| bag.contains(a) && bag.contains(b)) {
                return Err(format!("edge {a}-{b} lies in no bag"));
            }
        }
        Ok(())
    }
}

fn connected(nbrs: &[Vec<usize>], mask: &[bool]) -> bool {
    let Some(start) = mask.iter().position(|&b| b) else {
        return false;
    };
    let mut seen = vec![false; mask.len()];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &w in &nbrs[v] {
            if mask[w] && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    mask.iter().zip(&seen).all(|(m, s)| !m || *s)
}

/// Decomposition of the level-`n` Schreier graph indexed by suffixes, verified before returning.
pub fn tree_decomposition(
    t: &Transducer,
    post_critical: &BTreeSet<PostCriticalWord>,
    n: usize,
) -> Result<TreeDecomposition> {
    let tw = treewidth_bound(t, post_critical.len())?;
    let (p, q) = (tw.p, tw.q);
    let a = t.alphabet();
    let graph = build_graph(t, &[], n, GraphKind::Full)?;
    let mut bags: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut tree_edges = Vec::new();
    if n < p + q {
        bags.insert(
            "ε".to_string(),
            a.words(n).iter().map(|w| word_id(a, w)).collect(),
        );
    } else {
        let depth = n - p - q;
        let heads = a.words(p);
        let tails = a.words(q);
        for m in 0..=depth {
            let middles = suffix_sets(post_critical, depth - m);
            for eta in a.words(m) {
                let mut bag = BTreeSet::new();
                for u in &heads {
                    for v in &middles {
                        for w in &tails {
                            let mut x = u.clone();
                            x.extend_from_slice(v);
                            x.extend_from_slice(w);
                            x.extend_from_slice(&eta);
                            bag.insert(word_id(a, &x));
                        }
                    }
                }
                if m > 0 {
                    tree_edges.push((word_id(a, &eta), "shift".to_string(), word_id(a, &eta[1..])));
                }
                bags.insert(word_id(a, &eta), bag);
            }
        }
    }
    let tree = LabelledGraph::from_named(bags.keys().cloned(), std::iter::empty(), &tree_edges, Some("ε"))?;
    let td = TreeDecomposition { tree, bags };
    td.verify(&graph).map_err(Error::Internal)?;
    Ok(td)
}
