//! Edge-labelled directed graphs with byte-stable JSON and DOT export.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use petgraph::graph::UnGraph;
use serde_json::{json, Value};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelledGraph {
    /// Sorted vertex ids.
    pub vertices: Vec<String>,
    /// Sorted label names.
    pub labels: Vec<String>,
    /// `(tail, label, head)` as indices, sorted.
    pub edges: Vec<(usize, usize, usize)>,
    pub root: Option<usize>,
    /// Export hint: edges are undirected.
    pub undirected: bool,
}

impl LabelledGraph {
    /// Builds a graph from named parts; edges are deduplicated.
    pub fn from_named<V, L>(
        vertices: V,
        labels: L,
        edges: &[(String, String, String)],
        root: Option<&str>,
    ) -> Result<Self>
    where
        V: IntoIterator<Item = String>,
        L: IntoIterator<Item = String>,
    {
        let vset: BTreeSet<String> = vertices.into_iter().collect();
        let mut lset: BTreeSet<String> = labels.into_iter().collect();
        for (_, l, _) in edges {
            lset.insert(l.clone());
        }
        let vertices: Vec<String> = vset.into_iter().collect();
        let labels: Vec<String> = lset.into_iter().collect();
        let vidx: BTreeMap<&str, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        let lidx: BTreeMap<&str, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        let find = |v: &str| {
            vidx.get(v)
                .copied()
                .ok_or_else(|| Error::InvalidInput(format!("edge endpoint {v} is not a vertex")))
        };
        let mut es = BTreeSet::new();
        for (t, l, h) in edges {
            es.insert((find(t)?, lidx[l.as_str()], find(h)?));
        }
        let root = root.map(find).transpose()?;
        Ok(LabelledGraph {
            vertices,
            labels,
            edges: es.into_iter().collect(),
            root,
            undirected: false,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_index(&self, v: &str) -> Option<usize> {
        self.vertices.binary_search_by(|x| x.as_str().cmp(v)).ok()
    }

    pub fn label_index(&self, l: &str) -> Option<usize> {
        self.labels.binary_search_by(|x| x.as_str().cmp(l)).ok()
    }

    pub fn root_name(&self) -> Option<&str> {
        self.root.map(|r| self.vertices[r].as_str())
    }

    pub fn named_edges(&self) -> Vec<(String, String, String)> {
        self.edges
            .iter()
            .map(|&(t, l, h)| {
                (
                    self.vertices[t].clone(),
                    self.labels[l].clone(),
                    self.vertices[h].clone(),
                )
            })
            .collect()
    }

    /// No two edges share a tail and a label.
    pub fn is_properly_labelled(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.edges.iter().all(|&(t, l, _)| seen.insert((t, l)))
    }

    pub fn loops(&self) -> impl Iterator<Item = &(usize, usize, usize)> {
        self.edges.iter().filter(|e| e.0 == e.2)
    }

    /// Undirected neighbours (loops excluded), sorted.
    pub fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![BTreeSet::new(); self.vertices.len()];
        for &(t, _, h) in &self.edges {
            if t != h {
                adj[t].insert(h);
                adj[h].insert(t);
            }
        }
        adj.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    /// Loops removed; parallel edges merged into one undirected edge labelled by the joined labels.
    pub fn simplify(&self) -> LabelledGraph {
        let mut merged: BTreeMap<(usize, usize), BTreeSet<&str>> = BTreeMap::new();
        for &(t, l, h) in &self.edges {
            if t != h {
                merged
                    .entry((t.min(h), t.max(h)))
                    .or_default()
                    .insert(self.labels[l].as_str());
            }
        }
        let edges: Vec<(String, String, String)> = merged
            .into_iter()
            .map(|((a, b), ls)| {
                (
                    self.vertices[a].clone(),
                    ls.into_iter().collect::<Vec<_>>().join(","),
                    self.vertices[b].clone(),
                )
            })
            .collect();
        let mut g = LabelledGraph::from_named(
            self.vertices.iter().cloned(),
            std::iter::empty(),
            &edges,
            self.root_name(),
        )
        .expect("vertices preserved");
        g.undirected = true;
        g
    }

    /// Undirected petgraph view with vertex ids as weights.
    pub fn to_ungraph(&self) -> UnGraph<String, String> {
        let mut g = UnGraph::new_undirected();
        let nodes: Vec<_> = self.vertices.iter().map(|v| g.add_node(v.clone())).collect();
        for &(t, l, h) in &self.edges {
            g.add_edge(nodes[t], nodes[h], self.labels[l].clone());
        }
        g
    }

    pub fn to_json(&self) -> Value {
        json!({
            "vertices": self.vertices,
            "labels": self.labels,
            "edges": self.named_edges().into_iter().map(|(t, l, h)| json!([t, l, h])).collect::<Vec<_>>(),
            "root": self.root_name(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = || Error::InvalidInput("malformed graph JSON".into());
        let vertices: Vec<String> = v
            .get("vertices")
            .and_then(Value::as_array)
            .ok_or_else(bad)?
            .iter()
            .map(|x| x.as_str().map(str::to_string).ok_or_else(bad))
            .collect::<Result<_>>()?;
        let mut edges = Vec::new();
        for e in v.get("edges").and_then(Value::as_array).ok_or_else(bad)? {
            let a = e.as_array().filter(|a| a.len() == 3).ok_or_else(bad)?;
            let s = |i: usize| a[i].as_str().map(str::to_string).ok_or_else(bad);
            edges.push((s(0)?, s(1)?, s(2)?));
        }
        let labels: Vec<String> = match v.get("labels") {
            Some(l) => serde_json::from_value(l.clone()).map_err(|_| bad())?,
            None => Vec::new(),
        };
        let root = v.get("root").and_then(Value::as_str);
        LabelledGraph::from_named(vertices, labels, &edges, root)
    }

    pub fn to_dot(&self) -> String {
        let (kw, arrow) = if self.undirected {
            ("graph", "--")
        } else {
            ("digraph", "->")
        };
        let mut s = format!("{kw} G {{\n");
        for (i, v) in self.vertices.iter().enumerate() {
            if Some(i) == self.root {
                let _ = writeln!(s, "  {:?} [shape=doublecircle];", v);
            } else {
                let _ = writeln!(s, "  {:?};", v);
            }
        }
        for (t, l, h) in self.named_edges() {
            let _ = writeln!(s, "  {:?} {arrow} {:?} [label={:?}];", t, h, l);
        }
        s.push_str("}\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(t: &str, l: &str, h: &str) -> (String, String, String) {
        (t.into(), l.into(), h.into())
    }

    #[test]
    fn sorted_and_deduplicated() {
        let g = LabelledGraph::from_named(
            ["b".to_string(), "a".to_string()],
            std::iter::empty(),
            &[e("b", "x", "a"), e("a", "x", "b"), e("a", "x", "b")],
            Some("b"),
        )
        .unwrap();
        assert_eq!(g.vertices, vec!["a", "b"]);
        assert_eq!(g.edges, vec![(0, 0, 1), (1, 0, 0)]);
        assert_eq!(g.root, Some(1));
        let back = LabelledGraph::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn simplify_merges() {
        let g = LabelledGraph::from_named(
            ["a".to_string(), "b".to_string()],
            std::iter::empty(),
            &[e("a", "x", "b"), e("b", "y", "a"), e("a", "z", "a")],
            None,
        )
        .unwrap();
        let s = g.simplify();
        assert_eq!(s.named_edges(), vec![e("a", "x,y", "b")]);
        assert!(s.to_dot().starts_with("graph G"));
    }

    #[test]
    fn unknown_endpoint_rejected() {
        assert!(LabelledGraph::from_named(
            ["a".to_string()],
            std::iter::empty(),
            &[e("a", "x", "q")],
            None
        )
        .is_err());
    }
}
