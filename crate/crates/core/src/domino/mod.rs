//! Tilesets, the finite-graph solver, pattern compilation and the Λ decision procedure.

mod lambda;
mod patterns;
mod solver;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::graph::LabelledGraph;

pub use lambda::{decide_pcf, lambda_step, Caps, Decision, LambdaContext, LambdaSet, Verdict, Witness};
pub use patterns::{compile_patterns, pattern_valid, CompiledPatterns, FreeWord, PatternSet};
pub use solver::{enumerate_solutions, propagate, solve_finite, Csp};

/// Colours `B`, labels `A`, allowed triples `Θ ⊆ B×A×B`, optional seed colour.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tileset {
    pub colors: Vec<String>,
    pub labels: Vec<String>,
    pub triples: BTreeSet<(usize, usize, usize)>,
    pub seed: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct TilesetJson {
    colors: Vec<String>,
    labels: Vec<String>,
    triples: Vec<(String, String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<String>,
}

fn index_of(names: &[String], x: &str, what: &str) -> Result<usize> {
    names
        .iter()
        .position(|n| n == x)
        .ok_or_else(|| Error::InvalidInput(format!("unknown {what} {x}")))
}

fn check_unique(names: &[String], what: &str) -> Result<()> {
    let set: BTreeSet<&String> = names.iter().collect();
    if set.len() != names.len() {
        return invalid(format!("duplicate {what}"));
    }
    Ok(())
}

impl Tileset {
    pub fn new(
        colors: Vec<String>,
        labels: Vec<String>,
        triples: &[(String, String, String)],
        seed: Option<&str>,
    ) -> Result<Self> {
        check_unique(&colors, "colour")?;
        check_unique(&labels, "label")?;
        let mut set = BTreeSet::new();
        for (b, a, c) in triples {
            set.insert((
                index_of(&colors, b, "colour")?,
                index_of(&labels, a, "label")?,
                index_of(&colors, c, "colour")?,
            ));
        }
        let seed = seed.map(|s| index_of(&colors, s, "colour")).transpose()?;
        Ok(Tileset {
            colors,
            labels,
            triples: set,
            seed,
        })
    }

    /// Proper colouring with `k` colours `0..k` on the given labels.
    pub fn proper_coloring(k: usize, labels: &[&str]) -> Tileset {
        let mut triples = BTreeSet::new();
        for l in 0..labels.len() {
            for i in 0..k {
                for j in 0..k {
                    if i != j {
                        triples.insert((i, l, j));
                    }
                }
            }
        }
        Tileset {
            colors: (0..k).map(|i| i.to_string()).collect(),
            labels: labels.iter().map(|s| s.to_string()).collect(),
            triples,
            seed: None,
        }
    }

    pub fn num_colors(&self) -> usize {
        self.colors.len()
    }

    pub fn color_index(&self, c: &str) -> Result<usize> {
        index_of(&self.colors, c, "colour")
    }

    pub fn label_index(&self, l: &str) -> Option<usize> {
        self.labels.iter().position(|x| x == l)
    }

    pub fn allows(&self, b: usize, label: usize, c: usize) -> bool {
        self.triples.contains(&(b, label, c))
    }

    /// Dense lookup table `[b][label][c]`.
    pub fn table(&self) -> Vec<Vec<Vec<bool>>> {
        let k = self.colors.len();
        let mut t = vec![vec![vec![false; k]; self.labels.len()]; k];
        for &(b, l, c) in &self.triples {
            t[b][l][c] = true;
        }
        t
    }

    /// Maps each graph label to a tileset label.
    pub fn label_map(&self, g: &LabelledGraph) -> Result<Vec<usize>> {
        g.labels
            .iter()
            .map(|l| {
                self.label_index(l)
                    .ok_or_else(|| Error::InvalidInput(format!("graph label {l} missing from tileset")))
            })
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let triples: Vec<Value> = self
            .triples
            .iter()
            .map(|&(b, l, c)| json!([self.colors[b], self.labels[l], self.colors[c]]))
            .collect();
        let mut v = json!({
            "colors": self.colors,
            "labels": self.labels,
            "triples": triples,
        });
        if let Some(s) = self.seed {
            v["seed"] = json!(self.colors[s]);
        }
        v
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let j: TilesetJson =
            serde_json::from_value(v.clone()).map_err(|e| Error::InvalidInput(e.to_string()))?;
        Tileset::new(j.colors, j.labels, &j.triples, j.seed.as_deref())
    }
}

/// True iff every edge triple is allowed and a seeded root carries the seed.
pub fn check_coloring(g: &LabelledGraph, ts: &Tileset, c: &[usize]) -> Result<bool> {
    if c.len() != g.num_vertices() {
        let missing = g.vertices.get(c.len()).cloned().unwrap_or_default();
        return Err(Error::MissingColour(missing));
    }
    let lm = ts.label_map(g)?;
    if let (Some(s), Some(r)) = (ts.seed, g.root) {
        if c[r] != s {
            return Ok(false);
        }
    }
    Ok(g.edges
        .iter()
        .all(|&(t, l, h)| ts.allows(c[t], lm[l], c[h])))
}

/// Named variant of [`check_coloring`].
pub fn check_named_coloring(g: &LabelledGraph, ts: &Tileset, c: &BTreeMap<String, String>) -> Result<bool> {
    let mut v = Vec::with_capacity(g.num_vertices());
    for name in &g.vertices {
        let col = c
            .get(name)
            .ok_or_else(|| Error::MissingColour(name.clone()))?;
        v.push(ts.color_index(col)?);
    }
    check_coloring(g, ts, &v)
}

/// A Wang tile; sides are colour names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WangTile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n: String,
    pub e: String,
    pub s: String,
    pub w: String,
}

impl WangTile {
    pub fn new(n: &str, e: &str, s: &str, w: &str) -> Self {
        WangTile {
            name: None,
            n: n.into(),
            e: e.into(),
            s: s.into(),
            w: w.into(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WangSet {
    pub tiles: Vec<WangTile>,
}

pub const EAST: &str = "(1,0)";
pub const WEST: &str = "(-1,0)";
pub const NORTH: &str = "(0,1)";
pub const SOUTH: &str = "(0,-1)";

pub fn wang_tile_names(tiles: &[WangTile]) -> Vec<String> {
    tiles
        .iter()
        .enumerate()
        .map(|(i, t)| t.name.clone().unwrap_or_else(|| format!("w{i}")))
        .collect()
}

/// Tileset on the four grid directions whose valid colourings are Wang tilings.
pub fn wang_to_tileset(tiles: &[WangTile]) -> Result<Tileset> {
    let colors = wang_tile_names(tiles);
    check_unique(&colors, "tile name")?;
    let labels: Vec<String> = [EAST, WEST, NORTH, SOUTH].iter().map(|s| s.to_string()).collect();
    let mut triples = BTreeSet::new();
    for (i, a) in tiles.iter().enumerate() {
        for (j, b) in tiles.iter().enumerate() {
            if a.e == b.w {
                triples.insert((i, 0, j));
                triples.insert((j, 1, i));
            }
            if a.n == b.s {
                triples.insert((i, 2, j));
                triples.insert((j, 3, i));
            }
        }
    }
    Ok(Tileset {
        colors,
        labels,
        triples,
        seed: None,
    })
}

/// Four colours, `0` marking the `loop_label`-loops; every triple allowed on `others`.
pub fn local_mark_tileset(loop_label: &str, others: &[&str]) -> (Tileset, Vec<usize>) {
    let mut labels = vec![loop_label.to_string()];
    labels.extend(others.iter().map(|s| s.to_string()));
    let mut triples = BTreeSet::new();
    triples.insert((0, 0, 0));
    for i in 1..4 {
        for j in 1..4 {
            if i != j {
                triples.insert((i, 0, j));
            }
        }
    }
    for l in 1..labels.len() {
        for i in 0..4 {
            for j in 0..4 {
                triples.insert((i, l, j));
            }
        }
    }
    (
        Tileset {
            colors: (0..4).map(|i| i.to_string()).collect(),
            labels,
            triples,
            seed: None,
        },
        vec![0],
    )
}

/// Removes the seed of `main` by pairing with a sunny-side-up tileset: pairs `(b0,b1)` with
/// `proj(b1)=1` must have `b0` equal to the seed. A label missing from one side leaves that
/// component unconstrained.
pub fn compose_seeded(main: &Tileset, ssu: &Tileset, proj: &[bool]) -> Result<Tileset> {
    let seed = main
        .seed
        .ok_or_else(|| Error::InvalidInput("main tileset has no seed".into()))?;
    if proj.len() != ssu.num_colors() {
        return invalid("projection length differs from sunny-side-up colour count");
    }
    let mut pairs = Vec::new();
    for b0 in 0..main.num_colors() {
        for (b1, &marked) in proj.iter().enumerate() {
            if !marked || b0 == seed {
                pairs.push((b0, b1));
            }
        }
    }
    let labels: Vec<String> = main
        .labels
        .iter()
        .chain(ssu.labels.iter())
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let side = |ts: &Tileset, l: &str, a: usize, b: usize| match ts.label_index(l) {
        Some(li) => ts.allows(a, li, b),
        None => true,
    };
    let mut triples = BTreeSet::new();
    for (li, l) in labels.iter().enumerate() {
        for (i, &(a0, a1)) in pairs.iter().enumerate() {
            for (j, &(c0, c1)) in pairs.iter().enumerate() {
                if side(main, l, a0, c0) && side(ssu, l, a1, c1) {
                    triples.insert((i, li, j));
                }
            }
        }
    }
    Ok(Tileset {
        colors: pairs
            .iter()
            .map(|&(a, b)| format!("({},{})", main.colors[a], ssu.colors[b]))
            .collect(),
        labels,
        triples,
        seed: None,
    })
}
