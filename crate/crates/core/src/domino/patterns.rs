//! Forbidden patterns and their compilation into nearest-neighbour tilesets.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde_json::{json, Value};

use super::Tileset;
use crate::error::{invalid, Error, Result};
use crate::graph::LabelledGraph;

/// Reduced word over labels and their inverses; the rightmost letter acts first.
pub type FreeWord = Vec<(usize, i8)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternSet {
    pub colors: Vec<String>,
    pub labels: Vec<String>,
    pub radius: usize,
    /// Each pattern maps support words to colour indices.
    pub patterns: Vec<BTreeMap<FreeWord, usize>>,
}

fn reduce(w: &[(usize, i8)]) -> FreeWord {
    let mut out: FreeWord = Vec::with_capacity(w.len());
    for &(l, e) in w {
        if out.last() == Some(&(l, -e)) {
            out.pop();
        } else {
            out.push((l, e));
        }
    }
    out
}

impl PatternSet {
    pub fn parse_word(&self, s: &str) -> Result<FreeWord> {
        parse_word_with(&self.labels, s)
    }

    pub fn render_word(&self, w: &[(usize, i8)]) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.iter()
            .map(|&(l, e)| {
                if e > 0 {
                    self.labels[l].clone()
                } else {
                    format!("{}^-1", self.labels[l])
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Reads `{"colors","radius","labels"?,"patterns":[{word: colour}]}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::InvalidInput(format!("pattern set: {m}"));
        let colors: Vec<String> = serde_json::from_value(v.get("colors").cloned().ok_or_else(|| bad("colors"))?)
            .map_err(|e| bad(&e.to_string()))?;
        let radius = v
            .get("radius")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("radius"))? as usize;
        let raw: Vec<BTreeMap<String, String>> =
            serde_json::from_value(v.get("patterns").cloned().ok_or_else(|| bad("patterns"))?)
                .map_err(|e| bad(&e.to_string()))?;
        let labels: Vec<String> = match v.get("labels") {
            Some(l) => serde_json::from_value(l.clone()).map_err(|e| bad(&e.to_string()))?,
            None => {
                let mut set = BTreeSet::new();
                for p in &raw {
                    for w in p.keys() {
                        for tok in w.split_whitespace() {
                            if tok != "1" {
                                set.insert(tok.strip_suffix("^-1").unwrap_or(tok).to_string());
                            }
                        }
                    }
                }
                set.into_iter().collect()
            }
        };
        let mut patterns = Vec::new();
        for p in &raw {
            let mut m = BTreeMap::new();
            for (w, c) in p {
                let word = parse_word_with(&labels, w)?;
                if word.len() > radius {
                    return invalid(format!("pattern word {w} exceeds radius {radius}"));
                }
                let ci = colors
                    .iter()
                    .position(|x| x == c)
                    .ok_or_else(|| bad(&format!("unknown colour {c}")))?;
                if m.insert(word, ci).is_some() {
                    return invalid(format!("pattern repeats word {w}"));
                }
            }
            patterns.push(m);
        }
        Ok(PatternSet {
            colors,
            labels,
            radius,
            patterns,
        })
    }

    pub fn to_json(&self) -> Value {
        let pats: Vec<Value> = self
            .patterns
            .iter()
            .map(|p| {
                let m: BTreeMap<String, String> = p
                    .iter()
                    .map(|(w, &c)| (self.render_word(w), self.colors[c].clone()))
                    .collect();
                json!(m)
            })
            .collect();
        json!({"colors": self.colors, "labels": self.labels, "radius": self.radius, "patterns": pats})
    }
}

fn parse_word_with(labels: &[String], s: &str) -> Result<FreeWord> {
    let mut w = Vec::new();
    for tok in s.split_whitespace() {
        if tok == "1" {
            continue;
        }
        let (name, e) = match tok.strip_suffix("^-1") {
            Some(n) => (n, -1),
            None => (tok, 1),
        };
        let l = labels
            .iter()
            .position(|x| x == name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown label {name}")))?;
        w.push((l, e));
    }
    Ok(reduce(&w))
}

/// Compiled tileset with its projection to the original colours.
#[derive(Clone, Debug)]
pub struct CompiledPatterns {
    pub tileset: Tileset,
    /// Original colour of each compiled colour (its value at the identity).
    pub projection: Vec<usize>,
    /// Words of the prefix-closed hull, in the order compiled colours list their values.
    pub hull: Vec<FreeWord>,
}

/// Compiles forbidden patterns into a tileset over pattern-free colourings of the hull.
pub fn compile_patterns(ps: &PatternSet) -> Result<CompiledPatterns> {
    if ps.radius == 0 {
        return invalid("radius must be at least 1");
    }
    let mut hull: BTreeSet<(usize, FreeWord)> = BTreeSet::new();
    hull.insert((0, Vec::new()));
    for p in &ps.patterns {
        for w in p.keys() {
            for k in 0..=w.len() {
                hull.insert((k, w[..k].to_vec()));
            }
        }
    }
    let hull: Vec<FreeWord> = hull.into_iter().map(|(_, w)| w).collect();
    let pos: HashMap<&FreeWord, usize> = hull.iter().enumerate().map(|(i, w)| (w, i)).collect();
    // Pattern constraints, checked once their last position is assigned.
    let mut by_last: Vec<Vec<Vec<(usize, usize)>>> = vec![Vec::new(); hull.len()];
    for p in &ps.patterns {
        let cells: Vec<(usize, usize)> = p.iter().map(|(w, &c)| (pos[w], c)).collect();
        let last = cells.iter().map(|c| c.0).max().unwrap_or(0);
        by_last[last].push(cells);
    }
    let k = ps.colors.len();
    let mut betas: Vec<Vec<usize>> = Vec::new();
    let mut cur = vec![0usize; hull.len()];
    fn rec(
        i: usize,
        k: usize,
        cur: &mut Vec<usize>,
        by_last: &[Vec<Vec<(usize, usize)>>],
        out: &mut Vec<Vec<usize>>,
    ) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for c in 0..k {
            cur[i] = c;
            let hit = by_last[i]
                .iter()
                .any(|cells| cells.iter().all(|&(p, col)| cur[p] == col));
            if !hit {
                rec(i + 1, k, cur, by_last, out);
            }
        }
    }
    if k > 0 {
        rec(0, k, &mut cur, &by_last, &mut betas);
    }
    let mut overlaps: Vec<Vec<(usize, usize)>> = vec![Vec::new(); ps.labels.len()];
    for (l, ov) in overlaps.iter_mut().enumerate() {
        for (i, g) in hull.iter().enumerate() {
            let mut ga = g.clone();
            ga.push((l, -1));
            if let Some(&j) = pos.get(&reduce(&ga)) {
                ov.push((i, j));
            }
        }
    }
    let mut triples = BTreeSet::new();
    for (l, ov) in overlaps.iter().enumerate() {
        for (x, bx) in betas.iter().enumerate() {
            for (y, by) in betas.iter().enumerate() {
                if ov.iter().all(|&(i, j)| bx[i] == by[j]) {
                    triples.insert((x, l, y));
                }
            }
        }
    }
    let colors: Vec<String> = betas
        .iter()
        .map(|b| {
            b.iter()
                .map(|&c| ps.colors[c].as_str())
                .collect::<Vec<_>>()
                .join("|")
        })
        .collect();
    Ok(CompiledPatterns {
        projection: betas.iter().map(|b| b[0]).collect(),
        tileset: Tileset {
            colors,
            labels: ps.labels.clone(),
            triples,
            seed: None,
        },
        hull,
    })
}

/// Pattern semantics on a properly labelled graph: no pattern occurs at any vertex.
pub fn pattern_valid(g: &LabelledGraph, ps: &PatternSet, c: &[usize]) -> Result<bool> {
    let n = g.num_vertices();
    let mut fwd: Vec<Vec<Option<usize>>> = vec![vec![None; n]; ps.labels.len()];
    let mut bwd = fwd.clone();
    for &(t, l, h) in &g.edges {
        let name = &g.labels[l];
        let Some(li) = ps.labels.iter().position(|x| x == name) else {
            continue;
        };
        if fwd[li][t].replace(h).is_some() || bwd[li][h].replace(t).is_some() {
            return invalid(format!("graph is not properly labelled at label {name}"));
        }
    }
    let eval = |v: usize, w: &FreeWord| -> Option<usize> {
        let mut x = v;
        for &(l, e) in w.iter().rev() {
            x = if e > 0 { fwd[l][x]? } else { bwd[l][x]? };
        }
        Some(x)
    };
    for v in 0..n {
        for p in &ps.patterns {
            if p
                .iter()
                .all(|(w, &col)| eval(v, w).is_some_and(|x| c[x] == col))
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_parsing_reduces() {
        let labels = vec!["a".to_string(), "b".to_string()];
        assert_eq!(parse_word_with(&labels, "a a^-1 b").unwrap(), vec![(1, 1)]);
        assert_eq!(parse_word_with(&labels, "1").unwrap(), vec![]);
    }

    #[test]
    fn empty_pattern_set_allows_everything() {
        let ps = PatternSet {
            colors: vec!["x".into(), "y".into()],
            labels: vec!["a".into()],
            radius: 1,
            patterns: vec![],
        };
        let c = compile_patterns(&ps).unwrap();
        assert_eq!(c.tileset.num_colors(), 2);
        assert_eq!(c.tileset.triples.len(), 4);
    }

    #[test]
    fn forbidden_triple() {
        let ps = PatternSet::from_json(&json!({
            "colors": ["0", "1"], "radius": 1,
            "patterns": [{"1": "0", "a": "0"}, {"1": "1", "a": "1"}]
        }))
        .unwrap();
        let c = compile_patterns(&ps).unwrap();
        let allowed: BTreeSet<(usize, usize)> = c
            .tileset
            .triples
            .iter()
            .map(|&(x, _, y)| (c.projection[x], c.projection[y]))
            .collect();
        assert_eq!(allowed, [(0, 1), (1, 0)].into_iter().collect());
    }
}
