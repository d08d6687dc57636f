//! Backtracking search with arc consistency over bitset domains.

use std::collections::{BTreeMap, VecDeque};

use super::Tileset;
use crate::error::{Error, Result};
use crate::graph::LabelledGraph;

/// Constraint network of a graph under a tileset; reusable across pin sets.
#[derive(Clone, Debug)]
pub struct Csp {
    n: usize,
    k: usize,
    w: usize,
    init: Vec<u64>,
    /// `(from, to, support index)`; support rows are indexed by the colour of `from`.
    arcs: Vec<(usize, usize, usize)>,
    supports: Vec<Vec<u64>>,
    out: Vec<Vec<usize>>,
}

fn bit(d: &[u64], c: usize) -> bool {
    d[c / 64] >> (c % 64) & 1 == 1
}

fn count(d: &[u64]) -> usize {
    d.iter().map(|x| x.count_ones() as usize).sum()
}

fn ones(d: &[u64]) -> impl Iterator<Item = usize> + '_ {
    d.iter().enumerate().flat_map(|(i, &x)| {
        (0..64).filter(move |b| x >> b & 1 == 1).map(move |b| i * 64 + b)
    })
}

impl Csp {
    pub fn new(g: &LabelledGraph, ts: &Tileset) -> Result<Self> {
        let n = g.num_vertices();
        let k = ts.num_colors();
        let w = k.div_ceil(64).max(1);
        let lm = ts.label_map(g)?;
        let table = ts.table();
        let mut init = vec![0u64; n * w];
        for v in 0..n {
            for c in 0..k {
                init[v * w + c / 64] |= 1 << (c % 64);
            }
        }
        // support index 2*l is forward along label l, 2*l+1 backward.
        let nl = ts.labels.len();
        let mut supports = vec![vec![0u64; k * w]; 2 * nl];
        for b in 0..k {
            for l in 0..nl {
                for c in 0..k {
                    if table[b][l][c] {
                        supports[2 * l][b * w + c / 64] |= 1 << (c % 64);
                        supports[2 * l + 1][c * w + b / 64] |= 1 << (b % 64);
                    }
                }
            }
        }
        let mut arcs = Vec::new();
        let mut out = vec![Vec::new(); n];
        for &(t, l, h) in &g.edges {
            let l = lm[l];
            if t == h {
                for c in 0..k {
                    if !table[c][l][c] {
                        init[t * w + c / 64] &= !(1 << (c % 64));
                    }
                }
                continue;
            }
            out[t].push(arcs.len());
            arcs.push((t, h, 2 * l));
            out[h].push(arcs.len());
            arcs.push((h, t, 2 * l + 1));
        }
        if let (Some(s), Some(r)) = (ts.seed, g.root) {
            for c in 0..k {
                if c != s {
                    init[r * w + c / 64] &= !(1 << (c % 64));
                }
            }
        }
        Ok(Csp {
            n,
            k,
            w,
            init,
            arcs,
            supports,
            out,
        })
    }

    fn pinned(&self, pins: &BTreeMap<usize, usize>) -> Result<Vec<u64>> {
        let mut d = self.init.clone();
        for (&v, &c) in pins {
            if v >= self.n || c >= self.k {
                return Err(Error::InvalidInput(format!("pin {v}:{c} out of range")));
            }
            let keep = bit(&d[v * self.w..(v + 1) * self.w], c);
            for x in &mut d[v * self.w..(v + 1) * self.w] {
                *x = 0;
            }
            if keep {
                d[v * self.w + c / 64] |= 1 << (c % 64);
            }
        }
        Ok(d)
    }

    fn ac3(&self, d: &mut [u64], queue: &mut VecDeque<usize>) -> bool {
        let w = self.w;
        let mut queued = vec![false; self.arcs.len()];
        for &a in queue.iter() {
            queued[a] = true;
        }
        let mut supp = vec![0u64; w];
        while let Some(a) = queue.pop_front() {
            queued[a] = false;
            let (x, y, s) = self.arcs[a];
            supp.iter_mut().for_each(|z| *z = 0);
            for b in ones(&d[x * w..(x + 1) * w]) {
                let row = &self.supports[s][b * w..(b + 1) * w];
                for (z, r) in supp.iter_mut().zip(row) {
                    *z |= r;
                }
            }
            let mut changed = false;
            let mut empty = true;
            for i in 0..w {
                let nv = d[y * w + i] & supp[i];
                if nv != d[y * w + i] {
                    changed = true;
                    d[y * w + i] = nv;
                }
                if nv != 0 {
                    empty = false;
                }
            }
            if empty {
                return false;
            }
            if changed {
                for &b in &self.out[y] {
                    if !queued[b] {
                        queued[b] = true;
                        queue.push_back(b);
                    }
                }
            }
        }
        true
    }

    fn initial(&self, pins: &BTreeMap<usize, usize>) -> Result<Option<Vec<u64>>> {
        let mut d = self.pinned(pins)?;
        if (0..self.n).any(|v| count(&d[v * self.w..(v + 1) * self.w]) == 0) {
            return Ok(None);
        }
        let mut q: VecDeque<usize> = (0..self.arcs.len()).collect();
        Ok(self.ac3(&mut d, &mut q).then_some(d))
    }

    /// Arc-consistent domains after pinning, or `None` if a domain empties.
    pub fn propagate(&self, pins: &BTreeMap<usize, usize>) -> Result<Option<Vec<Vec<usize>>>> {
        Ok(self.initial(pins)?.map(|d| {
            (0..self.n)
                .map(|v| ones(&d[v * self.w..(v + 1) * self.w]).collect())
                .collect()
        }))
    }

    pub fn solve(&self, pins: &BTreeMap<usize, usize>) -> Result<Option<Vec<usize>>> {
        Ok(self.enumerate(pins, 1)?.into_iter().next())
    }

    /// Up to `limit` solutions in search order.
    pub fn enumerate(&self, pins: &BTreeMap<usize, usize>, limit: usize) -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        if limit == 0 {
            return Ok(out);
        }
        if let Some(d) = self.initial(pins)? {
            self.search(d, &mut out, limit);
        }
        Ok(out)
    }

    fn search(&self, d: Vec<u64>, out: &mut Vec<Vec<usize>>, limit: usize) {
        let w = self.w;
        let mut best: Option<(usize, usize)> = None;
        for v in 0..self.n {
            let c = count(&d[v * w..(v + 1) * w]);
            if c > 1 && best.is_none_or(|(bc, _)| c < bc) {
                best = Some((c, v));
            }
        }
        let Some((_, v)) = best else {
            out.push(
                (0..self.n)
                    .map(|v| ones(&d[v * w..(v + 1) * w]).next().expect("non-empty"))
                    .collect(),
            );
            return;
        };
        let colours: Vec<usize> = ones(&d[v * w..(v + 1) * w]).collect();
        for c in colours {
            let mut nd = d.clone();
            for x in &mut nd[v * w..(v + 1) * w] {
                *x = 0;
            }
            nd[v * w + c / 64] |= 1 << (c % 64);
            let mut q: VecDeque<usize> = self.out[v].iter().copied().collect();
            if self.ac3(&mut nd, &mut q) {
                self.search(nd, out, limit);
                if out.len() >= limit {
                    return;
                }
            }
        }
    }
}

/// First solution in search order (minimum remaining values, ties by vertex index, colours ascending).
pub fn solve_finite(
    g: &LabelledGraph,
    ts: &Tileset,
    pins: &BTreeMap<usize, usize>,
) -> Result<Option<Vec<usize>>> {
    Csp::new(g, ts)?.solve(pins)
}

pub fn enumerate_solutions(
    g: &LabelledGraph,
    ts: &Tileset,
    pins: &BTreeMap<usize, usize>,
    limit: usize,
) -> Result<Vec<Vec<usize>>> {
    Csp::new(g, ts)?.enumerate(pins, limit)
}

pub fn propagate(
    g: &LabelledGraph,
    ts: &Tileset,
    pins: &BTreeMap<usize, usize>,
) -> Result<Option<Vec<Vec<usize>>>> {
    Csp::new(g, ts)?.propagate(pins)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domino::check_coloring;

    fn cycle(n: usize) -> LabelledGraph {
        let vs: Vec<String> = (0..n).map(|i| format!("v{i:02}")).collect();
        let es: Vec<(String, String, String)> = (0..n)
            .map(|i| (vs[i].clone(), "a".to_string(), vs[(i + 1) % n].clone()))
            .collect();
        LabelledGraph::from_named(vs, std::iter::empty(), &es, None).unwrap()
    }

    fn brute_count(g: &LabelledGraph, ts: &Tileset) -> usize {
        let n = g.num_vertices();
        let k = ts.num_colors();
        let mut total = 0;
        for code in 0..k.pow(n as u32) {
            let c: Vec<usize> = (0..n).map(|i| code / k.pow(i as u32) % k).collect();
            if check_coloring(g, ts, &c).unwrap() {
                total += 1;
            }
        }
        total
    }

    #[test]
    fn odd_cycle_not_two_colourable() {
        let ts = Tileset::proper_coloring(2, &["a"]);
        assert_eq!(solve_finite(&cycle(3), &ts, &BTreeMap::new()).unwrap(), None);
        assert!(solve_finite(&cycle(4), &ts, &BTreeMap::new()).unwrap().is_some());
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let ts = Tileset::proper_coloring(3, &["a"]);
        for n in 3..7 {
            let g = cycle(n);
            let sols = enumerate_solutions(&g, &ts, &BTreeMap::new(), usize::MAX).unwrap();
            assert_eq!(sols.len(), brute_count(&g, &ts));
            assert!(sols.iter().all(|s| check_coloring(&g, &ts, s).unwrap()));
        }
    }

    #[test]
    fn loops_are_unary() {
        let g = LabelledGraph::from_named(
            ["x".to_string()],
            std::iter::empty(),
            &[("x".into(), "a".into(), "x".into())],
            None,
        )
        .unwrap();
        let ts = Tileset::proper_coloring(2, &["a"]);
        assert_eq!(solve_finite(&g, &ts, &BTreeMap::new()).unwrap(), None);
    }
}
