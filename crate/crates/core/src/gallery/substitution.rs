//! Box substitutions, their partial transducers and a connectivity classification.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::transducer::{Alphabet, State, Transducer};

/// Black/white colouring of a `k_1 × … × k_d` box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Substitution {
    pub dims: usize,
    #[serde(rename = "box")]
    pub box_size: Vec<i64>,
    pub black: Vec<Vec<i64>>,
}

pub const SUBSTITUTIONS: &[&str] = &["gasket", "h", "carpet", "snake5"];

fn rule(k: i64, cells: &[(i64, i64)]) -> Substitution {
    Substitution {
        dims: 2,
        box_size: vec![k, k],
        black: cells.iter().map(|&(x, y)| vec![x, y]).collect(),
    }
}

pub fn builtin_substitution(name: &str) -> Result<Substitution> {
    Ok(match name {
        "gasket" => rule(2, &[(1, 0), (0, 0), (1, 1)]),
        "h" => rule(3, &[(0, 0), (0, 1), (0, 2), (1, 1), (2, 0), (2, 1), (2, 2)]),
        "carpet" => rule(3, &[(0, 0), (0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1), (2, 2)]),
        "snake5" => rule(
            5,
            &[
                (0, 0), (0, 1), (0, 2), (0, 3), (1, 2), (2, 2), (3, 2), (4, 2), (4, 3),
                (4, 4), (1, 3), (1, 4), (2, 4), (2, 0), (3, 0), (3, 1), (4, 1),
            ],
        ),
        _ => return Err(Error::UnknownName(name.to_string())),
    })
}

fn vec_name(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(i64::to_string).collect();
    format!("({})", parts.join(","))
}

impl Substitution {
    pub fn from_json(v: &Value) -> Result<Self> {
        let s: Substitution =
            serde_json::from_value(v.clone()).map_err(|e| Error::InvalidInput(format!("substitution: {e}")))?;
        s.check()?;
        Ok(s)
    }

    pub fn to_json(&self) -> Value {
        json!({"dims": self.dims, "box": self.box_size, "black": self.sorted_black()})
    }

    pub fn check(&self) -> Result<()> {
        if self.dims == 0 || self.box_size.len() != self.dims {
            return invalid("box must list one size per dimension");
        }
        if self.box_size.iter().any(|&k| k < 1) {
            return invalid("box sizes must be positive");
        }
        if self.black.is_empty() {
            return invalid("black set is empty");
        }
        let mut seen = BTreeSet::new();
        for v in &self.black {
            if v.len() != self.dims || v.iter().zip(&self.box_size).any(|(&x, &k)| x < 0 || x >= k) {
                return invalid(format!("black box {} outside the box", vec_name(v)));
            }
            if !seen.insert(v) {
                return invalid(format!("black box {} repeated", vec_name(v)));
            }
        }
        Ok(())
    }

    /// Black boxes in lexicographic order; letter `i` of the machine is the `i`-th entry.
    pub fn sorted_black(&self) -> Vec<Vec<i64>> {
        let set: BTreeSet<Vec<i64>> = self.black.iter().cloned().collect();
        set.into_iter().collect()
    }

    /// Displacement vectors `{-1,0,1}^d` in lexicographic order.
    pub fn directions(&self) -> Vec<Vec<i64>> {
        let mut out = vec![Vec::new()];
        for _ in 0..self.dims {
            out = out
                .into_iter()
                .flat_map(|p: Vec<i64>| {
                    (-1..=1).map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        out
    }
}

/// Partial machine on the black boxes: `Φ(a,v) = (v',a')` iff `v + a = v' + M a'`.
pub fn substitution_to_transducer(s: &Substitution) -> Result<Transducer> {
    s.check()?;
    let black = s.sorted_black();
    let pos: BTreeMap<&Vec<i64>, usize> = black.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let dirs = s.directions();
    let dpos: BTreeMap<&Vec<i64>, usize> = dirs.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let alphabet = Alphabet::new((0..black.len()).map(|i| i.to_string()))?;
    let states = dirs
        .iter()
        .map(|a| {
            let transitions = black
                .iter()
                .map(|v| {
                    let w: Vec<i64> = v.iter().zip(a).map(|(x, y)| x + y).collect();
                    let a2: Vec<i64> = w.iter().zip(&s.box_size).map(|(x, k)| x.div_euclid(*k)).collect();
                    let v2: Vec<i64> = w.iter().zip(&s.box_size).map(|(x, k)| x.rem_euclid(*k)).collect();
                    Some((*pos.get(&v2)?, dpos[&a2]))
                })
                .collect();
            State {
                name: vec_name(a),
                invertible: true,
                transitions,
            }
        })
        .collect();
    let zero = vec_name(&vec![0; s.dims]);
    let gens: Vec<String> = dirs.iter().map(|a| vec_name(a)).filter(|n| *n != zero).collect();
    Transducer::new(alphabet, states, &zero, &gens)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConnectivityVerdict {
    BoundedConnectivity,
    Isthmus,
    Grid,
    Other,
}

impl ConnectivityVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConnectivityVerdict::BoundedConnectivity => "bounded_connectivity",
            ConnectivityVerdict::Isthmus => "isthmus",
            ConnectivityVerdict::Grid => "grid",
            ConnectivityVerdict::Other => "other",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstitutionClass {
    /// Recurrent non-identity directions.
    pub recurrent: Vec<Vec<i64>>,
    /// Maximum number of disjoint flexible lines, per direction.
    pub lines: Vec<usize>,
    /// Steps occurring in some flexible line.
    pub steps_used: BTreeSet<Vec<i64>>,
    pub verdict: ConnectivityVerdict,
    /// Per direction, the part `S_0` of a single-crossing partition, if any.
    pub partitions: Vec<Option<Vec<Vec<i64>>>>,
}

impl SubstitutionClass {
    pub fn conjugate_to_bounded(&self) -> bool {
        self.partitions.iter().all(Option::is_some)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "recurrent": self.recurrent.iter().map(|v| vec_name(v)).collect::<Vec<_>>(),
            "lines": self.lines,
            "steps_used": self.steps_used.iter().map(|v| vec_name(v)).collect::<Vec<_>>(),
            "verdict": self.verdict.as_str(),
            "conjugate_to_bounded": self.conjugate_to_bounded(),
            "partitions": self.partitions,
        })
    }
}

const PATH_CAP: usize = 5_000_000;

pub fn classify_substitution(s: &Substitution) -> Result<SubstitutionClass> {
    s.check()?;
    let black = s.sorted_black();
    if !unit_connected(&black) {
        return Err(Error::DisconnectedBlackSet);
    }
    let t = substitution_to_transducer(s)?;
    let dirs = s.directions();
    let recurrent: Vec<Vec<i64>> = recurrent_states(&t)
        .into_iter()
        .filter(|&i| i != t.identity_state())
        .map(|i| dirs[i].clone())
        .collect();
    let mut lines = Vec::new();
    let mut steps_used = BTreeSet::new();
    let mut partitions = Vec::new();
    for dir in 0..s.dims {
        let (count, used) = flexible_lines(s, &black, &recurrent, dir)?;
        lines.push(count);
        steps_used.extend(used);
        partitions.push(single_crossing(s, &black, dir));
    }
    let verdict = if lines.iter().all(|&c| c <= 1) {
        ConnectivityVerdict::BoundedConnectivity
    } else if lines.contains(&1) && lines.iter().any(|&c| c >= 2) {
        ConnectivityVerdict::Isthmus
    } else if lines.iter().all(|&c| c >= 2) {
        ConnectivityVerdict::Grid
    } else {
        ConnectivityVerdict::Other
    };
    Ok(SubstitutionClass {
        recurrent,
        lines,
        steps_used,
        verdict,
        partitions,
    })
}

fn unit_connected(cells: &[Vec<i64>]) -> bool {
    let set: BTreeSet<&Vec<i64>> = cells.iter().collect();
    let mut seen: BTreeSet<&Vec<i64>> = BTreeSet::new();
    let mut queue = VecDeque::from([&cells[0]]);
    seen.insert(&cells[0]);
    while let Some(v) = queue.pop_front() {
        for i in 0..v.len() {
            for d in [-1, 1] {
                let mut w = v.clone();
                w[i] += d;
                if let Some(&x) = set.get(&w) {
                    if seen.insert(x) {
                        queue.push_back(x);
                    }
                }
            }
        }
    }
    seen.len() == cells.len()
}

/// States lying on a cycle of the transition graph.
fn recurrent_states(t: &Transducer) -> Vec<usize> {
    let n = t.num_states();
    let succ: Vec<BTreeSet<usize>> = (0..n)
        .map(|s| {
            (0..t.alphabet().len())
                .filter_map(|l| t.transition(s, l).map(|(_, n)| n))
                .collect()
        })
        .collect();
    (0..n)
        .filter(|&s| {
            let mut seen = vec![false; n];
            let mut stack: Vec<usize> = succ[s].iter().copied().collect();
            while let Some(x) = stack.pop() {
                if x == s {
                    return true;
                }
                if !std::mem::replace(&mut seen[x], true) {
                    stack.extend(succ[x].iter().copied());
                }
            }
            false
        })
        .collect()
}

/// Maximum number of pairwise vertex-disjoint flexible lines in direction `dir`, with the
/// steps they use. Lines run inside `S ⊔ (S + k e_dir)`.
fn flexible_lines(
    s: &Substitution,
    black: &[Vec<i64>],
    steps: &[Vec<i64>],
    dir: usize,
) -> Result<(usize, BTreeSet<Vec<i64>>)> {
    let mut verts: Vec<Vec<i64>> = black.to_vec();
    for v in black {
        let mut w = v.clone();
        w[dir] += s.box_size[dir];
        verts.push(w);
    }
    let index: BTreeMap<&Vec<i64>, usize> = verts.iter().enumerate().map(|(i, v)| (v, i)).collect();
    if verts.len() > 128 {
        return invalid("black set too large for line enumeration");
    }
    let adj: Vec<Vec<(usize, usize)>> = verts
        .iter()
        .map(|v| {
            steps
                .iter()
                .enumerate()
                .filter_map(|(si, d)| {
                    let w: Vec<i64> = v.iter().zip(d).map(|(a, b)| a + b).collect();
                    index.get(&w).map(|&j| (j, si))
                })
                .collect()
        })
        .collect();
    let nb = black.len();
    // Lines are periodic, so disjointness is taken modulo the translation.
    let fold = |m: u128| (m | m >> nb) & ((1u128 << nb) - 1);
    let mut budget = PATH_CAP;
    let mut per_start: Vec<Vec<u128>> = Vec::new();
    let mut used = BTreeSet::new();
    for start in 0..nb {
        let goal = start + nb;
        let mut masks: BTreeSet<u128> = BTreeSet::new();
        let mut stack = vec![(start, 1u128 << start, 0usize)];
        // Iterative DFS over simple paths; `usize` is the next neighbour to try.
        let mut steps_on_path: Vec<usize> = Vec::new();
        while let Some((v, mask, next)) = stack.pop() {
            if next >= adj[v].len() {
                steps_on_path.pop();
                continue;
            }
            stack.push((v, mask, next + 1));
            let (w, si) = adj[v][next];
            if mask >> w & 1 == 1 {
                continue;
            }
            if budget == 0 {
                return Err(Error::CapExceeded(PATH_CAP));
            }
            budget -= 1;
            if w == goal {
                masks.insert(fold(mask));
                used.extend(steps_on_path.iter().map(|&i| steps[i].clone()));
                used.insert(steps[si].clone());
                continue;
            }
            steps_on_path.push(si);
            stack.push((w, mask | 1 << w, 0));
        }
        let minimal: Vec<u128> = masks
            .iter()
            .copied()
            .filter(|&m| !masks.iter().any(|&o| o != m && o & m == o))
            .collect();
        per_start.push(minimal);
    }
    fn pack(i: usize, taken: u128, per: &[Vec<u128>], best: &mut usize, cur: usize) {
        if cur + (per.len() - i) <= *best {
            return;
        }
        if i == per.len() {
            *best = cur;
            return;
        }
        for &m in &per[i] {
            if m & taken == 0 {
                pack(i + 1, taken | m, per, best, cur + 1);
            }
        }
        pack(i + 1, taken, per, best, cur);
    }
    let mut best = 0;
    pack(0, 0, &per_start, &mut best, 0);
    Ok((best, used))
}

/// First partition (in mask order) of `S ⊔ (S + k e_dir)` into fundamental domains `S_0`, `S_1`
/// with exactly one unit edge in direction `dir` between them.
fn single_crossing(s: &Substitution, black: &[Vec<i64>], dir: usize) -> Option<Vec<Vec<i64>>> {
    let nb = black.len();
    if nb > 24 {
        return None;
    }
    let shifted = |v: &Vec<i64>| {
        let mut w = v.clone();
        w[dir] += s.box_size[dir];
        w
    };
    let mut verts: Vec<Vec<i64>> = black.to_vec();
    verts.extend(black.iter().map(shifted));
    let index: BTreeMap<&Vec<i64>, usize> = verts.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let edges: Vec<(usize, usize)> = verts
        .iter()
        .enumerate()
        .filter_map(|(i, v)| {
            let mut w = v.clone();
            w[dir] += 1;
            index.get(&w).map(|&j| (i, j))
        })
        .collect();
    for mask in 0u32..(1 << nb) {
        let side = |i: usize| {
            let flip = mask >> (i % nb) & 1 == 1;
            (i < nb) != flip
        };
        let crossing = edges.iter().filter(|&&(a, b)| side(a) != side(b)).count();
        if crossing == 1 {
            let mut s0: Vec<Vec<i64>> = (0..2 * nb).filter(|&i| side(i)).map(|i| verts[i].clone()).collect();
            s0.sort();
            return Some(s0);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_state_fixes_letters() {
        let t = substitution_to_transducer(&builtin_substitution("h").unwrap()).unwrap();
        let id = t.state_index("(0,0)").unwrap();
        assert_eq!(id, t.identity_state());
        for l in 0..t.alphabet().len() {
            assert_eq!(t.transition(id, l), Some((l, id)));
        }
    }

    #[test]
    fn h_rule_upward_step() {
        // (0,0) + (0,1) = (0,1) lies in S.
        let s = builtin_substitution("h").unwrap();
        let t = substitution_to_transducer(&s).unwrap();
        let black = s.sorted_black();
        let v = black.iter().position(|v| *v == vec![0, 0]).unwrap();
        let w = black.iter().position(|v| *v == vec![0, 1]).unwrap();
        let up = t.state_index("(0,1)").unwrap();
        assert_eq!(t.transition(up, v), Some((w, t.identity_state())));
        // (1,0) is white, so the horizontal step from (0,0) is undefined.
        let right = t.state_index("(1,0)").unwrap();
        assert_eq!(t.transition(right, v), None);
    }

    #[test]
    fn disconnected_rejected() {
        let s = rule(3, &[(0, 0), (2, 2)]);
        assert_eq!(classify_substitution(&s).unwrap_err(), Error::DisconnectedBlackSet);
    }

    #[test]
    fn json_round_trip() {
        let s = builtin_substitution("carpet").unwrap();
        let back = Substitution::from_json(&s.to_json()).unwrap();
        assert_eq!(back.sorted_black(), s.sorted_black());
    }
}
