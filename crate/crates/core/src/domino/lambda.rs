//! Boundary colourings `Λ_n` of tile Schreier graphs and the resulting decision procedure.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde_json::{json, Value};

use super::Tileset;
use crate::contraction::{is_bounded, nucleus, post_critical_set, suffix_sets, Nucleus, PostCriticalWord};
use crate::error::{Error, Result};
use crate::transducer::{GroupElement, Ray, Transducer, Word};

/// Colourings of `P_n` that extend to valid colourings of the level-`n` tile graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaSet {
    pub level: usize,
    pub domain: Vec<Word>,
    /// Each map lists a colour per domain word.
    pub maps: BTreeSet<Vec<usize>>,
}

#[derive(Clone, Debug)]
struct StepPlan {
    next_domain: Vec<Word>,
    /// `(s, p, label, t, q)`: require `(λ_s(p), label, λ_t(q)) ∈ Θ`.
    checks: Vec<(usize, usize, usize, usize, usize)>,
    /// Source `(s, p)` of every word of the next domain.
    assign: Vec<(usize, usize)>,
}

/// Nucleus, post-critical data and tileset bundled for repeated Λ steps.
pub struct LambdaContext<'a> {
    machine: &'a Transducer,
    post: Vec<PostCriticalWord>,
    ts: &'a Tileset,
    label_of: Vec<Option<usize>>,
    table: Vec<Vec<Vec<bool>>>,
}

impl<'a> LambdaContext<'a> {
    pub fn new(nuc: &'a Nucleus, post: &BTreeSet<PostCriticalWord>, ts: &'a Tileset) -> Result<Self> {
        let machine = nuc.machine();
        let mut label_of = Vec::with_capacity(machine.num_states());
        for s in 0..machine.num_states() {
            if s == machine.identity_state() {
                label_of.push(None);
            } else {
                let name = machine.state_name(s);
                let l = ts.label_index(name).ok_or_else(|| {
                    Error::InvalidInput(format!("tileset lacks nucleus label {name}"))
                })?;
                label_of.push(Some(l));
            }
        }
        Ok(LambdaContext {
            machine,
            post: post.iter().cloned().collect(),
            ts,
            label_of,
            table: ts.table(),
        })
    }

    pub fn domain(&self, n: usize) -> Vec<Word> {
        let set: BTreeSet<Word> = self.post.iter().map(|w| w.tail(n)).collect();
        set.into_iter().collect()
    }

    pub fn initial(&self) -> LambdaSet {
        LambdaSet {
            level: 0,
            domain: vec![Vec::new()],
            maps: (0..self.ts.num_colors()).map(|b| vec![b]).collect(),
        }
    }

    fn plan(&self, n: usize) -> Result<StepPlan> {
        let m = self.machine;
        let k = m.alphabet().len();
        let dom = self.domain(n);
        let next_domain = self.domain(n + 1);
        let idx: HashMap<&Word, usize> = dom.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let next_idx: HashMap<&Word, usize> =
            next_domain.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let mut checks = Vec::new();
        let mut assign: Vec<Option<(usize, usize)>> = vec![None; next_domain.len()];
        for (pi, p) in dom.iter().enumerate() {
            for g in 0..m.num_states() {
                let Some(label) = self.label_of[g] else { continue };
                let (q, r) = m.act_word(&GroupElement::state(g), p)?;
                if r.is_empty() {
                    continue;
                }
                let qi = *idx.get(&q).ok_or_else(|| {
                    Error::Internal("image of a post-critical suffix left the domain".into())
                })?;
                for s in 0..k {
                    let (t, h) = m.act_letter(&r, s)?;
                    if h.is_empty() {
                        checks.push((s, pi, label, t, qi));
                    } else {
                        let mut ps = p.clone();
                        ps.push(s);
                        let j = *next_idx.get(&ps).ok_or_else(|| {
                            Error::Internal("extended suffix missing from next domain".into())
                        })?;
                        assign[j] = Some((s, pi));
                    }
                }
            }
        }
        checks.sort_unstable();
        checks.dedup();
        let assign = assign
            .into_iter()
            .map(|a| a.ok_or_else(|| Error::Internal("unassigned word of the next domain".into())))
            .collect::<Result<Vec<_>>>()?;
        Ok(StepPlan {
            next_domain,
            checks,
            assign,
        })
    }

    pub fn step(&self, ls: &LambdaSet) -> Result<LambdaSet> {
        let expected = self.domain(ls.level);
        if ls.domain != expected {
            return Err(Error::DomainMismatch(format!(
                "level {} domain differs from the post-critical suffixes",
                ls.level
            )));
        }
        let plan = self.plan(ls.level)?;
        Ok(self.apply(ls, &plan))
    }

    fn apply(&self, ls: &LambdaSet, plan: &StepPlan) -> LambdaSet {
        let k = self.machine.alphabet().len();
        let maps: Vec<&Vec<usize>> = ls.maps.iter().collect();
        let mut stage: Vec<Vec<(usize, usize, usize, usize, usize)>> = vec![Vec::new(); k];
        for &c in &plan.checks {
            stage[c.0.max(c.3)].push(c);
        }
        let table = &self.table;
        let ok = |chosen: &[&Vec<usize>], s: usize| {
            stage[s]
                .iter()
                .all(|&(a, p, l, b, q)| table[chosen[a][p]][l][chosen[b][q]])
        };
        let collect = |first: &Vec<usize>| -> BTreeSet<Vec<usize>> {
            let mut out = BTreeSet::new();
            let mut chosen: Vec<&Vec<usize>> = vec![first; k];
            if !ok(&chosen, 0) {
                return out;
            }
            fn rec<'m>(
                s: usize,
                k: usize,
                maps: &[&'m Vec<usize>],
                chosen: &mut Vec<&'m Vec<usize>>,
                ok: &dyn Fn(&[&Vec<usize>], usize) -> bool,
                plan: &StepPlan,
                out: &mut BTreeSet<Vec<usize>>,
            ) {
                if s == k {
                    out.insert(plan.assign.iter().map(|&(a, p)| chosen[a][p]).collect());
                    return;
                }
                for &m in maps {
                    chosen[s] = m;
                    if ok(chosen, s) {
                        rec(s + 1, k, maps, chosen, ok, plan, out);
                    }
                }
            }
            rec(1, k, &maps, &mut chosen, &ok, plan, &mut out);
            out
        };
        let result = maps
            .par_iter()
            .map(|m| collect(m))
            .reduce(BTreeSet::new, |mut a, b| {
                a.extend(b);
                a
            });
        LambdaSet {
            level: ls.level + 1,
            domain: plan.next_domain.clone(),
            maps: result,
        }
    }

    /// Index in the post-critical list of the word whose length-`n` tail is `domain[i]`.
    fn post_index(&self, n: usize) -> Vec<usize> {
        let dom = self.domain(n);
        dom.iter()
            .map(|d| self.post.iter().position(|p| p.tail(n) == *d).expect("tail of P"))
            .collect()
    }
}

/// One Λ step from level `n` to `n+1`.
pub fn lambda_step(
    ls: &LambdaSet,
    nuc: &Nucleus,
    post: &BTreeSet<PostCriticalWord>,
    ts: &Tileset,
) -> Result<LambdaSet> {
    LambdaContext::new(nuc, post, ts)?.step(ls)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub max_iter: usize,
    pub max_levels: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_iter: 10_000,
            max_levels: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Tileable,
    NotTileable,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Tileable => "tileable",
            Verdict::NotTileable => "not_tileable",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Edge at a singular ray whose restriction never becomes trivial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularEdge {
    pub tail: String,
    pub label: String,
    pub head: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularReport {
    pub ray: String,
    pub edges: Vec<SingularEdge>,
    /// First level of the cycle window where some map satisfies every edge.
    pub level: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Empty {
        level: usize,
    },
    Cycle {
        n0: usize,
        ell: usize,
        start: usize,
        end: usize,
        sizes: Vec<usize>,
        singular: Option<SingularReport>,
    },
    Cap {
        max_levels: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub verdict: Verdict,
    pub witness: Witness,
}

impl Decision {
    pub fn to_json(&self) -> Value {
        let witness = match &self.witness {
            Witness::Empty { level } => json!({"empty_level": level}),
            Witness::Cap { max_levels } => json!({"max_levels": max_levels}),
            Witness::Cycle {
                n0,
                ell,
                start,
                end,
                sizes,
                singular,
            } => {
                let mut w = json!({
                    "n0": n0, "ell": ell, "cycle_start": start, "cycle_end": end, "sizes": sizes,
                });
                if let Some(s) = singular {
                    w["singular"] = json!({
                        "ray": s.ray,
                        "edges": s.edges.iter().map(|e| json!([e.tail, e.label, e.head])).collect::<Vec<_>>(),
                        "level": s.level,
                    });
                }
                w
            }
        };
        json!({"verdict": self.verdict.as_str(), "witness": witness})
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

type Signature = Vec<(Vec<(usize, usize, usize, usize, usize)>, Vec<(usize, usize)>)>;

/// Decides tileability of the orbit graph of `ray` under the nucleus.
pub fn decide_pcf(t: &Transducer, ts: &Tileset, ray: &Ray, caps: Caps) -> Result<Decision> {
    let nuc = nucleus(t, caps.max_iter)?;
    if !is_bounded(&nuc)?.bounded {
        return Err(Error::NotBounded);
    }
    let post = post_critical_set(&nuc)?;
    let ctx = LambdaContext::new(&nuc, &post, ts)?;
    let ell = post.iter().fold(1, |a, p| a / gcd(a, p.period().len()) * p.period().len());
    let mut n0 = post.iter().map(|p| p.suffix().len()).max().unwrap_or(0) + ell;
    while suffix_sets(&post, n0).len() != post.len() {
        n0 += 1;
    }

    let mut plans: BTreeMap<usize, StepPlan> = BTreeMap::new();
    let mut plan_at = |n: usize, plans: &mut BTreeMap<usize, StepPlan>| -> Result<StepPlan> {
        if !plans.contains_key(&n) {
            plans.insert(n, ctx.plan(n)?);
        }
        Ok(plans[&n].clone())
    };
    let mut seen: HashMap<(Vec<Vec<usize>>, Signature), usize> = HashMap::new();
    let mut kept: BTreeMap<usize, LambdaSet> = BTreeMap::new();
    let mut ls = ctx.initial();
    let mut sizes = Vec::new();
    for n in 0..=caps.max_levels {
        sizes.push(ls.maps.len());
        if ls.maps.is_empty() {
            return Ok(Decision {
                verdict: Verdict::NotTileable,
                witness: Witness::Empty { level: n },
            });
        }
        if n >= n0 {
            kept.insert(n, ls.clone());
        }
        if n >= n0 && (n - n0) % ell == 0 {
            let key = cycle_key(&ctx, &ls, n, ell, &mut plans, &mut plan_at)?;
            if let Some(&m) = seen.get(&key) {
                let singular = singular_check(&ctx, &nuc, &post, ray, &kept, m, n)?;
                let failed = singular.as_ref().is_some_and(|s| s.level.is_none());
                return Ok(Decision {
                    verdict: if failed {
                        Verdict::NotTileable
                    } else {
                        Verdict::Tileable
                    },
                    witness: Witness::Cycle {
                        n0,
                        ell,
                        start: m,
                        end: n,
                        sizes,
                        singular,
                    },
                });
            }
            seen.insert(key, n);
        }
        if n == caps.max_levels {
            break;
        }
        let plan = plan_at(n, &mut plans)?;
        ls = ctx.apply(&ls, &plan);
        plans.remove(&n);
    }
    Ok(Decision {
        verdict: Verdict::Inconclusive,
        witness: Witness::Cap {
            max_levels: caps.max_levels,
        },
    })
}

fn cycle_key(
    ctx: &LambdaContext<'_>,
    ls: &LambdaSet,
    n: usize,
    ell: usize,
    plans: &mut BTreeMap<usize, StepPlan>,
    plan_at: &mut impl FnMut(usize, &mut BTreeMap<usize, StepPlan>) -> Result<StepPlan>,
) -> Result<(Vec<Vec<usize>>, Signature)> {
    let order = ctx.post_index(n);
    let reindex = |m: &Vec<usize>| {
        let mut v = vec![0; m.len()];
        for (i, &c) in m.iter().enumerate() {
            v[order[i]] = c;
        }
        v
    };
    let mut maps: Vec<Vec<usize>> = ls.maps.iter().map(reindex).collect();
    maps.sort();
    let mut sig = Vec::with_capacity(ell);
    for j in 0..ell {
        let plan = plan_at(n + j, plans)?;
        let a = ctx.post_index(n + j);
        let b = ctx.post_index(n + j + 1);
        let mut checks: Vec<_> = plan
            .checks
            .iter()
            .map(|&(s, p, l, t, q)| (s, a[p], l, t, a[q]))
            .collect();
        checks.sort_unstable();
        let mut assign = vec![(0, 0); plan.assign.len()];
        for (i, &(s, p)) in plan.assign.iter().enumerate() {
            assign[b[i]] = (s, a[p]);
        }
        sig.push((checks, assign));
    }
    Ok((maps, sig))
}

/// `None` for regular rays; otherwise the edges at the periodic representative and the
/// first cycle level where a single boundary map satisfies all of them.
fn singular_check(
    ctx: &LambdaContext<'_>,
    nuc: &Nucleus,
    post: &BTreeSet<PostCriticalWord>,
    ray: &Ray,
    kept: &BTreeMap<usize, LambdaSet>,
    start: usize,
    end: usize,
) -> Result<Option<SingularReport>> {
    let m = nuc.machine();
    let r = ray.period();
    let rotations: Vec<Word> = (0..r.len())
        .map(|i| {
            let mut w = r.to_vec();
            w.rotate_left(i);
            w
        })
        .collect();
    if !post.iter().any(|p| rotations.iter().any(|w| w == p.period())) {
        return Ok(None);
    }
    let k = ray.preperiod().len().div_ceil(r.len()) * r.len();
    let x0 = Ray::periodic(ray.prefix(k + r.len())[k..].to_vec())?;
    let steps = (m.num_states() + 1) * x0.period().len();
    let persistent = |g: &GroupElement, x: &Ray| -> Result<bool> {
        let mut cur = g.clone();
        for i in 0..steps {
            let (_, next) = m.act_letter(&cur, x.letter_at(i))?;
            if next.is_empty() {
                return Ok(false);
            }
            cur = next;
        }
        Ok(true)
    };
    let a = m.alphabet();
    // (tail ray, label state, head ray)
    let mut edges: Vec<(Ray, usize, Ray)> = Vec::new();
    for g in 0..m.num_states() {
        if g == m.identity_state() {
            continue;
        }
        let ge = GroupElement::state(g);
        if persistent(&ge, &x0)? {
            edges.push((x0.clone(), g, m.act_ray(&ge, &x0)?));
        }
        let y = m.act_ray(&GroupElement::inverse_state(g), &x0)?;
        if persistent(&ge, &y)? {
            edges.push((y, g, x0.clone()));
        }
    }
    edges.sort();
    edges.dedup();
    let mut level = None;
    for (&n, ls) in kept.range(start..end) {
        if n % x0.period().len() != 0 {
            continue;
        }
        let pos: HashMap<&Word, usize> = ls.domain.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let mut cons = Vec::new();
        let mut feasible = true;
        for (u, g, v) in &edges {
            match (pos.get(&u.prefix(n)), pos.get(&v.prefix(n))) {
                (Some(&i), Some(&j)) => cons.push((i, ctx.label_of[*g].expect("non-identity"), j)),
                _ => feasible = false,
            }
        }
        if feasible
            && ls
                .maps
                .iter()
                .any(|lam| cons.iter().all(|&(i, l, j)| ctx.table[lam[i]][l][lam[j]]))
        {
            level = Some(n);
            break;
        }
    }
    Ok(Some(SingularReport {
        ray: x0.render(a),
        edges: edges
            .iter()
            .map(|(u, g, v)| SingularEdge {
                tail: u.render(a),
                label: m.state_name(*g).to_string(),
                head: v.render(a),
            })
            .collect(),
        level,
    }))
}
