//! Letter-to-letter transducers, their action on finite words and eventually
//! periodic rays, and semantic equality of elements.
//!
//! A [`GroupElement`] is a word of signed states. The product `g*h` acts by
//! `h` first, then `g`, so restrictions compose as `(g*h)|v = g|h(v) * h|v`.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub type Letter = usize;
pub type Word = Vec<Letter>;

/// Default cap on explored configurations (and configuration pairs).
pub const DEFAULT_BISIM_CAP: usize = 1_000_000;

/// Ordered finite set of letter tokens.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    letters: Vec<String>,
    index: HashMap<String, Letter>,
}

impl Alphabet {
    pub fn new<I, S>(letters: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let letters: Vec<String> = letters.into_iter().map(Into::into).collect();
        if letters.is_empty() {
            return invalid("alphabet is empty");
        }
        let mut index = HashMap::new();
        for (i, l) in letters.iter().enumerate() {
            if l.is_empty() {
                return invalid("empty letter token");
            }
            if index.insert(l.clone(), i).is_some() {
                return invalid(format!("duplicate letter {l}"));
            }
        }
        Ok(Alphabet { letters, index })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn name(&self, l: Letter) -> &str {
        &self.letters[l]
    }

    pub fn letter(&self, tok: &str) -> Result<Letter> {
        self.index
            .get(tok)
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("unknown letter {tok}")))
    }

    pub fn parse_word<S: AsRef<str>>(&self, toks: &[S]) -> Result<Word> {
        toks.iter().map(|t| self.letter(t.as_ref())).collect()
    }

    fn single_char(&self) -> bool {
        self.letters.iter().all(|l| l.chars().count() == 1)
    }

    /// Compact rendering: concatenation for one-character letters, `.`-separated otherwise.
    pub fn render(&self, w: &[Letter]) -> String {
        let sep = if self.single_char() { "" } else { "." };
        w.iter().map(|&l| self.name(l)).collect::<Vec<_>>().join(sep)
    }

    /// Inverse of [`Alphabet::render`].
    pub fn parse_compact(&self, s: &str) -> Result<Word> {
        if s.is_empty() {
            return Ok(Vec::new());
        }
        if self.single_char() {
            s.chars().map(|c| self.letter(&c.to_string())).collect()
        } else {
            s.split('.').map(|t| self.letter(t)).collect()
        }
    }

    pub fn tokens(&self, w: &[Letter]) -> Vec<String> {
        w.iter().map(|&l| self.name(l).to_string()).collect()
    }

    /// All words of length `n`, in lexicographic order of letter indices.
    pub fn words(&self, n: usize) -> Vec<Word> {
        let k = self.len();
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            let mut next = Vec::with_capacity(out.len() * k);
            for w in &out {
                for l in 0..k {
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }
}

fn primitive_root(w: &[Letter]) -> Word {
    let n = w.len();
    for d in 1..=n {
        if n % d == 0 && (0..n).all(|i| w[i] == w[i % d]) {
            return w[..d].to_vec();
        }
    }
    w.to_vec()
}

/// Eventually periodic right-infinite word `preperiod · period^∞`, always canonical.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ray {
    preperiod: Word,
    period: Word,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RayJson {
    pub preperiod: Vec<String>,
    pub period: Vec<String>,
}

impl Ray {
    pub fn new(preperiod: Word, period: Word) -> Result<Self> {
        if period.is_empty() {
            return invalid("ray period is empty");
        }
        let mut period = primitive_root(&period);
        let mut pre = preperiod;
        while let Some(&last) = pre.last() {
            if last != *period.last().unwrap() {
                break;
            }
            pre.pop();
            period.rotate_right(1);
        }
        Ok(Ray { preperiod: pre, period })
    }

    pub fn periodic(period: Word) -> Result<Self> {
        Ray::new(Vec::new(), period)
    }

    pub fn preperiod(&self) -> &[Letter] {
        &self.preperiod
    }

    pub fn period(&self) -> &[Letter] {
        &self.period
    }

    pub fn letter_at(&self, i: usize) -> Letter {
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    pub fn prefix(&self, n: usize) -> Word {
        (0..n).map(|i| self.letter_at(i)).collect()
    }

    /// Drops the first `k` letters.
    pub fn shift(&self, k: usize) -> Ray {
        let pre: Word = if k <= self.preperiod.len() {
            self.preperiod[k..].to_vec()
        } else {
            Vec::new()
        };
        let mut period = self.period.clone();
        if k > self.preperiod.len() {
            let r = (k - self.preperiod.len()) % period.len();
            period.rotate_left(r);
        }
        Ray::new(pre, period).expect("non-empty period")
    }

    pub fn render(&self, a: &Alphabet) -> String {
        format!("{}({})", a.render(&self.preperiod), a.render(&self.period))
    }

    pub fn parse(a: &Alphabet, s: &str) -> Result<Self> {
        let open = s
            .find('(')
            .ok_or_else(|| Error::InvalidInput(format!("bad ray {s}")))?;
        if !s.ends_with(')') {
            return invalid(format!("bad ray {s}"));
        }
        let pre = a.parse_compact(&s[..open])?;
        let per = a.parse_compact(&s[open + 1..s.len() - 1])?;
        Ray::new(pre, per)
    }

    pub fn to_json(&self, a: &Alphabet) -> RayJson {
        RayJson {
            preperiod: a.tokens(&self.preperiod),
            period: a.tokens(&self.period),
        }
    }

    pub fn from_json(a: &Alphabet, j: &RayJson) -> Result<Self> {
        Ray::new(a.parse_word(&j.preperiod)?, a.parse_word(&j.period)?)
    }
}

/// Formal word of signed states; the empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    atoms: Vec<(usize, i8)>,
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement { atoms: Vec::new() }
    }

    pub fn state(s: usize) -> Self {
        GroupElement { atoms: vec![(s, 1)] }
    }

    pub fn inverse_state(s: usize) -> Self {
        GroupElement { atoms: vec![(s, -1)] }
    }

    pub fn from_atoms(atoms: Vec<(usize, i8)>) -> Self {
        GroupElement { atoms }
    }

    pub fn atoms(&self) -> &[(usize, i8)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        GroupElement { atoms }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            atoms: self.atoms.iter().rev().map(|&(s, e)| (s, -e)).collect(),
        }
    }

    /// Ordering used to pick representatives: shorter first, then positive signs first.
    pub fn rep_key(&self) -> (usize, Vec<(i8, usize)>) {
        (
            self.atoms.len(),
            self.atoms.iter().map(|&(s, e)| (-e, s)).collect(),
        )
    }
}

#[derive(Clone, Debug)]
pub struct State {
    pub name: String,
    pub invertible: bool,
    pub transitions: Vec<Option<(Letter, usize)>>,
}

/// Deterministic, possibly partial, letter-to-letter transducer.
#[derive(Clone, Debug)]
pub struct Transducer {
    alphabet: Alphabet,
    states: Vec<State>,
    index: HashMap<String, usize>,
    identity: usize,
    generators: Vec<usize>,
    inverse: Vec<Vec<Option<(Letter, usize)>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct StateJson {
    pub name: String,
    pub invertible: bool,
    pub transitions: BTreeMap<String, (String, String)>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TransducerJson {
    pub alphabet: Vec<String>,
    pub identity: String,
    pub states: Vec<StateJson>,
    pub generators: Vec<String>,
}

/// Row of a transition table: state name, invertible flag, `(input, output, next)` triples.
pub type TableRow<'a> = (&'a str, bool, &'a [(&'a str, &'a str, &'a str)]);

impl Transducer {
    pub fn new(
        alphabet: Alphabet,
        states: Vec<State>,
        identity: &str,
        generators: &[String],
    ) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if s.transitions.len() != alphabet.len() {
                return invalid(format!("state {} has a malformed transition row", s.name));
            }
            if index.insert(s.name.clone(), i).is_some() {
                return invalid(format!("duplicate state {}", s.name));
            }
        }
        for s in &states {
            for &(o, n) in s.transitions.iter().flatten() {
                if o >= alphabet.len() || n >= states.len() {
                    return invalid(format!("state {} has an out-of-range transition", s.name));
                }
            }
        }
        let identity = *index
            .get(identity)
            .ok_or_else(|| Error::InvalidInput(format!("unknown identity state {identity}")))?;
        let generators = generators
            .iter()
            .map(|g| {
                index
                    .get(g)
                    .copied()
                    .ok_or_else(|| Error::InvalidInput(format!("unknown generator {g}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let inverse = states
            .iter()
            .map(|s| {
                let mut inv = vec![None; alphabet.len()];
                if s.invertible {
                    for (l, t) in s.transitions.iter().enumerate() {
                        if let Some((o, n)) = *t {
                            if inv[o].is_none() {
                                inv[o] = Some((l, n));
                            }
                        }
                    }
                }
                inv
            })
            .collect();
        Ok(Transducer {
            alphabet,
            states,
            index,
            identity,
            generators,
            inverse,
        })
    }

    /// Builds a machine from a compact table; missing `(state, letter)` pairs are undefined.
    pub fn from_table(
        alphabet: &[&str],
        identity: &str,
        rows: &[TableRow<'_>],
        generators: &[&str],
    ) -> Result<Self> {
        let json = TransducerJson {
            alphabet: alphabet.iter().map(|s| s.to_string()).collect(),
            identity: identity.to_string(),
            states: rows
                .iter()
                .map(|(name, inv, trs)| StateJson {
                    name: name.to_string(),
                    invertible: *inv,
                    transitions: trs
                        .iter()
                        .map(|(i, o, n)| (i.to_string(), (o.to_string(), n.to_string())))
                        .collect(),
                })
                .collect(),
            generators: generators.iter().map(|s| s.to_string()).collect(),
        };
        Transducer::from_json(&json)
    }

    pub fn from_json(j: &TransducerJson) -> Result<Self> {
        let alphabet = Alphabet::new(j.alphabet.iter().cloned())?;
        let names: HashMap<&str, usize> = j
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.name.as_str(), i))
            .collect();
        let mut states = Vec::with_capacity(j.states.len());
        for s in &j.states {
            let mut tr = vec![None; alphabet.len()];
            for (inp, (out, next)) in &s.transitions {
                let i = alphabet.letter(inp)?;
                let o = alphabet.letter(out)?;
                let n = *names.get(next.as_str()).ok_or_else(|| {
                    Error::InvalidInput(format!("state {} targets unknown state {next}", s.name))
                })?;
                tr[i] = Some((o, n));
            }
            states.push(State {
                name: s.name.clone(),
                invertible: s.invertible,
                transitions: tr,
            });
        }
        Transducer::new(alphabet, states, &j.identity, &j.generators)
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let j: TransducerJson =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
        Transducer::from_json(&j)
    }

    pub fn to_json(&self) -> TransducerJson {
        TransducerJson {
            alphabet: self.alphabet.letters().to_vec(),
            identity: self.states[self.identity].name.clone(),
            states: self
                .states
                .iter()
                .map(|s| StateJson {
                    name: s.name.clone(),
                    invertible: s.invertible,
                    transitions: s
                        .transitions
                        .iter()
                        .enumerate()
                        .filter_map(|(l, t)| {
                            t.map(|(o, n)| {
                                (
                                    self.alphabet.name(l).to_string(),
                                    (
                                        self.alphabet.name(o).to_string(),
                                        self.states[n].name.clone(),
                                    ),
                                )
                            })
                        })
                        .collect(),
                })
                .collect(),
            generators: self
                .generators
                .iter()
                .map(|&g| self.states[g].name.clone())
                .collect(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.states[s].name
    }

    pub fn state_index(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("unknown state {name}")))
    }

    pub fn identity_state(&self) -> usize {
        self.identity
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn transition(&self, s: usize, l: Letter) -> Option<(Letter, usize)> {
        self.states[s].transitions[l]
    }

    pub fn is_total(&self) -> bool {
        self.states
            .iter()
            .all(|s| s.transitions.iter().all(Option::is_some))
    }

    /// Diagnostics for every violated invariant; empty when the machine is well formed.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let id = &self.states[self.identity];
        for l in 0..self.alphabet.len() {
            if id.transitions[l] != Some((l, self.identity)) {
                out.push(format!(
                    "identity state {} does not fix letter {} with identity restriction",
                    id.name,
                    self.alphabet.name(l)
                ));
            }
        }
        for s in &self.states {
            if !s.invertible {
                continue;
            }
            let mut seen: HashMap<Letter, Letter> = HashMap::new();
            for (l, t) in s.transitions.iter().enumerate() {
                if let Some((o, _)) = *t {
                    if let Some(&prev) = seen.get(&o) {
                        out.push(format!(
                            "invertible state {} maps letters {} and {} to {}",
                            s.name,
                            self.alphabet.name(prev),
                            self.alphabet.name(l),
                            self.alphabet.name(o)
                        ));
                    } else {
                        seen.insert(o, l);
                    }
                }
            }
        }
        out
    }

    /// Removes identity factors and cancels adjacent inverse pairs.
    pub fn normalize(&self, g: &GroupElement) -> GroupElement {
        let mut out: Vec<(usize, i8)> = Vec::with_capacity(g.len());
        for &(s, e) in g.atoms() {
            if s == self.identity {
                continue;
            }
            if let Some(&(ps, pe)) = out.last() {
                if ps == s && pe == -e {
                    out.pop();
                    continue;
                }
            }
            out.push((s, e));
        }
        GroupElement::from_atoms(out)
    }

    pub fn element(&self, name: &str) -> Result<GroupElement> {
        Ok(GroupElement::state(self.state_index(name)?))
    }

    /// Parses `1`, `a`, `a^-1`, or `*`-separated products of those.
    pub fn parse_element(&self, text: &str) -> Result<GroupElement> {
        let text = text.trim();
        if text.is_empty() || text == "1" {
            return Ok(GroupElement::identity());
        }
        let mut atoms = Vec::new();
        for tok in text.split('*').map(str::trim) {
            if let Some(idx) = self.index.get(tok) {
                atoms.push((*idx, 1));
            } else if let Some(base) = tok.strip_suffix("^-1") {
                atoms.push((self.state_index(base)?, -1));
            } else {
                return invalid(format!("unknown element {tok}"));
            }
        }
        Ok(GroupElement::from_atoms(atoms))
    }

    pub fn render_element(&self, g: &GroupElement) -> String {
        if g.is_empty() {
            return "1".to_string();
        }
        g.atoms()
            .iter()
            .map(|&(s, e)| {
                if e > 0 {
                    self.states[s].name.clone()
                } else {
                    format!("{}^-1", self.states[s].name)
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }

    fn atom_step(&self, (s, e): (usize, i8), l: Letter) -> Result<Option<(Letter, usize)>> {
        if e > 0 {
            Ok(self.states[s].transitions[l])
        } else {
            if !self.states[s].invertible {
                return Err(Error::NotInvertible(self.states[s].name.clone()));
            }
            Ok(self.inverse[s][l])
        }
    }

    fn undefined(&self, (s, e): (usize, i8), l: Letter) -> Error {
        let name = if e > 0 {
            self.states[s].name.clone()
        } else {
            format!("{}^-1", self.states[s].name)
        };
        Error::UndefinedTransition {
            state: name,
            letter: self.alphabet.name(l).to_string(),
        }
    }

    /// One letter of action; `Ok(None)` when the partial map has a hole.
    fn try_act_letter(&self, g: &GroupElement, l: Letter) -> Result<Option<(Letter, GroupElement)>> {
        let mut cur = l;
        let mut restr = vec![(0usize, 0i8); g.len()];
        for (i, &(s, e)) in g.atoms().iter().enumerate().rev() {
            match self.atom_step((s, e), cur)? {
                Some((o, n)) => {
                    cur = o;
                    restr[i] = (n, e);
                }
                None => return Ok(None),
            }
        }
        Ok(Some((cur, self.normalize(&GroupElement::from_atoms(restr)))))
    }

    pub fn act_letter(&self, g: &GroupElement, l: Letter) -> Result<(Letter, GroupElement)> {
        let mut cur = l;
        let mut restr = vec![(0usize, 0i8); g.len()];
        for (i, &(s, e)) in g.atoms().iter().enumerate().rev() {
            match self.atom_step((s, e), cur)? {
                Some((o, n)) => {
                    cur = o;
                    restr[i] = (n, e);
                }
                None => return Err(self.undefined((s, e), cur)),
            }
        }
        Ok((cur, self.normalize(&GroupElement::from_atoms(restr))))
    }

    /// Returns `(g(w), g|w)`.
    pub fn act_word(&self, g: &GroupElement, w: &[Letter]) -> Result<(Word, GroupElement)> {
        let mut cur = self.normalize(g);
        let mut out = Vec::with_capacity(w.len());
        for &l in w {
            let (o, next) = self.act_letter(&cur, l)?;
            out.push(o);
            cur = next;
        }
        Ok((out, cur))
    }

    pub fn act_ray(&self, g: &GroupElement, r: &Ray) -> Result<Ray> {
        self.act_ray_capped(g, r, DEFAULT_BISIM_CAP).map(|(ray, _)| ray)
    }

    /// Image ray by lasso detection on the configuration at period phase 0.
    /// Also returns whether the restriction along the ray is eventually trivial.
    pub fn act_ray_capped(&self, g: &GroupElement, r: &Ray, cap: usize) -> Result<(Ray, bool)> {
        let (pre_out, mut cur) = self.act_word(g, r.preperiod())?;
        let mut seen: HashMap<GroupElement, usize> = HashMap::new();
        let mut outs: Vec<Word> = Vec::new();
        loop {
            if let Some(&i) = seen.get(&cur) {
                let mut pre = pre_out;
                for o in &outs[..i] {
                    pre.extend_from_slice(o);
                }
                let period: Word = outs[i..].concat();
                return Ok((Ray::new(pre, period)?, cur.is_empty()));
            }
            if outs.len() >= cap {
                return Err(Error::NonPeriodicResidual(cap));
            }
            seen.insert(cur.clone(), outs.len());
            let (o, next) = self.act_word(&cur, r.period())?;
            outs.push(o);
            cur = next;
        }
    }

    /// Semantic equality by breadth-first bisimulation over configuration pairs.
    pub fn state_equal(&self, g: &GroupElement, h: &GroupElement) -> Result<bool> {
        self.state_equal_capped(g, h, DEFAULT_BISIM_CAP)
    }

    pub fn state_equal_capped(&self, g: &GroupElement, h: &GroupElement, cap: usize) -> Result<bool> {
        let start = (self.normalize(g), self.normalize(h));
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(start.clone());
        queue.push_back(start);
        while let Some((a, b)) = queue.pop_front() {
            if a == b {
                continue;
            }
            for l in 0..self.alphabet.len() {
                let (oa, ra) = self.act_letter(&a, l)?;
                let (ob, rb) = self.act_letter(&b, l)?;
                if oa != ob {
                    return Ok(false);
                }
                let pair = (ra, rb);
                if !seen.contains(&pair) {
                    if seen.len() >= cap {
                        return Err(Error::CapExceeded(cap));
                    }
                    seen.insert(pair.clone());
                    queue.push_back(pair);
                }
            }
        }
        Ok(true)
    }

    /// True when `g` acts as the identity wherever it is applied (total identity).
    pub fn is_trivial(&self, g: &GroupElement) -> Result<bool> {
        let start = self.normalize(g);
        if start.is_empty() {
            return Ok(true);
        }
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(start.clone());
        queue.push_back(start);
        while let Some(c) = queue.pop_front() {
            for l in 0..self.alphabet.len() {
                match self.try_act_letter(&c, l)? {
                    Some((o, r)) if o == l => {
                        if !r.is_empty() && !seen.contains(&r) {
                            if seen.len() >= DEFAULT_BISIM_CAP {
                                return Err(Error::CapExceeded(DEFAULT_BISIM_CAP));
                            }
                            seen.insert(r.clone());
                            queue.push_back(r);
                        }
                    }
                    _ => return Ok(false),
                }
            }
        }
        Ok(true)
    }

    /// Extends the machine with a formal inverse `s^-1` for every invertible non-identity state.
    pub fn inverse(&self) -> Result<Transducer> {
        for &g in &self.generators {
            if g != self.identity && !self.states[g].invertible {
                return Err(Error::NotInvertible(self.states[g].name.clone()));
            }
        }
        let mut states = self.states.clone();
        let mut inv_index: HashMap<usize, usize> = HashMap::new();
        for (i, s) in self.states.iter().enumerate() {
            if i == self.identity || !s.invertible {
                continue;
            }
            let name = format!("{}^-1", s.name);
            if self.index.contains_key(&name) {
                return invalid(format!("state name {name} already in use"));
            }
            inv_index.insert(i, states.len());
            states.push(State {
                name,
                invertible: true,
                transitions: vec![None; self.alphabet.len()],
            });
        }
        for (&i, &j) in &inv_index {
            for o in 0..self.alphabet.len() {
                if let Some((l, n)) = self.inverse[i][o] {
                    let target = if n == self.identity {
                        self.identity
                    } else {
                        *inv_index
                            .get(&n)
                            .ok_or_else(|| Error::NotInvertible(self.states[n].name.clone()))?
                    };
                    states[j].transitions[o] = Some((l, target));
                }
            }
        }
        let mut gens: Vec<String> = self
            .generators
            .iter()
            .map(|&g| self.states[g].name.clone())
            .collect();
        for &g in &self.generators {
            if let Some(&j) = inv_index.get(&g) {
                gens.push(states[j].name.clone());
            }
        }
        Transducer::new(
            self.alphabet.clone(),
            states,
            &self.states[self.identity].name,
            &gens,
        )
    }

    /// Explores all configurations reachable from `seeds` and classifies them semantically.
    pub fn section_graph(&self, seeds: &[GroupElement], cap: usize) -> Result<SectionGraph> {
        let k = self.alphabet.len();
        let mut ids: HashMap<GroupElement, usize> = HashMap::new();
        let mut configs: Vec<GroupElement> = Vec::new();
        let mut seed_ids = Vec::with_capacity(seeds.len());
        let mut queue = VecDeque::new();
        for s in seeds {
            let n = self.normalize(s);
            let id = match ids.get(&n) {
                Some(&id) => id,
                None => {
                    let id = configs.len();
                    ids.insert(n.clone(), id);
                    configs.push(n);
                    queue.push_back(id);
                    id
                }
            };
            seed_ids.push(id);
        }
        let mut trans: Vec<Vec<Option<(Letter, usize)>>> = Vec::new();
        while let Some(id) = queue.pop_front() {
            if trans.len() <= id {
                trans.resize(id + 1, Vec::new());
            }
            let c = configs[id].clone();
            let mut row = Vec::with_capacity(k);
            for l in 0..k {
                match self.try_act_letter(&c, l)? {
                    Some((o, r)) => {
                        let nid = match ids.get(&r) {
                            Some(&nid) => nid,
                            None => {
                                if configs.len() >= cap {
                                    return Err(Error::CapExceeded(cap));
                                }
                                let nid = configs.len();
                                ids.insert(r.clone(), nid);
                                configs.push(r);
                                queue.push_back(nid);
                                nid
                            }
                        };
                        row.push(Some((o, nid)));
                    }
                    None => row.push(None),
                }
            }
            trans[id] = row;
        }
        trans.resize(configs.len(), Vec::new());
        let block = moore_partition(&trans, k);
        let nblocks = block.iter().copied().max().map_or(0, |m| m + 1);
        Ok(SectionGraph {
            configs,
            trans,
            block,
            nblocks,
            seeds: seed_ids,
        })
    }

    /// Canonical key of the semantic class of `g`.
    pub fn canonical_key(&self, g: &GroupElement) -> Result<ElementKey> {
        let sg = self.section_graph(std::slice::from_ref(g), DEFAULT_BISIM_CAP)?;
        Ok(sg.key(sg.seeds[0]))
    }
}

/// Moore-style refinement: configurations equivalent iff they have equal behaviour.
fn moore_partition(trans: &[Vec<Option<(Letter, usize)>>], k: usize) -> Vec<usize> {
    let n = trans.len();
    let mut block = vec![0usize; n];
    let mut count = 0usize;
    loop {
        let mut sigs: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut next = vec![0usize; n];
        for (i, row) in trans.iter().enumerate() {
            let mut sig = Vec::with_capacity(2 * k + 1);
            sig.push(block[i] as i64);
            for t in row {
                match t {
                    Some((o, j)) => {
                        sig.push(*o as i64);
                        sig.push(block[*j] as i64);
                    }
                    None => {
                        sig.push(-1);
                        sig.push(-1);
                    }
                }
            }
            let len = sigs.len();
            next[i] = *sigs.entry(sig).or_insert(len);
        }
        let new_count = sigs.len();
        block = next;
        if new_count == count {
            return block;
        }
        count = new_count;
    }
}

/// Canonical serialization of a minimal machine, BFS-numbered from its initial class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementKey(pub Vec<u32>);

/// Reachable configurations with their semantic classes.
#[derive(Clone, Debug)]
pub struct SectionGraph {
    pub configs: Vec<GroupElement>,
    pub trans: Vec<Vec<Option<(Letter, usize)>>>,
    pub block: Vec<usize>,
    pub nblocks: usize,
    pub seeds: Vec<usize>,
}

impl SectionGraph {
    /// Quotient transition table indexed by block.
    pub fn block_table(&self) -> Vec<Vec<Option<(Letter, usize)>>> {
        let mut table = vec![Vec::new(); self.nblocks];
        for (i, row) in self.trans.iter().enumerate() {
            let b = self.block[i];
            if table[b].is_empty() {
                table[b] = row
                    .iter()
                    .map(|t| t.map(|(o, j)| (o, self.block[j])))
                    .collect();
            }
        }
        table
    }

    pub fn key(&self, config: usize) -> ElementKey {
        key_from_table(&self.block_table(), self.block[config])
    }
}

pub(crate) fn key_from_table(table: &[Vec<Option<(Letter, usize)>>], start: usize) -> ElementKey {
    let mut num: HashMap<usize, u32> = HashMap::new();
    let mut order = vec![start];
    num.insert(start, 0);
    let mut i = 0;
    while i < order.len() {
        let b = order[i];
        for &(_, j) in table[b].iter().flatten() {
            if !num.contains_key(&j) {
                num.insert(j, order.len() as u32);
                order.push(j);
            }
        }
        i += 1;
    }
    let mut out = Vec::new();
    for b in order {
        for t in &table[b] {
            match t {
                Some((o, j)) => {
                    out.push(*o as u32);
                    out.push(num[j]);
                }
                None => {
                    out.push(u32::MAX);
                    out.push(u32::MAX);
                }
            }
        }
    }
    ElementKey(out)
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

    fn hanoi() -> Transducer {
        Transducer::from_table(
            &["0", "1", "2"],
            "e",
            &[
                ("a", true, &[("0", "1", "e"), ("1", "0", "e"), ("2", "2", "a")]),
                ("b", true, &[("0", "2", "e"), ("2", "0", "e"), ("1", "1", "b")]),
                ("c", true, &[("1", "2", "e"), ("2", "1", "e"), ("0", "0", "c")]),
                ("e", true, &[("0", "0", "e"), ("1", "1", "e"), ("2", "2", "e")]),
            ],
            &["a", "b", "c"],
        )
        .unwrap()
    }

    #[test]
    fn ray_canonical_form() {
        let r = Ray::new(vec![1, 0, 1], vec![0, 1, 0, 1]).unwrap();
        assert_eq!(r.preperiod(), &[] as &[usize]);
        assert_eq!(r.period(), &[1, 0]);
        let s = Ray::new(vec![0, 0], vec![0]).unwrap();
        assert_eq!(s, Ray::periodic(vec![0]).unwrap());
        assert!(Ray::new(vec![1], vec![]).is_err());
    }

    #[test]
    fn ray_shift_and_prefix() {
        let r = Ray::new(vec![1], vec![0, 1]).unwrap();
        assert_eq!(r.prefix(5), vec![1, 0, 1, 0, 1]);
        assert_eq!(r.shift(2), Ray::periodic(vec![1, 0]).unwrap());
    }

    #[test]
    fn odometer_adds_one() {
        let t = odometer();
        let g = t.element("t").unwrap();
        let (w, r) = t.act_word(&g, &[1, 1, 0]).unwrap();
        assert_eq!(w, vec![0, 0, 1]);
        assert!(r.is_empty());
        let ray = t.act_ray(&g, &Ray::periodic(vec![1]).unwrap()).unwrap();
        assert_eq!(ray, Ray::periodic(vec![0]).unwrap());
    }

    #[test]
    fn identity_acts_trivially() {
        let t = hanoi();
        let (w, r) = t.act_word(&GroupElement::identity(), &[2, 0, 1]).unwrap();
        assert_eq!(w, vec![2, 0, 1]);
        assert!(r.is_empty());
    }

    #[test]
    fn hanoi_swaps_first_letter() {
        let t = hanoi();
        let a = t.element("a").unwrap();
        let (w, r) = t.act_word(&a, &[0, 1, 2]).unwrap();
        assert_eq!(w, vec![1, 1, 2]);
        assert!(r.is_empty());
    }

    #[test]
    fn validate_reports_violations() {
        assert!(odometer().validate().is_empty());
        let bad_id = Transducer::from_table(
            &["0", "1"],
            "e",
            &[("e", true, &[("0", "1", "e"), ("1", "1", "e")])],
            &[],
        )
        .unwrap();
        assert_eq!(bad_id.validate().len(), 2);
        let bad_inv = Transducer::from_table(
            &["0", "1"],
            "e",
            &[
                ("s", true, &[("0", "0", "e"), ("1", "0", "e")]),
                ("e", true, &[("0", "0", "e"), ("1", "1", "e")]),
            ],
            &["s"],
        )
        .unwrap();
        assert_eq!(bad_inv.validate().len(), 1);
    }

    #[test]
    fn equality_by_bisimulation() {
        let t = hanoi();
        let a = t.element("a").unwrap();
        assert!(t.state_equal(&a.mul(&a), &GroupElement::identity()).unwrap());
        let o = odometer();
        let tt = o.element("t").unwrap();
        assert!(o.state_equal(&tt.mul(&tt.inverse()), &GroupElement::identity()).unwrap());
        assert!(!o.state_equal(&tt, &GroupElement::identity()).unwrap());
    }

    #[test]
    fn inverse_machine_rows() {
        let o = odometer().inverse().unwrap();
        let ti = o.state_index("t^-1").unwrap();
        assert_eq!(o.transition(ti, 0), Some((1, ti)));
        assert_eq!(o.transition(ti, 1), Some((0, o.identity_state())));
        let h = hanoi().inverse().unwrap();
        let a = h.element("a").unwrap();
        let ai = h.element("a^-1").unwrap();
        assert!(h.state_equal(&a, &ai).unwrap());
    }

    #[test]
    fn canonical_keys_match_semantics() {
        let t = hanoi();
        let a = t.element("a").unwrap();
        let b = t.element("b").unwrap();
        assert_eq!(
            t.canonical_key(&a.mul(&b).mul(&b)).unwrap(),
            t.canonical_key(&a).unwrap()
        );
        assert_ne!(t.canonical_key(&a).unwrap(), t.canonical_key(&b).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let t = hanoi();
        let j = t.to_json();
        let back = Transducer::from_json(&j).unwrap();
        assert_eq!(back.to_json(), j);
    }
}
