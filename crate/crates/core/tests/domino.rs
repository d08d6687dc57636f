use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use selfsim::domino::{compile_patterns, pattern_valid, Caps, Csp, LambdaContext, Verdict, Witness};
use selfsim::gallery::machines::{hanoi, longrange, odometer};
use selfsim::schreier::word_id;
use selfsim::{
    ball_around_ray, build_graph, check_coloring, decide_pcf, enumerate_solutions, local_mark_tileset, nucleus,
    post_critical_set, solve_finite, wang_to_tileset, GraphKind, LabelledGraph, PatternSet, Ray, Tileset,
    Transducer,
};
use serde_json::json;

fn tileset(k: usize, labels: &[String], triples: &BTreeSet<(usize, usize, usize)>) -> Tileset {
    Tileset {
        colors: (0..k).map(|i| format!("b{i}")).collect(),
        labels: labels.to_vec(),
        triples: triples.clone(),
        seed: None,
    }
}

/// All `k^n` colourings, checked edge by edge.
fn brute_colourings(g: &LabelledGraph, ts: &Tileset) -> BTreeSet<Vec<usize>> {
    let n = g.num_vertices();
    let k = ts.num_colors();
    let mut out = BTreeSet::new();
    let mut c = vec![0usize; n];
    loop {
        if g.edges.iter().all(|&(a, l, b)| {
            let li = ts.label_index(&g.labels[l]).unwrap();
            ts.triples.contains(&(c[a], li, c[b]))
        }) {
            out.insert(c.clone());
        }
        let mut i = 0;
        while i < n {
            c[i] += 1;
            if c[i] < k {
                break;
            }
            c[i] = 0;
            i += 1;
        }
        if i == n {
            return out;
        }
    }
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, labels: &[String], m: usize) -> LabelledGraph {
    let vs: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut es = BTreeSet::new();
    for _ in 0..m {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let l = rng.gen_range(0..labels.len());
        es.insert((vs[a].clone(), labels[l].clone(), vs[b].clone()));
    }
    let es: Vec<_> = es.into_iter().collect();
    LabelledGraph::from_named(vs.clone(), labels.iter().cloned(), &es, None).unwrap()
}

fn random_triples(rng: &mut ChaCha8Rng, k: usize, nl: usize, p: f64) -> BTreeSet<(usize, usize, usize)> {
    let mut t = BTreeSet::new();
    for a in 0..k {
        for l in 0..nl {
            for b in 0..k {
                if rng.gen_bool(p) {
                    t.insert((a, l, b));
                }
            }
        }
    }
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solver_matches_brute_force(seed in any::<u64>(), n in 1usize..7, k in 1usize..4, m in 0usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let labels = vec!["a".to_string(), "b".to_string()];
        let g = random_graph(&mut rng, n, &labels, m);
        let ts = tileset(k, &labels, &random_triples(&mut rng, k, 2, 0.6));
        let brute = brute_colourings(&g, &ts);
        let all: BTreeSet<Vec<usize>> = enumerate_solutions(&g, &ts, &BTreeMap::new(), usize::MAX).unwrap().into_iter().collect();
        prop_assert_eq!(&all, &brute);
        let first = solve_finite(&g, &ts, &BTreeMap::new()).unwrap();
        prop_assert_eq!(first.is_some(), !brute.is_empty());
        if let Some(c) = first {
            prop_assert!(check_coloring(&g, &ts, &c).unwrap());
        }
        // Pins restrict to the matching solutions.
        let pins: BTreeMap<usize, usize> = [(0, rng.gen_range(0..k))].into_iter().collect();
        let pinned = enumerate_solutions(&g, &ts, &pins, usize::MAX).unwrap();
        prop_assert_eq!(pinned.len(), brute.iter().filter(|c| c[0] == pins[&0]).count());
    }
}

fn nucleus_labels(t: &Transducer) -> (selfsim::Nucleus, Vec<String>) {
    let nuc = nucleus(t, 10_000).unwrap();
    let names = nuc.names().into_iter().skip(1).collect();
    (nuc, names)
}

/// Compares Λ_n with pinned solves on the level-`n` tile graph of the nucleus, for `n ≤ max_n`.
fn lambda_agrees(t: &Transducer, ts: &Tileset, max_n: usize) -> bool {
    let (nuc, names) = nucleus_labels(t);
    let p = post_critical_set(&nuc).unwrap();
    let ctx = LambdaContext::new(&nuc, &p, ts).unwrap();
    let a = nuc.machine().alphabet();
    let k = ts.num_colors();
    let mut ls = ctx.initial();
    for n in 0..=max_n {
        let g = build_graph(nuc.machine(), &names, n, GraphKind::Tile).unwrap();
        let csp = Csp::new(&g, ts).unwrap();
        let dom: Vec<usize> = ls.domain.iter().map(|w| g.vertex_index(&word_id(a, w)).unwrap()).collect();
        let mut oracle = BTreeSet::new();
        for code in 0..k.pow(dom.len() as u32) {
            let mut x = code;
            let map: Vec<usize> = (0..dom.len())
                .map(|_| {
                    let c = x % k;
                    x /= k;
                    c
                })
                .collect();
            let mut pins = BTreeMap::new();
            let mut clash = false;
            for (&v, &c) in dom.iter().zip(&map) {
                if pins.insert(v, c).is_some_and(|old| old != c) {
                    clash = true;
                }
            }
            if !clash && csp.solve(&pins).unwrap().is_some() {
                oracle.insert(map);
            }
        }
        if oracle != ls.maps {
            return false;
        }
        ls = ctx.step(&ls).unwrap();
    }
    true
}

#[test]
fn lambda_matches_oracle_small_tilesets() {
    for t in [odometer().unwrap(), hanoi().unwrap()] {
        let (_, names) = nucleus_labels(&t);
        let nl = names.len();
        let slots = 4 * nl;
        let mut checked = 0;
        for mask in 0u32..(1 << slots) {
            // A deterministic sample of the two-colour tilesets.
            if mask % 37 != 0 {
                continue;
            }
            let triples: BTreeSet<(usize, usize, usize)> = (0..slots)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| (i / (2 * nl), (i / 2) % nl, i % 2))
                .collect();
            assert!(lambda_agrees(&t, &tileset(2, &names, &triples), 3), "mask {mask}");
            checked += 1;
        }
        assert!(checked > 0);
    }
}

#[test]
fn lambda_matches_oracle_random_three_colours() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for t in [odometer().unwrap(), hanoi().unwrap()] {
        let (_, names) = nucleus_labels(&t);
        for _ in 0..6 {
            let ts = tileset(3, &names, &random_triples(&mut rng, 3, names.len(), 0.55));
            assert!(lambda_agrees(&t, &ts, 3));
        }
    }
}

fn proper(k: usize, labels: &[&str]) -> Tileset {
    Tileset::proper_coloring(k, labels)
}

#[test]
fn hanoi_colourings() {
    let t = hanoi().unwrap();
    let three = proper(3, &["a", "b", "c"]);
    let two = proper(2, &["a", "b", "c"]);
    let regular = Ray::periodic(vec![0, 1]).unwrap();
    let d = decide_pcf(&t, &three, &regular, Caps::default()).unwrap();
    assert_eq!(d.verdict, Verdict::Tileable);
    let d = decide_pcf(&t, &two, &regular, Caps::default()).unwrap();
    assert_eq!(d.verdict, Verdict::NotTileable);
    assert_eq!(d.to_json()["witness"]["empty_level"], json!(1));
}

#[test]
fn hanoi_singular_ray_has_a_loop() {
    // 0^∞ carries a c-loop, so a proper colouring cannot exist there.
    let t = hanoi().unwrap();
    let d = decide_pcf(&t, &proper(3, &["a", "b", "c"]), &Ray::periodic(vec![0]).unwrap(), Caps::default())
        .unwrap();
    assert_eq!(d.verdict, Verdict::NotTileable);
    assert!(d.to_json()["witness"]["singular"].is_object());
}

#[test]
fn odometer_singular_ray() {
    let t = odometer().unwrap();
    let ts = proper(2, &["t", "t^-1"]);
    let d = decide_pcf(&t, &ts, &Ray::periodic(vec![0]).unwrap(), Caps::default()).unwrap();
    assert_eq!(d.verdict, Verdict::Tileable);
    let w = d.to_json();
    assert!(w["witness"]["singular"].is_object(), "{w}");
    assert!(matches!(d.witness, Witness::Cycle { .. }));
}

#[test]
fn decide_rejects_unbounded() {
    let t = longrange().unwrap();
    let ts = proper(2, &["t", "u"]);
    let caps = Caps {
        max_iter: 50,
        max_levels: 8,
    };
    assert!(decide_pcf(&t, &ts, &Ray::periodic(vec![0]).unwrap(), caps).is_err());
}

#[test]
fn localmark_marks_loops() {
    let t = hanoi().unwrap();
    let g = build_graph(&t, &[], 3, GraphKind::Full).unwrap();
    let (ts, marked) = local_mark_tileset("a", &["b", "c"]);
    let sols = enumerate_solutions(&g, &ts, &BTreeMap::new(), 500).unwrap();
    assert!(!sols.is_empty());
    let loops: Vec<usize> = g.loops().filter(|e| g.labels[e.1] == "a").map(|e| e.0).collect();
    assert!(!loops.is_empty());
    for s in &sols {
        for &v in &loops {
            assert!(marked.contains(&s[v]));
        }
    }
    // On the long range graph the origin is the only u-loop.
    let lr = longrange().unwrap();
    let ball = ball_around_ray(&lr, &[], &Ray::periodic(vec![0]).unwrap(), 6).unwrap();
    let (ts, marked) = local_mark_tileset("u", &["t"]);
    let origin = ball.root.unwrap();
    let sols = enumerate_solutions(&ball, &ts, &BTreeMap::new(), 200).unwrap();
    assert!(!sols.is_empty());
    assert!(sols.iter().all(|s| marked.contains(&s[origin])));
}

#[test]
fn wang_grid() {
    use selfsim::domino::WangTile;
    let tiles = vec![WangTile::new("a", "x", "b", "y"), WangTile::new("b", "y", "a", "x")];
    let ts = wang_to_tileset(&tiles).unwrap();
    // 2×2 torus: alternating tiles is the only shape.
    let name = |x: usize, y: usize| format!("{x}{y}");
    let mut es = Vec::new();
    for x in 0..2 {
        for y in 0..2 {
            es.push((name(x, y), "(1,0)".to_string(), name((x + 1) % 2, y)));
            es.push((name(x, y), "(0,1)".to_string(), name(x, (y + 1) % 2)));
        }
    }
    let vs: Vec<String> = (0..4).map(|i| name(i / 2, i % 2)).collect();
    let g = LabelledGraph::from_named(vs, std::iter::empty(), &es, None).unwrap();
    let sols = enumerate_solutions(&g, &ts, &BTreeMap::new(), 10).unwrap();
    assert_eq!(sols.len(), 2);
    for s in sols {
        assert_ne!(s[0], s[1]);
        assert_ne!(s[0], s[2]);
        assert_eq!(s[0], s[3]);
    }
}

// Pattern compiler.

type Cells = Vec<Vec<(usize, usize)>>;

/// Pattern occurrences grouped by their largest vertex, so a DFS can check each once.
fn occurrences(g: &LabelledGraph, ps: &PatternSet) -> Cells {
    let n = g.num_vertices();
    let mut fwd = vec![vec![None; n]; ps.labels.len()];
    let mut bwd = fwd.clone();
    for &(a, l, b) in &g.edges {
        let li = ps.labels.iter().position(|x| *x == g.labels[l]).unwrap();
        fwd[li][a] = Some(b);
        bwd[li][b] = Some(a);
    }
    let mut by_max: Cells = vec![Vec::new(); n];
    let mut cells_of: Vec<Vec<Vec<(usize, usize)>>> = vec![Vec::new(); n];
    for v in 0..n {
        'pat: for p in &ps.patterns {
            let mut cells = Vec::new();
            for (w, &c) in p {
                let mut x = v;
                for &(l, e) in w.iter().rev() {
                    match if e > 0 { fwd[l][x] } else { bwd[l][x] } {
                        Some(y) => x = y,
                        None => continue 'pat,
                    }
                }
                cells.push((x, c));
            }
            let top = cells.iter().map(|c| c.0).max().unwrap();
            cells_of[top].push(cells);
        }
    }
    for (v, list) in cells_of.into_iter().enumerate() {
        // Flattened: each occurrence is stored as a run terminated by usize::MAX.
        for cells in list {
            by_max[v].extend(cells);
            by_max[v].push((usize::MAX, 0));
        }
    }
    by_max
}

/// Pattern-free colourings by depth-first search, at most `limit` of them.
fn pattern_free(g: &LabelledGraph, ps: &PatternSet, limit: usize) -> Vec<Vec<usize>> {
    let occ = occurrences(g, ps);
    let k = ps.colors.len();
    let n = g.num_vertices();
    let mut out = Vec::new();
    let mut c = vec![0usize; n];
    fn hit(run: &[(usize, usize)], c: &[usize]) -> bool {
        run.split(|x| x.0 == usize::MAX)
            .filter(|r| !r.is_empty())
            .any(|r| r.iter().all(|&(v, col)| c[v] == col))
    }
    fn rec(i: usize, k: usize, c: &mut Vec<usize>, occ: &Cells, out: &mut Vec<Vec<usize>>, limit: usize) {
        if out.len() >= limit {
            return;
        }
        if i == c.len() {
            out.push(c.clone());
            return;
        }
        for col in 0..k {
            c[i] = col;
            if !hit(&occ[i], c) {
                rec(i + 1, k, c, occ, out, limit);
            }
        }
    }
    rec(0, k, &mut c, &occ, &mut out, limit);
    out
}

fn random_patterns(rng: &mut ChaCha8Rng, labels: &[String]) -> PatternSet {
    let nl = labels.len();
    let word = |rng: &mut ChaCha8Rng| -> String {
        let len = rng.gen_range(0..=2);
        let mut toks: Vec<(usize, bool)> = Vec::new();
        while toks.len() < len {
            let t = (rng.gen_range(0..nl), rng.gen_bool(0.5));
            if toks.last().is_some_and(|&(l, inv)| l == t.0 && inv != t.1) {
                continue;
            }
            toks.push(t);
        }
        if toks.is_empty() {
            return "1".into();
        }
        toks.iter()
            .map(|&(l, inv)| if inv { format!("{}^-1", labels[l]) } else { labels[l].clone() })
            .collect::<Vec<_>>()
            .join(" ")
    };
    let count = rng.gen_range(1..=3);
    let mut patterns = Vec::new();
    for _ in 0..count {
        let mut p = serde_json::Map::new();
        for _ in 0..rng.gen_range(1..=3) {
            let w = word(rng);
            let c = if rng.gen_bool(0.5) { "x" } else { "y" };
            p.insert(w, json!(c));
        }
        patterns.push(serde_json::Value::Object(p));
    }
    let v = json!({"colors": ["x", "y"], "labels": labels, "radius": 2, "patterns": patterns});
    // Words naming the same reduced element would repeat a cell; draw again.
    PatternSet::from_json(&v).unwrap_or_else(|_| random_patterns(rng, labels))
}

#[test]
fn patterns_biject_on_closed_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut nonempty, mut constrained) = (0, 0);
    let cases: Vec<(Transducer, usize)> = vec![(odometer().unwrap(), 3), (odometer().unwrap(), 4), (hanoi().unwrap(), 2)];
    for (t, n) in cases {
        let g = build_graph(&t, &[], n, GraphKind::Full).unwrap();
        for _ in 0..8 {
            let ps = random_patterns(&mut rng, &g.labels);
            let cp = compile_patterns(&ps).unwrap();
            let tilings = enumerate_solutions(&g, &cp.tileset, &BTreeMap::new(), usize::MAX).unwrap();
            let free: BTreeSet<Vec<usize>> = pattern_free(&g, &ps, usize::MAX).into_iter().collect();
            let images: BTreeSet<Vec<usize>> = tilings
                .iter()
                .map(|tau| tau.iter().map(|&b| cp.projection[b]).collect())
                .collect();
            assert_eq!(images.len(), tilings.len(), "projection not injective");
            assert_eq!(images, free);
            for c in &free {
                assert!(pattern_valid(&g, &ps, c).unwrap());
            }
            nonempty += usize::from(!free.is_empty());
            constrained += usize::from(free.len() < 1 << g.num_vertices());
        }
    }
    assert!(nonempty > 0 && constrained > 0);
}

/// Compiled colour whose hull values read `c` around `v`, when every hull word is defined.
fn lift(g: &LabelledGraph, ps: &PatternSet, cp: &selfsim::domino::CompiledPatterns, c: &[usize], v: usize) -> Option<usize> {
    let walk = |w: &[(usize, i8)]| -> Option<usize> {
        let mut x = v;
        for &(l, e) in w.iter().rev() {
            let li = g.label_index(&ps.labels[l])?;
            x = g
                .edges
                .iter()
                .find(|&&(a, el, b)| el == li && if e > 0 { a == x } else { b == x })
                .map(|&(a, _, b)| if e > 0 { b } else { a })?;
        }
        Some(x)
    };
    let beta: Vec<usize> = cp.hull.iter().map(|w| walk(w).map(|x| c[x])).collect::<Option<_>>()?;
    let name = beta.iter().map(|&b| ps.colors[b].as_str()).collect::<Vec<_>>().join("|");
    cp.tileset.colors.iter().position(|x| *x == name)
}

#[test]
fn patterns_on_balls() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut lifted = 0;
    for t in [odometer().unwrap(), hanoi().unwrap()] {
        for r in 1..=3 {
            let c = Ray::new(vec![1], vec![0]).unwrap();
            let inner = ball_around_ray(&t, &[], &c, r).unwrap();
            let outer = ball_around_ray(&t, &[], &c, r + 2).unwrap();
            for _ in 0..4 {
                let ps = random_patterns(&mut rng, &inner.labels);
                let cp = compile_patterns(&ps).unwrap();
                // Tilings project to pattern-free colourings.
                for tau in enumerate_solutions(&inner, &cp.tileset, &BTreeMap::new(), 300).unwrap() {
                    let c: Vec<usize> = tau.iter().map(|&b| cp.projection[b]).collect();
                    assert!(pattern_valid(&inner, &ps, &c).unwrap());
                }
                // Pattern-free colourings of the larger ball lift to tilings of the inner ball.
                for c in pattern_free(&outer, &ps, 300) {
                    let tau: Vec<usize> = inner
                        .vertices
                        .iter()
                        .map(|name| {
                            let v = outer.vertex_index(name).unwrap();
                            lift(&outer, &ps, &cp, &c, v).expect("hull inside the outer ball")
                        })
                        .collect();
                    assert!(check_coloring(&inner, &cp.tileset, &tau).unwrap());
                    for (i, name) in inner.vertices.iter().enumerate() {
                        assert_eq!(cp.projection[tau[i]], c[outer.vertex_index(name).unwrap()]);
                    }
                    lifted += 1;
                }
            }
        }
    }
    assert!(lifted > 100);
}
