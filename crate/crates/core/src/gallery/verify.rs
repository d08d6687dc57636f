//! Finite-window checks of the grid and horoball simulations.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde_json::{json, Value};

use super::machines::{hgraph, longrange};
use super::tilesets::{hgraph_horoball, lr_grid, lr_grid_colours, lr_sunny, lr_sunny_colour};
use crate::domino::{check_coloring, Csp, Tileset};
use crate::error::{Error, Result};
use crate::graph::LabelledGraph;
use crate::transducer::{GroupElement, Ray, Transducer};

pub const SIMULATIONS: &[&str] = &["lr_sunny", "lr_grid", "hgraph_horoball"];
pub const DEFAULT_MAX_EXTENT: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub name: String,
    pub extent: usize,
    /// Named checks in evaluation order.
    pub checks: Vec<(String, bool)>,
    pub details: Value,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    pub fn to_json(&self) -> Value {
        let checks: BTreeMap<&str, bool> = self.checks.iter().map(|(n, b)| (n.as_str(), *b)).collect();
        json!({
            "name": self.name,
            "extent": self.extent,
            "pass": self.pass(),
            "checks": checks,
            "details": self.details,
        })
    }
}

pub fn verify_simulation(name: &str, extent: usize) -> Result<VerifyReport> {
    verify_simulation_capped(name, extent, DEFAULT_MAX_EXTENT)
}

/// Runs a verifier; `extent` sizes the window (`2^extent` for the long range segments, a
/// `2^extent+1 × 2^(extent-1)+1` window for the H-graph).
pub fn verify_simulation_capped(name: &str, extent: usize, max_extent: usize) -> Result<VerifyReport> {
    if !SIMULATIONS.contains(&name) {
        return Err(Error::UnknownName(name.to_string()));
    }
    if extent > max_extent || extent > 20 {
        return Err(Error::ExtentTooLarge(extent));
    }
    if extent == 0 {
        return Err(Error::InvalidInput("extent must be positive".into()));
    }
    match name {
        "lr_sunny" => verify_sunny(extent),
        "lr_grid" => verify_grid(extent),
        _ => verify_horoball(extent),
    }
}

/// Two's complement ray of an integer, least significant letter first.
pub fn int_to_ray(z: i64) -> Ray {
    let mut bits = Vec::new();
    let mut x = z;
    while x != 0 && x != -1 {
        bits.push((x & 1) as usize);
        x >>= 1;
    }
    Ray::new(bits, vec![if z < 0 { 1 } else { 0 }]).expect("non-empty period")
}

pub fn ray_to_int(r: &Ray) -> Option<i64> {
    let tail = match r.period() {
        [0] => 0i64,
        [1] => -1,
        _ => return None,
    };
    let mut z = tail;
    for &b in r.preperiod().iter().rev() {
        z = z.checked_mul(2)?.checked_add(b as i64)?;
    }
    Some(z)
}

/// Long range graph restricted to `[-n, n]`, with the origin as root.
pub fn lr_segment(n: i64) -> Result<LabelledGraph> {
    let t = longrange()?;
    let gens: Vec<(String, GroupElement)> = ["t", "u"]
        .iter()
        .map(|g| Ok((g.to_string(), t.element(g)?)))
        .collect::<Result<_>>()?;
    let mut edges = Vec::new();
    for z in -n..=n {
        let r = int_to_ray(z);
        for (name, g) in &gens {
            let img = ray_to_int(&t.act_ray(g, &r)?)
                .ok_or_else(|| Error::Internal("image is not an integer".into()))?;
            if img.abs() <= n {
                edges.push((z.to_string(), name.clone(), img.to_string()));
            }
        }
    }
    LabelledGraph::from_named(
        (-n..=n).map(|z| z.to_string()),
        ["t".to_string(), "u".to_string()],
        &edges,
        Some("0"),
    )
}

fn index_of(g: &LabelledGraph, z: i64) -> usize {
    g.vertex_index(&z.to_string()).expect("segment vertex")
}

fn verify_sunny(k: usize) -> Result<VerifyReport> {
    let n = 1i64 << k;
    let g = lr_segment(n)?;
    let ts = lr_sunny();
    let mut col = vec![0; g.num_vertices()];
    for z in -n..=n {
        col[index_of(&g, z)] = ts.color_index(lr_sunny_colour(z))?;
    }
    let explicit_ok = check_coloring(&g, &ts, &col)?;
    let csp = Csp::new(&g, &ts)?;
    let zero = ts.color_index("0")?;
    let others: Vec<i64> = (-n..=n).filter(|&z| z != 0).collect();
    let stray: Vec<i64> = others
        .par_iter()
        .map(|&z| {
            let pins = BTreeMap::from([(index_of(&g, z), zero)]);
            csp.solve(&pins).map(|s| s.map(|_| z))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(VerifyReport {
        name: "lr_sunny".into(),
        extent: k,
        checks: vec![
            ("explicit_colouring_valid".into(), explicit_ok),
            ("zero_only_at_origin".into(), stray.is_empty()),
        ],
        details: json!({"segment": [-n, n], "stray_zeros": stray}),
    })
}

fn sums_of_two_powers(lo: i64, hi: i64) -> BTreeSet<i64> {
    let mut out = BTreeSet::new();
    for a in 0..62 {
        for b in 0..a {
            let z = (1i64 << a) + (1i64 << b);
            if z > lo && z <= hi {
                out.insert(z);
            }
        }
    }
    out
}

/// Vertices whose colour is forced to every value but `expected`, checked by pinned solves.
fn unforced(csp: &Csp, ts: &Tileset, cells: &[(usize, usize)]) -> Result<Vec<usize>> {
    let jobs: Vec<(usize, usize)> = cells
        .iter()
        .flat_map(|&(v, want)| (0..ts.num_colors()).filter(move |&c| c != want).map(move |c| (v, c)))
        .collect();
    let bad: BTreeSet<usize> = jobs
        .par_iter()
        .map(|&(v, c)| Ok(csp.solve(&BTreeMap::from([(v, c)]))?.map(|_| v)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(bad.into_iter().collect())
}

fn verify_grid(k: usize) -> Result<VerifyReport> {
    let n = 1i64 << k;
    let g = lr_segment(n)?;
    let ts = lr_grid();
    let cs = lr_grid_colours();
    let csp = Csp::new(&g, &ts)?;
    let Some(sol) = csp.solve(&BTreeMap::new())? else {
        return Ok(VerifyReport {
            name: "lr_grid".into(),
            extent: k,
            checks: vec![("seeded_solution_exists".into(), false)],
            details: json!({"segment": [-n, n]}),
        });
    };
    let (lo, hi) = (-n / 2, n / 2);
    let interior: Vec<i64> = (lo + 1..=hi).collect();
    let cells: Vec<(usize, usize)> = interior.iter().map(|&z| (index_of(&g, z), sol[index_of(&g, z)])).collect();
    let loose: Vec<String> = unforced(&csp, &ts, &cells)?
        .into_iter()
        .map(|v| g.vertices[v].clone())
        .collect();
    let p_marks: BTreeSet<i64> = interior.iter().copied().filter(|&z| cs[sol[index_of(&g, z)]].p()).collect();
    let q_marks: BTreeSet<i64> = interior.iter().copied().filter(|&z| cs[sol[index_of(&g, z)]].q).collect();
    let powers: BTreeSet<i64> = (0..62).map(|a| 1i64 << a).filter(|&z| z > lo && z <= hi).collect();
    let sums = sums_of_two_powers(lo, hi);
    Ok(VerifyReport {
        name: "lr_grid".into(),
        extent: k,
        checks: vec![
            ("seeded_solution_exists".into(), true),
            ("p_marks_at_powers".into(), p_marks == powers),
            ("q_marks_at_sums".into(), q_marks == sums),
            ("interior_unique".into(), loose.is_empty()),
        ],
        details: json!({
            "segment": [-n, n],
            "interior": [lo, hi],
            "p_marks": p_marks,
            "q_marks": q_marks,
            "unforced": loose,
        }),
    })
}

/// Ray of the H-graph vertex `(m, n)`: Gray code of `m` against two's complement of `n`.
pub fn hgraph_ray(t: &Transducer, m: u64, n: i64) -> Result<Ray> {
    let a = t.alphabet();
    let gray = m ^ (m >> 1);
    let width = (64 - m.leading_zeros()).max(64 - (if n < 0 { !n } else { n } as u64).leading_zeros()) as usize + 1;
    let mut pre = Vec::with_capacity(width);
    for i in 0..width {
        let u = (gray >> i) & 1;
        let v = (n >> i) & 1;
        pre.push(a.letter(&format!("{u}{v}"))?);
    }
    let tail = a.letter(if n < 0 { "01" } else { "00" })?;
    Ray::new(pre, vec![tail])
}

fn hgraph_coords(t: &Transducer, r: &Ray) -> Option<(u64, i64)> {
    let a = t.alphabet();
    let tail = a.name(*r.period().first()?);
    if r.period().len() != 1 || !tail.starts_with('0') {
        return None;
    }
    let (mut gray, mut n) = (0u64, if tail == "01" { -1i64 } else { 0 });
    for (i, &l) in r.preperiod().iter().enumerate().rev() {
        let name = a.name(l).as_bytes();
        gray |= ((name[0] - b'0') as u64) << i;
        n = n * 2 + (name[1] - b'0') as i64;
    }
    let mut m = gray;
    let mut shift = gray >> 1;
    while shift != 0 {
        m ^= shift;
        shift >>= 1;
    }
    Some((m, n))
}

pub fn cell_name(m: u64, n: i64) -> String {
    format!("({m},{n})")
}

/// H-graph restricted to `[0,w] × [lo,hi]`, rooted at the origin.
pub fn hgraph_window(w: u64, lo: i64, hi: i64) -> Result<LabelledGraph> {
    let t = hgraph()?;
    let gens: Vec<(String, GroupElement)> = ["x", "y", "z"]
        .iter()
        .map(|g| Ok((g.to_string(), t.element(g)?)))
        .collect::<Result<_>>()?;
    let mut edges = Vec::new();
    let mut verts = Vec::new();
    for m in 0..=w {
        for n in lo..=hi {
            verts.push(cell_name(m, n));
            let r = hgraph_ray(&t, m, n)?;
            for (name, g) in &gens {
                let img = t.act_ray(g, &r)?;
                let (m2, n2) = hgraph_coords(&t, &img)
                    .ok_or_else(|| Error::Internal("image outside the coded vertex set".into()))?;
                if m2 <= w && (lo..=hi).contains(&n2) {
                    edges.push((cell_name(m, n), name.clone(), cell_name(m2, n2)));
                }
            }
        }
    }
    LabelledGraph::from_named(
        verts,
        ["x", "y", "z"].iter().map(|s| s.to_string()),
        &edges,
        Some(&cell_name(0, 0)),
    )
}

fn two_adic(n: u64) -> u32 {
    n.trailing_zeros()
}

/// Horoball colouring of cell `(i, j)` with `j ≥ 0`, as drawn in the reference figure.
pub fn horoball_colour(i: u64, j: u64) -> String {
    let b_level = |i: u64| -> Option<u32> {
        let k = i + 1;
        (i > 0 && k.is_power_of_two()).then(|| k.trailing_zeros() - 1)
    };
    let letter = if i == 0 {
        'a'
    } else if b_level(i).is_some() {
        'b'
    } else if i % 2 == 1 {
        'd'
    } else {
        'c'
    };
    let sub = if j == 0 {
        0
    } else if i == 0 {
        1
    } else if let Some(s) = b_level(i) {
        let step = 1u64 << s;
        if j % step == 0 {
            if (j / step) % 2 == 0 {
                1
            } else {
                2
            }
        } else if (j / step) % 2 == 0 {
            3
        } else {
            4
        }
    } else {
        let s = two_adic(j);
        if i < (1u64 << (s + 1)) - 1 {
            1
        } else {
            2
        }
    };
    format!("{letter}{sub}")
}

/// Rows `0..=h` of the figure colouring on columns `0..=w`, bottom row first.
pub fn horoball_figure(w: u64, h: u64) -> Vec<Vec<String>> {
    (0..=h).map(|j| (0..=w).map(|i| horoball_colour(i, j)).collect()).collect()
}

/// Cells of the horoball `(2^(s+1)-1, 2^s n)` inside the window with their forced colours.
pub fn horoball_named_cells(w: u64, h: u64) -> Vec<((u64, u64), &'static str)> {
    let mut out = Vec::new();
    let mut s = 0;
    while (1u64 << (s + 1)) - 1 <= w {
        let i = (1u64 << (s + 1)) - 1;
        let step = 1u64 << s;
        let mut n = 0;
        while step * n <= h {
            let c = if n == 0 {
                "b0"
            } else if n % 2 == 0 {
                "b1"
            } else {
                "b2"
            };
            out.push(((i, step * n), c));
            n += 1;
        }
        s += 1;
    }
    out
}

fn verify_horoball(k: usize) -> Result<VerifyReport> {
    let w = 1u64 << k;
    let h = w / 2;
    let ts = hgraph_horoball();
    let window = hgraph_window(w, 0, h as i64)?;
    let figure = horoball_figure(w, h);
    let mut col = vec![0; window.num_vertices()];
    for (j, row) in figure.iter().enumerate() {
        for (i, c) in row.iter().enumerate() {
            let v = window
                .vertex_index(&cell_name(i as u64, j as i64))
                .expect("window cell");
            col[v] = ts.color_index(c)?;
        }
    }
    let figure_ok = check_coloring(&window, &ts, &col)?;
    let bad_edges: Vec<(String, String, String)> = {
        let lm = ts.label_map(&window)?;
        window
            .edges
            .iter()
            .filter(|&&(a, l, b)| !ts.allows(col[a], lm[l], col[b]))
            .map(|&(a, l, b)| (window.vertices[a].clone(), window.labels[l].clone(), window.vertices[b].clone()))
            .collect()
    };
    // Pins are derived on a region extending the window below the axis and to the right.
    let region = hgraph_window(2 * w, -(2 * h as i64), 2 * h as i64)?;
    let csp = Csp::new(&region, &ts)?;
    let named = horoball_named_cells(w, h);
    let cells: Vec<(usize, usize)> = named
        .iter()
        .map(|&((i, j), c)| {
            Ok((
                region.vertex_index(&cell_name(i, j as i64)).expect("region cell"),
                ts.color_index(c)?,
            ))
        })
        .collect::<Result<_>>()?;
    let loose: Vec<String> = unforced(&csp, &ts, &cells)?
        .into_iter()
        .map(|v| region.vertices[v].clone())
        .collect();
    let one_rows: Vec<u64> = (1..=h)
        .filter(|&j| (1..=w).any(|i| horoball_colour(i, j).ends_with('1') && !horoball_colour(i, j).starts_with('b')))
        .collect();
    Ok(VerifyReport {
        name: "hgraph_horoball".into(),
        extent: k,
        checks: vec![
            ("figure_consistent".into(), figure_ok),
            ("named_cells_pinned".into(), loose.is_empty()),
        ],
        details: json!({
            "window": [w + 1, h + 1],
            "region": {"columns": [0, 2 * w], "rows": [-(2 * h as i64), 2 * h]},
            "named_cells": named.iter().map(|&((i, j), c)| json!([cell_name(i, j as i64), c])).collect::<Vec<_>>(),
            "violations": bad_edges,
            "unforced": loose,
            "rows_with_ones": one_rows,
        }),
    })
}
