//! Tilesets of the gallery and the grid-simulation compositions.

use std::collections::BTreeSet;

use crate::domino::{local_mark_tileset, Tileset, WangTile};
use crate::error::{Error, Result};

pub const TILESETS: &[&str] = &["lr_sunny", "lr_grid", "hgraph_horoball", "localmark(a)"];

/// Looks up a builtin tileset; `localmark(x)` accepts any label `x`.
pub fn builtin_tileset(name: &str) -> Result<Tileset> {
    match name {
        "lr_sunny" => Ok(lr_sunny()),
        "lr_grid" => Ok(lr_grid()),
        "hgraph_horoball" => Ok(hgraph_horoball()),
        _ => match name.strip_prefix("localmark(").and_then(|s| s.strip_suffix(')')) {
            Some(l) if !l.is_empty() => Ok(local_mark_tileset(l, &[]).0),
            _ => Err(Error::UnknownName(name.to_string())),
        },
    }
}

fn build(colors: Vec<String>, labels: &[&str], triples: BTreeSet<(usize, usize, usize)>, seed: Option<usize>) -> Tileset {
    Tileset {
        colors,
        labels: labels.iter().map(|s| s.to_string()).collect(),
        triples,
        seed,
    }
}

/// Sign component of a long-range colour.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sign {
    Zero,
    Plus,
    Minus,
}

/// Sunny-side-up tileset on the long range graph: `0`, `±_0`, `±_1`.
pub fn lr_sunny() -> Tileset {
    let colors: Vec<String> = ["0", "-_0", "-_1", "+_0", "+_1"].iter().map(|s| s.to_string()).collect();
    let sign = |i: usize| match i {
        0 => Sign::Zero,
        1 | 2 => Sign::Minus,
        _ => Sign::Plus,
    };
    let sub = |i: usize| if i == 0 { None } else { Some((i + 1) % 2) };
    let mut triples = BTreeSet::new();
    for b in 0..5 {
        for c in 0..5 {
            let t_ok = matches!(
                (sign(b), sign(c)),
                (Sign::Zero, Sign::Plus) | (Sign::Plus, Sign::Plus) | (Sign::Minus, Sign::Minus) | (Sign::Minus, Sign::Zero)
            );
            if t_ok {
                triples.insert((b, 0, c));
            }
            let u_ok = (b == 0 && c == 0) || matches!((sub(b), sub(c)), (Some(x), Some(y)) if x != y);
            if u_ok {
                triples.insert((b, 1, c));
            }
        }
    }
    build(colors, &["t", "u"], triples, Some(0))
}

/// Explicit sunny-side-up colouring of an integer.
pub fn lr_sunny_colour(z: i64) -> &'static str {
    if z == 0 {
        return "0";
    }
    let odd = z >> z.trailing_zeros();
    // odd = 2m-1
    let m = (odd + 1) / 2;
    match (m >= 1, m.rem_euclid(2)) {
        (true, 0) => "+_0",
        (true, _) => "+_1",
        (false, 0) => "-_0",
        (false, _) => "-_1",
    }
}

/// Strip marks of the layered grid tileset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strip {
    E,
    O,
    PE,
    PO,
}

impl Strip {
    const ALL: [Strip; 4] = [Strip::E, Strip::O, Strip::PE, Strip::PO];

    fn name(self) -> &'static str {
        match self {
            Strip::E => "e",
            Strip::O => "o",
            Strip::PE => "pe",
            Strip::PO => "po",
        }
    }

    fn is_power(self) -> bool {
        matches!(self, Strip::PE | Strip::PO)
    }

    /// Parity used for q-marking; a power of two takes the parity of the strip it opens.
    fn parity(self) -> bool {
        matches!(self, Strip::O | Strip::PE)
    }
}

/// Colour of the layered grid tileset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridColour {
    pub sign: Sign,
    pub strip: Strip,
    pub q: bool,
}

impl GridColour {
    pub fn p(&self) -> bool {
        self.strip.is_power()
    }

    pub fn name(&self) -> String {
        let s = match self.sign {
            Sign::Zero => "0",
            Sign::Plus => "+",
            Sign::Minus => "-",
        };
        format!(
            "({s},{},{},{})",
            if self.p() { "p" } else { "_" },
            self.strip.name(),
            if self.q { "q" } else { "_" }
        )
    }
}

/// Colours of the layered grid tileset; `p` only occurs with sign `+`.
pub fn lr_grid_colours() -> Vec<GridColour> {
    let mut out = Vec::new();
    for sign in [Sign::Zero, Sign::Plus, Sign::Minus] {
        for strip in Strip::ALL {
            if strip.is_power() && sign != Sign::Plus {
                continue;
            }
            for q in [false, true] {
                out.push(GridColour { sign, strip, q });
            }
        }
    }
    out
}

fn grid_t_ok(b: &GridColour, c: &GridColour) -> bool {
    use Strip::*;
    let sign_ok = matches!(
        (b.sign, c.sign),
        (Sign::Minus, Sign::Minus) | (Sign::Minus, Sign::Zero) | (Sign::Zero, Sign::Plus) | (Sign::Plus, Sign::Plus)
    );
    let strip_ok = matches!(
        (b.strip, c.strip),
        (E, E) | (E, PE) | (O, O) | (O, PO) | (PE, O) | (PO, E) | (PE, PO) | (PO, PE)
    );
    sign_ok && strip_ok
}

fn grid_u_ok(b: &GridColour, c: &GridColour) -> bool {
    let p = b.sign == Sign::Minus && c.sign == Sign::Plus;
    let q = !c.p() && b.strip.parity() != c.strip.parity();
    c.p() == p && c.q == q
}

/// Layered tileset marking powers of two (`p`) and sums of two powers (`q`) on the long range
/// graph, seeded at `(0,_,e,_)`.
pub fn lr_grid() -> Tileset {
    let cs = lr_grid_colours();
    let mut triples = BTreeSet::new();
    for (i, b) in cs.iter().enumerate() {
        for (j, c) in cs.iter().enumerate() {
            if grid_t_ok(b, c) {
                triples.insert((i, 0, j));
            }
            if grid_u_ok(b, c) {
                triples.insert((i, 1, j));
            }
        }
    }
    let seed = cs
        .iter()
        .position(|c| c.sign == Sign::Zero && c.strip == Strip::E && !c.q);
    build(cs.iter().map(GridColour::name).collect(), &["t", "u"], triples, seed)
}

pub const HOROBALL_COLOURS: [&str; 13] = [
    "a0", "a1", "b0", "b1", "b2", "b3", "b4", "c0", "c1", "c2", "d0", "d1", "d2",
];

const HOROBALL_X: &[(&str, &str)] = &[
    ("a0", "b0"), ("b0", "c0"), ("c0", "d0"), ("a1", "b1"), ("a1", "b2"),
    ("b1", "c1"), ("b2", "c1"), ("c1", "d1"), ("b3", "c2"), ("b4", "c2"),
    ("c2", "d2"),
];

const HOROBALL_Y: &[(&str, &str)] = &[
    ("a0", "a0"), ("b0", "c0"), ("c0", "d0"), ("a1", "a1"), ("b1", "c1"),
    ("b2", "b2"), ("c1", "d1"), ("b3", "b3"), ("b4", "b4"), ("c2", "c2"),
    ("c2", "d2"), ("d2", "d2"),
];

const HOROBALL_Z: &[(&str, &str)] = &[
    ("a0", "a1"), ("a1", "a0"), ("a1", "a1"), ("b0", "b2"), ("b0", "b3"),
    ("b1", "b2"), ("b1", "b3"), ("b2", "b0"), ("b2", "b1"), ("b2", "b4"),
    ("b3", "b2"), ("b3", "b3"), ("b4", "b0"), ("b4", "b1"), ("b4", "b4"),
    ("c0", "c2"), ("c1", "c2"), ("c2", "c0"), ("c2", "c1"), ("c2", "c2"),
    ("d0", "d2"), ("d1", "d2"), ("d2", "d0"), ("d2", "d1"), ("d2", "d2"),
];

/// Seeded horoball tileset on the H-graph; `x` and `y` pairs hold in both orientations.
pub fn hgraph_horoball() -> Tileset {
    let idx = |s: &str| HOROBALL_COLOURS.iter().position(|c| *c == s).expect("colour");
    let mut triples = BTreeSet::new();
    for (l, table) in [HOROBALL_X, HOROBALL_Y].iter().enumerate() {
        for &(a, b) in table.iter() {
            triples.insert((idx(a), l, idx(b)));
            triples.insert((idx(b), l, idx(a)));
        }
    }
    for &(a, b) in HOROBALL_Z {
        triples.insert((idx(a), 2, idx(b)));
    }
    build(
        HOROBALL_COLOURS.iter().map(|s| s.to_string()).collect(),
        &["x", "y", "z"],
        triples,
        Some(idx("a0")),
    )
}

pub const GRID_BASES: &[&str] = &["lr_octant", "hgraph_strips"];

/// Layers a Wang tileset over a grid-simulating base tileset.
pub fn grid_compose(base: &str, wang: &[WangTile]) -> Result<Tileset> {
    if wang.is_empty() {
        return Err(Error::InvalidInput("empty Wang tileset".into()));
    }
    match base {
        "lr_octant" => Ok(lr_octant(wang)),
        "hgraph_strips" => Ok(hgraph_strips(wang)),
        _ => Err(Error::UnknownName(base.to_string())),
    }
}

fn tile_names(wang: &[WangTile]) -> Vec<String> {
    crate::domino::wang_tile_names(wang)
}

/// Colours `(base, h, v)`: `h` travels along `u`, `v` along `t`; both equal the own tile at
/// q-marks, where the east/west and north/south rules are checked.
fn lr_octant(wang: &[WangTile]) -> Tileset {
    let base = lr_grid_colours();
    let names = tile_names(wang);
    let k = wang.len();
    let mut cols: Vec<(usize, usize, usize)> = Vec::new();
    for (bi, b) in base.iter().enumerate() {
        for h in 0..k {
            for v in 0..k {
                let origin = b.sign == Sign::Zero;
                if (b.q && h != v) || (origin && (h != 0 || v != 0)) {
                    continue;
                }
                cols.push((bi, h, v));
            }
        }
    }
    let mut triples = BTreeSet::new();
    for (i, &(b0, h0, v0)) in cols.iter().enumerate() {
        for (j, &(b1, h1, v1)) in cols.iter().enumerate() {
            let (p, q) = (&base[b0], &base[b1]);
            if grid_u_ok(p, q) {
                let ok = if q.q { wang[h0].e == wang[h1].w } else { h1 == h0 };
                if ok {
                    triples.insert((i, 1, j));
                }
            }
            if grid_t_ok(p, q) {
                let ok = if q.p() {
                    true
                } else if q.q {
                    wang[v0].n == wang[v1].s
                } else {
                    v1 == v0
                };
                if ok {
                    triples.insert((i, 0, j));
                }
            }
        }
    }
    let seed = cols
        .iter()
        .position(|&(b, h, v)| base[b].sign == Sign::Zero && base[b].strip == Strip::E && !base[b].q && h == 0 && v == 0);
    build(
        cols.iter()
            .map(|&(b, h, v)| format!("({},{},{})", base[b].name(), names[h], names[v]))
            .collect(),
        &["t", "u"],
        triples,
        seed,
    )
}

/// Colours `(p, θ)` over the horoball tileset with the strip propagation clauses.
fn hgraph_strips(wang: &[WangTile]) -> Tileset {
    let base = hgraph_horoball();
    let names = tile_names(wang);
    let k = wang.len();
    let nb = base.num_colors();
    let in_set = |p: usize, set: &[&str]| set.contains(&HOROBALL_COLOURS[p]);
    let mut triples = BTreeSet::new();
    for &(p, g, p2) in &base.triples {
        for th in 0..k {
            for th2 in 0..k {
                let (a, b) = (&wang[th], &wang[th2]);
                let ok = match g {
                    2 if in_set(p2, &["c2", "d2", "b3", "b4"]) => th2 == th,
                    2 if in_set(p2, &["c0", "c1", "b0", "b1", "b2"]) => b.s == a.n,
                    0 if in_set(p2, &["c0", "c1"]) => b.e == a.w,
                    1 if in_set(p2, &["d0", "d1"]) => b.e == a.w,
                    _ => true,
                };
                if ok {
                    triples.insert((p * k + th, g, p2 * k + th2));
                }
            }
        }
    }
    let colors = (0..nb * k)
        .map(|i| format!("({},{})", base.colors[i / k], names[i % k]))
        .collect();
    build(colors, &["x", "y", "z"], triples, base.seed.map(|s| s * k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sunny_colouring_indexing() {
        assert_eq!(lr_sunny_colour(0), "0");
        assert_eq!(lr_sunny_colour(1), "+_1");
        assert_eq!(lr_sunny_colour(3), "+_0");
        assert_eq!(lr_sunny_colour(2), "+_1");
        assert_eq!(lr_sunny_colour(-1), "-_0");
        assert_eq!(lr_sunny_colour(-3), "-_1");
    }

    #[test]
    fn horoball_counts() {
        let ts = hgraph_horoball();
        assert_eq!(ts.num_colors(), 13);
        let z = ts.triples.iter().filter(|t| t.1 == 2).count();
        assert_eq!(z, 25);
    }

    #[test]
    fn strips_one_tile() {
        let ts = grid_compose("hgraph_strips", &[WangTile::new("x", "x", "x", "x")]).unwrap();
        assert_eq!(ts.num_colors(), 13);
        assert_eq!(ts.triples.len(), hgraph_horoball().triples.len());
    }

    #[test]
    fn localmark_names() {
        assert_eq!(builtin_tileset("localmark(b)").unwrap().labels, vec!["b"]);
        assert!(builtin_tileset("localmark()").is_err());
    }
}
