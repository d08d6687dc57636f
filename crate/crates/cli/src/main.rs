use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use selfsim::contraction::{activity, post_critical_paths};
use selfsim::domino::{
    compile_patterns, compose_seeded, decide_pcf, enumerate_solutions, local_mark_tileset, wang_to_tileset, Caps,
    PatternSet, Tileset, WangSet, WangTile,
};
use selfsim::gallery::{
    self, builtin_machine, builtin_substitution, builtin_tileset, classify_substitution, grid_compose,
    substitution_to_transducer, verify_simulation_capped, Builtin, Substitution,
};
use selfsim::transducer::RayJson;
use selfsim::{
    ancestor_structure, ball_around_ray, build_graph, is_bounded, nucleus, post_critical_set, tree_decomposition,
    treewidth_bound, Error, GraphKind, LabelledGraph, Ray, Result, Transducer,
};

#[derive(Parser)]
#[command(name = "selfsim", version, about = "Self-similar groups, Schreier graphs and domino problems")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Global {
    /// Compact single-line JSON instead of indented output.
    #[arg(long, global = true)]
    json: bool,
    /// Rounds allowed for the nucleus computation.
    #[arg(long, global = true, default_value_t = 10_000)]
    max_iter: usize,
    /// Levels allowed for the decision procedure.
    #[arg(long, global = true, default_value_t = 64)]
    max_levels: usize,
    /// Largest verification extent.
    #[arg(long, global = true, default_value_t = gallery::verify::DEFAULT_MAX_EXTENT)]
    max_extent: usize,
    /// Worker threads for parallel steps (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Full,
    Tile,
    Simple,
}

impl From<Kind> for GraphKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Full => GraphKind::Full,
            Kind::Tile => GraphKind::Tile,
            Kind::Simple => GraphKind::Simple,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Nucleus of a machine.
    Nucleus { machine: String },
    /// Boundedness and post-critical set.
    Pcf { machine: String },
    /// Post-critical words with their nucleus paths.
    Postcritical { machine: String },
    /// Ancestor structure of a bounded machine.
    Ancestor { machine: String },
    /// Treewidth bound `#P * #S^(p+q)`.
    Treewidth { machine: String },
    /// Level-n Schreier graph.
    Schreier {
        machine: String,
        #[arg(long)]
        level: usize,
        #[arg(long, value_enum, default_value = "full")]
        kind: Kind,
        /// Comma-separated generator words; defaults to the machine's generators.
        #[arg(long, value_delimiter = ',')]
        gens: Vec<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Ball around a periodic ray in its orbit graph.
    Ball {
        machine: String,
        /// Ray as JSON `{"preperiod":[..],"period":[..]}` or compact `pre(period)`.
        #[arg(long)]
        center: String,
        #[arg(long)]
        radius: usize,
        #[arg(long, value_delimiter = ',')]
        gens: Vec<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Verified tree decomposition of the level-n Schreier graph.
    Treedecomp {
        machine: String,
        #[arg(long)]
        level: usize,
    },
    /// Decides tileability of an orbit graph of a bounded machine.
    Decide {
        machine: String,
        tileset: String,
        #[arg(long)]
        ray: String,
    },
    /// Solves a tileset on a finite graph given as JSON.
    Tile {
        graph: String,
        tileset: String,
        /// Pins as JSON `{vertex: colour}`.
        #[arg(long)]
        pins: Option<String>,
        /// Enumerate up to this many solutions instead of returning the first.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Compiles forbidden patterns into a tileset.
    CompilePatterns { patterns: String },
    /// Converts Wang tiles into a grid tileset.
    Wang { tiles: String },
    /// Removes the seed of a tileset using a sunny-side-up tileset.
    ComposeSeeded {
        main: String,
        ssu: String,
        /// Comma-separated sunny-side-up colours that mark the seed.
        #[arg(long, value_delimiter = ',', required = true)]
        marked: Vec<String>,
    },
    /// Local-mark tileset for loops of one label.
    Localmark {
        label: String,
        #[arg(long, value_delimiter = ',')]
        others: Vec<String>,
    },
    /// Box substitutions.
    Substitution {
        #[command(subcommand)]
        action: SubstitutionAction,
    },
    /// Layers a Wang tileset over a grid simulation.
    ComposeGrid { base: String, tiles: String },
    /// Finite-window verification of a simulation.
    Verify {
        name: String,
        #[arg(long)]
        extent: usize,
    },
    /// Builtin objects.
    Gallery {
        #[command(subcommand)]
        action: GalleryAction,
    },
}

#[derive(Subcommand)]
enum SubstitutionAction {
    Convert { substitution: String },
    Classify { substitution: String },
}

#[derive(Subcommand)]
enum GalleryAction {
    List,
    Export { name: String },
}

enum Output {
    Json(Value),
    Text(String),
}

fn read_source(src: &str) -> Result<String> {
    fs::read_to_string(src).map_err(|e| Error::InvalidInput(format!("cannot read {src}: {e}")))
}

fn parse_value(text: &str, what: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("{what}: {e}")))
}

fn gallery_name(src: &str) -> Option<&str> {
    src.strip_prefix("gallery:")
}

fn load_machine(src: &str) -> Result<Transducer> {
    match gallery_name(src) {
        Some(name) => builtin_machine(name),
        None => Transducer::parse_json(&read_source(src)?),
    }
}

fn load_tileset(src: &str) -> Result<Tileset> {
    match gallery_name(src) {
        Some(name) => builtin_tileset(name),
        None => Tileset::from_json(&parse_value(&read_source(src)?, "tileset")?),
    }
}

fn load_substitution(src: &str) -> Result<Substitution> {
    match gallery_name(src) {
        Some(name) => builtin_substitution(name),
        None => Substitution::from_json(&parse_value(&read_source(src)?, "substitution")?),
    }
}

fn load_wang(src: &str) -> Result<Vec<WangTile>> {
    let v = parse_value(&read_source(src)?, "wang tiles")?;
    let set: WangSet = serde_json::from_value(v).map_err(|e| Error::InvalidInput(format!("wang tiles: {e}")))?;
    Ok(set.tiles)
}

fn parse_ray(t: &Transducer, text: &str) -> Result<Ray> {
    let a = t.alphabet();
    if text.trim_start().starts_with('{') {
        let j: RayJson = serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("ray: {e}")))?;
        Ray::from_json(a, &j)
    } else {
        Ray::parse(a, text)
    }
}

fn graph_output(g: &LabelledGraph, format: Format) -> Output {
    match format {
        Format::Json => Output::Json(g.to_json()),
        Format::Dot => Output::Text(g.to_dot()),
    }
}

fn pcf_report(t: &Transducer, max_iter: usize) -> Result<Value> {
    // Unbounded activity is visible on the generating machine; bounded machines
    // generate contracting groups, so the nucleus is only needed in that case.
    let act = activity(t)?;
    if !act.bounded {
        return Ok(json!({
            "bounded": false,
            "degree": act.degree,
            "postcritical": null,
            "source": "generating_machine",
        }));
    }
    let n = nucleus(t, max_iter)?;
    let act = is_bounded(&n)?;
    let a = t.alphabet();
    let p: Option<Vec<String>> = if act.bounded {
        Some(post_critical_set(&n)?.iter().map(|w| w.render(a)).collect())
    } else {
        None
    };
    Ok(json!({"bounded": act.bounded, "degree": act.degree, "postcritical": p, "source": "nucleus"}))
}

fn run(cmd: Command, g: Global) -> Result<Output> {
    let caps = Caps {
        max_iter: g.max_iter,
        max_levels: g.max_levels,
    };
    Ok(match cmd {
        Command::Nucleus { machine } => {
            let t = load_machine(&machine)?;
            let n = nucleus(&t, g.max_iter)?;
            Output::Json(json!({
                "size": n.len(),
                "elements": n.names(),
                "machine": serde_json::to_value(n.machine().to_json()).expect("serializable"),
            }))
        }
        Command::Pcf { machine } => Output::Json(pcf_report(&load_machine(&machine)?, g.max_iter)?),
        Command::Postcritical { machine } => {
            let t = load_machine(&machine)?;
            let n = nucleus(&t, g.max_iter)?;
            let a = n.machine().alphabet();
            let mut paths: Vec<Value> = post_critical_paths(&n)?
                .iter()
                .map(|r| {
                    json!({
                        "input": r.input.render(a),
                        "output": r.output.render(a),
                        "end": n.machine().state_name(r.end),
                    })
                })
                .collect();
            paths.sort_by_key(|v| v.to_string());
            let p: Vec<String> = post_critical_set(&n)?.iter().map(|w| w.render(a)).collect();
            Output::Json(json!({"postcritical": p, "paths": paths}))
        }
        Command::Ancestor { machine } => {
            let t = load_machine(&machine)?;
            let n = nucleus(&t, g.max_iter)?;
            let a = n.machine().alphabet();
            let s = ancestor_structure(&n)?;
            let maps: BTreeMap<String, &Vec<usize>> = s
                .maps
                .iter()
                .enumerate()
                .map(|(l, m)| (a.name(l).to_string(), m))
                .collect();
            Output::Json(json!({
                "U": s.u.iter().map(|w| w.render(a)).collect::<Vec<_>>(),
                "V": s.v.iter().map(|c| c.iter().map(|w| w.render(a)).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "embed": s.embed,
                "maps": maps,
                "axioms_hold": s.axioms_hold(),
            }))
        }
        Command::Treewidth { machine } => {
            let t = load_machine(&machine)?;
            let n = nucleus(&t, g.max_iter)?;
            let p = post_critical_set(&n)?;
            let b = treewidth_bound(&t, p.len())?;
            Output::Json(json!({"p": b.p, "q": b.q, "postcritical": p.len(), "bound": b.bound}))
        }
        Command::Schreier {
            machine,
            level,
            kind,
            gens,
            format,
        } => {
            let t = load_machine(&machine)?;
            graph_output(&build_graph(&t, &gens, level, kind.into())?, format)
        }
        Command::Ball {
            machine,
            center,
            radius,
            gens,
            format,
        } => {
            let t = load_machine(&machine)?;
            let c = parse_ray(&t, &center)?;
            graph_output(&ball_around_ray(&t, &gens, &c, radius)?, format)
        }
        Command::Treedecomp { machine, level } => {
            let t = load_machine(&machine)?;
            let n = nucleus(&t, g.max_iter)?;
            let p = post_critical_set(&n)?;
            let b = treewidth_bound(&t, p.len())?;
            let td = tree_decomposition(&t, &p, level)?;
            Output::Json(json!({
                "level": level,
                "width": td.width(),
                "bound": b.bound,
                "tree": td.tree.to_json(),
                "bags": td.bags,
            }))
        }
        Command::Decide { machine, tileset, ray } => {
            let t = load_machine(&machine)?;
            let ts = load_tileset(&tileset)?;
            let r = parse_ray(&t, &ray)?;
            Output::Json(decide_pcf(&t, &ts, &r, caps)?.to_json())
        }
        Command::Tile {
            graph,
            tileset,
            pins,
            limit,
        } => {
            let gr = LabelledGraph::from_json(&parse_value(&read_source(&graph)?, "graph")?)?;
            let ts = load_tileset(&tileset)?;
            let mut pinned = BTreeMap::new();
            if let Some(p) = pins {
                let named: BTreeMap<String, String> = serde_json::from_str(&p)
                    .map_err(|e| Error::InvalidInput(format!("pins: {e}")))?;
                for (v, c) in named {
                    let vi = gr
                        .vertex_index(&v)
                        .ok_or_else(|| Error::InvalidInput(format!("unknown vertex {v}")))?;
                    pinned.insert(vi, ts.color_index(&c)?);
                }
            }
            let named = |sol: &Vec<usize>| -> BTreeMap<&str, &str> {
                sol.iter()
                    .enumerate()
                    .map(|(v, &c)| (gr.vertices[v].as_str(), ts.colors[c].as_str()))
                    .collect()
            };
            let sols = enumerate_solutions(&gr, &ts, &pinned, limit.unwrap_or(1))?;
            match limit {
                None => Output::Json(json!({"solution": sols.first().map(named)})),
                Some(_) => Output::Json(json!({
                    "count": sols.len(),
                    "solutions": sols.iter().map(named).collect::<Vec<_>>(),
                })),
            }
        }
        Command::CompilePatterns { patterns } => {
            let ps = PatternSet::from_json(&parse_value(&read_source(&patterns)?, "patterns")?)?;
            let c = compile_patterns(&ps)?;
            let projection: BTreeMap<&str, &str> = c
                .tileset
                .colors
                .iter()
                .zip(&c.projection)
                .map(|(a, &b)| (a.as_str(), ps.colors[b].as_str()))
                .collect();
            Output::Json(json!({
                "tileset": c.tileset.to_json(),
                "projection": projection,
                "hull": c.hull.iter().map(|w| ps.render_word(w)).collect::<Vec<_>>(),
            }))
        }
        Command::Wang { tiles } => Output::Json(wang_to_tileset(&load_wang(&tiles)?)?.to_json()),
        Command::ComposeSeeded { main, ssu, marked } => {
            let m = load_tileset(&main)?;
            let s = load_tileset(&ssu)?;
            for c in &marked {
                s.color_index(c)?;
            }
            let proj: Vec<bool> = s.colors.iter().map(|c| marked.contains(c)).collect();
            Output::Json(compose_seeded(&m, &s, &proj)?.to_json())
        }
        Command::Localmark { label, others } => {
            let o: Vec<&str> = others.iter().map(String::as_str).collect();
            let (ts, marked) = local_mark_tileset(&label, &o);
            Output::Json(json!({
                "tileset": ts.to_json(),
                "marked": marked.iter().map(|&i| ts.colors[i].clone()).collect::<Vec<_>>(),
            }))
        }
        Command::Substitution { action } => match action {
            SubstitutionAction::Convert { substitution } => {
                let t = substitution_to_transducer(&load_substitution(&substitution)?)?;
                Output::Json(serde_json::to_value(t.to_json()).expect("serializable"))
            }
            SubstitutionAction::Classify { substitution } => {
                Output::Json(classify_substitution(&load_substitution(&substitution)?)?.to_json())
            }
        },
        Command::ComposeGrid { base, tiles } => Output::Json(grid_compose(&base, &load_wang(&tiles)?)?.to_json()),
        Command::Verify { name, extent } => Output::Json(verify_simulation_capped(&name, extent, g.max_extent)?.to_json()),
        Command::Gallery { action } => match action {
            GalleryAction::List => Output::Json(json!({
                "machines": gallery::MACHINES,
                "tilesets": gallery::TILESETS,
                "substitutions": gallery::SUBSTITUTIONS,
                "simulations": gallery::SIMULATIONS,
                "grid_bases": gallery::GRID_BASES,
            })),
            GalleryAction::Export { name } => {
                let name = gallery_name(&name).unwrap_or(&name);
                Output::Json(match gallery::builtin(name)? {
                    Builtin::Machine(t) => serde_json::to_value(t.to_json()).expect("serializable"),
                    Builtin::Tileset(ts) => ts.to_json(),
                    Builtin::Substitution(s) => s.to_json(),
                })
            }
        },
    })
}

fn emit(text: &str) -> ExitCode {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(_) => ExitCode::FAILURE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = cli.global;
    if let Some(n) = g.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("{}", json!({"error": "invalid_input", "detail": e.to_string()}));
            return ExitCode::from(2);
        }
    }
    match run(cli.command, g) {
        Ok(Output::Json(mut v)) => {
            if let Value::Object(m) = &mut v {
                m.insert(
                    "caps".into(),
                    json!({"max_iter": g.max_iter, "max_levels": g.max_levels, "max_extent": g.max_extent}),
                );
            }
            let text = if g.json {
                serde_json::to_string(&v)
            } else {
                serde_json::to_string_pretty(&v)
            }
            .expect("serializable");
            emit(&format!("{text}\n"))
        }
        Ok(Output::Text(t)) => emit(&t),
        Err(e) => {
            eprintln!("{}", json!({"error": e.code(), "detail": e.to_string()}));
            ExitCode::from(if e.is_cap() { 3 } else { 2 })
        }
    }
}

