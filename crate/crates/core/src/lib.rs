pub mod contraction;
pub mod domino;
pub mod error;
pub mod gallery;
pub mod graph;
pub mod schreier;
pub mod transducer;

pub use contraction::{
    ancestor_structure, is_bounded, nucleus, post_critical_set, suffix_sets, treewidth_bound,
    Activity, AncestorStructure, Nucleus, PostCriticalWord, TreewidthBound,
};
pub use error::{Error, Result};
pub use graph::LabelledGraph;
pub use schreier::{ball_around_ray, build_graph, tree_decomposition, GraphKind, TreeDecomposition};
pub use transducer::{Alphabet, GroupElement, Letter, Ray, State, Transducer, Word};
pub use domino::{
    check_coloring, compile_patterns, compose_seeded, decide_pcf, enumerate_solutions,
    lambda_step, local_mark_tileset, propagate, solve_finite, wang_to_tileset, Decision,
    LambdaSet, PatternSet, Tileset, Verdict,
};
