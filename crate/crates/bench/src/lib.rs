//! Shared fixtures for benchmarks.

use selfsim::gallery::machines::{hanoi, odometer};
use selfsim::{nucleus, post_critical_set, Nucleus, PostCriticalWord, Tileset, Transducer};
use std::collections::BTreeSet;

pub fn machines() -> Vec<(&'static str, Transducer)> {
    vec![("odometer", odometer().unwrap()), ("hanoi", hanoi().unwrap())]
}

/// Nucleus and post-critical set of a bounded machine.
pub fn prepared(t: &Transducer) -> (Nucleus, BTreeSet<PostCriticalWord>) {
    let nuc = nucleus(t, 10_000).unwrap();
    let p = post_critical_set(&nuc).unwrap();
    (nuc, p)
}

/// Proper `k`-colouring over the non-identity nucleus labels.
pub fn proper_on_nucleus(nuc: &Nucleus, k: usize) -> Tileset {
    let names: Vec<String> = nuc.names().into_iter().skip(1).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    Tileset::proper_coloring(k, &refs)
}
