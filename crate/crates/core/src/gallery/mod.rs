//! Concrete machines, tilesets, substitutions and verifiers.

pub mod machines;
pub mod substitution;
pub mod tilesets;
pub mod verify;

use crate::domino::Tileset;
use crate::error::{Error, Result};
use crate::transducer::Transducer;

pub use substitution::{
    builtin_substitution, classify_substitution, substitution_to_transducer, ConnectivityVerdict, Substitution,
    SubstitutionClass, SUBSTITUTIONS,
};
pub use tilesets::{builtin_tileset, grid_compose, GRID_BASES, TILESETS};
pub use verify::{verify_simulation, verify_simulation_capped, VerifyReport, SIMULATIONS};

pub const MACHINES: &[&str] = &["odometer", "hanoi", "longrange", "hgraph"];

pub fn builtin_machine(name: &str) -> Result<Transducer> {
    match name {
        "odometer" => machines::odometer(),
        "hanoi" => machines::hanoi(),
        "longrange" => machines::longrange(),
        "hgraph" => machines::hgraph(),
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

/// A named gallery object.
#[derive(Clone, Debug)]
pub enum Builtin {
    Machine(Transducer),
    Tileset(Tileset),
    Substitution(Substitution),
}

/// Resolves machines first, then tilesets, then substitutions.
pub fn builtin(name: &str) -> Result<Builtin> {
    if let Ok(t) = builtin_machine(name) {
        return Ok(Builtin::Machine(t));
    }
    if let Ok(ts) = builtin_tileset(name) {
        return Ok(Builtin::Tileset(ts));
    }
    builtin_substitution(name)
        .map(Builtin::Substitution)
        .map_err(|_| Error::UnknownName(name.to_string()))
}
