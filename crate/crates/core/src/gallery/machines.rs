//! Transducers from the gallery.

use crate::error::Result;
use crate::transducer::Transducer;

/// Binary odometer: `t` adds one, least significant letter first.
pub fn odometer() -> Result<Transducer> {
    Transducer::from_table(
        &["0", "1"],
        "e",
        &[
            ("t", true, &[("0", "1", "e"), ("1", "0", "t")]),
            ("e", true, &[("0", "0", "e"), ("1", "1", "e")]),
        ],
        &["t"],
    )
}

/// Three-peg Hanoi towers group.
pub fn hanoi() -> Result<Transducer> {
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
}

/// Odometer together with the directed state `u`; its orbit of `0^∞` is the long range graph.
pub fn longrange() -> Result<Transducer> {
    Transducer::from_table(
        &["0", "1"],
        "e",
        &[
            ("t", true, &[("0", "1", "e"), ("1", "0", "t")]),
            ("u", true, &[("0", "0", "u"), ("1", "1", "t")]),
            ("e", true, &[("0", "0", "e"), ("1", "1", "e")]),
        ],
        &["t", "u"],
    )
}

/// Machine of the horocyclic product graph over the letters `00,01,10,11`.
pub fn hgraph() -> Result<Transducer> {
    Transducer::from_table(
        &["00", "01", "10", "11"],
        "e",
        &[
            (
                "x",
                true,
                &[
                    ("10", "00", "e"),
                    ("11", "01", "e"),
                    ("00", "10", "e"),
                    ("01", "11", "e"),
                ],
            ),
            (
                "y",
                true,
                &[
                    ("00", "00", "y"),
                    ("10", "10", "x"),
                    ("01", "01", "e"),
                    ("11", "11", "e"),
                ],
            ),
            (
                "z",
                true,
                &[
                    ("01", "00", "z"),
                    ("11", "10", "z"),
                    ("00", "01", "e"),
                    ("10", "11", "e"),
                ],
            ),
            (
                "e",
                true,
                &[
                    ("00", "00", "e"),
                    ("01", "01", "e"),
                    ("10", "10", "e"),
                    ("11", "11", "e"),
                ],
            ),
        ],
        &["x", "y", "z"],
    )
}
