//! Exact string matching on plain text and on level DAGs.
//!
//! The crate carries three families of engines that are meant to agree with
//! each other on every instance:
//!
//! * classical Shift-And on text and its level-DAG generalization
//!   ([`bitshift`]),
//! * a track-table simulation of the quantum bit-parallel algorithms
//!   ([`qtext`] for binary text, [`qgraph`] for level DAGs), built on the
//!   restricted simulator in [`qcore`] and the amplitude-amplification model
//!   in [`grover`],
//! * ground-truth oracles and seeded instance generators ([`oracle`]).

pub mod bench;
pub mod bitshift;
pub mod bitvec;
pub mod error;
pub mod graph;
pub mod grover;
pub mod label;
pub mod oracle;
pub mod qcore;
pub mod qgraph;
pub mod qtext;
pub mod rng;

pub use bitvec::{BitVector, MatchMatrix};
pub use error::{Error, Result};
pub use graph::LevelDag;
pub use label::{Alphabet, Label};
