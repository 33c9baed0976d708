//! Reversible one-dimensional cellular automata.
//!
//! The crate covers the basic machinery (alphabets, eventually periodic
//! configurations, automata and their compositions), decision procedures
//! for injectivity and surjectivity, finite-time Lyapunov exponents, the
//! multiplication automata, Wang tiles, and the reduction from the local
//! immortality problem to the question of whether a reversible automaton
//! has a positive exponent.

pub mod alphabet;
pub mod analysis;
pub mod ca;
pub mod config;
pub mod diagram;
pub mod error;
pub mod format;
pub mod mult;
pub mod reduction;
pub mod tiles;

pub use alphabet::{Alphabet, Sym};
pub use ca::{CellularAutomaton, GlobalMap};
pub use config::Configuration;
pub use diagram::SpaceTimeDiagram;
pub use error::{Error, Result};
