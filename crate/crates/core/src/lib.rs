//! Computations with self-similar groups acting on `m`-adic rooted trees.
//!
//! The crate is organised bottom-up:
//!
//! * [`perm`] and [`tree`]: permutations and finite-depth tree automorphisms
//!   ([`Portrait`]) with the section calculus.
//! * [`automaton`]: invertible Mealy automata and the automorphisms their
//!   states define.
//! * [`quotients`]: congruence quotients enumerated as finite groups,
//!   stabilizers and fractality tests.
//! * [`nucleus`]: exact element arithmetic for automaton groups, contracting
//!   nuclei and cyclicity certificates.
//! * [`shiftspace`]: the elementary abelian group `A`, sequences over `F_p`
//!   and the left shift.
//! * [`haar`]: Haar sampling and exact cone-measure counting.
//! * [`dynamics`]: Markov operator, Cesàro averages, Birkhoff experiments and
//!   hypercyclic elements.
//!
//! All actions are right actions and products are read left to right:
//! `v^(gh) = (v^g)^h`.

pub mod automaton;
pub mod dynamics;
pub mod error;
pub mod haar;
pub mod linalg;
pub mod nucleus;
pub mod perm;
pub mod quotients;
pub mod shiftspace;
pub mod tree;

pub use automaton::{MealyAutomaton, StateId};
pub use error::{Error, Result};
pub use perm::{Perm, PermGroup};
pub use quotients::{ConeSpec, Group, GroupSlice, GroupSource};

pub use tree::{Portrait, Vertex};

/// Exact rational numbers used for measures and averages.
pub type Rational = num_rational::BigRational;
