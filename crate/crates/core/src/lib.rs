//! Quasiregular semigroup dynamics on the n-sphere.
//!
//! The crate builds explicit uniformly quasiregular families in dimensions
//! two and three and computes their Julia sets either exactly (radial
//! power-type families) or as attractors of iterated function systems
//! (Cantor shells, Antoine necklaces, conformal traps).
//!
//! Module map:
//!
//! - [`geometry`]: chordal metric, Möbius maps as primitive stacks, round annuli.
//! - [`zorich`]: the Zorich-type automorphic map `h` and its inverse branches.
//! - [`powermaps`]: stretches `A_{d,λ}` and the conjugated power maps `f_{d,λ}`.
//! - [`semigroup`]: word algebra, orbits, classification and invariance checks.
//! - [`ifs`]: contractive systems, chaos game, stage refinement, Moran dimension.
//! - [`constructions`]: Cantor shells, torus necklaces, conformal traps.
//! - [`perfectness`]: separating annuli, Hölder estimates, linear dilatation.
//! - [`cli`]: run configuration, subcommand execution, artifact writers.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod constructions;
pub mod error;
pub mod geometry;
pub mod ifs;
pub mod perfectness;
pub mod powermaps;
pub mod semigroup;
pub mod verify;
pub mod zorich;

pub use error::{Error, Result};
pub use geometry::{MobiusMap, Primitive, RoundAnnulus, SpherePoint};
