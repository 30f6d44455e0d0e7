//! Exact occurrence-count generating functions for a block of base-`b` digits.
//!
//! For a block `w` of `p` digits the crate computes:
//!
//! * the autocorrelation polynomial `A_w` and the rational generating series
//!   `Z_w(k)` counting strings with exactly `k` (possibly overlapping)
//!   occurrences of `w`, in closed form ([`genfun`]) and independently through
//!   a pattern-matching automaton ([`automaton`]);
//! * exact total masses (strings weighted by `b^-length`), including masses
//!   conditioned on a prefix;
//! * the discrete measures `mu_k` on `[0, 1)` and certified enclosures of the
//!   harmonic sums `S_w(k)` over integers with exactly `k` occurrences of `w`
//!   ([`kempner`]).
//!
//! Every identity is checked exactly against brute-force enumeration from
//! [`words`]; [`verify`] bundles those checks for a single block.

pub mod automaton;
pub mod error;
pub mod exactnum;
pub mod genfun;
pub mod kempner;
pub mod verify;
pub mod words;

pub use automaton::{mass_table, prefix_mass, stratified_gf, MassTable, OccurrenceAutomaton};
pub use error::{Error, Result};
pub use exactnum::{BigRational, Polynomial, RationalFunction};
pub use genfun::{autocorrelation, gf_k, gf_loop, gf_v0, gf_zero, mass, ClosedForms, Correlation};
pub use kempner::{BimalInterval, EncloseOptions, Enclosure};
pub use verify::{verify_block, VerifyConfig, VerifyReport};
pub use words::{Block, DigitString, EnumerationCap};
