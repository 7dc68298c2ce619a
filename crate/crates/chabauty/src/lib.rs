//! Rank and dimension invariants, torus enumeration, and obstruction
//! verdicts for restriction-of-scalars Chabauty on punctured genus-0
//! curves, together with a small p-adic sieve for S-unit equations.
//!
//! Everything is exact: integers and rationals are arbitrary precision,
//! real embeddings are counted with Sturm chains, and p-adic numbers carry
//! explicit precision that shrinks through lossy steps instead of silently
//! rounding. See the book under `book/` for a guided tour.

pub mod bcp;
pub mod charrank;
pub mod cmwitness;
pub mod padic;
pub mod sieve;

pub mod cache;
pub mod config;
pub mod error;
pub mod poly;
pub mod report;

pub mod modp;
pub mod numfield;
pub mod primes;
pub mod puncture;
pub mod sturm;
pub mod zzfactor;

pub use error::{Error, Result};
pub use poly::{Poly, Q, Z};

// Compile the book's code blocks as doctests so the guide cannot drift
// from the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/fields-and-orbits.md")]
    mod fields_and_orbits {}
    #[doc = include_str!("../../../book/src/towers-and-tori.md")]
    mod towers_and_tori {}
    #[doc = include_str!("../../../book/src/verdicts.md")]
    mod verdicts {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    mod certificates {}
    #[doc = include_str!("../../../book/src/sunit-desk.md")]
    mod sunit_desk {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
