//! Exact enumeration of balanced and pattern-avoiding binary matrices.
//!
//! * [`symfunc`] counts balanced `2k x 2n` matrices through powers of the
//!   elementary symmetric polynomial, modulo primes with CRT recombination.
//! * [`automaton`] counts `k x n` matrices over any alphabet that avoid
//!   forbidden factors in rows and columns (transfer-matrix method).
//! * [`balanced`] combines both: balanced matrices that also avoid patterns.
//! * [`recurrence`] guesses, verifies and unrolls linear recurrences.
//! * [`oeis`] reads b-files and compares term streams against them.
//! * [`puzzle`] solves and generates Not-Alone puzzles.

pub mod arith;
pub mod automaton;
pub mod cli;
pub mod balanced;
pub mod error;
pub mod format;
pub mod oeis;
pub mod puzzle;
pub mod recurrence;
pub mod symfunc;

pub use error::{Error, Result};

/// Upper bound on the working memory of a single counting run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MemoryCap(usize);

impl MemoryCap {
    pub const fn from_bytes(bytes: usize) -> Self {
        MemoryCap(bytes)
    }

    pub const fn from_gib(gib: usize) -> Self {
        MemoryCap(gib << 30)
    }

    pub fn bytes(self) -> usize {
        self.0
    }

    /// Parses `123`, `512M`, `16G` and similar (binary units).
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let (digits, shift) = match t.char_indices().last() {
            Some((i, 'k' | 'K')) => (&t[..i], 10),
            Some((i, 'm' | 'M')) => (&t[..i], 20),
            Some((i, 'g' | 'G')) => (&t[..i], 30),
            Some((i, 't' | 'T')) => (&t[..i], 40),
            _ => (t, 0),
        };
        let value: usize = digits
            .parse()
            .map_err(|_| Error::invalid(format!("bad memory size {text:?}")))?;
        value
            .checked_mul(1usize << shift)
            .map(MemoryCap)
            .ok_or_else(|| Error::invalid(format!("memory size {text:?} overflows")))
    }
}

impl Default for MemoryCap {
    fn default() -> Self {
        MemoryCap::from_gib(4)
    }
}
