//! Balanced binary matrices that also avoid forbidden factors.
//!
//! A `2k x 2n` matrix is built one balanced, vertically admissible column at
//! a time. The state after some columns is the tuple of row automaton states
//! together with the number of ones placed in every row; at the end only the
//! states with every row sum equal to `n` count.

use num_bigint::BigUint;
use rustc_hash::FxHashMap;

use crate::automaton::{column_letters, Alphabet, Pattern, PatternSystem, RowAutomaton};
use crate::error::{Error, Result};
use crate::symfunc::{basis_above, crt_terms};
use crate::MemoryCap;

/// Approximate heap cost of one hash map entry (key, weight, control bytes
/// and load-factor slack).
const BYTES_PER_STATE: usize = 48;

/// Binary words of length `2k` with exactly `k` ones that avoid `vertical`,
/// in lexicographic order.
pub fn balanced_columns(vertical: &[Pattern], k: usize) -> Result<Vec<Vec<u8>>> {
    if k == 0 {
        return Err(Error::invalid("k must be positive"));
    }
    let letters = column_letters(&Alphabet::binary(), vertical, 2 * k)?;
    Ok(letters
        .letters
        .into_iter()
        .filter(|c| c.iter().filter(|&&x| x == 1).count() == k)
        .collect())
}

fn require_binary(system: &PatternSystem) -> Result<()> {
    if !system.is_binary() {
        return Err(Error::invalid("balanced counting needs the alphabet {0, 1}"));
    }
    Ok(())
}

fn bits_for(values: usize) -> u32 {
    usize::BITS - values.saturating_sub(1).leading_zeros()
}

/// Packs `(row_states, row_sums)` into one `u128`.
#[derive(Clone, Copy, Debug)]
struct KeyLayout {
    rows: usize,
    state_bits: u32,
    sum_bits: u32,
}

impl KeyLayout {
    fn new(rows: usize, live_states: usize, max_sum: usize) -> Result<Self> {
        let layout = KeyLayout {
            rows,
            state_bits: bits_for(live_states).max(1),
            sum_bits: bits_for(max_sum + 1).max(1),
        };
        if rows as u32 * (layout.state_bits + layout.sum_bits) > 128 {
            return Err(Error::invalid(format!(
                "{rows} rows with {live_states} automaton states do not fit the state key"
            )));
        }
        Ok(layout)
    }

    fn field(self) -> u32 {
        self.state_bits + self.sum_bits
    }

    #[inline]
    fn state(self, key: u128, row: usize) -> u32 {
        ((key >> (row as u32 * self.field())) & ((1u128 << self.state_bits) - 1)) as u32
    }

    #[inline]
    fn sum(self, key: u128, row: usize) -> usize {
        ((key >> (row as u32 * self.field() + self.state_bits)) & ((1u128 << self.sum_bits) - 1)) as usize
    }

    #[inline]
    fn pack(self, states: &[u32], sums: &[usize]) -> u128 {
        let mut key = 0u128;
        for row in (0..self.rows).rev() {
            key <<= self.field();
            key |= (sums[row] as u128) << self.state_bits | states[row] as u128;
        }
        key
    }
}

/// Counts `2k x 2n` matrices for one `n`, with weights reduced modulo
/// `modulus` when given and exact in `u128` otherwise.
fn count_one(
    automaton: &RowAutomaton,
    columns: &[Vec<u8>],
    k: usize,
    n: usize,
    modulus: Option<u64>,
    cap: MemoryCap,
) -> Result<u128> {
    let rows = 2 * k;
    let width = 2 * n;
    let layout = KeyLayout::new(rows, automaton.live_states(), n)?;
    let mut weights: FxHashMap<u128, u128> = FxHashMap::default();
    weights.insert(layout.pack(&vec![RowAutomaton::START; rows], &vec![0; rows]), 1);
    let mut states = vec![0u32; rows];
    let mut sums = vec![0usize; rows];
    for consumed in 1..=width {
        let remaining = width - consumed;
        let mut next: FxHashMap<u128, u128> = FxHashMap::default();
        for (&key, &w) in &weights {
            'column: for col in columns {
                for row in 0..rows {
                    let s = automaton.step(layout.state(key, row), col[row]);
                    let total = layout.sum(key, row) + col[row] as usize;
                    if s == RowAutomaton::DEAD || total > n || n - total > remaining {
                        continue 'column;
                    }
                    states[row] = s;
                    sums[row] = total;
                }
                let slot = next.entry(layout.pack(&states, &sums)).or_insert(0);
                *slot = match modulus {
                    Some(p) => (*slot + w) % p as u128,
                    None => *slot + w,
                };
            }
            if next.len().saturating_mul(BYTES_PER_STATE) > cap.bytes() {
                return Err(Error::ResourceLimit {
                    completed: 0,
                    partial: Vec::new(),
                    reason: format!(
                        "more than {} states after {consumed} of {width} columns",
                        next.len()
                    ),
                });
            }
        }
        weights = next;
    }
    // Pruning leaves only states whose rows all sum to n.
    Ok(match modulus {
        Some(p) => weights.values().fold(0, |acc, &w| (acc + w) % p as u128),
        None => weights.values().sum(),
    })
}

/// Number of balanced `2k x 2n` binary matrices whose rows avoid `H` and
/// whose columns avoid `V`, for `n = 1..=N`.
///
/// When the memory cap is hit, the error carries every finished term.
pub fn balanced_avoid_terms(
    system: &PatternSystem,
    k: usize,
    count: usize,
    cap: MemoryCap,
) -> Result<Vec<BigUint>> {
    require_binary(system)?;
    if count == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    let automaton = system.row_automaton()?;
    let columns = balanced_columns(&system.vertical, k)?;
    let mut out: Vec<BigUint> = Vec::with_capacity(count);
    for n in 1..=count {
        match count_term(&automaton, &columns, k, n, cap) {
            Ok(t) => out.push(t),
            Err(Error::ResourceLimit { reason, .. }) => {
                return Err(Error::ResourceLimit {
                    completed: out.len(),
                    partial: out,
                    reason,
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn count_term(
    automaton: &RowAutomaton,
    columns: &[Vec<u8>],
    k: usize,
    n: usize,
    cap: MemoryCap,
) -> Result<BigUint> {
    // Every partial weight is at most |columns|^(columns consumed).
    let bound = BigUint::from(columns.len().max(1)).pow(2 * n as u32);
    if bound.bits() < 127 {
        return count_one(automaton, columns, k, n, None, cap).map(BigUint::from);
    }
    let basis = basis_above(bound);
    let residues = basis
        .primes
        .iter()
        .map(|&p| count_one(automaton, columns, k, n, Some(p), cap).map(|r| vec![r as u64]))
        .collect::<Result<Vec<_>>>()?;
    Ok(crt_terms(&residues, &basis.primes, 1)?.remove(0))
}

/// A fully filled binary grid; bit `j` of `rows[i]` is the entry in row `i`,
/// column `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitGrid {
    pub height: usize,
    pub width: usize,
    pub rows: Vec<u64>,
}

impl BitGrid {
    pub fn get(&self, i: usize, j: usize) -> u8 {
        ((self.rows[i] >> j) & 1) as u8
    }

    pub fn row(&self, i: usize) -> Vec<u8> {
        (0..self.width).map(|j| self.get(i, j)).collect()
    }

    pub fn column(&self, j: usize) -> Vec<u8> {
        (0..self.height).map(|i| self.get(i, j)).collect()
    }

    pub fn row_strings(&self) -> Vec<String> {
        (0..self.height)
            .map(|i| self.row(i).iter().map(|&b| char::from(b'0' + b)).collect())
            .collect()
    }

    pub fn from_row_strings(rows: &[&str]) -> Result<Self> {
        let width = rows.first().map_or(0, |r| r.len());
        if width > 64 {
            return Err(Error::invalid("rows longer than 64 cells"));
        }
        let mut bits = Vec::with_capacity(rows.len());
        for r in rows {
            if r.len() != width {
                return Err(Error::invalid("rows have different lengths"));
            }
            let mut v = 0u64;
            for (j, c) in r.chars().enumerate() {
                match c {
                    '0' => {}
                    '1' => v |= 1 << j,
                    other => return Err(Error::invalid(format!("unexpected cell {other:?}"))),
                }
            }
            bits.push(v);
        }
        Ok(BitGrid {
            height: rows.len(),
            width,
            rows: bits,
        })
    }

    pub fn complement(&self) -> BitGrid {
        let mask = if self.width == 64 { u64::MAX } else { (1u64 << self.width) - 1 };
        BitGrid {
            rows: self.rows.iter().map(|r| !r & mask).collect(),
            ..self.clone()
        }
    }

    pub fn mirror_rows(&self) -> BitGrid {
        BitGrid {
            rows: self
                .rows
                .iter()
                .map(|r| r.reverse_bits() >> (64 - self.width))
                .collect(),
            ..self.clone()
        }
    }

    pub fn mirror_columns(&self) -> BitGrid {
        BitGrid {
            rows: self.rows.iter().rev().copied().collect(),
            ..self.clone()
        }
    }
}

/// Every balanced `2k x 2n` grid avoiding the system's patterns, ordered by
/// its column sequence (columns compared lexicographically).
pub fn catalog_grids(system: &PatternSystem, k: usize, n: usize, cap: MemoryCap) -> Result<Vec<BitGrid>> {
    require_binary(system)?;
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    if 2 * n > 64 {
        return Err(Error::invalid("grids wider than 64 columns are not supported"));
    }
    let automaton = system.row_automaton()?;
    let columns = balanced_columns(&system.vertical, k)?;
    let rows = 2 * k;
    let max_grids = cap.bytes() / (rows * 8 + std::mem::size_of::<BitGrid>()).max(1);

    struct Walk<'a> {
        automaton: &'a RowAutomaton,
        columns: &'a [Vec<u8>],
        n: usize,
        rows: usize,
        max_grids: usize,
        bits: Vec<u64>,
        out: Vec<BitGrid>,
    }

    impl Walk<'_> {
        fn go(&mut self, col: usize, states: &[u32], sums: &[usize]) -> Result<()> {
            let width = 2 * self.n;
            if col == width {
                if self.out.len() == self.max_grids {
                    return Err(Error::ResourceLimit {
                        completed: 0,
                        partial: Vec::new(),
                        reason: format!("catalog exceeds {} grids", self.max_grids),
                    });
                }
                self.out.push(BitGrid {
                    height: self.rows,
                    width,
                    rows: self.bits.clone(),
                });
                return Ok(());
            }
            let remaining = width - col - 1;
            let mut ns = vec![0u32; self.rows];
            let mut nsum = vec![0usize; self.rows];
            'column: for letter in self.columns {
                for r in 0..self.rows {
                    let s = self.automaton.step(states[r], letter[r]);
                    let total = sums[r] + letter[r] as usize;
                    if s == RowAutomaton::DEAD || total > self.n || self.n - total > remaining {
                        continue 'column;
                    }
                    ns[r] = s;
                    nsum[r] = total;
                }
                for r in 0..self.rows {
                    self.bits[r] |= (letter[r] as u64) << col;
                }
                let result = self.go(col + 1, &ns.clone(), &nsum.clone());
                for r in 0..self.rows {
                    self.bits[r] &= !(1u64 << col);
                }
                result?;
            }
            Ok(())
        }
    }

    let mut walk = Walk {
        automaton: &automaton,
        columns: &columns,
        n,
        rows,
        max_grids,
        bits: vec![0; rows],
        out: Vec::new(),
    };
    walk.go(0, &vec![RowAutomaton::START; rows], &vec![0; rows])?;
    Ok(walk.out)
}

/// All legal square `2k x 2k` grids.
pub fn catalog_full_grids(system: &PatternSystem, k: usize, cap: MemoryCap) -> Result<Vec<BitGrid>> {
    catalog_grids(system, k, k, cap)
}

pub fn catalog_to_json(grids: &[BitGrid]) -> String {
    let rows: Vec<Vec<String>> = grids.iter().map(BitGrid::row_strings).collect();
    serde_json::to_string(&rows).expect("plain data")
}
