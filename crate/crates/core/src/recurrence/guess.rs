//! Recurrence guessing by ansatz fitting.
//!
//! For a cell `(L, d)` the unknowns are the `(L+1)(d+1)` coefficients of
//! `p_0, ..., p_L`, and every index `n` with `a(n), ..., a(n+L)` available
//! contributes one linear equation. The first equations are solved modulo
//! primes, the solution is lifted by CRT and rational reconstruction, and the
//! lifted recurrence is checked exactly on the fitting equations and then on
//! the held-out equations at the end of the data.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::linalg::ModMatrix;
use super::{CFiniteRecurrence, PolyRecurrence, Sequence};
use crate::arith::{crt_combine, mul_mod, primes_below_ceiling, rational_reconstruct, reduce};
use crate::error::{Error, Result};

/// Give up lifting a cell after this many primes.
const MAX_PRIMES: usize = 400;

/// Order in which `(order, degree)` cells are tried.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SearchOrder {
    /// Smallest order first, then smallest degree.
    #[default]
    OrderThenDegree,
    /// Fewest unknowns `(L+1)(d+1)` first, then smallest order. Trades a
    /// higher order for a lower degree when that is cheaper to fit.
    FewestUnknowns,
}

/// What a guesser found and how much evidence backs it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuessReport {
    pub recurrence: Option<PolyRecurrence>,
    pub terms_supplied: usize,
    /// Unknowns of the returned cell, or of the largest cell tried.
    pub unknowns: usize,
    /// Equations the fit was solved on.
    pub fit_equations: usize,
    /// Equations not used for fitting that the recurrence also satisfies.
    pub held_out: usize,
    /// Requested number of held-out equations: `max(10, ceil(T/10))`.
    pub margin: usize,
    pub margin_met: bool,
    pub cells_tried: usize,
    pub notes: Vec<String>,
}

impl GuessReport {
    pub fn found(&self) -> bool {
        self.recurrence.is_some()
    }

    pub fn cfinite(&self) -> Option<CFiniteRecurrence> {
        self.recurrence.as_ref().and_then(CFiniteRecurrence::from_poly)
    }
}

pub(crate) fn margin_for(terms: usize) -> usize {
    10usize.max(terms.div_ceil(10))
}

/// Minimal-order constant-coefficient recurrence with `L <= max_order`.
///
/// Needs at least `2 * max_order + 5` terms.
pub fn guess_cfinite(seq: &Sequence, max_order: usize) -> Result<GuessReport> {
    if max_order == 0 {
        return Err(Error::invalid("maximum order must be positive"));
    }
    let need = 2 * max_order + 5;
    if seq.len() < need {
        return Err(Error::NeedsMoreData {
            shortfall: need - seq.len(),
            reason: format!("order up to {max_order} needs {need} terms"),
        });
    }
    let cells: Vec<(usize, usize)> = (1..=max_order).map(|l| (l, 0)).collect();
    Ok(search(seq, &cells))
}

pub fn guess_precursive(seq: &Sequence, max_order: usize, max_degree: usize) -> Result<GuessReport> {
    guess_precursive_with(seq, max_order, max_degree, SearchOrder::default())
}

/// Polynomial-coefficient recurrence search over `1 <= L <= max_order`,
/// `0 <= d <= max_degree`.
///
/// Needs `(max_order+1)(max_degree+1) + max_order` terms so that every cell
/// has at least as many equations as unknowns. Cells with fewer held-out
/// equations than the margin are still tried; the report says so.
pub fn guess_precursive_with(
    seq: &Sequence,
    max_order: usize,
    max_degree: usize,
    order: SearchOrder,
) -> Result<GuessReport> {
    if max_order == 0 {
        return Err(Error::invalid("maximum order must be positive"));
    }
    let need = (max_order + 1) * (max_degree + 1) + max_order;
    if seq.len() < need {
        return Err(Error::NeedsMoreData {
            shortfall: need - seq.len(),
            reason: format!(
                "order {max_order} and degree {max_degree} give {} unknowns; {need} terms are needed",
                (max_order + 1) * (max_degree + 1)
            ),
        });
    }
    let mut cells: Vec<(usize, usize)> = (1..=max_order)
        .flat_map(|l| (0..=max_degree).map(move |d| (l, d)))
        .collect();
    if order == SearchOrder::FewestUnknowns {
        cells.sort_by_key(|&(l, d)| ((l + 1) * (d + 1), l));
    }
    Ok(search(seq, &cells))
}

enum Cell {
    Found(PolyRecurrence),
    RuledOut,
    Undetermined(String),
}

fn search(seq: &Sequence, cells: &[(usize, usize)]) -> GuessReport {
    let terms = seq.len();
    let margin = margin_for(terms);
    let mut report = GuessReport {
        recurrence: None,
        terms_supplied: terms,
        unknowns: 0,
        fit_equations: 0,
        held_out: 0,
        margin,
        margin_met: false,
        cells_tried: 0,
        notes: Vec::new(),
    };
    for &(l, d) in cells {
        let unknowns = (l + 1) * (d + 1);
        let equations = terms.saturating_sub(l);
        if equations < unknowns {
            report
                .notes
                .push(format!("order {l}, degree {d}: {unknowns} unknowns but only {equations} equations"));
            continue;
        }
        let fit = equations.saturating_sub(margin).max(unknowns);
        report.cells_tried += 1;
        report.unknowns = report.unknowns.max(unknowns);
        match try_cell(seq, l, d, fit) {
            Cell::RuledOut => {}
            Cell::Undetermined(why) => report.notes.push(format!("order {l}, degree {d}: {why}")),
            Cell::Found(rec) => {
                let held = equations - fit;
                report.unknowns = unknowns;
                report.fit_equations = fit;
                report.held_out = held;
                report.margin_met = held >= margin;
                if !report.margin_met {
                    report.notes.push(format!(
                        "only {held} held-out equations; {margin} requested"
                    ));
                }
                report.recurrence = Some(rec);
                return report;
            }
        }
    }
    report
}

fn pow_mod_signed(n: i64, j: usize, p: u64) -> u64 {
    let base = (n as i128).rem_euclid(p as i128) as u64;
    (0..j).fold(1 % p, |acc, _| mul_mod(acc, base, p))
}

/// Solves the first `fit` equations of cell `(l, d)`, then checks every
/// remaining equation exactly.
fn try_cell(seq: &Sequence, l: usize, d: usize, fit: usize) -> Cell {
    let cols = (l + 1) * (d + 1);
    let mut residues: Vec<Vec<u64>> = Vec::new();
    let mut primes: Vec<u64> = Vec::new();
    let mut free_col: Option<usize> = None;
    let mut wide = 0;
    for p in primes_below_ceiling().take(MAX_PRIMES) {
        let mut m = ModMatrix::zeros(fit, cols, p);
        for row in 0..fit {
            let n = seq.offset + row as i64;
            for i in 0..=l {
                let a = reduce(&seq.terms[row + i], p);
                for j in 0..=d {
                    m.set(row, i * (d + 1) + j, mul_mod(a, pow_mod_signed(n, j, p), p));
                }
            }
        }
        let basis = m.nullspace();
        match basis.len() {
            0 => return Cell::RuledOut,
            1 => {}
            dim => {
                wide += 1;
                if wide >= 2 {
                    return Cell::Undetermined(format!("solution space has dimension {dim}"));
                }
                continue;
            }
        }
        let (f, v) = basis.into_iter().next().expect("one basis vector");
        match free_col {
            None => free_col = Some(f),
            Some(g) if g != f => continue,
            Some(_) => {}
        }
        residues.push(v);
        primes.push(p);
        if let Some(coeffs) = lift(&residues, &primes) {
            if satisfies(seq, l, d, &coeffs, 0..fit) {
                let equations = seq.len() - l;
                if !satisfies(seq, l, d, &coeffs, fit..equations) {
                    return Cell::RuledOut;
                }
                let polys = coeffs
                    .chunks(d + 1)
                    .map(|c| c.iter().map(|x| BigRational::from_integer(x.clone())).collect())
                    .collect();
                return match PolyRecurrence::new(polys) {
                    Ok(rec) => Cell::Found(rec),
                    // Leading polynomial vanishes: really a lower order.
                    Err(_) => Cell::RuledOut,
                };
            }
        }
    }
    Cell::Undetermined(format!("no exact lift after {MAX_PRIMES} primes"))
}

/// Reconstructs a rational vector from per-prime residues and scales it to
/// coprime integers.
fn lift(residues: &[Vec<u64>], primes: &[u64]) -> Option<Vec<BigInt>> {
    let cols = residues[0].len();
    let modulus: BigInt = primes.iter().fold(BigInt::one(), |acc, &p| acc * p);
    let mut rationals = Vec::with_capacity(cols);
    let mut column = vec![0u64; primes.len()];
    for c in 0..cols {
        for (slot, r) in column.iter_mut().zip(residues) {
            *slot = r[c];
        }
        let value = BigInt::from(crt_combine(&column, primes).ok()?);
        rationals.push(rational_reconstruct(&value, &modulus)?);
    }
    let lcm = rationals.iter().fold(BigInt::one(), |acc, (_, den)| acc.lcm(den));
    let ints: Vec<BigInt> = rationals.iter().map(|(num, den)| num * (&lcm / den)).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return None;
    }
    Some(ints.into_iter().map(|x| x / &g).collect())
}

fn satisfies(seq: &Sequence, l: usize, d: usize, coeffs: &[BigInt], rows: std::ops::Range<usize>) -> bool {
    rows.into_iter().all(|row| {
        let n = BigInt::from(seq.offset + row as i64);
        let mut acc = BigInt::zero();
        for i in 0..=l {
            let poly = coeffs[i * (d + 1)..(i + 1) * (d + 1)]
                .iter()
                .rev()
                .fold(BigInt::zero(), |acc, c| acc * &n + c);
            acc += poly * &seq.terms[row + i];
        }
        acc.is_zero()
    })
}
