//! Linear recurrences with constant or polynomial coefficients.
//!
//! A [`PolyRecurrence`] of order `L` states `sum_i p_i(n) a(n+i) = 0`, where
//! `n` is the actual index of the sequence (not a position in a term list).
//! Everything here is exact: coefficients are rationals, and the guessers
//! work modulo word-sized primes and lift with rational reconstruction.

mod gf;
mod guess;
mod linalg;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use gf::{gf_from_cfinite, RationalGF};
pub use guess::{guess_cfinite, guess_precursive, guess_precursive_with, GuessReport, SearchOrder};

/// Consecutive terms `a(offset), a(offset + 1), ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sequence {
    pub offset: i64,
    pub terms: Vec<BigInt>,
}

impl Sequence {
    pub fn new(offset: i64, terms: Vec<BigInt>) -> Self {
        Sequence { offset, terms }
    }

    pub fn from_unsigned(offset: i64, terms: &[num_bigint::BigUint]) -> Self {
        Sequence::new(offset, terms.iter().cloned().map(BigInt::from).collect())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Index of the last term; `offset - 1` when empty.
    pub fn last_index(&self) -> i64 {
        self.offset + self.terms.len() as i64 - 1
    }

    pub fn get(&self, n: i64) -> Option<&BigInt> {
        let i = n.checked_sub(self.offset)?;
        usize::try_from(i).ok().and_then(|i| self.terms.get(i))
    }

    pub fn prefix(&self, len: usize) -> Sequence {
        Sequence::new(self.offset, self.terms[..len.min(self.terms.len())].to_vec())
    }
}

/// Evaluates an ascending coefficient list at `x`.
pub(crate) fn eval_poly(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    coeffs
        .iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// `sum_i p_i(n) a(n+i) = 0` with `p_L` not identically zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyRecurrence {
    coeffs: Vec<Vec<BigRational>>,
}

impl PolyRecurrence {
    /// `coeffs[i]` lists the coefficients of `p_i` in ascending powers of `n`.
    pub fn new(mut coeffs: Vec<Vec<BigRational>>) -> Result<Self> {
        for p in &mut coeffs {
            while p.last().is_some_and(Zero::is_zero) {
                p.pop();
            }
        }
        match coeffs.last() {
            None => Err(Error::invalid("a recurrence needs at least one coefficient")),
            Some(lead) if lead.is_empty() => Err(Error::invalid(
                "leading coefficient polynomial is identically zero",
            )),
            Some(_) => Ok(PolyRecurrence { coeffs }),
        }
    }

    pub fn from_integers(coeffs: &[&[i64]]) -> Result<Self> {
        PolyRecurrence::new(
            coeffs
                .iter()
                .map(|p| p.iter().map(|&c| BigRational::from_integer(c.into())).collect())
                .collect(),
        )
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().map(|p| p.len().saturating_sub(1)).max().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[Vec<BigRational>] {
        &self.coeffs
    }

    pub fn eval_coeff(&self, i: usize, n: i64) -> BigRational {
        eval_poly(&self.coeffs[i], &BigRational::from_integer(n.into()))
    }

    /// `sum_i p_i(n) a(n+i)`, or `None` when `seq` lacks a needed term.
    pub fn residual(&self, seq: &Sequence, n: i64) -> Option<BigRational> {
        let mut acc = BigRational::zero();
        for i in 0..=self.order() {
            let a = seq.get(n + i as i64)?;
            acc += self.eval_coeff(i, n) * BigRational::from_integer(a.clone());
        }
        Some(acc)
    }

    /// Scales to coprime integer coefficients with a positive leading entry.
    pub fn normalized(&self) -> PolyRecurrence {
        let flat: Vec<&BigRational> = self.coeffs.iter().flatten().collect();
        let lcm = flat
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<Vec<BigInt>> = self
            .coeffs
            .iter()
            .map(|p| p.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect())
            .collect();
        let gcd = ints.iter().flatten().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let lead_sign = self.coeffs.last().and_then(|p| p.last()).is_some_and(|c| c.is_negative());
        let scale = if lead_sign { -gcd } else { gcd };
        PolyRecurrence {
            coeffs: ints
                .into_iter()
                .map(|p| p.into_iter().map(|c| BigRational::from_integer(c / &scale)).collect())
                .collect(),
        }
    }

    /// True when both recurrences have the same order and one coefficient
    /// vector is a nonzero rational multiple of the other.
    pub fn is_proportional_to(&self, other: &PolyRecurrence) -> bool {
        if self.order() != other.order() {
            return false;
        }
        let degree = self.degree().max(other.degree());
        let flatten = |r: &PolyRecurrence| -> Vec<BigRational> {
            r.coeffs
                .iter()
                .flat_map(|p| (0..=degree).map(move |j| p.get(j).cloned().unwrap_or_else(BigRational::zero)))
                .collect()
        };
        let (a, b) = (flatten(self), flatten(other));
        let Some(pivot) = a.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        if b[pivot].is_zero() {
            return false;
        }
        let ratio = &b[pivot] / &a[pivot];
        a.iter().zip(&b).all(|(x, y)| &(x * &ratio) == y)
    }

    pub fn to_json(&self) -> String {
        let doc = RecurrenceDoc {
            order: self.order(),
            degree: self.degree(),
            coeffs: self
                .coeffs
                .iter()
                .map(|p| p.iter().map(ToString::to_string).collect())
                .collect(),
        };
        serde_json::to_string(&doc).expect("plain data")
    }

    /// Reads `{"order":L, "degree":d, "coeffs":[["c0","c1",...], ...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: RecurrenceDoc = serde_json::from_str(text)?;
        if doc.coeffs.len() != doc.order + 1 {
            return Err(Error::invalid(format!(
                "order {} needs {} coefficient lists, found {}",
                doc.order,
                doc.order + 1,
                doc.coeffs.len()
            )));
        }
        let mut coeffs = Vec::with_capacity(doc.coeffs.len());
        for p in &doc.coeffs {
            if p.len() > doc.degree + 1 {
                return Err(Error::invalid(format!(
                    "coefficient list longer than degree {} allows",
                    doc.degree
                )));
            }
            coeffs.push(
                p.iter()
                    .map(|s| {
                        BigRational::from_str(s.trim())
                            .map_err(|_| Error::invalid(format!("bad coefficient {s:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        PolyRecurrence::new(coeffs)
    }
}

impl fmt::Display for PolyRecurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, p) in self.coeffs.iter().enumerate() {
            if p.is_empty() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let shift = if i == 0 { "n".to_string() } else { format!("n+{i}") };
            write!(f, "({}) a({shift})", format_poly(p, "n"))?;
        }
        write!(f, " = 0")
    }
}

pub(crate) fn format_poly(p: &[BigRational], var: &str) -> String {
    let mut parts = Vec::new();
    for (j, c) in p.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mono = match j {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{j}"),
        };
        let coef = if mono.is_empty() {
            c.abs().to_string()
        } else if c.abs().is_one() {
            String::new()
        } else {
            format!("{}*", c.abs())
        };
        let sign = if c.is_negative() { "-" } else { "+" };
        parts.push((sign, format!("{coef}{mono}")));
    }
    if parts.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (sign, body)) in parts.iter().enumerate() {
        match (i, *sign) {
            (0, "-") => out.push('-'),
            (0, _) => {}
            (_, s) => {
                out.push(' ');
                out.push_str(s);
                out.push(' ');
            }
        }
        out.push_str(body);
    }
    out
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecurrenceDoc {
    order: usize,
    degree: usize,
    coeffs: Vec<Vec<String>>,
}

/// `sum_{i=0}^{L} c_i a(n+i) = 0` normalized so that `c_L = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CFiniteRecurrence {
    coeffs: Vec<BigRational>,
}

impl CFiniteRecurrence {
    pub fn new(coeffs: Vec<BigRational>) -> Result<Self> {
        let lead = coeffs
            .iter()
            .rposition(|c| !c.is_zero())
            .ok_or_else(|| Error::invalid("all coefficients are zero"))?;
        let scale = coeffs[lead].clone();
        Ok(CFiniteRecurrence {
            coeffs: coeffs[..=lead].iter().map(|c| c / &scale).collect(),
        })
    }

    pub fn from_integers(coeffs: &[i64]) -> Result<Self> {
        CFiniteRecurrence::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn to_poly(&self) -> PolyRecurrence {
        PolyRecurrence::new(self.coeffs.iter().map(|c| vec![c.clone()]).collect())
            .expect("leading coefficient is one")
    }

    /// The degree-zero case of a polynomial recurrence, if it is one.
    pub fn from_poly(rec: &PolyRecurrence) -> Option<Self> {
        if rec.degree() != 0 {
            return None;
        }
        let coeffs = rec
            .coeffs()
            .iter()
            .map(|p| p.first().cloned().unwrap_or_else(BigRational::zero))
            .collect();
        CFiniteRecurrence::new(coeffs).ok()
    }
}

impl fmt::Display for CFiniteRecurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_poly().fmt(f)
    }
}

/// Outcome of checking a recurrence against concrete terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    /// Indices `n` at which every term of the relation was available.
    pub checked: usize,
    pub first_index: Option<i64>,
    pub last_index: Option<i64>,
    pub first_failure: Option<i64>,
}

impl VerifyReport {
    pub fn success(&self) -> bool {
        self.checked > 0 && self.first_failure.is_none()
    }
}

/// Evaluates the recurrence at every `n` for which the supplied terms cover
/// `a(n), ..., a(n+L)`.
pub fn verify_recurrence(rec: &PolyRecurrence, seq: &Sequence) -> VerifyReport {
    let mut report = VerifyReport {
        checked: 0,
        first_index: None,
        last_index: None,
        first_failure: None,
    };
    let last_n = seq.last_index() - rec.order() as i64;
    for n in seq.offset..=last_n {
        let residual = rec.residual(seq, n).expect("index inside the supplied range");
        report.checked += 1;
        report.first_index.get_or_insert(n);
        report.last_index = Some(n);
        if !residual.is_zero() && report.first_failure.is_none() {
            report.first_failure = Some(n);
        }
    }
    report
}

/// Terms produced by [`unroll`], with a note on integrality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnrollReport {
    pub offset: i64,
    pub terms: Vec<BigRational>,
    pub first_non_integer: Option<i64>,
}

impl UnrollReport {
    pub fn all_integers(&self) -> bool {
        self.first_non_integer.is_none()
    }

    pub fn integer_sequence(&self) -> Option<Sequence> {
        self.all_integers().then(|| {
            Sequence::new(self.offset, self.terms.iter().map(|t| t.to_integer()).collect())
        })
    }
}

/// Extends `initial` to `count` terms via
/// `a(n+L) = -sum_{i<L} p_i(n) a(n+i) / p_L(n)`.
pub fn unroll(rec: &PolyRecurrence, initial: &Sequence, count: usize) -> Result<UnrollReport> {
    let order = rec.order();
    if initial.len() < order {
        return Err(Error::NeedsMoreData {
            shortfall: order - initial.len(),
            reason: format!("an order-{order} recurrence needs {order} initial terms"),
        });
    }
    let mut terms: Vec<BigRational> = initial
        .terms
        .iter()
        .take(count.max(order))
        .map(|t| BigRational::from_integer(t.clone()))
        .collect();
    while terms.len() < count {
        let start = terms.len() - order;
        let n = initial.offset + start as i64;
        let lead = rec.eval_coeff(order, n);
        if lead.is_zero() {
            return Err(Error::SingularPoint(n));
        }
        let mut acc = BigRational::zero();
        for i in 0..order {
            acc += rec.eval_coeff(i, n) * &terms[start + i];
        }
        terms.push(-acc / lead);
    }
    terms.truncate(count);
    let first_non_integer = terms
        .iter()
        .position(|t| !t.is_integer())
        .map(|i| initial.offset + i as i64);
    Ok(UnrollReport {
        offset: initial.offset,
        terms,
        first_non_integer,
    })
}
