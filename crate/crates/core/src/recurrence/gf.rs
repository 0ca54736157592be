//! Rational generating functions of C-finite sequences.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{format_poly, CFiniteRecurrence, Sequence};
use crate::error::{Error, Result};

/// `P(t) / Q(t)` with `Q(0) != 0`; coefficient lists are ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalGF {
    pub numerator: Vec<BigRational>,
    pub denominator: Vec<BigRational>,
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

impl RationalGF {
    pub fn new(numerator: Vec<BigRational>, denominator: Vec<BigRational>) -> Result<Self> {
        let denominator = trim(denominator);
        if denominator.first().is_none_or(Zero::is_zero) {
            return Err(Error::invalid("denominator must not vanish at t = 0"));
        }
        Ok(RationalGF {
            numerator: trim(numerator),
            denominator,
        })
    }

    pub fn from_integers(numerator: &[i64], denominator: &[i64]) -> Result<Self> {
        let conv = |p: &[i64]| p.iter().map(|&c| BigRational::from_integer(c.into())).collect();
        RationalGF::new(conv(numerator), conv(denominator))
    }

    /// Coefficients of `t^0, ..., t^(count-1)` in the power series.
    pub fn series(&self, count: usize) -> Vec<BigRational> {
        let q0 = &self.denominator[0];
        let mut out: Vec<BigRational> = Vec::with_capacity(count);
        for m in 0..count {
            let mut acc = self.numerator.get(m).cloned().unwrap_or_else(BigRational::zero);
            for (j, q) in self.denominator.iter().enumerate().skip(1) {
                if j > m {
                    break;
                }
                acc -= q * &out[m - j];
            }
            out.push(acc / q0);
        }
        out
    }

    pub fn add_constant(&self, c: &BigInt) -> RationalGF {
        let len = self.numerator.len().max(self.denominator.len());
        let numerator = (0..len)
            .map(|i| {
                let p = self.numerator.get(i).cloned().unwrap_or_else(BigRational::zero);
                let q = self.denominator.get(i).cloned().unwrap_or_else(BigRational::zero);
                p + q * BigRational::from_integer(c.clone())
            })
            .collect();
        RationalGF {
            numerator: trim(numerator),
            denominator: self.denominator.clone(),
        }
    }

    /// Scales so that both polynomials have coprime integer coefficients and
    /// `Q(0) > 0`.
    pub fn normalized(&self) -> RationalGF {
        let all = self.numerator.iter().chain(&self.denominator);
        let lcm = all.clone().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let scale = BigRational::from_integer(lcm);
        let ints: Vec<BigInt> = all.map(|c| (c * &scale).to_integer()).collect();
        let mut g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if self.denominator[0] < BigRational::zero() {
            g = -g;
        }
        let factor = scale / BigRational::from_integer(g);
        RationalGF {
            numerator: self.numerator.iter().map(|c| c * &factor).collect(),
            denominator: self.denominator.iter().map(|c| c * &factor).collect(),
        }
    }

    /// Same pair of polynomials up to one common nonzero factor.
    pub fn equals_up_to_scaling(&self, other: &RationalGF) -> bool {
        self.normalized() == other.normalized()
    }
}

impl fmt::Display for RationalGF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}) / ({})",
            format_poly(&self.numerator, "t"),
            format_poly(&self.denominator, "t")
        )
    }
}

/// Generating function `sum_{n >= offset} a(n) t^n` of a sequence that
/// satisfies `rec` on every supplied term.
///
/// `Q(t) = sum_j c_{L-j} t^j`, and `P` is `Q * S` truncated below degree
/// `offset + L`. An error names the first index where `rec` fails.
pub fn gf_from_cfinite(rec: &CFiniteRecurrence, seq: &Sequence) -> Result<RationalGF> {
    let order = rec.order();
    if seq.len() < order {
        return Err(Error::NeedsMoreData {
            shortfall: order - seq.len(),
            reason: format!("an order-{order} recurrence needs {order} initial terms"),
        });
    }
    if seq.offset < 0 {
        return Err(Error::invalid("generating functions need a nonnegative offset"));
    }
    let poly = rec.to_poly();
    for n in seq.offset..=seq.last_index() - order as i64 {
        if !poly.residual(seq, n).expect("in range").is_zero() {
            return Err(Error::Contradiction(n));
        }
    }
    let denominator: Vec<BigRational> = rec.coeffs().iter().rev().cloned().collect();
    let offset = seq.offset as usize;
    let top = offset + order;
    let coeff_of_series = |m: usize| -> BigRational {
        if m < offset {
            BigRational::zero()
        } else {
            BigRational::from_integer(seq.terms[m - offset].clone())
        }
    };
    let numerator = (0..top)
        .map(|m| {
            (0..=order.min(m))
                .map(|j| &denominator[j] * coeff_of_series(m - j))
                .fold(BigRational::zero(), |acc, x| acc + x)
        })
        .collect();
    RationalGF::new(numerator, denominator)
}
