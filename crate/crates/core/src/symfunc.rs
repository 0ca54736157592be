//! Balanced 2k x 2n binary matrices via powers of the elementary symmetric
//! polynomial `e_k(x_1, ..., x_2k)`.
//!
//! `b_k(n)` is the coefficient of `(x_1 ... x_2k)^n` in `e_k^{2n}`. The
//! coefficients `c_n(a)` of `e_k^n` obey
//!
//! ```text
//! c_n(a) = sum over s in S of c_{n-1}(a - s)
//! ```
//!
//! where `S` is the set of 0/1 vectors with `k` ones. Because `e_k` is
//! symmetric and homogeneous, only weakly decreasing exponent vectors with
//! entries at most `min(n, N)` and sum `k n` are stored, each at its rank in
//! descending lexicographic order. Everything is computed modulo word-sized
//! primes and recombined with the CRT.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Pow};
use rayon::prelude::*;

use crate::arith::{self, add_mod, mul_mod};
use crate::error::{Error, Result};
use crate::MemoryCap;

/// An exponent vector `(a_1, ..., a_2k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentVector(Vec<u16>);

impl ExponentVector {
    pub fn new(entries: Vec<u16>) -> Self {
        ExponentVector(entries)
    }

    pub fn entries(&self) -> &[u16] {
        &self.0
    }

    pub fn is_normalized(&self) -> bool {
        self.0.windows(2).all(|w| w[0] >= w[1])
    }

    /// Sorted into weakly decreasing order.
    pub fn normalized(&self) -> Self {
        let mut v = self.0.clone();
        v.sort_unstable_by(|a, b| b.cmp(a));
        ExponentVector(v)
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().map(|&x| x as u64).sum()
    }

    /// Number of distinct permutations of the entries.
    pub fn multiplicity(&self) -> BigUint {
        let mut sorted = self.0.clone();
        sorted.sort_unstable();
        let mut acc = factorial(sorted.len() as u64);
        for run in sorted.chunk_by(|a, b| a == b) {
            acc /= factorial(run.len() as u64);
        }
        acc
    }
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// The support of `e_k(x_1, ..., x_2k)`: all 0/1 vectors of length `2k`
/// with exactly `k` ones, in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportSet {
    k: usize,
    vectors: Vec<Vec<u8>>,
}

impl SupportSet {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vectors(&self) -> &[Vec<u8>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

pub fn support(k: usize) -> Result<SupportSet> {
    if k == 0 {
        return Err(Error::invalid("k must be positive"));
    }
    let width = 2 * k;
    if width > 63 {
        return Err(Error::invalid(format!("k = {k} is too large")));
    }
    let mut vectors = Vec::new();
    // Ascending integers with the most significant bit first give
    // lexicographic order on the bit vectors.
    for bits in 0u64..(1 << width) {
        if bits.count_ones() as usize == k {
            vectors.push(
                (0..width)
                    .map(|i| ((bits >> (width - 1 - i)) & 1) as u8)
                    .collect(),
            );
        }
    }
    Ok(SupportSet { k, vectors })
}

/// Ranking scheme for the valid normalized keys of every layer, for a fixed
/// half-height `k` and term budget `N`.
///
/// `count(len, max, sum)` is the number of weakly decreasing sequences of
/// length `len`, entries in `[0, max]`, summing to `sum`.
#[derive(Debug)]
pub struct KeySpace {
    k: usize,
    budget: usize,
    max_sum: usize,
    table: Vec<u128>,
}

impl KeySpace {
    pub fn new(k: usize, budget: usize) -> Result<Self> {
        if k == 0 || budget == 0 {
            return Err(Error::invalid("k and N must be positive"));
        }
        if budget > u16::MAX as usize / 2 {
            return Err(Error::invalid(format!("term budget {budget} is too large")));
        }
        let len = 2 * k;
        let max_sum = k * 2 * budget;
        let mut space = KeySpace {
            k,
            budget,
            max_sum,
            table: vec![0; (len + 1) * (budget + 1) * (max_sum + 1)],
        };
        for l in 0..=len {
            for m in 0..=budget {
                for s in 0..=max_sum {
                    let v = if l == 0 || m == 0 {
                        (s == 0) as u128
                    } else {
                        // first entry below m, or exactly m
                        let below = space.count(l, m - 1, s);
                        let at = if s >= m { space.count(l - 1, m, s - m) } else { 0 };
                        below.saturating_add(at)
                    };
                    let idx = space.index(l, m, s);
                    space.table[idx] = v;
                }
            }
        }
        Ok(space)
    }

    fn index(&self, len: usize, max: usize, sum: usize) -> usize {
        (len * (self.budget + 1) + max) * (self.max_sum + 1) + sum
    }

    fn count(&self, len: usize, max: usize, sum: usize) -> u128 {
        if sum > self.max_sum {
            return 0;
        }
        self.table[self.index(len, max.min(self.budget), sum)]
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// Largest admissible entry at step `n`.
    pub fn cap(&self, n: usize) -> usize {
        n.min(self.budget)
    }

    /// Number of valid normalized keys at step `n` (saturating).
    pub fn layer_len(&self, n: usize) -> u128 {
        let sum = self.k * n;
        if sum > self.max_sum {
            return 0;
        }
        self.count(2 * self.k, self.cap(n), sum)
    }

    fn check(&self, v: &[u16], n: usize) -> Result<()> {
        if v.len() != 2 * self.k {
            return Err(Error::InvalidKey(format!(
                "length {} instead of {}",
                v.len(),
                2 * self.k
            )));
        }
        if !v.windows(2).all(|w| w[0] >= w[1]) {
            return Err(Error::InvalidKey(format!("{v:?} is not weakly decreasing")));
        }
        if v[0] as usize > self.cap(n) {
            return Err(Error::InvalidKey(format!(
                "{v:?} has an entry above {}",
                self.cap(n)
            )));
        }
        let sum: usize = v.iter().map(|&x| x as usize).sum();
        if sum != self.k * n {
            return Err(Error::InvalidKey(format!(
                "{v:?} sums to {sum}, expected {}",
                self.k * n
            )));
        }
        Ok(())
    }

    pub fn rank(&self, v: &[u16], n: usize) -> Result<usize> {
        self.check(v, n)?;
        Ok(self.rank_unchecked(v, n))
    }

    /// Rank of a vector already known to be valid for step `n`.
    #[inline]
    fn rank_unchecked(&self, v: &[u16], n: usize) -> usize {
        let mut rank = 0u128;
        let mut rem = self.k * n;
        let mut bound = self.cap(n);
        let len = v.len();
        for (i, &x) in v.iter().enumerate() {
            let x = x as usize;
            // sequences whose entry here lies in (x, bound]
            rank += self.count(len - i, bound, rem) - self.count(len - i, x, rem);
            rem -= x;
            bound = x;
        }
        rank as usize
    }

    pub fn unrank(&self, rank: usize, n: usize) -> Result<ExponentVector> {
        let total = self.layer_len(n);
        if rank as u128 >= total {
            return Err(Error::InvalidKey(format!(
                "rank {rank} out of range for {total} keys"
            )));
        }
        let mut out = vec![0u16; 2 * self.k];
        self.unrank_into(rank, n, &mut out);
        Ok(ExponentVector(out))
    }

    fn unrank_into(&self, rank: usize, n: usize, out: &mut [u16]) {
        let mut rank = rank as u128;
        let mut rem = self.k * n;
        let mut bound = self.cap(n);
        let len = out.len();
        for i in 0..len {
            let mut x = bound;
            loop {
                let block = if rem >= x {
                    self.count(len - i - 1, x, rem - x)
                } else {
                    0
                };
                if rank < block {
                    break;
                }
                rank -= block;
                x -= 1;
            }
            out[i] = x as u16;
            rem -= x;
            bound = x;
        }
    }
}

/// Convenience wrapper: rank of `v` among the valid keys of step `n` with
/// budget `budget`.
pub fn rank(v: &ExponentVector, n: usize, budget: usize) -> Result<usize> {
    let k = v.entries().len() / 2;
    if k == 0 || !v.entries().len().is_multiple_of(2) {
        return Err(Error::InvalidKey(format!("odd or empty length {}", v.entries().len())));
    }
    KeySpace::new(k, budget)?.rank(v.entries(), n)
}

pub fn unrank(rank: usize, k: usize, n: usize, budget: usize) -> Result<ExponentVector> {
    KeySpace::new(k, budget)?.unrank(rank, n)
}

/// Coefficients `c_n(a)` of `e_k^n` modulo one prime, dense by rank.
#[derive(Clone, Debug)]
pub struct CoeffLayer {
    n: usize,
    prime: u64,
    space: Arc<KeySpace>,
    values: Vec<u64>,
}

impl CoeffLayer {
    /// Layer 0: only the zero vector, with coefficient 1.
    pub fn initial(space: Arc<KeySpace>, prime: u64) -> Result<Self> {
        if prime < 2 {
            return Err(Error::invalid(format!("modulus {prime} is not a prime")));
        }
        Ok(CoeffLayer {
            n: 0,
            prime,
            space,
            values: vec![1 % prime],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.space.k
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn space(&self) -> &Arc<KeySpace> {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// Coefficient of an arbitrary (not necessarily sorted) exponent
    /// vector; zero outside the stored range.
    pub fn get(&self, v: &ExponentVector) -> u64 {
        let norm = v.normalized();
        match self.space.rank(norm.entries(), self.n) {
            Ok(r) => self.values[r],
            Err(_) => 0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (ExponentVector, u64)> + '_ {
        self.values.iter().enumerate().map(move |(r, &c)| {
            (
                self.space.unrank(r, self.n).expect("rank within layer"),
                c,
            )
        })
    }

    /// Sum of `c_n(a)` over all exponent vectors, expanding each stored key
    /// by its number of permutations. Equals `binom(2k,k)^n` mod the prime
    /// whenever the budget does not truncate the layer (`n <= N`).
    pub fn coefficient_sum(&self) -> u64 {
        let p = self.prime;
        self.iter().fold(0, |acc, (v, c)| {
            let m: u64 = (v.multiplicity() % p).try_into().expect("reduced");
            add_mod(acc, mul_mod(m, c, p), p)
        })
    }

    fn check_successor(&self, support_k: usize) -> Result<()> {
        if support_k != self.space.k {
            return Err(Error::InvariantViolation(format!(
                "support for k = {support_k} applied to a layer with k = {}",
                self.space.k
            )));
        }
        if self.n + 1 > 2 * self.space.budget {
            return Err(Error::InvariantViolation(format!(
                "step {} exceeds twice the budget {}",
                self.n + 1,
                self.space.budget
            )));
        }
        Ok(())
    }
}

/// One multiplication by `e_k`: `c_n(a) = sum_s c_{n-1}(a - s)`, summed in
/// support order.
pub fn step_layer(prev: &CoeffLayer, support: &SupportSet) -> Result<CoeffLayer> {
    prev.check_successor(support.k())?;
    let space = &prev.space;
    let n = prev.n + 1;
    let p = prev.prime;
    let len = checked_len(space, n)?;
    let prev_cap = space.cap(n - 1) as u16;
    let mut values = vec![0u64; len];
    values.par_iter_mut().enumerate().for_each_init(
        || (vec![0u16; 2 * space.k], vec![0u16; 2 * space.k]),
        |(a, b), (r, slot)| {
            space.unrank_into(r, n, a);
            let mut acc: u128 = 0;
            'support: for s in support.vectors() {
                for i in 0..a.len() {
                    let d = a[i] as i32 - s[i] as i32;
                    if d < 0 || d > prev_cap as i32 {
                        continue 'support;
                    }
                    b[i] = d as u16;
                }
                b.sort_unstable_by(|x, y| y.cmp(x));
                acc += prev.values[space.rank_unchecked(b, n - 1)] as u128;
            }
            *slot = (acc % p as u128) as u64;
        },
    );
    Ok(CoeffLayer {
        n,
        prime: p,
        space: Arc::clone(space),
        values,
    })
}

/// Same recursion as [`step_layer`], but support vectors that lead to the
/// same sorted predecessor are merged: within a run of `c` equal entries of
/// `a`, choosing `t` of them to decrement gives one predecessor with weight
/// `binom(c, t)`.
pub fn step_layer_grouped(prev: &CoeffLayer) -> Result<CoeffLayer> {
    prev.check_successor(prev.space.k)?;
    let space = &prev.space;
    let k = space.k;
    let n = prev.n + 1;
    let p = prev.prime;
    let len = checked_len(space, n)?;
    let prev_cap = space.cap(n - 1) as u16;
    let binom = small_binomials(2 * k);
    let mut values = vec![0u64; len];
    values.par_iter_mut().enumerate().for_each_init(
        || GroupScratch::new(2 * k),
        |scratch, (r, slot)| {
            space.unrank_into(r, n, &mut scratch.a);
            scratch.runs.clear();
            for run in scratch.a.chunk_by(|x, y| x == y) {
                scratch.runs.push((run[0], run.len()));
            }
            let mut acc = 0u64;
            distribute(
                scratch, 0, k, 1, &binom, prev_cap, p, prev, n - 1, &mut acc,
            );
            *slot = acc;
        },
    );
    Ok(CoeffLayer {
        n,
        prime: p,
        space: Arc::clone(space),
        values,
    })
}

struct GroupScratch {
    a: Vec<u16>,
    b: Vec<u16>,
    runs: Vec<(u16, usize)>,
    picks: Vec<usize>,
}

impl GroupScratch {
    fn new(width: usize) -> Self {
        GroupScratch {
            a: vec![0; width],
            b: vec![0; width],
            runs: Vec::with_capacity(width),
            picks: vec![0; width],
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn distribute(
    s: &mut GroupScratch,
    run: usize,
    remaining: usize,
    weight: u64,
    binom: &[Vec<u64>],
    prev_cap: u16,
    p: u64,
    prev: &CoeffLayer,
    prev_n: usize,
    acc: &mut u64,
) {
    if run == s.runs.len() {
        if remaining != 0 {
            return;
        }
        let mut pos = 0;
        for (i, &(value, count)) in s.runs.iter().enumerate() {
            let t = s.picks[i];
            for _ in 0..count - t {
                s.b[pos] = value;
                pos += 1;
            }
            for _ in 0..t {
                s.b[pos] = value - 1;
                pos += 1;
            }
        }
        if s.b[0] > prev_cap {
            return;
        }
        let c = prev.values[prev.space.rank_unchecked(&s.b, prev_n)];
        *acc = add_mod(*acc, mul_mod(weight, c, p), p);
        return;
    }
    let (value, count) = s.runs[run];
    let max_t = if value == 0 { 0 } else { count.min(remaining) };
    // runs after this one must be able to absorb what is left
    let later: usize = s.runs[run + 1..].iter().map(|r| if r.0 == 0 { 0 } else { r.1 }).sum();
    let min_t = remaining.saturating_sub(later);
    for t in min_t..=max_t {
        s.picks[run] = t;
        let w = mul_mod(weight, binom[count][t] % p, p);
        distribute(s, run + 1, remaining - t, w, binom, prev_cap, p, prev, prev_n, acc);
    }
}

fn small_binomials(n: usize) -> Vec<Vec<u64>> {
    let mut rows = vec![vec![1u64]];
    for i in 1..=n {
        let prev = &rows[i - 1];
        let mut row = vec![1u64; i + 1];
        for j in 1..i {
            row[j] = prev[j - 1] + prev[j];
        }
        rows.push(row);
    }
    rows
}

fn checked_len(space: &KeySpace, n: usize) -> Result<usize> {
    let len = space.layer_len(n);
    usize::try_from(len).map_err(|_| Error::ResourceLimit {
        completed: 0,
        partial: Vec::new(),
        reason: format!("layer {n} has {len} keys"),
    })
}

/// Bytes needed to hold two consecutive layers up to step `2N`.
pub fn peak_layer_bytes(space: &KeySpace) -> u128 {
    let widest = (1..=2 * space.budget)
        .map(|n| space.layer_len(n))
        .max()
        .unwrap_or(1);
    widest.saturating_mul(2 * std::mem::size_of::<u64>() as u128)
}

/// `b_k(1), ..., b_k(N)` modulo `prime`.
pub fn bk_terms_mod(k: usize, budget: usize, prime: u64) -> Result<Vec<u64>> {
    bk_terms_mod_with(k, budget, prime, MemoryCap::default())
}

pub fn bk_terms_mod_with(k: usize, budget: usize, prime: u64, cap: MemoryCap) -> Result<Vec<u64>> {
    let space = Arc::new(KeySpace::new(k, budget)?);
    let mut layer = CoeffLayer::initial(Arc::clone(&space), prime)?;
    let mut out = Vec::with_capacity(budget);
    for n in 1..=2 * budget {
        let needed = space
            .layer_len(n)
            .saturating_add(layer.len() as u128)
            .saturating_mul(std::mem::size_of::<u64>() as u128);
        if needed > cap.bytes() as u128 {
            return Err(Error::ResourceLimit {
                completed: out.len(),
                partial: out.iter().map(|&r| BigUint::from(r)).collect(),
                reason: format!("step {n} needs {needed} bytes, cap is {}", cap.bytes()),
            });
        }
        layer = step_layer_grouped(&layer)?;
        if n % 2 == 0 {
            let m = (n / 2) as u16;
            let centre = vec![m; 2 * k];
            out.push(layer.values[space.rank_unchecked(&centre, n)]);
        }
    }
    Ok(out)
}

/// Primes whose product exceeds `binom(2k,k)^{2N}`, the trivial bound on
/// `b_k(N)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeBasis {
    pub primes: Vec<u64>,
    pub bound: BigUint,
}

impl PrimeBasis {
    pub fn product(&self) -> BigUint {
        self.primes.iter().fold(BigUint::one(), |acc, &p| acc * p)
    }
}

pub fn primes_needed(k: usize, budget: usize) -> Result<PrimeBasis> {
    if k == 0 || budget == 0 {
        return Err(Error::invalid("k and N must be positive"));
    }
    let bound: BigUint = arith::binomial(2 * k as u64, k as u64).pow(2 * budget as u32);
    Ok(basis_above(bound))
}

pub(crate) fn basis_above(bound: BigUint) -> PrimeBasis {
    let mut primes = Vec::new();
    let mut product = BigUint::one();
    for p in arith::primes_below_ceiling() {
        if product > bound {
            break;
        }
        primes.push(p);
        product *= p;
    }
    PrimeBasis { primes, bound }
}

/// Exact `b_k(1), ..., b_k(N)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountSequence {
    pub k: usize,
    pub terms: Vec<BigUint>,
}

pub fn bk_terms(k: usize, budget: usize) -> Result<CountSequence> {
    bk_terms_with(k, budget, MemoryCap::default())
}

pub fn bk_terms_with(k: usize, budget: usize, cap: MemoryCap) -> Result<CountSequence> {
    let basis = primes_needed(k, budget)?;
    let runs: Vec<Result<Vec<u64>>> = basis
        .primes
        .par_iter()
        .map(|&p| bk_terms_mod_with(k, budget, p, cap))
        .collect();
    let mut residues = Vec::with_capacity(runs.len());
    let mut failure = None;
    for run in runs {
        match run {
            Ok(r) => residues.push(r),
            Err(Error::ResourceLimit { partial, reason, .. }) => {
                residues.push(
                    partial
                        .iter()
                        .map(|r| r.try_into().expect("residue fits a word"))
                        .collect(),
                );
                failure = Some(reason);
            }
            Err(e) => return Err(e),
        }
    }
    let completed = residues.iter().map(Vec::len).min().unwrap_or(0);
    let terms = crt_terms(&residues, &basis.primes, completed)?;
    match failure {
        Some(reason) => Err(Error::ResourceLimit {
            completed,
            partial: terms,
            reason,
        }),
        None => Ok(CountSequence { k, terms }),
    }
}

pub(crate) fn crt_terms(residues: &[Vec<u64>], primes: &[u64], count: usize) -> Result<Vec<BigUint>> {
    (0..count)
        .map(|m| {
            let r: Vec<u64> = residues.iter().map(|rs| rs[m]).collect();
            arith::crt_combine(&r, primes)
        })
        .collect()
}
