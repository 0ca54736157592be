//! Pattern avoidance over arbitrary finite alphabets.
//!
//! A `k x n` matrix is read as a word of `n` column letters, each letter a
//! height-`k` word avoiding the vertical patterns `V`. Every row is tracked
//! by a factor-avoidance automaton for the horizontal patterns `H`, so
//! counting matrices reduces to counting walks over tuples of row states.

use std::collections::{HashMap, VecDeque};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recurrence::{self, RationalGF, Sequence};

/// Index of a symbol within its [`Alphabet`].
pub type Symbol = u8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<char>,
}

impl Alphabet {
    pub fn new(symbols: Vec<char>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::invalid("alphabet is empty"));
        }
        if symbols.len() > Symbol::MAX as usize {
            return Err(Error::invalid("alphabet is too large"));
        }
        for (i, c) in symbols.iter().enumerate() {
            if symbols[..i].contains(c) {
                return Err(Error::invalid(format!("duplicate symbol {c:?}")));
            }
        }
        Ok(Alphabet { symbols })
    }

    pub fn binary() -> Self {
        Alphabet {
            symbols: vec!['0', '1'],
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn index_of(&self, c: char) -> Option<Symbol> {
        self.symbols.iter().position(|&s| s == c).map(|i| i as Symbol)
    }

    /// Maps a string onto symbol indices.
    pub fn word(&self, text: &str) -> Result<Vec<Symbol>> {
        text.chars()
            .map(|c| {
                self.index_of(c)
                    .ok_or_else(|| Error::invalid(format!("symbol {c:?} is not in the alphabet")))
            })
            .collect()
    }

    pub fn render(&self, word: &[Symbol]) -> String {
        word.iter().map(|&s| self.symbols[s as usize]).collect()
    }
}

/// A nonempty forbidden factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern(Vec<Symbol>);

impl Pattern {
    pub fn new(alphabet: &Alphabet, text: &str) -> Result<Self> {
        if text.is_empty() {
            return Err(Error::invalid("empty pattern"));
        }
        Ok(Pattern(alphabet.word(text)?))
    }

    pub fn letters(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Alphabet plus forbidden horizontal (`H`) and vertical (`V`) factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternSystem {
    pub alphabet: Alphabet,
    pub horizontal: Vec<Pattern>,
    pub vertical: Vec<Pattern>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemDoc {
    alphabet: Vec<String>,
    #[serde(rename = "H", default)]
    horizontal: Vec<String>,
    #[serde(rename = "V", default)]
    vertical: Vec<String>,
}

impl PatternSystem {
    pub fn new(alphabet: Alphabet, horizontal: &[&str], vertical: &[&str]) -> Result<Self> {
        let h = horizontal
            .iter()
            .map(|p| Pattern::new(&alphabet, p))
            .collect::<Result<_>>()?;
        let v = vertical
            .iter()
            .map(|p| Pattern::new(&alphabet, p))
            .collect::<Result<_>>()?;
        Ok(PatternSystem {
            alphabet,
            horizontal: h,
            vertical: v,
        })
    }

    /// The Not-Alone rules: `H = V = {010, 101}` over `{0, 1}`.
    pub fn not_alone() -> Self {
        PatternSystem::new(Alphabet::binary(), &["010", "101"], &["010", "101"])
            .expect("static system")
    }

    /// Parses `{"alphabet":["0","1"], "H":["010"], "V":["101"]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SystemDoc = serde_json::from_str(text)?;
        let mut symbols = Vec::with_capacity(doc.alphabet.len());
        for s in &doc.alphabet {
            let mut chars = s.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => symbols.push(c),
                _ => {
                    return Err(Error::invalid(format!(
                        "alphabet entry {s:?} is not a single character"
                    )))
                }
            }
        }
        let alphabet = Alphabet::new(symbols)?;
        let h: Vec<&str> = doc.horizontal.iter().map(String::as_str).collect();
        let v: Vec<&str> = doc.vertical.iter().map(String::as_str).collect();
        PatternSystem::new(alphabet, &h, &v)
    }

    pub fn to_json(&self) -> String {
        let render = |ps: &[Pattern]| ps.iter().map(|p| self.alphabet.render(p.letters())).collect();
        serde_json::to_string(&SystemDoc {
            alphabet: self.alphabet.symbols.iter().map(|c| c.to_string()).collect(),
            horizontal: render(&self.horizontal),
            vertical: render(&self.vertical),
        })
        .expect("plain data")
    }

    pub fn row_automaton(&self) -> Result<RowAutomaton> {
        build_row_automaton(&self.alphabet, &self.horizontal)
    }

    pub fn is_binary(&self) -> bool {
        self.alphabet.symbols == ['0', '1']
    }
}

/// True iff `pattern` occurs as a contiguous block of `word`.
pub fn contains_pattern<T: PartialEq>(word: &[T], pattern: &[T]) -> bool {
    pattern.is_empty() || word.windows(pattern.len()).any(|w| w == pattern)
}

pub fn avoids_all(word: &[Symbol], patterns: &[Pattern]) -> bool {
    patterns.iter().all(|p| !contains_pattern(word, p.letters()))
}

/// Deterministic, total automaton accepting exactly the words that avoid a
/// set of factors. State 0 is the start state; [`RowAutomaton::DEAD`] is
/// absorbing and every other state accepts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowAutomaton {
    alphabet_len: usize,
    // live states only; transitions may lead to DEAD
    delta: Vec<u32>,
}

impl RowAutomaton {
    pub const DEAD: u32 = u32::MAX;
    pub const START: u32 = 0;

    /// Number of live (accepting) states.
    pub fn live_states(&self) -> usize {
        self.delta.len() / self.alphabet_len
    }

    pub fn alphabet_len(&self) -> usize {
        self.alphabet_len
    }

    #[inline]
    pub fn step(&self, state: u32, symbol: Symbol) -> u32 {
        if state == Self::DEAD {
            return Self::DEAD;
        }
        self.delta[state as usize * self.alphabet_len + symbol as usize]
    }

    pub fn run(&self, word: &[Symbol]) -> u32 {
        word.iter().fold(Self::START, |s, &c| self.step(s, c))
    }

    pub fn accepts(&self, word: &[Symbol]) -> bool {
        self.run(word) != Self::DEAD
    }
}

/// Builds the factor-avoidance automaton for `patterns` with failure links
/// over a trie (Aho-Corasick), then merges equivalent states.
pub fn build_row_automaton(alphabet: &Alphabet, patterns: &[Pattern]) -> Result<RowAutomaton> {
    let sigma = alphabet.len();
    for p in patterns {
        if p.is_empty() {
            return Err(Error::invalid("empty pattern"));
        }
        if let Some(&c) = p.letters().iter().find(|&&c| c as usize >= sigma) {
            return Err(Error::invalid(format!("symbol index {c} outside the alphabet")));
        }
    }

    // trie
    const NONE: usize = usize::MAX;
    let mut children: Vec<Vec<usize>> = vec![vec![NONE; sigma]];
    let mut terminal = vec![false];
    for p in patterns {
        let mut node = 0;
        for &c in p.letters() {
            if children[node][c as usize] == NONE {
                children.push(vec![NONE; sigma]);
                terminal.push(false);
                children[node][c as usize] = children.len() - 1;
            }
            node = children[node][c as usize];
        }
        terminal[node] = true;
    }

    // failure links in BFS order, completing the goto function
    let mut fail = vec![0usize; children.len()];
    let mut goto = children.clone();
    let mut queue = VecDeque::new();
    for c in 0..sigma {
        match children[0][c] {
            NONE => goto[0][c] = 0,
            child => {
                fail[child] = 0;
                queue.push_back(child);
            }
        }
    }
    while let Some(node) = queue.pop_front() {
        terminal[node] |= terminal[fail[node]];
        for c in 0..sigma {
            match children[node][c] {
                NONE => goto[node][c] = goto[fail[node]][c],
                child => {
                    fail[child] = goto[fail[node]][c];
                    queue.push_back(child);
                }
            }
        }
    }

    // Moore minimisation over the live nodes
    let live: Vec<usize> = (0..goto.len()).filter(|&n| !terminal[n]).collect();
    if live.is_empty() || terminal[0] {
        // Unreachable for nonempty patterns; the start node is never terminal.
        return Err(Error::invalid("every word is forbidden"));
    }
    let dead_class = usize::MAX;
    let mut class: Vec<usize> = (0..goto.len())
        .map(|n| if terminal[n] { dead_class } else { 0 })
        .collect();
    loop {
        let mut signatures: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut next = class.clone();
        for &n in &live {
            let sig = (class[n], goto[n].iter().map(|&t| class[t]).collect::<Vec<_>>());
            let fresh = signatures.len();
            next[n] = *signatures.entry(sig).or_insert(fresh);
        }
        let stable = live.iter().all(|&a| {
            live.iter()
                .all(|&b| (class[a] == class[b]) == (next[a] == next[b]))
        });
        class = next;
        if stable {
            break;
        }
    }

    // Renumber classes by first reachable order from the root.
    let mut order: HashMap<usize, u32> = HashMap::new();
    let mut reps: Vec<usize> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    order.insert(class[0], 0);
    reps.push(0);
    while let Some(node) = queue.pop_front() {
        for &t in &goto[node] {
            if terminal[t] || order.contains_key(&class[t]) {
                continue;
            }
            order.insert(class[t], reps.len() as u32);
            reps.push(t);
            queue.push_back(t);
        }
    }
    let mut delta = Vec::with_capacity(reps.len() * sigma);
    for &node in &reps {
        for c in 0..sigma {
            let t = goto[node][c];
            delta.push(if terminal[t] {
                RowAutomaton::DEAD
            } else {
                order[&class[t]]
            });
        }
    }
    Ok(RowAutomaton {
        alphabet_len: sigma,
        delta,
    })
}

/// Height-`k` words over the alphabet avoiding every vertical pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnAlphabet {
    pub height: usize,
    pub letters: Vec<Vec<Symbol>>,
}

impl ColumnAlphabet {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

/// All height-`k` words avoiding `vertical`, in lexicographic order.
pub fn column_letters(alphabet: &Alphabet, vertical: &[Pattern], k: usize) -> Result<ColumnAlphabet> {
    if k == 0 {
        return Err(Error::invalid("column height must be positive"));
    }
    let automaton = build_row_automaton(alphabet, vertical)?;
    let sigma = alphabet.len() as Symbol;
    let mut letters = Vec::new();
    let mut word = Vec::with_capacity(k);
    fn extend(
        a: &RowAutomaton,
        sigma: Symbol,
        k: usize,
        state: u32,
        word: &mut Vec<Symbol>,
        out: &mut Vec<Vec<Symbol>>,
    ) {
        if word.len() == k {
            out.push(word.clone());
            return;
        }
        for c in 0..sigma {
            let next = a.step(state, c);
            if next != RowAutomaton::DEAD {
                word.push(c);
                extend(a, sigma, k, next, word, out);
                word.pop();
            }
        }
    }
    extend(&automaton, sigma, k, RowAutomaton::START, &mut word, &mut letters);
    Ok(ColumnAlphabet { height: k, letters })
}

/// One automaton state per row.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransferState(pub Vec<u32>);

impl TransferState {
    pub fn start(k: usize) -> Self {
        TransferState(vec![RowAutomaton::START; k])
    }
}

/// Appends one column; `None` when some row completes a forbidden factor.
pub fn transfer_step(
    automaton: &RowAutomaton,
    state: &TransferState,
    letter: &[Symbol],
) -> Option<TransferState> {
    if state.0.len() != letter.len() {
        return None;
    }
    let mut next = Vec::with_capacity(letter.len());
    for (&s, &c) in state.0.iter().zip(letter) {
        let t = automaton.step(s, c);
        if t == RowAutomaton::DEAD {
            return None;
        }
        next.push(t);
    }
    Some(TransferState(next))
}

/// Reachable transfer states and the column-letter edges between them.
#[derive(Clone, Debug)]
pub struct TransferGraph {
    pub states: Vec<TransferState>,
    /// `edges[i]` lists target state indices, one per admissible letter.
    pub edges: Vec<Vec<usize>>,
}

impl TransferGraph {
    pub fn build(system: &PatternSystem, k: usize) -> Result<Self> {
        let automaton = system.row_automaton()?;
        let columns = column_letters(&system.alphabet, &system.vertical, k)?;
        let mut index: HashMap<TransferState, usize> = HashMap::new();
        let mut states = vec![TransferState::start(k)];
        index.insert(states[0].clone(), 0);
        let mut edges: Vec<Vec<usize>> = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let mut out = Vec::new();
            for letter in &columns.letters {
                if let Some(next) = transfer_step(&automaton, &states[i], letter) {
                    let j = *index.entry(next.clone()).or_insert_with(|| {
                        states.push(next);
                        states.len() - 1
                    });
                    out.push(j);
                }
            }
            edges.push(out);
            i += 1;
        }
        Ok(TransferGraph { states, edges })
    }

    pub fn live_states(&self) -> usize {
        self.states.len()
    }

    /// Walk counts from the start state: entry `n` is the number of
    /// admissible matrices with `n` columns, for `n = 0..=columns`.
    pub fn walk_counts(&self, columns: usize) -> Vec<BigUint> {
        let mut weights = vec![BigUint::zero(); self.states.len()];
        weights[0] = BigUint::one();
        let mut out = vec![BigUint::one()];
        for _ in 0..columns {
            let mut next = vec![BigUint::zero(); self.states.len()];
            for (from, w) in weights.iter().enumerate() {
                if w.is_zero() {
                    continue;
                }
                for &to in &self.edges[from] {
                    next[to] += w;
                }
            }
            weights = next;
            out.push(weights.iter().sum());
        }
        out
    }
}

/// `m_k(1), ..., m_k(N)`: the number of `k x n` matrices whose rows avoid
/// `H` and whose columns avoid `V`.
pub fn mk_terms(system: &PatternSystem, k: usize, count: usize) -> Result<Vec<BigUint>> {
    if k == 0 || count == 0 {
        return Err(Error::invalid("k and N must be positive"));
    }
    let graph = TransferGraph::build(system, k)?;
    Ok(graph.walk_counts(count).split_off(1))
}

/// The generating function `sum_{n >= 0} m_k(n) t^n` (with `m_k(0) = 1`).
///
/// The transfer graph has `S` live states, so the sequence satisfies a
/// constant-coefficient recurrence of order at most `S`; `2S + 5` terms are
/// always enough to pin down the minimal one. `max_order` limits the search
/// below that bound when the graph is large.
pub fn generating_function(
    system: &PatternSystem,
    k: usize,
    max_order: Option<usize>,
) -> Result<(RationalGF, recurrence::CFiniteRecurrence)> {
    let graph = TransferGraph::build(system, k)?;
    let bound = max_order.map_or(graph.live_states(), |m| m.min(graph.live_states())).max(1);
    let needed = 2 * bound + 5 + 10;
    let counts = graph.walk_counts(needed);
    let terms: Vec<BigInt> = counts.iter().skip(1).cloned().map(BigInt::from).collect();
    let seq = Sequence::new(1, terms);
    let report = recurrence::guess_cfinite(&seq, bound)?;
    let rec = report
        .cfinite()
        .ok_or_else(|| Error::invalid(format!("no recurrence of order <= {bound} found")))?;
    // series from n = 1, then add the empty matrix as the constant term
    let tail = recurrence::gf_from_cfinite(&rec, &seq)?;
    Ok((tail.add_constant(&BigInt::one()), rec))
}

/// Adds the chessboard `(i + j) mod 2` (1-based indices) to a 0/1 matrix.
pub fn chessboard_mask(matrix: &[Vec<u8>]) -> Result<Vec<Vec<u8>>> {
    matrix
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &m)| {
                    if m > 1 {
                        Err(Error::invalid(format!("entry ({}, {}) is {m}", i + 1, j + 1)))
                    } else {
                        Ok((m + ((i + 1 + j + 1) % 2) as u8) % 2)
                    }
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_words(sigma: u8, len: usize) -> Vec<Vec<Symbol>> {
        let mut out = vec![vec![]];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..sigma).map(move |c| {
                        let mut w = w.clone();
                        w.push(c);
                        w
                    })
                })
                .collect();
        }
        out
    }

    fn binary(h: &[&str], v: &[&str]) -> PatternSystem {
        PatternSystem::new(Alphabet::binary(), h, v).unwrap()
    }

    #[test]
    fn contains_examples() {
        assert!(contains_pattern(b"robert", b"rob"));
        assert!(contains_pattern(b"robert", b"obe"));
        assert!(!contains_pattern(b"101010001", b"11"));
        assert!(contains_pattern(b"0110", b"0110"));
    }

    #[test]
    fn empty_pattern_set_is_one_state() {
        let a = build_row_automaton(&Alphabet::binary(), &[]).unwrap();
        assert_eq!(a.live_states(), 1);
        assert!(all_words(2, 5).iter().all(|w| a.accepts(w)));
    }

    #[test]
    fn fibonacci_counts_for_11() {
        let sys = binary(&["11"], &[]);
        let a = sys.row_automaton().unwrap();
        let counts: Vec<usize> = (1..=4)
            .map(|n| all_words(2, n).iter().filter(|w| a.accepts(w)).count())
            .collect();
        assert_eq!(counts, vec![2, 3, 5, 8]);
    }

    #[test]
    fn not_alone_rows_of_length_three() {
        let a = PatternSystem::not_alone().row_automaton().unwrap();
        assert_eq!(all_words(2, 3).iter().filter(|w| a.accepts(w)).count(), 6);
    }

    #[test]
    fn automaton_agrees_with_factor_search() {
        let alphabet = Alphabet::new(vec!['a', 'b', 'c']).unwrap();
        let cases: &[&[&str]] = &[&["aba", "bb"], &["abcab", "ca"], &["a"], &["aa", "aaa", "ba"]];
        for pats in cases {
            let ps: Vec<Pattern> = pats.iter().map(|p| Pattern::new(&alphabet, p).unwrap()).collect();
            let a = build_row_automaton(&alphabet, &ps).unwrap();
            let maxlen = ps.iter().map(Pattern::len).max().unwrap();
            for len in 0..=maxlen + 3 {
                for w in all_words(3, len) {
                    assert_eq!(a.accepts(&w), avoids_all(&w, &ps), "{pats:?} {w:?}");
                }
            }
        }
    }

    #[test]
    fn rejects_foreign_symbols() {
        assert!(Pattern::new(&Alphabet::binary(), "012").is_err());
        assert!(PatternSystem::from_json(r#"{"alphabet":["0","1"],"H":["2"],"V":[]}"#).is_err());
        assert!(Alphabet::new(vec!['0', '0']).is_err());
    }

    #[test]
    fn column_letter_examples() {
        let sys = PatternSystem::not_alone();
        let c3 = column_letters(&sys.alphabet, &sys.vertical, 3).unwrap();
        assert_eq!(c3.len(), 6);
        let c2 = column_letters(&Alphabet::binary(), &[], 2).unwrap();
        assert_eq!(c2.letters, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        let c4 = column_letters(&sys.alphabet, &sys.vertical, 4).unwrap();
        let balanced: Vec<&Vec<u8>> = c4.letters.iter().filter(|l| l.iter().sum::<u8>() == 2).collect();
        assert_eq!(
            balanced,
            vec![&vec![0, 0, 1, 1], &vec![0, 1, 1, 0], &vec![1, 0, 0, 1], &vec![1, 1, 0, 0]]
        );
    }

    #[test]
    fn transfer_examples() {
        let sys = PatternSystem::not_alone();
        let a = sys.row_automaton().unwrap();
        let s0 = TransferState::start(3);
        let s1 = transfer_step(&a, &s0, &[1, 1, 1]).unwrap();
        let s2 = transfer_step(&a, &s1, &[0, 0, 0]).unwrap();
        assert!(transfer_step(&a, &s2, &[1, 1, 1]).is_none());
        let t2 = transfer_step(&a, &s1, &[1, 1, 1]).unwrap();
        assert!(transfer_step(&a, &t2, &[0, 0, 0]).is_some());

        let free = build_row_automaton(&Alphabet::binary(), &[]).unwrap();
        let mut s = TransferState::start(2);
        for l in [[0, 1], [1, 0], [0, 1]] {
            s = transfer_step(&free, &s, &l).unwrap();
        }
    }

    #[test]
    fn three_row_terms() {
        let expected = [6u64, 36, 102, 378, 1260, 4374, 14946, 51384, 176238, 605022, 2076288];
        for sys in [PatternSystem::not_alone(), binary(&["000", "111"], &["000", "111"])] {
            let got = mk_terms(&sys, 3, 11).unwrap();
            let got: Vec<u64> = got.iter().map(|t| t.try_into().unwrap()).collect();
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn unrestricted_counts_are_powers() {
        let alphabet = Alphabet::new(vec!['x', 'y', 'z']).unwrap();
        let sys = PatternSystem::new(alphabet, &[], &[]).unwrap();
        let got = mk_terms(&sys, 2, 5).unwrap();
        for (n, t) in got.iter().enumerate() {
            assert_eq!(*t, BigUint::from(9u32).pow(n as u32 + 1));
        }
    }

    #[test]
    fn brute_force_agreement() {
        let systems = [
            PatternSystem::not_alone(),
            binary(&["11"], &["00"]),
            binary(&["0110"], &["10", "111"]),
            binary(&[], &["1"]),
        ];
        for sys in &systems {
            let a = sys.row_automaton().unwrap();
            let v = build_row_automaton(&sys.alphabet, &sys.vertical).unwrap();
            for k in 1..=3 {
                for n in 1..=4 {
                    let cells = k * n;
                    let mut count = 0u64;
                    for bits in 0u32..(1 << cells) {
                        let cell = |i: usize, j: usize| ((bits >> (i * n + j)) & 1) as u8;
                        let rows_ok = (0..k).all(|i| a.accepts(&(0..n).map(|j| cell(i, j)).collect::<Vec<_>>()));
                        let cols_ok = (0..n).all(|j| v.accepts(&(0..k).map(|i| cell(i, j)).collect::<Vec<_>>()));
                        count += (rows_ok && cols_ok) as u64;
                    }
                    let got = &mk_terms(sys, k, n).unwrap()[n - 1];
                    assert_eq!(*got, BigUint::from(count), "{} k={k} n={n}", sys.to_json());
                }
            }
        }
    }

    #[test]
    fn mask_examples() {
        let zeros = vec![vec![0u8; 3]; 3];
        let masked = chessboard_mask(&zeros).unwrap();
        assert_eq!(masked[0], vec![0, 1, 0]);
        assert_eq!(masked[1], vec![1, 0, 1]);
        assert_eq!(chessboard_mask(&masked).unwrap(), zeros);
        assert!(chessboard_mask(&[vec![0, 2]]).is_err());
    }

    #[test]
    fn mask_maps_010_avoiders_to_000_avoiders() {
        let na = PatternSystem::not_alone();
        let triple = binary(&["000", "111"], &["000", "111"]);
        let ok = |sys: &PatternSystem, m: &[Vec<u8>]| {
            let a = sys.row_automaton().unwrap();
            let v = build_row_automaton(&sys.alphabet, &sys.vertical).unwrap();
            m.iter().all(|r| a.accepts(r))
                && (0..m[0].len()).all(|j| v.accepts(&m.iter().map(|r| r[j]).collect::<Vec<_>>()))
        };
        for n in 1..=4 {
            for bits in 0u32..(1 << (3 * n)) {
                let m: Vec<Vec<u8>> = (0..3)
                    .map(|i| (0..n).map(|j| ((bits >> (i * n + j)) & 1) as u8).collect())
                    .collect();
                let masked = chessboard_mask(&m).unwrap();
                assert_eq!(chessboard_mask(&masked).unwrap(), m);
                assert_eq!(ok(&na, &m), ok(&triple, &masked));
            }
        }
    }

    #[test]
    fn three_row_generating_function() {
        let (gf, rec) = generating_function(&PatternSystem::not_alone(), 3, None).unwrap();
        assert_eq!(rec.order(), 4);
        let expected = RationalGF::from_integers(&[1, 4, 19, 0, -5], &[1, -2, -5, 0, 1]).unwrap();
        assert!(gf.equals_up_to_scaling(&expected), "{gf}");
    }

    #[test]
    fn json_roundtrip() {
        let sys = PatternSystem::from_json(r#"{"alphabet":["0","1"], "H":["010","101"], "V":["010","101"]}"#)
            .unwrap();
        assert_eq!(sys, PatternSystem::not_alone());
        assert_eq!(PatternSystem::from_json(&sys.to_json()).unwrap(), sys);
        assert!(PatternSystem::from_json(r#"{"alphabet":["01"]}"#).is_err());
    }
}
