//! Not-Alone puzzles: complete a partially clued `2k x 2k` binary grid so
//! that every row and column holds `k` ones and no line contains `010` or
//! `101`.
//!
//! [`solve_brute`] filters the explicit catalog of legal grids.
//! [`solve_logic`] deduces cells line by line the way a person would and
//! falls back to a case split when the rules run dry.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automaton::PatternSystem;
use crate::balanced::{catalog_full_grids, BitGrid};
use crate::error::{Error, Result};
use crate::MemoryCap;

/// A square grid of clues; `None` is a blank.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grid {
    size: usize,
    cells: Vec<Option<u8>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridDoc {
    size: usize,
    rows: Vec<String>,
}

impl Grid {
    pub fn empty(size: usize) -> Result<Self> {
        if size == 0 || !size.is_multiple_of(2) || size > 64 {
            return Err(Error::invalid(format!(
                "grid size must be even and between 2 and 64, got {size}"
            )));
        }
        Ok(Grid {
            size,
            cells: vec![None; size * size],
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, r: usize, c: usize) -> Option<u8> {
        self.cells[r * self.size + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Option<u8>) {
        self.cells[r * self.size + c] = v;
    }

    pub fn clue_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }

    pub fn from_solution(g: &BitGrid) -> Self {
        Grid {
            size: g.height,
            cells: (0..g.height)
                .flat_map(|i| (0..g.width).map(move |j| Some(g.get(i, j))))
                .collect(),
        }
    }

    /// The filled grid as bit rows, or `None` while blanks remain.
    pub fn to_solution(&self) -> Option<BitGrid> {
        let mut rows = vec![0u64; self.size];
        for (r, row) in rows.iter_mut().enumerate() {
            for c in 0..self.size {
                *row |= (self.get(r, c)? as u64) << c;
            }
        }
        Some(BitGrid {
            height: self.size,
            width: self.size,
            rows,
        })
    }

    /// Every clue flipped.
    pub fn complement(&self) -> Grid {
        Grid {
            size: self.size,
            cells: self.cells.iter().map(|c| c.map(|v| 1 - v)).collect(),
        }
    }

    pub fn row_strings(&self) -> Vec<String> {
        (0..self.size)
            .map(|r| {
                (0..self.size)
                    .map(|c| match self.get(r, c) {
                        None => '.',
                        Some(v) => char::from(b'0' + v),
                    })
                    .collect()
            })
            .collect()
    }

    fn from_rows<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let mut grid = Grid::empty(rows.len())?;
        for (r, line) in rows.iter().enumerate() {
            let chars: Vec<char> = line.as_ref().chars().collect();
            if chars.len() != grid.size {
                return Err(Error::Parse {
                    line: r + 1,
                    msg: format!("expected {} cells, found {}", grid.size, chars.len()),
                });
            }
            for (c, ch) in chars.into_iter().enumerate() {
                let v = match ch {
                    '0' => Some(0),
                    '1' => Some(1),
                    '.' => None,
                    other => {
                        return Err(Error::Parse {
                            line: r + 1,
                            msg: format!("unexpected character {other:?}"),
                        })
                    }
                };
                grid.set(r, c, v);
            }
        }
        Ok(grid)
    }

    /// One row per line using `0`, `1` and `.`; blank lines are ignored.
    pub fn parse_text(text: &str) -> Result<Self> {
        let rows: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        Grid::from_rows(&rows)
    }

    pub fn to_text(&self) -> String {
        let mut s = self.row_strings().join("\n");
        s.push('\n');
        s
    }

    /// `{"size":6, "rows":["1..0..", ...]}`
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GridDoc = serde_json::from_str(text)?;
        let grid = Grid::from_rows(&doc.rows)?;
        if grid.size != doc.size {
            return Err(Error::invalid(format!(
                "size {} disagrees with {} rows",
                doc.size, grid.size
            )));
        }
        Ok(grid)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GridDoc {
            size: self.size,
            rows: self.row_strings(),
        })
        .expect("plain data")
    }

    /// Accepts either the JSON form or the text form.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Grid::from_json(text)
        } else {
            Grid::parse_text(text)
        }
    }

    fn line_cells(&self, line: usize) -> Vec<(usize, usize)> {
        let n = self.size;
        if line < n {
            (0..n).map(|c| (line, c)).collect()
        } else {
            (0..n).map(|r| (r, line - n)).collect()
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// The explicit list of legal grids of one size.
pub fn catalog(size: usize, cap: MemoryCap) -> Result<Vec<BitGrid>> {
    Grid::empty(size)?;
    catalog_full_grids(&PatternSystem::not_alone(), size / 2, cap)
}

fn clue_masks(g: &Grid) -> Vec<(u64, u64)> {
    (0..g.size)
        .map(|r| {
            (0..g.size).fold((0u64, 0u64), |(mask, val), c| match g.get(r, c) {
                None => (mask, val),
                Some(v) => (mask | 1 << c, val | (v as u64) << c),
            })
        })
        .collect()
}

fn check_catalog(g: &Grid, catalog: &[BitGrid]) -> Result<()> {
    if let Some(first) = catalog.first() {
        if first.height != g.size || first.width != g.size {
            return Err(Error::invalid(format!(
                "catalog holds {}x{} grids, puzzle is {}x{}",
                first.height, first.width, g.size, g.size
            )));
        }
    }
    Ok(())
}

/// Catalog grids agreeing with every clue, in catalog order.
pub fn solve_brute(g: &Grid, catalog: &[BitGrid]) -> Result<Vec<BitGrid>> {
    solve_brute_capped(g, catalog, usize::MAX)
}

/// Like [`solve_brute`] but stops after `limit` solutions.
pub fn solve_brute_capped(g: &Grid, catalog: &[BitGrid], limit: usize) -> Result<Vec<BitGrid>> {
    check_catalog(g, catalog)?;
    let masks = clue_masks(g);
    Ok(catalog
        .iter()
        .filter(|cand| {
            cand.rows
                .iter()
                .zip(&masks)
                .all(|(row, (mask, val))| row & mask == *val)
        })
        .take(limit)
        .cloned()
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// Both neighbours hold `v`, so the middle is `v`.
    NeighborsEqual,
    /// A change of value between two cells extends both runs outward.
    EdgePropagation,
    /// A line already holds `k` ones (or `k` zeros).
    Count,
    /// Every legal completion of the line agrees on the cell.
    LineLookahead,
    /// A guess made when no rule applies.
    CaseSplit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deduction {
    pub cell: (usize, usize),
    pub value: u8,
    pub rule: Rule,
    pub because: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeductionTrace {
    pub steps: Vec<Deduction>,
}

impl DeductionTrace {
    pub fn used_case_split(&self) -> bool {
        self.steps.iter().any(|d| d.rule == Rule::CaseSplit)
    }

    /// Applies the trace to `clues`; fails if a step overwrites a cell.
    pub fn replay(&self, clues: &Grid) -> Result<Grid> {
        let mut g = clues.clone();
        for d in &self.steps {
            let (r, c) = d.cell;
            if g.get(r, c).is_some() {
                return Err(Error::InvariantViolation(format!("cell ({r}, {c}) is already filled")));
            }
            g.set(r, c, Some(d.value));
        }
        Ok(g)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Unique(BitGrid),
    Multiple,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicOutcome {
    pub status: SolveStatus,
    /// Steps leading to the reported solution (empty unless unique).
    pub trace: DeductionTrace,
    /// True when some case split was needed anywhere in the search.
    pub needed_case_split: bool,
}

/// Legal lines of length `2k`: `k` ones, no `010`, no `101`.
pub fn legal_lines(size: usize) -> Vec<u64> {
    let k = size / 2;
    (0u64..1 << size)
        .filter(|&w| w.count_ones() as usize == k)
        .filter(|&w| {
            (1..size - 1).all(|i| {
                let (a, b, c) = ((w >> (i - 1)) & 1, (w >> i) & 1, (w >> (i + 1)) & 1);
                !(a == c && a != b)
            })
        })
        .collect()
}

/// Marker for a line without legal completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Contradiction;

struct Solver {
    size: usize,
    lines: Vec<u64>,
}

impl Solver {
    fn new(size: usize) -> Self {
        Solver {
            size,
            lines: legal_lines(size),
        }
    }

    fn read(&self, g: &Grid, line: usize) -> (Vec<(usize, usize)>, Vec<Option<u8>>) {
        let cells = g.line_cells(line);
        let vals = cells.iter().map(|&(r, c)| g.get(r, c)).collect();
        (cells, vals)
    }

    fn fill(&self, g: &mut Grid, trace: &mut DeductionTrace, cell: (usize, usize), value: u8, rule: Rule, because: Vec<(usize, usize)>) {
        g.set(cell.0, cell.1, Some(value));
        trace.steps.push(Deduction {
            cell,
            value,
            rule,
            because,
        });
    }

    fn neighbors_equal(&self, g: &mut Grid, trace: &mut DeductionTrace) -> bool {
        let mut changed = false;
        for line in 0..2 * self.size {
            let (cells, vals) = self.read(g, line);
            for i in 1..self.size - 1 {
                if let (Some(a), None, Some(b)) = (vals[i - 1], vals[i], vals[i + 1]) {
                    if a == b && g.get(cells[i].0, cells[i].1).is_none() {
                        self.fill(g, trace, cells[i], a, Rule::NeighborsEqual, vec![cells[i - 1], cells[i + 1]]);
                        changed = true;
                    }
                }
            }
        }
        changed
    }

    fn edge_propagation(&self, g: &mut Grid, trace: &mut DeductionTrace) -> bool {
        let mut changed = false;
        for line in 0..2 * self.size {
            let (cells, _) = self.read(g, line);
            for i in 0..self.size - 1 {
                let (v, w) = (g.get(cells[i].0, cells[i].1), g.get(cells[i + 1].0, cells[i + 1].1));
                let (Some(v), Some(w)) = (v, w) else { continue };
                if v == w {
                    continue;
                }
                let pair = vec![cells[i], cells[i + 1]];
                if i + 2 < self.size && g.get(cells[i + 2].0, cells[i + 2].1).is_none() {
                    self.fill(g, trace, cells[i + 2], w, Rule::EdgePropagation, pair.clone());
                    changed = true;
                }
                if i >= 1 && g.get(cells[i - 1].0, cells[i - 1].1).is_none() {
                    self.fill(g, trace, cells[i - 1], v, Rule::EdgePropagation, pair);
                    changed = true;
                }
            }
        }
        changed
    }

    fn count(&self, g: &mut Grid, trace: &mut DeductionTrace) -> bool {
        let k = self.size / 2;
        let mut changed = false;
        for line in 0..2 * self.size {
            let (cells, vals) = self.read(g, line);
            let ones = vals.iter().filter(|v| **v == Some(1)).count();
            let zeros = vals.iter().filter(|v| **v == Some(0)).count();
            let fill_with = if ones == k && zeros < k {
                0
            } else if zeros == k && ones < k {
                1
            } else {
                continue;
            };
            let filled: Vec<(usize, usize)> = cells
                .iter()
                .zip(&vals)
                .filter(|(_, v)| **v == Some(1 - fill_with))
                .map(|(c, _)| *c)
                .collect();
            for (cell, v) in cells.iter().zip(&vals) {
                if v.is_none() {
                    self.fill(g, trace, *cell, fill_with, Rule::Count, filled.clone());
                    changed = true;
                }
            }
        }
        changed
    }

    fn lookahead(&self, g: &mut Grid, trace: &mut DeductionTrace) -> std::result::Result<bool, Contradiction> {
        let mut changed = false;
        for line in 0..2 * self.size {
            let (cells, vals) = self.read(g, line);
            let (mut mask, mut want) = (0u64, 0u64);
            for (i, v) in vals.iter().enumerate() {
                if let Some(v) = v {
                    mask |= 1 << i;
                    want |= (*v as u64) << i;
                }
            }
            let full = (1u64 << self.size) - 1;
            let (mut all_one, mut all_zero, mut any) = (full, full, false);
            for &w in &self.lines {
                if w & mask == want {
                    any = true;
                    all_one &= w;
                    all_zero &= !w;
                }
            }
            if !any {
                return Err(Contradiction);
            }
            let known: Vec<(usize, usize)> = cells
                .iter()
                .zip(&vals)
                .filter(|(_, v)| v.is_some())
                .map(|(c, _)| *c)
                .collect();
            for i in 0..self.size {
                if mask >> i & 1 == 1 {
                    continue;
                }
                let forced = if all_one >> i & 1 == 1 {
                    1
                } else if all_zero >> i & 1 == 1 {
                    0
                } else {
                    continue;
                };
                self.fill(g, trace, cells[i], forced, Rule::LineLookahead, known.clone());
                changed = true;
            }
        }
        Ok(changed)
    }

    fn propagate(&self, g: &mut Grid, trace: &mut DeductionTrace) -> std::result::Result<(), Contradiction> {
        loop {
            if self.neighbors_equal(g, trace) || self.edge_propagation(g, trace) || self.count(g, trace) {
                self.lookahead_check(g)?;
                continue;
            }
            if !self.lookahead(g, trace)? {
                return Ok(());
            }
        }
    }

    fn lookahead_check(&self, g: &Grid) -> std::result::Result<(), Contradiction> {
        for line in 0..2 * self.size {
            let (_, vals) = self.read(g, line);
            let (mut mask, mut want) = (0u64, 0u64);
            for (i, v) in vals.iter().enumerate() {
                if let Some(v) = v {
                    mask |= 1 << i;
                    want |= (*v as u64) << i;
                }
            }
            if !self.lines.iter().any(|&w| w & mask == want) {
                return Err(Contradiction);
            }
        }
        Ok(())
    }

    fn search(&self, g: Grid, trace: DeductionTrace, found: &mut Vec<(BitGrid, DeductionTrace)>, split: &mut bool) {
        let mut g = g;
        let mut trace = trace;
        if self.propagate(&mut g, &mut trace).is_err() {
            return;
        }
        let Some(pos) = g.cells.iter().position(Option::is_none) else {
            found.push((g.to_solution().expect("complete"), trace));
            return;
        };
        *split = true;
        let cell = (pos / self.size, pos % self.size);
        for v in [0u8, 1] {
            if found.len() >= 2 {
                return;
            }
            let mut branch = g.clone();
            let mut t = trace.clone();
            self.fill(&mut branch, &mut t, cell, v, Rule::CaseSplit, Vec::new());
            self.search(branch, t, found, split);
        }
    }
}

/// Applies the deduction rules to a fixpoint without guessing. Every value
/// written is forced in all legal completions of `g`.
pub fn propagate(g: &Grid) -> std::result::Result<(Grid, DeductionTrace), Contradiction> {
    let solver = Solver::new(g.size);
    let mut out = g.clone();
    let mut trace = DeductionTrace::default();
    solver.propagate(&mut out, &mut trace)?;
    Ok((out, trace))
}

/// Human-style solving with a case-split fallback; counts up to two
/// solutions.
pub fn solve_logic(g: &Grid) -> LogicOutcome {
    let solver = Solver::new(g.size);
    let mut found = Vec::new();
    let mut split = false;
    solver.search(g.clone(), DeductionTrace::default(), &mut found, &mut split);
    let (status, trace) = match found.len() {
        0 => (SolveStatus::None, DeductionTrace::default()),
        1 => {
            let (grid, trace) = found.pop().expect("one solution");
            (SolveStatus::Unique(grid), trace)
        }
        _ => (SolveStatus::Multiple, DeductionTrace::default()),
    };
    LogicOutcome {
        status,
        trace,
        needed_case_split: split,
    }
}

/// Draws a legal grid and strips clues in seeded random order, keeping a
/// clue only when removing it would allow a second solution. Retries with
/// fresh draws until at most `max_clues` clues remain, returning the
/// sparsest puzzle seen if that never happens.
pub fn generate(size: usize, seed: u64, max_clues: usize, catalog: &[BitGrid]) -> Result<Grid> {
    const ATTEMPTS: usize = 32;
    Grid::empty(size)?;
    if catalog.is_empty() {
        return Err(Error::invalid("empty catalog"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<Grid> = None;
    for _ in 0..ATTEMPTS {
        let solution = &catalog[rng.random_range(0..catalog.len())];
        let mut puzzle = Grid::from_solution(solution);
        check_catalog(&puzzle, catalog)?;
        let mut order: Vec<usize> = (0..size * size).collect();
        order.shuffle(&mut rng);
        if puzzle.clue_count() > max_clues {
            for pos in order {
                let (r, c) = (pos / size, pos % size);
                let keep = puzzle.get(r, c);
                puzzle.set(r, c, None);
                if solve_brute_capped(&puzzle, catalog, 2)?.len() > 1 {
                    puzzle.set(r, c, keep);
                }
            }
        }
        let better = best.as_ref().is_none_or(|b| puzzle.clue_count() < b.clue_count());
        if better {
            best = Some(puzzle);
        }
        if best.as_ref().is_some_and(|b| b.clue_count() <= max_clues) {
            break;
        }
    }
    Ok(best.expect("at least one attempt"))
}

/// [`generate`] for each seed, in parallel; output order follows `seeds`.
pub fn generate_batch(size: usize, seeds: &[u64], max_clues: usize, catalog: &[BitGrid]) -> Result<Vec<Grid>> {
    seeds
        .par_iter()
        .map(|&s| generate(size, s, max_clues, catalog))
        .collect()
}
