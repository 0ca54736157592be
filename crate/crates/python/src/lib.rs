//! Python bindings for `balmat`.
//!
//! Counting functions return lists of Python integers. Pattern systems,
//! recurrences and puzzles cross the boundary in their JSON or text forms.

use num_bigint::{BigInt, BigUint};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use ::balmat as core;
use core::automaton::PatternSystem;
use core::puzzle::{self, Grid, SolveStatus};
use core::recurrence::{self, PolyRecurrence, Sequence};
use core::MemoryCap;

create_exception!(balmat, BalmatError, PyException);

fn py_err(e: core::Error) -> PyErr {
    BalmatError::new_err(e.to_string())
}

fn cap(memory_cap: Option<&str>) -> PyResult<MemoryCap> {
    memory_cap.map_or(Ok(MemoryCap::default()), |s| MemoryCap::parse(s).map_err(py_err))
}

fn system(json: &str) -> PyResult<PatternSystem> {
    PatternSystem::from_json(json).map_err(py_err)
}

/// `b_k(1..=n)`: balanced `2k x 2n` binary matrices.
#[pyfunction]
#[pyo3(signature = (k, n, memory_cap=None))]
fn bk_terms(k: usize, n: usize, memory_cap: Option<&str>) -> PyResult<Vec<BigUint>> {
    Ok(core::symfunc::bk_terms_with(k, n, cap(memory_cap)?).map_err(py_err)?.terms)
}

/// `k x n` matrices avoiding a pattern system, for `n = 1..=count`.
#[pyfunction]
fn mk_terms(system_json: &str, k: usize, count: usize) -> PyResult<Vec<BigUint>> {
    core::automaton::mk_terms(&system(system_json)?, k, count).map_err(py_err)
}

/// Balanced `2k x 2n` matrices avoiding a pattern system, for `n = 1..=count`.
#[pyfunction]
#[pyo3(signature = (system_json, k, count, memory_cap=None))]
fn balanced_avoid_terms(
    system_json: &str,
    k: usize,
    count: usize,
    memory_cap: Option<&str>,
) -> PyResult<Vec<BigUint>> {
    core::balanced::balanced_avoid_terms(&system(system_json)?, k, count, cap(memory_cap)?).map_err(py_err)
}

/// Rational generating function of the avoiding counts, rendered as text.
#[pyfunction]
#[pyo3(signature = (system_json, k, max_order=None))]
fn generating_function(system_json: &str, k: usize, max_order: Option<usize>) -> PyResult<String> {
    let (gf, _) = core::automaton::generating_function(&system(system_json)?, k, max_order).map_err(py_err)?;
    Ok(gf.to_string())
}

/// Guess a P-recursive recurrence; returns its JSON form or `None`.
#[pyfunction]
#[pyo3(signature = (terms, offset=1, max_order=2, max_degree=3))]
fn guess_precursive(terms: Vec<BigInt>, offset: i64, max_order: usize, max_degree: usize) -> PyResult<Option<String>> {
    let report =
        recurrence::guess_precursive(&Sequence::new(offset, terms), max_order, max_degree).map_err(py_err)?;
    Ok(report.recurrence.map(|r| r.to_json()))
}

/// True when the recurrence holds at every index the terms can check.
#[pyfunction]
#[pyo3(signature = (recurrence_json, terms, offset=1))]
fn verify_recurrence(recurrence_json: &str, terms: Vec<BigInt>, offset: i64) -> PyResult<bool> {
    let rec = PolyRecurrence::from_json(recurrence_json).map_err(py_err)?;
    Ok(recurrence::verify_recurrence(&rec, &Sequence::new(offset, terms)).success())
}

/// Solve a puzzle given as text rows; returns `(status, rows)`.
#[pyfunction]
#[pyo3(signature = (text, method="logic"))]
fn solve_puzzle(text: &str, method: &str) -> PyResult<(String, Option<Vec<String>>)> {
    let grid = Grid::parse(text).map_err(py_err)?;
    let status = match method {
        "logic" => puzzle::solve_logic(&grid).status,
        "brute" => {
            let catalog = puzzle::catalog(grid.size(), MemoryCap::default()).map_err(py_err)?;
            let mut found = puzzle::solve_brute_capped(&grid, &catalog, 2).map_err(py_err)?;
            match found.len() {
                0 => SolveStatus::None,
                1 => SolveStatus::Unique(found.remove(0)),
                _ => SolveStatus::Multiple,
            }
        }
        other => return Err(BalmatError::new_err(format!("unknown method {other:?}"))),
    };
    Ok(match status {
        SolveStatus::Unique(g) => ("unique".into(), Some(g.row_strings())),
        SolveStatus::Multiple => ("multiple".into(), None),
        SolveStatus::None => ("none".into(), None),
    })
}

/// Generate a puzzle with a unique solution; returns its text rows.
#[pyfunction]
#[pyo3(signature = (size=6, seed=0, max_clues=36))]
fn generate_puzzle(size: usize, seed: u64, max_clues: usize) -> PyResult<String> {
    let catalog = puzzle::catalog(size, MemoryCap::default()).map_err(py_err)?;
    Ok(puzzle::generate(size, seed, max_clues, &catalog).map_err(py_err)?.to_text())
}

#[pymodule]
fn balmat(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("BalmatError", m.py().get_type::<BalmatError>())?;
    m.add_function(wrap_pyfunction!(bk_terms, m)?)?;
    m.add_function(wrap_pyfunction!(mk_terms, m)?)?;
    m.add_function(wrap_pyfunction!(balanced_avoid_terms, m)?)?;
    m.add_function(wrap_pyfunction!(generating_function, m)?)?;
    m.add_function(wrap_pyfunction!(guess_precursive, m)?)?;
    m.add_function(wrap_pyfunction!(verify_recurrence, m)?)?;
    m.add_function(wrap_pyfunction!(solve_puzzle, m)?)?;
    m.add_function(wrap_pyfunction!(generate_puzzle, m)?)?;
    Ok(())
}
