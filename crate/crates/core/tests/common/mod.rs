//! Independent brute-force oracles shared by the integration tests.

#![allow(dead_code)]

use balmat::automaton::{avoids_all, PatternSystem};

/// Balanced `2k x 2n` matrices, enumerated row by row over every row with
/// `n` ones and filtered on column sums.
pub fn brute_balanced(k: usize, n: usize) -> u64 {
    let width = 2 * n;
    let rows: Vec<u64> = (0u64..1 << width)
        .filter(|r| r.count_ones() as usize == n)
        .collect();
    let mut count = 0u64;
    let mut col_sums = vec![0usize; width];
    fn go(depth: usize, k: usize, rows: &[u64], col_sums: &mut [usize], count: &mut u64) {
        if depth == 2 * k {
            if col_sums.iter().all(|&s| s == k) {
                *count += 1;
            }
            return;
        }
        for &r in rows {
            for (j, s) in col_sums.iter_mut().enumerate() {
                *s += (r >> j & 1) as usize;
            }
            if col_sums.iter().all(|&s| s <= k) {
                go(depth + 1, k, rows, col_sums, count);
            }
            for (j, s) in col_sums.iter_mut().enumerate() {
                *s -= (r >> j & 1) as usize;
            }
        }
    }
    go(0, k, &rows, &mut col_sums, &mut count);
    count
}

/// Balanced `2k x 2n` binary matrices avoiding the system, by checking all
/// `2^(4kn)` matrices.
pub fn brute_balanced_avoid(sys: &PatternSystem, k: usize, n: usize) -> u64 {
    let (h, w) = (2 * k, 2 * n);
    let cells = h * w;
    assert!(cells <= 24, "too many cells for exhaustive enumeration");
    let mut count = 0;
    for bits in 0u64..1 << cells {
        let cell = |i: usize, j: usize| (bits >> (i * w + j) & 1) as u8;
        let rows_ok = (0..h).all(|i| {
            let row: Vec<u8> = (0..w).map(|j| cell(i, j)).collect();
            row.iter().filter(|&&b| b == 1).count() == n && avoids_all(&row, &sys.horizontal)
        });
        if !rows_ok {
            continue;
        }
        let cols_ok = (0..w).all(|j| {
            let col: Vec<u8> = (0..h).map(|i| cell(i, j)).collect();
            col.iter().filter(|&&b| b == 1).count() == k && avoids_all(&col, &sys.vertical)
        });
        count += cols_ok as u64;
    }
    count
}

/// `k x n` binary matrices avoiding the system, by checking all of them.
pub fn brute_avoid(sys: &PatternSystem, k: usize, n: usize) -> u64 {
    let cells = k * n;
    let mut count = 0;
    for bits in 0u64..1 << cells {
        let cell = |i: usize, j: usize| (bits >> (i * n + j) & 1) as u8;
        let ok = (0..k).all(|i| avoids_all(&(0..n).map(|j| cell(i, j)).collect::<Vec<_>>(), &sys.horizontal))
            && (0..n).all(|j| avoids_all(&(0..k).map(|i| cell(i, j)).collect::<Vec<_>>(), &sys.vertical));
        count += ok as u64;
    }
    count
}

pub fn fixture(path: &str) -> String {
    let full = format!("{}/fixtures/{path}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&full).unwrap_or_else(|e| panic!("{full}: {e}"))
}
