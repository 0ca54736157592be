//! Nullspaces of small dense matrices over a prime field.

use crate::arith::{inv_mod, mul_mod, sub_mod};

/// Row-major `rows x cols` matrix of residues modulo `p`.
pub(crate) struct ModMatrix {
    pub rows: usize,
    pub cols: usize,
    pub p: u64,
    pub data: Vec<u64>,
}

impl ModMatrix {
    pub fn zeros(rows: usize, cols: usize, p: u64) -> Self {
        ModMatrix {
            rows,
            cols,
            p,
            data: vec![0; rows * cols],
        }
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v % self.p;
    }

    /// Basis of the right nullspace. Each basis vector has a 1 in its own
    /// free column and 0 in every other free column; free columns are
    /// returned alongside.
    pub fn nullspace(mut self) -> Vec<(usize, Vec<u64>)> {
        let (rows, cols, p) = (self.rows, self.cols, self.p);
        let mut pivots: Vec<usize> = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(found) = (r..rows).find(|&i| self.data[i * cols + c] != 0) else {
                continue;
            };
            if found != r {
                for j in 0..cols {
                    self.data.swap(found * cols + j, r * cols + j);
                }
            }
            let inv = inv_mod(self.data[r * cols + c], p);
            for j in c..cols {
                self.data[r * cols + j] = mul_mod(self.data[r * cols + j], inv, p);
            }
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let f = self.data[i * cols + c];
                if f == 0 {
                    continue;
                }
                for j in c..cols {
                    let t = mul_mod(f, self.data[r * cols + j], p);
                    self.data[i * cols + j] = sub_mod(self.data[i * cols + j], t, p);
                }
            }
            pivots.push(c);
            r += 1;
        }
        let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![0u64; cols];
                v[f] = 1;
                for (row, &pc) in pivots.iter().enumerate() {
                    let x = self.data[row * cols + f];
                    v[pc] = if x == 0 { 0 } else { p - x };
                }
                (f, v)
            })
            .collect()
    }
}
