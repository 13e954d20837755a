use num_complex::Complex64;

use super::OperatorMatrix;
use crate::{Error, Result};

/// Largest `|i - j|` over nonzero entries.
pub fn bandwidth(m: &OperatorMatrix) -> usize {
    let n = m.dim();
    let e = m.entries();
    let mut bw = 0;
    for j in 0..n {
        for i in 0..n {
            if e[(i, j)] != Complex64::new(0.0, 0.0) {
                bw = bw.max(i.abs_diff(j));
            }
        }
    }
    bw
}

/// Dense `rows × cols` block stored row-major.
struct Block {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl Block {
    fn from_matrix(m: &OperatorMatrix, r0: usize, rows: usize, c0: usize, cols: usize) -> Self {
        let e = m.entries();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(e[(r0 + i, c0 + j)]);
            }
        }
        Block { rows, cols, data }
    }

    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }

    fn mul(&self, rhs: &Block) -> Block {
        let mut out = Block { rows: self.rows, cols: rhs.cols, data: vec![Complex64::default(); self.rows * rhs.cols] };
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                for j in 0..rhs.cols {
                    *out.at_mut(i, j) += a * rhs.at(k, j);
                }
            }
        }
        out
    }

    /// `self⁻¹ rhs` by Gaussian elimination with partial pivoting.
    fn solve(&self, rhs: &Block, z: Complex64) -> Result<Block> {
        let n = self.rows;
        let mut a = self.data.clone();
        let mut x = rhs.data.clone();
        let m = rhs.cols;
        let scale = a.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&r, &s| a[r * n + col].norm().total_cmp(&a[s * n + col].norm()))
                .unwrap();
            if a[piv * n + col].norm() < 1e-14 * scale {
                return Err(Error::Singular(z));
            }
            if piv != col {
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                }
                for j in 0..m {
                    x.swap(piv * m + j, col * m + j);
                }
            }
            let d = a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] / d;
                if f == Complex64::default() {
                    continue;
                }
                for j in col..n {
                    let v = a[col * n + j];
                    a[r * n + j] -= f * v;
                }
                for j in 0..m {
                    let v = x[col * m + j];
                    x[r * m + j] -= f * v;
                }
            }
        }
        for col in (0..n).rev() {
            let d = a[col * n + col];
            for j in 0..m {
                let mut s = x[col * m + j];
                for k in col + 1..n {
                    s -= a[col * n + k] * x[k * m + j];
                }
                x[col * m + j] = s / d;
            }
        }
        Ok(Block { rows: n, cols: m, data: x })
    }
}

/// A Hermitian matrix cut into blocks of its bandwidth, ready for repeated
/// resolvent evaluations.
pub struct BandedResolvent {
    diag: Vec<Block>,
    /// `upper[k]` couples block `k` to block `k + 1`.
    upper: Vec<Block>,
    lower: Vec<Block>,
}

impl BandedResolvent {
    pub fn new(m: &OperatorMatrix) -> Result<Self> {
        let defect = m.hermiticity_defect();
        if defect > super::HERMITIAN_TOL * m.max_abs().max(1.0) {
            return Err(Error::NotHermitian(defect));
        }
        let n = m.dim();
        let w = bandwidth(m).max(1).min(n);
        let starts: Vec<usize> = (0..n).step_by(w).collect();
        let size = |k: usize| (n - starts[k]).min(w);
        let blocks = starts.len();
        Ok(BandedResolvent {
            diag: (0..blocks).map(|k| Block::from_matrix(m, starts[k], size(k), starts[k], size(k))).collect(),
            upper: (0..blocks - 1)
                .map(|k| Block::from_matrix(m, starts[k], size(k), starts[k + 1], size(k + 1)))
                .collect(),
            lower: (0..blocks - 1)
                .map(|k| Block::from_matrix(m, starts[k + 1], size(k + 1), starts[k], size(k)))
                .collect(),
        })
    }

    /// `⟨δ₀, (M - z)⁻¹ δ₀⟩`.
    ///
    /// The block-tridiagonal system is reduced by Schur complements from the
    /// far end toward site 0, at cost `O(n·w²)` per call. Real `z` is
    /// accepted; a vanishing pivot reports [`Error::Singular`].
    pub fn entry(&self, z: Complex64) -> Result<Complex64> {
        let shifted = |k: usize| {
            let b = &self.diag[k];
            let mut out = Block { rows: b.rows, cols: b.cols, data: b.data.clone() };
            for i in 0..b.rows {
                *out.at_mut(i, i) -= z;
            }
            out
        };
        let last = self.diag.len() - 1;
        let mut schur = shifted(last);
        for k in (0..last).rev() {
            let correction = self.upper[k].mul(&schur.solve(&self.lower[k], z)?);
            let mut next = shifted(k);
            for (d, c) in next.data.iter_mut().zip(&correction.data) {
                *d -= c;
            }
            schur = next;
        }
        let mut e0 = Block { rows: schur.rows, cols: 1, data: vec![Complex64::default(); schur.rows] };
        e0.data[0] = Complex64::new(1.0, 0.0);
        Ok(schur.solve(&e0, z)?.data[0])
    }
}

/// `⟨δ₀, (M - z)⁻¹ δ₀⟩`, the first diagonal entry of the resolvent of a
/// Hermitian `M`; see [`BandedResolvent`].
pub fn resolvent_entry(m: &OperatorMatrix, z: Complex64) -> Result<Complex64> {
    BandedResolvent::new(m)?.entry(z)
}
