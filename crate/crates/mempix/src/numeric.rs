//! Small dense linear-algebra kernel used by the Newton solver.
//!
//! Pixel circuits have at most a dozen unknowns, so everything here is
//! plain row-major dense storage with partial (row) pivoting. No sparse
//! machinery, no iterative refinement.

use thiserror::Error;

/// Singularity cutoff for pivots. MNA matrices with gmin stepping are
/// well-scaled, so a fixed absolute threshold is adequate.
pub const DEFAULT_PIVOT_TOL: f64 = 1e-13;

#[derive(Debug, Error, PartialEq)]
pub enum NumericError {
    /// A pivot fell below the singularity threshold. In an MNA context this
    /// usually signals a floating node or a zero-conductance loop upstream.
    #[error("singular matrix: pivot magnitude {magnitude:.3e} at elimination step {step} (<= {tol:.3e})")]
    Singular { step: usize, magnitude: f64, tol: f64 },
    #[error("dimension mismatch: matrix is {expected}x{expected}, vector has length {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite entry at ({row},{col})")]
    NonFinite { row: usize, col: usize },
}

/// Square row-major matrix of real values.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, entries: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Build from row-major data. Panics if `data.len() != n*n`.
    pub fn from_rows(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n, "row-major data must be n*n");
        Self { n, entries: data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn fill(&mut self, value: f64) {
        self.entries.fill(value);
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// y = A·x.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for (i, yi) in y.iter_mut().enumerate() {
            let row = &self.entries[i * self.n..(i + 1) * self.n];
            *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        y
    }

    fn check_finite(&self) -> Result<(), NumericError> {
        for (k, v) in self.entries.iter().enumerate() {
            if !v.is_finite() {
                return Err(NumericError::NonFinite { row: k / self.n, col: k % self.n });
            }
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.entries[r * self.n + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.entries[r * self.n + c]
    }
}

/// Packed LU factors with the pivot permutation, from `lu_factor`.
///
/// Rows of the packed matrix store U on and above the diagonal and the
/// unit-diagonal L multipliers below it. `perm[k]` is the original row
/// index that ended up in position `k`.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    packed: Vec<f64>,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Entry of the unit-lower-triangular factor.
    pub fn l(&self, r: usize, c: usize) -> f64 {
        match r.cmp(&c) {
            std::cmp::Ordering::Greater => self.packed[r * self.n + c],
            std::cmp::Ordering::Equal => 1.0,
            std::cmp::Ordering::Less => 0.0,
        }
    }

    /// Entry of the upper-triangular factor.
    pub fn u(&self, r: usize, c: usize) -> f64 {
        if r <= c {
            self.packed[r * self.n + c]
        } else {
            0.0
        }
    }
}

/// Factor `a` as P·a = L·U with partial pivoting.
pub fn lu_factor(a: &DenseMatrix, pivot_tol: f64) -> Result<LuFactors, NumericError> {
    a.check_finite()?;
    let n = a.n;
    let mut packed = a.entries.clone();
    let mut perm: Vec<usize> = (0..n).collect();

    for k in 0..n {
        // Pick the largest remaining pivot in column k.
        let mut best = k;
        let mut best_mag = packed[k * n + k].abs();
        for r in (k + 1)..n {
            let mag = packed[r * n + k].abs();
            if mag > best_mag {
                best = r;
                best_mag = mag;
            }
        }
        if best_mag <= pivot_tol {
            return Err(NumericError::Singular { step: k, magnitude: best_mag, tol: pivot_tol });
        }
        if best != k {
            for c in 0..n {
                packed.swap(k * n + c, best * n + c);
            }
            perm.swap(k, best);
        }
        let pivot = packed[k * n + k];
        for r in (k + 1)..n {
            let mult = packed[r * n + k] / pivot;
            packed[r * n + k] = mult;
            for c in (k + 1)..n {
                packed[r * n + c] -= mult * packed[k * n + c];
            }
        }
    }

    Ok(LuFactors { n, packed, perm })
}

/// Solve A·x = b using factors from `lu_factor`.
pub fn lu_solve(f: &LuFactors, b: &[f64]) -> Result<Vec<f64>, NumericError> {
    let n = f.n;
    if b.len() != n {
        return Err(NumericError::DimensionMismatch { expected: n, got: b.len() });
    }

    // Forward substitution on the permuted right-hand side.
    let mut x: Vec<f64> = f.perm.iter().map(|&p| b[p]).collect();
    for r in 1..n {
        let mut s = x[r];
        for c in 0..r {
            s -= f.packed[r * n + c] * x[c];
        }
        x[r] = s;
    }
    // Back substitution.
    for r in (0..n).rev() {
        let mut s = x[r];
        for c in (r + 1)..n {
            s -= f.packed[r * n + c] * x[c];
        }
        x[r] = s / f.packed[r * n + r];
    }
    Ok(x)
}

/// Infinity norm of a vector.
pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
