//! Dense exact matrices over a [`FieldOps`] field.
//!
//! Elimination uses the first-nonzero pivot rule (scan columns left to
//! right, take the first row with a nonzero entry), so ranks, kernels and
//! echelon forms are reproducible bit for bit. No asymptotically fast
//! tricks: sizes in this crate stay well below a hundred.

use crate::error::{Error, Result};
use crate::field::{FieldOps, Fp};
use rand::RngExt;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<F: FieldOps> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

/// The workhorse alias: matrices over the session prime field.
pub type FpMatrix = Matrix<Fp>;

/// Result of reduced row-echelon elimination.
pub struct Echelon<F: FieldOps> {
    pub reduced: Matrix<F>,
    /// Column index of the pivot in each nonzero row, ascending.
    pub pivots: Vec<usize>,
}

impl<F: FieldOps> std::fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{:?} ", self.data[i * self.cols + j])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<F: FieldOps> Matrix<F> {
    pub fn zeros(field: F, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_fn(
        field: F,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> F::Elem,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn random<R: RngExt>(field: F, rows: usize, cols: usize, rng: &mut R) -> Self {
        Self::from_fn(field, rows, cols, |_, _| field.sample(rng))
    }

    /// Rejection-sample an invertible square matrix. Singularity has
    /// probability O(n/p), so this rarely loops.
    pub fn random_invertible<R: RngExt>(field: F, n: usize, rng: &mut R) -> Self {
        loop {
            let m = Self::random(field, n, n, rng);
            if m.rank() == n {
                return m;
            }
        }
    }

    pub fn field(&self) -> F {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> F::Elem {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F::Elem) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| self.field.is_zero(v))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.field, self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "add shape"
        );
        Self::from_fn(self.field, self.rows, self.cols, |i, j| {
            self.field.add(self.get(i, j), other.get(i, j))
        })
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "sub shape"
        );
        Self::from_fn(self.field, self.rows, self.cols, |i, j| {
            self.field.sub(self.get(i, j), other.get(i, j))
        })
    }

    pub fn neg(&self) -> Self {
        Self::from_fn(self.field, self.rows, self.cols, |i, j| {
            self.field.neg(self.get(i, j))
        })
    }

    pub fn scale(&self, s: F::Elem) -> Self {
        Self::from_fn(self.field, self.rows, self.cols, |i, j| {
            self.field.mul(s, self.get(i, j))
        })
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "mul shape");
        let f = self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn select_rows(&self, sel: &[usize]) -> Self {
        Self::from_fn(self.field, sel.len(), self.cols, |i, j| self.get(sel[i], j))
    }

    pub fn select_cols(&self, sel: &[usize]) -> Self {
        Self::from_fn(self.field, self.rows, sel.len(), |i, j| self.get(i, sel[j]))
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "hstack shape");
        Self::from_fn(self.field, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j)
            } else {
                other.get(i, j - self.cols)
            }
        })
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack shape");
        Self::from_fn(self.field, self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows {
                self.get(i, j)
            } else {
                other.get(i - self.rows, j)
            }
        })
    }

    /// Copy `block` into self with upper-left corner at (r0, c0).
    pub fn paste(&mut self, r0: usize, c0: usize, block: &Self) {
        assert!(
            r0 + block.rows <= self.rows && c0 + block.cols <= self.cols,
            "paste shape"
        );
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j));
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(
            r0 + rows <= self.rows && c0 + cols <= self.cols,
            "block shape"
        );
        Self::from_fn(self.field, rows, cols, |i, j| self.get(r0 + i, c0 + j))
    }

    /// Reduced row-echelon form with deterministic pivoting.
    pub fn echelon(&self) -> Echelon<F> {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| !f.is_zero(m.get(r, col))) else {
                continue;
            };
            if pr != row {
                for j in 0..m.cols {
                    let a = m.get(row, j);
                    let b = m.get(pr, j);
                    m.set(row, j, b);
                    m.set(pr, j, a);
                }
            }
            let inv = f.inv(m.get(row, col)).expect("pivot nonzero");
            for j in col..m.cols {
                m.set(row, j, f.mul(inv, m.get(row, j)));
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col);
                if f.is_zero(factor) {
                    continue;
                }
                for j in col..m.cols {
                    let v = f.sub(m.get(r, j), f.mul(factor, m.get(row, j)));
                    m.set(r, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        Echelon { reduced: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Basis of the right kernel, one column per free variable, ordered by
    /// ascending free-column index.
    pub fn kernel_basis(&self) -> Self {
        let f = self.field;
        let ech = self.echelon();
        let pivot_set: Vec<usize> = ech.pivots.clone();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        let mut k = Self::zeros(f, self.cols, free.len());
        for (idx, &fc) in free.iter().enumerate() {
            k.set(fc, idx, f.one());
            for (r, &pc) in pivot_set.iter().enumerate() {
                k.set(pc, idx, f.neg(ech.reduced.get(r, fc)));
            }
        }
        k
    }

    /// Rank together with the kernel basis, sharing one elimination.
    pub fn rank_kernel(&self) -> (usize, Self) {
        let k = self.kernel_basis();
        (self.cols - k.cols, k)
    }

    pub fn invert(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "invert on {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(self.clone());
        }
        let aug = self.hstack(&Self::identity(self.field, n));
        let ech = aug.echelon();
        if ech.pivots.len() < n || ech.pivots[n - 1] != n - 1 {
            return Err(Error::SingularMatrix {
                rank: ech.pivots.iter().filter(|&&p| p < n).count(),
                size: n,
            });
        }
        Ok(ech.reduced.block(0, n, n, n))
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Solve M·x = b for each column of b. Returns the particular solution
    /// with all free variables zero, or `NoSolution`.
    pub fn solve(&self, b: &Self) -> Result<Self> {
        if b.rows != self.rows {
            return Err(Error::ShapeMismatch(format!(
                "solve: {}x{} vs rhs {}x{}",
                self.rows, self.cols, b.rows, b.cols
            )));
        }
        let f = self.field;
        let aug = self.hstack(b);
        let ech = aug.echelon();
        if ech.pivots.iter().any(|&p| p >= self.cols) {
            return Err(Error::NoSolution);
        }
        let mut x = Self::zeros(f, self.cols, b.cols);
        for (r, &pc) in ech.pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(pc, j, ech.reduced.get(r, self.cols + j));
            }
        }
        Ok(x)
    }

    pub fn det(&self) -> F::Elem {
        assert_eq!(self.rows, self.cols, "det shape");
        let f = self.field;
        let n = self.rows;
        let mut m = self.clone();
        let mut det = f.one();
        for col in 0..n {
            let Some(pr) = (col..n).find(|&r| !f.is_zero(m.get(r, col))) else {
                return f.zero();
            };
            if pr != col {
                for j in 0..n {
                    let a = m.get(col, j);
                    let b = m.get(pr, j);
                    m.set(col, j, b);
                    m.set(pr, j, a);
                }
                det = f.neg(det);
            }
            let pivot = m.get(col, col);
            det = f.mul(det, pivot);
            let inv = f.inv(pivot).expect("pivot nonzero");
            for r in col + 1..n {
                let factor = f.mul(m.get(r, col), inv);
                if f.is_zero(factor) {
                    continue;
                }
                for j in col..n {
                    let v = f.sub(m.get(r, j), f.mul(factor, m.get(col, j)));
                    m.set(r, j, v);
                }
            }
        }
        det
    }

    /// Kronecker product with the k×k identity on the right:
    /// block (i,j) of the result is g\[i,j\]·I_k.
    pub fn kron_identity(&self, k: usize) -> Self {
        let f = self.field;
        let mut out = Self::zeros(f, self.rows * k, self.cols * k);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = self.get(i, j);
                if f.is_zero(v) {
                    continue;
                }
                for a in 0..k {
                    out.set(i * k + a, j * k + a, v);
                }
            }
        }
        out
    }
}

impl<F: FieldOps> Matrix<F> {
    /// Map entries into another field (used to lift F_p matrices into an
    /// extension before evaluating at extension points).
    pub fn lift<G: FieldOps>(
        &self,
        target: G,
        mut embed: impl FnMut(F::Elem) -> G::Elem,
    ) -> Matrix<G> {
        Matrix::from_fn(target, self.rows, self.cols, |i, j| embed(self.get(i, j)))
    }
}
