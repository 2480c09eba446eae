//! Index conventions and canonical projectors for the tensor spaces in play.
//!
//! Fix dim V = 4 and an N-dimensional space H_N. A tensor in
//! Λ²(H_N^∨ ⊗ V^∨) is realized as a 4N×4N skew matrix indexed by pairs
//! (i, a) ↦ 4i + a. It splits canonically as
//!
//!   Λ²(H^∨⊗V^∨) = S²H^∨⊗Λ²V^∨ ⊕ Λ²H^∨⊗S²V^∨,
//!
//! and the first summand (matrices symmetric under swapping H-indices,
//! hence antisymmetric under swapping V-indices) is the space of hyperwebs
//! of quadrics. A hyperweb is stored compactly as one coefficient per
//! (i ≤ j, a < b), in lexicographic order, so serialized forms are unique.

use crate::error::{Error, Result};
use crate::field::{FieldOps, Fp};
use crate::matrix::FpMatrix;
use rand::RngExt;

/// The six V-index pairs a < b in canonical order.
pub const VPAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Canonical index of the unordered V-pair {a, b} plus the sign of (a, b)
/// relative to the stored a < b representative. `None` on the diagonal.
pub fn vpair_index(a: usize, b: usize) -> Option<(usize, bool)> {
    debug_assert!(a < 4 && b < 4);
    match a.cmp(&b) {
        std::cmp::Ordering::Equal => None,
        std::cmp::Ordering::Less => {
            let idx = VPAIRS.iter().position(|&(x, y)| (x, y) == (a, b)).unwrap();
            Some((idx, false))
        }
        std::cmp::Ordering::Greater => {
            let idx = VPAIRS.iter().position(|&(x, y)| (x, y) == (b, a)).unwrap();
            Some((idx, true))
        }
    }
}

/// Index of the unordered H-pair {i, j} (i ≤ j after sorting) among the
/// n(n+1)/2 pairs in lexicographic order.
pub fn hpair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < n && j < n);
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * (2 * n - i + 1) / 2 + (j - i)
}

/// Number of unordered H-pairs.
pub fn hpair_count(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Dimension bookkeeping for charge n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceDims {
    pub n: usize,
}

impl SpaceDims {
    pub fn new(n: usize) -> SpaceDims {
        assert!(n >= 1, "charge must be positive");
        SpaceDims { n }
    }

    /// dim H_n ⊗ V
    pub fn hv(&self) -> usize {
        4 * self.n
    }

    /// dim S_n = dim S²H_n^∨ ⊗ Λ²V^∨ = 3n(n+1)
    pub fn s(&self) -> usize {
        3 * self.n * (self.n + 1)
    }

    /// dim Λ²H_n^∨ ⊗ S²V^∨ = 5n(n−1)
    pub fn complement(&self) -> usize {
        5 * self.n * (self.n - 1)
    }

    pub fn lambda2v(&self) -> usize {
        6
    }

    pub fn s2v(&self) -> usize {
        10
    }
}

/// A skew 4N×4N matrix, i.e. an element of Λ²(H_N^∨⊗V^∨).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewTensor {
    n: usize,
    mat: FpMatrix,
}

impl SkewTensor {
    pub fn new(n: usize, mat: FpMatrix) -> Result<SkewTensor> {
        if mat.rows() != 4 * n || mat.cols() != 4 * n {
            return Err(Error::ShapeMismatch(format!(
                "skew tensor for charge {n} needs {0}x{0}, got {1}x{2}",
                4 * n,
                mat.rows(),
                mat.cols()
            )));
        }
        if mat.transpose() != mat.neg() {
            return Err(Error::NotSkew);
        }
        Ok(SkewTensor { n, mat })
    }

    pub fn zero(field: Fp, n: usize) -> SkewTensor {
        SkewTensor {
            n,
            mat: FpMatrix::zeros(field, 4 * n, 4 * n),
        }
    }

    pub fn charge(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &FpMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> FpMatrix {
        self.mat
    }

    pub fn get(&self, i: usize, a: usize, j: usize, b: usize) -> u64 {
        self.mat.get(4 * i + a, 4 * j + b)
    }

    /// Split into the hyperweb summand and its complement.
    ///
    /// The S-part averages over the H-index swap,
    ///   s[(i,a),(j,b)] = (t[(i,a),(j,b)] + t[(j,a),(i,b)]) / 2,
    /// which is the unique equivariant splitting of the decomposition;
    /// the L-part is the remainder. Both are again skew overall.
    pub fn project_canonical(&self) -> (SkewTensor, SkewTensor) {
        let f = self.mat.field();
        let half = f.half();
        let n = self.n;
        let s = FpMatrix::from_fn(f, 4 * n, 4 * n, |r, c| {
            let (i, a) = (r / 4, r % 4);
            let (j, b) = (c / 4, c % 4);
            let swapped = self.get(j, a, i, b);
            f.mul(half, f.add(self.get(i, a, j, b), swapped))
        });
        let l = self.mat.sub(&s);
        (SkewTensor { n, mat: s }, SkewTensor { n, mat: l })
    }

    pub fn is_zero(&self) -> bool {
        self.mat.is_zero()
    }

    pub fn random<R: RngExt>(field: Fp, n: usize, rng: &mut R) -> SkewTensor {
        let mut mat = FpMatrix::zeros(field, 4 * n, 4 * n);
        for r in 0..4 * n {
            for c in r + 1..4 * n {
                let v = field.sample(rng);
                mat.set(r, c, v);
                mat.set(c, r, field.neg(v));
            }
        }
        SkewTensor { n, mat }
    }
}

/// Compact coefficients of a hyperweb: one scalar per (i ≤ j, a < b).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperwebCoeffs {
    n: usize,
    field: Fp,
    values: Vec<u64>,
}

impl HyperwebCoeffs {
    pub fn zero(field: Fp, n: usize) -> HyperwebCoeffs {
        HyperwebCoeffs {
            n,
            field,
            values: vec![0; hpair_count(n) * 6],
        }
    }

    pub fn from_values(field: Fp, n: usize, values: Vec<u64>) -> Result<HyperwebCoeffs> {
        if values.len() != hpair_count(n) * 6 {
            return Err(Error::ShapeMismatch(format!(
                "charge {n} expects {} coefficients, got {}",
                hpair_count(n) * 6,
                values.len()
            )));
        }
        if values.iter().any(|&v| v >= field.modulus()) {
            return Err(Error::InvalidParameter(
                "coefficient not reduced modulo the session prime".into(),
            ));
        }
        Ok(HyperwebCoeffs { n, field, values })
    }

    pub fn random<R: RngExt>(field: Fp, n: usize, rng: &mut R) -> HyperwebCoeffs {
        let values = (0..hpair_count(n) * 6).map(|_| field.sample(rng)).collect();
        HyperwebCoeffs { n, field, values }
    }

    pub fn charge(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize, j: usize, vpair: usize) -> u64 {
        self.values[hpair_index(self.n, i, j) * 6 + vpair]
    }

    pub fn set(&mut self, i: usize, j: usize, vpair: usize, v: u64) {
        self.values[hpair_index(self.n, i, j) * 6 + vpair] = v;
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// Expand to the 4N×4N realization:
    /// t[(i,a),(j,b)] = ±coeff({i,j}, {a,b}), zero when a = b.
    pub fn inflate(&self) -> SkewTensor {
        let f = self.field;
        let n = self.n;
        let mat = FpMatrix::from_fn(f, 4 * n, 4 * n, |r, c| {
            let (i, a) = (r / 4, r % 4);
            let (j, b) = (c / 4, c % 4);
            match vpair_index(a, b) {
                None => 0,
                Some((vp, flip)) => {
                    let v = self.get(i, j, vp);
                    if flip {
                        f.neg(v)
                    } else {
                        v
                    }
                }
            }
        });
        SkewTensor { n, mat }
    }

    /// Read coefficients back off a skew tensor; fails if the tensor has a
    /// component in the Λ²H^∨⊗S²V^∨ summand.
    pub fn deflate(t: &SkewTensor) -> Result<HyperwebCoeffs> {
        let (_, l) = t.project_canonical();
        if !l.is_zero() {
            return Err(Error::NotInSummand);
        }
        let f = t.mat.field();
        let n = t.n;
        let mut out = HyperwebCoeffs::zero(f, n);
        for i in 0..n {
            for j in i..n {
                for (vp, &(a, b)) in VPAIRS.iter().enumerate() {
                    out.set(i, j, vp, t.get(i, a, j, b));
                }
            }
        }
        Ok(out)
    }
}

/// An element of Hom(H_cols, H_rows^∨) ⊗ Λ²V^∨: the shape of the
/// off-diagonal block C of a hyperweb, and of the blocks φ, ψ, λ, with the
/// variance of the H-factors left implicit. Realized as a 4·rows × 4·cols
/// matrix antisymmetric in the V-indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomWeb {
    rows: usize,
    cols: usize,
    field: Fp,
    /// values[(i·cols + k)·6 + vpair]
    values: Vec<u64>,
}

impl HomWeb {
    pub fn zero(field: Fp, rows: usize, cols: usize) -> HomWeb {
        HomWeb {
            rows,
            cols,
            field,
            values: vec![0; rows * cols * 6],
        }
    }

    pub fn random<R: RngExt>(field: Fp, rows: usize, cols: usize, rng: &mut R) -> HomWeb {
        let values = (0..rows * cols * 6).map(|_| field.sample(rng)).collect();
        HomWeb {
            rows,
            cols,
            field,
            values,
        }
    }

    pub fn from_values(field: Fp, rows: usize, cols: usize, values: Vec<u64>) -> Result<HomWeb> {
        if values.len() != rows * cols * 6 {
            return Err(Error::ShapeMismatch(format!(
                "{rows}x{cols} block expects {} coefficients, got {}",
                rows * cols * 6,
                values.len()
            )));
        }
        Ok(HomWeb {
            rows,
            cols,
            field,
            values,
        })
    }

    pub fn h_rows(&self) -> usize {
        self.rows
    }

    pub fn h_cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn get(&self, i: usize, k: usize, vpair: usize) -> u64 {
        self.values[(i * self.cols + k) * 6 + vpair]
    }

    pub fn set(&mut self, i: usize, k: usize, vpair: usize, v: u64) {
        self.values[(i * self.cols + k) * 6 + vpair] = v;
    }

    pub fn scale(&self, s: u64) -> HomWeb {
        let f = self.field;
        HomWeb {
            rows: self.rows,
            cols: self.cols,
            field: f,
            values: self.values.iter().map(|&v| f.mul(s, v)).collect(),
        }
    }

    /// Split into the first `at` H-rows and the rest.
    pub fn split_rows(&self, at: usize) -> (HomWeb, HomWeb) {
        assert!(at <= self.rows, "split point past the last row");
        let mut top = HomWeb::zero(self.field, at, self.cols);
        let mut bottom = HomWeb::zero(self.field, self.rows - at, self.cols);
        for k in 0..self.cols {
            for vp in 0..6 {
                for i in 0..at {
                    top.set(i, k, vp, self.get(i, k, vp));
                }
                for i in at..self.rows {
                    bottom.set(i - at, k, vp, self.get(i, k, vp));
                }
            }
        }
        (top, bottom)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    /// The 4·rows × 4·cols matrix realization
    /// X[(i,a),(k,b)] = ±coeff(i, k, {a,b}).
    pub fn realize(&self) -> FpMatrix {
        let f = self.field;
        FpMatrix::from_fn(f, 4 * self.rows, 4 * self.cols, |r, c| {
            let (i, a) = (r / 4, r % 4);
            let (k, b) = (c / 4, c % 4);
            match vpair_index(a, b) {
                None => 0,
                Some((vp, flip)) => {
                    let v = self.get(i, k, vp);
                    if flip {
                        f.neg(v)
                    } else {
                        v
                    }
                }
            }
        })
    }

    /// Inverse of [`realize`](Self::realize); fails if the matrix is not
    /// antisymmetric in the V-indices.
    pub fn from_matrix(field: Fp, rows: usize, cols: usize, m: &FpMatrix) -> Result<HomWeb> {
        if m.rows() != 4 * rows || m.cols() != 4 * cols {
            return Err(Error::ShapeMismatch(format!(
                "expected {}x{}, got {}x{}",
                4 * rows,
                4 * cols,
                m.rows(),
                m.cols()
            )));
        }
        for i in 0..rows {
            for k in 0..cols {
                for a in 0..4 {
                    for b in 0..4 {
                        let forward = m.get(4 * i + a, 4 * k + b);
                        let flipped = m.get(4 * i + b, 4 * k + a);
                        if field.add(forward, flipped) != 0 {
                            return Err(Error::NotInSummand);
                        }
                    }
                }
            }
        }
        let mut out = HomWeb::zero(field, rows, cols);
        for i in 0..rows {
            for k in 0..cols {
                for (vp, &(a, b)) in VPAIRS.iter().enumerate() {
                    out.set(i, k, vp, m.get(4 * i + a, 4 * k + b));
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Seed;

    fn fp() -> Fp {
        Fp::default_prime()
    }

    #[test]
    fn dims() {
        let d = SpaceDims::new(3);
        assert_eq!(d.hv(), 12);
        assert_eq!(d.s(), 36);
        assert_eq!(d.complement(), 30);
        assert_eq!(SpaceDims::new(1).complement(), 0);
        // dim Λ²(H⊗V) = C(12,2) = 66 splits as 36 + 30
        assert_eq!(d.s() + d.complement(), 66);
    }

    #[test]
    fn projectors_are_idempotent_and_orthogonal() {
        let f = fp();
        let mut rng = Seed(17).rng();
        for trial in 0..100 {
            let n = 1 + (trial % 3);
            let t = SkewTensor::random(f, n, &mut rng);
            let (s, l) = t.project_canonical();
            // complementary
            assert_eq!(s.matrix().add(l.matrix()), *t.matrix());
            // idempotent
            let (ss, sl) = s.project_canonical();
            assert_eq!(ss, s);
            assert!(sl.is_zero());
            // orthogonal
            let (ls, ll) = l.project_canonical();
            assert!(ls.is_zero());
            assert_eq!(ll, l);
        }
    }

    #[test]
    fn zero_projects_to_zero() {
        let t = SkewTensor::zero(fp(), 2);
        let (s, l) = t.project_canonical();
        assert!(s.is_zero() && l.is_zero());
    }

    #[test]
    fn symmetric_times_skew_is_fixed() {
        // t[(i,a),(j,b)] = S[i,j]·ω[a,b] with S symmetric, ω skew lies in
        // the hyperweb summand already.
        let f = fp();
        let mut rng = Seed(4).rng();
        let n = 3;
        let mut s_h = FpMatrix::random(f, n, n, &mut rng);
        for i in 0..n {
            for j in 0..i {
                let v = s_h.get(j, i);
                s_h.set(i, j, v);
            }
        }
        let mut omega = FpMatrix::zeros(f, 4, 4);
        for &(a, b) in VPAIRS.iter() {
            let v = f.sample(&mut rng);
            omega.set(a, b, v);
            omega.set(b, a, f.neg(v));
        }
        let mat = FpMatrix::from_fn(f, 4 * n, 4 * n, |r, c| {
            f.mul(s_h.get(r / 4, c / 4), omega.get(r % 4, c % 4))
        });
        let t = SkewTensor::new(n, mat).unwrap();
        let (s, l) = t.project_canonical();
        assert_eq!(s, t);
        assert!(l.is_zero());
    }

    #[test]
    fn inflate_deflate_roundtrip() {
        let f = fp();
        let mut rng = Seed(5).rng();
        let coeffs = HyperwebCoeffs::random(f, 3, &mut rng);
        let t = coeffs.inflate();
        assert_eq!(t.matrix().transpose(), t.matrix().neg());
        let back = HyperwebCoeffs::deflate(&t).unwrap();
        assert_eq!(back, coeffs);
    }

    #[test]
    fn generic_skew_is_not_in_summand() {
        let f = fp();
        let mut rng = Seed(6).rng();
        let t = SkewTensor::random(f, 2, &mut rng);
        assert_eq!(HyperwebCoeffs::deflate(&t), Err(Error::NotInSummand));
    }

    #[test]
    fn charge_one_standard_form() {
        // Coefficients ω_{01} = ω_{23} = 1 give the standard symplectic
        // 4×4 matrix.
        let f = fp();
        let mut coeffs = HyperwebCoeffs::zero(f, 1);
        coeffs.set(0, 0, 0, 1); // (0,1)
        coeffs.set(0, 0, 5, 1); // (2,3)
        let t = coeffs.inflate();
        let m = t.matrix();
        assert_eq!(m.get(0, 1), 1);
        assert_eq!(m.get(1, 0), f.neg(1));
        assert_eq!(m.get(2, 3), 1);
        assert_eq!(m.get(3, 2), f.neg(1));
        assert_eq!(m.rank(), 4);
    }

    #[test]
    fn inflate_span_has_full_dimension() {
        // The realizations of the basis coefficient tables span a space of
        // dimension 3N(N+1).
        let f = fp();
        let n = 2;
        let dim = hpair_count(n) * 6;
        let mut rows = FpMatrix::zeros(f, dim, 16 * n * n);
        for k in 0..dim {
            let mut vals = vec![0u64; dim];
            vals[k] = 1;
            let coeffs = HyperwebCoeffs::from_values(f, n, vals).unwrap();
            let t = coeffs.inflate();
            for r in 0..4 * n {
                for c in 0..4 * n {
                    rows.set(k, r * 4 * n + c, t.matrix().get(r, c));
                }
            }
        }
        assert_eq!(rows.rank(), SpaceDims::new(n).s());
        assert_eq!(SpaceDims::new(n).s(), dim);
    }

    #[test]
    fn homweb_realize_roundtrip() {
        let f = fp();
        let mut rng = Seed(7).rng();
        let w = HomWeb::random(f, 3, 2, &mut rng);
        let m = w.realize();
        let back = HomWeb::from_matrix(f, 3, 2, &m).unwrap();
        assert_eq!(back, w);
        // a generic matrix is rejected
        let bad = FpMatrix::random(f, 12, 8, &mut rng);
        assert_eq!(HomWeb::from_matrix(f, 3, 2, &bad), Err(Error::NotInSummand));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn projectors_split_every_skew_tensor(seed in 0u64..10_000, n in 1usize..4) {
                let f = fp();
                let mut rng = Seed(seed).rng();
                let t = SkewTensor::random(f, n, &mut rng);
                let (s, l) = t.project_canonical();
                prop_assert_eq!(&s.matrix().add(l.matrix()), t.matrix());
                let (ss, sl) = s.project_canonical();
                prop_assert_eq!(ss, s);
                prop_assert!(sl.is_zero());
            }

            #[test]
            fn coefficient_roundtrip(seed in 0u64..10_000, n in 1usize..5) {
                let f = fp();
                let mut rng = Seed(seed).rng();
                let coeffs = HyperwebCoeffs::random(f, n, &mut rng);
                prop_assert_eq!(HyperwebCoeffs::deflate(&coeffs.inflate()).unwrap(), coeffs);
            }

            #[test]
            fn homweb_roundtrip(seed in 0u64..10_000, rows in 1usize..4, cols in 1usize..4) {
                let f = fp();
                let mut rng = Seed(seed).rng();
                let w = HomWeb::random(f, rows, cols, &mut rng);
                prop_assert_eq!(HomWeb::from_matrix(f, rows, cols, &w.realize()).unwrap(), w);
            }
        }
    }
}
