//! Hyperwebs of quadrics and their core operations: rank/kernel, the
//! symplectic quotient (W_A, q_A), restriction along subspace inclusions,
//! block decomposition, and the GL(H_N) action.

use crate::error::{Error, Result};
use crate::field::Fp;
use crate::matrix::FpMatrix;
use crate::tensor::{HomWeb, HyperwebCoeffs, SkewTensor, VPAIRS};
use rand::RngExt;

/// A hyperweb of quadrics of charge N: an element of S²H_N^∨ ⊗ Λ²V^∨,
/// kept together with its cached 4N×4N skew realization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperweb {
    coeffs: HyperwebCoeffs,
    matrix: FpMatrix,
}

impl Hyperweb {
    pub fn from_coeffs(coeffs: HyperwebCoeffs) -> Hyperweb {
        let matrix = coeffs.inflate().into_matrix();
        Hyperweb { coeffs, matrix }
    }

    /// Build from a skew tensor; fails if it leaves the hyperweb summand.
    pub fn from_tensor(t: &SkewTensor) -> Result<Hyperweb> {
        Ok(Hyperweb::from_coeffs(HyperwebCoeffs::deflate(t)?))
    }

    pub fn zero(field: Fp, n: usize) -> Hyperweb {
        Hyperweb::from_coeffs(HyperwebCoeffs::zero(field, n))
    }

    /// Block-diagonal copies of the standard symplectic form: invertible
    /// for every charge, handy as a canonical basepoint.
    pub fn standard(field: Fp, n: usize) -> Hyperweb {
        let mut coeffs = HyperwebCoeffs::zero(field, n);
        for i in 0..n {
            coeffs.set(i, i, 0, 1); // dx0 ∧ dx1
            coeffs.set(i, i, 5, 1); // dx2 ∧ dx3
        }
        Hyperweb::from_coeffs(coeffs)
    }

    pub fn random<R: RngExt>(field: Fp, n: usize, rng: &mut R) -> Hyperweb {
        Hyperweb::from_coeffs(HyperwebCoeffs::random(field, n, rng))
    }

    pub fn charge(&self) -> usize {
        self.coeffs.charge()
    }

    pub fn field(&self) -> Fp {
        self.coeffs.field()
    }

    pub fn coeffs(&self) -> &HyperwebCoeffs {
        &self.coeffs
    }

    pub fn matrix(&self) -> &FpMatrix {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn is_invertible(&self) -> bool {
        self.matrix.is_invertible()
    }

    pub fn add(&self, other: &Hyperweb) -> Hyperweb {
        assert_eq!(self.charge(), other.charge());
        let t = SkewTensor::new(self.charge(), self.matrix.add(&other.matrix))
            .expect("sum of skew matrices is skew");
        Hyperweb::from_tensor(&t).expect("summand is closed under addition")
    }

    pub fn scale(&self, s: u64) -> Hyperweb {
        let t =
            SkewTensor::new(self.charge(), self.matrix.scale(s)).expect("scaling keeps skewness");
        Hyperweb::from_tensor(&t).expect("summand is closed under scaling")
    }

    /// Rank of the realization H_N⊗V → H_N^∨⊗V^∨ and a kernel basis.
    pub fn rank_and_kernel(&self) -> (usize, FpMatrix) {
        self.matrix.rank_kernel()
    }

    /// The symplectic quotient W_A = (H_N⊗V)/ker A for a hyperweb of rank
    /// exactly 2N+2r.
    ///
    /// Coordinates on W_A come from the deterministic elimination: c_A is
    /// the nonzero rows of the reduced echelon form of A, and q_A is the
    /// principal submatrix of A on the pivot columns. With that choice
    /// c_A^T·q_A·c_A = A holds on the nose.
    pub fn symplectic_quotient(&self, r: usize) -> Result<SymplecticQuotient> {
        let n = self.charge();
        let expected = 2 * n + 2 * r;
        let ech = self.matrix.echelon();
        let found = ech.pivots.len();
        if found != expected {
            return Err(Error::RankMismatch { expected, found });
        }
        let c = ech.reduced.select_rows(&(0..found).collect::<Vec<_>>());
        let q = self
            .matrix
            .select_rows(&ech.pivots)
            .select_cols(&ech.pivots);
        let kernel = self.matrix.kernel_basis();

        let quot = SymplecticQuotient {
            w_dim: expected,
            c,
            q,
            kernel,
            pivots: ech.pivots,
        };
        debug_assert!(quot.verify(self));
        Ok(quot)
    }

    /// Pull back along an injective map τ: H_{M'} → H_M given as an M×M'
    /// matrix (columns are the images of the basis of H_{M'}). The result
    /// is the hyperweb (τ⊗1)^T A (τ⊗1) of charge M'.
    pub fn restrict(&self, tau: &FpMatrix) -> Result<Hyperweb> {
        let m = self.charge();
        if tau.rows() != m {
            return Err(Error::ShapeMismatch(format!(
                "restriction map has {} rows, hyperweb charge is {m}",
                tau.rows()
            )));
        }
        let m_new = tau.cols();
        if m_new == 0 || m_new > m || tau.rank() != m_new {
            return Err(Error::NonInjectiveTau);
        }
        let big = tau.kron_identity(4);
        let pulled = big.transpose().mul(&self.matrix).mul(&big);
        let t = SkewTensor::new(m_new, pulled)?;
        Hyperweb::from_tensor(&t)
    }

    /// Right action of g ∈ GL(H_N) by pullback: A ↦ (g⊗1)^T A (g⊗1).
    pub fn gl_act(&self, g: &FpMatrix) -> Result<Hyperweb> {
        let n = self.charge();
        if g.rows() != n || g.cols() != n {
            return Err(Error::ShapeMismatch(format!(
                "group element is {}x{}, charge is {n}",
                g.rows(),
                g.cols()
            )));
        }
        if !g.is_invertible() {
            return Err(Error::SingularG);
        }
        let big = g.kron_identity(4);
        let pulled = big.transpose().mul(&self.matrix).mul(&big);
        let t = SkewTensor::new(n, pulled).expect("pullback preserves skewness");
        Ok(Hyperweb::from_tensor(&t).expect("pullback preserves the hyperweb summand"))
    }

    /// Decompose with respect to ξ: H_{n+m} ≅ H_n ⊕ H_m into the diagonal
    /// blocks B ∈ S_n, A3 ∈ S_m and the mixed block C.
    pub fn block_decompose(&self, xi: &Xi) -> Result<BlockData> {
        if xi.total() != self.charge() {
            return Err(Error::ShapeMismatch(format!(
                "decomposition splits charge {}, hyperweb has charge {}",
                xi.total(),
                self.charge()
            )));
        }
        let split = match &xi.basis {
            None => self.clone(),
            Some(g) => self.gl_act(g)?,
        };
        let f = self.field();
        let (n, m) = (xi.upper, xi.lower);
        let mut b = HyperwebCoeffs::zero(f, n);
        let mut a3 = HyperwebCoeffs::zero(f, m.max(1));
        let mut c = HomWeb::zero(f, n, m);
        for vp in 0..VPAIRS.len() {
            for i in 0..n {
                for j in i..n {
                    b.set(i, j, vp, split.coeffs.get(i, j, vp));
                }
            }
            for i in 0..m {
                for j in i..m {
                    a3.set(i, j, vp, split.coeffs.get(n + i, n + j, vp));
                }
            }
            for i in 0..n {
                for k in 0..m {
                    c.set(i, k, vp, split.coeffs.get(i, n + k, vp));
                }
            }
        }
        Ok(BlockData {
            b: Hyperweb::from_coeffs(b),
            c,
            a3: if m == 0 {
                Hyperweb::zero(f, 1) // placeholder, never used when m = 0
            } else {
                Hyperweb::from_coeffs(a3)
            },
            lower: m,
        })
    }

    /// Inverse of [`Hyperweb::block_decompose`]: reassemble a charge-(n+m) hyperweb
    /// from its blocks.
    pub fn assemble_blocks(b: &Hyperweb, c: &HomWeb, a3: &Hyperweb, xi: &Xi) -> Result<Hyperweb> {
        let f = b.field();
        let (n, m) = (xi.upper, xi.lower);
        if b.charge() != n || c.h_rows() != n || c.h_cols() != m || (m > 0 && a3.charge() != m) {
            return Err(Error::ShapeMismatch(
                "block shapes do not match the decomposition".into(),
            ));
        }
        let mut coeffs = HyperwebCoeffs::zero(f, n + m);
        for vp in 0..VPAIRS.len() {
            for i in 0..n {
                for j in i..n {
                    coeffs.set(i, j, vp, b.coeffs.get(i, j, vp));
                }
            }
            for i in 0..m {
                for j in i..m {
                    coeffs.set(n + i, n + j, vp, a3.coeffs.get(i, j, vp));
                }
            }
            for i in 0..n {
                for k in 0..m {
                    coeffs.set(i, n + k, vp, c.get(i, k, vp));
                }
            }
        }
        let split = Hyperweb::from_coeffs(coeffs);
        match &xi.basis {
            None => Ok(split),
            Some(g) => split.gl_act(&g.invert()?),
        }
    }
}

/// The quotient W_A = (H_N⊗V)/ker A carrying the induced symplectic form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticQuotient {
    /// dim W_A = 2N + 2r.
    pub w_dim: usize,
    /// The surjection c_A: H_N⊗V → W_A (w_dim × 4N).
    pub c: FpMatrix,
    /// The induced skew nondegenerate form on W_A (w_dim × w_dim).
    pub q: FpMatrix,
    /// Basis of ker A (4N × (2N−2r)).
    pub kernel: FpMatrix,
    /// Pivot columns defining the W_A coordinates.
    pub pivots: Vec<usize>,
}

impl SymplecticQuotient {
    /// Check the defining identities against the source hyperweb.
    pub fn verify(&self, a: &Hyperweb) -> bool {
        let skew = self.q.transpose() == self.q.neg();
        let nondeg = self.q.is_invertible();
        let factor = self.c.transpose().mul(&self.q).mul(&self.c) == *a.matrix();
        let kills_kernel = self.c.mul(&self.kernel).is_zero();
        skew && nondeg && factor && kills_kernel
    }
}

/// An ordered direct-sum decomposition H_{n+m} ≅ H_n ⊕ H_m: the first n
/// coordinates against the last m, optionally after a change of basis
/// (columns of `basis` are the new basis vectors). A random basis makes the
/// decomposition general.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Xi {
    pub upper: usize,
    pub lower: usize,
    pub basis: Option<FpMatrix>,
}

impl Xi {
    pub fn coordinate(upper: usize, lower: usize) -> Xi {
        Xi {
            upper,
            lower,
            basis: None,
        }
    }

    pub fn with_basis(upper: usize, lower: usize, basis: FpMatrix) -> Result<Xi> {
        if basis.rows() != upper + lower || basis.cols() != upper + lower {
            return Err(Error::ShapeMismatch(
                "basis size must match the split".into(),
            ));
        }
        if !basis.is_invertible() {
            return Err(Error::SingularG);
        }
        Ok(Xi {
            upper,
            lower,
            basis: Some(basis),
        })
    }

    pub fn random<R: RngExt>(field: Fp, upper: usize, lower: usize, rng: &mut R) -> Xi {
        let basis = FpMatrix::random_invertible(field, upper + lower, rng);
        Xi {
            upper,
            lower,
            basis: Some(basis),
        }
    }

    pub fn total(&self) -> usize {
        self.upper + self.lower
    }

    /// The inclusion i_ξ: H_n ↪ H_{n+m} as a (n+m)×n matrix.
    pub fn inclusion_upper(&self, field: Fp) -> FpMatrix {
        match &self.basis {
            Some(g) => g.select_cols(&(0..self.upper).collect::<Vec<_>>()),
            None => {
                let mut m = FpMatrix::zeros(field, self.total(), self.upper);
                for i in 0..self.upper {
                    m.set(i, i, 1);
                }
                m
            }
        }
    }

    /// Transport along the GL action: the decomposition observing
    /// `gl_act(A, g)` the way `self` observes `A` has basis g⁻¹·(this basis).
    pub fn transport(&self, g: &FpMatrix) -> Result<Xi> {
        let ginv = g.invert()?;
        let basis = match &self.basis {
            Some(b) => ginv.mul(b),
            None => ginv,
        };
        Xi::with_basis(self.upper, self.lower, basis)
    }
}

/// The blocks of a hyperweb with respect to a decomposition ξ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockData {
    /// Upper diagonal block, a hyperweb on H_n.
    pub b: Hyperweb,
    /// Mixed block in Hom(H_m, H_n^∨)⊗Λ²V^∨.
    pub c: HomWeb,
    /// Lower diagonal block, a hyperweb on H_m (ignore when m = 0).
    pub a3: Hyperweb,
    lower: usize,
}

impl BlockData {
    pub fn lower_dim(&self) -> usize {
        self.lower
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
    fn standard_is_invertible_every_charge() {
        for n in 1..=4 {
            let a = Hyperweb::standard(fp(), n);
            let (rank, kernel) = a.rank_and_kernel();
            assert_eq!(rank, 4 * n);
            assert_eq!(kernel.cols(), 0);
        }
    }

    #[test]
    fn zero_hyperweb_rank() {
        let a = Hyperweb::zero(fp(), 2);
        assert_eq!(a.rank_and_kernel().0, 0);
    }

    #[test]
    fn quotient_of_invertible_is_trivial() {
        let mut rng = Seed(1).rng();
        let a = loop {
            let c = Hyperweb::random(fp(), 2, &mut rng);
            if c.is_invertible() {
                break c;
            }
        };
        let quot = a.symplectic_quotient(a.charge()).unwrap();
        assert_eq!(quot.w_dim, 8);
        assert_eq!(quot.c, FpMatrix::identity(fp(), 8));
        assert_eq!(&quot.q, a.matrix());
        assert!(quot.verify(&a));
    }

    #[test]
    fn quotient_standard_charge_one() {
        let a = Hyperweb::standard(fp(), 1);
        let quot = a.symplectic_quotient(1).unwrap();
        assert_eq!(quot.w_dim, 4);
        assert_eq!(&quot.q, a.matrix());
    }

    #[test]
    fn quotient_rank_mismatch() {
        let a = Hyperweb::zero(fp(), 2);
        assert!(matches!(
            a.symplectic_quotient(1),
            Err(Error::RankMismatch {
                expected: 6,
                found: 0
            })
        ));
    }

    #[test]
    fn restrict_identity_is_identity() {
        let mut rng = Seed(2).rng();
        let a = Hyperweb::random(fp(), 3, &mut rng);
        let id = FpMatrix::identity(fp(), 3);
        assert_eq!(a.restrict(&id).unwrap(), a);
    }

    #[test]
    fn restrict_rejects_non_injective() {
        let a = Hyperweb::standard(fp(), 2);
        let tau = FpMatrix::zeros(fp(), 2, 1);
        assert_eq!(a.restrict(&tau), Err(Error::NonInjectiveTau));
    }

    #[test]
    fn restrict_composes() {
        let f = fp();
        let mut rng = Seed(3).rng();
        let a = Hyperweb::random(f, 4, &mut rng);
        let tau1 = FpMatrix::random(f, 4, 3, &mut rng);
        let tau2 = FpMatrix::random(f, 3, 2, &mut rng);
        assert_eq!(
            a.restrict(&tau1.mul(&tau2)).unwrap(),
            a.restrict(&tau1).unwrap().restrict(&tau2).unwrap()
        );
    }

    #[test]
    fn restrict_rank_monotone() {
        let f = fp();
        let mut rng = Seed(4).rng();
        for _ in 0..10 {
            let a = Hyperweb::random(f, 3, &mut rng);
            let tau = FpMatrix::random(f, 3, 2, &mut rng);
            if tau.rank() < 2 {
                continue;
            }
            assert!(a.restrict(&tau).unwrap().matrix().rank() <= a.matrix().rank());
        }
    }

    #[test]
    fn gl_act_is_a_right_action() {
        let f = fp();
        let mut rng = Seed(5).rng();
        let a = Hyperweb::random(f, 3, &mut rng);
        let g = FpMatrix::random_invertible(f, 3, &mut rng);
        let h = FpMatrix::random_invertible(f, 3, &mut rng);
        assert_eq!(
            a.gl_act(&g.mul(&h)).unwrap(),
            a.gl_act(&g).unwrap().gl_act(&h).unwrap()
        );
        assert_eq!(a.gl_act(&FpMatrix::identity(f, 3)).unwrap(), a);
        assert_eq!(a.gl_act(&FpMatrix::identity(f, 3).neg()).unwrap(), a);
    }

    #[test]
    fn gl_act_preserves_rank() {
        let f = fp();
        let mut rng = Seed(6).rng();
        for _ in 0..10 {
            let a = Hyperweb::random(f, 3, &mut rng);
            let g = FpMatrix::random_invertible(f, 3, &mut rng);
            assert_eq!(a.gl_act(&g).unwrap().matrix().rank(), a.matrix().rank());
        }
    }

    #[test]
    fn gl_act_rejects_singular() {
        let a = Hyperweb::standard(fp(), 2);
        let g = FpMatrix::zeros(fp(), 2, 2);
        assert_eq!(a.gl_act(&g), Err(Error::SingularG));
    }

    #[test]
    fn block_roundtrip_coordinate_split() {
        let f = fp();
        let mut rng = Seed(7).rng();
        let a = Hyperweb::random(f, 5, &mut rng);
        let xi = Xi::coordinate(3, 2);
        let blocks = a.block_decompose(&xi).unwrap();
        let back = Hyperweb::assemble_blocks(&blocks.b, &blocks.c, &blocks.a3, &xi).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn block_roundtrip_random_basis() {
        let f = fp();
        let mut rng = Seed(8).rng();
        let a = Hyperweb::random(f, 5, &mut rng);
        let xi = Xi::random(f, 3, 2, &mut rng);
        let blocks = a.block_decompose(&xi).unwrap();
        let back = Hyperweb::assemble_blocks(&blocks.b, &blocks.c, &blocks.a3, &xi).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn zero_decomposes_to_zero_blocks() {
        let a = Hyperweb::zero(fp(), 4);
        let xi = Xi::coordinate(3, 1);
        let blocks = a.block_decompose(&xi).unwrap();
        assert!(blocks.b.is_zero());
        assert!(blocks.c.is_zero());
        assert!(blocks.a3.is_zero());
    }

    #[test]
    fn restriction_to_upper_block_recovers_b() {
        let f = fp();
        let mut rng = Seed(9).rng();
        let a = Hyperweb::random(f, 5, &mut rng);
        let xi = Xi::random(f, 3, 2, &mut rng);
        let blocks = a.block_decompose(&xi).unwrap();
        let restricted = a.restrict(&xi.inclusion_upper(f)).unwrap();
        assert_eq!(restricted, blocks.b);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn gl_action_composes(seed in 0u64..10_000, n in 1usize..4) {
                let f = fp();
                let mut rng = Seed(seed).rng();
                let a = Hyperweb::random(f, n, &mut rng);
                let g = FpMatrix::random_invertible(f, n, &mut rng);
                let h = FpMatrix::random_invertible(f, n, &mut rng);
                prop_assert_eq!(
                    a.gl_act(&g.mul(&h)).unwrap(),
                    a.gl_act(&g).unwrap().gl_act(&h).unwrap()
                );
            }

            #[test]
            fn restriction_composes(seed in 0u64..10_000, n in 2usize..5) {
                let f = fp();
                let mut rng = Seed(seed).rng();
                let a = Hyperweb::random(f, n, &mut rng);
                let tau1 = FpMatrix::random(f, n, n - 1, &mut rng);
                let tau2 = FpMatrix::random(f, n - 1, 1, &mut rng);
                prop_assume!(tau1.rank() == n - 1 && tau2.rank() == 1);
                prop_assert_eq!(
                    a.restrict(&tau1.mul(&tau2)).unwrap(),
                    a.restrict(&tau1).unwrap().restrict(&tau2).unwrap()
                );
            }

            #[test]
            fn block_roundtrip(seed in 0u64..10_000, upper in 1usize..4, lower in 0usize..3) {
                let f = fp();
                let mut rng = Seed(seed).rng();
                let a = Hyperweb::random(f, upper + lower, &mut rng);
                let xi = Xi::random(f, upper, lower, &mut rng);
                let blocks = a.block_decompose(&xi).unwrap();
                let back = Hyperweb::assemble_blocks(&blocks.b, &blocks.c, &blocks.a3, &xi).unwrap();
                prop_assert_eq!(back, a);
            }
        }
    }

    #[test]
    fn quotient_factorization_on_rank_deficient_web() {
        // Direct sum of an invertible charge-2 web and a zero charge-1
        // summand: rank 8 = 2·3 + 2·1.
        let f = fp();
        let mut rng = Seed(10).rng();
        let b = loop {
            let c = Hyperweb::random(f, 2, &mut rng);
            if c.is_invertible() {
                break c;
            }
        };
        let xi = Xi::coordinate(2, 1);
        let a = Hyperweb::assemble_blocks(&b, &HomWeb::zero(f, 2, 1), &Hyperweb::zero(f, 1), &xi)
            .unwrap();
        let quot = a.symplectic_quotient(1).unwrap();
        assert_eq!(quot.w_dim, 8);
        assert!(quot.verify(&a));
    }
}
