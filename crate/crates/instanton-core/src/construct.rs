//! Explicit constructions of instanton hyperwebs.
//!
//! The central assembly takes a pair (B, C) with B an invertible hyperweb
//! on H_n and C a mixed block, and produces the charge-(2n−r) hyperweb with
//! blocks (B, C, −CᵀB⁻¹C). The composite CᵀB⁻¹C must itself land in the
//! hyperweb summand, vacuously true when n−r ≤ 1 and enforced exactly
//! otherwise. The Schur complement of the invertible B-block then vanishes,
//! so the assembled web has rank exactly 4n and kernel 4(n−r).
//!
//! On the dual side, pairs (D, C) with D an invertible element of
//! S²H_n⊗Λ²V decompose into block quintuples (D₁, φ, ψ, λ, μ) with a
//! closed four-term formula for CᵀDC and a scaling curve
//! t ↦ (D₁, t²φ, tψ, tλ, t²μ) preserving the constraint CᵀDC ∈ S_{n−r}.

use crate::error::{Error, Result};
use crate::field::{FieldOps, Fp};
use crate::hyperweb::{Hyperweb, Xi};
use crate::matrix::FpMatrix;
use crate::monad::{linear_form_rank_check, FiberCheckVerdict, FiberSide};
use crate::rng::Seed;
use crate::tensor::{HomWeb, SkewTensor};

const SAMPLE_BUDGET: u32 = 200;

/// A pair (B, C) with B ∈ S⁰_n and C ∈ Hom(H_{n−r}, H_n^∨)⊗Λ²V^∨
/// satisfying the summand condition on CᵀB⁻¹C.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BCPair {
    pub n: usize,
    pub r: usize,
    pub b: Hyperweb,
    pub c: HomWeb,
}

impl BCPair {
    pub fn new(b: Hyperweb, c: HomWeb, r: usize) -> Result<BCPair> {
        let n = b.charge();
        if r < 1 || r > n {
            return Err(Error::InvalidParameter(format!(
                "half-rank {r} not in 1..={n}"
            )));
        }
        if c.h_rows() != n || c.h_cols() != n - r {
            return Err(Error::ShapeMismatch(format!(
                "mixed block must be {n}×{}, got {}×{}",
                n - r,
                c.h_rows(),
                c.h_cols()
            )));
        }
        if !b.is_invertible() {
            return Err(Error::SingularB);
        }
        let pair = BCPair { n, r, b, c };
        pair.composite_block()?;
        Ok(pair)
    }

    /// −CᵀB⁻¹C as a hyperweb on H_{n−r}; errs with `ConditionIrViolated`
    /// if the composite leaves the summand.
    pub fn composite_block(&self) -> Result<Hyperweb> {
        let m = self.n - self.r;
        let c_mat = self.c.realize();
        let b_inv = self.b.matrix().invert()?;
        let composite = c_mat.transpose().mul(&b_inv).mul(&c_mat).neg();
        let t = SkewTensor::new(m, composite)?;
        Hyperweb::from_tensor(&t).map_err(|e| match e {
            Error::NotInSummand => Error::ConditionIrViolated,
            other => other,
        })
    }
}

/// Rejection-sample an invertible hyperweb on H_n.
pub fn sample_invertible(field: Fp, n: usize, seed: Seed) -> Result<Hyperweb> {
    let mut rng = seed.rng();
    for _ in 0..SAMPLE_BUDGET {
        let a = Hyperweb::random(field, n, &mut rng);
        if a.is_invertible() {
            return Ok(a);
        }
    }
    Err(Error::NotFound(format!(
        "no invertible hyperweb of charge {n} within {SAMPLE_BUDGET} draws"
    )))
}

/// Assemble the charge-(2n−r) hyperweb ξ̃⁻¹(B, C, −CᵀB⁻¹C).
pub fn assemble_from_bc(bc: &BCPair, xi: &Xi) -> Result<Hyperweb> {
    if xi.upper != bc.n || xi.lower != bc.n - bc.r {
        return Err(Error::ShapeMismatch(format!(
            "decomposition ({}, {}) does not match the pair ({}, {})",
            xi.upper,
            xi.lower,
            bc.n,
            bc.n - bc.r
        )));
    }
    let a3 = bc.composite_block()?;
    Hyperweb::assemble_blocks(&bc.b, &bc.c, &a3, xi)
}

/// Fiberwise verdicts for the two open conditions attached to (B, C).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubbundleChecks {
    pub rho: FiberCheckVerdict,
    pub tau: FiberCheckVerdict,
}

impl SubbundleChecks {
    pub fn pass(&self) -> bool {
        self.rho.pass() && self.tau.pass()
    }
}

/// Certify the subbundle conditions at random points.
///
/// τ is the stacked map (B | C) of linear forms, required to have full
/// rank 2n−r everywhere. ρ maps H_{n−r} into the cohomology bundle of B;
/// it is a subbundle inclusion iff the combined matrix
/// (a_B(x) | B⁻¹C(x)) keeps rank 2n−r, which is what we evaluate.
pub fn subbundle_checks(
    bc: &BCPair,
    trials: u32,
    ext_degree: usize,
    seed: Seed,
) -> Result<SubbundleChecks> {
    let f = bc.b.field();
    let n = bc.n;
    let m = bc.n - bc.r;
    let required = n + m;
    let b_mat = bc.b.matrix();
    let c_mat = bc.c.realize();

    let tau_coeff: Vec<FpMatrix> = (0..4)
        .map(|va| {
            FpMatrix::from_fn(f, 4 * n, n + m, |row, col| {
                if col < n {
                    b_mat.get(row, 4 * col + va)
                } else {
                    c_mat.get(row, 4 * (col - n) + va)
                }
            })
        })
        .collect();
    let tau = linear_form_rank_check(
        &tau_coeff,
        required,
        FiberSide::TauSubbundle,
        trials,
        ext_degree,
        seed.child(0),
    )?;

    let binv_c = b_mat.invert()?.mul(&c_mat);
    let rho_coeff: Vec<FpMatrix> = (0..4)
        .map(|va| {
            FpMatrix::from_fn(f, 4 * n, n + m, |row, col| {
                if col < n {
                    u64::from(row == 4 * col + va)
                } else {
                    binv_c.get(row, 4 * (col - n) + va)
                }
            })
        })
        .collect();
    let rho = linear_form_rank_check(
        &rho_coeff,
        required,
        FiberSide::RhoSubbundle,
        trials,
        ext_degree,
        seed.child(1),
    )?;

    Ok(SubbundleChecks { rho, tau })
}

/// Sampling strategies for (B, C) pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleStrategy {
    /// Random B, random C. Valid only for n−r ≤ 1, where the summand
    /// condition on CᵀB⁻¹C is vacuous.
    Vacuous,
    /// Random B; the columns of C are chosen one at a time inside the
    /// kernel of the summand conditions against the earlier columns, which
    /// are linear once those are fixed. The summand condition is exact for
    /// every n−r ≥ 2, but whether the stratum also meets the fiberwise open
    /// conditions depends on (n, r); the verdicts are reported alongside
    /// the sample (observed so far: pass iff n ≤ 2r+1).
    Ansatz,
}

/// Draw a mixed block C with CᵀMC ∈ S_{n−r} exactly, for an invertible
/// skew 4n×4n middle matrix M.
///
/// The constraint says every off-diagonal 4×4 block of CᵀMC is skew. The
/// block between columns k < l is γ̂ₖᵀ·M·γ̂ₗ, bilinear in the two columns,
/// so fixing γ₀, …, γ_{k−1} leaves 10·k linear conditions on γₖ.
fn sample_sigma_with_constraint(
    field: Fp,
    n: usize,
    m: usize,
    mid: &FpMatrix,
    seed: Seed,
) -> Result<HomWeb> {
    let coeff_dim = 6 * n;
    let mut chosen: Vec<HomWeb> = Vec::new(); // single-column blocks
    let mut realized: Vec<FpMatrix> = Vec::new();
    for k in 0..m {
        let mut rng = seed.child(k as u64).rng();
        let column = if realized.is_empty() {
            HomWeb::random(field, n, 1, &mut rng)
        } else {
            // one row per symmetric entry (a ≤ b) per earlier column
            let mut conditions = FpMatrix::zeros(field, 10 * realized.len(), coeff_dim);
            for basis in 0..coeff_dim {
                let mut unit = HomWeb::zero(field, n, 1);
                unit.set(basis / 6, 0, basis % 6, 1);
                let gamma_hat = unit.realize();
                for (ci, prev) in realized.iter().enumerate() {
                    let block = prev.transpose().mul(mid).mul(&gamma_hat);
                    let mut row = 10 * ci;
                    for a in 0..4 {
                        for b in a..4 {
                            let sym = field.add(block.get(a, b), block.get(b, a));
                            conditions.set(row, basis, sym);
                            row += 1;
                        }
                    }
                }
            }
            let kernel = conditions.kernel_basis();
            if kernel.cols() == 0 {
                return Err(Error::NotFound(format!(
                    "summand conditions on column {k} admit only the zero solution \
                     for (charge, tail) = ({n}, {m})"
                )));
            }
            let mut column = HomWeb::zero(field, n, 1);
            loop {
                let weights = FpMatrix::random(field, kernel.cols(), 1, &mut rng);
                let coeffs = kernel.mul(&weights);
                if (0..coeff_dim).any(|i| coeffs.get(i, 0) != 0) {
                    for i in 0..coeff_dim {
                        column.set(i / 6, 0, i % 6, coeffs.get(i, 0));
                    }
                    break;
                }
            }
            column
        };
        realized.push(column.realize());
        chosen.push(column);
    }
    let mut c = HomWeb::zero(field, n, m);
    for (k, col) in chosen.iter().enumerate() {
        for i in 0..n {
            for vp in 0..6 {
                c.set(i, k, vp, col.get(i, 0, vp));
            }
        }
    }
    Ok(c)
}

/// A sampled pair together with the verdicts of its open conditions.
#[derive(Debug, Clone)]
pub struct SampledBC {
    pub pair: BCPair,
    pub checks: SubbundleChecks,
}

/// Sample a (B, C) pair by the given strategy. The summand condition is
/// verified exactly in both strategies; the subbundle verdicts are
/// reported, not enforced.
pub fn sample_bc(
    field: Fp,
    n: usize,
    r: usize,
    strategy: SampleStrategy,
    seed: Seed,
    trials: u32,
    ext_degree: usize,
) -> Result<SampledBC> {
    if r < 1 || r > n {
        return Err(Error::InvalidParameter(format!(
            "half-rank {r} not in 1..={n}"
        )));
    }
    let m = n - r;
    let pair = match strategy {
        SampleStrategy::Vacuous => {
            if m > 1 {
                return Err(Error::InvalidParameter(format!(
                    "vacuous strategy needs n−r ≤ 1, got {m}"
                )));
            }
            let b = sample_invertible(field, n, seed.child(0))?;
            let mut rng = seed.child(1).rng();
            let c = HomWeb::random(field, n, m, &mut rng);
            BCPair::new(b, c, r)?
        }
        SampleStrategy::Ansatz => {
            if m < 2 {
                return Err(Error::InvalidParameter(format!(
                    "ansatz strategy needs n−r ≥ 2, got {m}"
                )));
            }
            let b = sample_invertible(field, n, seed.child(0))?;
            let b_inv = b.matrix().invert()?;
            let c = sample_sigma_with_constraint(field, n, m, &b_inv, seed.child(1))?;
            BCPair::new(b, c, r)?
        }
    };
    let checks = subbundle_checks(&pair, trials, ext_degree, seed.child(1_000_003))?;
    Ok(SampledBC { pair, checks })
}

/// The block quintuple (D₁, φ, ψ, λ, μ) of a dual-side pair (D, C) with
/// respect to a split H_n ≅ H_{n−r} ⊕ H_r:
/// C = [φ; ψ] stacked, D = [[D₁, λ], [−λᵀ, μ]].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockQuintuple {
    /// m = n − r
    pub m: usize,
    pub r: usize,
    pub d1: Hyperweb,
    pub phi: HomWeb,
    pub psi: HomWeb,
    pub lambda: HomWeb,
    pub mu: Hyperweb,
}

impl BlockQuintuple {
    pub fn new(
        d1: Hyperweb,
        phi: HomWeb,
        psi: HomWeb,
        lambda: HomWeb,
        mu: Hyperweb,
    ) -> Result<BlockQuintuple> {
        let m = d1.charge();
        let r = mu.charge();
        let shapes_ok = phi.h_rows() == m
            && phi.h_cols() == m
            && psi.h_rows() == r
            && psi.h_cols() == m
            && lambda.h_rows() == m
            && lambda.h_cols() == r;
        if !shapes_ok {
            return Err(Error::ShapeMismatch(
                "quintuple blocks do not fit one split".into(),
            ));
        }
        Ok(BlockQuintuple {
            m,
            r,
            d1,
            phi,
            psi,
            lambda,
            mu,
        })
    }

    pub fn random<R: rand::RngExt>(field: Fp, n: usize, r: usize, rng: &mut R) -> BlockQuintuple {
        let m = n - r;
        BlockQuintuple {
            m,
            r,
            d1: Hyperweb::random(field, m, rng),
            phi: HomWeb::random(field, m, m, rng),
            psi: HomWeb::random(field, r, m, rng),
            lambda: HomWeb::random(field, m, r, rng),
            mu: Hyperweb::random(field, r, rng),
        }
    }

    pub fn field(&self) -> Fp {
        self.d1.field()
    }

    /// C = [φ; ψ] as a single mixed block of shape (m + r) × m.
    pub fn stack_c(&self) -> HomWeb {
        let f = self.field();
        let n = self.m + self.r;
        let mut c = HomWeb::zero(f, n, self.m);
        for k in 0..self.m {
            for vp in 0..6 {
                for i in 0..self.m {
                    c.set(i, k, vp, self.phi.get(i, k, vp));
                }
                for i in 0..self.r {
                    c.set(self.m + i, k, vp, self.psi.get(i, k, vp));
                }
            }
        }
        c
    }

    /// D = [[D₁, λ], [−λᵀ, μ]] as a 4n×4n matrix.
    pub fn realize_d(&self) -> FpMatrix {
        let f = self.field();
        let n = self.m + self.r;
        let mut d = FpMatrix::zeros(f, 4 * n, 4 * n);
        d.paste(0, 0, self.d1.matrix());
        let lam = self.lambda.realize();
        d.paste(0, 4 * self.m, &lam);
        d.paste(4 * self.m, 0, &lam.transpose().neg());
        d.paste(4 * self.m, 4 * self.m, self.mu.matrix());
        d
    }

    /// The four-term block formula
    /// φᵀD₁φ + φᵀλψ − ψᵀλᵀφ + ψᵀμψ for CᵀDC.
    pub fn cdc_block(&self) -> FpMatrix {
        let phi = self.phi.realize();
        let psi = self.psi.realize();
        let lam = self.lambda.realize();
        let term1 = phi.transpose().mul(self.d1.matrix()).mul(&phi);
        let term2 = phi.transpose().mul(&lam).mul(&psi);
        let term3 = psi.transpose().mul(&lam.transpose()).mul(&phi);
        let term4 = psi.transpose().mul(self.mu.matrix()).mul(&psi);
        term1.add(&term2).sub(&term3).add(&term4)
    }

    /// CᵀDC computed directly from the assembled block matrices, the
    /// oracle the block formula is checked against.
    pub fn cdc_direct(&self) -> FpMatrix {
        let c = self.stack_c().realize();
        c.transpose().mul(&self.realize_d()).mul(&c)
    }

    /// Does CᵀDC lie in the hyperweb summand S_{n−r}?
    pub fn satisfies_constraint(&self) -> bool {
        let t = SkewTensor::new(self.m, self.cdc_direct()).expect("CᵀDC is skew");
        let (_, l) = t.project_canonical();
        l.is_zero()
    }

    /// The scaling curve t ↦ (D₁, t²φ, tψ, tλ, t²μ). Every term of the
    /// block formula picks up the same power of t, so the summand
    /// constraint is preserved and D₁ stays fixed; t = 0 wipes out
    /// everything but D₁.
    pub fn scale_curve(&self, t: u64) -> BlockQuintuple {
        let f = self.field();
        let t2 = f.mul(t, t);
        BlockQuintuple {
            m: self.m,
            r: self.r,
            d1: self.d1.clone(),
            phi: self.phi.scale(t2),
            psi: self.psi.scale(t),
            lambda: self.lambda.scale(t),
            mu: self.mu.scale(t2),
        }
    }
}

/// Sample a dual-side pair (D, C) with CᵀDC ∈ S_{n−r} exactly and return
/// its block quintuple for the coordinate split H_n ≅ H_{n−r} ⊕ H_r.
/// All five blocks are generically nonzero.
pub fn sample_satisfying_quintuple(
    field: Fp,
    n: usize,
    r: usize,
    seed: Seed,
) -> Result<BlockQuintuple> {
    if r < 1 || r >= n {
        return Err(Error::InvalidParameter(format!(
            "quintuple split needs 1 ≤ r < n, got ({n}, {r})"
        )));
    }
    let m = n - r;
    let d = sample_invertible(field, n, seed.child(0))?;
    let c = sample_sigma_with_constraint(field, n, m, d.matrix(), seed.child(1))?;
    let blocks = d.block_decompose(&Xi::coordinate(m, r))?;
    let (phi, psi) = c.split_rows(m);
    let q = BlockQuintuple::new(blocks.b, phi, psi, blocks.c, blocks.a3)?;
    debug_assert!(q.satisfies_constraint());
    Ok(q)
}

/// Build a restriction A_τ of a charge-(2n−1) hyperweb along a random
/// τ: H_{2n−r} ↪ H_{2n−1} whose image contains i_ξ(H_n). Returns the
/// restricted hyperweb along with the τ matrix used.
pub fn tau_restrict_construct(
    a: &Hyperweb,
    xi: &Xi,
    r_target: usize,
    seed: Seed,
) -> Result<(Hyperweb, FpMatrix)> {
    let f = a.field();
    let n = xi.upper;
    if xi.total() != a.charge() || xi.lower + 1 != n {
        return Err(Error::ShapeMismatch(format!(
            "source must have charge 2n−1 split as (n, n−1); got charge {} split ({}, {})",
            a.charge(),
            xi.upper,
            xi.lower
        )));
    }
    if r_target < 2 || r_target > n {
        return Err(Error::InvalidParameter(format!(
            "target half-rank {r_target} not in 2..={n}"
        )));
    }
    let blocks = a.block_decompose(xi)?;
    if !blocks.b.is_invertible() {
        return Err(Error::SingularB);
    }
    let target_charge = 2 * n - r_target;
    let incl = xi.inclusion_upper(f);
    for attempt in 0..SAMPLE_BUDGET {
        let mut rng = seed.child(attempt as u64).rng();
        let extra = FpMatrix::random(f, a.charge(), target_charge - n, &mut rng);
        let tau = incl.hstack(&extra);
        if tau.rank() != target_charge {
            continue;
        }
        return Ok((a.restrict(&tau)?, tau));
    }
    Err(Error::NotFound(
        "no full-rank complement for the restriction map".into(),
    ))
}

/// Statistics of the nondegenerate-principal-block experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NondegStats {
    pub trials: u32,
    pub degenerate: u32,
}

/// Is the upper-left 4(n−r) block of `d` singular in the coordinate split?
pub fn principal_block_degenerate(d: &Hyperweb, r: usize) -> Result<bool> {
    let n = d.charge();
    if r < 1 || r >= n {
        return Err(Error::InvalidParameter(format!("split needs 1 ≤ r < {n}")));
    }
    let xi = Xi::coordinate(n - r, r);
    let blocks = d.block_decompose(&xi)?;
    Ok(!blocks.b.is_invertible())
}

/// For `trials` random decompositions H_n ≅ H_{n−r} ⊕ H_r, count how often
/// the principal block D₁ of the invertible element `d` degenerates.
pub fn nondegenerate_block_trial(
    d: &Hyperweb,
    r: usize,
    trials: u32,
    seed: Seed,
) -> Result<NondegStats> {
    if !d.is_invertible() {
        return Err(Error::SingularD);
    }
    let f = d.field();
    let n = d.charge();
    let mut degenerate = 0;
    for trial in 0..trials {
        let mut rng = seed.child(trial as u64).rng();
        let h = FpMatrix::random_invertible(f, n, &mut rng);
        let moved = d.gl_act(&h)?;
        if principal_block_degenerate(&moved, r)? {
            degenerate += 1;
        }
    }
    Ok(NondegStats { trials, degenerate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::membership;
    use crate::tensor::SpaceDims;

    fn fp() -> Fp {
        Fp::default_prime()
    }

    #[test]
    fn sample_invertible_is_deterministic() {
        let a = sample_invertible(fp(), 3, Seed(7)).unwrap();
        let b = sample_invertible(fp(), 3, Seed(7)).unwrap();
        assert_eq!(a, b);
        assert!(a.is_invertible());
    }

    #[test]
    fn vacuity_of_the_summand_condition() {
        // For n−r ≤ 1 the complement Λ²H^∨⊗S²V^∨ is zero-dimensional, so
        // any C passes.
        assert_eq!(SpaceDims::new(1).complement(), 0);
        let mut rng = Seed(1).rng();
        let b = sample_invertible(fp(), 3, Seed(2)).unwrap();
        let c = HomWeb::random(fp(), 3, 1, &mut rng);
        assert!(BCPair::new(b, c, 2).is_ok());
    }

    #[test]
    fn assemble_roundtrip_and_rank_law() {
        let f = fp();
        for (n, r) in [(2usize, 1usize), (3, 2), (4, 3)] {
            let pair = sample_bc(f, n, r, SampleStrategy::Vacuous, Seed(10 + n as u64), 20, 1)
                .unwrap()
                .pair;
            let xi = Xi::coordinate(n, n - r);
            let a = assemble_from_bc(&pair, &xi).unwrap();
            assert_eq!(a.charge(), 2 * n - r);
            // rank law, brute force
            let (rank, kernel) = a.rank_and_kernel();
            assert_eq!(rank, 4 * n);
            assert_eq!(kernel.cols(), 4 * (n - r));
            // roundtrip
            let blocks = a.block_decompose(&xi).unwrap();
            assert_eq!(blocks.b, pair.b);
            assert_eq!(blocks.c, pair.c);
            assert_eq!(blocks.a3, pair.composite_block().unwrap());
        }
    }

    #[test]
    fn assemble_with_random_basis_roundtrips() {
        let f = fp();
        let mut rng = Seed(77).rng();
        let pair = sample_bc(f, 3, 2, SampleStrategy::Vacuous, Seed(3), 20, 1)
            .unwrap()
            .pair;
        let xi = Xi::random(f, 3, 1, &mut rng);
        let a = assemble_from_bc(&pair, &xi).unwrap();
        let blocks = a.block_decompose(&xi).unwrap();
        assert_eq!(blocks.b, pair.b);
        assert_eq!(blocks.c, pair.c);
        assert_eq!(a.matrix().rank(), 12);
    }

    #[test]
    fn r_equals_n_assembles_to_b_itself() {
        let f = fp();
        let pair = sample_bc(f, 3, 3, SampleStrategy::Vacuous, Seed(4), 20, 1)
            .unwrap()
            .pair;
        let xi = Xi::coordinate(3, 0);
        let a = assemble_from_bc(&pair, &xi).unwrap();
        assert_eq!(a, pair.b);
    }

    #[test]
    fn schur_oracle_for_assembled_rank() {
        // rank A = rank B + rank(A₃ + CᵀB⁻¹C): the assembly zeroes the
        // Schur complement, a corrupted A₃ restores it.
        let f = fp();
        let pair = sample_bc(f, 3, 2, SampleStrategy::Vacuous, Seed(5), 20, 1)
            .unwrap()
            .pair;
        let xi = Xi::coordinate(3, 1);
        let a = assemble_from_bc(&pair, &xi).unwrap();
        assert_eq!(a.matrix().rank(), 12);

        let mut rng = Seed(6).rng();
        let noise = Hyperweb::random(f, 1, &mut rng);
        let corrupted = Hyperweb::assemble_blocks(&pair.b, &pair.c, &noise, &xi).unwrap();
        let schur_rank = noise
            .matrix()
            .sub(pair.composite_block().unwrap().matrix())
            .rank();
        assert_eq!(corrupted.matrix().rank(), 12 + schur_rank);
    }

    #[test]
    fn ansatz_strategy_satisfies_summand_condition() {
        let f = fp();
        let sampled = sample_bc(f, 4, 2, SampleStrategy::Ansatz, Seed(8), 30, 1).unwrap();
        let pair = &sampled.pair;
        assert_eq!(pair.n, 4);
        // the composite is exactly inside S_{n−r} (BCPair verified it) and
        // generically nonzero
        let composite = pair.composite_block().unwrap();
        assert!(!composite.is_zero());
        let xi = Xi::coordinate(4, 2);
        let a = assemble_from_bc(pair, &xi).unwrap();
        assert_eq!(a.charge(), 6);
        assert_eq!(a.matrix().rank(), 16);
    }

    #[test]
    fn ansatz_reaches_larger_tails() {
        // The stacked column conditions turn out to be dependent, so even
        // n−r = 4 leaves room. Each output is verified exactly.
        let f = fp();
        for (n, r) in [(3usize, 1usize), (5, 2), (5, 1)] {
            let sampled = sample_bc(f, n, r, SampleStrategy::Ansatz, Seed(9), 10, 1).unwrap();
            let xi = Xi::coordinate(n, n - r);
            let a = assemble_from_bc(&sampled.pair, &xi).unwrap();
            assert_eq!(a.matrix().rank(), 4 * n, "(n, r) = ({n}, {r})");
        }
    }

    #[test]
    fn ansatz_rejects_vacuous_tail() {
        let out = sample_bc(fp(), 3, 2, SampleStrategy::Ansatz, Seed(9), 10, 1);
        assert!(matches!(out, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn cdc_formula_matches_direct_product() {
        let f = fp();
        let mut rng = Seed(11).rng();
        for _ in 0..100 {
            let q = BlockQuintuple::random(f, 5, 2, &mut rng);
            assert_eq!(q.cdc_block(), q.cdc_direct());
        }
    }

    #[test]
    fn cdc_degenerate_cases() {
        let f = fp();
        let mut rng = Seed(12).rng();
        let q = BlockQuintuple::random(f, 4, 2, &mut rng);
        // φ = ψ = 0 → 0
        let zeroed = BlockQuintuple::new(
            q.d1.clone(),
            HomWeb::zero(f, 2, 2),
            HomWeb::zero(f, 2, 2),
            q.lambda.clone(),
            q.mu.clone(),
        )
        .unwrap();
        assert!(zeroed.cdc_block().is_zero());
        // ψ = 0, λ = μ = 0 → φᵀD₁φ
        let single = BlockQuintuple::new(
            q.d1.clone(),
            q.phi.clone(),
            HomWeb::zero(f, 2, 2),
            HomWeb::zero(f, 2, 2),
            Hyperweb::zero(f, 2),
        )
        .unwrap();
        let phi = q.phi.realize();
        assert_eq!(
            single.cdc_block(),
            phi.transpose().mul(q.d1.matrix()).mul(&phi)
        );
    }

    #[test]
    fn scaling_curve_fixes_endpoints_and_constraint() {
        let f = fp();
        let q = sample_satisfying_quintuple(f, 5, 2, Seed(13)).unwrap();
        assert!(!q.phi.is_zero() && !q.psi.is_zero() && !q.lambda.is_zero());
        assert!(q.satisfies_constraint());
        assert!(!q.cdc_direct().is_zero());

        assert_eq!(q.scale_curve(1), q);
        let at_zero = q.scale_curve(0);
        assert_eq!(at_zero.d1, q.d1);
        assert!(at_zero.phi.is_zero());
        assert!(at_zero.psi.is_zero());
        assert!(at_zero.lambda.is_zero());
        assert!(at_zero.mu.matrix().is_zero());

        let mut rng = Seed(15).rng();
        for _ in 0..10 {
            let t = f.sample(&mut rng);
            let scaled = q.scale_curve(t);
            assert!(scaled.satisfies_constraint());
            assert_eq!(scaled.d1, q.d1);
        }
    }

    #[test]
    fn tau_restriction_produces_lower_charge_instanton() {
        let f = fp();
        // source: charge-5 web with half-rank 1 from the ansatz at (3, 1)
        let sampled = sample_bc(f, 3, 1, SampleStrategy::Ansatz, Seed(16), 10, 1).unwrap();
        let xi = Xi::coordinate(3, 2);
        let a = assemble_from_bc(&sampled.pair, &xi).unwrap();
        assert_eq!(a.charge(), 5);
        assert_eq!(a.matrix().rank(), 12);

        let (restricted, tau) = tau_restrict_construct(&a, &xi, 2, Seed(17)).unwrap();
        assert_eq!(restricted.charge(), 4);
        assert_eq!(tau.cols(), 4);
        let report = membership::check_membership(&restricted, 2, 100, 1, Seed(18));
        assert!(report.pass(), "{report:?}");
    }

    #[test]
    fn tau_restriction_degenerate_edge_recovers_b() {
        let f = fp();
        let sampled = sample_bc(f, 3, 1, SampleStrategy::Ansatz, Seed(19), 10, 1).unwrap();
        let xi = Xi::coordinate(3, 2);
        let a = assemble_from_bc(&sampled.pair, &xi).unwrap();
        let (restricted, _) = tau_restrict_construct(&a, &xi, 3, Seed(20)).unwrap();
        assert_eq!(restricted, sampled.pair.b);
    }

    #[test]
    fn charge_three_sources_only_reach_the_degenerate_edge() {
        // n = 2 allows r_target = 2 = n only, which returns the B block;
        // anything lower is out of range.
        let f = fp();
        let pair = sample_bc(f, 2, 1, SampleStrategy::Vacuous, Seed(24), 10, 1)
            .unwrap()
            .pair;
        let xi = Xi::coordinate(2, 1);
        let a = assemble_from_bc(&pair, &xi).unwrap();
        let (restricted, _) = tau_restrict_construct(&a, &xi, 2, Seed(25)).unwrap();
        assert_eq!(restricted, pair.b);
        assert!(matches!(
            tau_restrict_construct(&a, &xi, 1, Seed(26)),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn nondegenerate_block_statistics() {
        let f = fp();
        let d = sample_invertible(f, 2, Seed(21)).unwrap();
        let stats = nondegenerate_block_trial(&d, 1, 200, Seed(22)).unwrap();
        assert_eq!(stats.degenerate, 0);
    }

    #[test]
    fn engineered_degenerate_principal_block() {
        let f = fp();
        // D₁ singular (zero first H-row), λ generic, μ invertible: D stays
        // invertible while the aligned decomposition sees a singular D₁.
        let mut rng = Seed(23).rng();
        for _ in 0..SAMPLE_BUDGET {
            let mut d1 = Hyperweb::random(f, 2, &mut rng);
            let mut coeffs = d1.coeffs().clone();
            for j in 0..2 {
                for vp in 0..6 {
                    coeffs.set(0, j, vp, 0);
                }
            }
            d1 = Hyperweb::from_coeffs(coeffs);
            assert!(!d1.is_invertible());
            let lambda = HomWeb::random(f, 2, 2, &mut rng);
            let mu = Hyperweb::random(f, 2, &mut rng);
            let q =
                BlockQuintuple::new(d1, HomWeb::zero(f, 2, 2), HomWeb::zero(f, 2, 2), lambda, mu)
                    .unwrap();
            let d_mat = q.realize_d();
            if !d_mat.is_invertible() {
                continue;
            }
            let d = Hyperweb::from_tensor(&SkewTensor::new(4, d_mat).unwrap()).unwrap();
            assert!(principal_block_degenerate(&d, 2).unwrap());
            return;
        }
        panic!("no invertible D with singular principal block found");
    }

    #[test]
    fn nondeg_rejects_singular_d() {
        let d = Hyperweb::zero(fp(), 2);
        assert!(matches!(
            nondegenerate_block_trial(&d, 1, 10, Seed(1)),
            Err(Error::SingularD)
        ));
    }

    #[test]
    fn rho_and_tau_verdicts_agree() {
        // The combined (a_B | B⁻¹C) matrix is B̂⁻¹ times the stacked (B | C)
        // matrix at every point, so the two subbundle conditions hold or
        // fail together.
        let f = fp();
        for k in 0..5u64 {
            let sampled = sample_bc(f, 3, 2, SampleStrategy::Vacuous, Seed(30 + k), 60, 1).unwrap();
            assert_eq!(sampled.checks.rho.pass(), sampled.checks.tau.pass());
        }
        // degenerate pair: C = 0 has zero columns, so both fail immediately
        let b = sample_invertible(f, 3, Seed(36)).unwrap();
        let pair = BCPair::new(b, HomWeb::zero(f, 3, 1), 2).unwrap();
        let checks = subbundle_checks(&pair, 5, 1, Seed(37)).unwrap();
        assert!(!checks.rho.pass());
        assert!(!checks.tau.pass());
        assert_eq!(checks.rho.witness.unwrap().trial_index, 0);
    }
}
