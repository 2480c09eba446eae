//! First-order tangent computations at points of the rank stratum and the
//! closed-form dimension counts they are measured against.
//!
//! At a hyperweb A of exact rank 2N+2r the tangent space of the
//! determinantal stratum {rank ≤ 2N+2r} consists of the directions Ȧ with
//! κᵀ·Ȧ·κ = 0, κ a kernel basis. The codimension is therefore at most the
//! number of independent rank equations C(2N−2r, 2), which yields the
//! dimension lower bound the measured value is asserted against.

use crate::error::{Error, Result};
use crate::hyperweb::Hyperweb;
use crate::matrix::FpMatrix;
use crate::tensor::{hpair_count, HyperwebCoeffs, SpaceDims};

/// Dimension formulas at (N, r), optionally with a measured tangent
/// dimension at a concrete point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimensionReport {
    pub charge: usize,
    pub half_rank: usize,
    /// dim S_N = 3N(N+1)
    pub dim_s: usize,
    /// number of rank equations C(2N−2r, 2)
    pub eq_count: usize,
    /// expected dim MI_{N,r} = N² + 4N(r+1) − r(2r+1)
    pub expected_mi: i64,
    /// expected dim I_{N,r} = 4N(r+1) − r(2r+1)
    pub expected_i: i64,
    pub measured_tangent: Option<usize>,
}

/// Evaluate the dimension formulas for charge N and half-rank r.
pub fn expected_dims(charge: usize, r: usize) -> Result<DimensionReport> {
    if r < 1 || charge < r {
        return Err(Error::InvalidParameter(format!(
            "need 1 ≤ r ≤ charge, got r = {r}, charge = {charge}"
        )));
    }
    let n = charge as i64;
    let r_i = r as i64;
    let dim_s = SpaceDims::new(charge).s();
    let k = 2 * n - 2 * r_i;
    let eq_count = (k * (k - 1) / 2) as usize;
    let expected_i = 4 * n * (r_i + 1) - r_i * (2 * r_i + 1);
    let expected_mi = n * n + expected_i;
    debug_assert_eq!(expected_mi, dim_s as i64 - eq_count as i64);
    Ok(DimensionReport {
        charge,
        half_rank: r,
        dim_s,
        eq_count,
        expected_mi,
        expected_i,
        measured_tangent: None,
    })
}

/// Measure the tangent dimension of the rank stratum at A and attach it to
/// the formula report. Requires rank A = 2N+2r exactly.
pub fn tangent_dimension(a: &Hyperweb, r: usize) -> Result<DimensionReport> {
    let n = a.charge();
    let f = a.field();
    let expected_rank = 2 * n + 2 * r;
    let (rank, kernel) = a.rank_and_kernel();
    if rank != expected_rank {
        return Err(Error::RankMismatch {
            expected: expected_rank,
            found: rank,
        });
    }
    let mut report = expected_dims(n, r)?;
    let k = kernel.cols();
    let dim_s = report.dim_s;

    // The linear map Ȧ ↦ κᵀ·Ȧ·κ into Λ²(ker A)^∨, one column per basis
    // coefficient of S_N, one row per kernel pair (s < t).
    let rows = k * (k.max(1) - 1) / 2;
    let mut equations = FpMatrix::zeros(f, rows, dim_s);
    for (col, (hp, vp)) in basis_indices(n).enumerate() {
        let mut coeffs = HyperwebCoeffs::zero(f, n);
        let (i, j) = hp;
        coeffs.set(i, j, vp, 1);
        let basis_web = Hyperweb::from_coeffs(coeffs);
        let pairing = kernel.transpose().mul(basis_web.matrix()).mul(&kernel);
        let mut row = 0;
        for s in 0..k {
            for t in s + 1..k {
                equations.set(row, col, pairing.get(s, t));
                row += 1;
            }
        }
    }
    let measured = dim_s - equations.rank();
    assert!(
        measured as i64 >= report.expected_mi,
        "tangent dimension must respect the lower bound"
    );
    report.measured_tangent = Some(measured);
    Ok(report)
}

fn basis_indices(n: usize) -> impl Iterator<Item = ((usize, usize), usize)> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    debug_assert_eq!(pairs.len(), hpair_count(n));
    pairs
        .into_iter()
        .flat_map(|hp| (0..6).map(move |vp| (hp, vp)))
}
