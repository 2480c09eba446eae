//! End-to-end pipelines at charges above the acceptance sizes.

use instanton_core::construct::{
    assemble_from_bc, sample_bc, tau_restrict_construct, SampleStrategy,
};
use instanton_core::hyperweb::Xi;
use instanton_core::matrix::FpMatrix;
use instanton_core::membership::{check_membership, property_star};
use instanton_core::monad::{
    build_monad, cohomology_table, h0_global, h1_tensor_omega, quotient_diagram_check,
};
use instanton_core::tangent::tangent_dimension;
use instanton_core::{Fp, Seed};

#[test]
fn charge_eight_ansatz_instanton() {
    let f = Fp::default_prime();
    let sampled = sample_bc(f, 5, 2, SampleStrategy::Ansatz, Seed(0xF1E1D), 50, 1).unwrap();
    assert!(sampled.checks.pass(), "open conditions at (5, 2)");
    let xi = Xi::coordinate(5, 3);
    let a = assemble_from_bc(&sampled.pair, &xi).unwrap();
    assert_eq!(a.charge(), 8);

    let report = check_membership(&a, 2, 150, 1, Seed(1));
    assert!(report.pass(), "{report:?}");

    let monad = build_monad(&a, 2).unwrap();
    assert_eq!(monad.w_dim(), 20);
    assert_eq!(h0_global(&monad), 0);
    assert_eq!(h1_tensor_omega(&monad).unwrap(), 20);
    let table = cohomology_table(&monad, -4, 1).unwrap();
    assert_eq!(table.h(1, -1), 8);
    assert_eq!(table.h(1, 0), 12); // 2N − 2r
    assert_eq!(table.row(-2), [0, 0, 0, 0]);
    assert!(table.euler_consistent());

    let diagram = quotient_diagram_check(&a, &xi, 2).unwrap();
    assert!(diagram.pass());

    let tangent = tangent_dimension(&a, 2).unwrap();
    assert!(tangent.measured_tangent.unwrap() as i64 >= tangent.expected_mi);

    let star = property_star(&a, 5, 50, Seed(2)).unwrap();
    assert!(star.found);
}

#[test]
fn restriction_chain_from_charge_five() {
    // charge-5 half-rank-1 source, restricted to a charge-4 half-rank-2
    // instanton, then moved along the group action: every verdict and
    // every exact identity must survive the chain.
    let f = Fp::default_prime();
    let sampled = sample_bc(f, 3, 1, SampleStrategy::Ansatz, Seed(0xC4A1), 50, 1).unwrap();
    assert!(sampled.checks.pass(), "open conditions at (3, 1)");
    let xi = Xi::coordinate(3, 2);
    let source = assemble_from_bc(&sampled.pair, &xi).unwrap();
    assert_eq!(source.charge(), 5);
    let report = check_membership(&source, 1, 150, 1, Seed(3));
    assert!(report.pass(), "source: {report:?}");

    let (restricted, tau) = tau_restrict_construct(&source, &xi, 2, Seed(4)).unwrap();
    assert_eq!(restricted.charge(), 4);
    assert_eq!(tau.rank(), 4);
    let report = check_membership(&restricted, 2, 150, 1, Seed(5));
    assert!(report.pass(), "restricted: {report:?}");

    let mut rng = Seed(6).rng();
    let g = FpMatrix::random_invertible(f, 4, &mut rng);
    let moved = restricted.gl_act(&g).unwrap();
    let report_moved = check_membership(&moved, 2, 150, 1, Seed(5));
    assert_eq!(report.rank, report_moved.rank);
    assert_eq!(report.sections_h0, report_moved.sections_h0);

    let t1 = cohomology_table(&build_monad(&restricted, 2).unwrap(), -4, 1).unwrap();
    let t2 = cohomology_table(&build_monad(&moved, 2).unwrap(), -4, 1).unwrap();
    assert_eq!(t1, t2);
    assert_eq!(t1.h(1, -1), 4);
    assert_eq!(t1.h(1, 0), 4);

    let star = property_star(&restricted, 3, 50, Seed(7)).unwrap();
    assert!(star.found);
}

#[test]
fn ansatz_stratum_reach_is_reported_not_assumed() {
    // The constrained column sampler always verifies the summand condition
    // exactly, but its stratum meets the fiberwise open conditions only for
    // some (n, r): every probe so far passes iff n ≤ 2r + 1. Both outcomes
    // surface through the reported verdicts.
    let f = Fp::default_prime();
    let good = sample_bc(f, 5, 2, SampleStrategy::Ansatz, Seed(8), 40, 1).unwrap();
    assert!(good.checks.pass());
    let bad = sample_bc(f, 4, 1, SampleStrategy::Ansatz, Seed(9), 40, 1).unwrap();
    assert!(!bad.checks.pass());
    // the failing witness is exact: the assembled web fails clause (ii)
    let xi = Xi::coordinate(4, 3);
    let a = assemble_from_bc(&bad.pair, &xi).unwrap();
    let report = check_membership(&a, 1, 40, 1, Seed(10));
    assert!(report.pass_rank());
    assert!(!report.pass_fiber());

    // the fiber maps of A and gl_act(A, g) have the same rank at every
    // point, so with equal seeds even the witness structure coincides
    let mut rng = Seed(11).rng();
    let g = FpMatrix::random_invertible(f, a.charge(), &mut rng);
    let moved = a.gl_act(&g).unwrap();
    let report_moved = check_membership(&moved, 1, 40, 1, Seed(10));
    let w1 = report.fiber.unwrap().witness.unwrap();
    let w2 = report_moved.fiber.unwrap().witness.unwrap();
    assert_eq!(w1.trial_index, w2.trial_index);
    assert_eq!(w1.coords, w2.coords);
    assert_eq!(w1.rank_found, w2.rank_found);
}

#[test]
fn alternate_session_primes_work_end_to_end() {
    // the machinery is exact over any valid session prime; smaller primes
    // only weaken the statistical side of the point checks
    for (p, seed) in [(1_000_003u64, 0xA17u64), (10_007, 0xA19)] {
        let f = Fp::new(p).unwrap();
        let pair = sample_bc(f, 3, 2, SampleStrategy::Vacuous, Seed(seed), 1, 1)
            .unwrap()
            .pair;
        let xi = Xi::coordinate(3, 1);
        let a = assemble_from_bc(&pair, &xi).unwrap();
        let report = check_membership(&a, 2, 100, 2, Seed(seed + 1));
        assert!(report.pass(), "prime {p}: {report:?}");
        let monad = build_monad(&a, 2).unwrap();
        let table = cohomology_table(&monad, -4, 1).unwrap();
        assert_eq!(table.h(1, -1), 4);
        assert_eq!(table.h(1, 0), 4);
        assert!(table.euler_consistent());
        let tangent = tangent_dimension(&a, 2).unwrap();
        assert!(tangent.measured_tangent.unwrap() as i64 >= tangent.expected_mi);
    }
}

#[test]
fn tangent_equality_rates_at_sampled_points() {
    // Equality of measured and expected dimension is an observation about
    // general points, not a theorem, so the rates are printed; for these
    // fixed seeds the observed rate is total, which is pinned here as a
    // regression value.
    let f = Fp::default_prime();
    let report_line = |label: &str, hits: usize, total: usize| {
        println!("  tangent equality {hits}/{total} at {label}");
        assert_eq!(hits, total, "observed equality rate changed at {label}");
    };

    // τ-restricted charge-4 points
    let mut hits = 0;
    for k in 0..10u64 {
        let sampled =
            sample_bc(f, 3, 1, SampleStrategy::Ansatz, Seed(0xB0B).child(k), 1, 1).unwrap();
        let xi = Xi::coordinate(3, 2);
        let source = assemble_from_bc(&sampled.pair, &xi).unwrap();
        let (restricted, _) =
            tau_restrict_construct(&source, &xi, 2, Seed(0xB1B).child(k)).unwrap();
        let t = tangent_dimension(&restricted, 2).unwrap();
        if t.measured_tangent.unwrap() as i64 == t.expected_mi {
            hits += 1;
        }
    }
    report_line("tau-restricted (charge 4, r = 2)", hits, 10);

    // charge-8 ansatz points
    let mut hits = 0;
    for k in 0..5u64 {
        let sampled =
            sample_bc(f, 5, 2, SampleStrategy::Ansatz, Seed(0xB2B).child(k), 1, 1).unwrap();
        let a = assemble_from_bc(&sampled.pair, &Xi::coordinate(5, 3)).unwrap();
        let t = tangent_dimension(&a, 2).unwrap();
        assert_eq!(t.expected_mi, 150);
        if t.measured_tangent.unwrap() as i64 == t.expected_mi {
            hits += 1;
        }
    }
    report_line("ansatz (charge 8, r = 2)", hits, 5);

    // charge-5 half-rank-1 sources
    let mut hits = 0;
    for k in 0..10u64 {
        let sampled =
            sample_bc(f, 3, 1, SampleStrategy::Ansatz, Seed(0xB3B).child(k), 1, 1).unwrap();
        let a = assemble_from_bc(&sampled.pair, &Xi::coordinate(3, 2)).unwrap();
        let t = tangent_dimension(&a, 1).unwrap();
        if t.measured_tangent.unwrap() as i64 == t.expected_mi {
            hits += 1;
        }
    }
    report_line("ansatz sources (charge 5, r = 1)", hits, 10);
}
