//! Command-line surface over the hyperweb machinery.
//!
//! Exit codes: 0 pass/success, 1 fail, 2 usage or parse error,
//! 3 inconclusive (one-sided searches that found no witness).

mod files;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use files::{
    cohomology_json, fiber_json, membership_json, star_json, tangent_json, HyperwebFile,
    Provenance, ReportFile,
};
use instanton_core::construct::{
    assemble_from_bc, sample_bc, sample_invertible, tau_restrict_construct, SampleStrategy,
};
use instanton_core::hyperweb::{Hyperweb, Xi};
use instanton_core::matrix::FpMatrix;
use instanton_core::membership::{check_membership, property_star};
use instanton_core::monad::{build_monad, cohomology_table};
use instanton_core::tangent::tangent_dimension;
use instanton_core::{Fp, Seed, DEFAULT_PRIME};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_PASS: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "instanton",
    about = "Construct, verify and analyze symplectic instanton hyperwebs of quadrics",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a hyperweb and write it with a full membership report.
    Sample(SampleArgs),
    /// Check the three membership clauses of a hyperweb file.
    Verify(VerifyArgs),
    /// Cohomology table h^i(E(t)) of the monad cohomology bundle.
    Cohomology(CohomologyArgs),
    /// Tangent dimension of the rank stratum against the formulas.
    Tangent(TangentArgs),
    /// Search for a property (*) witness.
    Star(StarArgs),
    /// Apply a seeded random GL(H) change of basis.
    Gl(GlArgs),
    /// Restrict along a subspace inclusion.
    Restrict(RestrictArgs),
}

#[derive(Args)]
struct SampleArgs {
    /// Block size n of the construction (the charge is 2n−r, or n for
    /// the invertible strategy).
    #[arg(long)]
    n: usize,
    /// Half-rank r (defaults to n for the invertible strategy).
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, value_parser = ["vacuous", "ansatz", "tau-restrict", "invertible"])]
    strategy: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_PRIME)]
    prime: u64,
    /// Trials for the probabilistic membership clause.
    #[arg(long, default_value_t = 200)]
    trials: u32,
    /// Extension degree for point sampling.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=4))]
    ext: u8,
    /// Output path for the hyperweb file; the report lands next to it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    file: PathBuf,
    /// Half-rank; inferred from the rank when omitted.
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, default_value_t = 300)]
    trials: u32,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=4))]
    ext: u8,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Session prime; must match the file when given.
    #[arg(long)]
    prime: Option<u64>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct CohomologyArgs {
    file: PathBuf,
    #[arg(long)]
    r: usize,
    #[arg(long, default_value_t = -4, allow_negative_numbers = true)]
    tmin: i64,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    tmax: i64,
    #[arg(long)]
    prime: Option<u64>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct TangentArgs {
    file: PathBuf,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    prime: Option<u64>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct StarArgs {
    file: PathBuf,
    /// Dimension of the sought invertible restriction.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 50)]
    trials: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    prime: Option<u64>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct GlArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    prime: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RestrictArgs {
    file: PathBuf,
    /// Either `keep=i,j,...` (coordinate inclusion) or `random:M:seed`.
    #[arg(long = "tau-spec")]
    tau_spec: String,
    #[arg(long)]
    prime: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through this path too
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// Operation-level failures (searches, rank preconditions, singular
/// inputs) exit 1; malformed input and bad parameters exit 2.
fn exit_code_for(e: &anyhow::Error) -> u8 {
    use instanton_core::Error as CoreError;
    match e.downcast_ref::<CoreError>() {
        Some(
            CoreError::NotFound(_)
            | CoreError::RankMismatch { .. }
            | CoreError::SingularMatrix { .. }
            | CoreError::SingularB
            | CoreError::SingularD
            | CoreError::SingularG
            | CoreError::ConditionIrViolated
            | CoreError::NoSolution
            | CoreError::BadComposition
            | CoreError::BadCohomology(_),
        ) => EXIT_FAIL,
        _ => EXIT_USAGE,
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Sample(args) => cmd_sample(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Cohomology(args) => cmd_cohomology(args),
        Command::Tangent(args) => cmd_tangent(args),
        Command::Star(args) => cmd_star(args),
        Command::Gl(args) => cmd_gl(args),
        Command::Restrict(args) => cmd_restrict(args),
    }
}

fn report_path(out: &Path, explicit: Option<PathBuf>) -> PathBuf {
    explicit.unwrap_or_else(|| {
        let mut name = out.file_stem().unwrap_or_default().to_os_string();
        name.push(".report.json");
        out.with_file_name(name)
    })
}

fn save_report<T: Serialize>(
    path: &Path,
    command: &str,
    parameters: BTreeMap<String, String>,
    seed: u64,
    report: T,
) -> Result<()> {
    ReportFile::new(
        report,
        Provenance {
            command: command.into(),
            parameters,
            seed,
            library_version: env!("CARGO_PKG_VERSION").into(),
        },
    )
    .save(path)
}

fn cmd_sample(args: SampleArgs) -> Result<u8> {
    let field = Fp::new(args.prime)?;
    let seed = Seed(args.seed);
    let n = args.n;
    if n < 1 {
        bail!("--n must be positive");
    }

    #[derive(Serialize)]
    struct SampleReport {
        strategy: String,
        charge: usize,
        membership: files::MembershipJson,
        #[serde(skip_serializing_if = "Option::is_none")]
        subbundle_rho: Option<files::FiberJson>,
        #[serde(skip_serializing_if = "Option::is_none")]
        subbundle_tau: Option<files::FiberJson>,
    }

    let (web, r, rho, tau) = match args.strategy.as_str() {
        "invertible" => {
            let r = args.r.unwrap_or(n);
            if r != n {
                bail!("the invertible strategy produces (n, n)-instantons; --r must equal --n");
            }
            let web = sample_invertible(field, n, seed)?;
            (web, n, None, None)
        }
        "vacuous" | "ansatz" => {
            let r = args
                .r
                .ok_or_else(|| anyhow!("--r is required for this strategy"))?;
            let strategy = if args.strategy == "vacuous" {
                SampleStrategy::Vacuous
            } else {
                SampleStrategy::Ansatz
            };
            let sampled = sample_bc(field, n, r, strategy, seed, args.trials, args.ext as usize)?;
            let xi = Xi::coordinate(n, n - r);
            let web = assemble_from_bc(&sampled.pair, &xi)?;
            (
                web,
                r,
                Some(fiber_json(&sampled.checks.rho)),
                Some(fiber_json(&sampled.checks.tau)),
            )
        }
        "tau-restrict" => {
            let r = args
                .r
                .ok_or_else(|| anyhow!("--r is required for tau-restrict"))?;
            if n < 2 {
                bail!("tau-restrict needs n >= 2");
            }
            // source: a charge-(2n−1) web with half-rank 1
            let strategy = if n == 2 {
                SampleStrategy::Vacuous
            } else {
                SampleStrategy::Ansatz
            };
            let sampled = sample_bc(
                field,
                n,
                1,
                strategy,
                seed.child(0),
                args.trials,
                args.ext as usize,
            )?;
            let xi = Xi::coordinate(n, n - 1);
            let source = assemble_from_bc(&sampled.pair, &xi)?;
            let (web, _) = tau_restrict_construct(&source, &xi, r, seed.child(2))?;
            (
                web,
                r,
                Some(fiber_json(&sampled.checks.rho)),
                Some(fiber_json(&sampled.checks.tau)),
            )
        }
        other => bail!("unknown strategy {other:?}"),
    };

    let membership = check_membership(&web, r, args.trials, args.ext as usize, seed.child(99));
    let pass = membership.pass();

    HyperwebFile::from_hyperweb(&web).save(&args.out)?;
    let mut parameters = BTreeMap::new();
    parameters.insert("n".into(), n.to_string());
    parameters.insert("r".into(), r.to_string());
    parameters.insert("strategy".into(), args.strategy.clone());
    parameters.insert("prime".into(), args.prime.to_string());
    parameters.insert("trials".into(), args.trials.to_string());
    parameters.insert("ext".into(), args.ext.to_string());
    parameters.insert("out".into(), args.out.display().to_string());
    save_report(
        &report_path(&args.out, None),
        "sample",
        parameters,
        args.seed,
        SampleReport {
            strategy: args.strategy,
            charge: web.charge(),
            membership: membership_json(&membership),
            subbundle_rho: rho,
            subbundle_tau: tau,
        },
    )?;
    println!(
        "sampled charge-{} hyperweb -> {} (membership {})",
        web.charge(),
        args.out.display(),
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(if pass { EXIT_PASS } else { EXIT_FAIL })
}

fn infer_half_rank(web: &Hyperweb, explicit: Option<usize>) -> Result<usize> {
    if let Some(r) = explicit {
        return Ok(r);
    }
    let n = web.charge();
    let rank = web.matrix().rank();
    if rank <= 2 * n || !(rank - 2 * n).is_multiple_of(2) {
        bail!(
            "cannot infer a half-rank: rank {rank} is not of the form 2N+2r for charge {n}; \
             pass --r explicitly"
        );
    }
    Ok((rank - 2 * n) / 2)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8> {
    let web = files::load_web(&args.file, args.prime)?;
    let r = infer_half_rank(&web, args.r)?;
    let report = check_membership(&web, r, args.trials, args.ext as usize, Seed(args.seed));
    let pass = report.pass();
    let mut parameters = BTreeMap::new();
    parameters.insert("file".into(), args.file.display().to_string());
    parameters.insert("r".into(), r.to_string());
    parameters.insert("trials".into(), args.trials.to_string());
    parameters.insert("ext".into(), args.ext.to_string());
    save_report(
        &report_path(&args.file, args.report),
        "verify",
        parameters,
        args.seed,
        membership_json(&report),
    )?;
    println!(
        "membership (charge {}, r = {r}): {}",
        report.charge,
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(if pass { EXIT_PASS } else { EXIT_FAIL })
}

fn cmd_cohomology(args: CohomologyArgs) -> Result<u8> {
    let web = files::load_web(&args.file, args.prime)?;
    let monad = build_monad(&web, args.r)?;
    let table = cohomology_table(&monad, args.tmin, args.tmax)?;
    let mut parameters = BTreeMap::new();
    parameters.insert("file".into(), args.file.display().to_string());
    parameters.insert("r".into(), args.r.to_string());
    parameters.insert("tmin".into(), args.tmin.to_string());
    parameters.insert("tmax".into(), args.tmax.to_string());
    save_report(
        &report_path(&args.file, args.report),
        "cohomology",
        parameters,
        0,
        cohomology_json(&table, args.r),
    )?;
    println!("   t | h0 h1 h2 h3");
    for t in args.tmin..=args.tmax {
        let row = table.row(t);
        println!(
            "{t:>4} | {:>2} {:>2} {:>2} {:>2}",
            row[0], row[1], row[2], row[3]
        );
    }
    Ok(EXIT_PASS)
}

fn cmd_tangent(args: TangentArgs) -> Result<u8> {
    let web = files::load_web(&args.file, args.prime)?;
    let report = tangent_dimension(&web, args.r)?;
    let mut parameters = BTreeMap::new();
    parameters.insert("file".into(), args.file.display().to_string());
    parameters.insert("r".into(), args.r.to_string());
    save_report(
        &report_path(&args.file, args.report),
        "tangent",
        parameters,
        0,
        tangent_json(&report),
    )?;
    println!(
        "tangent {} (expected MI {}, expected I {})",
        report.measured_tangent.unwrap(),
        report.expected_mi,
        report.expected_i
    );
    Ok(EXIT_PASS)
}

fn cmd_star(args: StarArgs) -> Result<u8> {
    let web = files::load_web(&args.file, args.prime)?;
    let cert = property_star(&web, args.n, args.trials, Seed(args.seed))?;
    let mut parameters = BTreeMap::new();
    parameters.insert("file".into(), args.file.display().to_string());
    parameters.insert("n".into(), args.n.to_string());
    parameters.insert("trials".into(), args.trials.to_string());
    save_report(
        &report_path(&args.file, args.report),
        "star",
        parameters,
        args.seed,
        star_json(&cert),
    )?;
    if cert.found {
        println!(
            "property (*): witness found after {} trials",
            cert.trials_used
        );
        Ok(EXIT_PASS)
    } else {
        println!(
            "property (*): inconclusive after {} trials (the predicate is one-sided)",
            cert.trials_used
        );
        Ok(EXIT_INCONCLUSIVE)
    }
}

fn cmd_gl(args: GlArgs) -> Result<u8> {
    let web = files::load_web(&args.file, args.prime)?;
    let mut rng = Seed(args.seed).rng();
    let g = FpMatrix::random_invertible(web.field(), web.charge(), &mut rng);
    let moved = web.gl_act(&g)?;
    HyperwebFile::from_hyperweb(&moved).save(&args.out)?;

    #[derive(Serialize)]
    struct GlReport {
        charge: usize,
        group_element: Vec<Vec<String>>,
    }
    let mut parameters = BTreeMap::new();
    parameters.insert("file".into(), args.file.display().to_string());
    parameters.insert("out".into(), args.out.display().to_string());
    save_report(
        &report_path(&args.out, None),
        "gl",
        parameters,
        args.seed,
        GlReport {
            charge: moved.charge(),
            group_element: (0..g.rows())
                .map(|i| (0..g.cols()).map(|j| g.get(i, j).to_string()).collect())
                .collect(),
        },
    )?;
    println!("applied GL action -> {}", args.out.display());
    Ok(EXIT_PASS)
}

fn parse_tau_spec(spec: &str, web: &Hyperweb) -> Result<FpMatrix> {
    let f = web.field();
    let n = web.charge();
    if let Some(list) = spec.strip_prefix("keep=") {
        let indices: Vec<usize> = list
            .split(',')
            .map(|s| s.trim().parse().context("tau-spec index"))
            .collect::<Result<_>>()?;
        if indices.is_empty() || indices.iter().any(|&i| i >= n) {
            bail!("keep-indices must be nonempty and below the charge {n}");
        }
        let mut tau = FpMatrix::zeros(f, n, indices.len());
        for (col, &row) in indices.iter().enumerate() {
            tau.set(row, col, 1);
        }
        return Ok(tau);
    }
    if let Some(rest) = spec.strip_prefix("random:") {
        let (m_str, seed_str) = rest
            .split_once(':')
            .ok_or_else(|| anyhow!("expected random:M:seed"))?;
        let m: usize = m_str.parse().context("tau-spec target dimension")?;
        let seed: u64 = seed_str.parse().context("tau-spec seed")?;
        if m == 0 || m > n {
            bail!("target dimension must be in 1..={n}");
        }
        let mut rng = Seed(seed).rng();
        loop {
            let tau = FpMatrix::random(f, n, m, &mut rng);
            if tau.rank() == m {
                return Ok(tau);
            }
        }
    }
    bail!("tau-spec must be `keep=i,j,...` or `random:M:seed`")
}

fn cmd_restrict(args: RestrictArgs) -> Result<u8> {
    let web = files::load_web(&args.file, args.prime)?;
    let tau = parse_tau_spec(&args.tau_spec, &web)?;
    let restricted = web.restrict(&tau)?;
    HyperwebFile::from_hyperweb(&restricted).save(&args.out)?;

    #[derive(Serialize)]
    struct RestrictReport {
        source_charge: usize,
        target_charge: usize,
        tau: Vec<Vec<String>>,
    }
    let mut parameters = BTreeMap::new();
    parameters.insert("file".into(), args.file.display().to_string());
    parameters.insert("tau_spec".into(), args.tau_spec.clone());
    parameters.insert("out".into(), args.out.display().to_string());
    save_report(
        &report_path(&args.out, None),
        "restrict",
        parameters,
        0,
        RestrictReport {
            source_charge: web.charge(),
            target_charge: restricted.charge(),
            tau: (0..tau.rows())
                .map(|i| (0..tau.cols()).map(|j| tau.get(i, j).to_string()).collect())
                .collect(),
        },
    )?;
    println!(
        "restricted charge {} -> {} ({})",
        web.charge(),
        restricted.charge(),
        args.out.display()
    );
    Ok(EXIT_PASS)
}
