//! On-disk JSON schemas: hyperweb files and report files.
//!
//! Hyperweb files are unique per hyperweb: coefficients appear in the
//! canonical (i, j, a, b) lexicographic order, zeros are omitted, and
//! residues are written as decimal strings. The prime is a property of the
//! file, so two files can only be compared when their fields agree.

use anyhow::{bail, Context, Result};
use instanton_core::hyperweb::Hyperweb;
use instanton_core::membership::{MembershipReport, StarCertificate};
use instanton_core::monad::{CohomologyTable, FiberCheckVerdict};
use instanton_core::tangent::DimensionReport;
use instanton_core::tensor::{HyperwebCoeffs, VPAIRS};
use instanton_core::Fp;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoeffEntry {
    pub i: usize,
    pub j: usize,
    pub a: usize,
    pub b: usize,
    pub value: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HyperwebFile {
    pub format_version: String,
    pub prime: u64,
    pub ext_degree: usize,
    pub charge: usize,
    pub coeffs: Vec<CoeffEntry>,
}

impl HyperwebFile {
    pub fn from_hyperweb(web: &Hyperweb) -> HyperwebFile {
        let n = web.charge();
        let mut coeffs = Vec::new();
        for i in 0..n {
            for j in i..n {
                for (vp, &(a, b)) in VPAIRS.iter().enumerate() {
                    let value = web.coeffs().get(i, j, vp);
                    if value != 0 {
                        coeffs.push(CoeffEntry {
                            i,
                            j,
                            a,
                            b,
                            value: value.to_string(),
                        });
                    }
                }
            }
        }
        HyperwebFile {
            format_version: FORMAT_VERSION.into(),
            prime: web.field().modulus(),
            ext_degree: 1,
            charge: n,
            coeffs,
        }
    }

    pub fn to_hyperweb(&self) -> Result<Hyperweb> {
        if self.format_version != FORMAT_VERSION {
            bail!("unsupported format_version {:?}", self.format_version);
        }
        let field = Fp::new(self.prime)
            .with_context(|| format!("file prime {} is not usable", self.prime))?;
        let n = self.charge;
        if n < 1 {
            bail!("charge must be positive");
        }
        let mut coeffs = HyperwebCoeffs::zero(field, n);
        let mut last_key: Option<(usize, usize, usize, usize)> = None;
        for (idx, entry) in self.coeffs.iter().enumerate() {
            let CoeffEntry { i, j, a, b, value } = entry;
            if !(*i <= *j && *j < n) {
                bail!("coeffs[{idx}]: H-indices ({i}, {j}) out of range for charge {n}");
            }
            if !(*a < *b && *b < 4) {
                bail!("coeffs[{idx}]: V-indices ({a}, {b}) must satisfy 0 <= a < b < 4");
            }
            let key = (*i, *j, *a, *b);
            if let Some(prev) = last_key {
                if key <= prev {
                    bail!("coeffs[{idx}]: entries must be strictly increasing in (i, j, a, b)");
                }
            }
            last_key = Some(key);
            let parsed: u64 = value
                .parse()
                .with_context(|| format!("coeffs[{idx}]: value {value:?} is not a residue"))?;
            if parsed == 0 {
                bail!("coeffs[{idx}]: zero values must be omitted");
            }
            if parsed >= self.prime {
                bail!(
                    "coeffs[{idx}]: value {parsed} not reduced modulo {}",
                    self.prime
                );
            }
            let vp = VPAIRS
                .iter()
                .position(|&(x, y)| (x, y) == (*a, *b))
                .expect("range-checked above");
            coeffs.set(*i, *j, vp, parsed);
        }
        Ok(Hyperweb::from_coeffs(coeffs))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let body = serde_json::to_string_pretty(self)?;
        std::fs::write(path, body + "\n").with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<HyperwebFile> {
        let body =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&body).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Load a hyperweb, enforcing an optional session prime.
pub fn load_web(path: &Path, session_prime: Option<u64>) -> Result<Hyperweb> {
    let file = HyperwebFile::load(path)?;
    if let Some(p) = session_prime {
        if p != file.prime {
            bail!(
                "session prime {p} does not match file prime {} in {}",
                file.prime,
                path.display()
            );
        }
    }
    file.to_hyperweb()
}

// --- report files -------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub seed: u64,
    pub library_version: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportFile<T: Serialize> {
    pub format_version: String,
    pub report: T,
    pub provenance: Provenance,
}

impl<T: Serialize> ReportFile<T> {
    pub fn new(report: T, provenance: Provenance) -> ReportFile<T> {
        ReportFile {
            format_version: FORMAT_VERSION.into(),
            report,
            provenance,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let body = serde_json::to_string_pretty(self)?;
        std::fs::write(path, body + "\n").with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiberJson {
    pub condition: String,
    pub trials: u32,
    pub prime: u64,
    pub ext_degree: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessJson {
    /// Four homogeneous coordinates, each a coefficient vector over F_{p^e}.
    pub point: Vec<Vec<String>>,
    pub rank_found: usize,
    pub rank_required: usize,
    pub trial_index: u32,
}

pub fn fiber_json(v: &FiberCheckVerdict) -> FiberJson {
    FiberJson {
        condition: v.side.to_string(),
        trials: v.trials,
        prime: v.prime,
        ext_degree: v.ext_degree,
        pass: v.pass(),
        witness: v.witness.as_ref().map(|w| WitnessJson {
            point: w
                .coords
                .iter()
                .map(|c| c.0[..v.ext_degree].iter().map(|x| x.to_string()).collect())
                .collect(),
            rank_found: w.rank_found,
            rank_required: w.rank_required,
            trial_index: w.trial_index,
        }),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MembershipJson {
    pub charge: usize,
    pub half_rank: usize,
    pub rank_required: usize,
    pub rank_found: usize,
    pub condition_i: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition_ii: Option<FiberJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h0_sections: Option<usize>,
    pub condition_iii: bool,
    pub overall: bool,
}

pub fn membership_json(r: &MembershipReport) -> MembershipJson {
    MembershipJson {
        charge: r.charge,
        half_rank: r.half_rank,
        rank_required: r.rank.required,
        rank_found: r.rank.found,
        condition_i: r.pass_rank(),
        condition_ii: r.fiber.as_ref().map(fiber_json),
        h0_sections: r.sections_h0,
        condition_iii: r.pass_sections(),
        overall: r.pass(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CohomologyJson {
    pub charge: usize,
    pub half_rank: usize,
    pub tmin: i64,
    pub tmax: i64,
    /// rows\[k\] = \[h0, h1, h2, h3\] of E(tmin + k)
    pub rows: Vec<[usize; 4]>,
    pub euler_consistent: bool,
}

pub fn cohomology_json(table: &CohomologyTable, half_rank: usize) -> CohomologyJson {
    CohomologyJson {
        charge: table.charge,
        half_rank,
        tmin: table.tmin,
        tmax: table.tmax,
        rows: (table.tmin..=table.tmax).map(|t| table.row(t)).collect(),
        euler_consistent: table.euler_consistent(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TangentJson {
    pub charge: usize,
    pub half_rank: usize,
    pub dim_s: usize,
    pub eq_count: usize,
    pub expected_mi: i64,
    pub expected_i: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured_tangent: Option<usize>,
    pub meets_lower_bound: bool,
}

pub fn tangent_json(r: &DimensionReport) -> TangentJson {
    TangentJson {
        charge: r.charge,
        half_rank: r.half_rank,
        dim_s: r.dim_s,
        eq_count: r.eq_count,
        expected_mi: r.expected_mi,
        expected_i: r.expected_i,
        measured_tangent: r.measured_tangent,
        meets_lower_bound: r
            .measured_tangent
            .map(|m| m as i64 >= r.expected_mi)
            .unwrap_or(true),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StarJson {
    pub found: bool,
    pub trials_used: u32,
    /// Columns of the witness injection, row-major, as decimal strings.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Vec<String>>>,
    pub verdict: String,
}

pub fn star_json(cert: &StarCertificate) -> StarJson {
    StarJson {
        found: cert.found,
        trials_used: cert.trials_used,
        witness: cert.witness.as_ref().map(|w| {
            (0..w.rows())
                .map(|i| (0..w.cols()).map(|j| w.get(i, j).to_string()).collect())
                .collect()
        }),
        verdict: if cert.found {
            "found".into()
        } else {
            "inconclusive".into()
        },
    }
}
