//! Versioned JSON payloads: polynomials, tensors, reports, and the family
//! proof objects re-verified by `check-cert` without rerunning the builder.
//! Writers emit canonical form (sorted terms, reduced coefficients) so files
//! are diff-stable; all scalars are exact decimal strings.

use crate::error::{Error, Result};
use crate::exact_arith::{FieldId, Scalar};
use crate::families::{
    family_eval, family_jacobian_rank, CertPoint, FamilyCertificate, FixedRankChart,
    RationalFamily, StageData,
};
use crate::invariants::{ConstantsTable, InvariantReport, SuiteReport};
use crate::multipoly::{Monomial, MultiPoly, VarBlocks};
use crate::strata::StratificationReport;
use crate::tensor_core::{BlockPoint, Tensor};
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "1";

fn bad(msg: impl Into<String>) -> Error {
    Error::MalformedCert(msg.into())
}

// ---- polynomials ----

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u16>,
    pub coef: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyJson {
    pub blocks: Vec<usize>,
    pub field: String,
    pub terms: Vec<TermJson>,
}

pub fn poly_to_json(p: &MultiPoly) -> PolyJson {
    PolyJson {
        blocks: p.blocks().sizes().to_vec(),
        field: p.field().to_string(),
        terms: p
            .terms()
            .map(|(m, c)| TermJson {
                exp: m.exps().to_vec(),
                coef: c.to_string_exact(),
            })
            .collect(),
    }
}

pub fn poly_from_json(j: &PolyJson) -> Result<MultiPoly> {
    let field = FieldId::parse(&j.field)?;
    let blocks = VarBlocks::new(j.blocks.clone())?;
    let n = blocks.total_vars();
    let mut p = MultiPoly::zero(field, blocks);
    for t in &j.terms {
        if t.exp.len() != n {
            return Err(bad(format!(
                "term exponent length {} ≠ {} variables",
                t.exp.len(),
                n
            )));
        }
        p.add_term(Monomial::from_exps(t.exp.clone()), Scalar::parse(field, &t.coef)?);
    }
    Ok(p)
}

// ---- tensors ----

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntryJson {
    /// One index per block (0 = affine slot) followed by the output index.
    pub idx: Vec<usize>,
    pub coef: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorJson {
    pub shape: Vec<usize>,
    pub m: usize,
    pub field: String,
    pub homogeneous: bool,
    pub entries: Vec<EntryJson>,
}

pub fn tensor_to_json(t: &Tensor) -> TensorJson {
    let mut entries = Vec::new();
    for idx in t.index_tuples() {
        for out in 0..t.codomain_dim() {
            let c = t.entry(&idx, out);
            if !c.is_zero() {
                let mut full = idx.clone();
                full.push(out);
                entries.push(EntryJson {
                    idx: full,
                    coef: c.to_string_exact(),
                });
            }
        }
    }
    TensorJson {
        shape: t.blocks().sizes().to_vec(),
        m: t.codomain_dim(),
        field: t.field().to_string(),
        homogeneous: t.is_homogeneous(),
        entries,
    }
}

pub fn tensor_from_json(j: &TensorJson) -> Result<Tensor> {
    let field = FieldId::parse(&j.field)?;
    let blocks = VarBlocks::new(j.shape.clone())?;
    let d = j.shape.len();
    if j.m == 0 {
        return Err(bad("tensor needs m ≥ 1"));
    }
    let mut t = Tensor::zero(blocks, j.m, field, true);
    for e in &j.entries {
        if e.idx.len() != d + 1 {
            return Err(bad(format!("entry index length {} ≠ d+1", e.idx.len())));
        }
        let (idx, out) = (&e.idx[..d], e.idx[d]);
        for (b, &i) in idx.iter().enumerate() {
            if i > j.shape[b] {
                return Err(bad(format!("index {i} out of range in block {b}")));
            }
        }
        if out >= j.m {
            return Err(bad(format!("output index {out} out of range")));
        }
        t.set_entry(idx, out, Scalar::parse(field, &e.coef)?);
    }
    if t.is_homogeneous() != j.homogeneous {
        return Err(bad("homogeneous flag disagrees with entries"));
    }
    Ok(t)
}

// ---- reports ----

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvariantReportJson {
    pub schema: String,
    pub name: String,
    pub lo: i64,
    pub hi: i64,
    pub field: String,
    pub notes: Vec<String>,
}

pub fn invariant_report_to_json(r: &InvariantReport) -> InvariantReportJson {
    InvariantReportJson {
        schema: SCHEMA.into(),
        name: r.name.as_str().into(),
        lo: r.lo,
        hi: r.hi,
        field: r.field.to_string(),
        notes: r.notes.clone(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StratumRowJson {
    pub r: usize,
    /// None encodes an empty stratum.
    pub closure_codim: Option<i64>,
    pub witness: Option<PolyJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StratificationReportJson {
    pub schema: String,
    pub per_r: Vec<StratumRowJson>,
    pub total_codim: i64,
    pub argmin_r: usize,
    pub direct_codim: i64,
    pub agree: bool,
}

pub fn stratification_to_json(r: &StratificationReport) -> StratificationReportJson {
    StratificationReportJson {
        schema: SCHEMA.into(),
        per_r: r
            .per_r
            .iter()
            .map(|s| StratumRowJson {
                r: s.r,
                closure_codim: s.closure_codim,
                witness: s.witness.as_ref().map(poly_to_json),
            })
            .collect(),
        total_codim: r.total_codim,
        argmin_r: r.argmin_r,
        direct_codim: r.direct_codim,
        agree: r.agree,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteTrialJson {
    pub id: usize,
    pub pass: bool,
    pub detail: String,
    pub repro: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReportJson {
    pub schema: String,
    pub suite: String,
    pub passed: usize,
    pub failed: usize,
    pub trials: Vec<SuiteTrialJson>,
}

pub fn suite_report_to_json(r: &SuiteReport) -> SuiteReportJson {
    SuiteReportJson {
        schema: SCHEMA.into(),
        suite: r.suite.clone(),
        passed: r.passed,
        failed: r.failed,
        trials: r
            .trials
            .iter()
            .map(|t| SuiteTrialJson {
                id: t.id,
                pass: t.pass,
                detail: t.detail.clone(),
                repro: t.repro.clone(),
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstantsJson {
    pub schema: String,
    pub d: u64,
    pub m: u64,
    pub c_pvsa: String,
    pub c_akz: String,
    pub c_pvsg: String,
    pub c_polar: String,
    pub c_strstab: String,
    pub c_strbirch: String,
    pub c_collective: String,
    pub c_krull: String,
}

pub fn constants_to_json(c: &ConstantsTable) -> ConstantsJson {
    ConstantsJson {
        schema: SCHEMA.into(),
        d: c.d,
        m: c.m,
        c_pvsa: c.c_pvsa.to_string(),
        c_akz: c.c_akz.to_string(),
        c_pvsg: c.c_pvsg.to_string(),
        c_polar: c.c_polar.to_string(),
        c_strstab: c.c_strstab.to_string(),
        c_strbirch: c.c_strbirch.to_string(),
        c_collective: c.c_collective.to_string(),
        c_krull: c.c_krull.to_string(),
    }
}

// ---- family proof objects ----

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageJson {
    pub constraint_ids: Vec<(usize, u32)>,
    pub rank: usize,
    pub pivot_rows: Vec<usize>,
    pub pivot_cols: Vec<usize>,
    pub free_cols: Vec<usize>,
    pub den: PolyJson,
    pub nums: Vec<PolyJson>,
    pub sample: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertPointJson {
    pub params: Vec<String>,
    pub ambient: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingJson {
    pub scaled: Vec<String>,
    pub lambda: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateJson {
    pub jac_rank: usize,
    pub jac_params: Vec<String>,
    pub vanishing_trials: usize,
    pub scaling_trials: usize,
    pub codim_bound: usize,
    pub verdict: bool,
    pub irreducibility_checked: bool,
    pub transcripts: Vec<CertPointJson>,
    pub scalings: Vec<ScalingJson>,
}

/// Self-contained proof object: the system, the base solution, the solved
/// family formulas, and the certificate transcripts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyProofJson {
    pub schema: String,
    pub system: TensorJson,
    pub base: Vec<Vec<String>>,
    pub targets: Vec<String>,
    pub parameter_dim: usize,
    pub stages: Vec<StageJson>,
    pub certificate: CertificateJson,
}

fn scalars_to_strings(v: &[Scalar]) -> Vec<String> {
    v.iter().map(Scalar::to_string_exact).collect()
}

fn scalars_from_strings(field: FieldId, v: &[String]) -> Result<Vec<Scalar>> {
    v.iter().map(|s| Scalar::parse(field, s)).collect()
}

pub fn family_proof_to_json(
    system: &Tensor,
    targets: &[Scalar],
    fam: &RationalFamily,
    cert: &FamilyCertificate,
) -> FamilyProofJson {
    FamilyProofJson {
        schema: SCHEMA.into(),
        system: tensor_to_json(system),
        base: fam.base.coords.iter().map(|b| scalars_to_strings(b)).collect(),
        targets: scalars_to_strings(targets),
        parameter_dim: fam.parameter_dim,
        stages: fam
            .stages
            .iter()
            .map(|s| StageJson {
                constraint_ids: s.constraint_ids.clone(),
                rank: s.rank,
                pivot_rows: s.chart.rows.clone(),
                pivot_cols: s.chart.cols.clone(),
                free_cols: s.free_cols.clone(),
                den: poly_to_json(&s.den),
                nums: s.nums.iter().map(poly_to_json).collect(),
                sample: scalars_to_strings(&s.sample),
            })
            .collect(),
        certificate: CertificateJson {
            jac_rank: cert.jac_rank,
            jac_params: scalars_to_strings(&cert.jac_params),
            vanishing_trials: cert.vanishing_trials,
            scaling_trials: cert.scaling_trials,
            codim_bound: cert.codim_bound,
            verdict: cert.verdict,
            irreducibility_checked: cert.irreducibility_checked,
            transcripts: cert
                .transcripts
                .iter()
                .map(|p| CertPointJson {
                    params: scalars_to_strings(&p.params),
                    ambient: scalars_to_strings(&p.ambient),
                })
                .collect(),
            scalings: cert
                .scalings
                .iter()
                .map(|(pt, lam)| ScalingJson {
                    scaled: scalars_to_strings(pt),
                    lambda: lam.to_string_exact(),
                })
                .collect(),
        },
    }
}

pub struct FamilyProof {
    pub system: Tensor,
    pub targets: Vec<Scalar>,
    pub family: RationalFamily,
    pub certificate: FamilyCertificate,
}

pub fn family_proof_from_json(j: &FamilyProofJson) -> Result<FamilyProof> {
    if j.schema != SCHEMA {
        return Err(bad(format!("unsupported schema {:?}", j.schema)));
    }
    let system = tensor_from_json(&j.system)?;
    let field = system.field();
    let base = BlockPoint {
        coords: j
            .base
            .iter()
            .map(|b| scalars_from_strings(field, b))
            .collect::<Result<_>>()?,
    };
    if base.coords.len() != system.num_blocks()
        || base
            .coords
            .iter()
            .zip(system.blocks().sizes())
            .any(|(b, &n)| b.len() != n)
    {
        return Err(bad("base point shape disagrees with the system"));
    }
    let targets = scalars_from_strings(field, &j.targets)?;
    if targets.len() != system.codomain_dim() {
        return Err(bad("target count disagrees with the system"));
    }
    let stages = j
        .stages
        .iter()
        .map(|s| -> Result<StageData> {
            Ok(StageData {
                constraint_ids: s.constraint_ids.clone(),
                rank: s.rank,
                chart: FixedRankChart::new(s.pivot_rows.clone(), s.pivot_cols.clone())?,
                free_cols: s.free_cols.clone(),
                den: poly_from_json(&s.den)?,
                nums: s.nums.iter().map(poly_from_json).collect::<Result<_>>()?,
                sample: scalars_from_strings(field, &s.sample)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if stages.len() != system.num_blocks() {
        return Err(bad("stage count disagrees with the number of blocks"));
    }
    let family = RationalFamily {
        blocks: system.blocks().clone(),
        field,
        base,
        stages,
        parameter_dim: j.parameter_dim,
    };
    let c = &j.certificate;
    let certificate = FamilyCertificate {
        jac_rank: c.jac_rank,
        jac_params: scalars_from_strings(field, &c.jac_params)?,
        vanishing_trials: c.vanishing_trials,
        scaling_trials: c.scaling_trials,
        codim_bound: c.codim_bound,
        verdict: c.verdict,
        irreducibility_checked: c.irreducibility_checked,
        transcripts: c
            .transcripts
            .iter()
            .map(|p| -> Result<CertPoint> {
                Ok(CertPoint {
                    params: scalars_from_strings(field, &p.params)?,
                    ambient: scalars_from_strings(field, &p.ambient)?,
                })
            })
            .collect::<Result<_>>()?,
        scalings: c
            .scalings
            .iter()
            .map(|s| -> Result<(Vec<Scalar>, Scalar)> {
                Ok((
                    scalars_from_strings(field, &s.scaled)?,
                    Scalar::parse(field, &s.lambda)?,
                ))
            })
            .collect::<Result<_>>()?,
    };
    Ok(FamilyProof {
        system,
        targets,
        family,
        certificate,
    })
}

/// All 2^d frozen-subset evaluations: for every subset I of blocks, the
/// system evaluated with blocks in I frozen at the base must hit the
/// targets. Uses only tensor evaluation.
fn frozen_subsets_hit_targets(
    system: &Tensor,
    base: &BlockPoint,
    targets: &[Scalar],
    ambient: &[Scalar],
) -> Result<bool> {
    let d = system.num_blocks();
    let sizes = system.blocks().sizes().to_vec();
    for mask in 0u32..(1 << d) {
        let mut coords = Vec::with_capacity(d);
        let mut off = 0usize;
        for (i, &n) in sizes.iter().enumerate() {
            if mask & (1 << i) != 0 {
                coords.push(base.coords[i].clone());
            } else {
                coords.push(ambient[off..off + n].to_vec());
            }
            off += n;
        }
        let val = system.eval(&BlockPoint { coords })?;
        if val != targets {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Independently re-verify a family proof object from its stored data:
/// vanishing over all frozen subsets, transcript consistency with the
/// solved formulas, the Jacobian rank bound, the scaling points, and the
/// base point. Never calls the family builder.
pub fn check_family_proof(proof: &FamilyProof) -> Result<()> {
    let fam = &proof.family;
    let cert = &proof.certificate;
    let n = fam.blocks.total_vars();
    let d = fam.blocks.num_blocks();
    let m = proof.system.codomain_dim();
    if !cert.verdict {
        return Err(Error::CheckFailed("stored verdict is false".into()));
    }
    if cert.codim_bound != (1usize << d) * m {
        return Err(Error::CheckFailed("codim bound does not match 2^d·m".into()));
    }
    if cert.transcripts.is_empty() {
        return Err(Error::MalformedCert("no transcripts".into()));
    }
    for (k, t) in cert.transcripts.iter().enumerate() {
        if t.params.len() != fam.parameter_dim || t.ambient.len() != n {
            return Err(Error::MalformedCert(format!("transcript {k} has wrong shape")));
        }
        let point = family_eval(fam, &t.params)?;
        if point.flatten() != t.ambient {
            return Err(Error::CheckFailed(format!(
                "transcript {k}: stored point disagrees with the family formulas"
            )));
        }
        if !frozen_subsets_hit_targets(&proof.system, &fam.base, &proof.targets, &t.ambient)? {
            return Err(Error::CheckFailed(format!(
                "transcript {k}: frozen-subset vanishing fails"
            )));
        }
    }
    let jr = family_jacobian_rank(fam, &cert.jac_params)?;
    if jr != cert.jac_rank {
        return Err(Error::CheckFailed(format!(
            "Jacobian rank {jr} disagrees with stored {}",
            cert.jac_rank
        )));
    }
    if (jr as i64) < n as i64 - cert.codim_bound as i64 {
        return Err(Error::CheckFailed("Jacobian rank below the codimension bound".into()));
    }
    for (k, (scaled, lam)) in cert.scalings.iter().enumerate() {
        if lam.is_zero() {
            return Err(Error::MalformedCert(format!("scaling {k} has λ = 0")));
        }
        if scaled.len() != n {
            return Err(Error::MalformedCert(format!("scaling {k} has wrong shape")));
        }
        if !frozen_subsets_hit_targets(&proof.system, &fam.base, &proof.targets, scaled)? {
            return Err(Error::CheckFailed(format!("scaling {k}: vanishing fails")));
        }
    }
    let zero = vec![Scalar::zero(fam.field); fam.parameter_dim];
    if family_eval(fam, &zero)? != fam.base {
        return Err(Error::CheckFailed("zero parameters do not return the base".into()));
    }
    Ok(())
}
