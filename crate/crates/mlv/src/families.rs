//! Constructive rational families of solutions: fixed-rank Schur-complement
//! charts, the shifted multi-affine system around a base solution, a staged
//! rational-family builder, and exact certificates for the dimension lower
//! bounds they witness.
//!
//! The builder fixes a solution v of F = c, forms the 2^d·m shifted
//! functions obtained by freezing any subset of blocks at v, and solves them
//! stage by stage: the stage-s functions are linear in block s on the family
//! built so far, so each stage contributes a pivot chart and a block of
//! rational-function solved coordinates.

use crate::error::{Error, Result};
use crate::exact_arith::{sample_scalar, FieldId, Scalar, DEFAULT_HEIGHT};
use crate::linalg;
use crate::multipoly::{poly_det, Monomial, MultiPoly, VarBlocks};
use crate::tensor_core::{BlockPoint, Tensor};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedRankChart {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl FixedRankChart {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<FixedRankChart> {
        if rows.len() != cols.len() {
            return Err(Error::LengthMismatch {
                expected: rows.len(),
                got: cols.len(),
            });
        }
        Ok(FixedRankChart { rows, cols })
    }

    pub fn r(&self) -> usize {
        self.rows.len()
    }
}

/// Kernel parametrization on a fixed-rank chart: the pivot block of v is
/// −M₁⁻¹M₂·w and the free block is w, in original coordinate order.
pub fn psi_chart_solve(
    m: &[Vec<Scalar>],
    w: &[Scalar],
    chart: &FixedRankChart,
) -> Result<Vec<Scalar>> {
    let ncols = m.first().map(|r| r.len()).unwrap_or(0);
    let r = chart.r();
    if w.len() != ncols - r {
        return Err(Error::LengthMismatch {
            expected: ncols - r,
            got: w.len(),
        });
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !chart.cols.contains(c)).collect();
    if r == 0 {
        return Ok(w.to_vec());
    }
    let field = m[0][0].field();
    let m1: Vec<Vec<Scalar>> = chart
        .rows
        .iter()
        .map(|&i| chart.cols.iter().map(|&j| m[i][j].clone()).collect())
        .collect();
    // rhs = −M₂·w
    let rhs: Vec<Scalar> = chart
        .rows
        .iter()
        .map(|&i| {
            let mut acc = Scalar::zero(field);
            for (t, &j) in free.iter().enumerate() {
                acc = acc.add(&m[i][j].mul(&w[t]));
            }
            acc.neg()
        })
        .collect();
    let sol = linalg::solve(field, &m1, &rhs).ok_or(Error::SingularPivot)?;
    let mut v = vec![Scalar::zero(field); ncols];
    for (t, &j) in chart.cols.iter().enumerate() {
        v[j] = sol[t].clone();
    }
    for (t, &j) in free.iter().enumerate() {
        v[j] = w[t].clone();
    }
    Ok(v)
}

/// Projection to the free coordinates; the partial inverse of
/// `psi_chart_solve` on chart-compatible kernel vectors.
pub fn phi_project(v: &[Scalar], chart: &FixedRankChart) -> Vec<Scalar> {
    (0..v.len())
        .filter(|c| !chart.cols.contains(c))
        .map(|c| v[c].clone())
        .collect()
}

/// One shifted function f_{j,I}: component j with the blocks in `fixed`
/// frozen at the base point and the rest shifted by it, minus the target.
#[derive(Debug, Clone)]
pub struct ShiftedFn {
    pub j: usize,
    pub fixed_mask: u32,
    pub poly: MultiPoly,
    /// Minimal s with mdeg ≤ (1,…,1,0,…,0) (s ones); 0 for constants.
    pub stage: usize,
}

#[derive(Debug, Clone)]
pub struct ShiftedSystem {
    pub system: Tensor,
    pub base: BlockPoint,
    pub targets: Vec<Scalar>,
    pub functions: Vec<ShiftedFn>,
}

fn stage_of(p: &MultiPoly) -> usize {
    p.mdeg()
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > 0)
        .map(|(i, _)| i + 1)
        .max()
        .unwrap_or(0)
}

pub fn shifted_system(system: &Tensor, v: &BlockPoint, c: &[Scalar]) -> Result<ShiftedSystem> {
    let m = system.codomain_dim();
    if c.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            got: c.len(),
        });
    }
    let value = system.eval(v)?;
    if let Some(j) = (0..m).find(|&j| value[j] != c[j]) {
        return Err(Error::NotASolution(j));
    }
    let d = system.num_blocks();
    if d > 16 {
        return Err(Error::TooManyVariables(d));
    }
    let polys = system.to_polys();
    let flat = v.flatten();
    let mut functions = Vec::with_capacity(m << d);
    for (j, f) in polys.iter().enumerate() {
        for mask in 0u32..(1 << d) {
            let fixed: Vec<usize> = (0..d).filter(|&i| mask >> i & 1 == 1).collect();
            let shifted = f.shift_substitute(&flat, &fixed)?;
            let cj = MultiPoly::constant(f.field(), f.blocks().clone(), c[j].clone());
            let poly = shifted.sub(&cj)?;
            let stage = stage_of(&poly);
            functions.push(ShiftedFn {
                j,
                fixed_mask: mask,
                poly,
                stage,
            });
        }
    }
    // each function vanishes at the origin by construction
    let zero = vec![Scalar::zero(system.field()); flat.len()];
    for f in &functions {
        debug_assert!(f.poly.evaluate(&zero).unwrap().is_zero());
    }
    Ok(ShiftedSystem {
        system: system.clone(),
        base: v.clone(),
        targets: c.to_vec(),
        functions,
    })
}

/// One stage of the staged builder. Coordinates of block s are
/// nums[k] / den, polynomials in the free parameter variables; a free
/// coordinate k has nums[k] = x_{s,k}·den.
#[derive(Debug, Clone)]
pub struct StageData {
    pub constraint_ids: Vec<(usize, u32)>,
    pub rank: usize,
    pub chart: FixedRankChart,
    pub free_cols: Vec<usize>,
    pub den: MultiPoly,
    pub nums: Vec<MultiPoly>,
    /// Exact parameter sample (flat ambient layout) at which the pivot
    /// minor is nonzero.
    pub sample: Vec<Scalar>,
}

#[derive(Debug, Clone)]
pub struct RationalFamily {
    pub blocks: VarBlocks,
    pub field: FieldId,
    pub base: BlockPoint,
    pub stages: Vec<StageData>,
    pub parameter_dim: usize,
}

impl RationalFamily {
    /// Free parameters in flat ambient order: (stage, coordinate) pairs.
    pub fn param_vars(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (s, st) in self.stages.iter().enumerate() {
            for &k in &st.free_cols {
                out.push(self.blocks.var_index(s, k));
            }
        }
        out
    }
}

/// Substitute the solved coordinates of earlier stages into a polynomial
/// whose variables lie in blocks < s, clearing all denominators: each term
/// picks the numerator for present variables and the stage denominator for
/// absent blocks. The result equals (∏_{t<s} den_t) · p(solved coords).
fn substitute_cleared(p: &MultiPoly, stages: &[StageData], blocks: &VarBlocks) -> MultiPoly {
    let field = p.field();
    let mut out = MultiPoly::zero(field, blocks.clone());
    for (m, c) in p.terms() {
        let mut acc = MultiPoly::constant(field, blocks.clone(), c.clone());
        for (t, st) in stages.iter().enumerate() {
            let range = blocks.block_range(t);
            let var = range.clone().find(|&u| m.degree_of(u) == 1);
            let factor = match var {
                Some(u) => &st.nums[u - range.start],
                None => &st.den,
            };
            acc = acc.mul(factor).unwrap();
        }
        out = out.add(&acc).unwrap();
    }
    out
}

/// Deterministic rank and pivot chart of an exact matrix: Gaussian
/// elimination scanning columns then rows in ascending order.
fn numeric_rank_chart(m: &[Vec<Scalar>]) -> (usize, Vec<usize>, Vec<usize>) {
    let nrows = m.len();
    let ncols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut a = m.to_vec();
    let mut used_rows = vec![false; nrows];
    let (mut rows, mut cols) = (Vec::new(), Vec::new());
    for c in 0..ncols {
        let Some(pr) = (0..nrows).find(|&i| !used_rows[i] && !a[i][c].is_zero()) else {
            continue;
        };
        used_rows[pr] = true;
        rows.push(pr);
        cols.push(c);
        let inv = a[pr][c].invert().unwrap();
        for i in 0..nrows {
            if i != pr && !a[i][c].is_zero() {
                let f = a[i][c].mul(&inv);
                for j in 0..ncols {
                    let t = a[pr][j].mul(&f);
                    a[i][j] = a[i][j].sub(&t);
                }
            }
        }
    }
    (rows.len(), rows, cols)
}

fn poly_adjugate(m: &[Vec<MultiPoly>]) -> Vec<Vec<MultiPoly>> {
    let r = m.len();
    let field = m[0][0].field();
    let blocks = m[0][0].blocks().clone();
    if r == 1 {
        return vec![vec![MultiPoly::constant(field, blocks, Scalar::one(field))]];
    }
    let mut adj = vec![vec![MultiPoly::zero(field, blocks.clone()); r]; r];
    for a in 0..r {
        for b in 0..r {
            let sub: Vec<Vec<MultiPoly>> = (0..r)
                .filter(|&i| i != b)
                .map(|i| {
                    (0..r)
                        .filter(|&j| j != a)
                        .map(|j| m[i][j].clone())
                        .collect()
                })
                .collect();
            let mut d = poly_det(&sub);
            if (a + b) % 2 == 1 {
                d = d.neg();
            }
            adj[a][b] = d;
        }
    }
    adj
}

const SAMPLE_ATTEMPTS: usize = 20;

pub fn build_family(s: &ShiftedSystem, rng: &mut ChaCha8Rng) -> Result<RationalFamily> {
    let field = s.system.field();
    if field.is_finite() {
        return Err(Error::FiniteFieldFamily);
    }
    let blocks = s.system.blocks().clone();
    let d = blocks.num_blocks();
    let one = MultiPoly::constant(field, blocks.clone(), Scalar::one(field));
    let mut stages: Vec<StageData> = Vec::new();
    for stage in 0..d {
        let ns = blocks.sizes()[stage];
        let range = blocks.block_range(stage);
        let fns: Vec<&ShiftedFn> = s.functions.iter().filter(|f| f.stage == stage + 1).collect();
        if fns.is_empty() {
            stages.push(StageData {
                constraint_ids: Vec::new(),
                rank: 0,
                chart: FixedRankChart::new(Vec::new(), Vec::new())?,
                free_cols: (0..ns).collect(),
                den: one.clone(),
                nums: (0..ns)
                    .map(|k| MultiPoly::var(field, blocks.clone(), range.start + k))
                    .collect(),
                sample: vec![Scalar::zero(field); blocks.total_vars()],
            });
            continue;
        }
        // split each stage function into block-s coefficients and affine part
        let mut coeff_rows: Vec<Vec<MultiPoly>> = Vec::new();
        let mut affine_parts: Vec<MultiPoly> = Vec::new();
        for f in &fns {
            let mut coeffs = vec![MultiPoly::zero(field, blocks.clone()); ns];
            let mut affine = MultiPoly::zero(field, blocks.clone());
            for (m, c) in f.poly.terms() {
                match range.clone().find(|&u| m.degree_of(u) == 1) {
                    Some(u) => {
                        let mut exps = m.exps().to_vec();
                        exps[u] = 0;
                        coeffs[u - range.start].add_term(Monomial::from_exps(exps), c.clone());
                    }
                    None => affine.add_term(m.clone(), c.clone()),
                }
            }
            coeff_rows.push(coeffs);
            affine_parts.push(affine);
        }
        // substitute the family built so far, denominators cleared row-wise
        let sym: Vec<Vec<MultiPoly>> = coeff_rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|a| substitute_cleared(a, &stages, &blocks))
                    .collect()
            })
            .collect();
        let affine_sym: Vec<MultiPoly> = affine_parts
            .iter()
            .map(|a| substitute_cleared(a, &stages, &blocks))
            .collect();
        // generic rank by exact sampling
        let free_so_far: Vec<usize> = stages
            .iter()
            .enumerate()
            .flat_map(|(t, st)| {
                let base = blocks.block_range(t).start;
                st.free_cols.iter().map(move |&k| base + k)
            })
            .collect();
        let mut best: Option<(usize, Vec<usize>, Vec<usize>, Vec<Scalar>)> = None;
        for attempt in 0..SAMPLE_ATTEMPTS {
            let height = DEFAULT_HEIGHT << (attempt / 5);
            let mut z = vec![Scalar::zero(field); blocks.total_vars()];
            for &u in &free_so_far {
                z[u] = sample_scalar(field, height, rng);
            }
            // the sample must avoid every earlier pivot locus
            if stages.iter().any(|st| st.den.evaluate(&z).unwrap().is_zero()) {
                continue;
            }
            // stage soundness: affine parts vanish on the current family
            if let Some(i) = affine_sym
                .iter()
                .position(|a| !a.evaluate(&z).unwrap().is_zero())
            {
                return Err(Error::DegenerateSampling {
                    stage: stage + 1,
                    detail: format!(
                        "affine part of constraint ({}, {:#b}) does not vanish on the family",
                        fns[i].j, fns[i].fixed_mask
                    ),
                });
            }
            let numeric: Vec<Vec<Scalar>> = sym
                .iter()
                .map(|row| row.iter().map(|e| e.evaluate(&z).unwrap()).collect())
                .collect();
            let (r, rows, cols) = numeric_rank_chart(&numeric);
            if best.as_ref().map(|(br, ..)| r > *br).unwrap_or(true) {
                best = Some((r, rows, cols, z));
            }
            if attempt >= 2 && best.as_ref().map(|(br, ..)| *br == ns.min(sym.len())).unwrap_or(false)
            {
                break;
            }
        }
        let Some((r, rows, cols, sample)) = best else {
            return Err(Error::DegenerateSampling {
                stage: stage + 1,
                detail: "no sample avoided the earlier pivot loci".into(),
            });
        };
        let free_cols: Vec<usize> = (0..ns).filter(|k| !cols.contains(k)).collect();
        let (den, nums) = if r == 0 {
            (
                one.clone(),
                (0..ns)
                    .map(|k| MultiPoly::var(field, blocks.clone(), range.start + k))
                    .collect(),
            )
        } else {
            let m1: Vec<Vec<MultiPoly>> = rows
                .iter()
                .map(|&i| cols.iter().map(|&j| sym[i][j].clone()).collect())
                .collect();
            let den = poly_det(&m1);
            let adj = poly_adjugate(&m1);
            // solved x_J = −adj(M₁)·M₂·w / det(M₁)
            let mut nums = vec![MultiPoly::zero(field, blocks.clone()); ns];
            for (a, &ja) in cols.iter().enumerate() {
                let mut acc = MultiPoly::zero(field, blocks.clone());
                for (b, &ib) in rows.iter().enumerate() {
                    for &jf in &free_cols {
                        let w = MultiPoly::var(field, blocks.clone(), range.start + jf);
                        let term = adj[a][b].mul(&sym[ib][jf]).unwrap().mul(&w).unwrap();
                        acc = acc.add(&term).unwrap();
                    }
                }
                nums[ja] = acc.neg();
            }
            for &jf in &free_cols {
                nums[jf] = MultiPoly::var(field, blocks.clone(), range.start + jf)
                    .mul(&den)
                    .unwrap();
            }
            (den, nums)
        };
        stages.push(StageData {
            constraint_ids: fns.iter().map(|f| (f.j, f.fixed_mask)).collect(),
            rank: r,
            chart: FixedRankChart::new(rows, cols)?,
            free_cols,
            den,
            nums,
            sample,
        });
    }
    let parameter_dim: usize = stages.iter().map(|st| st.free_cols.len()).sum();
    let n = blocks.total_vars();
    let total_rank: usize = stages.iter().map(|st| st.rank).sum();
    assert_eq!(parameter_dim + total_rank, n);
    assert!(total_rank <= s.functions.len());
    Ok(RationalFamily {
        blocks,
        field,
        base: s.base.clone(),
        stages,
        parameter_dim,
    })
}

/// Exact ambient family point at the given parameters; the all-zero
/// parameter vector returns the base point.
pub fn family_eval(fam: &RationalFamily, params: &[Scalar]) -> Result<BlockPoint> {
    if params.len() != fam.parameter_dim {
        return Err(Error::LengthMismatch {
            expected: fam.parameter_dim,
            got: params.len(),
        });
    }
    let mut z = vec![Scalar::zero(fam.field); fam.blocks.total_vars()];
    for (u, p) in fam.param_vars().into_iter().zip(params) {
        z[u] = p.clone();
    }
    let mut x = vec![Scalar::zero(fam.field); fam.blocks.total_vars()];
    for (t, st) in fam.stages.iter().enumerate() {
        let range = fam.blocks.block_range(t);
        let den = st.den.evaluate(&z)?;
        for (k, num) in st.nums.iter().enumerate() {
            let nv = num.evaluate(&z)?;
            x[range.start + k] = if nv.is_zero() {
                nv
            } else if den.is_zero() {
                return Err(Error::PivotDenominatorZero);
            } else {
                nv.div(&den)?
            };
        }
    }
    let shift = fam.base.flatten();
    let ambient: Vec<Scalar> = shift.iter().zip(&x).map(|(v, xi)| v.add(xi)).collect();
    BlockPoint::from_flat(&fam.blocks, &ambient)
}

/// Exact rank of the Jacobian of the parametrization at `params`; a lower
/// bound on the dimension of the family closure.
pub fn family_jacobian_rank(fam: &RationalFamily, params: &[Scalar]) -> Result<usize> {
    let pvars = fam.param_vars();
    let mut z = vec![Scalar::zero(fam.field); fam.blocks.total_vars()];
    for (u, p) in pvars.iter().zip(params) {
        z[*u] = p.clone();
    }
    let mut jac: Vec<Vec<Scalar>> = Vec::new();
    for (t, st) in fam.stages.iter().enumerate() {
        let den = st.den.evaluate(&z)?;
        if den.is_zero() && st.nums.iter().any(|n| !n.is_zero()) {
            return Err(Error::PivotDenominatorZero);
        }
        let den_sq = den.mul(&den);
        let _ = t;
        for num in &st.nums {
            if num.is_zero() {
                jac.push(vec![Scalar::zero(fam.field); pvars.len()]);
                continue;
            }
            let nv = num.evaluate(&z)?;
            let row: Vec<Scalar> = pvars
                .iter()
                .map(|&u| {
                    let np = num.partial_derivative(u).evaluate(&z)?;
                    let dp = st.den.partial_derivative(u).evaluate(&z)?;
                    // d(num/den) = (num' den − num den')/den²
                    np.mul(&den).sub(&nv.mul(&dp)).div(&den_sq)
                })
                .collect::<Result<_>>()?;
            jac.push(row);
        }
    }
    Ok(linalg::rank(fam.field, &jac))
}

/// One audited family point: the parameters used and the resulting exact
/// ambient point.
#[derive(Debug, Clone)]
pub struct CertPoint {
    pub params: Vec<Scalar>,
    pub ambient: Vec<Scalar>,
}

#[derive(Debug, Clone)]
pub struct FamilyCertificate {
    pub jac_rank: usize,
    pub jac_params: Vec<Scalar>,
    pub vanishing_trials: usize,
    pub scaling_trials: usize,
    pub codim_bound: usize,
    pub verdict: bool,
    /// Irreducibility of the closure is proved analytically, never machine
    /// checked; recorded so downstream consumers cannot over-claim.
    pub irreducibility_checked: bool,
    pub transcripts: Vec<CertPoint>,
    /// (scaled ambient point, λ) pairs re-checkable without the builder.
    pub scalings: Vec<(Vec<Scalar>, Scalar)>,
}

/// Evaluate every shifted function at the (ambient) point; true iff all
/// vanish.
pub fn shifted_all_vanish(s: &ShiftedSystem, ambient: &[Scalar]) -> Result<bool> {
    let base = s.base.flatten();
    let x: Vec<Scalar> = ambient.iter().zip(&base).map(|(a, v)| a.sub(v)).collect();
    for f in &s.functions {
        if !f.poly.evaluate(&x)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn sample_params(
    fam: &RationalFamily,
    rng: &mut ChaCha8Rng,
    height: u64,
) -> Result<(Vec<Scalar>, BlockPoint)> {
    for attempt in 0..SAMPLE_ATTEMPTS {
        let h = height << (attempt / 5);
        let params: Vec<Scalar> = (0..fam.parameter_dim)
            .map(|_| sample_scalar(fam.field, h, rng))
            .collect();
        match family_eval(fam, &params) {
            Ok(p) => return Ok((params, p)),
            Err(Error::PivotDenominatorZero) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::DegenerateSampling {
        stage: 0,
        detail: "every sampled parameter vector hit a pivot locus".into(),
    })
}

/// Sample parameters until the Jacobian is defined there (the zero-numerator
/// convention lets `family_eval` succeed at points where the pivot
/// denominator vanishes, but the derivative needs den ≠ 0).
pub fn sample_jacobian_rank(
    fam: &RationalFamily,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<Scalar>, usize)> {
    for _ in 0..SAMPLE_ATTEMPTS {
        let (params, _) = sample_params(fam, rng, DEFAULT_HEIGHT)?;
        match family_jacobian_rank(fam, &params) {
            Ok(r) => return Ok((params, r)),
            Err(Error::PivotDenominatorZero) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::DegenerateSampling {
        stage: 0,
        detail: "every sampled parameter vector left the Jacobian undefined".into(),
    })
}

pub fn certify_family(
    fam: &RationalFamily,
    s: &ShiftedSystem,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Result<FamilyCertificate> {
    if trials == 0 {
        return Err(Error::BadParams("certify_family needs trials ≥ 1".into()));
    }
    let d = fam.blocks.num_blocks();
    let n = fam.blocks.total_vars();
    let m = s.system.codomain_dim();
    let codim_bound = (1usize << d) * m;
    let mut ok = true;
    // (1) vanishing at random family points
    let mut transcripts = Vec::with_capacity(trials);
    for _ in 0..trials {
        let (params, point) = sample_params(fam, rng, DEFAULT_HEIGHT)?;
        let ambient = point.flatten();
        ok &= shifted_all_vanish(s, &ambient)?;
        transcripts.push(CertPoint { params, ambient });
    }
    // (2) Jacobian rank at a random sample
    let (jac_params, jac_rank) = sample_jacobian_rank(fam, rng)?;
    ok &= jac_rank as i64 >= n as i64 - codim_bound as i64;
    // (3) scaling: λ·(family point − base) stays a solution
    let base = s.base.flatten();
    let mut scalings = Vec::new();
    for t in 0..trials.min(5) {
        let lam = loop {
            let l = sample_scalar(fam.field, DEFAULT_HEIGHT, rng);
            if !l.is_zero() {
                break l;
            }
        };
        let ambient = &transcripts[t % transcripts.len()].ambient;
        let scaled: Vec<Scalar> = ambient
            .iter()
            .zip(&base)
            .map(|(a, v)| v.add(&lam.mul(&a.sub(v))))
            .collect();
        ok &= shifted_all_vanish(s, &scaled)?;
        scalings.push((scaled, lam));
    }
    // (4) base point: zero parameters return the shifted origin
    let zero = vec![Scalar::zero(fam.field); fam.parameter_dim];
    ok &= family_eval(fam, &zero)? == fam.base;
    Ok(FamilyCertificate {
        jac_rank,
        jac_params,
        vanishing_trials: trials,
        scaling_trials: trials.min(5),
        codim_bound,
        verdict: ok,
        irreducibility_checked: false,
        transcripts,
        scalings,
    })
}
