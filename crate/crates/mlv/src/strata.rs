//! Rank stratification of the coefficient matrix of a multilinear map and
//! the stratified codimension formula: the codimension of the whole
//! multilinear variety equals min over r of (r + codim of the rank-r
//! stratum closure), everything computed over the algebraic closure.
//!
//! The stratum closure of rank exactly r is the closure of
//! V(I_{r+1}) \ V(I_r), obtained by saturating I_{r+1} at each generator of
//! I_r and keeping the largest-dimensional result.

use crate::error::{Error, Result};
use crate::groebner::{
    buchberger_cfg, ideal_dimension_ambient, saturate_cfg, GroebnerConfig, IdealPresentation,
};
use crate::multipoly::{minors, Monomial, MonomialOrder, MultiPoly, VarBlocks};
use crate::tensor_core::Tensor;
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct StratumResult {
    pub r: usize,
    /// None means the stratum is empty over the closure.
    pub closure_codim: Option<i64>,
    /// Saturating generator achieving the maximal dimension.
    pub witness: Option<MultiPoly>,
}

#[derive(Debug, Clone)]
pub struct StratificationReport {
    pub per_r: Vec<StratumResult>,
    pub total_codim: i64,
    pub argmin_r: usize,
    pub direct_codim: i64,
    pub agree: bool,
}

/// The m × n_d matrix of coefficients of the last-block variables: entry
/// (i, s) is the coefficient of x_{d,s} in component i, a multilinear
/// polynomial in blocks 1..d−1.
pub fn coefficient_matrix(f: &Tensor) -> Result<Vec<Vec<MultiPoly>>> {
    if !f.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    let d = f.num_blocks();
    if d < 2 {
        return Err(Error::ShapeMismatch("coefficient matrix needs d ≥ 2".into()));
    }
    let polys = f.to_polys();
    let front_sizes = f.blocks().sizes()[..d - 1].to_vec();
    let front = VarBlocks::new(front_sizes)?;
    let nf = front.total_vars();
    let nd = f.blocks().sizes()[d - 1];
    let mut rows = vec![vec![MultiPoly::zero(f.field(), front.clone()); nd]; f.codomain_dim()];
    for (i, p) in polys.iter().enumerate() {
        for (m, c) in p.terms() {
            let exps = m.exps();
            let s = (nf..nf + nd).find(|&v| exps[v] == 1).ok_or_else(|| {
                Error::ShapeMismatch("term without a last-block variable".into())
            })?;
            rows[i][s - nf].add_term(Monomial::from_exps(exps[..nf].to_vec()), c.clone());
        }
    }
    Ok(rows)
}

/// Generators normalized monic and deduplicated, zeros dropped.
fn nonzero_monic(gens: Vec<MultiPoly>) -> Vec<MultiPoly> {
    let mut out: Vec<MultiPoly> = Vec::new();
    for g in gens {
        if g.is_zero() {
            continue;
        }
        let (_, lc) = g.leading_term(MonomialOrder::DegRevLex).unwrap();
        let monic = g.scalar_mul(&lc.invert().unwrap());
        if !out.contains(&monic) {
            out.push(monic);
        }
    }
    out
}

pub fn stratum_codim(f: &Tensor, r: usize) -> Result<StratumResult> {
    stratum_codim_cfg(f, r, &GroebnerConfig::default())
}

pub fn stratum_codim_cfg(f: &Tensor, r: usize, cfg: &GroebnerConfig) -> Result<StratumResult> {
    let eta = coefficient_matrix(f)?;
    stratum_codim_of_matrix(&eta, r, cfg)
}

fn matrix_ambient(eta: &[Vec<MultiPoly>]) -> usize {
    eta[0][0].num_vars()
}

fn stratum_codim_of_matrix(
    eta: &[Vec<MultiPoly>],
    r: usize,
    cfg: &GroebnerConfig,
) -> Result<StratumResult> {
    let m = eta.len();
    let nd = eta[0].len();
    let rmax = m.min(nd);
    if r > rmax {
        return Err(Error::BadParams(format!("stratum rank {r} exceeds {rmax}")));
    }
    let ambient = matrix_ambient(eta) as i64;
    // I_{r+1}: zero ideal at the top rank
    let upper = if r == rmax {
        Vec::new()
    } else {
        nonzero_monic(minors(eta, r + 1)?)
    };
    if r == 0 {
        // I_0 is the unit ideal: the stratum closure is all of V(I_1)
        let gb = buchberger_cfg(&IdealPresentation::new(upper, MonomialOrder::DegRevLex), cfg)?;
        let dim = ideal_dimension_ambient(&gb, ambient as usize)?;
        return Ok(StratumResult {
            r,
            closure_codim: if dim < 0 { None } else { Some(ambient - dim) },
            witness: None,
        });
    }
    let lower = nonzero_monic(minors(eta, r)?);
    if lower.is_empty() {
        // rank never reaches r
        return Ok(StratumResult {
            r,
            closure_codim: None,
            witness: None,
        });
    }
    let upper_ideal = IdealPresentation::new(upper, MonomialOrder::DegRevLex);
    // independent saturation jobs; deterministic reduction by generator index
    let dims: Vec<Result<i64>> = lower
        .par_iter()
        .map(|g| {
            let sat = saturate_cfg(&upper_ideal, g, cfg)?;
            let gb = buchberger_cfg(&sat, cfg)?;
            ideal_dimension_ambient(&gb, ambient as usize)
        })
        .collect();
    let mut best: Option<(i64, usize)> = None;
    for (i, d) in dims.into_iter().enumerate() {
        let d = d?;
        if d >= 0 && best.map(|(bd, _)| d > bd).unwrap_or(true) {
            best = Some((d, i));
        }
    }
    Ok(match best {
        None => StratumResult {
            r,
            closure_codim: None,
            witness: None,
        },
        Some((dim, i)) => StratumResult {
            r,
            closure_codim: Some(ambient - dim),
            witness: Some(lower[i].clone()),
        },
    })
}

/// Codimension of the full variety V(components) inside its ambient product
/// space; the zero map has codimension 0.
pub fn direct_codim(f: &Tensor) -> Result<i64> {
    direct_codim_cfg(f, &GroebnerConfig::default())
}

pub fn direct_codim_cfg(f: &Tensor, cfg: &GroebnerConfig) -> Result<i64> {
    if !f.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    let polys: Vec<MultiPoly> = f.to_polys().into_iter().filter(|p| !p.is_zero()).collect();
    let n = f.blocks().total_vars() as i64;
    if polys.is_empty() {
        return Ok(0);
    }
    let gb = buchberger_cfg(&IdealPresentation::new(polys, MonomialOrder::DegRevLex), cfg)?;
    let dim = ideal_dimension_ambient(&gb, n as usize)?;
    Ok(n - dim)
}

pub fn codim_by_stratification(f: &Tensor) -> Result<StratificationReport> {
    codim_by_stratification_cfg(f, &GroebnerConfig::default())
}

pub fn codim_by_stratification_cfg(
    f: &Tensor,
    cfg: &GroebnerConfig,
) -> Result<StratificationReport> {
    let eta = coefficient_matrix(f)?;
    let rmax = eta.len().min(eta[0].len());
    let per_r: Vec<StratumResult> = (0..=rmax)
        .map(|r| stratum_codim_of_matrix(&eta, r, cfg))
        .collect::<Result<_>>()?;
    let (argmin_r, total_codim) = per_r
        .iter()
        .filter_map(|s| s.closure_codim.map(|c| (s.r, s.r as i64 + c)))
        .min_by_key(|&(r, c)| (c, r))
        .ok_or_else(|| Error::Msg("all strata empty".into()))?;
    let direct = direct_codim_cfg(f, cfg)?;
    Ok(StratificationReport {
        per_r,
        total_codim,
        argmin_r,
        direct_codim: direct,
        agree: total_codim == direct,
    })
}

/// Equality check of the stratified and direct codimension computations.
pub fn verify_codim_formula(f: &Tensor) -> Result<StratificationReport> {
    codim_by_stratification(f)
}
