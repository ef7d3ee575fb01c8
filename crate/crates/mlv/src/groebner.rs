//! Buchberger Gröbner engine: reduced bases, normal forms, ideal triviality,
//! Krull dimension, and saturation by a polynomial.
//!
//! Pair selection is the normal strategy: minimal lcm total degree, ties
//! broken by pair index. The coprimality and chain criteria prune pairs.
//! Output is deterministic for fixed input.

use crate::error::{Error, Result};
use crate::exact_arith::{FieldId, Scalar};
use crate::multipoly::{Monomial, MonomialOrder, MultiPoly, VarBlocks};
use std::cmp::Ordering;
use std::sync::atomic::AtomicU64;

/// Generators of an ideal together with the order the engine will use.
///
/// The engine computes with ⟨generators⟩ itself, never with the full
/// vanishing ideal of the rational points.
#[derive(Debug, Clone)]
pub struct IdealPresentation {
    pub generators: Vec<MultiPoly>,
    pub order: MonomialOrder,
}

impl IdealPresentation {
    pub fn new(generators: Vec<MultiPoly>, order: MonomialOrder) -> IdealPresentation {
        let generators = generators.into_iter().filter(|g| !g.is_zero()).collect();
        IdealPresentation { generators, order }
    }
}

#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    pub basis: Vec<MultiPoly>,
    pub order: MonomialOrder,
    pub reduced: bool,
}

/// Resource budgets; exceeding one aborts with `ResourceLimit` rather than
/// silently truncating.
#[derive(Debug, Clone, Copy)]
pub struct GroebnerConfig {
    pub step_budget: u64,
    pub coeff_bit_budget: u64,
    pub trace: bool,
}

impl Default for GroebnerConfig {
    fn default() -> Self {
        GroebnerConfig {
            step_budget: match DEFAULT_STEP_BUDGET.load(std::sync::atomic::Ordering::Relaxed) {
                0 => 2_000_000,
                b => b,
            },
            coeff_bit_budget: 10_000,
            trace: false,
        }
    }
}

static DEFAULT_STEP_BUDGET: AtomicU64 = AtomicU64::new(0);

/// Process-wide override of the default step budget (0 restores the
/// built-in value); lets front ends honor a budget flag everywhere without
/// threading a config through every call.
pub fn set_default_step_budget(budget: u64) {
    DEFAULT_STEP_BUDGET.store(budget, std::sync::atomic::Ordering::Relaxed);
}

// ---- internal order-sorted polynomial ----

#[derive(Debug, Clone)]
struct OPoly {
    terms: Vec<(Monomial, Scalar)>, // descending under the active order
}

impl OPoly {
    fn from_multipoly(p: &MultiPoly, order: MonomialOrder) -> OPoly {
        let mut terms: Vec<(Monomial, Scalar)> =
            p.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
        terms.sort_by(|(a, _), (b, _)| order.cmp(b, a));
        OPoly { terms }
    }

    fn to_multipoly(&self, field: FieldId, blocks: &VarBlocks) -> MultiPoly {
        MultiPoly::from_terms(field, blocks.clone(), self.terms.clone())
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn lt(&self) -> &(Monomial, Scalar) {
        &self.terms[0]
    }

    fn make_monic(&mut self) {
        if self.is_zero() || self.terms[0].1.is_one() {
            return;
        }
        let inv = self.terms[0].1.invert().unwrap();
        for (_, c) in &mut self.terms {
            *c = c.mul(&inv);
        }
    }

    /// self -= (mono * coef) * g, merging sorted term lists.
    fn sub_mul_term(&self, g: &OPoly, mono: &Monomial, coef: &Scalar, order: MonomialOrder) -> OPoly {
        let mut out = Vec::with_capacity(self.terms.len() + g.terms.len());
        let mut i = 0;
        let mut j = 0;
        while i < self.terms.len() && j < g.terms.len() {
            let gm = g.terms[j].0.mul(mono);
            match order.cmp(&self.terms[i].0, &gm) {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = g.terms[j].1.mul(coef).neg();
                    out.push((gm, c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = self.terms[i].1.sub(&g.terms[j].1.mul(coef));
                    if !c.is_zero() {
                        out.push((gm, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        for (gm, gc) in &g.terms[j..] {
            out.push((gm.mul(mono), gc.mul(coef).neg()));
        }
        OPoly { terms: out }
    }
}

fn coeff_bits(c: &Scalar) -> u64 {
    match c {
        Scalar::Rat(q) => (q.numer().bits() + q.denom().bits()) as u64,
        Scalar::Mod { .. } => 64,
    }
}

struct Engine {
    field: FieldId,
    order: MonomialOrder,
    cfg: GroebnerConfig,
    steps: u64,
}

impl Engine {
    fn charge(&mut self, n: u64) -> Result<()> {
        self.steps += n;
        if self.steps > self.cfg.step_budget {
            return Err(Error::ResourceLimit(format!(
                "reduction step budget {} exceeded",
                self.cfg.step_budget
            )));
        }
        Ok(())
    }

    fn check_bits(&self, p: &OPoly) -> Result<()> {
        if self.field == FieldId::Rationals {
            for (_, c) in &p.terms {
                if coeff_bits(c) > self.cfg.coeff_bit_budget {
                    return Err(Error::ResourceLimit(format!(
                        "coefficient bit budget {} exceeded",
                        self.cfg.coeff_bit_budget
                    )));
                }
            }
        }
        Ok(())
    }

    /// Full multivariate division: remainder of p modulo basis.
    fn normal_form(&mut self, p: OPoly, basis: &[OPoly]) -> Result<OPoly> {
        let mut work = p;
        let mut rem: Vec<(Monomial, Scalar)> = Vec::new();
        'outer: while !work.is_zero() {
            let (m, c) = work.lt().clone();
            for g in basis {
                let (gm, gc) = g.lt();
                if gm.divides(&m) {
                    let qm = gm.div_into(&m);
                    let qc = c.mul(&gc.invert().unwrap());
                    work = work.sub_mul_term(g, &qm, &qc, self.order);
                    self.charge(1)?;
                    continue 'outer;
                }
            }
            rem.push((m, c));
            work.terms.remove(0);
        }
        Ok(OPoly { terms: rem })
    }

    fn spoly(&self, f: &OPoly, g: &OPoly) -> OPoly {
        let (fm, fc) = f.lt();
        let (gm, gc) = g.lt();
        let l = fm.lcm(gm);
        // lcm/LT(f) * f / lc(f) - lcm/LT(g) * g / lc(g)
        let mut lhs = OPoly { terms: Vec::with_capacity(f.terms.len()) };
        let fm_q = fm.div_into(&l);
        let fc_inv = fc.invert().unwrap();
        for (m, c) in &f.terms {
            lhs.terms.push((m.mul(&fm_q), c.mul(&fc_inv)));
        }
        let gm_q = gm.div_into(&l);
        let gc_inv = gc.invert().unwrap();
        lhs.sub_mul_term(g, &gm_q, &gc_inv, self.order)
    }

    fn buchberger(&mut self, gens: &[MultiPoly]) -> Result<Vec<OPoly>> {
        let mut basis: Vec<OPoly> = Vec::new();
        for g in gens {
            if g.is_zero() {
                continue;
            }
            let mut p = OPoly::from_multipoly(g, self.order);
            p.make_monic();
            basis.push(p);
        }
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for i in 0..basis.len() {
            for j in 0..i {
                pairs.push((j, i));
            }
        }
        let mut done: Vec<(usize, usize)> = Vec::new();
        let mut pair_idx = 0u64;
        while !pairs.is_empty() {
            // normal strategy: minimal lcm degree, then pair order
            let sel = pairs
                .iter()
                .enumerate()
                .min_by_key(|(k, &(i, j))| {
                    let l = basis[i].lt().0.lcm(&basis[j].lt().0);
                    (l.total_degree(), i, j, *k)
                })
                .map(|(k, _)| k)
                .unwrap();
            let (i, j) = pairs.swap_remove(sel);
            pair_idx += 1;
            self.charge(1)?;
            done.push((i, j));
            let (lti, _) = basis[i].lt();
            let (ltj, _) = basis[j].lt();
            let l = lti.lcm(ltj);
            // coprimality criterion
            if l == lti.mul(ltj) {
                if self.cfg.trace {
                    eprintln!("pair {pair_idx} ({i},{j}): skipped (coprime)");
                }
                continue;
            }
            // chain criterion
            let chained = (0..basis.len()).any(|k| {
                k != i
                    && k != j
                    && basis[k].lt().0.divides(&l)
                    && done.contains(&(i.min(k), i.max(k)))
                    && done.contains(&(j.min(k), j.max(k)))
            });
            if chained {
                if self.cfg.trace {
                    eprintln!("pair {pair_idx} ({i},{j}): skipped (chain)");
                }
                continue;
            }
            let s = self.spoly(&basis[i], &basis[j]);
            let mut r = self.normal_form(s, &basis)?;
            if self.cfg.trace {
                eprintln!(
                    "pair {pair_idx} ({i},{j}): {}",
                    if r.is_zero() { "reduced to 0" } else { "new element" }
                );
            }
            if r.is_zero() {
                continue;
            }
            r.make_monic();
            self.check_bits(&r)?;
            let new_idx = basis.len();
            basis.push(r);
            for k in 0..new_idx {
                pairs.push((k, new_idx));
            }
        }
        self.interreduce(basis)
    }

    /// Minimalize then fully reduce; deterministic output order (ascending
    /// leading monomial).
    fn interreduce(&mut self, mut basis: Vec<OPoly>) -> Result<Vec<OPoly>> {
        // minimal basis: drop elements whose LT is divisible by another LT
        let mut keep = vec![true; basis.len()];
        for i in 0..basis.len() {
            if !keep[i] {
                continue;
            }
            for j in 0..basis.len() {
                if i != j
                    && keep[j]
                    && basis[j].lt().0.divides(&basis[i].lt().0)
                    && (basis[j].lt().0 != basis[i].lt().0 || j < i)
                {
                    keep[i] = false;
                    break;
                }
            }
        }
        let minimal: Vec<OPoly> = basis
            .drain(..)
            .zip(keep)
            .filter_map(|(p, k)| k.then_some(p))
            .collect();
        // full tail reduction of each element modulo the others
        let mut reduced = Vec::with_capacity(minimal.len());
        for i in 0..minimal.len() {
            let others: Vec<OPoly> = minimal
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, p)| p.clone())
                .collect();
            let mut r = self.normal_form(minimal[i].clone(), &others)?;
            if !r.is_zero() {
                r.make_monic();
                reduced.push(r);
            }
        }
        reduced.sort_by(|a, b| self.order.cmp(&a.lt().0, &b.lt().0));
        Ok(reduced)
    }
}

fn ring_of(gens: &[MultiPoly]) -> Result<(FieldId, VarBlocks)> {
    let first = gens.first().ok_or(Error::Msg("empty generator list".into()))?;
    for g in gens {
        if g.field() != first.field() {
            return Err(Error::FieldMismatch(
                g.field().to_string(),
                first.field().to_string(),
            ));
        }
        if g.blocks() != first.blocks() {
            return Err(Error::BlockMismatch);
        }
    }
    Ok((first.field(), first.blocks().clone()))
}

pub fn buchberger(ideal: &IdealPresentation) -> Result<GroebnerBasis> {
    buchberger_cfg(ideal, &GroebnerConfig::default())
}

pub fn buchberger_cfg(ideal: &IdealPresentation, cfg: &GroebnerConfig) -> Result<GroebnerBasis> {
    if ideal.generators.is_empty() {
        // zero ideal
        return Ok(GroebnerBasis {
            basis: Vec::new(),
            order: ideal.order,
            reduced: true,
        });
    }
    let (field, blocks) = ring_of(&ideal.generators)?;
    let mut eng = Engine {
        field,
        order: ideal.order,
        cfg: *cfg,
        steps: 0,
    };
    let basis = eng.buchberger(&ideal.generators)?;
    Ok(GroebnerBasis {
        basis: basis
            .iter()
            .map(|p| p.to_multipoly(field, &blocks))
            .collect(),
        order: ideal.order,
        reduced: true,
    })
}

/// Remainder of p under multivariate division by G; zero iff p ∈ ⟨G⟩.
pub fn normal_form(p: &MultiPoly, g: &GroebnerBasis) -> Result<MultiPoly> {
    if g.basis.is_empty() {
        return Ok(p.clone());
    }
    let (field, blocks) = ring_of(&g.basis)?;
    let mut eng = Engine {
        field,
        order: g.order,
        cfg: GroebnerConfig::default(),
        steps: 0,
    };
    let basis: Vec<OPoly> = g
        .basis
        .iter()
        .map(|b| OPoly::from_multipoly(b, g.order))
        .collect();
    let r = eng.normal_form(OPoly::from_multipoly(p, g.order), &basis)?;
    Ok(r.to_multipoly(field, &blocks))
}

/// True iff 1 ∈ ⟨G⟩ for a Gröbner basis G.
pub fn is_trivial_ideal(g: &GroebnerBasis) -> bool {
    g.basis
        .iter()
        .any(|p| !p.is_zero() && p.total_degree() == 0)
}

/// Krull dimension of 𝕂[x]/⟨G⟩ from the degrevlex leading monomials:
/// the largest variable subset S such that no leading monomial lies in the
/// subring generated by S. Returns −1 for the unit ideal.
pub fn ideal_dimension(g: &GroebnerBasis) -> Result<i64> {
    if g.order != MonomialOrder::DegRevLex {
        return Err(Error::WrongOrder);
    }
    if is_trivial_ideal(g) {
        return Ok(-1);
    }
    let n = match g.basis.first() {
        None => return Err(Error::Msg("dimension of the zero ideal needs the ambient ring".into())),
        Some(p) => p.num_vars(),
    };
    let supports: Vec<u64> = leading_supports(g)?;
    Ok(n as i64 - min_hitting_set(&supports) as i64)
}

/// Dimension helper that also covers the zero ideal (empty basis) given the
/// ambient variable count.
pub fn ideal_dimension_ambient(g: &GroebnerBasis, nvars: usize) -> Result<i64> {
    if g.basis.is_empty() {
        return Ok(nvars as i64);
    }
    ideal_dimension(g)
}

fn leading_supports(g: &GroebnerBasis) -> Result<Vec<u64>> {
    let mut supports: Vec<u64> = Vec::new();
    for p in &g.basis {
        let (m, _) = p.leading_term(g.order)?;
        let s = m.support_mask();
        supports.push(s);
    }
    supports.sort();
    supports.dedup();
    // keep only minimal supports
    let minimal: Vec<u64> = supports
        .iter()
        .filter(|&&s| !supports.iter().any(|&t| t != s && t & s == t))
        .copied()
        .collect();
    Ok(minimal)
}

/// Minimum number of variables hitting every support set; branch and bound.
fn min_hitting_set(supports: &[u64]) -> u32 {
    fn go(supports: &[u64], hit: u64, depth: u32, best: &mut u32) {
        if depth >= *best {
            return;
        }
        let Some(&s) = supports.iter().find(|&&s| s & hit == 0) else {
            *best = depth;
            return;
        };
        let mut m = s;
        while m != 0 {
            let v = m & m.wrapping_neg();
            m ^= v;
            go(supports, hit | v, depth + 1, best);
        }
    }
    let mut best = supports.len() as u32 + 1;
    // order supports by popcount so the branch factor starts small
    let mut ss: Vec<u64> = supports.to_vec();
    ss.sort_by_key(|s| s.count_ones());
    go(&ss, 0, 0, &mut best);
    best
}

/// Saturation I : g^∞ by adjoining a fresh variable t with t·g − 1 and
/// eliminating t under a block elimination order. The result presents the
/// closure of V(I) \ V(g) over the algebraic closure.
pub fn saturate(ideal: &IdealPresentation, g: &MultiPoly) -> Result<IdealPresentation> {
    saturate_cfg(ideal, g, &GroebnerConfig::default())
}

pub fn saturate_cfg(
    ideal: &IdealPresentation,
    g: &MultiPoly,
    cfg: &GroebnerConfig,
) -> Result<IdealPresentation> {
    if g.is_zero() {
        return Err(Error::Msg("saturation by the zero polynomial".into()));
    }
    let field = g.field();
    let blocks = g.blocks().clone();
    // extended ring: t is variable 0 in its own leading block
    let mut sizes = vec![1usize];
    sizes.extend_from_slice(blocks.sizes());
    let ext_blocks = VarBlocks::new(sizes)?;
    let lift = |p: &MultiPoly| -> MultiPoly {
        let terms = p
            .terms()
            .map(|(m, c)| {
                let mut exps = vec![0u16];
                exps.extend_from_slice(m.exps());
                (Monomial::from_exps(exps), c.clone())
            })
            .collect();
        MultiPoly::from_terms(field, ext_blocks.clone(), terms)
    };
    let mut gens: Vec<MultiPoly> = ideal.generators.iter().map(&lift).collect();
    // t*g - 1
    let t = MultiPoly::var(field, ext_blocks.clone(), 0);
    let tg1 = t
        .mul(&lift(g))?
        .sub(&MultiPoly::constant(
            field,
            ext_blocks.clone(),
            Scalar::one(field),
        ))?;
    gens.push(tg1);
    let gb = buchberger_cfg(
        &IdealPresentation::new(gens, MonomialOrder::BlockElim(1)),
        cfg,
    )?;
    // drop everything involving t, shift exponents back
    let kept: Vec<MultiPoly> = gb
        .basis
        .iter()
        .filter(|p| p.terms().all(|(m, _)| m.degree_of(0) == 0))
        .map(|p| {
            let terms = p
                .terms()
                .map(|(m, c)| (Monomial::from_exps(m.exps()[1..].to_vec()), c.clone()))
                .collect();
            MultiPoly::from_terms(field, blocks.clone(), terms)
        })
        .collect();
    Ok(IdealPresentation::new(kept, ideal.order))
}
