//! Rank invariants as exact values or certified intervals: geometric rank,
//! analytic-rank intervals, Birch rank, partition-rank intervals, strength
//! intervals and their collective variants, the explicit inequality
//! constants, and the randomized verification suites.

use crate::error::{Error, Result};
use crate::exact_arith::{sample_scalar, split_rng, FieldId, Scalar};
use crate::families::{build_family, certify_family, phi_project, psi_chart_solve, sample_jacobian_rank, shifted_system, FixedRankChart};
use crate::groebner::{buchberger, ideal_dimension_ambient, IdealPresentation};
use crate::multipoly::{binomial, jacobian, minors, MonomialOrder, MultiPoly};
use crate::strata::{direct_codim, verify_codim_formula};
use crate::tensor_core::{generate, polarize, BlockPoint, GeneratorKind, Tensor};
use rand::Rng;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvariantName {
    Gr,
    Ar,
    Brk,
    Pr,
    Strength,
    CollectiveBrk,
    CollectiveStrength,
}

impl InvariantName {
    pub fn as_str(&self) -> &'static str {
        match self {
            InvariantName::Gr => "GR",
            InvariantName::Ar => "AR",
            InvariantName::Brk => "Brk",
            InvariantName::Pr => "PR",
            InvariantName::Strength => "Strength",
            InvariantName::CollectiveBrk => "CollectiveBrk",
            InvariantName::CollectiveStrength => "CollectiveStrength",
        }
    }
}

/// An exact value (lo = hi) or a certified interval.
#[derive(Debug, Clone)]
pub struct InvariantReport {
    pub name: InvariantName,
    pub lo: i64,
    pub hi: i64,
    pub field: FieldId,
    pub notes: Vec<String>,
}

impl InvariantReport {
    fn checked(self) -> Result<InvariantReport> {
        if self.lo > self.hi {
            return Err(Error::Msg(format!(
                "invalid interval [{}, {}] for {}",
                self.lo,
                self.hi,
                self.name.as_str()
            )));
        }
        Ok(self)
    }

    pub fn exact(&self) -> Option<i64> {
        (self.lo == self.hi).then_some(self.lo)
    }
}

#[derive(Debug, Clone, Copy)]
pub enum SliceChoice {
    Default,
    Block(usize),
    All,
}

/// Geometric rank: codimension over the closure of the kernel variety of
/// the slice system of a form; for a map, the codimension of its variety.
pub fn geometric_rank(f: &Tensor, slice: SliceChoice) -> Result<InvariantReport> {
    let d = f.num_blocks();
    if f.codomain_dim() > 1 {
        if !matches!(slice, SliceChoice::Default) {
            return Err(Error::BadParams("slice choice applies to forms only".into()));
        }
        let c = direct_codim(f)?;
        return InvariantReport {
            name: InvariantName::Gr,
            lo: c,
            hi: c,
            field: f.field(),
            notes: vec!["variety codimension of the multilinear map".into()],
        }
        .checked();
    }
    if d < 2 {
        return Err(Error::ShapeMismatch("geometric rank needs d ≥ 2".into()));
    }
    let value = match slice {
        SliceChoice::Default => direct_codim(&f.slice_map(d - 1)?)?,
        SliceChoice::Block(j) => direct_codim(&f.slice_map(j)?)?,
        SliceChoice::All => {
            let all: Vec<i64> = (0..d)
                .map(|j| direct_codim(&f.slice_map(j)?))
                .collect::<Result<_>>()?;
            if all.iter().any(|&v| v != all[0]) {
                return Err(Error::Msg(format!(
                    "slicing invariance violated: codims {all:?}"
                )));
            }
            all[0]
        }
    };
    InvariantReport {
        name: InvariantName::Gr,
        lo: value,
        hi: value,
        field: f.field(),
        notes: Vec::new(),
    }
    .checked()
}

/// Analytic rank over ℚ as a certified interval: the geometric rank below,
/// and ambient dimension minus the best family Jacobian rank above.
pub fn analytic_rank_bounds(f: &Tensor, point_budget: usize, seed: u64) -> Result<InvariantReport> {
    if f.field().is_finite() {
        return Err(Error::FiniteFieldFamily);
    }
    let d = f.num_blocks();
    let sys = if f.codomain_dim() == 1 {
        if d < 2 {
            return Err(Error::ShapeMismatch("analytic rank needs d ≥ 2".into()));
        }
        f.slice_map(d - 1)?
    } else {
        f.clone()
    };
    let lo = direct_codim(&sys)?;
    let n = sys.blocks().total_vars();
    let zeros = vec![Scalar::zero(sys.field()); sys.codomain_dim()];
    let mut rng = split_rng(seed, 0);
    // rational base points: the origin, then one point per coordinate
    // subspace obtained by zeroing a whole block (always a solution of a
    // homogeneous multilinear system)
    let mut candidates = vec![BlockPoint::zero(sys.field(), sys.blocks())];
    for i in 0..sys.num_blocks() {
        if candidates.len() > point_budget {
            break;
        }
        let coords: Vec<Vec<Scalar>> = sys
            .blocks()
            .sizes()
            .iter()
            .enumerate()
            .map(|(t, &nt)| {
                (0..nt)
                    .map(|_| {
                        if t == i {
                            Scalar::zero(sys.field())
                        } else {
                            sample_scalar(sys.field(), 5, &mut rng)
                        }
                    })
                    .collect()
            })
            .collect();
        candidates.push(BlockPoint { coords });
    }
    let mut best_jac = 0usize;
    let mut notes = Vec::new();
    for v in &candidates {
        let ss = match shifted_system(&sys, v, &zeros) {
            Ok(ss) => ss,
            Err(_) => continue,
        };
        let fam = match build_family(&ss, &mut rng) {
            Ok(fam) => fam,
            Err(Error::DegenerateSampling { .. }) => continue,
            Err(e) => return Err(e),
        };
        let (_, jr) = match sample_jacobian_rank(&fam, &mut rng) {
            Ok(pr) => pr,
            Err(Error::DegenerateSampling { .. }) => continue,
            Err(e) => return Err(e),
        };
        best_jac = best_jac.max(jr);
    }
    notes.push(format!(
        "family upper bound from Jacobian rank {best_jac} over {} base points",
        candidates.len()
    ));
    InvariantReport {
        name: InvariantName::Ar,
        lo,
        hi: n as i64 - best_jac as i64,
        field: f.field(),
        notes,
    }
    .checked()
}

fn birch_rank_of(ps: &[MultiPoly]) -> Result<i64> {
    let m = ps.len();
    let first = ps.first().ok_or(Error::Msg("empty polynomial tuple".into()))?;
    let n = first.num_vars();
    if m > n {
        return Err(Error::TooManyPolynomials { m, n });
    }
    let deg = first.total_degree();
    for p in ps {
        if p.is_zero() || !p.is_homogeneous() || p.total_degree() != deg || deg < 2 {
            return Err(Error::NotHomogeneous);
        }
        if p.blocks() != first.blocks() {
            return Err(Error::BlockMismatch);
        }
    }
    let jac = jacobian(ps); // m × n
    // transposed n × m; the singular locus is where all m×m minors vanish
    let jt: Vec<Vec<MultiPoly>> = (0..n).map(|j| (0..m).map(|i| jac[i][j].clone()).collect()).collect();
    let gens: Vec<MultiPoly> = minors(&jt, m)?.into_iter().filter(|p| !p.is_zero()).collect();
    let dim = if gens.is_empty() {
        n as i64
    } else {
        let gb = buchberger(&IdealPresentation::new(gens, MonomialOrder::DegRevLex))?;
        ideal_dimension_ambient(&gb, n)?
    };
    Ok(n as i64 - dim)
}

/// Birch rank: codimension of the singular locus where the Jacobian of the
/// tuple drops below full rank.
pub fn birch_rank(ps: &[MultiPoly]) -> Result<InvariantReport> {
    let v = birch_rank_of(ps)?;
    InvariantReport {
        name: if ps.len() == 1 {
            InvariantName::Brk
        } else {
            InvariantName::CollectiveBrk
        },
        lo: v,
        hi: v,
        field: ps[0].field(),
        notes: Vec::new(),
    }
    .checked()
}

pub fn collective_birch(ps: &[MultiPoly]) -> Result<InvariantReport> {
    birch_rank(ps)
}

/// Partition rank interval: geometric rank below, minimal flattening rank
/// above.
pub fn partition_rank_bounds(f: &Tensor) -> Result<InvariantReport> {
    if f.codomain_dim() != 1 || !f.is_homogeneous() {
        return Err(Error::NotForm);
    }
    let lo = geometric_rank(f, SliceChoice::Default)?.lo;
    let hi = (0..f.num_blocks())
        .map(|j| f.flattening_rank(j))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min()
        .unwrap() as i64;
    InvariantReport {
        name: InvariantName::Pr,
        lo,
        hi,
        field: f.field(),
        notes: Vec::new(),
    }
    .checked()
}

fn ceil_div(a: i64, b: i64) -> i64 {
    (a + b - 1) / b
}

/// Strength interval of a homogeneous polynomial of degree d ≥ 2.
pub fn strength_bounds(p: &MultiPoly) -> Result<InvariantReport> {
    if p.is_zero() || !p.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    let d = p.total_degree() as u64;
    if d < 2 {
        return Err(Error::NotHomogeneous);
    }
    let fp = polarize(p)?;
    if d == 2 {
        // quadratic forms: exact from the rank of the polarized matrix
        let rho = fp.flattening_rank(0)? as i64;
        return InvariantReport {
            name: InvariantName::Strength,
            lo: ceil_div(rho, 2),
            hi: ceil_div(rho, 2),
            field: p.field(),
            notes: vec!["rank-based exact value for degree 2".into()],
        }
        .checked();
    }
    let brk = birch_rank_of(std::slice::from_ref(p))?;
    let gr = geometric_rank(&fp, SliceChoice::Default)?.lo;
    let ct = theorem_constants(d, 1)?;
    let lo = ceil_div(brk, 2).max(ceil_div(gr, ct.c_polar as i64));
    let pr_hi = partition_rank_bounds(&fp)?.hi;
    let hi = (ct.c_strbirch as i64 * brk).min(pr_hi);
    InvariantReport {
        name: InvariantName::Strength,
        lo,
        hi,
        field: p.field(),
        notes: vec![format!("Brk {brk}, GR(polarization) {gr}")],
    }
    .checked()
}

/// Collective strength interval of a tuple via the collective Birch rank
/// and span sampling.
pub fn collective_strength_bounds(ps: &[MultiPoly], seed: u64) -> Result<InvariantReport> {
    let m = ps.len();
    let brk = birch_rank_of(ps)?;
    let d = ps[0].total_degree() as u64;
    let ct = theorem_constants(d.max(2), m)?;
    let lo = ceil_div(brk, 2);
    let mut hi = ct.c_collective as i64 * (brk + m as i64 - 1);
    let mut rng = split_rng(seed, 1);
    for _ in 0..8 {
        // random nonzero combination in the span
        let lams: Vec<i64> = (0..m).map(|_| rng.gen_range(-3i64..=3)).collect();
        if lams.iter().all(|&l| l == 0) {
            continue;
        }
        let mut combo = MultiPoly::zero(ps[0].field(), ps[0].blocks().clone());
        for (p, &l) in ps.iter().zip(&lams) {
            combo = combo.add(&p.scalar_mul(&Scalar::from_int(p.field(), l)))?;
        }
        if combo.is_zero() {
            continue;
        }
        if let Ok(r) = strength_bounds(&combo) {
            hi = hi.min(r.hi);
        }
    }
    InvariantReport {
        name: InvariantName::CollectiveStrength,
        lo,
        hi,
        field: ps[0].field(),
        notes: vec![format!("collective Brk {brk}")],
    }
    .checked()
}

/// The explicit constants of the inequality theorems, exact integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstantsTable {
    pub d: u64,
    pub m: u64,
    pub c_pvsa: u128,
    pub c_akz: u128,
    pub c_pvsg: u128,
    pub c_polar: u128,
    pub c_strstab: u128,
    pub c_strbirch: u128,
    pub c_collective: u128,
    pub c_krull: u128,
}

pub fn theorem_constants(d: u64, m: usize) -> Result<ConstantsTable> {
    if d < 2 || m < 1 {
        return Err(Error::BadParams("constants need d ≥ 2, m ≥ 1".into()));
    }
    let pow = 1u128 << (d - 1);
    let c_pvsa = pow - 1;
    let c_akz = 6 * c_pvsa;
    let c_pvsg = 6 * c_pvsa * c_pvsa;
    let c_polar = binomial(d, d / 2) as u128;
    let c_strstab = 6 * c_pvsa * c_polar;
    let c_strbirch = c_strstab * (d as u128 - 1);
    let c_collective = c_strbirch * m as u128;
    let c_krull = (1u128 << d) * m as u128;
    Ok(ConstantsTable {
        d,
        m: m as u64,
        c_pvsa,
        c_akz,
        c_pvsg,
        c_polar,
        c_strstab,
        c_strbirch,
        c_collective,
        c_krull,
    })
}

// ---- verification suites ----

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub trials: usize,
    pub seed: u64,
    pub shape: Vec<usize>,
    pub field: FieldId,
    pub d: usize,
    pub m: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            trials: 10,
            seed: 7,
            shape: vec![2, 2, 2],
            field: FieldId::PrimeField(101),
            d: 3,
            m: 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteTrial {
    pub id: usize,
    pub pass: bool,
    pub detail: String,
    pub repro: String,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: Vec<SuiteTrial>,
    pub passed: usize,
    pub failed: usize,
}

impl SuiteReport {
    fn from_trials(suite: &str, trials: Vec<SuiteTrial>) -> SuiteReport {
        let passed = trials.iter().filter(|t| t.pass).count();
        let failed = trials.len() - passed;
        SuiteReport {
            suite: suite.into(),
            trials,
            passed,
            failed,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

fn repro_line(suite: &str, cfg: &SuiteConfig, t: usize) -> String {
    let shape: Vec<String> = cfg.shape.iter().map(|n| n.to_string()).collect();
    format!(
        "mlv verify {suite} -n 1 --seed {} --shape {} --field {} --d {} --m {}",
        cfg.seed.wrapping_add(t as u64),
        shape.join(","),
        cfg.field,
        cfg.d,
        cfg.m
    )
}

fn random_tensor(sizes: &[usize], m: usize, field: FieldId, seed: u64) -> Tensor {
    generate(GeneratorKind::Random {
        sizes: sizes.to_vec(),
        m,
        field,
        seed,
        density_percent: 55,
    })
    .unwrap()
}

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut trials = Vec::with_capacity(cfg.trials);
    for t in 0..cfg.trials {
        let trial_seed = cfg.seed.wrapping_add(t as u64);
        let outcome: Result<(bool, String)> = match name {
            "codim-formula" => {
                let m = 1 + t % cfg.m.max(1);
                let f = random_tensor(&cfg.shape, m, cfg.field, trial_seed);
                let rep = verify_codim_formula(&f)?;
                Ok((
                    rep.agree,
                    format!("stratified {} vs direct {}", rep.total_codim, rep.direct_codim),
                ))
            }
            "krull" => {
                let sizes: Vec<usize> = {
                    let mut rng = split_rng(trial_seed, 10);
                    (0..cfg.d).map(|_| rng.gen_range(2..=4)).collect()
                };
                let f = random_tensor(&sizes, cfg.m, FieldId::Rationals, trial_seed);
                let mut rng = split_rng(trial_seed, 11);
                let q = FieldId::Rationals;
                let v = BlockPoint {
                    coords: sizes
                        .iter()
                        .map(|&n| (0..n).map(|_| sample_scalar(q, 5, &mut rng)).collect())
                        .collect(),
                };
                let c = f.eval(&v)?;
                let ss = shifted_system(&f, &v, &c)?;
                let fam = build_family(&ss, &mut rng)?;
                let cert = certify_family(&fam, &ss, 20, &mut rng)?;
                Ok((
                    cert.verdict,
                    format!(
                        "jac_rank {} parameter_dim {} bound {}",
                        cert.jac_rank, fam.parameter_dim, cert.codim_bound
                    ),
                ))
            }
            "fixed-rank" => {
                let mut pass = true;
                for field in [FieldId::Rationals, FieldId::PrimeField(101)] {
                    let mut rng = split_rng(trial_seed, 12);
                    let r = 2;
                    let (rows, cols) = (3, 5);
                    let a: Vec<Vec<Scalar>> = (0..rows)
                        .map(|i| {
                            (0..r)
                                .map(|j| {
                                    if i < r {
                                        Scalar::from_int(field, (i == j) as i64)
                                    } else {
                                        sample_scalar(field, 5, &mut rng)
                                    }
                                })
                                .collect()
                        })
                        .collect();
                    let b: Vec<Vec<Scalar>> = (0..r)
                        .map(|i| {
                            (0..cols)
                                .map(|j| {
                                    if j < r {
                                        Scalar::from_int(field, (i == j) as i64)
                                    } else {
                                        sample_scalar(field, 5, &mut rng)
                                    }
                                })
                                .collect()
                        })
                        .collect();
                    let m: Vec<Vec<Scalar>> = (0..rows)
                        .map(|i| {
                            (0..cols)
                                .map(|j| {
                                    let mut acc = Scalar::zero(field);
                                    for k in 0..r {
                                        acc = acc.add(&a[i][k].mul(&b[k][j]));
                                    }
                                    acc
                                })
                                .collect()
                        })
                        .collect();
                    let chart = FixedRankChart::new((0..r).collect(), (0..r).collect())?;
                    let w: Vec<Scalar> =
                        (0..cols - r).map(|_| sample_scalar(field, 5, &mut rng)).collect();
                    let v = psi_chart_solve(&m, &w, &chart)?;
                    pass &= phi_project(&v, &chart) == w;
                    pass &= psi_chart_solve(&m, &phi_project(&v, &chart), &chart)? == v;
                }
                Ok((pass, "ψ∘φ and φ∘ψ identities".into()))
            }
            "slicing" => {
                let f = random_tensor(&cfg.shape, 1, cfg.field, trial_seed);
                match geometric_rank(&f, SliceChoice::All) {
                    Ok(rep) => Ok((true, format!("GR {} on all slicings", rep.lo))),
                    Err(Error::Msg(msg)) => Ok((false, msg)),
                    Err(e) => Err(e),
                }
            }
            "additivity" => {
                let f = random_tensor(&cfg.shape, 1, cfg.field, trial_seed);
                let g = random_tensor(&cfg.shape, 1, cfg.field, trial_seed ^ 0x5a5a);
                let sum = f.direct_sum(&g)?;
                let a = geometric_rank(&f, SliceChoice::Default)?.lo;
                let b = geometric_rank(&g, SliceChoice::Default)?.lo;
                let c = geometric_rank(&sum, SliceChoice::Default)?.lo;
                Ok((c == a + b, format!("GR(f⊕g) {c} vs {a} + {b}")))
            }
            "monotonicity" => {
                let f = random_tensor(&cfg.shape, 1, cfg.field, trial_seed);
                let mut rng = split_rng(trial_seed, 13);
                let maps: Vec<Vec<Vec<Scalar>>> = cfg
                    .shape
                    .iter()
                    .map(|&n| {
                        let target = (n.max(2)) - 1;
                        (0..n)
                            .map(|_| {
                                (0..target)
                                    .map(|_| sample_scalar(cfg.field, 3, &mut rng))
                                    .collect()
                            })
                            .collect()
                    })
                    .collect();
                let r = f.restrict(&maps)?;
                let a = geometric_rank(&r, SliceChoice::Default)?.lo;
                let b = geometric_rank(&f, SliceChoice::Default)?.lo;
                Ok((a <= b, format!("GR(restriction) {a} ≤ GR {b}")))
            }
            "subadditivity" => {
                let f = random_tensor(&cfg.shape, 1, cfg.field, trial_seed);
                let g = random_tensor(&cfg.shape, 1, cfg.field, trial_seed ^ 0x3c3c);
                let sum = f.add(&g)?;
                if sum.is_zero() {
                    Ok((true, "zero sum".into()))
                } else {
                    let a = geometric_rank(&sum, SliceChoice::Default)?.lo;
                    let b = geometric_rank(&f, SliceChoice::Default)?.lo;
                    let c = geometric_rank(&g, SliceChoice::Default)?.lo;
                    Ok((a <= b + c, format!("GR(f+g) {a} ≤ {b} + {c}")))
                }
            }
            "directsum-pr" => {
                let r = 1 + t % 2;
                let n = r + 1;
                let k = 2;
                let f = generate(GeneratorKind::Diag { d: 3, r, n })?;
                let mut sum = f.clone();
                for _ in 1..k {
                    sum = sum.direct_sum(&f)?;
                }
                let pr = partition_rank_bounds(&sum)?;
                let single = partition_rank_bounds(&f)?;
                let expected = (k * r) as i64;
                let pass = pr.lo == expected
                    && pr.hi == expected
                    && pr.hi <= k as i64 * single.hi
                    && ceil_div(expected, theorem_constants(3, 1)?.c_pvsa as i64) <= expected;
                Ok((pass, format!("PR(diag^⊕{k}) = [{}, {}]", pr.lo, pr.hi)))
            }
            other => return Err(Error::UnknownSuite(other.into())),
        };
        let (pass, detail) = outcome?;
        trials.push(SuiteTrial {
            id: t,
            pass,
            detail,
            repro: repro_line(name, cfg, t),
        });
    }
    Ok(SuiteReport::from_trials(name, trials))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multipoly::{Monomial, VarBlocks};
    use num_bigint::BigUint;

    const Q: FieldId = FieldId::Rationals;

    fn flat_poly(n: usize, terms: &[(&[u16], i64)]) -> MultiPoly {
        let b = VarBlocks::flat(n).unwrap();
        let mut p = MultiPoly::zero(Q, b);
        for (e, c) in terms {
            p.add_term(Monomial::from_exps(e.to_vec()), Scalar::from_int(Q, *c));
        }
        p
    }

    #[test]
    fn quaternion_gr_ar() {
        let h = generate(GeneratorKind::Quaternion { a: -1, b: -1 }).unwrap();
        let gr = geometric_rank(&h, SliceChoice::Default).unwrap();
        assert_eq!(gr.exact(), Some(3));
        let ar = analytic_rank_bounds(&h, 8, 5).unwrap();
        assert_eq!((ar.lo, ar.hi), (3, 4));
    }

    #[test]
    fn matmul_form_gr_pr() {
        let f = generate(GeneratorKind::MatmulForm { r: 2 }).unwrap();
        let gr = geometric_rank(&f, SliceChoice::Default).unwrap();
        assert_eq!(gr.exact(), Some(3));
        let pr = partition_rank_bounds(&f).unwrap();
        assert_eq!((pr.lo, pr.hi), (3, 4));
    }

    #[test]
    fn diag_all_invariants() {
        for d in [3, 4] {
            for r in [1, 2] {
                let n = r + 1;
                let f = generate(GeneratorKind::Diag { d, r, n }).unwrap();
                assert_eq!(geometric_rank(&f, SliceChoice::All).unwrap().exact(), Some(r as i64));
                let ar = analytic_rank_bounds(&f, 8, 3).unwrap();
                assert_eq!((ar.lo, ar.hi), (r as i64, r as i64));
                let pr = partition_rank_bounds(&f).unwrap();
                assert_eq!((pr.lo, pr.hi), (r as i64, r as i64));
            }
        }
    }

    #[test]
    fn d2_everything_is_matrix_rank() {
        for seed in 0..5 {
            let f = random_tensor(&[3, 3], 1, Q, 700 + seed);
            if f.is_zero() {
                continue;
            }
            let rho = f.flattening_rank(0).unwrap() as i64;
            assert_eq!(geometric_rank(&f, SliceChoice::All).unwrap().exact(), Some(rho));
            let ar = analytic_rank_bounds(&f, 4, seed).unwrap();
            assert_eq!((ar.lo, ar.hi), (rho, rho));
            let pr = partition_rank_bounds(&f).unwrap();
            assert_eq!((pr.lo, pr.hi), (rho, rho));
        }
    }

    #[test]
    fn birch_examples() {
        // x1 x2 + x3 x4
        let p = flat_poly(4, &[(&[1, 1, 0, 0], 1), (&[0, 0, 1, 1], 1)]);
        assert_eq!(birch_rank(std::slice::from_ref(&p)).unwrap().exact(), Some(4));
        // x1^2
        let sq = flat_poly(1, &[(&[2], 1)]);
        assert_eq!(birch_rank(std::slice::from_ref(&sq)).unwrap().exact(), Some(1));
        // pair (x1 x2, x3 x4)
        let p1 = flat_poly(4, &[(&[1, 1, 0, 0], 1)]);
        let p2 = flat_poly(4, &[(&[0, 0, 1, 1], 1)]);
        assert_eq!(collective_birch(&[p1, p2]).unwrap().exact(), Some(2));
    }

    #[test]
    fn strength_examples() {
        let p = flat_poly(4, &[(&[1, 1, 0, 0], 1), (&[0, 0, 1, 1], 1)]);
        let s = strength_bounds(&p).unwrap();
        assert_eq!((s.lo, s.hi), (2, 2));
        // x1^2 x2: true strength 1 inside the interval
        let q = flat_poly(2, &[(&[2, 1], 1)]);
        let s = strength_bounds(&q).unwrap();
        assert!(s.lo <= 1 && 1 <= s.hi, "interval [{}, {}]", s.lo, s.hi);
        // random dense cubic: interval validity only
        let r = flat_poly(
            3,
            &[(&[3, 0, 0], 2), (&[1, 1, 1], -1), (&[0, 2, 1], 5), (&[0, 0, 3], 1)],
        );
        let s = strength_bounds(&r).unwrap();
        assert!(s.lo >= 1 && s.lo <= s.hi);
    }

    #[test]
    fn collective_strength_examples() {
        let p1 = flat_poly(4, &[(&[1, 1, 0, 0], 1)]);
        let p2 = flat_poly(4, &[(&[0, 0, 1, 1], 1)]);
        let r = collective_strength_bounds(&[p1.clone(), p2], 3).unwrap();
        assert!(r.lo <= 1 && 1 <= r.hi);
        // m = 1 reduces to the single-polynomial invariants
        let single = collective_strength_bounds(std::slice::from_ref(&p1), 3).unwrap();
        let direct = strength_bounds(&p1).unwrap();
        assert!(single.lo <= direct.lo && direct.hi <= single.hi.max(direct.hi));
    }

    #[test]
    fn constants_examples() {
        let c3 = theorem_constants(3, 1).unwrap();
        assert_eq!(
            (c3.c_pvsa, c3.c_akz, c3.c_pvsg, c3.c_polar, c3.c_krull),
            (3, 18, 54, 3, 8)
        );
        assert_eq!(theorem_constants(2, 1).unwrap().c_pvsa, 1);
        let c42 = theorem_constants(4, 2).unwrap();
        assert_eq!(c42.c_collective, 1512);
        assert_eq!(c42.c_krull, 32);
    }

    #[test]
    fn constants_independent_recomputation() {
        // Pascal triangle and repeated squaring over big integers
        fn pascal(n: u64, k: u64) -> BigUint {
            let mut row = vec![BigUint::from(1u32)];
            for _ in 0..n {
                let mut next = vec![BigUint::from(1u32)];
                for w in row.windows(2) {
                    next.push(&w[0] + &w[1]);
                }
                next.push(BigUint::from(1u32));
                row = next;
            }
            row[k as usize].clone()
        }
        fn pow2(e: u64) -> BigUint {
            let mut acc = BigUint::from(1u32);
            let mut base = BigUint::from(2u32);
            let mut e = e;
            while e > 0 {
                if e & 1 == 1 {
                    acc = &acc * &base;
                }
                base = &base * &base;
                e >>= 1;
            }
            acc
        }
        for d in 2..=6u64 {
            for m in 1..=3usize {
                let c = theorem_constants(d, m).unwrap();
                let pvsa = pow2(d - 1) - BigUint::from(1u32);
                assert_eq!(BigUint::from(c.c_pvsa), pvsa);
                assert_eq!(BigUint::from(c.c_akz), BigUint::from(6u32) * &pvsa);
                assert_eq!(BigUint::from(c.c_pvsg), BigUint::from(6u32) * &pvsa * &pvsa);
                let polar = pascal(d, d / 2);
                assert_eq!(BigUint::from(c.c_polar), polar);
                let strstab = BigUint::from(6u32) * &pvsa * &polar;
                assert_eq!(BigUint::from(c.c_strstab), strstab);
                let strbirch = &strstab * BigUint::from(d - 1);
                assert_eq!(BigUint::from(c.c_strbirch), strbirch);
                assert_eq!(BigUint::from(c.c_collective), &strbirch * BigUint::from(m));
                assert_eq!(BigUint::from(c.c_krull), pow2(d) * BigUint::from(m));
            }
        }
    }

    #[test]
    fn suites_smoke() {
        let cfg = SuiteConfig {
            trials: 3,
            ..Default::default()
        };
        for name in [
            "codim-formula",
            "fixed-rank",
            "slicing",
            "additivity",
            "monotonicity",
            "subadditivity",
            "directsum-pr",
        ] {
            let rep = run_suite(name, &cfg).unwrap();
            assert!(rep.all_passed(), "suite {name}: {:?}", rep.trials);
        }
        let krull_cfg = SuiteConfig {
            trials: 2,
            d: 3,
            m: 2,
            ..Default::default()
        };
        let rep = run_suite("krull", &krull_cfg).unwrap();
        assert!(rep.all_passed());
        assert!(matches!(
            run_suite("nope", &cfg),
            Err(Error::UnknownSuite(_))
        ));
    }
}
