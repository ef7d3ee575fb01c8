//! Sparse multivariate polynomials with block-structured variables, monomial
//! orders, and matrix-of-polynomials utilities (minors, Jacobians, shifts).
//!
//! Variables are grouped into blocks of sizes (n_1, …, n_d); variable (j, s)
//! is the s-th coordinate of block j (0-based internally). The total variable
//! count is capped at 64 so exponent vectors stay dense and subset searches
//! downstream stay tractable.

use crate::error::{Error, Result};
use crate::exact_arith::{FieldId, Scalar};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

pub const MAX_VARS: usize = 64;

/// Block structure of the variable set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarBlocks {
    sizes: Vec<usize>,
}

impl VarBlocks {
    pub fn new(sizes: Vec<usize>) -> Result<VarBlocks> {
        if sizes.iter().any(|&n| n == 0) {
            return Err(Error::Msg("block sizes must be positive".into()));
        }
        let total: usize = sizes.iter().sum();
        if total > MAX_VARS {
            return Err(Error::TooManyVariables(total));
        }
        Ok(VarBlocks { sizes })
    }

    /// Single flat block of n variables.
    pub fn flat(n: usize) -> Result<VarBlocks> {
        VarBlocks::new(vec![n])
    }

    pub fn num_blocks(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn total_vars(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Flat index of variable (block, coord), both 0-based.
    pub fn var_index(&self, block: usize, coord: usize) -> usize {
        debug_assert!(coord < self.sizes[block]);
        self.sizes[..block].iter().sum::<usize>() + coord
    }

    /// Block containing the flat variable index.
    pub fn block_of(&self, var: usize) -> usize {
        let mut acc = 0;
        for (j, &n) in self.sizes.iter().enumerate() {
            acc += n;
            if var < acc {
                return j;
            }
        }
        panic!("variable index out of range");
    }

    /// Flat index range of a block.
    pub fn block_range(&self, block: usize) -> std::ops::Range<usize> {
        let start: usize = self.sizes[..block].iter().sum();
        start..start + self.sizes[block]
    }
}

/// Dense exponent vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    exps: Vec<u16>,
}

impl Monomial {
    pub fn one(n: usize) -> Monomial {
        Monomial { exps: vec![0; n] }
    }

    pub fn from_exps(exps: Vec<u16>) -> Monomial {
        Monomial { exps }
    }

    pub fn var(n: usize, i: usize) -> Monomial {
        let mut exps = vec![0; n];
        exps[i] = 1;
        Monomial { exps }
    }

    pub fn exps(&self) -> &[u16] {
        &self.exps
    }

    pub fn num_vars(&self) -> usize {
        self.exps.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    pub fn degree_of(&self, var: usize) -> u16 {
        self.exps[var]
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// other / self, assuming divisibility.
    pub fn div_into(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: other
                .exps
                .iter()
                .zip(&self.exps)
                .map(|(b, a)| b - a)
                .collect(),
        }
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| *a.max(b))
                .collect(),
        }
    }

    /// Bitmask of variables with positive exponent (num_vars ≤ 64).
    pub fn support_mask(&self) -> u64 {
        let mut m = 0u64;
        for (i, &e) in self.exps.iter().enumerate() {
            if e > 0 {
                m |= 1 << i;
            }
        }
        m
    }
}

/// Monomial order. BlockElim(k) compares the first k variables
/// degrevlex-first, then the remaining variables degrevlex — an elimination
/// order for the first k variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonomialOrder {
    DegRevLex,
    Lex,
    BlockElim(usize),
}

fn cmp_lex(a: &[u16], b: &[u16]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

fn cmp_degrevlex(a: &[u16], b: &[u16]) -> Ordering {
    let da: u32 = a.iter().map(|&e| e as u32).sum();
    let db: u32 = b.iter().map(|&e| e as u32).sum();
    match da.cmp(&db) {
        Ordering::Equal => {}
        o => return o,
    }
    // revlex tie-break: from the last variable, the monomial with the
    // smaller exponent at the first difference is the larger one
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            Ordering::Less => return Ordering::Greater,
            Ordering::Greater => return Ordering::Less,
        }
    }
    Ordering::Equal
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::Lex => cmp_lex(&a.exps, &b.exps),
            MonomialOrder::DegRevLex => cmp_degrevlex(&a.exps, &b.exps),
            MonomialOrder::BlockElim(k) => {
                match cmp_degrevlex(&a.exps[..*k], &b.exps[..*k]) {
                    Ordering::Equal => cmp_degrevlex(&a.exps[*k..], &b.exps[*k..]),
                    o => o,
                }
            }
        }
    }
}

/// Sparse multivariate polynomial over an exact field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    field: FieldId,
    blocks: VarBlocks,
    terms: BTreeMap<Monomial, Scalar>,
}

impl MultiPoly {
    pub fn zero(field: FieldId, blocks: VarBlocks) -> MultiPoly {
        MultiPoly {
            field,
            blocks,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: FieldId, blocks: VarBlocks, c: Scalar) -> MultiPoly {
        let mut p = MultiPoly::zero(field, blocks);
        if !c.is_zero() {
            let n = p.blocks.total_vars();
            p.terms.insert(Monomial::one(n), c);
        }
        p
    }

    pub fn var(field: FieldId, blocks: VarBlocks, i: usize) -> MultiPoly {
        let n = blocks.total_vars();
        let mut p = MultiPoly::zero(field, blocks);
        p.terms.insert(Monomial::var(n, i), Scalar::one(field));
        p
    }

    pub fn from_terms(
        field: FieldId,
        blocks: VarBlocks,
        terms: Vec<(Monomial, Scalar)>,
    ) -> MultiPoly {
        let mut p = MultiPoly::zero(field, blocks);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn field(&self) -> FieldId {
        self.field
    }

    pub fn blocks(&self) -> &VarBlocks {
        &self.blocks
    }

    pub fn num_vars(&self) -> usize {
        self.blocks.total_vars()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.field))
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            None => {
                self.terms.insert(m, c);
            }
            Some(old) => {
                let s = old.add(&c);
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
        }
    }

    fn check_ring(&self, other: &MultiPoly) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(
                self.field.to_string(),
                other.field.to_string(),
            ));
        }
        if self.blocks != other.blocks {
            return Err(Error::BlockMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MultiPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_ring(other)?;
        let mut out = MultiPoly::zero(self.field, self.blocks.clone());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.mul(cb));
            }
        }
        Ok(out)
    }

    pub fn scalar_mul(&self, c: &Scalar) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.field, self.blocks.clone());
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.mul(c);
        }
        out
    }

    pub fn mul_term(&self, m: &Monomial, c: &Scalar) -> MultiPoly {
        let mut out = MultiPoly::zero(self.field, self.blocks.clone());
        for (mm, cc) in &self.terms {
            out.add_term(mm.mul(m), cc.mul(c));
        }
        out
    }

    /// Exact value of the polynomial at a point given in flat variable order.
    pub fn evaluate(&self, point: &[Scalar]) -> Result<Scalar> {
        let n = self.num_vars();
        if point.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: point.len(),
            });
        }
        let mut acc = Scalar::zero(self.field);
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                for _ in 0..e {
                    t = t.mul(&point[i]);
                }
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    /// Per-block degree bound (mdeg) of this polynomial.
    pub fn mdeg(&self) -> Vec<u32> {
        let d = self.blocks.num_blocks();
        let mut out = vec![0u32; d];
        for m in self.terms.keys() {
            for j in 0..d {
                let deg: u32 = self.blocks.block_range(j).map(|i| m.degree_of(i) as u32).sum();
                out[j] = out[j].max(deg);
            }
        }
        out
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.total_degree());
        match degs.next() {
            None => true,
            Some(d0) => degs.all(|d| d == d0),
        }
    }

    /// Substitute block i by v_i + x_i for i outside `fixed_blocks` and by
    /// v_i for i inside, where v is a full point in flat order.
    pub fn shift_substitute(&self, v: &[Scalar], fixed_blocks: &[usize]) -> Result<MultiPoly> {
        let n = self.num_vars();
        if v.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: v.len(),
            });
        }
        // per-variable substitution polynomial
        let subs: Vec<MultiPoly> = (0..n)
            .map(|i| {
                let j = self.blocks.block_of(i);
                let mut s =
                    MultiPoly::constant(self.field, self.blocks.clone(), v[i].clone());
                if !fixed_blocks.contains(&j) {
                    s = s
                        .add(&MultiPoly::var(self.field, self.blocks.clone(), i))
                        .unwrap();
                }
                s
            })
            .collect();
        let mut out = MultiPoly::zero(self.field, self.blocks.clone());
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(self.field, self.blocks.clone(), c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                for _ in 0..e {
                    t = t.mul(&subs[i])?;
                }
            }
            out = out.add(&t)?;
        }
        Ok(out)
    }

    /// Formal partial derivative with respect to flat variable i.
    pub fn partial_derivative(&self, i: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(self.field, self.blocks.clone());
        for (m, c) in &self.terms {
            let e = m.degree_of(i);
            if e == 0 {
                continue;
            }
            let mut exps = m.exps().to_vec();
            exps[i] = e - 1;
            let factor = Scalar::from_int(self.field, e as i64);
            out.add_term(Monomial::from_exps(exps), c.mul(&factor));
        }
        out
    }

    /// Maximal term under the given order.
    pub fn leading_term(&self, order: MonomialOrder) -> Result<(Monomial, Scalar)> {
        let (m, c) = self
            .terms
            .iter()
            .max_by(|(a, _), (b, _)| order.cmp(a, b))
            .ok_or(Error::ZeroPolynomial)?;
        Ok((m.clone(), c.clone()))
    }

    /// Exact quotient self / divisor; panics if the division is not exact.
    /// Used by fraction-free elimination, where exactness is guaranteed.
    pub fn div_exact(&self, divisor: &MultiPoly) -> MultiPoly {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let order = MonomialOrder::DegRevLex;
        let (dm, dc) = divisor.leading_term(order).unwrap();
        let dc_inv = dc.invert().unwrap();
        let mut rem = self.clone();
        let mut quo = MultiPoly::zero(self.field, self.blocks.clone());
        while !rem.is_zero() {
            let (rm, rc) = rem.leading_term(order).unwrap();
            assert!(dm.divides(&rm), "inexact polynomial division");
            let qm = dm.div_into(&rm);
            let qc = rc.mul(&dc_inv);
            quo.add_term(qm.clone(), qc.clone());
            rem = rem.sub(&divisor.mul_term(&qm, &qc)).unwrap();
        }
        quo
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", c.to_string_exact())?;
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 1 {
                    write!(f, "*x{i}")?;
                } else if e > 1 {
                    write!(f, "*x{i}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// Jacobian matrix: entry (i, j) = ∂ps_i/∂x_j. Over 𝔽_p derivatives are
/// formal (exponent-times-coefficient).
pub fn jacobian(ps: &[MultiPoly]) -> Vec<Vec<MultiPoly>> {
    ps.iter()
        .map(|p| (0..p.num_vars()).map(|j| p.partial_derivative(j)).collect())
        .collect()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        // next combination in lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut acc = 1u64;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Determinant of a square polynomial matrix: cofactor expansion for k < 4,
/// fraction-free Bareiss elimination for k ≥ 4.
pub fn poly_det(m: &[Vec<MultiPoly>]) -> MultiPoly {
    let k = m.len();
    assert!(k > 0 && m.iter().all(|row| row.len() == k));
    let field = m[0][0].field();
    let blocks = m[0][0].blocks().clone();
    if k < 4 {
        return det_cofactor(m);
    }
    // Bareiss: exact division by the previous pivot. A zero pivot forces a
    // row swap (sign flip); if no nonzero pivot exists the determinant is 0.
    let mut a: Vec<Vec<MultiPoly>> = m.to_vec();
    let mut prev = MultiPoly::constant(field, blocks.clone(), Scalar::one(field));
    let mut sign = false;
    for r in 0..k - 1 {
        if a[r][r].is_zero() {
            match (r + 1..k).find(|&i| !a[i][r].is_zero()) {
                Some(i) => {
                    a.swap(r, i);
                    sign = !sign;
                }
                None => return MultiPoly::zero(field, blocks),
            }
        }
        for i in r + 1..k {
            for j in r + 1..k {
                let num = a[r][r]
                    .mul(&a[i][j])
                    .unwrap()
                    .sub(&a[i][r].mul(&a[r][j]).unwrap())
                    .unwrap();
                a[i][j] = num.div_exact(&prev);
            }
        }
        prev = a[r][r].clone();
    }
    let det = a[k - 1][k - 1].clone();
    if sign {
        det.neg()
    } else {
        det
    }
}

fn det_cofactor(m: &[Vec<MultiPoly>]) -> MultiPoly {
    let k = m.len();
    let field = m[0][0].field();
    let blocks = m[0][0].blocks().clone();
    if k == 1 {
        return m[0][0].clone();
    }
    let mut acc = MultiPoly::zero(field, blocks);
    for (j, entry) in m[0].iter().enumerate() {
        if entry.is_zero() {
            continue;
        }
        let sub: Vec<Vec<MultiPoly>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let cof = entry.mul(&det_cofactor(&sub)).unwrap();
        acc = if j % 2 == 0 {
            acc.add(&cof).unwrap()
        } else {
            acc.sub(&cof).unwrap()
        };
    }
    acc
}

/// All k×k minors in deterministic order: row subsets ascending
/// lexicographically, then column subsets ascending.
pub fn minors(m: &[Vec<MultiPoly>], k: usize) -> Result<Vec<MultiPoly>> {
    let rows = m.len();
    let cols = if rows > 0 { m[0].len() } else { 0 };
    if k == 0 || k > rows || k > cols {
        return Err(Error::SizeError { k, rows, cols });
    }
    let mut out = Vec::new();
    for ri in combinations(rows, k) {
        for ci in combinations(cols, k) {
            let sub: Vec<Vec<MultiPoly>> = ri
                .iter()
                .map(|&r| ci.iter().map(|&c| m[r][c].clone()).collect())
                .collect();
            out.push(poly_det(&sub));
        }
    }
    Ok(out)
}
