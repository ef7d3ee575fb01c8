//! Multi-affine / multilinear map data model: evaluation, slicing,
//! contraction, direct sum, restriction, polarization, named generators, and
//! conversion to polynomial systems.
//!
//! Entries are stored densely, indexed by (i_1, …, i_d, out) where index 0 in
//! each block is the affine (constant) slot. A homogeneous tensor has all
//! affine-slot entries zero and represents an exact multilinear map.

use crate::error::{Error, Result};
use crate::exact_arith::{sample_int_scalar, split_rng, FieldId, Scalar};
use crate::linalg;
use crate::multipoly::{Monomial, MultiPoly, VarBlocks};
use rand::Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tensor {
    blocks: VarBlocks,
    m: usize,
    field: FieldId,
    homogeneous: bool,
    entries: Vec<Scalar>, // index: ((i_1 * s_2 + i_2) * … ) * m + out
}

/// A rational point of the product space, one coordinate vector per block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPoint {
    pub coords: Vec<Vec<Scalar>>,
}

impl BlockPoint {
    pub fn zero(field: FieldId, blocks: &VarBlocks) -> BlockPoint {
        BlockPoint {
            coords: blocks
                .sizes()
                .iter()
                .map(|&n| vec![Scalar::zero(field); n])
                .collect(),
        }
    }

    pub fn flatten(&self) -> Vec<Scalar> {
        self.coords.iter().flatten().cloned().collect()
    }

    pub fn from_flat(blocks: &VarBlocks, flat: &[Scalar]) -> Result<BlockPoint> {
        if flat.len() != blocks.total_vars() {
            return Err(Error::LengthMismatch {
                expected: blocks.total_vars(),
                got: flat.len(),
            });
        }
        let mut coords = Vec::new();
        let mut at = 0;
        for &n in blocks.sizes() {
            coords.push(flat[at..at + n].to_vec());
            at += n;
        }
        Ok(BlockPoint { coords })
    }
}

impl Tensor {
    pub fn zero(blocks: VarBlocks, m: usize, field: FieldId, homogeneous: bool) -> Tensor {
        let size: usize = blocks.sizes().iter().map(|&n| n + 1).product::<usize>() * m;
        Tensor {
            blocks,
            m,
            field,
            homogeneous,
            entries: vec![Scalar::zero(field); size],
        }
    }

    pub fn blocks(&self) -> &VarBlocks {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.num_blocks()
    }

    pub fn codomain_dim(&self) -> usize {
        self.m
    }

    pub fn field(&self) -> FieldId {
        self.field
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous
    }

    fn offset(&self, idx: &[usize], out: usize) -> usize {
        debug_assert_eq!(idx.len(), self.num_blocks());
        let mut acc = 0;
        for (j, &i) in idx.iter().enumerate() {
            debug_assert!(i <= self.blocks.sizes()[j]);
            acc = acc * (self.blocks.sizes()[j] + 1) + i;
        }
        acc * self.m + out
    }

    pub fn entry(&self, idx: &[usize], out: usize) -> &Scalar {
        &self.entries[self.offset(idx, out)]
    }

    pub fn set_entry(&mut self, idx: &[usize], out: usize, value: Scalar) {
        if self.homogeneous && idx.contains(&0) && !value.is_zero() {
            self.homogeneous = false;
        }
        let o = self.offset(idx, out);
        self.entries[o] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn index_tuples(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for &n in self.blocks.sizes() {
            let mut next = Vec::with_capacity(out.len() * (n + 1));
            for t in &out {
                for i in 0..=n {
                    let mut t2 = t.clone();
                    t2.push(i);
                    next.push(t2);
                }
            }
            out = next;
        }
        out
    }

    /// Exact multi-affine evaluation; the point lies in Z_F(𝕂) iff the
    /// output is the zero vector.
    pub fn eval(&self, v: &BlockPoint) -> Result<Vec<Scalar>> {
        if v.coords.len() != self.num_blocks()
            || v.coords
                .iter()
                .zip(self.blocks.sizes())
                .any(|(c, &n)| c.len() != n)
        {
            return Err(Error::ShapeMismatch("point shape differs from tensor".into()));
        }
        let mut out = vec![Scalar::zero(self.field); self.m];
        for idx in self.index_tuples() {
            let mut factor = Scalar::one(self.field);
            let mut zero = false;
            for (j, &i) in idx.iter().enumerate() {
                if i > 0 {
                    let c = &v.coords[j][i - 1];
                    if c.is_zero() {
                        zero = true;
                        break;
                    }
                    factor = factor.mul(c);
                }
            }
            if zero {
                continue;
            }
            for (o, out_o) in out.iter_mut().enumerate() {
                let e = self.entry(&idx, o);
                if !e.is_zero() {
                    *out_o = out_o.add(&e.mul(&factor));
                }
            }
        }
        Ok(out)
    }

    /// Partial evaluation: substitute block j by w (affine slot folded in);
    /// the result lives on the remaining blocks.
    pub fn contract(&self, j: usize, w: &[Scalar]) -> Result<Tensor> {
        let nj = self.blocks.sizes()[j];
        if w.len() != nj {
            return Err(Error::ShapeMismatch(format!(
                "contract: expected vector of length {nj}, got {}",
                w.len()
            )));
        }
        let rem_sizes: Vec<usize> = self
            .blocks
            .sizes()
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != j)
            .map(|(_, &n)| n)
            .collect();
        if rem_sizes.is_empty() {
            return Err(Error::ShapeMismatch("cannot contract the last block".into()));
        }
        let rem_blocks = VarBlocks::new(rem_sizes)?;
        let mut out = Tensor::zero(rem_blocks, self.m, self.field, false);
        for idx in self.index_tuples() {
            let weight = if idx[j] == 0 {
                Scalar::one(self.field)
            } else {
                w[idx[j] - 1].clone()
            };
            if weight.is_zero() {
                continue;
            }
            let rem_idx: Vec<usize> = idx
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != j)
                .map(|(_, &i)| i)
                .collect();
            for o in 0..self.m {
                let e = self.entry(&idx, o);
                if e.is_zero() {
                    continue;
                }
                let cur = out.entry(&rem_idx, o).clone();
                let off = out.offset(&rem_idx, o);
                out.entries[off] = cur.add(&e.mul(&weight));
            }
        }
        out.recompute_homogeneous();
        Ok(out)
    }

    fn recompute_homogeneous(&mut self) {
        let tuples = self.index_tuples();
        self.homogeneous = tuples.iter().all(|idx| {
            !idx.contains(&0) || (0..self.m).all(|o| self.entry(idx, o).is_zero())
        });
    }

    /// Entrywise sum of two maps on the same shape.
    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        if self.blocks != other.blocks || self.m != other.m {
            return Err(Error::ShapeMismatch("sum needs identical shapes".into()));
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch(
                self.field.to_string(),
                other.field.to_string(),
            ));
        }
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a = a.add(b);
        }
        out.recompute_homogeneous();
        Ok(out)
    }

    /// Slice map of a form along block j: the remaining blocks map to the
    /// dual of block j, with component s the coefficient of x_{j,s+1}.
    pub fn slice_map(&self, j: usize) -> Result<Tensor> {
        if self.m != 1 || !self.homogeneous {
            return Err(Error::NotForm);
        }
        if self.num_blocks() < 2 {
            return Err(Error::ShapeMismatch("slice needs d ≥ 2".into()));
        }
        let nj = self.blocks.sizes()[j];
        let rem_sizes: Vec<usize> = self
            .blocks
            .sizes()
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != j)
            .map(|(_, &n)| n)
            .collect();
        let mut out = Tensor::zero(VarBlocks::new(rem_sizes)?, nj, self.field, true);
        for idx in self.index_tuples() {
            if idx.contains(&0) {
                continue;
            }
            let e = self.entry(&idx, 0);
            if e.is_zero() {
                continue;
            }
            let rem_idx: Vec<usize> = idx
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != j)
                .map(|(_, &i)| i)
                .collect();
            out.set_entry(&rem_idx, idx[j] - 1, e.clone());
        }
        Ok(out)
    }

    /// Direct sum of two forms (m = 1): block sizes add and evaluation
    /// splits as f(x) + g(y) on the concatenated point.
    pub fn direct_sum(&self, other: &Tensor) -> Result<Tensor> {
        if self.num_blocks() != other.num_blocks() {
            return Err(Error::ArityMismatch(self.num_blocks(), other.num_blocks()));
        }
        if self.m != 1 || other.m != 1 {
            return Err(Error::NotForm);
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch(
                self.field.to_string(),
                other.field.to_string(),
            ));
        }
        let sizes: Vec<usize> = self
            .blocks
            .sizes()
            .iter()
            .zip(other.blocks.sizes())
            .map(|(&a, &b)| a + b)
            .collect();
        let blocks = VarBlocks::new(sizes)?;
        let mut out = Tensor::zero(blocks, 1, self.field, false);
        for idx in self.index_tuples() {
            let e = self.entry(&idx, 0);
            if !e.is_zero() {
                out.set_entry(&idx, 0, e.clone());
            }
        }
        for idx in other.index_tuples() {
            let e = other.entry(&idx, 0);
            if e.is_zero() {
                continue;
            }
            let shifted: Vec<usize> = idx
                .iter()
                .enumerate()
                .map(|(j, &i)| if i == 0 { 0 } else { i + self.blocks.sizes()[j] })
                .collect();
            // constant terms of both summands share the all-affine slot
            let cur = out.entry(&shifted, 0).clone();
            let off = out.offset(&shifted, 0);
            out.entries[off] = cur.add(e);
        }
        out.recompute_homogeneous();
        Ok(out)
    }

    /// Composition with linear maps per block: maps[j] has shape
    /// n_j(self) × n_j(target). The homogeneous flag is preserved.
    pub fn restrict(&self, maps: &[Vec<Vec<Scalar>>]) -> Result<Tensor> {
        if maps.len() != self.num_blocks() {
            return Err(Error::ShapeMismatch("one matrix per block required".into()));
        }
        let mut target_sizes = Vec::new();
        for (j, m) in maps.iter().enumerate() {
            if m.len() != self.blocks.sizes()[j] {
                return Err(Error::ShapeMismatch(format!(
                    "matrix {j} must have {} rows",
                    self.blocks.sizes()[j]
                )));
            }
            let cols = m.first().map(|r| r.len()).unwrap_or(0);
            if cols == 0 || m.iter().any(|r| r.len() != cols) {
                return Err(Error::ShapeMismatch(format!("matrix {j} is ragged or empty")));
            }
            target_sizes.push(cols);
        }
        let out_blocks = VarBlocks::new(target_sizes.clone())?;
        let mut out = Tensor::zero(out_blocks, self.m, self.field, false);
        let out_tuples = out.index_tuples();
        for src_idx in self.index_tuples() {
            let nonzero_outs: Vec<usize> = (0..self.m)
                .filter(|&o| !self.entry(&src_idx, o).is_zero())
                .collect();
            if nonzero_outs.is_empty() {
                continue;
            }
            for dst_idx in &out_tuples {
                // weight = prod over blocks of the extended matrix entry,
                // where the affine slot maps to the affine slot with weight 1
                let mut weight = Scalar::one(self.field);
                let mut zero = false;
                for j in 0..self.num_blocks() {
                    let (si, di) = (src_idx[j], dst_idx[j]);
                    let w = match (si, di) {
                        (0, 0) => continue,
                        (0, _) | (_, 0) => {
                            zero = true;
                            break;
                        }
                        (s, t) => maps[j][s - 1][t - 1].clone(),
                    };
                    if w.is_zero() {
                        zero = true;
                        break;
                    }
                    weight = weight.mul(&w);
                }
                if zero {
                    continue;
                }
                for &o in &nonzero_outs {
                    let add = self.entry(&src_idx, o).mul(&weight);
                    let cur = out.entry(dst_idx, o).clone();
                    let off = out.offset(dst_idx, o);
                    out.entries[off] = cur.add(&add);
                }
            }
        }
        out.recompute_homogeneous();
        Ok(out)
    }

    /// Rank of the n_j × (∏_{i≠j} n_i) coefficient matrix of a form.
    pub fn flattening_rank(&self, j: usize) -> Result<usize> {
        if self.m != 1 || !self.homogeneous {
            return Err(Error::NotForm);
        }
        let nj = self.blocks.sizes()[j];
        let mut rows: Vec<Vec<Scalar>> = vec![Vec::new(); nj];
        for idx in self.index_tuples() {
            if idx.contains(&0) {
                continue;
            }
            // column position: mixed radix over the other blocks
            let _col: usize = 0;
            let e = self.entry(&idx, 0).clone();
            let r = idx[j] - 1;
            rows[r].push(e);
        }
        // index_tuples iterates blocks in a fixed nested order, so entries
        // for each row arrive in the same column order
        let field = self.field;
        Ok(linalg::rank(field, &rows))
    }

    /// Component polynomials of the system, in the block variables.
    pub fn to_polys(&self) -> Vec<MultiPoly> {
        let n = self.blocks.total_vars();
        let mut polys = vec![MultiPoly::zero(self.field, self.blocks.clone()); self.m];
        for idx in self.index_tuples() {
            let mut exps = vec![0u16; n];
            for (j, &i) in idx.iter().enumerate() {
                if i > 0 {
                    exps[self.blocks.var_index(j, i - 1)] = 1;
                }
            }
            for (o, poly) in polys.iter_mut().enumerate() {
                let e = self.entry(&idx, o);
                if !e.is_zero() {
                    poly.add_term(Monomial::from_exps(exps.clone()), e.clone());
                }
            }
        }
        polys
    }

    /// Inverse of `to_polys` for systems with mdeg ≤ (1,…,1).
    pub fn from_polys(blocks: &VarBlocks, polys: &[MultiPoly]) -> Result<Tensor> {
        let field = polys
            .first()
            .ok_or(Error::Msg("empty polynomial system".into()))?
            .field();
        let mut t = Tensor::zero(blocks.clone(), polys.len(), field, false);
        for (o, p) in polys.iter().enumerate() {
            if p.blocks() != blocks {
                return Err(Error::BlockMismatch);
            }
            if p.mdeg().iter().any(|&d| d > 1) {
                return Err(Error::Msg("polynomial is not multi-affine".into()));
            }
            for (m, c) in p.terms() {
                let mut idx = vec![0usize; blocks.num_blocks()];
                for (i, &e) in m.exps().iter().enumerate() {
                    if e > 0 {
                        let j = blocks.block_of(i);
                        idx[j] = i - blocks.block_range(j).start + 1;
                    }
                }
                t.set_entry(&idx, o, c.clone());
            }
        }
        t.recompute_homogeneous();
        Ok(t)
    }
}

/// The unique symmetric multilinear form agreeing with a degree-d
/// homogeneous polynomial on the diagonal (characteristic 0 or > d).
pub fn polarize(p: &MultiPoly) -> Result<Tensor> {
    let n = p.num_vars();
    if p.is_zero() {
        return Err(Error::NotHomogeneous);
    }
    let d = p.total_degree() as usize;
    if !p.is_homogeneous() || d == 0 {
        return Err(Error::NotHomogeneous);
    }
    let ch = p.field().characteristic();
    if ch != 0 && ch <= d as u64 {
        return Err(Error::BadCharacteristic(d as u32));
    }
    let blocks = VarBlocks::new(vec![n; d])?;
    let mut t = Tensor::zero(blocks, 1, p.field(), true);
    for (m, c) in p.terms() {
        // multiset of variables of the monomial
        let mut vars = Vec::new();
        for (i, &e) in m.exps().iter().enumerate() {
            for _ in 0..e {
                vars.push(i);
            }
        }
        let arrangements = distinct_permutations(&vars);
        let weight = c
            .mul(&Scalar::from_int(p.field(), arrangements.len() as i64).invert().unwrap());
        for arr in arrangements {
            let idx: Vec<usize> = arr.iter().map(|&v| v + 1).collect();
            t.set_entry(&idx, 0, weight.clone());
        }
    }
    Ok(t)
}

fn distinct_permutations(items: &[usize]) -> Vec<Vec<usize>> {
    let mut sorted = items.to_vec();
    sorted.sort();
    let mut out = Vec::new();
    loop {
        out.push(sorted.clone());
        // next_permutation
        let Some(i) = (0..sorted.len().saturating_sub(1))
            .rev()
            .find(|&i| sorted[i] < sorted[i + 1])
        else {
            return out;
        };
        let j = (i + 1..sorted.len()).rev().find(|&j| sorted[j] > sorted[i]).unwrap();
        sorted.swap(i, j);
        sorted[i + 1..].reverse();
    }
}

/// Named generators.
pub enum GeneratorKind {
    /// Σ_{i ≤ r} x_{1,i}⋯x_{d,i} on d blocks of size n.
    Diag { d: usize, r: usize, n: usize },
    /// Trilinear form tr(XYZ) on three blocks of size r².
    MatmulForm { r: usize },
    /// Bilinear map (X, Y) ↦ XY with m = r².
    MatmulMap { r: usize },
    /// Generalized quaternion algebra multiplication, i² = a, j² = b.
    Quaternion { a: i64, b: i64 },
    /// Seeded random homogeneous tensor; density in (0, 1].
    Random {
        sizes: Vec<usize>,
        m: usize,
        field: FieldId,
        seed: u64,
        density_percent: u32,
    },
}

pub fn generate(kind: GeneratorKind) -> Result<Tensor> {
    match kind {
        GeneratorKind::Diag { d, r, n } => {
            if d < 2 || r == 0 || n < r {
                return Err(Error::BadParams("diag requires d ≥ 2, 1 ≤ r ≤ n".into()));
            }
            let blocks = VarBlocks::new(vec![n; d])?;
            let mut t = Tensor::zero(blocks, 1, FieldId::Rationals, true);
            for i in 1..=r {
                let idx = vec![i; d];
                t.set_entry(&idx, 0, Scalar::one(FieldId::Rationals));
            }
            Ok(t)
        }
        GeneratorKind::MatmulForm { r } => {
            if r == 0 {
                return Err(Error::BadParams("matmul requires r ≥ 1".into()));
            }
            let blocks = VarBlocks::new(vec![r * r; 3])?;
            let mut t = Tensor::zero(blocks, 1, FieldId::Rationals, true);
            for i in 0..r {
                for j in 0..r {
                    for k in 0..r {
                        // tr(XYZ) picks X_{ij} Y_{jk} Z_{ki}
                        let idx = vec![i * r + j + 1, j * r + k + 1, k * r + i + 1];
                        t.set_entry(&idx, 0, Scalar::one(FieldId::Rationals));
                    }
                }
            }
            Ok(t)
        }
        GeneratorKind::MatmulMap { r } => {
            if r == 0 {
                return Err(Error::BadParams("matmul requires r ≥ 1".into()));
            }
            let blocks = VarBlocks::new(vec![r * r; 2])?;
            let mut t = Tensor::zero(blocks, r * r, FieldId::Rationals, true);
            for i in 0..r {
                for j in 0..r {
                    for k in 0..r {
                        let idx = vec![i * r + j + 1, j * r + k + 1];
                        t.set_entry(&idx, i * r + k, Scalar::one(FieldId::Rationals));
                    }
                }
            }
            Ok(t)
        }
        GeneratorKind::Quaternion { a, b } => {
            if a == 0 || b == 0 {
                return Err(Error::BadParams("quaternion requires a, b ≠ 0".into()));
            }
            let q = FieldId::Rationals;
            let blocks = VarBlocks::new(vec![4, 4])?;
            let mut t = Tensor::zero(blocks, 4, q, true);
            let s = |n: i64| Scalar::from_int(q, n);
            // component 0: x0y0 + a x1y1 + b x2y2 - ab x3y3
            let table: [(usize, usize, usize, i64); 16] = [
                (0, 0, 0, 1),
                (1, 1, 0, a),
                (2, 2, 0, b),
                (3, 3, 0, -a * b),
                // i: x0y1 + x1y0 - b x2y3 + b x3y2
                (0, 1, 1, 1),
                (1, 0, 1, 1),
                (2, 3, 1, -b),
                (3, 2, 1, b),
                // j: x0y2 + x2y0 + a x1y3 - a x3y1
                (0, 2, 2, 1),
                (2, 0, 2, 1),
                (1, 3, 2, a),
                (3, 1, 2, -a),
                // k: x0y3 + x3y0 + x1y2 - x2y1
                (0, 3, 3, 1),
                (3, 0, 3, 1),
                (1, 2, 3, 1),
                (2, 1, 3, -1),
            ];
            for (xi, yi, out, c) in table {
                t.set_entry(&[xi + 1, yi + 1], out, s(c));
            }
            Ok(t)
        }
        GeneratorKind::Random {
            sizes,
            m,
            field,
            seed,
            density_percent,
        } => {
            if m == 0 || sizes.is_empty() || density_percent == 0 || density_percent > 100 {
                return Err(Error::BadParams("random: need m ≥ 1, blocks, density 1..=100".into()));
            }
            let blocks = VarBlocks::new(sizes)?;
            let mut t = Tensor::zero(blocks, m, field, true);
            let mut rng = split_rng(seed, 0);
            for idx in t.index_tuples() {
                if idx.contains(&0) {
                    continue;
                }
                for o in 0..m {
                    if rng.gen_range(0..100) < density_percent {
                        let v = sample_int_scalar(field, 5, &mut rng);
                        t.set_entry(&idx, o, v);
                    }
                }
            }
            Ok(t)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::{sample_scalar, seeded_rng};

    const Q: FieldId = FieldId::Rationals;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(Q, n)
    }

    fn diag(d: usize, r: usize, n: usize) -> Tensor {
        generate(GeneratorKind::Diag { d, r, n }).unwrap()
    }

    fn point(coords: Vec<Vec<i64>>) -> BlockPoint {
        BlockPoint {
            coords: coords
                .into_iter()
                .map(|v| v.into_iter().map(s).collect())
                .collect(),
        }
    }

    #[test]
    fn eval_examples() {
        let t = diag(3, 2, 2);
        let v = point(vec![vec![1, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(t.eval(&v).unwrap(), vec![s(0)]);
        // quaternion unit law: (1,0,0,0) * q = q
        let h = generate(GeneratorKind::Quaternion { a: -1, b: -1 }).unwrap();
        let qv = vec![3, -1, 2, 5];
        let v = point(vec![vec![1, 0, 0, 0], qv.clone()]);
        let out = h.eval(&v).unwrap();
        assert_eq!(out, qv.into_iter().map(s).collect::<Vec<_>>());
        // i * i = -1
        let v = point(vec![vec![0, 1, 0, 0], vec![0, 1, 0, 0]]);
        assert_eq!(h.eval(&v).unwrap(), vec![s(-1), s(0), s(0), s(0)]);
    }

    #[test]
    fn eval_agrees_with_polys() {
        let mut rng = seeded_rng(3);
        for seed in 0..20 {
            let t = generate(GeneratorKind::Random {
                sizes: vec![2, 3, 2],
                m: 2,
                field: Q,
                seed,
                density_percent: 60,
            })
            .unwrap();
            let polys = t.to_polys();
            let v = BlockPoint {
                coords: vec![
                    (0..2).map(|_| sample_scalar(Q, 5, &mut rng)).collect(),
                    (0..3).map(|_| sample_scalar(Q, 5, &mut rng)).collect(),
                    (0..2).map(|_| sample_scalar(Q, 5, &mut rng)).collect(),
                ],
            };
            let flat = v.flatten();
            let direct = t.eval(&v).unwrap();
            for (o, p) in polys.iter().enumerate() {
                assert_eq!(p.evaluate(&flat).unwrap(), direct[o]);
            }
        }
    }

    #[test]
    fn contract_consistency() {
        let t = generate(GeneratorKind::Random {
            sizes: vec![2, 2, 2],
            m: 2,
            field: Q,
            seed: 5,
            density_percent: 80,
        })
        .unwrap();
        let v = point(vec![vec![1, 2], vec![-1, 3], vec![2, 1]]);
        // contracting all blocks sequentially equals eval
        let c1 = t.contract(0, &v.coords[0]).unwrap();
        let c2 = c1.contract(0, &v.coords[1]).unwrap();
        // one block left: evaluate
        let last = BlockPoint {
            coords: vec![v.coords[2].clone()],
        };
        assert_eq!(c2.eval(&last).unwrap(), t.eval(&v).unwrap());
        // contracting a homogeneous tensor with zero gives the zero tensor
        let z = t.contract(1, &[s(0), s(0)]).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn matmul_contract_trace_structure() {
        // contract block 1 of tr(XYZ) with X = Id_2: the bilinear form
        // (Y,Z) -> tr(YZ) has matrix rank 4
        let t = generate(GeneratorKind::MatmulForm { r: 2 }).unwrap();
        let id = vec![s(1), s(0), s(0), s(1)];
        let c = t.contract(0, &id).unwrap();
        assert_eq!(c.flattening_rank(0).unwrap(), 4);
    }

    #[test]
    fn direct_sum_examples() {
        let t = diag(3, 1, 1).direct_sum(&diag(3, 2, 2)).unwrap();
        let want = diag(3, 3, 3);
        assert_eq!(t, want);
        // padding with a zero tensor preserves evaluation
        let z = Tensor::zero(VarBlocks::new(vec![1, 1, 1]).unwrap(), 1, Q, true);
        let padded = diag(3, 1, 1).direct_sum(&z).unwrap();
        let v = point(vec![vec![2, 0], vec![3, 0], vec![1, 0]]);
        assert_eq!(padded.eval(&v).unwrap(), vec![s(6)]);
    }

    #[test]
    fn restrict_examples() {
        let t = diag(3, 3, 3);
        let id: Vec<Vec<Scalar>> = (0..3)
            .map(|i| (0..3).map(|j| s((i == j) as i64)).collect())
            .collect();
        assert_eq!(t.restrict(&[id.clone(), id.clone(), id.clone()]).unwrap(), t);
        // projection to the first 2 coordinates per block gives diag(2)
        let proj: Vec<Vec<Scalar>> = (0..3)
            .map(|i| (0..2).map(|j| s((i == j) as i64)).collect())
            .collect();
        let r = t.restrict(&[proj.clone(), proj.clone(), proj.clone()]).unwrap();
        assert_eq!(r, diag(3, 2, 2));
        // zero maps give the zero tensor
        let zero: Vec<Vec<Scalar>> = (0..3).map(|_| vec![s(0); 3]).collect();
        let z = t.restrict(&[zero.clone(), zero.clone(), zero.clone()]).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn polarize_examples() {
        // P = x1^2 x2 -> f(u,v,w) with f(v,v,v) = P(v)
        let b = VarBlocks::flat(2).unwrap();
        let x1 = MultiPoly::var(Q, b.clone(), 0);
        let x2 = MultiPoly::var(Q, b.clone(), 1);
        let p = x1.mul(&x1).unwrap().mul(&x2).unwrap();
        let f = polarize(&p).unwrap();
        assert_eq!(f.num_blocks(), 3);
        // coefficient 1/3 on each arrangement of {1,1,2}
        assert_eq!(*f.entry(&[1, 1, 2], 0), Scalar::make(Q, 1, 3).unwrap());
        assert_eq!(*f.entry(&[1, 2, 1], 0), Scalar::make(Q, 1, 3).unwrap());
        assert_eq!(*f.entry(&[2, 1, 1], 0), Scalar::make(Q, 1, 3).unwrap());
        // d = 2: x1 x2 -> 1/2 (u1v2 + u2v1)
        let g = polarize(&x1.mul(&x2).unwrap()).unwrap();
        assert_eq!(*g.entry(&[1, 2], 0), Scalar::make(Q, 1, 2).unwrap());
        assert_eq!(*g.entry(&[2, 1], 0), Scalar::make(Q, 1, 2).unwrap());
        // char must exceed the degree
        let f3 = FieldId::PrimeField(3);
        let b3 = VarBlocks::flat(1).unwrap();
        let x = MultiPoly::var(f3, b3, 0);
        let cube = x.mul(&x).unwrap().mul(&x).unwrap();
        assert!(matches!(polarize(&cube), Err(Error::BadCharacteristic(_))));
    }

    #[test]
    fn polarize_diagonal_identity_random() {
        let b = VarBlocks::flat(3).unwrap();
        let mut rng = seeded_rng(21);
        // random cubic
        let mut p = MultiPoly::zero(Q, b.clone());
        for _ in 0..6 {
            let mut exps = vec![0u16; 3];
            for _ in 0..3 {
                exps[rng.gen_range(0..3)] += 1;
            }
            p.add_term(Monomial::from_exps(exps), sample_scalar(Q, 5, &mut rng));
        }
        if p.is_zero() {
            return;
        }
        let f = polarize(&p).unwrap();
        for _ in 0..20 {
            let v: Vec<Scalar> = (0..3).map(|_| sample_scalar(Q, 5, &mut rng)).collect();
            let pt = BlockPoint {
                coords: vec![v.clone(), v.clone(), v.clone()],
            };
            assert_eq!(f.eval(&pt).unwrap()[0], p.evaluate(&v).unwrap());
        }
    }

    #[test]
    fn polarize_symmetry_random() {
        let b = VarBlocks::flat(2).unwrap();
        let x1 = MultiPoly::var(Q, b.clone(), 0);
        let x2 = MultiPoly::var(Q, b.clone(), 1);
        let p = x1
            .mul(&x1)
            .unwrap()
            .mul(&x2)
            .unwrap()
            .add(&x2.mul(&x2).unwrap().mul(&x2).unwrap())
            .unwrap();
        let f = polarize(&p).unwrap();
        let mut rng = seeded_rng(8);
        for _ in 0..50 {
            let u: Vec<Scalar> = (0..2).map(|_| sample_scalar(Q, 5, &mut rng)).collect();
            let v: Vec<Scalar> = (0..2).map(|_| sample_scalar(Q, 5, &mut rng)).collect();
            let w: Vec<Scalar> = (0..2).map(|_| sample_scalar(Q, 5, &mut rng)).collect();
            let perms = [
                [&u, &v, &w],
                [&u, &w, &v],
                [&v, &u, &w],
                [&v, &w, &u],
                [&w, &u, &v],
                [&w, &v, &u],
            ];
            let base = f
                .eval(&BlockPoint {
                    coords: vec![u.clone(), v.clone(), w.clone()],
                })
                .unwrap();
            for p3 in perms {
                let val = f
                    .eval(&BlockPoint {
                        coords: p3.iter().map(|c| (*c).clone()).collect(),
                    })
                    .unwrap();
                assert_eq!(val, base);
            }
        }
    }

    #[test]
    fn flattening_rank_examples() {
        for j in 0..3 {
            assert_eq!(diag(3, 2, 3).flattening_rank(j).unwrap(), 2);
        }
        let mm = generate(GeneratorKind::MatmulForm { r: 2 }).unwrap();
        for j in 0..3 {
            assert_eq!(mm.flattening_rank(j).unwrap(), 4);
        }
        let z = Tensor::zero(VarBlocks::new(vec![2, 2, 2]).unwrap(), 1, Q, true);
        assert_eq!(z.flattening_rank(0).unwrap(), 0);
    }

    #[test]
    fn restriction_drops_flattening_rank() {
        let mut rng = seeded_rng(14);
        for seed in 0..10 {
            let t = generate(GeneratorKind::Random {
                sizes: vec![3, 3, 3],
                m: 1,
                field: Q,
                seed,
                density_percent: 50,
            })
            .unwrap();
            let maps: Vec<Vec<Vec<Scalar>>> = (0..3)
                .map(|_| {
                    (0..3)
                        .map(|_| (0..2).map(|_| sample_scalar(Q, 3, &mut rng)).collect())
                        .collect()
                })
                .collect();
            let r = t.restrict(&maps).unwrap();
            for j in 0..3 {
                assert!(r.flattening_rank(j).unwrap() <= t.flattening_rank(j).unwrap());
            }
        }
    }

    #[test]
    fn to_polys_examples() {
        let t = diag(3, 1, 1);
        let polys = t.to_polys();
        assert_eq!(polys.len(), 1);
        let b = t.blocks().clone();
        let want = MultiPoly::var(Q, b.clone(), 0)
            .mul(&MultiPoly::var(Q, b.clone(), 1))
            .unwrap()
            .mul(&MultiPoly::var(Q, b, 2))
            .unwrap();
        assert_eq!(polys[0], want);
        // quaternion first component: x0y0 - x1y1 - x2y2 - x3y3
        let h = generate(GeneratorKind::Quaternion { a: -1, b: -1 }).unwrap();
        let hp = h.to_polys();
        assert_eq!(hp.len(), 4);
        let hb = h.blocks().clone();
        let term = |xi: usize, yi: usize| {
            MultiPoly::var(Q, hb.clone(), xi)
                .mul(&MultiPoly::var(Q, hb.clone(), 4 + yi))
                .unwrap()
        };
        let want0 = term(0, 0)
            .sub(&term(1, 1))
            .unwrap()
            .sub(&term(2, 2))
            .unwrap()
            .sub(&term(3, 3))
            .unwrap();
        assert_eq!(hp[0], want0);
        // round trip
        let back = Tensor::from_polys(h.blocks(), &hp).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn multilinearity_random() {
        let mut rng = seeded_rng(6);
        let t = generate(GeneratorKind::Random {
            sizes: vec![2, 3],
            m: 2,
            field: Q,
            seed: 99,
            density_percent: 70,
        })
        .unwrap();
        for _ in 0..1000 {
            let u: Vec<Scalar> = (0..3).map(|_| sample_scalar(Q, 4, &mut rng)).collect();
            let w: Vec<Scalar> = (0..3).map(|_| sample_scalar(Q, 4, &mut rng)).collect();
            let lam = sample_scalar(Q, 4, &mut rng);
            let x: Vec<Scalar> = (0..2).map(|_| sample_scalar(Q, 4, &mut rng)).collect();
            let sum: Vec<Scalar> = u
                .iter()
                .zip(&w)
                .map(|(a, b)| a.add(&b.mul(&lam)))
                .collect();
            let f_sum = t
                .eval(&BlockPoint {
                    coords: vec![x.clone(), sum],
                })
                .unwrap();
            let f_u = t
                .eval(&BlockPoint {
                    coords: vec![x.clone(), u],
                })
                .unwrap();
            let f_w = t
                .eval(&BlockPoint {
                    coords: vec![x, w],
                })
                .unwrap();
            for o in 0..2 {
                assert_eq!(f_sum[o], f_u[o].add(&lam.mul(&f_w[o])));
            }
        }
    }

    #[test]
    fn generate_determinism() {
        let a = generate(GeneratorKind::Random {
            sizes: vec![2, 2],
            m: 1,
            field: FieldId::PrimeField(101),
            seed: 4,
            density_percent: 50,
        })
        .unwrap();
        let b = generate(GeneratorKind::Random {
            sizes: vec![2, 2],
            m: 1,
            field: FieldId::PrimeField(101),
            seed: 4,
            density_percent: 50,
        })
        .unwrap();
        assert_eq!(a, b);
        assert!(generate(GeneratorKind::Quaternion { a: 0, b: -1 }).is_err());
    }

    #[test]
    fn matmul_form_example_value() {
        // tr(E12 E21 E11) = 1
        let t = generate(GeneratorKind::MatmulForm { r: 2 }).unwrap();
        let e12 = vec![0, 1, 0, 0];
        let e21 = vec![0, 0, 1, 0];
        let e11 = vec![1, 0, 0, 0];
        let v = point(vec![e12, e21, e11]);
        assert_eq!(t.eval(&v).unwrap(), vec![s(1)]);
    }
}
