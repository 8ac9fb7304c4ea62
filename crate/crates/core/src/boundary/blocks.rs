use serde::{Deserialize, Serialize};

use super::grouplike::GroupLike;
use crate::error::{Error, Result};
use crate::hierarchy::SymSequence;
use crate::linalg::{eig_hermitian_matrix, tensor_power, CMatrix, LeggedOperator, C64, HERMITIAN_TOL};
use crate::symmetry::{isotypic_block, schur_weyl_table, Partition, ENUMERATION_BOUND};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockCheck {
    pub level: usize,
    pub partition: Partition,
    /// `‖c - c*‖_max / ‖c‖_max` of the compressed block `c`.
    pub hermitian_defect: f64,
    /// Smallest eigenvalue of the Hermitian part of `c`.
    pub min_eigenvalue: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentialReport {
    pub is_exponential: bool,
    /// First failing block in (level, partition) order.
    pub failing_block: Option<Partition>,
    pub failing_level: Option<usize>,
    pub checks: Vec<BlockCheck>,
}

impl ExponentialReport {
    pub fn failures(&self) -> impl Iterator<Item = &BlockCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Checks that `t^{⊗l}` compressed to every isotypic block is PSD, for
/// `1 ≤ l ≤ len`. Level 1 is the fundamental block, i.e. `t ≥ 0` itself.
pub fn exponential_test(g: &GroupLike, len: usize, tol: f64) -> Result<ExponentialReport> {
    if len > ENUMERATION_BOUND {
        return Err(Error::EnumerationBound { l: len, bound: ENUMERATION_BOUND });
    }
    let n = g.n();
    let mut checks = Vec::new();
    for l in 1..=len {
        let tl = tensor_power(g.matrix(), l).into_entries();
        for entry in schur_weyl_table(n, l)? {
            let block = isotypic_block(n, l, &entry.partition)?;
            checks.push(check_block(&block.compress(&tl), l, entry.partition, tol)?);
        }
    }
    let first = checks.iter().find(|c| !c.passed);
    Ok(ExponentialReport {
        is_exponential: first.is_none(),
        failing_block: first.map(|c| c.partition.clone()),
        failing_level: first.map(|c| c.level),
        checks,
    })
}

fn check_block(c: &CMatrix, level: usize, partition: Partition, tol: f64) -> Result<BlockCheck> {
    let scale = c.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let asym = (c - c.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let hermitian_defect = if scale > 0.0 { asym / scale } else { 0.0 };
    let min_eigenvalue = eig_hermitian_matrix(c)?.min();
    let threshold = tol * c.nrows() as f64 * scale.max(1.0);
    let passed = hermitian_defect <= HERMITIAN_TOL && min_eigenvalue >= -threshold;
    Ok(BlockCheck { level, partition, hermitian_defect, min_eigenvalue, passed })
}

/// `(I_m ⊗ W)* x_l (I_m ⊗ W)` where `W` is the adapted basis of
/// `range(P_λ)`, `l = |λ|`. Legs are `[m, dim H_λ, multiplicity]`; a
/// group-like sequence gives `a ⊗ π_λ(t) ⊗ I_mult`.
pub fn recover_block(seq: &SymSequence, lambda: &Partition) -> Result<LeggedOperator> {
    let l = lambda.size();
    if l == 0 {
        return Err(Error::InvalidPartition("empty partition".into()));
    }
    let x = seq
        .level(l)
        .ok_or_else(|| Error::Precondition(format!("sequence of length {} has no level {l}", seq.len())))?;
    let block = isotypic_block(seq.n, l, lambda)?;
    if block.rank() == 0 {
        return Err(Error::ZeroProjector(format!("{lambda} with n = {}", seq.n)));
    }
    let w = CMatrix::identity(seq.m, seq.m).kronecker(&block.basis);
    let c = w.adjoint() * x.entries() * &w;
    LeggedOperator::new(c, vec![seq.m, block.block_dim, block.multiplicity])
}

/// The diagonal blocks of [`recover_block`] for each copy of `H_λ`, each on
/// legs `[m, dim H_λ]`.
pub fn multiplicity_blocks(seq: &SymSequence, lambda: &Partition) -> Result<Vec<LeggedOperator>> {
    let r = recover_block(seq, lambda)?;
    let (m, d, mult) = (r.legs()[0], r.legs()[1], r.legs()[2]);
    let e = r.entries();
    (0..mult)
        .map(|j| {
            let idx = |k: usize| (k / d) * d * mult + (k % d) * mult + j;
            let b = CMatrix::from_fn(m * d, m * d, |r, c| e[(idx(r), idx(c))]);
            LeggedOperator::new(b, vec![m, d])
        })
        .collect()
}

/// `π_λ(t)` for an integer highest weight `λ_1 ≥ ... ≥ λ_n`, negative
/// entries allowed: with `k = max(0, -λ_n)`, `π_λ(t) = det(t)^{-k} π_{λ+k}(t)`.
pub fn irrep_image(g: &GroupLike, weight: &[i64]) -> Result<CMatrix> {
    let n = g.n();
    if weight.len() != n {
        return Err(Error::InvalidPartition(format!("weight {weight:?} has {} entries, expected {n}", weight.len())));
    }
    if weight.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidPartition(format!("weight {weight:?} is not weakly decreasing")));
    }
    let shift = (-weight[n - 1]).max(0);
    let parts: Vec<usize> = weight.iter().map(|&w| (w + shift) as usize).collect();
    let lambda = Partition::from_unsorted(parts);
    let twist = g.determinant().powi(-(shift as i32));
    let l = lambda.size();
    if l == 0 {
        return Ok(CMatrix::from_element(1, 1, twist));
    }
    if l > ENUMERATION_BOUND {
        return Err(Error::EnumerationBound { l, bound: ENUMERATION_BOUND });
    }
    let block = isotypic_block(n, l, &lambda)?;
    let d = block.block_dim;
    let copy0 = CMatrix::from_fn(block.basis.nrows(), d, |r, i| block.basis[(r, i * block.multiplicity)]);
    let tl = tensor_power(g.matrix(), l).into_entries();
    Ok(copy0.adjoint() * tl * copy0 * twist)
}

/// Scalar version of the twist for callers holding a recovered block.
pub fn determinant_twist(g: &GroupLike, k: i32) -> C64 {
    g.determinant().powi(k)
}
