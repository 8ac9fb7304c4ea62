//! Isotypic decomposition of `(C^n)^{⊗l}` under `S_l × GL(n)`.
//!
//! Besides the projectors `P_λ` this module builds an orthonormal basis of
//! `range(P_λ)` adapted to `H_λ ⊗ C^{mult}`: in that basis every `t^{⊗l}`
//! becomes `π_λ(t) ⊗ I_mult`.
//!
//! Construction:
//! 1. split `range(P_λ)` into joint eigenspaces of the Jucys–Murphy elements
//!    `X_k = Σ_{i<k} (i k)`; each joint eigenspace is one copy of `H_λ`,
//!    labelled by the content vector of a standard tableau;
//! 2. in the first copy, take a weight basis (Gram–Schmidt of projected
//!    standard basis vectors, weights in decreasing lexicographic order);
//! 3. carry that basis to every other copy with the intertwiner
//!    `Q_j U_σ`, which by Schur's lemma is a multiple of an isometry.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::characters::{irrep_dimension, sym_group_character};
use super::partition::Partition;
use super::permutation::{LegPermutation, ENUMERATION_BOUND};
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian_matrix, CMatrix, LeggedOperator, C64};

/// Guard for reading ranks off projector traces.
const RANK_GUARD: f64 = 1e-6;

fn check_args(n: usize, l: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if l > ENUMERATION_BOUND {
        return Err(Error::EnumerationBound { l, bound: ENUMERATION_BOUND });
    }
    Ok(())
}

/// `P_λ = (d_λ / l!) Σ_σ χ_λ(σ) U_σ` on `(C^n)^{⊗l}` (legs `[n; l]`).
///
/// Partitions with more than `n` parts have zero Schur–Weyl multiplicity and
/// give the exact zero projector.
pub fn isotypic_projector(n: usize, l: usize, lambda: &Partition) -> Result<LeggedOperator> {
    check_args(n, l)?;
    if lambda.size() != l {
        return Err(Error::InvalidPartition(format!("{lambda} is not a partition of {l}")));
    }
    let legs = if l == 0 { vec![1] } else { vec![n; l] };
    if lambda.num_parts() > n {
        return Ok(LeggedOperator::zeros(&legs));
    }
    if l == 0 {
        return Ok(LeggedOperator::identity(&legs));
    }
    let perms = LegPermutation::all(l)?;
    let order = perms.len() as f64;
    let d = irrep_dimension(lambda) as f64;
    let side = n.pow(l as u32);
    let mut p = CMatrix::zeros(side, side);
    let mut chars: HashMap<Partition, i64> = HashMap::new();
    for s in &perms {
        let ct = s.cycle_type();
        let chi = match chars.get(&ct) {
            Some(&v) => v,
            None => {
                let v = sym_group_character(lambda, &ct)?;
                chars.insert(ct, v);
                v
            }
        };
        if chi == 0 {
            continue;
        }
        let coeff = C64::new(d * chi as f64 / order, 0.0);
        for (i, fi) in s.index_map(n, 1, 1).into_iter().enumerate() {
            p[(fi, i)] += coeff;
        }
    }
    LeggedOperator::new(p, legs)
}

/// Exact rank of an (approximate) orthogonal projector from its trace.
pub fn projector_rank(p: &LeggedOperator) -> Result<usize> {
    let t = p.trace().re;
    let r = t.round();
    if (t - r).abs() >= RANK_GUARD || r < 0.0 {
        return Err(Error::InvalidArgument(format!("projector trace {t} is not near an integer")));
    }
    Ok(r as usize)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchurWeylEntry {
    pub partition: Partition,
    /// `dim H_λ` as a `U(n)` representation.
    pub block_dim: usize,
    pub multiplicity: usize,
}

/// Decomposition `(C^n)^{⊗l} = ⊕_λ H_λ ⊗ C^{mult_λ}`, listing only the
/// partitions with a nonzero projector.
pub fn schur_weyl_table(n: usize, l: usize) -> Result<Vec<SchurWeylEntry>> {
    check_args(n, l)?;
    let mut out = Vec::new();
    let mut total = 0usize;
    for lambda in Partition::all(l) {
        let p = isotypic_projector(n, l, &lambda)?;
        let rank = projector_rank(&p)?;
        if rank == 0 {
            continue;
        }
        let block_dim = lambda.weyl_dimension(n) as usize;
        if block_dim == 0 || rank % block_dim != 0 {
            return Err(Error::InvalidArgument(format!(
                "rank {rank} of P_{lambda} is not a multiple of the Weyl dimension {block_dim}"
            )));
        }
        total += rank;
        out.push(SchurWeylEntry { partition: lambda, block_dim, multiplicity: rank / block_dim });
    }
    debug_assert_eq!(total, n.pow(l as u32));
    Ok(out)
}

/// One isotypic block with its adapted orthonormal basis.
#[derive(Clone, Debug)]
pub struct IsotypicBlock {
    pub n: usize,
    pub l: usize,
    pub partition: Partition,
    pub block_dim: usize,
    pub multiplicity: usize,
    pub projector: LeggedOperator,
    /// `n^l × (block_dim · multiplicity)`; column `i * multiplicity + j` is
    /// basis vector `i` of copy `j`.
    pub basis: CMatrix,
}

impl IsotypicBlock {
    pub fn rank(&self) -> usize {
        self.block_dim * self.multiplicity
    }

    /// Compression `W* y W` of an operator on `(C^n)^{⊗l}`.
    pub fn compress(&self, y: &CMatrix) -> CMatrix {
        self.basis.adjoint() * y * &self.basis
    }
}

type BlockKey = (usize, usize, Partition);

fn cache() -> &'static Mutex<HashMap<BlockKey, Arc<IsotypicBlock>>> {
    static CACHE: OnceLock<Mutex<HashMap<BlockKey, Arc<IsotypicBlock>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached [`build_isotypic_block`].
pub fn isotypic_block(n: usize, l: usize, lambda: &Partition) -> Result<Arc<IsotypicBlock>> {
    let key = (n, l, lambda.clone());
    if let Some(b) = cache().lock().expect("cache poisoned").get(&key) {
        return Ok(Arc::clone(b));
    }
    let block = Arc::new(build_isotypic_block(n, l, lambda)?);
    cache().lock().expect("cache poisoned").insert(key, Arc::clone(&block));
    Ok(block)
}

pub fn build_isotypic_block(n: usize, l: usize, lambda: &Partition) -> Result<IsotypicBlock> {
    let projector = isotypic_projector(n, l, lambda)?;
    let rank = projector_rank(&projector)?;
    let side = projector.side();
    if rank == 0 {
        return Ok(IsotypicBlock {
            n,
            l,
            partition: lambda.clone(),
            block_dim: 0,
            multiplicity: 0,
            projector,
            basis: CMatrix::zeros(side, 0),
        });
    }
    let block_dim = lambda.weyl_dimension(n) as usize;
    let multiplicity = rank / block_dim;

    let range = eig_hermitian_matrix(projector.entries())?.range_basis(0.5);
    if range.ncols() != rank {
        return Err(Error::InvalidArgument(format!("P_{lambda} has {} unit eigenvalues, expected {rank}", range.ncols())));
    }

    let copies = split_by_jucys_murphy(n, l, range)?;
    if copies.len() != multiplicity || copies.iter().any(|c| c.ncols() != block_dim) {
        return Err(Error::InvalidArgument(format!(
            "Jucys–Murphy splitting of P_{lambda} gave copies {:?}, expected {multiplicity} of dimension {block_dim}",
            copies.iter().map(|c| c.ncols()).collect::<Vec<_>>()
        )));
    }

    let first = weight_basis(n, l, &copies[0], block_dim)?;
    let mut aligned = vec![first];
    let perms = LegPermutation::all(l)?;
    for copy in &copies[1..] {
        aligned.push(transport(n, &aligned[0], copy, &perms)?);
    }

    let mut basis = CMatrix::zeros(side, rank);
    for i in 0..block_dim {
        for (j, v) in aligned.iter().enumerate() {
            basis.set_column(i * multiplicity + j, &v.column(i));
        }
    }
    Ok(IsotypicBlock { n, l, partition: lambda.clone(), block_dim, multiplicity, projector, basis })
}

/// `X_k = Σ_{i<k} U_{(i k)}` on `(C^n)^{⊗l}` (0-based `k`).
fn jucys_murphy(n: usize, l: usize, k: usize) -> CMatrix {
    let side = n.pow(l as u32);
    let mut x = CMatrix::zeros(side, side);
    for i in 0..k {
        let f = LegPermutation::transposition(l, i, k).index_map(n, 1, 1);
        for (r, fr) in f.into_iter().enumerate() {
            x[(fr, r)] += C64::new(1.0, 0.0);
        }
    }
    x
}

/// Splits the span of `range` into joint eigenspaces of `X_1, ..., X_{l-1}`,
/// ordered by decreasing content vector.
fn split_by_jucys_murphy(n: usize, l: usize, range: CMatrix) -> Result<Vec<CMatrix>> {
    let mut leaves: Vec<(Vec<i64>, CMatrix)> = vec![(Vec::new(), range)];
    for k in 1..l {
        let x = jucys_murphy(n, l, k);
        let mut next = Vec::new();
        for (contents, b) in leaves {
            let h = b.adjoint() * &x * &b;
            let e = eig_hermitian_matrix(&h)?;
            let mut groups: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
            for (idx, &v) in e.eigenvalues.iter().enumerate() {
                let r = v.round();
                if (v - r).abs() > RANK_GUARD {
                    return Err(Error::InvalidArgument(format!("Jucys–Murphy eigenvalue {v} is not an integer")));
                }
                groups.entry(r as i64).or_default().push(idx);
            }
            for (c, cols) in groups {
                let sub = CMatrix::from_fn(e.eigenvectors.nrows(), cols.len(), |i, j| e.eigenvectors[(i, cols[j])]);
                let mut cv = contents.clone();
                cv.push(c);
                next.push((cv, &b * sub));
            }
        }
        leaves = next;
    }
    leaves.sort_by(|a, b| b.0.cmp(&a.0));
    Ok(leaves.into_iter().map(|(_, b)| b).collect())
}

/// Occupation numbers of each symbol in basis index `idx` of `(C^n)^{⊗l}`.
fn weight_of(idx: usize, n: usize, l: usize) -> Vec<usize> {
    let mut w = vec![0; n];
    let mut rem = idx;
    for _ in 0..l {
        w[rem % n] += 1;
        rem /= n;
    }
    w
}

fn weight_basis(n: usize, l: usize, copy: &CMatrix, dim: usize) -> Result<CMatrix> {
    let side = copy.nrows();
    let mut by_weight: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for idx in 0..side {
        by_weight.entry(weight_of(idx, n, l)).or_default().push(idx);
    }
    let mut vecs: Vec<nalgebra::DVector<C64>> = Vec::new();
    for (_, indices) in by_weight.into_iter().rev() {
        for idx in indices {
            // Q e_idx = B (B* e_idx)
            let coeffs = copy.row(idx).adjoint();
            let mut v = copy * coeffs;
            for _ in 0..2 {
                for u in &vecs {
                    let proj = u.dotc(&v);
                    v -= u * proj;
                }
            }
            let norm = v.norm();
            if norm > 1e-8 {
                vecs.push(v / C64::new(norm, 0.0));
            }
        }
    }
    if vecs.len() != dim {
        return Err(Error::InvalidArgument(format!("weight basis has {} vectors, expected {dim}", vecs.len())));
    }
    Ok(CMatrix::from_columns(&vecs))
}

/// Carries the basis `first` of copy 0 into copy `target` via `Q_target U_σ`.
fn transport(n: usize, first: &CMatrix, target: &CMatrix, perms: &[LegPermutation]) -> Result<CMatrix> {
    for s in perms {
        let moved = s.unitary(n) * first;
        let projected = target * (target.adjoint() * moved);
        let scale = projected.column(0).norm();
        if scale > 1e-6 {
            let v = projected / C64::new(scale, 0.0);
            let gram = v.adjoint() * &v;
            let defect = (gram - CMatrix::identity(v.ncols(), v.ncols())).iter().fold(0.0f64, |m, z| m.max(z.norm()));
            if defect > 1e-8 {
                return Err(Error::InvalidArgument(format!("intertwiner is not a scaled isometry (defect {defect:.2e})")));
            }
            return Ok(v);
        }
    }
    Err(Error::InvalidArgument("no permutation links the isotypic copies".into()))
}
