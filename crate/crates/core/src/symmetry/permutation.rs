use std::ops::Range;

use super::partition::Partition;
use crate::error::{Error, Result};
use crate::linalg::{strides, CMatrix, LeggedOperator, C64};

/// Largest `l` for which `S_l` is enumerated exactly.
pub const ENUMERATION_BOUND: usize = 8;

/// A permutation `σ ∈ S_l` of tensor legs, stored 0-based as `images[k] = σ(k)`.
///
/// It acts on operators by `σ·(x_0 ⊗ ... ⊗ x_{l-1}) = x_{σ(0)} ⊗ ... ⊗ x_{σ(l-1)}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LegPermutation {
    images: Vec<usize>,
}

impl LegPermutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(Error::InvalidPermutation(format!("{images:?} is not a bijection")));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(l: usize) -> Self {
        Self { images: (0..l).collect() }
    }

    pub fn transposition(l: usize, i: usize, j: usize) -> Self {
        let mut images: Vec<usize> = (0..l).collect();
        images.swap(i, j);
        Self { images }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// The product `στ` for which `(στ)·x = σ·(τ·x)`, i.e. `k ↦ τ(σ(k))`.
    pub fn product(&self, tau: &LegPermutation) -> Result<Self> {
        if self.len() != tau.len() {
            return Err(Error::InvalidPermutation("permutations of different degree".into()));
        }
        Ok(Self { images: self.images.iter().map(|&k| tau.images[k]).collect() })
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (k, &i) in self.images.iter().enumerate() {
            inv[i] = k;
        }
        Self { images: inv }
    }

    pub fn cycle_type(&self) -> Partition {
        let mut seen = vec![false; self.len()];
        let mut cycles = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                k = self.images[k];
                len += 1;
            }
            cycles.push(len);
        }
        Partition::from_unsorted(cycles)
    }

    /// All of `S_l` in lexicographic order of images.
    pub fn all(l: usize) -> Result<Vec<LegPermutation>> {
        check_bound(l)?;
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..l).collect();
        loop {
            out.push(Self { images: cur.clone() });
            // next lexicographic permutation
            let Some(i) = (1..l).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
            let j = (i..l).rev().find(|&j| cur[j] > cur[i - 1]).expect("exists");
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        Ok(out)
    }

    /// Index map `f` of the permutation unitary on `(C^d)^{⊗l}` embedded in a
    /// layout with `outer` slower and `inner` faster indices:
    /// `U_σ e_i = e_{f(i)}` with digit `k` of `f(i)` equal to digit `σ(k)` of `i`.
    pub(crate) fn index_map(&self, d: usize, outer: usize, inner: usize) -> Vec<usize> {
        let l = self.len();
        let block = d.pow(l as u32);
        let mut map = vec![0; outer * block * inner];
        let mut digits = vec![0usize; l];
        for o in 0..outer {
            for mid in 0..block {
                let mut rem = mid;
                for k in (0..l).rev() {
                    digits[k] = rem % d;
                    rem /= d;
                }
                let mut img = 0;
                for k in 0..l {
                    img = img * d + digits[self.images[k]];
                }
                for b in 0..inner {
                    map[(o * block + mid) * inner + b] = (o * block + img) * inner + b;
                }
            }
        }
        map
    }

    /// Permutation matrix `U_σ` on `(C^d)^{⊗l}`.
    pub fn unitary(&self, d: usize) -> CMatrix {
        let f = self.index_map(d, 1, 1);
        let side = f.len();
        let mut u = CMatrix::zeros(side, side);
        for (i, &fi) in f.iter().enumerate() {
            u[(fi, i)] = C64::new(1.0, 0.0);
        }
        u
    }
}

fn check_bound(l: usize) -> Result<()> {
    if l > ENUMERATION_BOUND {
        return Err(Error::EnumerationBound { l, bound: ENUMERATION_BOUND });
    }
    Ok(())
}

/// Validates that `range` names equal-dimension legs and returns
/// `(leg dimension, outer size, inner size)`.
fn leg_range_layout(x: &LeggedOperator, range: &Range<usize>) -> Result<(usize, usize, usize)> {
    let legs = x.legs();
    if range.end > legs.len() || range.start > range.end {
        return Err(Error::LegOutOfRange { index: range.end, count: legs.len() });
    }
    if range.is_empty() {
        return Ok((1, x.side(), 1));
    }
    let d = legs[range.start];
    if legs[range.clone()].iter().any(|&k| k != d) {
        return Err(Error::LegMismatch(format!("legs {:?} are not all of equal dimension", &legs[range.clone()])));
    }
    let outer = legs[..range.start].iter().product();
    let inner = strides(legs)[range.end - 1];
    Ok((d, outer, inner))
}

/// `U x U*` where `U` permutes the legs in `range` by `sigma`.
pub fn permute_leg_range(x: &LeggedOperator, range: Range<usize>, sigma: &LegPermutation) -> Result<LeggedOperator> {
    if sigma.len() != range.len() {
        return Err(Error::InvalidPermutation(format!(
            "permutation of degree {} applied to {} legs",
            sigma.len(),
            range.len()
        )));
    }
    let (d, outer, inner) = leg_range_layout(x, &range)?;
    let f = sigma.index_map(d, outer, inner);
    let mut g = vec![0; f.len()];
    for (i, &fi) in f.iter().enumerate() {
        g[fi] = i;
    }
    let src = x.entries();
    let out = CMatrix::from_fn(x.side(), x.side(), |r, c| src[(g[r], g[c])]);
    LeggedOperator::new(out, x.legs().to_vec())
}

/// Permutes the trailing `sigma.len()` legs (a leading `m`-leg stays fixed).
pub fn permute_legs(x: &LeggedOperator, sigma: &LegPermutation) -> Result<LeggedOperator> {
    let count = x.legs().len();
    if sigma.len() > count {
        return Err(Error::InvalidPermutation(format!("degree {} exceeds {count} legs", sigma.len())));
    }
    permute_leg_range(x, count - sigma.len()..count, sigma)
}

/// `(1/l!) Σ_{σ ∈ S_l} σ·x` over the legs in `which_legs`.
///
/// Evaluated through the coset factorization
/// `Σ_{S_l} σ = Π_{k=2}^{l} (1 + Σ_{i<k} (i k))`, which costs `O(l²)` leg
/// swaps instead of `l!` permutations.
pub fn symmetrize(x: &LeggedOperator, which_legs: Range<usize>) -> Result<LeggedOperator> {
    let l = which_legs.len();
    check_bound(l)?;
    let (d, outer, inner) = leg_range_layout(x, &which_legs)?;
    if l <= 1 {
        return Ok(x.clone());
    }
    let side = x.side();
    let mut cur = x.entries().clone();
    for k in 1..l {
        let mut acc = cur.clone();
        for i in 0..k {
            let f = LegPermutation::transposition(l, i, k).index_map(d, outer, inner);
            // transpositions are involutions, so f is its own inverse
            for c in 0..side {
                let fc = f[c];
                for r in 0..side {
                    acc[(r, c)] += cur[(f[r], fc)];
                }
            }
        }
        cur = acc * C64::new(1.0 / (k + 1) as f64, 0.0);
    }
    LeggedOperator::new(cur, x.legs().to_vec())
}

/// `‖x - S(x)‖_max` over the legs in `which_legs`.
pub fn symmetry_defect(x: &LeggedOperator, which_legs: Range<usize>) -> Result<f64> {
    let s = symmetrize(x, which_legs)?;
    x.max_abs_diff(&s)
}
