use super::eigen::{eig_hermitian, EigenDecomposition};
use super::functional::Functional;
use super::operator::{strides, C64, CMatrix, LeggedOperator};
use crate::error::{Error, Result};

/// Default relative PSD tolerance.
pub const PSD_TOL: f64 = 1e-9;

/// Kronecker product; legs concatenate.
pub fn tensor(x: &LeggedOperator, y: &LeggedOperator) -> LeggedOperator {
    let entries = x.entries().kronecker(y.entries());
    let mut legs = x.legs().to_vec();
    legs.extend_from_slice(y.legs());
    LeggedOperator::from_parts_unchecked(entries, legs)
}

/// `y ⊗ y ⊗ ... ⊗ y` (`copies` factors); `copies = 0` gives the 1x1 identity.
pub fn tensor_power(y: &LeggedOperator, copies: usize) -> LeggedOperator {
    let mut acc = LeggedOperator::scalar(C64::new(1.0, 0.0));
    for k in 0..copies {
        acc = if k == 0 { y.clone() } else { tensor(&acc, y) };
    }
    acc
}

/// Hilbert–Schmidt pairing `⟨x, y⟩ = trace(y* x)`.
pub fn hs_inner(x: &LeggedOperator, y: &LeggedOperator) -> Result<C64> {
    x.check_same_side(y)?;
    Ok(x.entries().iter().zip(y.entries().iter()).map(|(a, b)| b.conj() * a).sum())
}

/// Absolute threshold used by [`is_psd`] for an operator of this size and scale.
pub fn psd_threshold(x: &LeggedOperator, tol: f64) -> f64 {
    tol * x.side() as f64 * x.max_abs().max(1.0)
}

pub fn min_eigenvalue(x: &LeggedOperator) -> Result<f64> {
    Ok(eig_hermitian(x)?.min())
}

/// `true` iff `λ_min(x) ≥ -tol · side · max(1, ‖x‖_max)`.
pub fn is_psd(x: &LeggedOperator, tol: f64) -> Result<bool> {
    Ok(min_eigenvalue(x)? >= -psd_threshold(x, tol))
}

/// `x ≤ y` in the Loewner order, at tolerance.
pub fn loewner_leq(x: &LeggedOperator, y: &LeggedOperator, tol: f64) -> Result<bool> {
    x.check_same_shape(y)?;
    x.ensure_hermitian()?;
    y.ensure_hermitian()?;
    is_psd(&y.try_sub(x)?, tol)
}

/// Nearest PSD operator in Hilbert–Schmidt norm: `U max(Λ, 0) U*`.
pub fn psd_project(x: &LeggedOperator) -> Result<LeggedOperator> {
    let e = eig_hermitian(x)?;
    Ok(psd_project_with(&e, x.legs().to_vec()))
}

pub(crate) fn psd_project_with(e: &EigenDecomposition, legs: Vec<usize>) -> LeggedOperator {
    let n = e.eigenvalues.len();
    let keep: Vec<usize> = (0..n).filter(|&k| e.eigenvalues[k] > 0.0).collect();
    let mut scaled = CMatrix::zeros(n, keep.len());
    let mut cols = CMatrix::zeros(n, keep.len());
    for (c, &k) in keep.iter().enumerate() {
        let w = e.eigenvalues[k];
        for i in 0..n {
            let v = e.eigenvectors[(i, k)];
            cols[(i, c)] = v;
            scaled[(i, c)] = v * w;
        }
    }
    let p = scaled * cols.adjoint();
    let p = (&p + p.adjoint()) * C64::new(0.5, 0.0);
    LeggedOperator::from_parts_unchecked(p, legs)
}

/// Contracts one leg against `D`: `(id ⊗ ρ ⊗ id)(x)`.
fn contract_one(x: &LeggedOperator, density: &CMatrix, leg: usize) -> LeggedOperator {
    let legs = x.legs();
    let d = legs[leg];
    let inner = strides(legs)[leg];
    let outer: usize = legs[..leg].iter().product();
    let out_side = outer * inner;
    let src = x.entries();
    let mut out = CMatrix::zeros(out_side, out_side);
    for a in 0..outer {
        for b in 0..inner {
            let r_out = a * inner + b;
            for a2 in 0..outer {
                for b2 in 0..inner {
                    let c_out = a2 * inner + b2;
                    let mut s = C64::new(0.0, 0.0);
                    for j in 0..d {
                        let r_in = (a * d + j) * inner + b;
                        for j2 in 0..d {
                            let coeff = density[(j2, j)];
                            if coeff.re == 0.0 && coeff.im == 0.0 {
                                continue;
                            }
                            s += coeff * src[(r_in, (a2 * d + j2) * inner + b2)];
                        }
                    }
                    out[(r_out, c_out)] = s;
                }
            }
        }
    }
    let mut new_legs = legs.to_vec();
    new_legs.remove(leg);
    if new_legs.is_empty() {
        new_legs.push(1);
    }
    LeggedOperator::from_parts_unchecked(out, new_legs)
}

/// Applies `ρ` on each listed leg (0-based) and the identity elsewhere;
/// the contracted legs are removed. Contracting every leg leaves a 1x1
/// operator on a trivial leg.
pub fn contract_legs(x: &LeggedOperator, rho: &Functional, leg_indices: &[usize]) -> Result<LeggedOperator> {
    let count = x.legs().len();
    let mut sorted = leg_indices.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != leg_indices.len() {
        return Err(Error::InvalidArgument(format!("repeated leg in {leg_indices:?}")));
    }
    for &k in &sorted {
        if k >= count {
            return Err(Error::LegOutOfRange { index: k, count });
        }
        if x.legs()[k] != rho.dim() {
            return Err(Error::LegMismatch(format!(
                "leg {k} has dimension {} but the functional acts on M_{}",
                x.legs()[k],
                rho.dim()
            )));
        }
    }
    let mut out = x.clone();
    // Highest index first keeps the remaining indices valid.
    for &k in sorted.iter().rev() {
        out = contract_one(&out, rho.density(), k);
    }
    Ok(out)
}

/// Contracts the last `count` legs with `ρ`.
pub fn contract_trailing(x: &LeggedOperator, rho: &Functional, count: usize) -> Result<LeggedOperator> {
    let legs = x.legs().len();
    if count > legs {
        return Err(Error::LegOutOfRange { index: count, count: legs });
    }
    let idx: Vec<usize> = (legs - count..legs).collect();
    contract_legs(x, rho, &idx)
}

/// Transposes the indices of one leg (0-based).
pub fn partial_transpose(x: &LeggedOperator, leg: usize) -> Result<LeggedOperator> {
    let legs = x.legs();
    if legs.len() < 2 {
        return Err(Error::InvalidArgument("partial transpose needs at least two legs".into()));
    }
    if leg >= legs.len() {
        return Err(Error::LegOutOfRange { index: leg, count: legs.len() });
    }
    let d = legs[leg];
    let stride = strides(legs)[leg];
    let side = x.side();
    let src = x.entries();
    let out = CMatrix::from_fn(side, side, |r, c| {
        let jr = (r / stride) % d;
        let jc = (c / stride) % d;
        let r2 = r - jr * stride + jc * stride;
        let c2 = c - jc * stride + jr * stride;
        src[(r2, c2)]
    });
    Ok(LeggedOperator::from_parts_unchecked(out, legs.to_vec()))
}
