use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::feasibility::{sub_extension_feasibility, FeasibilityOptions, FeasibilityReport, Verdict};
use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, partial_transpose, Functional, LeggedOperator};
use crate::states::werner;

/// Finite-level evidence. No finite level proves separability, and
/// `EntangledEvidence` rests on a numerical infeasibility verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    SeparableEvidence,
    EntangledEvidence,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityReport {
    pub verdict: Evidence,
    /// First level reported infeasible, if any.
    pub entangled_at: Option<usize>,
    pub levels: Vec<FeasibilityReport>,
    /// Present for `2 ⊗ 2`, `2 ⊗ 3` and `3 ⊗ 2`, where PPT is exact.
    pub ppt_min_eig: Option<f64>,
}

/// Smallest eigenvalue of the partial transpose on the second leg.
pub fn ppt_min_eig(a: &LeggedOperator) -> Result<f64> {
    if a.legs().len() != 2 {
        return Err(Error::LegMismatch(format!("expected a bipartite operator, got legs {:?}", a.legs())));
    }
    a.ensure_hermitian()?;
    min_eigenvalue(&partial_transpose(a, 1)?)
}

fn ppt_is_exact(legs: &[usize]) -> bool {
    matches!(legs, [2, 2] | [2, 3] | [3, 2])
}

/// Runs the extension test at levels `2..=max_l` and combines the results:
/// any infeasible level gives `EntangledEvidence`, any undecided level
/// (iteration cap) gives `Undetermined`, otherwise `SeparableEvidence`.
pub fn separability_verdict(
    a: &LeggedOperator,
    rho: &Functional,
    max_l: usize,
    opts: &FeasibilityOptions,
) -> Result<SeparabilityReport> {
    if max_l < 2 {
        return Err(Error::InvalidArgument(format!("max level must be at least 2, got {max_l}")));
    }
    let levels: Vec<FeasibilityReport> =
        (2..=max_l).into_par_iter().map(|l| sub_extension_feasibility(a, rho, l, opts)).collect::<Result<_>>()?;
    let entangled_at = levels.iter().find(|r| r.verdict == Verdict::InfeasibleAtTolerance).map(|r| r.level);
    let verdict = if entangled_at.is_some() {
        Evidence::EntangledEvidence
    } else if levels.iter().any(|r| r.verdict == Verdict::MaxIterations) {
        Evidence::Undetermined
    } else {
        Evidence::SeparableEvidence
    };
    let ppt_min_eig = if ppt_is_exact(a.legs()) { Some(ppt_min_eig(a)?) } else { None };
    Ok(SeparabilityReport { verdict, entangled_at, levels, ppt_min_eig })
}

/// Bisection for the root of `p ↦ ppt_min_eig(family(p))` on `[lo, hi]`,
/// which must bracket a sign change.
pub fn ppt_threshold(family: impl Fn(f64) -> LeggedOperator, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let f = |p: f64| ppt_min_eig(&family(p));
    let (mut lo, mut hi) = (lo, hi);
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if flo.signum() == fhi.signum() {
        return Err(Error::InvalidArgument(format!("no sign change on [{lo}, {hi}] ({flo:.3e}, {fhi:.3e})")));
    }
    let lo_positive = flo > 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if (f(mid)? > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub level: usize,
    pub verdict: Verdict,
    pub final_residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WernerRow {
    pub p: f64,
    pub ppt_min_eig: f64,
    pub verdict: Evidence,
    pub levels: Vec<LevelSummary>,
}

/// Separability verdicts along `p |Ψ⁻⟩⟨Ψ⁻| + (1 - p) I/4`, in grid order.
pub fn werner_scan(grid: &[f64], rho: &Functional, max_l: usize, opts: &FeasibilityOptions) -> Result<Vec<WernerRow>> {
    if let Some(p) = grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidArgument(format!("Werner parameter {p} outside [0, 1]")));
    }
    grid.par_iter()
        .map(|&p| {
            let rep = separability_verdict(&werner(p), rho, max_l, opts)?;
            Ok(WernerRow {
                p,
                ppt_min_eig: rep.ppt_min_eig.expect("2 ⊗ 2"),
                verdict: rep.verdict,
                levels: rep
                    .levels
                    .iter()
                    .map(|r| LevelSummary {
                        level: r.level,
                        verdict: r.verdict,
                        final_residual: r.final_residual,
                        iterations: r.iterations,
                    })
                    .collect(),
            })
        })
        .collect()
}
