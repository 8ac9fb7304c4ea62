//! Extension feasibility by Dykstra's alternating projections.
//!
//! For `a` on legs `[m, n]` and a level `l`, the unknown `b` lives on
//! `[m, n^l]`. With `Φ(b) = (id_m ⊗ id_n ⊗ ρ^{⊗(l-1)})(b)` the solver looks
//! for a point of
//!
//! - [`ExtensionMode::Exact`]: `{b ≥ 0} ∩ {b S_l-invariant, Φ(b) = a}`;
//! - [`ExtensionMode::Sub`]: `{(b, s) ≥ 0} ∩ {b S_l-invariant, Φ(b) + s = a}`.
//!
//! The sub-extension problem is always feasible (`b = 0`, `s = a`), so it
//! carries no information about `a`; it is kept for completeness. Exact
//! extension is the default.
//!
//! Projection onto the affine set uses `Φ*(w) = w ⊗ D^{⊗(l-1)}` and the
//! closed form of `M = Φ S Φ*`: with `τ = Tr(D²)`,
//! `R(w) = (id ⊗ ρ)(w) ⊗ D` and the orthogonal projection `Q = R/τ`,
//! `M = α(I - Q) + τ^{l-1} Q` where `α = τ^{l-1}/l`.
//!
//! The iteration runs on the whitened problem: with `G = D^{-1/2}`,
//! `b = (1 ⊗ G^{⊗l}) b' (1 ⊗ G^{⊗l})` is a `ρ`-extension of `a` iff `b'` is a
//! trace extension of `a' = (1 ⊗ D^{1/2}) a (1 ⊗ D^{1/2})`. The congruence
//! keeps positivity and symmetry, and removes the anisotropy of `D` that
//! otherwise slows the projections down by orders of magnitude. Witnesses
//! are mapped back and validated against the original `ρ`.

use serde::{Deserialize, Serialize};

use super::sequence::level_legs;
use crate::error::{Error, Result};
use crate::linalg::{
    contract_trailing, eig_hermitian, eig_hermitian_from, is_psd, loewner_leq, psd_project_with, tensor, tensor_power,
    CMatrix, Functional, LeggedOperator, PSD_TOL,
};
use crate::symmetry::{symmetrize, symmetry_defect, ENUMERATION_BOUND};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionMode {
    #[default]
    Exact,
    Sub,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityOptions {
    pub tol: f64,
    pub max_iterations: usize,
    /// Cycles over which the plateau test compares residuals.
    pub window: usize,
    /// Relative residual decrease below which a window counts as stalled.
    pub plateau: f64,
    pub mode: ExtensionMode,
}

impl Default for FeasibilityOptions {
    fn default() -> Self {
        Self { tol: 1e-7, max_iterations: 20_000, window: 500, plateau: 1e-3, mode: ExtensionMode::Exact }
    }
}

impl FeasibilityOptions {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidArgument(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iterations == 0 || self.window == 0 {
            return Err(Error::InvalidArgument("max_iterations and window must be positive".into()));
        }
        if !(self.plateau >= 0.0) {
            return Err(Error::InvalidArgument("plateau threshold must be non-negative".into()));
        }
        Ok(())
    }
}

/// Outcome of one feasibility run. `InfeasibleAtTolerance` is a numerical
/// verdict (the residual stalled above `tol`), not a certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Feasible,
    InfeasibleAtTolerance,
    MaxIterations,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub level: usize,
    pub mode: ExtensionMode,
    pub verdict: Verdict,
    pub witness: Option<LeggedOperator>,
    pub final_residual: f64,
    pub residual_history: Vec<f64>,
    pub iterations: usize,
}

/// `Φ(b)`: contracts the trailing `l - 1` legs.
pub fn extension_map(b: &LeggedOperator, rho: &Functional, l: usize) -> Result<LeggedOperator> {
    contract_trailing(b, rho, l.saturating_sub(1))
}

/// `Φ*(w) = w ⊗ D^{⊗(l-1)}`.
pub fn extension_adjoint(w: &LeggedOperator, rho: &Functional, l: usize) -> LeggedOperator {
    if l <= 1 {
        return w.clone();
    }
    tensor(w, &tensor_power(&rho.as_operator(), l - 1))
}

/// Post-hoc check of a witness: PSD, `S_l`-invariant, and `Φ(b) = a`
/// (exact) or `Φ(b) ≤ a` (sub), all at tolerance `tol`.
pub fn check_witness(
    b: &LeggedOperator,
    a: &LeggedOperator,
    rho: &Functional,
    l: usize,
    mode: ExtensionMode,
    tol: f64,
) -> Result<bool> {
    let want = level_legs(a.legs()[0], rho.dim(), l);
    if b.legs() != want.as_slice() {
        return Err(Error::LegMismatch(format!("witness legs {:?}, expected {want:?}", b.legs())));
    }
    if !b.is_hermitian() || !is_psd(b, tol)? {
        return Ok(false);
    }
    if l >= 2 && symmetry_defect(b, 1..l + 1)? > tol * b.max_abs().max(1.0) {
        return Ok(false);
    }
    let image = extension_map(b, rho, l)?;
    match mode {
        ExtensionMode::Exact => Ok(image.max_abs_diff(a)? <= tol * a.max_abs().max(1.0)),
        ExtensionMode::Sub => loewner_leq(&image, a, tol),
    }
}

/// Affine projection data for one `(a, ρ, l)`.
struct AffineProjector<'a> {
    a: &'a LeggedOperator,
    rho: &'a Functional,
    l: usize,
    d_op: LeggedOperator,
    /// `τ^{l-1}`
    tau_pow: f64,
    /// `Tr(D²)`
    tau: f64,
    alpha: f64,
    /// `D^{⊗(l-1)}`, reused by every `Φ*`.
    tail: Option<LeggedOperator>,
}

impl<'a> AffineProjector<'a> {
    fn new(a: &'a LeggedOperator, rho: &'a Functional, l: usize) -> Self {
        let tau = rho.hs_norm_sqr();
        let tau_pow = tau.powi(l as i32 - 1);
        let d_op = rho.as_operator();
        let tail = (l >= 2).then(|| tensor_power(&d_op, l - 1));
        Self { a, rho, l, d_op, tau_pow, tau, alpha: tau_pow / l as f64, tail }
    }

    fn sym(&self, z: &LeggedOperator) -> Result<LeggedOperator> {
        if self.l >= 2 {
            symmetrize(z, 1..self.l + 1)
        } else {
            Ok(z.clone())
        }
    }

    fn adjoint(&self, w: &LeggedOperator) -> LeggedOperator {
        match &self.tail {
            Some(t) => tensor(w, t),
            None => w.clone(),
        }
    }

    /// `Q w = (id ⊗ ρ)(w) ⊗ D / τ`.
    fn q(&self, w: &LeggedOperator) -> Result<LeggedOperator> {
        let c = contract_trailing(w, self.rho, 1)?;
        let c = c.with_legs(vec![w.legs()[0]])?;
        Ok(tensor(&c, &self.d_op).scale_real(1.0 / self.tau))
    }

    /// `(M + shift·I)^{-1} r`.
    fn solve(&self, r: &LeggedOperator, shift: f64) -> Result<LeggedOperator> {
        if self.l <= 1 {
            return Ok(r.scale_real(1.0 / (1.0 + shift)));
        }
        let qr = self.q(r)?;
        let perp = r.try_sub(&qr)?;
        Ok(&perp.scale_real(1.0 / (self.alpha + shift)) + &qr.scale_real(1.0 / (self.tau_pow + shift)))
    }

    /// Projection onto `{b sym, Φ(b) = a}`.
    fn project_exact(&self, z: &LeggedOperator) -> Result<LeggedOperator> {
        let sz = self.sym(z)?;
        let r = self.a.try_sub(&extension_map(&sz, self.rho, self.l)?)?;
        let w = self.solve(&r, 0.0)?;
        Ok(&sz + &self.sym(&self.adjoint(&w))?)
    }

    /// Projection of `(z, t)` onto `{(b, s): b sym, Φ(b) + s = a}`.
    fn project_sub(&self, z: &LeggedOperator, t: &LeggedOperator) -> Result<(LeggedOperator, LeggedOperator)> {
        let sz = self.sym(z)?;
        let r = self.a.try_sub(&extension_map(&sz, self.rho, self.l)?)?.try_sub(t)?;
        let w = self.solve(&r, 1.0)?;
        Ok((&sz + &self.sym(&self.adjoint(&w))?, t + &w))
    }
}

/// Nearest PSD operator, warm-starting the eigensolver from `basis` and
/// storing the new eigenbasis there.
fn psd_project_warm(x: &LeggedOperator, basis: &mut CMatrix) -> Result<LeggedOperator> {
    let e = eig_hermitian_from(&x.hermitian_part(), basis)?;
    let out = psd_project_with(&e, x.legs().to_vec());
    *basis = e.eigenvectors;
    Ok(out)
}

/// `(1 ⊗ D^{1/2}) a (1 ⊗ D^{1/2})` and the back-transform `1 ⊗ (D^{-1/2})^{⊗l}`.
fn whiten(a: &LeggedOperator, rho: &Functional, l: usize) -> Result<(LeggedOperator, LeggedOperator)> {
    let e = eig_hermitian(&rho.as_operator())?;
    let half = LeggedOperator::from_matrix(e.apply_spectral(f64::sqrt))?;
    let inv_half = LeggedOperator::from_matrix(e.apply_spectral(|v| 1.0 / v.sqrt()))?;
    let id_m = LeggedOperator::identity(&[a.legs()[0]]);
    let f = tensor(&id_m, &half);
    let a_white = f.matmul(a)?.matmul(&f)?.hermitian_part();
    Ok((a_white, tensor(&id_m, &tensor_power(&inv_half, l))))
}

fn unwhiten(x: &LeggedOperator, back: &LeggedOperator) -> Result<LeggedOperator> {
    Ok(back.matmul(x)?.matmul(back)?.hermitian_part())
}

/// Searches for an `l`-extension (or sub-extension) of `a` with respect to
/// `ρ`; see the module documentation for the two formulations.
pub fn sub_extension_feasibility(
    a: &LeggedOperator,
    rho: &Functional,
    l: usize,
    opts: &FeasibilityOptions,
) -> Result<FeasibilityReport> {
    opts.validate()?;
    if l == 0 {
        return Err(Error::InvalidArgument("level must be at least 1".into()));
    }
    if l > ENUMERATION_BOUND {
        return Err(Error::EnumerationBound { l, bound: ENUMERATION_BOUND });
    }
    if a.legs().len() != 2 || a.legs()[1] != rho.dim() {
        return Err(Error::LegMismatch(format!(
            "expected a bipartite operator on [m, {}], got legs {:?}",
            rho.dim(),
            a.legs()
        )));
    }
    a.ensure_hermitian()?;
    if !is_psd(a, PSD_TOL)? {
        return Err(Error::NotPsd { min_eigenvalue: crate::linalg::min_eigenvalue(a)? });
    }
    let a = a.hermitian_part();
    let legs = level_legs(a.legs()[0], rho.dim(), l);
    let report = |verdict, witness, history: Vec<f64>| FeasibilityReport {
        level: l,
        mode: opts.mode,
        verdict,
        witness,
        final_residual: history.last().copied().unwrap_or(0.0),
        iterations: history.len(),
        residual_history: history,
    };
    let a_norm = a.frobenius_norm();
    if a_norm == 0.0 {
        return Ok(report(Verdict::Feasible, Some(LeggedOperator::zeros(&legs)), Vec::new()));
    }
    let (a_white, back) = whiten(&a, rho, l)?;
    let trace = Functional::trace(rho.dim());
    let proj = AffineProjector::new(&a_white, &trace, l);
    let a_norm = a_white.frobenius_norm();
    let side: usize = legs.iter().product();
    let check_tol = 10.0 * opts.tol;
    let mut history = Vec::new();
    let mut basis_b = CMatrix::identity(side, side);

    match opts.mode {
        ExtensionMode::Exact => {
            let mut x = LeggedOperator::zeros(&legs);
            let mut p = x.clone();
            let mut q = x.clone();
            for _ in 0..opts.max_iterations {
                let xp = &x + &p;
                let y = psd_project_warm(&xp, &mut basis_b)?;
                p = &xp - &y;
                let yq = &y + &q;
                let xn = proj.project_exact(&yq)?;
                q = &yq - &xn;
                let r = ((&xn - &y).frobenius_norm() + (&xn - &x).frobenius_norm()) / a_norm;
                x = xn;
                history.push(r);
                if r < opts.tol {
                    let b = unwhiten(&x, &back)?;
                    if check_witness(&b, &a, rho, l, opts.mode, check_tol)? {
                        return Ok(report(Verdict::Feasible, Some(b), history));
                    }
                }
                if stalled(&history, opts) {
                    return Ok(report(Verdict::InfeasibleAtTolerance, None, history));
                }
            }
        }
        ExtensionMode::Sub => {
            let m = a.legs()[0];
            let mut basis_s = CMatrix::identity(m * rho.dim(), m * rho.dim());
            let mut x = LeggedOperator::zeros(&legs);
            let mut s = LeggedOperator::zeros(a.legs());
            let (mut p, mut ps) = (x.clone(), s.clone());
            let (mut q, mut qs) = (x.clone(), s.clone());
            for _ in 0..opts.max_iterations {
                let xp = &x + &p;
                let sp = &s + &ps;
                let y = psd_project_warm(&xp, &mut basis_b)?;
                let ys = psd_project_warm(&sp, &mut basis_s)?;
                p = &xp - &y;
                ps = &sp - &ys;
                let yq = &y + &q;
                let ysq = &ys + &qs;
                let (xn, sn) = proj.project_sub(&yq, &ysq)?;
                q = &yq - &xn;
                qs = &ysq - &sn;
                let moved = ((&xn - &x).frobenius_norm().powi(2) + (&sn - &s).frobenius_norm().powi(2)).sqrt();
                let gap = ((&xn - &y).frobenius_norm().powi(2) + (&sn - &ys).frobenius_norm().powi(2)).sqrt();
                let r = (gap + moved) / a_norm;
                x = xn;
                s = sn;
                history.push(r);
                if r < opts.tol {
                    let b = unwhiten(&x, &back)?;
                    if check_witness(&b, &a, rho, l, opts.mode, check_tol)? {
                        return Ok(report(Verdict::Feasible, Some(b), history));
                    }
                }
                if stalled(&history, opts) {
                    return Ok(report(Verdict::InfeasibleAtTolerance, None, history));
                }
            }
        }
    }
    Ok(report(Verdict::MaxIterations, None, history))
}

fn stalled(history: &[f64], opts: &FeasibilityOptions) -> bool {
    let k = history.len();
    if k <= opts.window {
        return false;
    }
    let now = history[k - 1];
    let before = history[k - 1 - opts.window];
    now > opts.tol && before - now <= opts.plateau * before
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hs_inner, C64};
    use crate::random::{random_faithful, random_hermitian, random_psd, random_separable, seeded};
    use crate::states::bell_projector;

    fn random_on(legs: &[usize], rng: &mut crate::random::TestRng) -> LeggedOperator {
        let side = legs.iter().product();
        random_hermitian(side, rng).with_legs(legs.to_vec()).unwrap()
    }

    #[test]
    fn adjoint_pairing() {
        let mut rng = seeded(21);
        for l in 1..=4 {
            let rho = random_faithful(2, &mut rng);
            let b = random_on(&level_legs(2, 2, l), &mut rng);
            let w = random_on(&[2, 2], &mut rng);
            let lhs = hs_inner(&extension_map(&b, &rho, l).unwrap(), &w).unwrap();
            let rhs = hs_inner(&b, &extension_adjoint(&w, &rho, l)).unwrap();
            assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
        }
    }

    #[test]
    fn map_after_adjoint_is_scalar() {
        let mut rng = seeded(22);
        for l in 1..=4 {
            let rho = random_faithful(2, &mut rng);
            let w = random_on(&[2, 2], &mut rng);
            let got = extension_map(&extension_adjoint(&w, &rho, l), &rho, l).unwrap();
            let want = w.scale_real(rho.hs_norm_sqr().powi(l as i32 - 1));
            assert!(got.max_abs_diff(&want).unwrap() < 1e-12 * want.max_abs().max(1.0));
        }
    }

    #[test]
    fn closed_form_of_symmetrized_normal_operator() {
        let mut rng = seeded(23);
        for l in 2..=4 {
            let rho = random_faithful(2, &mut rng);
            let a = random_psd(4, &mut rng).with_legs(vec![2, 2]).unwrap();
            let proj = AffineProjector::new(&a, &rho, l);
            let w = random_on(&[2, 2], &mut rng);
            let direct = extension_map(&proj.sym(&extension_adjoint(&w, &rho, l)).unwrap(), &rho, l).unwrap();
            let qw = proj.q(&w).unwrap();
            let formula = &w.try_sub(&qw).unwrap().scale_real(proj.alpha) + &qw.scale_real(proj.tau_pow);
            assert!(direct.max_abs_diff(&formula).unwrap() < 1e-12);
            // Q is an orthogonal projection
            assert!(proj.q(&qw).unwrap().max_abs_diff(&qw).unwrap() < 1e-12);
            let back = proj.solve(&direct, 0.0).unwrap();
            assert!(back.max_abs_diff(&w).unwrap() < 1e-10);
        }
    }

    #[test]
    fn affine_projection_is_idempotent_and_lands_in_the_set() {
        let mut rng = seeded(24);
        let rho = random_faithful(2, &mut rng);
        let a = random_psd(4, &mut rng).with_legs(vec![2, 2]).unwrap();
        let proj = AffineProjector::new(&a, &rho, 3);
        let z = random_on(&[2, 2, 2, 2], &mut rng);
        let x = proj.project_exact(&z).unwrap();
        assert!(extension_map(&x, &rho, 3).unwrap().max_abs_diff(&a).unwrap() < 1e-12);
        assert!(symmetry_defect(&x, 1..4).unwrap() < 1e-12);
        assert!(proj.project_exact(&x).unwrap().max_abs_diff(&x).unwrap() < 1e-12);
        // z - P(z) is orthogonal to the direction space: compare against another point of the set
        let x2 = proj.project_exact(&random_on(&[2, 2, 2, 2], &mut rng)).unwrap();
        let ip = hs_inner(&z.try_sub(&x).unwrap(), &x2.try_sub(&x).unwrap()).unwrap();
        assert!(ip.norm() < 1e-10);
    }

    #[test]
    fn product_state_is_extendable() {
        let mut rng = seeded(25);
        let rho = Functional::trace(2);
        let p = random_psd(2, &mut rng);
        let q = random_psd(2, &mut rng);
        let a = tensor(&p, &q);
        for l in 1..=4 {
            let r = sub_extension_feasibility(&a, &rho, l, &FeasibilityOptions::default()).unwrap();
            assert_eq!(r.verdict, Verdict::Feasible, "level {l}: residual {}", r.final_residual);
            assert!(r.final_residual < 1e-7);
            let w = r.witness.unwrap();
            assert!(check_witness(&w, &a, &rho, l, ExtensionMode::Exact, 1e-6).unwrap());
        }
    }

    #[test]
    fn explicit_product_witness_is_valid() {
        let mut rng = seeded(26);
        let rho = random_faithful(2, &mut rng);
        let p = random_psd(2, &mut rng);
        let q = random_psd(2, &mut rng);
        let rq = rho.apply(q.entries()).unwrap().re;
        for l in 1..=4 {
            let w = tensor(&p, &tensor_power(&q, l)).scale_real(rq.powi(1 - l as i32));
            assert!(check_witness(&w, &tensor(&p, &q), &rho, l, ExtensionMode::Exact, 1e-9).unwrap());
        }
    }

    #[test]
    fn bell_state_is_not_two_extendable() {
        let r = sub_extension_feasibility(&bell_projector(), &Functional::trace(2), 2, &FeasibilityOptions::default())
            .unwrap();
        assert_eq!(r.verdict, Verdict::InfeasibleAtTolerance);
        assert!(r.final_residual > 1e-3);
        assert!(r.witness.is_none());
    }

    /// Independent dual certificate: `Y = (3/4) I - Φ⁺` has
    /// `S(Y ⊗ I) ≥ 0` on `2 ⊗ 2 ⊗ 2` yet `⟨Y, Φ⁺⟩ < 0`, so no 2-extension of
    /// `Φ⁺` exists for `ρ = Tr`.
    #[test]
    fn bell_dual_certificate() {
        let y = &LeggedOperator::identity(&[2, 2]).scale_real(0.75) - &bell_projector();
        let lifted = symmetrize(&extension_adjoint(&y, &Functional::trace(2), 2), 1..3).unwrap();
        assert!(is_psd(&lifted, 1e-12).unwrap());
        let ip = hs_inner(&y, &bell_projector()).unwrap();
        assert!((ip - C64::new(-0.25, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn maximally_mixed_with_normalized_trace() {
        let a = LeggedOperator::identity(&[2, 2]);
        let rho = Functional::normalized_trace(2);
        let r = sub_extension_feasibility(&a, &rho, 3, &FeasibilityOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Feasible);
        let w = r.witness.unwrap();
        assert!(w.max_abs_diff(&LeggedOperator::identity(&[2, 2, 2, 2])).unwrap() < 1e-6);
    }

    #[test]
    fn zero_is_trivially_feasible() {
        let r = sub_extension_feasibility(&LeggedOperator::zeros(&[2, 2]), &Functional::trace(2), 3, &FeasibilityOptions::default())
            .unwrap();
        assert_eq!((r.verdict, r.iterations), (Verdict::Feasible, 0));
        assert_eq!(r.witness.unwrap().legs(), &[2, 2, 2, 2]);
    }

    #[test]
    fn sub_mode_accepts_entangled_states() {
        let opts = FeasibilityOptions { mode: ExtensionMode::Sub, ..Default::default() };
        let r = sub_extension_feasibility(&bell_projector(), &Functional::trace(2), 2, &opts).unwrap();
        assert_eq!(r.verdict, Verdict::Feasible);
        let w = r.witness.unwrap();
        assert!(check_witness(&w, &bell_projector(), &Functional::trace(2), 2, ExtensionMode::Sub, 1e-6).unwrap());
    }

    #[test]
    fn monotone_under_compression() {
        let mut rng = seeded(27);
        let rho = random_faithful(2, &mut rng);
        let a = random_separable(2, 2, 3, &mut rng);
        let r = sub_extension_feasibility(&a, &rho, 4, &FeasibilityOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Feasible);
        let b = r.witness.unwrap();
        for l in 1..4 {
            let c = super::super::compress_chain(&b, &rho, l).unwrap();
            assert!(check_witness(&c, &a, &rho, l, ExtensionMode::Exact, 1e-6).unwrap(), "level {l}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        let opts = FeasibilityOptions::default();
        let rho = Functional::trace(2);
        let neg = LeggedOperator::from_real_diagonal(&[1.0, -1.0, 1.0, 1.0]).with_legs(vec![2, 2]).unwrap();
        assert!(matches!(sub_extension_feasibility(&neg, &rho, 2, &opts), Err(Error::NotPsd { .. })));
        assert!(sub_extension_feasibility(&bell_projector(), &rho, 0, &opts).is_err());
        assert!(sub_extension_feasibility(&LeggedOperator::identity(&[4]), &rho, 2, &opts).is_err());
        let bad = FeasibilityOptions { tol: 0.0, ..opts };
        assert!(sub_extension_feasibility(&bell_projector(), &rho, 2, &bad).is_err());
    }
}
