//! Acceptance gate: runs every criterion and prints one PASS/FAIL line each.
//!
//! Criterion 3 cannot pass: Werner states with `1/3 < p <= 5/9` are
//! PPT-negative yet 3-extendable, so no level `l <= 3` flags them. It still
//! prints FAIL, but only other failures make the run exit non-zero, unless
//! `FINETTI_ACCEPTANCE_STRICT` is set.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use finetti_core::boundary::{
    exponential_test, grouplike_sequence, p_map, separable_image_check, subharmonic_check, GroupLike,
};
use finetti_core::hierarchy::{
    extension_adjoint, extension_map, ppt_min_eig, ppt_threshold, sub_extension_feasibility,
    validate_k_prefix, werner_scan, Evidence, FeasibilityOptions, SymSequence, Verdict,
};
use finetti_core::linalg::{hs_inner, is_psd, CMatrix, C64};
use finetti_core::random::{
    ginibre, random_faithful, random_hermitian_with_spectrum, random_psd,
    random_separable, random_subharmonic, random_unitary, seeded, TestRng,
};
use finetti_core::states::{bell_projector, werner};
use finetti_core::symmetry::{isotypic_projector, schur_weyl_table, symmetrize, Partition};
use finetti_core::{Functional, LeggedOperator, Result};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

const TOL: f64 = 1e-9;

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |a, z| a.max(z.norm()))
}

fn criterion_1() -> Result<Outcome> {
    let start = Instant::now();
    let mut rng = seeded(1001);
    let rho = Functional::trace(2);
    let opts = FeasibilityOptions::default();
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for i in 0..50 {
        let a = random_separable(2, 2, 1 + i % 5, &mut rng);
        for l in 2..=4 {
            let r = sub_extension_feasibility(&a, &rho, l, &opts)?;
            worst = worst.max(r.final_residual);
            if r.verdict != Verdict::Feasible || r.final_residual >= 1e-7 {
                failures.push(format!("#{i} l={l} {:?}", r.verdict));
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && elapsed < Duration::from_secs(300);
    outcome(
        pass,
        format!("50 separable 2x2 at l=2,3,4: {} failures, worst residual {worst:.1e}, {elapsed:.1?} {failures:?}", failures.len()),
    )
}

fn criterion_2() -> Result<Outcome> {
    let bell = bell_projector();
    let r = sub_extension_feasibility(&bell, &Functional::trace(2), 2, &FeasibilityOptions::default())?;
    let ppt = ppt_min_eig(&bell)?;
    // dual certificate Y = 3/4 I - Φ⁺: S(Y ⊗ I) ≥ 0 while ⟨Y, Φ⁺⟩ = -1/4
    let y = &LeggedOperator::identity(&[2, 2]).scale_real(0.75) - &bell;
    let lifted = symmetrize(&extension_adjoint(&y, &Functional::trace(2), 2), 1..3)?;
    let certified = is_psd(&lifted, 1e-12)? && hs_inner(&y, &bell)?.re < 0.0;
    let pass = r.verdict == Verdict::InfeasibleAtTolerance && (ppt + 0.5).abs() <= 1e-9 && certified;
    outcome(
        pass,
        format!(
            "Bell l=2: {:?} (residual {:.2e}), ppt_min_eig {ppt:.12}, dual certificate {certified}",
            r.verdict, r.final_residual
        ),
    )
}

fn criterion_3() -> Result<Outcome> {
    let start = Instant::now();
    let grid: Vec<f64> = (0..=20).map(|k| k as f64 / 20.0).collect();
    let rows = werner_scan(&grid, &Functional::trace(2), 3, &FeasibilityOptions::default())?;
    let crossings = rows.windows(2).filter(|w| (w[0].ppt_min_eig > 0.0) != (w[1].ppt_min_eig > 0.0)).count();
    let p_star = ppt_threshold(werner, 0.0, 1.0, 1e-9)?;
    // PT(w(p)) has smallest eigenvalue (1 - 3p)/4 past p = 0
    let a = crossings == 1 && (p_star - 1.0 / 3.0).abs() <= 1e-6;
    let missed: Vec<f64> = rows
        .iter()
        .filter(|r| r.ppt_min_eig < 0.0 && r.verdict != Evidence::EntangledEvidence)
        .map(|r| r.p)
        .collect();
    let b = missed.is_empty();
    let false_claims: Vec<f64> = rows
        .iter()
        .filter(|r| r.verdict == Evidence::EntangledEvidence && r.ppt_min_eig >= 0.0)
        .map(|r| r.p)
        .collect();
    let c = false_claims.is_empty();
    let elapsed = start.elapsed();
    let ps = |v: &[f64]| v.iter().map(|p| format!("{p:.2}")).collect::<Vec<_>>().join(", ");
    let flagged: Vec<f64> = rows.iter().filter(|r| r.verdict == Evidence::EntangledEvidence).map(|r| r.p).collect();
    outcome(
        a && b && c && elapsed < Duration::from_secs(900),
        format!(
            "Werner scan: (a) {} p*={p_star:.9} crossings={crossings}; (b) {} PPT-negative but not flagged at l<=3: [{}]; \
             (c) {} false claims [{}]; flagged [{}]; {elapsed:.1?}",
            pf(a),
            pf(b),
            ps(&missed),
            pf(c),
            ps(&false_claims),
            ps(&flagged)
        ),
    )
}

fn pf(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

fn random_pure_entangled(rng: &mut TestRng) -> LeggedOperator {
    let theta = rng.random_range(std::f64::consts::FRAC_PI_8..=std::f64::consts::FRAC_PI_4);
    let mut v = CMatrix::zeros(4, 1);
    v[(0, 0)] = C64::new(theta.cos(), 0.0);
    v[(3, 0)] = C64::new(theta.sin(), 0.0);
    let u = random_unitary(2, rng).kronecker(&random_unitary(2, rng));
    let v = u * v;
    LeggedOperator::new(&v * v.adjoint(), vec![2, 2]).expect("4x4")
}

/// 8 separable mixtures with 10% white noise, 6 pure entangled states,
/// 6 noisy entangled states.
fn independence_suite() -> Vec<LeggedOperator> {
    let mut rng = seeded(1004);
    let mut suite = Vec::new();
    let noise = LeggedOperator::identity(&[2, 2]).scale_real(0.1 / 4.0);
    for i in 0..8 {
        suite.push(&random_separable(2, 2, 1 + i % 5, &mut rng).scale_real(0.9) + &noise);
    }
    for _ in 0..6 {
        suite.push(random_pure_entangled(&mut rng));
    }
    suite.push(werner(0.9));
    suite.push(werner(0.95));
    for _ in 0..4 {
        let psi = random_pure_entangled(&mut rng);
        suite.push(&psi.scale_real(0.9) + &LeggedOperator::identity(&[2, 2]).scale_real(0.1 / 4.0));
    }
    suite
}

fn criterion_4() -> Result<Outcome> {
    let mut rng = seeded(1005);
    let nu = random_faithful(2, &mut rng);
    let tr = Functional::trace(2);
    let opts = FeasibilityOptions::default();
    let mut disagreements = Vec::new();
    let mut undecided = 0;
    for (i, a) in independence_suite().iter().enumerate() {
        for l in 1..=3 {
            let v1 = sub_extension_feasibility(a, &tr, l, &opts)?.verdict;
            let v2 = sub_extension_feasibility(a, &nu, l, &opts)?.verdict;
            if v1 == Verdict::MaxIterations || v2 == Verdict::MaxIterations {
                undecided += 1;
            }
            if v1 != v2 {
                disagreements.push(format!("#{i} l={l}: {v1:?} vs {v2:?}"));
            }
        }
    }
    outcome(
        disagreements.is_empty() && undecided == 0,
        format!("20 instances, l=1..3, trace vs random faithful: disagreements {disagreements:?}, undecided {undecided}"),
    )
}

fn subharmonic_suite() -> Vec<(SymSequence, Functional)> {
    let mut rng = seeded(1010);
    (0..100)
        .map(|i| {
            let rho = if i % 2 == 0 { Functional::trace(2) } else { random_faithful(2, &mut rng) };
            (random_subharmonic(2, 1 + i % 4, 4, &rho, &mut rng), rho)
        })
        .collect()
}

fn criterion_5() -> Result<Outcome> {
    let mut mismatches = 0;
    let mut not_subharmonic = 0;
    let mut non_psd = 0;
    for (seq, rho) in subharmonic_suite() {
        let s = subharmonic_check(&seq, &rho, TOL)?;
        let v = validate_k_prefix(&seq, &rho, TOL)?.valid;
        mismatches += usize::from(s != v);
        not_subharmonic += usize::from(!s);
        for x in p_map(&seq, &rho)?.entries {
            non_psd += usize::from(!is_psd(&x, TOL)?);
        }
    }
    outcome(
        mismatches == 0 && non_psd == 0 && not_subharmonic == 0,
        format!("100 sequences (L=4): {mismatches} mismatches, {not_subharmonic} not subharmonic, {non_psd} non-PSD p_map entries"),
    )
}

fn criterion_6() -> Result<Outcome> {
    let mut rng = seeded(1006);
    let mut psd_fail = 0;
    for _ in 0..200 {
        let g = GroupLike::from_operator(random_psd(2, &mut rng))?;
        psd_fail += usize::from(!exponential_test(&g, 4, TOL)?.is_exponential);
    }
    let mut mixed_pass = 0;
    for _ in 0..200 {
        let hi = rng.random_range(0.1..2.0);
        let lo = -rng.random_range(0.1..2.0);
        let g = GroupLike::from_operator(random_hermitian_with_spectrum(&[hi, lo], &mut rng))?;
        let r = exponential_test(&g, 4, TOL)?;
        mixed_pass += usize::from(r.is_exponential || r.failing_block.is_none());
    }
    let refl = exponential_test(&GroupLike::from_real_diagonal(&[1.0, -1.0])?, 2, TOL)?;
    let failed: Vec<String> = refl.failures().map(|c| c.partition.to_string()).collect();
    let refl_ok = refl.failing_block == Some(Partition::new(vec![1])?) && failed.contains(&"(2)".to_string());
    outcome(
        psd_fail == 0 && mixed_pass == 0 && refl_ok,
        format!("PSD failures {psd_fail}/200, mixed-sign passes {mixed_pass}/200, diag(1,-1) failing blocks {failed:?}"),
    )
}

fn criterion_7() -> Result<Outcome> {
    let table = schur_weyl_table(2, 3)?;
    let got: Vec<(String, usize, usize)> =
        table.iter().map(|e| (e.partition.to_string(), e.block_dim, e.multiplicity)).collect();
    let want = vec![("(3)".to_string(), 4, 1), ("(2,1)".to_string(), 2, 2)];
    let total: usize = table.iter().map(|e| e.block_dim * e.multiplicity).sum();
    let mut worst = 0.0f64;
    for lam in Partition::all(3) {
        let p = isotypic_projector(2, 3, &lam)?.into_entries();
        worst = worst.max(max_abs(&(&p * &p - &p))).max(max_abs(&(&p - p.adjoint())));
    }
    outcome(got == want && total == 8 && worst < 1e-10, format!("table {got:?}, sum {total}, projector residual {worst:.1e}"))
}

fn criterion_8() -> Result<Outcome> {
    let mut rng = seeded(1008);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let a = random_psd(2, &mut rng);
        let g = GroupLike::from_operator(random_psd(2, &mut rng))?;
        let rho = random_faithful(2, &mut rng);
        let seq = grouplike_sequence(&a, &g, 4)?;
        let image = p_map(&seq, &rho)?;
        let r = rho.apply(g.matrix().entries())?;
        for (x, y) in image.entries.iter().zip(&seq.truncate(3).entries) {
            worst = worst.max(x.max_abs_diff(&y.scale(r))?);
        }
    }
    outcome(worst < 1e-10, format!("50 random (a, t, rho): max error {worst:.1e}"))
}

fn criterion_9() -> Result<Outcome> {
    let mut rng = seeded(1009);
    let mut worst = 0.0f64;
    for l in 1..=4 {
        for _ in 0..10 {
            let rho = random_faithful(2, &mut rng);
            let w = LeggedOperator::new(ginibre(4, &mut rng), vec![2, 2])?;
            let got = extension_map(&extension_adjoint(&w, &rho, l), &rho, l)?;
            let want = w.scale_real(rho.hs_norm_sqr().powi(l as i32 - 1));
            worst = worst.max(got.max_abs_diff(&want)? / want.max_abs().max(1.0));
        }
    }
    outcome(worst <= 1e-12, format!("l=1..4, 40 random inputs: max relative error {worst:.1e}"))
}

fn criterion_10() -> Result<Outcome> {
    let opts = FeasibilityOptions::default();
    let mut entangled = 0;
    let mut undetermined = 0;
    for (seq, rho) in subharmonic_suite() {
        match separable_image_check(&seq, &rho, 3, TOL, &opts)?.verdict {
            Evidence::EntangledEvidence => entangled += 1,
            Evidence::Undetermined => undetermined += 1,
            Evidence::SeparableEvidence => {}
        }
    }
    outcome(entangled == 0, format!("100 subharmonic sequences, level-1 images up to l=3: {entangled} entangled, {undetermined} undetermined"))
}

/// Criteria whose failure is a property of the mathematics, not of the code.
const KNOWN_UNATTAINABLE: &[usize] = &[3];

fn main() -> ExitCode {
    let strict = std::env::var_os("FINETTI_ACCEPTANCE_STRICT").is_some();
    let criteria: [(&str, fn() -> Result<Outcome>); 10] = [
        ("1 de Finetti forward direction", criterion_1),
        ("2 entanglement detection", criterion_2),
        ("3 Werner scan", criterion_3),
        ("4 functional independence", criterion_4),
        ("5 bridge identity", criterion_5),
        ("6 exponential classification", criterion_6),
        ("7 Schur-Weyl table", criterion_7),
        ("8 eigen-relation", criterion_8),
        ("9 adjoint identity", criterion_9),
        ("10 level-one images separable", criterion_10),
    ];
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.into_iter().enumerate() {
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed.push(k + 1);
        }
        println!("criterion {name}: {} - {detail}", pf(pass));
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed.len());
    let unexpected: Vec<usize> = failed.iter().copied().filter(|k| strict || !KNOWN_UNATTAINABLE.contains(k)).collect();
    if failed.len() > unexpected.len() {
        println!("acceptance: known unattainable failures {:?} do not fail the run", KNOWN_UNATTAINABLE);
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
