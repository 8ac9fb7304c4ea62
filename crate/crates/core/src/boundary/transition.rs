use crate::error::{Error, Result};
use crate::hierarchy::{separability_verdict, FeasibilityOptions, SeparabilityReport, SymSequence};
use crate::linalg::{contract_trailing, is_psd, loewner_leq, Functional};
use crate::symmetry::symmetry_defect;

/// Transition operator on sequence images: `(P x)_l = (id ⊗ ρ)(x_{l+1})`,
/// the last leg contracted. The result is one level shorter.
pub fn p_map(seq: &SymSequence, rho: &Functional) -> Result<SymSequence> {
    if seq.len() == 0 {
        return Err(Error::Precondition("the transition operator needs at least x_0 and x_1".into()));
    }
    if rho.dim() != seq.n {
        return Err(Error::DimensionMismatch(format!("functional on M_{} for n = {}", rho.dim(), seq.n)));
    }
    let entries = seq.entries[1..].iter().map(|x| contract_trailing(x, rho, 1)).collect::<Result<_>>()?;
    SymSequence::new(seq.m, seq.n, entries)
}

/// `P(x) ≤ x` levelwise, with every level Hermitian, PSD and symmetric.
pub fn subharmonic_check(seq: &SymSequence, rho: &Functional, tol: f64) -> Result<bool> {
    let image = p_map(seq, rho)?;
    for (l, x) in seq.entries.iter().enumerate() {
        if !x.is_hermitian() || !is_psd(x, tol)? {
            return Ok(false);
        }
        if l >= 2 && symmetry_defect(x, 1..l + 1)? > tol * x.max_abs().max(1.0) {
            return Ok(false);
        }
        if l < image.entries.len() && !loewner_leq(&image.entries[l].hermitian_part(), x, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Runs the separability test on the level-1 image `x_1` of a subharmonic
/// sequence. Sequences that fail [`subharmonic_check`] are rejected.
pub fn separable_image_check(
    seq: &SymSequence,
    rho: &Functional,
    max_l: usize,
    tol: f64,
    opts: &FeasibilityOptions,
) -> Result<SeparabilityReport> {
    if !subharmonic_check(seq, rho, tol)? {
        return Err(Error::Precondition("sequence is not subharmonic".into()));
    }
    let x1 = seq.level(1).ok_or_else(|| Error::Precondition("sequence has no level 1".into()))?;
    separability_verdict(&x1.hermitian_part(), rho, max_l, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{e_rho_value, grouplike_sequence, GroupLike};
    use crate::hierarchy::{validate_k_prefix, Evidence};
    use crate::linalg::{contract_legs, LeggedOperator};
    use crate::random::{ginibre, random_faithful, random_hermitian, random_psd, seeded, TestRng};

    fn sub_grouplike(rng: &mut TestRng, rho: &Functional, mass: f64) -> GroupLike {
        let t = random_psd(2, rng);
        let r = rho.apply(t.entries()).unwrap().re;
        GroupLike::from_operator(t.scale_real(mass / r)).unwrap()
    }

    #[test]
    fn eigen_relation_on_grouplike_sequences() {
        let mut rng = seeded(51);
        for _ in 0..10 {
            let rho = random_faithful(2, &mut rng);
            let g = GroupLike::new(ginibre(2, &mut rng)).unwrap();
            let a = random_psd(3, &mut rng);
            let s = grouplike_sequence(&a, &g, 4).unwrap();
            let p = p_map(&s, &rho).unwrap();
            let r = rho.apply(g.matrix().entries()).unwrap();
            let shifted = s.truncate(3);
            for (x, y) in p.entries.iter().zip(&shifted.entries) {
                assert!(x.max_abs_diff(&y.scale(r)).unwrap() < 1e-10);
            }
        }
    }

    #[test]
    fn p_map_preserves_positivity() {
        let mut rng = seeded(52);
        let rho = random_faithful(2, &mut rng);
        let x2 = random_psd(8, &mut rng).with_legs(vec![2, 2, 2]).unwrap();
        let seq = SymSequence::new(
            2,
            2,
            vec![LeggedOperator::zeros(&[2]), LeggedOperator::zeros(&[2, 2]), x2],
        )
        .unwrap();
        let p = p_map(&seq, &rho).unwrap();
        assert!(is_psd(&p.entries[1], 1e-12).unwrap());
        assert!(p_map(&p.truncate(0), &rho).is_err());
    }

    /// Contracting a leg with ν and the last leg with ρ commute.
    #[test]
    fn commutes_with_second_contraction() {
        let mut rng = seeded(53);
        let rho = random_faithful(2, &mut rng);
        let nu = random_faithful(2, &mut rng);
        let x = random_hermitian(16, &mut rng).with_legs(vec![2, 2, 2, 2]).unwrap();
        let one = contract_legs(&contract_trailing(&x, &rho, 1).unwrap(), &nu, &[1]).unwrap();
        let two = contract_trailing(&contract_legs(&x, &nu, &[1]).unwrap(), &rho, 1).unwrap();
        assert!(one.max_abs_diff(&two).unwrap() < 1e-12);
    }

    #[test]
    fn subharmonic_examples() {
        let mut rng = seeded(54);
        let rho = Functional::trace(2);
        let a = random_psd(2, &mut rng);
        let g = sub_grouplike(&mut rng, &rho, 0.8);
        let s1 = grouplike_sequence(&a, &g, 4).unwrap();
        assert!(subharmonic_check(&s1, &rho, 1e-9).unwrap());
        let heavy = sub_grouplike(&mut rng, &rho, 1.3);
        assert!(e_rho_value(&heavy, &rho).unwrap() > 1.0);
        assert!(!subharmonic_check(&grouplike_sequence(&a, &heavy, 4).unwrap(), &rho, 1e-9).unwrap());
        let g2 = sub_grouplike(&mut rng, &rho, 1.0);
        let s2 = grouplike_sequence(&random_psd(2, &mut rng), &g2, 4).unwrap();
        assert!(subharmonic_check(&s1.try_add(&s2).unwrap(), &rho, 1e-9).unwrap());
    }

    #[test]
    fn agrees_with_prefix_validation_on_mixed_inputs() {
        let mut rng = seeded(55);
        let rho = random_faithful(2, &mut rng);
        for k in 0..40 {
            let mass = 0.5 + 0.025 * k as f64;
            let s = grouplike_sequence(&random_psd(2, &mut rng), &sub_grouplike(&mut rng, &rho, mass), 3).unwrap();
            let s = s.try_add(&grouplike_sequence(&random_psd(2, &mut rng), &sub_grouplike(&mut rng, &rho, 0.5), 3).unwrap()).unwrap();
            let a = subharmonic_check(&s, &rho, 1e-9).unwrap();
            let b = validate_k_prefix(&s, &rho, 1e-9).unwrap().valid;
            assert_eq!(a, b, "mass {mass}");
        }
    }

    #[test]
    fn level_one_image_is_separable() {
        let mut rng = seeded(56);
        let rho = Functional::trace(2);
        let s = grouplike_sequence(&random_psd(2, &mut rng), &sub_grouplike(&mut rng, &rho, 0.9), 4).unwrap();
        let rep = separable_image_check(&s, &rho, 3, 1e-9, &FeasibilityOptions::default()).unwrap();
        assert_eq!(rep.verdict, Evidence::SeparableEvidence);

        let heavy = grouplike_sequence(&random_psd(2, &mut rng), &sub_grouplike(&mut rng, &rho, 1.5), 4).unwrap();
        assert!(matches!(
            separable_image_check(&heavy, &rho, 3, 1e-9, &FeasibilityOptions::default()),
            Err(Error::Precondition(_))
        ));
    }
}
