//! Seeded random instances used by tests, benchmarks and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::boundary::{grouplike_sequence, GroupLike};
use crate::hierarchy::SymSequence;
use crate::linalg::{tensor, Functional, LeggedOperator, CMatrix, C64};

pub type TestRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex Ginibre matrix with standard normal real and imaginary parts.
pub fn ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    })
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> LeggedOperator {
    let g = ginibre(n, rng);
    let h = (&g + g.adjoint()) * C64::new(0.5, 0.0);
    LeggedOperator::from_matrix(h).expect("square")
}

/// `G G* / n`; full rank with probability one.
pub fn random_psd<R: Rng + ?Sized>(n: usize, rng: &mut R) -> LeggedOperator {
    let g = ginibre(n, rng);
    let p = &g * g.adjoint() * C64::new(1.0 / n as f64, 0.0);
    let p = (&p + p.adjoint()) * C64::new(0.5, 0.0);
    LeggedOperator::from_matrix(p).expect("square")
}

/// Random PSD matrix normalized to unit trace.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> LeggedOperator {
    let p = random_psd(n, rng);
    let t = p.trace().re;
    p.scale_real(1.0 / t)
}

/// Random faithful functional whose density has trace in `[0.5, 2]`.
pub fn random_faithful<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Functional {
    let p = random_density(n, rng);
    let mix = &p.scale_real(0.8) + &LeggedOperator::identity(&[n]).scale_real(0.2 / n as f64);
    let mass = rng.random_range(0.5..2.0);
    Functional::new(mix.scale_real(mass).into_entries()).expect("strictly positive by construction")
}

/// Random unitary via Gram–Schmidt on a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(n, rng);
    g.qr().q()
}

/// Hermitian matrix with prescribed spectrum in a random eigenbasis.
pub fn random_hermitian_with_spectrum<R: Rng + ?Sized>(spectrum: &[f64], rng: &mut R) -> LeggedOperator {
    let n = spectrum.len();
    let u = random_unitary(n, rng);
    let d = LeggedOperator::from_real_diagonal(spectrum).into_entries();
    let h = &u * d * u.adjoint();
    LeggedOperator::from_matrix((&h + h.adjoint()) * C64::new(0.5, 0.0)).expect("square")
}

/// Convex combination of `terms` products `p_i ⊗ q_i` of unit-trace PSD
/// factors, so every entry is bounded by one.
pub fn random_separable<R: Rng + ?Sized>(m: usize, n: usize, terms: usize, rng: &mut R) -> LeggedOperator {
    let weights: Vec<f64> = (0..terms).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut acc = LeggedOperator::zeros(&[m, n]);
    for w in weights {
        let p = random_density(m, rng);
        let q = random_density(n, rng);
        acc = &acc + &tensor(&p, &q).scale_real(w / total);
    }
    acc
}

/// Random PSD `t` rescaled so that `ρ(t) = mass`.
pub fn random_exponential<R: Rng + ?Sized>(rho: &Functional, mass: f64, rng: &mut R) -> GroupLike {
    let t = random_psd(rho.dim(), rng);
    let r = rho.apply(t.entries()).expect("matching dimension").re;
    GroupLike::from_operator(t.scale_real(mass / r)).expect("full rank with probability one")
}

/// Convex combination of `terms` sequences `a_i ⊗ t_i^{⊗l}` with `a_i` a
/// random density on `C^m`, `t_i ≥ 0` and `ρ(t_i)` uniform in `[0.2, 1]`.
pub fn random_subharmonic<R: Rng + ?Sized>(
    m: usize,
    terms: usize,
    len: usize,
    rho: &Functional,
    rng: &mut R,
) -> SymSequence {
    let weights: Vec<f64> = (0..terms).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut acc: Option<SymSequence> = None;
    for w in weights {
        let a = random_density(m, rng);
        let mass = rng.random_range(0.2..=1.0);
        let g = random_exponential(rho, mass, rng);
        let s = grouplike_sequence(&a, &g, len).expect("len within bound").scale_real(w / total);
        acc = Some(match acc {
            None => s,
            Some(prev) => prev.try_add(&s).expect("same shape"),
        });
    }
    acc.expect("at least one term")
}
