//! Named bipartite states on `2 ⊗ 2`.

use crate::linalg::{LeggedOperator, CMatrix, C64};

fn projector(v: &[f64]) -> LeggedOperator {
    let n = v.len();
    let m = CMatrix::from_fn(n, n, |i, j| C64::new(v[i] * v[j], 0.0));
    LeggedOperator::new(m, vec![2, 2]).expect("2x2 legs")
}

/// `|Φ⁺⟩⟨Φ⁺|` with `|Φ⁺⟩ = (|00⟩ + |11⟩)/√2`.
pub fn bell_projector() -> LeggedOperator {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    projector(&[s, 0.0, 0.0, s])
}

/// `|Ψ⁻⟩⟨Ψ⁻|` with `|Ψ⁻⟩ = (|01⟩ - |10⟩)/√2`.
pub fn singlet_projector() -> LeggedOperator {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    projector(&[0.0, s, -s, 0.0])
}

/// Werner family `p |Ψ⁻⟩⟨Ψ⁻| + (1 - p) I/4`.
pub fn werner(p: f64) -> LeggedOperator {
    let mixed = LeggedOperator::identity(&[2, 2]).scale_real((1.0 - p) / 4.0);
    &singlet_projector().scale_real(p) + &mixed
}
