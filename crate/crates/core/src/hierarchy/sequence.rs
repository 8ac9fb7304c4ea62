use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::io::MatrixJson;
use crate::linalg::{
    contract_legs, contract_trailing, is_psd, min_eigenvalue, tensor, tensor_power, Functional, LeggedOperator,
};
use crate::symmetry::symmetry_defect;

/// Finite prefix `(x_0, ..., x_L)` of a sequence with `x_l` on legs
/// `[m, n, ..., n]` (`l` copies of `n`).
///
/// The functional is not stored; predicates take it as an argument.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymSequence {
    pub m: usize,
    pub n: usize,
    pub entries: Vec<LeggedOperator>,
}

pub(crate) fn level_legs(m: usize, n: usize, l: usize) -> Vec<usize> {
    let mut legs = vec![m];
    legs.extend(std::iter::repeat_n(n, l));
    legs
}

impl SymSequence {
    pub fn new(m: usize, n: usize, entries: Vec<LeggedOperator>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidArgument("m and n must be positive".into()));
        }
        if entries.is_empty() {
            return Err(Error::InvalidArgument("a sequence needs at least x_0".into()));
        }
        for (l, x) in entries.iter().enumerate() {
            let want = level_legs(m, n, l);
            if x.legs() != want.as_slice() {
                return Err(Error::LegMismatch(format!("x_{l} has legs {:?}, expected {want:?}", x.legs())));
            }
        }
        Ok(Self { m, n, entries })
    }

    /// `(a ⊗ b^{⊗l})_{l=0..=len}`.
    pub fn product(a: &LeggedOperator, b: &LeggedOperator, len: usize) -> Result<Self> {
        if a.legs().len() != 1 || b.legs().len() != 1 {
            return Err(Error::LegMismatch("product sequences need single-leg factors".into()));
        }
        let entries = (0..=len).map(|l| tensor(a, &tensor_power(b, l))).collect();
        let entries = normalize_level_zero(entries);
        Self::new(a.side(), b.side(), entries)
    }

    /// Truncation length `L`.
    pub fn len(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn level(&self, l: usize) -> Option<&LeggedOperator> {
        self.entries.get(l)
    }

    pub fn truncate(&self, len: usize) -> Self {
        Self { m: self.m, n: self.n, entries: self.entries[..=len.min(self.len())].to_vec() }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if (self.m, self.n, self.len()) != (other.m, other.n, other.len()) {
            return Err(Error::DimensionMismatch("sequences differ in shape or length".into()));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(x, y)| x.try_add(y)).collect::<Result<_>>()?;
        Ok(Self { m: self.m, n: self.n, entries })
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        Self { m: self.m, n: self.n, entries: self.entries.iter().map(|x| x.scale_real(factor)).collect() }
    }
}

/// `a ⊗ (1x1 scalar)` keeps a trailing trivial leg; drop it so that `x_0`
/// sits on legs `[m]`.
fn normalize_level_zero(mut entries: Vec<LeggedOperator>) -> Vec<LeggedOperator> {
    if let Some(x0) = entries.first_mut() {
        if x0.legs().len() == 2 && x0.legs()[1] == 1 {
            let m = x0.legs()[0];
            *x0 = x0.clone().with_legs(vec![m]).expect("same side");
        }
    }
    entries
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    NotHermitian,
    NotPsd,
    NotSymmetric,
    /// `(id ⊗ ρ)(x_{l+1}) ≤ x_l` fails; reported at level `l + 1`.
    SubMartingale,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub level: usize,
    pub kind: ViolationKind,
    /// Size of the defect: negative eigenvalue, asymmetry, ...
    pub magnitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrefixReport {
    pub valid: bool,
    pub violation: Option<Violation>,
}

/// Checks that every `x_l` is Hermitian PSD and `S_l`-invariant on its
/// `n`-legs, and that `(id ⊗ ρ)(x_{l+1}) ≤ x_l`. Levels are scanned in
/// increasing order; the first failed condition is reported.
pub fn validate_k_prefix(seq: &SymSequence, rho: &Functional, tol: f64) -> Result<PrefixReport> {
    check_rho(seq, rho)?;
    let seq = SymSequence::new(seq.m, seq.n, seq.entries.clone())?;
    for (l, x) in seq.entries.iter().enumerate() {
        if let Some(v) = level_violation(x, l, tol)? {
            return Ok(PrefixReport { valid: false, violation: Some(v) });
        }
        if l > 0 {
            let down = contract_trailing(x, rho, 1)?;
            let gap = seq.entries[l - 1].try_sub(&down)?;
            if !is_psd(&gap, tol)? {
                let v = Violation { level: l, kind: ViolationKind::SubMartingale, magnitude: -min_eigenvalue(&gap)? };
                return Ok(PrefixReport { valid: false, violation: Some(v) });
            }
        }
    }
    Ok(PrefixReport { valid: true, violation: None })
}

pub(crate) fn check_rho(seq: &SymSequence, rho: &Functional) -> Result<()> {
    if rho.dim() != seq.n {
        return Err(Error::DimensionMismatch(format!("functional on M_{} for a sequence with n = {}", rho.dim(), seq.n)));
    }
    Ok(())
}

/// Hermiticity, positivity and symmetry of a single level.
pub(crate) fn level_violation(x: &LeggedOperator, l: usize, tol: f64) -> Result<Option<Violation>> {
    if !x.is_hermitian() {
        return Ok(Some(Violation { level: l, kind: ViolationKind::NotHermitian, magnitude: x.hermitian_defect() }));
    }
    if !is_psd(x, tol)? {
        return Ok(Some(Violation { level: l, kind: ViolationKind::NotPsd, magnitude: -min_eigenvalue(x)? }));
    }
    let legs = x.legs().len();
    if l >= 2 {
        let defect = symmetry_defect(x, 1..legs)?;
        if defect > tol * x.max_abs().max(1.0) {
            return Ok(Some(Violation { level: l, kind: ViolationKind::NotSymmetric, magnitude: defect }));
        }
    }
    Ok(None)
}

/// `(id_m ⊗ id_n^{⊗l} ⊗ ρ^{⊗(k-l)})(x_k)`.
pub fn compress_chain(x_k: &LeggedOperator, rho: &Functional, l: usize) -> Result<LeggedOperator> {
    let k = x_k.legs().len().saturating_sub(1);
    if l > k {
        return Err(Error::InvalidArgument(format!("cannot compress {k} legs to {l}")));
    }
    contract_trailing(x_k, rho, k - l)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductProbe {
    pub is_product: bool,
    pub a: LeggedOperator,
    pub b: LeggedOperator,
    /// Largest relative defect `‖x_l - a ⊗ b^{⊗l}‖_max / ‖x_l‖_max`.
    pub max_defect: f64,
}

/// Tests whether the prefix has the form `(a ⊗ b^{⊗l})` with `a = x_0`,
/// `b = (Tr ⊗ id)(x_1) / Tr(x_0)`.
pub fn product_probe(seq: &SymSequence, tol: f64) -> Result<ProductProbe> {
    if seq.len() < 1 {
        return Err(Error::Precondition("product probe needs x_0 and x_1".into()));
    }
    let a = seq.entries[0].clone();
    let phi_a = a.trace().re;
    if a.max_abs() == 0.0 || phi_a.abs() <= f64::EPSILON * a.max_abs() {
        return Err(Error::Precondition("x_0 vanishes under the probe functional".into()));
    }
    let b = contract_legs(&seq.entries[1], &Functional::trace(seq.m), &[0])?.scale_real(1.0 / phi_a);
    let mut is_product = true;
    let mut max_defect = 0.0f64;
    for (l, x) in seq.entries.iter().enumerate().skip(1) {
        let model = tensor(&a, &tensor_power(&b, l));
        let diff = x.max_abs_diff(&model)?;
        let scale = x.max_abs();
        if diff > tol * scale {
            is_product = false;
        }
        if scale > 0.0 {
            max_defect = max_defect.max(diff / scale);
        } else if diff > 0.0 {
            max_defect = f64::INFINITY;
        }
    }
    Ok(ProductProbe { is_product, a, b, max_defect })
}

/// Named functionals accepted in files and on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionalPreset {
    Trace,
    NormalizedTrace,
}

impl FunctionalPreset {
    pub fn build(self, n: usize) -> Functional {
        match self {
            FunctionalPreset::Trace => Functional::trace(n),
            FunctionalPreset::NormalizedTrace => Functional::normalized_trace(n),
        }
    }
}

/// A preset name or an explicit density matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionalSpec {
    Preset(FunctionalPreset),
    Density(MatrixJson),
}

impl FunctionalSpec {
    pub fn resolve(&self, n: usize) -> Result<Functional> {
        match self {
            FunctionalSpec::Preset(p) => Ok(p.build(n)),
            FunctionalSpec::Density(m) => {
                let d = LeggedOperator::try_from(m.clone())?;
                if d.side() != n {
                    return Err(Error::DimensionMismatch(format!("density of side {} for n = {n}", d.side())));
                }
                Functional::new(d.into_entries())
            }
        }
    }
}

impl From<&Functional> for FunctionalSpec {
    fn from(rho: &Functional) -> Self {
        FunctionalSpec::Density(MatrixJson::from(&rho.as_operator()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleHeader {
    pub m: usize,
    pub n: usize,
    #[serde(rename = "L")]
    pub len: usize,
    pub rho: FunctionalSpec,
}

/// File form of a sequence: `{ "header": {m, n, L, rho}, "entries": [...] }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceBundle {
    pub header: BundleHeader,
    pub entries: Vec<MatrixJson>,
}

impl SequenceBundle {
    pub fn new(seq: &SymSequence, rho: FunctionalSpec) -> Self {
        SequenceBundle {
            header: BundleHeader { m: seq.m, n: seq.n, len: seq.len(), rho },
            entries: seq.entries.iter().map(MatrixJson::from).collect(),
        }
    }

    pub fn into_parts(self) -> Result<(SymSequence, Functional)> {
        let h = self.header;
        if self.entries.len() != h.len + 1 {
            return Err(Error::Format(format!("header says L = {} but {} entries follow", h.len, self.entries.len())));
        }
        let entries = self.entries.into_iter().map(LeggedOperator::try_from).collect::<Result<Vec<_>>>()?;
        let seq = SymSequence::new(h.m, h.n, entries)?;
        let rho = h.rho.resolve(h.n)?;
        Ok((seq, rho))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}
