//! Symmetric-extension hierarchy: sequence prefixes, extension feasibility,
//! separability verdicts and the PPT oracle.

mod feasibility;
mod sequence;
mod verdict;

pub use feasibility::{
    check_witness, extension_adjoint, extension_map, sub_extension_feasibility, ExtensionMode, FeasibilityOptions,
    FeasibilityReport, Verdict,
};
pub use sequence::{
    compress_chain, product_probe, validate_k_prefix, BundleHeader, FunctionalPreset, FunctionalSpec, PrefixReport,
    ProductProbe, SequenceBundle, SymSequence, Violation, ViolationKind,
};
pub use verdict::{
    ppt_min_eig, ppt_threshold, separability_verdict, werner_scan, Evidence, SeparabilityReport, WernerRow,
};
