use std::path::Path;

use finetti_core::boundary::{
    e_rho_value, exponential_test, grouplike_sequence, recover_block, separable_image_check, subharmonic_check,
    ExponentialReport, GroupLike,
};
use finetti_core::hierarchy::{
    product_probe, separability_verdict, validate_k_prefix, werner_scan, Evidence, PrefixReport, SeparabilityReport,
    SequenceBundle, SymSequence, WernerRow,
};
use finetti_core::linalg::io::load_matrix;
use finetti_core::linalg::min_eigenvalue;
use finetti_core::symmetry::{schur_weyl_table, Partition, SchurWeylEntry};
use finetti_core::{Error, Functional, LeggedOperator, Result};
use serde::Serialize;

use crate::config::RunConfig;

pub fn extend_check(mut cfg: RunConfig) -> Result<()> {
    cfg.validate()?;
    let a = load_matrix(cfg.state())?;
    if a.legs().len() != 2 {
        return Err(Error::LegMismatch(format!("expected a bipartite state with legs [m, n], got {:?}", a.legs())));
    }
    let rho = cfg.functional(a.legs()[1])?;
    let rep = separability_verdict(&a, &rho, cfg.levels, &cfg.options())?;
    let levels: Vec<String> = rep.levels.iter().map(|r| format!("l={}:{:?}", r.level, r.verdict)).collect();
    let summary = format!(
        "extend-check: {} [{}]{}",
        evidence_name(rep.verdict),
        levels.join(" "),
        rep.ppt_min_eig.map(|v| format!(", ppt_min_eig {v:.6e}")).unwrap_or_default()
    );
    cfg.emit(&rep, &summary)
}

/// `start:stop:step`, inclusive of `stop` up to rounding.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("grid must be start:stop:step, got {spec:?}"));
    let parts: Vec<f64> =
        spec.split(':').map(|s| s.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_>>()?;
    let [start, stop, step] = parts[..] else { return Err(bad()) };
    if !(step > 0.0) || !(start <= stop) || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    // Rounded to 12 decimals so that 0.35 prints as 0.35 and stop is never overshot.
    Ok((0..count).map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12).map(|p| p.min(stop)).collect())
}

pub fn scan_werner(mut cfg: RunConfig) -> Result<()> {
    cfg.validate()?;
    let grid = parse_grid(cfg.grid.as_deref().unwrap_or_default())?;
    let rho = cfg.functional(2)?;
    let rows = werner_scan(&grid, &rho, cfg.levels, &cfg.options())?;
    let first_entangled = rows.iter().find(|r| r.verdict == Evidence::EntangledEvidence).map(|r| r.p);
    let first_ppt_negative = rows.iter().find(|r| r.ppt_min_eig < 0.0).map(|r| r.p);
    let undetermined = rows.iter().filter(|r| r.verdict == Evidence::Undetermined).count();
    let fmt = |p: Option<f64>| p.map(|p| format!("{p:.4}")).unwrap_or_else(|| "none".into());
    let summary = format!(
        "scan-werner: {} points, first entangled_evidence at p={}, first PPT-negative at p={}, {} undetermined",
        rows.len(),
        fmt(first_entangled),
        fmt(first_ppt_negative),
        undetermined
    );
    #[derive(Serialize)]
    struct Scan {
        rows: Vec<WernerRow>,
    }
    cfg.emit(&Scan { rows }, &summary)
}

#[derive(Serialize)]
struct BlockSummary {
    partition: Partition,
    legs: Vec<usize>,
    min_eigenvalue: f64,
}

#[derive(Serialize)]
struct Bridge {
    prefix_valid: bool,
    subharmonic: bool,
    agree: bool,
}

#[derive(Serialize)]
struct SequenceReport {
    m: usize,
    n: usize,
    len: usize,
    prefix: PrefixReport,
    subharmonic: bool,
    /// Level-`L` isotypic blocks of the top entry.
    blocks: Vec<BlockSummary>,
    /// Only for `m >= 2`, where the level-one image is a genuine bipartite state.
    separable_image: Option<SeparabilityReport>,
    bridge: Option<Bridge>,
}

#[derive(Serialize)]
struct GroupLikeReport {
    t: GroupLike,
    /// `ρ(e_t)`; absent when it has a significant imaginary part.
    e_rho: Option<f64>,
    exponential: ExponentialReport,
}

#[derive(Serialize)]
struct BoundaryReport {
    input: &'static str,
    /// The group-like element given, or recovered from a product bundle.
    grouplike: Option<GroupLikeReport>,
    product_defect: Option<f64>,
    sequence: SequenceReport,
}

fn analyse_grouplike(g: GroupLike, rho: &Functional, len: usize, tol: f64) -> Result<GroupLikeReport> {
    let e_rho = match e_rho_value(&g, rho) {
        Ok(v) => Some(v),
        Err(Error::SignificantImaginary { .. }) => None,
        Err(e) => return Err(e),
    };
    let exponential = exponential_test(&g, len, tol)?;
    Ok(GroupLikeReport { t: g, e_rho, exponential })
}

fn analyse_sequence(seq: &SymSequence, rho: &Functional, cfg: &RunConfig) -> Result<SequenceReport> {
    let tol = cfg.tol();
    let prefix = validate_k_prefix(seq, rho, tol)?;
    let subharmonic = subharmonic_check(seq, rho, tol)?;
    let len = seq.len();
    let mut blocks = Vec::new();
    for lambda in Partition::all(len).into_iter().filter(|p| p.num_parts() <= seq.n) {
        let b = recover_block(seq, &lambda)?;
        let min = min_eigenvalue(&b.hermitian_part())?;
        blocks.push(BlockSummary { legs: b.legs().to_vec(), partition: lambda, min_eigenvalue: min });
    }
    let separable_image = if subharmonic && seq.m >= 2 && len >= 1 {
        Some(separable_image_check(seq, rho, cfg.levels.max(2), tol, &cfg.options())?)
    } else {
        None
    };
    let bridge = cfg.verify_bridge.unwrap_or(false).then(|| Bridge {
        prefix_valid: prefix.valid,
        subharmonic,
        agree: prefix.valid == subharmonic,
    });
    Ok(SequenceReport { m: seq.m, n: seq.n, len, prefix, subharmonic, blocks, separable_image, bridge })
}

fn is_bundle(path: &Path) -> Result<bool> {
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    Ok(v.get("header").is_some())
}

/// Returns `false` when `--verify-bridge` finds a disagreement.
pub fn boundary(mut cfg: RunConfig) -> Result<bool> {
    cfg.validate()?;
    let tol = cfg.tol();
    let report = if is_bundle(cfg.state())? {
        let bundle = SequenceBundle::load(cfg.state())?;
        let header_rho = bundle.header.rho.clone();
        let (seq, bundle_rho) = bundle.into_parts()?;
        let rho = if cfg.rho.is_some() {
            cfg.functional(seq.n)?
        } else {
            cfg.record_functional(header_rho);
            bundle_rho
        };
        cfg.n = Some(seq.n);
        let probe = if seq.len() >= 1 { Some(product_probe(&seq, tol)?) } else { None };
        let grouplike = match &probe {
            Some(p) if p.is_product => match GroupLike::from_operator(p.b.clone()) {
                Ok(g) => Some(analyse_grouplike(g, &rho, seq.len(), tol)?),
                Err(Error::NotInvertible { .. }) => None,
                Err(e) => return Err(e),
            },
            _ => None,
        };
        let sequence = analyse_sequence(&seq, &rho, &cfg)?;
        BoundaryReport { input: "bundle", grouplike, product_defect: probe.map(|p| p.max_defect), sequence }
    } else {
        let g = GroupLike::from_operator(load_matrix(cfg.state())?)?;
        let rho = cfg.functional(g.n())?;
        cfg.n = Some(g.n());
        let seq = grouplike_sequence(&LeggedOperator::identity(&[1]), &g, cfg.levels)?;
        let sequence = analyse_sequence(&seq, &rho, &cfg)?;
        let grouplike = Some(analyse_grouplike(g, &rho, cfg.levels, tol)?);
        BoundaryReport { input: "grouplike", grouplike, product_defect: None, sequence }
    };

    let seq = &report.sequence;
    let mut summary = format!("boundary: {} n={} L={}", report.input, seq.n, seq.len);
    if let Some(g) = &report.grouplike {
        summary += &format!(", exponential={}", g.exponential.is_exponential);
        if let Some(b) = &g.exponential.failing_block {
            summary += &format!(" (failing block {b})");
        }
        match g.e_rho {
            Some(v) => summary += &format!(", rho(e_t)={v:.6}"),
            None => summary += ", rho(e_t) not real",
        }
    }
    summary += &format!(", subharmonic={}", seq.subharmonic);
    if let Some(v) = &seq.prefix.violation {
        summary += &format!(", prefix violation at level {} ({:?})", v.level, v.kind);
    }
    if let Some(s) = &seq.separable_image {
        summary += &format!(", level-one image {}", evidence_name(s.verdict));
    }
    let agree = seq.bridge.as_ref().map_or(true, |b| b.agree);
    if seq.bridge.is_some() {
        summary += if agree { ", bridge agrees" } else { ", BRIDGE MISMATCH" };
    }
    cfg.emit(&report, &summary)?;
    Ok(agree)
}

pub fn schur_table(cfg: RunConfig) -> Result<()> {
    cfg.validate()?;
    let n = cfg.n.expect("schur-table sets n");
    if n == 0 {
        return Err(Error::InvalidArgument("--n must be at least 1".into()));
    }
    #[derive(Serialize)]
    struct Level {
        l: usize,
        entries: Vec<SchurWeylEntry>,
        total_dim: usize,
    }
    let mut levels = Vec::new();
    for l in 1..=cfg.levels {
        let entries = schur_weyl_table(n, l)?;
        let total_dim = entries.iter().map(|e| e.block_dim * e.multiplicity).sum();
        levels.push(Level { l, entries, total_dim });
    }
    let last = levels.last().expect("levels >= 1");
    let summary = format!(
        "schur-table: n={n}, l=1..={}, level {} has {} blocks summing to {}",
        cfg.levels,
        last.l,
        last.entries.len(),
        last.total_dim
    );
    #[derive(Serialize)]
    struct Table {
        levels: Vec<Level>,
    }
    cfg.emit(&Table { levels }, &summary)
}

fn evidence_name(e: Evidence) -> &'static str {
    match e {
        Evidence::SeparableEvidence => "separable_evidence",
        Evidence::EntangledEvidence => "entangled_evidence",
        Evidence::Undetermined => "undetermined",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("0:1:0.05").unwrap().len(), 21);
        assert_eq!(parse_grid("0.5:0.5:0.1").unwrap(), vec![0.5]);
        for bad in ["0:1", "0:1:0", "1:0:0.1", "a:1:0.1", "0:1:-0.1"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }
}
