use std::io::Write;
use std::path::{Path, PathBuf};

use finetti_core::hierarchy::{ExtensionMode, FeasibilityOptions, FunctionalPreset, FunctionalSpec};
use finetti_core::linalg::io::load_matrix;
use finetti_core::random::{random_faithful, seeded};
use finetti_core::{Error, Functional, Result};
use serde::Serialize;

use crate::{CommonArgs, Mode, SolverArgs};

/// Fully resolved run parameters, echoed into every report.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<PathBuf>,
    /// As given on the command line; `None` defers to a bundle header.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<String>,
    /// The functional actually used, filled in once `n` is known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_resolved: Option<FunctionalSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub levels: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<ExtensionMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify_bridge: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: &'static str, solver: &SolverArgs, common: &CommonArgs) -> Self {
        RunConfig {
            command,
            state: None,
            rho: common.rho.clone(),
            rho_resolved: None,
            n: None,
            levels: solver.levels,
            tol: Some(solver.tol),
            max_iterations: Some(solver.max_iter),
            mode: Some(match solver.mode {
                Mode::Exact => ExtensionMode::Exact,
                Mode::Sub => ExtensionMode::Sub,
            }),
            seed: Some(common.seed),
            grid: None,
            verify_bridge: None,
            out: common.out.clone(),
        }
    }

    pub fn schur_table(n: usize, levels: usize, out: Option<PathBuf>) -> Self {
        RunConfig {
            command: "schur-table",
            state: None,
            rho: None,
            rho_resolved: None,
            n: Some(n),
            levels,
            tol: None,
            max_iterations: None,
            mode: None,
            seed: None,
            grid: None,
            verify_bridge: None,
            out,
        }
    }

    pub fn with_state(mut self, state: PathBuf) -> Self {
        self.state = Some(state);
        self
    }

    pub fn with_grid(mut self, grid: String) -> Self {
        self.grid = Some(grid);
        self
    }

    pub fn state(&self) -> &Path {
        self.state.as_deref().expect("command takes --state")
    }

    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or(FeasibilityOptions::default().tol)
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels == 0 {
            return Err(Error::InvalidArgument("--levels must be at least 1".into()));
        }
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(Error::InvalidArgument(format!("--tol must be positive, got {tol}")));
            }
        }
        if self.max_iterations == Some(0) {
            return Err(Error::InvalidArgument("--max-iter must be positive".into()));
        }
        Ok(())
    }

    pub fn options(&self) -> FeasibilityOptions {
        let mut opts = FeasibilityOptions { tol: self.tol(), ..FeasibilityOptions::default() };
        if let Some(m) = self.max_iterations {
            opts.max_iterations = m;
        }
        if let Some(mode) = self.mode {
            opts.mode = mode;
        }
        opts
    }

    /// Resolves `--rho` on `M_n` (defaulting to the trace) and records the result.
    pub fn functional(&mut self, n: usize) -> Result<Functional> {
        let name = self.rho.as_deref().unwrap_or("trace");
        let (rho, spec) = match name {
            "trace" => (Functional::trace(n), FunctionalSpec::Preset(FunctionalPreset::Trace)),
            "normalized-trace" => {
                (Functional::normalized_trace(n), FunctionalSpec::Preset(FunctionalPreset::NormalizedTrace))
            }
            "random" => {
                let rho = random_faithful(n, &mut seeded(self.seed.unwrap_or(0)));
                let spec = FunctionalSpec::from(&rho);
                (rho, spec)
            }
            path => {
                let d = load_matrix(Path::new(path))?;
                if d.side() != n {
                    return Err(Error::DimensionMismatch(format!("--rho has side {} but n = {n}", d.side())));
                }
                let rho = Functional::new(d.into_entries())?;
                let spec = FunctionalSpec::from(&rho);
                (rho, spec)
            }
        };
        self.rho_resolved = Some(spec);
        Ok(rho)
    }

    pub fn record_functional(&mut self, spec: FunctionalSpec) {
        self.rho_resolved = Some(spec);
    }

    /// Writes `{config, report}` as JSON to `--out` or stdout, and the
    /// summary line to stderr.
    pub fn emit<T: Serialize>(&self, report: &T, summary: &str) -> Result<()> {
        #[derive(Serialize)]
        struct Envelope<'a, T> {
            config: &'a RunConfig,
            report: &'a T,
        }
        let json = serde_json::to_string_pretty(&Envelope { config: self, report })?;
        match &self.out {
            Some(path) => std::fs::write(path, json + "\n")?,
            None => {
                let mut stdout = std::io::stdout().lock();
                writeln!(stdout, "{json}")?;
            }
        }
        eprintln!("{summary}");
        Ok(())
    }
}
