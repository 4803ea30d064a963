//! Parameter sweeps, Monte-Carlo verification of the local bound, and their
//! CSV/SVG artifacts.

pub mod config;
mod figures;
pub mod svg;
pub mod table;
mod verify;

use std::path::{Path, PathBuf};

pub use config::{AlphaSpec, ExperimentConfig};
pub use figures::{run_fig1, run_fig2, run_fig3, run_fig4};
pub use svg::{render_svg, write_svg, PlotSpec};
pub use table::{Cell, SweepTable};
pub use verify::{run_verify_local, VIOLATION_TOL};

use crate::error::Result;

/// Seed used when the config does not name one.
pub const DEFAULT_SEED: u64 = 20_160_501;

/// One named pass/fail assertion over an experiment's results.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

/// A plot of (a subset of) a table.
#[derive(Debug, Clone)]
pub struct Plot {
    /// File name without extension.
    pub stem: String,
    pub table: SweepTable,
    pub spec: PlotSpec,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    /// File name of the main table without extension.
    pub name: String,
    pub table: SweepTable,
    /// Aggregate row(s), written as `<name>_summary.csv` when present.
    pub summary: Option<SweepTable>,
    pub plots: Vec<Plot>,
    pub checks: Vec<Check>,
}

impl ExperimentOutput {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Writes the CSVs and SVGs into `dir`, returning the paths written.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let path = dir.join(format!("{}.csv", self.name));
        self.table.write_csv(&path)?;
        written.push(path);
        if let Some(summary) = &self.summary {
            let path = dir.join(format!("{}_summary.csv", self.name));
            summary.write_csv(&path)?;
            written.push(path);
        }
        for plot in &self.plots {
            let path = dir.join(format!("{}.svg", plot.stem));
            write_svg(&plot.table, &plot.spec, &path)?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Maps `f` over `0..count`, in parallel when the `parallel` feature is on;
/// results keep index order either way.
pub(crate) fn map_indexed<T: Send>(count: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}
