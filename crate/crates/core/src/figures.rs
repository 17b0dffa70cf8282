//! Datasets behind the published figures.

use std::path::{Path, PathBuf};

use crate::doppler::DopplerConfig;
use crate::error::{Error, Result};
use crate::io;
use crate::params::ModelParams;
use crate::sensitivity::PhysicalConstants;
use crate::sweep::{run_sweep, Axis, Observable, SweepSpec, SweepTable};

pub const FIGURE_POINTS: usize = 2001;
pub const FIGURE_SPAN: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig2,
    Fig3,
    Fig4,
}

impl std::str::FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            "fig4" => Ok(Figure::Fig4),
            other => Err(Error::Config(format!("unknown figure `{other}` (fig2|fig3|fig4)"))),
        }
    }
}

fn spec(axis: Axis, observables: Vec<Observable>) -> SweepSpec {
    SweepSpec::new(axis, -FIGURE_SPAN, FIGURE_SPAN, FIGURE_POINTS, observables)
}

fn with_and_without(
    axis: Axis,
    observables: Vec<Observable>,
    base: &ModelParams,
    doppler: &DopplerConfig,
    c: &PhysicalConstants,
) -> Result<SweepTable> {
    let free = run_sweep(&spec(axis, observables.clone()), base, c)?;
    let avg = run_sweep(&spec(axis, observables).with_doppler(Some(*doppler)), base, c)?;
    free.merge(avg.with_suffix("_doppler"))
}

/// Named tables for one figure. `base` is normally `ModelParams::fig2()`.
pub fn figure_tables(
    fig: Figure,
    base: &ModelParams,
    doppler: &DopplerConfig,
    c: &PhysicalConstants,
) -> Result<Vec<(&'static str, SweepTable)>> {
    Ok(match fig {
        Figure::Fig2 => vec![
            (
                "fig2_transmission.csv",
                run_sweep(&spec(Axis::DeltaP, vec![Observable::T2Plus, Observable::T2Minus]), base, c)?,
            ),
            (
                "fig2_phase.csv",
                run_sweep(
                    &spec(Axis::DeltaP, vec![Observable::PhiPlus, Observable::PhiMinus, Observable::Faraday]),
                    base,
                    c,
                )?,
            ),
        ],
        Figure::Fig3 => {
            let at_zero = base.with_delta_p(0.0);
            vec![
                (
                    "fig3_probabilities.csv",
                    run_sweep(&spec(Axis::Delta, vec![Observable::PH, Observable::PV, Observable::P0]), &at_zero, c)?,
                ),
                (
                    "fig3_fisher.csv",
                    with_and_without(Axis::Delta, vec![Observable::Fisher], &at_zero, doppler, c)?,
                ),
            ]
        }
        Figure::Fig4 => vec![(
            "fig4_fisher_h.csv",
            with_and_without(Axis::Delta, vec![Observable::FisherH], &base.with_delta_p(0.0), doppler, c)?,
        )],
    })
}

/// Writes the figure's CSV files into `dir` and returns their paths.
pub fn write_figure(
    fig: Figure,
    dir: &Path,
    base: &ModelParams,
    doppler: &DopplerConfig,
    c: &PhysicalConstants,
) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Err(Error::Config(format!("output directory {} does not exist", dir.display())));
    }
    let mut written = Vec::new();
    for (name, table) in figure_tables(fig, base, doppler, c)? {
        let path = dir.join(name);
        io::write_csv(&table, &path)?;
        written.push(path);
    }
    Ok(written)
}
