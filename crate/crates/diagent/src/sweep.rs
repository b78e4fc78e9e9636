//! Parameter sweeps: one quench per sweep value, every `n₀` analyzed on the
//! same pair of spectra.

use rayon::prelude::*;

use diagent_core::dynamics::{QuenchAnalysis, QuenchSystem};
use diagent_core::expansion::ExpansionCoefficients;
use diagent_core::spectral::DELOCALIZED_DELTA_S;
use diagent_core::symmetric::PartitionEngine;
use diagent_core::Error as CoreError;

use crate::config::Config;
use crate::error::CliError;
use crate::tsv::{self, fixed, sci};

/// Window in which every numeric `ΔS` is expected to fall.
pub const DELTA_S_BOUNDS: (f64, f64) = (-1e-6, DELOCALIZED_DELTA_S + 0.02);

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Done(Box<QuenchAnalysis>),
    Unconverged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: Option<f64>,
    pub n0: usize,
    pub outcome: Outcome,
}

impl SweepRow {
    pub fn analysis(&self) -> Option<&QuenchAnalysis> {
        match &self.outcome {
            Outcome::Done(a) => Some(a),
            Outcome::Unconverged => None,
        }
    }

    pub fn flags(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        match &self.outcome {
            Outcome::Unconverged => out.push("unconverged"),
            Outcome::Done(a) => {
                if a.entropy.phase_unresolved() {
                    out.push("phase-unresolved");
                }
                let ds = a.entropy.delta_s;
                if !(DELTA_S_BOUNDS.0..=DELTA_S_BOUNDS.1).contains(&ds) {
                    out.push("out-of-bounds");
                }
            }
        }
        out
    }

    pub fn param_label(&self) -> String {
        self.param.map_or_else(|| "-".into(), |x| x.to_string())
    }
}

pub fn thread_pool(threads: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn sweep_point(
    cfg: &Config,
    value: Option<f64>,
    coeffs: &ExpansionCoefficients,
) -> Result<Vec<SweepRow>, CliError> {
    let (model, delta) = cfg.point(value)?;
    let window = cfg.window()?;
    let system = QuenchSystem::prepare(&model, delta)?;
    cfg.n0
        .iter()
        .map(|&n0| {
            let outcome = match system.analyze(n0, &window, coeffs) {
                Ok(a) => Outcome::Done(Box::new(a)),
                Err(CoreError::Unconverged { .. }) => Outcome::Unconverged,
                Err(e) => return Err(e.into()),
            };
            Ok(SweepRow {
                param: value,
                n0,
                outcome,
            })
        })
        .collect()
}

/// Rows in sweep order, whatever order the workers finish in.
pub fn run_sweep(cfg: &Config, threads: usize) -> Result<Vec<SweepRow>, CliError> {
    cfg.validate()?;
    let coeffs = PartitionEngine::default().delta_s_coefficients(cfg.s_max)?;
    let points = cfg.sweep_points();
    let results: Vec<_> = thread_pool(threads)?.install(|| {
        points
            .par_iter()
            .map(|&v| sweep_point(cfg, v, &coeffs))
            .collect()
    });
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

pub fn sweep_rows(rows: &[SweepRow]) -> String {
    let mut out =
        String::from("param\tn0\tdelta_s\ts_avg\ts_of_avg\tO1\tO2\tO3\tmin_gap\tflags\n");
    for row in rows {
        let flags = tsv::flags(&row.flags());
        match row.analysis() {
            Some(a) => {
                let e = &a.entropy;
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{flags}\n",
                    row.param_label(),
                    row.n0,
                    fixed(e.delta_s),
                    fixed(e.s_avg),
                    fixed(e.s_of_avg),
                    fixed(a.orders[0]),
                    fixed(a.orders[1]),
                    fixed(a.orders[2]),
                    sci(e.min_gap),
                ));
            }
            None => out.push_str(&format!(
                "{}\t{}\tnan\tnan\tnan\tnan\tnan\tnan\tnan\t{flags}\n",
                row.param_label(),
                row.n0
            )),
        }
    }
    out
}
