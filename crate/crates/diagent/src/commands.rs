//! Bodies of the subcommands. Each returns the text to emit so that output
//! stays byte-identical across runs and thread counts.

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use diagent_core::dynamics::{density_moment, predicted_density, run_quench, QuenchRun};
use diagent_core::expansion::{verify_stirling_identities, Rational, Truncation};
use diagent_core::models::Model;
use diagent_core::partition::Partition;
use diagent_core::perturbation::{ladder_point, perturbative_lines};
use diagent_core::symmetric::PartitionEngine;

use crate::config::Config;
use crate::error::CliError;
use crate::sweep::{run_sweep, sweep_rows, thread_pool};
use crate::tsv::{self, fixed, header};

/// Defaults, then the config file, then `--set` overrides, then `--seed`.
pub fn load_config(path: Option<&Path>, seed: Option<u64>, sets: &[String]) -> Result<Config, CliError> {
    let mut cfg = Config::default();
    if let Some(p) = path {
        let text = fs::read_to_string(p).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        })?;
        cfg.apply_text(&text)?;
    }
    for s in sets {
        cfg.apply_override(s)?;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Exact coefficient table, cut by weight (`--s-max`) or by order (`--order`).
pub fn coefficients(s_max: Option<u32>, order: Option<u32>) -> Result<String, CliError> {
    let trunc = match (s_max, order) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config("give either --s-max or --order, not both".into()))
        }
        (_, Some(0)) => return Err(CliError::Config("order must be at least 1".into())),
        (_, Some(d)) => Truncation::Order(d),
        (s, None) => Truncation::Weight(s.unwrap_or(6)),
    };
    let coeffs = PartitionEngine::default().delta_s_coefficients(trunc.max_weight())?;
    let rows = coeffs.truncated(trunc)?;
    let config = match trunc {
        Truncation::Weight(s) => format!("s_max = {s}\n"),
        Truncation::Order(d) => format!("order = {d}\n"),
    };
    Ok(header("coefficients", &config) + &tsv::coefficient_rows(&rows))
}

/// Auxiliary tables written next to a sweep, as `(path, contents)`.
pub type Exports = Vec<(String, String)>;

pub fn sweep(cfg: &Config, threads: usize) -> Result<(String, Exports), CliError> {
    let rows = run_sweep(cfg, threads)?;
    let kv = cfg.to_kv();
    let text = header("sweep", &kv) + &sweep_rows(&rows);
    let mut exports = Vec::new();
    if let Some(prefix) = &cfg.export {
        let entries: Vec<_> = rows
            .iter()
            .filter_map(|r| r.analysis().map(|a| (r.param_label(), r.n0, &a.xis)))
            .collect();
        exports.push((
            format!("{prefix}.xi.tsv"),
            header("sweep xi-bar", &kv) + &tsv::xi_bar_rows(&entries),
        ));
        if let (Model::SmallWorld(p), _) = cfg.point(None)? {
            exports.push((
                format!("{prefix}.disorder.tsv"),
                header("sweep disorder", &kv) + &tsv::realization_rows(&p),
            ));
            exports.push((
                format!("{prefix}.shortcuts.tsv"),
                header("sweep shortcuts", &kv) + &tsv::shortcut_rows(&p),
            ));
        }
    }
    Ok((text, exports))
}

/// Exact versus first-order `ΔS` over the `eps` ladder at the base point.
pub fn perturbation(cfg: &Config, threads: usize) -> Result<String, CliError> {
    let (model, _) = cfg.point(None)?;
    let window = cfg.window()?;
    let jobs: Vec<(f64, usize)> = cfg
        .eps
        .iter()
        .flat_map(|&e| cfg.n0.iter().map(move |&n| (e, n)))
        .collect();
    let results: Vec<_> = thread_pool(threads)?.install(|| {
        jobs.par_iter()
            .map(|&(e, n0)| ladder_point(&model, e, n0, &window))
            .collect()
    });
    let mut out = header("perturbation", &cfg.to_kv());
    out.push_str("eps\tn0\tdelta_s_exact\tdelta_s_pert\tO1\tO2\tO3\tsum_v2\tflags\n");
    for (&(eps, n0), r) in jobs.iter().zip(results) {
        let p = r?;
        let mut flags = Vec::new();
        if p.large {
            flags.push("large-v");
        }
        if p.phase_unresolved {
            flags.push("phase-unresolved");
        }
        out.push_str(&format!(
            "{eps}\t{n0}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            fixed(p.delta_s_exact),
            fixed(p.delta_s_pert),
            fixed(p.orders[0]),
            fixed(p.orders[1]),
            fixed(p.orders[2]),
            tsv::sci(p.sum_v2),
            tsv::flags(&flags)
        ));
    }
    Ok(out)
}

fn rational(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn check(name: &str, ok: bool, lines: &mut Vec<String>) -> bool {
    lines.push(format!("{} {name}", if ok { "PASS" } else { "FAIL" }));
    ok
}

fn simpson(f: impl Fn(f64) -> f64, b: f64, n: usize) -> f64 {
    let h = b / n as f64;
    let mut acc = f(0.0) + f(b);
    for i in 1..n {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(h * i as f64);
    }
    acc * h / 3.0
}

/// Quick internal consistency checks; returns the report and overall status.
pub fn selftest() -> Result<(String, bool), CliError> {
    let mut lines = Vec::new();
    let mut ok = true;
    let engine = PartitionEngine::default();

    let coeffs = engine.delta_s_coefficients(6)?;
    let want = [
        (vec![2], rational(-1, 4)),
        (vec![3], rational(1, 9)),
        (vec![2, 2], rational(1, 16)),
        (vec![4], rational(-11, 96)),
        (vec![3, 2], rational(-1, 6)),
        (vec![2, 2, 2], rational(-1, 16)),
    ];
    let exact = want
        .iter()
        .all(|(p, c)| coeffs.get(&Partition::new(p.clone())) == Some(c));
    ok &= check("expansion coefficients through weight 6", exact, &mut lines);

    ok &= check(
        "Stirling identities for s = 2..12",
        verify_stirling_identities(12).is_ok(),
        &mut lines,
    );

    let l3 = engine.l_matrix(3)?;
    let l3_ok = (0..3).all(|r| {
        (0..3).all(|c| l3.get(r, c).to_string() == [[1, 0, 0], [1, 1, 0], [1, 3, 6]][r][c].to_string())
    });
    ok &= check("L(3) matrix", l3_ok, &mut lines);

    let lines3 = perturbative_lines()?;
    let pert_ok = lines3[0].slope == rational(1, 4)
        && lines3[1].slope == rational(-1, 96)
        && lines3[2].slope == rational(227, 384)
        && lines3[2].offset == rational(167, 288);
    ok &= check("perturbative O1..O3 lines", pert_ok, &mut lines);

    let cfg = Config::parse_str("sites = 64\nW = 1.5")?;
    let (model, _) = cfg.point(None)?;
    let r = run_quench(&QuenchRun {
        model,
        delta: 0.0,
        n0: 10,
        window: cfg.window()?,
    })?;
    let identity_ok = r.delta_s == 0.0 && r.entropy_trace.iter().all(|&s| s == 0.0);
    ok &= check("identity quench gives zero entropy", identity_ok, &mut lines);

    let density_ok = [0.0, 0.3, 1.0].iter().all(|&xi2| {
        let norm = simpson(|h| predicted_density(0.01, xi2, h), 0.8, 20_000);
        let mean = simpson(|h| h * predicted_density(0.01, xi2, h), 0.8, 20_000);
        (norm - 1.0).abs() < 1e-8 && (mean - density_moment(0.01, xi2, 1)).abs() < 1e-10
    });
    ok &= check("density normalization and mean", density_ok, &mut lines);

    let mut report = lines.join("\n");
    report.push('\n');
    Ok((report, ok))
}
