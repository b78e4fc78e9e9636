//! Tab-separated tables. Every file opens with `#` comment lines carrying the
//! tool version and the resolved configuration, followed by one column
//! header line.

use std::fmt::Write as _;

use diagent_core::expansion::{format_rational, Rational};
use diagent_core::models::{unit_disorder, SmallWorldParams};
use diagent_core::partition::Partition;
use diagent_core::spectral::{OverlapTable, XiBarSet};

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `# diagent <version> <command>` followed by the config lines.
pub fn header(command: &str, config: &str) -> String {
    let mut out = format!("# diagent {VERSION} {command}\n");
    for line in config.lines() {
        let _ = writeln!(out, "# {line}");
    }
    out
}

pub fn fixed(x: f64) -> String {
    format!("{x:.12}")
}

pub fn sci(x: f64) -> String {
    format!("{x:.6e}")
}

pub fn flags(list: &[&str]) -> String {
    if list.is_empty() {
        "-".into()
    } else {
        list.join(",")
    }
}

/// Partitions print as `(3,2)`.
pub fn coefficient_rows(entries: &[(Partition, Rational)]) -> String {
    let mut out = String::from("partition\tcoefficient\n");
    for (mu, c) in entries {
        let _ = writeln!(out, "{mu:?}\t{}", format_rational(c));
    }
    out
}

fn parse_partition(s: &str) -> Result<Partition, CliError> {
    let inner = s
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| CliError::Config(format!("bad partition `{s}`")))?;
    if inner.is_empty() {
        return Ok(Partition::empty());
    }
    let parts = inner
        .split(',')
        .map(|t| t.trim().parse::<u32>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Config(format!("bad partition `{s}`")))?;
    Ok(Partition::from_parts(&parts)?)
}

/// Comment lines, the column header, and the data rows split on tabs.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn f64_column(&self, name: &str) -> Result<Vec<f64>, CliError> {
        let i = self
            .column(name)
            .ok_or_else(|| CliError::Config(format!("missing column `{name}`")))?;
        self.rows
            .iter()
            .map(|r| {
                r[i].parse::<f64>()
                    .map_err(|_| CliError::Config(format!("bad number `{}` in `{name}`", r[i])))
            })
            .collect()
    }
}

pub fn read_table(text: &str) -> Result<Table, CliError> {
    let mut comments = Vec::new();
    let mut columns: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(c) = line.strip_prefix('#') {
            comments.push(c.trim_start().to_string());
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<String> = line.split('\t').map(str::to_string).collect();
        match &columns {
            None => columns = Some(fields),
            Some(cols) => {
                if fields.len() != cols.len() {
                    return Err(CliError::Config(format!(
                        "row has {} fields, header has {}",
                        fields.len(),
                        cols.len()
                    )));
                }
                rows.push(fields);
            }
        }
    }
    let columns = columns.ok_or_else(|| CliError::Config("table has no header".into()))?;
    Ok(Table {
        comments,
        columns,
        rows,
    })
}

pub fn read_coefficients(text: &str) -> Result<Vec<(Partition, Rational)>, CliError> {
    let table = read_table(text)?;
    if table.columns != ["partition", "coefficient"] {
        return Err(CliError::Config("not a coefficient table".into()));
    }
    table
        .rows
        .iter()
        .map(|r| {
            let c = r[1]
                .parse::<Rational>()
                .map_err(|_| CliError::Config(format!("bad rational `{}`", r[1])))?;
            Ok((parse_partition(&r[0])?, c))
        })
        .collect()
}

/// `h̄_n` and `ξ_{q,n}` for every column of an overlap table.
pub fn overlap_rows(table: &OverlapTable, q_max: u32) -> String {
    let mut out = String::from("n\th_bar");
    for q in 2..=q_max {
        let _ = write!(out, "\txi_{q}");
    }
    out.push('\n');
    for n in 0..table.dim() {
        let _ = write!(out, "{n}\t{}", sci(table.h_bar()[n]));
        match table.participation_ratios(n, q_max) {
            Some(xi) => xi.iter().for_each(|x| {
                let _ = write!(out, "\t{}", sci(*x));
            }),
            None => (2..=q_max).for_each(|_| out.push_str("\tnan")),
        }
        out.push('\n');
    }
    out
}

/// One line per `(sweep value, n₀)` with every `ξ̄_{μ′}`.
pub fn xi_bar_rows(entries: &[(String, usize, &XiBarSet)]) -> String {
    let mut out = String::from("param\tn0");
    if let Some((_, _, first)) = entries.first() {
        for (mu, _) in &first.values {
            let _ = write!(out, "\t{mu:?}");
        }
    }
    out.push('\n');
    for (param, n0, xis) in entries {
        let _ = write!(out, "{param}\t{n0}");
        for (_, x) in &xis.values {
            let _ = write!(out, "\t{}", sci(*x));
        }
        out.push('\n');
    }
    out
}

/// Unit disorder draws `g_i` and the on-site energies `W g_i`.
pub fn realization_rows(params: &SmallWorldParams) -> String {
    let mut out = String::from("site\tg\tepsilon\n");
    let g = unit_disorder(params.n_sites, params.seed);
    for (i, (gi, ei)) in g.iter().zip(params.onsite_energies()).enumerate() {
        let _ = writeln!(out, "{i}\t{gi:.17e}\t{ei:.17e}");
    }
    out
}

pub fn shortcut_rows(params: &SmallWorldParams) -> String {
    let mut out = String::from("i\tj\n");
    for (i, j) in &params.shortcuts {
        let _ = writeln!(out, "{i}\t{j}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use diagent_core::symmetric::PartitionEngine;

    #[test]
    fn coefficient_table_round_trip() {
        let coeffs = PartitionEngine::default().delta_s_coefficients(5).unwrap();
        let text = header("coefficients", "s_max = 5\n") + &coefficient_rows(&coeffs.coeffs);
        assert!(text.starts_with("# diagent "));
        assert!(text.contains("(3,2)\t-1/6\n"));
        assert_eq!(read_coefficients(&text).unwrap(), coeffs.coeffs);
    }

    #[test]
    fn table_reader_checks_shape() {
        let t = read_table("# a\nx\ty\n1\t2\n\n3\t4\n").unwrap();
        assert_eq!(t.comments, vec!["a"]);
        assert_eq!(t.f64_column("y").unwrap(), vec![2.0, 4.0]);
        assert!(t.f64_column("z").is_err());
        assert!(read_table("x\ty\n1\n").is_err());
        assert!(read_table("# only\n").is_err());
        assert!(read_coefficients("partition\tcoefficient\n2\t1/2\n").is_err());
    }

    #[test]
    fn realization_export() {
        let p = SmallWorldParams::new(8, 1.5, 0.5, 3).unwrap();
        let text = realization_rows(&p);
        let t = read_table(&text).unwrap();
        let g = t.f64_column("g").unwrap();
        let e = t.f64_column("epsilon").unwrap();
        assert_eq!(g, unit_disorder(8, 3));
        assert_eq!(e, p.onsite_energies());
        let s = read_table(&shortcut_rows(&p)).unwrap();
        assert_eq!(s.rows.len(), 4);
    }

    #[test]
    fn formatting() {
        assert_eq!(flags(&[]), "-");
        assert_eq!(flags(&["a", "b"]), "a,b");
        assert_eq!(fixed(0.5), "0.500000000000");
    }
}
