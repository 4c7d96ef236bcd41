use std::fmt::Write as _;

use super::config::Recipe;
use super::recipes::{BER_HEADER, BOUNDS_HEADER, TABLE_HEADER};
use crate::error::{Error, Result};

/// Marker written where a series has no value at some abscissa.
pub const MISSING: &str = "?";

fn parse_err<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, message: message.into() })
}

/// Which columns form the abscissa, the ordinate and the series label.
struct Layout {
    x: &'static str,
    y: &'static str,
    series: &'static [&'static str],
}

fn layout(header: &str, recipe: Recipe) -> Option<Layout> {
    if header == BOUNDS_HEADER {
        let (x, y) = match recipe {
            Recipe::Fig2 => ("zeta", "per_user_bits"),
            Recipe::Fig3 => ("n", "per_user_bits"),
            Recipe::Fig4 => ("snr_db", "per_user_bits"),
            _ => ("n", "total_bits"),
        };
        Some(Layout { x, y, series: &["bound_id", "m", "tau_max", "snr_db"] })
    } else if header == BER_HEADER {
        Some(Layout { x: "snr_db", y: "ber", series: &["code", "decoder"] })
    } else if header == TABLE_HEADER {
        Some(Layout { x: "lambda", y: "beta", series: &["source"] })
    } else {
        None
    }
}

/// Pivot a recipe CSV into whitespace-separated columns: the abscissa first,
/// then one column per series in order of first appearance.
///
/// Rows are sorted by abscissa; absent points are written as [`MISSING`].
/// A non-finite number anywhere is reported as an error rather than emitted.
pub fn emit_plotdata(csv: &str, recipe: Recipe, seed: u64) -> Result<String> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(csv.as_bytes());
    let mut records = reader.records();
    let header = match records.next() {
        Some(Ok(h)) => h,
        Some(Err(e)) => return parse_err(1, e.to_string()),
        None => return parse_err(1, "empty CSV"),
    };
    let header_line = header.iter().collect::<Vec<_>>().join(",");
    let Some(lay) = layout(&header_line, recipe) else {
        return parse_err(1, format!("unrecognised CSV header `{header_line}`"));
    };
    let cols: Vec<&str> = header.iter().collect();
    let idx = |name: &str| cols.iter().position(|c| *c == name).expect("column listed in layout");
    let (xi, yi) = (idx(lay.x), idx(lay.y));
    let series_idx: Vec<usize> = lay.series.iter().map(|s| idx(s)).filter(|&i| i != xi).collect();

    let mut names: Vec<String> = Vec::new();
    let mut xs: Vec<f64> = Vec::new();
    let mut points: Vec<(usize, f64, f64)> = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let ln = rec.position().map_or(0, |p| p.line() as usize);
        let f: Vec<&str> = rec.iter().collect();
        if f.len() != cols.len() {
            return parse_err(ln, format!("expected {} fields, found {}", cols.len(), f.len()));
        }
        let num = |j: usize| -> Result<Option<f64>> {
            if f[j].is_empty() {
                return Ok(None);
            }
            match f[j].parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(Some(v)),
                Ok(v) => Err(Error::Numerical(format!("line {ln}: non-finite {} = {v}", cols[j]))),
                Err(_) => parse_err(ln, format!("`{}` in column {} is not a number", f[j], cols[j])),
            }
        };
        let (Some(x), Some(y)) = (num(xi)?, num(yi)?) else {
            // Rows without this abscissa/ordinate (e.g. asymptotic rows in a
            // per-n sweep) do not belong to the plot.
            continue;
        };
        let label: Vec<String> = series_idx
            .iter()
            .filter(|&&j| !f[j].is_empty())
            .map(|&j| if j == series_idx[0] { f[j].to_string() } else { format!("{}={}", cols[j], f[j]) })
            .collect();
        let label = label.join(",");
        let s = names.iter().position(|n| *n == label).unwrap_or_else(|| {
            names.push(label);
            names.len() - 1
        });
        if !xs.contains(&x) {
            xs.push(x);
        }
        points.push((s, x, y));
    }
    xs.sort_by(f64::total_cmp);

    let mut grid = vec![vec![None; names.len()]; xs.len()];
    for (s, x, y) in points {
        let r = xs.iter().position(|&v| v == x).expect("abscissa recorded");
        grid[r][s] = Some(y);
    }
    let mut out = String::new();
    let _ = writeln!(out, "# recipe {recipe} seed {seed}");
    let _ = writeln!(out, "# columns: {} {}", lay.x, names.iter().map(|n| format!("[{n}]")).collect::<Vec<_>>().join(" "));
    let _ = writeln!(out, "# y = {}; missing values are written as {MISSING}", lay.y);
    for (x, row) in xs.iter().zip(grid) {
        let cells: Vec<String> = row.iter().map(|v| v.map_or(MISSING.to_string(), |v| v.to_string())).collect();
        let _ = writeln!(out, "{x} {}", cells.join(" "));
    }
    Ok(out)
}
