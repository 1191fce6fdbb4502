//! Textual mini-language for nonlinearities and gradient terms, plus CSV
//! loading for grid functions.
//!
//! Specs accepted by `--f` and `--g`:
//!
//! - `power:q=<q>[,lambda=<v>][,cap=<v>]` — `lambda * s^q` on `[0, cap]`
//!   (`scale=` is a synonym for `lambda=`; the cap defaults to 4),
//! - `table:<path.csv>` — piecewise-linear interpolation of `s,f` rows,
//!   capped at the last abscissa,
//! - `piecewise:<start>:<scale>:<exponent>[;...][;cap=<v>]` — continuous
//!   piecewise power pieces, first start must be 0,
//! - `zero` — identically zero.

use std::path::Path;

use inflap::nonlinearity::{GradientTermSpec, NonlinearitySpec, PowerSegment};
use inflap::grid::GridFunction;
use inflap::{Error, OperatorTag};

type Result<T> = std::result::Result<T, Error>;

/// Domain cap used when a spec does not state one.
pub const DEFAULT_DOMAIN_CAP: f64 = 4.0;

enum ParsedSpec {
    Zero,
    Power { exponent: f64, scale: f64, cap: f64 },
    Table { points: Vec<(f64, f64)>, cap: f64 },
    Piecewise { segments: Vec<PowerSegment>, cap: f64 },
}

pub fn parse_nonlinearity(spec: &str) -> Result<NonlinearitySpec> {
    match parse_spec(spec)? {
        ParsedSpec::Zero => Ok(NonlinearitySpec::zero()),
        ParsedSpec::Power { exponent, scale, cap } => {
            NonlinearitySpec::power_law(exponent, scale, cap)
        }
        ParsedSpec::Table { points, cap } => NonlinearitySpec::table(points, cap),
        ParsedSpec::Piecewise { segments, cap } => NonlinearitySpec::piecewise(segments, cap),
    }
}

pub fn parse_gradient_term(spec: &str, operator: OperatorTag) -> Result<GradientTermSpec> {
    match parse_spec(spec)? {
        ParsedSpec::Zero => Ok(GradientTermSpec::zero(operator)),
        ParsedSpec::Power { exponent, scale, cap } => {
            GradientTermSpec::power_law(exponent, scale, cap, operator)
        }
        ParsedSpec::Table { points, cap } => GradientTermSpec::table(points, cap, operator),
        ParsedSpec::Piecewise { segments, cap } => {
            GradientTermSpec::piecewise(segments, cap, operator)
        }
    }
}

fn parse_spec(spec: &str) -> Result<ParsedSpec> {
    if spec == "zero" {
        return Ok(ParsedSpec::Zero);
    }
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| Error::Domain(format!("cannot parse '{spec}': expected kind:arguments")))?;
    match kind {
        "power" => parse_power(rest),
        "table" => parse_table(rest),
        "piecewise" => parse_piecewise(rest),
        other => Err(Error::Domain(format!(
            "unknown spec kind '{other}' (expected power, table, piecewise, or zero)"
        ))),
    }
}

fn parse_power(args: &str) -> Result<ParsedSpec> {
    let mut exponent = None;
    let mut scale = 1.0;
    let mut cap = DEFAULT_DOMAIN_CAP;
    for (key, value) in parse_key_values(args)? {
        match key {
            "q" | "exponent" => exponent = Some(value),
            "lambda" | "scale" => scale = value,
            "cap" => cap = value,
            other => return Err(Error::Domain(format!("unknown power key '{other}'"))),
        }
    }
    let exponent =
        exponent.ok_or_else(|| Error::Domain("power spec needs q=<exponent>".into()))?;
    Ok(ParsedSpec::Power { exponent, scale, cap })
}

fn parse_table(path: &str) -> Result<ParsedSpec> {
    let points = read_numeric_csv(Path::new(path), 2)?
        .into_iter()
        .map(|row| (row[0], row[1]))
        .collect::<Vec<_>>();
    let cap = points
        .last()
        .map(|p| p.0)
        .ok_or_else(|| Error::Domain(format!("table '{path}' has no data rows")))?;
    Ok(ParsedSpec::Table { points, cap })
}

fn parse_piecewise(args: &str) -> Result<ParsedSpec> {
    let mut segments = Vec::new();
    let mut cap = DEFAULT_DOMAIN_CAP;
    for piece in args.split(';') {
        if let Some(value) = piece.strip_prefix("cap=") {
            cap = parse_float(value)?;
            continue;
        }
        let parts: Vec<&str> = piece.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Domain(format!(
                "piecewise segment '{piece}' must be start:scale:exponent"
            )));
        }
        segments.push(PowerSegment {
            start: parse_float(parts[0])?,
            scale: parse_float(parts[1])?,
            exponent: parse_float(parts[2])?,
        });
    }
    Ok(ParsedSpec::Piecewise { segments, cap })
}

fn parse_key_values(args: &str) -> Result<Vec<(&str, f64)>> {
    args.split(',')
        .map(|pair| {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| Error::Domain(format!("expected key=value, got '{pair}'")))?;
            Ok((key, parse_float(value)?))
        })
        .collect()
}

fn parse_float(text: &str) -> Result<f64> {
    text.parse::<f64>()
        .map_err(|_| Error::Domain(format!("cannot parse '{text}' as a number")))
}

/// Loads an interval grid function from `r,u` rows; the abscissae must be
/// uniformly spaced and increasing.
pub fn load_interval_csv(path: &Path) -> Result<GridFunction> {
    let rows = read_numeric_csv(path, 2)?;
    if rows.len() < 3 {
        return Err(Error::Domain(format!(
            "'{}' has {} data rows; an interval grid needs at least 3",
            path.display(),
            rows.len()
        )));
    }
    let r: Vec<f64> = rows.iter().map(|row| row[0]).collect();
    let values: Vec<f64> = rows.iter().map(|row| row[1]).collect();
    let (a, b) = (r[0], r[r.len() - 1]);
    let h = (b - a) / (r.len() - 1) as f64;
    for (i, &x) in r.iter().enumerate() {
        let expected = a + h * i as f64;
        if (x - expected).abs() > 1e-9 * (b - a).abs().max(1.0) {
            return Err(Error::Domain(format!(
                "'{}' is not uniformly spaced at row {i}: {x} vs expected {expected}",
                path.display()
            )));
        }
    }
    GridFunction::interval_with_values(a, b, values)
}

/// Reads a CSV of float rows with `columns` entries each, skipping one
/// leading header line when its first field is not numeric.
fn read_numeric_csv(path: &Path, columns: usize) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Domain(format!("cannot read '{}': {e}", path.display())))?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if lineno == 0 && fields[0].parse::<f64>().is_err() {
            continue; // header
        }
        if fields.len() != columns {
            return Err(Error::Domain(format!(
                "'{}' line {}: expected {columns} columns, got {}",
                path.display(),
                lineno + 1,
                fields.len()
            )));
        }
        let row = fields
            .iter()
            .map(|f| parse_float(f))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}
