//! Delimited-text formats: scenario files, density files and curve tables.
//!
//! Scenario files have the header `node_id,coordinate,weight,payoff,p0` and
//! one atom per row. Lines starting with `#` are comments, except
//! `#limit,coordinate,payoff,p0`, which declares a massless support limit.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::scenario::{Atom, DensityVector, ScenarioSpace, SupportLimit};
use crate::solver::{GEval, InnerCase};

pub const SCENARIO_HEADER: [&str; 5] = ["node_id", "coordinate", "weight", "payoff", "p0"];
pub const DENSITY_HEADER: [&str; 2] = ["node_id", "p"];
pub const GCURVE_HEADER: [&str; 6] = ["theta2", "G", "theta1_star", "case", "mass", "payoff_moment"];
pub const FCURVE_HEADER: [&str; 2] = ["b", "F"];
pub const LOCALISER_HEADER: [&str; 3] = ["node_id", "coordinate", "q_hat"];

const LIMIT_DIRECTIVE: &str = "#limit,";

/// Formats like C's `%.9g`; non-finite values print as `inf`, `-inf`, `nan`.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let fixed = format!("{:.*}", (8 - exp) as usize, v);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn parse_f64(field: &str, line: usize, name: &str) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("{name}: '{field}' is not a number"),
    })
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

/// Reads all data records, checking the header; returns (line, fields).
fn records(text: &str, header: &[&str]) -> Result<Vec<(usize, Vec<String>)>> {
    let mut rows = Vec::new();
    let mut seen_header = false;
    for rec in reader(text).records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        if !seen_header {
            if !rec.iter().eq(header.iter().copied()) {
                return Err(Error::Parse {
                    line,
                    message: format!("expected header '{}'", header.join(",")),
                });
            }
            seen_header = true;
            continue;
        }
        if rec.len() != header.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, got {}", header.len(), rec.len()),
            });
        }
        rows.push((line, rec.iter().map(str::to_string).collect()));
    }
    if !seen_header {
        return Err(Error::Parse {
            line: 1,
            message: format!("missing header '{}'", header.join(",")),
        });
    }
    Ok(rows)
}

fn parse_limits(text: &str) -> Result<Vec<SupportLimit>> {
    let mut limits = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let Some(rest) = raw.strip_prefix(LIMIT_DIRECTIVE) else {
            continue;
        };
        let line = i + 1;
        let fields: Vec<&str> = rest.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line,
                message: "limit directive needs coordinate,payoff,p0".into(),
            });
        }
        limits.push(SupportLimit {
            coordinate: parse_f64(fields[0], line, "coordinate")?,
            payoff: parse_f64(fields[1], line, "payoff")?,
            default_density: parse_f64(fields[2], line, "p0")?,
        });
    }
    Ok(limits)
}

// Ids must survive being written back unquoted.
fn check_node_id(id: &str, line: usize) -> Result<()> {
    if id.is_empty() || id.starts_with('#') || id.contains([',', '"', '\n', '\r']) {
        return Err(Error::Parse {
            line,
            message: format!("invalid node_id '{id}'"),
        });
    }
    Ok(())
}

/// Parses the atoms and support limits of a scenario file without
/// validating the space itself.
pub fn parse_scenario_parts(text: &str) -> Result<(Vec<Atom>, Vec<SupportLimit>)> {
    let mut seen = HashSet::new();
    let mut atoms = Vec::new();
    for (line, f) in records(text, &SCENARIO_HEADER)? {
        check_node_id(&f[0], line)?;
        if !seen.insert(f[0].clone()) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate node_id '{}'", f[0]),
            });
        }
        atoms.push(Atom::new(
            f[0].clone(),
            parse_f64(&f[1], line, "coordinate")?,
            parse_f64(&f[2], line, "weight")?,
            parse_f64(&f[3], line, "payoff")?,
            parse_f64(&f[4], line, "p0")?,
        ));
    }
    Ok((atoms, parse_limits(text)?))
}

pub fn parse_scenario(text: &str) -> Result<ScenarioSpace> {
    let (atoms, limits) = parse_scenario_parts(text)?;
    ScenarioSpace::build_with_limits(atoms, limits)
}

pub fn write_scenario(space: &ScenarioSpace) -> String {
    let mut out = SCENARIO_HEADER.join(",");
    out.push('\n');
    for l in space.limits() {
        out.push_str(&format!(
            "{LIMIT_DIRECTIVE}{},{},{}\n",
            exact(l.coordinate),
            exact(l.payoff),
            exact(l.default_density)
        ));
    }
    for a in space.atoms() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            a.node_id,
            exact(a.coordinate),
            exact(a.weight),
            exact(a.payoff),
            exact(a.default_density)
        ));
    }
    out
}

// Shortest round-trip representation, so a written space re-reads bit-for-bit.
fn exact(v: f64) -> String {
    if v.is_infinite() {
        fmt_num(v)
    } else {
        format!("{v:?}")
    }
}

/// Parses a `node_id,p` file into (node_id, value) pairs in file order.
pub fn parse_density_entries(text: &str) -> Result<Vec<(String, f64)>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line, f) in records(text, &DENSITY_HEADER)? {
        check_node_id(&f[0], line)?;
        if !seen.insert(f[0].clone()) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate node_id '{}'", f[0]),
            });
        }
        out.push((f[0].clone(), parse_f64(&f[1], line, "p")?));
    }
    Ok(out)
}

/// Orders density entries by the atoms of `space`; every atom must appear once.
pub fn density_for_space(entries: &[(String, f64)], space: &ScenarioSpace) -> Result<DensityVector> {
    if entries.len() != space.len() {
        return Err(Error::Dimension {
            expected: space.len(),
            got: entries.len(),
        });
    }
    let by_id: HashMap<&str, f64> = entries.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    let values = space
        .node_ids()
        .iter()
        .map(|id| {
            by_id
                .get(id.as_str())
                .copied()
                .ok_or_else(|| Error::Validation(format!("density file has no value for node '{id}'")))
        })
        .collect::<Result<Vec<_>>>()?;
    DensityVector::new(values)
}

pub fn parse_density(text: &str, space: &ScenarioSpace) -> Result<DensityVector> {
    density_for_space(&parse_density_entries(text)?, space)
}

pub fn write_density(space: &ScenarioSpace, p: &[f64]) -> String {
    let mut out = DENSITY_HEADER.join(",");
    out.push('\n');
    for (id, v) in space.node_ids().iter().zip(p) {
        out.push_str(&format!("{id},{}\n", exact(*v)));
    }
    out
}

pub fn write_localiser(space: &ScenarioSpace, q: &[f64]) -> String {
    let mut out = LOCALISER_HEADER.join(",");
    out.push('\n');
    for ((id, r), v) in space.node_ids().iter().zip(space.coordinates()).zip(q) {
        out.push_str(&format!("{id},{},{}\n", fmt_num(*r), fmt_num(*v)));
    }
    out
}

fn parse_case(field: &str, line: usize) -> Result<InnerCase> {
    match field {
        "INTERIOR" => Ok(InnerCase::Interior),
        "BOUNDARY" => Ok(InnerCase::Boundary),
        other => Err(Error::Parse {
            line,
            message: format!("unknown case '{other}'"),
        }),
    }
}

pub fn parse_gcurve(text: &str) -> Result<Vec<GEval>> {
    records(text, &GCURVE_HEADER)?
        .into_iter()
        .map(|(line, f)| {
            Ok(GEval {
                theta2: parse_f64(&f[0], line, "theta2")?,
                g_value: parse_f64(&f[1], line, "G")?,
                theta1_star: parse_f64(&f[2], line, "theta1_star")?,
                case: parse_case(&f[3], line)?,
                mass: parse_f64(&f[4], line, "mass")?,
                payoff_moment: parse_f64(&f[5], line, "payoff_moment")?,
            })
        })
        .collect()
}

pub fn write_gcurve(rows: &[GEval]) -> String {
    let mut out = GCURVE_HEADER.join(",");
    out.push('\n');
    for e in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_num(e.theta2),
            fmt_num(e.g_value),
            fmt_num(e.theta1_star),
            e.case,
            fmt_num(e.mass),
            fmt_num(e.payoff_moment)
        ));
    }
    out
}

pub fn write_fcurve(rows: &[(f64, f64)]) -> String {
    let mut out = FCURVE_HEADER.join(",");
    out.push('\n');
    for (b, f) in rows {
        out.push_str(&format!("{},{}\n", fmt_num(*b), fmt_num(*f)));
    }
    out
}
