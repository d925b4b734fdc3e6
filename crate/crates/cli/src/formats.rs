//! JSON file formats for point sets and polynomial matrices.
//!
//! Point set: `{ "dim": d, "points": [["p/q", …], …] }`, each coordinate a
//! reduced fraction in `[0, 1)` written as a string (`"0"` is allowed).
//!
//! Matrix: `{ "dim": d, "entries": [[[c0, c1, …], …], …] }`, row-major,
//! ascending integer coefficients, every `c0` zero.
//!
//! Errors name the offending position, e.g. `points[2][1]`.

use std::collections::BTreeMap;

use glasner_core::glasner::{IntPolynomial, PolyMatrix};
use glasner_core::torus::{PointSet, TorusPoint};
use glasner_core::Rat;
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

fn bad(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::validation(format!("{path}: {msg}"))
}

fn object<'a>(v: &'a Value, keys: &[&str]) -> CliResult<&'a Map<String, Value>> {
    let obj = v
        .as_object()
        .ok_or_else(|| bad("$", "expected a JSON object"))?;
    if let Some(extra) = obj.keys().find(|k| !keys.contains(&k.as_str())) {
        return Err(bad("$", format!("unknown field '{extra}'")));
    }
    for k in keys {
        if !obj.contains_key(*k) {
            return Err(bad("$", format!("missing field '{k}'")));
        }
    }
    Ok(obj)
}

fn dim_field(obj: &Map<String, Value>) -> CliResult<usize> {
    match obj["dim"].as_u64() {
        Some(d) if d >= 1 => Ok(d as usize),
        _ => Err(bad("dim", "expected a positive integer")),
    }
}

fn array<'a>(v: &'a Value, path: &str) -> CliResult<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(path, "expected an array"))
}

fn parse_json(text: &str) -> CliResult<Value> {
    serde_json::from_str(text)
        .map_err(|e| CliError::validation(format!("line {} column {}: {e}", e.line(), e.column())))
}

/// A coordinate: `"p/q"` reduced with `0 ≤ p < q`, or `"0"`.
pub fn parse_coordinate(s: &str, path: &str) -> CliResult<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: i128 = num
        .parse()
        .map_err(|_| bad(path, format!("'{s}' is not of the form p/q")))?;
    let den: i128 = den
        .parse()
        .map_err(|_| bad(path, format!("'{s}' is not of the form p/q")))?;
    if den <= 0 {
        return Err(bad(path, format!("'{s}' needs a positive denominator")));
    }
    if !Rat::is_reduced_fraction(num, den) && !(num == 0 && den == 1) {
        return Err(bad(path, format!("'{s}' is not in lowest terms")));
    }
    if num < 0 || num >= den {
        return Err(bad(path, format!("'{s}' lies outside [0, 1)")));
    }
    Rat::new(num, den).map_err(|e| bad(path, e))
}

pub fn parse_point_set(text: &str) -> CliResult<PointSet> {
    let root = parse_json(text)?;
    let obj = object(&root, &["dim", "points"])?;
    let dim = dim_field(obj)?;
    let rows = array(&obj["points"], "points")?;
    if rows.is_empty() {
        return Err(bad("points", "a point set needs at least one point"));
    }
    let mut seen = BTreeMap::new();
    let mut points = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let path = format!("points[{i}]");
        let coords = array(row, &path)?;
        if coords.len() != dim {
            return Err(bad(
                &path,
                format!("has {} coordinates, expected {dim}", coords.len()),
            ));
        }
        let mut rat = Vec::with_capacity(dim);
        for (j, c) in coords.iter().enumerate() {
            let cpath = format!("points[{i}][{j}]");
            let s = c
                .as_str()
                .ok_or_else(|| bad(&cpath, "expected a string such as \"1/3\""))?;
            rat.push(parse_coordinate(s, &cpath)?);
        }
        let p = TorusPoint::new(rat).map_err(|e| bad(&path, e))?;
        if let Some(first) = seen.insert(p.clone(), i) {
            return Err(bad(&path, format!("repeats points[{first}]")));
        }
        points.push(p);
    }
    Ok(PointSet::new(dim, points)?)
}

pub fn parse_matrix(text: &str) -> CliResult<PolyMatrix> {
    let root = parse_json(text)?;
    let obj = object(&root, &["dim", "entries"])?;
    let dim = dim_field(obj)?;
    let rows = array(&obj["entries"], "entries")?;
    if rows.len() != dim {
        return Err(bad(
            "entries",
            format!("has {} rows, expected {dim}", rows.len()),
        ));
    }
    let mut entries = Vec::with_capacity(dim * dim);
    for (r, row) in rows.iter().enumerate() {
        let rpath = format!("entries[{r}]");
        let cols = array(row, &rpath)?;
        if cols.len() != dim {
            return Err(bad(
                &rpath,
                format!("has {} entries, expected {dim}", cols.len()),
            ));
        }
        for (c, poly) in cols.iter().enumerate() {
            let ppath = format!("entries[{r}][{c}]");
            let coeffs = array(poly, &ppath)?;
            let mut out = Vec::with_capacity(coeffs.len());
            for (k, v) in coeffs.iter().enumerate() {
                let x = v
                    .as_i64()
                    .ok_or_else(|| bad(&format!("{ppath}[{k}]"), "expected a 64-bit integer"))?;
                out.push(x);
            }
            if let Some(&c0) = out.first() {
                if c0 != 0 {
                    return Err(bad(
                        &format!("{ppath}[0]"),
                        format!("constant term {c0} must be 0 (A(0) has to be the zero matrix)"),
                    ));
                }
            }
            entries.push(IntPolynomial::new(out));
        }
    }
    Ok(PolyMatrix::new(dim, entries)?)
}

/// Coordinates as `"p/q"` strings.
pub fn point_to_json(p: &TorusPoint) -> Value {
    Value::Array(
        p.coords()
            .iter()
            .map(|c| Value::String(c.to_string()))
            .collect(),
    )
}

pub fn read_file(path: &str) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_string(),
        message: e.to_string(),
    })
}
