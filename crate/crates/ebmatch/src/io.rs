//! Text formats: point clouds, density grids, polycube domains, solutions and
//! transport plans.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use ebmatch_core::geometry::{AxisBox, Polycube};
use ebmatch_core::sampling::HolderDensity;
use ebmatch_core::transport::TransportPlan;
use ebmatch_core::{Domain, PointSet, ProblemKind, Solution};

use crate::error::{usage, Error, Result};

/// Reads an input file; a missing or unreadable file is a usage error naming `key`.
pub fn read_input(path: &Path, key: &str) -> Result<String> {
    fs::read_to_string(path).map_err(|e| usage(key, format!("cannot read {}: {e}", path.display())))
}

/// Non-empty lines that are not `#` comments, with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_number(token: &str, key: &str, line: usize) -> Result<f64> {
    let v: f64 = token.trim().parse().map_err(|_| usage(key, format!("line {line}: `{token}` is not a number")))?;
    if !v.is_finite() {
        return Err(usage(key, format!("line {line}: value must be finite")));
    }
    Ok(v)
}

/// Points as CSV rows `x1,...,xd`, one point per line.
pub fn parse_points(text: &str, key: &str) -> Result<PointSet> {
    let mut dim = None;
    let mut coords = Vec::new();
    for (line, row) in content_lines(text) {
        let values = row.split(',').map(|t| parse_number(t, key, line)).collect::<Result<Vec<f64>>>()?;
        match dim {
            None => dim = Some(values.len()),
            Some(d) if d != values.len() => {
                return Err(usage(key, format!("line {line}: expected {d} coordinates, found {}", values.len())));
            }
            Some(_) => {}
        }
        coords.extend(values);
    }
    let dim = dim.ok_or_else(|| usage(key, "no points"))?;
    Ok(PointSet::from_flat(dim, coords)?)
}

pub fn read_points(path: &Path, key: &str) -> Result<PointSet> {
    parse_points(&read_input(path, key)?, key)
}

pub fn write_points<W: Write>(mut out: W, points: &PointSet) -> io::Result<()> {
    for p in points.iter() {
        let row: Vec<String> = p.iter().map(|c| c.to_string()).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Density grid: a header `grid d k rho0 alpha`, then one CSV row
/// `i_1,...,i_d,value` per node of the `k^d` grid over the cube of side `side`.
pub fn parse_density_grid(text: &str, side: f64, key: &str) -> Result<HolderDensity> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| usage(key, "empty density file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 5 || fields[0] != "grid" {
        return Err(usage(key, format!("line {hline}: expected header `grid d k rho0 alpha`")));
    }
    let int = |t: &str| t.parse::<usize>().map_err(|_| usage(key, format!("line {hline}: `{t}` is not a positive integer")));
    let (d, k) = (int(fields[1])?, int(fields[2])?);
    let rho0 = parse_number(fields[3], key, hline)?;
    let alpha = parse_number(fields[4], key, hline)?;
    if d == 0 || k < 2 {
        return Err(usage(key, "need d >= 1 and k >= 2"));
    }
    let count = k.checked_pow(d as u32).ok_or_else(|| usage(key, "grid too large"))?;
    let mut values = vec![f64::NAN; count];
    for (line, row) in lines {
        let tokens: Vec<&str> = row.split(',').map(str::trim).collect();
        if tokens.len() != d + 1 {
            return Err(usage(key, format!("line {line}: expected {} fields", d + 1)));
        }
        let mut index = 0;
        let mut stride = 1;
        for t in &tokens[..d] {
            let i = t.parse::<usize>().ok().filter(|&i| i < k).ok_or_else(|| usage(key, format!("line {line}: bad node index `{t}`")))?;
            index += i * stride;
            stride *= k;
        }
        if !values[index].is_nan() {
            return Err(usage(key, format!("line {line}: node given twice")));
        }
        values[index] = parse_number(tokens[d], key, line)?;
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(usage(key, format!("grid must list all {count} nodes")));
    }
    HolderDensity::new(d, side, k, values, rho0, alpha).map_err(|e| usage(key, e.to_string()))
}

pub fn read_density_grid(path: &Path, side: f64, key: &str) -> Result<HolderDensity> {
    parse_density_grid(&read_input(path, key)?, side, key)
}

/// Polycube: one box per line, `lo_1 .. lo_d hi_1 .. hi_d`.
pub fn parse_polycube(text: &str, key: &str) -> Result<Domain> {
    let mut boxes = Vec::new();
    for (line, row) in content_lines(text) {
        let values = row.split_whitespace().map(|t| parse_number(t, key, line)).collect::<Result<Vec<f64>>>()?;
        if values.is_empty() || values.len() % 2 != 0 {
            return Err(usage(key, format!("line {line}: expected 2d coordinates")));
        }
        let d = values.len() / 2;
        boxes.push(AxisBox::new(values[..d].to_vec(), values[d..].to_vec()).map_err(|e| usage(key, format!("line {line}: {e}")))?);
    }
    Ok(Domain::Polycube(Polycube::new(boxes).map_err(|e| usage(key, e.to_string()))?))
}

pub fn read_polycube(path: &Path, key: &str) -> Result<Domain> {
    parse_polycube(&read_input(path, key)?, key)
}

/// Solution as an edge list under a comment header carrying its metadata.
pub fn write_solution<W: Write>(mut out: W, kind: ProblemKind, p: f64, sol: &Solution) -> io::Result<()> {
    writeln!(out, "# kind={kind},n={},p={p},cost={}", sol.n_x.min(sol.n_y), sol.cost)?;
    writeln!(out, "side1_index,side2_index")?;
    for (i, j) in &sol.edges {
        writeln!(out, "{i},{j}")?;
    }
    Ok(())
}

/// Metadata and edges of a solution written by [`write_solution`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionFile {
    pub kind: ProblemKind,
    pub n: usize,
    pub p: f64,
    pub cost: f64,
    pub edges: Vec<(usize, usize)>,
}

pub fn parse_solution(text: &str) -> Result<SolutionFile> {
    let bad = |what: &str| Error::Format(format!("solution file: {what}"));
    let mut lines = text.lines();
    let meta = lines.next().and_then(|l| l.strip_prefix("# ")).ok_or_else(|| bad("missing header"))?;
    let field = |name: &str| {
        meta.split(',')
            .find_map(|kv| kv.strip_prefix(name).and_then(|r| r.strip_prefix('=')))
            .ok_or_else(|| bad(&format!("missing {name}")))
    };
    let kind: ProblemKind = field("kind")?.parse().map_err(|_| bad("bad kind"))?;
    let n = field("n")?.parse().map_err(|_| bad("bad n"))?;
    let p = field("p")?.parse().map_err(|_| bad("bad p"))?;
    let cost = field("cost")?.parse().map_err(|_| bad("bad cost"))?;
    if lines.next() != Some("side1_index,side2_index") {
        return Err(bad("missing column header"));
    }
    let edges = lines
        .map(|l| {
            let (a, b) = l.split_once(',').ok_or_else(|| bad("bad edge"))?;
            Ok((a.parse().map_err(|_| bad("bad edge"))?, b.parse().map_err(|_| bad("bad edge"))?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SolutionFile { kind, n, p, cost, edges })
}

/// Transport plan as CSV `src,dst,mass,unit_cost`.
pub fn write_plan<W: Write>(out: W, plan: &TransportPlan, source: &PointSet, target: &PointSet, p: f64) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["src", "dst", "mass", "unit_cost"])?;
    for &(i, j, mass) in &plan.flows {
        let unit = source.dist_pow(i, target, j, p);
        w.write_record([i.to_string(), j.to_string(), mass.to_string(), unit.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
