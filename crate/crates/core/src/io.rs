//! CSV file formats.
//!
//! All floats are emitted with 17 significant digits (`{:.16e}`), which
//! round-trips `f64` exactly. Headers are mandatory, rows end with `\n`.
//!
//! * `vertices.csv` -- `id,weight,x0,...,x{d-1}`
//! * `edges.csv` -- `u,v` with `u < v`, sorted lexicographically
//! * `infection.csv` -- `id,infection_round`, one row per infected vertex
//! * `trace.csv` -- `round,newly_active,cumulative_active,max_active_distance`
//! * `sweep.csv` -- `rho_multiplier,seed,fraction,stalled,rounds_to_10pct`
//! * `quarantine.csv` -- `seed,round_i,nu_upper_i,cut_size,interior_edges,contained,escaped_before_cut`
//! * `envelope.csv` -- `seed,round,max_active_distance,radius_upper,radius_lower,heavy_fraction`
//! * `infection_times.csv` -- `id,distance,weight,ell_prediction,empirical_round`

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::bootstrap::PercolationRun;
use crate::error::{Error, Result};
use crate::girg::{Graph, GirgParams, VertexSet};

/// 17 significant digits; parses back to the identical `f64`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(text: &str) -> Result<f64> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("expected a float, got {text:?}")))
}

fn parse_u64(text: &str) -> Result<u64> {
    text.trim()
        .parse::<u64>()
        .map_err(|_| Error::Parse(format!("expected an integer, got {text:?}")))
}

pub fn write_vertices_csv(path: &Path, vertices: &VertexSet) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let d = vertices.dim();
    let mut header = String::from("id,weight");
    for ax in 0..d {
        header.push_str(&format!(",x{ax}"));
    }
    writeln!(out, "{header}")?;
    for i in 0..vertices.len() {
        let mut row = format!("{i},{}", fmt_float(vertices.weight(i)));
        for &x in vertices.position(i) {
            row.push(',');
            row.push_str(&fmt_float(x));
        }
        writeln!(out, "{row}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_vertices_csv(path: &Path) -> Result<VertexSet> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty vertices file".into()))??;
    let cols: Vec<&str> = header.trim().split(',').collect();
    if cols.len() < 3 || cols[0] != "id" || cols[1] != "weight" {
        return Err(Error::Parse(format!("unexpected vertices header {header:?}")));
    }
    let d = cols.len() - 2;
    for (ax, col) in cols[2..].iter().enumerate() {
        if *col != format!("x{ax}") {
            return Err(Error::Parse(format!("unexpected coordinate column {col:?}")));
        }
    }
    let mut weights = Vec::new();
    let mut positions = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != d + 2 {
            return Err(Error::Parse(format!("bad vertex row {line:?}")));
        }
        let id = parse_u64(fields[0])? as usize;
        if id != idx {
            return Err(Error::Parse(format!(
                "vertex ids must be dense and ascending, got {id} at row {idx}"
            )));
        }
        weights.push(parse_f64(fields[1])?);
        for f in &fields[2..] {
            positions.push(parse_f64(f)?);
        }
    }
    VertexSet::from_parts(d, positions, weights)
}

pub fn write_edges_csv(path: &Path, edges: &[(u32, u32)]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "u,v")?;
    for &(u, v) in edges {
        writeln!(out, "{u},{v}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_edges_csv(path: &Path) -> Result<Vec<(u32, u32)>> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty edges file".into()))??;
    if header.trim() != "u,v" {
        return Err(Error::Parse(format!("unexpected edges header {header:?}")));
    }
    let mut edges = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.trim().split(',');
        let u = parse_u64(fields.next().unwrap_or(""))? as u32;
        let v = fields
            .next()
            .ok_or_else(|| Error::Parse(format!("bad edge row {line:?}")))
            .and_then(parse_u64)? as u32;
        if u >= v {
            return Err(Error::Parse(format!("edges must satisfy u < v, got {u},{v}")));
        }
        edges.push((u, v));
    }
    if edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parse("edges must be sorted lexicographically".into()));
    }
    Ok(edges)
}

/// Write `vertices.csv` and `edges.csv` into a directory.
pub fn write_graph(dir: &Path, graph: &Graph) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_vertices_csv(&dir.join("vertices.csv"), graph.vertices())?;
    let edges: Vec<(u32, u32)> = graph.edges().collect();
    write_edges_csv(&dir.join("edges.csv"), &edges)
}

/// Load a graph written by [`write_graph`]. The file dimension must match
/// the parameters.
pub fn read_graph(dir: &Path, params: &GirgParams) -> Result<Graph> {
    let vertices = read_vertices_csv(&dir.join("vertices.csv"))?;
    if vertices.dim() != params.d {
        return Err(Error::Config(format!(
            "dimension mismatch: file has d={}, configuration has d={}",
            vertices.dim(),
            params.d
        )));
    }
    let edges = read_edges_csv(&dir.join("edges.csv"))?;
    Graph::from_parts(params.clone(), vertices, &edges)
}

/// `infection.csv`: one row per infected vertex, never a sentinel.
pub fn write_infection_csv(path: &Path, run: &PercolationRun) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "id,infection_round")?;
    for (id, round) in run.infection_round.iter().enumerate() {
        if let Some(r) = round {
            writeln!(out, "{id},{r}")?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_trace_csv(path: &Path, run: &PercolationRun) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "round,newly_active,cumulative_active,max_active_distance")?;
    for rec in &run.per_round {
        writeln!(
            out,
            "{},{},{},{}",
            rec.round,
            rec.newly_active,
            rec.cumulative_active,
            fmt_float(rec.max_active_distance)
        )?;
    }
    out.flush()?;
    Ok(())
}
