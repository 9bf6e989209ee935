//! Plain-text mesh dump.
//!
//! ```text
//! # cutsplit mesh
//! vertices <N>
//! <x> <y> <z>          (N lines)
//! tets <M>
//! <v0> <v1> <v2> <v3>  (M lines, 0-based vertex ids)
//! ```

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::Point;

use super::Mesh;

pub fn write_ascii<W: Write>(mesh: &Mesh, mut out: W) -> Result<()> {
    writeln!(out, "# cutsplit mesh level {}", mesh.level())?;
    writeln!(out, "vertices {}", mesh.num_vertices())?;
    for p in mesh.vertices() {
        writeln!(out, "{:.17e} {:.17e} {:.17e}", p[0], p[1], p[2])?;
    }
    writeln!(out, "tets {}", mesh.num_tets())?;
    for t in mesh.tets() {
        writeln!(out, "{} {} {} {}", t[0], t[1], t[2], t[3])?;
    }
    Ok(())
}

/// Read back a dump as raw vertex and tet lists.
pub fn read_ascii<R: BufRead>(input: R) -> Result<(Vec<Point>, Vec<[usize; 4]>)> {
    let bad = |msg: &str| Error::InvalidInput(format!("mesh dump: {msg}"));
    let mut lines = Vec::new();
    for line in input.lines() {
        let line = line?;
        let trimmed = line.trim();
        if !trimmed.is_empty() && !trimmed.starts_with('#') {
            lines.push(trimmed.to_string());
        }
    }
    let nv: usize = lines
        .first()
        .and_then(|l| l.strip_prefix("vertices"))
        .and_then(|n| n.trim().parse().ok())
        .ok_or_else(|| bad("expected 'vertices <count>'"))?;
    let vertex_lines: Vec<&String> = lines.iter().skip(1).take(nv).collect();
    if vertex_lines.len() != nv {
        return Err(bad("truncated vertices"));
    }
    let mut vertices = Vec::with_capacity(nv);
    for line in vertex_lines {
        let v: Vec<f64> = line
            .split_whitespace()
            .map(|s| s.parse::<f64>().map_err(|_| bad("bad coordinate")))
            .collect::<Result<_>>()?;
        if v.len() != 3 {
            return Err(bad("vertex needs 3 coordinates"));
        }
        vertices.push([v[0], v[1], v[2]]);
    }

    let nt: usize = lines
        .get(1 + nv)
        .and_then(|l| l.strip_prefix("tets"))
        .and_then(|n| n.trim().parse().ok())
        .ok_or_else(|| bad("expected 'tets <count>'"))?;
    let tet_lines = &lines[(2 + nv).min(lines.len())..];
    if tet_lines.len() != nt {
        return Err(bad("tet count mismatch"));
    }
    let mut tets = Vec::with_capacity(nt);
    for line in tet_lines {
        let t: Vec<usize> = line
            .split_whitespace()
            .map(|s| s.parse::<usize>().map_err(|_| bad("bad vertex id")))
            .collect::<Result<_>>()?;
        if t.len() != 4 || t.iter().any(|&v| v >= nv) {
            return Err(bad("tet needs 4 valid vertex ids"));
        }
        tets.push([t[0], t[1], t[2], t[3]]);
    }
    Ok((vertices, tets))
}
