//! Text format `WGMESH 1`.
//!
//! ```text
//! WGMESH 1
//! domain <x0> <y0> <x1> <y1>
//! kind tri|quad
//! level <n>
//! chord 0|1
//! curves <count>
//! <id> <kind> <params...>
//! vertices <count>
//! <id> <x> <y>
//! edges <count>
//! <id> <v0> <v1> <tag> [<curve_id> <t0> <t1>]
//! cells <count>
//! <id> <subdomain> <edge ids in counter-clockwise order...>
//! ```
//! Reals are written with 17 significant digits so a load/save round trip is exact.

use std::fmt::Write as _;
use std::path::Path;

use super::{
    Cell, CellEdge, Edge, EdgeGeometry, EdgeTag, InterfaceCurve, InterfaceMesh, MeshError,
    MeshKind, Rect, Subdomain,
};
use crate::Vec2;

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serializes `mesh` in the `WGMESH 1` format.
pub fn write_mesh(mesh: &InterfaceMesh) -> String {
    let mut out = String::new();
    let d = mesh.domain;
    let _ = writeln!(out, "WGMESH 1");
    let _ = writeln!(
        out,
        "domain {} {} {} {}",
        real(d.min.x),
        real(d.min.y),
        real(d.max.x),
        real(d.max.y)
    );
    let _ = writeln!(out, "kind {}", mesh.kind.name());
    let _ = writeln!(out, "level {}", mesh.level);
    let _ = writeln!(out, "chord {}", u8::from(mesh.chord_interface));
    match &mesh.curve {
        None => {
            let _ = writeln!(out, "curves 0");
        }
        Some(c) => {
            let params: Vec<String> = c.params().into_iter().map(real).collect();
            let _ = writeln!(out, "curves 1");
            let _ = writeln!(out, "0 {} {}", c.kind_name(), params.join(" "));
        }
    }
    let _ = writeln!(out, "vertices {}", mesh.vertices.len());
    for (i, v) in mesh.vertices.iter().enumerate() {
        let _ = writeln!(out, "{i} {} {}", real(v.x), real(v.y));
    }
    let _ = writeln!(out, "edges {}", mesh.edges.len());
    for (i, e) in mesh.edges.iter().enumerate() {
        let _ = write!(out, "{i} {} {} {}", e.vertices[0], e.vertices[1], e.tag.name());
        if let EdgeGeometry::Curved { t0, t1 } = e.geometry {
            let _ = write!(out, " 0 {} {}", real(t0), real(t1));
        }
        out.push('\n');
    }
    let _ = writeln!(out, "cells {}", mesh.cells.len());
    for (i, c) in mesh.cells.iter().enumerate() {
        let _ = write!(out, "{i} {}", c.subdomain.label());
        for ce in &c.edges {
            let _ = write!(out, " {}", ce.edge);
        }
        out.push('\n');
    }
    out
}

pub fn save_mesh(mesh: &InterfaceMesh, path: &Path) -> Result<(), MeshError> {
    std::fs::write(path, write_mesh(mesh))?;
    Ok(())
}

pub fn load_mesh(path: &Path) -> Result<InterfaceMesh, MeshError> {
    parse_mesh(&std::fs::read_to_string(path)?)
}

struct Lines<'a> {
    it: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<Vec<&'a str>, MeshError> {
        for (i, l) in self.it.by_ref() {
            self.line = i + 1;
            let l = l.trim();
            if !l.is_empty() {
                return Ok(l.split_whitespace().collect());
            }
        }
        Err(self.err("unexpected end of file"))
    }

    fn err(&self, msg: &str) -> MeshError {
        MeshError::Parse {
            line: self.line,
            message: msg.to_string(),
        }
    }

    fn keyed(&mut self, key: &str) -> Result<Vec<&'a str>, MeshError> {
        let t = self.next()?;
        if t.first() != Some(&key) {
            return Err(self.err(&format!("expected '{key}'")));
        }
        Ok(t[1..].to_vec())
    }

    fn count(&mut self, key: &str) -> Result<usize, MeshError> {
        let t = self.keyed(key)?;
        match t.as_slice() {
            [n] => self.parse(n),
            _ => Err(self.err(&format!("expected '{key} <count>'"))),
        }
    }

    fn parse<T: std::str::FromStr>(&self, s: &str) -> Result<T, MeshError> {
        s.parse().map_err(|_| self.err(&format!("cannot parse '{s}'")))
    }
}

/// Parses the `WGMESH 1` format.
pub fn parse_mesh(text: &str) -> Result<InterfaceMesh, MeshError> {
    let mut l = Lines {
        it: text.lines().enumerate(),
        line: 0,
    };
    if l.next()? != ["WGMESH", "1"] {
        return Err(l.err("missing 'WGMESH 1' header"));
    }
    let d = l.keyed("domain")?;
    if d.len() != 4 {
        return Err(l.err("domain needs four reals"));
    }
    let domain = Rect::new(l.parse(d[0])?, l.parse(d[1])?, l.parse(d[2])?, l.parse(d[3])?);
    let kind = match l.keyed("kind")?.as_slice() {
        ["tri"] => MeshKind::Tri,
        ["quad"] => MeshKind::Quad,
        _ => return Err(l.err("kind must be tri or quad")),
    };
    let level = l.count("level")? as u32;
    let chord_interface = l.count("chord")? == 1;

    let ncurves = l.count("curves")?;
    let mut curve = None;
    for _ in 0..ncurves {
        let t = l.next()?;
        if t.len() < 2 {
            return Err(l.err("curve line needs id and kind"));
        }
        let params = t[2..].iter().map(|s| l.parse(s)).collect::<Result<Vec<f64>, _>>()?;
        curve = Some(InterfaceCurve::from_kind(t[1], &params).ok_or_else(|| l.err("unknown curve"))?);
    }

    let nv = l.count("vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    for i in 0..nv {
        let t = l.next()?;
        if t.len() != 3 || l.parse::<usize>(t[0])? != i {
            return Err(l.err("vertex line must be '<id> <x> <y>' in id order"));
        }
        vertices.push(Vec2::new(l.parse(t[1])?, l.parse(t[2])?));
    }

    let ne = l.count("edges")?;
    let mut edges = Vec::with_capacity(ne);
    for i in 0..ne {
        let t = l.next()?;
        if t.len() < 4 || l.parse::<usize>(t[0])? != i {
            return Err(l.err("edge line must start with '<id> <v0> <v1> <tag>' in id order"));
        }
        let v: [usize; 2] = [l.parse(t[1])?, l.parse(t[2])?];
        if v.iter().any(|&x| x >= nv) {
            return Err(l.err("edge references unknown vertex"));
        }
        let tag = match t[3] {
            "interior" => EdgeTag::Interior,
            "boundary" => EdgeTag::Boundary,
            "interface" => EdgeTag::Interface,
            _ => return Err(l.err("unknown edge tag")),
        };
        let geometry = match t.len() {
            4 => EdgeGeometry::Straight,
            7 => {
                if curve.is_none() {
                    return Err(l.err("curved edge without curve table entry"));
                }
                EdgeGeometry::Curved {
                    t0: l.parse(t[5])?,
                    t1: l.parse(t[6])?,
                }
            }
            _ => return Err(l.err("edge line has wrong number of fields")),
        };
        edges.push(Edge {
            vertices: v,
            geometry,
            tag,
            cells: Vec::new(),
        });
    }

    let nc = l.count("cells")?;
    let mut cells = Vec::with_capacity(nc);
    for i in 0..nc {
        let t = l.next()?;
        if t.len() < 5 || l.parse::<usize>(t[0])? != i {
            return Err(l.err("cell line must be '<id> <subdomain> <edges...>' with at least 3 edges"));
        }
        let subdomain = match t[1] {
            "1" => Subdomain::One,
            "2" => Subdomain::Two,
            _ => return Err(l.err("subdomain must be 1 or 2")),
        };
        let ids = t[2..].iter().map(|s| l.parse(s)).collect::<Result<Vec<usize>, _>>()?;
        if ids.iter().any(|&e| e >= ne) {
            return Err(l.err("cell references unknown edge"));
        }
        let n = ids.len();
        let mut verts = Vec::with_capacity(n);
        let mut cell_edges = Vec::with_capacity(n);
        for j in 0..n {
            let [a, b] = edges[ids[j]].vertices;
            let next = edges[ids[(j + 1) % n]].vertices;
            let start = if next.contains(&b) && !next.contains(&a) {
                a
            } else if next.contains(&a) && !next.contains(&b) {
                b
            } else {
                return Err(l.err("cell edges do not form a closed chain"));
            };
            verts.push(start);
            cell_edges.push(CellEdge {
                edge: ids[j],
                reversed: start != a,
            });
            edges[ids[j]].cells.push(i);
        }
        cells.push(Cell {
            vertices: verts,
            edges: cell_edges,
            subdomain,
        });
    }
    for e in &mut edges {
        if e.tag == EdgeTag::Interface
            && e.cells.len() == 2
            && cells[e.cells[0]].subdomain == Subdomain::Two
        {
            e.cells.swap(0, 1);
        }
    }
    Ok(InterfaceMesh {
        domain,
        kind,
        level,
        curve,
        chord_interface,
        vertices,
        edges,
        cells,
    })
}
