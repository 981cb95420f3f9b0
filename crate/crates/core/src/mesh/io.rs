//! Plain-text mesh files.
//!
//! ```text
//! # comment lines start with '#'
//! vertices 4
//! 0 0
//! 1 0
//! 1 1
//! 0 1
//! cells 2 tri
//! 0 1 2
//! 0 2 3
//! ```
//!
//! Vertex indices are zero-based. The cell kind is `tri` or `quad`.

use std::fmt::Write as _;

use super::{signed_area, CellKind, Mesh};
use crate::error::{Error, Result};

fn load_err(line: usize, message: impl Into<String>) -> Error {
    Error::MeshLoad {
        line,
        message: message.into(),
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    /// Next non-empty, non-comment line with its 1-based number.
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (i, raw) in self.inner.by_ref() {
            self.last = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            return Some((i + 1, line));
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let last = self.last;
        self.next_content()
            .ok_or_else(|| load_err(last + 1, format!("unexpected end of file, expected {what}")))
    }
}

fn parse_header<'a>(line_no: usize, line: &'a str, keyword: &str) -> Result<(usize, Vec<&'a str>)> {
    let mut tokens = line.split_whitespace();
    if tokens.next() != Some(keyword) {
        return Err(load_err(line_no, format!("expected `{keyword} <count>`, found `{line}`")));
    }
    let count = tokens
        .next()
        .ok_or_else(|| load_err(line_no, format!("missing count after `{keyword}`")))?
        .parse::<usize>()
        .map_err(|e| load_err(line_no, format!("bad {keyword} count: {e}")))?;
    Ok((count, tokens.collect()))
}

/// Parses a mesh file, reorienting clockwise cells to counter-clockwise.
pub fn load_mesh(text: &str) -> Result<Mesh> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };

    let (line_no, header) = lines.expect("`vertices N` header")?;
    let (nv, rest) = parse_header(line_no, header, "vertices")?;
    if !rest.is_empty() {
        return Err(load_err(line_no, "trailing tokens after vertex count"));
    }
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (line_no, line) = lines.expect("vertex coordinates")?;
        let coords: Vec<f64> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| load_err(line_no, format!("bad coordinate: {e}")))?;
        if coords.len() != 2 {
            return Err(load_err(line_no, format!("expected 2 coordinates, found {}", coords.len())));
        }
        vertices.push([coords[0], coords[1]]);
    }

    let (line_no, header) = lines.expect("`cells M kind` header")?;
    let (nc, rest) = parse_header(line_no, header, "cells")?;
    let kind = match rest.as_slice() {
        ["tri"] => CellKind::Triangle,
        ["quad"] => CellKind::Quadrilateral,
        _ => return Err(load_err(line_no, "cell kind must be `tri` or `quad`")),
    };
    let nper = kind.num_vertices();
    let mut cells = Vec::with_capacity(nc);
    let mut used = vec![false; nv];
    for c in 0..nc {
        let (line_no, line) = lines.expect("cell vertex indices")?;
        let mut cell: Vec<usize> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| load_err(line_no, format!("bad vertex index: {e}")))?;
        if cell.len() != nper {
            return Err(load_err(
                line_no,
                format!("cell {c} lists {} vertices, expected {nper}", cell.len()),
            ));
        }
        for &v in &cell {
            if v >= nv {
                return Err(load_err(
                    line_no,
                    format!("cell {c} references vertex {v} but the file declares {nv} vertices"),
                ));
            }
            used[v] = true;
        }
        let coords: Vec<[f64; 2]> = cell.iter().map(|&v| vertices[v]).collect();
        let area = signed_area(&coords);
        if area < 0.0 {
            cell.reverse();
        } else if !(area > 0.0) {
            return Err(load_err(line_no, format!("cell {c} is degenerate (zero area)")));
        }
        cells.push(cell);
    }
    if let Some((line_no, _)) = lines.next_content() {
        return Err(load_err(line_no, "unexpected content after the last cell"));
    }
    if let Some(v) = used.iter().position(|u| !u) {
        return Err(load_err(lines.last, format!("vertex {v} is not used by any cell")));
    }
    Mesh::new(vertices, cells, kind).map_err(|e| load_err(lines.last, e.to_string()))
}

/// Serializes a mesh in the format read by [`load_mesh`].
pub fn write_mesh(mesh: &Mesh) -> String {
    let mut out = String::new();
    writeln!(out, "vertices {}", mesh.num_vertices()).unwrap();
    for v in mesh.vertices() {
        writeln!(out, "{:?} {:?}", v[0], v[1]).unwrap();
    }
    let kind = match mesh.kind() {
        CellKind::Triangle => "tri",
        CellKind::Quadrilateral => "quad",
    };
    writeln!(out, "cells {} {kind}", mesh.num_cells()).unwrap();
    for cell in mesh.cells() {
        let idx: Vec<String> = cell.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", idx.join(" ")).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_structured_quad_mesh, build_structured_triangle_mesh, BoundingBox};

    const UNIT_SQUARE: &str = "# two triangles\nvertices 4\n0 0\n1 0\n0 1\n1 1\ncells 2 tri\n0 1 2\n1 3 2\n";

    #[test]
    fn unit_square_file_matches_structured_mesh() {
        let loaded = load_mesh(UNIT_SQUARE).unwrap();
        let built = build_structured_triangle_mesh(1, BoundingBox::unit_square()).unwrap();
        assert_eq!(loaded, built);
    }

    #[test]
    fn clockwise_triangle_is_reoriented() {
        let m = load_mesh("vertices 3\n0 0\n0 1\n1 0\ncells 1 tri\n0 1 2\n").unwrap();
        assert!(m.signed_area(0) > 0.0);
        assert_eq!(m.cell(0), &[2, 1, 0]);
    }

    #[test]
    fn out_of_range_vertex_is_an_error() {
        let err = load_mesh("vertices 4\n0 0\n1 0\n1 1\n0 1\ncells 1 tri\n0 1 99\n").unwrap_err();
        match err {
            Error::MeshLoad { line, message } => {
                assert_eq!(line, 7);
                assert!(message.contains("99"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dangling_vertex_and_garbage_rejected() {
        assert!(load_mesh("vertices 4\n0 0\n1 0\n0 1\n5 5\ncells 1 tri\n0 1 2\n").is_err());
        assert!(load_mesh("vertices 3\n0 0\n1 x\n0 1\ncells 1 tri\n0 1 2\n").is_err());
        assert!(load_mesh("vertices 3\n0 0\n1 0\n0 1\ncells 1 hex\n0 1 2\n").is_err());
        assert!(load_mesh("vertices 3\n0 0\n1 0\n2 0\ncells 1 tri\n0 1 2\n").is_err());
        assert!(load_mesh("vertices 3\n0 0\n1 0\n0 1\ncells 2 tri\n0 1 2\n").is_err());
    }

    #[test]
    fn write_then_load_roundtrip() {
        let m = build_structured_quad_mesh(3, BoundingBox::new([-1.0, -1.0], [1.0, 1.0])).unwrap();
        assert_eq!(load_mesh(&write_mesh(&m)).unwrap(), m);
    }
}
