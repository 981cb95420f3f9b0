use std::collections::HashMap;

use super::Mesh;
use crate::error::{Error, Result};

/// One cell adjacent to a facet, together with the facet's local index in it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FacetSide {
    pub cell: usize,
    pub local: usize,
}

/// An edge of the mesh skeleton.
///
/// `vertices` are ordered counter-clockwise with respect to the plus cell, and
/// `normal` points outward from the plus cell. Arclength parameter `t` runs
/// from `vertices[0]` to `vertices[1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    pub vertices: [usize; 2],
    pub plus: FacetSide,
    pub minus: Option<FacetSide>,
    pub normal: [f64; 2],
    pub length: f64,
}

impl Facet {
    pub fn is_boundary(&self) -> bool {
        self.minus.is_none()
    }

    /// The sides in jump order: plus first.
    pub fn sides(&self) -> impl Iterator<Item = FacetSide> + '_ {
        std::iter::once(self.plus).chain(self.minus)
    }

    /// Physical point at arclength fraction `t`.
    pub fn point(&self, mesh: &Mesh, t: f64) -> [f64; 2] {
        let a = mesh.vertices()[self.vertices[0]];
        let b = mesh.vertices()[self.vertices[1]];
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
    }

    /// Reference coordinates, inside `side.cell`, of the facet point at `t`.
    pub fn reference_point(&self, mesh: &Mesh, side: FacetSide, t: f64) -> [f64; 2] {
        let cell = mesh.cell(side.cell);
        // local facet runs from cell[local] to cell[local+1]; it matches our
        // parametrization when its first vertex is vertices[0].
        let local_t = if cell[side.local] == self.vertices[0] { t } else { 1.0 - t };
        mesh.kind().facet_point(side.local, local_t)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FacetTopology {
    pub facets: Vec<Facet>,
    pub interior_facets: Vec<usize>,
    pub boundary_facets: Vec<usize>,
    /// `cell_facets[c * nv + i]` is the facet index of local facet `i` of cell `c`.
    cell_facets: Vec<usize>,
    verts_per_cell: usize,
}

impl FacetTopology {
    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    pub fn cell_facets(&self, c: usize) -> &[usize] {
        &self.cell_facets[c * self.verts_per_cell..(c + 1) * self.verts_per_cell]
    }

    /// Same skeleton with every interior facet's plus and minus cells swapped,
    /// so that every interior normal is negated.
    pub fn flipped(&self) -> FacetTopology {
        let mut out = self.clone();
        for f in &mut out.facets {
            if let Some(minus) = f.minus {
                f.minus = Some(f.plus);
                f.plus = minus;
                f.vertices.swap(0, 1);
                f.normal = [-f.normal[0], -f.normal[1]];
            }
        }
        out
    }
}

fn outward_normal(a: [f64; 2], b: [f64; 2]) -> ([f64; 2], f64) {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len = d[0].hypot(d[1]);
    ([d[1] / len, -d[0] / len], len)
}

/// Enumerates facets in order of first appearance (cell by cell, local facet
/// by local facet). The plus cell of an interior facet is the lower-indexed
/// neighbour.
pub fn build_facet_topology(mesh: &Mesh) -> Result<FacetTopology> {
    let nv = mesh.kind().num_vertices();
    let mut by_edge: HashMap<(usize, usize), usize> = HashMap::new();
    let mut facets: Vec<Facet> = Vec::new();
    let mut cell_facets = vec![usize::MAX; mesh.num_cells() * nv];

    for c in 0..mesh.num_cells() {
        let cell = mesh.cell(c);
        for local in 0..nv {
            let a = cell[local];
            let b = cell[(local + 1) % nv];
            let key = (a.min(b), a.max(b));
            let side = FacetSide { cell: c, local };
            match by_edge.get(&key) {
                None => {
                    let (normal, length) = outward_normal(mesh.vertices()[a], mesh.vertices()[b]);
                    by_edge.insert(key, facets.len());
                    cell_facets[c * nv + local] = facets.len();
                    facets.push(Facet {
                        vertices: [a, b],
                        plus: side,
                        minus: None,
                        normal,
                        length,
                    });
                }
                Some(&f) => {
                    let facet = &mut facets[f];
                    if facet.minus.is_some() {
                        return Err(Error::Topology(format!(
                            "edge ({}, {}) is shared by three or more cells",
                            key.0, key.1
                        )));
                    }
                    if facet.vertices != [b, a] {
                        return Err(Error::Topology(format!(
                            "cells {} and {c} traverse edge ({}, {}) in the same direction",
                            facet.plus.cell, key.0, key.1
                        )));
                    }
                    facet.minus = Some(side);
                    cell_facets[c * nv + local] = f;
                }
            }
        }
    }

    let interior_facets = (0..facets.len()).filter(|&f| !facets[f].is_boundary()).collect();
    let boundary_facets = (0..facets.len()).filter(|&f| facets[f].is_boundary()).collect();
    Ok(FacetTopology {
        facets,
        interior_facets,
        boundary_facets,
        cell_facets,
        verts_per_cell: nv,
    })
}
