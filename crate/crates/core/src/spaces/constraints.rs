use super::basis::legendre;
use super::FeSpace;
use crate::error::{Error, Result};
use crate::mesh::{CellKind, FacetTopology, Mesh};
use crate::quadrature::{interval_rule, QuadratureRule};

/// Normal-moment constraints of one facet.
///
/// `raw[q * dofs.len() + a]` is the moment of `[[phi_a]] . n_F` against the
/// `q`-th arclength-orthonormal Legendre polynomial on the facet; `rows` are
/// the same functionals after Gram-Schmidt in coefficient space, with
/// `rows = transform * raw`.
#[derive(Clone, Debug)]
pub struct FacetConstraintBlock {
    pub facet: usize,
    pub dofs: Vec<usize>,
    pub raw: Vec<f64>,
    pub rows: Vec<f64>,
    pub transform: Vec<f64>,
}

/// Linear operator whose kernel is the normal-continuous subspace of a
/// discontinuous vector space with zero boundary normal flux (the BDM space
/// on simplices).
#[derive(Clone, Debug)]
pub struct NormalContinuityConstraints {
    pub blocks: Vec<FacetConstraintBlock>,
    pub moments_per_facet: usize,
    pub velocity_dim: usize,
}

/// Arclength-orthonormal Legendre polynomials on a facet of length `h`.
pub(crate) fn facet_moment_basis(k: usize, t: f64, h: f64, out: &mut [f64]) {
    let mut ders = [0.0; 16];
    legendre(k, t, out, &mut ders);
    for (q, v) in out.iter_mut().enumerate().take(k + 1) {
        *v *= ((2 * q + 1) as f64 / h).sqrt();
    }
}

pub(crate) fn moment_rule(k: usize) -> QuadratureRule {
    interval_rule(2 * k + 1)
}

pub fn build_normal_constraints(space: &FeSpace, topo: &FacetTopology) -> Result<NormalContinuityConstraints> {
    if space.components() != 2 || !space.is_discontinuous() {
        return Err(Error::invalid("normal constraints need a discontinuous vector space"));
    }
    if space.mesh().kind() != CellKind::Triangle {
        return Err(Error::invalid("normal constraints are built on triangular meshes"));
    }
    let k = space.degree();
    let nm = k + 1;
    let rule = moment_rule(k);
    let ns = space.scalar_local_dim();
    let mut blocks = Vec::with_capacity(topo.num_facets());
    let mut lq = vec![0.0; nm];
    for f in 0..topo.num_facets() {
        let fv = space.facet_values(topo, f, &rule);
        let n = fv.normal;
        let mut dofs = Vec::new();
        for side in &fv.sides {
            dofs.extend_from_slice(space.cell_dofs(side.cell));
        }
        let nd = dofs.len();
        let mut raw = vec![0.0; nm * nd];
        for (q, p) in rule.points.iter().enumerate() {
            facet_moment_basis(k, p[0], fv.length, &mut lq);
            for (s, side) in fv.sides.iter().enumerate() {
                let sign = if s == 0 { 1.0 } else { -1.0 };
                for comp in 0..2 {
                    for i in 0..ns {
                        let a = s * 2 * ns + comp * ns + i;
                        let jump_n = sign * side.value(q, i) * n[comp];
                        for m in 0..nm {
                            raw[m * nd + a] += fv.ds[q] * jump_n * lq[m];
                        }
                    }
                }
            }
        }
        let (rows, transform) = orthonormalize_rows(&raw, nm, nd)
            .ok_or_else(|| Error::Internal(format!("normal moment rows of facet {f} are rank deficient")))?;
        blocks.push(FacetConstraintBlock {
            facet: f,
            dofs,
            raw,
            rows,
            transform,
        });
    }
    Ok(NormalContinuityConstraints {
        blocks,
        moments_per_facet: nm,
        velocity_dim: space.dim(),
    })
}

/// Gram-Schmidt on the rows of an `m x n` matrix. Returns the orthonormal rows
/// and the lower-triangular `m x m` transform, or `None` on rank loss.
fn orthonormalize_rows(raw: &[f64], m: usize, n: usize) -> Option<(Vec<f64>, Vec<f64>)> {
    let mut rows = raw.to_vec();
    let mut t = vec![0.0; m * m];
    for i in 0..m {
        t[i * m + i] = 1.0;
    }
    for i in 0..m {
        let orig: f64 = raw[i * n..(i + 1) * n].iter().map(|v| v * v).sum::<f64>().sqrt();
        for _ in 0..2 {
            for j in 0..i {
                let dot: f64 = (0..n).map(|c| rows[i * n + c] * rows[j * n + c]).sum();
                for c in 0..n {
                    rows[i * n + c] -= dot * rows[j * n + c];
                }
                for c in 0..m {
                    t[i * m + c] -= dot * t[j * m + c];
                }
            }
        }
        let norm: f64 = rows[i * n..(i + 1) * n].iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 1e-10 * orig) || orig == 0.0 {
            return None;
        }
        for c in 0..n {
            rows[i * n + c] /= norm;
        }
        for c in 0..m {
            t[i * m + c] /= norm;
        }
    }
    Some((rows, t))
}

impl NormalContinuityConstraints {
    pub fn num_rows(&self) -> usize {
        self.blocks.len() * self.moments_per_facet
    }

    /// Row index of moment `m` of the `b`-th block.
    pub fn row(&self, b: usize, m: usize) -> usize {
        b * self.moments_per_facet + m
    }

    fn apply(&self, v: &[f64], raw: bool) -> Vec<f64> {
        let nm = self.moments_per_facet;
        let mut out = vec![0.0; self.num_rows()];
        for (b, blk) in self.blocks.iter().enumerate() {
            let mat = if raw { &blk.raw } else { &blk.rows };
            let nd = blk.dofs.len();
            for m in 0..nm {
                out[b * nm + m] = blk.dofs.iter().enumerate().map(|(a, &d)| mat[m * nd + a] * v[d]).sum();
            }
        }
        out
    }

    /// Orthonormalized constraint residuals `L v`.
    pub fn residual(&self, v: &[f64]) -> Vec<f64> {
        self.apply(v, false)
    }

    /// Raw normal-jump moments of `v` against the facet Legendre basis.
    pub fn raw_moments(&self, v: &[f64]) -> Vec<f64> {
        self.apply(v, true)
    }

    /// Moments `oint_F (u . n_F) L_q ds` of a continuous field, in the raw
    /// layout of [`Self::raw_moments`]. On interior facets these are the
    /// moments a normal-continuous field would have on one side only, so
    /// callers usually compare them on boundary facets.
    pub fn field_moments(&self, mesh: &Mesh, topo: &FacetTopology, k: usize, u: impl Fn([f64; 2]) -> [f64; 2]) -> Vec<f64> {
        let nm = self.moments_per_facet;
        let rule = interval_rule(2 * k + 10);
        let mut lq = vec![0.0; nm];
        let mut out = vec![0.0; self.num_rows()];
        for (b, blk) in self.blocks.iter().enumerate() {
            let facet = &topo.facets[blk.facet];
            for (p, w) in rule.iter() {
                let x = facet.point(mesh, p[0]);
                let val = u(x);
                let un = val[0] * facet.normal[0] + val[1] * facet.normal[1];
                facet_moment_basis(k, p[0], facet.length, &mut lq);
                for m in 0..nm {
                    out[b * nm + m] += w * facet.length * un * lq[m];
                }
            }
        }
        out
    }

    /// Triplets `(row, col, value)` of the orthonormalized operator.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let nm = self.moments_per_facet;
        self.blocks.iter().enumerate().flat_map(move |(b, blk)| {
            let nd = blk.dofs.len();
            (0..nm).flat_map(move |m| {
                blk.dofs
                    .iter()
                    .enumerate()
                    .map(move |(a, &d)| (b * nm + m, d, blk.rows[m * nd + a]))
            })
        })
    }

    /// A copy with every row of one facet block scaled and sheared, used to
    /// exercise failure detection.
    pub fn corrupted(&self, block: usize) -> Self {
        let mut out = self.clone();
        let blk = &mut out.blocks[block];
        let nd = blk.dofs.len();
        for v in blk.rows[..nd].iter_mut() {
            *v *= 0.5;
        }
        for a in 0..nd {
            blk.rows[a] += 0.25 * (a as f64).sin();
        }
        out
    }
}
