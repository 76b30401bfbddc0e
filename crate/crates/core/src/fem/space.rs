use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;
use crate::mesh::{Mesh, Point};

use super::quadrature::TriangleRule;
use super::reference::{BasisTable, ReferenceElement};

pub const MAX_DEGREE: usize = 10;

/// Affine map `x = origin + J ξ` of one cell.
#[derive(Debug, Clone, Copy)]
pub struct CellGeometry {
    pub origin: Point,
    pub jac: [[f64; 2]; 2],
    pub inv: [[f64; 2]; 2],
    pub det: f64,
}

impl CellGeometry {
    fn new(v: [Point; 3]) -> Self {
        let jac = [
            [v[1][0] - v[0][0], v[2][0] - v[0][0]],
            [v[1][1] - v[0][1], v[2][1] - v[0][1]],
        ];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let inv = [
            [jac[1][1] / det, -jac[0][1] / det],
            [-jac[1][0] / det, jac[0][0] / det],
        ];
        Self {
            origin: v[0],
            jac,
            inv,
            det,
        }
    }

    pub fn map(&self, xi: [f64; 2]) -> Point {
        [
            self.origin[0] + self.jac[0][0] * xi[0] + self.jac[0][1] * xi[1],
            self.origin[1] + self.jac[1][0] * xi[0] + self.jac[1][1] * xi[1],
        ]
    }

    /// Physical gradient `J^{-T} ∇_ξ`.
    pub fn grad(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.inv[0][0] * g[0] + self.inv[1][0] * g[1],
            self.inv[0][1] * g[0] + self.inv[1][1] * g[1],
        ]
    }

    /// Physical Laplacian `tr(J^{-T} H_ξ J^{-1})` from the reference Hessian.
    pub fn laplacian(&self, h: [f64; 3]) -> f64 {
        let hm = [[h[0], h[1]], [h[1], h[2]]];
        let mut lap = 0.0;
        for i in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    lap += self.inv[a][i] * hm[a][b] * self.inv[b][i];
                }
            }
        }
        lap
    }
}

/// Conforming degree-`p` Lagrange space on a [`Mesh`].
#[derive(Debug, Clone)]
pub struct LagrangeSpace {
    mesh: Mesh,
    element: ReferenceElement,
    dof_coords: Vec<Point>,
    cell_dofs: Vec<Vec<usize>>,
    is_boundary: Vec<bool>,
    boundary_dofs: Vec<usize>,
    interior_dofs: Vec<usize>,
    interior_index: Vec<Option<usize>>,
    geometry: Vec<CellGeometry>,
    rule: TriangleRule,
    tables: Vec<BasisTable>,
    node_tables: Vec<BasisTable>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Mass,
    Stiffness,
}

impl LagrangeSpace {
    pub fn new(mesh: Mesh, p: usize) -> Result<Self> {
        if !(1..=MAX_DEGREE).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "polynomial degree must lie in 1..={MAX_DEGREE}, got {p}"
            )));
        }
        let element = ReferenceElement::new(p);
        let nv = mesh.num_vertices();
        let ne = mesh.edges().len();
        let per_edge = p - 1;
        let per_cell = element.num_nodes() - 3 - 3 * per_edge;
        let edge_offset = nv;
        let cell_offset = nv + ne * per_edge;
        let ndofs = cell_offset + mesh.num_cells() * per_cell;

        let mut dof_coords = vec![[f64::NAN; 2]; ndofs];
        let mut cell_dofs = Vec::with_capacity(mesh.num_cells());
        let geometry: Vec<_> = (0..mesh.num_cells())
            .map(|c| CellGeometry::new(mesh.cell_vertices(c)))
            .collect();
        for cell in 0..mesh.num_cells() {
            let verts = mesh.cells()[cell];
            let edges = mesh.cell_edges(cell);
            let mut dofs = Vec::with_capacity(element.num_nodes());
            let mut interior_counter = 0;
            for (local, idx) in element.nodes().iter().enumerate() {
                let zeros = idx.iter().filter(|&&i| i == 0).count();
                let global = match zeros {
                    2 => verts[idx.iter().position(|&i| i == p).unwrap()],
                    1 => {
                        let k = idx.iter().position(|&i| i == 0).unwrap();
                        let a = (k + 1) % 3;
                        let b = (k + 2) % 3;
                        // position counted from the lower global vertex
                        let m = if verts[a] > verts[b] { idx[a] } else { idx[b] };
                        edge_offset + edges[k] * per_edge + (m - 1)
                    }
                    _ => {
                        interior_counter += 1;
                        cell_offset + cell * per_cell + interior_counter - 1
                    }
                };
                if dof_coords[global][0].is_nan() {
                    dof_coords[global] = geometry[cell].map(element.node_reference(local));
                }
                dofs.push(global);
            }
            cell_dofs.push(dofs);
        }

        let mut is_boundary = vec![false; ndofs];
        for v in mesh.boundary_vertices() {
            is_boundary[v] = true;
        }
        for e in 0..ne {
            if mesh.edge_is_boundary(e) {
                for m in 0..per_edge {
                    is_boundary[edge_offset + e * per_edge + m] = true;
                }
            }
        }
        let boundary_dofs: Vec<usize> = (0..ndofs).filter(|&i| is_boundary[i]).collect();
        let interior_dofs: Vec<usize> = (0..ndofs).filter(|&i| !is_boundary[i]).collect();
        let mut interior_index = vec![None; ndofs];
        for (k, &i) in interior_dofs.iter().enumerate() {
            interior_index[i] = Some(k);
        }

        let rule = TriangleRule::with_degree((2 * p + 2).max(6));
        let bary = |xi: [f64; 2]| [1.0 - xi[0] - xi[1], xi[0], xi[1]];
        let tables = rule
            .points
            .iter()
            .map(|&xi| element.tabulate(bary(xi)))
            .collect();
        let node_tables = (0..element.num_nodes())
            .map(|i| element.tabulate(element.node_barycentric(i)))
            .collect();

        Ok(Self {
            mesh,
            element,
            dof_coords,
            cell_dofs,
            is_boundary,
            boundary_dofs,
            interior_dofs,
            interior_index,
            geometry,
            rule,
            tables,
            node_tables,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.element.degree()
    }

    pub fn element(&self) -> &ReferenceElement {
        &self.element
    }

    pub fn num_dofs(&self) -> usize {
        self.dof_coords.len()
    }

    pub fn dof_coords(&self) -> &[Point] {
        &self.dof_coords
    }

    pub fn cell_dofs(&self, cell: usize) -> &[usize] {
        &self.cell_dofs[cell]
    }

    pub fn boundary_dofs(&self) -> &[usize] {
        &self.boundary_dofs
    }

    pub fn interior_dofs(&self) -> &[usize] {
        &self.interior_dofs
    }

    pub fn is_boundary(&self, dof: usize) -> bool {
        self.is_boundary[dof]
    }

    pub fn interior_index(&self, dof: usize) -> Option<usize> {
        self.interior_index[dof]
    }

    pub fn geometry(&self, cell: usize) -> &CellGeometry {
        &self.geometry[cell]
    }

    pub fn rule(&self) -> &TriangleRule {
        &self.rule
    }

    pub fn quadrature_tables(&self) -> &[BasisTable] {
        &self.tables
    }

    pub fn node_tables(&self) -> &[BasisTable] {
        &self.node_tables
    }

    /// Physical quadrature points and weights of `cell`.
    pub fn cell_quadrature(&self, cell: usize) -> impl Iterator<Item = (usize, Point, f64)> + '_ {
        let g = &self.geometry[cell];
        self.rule
            .points
            .iter()
            .zip(&self.rule.weights)
            .enumerate()
            .map(move |(q, (&xi, &w))| (q, g.map(xi), w * g.det.abs()))
    }

    /// Assembles `(φ_i, φ_j)` or `(c² ∇φ_i, ∇φ_j)` over all DOFs.
    pub fn assemble(
        &self,
        kind: OperatorKind,
        wavespeed: &dyn Fn(Point) -> f64,
    ) -> Result<CsrMatrix> {
        let nloc = self.element.num_nodes();
        let mut entries = Vec::with_capacity(self.mesh.num_cells() * nloc * nloc);
        let mut local = vec![0.0; nloc * nloc];
        for cell in 0..self.mesh.num_cells() {
            local.iter_mut().for_each(|v| *v = 0.0);
            let g = &self.geometry[cell];
            for (q, x, w) in self.cell_quadrature(cell) {
                let t = &self.tables[q];
                match kind {
                    OperatorKind::Mass => {
                        for i in 0..nloc {
                            let wi = w * t.values[i];
                            for j in 0..nloc {
                                local[i * nloc + j] += wi * t.values[j];
                            }
                        }
                    }
                    OperatorKind::Stiffness => {
                        let c = wavespeed(x);
                        if !(c > 0.0) || !c.is_finite() {
                            return Err(Error::Domain(format!(
                                "wavespeed must be positive, got {c} at ({}, {})",
                                x[0], x[1]
                            )));
                        }
                        let grads: Vec<[f64; 2]> = t.grads.iter().map(|&gr| g.grad(gr)).collect();
                        let wc = w * c * c;
                        for i in 0..nloc {
                            for j in 0..nloc {
                                local[i * nloc + j] +=
                                    wc * (grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1]);
                            }
                        }
                    }
                }
            }
            let dofs = &self.cell_dofs[cell];
            for i in 0..nloc {
                for j in 0..nloc {
                    entries.push((dofs[i], dofs[j], local[i * nloc + j]));
                }
            }
        }
        Ok(CsrMatrix::from_triplets(
            self.num_dofs(),
            self.num_dofs(),
            &entries,
        ))
    }

    pub fn assemble_mass(&self) -> CsrMatrix {
        self.assemble(OperatorKind::Mass, &|_| 1.0)
            .expect("mass assembly does not sample the wavespeed")
    }

    /// `(f, φ_i)_Ω` for every DOF.
    pub fn load_vector(&self, f: &dyn Fn(Point) -> f64) -> Vec<f64> {
        let mut b = vec![0.0; self.num_dofs()];
        for cell in 0..self.mesh.num_cells() {
            let dofs = &self.cell_dofs[cell];
            for (q, x, w) in self.cell_quadrature(cell) {
                let fw = w * f(x);
                for (i, &phi) in self.tables[q].values.iter().enumerate() {
                    b[dofs[i]] += fw * phi;
                }
            }
        }
        b
    }

    /// `(c² ∇f, ∇φ_i)_Ω` for every DOF.
    pub fn gradient_load_vector(
        &self,
        grad_f: &dyn Fn(Point) -> [f64; 2],
        wavespeed: &dyn Fn(Point) -> f64,
    ) -> Vec<f64> {
        let mut b = vec![0.0; self.num_dofs()];
        for cell in 0..self.mesh.num_cells() {
            let dofs = &self.cell_dofs[cell];
            let g = &self.geometry[cell];
            for (q, x, w) in self.cell_quadrature(cell) {
                let c = wavespeed(x);
                let gf = grad_f(x);
                for (i, &gr) in self.tables[q].grads.iter().enumerate() {
                    let gp = g.grad(gr);
                    b[dofs[i]] += w * c * c * (gf[0] * gp[0] + gf[1] * gp[1]);
                }
            }
        }
        b
    }

    /// Nodal interpolation `I_h f`.
    pub fn interpolate(&self, f: &dyn Fn(Point) -> f64) -> Vec<f64> {
        self.dof_coords.iter().map(|&x| f(x)).collect()
    }

    pub fn eval_in_cell(&self, coeffs: &[f64], cell: usize, lam: [f64; 3]) -> f64 {
        let vals = self.element.values_at(lam);
        self.cell_dofs[cell]
            .iter()
            .zip(vals)
            .map(|(&d, v)| coeffs[d] * v)
            .sum()
    }

    pub fn eval(&self, coeffs: &[f64], x: Point) -> Result<f64> {
        let (cell, lam) = self.mesh.locate(x)?;
        Ok(self.eval_in_cell(coeffs, cell, lam))
    }

    /// `√∫_Ω (u_h − f)²`.
    pub fn l2_distance(&self, coeffs: &[f64], f: &dyn Fn(Point) -> f64) -> f64 {
        self.l2_distance_squared(coeffs, f).sqrt()
    }

    pub fn l2_distance_squared(&self, coeffs: &[f64], f: &dyn Fn(Point) -> f64) -> f64 {
        let mut acc = 0.0;
        for cell in 0..self.mesh.num_cells() {
            let dofs = &self.cell_dofs[cell];
            for (q, x, w) in self.cell_quadrature(cell) {
                let uh: f64 = self.tables[q]
                    .values
                    .iter()
                    .zip(dofs)
                    .map(|(v, &d)| v * coeffs[d])
                    .sum();
                let e = uh - f(x);
                acc += w * e * e;
            }
        }
        acc
    }

    pub fn l2_norm(&self, coeffs: &[f64]) -> f64 {
        self.l2_distance(coeffs, &|_| 0.0)
    }

    /// `√∫_Ω c² |∇(u_h − f)|²`.
    pub fn h1_semi_distance(
        &self,
        coeffs: &[f64],
        grad_f: &dyn Fn(Point) -> [f64; 2],
        wavespeed: &dyn Fn(Point) -> f64,
    ) -> f64 {
        let mut acc = 0.0;
        for cell in 0..self.mesh.num_cells() {
            let dofs = &self.cell_dofs[cell];
            let g = &self.geometry[cell];
            for (q, x, w) in self.cell_quadrature(cell) {
                let mut gr = [0.0; 2];
                for (r, &d) in self.tables[q].grads.iter().zip(dofs) {
                    gr[0] += r[0] * coeffs[d];
                    gr[1] += r[1] * coeffs[d];
                }
                let gu = g.grad(gr);
                let gf = grad_f(x);
                let c = wavespeed(x);
                acc += w * c * c * ((gu[0] - gf[0]).powi(2) + (gu[1] - gf[1]).powi(2));
            }
        }
        acc.sqrt()
    }

    pub fn h1_semi_norm(&self, coeffs: &[f64], wavespeed: &dyn Fn(Point) -> f64) -> f64 {
        self.h1_semi_distance(coeffs, &|_| [0.0, 0.0], wavespeed)
    }

    /// Elementwise `scale · Δ(u_h|_K)`, stored as values at each cell's lattice nodes.
    pub fn broken_laplacian(&self, coeffs: &[f64], scale: f64) -> BrokenField {
        let values = (0..self.mesh.num_cells())
            .map(|cell| {
                let g = &self.geometry[cell];
                let dofs = &self.cell_dofs[cell];
                self.node_tables
                    .iter()
                    .map(|t| {
                        scale
                            * t.hessians
                                .iter()
                                .zip(dofs)
                                .map(|(h, &d)| coeffs[d] * g.laplacian(*h))
                                .sum::<f64>()
                    })
                    .collect()
            })
            .collect();
        BrokenField { values }
    }
}

/// Discontinuous piecewise polynomial: local nodal values per cell in the
/// degree-`p` Lagrange basis of the owning space.
#[derive(Debug, Clone, PartialEq)]
pub struct BrokenField {
    pub values: Vec<Vec<f64>>,
}

impl BrokenField {
    pub fn eval_in_cell(&self, space: &LagrangeSpace, cell: usize, lam: [f64; 3]) -> f64 {
        space
            .element()
            .values_at(lam)
            .iter()
            .zip(&self.values[cell])
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn eval(&self, space: &LagrangeSpace, x: Point) -> Result<f64> {
        let (cell, lam) = space.mesh().locate(x)?;
        Ok(self.eval_in_cell(space, cell, lam))
    }

    pub fn l2_norm(&self, space: &LagrangeSpace) -> f64 {
        let mut acc = 0.0;
        for (cell, vals) in self.values.iter().enumerate() {
            for (q, _, w) in space.cell_quadrature(cell) {
                let v: f64 = space.quadrature_tables()[q]
                    .values
                    .iter()
                    .zip(vals)
                    .map(|(a, b)| a * b)
                    .sum();
                acc += w * v * v;
            }
        }
        acc.sqrt()
    }
}
