//! Structured conforming triangulations of axis-aligned rectangles.

use std::collections::HashMap;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Axis-aligned rectangle `(x_min, x_max) × (y_min, y_max)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl BoundingBox {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Self {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    pub fn unit_square() -> Self {
        Self::new(0.0, 1.0, 0.0, 1.0)
    }

    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }

    fn is_degenerate(&self) -> bool {
        !(self.x_max > self.x_min && self.y_max > self.y_min) || !self.area().is_finite()
    }
}

/// A 2D simplicial mesh. Cells are stored counter-clockwise.
#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Point>,
    cells: Vec<[usize; 3]>,
    boundary_edges: Vec<[usize; 2]>,
    bbox: BoundingBox,
    /// Sorted vertex pair for every edge, indexed by edge id.
    edges: Vec<[usize; 2]>,
    /// Edge ids of each cell, local edge `k` is opposite local vertex `k`.
    cell_edges: Vec<[usize; 3]>,
    edge_is_boundary: Vec<bool>,
    /// Structured grid resolution, used for O(1) point location.
    grid: (usize, usize),
}

impl Mesh {
    /// Grid of `nx × ny` rectangles, each split along its lower-left to
    /// upper-right diagonal.
    pub fn structured(nx: usize, ny: usize, bbox: BoundingBox) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidArgument(format!(
                "grid resolution must be positive, got {nx}×{ny}"
            )));
        }
        if bbox.is_degenerate() {
            return Err(Error::InvalidArgument(format!(
                "degenerate bounding box {bbox:?}"
            )));
        }
        let dx = (bbox.x_max - bbox.x_min) / nx as f64;
        let dy = (bbox.y_max - bbox.y_min) / ny as f64;
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                // Pin the last row/column to the box edges exactly.
                let x = if i == nx {
                    bbox.x_max
                } else {
                    bbox.x_min + i as f64 * dx
                };
                let y = if j == ny {
                    bbox.y_max
                } else {
                    bbox.y_min + j as f64 * dy
                };
                vertices.push([x, y]);
            }
        }
        let idx = |i: usize, j: usize| j * (nx + 1) + i;
        let mut cells = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let v00 = idx(i, j);
                let v10 = idx(i + 1, j);
                let v01 = idx(i, j + 1);
                let v11 = idx(i + 1, j + 1);
                cells.push([v00, v10, v11]);
                cells.push([v00, v11, v01]);
            }
        }
        Ok(Self::from_parts(vertices, cells, bbox, (nx, ny)))
    }

    fn from_parts(
        vertices: Vec<Point>,
        cells: Vec<[usize; 3]>,
        bbox: BoundingBox,
        grid: (usize, usize),
    ) -> Self {
        let mut edge_ids: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut edge_count = Vec::new();
        let mut cell_edges = Vec::with_capacity(cells.len());
        for cell in &cells {
            let mut ids = [0; 3];
            for (k, id) in ids.iter_mut().enumerate() {
                let a = cell[(k + 1) % 3];
                let b = cell[(k + 2) % 3];
                let key = [a.min(b), a.max(b)];
                *id = *edge_ids.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edge_count.push(0usize);
                    edges.len() - 1
                });
                edge_count[*id] += 1;
            }
            cell_edges.push(ids);
        }
        let edge_is_boundary: Vec<bool> = edge_count.iter().map(|&c| c == 1).collect();
        let boundary_edges = edges
            .iter()
            .zip(&edge_is_boundary)
            .filter(|(_, &b)| b)
            .map(|(e, _)| *e)
            .collect();
        Self {
            vertices,
            cells,
            boundary_edges,
            bbox,
            edges,
            cell_edges,
            edge_is_boundary,
            grid,
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn cells(&self) -> &[[usize; 3]] {
        &self.cells
    }

    pub fn boundary_edges(&self) -> &[[usize; 2]] {
        &self.boundary_edges
    }

    pub fn bbox(&self) -> BoundingBox {
        self.bbox
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn cell_edges(&self, cell: usize) -> [usize; 3] {
        self.cell_edges[cell]
    }

    pub fn edge_is_boundary(&self, edge: usize) -> bool {
        self.edge_is_boundary[edge]
    }

    /// Number of cells sharing each edge.
    pub fn edge_cell_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.edges.len()];
        for ids in &self.cell_edges {
            for &e in ids {
                counts[e] += 1;
            }
        }
        counts
    }

    pub fn cell_vertices(&self, cell: usize) -> [Point; 3] {
        let [a, b, c] = self.cells[cell];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn signed_area(&self, cell: usize) -> f64 {
        let [a, b, c] = self.cell_vertices(cell);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    pub fn cell_diameter(&self, cell: usize) -> f64 {
        let v = self.cell_vertices(cell);
        let d = |p: Point, q: Point| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
        d(v[0], v[1]).max(d(v[1], v[2])).max(d(v[0], v[2]))
    }

    /// `h = max_K diam(K)`.
    pub fn mesh_size(&self) -> f64 {
        (0..self.num_cells())
            .map(|k| self.cell_diameter(k))
            .fold(0.0, f64::max)
    }

    /// Vertices lying on a boundary edge.
    pub fn boundary_vertices(&self) -> Vec<usize> {
        let mut flags = vec![false; self.vertices.len()];
        for e in &self.boundary_edges {
            flags[e[0]] = true;
            flags[e[1]] = true;
        }
        (0..flags.len()).filter(|&i| flags[i]).collect()
    }

    /// Finds a cell containing `x` and the barycentric coordinates of `x` in it.
    pub fn locate(&self, x: Point) -> Result<(usize, [f64; 3])> {
        const TOL: f64 = 1e-12;
        let b = self.bbox;
        let span_x = b.x_max - b.x_min;
        let span_y = b.y_max - b.y_min;
        if x[0] < b.x_min - TOL * span_x
            || x[0] > b.x_max + TOL * span_x
            || x[1] < b.y_min - TOL * span_y
            || x[1] > b.y_max + TOL * span_y
        {
            return Err(Error::OutOfDomain(x[0], x[1]));
        }
        let (nx, ny) = self.grid;
        let i =
            (((x[0] - b.x_min) / span_x * nx as f64).floor() as isize).clamp(0, nx as isize - 1);
        let j =
            (((x[1] - b.y_min) / span_y * ny as f64).floor() as isize).clamp(0, ny as isize - 1);
        let square = j as usize * nx + i as usize;
        let mut best = None;
        let mut best_min = f64::NEG_INFINITY;
        for cell in [2 * square, 2 * square + 1] {
            let lam = self.barycentric(cell, x);
            let min = lam.iter().cloned().fold(f64::INFINITY, f64::min);
            if min > best_min {
                best_min = min;
                best = Some((cell, lam));
            }
        }
        match best {
            Some(found) if best_min >= -1e-10 => Ok(found),
            _ => Err(Error::OutOfDomain(x[0], x[1])),
        }
    }

    pub fn barycentric(&self, cell: usize, x: Point) -> [f64; 3] {
        let [a, b, c] = self.cell_vertices(cell);
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        let l1 = ((x[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (x[1] - a[1])) / det;
        let l2 = ((b[0] - a[0]) * (x[1] - a[1]) - (x[0] - a[0]) * (b[1] - a[1])) / det;
        [1.0 - l1 - l2, l1, l2]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn smallest_grid() {
        let m = Mesh::structured(1, 1, BoundingBox::unit_square()).unwrap();
        assert_eq!(m.num_cells(), 2);
        assert_eq!(m.num_vertices(), 4);
        assert_eq!(m.boundary_edges().len(), 4);
        assert_relative_eq!(m.mesh_size(), 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn two_by_two_counts() {
        let m = Mesh::structured(2, 2, BoundingBox::unit_square()).unwrap();
        assert_eq!(m.num_cells(), 8);
        assert_eq!(m.boundary_vertices().len(), 8);
        assert_eq!(m.num_vertices() - m.boundary_vertices().len(), 1);
    }

    #[test]
    fn mesh_sizes() {
        let m = Mesh::structured(8, 8, BoundingBox::unit_square()).unwrap();
        assert_relative_eq!(m.mesh_size(), 2f64.sqrt() / 8.0, epsilon = 1e-15);
        assert!((m.mesh_size() - 1.7678e-1).abs() < 1e-5);
        let m = Mesh::structured(1, 1, BoundingBox::new(-1.0, 1.0, -1.0, 1.0)).unwrap();
        assert_relative_eq!(m.mesh_size(), 2.0 * 2f64.sqrt(), epsilon = 1e-15);
        let m = Mesh::structured(2, 2, BoundingBox::new(-1.0, 1.0, -1.0, 1.0)).unwrap();
        assert_relative_eq!(m.mesh_size(), 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn refinement_halves_h() {
        let bbox = BoundingBox::new(0.0, 3.0, -1.0, 1.0);
        for n in [1, 2, 4, 8] {
            let coarse = Mesh::structured(n, n, bbox).unwrap().mesh_size();
            let fine = Mesh::structured(2 * n, 2 * n, bbox).unwrap().mesh_size();
            assert_relative_eq!(fine, 0.5 * coarse, max_relative = 1e-14);
        }
    }

    #[test]
    fn orientation_tiling_and_edge_sharing() {
        let bbox = BoundingBox::new(-1.0, 2.0, 0.5, 1.25);
        let m = Mesh::structured(5, 3, bbox).unwrap();
        let mut total = 0.0;
        for k in 0..m.num_cells() {
            let a = m.signed_area(k);
            assert!(a > 0.0);
            total += a;
        }
        assert_relative_eq!(total, bbox.area(), max_relative = 1e-12);
        for (e, count) in m.edge_cell_counts().into_iter().enumerate() {
            assert_eq!(count, if m.edge_is_boundary(e) { 1 } else { 2 });
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Mesh::structured(0, 1, BoundingBox::unit_square()).is_err());
        assert!(Mesh::structured(1, 1, BoundingBox::new(0.0, 0.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn locate_points() {
        let m = Mesh::structured(3, 4, BoundingBox::unit_square()).unwrap();
        for &x in &[[0.3, 0.7], [0.0, 0.0], [1.0, 1.0], [0.5, 0.999]] {
            let (cell, lam) = m.locate(x).unwrap();
            let v = m.cell_vertices(cell);
            let px = lam[0] * v[0][0] + lam[1] * v[1][0] + lam[2] * v[2][0];
            let py = lam[0] * v[0][1] + lam[1] * v[1][1] + lam[2] * v[2][1];
            assert_relative_eq!(px, x[0], epsilon = 1e-13);
            assert_relative_eq!(py, x[1], epsilon = 1e-13);
        }
        assert!(matches!(m.locate([1.5, 0.5]), Err(Error::OutOfDomain(..))));
    }
}
