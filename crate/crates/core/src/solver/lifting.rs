use crate::error::Result;
use crate::fem::LagrangeSpace;
use crate::time::{
    lagrange_interpolate, legendre_to_sigma, ptau_project, PiecewisePolynomial, TimePartition,
};

use super::problem::{ProblemData, SpaceTimeFn};
use super::BoundaryMode;

/// Boundary trajectories of the discrete Dirichlet lifting.
///
/// `u[n][j][dof]` is the σ-coefficient of trial function `j` on slab `n`;
/// interior DOF entries are zero.
#[derive(Debug, Clone)]
pub struct Lifting {
    pub u: Vec<Vec<Vec<f64>>>,
    pub v: Vec<Vec<Vec<f64>>>,
}

impl Lifting {
    /// Lifting value at `t_n` (`n = 0..=N`) as a full DOF vector.
    pub fn u_at_node(&self, n: usize) -> Vec<f64> {
        node_value(&self.u, n)
    }

    pub fn v_at_node(&self, n: usize) -> Vec<f64> {
        node_value(&self.v, n)
    }
}

fn node_value(rows: &[Vec<Vec<f64>>], n: usize) -> Vec<f64> {
    if n == 0 {
        return rows[0][0].clone();
    }
    let slab = &rows[n - 1];
    slab[0].iter().zip(&slab[1]).map(|(a, b)| a + b).collect()
}

fn trajectories(
    g: &SpaceTimeFn,
    space: &LagrangeSpace,
    partition: &TimePartition,
    q: usize,
    mode: BoundaryMode,
    homogeneous: bool,
) -> Result<Vec<Vec<Vec<f64>>>> {
    let ndofs = space.num_dofs();
    let mut rows = vec![vec![vec![0.0; ndofs]; q + 1]; partition.num_slabs()];
    if homogeneous {
        return Ok(rows);
    }
    for &dof in space.boundary_dofs() {
        let x = space.dof_coords()[dof];
        let f = |t: f64| g(x, t);
        let poly: PiecewisePolynomial = match mode {
            BoundaryMode::PtauLifting => ptau_project(q, f, partition)?,
            BoundaryMode::NaiveLagrangeInTime => lagrange_interpolate(q, f, partition)?,
        };
        for (n, leg) in poly.coeffs.iter().enumerate() {
            for (j, a) in legendre_to_sigma(leg).into_iter().enumerate() {
                rows[n][j][dof] = a;
            }
        }
    }
    Ok(rows)
}

/// Builds `u^D` from `g_D` and `v^D` from `∂t g_D`, boundary DOF by boundary DOF.
pub fn build_lifting(
    problem: &ProblemData,
    space: &LagrangeSpace,
    partition: &TimePartition,
    q: usize,
    mode: BoundaryMode,
) -> Result<Lifting> {
    let h = problem.homogeneous_dirichlet;
    Ok(Lifting {
        u: trajectories(&problem.dirichlet, space, partition, q, mode, h)?,
        v: trajectories(&problem.dirichlet_dt, space, partition, q, mode, h)?,
    })
}
