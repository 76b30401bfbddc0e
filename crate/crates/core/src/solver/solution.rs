use std::sync::Arc;

use crate::fem::LagrangeSpace;
use crate::time::{rows_sigma_to_legendre, trial_derivatives, trial_values, Slab, TimePartition};

/// Coefficient rows of a continuous piecewise polynomial in time with
/// values in the finite element space: `rows[n][j][dof]` multiplies `σ_j` on slab `n`.
pub type SlabRows = Vec<Vec<Vec<f64>>>;

/// Combines rows with scalar weights: `Σ_j w_j rows[j]`.
pub fn combine(rows: &[Vec<f64>], weights: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; rows[0].len()];
    for (r, &w) in rows.iter().zip(weights) {
        if w != 0.0 {
            for (o, &x) in out.iter_mut().zip(r) {
                *o += w * x;
            }
        }
    }
    out
}

/// Fully discrete space-time solution `(u_{h,τ}, v_{h,τ})`.
#[derive(Debug, Clone)]
pub struct SpaceTimeSolution {
    space: Arc<LagrangeSpace>,
    partition: TimePartition,
    q: usize,
    u: SlabRows,
    v: SlabRows,
}

impl SpaceTimeSolution {
    pub fn new(
        space: Arc<LagrangeSpace>,
        partition: TimePartition,
        q: usize,
        u: SlabRows,
        v: SlabRows,
    ) -> Self {
        Self {
            space,
            partition,
            q,
            u,
            v,
        }
    }

    pub fn space(&self) -> &Arc<LagrangeSpace> {
        &self.space
    }

    pub fn partition(&self) -> &TimePartition {
        &self.partition
    }

    pub fn degree(&self) -> usize {
        self.q
    }

    pub fn u_rows(&self, slab: usize) -> &[Vec<f64>] {
        &self.u[slab]
    }

    pub fn v_rows(&self, slab: usize) -> &[Vec<f64>] {
        &self.v[slab]
    }

    pub fn u_legendre(&self, slab: usize) -> Vec<Vec<f64>> {
        rows_sigma_to_legendre(&self.u[slab])
    }

    pub fn v_legendre(&self, slab: usize) -> Vec<Vec<f64>> {
        rows_sigma_to_legendre(&self.v[slab])
    }

    /// Legendre coefficients of `∂t u` on a slab (degree `q − 1`).
    pub fn du_legendre(&self, slab: usize) -> Vec<Vec<f64>> {
        let tau = self.partition.slab(slab).len();
        self.u[slab][1..]
            .iter()
            .map(|r| r.iter().map(|x| x / tau).collect())
            .collect()
    }

    pub fn u_at(&self, slab: &Slab, t: f64) -> Vec<f64> {
        combine(
            &self.u[slab.index],
            &trial_values(self.q, slab.reference(t)),
        )
    }

    pub fn v_at(&self, slab: &Slab, t: f64) -> Vec<f64> {
        combine(
            &self.v[slab.index],
            &trial_values(self.q, slab.reference(t)),
        )
    }

    pub fn du_at(&self, slab: &Slab, t: f64) -> Vec<f64> {
        combine(
            &self.u[slab.index],
            &trial_derivatives(self.q, slab.reference(t), slab.len()),
        )
    }

    /// `u_{h,τ}(t_n)` for `n = 0..=N`.
    pub fn u_node(&self, n: usize) -> Vec<f64> {
        node_value(&self.u, n)
    }

    pub fn v_node(&self, n: usize) -> Vec<f64> {
        node_value(&self.v, n)
    }
}

fn node_value(rows: &SlabRows, n: usize) -> Vec<f64> {
    if n == 0 {
        rows[0][0].clone()
    } else {
        let r = &rows[n - 1];
        r[0].iter().zip(&r[1]).map(|(a, b)| a + b).collect()
    }
}
