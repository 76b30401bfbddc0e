//! Slab-by-slab Petrov–Galerkin solver for the first-order wave system.
//!
//! On slab `I_n` the unknowns are `u = Σ_j U_j σ_j`, `v = Σ_j V_j σ_j`
//! (`j = 0..q`). `U_0`, `V_0` come from the previous slab and boundary
//! coefficients from the Dirichlet lifting, so only interior coefficients
//! with `j ≥ 1` are solved for. Tested against `L_i φ_k`, `i < q`:
//!
//! ```text
//! Σ_j N_ij A V_j − D_ij A U_j = 0,          A = K (gradient) or M (mass)
//! Σ_j D_ij M V_j + N_ij K U_j = ∫ (f, L_i φ_k)
//! ```

mod lifting;
mod problem;
mod solution;

use std::collections::HashMap;
use std::sync::Arc;

pub use lifting::{build_lifting, Lifting};
pub use problem::{ExactSolution, ProblemData, SpaceFn, SpaceGradFn, SpaceTimeFn, SpaceTimeGradFn};
pub use solution::{combine, SlabRows, SpaceTimeSolution};

/// `(u, v)` σ-coefficient rows of one slab.
pub type SlabCoefficients = (Vec<Vec<f64>>, Vec<Vec<f64>>);

use crate::error::{Error, Result};
use crate::fem::{FeFunction, LagrangeSpace, OperatorKind, SpatialOperators};
use crate::linalg::{CsrMatrix, Factorization, DEFAULT_GENERAL_TOL};
use crate::time::{
    data_quadrature_points, legendre_eval, slab_temporal_matrices, GaussRule, Slab, TimePartition,
};

/// Boundary values allowed to differ from the initial data by this much.
pub const COMPATIBILITY_TOL: f64 = 1e-8;

const SOURCE_QUADRATURE_TOL: f64 = 1e-12;
const MAX_SOURCE_BISECTIONS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodVariant {
    /// Relation `v = ∂t u` tested in the stiffness inner product.
    GradientCoupling,
    /// Relation `v = ∂t u` tested in the `L²` inner product.
    MassCoupling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryMode {
    PtauLifting,
    NaiveLagrangeInTime,
}

impl MethodVariant {
    pub fn name(self) -> &'static str {
        match self {
            Self::GradientCoupling => "gradient",
            Self::MassCoupling => "mass",
        }
    }
}

impl BoundaryMode {
    pub fn name(self) -> &'static str {
        match self {
            Self::PtauLifting => "ptau",
            Self::NaiveLagrangeInTime => "lagrange",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Discretization {
    pub space: Arc<LagrangeSpace>,
    pub partition: TimePartition,
    pub q: usize,
    pub method: MethodVariant,
    pub bc_mode: BoundaryMode,
}

impl Discretization {
    pub fn new(
        space: Arc<LagrangeSpace>,
        partition: TimePartition,
        q: usize,
        method: MethodVariant,
        bc_mode: BoundaryMode,
    ) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument(
                "temporal degree must be at least 1".into(),
            ));
        }
        Ok(Self {
            space,
            partition,
            q,
            method,
            bc_mode,
        })
    }
}

/// `u_{0,h} = R_h u_0` and `v_{0,h} = I_h^∂ v_0 + Π̊_h(v_0 − v^D(0))`.
pub fn discrete_initial_data(
    problem: &ProblemData,
    ops: &SpatialOperators,
    u_lift0: &[f64],
    v_lift0: &[f64],
) -> Result<(FeFunction, FeFunction)> {
    let space = ops.space();
    for &b in space.boundary_dofs() {
        let x = space.dof_coords()[b];
        let du = (problem.u0)(x) - u_lift0[b];
        if du.abs() > COMPATIBILITY_TOL {
            return Err(Error::Config(format!(
                "initial displacement and Dirichlet data disagree by {du:e} at ({}, {})",
                x[0], x[1]
            )));
        }
        if problem.check_velocity_compatibility {
            let dv = (problem.v0)(x) - v_lift0[b];
            if dv.abs() > COMPATIBILITY_TOL {
                return Err(Error::Config(format!(
                    "initial velocity and ∂t g_D disagree by {dv:e} at ({}, {})",
                    x[0], x[1]
                )));
            }
        }
    }
    let u0h = ops.ritz_project(&*problem.u0, &*problem.grad_u0)?;
    let rhs = space.load_vector(&*problem.v0);
    let mut v = ops.solve_with_boundary(OperatorKind::Mass, &rhs, v_lift0)?;
    for &b in space.boundary_dofs() {
        v[b] = (problem.v0)(space.dof_coords()[b]);
    }
    Ok((u0h, FeFunction::new(space.clone(), v)?))
}

/// Slab system assembly and solution with factorizations cached per step size.
pub struct SlabSolver<'a> {
    problem: &'a ProblemData,
    disc: &'a Discretization,
    ops: &'a SpatialOperators,
    lifting: &'a Lifting,
    k_ii: CsrMatrix,
    m_ii: CsrMatrix,
    cache: HashMap<u64, Arc<Factorization>>,
}

impl<'a> SlabSolver<'a> {
    pub fn new(
        problem: &'a ProblemData,
        disc: &'a Discretization,
        ops: &'a SpatialOperators,
        lifting: &'a Lifting,
    ) -> Self {
        let space = &disc.space;
        let interior = space.interior_dofs();
        let map: Vec<Option<usize>> = (0..space.num_dofs())
            .map(|i| space.interior_index(i))
            .collect();
        Self {
            problem,
            disc,
            ops,
            lifting,
            k_ii: ops.stiffness().submatrix(interior, &map, interior.len()),
            m_ii: ops.mass().submatrix(interior, &map, interior.len()),
            cache: HashMap::new(),
        }
    }

    fn coupling_matrix(&self) -> (&CsrMatrix, &CsrMatrix) {
        match self.disc.method {
            MethodVariant::GradientCoupling => (&self.k_ii, self.ops.stiffness()),
            MethodVariant::MassCoupling => (&self.m_ii, self.ops.mass()),
        }
    }

    fn factorization(&mut self, slab: &Slab) -> Result<Arc<Factorization>> {
        let key = slab.len().to_bits();
        if let Some(f) = self.cache.get(&key) {
            return Ok(f.clone());
        }
        let q = self.disc.q;
        let ni = self.k_ii.nrows();
        let tm = slab_temporal_matrices(q, slab)?;
        let (a_ii, _) = self.coupling_matrix();
        let scale = tm.n.amax().max(tm.d.amax());
        let mut entries = Vec::new();
        let mut push = |mat: &CsrMatrix, coef: f64, rb: usize, cb: usize| {
            if coef.abs() <= 1e-14 * scale {
                return;
            }
            for r in 0..mat.nrows() {
                for (c, v) in mat.row(r) {
                    entries.push((rb * ni + r, cb * ni + c, coef * v));
                }
            }
        };
        for i in 0..q {
            for j in 1..=q {
                let (nij, dij) = (tm.n[(i, j)], tm.d[(i, j)]);
                let (cu, cv) = (2 * (j - 1), 2 * (j - 1) + 1);
                push(a_ii, -dij, 2 * i, cu);
                push(a_ii, nij, 2 * i, cv);
                push(&self.k_ii, nij, 2 * i + 1, cu);
                push(&self.m_ii, dij, 2 * i + 1, cv);
            }
        }
        let n = 2 * q * ni;
        let mat = CsrMatrix::from_triplets(n, n, &entries);
        let f = Arc::new(Factorization::general(mat, DEFAULT_GENERAL_TOL)?);
        self.cache.insert(key, f.clone());
        Ok(f)
    }

    /// `∫_{I_n} (f, L_i φ_k) dt` for `i < q`, all DOFs.
    ///
    /// The Gauss rule is applied adaptively: a subinterval is bisected until
    /// the two levels agree, which keeps data with weak singularities in
    /// time (such as `t^{1/4}`) from limiting the temporal accuracy.
    fn source_moments(&self, slab: &Slab) -> Result<Vec<Vec<f64>>> {
        let q = self.disc.q;
        let ndofs = self.disc.space.num_dofs();
        if self.problem.source_is_zero {
            return Ok(vec![vec![0.0; ndofs]; q]);
        }
        let whole = self.moments_on(slab, slab.start, slab.end)?;
        self.refine_moments(slab, slab.start, slab.end, whole, 0)
    }

    fn moments_on(&self, slab: &Slab, a: f64, b: f64) -> Result<Vec<Vec<f64>>> {
        let q = self.disc.q;
        let space = &self.disc.space;
        let mut out = vec![vec![0.0; space.num_dofs()]; q];
        let rule = GaussRule::on_interval(data_quadrature_points(q), a, b)?;
        for (t, w) in rule.iter() {
            let src = self.problem.source.clone();
            let load = space.load_vector(&move |x| src(x, t));
            for (i, row) in out.iter_mut().enumerate() {
                let li = w * legendre_eval(i, slab, t, false)?;
                for (o, l) in row.iter_mut().zip(&load) {
                    *o += li * l;
                }
            }
        }
        Ok(out)
    }

    fn refine_moments(
        &self,
        slab: &Slab,
        a: f64,
        b: f64,
        coarse: Vec<Vec<f64>>,
        depth: usize,
    ) -> Result<Vec<Vec<f64>>> {
        let mid = 0.5 * (a + b);
        let left = self.moments_on(slab, a, mid)?;
        let right = self.moments_on(slab, mid, b)?;
        let fine: Vec<Vec<f64>> = left
            .iter()
            .zip(&right)
            .map(|(l, r)| l.iter().zip(r).map(|(x, y)| x + y).collect())
            .collect();
        let diff = coarse
            .iter()
            .flatten()
            .zip(fine.iter().flatten())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        let size = fine.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max);
        if diff <= SOURCE_QUADRATURE_TOL * size.max(f64::MIN_POSITIVE)
            || depth >= MAX_SOURCE_BISECTIONS
        {
            return Ok(fine);
        }
        let l = self.refine_moments(slab, a, mid, left, depth + 1)?;
        let r = self.refine_moments(slab, mid, b, right, depth + 1)?;
        Ok(l.iter()
            .zip(&r)
            .map(|(x, y)| x.iter().zip(y).map(|(a, b)| a + b).collect())
            .collect())
    }

    /// Advances one slab from the state `(u, v)` at its left endpoint.
    pub fn solve_slab(
        &mut self,
        prev_u: &[f64],
        prev_v: &[f64],
        slab: &Slab,
    ) -> Result<SlabCoefficients> {
        self.solve_slab_inner(prev_u, prev_v, slab)
            .map_err(|e| Error::Slab {
                slab: slab.index,
                source: Box::new(e),
            })
    }

    fn solve_slab_inner(
        &mut self,
        prev_u: &[f64],
        prev_v: &[f64],
        slab: &Slab,
    ) -> Result<SlabCoefficients> {
        let q = self.disc.q;
        let space = self.disc.space.clone();
        let ndofs = space.num_dofs();
        let ni = self.k_ii.nrows();
        let lu = &self.lifting.u[slab.index];
        let lv = &self.lifting.v[slab.index];
        let mut u_known: Vec<Vec<f64>> = Vec::with_capacity(q + 1);
        let mut v_known: Vec<Vec<f64>> = Vec::with_capacity(q + 1);
        u_known.push(prev_u.to_vec());
        v_known.push(prev_v.to_vec());
        for j in 1..=q {
            u_known.push(lu[j].clone());
            v_known.push(lv[j].clone());
        }

        let tm = slab_temporal_matrices(q, slab)?;
        let moments = self.source_moments(slab)?;
        let (_, a_full) = self.coupling_matrix();
        let mut rhs = vec![0.0; 2 * q * ni];
        for i in 0..q {
            let mut w1 = vec![0.0; ndofs];
            let mut wv = vec![0.0; ndofs];
            let mut wu = vec![0.0; ndofs];
            for j in 0..=q {
                let (nij, dij) = (tm.n[(i, j)], tm.d[(i, j)]);
                for k in 0..ndofs {
                    w1[k] += nij * v_known[j][k] - dij * u_known[j][k];
                    wv[k] += dij * v_known[j][k];
                    wu[k] += nij * u_known[j][k];
                }
            }
            let r1 = a_full.matvec(&w1);
            let mut r2 = self.ops.mass().matvec(&wv);
            self.ops.stiffness().matvec_add(1.0, &wu, &mut r2);
            for (k, &dof) in space.interior_dofs().iter().enumerate() {
                rhs[2 * i * ni + k] = -r1[dof];
                rhs[(2 * i + 1) * ni + k] = moments[i][dof] - r2[dof];
            }
        }

        if ni > 0 {
            let fact = self.factorization(slab)?;
            let x = fact.solve(&rhs)?;
            for j in 1..=q {
                for (k, &dof) in space.interior_dofs().iter().enumerate() {
                    u_known[j][dof] = x[2 * (j - 1) * ni + k];
                    v_known[j][dof] = x[(2 * (j - 1) + 1) * ni + k];
                }
            }
        }
        Ok((u_known, v_known))
    }
}

/// Marches over all slabs starting from the discrete initial data.
pub fn solve(problem: &ProblemData, disc: &Discretization) -> Result<SpaceTimeSolution> {
    let ops = SpatialOperators::new(disc.space.clone(), problem.wavespeed.clone())?;
    solve_with_operators(problem, disc, &ops)
}

/// [`solve`] reusing already assembled spatial operators.
pub fn solve_with_operators(
    problem: &ProblemData,
    disc: &Discretization,
    ops: &SpatialOperators,
) -> Result<SpaceTimeSolution> {
    let lifting = build_lifting(problem, &disc.space, &disc.partition, disc.q, disc.bc_mode)?;
    let (u0, v0) =
        discrete_initial_data(problem, ops, &lifting.u_at_node(0), &lifting.v_at_node(0))?;
    let mut solver = SlabSolver::new(problem, disc, ops, &lifting);
    let mut prev_u = u0.into_coeffs();
    let mut prev_v = v0.into_coeffs();
    let mut us = Vec::with_capacity(disc.partition.num_slabs());
    let mut vs = Vec::with_capacity(disc.partition.num_slabs());
    for slab in disc.partition.slabs() {
        let (u, v) = solver.solve_slab(&prev_u, &prev_v, &slab)?;
        prev_u = combine(&u[..2], &[1.0, 1.0]);
        prev_v = combine(&v[..2], &[1.0, 1.0]);
        us.push(u);
        vs.push(v);
    }
    Ok(SpaceTimeSolution::new(
        disc.space.clone(),
        disc.partition.clone(),
        disc.q,
        us,
        vs,
    ))
}
