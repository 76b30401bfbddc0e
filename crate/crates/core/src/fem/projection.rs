use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, Factorization, DEFAULT_SPD_TOL};
use crate::mesh::Point;

use super::space::{LagrangeSpace, OperatorKind};

/// Spatial wavespeed field `c(x)`.
pub type Wavespeed = Arc<dyn Fn(Point) -> f64 + Send + Sync>;

pub fn constant_wavespeed(c: f64) -> Wavespeed {
    Arc::new(move |_| c)
}

/// A member of a [`LagrangeSpace`].
#[derive(Debug, Clone)]
pub struct FeFunction {
    space: Arc<LagrangeSpace>,
    coeffs: Vec<f64>,
}

impl FeFunction {
    pub fn new(space: Arc<LagrangeSpace>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.num_dofs() {
            return Err(Error::InvalidArgument(format!(
                "coefficient vector has length {}, space has {} DOFs",
                coeffs.len(),
                space.num_dofs()
            )));
        }
        Ok(Self { space, coeffs })
    }

    pub fn zero(space: Arc<LagrangeSpace>) -> Self {
        let n = space.num_dofs();
        Self {
            space,
            coeffs: vec![0.0; n],
        }
    }

    pub fn space(&self) -> &Arc<LagrangeSpace> {
        &self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn evaluate(&self, x: Point) -> Result<f64> {
        self.space.eval(&self.coeffs, x)
    }

    pub fn l2_norm(&self) -> f64 {
        self.space.l2_norm(&self.coeffs)
    }

    pub fn l2_distance(&self, f: &dyn Fn(Point) -> f64) -> f64 {
        self.space.l2_distance(&self.coeffs, f)
    }

    pub fn h1_semi_distance(
        &self,
        grad_f: &dyn Fn(Point) -> [f64; 2],
        c: &dyn Fn(Point) -> f64,
    ) -> f64 {
        self.space.h1_semi_distance(&self.coeffs, grad_f, c)
    }
}

/// Lagrange interpolant `I_h f`.
pub fn interpolate_nodal(space: &Arc<LagrangeSpace>, f: &dyn Fn(Point) -> f64) -> FeFunction {
    FeFunction {
        space: space.clone(),
        coeffs: space.interpolate(f),
    }
}

/// Mass and stiffness matrices of a space together with factored interior blocks.
pub struct SpatialOperators {
    space: Arc<LagrangeSpace>,
    wavespeed: Wavespeed,
    mass: CsrMatrix,
    stiffness: CsrMatrix,
    mass_interior: Factorization,
    stiffness_interior: Factorization,
}

impl std::fmt::Debug for SpatialOperators {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpatialOperators")
            .field("dofs", &self.space.num_dofs())
            .field("interior", &self.space.interior_dofs().len())
            .finish()
    }
}

impl SpatialOperators {
    pub fn new(space: Arc<LagrangeSpace>, wavespeed: Wavespeed) -> Result<Self> {
        let mass = space.assemble_mass();
        let stiffness = space.assemble(OperatorKind::Stiffness, &*wavespeed)?;
        let interior = space.interior_dofs();
        let map: Vec<Option<usize>> = (0..space.num_dofs())
            .map(|i| space.interior_index(i))
            .collect();
        let mass_interior = Factorization::spd(
            mass.submatrix(interior, &map, interior.len()),
            DEFAULT_SPD_TOL,
        )?;
        let stiffness_interior = Factorization::spd(
            stiffness.submatrix(interior, &map, interior.len()),
            DEFAULT_SPD_TOL,
        )?;
        Ok(Self {
            space,
            wavespeed,
            mass,
            stiffness,
            mass_interior,
            stiffness_interior,
        })
    }

    pub fn space(&self) -> &Arc<LagrangeSpace> {
        &self.space
    }

    pub fn wavespeed(&self) -> &Wavespeed {
        &self.wavespeed
    }

    pub fn mass(&self) -> &CsrMatrix {
        &self.mass
    }

    pub fn stiffness(&self) -> &CsrMatrix {
        &self.stiffness
    }

    /// Solves `A_II x_I = b_I − A_IB g_B` and scatters into a full vector with `g_B` on the boundary.
    pub fn solve_with_boundary(
        &self,
        kind: OperatorKind,
        rhs_full: &[f64],
        boundary: &[f64],
    ) -> Result<Vec<f64>> {
        let space = &self.space;
        let (mat, fact) = match kind {
            OperatorKind::Mass => (&self.mass, &self.mass_interior),
            OperatorKind::Stiffness => (&self.stiffness, &self.stiffness_interior),
        };
        let mut lifted = vec![0.0; space.num_dofs()];
        for &b in space.boundary_dofs() {
            lifted[b] = boundary[b];
        }
        let mut r = rhs_full.to_vec();
        mat.matvec_add(-1.0, &lifted, &mut r);
        let rhs: Vec<f64> = space.interior_dofs().iter().map(|&i| r[i]).collect();
        let x = fact.solve(&rhs)?;
        for (k, &i) in space.interior_dofs().iter().enumerate() {
            lifted[i] = x[k];
        }
        Ok(lifted)
    }

    /// Weighted Ritz projection with nodal boundary values.
    pub fn ritz_project(
        &self,
        f: &dyn Fn(Point) -> f64,
        grad_f: &dyn Fn(Point) -> [f64; 2],
    ) -> Result<FeFunction> {
        let boundary = self.space.interpolate(f);
        let rhs = self.space.gradient_load_vector(grad_f, &*self.wavespeed);
        let coeffs = self.solve_with_boundary(OperatorKind::Stiffness, &rhs, &boundary)?;
        FeFunction::new(self.space.clone(), coeffs)
    }

    /// L² projection onto the interior subspace.
    pub fn l2_project_interior(&self, f: &dyn Fn(Point) -> f64) -> Result<FeFunction> {
        let rhs = self.space.load_vector(f);
        self.l2_project_interior_rhs(&rhs)
    }

    /// Interior L² projection given the moments `(f, φ_i)` for all DOFs.
    pub fn l2_project_interior_rhs(&self, rhs: &[f64]) -> Result<FeFunction> {
        let zero = vec![0.0; self.space.num_dofs()];
        let coeffs = self.solve_with_boundary(OperatorKind::Mass, rhs, &zero)?;
        FeFunction::new(self.space.clone(), coeffs)
    }

    /// Solves `M_II x = b` on interior unknowns.
    pub fn solve_mass_interior(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.mass_interior.solve(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{BoundingBox, Mesh};

    fn space(n: usize, p: usize) -> Arc<LagrangeSpace> {
        Arc::new(
            LagrangeSpace::new(
                Mesh::structured(n, n, BoundingBox::unit_square()).unwrap(),
                p,
            )
            .unwrap(),
        )
    }

    #[test]
    fn ritz_reproduces_space_members() {
        let s = space(3, 3);
        let ops = SpatialOperators::new(s.clone(), constant_wavespeed(1.3)).unwrap();
        let f = |x: Point| x[0] * x[0] * x[1] - 2.0 * x[1] * x[1] * x[1] + x[0];
        let g = |x: Point| [2.0 * x[0] * x[1] + 1.0, x[0] * x[0] - 6.0 * x[1] * x[1]];
        let r = ops.ritz_project(&f, &g).unwrap();
        let i = interpolate_nodal(&s, &f);
        for (a, b) in r.coeffs().iter().zip(i.coeffs()) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn interior_projection_is_orthogonal() {
        let s = space(4, 2);
        let ops = SpatialOperators::new(s.clone(), constant_wavespeed(1.0)).unwrap();
        let f = |x: Point| (3.0 * x[0]).exp() * x[1].sin() + 1.0;
        let pf = ops.l2_project_interior(&f).unwrap();
        for &b in s.boundary_dofs() {
            assert_eq!(pf.coeffs()[b], 0.0);
        }
        let moments = s.load_vector(&f);
        let mp = ops.mass().matvec(pf.coeffs());
        for &i in s.interior_dofs() {
            assert!((moments[i] - mp[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_short_coefficients() {
        let s = space(1, 1);
        assert!(FeFunction::new(s, vec![0.0; 2]).is_err());
    }
}
