use std::sync::Arc;

use crate::fem::{constant_wavespeed, Wavespeed};
use crate::mesh::Point;

pub type SpaceFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
pub type SpaceGradFn = Arc<dyn Fn(Point) -> [f64; 2] + Send + Sync>;
pub type SpaceTimeFn = Arc<dyn Fn(Point, f64) -> f64 + Send + Sync>;
pub type SpaceTimeGradFn = Arc<dyn Fn(Point, f64) -> [f64; 2] + Send + Sync>;

/// Closed-form solution pair used for error measurements.
#[derive(Clone)]
pub struct ExactSolution {
    pub u: SpaceTimeFn,
    pub v: SpaceTimeFn,
    pub grad_u: SpaceTimeGradFn,
}

/// Data of `∂t u − v = 0`, `∂t v − ∇·(c²∇u) = f` with Dirichlet data on the boundary.
#[derive(Clone)]
pub struct ProblemData {
    pub wavespeed: Wavespeed,
    /// Set when `c` is a known constant; required by the estimator.
    pub constant_wavespeed: Option<f64>,
    pub source: SpaceTimeFn,
    /// Marks `f ≡ 0` so source integrals can be skipped.
    pub source_is_zero: bool,
    pub dirichlet: SpaceTimeFn,
    pub dirichlet_dt: SpaceTimeFn,
    /// Marks `g_D ≡ 0`.
    pub homogeneous_dirichlet: bool,
    pub u0: SpaceFn,
    pub grad_u0: SpaceGradFn,
    pub v0: SpaceFn,
    pub exact: Option<ExactSolution>,
    /// Also require `∂t g_D(·, 0) = v_0` on the boundary.
    pub check_velocity_compatibility: bool,
}

impl std::fmt::Debug for ProblemData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemData")
            .field("constant_wavespeed", &self.constant_wavespeed)
            .field("homogeneous_dirichlet", &self.homogeneous_dirichlet)
            .field("has_exact", &self.exact.is_some())
            .finish_non_exhaustive()
    }
}

impl ProblemData {
    /// Problem driven by a known solution: `f`, `g_D`, `∂t g_D`, `u_0`, `v_0` are read off it.
    pub fn from_exact(
        c: f64,
        exact: ExactSolution,
        source: SpaceTimeFn,
        homogeneous_dirichlet: bool,
    ) -> Self {
        let u = exact.u.clone();
        let v = exact.v.clone();
        let gu = exact.grad_u.clone();
        let (u0u, v0v) = (u.clone(), v.clone());
        Self {
            wavespeed: constant_wavespeed(c),
            constant_wavespeed: Some(c),
            source,
            source_is_zero: false,
            dirichlet: u,
            dirichlet_dt: v,
            homogeneous_dirichlet,
            u0: Arc::new(move |x| u0u(x, 0.0)),
            grad_u0: Arc::new(move |x| gu(x, 0.0)),
            v0: Arc::new(move |x| v0v(x, 0.0)),
            exact: Some(exact),
            check_velocity_compatibility: true,
        }
    }

    /// Homogeneous problem with `f = 0`, `g_D = 0` and the given initial data.
    pub fn free_evolution(c: f64, u0: SpaceFn, grad_u0: SpaceGradFn, v0: SpaceFn) -> Self {
        let zero: SpaceTimeFn = Arc::new(|_, _| 0.0);
        Self {
            wavespeed: constant_wavespeed(c),
            constant_wavespeed: Some(c),
            source: zero.clone(),
            source_is_zero: true,
            dirichlet: zero.clone(),
            dirichlet_dt: zero,
            homogeneous_dirichlet: true,
            u0,
            grad_u0,
            v0,
            exact: None,
            check_velocity_compatibility: false,
        }
    }

    /// Multiplies all data (and the exact solution) by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Self {
        let st = |g: &SpaceTimeFn| -> SpaceTimeFn {
            let g = g.clone();
            Arc::new(move |x, t| lambda * g(x, t))
        };
        let s = |g: &SpaceFn| -> SpaceFn {
            let g = g.clone();
            Arc::new(move |x| lambda * g(x))
        };
        let gu0 = self.grad_u0.clone();
        Self {
            wavespeed: self.wavespeed.clone(),
            constant_wavespeed: self.constant_wavespeed,
            source: st(&self.source),
            source_is_zero: self.source_is_zero,
            dirichlet: st(&self.dirichlet),
            dirichlet_dt: st(&self.dirichlet_dt),
            homogeneous_dirichlet: self.homogeneous_dirichlet,
            u0: s(&self.u0),
            grad_u0: Arc::new(move |x| {
                let g = gu0(x);
                [lambda * g[0], lambda * g[1]]
            }),
            v0: s(&self.v0),
            exact: self.exact.as_ref().map(|e| {
                let gu = e.grad_u.clone();
                ExactSolution {
                    u: st(&e.u),
                    v: st(&e.v),
                    grad_u: Arc::new(move |x, t| {
                        let g = gu(x, t);
                        [lambda * g[0], lambda * g[1]]
                    }),
                }
            }),
            check_velocity_compatibility: self.check_velocity_compatibility,
        }
    }
}
