//! Postprocessed displacement, `C⁰`-in-time errors, discrete energy and rates.

use crate::error::{Error, Result};
use crate::fem::SpatialOperators;
use crate::solver::{combine, ExactSolution, SpaceTimeSolution};
use crate::time::{trial_values, Slab};

pub const DEFAULT_SAMPLES_PER_SLAB: usize = 11;

/// `u*(t) = u_{h,τ}(0) + ∫_0^t v_{h,τ}`, stored per slab as σ-coefficients of degree `q + 1`.
#[derive(Debug, Clone)]
pub struct PostProcessed {
    q: usize,
    rows: Vec<Vec<Vec<f64>>>,
}

impl PostProcessed {
    pub fn rows(&self, slab: usize) -> &[Vec<f64>] {
        &self.rows[slab]
    }

    pub fn at(&self, slab: &Slab, t: f64) -> Vec<f64> {
        combine(
            &self.rows[slab.index],
            &trial_values(self.q + 1, slab.reference(t)),
        )
    }

    /// `u*(t_n)` for `n = 0..=N`.
    pub fn node(&self, n: usize) -> Vec<f64> {
        if n == 0 {
            self.rows[0][0].clone()
        } else {
            combine(&self.rows[n - 1][..2], &[1.0, 1.0])
        }
    }
}

pub fn postprocess_ustar(sol: &SpaceTimeSolution) -> PostProcessed {
    let q = sol.degree();
    let mut start = sol.u_node(0);
    let mut rows = Vec::with_capacity(sol.partition().num_slabs());
    for slab in sol.partition().slabs() {
        let tau = slab.len();
        let mut r = Vec::with_capacity(q + 2);
        r.push(start.clone());
        // σ_{k+1}' = L_k / τ, so τ times the Legendre coefficients integrate v exactly.
        for c in sol.v_legendre(slab.index) {
            r.push(c.into_iter().map(|x| tau * x).collect());
        }
        start = combine(&r[..2], &[1.0, 1.0]);
        rows.push(r);
    }
    PostProcessed { q, rows }
}

/// Maxima over sampled times of the four error quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub err_u: f64,
    pub err_ustar: f64,
    pub err_v: f64,
    pub err_gradu: f64,
    /// `[err_u, err_ustar, err_v, err_gradu]` per slab.
    pub per_slab: Vec<[f64; 4]>,
    pub samples_per_slab: usize,
}

/// Samples `samples_per_slab` equispaced times per slab (endpoints included)
/// and records the largest spatial errors.
pub fn error_c0(
    sol: &SpaceTimeSolution,
    ustar: &PostProcessed,
    exact: Option<&ExactSolution>,
    wavespeed: &dyn Fn([f64; 2]) -> f64,
    samples_per_slab: usize,
) -> Result<ErrorReport> {
    let exact =
        exact.ok_or_else(|| Error::Config("error evaluation needs an exact solution".into()))?;
    if samples_per_slab < 3 {
        return Err(Error::InvalidArgument(
            "at least 3 samples per slab are required".into(),
        ));
    }
    let space = sol.space();
    let mut per_slab = Vec::with_capacity(sol.partition().num_slabs());
    for slab in sol.partition().slabs() {
        let mut m = [0.0f64; 4];
        for t in slab.sample_times(samples_per_slab) {
            let u = |x| (exact.u)(x, t);
            let v = |x| (exact.v)(x, t);
            let gu = |x| (exact.grad_u)(x, t);
            let uh = sol.u_at(&slab, t);
            let e = [
                space.l2_distance(&uh, &u),
                space.l2_distance(&ustar.at(&slab, t), &u),
                space.l2_distance(&sol.v_at(&slab, t), &v),
                space.h1_semi_distance(&uh, &gu, wavespeed),
            ];
            for k in 0..4 {
                m[k] = m[k].max(e[k]);
            }
        }
        per_slab.push(m);
    }
    let col = |k: usize| per_slab.iter().map(|r| r[k]).fold(0.0, f64::max);
    Ok(ErrorReport {
        err_u: col(0),
        err_ustar: col(1),
        err_v: col(2),
        err_gradu: col(3),
        per_slab,
        samples_per_slab,
    })
}

/// `E(t_n) = ½(‖v(t_n)‖² + ‖c∇u(t_n)‖²)` for `n = 0..=N`.
pub fn energy_trace(sol: &SpaceTimeSolution, ops: &SpatialOperators) -> Vec<f64> {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    (0..=sol.partition().num_slabs())
        .map(|n| {
            let u = sol.u_node(n);
            let v = sol.v_node(n);
            0.5 * (dot(&v, &ops.mass().matvec(&v)) + dot(&u, &ops.stiffness().matvec(&u)))
        })
        .collect()
}

/// `max_n |E(t_n) − E(t_0)| / E(t_0)`.
pub fn energy_drift(trace: &[f64]) -> f64 {
    let e0 = trace[0];
    let m = trace.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max);
    if e0 > 0.0 {
        m / e0
    } else {
        m
    }
}

/// Pairwise rates `log(e_k/e_{k+1}) / log(r_k/r_{k+1})`; `None` where undefined.
pub fn convergence_rates(table: &[(f64, f64)]) -> Vec<Option<f64>> {
    table
        .windows(2)
        .map(|w| {
            let ((r0, e0), (r1, e1)) = (w[0], w[1]);
            if e0 > 0.0 && e1 > 0.0 && r0 > 0.0 && r1 > 0.0 && r0 != r1 {
                Some((e0 / e1).ln() / (r0 / r1).ln())
            } else {
                None
            }
        })
        .collect()
}
