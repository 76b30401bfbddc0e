//! Constant-free a posteriori bound for the `C⁰(L²)` error of the displacement.
//!
//! A spatially overresolved fully discrete solution stands in for the
//! semidiscrete pair `(u_τ, v_τ)`. All temporal defects `(Id − Π_{q−1})w` of a
//! degree-`q` polynomial reduce to the top Legendre mode `w_q L_q`, so the
//! corresponding norms factor into a spatial norm and `∫|L_q|`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::postprocess::{PostProcessed, DEFAULT_SAMPLES_PER_SLAB};
use crate::solver::{combine, ProblemData, SpaceTimeSolution};
use crate::time::legendre::{legendre, legendre_all};
use crate::time::{GaussRule, Slab};

/// `C_{q,*}`.
pub fn c_q_star(q: usize) -> f64 {
    assert!(q >= 1);
    if q == 1 {
        1.0 / PI
    } else {
        let q = q as f64;
        1.0 / (2.0 * ((q - 1.0) * q).sqrt())
    }
}

/// Best-approximation constant `C_Π(s)`.
pub fn c_pi(s: usize) -> f64 {
    if s <= 2 {
        PI.powf(-0.5)
    } else {
        1.0 / ((s as f64 - 2.0) * PI)
    }
}

/// `C_•(q)` for summation slab `n` when the maximum sits on slab `m`.
pub fn c_bullet(q: usize, slab_n: &Slab, slab_m: &Slab) -> f64 {
    if q == 1 {
        (slab_m.end - slab_n.start).abs()
    } else {
        c_pi(q - 2) * slab_n.len() / 2.0
    }
}

/// `∫_{-1}^{1} |P_q(s)| ds`, integrating exactly between consecutive roots.
pub fn abs_legendre_integral(q: usize) -> f64 {
    if q == 0 {
        return 2.0;
    }
    let anti = |s: f64| (legendre(q + 1, s) - legendre(q - 1, s)) / (2 * q + 1) as f64;
    let roots = GaussRule::reference(q).expect("degree within range").nodes;
    let mut pts = vec![-1.0];
    pts.extend(roots);
    pts.push(1.0);
    pts.windows(2)
        .map(|w| (anti(w[1]) - anti(w[0])).abs())
        .sum()
}

/// Per-slab ingredients of the estimate (without summation constants).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SlabIndicators {
    /// `√(C_{q,*}τ_n) ‖(Id − Π_{q−1})v‖_{L²(I_n;L²)}`.
    pub post: f64,
    /// `‖(Id − Π_{q−1})f‖_{L¹(I_n;L²)}`.
    pub f: f64,
    /// `‖(Id − Π_{q−1})Δv‖_{L¹(I_n;L²)}`.
    pub lap_v: f64,
    /// `‖(Id − Π_{q−1})Δu‖_{L¹(I_n;L²)}`.
    pub lap_u: f64,
    /// `max_t ‖(u* − u)(t)‖_{L²}` over the samples.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorBreakdown {
    /// Zero-based index of the slab carrying the sampled maximum of `‖u* − u‖`.
    pub m_star: usize,
    pub term_post: f64,
    pub term_f: f64,
    pub term_lap_v: f64,
    pub term_lap_u: f64,
    pub eta: f64,
    pub osc_f: f64,
    pub total: f64,
    pub slabs: Vec<SlabIndicators>,
}

fn f_defect_l1(problem: &ProblemData, sol: &SpaceTimeSolution, slab: &Slab) -> Result<f64> {
    let q = sol.degree();
    if problem.source_is_zero {
        return Ok(0.0);
    }
    let space = sol.space();
    let proj = GaussRule::reference(q + 12)?;
    let outer = GaussRule::reference((q + 4).max(8))?;
    let at = |s: f64| slab.start + 0.5 * slab.len() * (s + 1.0);
    let proj_p: Vec<Vec<f64>> = proj.nodes.iter().map(|&s| legendre_all(q - 1, s)).collect();
    let outer_p: Vec<Vec<f64>> = outer
        .nodes
        .iter()
        .map(|&s| legendre_all(q - 1, s))
        .collect();
    let mut acc = vec![0.0; outer.len()];
    for cell in 0..space.mesh().num_cells() {
        for (_, x, w) in space.cell_quadrature(cell) {
            let mut c = vec![0.0; q];
            for ((&s, &wg), p) in proj.nodes.iter().zip(&proj.weights).zip(&proj_p) {
                let fv = (problem.source)(x, at(s));
                for k in 0..q {
                    c[k] += wg * fv * p[k];
                }
            }
            for (k, ck) in c.iter_mut().enumerate() {
                *ck *= (2 * k + 1) as f64 / 2.0;
            }
            for (l, (&s, p)) in outer.nodes.iter().zip(&outer_p).enumerate() {
                let d =
                    (problem.source)(x, at(s)) - c.iter().zip(p).map(|(a, b)| a * b).sum::<f64>();
                acc[l] += w * d * d;
            }
        }
    }
    Ok(0.5
        * slab.len()
        * outer
            .weights
            .iter()
            .zip(&acc)
            .map(|(w, a)| w * a.sqrt())
            .sum::<f64>())
}

/// Evaluates every term of the estimate for `sol` (with postprocessed `ustar`).
pub fn compute_estimator(
    problem: &ProblemData,
    sol: &SpaceTimeSolution,
    ustar: &PostProcessed,
) -> Result<EstimatorBreakdown> {
    if !problem.homogeneous_dirichlet {
        return Err(Error::Config(
            "the estimator requires homogeneous Dirichlet data".into(),
        ));
    }
    let c = problem
        .constant_wavespeed
        .ok_or_else(|| Error::Config("the estimator requires a constant wavespeed".into()))?;
    let space = sol.space();
    if space.degree() < 2 {
        return Err(Error::Config(
            "the estimator needs p ≥ 2 for elementwise Laplacians".into(),
        ));
    }
    let q = sol.degree();
    let abs_lq = abs_legendre_integral(q);
    let cqs = c_q_star(q);
    let mut slabs = Vec::with_capacity(sol.partition().num_slabs());
    for slab in sol.partition().slabs() {
        let tau = slab.len();
        let vq = &sol.v_legendre(slab.index)[q];
        let uq = &sol.u_legendre(slab.index)[q];
        let post = (cqs * tau).sqrt() * (tau / (2 * q + 1) as f64).sqrt() * space.l2_norm(vq);
        let l1 = 0.5 * tau * abs_lq;
        let lap_v = l1 * space.broken_laplacian(vq, 1.0).l2_norm(space);
        let lap_u = l1 * space.broken_laplacian(uq, 1.0).l2_norm(space);
        let gap = slab
            .sample_times(DEFAULT_SAMPLES_PER_SLAB)
            .into_iter()
            .map(|t| {
                let d = combine(&[ustar.at(&slab, t), sol.u_at(&slab, t)], &[1.0, -1.0]);
                space.l2_norm(&d)
            })
            .fold(0.0, f64::max);
        slabs.push(SlabIndicators {
            post,
            f: f_defect_l1(problem, sol, &slab)?,
            lap_v,
            lap_u,
            gap,
        });
    }
    let mut m = 0;
    for (n, s) in slabs.iter().enumerate() {
        if s.gap > slabs[m].gap {
            m = n;
        }
    }
    let part = sol.partition();
    let slab_m = part.slab(m);
    let tau_m = slab_m.len();
    let c2 = c * c;
    let mut term_f = 2.0 * tau_m * slabs[m].f;
    // The duality argument bounds this contribution by c²τ_m²‖·‖ (q = 1) or c²τ_m²‖·‖/2 (q ≥ 2).
    let kappa = if q == 1 { 1.0 } else { 0.5 };
    let mut term_lap_v = 2.0 * c2 * kappa * tau_m * tau_m * slabs[m].lap_v;
    let mut term_lap_u = 2.0 * c2 * tau_m * slabs[m].lap_u;
    for (n, s) in slabs.iter().enumerate().take(m) {
        let slab_n = part.slab(n);
        let tau = slab_n.len();
        term_f += 2.0 * c_pi(q - 1) * tau * s.f;
        term_lap_v += 2.0 * c2 * c_bullet(q, &slab_n, &slab_m) * tau * s.lap_v;
        term_lap_u += 2.0 * c2 * c_pi(q - 1) * tau * s.lap_u;
    }
    let term_post = slabs.iter().map(|s| s.post).fold(0.0, f64::max);
    let eta = term_post + term_lap_v + term_lap_u;
    Ok(EstimatorBreakdown {
        m_star: m,
        term_post,
        term_f,
        term_lap_v,
        term_lap_u,
        eta,
        osc_f: term_f,
        total: eta + term_f,
        slabs,
    })
}

/// Both sides of the slab-local bounds on `u* − u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabGapBounds {
    /// Sampled `max_t ‖(u* − u)(t)‖`.
    pub sup_gap: f64,
    /// `√(C_{q,*}τ_n) ‖(Id − Π_{q−1})v‖_{L²(I_n;L²)}`.
    pub sup_bound: f64,
    /// `‖u* − u‖_{L¹(I_n;L²)}` by Gauss quadrature.
    pub l1_gap: f64,
    /// `τ_n ‖(Id − Π_{q−1})v‖_{L¹(I_n;L²)}`.
    pub l1_bound: f64,
}

/// Evaluates the `L∞` and `L¹` slab bounds on `u* − u` for every slab.
/// `samples` controls the resolution of the sampled supremum.
pub fn slab_gap_bounds(
    sol: &SpaceTimeSolution,
    ustar: &PostProcessed,
    samples: usize,
) -> Result<Vec<SlabGapBounds>> {
    let space = sol.space();
    let q = sol.degree();
    let rule = GaussRule::reference((q + 2).max(8))?;
    let abs_lq = abs_legendre_integral(q);
    let gap_at = |slab: &Slab, t: f64| {
        space.l2_norm(&combine(
            &[ustar.at(slab, t), sol.u_at(slab, t)],
            &[1.0, -1.0],
        ))
    };
    Ok(sol
        .partition()
        .slabs()
        .map(|slab| {
            let tau = slab.len();
            let nv = space.l2_norm(&sol.v_legendre(slab.index)[q]);
            let sup_gap = slab
                .sample_times(samples)
                .into_iter()
                .map(|t| gap_at(&slab, t))
                .fold(0.0, f64::max);
            let l1_gap = rule
                .iter()
                .map(|(s, w)| 0.5 * tau * w * gap_at(&slab, slab.start + 0.5 * tau * (s + 1.0)))
                .sum();
            SlabGapBounds {
                sup_gap,
                sup_bound: (c_q_star(q) * tau).sqrt() * (tau / (2 * q + 1) as f64).sqrt() * nv,
                l1_gap,
                l1_bound: tau * 0.5 * tau * abs_lq * nv,
            }
        })
        .collect())
}

/// `η / error`, undefined for a vanishing error.
pub fn effectivity(eta: f64, error: f64) -> Option<f64> {
    (error > 0.0).then(|| eta / error)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        assert!((c_q_star(1) - 0.318_309_886_183_790_7).abs() < 1e-15);
        assert!((c_q_star(2) - 0.353_553_390_593_273_8).abs() < 1e-15);
        assert_eq!(c_pi(0), PI.powf(-0.5));
        assert_eq!(c_pi(2), PI.powf(-0.5));
        assert!((c_pi(3) - 1.0 / PI).abs() < 1e-16);
        for q in 2..8 {
            assert!(c_q_star(q + 1) < c_q_star(q));
        }
    }

    #[test]
    fn abs_legendre_integrals() {
        assert!((abs_legendre_integral(0) - 2.0).abs() < 1e-15);
        assert!((abs_legendre_integral(1) - 1.0).abs() < 1e-15);
        // midpoint sums resolve the kinks well enough at this resolution
        for q in 2..6 {
            let n = 200_000;
            let h = 2.0 / n as f64;
            let fine: f64 = (0..n)
                .map(|i| legendre(q, -1.0 + (i as f64 + 0.5) * h).abs() * h)
                .sum();
            assert!((abs_legendre_integral(q) - fine).abs() < 1e-8);
        }
    }

    #[test]
    fn effectivity_cases() {
        assert_eq!(effectivity(1.0, 1.0), Some(1.0));
        assert_eq!(effectivity(2.0, 1.0), Some(2.0));
        assert_eq!(effectivity(1.0, 0.0), None);
    }
}
