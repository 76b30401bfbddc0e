//! Per-slab temporal bases.
//!
//! Test functions are the shifted Legendre polynomials `L_0..L_{q-1}` with
//! `L_s(t_n) = 1`. Trial functions are `σ_0 ≡ 1` and the scaled integrated
//! Legendre polynomials
//!
//! ```text
//! σ_j(t) = (1/τ_n) ∫_{t_{n-1}}^t L_{j-1}(s) ds,   j ≥ 1,
//! ```
//!
//! so `σ_j(t_{n-1}) = 0`, `σ_1(t_n) = 1`, `σ_j(t_n) = 0` for `j ≥ 2`, and
//! `σ_j' = L_{j-1} / τ_n`. The scaling keeps the trial basis independent
//! of `τ_n` on the reference interval.

use nalgebra::DMatrix;

use crate::error::Result;

use super::gauss::GaussRule;
use super::legendre::{legendre_all, legendre_and_derivative};
use super::partition::Slab;

/// Shifted Legendre polynomial `L_s` on the slab (`derivative = false`) or
/// its time derivative (`derivative = true`).
pub fn legendre_eval(s: usize, slab: &Slab, t: f64, derivative: bool) -> Result<f64> {
    slab.check(t)?;
    let (p, dp) = legendre_and_derivative(s, slab.reference(t));
    Ok(if derivative { dp * 2.0 / slab.len() } else { p })
}

/// `σ_0(s), …, σ_deg(s)` at the reference coordinate `s ∈ [-1, 1]`.
pub fn trial_values(deg: usize, s: f64) -> Vec<f64> {
    let p = legendre_all(deg, s);
    (0..=deg)
        .map(|j| match j {
            0 => 1.0,
            1 => 0.5 * (s + 1.0),
            _ => (p[j] - p[j - 2]) / (2.0 * (2.0 * j as f64 - 1.0)),
        })
        .collect()
}

/// Time derivatives `σ_0'(t), …, σ_deg'(t)` for a slab of length `tau`.
pub fn trial_derivatives(deg: usize, s: f64, tau: f64) -> Vec<f64> {
    let p = legendre_all(deg, s);
    (0..=deg)
        .map(|j| if j == 0 { 0.0 } else { p[j - 1] / tau })
        .collect()
}

/// Column `j` holds the Legendre coefficients of `σ_j`; upper triangular.
pub fn sigma_to_legendre(deg: usize) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(deg + 1, deg + 1);
    s[(0, 0)] = 1.0;
    if deg >= 1 {
        s[(0, 1)] = 0.5;
        s[(1, 1)] = 0.5;
    }
    for j in 2..=deg {
        let c = 1.0 / (2.0 * (2.0 * j as f64 - 1.0));
        s[(j, j)] = c;
        s[(j - 2, j)] = -c;
    }
    s
}

/// Converts rows of σ-coefficients (`rows[j][dof]`) to Legendre coefficients.
pub fn rows_sigma_to_legendre(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let deg = rows.len() - 1;
    let ndof = rows[0].len();
    let s = sigma_to_legendre(deg);
    (0..=deg)
        .map(|k| {
            let mut out = vec![0.0; ndof];
            for j in k..=deg {
                let c = s[(k, j)];
                if c != 0.0 {
                    for (o, &r) in out.iter_mut().zip(&rows[j]) {
                        *o += c * r;
                    }
                }
            }
            out
        })
        .collect()
}

/// Inverse of [`rows_sigma_to_legendre`] for a single scalar coefficient vector.
pub fn legendre_to_sigma(leg: &[f64]) -> Vec<f64> {
    let deg = leg.len() - 1;
    let s = sigma_to_legendre(deg);
    let mut a = vec![0.0; deg + 1];
    for j in (0..=deg).rev() {
        let mut rhs = leg[j];
        for k in j + 1..=deg {
            rhs -= s[(j, k)] * a[k];
        }
        a[j] = rhs / s[(j, j)];
    }
    a
}

/// Row-wise version of [`legendre_to_sigma`].
pub fn rows_legendre_to_sigma(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let deg = rows.len() - 1;
    let ndof = rows[0].len();
    let s = sigma_to_legendre(deg);
    let mut out = vec![vec![0.0; ndof]; deg + 1];
    for j in (0..=deg).rev() {
        let mut acc = rows[j].clone();
        for k in j + 1..=deg {
            let c = s[(j, k)];
            if c != 0.0 {
                for (a, &o) in acc.iter_mut().zip(&out[k]) {
                    *a -= c * o;
                }
            }
        }
        let d = 1.0 / s[(j, j)];
        out[j] = acc.into_iter().map(|a| a * d).collect();
    }
    out
}

/// Temporal coupling matrices of one slab, each `q × (q+1)`:
/// `N[i][j] = ∫ σ_j L_i dt` and `D[i][j] = ∫ σ_j' L_i dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabTemporalMatrices {
    pub n: DMatrix<f64>,
    pub d: DMatrix<f64>,
}

pub fn slab_temporal_matrices(q: usize, slab: &Slab) -> Result<SlabTemporalMatrices> {
    let rule = GaussRule::reference(q + 1)?;
    let tau = slab.len();
    let mut n = DMatrix::zeros(q, q + 1);
    let mut d = DMatrix::zeros(q, q + 1);
    for (s, w) in rule.iter() {
        let l = legendre_all(q, s);
        let sig = trial_values(q, s);
        let dsig = trial_derivatives(q, s, tau);
        let jac = 0.5 * tau;
        for i in 0..q {
            for j in 0..=q {
                n[(i, j)] += w * jac * sig[j] * l[i];
                d[(i, j)] += w * jac * dsig[j] * l[i];
            }
        }
    }
    Ok(SlabTemporalMatrices { n, d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_endpoint_values() {
        let slab = Slab::new(0, 0.2, 0.7);
        for s in 0..=6 {
            let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
            assert_relative_eq!(
                legendre_eval(s, &slab, 0.2, false).unwrap(),
                sign,
                epsilon = 1e-15
            );
            assert_relative_eq!(
                legendre_eval(s, &slab, 0.7, false).unwrap(),
                1.0,
                epsilon = 1e-14
            );
        }
        assert_eq!(legendre_eval(0, &slab, 0.4, false).unwrap(), 1.0);
        assert!(legendre_eval(2, &slab, 0.9, false).is_err());
    }

    #[test]
    fn legendre_orthogonality() {
        let slab = Slab::new(0, 1.0, 1.3);
        let rule = GaussRule::on_interval(12, slab.start, slab.end).unwrap();
        for i in 0..=8 {
            for j in 0..=8 {
                let v = rule.integrate(|t| {
                    legendre_eval(i, &slab, t, false).unwrap()
                        * legendre_eval(j, &slab, t, false).unwrap()
                });
                let expect = if i == j {
                    slab.len() / (2 * i + 1) as f64
                } else {
                    0.0
                };
                assert!((v - expect).abs() < 1e-13, "i={i} j={j}");
            }
        }
    }

    #[test]
    fn weighted_legendre_identity() {
        for &tau in &[1.0, 0.3] {
            let slab = Slab::new(0, 0.0, tau);
            for q in 1..=5 {
                let rule = GaussRule::on_interval(q + 2, 0.0, tau).unwrap();
                let v = rule.integrate(|t| {
                    t * legendre_eval(q, &slab, t, false).unwrap()
                        * legendre_eval(q, &slab, t, true).unwrap()
                });
                assert!((v - tau * q as f64 / (2 * q + 1) as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn trial_basis_endpoints() {
        for q in 1..=7 {
            let at_start = trial_values(q, -1.0);
            let at_end = trial_values(q, 1.0);
            assert_eq!(at_start[0], 1.0);
            for j in 1..=q {
                assert!(at_start[j].abs() < 1e-15);
                let expect = if j <= 1 { 1.0 } else { 0.0 };
                assert!((at_end[j] - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn q1_matrices_by_hand() {
        let tau = 0.4;
        let m = slab_temporal_matrices(1, &Slab::new(0, 1.0, 1.0 + tau)).unwrap();
        assert_relative_eq!(m.n[(0, 0)], tau, epsilon = 1e-15);
        assert_relative_eq!(m.n[(0, 1)], tau / 2.0, epsilon = 1e-15);
        assert_eq!(m.d[(0, 0)], 0.0);
        assert_relative_eq!(m.d[(0, 1)], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn d_structure_and_scaling() {
        for q in 1..=6 {
            let a = slab_temporal_matrices(q, &Slab::new(0, 0.0, 0.5)).unwrap();
            let b = slab_temporal_matrices(q, &Slab::new(0, 0.0, 0.25)).unwrap();
            for i in 0..q {
                assert_eq!(a.d[(i, 0)], 0.0);
                for j in 0..=q {
                    assert_relative_eq!(b.n[(i, j)], 0.5 * a.n[(i, j)], epsilon = 1e-15);
                    assert_relative_eq!(b.d[(i, j)], a.d[(i, j)], epsilon = 1e-14);
                    let expect = if j == i + 1 {
                        1.0 / (2 * i + 1) as f64
                    } else {
                        0.0
                    };
                    assert!((a.d[(i, j)] - expect).abs() < 1e-14);
                }
            }
            let sub = a.n.columns(1, q).into_owned();
            assert!(sub.determinant().abs() > 1e-12);
        }
    }

    #[test]
    fn sigma_legendre_roundtrip() {
        for deg in 0..=7 {
            let leg: Vec<f64> = (0..=deg).map(|k| (k as f64 * 0.7).sin() + 0.1).collect();
            let sig = legendre_to_sigma(&leg);
            let s = 0.31;
            let p = legendre_all(deg, s);
            let via_leg: f64 = leg.iter().zip(&p).map(|(a, b)| a * b).sum();
            let via_sig: f64 = sig
                .iter()
                .zip(trial_values(deg, s))
                .map(|(a, b)| a * b)
                .sum();
            assert_relative_eq!(via_leg, via_sig, epsilon = 1e-13);
        }
    }
}
