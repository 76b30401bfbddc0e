//! Slabwise `L²` projection and the endpoint-exact projection `P_τ`.

use crate::error::{Error, Result};

use super::gauss::{GaussRule, MAX_GAUSS_POINTS};
use super::legendre::legendre_all;
use super::partition::{Slab, TimePartition};

/// Gauss points used for data-dependent temporal integrals at degree `q`.
pub fn data_quadrature_points(q: usize) -> usize {
    (q + 3).max(6).min(MAX_GAUSS_POINTS)
}

/// Legendre coefficients of the `L²(I_n)` projection of `f` onto `P_r`,
/// integrated with `npts` Gauss points.
pub fn l2_project_time_with(
    r: usize,
    f: impl Fn(f64) -> f64,
    slab: &Slab,
    npts: usize,
) -> Result<Vec<f64>> {
    let rule = GaussRule::reference(npts)?;
    let half = 0.5 * slab.len();
    let mut c = vec![0.0; r + 1];
    for (s, w) in rule.iter() {
        let t = slab.start + half * (s + 1.0);
        let fv = f(t);
        for (k, lk) in legendre_all(r, s).into_iter().enumerate() {
            c[k] += w * fv * lk;
        }
    }
    // (2k+1)/τ ∫ f L_k dt = (2k+1)/2 ∫_{-1}^1 f P_k ds
    for (k, ck) in c.iter_mut().enumerate() {
        *ck *= (2 * k + 1) as f64 / 2.0;
    }
    Ok(c)
}

/// [`l2_project_time_with`] using `r + 6` Gauss points.
pub fn l2_project_time(r: usize, f: impl Fn(f64) -> f64, slab: &Slab) -> Result<Vec<f64>> {
    l2_project_time_with(r, f, slab, (r + 6).min(MAX_GAUSS_POINTS))
}

/// Evaluates `Σ_k c_k L_k(t)` on the slab.
pub fn eval_legendre_series(coeffs: &[f64], slab: &Slab, t: f64) -> f64 {
    if coeffs.is_empty() {
        return 0.0;
    }
    let p = legendre_all(coeffs.len() - 1, slab.reference(t));
    coeffs.iter().zip(p).map(|(c, p)| c * p).sum()
}

/// Continuous piecewise polynomial in time, stored as Legendre
/// coefficients per slab.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePolynomial {
    pub partition: TimePartition,
    pub coeffs: Vec<Vec<f64>>,
}

impl PiecewisePolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs[0].len() - 1
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let slab = self.partition.find_slab(t)?;
        Ok(eval_legendre_series(&self.coeffs[slab.index], &slab, t))
    }

    pub fn eval_on(&self, slab: &Slab, t: f64) -> f64 {
        eval_legendre_series(&self.coeffs[slab.index], slab, t)
    }

    pub fn max_abs_on_samples(&self, per_slab: usize) -> f64 {
        self.partition
            .slabs()
            .flat_map(|s| {
                s.sample_times(per_slab)
                    .into_iter()
                    .map(move |t| self.eval_on(&s, t).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Legendre coefficients of `P_τ f` on a single slab: `Π_{q-2} f + α L_{q-1} + β L_q`
/// with α, β fixed by the two endpoint values.
pub fn ptau_project_slab(
    q: usize,
    f: &impl Fn(f64) -> f64,
    slab: &Slab,
    npts: usize,
) -> Result<Vec<f64>> {
    if q == 0 {
        return Err(Error::InvalidArgument("P_τ needs q ≥ 1".into()));
    }
    let mut c = vec![0.0; q + 1];
    if q >= 2 {
        let low = l2_project_time_with(q - 2, f, slab, npts)?;
        c[..q - 1].copy_from_slice(&low);
    }
    let low_at_start: f64 = c[..q - 1]
        .iter()
        .enumerate()
        .map(|(k, ck)| if k % 2 == 0 { *ck } else { -ck })
        .sum();
    let low_at_end: f64 = c[..q - 1].iter().sum();
    let delta_start = f(slab.start) - low_at_start;
    let delta_end = f(slab.end) - low_at_end;
    let sign = if q.is_multiple_of(2) { 1.0 } else { -1.0 };
    c[q - 1] = (sign * delta_end - delta_start) / (2.0 * sign);
    c[q] = (sign * delta_end + delta_start) / (2.0 * sign);
    Ok(c)
}

/// `P_τ f` over the whole partition.
pub fn ptau_project(
    q: usize,
    f: impl Fn(f64) -> f64,
    partition: &TimePartition,
) -> Result<PiecewisePolynomial> {
    let npts = data_quadrature_points(q);
    let coeffs = partition
        .slabs()
        .map(|slab| ptau_project_slab(q, &f, &slab, npts))
        .collect::<Result<Vec<_>>>()?;
    Ok(PiecewisePolynomial {
        partition: partition.clone(),
        coeffs,
    })
}

/// Per slab, the degree-`q` interpolant of `f` at `q + 1` equispaced times
/// including both endpoints (Legendre coefficients).
pub fn lagrange_interpolate(
    q: usize,
    f: impl Fn(f64) -> f64,
    partition: &TimePartition,
) -> Result<PiecewisePolynomial> {
    if q == 0 {
        return Err(Error::InvalidArgument(
            "interpolation in time needs q ≥ 1".into(),
        ));
    }
    let mut vander = nalgebra::DMatrix::zeros(q + 1, q + 1);
    for i in 0..=q {
        let s = -1.0 + 2.0 * i as f64 / q as f64;
        for (k, p) in legendre_all(q, s).into_iter().enumerate() {
            vander[(i, k)] = p;
        }
    }
    let lu = vander.lu();
    let coeffs = partition
        .slabs()
        .map(|slab| {
            let times = slab.sample_times(q + 1);
            let rhs = nalgebra::DVector::from_iterator(q + 1, times.iter().map(|&t| f(t)));
            lu.solve(&rhs)
                .map(|x| x.iter().cloned().collect())
                .ok_or_else(|| Error::Domain("singular time interpolation matrix".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PiecewisePolynomial {
        partition: partition.clone(),
        coeffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_projects_to_constant() {
        let slab = Slab::new(0, 0.3, 0.9);
        let c = l2_project_time(4, |_| 2.5, &slab).unwrap();
        assert_relative_eq!(c[0], 2.5, epsilon = 1e-14);
        for ck in &c[1..] {
            assert!(ck.abs() < 1e-14);
        }
    }

    #[test]
    fn mean_value_for_r0() {
        let slab = Slab::new(0, 0.0, 1.0);
        let c = l2_project_time(0, |t| t, &slab).unwrap();
        assert_relative_eq!(c[0], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn idempotent() {
        let slab = Slab::new(0, 0.1, 0.35);
        let c = l2_project_time(5, |t| (3.0 * t).exp(), &slab).unwrap();
        let c2 = l2_project_time(5, |t| eval_legendre_series(&c, &slab, t), &slab).unwrap();
        for (a, b) in c.iter().zip(&c2) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn ptau_reproduces_polynomials() {
        let part = TimePartition::new(vec![0.0, 0.2, 0.5, 0.55, 1.0]).unwrap();
        for q in 1..=6 {
            let poly = |t: f64| {
                (0..=q)
                    .map(|k| (k as f64 + 1.0) * t.powi(k as i32))
                    .sum::<f64>()
            };
            let p = ptau_project(q, poly, &part).unwrap();
            for slab in part.slabs() {
                for t in slab.sample_times(7) {
                    assert!((p.eval_on(&slab, t) - poly(t)).abs() < 1e-12, "q={q}");
                }
            }
        }
    }

    #[test]
    fn ptau_interpolates_endpoints_and_is_orthogonal() {
        let part = TimePartition::uniform(1.0, 5).unwrap();
        let f = |t: f64| (4.0 * t).sin() + t * t;
        for q in 1..=6 {
            let p = ptau_project(q, f, &part).unwrap();
            for slab in part.slabs() {
                assert!((p.eval_on(&slab, slab.start) - f(slab.start)).abs() < 1e-13);
                assert!((p.eval_on(&slab, slab.end) - f(slab.end)).abs() < 1e-13);
                if q >= 2 {
                    let rule = GaussRule::on_interval(16, slab.start, slab.end).unwrap();
                    for k in 0..=q - 2 {
                        let r = rule.integrate(|t| {
                            (f(t) - p.eval_on(&slab, t)) * eval_legendre_series(&unit(k), &slab, t)
                        });
                        assert!(r.abs() < 1e-13, "q={q} k={k}: {r}");
                    }
                }
            }
        }
    }

    fn unit(k: usize) -> Vec<f64> {
        let mut v = vec![0.0; k + 1];
        v[k] = 1.0;
        v
    }

    #[test]
    fn lagrange_interpolation_hits_nodes() {
        let part = TimePartition::uniform(1.0, 3).unwrap();
        let f = |t: f64| (2.0 * t).cos();
        let p = lagrange_interpolate(3, f, &part).unwrap();
        for slab in part.slabs() {
            for t in slab.sample_times(4) {
                assert!((p.eval_on(&slab, t) - f(t)).abs() < 1e-14);
            }
        }
    }
}
