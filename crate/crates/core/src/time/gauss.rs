use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::legendre::legendre_and_derivative;

pub const MAX_GAUSS_POINTS: usize = 30;

/// Gauss–Legendre nodes and weights on some interval.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// `npts`-point rule on the reference interval `[-1, 1]`, nodes ascending.
    pub fn reference(npts: usize) -> Result<Self> {
        if npts == 0 || npts > MAX_GAUSS_POINTS {
            return Err(Error::InvalidArgument(format!(
                "Gauss rule needs 1..={MAX_GAUSS_POINTS} points, got {npts}"
            )));
        }
        let n = npts;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = -(PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_and_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_and_derivative(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = x;
            nodes[n - 1 - i] = -x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    /// `npts`-point rule mapped to `[a, b]`.
    pub fn on_interval(npts: usize, a: f64, b: f64) -> Result<Self> {
        let mut rule = Self::reference(npts)?;
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for x in &mut rule.nodes {
            *x = mid + half * *x;
        }
        for w in &mut rule.weights {
            *w *= half;
        }
        Ok(rule)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().cloned().zip(self.weights.iter().cloned())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn one_point_rule() {
        let r = GaussRule::on_interval(1, 0.0, 1.0).unwrap();
        assert_eq!(r.nodes, vec![0.5]);
        assert_eq!(r.weights, vec![1.0]);
    }

    #[test]
    fn two_points_integrate_cubic() {
        let r = GaussRule::on_interval(2, 0.0, 1.0).unwrap();
        assert!((r.integrate(|t| t.powi(3)) - 0.25).abs() <= 1e-15);
    }

    #[test]
    fn weights_sum_to_length() {
        for n in 1..=MAX_GAUSS_POINTS {
            let r = GaussRule::on_interval(n, 0.3, 1.7).unwrap();
            assert_relative_eq!(r.weights.iter().sum::<f64>(), 1.4, max_relative = 1e-14);
        }
    }

    #[test]
    fn exact_to_degree_2n_minus_1() {
        for n in 1..=MAX_GAUSS_POINTS {
            let r = GaussRule::reference(n).unwrap();
            for k in 0..2 * n {
                let exact = if k % 2 == 1 {
                    0.0
                } else {
                    2.0 / (k as f64 + 1.0)
                };
                let approx = r.integrate(|x| x.powi(k as i32));
                assert!(
                    (approx - exact).abs() < 1e-13,
                    "n={n} k={k}: {approx} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn range_checked() {
        assert!(GaussRule::reference(0).is_err());
        assert!(GaussRule::reference(31).is_err());
    }
}
