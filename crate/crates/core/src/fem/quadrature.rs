//! Quadrature on the reference triangle by collapsed (Duffy) Gauss products.

use crate::time::GaussRule;

#[derive(Debug, Clone)]
pub struct TriangleRule {
    /// Reference points `ξ`.
    pub points: Vec<[f64; 2]>,
    /// Weights; they sum to the reference area `1/2`.
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl TriangleRule {
    /// Rule exact for polynomials of total degree `degree`.
    pub fn with_degree(degree: usize) -> Self {
        let na = (degree + 2) / 2;
        let nb = (degree + 3) / 2;
        let ga = GaussRule::on_interval(na.max(1), 0.0, 1.0).expect("degree within range");
        let gb = GaussRule::on_interval(nb.max(1), 0.0, 1.0).expect("degree within range");
        let mut points = Vec::with_capacity(na * nb);
        let mut weights = Vec::with_capacity(na * nb);
        for (b, wb) in gb.iter() {
            for (a, wa) in ga.iter() {
                points.push([a * (1.0 - b), b]);
                weights.push(wa * wb * (1.0 - b));
            }
        }
        Self {
            points,
            weights,
            degree,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `∫_T x^a y^b = a! b! / (a + b + 2)!` on the reference triangle.
#[cfg(test)]
pub(crate) fn monomial_integral(a: u32, b: u32) -> f64 {
    let fact = |n: u32| (1..=n).map(|k| k as f64).product::<f64>();
    fact(a) * fact(b) / fact(a + b + 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactness() {
        for degree in 0..=22 {
            let r = TriangleRule::with_degree(degree);
            for a in 0..=degree as u32 {
                for b in 0..=(degree as u32 - a) {
                    let q: f64 = r
                        .points
                        .iter()
                        .zip(&r.weights)
                        .map(|(x, w)| w * x[0].powi(a as i32) * x[1].powi(b as i32))
                        .sum();
                    let exact = monomial_integral(a, b);
                    assert!(
                        (q - exact).abs() < 1e-15 + 1e-13 * exact,
                        "deg={degree} a={a} b={b}"
                    );
                }
            }
        }
    }
}
