//! Manufactured solutions used by the experiments and tests.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use crate::mesh::BoundingBox;
use crate::solver::{ExactSolution, ProblemData};

/// A problem together with its domain and final time.
#[derive(Clone, Debug)]
pub struct Preset {
    pub name: String,
    pub problem: ProblemData,
    pub domain: BoundingBox,
    pub final_time: f64,
}

/// `u = cos(√2πt) cos(πx) sin(πy)` on `(0,1)² × (0,1)`, `c = 1`, `f = 0`,
/// with nonzero Dirichlet data on `x = 0` and `x = 1`.
pub fn dirichlet_cos() -> Preset {
    let w = SQRT_2 * PI;
    let exact = ExactSolution {
        u: Arc::new(move |x, t| (w * t).cos() * (PI * x[0]).cos() * (PI * x[1]).sin()),
        v: Arc::new(move |x, t| -w * (w * t).sin() * (PI * x[0]).cos() * (PI * x[1]).sin()),
        grad_u: Arc::new(move |x, t| {
            let a = (w * t).cos();
            [
                -PI * a * (PI * x[0]).sin() * (PI * x[1]).sin(),
                PI * a * (PI * x[0]).cos() * (PI * x[1]).cos(),
            ]
        }),
    };
    let mut problem = ProblemData::from_exact(1.0, exact, Arc::new(|_, _| 0.0), false);
    problem.source_is_zero = true;
    Preset {
        name: "dirichlet-cos".into(),
        problem,
        domain: BoundingBox::unit_square(),
        final_time: 1.0,
    }
}

/// Temporal profile of the separable estimator test case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// `ψ(t) = cos(4t)`.
    Cos4,
    /// `ψ(t) = t^α`.
    Power(f64),
}

impl Profile {
    /// `(ψ, ψ', ψ'')` at `t`.
    pub fn derivatives(self, t: f64) -> [f64; 3] {
        match self {
            Profile::Cos4 => [
                (4.0 * t).cos(),
                -4.0 * (4.0 * t).sin(),
                -16.0 * (4.0 * t).cos(),
            ],
            Profile::Power(a) => {
                if t <= 0.0 {
                    let d1 = if a > 1.0 {
                        0.0
                    } else if a == 1.0 {
                        1.0
                    } else {
                        f64::INFINITY
                    };
                    let d2 = if a > 2.0 {
                        0.0
                    } else if a == 2.0 {
                        2.0
                    } else {
                        f64::INFINITY
                    };
                    [if a > 0.0 { 0.0 } else { 1.0 }, d1, d2]
                } else {
                    [
                        t.powf(a),
                        a * t.powf(a - 1.0),
                        a * (a - 1.0) * t.powf(a - 2.0),
                    ]
                }
            }
        }
    }

    pub fn label(self) -> String {
        match self {
            Profile::Cos4 => "cos4t".into(),
            Profile::Power(a) => format!("t^{a}"),
        }
    }
}

/// `u = ψ(t)(1 − x²)(1 − y²)` on `(−1,1)² × (0,1)`, `c = 1`, homogeneous Dirichlet data.
pub fn estimator_poly(profile: Profile) -> Preset {
    let bump = |x: [f64; 2]| (1.0 - x[0] * x[0]) * (1.0 - x[1] * x[1]);
    let lap = |x: [f64; 2]| -2.0 * (1.0 - x[1] * x[1]) - 2.0 * (1.0 - x[0] * x[0]);
    let exact = ExactSolution {
        u: Arc::new(move |x, t| profile.derivatives(t)[0] * bump(x)),
        v: Arc::new(move |x, t| profile.derivatives(t)[1] * bump(x)),
        grad_u: Arc::new(move |x, t| {
            let p = profile.derivatives(t)[0];
            [
                -2.0 * x[0] * (1.0 - x[1] * x[1]) * p,
                -2.0 * x[1] * (1.0 - x[0] * x[0]) * p,
            ]
        }),
    };
    let source = Arc::new(move |x: [f64; 2], t: f64| {
        let d = profile.derivatives(t);
        d[2] * bump(x) - d[0] * lap(x)
    });
    let problem = ProblemData::from_exact(1.0, exact, source, true);
    Preset {
        name: format!("estimator-poly[{}]", profile.label()),
        problem,
        domain: BoundingBox::new(-1.0, 1.0, -1.0, 1.0),
        final_time: 1.0,
    }
}

/// `u = t·x·y`, `v = x·y` on the unit square: `f = 0`, Dirichlet data `t·x·y`.
pub fn bilinear_probe() -> Preset {
    let exact = ExactSolution {
        u: Arc::new(|x, t| t * x[0] * x[1]),
        v: Arc::new(|x, _| x[0] * x[1]),
        grad_u: Arc::new(|x, t| [t * x[1], t * x[0]]),
    };
    let mut problem = ProblemData::from_exact(1.0, exact, Arc::new(|_, _| 0.0), false);
    problem.source_is_zero = true;
    Preset {
        name: "bilinear-probe".into(),
        problem,
        domain: BoundingBox::unit_square(),
        final_time: 1.0,
    }
}

/// Standing wave `u = cos(√2πt) sin(πx) sin(πy)` with homogeneous data.
pub fn standing_wave() -> Preset {
    let w = SQRT_2 * PI;
    let exact = ExactSolution {
        u: Arc::new(move |x, t| (w * t).cos() * (PI * x[0]).sin() * (PI * x[1]).sin()),
        v: Arc::new(move |x, t| -w * (w * t).sin() * (PI * x[0]).sin() * (PI * x[1]).sin()),
        grad_u: Arc::new(move |x, t| {
            let a = (w * t).cos();
            [
                PI * a * (PI * x[0]).cos() * (PI * x[1]).sin(),
                PI * a * (PI * x[0]).sin() * (PI * x[1]).cos(),
            ]
        }),
    };
    let mut problem = ProblemData::from_exact(1.0, exact, Arc::new(|_, _| 0.0), true);
    problem.source_is_zero = true;
    Preset {
        name: "standing-wave".into(),
        problem,
        domain: BoundingBox::unit_square(),
        final_time: 1.0,
    }
}

/// Resolves a preset by name (`estimator-poly` takes `psi`).
pub fn by_name(name: &str, psi: Option<Profile>) -> Option<Preset> {
    match name {
        "dirichlet-cos" => Some(dirichlet_cos()),
        "estimator-poly" => Some(estimator_poly(psi.unwrap_or(Profile::Cos4))),
        "bilinear-probe" => Some(bilinear_probe()),
        "standing-wave" => Some(standing_wave()),
        _ => None,
    }
}
