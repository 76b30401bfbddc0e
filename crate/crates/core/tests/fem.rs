use std::f64::consts::PI;
use std::sync::Arc;

use approx::assert_abs_diff_eq;
use wavext_core::fem::{
    constant_wavespeed, interpolate_nodal, LagrangeSpace, OperatorKind, SpatialOperators,
};
use wavext_core::mesh::{BoundingBox, Mesh};

fn space(n: usize, p: usize) -> Arc<LagrangeSpace> {
    Arc::new(
        LagrangeSpace::new(
            Mesh::structured(n, n, BoundingBox::unit_square()).unwrap(),
            p,
        )
        .unwrap(),
    )
}

fn one(_: [f64; 2]) -> f64 {
    1.0
}

#[test]
fn dof_counts() {
    assert_eq!(space(1, 1).num_dofs(), 4);
    assert_eq!(space(1, 2).num_dofs(), 9);
    let s = space(8, 3);
    assert_eq!(s.boundary_dofs().len(), 96);
    assert_eq!(
        s.boundary_dofs().len() + s.interior_dofs().len(),
        s.num_dofs()
    );
    for p in 1..=5 {
        let s = space(2, p);
        assert_eq!(s.cell_dofs(0).len(), (p + 1) * (p + 2) / 2);
    }
}

#[test]
fn basis_is_nodal() {
    let s = space(2, 3);
    for i in 0..s.num_dofs() {
        let mut e = vec![0.0; s.num_dofs()];
        e[i] = 1.0;
        for (j, &x) in s.dof_coords().iter().enumerate() {
            let expect = if i == j { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(s.eval(&e, x).unwrap(), expect, epsilon = 1e-12);
        }
    }
}

#[test]
fn hand_stiffness_on_reference_triangle() {
    let l = local_stiffness([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
    let expect = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
    for a in 0..3 {
        for b in 0..3 {
            assert_abs_diff_eq!(l[a][b], expect[a][b], epsilon = 1e-15);
        }
    }
}

/// Local P1 stiffness by hand from constant barycentric gradients.
fn local_stiffness(v: [[f64; 2]; 3]) -> [[f64; 3]; 3] {
    let area = 0.5
        * ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]));
    let grads: Vec<[f64; 2]> = (0..3)
        .map(|a| {
            let (b, c) = (v[(a + 1) % 3], v[(a + 2) % 3]);
            [(b[1] - c[1]) / (2.0 * area), (c[0] - b[0]) / (2.0 * area)]
        })
        .collect();
    let mut m = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            m[a][b] = area.abs() * (grads[a][0] * grads[b][0] + grads[a][1] * grads[b][1]);
        }
    }
    m
}

#[test]
fn assembled_p1_stiffness_matches_hand_computation() {
    let s = space(2, 1);
    let k = s.assemble(OperatorKind::Stiffness, &one).unwrap();
    let mut expect = vec![vec![0.0; s.num_dofs()]; s.num_dofs()];
    for cell in 0..s.mesh().num_cells() {
        let l = local_stiffness(s.mesh().cell_vertices(cell));
        let d = s.cell_dofs(cell);
        for a in 0..3 {
            for b in 0..3 {
                expect[d[a]][d[b]] += l[a][b];
            }
        }
    }
    for (i, row) in expect.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            assert_abs_diff_eq!(k.get(i, j), *e, epsilon = 1e-14);
        }
    }
}

#[test]
fn mass_and_stiffness_sanity() {
    let m = space(1, 1).assemble_mass();
    assert_abs_diff_eq!(m.values().iter().sum::<f64>(), 1.0, epsilon = 1e-14);
    for p in 1..=4 {
        let s = space(3, p);
        let k = s.assemble(OperatorKind::Stiffness, &one).unwrap();
        let m = s.assemble_mass();
        assert!(k.max_asymmetry() < 1e-13);
        assert!(m.max_asymmetry() < 1e-13);
        let ones = vec![1.0; s.num_dofs()];
        for r in k.matvec(&ones) {
            assert_abs_diff_eq!(r, 0.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(m.matvec(&ones).iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }
}

#[test]
fn nonpositive_wavespeed_is_rejected() {
    let s = space(1, 1);
    assert!(s.assemble(OperatorKind::Stiffness, &|_| 0.0).is_err());
}

#[test]
fn interpolation_reproduces_space_members() {
    for p in 2..=4 {
        let s = space(3, p);
        let f = interpolate_nodal(&s, &|x| x[0] * x[1]);
        assert_abs_diff_eq!(f.evaluate([0.3, 0.7]).unwrap(), 0.21, epsilon = 1e-13);
        let c = interpolate_nodal(&s, &one);
        assert!(c.coeffs().iter().all(|x| (x - 1.0).abs() < 1e-15));
    }
    let lin = interpolate_nodal(&space(3, 1), &|x| x[0]);
    assert_abs_diff_eq!(lin.evaluate([0.123, 0.77]).unwrap(), 0.123, epsilon = 1e-14);
}

#[test]
fn interpolation_error_rate() {
    let f = |x: [f64; 2]| (PI * x[0]).cos() * (PI * x[1]).sin();
    let e8 = interpolate_nodal(&space(8, 2), &f).l2_distance(&f);
    let e16 = interpolate_nodal(&space(16, 2), &f).l2_distance(&f);
    let rate = (e8 / e16).log2();
    assert!((rate - 3.0).abs() < 0.2, "rate {rate}");
}

#[test]
fn ritz_projection_gradient_rate() {
    let f = |x: [f64; 2]| (PI * x[0]).cos() * (PI * x[1]).sin();
    let g = |x: [f64; 2]| {
        [
            -PI * (PI * x[0]).sin() * (PI * x[1]).sin(),
            PI * (PI * x[0]).cos() * (PI * x[1]).cos(),
        ]
    };
    for p in 1..=3 {
        let err = |n| {
            let ops = SpatialOperators::new(space(n, p), constant_wavespeed(1.0)).unwrap();
            ops.ritz_project(&f, &g).unwrap().h1_semi_distance(&g, &one)
        };
        let rate = (err(4) / err(8)).log2();
        assert!((rate - p as f64).abs() < 0.25, "p={p} rate {rate}");
    }
}

#[test]
fn interface_continuity() {
    let s = space(3, 3);
    let f = |x: [f64; 2]| (3.0 * x[0]).sin() * (2.0 * x[1]).exp();
    let coeffs = s.interpolate(&f);
    let mesh = s.mesh();
    for (e, edge) in mesh.edges().iter().enumerate() {
        if mesh.edge_is_boundary(e) {
            continue;
        }
        let (a, b) = (mesh.vertices()[edge[0]], mesh.vertices()[edge[1]]);
        let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        let vals: Vec<f64> = (0..mesh.num_cells())
            .filter(|&c| mesh.cell_edges(c).contains(&e))
            .map(|c| s.eval_in_cell(&coeffs, c, mesh.barycentric(c, mid)))
            .collect();
        assert_eq!(vals.len(), 2);
        assert_abs_diff_eq!(vals[0], vals[1], epsilon = 1e-12);
    }
}

#[test]
fn broken_laplacians() {
    let s = Arc::new(
        LagrangeSpace::new(
            Mesh::structured(2, 2, BoundingBox::new(-1.0, 1.0, -1.0, 1.0)).unwrap(),
            4,
        )
        .unwrap(),
    );
    let pts = [[0.1, 0.2], [-0.6, 0.35], [0.7, -0.9], [-0.25, -0.4]];
    let quad = s.interpolate(&|x| x[0] * x[0] + x[1] * x[1]);
    let lin = s.interpolate(&|x| 2.0 * x[0] - x[1]);
    let bump = s.interpolate(&|x| (1.0 - x[0] * x[0]) * (1.0 - x[1] * x[1]));
    for x in pts {
        assert_abs_diff_eq!(
            s.broken_laplacian(&quad, 1.0).eval(&s, x).unwrap(),
            4.0,
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            s.broken_laplacian(&lin, 1.0).eval(&s, x).unwrap(),
            0.0,
            epsilon = 1e-10
        );
        let expect = -2.0 * (1.0 - x[1] * x[1]) - 2.0 * (1.0 - x[0] * x[0]);
        assert_abs_diff_eq!(
            s.broken_laplacian(&bump, 1.0).eval(&s, x).unwrap(),
            expect,
            epsilon = 1e-10
        );
    }
}

#[test]
fn norms() {
    let s = space(4, 2);
    assert_abs_diff_eq!(s.l2_norm(&s.interpolate(&one)), 1.0, epsilon = 1e-13);
    assert_abs_diff_eq!(
        s.l2_norm(&s.interpolate(&|x| x[0])),
        1.0 / 3f64.sqrt(),
        epsilon = 1e-13
    );
    assert_eq!(s.l2_norm(&vec![0.0; s.num_dofs()]), 0.0);
}

#[test]
fn interior_projection_cases() {
    let s = space(4, 4);
    let ops = SpatialOperators::new(s.clone(), constant_wavespeed(1.0)).unwrap();
    let zero = ops.l2_project_interior(&|_| 0.0).unwrap();
    assert!(zero.coeffs().iter().all(|x| *x == 0.0));
    let member = |x: [f64; 2]| x[0] * (1.0 - x[0]) * x[1] * (1.0 - x[1]);
    let proj = ops.l2_project_interior(&member).unwrap();
    let exact = s.interpolate(&member);
    for (a, b) in proj.coeffs().iter().zip(&exact) {
        assert_abs_diff_eq!(*a, *b, epsilon = 1e-11);
    }
}
