use nalgebra::{DMatrix, Matrix3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::geometry::{split_tet, CutInfo, Sphere};
use crate::mesh::{barycentric_coordinates, Mesh, MeshHierarchy};
use crate::space::{build_dof_layout, build_index_sets, DofLayout};

const X0: Point = [0.001, 0.002, 0.003];

struct Affine([f64; 4]);

impl Affine {
    fn eval(&self, x: &Point) -> f64 {
        self.0[0] + self.0[1] * x[0] + self.0[2] * x[1] + self.0[3] * x[2]
    }
}

impl ProblemData for Affine {
    fn source(&self, _: Side, _: &Point) -> f64 {
        0.0
    }
    fn dirichlet(&self, _: Side, x: &Point) -> f64 {
        self.eval(x)
    }
}

struct Zero;

impl ProblemData for Zero {
    fn source(&self, _: Side, _: &Point) -> f64 {
        0.0
    }
    fn dirichlet(&self, _: Side, _: &Point) -> f64 {
        0.0
    }
}

fn setup(mesh: &Mesh, center: Point, kind: ProblemKind) -> (CutInfo, DofLayout) {
    let cut = CutInfo::new(mesh, &Sphere::unit(center), 4).unwrap();
    let sets = build_index_sets(mesh, &cut, kind).unwrap();
    (cut, build_dof_layout(&sets))
}

fn nodal_values(mesh: &Mesh, layout: &DofLayout, f: impl Fn(&Point) -> f64) -> Vec<f64> {
    let mut x = vec![0.0; layout.num_dofs()];
    for side in Side::BOTH {
        for &v in layout.block(side) {
            x[layout.cut_dof(side, v).unwrap()] = f(&mesh.vertices()[v]);
        }
    }
    x
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn min_eigenvalue(a: &CsrMatrix) -> f64 {
    a.to_dense().symmetric_eigen().eigenvalues.min()
}

/// Classical stiffness assembly through the inverse Jacobian of the affine map.
fn classical_laplacian(mesh: &Mesh, interior: &[usize]) -> DMatrix<f64> {
    let mut index = vec![usize::MAX; mesh.num_vertices()];
    for (k, &v) in interior.iter().enumerate() {
        index[v] = k;
    }
    let n = interior.len();
    let mut a = DMatrix::zeros(n, n);
    let ref_grads = [
        [-1.0, -1.0, -1.0],
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
    ];
    for (t, tet) in mesh.tets().iter().enumerate() {
        let p = mesh.tet_points(t);
        let j = Matrix3::from_fn(|r, c| p[c + 1][r] - p[0][r]);
        let jit = j.try_inverse().unwrap().transpose();
        let vol = j.determinant().abs() / 6.0;
        let g: Vec<nalgebra::Vector3<f64>> = ref_grads
            .iter()
            .map(|r| jit * nalgebra::Vector3::new(r[0], r[1], r[2]))
            .collect();
        for a_ in 0..4 {
            for b_ in 0..4 {
                let (i, k) = (index[tet[a_]], index[tet[b_]]);
                if i != usize::MAX && k != usize::MAX {
                    a[(i, k)] += vol * g[a_].dot(&g[b_]);
                }
            }
        }
    }
    a
}

#[test]
fn without_cuts_the_matrix_is_the_standard_laplacian() {
    let mesh = MeshHierarchy::standard(1).level(1).clone();
    let (cut, layout) = setup(&mesh, [10.0, 0.0, 0.0], ProblemKind::Interface);
    assert_eq!(layout.n1(), 0);
    let coeffs = ProblemCoefficients {
        alpha2: 1.0,
        ..Default::default()
    };
    let sys = assemble_interface(&mesh, &cut, &layout, &coeffs, &Zero).unwrap();
    let oracle = classical_laplacian(&mesh, layout.block(Side::Outside));
    let diff = (sys.matrix.to_dense() - oracle).abs().max();
    assert!(diff < 1e-12, "{diff}");
}

#[test]
fn penalty_entries_match_exact_triangle_integrals() {
    let mesh = MeshHierarchy::standard(1).level(1).clone();
    let (cut, layout) = setup(&mesh, X0, ProblemKind::Interface);
    for element_size in [ElementSize::Diameter, ElementSize::GridSpacing] {
        let base = ProblemCoefficients {
            beta: 0.0,
            element_size,
            ..Default::default()
        };
        let a1 = assemble_interface(
            &mesh,
            &cut,
            &layout,
            &ProblemCoefficients {
                gamma: 10.0,
                ..base
            },
            &Zero,
        )
        .unwrap();
        let a2 = assemble_interface(
            &mesh,
            &cut,
            &layout,
            &ProblemCoefficients {
                gamma: 20.0,
                ..base
            },
            &Zero,
        )
        .unwrap();
        let alpha_bar = base.alpha_bar();
        let h = |t: usize| match element_size {
            ElementSize::Diameter => mesh.tet_diameter(t),
            ElementSize::GridSpacing => 0.375,
        };

        let mut checked = 0;
        for c in cut.cut_tets().iter().take(40) {
            let tet = mesh.tets()[c.tet];
            let (v, w) = (tet[0], tet[1]);
            let (Some(i), Some(j)) = (
                layout.cut_dof(Side::Inside, v),
                layout.cut_dof(Side::Outside, w),
            ) else {
                continue;
            };
            // -sum_T alpha_bar / h_T * int_{T cap Gamma} phi_v phi_w, exact P1 product formula
            let mut expected = 0.0;
            for (t, other) in mesh.tets().iter().enumerate() {
                if !cut.is_cut(t) {
                    continue;
                }
                let (Some(a), Some(b)) = (
                    other.iter().position(|&x| x == v),
                    other.iter().position(|&x| x == w),
                ) else {
                    continue;
                };
                let pts = mesh.tet_points(t);
                let phi = other.map(|x| cut.vertex_phi()[x]);
                for tri in split_tet(&pts, &phi).interface {
                    let area = crate::geometry::quadrature::triangle_area(&tri);
                    let fa: Vec<f64> = tri
                        .iter()
                        .map(|p| barycentric_coordinates(&pts, p)[a])
                        .collect();
                    let fb: Vec<f64> = tri
                        .iter()
                        .map(|p| barycentric_coordinates(&pts, p)[b])
                        .collect();
                    let cross: f64 = (0..3).map(|k| fa[k] * fb[k]).sum();
                    let integral =
                        area / 12.0 * (cross + fa.iter().sum::<f64>() * fb.iter().sum::<f64>());
                    expected -= alpha_bar / h(t) * integral;
                }
            }
            let got = (a2.matrix.get(i, j) - a1.matrix.get(i, j)) / 10.0;
            assert!(
                (got - expected).abs() < 1e-12 * (1.0 + expected.abs()),
                "{got} vs {expected}"
            );
            checked += 1;
        }
        assert!(checked > 5);
    }
}

#[test]
fn ghost_penalty_scales_with_diffusion_on_each_side() {
    let mesh = MeshHierarchy::standard(1).level(1).clone();
    let (cut, layout) = setup(&mesh, X0, ProblemKind::Interface);
    let assemble = |beta: f64, ghost_scaling: GhostScaling| {
        let c = ProblemCoefficients {
            beta,
            ghost_scaling,
            ..Default::default()
        };
        assemble_interface(&mesh, &cut, &layout, &c, &Zero)
            .unwrap()
            .matrix
            .to_dense()
    };
    let none = assemble(0.0, GhostScaling::Unit);
    let unit = assemble(0.1, GhostScaling::Unit) - &none;
    let weighted = assemble(0.1, GhostScaling::Diffusion) - &none;
    assert!(unit.abs().max() > 0.0);
    let coeffs = ProblemCoefficients::default();
    for side in Side::BOTH {
        let off = layout.block_offset(side);
        let n = layout.block(side).len();
        let u = unit.view((off, off), (n, n));
        let w = weighted.view((off, off), (n, n));
        assert!((w - u * coeffs.alpha(side)).abs().max() < 1e-12);
    }
}

#[test]
fn affine_functions_are_reproduced_by_the_interface_method() {
    let mesh = MeshHierarchy::standard(1).level(1).clone();
    let (cut, layout) = setup(&mesh, X0, ProblemKind::Interface);
    let coeffs = ProblemCoefficients {
        alpha2: 1.0,
        ..Default::default()
    };
    let g = Affine([0.3, 1.0, -2.0, 0.5]);
    let sys = assemble_interface(&mesh, &cut, &layout, &coeffs, &g).unwrap();
    let x = nodal_values(&mesh, &layout, |p| g.eval(p));
    let r: Vec<f64> = sys
        .matrix
        .matvec(&x)
        .iter()
        .zip(&sys.rhs)
        .map(|(a, b)| a - b)
        .collect();
    assert!(max_abs(&r) < 1e-10, "{}", max_abs(&r));
    assert!(sys.matrix.symmetry_defect() < 1e-10);
}

#[test]
fn fd_homogeneous_data_gives_zero_rhs() {
    let mesh = MeshHierarchy::standard(0).level(0).clone();
    let (cut, layout) = setup(&mesh, X0, ProblemKind::Fictitious);
    let sys = assemble_fd(
        &mesh,
        &cut,
        &layout,
        &ProblemCoefficients::unit_diffusion(10.0, 0.1),
        &Zero,
    )
    .unwrap();
    assert!(sys.rhs.iter().all(|&b| b == 0.0));
    assert!(sys.matrix.symmetry_defect() < 1e-10);
    assert!(min_eigenvalue(&sys.matrix) > 0.0);
}

#[test]
fn fd_reproduces_affine_solutions() {
    let mesh = MeshHierarchy::standard(1).level(1).clone();
    let (cut, layout) = setup(&mesh, X0, ProblemKind::Fictitious);
    let g = Affine([-0.2, 0.4, 0.1, 2.0]);
    let sys = assemble_fd(
        &mesh,
        &cut,
        &layout,
        &ProblemCoefficients::unit_diffusion(10.0, 0.1),
        &g,
    )
    .unwrap();
    let x = nodal_values(&mesh, &layout, |p| g.eval(p));
    let r: Vec<f64> = sys
        .matrix
        .matvec(&x)
        .iter()
        .zip(&sys.rhs)
        .map(|(a, b)| a - b)
        .collect();
    assert!(max_abs(&r) < 1e-9, "{}", max_abs(&r));
}

#[test]
fn l_has_the_documented_column_structure() {
    let mesh = MeshHierarchy::standard(1).level(1).clone();
    let (cut, layout) = setup(&mesh, X0, ProblemKind::Interface);
    let l = build_l(&layout).unwrap();
    assert_eq!(l.nrows(), l.ncols());
    assert!(l.values().iter().all(|&v| v == 1.0));
    let lt = l.transpose();
    for (k, &v) in layout.x0_vertices().iter().enumerate() {
        let (rows, _) = lt.row(k);
        let in_gamma = layout.x1_index(v).is_some();
        assert_eq!(rows.len(), if in_gamma { 2 } else { 1 });
        if in_gamma && cut.vertex_side(v) == Side::Inside {
            // node of I2^Gamma: phi_j on side 1 and phi_j^Gamma on side 2
            assert!(rows.contains(&layout.cut_dof(Side::Inside, v).unwrap()));
            assert!(rows.contains(&layout.cut_dof(Side::Outside, v).unwrap()));
        }
    }
    for k in 0..layout.n1() {
        assert_eq!(lt.row(layout.n0() + k).0.len(), 1);
    }
    // injective: every row is hit
    assert!((0..l.nrows()).all(|r| !l.row(r).0.is_empty()));
}

#[test]
fn l_image_matches_split_functions_pointwise() {
    let mesh = MeshHierarchy::standard(1).level(1).clone();
    let (cut, layout) = setup(&mesh, X0, ProblemKind::Interface);
    let l = build_l(&layout).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let x_hat: Vec<f64> = (0..l.ncols())
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    let u = l.matvec(&x_hat);
    let n0 = layout.n0();
    let mut checked = 0;
    while checked < 100 {
        let t = rng.random_range(0..mesh.num_tets());
        let side = if rng.random::<bool>() {
            Side::Inside
        } else {
            Side::Outside
        };
        if !cut.in_extended(t, side) {
            continue;
        }
        let tet = mesh.tets()[t];
        let pts = mesh.tet_points(t);
        let mut b: [f64; 3] = [rng.random(), rng.random(), rng.random()];
        b.sort_by(|p, q| p.partial_cmp(q).unwrap());
        let lam = [b[0], b[1] - b[0], b[2] - b[1], 1.0 - b[2]];
        let x: Point = std::array::from_fn(|c| (0..4).map(|i| lam[i] * pts[i][c]).sum());
        let lam = barycentric_coordinates(&pts, &x);
        let mut from_l = 0.0;
        let mut split = 0.0;
        for a in 0..4 {
            let v = tet[a];
            if let Some(d) = layout.cut_dof(side, v) {
                from_l += u[d] * lam[a];
            }
            if let Some(k) = layout.x0_index(v) {
                split += x_hat[k] * lam[a];
            }
            // Q_i u^Gamma: cut basis functions of nodes on the other side, supported on cut tets
            let other = match side {
                Side::Inside => cut.vertex_side(v) == Side::Outside,
                Side::Outside => cut.vertex_side(v) == Side::Inside,
            };
            if cut.is_cut(t) && other {
                if let Some(k) = layout.x1_index(v) {
                    split += x_hat[n0 + k] * lam[a];
                }
            }
        }
        assert!((from_l - split).abs() < 1e-13);
        checked += 1;
    }
}

fn interface_system(level: usize, center: Point) -> TransformedSystem {
    let h = MeshHierarchy::standard(level);
    let mesh = h.level(level);
    let (cut, layout) = setup(mesh, center, ProblemKind::Interface);
    let sys =
        assemble_interface(mesh, &cut, &layout, &ProblemCoefficients::default(), &Zero).unwrap();
    transform(&sys, &build_l(&layout).unwrap(), layout.n0()).unwrap()
}

#[test]
fn transformed_matrix_matches_matrix_free_product() {
    let ts = interface_system(1, X0);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let x: Vec<f64> = (0..ts.a_hat.ncols())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let lhs = ts.a_hat.bilinear(&x, &x);
        let lx = ts.l.matvec(&x);
        let rhs = ts.a.bilinear(&lx, &lx);
        assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs());
    }
    // block extraction identity
    let x: Vec<f64> = (0..ts.n0).map(|_| rng.random()).collect();
    let y: Vec<f64> = (0..ts.n1).map(|_| rng.random()).collect();
    let mut xe = x.clone();
    xe.resize(ts.n0 + ts.n1, 0.0);
    let mut ye = vec![0.0; ts.n0];
    ye.extend_from_slice(&y);
    let lhs = ts.a0.bilinear(&x, &x) + ts.a1.bilinear(&y, &y);
    let rhs = ts.a_hat.bilinear(&xe, &xe) + ts.a_hat.bilinear(&ye, &ye);
    assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
    assert!(ts.a_hat.symmetry_defect() < 1e-10);
}

#[test]
fn transformed_matrix_is_spd_on_coarse_levels() {
    for level in 0..=1 {
        let ts = interface_system(level, X0);
        assert!(min_eigenvalue(&ts.a_hat) > 0.0, "level {level}");
        assert!(ts.d1.iter().all(|&d| d > 0.0));
    }
}

#[test]
fn without_cuts_the_transform_is_a_permutation() {
    let mesh = MeshHierarchy::standard(0).level(0).clone();
    let (cut, layout) = setup(&mesh, [10.0, 0.0, 0.0], ProblemKind::Interface);
    let sys =
        assemble_interface(&mesh, &cut, &layout, &ProblemCoefficients::default(), &Zero).unwrap();
    let l = build_l(&layout).unwrap();
    let ts = transform(&sys, &l, layout.n0()).unwrap();
    assert_eq!(ts.n1, 0);
    let p = l.to_dense();
    let expected = p.transpose() * sys.matrix.to_dense() * p;
    assert_eq!(ts.a_hat.to_dense(), expected);
}

#[test]
fn fd_transform_is_identity() {
    let mesh = MeshHierarchy::standard(1).level(1).clone();
    let (cut, layout) = setup(&mesh, X0, ProblemKind::Fictitious);
    let l = build_l_fd(&layout).unwrap();
    assert_eq!(l, CsrMatrix::identity(layout.num_dofs()));
    let sys = assemble_fd(
        &mesh,
        &cut,
        &layout,
        &ProblemCoefficients::unit_diffusion(10.0, 0.1),
        &Zero,
    )
    .unwrap();
    let ts = transform(&sys, &l, layout.n0()).unwrap();
    assert_eq!(ts.a_hat, sys.matrix);
    assert!(build_l(&layout).is_err());
}

#[test]
fn invalid_coefficients_are_rejected() {
    let mesh = MeshHierarchy::standard(0).level(0).clone();
    let (cut, layout) = setup(&mesh, X0, ProblemKind::Interface);
    let bad = ProblemCoefficients {
        gamma: 0.0,
        ..Default::default()
    };
    assert!(assemble_interface(&mesh, &cut, &layout, &bad, &Zero).is_err());
    assert!(assemble_fd(&mesh, &cut, &layout, &ProblemCoefficients::default(), &Zero).is_err());
}
