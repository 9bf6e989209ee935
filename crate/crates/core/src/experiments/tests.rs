use std::fs::File;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::assembly::ProblemData;
use crate::geometry::Side;

const CENTER: Point = [0.001, 0.002, 0.003];

fn random_unit_vectors(n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| loop {
            let v: Point = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if r > 0.1 && r <= 1.0 {
                break v.map(|c| c / r);
            }
        })
        .collect()
}

/// Fourth-order central difference of the Laplacian.
fn fd_laplacian(f: impl Fn(&Point) -> f64, x: &Point, h: f64) -> f64 {
    (0..3)
        .map(|k| {
            let at = |s: f64| {
                let mut y = *x;
                y[k] += s * h;
                f(&y)
            };
            (-at(2.0) + 16.0 * at(1.0) - 30.0 * at(0.0) + 16.0 * at(-1.0) - at(-2.0))
                / (12.0 * h * h)
        })
        .sum()
}

fn fd_gradient(f: impl Fn(&Point) -> f64, x: &Point, h: f64) -> Point {
    std::array::from_fn(|k| {
        let at = |s: f64| {
            let mut y = *x;
            y[k] += s * h;
            f(&y)
        };
        (-at(2.0) + 8.0 * at(1.0) - 8.0 * at(-1.0) + at(-2.0)) / (12.0 * h)
    })
}

#[test]
fn interface_solution_satisfies_both_jump_conditions() {
    let u = InterfaceSolution::new(CENTER, 1.0, 10.0);
    for n in random_unit_vectors(10_000, 1) {
        let x = [CENTER[0] + n[0], CENTER[1] + n[1], CENTER[2] + n[2]];
        let jump = u.value(Side::Inside, &x) - u.value(Side::Outside, &x);
        assert!(jump.abs() <= 1e-12, "[u] = {jump:e}");
        let g1 = u.gradient(Side::Inside, &x);
        let g2 = u.gradient(Side::Outside, &x);
        let flux: f64 = (0..3).map(|k| (1.0 * g1[k] - 10.0 * g2[k]) * n[k]).sum();
        assert!(flux.abs() <= 1e-12, "[alpha du/dn] = {flux:e}");
    }
}

#[test]
fn sources_equal_the_negative_weighted_laplacian() {
    let iface = InterfaceSolution::new(CENTER, 1.0, 10.0);
    let fd = FictitiousSolution::new(CENTER);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let x: Point = std::array::from_fn(|_| rng.random_range(-1.5..1.5));
        for (side, alpha) in [(Side::Inside, 1.0), (Side::Outside, 10.0)] {
            let lap = fd_laplacian(|y| iface.value(side, y), &x, 1e-2);
            let f = iface.source(side, &x);
            assert!(
                (f + alpha * lap).abs() <= 1e-5 * (1.0 + f.abs()),
                "{f} vs {}",
                -alpha * lap
            );
        }
        let lap = fd_laplacian(|y| fd.value(Side::Inside, y), &x, 1e-2);
        let f = fd.source(Side::Inside, &x);
        assert!((f + lap).abs() <= 1e-5 * (1.0 + f.abs()));
    }
}

#[test]
fn gradients_match_finite_differences() {
    let solutions: [Box<dyn ExactSolution>; 3] = [
        Box::new(InterfaceSolution::new(CENTER, 1.0, 10.0)),
        Box::new(FictitiousSolution::new(CENTER)),
        Box::new(AffineSolution([0.5, 1.0, -2.0, 3.0])),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let x: Point = std::array::from_fn(|_| rng.random_range(-1.5..1.5));
        for u in &solutions {
            for side in Side::BOTH {
                let g = u.gradient(side, &x);
                let h = fd_gradient(|y| u.value(side, y), &x, 1e-3);
                for k in 0..3 {
                    assert!((g[k] - h[k]).abs() <= 1e-8 * (1.0 + g[k].abs()));
                }
            }
        }
    }
}

#[test]
fn affine_solutions_are_reproduced() {
    let affine = AffineSolution([0.3, 1.0, -0.5, 2.0]);
    let settings = PreconditionerSettings::default();
    for kind in [ProblemKind::Interface, ProblemKind::Fictitious] {
        let d = Discretization::with_solution(
            MeshHierarchy::standard(1),
            kind,
            CENTER,
            &ProblemCoefficients::unit_diffusion(10.0, 0.1),
            4,
            Box::new(affine),
        )
        .unwrap();
        let (x, _) = d
            .solve(PreconditionerKind::BlockExact, &settings, 1e-14, 500)
            .unwrap();
        let e = d.errors(&x).unwrap();
        assert!(e.l2 <= 1e-10 && e.h1 <= 1e-10, "{kind:?}: {e:?}");
    }
}

#[test]
fn convergence_order_of_halved_errors() {
    assert!((convergence_order(4.0, 1.0) - 2.0).abs() < 1e-15);
    assert!((convergence_order(1.0, 0.5) - 1.0).abs() < 1e-15);
}

fn small_config() -> ExperimentConfig {
    ExperimentConfig {
        max_level: 1,
        delta_level: 1,
        deltas: vec![0.0, 0.02],
        ..ExperimentConfig::default()
    }
}

#[test]
fn interface_study_is_deterministic() {
    let cfg = small_config();
    let a = run_interface_study(&cfg).unwrap();
    let b = run_interface_study(&cfg).unwrap();
    assert_eq!(a.len(), 2);
    for (ra, rb) in a.iter().zip(&b) {
        assert_eq!((ra.n0, ra.n1), (rb.n0, rb.n1));
        assert_eq!(ra.errors, rb.errors);
        assert_eq!(ra.kappa, rb.kappa);
        for kind in PreconditionerKind::ALL {
            assert_eq!(ra.iterations_for(kind), rb.iterations_for(kind));
        }
    }
    assert_eq!((a[0].n0, a[0].n1), (27, 27));
    assert!(a[1].errors.unwrap().l2 < a[0].errors.unwrap().l2);
    assert!(a[1].l2_order.is_some() && a[0].l2_order.is_none());
}

#[test]
fn delta_sweep_and_condition_study_cover_all_rows() {
    let cfg = ExperimentConfig {
        preconditioners: vec![PreconditionerKind::BlockExact],
        ..small_config()
    };
    let sweep = run_delta_sweep(&cfg).unwrap();
    assert_eq!(sweep.len(), 2);
    assert!(sweep
        .iter()
        .all(|r| r.iterations_for(PreconditionerKind::BlockExact).is_some()));
    let cond = condition_study(&cfg).unwrap();
    assert_eq!(cond.len(), 4);
    assert_eq!(cond[2].delta, Some(0.0));
    for r in &cond {
        assert!(r.converged);
        assert!(r.kappa_a >= r.kappa_block && r.kappa_block >= 1.0 && r.kappa_a1_scaled >= 1.0);
    }
}

#[test]
fn removing_the_ghost_penalty_worsens_conditioning() {
    let cfg = ExperimentConfig {
        preconditioners: vec![],
        ..small_config()
    };
    let stabilized = run_interface_study(&cfg).unwrap();
    let plain = run_interface_study(&cfg.clone().unstabilized()).unwrap();
    assert!(plain[1].kappa.unwrap() >= stabilized[1].kappa.unwrap());
    assert!(plain[1].errors.is_none());
}

#[test]
fn fd_study_uses_fictitious_dimensions() {
    let rows = run_fd_study(&ExperimentConfig {
        preconditioners: vec![PreconditionerKind::BlockMgSgs],
        condition: false,
        ..small_config()
    })
    .unwrap();
    assert_eq!((rows[0].n0, rows[0].n1), (7, 44));
    assert_eq!((rows[1].n0, rows[1].n1), (81, 140));
    assert!(rows[1].kappa.is_none());
}

#[test]
fn config_round_trips_through_toml() {
    let cfg = ExperimentConfig::fictitious().unstabilized();
    let text = cfg.to_toml_string().unwrap();
    assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), cfg);
    assert_eq!(
        ExperimentConfig::from_toml_str("").unwrap(),
        ExperimentConfig::default()
    );
    let partial =
        ExperimentConfig::from_toml_str("max_level = 2\n[coefficients]\nbeta = 0.0\n").unwrap();
    assert_eq!(partial.max_level, 2);
    assert_eq!(partial.coefficients.beta, 0.0);
    assert_eq!(
        partial.coefficients.gamma,
        ProblemCoefficients::default().gamma
    );
}

#[test]
fn config_rejects_bad_input() {
    for text in [
        "levels = 3",
        "tol = 0.0",
        "quadrature_order = 9",
        "max_iter = 0",
        "max_level = 7",
    ] {
        assert!(ExperimentConfig::from_toml_str(text).is_err(), "{text}");
    }
    assert_eq!(
        ExperimentConfig::fictitious()
            .preconditioner_settings()
            .a1_sweeps,
        3
    );
    assert_eq!(
        ExperimentConfig::default()
            .preconditioner_settings()
            .a1_sweeps,
        1
    );
}

#[test]
fn tables_render_csv_and_markdown() {
    let mut t = Table::new(["level", "P_A"]);
    t.push(vec!["0".into(), "14".into()]);
    t.push(vec!["1".into(), "22".into()]);
    assert_eq!(t.to_csv().unwrap(), "level,P_A\n0,14\n1,22\n");
    let md = t.to_markdown();
    let lines: Vec<&str> = md.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], "| level | P_A |");
    assert_eq!(lines[1], "| ----: | --: |");
    assert_eq!(lines[3], "|     1 |  22 |");
    let dir = tempfile::tempdir().unwrap();
    write_csv(&t, &dir.path().join("t.csv")).unwrap();
    write_markdown(&t, &dir.path().join("t.md")).unwrap();
    assert_eq!(
        std::fs::read_to_string(dir.path().join("t.md")).unwrap(),
        md
    );
}

#[test]
fn level_table_has_one_column_per_preconditioner() {
    let rows = run_interface_study(&ExperimentConfig {
        max_level: 0,
        ..ExperimentConfig::default()
    })
    .unwrap();
    let t = Table::from_levels(&rows);
    assert_eq!(t.headers.len(), 9 + 4);
    assert_eq!(&t.headers[9..], ["SGS", "P_A", "P_D", "P_B"]);
    assert_eq!(t.rows[0][4], "-");
}

#[test]
fn export_writes_every_matrix_and_the_mesh() {
    let d = Discretization::new(
        MeshHierarchy::standard(0),
        ProblemKind::Interface,
        CENTER,
        &ProblemCoefficients::default(),
        4,
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = d.export(dir.path()).unwrap();
    assert_eq!(files.len(), 7);
    let a_hat = std::fs::read_to_string(dir.path().join("A_hat.mtx")).unwrap();
    let header: Vec<usize> = a_hat
        .lines()
        .nth(1)
        .unwrap()
        .split(' ')
        .map(|t| t.parse().unwrap())
        .collect();
    assert_eq!(header, [54, 54, d.system.a_hat.nnz()]);
    let (verts, tets) = crate::mesh::read_ascii(std::io::BufReader::new(
        File::open(dir.path().join("mesh.txt")).unwrap(),
    ))
    .unwrap();
    assert_eq!((verts.len(), tets.len()), (125, 384));
    let split = std::fs::read_to_string(dir.path().join("split_vertices.txt")).unwrap();
    assert_eq!(split.lines().filter(|l| l.starts_with("x1")).count(), 27);
}
