use polyspline::assembly::{assemble_rhs, assemble_stiffness, assemble_system, QUAD_DEGREE};
use polyspline::discretization::{Discretization, PolySpline, Space, Q1, Q2};
use polyspline::geomap::validate_geomap;
use polyspline::geometry::{signed_area, Point};
use polyspline::pde::Poisson;
use polyspline::poly::PolyOptions;
use polyspline::preprocess::generate::{grid_with_cross, unit_grid};
use polyspline::preprocess::HybridMesh;
use polyspline::problem::{Problem, QuadraticField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn sheared_hybrid(disc: &dyn Discretization) -> Space {
    let hm = HybridMesh::new(grid_with_cross(8, 0.3).unwrap());
    disc.build(&hm, &Poisson, &PolyOptions::default()).unwrap()
}

fn value(space: &Space, f: usize, xh: &Point, u: &[f64]) -> (f64, Point) {
    let e = space.eval_param(f, xh).unwrap();
    (space.globals(f).iter().zip(&e.values).map(|(&g, v)| u[g] * v).sum(), e.x)
}

#[test]
fn quad_functions_are_continuous_across_edges() {
    for disc in [&PolySpline as &dyn Discretization, &Q2, &Q1] {
        let space = sheared_hybrid(disc);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u: Vec<f64> = (0..space.n_dofs()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mesh = &space.mesh;
        let mut checked = 0;
        for f in 0..mesh.n_faces() {
            if space.quads[f].is_none() {
                continue;
            }
            for i in 0..4 {
                let Some(twin) = mesh.he_twin(mesh.halfedge(f, i)) else { continue };
                let g = mesh.he_face(twin);
                if space.quads[g].is_none() {
                    continue;
                }
                for t in [0.0, 0.2, 0.5, 0.77, 1.0] {
                    let (a, xa) = value(&space, f, &space.edge_point(f, i, t), &u);
                    let (b, xb) = value(&space, g, &space.edge_point(g, mesh.he_local(twin), 1.0 - t), &u);
                    assert!((xa - xb).norm() < 1e-12, "{}: geometry gap on cell {f} edge {i}", disc.name());
                    assert!((a - b).abs() < 1e-12, "{}: jump {:e} on cell {f} edge {i}", disc.name(), a - b);
                    checked += 1;
                }
            }
        }
        assert!(checked > 500);
    }
}

#[test]
fn geometric_map_interpolates_vertices_and_is_positive() {
    let space = sheared_hybrid(&PolySpline);
    let report = validate_geomap(&space.geomap, &space.quads, 6);
    assert!(report.nonpositive_cells.is_empty());
    assert!(report.min_det > 0.0);
    let corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    for f in 0..space.n_cells() {
        if space.quads[f].is_none() {
            continue;
        }
        for (i, &v) in space.mesh.face(f).iter().enumerate() {
            let x = space.eval_param(f, &Point::new(corners[i].0, corners[i].1)).unwrap().x;
            assert!((x - space.mesh.vertex(v)).norm() < 1e-12, "cell {f} corner {i}");
        }
    }
}

#[test]
fn stiffness_is_symmetric_and_annihilates_constants() {
    for disc in [&PolySpline as &dyn Discretization, &Q2] {
        let space = sheared_hybrid(disc);
        let k = assemble_stiffness(&space, &Poisson, QUAD_DEGREE).unwrap();
        let scale = k.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(k.asymmetry() <= 1e-12 * scale, "{}", disc.name());
        let ones = vec![1.0; space.n_dofs()];
        let row_sums = k.mul_vec(&ones);
        assert!(row_sums.iter().all(|s| s.abs() <= 1e-11 * scale), "{}", disc.name());
    }
}

#[test]
fn load_of_unit_source_sums_to_area() {
    let space = sheared_hybrid(&PolySpline);
    let b = assemble_rhs(&space, &|_: &Point| [1.0, 0.0], 1, QUAD_DEGREE).unwrap();
    let area: f64 = (0..space.mesh.n_faces()).map(|f| signed_area(&space.mesh.face_points(f))).sum();
    assert!((b.iter().sum::<f64>() - area).abs() < 1e-12 * area);
}

#[test]
fn q1_unit_square_matrix_matches_closed_form() {
    // unit square: 2/3 on the diagonal, -1/6 to edge neighbors, -1/3 across
    let space = Q1.build(&HybridMesh::new(unit_grid(1)), &Poisson, &PolyOptions::default()).unwrap();
    let k = assemble_stiffness(&space, &Poisson, QUAD_DEGREE).unwrap().to_dense();
    assert_eq!(k.nrows(), 4);
    for i in 0..4 {
        assert!((k[(i, i)] - 2.0 / 3.0).abs() < 1e-14);
        let mut off: Vec<f64> = (0..4).filter(|&j| j != i).map(|j| k[(i, j)]).collect();
        off.sort_by(f64::total_cmp);
        for (got, want) in off.iter().zip([-1.0 / 3.0, -1.0 / 6.0, -1.0 / 6.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }
}

#[test]
fn q1_condition_number_grows_like_h_squared() {
    let problem = Problem::manufactured(Arc::new(Poisson), Arc::new(QuadraticField::scalar([0.0; 6])));
    let cond = |n: usize| {
        let space = Q1.build(&HybridMesh::new(unit_grid(n)), &Poisson, &PolyOptions::default()).unwrap();
        assemble_system(&space, &problem, QUAD_DEGREE).unwrap().condition_number().unwrap()
    };
    let ratio = cond(16) / cond(8);
    assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
}
