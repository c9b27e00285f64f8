use std::sync::Arc;

use polyspline::assembly::{assemble_system, error_norms, solve, QUAD_DEGREE};
use polyspline::discretization::{Discretization, PolySpline, Q2};
use polyspline::mesh::CellClass;
use polyspline::pde::{Elasticity, Pde, Poisson};
use polyspline::poly::PolyOptions;
use polyspline::preprocess::generate::grid_with_cross;
use polyspline::preprocess::HybridMesh;
use polyspline::problem::{Problem, QuadraticField};

fn quadratic() -> QuadraticField {
    // x^2 + xy - y^2 + x + 2
    QuadraticField::scalar([2.0, 1.0, 0.0, 1.0, 1.0, -1.0])
}

fn run(disc: &dyn Discretization, hm: &HybridMesh, pde: Arc<dyn Pde>, exact: QuadraticField) -> f64 {
    let space = disc.build(hm, pde.as_ref(), &PolyOptions::default()).unwrap();
    let problem = Problem::manufactured(pde.clone(), Arc::new(exact));
    let sys = assemble_system(&space, &problem, QUAD_DEGREE).unwrap();
    let u = solve(&sys).unwrap();
    assert!(sys.relative_residual(&u) < 1e-9);
    let e = error_norms(&space, &u, pde.components(), &exact, 8).unwrap();
    e.linf
}

#[test]
fn sheared_hybrid_mesh_has_all_cell_kinds() {
    let hm = HybridMesh::new(grid_with_cross(8, 0.3).unwrap());
    let c = hm.classify().unwrap();
    for k in [CellClass::SplineCompatible, CellClass::Q2Quad, CellClass::Polygon] {
        assert!(c.contains(&k));
    }
}

#[test]
fn quadratic_patch_test_poisson() {
    let hm = HybridMesh::new(grid_with_cross(8, 0.3).unwrap());
    let e = run(&PolySpline, &hm, Arc::new(Poisson), quadratic());
    assert!(e <= 1e-7, "polyspline linf {e:e}");
    let e = run(&Q2, &hm, Arc::new(Poisson), quadratic());
    assert!(e <= 1e-7, "q2 linf {e:e}");
}

#[test]
fn quadratic_patch_test_elasticity() {
    let hm = HybridMesh::new(grid_with_cross(8, 0.3).unwrap());
    let exact = QuadraticField::vector([0.1, 1.0, 0.5, 0.3, -0.2, 0.4], [-0.3, 0.2, -1.0, 0.6, 0.1, -0.5]);
    let e = run(&PolySpline, &hm, Arc::new(Elasticity::from_young(200.0, 0.35)), exact);
    assert!(e <= 1e-7, "elasticity linf {e:e}");
}
