//! Sensitivity of the basis to element shape: Franke is projected (least
//! squares) onto the Q2 functions of a badly shaped quad and onto the polygon
//! functions fitted to the same quad's boundary traces, and the gradient
//! errors are compared.

use anyhow::Result;
use nalgebra::{DMatrix, DVector};
use polyspline::bases::lagrange::lagrange_basis;
use polyspline::geometry::{self, pt, Mat2, Point};
use polyspline::poly::{PolyBasis, PolyOptions, PolySetup};
use polyspline::quadrature::{quad_rule_polygon, quad_rule_square};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::franke::franke_2d;

/// Side length and lower-left corner of the reference square the shapes are
/// built from.
const SIZE: f64 = 0.25;
const ORIGIN: (f64, f64) = (0.35, 0.4);
const ERROR_DEGREE: usize = 14;
/// Samples per direction for the maximum gradient error.
const LINF_SAMPLES: usize = 21;
/// Index of the interior Q2 node, which has no boundary trace.
const BUBBLE: usize = 4;

#[derive(Clone, Debug, Serialize)]
pub struct ShapeRecord {
    pub name: String,
    pub min_angle_deg: f64,
    pub max_angle_deg: f64,
    pub q2_grad_l2: f64,
    pub q2_grad_linf: f64,
    pub poly_grad_l2: f64,
    pub poly_grad_linf: f64,
    /// Q2 error over polygon error.
    pub ratio_l2: f64,
    pub ratio_linf: f64,
}

/// Shapes on the unit square; mapped to the physical location later.
pub fn shape_set(seed: u64, random: usize) -> Vec<(String, [Point; 4])> {
    let mut out = vec![("square".to_string(), [pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)])];
    // one corner pulled along the diagonal towards a straight angle
    for t in [0.3, 0.4, 0.45, 0.48] {
        out.push((format!("pulled-corner-{t}"), [pt(t, t), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)]));
    }
    // trapezoids with a nearly collapsed edge
    for s in [0.1, 0.03] {
        out.push((format!("trapezoid-{s}"), [pt(0.0, 0.0), pt(1.0, 0.0), pt(0.5 + s, 1.0), pt(0.5 - s, 1.0)]));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let corners = [pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)];
    let mut made = 0;
    while made < random {
        let q: Vec<Point> = corners.iter().map(|c| c + Point::new(rng.random_range(-0.45..0.45), rng.random_range(-0.45..0.45))).collect();
        let q = [q[0], q[1], q[2], q[3]];
        let angles = corner_angles(&q);
        let convex = (0..4).all(|i| geometry::orient(&q[i], &q[(i + 1) % 4], &q[(i + 2) % 4]) > 0.0);
        // keep only clearly distorted ones
        if convex && angles.iter().cloned().fold(0.0, f64::max) > 150.0 {
            out.push((format!("random-{made}"), q));
            made += 1;
        }
    }
    out
}

fn corner_angles(q: &[Point; 4]) -> [f64; 4] {
    let mut a = [0.0; 4];
    for i in 0..4 {
        let (p, c, n) = (q[(i + 3) % 4], q[i], q[(i + 1) % 4]);
        let (u, v) = (p - c, n - c);
        a[i] = geometry::cross(&v, &u).atan2(u.dot(&v)).to_degrees().rem_euclid(360.0);
    }
    a
}

fn bilinear(q: &[Point; 4], u: f64, v: f64) -> (Point, Mat2) {
    let x = q[0] * ((1.0 - u) * (1.0 - v)) + q[1] * (u * (1.0 - v)) + q[2] * (u * v) + q[3] * ((1.0 - u) * v);
    let du = (q[1] - q[0]) * (1.0 - v) + (q[2] - q[3]) * v;
    let dv = (q[3] - q[0]) * (1.0 - u) + (q[2] - q[1]) * u;
    (x, Mat2::from_columns(&[du, dv]))
}

/// Parametric point of edge `e` at parameter `t` (counterclockwise corners).
fn edge_param(e: usize, t: f64) -> Point {
    match e {
        0 => pt(t, 0.0),
        1 => pt(1.0, t),
        2 => pt(1.0 - t, 1.0),
        _ => pt(0.0, 1.0 - t),
    }
}

/// Least-squares coefficients from the Gram system of sampled functions.
fn project(samples: &[(Vec<f64>, f64, f64)]) -> Result<DVector<f64>> {
    let n = samples[0].0.len();
    let mut g = DMatrix::zeros(n, n);
    let mut b = DVector::zeros(n);
    for (v, w, f) in samples {
        for i in 0..n {
            b[i] += w * v[i] * f;
            for j in 0..n {
                g[(i, j)] += w * v[i] * v[j];
            }
        }
    }
    let svd = g.svd(true, true);
    let tol = 1e-13 * svd.singular_values.max();
    svd.solve(&b, tol).map_err(|e| anyhow::anyhow!("projection failed: {e}"))
}

/// Gradient errors (L2, max) of the Q2 projection.
fn q2_errors(q: &[Point; 4]) -> Result<(f64, f64)> {
    let rule = quad_rule_square(ERROR_DEGREE);
    let (mut v, mut g) = (Vec::new(), Vec::new());
    let mut samples = Vec::new();
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let (x, j) = bilinear(q, p.x, p.y);
        lagrange_basis(2, p, &mut v, &mut g);
        samples.push((v.clone(), w * j.determinant(), franke_2d(x.x, x.y).0));
    }
    let c = project(&samples)?;
    let grad_error = |p: &Point, v: &mut Vec<f64>, g: &mut Vec<Point>| -> Result<(f64, f64)> {
        let (x, j) = bilinear(q, p.x, p.y);
        lagrange_basis(2, p, v, g);
        let inv_t = j.try_inverse().ok_or_else(|| anyhow::anyhow!("degenerate bilinear map"))?.transpose();
        let gh = g.iter().zip(c.iter()).fold(Point::zeros(), |acc, (gi, ci)| acc + inv_t * gi * *ci);
        Ok(((gh - franke_2d(x.x, x.y).1).norm(), j.determinant()))
    };
    let mut l2 = 0.0;
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let (e, det) = grad_error(p, &mut v, &mut g)?;
        l2 += w * det * e * e;
    }
    let mut linf = 0.0f64;
    for i in 0..LINF_SAMPLES {
        for k in 0..LINF_SAMPLES {
            let s = (LINF_SAMPLES - 1) as f64;
            let p = pt(i as f64 / s, k as f64 / s);
            // the corner of a straight angle has a singular map; stay inside
            let p = pt(0.5 + (p.x - 0.5) * 0.999, 0.5 + (p.y - 0.5) * 0.999);
            linf = linf.max(grad_error(&p, &mut v, &mut g)?.0);
        }
    }
    Ok((l2.sqrt(), linf))
}

/// Polygon functions fitted to the traces of the quad's eight boundary Q2 functions.
pub fn fit_polygon_from_q2(q: &[Point; 4], opts: &PolyOptions) -> Result<PolyBasis> {
    let setup = PolySetup::new(0, q.to_vec(), opts, 8)?;
    let (mut v, mut g) = (Vec::new(), Vec::new());
    let locals: Vec<usize> = (0..9).filter(|&l| l != BUBBLE).collect();
    let traces = DMatrix::from_fn(setup.collocation.len(), locals.len(), |i, j| {
        let c = &setup.collocation[i];
        lagrange_basis(2, &edge_param(c.edge, c.t), &mut v, &mut g);
        v[locals[j]]
    });
    Ok(PolyBasis::fit(setup, locals, &traces, &[], &DMatrix::zeros(0, 8))?)
}

/// Gradient errors (L2, max) of the projection onto the polygon functions.
fn poly_errors(q: &[Point; 4], opts: &PolyOptions) -> Result<(f64, f64)> {
    let basis = fit_polygon_from_q2(q, opts)?;
    let rule = quad_rule_polygon(&basis.setup.points, &basis.setup.star_center, ERROR_DEGREE)?;
    let (mut v, mut g) = (Vec::new(), Vec::new());
    let samples: Vec<(Vec<f64>, f64, f64)> = rule
        .points
        .iter()
        .zip(&rule.weights)
        .map(|(x, w)| {
            basis.eval(x, &mut v, &mut g);
            (v.clone(), *w, franke_2d(x.x, x.y).0)
        })
        .collect();
    let c = project(&samples)?;
    let mut grad_error = |x: &Point| {
        basis.eval(x, &mut v, &mut g);
        let gh = g.iter().zip(c.iter()).fold(Point::zeros(), |acc, (gi, ci)| acc + gi * *ci);
        (gh - franke_2d(x.x, x.y).1).norm()
    };
    let l2: f64 = rule.points.iter().zip(&rule.weights).map(|(x, w)| w * grad_error(x).powi(2)).sum();
    let mut linf = 0.0f64;
    for i in 0..LINF_SAMPLES {
        for k in 0..LINF_SAMPLES {
            let s = (LINF_SAMPLES - 1) as f64;
            let (x, _) = bilinear(q, i as f64 / s, k as f64 / s);
            linf = linf.max(grad_error(&x));
        }
    }
    Ok((l2.sqrt(), linf))
}

pub fn run_resilience(config: &ExperimentConfig) -> Result<Vec<ShapeRecord>> {
    let mut opts = config.poly_options()?;
    opts.constraints = polyspline::poly::ConstraintMode::None;
    let offset = Point::new(ORIGIN.0, ORIGIN.1);
    shape_set(config.seed, 8)
        .into_iter()
        .map(|(name, unit)| {
            let q = unit.map(|p| offset + p * SIZE);
            let angles = corner_angles(&q);
            let (q2_l2, q2_linf) = q2_errors(&q)?;
            let (p_l2, p_linf) = poly_errors(&q, &opts)?;
            Ok(ShapeRecord {
                name,
                min_angle_deg: angles.iter().cloned().fold(f64::INFINITY, f64::min),
                max_angle_deg: angles.iter().cloned().fold(0.0, f64::max),
                q2_grad_l2: q2_l2,
                q2_grad_linf: q2_linf,
                poly_grad_l2: p_l2,
                poly_grad_linf: p_linf,
                ratio_l2: q2_l2 / p_l2,
                ratio_linf: q2_linf / p_linf,
            })
        })
        .collect()
}
