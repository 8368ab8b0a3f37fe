//! Uniform rejection sampling and support functions.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::body::ConvexBody;
use crate::error::{GeomError, Result};

/// Accepted points plus the observed acceptance rate of the bounding-box
/// rejection loop.
#[derive(Debug, Clone)]
pub struct SampleResult {
    pub points: Vec<DVector<f64>>,
    pub acceptance_rate: f64,
}

const MIN_ACCEPTANCE: f64 = 1e-4;

/// `count` i.i.d. uniform points in `body`, deterministic given `seed`.
pub fn sample_uniform(body: &ConvexBody, count: usize, seed: u64) -> Result<SampleResult> {
    let n = body.dim();
    let (lo, hi) = body.bounding_box();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(count);
    let mut attempts: u64 = 0;
    let mut candidate = DVector::zeros(n);
    while points.len() < count {
        attempts += 1;
        for i in 0..n {
            candidate[i] = rng.gen_range(lo[i]..hi[i]);
        }
        if body.contains(&candidate, 0.0) {
            points.push(candidate.clone());
        }
        if attempts >= 50_000 && (points.len() as f64) < MIN_ACCEPTANCE * attempts as f64 {
            return Err(GeomError::LowAcceptance(points.len() as f64 / attempts as f64));
        }
    }
    Ok(SampleResult {
        acceptance_rate: points.len() as f64 / attempts as f64,
        points,
    })
}

/// Support function h_K(u) = max <x,u> over K, with one maximizing point.
/// Vertex ties on polytopes resolve to the lowest index.
pub fn support(body: &ConvexBody, u: &DVector<f64>) -> (f64, DVector<f64>) {
    match body {
        ConvexBody::Polytope(p) => {
            let mut best = f64::NEG_INFINITY;
            let mut arg = p.vertices()[0].clone();
            for v in p.vertices() {
                let val = u.dot(v);
                if val > best {
                    best = val;
                    arg = v.clone();
                }
            }
            (best, arg)
        }
        ConvexBody::Ball { center, radius } => {
            let val = u.dot(center) + radius;
            (val, center + u * *radius)
        }
        ConvexBody::Ellipsoid { center, shape } => {
            // h(u) = <c,u> + sqrt(u^T A u); maximizer c + A u / sqrt(u^T A u).
            let au = shape * u;
            let q = u.dot(&au).sqrt();
            (u.dot(center) + q, center + au / q)
        }
        ConvexBody::CapModel(spec) => {
            let n = spec.n;
            let u_axis = u[n - 1];
            let u_tan = u.rows(0, n - 1).into_owned();
            let tan_norm = u_tan.norm();
            let rim = spec.max_tangential_radius();
            let dir = if tan_norm > 1e-300 {
                &u_tan / tan_norm
            } else {
                DVector::zeros(n - 1)
            };
            let point_at = |rho: f64, y: f64| {
                let mut x = DVector::zeros(n);
                for i in 0..n - 1 {
                    x[i] = dir[i] * rho;
                }
                x[n - 1] = y;
                x
            };
            if u_axis >= 0.0 {
                // Tangential extent grows with height, so the top disk wins.
                (u_axis * spec.a + tan_norm * rim, point_at(rim, spec.a))
            } else {
                // Maximize the concave profile rho -> tan_norm rho + u_axis y_b(rho).
                let f = |rho: f64| tan_norm * rho + u_axis * spec.boundary_height_radial(rho);
                let (mut lo, mut hi) = (0.0f64, rim);
                for _ in 0..200 {
                    let m1 = lo + (hi - lo) / 3.0;
                    let m2 = hi - (hi - lo) / 3.0;
                    if f(m1) < f(m2) {
                        lo = m1;
                    } else {
                        hi = m2;
                    }
                }
                let rho = 0.5 * (lo + hi);
                (f(rho), point_at(rho, spec.boundary_height_radial(rho)))
            }
        }
    }
}
