//! Exact moment integration: simplex closed forms, fan triangulation,
//! halfspace clipping, and per-variant body moments.

use nalgebra::{DMatrix, DVector};

use crate::body::{ConvexBody, Halfspace, MomentData, Simplex, VPolytope};
use crate::error::{GeomError, Result};
use crate::quad;

/// Volume of the unit ball in R^k, via v_k = v_{k-2} * 2 pi / k.
pub fn unit_ball_volume(k: usize) -> f64 {
    match k {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(k - 2) * 2.0 * std::f64::consts::PI / k as f64,
    }
}

/// Exact moments of a simplex:
/// volume |det|/n!, first moment = volume * vertex mean, second moment
/// Vol * (sum_k v_k v_k^T + (sum_k v_k)(sum_k v_k)^T) / ((n+1)(n+2)).
pub fn simplex_moments(s: &Simplex) -> Result<MomentData> {
    let n = s.vertices[0].len();
    if s.vertices.len() != n + 1 {
        return Err(GeomError::DegenerateInput(format!(
            "simplex in R^{n} needs {} vertices, got {}",
            n + 1,
            s.vertices.len()
        )));
    }
    let base = &s.vertices[0];
    let mut edges = DMatrix::zeros(n, n);
    for (c, v) in s.vertices[1..].iter().enumerate() {
        let d = v - base;
        for r in 0..n {
            edges[(r, c)] = d[r];
        }
    }
    let mut volume = edges.lu().determinant().abs();
    for k in 2..=n {
        volume /= k as f64;
    }
    if volume < 1e-300 {
        return Err(GeomError::DegenerateInput("degenerate simplex".into()));
    }

    let vertex_sum: DVector<f64> = s
        .vertices
        .iter()
        .fold(DVector::zeros(n), |acc, v| acc + v);
    let first_moment = &vertex_sum * (volume / (n as f64 + 1.0));

    let mut gram = DMatrix::zeros(n, n);
    for v in &s.vertices {
        gram += v * v.transpose();
    }
    gram += &vertex_sum * vertex_sum.transpose();
    let second_moment = gram * (volume / ((n as f64 + 1.0) * (n as f64 + 2.0)));

    Ok(MomentData {
        volume,
        first_moment,
        second_moment,
    })
}

/// Fan triangulation: cone from the vertex centroid over each facet.
pub fn triangulate(p: &VPolytope) -> Vec<Simplex> {
    let n = p.dim();
    let anchor: DVector<f64> = p
        .vertices()
        .iter()
        .fold(DVector::zeros(n), |acc, v| acc + v)
        / p.vertices().len() as f64;
    p.facets()
        .iter()
        .map(|f| {
            let mut vertices = vec![anchor.clone()];
            vertices.extend(f.vertices.iter().map(|&i| p.vertices()[i].clone()));
            Simplex { vertices }
        })
        .collect()
}

/// Exact moments of a V-polytope by summing its fan triangulation.
pub fn polytope_moments(p: &VPolytope) -> Result<MomentData> {
    let mut acc = MomentData::zero(p.dim());
    for s in triangulate(p) {
        // Zero-volume cones over coplanar facets contribute nothing.
        if let Ok(m) = simplex_moments(&s) {
            acc = acc.add(&m);
        }
    }
    Ok(acc)
}

/// Intersection `P ∩ h` in vertex representation.
///
/// Kept vertices plus every crossing-segment/hyperplane intersection are
/// re-hulled; spurious interior candidates fall out of the hull.
pub fn clip_halfspace(p: &VPolytope, h: &Halfspace) -> Result<VPolytope> {
    let tol = 1e-12 * p.diameter().max(1.0);
    let values: Vec<f64> = p
        .vertices()
        .iter()
        .map(|v| h.normal.dot(v) - h.offset)
        .collect();
    if values.iter().all(|&s| s <= tol) {
        return Ok(p.clone());
    }
    if values.iter().all(|&s| s >= -tol) {
        return Err(GeomError::EmptyIntersection);
    }
    let mut pts: Vec<DVector<f64>> = Vec::new();
    for (v, &s) in p.vertices().iter().zip(&values) {
        if s <= tol {
            pts.push(v.clone());
        }
    }
    for i in 0..p.vertices().len() {
        for j in i + 1..p.vertices().len() {
            let (si, sj) = (values[i], values[j]);
            if (si < -tol && sj > tol) || (sj < -tol && si > tol) {
                let t = si / (si - sj);
                let cut = p.vertices()[i].lerp(&p.vertices()[j], t);
                pts.push(cut);
            }
        }
    }
    VPolytope::hull(&pts).map_err(|_| GeomError::EmptyIntersection)
}

/// Moments of the cap `{ x in B(center, radius) : <x,u> >= alpha }` about the
/// origin. Exact up to quadrature rounding (the theta substitution makes every
/// integrand smooth).
pub fn ball_cap_moments(
    center: &DVector<f64>,
    radius: f64,
    u: &DVector<f64>,
    alpha: f64,
) -> Result<MomentData> {
    let n = center.len();
    let h0 = alpha - u.dot(center);
    if h0 >= radius {
        return Err(GeomError::EmptyIntersection);
    }
    let theta0 = (h0 / radius).clamp(-1.0, 1.0).acos();
    let vtrans = unit_ball_volume(n - 1);
    let nodes = 96;
    let nf = n as f64;

    let vol = vtrans
        * radius.powi(n as i32)
        * quad::integrate_1d(0.0, theta0, nodes, |t| t.sin().powf(nf));
    let axial_first = vtrans
        * radius.powi(n as i32 + 1)
        * quad::integrate_1d(0.0, theta0, nodes, |t| t.cos() * t.sin().powf(nf));
    let axial_second = vtrans
        * radius.powi(n as i32 + 2)
        * quad::integrate_1d(0.0, theta0, nodes, |t| {
            t.cos() * t.cos() * t.sin().powf(nf)
        });
    let trans_second = vtrans * radius.powi(n as i32 + 2) / (nf + 1.0)
        * quad::integrate_1d(0.0, theta0, nodes, |t| t.sin().powf(nf + 2.0));

    // Moments about the ball center, axis-aligned with u.
    let uut = u * u.transpose();
    let eye = DMatrix::identity(n, n);
    let first0 = u * axial_first;
    let second0 = &uut * axial_second + (&eye - &uut) * trans_second;

    // Translate to moments about the origin.
    let first = &first0 + center * vol;
    let second = second0
        + &first0 * center.transpose()
        + center * first0.transpose()
        + (center * center.transpose()) * vol;
    Ok(MomentData {
        volume: vol,
        first_moment: first,
        second_moment: second,
    })
}

fn ball_moments(center: &DVector<f64>, radius: f64) -> MomentData {
    let n = center.len();
    let vn = unit_ball_volume(n);
    let vol = vn * radius.powi(n as i32);
    let centered = DMatrix::identity(n, n) * (vn * radius.powi(n as i32 + 2) / (n as f64 + 2.0));
    let first = center * vol;
    let second = centered + (center * center.transpose()) * vol;
    MomentData {
        volume: vol,
        first_moment: first,
        second_moment: second,
    }
}

fn ellipsoid_moments(center: &DVector<f64>, shape: &DMatrix<f64>) -> MomentData {
    let n = center.len();
    let vn = unit_ball_volume(n);
    let det = shape.clone().lu().determinant();
    let vol = vn * det.sqrt();
    // E = c + shape^{1/2} B, so the centered second moment is vol/(n+2) * shape.
    let centered = shape * (vol / (n as f64 + 2.0));
    let first = center * vol;
    let second = centered + (center * center.transpose()) * vol;
    MomentData {
        volume: vol,
        first_moment: first,
        second_moment: second,
    }
}

fn cap_model_moments(spec: &crate::body::CapSpec) -> MomentData {
    // Rotational symmetry about the height axis: polar reduction in the
    // tangential radius with exact inner height integrals.
    let n = spec.n;
    let nf = n as f64;
    let rim = spec.max_tangential_radius();
    let shell = (nf - 1.0) * unit_ball_volume(n - 1);
    let nodes = 128;

    let vol = shell
        * quad::integrate_1d(0.0, rim, nodes, |r| {
            r.powf(nf - 2.0) * (spec.a - spec.boundary_height_radial(r))
        });
    let axial_first = shell
        * quad::integrate_1d(0.0, rim, nodes, |r| {
            let yb = spec.boundary_height_radial(r);
            r.powf(nf - 2.0) * 0.5 * (spec.a * spec.a - yb * yb)
        });
    let axial_second = shell
        * quad::integrate_1d(0.0, rim, nodes, |r| {
            let yb = spec.boundary_height_radial(r);
            r.powf(nf - 2.0) * (spec.a.powi(3) - yb.powi(3)) / 3.0
        });
    let trans_total = shell
        * quad::integrate_1d(0.0, rim, nodes, |r| {
            r.powf(nf) * (spec.a - spec.boundary_height_radial(r))
        });

    let mut first = DVector::zeros(n);
    first[n - 1] = axial_first;
    let mut second = DMatrix::zeros(n, n);
    for j in 0..n - 1 {
        second[(j, j)] = trans_total / (nf - 1.0);
    }
    second[(n - 1, n - 1)] = axial_second;
    MomentData {
        volume: vol,
        first_moment: first,
        second_moment: second,
    }
}

/// Moments of any supported body: exact for polytopes (triangulation sum),
/// closed-form for balls and ellipsoids, quadrature for the cap model.
pub fn body_moments(body: &ConvexBody) -> Result<MomentData> {
    match body {
        ConvexBody::Polytope(p) => polytope_moments(p),
        ConvexBody::Ball { center, radius } => Ok(ball_moments(center, *radius)),
        ConvexBody::Ellipsoid { center, shape } => Ok(ellipsoid_moments(center, shape)),
        ConvexBody::CapModel(spec) => Ok(cap_model_moments(spec)),
    }
}
