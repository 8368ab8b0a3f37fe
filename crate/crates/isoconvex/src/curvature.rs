//! Boundary curvature probing: quadratic-form estimates at a boundary point,
//! local strict convexity, and the normal-alignment angle.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::body::ConvexBody;
use crate::error::{GeomError, Result};
use crate::moments::body_moments;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvatureVerdict {
    /// Two-sided quadratic sandwich holds at this scale (eps_hat <= 1/2).
    Curved,
    /// No positive generalized curvature detected (q_hat nearly singular).
    FlatPoint,
    /// Heights grow like |Y| rather than |Y|^2 (polytope vertices).
    ConeLike,
}

#[derive(Debug, Clone)]
pub struct CurvatureEstimate {
    /// Outer unit normal at the probe point.
    pub normal: DVector<f64>,
    /// Columns: orthonormal tangent basis the fit is expressed in.
    pub tangent_basis: DMatrix<f64>,
    /// Fitted quadratic form on the tangent basis, units 1/length.
    pub q_hat: DMatrix<f64>,
    /// max over samples of |y / q_hat(Y) - 1|.
    pub eps_hat: f64,
    /// Tangential sample radius used.
    pub radius: f64,
    pub verdict: CurvatureVerdict,
}

impl CurvatureEstimate {
    pub fn report_json(&self) -> serde_json::Value {
        let n = self.normal.len();
        let q: Vec<Vec<f64>> = (0..self.q_hat.nrows())
            .map(|i| (0..self.q_hat.ncols()).map(|j| self.q_hat[(i, j)]).collect())
            .collect();
        serde_json::json!({
            "normal": (0..n).map(|i| self.normal[i]).collect::<Vec<_>>(),
            "q": q,
            "eps_hat": self.eps_hat,
            "radius": self.radius,
            "verdict": match self.verdict {
                CurvatureVerdict::Curved => "curved",
                CurvatureVerdict::FlatPoint => "flat",
                CurvatureVerdict::ConeLike => "cone",
            },
        })
    }
}

const BOUNDARY_TOL_FACTOR: f64 = 1e-9;
/// Scale-aware flat threshold: curvature has units 1/length.
const FLAT_EIG_FACTOR: f64 = 1e-8;
const CONE_EPS_LIMIT: f64 = 0.5;

fn require_on_boundary(body: &ConvexBody, x0: &DVector<f64>) -> Result<()> {
    let d = body.boundary_distance(x0);
    if d > BOUNDARY_TOL_FACTOR * body.diameter() {
        return Err(GeomError::NotOnBoundary(d));
    }
    Ok(())
}

fn facet_area(body: &crate::body::VPolytope, facet: &crate::body::Facet) -> f64 {
    let verts: Vec<&DVector<f64>> = facet.vertices.iter().map(|&i| &body.vertices()[i]).collect();
    let k = verts.len() - 1;
    if k == 0 {
        return 1.0;
    }
    let mut g = DMatrix::zeros(k, k);
    let edges: Vec<DVector<f64>> = (1..=k).map(|i| verts[i] - verts[0]).collect();
    for i in 0..k {
        for j in 0..k {
            g[(i, j)] = edges[i].dot(&edges[j]);
        }
    }
    let det: f64 = g.lu().determinant().max(0.0);
    det.sqrt() / (1..=k).product::<usize>() as f64
}

/// Outer unit normal; for polytopes the area-weighted average of the facet
/// normals incident to `x0`. `unique` is false when several facets meet there.
fn outer_normal(body: &ConvexBody, x0: &DVector<f64>) -> Result<(DVector<f64>, bool)> {
    match body {
        ConvexBody::Polytope(p) => {
            let tol = BOUNDARY_TOL_FACTOR * p.diameter();
            let mut acc = DVector::zeros(p.dim());
            let mut count = 0;
            for f in p.facets() {
                if (f.normal.dot(x0) - f.offset).abs() <= tol {
                    acc += &f.normal * facet_area(p, f);
                    count += 1;
                }
            }
            if count == 0 {
                return Err(GeomError::NotOnBoundary(p.facet_excess(x0).abs()));
            }
            let norm = acc.norm();
            if norm < 1e-12 {
                return Err(GeomError::NonUniqueNormal);
            }
            Ok((acc / norm, count == 1))
        }
        ConvexBody::Ball { center, .. } => {
            let d = x0 - center;
            Ok((d.clone() / d.norm(), true))
        }
        ConvexBody::Ellipsoid { center, shape } => {
            let d = shape
                .clone()
                .lu()
                .solve(&(x0 - center))
                .ok_or_else(|| GeomError::DegenerateBody("singular ellipsoid shape".into()))?;
            Ok((d.clone() / d.norm(), true))
        }
        ConvexBody::CapModel(spec) => {
            let n = spec.n;
            let rho = x0.rows(0, n - 1).norm();
            let y = x0[n - 1];
            let tol = BOUNDARY_TOL_FACTOR * body.diameter();
            let on_top = (y - spec.a).abs() <= tol;
            let on_bottom = (y - spec.boundary_height_radial(rho)).abs() <= tol;
            if on_top && on_bottom {
                return Err(GeomError::NonUniqueNormal);
            }
            if on_top {
                let mut e = DVector::zeros(n);
                e[n - 1] = 1.0;
                return Ok((e, true));
            }
            if !on_bottom {
                return Err(GeomError::NotOnBoundary(body.boundary_distance(x0)));
            }
            // Gradient of y - y_b(|Y|): tangential part -y_b'(rho) * Y/rho.
            let h = 1e-7 * body.diameter();
            let slope = (spec.boundary_height_radial(rho + h)
                - spec.boundary_height_radial((rho - h).max(0.0)))
                / (h + (rho + h - (rho - h).max(0.0) - h));
            let mut nu = DVector::zeros(n);
            if rho > 1e-14 {
                for i in 0..n - 1 {
                    nu[i] = slope * x0[i] / rho;
                }
            }
            nu[n - 1] = -1.0;
            let norm = nu.norm();
            Ok((nu / norm, true))
        }
    }
}

/// Orthonormal basis of the tangent hyperplane at normal `nu` (columns).
fn tangent_basis(nu: &DVector<f64>) -> DMatrix<f64> {
    let n = nu.len();
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for i in 0..n {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        let mut v = &e - nu * nu.dot(&e);
        for c in &cols {
            let proj = v.dot(c);
            v -= c * proj;
        }
        let nrm = v.norm();
        if nrm > 1e-8 && cols.len() < n - 1 {
            cols.push(v / nrm);
        }
    }
    let mut b = DMatrix::zeros(n, n - 1);
    for (j, c) in cols.iter().enumerate() {
        b.set_column(j, c);
    }
    b
}

/// Boundary height below x0 + offset along the inner normal, by membership
/// bisection. Returns None when the ray misses the body within `y_max`.
fn boundary_height(
    body: &ConvexBody,
    foot: &DVector<f64>,
    nu: &DVector<f64>,
    y_max: f64,
) -> Option<f64> {
    let probe = |y: f64| body.contains(&(foot - nu * y), 0.0);
    if probe(0.0) {
        return Some(0.0);
    }
    // The ray enters and leaves the body, so scan forward for an interior
    // point before bisecting the entry height.
    let mut hi = 1e-9 * y_max;
    while !probe(hi) {
        hi *= 2.0;
        if hi > y_max {
            return None;
        }
    }
    let mut lo = hi / 2.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if probe(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Least-squares quadratic fit of boundary heights against tangential offsets
/// sampled on rings of the given radius, with the caller's tangent basis.
pub fn estimate_quadratic_form_with_basis(
    body: &ConvexBody,
    x0: &DVector<f64>,
    radius: f64,
    normal: &DVector<f64>,
    basis: &DMatrix<f64>,
) -> Result<CurvatureEstimate> {
    require_on_boundary(body, x0)?;
    let diam = body.diameter();
    assert!(
        radius < diam / 4.0,
        "sample radius must stay local (radius < diam/4)"
    );
    let d = basis.ncols();

    // Deterministic ring samples: seeded directions x dyadic radii.
    let mut rng = ChaCha8Rng::seed_from_u64(0x1505);
    let mut dirs: Vec<DVector<f64>> = Vec::new();
    if d == 1 {
        dirs.push(DVector::from_vec(vec![1.0]));
        dirs.push(DVector::from_vec(vec![-1.0]));
    } else {
        for _ in 0..8 * d {
            let mut v = DVector::zeros(d);
            for i in 0..d {
                v[i] = rng.sample::<f64, _>(rand_distr::StandardNormal);
            }
            let nrm = v.norm();
            if nrm > 1e-9 {
                dirs.push(v / nrm);
            }
        }
    }

    let mut samples: Vec<(DVector<f64>, f64)> = Vec::new();
    for frac in [0.25, 0.5, 0.75, 1.0] {
        for dir in &dirs {
            let y_t = dir * (radius * frac);
            let foot = x0 + basis * &y_t;
            if let Some(y) = boundary_height(body, &foot, normal, diam) {
                samples.push((y_t, y));
            }
        }
    }
    if samples.len() < d * (d + 1) / 2 + 2 {
        return Err(GeomError::DegenerateBody(
            "too few boundary samples for quadratic fit".into(),
        ));
    }

    // y ~ sum_{i<=j} c_ij Y_i Y_j, solved by SVD least squares.
    let monomials = d * (d + 1) / 2;
    let mut a = DMatrix::zeros(samples.len(), monomials);
    let mut rhs = DVector::zeros(samples.len());
    for (row, (y_t, y)) in samples.iter().enumerate() {
        let mut col = 0;
        for i in 0..d {
            for j in i..d {
                let factor = if i == j { 1.0 } else { 2.0 };
                a[(row, col)] = factor * y_t[i] * y_t[j];
                col += 1;
            }
        }
        rhs[row] = *y;
    }
    let coeff = a
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| GeomError::DegenerateBody(e.to_string()))?;
    let mut q_hat = DMatrix::zeros(d, d);
    let mut col = 0;
    for i in 0..d {
        for j in i..d {
            q_hat[(i, j)] = coeff[col];
            q_hat[(j, i)] = coeff[col];
            col += 1;
        }
    }

    let floor = 1e-12 * radius;
    let mut eps_hat = 0.0f64;
    for (y_t, y) in &samples {
        let q_val = (q_hat.clone() * y_t).dot(y_t);
        if q_val.abs() <= floor && y.abs() <= floor {
            continue;
        }
        if q_val.abs() <= floor {
            eps_hat = f64::INFINITY;
        } else {
            eps_hat = eps_hat.max((y / q_val - 1.0).abs());
        }
    }

    let min_eig = q_hat
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |m, &e| m.min(e));
    let verdict = if min_eig < FLAT_EIG_FACTOR / radius {
        CurvatureVerdict::FlatPoint
    } else if eps_hat > CONE_EPS_LIMIT {
        CurvatureVerdict::ConeLike
    } else {
        CurvatureVerdict::Curved
    };

    Ok(CurvatureEstimate {
        normal: normal.clone(),
        tangent_basis: basis.clone(),
        q_hat,
        eps_hat,
        radius,
        verdict,
    })
}

pub fn estimate_quadratic_form(
    body: &ConvexBody,
    x0: &DVector<f64>,
    radius: f64,
) -> Result<CurvatureEstimate> {
    let (nu, _) = outer_normal(body, x0)?;
    let basis = tangent_basis(&nu);
    estimate_quadratic_form_with_basis(body, x0, radius, &nu, &basis)
}

/// True iff no nondegenerate boundary segment passes through x0.
pub fn strict_convexity_test(body: &ConvexBody, x0: &DVector<f64>, tol: f64) -> Result<bool> {
    require_on_boundary(body, x0)?;
    match body {
        ConvexBody::Polytope(p) => {
            // The minimal vertex list holds exactly the extreme points.
            Ok(p.vertices().iter().any(|v| (v - x0).norm() <= tol))
        }
        ConvexBody::Ball { .. } | ConvexBody::Ellipsoid { .. } => Ok(true),
        ConvexBody::CapModel(spec) => {
            let n = spec.n;
            let on_top = (x0[n - 1] - spec.a).abs() <= tol;
            Ok(!on_top)
        }
    }
}

/// Angle between the outer normal at x0 and the position vector x0, for a
/// body whose centroid sits at the origin.
pub fn normal_alignment(body: &ConvexBody, x0: &DVector<f64>) -> Result<f64> {
    require_on_boundary(body, x0)?;
    let m = body_moments(body)?;
    if m.centroid().norm() > BOUNDARY_TOL_FACTOR * body.diameter() {
        return Err(GeomError::DegenerateInput(
            "centroid must be at the origin".into(),
        ));
    }
    let (nu, unique) = outer_normal(body, x0)?;
    if !unique {
        return Err(GeomError::NonUniqueNormal);
    }
    let cosine = (nu.dot(x0) / x0.norm()).clamp(-1.0, 1.0);
    Ok(cosine.acos())
}
