//! Local boundary modifications (spikes and slab cuts), the second-order
//! expansion predictions they induce on L_K, and the sphere-condition /
//! cap-norm boundary diagnostics.

use nalgebra::{DMatrix, DVector};

use crate::body::{ConvexBody, Halfspace, MomentData, Simplex, VPolytope};
use crate::error::{GeomError, Result};
use crate::isotropy::check_isotropic;
use crate::moments::{ball_cap_moments, body_moments, polytope_moments, simplex_moments};
use crate::sample::support;

/// Isotropy gate for the expansion formulas; frames are numerical, so the
/// check is at 1e-6 rather than exact.
pub const ISOTROPY_GATE: f64 = 1e-6;

#[derive(Debug, Clone)]
pub enum PerturbKind {
    /// Added spike: conv(K u {apex}) \ K.
    Spike { apex: DVector<f64> },
    /// Removed slab: K \ {<X,u> <= h_K(u) - depth}.
    Slab { kept: Halfspace },
}

/// A perturbed body together with the exact moments of the modified region.
#[derive(Debug, Clone)]
pub struct PerturbationResult {
    /// Vertex representation of the perturbed body, when it is a polytope.
    pub perturbed: Option<VPolytope>,
    /// Moments of the perturbed body (exact; for non-polytopes derived from
    /// closed-form region moments).
    pub perturbed_moments: MomentData,
    /// Moments of the symmetric-difference region.
    pub region: MomentData,
    /// True for slab cuts (volume removed), false for spikes (volume added).
    pub removed: bool,
    pub symmetric: bool,
    pub kind: PerturbKind,
}

impl PerturbationResult {
    pub fn delta_volume(&self) -> f64 {
        self.region.volume
    }

    /// Integral of |X|^2 over the modified region.
    pub fn delta_second(&self) -> f64 {
        self.region.second_moment.trace()
    }

    pub fn region_centroid(&self) -> DVector<f64> {
        self.region.centroid()
    }
}

const BOUNDARY_TOL_FACTOR: f64 = 1e-9;

fn require_on_boundary(body: &ConvexBody, x0: &DVector<f64>) -> Result<()> {
    let d = body.boundary_distance(x0);
    if d > BOUNDARY_TOL_FACTOR * body.diameter() {
        return Err(GeomError::NotOnBoundary(d));
    }
    Ok(())
}

/// conv(K u {X0 + t u}), with the added region computed exactly as cones over
/// the facets visible from the apex. Avoids the hull-minus-hull cancellation.
pub fn add_spike(
    p: &VPolytope,
    x0: &DVector<f64>,
    u: &DVector<f64>,
    t: f64,
) -> Result<PerturbationResult> {
    require_on_boundary(&ConvexBody::Polytope(p.clone()), x0)?;
    assert!(t > 0.0, "spike height must be positive");
    let apex = x0 + u * t;
    if p.contains(&apex, 0.0) {
        return Err(GeomError::PointInside);
    }

    let mut region = MomentData::zero(p.dim());
    for f in p.facets() {
        if f.normal.dot(&apex) - f.offset > 0.0 {
            let mut vertices = vec![apex.clone()];
            vertices.extend(f.vertices.iter().map(|&i| p.vertices()[i].clone()));
            if let Ok(m) = simplex_moments(&Simplex { vertices }) {
                region = region.add(&m);
            }
        }
    }
    if !(region.volume > 0.0) {
        return Err(GeomError::PointInside);
    }

    let mut pts: Vec<DVector<f64>> = p.vertices().to_vec();
    pts.push(apex.clone());
    let perturbed = VPolytope::hull(&pts)?;
    let perturbed_moments = polytope_moments(p)?.add(&region);
    Ok(PerturbationResult {
        perturbed: Some(perturbed),
        perturbed_moments,
        region,
        removed: false,
        symmetric: false,
        kind: PerturbKind::Spike { apex },
    })
}

/// K' = {X in K : <X,u> <= h_K(u) - depth}; the removed slab's moments are
/// computed directly (clip for polytopes, cap closed form for balls).
pub fn cut_slab(body: &ConvexBody, u: &DVector<f64>, depth: f64) -> Result<PerturbationResult> {
    let (h, _) = support(body, u);
    let (neg_h, _) = support(body, &(-u));
    let width = h + neg_h;
    if !(depth > 0.0) || depth >= width {
        return Err(GeomError::EmptyIntersection);
    }
    let cut = h - depth;
    let kept = Halfspace::new(u.clone(), cut)?;
    match body {
        ConvexBody::Polytope(p) => {
            let perturbed = crate::moments::clip_halfspace(p, &kept)?;
            let region_poly = crate::moments::clip_halfspace(p, &kept.complement())?;
            let region = polytope_moments(&region_poly)?;
            let perturbed_moments = polytope_moments(&perturbed)?;
            Ok(PerturbationResult {
                perturbed: Some(perturbed),
                perturbed_moments,
                region,
                removed: true,
                symmetric: false,
                kind: PerturbKind::Slab { kept },
            })
        }
        ConvexBody::Ball { center, radius } => {
            let region = ball_cap_moments(center, *radius, u, cut)?;
            let perturbed_moments = body_moments(body)?.sub(&region);
            Ok(PerturbationResult {
                perturbed: None,
                perturbed_moments,
                region,
                removed: true,
                symmetric: false,
                kind: PerturbKind::Slab { kept },
            })
        }
        _ => Err(GeomError::DegenerateInput(
            "slab cuts support polytopes and balls".into(),
        )),
    }
}

fn is_centrally_symmetric(body: &ConvexBody, tol: f64) -> bool {
    match body {
        ConvexBody::Polytope(p) => p.vertices().iter().all(|v| {
            let m = -v;
            p.vertices().iter().any(|w| (w - &m).norm() <= tol)
        }),
        ConvexBody::Ball { center, .. } => center.norm() <= tol,
        ConvexBody::Ellipsoid { center, .. } => center.norm() <= tol,
        ConvexBody::CapModel(_) => false,
    }
}

/// Applies the mirrored modification as well, keeping the body centrally
/// symmetric; region deltas double and the region's first moment cancels.
pub fn symmetrize(base: &ConvexBody, r: &PerturbationResult) -> Result<PerturbationResult> {
    let tol = BOUNDARY_TOL_FACTOR * base.diameter();
    if !is_centrally_symmetric(base, tol) {
        return Err(GeomError::NotSymmetric);
    }
    let region2 = MomentData {
        volume: 2.0 * r.region.volume,
        first_moment: DVector::zeros(r.region.first_moment.len()),
        second_moment: &r.region.second_moment * 2.0,
    };
    match (&r.kind, base) {
        (PerturbKind::Spike { apex }, ConvexBody::Polytope(p)) => {
            let mut pts: Vec<DVector<f64>> = p.vertices().to_vec();
            pts.push(apex.clone());
            pts.push(-apex);
            let perturbed = VPolytope::hull(&pts)?;
            let perturbed_moments = polytope_moments(p)?.add(&region2);
            Ok(PerturbationResult {
                perturbed: Some(perturbed),
                perturbed_moments,
                region: region2,
                removed: false,
                symmetric: true,
                kind: r.kind.clone(),
            })
        }
        (PerturbKind::Slab { kept }, ConvexBody::Polytope(p)) => {
            let once = crate::moments::clip_halfspace(p, kept)?;
            let mirrored = Halfspace::new(-&kept.normal, kept.offset)?;
            let perturbed = crate::moments::clip_halfspace(&once, &mirrored)?;
            let perturbed_moments = polytope_moments(p)?.sub(&region2);
            Ok(PerturbationResult {
                perturbed: Some(perturbed),
                perturbed_moments,
                region: region2,
                removed: true,
                symmetric: true,
                kind: r.kind.clone(),
            })
        }
        (PerturbKind::Slab { kept }, ConvexBody::Ball { .. }) => {
            let perturbed_moments = body_moments(base)?.sub(&region2);
            let _ = kept;
            Ok(PerturbationResult {
                perturbed: None,
                perturbed_moments,
                region: region2,
                removed: true,
                symmetric: true,
                kind: r.kind.clone(),
            })
        }
        _ => Err(GeomError::DegenerateInput(
            "unsupported symmetrization".into(),
        )),
    }
}

fn isotropy_gate(base: &ConvexBody) -> Result<MomentData> {
    let rep = check_isotropic(base, ISOTROPY_GATE)?;
    if !rep.passes {
        return Err(GeomError::NotIsotropic(
            rep.first_moment_resid.max(rep.isotropy_resid),
            ISOTROPY_GATE,
        ));
    }
    body_moments(base)
}

/// First-order prediction of L_perturbed^{2n} / L_K^{2n}:
/// `1 +/- (delta_second / M_K^2 - (n+2) delta_volume / |K|)`.
pub fn prop4_prediction(base: &ConvexBody, r: &PerturbationResult) -> Result<f64> {
    let m = isotropy_gate(base)?;
    let n = base.dim() as f64;
    let m_k2 = m.centered_second().trace() / n;
    let term = r.delta_second() / m_k2 - (n + 2.0) * r.delta_volume() / m.volume;
    Ok(if r.removed { 1.0 - term } else { 1.0 + term })
}

/// One scale of a perturbation schedule.
#[derive(Debug, Clone)]
pub struct ScheduleRow {
    pub scale: f64,
    pub delta_volume: f64,
    pub delta_second: f64,
    pub exact_ratio: f64,
    pub predicted_ratio: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy)]
pub enum ScheduleMode {
    Slab,
    /// Spike growing from the support point in direction `u`.
    Spike,
}

fn l2n(m: &MomentData) -> f64 {
    let n = m.first_moment.len() as f64;
    m.centered_second().lu().determinant() / m.volume.powf(n + 2.0)
}

/// Runs a shrinking schedule of slab depths or spike heights, compares the
/// exact L ratio to the first-order prediction, and fits the residual order
/// `log |residual| ~ slope * log delta_volume`.
pub fn prop4_error_order(
    base: &ConvexBody,
    u: &DVector<f64>,
    scales: &[f64],
    mode: ScheduleMode,
) -> Result<(f64, Vec<ScheduleRow>)> {
    if scales.len() < 6 || scales.windows(2).any(|w| w[1] >= w[0]) {
        return Err(GeomError::InsufficientSchedule(scales.len(), 6));
    }
    let base_moments = isotropy_gate(base)?;
    let base_l2n = l2n(&base_moments);
    let mut rows = Vec::with_capacity(scales.len());
    for &scale in scales {
        let r = match mode {
            ScheduleMode::Slab => cut_slab(base, u, scale)?,
            ScheduleMode::Spike => {
                let p = match base {
                    ConvexBody::Polytope(p) => p,
                    _ => {
                        return Err(GeomError::DegenerateInput(
                            "spike schedules need a polytope".into(),
                        ))
                    }
                };
                let (_, x0) = support(base, u);
                add_spike(p, &x0, u, scale)?
            }
        };
        let exact_ratio = l2n(&r.perturbed_moments) / base_l2n;
        let predicted_ratio = prop4_prediction(base, &r)?;
        rows.push(ScheduleRow {
            scale,
            delta_volume: r.delta_volume(),
            delta_second: r.delta_second(),
            exact_ratio,
            predicted_ratio,
            residual: (exact_ratio - predicted_ratio).abs(),
        });
    }
    let fit: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.residual > 1e-15)
        .map(|r| (r.delta_volume.ln(), r.residual.ln()))
        .collect();
    if fit.len() < 4 {
        return Err(GeomError::InsufficientSchedule(fit.len(), 4));
    }
    Ok((least_squares_slope(&fit), rows))
}

pub(crate) fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Residuals of the determinant expansion (additive step) and of the centroid
/// correction; both are O(delta_volume^2).
pub fn expansion_residuals(base: &ConvexBody, r: &PerturbationResult) -> Result<(f64, f64)> {
    let m = isotropy_gate(base)?;
    let n = base.dim() as f64;
    let m_k2 = m.centered_second().trace() / n;

    // Uncentered second moment of the perturbed body about the original
    // (isotropic) origin.
    let sign = if r.removed { -1.0 } else { 1.0 };
    let uncentered: DMatrix<f64> = m.centered_second() + &r.region.second_moment * sign;
    let det_uncentered = uncentered.clone().lu().determinant();
    let det_residual = (det_uncentered - m_k2.powf(n) - sign * m_k2.powf(n - 1.0) * r.delta_second()).abs();

    let det_centered = r.perturbed_moments.centered_second().lu().determinant();
    let centering_residual = (det_centered - det_uncentered).abs();
    Ok((det_residual, centering_residual))
}

/// Signed balance residual `|X0|^2 |K| - (n+2) M_K^2` at a boundary point of
/// an isotropic body. It vanishes exactly on the sphere of critical distance
/// from the centroid where adding or removing mass leaves the isotropy
/// constant unchanged to first order.
pub fn sphere_condition_residual(base: &ConvexBody, x0: &DVector<f64>) -> Result<f64> {
    let m = isotropy_gate(base)?;
    require_on_boundary(base, x0)?;
    let n = base.dim() as f64;
    let m_k2 = m.centered_second().trace() / n;
    Ok(x0.norm_squared() * m.volume - (n + 2.0) * m_k2)
}

/// max |X| over the cap `{X in K : <X,u> >= alpha}`.
pub fn cap_max_norm(body: &ConvexBody, u: &DVector<f64>, alpha: f64) -> Result<f64> {
    match body {
        ConvexBody::Polytope(p) => {
            let cap_hs = Halfspace::new(u.clone(), alpha)?.complement();
            let cap = crate::moments::clip_halfspace(p, &cap_hs)?;
            Ok(cap
                .vertices()
                .iter()
                .map(|v| v.norm())
                .fold(0.0f64, f64::max))
        }
        ConvexBody::Ball { center, radius } => {
            let h0 = alpha - u.dot(center);
            if h0 >= *radius {
                return Err(GeomError::EmptyIntersection);
            }
            // Farthest point of the whole ball from the origin.
            let cnorm = center.norm();
            let far = if cnorm > 1e-300 {
                center + center * (*radius / cnorm)
            } else {
                center + u * *radius
            };
            if u.dot(&far) >= alpha {
                return Ok(cnorm + radius);
            }
            // Otherwise the max sits on the rim sphere {<X,u> = alpha} n B.
            let rim_center = center + u * h0;
            let rho = (radius * radius - h0 * h0).sqrt();
            let tang = &rim_center - u * u.dot(&rim_center);
            let tnorm = tang.norm();
            let best = if tnorm > 1e-300 {
                &rim_center + tang * (rho / tnorm)
            } else {
                // Rim center on the axis: every rim point has equal norm.
                let mut w = DVector::zeros(u.len());
                let k = (0..u.len())
                    .min_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs()))
                    .unwrap();
                w[k] = 1.0;
                let w = &w - u * u[k];
                let w = &w / w.norm();
                &rim_center + w * rho
            };
            Ok(best.norm())
        }
        ConvexBody::Ellipsoid { center, shape } => {
            let l = symmetric_sqrt(shape);
            // Unconstrained max of |c + L w| over the unit sphere.
            let (val, w) = trs_max_norm(&l, center, 1.0);
            let x = center + &l * &w;
            if u.dot(&x) >= alpha {
                return Ok(val.sqrt());
            }
            // Rim: |w| = 1 with <L w, u> = alpha - <c,u>; reduce to a sphere
            // in the hyperplane and run the same trust-region maximization.
            let lw = l.transpose() * u;
            let d = alpha - u.dot(center);
            let lw_norm = lw.norm();
            if d.abs() > lw_norm {
                return Err(GeomError::EmptyIntersection);
            }
            let w0 = &lw * (d / (lw_norm * lw_norm));
            let rho = (1.0 - (d / lw_norm).powi(2)).sqrt();
            let basis = orthonormal_complement(&(&lw / lw_norm));
            let x0 = center + &l * &w0;
            let b = &l * &basis;
            let (val, _) = trs_max_norm(&b, &x0, rho);
            Ok(val.sqrt())
        }
        ConvexBody::CapModel(spec) => {
            // All rim points share the global max norm sqrt(rim^2 + a^2).
            let rim = spec.max_tangential_radius();
            let n = spec.n;
            let u_axis = u[n - 1];
            let tan_norm = u.rows(0, n - 1).norm();
            if u_axis * spec.a + tan_norm * rim >= alpha {
                Ok((rim * rim + spec.a * spec.a).sqrt())
            } else {
                Err(GeomError::EmptyIntersection)
            }
        }
    }
}

fn symmetric_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = m.clone().symmetric_eigen();
    let mut d = DMatrix::zeros(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        d[(i, i)] = eig.eigenvalues[i].max(0.0).sqrt();
    }
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

/// Orthonormal basis of the complement of the unit vector `w` (columns).
fn orthonormal_complement(w: &DVector<f64>) -> DMatrix<f64> {
    let n = w.len();
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for i in 0..n {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        let mut v = &e - w * w.dot(&e);
        for c in &cols {
            let proj = v.dot(c);
            v -= c * proj;
        }
        let nrm = v.norm();
        if nrm > 1e-8 && cols.len() < n - 1 {
            cols.push(v / nrm);
        }
    }
    let mut b = DMatrix::zeros(n, cols.len());
    for (j, c) in cols.iter().enumerate() {
        for i in 0..n {
            b[(i, j)] = c[i];
        }
    }
    b
}

/// Maximizes `|x0 + B xi|^2` over `|xi| = radius` (trust-region subproblem,
/// maximization side) via the secular equation in the eigenbasis of B^T B.
/// Returns (max value, maximizer xi).
fn trs_max_norm(b_mat: &DMatrix<f64>, x0: &DVector<f64>, radius: f64) -> (f64, DVector<f64>) {
    let k = b_mat.ncols();
    if k == 0 || radius <= 0.0 {
        return (x0.norm_squared(), DVector::zeros(k));
    }
    let a = b_mat.transpose() * b_mat;
    let bvec = b_mat.transpose() * x0;
    let eig = a.clone().symmetric_eigen();
    let lam_max = eig.eigenvalues.iter().fold(f64::NEG_INFINITY, |m, &e| m.max(e));
    let beta = eig.eigenvectors.transpose() * &bvec;

    let value = |xi: &DVector<f64>| {
        let x = x0 + b_mat * xi;
        x.norm_squared()
    };

    let g = |mu: f64| -> f64 {
        let mut s = 0.0;
        for i in 0..k {
            let d = mu - eig.eigenvalues[i];
            s += (beta[i] / d).powi(2);
        }
        s.sqrt()
    };

    // Hard case: no component of x0 along the top eigenspace.
    let top_tol = 1e-10 * lam_max.abs().max(1.0);
    let top_beta: f64 = (0..k)
        .filter(|&i| (eig.eigenvalues[i] - lam_max).abs() <= top_tol)
        .map(|i| beta[i].abs())
        .fold(0.0, f64::max);
    if top_beta <= 1e-12 * bvec.norm().max(1e-300) {
        // xi = pseudo-solution on the non-top eigenspace plus top-eigvec fill.
        let mut xi_hat = DVector::zeros(k);
        for i in 0..k {
            let d = lam_max - eig.eigenvalues[i];
            if d > top_tol {
                xi_hat[i] = beta[i] / d;
            }
        }
        let nrm = xi_hat.norm();
        if nrm < radius {
            let fill = (radius * radius - nrm * nrm).sqrt();
            let top_idx = (0..k)
                .find(|&i| (eig.eigenvalues[i] - lam_max).abs() <= top_tol)
                .unwrap();
            xi_hat[top_idx] = fill;
        } else {
            xi_hat *= radius / nrm;
        }
        let xi = &eig.eigenvectors * xi_hat;
        return (value(&xi), xi);
    }

    // g is decreasing on (lam_max, inf) from +inf to 0; bisect g(mu) = radius.
    let mut lo = lam_max + 1e-14 * lam_max.abs().max(1.0);
    while g(lo) < radius {
        lo = lam_max + 0.5 * (lo - lam_max);
        if lo - lam_max < 1e-300 {
            break;
        }
    }
    let mut hi = lam_max + bvec.norm() / radius + 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > radius {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = 0.5 * (lo + hi);
    let mut xi_hat = DVector::zeros(k);
    for i in 0..k {
        xi_hat[i] = beta[i] / (mu - eig.eigenvalues[i]);
    }
    let nrm = xi_hat.norm();
    if nrm > 0.0 {
        xi_hat *= radius / nrm;
    }
    let xi = &eig.eigenvectors * xi_hat;
    (value(&xi), xi)
}
