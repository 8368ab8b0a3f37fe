//! Isotropic frames, M_K and the isotropy constant L_K.
//!
//! L_K is computed through the determinant of the centered second-moment
//! matrix, L_K^{2n} = det(Sigma_c) / |K|^{n+2}, which is algebraically
//! identical to the n-fold determinant integral and exact for polytopes. The
//! Monte Carlo estimator walks the same determinant route from samples and is
//! the independent oracle for that identity.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::body::{ConvexBody, MomentData};
use crate::error::{GeomError, Result};
use crate::moments::body_moments;
use crate::sample::sample_uniform;

/// Volume-preserving affine map into isotropic position, with the scale
/// constants it exposes.
#[derive(Debug, Clone)]
pub struct IsotropicFrame {
    /// Applied as `x -> linear * (x + translation)`; `translation = -g(K)`.
    pub translation: DVector<f64>,
    /// Volume-preserving (det = 1) linear part.
    pub linear: DMatrix<f64>,
    pub m_k: f64,
    pub l_k: f64,
    pub volume: f64,
}

impl IsotropicFrame {
    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.linear * (x + &self.translation)
    }

    /// Maps a polytope into isotropic position.
    pub fn apply_polytope(&self, p: &crate::body::VPolytope) -> Result<crate::body::VPolytope> {
        let t = &self.linear * &self.translation;
        p.affine_image(&self.linear, &t)
    }
}

/// Isotropy report: worst first-moment and off-isotropy residuals, both
/// relative to trace(Sigma_c)/n.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsotropyReport {
    pub first_moment_resid: f64,
    pub isotropy_resid: f64,
    pub passes: bool,
}

const CONDITION_LIMIT: f64 = 1e12;

fn centered_covariance(m: &MomentData) -> Result<(DMatrix<f64>, f64)> {
    if !(m.volume > 0.0) {
        return Err(GeomError::DegenerateBody("nonpositive volume".into()));
    }
    let sigma = m.centered_second();
    let eig = sigma.clone().symmetric_eigen();
    let max = eig.eigenvalues.iter().fold(0.0f64, |a, &e| a.max(e));
    let min = eig.eigenvalues.iter().fold(f64::INFINITY, |a, &e| a.min(e));
    if !(min > 0.0) || max / min > CONDITION_LIMIT {
        return Err(GeomError::DegenerateBody(format!(
            "centered second moment numerically singular (cond {:.2e})",
            max / min.max(1e-300)
        )));
    }
    Ok((sigma, m.volume))
}

/// The unique (up to orthogonal maps) volume-preserving frame; the orthogonal
/// freedom is fixed by ordering the eigenbasis by descending eigenvalue and
/// making each eigenvector's largest-magnitude entry positive.
pub fn isotropic_frame(body: &ConvexBody) -> Result<IsotropicFrame> {
    let m = body_moments(body)?;
    let (sigma, volume) = centered_covariance(&m)?;
    let n = sigma.nrows();
    let g = m.centroid();

    let eig = sigma.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    // Rows of the whitening map: lambda_i^{-1/2} q_i^T, scaled to det 1.
    let mut q = DMatrix::zeros(n, n);
    for (row, &idx) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(idx).into_owned();
        let mut max_abs = 0.0;
        let mut max_sign = 1.0;
        for &x in col.iter() {
            if x.abs() > max_abs {
                max_abs = x.abs();
                max_sign = x.signum();
            }
        }
        if max_sign < 0.0 {
            col = -col;
        }
        for c in 0..n {
            q[(row, c)] = col[c] / eig.eigenvalues[idx].sqrt();
        }
    }
    let det_sigma: f64 = order.iter().map(|&i| eig.eigenvalues[i]).product();
    // det(q) = det(Sigma)^{-1/2} up to sign; scale so det(linear) = 1.
    let c = det_sigma.powf(1.0 / (2.0 * n as f64));
    let linear = q * c;

    let m_k2 = det_sigma.powf(1.0 / n as f64);
    let m_k = m_k2.sqrt();
    let l_k = m_k / volume.powf((n as f64 + 2.0) / (2.0 * n as f64));
    Ok(IsotropicFrame {
        translation: -g,
        linear,
        m_k,
        l_k,
        volume,
    })
}

/// L_K via the second-moment determinant; affine invariant.
pub fn isotropy_constant(body: &ConvexBody) -> Result<f64> {
    let m = body_moments(body)?;
    let (sigma, volume) = centered_covariance(&m)?;
    let n = sigma.nrows() as f64;
    let det = sigma.lu().determinant();
    Ok((det / volume.powf(n + 2.0)).powf(1.0 / (2.0 * n)))
}

/// Checks the defining isotropy conditions at relative tolerance `tol`.
pub fn check_isotropic(body: &ConvexBody, tol: f64) -> Result<IsotropyReport> {
    let m = body_moments(body)?;
    let n = m.first_moment.len();
    let sigma = m.centered_second();
    let scale = sigma.trace() / n as f64;
    let first = m.first_moment.amax();
    let mut off = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { scale } else { 0.0 };
            off = off.max((sigma[(i, j)] - target).abs());
        }
    }
    // First-moment residual normalized by volume * diameter; off-isotropy by
    // the mean eigenvalue.
    let first_scale = m.volume * body.diameter();
    Ok(IsotropyReport {
        first_moment_resid: first / first_scale,
        isotropy_resid: off / scale,
        passes: first / first_scale <= tol && off / scale <= tol,
    })
}

/// Monte Carlo route to L_K through the same determinant identity, with a
/// delta-method standard error.
pub fn mc_isotropy_constant(
    body: &ConvexBody,
    count: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    assert!(count >= 10_000, "need at least 1e4 samples");
    let n = body.dim();
    let nf = n as f64;
    let s = sample_uniform(body, count, seed)?;
    let nn = s.points.len() as f64;

    let mean: DVector<f64> =
        s.points.iter().fold(DVector::zeros(n), |a, p| a + p) / nn;
    let mut cov = DMatrix::zeros(n, n);
    for p in &s.points {
        let d = p - &mean;
        cov += &d * d.transpose();
    }
    cov /= nn;

    let (lo, hi) = body.bounding_box();
    let box_vol: f64 = (0..n).map(|i| hi[i] - lo[i]).product();
    let volume = box_vol * s.acceptance_rate;

    // L^{2n} = det(vol * Cov) / vol^{n+2} = det(Cov) / vol^2.
    let det = cov.clone().lu().determinant();
    if !(det > 0.0) {
        return Err(GeomError::DegenerateBody("singular sample covariance".into()));
    }
    let l = det.powf(1.0 / (2.0 * nf)) / volume.powf(1.0 / nf);

    // Influence function of ln det(Cov): d^T Cov^{-1} d - n per sample.
    let chol = cov
        .cholesky()
        .ok_or_else(|| GeomError::DegenerateBody("sample covariance not PD".into()))?;
    let mut var_ln_det = 0.0;
    for p in &s.points {
        let d = p - &mean;
        let w = chol.solve(&d);
        let infl = d.dot(&w) - nf;
        var_ln_det += infl * infl;
    }
    var_ln_det /= nn * nn;
    // ln vol variance from the binomial acceptance count.
    let p_acc = s.acceptance_rate;
    let attempts = nn / p_acc;
    let var_ln_vol = (1.0 - p_acc) / (p_acc * attempts);
    // ln L = (1/2n) ln det Cov - (1/n) ln vol.
    let var_ln_l = var_ln_det / (4.0 * nf * nf) + var_ln_vol / (nf * nf);
    Ok((l, l * var_ln_l.sqrt()))
}

/// Reference value: the isotropy constant of the n-dimensional unit ball.
pub fn ball_isotropy_constant(n: usize) -> f64 {
    let vn = crate::moments::unit_ball_volume(n);
    // Sigma_c = vn/(n+2) I, volume = vn: L^{2n} = (vn/(n+2))^n / vn^{n+2}.
    let l2n = (vn / (n as f64 + 2.0)).powi(n as i32) / vn.powi(n as i32 + 2);
    l2n.powf(1.0 / (2.0 * n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::DVector;

    fn v(items: &[f64]) -> DVector<f64> {
        DVector::from_vec(items.to_vec())
    }

    fn cube(n: usize) -> ConvexBody {
        let mut pts = Vec::new();
        for mask in 0..(1u32 << n) {
            let coords: Vec<f64> = (0..n)
                .map(|i| if mask >> i & 1 == 1 { 0.5 } else { -0.5 })
                .collect();
            pts.push(DVector::from_vec(coords));
        }
        ConvexBody::polytope(&pts).unwrap()
    }

    #[test]
    fn cube_frame_is_identity_scale() {
        let frame = isotropic_frame(&cube(3)).unwrap();
        assert_relative_eq!(frame.m_k * frame.m_k, 1.0 / 12.0, max_relative = 1e-12);
        assert_relative_eq!(frame.linear.determinant().abs(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn rectangle_frame_rescales_to_square() {
        let rect = ConvexBody::polytope(&[
            v(&[-1.0, -0.25]),
            v(&[1.0, -0.25]),
            v(&[1.0, 0.25]),
            v(&[-1.0, 0.25]),
        ])
        .unwrap();
        let frame = isotropic_frame(&rect).unwrap();
        assert_relative_eq!(frame.m_k * frame.m_k, 1.0 / 12.0, max_relative = 1e-10);
        // Long axis shrinks by 1/2, short axis stretches by 2.
        assert_relative_eq!(frame.linear[(0, 0)].abs(), 0.5, max_relative = 1e-9);
        assert_relative_eq!(frame.linear[(1, 1)].abs(), 2.0, max_relative = 1e-9);
    }

    #[test]
    fn triangle_isotropy_constant() {
        let tri = ConvexBody::polytope(&[v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])]).unwrap();
        let l = isotropy_constant(&tri).unwrap();
        assert_relative_eq!(l, 108.0f64.powf(-0.25), max_relative = 1e-12);
    }

    #[test]
    fn disc_isotropy_constant() {
        let disc = ConvexBody::ball(v(&[3.0, -1.0]), 2.0).unwrap();
        let l = isotropy_constant(&disc).unwrap();
        assert_relative_eq!(
            l,
            1.0 / (2.0 * std::f64::consts::PI.sqrt()),
            max_relative = 1e-12
        );
        assert_relative_eq!(l, ball_isotropy_constant(2), max_relative = 1e-12);
    }

    #[test]
    fn cube_constant_every_dimension() {
        for n in 2..=6 {
            let l = isotropy_constant(&cube(n)).unwrap();
            assert_relative_eq!(l, 12.0f64.powf(-0.5), max_relative = 1e-10, epsilon = 1e-12);
        }
    }

    #[test]
    fn check_isotropic_flags_translation_and_anisotropy() {
        assert!(check_isotropic(&cube(2), 1e-10).unwrap().passes);

        let shifted = ConvexBody::polytope(&[
            v(&[0.5, -0.5]),
            v(&[1.5, -0.5]),
            v(&[1.5, 0.5]),
            v(&[0.5, 0.5]),
        ])
        .unwrap();
        let rep = check_isotropic(&shifted, 1e-10).unwrap();
        assert!(!rep.passes && rep.first_moment_resid > 1e-10);

        let rect = ConvexBody::polytope(&[
            v(&[-1.0, -0.25]),
            v(&[1.0, -0.25]),
            v(&[1.0, 0.25]),
            v(&[-1.0, 0.25]),
        ])
        .unwrap();
        let rep = check_isotropic(&rect, 1e-6).unwrap();
        assert!(!rep.passes && rep.isotropy_resid > 1e-6);

        // After framing, the rectangle passes.
        let frame = isotropic_frame(&rect).unwrap();
        if let ConvexBody::Polytope(p) = &rect {
            let framed = ConvexBody::Polytope(frame.apply_polytope(p).unwrap());
            assert!(check_isotropic(&framed, 1e-9).unwrap().passes);
        }
    }

    #[test]
    fn affine_invariance_of_l() {
        let body = ConvexBody::polytope(&[
            v(&[0.0, 0.0]),
            v(&[1.7, 0.3]),
            v(&[2.1, 1.9]),
            v(&[0.4, 1.2]),
        ])
        .unwrap();
        let l0 = isotropy_constant(&body).unwrap();
        let m = nalgebra::DMatrix::from_row_slice(2, 2, &[1.2, 0.7, -0.3, 0.9]);
        let t = v(&[5.0, -2.0]);
        if let ConvexBody::Polytope(p) = &body {
            let image = ConvexBody::Polytope(p.affine_image(&m, &t).unwrap());
            let l1 = isotropy_constant(&image).unwrap();
            assert_relative_eq!(l0, l1, max_relative = 1e-8);
        }
    }

    #[test]
    fn double_application_yields_orthogonal_frame() {
        let rect = ConvexBody::polytope(&[
            v(&[-1.0, -0.25]),
            v(&[1.0, -0.25]),
            v(&[1.0, 0.25]),
            v(&[-1.0, 0.25]),
        ])
        .unwrap();
        let frame = isotropic_frame(&rect).unwrap();
        if let ConvexBody::Polytope(p) = &rect {
            let iso = ConvexBody::Polytope(frame.apply_polytope(p).unwrap());
            let frame2 = isotropic_frame(&iso).unwrap();
            let should_be_eye = &frame2.linear * frame2.linear.transpose();
            assert_relative_eq!(
                (should_be_eye - nalgebra::DMatrix::identity(2, 2)).norm(),
                0.0,
                epsilon = 1e-8
            );
        }
    }

    #[test]
    fn mc_matches_exact_on_cube() {
        let body = cube(3);
        let exact = isotropy_constant(&body).unwrap();
        let (est, se) = mc_isotropy_constant(&body, 200_000, 5).unwrap();
        assert!((est - exact).abs() < 4.0 * se, "est {est}, exact {exact}, se {se}");
        let (est2, _) = mc_isotropy_constant(&body, 200_000, 5).unwrap();
        assert_eq!(est, est2);
    }

    #[test]
    fn degenerate_body_is_rejected() {
        // Flat "polytope" construction fails at the hull stage already.
        let flat = ConvexBody::polytope(&[
            v(&[0.0, 0.0]),
            v(&[1.0, 0.0]),
            v(&[2.0, 0.0]),
            v(&[3.0, 0.0]),
        ]);
        assert!(flat.is_err());
    }
}
