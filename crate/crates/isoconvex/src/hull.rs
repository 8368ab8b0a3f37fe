//! Incremental (beneath-beyond) convex hull for 2 <= n <= 6 with exact-sign
//! orientation predicates.
//!
//! Facets are simplicial; coplanar faces appear as several facets sharing a
//! hyperplane. Orientation signs are decided in f64 and re-decided in exact
//! rational arithmetic whenever the floating determinant is within its
//! Hadamard-style error envelope of zero, so near-coplanar insertions (spikes
//! with tiny height) stay consistent.

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::collections::HashMap;

use crate::body::{Facet, VPolytope, MAX_DIM, MIN_DIM};
use crate::error::{GeomError, Result};

/// Sign of `det(rows)` decided exactly.
pub fn det_sign(rows: &[DVector<f64>]) -> i32 {
    let n = rows.len();
    let mut m = DMatrix::zeros(n, n);
    for (i, r) in rows.iter().enumerate() {
        for j in 0..n {
            m[(i, j)] = r[j];
        }
    }
    let det = m.clone().lu().determinant();
    let mut envelope = 1e-12_f64;
    for r in rows {
        envelope *= r.norm().max(1e-30);
    }
    if det.abs() > envelope {
        return if det > 0.0 { 1 } else { -1 };
    }
    rational_det_sign(rows)
}

fn rational_det_sign(rows: &[DVector<f64>]) -> i32 {
    let n = rows.len();
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| BigRational::from_float(x).unwrap_or_else(BigRational::zero))
                .collect()
        })
        .collect();
    let mut sign = 1i32;
    for col in 0..n {
        let pivot = (col..n).find(|&i| !m[i][col].is_zero());
        let Some(p) = pivot else { return 0 };
        if p != col {
            m.swap(p, col);
            sign = -sign;
        }
        let pivot_val = m[col][col].clone();
        for i in col + 1..n {
            if m[i][col].is_zero() {
                continue;
            }
            let factor = &m[i][col] / &pivot_val;
            for j in col..n {
                let delta = &factor * &m[col][j];
                m[i][j] = &m[i][j] - delta;
            }
        }
    }
    for i in 0..n {
        if m[i][i].is_zero() {
            return 0;
        }
        if m[i][i].is_negative() {
            sign = -sign;
        }
    }
    sign
}

/// Sign of the signed height of `p` over the oriented hyperplane through
/// `verts` (n points in R^n): sign of `det(v_1 - p, ..., v_n - p)`.
fn orient(verts: &[&DVector<f64>], p: &DVector<f64>) -> i32 {
    let rows: Vec<DVector<f64>> = verts.iter().map(|v| *v - p).collect();
    det_sign(&rows)
}

struct HullFacet {
    /// Ordered so that `orient(vertices, interior_point) < 0`.
    vertices: Vec<usize>,
}

impl HullFacet {
    fn visible_from(&self, points: &[DVector<f64>], p: &DVector<f64>) -> i32 {
        let verts: Vec<&DVector<f64>> = self.vertices.iter().map(|&i| &points[i]).collect();
        orient(&verts, p)
    }
}

/// Full convex hull pipeline: initial simplex, incremental insertion, extreme
/// vertex filtering, facet hyperplane fitting.
pub fn convex_hull(points: &[DVector<f64>]) -> Result<VPolytope> {
    build(points, true)
}

fn build(points: &[DVector<f64>], allow_refilter: bool) -> Result<VPolytope> {
    if points.is_empty() {
        return Err(GeomError::DegenerateInput("no points".into()));
    }
    let n = points[0].len();
    if !(MIN_DIM..=MAX_DIM).contains(&n) {
        return Err(GeomError::UnsupportedDimension(n));
    }
    if points.iter().any(|p| p.len() != n) {
        return Err(GeomError::DegenerateInput("mixed point dimensions".into()));
    }
    if points.len() < n + 1 {
        return Err(GeomError::DegenerateInput(format!(
            "need at least {} points in R^{n}",
            n + 1
        )));
    }

    let seed = initial_simplex(points, n)?;
    let interior: DVector<f64> = {
        let mut c = DVector::zeros(n);
        for &i in &seed {
            c += &points[i];
        }
        c / (n as f64 + 1.0)
    };

    // Facets of the seed simplex: all n-subsets, oriented against the interior.
    let mut facets: Vec<HullFacet> = Vec::new();
    for drop in 0..=n {
        let verts: Vec<usize> = seed
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != drop)
            .map(|(_, &i)| i)
            .collect();
        facets.push(orient_facet(points, verts, &interior));
    }

    let in_seed = |i: usize| seed.contains(&i);
    for idx in 0..points.len() {
        if in_seed(idx) {
            continue;
        }
        let p = &points[idx];
        let visible: Vec<usize> = (0..facets.len())
            .filter(|&f| facets[f].visible_from(points, p) > 0)
            .collect();
        if visible.is_empty() {
            continue; // inside or on the current hull
        }
        // Horizon ridges: ridge of a visible facet whose other incident facet
        // is not visible (or absent, which cannot happen on a closed complex).
        let mut ridge_owner: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        for (fi, facet) in facets.iter().enumerate() {
            for drop in 0..facet.vertices.len() {
                let mut ridge: Vec<usize> = facet
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != drop)
                    .map(|(_, &v)| v)
                    .collect();
                ridge.sort_unstable();
                ridge_owner.entry(ridge).or_default().push(fi);
            }
        }
        let visible_set: std::collections::HashSet<usize> = visible.iter().copied().collect();
        let mut new_facets: Vec<HullFacet> = Vec::new();
        for (ridge, owners) in &ridge_owner {
            let n_vis = owners.iter().filter(|f| visible_set.contains(f)).count();
            if n_vis == 1 && owners.len() == 2 {
                let mut verts = ridge.clone();
                verts.push(idx);
                new_facets.push(orient_facet(points, verts, &interior));
            }
        }
        let mut kept: Vec<HullFacet> = Vec::new();
        for (fi, f) in facets.into_iter().enumerate() {
            if !visible_set.contains(&fi) {
                kept.push(f);
            }
        }
        kept.extend(new_facets);
        facets = kept;
    }

    finish(points, facets, &interior, n, allow_refilter)
}

/// Greedy affinely independent seed: n+1 indices spanning R^n.
fn initial_simplex(points: &[DVector<f64>], n: usize) -> Result<Vec<usize>> {
    let mut chosen: Vec<usize> = vec![0];
    let mut basis: Vec<DVector<f64>> = Vec::new();
    while basis.len() < n {
        let mut best: Option<(usize, f64, DVector<f64>)> = None;
        for (i, p) in points.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let mut d = p - &points[chosen[0]];
            for b in &basis {
                let proj = d.dot(b);
                d -= b * proj;
            }
            let norm = d.norm();
            if best.as_ref().map_or(true, |(_, bn, _)| norm > *bn) {
                best = Some((i, norm, d));
            }
        }
        let (i, norm, d) = best.ok_or_else(|| {
            GeomError::DegenerateInput("not enough points for a full-dimensional hull".into())
        })?;
        let scale = points[i].norm().max(points[chosen[0]].norm()).max(1.0);
        if norm <= 1e-12 * scale {
            return Err(GeomError::DegenerateInput(
                "points are not full-dimensional".into(),
            ));
        }
        chosen.push(i);
        basis.push(d / norm);
    }
    Ok(chosen)
}

fn orient_facet(points: &[DVector<f64>], mut verts: Vec<usize>, interior: &DVector<f64>) -> HullFacet {
    let refs: Vec<&DVector<f64>> = verts.iter().map(|&i| &points[i]).collect();
    if orient(&refs, interior) > 0 {
        verts.swap(0, 1);
    }
    HullFacet { vertices: verts }
}

fn finish(
    points: &[DVector<f64>],
    facets: Vec<HullFacet>,
    interior: &DVector<f64>,
    n: usize,
    allow_refilter: bool,
) -> Result<VPolytope> {
    // Vertex set = union over facets.
    let mut vertex_ids: Vec<usize> = facets.iter().flat_map(|f| f.vertices.clone()).collect();
    vertex_ids.sort_unstable();
    vertex_ids.dedup();

    // Hyperplanes in f64, oriented outward.
    let scale = points
        .iter()
        .map(|p| p.norm())
        .fold(1.0f64, f64::max);
    let planes: Vec<(DVector<f64>, f64)> = facets
        .iter()
        .map(|f| facet_plane(points, &f.vertices, interior))
        .collect();

    // Filter non-extreme vertices stranded on edges between coplanar facets:
    // a true vertex is the strict unique maximizer of the averaged incident
    // facet normal.
    let mut keep: Vec<usize> = Vec::new();
    for &vi in &vertex_ids {
        let mut u = DVector::zeros(n);
        for (f, (nrm, _)) in facets.iter().zip(&planes) {
            if f.vertices.contains(&vi) {
                u += nrm;
            }
        }
        let len = u.norm();
        if len < 1e-14 {
            continue;
        }
        u /= len;
        let own = u.dot(&points[vi]);
        let other_max = vertex_ids
            .iter()
            .filter(|&&w| w != vi)
            .map(|&w| u.dot(&points[w]))
            .fold(f64::NEG_INFINITY, f64::max);
        if own > other_max + 1e-12 * scale {
            keep.push(vi);
        }
    }

    if keep.len() < vertex_ids.len() && allow_refilter {
        let kept_points: Vec<DVector<f64>> = keep.iter().map(|&i| points[i].clone()).collect();
        return build(&kept_points, false);
    }
    if keep.len() < n + 1 {
        return Err(GeomError::DegenerateInput(
            "hull collapsed below full dimension".into(),
        ));
    }

    let remap: HashMap<usize, usize> = keep.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let vertices: Vec<DVector<f64>> = keep.iter().map(|&i| points[i].clone()).collect();
    let mut out_facets: Vec<Facet> = facets
        .iter()
        .zip(planes)
        .filter(|(f, _)| f.vertices.iter().all(|v| remap.contains_key(v)))
        .map(|(f, (normal, offset))| {
            let mut vertices: Vec<usize> = f.vertices.iter().map(|v| remap[v]).collect();
            // Orientation lives in (normal, offset), so the index order is
            // free to canonicalize.
            vertices.sort_unstable();
            Facet {
                vertices,
                normal,
                offset,
            }
        })
        .collect();
    // Facet creation order depends on hash-map iteration during insertion;
    // sort for reproducible output.
    out_facets.sort_by(|a, b| a.vertices.cmp(&b.vertices));

    Ok(VPolytope::from_parts(vertices, out_facets, n))
}

/// Outward unit normal and offset of the hyperplane through the facet vertices.
fn facet_plane(
    points: &[DVector<f64>],
    verts: &[usize],
    interior: &DVector<f64>,
) -> (DVector<f64>, f64) {
    let n = points[0].len();
    let base = &points[verts[0]];
    // Orthonormalize the facet edges, then take the basis vector with the
    // largest residual out of their span as the normal direction.
    let mut span: Vec<DVector<f64>> = Vec::with_capacity(n - 1);
    for &vi in &verts[1..] {
        let mut d = &points[vi] - base;
        for b in &span {
            let proj = d.dot(b);
            d -= b * proj;
        }
        let nrm = d.norm();
        if nrm > 1e-14 {
            span.push(d / nrm);
        }
    }
    let mut normal = DVector::zeros(n);
    let mut best = -1.0f64;
    for i in 0..n {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        for b in &span {
            let proj = e.dot(b);
            e -= b * proj;
        }
        let nrm = e.norm();
        if nrm > best {
            best = nrm;
            normal = e / nrm;
        }
    }
    let mut offset = normal.dot(base);
    if normal.dot(interior) > offset {
        normal = -normal;
        offset = -offset;
    }
    (normal, offset)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(items: &[f64]) -> DVector<f64> {
        DVector::from_vec(items.to_vec())
    }

    #[test]
    fn square_plus_center_drops_interior_point() {
        let pts = vec![
            v(&[0.0, 0.0]),
            v(&[1.0, 0.0]),
            v(&[1.0, 1.0]),
            v(&[0.0, 1.0]),
            v(&[0.5, 0.5]),
        ];
        let p = convex_hull(&pts).unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.facets().len(), 4);
    }

    #[test]
    fn simplex_is_its_own_hull() {
        for n in 2..=6 {
            let mut pts = vec![DVector::zeros(n)];
            for i in 0..n {
                let mut e = DVector::zeros(n);
                e[i] = 1.0;
                pts.push(e);
            }
            let p = convex_hull(&pts).unwrap();
            assert_eq!(p.vertices().len(), n + 1, "n = {n}");
            assert_eq!(p.facets().len(), n + 1, "n = {n}");
        }
    }

    #[test]
    fn collinear_edge_midpoint_is_not_a_vertex() {
        let pts = vec![
            v(&[0.0, 0.0]),
            v(&[0.5, 0.0]), // exact midpoint of the bottom edge
            v(&[1.0, 0.0]),
            v(&[1.0, 1.0]),
            v(&[0.0, 1.0]),
        ];
        let p = convex_hull(&pts).unwrap();
        assert_eq!(p.vertices().len(), 4);
    }

    #[test]
    fn rank_deficient_points_rejected() {
        let pts = vec![v(&[0.0, 0.0]), v(&[1.0, 1.0]), v(&[2.0, 2.0]), v(&[3.0, 3.0])];
        assert!(matches!(
            convex_hull(&pts),
            Err(GeomError::DegenerateInput(_))
        ));
    }

    #[test]
    fn cube_has_twelve_triangular_facets() {
        let mut pts = Vec::new();
        for ix in 0..2 {
            for iy in 0..2 {
                for iz in 0..2 {
                    pts.push(v(&[ix as f64, iy as f64, iz as f64]));
                }
            }
        }
        let p = convex_hull(&pts).unwrap();
        assert_eq!(p.vertices().len(), 8);
        assert_eq!(p.facets().len(), 12);
    }

    #[test]
    fn det_sign_near_degenerate_uses_exact_path() {
        // One ulp away from singular: f64 det sits inside the error envelope,
        // so the sign must come from the rational path.
        let rows = vec![v(&[1.0, 1.0]), v(&[1.0, 1.0f64.next_up()])];
        assert_eq!(det_sign(&rows), 1);
        let rows = vec![v(&[1.0, 1.0]), v(&[1.0, 1.0])];
        assert_eq!(det_sign(&rows), 0);
    }
}
