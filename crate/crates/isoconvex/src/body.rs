//! Convex bodies and the exact-integration currency (`MomentData`).
//!
//! Bodies are immutable after construction and safe to share across threads.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::hull;

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 6;

/// Closed halfspace `{ x : <x,u> <= offset }` with unit normal `u`.
#[derive(Debug, Clone)]
pub struct Halfspace {
    pub normal: DVector<f64>,
    pub offset: f64,
}

impl Halfspace {
    /// Normalizes the normal; fails on a zero vector.
    pub fn new(normal: DVector<f64>, offset: f64) -> Result<Self> {
        let len = normal.norm();
        if len < 1e-300 {
            return Err(GeomError::DegenerateInput("zero halfspace normal".into()));
        }
        Ok(Self {
            normal: normal / len,
            offset: offset / len,
        })
    }

    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        self.normal.dot(x) <= self.offset + tol
    }

    /// The complementary halfspace `{ x : <x,u> >= offset }`, written with flipped normal.
    pub fn complement(&self) -> Halfspace {
        Halfspace {
            normal: -&self.normal,
            offset: -self.offset,
        }
    }
}

/// A nondegenerate simplex: n+1 points in R^n.
#[derive(Debug, Clone)]
pub struct Simplex {
    pub vertices: Vec<DVector<f64>>,
}

/// A facet of a simplicial hull: n vertex indices plus the outward hyperplane.
#[derive(Debug, Clone)]
pub struct Facet {
    pub vertices: Vec<usize>,
    pub normal: DVector<f64>,
    pub offset: f64,
}

/// Polytope in vertex representation, with a simplicial facet list from the hull build.
#[derive(Debug, Clone)]
pub struct VPolytope {
    vertices: Vec<DVector<f64>>,
    facets: Vec<Facet>,
    dim: usize,
}

impl VPolytope {
    /// Convex hull of a point set; keeps only extreme points.
    pub fn hull(points: &[DVector<f64>]) -> Result<Self> {
        hull::convex_hull(points)
    }

    pub(crate) fn from_parts(vertices: Vec<DVector<f64>>, facets: Vec<Facet>, dim: usize) -> Self {
        Self {
            vertices,
            facets,
            dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, v) in self.vertices.iter().enumerate() {
            for w in &self.vertices[i + 1..] {
                d = d.max((v - w).norm());
            }
        }
        d
    }

    /// Signed distance to the boundary in the facet metric: max over facets of
    /// `<x,u> - offset`. Negative inside, zero on the boundary.
    pub fn facet_excess(&self, x: &DVector<f64>) -> f64 {
        self.facets
            .iter()
            .map(|f| f.normal.dot(x) - f.offset)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        self.facet_excess(x) <= tol
    }

    /// Applies an affine map `x -> m x + t` to the vertices and re-hulls.
    pub fn affine_image(&self, m: &DMatrix<f64>, t: &DVector<f64>) -> Result<VPolytope> {
        let pts: Vec<DVector<f64>> = self.vertices.iter().map(|v| m * v + t).collect();
        VPolytope::hull(&pts)
    }
}

/// Parameters of the paraboloid-cap model body `{ (Y,y) : y_b(Y) <= y <= a }`.
///
/// The model boundary is `y_b(Y) = |Y|^2 / (2 R_eff(Y))` where `R_eff` wanders
/// inside the sandwich `[R - eps, R + eps]`; `eps = 0` gives the exact
/// paraboloid. The wobble depends on `|Y|` only, so the body stays rotationally
/// symmetric about the height axis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CapSpec {
    pub n: usize,
    /// Curvature radius of the approximating ball at the apex.
    pub r: f64,
    /// Cut height of the flat top.
    pub a: f64,
    /// Centroid height parameter of the ambient body (enters the weighted integrands).
    pub b: f64,
    /// Diagonal scalings, product 1.
    pub lambda: Vec<f64>,
    /// Half-width of the curvature-radius sandwich, in length units.
    pub eps: f64,
}

impl CapSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n < MIN_DIM || self.n > MAX_DIM {
            return Err(GeomError::UnsupportedDimension(self.n));
        }
        if !(self.r > 0.0) || !(self.a > 0.0) {
            return Err(GeomError::DegenerateInput("cap model needs R > 0, a > 0".into()));
        }
        if self.a >= self.r / 4.0 {
            return Err(GeomError::DegenerateInput(format!(
                "cap cut a = {} outside the asymptotic regime a < R/4 = {}",
                self.a,
                self.r / 4.0
            )));
        }
        if self.lambda.len() != self.n {
            return Err(GeomError::DegenerateInput("lambda length != n".into()));
        }
        let prod: f64 = self.lambda.iter().product();
        if (prod - 1.0).abs() > 1e-12 || self.lambda.iter().any(|&l| !(l > 0.0)) {
            return Err(GeomError::DegenerateInput(
                "lambda must be positive with product 1".into(),
            ));
        }
        if self.eps < 0.0 || self.eps > self.r / 4.0 {
            return Err(GeomError::DegenerateInput(
                "eps must lie in [0, R/4]".into(),
            ));
        }
        Ok(())
    }

    pub fn isotropic_lambda(n: usize, r: f64, a: f64) -> Self {
        CapSpec {
            n,
            r,
            a,
            b: 0.0,
            lambda: vec![1.0; n],
            eps: 0.0,
        }
    }

    /// Smooth radial wobble in [-1, 1] steering the effective radius.
    pub fn wobble_radial(&self, tangential_norm: f64) -> f64 {
        let scale = (2.0 * self.r * self.a).sqrt();
        (3.0 * tangential_norm / scale).cos()
    }

    /// Effective curvature radius at tangential distance `rho`, inside
    /// `[R - eps, R + eps]`.
    pub fn effective_radius(&self, tangential_norm: f64) -> f64 {
        self.r - self.eps * self.wobble_radial(tangential_norm)
    }

    /// Model boundary height over the tangential coordinates.
    pub fn boundary_height(&self, tangential: &DVector<f64>) -> f64 {
        self.boundary_height_radial(tangential.norm())
    }

    pub fn boundary_height_radial(&self, tangential_norm: f64) -> f64 {
        tangential_norm * tangential_norm / (2.0 * self.effective_radius(tangential_norm))
    }

    /// Largest tangential radius of the body: where the boundary meets `y = a`.
    pub fn max_tangential_radius(&self) -> f64 {
        if self.eps == 0.0 {
            return (2.0 * self.r * self.a).sqrt();
        }
        let mut lo = 0.0f64;
        let mut hi = (2.0 * (self.r + self.eps) * self.a).sqrt();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.boundary_height_radial(mid) < self.a {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// The universe of input bodies.
#[derive(Debug, Clone)]
pub enum ConvexBody {
    Polytope(VPolytope),
    Ball {
        center: DVector<f64>,
        radius: f64,
    },
    Ellipsoid {
        center: DVector<f64>,
        /// Positive definite; the body is `{ x : (x-c)^T shape^{-1} (x-c) <= 1 }`.
        shape: DMatrix<f64>,
    },
    CapModel(CapSpec),
}

impl ConvexBody {
    pub fn polytope(points: &[DVector<f64>]) -> Result<Self> {
        Ok(ConvexBody::Polytope(VPolytope::hull(points)?))
    }

    pub fn ball(center: DVector<f64>, radius: f64) -> Result<Self> {
        check_dim(center.len())?;
        if !(radius > 0.0) {
            return Err(GeomError::DegenerateInput("ball radius must be > 0".into()));
        }
        Ok(ConvexBody::Ball { center, radius })
    }

    pub fn ellipsoid(center: DVector<f64>, shape: DMatrix<f64>) -> Result<Self> {
        let n = center.len();
        check_dim(n)?;
        if shape.nrows() != n || shape.ncols() != n {
            return Err(GeomError::DegenerateInput("shape matrix dimension mismatch".into()));
        }
        let sym_err = (&shape - shape.transpose()).norm();
        if sym_err > 1e-9 * shape.norm().max(1.0) {
            return Err(GeomError::DegenerateInput("shape matrix not symmetric".into()));
        }
        let eig = shape.clone().symmetric_eigen();
        if eig.eigenvalues.iter().any(|&e| !(e > 0.0)) {
            return Err(GeomError::DegenerateInput(
                "shape matrix not positive definite".into(),
            ));
        }
        Ok(ConvexBody::Ellipsoid { center, shape })
    }

    pub fn cap_model(spec: CapSpec) -> Result<Self> {
        spec.validate()?;
        Ok(ConvexBody::CapModel(spec))
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Polytope(p) => p.dim(),
            ConvexBody::Ball { center, .. } => center.len(),
            ConvexBody::Ellipsoid { center, .. } => center.len(),
            ConvexBody::CapModel(spec) => spec.n,
        }
    }

    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        match self {
            ConvexBody::Polytope(p) => p.contains(x, tol),
            ConvexBody::Ball { center, radius } => (x - center).norm() <= radius + tol,
            ConvexBody::Ellipsoid { center, shape } => {
                let d = x - center;
                let chol = shape.clone().cholesky().expect("validated PD");
                let w = chol.solve(&d);
                d.dot(&w) <= 1.0 + tol
            }
            ConvexBody::CapModel(spec) => {
                let n = spec.n;
                let tangential = x.rows(0, n - 1).into_owned();
                let y = x[n - 1];
                y <= spec.a + tol && y + tol >= spec.boundary_height(&tangential)
            }
        }
    }

    /// Axis-aligned bounding box (lower, upper).
    pub fn bounding_box(&self) -> (DVector<f64>, DVector<f64>) {
        match self {
            ConvexBody::Polytope(p) => {
                let n = p.dim();
                let mut lo = DVector::from_element(n, f64::INFINITY);
                let mut hi = DVector::from_element(n, f64::NEG_INFINITY);
                for v in p.vertices() {
                    for i in 0..n {
                        lo[i] = lo[i].min(v[i]);
                        hi[i] = hi[i].max(v[i]);
                    }
                }
                (lo, hi)
            }
            ConvexBody::Ball { center, radius } => (
                center.add_scalar(-radius),
                center.add_scalar(*radius),
            ),
            ConvexBody::Ellipsoid { center, shape } => {
                // Extent along e_i is sqrt(shape_ii).
                let n = center.len();
                let mut lo = center.clone();
                let mut hi = center.clone();
                for i in 0..n {
                    let ext = shape[(i, i)].sqrt();
                    lo[i] -= ext;
                    hi[i] += ext;
                }
                (lo, hi)
            }
            ConvexBody::CapModel(spec) => {
                let n = spec.n;
                let ext = spec.max_tangential_radius();
                let mut lo = DVector::from_element(n, -ext);
                let mut hi = DVector::from_element(n, ext);
                lo[n - 1] = 0.0;
                hi[n - 1] = spec.a;
                (lo, hi)
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            ConvexBody::Polytope(p) => p.diameter(),
            ConvexBody::Ball { radius, .. } => 2.0 * radius,
            ConvexBody::Ellipsoid { shape, .. } => {
                2.0 * shape
                    .clone()
                    .symmetric_eigen()
                    .eigenvalues
                    .iter()
                    .fold(0.0f64, |m, &e| m.max(e))
                    .sqrt()
            }
            ConvexBody::CapModel(_) => {
                let (lo, hi) = self.bounding_box();
                (hi - lo).norm()
            }
        }
    }

    /// Distance from `x` to the boundary, estimated through membership probes.
    pub fn boundary_distance(&self, x: &DVector<f64>) -> f64 {
        match self {
            ConvexBody::Polytope(p) => p.facet_excess(x).abs(),
            ConvexBody::Ball { center, radius } => ((x - center).norm() - radius).abs(),
            ConvexBody::Ellipsoid { .. } | ConvexBody::CapModel(_) => {
                // Scale-probe along the membership indicator; adequate for the
                // boundary-point tolerance checks.
                let tol = 1e-13 * self.diameter().max(1.0);
                if self.contains(x, tol) && !self.contains(x, -tol * 1e3) {
                    0.0
                } else {
                    let mut lo = 0.0f64;
                    let mut hi = self.diameter();
                    // distance to boundary along the ray through the body's box center
                    let (blo, bhi) = self.bounding_box();
                    let c = (blo + bhi) * 0.5;
                    let dir = {
                        let d = x - &c;
                        let nrm = d.norm();
                        if nrm < 1e-15 {
                            return self.diameter();
                        }
                        d / nrm
                    };
                    for _ in 0..80 {
                        let mid = 0.5 * (lo + hi);
                        if self.contains(&(&c + &dir * mid), 0.0) {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    ((x - &c).norm() - lo).abs()
                }
            }
        }
    }
}

fn check_dim(n: usize) -> Result<()> {
    if !(MIN_DIM..=MAX_DIM).contains(&n) {
        return Err(GeomError::UnsupportedDimension(n));
    }
    Ok(())
}

/// Volume and the first two moments about the origin of the current coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentData {
    pub volume: f64,
    pub first_moment: DVector<f64>,
    pub second_moment: DMatrix<f64>,
}

impl MomentData {
    pub fn zero(n: usize) -> Self {
        Self {
            volume: 0.0,
            first_moment: DVector::zeros(n),
            second_moment: DMatrix::zeros(n, n),
        }
    }

    pub fn centroid(&self) -> DVector<f64> {
        &self.first_moment / self.volume
    }

    /// `second_moment - g g^T * volume`: the second moment about the centroid.
    pub fn centered_second(&self) -> DMatrix<f64> {
        let g = self.centroid();
        &self.second_moment - (&g * g.transpose()) * self.volume
    }

    pub fn add(&self, other: &MomentData) -> MomentData {
        MomentData {
            volume: self.volume + other.volume,
            first_moment: &self.first_moment + &other.first_moment,
            second_moment: &self.second_moment + &other.second_moment,
        }
    }

    pub fn sub(&self, other: &MomentData) -> MomentData {
        MomentData {
            volume: self.volume - other.volume,
            first_moment: &self.first_moment - &other.first_moment,
            second_moment: &self.second_moment - &other.second_moment,
        }
    }
}

// ---------------------------------------------------------------------------
// JSON wire format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum BodyJson {
    Vpolytope {
        vertices: Vec<Vec<f64>>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Ellipsoid {
        center: Vec<f64>,
        shape: Vec<Vec<f64>>,
    },
    Capmodel {
        n: usize,
        #[serde(rename = "R")]
        r: f64,
        a: f64,
        b: f64,
        lambda: Vec<f64>,
        eps: f64,
    },
}

impl ConvexBody {
    pub fn to_json(&self) -> serde_json::Value {
        let j = match self {
            ConvexBody::Polytope(p) => BodyJson::Vpolytope {
                vertices: p
                    .vertices()
                    .iter()
                    .map(|v| v.iter().copied().collect())
                    .collect(),
            },
            ConvexBody::Ball { center, radius } => BodyJson::Ball {
                center: center.iter().copied().collect(),
                radius: *radius,
            },
            ConvexBody::Ellipsoid { center, shape } => BodyJson::Ellipsoid {
                center: center.iter().copied().collect(),
                shape: (0..shape.nrows())
                    .map(|i| (0..shape.ncols()).map(|j| shape[(i, j)]).collect())
                    .collect(),
            },
            ConvexBody::CapModel(spec) => BodyJson::Capmodel {
                n: spec.n,
                r: spec.r,
                a: spec.a,
                b: spec.b,
                lambda: spec.lambda.clone(),
                eps: spec.eps,
            },
        };
        serde_json::to_value(j).expect("body serialization")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let j: BodyJson = serde_json::from_value(value.clone())
            .map_err(|e| GeomError::DegenerateInput(format!("bad body JSON: {e}")))?;
        match j {
            BodyJson::Vpolytope { vertices } => {
                if vertices.is_empty() {
                    return Err(GeomError::DegenerateInput("empty vertex list".into()));
                }
                let pts: Vec<DVector<f64>> = vertices
                    .into_iter()
                    .map(DVector::from_vec)
                    .collect();
                ConvexBody::polytope(&pts)
            }
            BodyJson::Ball { center, radius } => {
                ConvexBody::ball(DVector::from_vec(center), radius)
            }
            BodyJson::Ellipsoid { center, shape } => {
                let n = center.len();
                let mut m = DMatrix::zeros(n, n);
                if shape.len() != n || shape.iter().any(|r| r.len() != n) {
                    return Err(GeomError::DegenerateInput("ragged shape matrix".into()));
                }
                for (i, row) in shape.iter().enumerate() {
                    for (k, &x) in row.iter().enumerate() {
                        m[(i, k)] = x;
                    }
                }
                ConvexBody::ellipsoid(DVector::from_vec(center), m)
            }
            BodyJson::Capmodel {
                n,
                r,
                a,
                b,
                lambda,
                eps,
            } => ConvexBody::cap_model(CapSpec {
                n,
                r,
                a,
                b,
                lambda,
                eps,
            }),
        }
    }
}
