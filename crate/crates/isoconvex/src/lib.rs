//! Computational convex geometry around the isotropy constant L_K.
//!
//! The crate computes exact moments of convex bodies, places them in isotropic
//! position, applies local boundary perturbations (spikes and slab cuts),
//! evaluates the second-order expansions of L_K those perturbations induce,
//! and verifies the closed-form paraboloid-cap integrals and boundary
//! diagnostics (sphere condition, normal alignment, generalized curvature)
//! that characterize local maximizers.

pub mod body;
pub mod caps;
pub mod curvature;
pub mod error;
pub mod hull;
pub mod isotropy;
pub mod moments;
pub mod perturb;
pub mod quad;
pub mod sample;
pub mod search;

pub use body::{CapSpec, ConvexBody, Halfspace, MomentData, Simplex, VPolytope};
pub use error::{GeomError, Result};
pub use isotropy::{isotropic_frame, isotropy_constant, IsotropicFrame};
