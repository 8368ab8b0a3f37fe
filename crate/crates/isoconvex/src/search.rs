//! Seeded hill-climbing over vertex polytopes for the isotropy constant,
//! with per-run logs and boundary diagnostics on the final body.

use std::path::Path;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::body::{ConvexBody, VPolytope};
use crate::curvature::{estimate_quadratic_form, normal_alignment, CurvatureVerdict};
use crate::error::{GeomError, Result};
use crate::isotropy::{isotropic_frame, isotropy_constant, IsotropicFrame};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchConfig {
    pub dim: usize,
    pub vertex_count: usize,
    pub mode: SearchMode,
    /// Propose mirrored vertex-pair moves and keep the body centrally
    /// symmetric (requires an even vertex count).
    pub symmetric: bool,
    pub initial_step: f64,
    /// Multiplied into the step after every 20-rejection streak.
    pub step_decay: f64,
    pub step_floor: f64,
    pub max_iterations: usize,
    pub seed: u64,
    /// When false (default), proposals that change the hull vertex count are
    /// rejected.
    pub allow_vertex_count_change: bool,
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim < crate::body::MIN_DIM || self.dim > crate::body::MAX_DIM {
            return Err(GeomError::UnsupportedDimension(self.dim));
        }
        if self.vertex_count < self.dim + 1 {
            return Err(GeomError::DegenerateInput(format!(
                "vertex count {} below n+1 = {}",
                self.vertex_count,
                self.dim + 1
            )));
        }
        if self.symmetric && self.vertex_count % 2 != 0 {
            return Err(GeomError::DegenerateInput(
                "symmetric search needs an even vertex count".into(),
            ));
        }
        if !(self.initial_step > 0.0)
            || !(self.step_floor > 0.0)
            || self.step_floor > self.initial_step
            || !(self.step_decay > 0.0 && self.step_decay < 1.0)
        {
            return Err(GeomError::DegenerateInput(
                "step schedule must be positive and decreasing".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub l_k: f64,
    pub accepted: bool,
    pub moved_vertex: usize,
    pub step_size: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexDiagnostic {
    pub vertex: Vec<f64>,
    pub norm: f64,
    /// |X|^2 |K| - (n+2) M_K^2 in the isotropic frame.
    pub sphere_residual: f64,
    pub curvature_verdict: String,
    /// Defined only where the outer normal is unique; None at vertices.
    pub normal_alignment: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunLog {
    pub format_version: u32,
    pub config: SearchConfig,
    pub records: Vec<IterationRecord>,
    pub final_vertices: Vec<Vec<f64>>,
    pub final_l: f64,
    pub diagnostics: Vec<VertexDiagnostic>,
}

/// L_K, isotropic frame, and per-vertex diagnostics of the isotropic image.
#[derive(Debug, Clone)]
pub struct CandidateDiagnostics {
    pub l_k: f64,
    pub frame: IsotropicFrame,
    pub iso_polytope: VPolytope,
    pub diagnostics: Vec<VertexDiagnostic>,
}

pub fn evaluate_candidate(p: &VPolytope) -> Result<CandidateDiagnostics> {
    let body = ConvexBody::Polytope(p.clone());
    let frame = isotropic_frame(&body)?;
    let iso = frame.apply_polytope(p)?;
    let iso_body = ConvexBody::Polytope(iso.clone());
    let n = p.dim() as f64;
    let m2 = frame.m_k * frame.m_k;
    let diagnostics = iso
        .vertices()
        .iter()
        .map(|x| {
            let verdict = estimate_quadratic_form(&iso_body, x, iso.diameter() / 8.0)
                .map(|e| match e.verdict {
                    CurvatureVerdict::Curved => "curved",
                    CurvatureVerdict::FlatPoint => "flat",
                    CurvatureVerdict::ConeLike => "cone",
                })
                .unwrap_or("unknown")
                .to_string();
            VertexDiagnostic {
                vertex: x.iter().copied().collect(),
                norm: x.norm(),
                sphere_residual: x.norm_squared() * frame.volume - (n + 2.0) * m2,
                curvature_verdict: verdict,
                normal_alignment: normal_alignment(&iso_body, x).ok(),
            }
        })
        .collect();
    Ok(CandidateDiagnostics {
        l_k: frame.l_k,
        frame,
        iso_polytope: iso,
        diagnostics,
    })
}

fn initial_generators(config: &SearchConfig, rng: &mut ChaCha8Rng) -> Vec<DVector<f64>> {
    // Unit-sphere points are always in convex position.
    let count = if config.symmetric {
        config.vertex_count / 2
    } else {
        config.vertex_count
    };
    (0..count)
        .map(|_| {
            loop {
                let mut v = DVector::zeros(config.dim);
                for i in 0..config.dim {
                    v[i] = rng.sample::<f64, _>(rand_distr::StandardNormal);
                }
                let nrm = v.norm();
                if nrm > 1e-6 {
                    return v / nrm;
                }
            }
        })
        .collect()
}

fn assemble(config: &SearchConfig, gens: &[DVector<f64>]) -> Vec<DVector<f64>> {
    if config.symmetric {
        gens.iter().cloned().chain(gens.iter().map(|v| -v)).collect()
    } else {
        gens.to_vec()
    }
}

fn try_hull(config: &SearchConfig, gens: &[DVector<f64>]) -> Option<(VPolytope, f64)> {
    let pts = assemble(config, gens);
    let hull = VPolytope::hull(&pts).ok()?;
    if !config.allow_vertex_count_change && hull.vertices().len() != config.vertex_count {
        return None;
    }
    let l = isotropy_constant(&ConvexBody::Polytope(hull.clone())).ok()?;
    Some((hull, l))
}

/// Strict-improvement hill climbing; always returns a log.
pub fn hill_climb(config: &SearchConfig) -> Result<RunLog> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut gens;
    let (mut current_hull, mut current_l) = loop {
        gens = initial_generators(config, &mut rng);
        if let Some(state) = try_hull(config, &gens) {
            break state;
        }
    };

    let better = |cand: f64, cur: f64| match config.mode {
        SearchMode::Maximize => cand > cur,
        SearchMode::Minimize => cand < cur,
    };

    let mut records = Vec::with_capacity(config.max_iterations);
    let mut step = config.initial_step;
    let mut streak = 0usize;
    for iteration in 0..config.max_iterations {
        let idx = rng.gen_range(0..gens.len());
        let mut proposal = gens.clone();
        for i in 0..config.dim {
            proposal[idx][i] += step * rng.sample::<f64, _>(rand_distr::StandardNormal);
        }
        let mut accepted = false;
        if let Some((hull, l)) = try_hull(config, &proposal) {
            if better(l, current_l) {
                gens = proposal;
                current_hull = hull;
                current_l = l;
                accepted = true;
            }
        }
        records.push(IterationRecord {
            iteration,
            l_k: current_l,
            accepted,
            moved_vertex: idx,
            step_size: step,
        });
        if accepted {
            streak = 0;
        } else {
            streak += 1;
            if streak >= 20 {
                streak = 0;
                step = (step * config.step_decay).max(config.step_floor);
            }
        }
    }

    let eval = evaluate_candidate(&current_hull)?;
    Ok(RunLog {
        format_version: FORMAT_VERSION,
        config: config.clone(),
        records,
        final_vertices: current_hull
            .vertices()
            .iter()
            .map(|v| v.iter().copied().collect())
            .collect(),
        final_l: eval.l_k,
        diagnostics: eval.diagnostics,
    })
}

pub fn save_run(log: &RunLog, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(log)
        .map_err(|e| GeomError::CorruptFile(e.to_string()))?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_run(path: &Path) -> Result<RunLog> {
    let text = std::fs::read_to_string(path)?;
    let log: RunLog =
        serde_json::from_str(&text).map_err(|e| GeomError::CorruptFile(e.to_string()))?;
    if log.format_version != FORMAT_VERSION {
        return Err(GeomError::FormatVersionMismatch {
            found: log.format_version,
            expected: FORMAT_VERSION,
        });
    }
    Ok(log)
}

/// CSV export of the accepted-L trace: iteration, l_k, accepted, moved_vertex,
/// step_size.
pub fn trace_csv(log: &RunLog) -> String {
    let mut out = String::from("iteration,l_k,accepted,moved_vertex,step_size\n");
    for r in &log.records {
        out.push_str(&format!(
            "{},{:.17},{},{},{:.17}\n",
            r.iteration, r.l_k, r.accepted, r.moved_vertex, r.step_size
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(items: &[f64]) -> DVector<f64> {
        DVector::from_vec(items.to_vec())
    }

    const TRIANGLE_L: f64 = 0.31020161970069987; // 108^{-1/4}
    const DISC_L: f64 = 0.28209479177387814; // 1/(2 sqrt(pi))

    fn config(mode: SearchMode, vertex_count: usize, seed: u64) -> SearchConfig {
        SearchConfig {
            dim: 2,
            vertex_count,
            mode,
            symmetric: false,
            initial_step: 0.3,
            step_decay: 0.7,
            step_floor: 1e-6,
            max_iterations: 1500,
            seed,
            allow_vertex_count_change: false,
        }
    }

    #[test]
    fn evaluate_triangle() {
        let p = VPolytope::hull(&[v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])]).unwrap();
        let d = evaluate_candidate(&p).unwrap();
        assert_relative_eq!(d.l_k, TRIANGLE_L, epsilon = 1e-12);
        let r0 = d.diagnostics[0].sphere_residual;
        for diag in &d.diagnostics {
            assert_relative_eq!(diag.sphere_residual, r0, epsilon = 1e-10);
            assert_eq!(diag.curvature_verdict, "cone");
            assert!(diag.normal_alignment.is_none());
        }
    }

    #[test]
    fn evaluate_square_residuals() {
        let p = VPolytope::hull(&[
            v(&[-0.5, -0.5]),
            v(&[0.5, -0.5]),
            v(&[0.5, 0.5]),
            v(&[-0.5, 0.5]),
        ])
        .unwrap();
        let d = evaluate_candidate(&p).unwrap();
        for diag in &d.diagnostics {
            assert_relative_eq!(diag.sphere_residual, 1.0 / 6.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn regular_polygons_decrease_toward_disc() {
        let mut last = f64::INFINITY;
        for m in [6usize, 12, 24, 48] {
            let pts: Vec<DVector<f64>> = (0..m)
                .map(|k| {
                    let t = std::f64::consts::TAU * k as f64 / m as f64;
                    v(&[t.cos(), t.sin()])
                })
                .collect();
            let p = VPolytope::hull(&pts).unwrap();
            let l = evaluate_candidate(&p).unwrap().l_k;
            assert!(l < last && l > DISC_L);
            last = l;
        }
        assert!((last - DISC_L) / DISC_L < 2e-3);
    }

    #[test]
    fn minimize_reaches_disc_value() {
        let log = hill_climb(&config(SearchMode::Minimize, 12, 5)).unwrap();
        assert!(
            (log.final_l - DISC_L) / DISC_L < 0.02,
            "final {} vs disc {}",
            log.final_l,
            DISC_L
        );
    }

    #[test]
    fn maximize_triangle_is_rigid() {
        let mut cfg = config(SearchMode::Maximize, 3, 1);
        cfg.max_iterations = 300;
        let log = hill_climb(&cfg).unwrap();
        // Affine invariance: every triangle has the same constant, so L never
        // moves beyond rounding noise (accepted ulp-level drift included).
        assert_relative_eq!(log.final_l, TRIANGLE_L, epsilon = 1e-8);
        for r in &log.records {
            assert_relative_eq!(r.l_k, TRIANGLE_L, epsilon = 1e-8);
        }
    }

    #[test]
    fn maximize_never_exceeds_triangle() {
        for seed in 0..3 {
            let mut cfg = config(SearchMode::Maximize, 5, seed);
            cfg.max_iterations = 400;
            let log = hill_climb(&cfg).unwrap();
            assert!(log.final_l <= TRIANGLE_L + 1e-6);
        }
    }

    #[test]
    fn accepted_sequence_is_strictly_monotone() {
        let log = hill_climb(&config(SearchMode::Minimize, 8, 3)).unwrap();
        let accepted: Vec<f64> = log
            .records
            .iter()
            .filter(|r| r.accepted)
            .map(|r| r.l_k)
            .collect();
        assert!(accepted.windows(2).all(|w| w[1] < w[0]));
        assert!(!accepted.is_empty());
    }

    #[test]
    fn symmetric_mode_keeps_symmetry() {
        let mut cfg = config(SearchMode::Minimize, 8, 7);
        cfg.symmetric = true;
        cfg.max_iterations = 200;
        let log = hill_climb(&cfg).unwrap();
        let verts: Vec<DVector<f64>> = log
            .final_vertices
            .iter()
            .map(|x| DVector::from_vec(x.clone()))
            .collect();
        for x in &verts {
            assert!(
                verts.iter().any(|y| (y + x).norm() < 1e-9),
                "missing mirror of {x:?}"
            );
        }
    }

    #[test]
    fn reproducible_runs() {
        let cfg = config(SearchMode::Minimize, 8, 11);
        let a = hill_climb(&cfg).unwrap();
        let b = hill_climb(&cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        let mut cfg = config(SearchMode::Minimize, 6, 2);
        cfg.max_iterations = 50;
        let log = hill_climb(&cfg).unwrap();
        save_run(&log, &path).unwrap();
        let loaded = load_run(&path).unwrap();
        assert_eq!(log.final_vertices, loaded.final_vertices);
        assert_eq!(log.records.len(), loaded.records.len());
    }

    #[test]
    fn load_rejects_bad_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        let mut cfg = config(SearchMode::Minimize, 6, 2);
        cfg.max_iterations = 10;
        let log = hill_climb(&cfg).unwrap();

        let mut value = serde_json::to_value(&log).unwrap();
        value["format_version"] = serde_json::json!(99);
        std::fs::write(&path, serde_json::to_string(&value).unwrap()).unwrap();
        assert!(matches!(
            load_run(&path),
            Err(GeomError::FormatVersionMismatch {
                found: 99,
                expected: FORMAT_VERSION
            })
        ));

        let text = serde_json::to_string(&log).unwrap();
        std::fs::write(&path, &text[..text.len() / 2]).unwrap();
        assert!(matches!(load_run(&path), Err(GeomError::CorruptFile(_))));
    }

    #[test]
    fn config_validation() {
        let mut cfg = config(SearchMode::Minimize, 2, 0);
        assert!(cfg.validate().is_err());
        cfg.vertex_count = 8;
        cfg.step_decay = 1.5;
        assert!(cfg.validate().is_err());
        cfg.step_decay = 0.5;
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn trace_csv_has_header_and_rows() {
        let mut cfg = config(SearchMode::Minimize, 6, 2);
        cfg.max_iterations = 5;
        let log = hill_climb(&cfg).unwrap();
        let csv = trace_csv(&log);
        let lines: Vec<&str> = csv.trim().lines().collect();
        assert_eq!(lines[0], "iteration,l_k,accepted,moved_vertex,step_size");
        assert_eq!(lines.len(), 6);
    }
}
