//! Two-parameter bifurcation sweep over the cusp and nilpotent-saddle
//! unfoldings.
//!
//! For every grid cell the singularities of the field are located by
//! damped Newton iteration seeded from a coarse scan, classified through
//! their linearization, and tagged when the cell sits on a known
//! bifurcation curve. On fold-curve samples the unit-time orbit along the
//! attracting center manifold is generated and its dimension estimated.

use crate::boxdim::{estimate_dim_boxcount, DimensionEstimate, EstimatorCfg, PointCloud};
use crate::classify::classify_nilpotent;
use crate::error::EstimateError;
use crate::par::map_ordered;
use crate::poly::{BiPoly, PlanarVectorField};
use crate::unitmap::OrbitCfg;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

/// Which unfolding the sweep walks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Unfolding {
    /// `x' = y, y' = b1 + b2 x + x^2 - x y`
    Bt,
    /// `x' = y, y' = b1 x + b2 y + x^3 - x^2 y`
    DegenerateBt,
}

impl Unfolding {
    pub fn label(&self) -> &'static str {
        match self {
            Unfolding::Bt => "bt",
            Unfolding::DegenerateBt => "degenerate-bt",
        }
    }

    /// The field at parameters `(b1, b2)`, in float coefficients.
    pub fn field_f64(&self, b1: f64, b2: f64) -> PlanarVectorField<f64> {
        let trunc = 6;
        let p = BiPoly::<f64>::y(trunc);
        let mut q = BiPoly::zero(trunc);
        match self {
            Unfolding::Bt => {
                q.add_term(0, 0, b1);
                q.add_term(1, 0, b2);
                q.add_term(2, 0, 1.0);
                q.add_term(1, 1, -1.0);
            }
            Unfolding::DegenerateBt => {
                q.add_term(1, 0, b1);
                q.add_term(0, 1, b2);
                q.add_term(3, 0, 1.0);
                q.add_term(2, 1, -1.0);
            }
        }
        PlanarVectorField::new(p, q).unwrap()
    }

    /// Exact-coefficient field for nilpotent classification at rational
    /// parameter values.
    pub fn field_exact(&self, b1: &BigRational, b2: &BigRational) -> PlanarVectorField<BigRational> {
        let trunc = 8;
        let one = BigRational::from_integer(BigInt::from(1));
        let p = BiPoly::<BigRational>::y(trunc);
        let mut q = BiPoly::zero(trunc);
        match self {
            Unfolding::Bt => {
                q.add_term(0, 0, b1.clone());
                q.add_term(1, 0, b2.clone());
                q.add_term(2, 0, one.clone());
                q.add_term(1, 1, -one);
            }
            Unfolding::DegenerateBt => {
                q.add_term(1, 0, b1.clone());
                q.add_term(0, 1, b2.clone());
                q.add_term(3, 0, one.clone());
                q.add_term(2, 1, -one);
            }
        }
        PlanarVectorField::new(p, q).unwrap()
    }
}

/// Classification label of a located singularity.
#[derive(Clone, Debug, PartialEq)]
pub struct FoundSingularity {
    pub x: f64,
    pub y: f64,
    pub label: String,
}

/// One grid cell of the sweep.
#[derive(Clone, Debug)]
pub struct SweepCell {
    pub beta1: f64,
    pub beta2: f64,
    pub singularities: Vec<FoundSingularity>,
    pub curve_tag: Option<String>,
    pub resolved: bool,
}

/// Fold-curve dimension sample.
#[derive(Clone, Debug)]
pub struct CurveSample {
    pub beta1: f64,
    pub beta2: f64,
    pub expected: f64,
    pub estimate: DimensionEstimate,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub unfolding: Unfolding,
    pub cells: Vec<SweepCell>,
    pub curve_samples: Vec<CurveSample>,
    /// Curve constants attached from the reference analysis, not estimated.
    pub annotations: Vec<(String, String)>,
}

/// Sweep configuration.
#[derive(Clone, Copy, Debug)]
pub struct SweepCfg {
    pub grid_n: usize,
    pub beta_min: f64,
    pub beta_max: f64,
    pub seed: u64,
    /// Number of fold-curve samples to measure (0 disables).
    pub curve_samples: usize,
}

impl Default for SweepCfg {
    fn default() -> Self {
        SweepCfg {
            grid_n: 41,
            beta_min: -1.0,
            beta_max: 1.0,
            seed: 0x6e696c66,
            curve_samples: 3,
        }
    }
}

/// Damped Newton on the planar field from a starting guess.
fn newton_root(field: &PlanarVectorField<f64>, mut x: f64, mut y: f64) -> Option<(f64, f64)> {
    let fx = field.p.dx();
    let fy = field.p.dy();
    let gx = field.q.dx();
    let gy = field.q.dy();
    for _ in 0..80 {
        let (f, g) = field.eval_f64(x, y);
        let r = f.hypot(g);
        if r < 1e-12 {
            return Some((x, y));
        }
        let a = fx.eval_f64(x, y);
        let b = fy.eval_f64(x, y);
        let c = gx.eval_f64(x, y);
        let d = gy.eval_f64(x, y);
        let det = a * d - b * c;
        if det.abs() < 1e-14 {
            return None;
        }
        let dx = (f * d - g * b) / det;
        let dy = (a * g - c * f) / det;
        // damp until the residual shrinks
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..20 {
            let (nf, ng) = field.eval_f64(x - lambda * dx, y - lambda * dy);
            if nf.hypot(ng) < r {
                x -= lambda * dx;
                y -= lambda * dy;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            return None;
        }
        if x.abs() > 5.0 || y.abs() > 5.0 {
            return None;
        }
    }
    None
}

/// Locate the singularities of an unfolding field inside `|x|, |y| <= 3`.
pub fn find_singularities(field: &PlanarVectorField<f64>) -> Vec<(f64, f64)> {
    let mut roots: Vec<(f64, f64)> = Vec::new();
    let n = 25;
    for i in 0..n {
        for j in 0..n {
            let x = -2.5 + 5.0 * i as f64 / (n - 1) as f64;
            let y = -2.5 + 5.0 * j as f64 / (n - 1) as f64;
            if let Some((rx, ry)) = newton_root(field, x, y) {
                // double roots are only located to sqrt(residual), so the
                // dedup radius must sit well above that
                if !roots
                    .iter()
                    .any(|&(ax, ay)| (ax - rx).hypot(ay - ry) < 1e-4)
                {
                    roots.push((rx, ry));
                }
            }
        }
    }
    roots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    roots
}

/// Label a singularity through its linearization; fully degenerate points
/// fall back to the nilpotent classification.
fn label_singularity(
    unfolding: Unfolding,
    b1: f64,
    b2: f64,
    field: &PlanarVectorField<f64>,
    x: f64,
    y: f64,
) -> String {
    let j = [
        field.p.dx().eval_f64(x, y),
        field.p.dy().eval_f64(x, y),
        field.q.dx().eval_f64(x, y),
        field.q.dy().eval_f64(x, y),
    ];
    let tr = j[0] + j[3];
    let det = j[0] * j[3] - j[1] * j[2];
    let disc = tr * tr - 4.0 * det;
    let tol = 1e-7;
    if det.abs() < tol && tr.abs() < tol {
        // nilpotent: classify the exactly shifted field when the point and
        // parameters are rational enough, otherwise report degenerate
        if x.abs() < tol {
            let b1r = BigRational::from_float(b1).unwrap_or_else(|| BigRational::from_integer(0.into()));
            let b2r = BigRational::from_float(b2).unwrap_or_else(|| BigRational::from_integer(0.into()));
            let exact = unfolding.field_exact(&b1r, &b2r);
            if let Ok(rep) = classify_nilpotent(&exact) {
                return format!("nilpotent-{}", rep.kind.label());
            }
        }
        return "degenerate".into();
    }
    if det.abs() < tol {
        return "saddle-node".into();
    }
    if det < 0.0 {
        return "saddle".into();
    }
    if disc >= 0.0 {
        if tr < 0.0 {
            "node-attracting".into()
        } else {
            "node-repelling".into()
        }
    } else if tr.abs() < tol {
        "center-or-focus".into()
    } else if tr < 0.0 {
        "focus-attracting".into()
    } else {
        "focus-repelling".into()
    }
}

fn curve_tag(unfolding: Unfolding, b1: f64, b2: f64, cell: f64) -> Option<String> {
    match unfolding {
        Unfolding::Bt => {
            // fold curve 4 b1 = b2^2; Hopf curve b1 = 0, b2 < 0
            if (b1 - b2 * b2 / 4.0).abs() < cell / 2.0 {
                return Some(if b2 < 0.0 { "T-" } else { "T+" }.into());
            }
            if b1.abs() < cell / 2.0 && b2 < 0.0 {
                return Some("H".into());
            }
            None
        }
        Unfolding::DegenerateBt => {
            if b1.abs() < cell / 2.0 {
                return Some(if b2 < 0.0 { "T-" } else { "T+" }.into());
            }
            if b2.abs() < cell / 2.0 && b1 < 0.0 {
                return Some("H".into());
            }
            None
        }
    }
}

/// Dimension of the unit-time orbit along the center manifold of the fold
/// singularity at the given parameters.
///
/// The singularity is shifted to the origin, the center manifold
/// `y = c0 (x - x*)^gamma + ...` is continued by the branch recursion, and
/// the orbit is walked on that curve toward the fixed point (the curve
/// restriction keeps the walk stable regardless of the transverse sign).
pub fn center_manifold_dim(
    b1: f64,
    b2: f64,
    degenerate: bool,
    seed: u64,
) -> Result<DimensionEstimate, EstimateError> {
    let dist = if degenerate {
        degenerate_fold_sequence(b1, b2)?
    } else {
        fold_sequence(b1, b2)?
    };
    let cloud = PointCloud::Line(dist);
    let (eps_min, eps_max) = crate::boxdim::orbit_scale_window(&cloud);
    estimate_dim_boxcount(
        &cloud,
        &EstimatorCfg {
            eps_min,
            eps_max,
            seed,
            ..Default::default()
        },
    )
}

/// Fold of the cusp unfolding: walk the unit-time orbit on the center
/// manifold `y = (x-x*)^2/x* + ...`. The manifold series is asymptotic
/// with coefficients growing like `k!/x*^k`, so only a few terms are
/// usable and the seed must sit where the truncation error is a small
/// fraction of the curve.
fn fold_sequence(b1: f64, b2: f64) -> Result<Vec<f64>, EstimateError> {
    let field = Unfolding::Bt.field_f64(b1, b2);
    let x_star = -b2 / 2.0;
    let shifted = PlanarVectorField::new(field.p.shift_x(&x_star), field.q.shift_x(&x_star))
        .expect("same trunc");
    let branch = crate::blowup::invariant_branch_series(
        &shifted,
        crate::series::Axis::Y,
        crate::coeff::rat(2, 1),
        crate::coeff::rat(1, 1),
        1.0 / x_star,
        3,
    )
    .map_err(|_| EstimateError::DegenerateInput)?;
    let series = branch.series;
    let curve = move |u: f64| series.eval_f64(u);
    let orbit_cfg = OrbitCfg {
        floor: 1e-12,
        max_iter: 60_000,
        ..Default::default()
    };
    let mut best: Option<Vec<f64>> = None;
    for seed in [-0.008, 0.008] {
        let dir = crate::unitmap::inward_time_span(&shifted, &curve, false, seed);
        let Ok(orbit) = crate::unitmap::iterate_on_curve(
            &shifted,
            &curve,
            false,
            seed,
            &OrbitCfg {
                time_span: dir,
                ..orbit_cfg
            },
        ) else {
            continue;
        };
        let dist: Vec<f64> = orbit.independent.iter().map(|u| u.abs()).collect();
        if dist.len() > best.as_ref().map_or(60, |b: &Vec<f64>| b.len()) {
            best = Some(dist);
        }
    }
    best.ok_or(EstimateError::DegenerateInput)
}

/// Degenerate fold: the center manifold `y = -(1/b2) x^3 + ...` repels in
/// forward time, so the orbit is walked on the curve itself, which stays
/// stable under re-anchoring. The series is asymptotic; five terms keep
/// the truncation error a small fraction of the curve at the seed.
fn degenerate_fold_sequence(b1: f64, b2: f64) -> Result<Vec<f64>, EstimateError> {
    let field = Unfolding::DegenerateBt.field_f64(b1, b2);
    let branch = crate::blowup::invariant_branch_series(
        &field,
        crate::series::Axis::Y,
        crate::coeff::rat(3, 1),
        crate::coeff::rat(1, 1),
        -1.0 / b2,
        5,
    )
    .map_err(|_| EstimateError::DegenerateInput)?;
    let series = branch.series;
    let curve = move |u: f64| series.eval_f64(u);
    let orbit_cfg = OrbitCfg {
        floor: 1e-12,
        max_iter: 60_000,
        ..Default::default()
    };
    let mut best: Option<Vec<f64>> = None;
    for seed in [-0.1, 0.1] {
        let dir = crate::unitmap::inward_time_span(&field, &curve, false, seed);
        let Ok(orbit) = crate::unitmap::iterate_on_curve(
            &field,
            &curve,
            false,
            seed,
            &OrbitCfg {
                time_span: dir,
                ..orbit_cfg
            },
        ) else {
            continue;
        };
        let dist: Vec<f64> = orbit.independent.iter().map(|u| u.abs()).collect();
        if dist.len() > best.as_ref().map_or(60, |b: &Vec<f64>| b.len()) {
            best = Some(dist);
        }
    }
    best.ok_or(EstimateError::DegenerateInput)
}

/// Run the sweep over the parameter grid.
pub fn run_sweep(unfolding: Unfolding, cfg: &SweepCfg) -> SweepResult {
    let n = cfg.grid_n.max(2);
    let cell = (cfg.beta_max - cfg.beta_min) / (n - 1) as f64;
    let mut grid = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let b1 = cfg.beta_min + cell * i as f64;
            let b2 = cfg.beta_min + cell * j as f64;
            grid.push((b1, b2));
        }
    }
    let cells = map_ordered(grid, |(b1, b2)| {
        let field = unfolding.field_f64(b1, b2);
        let roots = find_singularities(&field);
        let singularities: Vec<FoundSingularity> = roots
            .iter()
            .map(|&(x, y)| FoundSingularity {
                x,
                y,
                label: label_singularity(unfolding, b1, b2, &field, x, y),
            })
            .collect();
        SweepCell {
            beta1: b1,
            beta2: b2,
            curve_tag: curve_tag(unfolding, b1, b2, cell),
            resolved: true,
            singularities,
        }
    });

    // fold-curve dimension samples
    let expected = match unfolding {
        Unfolding::Bt => 0.5,
        Unfolding::DegenerateBt => 2.0 / 3.0,
    };
    let sample_params: Vec<(f64, f64)> = (0..cfg.curve_samples)
        .map(|k| {
            let b2 = -0.4 - 0.3 * k as f64 / cfg.curve_samples.max(1) as f64;
            match unfolding {
                Unfolding::Bt => (b2 * b2 / 4.0, b2),
                Unfolding::DegenerateBt => (0.0, b2),
            }
        })
        .collect();
    let curve_samples = map_ordered(sample_params, |(b1, b2)| {
        center_manifold_dim(b1, b2, unfolding == Unfolding::DegenerateBt, cfg.seed)
            .ok()
            .map(|estimate| CurveSample {
                beta1: b1,
                beta2: b2,
                expected,
                estimate,
            })
    })
    .into_iter()
    .flatten()
    .collect();

    SweepResult {
        unfolding,
        cells,
        curve_samples,
        annotations: vec![
            (
                "hopf-curve".into(),
                "spiral orbits on H have dimension 4/3 (annotation; spirals violate the \
                 monotone-sequence hypotheses of the estimators)"
                    .into(),
            ),
            (
                "homoclinic-curve".into(),
                "the loop curve P is detected structurally only; no dimension is attached"
                    .into(),
            ),
        ],
    }
}

pub fn sweep_to_csv(result: &SweepResult) -> String {
    let mut out = String::from("beta1,beta2,n_sing,labels,curve_tag\n");
    for c in &result.cells {
        let labels: Vec<&str> = c.singularities.iter().map(|s| s.label.as_str()).collect();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            c.beta1,
            c.beta2,
            c.singularities.len(),
            labels.join("|"),
            c.curve_tag.clone().unwrap_or_default()
        ));
    }
    out
}

pub fn sweep_to_json(result: &SweepResult) -> Value {
    json!({
        "unfolding": result.unfolding.label(),
        "cells": result.cells.iter().map(|c| json!({
            "beta1": c.beta1,
            "beta2": c.beta2,
            "singularities": c.singularities.iter().map(|s| json!({
                "x": s.x, "y": s.y, "label": s.label,
            })).collect::<Vec<_>>(),
            "curve_tag": c.curve_tag,
        })).collect::<Vec<_>>(),
        "curve_samples": result.curve_samples.iter().map(|s| json!({
            "beta1": s.beta1,
            "beta2": s.beta2,
            "expected": s.expected,
            "estimate": crate::io::estimate_to_json(&s.estimate),
        })).collect::<Vec<_>>(),
        "annotations": result.annotations.iter().map(|(k, v)| json!({k: v})).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bt_singularities_against_quadratic_roots() {
        // singularities of the cusp unfolding solve y = 0, b1 + b2 x + x^2 = 0
        for (b1, b2) in [(-0.5, 0.3), (-0.2, -0.7), (0.09, -0.6)] {
            let field = Unfolding::Bt.field_f64(b1, b2);
            let roots = find_singularities(&field);
            let disc: f64 = b2 * b2 - 4.0 * b1;
            let expected: Vec<f64> = if disc > 1e-9 {
                let mut v = vec![(-b2 - disc.sqrt()) / 2.0, (-b2 + disc.sqrt()) / 2.0];
                v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                v
            } else {
                vec![-b2 / 2.0]
            };
            assert_eq!(roots.len(), expected.len(), "b=({b1},{b2})");
            let loc_tol = if disc.abs() < 1e-9 { 1e-5 } else { 1e-8 };
            for (r, e) in roots.iter().zip(&expected) {
                assert!((r.0 - e).abs() < loc_tol && r.1.abs() < 1e-8, "{r:?} vs {e}");
            }
        }
    }

    #[test]
    fn region_one_is_empty() {
        // b1 > b2^2/4 has no real singularities
        let field = Unfolding::Bt.field_f64(0.5, 0.1);
        assert!(find_singularities(&field).is_empty());
    }

    #[test]
    fn origin_of_bt_at_zero_is_a_cusp() {
        let field = Unfolding::Bt.field_f64(0.0, 0.0);
        let roots = find_singularities(&field);
        assert_eq!(roots.len(), 1);
        let label = label_singularity(Unfolding::Bt, 0.0, 0.0, &field, roots[0].0, roots[0].1);
        assert_eq!(label, "nilpotent-cusp");
    }

    #[test]
    fn saddle_and_node_in_region_two() {
        let field = Unfolding::Bt.field_f64(-0.2, -0.1);
        let roots = find_singularities(&field);
        assert_eq!(roots.len(), 2);
        let labels: Vec<String> = roots
            .iter()
            .map(|&(x, y)| label_singularity(Unfolding::Bt, -0.2, -0.1, &field, x, y))
            .collect();
        assert!(labels.iter().any(|l| l == "saddle"), "{labels:?}");
        assert!(
            labels.iter().any(|l| l.contains("node") || l.contains("focus")),
            "{labels:?}"
        );
    }

    #[test]
    fn fold_sample_dimension_is_half() {
        let est = center_manifold_dim(0.09, -0.6, false, 7).unwrap();
        assert!((est.value - 0.5).abs() < 0.07, "dim {}", est.value);
    }

    #[test]
    fn degenerate_fold_sample_dimension() {
        let est = center_manifold_dim(0.0, -0.5, true, 7).unwrap();
        assert!((est.value - 2.0 / 3.0).abs() < 0.07, "dim {}", est.value);
    }

    #[test]
    fn small_sweep_smoke() {
        let cfg = SweepCfg {
            grid_n: 9,
            curve_samples: 0,
            ..Default::default()
        };
        let result = run_sweep(Unfolding::Bt, &cfg);
        assert_eq!(result.cells.len(), 81);
        for c in &result.cells {
            if c.beta1 > c.beta2 * c.beta2 / 4.0 + 0.05 {
                assert!(c.singularities.is_empty(), "cell ({}, {})", c.beta1, c.beta2);
            }
        }
        let csv = sweep_to_csv(&result);
        assert!(csv.lines().count() == 82);
    }
}
