//! Singularities at infinity of the nilpotent model.
//!
//! The two affine charts of the compactified plane are `x = 1/v, y = u/v`
//! (U1) and `x = u/v, y = 1/v` (U2). Transforming `x' = y,
//! y' = a x^m + b x^n y` and clearing the common power of `v` gives, for
//! `m < n+1`,
//!
//! ```text
//! U1:  u' = b u + a v^(n+1-m) - u^2 v^n        v' = -u v^(n+1)
//! U2:  u' = v^n - a u^(m+1) v^(n+1-m) - b u^(n+1)
//!      v' = -a u^m v^(n-m+2) - b u^n v
//! ```
//!
//! The U1 singularity at the origin is semi-hyperbolic with center
//! manifold `u ~ -(a/b) v^(n+1-m)` and carries orbits of dimension
//! `1 - 1/(2n-m+2)`; the U2 origin carries a separatrix `v ~ c u^((n+1)/n)`
//! with `c^n = b/(n+1)` and dimension `1 - 1/(n+1)` for `m <= n+1`, and
//! `v ~ c u^((m+1)/(m-1))`, `c^(m-1) = 2a/(m+1)`, with dimension
//! `1 - 1/(m+1)` for `m > n+1`.

use crate::blowup::invariant_branch_series;
use crate::boxdim::{
    dim_from_increment, estimate_dim_boxcount, estimate_dim_sausage, estimate_increment_exponent,
    DimensionEstimate, EstimatorCfg, IncrementCfg, PointCloud,
};
use crate::coeff::{rat, Coeff, Rat};
use crate::error::EstimateError;
use crate::model::NilpotentModel;
use crate::poly::{BiPoly, PlanarVectorField};
use crate::series::Axis;
use crate::unitmap::{flow_with, inward_time_span, iterate_on_curve, IntegratorCfg, OrbitCfg};

/// The two affine charts at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chart {
    /// `x = 1/v, y = u/v`
    U1,
    /// `x = u/v, y = 1/v`
    U2,
}

impl Chart {
    pub fn label(&self) -> &'static str {
        match self {
            Chart::U1 => "u1",
            Chart::U2 => "u2",
        }
    }
}

/// A chart system: the transformed field after removing the common
/// monomial, together with what was removed.
#[derive(Clone, Debug)]
pub struct ChartSystem<C: Coeff> {
    pub chart: Chart,
    pub field: PlanarVectorField<C>,
    /// Exponents `(e_u, e_v)` of the removed monomial; negative values
    /// mean the component was multiplied by that power instead.
    pub divisor: (i64, i64),
    pub source: String,
}

/// Compactify an arbitrary polynomial field into one chart at infinity.
pub fn compactify_field<C: Coeff>(
    field: &PlanarVectorField<C>,
    chart: Chart,
    source: String,
) -> ChartSystem<C> {
    // terms (u_exp, v_exp, coeff) with v_exp possibly negative
    let mut u_dot: Vec<(u32, i64, C)> = Vec::new();
    let mut v_dot: Vec<(u32, i64, C)> = Vec::new();
    let push = |acc: &mut Vec<(u32, i64, C)>, u: u32, v: i64, c: C| {
        if !c.is_zero() {
            acc.push((u, v, c));
        }
    };
    match chart {
        Chart::U1 => {
            // u = y/x, v = 1/x: u' = v (Q - u P), v' = -v^2 P
            // P(1/v, u/v): x^i y^j -> u^j v^(-i-j)
            for (i, j, c) in field.q.terms() {
                push(&mut u_dot, j, 1 - (i as i64 + j as i64), c.clone());
            }
            for (i, j, c) in field.p.terms() {
                push(&mut u_dot, j + 1, 1 - (i as i64 + j as i64), -c.clone());
                push(&mut v_dot, j, 2 - (i as i64 + j as i64), -c.clone());
            }
        }
        Chart::U2 => {
            // u = x/y, v = 1/y: u' = v (P - u Q), v' = -v^2 Q
            // P(u/v, 1/v): x^i y^j -> u^i v^(-i-j)
            for (i, j, c) in field.p.terms() {
                push(&mut u_dot, i, 1 - (i as i64 + j as i64), c.clone());
            }
            for (i, j, c) in field.q.terms() {
                push(&mut u_dot, i + 1, 1 - (i as i64 + j as i64), -c.clone());
                push(&mut v_dot, i, 2 - (i as i64 + j as i64), -c.clone());
            }
        }
    }
    let min_v = u_dot
        .iter()
        .chain(v_dot.iter())
        .map(|(_, v, _)| *v)
        .min()
        .unwrap_or(0);
    let lift = (-min_v).max(0);
    let max_exp = u_dot
        .iter()
        .chain(v_dot.iter())
        .map(|(u, v, _)| *u as i64 + v + lift)
        .max()
        .unwrap_or(0) as u32;
    let collect = |terms: Vec<(u32, i64, C)>| -> BiPoly<C> {
        let mut out = BiPoly::zero(max_exp + 2);
        for (u, v, c) in terms {
            out.add_term(u, (v + lift) as u32, c);
        }
        out
    };
    let raw = PlanarVectorField::new(collect(u_dot), collect(v_dot)).expect("same trunc");
    let (divided, (du, dv)) = raw.divide_common_monomial();
    ChartSystem {
        chart,
        field: divided,
        divisor: (du as i64, dv as i64 - lift),
        source,
    }
}

/// Chart system of the nilpotent model `x' = y, y' = a x^m + b x^n y`.
pub fn compactify(model: &NilpotentModel, chart: Chart) -> ChartSystem<num_rational::BigRational> {
    compactify_field(&model.field(), chart, model.describe())
}

/// Closed-form dimension of the unit-time orbit at the chart singularity.
#[derive(Clone, Debug)]
pub struct PredictedDim {
    pub value: Rat,
    /// Set when a convention had to be chosen (the `m = n+1` chart-2 case
    /// reuses the `m < n+1` value).
    pub note: Option<String>,
}

pub fn predicted_dim_infinity(m: u32, n: u32, chart: Chart) -> Result<PredictedDim, EstimateError> {
    match chart {
        Chart::U1 => {
            if m < n + 1 {
                Ok(PredictedDim {
                    value: rat(1, 1) - rat(1, 2 * n as i64 - m as i64 + 2),
                    note: None,
                })
            } else {
                Err(EstimateError::UncoveredRegime(format!(
                    "chart u1 needs m < n+1, got m={m}, n={n}"
                )))
            }
        }
        Chart::U2 => {
            if m < n + 1 {
                Ok(PredictedDim {
                    value: rat(1, 1) - rat(1, n as i64 + 1),
                    note: None,
                })
            } else if m == n + 1 {
                Ok(PredictedDim {
                    value: rat(1, 1) - rat(1, n as i64 + 1),
                    note: Some("m = n+1 read as the m < n+1 chart-2 value".into()),
                })
            } else {
                Ok(PredictedDim {
                    value: rat(1, 1) - rat(1, m as i64 + 1),
                    note: None,
                })
            }
        }
    }
}

/// Branch recursion that backs off to the last consistent order when a
/// resonance with nonzero right-hand side blocks the pure power ladder
/// (the obstructed term is logarithmic and does not affect the leading
/// asymptotics the orbits are seeded with).
fn branch_series_tolerant(
    field: &PlanarVectorField<f64>,
    dependent: Axis,
    gamma: Rat,
    step: Rat,
    c0: f64,
    k_terms: usize,
) -> Result<crate::blowup::BranchSeries<f64>, crate::error::BranchError> {
    let mut k = k_terms;
    loop {
        match invariant_branch_series(field, dependent, gamma, step, c0, k) {
            Ok(b) => return Ok(b),
            Err(crate::error::BranchError::NonTriangular { order }) if order >= 1 && k > 0 => {
                k = order - 1;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Invariant-branch data of the chart singularity at the origin.
pub struct ChartBranch {
    /// The dependent coordinate as a function of the independent one.
    pub series_eval: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    /// True when the independent coordinate is `v` (chart U1).
    pub independent_is_v: bool,
    pub gamma: Rat,
}

/// Compute the invariant branch used for the dimension at infinity:
/// the U1 center manifold `u(v)` or the U2 separatrix `v(u)`.
pub fn chart_branch(
    model: &NilpotentModel,
    chart: Chart,
    k_terms: usize,
) -> Result<ChartBranch, EstimateError> {
    let m = model.m();
    let n = model.n();
    let sys = compactify(model, chart);
    let field = sys.field.map_coeffs(|c| c.to_f64());
    match chart {
        Chart::U1 => {
            if m >= n + 1 {
                return Err(EstimateError::UncoveredRegime(format!(
                    "chart u1 needs m < n+1, got m={m}, n={n}"
                )));
            }
            let gamma = rat(n as i64 + 1 - m as i64, 1);
            let c0 = -model.a().to_f64() / model.b().to_f64();
            let solved = branch_series_tolerant(&field, Axis::X, gamma, rat(1, 1), c0, k_terms)
                .map_err(|e| EstimateError::UncoveredRegime(e.to_string()))?;
            let series = solved.series;
            Ok(ChartBranch {
                series_eval: Box::new(move |v: f64| series.eval_f64(v)),
                independent_is_v: true,
                gamma,
            })
        }
        Chart::U2 => {
            let (gamma, c0) = if m <= n + 1 {
                let c = (model.b().to_f64() / (n as f64 + 1.0)).powf(1.0 / n as f64);
                (rat(n as i64 + 1, n as i64), c)
            } else {
                let c = (2.0 * model.a().to_f64() / (m as f64 + 1.0))
                    .powf(1.0 / (m as f64 - 1.0));
                (rat(m as i64 + 1, m as i64 - 1), c)
            };
            if !c0.is_finite() || c0 == 0.0 {
                return Err(EstimateError::UncoveredRegime(
                    "no real separatrix in chart u2 for these coefficients".into(),
                ));
            }
            let step = gamma - gamma.floor();
            let step = if step == rat(0, 1) { rat(1, 1) } else { step };
            let solved = branch_series_tolerant(&field, Axis::Y, gamma, step, c0, k_terms)
                .map_err(|e| EstimateError::UncoveredRegime(e.to_string()))?;
            let series = solved.series;
            Ok(ChartBranch {
                series_eval: Box::new(move |u: f64| series.eval_f64(u)),
                independent_is_v: false,
                gamma,
            })
        }
    }
}

/// Numerical verification output for one chart.
#[derive(Clone, Debug)]
pub struct InfinityVerification {
    pub predicted: Rat,
    pub note: Option<String>,
    pub boxcount: DimensionEstimate,
    pub sausage: DimensionEstimate,
    pub increment_alpha: f64,
    pub n_points: usize,
}

/// Generate the unit-time orbit on the chart invariant manifold, estimate
/// its dimension and return it alongside the closed form.
pub fn verify_dim_infinity(
    model: &NilpotentModel,
    chart: Chart,
    orbit_cfg: &OrbitCfg,
    est_cfg: &EstimatorCfg,
) -> Result<InfinityVerification, EstimateError> {
    let predicted = predicted_dim_infinity(model.m(), model.n(), chart)?;
    let branch = chart_branch(model, chart, 8)?;
    let sys = compactify(model, chart);
    let field = sys.field.map_coeffs(|c| c.to_f64());
    let indep_is_y = branch.independent_is_v;

    // the approach side is not known a priori; try both signs of the seed
    let mut best: Option<crate::unitmap::CurveOrbit> = None;
    for seed in [0.4, -0.4] {
        let curve = |t: f64| (branch.series_eval)(t);
        if !curve(seed).is_finite() {
            // fractional-power branches only exist on one side
            continue;
        }
        let dir = inward_time_span(&field, &curve, indep_is_y, seed);
        let cfg = OrbitCfg {
            time_span: dir,
            ..*orbit_cfg
        };
        if let Ok(orbit) = iterate_on_curve(&field, &curve, indep_is_y, seed, &cfg) {
            if best.as_ref().map_or(true, |b| orbit.independent.len() > b.independent.len()) {
                best = Some(orbit);
            }
        }
    }
    let orbit = best.ok_or(EstimateError::DegenerateInput)?;
    if orbit.independent.len() < 100 {
        return Err(EstimateError::TooShort {
            need: 100,
            got: orbit.independent.len(),
        });
    }
    let abs_indep: Vec<f64> = orbit.independent.iter().map(|t| t.abs()).collect();
    let increment = estimate_increment_exponent(&abs_indep, &IncrementCfg::default())?;
    let cloud = PointCloud::Plane(orbit.points.clone());
    let (eps_min, eps_max) = crate::boxdim::orbit_scale_window(&cloud);
    let est_cfg = &EstimatorCfg {
        eps_min,
        eps_max,
        ..*est_cfg
    };
    let boxcount = estimate_dim_boxcount(&cloud, est_cfg)?;
    let sausage = estimate_dim_sausage(&cloud, est_cfg)?;
    let _ = dim_from_increment(&increment);
    Ok(InfinityVerification {
        predicted: predicted.value,
        note: predicted.note,
        boxcount,
        sausage,
        increment_alpha: increment.alpha,
        n_points: orbit.independent.len(),
    })
}

/// Transition map between the charts on their overlap:
/// `(u, v) in U1  ->  (1/u, v/u) in U2`.
pub fn chart_transition(p: (f64, f64)) -> (f64, f64) {
    (1.0 / p.0, p.1 / p.0)
}

/// Unit-time image under the raw (unrescaled) chart flow, which shares the
/// time parameterization of the original field. Used to check that the two
/// charts are conjugate on their overlap.
pub fn raw_chart_unit_map(
    model: &NilpotentModel,
    chart: Chart,
    p: (f64, f64),
    cfg: &IntegratorCfg,
) -> Result<(f64, f64), crate::error::UnitMapError> {
    let f = model.field_f64();
    let rhs = move |u: f64, v: f64| -> (f64, f64) {
        match chart {
            Chart::U1 => {
                let (x, y) = (1.0 / v, u / v);
                let (dx, dy) = f.eval_f64(x, y);
                (dy / x - y * dx / (x * x), -dx / (x * x))
            }
            Chart::U2 => {
                let (x, y) = (u / v, 1.0 / v);
                let (dx, dy) = f.eval_f64(x, y);
                (dx / y - x * dy / (y * y), -dy / (y * y))
            }
        }
    };
    flow_with(rhs, p, 1.0, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn model(a: i64, m: u32, b: i64, n: u32) -> NilpotentModel {
        NilpotentModel::from_i64(a, m, b, n).unwrap()
    }

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn chart_one_matches_closed_form() {
        // m < n+1: u' = b u + a v^(n+1-m) - u^2 v^n, v' = -u v^(n+1)
        for (a, m, b, n) in [(1i64, 2u32, 1i64, 2u32), (1, 2, 1, 3), (2, 3, -3, 4)] {
            let sys = compactify(&model(a, m, b, n), Chart::U1);
            let mut expected_u = BiPoly::zero(sys.field.trunc_degree());
            expected_u.add_term(1, 0, r(b));
            expected_u.add_term(0, n + 1 - m, r(a));
            expected_u.add_term(2, n, r(-1));
            let mut expected_v = BiPoly::zero(sys.field.trunc_degree());
            expected_v.add_term(1, n + 1, r(-1));
            assert_eq!(sys.field.p, expected_u, "u' for m={m} n={n}");
            assert_eq!(sys.field.q, expected_v, "v' for m={m} n={n}");
        }
    }

    #[test]
    fn chart_two_matches_closed_form() {
        // m <= n+1: u' = v^n - a u^(m+1) v^(n+1-m) - b u^(n+1),
        //           v' = -a u^m v^(n-m+2) - b u^n v
        for (a, m, b, n) in [(1i64, 2u32, 1i64, 2u32), (1, 2, 1, 3), (2, 3, -3, 4)] {
            let sys = compactify(&model(a, m, b, n), Chart::U2);
            let mut expected_u = BiPoly::zero(sys.field.trunc_degree());
            expected_u.add_term(0, n, r(1));
            expected_u.add_term(m + 1, n + 1 - m, r(-a));
            expected_u.add_term(n + 1, 0, r(-b));
            let mut expected_v = BiPoly::zero(sys.field.trunc_degree());
            expected_v.add_term(m, n - m + 2, r(-a));
            expected_v.add_term(n, 1, r(-b));
            assert_eq!(sys.field.p, expected_u, "u' for m={m} n={n}");
            assert_eq!(sys.field.q, expected_v, "v' for m={m} n={n}");
        }
    }

    #[test]
    fn chart_transform_numeric_oracle() {
        // push the original field through the chart maps numerically and
        // compare with the symbolic chart system times the removed monomial
        let mm = model(1, 2, 1, 3);
        let f = mm.field_f64();
        for chart in [Chart::U1, Chart::U2] {
            let sys = compactify(&mm, chart);
            let cf = sys.field.map_coeffs(|c| c.to_f64());
            for &(u, v) in &[(0.7f64, 0.9f64), (0.5, 1.3), (1.1, 0.6)] {
                let (x, y) = match chart {
                    Chart::U1 => (1.0 / v, u / v),
                    Chart::U2 => (u / v, 1.0 / v),
                };
                let (dx, dy) = f.eval_f64(x, y);
                let (du, dv) = match chart {
                    Chart::U1 => (dy / x - y * dx / (x * x), -dx / (x * x)),
                    Chart::U2 => (dx / y - x * dy / (y * y), -dy / (y * y)),
                };
                let scale = u.powi(sys.divisor.0 as i32) * v.powi(sys.divisor.1 as i32);
                let (su, sv) = cf.eval_f64(u, v);
                assert!((su * scale - du).abs() < 1e-12 * du.abs().max(1.0), "{chart:?} u");
                assert!((sv * scale - dv).abs() < 1e-12 * dv.abs().max(1.0), "{chart:?} v");
            }
        }
    }

    #[test]
    fn degenerate_model_rejected_at_construction() {
        assert!(NilpotentModel::from_i64(0, 2, 0, 1).is_err());
    }

    #[test]
    fn predicted_values() {
        assert_eq!(
            predicted_dim_infinity(2, 2, Chart::U1).unwrap().value,
            rat(3, 4)
        );
        assert_eq!(
            predicted_dim_infinity(2, 3, Chart::U1).unwrap().value,
            rat(5, 6)
        );
        assert_eq!(
            predicted_dim_infinity(2, 2, Chart::U2).unwrap().value,
            rat(2, 3)
        );
        assert_eq!(
            predicted_dim_infinity(2, 3, Chart::U2).unwrap().value,
            rat(3, 4)
        );
        // m > n+1 in the second chart
        assert_eq!(
            predicted_dim_infinity(4, 1, Chart::U2).unwrap().value,
            rat(4, 5)
        );
        assert!(predicted_dim_infinity(3, 2, Chart::U1).is_err());
    }

    #[test]
    fn continuity_across_m_equals_n_plus_one() {
        let at_boundary = predicted_dim_infinity(3, 2, Chart::U2).unwrap();
        let below = predicted_dim_infinity(2, 2, Chart::U2).unwrap();
        assert_eq!(at_boundary.value, below.value);
        assert!(at_boundary.note.is_some());
    }

    #[test]
    fn u1_center_manifold_leading_term() {
        // u = -(a/b) v^(n+1-m) + ...
        let branch = chart_branch(&model(1, 2, 1, 3), Chart::U1, 6).unwrap();
        assert_eq!(branch.gamma, rat(2, 1));
        let v = 0.05;
        let expect = -(v * v);
        assert!(((branch.series_eval)(v) - expect).abs() < 5.0 * v.powi(3));
    }

    #[test]
    fn u2_separatrix_leading_term() {
        // v = c u^((n+1)/n), c^n = b/(n+1)
        let branch = chart_branch(&model(1, 2, 1, 2), Chart::U2, 6).unwrap();
        assert_eq!(branch.gamma, rat(3, 2));
        let u = 0.05f64;
        let c = (1.0f64 / 3.0).sqrt();
        let lead = c * u.powf(1.5);
        assert!(((branch.series_eval)(u) - lead).abs() < 5.0 * u.powi(2), "residual too large");
    }

    #[test]
    fn chart_overlap_conjugacy() {
        // transporting a point U1 -> U2 commutes with the raw unit-time flow
        let mm = model(1, 2, 1, 2);
        let cfg = IntegratorCfg {
            domain_bound: 1e3,
            ..Default::default()
        };
        for &(x, y) in &[(0.8f64, -0.5f64), (1.2, -0.8)] {
            let p = (y / x, 1.0 / x);
            let q1 = raw_chart_unit_map(&mm, Chart::U1, p, &cfg).unwrap();
            let q2 = raw_chart_unit_map(&mm, Chart::U2, chart_transition(p), &cfg).unwrap();
            let t = chart_transition(q1);
            let err = (t.0 - q2.0).hypot(t.1 - q2.1);
            assert!(err < 1e-6, "overlap mismatch {err}");
        }
    }

    #[test]
    fn verification_smoke() {
        // a short orbit already lands within a loose band of the predicted value
        let cfg = OrbitCfg {
            floor: 1e-9,
            max_iter: 20_000,
            ..Default::default()
        };
        let v = verify_dim_infinity(&model(1, 2, 1, 2), Chart::U1, &cfg, &EstimatorCfg::default())
            .unwrap();
        assert_eq!(v.predicted, rat(3, 4));
        assert!((v.boxcount.value - 0.75).abs() < 0.1, "boxcount {}", v.boxcount.value);
        assert!((v.increment_alpha - 4.0).abs() < 0.2, "alpha {}", v.increment_alpha);
    }
}
