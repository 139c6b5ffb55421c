//! Saddle normal form, its chart at infinity, and the dual box dimension.
//!
//! The normal form
//!
//! ```text
//! x' = a0 x + b0 y + ... + (x^2 - y^2)^n (a_n x + b_n y)
//! y' = b0 x + a0 y + ... + (x^2 - y^2)^n (b_n x + a_n y)
//! ```
//!
//! carries saddle quantities `a_k`, dual to the focus Lyapunov
//! coefficients: with `a_n = b0 = 1` and the other `b_i` zero, hyperbolic
//! coordinates `x = r cosh(phi), y = r sinh(phi)` turn it into
//! `r' = r (r^2n + sum a_i r^2i), phi' = 1`. A trajectory comparable to
//! `r = phi^(-1/2k)` is assigned the dual box dimension `4k/(2k+1)`.
//!
//! At infinity the example family `x' = y + (x^2-y^2)^k,
//! y' = x + (x^2-y^2)^k` has chart-1 singularities at `(+-1, 0)`.
//! Translated to `(1, 0)` the system reads
//!
//! ```text
//! u' = -u(2+u) v^(2k-1) + (-1)^(k+1) u^(k+1) (2+u)^k
//! v' = -(1+u) v^2k - (-1)^k u^k (2+u)^k v
//! ```
//!
//! with both axes invariant; on `u = 0` the flow is `v' = -v^2k` exactly,
//! so the unit-time map is comparable to `v - v^2k` and orbits on the
//! v-axis have box dimension `1 - 1/(2k)`.

use crate::blowup::invariant_branch_series;
use crate::boxdim::{
    estimate_dim_boxcount, estimate_dim_sausage, estimate_increment_exponent, DimensionEstimate,
    EstimatorCfg, IncrementCfg, PointCloud,
};
use crate::coeff::{rat, Coeff, Rat};
use crate::error::EstimateError;
use crate::infinity::{compactify_field, Chart};
use crate::poly::{BiPoly, PlanarVectorField};
use crate::series::Axis;
use crate::unitmap::{iterate_on_curve, OrbitCfg};
#[cfg(test)]
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Saddle normal-form coefficients.
#[derive(Clone, Debug)]
pub struct SaddleNormalForm {
    pub a_coeffs: Vec<BigRational>,
    pub b_coeffs: Vec<BigRational>,
}

impl SaddleNormalForm {
    pub fn new(a_coeffs: Vec<BigRational>, b_coeffs: Vec<BigRational>) -> Result<Self, String> {
        if a_coeffs.is_empty() || a_coeffs.len() != b_coeffs.len() {
            return Err("coefficient lists must be nonempty and equally long".into());
        }
        if a_coeffs.last().unwrap().is_zero() {
            return Err("the top saddle quantity a_n must be nonzero".into());
        }
        Ok(SaddleNormalForm { a_coeffs, b_coeffs })
    }

    /// The example shape: `a_k = b_0 = 1`, everything else zero.
    pub fn weak_of_order(k: usize) -> Self {
        let mut a = vec![BigRational::zero(); k + 1];
        a[k] = BigRational::one();
        let mut b = vec![BigRational::zero(); k + 1];
        b[0] = BigRational::one();
        SaddleNormalForm {
            a_coeffs: a,
            b_coeffs: b,
        }
    }

    /// Index of the first nonzero saddle quantity.
    pub fn weak_order(&self) -> Option<usize> {
        self.a_coeffs.iter().position(|a| !a.is_zero())
    }

    pub fn degree(&self) -> u32 {
        2 * (self.a_coeffs.len() as u32 - 1) + 1
    }

    /// The vector field of the normal form.
    pub fn field(&self) -> PlanarVectorField<BigRational> {
        let trunc = self.degree() + 2;
        let mut p = BiPoly::zero(trunc);
        let mut q = BiPoly::zero(trunc);
        // powers of (x^2 - y^2)
        let mut w = BiPoly::constant(BigRational::one(), trunc);
        let x2y2 = BiPoly::from_terms(
            [
                (2u32, 0u32, BigRational::one()),
                (0, 2, -BigRational::one()),
            ],
            trunc,
        );
        for (a_i, b_i) in self.a_coeffs.iter().zip(&self.b_coeffs) {
            let ax = BiPoly::monomial(1, 0, a_i.clone(), trunc);
            let ay = BiPoly::monomial(0, 1, a_i.clone(), trunc);
            let bx = BiPoly::monomial(1, 0, b_i.clone(), trunc);
            let by = BiPoly::monomial(0, 1, b_i.clone(), trunc);
            p = p.add(&w.mul(&ax.add(&by).unwrap()).unwrap()).unwrap();
            q = q.add(&w.mul(&bx.add(&ay).unwrap()).unwrap()).unwrap();
            w = w.mul(&x2y2).unwrap();
        }
        PlanarVectorField::new(p, q).unwrap()
    }
}

/// The example field `x' = y + (x^2-y^2)^k, y' = x + (x^2-y^2)^k`.
pub fn saddle_field(k: u32) -> Result<PlanarVectorField<BigRational>, String> {
    if k < 1 {
        return Err("k must be at least 1".into());
    }
    let trunc = 2 * k + 2;
    let x2y2 = BiPoly::from_terms(
        [
            (2u32, 0u32, BigRational::one()),
            (0, 2, -BigRational::one()),
        ],
        trunc,
    );
    let w = x2y2.pow(k).unwrap();
    let p = BiPoly::y(trunc).add(&w).unwrap();
    let q = BiPoly::x(trunc).add(&w).unwrap();
    Ok(PlanarVectorField::new(p, q).unwrap())
}

/// Chart-1 system of [`saddle_field`] translated to the singularity
/// `(1, 0)`, keeping the names `(u, v)` for the translated coordinates.
pub fn saddle_infinity_chart(k: u32) -> Result<PlanarVectorField<BigRational>, String> {
    let field = saddle_field(k)?;
    let sys = compactify_field(&field, Chart::U1, format!("saddle k={k} at infinity"));
    let one = BigRational::one();
    let p = sys.field.p.shift_x(&one);
    let q = sys.field.q.shift_x(&one);
    Ok(PlanarVectorField::new(p, q).unwrap())
}

/// The pair (dual box dimension, v-axis dimension at infinity).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualDimensionResult {
    pub k: u32,
    /// `4k/(2k+1)`
    pub dual_dim: Rat,
    /// `1 - 1/(2k)`
    pub infinity_dim: Rat,
}

pub fn dual_box_dimension(k: u32) -> Result<DualDimensionResult, String> {
    if k < 1 {
        return Err("k must be at least 1".into());
    }
    Ok(DualDimensionResult {
        k,
        dual_dim: rat(4 * k as i64, 2 * k as i64 + 1),
        infinity_dim: rat(1, 1) - rat(1, 2 * k as i64),
    })
}

/// Numerical verification of the v-axis dimension at infinity.
#[derive(Clone, Debug)]
pub struct SaddleVerification {
    pub predicted: Rat,
    pub boxcount: DimensionEstimate,
    pub sausage: DimensionEstimate,
    pub increment_alpha: f64,
    pub n_points: usize,
}

/// Iterate the unit-time map of the chart system on the invariant v-axis
/// from `v0 = 0.5` and estimate the dimension of the v-sequence.
pub fn verify_saddle_infinity(
    k: u32,
    orbit_cfg: &OrbitCfg,
    est_cfg: &EstimatorCfg,
) -> Result<SaddleVerification, EstimateError> {
    let chart = saddle_infinity_chart(k)
        .map_err(EstimateError::UncoveredRegime)?
        .map_coeffs(|c| c.to_f64());
    // the axis u = 0 is invariant; walk v down from 0.5
    let curve = |_v: f64| 0.0;
    let cfg = OrbitCfg {
        time_span: 1.0,
        ..*orbit_cfg
    };
    let orbit = iterate_on_curve(&chart, &curve, true, 0.5, &cfg)
        .map_err(|e| EstimateError::UncoveredRegime(e.to_string()))?;
    if orbit.independent.len() < 100 {
        return Err(EstimateError::TooShort {
            need: 100,
            got: orbit.independent.len(),
        });
    }
    let vs: Vec<f64> = orbit.independent.clone();
    let increment = estimate_increment_exponent(&vs, &IncrementCfg::default())?;
    let cloud = PointCloud::Line(vs);
    let (eps_min, eps_max) = crate::boxdim::orbit_scale_window(&cloud);
    let est_cfg = &EstimatorCfg {
        eps_min,
        eps_max,
        ..*est_cfg
    };
    let boxcount = estimate_dim_boxcount(&cloud, est_cfg)?;
    let sausage = estimate_dim_sausage(&cloud, est_cfg)?;
    Ok(SaddleVerification {
        predicted: rat(1, 1) - rat(1, 2 * k as i64),
        boxcount,
        sausage,
        increment_alpha: increment.alpha,
        n_points: orbit.points.len(),
    })
}

/// Stable-manifold series of [`saddle_field`] at the origin, for the
/// hyperbolic triviality check: `y = -x + c2 x^2 + ...`.
pub fn saddle_stable_manifold(
    k: u32,
    k_terms: usize,
) -> Result<crate::blowup::BranchSeries<f64>, crate::error::BranchError> {
    let field = saddle_field(k)
        .map_err(crate::error::BranchError::Leading)?
        .map_coeffs(|c| c.to_f64());
    invariant_branch_series(&field, Axis::Y, rat(1, 1), rat(1, 1), -1.0, k_terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unitmap::inward_time_span;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn example_field_shape() {
        let f = saddle_field(1).unwrap();
        assert_eq!(f.p.coeff(0, 1), r(1));
        assert_eq!(f.p.coeff(2, 0), r(1));
        assert_eq!(f.p.coeff(0, 2), r(-1));
        assert_eq!(f.q.coeff(1, 0), r(1));
        assert_eq!(f.q.coeff(2, 0), r(1));
        assert_eq!(f.q.coeff(0, 2), r(-1));
        // degree-4 field at k = 2
        let f2 = saddle_field(2).unwrap();
        assert_eq!(f2.p.max_degree(), Some(4));
        assert!(saddle_field(0).is_err());
    }

    #[test]
    fn origin_is_a_hyperbolic_saddle() {
        // linear part is the swap matrix with eigenvalues +-1
        let f = saddle_field(2).unwrap();
        let j = f.jacobian_origin();
        assert_eq!(j[0], r(0));
        assert_eq!(j[1], r(1));
        assert_eq!(j[2], r(1));
        assert_eq!(j[3], r(0));
    }

    #[test]
    fn chart_system_k1() {
        // u' = -2uv - u^2 v + u^2 (2+u), v' = -v^2 - uv^2 + uv(2+u)
        let c = saddle_infinity_chart(1).unwrap();
        let mut expected_p = BiPoly::zero(c.p.trunc_degree());
        expected_p.add_term(1, 1, r(-2));
        expected_p.add_term(2, 1, r(-1));
        expected_p.add_term(2, 0, r(2));
        expected_p.add_term(3, 0, r(1));
        let mut expected_q = BiPoly::zero(c.q.trunc_degree());
        expected_q.add_term(0, 2, r(-1));
        expected_q.add_term(1, 2, r(-1));
        expected_q.add_term(1, 1, r(2));
        expected_q.add_term(2, 1, r(1));
        assert_eq!(c.p, expected_p);
        assert_eq!(c.q, expected_q);
    }

    #[test]
    fn chart_system_k2() {
        // u' = -2uv^3 - u^2 v^3 - u^3 (2+u)^2, v' = -v^4 - uv^4 - u^2 (2+u)^2 v
        let c = saddle_infinity_chart(2).unwrap();
        let mut expected_p = BiPoly::zero(c.p.trunc_degree());
        expected_p.add_term(1, 3, r(-2));
        expected_p.add_term(2, 3, r(-1));
        expected_p.add_term(3, 0, r(-4));
        expected_p.add_term(4, 0, r(-4));
        expected_p.add_term(5, 0, r(-1));
        let mut expected_q = BiPoly::zero(c.q.trunc_degree());
        expected_q.add_term(0, 4, r(-1));
        expected_q.add_term(1, 4, r(-1));
        expected_q.add_term(2, 1, r(-4));
        expected_q.add_term(3, 1, r(-4));
        expected_q.add_term(4, 1, r(-1));
        assert_eq!(c.p, expected_p);
        assert_eq!(c.q, expected_q);
    }

    #[test]
    fn chart_pushforward_numeric_oracle() {
        // the translated chart system times the removed monomial equals the
        // chain-rule image of the original field
        for k in [1u32, 2] {
            let f = saddle_field(k).unwrap().map_coeffs(|c| c.to_f64());
            let chart = saddle_infinity_chart(k).unwrap().map_coeffs(|c| c.to_f64());
            for &(w, v) in &[(0.3f64, 0.4f64), (-0.2, 0.7), (0.15, -0.5)] {
                let u = w + 1.0; // untranslated chart coordinate
                let (x, y) = (1.0 / v, u / v);
                let (dx, dy) = f.eval_f64(x, y);
                let du = dy / x - y * dx / (x * x);
                let dv = -dx / (x * x);
                // the chart system is the raw pushforward times v^(2k-1)
                let scale = v.powi(2 * k as i32 - 1);
                let (cw, cv) = chart.eval_f64(w, v);
                assert!(
                    (cw - du * scale).abs() < 1e-11 * (du * scale).abs().max(1.0),
                    "k={k} u-component"
                );
                assert!(
                    (cv - dv * scale).abs() < 1e-11 * (dv * scale).abs().max(1.0),
                    "k={k} v-component"
                );
            }
        }
    }

    #[test]
    fn axes_are_invariant() {
        for k in [1u32, 2, 3] {
            let c = saddle_infinity_chart(k).unwrap();
            // u = 0 invariant: u' vanishes there; restricted to it v' = -v^2k
            for (i, _, _) in c.p.terms() {
                assert!(i >= 1, "u' must carry a factor u");
            }
            let v_only: Vec<_> = c.q.terms().filter(|(i, _, _)| *i == 0).collect();
            assert_eq!(v_only.len(), 1);
            let (_, j, coeff) = v_only[0];
            assert_eq!(j, 2 * k);
            assert_eq!(coeff, &r(-1));
            // v = 0 invariant (the equator)
            for (_, j, _) in c.q.terms() {
                assert!(j >= 1, "v' must carry a factor v");
            }
        }
    }

    #[test]
    fn dual_dimension_values() {
        assert_eq!(
            dual_box_dimension(1).unwrap(),
            DualDimensionResult {
                k: 1,
                dual_dim: rat(4, 3),
                infinity_dim: rat(1, 2)
            }
        );
        let d2 = dual_box_dimension(2).unwrap();
        assert_eq!(d2.dual_dim, rat(8, 5));
        assert_eq!(d2.infinity_dim, rat(3, 4));
        let d3 = dual_box_dimension(3).unwrap();
        assert_eq!(d3.dual_dim, rat(12, 7));
        assert_eq!(d3.infinity_dim, rat(5, 6));
        // strictly increasing in k, below 2 and 1
        let mut prev = dual_box_dimension(1).unwrap();
        for k in 2..12 {
            let cur = dual_box_dimension(k).unwrap();
            assert!(cur.dual_dim > prev.dual_dim && cur.dual_dim < rat(2, 1));
            assert!(cur.infinity_dim > prev.infinity_dim && cur.infinity_dim < rat(1, 1));
            prev = cur;
        }
        assert!(dual_box_dimension(0).is_err());
    }

    #[test]
    fn hyperbolic_coordinates_reproduce_polar_normal_form() {
        // a_n = b0 = 1, b_i = 0 (i >= 1): r' = r(r^2n + sum a_i r^2i), phi' = 1
        let mut nf = SaddleNormalForm::weak_of_order(3);
        nf.a_coeffs[1] = BigRational::new(BigInt::from(2), BigInt::from(5));
        let field = nf.field().map_coeffs(|c| c.to_f64());
        for &(radius, phi) in &[(0.3f64, 0.2f64), (0.7, -0.9), (0.5, 1.4)] {
            let (x, y) = (radius * phi.cosh(), radius * phi.sinh());
            let (dx, dy) = field.eval_f64(x, y);
            let r_dot = (x * dx - y * dy) / radius;
            let phi_dot = (x * dy - y * dx) / (radius * radius);
            let expected = radius * (radius.powi(6) + 0.4 * radius.powi(2));
            assert!((r_dot - expected).abs() < 1e-12 * expected.abs().max(1.0));
            assert!((phi_dot - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn weak_order_detection() {
        let nf = SaddleNormalForm::weak_of_order(2);
        assert_eq!(nf.weak_order(), Some(2));
        assert!(SaddleNormalForm::new(vec![BigRational::zero()], vec![BigRational::zero()]).is_err());
    }

    #[test]
    fn v_axis_orbit_has_the_predicted_increments() {
        let cfg = OrbitCfg {
            floor: 1e-9,
            max_iter: 15_000,
            ..Default::default()
        };
        let ver = verify_saddle_infinity(1, &cfg, &EstimatorCfg::default()).unwrap();
        assert_eq!(ver.predicted, rat(1, 2));
        assert!((ver.increment_alpha - 2.0).abs() < 0.05, "alpha {}", ver.increment_alpha);
        assert!((ver.boxcount.value - 0.5).abs() < 0.1, "boxcount {}", ver.boxcount.value);
    }

    #[test]
    fn stable_manifold_orbit_is_trivial() {
        // orbit on the stable manifold of the saddle decays geometrically
        let series = saddle_stable_manifold(1, 8).unwrap();
        let field = saddle_field(1).unwrap().map_coeffs(|c| c.to_f64());
        let eval = series.series.clone();
        let curve = move |x: f64| eval.eval_f64(x);
        let dir = inward_time_span(&field, &curve, false, 0.2);
        let cfg = OrbitCfg {
            floor: 1e-30,
            max_iter: 200,
            time_span: dir,
            ..Default::default()
        };
        let orbit = iterate_on_curve(&field, &curve, false, 0.2, &cfg).unwrap();
        assert!(orbit.independent.len() > 60);
        let fit =
            estimate_increment_exponent(&orbit.independent, &IncrementCfg::default()).unwrap();
        assert!(fit.hyperbolic, "alpha {}", fit.alpha);
    }
}
