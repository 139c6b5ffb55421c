//! Quasihomogeneous blow-up and separatrix Puiseux expansions.
//!
//! The nonmonodromic cases of the model `x' = y, y' = a x^m + b x^n y + ...`
//! split by the Newton diagram into a Hamiltonian-like case (`m < 2n+1`,
//! weights `(2, m+1)` or `(1, (m+1)/2)`), a singular-like case (`m > 2n+1`,
//! weights `(1, n+1)`) and the mixed case `m = 2n+1`. One blow-up
//! desingularizes each of them; the separatrix branches carry leading data
//!
//! - `y ~ +/- sqrt(2a/(m+1)) x^((m+1)/2)` in the Hamiltonian-like case,
//! - `y ~ (b/(n+1)) x^(n+1)` and a center branch `y ~ -(a/b) x^(m-n)` in
//!   the singular-like case,
//! - `y ~ A x^(n+1)` with `(n+1) A^2 - b A - a = 0` in the mixed case.
//!
//! Higher corrections are computed by a triangular recursion directly on
//! the invariance equation of the curve; the blow-up chart route is kept
//! as an independent cross-check.

use crate::coeff::{rat, Coeff, QuadExt, Rat};
use crate::error::BranchError;
use crate::model::NilpotentModel;
use crate::poly::{BiPoly, PlanarVectorField};
use crate::series::{poly_compose_series, Axis, PuiseuxSeries};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Newton-diagram case of the model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseTag {
    /// `m < 2n+1`, `m` even (cusp-like).
    Case1A,
    /// `m < 2n+1`, `m` odd (saddle-like).
    Case1B,
    /// `m > 2n+1` (saddle-node family).
    Case2,
    /// `m = 2n+1` (mixed).
    Case3,
}

/// Flow direction on a branch for `x > 0` small.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchStability {
    Stable,
    Unstable,
    Center,
}

/// Leading separatrix data `y ~ c0 x^gamma` on a ladder of step `delta`.
#[derive(Clone, Debug)]
pub struct BranchLead {
    pub gamma: Rat,
    pub step: Rat,
    pub c0: QuadExt,
    pub case: CaseTag,
    pub stability: BranchStability,
}

/// A separatrix branch with its truncated Puiseux expansion.
#[derive(Clone, Debug)]
pub struct SeparatrixBranch {
    pub series: PuiseuxSeries<QuadExt>,
    pub stability: BranchStability,
    pub case: CaseTag,
    /// Location of the generating singularity in the blow-up chart.
    pub source_singularity: (f64, f64),
    /// Ladder indices where a resonance forced the free coefficient to 0.
    pub resonant_orders: Vec<usize>,
    /// First exponent at which the invariance residual may be nonzero.
    pub residual_order: Rat,
}

pub fn case_tag(model: &NilpotentModel) -> CaseTag {
    let m = model.m();
    if !model.has_damping() {
        return if m % 2 == 0 { CaseTag::Case1A } else { CaseTag::Case1B };
    }
    let n = model.n();
    if m < 2 * n + 1 {
        if m % 2 == 0 {
            CaseTag::Case1A
        } else {
            CaseTag::Case1B
        }
    } else if m > 2 * n + 1 {
        CaseTag::Case2
    } else {
        CaseTag::Case3
    }
}

/// Blow-up weights used for each case.
pub fn case_weights(model: &NilpotentModel) -> (u32, u32) {
    match case_tag(model) {
        CaseTag::Case1A => (2, model.m() + 1),
        CaseTag::Case1B => (1, (model.m() + 1) / 2),
        CaseTag::Case2 | CaseTag::Case3 => (1, model.n() + 1),
    }
}

/// All real separatrix branches of a nonmonodromic model on `x >= 0`.
pub fn separatrix_leading(model: &NilpotentModel) -> Result<Vec<BranchLead>, BranchError> {
    let m = model.m() as i64;
    let n = model.n() as i64;
    let a = model.a().clone();
    let b = model.b().clone();
    let case = case_tag(model);
    match case {
        CaseTag::Case1A | CaseTag::Case1B => {
            if a.is_negative() {
                if case == CaseTag::Case1B {
                    // odd m with a < 0 is a center or focus
                    return Err(BranchError::MonodromicInput);
                }
                // even m with a < 0 has its branches on x <= 0 only
                return Err(BranchError::NegativeAxisBranch);
            }
            let gamma = rat(m + 1, 2);
            let step = if m % 2 == 0 { rat(1, 2) } else { rat(1, 1) };
            let radicand =
                BigRational::from_integer(BigInt::from(2)) * &a
                    / BigRational::from_integer(BigInt::from(m + 1));
            let c0 = QuadExt::sqrt_rational(&radicand)
                .ok_or_else(|| BranchError::Leading("negative radicand".into()))?;
            Ok(vec![
                BranchLead {
                    gamma,
                    step,
                    c0: c0.clone(),
                    case,
                    stability: BranchStability::Unstable,
                },
                BranchLead {
                    gamma,
                    step,
                    c0: -c0,
                    case,
                    stability: BranchStability::Stable,
                },
            ])
        }
        CaseTag::Case2 => {
            let np1 = BigRational::from_integer(BigInt::from(n + 1));
            let unstable_c0 = QuadExt::rational(&b / &np1);
            let center_c0 = QuadExt::rational(-&a / &b);
            Ok(vec![
                BranchLead {
                    gamma: rat(n + 1, 1),
                    step: rat(1, 1),
                    c0: unstable_c0,
                    case,
                    stability: if b.is_positive() {
                        BranchStability::Unstable
                    } else {
                        BranchStability::Stable
                    },
                },
                BranchLead {
                    gamma: rat(m - n, 1),
                    step: rat(1, 1),
                    c0: center_c0,
                    case,
                    stability: BranchStability::Center,
                },
            ])
        }
        CaseTag::Case3 => {
            // chart singularities solve (n+1) A^2 - b A - a = 0
            let disc = &b * &b
                + BigRational::from_integer(BigInt::from(4 * (n + 1))) * &a;
            if disc.is_negative() {
                return Err(BranchError::MonodromicInput);
            }
            let two_np1 = BigRational::from_integer(BigInt::from(2 * (n + 1)));
            let root = QuadExt::sqrt_rational(&disc)
                .ok_or_else(|| BranchError::Leading("negative discriminant".into()))?;
            let b_q = QuadExt::rational(b.clone());
            let denom = QuadExt::rational(two_np1);
            let a1 = (b_q.clone() + root.clone()) / denom.clone();
            if disc.is_zero() {
                return Ok(vec![BranchLead {
                    gamma: rat(n + 1, 1),
                    step: rat(1, 1),
                    c0: a1,
                    case,
                    stability: BranchStability::Center,
                }]);
            }
            let a2 = (b_q - root) / denom;
            let stab = |c: &QuadExt| {
                if c.to_f64() > 0.0 {
                    BranchStability::Unstable
                } else {
                    BranchStability::Stable
                }
            };
            Ok(vec![
                BranchLead {
                    gamma: rat(n + 1, 1),
                    step: rat(1, 1),
                    stability: stab(&a1),
                    c0: a1,
                    case,
                },
                BranchLead {
                    gamma: rat(n + 1, 1),
                    step: rat(1, 1),
                    stability: stab(&a2),
                    c0: a2,
                    case,
                },
            ])
        }
    }
}

// ---------------------------------------------------------------------------
// triangular coefficient recursion on the invariance equation
// ---------------------------------------------------------------------------

/// Residual of the invariance condition for a candidate curve.
///
/// With `dependent = Y` and `s = s(x)`: `R = Q(x, s) - s'(x) P(x, s)`;
/// with `dependent = X` the roles of the components swap.
pub fn invariance_residual<C: Coeff>(
    field: &PlanarVectorField<C>,
    s: &PuiseuxSeries<C>,
    dependent: Axis,
    cap: Rat,
) -> PuiseuxSeries<C> {
    let (along, transverse) = match dependent {
        Axis::Y => (&field.p, &field.q),
        Axis::X => (&field.q, &field.p),
    };
    let axis = match dependent {
        Axis::Y => Axis::Y,
        Axis::X => Axis::X,
    };
    let q_on = poly_compose_series(transverse, s, axis, cap).expect("compose");
    let p_on = poly_compose_series(along, s, axis, cap).expect("compose");
    q_on.sub(&s.derivative().mul(&p_on))
}

/// Result of the coefficient recursion.
#[derive(Clone, Debug)]
pub struct BranchSeries<C: Coeff> {
    pub series: PuiseuxSeries<C>,
    pub resonant_orders: Vec<usize>,
    pub residual_order: Rat,
}

/// In float mode, drop residual coefficients that are pure cancellation
/// noise relative to the dominant magnitude. Exact fields pass through.
fn clean_residual<C: Coeff>(s: &PuiseuxSeries<C>, floor_scale: f64) -> PuiseuxSeries<C> {
    if !C::FLOAT || s.is_zero() {
        return s.clone();
    }
    let dominant = s
        .coeffs()
        .iter()
        .map(|c| c.to_f64().abs())
        .fold(0.0, f64::max)
        .max(floor_scale);
    let thr = dominant * 1e-11;
    let coeffs: Vec<C> = s
        .coeffs()
        .iter()
        .map(|c| {
            if c.to_f64().abs() < thr {
                C::zero()
            } else {
                c.clone()
            }
        })
        .collect();
    PuiseuxSeries::new(s.gamma(), s.step(), coeffs, s.order())
        .unwrap_or_else(|_| PuiseuxSeries::zero(s.step(), s.order()))
}

/// Solve for the corrections of an invariant curve on the exponent ladder
/// `gamma + k*step`, `k = 0..=k_terms`, given the leading coefficient.
///
/// At each order the unknown enters the residual affinely; the linear
/// factor is probed by evaluating the residual at two trial values, which
/// keeps one code path for all cases including chart center manifolds.
/// A resonant order with consistent right-hand side picks the coefficient
/// 0; an inconsistent one is reported.
pub fn invariant_branch_series<C: Coeff>(
    field: &PlanarVectorField<C>,
    dependent: Axis,
    gamma: Rat,
    step: Rat,
    c0: C,
    k_terms: usize,
) -> Result<BranchSeries<C>, BranchError> {
    let max_deg = field
        .p
        .max_degree()
        .unwrap_or(0)
        .max(field.q.max_degree().unwrap_or(0)) as i64;
    let cap = gamma * rat(max_deg + 2, 1) + step * rat(k_terms as i64 + 3, 1) + rat(3, 1);
    let mut coeffs = vec![C::zero(); k_terms + 1];
    coeffs[0] = c0;
    let mut resonant = Vec::new();

    // during the recursion the candidate carries the full cap as its order:
    // coefficients beyond index k are undetermined but act on the residual
    // strictly above the exponent probed at step k
    let build = |coeffs: &[C]| -> PuiseuxSeries<C> {
        PuiseuxSeries::new(gamma, step, coeffs.to_vec(), cap)
            .unwrap_or_else(|_| PuiseuxSeries::zero(step, cap))
    };

    for k in 1..=k_terms {
        let base = build(&coeffs[..=k]);
        let r0 = clean_residual(&invariance_residual(field, &base, dependent, cap), 0.0);
        if r0.is_zero() {
            // exactly invariant so far; all further corrections vanish
            continue;
        }
        let mut probe_coeffs = coeffs[..=k].to_vec();
        probe_coeffs[k] = C::one();
        let r1 = clean_residual(
            &invariance_residual(field, &build(&probe_coeffs), dependent, cap),
            0.0,
        );
        let delta = clean_residual(&r1.sub(&r0), 0.0);
        let Some((lin, at)) = delta.leading().map(|(c, e)| (c.clone(), e)) else {
            return Err(BranchError::NonTriangular { order: k });
        };
        let rho = r0.coeff_at(at);
        // residual terms below the unknown's action cannot be cancelled
        if let Some((_, e0)) = r0.leading() {
            if e0 < at {
                return Err(BranchError::NonTriangular { order: k });
            }
        }
        if lin.is_zero() {
            if rho.is_zero() {
                resonant.push(k);
                continue;
            }
            return Err(BranchError::NonTriangular { order: k });
        }
        coeffs[k] = -rho / lin;
    }

    let probe_series = build(&coeffs);
    let series_scale = coeffs.iter().map(|c| c.to_f64().abs()).fold(0.0, f64::max);
    let final_residual = clean_residual(
        &invariance_residual(field, &probe_series, dependent, cap),
        series_scale,
    );
    let last_exp = gamma + step * rat(k_terms as i64, 1);
    let residual_order = final_residual
        .leading()
        .map(|(_, e)| e)
        .unwrap_or(final_residual.order());
    if residual_order <= last_exp {
        return Err(BranchError::NonTriangular { order: k_terms });
    }
    // the returned series carries its honest truncation order
    let series = PuiseuxSeries::new(gamma, step, coeffs, last_exp + step)
        .unwrap_or_else(|_| PuiseuxSeries::zero(step, last_exp + step));
    Ok(BranchSeries {
        series,
        resonant_orders: resonant,
        residual_order,
    })
}

/// Default number of kept terms.
pub const DEFAULT_TERMS: usize = 8;

/// Full Puiseux expansion of one separatrix branch of a model.
pub fn separatrix_series(
    model: &NilpotentModel,
    lead: &BranchLead,
    k_terms: usize,
) -> Result<SeparatrixBranch, BranchError> {
    let field = model.field().map_coeffs(|c| QuadExt::rational(c.clone()));
    let solved = invariant_branch_series(
        &field,
        Axis::Y,
        lead.gamma,
        lead.step,
        lead.c0.clone(),
        k_terms,
    )?;
    Ok(SeparatrixBranch {
        series: solved.series,
        stability: lead.stability,
        case: lead.case,
        source_singularity: (0.0, lead.c0.to_f64()),
        resonant_orders: solved.resonant_orders,
        residual_order: solved.residual_order,
    })
}

// ---------------------------------------------------------------------------
// quasihomogeneous blow-up transform
// ---------------------------------------------------------------------------

/// A blow-up chart `x = u^p, y = u^q ybar` with the common monomial factor
/// removed from the transformed field.
#[derive(Clone, Debug)]
pub struct BlowupChart<C: Coeff> {
    pub weights: (u32, u32),
    /// Field in `(u, ybar)` after division.
    pub transformed: PlanarVectorField<C>,
    /// Monomial `u^e` removed; negative exponent means multiplied in.
    pub divisor_u_exp: i64,
}

/// Apply the weighted substitution and clear the common power of `u`.
pub fn blow_up<C: Coeff>(
    field: &PlanarVectorField<C>,
    weights: (u32, u32),
) -> BlowupChart<C> {
    let (p, q) = weights;
    assert!(p >= 1 && q >= 1, "weights must be positive");
    let t_out = field.trunc_degree() * (p + q) + q + 2;

    // substituted components as terms (u_exp, ybar_exp, coeff)
    let subst = |poly: &BiPoly<C>| -> Vec<(i64, u32, C)> {
        poly.terms()
            .map(|(i, j, c)| ((p * i + q * j) as i64, j, c.clone()))
            .collect()
    };
    let a_terms = subst(&field.p);
    let b_terms = subst(&field.q);

    // u' = P(...)/ (p u^(p-1));  ybar' = Q(...) u^(-q) - (q/p) ybar P(...) u^(-p)
    let p_inv = C::one() / C::from_i64(p as i64);
    let u_dot: Vec<(i64, u32, C)> = a_terms
        .iter()
        .map(|(e, j, c)| (e - (p as i64 - 1), *j, c.clone() * p_inv.clone()))
        .collect();
    let mut ybar_dot: Vec<(i64, u32, C)> = b_terms
        .iter()
        .map(|(e, j, c)| (e - q as i64, *j, c.clone()))
        .collect();
    let q_over_p = C::from_i64(q as i64) * p_inv;
    for (e, j, c) in &a_terms {
        ybar_dot.push((e - p as i64, j + 1, -(c.clone() * q_over_p.clone())));
    }

    let min_exp = u_dot
        .iter()
        .chain(ybar_dot.iter())
        .map(|(e, _, _)| *e)
        .min()
        .unwrap_or(0);
    let lift = (-min_exp).max(0);

    let collect = |terms: Vec<(i64, u32, C)>| -> BiPoly<C> {
        let mut out = BiPoly::zero(t_out);
        for (e, j, c) in terms {
            out.add_term((e + lift) as u32, j, c);
        }
        out
    };
    let raw = PlanarVectorField::new(collect(u_dot), collect(ybar_dot)).expect("same trunc");
    let (transformed, (du, _)) = raw.divide_common_monomial();
    BlowupChart {
        weights,
        transformed,
        divisor_u_exp: du as i64 - lift,
    }
}

/// Invariant-manifold Taylor series of the blow-up chart at a singularity
/// `(0, ybar0)` on the divisor: `ybar = ybar0 + sum_k alpha_k u^k`.
pub fn chart_manifold_series<C: Coeff>(
    chart: &BlowupChart<C>,
    ybar0: &C,
    k_terms: usize,
) -> Result<BranchSeries<C>, BranchError> {
    let shifted = PlanarVectorField::new(
        shift_y(&chart.transformed.p, ybar0),
        shift_y(&chart.transformed.q, ybar0),
    )
    .expect("same trunc");
    // unknown leading: start the ladder at u^1 with coefficient solved too
    let max_deg = shifted
        .p
        .max_degree()
        .unwrap_or(0)
        .max(shifted.q.max_degree().unwrap_or(0)) as i64;
    let cap = rat(max_deg + k_terms as i64 + 6, 1);
    let mut coeffs = vec![C::zero(); k_terms + 1];
    let mut resonant = Vec::new();
    // dummy leading slot at u^0 stays zero; unknowns start at u^1
    for k in 1..=k_terms {
        let base = PuiseuxSeries::new(rat(0, 1), rat(1, 1), coeffs[..=k].to_vec(), cap)
            .unwrap_or_else(|_| PuiseuxSeries::zero(rat(1, 1), cap));
        let r0 = clean_residual(&invariance_residual(&shifted, &base, Axis::Y, cap), 0.0);
        let mut probe = coeffs[..=k].to_vec();
        probe[k] = C::one();
        let probe_series = PuiseuxSeries::new(rat(0, 1), rat(1, 1), probe, cap).unwrap();
        let r1 = clean_residual(&invariance_residual(&shifted, &probe_series, Axis::Y, cap), 0.0);
        let delta = clean_residual(&r1.sub(&r0), 0.0);
        let Some((lin, at)) = delta.leading().map(|(c, e)| (c.clone(), e)) else {
            if r0.is_zero() {
                resonant.push(k);
                continue;
            }
            return Err(BranchError::NonTriangular { order: k });
        };
        let rho = r0.coeff_at(at);
        if lin.is_zero() {
            if rho.is_zero() {
                resonant.push(k);
                continue;
            }
            return Err(BranchError::NonTriangular { order: k });
        }
        coeffs[k] = -rho / lin;
    }
    let series = PuiseuxSeries::new(
        rat(0, 1),
        rat(1, 1),
        coeffs,
        rat(k_terms as i64 + 1, 1),
    )
    .map_err(|e| BranchError::Leading(e.to_string()))?;
    let res = invariance_residual(&shifted, &series, Axis::Y, cap);
    Ok(BranchSeries {
        residual_order: res.leading().map(|(_, e)| e).unwrap_or(res.order()),
        series,
        resonant_orders: resonant,
    })
}

fn shift_y<C: Coeff>(poly: &BiPoly<C>, a: &C) -> BiPoly<C> {
    // substitute y -> y + a by transposing through shift_x
    let transposed = BiPoly::from_terms(poly.terms().map(|(i, j, c)| (j, i, c.clone())), poly.trunc_degree());
    let shifted = transposed.shift_x(a);
    BiPoly::from_terms(
        shifted.terms().map(|(i, j, c)| (j, i, c.clone())),
        poly.trunc_degree(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(a: i64, m: u32, b: i64, n: u32) -> NilpotentModel {
        NilpotentModel::from_i64(a, m, b, n).unwrap()
    }

    fn rq(n: i64, d: i64) -> QuadExt {
        QuadExt::rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    #[test]
    fn cusp_chart_matches_closed_form() {
        // m = 2 cusp: weights (2, 3) give u' = (1/2) u ybar,
        // ybar' = 1 - (3/2) ybar^2 + O(u)
        let f = model(1, 2, 1, 1).field();
        let chart = blow_up(&f, (2, 3));
        let t = &chart.transformed;
        assert_eq!(t.p.coeff(1, 1), BigRational::new(1.into(), 2.into()));
        assert_eq!(t.p.num_terms(), 1);
        assert_eq!(t.q.coeff(0, 0), BigRational::from_integer(1.into()));
        assert_eq!(t.q.coeff(0, 2), BigRational::new((-3).into(), 2.into()));
        // singularities on the divisor: ybar = +/- sqrt(2/3)
        let val = t.q.eval_f64(0.0, (2.0f64 / 3.0).sqrt());
        assert!(val.abs() < 1e-14);
    }

    #[test]
    fn identity_weights_reduce_to_directional_blowup() {
        // x' = y, y' = x^2 with x = u, y = u ybar:
        // u' = u ybar, ybar' = x^2/u - ybar^2 -> after dividing by u:
        // u' = u ybar / u ... hand substitution: ybar' = u - ybar^2, u' = u ybar
        let f = PlanarVectorField::new(
            BiPoly::<BigRational>::y(6),
            BiPoly::monomial(2, 0, BigRational::from_integer(1.into()), 6),
        )
        .unwrap();
        let chart = blow_up(&f, (1, 1));
        let t = &chart.transformed;
        assert_eq!(t.p.coeff(1, 1), BigRational::from_integer(1.into()));
        assert_eq!(t.q.coeff(1, 0), BigRational::from_integer(1.into()));
        assert_eq!(t.q.coeff(0, 2), BigRational::from_integer((-1).into()));
    }

    #[test]
    fn case2_chart_singularities() {
        // weights (1, n+1): divisor singularities at ybar = 0 and 1/(n+1)
        let m = model(1, 4, 1, 1);
        let chart = blow_up(&m.field(), case_weights(&m));
        let q_on_divisor = |ybar: f64| chart.transformed.q.eval_f64(0.0, ybar);
        assert!(q_on_divisor(0.0).abs() < 1e-14);
        assert!(q_on_divisor(0.5).abs() < 1e-14);
        assert!(q_on_divisor(0.25).abs() > 1e-3);
    }

    #[test]
    fn blowup_pushforward_matches_numeric_oracle() {
        // evaluate the chart field numerically against the chain rule
        // applied to the original field at sample points
        let m = model(1, 2, -1, 1);
        let f = m.field();
        let (p, q) = (2u32, 3u32);
        let chart = blow_up(&f, (p, q));
        let cf = f.map_coeffs(|c| c.to_f64());
        let ct = chart.transformed.map_coeffs(|c| c.to_f64());
        for &(u, ybar) in &[(0.3f64, 0.7f64), (0.2, -0.4), (0.15, 1.1)] {
            let x = u.powi(p as i32);
            let y = u.powi(q as i32) * ybar;
            let (dx, dy) = cf.eval_f64(x, y);
            let du = dx / (p as f64 * u.powi(p as i32 - 1));
            let dybar = dy / u.powi(q as i32) - q as f64 * ybar / u * du;
            let scale = u.powi(chart.divisor_u_exp as i32);
            let (tu, ty) = ct.eval_f64(u, ybar);
            assert!((tu * scale - du).abs() < 1e-12 * du.abs().max(1.0));
            assert!((ty * scale - dybar).abs() < 1e-12 * dybar.abs().max(1.0));
        }
    }

    #[test]
    fn cusp_leading_data() {
        let leads = separatrix_leading(&model(1, 2, 1, 1)).unwrap();
        assert_eq!(leads.len(), 2);
        assert_eq!(leads[0].gamma, rat(3, 2));
        let c = leads[0].c0.to_f64();
        assert!((c - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(leads[1].c0.to_f64(), -c);
        assert_eq!(leads[0].case, CaseTag::Case1A);
    }

    #[test]
    fn saddle_node_leading_data() {
        let leads = separatrix_leading(&model(1, 4, 1, 1)).unwrap();
        assert_eq!(leads[0].gamma, rat(2, 1));
        assert_eq!(leads[0].c0, rq(1, 2));
        assert_eq!(leads[1].gamma, rat(3, 1));
        assert_eq!(leads[1].c0, rq(-1, 1));
        assert_eq!(leads[1].stability, BranchStability::Center);
    }

    #[test]
    fn mixed_case_roots() {
        // m=5, n=2, a=-1, b=-4: (n+1)A^2 - bA - a = 3A^2 + 4A + 1 = 0
        let leads = separatrix_leading(&model(-1, 5, -4, 2)).unwrap();
        assert_eq!(leads[0].gamma, rat(3, 1));
        assert_eq!(leads[0].c0, rq(-1, 3));
        assert_eq!(leads[1].c0, rq(-1, 1));

        // b = 1 normalization: roots (1 +/- sqrt(4a(n+1)+1)) / (2(n+1))
        let leads2 = separatrix_leading(&model(1, 3, 1, 1)).unwrap();
        assert_eq!(leads2[0].c0, rq(1, 1));
        assert_eq!(leads2[1].c0, rq(-1, 2));
    }

    #[test]
    fn monodromic_inputs_rejected() {
        assert_eq!(
            separatrix_leading(&model(-1, 3, 1, 5)).unwrap_err(),
            BranchError::MonodromicInput
        );
        // case 3 with negative discriminant
        assert_eq!(
            separatrix_leading(&model(-1, 3, 1, 1)).unwrap_err(),
            BranchError::MonodromicInput
        );
        // even m, a < 0: branches on the negative axis only
        assert_eq!(
            separatrix_leading(&model(-1, 2, 1, 1)).unwrap_err(),
            BranchError::NegativeAxisBranch
        );
    }

    #[test]
    fn remark1_vanishing_pattern_m2() {
        // m=2, n=1: first correction at k = 2n+1-m = 1
        let m21 = model(1, 2, 1, 1);
        let lead = separatrix_leading(&m21).unwrap().into_iter().next().unwrap();
        let b = separatrix_series(&m21, &lead, 8).unwrap();
        assert!(!b.series.coeff_at(rat(2, 1)).is_zero(), "alpha_1 nonzero");

        // m=2, n=3: nonzero corrections only at multiples of k = 5
        let m23 = model(1, 2, 1, 3);
        let lead = separatrix_leading(&m23).unwrap().into_iter().next().unwrap();
        let b = separatrix_series(&m23, &lead, 12).unwrap();
        for k in 1..=12i64 {
            let e = rat(3, 2) + rat(k, 2);
            let c = b.series.coeff_at(e);
            if k % 5 == 0 {
                assert!(!c.is_zero(), "alpha_{k} should be nonzero");
            } else {
                assert!(c.is_zero(), "alpha_{k} should vanish");
            }
        }
    }

    #[test]
    fn remark2_saddle_series() {
        // m=3, n=2: y = sqrt(1/2) x^2 + alpha_1 x^3 + ...
        let m32 = model(1, 3, 1, 2);
        let lead = separatrix_leading(&m32).unwrap().into_iter().next().unwrap();
        assert_eq!(lead.gamma, rat(2, 1));
        assert!((lead.c0.to_f64() - 0.5f64.sqrt()).abs() < 1e-15);
        let b = separatrix_series(&m32, &lead, 6).unwrap();
        assert!(!b.series.coeff_at(rat(3, 1)).is_zero());
    }

    #[test]
    fn remark3_explicit_first_correction() {
        // m > 2n+1 unstable branch: alpha_k = a(n+1)/(m-n) at k = m-(2n+1),
        // i.e. the correction enters at exponent x^(m-n)
        for (m, n) in [(4u32, 1u32), (5, 1), (6, 1), (6, 2)] {
            let mm = model(1, m, 1, n);
            let lead = separatrix_leading(&mm).unwrap().into_iter().next().unwrap();
            let b = separatrix_series(&mm, &lead, (m - n) as usize + 1).unwrap();
            let k = (m - 2 * n - 1) as i64;
            for j in 1..k {
                assert!(
                    b.series.coeff_at(rat(n as i64 + 1 + j, 1)).is_zero(),
                    "m={m} n={n}: alpha_{j} should vanish"
                );
            }
            let alpha_k = b.series.coeff_at(rat((m - n) as i64, 1));
            assert_eq!(
                alpha_k,
                rq(n as i64 + 1, (m - n) as i64),
                "m={m} n={n}: alpha_k = (n+1)/(m-n)"
            );
        }
    }

    #[test]
    fn degenerate_mixed_case_is_exact() {
        // 1 + 4a(n+1) = 0 with b = 1: y = x^(n+1)/(2(n+1)) exactly
        let mm = NilpotentModel::new(
            BigRational::new(BigInt::from(-1), BigInt::from(8)),
            3,
            BigRational::from_integer(1.into()),
            1,
        )
        .unwrap();
        let leads = separatrix_leading(&mm).unwrap();
        assert_eq!(leads.len(), 1);
        assert_eq!(leads[0].c0, rq(1, 4));
        let b = separatrix_series(&mm, &leads[0], 8).unwrap();
        assert_eq!(b.series.coeffs().len(), 1, "no corrections");
    }

    #[test]
    fn node_branches_are_exactly_invariant() {
        // x' = y, y' = -x^5 - 4x^2 y has invariant curves y = -x^3 and y = -x^3/3
        let mm = model(-1, 5, -4, 2);
        for lead in separatrix_leading(&mm).unwrap() {
            let b = separatrix_series(&mm, &lead, 8).unwrap();
            assert_eq!(b.series.coeffs().len(), 1, "quasihomogeneous: exact branch");
        }
    }

    #[test]
    fn residual_order_exceeds_kept_exponents() {
        for (a, m, b, n) in [(1i64, 2u32, 1i64, 1u32), (1, 3, -1, 2), (1, 4, 1, 1)] {
            let mm = model(a, m, b, n);
            for lead in separatrix_leading(&mm).unwrap() {
                let k = 6;
                let br = separatrix_series(&mm, &lead, k).unwrap();
                let last = lead.gamma + lead.step * rat(k as i64, 1);
                assert!(
                    br.residual_order > last,
                    "residual order {} <= last kept exponent {}",
                    br.residual_order,
                    last
                );
            }
        }
    }

    #[test]
    fn blow_down_consistency_with_chart_manifold() {
        // chart manifold series transported through the blow-up agrees with
        // the direct separatrix recursion, term by term
        for (a, m, b, n) in [(1i64, 2u32, 1i64, 1u32), (1, 2, -1, 1), (1, 3, 1, 2)] {
            let mm = model(a, m, b, n);
            let weights = case_weights(&mm);
            let field_q = mm.field().map_coeffs(|c| QuadExt::rational(c.clone()));
            let chart = blow_up(&field_q, weights);
            for lead in separatrix_leading(&mm).unwrap() {
                let k = 4usize;
                let direct = separatrix_series(&mm, &lead, k * weights.0 as usize).unwrap();
                let manifold = chart_manifold_series(&chart, &lead.c0, k).unwrap();
                // y(x) = x^(q/p) * (c0 + sum alpha_j x^(j/p))
                for j in 1..=k as i64 {
                    let alpha = manifold.series.coeff_at(rat(j, 1));
                    let e = rat(weights.1 as i64, weights.0 as i64)
                        + rat(j, weights.0 as i64);
                    let direct_c = direct.series.coeff_at(e);
                    assert_eq!(alpha, direct_c, "m={m} n={n} term {j}");
                }
            }
        }
    }
}
