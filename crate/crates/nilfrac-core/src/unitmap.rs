//! Unit-time maps: exact Picard jets, numerical flow maps and discrete orbits.
//!
//! The time-1 map of a planar field is computed two independent ways:
//! symbolically, as a Taylor jet at the origin built by Picard iteration
//! (exact rational coefficients when the linear part is nilpotent), and
//! numerically, by adaptive Dormand-Prince 5(4) integration of the flow.
//! Iterating the numerical map produces the discrete orbits whose box
//! dimension the rest of the crate estimates.

use crate::coeff::Coeff;
use crate::error::UnitMapError;
use crate::poly::{BiPoly, PlanarVectorField};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

// ---------------------------------------------------------------------------
// polynomials in (x, y, t) used by the Picard iteration
// ---------------------------------------------------------------------------

/// Polynomial in `x, y, t`, truncated in total `(x, y)` degree only.
#[derive(Clone, Debug, PartialEq)]
struct TimePoly {
    terms: BTreeMap<(u32, u32, u32), BigRational>,
    trunc: u32,
}

impl TimePoly {
    fn zero(trunc: u32) -> Self {
        TimePoly {
            terms: BTreeMap::new(),
            trunc,
        }
    }

    fn add_term(&mut self, i: u32, j: u32, k: u32, c: BigRational) {
        if c.is_zero() || i + j > self.trunc {
            return;
        }
        let e = self.terms.entry((i, j, k)).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(i, j, k));
        }
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j, k), c) in &other.terms {
            out.add_term(i, j, k, c.clone());
        }
        out
    }

    fn scale(&self, f: &BigRational) -> Self {
        let mut out = TimePoly::zero(self.trunc);
        for (&(i, j, k), c) in &self.terms {
            out.add_term(i, j, k, c.clone() * f);
        }
        out
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = TimePoly::zero(self.trunc);
        for (&(i1, j1, k1), c1) in &self.terms {
            for (&(i2, j2, k2), c2) in &other.terms {
                if i1 + i2 + j1 + j2 > self.trunc {
                    continue;
                }
                out.add_term(i1 + i2, j1 + j2, k1 + k2, c1.clone() * c2.clone());
            }
        }
        out
    }

    /// integral from 0 to t
    fn integrate_t(&self) -> Self {
        let mut out = TimePoly::zero(self.trunc);
        for (&(i, j, k), c) in &self.terms {
            out.add_term(
                i,
                j,
                k + 1,
                c.clone() / BigRational::from_integer(BigInt::from(k as i64 + 1)),
            );
        }
        out
    }

    /// multiply by t
    fn shift_t(&self) -> Self {
        let mut out = TimePoly::zero(self.trunc);
        for (&(i, j, k), c) in &self.terms {
            out.add_term(i, j, k + 1, c.clone());
        }
        out
    }

    /// evaluate at t = 1, collapsing to a bivariate polynomial
    fn at_unit_time(&self) -> BiPoly<BigRational> {
        let mut out = BiPoly::zero(self.trunc);
        for (&(i, j, _), c) in &self.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }

    /// substitute time polynomials for the variables of a bivariate polynomial
    fn compose_bipoly(p: &BiPoly<BigRational>, x: &TimePoly, y: &TimePoly, trunc: u32) -> Self {
        let max_i = p.terms().map(|(i, _, _)| i).max().unwrap_or(0);
        let max_j = p.terms().map(|(_, j, _)| j).max().unwrap_or(0);
        let mut xp: Vec<TimePoly> = Vec::with_capacity(max_i as usize + 1);
        let mut yp: Vec<TimePoly> = Vec::with_capacity(max_j as usize + 1);
        let mut one = TimePoly::zero(trunc);
        one.add_term(0, 0, 0, BigRational::one());
        xp.push(one.clone());
        yp.push(one);
        for k in 1..=max_i as usize {
            xp.push(xp[k - 1].mul(x));
        }
        for k in 1..=max_j as usize {
            yp.push(yp[k - 1].mul(y));
        }
        let mut out = TimePoly::zero(trunc);
        for (i, j, c) in p.terms() {
            out = out.add(&xp[i as usize].mul(&yp[j as usize]).scale(c));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Picard jet (exact) and Lie-series jet (float)
// ---------------------------------------------------------------------------

/// Taylor jet of the unit-time map at the origin.
#[derive(Clone, Debug)]
pub struct UnitMapJet<C: Coeff> {
    pub x: BiPoly<C>,
    pub y: BiPoly<C>,
    pub order: u32,
    /// Linear part `exp(A)` of the map, row-major.
    pub linear: [f64; 4],
}

impl<C: Coeff> UnitMapJet<C> {
    pub fn eval(&self, p: (f64, f64)) -> (f64, f64) {
        (self.x.eval_f64(p.0, p.1), self.y.eval_f64(p.0, p.1))
    }

    pub fn to_f64(&self) -> UnitMapJet<f64> {
        UnitMapJet {
            x: self.x.map_coeffs(|c| c.to_f64()),
            y: self.y.map_coeffs(|c| c.to_f64()),
            order: self.order,
            linear: self.linear,
        }
    }
}

/// Result of the exact Picard iteration. Every iterate's unit-time jet is
/// kept so stabilization can be checked order by order.
#[derive(Clone, Debug)]
pub struct PicardResult {
    pub iterates: Vec<(BiPoly<BigRational>, BiPoly<BigRational>)>,
    pub jet: UnitMapJet<BigRational>,
}

fn is_nilpotent2(a: &[BigRational; 4]) -> bool {
    let [a11, a12, a21, a22] = a;
    let m11 = a11 * a11 + a12 * a21;
    let m12 = a11 * a12 + a12 * a22;
    let m21 = a21 * a11 + a22 * a21;
    let m22 = a21 * a12 + a22 * a22;
    m11.is_zero() && m12.is_zero() && m21.is_zero() && m22.is_zero()
}

/// Exact Taylor jet of the unit-time map by Picard iteration.
///
/// Requires a singular origin and a nilpotent linear part, so that
/// `exp(A t) = I + A t` stays polynomial. Iteration `k+1` does not change
/// terms of total degree `<= k`; the returned iterates expose that.
pub fn picard_jet(
    field: &PlanarVectorField<BigRational>,
    order: u32,
) -> Result<PicardResult, UnitMapError> {
    if order > field.trunc_degree() {
        return Err(UnitMapError::OrderExceedsTruncation {
            requested: order,
            available: field.trunc_degree(),
        });
    }
    let a = field.jacobian_origin();
    if !is_nilpotent2(&a) {
        return Err(UnitMapError::LinearPartNotNilpotent);
    }

    // nonlinear remainder of the field
    let lin_p = BiPoly::from_terms(
        [(1u32, 0u32, a[0].clone()), (0, 1, a[1].clone())],
        field.trunc_degree(),
    );
    let lin_q = BiPoly::from_terms(
        [(1u32, 0u32, a[2].clone()), (0, 1, a[3].clone())],
        field.trunc_degree(),
    );
    let nl_p = field.p.sub(&lin_p).expect("same truncation").with_trunc(order);
    let nl_q = field.q.sub(&lin_q).expect("same truncation").with_trunc(order);

    // x^(0)(t) = (I + A t)(x, y)
    let mut x0 = TimePoly::zero(order);
    x0.add_term(1, 0, 0, BigRational::one());
    x0.add_term(1, 0, 1, a[0].clone());
    x0.add_term(0, 1, 1, a[1].clone());
    let mut y0 = TimePoly::zero(order);
    y0.add_term(0, 1, 0, BigRational::one());
    y0.add_term(1, 0, 1, a[2].clone());
    y0.add_term(0, 1, 1, a[3].clone());

    let mut xk = x0.clone();
    let mut yk = y0.clone();
    let mut iterates = vec![(xk.at_unit_time(), yk.at_unit_time())];

    for _ in 0..=order {
        let fp = TimePoly::compose_bipoly(&nl_p, &xk, &yk, order);
        let fq = TimePoly::compose_bipoly(&nl_q, &xk, &yk, order);
        // integral of (I + A (t - tau)) (fp, fq) dtau from 0 to t
        let ap = fp.scale(&a[0]).add(&fq.scale(&a[1]));
        let aq = fp.scale(&a[2]).add(&fq.scale(&a[3]));
        let minus_one = -BigRational::one();
        let int_p = fp
            .integrate_t()
            .add(&ap.integrate_t().shift_t())
            .add(&ap.shift_t().integrate_t().scale(&minus_one));
        let int_q = fq
            .integrate_t()
            .add(&aq.integrate_t().shift_t())
            .add(&aq.shift_t().integrate_t().scale(&minus_one));
        let xn = x0.add(&int_p);
        let yn = y0.add(&int_q);
        let fixed = xn == xk && yn == yk;
        xk = xn;
        yk = yn;
        iterates.push((xk.at_unit_time(), yk.at_unit_time()));
        if fixed {
            break;
        }
    }

    let a_f64 = [a[0].to_f64(), a[1].to_f64(), a[2].to_f64(), a[3].to_f64()];
    Ok(PicardResult {
        jet: UnitMapJet {
            x: xk.at_unit_time(),
            y: yk.at_unit_time(),
            order,
            linear: mat_exp2(a_f64),
        },
        iterates,
    })
}

/// 2x2 matrix exponential by scaling and squaring on the power series.
pub fn mat_exp2(a: [f64; 4]) -> [f64; 4] {
    let norm = a.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let f = 0.5f64.powi(s);
    let b = [a[0] * f, a[1] * f, a[2] * f, a[3] * f];
    let mut result = [1.0, 0.0, 0.0, 1.0];
    let mut term = [1.0, 0.0, 0.0, 1.0];
    for k in 1..30 {
        term = mat_mul2(term, b);
        let kf = 1.0 / k as f64;
        term = [term[0] * kf, term[1] * kf, term[2] * kf, term[3] * kf];
        result = [
            result[0] + term[0],
            result[1] + term[1],
            result[2] + term[2],
            result[3] + term[3],
        ];
        if term.iter().map(|v| v.abs()).fold(0.0, f64::max) < 1e-18 {
            break;
        }
    }
    for _ in 0..s {
        result = mat_mul2(result, result);
    }
    result
}

fn mat_mul2(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

/// Float Taylor jet of the unit-time map through the Lie series
/// `sum_k L^k(id) / k!` evaluated at `t = 1`, where `L g = P g_x + Q g_y`.
/// Works for any linear part; the series terminates exactly when the
/// linear part is nilpotent and converges numerically otherwise.
pub fn lie_jet(field: &PlanarVectorField<f64>, order: u32) -> Result<UnitMapJet<f64>, UnitMapError> {
    if order > field.trunc_degree() {
        return Err(UnitMapError::OrderExceedsTruncation {
            requested: order,
            available: field.trunc_degree(),
        });
    }
    let p = field.p.with_trunc(order);
    let q = field.q.with_trunc(order);
    let lie = |g: &BiPoly<f64>| -> BiPoly<f64> {
        p.mul(&g.dx()).unwrap().add(&q.mul(&g.dy()).unwrap()).unwrap()
    };
    let mut jet_x = BiPoly::<f64>::x(order);
    let mut jet_y = BiPoly::<f64>::y(order);
    let mut term_x = jet_x.clone();
    let mut term_y = jet_y.clone();
    for k in 1u32..400 {
        term_x = lie(&term_x);
        term_y = lie(&term_y);
        let kf = 1.0 / k as f64;
        term_x = term_x.scale(&kf);
        term_y = term_y.scale(&kf);
        jet_x = jet_x.add(&term_x).unwrap();
        jet_y = jet_y.add(&term_y).unwrap();
        let mag = term_x
            .terms()
            .chain(term_y.terms())
            .map(|(_, _, c)| c.abs())
            .fold(0.0, f64::max);
        if mag < 1e-22 {
            break;
        }
    }
    let a = field.jacobian_origin();
    Ok(UnitMapJet {
        x: jet_x,
        y: jet_y,
        order,
        linear: mat_exp2([a[0], a[1], a[2], a[3]]),
    })
}

// ---------------------------------------------------------------------------
// adaptive Dormand-Prince 5(4) integration
// ---------------------------------------------------------------------------

/// Integrator configuration. Tolerances default to 1e-12 absolute and
/// 1e-10 relative; trajectories beyond `domain_bound` abort.
#[derive(Clone, Copy, Debug)]
pub struct IntegratorCfg {
    pub atol: f64,
    pub rtol: f64,
    pub domain_bound: f64,
}

impl Default for IntegratorCfg {
    fn default() -> Self {
        IntegratorCfg {
            atol: 1e-12,
            rtol: 1e-10,
            domain_bound: 10.0,
        }
    }
}

/// Vector field compiled to flat term lists for fast evaluation.
#[derive(Clone, Debug)]
pub struct CompiledField {
    terms_p: Vec<(i32, i32, f64)>,
    terms_q: Vec<(i32, i32, f64)>,
}

impl CompiledField {
    pub fn new<C: Coeff>(field: &PlanarVectorField<C>) -> Self {
        let compile = |p: &BiPoly<C>| {
            p.terms()
                .map(|(i, j, c)| (i as i32, j as i32, c.to_f64()))
                .collect()
        };
        CompiledField {
            terms_p: compile(&field.p),
            terms_q: compile(&field.q),
        }
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        let mut u = 0.0;
        for &(i, j, c) in &self.terms_p {
            u += c * x.powi(i) * y.powi(j);
        }
        let mut v = 0.0;
        for &(i, j, c) in &self.terms_q {
            v += c * x.powi(i) * y.powi(j);
        }
        (u, v)
    }
}

const DP_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrate the flow of `field` from `p` over a signed time span with
/// adaptive steps and PI step-size control.
pub fn flow(
    field: &CompiledField,
    p: (f64, f64),
    t_span: f64,
    cfg: &IntegratorCfg,
) -> Result<(f64, f64), UnitMapError> {
    flow_with(|x, y| field.eval(x, y), p, t_span, cfg)
}

/// [`flow`] over an arbitrary right-hand side.
pub fn flow_with<F: Fn(f64, f64) -> (f64, f64)>(
    field: F,
    p: (f64, f64),
    t_span: f64,
    cfg: &IntegratorCfg,
) -> Result<(f64, f64), UnitMapError> {
    let field = |x: f64, y: f64| field(x, y);
    let dir = t_span.signum();
    let t_end = t_span.abs();
    let mut t = 0.0f64;
    let (mut x, mut y) = p;
    let mut h = (0.1 * t_end).clamp(1e-6, 0.1);
    let mut err_prev: f64 = 1.0;
    let mut k = [(0.0f64, 0.0f64); 7];
    let f0 = field(x, y);
    k[0] = (dir * f0.0, dir * f0.1);

    while t < t_end {
        if h < 1e-15 * t_end.max(1.0) {
            return Err(UnitMapError::StepUnderflow { t, h });
        }
        if t + h > t_end {
            h = t_end - t;
        }
        for s in 1..7 {
            let mut ax = 0.0;
            let mut ay = 0.0;
            for (j, kj) in k.iter().enumerate().take(s) {
                ax += DP_A[s][j] * kj.0;
                ay += DP_A[s][j] * kj.1;
            }
            let f = field(x + h * ax, y + h * ay);
            k[s] = (dir * f.0, dir * f.1);
        }
        // the 5th-order solution reuses row 6 of the tableau (FSAL)
        let mut sx = 0.0;
        let mut sy = 0.0;
        for (j, kj) in k.iter().enumerate().take(6) {
            sx += DP_A[6][j] * kj.0;
            sy += DP_A[6][j] * kj.1;
        }
        let xn = x + h * sx;
        let yn = y + h * sy;
        let mut ex = 0.0;
        let mut ey = 0.0;
        for (j, kj) in k.iter().enumerate() {
            ex += DP_E[j] * kj.0;
            ey += DP_E[j] * kj.1;
        }
        ex *= h;
        ey *= h;
        let scale_x = cfg.atol + cfg.rtol * x.abs().max(xn.abs());
        let scale_y = cfg.atol + cfg.rtol * y.abs().max(yn.abs());
        let mut err =
            ((ex / scale_x).powi(2) + (ey / scale_y).powi(2)).sqrt() / std::f64::consts::SQRT_2;
        // a non-finite state or error estimate must shrink the step, not
        // feed the controller NaN (f64::max would silently drop it)
        if !err.is_finite() || !xn.is_finite() || !yn.is_finite() {
            err = f64::INFINITY;
        }

        if err <= 1.0 {
            t += h;
            x = xn;
            y = yn;
            if x.hypot(y) > cfg.domain_bound {
                return Err(UnitMapError::LeftDomain {
                    bound: cfg.domain_bound,
                });
            }
            k[0] = k[6];
            err_prev = err.max(1e-10);
        }
        let fac = if err.is_finite() {
            0.9 * err.max(1e-10).powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0)
        } else {
            0.2
        };
        h *= fac.clamp(0.2, 5.0);
    }
    Ok((x, y))
}

/// The time-1 flow map.
pub fn numeric_unit_map(
    field: &CompiledField,
    p: (f64, f64),
    cfg: &IntegratorCfg,
) -> Result<(f64, f64), UnitMapError> {
    flow(field, p, 1.0, cfg)
}

// ---------------------------------------------------------------------------
// discrete orbits
// ---------------------------------------------------------------------------

/// Why an orbit stopped.
#[derive(Clone, Debug, PartialEq)]
pub enum Termination {
    ReachedFloor(f64),
    MaxIterations,
    LeftDomain,
    ConvergedToFixedPoint,
    IntegratorFailure(String),
}

impl Termination {
    pub fn label(&self) -> String {
        match self {
            Termination::ReachedFloor(f) => format!("reached-floor({f:e})"),
            Termination::MaxIterations => "max-iterations".into(),
            Termination::LeftDomain => "left-domain".into(),
            Termination::ConvergedToFixedPoint => "converged-to-fixed-point".into(),
            Termination::IntegratorFailure(e) => format!("integrator-failure: {e}"),
        }
    }
}

/// A discrete orbit of the unit-time map.
#[derive(Clone, Debug)]
pub struct Orbit {
    pub points: Vec<(f64, f64)>,
    pub termination: Termination,
    pub seed: (f64, f64),
    pub map_descriptor: String,
}

/// Orbit generation parameters.
#[derive(Clone, Copy, Debug)]
pub struct OrbitCfg {
    pub floor: f64,
    pub max_iter: usize,
    pub integrator: IntegratorCfg,
    /// Signed time span per iterate; -1 walks the flow backwards.
    pub time_span: f64,
}

impl Default for OrbitCfg {
    fn default() -> Self {
        OrbitCfg {
            floor: 1e-9,
            max_iter: 1_000_000,
            integrator: IntegratorCfg::default(),
            time_span: 1.0,
        }
    }
}

/// Iterate the unit-time map of `field` from `p0`.
pub fn iterate_orbit(
    field: &PlanarVectorField<f64>,
    p0: (f64, f64),
    cfg: &OrbitCfg,
) -> Result<Orbit, UnitMapError> {
    if p0.0 == 0.0 && p0.1 == 0.0 {
        return Err(UnitMapError::SeedAtOrigin);
    }
    let compiled = CompiledField::new(field);
    let mut points = vec![p0];
    let mut p = p0;
    let termination = loop {
        if points.len() > cfg.max_iter {
            break Termination::MaxIterations;
        }
        match flow(&compiled, p, cfg.time_span, &cfg.integrator) {
            Ok(q) => {
                let step = (q.0 - p.0).hypot(q.1 - p.1);
                let norm = q.0.hypot(q.1);
                points.push(q);
                if norm < cfg.floor {
                    break Termination::ReachedFloor(cfg.floor);
                }
                if step < cfg.integrator.atol * 100.0 {
                    break Termination::ConvergedToFixedPoint;
                }
                p = q;
            }
            Err(UnitMapError::LeftDomain { .. }) => break Termination::LeftDomain,
            Err(e) => break Termination::IntegratorFailure(e.to_string()),
        }
    };
    Ok(Orbit {
        points,
        termination,
        seed: p0,
        map_descriptor: "unit-time map (numeric)".into(),
    })
}

/// Orbit of the unit-time map restricted to an invariant curve.
///
/// The curve `y = s(x)` (or `x = s(y)` when `independent_is_y`) is assumed
/// invariant; each step starts exactly on the curve, advances by the flow
/// map, and keeps the independent coordinate. Re-anchoring to the curve
/// removes transverse error growth near blow-up saddles, so the sequence
/// follows the restricted dynamics down to the floor. The largest observed
/// off-curve residual is reported as a consistency diagnostic.
pub struct CurveOrbit {
    pub independent: Vec<f64>,
    pub points: Vec<(f64, f64)>,
    pub termination: Termination,
    pub max_residual: f64,
}

pub fn iterate_on_curve(
    field: &PlanarVectorField<f64>,
    curve: &dyn Fn(f64) -> f64,
    independent_is_y: bool,
    t0: f64,
    cfg: &OrbitCfg,
) -> Result<CurveOrbit, UnitMapError> {
    if t0 == 0.0 {
        return Err(UnitMapError::SeedAtOrigin);
    }
    let compiled = CompiledField::new(field);
    let assemble = |t: f64| -> (f64, f64) {
        let s = curve(t);
        if independent_is_y {
            (s, t)
        } else {
            (t, s)
        }
    };
    let mut t = t0;
    let mut independent = vec![t0];
    let mut points = vec![assemble(t0)];
    let mut max_residual = 0.0f64;
    let termination = loop {
        if independent.len() > cfg.max_iter {
            break Termination::MaxIterations;
        }
        let p = assemble(t);
        match flow(&compiled, p, cfg.time_span, &cfg.integrator) {
            Ok(q) => {
                let (tn, dep) = if independent_is_y { (q.1, q.0) } else { (q.0, q.1) };
                max_residual = max_residual.max((dep - curve(tn)).abs());
                if tn.abs() >= t.abs() || tn * t < 0.0 {
                    // walked away from the singularity: wrong direction or
                    // out of the asymptotic regime
                    break Termination::ConvergedToFixedPoint;
                }
                independent.push(tn);
                points.push(assemble(tn));
                if tn.abs() < cfg.floor {
                    break Termination::ReachedFloor(cfg.floor);
                }
                t = tn;
            }
            Err(UnitMapError::LeftDomain { .. }) => break Termination::LeftDomain,
            Err(e) => break Termination::IntegratorFailure(e.to_string()),
        }
    };
    Ok(CurveOrbit {
        independent,
        points,
        termination,
        max_residual,
    })
}

/// Pick the signed time span that makes the independent coordinate shrink
/// along the curve; used to walk orbits toward the singularity.
pub fn inward_time_span(
    field: &PlanarVectorField<f64>,
    curve: &dyn Fn(f64) -> f64,
    independent_is_y: bool,
    t0: f64,
) -> f64 {
    let p = if independent_is_y {
        (curve(t0), t0)
    } else {
        (t0, curve(t0))
    };
    let v = field.eval_f64(p.0, p.1);
    let dt = if independent_is_y { v.1 } else { v.0 };
    if t0 * dt < 0.0 {
        1.0
    } else {
        -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::NilpotentModel;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn picard_jet_of_linear_nilpotent_field_is_exact() {
        // x' = y, y' = 0: unit-time map (x + y, y)
        let f = PlanarVectorField::new(BiPoly::<BigRational>::y(6), BiPoly::zero(6)).unwrap();
        let res = picard_jet(&f, 6).unwrap();
        assert_eq!(res.jet.x.coeff(1, 0), r(1, 1));
        assert_eq!(res.jet.x.coeff(0, 1), r(1, 1));
        assert_eq!(res.jet.y.coeff(0, 1), r(1, 1));
        assert_eq!(res.jet.x.num_terms(), 2);
        assert_eq!(res.jet.y.num_terms(), 1);
    }

    #[test]
    fn lemma_case1_leading_coefficients() {
        // m < n+1: coefficient of x^m is a/2 in the x-component, a in the y-component
        for (a, m, b, n) in [(3i64, 2u32, 5i64, 3u32), (2, 3, -1, 3)] {
            let model = NilpotentModel::from_i64(a, m, b, n).unwrap();
            let res = picard_jet(&model.field(), m + 1).unwrap();
            assert_eq!(res.jet.x.coeff(m, 0), r(a, 2), "a/2 in x-component");
            assert_eq!(res.jet.y.coeff(m, 0), r(a, 1), "a in y-component");
        }
    }

    #[test]
    fn lemma_case3_trailing_coefficients() {
        // m > n+1: coefficient of y^(n+1) is b/((n+1)(n+2)) in the
        // x-component and b/(n+1) in the y-component, cross-checked against
        // direct numerical integration of the flow below.
        let model = NilpotentModel::from_i64(1, 4, 1, 1).unwrap();
        let res = picard_jet(&model.field(), 3).unwrap();
        assert_eq!(res.jet.x.coeff(0, 2), r(1, 6));
        assert_eq!(res.jet.y.coeff(0, 2), r(1, 2));
        // leading damping terms: (b/2) x^n y and b x^n y
        assert_eq!(res.jet.x.coeff(1, 1), r(1, 2));
        assert_eq!(res.jet.y.coeff(1, 1), r(1, 1));

        // numeric oracle: flow from (0, h); x(1) = h + c h^2 + O(h^3)
        let compiled = CompiledField::new(&model.field_f64());
        let h = 1e-4;
        let q = flow(&compiled, (0.0, h), 1.0, &IntegratorCfg::default()).unwrap();
        let x_coeff = (q.0 - h) / (h * h);
        assert!(
            (x_coeff - 1.0 / 6.0).abs() < 1e-3,
            "x-component y^2 coefficient should be near 1/6, got {x_coeff}"
        );
        let y_coeff = (q.1 - h) / (h * h);
        assert!(
            (y_coeff - 0.5).abs() < 1e-3,
            "y-component y^2 coefficient should be near 1/2, got {y_coeff}"
        );
    }

    #[test]
    fn picard_stabilization_by_degree() {
        // iterate k+1 agrees with iterate k on all terms of degree <= k
        let model = NilpotentModel::from_i64(1, 2, -1, 1).unwrap();
        let res = picard_jet(&model.field(), 6).unwrap();
        for k in 1..res.iterates.len() - 1 {
            let (xa, ya) = &res.iterates[k];
            let (xb, yb) = &res.iterates[k + 1];
            for deg in 0..=(k as u32).min(6) {
                for i in 0..=deg {
                    let j = deg - i;
                    assert_eq!(xa.coeff(i, j), xb.coeff(i, j), "x term {i},{j} at iterate {k}");
                    assert_eq!(ya.coeff(i, j), yb.coeff(i, j), "y term {i},{j} at iterate {k}");
                }
            }
        }
    }

    #[test]
    fn multiplier_correspondence() {
        // invariants of exp(A) match exponentials of the eigenvalues of A
        for a in [
            [0.3, 1.2, 0.4, -0.7],
            [0.0, 1.0, -1.0, 0.0],
            [0.5, 0.0, 0.0, -0.25],
            [-0.2, 0.9, 0.3, 0.1],
        ] {
            let e = mat_exp2(a);
            let tr_a = a[0] + a[3];
            let det_a = a[0] * a[3] - a[1] * a[2];
            let disc = tr_a * tr_a - 4.0 * det_a;
            let det_e = e[0] * e[3] - e[1] * e[2];
            let tr_e = e[0] + e[3];
            assert!((det_e - tr_a.exp()).abs() < 1e-12 * tr_a.exp().max(1.0));
            if disc >= 0.0 {
                let l1 = 0.5 * (tr_a + disc.sqrt());
                let l2 = 0.5 * (tr_a - disc.sqrt());
                assert!((tr_e - (l1.exp() + l2.exp())).abs() < 1e-12 * tr_e.abs().max(1.0));
            } else {
                let re = 0.5 * tr_a;
                let im = 0.5 * (-disc).sqrt();
                let expected = 2.0 * re.exp() * im.cos();
                assert!((tr_e - expected).abs() < 1e-12 * tr_e.abs().max(1.0));
            }
        }
    }

    #[test]
    fn lie_jet_reproduces_exact_picard() {
        let model = NilpotentModel::from_i64(1, 2, 1, 1).unwrap();
        let exact = picard_jet(&model.field(), 5).unwrap();
        let float = lie_jet(&model.field_f64(), 5).unwrap();
        for (i, j, c) in exact.jet.x.terms() {
            assert!((c.to_f64() - float.x.coeff(i, j)).abs() < 1e-12, "x {i},{j}");
        }
        for (i, j, c) in exact.jet.y.terms() {
            assert!((c.to_f64() - float.y.coeff(i, j)).abs() < 1e-12, "y {i},{j}");
        }
    }

    #[test]
    fn fixed_point_and_linear_flow() {
        let model = NilpotentModel::from_i64(1, 2, 1, 1).unwrap();
        let compiled = CompiledField::new(&model.field_f64());
        let origin = numeric_unit_map(&compiled, (0.0, 0.0), &IntegratorCfg::default()).unwrap();
        assert_eq!(origin, (0.0, 0.0));

        // x' = -x, y' = -y from (1, 1) reaches (1/e, 1/e)
        let lin = PlanarVectorField::new(BiPoly::<f64>::x(4).neg(), BiPoly::<f64>::y(4).neg())
            .unwrap();
        let c = CompiledField::new(&lin);
        let img = numeric_unit_map(&c, (1.0, 1.0), &IntegratorCfg::default()).unwrap();
        let e1 = (-1.0f64).exp();
        assert!((img.0 - e1).abs() < 1e-10 && (img.1 - e1).abs() < 1e-10);
    }

    #[test]
    fn semigroup_property() {
        let model = NilpotentModel::from_i64(1, 2, -1, 1).unwrap();
        let compiled = CompiledField::new(&model.field_f64());
        let cfg = IntegratorCfg::default();
        let p = (0.3, -0.2);
        let one = flow(&compiled, p, 1.0, &cfg).unwrap();
        let two_steps = flow(&compiled, one, 1.0, &cfg).unwrap();
        let two = flow(&compiled, p, 2.0, &cfg).unwrap();
        let err = (two_steps.0 - two.0).hypot(two_steps.1 - two.1);
        assert!(err < 10.0 * (cfg.atol + cfg.rtol), "semigroup error {err}");
    }

    #[test]
    fn jet_matches_integrator_with_order_scaling() {
        // |phi_1(p) - jet(p)| = O(|p|^(order+1)): halving |p| divides the
        // error by at least 2^(order+1) * 0.8
        let model = NilpotentModel::from_i64(1, 2, 1, 2).unwrap();
        let order = 4;
        let jet = picard_jet(&model.field(), order).unwrap().jet.to_f64();
        let compiled = CompiledField::new(&model.field_f64());
        let cfg = IntegratorCfg::default();
        let err_at = |scale: f64| -> f64 {
            let p = (0.11 * scale, 0.07 * scale);
            let num = flow(&compiled, p, 1.0, &cfg).unwrap();
            let sym = jet.eval(p);
            (num.0 - sym.0).hypot(num.1 - sym.1)
        };
        let e1 = err_at(1.0);
        let e2 = err_at(0.5);
        let ratio = e1 / e2.max(1e-300);
        let expected = 2f64.powi(order as i32 + 1);
        assert!(ratio >= expected * 0.8, "error ratio {ratio} below {expected}");
    }

    #[test]
    fn orbit_of_linear_contraction() {
        let lin = PlanarVectorField::new(BiPoly::<f64>::x(4).neg(), BiPoly::<f64>::y(4).neg())
            .unwrap();
        let cfg = OrbitCfg {
            floor: 1e-6,
            max_iter: 100,
            ..Default::default()
        };
        let orbit = iterate_orbit(&lin, (1.0, 0.0), &cfg).unwrap();
        assert_eq!(orbit.termination, Termination::ReachedFloor(1e-6));
        for (k, pt) in orbit.points.iter().enumerate().take(10) {
            assert!((pt.0 - (-(k as f64)).exp()).abs() < 1e-8);
            assert!(pt.1.abs() < 1e-12);
        }
    }

    #[test]
    fn orbit_seed_at_origin_rejected() {
        let model = NilpotentModel::from_i64(1, 2, 1, 1).unwrap();
        let err = iterate_orbit(&model.field_f64(), (0.0, 0.0), &OrbitCfg::default());
        assert!(matches!(err, Err(UnitMapError::SeedAtOrigin)));
    }

    #[test]
    fn cusp_curve_increments_scale_like_three_halves() {
        // on the cusp separatrix the x-increments satisfy dx ~ x^(3/2)
        let model = NilpotentModel::from_i64(1, 2, 1, 1).unwrap();
        let field = model.field_f64();
        let c0 = (2.0f64 / 3.0).sqrt();
        let curve = move |x: f64| -c0 * x.powf(1.5);
        let dir = inward_time_span(&field, &curve, false, 0.5);
        let cfg = OrbitCfg {
            floor: 1e-7,
            max_iter: 4000,
            time_span: dir,
            ..Default::default()
        };
        let orbit = iterate_on_curve(&field, &curve, false, 0.5, &cfg).unwrap();
        assert!(orbit.independent.len() > 200, "need a real orbit");
        let xs = &orbit.independent;
        let mut sum = (0.0, 0.0, 0.0, 0.0, 0usize);
        for w in xs.windows(2) {
            let (x, xn) = (w[0], w[1]);
            if x > 0.05 || x < 1e-6 {
                continue;
            }
            let lx = x.ln();
            let ld = (x - xn).ln();
            sum = (sum.0 + lx, sum.1 + ld, sum.2 + lx * lx, sum.3 + lx * ld, sum.4 + 1);
        }
        let n = sum.4 as f64;
        let slope = (n * sum.3 - sum.0 * sum.1) / (n * sum.2 - sum.0 * sum.0);
        assert!((slope - 1.5).abs() < 0.05, "slope {slope}");
    }
}
