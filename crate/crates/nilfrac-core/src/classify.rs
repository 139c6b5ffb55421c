//! Topological classification of nilpotent singularities.
//!
//! For a field `x' = y + A(x,y), y' = B(x,y)` with nilpotent linear part,
//! the type at the origin is decided from the first nonzero coefficients of
//! `F(x) = B(x, f(x))` and `G(x) = (A_x + B_y)(x, f(x))`, where `y = f(x)`
//! solves `y + A(x, y) = 0` near the origin.

use crate::coeff::Coeff;
use crate::error::ClassifyError;
use crate::poly::{BiPoly, PlanarVectorField};
use num_traits::Signed;

/// Truncated univariate power series with integer exponents.
#[derive(Clone, Debug, PartialEq)]
pub struct UniSeries<C: Coeff> {
    coeffs: Vec<C>,
}

impl<C: Coeff> UniSeries<C> {
    pub fn zero(trunc: u32) -> Self {
        UniSeries {
            coeffs: vec![C::zero(); trunc as usize + 1],
        }
    }

    pub fn trunc(&self) -> u32 {
        self.coeffs.len() as u32 - 1
    }

    pub fn coeff(&self, k: usize) -> C {
        self.coeffs.get(k).cloned().unwrap_or_else(C::zero)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn set(&mut self, k: usize, c: C) {
        if k < self.coeffs.len() {
            self.coeffs[k] = c;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn first_nonzero(&self) -> Option<(usize, C)> {
        self.coeffs
            .iter()
            .enumerate()
            .find(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k, c.clone()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.coeffs.len();
        let mut out: UniSeries<C> = UniSeries::zero(n as u32 - 1);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                if b.is_zero() {
                    continue;
                }
                out.coeffs[i + j] = out.coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in other.coeffs.iter().enumerate() {
            if k < out.coeffs.len() {
                out.coeffs[k] = out.coeffs[k].clone() + c.clone();
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        UniSeries {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

/// Substitute a univariate series for `y` in a bivariate polynomial:
/// `p(x, f(x))` truncated at the series length.
pub fn substitute_series<C: Coeff>(p: &BiPoly<C>, f: &UniSeries<C>) -> UniSeries<C> {
    let trunc = f.trunc();
    let mut out: UniSeries<C> = UniSeries::zero(trunc);
    let max_j = p.terms().map(|(_, j, _)| j).max().unwrap_or(0);
    // powers of f
    let mut powers: Vec<UniSeries<C>> = Vec::with_capacity(max_j as usize + 1);
    let mut one = UniSeries::zero(trunc);
    one.set(0, C::one());
    powers.push(one);
    for k in 1..=max_j as usize {
        powers.push(powers[k - 1].mul(f));
    }
    for (i, j, c) in p.terms() {
        let fj = &powers[j as usize];
        for (k, fc) in fj.coeffs.iter().enumerate() {
            let deg = i as usize + k;
            if deg > trunc as usize || fc.is_zero() {
                continue;
            }
            out.coeffs[deg] = out.coeffs[deg].clone() + c.clone() * fc.clone();
        }
    }
    out
}

/// Solve `y + A(x, y) = 0` for `y = f(x)` by fixed-point iteration,
/// where the x-component of the field is `y + A`.
pub fn solve_implicit_f<C: Coeff>(
    field: &PlanarVectorField<C>,
    order: u32,
) -> Result<UniSeries<C>, ClassifyError> {
    let a_part = extract_a(field)?;
    let mut f = UniSeries::zero(order);
    // each pass pins at least one more order; A has order >= 2
    for _ in 0..=order {
        let next = substitute_series(&a_part, &f).neg();
        if next == f {
            break;
        }
        f = next;
    }
    Ok(f)
}

fn extract_a<C: Coeff>(field: &PlanarVectorField<C>) -> Result<BiPoly<C>, ClassifyError> {
    let p = &field.p;
    if !p.coeff(0, 0).is_zero()
        || !(p.coeff(0, 1) == C::one())
        || !p.coeff(1, 0).is_zero()
    {
        return Err(ClassifyError::NotNormalShape);
    }
    let y = BiPoly::y(p.trunc_degree());
    Ok(p.sub(&y).expect("same truncation"))
}

/// Topological type at the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SingularityKind {
    Saddle,
    CenterOrFocus,
    Cusp,
    SaddleNode,
    EllipticHyperbolic,
    Node(NodeStability),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeStability {
    Attracting,
    Repelling,
}

impl SingularityKind {
    pub fn label(&self) -> &'static str {
        match self {
            SingularityKind::Saddle => "saddle",
            SingularityKind::CenterOrFocus => "center-or-focus",
            SingularityKind::Cusp => "cusp",
            SingularityKind::SaddleNode => "saddle-node",
            SingularityKind::EllipticHyperbolic => "elliptic-hyperbolic",
            SingularityKind::Node(NodeStability::Attracting) => "node-attracting",
            SingularityKind::Node(NodeStability::Repelling) => "node-repelling",
        }
    }
}

/// Classification output: the type plus the series data it was decided on.
#[derive(Clone, Debug)]
pub struct ClassificationReport<C: Coeff> {
    pub kind: SingularityKind,
    pub m: u32,
    pub a: C,
    pub n: Option<u32>,
    pub b: Option<C>,
    pub monodromic: bool,
    pub f_series: UniSeries<C>,
    pub f_big: UniSeries<C>,
    pub g_big: UniSeries<C>,
}

/// Decide the type of a nilpotent singularity at the origin.
pub fn classify_nilpotent<C: Coeff + SignedCoeff>(
    field: &PlanarVectorField<C>,
) -> Result<ClassificationReport<C>, ClassifyError> {
    if !field.is_singular_origin() {
        return Err(ClassifyError::NotSingular);
    }
    let [px, py, qx, qy] = field.jacobian_origin();
    if !(px.is_zero() && py == C::one() && qx.is_zero() && qy.is_zero()) {
        // the shape check below reports a more specific error for bad P
        if !(px.is_zero() && py == C::one()) {
            return Err(ClassifyError::NotNormalShape);
        }
        return Err(ClassifyError::NotNilpotent);
    }

    let order = field.trunc_degree();
    let a_part = extract_a(field)?;
    let f = solve_implicit_f(field, order)?;
    let b_poly = &field.q;
    let f_big = substitute_series(b_poly, &f);
    let trace = a_part.dx().add(&b_poly.dy()).expect("same truncation");
    let g_big = substitute_series(&trace, &f);

    let (m, a) = f_big
        .first_nonzero()
        .ok_or(ClassifyError::UndecidableJet(order))?;
    let m = m as u32;
    let a_pos = a.is_positive_coeff();

    let kind = match g_big.first_nonzero() {
        None => {
            // G == 0: decided by the parity of m and the sign of a
            if m % 2 == 0 {
                SingularityKind::Cusp
            } else if a_pos {
                SingularityKind::Saddle
            } else {
                SingularityKind::CenterOrFocus
            }
        }
        Some((n, b)) => {
            let n = n as u32;
            let report_kind = decide_case4(m, a_pos, &a, n, &b);
            return Ok(ClassificationReport {
                monodromic: report_kind == SingularityKind::CenterOrFocus,
                kind: report_kind,
                m,
                a,
                n: Some(n),
                b: Some(b),
                f_series: f,
                f_big,
                g_big,
            });
        }
    };

    Ok(ClassificationReport {
        monodromic: kind == SingularityKind::CenterOrFocus,
        kind,
        m,
        a,
        n: None,
        b: None,
        f_series: f,
        f_big,
        g_big,
    })
}

fn decide_case4<C: Coeff + SignedCoeff>(
    m: u32,
    a_pos: bool,
    a: &C,
    n: u32,
    b: &C,
) -> SingularityKind {
    if m % 2 == 0 {
        return if m < 2 * n + 1 {
            SingularityKind::Cusp
        } else {
            SingularityKind::SaddleNode
        };
    }
    if a_pos {
        return SingularityKind::Saddle;
    }
    // m odd, a < 0
    let disc_nonneg = {
        // b^2 + 4 a (n+1) >= 0
        let disc = b.clone() * b.clone()
            + C::from_i64(4) * a.clone() * C::from_i64(n as i64 + 1);
        !disc.is_negative_coeff()
    };
    if m < 2 * n + 1 || (m == 2 * n + 1 && !disc_nonneg) {
        return SingularityKind::CenterOrFocus;
    }
    if n % 2 == 1 {
        SingularityKind::EllipticHyperbolic
    } else if b.is_negative_coeff() {
        SingularityKind::Node(NodeStability::Attracting)
    } else {
        SingularityKind::Node(NodeStability::Repelling)
    }
}

/// Sign queries used by the case table.
pub trait SignedCoeff {
    fn is_positive_coeff(&self) -> bool;
    fn is_negative_coeff(&self) -> bool;
}

impl SignedCoeff for num_rational::BigRational {
    fn is_positive_coeff(&self) -> bool {
        self.is_positive()
    }
    fn is_negative_coeff(&self) -> bool {
        self.is_negative()
    }
}

impl SignedCoeff for f64 {
    fn is_positive_coeff(&self) -> bool {
        *self > 0.0
    }
    fn is_negative_coeff(&self) -> bool {
        *self < 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::NilpotentModel;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn field_y_plus(
        a_terms: Vec<(u32, u32, i64)>,
        b_terms: Vec<(u32, u32, i64)>,
        trunc: u32,
    ) -> PlanarVectorField<BigRational> {
        let mut p = BiPoly::y(trunc);
        for (i, j, c) in a_terms {
            p.add_term(i, j, r(c));
        }
        let q = BiPoly::from_terms(b_terms.into_iter().map(|(i, j, c)| (i, j, r(c))), trunc);
        PlanarVectorField::new(p, q).unwrap()
    }

    #[test]
    fn implicit_solution_examples() {
        // A == 0 -> f = 0
        let f0 = solve_implicit_f(&field_y_plus(vec![], vec![(2, 0, 1)], 8), 8).unwrap();
        assert!(f0.is_zero());

        // A = x^2 -> f = -x^2
        let f1 = solve_implicit_f(&field_y_plus(vec![(2, 0, 1)], vec![(2, 0, 1)], 8), 8).unwrap();
        assert_eq!(f1.coeff(2), r(-1));
        assert_eq!(f1.first_nonzero().unwrap().0, 2);

        // A = x y -> f = 0 since y (1 + x) = 0 near the origin
        let f2 = solve_implicit_f(&field_y_plus(vec![(1, 1, 1)], vec![(2, 0, 1)], 8), 8).unwrap();
        assert!(f2.is_zero());
    }

    #[test]
    fn implicit_solution_matches_fixed_point_oracle_to_order_8() {
        // A = x^2 + x y + y^2: iterate g <- -(x^2 + x g + g^2) numerically
        let field = field_y_plus(vec![(2, 0, 1), (1, 1, 1), (0, 2, 1)], vec![(3, 0, 1)], 8);
        let f = solve_implicit_f(&field, 8).unwrap();
        // float fixed-point oracle on a small grid
        for &x in &[0.005f64, 0.01, 0.02] {
            let mut g = 0.0f64;
            for _ in 0..60 {
                g = -(x * x + x * g + g * g);
            }
            let mut fx = 0.0;
            for (k, c) in f.coeffs().iter().enumerate() {
                fx += c.to_f64() * x.powi(k as i32);
            }
            assert!((fx - g).abs() < 1e-12, "x={x}: {fx} vs {g}");
        }
    }

    fn classify_model(a: i64, m: u32, b: i64, n: u32) -> SingularityKind {
        let model = NilpotentModel::from_i64(a, m, b, n).unwrap();
        classify_nilpotent(&model.field()).unwrap().kind
    }

    #[test]
    fn worked_example_types() {
        assert_eq!(classify_model(1, 2, 1, 1), SingularityKind::Cusp);
        assert_eq!(classify_model(1, 3, -1, 2), SingularityKind::Saddle);
        assert_eq!(
            classify_model(-1, 5, -4, 2),
            SingularityKind::Node(NodeStability::Attracting)
        );
        assert_eq!(classify_model(-1, 3, 3, 1), SingularityKind::EllipticHyperbolic);
        assert_eq!(classify_model(1, 4, 1, 1), SingularityKind::SaddleNode);
    }

    #[test]
    fn damping_free_cases() {
        // G == 0: saddle / center-or-focus / cusp decided by m and a alone
        let sad = field_y_plus(vec![], vec![(3, 0, 1)], 8);
        assert_eq!(classify_nilpotent(&sad).unwrap().kind, SingularityKind::Saddle);
        let cf = field_y_plus(vec![], vec![(3, 0, -1)], 8);
        let rep = classify_nilpotent(&cf).unwrap();
        assert_eq!(rep.kind, SingularityKind::CenterOrFocus);
        assert!(rep.monodromic);
        let cusp = field_y_plus(vec![], vec![(2, 0, -5)], 8);
        assert_eq!(classify_nilpotent(&cusp).unwrap().kind, SingularityKind::Cusp);
    }

    /// Direct transcription of the case table, used as an independent oracle.
    fn table_oracle(m: u32, a: i64, n: u32, b: i64) -> SingularityKind {
        let disc = b * b + 4 * a * (n as i64 + 1);
        if m % 2 == 0 {
            if m < 2 * n + 1 {
                SingularityKind::Cusp
            } else {
                SingularityKind::SaddleNode
            }
        } else if a > 0 {
            SingularityKind::Saddle
        } else if m < 2 * n + 1 || (m == 2 * n + 1 && disc < 0) {
            SingularityKind::CenterOrFocus
        } else if n % 2 == 1 {
            SingularityKind::EllipticHyperbolic
        } else if b < 0 {
            SingularityKind::Node(NodeStability::Attracting)
        } else {
            SingularityKind::Node(NodeStability::Repelling)
        }
    }

    #[test]
    fn case_table_matches_oracle() {
        for m in 2..=7u32 {
            for n in 1..=3u32 {
                for &a in &[1i64, -1, 2, -3] {
                    for &b in &[1i64, -1, 4, -4, 6, -6] {
                        let got = classify_model(a, m, b, n);
                        let want = table_oracle(m, a, n, b);
                        assert_eq!(got, want, "m={m} n={n} a={a} b={b}");
                    }
                }
            }
        }
    }

    #[test]
    fn boundary_discriminant_zero() {
        // b^2 + 4 a (n+1) = 0 classified with the nonnegative branch
        assert_eq!(
            classify_model(-1, 7, 4, 3),
            SingularityKind::EllipticHyperbolic
        );
        assert_eq!(
            classify_model(-3, 5, -6, 2),
            SingularityKind::Node(NodeStability::Attracting)
        );
    }

    #[test]
    fn scaling_invariance_of_kind() {
        // (x, y) -> (lambda x, lambda y) preserves the classification
        for &(a, m, b, n) in &[(1i64, 2u32, 1i64, 1u32), (1, 3, -1, 2), (-1, 5, -4, 2), (1, 4, 1, 1)] {
            let base = classify_model(a, m, b, n);
            let field = NilpotentModel::from_i64(a, m, b, n).unwrap().field();
            for lam in [r(2), BigRational::new(BigInt::from(1), BigInt::from(3)), r(10)] {
                let scaled = scale_field(&field, &lam);
                assert_eq!(classify_nilpotent(&scaled).unwrap().kind, base);
            }
        }
    }

    fn scale_field(
        f: &PlanarVectorField<BigRational>,
        lam: &BigRational,
    ) -> PlanarVectorField<BigRational> {
        // X'(x,y) = S^{-1} X(Sx): component c x^i y^j -> c lam^{i+j-1} x^i y^j
        let scale_poly = |p: &BiPoly<BigRational>| {
            let mut out = BiPoly::zero(p.trunc_degree());
            for (i, j, c) in p.terms() {
                let mut factor = BigRational::from_integer(BigInt::from(1));
                for _ in 0..(i + j) {
                    factor *= lam;
                }
                out.add_term(i, j, c.clone() * factor / lam);
            }
            out
        };
        PlanarVectorField::new(scale_poly(&f.p), scale_poly(&f.q)).unwrap()
    }

    #[test]
    fn error_paths() {
        // linear part not nilpotent
        let mut p = BiPoly::y(6);
        p.add_term(1, 0, r(1));
        let q = BiPoly::monomial(2, 0, r(1), 6);
        let f = PlanarVectorField::new(p, q).unwrap();
        assert!(classify_nilpotent(&f).is_err());

        // F identically zero at this jet
        let f2 = field_y_plus(vec![], vec![], 6);
        assert_eq!(
            classify_nilpotent(&f2).unwrap_err(),
            ClassifyError::UndecidableJet(6)
        );

        // not of the form y + higher order
        let p3 = BiPoly::monomial(0, 1, r(2), 6);
        let f3 = PlanarVectorField::new(p3, BiPoly::monomial(2, 0, r(1), 6)).unwrap();
        assert_eq!(
            classify_nilpotent(&f3).unwrap_err(),
            ClassifyError::NotNormalShape
        );
    }
}
