//! File formats: the JSON vector-field format, orbit CSV, and JSON
//! rendering of reports.
//!
//! A field file looks like
//!
//! ```json
//! {"P": [[0, 1, "1"]], "Q": [[2, 0, "1"], [1, 1, "-1"]], "trunc": 12}
//! ```
//!
//! with monomials as `[i, j, coefficient]` triples and coefficients as
//! rational strings (`"num/den"` or `"num"`).

use crate::classify::ClassificationReport;
use crate::coeff::{big_rational_string, parse_big_rational, quad_string, Coeff};
use crate::blowup::SeparatrixBranch;
use crate::boxdim::DimensionEstimate;
use crate::error::DriverError;
use crate::poly::{BiPoly, PlanarVectorField, DEFAULT_TRUNC};
use crate::unitmap::Orbit;
use num_rational::BigRational;
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Deserialize)]
struct FieldFileRaw {
    #[serde(rename = "P")]
    p: Vec<(u32, u32, String)>,
    #[serde(rename = "Q")]
    q: Vec<(u32, u32, String)>,
    trunc: Option<u32>,
}

/// Parse the JSON vector-field format.
pub fn field_from_json(text: &str) -> Result<PlanarVectorField<BigRational>, DriverError> {
    let raw: FieldFileRaw =
        serde_json::from_str(text).map_err(|e| DriverError::Parse(e.to_string()))?;
    let trunc = raw.trunc.unwrap_or(DEFAULT_TRUNC);
    let build = |terms: Vec<(u32, u32, String)>| -> Result<BiPoly<BigRational>, DriverError> {
        let mut poly = BiPoly::zero(trunc);
        for (i, j, c) in terms {
            let coeff = parse_big_rational(&c)
                .ok_or_else(|| DriverError::Parse(format!("bad coefficient `{c}`")))?;
            if i + j > trunc {
                return Err(DriverError::Parse(format!(
                    "term x^{i} y^{j} exceeds truncation degree {trunc}"
                )));
            }
            poly.add_term(i, j, coeff);
        }
        Ok(poly)
    };
    let p = build(raw.p)?;
    let q = build(raw.q)?;
    PlanarVectorField::new(p, q).map_err(|e| DriverError::Parse(e.to_string()))
}

/// Serialize a field into the JSON vector-field format.
pub fn field_to_json(field: &PlanarVectorField<BigRational>) -> Value {
    let dump = |poly: &BiPoly<BigRational>| -> Vec<Value> {
        poly.terms()
            .map(|(i, j, c)| json!([i, j, big_rational_string(c)]))
            .collect()
    };
    json!({
        "P": dump(&field.p),
        "Q": dump(&field.q),
        "trunc": field.trunc_degree(),
    })
}

/// Orbit CSV: header `k,x,y`, one row per iterate.
pub fn orbit_to_csv(orbit: &Orbit) -> String {
    let mut out = String::from("k,x,y\n");
    for (k, (x, y)) in orbit.points.iter().enumerate() {
        out.push_str(&format!("{k},{x:.17e},{y:.17e}\n"));
    }
    out
}

/// Read orbit points back from CSV (header row optional).
pub fn orbit_points_from_csv(text: &str) -> Result<Vec<(f64, f64)>, DriverError> {
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('k') || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 3 {
            return Err(DriverError::Parse(format!(
                "line {}: expected k,x,y",
                lineno + 1
            )));
        }
        let x: f64 = fields[1]
            .trim()
            .parse()
            .map_err(|_| DriverError::Parse(format!("line {}: bad x", lineno + 1)))?;
        let y: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|_| DriverError::Parse(format!("line {}: bad y", lineno + 1)))?;
        points.push((x, y));
    }
    if points.is_empty() {
        return Err(DriverError::Parse("no data rows".into()));
    }
    Ok(points)
}

pub fn classification_to_json(report: &ClassificationReport<BigRational>) -> Value {
    json!({
        "kind": report.kind.label(),
        "monodromic": report.monodromic,
        "m": report.m,
        "a": big_rational_string(&report.a),
        "n": report.n,
        "b": report.b.as_ref().map(big_rational_string),
        "f_series": report.f_series.coeffs().iter().map(big_rational_string).collect::<Vec<_>>(),
        "F_series": report.f_big.coeffs().iter().map(big_rational_string).collect::<Vec<_>>(),
        "G_series": report.g_big.coeffs().iter().map(big_rational_string).collect::<Vec<_>>(),
    })
}

pub fn branch_to_json(branch: &SeparatrixBranch) -> Value {
    let series = &branch.series;
    let exponents: Vec<String> = (0..series.coeffs().len())
        .map(|k| {
            let e = series.gamma() + series.step() * crate::coeff::rat(k as i64, 1);
            e.to_string()
        })
        .collect();
    json!({
        "gamma": series.gamma().to_string(),
        "step": series.step().to_string(),
        "stability": format!("{:?}", branch.stability).to_lowercase(),
        "case": format!("{:?}", branch.case),
        "exponents": exponents,
        "coefficients": series.coeffs().iter().map(quad_string).collect::<Vec<_>>(),
        "coefficients_f64": series.coeffs().iter().map(|c| c.to_f64()).collect::<Vec<_>>(),
        "resonant_orders": branch.resonant_orders,
        "residual_order": branch.residual_order.to_string(),
    })
}

pub fn estimate_to_json(est: &DimensionEstimate) -> Value {
    let fit = est.fit.map(|f| {
        json!({
            "epsilon_range": [f.epsilon_range.0, f.epsilon_range.1],
            "n_scales": f.n_scales,
            "slope_stderr": f.slope_stderr,
            "r_squared": f.r_squared,
        })
    });
    json!({
        "value": est.value,
        "method": est.method.label(),
        "fit": fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unitmap::Termination;

    #[test]
    fn field_json_roundtrip() {
        let text = r#"{"P": [[0,1,"1"]], "Q": [[2,0,"1"],[1,1,"-7/3"]], "trunc": 10}"#;
        let field = field_from_json(text).unwrap();
        assert_eq!(field.trunc_degree(), 10);
        assert_eq!(
            field.q.coeff(1, 1),
            parse_big_rational("-7/3").unwrap()
        );
        let back = field_to_json(&field).to_string();
        let again = field_from_json(&back).unwrap();
        assert_eq!(field, again);
    }

    #[test]
    fn field_json_errors() {
        assert!(field_from_json("{").is_err());
        assert!(field_from_json(r#"{"P": [[0,1,"x"]], "Q": []}"#).is_err());
        assert!(field_from_json(r#"{"P": [[9,9,"1"]], "Q": [], "trunc": 4}"#).is_err());
    }

    #[test]
    fn orbit_csv_roundtrip() {
        let orbit = Orbit {
            points: vec![(0.5, -0.25), (0.25, -0.1)],
            termination: Termination::MaxIterations,
            seed: (0.5, -0.25),
            map_descriptor: "test".into(),
        };
        let csv = orbit_to_csv(&orbit);
        let pts = orbit_points_from_csv(&csv).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0], (0.5, -0.25));
        assert!(orbit_points_from_csv("k,x,y\n").is_err());
    }
}
