//! Preset library and the cross-checking verification driver.
//!
//! Each preset bundles a system, its expected quantities with provenance
//! notes, and the recipe for generating the measured orbit. `run_verify`
//! reproduces every quantity numerically and reports one row per check.
//!
//! One recorded reference value is knowingly inconsistent: the reported
//! planar dimension 3/5 for the saddle-node example corresponds to a
//! separatrix exponent gamma = 5/2, but the system `x' = y, y' = x^4 + xy`
//! has branches with gamma = 2 and gamma = 3 only (Newton-polygon
//! enumeration; see the separatrix module), so orbit dimensions 1/2 and
//! 2/3 are the attainable values. The rows comparing against 3/5 fail by
//! construction and are kept to document the discrepancy; the rows against
//! the closed form at the measured branch pass.

use crate::blowup::{separatrix_leading, separatrix_series, BranchLead};
use crate::boxdim::{
    dim_theorem_box, estimate_dim_boxcount, estimate_dim_sausage, estimate_increment_exponent,
    EstimatorCfg, IncrementCfg, PointCloud,
};
use crate::classify::{classify_nilpotent, SingularityKind};
use crate::coeff::{rat_to_f64, Rat};
use crate::error::DriverError;
use crate::infinity::{verify_dim_infinity, Chart};
use crate::model::NilpotentModel;
use crate::par::map_ordered;
use crate::poly::{BiPoly, PlanarVectorField};
use crate::saddledual::{dual_box_dimension, verify_saddle_infinity};
use crate::unitmap::{inward_time_span, iterate_on_curve, iterate_orbit, OrbitCfg};
use serde_json::{json, Value};

/// Default tolerance for dimension estimates against reference values.
pub const DIM_TOL: f64 = 0.05;
/// Tolerance for increment-exponent regressions against the branch exponent.
pub const ALPHA_TOL: f64 = 0.02;

/// A single expected quantity with its provenance.
#[derive(Clone, Debug)]
pub struct ExpectedValue {
    pub quantity: String,
    pub value: f64,
    /// `None` marks an annotation that is recorded but never estimated.
    pub tol: Option<f64>,
    pub source: String,
}

/// What a preset verifies.
#[derive(Clone, Debug)]
pub enum PresetKind {
    /// Nilpotent model at the origin, measured on one separatrix branch.
    Local {
        model: NilpotentModel,
        expected_kind: SingularityKind,
        branch_index: usize,
        x0: f64,
        /// Series terms kept for the branch; asymptotic (divergent)
        /// branches need few terms and a small seed.
        series_terms: usize,
    },
    /// Chart at infinity of the nilpotent model.
    Infinity { m: u32, n: u32, chart: Chart },
    /// Saddle family chart at infinity.
    Dual { k: u32, estimate: bool },
    /// Linear hyperbolic field; all estimates must be trivial.
    Hyperbolic { saddle: bool },
    /// Unfolding curve sample: saddle-node style center-manifold orbit.
    UnfoldingCurve {
        beta1: f64,
        beta2: f64,
        degenerate: bool,
    },
}

#[derive(Clone, Debug)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub kind: PresetKind,
    pub expected: Vec<ExpectedValue>,
}

fn ev(quantity: &str, value: f64, tol: Option<f64>, source: &str) -> ExpectedValue {
    ExpectedValue {
        quantity: quantity.into(),
        value,
        tol,
        source: source.into(),
    }
}

/// The full preset library.
pub fn preset_library() -> Vec<Preset> {
    let mut out = Vec::new();

    out.push(Preset {
        name: "cusp-bt",
        description: "x' = y, y' = x^2 - x y (cusp at the origin)",
        kind: PresetKind::Local {
            model: NilpotentModel::from_i64(1, 2, -1, 1).unwrap(),
            expected_kind: SingularityKind::Cusp,
            branch_index: 1,
            x0: 0.5,
            series_terms: 8,
        },
        expected: vec![
            ev("gamma", 1.5, Some(1e-12), "separatrix exponent (m+1)/2"),
            ev("alpha", 1.5, Some(ALPHA_TOL), "x-increment exponent equals gamma"),
            ev("dim-boxcount", 1.0 / 3.0, Some(DIM_TOL), "reported orbit value 1/3 = 1 - 1/gamma"),
            ev("dim-sausage", 1.0 / 3.0, Some(DIM_TOL), "reported orbit value 1/3 = 1 - 1/gamma"),
            ev("dim-x", 1.0 / 3.0, None, "projection value 1 - 1/gamma"),
            ev("dim-y", 0.25, None, "projection value 1 - gamma/m"),
        ],
    });

    out.push(Preset {
        name: "nilpotent-saddle",
        description: "x' = y, y' = x^3 - x^2 y (nilpotent saddle)",
        kind: PresetKind::Local {
            model: NilpotentModel::from_i64(1, 3, -1, 2).unwrap(),
            expected_kind: SingularityKind::Saddle,
            branch_index: 1,
            x0: 0.5,
            series_terms: 8,
        },
        expected: vec![
            ev("gamma", 2.0, Some(1e-12), "separatrix exponent (m+1)/2"),
            ev("alpha", 2.0, Some(ALPHA_TOL), "x-increment exponent equals gamma"),
            ev("dim-boxcount", 0.5, Some(DIM_TOL), "reported orbit value 1/2 = 1 - 1/gamma"),
            ev("dim-sausage", 0.5, Some(DIM_TOL), "reported orbit value 1/2 = 1 - 1/gamma"),
            ev("dim-x", 0.5, None, "projection value 1 - 1/gamma"),
            ev("dim-y", 1.0 / 3.0, None, "projection value 1 - gamma/m"),
        ],
    });

    out.push(Preset {
        name: "saddle-node",
        description: "x' = y, y' = x^4 + x y (nilpotent saddle-node)",
        kind: PresetKind::Local {
            model: NilpotentModel::from_i64(1, 4, 1, 1).unwrap(),
            expected_kind: SingularityKind::SaddleNode,
            // measured on the attracting center branch y = -x^3 + 3x^4 - ...
            // whose expansion is asymptotic: few terms, small seed
            branch_index: 1,
            x0: 0.06,
            series_terms: 4,
        },
        expected: vec![
            ev("gamma", 3.0, Some(1e-12), "center-branch exponent m - n"),
            ev("alpha", 3.0, Some(ALPHA_TOL), "x-increment exponent equals gamma"),
            ev(
                "dim-boxcount",
                0.6,
                Some(DIM_TOL),
                "reported value 3/5; derived from gamma = 5/2, which is not a branch \
                 exponent of this system (branches: 2 and 3) - expected to fail",
            ),
            ev(
                "dim-sausage",
                0.6,
                Some(DIM_TOL),
                "reported value 3/5; see dim-boxcount - expected to fail",
            ),
            ev(
                "dim-boxcount-formula",
                2.0 / 3.0,
                Some(DIM_TOL),
                "closed form 1 - 1/gamma at the measured branch gamma = 3",
            ),
            ev(
                "dim-sausage-formula",
                2.0 / 3.0,
                Some(DIM_TOL),
                "closed form 1 - 1/gamma at the measured branch gamma = 3",
            ),
            ev("dim-y", 0.375, None, "reported projection value 3/8 (same caveat)"),
        ],
    });

    out.push(Preset {
        name: "nilpotent-node",
        description: "x' = y, y' = -x^5 - 4 x^2 y (attracting nilpotent node)",
        kind: PresetKind::Local {
            model: NilpotentModel::from_i64(-1, 5, -4, 2).unwrap(),
            expected_kind: SingularityKind::Node(crate::classify::NodeStability::Attracting),
            branch_index: 1,
            x0: 0.5,
            series_terms: 8,
        },
        expected: vec![
            ev("gamma", 3.0, Some(1e-12), "branch exponent n + 1"),
            ev("alpha", 3.0, Some(ALPHA_TOL), "x-increment exponent equals gamma"),
            ev("dim-boxcount", 2.0 / 3.0, Some(DIM_TOL), "reported orbit value 2/3 = 1 - 1/gamma"),
            ev("dim-sausage", 2.0 / 3.0, Some(DIM_TOL), "reported orbit value 2/3 = 1 - 1/gamma"),
            ev("dim-x", 2.0 / 3.0, None, "projection value 1 - 1/gamma"),
            ev("dim-y", 0.4, None, "projection value 1 - gamma/(n+gamma)"),
        ],
    });

    out.push(Preset {
        name: "elliptic-hyperbolic",
        description: "x' = y, y' = -x^3 + 3 x y (one hyperbolic and one elliptic sector)",
        kind: PresetKind::Local {
            model: NilpotentModel::from_i64(-1, 3, 3, 1).unwrap(),
            expected_kind: SingularityKind::EllipticHyperbolic,
            branch_index: 1,
            x0: 0.5,
            series_terms: 8,
        },
        expected: vec![
            ev("gamma", 2.0, Some(1e-12), "branch exponent n + 1"),
            ev("alpha", 2.0, Some(ALPHA_TOL), "x-increment exponent equals gamma"),
            ev("dim-boxcount", 0.5, Some(DIM_TOL), "reported orbit value 1/2 = 1 - 1/gamma"),
            ev("dim-sausage", 0.5, Some(DIM_TOL), "reported orbit value 1/2 = 1 - 1/gamma"),
            ev("dim-x", 0.5, None, "projection value 1 - 1/gamma"),
            ev("dim-y", 1.0 / 3.0, None, "projection value 1 - gamma/(n+gamma)"),
        ],
    });

    for (name, m, n, chart, val, src) in [
        ("infinity-u1-m2n2", 2u32, 2u32, Chart::U1, 0.75, "chart-1 value 1 - 1/(2n-m+2) = 3/4"),
        ("infinity-u1-m2n3", 2, 3, Chart::U1, 5.0 / 6.0, "chart-1 value 1 - 1/(2n-m+2) = 5/6"),
        ("infinity-u2-m2n2", 2, 2, Chart::U2, 2.0 / 3.0, "chart-2 value 1 - 1/(n+1) = 2/3"),
        ("infinity-u2-m2n3", 2, 3, Chart::U2, 0.75, "chart-2 value 1 - 1/(n+1) = 3/4"),
    ] {
        out.push(Preset {
            name,
            description: "nilpotent model chart at infinity",
            kind: PresetKind::Infinity { m, n, chart },
            expected: vec![
                ev("dim-boxcount", val, Some(DIM_TOL), src),
                ev("dim-sausage", val, Some(DIM_TOL), src),
            ],
        });
    }

    out.push(Preset {
        name: "dual-k1",
        description: "weak saddle of order 1 at infinity",
        kind: PresetKind::Dual { k: 1, estimate: true },
        expected: vec![
            ev("dual-dim", 4.0 / 3.0, Some(1e-12), "dual box dimension 4k/(2k+1)"),
            ev("infinity-dim", 0.5, Some(1e-12), "v-axis value 1 - 1/(2k)"),
            ev("dim-boxcount", 0.5, Some(DIM_TOL), "v-axis orbit estimate"),
            ev("dim-sausage", 0.5, Some(DIM_TOL), "v-axis orbit estimate"),
            ev("alpha", 2.0, Some(DIM_TOL), "increment exponent 2k"),
        ],
    });
    out.push(Preset {
        name: "dual-k2",
        description: "weak saddle of order 2 at infinity",
        kind: PresetKind::Dual { k: 2, estimate: true },
        expected: vec![
            ev("dual-dim", 1.6, Some(1e-12), "dual box dimension 4k/(2k+1)"),
            ev("infinity-dim", 0.75, Some(1e-12), "v-axis value 1 - 1/(2k)"),
            ev("dim-boxcount", 0.75, Some(DIM_TOL), "v-axis orbit estimate"),
            ev("dim-sausage", 0.75, Some(DIM_TOL), "v-axis orbit estimate"),
            ev("alpha", 4.0, Some(DIM_TOL), "increment exponent 2k"),
        ],
    });
    out.push(Preset {
        name: "dual-k3",
        description: "weak saddle of order 3 (closed forms only)",
        kind: PresetKind::Dual { k: 3, estimate: false },
        expected: vec![
            ev("dual-dim", 12.0 / 7.0, Some(1e-12), "dual box dimension 4k/(2k+1)"),
            ev("infinity-dim", 5.0 / 6.0, Some(1e-12), "v-axis value 1 - 1/(2k)"),
        ],
    });

    out.push(Preset {
        name: "hyperbolic-node",
        description: "x' = -x, y' = -y (hyperbolic attractor; trivial dimension)",
        kind: PresetKind::Hyperbolic { saddle: false },
        expected: vec![
            ev("dim-boxcount", 0.0, Some(0.1), "hyperbolic orbits have dimension 0"),
            ev("dim-sausage", 0.0, Some(0.1), "hyperbolic orbits have dimension 0"),
        ],
    });
    out.push(Preset {
        name: "hyperbolic-saddle",
        description: "x' = -x, y' = y on the stable axis (trivial dimension)",
        kind: PresetKind::Hyperbolic { saddle: true },
        expected: vec![
            ev("dim-boxcount", 0.0, Some(0.1), "hyperbolic orbits have dimension 0"),
            ev("dim-sausage", 0.0, Some(0.1), "hyperbolic orbits have dimension 0"),
        ],
    });

    out.push(Preset {
        name: "bt-fold",
        description: "fold-curve sample of the two-parameter cusp unfolding",
        kind: PresetKind::UnfoldingCurve {
            beta1: 0.09,
            beta2: -0.6,
            degenerate: false,
        },
        expected: vec![
            ev("dim-center", 0.5, Some(0.07), "saddle-node center manifold value 1/2"),
            ev(
                "hopf-curve-dim",
                4.0 / 3.0,
                None,
                "spiral value on the Hopf curve; annotation only, spiral orbits \
                 violate the monotonicity hypotheses of the sequence formulas",
            ),
            ev("homoclinic-curve", f64::NAN, None, "curve P left unquantified"),
        ],
    });
    out.push(Preset {
        name: "degenerate-bt-fold",
        description: "degenerate-fold sample of the nilpotent-saddle unfolding",
        kind: PresetKind::UnfoldingCurve {
            beta1: 0.0,
            beta2: -0.5,
            degenerate: true,
        },
        expected: vec![
            ev("dim-center", 2.0 / 3.0, Some(0.07), "cubic center manifold value 2/3"),
            ev(
                "hopf-curve-dim",
                4.0 / 3.0,
                None,
                "spiral value on the Hopf curve; annotation only",
            ),
        ],
    });

    out
}

pub fn find_preset(name: &str) -> Result<Preset, DriverError> {
    preset_library()
        .into_iter()
        .find(|p| p.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| DriverError::UnknownPreset(name.into()))
}

/// One verification row.
#[derive(Clone, Debug)]
pub struct VerifyRow {
    pub preset: String,
    pub quantity: String,
    pub expected: f64,
    pub estimated: Option<f64>,
    pub tol: Option<f64>,
    pub pass: Option<bool>,
    pub source: String,
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub rows: Vec<VerifyRow>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass != Some(false))
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "preset": r.preset,
                    "quantity": r.quantity,
                    "expected": if r.expected.is_nan() { Value::Null } else { json!(r.expected) },
                    "estimated": r.estimated,
                    "tol": r.tol,
                    "pass": r.pass,
                    "source": r.source,
                })
            })
            .collect();
        json!({ "rows": rows, "passed": self.passed() })
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let status = match r.pass {
                Some(true) => "pass",
                Some(false) => "FAIL",
                None => "note",
            };
            let est = r
                .estimated
                .map(|v| format!("{v:.4}"))
                .unwrap_or_else(|| "-".into());
            out.push_str(&format!(
                "{status:4}  {:<22} {:<22} expected {:<9} got {est}\n",
                r.preset,
                r.quantity,
                if r.expected.is_nan() {
                    "-".to_string()
                } else {
                    format!("{:.4}", r.expected)
                },
            ));
        }
        out
    }
}

/// Configuration for a verification run.
#[derive(Clone, Copy, Debug)]
pub struct VerifyCfg {
    pub max_iter: usize,
    pub floor: f64,
    pub seed: u64,
    /// Overrides every dimension tolerance when set.
    pub tol_override: Option<f64>,
}

impl Default for VerifyCfg {
    fn default() -> Self {
        VerifyCfg {
            max_iter: 100_000,
            floor: 1e-9,
            seed: 0x6e696c66,
            tol_override: None,
        }
    }
}

struct Measured {
    quantities: Vec<(String, f64)>,
    notes: Vec<(String, String)>,
}

fn measure(preset: &Preset, cfg: &VerifyCfg) -> Result<Measured, String> {
    let est_cfg = EstimatorCfg {
        seed: cfg.seed,
        ..Default::default()
    };
    let orbit_cfg = OrbitCfg {
        floor: cfg.floor,
        max_iter: cfg.max_iter,
        ..Default::default()
    };
    let mut q = Vec::new();
    let mut notes = Vec::new();
    match &preset.kind {
        PresetKind::Local {
            model,
            expected_kind,
            branch_index,
            x0,
            series_terms,
        } => {
            let report = classify_nilpotent(&model.field()).map_err(|e| e.to_string())?;
            notes.push(("type".into(), report.kind.label().to_string()));
            q.push((
                "type-match".into(),
                if report.kind == *expected_kind { 1.0 } else { 0.0 },
            ));
            let leads = separatrix_leading(model).map_err(|e| e.to_string())?;
            let lead = leads
                .get(*branch_index)
                .ok_or_else(|| "missing branch".to_string())?;
            q.push(("gamma".into(), rat_to_f64(lead.gamma)));
            let branch =
                separatrix_series(model, lead, *series_terms).map_err(|e| e.to_string())?;
            let series = branch.series.clone();
            let curve = move |x: f64| series.eval_f64(x);
            let field = model.field_f64();
            let dir = inward_time_span(&field, &curve, false, *x0);
            let orbit = iterate_on_curve(
                &field,
                &curve,
                false,
                *x0,
                &OrbitCfg {
                    time_span: dir,
                    ..orbit_cfg
                },
            )
            .map_err(|e| e.to_string())?;
            notes.push(("orbit-points".into(), orbit.points.len().to_string()));
            notes.push(("orbit-end".into(), orbit.termination.label()));
            let fit = estimate_increment_exponent(&orbit.independent, &IncrementCfg::default())
                .map_err(|e| e.to_string())?;
            q.push(("alpha".into(), fit.alpha));
            let cloud = PointCloud::Plane(orbit.points.clone());
            let (eps_min, eps_max) = crate::boxdim::orbit_scale_window(&cloud);
            let est_cfg = EstimatorCfg {
                eps_min,
                eps_max,
                ..est_cfg
            };
            let bc = estimate_dim_boxcount(&cloud, &est_cfg).map_err(|e| e.to_string())?;
            let sa = estimate_dim_sausage(&cloud, &est_cfg).map_err(|e| e.to_string())?;
            q.push(("dim-boxcount".into(), bc.value));
            q.push(("dim-sausage".into(), sa.value));
            q.push(("dim-boxcount-formula".into(), bc.value));
            q.push(("dim-sausage-formula".into(), sa.value));
            if let Ok(tb) = dim_theorem_box(model.m(), model.n(), lead.gamma) {
                notes.push((
                    "closed-form".into(),
                    format!(
                        "orbit {} x {} y {} ({:?})",
                        tb.dim_orbit, tb.dim_x, tb.dim_y, tb.case
                    ),
                ));
            }
        }
        PresetKind::Infinity { m, n, chart } => {
            let model = NilpotentModel::from_i64(1, *m, 1, *n).map_err(|e| e.to_string())?;
            // chart sequences decay like k^(-1/(alpha-1)) with alpha up to
            // 2n-m+2; they need deeper orbits for the same scale span
            let deep = OrbitCfg {
                max_iter: cfg.max_iter.saturating_mul(4),
                ..orbit_cfg
            };
            let v = verify_dim_infinity(&model, *chart, &deep, &est_cfg)
                .map_err(|e| e.to_string())?;
            q.push(("dim-boxcount".into(), v.boxcount.value));
            q.push(("dim-sausage".into(), v.sausage.value));
            q.push(("alpha".into(), v.increment_alpha));
            notes.push(("predicted".into(), v.predicted.to_string()));
            notes.push(("orbit-points".into(), v.n_points.to_string()));
            if let Some(note) = v.note {
                notes.push(("reading".into(), note));
            }
        }
        PresetKind::Dual { k, estimate } => {
            let d = dual_box_dimension(*k)?;
            q.push(("dual-dim".into(), rat_to_f64(d.dual_dim)));
            q.push(("infinity-dim".into(), rat_to_f64(d.infinity_dim)));
            if *estimate {
                let deep = OrbitCfg {
                    max_iter: cfg.max_iter.saturating_mul(4),
                    ..orbit_cfg
                };
                let v = verify_saddle_infinity(*k, &deep, &est_cfg)
                    .map_err(|e| e.to_string())?;
                q.push(("dim-boxcount".into(), v.boxcount.value));
                q.push(("dim-sausage".into(), v.sausage.value));
                q.push(("alpha".into(), v.increment_alpha));
                notes.push(("orbit-points".into(), v.n_points.to_string()));
            }
        }
        PresetKind::Hyperbolic { saddle } => {
            let trunc = 4;
            let p = BiPoly::<f64>::x(trunc).neg();
            let qy = if *saddle {
                BiPoly::<f64>::y(trunc)
            } else {
                BiPoly::<f64>::y(trunc).neg()
            };
            let field = PlanarVectorField::new(p, qy).unwrap();
            let seed = if *saddle { (1.0, 0.0) } else { (1.0, 0.6) };
            let orbit = iterate_orbit(
                &field,
                seed,
                &OrbitCfg {
                    floor: 1e-9,
                    max_iter: 200,
                    ..orbit_cfg
                },
            )
            .map_err(|e| e.to_string())?;
            let cloud = PointCloud::Plane(orbit.points.clone());
            let bc = estimate_dim_boxcount(&cloud, &est_cfg).map_err(|e| e.to_string())?;
            let sa = estimate_dim_sausage(&cloud, &est_cfg).map_err(|e| e.to_string())?;
            q.push(("dim-boxcount".into(), bc.value));
            q.push(("dim-sausage".into(), sa.value));
        }
        PresetKind::UnfoldingCurve {
            beta1,
            beta2,
            degenerate,
        } => {
            let dim = crate::sweep::center_manifold_dim(*beta1, *beta2, *degenerate, cfg.seed)
                .map_err(|e| e.to_string())?;
            q.push(("dim-center".into(), dim.value));
        }
    }
    Ok(Measured {
        quantities: q,
        notes,
    })
}

/// Run every preset matching `filter` (case-insensitive substring; empty
/// runs all) and compare each expected quantity at its tolerance.
pub fn run_verify(filter: &str, cfg: &VerifyCfg) -> VerifyReport {
    let presets: Vec<Preset> = preset_library()
        .into_iter()
        .filter(|p| filter.is_empty() || p.name.to_lowercase().contains(&filter.to_lowercase()))
        .collect();
    let results = map_ordered(presets, |preset| {
        let measured = measure(&preset, cfg);
        (preset, measured)
    });
    let mut report = VerifyReport::default();
    for (preset, measured) in results {
        match measured {
            Ok(m) => {
                // implicit type check row for local presets
                if let Some((_, v)) = m.quantities.iter().find(|(k, _)| k == "type-match") {
                    report.rows.push(VerifyRow {
                        preset: preset.name.into(),
                        quantity: "type".into(),
                        expected: 1.0,
                        estimated: Some(*v),
                        tol: Some(0.5),
                        pass: Some(*v == 1.0),
                        source: "classification".into(),
                    });
                }
                for exp in &preset.expected {
                    let est = m
                        .quantities
                        .iter()
                        .find(|(k, _)| *k == exp.quantity)
                        .map(|(_, v)| *v);
                    let tol = exp.tol.map(|t| cfg.tol_override.unwrap_or(t));
                    let pass = match (tol, est) {
                        (Some(t), Some(v)) => Some((v - exp.value).abs() <= t),
                        (Some(_), None) => Some(false),
                        (None, _) => None,
                    };
                    report.rows.push(VerifyRow {
                        preset: preset.name.into(),
                        quantity: exp.quantity.clone(),
                        expected: exp.value,
                        estimated: est,
                        tol,
                        pass,
                        source: exp.source.clone(),
                    });
                }
                for (k, v) in m.notes {
                    report.rows.push(VerifyRow {
                        preset: preset.name.into(),
                        quantity: format!("note:{k}"),
                        expected: f64::NAN,
                        estimated: None,
                        tol: None,
                        pass: None,
                        source: v,
                    });
                }
            }
            Err(e) => {
                report.rows.push(VerifyRow {
                    preset: preset.name.into(),
                    quantity: "run".into(),
                    expected: f64::NAN,
                    estimated: None,
                    tol: Some(0.0),
                    pass: Some(false),
                    source: e,
                });
            }
        }
    }
    report
}

/// Expected-map sanity: every preset quantity is unique within its preset
/// and every expected value carries a provenance string.
pub fn validate_library() -> Result<(), String> {
    let lib = preset_library();
    let mut names = std::collections::HashSet::new();
    for p in &lib {
        if !names.insert(p.name) {
            return Err(format!("duplicate preset name {}", p.name));
        }
        let mut qs = std::collections::HashSet::new();
        for e in &p.expected {
            if e.source.is_empty() {
                return Err(format!("{}: {} has no source", p.name, e.quantity));
            }
            if !qs.insert(e.quantity.clone()) {
                return Err(format!("{}: duplicate quantity {}", p.name, e.quantity));
            }
        }
    }
    Ok(())
}

/// Closed-form dimensions for a measured branch, exposed for reports.
pub fn closed_form_for(model: &NilpotentModel, lead: &BranchLead) -> Option<(Rat, Rat, Rat)> {
    dim_theorem_box(model.m(), model.n(), lead.gamma)
        .ok()
        .map(|t| (t.dim_orbit, t.dim_x, t.dim_y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_is_well_formed() {
        validate_library().unwrap();
        assert!(find_preset("cusp-bt").is_ok());
        assert!(find_preset("CUSP-BT").is_ok());
        assert!(matches!(
            find_preset("nope"),
            Err(DriverError::UnknownPreset(_))
        ));
    }

    #[test]
    fn reported_figure_values_have_a_home() {
        // every quantitative reference value appears in exactly one preset
        let lib = preset_library();
        let mut homes: std::collections::HashMap<&str, usize> = Default::default();
        let catalog = [
            ("cusp-bt", 1.0 / 3.0),
            ("nilpotent-saddle", 0.5),
            ("saddle-node", 0.6),
            ("nilpotent-node", 2.0 / 3.0),
            ("elliptic-hyperbolic", 0.5),
            ("infinity-u1-m2n2", 0.75),
            ("infinity-u1-m2n3", 5.0 / 6.0),
            ("infinity-u2-m2n2", 2.0 / 3.0),
            ("infinity-u2-m2n3", 0.75),
            ("dual-k1", 0.5),
            ("dual-k2", 0.75),
            ("bt-fold", 0.5),
            ("degenerate-bt-fold", 2.0 / 3.0),
        ];
        for (name, value) in catalog {
            let n = lib
                .iter()
                .filter(|p| {
                    p.name == name
                        && p.expected
                            .iter()
                            .any(|e| (e.value - value).abs() < 1e-12 && e.quantity.starts_with("dim"))
                })
                .count();
            *homes.entry(name).or_default() += n;
            assert_eq!(n, 1, "{name} must carry {value}");
        }
    }

    #[test]
    fn hyperbolic_preset_is_trivial() {
        let cfg = VerifyCfg {
            max_iter: 200,
            ..Default::default()
        };
        let report = run_verify("hyperbolic-node", &cfg);
        assert!(report.passed(), "{}", report.render_table());
    }

    #[test]
    fn cusp_preset_passes_with_short_budget() {
        let cfg = VerifyCfg {
            max_iter: 30_000,
            tol_override: Some(0.08),
            ..Default::default()
        };
        let report = run_verify("cusp-bt", &cfg);
        assert!(report.passed(), "{}", report.render_table());
    }
}
