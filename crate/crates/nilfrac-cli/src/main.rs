//! `nilfrac`: classification, separatrix expansions, unit-time orbits and
//! box-dimension estimation for planar vector fields with nilpotent
//! singularities.

use clap::{Args, Parser, Subcommand, ValueEnum};
use nilfrac_core::blowup::{separatrix_leading, separatrix_series};
use nilfrac_core::boxdim::{
    dim_from_increment, estimate_dim_boxcount, estimate_dim_sausage,
    estimate_increment_exponent, EstimatorCfg, IncrementCfg, PointCloud,
};
use nilfrac_core::classify::classify_nilpotent;
use nilfrac_core::coeff::{big_rational_string, Coeff};
use nilfrac_core::error::DriverError;
use nilfrac_core::infinity::{compactify, predicted_dim_infinity, verify_dim_infinity, Chart};
use nilfrac_core::io;
use nilfrac_core::model::NilpotentModel;
use nilfrac_core::plot;
use nilfrac_core::poly::PlanarVectorField;
use nilfrac_core::presets::{find_preset, run_verify, PresetKind, VerifyCfg};
use nilfrac_core::saddledual::{dual_box_dimension, saddle_infinity_chart, verify_saddle_infinity};
use nilfrac_core::sweep::{run_sweep, sweep_to_csv, sweep_to_json, SweepCfg, Unfolding};
use nilfrac_core::unitmap::{iterate_orbit, OrbitCfg};
use num_rational::BigRational;
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "nilfrac", version, about)]
struct Cli {
    /// Print exact rational/radical coefficients (default).
    #[arg(long, global = true, conflicts_with = "float")]
    exact: bool,
    /// Print floating-point coefficient values.
    #[arg(long, global = true)]
    float: bool,
    /// Seed for the Monte Carlo fallback of the sausage estimator.
    #[arg(long, global = true, default_value_t = 0x6e696c66)]
    seed: u64,
    /// Override the dimension comparison tolerance in `verify`.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format where applicable.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Args)]
struct FieldInput {
    /// Field file in the JSON vector-field format.
    #[arg(long, conflicts_with = "preset")]
    field: Option<PathBuf>,
    /// Name of a built-in preset system instead of a file.
    #[arg(long)]
    preset: Option<String>,
}

impl FieldInput {
    fn load(&self) -> Result<PlanarVectorField<BigRational>, DriverError> {
        if let Some(path) = &self.field {
            let text = std::fs::read_to_string(path)
                .map_err(|e| DriverError::Parse(format!("{}: {e}", path.display())))?;
            return io::field_from_json(&text);
        }
        if let Some(name) = &self.preset {
            let preset = find_preset(name)?;
            if let PresetKind::Local { model, .. } = preset.kind {
                return Ok(model.field());
            }
            return Err(DriverError::Parse(format!(
                "preset `{name}` is not a local vector field"
            )));
        }
        Err(DriverError::Parse("need --field or --preset".into()))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classify the nilpotent singularity at the origin.
    Classify {
        #[command(flatten)]
        input: FieldInput,
    },
    /// Separatrix branches with their fractional-power expansions.
    Separatrix {
        #[command(flatten)]
        input: FieldInput,
        /// Number of series terms beyond the leading one.
        #[arg(long, default_value_t = 8)]
        terms: usize,
    },
    /// Iterate the unit-time map and write the orbit as CSV.
    Orbit {
        #[command(flatten)]
        input: FieldInput,
        #[arg(long, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long, allow_hyphen_values = true)]
        y0: f64,
        #[arg(long, default_value_t = 1e-9)]
        floor: f64,
        #[arg(long, default_value_t = 100_000)]
        max_iter: usize,
        /// Signed time span per iterate (-1 walks backwards).
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        time_span: f64,
        /// Walk the orbit restricted to the separatrix branch with this
        /// index (ignores --y0 and the time span, which is chosen to move
        /// toward the singularity).
        #[arg(long)]
        branch: Option<usize>,
    },
    /// Estimate the box dimension of an orbit file.
    Dim {
        /// Orbit CSV (columns k,x,y).
        #[arg(long)]
        orbit: PathBuf,
        #[arg(long, value_enum, default_value_t = DimMethod::Boxcount)]
        method: DimMethod,
        #[arg(long)]
        eps_min: Option<f64>,
        #[arg(long)]
        eps_max: Option<f64>,
        /// Treat the x column as a 1-D sequence on a line.
        #[arg(long)]
        line: bool,
    },
    /// Re-derive every preset quantity and compare against its reference.
    Verify {
        /// Preset name or substring filter; runs everything when omitted.
        #[arg(long)]
        preset: Option<String>,
        /// Run all presets (default when --preset is omitted).
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 100_000)]
        max_iter: usize,
    },
    /// Two-parameter sweep of an unfolding grid.
    Sweep {
        #[arg(long, value_enum, default_value_t = UnfoldingArg::Bt)]
        unfolding: UnfoldingArg,
        #[arg(long, default_value_t = 41)]
        grid: usize,
        /// Number of fold-curve dimension samples.
        #[arg(long, default_value_t = 3)]
        samples: usize,
    },
    /// Chart systems at infinity and their dimension verification.
    Infinity {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum)]
        chart: ChartArg,
        /// Also iterate the chart orbit and estimate its dimension.
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 100_000)]
        max_iter: usize,
    },
    /// Dual box dimension of the weak saddle of order k.
    Dual {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 100_000)]
        max_iter: usize,
    },
    /// Render an orbit (SVG) or dump it back out (CSV).
    Plot {
        #[arg(long)]
        orbit: PathBuf,
        /// Optional field whose separatrix is overlaid.
        #[arg(long)]
        separatrix: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DimMethod {
    Boxcount,
    Sausage,
    Increment,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnfoldingArg {
    Bt,
    DegenerateBt,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChartArg {
    U1,
    U2,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn write_output(cli: &Cli, text: &str) -> Result<(), DriverError> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| DriverError::Parse(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, DriverError> {
    match &cli.command {
        Command::Classify { input } => {
            let field = input.load()?;
            let report = classify_nilpotent(&field)
                .map_err(|e| DriverError::Parse(e.to_string()))?;
            let mut value = io::classification_to_json(&report);
            if cli.float {
                value["a"] = json!(report.a.to_f64());
            }
            write_output(cli, &serde_json::to_string_pretty(&value).unwrap())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Separatrix { input, terms } => {
            let field = input.load()?;
            let model = model_from_field(&field)?;
            let leads =
                separatrix_leading(&model).map_err(|e| DriverError::Parse(e.to_string()))?;
            let mut branches = Vec::new();
            for lead in &leads {
                let branch = separatrix_series(&model, lead, *terms)
                    .map_err(|e| DriverError::Parse(e.to_string()))?;
                branches.push(io::branch_to_json(&branch));
            }
            let value = json!({ "model": model.describe(), "branches": branches });
            write_output(cli, &serde_json::to_string_pretty(&value).unwrap())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Orbit {
            input,
            x0,
            y0,
            floor,
            max_iter,
            time_span,
            branch,
        } => {
            let exact = input.load()?;
            let field = exact.map_coeffs(|c| c.to_f64());
            let cfg = OrbitCfg {
                floor: *floor,
                max_iter: *max_iter,
                time_span: *time_span,
                ..Default::default()
            };
            let orbit = match branch {
                None => iterate_orbit(&field, (*x0, *y0), &cfg)
                    .map_err(|e| DriverError::Parse(e.to_string()))?,
                Some(idx) => {
                    let model = model_from_field(&exact)?;
                    let leads = separatrix_leading(&model)
                        .map_err(|e| DriverError::Parse(e.to_string()))?;
                    let lead = leads
                        .get(*idx)
                        .ok_or_else(|| DriverError::Parse(format!("no branch {idx}")))?;
                    let b = separatrix_series(&model, lead, 8)
                        .map_err(|e| DriverError::Parse(e.to_string()))?;
                    let series = b.series;
                    let curve = move |x: f64| series.eval_f64(x);
                    let dir = nilfrac_core::unitmap::inward_time_span(&field, &curve, false, *x0);
                    let walk = nilfrac_core::unitmap::iterate_on_curve(
                        &field,
                        &curve,
                        false,
                        *x0,
                        &OrbitCfg { time_span: dir, ..cfg },
                    )
                    .map_err(|e| DriverError::Parse(e.to_string()))?;
                    nilfrac_core::unitmap::Orbit {
                        points: walk.points,
                        termination: walk.termination,
                        seed: (*x0, curve(*x0)),
                        map_descriptor: format!("unit-time map restricted to branch {idx}"),
                    }
                }
            };
            eprintln!(
                "# {} points, terminated: {}",
                orbit.points.len(),
                orbit.termination.label()
            );
            write_output(cli, &io::orbit_to_csv(&orbit))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Dim {
            orbit,
            method,
            eps_min,
            eps_max,
            line,
        } => {
            let text = std::fs::read_to_string(orbit)
                .map_err(|e| DriverError::Parse(format!("{}: {e}", orbit.display())))?;
            let points = io::orbit_points_from_csv(&text)?;
            let cloud = if *line {
                PointCloud::Line(points.iter().map(|p| p.0).collect())
            } else {
                PointCloud::Plane(points.clone())
            };
            let cfg = EstimatorCfg {
                eps_min: *eps_min,
                eps_max: *eps_max,
                seed: cli.seed,
                ..Default::default()
            };
            let est = match method {
                DimMethod::Boxcount => estimate_dim_boxcount(&cloud, &cfg),
                DimMethod::Sausage => estimate_dim_sausage(&cloud, &cfg),
                DimMethod::Increment => {
                    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
                    estimate_increment_exponent(&xs, &IncrementCfg::default())
                        .map(|fit| dim_from_increment(&fit))
                }
            }
            .map_err(|e| DriverError::Parse(e.to_string()))?;
            write_output(
                cli,
                &serde_json::to_string_pretty(&io::estimate_to_json(&est)).unwrap(),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            preset,
            all: _,
            max_iter,
        } => {
            let filter = preset.clone().unwrap_or_default();
            let cfg = VerifyCfg {
                max_iter: *max_iter,
                seed: cli.seed,
                tol_override: cli.tol,
                ..Default::default()
            };
            let report = run_verify(&filter, &cfg);
            if report.rows.is_empty() {
                return Err(DriverError::UnknownPreset(filter));
            }
            match cli.format {
                Format::Json => write_output(
                    cli,
                    &serde_json::to_string_pretty(&report.to_json()).unwrap(),
                )?,
                _ => write_output(cli, &report.render_table())?,
            }
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Sweep {
            unfolding,
            grid,
            samples,
        } => {
            let unf = match unfolding {
                UnfoldingArg::Bt => Unfolding::Bt,
                UnfoldingArg::DegenerateBt => Unfolding::DegenerateBt,
            };
            let cfg = SweepCfg {
                grid_n: *grid,
                seed: cli.seed,
                curve_samples: *samples,
                ..Default::default()
            };
            let result = run_sweep(unf, &cfg);
            let ok = result
                .curve_samples
                .iter()
                .all(|s| (s.estimate.value - s.expected).abs() <= cli.tol.unwrap_or(0.07));
            match cli.format {
                Format::Csv => write_output(cli, &sweep_to_csv(&result))?,
                Format::Svg => write_output(
                    cli,
                    &plot::sweep_svg(&result).map_err(|e| DriverError::Parse(e.to_string()))?,
                )?,
                Format::Json => write_output(
                    cli,
                    &serde_json::to_string_pretty(&sweep_to_json(&result)).unwrap(),
                )?,
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Infinity {
            m,
            n,
            chart,
            verify,
            max_iter,
        } => {
            let chart = match chart {
                ChartArg::U1 => Chart::U1,
                ChartArg::U2 => Chart::U2,
            };
            let model = NilpotentModel::from_i64(1, *m, 1, *n)
                .map_err(|e| DriverError::Parse(e.to_string()))?;
            let sys = compactify(&model, chart);
            let predicted = predicted_dim_infinity(*m, *n, chart)
                .map_err(|e| DriverError::Parse(e.to_string()))?;
            let mut value = json!({
                "chart": chart.label(),
                "system": {
                    "u_dot": render_poly(&sys.field.p, cli.float),
                    "v_dot": render_poly(&sys.field.q, cli.float),
                    "divisor": { "u_exp": sys.divisor.0, "v_exp": sys.divisor.1 },
                },
                "predicted": predicted.value.to_string(),
                "reading_note": predicted.note,
            });
            if *verify {
                let cfg = OrbitCfg {
                    max_iter: *max_iter,
                    ..Default::default()
                };
                let est_cfg = EstimatorCfg {
                    seed: cli.seed,
                    ..Default::default()
                };
                let v = verify_dim_infinity(&model, chart, &cfg, &est_cfg)
                    .map_err(|e| DriverError::Parse(e.to_string()))?;
                value["estimated"] = json!({
                    "boxcount": io::estimate_to_json(&v.boxcount),
                    "sausage": io::estimate_to_json(&v.sausage),
                    "increment_alpha": v.increment_alpha,
                    "n_points": v.n_points,
                });
            }
            write_output(cli, &serde_json::to_string_pretty(&value).unwrap())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Dual { k, verify, max_iter } => {
            let d = dual_box_dimension(*k).map_err(DriverError::Parse)?;
            let chart = saddle_infinity_chart(*k).map_err(DriverError::Parse)?;
            let mut value = json!({
                "k": k,
                "dual_dim": d.dual_dim.to_string(),
                "infinity_dim": d.infinity_dim.to_string(),
                "chart": {
                    "u_dot": render_poly(&chart.p, cli.float),
                    "v_dot": render_poly(&chart.q, cli.float),
                },
            });
            if *verify {
                let cfg = OrbitCfg {
                    max_iter: *max_iter,
                    ..Default::default()
                };
                let est_cfg = EstimatorCfg {
                    seed: cli.seed,
                    ..Default::default()
                };
                let v = verify_saddle_infinity(*k, &cfg, &est_cfg)
                    .map_err(|e| DriverError::Parse(e.to_string()))?;
                value["estimated"] = json!({
                    "boxcount": io::estimate_to_json(&v.boxcount),
                    "sausage": io::estimate_to_json(&v.sausage),
                    "increment_alpha": v.increment_alpha,
                    "n_points": v.n_points,
                });
            }
            write_output(cli, &serde_json::to_string_pretty(&value).unwrap())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Plot { orbit, separatrix } => {
            let text = std::fs::read_to_string(orbit)
                .map_err(|e| DriverError::Parse(format!("{}: {e}", orbit.display())))?;
            let points = io::orbit_points_from_csv(&text)?;
            let overlay = match separatrix {
                Some(path) => {
                    let ftext = std::fs::read_to_string(path)
                        .map_err(|e| DriverError::Parse(format!("{}: {e}", path.display())))?;
                    let field = io::field_from_json(&ftext)?;
                    let model = model_from_field(&field)?;
                    let leads = separatrix_leading(&model)
                        .map_err(|e| DriverError::Parse(e.to_string()))?;
                    let mut polyline = Vec::new();
                    if let Some(lead) = leads.first() {
                        let branch = separatrix_series(&model, lead, 8)
                            .map_err(|e| DriverError::Parse(e.to_string()))?;
                        let xmax = points.iter().map(|p| p.0.abs()).fold(0.0, f64::max);
                        for i in 0..400 {
                            let x = xmax * i as f64 / 399.0;
                            polyline.push((x, branch.series.eval_f64(x)));
                        }
                    }
                    Some(polyline)
                }
                None => None,
            };
            let svg = plot::orbit_svg(&points, overlay.as_deref())?;
            write_output(cli, &svg)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn render_poly(p: &nilfrac_core::poly::BiPoly<BigRational>, float: bool) -> Vec<Value> {
    p.terms()
        .map(|(i, j, c)| {
            if float {
                json!([i, j, c.to_f64()])
            } else {
                json!([i, j, big_rational_string(c)])
            }
        })
        .collect()
}

/// Interpret a field as the nilpotent model `x' = y, y' = a x^m + b x^n y
/// (+ higher-order tail)`.
fn model_from_field(field: &PlanarVectorField<BigRational>) -> Result<NilpotentModel, DriverError> {
    use num_traits::Zero;
    let y_only = field.p.num_terms() == 1 && !field.p.coeff(0, 1).is_zero();
    if !y_only {
        return Err(DriverError::Parse(
            "separatrix analysis expects the model form x' = y".into(),
        ));
    }
    let mut a_term: Option<(u32, BigRational)> = None;
    let mut b_term: Option<(u32, BigRational)> = None;
    for (i, j, c) in field.q.terms() {
        match j {
            0 => {
                if a_term.as_ref().map_or(true, |(m, _)| i < *m) {
                    a_term = Some((i, c.clone()));
                }
            }
            1 => {
                if b_term.as_ref().map_or(true, |(n, _)| i < *n) {
                    b_term = Some((i, c.clone()));
                }
            }
            _ => {}
        }
    }
    let (m, a) = a_term.ok_or_else(|| {
        DriverError::Parse("the y-component needs a pure x^m term".into())
    })?;
    let model = match &b_term {
        Some((n, b)) => NilpotentModel::new(a, m, b.clone(), *n),
        None => NilpotentModel::new(a, m, BigRational::zero(), 1),
    }
    .map_err(|e| DriverError::Parse(e.to_string()))?;
    let mut tail = nilfrac_core::poly::BiPoly::zero(model.field().trunc_degree());
    for (i, j, c) in field.q.terms() {
        let is_lead = (j == 0 && i == m) || (j == 1 && Some(i) == b_term.as_ref().map(|(n, _)| *n));
        if !is_lead {
            tail.add_term(i, j, c.clone());
        }
    }
    if tail.is_zero() {
        Ok(model)
    } else {
        model
            .with_tail(tail)
            .map_err(|e| DriverError::Parse(e.to_string()))
    }
}
