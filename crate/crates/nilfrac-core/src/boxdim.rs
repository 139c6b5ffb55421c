//! Box dimension: closed forms for unit-time orbits on separatrices and
//! independent numerical estimators.
//!
//! Closed forms: a decreasing sequence with `x_k - x_{k+1} ~ x_k^alpha`,
//! `alpha > 1`, has box dimension `1 - 1/alpha`; a planar orbit made of two
//! such sequences takes the larger of the two values. For an orbit on a
//! separatrix `y ~ x^gamma` of the nilpotent model this yields
//!
//! - `m <= n+1`: `dim_x = 1 - 1/gamma`, `dim_y = 1 - gamma/m`,
//! - `m >  n+1`: `dim_x = 1 - 1/gamma`, `dim_y = 1 - gamma/(n+gamma)`,
//!
//! with the orbit dimension `max(dim_x, dim_y)`.
//!
//! Estimators: grid box counting, Minkowski sausage area (an implicit
//! raster of cell `<= eps/8`, with a seeded Monte Carlo fallback above a
//! cell budget) and least-squares regression of the increment exponent.
//! Scale evaluations run in parallel and are reduced in input order, so
//! results are independent of thread scheduling.

use crate::coeff::{rat, rat_to_f64, Rat};
use crate::error::EstimateError;
use crate::par::map_ordered;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

// ---------------------------------------------------------------------------
// closed forms
// ---------------------------------------------------------------------------

/// `1 - 1/alpha` for a decreasing sequence with increment exponent `alpha > 1`.
pub fn dim_sequence_formula(alpha: Rat) -> Result<Rat, EstimateError> {
    if alpha <= rat(1, 1) {
        return Err(EstimateError::ExponentAtMostOne(rat_to_f64(alpha)));
    }
    Ok(rat(1, 1) - alpha.recip())
}

/// Planar orbit from two decreasing sequences with exponents `alpha`, `beta`:
/// the dimension is `1 - 1/alpha` when `alpha >= beta`, else `1 - 1/beta`.
pub fn dim_orbit_2d_formula(alpha: Rat, beta: Rat) -> Result<Rat, EstimateError> {
    if alpha <= rat(1, 1) {
        return Err(EstimateError::ExponentAtMostOne(rat_to_f64(alpha)));
    }
    if beta <= rat(1, 1) {
        return Err(EstimateError::ExponentAtMostOne(rat_to_f64(beta)));
    }
    dim_sequence_formula(if alpha >= beta { alpha } else { beta })
}

/// Case of the closed-form orbit dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TheoremCase {
    C1i,
    C1ii,
    C2i,
    C2ii,
}

/// Closed-form box dimensions of the orbit on a separatrix `y ~ x^gamma`
/// and of its two coordinate projections.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TheoremBoxResult {
    pub dim_orbit: Rat,
    pub dim_x: Rat,
    pub dim_y: Rat,
    pub case: TheoremCase,
}

pub fn dim_theorem_box(m: u32, n: u32, gamma: Rat) -> Result<TheoremBoxResult, EstimateError> {
    if gamma <= rat(1, 1) || gamma >= rat(m as i64, 1) {
        return Err(EstimateError::GammaOutOfRange {
            gamma: gamma.to_string(),
            m,
        });
    }
    let one = rat(1, 1);
    let dim_x = one - gamma.recip();
    if m <= n + 1 {
        let dim_y = one - gamma / rat(m as i64, 1);
        // gamma^2 >= m picks the x-projection
        if gamma * gamma >= rat(m as i64, 1) {
            Ok(TheoremBoxResult {
                dim_orbit: dim_x,
                dim_x,
                dim_y,
                case: TheoremCase::C1i,
            })
        } else {
            Ok(TheoremBoxResult {
                dim_orbit: dim_y,
                dim_x,
                dim_y,
                case: TheoremCase::C1ii,
            })
        }
    } else {
        let dim_y = one - gamma / (gamma + rat(n as i64, 1));
        // gamma >= (1 + sqrt(1+4n))/2 is gamma^2 >= gamma + n without radicals
        if gamma * gamma >= gamma + rat(n as i64, 1) {
            Ok(TheoremBoxResult {
                dim_orbit: dim_x,
                dim_x,
                dim_y,
                case: TheoremCase::C2i,
            })
        } else {
            Ok(TheoremBoxResult {
                dim_orbit: dim_y,
                dim_x,
                dim_y,
                case: TheoremCase::C2ii,
            })
        }
    }
}

/// Characteristic dimension-ratio sets for the cusp and saddle families:
/// `D_c = {4k/(2k+1)}` and `D_s = {2 - 1/(k+1)}`, `k = 1..=k_max`.
pub fn characteristic_sets(k_max: u32) -> (Vec<Rat>, Vec<Rat>) {
    let mut d_c = Vec::with_capacity(k_max as usize);
    let mut d_s = Vec::with_capacity(k_max as usize);
    for k in 1..=k_max as i64 {
        d_c.push(rat(4 * k, 2 * k + 1));
        d_s.push(rat(2, 1) - rat(1, k + 1));
    }
    (d_c, d_s)
}

// ---------------------------------------------------------------------------
// estimates
// ---------------------------------------------------------------------------

/// How a dimension value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    FormulaLemma2,
    FormulaTheorem4,
    BoxCount,
    Sausage,
    IncrementRegression,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::FormulaLemma2 => "formula-sequence",
            Method::FormulaTheorem4 => "formula-orbit",
            Method::BoxCount => "boxcount",
            Method::Sausage => "sausage",
            Method::IncrementRegression => "increment",
        }
    }
}

/// Regression diagnostics of a numerical estimate.
#[derive(Clone, Copy, Debug)]
pub struct FitDiagnostics {
    pub epsilon_range: (f64, f64),
    pub n_scales: usize,
    pub slope_stderr: f64,
    pub r_squared: f64,
}

/// A dimension value with its provenance.
#[derive(Clone, Debug)]
pub struct DimensionEstimate {
    pub value: f64,
    pub method: Method,
    pub fit: Option<FitDiagnostics>,
}

impl DimensionEstimate {
    pub fn from_formula(value: Rat, method: Method) -> Self {
        DimensionEstimate {
            value: rat_to_f64(value),
            method,
            fit: None,
        }
    }
}

/// Point data for the estimators: a sequence embedded on a line, or a
/// planar set. Orbit points are kept in generation order; consecutive
/// distances drive the automatic scale window.
#[derive(Clone, Debug)]
pub enum PointCloud {
    Line(Vec<f64>),
    Plane(Vec<(f64, f64)>),
}

impl PointCloud {
    pub fn len(&self) -> usize {
        match self {
            PointCloud::Line(v) => v.len(),
            PointCloud::Plane(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn diameter(&self) -> f64 {
        match self {
            PointCloud::Line(v) => {
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for &x in v {
                    lo = lo.min(x);
                    hi = hi.max(x);
                }
                hi - lo
            }
            PointCloud::Plane(v) => {
                let (mut xlo, mut xhi) = (f64::INFINITY, f64::NEG_INFINITY);
                let (mut ylo, mut yhi) = (f64::INFINITY, f64::NEG_INFINITY);
                for &(x, y) in v {
                    xlo = xlo.min(x);
                    xhi = xhi.max(x);
                    ylo = ylo.min(y);
                    yhi = yhi.max(y);
                }
                (xhi - xlo).hypot(yhi - ylo)
            }
        }
    }

    /// Smallest positive distance between consecutive points.
    fn min_consecutive_gap(&self) -> f64 {
        let mut best = f64::INFINITY;
        match self {
            PointCloud::Line(v) => {
                let mut sorted = v.clone();
                sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
                for w in sorted.windows(2) {
                    let d = w[1] - w[0];
                    if d > 0.0 {
                        best = best.min(d);
                    }
                }
            }
            PointCloud::Plane(v) => {
                for w in v.windows(2) {
                    let d = (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1);
                    if d > 0.0 {
                        best = best.min(d);
                    }
                }
            }
        }
        best
    }

    /// Projection onto a coordinate axis (planar sets only).
    pub fn project(&self, onto_x: bool) -> PointCloud {
        match self {
            PointCloud::Line(v) => PointCloud::Line(v.clone()),
            PointCloud::Plane(v) => PointCloud::Line(
                v.iter()
                    .map(|&(x, y)| if onto_x { x } else { y })
                    .collect(),
            ),
        }
    }
}

/// Scale-window and fallback settings shared by the grid estimators.
#[derive(Clone, Copy, Debug)]
pub struct EstimatorCfg {
    pub eps_min: Option<f64>,
    pub eps_max: Option<f64>,
    pub n_scales: usize,
    /// Fraction of scales dropped at each end of the window.
    pub trim_fraction: f64,
    /// Minimum scale span, in decades, after trimming.
    pub min_decades: f64,
    pub seed: u64,
    /// Cell budget per scale before the Monte Carlo fallback kicks in.
    pub max_cells: usize,
    pub mc_samples: usize,
}

impl Default for EstimatorCfg {
    fn default() -> Self {
        EstimatorCfg {
            eps_min: None,
            eps_max: None,
            n_scales: 32,
            trim_fraction: 0.1,
            min_decades: 2.5,
            seed: 0x6e696c66,
            max_cells: 50_000_000,
            mc_samples: 10_000_000,
        }
    }
}

fn scale_ladder(cloud: &PointCloud, cfg: &EstimatorCfg) -> Result<Vec<f64>, EstimateError> {
    let diam = cloud.diameter();
    if !(diam > 0.0) {
        return Err(EstimateError::DegenerateInput);
    }
    let gap = cloud.min_consecutive_gap();
    let eps_min = cfg.eps_min.unwrap_or_else(|| (3.0 * gap).max(diam * 1e-13));
    let eps_max = cfg.eps_max.unwrap_or(diam / 8.0);
    if !(eps_min.is_finite() && eps_min > 0.0 && eps_max > eps_min) {
        return Err(EstimateError::InsufficientScaleRange {
            decades: 0.0,
            need: cfg.min_decades,
        });
    }
    let decades = (eps_max / eps_min).log10();
    if decades < cfg.min_decades {
        return Err(EstimateError::InsufficientScaleRange {
            decades,
            need: cfg.min_decades,
        });
    }
    let n = cfg.n_scales.max(8);
    let scales: Vec<f64> = (0..n)
        .map(|k| {
            let t = k as f64 / (n - 1) as f64;
            eps_min * (eps_max / eps_min).powf(t)
        })
        .collect();
    let trim = ((n as f64) * cfg.trim_fraction).ceil() as usize;
    if 2 * trim + 8 > n {
        return Err(EstimateError::InsufficientScaleRange {
            decades: 0.0,
            need: cfg.min_decades,
        });
    }
    Ok(scales[trim..n - trim].to_vec())
}

/// Scale window adapted to an orbit accumulating at a point: scales above
/// the first (largest) gap only see a rectifiable arc and bias the slope
/// toward 1, scales below a few times the last gap are saturated. Returns
/// `(eps_min, eps_max)` suggestions for [`EstimatorCfg`].
pub fn orbit_scale_window(points: &PointCloud) -> (Option<f64>, Option<f64>) {
    let gaps: Vec<f64> = match points {
        PointCloud::Line(v) => v
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .filter(|d| *d > 0.0)
            .collect(),
        PointCloud::Plane(v) => v
            .windows(2)
            .map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1))
            .filter(|d| *d > 0.0)
            .collect(),
    };
    if gaps.len() < 2 {
        return (None, None);
    }
    let first = gaps[0];
    let last = *gaps.last().unwrap();
    let diam = points.diameter();
    let eps_max = (2.0 * first).min(diam / 8.0);
    let eps_min = (10.0 * last).min(eps_max / 400.0);
    (Some(eps_min), Some(eps_max))
}

/// Ordinary least squares of `y` on `x`: slope, intercept, slope stderr, R^2.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss_res = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let r = y - (intercept + slope * x);
        ss_res += r * r;
    }
    let dof = (xs.len().max(3) - 2) as f64;
    let stderr = (ss_res / dof / sxx).sqrt();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    (slope, intercept, stderr, r2)
}

// ---------------------------------------------------------------------------
// box counting
// ---------------------------------------------------------------------------

fn count_boxes(cloud: &PointCloud, eps: f64) -> usize {
    // indices are taken relative to the smallest coordinate so deep
    // geometric orbits stay within integer range
    match cloud {
        PointCloud::Line(v) => {
            let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
            let mut cells: Vec<i128> =
                v.iter().map(|&x| ((x - lo) / eps).floor() as i128).collect();
            cells.sort_unstable();
            cells.dedup();
            cells.len()
        }
        PointCloud::Plane(v) => {
            let xlo = v.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
            let ylo = v.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
            let mut cells: Vec<(i128, i128)> = v
                .iter()
                .map(|&(x, y)| {
                    (
                        ((x - xlo) / eps).floor() as i128,
                        ((y - ylo) / eps).floor() as i128,
                    )
                })
                .collect();
            cells.sort_unstable();
            cells.dedup();
            cells.len()
        }
    }
}

/// Grid box-counting estimate: slope of `log N(eps)` against `log(1/eps)`.
pub fn estimate_dim_boxcount(
    cloud: &PointCloud,
    cfg: &EstimatorCfg,
) -> Result<DimensionEstimate, EstimateError> {
    if cloud.is_empty() {
        return Err(EstimateError::DegenerateInput);
    }
    if cloud.diameter() == 0.0 {
        // a single point has dimension zero
        return Ok(DimensionEstimate {
            value: 0.0,
            method: Method::BoxCount,
            fit: None,
        });
    }
    let scales = scale_ladder(cloud, cfg)?;
    let counts = map_ordered(scales.clone(), |eps| count_boxes(cloud, eps));
    // drop saturated scales: counts near the point total mean the set is
    // fully resolved there and the slope flattens toward zero; counts
    // below a handful of boxes are pure noise
    let n_points = cloud.len() as f64;
    let mut kept: Vec<(f64, usize)> = Vec::new();
    for frac in [0.35, 0.6, 1.01] {
        kept = scales
            .iter()
            .zip(&counts)
            .filter(|(_, &c)| (c as f64) <= frac * n_points && c >= 8)
            .map(|(&e, &c)| (e, c))
            .collect();
        if kept.len() >= 8 {
            break;
        }
    }
    if kept.len() < 3 {
        kept = scales.iter().zip(&counts).map(|(&e, &c)| (e, c)).collect();
    }
    let xs: Vec<f64> = kept.iter().map(|(e, _)| -(e.ln())).collect();
    let ys: Vec<f64> = kept.iter().map(|(_, c)| (*c as f64).ln()).collect();
    let (slope, _, stderr, r2) = fit_line(&xs, &ys);
    Ok(DimensionEstimate {
        value: slope.clamp(0.0, 2.0),
        method: Method::BoxCount,
        fit: Some(FitDiagnostics {
            epsilon_range: (kept[0].0, kept[kept.len() - 1].0),
            n_scales: kept.len(),
            slope_stderr: stderr,
            r_squared: r2,
        }),
    })
}

// ---------------------------------------------------------------------------
// Minkowski sausage
// ---------------------------------------------------------------------------

/// Exact length of the union of intervals `[x - eps, x + eps]`.
fn sausage_length_1d(sorted: &[f64], eps: f64) -> f64 {
    let mut total = 0.0;
    let mut lo = sorted[0] - eps;
    let mut hi = sorted[0] + eps;
    for &x in &sorted[1..] {
        if x - eps > hi {
            total += hi - lo;
            lo = x - eps;
        }
        hi = x + eps;
    }
    total + (hi - lo)
}

/// Sausage area on an implicit raster of cell `eps/8`: each point cell is
/// dilated by the disk of radius `eps`, and distinct covered cells are
/// counted. Points are first snapped to the raster, which caps the work
/// per scale at the number of occupied cells.
fn sausage_area_2d(points: &[(f64, f64)], eps: f64, cfg: &EstimatorCfg) -> f64 {
    let cell = eps / 8.0;
    let xlo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let ylo = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let mut snapped: Vec<(i128, i128)> = points
        .iter()
        .map(|&(x, y)| {
            (
                ((x - xlo) / cell).floor() as i128,
                ((y - ylo) / cell).floor() as i128,
            )
        })
        .collect();
    snapped.sort_unstable();
    snapped.dedup();

    // disk offsets in cell units: center distance <= 8 cells
    let r = 8i128;
    let mut offsets = Vec::new();
    for di in -r..=r {
        for dj in -r..=r {
            if di * di + dj * dj <= r * r {
                offsets.push((di, dj));
            }
        }
    }
    if snapped.len().saturating_mul(offsets.len()) > cfg.max_cells {
        return sausage_area_monte_carlo(points, eps, cfg);
    }
    let mut covered: HashSet<(i128, i128)> =
        HashSet::with_capacity(snapped.len() * offsets.len() / 4);
    for &(i, j) in &snapped {
        for &(di, dj) in &offsets {
            covered.insert((i + di, j + dj));
        }
    }
    covered.len() as f64 * cell * cell
}

/// Monte Carlo sausage area over the inflated bounding box, with a seeded
/// generator so repeated runs agree bit for bit.
fn sausage_area_monte_carlo(points: &[(f64, f64)], eps: f64, cfg: &EstimatorCfg) -> f64 {
    let (mut xlo, mut xhi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut ylo, mut yhi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        xlo = xlo.min(x);
        xhi = xhi.max(x);
        ylo = ylo.min(y);
        yhi = yhi.max(y);
    }
    xlo -= eps;
    xhi += eps;
    ylo -= eps;
    yhi += eps;
    // bucket grid at cell = eps for O(1) membership queries
    let inv = 1.0 / eps;
    let mut buckets: HashSet<(i64, i64)> = HashSet::with_capacity(points.len());
    let key = |x: f64, y: f64| ((x * inv).floor() as i64, (y * inv).floor() as i64);
    for &(x, y) in points {
        buckets.insert(key(x, y));
    }
    let grid: Vec<(i64, i64)> = buckets.iter().copied().collect();
    let mut cell_points: std::collections::HashMap<(i64, i64), Vec<(f64, f64)>> =
        std::collections::HashMap::with_capacity(grid.len());
    for &(x, y) in points {
        cell_points.entry(key(x, y)).or_default().push((x, y));
    }
    let near = |x: f64, y: f64| -> bool {
        let (ci, cj) = key(x, y);
        for di in -1..=1 {
            for dj in -1..=1 {
                if let Some(pts) = cell_points.get(&(ci + di, cj + dj)) {
                    for &(px, py) in pts {
                        if (px - x).hypot(py - y) < eps {
                            return true;
                        }
                    }
                }
            }
        }
        false
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (eps.to_bits().rotate_left(17)));
    let mut hits = 0usize;
    for _ in 0..cfg.mc_samples {
        let x = rng.gen_range(xlo..xhi);
        let y = rng.gen_range(ylo..yhi);
        if near(x, y) {
            hits += 1;
        }
    }
    (xhi - xlo) * (yhi - ylo) * hits as f64 / cfg.mc_samples as f64
}

/// Minkowski-sausage estimate: fit of `log |A_eps|` against `log eps`,
/// with dimension `N - slope` for a set in dimension `N`.
pub fn estimate_dim_sausage(
    cloud: &PointCloud,
    cfg: &EstimatorCfg,
) -> Result<DimensionEstimate, EstimateError> {
    if cloud.is_empty() {
        return Err(EstimateError::DegenerateInput);
    }
    if cloud.diameter() == 0.0 {
        return Ok(DimensionEstimate {
            value: 0.0,
            method: Method::Sausage,
            fit: None,
        });
    }
    let scales = scale_ladder(cloud, cfg)?;
    let (areas, ambient): (Vec<f64>, f64) = match cloud {
        PointCloud::Line(v) => {
            let mut sorted = v.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            (
                map_ordered(scales.clone(), |eps| sausage_length_1d(&sorted, eps)),
                1.0,
            )
        }
        PointCloud::Plane(v) => (
            map_ordered(scales.clone(), |eps| sausage_area_2d(v, eps, cfg)),
            2.0,
        ),
    };
    // drop saturated scales where the sausage is mostly disjoint balls:
    // the measure is capped by n * |ball(eps)| and approaching that cap
    // flattens the slope toward the ambient dimension
    let n_points = cloud.len() as f64;
    let ball = |eps: f64| {
        if ambient > 1.5 {
            std::f64::consts::PI * eps * eps
        } else {
            2.0 * eps
        }
    };
    let mut kept: Vec<(f64, f64)> = Vec::new();
    for frac in [0.55, 0.8, f64::INFINITY] {
        kept = scales
            .iter()
            .zip(&areas)
            .filter(|(&e, &a)| a < frac * n_points * ball(e) && a > 0.0)
            .map(|(&e, &a)| (e, a))
            .collect();
        if kept.len() >= 8 {
            break;
        }
    }
    if kept.len() < 3 {
        kept = scales.iter().zip(&areas).map(|(&e, &a)| (e, a)).collect();
    }
    let xs: Vec<f64> = kept.iter().map(|(e, _)| e.ln()).collect();
    let ys: Vec<f64> = kept.iter().map(|(_, a)| a.ln()).collect();
    let (slope, _, stderr, r2) = fit_line(&xs, &ys);
    Ok(DimensionEstimate {
        value: (ambient - slope).clamp(0.0, 2.0),
        method: Method::Sausage,
        fit: Some(FitDiagnostics {
            epsilon_range: (kept[0].0, kept[kept.len() - 1].0),
            n_scales: kept.len(),
            slope_stderr: stderr,
            r_squared: r2,
        }),
    })
}

// ---------------------------------------------------------------------------
// increment-exponent regression
// ---------------------------------------------------------------------------

/// Window for the increment regression; pairs with `x` outside it are
/// dropped. By default the largest fifth of the range is discarded, where
/// higher-order corrections still bend the log-log line.
#[derive(Clone, Copy, Debug, Default)]
pub struct IncrementCfg {
    pub max_x: Option<f64>,
    pub min_x: Option<f64>,
}

/// Increment-exponent fit result.
#[derive(Clone, Debug)]
pub struct IncrementFit {
    pub alpha: f64,
    pub fit: FitDiagnostics,
    /// Set when the fitted exponent is about 1, i.e. geometric decay.
    pub hyperbolic: bool,
}

/// Least-squares fit of `log(x_k - x_{k+1})` against `log x_k` for a
/// strictly decreasing positive sequence.
pub fn estimate_increment_exponent(
    seq: &[f64],
    cfg: &IncrementCfg,
) -> Result<IncrementFit, EstimateError> {
    if seq.len() < 50 {
        return Err(EstimateError::TooShort {
            need: 50,
            got: seq.len(),
        });
    }
    for (k, w) in seq.windows(2).enumerate() {
        if !(w[0] > 0.0) || w[1] >= w[0] {
            return Err(EstimateError::NonMonotone(k));
        }
    }
    let max_x = cfg.max_x.unwrap_or(seq[seq.len() / 5]);
    let min_x = cfg.min_x.unwrap_or(0.0);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for w in seq.windows(2) {
        if w[0] > max_x || w[0] < min_x {
            continue;
        }
        xs.push(w[0].ln());
        ys.push((w[0] - w[1]).ln());
    }
    if xs.len() < 25 {
        return Err(EstimateError::TooShort {
            need: 25,
            got: xs.len(),
        });
    }
    let (alpha, _, stderr, r2) = fit_line(&xs, &ys);
    Ok(IncrementFit {
        alpha,
        hyperbolic: alpha < 1.05,
        fit: FitDiagnostics {
            epsilon_range: (xs[xs.len() - 1].exp(), xs[0].exp()),
            n_scales: xs.len(),
            slope_stderr: stderr,
            r_squared: r2,
        },
    })
}

/// Dimension from an increment fit: `1 - 1/alpha`, clamped at 0 for the
/// hyperbolic regime.
pub fn dim_from_increment(fit: &IncrementFit) -> DimensionEstimate {
    DimensionEstimate {
        value: (1.0 - 1.0 / fit.alpha).max(0.0),
        method: Method::IncrementRegression,
        fit: Some(fit.fit),
    }
}
