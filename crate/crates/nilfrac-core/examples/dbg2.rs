use nilfrac_core::boxdim::*;
use nilfrac_core::infinity::*;
use nilfrac_core::model::NilpotentModel;
use nilfrac_core::unitmap::OrbitCfg;

fn main() {
    let model = NilpotentModel::from_i64(1, 2, 1, 3).unwrap();
    let branch = chart_branch(&model, Chart::U1, 8).unwrap();
    let sys = compactify(&model, Chart::U1);
    let field = sys.field.map_coeffs(|c| nilfrac_core::coeff::Coeff::to_f64(c));
    let curve = |t: f64| (branch.series_eval)(t);
    let cfg = OrbitCfg { floor: 1e-9, max_iter: 400_000, time_span: 0.0, ..Default::default() };
    let mut best: Option<nilfrac_core::unitmap::CurveOrbit> = None;
    for seed in [0.4, -0.4f64] {
        if !curve(seed).is_finite() { continue; }
        let dir = nilfrac_core::unitmap::inward_time_span(&field, &curve, true, seed);
        if let Ok(o) = nilfrac_core::unitmap::iterate_on_curve(&field, &curve, true, seed, &OrbitCfg { time_span: dir, ..cfg }) {
            if best.as_ref().map_or(true, |b| o.independent.len() > b.independent.len()) { best = Some(o); }
        }
    }
    let o = best.unwrap();
    println!("{} pts, v from {} to {}", o.independent.len(), o.independent[0], o.independent.last().unwrap());
    let cloud = PointCloud::Plane(o.points.clone());
    // manual ladder scan with local slopes
    let vmin = o.independent.last().unwrap().abs();
    let g_min = vmin.powi(6);
    let g_max: f64 = (o.independent[0] - o.independent[1]).abs();
    println!("gap range [{:.3e}, {:.3e}]", g_min, g_max);
    let n = 25;
    let mut data = vec![];
    for k in 0..n {
        let t = k as f64 / (n - 1) as f64;
        let eps = g_min * (g_max / g_min).powf(t);
        let est_cfg = EstimatorCfg { eps_min: Some(eps), eps_max: Some(eps * 1.0001), n_scales: 8, trim_fraction: 0.0, min_decades: 0.0, ..Default::default() };
        let _ = est_cfg;
        data.push(eps);
    }
    // count boxes directly через estimate? use public API: boxcount with narrow windows is awkward;
    // rebuild counts via a crude local count on the plane
    for w in data.windows(2) {
        let (e1, e2) = (w[0], w[1]);
        let c1 = count_cells(&o.points, e1);
        let c2 = count_cells(&o.points, e2);
        let slope = ((c1 as f64).ln() - (c2 as f64).ln()) / (e2.ln() - e1.ln());
        println!("eps {:9.3e} N {:8} local slope {:.3}", e1, c1, slope);
    }
}

fn count_cells(pts: &[(f64, f64)], eps: f64) -> usize {
    let xlo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let ylo = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let mut cells: Vec<(i128, i128)> = pts.iter().map(|&(x, y)| (((x - xlo) / eps).floor() as i128, ((y - ylo) / eps).floor() as i128)).collect();
    cells.sort_unstable(); cells.dedup(); cells.len()
}
