use nilfrac_core::sweep::Unfolding;
use nilfrac_core::unitmap::{iterate_orbit, OrbitCfg};

#[test]
fn dbg_fold_orbit() {
    let field = Unfolding::Bt.field_f64(0.09, -0.6);
    let x_star = 0.3;
    let cfg = OrbitCfg { floor: 1e-12, max_iter: 60_000, ..Default::default() };
    for side in [-1.0f64, 1.0] {
        let p0 = (x_star + side * 0.12, 0.0);
        match iterate_orbit(&field, p0, &cfg) {
            Ok(o) => {
                let dist: Vec<f64> = o.points.iter().map(|&(x, y)| (x - x_star).hypot(y)).collect();
                println!("side {side}: {} pts, end {:?}, first dists {:?}, last {:?}",
                    o.points.len(), o.termination, &dist[..8.min(dist.len())], dist.last());
            }
            Err(e) => println!("side {side}: err {e}"),
        }
    }
}
