//! Speed limit of the collective-spin model versus field, and the ground
//! state overlap of the polarized initial state.
//!
//! Run with `cargo run --release --example lmg_speed_limit`.

use cdqaoa::harness::qsl_duration_grid;
use cdqaoa::lmg::{linear_fit, overlap_scan, qsl_scan, QslScanConfig};

fn main() -> cdqaoa::Result<()> {
    let n = 101;
    let fields = vec![0.0, 0.1, 0.2, 0.3];
    let pts = qsl_scan(&QslScanConfig::new(n, fields.clone(), qsl_duration_grid(&fields)), 0)?;
    for q in &pts {
        println!("h={:.2}  T_QSL={:?}  E/E_GS={:.5}  F={:.5}", q.h, q.t_qsl, q.energy_ratio, q.fidelity);
    }
    let curve: Vec<(f64, f64)> = pts.iter().filter_map(|q| q.t_qsl.map(|t| (q.h, t))).collect();
    if curve.len() >= 2 {
        let (slope, intercept) = linear_fit(&curve)?;
        println!("T_QSL ~ {intercept:.3} {slope:+.3} h");
    }
    for (h, o) in overlap_scan(n, 1.0, &[0.0, 0.5, 1.0, 2.0, 5.0])? {
        println!("h={h:.1}  ground-manifold weight of the initial state {o:.5}");
    }
    Ok(())
}
