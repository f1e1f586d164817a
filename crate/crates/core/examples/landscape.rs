//! Local optima of the duration landscape of one fixed generator sequence.
//!
//! Run with `cargo run --release --example landscape`.

use cdqaoa::contopt::{landscape_sample, SolverConfig};
use cdqaoa::problem::{ControlProblem, ProblemOptions};
use cdqaoa::spin_ops::{ModelKind, ModelSpec};

fn main() -> cdqaoa::Result<()> {
    let p = ControlProblem::build(&ModelSpec::new(ModelKind::IsingHalf, 10), &["H1", "H2", "Y", "Y|Z"], &ProblemOptions::default())?;
    let idx = [3, 0, 1, 2, 0, 1];
    let mut pts = landscape_sample(&p, &idx, 4.5, 40, &SolverConfig::default(), 11)?;
    pts.sort_by(|a, b| a.energy_density.total_cmp(&b.energy_density));
    println!("hits  E/N        -ln F     entropy");
    let mut k = 0;
    while k < pts.len() {
        let x = &pts[k];
        let hits = pts[k..].iter().take_while(|y| (y.energy_density - x.energy_density).abs() < 1e-6).count();
        println!("{hits:4}  {:.6}  {:.5}  {:.5}", x.energy_density, x.neg_log_fidelity, x.entropy);
        k += hits;
    }
    Ok(())
}
