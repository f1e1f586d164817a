//! Conventional QAOA: alternate the two Hamiltonian parts and optimize the
//! step durations under a fixed total time.
//!
//! Run with `cargo run --release --example qaoa`.

use cdqaoa::contopt::{worker_pool, SolverConfig};
use cdqaoa::harness::qaoa_best;
use cdqaoa::problem::{ControlProblem, ProblemOptions};
use cdqaoa::spin_ops::{ModelKind, ModelSpec};

fn main() -> cdqaoa::Result<()> {
    let model = ModelSpec::new(ModelKind::IsingHalf, 10);
    let p = ControlProblem::build(&model, &["H1", "H2"], &ProblemOptions::default())?;
    let pool = worker_pool(2)?;
    for depth in [1, 2, 4, 6] {
        let r = qaoa_best(&p, depth, 6.0, 20, &SolverConfig::default(), 7, &pool)?;
        let psi = p.evolve(&r.record.sequence, &r.record.alphas)?;
        let order = if r.h1_first { "H1 first" } else { "H2 first" };
        println!(
            "p={depth}: E/E_GS={:.5} F={:.4} ({order}) durations {:.3?}",
            p.energy_ratio(&psi),
            p.fidelity(&psi),
            r.record.alphas
        );
    }
    Ok(())
}
