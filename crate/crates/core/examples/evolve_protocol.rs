//! Applying a fixed protocol, measuring the final state and round-tripping
//! the protocol through a CSV table.
//!
//! Run with `cargo run --example evolve_protocol`.

use cdqaoa::dynamics::trace_protocol;
use cdqaoa::harness::ProtocolTable;
use cdqaoa::problem::{ControlProblem, ProblemOptions};
use cdqaoa::spin_ops::{ModelKind, ModelSpec};

fn main() -> cdqaoa::Result<()> {
    let model = ModelSpec::new(ModelKind::IsingOne, 6);
    let p = ControlProblem::build(&model, &["H1", "H2", "Y", "X|Y"], &ProblemOptions::default())?;
    println!("sector dimension {}, E_GS/N = {:.6}", p.basis.dim(), p.ground_energy() / 6.0);

    let seq = p.actions.sequence(&[2, 0, 3, 1], vec![0.6, 0.9, 0.4, 1.1])?;
    let psi = trace_protocol(&seq, &p.initial, &p.actions, 0.5, |t, psi| {
        println!("t={t:.2}  E/E_GS={:+.4}  F={:.4}", p.energy_ratio(psi), p.fidelity(psi));
    })?;
    println!("half-chain entropy {:.4}", p.entropy(&psi).unwrap_or(f64::NAN));

    let file = std::env::temp_dir().join("cdqaoa_example_protocol.csv");
    ProtocolTable::from_sequence(&seq, &["Y".into(), "X|Y".into()]).write_csv(&file)?;
    let back = ProtocolTable::read_csv(&file)?.to_sequence()?;
    let replay = p.evolve(&p.actions.indices(&back)?, &back.durations)?;
    println!("replayed from {}: E/E_GS={:.9}", file.display(), p.energy_ratio(&replay));
    Ok(())
}
