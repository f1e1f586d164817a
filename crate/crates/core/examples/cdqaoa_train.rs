//! Searching generator sequences with the autoregressive policy while the
//! durations of each sampled sequence are optimized.
//!
//! Run with `cargo run --release --example cdqaoa_train`.

use cdqaoa::contopt::{worker_pool, SolverConfig};
use cdqaoa::harness::{default_actions, train_cdqaoa};
use cdqaoa::problem::{ControlProblem, ProblemOptions};
use cdqaoa::rl_policy::{sequence_space_size, TrainConfig};
use cdqaoa::spin_ops::{ModelKind, ModelSpec};

fn main() -> cdqaoa::Result<()> {
    let labels = default_actions(ModelKind::IsingHalf);
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    let p = ControlProblem::build(&ModelSpec::new(ModelKind::IsingHalf, 8), &refs, &ProblemOptions::default())?;
    let q = 3;
    println!("{} actions, {} legal sequences of length {q}", labels.len(), sequence_space_size(labels.len(), q));

    let cfg = TrainConfig { iterations: 15, batch_size: 32, hidden: vec![32, 32], seed: 3, ..TrainConfig::default() };
    let st = train_cdqaoa(&p, q, 4.5, &cfg, &SolverConfig::default(), &worker_pool(2)?, |log, _| {
        println!(
            "iter {:2}  mean reward {:.4}  best {:.4}  entropy {:.3}  unique {}",
            log.iteration, log.mean_reward, log.best_reward, log.entropy, log.unique_sequences
        );
        Ok(())
    })?;
    let best = st.best.expect("at least one iteration");
    let names: Vec<&str> = best.sequence.iter().map(|&a| labels[a].as_str()).collect();
    let psi = p.evolve(&best.sequence, &best.alphas)?;
    println!("best {names:?} durations {:.3?} E/E_GS={:.5}", best.alphas, p.energy_ratio(&psi));
    Ok(())
}
