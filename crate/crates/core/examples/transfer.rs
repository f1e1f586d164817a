//! Applying sequences found on a small chain to longer chains.
//!
//! Run with `cargo run --release --example transfer`.

use cdqaoa::contopt::worker_pool;
use cdqaoa::harness::{reoptimize_policy, transfer_eval, DurationPolicy, ExperimentConfig};
use cdqaoa::spin_ops::{ModelKind, ModelSpec};

fn main() -> cdqaoa::Result<()> {
    let cfg = ExperimentConfig::default();
    let template = ModelSpec::new(ModelKind::IsingHalf, 12);
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let protocols = vec![s(&["Y|Z", "Y", "X|Y"]), s(&["Y", "X|Y", "Y|Z"]), s(&["X", "Y", "X|Y"])];
    let sizes = [8, 10, 12, 14];
    let pool = worker_pool(2)?;

    let r = transfer_eval(&template, &cfg, &protocols, &sizes, 4.5, &reoptimize_policy(&cfg.solver), &pool)?;
    for (p, row) in r.protocols.iter().zip(&r.energy_density) {
        println!("{:<16} E/N per size {row:.5?}", p.join(" "));
    }
    println!("spread per size {:.5?}", r.ranges.iter().map(|(lo, hi)| hi - lo).collect::<Vec<_>>());

    // Durations optimized at N=12, reused unchanged.
    let fixed = DurationPolicy::Fixed(r.durations.iter().map(|d| d[2].clone()).collect());
    let reuse = transfer_eval(&template, &cfg, &protocols, &sizes, 4.5, &fixed, &pool)?;
    println!("reused durations, best E/N per size {:.5?}", reuse.ranges.iter().map(|r| r.0).collect::<Vec<_>>());
    Ok(())
}
