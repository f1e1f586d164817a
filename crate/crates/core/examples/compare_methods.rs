//! CD-QAOA, QAOA, CD driving and adiabatic driving on one duration grid.
//!
//! Run with `cargo run --release --example compare_methods`.

use cdqaoa::contopt::worker_pool;
use cdqaoa::harness::{run_comparison, ExperimentConfig, Method};

fn main() -> cdqaoa::Result<()> {
    let cfg = ExperimentConfig::from_toml_str(
        r#"
        q = 6
        t_grid = [2.0, 4.0]
        qaoa_restarts = 4
        [model]
        kind = "ising_one"
        n_sites = 6
        [train]
        iterations = 8
        batch_size = 24
        hidden = [32, 32]
        "#,
    )?;
    println!("   T  method      E/E_GS    F        norm density");
    run_comparison(&cfg, &Method::ALL, &worker_pool(2)?, |r| {
        println!("{:4.1}  {:<10} {:.5}  {:.5}  {:.4}  {}", r.total, r.method, r.energy_ratio, r.fidelity, r.norm_density, r.sequence.join(" "));
        Ok(())
    })?;
    Ok(())
}
