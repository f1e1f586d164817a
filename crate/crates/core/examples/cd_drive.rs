//! Variational counterdiabatic driving against plain adiabatic driving on
//! the spin-1 chain.
//!
//! Run with `cargo run --release --example cd_drive`.

use cdqaoa::gauge_cd::{run_adiabatic, run_cd_drive, DriveConfig};
use cdqaoa::harness::default_ansatz;
use cdqaoa::problem::{ControlProblem, ProblemOptions};
use cdqaoa::spin_ops::{ModelKind, ModelSpec};

fn main() -> cdqaoa::Result<()> {
    let ansatz = default_ansatz(ModelKind::IsingOne);
    let refs: Vec<&str> = ansatz.iter().map(String::as_str).collect();
    let mut labels = vec!["H1", "H2"];
    labels.extend(&refs);
    let p = ControlProblem::build(&ModelSpec::new(ModelKind::IsingOne, 6), &labels, &ProblemOptions::default())?;

    println!("   T   adiabatic E/E_GS  F      CD E/E_GS  F      CD norm density");
    for total in [2.0, 4.0, 8.0, 12.0] {
        let cfg = DriveConfig { total, ..DriveConfig::default() };
        let ad = run_adiabatic(&p, &cfg)?;
        let cd = run_cd_drive(&p, &refs, &cfg)?;
        println!(
            "{total:5.1}  {:.5}  {:.4}    {:.5}  {:.4}    {:.4}",
            ad.energy_ratio, ad.fidelity, cd.energy_ratio, cd.fidelity, cd.norm_density
        );
    }

    let cd = run_cd_drive(&p, &refs, &DriveConfig { total: 4.0, ..DriveConfig::default() })?;
    println!("gauge coefficients along T=4 ({})", ansatz.join(", "));
    for (t, beta) in cd.betas.iter().step_by(4) {
        println!("t={t:.2} {beta:+.4?}");
    }
    Ok(())
}
