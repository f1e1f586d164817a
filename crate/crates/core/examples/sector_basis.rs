//! Symmetry-reduced bases for the spin chains and the collective-spin model.
//!
//! Run with `cargo run --example sector_basis`.

use cdqaoa::spin_ops::Spin;
use cdqaoa::symmetry::{build_sector, SymmetrySpec};

fn main() -> cdqaoa::Result<()> {
    for n in [12, 14, 16, 18] {
        let b = build_sector(n, Spin::Half, SymmetrySpec::translation_parity())?;
        println!("spin-1/2 N={n}: {} of {} states", b.dim(), b.full_dim().unwrap_or(0));
    }
    for n in [6, 8, 10] {
        let b = build_sector(n, Spin::One, SymmetrySpec::translation_parity())?;
        println!("spin-1   N={n}: {} of {} states", b.dim(), b.full_dim().unwrap_or(0));
    }
    let lmg = build_sector(501, Spin::Half, SymmetrySpec::lmg())?;
    println!("LMG      N=501: {} states", lmg.dim());

    // A product state expressed in the sector and lifted back to the full space.
    let b = build_sector(6, Spin::One, SymmetrySpec::translation_parity())?;
    let psi = b.product_state(&[0; 6])?;
    let full = b.lift(&psi)?;
    let weight: f64 = full.iter().map(|z| z.norm_sqr()).sum();
    println!("polarized spin-1 state: sector norm 1, lifted norm {weight:.12}");
    Ok(())
}
