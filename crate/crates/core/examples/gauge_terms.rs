//! Generating the imaginary, translation- and parity-symmetric operators
//! used as gauge-potential terms, and naming them against the catalog.
//!
//! Run with `cargo run --example gauge_terms`.

use cdqaoa::spin_ops::{catalog, ModelKind, ModelSpec, SiteOp};
use cdqaoa::symmetry::{equivalent, generate_gauge_terms, GaugeGenOptions, SymmetrySpec};

fn main() -> cdqaoa::Result<()> {
    let elementary = [SiteOp::Plus, SiteOp::Minus, SiteOp::Z];
    for kind in [ModelKind::IsingHalf, ModelKind::IsingOne] {
        let model = ModelSpec::new(kind, 4);
        let known = ["Y", "XY", "YZ", "X|Y", "Y|Z"];
        for order in 1..=2 {
            let terms = generate_gauge_terms(order, &elementary, SymmetrySpec::translation_parity(), &model, GaugeGenOptions::default())?;
            let names: Vec<String> = terms
                .iter()
                .map(|t| {
                    known
                        .iter()
                        .filter_map(|l| catalog(l, &model).ok().map(|c| (l, c)))
                        .find(|(_, c)| equivalent(t, c).unwrap_or(false))
                        .map_or_else(|| format!("<{} terms>", t.terms.len()), |(l, _)| l.to_string())
                })
                .collect();
            println!("{kind} order {order}: {}", names.join(", "));
        }
    }
    Ok(())
}
