//! # Auto-balance verification
//!
//! A model is auto-balanced when every component contributes the same
//! proportion of the cell mean everywhere. The check reduces to two ratio
//! conditions on squared CoVs with per-array constants `C` and `K`; the
//! bracket `kappa = 1 + C + K` then scales the idiosyncratic moments to
//! the cell moments. This example builds a balanced model, verifies it,
//! breaks it at one cell and inspects the localized violation report.
//!
//! Run with: `cargo run --example balance_check`

use commonshock::balance::{balanced_cell_moments, check_auto_balance};
use commonshock::config::{emit_model, ValueRule};
use commonshock::datasets::gen_dataset;
use commonshock::report::balance_text;
use commonshock::CellId;

fn main() {
    let model = gen_dataset(1).unwrap().resolve().unwrap();

    println!("--- A balanced model ---\n");
    let report = check_auto_balance(&model, 1e-9);
    print!("{}", balance_text(&report));
    println!();

    let cell = CellId::new(4, 2);
    let direct = model.cell_moments(0, cell).unwrap();
    let via_kappa = balanced_cell_moments(&report, &model, 0, cell).unwrap();
    println!(
        "cell {cell}: kappa * mu = {:.6} vs bracket mean {:.6}",
        via_kappa.mean, direct.mean
    );
    println!(
        "          kappa shrinks CoV^2: {:.6} -> {:.6}\n",
        model.idiosyncratic(0, cell).unwrap().nu(),
        via_kappa.sq_cov
    );

    println!("--- Breaking one CoV by 0.1% ---\n");
    let mut cfg = emit_model(&model);
    match &mut cfg.idiosyncratic[0].covs {
        ValueRule::PerCell { per_cell } => {
            let entry = per_cell
                .iter_mut()
                .find(|(i, j, _)| (*i, *j) == (4, 2))
                .unwrap();
            entry.2 *= 1.001;
        }
        other => panic!("expected explicit per-cell table, got {other:?}"),
    }
    let broken = cfg.resolve().unwrap();
    let report = check_auto_balance(&broken, 1e-9);
    print!("{}", balance_text(&report));

    println!("\nthe verdict is advisory: moments and simulation stay available");
    let still = broken.cell_moments(0, cell).unwrap();
    println!(
        "cell {cell} mean on the unbalanced model: {:.6}",
        still.mean
    );
}
