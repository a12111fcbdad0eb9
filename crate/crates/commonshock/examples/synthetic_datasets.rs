//! # The built-in synthetic datasets
//!
//! Three ready-made two-triangle configurations cover the main dependence
//! geometries: cell-wise, row-wise, and split-diagonal umbrella shocks with
//! row-wise array-specific shocks. All three are auto-balanced by
//! construction; their expected contribution shares are constant over all
//! cells of each triangle.
//!
//! Run with: `cargo run --example synthetic_datasets`

use commonshock::balance::check_auto_balance;
use commonshock::datasets::gen_dataset;
use commonshock::partition::equivalence_classes;
use commonshock::report::expected_contributions_table;

fn main() {
    for which in 1u8..=3 {
        let config = gen_dataset(which).unwrap();
        let model = config.resolve().unwrap();
        println!("=== {} ===", config.name);
        println!(
            "p = {}, {} arrays of {} cells, {} partition layer(s)",
            model.p(),
            model.n_arrays(),
            model.mask(0).unwrap().len(),
            model.layers().len()
        );

        let report = check_auto_balance(&model, 1e-9);
        println!("balanced: {}", report.is_balanced());
        for n in 0..model.n_arrays() {
            let c = report.constants(n).unwrap();
            println!(
                "  triangle {}: C = {:.6}, K = {:.6}, kappa = {:.6}",
                n + 1,
                c.umbrella_multiple.unwrap(),
                c.array_specific_multiple.unwrap(),
                c.kappa
            );
        }

        let classes = equivalence_classes(model.mask(0).unwrap(), model.partitions());
        println!("equivalence classes per triangle: {}", classes.len());

        println!("expected contribution shares:");
        for line in expected_contributions_table(&model)
            .unwrap()
            .lines()
            .skip(1)
        {
            println!("  {line}");
        }
        println!();
    }

    println!("emit a configuration with: commonshock gen-dataset 1 -o dataset1.json");
}
