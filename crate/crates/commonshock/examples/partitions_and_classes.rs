//! # Partitions and connectedness
//!
//! Shocks act on partition subsets: rows, columns, diagonals, cells, or
//! custom shapes such as split diagonals. When several partitions act at
//! once, chains of overlapping subsets connect cells into equivalence
//! classes; balanced models must keep shock CoVs constant over each class.
//!
//! Run with: `cargo run --example partitions_and_classes`

use commonshock::{equivalence_classes, ArrayLayout, CellId, Partition, PartitionKind};

fn main() {
    let triangle = ArrayLayout::triangle(15);
    println!(
        "claim triangle, 15 accident periods: {} observed cells\n",
        triangle.len()
    );

    standard_partitions(&triangle);
    single_partition_classes(&triangle);
    row_plus_diagonal(&triangle);
    split_diagonal(&triangle);
}

fn standard_partitions(layout: &ArrayLayout) {
    println!("--- Standard partitions ---\n");
    for kind in [
        PartitionKind::ArrayWide,
        PartitionKind::CellWise,
        PartitionKind::RowWise,
        PartitionKind::ColumnWise,
        PartitionKind::DiagonalWise,
    ] {
        let p = Partition::standard(layout, kind).unwrap();
        println!("{kind:>14}: {} subsets", p.len());
    }
    println!();
}

fn single_partition_classes(layout: &ArrayLayout) {
    println!("--- One partition: classes are the subsets ---\n");
    let rows = Partition::standard(layout, PartitionKind::RowWise).unwrap();
    let classes = equivalence_classes(layout, std::slice::from_ref(&rows));
    println!(
        "row-wise alone: {} classes, sizes {:?}\n",
        classes.len(),
        classes
            .classes()
            .iter()
            .take(5)
            .map(|c| c.len())
            .collect::<Vec<_>>()
    );
}

fn row_plus_diagonal(layout: &ArrayLayout) {
    println!("--- Rows plus diagonals connect the whole array ---\n");
    let rows = Partition::standard(layout, PartitionKind::RowWise).unwrap();
    let diags = Partition::standard(layout, PartitionKind::DiagonalWise).unwrap();
    let classes = equivalence_classes(layout, &[rows, diags]);
    println!(
        "row-wise + diagonal-wise: {} class of {} cells",
        classes.len(),
        classes.classes()[0].len()
    );
    println!("(any two cells are joined by a row step and a diagonal step)\n");
}

fn split_diagonal(layout: &ArrayLayout) {
    println!("--- Split diagonals: two separated bands ---\n");
    let rows = Partition::standard(layout, PartitionKind::RowWise).unwrap();
    let split = Partition::split_diagonal(layout, 10);
    println!(
        "split-diagonal partition at i0 = 10: {} semi-diagonal subsets",
        split.len()
    );
    let classes = equivalence_classes(layout, &[rows, split]);
    println!("together with rows: {} classes", classes.len());
    for (h, class) in classes.classes().iter().enumerate() {
        let lo = class.iter().map(CellId::i).min().unwrap();
        let hi = class.iter().map(CellId::i).max().unwrap();
        println!(
            "  class {}: {} cells, accident periods {lo}..={hi}",
            h + 1,
            class.len()
        );
    }
    println!("\nno subset crosses the i = 10 boundary, so the bands stay apart");
}
