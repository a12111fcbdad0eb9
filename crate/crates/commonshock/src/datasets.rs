//! Built-in synthetic dataset configurations.
//!
//! Three two-triangle (15 x 15, p = 1.8) models exercising different
//! dependence geometries:
//!
//! 1. cell-wise umbrella and array-specific shocks,
//! 2. row-wise umbrella and array-specific shocks,
//! 3. split diagonal-wise umbrella shocks (accident periods split at
//!    `i = 10`) with row-wise array-specific shocks.
//!
//! Each configuration chains its CoV tables so the balance conditions hold
//! by construction: array-specific CoVs are `sqrt(C/K)` times the umbrella
//! CoVs of the matching subsets, and idiosyncratic CoVs are `sqrt(K)` times
//! the array-specific CoVs, giving `nu_ij = C nu_umb` and
//! `nu_ij = K nu_spec` exactly.

use crate::config::{
    ArraySpecificConfig, ArraysConfig, MaskConfig, MaskPreset, ModelConfig, PartitionConfig,
    TableConfig, UmbrellaConfig, ValueRule,
};
use crate::error::{Error, Result};

const SIZE: u32 = 15;

/// Triangle-1 idiosyncratic means: a first-row profile growing 2% per
/// accident period.
const IDIO_MEAN_FIRST_ROW_1: [f64; 15] = [
    500.0, 1000.0, 1500.0, 2000.0, 2000.0, 1000.0, 700.0, 500.0, 400.0, 200.0, 100.0, 50.0, 25.0,
    15.0, 10.0,
];

/// Triangle-2 idiosyncratic means: constant down each development column.
const IDIO_MEAN_COLUMNS_2: [f64; 15] = [
    3000.0, 4000.0, 1000.0, 500.0, 400.0, 300.0, 200.0, 100.0, 100.0, 100.0, 100.0, 50.0, 50.0,
    50.0, 50.0,
];

fn idio_mean_rules() -> [ValueRule; 2] {
    [
        ValueRule::FirstRowGrowth {
            first_row: IDIO_MEAN_FIRST_ROW_1.to_vec(),
            row_growth: 1.02,
        },
        ValueRule::PerColumn {
            per_column: IDIO_MEAN_COLUMNS_2.to_vec(),
        },
    ]
}

fn arrays() -> ArraysConfig {
    ArraysConfig {
        count: 2,
        rows: SIZE,
        cols: SIZE,
        mask: MaskConfig::Preset(MaskPreset::Triangle),
        masks: None,
    }
}

/// Emits one of the three built-in dataset configurations.
pub fn gen_dataset(which: u8) -> Result<ModelConfig> {
    match which {
        1 => Ok(dataset_1()),
        2 => Ok(dataset_2()),
        3 => Ok(dataset_3()),
        other => Err(Error::UnknownDataset(other)),
    }
}

/// Dataset 1: cell-wise dependence.
fn dataset_1() -> ModelConfig {
    let c = [0.6f64.powi(4), 0.3f64.powi(4)];
    let k = [0.33f64.powi(4), 0.45f64.powi(4)];
    // Umbrella CoVs are column profiles scaled by 1/sqrt(C_1).
    let base_cov: [f64; 15] = [
        0.1, 0.06, 0.05, 0.05, 0.06, 0.06, 0.1, 0.15, 0.2, 0.3, 0.45, 0.6, 0.75, 0.9, 0.9,
    ];
    let umb_cov: Vec<f64> = base_cov.iter().map(|v| v / 0.6f64.powi(2)).collect();
    let spec_cov =
        |n: usize| -> Vec<f64> { umb_cov.iter().map(|v| (c[n] / k[n]).sqrt() * v).collect() };
    let idio_cov = |n: usize| -> Vec<f64> { spec_cov(n).iter().map(|v| k[n].sqrt() * v).collect() };
    let [idio_mean_1, idio_mean_2] = idio_mean_rules();

    ModelConfig {
        name: "dataset-1".into(),
        power: 1.8,
        arrays: arrays(),
        partitions: vec![PartitionConfig::CellWise],
        umbrella: vec![UmbrellaConfig {
            partition: 0,
            means: ValueRule::FirstRowGrowth {
                first_row: vec![
                    100.0, 500.0, 1000.0, 1000.0, 1000.0, 1000.0, 500.0, 250.0, 100.0, 50.0,
                    50.0, 50.0, 50.0, 50.0, 50.0,
                ],
                row_growth: 1.02,
            },
            covs: ValueRule::PerColumn {
                per_column: umb_cov.clone(),
            },
        }],
        array_specific: vec![ArraySpecificConfig {
            partition: 0,
            tables: vec![
                TableConfig {
                    means: ValueRule::FirstRowGrowth {
                        first_row: vec![
                            25.0, 50.0, 100.0, 100.0, 100.0, 25.0, 20.0, 20.0, 10.0, 10.0, 10.0,
                            10.0, 10.0, 10.0, 10.0,
                        ],
                        row_growth: 1.02,
                    },
                    covs: ValueRule::PerColumn {
                        per_column: spec_cov(0),
                    },
                },
                TableConfig {
                    means: ValueRule::PerColumn {
                        per_column: vec![
                            1000.0, 1000.0, 1000.0, 500.0, 200.0, 20.0, 10.0, 5.0, 5.0, 5.0, 5.0,
                            5.0, 5.0, 5.0, 5.0,
                        ],
                    },
                    covs: ValueRule::PerColumn {
                        per_column: spec_cov(1),
                    },
                },
            ],
        }],
        idiosyncratic: vec![
            TableConfig {
                means: idio_mean_1,
                covs: ValueRule::PerColumn {
                    per_column: idio_cov(0),
                },
            },
            TableConfig {
                means: idio_mean_2,
                covs: ValueRule::PerColumn {
                    per_column: idio_cov(1),
                },
            },
        ],
        notes: vec![
            "umbrella multiples C = {0.6^4, 0.3^4}; array-specific multiples K = {0.33^4, 0.45^4}".into(),
            "triangle-2 array-specific mean profile lists 14 development periods; the 15th repeats the final value 5".into(),
            "idiosyncratic CoVs equal sqrt(K) times the array-specific CoVs, so the squared-CoV ratios match the balance conditions exactly".into(),
        ],
    }
}

/// Dataset 2: row-wise dependence.
fn dataset_2() -> ModelConfig {
    let c = [0.44f64.powi(4), 0.3f64.powi(4)];
    let k = [0.29f64.powi(4), 0.45f64.powi(4)];
    // Row-subset CoV profile scaled by 1/sqrt(C_1); the printed profile has
    // 14 entries, the 15th repeats the last.
    let base_cov: [f64; 15] = [
        0.1, 0.09, 0.08, 0.09, 0.1, 0.1, 0.11, 0.09, 0.12, 0.1, 0.08, 0.09, 0.08, 0.08, 0.08,
    ];
    let umb_cov: Vec<f64> = base_cov.iter().map(|v| v / 0.44f64.powi(2)).collect();
    let spec_cov =
        |n: usize| -> Vec<f64> { umb_cov.iter().map(|v| (c[n] / k[n]).sqrt() * v).collect() };
    let idio_cov = |n: usize| -> Vec<f64> { spec_cov(n).iter().map(|v| k[n].sqrt() * v).collect() };
    let [idio_mean_1, idio_mean_2] = idio_mean_rules();

    ModelConfig {
        name: "dataset-2".into(),
        power: 1.8,
        arrays: arrays(),
        partitions: vec![PartitionConfig::RowWise],
        umbrella: vec![UmbrellaConfig {
            partition: 0,
            means: ValueRule::FirstRowGrowth {
                first_row: vec![100.0; 15],
                row_growth: 1.02,
            },
            covs: ValueRule::PerRow {
                per_row: umb_cov.clone(),
            },
        }],
        array_specific: vec![ArraySpecificConfig {
            partition: 0,
            tables: vec![
                TableConfig {
                    means: ValueRule::FirstRowGrowth {
                        first_row: vec![25.0; 15],
                        row_growth: 1.02,
                    },
                    covs: ValueRule::PerRow {
                        per_row: spec_cov(0),
                    },
                },
                TableConfig {
                    means: ValueRule::Constant(1000.0),
                    covs: ValueRule::PerRow {
                        per_row: spec_cov(1),
                    },
                },
            ],
        }],
        idiosyncratic: vec![
            TableConfig {
                means: idio_mean_1,
                covs: ValueRule::PerRow {
                    per_row: idio_cov(0),
                },
            },
            TableConfig {
                means: idio_mean_2,
                covs: ValueRule::PerRow {
                    per_row: idio_cov(1),
                },
            },
        ],
        notes: vec![
            "umbrella multiples C = {0.44^4, 0.3^4}; array-specific multiples K = {0.29^4, 0.45^4}".into(),
            "umbrella CoV profile lists 14 row values; the 15th repeats the final value 0.08".into(),
            "idiosyncratic means reuse the shared profiles (triangle-1 growth table, triangle-2 column table)".into(),
            "idiosyncratic CoVs equal sqrt(K) times the array-specific CoVs, so the squared-CoV ratios match the balance conditions exactly".into(),
        ],
    }
}

/// Dataset 3: split diagonal-wise umbrella shocks, row-wise array-specific
/// shocks. The two connectedness classes are the accident-period bands
/// `i <= 10` and `i > 10`.
fn dataset_3() -> ModelConfig {
    let c = [0.45f64.powi(4), 0.38f64.powi(4)];
    let k = [0.31f64.powi(4), 0.5f64.powi(4)];
    let i0 = 10u32;
    // Umbrella means per semi-diagonal: the low band covers t = 1..=15, the
    // high band t = 11..=15.
    let low_means: [f64; 15] = [
        100.0, 102.0, 104.0, 106.0, 108.0, 110.0, 113.0, 115.0, 117.0, 120.0, 117.0, 119.0, 121.0,
        124.0, 126.0,
    ];
    let high_means: [f64; 5] = [146.0, 149.0, 152.0, 153.0, 158.0];
    let low_cov = 0.1 / 0.45f64.powi(2);
    let high_cov = 0.08 / 0.45f64.powi(2);
    let band_cov = |i: u32| if i <= i0 { low_cov } else { high_cov };
    let spec_cov = |n: usize| -> Vec<f64> {
        (1..=SIZE)
            .map(|i| (c[n] / k[n]).sqrt() * band_cov(i))
            .collect()
    };
    let idio_cov = |n: usize| -> Vec<f64> { spec_cov(n).iter().map(|v| k[n].sqrt() * v).collect() };
    let [idio_mean_1, idio_mean_2] = idio_mean_rules();

    ModelConfig {
        name: "dataset-3".into(),
        power: 1.8,
        arrays: arrays(),
        partitions: vec![
            PartitionConfig::SplitDiagonal { i0 },
            PartitionConfig::RowWise,
        ],
        umbrella: vec![UmbrellaConfig {
            partition: 0,
            means: ValueRule::PerSubset {
                per_subset: low_means
                    .iter()
                    .chain(high_means.iter())
                    .copied()
                    .collect(),
            },
            covs: ValueRule::PerSubset {
                per_subset: std::iter::repeat_n(low_cov, 15)
                    .chain(std::iter::repeat_n(high_cov, 5))
                    .collect(),
            },
        }],
        array_specific: vec![ArraySpecificConfig {
            partition: 1,
            tables: vec![
                TableConfig {
                    means: ValueRule::FirstRowGrowth {
                        first_row: vec![25.0; 15],
                        row_growth: 1.02,
                    },
                    covs: ValueRule::PerRow {
                        per_row: spec_cov(0),
                    },
                },
                TableConfig {
                    means: ValueRule::Constant(1000.0),
                    covs: ValueRule::PerRow {
                        per_row: spec_cov(1),
                    },
                },
            ],
        }],
        idiosyncratic: vec![
            TableConfig {
                means: idio_mean_1,
                covs: ValueRule::PerRow {
                    per_row: idio_cov(0),
                },
            },
            TableConfig {
                means: idio_mean_2,
                covs: ValueRule::PerRow {
                    per_row: idio_cov(1),
                },
            },
        ],
        notes: vec![
            "umbrella multiples C = {0.45^4, 0.38^4}; array-specific multiples K = {0.31^4, 0.5^4}".into(),
            "umbrella CoVs are constant over each accident-period band (0.1/0.45^2 for i <= 10, 0.08/0.45^2 for i > 10), matching the two connectedness classes".into(),
            "array-specific means and idiosyncratic means reuse the row-wise dataset's tables".into(),
            "idiosyncratic CoVs equal sqrt(K) times the array-specific CoVs, so the squared-CoV ratios match the balance conditions exactly".into(),
        ],
    }
}
