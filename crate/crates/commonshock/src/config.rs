//! Declarative model configuration.
//!
//! A model is described by a JSON document: grid dimensions and masks, a
//! list of partitions, shock tables attached to partitions by index, and
//! per-array idiosyncratic tables. Tables give means and CoVs (not squared)
//! through value rules:
//!
//! * a bare number — constant over all cells,
//! * `{"per-subset": [..]}` — one value per partition subset (shock tables only),
//! * `{"per-row": [..]}` / `{"per-column": [..]}` — indexed by `i` / `j`,
//! * `{"first-row": [..], "row-growth": g}` — `first_row[j] * g^(i-1)`,
//! * `{"per-cell": [[i, j, v], ..]}` — explicit cell values.
//!
//! Shock-table rules must resolve to a single value per subset; a rule that
//! varies inside a subset is rejected with the offending path.

use crate::array::{ArrayLayout, CellId};
use crate::error::{Error, Result};
use crate::model::{ShockLayerSpec, ShockModel};
use crate::partition::{Partition, PartitionKind};
use crate::tweedie::MeanCov;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub power: f64,
    pub arrays: ArraysConfig,
    pub partitions: Vec<PartitionConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub umbrella: Vec<UmbrellaConfig>,
    #[serde(
        default,
        rename = "array-specific",
        skip_serializing_if = "Vec::is_empty"
    )]
    pub array_specific: Vec<ArraySpecificConfig>,
    pub idiosyncratic: Vec<TableConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn default_name() -> String {
    "model".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArraysConfig {
    pub count: usize,
    pub rows: u32,
    pub cols: u32,
    /// Base mask shared by all arrays; partitions and shock tables live on it.
    pub mask: MaskConfig,
    /// Optional per-array masks, each a subset of the base mask.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub masks: Option<Vec<MaskConfig>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MaskConfig {
    Preset(MaskPreset),
    Explicit { cells: Vec<CellId> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaskPreset {
    Triangle,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PartitionConfig {
    ArrayWide,
    CellWise,
    RowWise,
    ColumnWise,
    DiagonalWise,
    SplitDiagonal { i0: u32 },
    Custom { subsets: Vec<Vec<CellId>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UmbrellaConfig {
    /// Index into `partitions`.
    pub partition: usize,
    pub means: ValueRule,
    pub covs: ValueRule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArraySpecificConfig {
    /// Index into `partitions`.
    pub partition: usize,
    /// One table per array.
    pub tables: Vec<TableConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableConfig {
    pub means: ValueRule,
    pub covs: ValueRule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueRule {
    Constant(f64),
    PerSubset {
        #[serde(rename = "per-subset")]
        per_subset: Vec<f64>,
    },
    PerRow {
        #[serde(rename = "per-row")]
        per_row: Vec<f64>,
    },
    PerColumn {
        #[serde(rename = "per-column")]
        per_column: Vec<f64>,
    },
    FirstRowGrowth {
        #[serde(rename = "first-row")]
        first_row: Vec<f64>,
        #[serde(rename = "row-growth")]
        row_growth: f64,
    },
    PerCell {
        #[serde(rename = "per-cell")]
        per_cell: Vec<(u32, u32, f64)>,
    },
}

impl ValueRule {
    /// Value of the rule at one cell; `per-subset` is rejected here.
    fn cell_value(&self, cell: CellId, path: &str) -> Result<f64> {
        let err = |message: String| Error::Config {
            path: path.to_string(),
            message,
        };
        match self {
            ValueRule::Constant(v) => Ok(*v),
            ValueRule::PerSubset { .. } => Err(err(
                "per-subset rules only apply to shock tables".to_string()
            )),
            ValueRule::PerRow { per_row } => {
                per_row.get(cell.i() as usize - 1).copied().ok_or_else(|| {
                    err(format!(
                        "per-row has {} entries but row {} is needed",
                        per_row.len(),
                        cell.i()
                    ))
                })
            }
            ValueRule::PerColumn { per_column } => per_column
                .get(cell.j() as usize - 1)
                .copied()
                .ok_or_else(|| {
                    err(format!(
                        "per-column has {} entries but column {} is needed",
                        per_column.len(),
                        cell.j()
                    ))
                }),
            ValueRule::FirstRowGrowth {
                first_row,
                row_growth,
            } => {
                let base = first_row
                    .get(cell.j() as usize - 1)
                    .copied()
                    .ok_or_else(|| {
                        err(format!(
                            "first-row has {} entries but column {} is needed",
                            first_row.len(),
                            cell.j()
                        ))
                    })?;
                Ok(base * row_growth.powi(cell.i() as i32 - 1))
            }
            ValueRule::PerCell { per_cell } => per_cell
                .iter()
                .find(|&&(i, j, _)| CellId::new(i, j) == cell)
                .map(|&(_, _, v)| v)
                .ok_or_else(|| err(format!("per-cell table has no entry for cell {cell}"))),
        }
    }

    /// Value of the rule on one partition subset. Cell-keyed rules must be
    /// constant over the subset.
    fn subset_value(&self, partition: &Partition, s: usize, path: &str) -> Result<f64> {
        if let ValueRule::PerSubset { per_subset } = self {
            return per_subset.get(s).copied().ok_or_else(|| Error::Config {
                path: path.to_string(),
                message: format!(
                    "per-subset has {} entries but the partition has {} subsets",
                    per_subset.len(),
                    partition.len()
                ),
            });
        }
        let subset = &partition.subsets()[s];
        let mut value = None;
        for &cell in subset {
            let v = self.cell_value(cell, path)?;
            match value {
                None => value = Some(v),
                Some(first) => {
                    if (v - first).abs() > 1e-12 * first.abs().max(v.abs()) {
                        return Err(Error::Config {
                            path: path.to_string(),
                            message: format!(
                                "rule is not constant over subset {s}: {first} vs {v} at cell {cell}"
                            ),
                        });
                    }
                }
            }
        }
        value.ok_or_else(|| Error::Config {
            path: path.to_string(),
            message: format!("subset {s} is empty"),
        })
    }
}

fn mask_to_layout(rows: u32, cols: u32, mask: &MaskConfig, path: &str) -> Result<ArrayLayout> {
    match mask {
        MaskConfig::Preset(MaskPreset::Full) => Ok(ArrayLayout::full(rows, cols)),
        MaskConfig::Preset(MaskPreset::Triangle) => {
            if rows != cols {
                return Err(Error::Config {
                    path: path.to_string(),
                    message: format!("triangle mask needs a square grid, got {rows} x {cols}"),
                });
            }
            Ok(ArrayLayout::triangle(rows))
        }
        MaskConfig::Explicit { cells } => {
            ArrayLayout::from_cells(rows, cols, cells.iter().copied()).map_err(|e| Error::Config {
                path: path.to_string(),
                message: e.to_string(),
            })
        }
    }
}

fn build_partition(base: &ArrayLayout, cfg: &PartitionConfig, path: &str) -> Result<Partition> {
    let reword = |e: Error| Error::Config {
        path: path.to_string(),
        message: e.to_string(),
    };
    match cfg {
        PartitionConfig::ArrayWide => {
            Partition::standard(base, PartitionKind::ArrayWide).map_err(reword)
        }
        PartitionConfig::CellWise => {
            Partition::standard(base, PartitionKind::CellWise).map_err(reword)
        }
        PartitionConfig::RowWise => {
            Partition::standard(base, PartitionKind::RowWise).map_err(reword)
        }
        PartitionConfig::ColumnWise => {
            Partition::standard(base, PartitionKind::ColumnWise).map_err(reword)
        }
        PartitionConfig::DiagonalWise => {
            Partition::standard(base, PartitionKind::DiagonalWise).map_err(reword)
        }
        PartitionConfig::SplitDiagonal { i0 } => Ok(Partition::split_diagonal(base, *i0)),
        PartitionConfig::Custom { subsets } => {
            let sets: Vec<BTreeSet<CellId>> = subsets
                .iter()
                .map(|s| s.iter().copied().collect())
                .collect();
            Partition::custom(base, sets).map_err(reword)
        }
    }
}

fn mean_cov_at(means: &ValueRule, covs: &ValueRule, cell: CellId, path: &str) -> Result<MeanCov> {
    let mu = means.cell_value(cell, &format!("{path}.means"))?;
    let cov = covs.cell_value(cell, &format!("{path}.covs"))?;
    MeanCov::from_cov(mu, cov).map_err(|e| Error::Config {
        path: format!("{path} at cell {cell}"),
        message: e.to_string(),
    })
}

fn subset_mean_cov(
    means: &ValueRule,
    covs: &ValueRule,
    partition: &Partition,
    s: usize,
    path: &str,
) -> Result<MeanCov> {
    let mu = means.subset_value(partition, s, &format!("{path}.means"))?;
    let cov = covs.subset_value(partition, s, &format!("{path}.covs"))?;
    MeanCov::from_cov(mu, cov).map_err(|e| Error::Config {
        path: format!("{path} at subset {s}"),
        message: e.to_string(),
    })
}

impl ModelConfig {
    pub fn from_json(doc: &str) -> Result<Self> {
        serde_json::from_str(doc).map_err(|e| Error::Config {
            path: "$".to_string(),
            message: e.to_string(),
        })
    }

    /// Deterministic pretty-printed JSON with a trailing newline.
    pub fn to_json_pretty(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("config serialization cannot fail");
        out.push('\n');
        out
    }

    /// Resolves the document into a validated [`ShockModel`].
    pub fn resolve(&self) -> Result<ShockModel> {
        let a = &self.arrays;
        if a.count == 0 {
            return Err(Error::Config {
                path: "arrays.count".into(),
                message: "at least one array is required".into(),
            });
        }
        let base = mask_to_layout(a.rows, a.cols, &a.mask, "arrays.mask")?;
        let masks: Vec<ArrayLayout> = match &a.masks {
            None => vec![base.clone(); a.count],
            Some(list) => {
                if list.len() != a.count {
                    return Err(Error::Config {
                        path: "arrays.masks".into(),
                        message: format!("{} masks for {} arrays", list.len(), a.count),
                    });
                }
                list.iter()
                    .enumerate()
                    .map(|(n, m)| {
                        let path = format!("arrays.masks[{n}]");
                        let layout = mask_to_layout(a.rows, a.cols, m, &path)?;
                        if !layout.is_subset_of(&base) {
                            return Err(Error::Config {
                                path,
                                message: "mask is not a subset of the base mask".into(),
                            });
                        }
                        Ok(layout)
                    })
                    .collect::<Result<_>>()?
            }
        };

        let partitions: Vec<Partition> = self
            .partitions
            .iter()
            .enumerate()
            .map(|(r, cfg)| build_partition(&base, cfg, &format!("partitions[{r}]")))
            .collect::<Result<_>>()?;

        let mut umbrella_tables: Vec<Option<Vec<MeanCov>>> = vec![None; partitions.len()];
        for (k, u) in self.umbrella.iter().enumerate() {
            let path = format!("umbrella[{k}]");
            let partition = partitions.get(u.partition).ok_or_else(|| Error::Config {
                path: format!("{path}.partition"),
                message: format!(
                    "references partition {} but only {} are defined",
                    u.partition,
                    partitions.len()
                ),
            })?;
            if umbrella_tables[u.partition].is_some() {
                return Err(Error::Config {
                    path: format!("{path}.partition"),
                    message: format!("partition {} already has an umbrella table", u.partition),
                });
            }
            let table = (0..partition.len())
                .map(|s| subset_mean_cov(&u.means, &u.covs, partition, s, &path))
                .collect::<Result<Vec<_>>>()?;
            umbrella_tables[u.partition] = Some(table);
        }

        let mut specific_tables: Vec<Option<Vec<Vec<MeanCov>>>> = vec![None; partitions.len()];
        for (k, spec) in self.array_specific.iter().enumerate() {
            let path = format!("array-specific[{k}]");
            let partition = partitions
                .get(spec.partition)
                .ok_or_else(|| Error::Config {
                    path: format!("{path}.partition"),
                    message: format!(
                        "references partition {} but only {} are defined",
                        spec.partition,
                        partitions.len()
                    ),
                })?;
            if specific_tables[spec.partition].is_some() {
                return Err(Error::Config {
                    path: format!("{path}.partition"),
                    message: format!(
                        "partition {} already has an array-specific table",
                        spec.partition
                    ),
                });
            }
            if spec.tables.len() != a.count {
                return Err(Error::Config {
                    path: format!("{path}.tables"),
                    message: format!("{} tables for {} arrays", spec.tables.len(), a.count),
                });
            }
            let mut per_array = Vec::with_capacity(a.count);
            for (n, table) in spec.tables.iter().enumerate() {
                let table_path = format!("{path}.tables[{n}]");
                per_array.push(
                    (0..partition.len())
                        .map(|s| {
                            subset_mean_cov(&table.means, &table.covs, partition, s, &table_path)
                        })
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            specific_tables[spec.partition] = Some(per_array);
        }

        let layers: Vec<ShockLayerSpec> = partitions
            .into_iter()
            .zip(umbrella_tables)
            .zip(specific_tables)
            .map(|((partition, umbrella), array_specific)| ShockLayerSpec {
                partition,
                umbrella,
                array_specific,
            })
            .collect();
        for (r, layer) in layers.iter().enumerate() {
            if layer.umbrella.is_none() && layer.array_specific.is_none() {
                return Err(Error::Config {
                    path: format!("partitions[{r}]"),
                    message: "no umbrella or array-specific table references this partition".into(),
                });
            }
        }

        if self.idiosyncratic.len() != a.count {
            return Err(Error::Config {
                path: "idiosyncratic".into(),
                message: format!("{} tables for {} arrays", self.idiosyncratic.len(), a.count),
            });
        }
        let idio: Vec<BTreeMap<CellId, MeanCov>> = self
            .idiosyncratic
            .iter()
            .enumerate()
            .map(|(n, table)| {
                let path = format!("idiosyncratic[{n}]");
                masks[n]
                    .cells()
                    .map(|cell| Ok((cell, mean_cov_at(&table.means, &table.covs, cell, &path)?)))
                    .collect::<Result<BTreeMap<_, _>>>()
            })
            .collect::<Result<_>>()?;

        ShockModel::new(self.power, base, masks, layers, idio)
    }
}

/// Parses a JSON document into a model.
pub fn parse_model(doc: &str) -> Result<ShockModel> {
    ModelConfig::from_json(doc)?.resolve()
}

/// Serializes a model back into an explicit (fully tabulated) configuration.
///
/// Standard partitions keep their kind; custom ones are emitted subset by
/// subset. Re-parsing the emitted document reproduces the model.
pub fn emit_model(model: &ShockModel) -> ModelConfig {
    let base = model.base();
    let mask = detect_mask(base);
    let masks: Vec<MaskConfig> = (0..model.n_arrays())
        .map(|n| detect_mask(model.mask(n).expect("index in range")))
        .collect();
    let all_equal_base = masks.iter().all(|m| m == &mask);

    let partitions = model
        .layers()
        .iter()
        .map(|layer| match layer.partition().kind() {
            PartitionKind::ArrayWide => PartitionConfig::ArrayWide,
            PartitionKind::CellWise => PartitionConfig::CellWise,
            PartitionKind::RowWise => PartitionConfig::RowWise,
            PartitionKind::ColumnWise => PartitionConfig::ColumnWise,
            PartitionKind::DiagonalWise => PartitionConfig::DiagonalWise,
            PartitionKind::Custom => PartitionConfig::Custom {
                subsets: layer
                    .partition()
                    .subsets()
                    .iter()
                    .map(|s| s.iter().copied().collect())
                    .collect(),
            },
        })
        .collect();

    let mut umbrella = Vec::new();
    let mut array_specific = Vec::new();
    for (r, layer) in model.layers().iter().enumerate() {
        let subsets = layer.partition().len();
        if layer.has_umbrella() {
            let params: Vec<MeanCov> = (0..subsets)
                .map(|s| layer.umbrella_param(s).expect("umbrella is present"))
                .collect();
            umbrella.push(UmbrellaConfig {
                partition: r,
                means: ValueRule::PerSubset {
                    per_subset: params.iter().map(|w| w.mu()).collect(),
                },
                covs: ValueRule::PerSubset {
                    per_subset: params.iter().map(|w| w.nu().sqrt()).collect(),
                },
            });
        }
        if layer.has_array_specific() {
            let tables = (0..model.n_arrays())
                .map(|n| {
                    let params: Vec<MeanCov> = (0..subsets)
                        .map(|s| {
                            layer
                                .array_specific_param(n, s)
                                .expect("array-specific is present")
                        })
                        .collect();
                    TableConfig {
                        means: ValueRule::PerSubset {
                            per_subset: params.iter().map(|w| w.mu()).collect(),
                        },
                        covs: ValueRule::PerSubset {
                            per_subset: params.iter().map(|w| w.nu().sqrt()).collect(),
                        },
                    }
                })
                .collect();
            array_specific.push(ArraySpecificConfig {
                partition: r,
                tables,
            });
        }
    }

    let idiosyncratic = (0..model.n_arrays())
        .map(|n| {
            let mask = model.mask(n).expect("index in range");
            let entries: Vec<(CellId, MeanCov)> = mask
                .cells()
                .map(|c| (c, model.idiosyncratic(n, c).expect("mask cell")))
                .collect();
            TableConfig {
                means: ValueRule::PerCell {
                    per_cell: entries
                        .iter()
                        .map(|(c, z)| (c.i(), c.j(), z.mu()))
                        .collect(),
                },
                covs: ValueRule::PerCell {
                    per_cell: entries
                        .iter()
                        .map(|(c, z)| (c.i(), c.j(), z.nu().sqrt()))
                        .collect(),
                },
            }
        })
        .collect();

    ModelConfig {
        name: default_name(),
        power: model.p(),
        arrays: ArraysConfig {
            count: model.n_arrays(),
            rows: base.rows(),
            cols: base.cols(),
            mask,
            masks: (!all_equal_base).then_some(masks),
        },
        partitions,
        umbrella,
        array_specific,
        idiosyncratic,
        notes: Vec::new(),
    }
}

fn detect_mask(layout: &ArrayLayout) -> MaskConfig {
    if *layout == ArrayLayout::full(layout.rows(), layout.cols()) {
        MaskConfig::Preset(MaskPreset::Full)
    } else if layout.rows() == layout.cols() && *layout == ArrayLayout::triangle(layout.rows()) {
        MaskConfig::Preset(MaskPreset::Triangle)
    } else {
        MaskConfig::Explicit {
            cells: layout.cells().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json() -> String {
        r#"{
            "name": "tiny",
            "power": 1.8,
            "arrays": { "count": 1, "rows": 3, "cols": 3, "mask": "triangle" },
            "partitions": [ { "kind": "row-wise" } ],
            "umbrella": [
                { "partition": 0, "means": { "per-subset": [10, 11, 12] }, "covs": { "per-subset": [0.2, 0.2, 0.2] } }
            ],
            "idiosyncratic": [
                { "means": { "first-row": [100, 90, 80], "row-growth": 1.02 }, "covs": 0.1 }
            ]
        }"#
        .to_string()
    }

    #[test]
    fn parses_and_resolves_minimal_config() {
        let model = parse_model(&minimal_json()).unwrap();
        assert_eq!(model.n_arrays(), 1);
        assert_eq!(model.layers().len(), 1);
        let z = model.idiosyncratic(0, CellId::new(2, 1)).unwrap();
        assert!((z.mu() - 102.0).abs() < 1e-12);
        assert!((z.nu() - 0.01).abs() < 1e-15);
        let w = model.umbrella_at(0, CellId::new(2, 1)).unwrap().unwrap();
        assert_eq!(w.mu(), 11.0);
    }

    #[test]
    fn round_trip_parse_emit() {
        let model = parse_model(&minimal_json()).unwrap();
        let emitted = emit_model(&model);
        let reparsed = emitted.resolve().unwrap();
        assert_eq!(model, reparsed);
        // And via the textual form.
        let again = parse_model(&emitted.to_json_pretty()).unwrap();
        assert_eq!(model, again);
    }

    #[test]
    fn unknown_partition_reference_is_path_qualified() {
        let doc = minimal_json().replace("\"partition\": 0", "\"partition\": 5");
        let err = parse_model(&doc).unwrap_err();
        match err {
            Error::Config { path, message } => {
                assert_eq!(path, "umbrella[0].partition");
                assert!(message.contains("partition 5"), "{message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn nonpositive_cov_is_rejected_with_path() {
        let doc = minimal_json().replace("\"covs\": 0.1", "\"covs\": -0.1");
        let err = parse_model(&doc).unwrap_err();
        match err {
            Error::Config { path, .. } => assert!(path.starts_with("idiosyncratic[0]"), "{path}"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn overlapping_custom_subsets_are_rejected() {
        let doc = r#"{
            "power": 1.8,
            "arrays": { "count": 1, "rows": 1, "cols": 3, "mask": "full" },
            "partitions": [ { "kind": "custom", "subsets": [ [[1,1],[1,2]], [[1,2],[1,3]] ] } ],
            "umbrella": [ { "partition": 0, "means": 10, "covs": 0.5 } ],
            "idiosyncratic": [ { "means": 100, "covs": 0.1 } ]
        }"#;
        let err = parse_model(doc).unwrap_err();
        match err {
            Error::Config { path, message } => {
                assert_eq!(path, "partitions[0]");
                assert!(message.contains("(1, 2)"), "{message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn partition_without_tables_is_rejected() {
        let doc = r#"{
            "power": 1.8,
            "arrays": { "count": 1, "rows": 2, "cols": 2, "mask": "full" },
            "partitions": [ { "kind": "row-wise" }, { "kind": "column-wise" } ],
            "umbrella": [ { "partition": 0, "means": 10, "covs": 0.5 } ],
            "idiosyncratic": [ { "means": 100, "covs": 0.1 } ]
        }"#;
        let err = parse_model(doc).unwrap_err();
        match err {
            Error::Config { path, .. } => assert_eq!(path, "partitions[1]"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn umbrella_only_model_is_valid() {
        // No array-specific shocks anywhere.
        let model = parse_model(&minimal_json()).unwrap();
        assert_eq!(model.array_specific_count(), 0);
        assert_eq!(model.umbrella_count(), 1);
    }

    #[test]
    fn rule_varying_inside_subset_is_rejected() {
        // Row-wise partition with a column-varying rule cannot resolve.
        let doc = minimal_json().replace(
            r#""means": { "per-subset": [10, 11, 12] }"#,
            r#""means": { "per-column": [10, 11, 12] }"#,
        );
        let err = parse_model(&doc).unwrap_err();
        match err {
            Error::Config { path, message } => {
                assert_eq!(path, "umbrella[0].means");
                assert!(message.contains("not constant"), "{message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn per_array_masks_must_nest() {
        let doc = r#"{
            "power": 1.8,
            "arrays": {
                "count": 1, "rows": 2, "cols": 2, "mask": { "cells": [[1,1],[1,2]] },
                "masks": [ "full" ]
            },
            "partitions": [ { "kind": "array-wide" } ],
            "umbrella": [ { "partition": 0, "means": 10, "covs": 0.5 } ],
            "idiosyncratic": [ { "means": 100, "covs": 0.1 } ]
        }"#;
        let err = parse_model(doc).unwrap_err();
        match err {
            Error::Config { path, .. } => assert_eq!(path, "arrays.masks[0]"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn json_emission_is_stable() {
        let model = parse_model(&minimal_json()).unwrap();
        let cfg = emit_model(&model);
        assert_eq!(cfg.to_json_pretty(), cfg.to_json_pretty());
        assert!(cfg.to_json_pretty().ends_with('\n'));
    }
}
