//! Reproducible Monte Carlo realization of a shock model.
//!
//! Every component draw gets its own random substream, keyed by
//! `(master seed, role, array, layer, subset-or-cell, replication)`. The
//! key is packed injectively into a 256-bit ChaCha seed, so the draw for a
//! given component in a given replication is a pure function of the seed
//! spec, independent of evaluation order. Replications are grouped into
//! fixed-size blocks; workers claim blocks dynamically but partial results
//! are merged in block order, which makes the output bit-identical for any
//! worker count.

use crate::array::CellId;
use crate::error::{Error, Result};
use crate::model::ShockModel;
use crate::tweedie::TweedieParams;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Replications per scheduling block. Fixed so that the reduction tree does
/// not depend on the worker count.
const BLOCK_SIZE: u64 = 64;

/// Master seed for a simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedSpec {
    master: u64,
}

/// Identifies one component draw within one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamLabel {
    Umbrella {
        layer: usize,
        subset: usize,
        replication: u64,
    },
    ArraySpecific {
        array: usize,
        layer: usize,
        subset: usize,
        replication: u64,
    },
    Idiosyncratic {
        array: usize,
        cell: CellId,
        replication: u64,
    },
}

impl SeedSpec {
    pub fn new(master: u64) -> Self {
        Self { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    /// The substream for one labelled draw. Distinct labels map to distinct
    /// ChaCha keys; identical `(seed, label)` pairs reproduce the stream.
    pub fn stream(&self, label: StreamLabel) -> ChaCha8Rng {
        let (role, array, layer, unit, replication) = match label {
            StreamLabel::Umbrella {
                layer,
                subset,
                replication,
            } => (0u32, 0u32, layer as u32, subset as u64, replication),
            StreamLabel::ArraySpecific {
                array,
                layer,
                subset,
                replication,
            } => (1, array as u32, layer as u32, subset as u64, replication),
            StreamLabel::Idiosyncratic {
                array,
                cell,
                replication,
            } => (
                2,
                array as u32,
                0,
                (u64::from(cell.i()) << 32) | u64::from(cell.j()),
                replication,
            ),
        };
        let mut key = [0u8; 32];
        key[0..8].copy_from_slice(&self.master.to_le_bytes());
        key[8..12].copy_from_slice(&((role << 28) | array).to_le_bytes());
        key[12..16].copy_from_slice(&layer.to_le_bytes());
        key[16..24].copy_from_slice(&unit.to_le_bytes());
        key[24..32].copy_from_slice(&replication.to_le_bytes());
        ChaCha8Rng::from_seed(key)
    }
}

/// One summed component of the model, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ComponentKey {
    Umbrella(usize),
    ArraySpecific(usize),
    Idiosyncratic,
}

impl std::fmt::Display for ComponentKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ComponentKey::Umbrella(r) => write!(f, "umbrella[{}]", r + 1),
            ComponentKey::ArraySpecific(r) => write!(f, "array-specific[{}]", r + 1),
            ComponentKey::Idiosyncratic => f.write_str("idiosyncratic"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationOptions {
    /// Concurrent workers; the result does not depend on this.
    pub workers: usize,
    /// Keep per-replication component values for [`realized_contributions`].
    pub retain: bool,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self {
            workers: 1,
            retain: false,
        }
    }
}

/// Raw component values of one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRecord {
    /// `[layer][subset]`; `NaN` where the shock is absent or unused.
    pub umbrella: Vec<Vec<f64>>,
    /// `[layer][array][subset]`; `NaN` where absent or unused.
    pub array_specific: Vec<Vec<Vec<f64>>>,
    /// `[array][cell]`, cells in the result's per-array order.
    pub idiosyncratic: Vec<Vec<f64>>,
    /// Assembled `X` per `[array][cell]`.
    pub totals: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
struct CellAccum {
    sum: f64,
    sum_sq: f64,
    frac_sums: Vec<f64>,
    defined: u64,
    undefined: u64,
}

impl CellAccum {
    fn new(components: usize) -> Self {
        Self {
            sum: 0.0,
            sum_sq: 0.0,
            frac_sums: vec![0.0; components],
            defined: 0,
            undefined: 0,
        }
    }

    fn merge(&mut self, other: &CellAccum) {
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        for (a, b) in self.frac_sums.iter_mut().zip(&other.frac_sums) {
            *a += b;
        }
        self.defined += other.defined;
        self.undefined += other.undefined;
    }
}

/// Per-cell empirical estimates after a run.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub cell: CellId,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// Mean realized fraction per component, `NaN` when every replication
    /// had a zero total at this cell.
    pub mean_fractions: Vec<f64>,
    pub defined: u64,
    pub undefined: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSummary {
    pub components: Vec<ComponentKey>,
    /// One vector of summaries per array, cells in lexicographic order.
    pub arrays: Vec<Vec<CellSummary>>,
}

/// Realized fractions of one component over one array, for one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct ContributionTable {
    pub array: usize,
    pub component: ComponentKey,
    /// `None` marks an undefined fraction (the cell total was exactly zero).
    pub fractions: BTreeMap<CellId, Option<f64>>,
}

/// Output of [`simulate`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    replications: u64,
    components: Vec<ComponentKey>,
    cells: Vec<Vec<CellId>>,
    accum: Vec<Vec<CellAccum>>,
    retained: Option<Vec<ReplicationRecord>>,
}

impl SimulationResult {
    pub fn replications(&self) -> u64 {
        self.replications
    }

    pub fn components(&self) -> &[ComponentKey] {
        &self.components
    }

    /// Cells of array `n` in the order used by records and summaries.
    pub fn cells(&self, n: usize) -> Result<&[CellId]> {
        self.cells
            .get(n)
            .map(Vec::as_slice)
            .ok_or(Error::ArrayOutOfRange {
                array: n,
                count: self.cells.len(),
            })
    }

    pub fn record(&self, replication: usize) -> Result<&ReplicationRecord> {
        let records = self.retained.as_ref().ok_or(Error::NotRetained)?;
        records
            .get(replication)
            .ok_or(Error::ReplicationOutOfRange {
                index: replication,
                count: records.len(),
            })
    }

    pub fn is_retained(&self) -> bool {
        self.retained.is_some()
    }

    /// Per-cell sample means, variances and mean contribution fractions.
    pub fn empirical_summary(&self) -> Result<EmpiricalSummary> {
        if self.replications < 2 {
            return Err(Error::TooFewReplications {
                needed: 2,
                got: self.replications,
            });
        }
        let n_reps = self.replications as f64;
        let arrays = self
            .accum
            .iter()
            .zip(&self.cells)
            .map(|(accums, cells)| {
                accums
                    .iter()
                    .zip(cells)
                    .map(|(a, &cell)| {
                        let mean = a.sum / n_reps;
                        let variance = (a.sum_sq - a.sum * a.sum / n_reps) / (n_reps - 1.0);
                        let mean_fractions = a
                            .frac_sums
                            .iter()
                            .map(|&s| {
                                if a.defined == 0 {
                                    f64::NAN
                                } else {
                                    s / a.defined as f64
                                }
                            })
                            .collect();
                        CellSummary {
                            cell,
                            mean,
                            variance,
                            mean_fractions,
                            defined: a.defined,
                            undefined: a.undefined,
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(EmpiricalSummary {
            components: self.components.clone(),
            arrays,
        })
    }
}

/// Everything resolved up front so the replication loop is pure arithmetic.
struct Plan {
    umbrella_dists: Vec<Vec<Option<TweedieParams>>>,
    specific_dists: Vec<Vec<Vec<Option<TweedieParams>>>>,
    cells: Vec<Vec<CellPlan>>,
    components: Vec<ComponentKey>,
}

struct CellPlan {
    cell: CellId,
    /// `(layer, subset, mixture coefficient)` for present umbrella shocks.
    umbrella: Vec<(usize, usize, f64)>,
    /// Likewise for the array-specific shocks of this cell's array.
    specific: Vec<(usize, usize, f64)>,
    idio: TweedieParams,
}

fn sampling_supported(p: f64) -> bool {
    p == 0.0 || p == 1.0 || (p > 1.0 && p < 2.0) || p == 2.0
}

// Parallel index bookkeeping across several tables; indexed loops read
// better than zipped iterators here.
#[allow(clippy::needless_range_loop)]
fn build_plan(model: &ShockModel) -> Result<Plan> {
    let p = model.p();
    if !sampling_supported(p) {
        return Err(Error::UnsupportedSamplingPower(p));
    }
    let n_arrays = model.n_arrays();
    let n_layers = model.layers().len();

    let mut components = Vec::new();
    for (r, layer) in model.layers().iter().enumerate() {
        if layer.has_umbrella() {
            components.push(ComponentKey::Umbrella(r));
        }
    }
    for (r, layer) in model.layers().iter().enumerate() {
        if layer.has_array_specific() {
            components.push(ComponentKey::ArraySpecific(r));
        }
    }
    components.push(ComponentKey::Idiosyncratic);

    let mut umbrella_needed = Vec::with_capacity(n_layers);
    let mut specific_needed = Vec::with_capacity(n_layers);
    for layer in model.layers() {
        umbrella_needed.push(vec![false; layer.partition().len()]);
        specific_needed.push(vec![vec![false; layer.partition().len()]; n_arrays]);
    }

    let mut cells = Vec::with_capacity(n_arrays);
    for n in 0..n_arrays {
        let mut per_array = Vec::with_capacity(model.mask(n)?.len());
        for cell in model.mask(n)?.cells() {
            let z = model.idiosyncratic(n, cell)?;
            let mut umbrella = Vec::new();
            let mut specific = Vec::new();
            for (r, layer) in model.layers().iter().enumerate() {
                let s = layer
                    .partition()
                    .subset_of(cell)
                    .expect("partitions cover the base layout");
                if let Some(w) = layer.umbrella_param(s) {
                    umbrella_needed[r][s] = true;
                    umbrella.push((r, s, (z.mu() / w.mu()) * (z.nu() / w.nu())));
                }
                if let Some(w) = layer.array_specific_param(n, s) {
                    specific_needed[r][n][s] = true;
                    specific.push((r, s, (z.mu() / w.mu()) * (z.nu() / w.nu())));
                }
            }
            per_array.push(CellPlan {
                cell,
                umbrella,
                specific,
                idio: TweedieParams::from_mean_cov(p, z)?,
            });
        }
        cells.push(per_array);
    }

    // Shock distributions, instantiated only where some surviving cell uses
    // the subset.
    let mut umbrella_dists = Vec::with_capacity(n_layers);
    let mut specific_dists = Vec::with_capacity(n_layers);
    for (r, layer) in model.layers().iter().enumerate() {
        let subsets = layer.partition().len();
        let mut u_row = Vec::with_capacity(subsets);
        for s in 0..subsets {
            u_row.push(match layer.umbrella_param(s) {
                Some(w) if umbrella_needed[r][s] => Some(TweedieParams::from_mean_cov(p, w)?),
                _ => None,
            });
        }
        umbrella_dists.push(u_row);
        let mut a_rows = Vec::with_capacity(n_arrays);
        for n in 0..n_arrays {
            let mut row = Vec::with_capacity(subsets);
            for s in 0..subsets {
                row.push(match layer.array_specific_param(n, s) {
                    Some(w) if specific_needed[r][n][s] => {
                        Some(TweedieParams::from_mean_cov(p, w)?)
                    }
                    _ => None,
                });
            }
            a_rows.push(row);
        }
        specific_dists.push(a_rows);
    }

    Ok(Plan {
        umbrella_dists,
        specific_dists,
        cells,
        components,
    })
}

struct BlockOutput {
    accum: Vec<Vec<CellAccum>>,
    records: Vec<(usize, ReplicationRecord)>,
}

fn run_block(
    plan: &Plan,
    seed: SeedSpec,
    rep_range: std::ops::Range<u64>,
    retain: bool,
) -> BlockOutput {
    let n_components = plan.components.len();
    let mut accum: Vec<Vec<CellAccum>> = plan
        .cells
        .iter()
        .map(|cells| cells.iter().map(|_| CellAccum::new(n_components)).collect())
        .collect();
    let mut records = Vec::new();

    // Scratch shock values, reused across replications of the block.
    let mut umbrella: Vec<Vec<f64>> = plan
        .umbrella_dists
        .iter()
        .map(|row| vec![f64::NAN; row.len()])
        .collect();
    let mut specific: Vec<Vec<Vec<f64>>> = plan
        .specific_dists
        .iter()
        .map(|rows| rows.iter().map(|row| vec![f64::NAN; row.len()]).collect())
        .collect();

    for rep in rep_range {
        for (r, row) in plan.umbrella_dists.iter().enumerate() {
            for (s, dist) in row.iter().enumerate() {
                if let Some(d) = dist {
                    let mut rng = seed.stream(StreamLabel::Umbrella {
                        layer: r,
                        subset: s,
                        replication: rep,
                    });
                    umbrella[r][s] = d.sample(&mut rng).expect("sampling power was validated");
                }
            }
        }
        for (r, rows) in plan.specific_dists.iter().enumerate() {
            for (n, row) in rows.iter().enumerate() {
                for (s, dist) in row.iter().enumerate() {
                    if let Some(d) = dist {
                        let mut rng = seed.stream(StreamLabel::ArraySpecific {
                            array: n,
                            layer: r,
                            subset: s,
                            replication: rep,
                        });
                        specific[r][n][s] =
                            d.sample(&mut rng).expect("sampling power was validated");
                    }
                }
            }
        }

        let mut record = retain.then(|| ReplicationRecord {
            umbrella: umbrella.clone(),
            array_specific: specific.clone(),
            idiosyncratic: plan.cells.iter().map(|c| vec![0.0; c.len()]).collect(),
            totals: plan.cells.iter().map(|c| vec![0.0; c.len()]).collect(),
        });

        for (n, cells) in plan.cells.iter().enumerate() {
            for (idx, cp) in cells.iter().enumerate() {
                let mut rng = seed.stream(StreamLabel::Idiosyncratic {
                    array: n,
                    cell: cp.cell,
                    replication: rep,
                });
                let z = cp
                    .idio
                    .sample(&mut rng)
                    .expect("sampling power was validated");
                let mut total = 0.0;
                for &(r, s, coef) in &cp.umbrella {
                    total += coef * umbrella[r][s];
                }
                for &(r, s, coef) in &cp.specific {
                    total += coef * specific[r][n][s];
                }
                total += z;

                let acc = &mut accum[n][idx];
                acc.sum += total;
                acc.sum_sq += total * total;
                if total == 0.0 {
                    acc.undefined += 1;
                } else {
                    acc.defined += 1;
                    let mut comp = 0;
                    for &(r, s, coef) in &cp.umbrella {
                        acc.frac_sums[comp] += coef * umbrella[r][s] / total;
                        comp += 1;
                    }
                    for &(r, s, coef) in &cp.specific {
                        acc.frac_sums[comp] += coef * specific[r][n][s] / total;
                        comp += 1;
                    }
                    acc.frac_sums[comp] += z / total;
                }

                if let Some(rec) = record.as_mut() {
                    rec.idiosyncratic[n][idx] = z;
                    rec.totals[n][idx] = total;
                }
            }
        }

        if let Some(rec) = record {
            records.push((rep as usize, rec));
        }
    }

    BlockOutput { accum, records }
}

/// Runs `replications` independent realizations of the model.
///
/// The output is a pure function of `(model, seed, replications)`; the
/// worker count only affects wall time. Each umbrella draw is shared by all
/// cells of its subset across every array within a replication, and each
/// array-specific draw by the subset cells of its own array.
pub fn simulate(
    model: &ShockModel,
    seed: SeedSpec,
    replications: u64,
    options: &SimulationOptions,
) -> Result<SimulationResult> {
    if replications == 0 {
        return Err(Error::TooFewReplications { needed: 1, got: 0 });
    }
    let plan = build_plan(model)?;
    let n_components = plan.components.len();
    let n_blocks = replications.div_ceil(BLOCK_SIZE) as usize;
    let workers = options.workers.max(1).min(n_blocks);

    let block_slots: Vec<Mutex<Option<BlockOutput>>> =
        (0..n_blocks).map(|_| Mutex::new(None)).collect();
    let next_block = AtomicUsize::new(0);

    let run = |block: usize| {
        let start = block as u64 * BLOCK_SIZE;
        let end = (start + BLOCK_SIZE).min(replications);
        run_block(&plan, seed, start..end, options.retain)
    };

    if workers <= 1 {
        for (block, slot) in block_slots.iter().enumerate() {
            *slot.lock().expect("no panics hold this lock") = Some(run(block));
        }
    } else {
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let block = next_block.fetch_add(1, Ordering::Relaxed);
                    if block >= n_blocks {
                        break;
                    }
                    let out = run(block);
                    *block_slots[block].lock().expect("no panics hold this lock") = Some(out);
                });
            }
        });
    }

    // Deterministic reduction: merge block partials in block order.
    let mut accum: Vec<Vec<CellAccum>> = plan
        .cells
        .iter()
        .map(|cells| cells.iter().map(|_| CellAccum::new(n_components)).collect())
        .collect();
    let mut records = options
        .retain
        .then(|| Vec::with_capacity(replications as usize));
    for slot in block_slots {
        let out = slot
            .into_inner()
            .expect("no panics hold this lock")
            .expect("every block was executed");
        for (dst_row, src_row) in accum.iter_mut().zip(&out.accum) {
            for (dst, src) in dst_row.iter_mut().zip(src_row) {
                dst.merge(src);
            }
        }
        if let Some(records) = records.as_mut() {
            // Block partials are merged in block order, so records arrive
            // sorted by replication.
            for (rep, rec) in out.records {
                debug_assert_eq!(rep, records.len());
                records.push(rec);
            }
        }
    }

    Ok(SimulationResult {
        replications,
        components: plan.components,
        cells: plan
            .cells
            .iter()
            .map(|cells| cells.iter().map(|cp| cp.cell).collect())
            .collect(),
        accum,
        retained: records,
    })
}

/// Per-cell realized fractions `coef * W / X` of every component for one
/// retained replication, one table per `(array, component)`.
pub fn realized_contributions(
    result: &SimulationResult,
    model: &ShockModel,
    replication: usize,
) -> Result<Vec<ContributionTable>> {
    let record = result.record(replication)?;
    let mut tables = Vec::new();
    for n in 0..model.n_arrays() {
        let cells = result.cells(n)?;
        for &component in result.components() {
            let mut fractions = BTreeMap::new();
            for (idx, &cell) in cells.iter().enumerate() {
                let total = record.totals[n][idx];
                if total == 0.0 {
                    fractions.insert(cell, None);
                    continue;
                }
                let value = match component {
                    ComponentKey::Umbrella(r) => {
                        let s = model
                            .layer(r)?
                            .partition()
                            .subset_of(cell)
                            .expect("partitions cover the base layout");
                        model.umbrella_coefficient(n, cell, r)? * record.umbrella[r][s]
                    }
                    ComponentKey::ArraySpecific(r) => {
                        let s = model
                            .layer(r)?
                            .partition()
                            .subset_of(cell)
                            .expect("partitions cover the base layout");
                        model.array_specific_coefficient(n, cell, r)?
                            * record.array_specific[r][n][s]
                    }
                    ComponentKey::Idiosyncratic => record.idiosyncratic[n][idx],
                };
                fractions.insert(cell, Some(value / total));
            }
            tables.push(ContributionTable {
                array: n,
                component,
                fractions,
            });
        }
    }
    Ok(tables)
}
