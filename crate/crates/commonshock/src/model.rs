//! The multivariate Tweedie common shock model.
//!
//! Each observation of array `n` decomposes as
//!
//! ```text
//! X_ij = sum_r a_ij[r] W[r](ij)  +  sum_r b_ij[r] W[r](ij, n)  +  Z_ij(n)
//! ```
//!
//! where, for each partition `r`, `W[r](ij)` is an umbrella shock shared by
//! every array over the subset containing `(i, j)`, `W[r](ij, n)` an
//! array-specific shock over the same subset, and `Z_ij(n)` the cell's
//! idiosyncratic component. All components are `Tw*_p` with a common power.
//!
//! The mixture coefficients are never stored: the observation is itself
//! Tweedie exactly when each coefficient equals the ratio of the component's
//! canonical parameter to the cell's, equivalently
//! `a_ij[r] = (mu_ij/mu_W)(nu_ij/nu_W)`, so they are derived on demand and
//! the closure constraint cannot be violated by construction. The
//! coefficients do not depend on `p`.

use crate::array::{ArrayLayout, CellId};
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::tweedie::{self, MeanCov, TweedieParams, DEFAULT_REL_TOL};
use std::collections::BTreeMap;

/// One partition together with the shocks attached to it.
///
/// `umbrella` and `array_specific` carry one `MeanCov` per partition subset;
/// at least one of them must be present.
#[derive(Debug, Clone, PartialEq)]
pub struct ShockLayerSpec {
    pub partition: Partition,
    pub umbrella: Option<Vec<MeanCov>>,
    pub array_specific: Option<Vec<Vec<MeanCov>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShockLayer {
    partition: Partition,
    umbrella: Option<Vec<MeanCov>>,
    array_specific: Option<Vec<Vec<MeanCov>>>,
}

impl ShockLayer {
    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn has_umbrella(&self) -> bool {
        self.umbrella.is_some()
    }

    pub fn has_array_specific(&self) -> bool {
        self.array_specific.is_some()
    }

    /// Umbrella shock parameters of subset `s`, when the shock is present.
    pub fn umbrella_param(&self, s: usize) -> Option<MeanCov> {
        self.umbrella.as_ref().map(|v| v[s])
    }

    /// Array-specific shock parameters of subset `s` in array `n`.
    pub fn array_specific_param(&self, n: usize, s: usize) -> Option<MeanCov> {
        self.array_specific.as_ref().map(|v| v[n][s])
    }
}

/// Mixture coefficients of one cell against one partition layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureCoefficients {
    pub umbrella: Option<f64>,
    pub array_specific: Option<f64>,
}

/// Mean, variance and squared CoV of an observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellMoments {
    pub mean: f64,
    pub variance: f64,
    pub sq_cov: f64,
}

/// Expected proportionate contribution of each component to the cell mean.
#[derive(Debug, Clone, PartialEq)]
pub struct ContributionShares {
    /// `(layer index, share)` for each layer carrying an umbrella shock.
    pub umbrella: Vec<(usize, f64)>,
    /// `(layer index, share)` for each layer carrying an array-specific shock.
    pub array_specific: Vec<(usize, f64)>,
    pub idiosyncratic: f64,
}

impl ContributionShares {
    pub fn total(&self) -> f64 {
        self.umbrella.iter().map(|&(_, s)| s).sum::<f64>()
            + self.array_specific.iter().map(|&(_, s)| s).sum::<f64>()
            + self.idiosyncratic
    }
}

/// An assembled common shock model over `N` congruent-or-masked arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct ShockModel {
    p: f64,
    base: ArrayLayout,
    masks: Vec<ArrayLayout>,
    layers: Vec<ShockLayer>,
    idio: Vec<BTreeMap<CellId, MeanCov>>,
}

impl ShockModel {
    /// Assembles and validates a model.
    ///
    /// Subset geometry lives on the `base` layout; each array observes the
    /// cells of its own mask, which must be a subset of `base`. The
    /// idiosyncratic table of array `n` must carry exactly the cells of
    /// mask `n`. At `p = 1` every component must satisfy `nu = 1/mu`, which
    /// makes all canonical parameters equal as the closure requires.
    pub fn new(
        p: f64,
        base: ArrayLayout,
        masks: Vec<ArrayLayout>,
        layers: Vec<ShockLayerSpec>,
        idio: Vec<BTreeMap<CellId, MeanCov>>,
    ) -> Result<Self> {
        if !tweedie::power_is_valid(p) {
            return Err(Error::InvalidPower(p));
        }
        if masks.is_empty() {
            return Err(Error::ModelShape("a model needs at least one array".into()));
        }
        if idio.len() != masks.len() {
            return Err(Error::ModelShape(format!(
                "{} idiosyncratic tables for {} arrays",
                idio.len(),
                masks.len()
            )));
        }
        let n_arrays = masks.len();
        for (n, mask) in masks.iter().enumerate() {
            if !mask.is_subset_of(&base) {
                return Err(Error::ModelShape(format!(
                    "mask of array {n} is not a subset of the base layout"
                )));
            }
        }
        for (n, table) in idio.iter().enumerate() {
            if table.len() != masks[n].len() || !masks[n].cells().all(|c| table.contains_key(&c)) {
                return Err(Error::ModelShape(format!(
                    "idiosyncratic table of array {n} does not match its mask"
                )));
            }
        }
        let mut checked = Vec::with_capacity(layers.len());
        for (r, spec) in layers.into_iter().enumerate() {
            if spec.umbrella.is_none() && spec.array_specific.is_none() {
                return Err(Error::EmptyLayer { layer: r });
            }
            if spec.partition.covered_cells() != base.len()
                || !base.cells().all(|c| spec.partition.subset_of(c).is_some())
            {
                return Err(Error::ModelShape(format!(
                    "partition {r} does not cover the base layout"
                )));
            }
            let subsets = spec.partition.len();
            if let Some(u) = &spec.umbrella {
                if u.len() != subsets {
                    return Err(Error::ModelShape(format!(
                        "umbrella table of partition {r} has {} entries for {subsets} subsets",
                        u.len()
                    )));
                }
            }
            if let Some(a) = &spec.array_specific {
                if a.len() != n_arrays {
                    return Err(Error::ModelShape(format!(
                        "array-specific table of partition {r} covers {} arrays, expected {n_arrays}",
                        a.len()
                    )));
                }
                for (n, per_subset) in a.iter().enumerate() {
                    if per_subset.len() != subsets {
                        return Err(Error::ModelShape(format!(
                            "array-specific table of partition {r}, array {n} has {} entries for {subsets} subsets",
                            per_subset.len()
                        )));
                    }
                }
            }
            checked.push(ShockLayer {
                partition: spec.partition,
                umbrella: spec.umbrella,
                array_specific: spec.array_specific,
            });
        }
        let model = Self {
            p,
            base,
            masks,
            layers: checked,
            idio,
        };
        if p == 1.0 {
            model.validate_poisson_components()?;
        }
        Ok(model)
    }

    fn validate_poisson_components(&self) -> Result<()> {
        let check = |mc: MeanCov| -> Result<()> {
            let implied = 1.0 / mc.mu();
            if (mc.nu() - implied).abs() > DEFAULT_REL_TOL * implied {
                return Err(Error::PoissonCovMismatch {
                    mu: mc.mu(),
                    nu: mc.nu(),
                });
            }
            Ok(())
        };
        for layer in &self.layers {
            if let Some(u) = &layer.umbrella {
                u.iter().try_for_each(|&mc| check(mc))?;
            }
            if let Some(a) = &layer.array_specific {
                a.iter().flatten().try_for_each(|&mc| check(mc))?;
            }
        }
        self.idio
            .iter()
            .flat_map(|t| t.values())
            .try_for_each(|&mc| check(mc))
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n_arrays(&self) -> usize {
        self.masks.len()
    }

    pub fn base(&self) -> &ArrayLayout {
        &self.base
    }

    pub fn mask(&self, n: usize) -> Result<&ArrayLayout> {
        self.masks.get(n).ok_or(Error::ArrayOutOfRange {
            array: n,
            count: self.masks.len(),
        })
    }

    pub fn layers(&self) -> &[ShockLayer] {
        &self.layers
    }

    pub fn layer(&self, r: usize) -> Result<&ShockLayer> {
        self.layers.get(r).ok_or(Error::LayerOutOfRange {
            layer: r,
            count: self.layers.len(),
        })
    }

    pub fn partitions(&self) -> Vec<&Partition> {
        self.layers.iter().map(|l| &l.partition).collect()
    }

    /// Number of umbrella shock terms per cell.
    pub fn umbrella_count(&self) -> usize {
        self.layers.iter().filter(|l| l.has_umbrella()).count()
    }

    /// Number of array-specific shock terms per cell.
    pub fn array_specific_count(&self) -> usize {
        self.layers
            .iter()
            .filter(|l| l.has_array_specific())
            .count()
    }

    /// Idiosyncratic parameters of a present cell.
    pub fn idiosyncratic(&self, n: usize, cell: CellId) -> Result<MeanCov> {
        let table = self.idio.get(n).ok_or(Error::ArrayOutOfRange {
            array: n,
            count: self.masks.len(),
        })?;
        table
            .get(&cell)
            .copied()
            .ok_or(Error::CellNotPresent { array: n, cell })
    }

    /// Umbrella shock parameters acting on `cell` through layer `r`, when present.
    pub fn umbrella_at(&self, r: usize, cell: CellId) -> Result<Option<MeanCov>> {
        let layer = self.layer(r)?;
        match layer.partition.subset_of(cell) {
            Some(s) => Ok(layer.umbrella_param(s)),
            None => Ok(None),
        }
    }

    /// Array-specific shock parameters acting on `cell` in array `n` through layer `r`.
    pub fn array_specific_at(&self, r: usize, n: usize, cell: CellId) -> Result<Option<MeanCov>> {
        let layer = self.layer(r)?;
        if n >= self.masks.len() {
            return Err(Error::ArrayOutOfRange {
                array: n,
                count: self.masks.len(),
            });
        }
        match layer.partition.subset_of(cell) {
            Some(s) => Ok(layer.array_specific_param(n, s)),
            None => Ok(None),
        }
    }

    /// The umbrella mixture coefficient `(mu_ij/mu_W)(nu_ij/nu_W)` of layer `r`.
    pub fn umbrella_coefficient(&self, n: usize, cell: CellId, r: usize) -> Result<f64> {
        let z = self.idiosyncratic(n, cell)?;
        let w = self.umbrella_at(r, cell)?.ok_or(Error::ComponentAbsent {
            kind: "umbrella",
            layer: r,
        })?;
        Ok((z.mu() / w.mu()) * (z.nu() / w.nu()))
    }

    /// The array-specific mixture coefficient of layer `r` in array `n`.
    pub fn array_specific_coefficient(&self, n: usize, cell: CellId, r: usize) -> Result<f64> {
        let z = self.idiosyncratic(n, cell)?;
        let w = self
            .array_specific_at(r, n, cell)?
            .ok_or(Error::ComponentAbsent {
                kind: "array-specific",
                layer: r,
            })?;
        Ok((z.mu() / w.mu()) * (z.nu() / w.nu()))
    }

    /// Both coefficients of layer `r` at once; absent components yield `None`.
    pub fn mixture_coefficients(
        &self,
        n: usize,
        cell: CellId,
        r: usize,
    ) -> Result<MixtureCoefficients> {
        let z = self.idiosyncratic(n, cell)?;
        let coef = |w: MeanCov| (z.mu() / w.mu()) * (z.nu() / w.nu());
        Ok(MixtureCoefficients {
            umbrella: self.umbrella_at(r, cell)?.map(coef),
            array_specific: self.array_specific_at(r, n, cell)?.map(coef),
        })
    }

    /// Distribution of the observation `X_ij` in array `n`.
    ///
    /// For `p != 1` this is `Tw*_p((alpha-1)/(mu_ij nu_ij), (mu_ij nu_ij)^alpha
    /// (sum_r 1/nu_W[r] + sum_r 1/nu_W[r][n] + 1/nu_ij))`; for `p = 1` the
    /// index parameters of all components simply add at the common canonical
    /// parameter.
    pub fn observation_distribution(&self, n: usize, cell: CellId) -> Result<TweedieParams> {
        let z = self.idiosyncratic(n, cell)?;
        if self.p == 1.0 {
            let mut lambda = 0.0;
            for r in 0..self.layers.len() {
                if let Some(w) = self.umbrella_at(r, cell)? {
                    lambda += TweedieParams::from_mean_cov(1.0, w)?.lambda();
                }
            }
            for r in 0..self.layers.len() {
                if let Some(w) = self.array_specific_at(r, n, cell)? {
                    lambda += TweedieParams::from_mean_cov(1.0, w)?.lambda();
                }
            }
            lambda += TweedieParams::from_mean_cov(1.0, z)?.lambda();
            return TweedieParams::new(1.0, 0.0, lambda);
        }
        let alpha = (2.0 - self.p) / (1.0 - self.p);
        let mut inv_sum = 0.0;
        for r in 0..self.layers.len() {
            if let Some(w) = self.umbrella_at(r, cell)? {
                inv_sum += 1.0 / w.nu();
            }
        }
        for r in 0..self.layers.len() {
            if let Some(w) = self.array_specific_at(r, n, cell)? {
                inv_sum += 1.0 / w.nu();
            }
        }
        inv_sum += 1.0 / z.nu();
        let theta = (alpha - 1.0) / (z.mu() * z.nu());
        let lambda = (z.mu() * z.nu()).powf(alpha) * inv_sum;
        TweedieParams::new(self.p, theta, lambda)
    }

    /// The bracket `sum_r nu_ij/nu_W[r] + sum_r nu_ij/nu_W[r][n] + 1`
    /// multiplying the idiosyncratic moments.
    fn bracket(&self, n: usize, cell: CellId, z: MeanCov) -> Result<f64> {
        let mut acc = 0.0;
        for r in 0..self.layers.len() {
            if let Some(w) = self.umbrella_at(r, cell)? {
                acc += z.nu() / w.nu();
            }
        }
        for r in 0..self.layers.len() {
            if let Some(w) = self.array_specific_at(r, n, cell)? {
                acc += z.nu() / w.nu();
            }
        }
        Ok(acc + 1.0)
    }

    /// First two moments of the observation, valid for every admissible `p`.
    pub fn cell_moments(&self, n: usize, cell: CellId) -> Result<CellMoments> {
        let z = self.idiosyncratic(n, cell)?;
        let bracket = self.bracket(n, cell, z)?;
        Ok(CellMoments {
            mean: z.mu() * bracket,
            variance: z.sigma_sq() * bracket,
            sq_cov: z.nu() / bracket,
        })
    }

    /// Expected share of the cell mean contributed by each component.
    ///
    /// The same shares decompose the variance; the shock means cancel out.
    pub fn expected_contributions(&self, n: usize, cell: CellId) -> Result<ContributionShares> {
        let z = self.idiosyncratic(n, cell)?;
        let bracket = self.bracket(n, cell, z)?;
        let mut umbrella = Vec::new();
        let mut array_specific = Vec::new();
        for r in 0..self.layers.len() {
            if let Some(w) = self.umbrella_at(r, cell)? {
                umbrella.push((r, z.nu() / w.nu() / bracket));
            }
        }
        for r in 0..self.layers.len() {
            if let Some(w) = self.array_specific_at(r, n, cell)? {
                array_specific.push((r, z.nu() / w.nu() / bracket));
            }
        }
        Ok(ContributionShares {
            umbrella,
            array_specific,
            idiosyncratic: 1.0 / bracket,
        })
    }

    /// A copy of the model with reduced masks; new masks must be subsets of
    /// the current ones. Shock parameters are untouched, idiosyncratic
    /// entries of removed cells are dropped.
    pub fn with_masks(&self, masks: Vec<ArrayLayout>) -> Result<Self> {
        if masks.len() != self.masks.len() {
            return Err(Error::ModelShape(format!(
                "{} masks for {} arrays",
                masks.len(),
                self.masks.len()
            )));
        }
        for (n, (new, old)) in masks.iter().zip(&self.masks).enumerate() {
            if !new.is_subset_of(old) {
                return Err(Error::ModelShape(format!(
                    "new mask of array {n} is not a subset of the current mask"
                )));
            }
        }
        let idio = self
            .idio
            .iter()
            .zip(&masks)
            .map(|(table, mask)| {
                table
                    .iter()
                    .filter(|(c, _)| mask.contains(**c))
                    .map(|(&c, &mc)| (c, mc))
                    .collect()
            })
            .collect();
        Ok(Self {
            p: self.p,
            base: self.base.clone(),
            masks,
            layers: self.layers.clone(),
            idio,
        })
    }

    /// A copy of the model with the given cells deleted from array `n`.
    pub fn delete_cells(&self, n: usize, cells: &[CellId]) -> Result<Self> {
        let mut masks = self.masks.clone();
        let mask = masks.get_mut(n).ok_or(Error::ArrayOutOfRange {
            array: n,
            count: self.masks.len(),
        })?;
        *mask = mask.without_cells(cells);
        self.with_masks(masks)
    }
}
