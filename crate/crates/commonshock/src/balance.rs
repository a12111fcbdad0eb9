//! Auto-balance verification.
//!
//! A model is auto-balanced when every shock and the idiosyncratic part
//! contribute a constant proportion of the cell expectation across all
//! cells. This holds exactly when, per array `n`, there are constants
//! `C` and `K` with
//!
//! ```text
//! (a)  nu_ij = C * nu_W[r](ij)        for every layer r with an umbrella shock,
//! (b)  nu_ij = K * nu_W[r](ij, n)     for every layer r with an array-specific shock,
//! ```
//!
//! over all cells where both sides exist. In the balanced case the cell
//! moments collapse to `kappa * mu_ij`, `kappa * sigma_ij^2` and
//! `nu_ij / kappa` with `kappa = 1 + C*chi + K*chi_n`, where `chi` and
//! `chi_n` count the umbrella and array-specific terms per cell. `C`, `K`
//! and `kappa` do not depend on the power parameter.
//!
//! Balance also forces the shock CoVs themselves to be constant over each
//! connectedness equivalence class; [`check_class_constancy`] verifies that
//! consequence directly.

use crate::array::CellId;
use crate::error::{Error, Result};
use crate::model::{CellMoments, ShockModel};
use crate::partition::{equivalence_classes, EquivalenceClasses};
use crate::tweedie::DEFAULT_REL_TOL;

/// Default relative tolerance for the balance ratio checks.
pub const DEFAULT_BALANCE_TOL: f64 = DEFAULT_REL_TOL;

/// Which of the two balance conditions a record refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BalanceCondition {
    /// Condition (a): idiosyncratic vs umbrella CoV.
    Umbrella,
    /// Condition (b): idiosyncratic vs array-specific CoV.
    ArraySpecific,
}

impl std::fmt::Display for BalanceCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BalanceCondition::Umbrella => f.write_str("umbrella"),
            BalanceCondition::ArraySpecific => f.write_str("array-specific"),
        }
    }
}

/// One failed ratio check.
#[derive(Debug, Clone, PartialEq)]
pub struct BalanceViolation {
    pub array: usize,
    pub cell: CellId,
    pub layer: usize,
    pub condition: BalanceCondition,
    /// Ratio `nu_ij / nu_W` observed at this cell and layer.
    pub observed: f64,
    /// The per-array constant estimated from the first present pair.
    pub expected: f64,
}

/// Per-array balance constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalanceConstants {
    /// `C`: common multiple of umbrella CoVs, absent when the model carries
    /// no umbrella shock.
    pub umbrella_multiple: Option<f64>,
    /// `K`: common multiple of array-specific CoVs.
    pub array_specific_multiple: Option<f64>,
    /// `kappa = 1 + C*chi + K*chi_n`, the bracket relating idiosyncratic to
    /// total cell moments.
    pub kappa: f64,
}

/// Constancy of one shock CoV over one equivalence class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassConstancyFinding {
    pub array: usize,
    pub layer: usize,
    pub class: usize,
    pub condition: BalanceCondition,
    pub passed: bool,
    pub min: f64,
    pub max: f64,
}

/// Outcome of [`check_auto_balance`].
#[derive(Debug, Clone, PartialEq)]
pub struct BalanceReport {
    balanced: bool,
    tol: f64,
    per_array: Vec<BalanceConstants>,
    violations: Vec<BalanceViolation>,
    class_constancy: Vec<ClassConstancyFinding>,
}

impl BalanceReport {
    pub fn is_balanced(&self) -> bool {
        self.balanced
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn violations(&self) -> &[BalanceViolation] {
        &self.violations
    }

    pub fn class_constancy(&self) -> &[ClassConstancyFinding] {
        &self.class_constancy
    }

    /// Estimated constants for array `n`, available even when unbalanced.
    pub fn estimates(&self, n: usize) -> Result<&BalanceConstants> {
        self.per_array.get(n).ok_or(Error::ArrayOutOfRange {
            array: n,
            count: self.per_array.len(),
        })
    }

    /// The constants of a balanced model.
    pub fn constants(&self, n: usize) -> Result<&BalanceConstants> {
        if !self.balanced {
            return Err(Error::NotBalanced("constants"));
        }
        self.estimates(n)
    }

    /// `kappa` of array `n`; only defined for balanced models.
    pub fn kappa(&self, n: usize) -> Result<f64> {
        if !self.balanced {
            return Err(Error::NotBalanced("kappa"));
        }
        Ok(self.estimates(n)?.kappa)
    }

    pub fn n_arrays(&self) -> usize {
        self.per_array.len()
    }
}

/// Verifies conditions (a) and (b) over every cell, layer and array.
///
/// The per-array constants are estimated from the lexicographically first
/// present `(cell, layer)` pair and every other pair is compared against
/// them at relative tolerance `tol`. Unbalance is a verdict, not an error;
/// the report also carries the class-constancy findings computed on each
/// array's own mask.
pub fn check_auto_balance(model: &ShockModel, tol: f64) -> BalanceReport {
    let chi = model.umbrella_count() as f64;
    let chi_n = model.array_specific_count() as f64;
    let mut per_array = Vec::with_capacity(model.n_arrays());
    let mut violations = Vec::new();
    let mut class_constancy = Vec::new();

    for n in 0..model.n_arrays() {
        let mask = model.mask(n).expect("array index is in range");
        let mut c_mult: Option<f64> = None;
        let mut k_mult: Option<f64> = None;
        for cell in mask.cells() {
            let z = model
                .idiosyncratic(n, cell)
                .expect("mask cells have idiosyncratic params");
            for (r, _) in model.layers().iter().enumerate() {
                if let Some(w) = model.umbrella_at(r, cell).expect("layer index is in range") {
                    let ratio = z.nu() / w.nu();
                    match c_mult {
                        None => c_mult = Some(ratio),
                        Some(expected) => {
                            if (ratio - expected).abs() > tol * expected.abs() {
                                violations.push(BalanceViolation {
                                    array: n,
                                    cell,
                                    layer: r,
                                    condition: BalanceCondition::Umbrella,
                                    observed: ratio,
                                    expected,
                                });
                            }
                        }
                    }
                }
                if let Some(w) = model
                    .array_specific_at(r, n, cell)
                    .expect("layer index is in range")
                {
                    let ratio = z.nu() / w.nu();
                    match k_mult {
                        None => k_mult = Some(ratio),
                        Some(expected) => {
                            if (ratio - expected).abs() > tol * expected.abs() {
                                violations.push(BalanceViolation {
                                    array: n,
                                    cell,
                                    layer: r,
                                    condition: BalanceCondition::ArraySpecific,
                                    observed: ratio,
                                    expected,
                                });
                            }
                        }
                    }
                }
            }
        }
        let kappa = 1.0 + c_mult.unwrap_or(0.0) * chi + k_mult.unwrap_or(0.0) * chi_n;
        per_array.push(BalanceConstants {
            umbrella_multiple: c_mult,
            array_specific_multiple: k_mult,
            kappa,
        });

        let classes = equivalence_classes(mask, model.partitions());
        class_constancy.extend(class_constancy_for_array(model, n, &classes, tol));
    }

    BalanceReport {
        balanced: violations.is_empty(),
        tol,
        per_array,
        violations,
        class_constancy,
    }
}

/// Balanced-form moments `(kappa mu_ij, kappa sigma_ij^2, nu_ij / kappa)`.
///
/// Must agree with [`ShockModel::cell_moments`]; errors when the report is
/// not balanced.
pub fn balanced_cell_moments(
    report: &BalanceReport,
    model: &ShockModel,
    n: usize,
    cell: CellId,
) -> Result<CellMoments> {
    let kappa = report.kappa(n)?;
    let z = model.idiosyncratic(n, cell)?;
    Ok(CellMoments {
        mean: kappa * z.mu(),
        variance: kappa * z.sigma_sq(),
        sq_cov: z.nu() / kappa,
    })
}

/// Checks that shock CoVs are constant over each equivalence class.
///
/// For every array, layer and class, reports the spread of the umbrella and
/// array-specific CoVs over the class cells. A balanced model passes all
/// findings; cell-wise partitions pass vacuously.
pub fn check_class_constancy(
    model: &ShockModel,
    classes: &EquivalenceClasses,
    tol: f64,
) -> Vec<ClassConstancyFinding> {
    (0..model.n_arrays())
        .flat_map(|n| class_constancy_for_array(model, n, classes, tol))
        .collect()
}

fn class_constancy_for_array(
    model: &ShockModel,
    n: usize,
    classes: &EquivalenceClasses,
    tol: f64,
) -> Vec<ClassConstancyFinding> {
    let mut findings = Vec::new();
    for (r, layer) in model.layers().iter().enumerate() {
        for (h, class) in classes.classes().iter().enumerate() {
            if layer.has_umbrella() {
                if let Some(finding) = spread_finding(
                    class.iter().filter_map(|&c| {
                        model
                            .umbrella_at(r, c)
                            .expect("layer index is in range")
                            .map(|w| w.nu())
                    }),
                    n,
                    r,
                    h,
                    BalanceCondition::Umbrella,
                    tol,
                ) {
                    findings.push(finding);
                }
            }
            if layer.has_array_specific() {
                if let Some(finding) = spread_finding(
                    class.iter().filter_map(|&c| {
                        model
                            .array_specific_at(r, n, c)
                            .expect("layer and array indices are in range")
                            .map(|w| w.nu())
                    }),
                    n,
                    r,
                    h,
                    BalanceCondition::ArraySpecific,
                    tol,
                ) {
                    findings.push(finding);
                }
            }
        }
    }
    findings
}

fn spread_finding(
    values: impl Iterator<Item = f64>,
    array: usize,
    layer: usize,
    class: usize,
    condition: BalanceCondition,
    tol: f64,
) -> Option<ClassConstancyFinding> {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut any = false;
    for v in values {
        any = true;
        min = min.min(v);
        max = max.max(v);
    }
    if !any {
        return None;
    }
    Some(ClassConstancyFinding {
        array,
        layer,
        class,
        condition,
        passed: max - min <= tol * max.abs(),
        min,
        max,
    })
}
