//! Text and CSV emission: balance reports, moment tables, contribution
//! tables and simulation summaries.
//!
//! CSV values are printed to 6 significant digits; contribution matrices to
//! 6 decimal places with blank entries for absent or undefined cells;
//! percentages to 1 decimal place. Array labels in all outputs are 1-based.

use crate::array::CellId;
use crate::balance::{BalanceCondition, BalanceReport};
use crate::error::Result;
use crate::model::ShockModel;
use crate::partition::equivalence_classes;
use crate::sim::{ComponentKey, EmpiricalSummary};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Formats to 6 significant digits, switching to scientific notation for
/// extreme magnitudes.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..=11).contains(&mag) {
        format!("{x:.5e}")
    } else {
        let prec = (5 - mag).max(0) as usize;
        format!("{x:.prec$}")
    }
}

/// Per-cell analytic moments of one array: `i,j,mean,variance,cov2`.
pub fn moments_csv(model: &ShockModel, n: usize) -> Result<String> {
    let mut out = String::from("i,j,mean,variance,cov2\n");
    for cell in model.mask(n)?.cells() {
        let m = model.cell_moments(n, cell)?;
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            cell.i(),
            cell.j(),
            sig6(m.mean),
            sig6(m.variance),
            sig6(m.sq_cov)
        );
    }
    Ok(out)
}

/// Expected contribution shares per array and component, one percentage per
/// line: `array,component,share_pct`. Shares are averaged over cells; for a
/// balanced model they are constant.
pub fn expected_contributions_table(model: &ShockModel) -> Result<String> {
    let mut out = String::from("array,component,share_pct\n");
    for n in 0..model.n_arrays() {
        let cells: Vec<CellId> = model.mask(n)?.cells().collect();
        if cells.is_empty() {
            continue;
        }
        let mut labels: Vec<String> = Vec::new();
        let mut sums: Vec<f64> = Vec::new();
        for &cell in &cells {
            let shares = model.expected_contributions(n, cell)?;
            let mut flat: Vec<(String, f64)> = Vec::new();
            for (r, share) in &shares.umbrella {
                flat.push((format!("umbrella[{}]", r + 1), *share));
            }
            for (r, share) in &shares.array_specific {
                flat.push((format!("array-specific[{}]", r + 1), *share));
            }
            flat.push(("idiosyncratic".to_string(), shares.idiosyncratic));
            if labels.is_empty() {
                labels = flat.iter().map(|(l, _)| l.clone()).collect();
                sums = vec![0.0; flat.len()];
            }
            for (k, (_, share)) in flat.iter().enumerate() {
                sums[k] += share;
            }
        }
        for (label, sum) in labels.iter().zip(&sums) {
            let _ = writeln!(
                out,
                "{},{},{:.1}",
                n + 1,
                label,
                100.0 * sum / cells.len() as f64
            );
        }
    }
    Ok(out)
}

/// One contribution matrix in array layout: a header row of identifiers, a
/// column-index row, then one row per accident period with fractions to 6
/// decimals. Absent and undefined cells are blank.
pub fn contribution_matrix_csv(
    name: &str,
    array: usize,
    component: &str,
    replication: Option<u64>,
    rows: u32,
    cols: u32,
    values: &BTreeMap<CellId, Option<f64>>,
) -> String {
    let mut out = format!("{name},triangle {},{component}", array + 1);
    if let Some(rep) = replication {
        let _ = write!(out, ",replication {rep}");
    }
    out.push('\n');
    out.push_str("i\\j");
    for j in 1..=cols {
        let _ = write!(out, ",{j}");
    }
    out.push('\n');
    for i in 1..=rows {
        let _ = write!(out, "{i}");
        for j in 1..=cols {
            out.push(',');
            if let Some(Some(v)) = values.get(&CellId::new(i, j)) {
                let _ = write!(out, "{v:.6}");
            }
        }
        out.push('\n');
    }
    out
}

/// Per-cell empirical summary:
/// `array,i,j,mean,variance,frac_<component>...,defined,undefined`.
pub fn summary_csv(summary: &EmpiricalSummary) -> String {
    let mut out = String::from("array,i,j,mean,variance");
    for key in &summary.components {
        let _ = write!(out, ",frac_{}", component_tag(*key));
    }
    out.push_str(",defined,undefined\n");
    for (n, cells) in summary.arrays.iter().enumerate() {
        for cs in cells {
            let _ = write!(
                out,
                "{},{},{},{},{}",
                n + 1,
                cs.cell.i(),
                cs.cell.j(),
                sig6(cs.mean),
                sig6(cs.variance)
            );
            for f in &cs.mean_fractions {
                out.push(',');
                if f.is_finite() {
                    let _ = write!(out, "{f:.6}");
                }
            }
            let _ = writeln!(out, ",{},{}", cs.defined, cs.undefined);
        }
    }
    out
}

/// Filesystem-friendly component tag: `umbrella1`, `array-specific2`,
/// `idiosyncratic`.
pub fn component_tag(key: ComponentKey) -> String {
    match key {
        ComponentKey::Umbrella(r) => format!("umbrella{}", r + 1),
        ComponentKey::ArraySpecific(r) => format!("array-specific{}", r + 1),
        ComponentKey::Idiosyncratic => "idiosyncratic".to_string(),
    }
}

/// Human-readable balance report.
pub fn balance_text(report: &BalanceReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "verdict: {}",
        if report.is_balanced() {
            "balanced"
        } else {
            "unbalanced"
        }
    );
    let _ = writeln!(out, "tolerance: {:e}", report.tol());
    for n in 0..report.n_arrays() {
        let constants = report.estimates(n).expect("index in range");
        let c = constants.umbrella_multiple.map_or("-".to_string(), sig6);
        let k = constants
            .array_specific_multiple
            .map_or("-".to_string(), sig6);
        let _ = writeln!(
            out,
            "array {}: C = {}, K = {}, kappa = {}",
            n + 1,
            c,
            k,
            sig6(constants.kappa)
        );
    }
    if !report.is_balanced() {
        let shown = report.violations().len().min(20);
        let _ = writeln!(
            out,
            "violations: {} (showing {shown})",
            report.violations().len()
        );
        for v in report.violations().iter().take(shown) {
            let _ = writeln!(
                out,
                "  array {} cell ({},{}) partition {} condition {}: ratio {} expected {}",
                v.array + 1,
                v.cell.i(),
                v.cell.j(),
                v.layer + 1,
                v.condition,
                sig6(v.observed),
                sig6(v.expected)
            );
        }
    }
    let failing: Vec<_> = report
        .class_constancy()
        .iter()
        .filter(|f| !f.passed)
        .collect();
    if !failing.is_empty() {
        let _ = writeln!(out, "class-constancy failures: {}", failing.len());
        for f in failing.iter().take(20) {
            let _ = writeln!(
                out,
                "  array {} partition {} class {} {} CoV^2 spread [{}, {}]",
                f.array + 1,
                f.layer + 1,
                f.class + 1,
                f.condition,
                sig6(f.min),
                sig6(f.max)
            );
        }
    }
    out
}

/// Machine-readable counterpart of [`balance_text`].
#[derive(Debug, Serialize)]
pub struct BalanceDoc {
    pub verdict: String,
    pub tolerance: f64,
    pub arrays: Vec<BalanceArrayDoc>,
    pub violations: Vec<ViolationDoc>,
    pub class_constancy_failures: Vec<ConstancyDoc>,
}

#[derive(Debug, Serialize)]
pub struct BalanceArrayDoc {
    pub array: usize,
    pub umbrella_multiple: Option<f64>,
    pub array_specific_multiple: Option<f64>,
    pub kappa: f64,
}

#[derive(Debug, Serialize)]
pub struct ViolationDoc {
    pub array: usize,
    pub cell: CellId,
    pub partition: usize,
    pub condition: String,
    pub observed: f64,
    pub expected: f64,
}

#[derive(Debug, Serialize)]
pub struct ConstancyDoc {
    pub array: usize,
    pub partition: usize,
    pub class: usize,
    pub condition: String,
    pub min: f64,
    pub max: f64,
}

pub fn balance_doc(report: &BalanceReport) -> BalanceDoc {
    BalanceDoc {
        verdict: if report.is_balanced() {
            "balanced".to_string()
        } else {
            "unbalanced".to_string()
        },
        tolerance: report.tol(),
        arrays: (0..report.n_arrays())
            .map(|n| {
                let c = report.estimates(n).expect("index in range");
                BalanceArrayDoc {
                    array: n + 1,
                    umbrella_multiple: c.umbrella_multiple,
                    array_specific_multiple: c.array_specific_multiple,
                    kappa: c.kappa,
                }
            })
            .collect(),
        violations: report
            .violations()
            .iter()
            .map(|v| ViolationDoc {
                array: v.array + 1,
                cell: v.cell,
                partition: v.layer + 1,
                condition: condition_name(v.condition),
                observed: v.observed,
                expected: v.expected,
            })
            .collect(),
        class_constancy_failures: report
            .class_constancy()
            .iter()
            .filter(|f| !f.passed)
            .map(|f| ConstancyDoc {
                array: f.array + 1,
                partition: f.layer + 1,
                class: f.class + 1,
                condition: condition_name(f.condition),
                min: f.min,
                max: f.max,
            })
            .collect(),
    }
}

fn condition_name(c: BalanceCondition) -> String {
    match c {
        BalanceCondition::Umbrella => "umbrella".to_string(),
        BalanceCondition::ArraySpecific => "array-specific".to_string(),
    }
}

/// Equivalence-class listing, one block per array.
pub fn classes_text(model: &ShockModel) -> Result<String> {
    let mut out = String::new();
    for n in 0..model.n_arrays() {
        let classes = equivalence_classes(model.mask(n)?, model.partitions());
        let _ = writeln!(
            out,
            "array {}: {} class{}",
            n + 1,
            classes.len(),
            if classes.len() == 1 { "" } else { "es" }
        );
        for (h, class) in classes.classes().iter().enumerate() {
            let _ = write!(out, "  class {} ({} cells):", h + 1, class.len());
            for cell in class {
                let _ = write!(out, " ({},{})", cell.i(), cell.j());
            }
            out.push('\n');
        }
    }
    Ok(out)
}
