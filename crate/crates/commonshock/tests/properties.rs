//! Property-based invariants of the distribution core and the partition
//! algebra.

use commonshock::{
    equivalence_classes, ArrayLayout, CellId, MeanCov, Partition, PartitionKind, ShockLayerSpec,
    ShockModel, TweedieParams,
};
use proptest::prelude::*;
use std::collections::BTreeSet;

fn prop_rel(actual: f64, expected: f64, tol: f64) -> Result<(), TestCaseError> {
    if actual == expected {
        return Ok(());
    }
    let scale = actual.abs().max(expected.abs());
    prop_assert!(
        (actual - expected).abs() <= tol * scale,
        "expected {expected}, got {actual} (rel err {})",
        (actual - expected).abs() / scale
    );
    Ok(())
}

/// Powers exercising every branch: normal, compound Poisson-gamma, gamma,
/// and a moments-only power above 2.
fn power() -> impl Strategy<Value = f64> {
    prop_oneof![
        Just(0.0),
        Just(1.5),
        Just(1.8),
        Just(2.0),
        Just(3.0),
        Just(-0.5),
    ]
}

fn mean_cov() -> impl Strategy<Value = MeanCov> {
    ((-2.0..4.0f64), (-3.0..1.0f64))
        .prop_map(|(lm, ln)| MeanCov::new(10f64.powf(lm), 10f64.powf(ln)).unwrap())
}

proptest! {
    #[test]
    fn reparameterization_round_trips(p in power(), mc in mean_cov()) {
        let params = TweedieParams::from_mean_cov(p, mc).unwrap();
        let back = params.to_mean_cov();
        prop_rel(back.mu(), mc.mu(), 1e-12)?;
        prop_rel(back.nu(), mc.nu(), 1e-12)?;
        let again = TweedieParams::from_mean_cov(p, back).unwrap();
        prop_rel(again.theta(), params.theta(), 1e-12)?;
        prop_rel(again.lambda(), params.lambda(), 1e-12)?;
    }

    #[test]
    fn moments_match_mean_cov(p in power(), mc in mean_cov()) {
        let params = TweedieParams::from_mean_cov(p, mc).unwrap();
        let m = params.moments();
        prop_rel(m.mean, mc.mu(), 1e-12)?;
        prop_rel(m.variance, mc.sigma_sq(), 1e-12)?;
        prop_rel(m.inv_sq_cov, 1.0 / mc.nu(), 1e-12)?;
    }

    #[test]
    fn poisson_moments_all_equal(lambda in 1e-3..1e6f64, theta in -3.0..3.0f64) {
        let params = TweedieParams::new(1.0, theta, lambda).unwrap();
        let m = params.moments();
        prop_rel(m.mean, lambda * theta.exp(), 1e-12)?;
        prop_assert_eq!(m.mean, m.variance);
        prop_assert_eq!(m.mean, m.inv_sq_cov);
    }

    #[test]
    fn cgf_is_additive(p in power(), a in mean_cov(), b_nu in -3.0..1.0f64) {
        // Summands must share theta, i.e. the same mu * nu product.
        let x = TweedieParams::from_mean_cov(p, a).unwrap();
        let nu_b = 10f64.powf(b_nu);
        let mu_b = a.mu() * a.nu() / nu_b;
        let y = TweedieParams::from_mean_cov(p, MeanCov::new(mu_b, nu_b).unwrap()).unwrap();
        let sum = x.add_with_tol(&y, 1e-9).unwrap();
        // t grid spanning the valid domain on either side of zero.
        for f in [-0.9, -0.5, -0.1, 0.0, 0.1, 0.5, 0.9] {
            let t = if p == 1.0 { f } else { -f * x.theta() };
            let lhs = sum.cgf(t).unwrap();
            let rhs = x.cgf(t).unwrap() + y.cgf(t).unwrap();
            prop_rel(lhs, rhs, 1e-12)?;
        }
    }

    #[test]
    fn scaling_laws_hold(p in power(), mc in mean_cov(), lk in -2.0..2.0f64) {
        prop_assume!(p != 1.0);
        let k = 10f64.powf(lk);
        let x = TweedieParams::from_mean_cov(p, mc).unwrap();
        let scaled = x.scale(k).unwrap();
        let m = x.moments();
        let ms = scaled.moments();
        prop_rel(ms.mean, k * m.mean, 1e-12)?;
        prop_rel(ms.variance, k * k * m.variance, 1e-12)?;
        prop_rel(ms.inv_sq_cov, m.inv_sq_cov, 1e-12)?;
        if p == 2.0 {
            // alpha = 0: the index parameter is scale invariant.
            prop_assert_eq!(scaled.lambda(), x.lambda());
        }
    }

    #[test]
    fn addition_is_exact_on_lambda(p in power(), mc in mean_cov(), l2 in 1e-6..1e6f64) {
        let x = TweedieParams::from_mean_cov(p, mc).unwrap();
        let y = TweedieParams::new(p, x.theta(), l2).unwrap();
        let s1 = x.add(&y).unwrap();
        let s2 = y.add(&x).unwrap();
        prop_assert_eq!(s1.lambda(), x.lambda() + l2);
        prop_assert_eq!(s1.lambda(), s2.lambda());
        let m = s1.moments();
        prop_rel(m.mean, x.moments().mean + y.moments().mean, 1e-12)?;
        prop_rel(m.variance, x.moments().variance + y.moments().variance, 1e-12)?;
    }
}

fn arbitrary_mask(size: u32) -> impl Strategy<Value = ArrayLayout> {
    let full = ArrayLayout::triangle(size);
    let cells: Vec<CellId> = full.cells().collect();
    proptest::collection::vec(any::<bool>(), cells.len()).prop_map(move |keep| {
        let kept: Vec<CellId> = cells
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(&c, _)| c)
            .collect();
        if kept.is_empty() {
            full.clone()
        } else {
            ArrayLayout::from_cells(size, size, kept).unwrap()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn classes_partition_the_mask(mask in arbitrary_mask(8)) {
        let rows = Partition::standard(&mask, PartitionKind::RowWise).unwrap();
        let diags = Partition::standard(&mask, PartitionKind::DiagonalWise).unwrap();
        let classes = equivalence_classes(&mask, &[rows, diags]);
        let mut seen = BTreeSet::new();
        for class in classes.classes() {
            for &cell in class {
                prop_assert!(mask.contains(cell));
                prop_assert!(seen.insert(cell), "cell {cell} in two classes");
            }
        }
        prop_assert_eq!(seen.len(), mask.len());
    }

    #[test]
    fn merging_is_monotone(mask in arbitrary_mask(8)) {
        let rows = Partition::standard(&mask, PartitionKind::RowWise).unwrap();
        let cols = Partition::standard(&mask, PartitionKind::ColumnWise).unwrap();
        let one = equivalence_classes(&mask, std::slice::from_ref(&rows));
        let both = equivalence_classes(&mask, &[rows, cols]);
        prop_assert!(both.len() <= one.len());
        // Each single-partition class stays inside one merged class.
        for class in one.classes() {
            let mut targets = BTreeSet::new();
            for &cell in class {
                targets.insert(both.class_of(cell).unwrap());
            }
            prop_assert_eq!(targets.len(), 1);
        }
    }

    #[test]
    fn classes_are_unions_of_subsets(mask in arbitrary_mask(8)) {
        let rows = Partition::standard(&mask, PartitionKind::RowWise).unwrap();
        let diags = Partition::standard(&mask, PartitionKind::DiagonalWise).unwrap();
        let classes = equivalence_classes(&mask, &[rows.clone(), diags.clone()]);
        for partition in [&rows, &diags] {
            for subset in partition.subsets() {
                let mut targets = BTreeSet::new();
                for &cell in subset {
                    targets.insert(classes.class_of(cell).unwrap());
                }
                prop_assert_eq!(targets.len(), 1, "subset split across classes");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Mixture coefficients depend only on the component (mu, nu) pairs,
    /// never on the power parameter.
    #[test]
    fn coefficients_ignore_power(
        zmu in 1.0..1e3f64, znu in 0.001..0.5f64,
        wmu in 1.0..1e3f64, wnu in 0.001..0.5f64,
    ) {
        let base = ArrayLayout::triangle(3);
        let build = |p: f64| {
            let partition = Partition::standard(&base, PartitionKind::CellWise).unwrap();
            let umbrella = vec![MeanCov::new(wmu, wnu).unwrap(); partition.len()];
            ShockModel::new(
                p,
                base.clone(),
                vec![base.clone()],
                vec![ShockLayerSpec { partition, umbrella: Some(umbrella), array_specific: None }],
                vec![base.cells().map(|c| (c, MeanCov::new(zmu, znu).unwrap())).collect()],
            )
            .unwrap()
        };
        let cell = CellId::new(2, 1);
        let at_15 = build(1.5).umbrella_coefficient(0, cell, 0).unwrap();
        let at_18 = build(1.8).umbrella_coefficient(0, cell, 0).unwrap();
        let at_0 = build(0.0).umbrella_coefficient(0, cell, 0).unwrap();
        prop_assert_eq!(at_15, at_18);
        prop_assert_eq!(at_15, at_0);
        prop_rel(at_15, (zmu / wmu) * (znu / wnu), 1e-14)?;
    }

    /// The two derivations of cell moments (index-parameter sum vs bracket
    /// multiple) agree for random parameter draws.
    #[test]
    fn dual_moment_routes_agree(
        p in prop_oneof![Just(0.0), Just(1.5), Just(1.8), Just(2.0)],
        zmu in 1.0..1e3f64, znu in 0.001..0.5f64,
        wnu in 0.001..0.5f64, snu in 0.001..0.5f64,
    ) {
        let base = ArrayLayout::triangle(3);
        let partition = Partition::standard(&base, PartitionKind::RowWise).unwrap();
        let model = ShockModel::new(
            p,
            base.clone(),
            vec![base.clone()],
            vec![ShockLayerSpec {
                partition: partition.clone(),
                umbrella: Some(vec![MeanCov::new(30.0, wnu).unwrap(); partition.len()]),
                array_specific: Some(vec![vec![MeanCov::new(40.0, snu).unwrap(); partition.len()]]),
            }],
            vec![base.cells().map(|c| (c, MeanCov::new(zmu, znu).unwrap())).collect()],
        )
        .unwrap();
        for cell in base.cells() {
            let direct = model.cell_moments(0, cell).unwrap();
            let dist = model.observation_distribution(0, cell).unwrap().moments();
            prop_rel(dist.mean, direct.mean, 1e-10)?;
            prop_rel(dist.variance, direct.variance, 1e-10)?;
            let shares = model.expected_contributions(0, cell).unwrap();
            prop_rel(shares.total(), 1.0, 1e-12)?;
        }
    }
}
