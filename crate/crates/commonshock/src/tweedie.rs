//! Additive-form Tweedie distribution family.
//!
//! A variate `X ~ Tw*_p(theta, lambda)` is parameterized by a power `p`, a
//! canonical parameter `theta` and an index parameter `lambda > 0`. The
//! cumulant function is
//!
//! ```text
//! b_p(theta) = (alpha - 1)/alpha * (theta/(alpha - 1))^alpha,  alpha = (2 - p)/(1 - p),
//!            = exp(theta)                                      for p = 1,
//!            = -ln(-theta)                                     for p = 2,
//! ```
//!
//! with cgf `K(t) = lambda * (b_p(theta + t) - b_p(theta))`. Special cases:
//! `p = 0` normal, `p = 1` Poisson, `p in (1, 2)` compound Poisson-gamma,
//! `p = 2` gamma. The family is closed under positive scaling (`p != 1`) and
//! under addition of independent variates sharing `(p, theta)`.
//!
//! The `(mu, nu)` re-parameterization used throughout the crate maps a mean
//! `mu > 0` and squared coefficient of variation `nu > 0` to
//! `theta = (alpha - 1)/(mu nu)`, `lambda = mu^alpha nu^(alpha - 1)`.

use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal, Poisson};

/// Default relative tolerance for parameter-equality checks.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Returns `alpha = (2 - p)/(1 - p)`.
///
/// Undefined at `p = 1`; callers must branch on the Poisson case instead.
pub fn alpha_of(p: f64) -> Result<f64> {
    if p == 1.0 {
        return Err(Error::UndefinedAlpha);
    }
    // + 0.0 turns the -0.0 arising at p = 2 into 0.0.
    Ok((2.0 - p) / (1.0 - p) + 0.0)
}

pub(crate) fn power_is_valid(p: f64) -> bool {
    p.is_finite() && (p <= 0.0 || p >= 1.0)
}

/// Validates `theta` against the domain of `b_p`.
///
/// For `p = 1` any finite `theta` is admissible; for `p = 2` we need
/// `theta < 0`; otherwise `sgn(theta) = sgn(alpha - 1)`, i.e. `theta > 0`
/// for `p < 1` and `theta < 0` for `p > 1`.
fn theta_in_domain(p: f64, theta: f64) -> bool {
    if !theta.is_finite() {
        return false;
    }
    if p == 1.0 {
        true
    } else if p < 1.0 {
        theta > 0.0
    } else {
        theta < 0.0
    }
}

/// Cumulant function `b_p(theta)` of the additive Tweedie family.
pub fn cumulant_b(p: f64, theta: f64) -> Result<f64> {
    if !power_is_valid(p) {
        return Err(Error::InvalidPower(p));
    }
    if !theta_in_domain(p, theta) {
        return Err(Error::ThetaOutOfDomain { p, theta });
    }
    if p == 1.0 {
        Ok(theta.exp())
    } else if p == 2.0 {
        Ok(-(-theta).ln())
    } else {
        let alpha = alpha_of(p)?;
        Ok((alpha - 1.0) / alpha * (theta / (alpha - 1.0)).powf(alpha))
    }
}

/// Mean / squared-CoV parameterization: `mu = E[X]`, `nu = CoV^2[X]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanCov {
    mu: f64,
    nu: f64,
}

impl MeanCov {
    pub fn new(mu: f64, nu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidMean(mu));
        }
        if !(nu.is_finite() && nu > 0.0) {
            return Err(Error::InvalidCov(nu));
        }
        Ok(Self { mu, nu })
    }

    /// Builds from a mean and an (unsquared) coefficient of variation.
    pub fn from_cov(mu: f64, cov: f64) -> Result<Self> {
        if !(cov.is_finite() && cov > 0.0) {
            return Err(Error::InvalidCov(cov));
        }
        Self::new(mu, cov * cov)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Squared coefficient of variation.
    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Variance `sigma^2 = mu^2 nu`.
    pub fn sigma_sq(&self) -> f64 {
        self.mu * self.mu * self.nu
    }
}

/// First two moments plus the reciprocal squared CoV `lambda (theta/(alpha-1))^alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub inv_sq_cov: f64,
}

/// Compound Poisson-gamma decomposition of `Tw*_p` for `p in (1, 2)`.
///
/// The variate is a Poisson(`poisson_mean`) sum of iid Gamma(`gamma_shape`,
/// scale `gamma_scale`) jumps, with an atom of mass `exp(-poisson_mean)`
/// at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompoundPoissonGamma {
    pub poisson_mean: f64,
    pub gamma_shape: f64,
    pub gamma_scale: f64,
}

impl CompoundPoissonGamma {
    pub fn zero_probability(&self) -> f64 {
        (-self.poisson_mean).exp()
    }
}

/// Additive-form Tweedie parameters `Tw*_p(theta, lambda)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TweedieParams {
    p: f64,
    theta: f64,
    lambda: f64,
}

impl TweedieParams {
    pub fn new(p: f64, theta: f64, lambda: f64) -> Result<Self> {
        if !power_is_valid(p) {
            return Err(Error::InvalidPower(p));
        }
        if !theta_in_domain(p, theta) {
            return Err(Error::ThetaOutOfDomain { p, theta });
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidLambda(lambda));
        }
        Ok(Self { p, theta, lambda })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Analytic mean, variance and `1/CoV^2`.
    pub fn moments(&self) -> Moments {
        if self.p == 1.0 {
            let m = self.lambda * self.theta.exp();
            return Moments {
                mean: m,
                variance: m,
                inv_sq_cov: m,
            };
        }
        // alpha is defined for every p != 1.
        let alpha = (2.0 - self.p) / (1.0 - self.p);
        let base = self.theta / (alpha - 1.0);
        Moments {
            mean: self.lambda * base.powf(alpha - 1.0),
            variance: self.lambda * base.powf(alpha - 2.0),
            inv_sq_cov: self.lambda * base.powf(alpha),
        }
    }

    /// Re-parameterizes to `(mu, nu)`.
    pub fn to_mean_cov(&self) -> MeanCov {
        let m = self.moments();
        MeanCov {
            mu: m.mean,
            nu: 1.0 / m.inv_sq_cov,
        }
    }

    /// Builds `Tw*_p(theta, lambda)` from `(mu, nu)`.
    ///
    /// For `p != 1` this is `theta = (alpha - 1)/(mu nu)`,
    /// `lambda = mu^alpha nu^(alpha - 1)`. At `p = 1` the Poisson law forces
    /// `nu = 1/mu`; the convention `theta = 0`, `lambda = mu` is used, and a
    /// `nu` inconsistent with `1/mu` (relative tolerance
    /// [`DEFAULT_REL_TOL`]) is rejected.
    pub fn from_mean_cov(p: f64, mc: MeanCov) -> Result<Self> {
        Self::from_mean_cov_with_tol(p, mc, DEFAULT_REL_TOL)
    }

    pub fn from_mean_cov_with_tol(p: f64, mc: MeanCov, rel_tol: f64) -> Result<Self> {
        if !power_is_valid(p) {
            return Err(Error::InvalidPower(p));
        }
        if p == 1.0 {
            let implied = 1.0 / mc.mu;
            if (mc.nu - implied).abs() > rel_tol * implied {
                return Err(Error::PoissonCovMismatch {
                    mu: mc.mu,
                    nu: mc.nu,
                });
            }
            return Self::new(1.0, 0.0, mc.mu);
        }
        let alpha = (2.0 - p) / (1.0 - p);
        let theta = (alpha - 1.0) / (mc.mu * mc.nu);
        let lambda = mc.mu.powf(alpha) * mc.nu.powf(alpha - 1.0);
        Self::new(p, theta, lambda)
    }

    /// Distribution of `k X` for `k > 0`: `Tw*_p(theta/k, lambda k^alpha)`.
    ///
    /// Not closed at `p = 1` (a scaled Poisson is no longer `Tw*_1`).
    pub fn scale(&self, k: f64) -> Result<Self> {
        if self.p == 1.0 {
            return Err(Error::ScaleUndefinedAtPoisson);
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidScaleFactor(k));
        }
        let alpha = (2.0 - self.p) / (1.0 - self.p);
        Self::new(self.p, self.theta / k, self.lambda * k.powf(alpha))
    }

    /// Distribution of the sum of two independent variates sharing `(p, theta)`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.add_with_tol(other, DEFAULT_REL_TOL)
    }

    /// As [`add`](Self::add), with an explicit relative tolerance on the
    /// `theta` equality. The left operand's `theta` is kept.
    pub fn add_with_tol(&self, other: &Self, rel_tol: f64) -> Result<Self> {
        let theta_scale = self.theta.abs().max(other.theta.abs());
        let theta_close =
            (self.theta - other.theta).abs() <= rel_tol * theta_scale || self.theta == other.theta;
        if self.p != other.p || !theta_close {
            return Err(Error::IncompatibleSummands {
                p_a: self.p,
                theta_a: self.theta,
                p_b: other.p,
                theta_b: other.theta,
            });
        }
        Self::new(self.p, self.theta, self.lambda + other.lambda)
    }

    /// Cumulant generating function `K(t) = lambda (b_p(theta + t) - b_p(theta))`.
    pub fn cgf(&self, t: f64) -> Result<f64> {
        let shifted = cumulant_b(self.p, self.theta + t)?;
        let at_zero = cumulant_b(self.p, self.theta)?;
        Ok(self.lambda * (shifted - at_zero))
    }

    /// Compound Poisson-gamma decomposition, defined for `p in (1, 2)`.
    ///
    /// With `m` the mean and `phi = Var/m^p` the reproductive dispersion:
    /// Poisson mean `m^(2-p)/(phi (2-p))`, gamma shape `(2-p)/(p-1)`,
    /// gamma scale `phi (p-1) m^(p-1)`.
    pub fn compound_poisson_gamma(&self) -> Result<CompoundPoissonGamma> {
        if !(self.p > 1.0 && self.p < 2.0) {
            return Err(Error::UnsupportedSamplingPower(self.p));
        }
        let m = self.moments();
        let phi = m.variance / m.mean.powf(self.p);
        Ok(CompoundPoissonGamma {
            poisson_mean: m.mean.powf(2.0 - self.p) / (phi * (2.0 - self.p)),
            gamma_shape: (2.0 - self.p) / (self.p - 1.0),
            gamma_scale: phi * (self.p - 1.0) * m.mean.powf(self.p - 1.0),
        })
    }

    /// Draws one realization.
    ///
    /// Supported powers: `p = 0` (normal), `p = 1` (Poisson count),
    /// `p in (1, 2)` (compound Poisson-gamma, with an atom at zero), `p = 2`
    /// (gamma). Other powers keep their analytic moments but cannot be
    /// sampled here.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        if self.p == 0.0 {
            let m = self.moments();
            let normal =
                Normal::new(m.mean, m.variance.sqrt()).expect("validated params give finite sd");
            Ok(normal.sample(rng))
        } else if self.p == 1.0 {
            let mean = self.lambda * self.theta.exp();
            let poisson = Poisson::new(mean).expect("validated params give positive mean");
            Ok(poisson.sample(rng))
        } else if self.p > 1.0 && self.p < 2.0 {
            let cpg = self.compound_poisson_gamma()?;
            let poisson =
                Poisson::new(cpg.poisson_mean).expect("validated params give positive mean");
            let count = poisson.sample(rng);
            if count == 0.0 {
                return Ok(0.0);
            }
            let gamma = Gamma::new(cpg.gamma_shape * count, cpg.gamma_scale)
                .expect("validated params give positive shape and scale");
            Ok(gamma.sample(rng))
        } else if self.p == 2.0 {
            let gamma = Gamma::new(self.lambda, -1.0 / self.theta)
                .expect("validated params give positive shape and scale");
            Ok(gamma.sample(rng))
        } else {
            Err(Error::UnsupportedSamplingPower(self.p))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn assert_rel(actual: f64, expected: f64, tol: f64) {
        if actual == expected {
            return;
        }
        let scale = actual.abs().max(expected.abs());
        assert!(
            (actual - expected).abs() <= tol * scale,
            "expected {expected}, got {actual} (rel err {})",
            (actual - expected).abs() / scale
        );
    }

    #[test]
    fn alpha_values() {
        assert_eq!(alpha_of(2.0).unwrap(), 0.0);
        assert_eq!(alpha_of(0.0).unwrap(), 2.0);
        assert_rel(alpha_of(1.8).unwrap(), -0.25, 1e-15);
        assert_eq!(alpha_of(1.0), Err(Error::UndefinedAlpha));
    }

    #[test]
    fn cumulant_branches() {
        assert_eq!(cumulant_b(2.0, -1.0).unwrap(), 0.0);
        assert_eq!(cumulant_b(1.0, 0.0).unwrap(), 1.0);
        // 5 * 2^(-1/4), evaluated independently to 30 digits.
        assert_rel(cumulant_b(1.8, -2.5).unwrap(), 4.204482076268573, 1e-12);
    }

    #[test]
    fn cumulant_domain_errors() {
        assert!(matches!(
            cumulant_b(2.0, 0.5),
            Err(Error::ThetaOutOfDomain { .. })
        ));
        assert!(matches!(
            cumulant_b(1.8, 1.0),
            Err(Error::ThetaOutOfDomain { .. })
        ));
        assert!(matches!(
            cumulant_b(0.0, -1.0),
            Err(Error::ThetaOutOfDomain { .. })
        ));
        assert!(matches!(cumulant_b(0.5, 1.0), Err(Error::InvalidPower(_))));
    }

    #[test]
    fn poisson_moments() {
        let x = TweedieParams::new(1.0, 0.0, 3.0).unwrap();
        let m = x.moments();
        assert_eq!(m.mean, 3.0);
        assert_eq!(m.variance, 3.0);
        assert_eq!(m.inv_sq_cov, 3.0);
    }

    #[test]
    fn cpg_moments_from_mean_cov() {
        let mc = MeanCov::new(2.0, 0.25).unwrap();
        let x = TweedieParams::from_mean_cov(1.8, mc).unwrap();
        assert_rel(x.theta(), -2.5, 1e-15);
        assert_rel(x.lambda(), 4.756828460010884, 1e-14);
        let m = x.moments();
        assert_rel(m.mean, 2.0, 1e-13);
        assert_rel(m.variance, 1.0, 1e-13);
        assert_rel(m.inv_sq_cov, 4.0, 1e-13);
    }

    #[test]
    fn gamma_moments() {
        let x = TweedieParams::new(2.0, -0.5, 1.0).unwrap();
        let m = x.moments();
        assert_rel(m.mean, 2.0, 1e-15);
        assert_rel(m.variance, 4.0, 1e-15);
    }

    #[test]
    fn normal_case_from_mean_cov() {
        let x = TweedieParams::from_mean_cov(0.0, MeanCov::new(1.0, 1.0).unwrap()).unwrap();
        assert_rel(x.theta(), 1.0, 1e-15);
        assert_rel(x.lambda(), 1.0, 1e-15);
    }

    #[test]
    fn poisson_from_mean_cov_requires_consistent_nu() {
        let ok = TweedieParams::from_mean_cov(1.0, MeanCov::new(4.0, 0.25).unwrap()).unwrap();
        assert_eq!(ok.theta(), 0.0);
        assert_eq!(ok.lambda(), 4.0);
        assert!(matches!(
            TweedieParams::from_mean_cov(1.0, MeanCov::new(4.0, 0.3).unwrap()),
            Err(Error::PoissonCovMismatch { .. })
        ));
    }

    #[test]
    fn scale_identity_and_doubling() {
        let x = TweedieParams::from_mean_cov(1.8, MeanCov::new(2.0, 0.25).unwrap()).unwrap();
        let same = x.scale(1.0).unwrap();
        assert_rel(same.theta(), x.theta(), 1e-15);
        assert_rel(same.lambda(), x.lambda(), 1e-15);

        let doubled = x.scale(2.0).unwrap();
        assert_rel(doubled.theta(), -1.25, 1e-15);
        assert_rel(doubled.lambda(), 4.0, 1e-13);
        assert_rel(doubled.moments().mean, 4.0, 1e-13);
        // CoV^2 is scale invariant.
        assert_rel(doubled.to_mean_cov().nu(), x.to_mean_cov().nu(), 1e-13);
    }

    #[test]
    fn scale_keeps_lambda_at_gamma() {
        // alpha = 0 at p = 2, so k^alpha = 1 and lambda is untouched.
        let x = TweedieParams::new(2.0, -0.5, 3.0).unwrap();
        assert_eq!(x.scale(7.5).unwrap().lambda(), 3.0);
    }

    #[test]
    fn scale_rejects_poisson() {
        let x = TweedieParams::new(1.0, 0.0, 2.0).unwrap();
        assert_eq!(x.scale(2.0), Err(Error::ScaleUndefinedAtPoisson));
    }

    #[test]
    fn add_poisson_and_cpg() {
        let a = TweedieParams::new(1.0, 0.0, 2.0).unwrap();
        let b = TweedieParams::new(1.0, 0.0, 3.0).unwrap();
        let sum = a.add(&b).unwrap();
        assert_eq!(sum.lambda(), 5.0);

        let c = TweedieParams::new(1.8, -2.5, 1.0).unwrap();
        let d = TweedieParams::new(1.8, -2.5, 2.0).unwrap();
        let s = c.add(&d).unwrap();
        assert_eq!(s.lambda(), 3.0);
        let expect = c.moments().mean + d.moments().mean;
        assert_rel(s.moments().mean, expect, 1e-14);
        assert_rel(s.moments().mean, 3.0 * 2f64.powf(-1.25), 1e-14);
    }

    #[test]
    fn add_rejects_mismatch() {
        let a = TweedieParams::new(1.8, -2.5, 1.0).unwrap();
        let b = TweedieParams::new(1.8, -2.6, 1.0).unwrap();
        assert!(matches!(a.add(&b), Err(Error::IncompatibleSummands { .. })));
        let c = TweedieParams::new(1.5, -2.5, 1.0).unwrap();
        assert!(matches!(a.add(&c), Err(Error::IncompatibleSummands { .. })));
    }

    #[test]
    fn cgf_values_and_mean_derivative() {
        let x = TweedieParams::new(1.0, 0.0, 1.0).unwrap();
        assert_eq!(x.cgf(0.0).unwrap(), 0.0);
        assert_rel(x.cgf(2f64.ln()).unwrap(), 1.0, 1e-14);

        // dK/dt at 0 equals the mean; central difference as the check.
        let y = TweedieParams::from_mean_cov(1.8, MeanCov::new(2.0, 0.25).unwrap()).unwrap();
        let h = 1e-6;
        let deriv = (y.cgf(h).unwrap() - y.cgf(-h).unwrap()) / (2.0 * h);
        assert_rel(deriv, y.moments().mean, 1e-8);
    }

    #[test]
    fn cgf_domain_error() {
        let x = TweedieParams::new(2.0, -0.5, 1.0).unwrap();
        assert!(matches!(x.cgf(0.5), Err(Error::ThetaOutOfDomain { .. })));
    }

    #[test]
    fn cpg_decomposition_matches_additive_form() {
        let x = TweedieParams::from_mean_cov(1.8, MeanCov::new(2.0, 0.25).unwrap()).unwrap();
        let cpg = x.compound_poisson_gamma().unwrap();
        // Poisson mean also equals lambda * b_p(theta); gamma scale equals -1/theta.
        assert_rel(
            cpg.poisson_mean,
            x.lambda() * cumulant_b(1.8, x.theta()).unwrap(),
            1e-12,
        );
        assert_rel(cpg.gamma_shape, 0.25, 1e-15);
        assert_rel(cpg.gamma_scale, -1.0 / x.theta(), 1e-13);
        assert_rel(cpg.poisson_mean, 20.0, 1e-12);
    }

    #[test]
    fn sampling_rejects_unsupported_powers() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = TweedieParams::from_mean_cov(3.0, MeanCov::new(2.0, 0.5).unwrap()).unwrap();
        assert!(matches!(
            x.sample(&mut rng),
            Err(Error::UnsupportedSamplingPower(_))
        ));
        let y = TweedieParams::from_mean_cov(-0.5, MeanCov::new(2.0, 0.5).unwrap()).unwrap();
        assert!(matches!(
            y.sample(&mut rng),
            Err(Error::UnsupportedSamplingPower(_))
        ));
        // Moments stay available for those powers.
        assert_rel(y.moments().mean, 2.0, 1e-13);
    }

    // Smaller-sample calibration here; the full 10^6-draw run lives in the
    // acceptance suite.
    #[test]
    fn sampler_calibration_smoke() {
        let n = 200_000usize;
        for &(p, mu, nu) in &[
            (0.0, 2.0, 0.25),
            (1.0, 4.0, 0.25),
            (1.5, 1.0, 1.0),
            (1.8, 2.0, 0.25),
            (2.0, 2.0, 0.25),
        ] {
            let x = TweedieParams::from_mean_cov(p, MeanCov::new(mu, nu).unwrap()).unwrap();
            let m = x.moments();
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ p.to_bits());
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..n {
                let v = x.sample(&mut rng).unwrap();
                sum += v;
                sum_sq += v * v;
            }
            let mean = sum / n as f64;
            let se = (m.variance / n as f64).sqrt();
            assert!(
                (mean - m.mean).abs() < 6.0 * se,
                "p={p}: mean {mean} vs {} (se {se})",
                m.mean
            );
            let var = (sum_sq - sum * sum / n as f64) / (n as f64 - 1.0);
            assert!(
                (var - m.variance).abs() < 0.05 * m.variance,
                "p={p}: variance {var} vs {}",
                m.variance
            );
        }
    }

    #[test]
    fn cpg_zero_atom_smoke() {
        let x = TweedieParams::from_mean_cov(1.5, MeanCov::new(1.0, 1.0).unwrap()).unwrap();
        let p0 = x.compound_poisson_gamma().unwrap().zero_probability();
        assert_rel(p0, (-2.0f64).exp(), 1e-12);
        let n = 100_000usize;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let zeros = (0..n)
            .filter(|_| x.sample(&mut rng).unwrap() == 0.0)
            .count();
        let freq = zeros as f64 / n as f64;
        let se = (p0 * (1.0 - p0) / n as f64).sqrt();
        assert!(
            (freq - p0).abs() < 6.0 * se,
            "zero atom {freq} vs {p0} (se {se})"
        );
    }
}
