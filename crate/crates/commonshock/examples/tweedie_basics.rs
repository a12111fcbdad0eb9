//! # Tweedie distribution core
//!
//! The additive family `Tw*_p(theta, lambda)` covers the normal (p = 0),
//! Poisson (p = 1), compound Poisson-gamma (1 < p < 2) and gamma (p = 2)
//! laws under one cumulant function. This example walks through the
//! parameterizations, the closure rules and the sampler.
//!
//! Run with: `cargo run --example tweedie_basics`

use commonshock::{alpha_of, cumulant_b, MeanCov, SeedSpec, StreamLabel, TweedieParams};

fn main() {
    parameterizations();
    closure_rules();
    sampling();
}

fn parameterizations() {
    println!("--- Parameterizations ---\n");
    for p in [0.0, 1.5, 1.8, 2.0, 3.0] {
        let alpha = alpha_of(p).unwrap();
        println!("p = {p:>4}: alpha = (2-p)/(1-p) = {alpha:.4}");
    }
    println!();

    // A mean of 2 with a 50% coefficient of variation, expressed in
    // canonical coordinates for p = 1.8.
    let mc = MeanCov::new(2.0, 0.25).unwrap();
    let x = TweedieParams::from_mean_cov(1.8, mc).unwrap();
    println!("mu = 2, nu = 0.25 at p = 1.8:");
    println!("  theta  = {:.6}", x.theta());
    println!("  lambda = {:.6}", x.lambda());
    let m = x.moments();
    println!(
        "  moments: mean = {:.4}, variance = {:.4}, 1/CoV^2 = {:.4}",
        m.mean, m.variance, m.inv_sq_cov
    );
    let back = x.to_mean_cov();
    println!(
        "  round-trip: mu = {:.12}, nu = {:.12}",
        back.mu(),
        back.nu()
    );
    println!(
        "  cumulant b_p(theta) = {:.6}\n",
        cumulant_b(1.8, x.theta()).unwrap()
    );
}

fn closure_rules() {
    println!("--- Closure under scaling and addition ---\n");
    let x = TweedieParams::from_mean_cov(1.8, MeanCov::new(2.0, 0.25).unwrap()).unwrap();

    let doubled = x.scale(2.0).unwrap();
    println!("scale by k = 2: theta {} -> {}", x.theta(), doubled.theta());
    println!(
        "  mean {} -> {}, CoV^2 stays {:.4}",
        x.moments().mean,
        doubled.moments().mean,
        doubled.to_mean_cov().nu()
    );

    let y = TweedieParams::new(1.8, x.theta(), 2.0 * x.lambda()).unwrap();
    let sum = x.add(&y).unwrap();
    println!(
        "add an independent variate with the same theta: lambda {} + {} = {}",
        x.lambda(),
        y.lambda(),
        sum.lambda()
    );
    println!(
        "  means add too: {} + {} = {}",
        x.moments().mean,
        y.moments().mean,
        sum.moments().mean
    );

    // The cgf certifies the additivity.
    let t = -0.3 * x.theta();
    println!(
        "  cgf check at t = {t:.3}: K_sum = {:.9} vs K_x + K_y = {:.9}\n",
        sum.cgf(t).unwrap(),
        x.cgf(t).unwrap() + y.cgf(t).unwrap()
    );
}

fn sampling() {
    println!("--- Sampling ---\n");
    let seed = SeedSpec::new(42);
    for (p, mu, nu) in [(0.0, 2.0, 0.25), (1.0, 4.0, 0.25), (1.8, 2.0, 0.25)] {
        let x = TweedieParams::from_mean_cov(p, MeanCov::new(mu, nu).unwrap()).unwrap();
        let mut rng = seed.stream(StreamLabel::Idiosyncratic {
            array: 0,
            cell: commonshock::CellId::new(1, 1),
            replication: p as u64,
        });
        let n = 200_000;
        let mut sum = 0.0;
        let mut zeros = 0usize;
        for _ in 0..n {
            let v = x.sample(&mut rng).unwrap();
            sum += v;
            if v == 0.0 {
                zeros += 1;
            }
        }
        print!(
            "p = {p:>3}: empirical mean over {n} draws = {:.4} (analytic {:.4})",
            sum / n as f64,
            x.moments().mean
        );
        if p > 1.0 && p < 2.0 {
            let p0 = x.compound_poisson_gamma().unwrap().zero_probability();
            print!(
                ", zero fraction = {:.2e} (closed form {:.2e})",
                zeros as f64 / n as f64,
                p0
            );
        }
        println!();
    }
    println!(
        "\npowers outside {{0, 1}} U (1, 2) U {{2}} keep analytic moments but refuse to sample:"
    );
    let x = TweedieParams::from_mean_cov(3.0, MeanCov::new(2.0, 0.5).unwrap()).unwrap();
    let mut rng = rand::rng();
    println!("  p = 3: {:?}", x.sample(&mut rng).unwrap_err());
}
