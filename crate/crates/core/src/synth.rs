//! Synthetic signals for tests and examples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `sin(2 pi t / period)` for `t = 1..=n`.
pub fn sine(n: usize, period: f64) -> Vec<f64> {
    (1..=n)
        .map(|t| (2.0 * std::f64::consts::PI * t as f64 / period).sin())
        .collect()
}

pub fn uniform_noise(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| r.random::<f64>()).collect()
}

pub fn gaussian_noise(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| StandardNormal.sample(&mut r)).collect()
}

/// Geometric random walk starting at 100, daily volatility 1%.
pub fn random_walk_prices(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    let mut p = 100.0;
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut r);
            p *= (0.01 * z).exp();
            p
        })
        .collect()
}

/// x-component of the Lorenz system (sigma 10, rho 28, beta 8/3), RK4 with
/// step `dt`, after discarding a 2000-step transient.
pub fn lorenz_x(n: usize, dt: f64) -> Vec<f64> {
    let (sigma, rho, beta) = (10.0, 28.0, 8.0 / 3.0);
    let f = |s: [f64; 3]| {
        [
            sigma * (s[1] - s[0]),
            s[0] * (rho - s[2]) - s[1],
            s[0] * s[1] - beta * s[2],
        ]
    };
    let add =
        |a: [f64; 3], b: [f64; 3], h: f64| [a[0] + h * b[0], a[1] + h * b[1], a[2] + h * b[2]];
    let mut s = [1.0, 1.0, 1.0];
    let mut out = Vec::with_capacity(n);
    for step in 0..2000 + n {
        let k1 = f(s);
        let k2 = f(add(s, k1, dt / 2.0));
        let k3 = f(add(s, k2, dt / 2.0));
        let k4 = f(add(s, k3, dt));
        for d in 0..3 {
            s[d] += dt / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
        }
        if step >= 2000 {
            out.push(s[0]);
        }
    }
    out
}

/// First half: AR(1) with coefficient 0.95 and unit innovations (started in
/// its stationary law). Second half: i.i.d. Gaussian noise with five times the
/// AR(1) stationary standard deviation. Not normalized.
pub fn two_regime(n: usize, seed: u64) -> Vec<f64> {
    let rho: f64 = 0.95;
    let sd1 = 1.0 / (1.0 - rho * rho).sqrt();
    let mut r = rng(seed);
    let half = n / 2;
    let mut x = Normal::new(0.0, sd1).unwrap().sample(&mut r);
    let mut out = Vec::with_capacity(n);
    for _ in 0..half {
        out.push(x);
        let e: f64 = StandardNormal.sample(&mut r);
        x = rho * x + e;
    }
    let loud = Normal::new(0.0, 5.0 * sd1).unwrap();
    out.extend((half..n).map(|_| loud.sample(&mut r)));
    out
}
