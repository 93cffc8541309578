//! Brute-force embedding estimators.

#![allow(dead_code)]

use std::collections::HashMap;

/// Direct plug-in estimate: sum over observed pairs of p(a,b) ln(p(a,b) / (p(a) p(b))).
pub fn ami_oracle(series: &[f64], lag: usize, bins: usize) -> f64 {
    let lo = series.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = series.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let bin = |v: f64| (((v - lo) / (hi - lo) * bins as f64) as usize).min(bins - 1);
    let n = series.len() - lag;
    let mut joint: HashMap<(usize, usize), f64> = HashMap::new();
    let mut left: HashMap<usize, f64> = HashMap::new();
    let mut right: HashMap<usize, f64> = HashMap::new();
    for t in 0..n {
        let (a, b) = (bin(series[t]), bin(series[t + lag]));
        *joint.entry((a, b)).or_default() += 1.0;
        *left.entry(a).or_default() += 1.0;
        *right.entry(b).or_default() += 1.0;
    }
    let n = n as f64;
    joint
        .iter()
        .map(|(&(a, b), &c)| {
            let p = c / n;
            p * (p / ((left[&a] / n) * (right[&b] / n))).ln()
        })
        .sum()
}

/// O(n^2) nearest-neighbour scan for every dimension.
pub fn fnn_oracle(series: &[f64], tau: usize, max_m: usize, rtol: f64, atol: f64) -> Vec<f64> {
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let sd = (series.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    (1..=max_m)
        .map(|m| {
            let count = series.len() - m * tau;
            let mut false_count = 0;
            for i in 0..count {
                let mut best = (usize::MAX, f64::INFINITY);
                for j in 0..count {
                    if j == i {
                        continue;
                    }
                    let d2: f64 = (0..m)
                        .map(|k| (series[i + k * tau] - series[j + k * tau]).powi(2))
                        .sum();
                    if d2 < best.1 {
                        best = (j, d2);
                    }
                }
                let (j, d2) = best;
                let extra = series[i + m * tau] - series[j + m * tau];
                let ratio_false = extra.abs() > 1e-9 * sd && extra * extra > rtol * rtol * d2;
                let size_false = d2 + extra * extra > (atol * sd).powi(2);
                if ratio_false || size_false {
                    false_count += 1;
                }
            }
            false_count as f64 / count as f64
        })
        .collect()
}
