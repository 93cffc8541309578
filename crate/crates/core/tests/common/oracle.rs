//! Naive recurrence quantification straight from the definitions, used as an
//! independent reference for the bit-packed implementation.

#![allow(dead_code)]

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub struct Naive {
    pub rr: f64,
    pub det: f64,
    pub l_mean: Option<f64>,
    pub l_max: usize,
    pub div: Option<f64>,
    pub entr: f64,
    pub trend: Option<f64>,
    pub lam: f64,
    pub tt: Option<f64>,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
}

/// Run lengths along every diagonal `j - i = k` with `|k| >= theiler`.
pub fn diagonal_runs(m: &[Vec<bool>], theiler: usize) -> (BTreeMap<usize, u64>, u64) {
    let n = m.len() as isize;
    let mut hist = BTreeMap::new();
    let mut total = 0;
    for k in -(n - 1)..n {
        if (k.unsigned_abs()) < theiler {
            continue;
        }
        let mut run = 0;
        for i in 0..n {
            let j = i + k;
            let set = (0..n).contains(&j) && m[i as usize][j as usize];
            if set {
                run += 1;
                total += 1;
            } else if run > 0 {
                *hist.entry(run).or_insert(0) += 1;
                run = 0;
            }
        }
        if run > 0 {
            *hist.entry(run).or_insert(0) += 1;
        }
    }
    (hist, total)
}

/// Run lengths down every column.
pub fn vertical_runs(m: &[Vec<bool>]) -> (BTreeMap<usize, u64>, u64) {
    let n = m.len();
    let mut hist = BTreeMap::new();
    let mut total = 0;
    for j in 0..n {
        let mut run = 0;
        for i in 0..=n {
            if i < n && m[i][j] {
                run += 1;
                total += 1;
            } else if run > 0 {
                *hist.entry(run).or_insert(0) += 1;
                run = 0;
            }
        }
    }
    (hist, total)
}

fn mean_gap(positions: &[Vec<usize>]) -> Option<f64> {
    let mut sum = 0.0;
    let mut cols = 0u64;
    for p in positions.iter().filter(|p| p.len() >= 2) {
        let gaps: usize = p.windows(2).map(|w| w[1] - w[0]).sum();
        sum += gaps as f64 / (p.len() - 1) as f64;
        cols += 1;
    }
    (cols > 0).then(|| sum / cols as f64)
}

pub fn measures(m: &[Vec<bool>], l_min: usize, v_min: usize, theiler: usize) -> Naive {
    let n = m.len();
    let ones: u64 = m.iter().flatten().filter(|&&b| b).count() as u64;
    let frac = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };

    let (diag, diag_total) = diagonal_runs(m, theiler);
    let long: Vec<(usize, u64)> = diag
        .iter()
        .filter(|(&l, _)| l >= l_min)
        .map(|(&l, &c)| (l, c))
        .collect();
    let diag_points: u64 = long.iter().map(|&(l, c)| l as u64 * c).sum();
    let diag_lines: u64 = long.iter().map(|&(_, c)| c).sum();
    let l_max = long.iter().map(|&(l, _)| l).max().unwrap_or(0);
    let entr = if long.len() <= 1 {
        0.0
    } else {
        -long
            .iter()
            .map(|&(_, c)| {
                let p = c as f64 / diag_lines as f64;
                p * p.ln()
            })
            .sum::<f64>()
    };

    let (vert, _) = vertical_runs(m);
    let vlong: Vec<(usize, u64)> = vert
        .iter()
        .filter(|(&v, _)| v >= v_min)
        .map(|(&v, &c)| (v, c))
        .collect();
    let vert_points: u64 = vlong.iter().map(|&(v, c)| v as u64 * c).sum();
    let vert_lines: u64 = vlong.iter().map(|&(_, c)| c).sum();

    // TREND over offsets max(theiler, 1) ..= min(n - 1, 9n/10).
    let lo = theiler.max(1);
    let hi = (9 * n / 10).min(n.saturating_sub(1));
    let trend = (hi > lo).then(|| {
        let pts: Vec<(f64, f64)> = (lo..=hi)
            .map(|k| {
                let c = (0..n - k).filter(|&i| m[i][i + k]).count()
                    + (0..n - k).filter(|&i| m[i + k][i]).count();
                (k as f64, c as f64 / (2 * (n - k)) as f64)
            })
            .collect();
        let len = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
        let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
        sxy / sxx
    });

    let set_rows: Vec<Vec<usize>> = (0..n)
        .map(|j| (0..n).filter(|&i| m[i][j]).collect())
        .collect();
    let starts: Vec<Vec<usize>> = (0..n)
        .map(|j| {
            (0..n)
                .filter(|&i| m[i][j] && (i == 0 || !m[i - 1][j]))
                .collect()
        })
        .collect();

    Naive {
        rr: frac(ones, (n * n) as u64),
        det: frac(diag_points, diag_total),
        l_mean: (diag_lines > 0).then(|| diag_points as f64 / diag_lines as f64),
        l_max,
        div: (l_max > 0).then(|| 1.0 / l_max as f64),
        entr,
        trend,
        lam: frac(vert_points, ones),
        tt: (vert_lines > 0).then(|| vert_points as f64 / vert_lines as f64),
        t1: mean_gap(&set_rows),
        t2: mean_gap(&starts),
    }
}

/// Symmetric random matrix with a set main diagonal and the given fill density.
pub fn random_symmetric(n: usize, density: f64, next: &mut impl FnMut() -> f64) -> Vec<Vec<bool>> {
    let mut m = vec![vec![false; n]; n];
    for i in 0..n {
        m[i][i] = true;
        for j in i + 1..n {
            let b = next() < density;
            m[i][j] = b;
            m[j][i] = b;
        }
    }
    m
}
