//! Shared statistical oracles for the distributional test suites.
//!
//! Critical values are frozen from standard tables:
//! * two-sample Kolmogorov–Smirnov at level 0.001:
//!   `D > c(a)·sqrt((n+m)/(n·m))` with `c(0.001) = sqrt(ln(2/0.001)/2)`
//! * chi-square with 1 degree of freedom at level 0.001: 10.8276

#![allow(dead_code)]

/// `c(0.001) = sqrt(ln(2000)/2)`.
pub const KS_FACTOR_P001: f64 = 1.9494745531;

/// 0.999 quantile of chi-square with one degree of freedom.
pub const CHI2_1DF_P001: f64 = 10.8276;

/// Two-sample KS statistic `sup |F_1 - F_2|`.
pub fn ks_two_sample_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut xs: Vec<f64> = a.to_vec();
    let mut ys: Vec<f64> = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut sup = 0.0_f64;
    while i < n && j < m {
        let v = xs[i].min(ys[j]);
        while i < n && xs[i] <= v {
            i += 1;
        }
        while j < m && ys[j] <= v {
            j += 1;
        }
        sup = sup.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    sup
}

/// True when the two-sample KS test does NOT reject equality at level 0.001.
pub fn ks_two_sample_accepts(a: &[f64], b: &[f64]) -> bool {
    let d = ks_two_sample_statistic(a, b);
    let (n, m) = (a.len() as f64, b.len() as f64);
    d <= KS_FACTOR_P001 * ((n + m) / (n * m)).sqrt()
}

/// Chi-square statistic of a 2x2 contingency table.
pub fn chi2_2x2(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let n = a + b + c + d;
    let det = a * d - b * c;
    let denom = (a + b) * (c + d) * (a + c) * (b + d);
    if denom == 0.0 {
        return f64::INFINITY;
    }
    n * det * det / denom
}

/// 2x2 independence test on two boolean indicator vectors; true when not
/// rejected at level 0.001.
pub fn chi2_independent(p: &[bool], q: &[bool]) -> bool {
    assert_eq!(p.len(), q.len());
    let mut counts = [0.0_f64; 4];
    for (&x, &y) in p.iter().zip(q) {
        counts[((x as usize) << 1) | (y as usize)] += 1.0;
    }
    chi2_2x2(counts[0], counts[1], counts[2], counts[3]) < CHI2_1DF_P001
}
