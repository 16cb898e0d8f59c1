use statrs::distribution::{ContinuousCDF, Normal};

/// Largest sample evaluated with the exact null distribution.
const EXACT_MAX_N: usize = 20;

/// Differences closer than this (relative to 1) count as equal, so metric
/// values like 0.6 - 0.4 and 0.4 - 0.2 tie despite rounding.
const TIE_EPS: f64 = 1e-9;

fn same_magnitude(x: f64, y: f64) -> bool {
    (x - y).abs() <= TIE_EPS * x.abs().max(y.abs()).max(1.0)
}

/// Signed ranks of the non-zero differences `a - b`, as doubled integers so
/// that average ranks of ties stay exact. Returned in input order.
pub fn signed_ranks(pairs: &[(f64, f64)]) -> Vec<(bool, u64)> {
    let diffs: Vec<f64> = pairs
        .iter()
        .map(|&(a, b)| a - b)
        .filter(|d| !same_magnitude(*d, 0.0))
        .collect();
    let mut order: Vec<usize> = (0..diffs.len()).collect();
    order.sort_by(|&i, &j| diffs[i].abs().total_cmp(&diffs[j].abs()));
    let mut doubled = vec![0u64; diffs.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len()
            && same_magnitude(diffs[order[end]].abs(), diffs[order[start]].abs())
        {
            end += 1;
        }
        // ranks start+1 ..= end share their mean
        let rank2 = (start + 1 + end) as u64;
        for &i in &order[start..end] {
            doubled[i] = rank2;
        }
        start = end;
    }
    diffs
        .iter()
        .zip(doubled)
        .map(|(&d, r)| (d > 0.0, r))
        .collect()
}

/// Two-sided Wilcoxon signed-rank test on the differences `a - b`.
///
/// Zero differences are dropped and tied magnitudes share their average
/// rank. Up to 20 non-zero differences the p-value comes from the exact
/// permutation distribution of `W+` given the observed ranks; beyond that
/// from the normal approximation with continuity and tie corrections.
/// Returns 1 when every difference is zero.
pub fn wilcoxon_two_sided(pairs: &[(f64, f64)]) -> f64 {
    let ranks = signed_ranks(pairs);
    let n = ranks.len();
    if n == 0 {
        return 1.0;
    }
    let w_plus: u64 = ranks.iter().filter(|r| r.0).map(|r| r.1).sum();
    if n <= EXACT_MAX_N {
        exact_p(&ranks, w_plus)
    } else {
        normal_p(&ranks, w_plus)
    }
}

fn exact_p(ranks: &[(bool, u64)], w_plus: u64) -> f64 {
    let total: u64 = ranks.iter().map(|r| r.1).sum();
    // ways[s] = number of sign assignments with doubled W+ equal to s
    let mut ways = vec![0u64; total as usize + 1];
    ways[0] = 1;
    let mut reach = 0usize;
    for &(_, r) in ranks {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if ways[s] > 0 {
                ways[s + r] += ways[s];
            }
        }
        reach += r;
    }
    let w = w_plus as usize;
    let lower: u64 = ways[..=w].iter().sum();
    let upper: u64 = ways[w..].iter().sum();
    let outcomes = (1u64 << ranks.len()) as f64;
    ((2 * lower.min(upper)) as f64 / outcomes).min(1.0)
}

fn normal_p(ranks: &[(bool, u64)], w_plus: u64) -> f64 {
    let n = ranks.len() as f64;
    let w = w_plus as f64 / 2.0;
    let mean = n * (n + 1.0) / 4.0;
    let mut sizes: Vec<u64> = ranks.iter().map(|r| r.1).collect();
    sizes.sort_unstable();
    let mut tie_term = 0.0;
    for group in sizes.chunk_by(|a, b| a == b) {
        let t = group.len() as f64;
        tie_term += t * t * t - t;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let z = (((w - mean).abs() - 0.5).max(0.0)) / var.sqrt();
    let normal = Normal::standard();
    (2.0 * normal.sf(z)).min(1.0)
}
