//! Two-sided Wilcoxon signed-rank test on paired per-query scores.

use clustrank::eval::{signed_ranks, wilcoxon_two_sided};

fn main() {
    let baseline = [0.4, 0.6, 0.2, 0.8, 0.4, 0.6, 0.0, 0.4, 0.2, 0.6];
    let system = [0.6, 0.6, 0.4, 0.8, 0.8, 1.0, 0.2, 0.4, 0.4, 0.8];
    let pairs: Vec<(f64, f64)> = system.iter().copied().zip(baseline).collect();

    for ((a, b), (positive, rank2)) in pairs
        .iter()
        .filter(|(a, b)| a != b)
        .zip(signed_ranks(&pairs))
    {
        println!(
            "{a:.1} vs {b:.1}: rank {:>4} {}",
            rank2 as f64 / 2.0,
            if positive { "+" } else { "-" }
        );
    }
    println!(
        "p = {:.5} over {} queries",
        wilcoxon_two_sided(&pairs),
        pairs.len()
    );
    println!(
        "[+1, +2, +3]: p = {}",
        wilcoxon_two_sided(&[(1.0, 0.0), (2.0, 0.0), (3.0, 0.0)])
    );
}
