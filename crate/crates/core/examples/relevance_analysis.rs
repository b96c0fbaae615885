//! Relevance z-scores for four samples where samples 1 and 4 share a law,
//! as do samples 2 and 3.

use relevance_kit::pipeline::analyze;
use relevance_kit::prelude::*;
use relevance_kit::sim::{gen_gaussian, relevance_case};

fn main() -> relevance_kit::Result<()> {
    let case = relevance_case(1000).with_seed(0);
    let (data, groups) = gen_gaussian(&case)?;
    let analysis = analyze(&data, &groups, CostKind::Gamma(2.0))?;
    let combine = [(vec![0, 1], vec![2, 3]), (vec![0, 3], vec![1, 2])];
    let report = relevance_report(&analysis.path, &groups, &combine)?;

    let names: Vec<String> = (1..=4).map(|g| format!("G{g}")).collect();
    print!("{}", report.to_tsv(&names));
    for entry in &report.combined {
        let show = |ids: &[usize]| ids.iter().map(|g| format!("G{}", g + 1)).collect::<Vec<_>>().join("+");
        println!("{} vs {}: count {}, z = {:.3}", show(&entry.first), show(&entry.second), entry.count, entry.z);
    }

    let ctx = MomentContext::new(groups.sizes().to_vec())?;
    let w = WeightMatrix::inverse_sd(&ctx)?.with_zeroed(&[(0, 1), (0, 3), (1, 2), (2, 3)])?;
    let ws = weighted_sum_test(&analysis.table, &w, &ctx, 0.05)?;
    let min = minimum_test(&analysis.table, &w, &ctx, 0.05)?;
    println!("pairs (1,3) and (2,4) only: weighted-sum p = {:.4}, minimum p = {:.4}", ws.p_value, min.p_value);
    Ok(())
}
