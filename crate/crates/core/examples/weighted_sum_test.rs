//! Weighted-sum test on null and shifted three-sample data.

use relevance_kit::pipeline::analyze;
use relevance_kit::prelude::*;
use relevance_kit::sim::{gen_gaussian, preset_case};

fn main() -> relevance_kit::Result<()> {
    for (label, id) in [("null", 0), ("case 4", 4), ("case 6", 6)] {
        let mut case = preset_case(id, 800)?.with_seed(5);
        if id == 0 {
            case.groups.push(case.groups[0].clone());
        }
        let (data, groups) = gen_gaussian(&case)?;
        let analysis = analyze(&data, &groups, CostKind::DiffAugmented)?;
        let ctx = MomentContext::new(groups.sizes().to_vec())?;
        let w = WeightMatrix::inverse_sd(&ctx)?;
        let r = weighted_sum_test(&analysis.table, &w, &ctx, 0.05)?;
        println!(
            "{label:>7}: Z = {:.3}, E = {:.3}, sd = {:.3}, p = {:.4}, reject = {}",
            r.statistic,
            r.null_mean.unwrap_or_default(),
            r.null_sd.unwrap_or_default(),
            r.p_value,
            r.reject
        );
    }
    Ok(())
}
