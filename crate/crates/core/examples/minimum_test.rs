//! Minimum test on three and four samples: critical value, null CDF and a
//! decision on simulated data.

use std::time::Instant;

use relevance_kit::pipeline::analyze;
use relevance_kit::prelude::*;
use relevance_kit::sim::{gen_gaussian, preset_case};

fn main() -> relevance_kit::Result<()> {
    for sizes in [vec![20, 30, 40], vec![10, 12, 14, 16]] {
        let ctx = MomentContext::new(sizes.clone())?;
        let w = WeightMatrix::inverse_sd(&ctx)?;
        let start = Instant::now();
        let test = MinimumTest::new(&w, &ctx, 0.05)?;
        println!(
            "sizes {sizes:?}: {} active pairs, critical value {:.4} (prepared in {:.2?})",
            test.active_pairs().len(),
            test.critical_value(),
            start.elapsed()
        );
        for x in [-2.0, -1.0, -0.5, 0.0] {
            println!("  P(min <= {x:>4}) = {:.4}", test.cdf(x)?);
        }
    }

    let case = preset_case(6, 500)?.with_seed(1);
    let (data, groups) = gen_gaussian(&case)?;
    let analysis = analyze(&data, &groups, CostKind::DiffAugmented)?;
    let ctx = MomentContext::new(groups.sizes().to_vec())?;
    let w = WeightMatrix::inverse_sd(&ctx)?;
    let result = minimum_test(&analysis.table, &w, &ctx, 0.05)?;
    println!(
        "case 6, d = 500: statistic {:.3}, critical {:.3}, p = {:.4}, reject = {}",
        result.statistic, result.critical_value, result.p_value, result.reject
    );
    Ok(())
}
