//! Monte-Carlo power of both tests under the preset simulation designs.
//!
//! `cargo run --release --example power_study -- 200` sets the trial count.

use relevance_kit::prelude::*;
use relevance_kit::sim::{estimate_power, preset_case};

fn main() -> relevance_kit::Result<()> {
    let trials: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(100);
    let costs = [CostKind::Gamma(2.0), CostKind::Average, CostKind::DiffAugmented];
    println!("case     d  cost             ws      min");
    for id in 0..=6 {
        for d in [200, 1000] {
            let case = preset_case(id, d)?;
            for cost in costs {
                let ws = estimate_power(&case, cost, StatisticKind::WeightedSum, 0.05, trials, 1)?;
                let min = estimate_power(&case, cost, StatisticKind::Minimum, 0.05, trials, 1)?;
                println!("{id:>4} {d:>5}  {:<14} {:>6.3}  {:>6.3}", cost.to_string(), ws.power, min.power);
            }
        }
    }
    Ok(())
}
