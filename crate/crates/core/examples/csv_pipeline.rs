//! CSV in, JSON out: writes a simulated data set, reads it back with label
//! normalization, and runs the test and relevance commands in-process.

use relevance_kit::cli::{cmd_relevance, cmd_test, ingest_csv, write_csv, RunConfig, TestSelector};
use relevance_kit::sim::{gen_gaussian, preset_case};

fn main() -> relevance_kit::Result<()> {
    let dir = std::env::temp_dir().join("relevance-kit-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("three_samples.csv");

    let (data, groups) = gen_gaussian(&preset_case(5, 400)?.with_seed(2))?;
    let labels = ["healthy", "stage-i", "stage-ii"].map(String::from);
    write_csv(&path, &data, &groups, &labels, "tissue")?;

    let dataset = ingest_csv(&path, Some("tissue"))?;
    for g in &dataset.summary().labels {
        println!("group {} = {} ({} rows)", g.id, g.label, g.size);
    }

    let config = RunConfig { test: TestSelector::Permutation(500), seed: 9, ..RunConfig::default() };
    let report = cmd_test(&dataset, &config)?;
    for r in &report.results {
        println!("{:?}: statistic {:.3}, p = {:.4}", r.method, r.statistic, r.p_value);
    }
    for p in &report.permutation {
        println!("{:?} permutation p = {:.4} (asymptotic {:.4})", p.statistic, p.p_value, p.asymptotic_p_value);
    }

    let relevance = cmd_relevance(&dataset, &config, &[(vec![0], vec![1, 2])])?;
    println!("{}", serde_json::to_string_pretty(&relevance.combined)?);
    println!("wrote {}", path.display());
    Ok(())
}
