//! Greedy shortest Hamiltonian path against the exhaustive optimum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relevance_kit::prelude::*;

fn main() -> relevance_kit::Result<()> {
    let line = DataMatrix::from_rows(vec![vec![0.0], vec![1.0], vec![3.0], vec![7.0]])?;
    let costs = gamma_cost(&line, 2.0)?;
    let path = approximate_shp(&costs)?;
    println!("points 0, 1, 3, 7 -> path {:?}, cost {}", path.order(), path_cost(&path, &costs)?);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    println!("\n  N  greedy   optimal  ratio");
    for n in 4..=9 {
        let rows = (0..n).map(|_| (0..2).map(|_| rng.random::<f64>()).collect()).collect();
        let costs = gamma_cost(&DataMatrix::from_rows(rows)?, 2.0)?;
        let greedy = path_cost(&approximate_shp(&costs)?, &costs)?;
        let best = path_cost(&brute_force_shp(&costs)?, &costs)?;
        println!("{n:>3}  {greedy:.4}   {best:.4}   {:.3}", greedy / best);
    }
    Ok(())
}
