//! Orthant probabilities of a correlated normal vector.

use relevance_kit::inference::mvn::{norm_cdf, Covariance, MvnIntegrator};

fn main() -> relevance_kit::Result<()> {
    let integrator = MvnIntegrator::default();
    for rho in [-0.5, 0.0, 0.3, 0.9] {
        let sigma = Covariance::new(2, vec![1.0, rho, rho, 1.0])?;
        let est = integrator.upper_tail(&sigma, &[0.0, 0.0])?;
        let exact = 0.25 + f64::asin(rho) / (2.0 * std::f64::consts::PI);
        println!("rho = {rho:>4}: {:.6} +/- {:.1e} (exact {exact:.6})", est.probability, est.std_error);
    }

    let equi = |dim: usize, rho: f64| {
        let values = (0..dim * dim).map(|i| if i % (dim + 1) == 0 { 1.0 } else { rho }).collect();
        Covariance::new(dim, values)
    };
    for dim in [3, 6, 10] {
        let est = integrator.upper_tail(&equi(dim, 0.5)?, &vec![0.0; dim])?;
        // Equicorrelation 1/2 gives 1/(dim + 1) for the positive orthant.
        println!("dim {dim:>2}, rho 0.5: {:.5} (exact {:.5}, {} points)", est.probability, 1.0 / (dim as f64 + 1.0), est.points);
    }
    println!("independent check: {:.6}", (1.0 - norm_cdf(0.5)).powi(3));
    let diag = Covariance::new(3, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0])?;
    println!("engine:            {:.6}", integrator.upper_tail(&diag, &[0.5; 3])?.probability);
    Ok(())
}
