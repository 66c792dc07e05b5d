//! Limit constants of the Lévy-area sums across the Hurst range.

use rough_chaos::gaussian_core::series_constants;

fn main() -> rough_chaos::Result<()> {
    println!(
        "{:>5} {:>14} {:>14} {:>14} {:>10}",
        "H", "sigma^2", "sigma_tilde^2", "C", "tol"
    );
    for h in [0.35, 0.4, 0.45, 0.5] {
        let c = series_constants(h, 1e-8)?;
        println!(
            "{h:>5} {:>14.10} {:>14.10} {:>14.10} {:>10.2e}",
            c.sigma2,
            c.sigma2_tilde,
            c.fclt_c,
            c.combined_tol()
        );
    }
    Ok(())
}
