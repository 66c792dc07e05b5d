//! Scaling exponents of the third-order sums from exact covariances.

use rough_chaos::experiments::third_order::{run, Params};

fn main() -> rough_chaos::Result<()> {
    let rep = run(&Params {
        m_max: 8,
        fit_m_max: 7,
        n_quad: 16,
        ..Params::default()
    })?;
    print!("{}", rep.summary());
    Ok(())
}
