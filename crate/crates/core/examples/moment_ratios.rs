//! Moment ratios of weighted Lévy-area sums over dyadic levels.

use rough_chaos::experiments::moment::{run, Params};

fn main() -> rough_chaos::Result<()> {
    let rep = run(&Params {
        m_max: 7,
        refine: 8,
        replicas: 500,
        ..Params::default()
    })?;
    print!("{}", rep.summary());
    Ok(())
}
