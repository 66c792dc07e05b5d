//! Variance and normality of the normalised antisymmetric sum at a fixed
//! level.

use rough_chaos::experiments::fclt::{run, Params, Part};

fn main() -> rough_chaos::Result<()> {
    let rep = run(&Params {
        parts: vec![Part::Marginal],
        m: 7,
        refine: 8,
        replicas: 1000,
        c2_rel_tol: 0.1,
        ..Params::default()
    })?;
    print!("{}", rep.summary());
    Ok(())
}
