//! Variation functionals of a two-parameter grid function and Towghi's
//! bound on its discrete Young integral.

use rough_chaos::young::{
    bar_vp, controlled_pvar, tilde_vp, towghi_check, vp, ControlledMode, GridFunction, GridPartition, VpMode,
};

fn main() -> rough_chaos::Result<()> {
    let part = GridPartition::uniform(2, 3, 0.0, 1.0)?;
    let f = GridFunction::from_fn(part.clone(), |x| (3.0 * x[0]).sin() * (2.0 * x[1]).cos());
    let g = GridFunction::from_fn(part, |x| x[0] * x[1] + (x[0] - x[1]).powi(2));
    let p = 1.5;
    println!("cell sum      {:.6}", tilde_vp(&f, p)?);
    println!("grid-like     {:?}", vp(&f, p, VpMode::Exact)?);
    println!("face-summed   {:?}", bar_vp(&f, p, VpMode::Exact)?);
    println!(
        "controlled    {:?}",
        controlled_pvar(&f, p, ControlledMode::ExactSmall)?
    );
    let t = towghi_check(&f, &g, p, p)?;
    println!("Young integral {:.6}, ratio to bound {:.4}", t.integral, t.ratio);
    Ok(())
}
