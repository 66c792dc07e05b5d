//! Lévy area of a simulated path: Chen and shuffle identities, and the
//! second moment against the iterated covariance recursion.

use rough_chaos::chaos_sums::mean_se;
use rough_chaos::fbm_sim::{simulate, SimSpec};
use rough_chaos::gaussian_core::{iterated_cov_rl, HurstModel};
use rough_chaos::rough_lift::{chen_combine, lift2};

fn main() -> rough_chaos::Result<()> {
    let h = 0.4;
    let model = HurstModel::new(h, 2)?;
    let spec = SimSpec::new(model, 5, 1, 7)?;
    let mut sq = Vec::new();
    for r in 0..2000 {
        let path = simulate(&spec.with_replica(r))?;
        let lift = lift2(&path);
        if r == 0 {
            let halves = lift2(&path.regroup(1)?);
            let joined = chen_combine(&halves.cell(0), &halves.cell(1))?;
            println!(
                "Chen defect {:.2e}",
                (joined.level2(0, 1) - lift.total().level2(0, 1)).abs()
            );
            println!("shuffle defect {:.2e}", lift.shuffle_defect());
        }
        sq.push(lift.total().level2(0, 1).powi(2));
    }
    let ms = mean_se(&sq);
    let oracle = iterated_cov_rl(2, 0.0, 1.0, 32, h)?.corner();
    println!("E[(B^12_01)^2] = {:.5} +- {:.5}, recursion {oracle:.5}", ms.mean, ms.se);
    Ok(())
}
