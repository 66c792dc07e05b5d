//! Exact simulation of a two-dimensional fBm path and its dyadic coarsening.

use rough_chaos::fbm_sim::{coarsen, simulate, SimSpec};
use rough_chaos::gaussian_core::HurstModel;

fn main() -> rough_chaos::Result<()> {
    let model = HurstModel::new(0.4, 2)?;
    let path = simulate(&SimSpec::new(model, 8, 4, 2024)?)?;
    println!(
        "{} fine steps, B_1 = ({:.6}, {:.6})",
        path.n_points(),
        path.values(0)[path.n_points()],
        path.values(1)[path.n_points()]
    );
    let coarse = coarsen(&path, 4)?;
    println!(
        "level-4 cell increments of component 1: {:?}",
        &coarse.cell_increments(0)[..4]
    );
    path.regroup(3)?.write_csv(std::io::stdout().lock())?;
    Ok(())
}
