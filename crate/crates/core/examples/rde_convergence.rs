//! Geometric equation `dY = Y dB` driven by fBm: solution error against
//! the closed form and the Jacobian inverse defect, per step size.

use nalgebra::DVector;
use rough_chaos::fbm_sim::{simulate, SimSpec};
use rough_chaos::gaussian_core::HurstModel;
use rough_chaos::rde::{geometric_closed_form, solve, AffineField, Scheme};
use rough_chaos::rough_lift::lift2;

fn main() -> rough_chaos::Result<()> {
    let model = HurstModel::new(0.4, 1)?;
    let path = simulate(&SimSpec::new(model, 12, 1, 11)?)?;
    let exact = geometric_closed_form(1.0)(&path);
    let field = AffineField::geometric_1d();
    let xi = DVector::from_element(1, 1.0);
    for m in 6..=12 {
        let lift = lift2(&path.regroup(m)?);
        for scheme in [Scheme::Davie, Scheme::LogOde { inner: 1 }] {
            let sol = solve(&lift, &field, &xi, scheme)?;
            println!(
                "m={m:>2} {scheme:?}: |Y_1 - exact| = {:.3e}, |J Jinv - I| = {:.3e}",
                (sol.terminal()[0] - exact).abs(),
                sol.inverse_defect()
            );
        }
    }
    Ok(())
}
