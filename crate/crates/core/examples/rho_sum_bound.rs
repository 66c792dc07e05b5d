//! Exhaustive check of the bound on multiple correlation sums.

use rough_chaos::chaos_sums::rho_bound::sweep;
use rough_chaos::chaos_sums::{Normalization, RhoSequence};

fn main() -> rough_chaos::Result<()> {
    for norm in [Normalization::TwoSided, Normalization::OneSided] {
        let seq = RhoSequence::new(0.4, 32, norm)?;
        let s = sweep(3, 3, 5, &seq)?;
        println!(
            "{norm:?}: {} assignments, {} evaluations, {} violations, worst ratio {:.4}",
            s.cases, s.evaluations, s.violations, s.worst_ratio
        );
    }
    Ok(())
}
