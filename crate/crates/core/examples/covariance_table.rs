//! Closed-form cell covariances of the second-chaos families against the
//! Isserlis pairing of discretised increments.

use rough_chaos::chaos_sums::{CellPairOracle, QCovariance, QKind, Resolution};

fn main() -> rough_chaos::Result<()> {
    let (h, m, n) = (0.4, 4, 16);
    let mut cov = QCovariance::new(h, Resolution::Discrete { n })?;
    for (i, j) in [(0, 0), (2, 3), (1, 9)] {
        let o = CellPairOracle::new(h, m, i, j, n, 2)?;
        let hat = o.covariance(&o.hat(0, 1, 0), &o.hat(0, 1, 1))?;
        let area = o.covariance(&o.area(0, 1, 0), &o.area(0, 1, 1))?;
        println!(
            "cells ({i},{j}): hat {:+.6e} vs {:+.6e}, tilde {:+.6e} vs {:+.6e}",
            cov.cell_pair(QKind::Hat, m, i, j)?,
            hat,
            cov.cell_pair(QKind::Tilde, m, i, j)?,
            area
        );
    }
    Ok(())
}
