//! The local maximal function `M(w χ_Q)` and the reverse weak (1,1) bound
//! it satisfies on dyadic cubes.
//!
//! cargo run --release --example maximal_reverse

use weightlab::families::WeightKind;
use weightlab::maximal::{local_maximal, reverse_weak_11, threshold_grid};
use weightlab::{CubeFamily, GridSpec};

fn main() -> weightlab::Result<()> {
    let grid = GridSpec::new(1, 4)?;
    let w = WeightKind::Power { alpha: -0.5, center: 0.3 }.generate(grid)?;
    let q = grid.domain();
    for family in [CubeFamily::Dyadic, CubeFamily::aligned(1, 1)] {
        let m = local_maximal(&w, &q, &family)?;
        println!("{}:", family.label());
        for (i, (wi, mi)) in w.values().iter().zip(&m.values).enumerate() {
            println!("  cell {i:>2}  w {wi:>8.4}  M {mi:>8.4}");
        }
        let mut worst: f64 = 0.0;
        for t in threshold_grid(&w, &q)? {
            worst = worst.max(reverse_weak_11(&w, &q, t, &family)?.ratio);
        }
        println!("  worst reverse weak (1,1) ratio {worst:.6}");
    }
    Ok(())
}
