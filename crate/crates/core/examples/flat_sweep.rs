//! Flat weights `1 + δ sin 2πx`: as δ shrinks, `[w]_{A∞} - 1` goes to zero
//! linearly, the John-Nirenberg exponent blows up like its reciprocal and the
//! doubling constant approaches `2^n`.
//!
//! cargo run --release --example flat_sweep

use weightlab::constants::{doubling, fujii_wilson, jn_sup_r};
use weightlab::families::{FlatShape, WeightKind};
use weightlab::{CubeFamily, DoublingMode, GridSpec};

fn main() -> weightlab::Result<()> {
    let grid = GridSpec::new(1, 8)?;
    let family = CubeFamily::Dyadic;
    println!("{:>8} {:>14} {:>12} {:>16} {:>10}", "delta", "FW - 1", "r*", "(1/r*)/(FW-1)", "doubling");
    for delta in [0.001, 0.01, 0.02, 0.05, 0.1, 0.2] {
        let w = WeightKind::Flat { delta, shape: FlatShape::Sin }.generate(grid)?;
        let excess = fujii_wilson(&w, &family).value - 1.0;
        let r = jn_sup_r(&w, &family, 3.0)?.r;
        let d = doubling(&w, &family, DoublingMode::Clip)?.value;
        println!("{delta:>8} {excess:>14.6e} {r:>12.4} {:>16.6} {d:>10.6}", 1.0 / r / excess);
    }
    Ok(())
}
