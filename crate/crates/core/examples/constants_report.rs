//! Every weight constant of a few standard weights, on both cube families.
//!
//! cargo run --release --example constants_report

use weightlab::families::WeightKind;
use weightlab::{ConstantsReport, CubeFamily, DoublingMode, GridSpec};

fn main() -> weightlab::Result<()> {
    let grid = GridSpec::new(1, 6)?;
    let weights = ["step:ratio=2,split=0.5", "power:alpha=-0.5", "power:alpha=1", "flat:delta=0.1,shape=saw"];
    println!(
        "{:<26} {:<12} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}",
        "weight", "family", "A_2", "A_1", "FW", "Hruscev", "logA_inf", "doubling", "r*"
    );
    for spec in weights {
        let w = spec.parse::<WeightKind>()?.generate(grid)?;
        for family in [CubeFamily::Dyadic, CubeFamily::aligned(1, 1)] {
            let r = ConstantsReport::compute(&w, &family, &[2.0], DoublingMode::Clip)?;
            println!(
                "{:<26} {:<12} {:>9.5} {:>9.5} {:>9.5} {:>9.5} {:>9.5} {:>9.5} {:>9.5}",
                spec,
                r.family,
                r.a_p[0].value,
                r.a_1.value,
                r.fujii_wilson.value,
                r.hruscev.value,
                r.log_ainfty.value,
                r.doubling.as_ref().map_or(f64::NAN, |d| d.value),
                r.jn_r_star.value.unwrap_or(f64::INFINITY),
            );
        }
    }
    Ok(())
}
