//! Riesz potentials, Lorentz norms and the weighted Poincaré-Sobolev check.
//!
//! cargo run --release --example sobolev_riesz

use weightlab::constants::fujii_wilson;
use weightlab::families::{test_function, FlatShape, WeightKind};
use weightlab::sobolev::{
    check_poincare_sobolev, lorentz_norm, riesz_at_point, sobolev_exponent, LorentzParams, NormalizedMeasure,
    PoincareVariant,
};
use weightlab::{Cube, CubeFamily, GridFn, GridSpec};

fn main() -> weightlab::Result<()> {
    // I_{1/2} of the indicator of [0, 1) at the endpoint is exactly 2.
    let grid = GridSpec::new(1, 10)?;
    let one = GridFn::constant(grid, 1.0)?;
    let v = riesz_at_point(&one, 0.5, &grid.domain(), [0.0, 0.0])?;
    println!("I_1/2(chi)(0) = {v:.12}");

    // Lorentz norms of an indicator of measure 1/4.
    let g = GridSpec::new(1, 4)?;
    let ind = GridFn::from_fn(g, |x| if x[0] < 0.25 { 1.0 } else { 0.0 })?;
    let mu = NormalizedMeasure::uniform(&g, &g.domain())?;
    for (q, p) in [(2.0, 1.0), (3.0, 2.0)] {
        let norm = lorentz_norm(&ind, LorentzParams::new(q, p)?, &mu);
        println!("||chi||_L({q},{p}) = {norm:.12}  closed form {:.12}", (q / p).powf(1.0 / p) * 0.25f64.powf(1.0 / q));
    }
    println!("||chi||_L(2,inf) = {:.12}", lorentz_norm(&ind, LorentzParams::weak(2.0)?, &mu));

    // Poincaré-Sobolev on the unit square for a flat weight.
    let grid = GridSpec::new(2, 6)?;
    let family = CubeFamily::Dyadic;
    let q = Cube::square([0, 0], grid.cells_per_side());
    for delta in [0.0, 0.05, 0.2] {
        let w = WeightKind::Flat { delta, shape: FlatShape::Sin }.generate(grid)?;
        let fw = fujii_wilson(&w, &family).value;
        print!("delta {delta:<5} p*_w {:.6}", sobolev_exponent(1.0, fw, 8.0, 2)?);
        for name in ["x", "sinsin", "bump"] {
            let f = test_function(name, grid)?;
            let r = check_poincare_sobolev(&f, &w, 1.0, &q, 8.0, PoincareVariant::Strong, &family, None)?;
            print!("  c[{name}] {:.4}", r.params["implied_c"].as_f64().unwrap());
        }
        println!();
    }
    Ok(())
}
