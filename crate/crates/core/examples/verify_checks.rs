//! Run the inequality checks on random log-bounded weights and report the
//! worst ratio per check.
//!
//! cargo run --release --example verify_checks

use std::collections::BTreeMap;

use weightlab::families::WeightKind;
use weightlab::verify::{check_bmo_chain, check_left_open, check_rhi, embedding_via_jn, rhi_epsilon_max};
use weightlab::{CubeFamily, GridSpec};
use weightlab::constants::fujii_wilson;

fn main() -> weightlab::Result<()> {
    let mut worst: BTreeMap<String, (f64, bool)> = BTreeMap::new();
    let mut record = |r: weightlab::CheckResult| {
        let key = match r.params.get("part").and_then(|v| v.as_str()) {
            Some(part) => format!("{}({part})", r.id),
            None => r.id.clone(),
        };
        let e = worst.entry(key).or_insert((0.0, true));
        e.0 = e.0.max(r.ratio);
        e.1 &= r.pass;
    };
    for seed in 0..40u64 {
        let grid = GridSpec::new(1 + (seed % 2) as usize, 3 + (seed % 3) as u32)?;
        let w = WeightKind::Random { range: 3.0, seed }.generate(grid)?;
        let family = CubeFamily::Dyadic;
        record(embedding_via_jn(&w, &family)?.1);
        for r in check_bmo_chain(&w, &family)? {
            record(r);
        }
        for p in [1.5, 2.0, 3.0] {
            record(check_left_open(&w, p, &family)?);
        }
        let eps = rhi_epsilon_max(fujii_wilson(&w, &family).value, grid.dim());
        record(check_rhi(&w, eps, &family)?);
    }
    println!("{:<16} {:>12} {:>6}", "check", "worst ratio", "pass");
    for (id, (ratio, pass)) in worst {
        println!("{id:<16} {ratio:>12.6} {pass:>6}");
    }
    Ok(())
}
