//! Weight generators and the CSV/JSON grid file formats.
//!
//! cargo run --release --example families_io

use weightlab::families::WeightKind;
use weightlab::io::{from_csv, from_json, to_csv, to_json};
use weightlab::GridSpec;

fn main() -> weightlab::Result<()> {
    let grid = GridSpec::new(2, 2)?;
    for spec in ["const:c=2", "power:alpha=-1", "flat:delta=0.3,shape=bump", "step:ratio=4,split=0.25", "random:range=2,seed=7"] {
        let kind: WeightKind = spec.parse()?;
        let w = kind.generate(grid)?;
        println!("{kind}");
        let csv = to_csv(w.as_fn());
        let json = to_json(w.as_fn());
        assert_eq!(&from_csv(&csv)?, w.as_fn());
        assert_eq!(&from_json(&json)?, w.as_fn());
        print!("{csv}");
    }
    Ok(())
}
