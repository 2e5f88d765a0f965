//! Weight generators, addressed by strings like `flat:delta=0.05,shape=sin`.
//!
//! | kind     | keys                          | cell values                               |
//! |----------|-------------------------------|-------------------------------------------|
//! | `const`  | `c` (1)                       | `c`                                       |
//! | `power`  | `alpha`, `center` (0.5)       | `|x - c|^α`; exact cell average in 1D, midpoint in 2D |
//! | `flat`   | `delta`, `shape` (`sin`)      | `1 + δ φ`, `φ` mean zero with `|φ| <= 1`  |
//! | `step`   | `ratio`, `split` (0.5)        | `ratio` left of `split`, `1` right (exact cell average) |
//! | `random` | `range` (1), `seed` (0)       | `log w` i.i.d. uniform on `[-range/2, range/2]` |
//!
//! In 2D `step` depends on the first coordinate only; `power` centers at
//! `(c, c)`. Shapes: `sin` is `sin 2πx` (times `sin 2πy` in 2D) averaged
//! exactly over cells; `saw` is `2 frac(2x) - 1` (product in 2D); `bump` is a
//! Gaussian bump at the center, re-centered and scaled on the grid.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{GridFn, GridSpec, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlatShape {
    Sin,
    Bump,
    Saw,
}

impl FlatShape {
    fn label(&self) -> &'static str {
        match self {
            FlatShape::Sin => "sin",
            FlatShape::Bump => "bump",
            FlatShape::Saw => "saw",
        }
    }
}

impl FromStr for FlatShape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sin" => Ok(FlatShape::Sin),
            "bump" => Ok(FlatShape::Bump),
            "saw" => Ok(FlatShape::Saw),
            _ => Err(Error::Parse(format!("unknown flat shape `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightKind {
    Const { c: f64 },
    Power { alpha: f64, center: f64 },
    Flat { delta: f64, shape: FlatShape },
    Step { ratio: f64, split: f64 },
    Random { range: f64, seed: u64 },
}

impl WeightKind {
    /// The same kind with `delta` replaced (flat weights only).
    pub fn with_delta(&self, delta: f64) -> Result<WeightKind> {
        match self {
            WeightKind::Flat { shape, .. } => Ok(WeightKind::Flat { delta, shape: *shape }),
            _ => Err(Error::InvalidParameter("delta sweeps need a flat weight".into())),
        }
    }

    fn validate(&self, grid: &GridSpec) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match *self {
            WeightKind::Const { c } if !(c > 0.0 && c.is_finite()) => bad(format!("const needs c > 0, got {c}")),
            WeightKind::Power { alpha, .. } if !(alpha > -(grid.dim() as f64)) => {
                bad(format!("power needs alpha > -n, got {alpha}"))
            }
            WeightKind::Flat { delta, .. } if !(delta.abs() < 1.0) => bad(format!("flat needs |delta| < 1, got {delta}")),
            WeightKind::Step { ratio, split } if !(ratio > 0.0 && ratio.is_finite()) || !(0.0..=1.0).contains(&split) => {
                bad(format!("step needs ratio > 0 and split in [0, 1], got {ratio}, {split}"))
            }
            WeightKind::Random { range, .. } if !(range >= 0.0 && range.is_finite()) => {
                bad(format!("random needs range >= 0, got {range}"))
            }
            _ => Ok(()),
        }
    }

    pub fn generate(&self, grid: GridSpec) -> Result<Weight> {
        self.validate(&grid)?;
        let values = match *self {
            WeightKind::Const { c } => vec![c; grid.cell_count()],
            WeightKind::Power { alpha, center } => power(&grid, alpha, center),
            WeightKind::Flat { delta, shape } => flat_profile(&grid, shape).into_iter().map(|p| 1.0 + delta * p).collect(),
            WeightKind::Step { ratio, split } => step(&grid, ratio, split),
            WeightKind::Random { range, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..grid.cell_count()).map(|_| (range * (rng.gen::<f64>() - 0.5)).exp()).collect()
            }
        };
        Weight::new(grid, values)
    }
}

/// A generator kind on a concrete grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightFamilySpec {
    pub kind: WeightKind,
    pub grid: GridSpec,
}

impl WeightFamilySpec {
    pub fn generate(&self) -> Result<Weight> {
        self.kind.generate(self.grid)
    }
}

pub fn generate(spec: &WeightFamilySpec) -> Result<Weight> {
    spec.generate()
}

fn power(grid: &GridSpec, alpha: f64, center: f64) -> Vec<f64> {
    let h = grid.cell_width();
    if grid.dim() == 1 {
        let anti = |u: f64| u.signum() * u.abs().powf(alpha + 1.0) / (alpha + 1.0);
        (0..grid.cell_count())
            .map(|i| {
                let a = i as f64 * h - center;
                (anti(a + h) - anti(a)) / h
            })
            .collect()
    } else {
        (0..grid.cell_count())
            .map(|i| {
                let c = grid.cell_center(i);
                let r = ((c[0] - center).powi(2) + (c[1] - center).powi(2)).sqrt();
                if r < 1e-15 {
                    // Average over the disc of the cell's area.
                    let rho = h / std::f64::consts::PI.sqrt();
                    2.0 * rho.powf(alpha) / (alpha + 2.0)
                } else {
                    r.powf(alpha)
                }
            })
            .collect()
    }
}

fn step(grid: &GridSpec, ratio: f64, split: f64) -> Vec<f64> {
    let h = grid.cell_width();
    (0..grid.cell_count())
        .map(|i| {
            let a = grid.coords(i)[0] as f64 * h;
            let left = ((split - a) / h).clamp(0.0, 1.0);
            ratio * left + (1.0 - left)
        })
        .collect()
}

/// Mean-zero profile with `|φ| <= 1` on the grid.
pub fn flat_profile(grid: &GridSpec, shape: FlatShape) -> Vec<f64> {
    let h = grid.cell_width();
    let tau = 2.0 * std::f64::consts::PI;
    let axis = |k: usize| -> f64 {
        let a = k as f64 * h;
        match shape {
            FlatShape::Sin => ((tau * a).cos() - (tau * (a + h)).cos()) / (tau * h),
            FlatShape::Saw => 2.0 * ((2.0 * (a + h / 2.0)).fract()) - 1.0,
            FlatShape::Bump => unreachable!(),
        }
    };
    let cells = grid.cell_count();
    match shape {
        FlatShape::Sin | FlatShape::Saw => (0..cells)
            .map(|i| {
                let c = grid.coords(i);
                if grid.dim() == 1 {
                    axis(c[0])
                } else {
                    axis(c[0]) * axis(c[1])
                }
            })
            .collect(),
        FlatShape::Bump => {
            let raw: Vec<f64> = (0..cells)
                .map(|i| {
                    let x = grid.cell_center(i);
                    let r2 = (0..grid.dim()).map(|k| (x[k] - 0.5).powi(2)).sum::<f64>();
                    (-r2 / (2.0 * 0.15f64.powi(2))).exp()
                })
                .collect();
            let mean = raw.iter().sum::<f64>() / cells as f64;
            let top = raw.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
            if top == 0.0 {
                vec![0.0; cells]
            } else {
                raw.iter().map(|v| (v - mean) / top).collect()
            }
        }
    }
}

/// Test functions for the Sobolev checks: `x`, `sinsin`
/// (`sin 2πx sin 2πy`), `bump`, sampled at cell centers.
pub fn test_function(name: &str, grid: GridSpec) -> Result<GridFn> {
    let tau = 2.0 * std::f64::consts::PI;
    match name {
        "x" => GridFn::from_fn(grid, |p| p[0]),
        "sinsin" => GridFn::from_fn(grid, |p| (tau * p[0]).sin() * if grid.dim() == 2 { (tau * p[1]).sin() } else { 1.0 }),
        "bump" => GridFn::from_fn(grid, |p| {
            let r2 = (0..grid.dim()).map(|k| (p[k] - 0.5).powi(2)).sum::<f64>();
            (-r2 / (2.0 * 0.15f64.powi(2))).exp()
        }),
        _ => Err(Error::Parse(format!("unknown test function `{name}`"))),
    }
}

fn fmt_f(v: f64) -> String {
    format!("{v}")
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightKind::Const { c } => write!(f, "const:c={}", fmt_f(*c)),
            WeightKind::Power { alpha, center } => write!(f, "power:alpha={},center={}", fmt_f(*alpha), fmt_f(*center)),
            WeightKind::Flat { delta, shape } => write!(f, "flat:delta={},shape={}", fmt_f(*delta), shape.label()),
            WeightKind::Step { ratio, split } => write!(f, "step:ratio={},split={}", fmt_f(*ratio), fmt_f(*split)),
            WeightKind::Random { range, seed } => write!(f, "random:range={},seed={seed}", fmt_f(*range)),
        }
    }
}

impl FromStr for WeightKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        for item in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{item}`")))?;
            kv.insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
        }
        let mut take = |key: &str| kv.remove(key);
        let num = |v: Option<String>, key: &str, default: Option<f64>| -> Result<f64> {
            match v {
                Some(t) => t.parse().map_err(|_| Error::Parse(format!("{key}: bad number `{t}`"))),
                None => default.ok_or_else(|| Error::Parse(format!("missing key `{key}`"))),
            }
        };
        let out = match kind.trim().to_ascii_lowercase().as_str() {
            "const" | "constant" => WeightKind::Const { c: num(take("c"), "c", Some(1.0))? },
            "power" => WeightKind::Power {
                alpha: num(take("alpha"), "alpha", None)?,
                center: num(take("center"), "center", Some(0.5))?,
            },
            "flat" => WeightKind::Flat {
                delta: num(take("delta"), "delta", None)?,
                shape: take("shape").map(|s| s.parse()).transpose()?.unwrap_or(FlatShape::Sin),
            },
            "step" => WeightKind::Step {
                ratio: num(take("ratio"), "ratio", None)?,
                split: num(take("split"), "split", Some(0.5))?,
            },
            "random" => WeightKind::Random {
                range: num(take("range"), "range", Some(1.0))?,
                seed: match take("seed") {
                    Some(t) => t.parse().map_err(|_| Error::Parse(format!("seed: bad integer `{t}`")))?,
                    None => 0,
                },
            },
            other => return Err(Error::Parse(format!("unknown weight kind `{other}`"))),
        };
        if let Some(k) = kv.keys().next() {
            return Err(Error::Parse(format!("unexpected key `{k}` for {kind}")));
        }
        Ok(out)
    }
}
