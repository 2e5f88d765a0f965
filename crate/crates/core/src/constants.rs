//! Weight constants and BMO-type seminorms, each a supremum over a cube
//! family.
//!
//! Every supremum is reduced in parallel; ties are broken by enumeration
//! order, so values and witnesses do not depend on the thread schedule.
//! Constant weights short-circuit to the exact neutral values.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Cube, CubeFamily, DoublingMode, GridFn, GridSpec, Weight};
use crate::maximal::MaximalEngine;
use crate::tables::{Prefix, RangeExtrema};

/// A supremum over a cube family together with the cube attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sup {
    pub value: f64,
    pub witness: Cube,
}

/// Dynamic range of `(p' - 1) * log(max/min)` up to which `a_p` uses
/// prefix sums; above it every cube is rescaled by its own minimum.
const AP_PREFIX_RANGE: f64 = 36.0;

/// Parallel, schedule-independent argmax over indices `0..len`. NaN never
/// wins; ties go to the lower index. `None` when `len == 0`.
fn argmax<F>(len: usize, f: F) -> Option<(f64, usize)>
where
    F: Fn(usize) -> f64 + Sync,
{
    let best = (0..len)
        .into_par_iter()
        .map(|i| {
            let v = f(i);
            (if v.is_nan() { f64::NEG_INFINITY } else { v }, i)
        })
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |a, b| {
                if a.0 > b.0 || (a.0 == b.0 && a.1 < b.1) {
                    a
                } else {
                    b
                }
            },
        );
    (best.1 != usize::MAX).then_some(best)
}

pub(crate) fn sup_over<F>(cubes: &[Cube], f: F) -> Option<Sup>
where
    F: Fn(&Cube) -> f64 + Sync,
{
    argmax(cubes.len(), |i| f(&cubes[i])).map(|(value, i)| Sup { value, witness: cubes[i] })
}

/// Schedule-independent argmax over a whole family, scanning runs of
/// neighbouring cubes sequentially.
fn family_argmax<F>(grid: &GridSpec, family: &CubeFamily, f: F) -> (f64, Cube)
where
    F: Fn(&Cube) -> f64 + Sync,
{
    let index = grid.cube_index(family);
    let best = index
        .runs(256)
        .par_iter()
        .map(|run| {
            let mut best = (f64::NEG_INFINITY, usize::MAX);
            for j in 0..run.len {
                let v = f(&run.cube(j));
                if v > best.0 || best.1 == usize::MAX && !v.is_nan() {
                    best = (v, run.start + j);
                }
            }
            best
        })
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |a, b| {
                if a.1 == usize::MAX || (b.1 != usize::MAX && (b.0 > a.0 || (b.0 == a.0 && b.1 < a.1))) {
                    b
                } else {
                    a
                }
            },
        );
    // NaN everywhere leaves no candidate; report the first cube.
    let i = if best.1 == usize::MAX { 0 } else { best.1 };
    (best.0, index.get(i))
}

fn family_sup<F>(grid: &GridSpec, family: &CubeFamily, f: F) -> Sup
where
    F: Fn(&Cube) -> f64 + Sync,
{
    let (value, witness) = family_argmax(grid, family, f);
    Sup { value, witness }
}

fn neutral(grid: &GridSpec, value: f64) -> Sup {
    Sup { value, witness: grid.domain() }
}

/// `[w]_{A_p} = sup_Q w_Q (σ_Q)^(p-1)`, `σ = w^(1-p')`.
pub fn a_p(w: &Weight, p: f64, family: &CubeFamily) -> Result<Sup> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidExponent(format!("A_p needs 1 < p < inf, got {p}")));
    }
    let grid = *w.grid();
    if w.is_constant() {
        return Ok(neutral(&grid, 1.0));
    }
    // p' - 1 = 1 / (p - 1).
    let k = 1.0 / (p - 1.0);
    let logs = w.log();
    let ext = RangeExtrema::new(&logs);
    let dom = grid.domain();
    let (lmin, lmax) = (ext.min(&dom), ext.max(&dom));
    let pw = Prefix::new(w.as_fn());
    if k * (lmax - lmin) <= AP_PREFIX_RANGE {
        let scaled: Vec<f64> = logs.values().iter().map(|l| (-k * (l - lmin)).exp()).collect();
        let ps = Prefix::from_values(&grid, &scaled);
        let wmin = lmin.exp();
        Ok(family_sup(&grid, family, |q| {
            let cnt = q.cell_count() as f64;
            (pw.cube_sum(q) / cnt / wmin) * (ps.cube_sum(q) / cnt).powf(p - 1.0)
        }))
    } else {
        Ok(family_sup(&grid, family, |q| {
            let cnt = q.cell_count() as f64;
            let m = ext.min(q);
            let s: f64 = grid.cells_of(q).map(|i| (-k * (logs.values()[i] - m)).exp()).sum();
            (pw.cube_sum(q) / cnt / m.exp()) * (s / cnt).powf(p - 1.0)
        }))
    }
}

/// `[w]_{A_1} = sup_Q w_Q · max_Q (1/w)`.
pub fn a_1(w: &Weight, family: &CubeFamily) -> Sup {
    let grid = *w.grid();
    if w.is_constant() {
        return neutral(&grid, 1.0);
    }
    let pw = Prefix::new(w.as_fn());
    let ext = RangeExtrema::new(w.as_fn());
    family_sup(&grid, family, |q| pw.cube_sum(q) / q.cell_count() as f64 / ext.min(q))
}

/// Fujii-Wilson `[w]_{A_∞} = sup_Q (1/w(Q)) ∫_Q M(w χ_Q)`.
pub fn fujii_wilson(w: &Weight, family: &CubeFamily) -> Sup {
    let grid = *w.grid();
    if w.is_constant() {
        return neutral(&grid, 1.0);
    }
    let engine = MaximalEngine::new(w, family);
    family_sup(&grid, family, |q| {
        let m: f64 = engine.on_cube(q).iter().sum();
        m / engine.prefix().cube_sum(q)
    })
}

/// Hruščev `[w]'_{A_∞} = sup_Q w_Q exp(-(log w)_Q)`.
pub fn hruscev(w: &Weight, family: &CubeFamily) -> Sup {
    let grid = *w.grid();
    if w.is_constant() {
        return neutral(&grid, 1.0);
    }
    let pw = Prefix::new(w.as_fn());
    let pl = Prefix::new(&w.log());
    family_sup(&grid, family, |q| {
        let cnt = q.cell_count() as f64;
        pw.cube_sum(q) / cnt * (-pl.cube_sum(q) / cnt).exp()
    })
}

/// `[w]^log_{A_∞} = sup_Q (1/w(Q)) ∫_Q (1 + log+(w / w_Q)) w`.
pub fn log_ainfty(w: &Weight, family: &CubeFamily) -> Sup {
    let grid = *w.grid();
    if w.is_constant() {
        return neutral(&grid, 1.0);
    }
    let pw = Prefix::new(w.as_fn());
    let v = w.values();
    family_sup(&grid, family, |q| {
        let total = pw.cube_sum(q);
        let avg = total / q.cell_count() as f64;
        let excess: f64 = grid
            .cells_of(q)
            .map(|i| v[i])
            .filter(|&x| x > avg)
            .map(|x| x * (x / avg).ln())
            .sum();
        1.0 + excess / total
    })
}

/// `||f||_BMO = sup_Q (1/|Q|) ∫_Q |f - f_Q|`.
pub fn bmo(f: &GridFn, family: &CubeFamily) -> Sup {
    let grid = *f.grid();
    if f.is_constant() {
        return neutral(&grid, 0.0);
    }
    let pf = Prefix::new(f);
    let v = f.values();
    family_sup(&grid, family, |q| {
        let cnt = q.cell_count() as f64;
        let mean = pf.cube_sum(q) / cnt;
        grid.cells_of(q).map(|i| (v[i] - mean).abs()).sum::<f64>() / cnt
    })
}

/// `||f||_{BMO_w} = sup_Q (1/w(Q)) ∫_Q |f - f_{Q,w}| w`.
pub fn bmo_w(f: &GridFn, w: &Weight, family: &CubeFamily) -> Result<Sup> {
    f.same_grid(w.as_fn())?;
    let grid = *f.grid();
    if f.is_constant() {
        return Ok(neutral(&grid, 0.0));
    }
    let pw = Prefix::new(w.as_fn());
    let fw: Vec<f64> = f.values().iter().zip(w.values()).map(|(a, b)| a * b).collect();
    let pfw = Prefix::from_values(&grid, &fw);
    let (fv, wv) = (f.values(), w.values());
    Ok(family_sup(&grid, family, |q| {
        let mass = pw.cube_sum(q);
        let center = pfw.cube_sum(q) / mass;
        grid.cells_of(q).map(|i| (fv[i] - center).abs() * wv[i]).sum::<f64>() / mass
    }))
}

/// Observed doubling constant `sup w(2Q) / w(Q)` over cubes whose double is
/// admissible under `mode`.
pub fn doubling(w: &Weight, family: &CubeFamily, mode: DoublingMode) -> Result<Sup> {
    let grid = *w.grid();
    let pw = Prefix::new(w.as_fn());
    let (value, witness) = family_argmax(&grid, family, |q| match grid.double_cube(q, mode) {
        Some(d) => pw.cube_sum(&d) / pw.cube_sum(q),
        None => f64::NEG_INFINITY,
    });
    if value == f64::NEG_INFINITY {
        return Err(Error::NoAdmissibleCube);
    }
    Ok(Sup { value, witness })
}

/// Luxemburg norm of `f` in `exp L(Q, w dx / w(Q))`: the `λ` with
/// `(1/w(Q)) ∫_Q exp(|f| / λ) w = 2`.
pub fn exp_luxemburg(f: &GridFn, q: &Cube, w: &Weight) -> Result<f64> {
    f.same_grid(w.as_fn())?;
    let grid = *f.grid();
    grid.check(q)?;
    let cells: Vec<(f64, f64)> = grid
        .cells_of(q)
        .map(|i| (f.values()[i].abs(), w.values()[i]))
        .collect();
    let mass: f64 = cells.iter().map(|c| c.1).sum();
    let (top, top_w) = cells
        .iter()
        .fold((0.0f64, 0.0f64), |acc, &(a, m)| if a > acc.0 { (a, m) } else { acc });
    if top == 0.0 {
        return Ok(0.0);
    }
    // Mean of exp(|f|/λ), rescaled by exp(-top/λ) to stay finite.
    let excess = |lam: f64| -> f64 {
        let s: f64 = cells.iter().map(|&(a, m)| ((a - top) / lam).exp() * m).sum();
        (s / mass).ln() + top / lam - 2f64.ln()
    };
    // All of |f| at `top` gives the upper end; only the top cell the lower one.
    let mut hi = top / 2f64.ln();
    let mut lo = top / (2.0 * mass / top_w).ln();
    if excess(hi) >= 0.0 {
        return Ok(hi);
    }
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Result of [`jn_sup_r`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JnExponent {
    /// `+inf` when the exponential bound holds for every `r` in the bracket.
    pub r: f64,
    pub witness: Option<Cube>,
}

pub const JN_BRACKET: (f64, f64) = (1e-6, 1e6);
const JN_REL_TOL: f64 = 1e-9;

/// Largest `r` with `sup_Q (1/|Q|) ∫_Q exp(r |log w - (log w)_Q|) <= bound`.
///
/// The returned `r` is on the feasible side of the bisection, so the bound
/// holds at `r` on every cube of the family.
pub fn jn_sup_r(w: &Weight, family: &CubeFamily, bound: f64) -> Result<JnExponent> {
    let raw = jn_exponent_raw(w, family, bound)?;
    let r = if raw.r >= JN_BRACKET.1 {
        f64::INFINITY
    } else if raw.r < JN_BRACKET.0 {
        0.0
    } else {
        raw.r
    };
    Ok(JnExponent { r, ..raw })
}

/// [`jn_sup_r`] without the sentinel clamping at the bracket ends.
pub(crate) fn jn_exponent_raw(w: &Weight, family: &CubeFamily, bound: f64) -> Result<JnExponent> {
    if !(bound > 1.0) {
        return Err(Error::InvalidParameter(format!("bound must exceed 1, got {bound}")));
    }
    let grid = *w.grid();
    if w.is_constant() {
        return Ok(JnExponent { r: f64::INFINITY, witness: None });
    }
    let logs = w.log();
    let lv = logs.values();
    let pl = Prefix::new(&logs);
    let ext = RangeExtrema::new(&logs);
    let cubes = grid.enumerate_cubes(family);
    let ln_b = bound.ln();

    struct Cand {
        idx: usize,
        mean: f64,
        lo: f64,
        hi: f64,
    }
    // Cheap per-cube bracket: exp(r D)/k <= F_Q(r) <= exp(r D).
    let mut cands: Vec<Cand> = cubes
        .par_iter()
        .enumerate()
        .filter_map(|(idx, q)| {
            let cnt = q.cell_count() as f64;
            let mean = pl.cube_sum(q) / cnt;
            let dev = (ext.max(q) - mean).max(mean - ext.min(q));
            (dev > 0.0).then(|| Cand {
                idx,
                mean,
                lo: ln_b / dev,
                hi: (ln_b + cnt.ln()) / dev,
            })
        })
        .collect();
    if cands.is_empty() {
        return Ok(JnExponent { r: f64::INFINITY, witness: None });
    }
    let moment = |c: &Cand, r: f64| -> f64 {
        let q = &cubes[c.idx];
        grid.cells_of(q).map(|i| (r * (lv[i] - c.mean).abs()).exp()).sum::<f64>() / q.cell_count() as f64
    };
    let solve = |c: &Cand| -> f64 {
        let (mut lo, mut hi) = (c.lo, c.hi);
        while hi > lo * (1.0 + JN_REL_TOL) {
            let mid = (lo * hi).sqrt();
            if moment(c, mid) <= bound {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let upper = cands.iter().map(|c| c.hi).fold(f64::INFINITY, f64::min);
    cands.retain(|c| c.lo < upper);
    cands.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.idx.cmp(&b.idx)));
    // Seed with the most extreme cubes, sequentially.
    let mut best = (upper, usize::MAX);
    for c in cands.iter().take(32) {
        let r = solve(c);
        if r < best.0 || (r == best.0 && c.idx < best.1) {
            best = (r, c.idx);
        }
    }
    let seed = best.0;
    let hit = cands
        .par_iter()
        .filter(|c| c.lo < seed && moment(c, seed) > bound)
        .map(|c| (solve(c), c.idx))
        .reduce(
            || (f64::INFINITY, usize::MAX),
            |a, b| if a.0 < b.0 || (a.0 == b.0 && a.1 < b.1) { a } else { b },
        );
    if hit.0 < best.0 || (hit.0 == best.0 && hit.1 < best.1) {
        best = hit;
    }
    if best.1 == usize::MAX {
        // The seed came from the cheap bracket; pin down its cube.
        let c = cands.iter().find(|c| c.hi == upper).expect("bracket owner");
        best = (solve(c), c.idx);
    }
    Ok(JnExponent { r: best.0, witness: Some(cubes[best.1]) })
}

#[derive(Debug, Clone, Serialize)]
pub struct ApEntry {
    pub p: f64,
    pub value: f64,
    pub witness: Cube,
}

#[derive(Debug, Clone, Serialize)]
pub struct DoublingEntry {
    pub value: f64,
    pub witness: Cube,
    pub mode: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct JnEntry {
    /// `null` encodes the `+inf` sentinel.
    pub value: Option<f64>,
    pub witness: Option<Cube>,
}

/// All constants of one weight over one family.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantsReport {
    pub v: u32,
    pub n: usize,
    #[serde(rename = "L")]
    pub level: u32,
    pub family: String,
    pub a_p: Vec<ApEntry>,
    pub a_1: Sup,
    pub fujii_wilson: Sup,
    pub hruscev: Sup,
    pub log_ainfty: Sup,
    pub bmo_log: Sup,
    pub bmo_w_log: Sup,
    pub doubling: Option<DoublingEntry>,
    pub jn_r_star: JnEntry,
}

impl ConstantsReport {
    pub fn compute(w: &Weight, family: &CubeFamily, ps: &[f64], mode: DoublingMode) -> Result<Self> {
        let grid = *w.grid();
        let logw = w.log();
        let a_p = ps
            .iter()
            .map(|&p| a_p(w, p, family).map(|s| ApEntry { p, value: s.value, witness: s.witness }))
            .collect::<Result<Vec<_>>>()?;
        let doubling = match doubling(w, family, mode) {
            Ok(s) => Some(DoublingEntry { value: s.value, witness: s.witness, mode: mode.label() }),
            Err(Error::NoAdmissibleCube) => None,
            Err(e) => return Err(e),
        };
        let jn = jn_sup_r(w, family, 3.0)?;
        Ok(ConstantsReport {
            v: 1,
            n: grid.dim(),
            level: grid.level(),
            family: family.label(),
            a_p,
            a_1: a_1(w, family),
            fujii_wilson: fujii_wilson(w, family),
            hruscev: hruscev(w, family),
            log_ainfty: log_ainfty(w, family),
            bmo_log: bmo(&logw, family),
            bmo_w_log: bmo_w(&logw, w, family)?,
            doubling,
            jn_r_star: JnEntry {
                value: jn.r.is_finite().then_some(jn.r),
                witness: jn.witness,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step() -> Weight {
        Weight::new(GridSpec::new(1, 1).unwrap(), vec![2.0, 1.0]).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn step_weight_closed_forms() {
        let w = step();
        let lg = w.log();
        for fam in [CubeFamily::Dyadic, CubeFamily::aligned(1, 1)] {
            assert!(close(a_p(&w, 2.0, &fam).unwrap().value, 1.125, 1e-15));
            assert!(close(a_1(&w, &fam).value, 1.5, 1e-15));
            assert!(close(hruscev(&w, &fam).value, 1.5 / 2f64.sqrt(), 1e-15));
            assert!(close(log_ainfty(&w, &fam).value, 1.0 + 2.0 / 3.0 * (4.0f64 / 3.0).ln(), 1e-15));
            assert!(close(bmo(&lg, &fam).value, 2f64.ln() / 2.0, 1e-15));
            assert!(close(bmo_w(&lg, &w, &fam).unwrap().value, 4.0 / 9.0 * 2f64.ln(), 1e-15));
            let fw = fujii_wilson(&w, &fam);
            assert!(close(fw.value, 7.0 / 6.0, 1e-15));
            assert_eq!(fw.witness, Cube::interval(0, 2));
        }
        assert!(close(log_ainfty(&w, &CubeFamily::Dyadic).value, 1.19180, 5e-5));
        assert!(close(hruscev(&w, &CubeFamily::Dyadic).value, 1.0606601718, 1e-10));
    }

    #[test]
    fn constant_weights_are_neutral() {
        for n in 1..=2 {
            let g = GridSpec::new(n, 3).unwrap();
            let w = Weight::constant(g, 3.7).unwrap();
            let fam = CubeFamily::aligned(1, 1);
            assert_eq!(a_p(&w, 1.7, &fam).unwrap().value, 1.0);
            assert_eq!(fujii_wilson(&w, &fam).value, 1.0);
            assert_eq!(bmo(&w.log(), &fam).value, 0.0);
            assert_eq!(doubling(&w, &fam, DoublingMode::RequireInside).unwrap().value, (1 << n) as f64);
            assert_eq!(doubling(&w, &fam, DoublingMode::Clip).unwrap().value, (1 << n) as f64);
            assert_eq!(jn_sup_r(&w, &fam, 3.0).unwrap().r, f64::INFINITY);
        }
    }

    #[test]
    fn scale_invariance_on_example() {
        let w = step();
        let w3 = w.scaled(3.0).unwrap();
        let fam = CubeFamily::Dyadic;
        assert!(close(a_p(&w3, 2.0, &fam).unwrap().value, a_p(&w, 2.0, &fam).unwrap().value, 1e-15));
        assert!(close(hruscev(&w3, &fam).value, hruscev(&w, &fam).value, 1e-15));
    }

    #[test]
    fn a_p_paths_agree_across_the_dynamic_range_switch() {
        let g = GridSpec::new(1, 4).unwrap();
        let vals: Vec<f64> = (0..16).map(|i| ((i * 7 % 16) as f64 * 0.2).exp()).collect();
        let w = Weight::new(g, vals).unwrap();
        let fam = CubeFamily::aligned(1, 1);
        // range = 3.0, so k*range crosses the switch between these p.
        for p in [1.09, 1.08, 1.05] {
            let fast = a_p(&w, p, &fam).unwrap().value;
            let k = 1.0 / (p - 1.0);
            let brute = g
                .enumerate_cubes(&fam)
                .iter()
                .map(|q| {
                    let c: Vec<f64> = g.cells_of(q).map(|i| w.values()[i]).collect();
                    let mn = c.iter().cloned().fold(f64::INFINITY, f64::min);
                    let m = c.iter().sum::<f64>() / c.len() as f64;
                    let s = c.iter().map(|v| (v / mn).powf(-k)).sum::<f64>() / c.len() as f64;
                    m / mn * s.powf(p - 1.0)
                })
                .fold(0.0, f64::max);
            assert!(close(fast, brute, 1e-12), "p={p}: {fast} vs {brute}");
        }
    }

    #[test]
    fn doubling_needs_an_admissible_cube() {
        let g = GridSpec::new(1, 0).unwrap();
        let w = Weight::constant(g, 1.0).unwrap();
        assert!(matches!(
            doubling(&w, &CubeFamily::Dyadic, DoublingMode::RequireInside),
            Err(Error::NoAdmissibleCube)
        ));
        let g2 = GridSpec::new(2, 2).unwrap();
        let w2 = Weight::constant(g2, 1.0).unwrap();
        assert_eq!(doubling(&w2, &CubeFamily::Dyadic, DoublingMode::RequireInside).unwrap().value, 4.0);
    }

    #[test]
    fn flat_sine_doubling_is_close_to_two() {
        let g = GridSpec::new(1, 8).unwrap();
        let w = Weight::try_from(
            GridFn::from_fn(g, |x| 1.0 + 0.001 * (2.0 * std::f64::consts::PI * x[0]).sin()).unwrap(),
        )
        .unwrap();
        let d = doubling(&w, &CubeFamily::aligned(1, 1), DoublingMode::RequireInside).unwrap();
        assert!((d.value - 2.0).abs() < 0.02, "{}", d.value);
    }

    #[test]
    fn luxemburg_examples() {
        let g = GridSpec::new(1, 1).unwrap();
        let one = Weight::constant(g, 1.0).unwrap();
        let q = g.domain();
        let zero = GridFn::constant(g, 0.0).unwrap();
        assert_eq!(exp_luxemburg(&zero, &q, &one).unwrap(), 0.0);
        let c = GridFn::constant(g, -1.3).unwrap();
        assert!(close(exp_luxemburg(&c, &q, &one).unwrap(), 1.3 / 2f64.ln(), 1e-12));
        let f = GridFn::new(g, vec![2f64.ln(), 0.0]).unwrap();
        let lam = exp_luxemburg(&f, &q, &one).unwrap();
        // (exp(ln2/λ) + 1)/2 = 2  =>  λ = ln2 / ln3.
        assert!(close(lam, 2f64.ln() / 3f64.ln(), 1e-11));
        // Independent scan: the first grid λ whose modular drops to 2.
        let modular = |l: f64| 0.5 * ((2f64.ln() / l).exp() + 1.0);
        let scan = (1..200_000).map(|i| i as f64 * 1e-5).find(|&l| modular(l) <= 2.0).unwrap();
        assert!((scan - lam).abs() <= 1e-5);
    }

    #[test]
    fn jn_exponent_on_step_weight() {
        let w = step();
        let want = 2.0 * 3f64.ln() / 2f64.ln();
        for fam in [CubeFamily::Dyadic, CubeFamily::aligned(1, 1)] {
            let jn = jn_sup_r(&w, &fam, 3.0).unwrap();
            assert!((jn.r - want).abs() <= 1e-8 * want, "{}", jn.r);
            assert!(jn.r <= want);
            assert_eq!(jn.witness, Some(Cube::interval(0, 2)));
        }
    }

    #[test]
    fn report_serializes_frozen_field_names() {
        let w = step();
        let r = ConstantsReport::compute(&w, &CubeFamily::Dyadic, &[2.0], DoublingMode::Clip).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in [
            "a_p", "a_1", "fujii_wilson", "hruscev", "log_ainfty", "bmo_log", "bmo_w_log", "doubling",
            "jn_r_star",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["v"], 1);
        assert_eq!(v["a_p"][0]["value"], 1.125);
        assert_eq!(v["fujii_wilson"]["witness"]["anchor"], serde_json::json!([0]));
    }
}
