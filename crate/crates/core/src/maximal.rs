//! Local Hardy-Littlewood maximal function `M(w chi_Q)` over a cube family,
//! and the reverse weak (1,1) estimate.
//!
//! For a cube `Q` the candidate cubes `R` are the family members (plus every
//! single cell) that intersect `Q`; `R` may stick out of `Q`, where the
//! integrand vanishes. When `Q` itself belongs to the family, candidates of
//! side `>= side(Q)` are dominated by `Q` and are skipped. With unit anchor
//! stride only cubes inside `Q` (and the smallest cube containing it) matter.
//!
//! For one candidate side `t` the averages `w(R ∩ Q) / |R|` live on the
//! anchor lattice; the max over all `R ∋ x` is a sliding-window maximum
//! over that lattice, done separably per coordinate.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::grid::{Cube, CubeFamily, GridSpec, Weight};
use crate::tables::Prefix;
use crate::verify::CheckResult;

/// Values of a grid function on the cells of one cube, in the order of
/// [`GridSpec::cells_of`].
#[derive(Debug, Clone, PartialEq)]
pub struct CubeFn {
    pub cube: Cube,
    pub values: Vec<f64>,
}

/// Shared state for many maximal-function evaluations on one weight.
pub(crate) struct MaximalEngine<'a> {
    grid: GridSpec,
    w: &'a [f64],
    prefix: Prefix,
    family: CubeFamily,
    sides: Vec<usize>,
}

/// Prefix sums of `w` over the cells of one cube, in local coordinates.
struct LocalPrefix {
    side: usize,
    table: Vec<f64>,
}

impl LocalPrefix {
    fn new(grid: &GridSpec, w: &[f64], q: &Cube) -> Self {
        let s = q.side();
        if grid.dim() == 1 {
            let mut table = Vec::with_capacity(s + 1);
            let mut acc = 0.0;
            table.push(acc);
            for i in grid.cells_of(q) {
                acc += w[i];
                table.push(acc);
            }
            return LocalPrefix { side: s, table };
        }
        let stride = s + 1;
        let mut table = vec![0.0; stride * stride];
        let n = grid.cells_per_side();
        let [a0, a1] = q.anchor();
        for i in 0..s {
            let mut row = 0.0;
            let base = (a0 + i) * n + a1;
            for j in 0..s {
                row += w[base + j];
                table[(i + 1) * stride + j + 1] = table[i * stride + j + 1] + row;
            }
        }
        LocalPrefix { side: s, table }
    }

    fn total(&self) -> f64 {
        *self.table.last().expect("nonempty")
    }

    #[inline]
    fn sum1(&self, lo: usize, hi: usize) -> f64 {
        self.table[hi] - self.table[lo]
    }

    #[inline]
    fn sum2(&self, l0: usize, h0: usize, l1: usize, h1: usize) -> f64 {
        let st = self.side + 1;
        let t = &self.table;
        (t[h0 * st + h1] - t[l0 * st + h1]) - (t[h0 * st + l1] - t[l0 * st + l1])
    }
}

/// For each output slot `x`, the max of `vals[k]` over `k ∈ [lo(x), hi(x)]`.
/// Both bounds must be nondecreasing in `x`. Empty windows give `-inf`.
fn window_max(vals: &[f64], bounds: impl Iterator<Item = (isize, isize)>, out: &mut Vec<f64>) {
    out.clear();
    let mut dq: VecDeque<usize> = VecDeque::new();
    let mut next = 0usize;
    for (lo, hi) in bounds {
        let hi = hi.min(vals.len() as isize - 1);
        while (next as isize) <= hi {
            while let Some(&b) = dq.back() {
                if vals[b] <= vals[next] {
                    dq.pop_back();
                } else {
                    break;
                }
            }
            dq.push_back(next);
            next += 1;
        }
        while let Some(&f) = dq.front() {
            if (f as isize) < lo {
                dq.pop_front();
            } else {
                break;
            }
        }
        out.push(match dq.front() {
            Some(&f) if lo <= hi => vals[f],
            _ => f64::NEG_INFINITY,
        });
    }
}

/// Same contract as [`window_max`] for windows of exactly `width` slots,
/// clipped only at the two ends of `vals` (van Herk / Gil-Werman).
fn window_max_fixed(
    vals: &[f64],
    width: usize,
    bounds: impl Iterator<Item = (isize, isize)>,
    pre: &mut Vec<f64>,
    suf: &mut Vec<f64>,
    out: &mut Vec<f64>,
) {
    let len = vals.len();
    pre.clear();
    pre.extend_from_slice(vals);
    suf.clear();
    suf.extend_from_slice(vals);
    for i in 1..len {
        if i % width != 0 {
            pre[i] = pre[i].max(pre[i - 1]);
        }
    }
    for i in (0..len.saturating_sub(1)).rev() {
        if (i + 1) % width != 0 {
            suf[i] = suf[i].max(suf[i + 1]);
        }
    }
    out.clear();
    for (lo, hi) in bounds {
        let hi = hi.min(len as isize - 1);
        out.push(if lo > hi {
            f64::NEG_INFINITY
        } else {
            let (lo, hi) = (lo as usize, hi as usize);
            if lo / width != hi / width {
                suf[lo].max(pre[hi])
            } else if lo % width == 0 {
                // Starts a block: left-clipped or a full block.
                pre[hi]
            } else {
                // Only a right-clipped window ends inside its block.
                suf[lo]
            }
        });
    }
}

fn div_ceil(a: isize, b: isize) -> isize {
    (a + b - 1).div_euclid(b)
}

impl<'a> MaximalEngine<'a> {
    pub(crate) fn new(w: &'a Weight, family: &CubeFamily) -> Self {
        MaximalEngine {
            grid: *w.grid(),
            w: w.values(),
            prefix: Prefix::new(w.as_fn()),
            family: *family,
            sides: family.sides(w.grid()),
        }
    }

    pub(crate) fn prefix(&self) -> &Prefix {
        &self.prefix
    }

    /// `M(w chi_Q)` on the cells of `q` (in `cells_of` order).
    pub(crate) fn on_cube(&self, q: &Cube) -> Vec<f64> {
        let family = &self.family;
        let grid = &self.grid;
        let n_side = grid.cells_per_side() as isize;
        let dim = grid.dim();
        let s = q.side();
        let qa = q.anchor();
        let mut m: Vec<f64> = grid.cells_of(q).map(|i| self.w[i]).collect();
        let in_family = family.contains(grid, q);
        if in_family {
            let avg = self.prefix.cube_sum(q) / q.cell_count() as f64;
            for v in m.iter_mut() {
                *v = v.max(avg);
            }
        }
        // Sums over R ∩ Q come from a prefix table local to Q: only the
        // cells of Q enter, so plain f64 accumulation stays accurate.
        let local = LocalPrefix::new(grid, self.w, q);
        let (mut scratch, mut pre, mut suf) = (Vec::new(), Vec::new(), Vec::new());
        let mut vals = Vec::new();
        for &t in &self.sides {
            if in_family && t >= s {
                continue;
            }
            let a = family.anchor_stride(t) as isize;
            let ti = t as isize;
            if a == 1 && t > s {
                // Some side-t cube contains Q; it beats every other of that side.
                let avg = local.total() / (t as f64).powi(dim as i32);
                for v in m.iter_mut() {
                    *v = v.max(avg);
                }
                continue;
            }
            // Anchor index ranges (lattice index m, anchor = m * a) per axis.
            // With unit stride a cube sticking out of Q is dominated by a
            // cube of the same side inside Q covering R ∩ Q.
            let mut ranges = [(0isize, -1isize); 2];
            for k in 0..dim {
                let (lo, hi) = if a == 1 {
                    (qa[k] as isize, (qa[k] + s - t) as isize)
                } else {
                    (
                        (qa[k] as isize - ti + 1).max(0),
                        (qa[k] as isize + s as isize - 1).min(n_side - ti),
                    )
                };
                ranges[k] = (div_ceil(lo, a), hi.div_euclid(a));
            }
            if (0..dim).any(|k| ranges[k].0 > ranges[k].1) {
                continue;
            }
            let inv_vol = 1.0 / (t as f64).powi(dim as i32);
            // Window of lattice indices covering cell coordinate x on axis k.
            let window = |k: usize, x: usize| -> (isize, isize) {
                let x = x as isize;
                let lo = div_ceil(x - ti + 1, a).max(ranges[k].0) - ranges[k].0;
                let hi = x.div_euclid(a).min(ranges[k].1) - ranges[k].0;
                (lo, hi)
            };
            // Local index range of R ∩ Q along axis k.
            let clip = |k: usize, mi: isize| -> (usize, usize) {
                let start = mi * a - qa[k] as isize;
                (start.max(0) as usize, ((start + ti) as usize).min(s))
            };
            if dim == 1 {
                vals.clear();
                vals.extend((ranges[0].0..=ranges[0].1).map(|mi| {
                    let (l, h) = clip(0, mi);
                    local.sum1(l, h) * inv_vol
                }));
                let bounds = (0..s).map(|j| window(0, qa[0] + j));
                if a == 1 {
                    window_max_fixed(&vals, t, bounds, &mut pre, &mut suf, &mut scratch);
                } else {
                    window_max(&vals, bounds, &mut scratch);
                }
                for (v, c) in m.iter_mut().zip(&scratch) {
                    *v = v.max(*c);
                }
            } else {
                let k0 = (ranges[0].1 - ranges[0].0 + 1) as usize;
                let k1 = (ranges[1].1 - ranges[1].0 + 1) as usize;
                let cols: Vec<(usize, usize)> = (0..k1).map(|c| clip(1, ranges[1].0 + c as isize)).collect();
                let col_windows: Vec<(isize, isize)> = (0..s).map(|j| window(1, qa[1] + j)).collect();
                // Row pass: for every anchor row, max along axis 1 per output column.
                let mut rowmax = vec![f64::NEG_INFINITY; k0 * s];
                for r in 0..k0 {
                    let (l0, h0) = clip(0, ranges[0].0 + r as isize);
                    vals.clear();
                    vals.extend(cols.iter().map(|&(l1, h1)| local.sum2(l0, h0, l1, h1) * inv_vol));
                    if a == 1 {
                        window_max_fixed(&vals, t, col_windows.iter().copied(), &mut pre, &mut suf, &mut scratch);
                    } else {
                        window_max(&vals, col_windows.iter().copied(), &mut scratch);
                    }
                    rowmax[r * s..(r + 1) * s].copy_from_slice(&scratch);
                }
                // Column pass along axis 0.
                let row_windows: Vec<(isize, isize)> = (0..s).map(|i| window(0, qa[0] + i)).collect();
                let mut col = vec![0.0; k0];
                for j in 0..s {
                    for r in 0..k0 {
                        col[r] = rowmax[r * s + j];
                    }
                    if a == 1 {
                        window_max_fixed(&col, t, row_windows.iter().copied(), &mut pre, &mut suf, &mut scratch);
                    } else {
                        window_max(&col, row_windows.iter().copied(), &mut scratch);
                    }
                    for (i, c) in scratch.iter().enumerate() {
                        let v = &mut m[i * s + j];
                        *v = v.max(*c);
                    }
                }
            }
        }
        m
    }
}

/// `M(w chi_Q)` restricted to `q`.
pub fn local_maximal(w: &Weight, q: &Cube, family: &CubeFamily) -> Result<CubeFn> {
    w.grid().check(q)?;
    let values = MaximalEngine::new(w, family).on_cube(q);
    Ok(CubeFn { cube: *q, values })
}

/// Reverse weak (1,1): `(1/t) ∫_{w > t} w <= 2^n |{M(w chi_Q) > t}|` on `q`,
/// for `t > w_Q`. Provable for the dyadic family; other families report the
/// observed ratio.
pub fn reverse_weak_11(w: &Weight, q: &Cube, t: f64, family: &CubeFamily) -> Result<CheckResult> {
    let grid = w.grid();
    grid.check(q)?;
    let average = w.as_fn().average(q)?;
    if !(t > average) {
        return Err(Error::InvalidThreshold { t, average });
    }
    let m = MaximalEngine::new(w, family).on_cube(q);
    let h_n = grid.cell_volume();
    let heavy: f64 = grid
        .cells_of(q)
        .map(|i| w.values()[i])
        .filter(|&v| v > t)
        .sum();
    let lhs = heavy * h_n / t;
    let count = m.iter().filter(|&&v| v > t).count();
    let rhs = (1u32 << grid.dim()) as f64 * count as f64 * h_n;
    Ok(CheckResult::new("reverse_weak_11", lhs, rhs, 1e-9)
        .with_witness(Some(*q))
        .param("t", t)
        .param("family", family.label())
        .param("exploratory", !matches!(family, CubeFamily::Dyadic)))
}

/// Thresholds where the level sets change: midpoints between consecutive
/// distinct values of `w` on `q`, kept when above `w_Q`.
pub fn threshold_grid(w: &Weight, q: &Cube) -> Result<Vec<f64>> {
    let avg = w.as_fn().average(q)?;
    let mut vals: Vec<f64> = w.grid().cells_of(q).map(|i| w.values()[i]).collect();
    vals.sort_by(f64::total_cmp);
    vals.dedup();
    let mut out: Vec<f64> = vals.windows(2).map(|p| 0.5 * (p[0] + p[1])).filter(|&t| t > avg).collect();
    if let Some(&top) = vals.last() {
        if top > avg {
            out.push(top * 1.5);
        }
    }
    Ok(out)
}
