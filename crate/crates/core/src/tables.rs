//! Summed-area and range-extremum tables over grid functions.
//!
//! Prefix sums are accumulated in double-double arithmetic so that a cube
//! sum recovered by inclusion-exclusion is correctly rounded up to a few
//! ulps, independent of how large the rest of the grid is.

use crate::grid::{Cube, GridFn, GridSpec};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

impl Dd {
    #[inline]
    fn from_f64(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }

    #[inline]
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    #[inline]
    fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// Summed-area table for a grid function (1D or 2D).
#[derive(Debug, Clone)]
pub(crate) struct Prefix {
    n: usize,
    side: usize,
    table: Vec<Dd>,
}

impl Prefix {
    pub(crate) fn new(f: &GridFn) -> Self {
        Self::from_values(f.grid(), f.values())
    }

    pub(crate) fn from_values(grid: &GridSpec, values: &[f64]) -> Self {
        let n = grid.dim();
        let side = grid.cells_per_side();
        match n {
            1 => {
                let mut table = Vec::with_capacity(side + 1);
                let mut acc = Dd::default();
                table.push(acc);
                for &v in values {
                    acc = acc.add(Dd::from_f64(v));
                    table.push(acc);
                }
                Prefix { n, side, table }
            }
            _ => {
                let w = side + 1;
                let mut table = vec![Dd::default(); w * w];
                for i in 0..side {
                    let mut row = Dd::default();
                    for j in 0..side {
                        row = row.add(Dd::from_f64(values[i * side + j]));
                        table[(i + 1) * w + j + 1] = table[i * w + j + 1].add(row);
                    }
                }
                Prefix { n, side, table }
            }
        }
    }

    /// Sum over the box `[lo[k], hi[k])` in cell coordinates.
    #[inline]
    pub(crate) fn box_sum(&self, lo: [usize; 2], hi: [usize; 2]) -> f64 {
        if self.n == 1 {
            return self.table[hi[0]].sub(self.table[lo[0]]).to_f64();
        }
        let w = self.side + 1;
        let t = &self.table;
        t[hi[0] * w + hi[1]]
            .sub(t[lo[0] * w + hi[1]])
            .sub(t[hi[0] * w + lo[1]])
            .add(t[lo[0] * w + lo[1]])
            .to_f64()
    }

    #[inline]
    pub(crate) fn cube_sum(&self, q: &Cube) -> f64 {
        let lo = q.anchor();
        self.box_sum(lo, [lo[0] + q.side(), lo[1] + q.side()])
    }
}

/// Sparse table answering min and max over cubes in O(1).
#[derive(Debug, Clone)]
pub(crate) struct RangeExtrema {
    n: usize,
    side: usize,
    mins: Vec<Vec<f64>>,
    maxs: Vec<Vec<f64>>,
}

impl RangeExtrema {
    pub(crate) fn new(f: &GridFn) -> Self {
        let n = f.grid().dim();
        let side = f.grid().cells_per_side();
        let mut mins = vec![f.values().to_vec()];
        let mut maxs = vec![f.values().to_vec()];
        let mut k = 1;
        while (1 << k) <= side {
            let half = 1 << (k - 1);
            let span = side - (1 << k) + 1;
            let (pm, px) = (&mins[k - 1], &maxs[k - 1]);
            let mut nm = vec![0.0; pm.len()];
            let mut nx = vec![0.0; px.len()];
            if n == 1 {
                for i in 0..span {
                    nm[i] = pm[i].min(pm[i + half]);
                    nx[i] = px[i].max(px[i + half]);
                }
            } else {
                for i in 0..span {
                    for j in 0..span {
                        let a = i * side + j;
                        let b = (i + half) * side + j;
                        nm[a] = pm[a].min(pm[a + half]).min(pm[b]).min(pm[b + half]);
                        nx[a] = px[a].max(px[a + half]).max(px[b]).max(px[b + half]);
                    }
                }
            }
            mins.push(nm);
            maxs.push(nx);
            k += 1;
        }
        RangeExtrema { n, side, mins, maxs }
    }

    fn query(&self, tables: &[Vec<f64>], q: &Cube, pick: fn(f64, f64) -> f64) -> f64 {
        let s = q.side();
        let k = (usize::BITS - 1 - s.leading_zeros()) as usize;
        let t = &tables[k];
        let off = s - (1 << k);
        let [a, b] = q.anchor();
        if self.n == 1 {
            pick(t[a], t[a + off])
        } else {
            let idx = |i: usize, j: usize| t[i * self.side + j];
            pick(
                pick(idx(a, b), idx(a + off, b)),
                pick(idx(a, b + off), idx(a + off, b + off)),
            )
        }
    }

    pub(crate) fn min(&self, q: &Cube) -> f64 {
        self.query(&self.mins, q, f64::min)
    }

    pub(crate) fn max(&self, q: &Cube) -> f64 {
        self.query(&self.maxs, q, f64::max)
    }
}
