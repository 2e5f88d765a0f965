//! Uniform dyadic grids on the half-open unit cube, grid functions, weights
//! and the cube families every supremum ranges over.
//!
//! Cells are indexed lexicographically: in two dimensions the cell with
//! coordinates `(i, j)` (first coordinate `i`) has linear index `i * N + j`.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tables::Prefix;

const MAX_LEVEL_1D: u32 = 24;
const MAX_LEVEL_2D: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    dim: usize,
    level: u32,
}

impl GridSpec {
    pub fn new(dim: usize, level: u32) -> Result<Self> {
        let max = match dim {
            1 => MAX_LEVEL_1D,
            2 => MAX_LEVEL_2D,
            _ => return Err(Error::InvalidDimension(dim)),
        };
        if level > max {
            return Err(Error::InvalidLevel(level));
        }
        Ok(GridSpec { dim, level })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// N = 2^L.
    pub fn cells_per_side(&self) -> usize {
        1 << self.level
    }

    /// h = 2^-L, exact in binary floating point.
    pub fn cell_width(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_width().powi(self.dim as i32)
    }

    pub fn cell_count(&self) -> usize {
        self.cells_per_side().pow(self.dim as u32)
    }

    pub fn index(&self, coords: [usize; 2]) -> usize {
        match self.dim {
            1 => coords[0],
            _ => coords[0] * self.cells_per_side() + coords[1],
        }
    }

    pub fn coords(&self, index: usize) -> [usize; 2] {
        match self.dim {
            1 => [index, 0],
            _ => {
                let n = self.cells_per_side();
                [index / n, index % n]
            }
        }
    }

    /// Cell center in domain coordinates (unused trailing coordinate is 0).
    pub fn cell_center(&self, index: usize) -> [f64; 2] {
        let h = self.cell_width();
        let c = self.coords(index);
        let mut x = [(c[0] as f64 + 0.5) * h, 0.0];
        if self.dim == 2 {
            x[1] = (c[1] as f64 + 0.5) * h;
        }
        x
    }

    /// The cube covering the whole domain.
    pub fn domain(&self) -> Cube {
        Cube::new(self.dim, [0, 0], self.cells_per_side())
    }

    pub fn contains(&self, q: &Cube) -> bool {
        let n = self.cells_per_side();
        q.dim == self.dim
            && q.side >= 1
            && (0..self.dim).all(|k| q.anchor[k] + q.side <= n)
    }

    pub fn check(&self, q: &Cube) -> Result<()> {
        if self.contains(q) {
            Ok(())
        } else {
            Err(Error::CubeOutOfBounds {
                anchor: q.anchor,
                side: q.side,
            })
        }
    }

    /// Linear indices of the cells of `q`, in lexicographic order.
    pub fn cells_of<'a>(&'a self, q: &'a Cube) -> impl Iterator<Item = usize> + 'a {
        let n = self.cells_per_side();
        let s = q.side;
        let rows = if self.dim == 1 { 1 } else { s };
        let [a, b] = q.anchor;
        let one_d = self.dim == 1;
        (0..rows).flat_map(move |i| {
            (0..s).map(move |j| if one_d { a + j } else { (a + i) * n + b + j })
        })
    }

    /// Every cube of `family`, sorted by side (descending) then anchor
    /// (lexicographic).
    pub fn enumerate_cubes(&self, family: &CubeFamily) -> Vec<Cube> {
        let n = self.cells_per_side();
        let mut out = Vec::new();
        for s in family.sides(self) {
            let stride = family.anchor_stride(s);
            let starts: Vec<usize> = (0..=n - s).step_by(stride).collect();
            if self.dim == 1 {
                out.extend(starts.iter().map(|&a| Cube::new(1, [a, 0], s)));
            } else {
                for &a in &starts {
                    for &b in &starts {
                        out.push(Cube::new(2, [a, b], s));
                    }
                }
            }
        }
        out
    }

    /// Random access to `enumerate_cubes(family)` without materializing it.
    pub(crate) fn cube_index(&self, family: &CubeFamily) -> CubeIndex {
        let n = self.cells_per_side();
        let mut groups = Vec::new();
        let mut offset = 0;
        for s in family.sides(self) {
            let stride = family.anchor_stride(s);
            let m = (n - s) / stride + 1;
            groups.push(Group { side: s, stride, per_axis: m, offset });
            offset += m.pow(self.dim as u32);
        }
        CubeIndex { dim: self.dim, groups }
    }

    /// Concentric double of `q`, kept at side exactly `2s` and snapped to
    /// cell boundaries by rounding the anchor down.
    ///
    /// `RequireInside` returns `None` when the doubled cube leaves the
    /// domain. `Clip` translates it back inside (or returns the whole
    /// domain when `2s > N`); the result always contains `q`.
    pub fn double_cube(&self, q: &Cube, mode: DoublingMode) -> Option<Cube> {
        let n = self.cells_per_side() as isize;
        let s = q.side as isize;
        let back = (s + 1) / 2;
        let mut anchor = [0usize; 2];
        for k in 0..self.dim {
            let a = q.anchor[k] as isize - back;
            let fits = a >= 0 && a + 2 * s <= n;
            anchor[k] = match mode {
                DoublingMode::RequireInside if !fits => return None,
                DoublingMode::RequireInside => a as usize,
                DoublingMode::Clip if 2 * s >= n => return Some(self.domain()),
                DoublingMode::Clip => a.clamp(0, n - 2 * s) as usize,
            };
        }
        Some(Cube::new(self.dim, anchor, 2 * q.side))
    }
}

#[derive(Debug, Clone, Copy)]
struct Group {
    side: usize,
    stride: usize,
    per_axis: usize,
    offset: usize,
}

/// Cubes of a family addressed by their position in enumeration order.
#[derive(Debug, Clone)]
pub(crate) struct CubeIndex {
    dim: usize,
    groups: Vec<Group>,
}

impl CubeIndex {
    #[cfg(test)]
    fn len(&self) -> usize {
        self.groups.iter().map(|g| g.per_axis.pow(self.dim as u32)).sum()
    }

    pub(crate) fn get(&self, i: usize) -> Cube {
        let g = self.groups[self.groups.partition_point(|g| g.offset <= i) - 1];
        let local = i - g.offset;
        if self.dim == 1 {
            Cube::new(1, [local * g.stride, 0], g.side)
        } else {
            Cube::new(2, [local / g.per_axis * g.stride, local % g.per_axis * g.stride], g.side)
        }
    }

    /// Contiguous index ranges whose cubes differ only in the last anchor
    /// coordinate; rows in 2D, chunks of at most `chunk` anchors in 1D.
    pub(crate) fn runs(&self, chunk: usize) -> Vec<Run> {
        let mut out = Vec::new();
        for g in &self.groups {
            if self.dim == 1 {
                let mut j = 0;
                while j < g.per_axis {
                    let len = chunk.min(g.per_axis - j);
                    out.push(Run { start: g.offset + j, len, first: [j * g.stride, 0], side: g.side, stride: g.stride, dim: 1 });
                    j += len;
                }
            } else {
                for r in 0..g.per_axis {
                    out.push(Run {
                        start: g.offset + r * g.per_axis,
                        len: g.per_axis,
                        first: [r * g.stride, 0],
                        side: g.side,
                        stride: g.stride,
                        dim: 2,
                    });
                }
            }
        }
        out
    }
}

/// A contiguous slice of a [`CubeIndex`].
#[derive(Debug, Clone, Copy)]
pub(crate) struct Run {
    pub(crate) start: usize,
    pub(crate) len: usize,
    first: [usize; 2],
    side: usize,
    stride: usize,
    dim: usize,
}

impl Run {
    #[inline]
    pub(crate) fn cube(&self, j: usize) -> Cube {
        let mut anchor = self.first;
        anchor[self.dim - 1] += j * self.stride;
        Cube::new(self.dim, anchor, self.side)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cube {
    dim: usize,
    anchor: [usize; 2],
    side: usize,
}

impl Cube {
    /// Build a cube from cell coordinates. For `dim == 1` the second anchor
    /// coordinate is ignored.
    pub fn new(dim: usize, anchor: [usize; 2], side: usize) -> Self {
        let anchor = if dim == 1 { [anchor[0], 0] } else { anchor };
        Cube { dim, anchor, side }
    }

    pub fn interval(anchor: usize, side: usize) -> Self {
        Cube::new(1, [anchor, 0], side)
    }

    pub fn square(anchor: [usize; 2], side: usize) -> Self {
        Cube::new(2, anchor, side)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn anchor(&self) -> [usize; 2] {
        self.anchor
    }

    /// Side in cells.
    pub fn side(&self) -> usize {
        self.side
    }

    /// Side length l(Q) in domain units.
    pub fn side_length(&self, grid: &GridSpec) -> f64 {
        self.side as f64 * grid.cell_width()
    }

    pub fn volume(&self, grid: &GridSpec) -> f64 {
        self.side_length(grid).powi(self.dim as i32)
    }

    pub fn cell_count(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    pub fn contains_cell(&self, coords: [usize; 2]) -> bool {
        (0..self.dim).all(|k| coords[k] >= self.anchor[k] && coords[k] < self.anchor[k] + self.side)
    }

    pub fn contains_cube(&self, other: &Cube) -> bool {
        (0..self.dim).all(|k| {
            other.anchor[k] >= self.anchor[k]
                && other.anchor[k] + other.side <= self.anchor[k] + self.side
        })
    }
}

impl Serialize for Cube {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Cube", 2)?;
        st.serialize_field("anchor", &self.anchor[..self.dim])?;
        st.serialize_field("side", &self.side)?;
        st.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DoublingMode {
    Clip,
    RequireInside,
}

impl DoublingMode {
    pub fn label(&self) -> &'static str {
        match self {
            DoublingMode::Clip => "clip",
            DoublingMode::RequireInside => "require_inside",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CubeFamily {
    /// All dyadic cubes of side `2^(L-l)`, `l = 0..=L`.
    Dyadic,
    /// Grid-aligned cubes with anchors on the `anchor_stride` sublattice and
    /// sides `1, 1 + side_stride, 1 + 2 side_stride, ...`, always including `N`.
    Aligned { anchor_stride: usize, side_stride: usize },
}

impl CubeFamily {
    pub fn aligned(anchor_stride: usize, side_stride: usize) -> Self {
        CubeFamily::Aligned {
            anchor_stride: anchor_stride.max(1),
            side_stride: side_stride.max(1),
        }
    }

    /// Stride 1 up to level 8, `2^(L-8)` above that.
    pub fn aligned_default(grid: &GridSpec) -> Self {
        let stride = 1usize << grid.level().saturating_sub(8);
        CubeFamily::aligned(stride, stride)
    }

    /// Sides in cells, descending.
    pub fn sides(&self, grid: &GridSpec) -> Vec<usize> {
        let n = grid.cells_per_side();
        let mut sides: Vec<usize> = match *self {
            CubeFamily::Dyadic => (0..=grid.level()).map(|l| n >> l).collect(),
            CubeFamily::Aligned { side_stride, .. } => {
                let mut v: Vec<usize> = (1..=n).step_by(side_stride).collect();
                if *v.last().unwrap() != n {
                    v.push(n);
                }
                v
            }
        };
        sides.sort_unstable_by(|a, b| b.cmp(a));
        sides
    }

    pub fn anchor_stride(&self, side: usize) -> usize {
        match *self {
            CubeFamily::Dyadic => side,
            CubeFamily::Aligned { anchor_stride, .. } => anchor_stride,
        }
    }

    pub fn contains(&self, grid: &GridSpec, q: &Cube) -> bool {
        if !grid.contains(q) {
            return false;
        }
        let n = grid.cells_per_side();
        let stride = self.anchor_stride(q.side);
        let anchored = (0..grid.dim()).all(|k| q.anchor[k] % stride == 0);
        match *self {
            CubeFamily::Dyadic => q.side.is_power_of_two() && anchored,
            CubeFamily::Aligned { side_stride, .. } => {
                anchored && (q.side == n || (q.side - 1) % side_stride == 0)
            }
        }
    }

    pub fn label(&self) -> String {
        match *self {
            CubeFamily::Dyadic => "dyadic".to_string(),
            CubeFamily::Aligned { anchor_stride, side_stride } => {
                format!("aligned:{anchor_stride},{side_stride}")
            }
        }
    }
}

impl std::str::FromStr for CubeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("dyadic") {
            return Ok(CubeFamily::Dyadic);
        }
        let rest = s
            .strip_prefix("aligned")
            .ok_or_else(|| Error::InvalidFamily(s.to_string()))?;
        if rest.is_empty() {
            return Ok(CubeFamily::aligned(1, 1));
        }
        let body = rest
            .strip_prefix(':')
            .ok_or_else(|| Error::InvalidFamily(s.to_string()))?;
        let parts: Vec<&str> = body.split(',').collect();
        let parse = |t: &str| -> Result<usize> {
            t.trim()
                .parse::<usize>()
                .ok()
                .filter(|&v| v >= 1)
                .ok_or_else(|| Error::InvalidFamily(s.to_string()))
        };
        match parts.as_slice() {
            [a] => Ok(CubeFamily::aligned(parse(a)?, 1)),
            [a, b] => Ok(CubeFamily::aligned(parse(a)?, parse(b)?)),
            _ => Err(Error::InvalidFamily(s.to_string())),
        }
    }
}

impl Serialize for CubeFamily {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.label())
    }
}

/// Real-valued function, constant on each grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    grid: GridSpec,
    values: Vec<f64>,
}

impl GridFn {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.cell_count() {
            return Err(Error::SizeMismatch {
                expected: grid.cell_count(),
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(GridFn { grid, values })
    }

    pub fn constant(grid: GridSpec, c: f64) -> Result<Self> {
        GridFn::new(grid, vec![c; grid.cell_count()])
    }

    /// Sample `f` at cell centers.
    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        let values = (0..grid.cell_count()).map(|i| f(grid.cell_center(i))).collect();
        GridFn::new(grid, values)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<GridFn> {
        GridFn::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }

    pub fn is_constant_on(&self, q: &Cube) -> bool {
        let mut it = self.grid.cells_of(q).map(|i| self.values[i]);
        match it.next() {
            Some(first) => it.all(|v| v == first),
            None => true,
        }
    }

    /// Arithmetic mean of the cell values in `q`, i.e. `f_Q`.
    pub fn average(&self, q: &Cube) -> Result<f64> {
        self.grid.check(q)?;
        let s: f64 = self.grid.cells_of(q).map(|i| self.values[i]).sum();
        Ok(s / q.cell_count() as f64)
    }

    pub(crate) fn same_grid(&self, other: &GridFn) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// A strictly positive grid function.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight(GridFn);

impl Weight {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        Weight::try_from(GridFn::new(grid, values)?)
    }

    pub fn constant(grid: GridSpec, c: f64) -> Result<Self> {
        Weight::new(grid, vec![c; grid.cell_count()])
    }

    pub fn grid(&self) -> &GridSpec {
        self.0.grid()
    }

    pub fn values(&self) -> &[f64] {
        self.0.values()
    }

    pub fn as_fn(&self) -> &GridFn {
        &self.0
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_constant()
    }

    pub fn log(&self) -> GridFn {
        GridFn {
            grid: *self.grid(),
            values: self.values().iter().map(|v| v.ln()).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Result<Weight> {
        Weight::try_from(self.0.map(|v| v * c)?)
    }

    /// `w(Q)`: the integral of `w` over `q`.
    pub fn measure(&self, q: &Cube) -> Result<f64> {
        self.grid().check(q)?;
        let s: f64 = self.grid().cells_of(q).map(|i| self.values()[i]).sum();
        Ok(s * self.grid().cell_volume())
    }

    /// `f_{Q,w}`: the `w`-weighted average of `f` over `q`.
    pub fn weighted_average(&self, f: &GridFn, q: &Cube) -> Result<f64> {
        self.0.same_grid(f)?;
        self.grid().check(q)?;
        let (mut num, mut den) = (0.0, 0.0);
        for i in self.grid().cells_of(q) {
            num += f.values()[i] * self.values()[i];
            den += self.values()[i];
        }
        Ok(num / den)
    }

    /// The dual weight `w^(1 - p')` with `p' = p / (p - 1)`.
    pub fn dual(&self, p: f64) -> Result<Weight> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidExponent(format!("dual weight needs p > 1, got {p}")));
        }
        let e = 1.0 - p / (p - 1.0);
        let values: Vec<f64> = self.values().iter().map(|v| v.powf(e)).collect();
        if values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::ExponentOverflow { p });
        }
        Ok(Weight(GridFn { grid: *self.grid(), values }))
    }

    /// Rescale by the geometric mean so that `log w` has zero mean. Every
    /// constant in this crate is invariant under this.
    pub(crate) fn normalized(&self) -> Weight {
        let g = self.log();
        let mean = Prefix::new(&g).cube_sum(&self.grid().domain()) / self.grid().cell_count() as f64;
        let values = g.values.iter().map(|l| (l - mean).exp()).collect();
        Weight(GridFn { grid: *self.grid(), values })
    }
}

impl TryFrom<GridFn> for Weight {
    type Error = Error;

    fn try_from(f: GridFn) -> Result<Self> {
        if let Some(index) = f.values.iter().position(|&v| v <= 0.0) {
            return Err(Error::NonPositiveValue { index, value: f.values[index] });
        }
        Ok(Weight(f))
    }
}

/// Validate raw cell values as a weight on `grid`.
pub fn make_weight(values: Vec<f64>, grid: GridSpec) -> Result<Weight> {
    Weight::new(grid, values)
}

pub fn dual_weight(w: &Weight, p: f64) -> Result<Weight> {
    w.dual(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, l: u32) -> GridSpec {
        GridSpec::new(n, l).unwrap()
    }

    #[test]
    fn make_weight_validates() {
        let w = make_weight(vec![1.0; 4], g(1, 2)).unwrap();
        assert!(w.is_constant());
        assert_eq!(make_weight(vec![2.0, 1.0], g(1, 1)).unwrap().values(), &[2.0, 1.0]);
        assert!(matches!(
            make_weight(vec![1.0, 0.0], g(1, 1)),
            Err(Error::NonPositiveValue { index: 1, .. })
        ));
        assert!(matches!(
            make_weight(vec![1.0, f64::NAN], g(1, 1)),
            Err(Error::NonFinite { index: 1 })
        ));
        assert!(matches!(
            make_weight(vec![1.0; 3], g(1, 1)),
            Err(Error::SizeMismatch { expected: 2, got: 3 })
        ));
        assert!(GridSpec::new(3, 1).is_err());
    }

    #[test]
    fn averages_and_measures_on_the_step_weight() {
        let grid = g(1, 1);
        let w = Weight::new(grid, vec![2.0, 1.0]).unwrap();
        let whole = grid.domain();
        let first = Cube::interval(0, 1);
        let second = Cube::interval(1, 1);
        assert_eq!(w.as_fn().average(&whole).unwrap(), 1.5);
        assert_eq!(w.as_fn().average(&first).unwrap(), 2.0);
        assert_eq!(w.measure(&whole).unwrap(), 1.5);
        assert_eq!(w.measure(&second).unwrap(), 0.5);
        let lw = w.log();
        let fw = w.weighted_average(&lw, &whole).unwrap();
        assert!((fw - 2.0 / 3.0 * 2f64.ln()).abs() < 1e-15);
        let c = GridFn::constant(grid, 3.25).unwrap();
        assert_eq!(w.weighted_average(&c, &whole).unwrap(), 3.25);
        assert!(matches!(
            w.as_fn().average(&Cube::interval(1, 2)),
            Err(Error::CubeOutOfBounds { .. })
        ));
    }

    #[test]
    fn unit_weight_reduces_weighted_average() {
        let grid = g(2, 2);
        let f = GridFn::from_fn(grid, |x| (3.0 * x[0]).sin() + x[1]).unwrap();
        let one = Weight::constant(grid, 1.0).unwrap();
        for q in grid.enumerate_cubes(&CubeFamily::aligned(1, 1)) {
            assert_eq!(one.weighted_average(&f, &q).unwrap(), f.average(&q).unwrap());
        }
    }

    #[test]
    fn dual_weight_examples() {
        let grid = g(1, 1);
        let w = Weight::new(grid, vec![2.0, 1.0]).unwrap();
        assert_eq!(w.dual(2.0).unwrap().values(), &[0.5, 1.0]);
        let s = w.dual(3.0).unwrap();
        assert!((s.values()[0] - 2f64.powf(-0.5)).abs() < 1e-15);
        assert_eq!(s.values()[1], 1.0);
        let back = s.dual(1.5).unwrap();
        for (a, b) in back.values().iter().zip(w.values()) {
            assert!((a - b).abs() <= 1e-12 * b);
        }
        assert!(w.dual(1.0).is_err());
        let huge = Weight::new(grid, vec![1e300, 1e-300]).unwrap();
        assert!(matches!(huge.dual(1.01), Err(Error::ExponentOverflow { .. })));
    }

    #[test]
    fn cube_index_matches_enumeration() {
        for (n, level) in [(1, 0), (1, 4), (2, 3)] {
            let g = GridSpec::new(n, level).unwrap();
            for fam in [CubeFamily::Dyadic, CubeFamily::aligned(1, 1), CubeFamily::aligned(2, 3)] {
                let all = g.enumerate_cubes(&fam);
                let index = g.cube_index(&fam);
                assert_eq!(index.len(), all.len());
                assert!(all.iter().enumerate().all(|(i, q)| index.get(i) == *q));
                let runs = index.runs(3);
                assert_eq!(runs.iter().map(|r| r.len).sum::<usize>(), all.len());
                for r in runs {
                    assert!((0..r.len).all(|j| r.cube(j) == all[r.start + j]));
                }
            }
        }
    }

    #[test]
    fn enumeration_counts_and_order() {
        let d = g(1, 1).enumerate_cubes(&CubeFamily::Dyadic);
        assert_eq!(d, vec![Cube::interval(0, 2), Cube::interval(0, 1), Cube::interval(1, 1)]);
        assert_eq!(g(1, 2).enumerate_cubes(&CubeFamily::aligned(1, 1)).len(), 10);
        assert_eq!(g(2, 1).enumerate_cubes(&CubeFamily::Dyadic).len(), 5);
        assert_eq!(g(2, 3).enumerate_cubes(&CubeFamily::Dyadic).len(), 1 + 4 + 16 + 64);
        // Side 3 is skipped by side stride 2 but N = 4 is always present.
        let sides = CubeFamily::aligned(1, 2).sides(&g(1, 2));
        assert_eq!(sides, vec![4, 3, 1]);
        let sides = CubeFamily::aligned(1, 2).sides(&g(1, 3));
        assert_eq!(sides, vec![8, 7, 5, 3, 1]);
    }

    #[test]
    fn aligned_contains_dyadic() {
        for n in 1..=2 {
            let grid = g(n, 3);
            let aligned = grid.enumerate_cubes(&CubeFamily::aligned(1, 1));
            for q in grid.enumerate_cubes(&CubeFamily::Dyadic) {
                assert!(aligned.contains(&q));
                assert!(CubeFamily::Dyadic.contains(&grid, &q));
            }
        }
    }

    #[test]
    fn family_membership_matches_enumeration() {
        for fam in [CubeFamily::Dyadic, CubeFamily::aligned(2, 3), CubeFamily::aligned(1, 1)] {
            let grid = g(2, 3);
            let listed = grid.enumerate_cubes(&fam);
            for q in grid.enumerate_cubes(&CubeFamily::aligned(1, 1)) {
                assert_eq!(fam.contains(&grid, &q), listed.contains(&q), "{fam:?} {q:?}");
            }
        }
    }

    #[test]
    fn doubling_snap_rule() {
        let grid = g(1, 2);
        let q = Cube::interval(1, 1);
        assert_eq!(
            grid.double_cube(&q, DoublingMode::RequireInside),
            Some(Cube::interval(0, 2))
        );
        let whole = grid.domain();
        assert_eq!(grid.double_cube(&whole, DoublingMode::RequireInside), None);
        assert_eq!(grid.double_cube(&whole, DoublingMode::Clip), Some(whole));
        // Clip translates inside and keeps q covered.
        // Odd sides round the anchor down, which can keep an edge cell inside.
        let edge = Cube::interval(3, 1);
        assert_eq!(grid.double_cube(&edge, DoublingMode::RequireInside), Some(Cube::interval(2, 2)));
        let grid3 = g(1, 3);
        let edge = Cube::interval(6, 2);
        assert_eq!(grid3.double_cube(&edge, DoublingMode::RequireInside), None);
        assert_eq!(grid3.double_cube(&edge, DoublingMode::Clip), Some(Cube::interval(4, 4)));
        let grid2 = g(2, 3);
        for q in grid2.enumerate_cubes(&CubeFamily::aligned(1, 1)) {
            let d = grid2.double_cube(&q, DoublingMode::Clip).unwrap();
            assert!(grid2.contains(&d) && d.contains_cube(&q));
            if let Some(d) = grid2.double_cube(&q, DoublingMode::RequireInside) {
                assert_eq!(d.side(), 2 * q.side());
                assert!(d.contains_cube(&q));
            }
        }
    }

    #[test]
    fn family_parsing() {
        assert_eq!("dyadic".parse::<CubeFamily>().unwrap(), CubeFamily::Dyadic);
        assert_eq!("aligned".parse::<CubeFamily>().unwrap(), CubeFamily::aligned(1, 1));
        assert_eq!("aligned:2,3".parse::<CubeFamily>().unwrap(), CubeFamily::aligned(2, 3));
        assert!("aligned:0,1".parse::<CubeFamily>().is_err());
        assert!("triadic".parse::<CubeFamily>().is_err());
        assert_eq!(CubeFamily::aligned_default(&g(1, 10)), CubeFamily::aligned(4, 4));
    }

    #[test]
    fn cube_serializes_with_dimension_sized_anchor() {
        let s = serde_json::to_string(&Cube::interval(3, 2)).unwrap();
        assert_eq!(s, r#"{"anchor":[3],"side":2}"#);
        let s = serde_json::to_string(&Cube::square([1, 2], 4)).unwrap();
        assert_eq!(s, r#"{"anchor":[1,2],"side":4}"#);
    }
}
