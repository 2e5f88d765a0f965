//! Brute-force reference implementations and shared corpora.
#![allow(dead_code)]

use weightlab::families::WeightKind;
use weightlab::{Cube, CubeFamily, GridSpec, Weight};

/// Every cube of `family` by direct enumeration of anchors and sides,
/// independent of `GridSpec::enumerate_cubes`.
pub fn cubes(grid: &GridSpec, family: &CubeFamily) -> Vec<Cube> {
    let n = grid.cells_per_side();
    let sides: Vec<usize> = match family {
        CubeFamily::Dyadic => (0..=grid.level()).map(|l| n >> l).collect(),
        CubeFamily::Aligned { .. } => (1..=n).collect(),
    };
    let mut out = Vec::new();
    for s in sides {
        let anchors: Vec<usize> = match family {
            CubeFamily::Dyadic => (0..n / s).map(|k| k * s).collect(),
            CubeFamily::Aligned { .. } => (0..=n - s).collect(),
        };
        if grid.dim() == 1 {
            out.extend(anchors.iter().map(|&a| Cube::interval(a, s)));
        } else {
            for &a in &anchors {
                for &b in &anchors {
                    out.push(Cube::square([a, b], s));
                }
            }
        }
    }
    out
}

pub fn cells(grid: &GridSpec, q: &Cube) -> Vec<usize> {
    let n = grid.cells_per_side();
    let [a, b] = q.anchor();
    let s = q.side();
    if grid.dim() == 1 {
        (a..a + s).collect()
    } else {
        let mut v = Vec::new();
        for i in a..a + s {
            for j in b..b + s {
                v.push(i * n + j);
            }
        }
        v
    }
}

fn mean(v: &[f64], idx: &[usize]) -> f64 {
    idx.iter().map(|&i| v[i]).sum::<f64>() / idx.len() as f64
}

fn sup(grid: &GridSpec, family: &CubeFamily, f: impl Fn(&[usize]) -> f64) -> f64 {
    cubes(grid, family).iter().map(|q| f(&cells(grid, q))).fold(f64::NEG_INFINITY, f64::max)
}

pub fn a_p(w: &Weight, p: f64, family: &CubeFamily) -> f64 {
    let v = w.values();
    let s: Vec<f64> = v.iter().map(|x| x.powf(-1.0 / (p - 1.0))).collect();
    sup(w.grid(), family, |c| mean(v, c) * mean(&s, c).powf(p - 1.0))
}

pub fn a_1(w: &Weight, family: &CubeFamily) -> f64 {
    let v = w.values();
    sup(w.grid(), family, |c| mean(v, c) / c.iter().map(|&i| v[i]).fold(f64::INFINITY, f64::min))
}

/// `M(w χ_Q)` at every cell of `q` (in `cells` order): largest average of
/// `w χ_Q` over family cubes containing the cell.
pub fn maximal(w: &Weight, q: &Cube, family: &CubeFamily) -> Vec<f64> {
    maximal_among(w, q, &cubes(w.grid(), family))
}

fn maximal_among(w: &Weight, q: &Cube, all: &[Cube]) -> Vec<f64> {
    let grid = w.grid();
    let v = w.values();
    let inside = cells(grid, q);
    let mut slot = vec![usize::MAX; v.len()];
    for (k, &i) in inside.iter().enumerate() {
        slot[i] = k;
    }
    let mut m = vec![0.0f64; inside.len()];
    for r in all {
        let rc = cells(grid, r);
        let avg = rc.iter().filter(|&&i| slot[i] != usize::MAX).map(|&i| v[i]).sum::<f64>() / rc.len() as f64;
        for &i in &rc {
            if slot[i] != usize::MAX {
                m[slot[i]] = m[slot[i]].max(avg);
            }
        }
    }
    m
}

pub fn fujii_wilson(w: &Weight, family: &CubeFamily) -> f64 {
    let grid = w.grid();
    let all = cubes(grid, family);
    all.iter()
        .map(|q| {
            let m: f64 = maximal_among(w, q, &all).iter().sum();
            m / cells(grid, q).iter().map(|&i| w.values()[i]).sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn hruscev(w: &Weight, family: &CubeFamily) -> f64 {
    let v = w.values();
    let l: Vec<f64> = v.iter().map(|x| x.ln()).collect();
    sup(w.grid(), family, |c| mean(v, c) * (-mean(&l, c)).exp())
}

pub fn log_ainfty(w: &Weight, family: &CubeFamily) -> f64 {
    let v = w.values();
    sup(w.grid(), family, |c| {
        let avg = mean(v, c);
        let total: f64 = c.iter().map(|&i| v[i]).sum();
        let ent: f64 = c.iter().map(|&i| v[i] * (1.0 + (v[i] / avg).ln().max(0.0))).sum();
        ent / total
    })
}

pub fn bmo(f: &[f64], grid: &GridSpec, family: &CubeFamily) -> f64 {
    sup(grid, family, |c| {
        let m = mean(f, c);
        c.iter().map(|&i| (f[i] - m).abs()).sum::<f64>() / c.len() as f64
    })
}

pub fn bmo_w(f: &[f64], w: &Weight, family: &CubeFamily) -> f64 {
    let v = w.values();
    sup(w.grid(), family, |c| {
        let mass: f64 = c.iter().map(|&i| v[i]).sum();
        let center = c.iter().map(|&i| f[i] * v[i]).sum::<f64>() / mass;
        c.iter().map(|&i| (f[i] - center).abs() * v[i]).sum::<f64>() / mass
    })
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Random log-bounded weights: `n` alternates, `L` in 2..=6 for `n = 1` and
/// 2..=4 for `n = 2`, `log w` uniform on an interval of length `range`.
pub fn random_corpus(count: u64, range: f64) -> Vec<Weight> {
    (0..count)
        .map(|seed| {
            let n = 1 + (seed % 2) as usize;
            let level = if n == 1 { 2 + (seed / 2 % 5) as u32 } else { 2 + (seed / 2 % 3) as u32 };
            let grid = GridSpec::new(n, level).unwrap();
            WeightKind::Random { range, seed: 1000 + seed }.generate(grid).unwrap()
        })
        .collect()
}
