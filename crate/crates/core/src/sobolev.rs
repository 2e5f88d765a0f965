//! Gradients, Riesz potentials, Lorentz norms and the weighted
//! Poincaré-Sobolev checks.

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::constants::{a_1, a_p, fujii_wilson};
use crate::error::{Error, Result};
use crate::grid::{Cube, CubeFamily, GridFn, GridSpec, Weight};
use crate::maximal::CubeFn;
use crate::verify::CheckResult;

/// Cubes with more cells than this use FFT convolution for the Riesz
/// potential (two dimensions only).
const RIESZ_DIRECT_MAX_CELLS: usize = 64 * 64;

/// Discrete gradient: forward differences, backward in the last cell of
/// each row.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub components: Vec<GridFn>,
}

impl Gradient {
    /// Euclidean length `|∇f|` at every cell.
    pub fn magnitude(&self) -> GridFn {
        let grid = *self.components[0].grid();
        let vals = (0..grid.cell_count())
            .map(|i| self.components.iter().map(|c| c.values()[i].powi(2)).sum::<f64>().sqrt())
            .collect();
        GridFn::new(grid, vals).expect("finite components")
    }
}

pub fn gradient(f: &GridFn) -> Result<Gradient> {
    let grid = *f.grid();
    if grid.level() == 0 {
        return Err(Error::InvalidLevel(0));
    }
    let n = grid.cells_per_side();
    let h = grid.cell_width();
    let v = f.values();
    let components = (0..grid.dim())
        .map(|axis| {
            let vals = (0..grid.cell_count())
                .map(|i| {
                    let c = grid.coords(i);
                    let (lo, hi) = if c[axis] + 1 < n {
                        (c, step(c, axis, 1))
                    } else {
                        (step(c, axis, -1), c)
                    };
                    (v[grid.index(hi)] - v[grid.index(lo)]) / h
                })
                .collect();
            GridFn::new(grid, vals)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Gradient { components })
}

fn step(mut c: [usize; 2], axis: usize, by: isize) -> [usize; 2] {
    c[axis] = (c[axis] as isize + by) as usize;
    c
}

fn check_alpha(alpha: f64, n: usize) -> Result<()> {
    if alpha > 0.0 && alpha < n as f64 {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange(alpha))
    }
}

/// Kernel weight between two cells `d` cells apart (per axis): midpoint rule
/// off the diagonal, the exact self-cell integral in 1D and the
/// area-equivalent disc in 2D.
fn kernel(grid: &GridSpec, alpha: f64, d: [usize; 2]) -> f64 {
    let h = grid.cell_width();
    let n = grid.dim();
    if d == [0, 0] {
        return if n == 1 {
            2.0 * (h / 2.0).powf(alpha) / alpha
        } else {
            let rho = h / std::f64::consts::PI.sqrt();
            2.0 * std::f64::consts::PI * rho.powf(alpha) / alpha
        };
    }
    let dist = ((d[0] * d[0] + d[1] * d[1]) as f64).sqrt() * h;
    dist.powf(alpha - n as f64) * grid.cell_volume()
}

/// `I_α(f χ_Q)` at the cell centers of `q`.
pub fn riesz(f: &GridFn, alpha: f64, q: &Cube) -> Result<CubeFn> {
    let grid = *f.grid();
    grid.check(q)?;
    check_alpha(alpha, grid.dim())?;
    let s = q.side();
    let local: Vec<f64> = grid.cells_of(q).map(|i| f.values()[i]).collect();
    let values = if grid.dim() == 2 && local.len() > RIESZ_DIRECT_MAX_CELLS {
        riesz_fft(&grid, alpha, s, &local)
    } else {
        riesz_direct(&grid, alpha, s, &local)
    };
    Ok(CubeFn { cube: *q, values })
}

fn riesz_direct(grid: &GridSpec, alpha: f64, s: usize, local: &[f64]) -> Vec<f64> {
    if grid.dim() == 1 {
        let k: Vec<f64> = (0..s).map(|d| kernel(grid, alpha, [d, 0])).collect();
        (0..s)
            .into_par_iter()
            .map(|x| (0..s).map(|y| local[y] * k[x.abs_diff(y)]).sum())
            .collect()
    } else {
        let k: Vec<f64> = (0..s * s).map(|i| kernel(grid, alpha, [i / s, i % s])).collect();
        (0..s * s)
            .into_par_iter()
            .map(|x| {
                let (xi, xj) = (x / s, x % s);
                let mut acc = 0.0;
                for yi in 0..s {
                    let row = &k[xi.abs_diff(yi) * s..];
                    let fr = &local[yi * s..(yi + 1) * s];
                    for (yj, fv) in fr.iter().enumerate() {
                        acc += fv * row[xj.abs_diff(yj)];
                    }
                }
                acc
            })
            .collect()
    }
}

/// Linear convolution with the kernel table through a zero-padded 2D FFT.
fn riesz_fft(grid: &GridSpec, alpha: f64, s: usize, local: &[f64]) -> Vec<f64> {
    let m = (2 * s - 1).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let zero = Complex::new(0.0, 0.0);
    let mut kf = vec![zero; m * m];
    for di in 0..s {
        for dj in 0..s {
            let v = Complex::new(kernel(grid, alpha, [di, dj]), 0.0);
            for (a, b) in [(di, dj), ((m - di) % m, dj), (di, (m - dj) % m), ((m - di) % m, (m - dj) % m)] {
                kf[a * m + b] = v;
            }
        }
    }
    let mut ff = vec![zero; m * m];
    for i in 0..s {
        for j in 0..s {
            ff[i * m + j] = Complex::new(local[i * s + j], 0.0);
        }
    }
    let fft2 = |data: &mut Vec<Complex<f64>>, plan: &std::sync::Arc<dyn rustfft::Fft<f64>>| {
        for row in data.chunks_mut(m) {
            plan.process(row);
        }
        let mut t = vec![zero; m * m];
        for i in 0..m {
            for j in 0..m {
                t[j * m + i] = data[i * m + j];
            }
        }
        for row in t.chunks_mut(m) {
            plan.process(row);
        }
        *data = t;
    };
    fft2(&mut kf, &fwd);
    fft2(&mut ff, &fwd);
    for (a, b) in ff.iter_mut().zip(&kf) {
        *a *= b;
    }
    // Two transposes cancel, so the layout is row-major again.
    fft2(&mut ff, &inv);
    let scale = 1.0 / (m * m) as f64;
    (0..s * s).map(|x| ff[(x / s) * m + x % s].re * scale).collect()
}

/// `I_α(f χ_Q)(x)` at an arbitrary point `x` (unit-cube coordinates),
/// integrating the kernel exactly over every cell of `q`.
pub fn riesz_at_point(f: &GridFn, alpha: f64, q: &Cube, x: [f64; 2]) -> Result<f64> {
    let grid = *f.grid();
    grid.check(q)?;
    check_alpha(alpha, grid.dim())?;
    let h = grid.cell_width();
    let v = f.values();
    let total = grid
        .cells_of(q)
        .map(|i| {
            let c = grid.coords(i);
            let lo = [c[0] as f64 * h - x[0], c[1] as f64 * h - x[1]];
            let hi = [lo[0] + h, lo[1] + h];
            let w = if grid.dim() == 1 {
                corner_1d(alpha, hi[0]) - corner_1d(alpha, lo[0])
            } else {
                corner_2d(alpha, hi[0], hi[1]) - corner_2d(alpha, lo[0], hi[1]) - corner_2d(alpha, hi[0], lo[1])
                    + corner_2d(alpha, lo[0], lo[1])
            };
            v[i] * w
        })
        .sum();
    Ok(total)
}

/// Signed antiderivative of `|t|^{α-1}`.
fn corner_1d(alpha: f64, u: f64) -> f64 {
    u.signum() * u.abs().powf(alpha) / alpha
}

/// Signed `∫_{[0,u]x[0,v]} |y|^{α-2} dy`, odd in each argument.
fn corner_2d(alpha: f64, u: f64, v: f64) -> f64 {
    let (a, b) = (u.abs(), v.abs());
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    // Polar coordinates over the two triangles split by the diagonal.
    let t = b.atan2(a);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let first = gauss_legendre(0.0, t, |th| (a / th.cos()).powf(alpha));
    let second = gauss_legendre(t, half_pi, |th| (b / th.sin()).powf(alpha));
    u.signum() * v.signum() * (first + second) / alpha
}

fn gauss_legendre(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    const NODES: [(f64, f64); 10] = [
        (0.0765265211334973, 0.1527533871307258),
        (0.2277858511416451, 0.1491729864726037),
        (0.3737060887154195, 0.1420961093183820),
        (0.5108670019508271, 0.1316886384491766),
        (0.6360536807265150, 0.1181945319615184),
        (0.7463319064601508, 0.1019301198172404),
        (0.8391169718222188, 0.0832767415767048),
        (0.9122344282513259, 0.0626720483341091),
        (0.9639719272779138, 0.0406014298003869),
        (0.9931285991850949, 0.0176140071391521),
    ];
    // Composite rule on 4 panels.
    let panels = 4;
    let width = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let mid = a + (k as f64 + 0.5) * width;
            let half = 0.5 * width;
            NODES.iter().map(|&(x, w)| w * (f(mid - half * x) + f(mid + half * x))).sum::<f64>() * half
        })
        .sum()
}

/// The probability measure `w dx / w(Q)` restricted to the cells of `Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedMeasure {
    cube: Cube,
    masses: Vec<f64>,
}

impl NormalizedMeasure {
    pub fn new(w: &Weight, q: &Cube) -> Result<Self> {
        let grid = w.grid();
        grid.check(q)?;
        let raw: Vec<f64> = grid.cells_of(q).map(|i| w.values()[i]).collect();
        let total: f64 = raw.iter().sum();
        Ok(NormalizedMeasure { cube: *q, masses: raw.iter().map(|m| m / total).collect() })
    }

    pub fn uniform(grid: &GridSpec, q: &Cube) -> Result<Self> {
        grid.check(q)?;
        let k = q.cell_count();
        Ok(NormalizedMeasure { cube: *q, masses: vec![1.0 / k as f64; k] })
    }

    pub fn cube(&self) -> &Cube {
        &self.cube
    }

    /// Cell masses in the order of [`GridSpec::cells_of`].
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// `∫ |g|^p dμ` for values `g` on the cube.
    pub fn integral_pow(&self, g: &[f64], p: f64) -> f64 {
        g.iter().zip(&self.masses).map(|(v, m)| v.abs().powf(p) * m).sum()
    }
}

/// Lorentz exponents: outer `q`, inner `p` (`f64::INFINITY` for the weak
/// norm).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LorentzParams {
    pub q: f64,
    pub p: f64,
}

impl LorentzParams {
    pub fn new(q: f64, p: f64) -> Result<Self> {
        if !(q > 0.0 && q.is_finite()) || !(p > 0.0) {
            return Err(Error::InvalidExponent(format!("Lorentz exponents q = {q}, p = {p}")));
        }
        Ok(LorentzParams { q, p })
    }

    pub fn weak(q: f64) -> Result<Self> {
        Self::new(q, f64::INFINITY)
    }
}

/// Decreasing rearrangement of `|values|` under `mu`: `(value, mass)` steps
/// with strictly decreasing values; the masses sum to one.
pub fn rearrangement_of(values: &[f64], mu: &NormalizedMeasure) -> Vec<(f64, f64)> {
    let mut pairs: Vec<(f64, f64)> = values.iter().map(|v| v.abs()).zip(mu.masses.iter().copied()).collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (v, m) in pairs {
        match out.last_mut() {
            Some(last) if last.0 == v => last.1 += m,
            _ => out.push((v, m)),
        }
    }
    out
}

/// [`rearrangement_of`] for a grid function restricted to the measure's cube.
pub fn rearrangement(f: &GridFn, mu: &NormalizedMeasure) -> Vec<(f64, f64)> {
    let vals: Vec<f64> = f.grid().cells_of(&mu.cube).map(|i| f.values()[i]).collect();
    rearrangement_of(&vals, mu)
}

/// `||g||_{L^{q,p}(μ)}` for values on the cube, exact on the step
/// rearrangement.
pub fn lorentz_norm_of(values: &[f64], params: LorentzParams, mu: &NormalizedMeasure) -> f64 {
    let steps = rearrangement_of(values, mu);
    let LorentzParams { q, p } = params;
    let mut t_prev = 0.0f64;
    if p.is_infinite() {
        let mut best = 0.0f64;
        for (v, m) in steps {
            let t = (t_prev + m).min(1.0);
            best = best.max(v * t.powf(1.0 / q));
            t_prev = t;
        }
        best
    } else {
        let e = p / q;
        let mut acc = 0.0;
        for (v, m) in steps {
            let t = (t_prev + m).min(1.0);
            acc += v.powf(p) * (t.powf(e) - t_prev.powf(e));
            t_prev = t;
        }
        (q / p * acc).powf(1.0 / p)
    }
}

pub fn lorentz_norm(f: &GridFn, params: LorentzParams, mu: &NormalizedMeasure) -> f64 {
    let vals: Vec<f64> = f.grid().cells_of(&mu.cube).map(|i| f.values()[i]).collect();
    lorentz_norm_of(&vals, params, mu)
}

fn check_sobolev_range(p: f64, n: usize) -> Result<()> {
    if p >= 1.0 && p < n as f64 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(format!("need 1 <= p < n = {n}, got {p}")))
    }
}

fn reciprocal_to_exponent(inv: f64, what: &str) -> Result<f64> {
    if inv > 0.0 {
        Ok(1.0 / inv)
    } else {
        Err(Error::ExponentBlowup(format!("{what}: 1/q = {inv}")))
    }
}

/// `p*_w` from `1/p - 1/p*_w = (1/n) / (1 + τ(F - 1))`.
pub fn sobolev_exponent(p: f64, fw: f64, tau: f64, n: usize) -> Result<f64> {
    check_sobolev_range(p, n)?;
    if !(fw >= 1.0) || !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!("fw = {fw} must be >= 1 and tau = {tau} > 0")));
    }
    let inv = 1.0 / p - 1.0 / (n as f64 * (1.0 + tau * (fw - 1.0)));
    reciprocal_to_exponent(inv, "weighted Sobolev exponent")
}

/// Classical `np/(n - p)`.
pub fn classical_sobolev(p: f64, n: usize) -> f64 {
    n as f64 * p / (n as f64 - p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClarosVariant {
    /// `(1/n) τσ / (1 + r(τσ - 1))`.
    Thm51,
    /// `(1/n) (1 + τ(σ - 1)) / (1 + rτ(σ - 1))`.
    Thm52,
}

/// Sobolev exponent `q` of the two-weight results with `τ = 2^{n+1}`,
/// given `σ_fw = [σ]_{A∞}`.
pub fn claros_exponent(p: f64, r: f64, sigma_fw: f64, n: usize, variant: ClarosVariant) -> Result<f64> {
    check_sobolev_range(p, n)?;
    if !(r >= 1.0 && r <= p) || !(sigma_fw >= 1.0) {
        return Err(Error::InvalidParameter(format!("need 1 <= r = {r} <= p and [sigma] = {sigma_fw} >= 1")));
    }
    let tau = (1u32 << (n + 1)) as f64;
    let gap = match variant {
        ClarosVariant::Thm51 => tau * sigma_fw / (1.0 + r * (tau * sigma_fw - 1.0)),
        ClarosVariant::Thm52 => (1.0 + tau * (sigma_fw - 1.0)) / (1.0 + r * tau * (sigma_fw - 1.0)),
    };
    reciprocal_to_exponent(1.0 / p - gap / n as f64, "two-weight Sobolev exponent")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PoincareVariant {
    /// Strong `L^{p*_w}` norm on the left.
    Strong,
    /// Lorentz `L^{p*_w, p}` norm on the left.
    Lorentz,
}

/// Weighted Poincaré-Sobolev on `q`:
/// `||f - f_Q|| <= c p* (1 + τ(F-1))^{1/p} ℓ(Q) (avg_w |∇f|^p)^{1/p}`.
///
/// `rhs` omits the unknown constant `c`; `implied_c = lhs / rhs`. With no
/// `budget` the result only records the implied constant.
#[allow(clippy::too_many_arguments)]
pub fn check_poincare_sobolev(
    f: &GridFn,
    w: &Weight,
    p: f64,
    q: &Cube,
    tau: f64,
    variant: PoincareVariant,
    family: &CubeFamily,
    budget: Option<f64>,
) -> Result<CheckResult> {
    f.same_grid(w.as_fn())?;
    let grid = *f.grid();
    let n = grid.dim();
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    grid.check(q)?;
    check_sobolev_range(p, n)?;
    let fw = fujii_wilson(w, family).value;
    let p_star_w = sobolev_exponent(p, fw, tau, n)?;
    let mu = NormalizedMeasure::new(w, q)?;
    let mean = f.average(q)?;
    let centered: Vec<f64> = grid.cells_of(q).map(|i| f.values()[i] - mean).collect();
    let lhs = match variant {
        PoincareVariant::Strong => mu.integral_pow(&centered, p_star_w).powf(1.0 / p_star_w),
        PoincareVariant::Lorentz => lorentz_norm_of(&centered, LorentzParams::new(p_star_w, p)?, &mu),
    };
    let grad = gradient(f)?.magnitude();
    let g: Vec<f64> = grid.cells_of(q).map(|i| grad.values()[i]).collect();
    let rhs = classical_sobolev(p, n)
        * (1.0 + tau * (fw - 1.0)).powf(1.0 / p)
        * q.side_length(&grid)
        * mu.integral_pow(&g, p).powf(1.0 / p);
    let degenerate = f.is_constant_on(q);
    let implied = if degenerate || rhs == 0.0 { 0.0 } else { lhs / rhs };
    let res = CheckResult::new(
        "poincare_sobolev",
        lhs,
        match budget {
            Some(c) => c * rhs,
            None => lhs,
        },
        0.0,
    )
    .with_witness(Some(*q))
    .param("implied_c", implied)
    .param("rhs_without_c", rhs)
    .param("p", p)
    .param("p_star_w", p_star_w)
    .param("tau", tau)
    .param("fujii_wilson", fw)
    .param("variant", format!("{variant:?}").to_lowercase())
    .param("degenerate", degenerate)
    .param("family", family.label());
    Ok(match budget {
        Some(c) => res.param("budget", c),
        None => res.param("record_only", true),
    })
}

/// Weak-type Riesz bound on `q`:
/// `||I_α(f χ_Q)||_{L^{q_r,∞}} <= (c/α) p*_α [w]_{A_r}^{1/p} ℓ^α (avg_w |f|^p)^{1/p}`,
/// `1/p - 1/q_r = α/(n r)`, `p*_α = np/(n - αp)`.
#[allow(clippy::too_many_arguments)]
pub fn check_weak_riesz(
    f: &GridFn,
    w: &Weight,
    p: f64,
    alpha: f64,
    r: f64,
    q: &Cube,
    family: &CubeFamily,
    budget: Option<f64>,
) -> Result<CheckResult> {
    f.same_grid(w.as_fn())?;
    let grid = *f.grid();
    let n = grid.dim() as f64;
    check_alpha(alpha, grid.dim())?;
    if !(p >= 1.0 && p < n / alpha) || !(r >= 1.0 && r <= p) {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= r = {r} <= p = {p} < n/alpha = {}",
            n / alpha
        )));
    }
    let q_r = reciprocal_to_exponent(1.0 / p - alpha / (n * r), "weak Riesz exponent")?;
    let a_r = if r == 1.0 { a_1(w, family).value } else { a_p(w, r, family)?.value };
    let mu = NormalizedMeasure::new(w, q)?;
    let pot = riesz(f, alpha, q)?;
    let lhs = lorentz_norm_of(&pot.values, LorentzParams::weak(q_r)?, &mu);
    let local: Vec<f64> = grid.cells_of(q).map(|i| f.values()[i]).collect();
    let p_star_alpha = n * p / (n - alpha * p);
    let rhs = p_star_alpha / alpha
        * a_r.powf(1.0 / p)
        * q.side_length(&grid).powf(alpha)
        * mu.integral_pow(&local, p).powf(1.0 / p);
    let implied = if lhs == 0.0 { 0.0 } else { lhs / rhs };
    let res = CheckResult::new(
        "weak_riesz",
        lhs,
        match budget {
            Some(c) => c * rhs,
            None => lhs,
        },
        0.0,
    )
    .with_witness(Some(*q))
    .param("implied_c", implied)
    .param("rhs_without_c", rhs)
    .param("q_r", q_r)
    .param("a_r", a_r)
    .param("alpha", alpha)
    .param("family", family.label());
    Ok(match budget {
        Some(c) => res.param("budget", c),
        None => res.param("record_only", true),
    })
}

/// Subrepresentation `|f - f_Q| <= C I_1(|∇f| χ_Q)` on the cells of `q`;
/// cells where the potential vanishes are excluded and counted.
pub fn check_subrepresentation(f: &GridFn, q: &Cube, budget: Option<f64>) -> Result<CheckResult> {
    let grid = *f.grid();
    // I_1 needs 1 < n.
    if grid.dim() < 2 {
        return Err(Error::InvalidDimension(grid.dim()));
    }
    grid.check(q)?;
    if f.is_constant_on(q) {
        return Err(Error::DegenerateFunction);
    }
    let grad = gradient(f)?.magnitude();
    let pot = riesz(&grad, 1.0, q)?;
    let mean = f.average(q)?;
    let mut best = (0.0f64, 0.0f64, 0.0f64);
    let mut excluded = 0usize;
    for (k, i) in grid.cells_of(q).enumerate() {
        let num = (f.values()[i] - mean).abs();
        let den = pot.values[k];
        if den <= 0.0 {
            if num > 0.0 {
                excluded += 1;
            }
            continue;
        }
        if num / den > best.0 {
            best = (num / den, num, den);
        }
    }
    let (implied, num, den) = best;
    let res = CheckResult::new(
        "subrepresentation",
        num,
        match budget {
            Some(c) => c * den,
            None => num,
        },
        0.0,
    )
    .with_witness(Some(*q))
    .param("implied_c", implied)
    .param("excluded_cells", excluded);
    Ok(match budget {
        Some(c) => res.param("budget", c),
        None => res.param("record_only", true),
    })
}
