//! Inequality checks. Each produces a [`CheckResult`] with both sides, the
//! ratio, the worst cube, and the parameters that went into it.
//!
//! Dimensional constants are always caller parameters; nothing here assumes
//! numeric values for them.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::Serialize;
use serde_json::Value;

use crate::constants::{a_1, a_p, bmo, bmo_w, doubling, fujii_wilson, hruscev, jn_exponent_raw, log_ainfty, sup_over};
use crate::error::{Error, Result};
use crate::grid::{Cube, CubeFamily, DoublingMode, GridFn, Weight};
use crate::tables::{Prefix, RangeExtrema};

/// Tolerance for checks that follow algebraically from the definitions.
pub const ALGEBRAIC_TOL: f64 = 1e-9;
/// Tolerance for checks that are only expected to hold.
pub const EMPIRICAL_TOL: f64 = 0.0;

/// One evaluated inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; `0` when both sides vanish, `f64::MAX` when only the
    /// right side does.
    pub ratio: f64,
    pub pass: bool,
    pub tol: f64,
    pub witness: Option<Cube>,
    pub params: BTreeMap<String, Value>,
}

impl CheckResult {
    pub fn new(id: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let ratio = if rhs > 0.0 && rhs.is_finite() {
            (lhs / rhs).min(f64::MAX)
        } else if rhs == f64::INFINITY || lhs <= 0.0 {
            0.0
        } else {
            f64::MAX
        };
        let ratio = if ratio.is_nan() { f64::MAX } else { ratio };
        CheckResult {
            id: id.into(),
            lhs,
            rhs,
            ratio,
            pass: ratio <= 1.0 + tol,
            tol,
            witness: None,
            params: BTreeMap::new(),
        }
    }

    pub fn with_witness(mut self, witness: Option<Cube>) -> Self {
        self.witness = witness;
        self
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    /// Like [`param`](Self::param), but keeps non-finite values as strings
    /// since JSON has no representation for them.
    fn real(self, key: &str, value: f64) -> Self {
        if value.is_finite() {
            self.param(key, value)
        } else {
            self.param(key, format!("{value}"))
        }
    }
}

/// Stable check identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckId {
    Rhi,
    Subset,
    LeftOpen,
    Doubling,
    BmoChain,
    Tsutsui,
    EmbedJn,
    EmbedThm11,
    EmbedPiecewise,
    BmoVsBmow,
}

impl CheckId {
    pub const ALL: [CheckId; 10] = [
        CheckId::Rhi,
        CheckId::Subset,
        CheckId::LeftOpen,
        CheckId::Doubling,
        CheckId::BmoChain,
        CheckId::Tsutsui,
        CheckId::EmbedJn,
        CheckId::EmbedThm11,
        CheckId::EmbedPiecewise,
        CheckId::BmoVsBmow,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckId::Rhi => "rhi",
            CheckId::Subset => "subset",
            CheckId::LeftOpen => "left_open",
            CheckId::Doubling => "doubling",
            CheckId::BmoChain => "bmo_chain",
            CheckId::Tsutsui => "tsutsui",
            CheckId::EmbedJn => "embed_jn",
            CheckId::EmbedThm11 => "embed_thm11",
            CheckId::EmbedPiecewise => "embed_piecewise",
            CheckId::BmoVsBmow => "bmo_vs_bmow",
        }
    }
}

impl FromStr for CheckId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CheckId::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s.trim())
            .ok_or_else(|| Error::UnknownCheck(s.trim().to_string()))
    }
}

/// Parse a comma-separated list of check ids.
pub fn parse_checks(list: &str) -> Result<Vec<CheckId>> {
    list.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect()
}

fn two_pow(n: usize) -> f64 {
    (1u32 << n) as f64
}

/// Largest admissible reverse Hölder exponent, `1 / (2^{n+1}(F - 1))`.
pub fn rhi_epsilon_max(fw: f64, n: usize) -> f64 {
    if fw <= 1.0 {
        f64::INFINITY
    } else {
        1.0 / (two_pow(n + 1) * (fw - 1.0))
    }
}

/// Reverse Hölder: `avg_Q w^{1+ε} <= 2 F (avg_Q w)^{1+ε}` on every cube.
pub fn check_rhi(w: &Weight, eps: f64, family: &CubeFamily) -> Result<CheckResult> {
    let grid = *w.grid();
    let fw = fujii_wilson(w, family).value;
    let max = rhi_epsilon_max(fw, grid.dim());
    if !(eps >= 0.0) || eps > max * (1.0 + 1e-12) {
        return Err(Error::EpsilonOutOfRange { eps, max });
    }
    let logs = w.log();
    let top = RangeExtrema::new(&logs).max(&grid.domain());
    // Work with w / max w so no power overflows.
    let u: Vec<f64> = logs.values().iter().map(|l| (l - top).exp()).collect();
    let u_eps: Vec<f64> = logs.values().iter().map(|l| ((1.0 + eps) * (l - top)).exp()).collect();
    let pu = Prefix::from_values(&grid, &u);
    let pe = Prefix::from_values(&grid, &u_eps);
    let sides = |q: &Cube| {
        let cnt = q.cell_count() as f64;
        (pe.cube_sum(q) / cnt, 2.0 * fw * (pu.cube_sum(q) / cnt).powf(1.0 + eps))
    };
    let cubes = grid.enumerate_cubes(family);
    let worst = sup_over(&cubes, |q| {
        let (l, r) = sides(q);
        l / r
    })
    .expect("nonempty family");
    let (mut lhs, mut rhs) = sides(&worst.witness);
    let unscale = ((1.0 + eps) * top).exp();
    if unscale.is_finite() && unscale > 0.0 && (lhs * unscale).is_finite() && (rhs * unscale).is_finite() {
        lhs *= unscale;
        rhs *= unscale;
    }
    Ok(CheckResult::new("rhi", lhs, rhs, EMPIRICAL_TOL)
        .with_witness(Some(worst.witness))
        .param("eps", eps)
        .real("eps_max", max)
        .param("fujii_wilson", fw)
        .param("family", family.label()))
}

/// Subset absorption: `w(E)/w(Q) <= 2F (|E|/|Q|)^θ`, `θ = 1/(1+2^{n+1}(F-1))`.
/// `subset` lists cell indices inside `q`.
pub fn check_subset(w: &Weight, q: &Cube, subset: &[usize], family: &CubeFamily) -> Result<CheckResult> {
    let grid = *w.grid();
    grid.check(q)?;
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut cells: Vec<usize> = subset.to_vec();
    cells.sort_unstable();
    cells.dedup();
    if cells.iter().any(|&i| i >= grid.cell_count() || !q.contains_cell(grid.coords(i))) {
        return Err(Error::SubsetOutsideCube);
    }
    let fw = fujii_wilson(w, family).value;
    let theta = 1.0 / (1.0 + two_pow(grid.dim() + 1) * (fw - 1.0));
    let we: f64 = cells.iter().map(|&i| w.values()[i]).sum();
    let wq: f64 = grid.cells_of(q).map(|i| w.values()[i]).sum();
    let frac = cells.len() as f64 / q.cell_count() as f64;
    Ok(CheckResult::new("subset", we / wq, 2.0 * fw * frac.powf(theta), EMPIRICAL_TOL)
        .with_witness(Some(*q))
        .param("theta", theta)
        .param("fujii_wilson", fw)
        .param("subset_cells", cells.len())
        .param("family", family.label()))
}

/// Left-openness: with `σ = w^{1-p'}` and
/// `ε = (p-1)/(2^{n+1}([σ]_{A∞}-1)+1)`, check
/// `[w]_{A_{p-ε}} <= (2[σ]_{A∞})^{p-1} [w]_{A_p}`.
///
/// When `p - ε` rounds to `1` the left side is `[w]_{A_1}`.
pub fn check_left_open(w: &Weight, p: f64, family: &CubeFamily) -> Result<CheckResult> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidExponent(format!("left-openness needs p > 1, got {p}")));
    }
    let n = w.grid().dim();
    let sigma = w.normalized().dual(p)?;
    let fs = fujii_wilson(&sigma, family).value;
    let eps = (p - 1.0) / (two_pow(n + 1) * (fs - 1.0) + 1.0);
    let q = p - eps;
    let degenerate = q - 1.0 <= 1e-12;
    let lhs_sup = if degenerate { a_1(w, family) } else { a_p(w, q, family)? };
    let ap = a_p(w, p, family)?.value;
    let rhs = (2.0 * fs).powf(p - 1.0) * ap;
    Ok(CheckResult::new("left_open", lhs_sup.value, rhs, EMPIRICAL_TOL)
        .with_witness(Some(lhs_sup.witness))
        .param("p", p)
        .param("eps", eps)
        .param("p_minus_eps", q)
        .param("sigma_fujii_wilson", fs)
        .param("a_p", ap)
        .param("degenerate", degenerate)
        .param("family", family.label()))
}

/// Doubling: `D_w <= exp(κ n (4F)^{1+2^{n+1}(F-1)})`. The smallest `κ`
/// making this hold is reported as `implied_kappa`.
pub fn check_doubling_bound(w: &Weight, family: &CubeFamily, mode: DoublingMode, kappa: f64) -> Result<CheckResult> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidConstant(format!("kappa must be positive, got {kappa}")));
    }
    let n = w.grid().dim();
    let d = doubling(w, family, mode)?;
    let fw = fujii_wilson(w, family).value;
    let growth = n as f64 * (4.0 * fw).powf(1.0 + two_pow(n + 1) * (fw - 1.0));
    let implied = d.value.ln() / growth;
    Ok(CheckResult::new("doubling", d.value, (kappa * growth).exp(), EMPIRICAL_TOL)
        .with_witness(Some(d.witness))
        .param("kappa", kappa)
        .param("implied_kappa", implied)
        .param("fujii_wilson", fw)
        .param("mode", mode.label())
        .param("family", family.label()))
}

/// The three links of the BMO chain for `log w`:
/// (i) `bmo_w(log w) <= 8([w]^log - 1)`,
/// (ii) `[w]^log - 1 <= 2^n(F - 1)` on the dyadic family,
/// (iii) `bmo_w(log w) <= 2^{n+3}(F - 1)`.
pub fn check_bmo_chain(w: &Weight, family: &CubeFamily) -> Result<[CheckResult; 3]> {
    let n = w.grid().dim();
    let logw = w.log();
    let bw = bmo_w(&logw, w, family)?;
    let la = log_ainfty(w, family);
    let fw = fujii_wilson(w, family);
    let la_d = log_ainfty(w, &CubeFamily::Dyadic);
    let fw_d = fujii_wilson(w, &CubeFamily::Dyadic);
    let first = CheckResult::new("bmo_chain", bw.value, 8.0 * (la.value - 1.0), ALGEBRAIC_TOL)
        .with_witness(Some(bw.witness))
        .param("part", "i")
        .param("log_ainfty", la.value)
        .param("family", family.label());
    let second = CheckResult::new("bmo_chain", la_d.value - 1.0, two_pow(n) * (fw_d.value - 1.0), ALGEBRAIC_TOL)
        .with_witness(Some(la_d.witness))
        .param("part", "ii")
        .param("fujii_wilson", fw_d.value)
        .param("family", CubeFamily::Dyadic.label());
    let third = CheckResult::new("bmo_chain", bw.value, two_pow(n + 3) * (fw.value - 1.0), ALGEBRAIC_TOL)
        .with_witness(Some(bw.witness))
        .param("part", "iii")
        .param("fujii_wilson", fw.value)
        .param("family", family.label());
    Ok([first, second, third])
}

/// `bmo(f) <= c log(2[w]') bmo_w(f)`. Without a budget the check only
/// records the implied `c` and passes.
pub fn check_tsutsui(f: &GridFn, w: &Weight, family: &CubeFamily, budget: Option<f64>) -> Result<CheckResult> {
    f.same_grid(w.as_fn())?;
    let b = bmo(f, family);
    let bw = bmo_w(f, w, family)?;
    let h = hruscev(w, family).value;
    let scale = (2.0 * h).ln() * bw.value;
    let degenerate = b.value == 0.0;
    let implied = if degenerate { 0.0 } else { b.value / scale };
    let rhs = match budget {
        Some(c) => c * scale,
        None => b.value,
    };
    let res = CheckResult::new("tsutsui", b.value, rhs, EMPIRICAL_TOL)
        .with_witness(Some(b.witness))
        .param("implied_c", implied)
        .param("hruscev", h)
        .param("bmo_w", bw.value)
        .param("degenerate", degenerate)
        .param("family", family.label());
    Ok(match budget {
        Some(c) => res.param("budget", c),
        None => res.param("record_only", true),
    })
}

/// John-Nirenberg route to `A_p`: with `r*` the largest exponent for which
/// `avg_Q exp(r |log w - (log w)_Q|) <= 3` on every cube, set `p = 1 + 1/r*`
/// and check `[w]_{A_p} <= 3^{2(p-1)}`.
///
/// Constant weights give `p = 1` and a trivial pass.
pub fn embedding_via_jn(w: &Weight, family: &CubeFamily) -> Result<(f64, CheckResult)> {
    if w.is_constant() {
        let res = CheckResult::new("embed_jn", 1.0, 1.0, ALGEBRAIC_TOL)
            .with_witness(Some(w.grid().domain()))
            .param("degenerate", true)
            .param("family", family.label());
        return Ok((1.0, res));
    }
    let jn = jn_exponent_raw(w, family, 3.0)?;
    let r = jn.r;
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::ExponentBlowup(format!("John-Nirenberg exponent r* = {r}")));
    }
    let p = 1.0 + 1.0 / r;
    let ap = a_p(w, p, family)?;
    let bound = 3f64.powf(2.0 * (p - 1.0));
    let res = CheckResult::new("embed_jn", ap.value, bound, ALGEBRAIC_TOL)
        .with_witness(Some(ap.witness))
        .param("r_star", r)
        .param("p", p)
        .param("jn_witness", serde_json::to_value(jn.witness).unwrap_or(Value::Null))
        .param("family", family.label());
    Ok((p, res))
}

/// Constants `(τ, τ')` that make [`check_embedding`] reproduce the
/// John-Nirenberg route on every weight given: `τ = max (1/r*)/(F-1)` and
/// `τ' = 2 log 3 · τ`. Constant weights are skipped.
pub fn calibrate_embedding(weights: &[Weight], family: &CubeFamily) -> Result<(f64, f64)> {
    let mut tau: f64 = 0.0;
    for w in weights.iter().filter(|w| !w.is_constant()) {
        let r = jn_exponent_raw(w, family, 3.0)?.r;
        let fw = fujii_wilson(w, family).value;
        if fw > 1.0 {
            tau = tau.max(1.0 / (r * (fw - 1.0)));
        }
    }
    if tau == 0.0 {
        return Err(Error::DegenerateWeight);
    }
    Ok((tau, 2.0 * 3f64.ln() * tau))
}

/// `p = 1 + τ(F-1)` and `[w]_{A_p} <= exp(τ'(F-1))`.
pub fn check_embedding(w: &Weight, tau: f64, tau_prime: f64, family: &CubeFamily) -> Result<CheckResult> {
    if !(tau > 0.0) || !(tau_prime > 0.0) {
        return Err(Error::InvalidConstant(format!("tau = {tau}, tau' = {tau_prime} must be positive")));
    }
    let fw = fujii_wilson(w, family).value;
    let excess = fw - 1.0;
    let p = 1.0 + tau * excess;
    let bound = (tau_prime * excess).exp();
    let (lhs, witness) = if excess <= 0.0 || p - 1.0 <= 1e-12 {
        let s = a_1(w, family);
        (s.value, s.witness)
    } else {
        let s = a_p(w, p, family)?;
        (s.value, s.witness)
    };
    Ok(CheckResult::new("embed_thm11", lhs, bound, ALGEBRAIC_TOL)
        .with_witness(Some(witness))
        .param("tau", tau)
        .param("tau_prime", tau_prime)
        .param("fw_minus_1", excess)
        .param("p", p)
        .param("bound", bound)
        .param("family", family.label()))
}

/// One branch of the piecewise embedding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmbeddingBranch {
    pub p: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PiecewiseEmbedding {
    /// Branch in force: `"flat"` for `F <= 1 + c`, `"large"` otherwise.
    pub branch: &'static str,
    pub p: f64,
    pub bound: f64,
    /// At `F = 1 + c` exactly, the other branch as well.
    pub other: Option<EmbeddingBranch>,
}

/// Piecewise embedding exponent and bound:
/// `F <= 1 + c`: `p = 1 + τ(F-1)`, bound `exp(τ'(F-1))`;
/// otherwise `p = exp(C F)`, bound `exp(exp(C F))`.
pub fn embedding_piecewise(fw: f64, c_n: f64, big_c: f64, tau: f64, tau_prime: f64) -> Result<PiecewiseEmbedding> {
    if !(fw >= 1.0) {
        return Err(Error::InvalidConstant(format!("[w]_A_inf = {fw} must be at least 1")));
    }
    for (name, v) in [("c_n", c_n), ("C_n", big_c), ("tau", tau), ("tau'", tau_prime)] {
        if !(v > 0.0) {
            return Err(Error::InvalidConstant(format!("{name} = {v} must be positive")));
        }
    }
    let flat = EmbeddingBranch { p: 1.0 + tau * (fw - 1.0), bound: (tau_prime * (fw - 1.0)).exp() };
    let large = {
        let p = (big_c * fw).exp();
        EmbeddingBranch { p, bound: p.exp() }
    };
    let edge = 1.0 + c_n;
    Ok(if fw < edge {
        PiecewiseEmbedding { branch: "flat", p: flat.p, bound: flat.bound, other: None }
    } else if fw == edge {
        PiecewiseEmbedding { branch: "flat", p: flat.p, bound: flat.bound, other: Some(large) }
    } else {
        PiecewiseEmbedding { branch: "large", p: large.p, bound: large.bound, other: None }
    })
}

/// The piecewise embedding applied to a weight: `[w]_{A_p} <= bound` with
/// `(p, bound)` from [`embedding_piecewise`].
pub fn check_embedding_piecewise(
    w: &Weight,
    c_n: f64,
    big_c: f64,
    tau: f64,
    tau_prime: f64,
    family: &CubeFamily,
) -> Result<CheckResult> {
    let fw = fujii_wilson(w, family).value;
    let e = embedding_piecewise(fw, c_n, big_c, tau, tau_prime)?;
    let s = if e.p - 1.0 <= 1e-12 { a_1(w, family) } else { a_p(w, e.p, family)? };
    Ok(CheckResult::new("embed_piecewise", s.value, e.bound, ALGEBRAIC_TOL)
        .with_witness(Some(s.witness))
        .param("branch", e.branch)
        .real("p", e.p)
        .real("bound", e.bound)
        .param("fujii_wilson", fw)
        .param("family", family.label()))
}

/// `bmo(f) <= C bmo_w(f)`; the implied `C` is recorded.
pub fn check_bmo_vs_bmow(f: &GridFn, w: &Weight, big_c: f64, family: &CubeFamily) -> Result<CheckResult> {
    if !(big_c > 0.0) {
        return Err(Error::InvalidConstant(format!("C = {big_c} must be positive")));
    }
    let b = bmo(f, family);
    let bw = bmo_w(f, w, family)?;
    let implied = if b.value == 0.0 { 0.0 } else { b.value / bw.value };
    Ok(CheckResult::new("bmo_vs_bmow", b.value, big_c * bw.value, EMPIRICAL_TOL)
        .with_witness(Some(b.witness))
        .param("C", big_c)
        .real("implied_c", implied)
        .param("family", family.label()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn step() -> Weight {
        Weight::new(GridSpec::new(1, 1).unwrap(), vec![2.0, 1.0]).unwrap()
    }

    #[test]
    fn ratio_conventions() {
        assert_eq!(CheckResult::new("x", 0.0, 0.0, 0.0).ratio, 0.0);
        assert!(CheckResult::new("x", 0.0, 0.0, 0.0).pass);
        let r = CheckResult::new("x", 1.0, 0.0, 0.0);
        assert_eq!(r.ratio, f64::MAX);
        assert!(!r.pass);
        assert_eq!(CheckResult::new("x", 1.0, f64::INFINITY, 0.0).ratio, 0.0);
        let r = CheckResult::new("x", 1.0 + 1e-10, 1.0, 1e-9);
        assert!(r.pass);
    }

    #[test]
    fn check_ids_round_trip() {
        for id in CheckId::ALL {
            assert_eq!(id.as_str().parse::<CheckId>().unwrap(), id);
        }
        assert!(matches!(parse_checks("embed_jn,nosuch"), Err(Error::UnknownCheck(s)) if s == "nosuch"));
        assert_eq!(parse_checks("rhi, doubling").unwrap(), vec![CheckId::Rhi, CheckId::Doubling]);
    }

    #[test]
    fn rhi_examples() {
        let g = GridSpec::new(1, 3).unwrap();
        let one = Weight::constant(g, 1.0).unwrap();
        let r = check_rhi(&one, 5.0, &CubeFamily::Dyadic).unwrap();
        assert!((r.ratio - 0.5).abs() < 1e-15 && r.pass);
        let r = check_rhi(&step(), 1.0, &CubeFamily::Dyadic).unwrap();
        assert!((r.lhs - 2.5).abs() < 1e-12, "{}", r.lhs);
        assert!((r.rhs - 5.25).abs() < 1e-12, "{}", r.rhs);
        // eps_max = 1/(4 * 1/6) = 1.5
        assert!(matches!(check_rhi(&step(), 1.6, &CubeFamily::Dyadic), Err(Error::EpsilonOutOfRange { .. })));
    }

    #[test]
    fn rhi_lhs_rhs_are_scale_free() {
        let w = step();
        let a = check_rhi(&w, 1.0, &CubeFamily::Dyadic).unwrap();
        let b = check_rhi(&w.scaled(1e5).unwrap(), 1.0, &CubeFamily::Dyadic).unwrap();
        assert!((a.ratio - b.ratio).abs() < 1e-12);
    }

    #[test]
    fn subset_examples() {
        let g = GridSpec::new(1, 2).unwrap();
        let one = Weight::constant(g, 1.0).unwrap();
        let q = g.domain();
        let r = check_subset(&one, &q, &[0, 1], &CubeFamily::Dyadic).unwrap();
        assert!((r.lhs - 0.5).abs() < 1e-15 && (r.rhs - 1.0).abs() < 1e-15);
        let w = step();
        let r = check_subset(&w, &w.grid().domain(), &[0, 1], &CubeFamily::Dyadic).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-15 && (r.rhs - 7.0 / 3.0).abs() < 1e-12);
        assert_eq!(check_subset(&one, &q, &[], &CubeFamily::Dyadic), Err(Error::EmptySubset));
        let half = Cube::interval(0, 2);
        assert_eq!(check_subset(&one, &half, &[3], &CubeFamily::Dyadic), Err(Error::SubsetOutsideCube));
    }

    #[test]
    fn left_open_examples() {
        let r = check_left_open(&step(), 2.0, &CubeFamily::Dyadic).unwrap();
        assert!((r.params["eps"].as_f64().unwrap() - 0.6).abs() < 1e-12);
        assert!((r.rhs - 7.0 / 3.0 * 1.125).abs() < 1e-12);
        // Brute force a_{1.4} over the three dyadic cubes.
        let k = 1.0 / 0.4;
        let whole = 1.5 * ((2f64.powf(-k) + 1.0) / 2.0).powf(0.4);
        assert!((r.lhs - whole.max(1.0)).abs() < 1e-12, "{}", r.lhs);
        assert!(r.pass);

        let g = GridSpec::new(2, 2).unwrap();
        let one = Weight::constant(g, 4.0).unwrap();
        let r = check_left_open(&one, 2.0, &CubeFamily::Dyadic).unwrap();
        assert_eq!(r.params["degenerate"], true);
        assert_eq!(r.lhs, 1.0);
        assert_eq!(r.rhs, 2.0);
    }

    #[test]
    fn doubling_examples() {
        for (n, want) in [(1usize, 2f64.ln() / 4.0), (2, 4f64.ln() / 8.0)] {
            let g = GridSpec::new(n, 3).unwrap();
            let w = Weight::constant(g, 1.0).unwrap();
            let r = check_doubling_bound(&w, &CubeFamily::Dyadic, DoublingMode::RequireInside, 1.0).unwrap();
            assert_eq!(r.lhs, two_pow(n));
            assert!((r.params["implied_kappa"].as_f64().unwrap() - want).abs() < 1e-15);
            assert!(r.pass);
        }
    }

    #[test]
    fn bmo_chain_examples() {
        let g = GridSpec::new(2, 2).unwrap();
        let c = Weight::constant(g, 2.5).unwrap();
        for r in check_bmo_chain(&c, &CubeFamily::aligned(1, 1)).unwrap() {
            assert_eq!((r.lhs, r.rhs, r.pass), (0.0, 0.0, true));
        }
        let [i, ii, iii] = check_bmo_chain(&step(), &CubeFamily::Dyadic).unwrap();
        assert!((i.lhs - 0.30807).abs() < 1e-4);
        assert!((i.rhs - 1.5344).abs() < 1e-4);
        assert!(i.pass && ii.pass && iii.pass);
    }

    #[test]
    fn tsutsui_on_step_weight() {
        let w = step();
        let f = w.log();
        let r = check_tsutsui(&f, &w, &CubeFamily::Dyadic, None).unwrap();
        let want = (2f64.ln() / 2.0) / ((2.0 * 1.5 / 2f64.sqrt()).ln() * 4.0 / 9.0 * 2f64.ln());
        assert!((r.params["implied_c"].as_f64().unwrap() - want).abs() < 1e-12);
        assert!(r.pass);
        let flat = GridFn::constant(*w.grid(), 1.0).unwrap();
        let r = check_tsutsui(&flat, &w, &CubeFamily::Dyadic, Some(1.0)).unwrap();
        assert_eq!(r.params["degenerate"], true);
        assert!(r.pass);
    }

    #[test]
    fn jn_embedding_on_step_weight() {
        let (p, r) = embedding_via_jn(&step(), &CubeFamily::Dyadic).unwrap();
        let want = 1.0 + 2f64.ln() / (2.0 * 3f64.ln());
        assert!((p - want).abs() < 1e-8);
        assert!((r.rhs - 2.0).abs() < 1e-7);
        assert!(r.pass, "{r:?}");
        let g = GridSpec::new(1, 4).unwrap();
        let (p, r) = embedding_via_jn(&Weight::constant(g, 3.0).unwrap(), &CubeFamily::Dyadic).unwrap();
        assert_eq!(p, 1.0);
        assert!(r.pass);
    }

    #[test]
    fn calibrated_embedding_matches_jn_route() {
        let w = step();
        let fam = CubeFamily::Dyadic;
        let (tau, tp) = calibrate_embedding(std::slice::from_ref(&w), &fam).unwrap();
        let r = check_embedding(&w, tau, tp, &fam).unwrap();
        let (p, jn) = embedding_via_jn(&w, &fam).unwrap();
        assert!((r.params["p"].as_f64().unwrap() - p).abs() < 1e-12);
        assert!((r.rhs - jn.rhs).abs() < 1e-12);
        assert!(r.pass);
    }

    #[test]
    fn embedding_ratio_is_monotone_in_tau() {
        let w = step();
        let mut last = f64::INFINITY;
        for tau in [0.5, 1.0, 2.0, 4.0] {
            let r = check_embedding(&w, tau, 1.0, &CubeFamily::Dyadic).unwrap();
            assert!(r.ratio <= last + 1e-15);
            last = r.ratio;
        }
    }

    #[test]
    fn piecewise_formulas() {
        let e = embedding_piecewise(1.0, 0.5, 1.0, 2.0, 3.0).unwrap();
        assert_eq!((e.p, e.bound), (1.0, 1.0));
        let e = embedding_piecewise(1.5, 0.5, 1.0, 2.0, 3.0).unwrap();
        assert_eq!(e.branch, "flat");
        assert!(e.other.is_some());
        let e = embedding_piecewise(2.0, 0.5, 1.0, 2.0, 3.0).unwrap();
        assert_eq!(e.branch, "large");
        assert!((e.p - 2f64.exp()).abs() < 1e-12);
        assert!((e.bound - 2f64.exp().exp()).abs() < 1e-9);
        assert!(matches!(embedding_piecewise(0.9, 0.5, 1.0, 1.0, 1.0), Err(Error::InvalidConstant(_))));
    }

    #[test]
    fn bmo_vs_bmow_examples() {
        let g = GridSpec::new(1, 3).unwrap();
        let w = Weight::constant(g, 1.0).unwrap();
        let f = GridFn::new(g, vec![0.0, 1.0, 3.0, 0.5, 2.0, 2.0, 0.0, 1.0]).unwrap();
        let r = check_bmo_vs_bmow(&f, &w, 2.0, &CubeFamily::aligned(1, 1)).unwrap();
        assert!((r.params["implied_c"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        let c = GridFn::constant(g, 1.0).unwrap();
        let r = check_bmo_vs_bmow(&c, &w, 4.0, &CubeFamily::Dyadic).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    }
}
