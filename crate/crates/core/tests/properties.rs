//! Property tests for the invariants of the constants, checks, grid and
//! Sobolev modules.

mod common;

use proptest::prelude::*;
use weightlab::constants::{a_1, a_p, bmo, bmo_w, fujii_wilson, hruscev, jn_sup_r, log_ainfty};
use weightlab::families::{FlatShape, WeightKind};
use weightlab::maximal::local_maximal;
use weightlab::sobolev::{classical_sobolev, sobolev_exponent};
use weightlab::verify::{check_bmo_chain, check_left_open, check_rhi, embedding_via_jn, rhi_epsilon_max};
use weightlab::{dual_weight, Cube, CubeFamily, GridFn, GridSpec, Weight};

fn weight_strategy() -> impl Strategy<Value = Weight> {
    (1usize..=2, 1u32..=4, any::<u64>(), 0.1f64..4.0).prop_map(|(n, level, seed, range)| {
        let level = if n == 2 { level.min(3) } else { level };
        WeightKind::Random { range, seed }.generate(GridSpec::new(n, level).unwrap()).unwrap()
    })
}

fn families() -> [CubeFamily; 2] {
    [CubeFamily::Dyadic, CubeFamily::aligned(1, 1)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constants_are_scale_invariant(w in weight_strategy(), c in 0.01f64..100.0) {
        let cw = w.scaled(c).unwrap();
        for fam in families() {
            let pairs = [
                (a_p(&w, 2.0, &fam).unwrap().value, a_p(&cw, 2.0, &fam).unwrap().value),
                (a_1(&w, &fam).value, a_1(&cw, &fam).value),
                (fujii_wilson(&w, &fam).value, fujii_wilson(&cw, &fam).value),
                (hruscev(&w, &fam).value, hruscev(&cw, &fam).value),
                (log_ainfty(&w, &fam).value, log_ainfty(&cw, &fam).value),
                (bmo_w(&w.log(), &w, &fam).unwrap().value, bmo_w(&cw.log(), &cw, &fam).unwrap().value),
            ];
            for (a, b) in pairs {
                prop_assert!(common::rel_close(a, b, 1e-12), "{a} vs {b}");
            }
            let (b0, b1) = (bmo(&w.log(), &fam).value, bmo(&cw.log(), &fam).value);
            prop_assert!((b0 - b1).abs() <= 1e-12 * b0.max(1.0));
        }
    }

    #[test]
    fn constants_are_at_least_one_and_a_p_decreases(w in weight_strategy()) {
        for fam in families() {
            let mut prev = f64::INFINITY;
            for p in [1.2, 1.5, 2.0, 3.0, 6.0] {
                let v = a_p(&w, p, &fam).unwrap().value;
                prop_assert!(v >= 1.0 - 1e-12);
                prop_assert!(v <= prev * (1.0 + 1e-12));
                prev = v;
            }
            prop_assert!(fujii_wilson(&w, &fam).value >= 1.0 - 1e-12);
            prop_assert!(hruscev(&w, &fam).value >= 1.0 - 1e-12);
            prop_assert!(log_ainfty(&w, &fam).value >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn fujii_wilson_is_one_only_for_constants(w in weight_strategy()) {
        prop_assume!(!w.is_constant());
        for fam in families() {
            prop_assert!(fujii_wilson(&w, &fam).value > 1.0);
        }
    }

    #[test]
    fn refinement_never_decreases_constants(w in weight_strategy()) {
        let (d, a) = (CubeFamily::Dyadic, CubeFamily::aligned(1, 1));
        prop_assert!(a_p(&w, 2.0, &a).unwrap().value >= a_p(&w, 2.0, &d).unwrap().value);
        prop_assert!(fujii_wilson(&w, &a).value >= fujii_wilson(&w, &d).value);
        prop_assert!(hruscev(&w, &a).value >= hruscev(&w, &d).value);
        prop_assert!(log_ainfty(&w, &a).value >= log_ainfty(&w, &d).value);
        let (rd, ra) = (jn_sup_r(&w, &d, 3.0).unwrap().r, jn_sup_r(&w, &a, 3.0).unwrap().r);
        prop_assert!(ra <= rd * (1.0 + 1e-9));
    }

    #[test]
    fn entropy_bump_bounds_bmo_w(w in weight_strategy()) {
        for fam in families() {
            let lhs = bmo_w(&w.log(), &w, &fam).unwrap().value;
            prop_assert!(lhs <= 8.0 * (log_ainfty(&w, &fam).value - 1.0) * (1.0 + 1e-9) + 1e-15);
        }
    }

    #[test]
    fn checks_are_scale_invariant(w in weight_strategy(), c in 0.01f64..100.0) {
        let cw = w.scaled(c).unwrap();
        let fam = CubeFamily::Dyadic;
        let eps = rhi_epsilon_max(fujii_wilson(&w, &fam).value, w.grid().dim()).min(1.0);
        let pairs = [
            (check_rhi(&w, eps, &fam).unwrap().ratio, check_rhi(&cw, eps, &fam).unwrap().ratio),
            (check_left_open(&w, 2.0, &fam).unwrap().ratio, check_left_open(&cw, 2.0, &fam).unwrap().ratio),
            (embedding_via_jn(&w, &fam).unwrap().1.ratio, embedding_via_jn(&cw, &fam).unwrap().1.ratio),
        ];
        for (a, b) in pairs {
            prop_assert!(common::rel_close(a, b, 1e-10), "{a} vs {b}");
        }
        let (x, y) = (check_bmo_chain(&w, &fam).unwrap(), check_bmo_chain(&cw, &fam).unwrap());
        for (a, b) in x.iter().zip(&y) {
            prop_assert!(common::rel_close(a.ratio, b.ratio, 1e-10));
        }
    }

    #[test]
    fn hard_checks_hold_on_random_weights(w in weight_strategy()) {
        for fam in families() {
            prop_assert!(embedding_via_jn(&w, &fam).unwrap().1.pass);
            let chain = check_bmo_chain(&w, &fam).unwrap();
            prop_assert!(chain[0].pass && chain[1].pass);
        }
    }

    #[test]
    fn dual_weight_is_an_involution(w in weight_strategy(), p in 1.1f64..6.0) {
        let q = p / (p - 1.0);
        let back = dual_weight(&dual_weight(&w, p).unwrap(), q).unwrap();
        for (a, b) in w.values().iter().zip(back.values()) {
            prop_assert!(common::rel_close(*a, *b, 1e-12));
        }
    }

    #[test]
    fn averages_are_linear_and_additive(a in proptest::collection::vec(-3.0f64..3.0, 16),
                                        b in proptest::collection::vec(-3.0f64..3.0, 16),
                                        s in -2.0f64..2.0) {
        let grid = GridSpec::new(1, 4).unwrap();
        let f = GridFn::new(grid, a.clone()).unwrap();
        let g = GridFn::new(grid, b.clone()).unwrap();
        let h = GridFn::new(grid, a.iter().zip(&b).map(|(x, y)| x + s * y).collect()).unwrap();
        let q = Cube::interval(3, 8);
        let lin = f.average(&q).unwrap() + s * g.average(&q).unwrap();
        prop_assert!((h.average(&q).unwrap() - lin).abs() <= 1e-12 * (1.0 + lin.abs()));
        let whole = f.average(&Cube::interval(0, 16)).unwrap();
        let halves = 0.5 * (f.average(&Cube::interval(0, 8)).unwrap() + f.average(&Cube::interval(8, 8)).unwrap());
        prop_assert!((whole - halves).abs() <= 1e-12 * (1.0 + whole.abs()));
        let unit = Weight::constant(grid, 1.0).unwrap();
        prop_assert_eq!(unit.weighted_average(&f, &q).unwrap(), f.average(&q).unwrap());
    }

    #[test]
    fn maximal_is_homogeneous(w in weight_strategy(), c in 0.01f64..100.0) {
        let q = w.grid().domain();
        for fam in families() {
            let m = local_maximal(&w, &q, &fam).unwrap().values;
            let mc = local_maximal(&w.scaled(c).unwrap(), &q, &fam).unwrap().values;
            for (x, y) in m.iter().zip(&mc) {
                prop_assert!(common::rel_close(c * x, *y, 1e-12));
            }
        }
    }
}

#[test]
fn aligned_enumeration_contains_dyadic() {
    for (n, level) in [(1, 5), (2, 3)] {
        let grid = GridSpec::new(n, level).unwrap();
        let aligned = grid.enumerate_cubes(&CubeFamily::aligned(1, 1));
        for q in grid.enumerate_cubes(&CubeFamily::Dyadic) {
            assert!(aligned.contains(&q));
        }
    }
}

#[test]
fn flat_weights_have_linear_jn_asymptotics() {
    let grid = GridSpec::new(1, 7).unwrap();
    let fam = CubeFamily::Dyadic;
    let ks: Vec<f64> = [0.01, 0.05, 0.1, 0.2]
        .iter()
        .map(|&delta| {
            let w = WeightKind::Flat { delta, shape: FlatShape::Saw }.generate(grid).unwrap();
            let excess = fujii_wilson(&w, &fam).value - 1.0;
            1.0 / jn_sup_r(&w, &fam, 3.0).unwrap().r / excess
        })
        .collect();
    let (lo, hi) = ks.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &k| (a.min(k), b.max(k)));
    assert!(hi / lo <= 3.0, "{ks:?}");
}

#[test]
fn weighted_sobolev_exponent_is_continuous_at_flat_weights() {
    let target = classical_sobolev(1.0, 2);
    let mut prev = f64::INFINITY;
    for k in 1..=6 {
        let fw = 1.0 + 10f64.powi(-k);
        let gap = (sobolev_exponent(1.0, fw, 8.0, 2).unwrap() - target).abs();
        assert!(gap < prev);
        prev = gap;
    }
    assert!(prev < 1e-4);
}
