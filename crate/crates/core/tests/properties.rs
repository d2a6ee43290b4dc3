//! Randomized invariants on small 1-D lattices.

use gmlab::growth::{GrandParams, GrandWeight, MorreyGrowth};
use gmlab::kernel::{apply_cz, builtin_kernel, commutator, KernelShape};
use gmlab::maximal::{maximal, noncentered_maximal};
use gmlab::norms::{bmo_norm, generalized_morrey_norm, grand_generalized_morrey_norm, lp_norm, PointFunction};
use gmlab::{FiniteSpace, SpaceFile, Weight};
use proptest::prelude::*;

fn lattice(n: usize) -> FiniteSpace {
    SpaceFile::lattice1d(n, 1.0).build().unwrap()
}

fn values(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), -4.0..4.0f64], 2..max_len)
}

fn pf(v: &[f64]) -> PointFunction {
    PointFunction::new(v.to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn maximal_dominates_and_orders(v in values(24), r in 1.0..3.0f64) {
        let s = lattice(v.len());
        let f = pf(&v);
        let m = maximal(&s, &f).unwrap();
        let mt1 = noncentered_maximal(&s, &f, 1.0).unwrap();
        let mtr = noncentered_maximal(&s, &f, r).unwrap();
        for i in 0..v.len() {
            prop_assert!(m.values()[i] >= v[i].abs());
            prop_assert!(mt1.values()[i] >= m.values()[i] * (1.0 - 1e-12));
            prop_assert!(mtr.values()[i] >= mt1.values()[i] * (1.0 - 1e-12));
        }
    }

    #[test]
    fn morrey_norms_scale_by_powers_of_two(v in values(24), k in -4i32..4, s_exp in 0.1..1.0f64) {
        let s = lattice(v.len());
        let w = Weight::power_of_position(&s, 0.3).unwrap();
        let mg = MorreyGrowth::Power(s_exp);
        let c = 2f64.powi(k);
        let scaled: Vec<f64> = v.iter().map(|x| x * c).collect();
        let a = generalized_morrey_norm(&s, &pf(&v), &w, 2.0, &mg).unwrap().value;
        let b = generalized_morrey_norm(&s, &pf(&scaled), &w, 2.0, &mg).unwrap().value;
        prop_assert_eq!(b, a * c);
        let gp = GrandParams::new(2.0, GrandWeight::Power(1.0), 0).unwrap();
        let a = grand_generalized_morrey_norm(&s, &pf(&v), &w, &gp, &mg).unwrap().value;
        let b = grand_generalized_morrey_norm(&s, &pf(&scaled), &w, &gp, &mg).unwrap().value;
        prop_assert_eq!(b, a * c);
    }

    #[test]
    fn grand_norm_dominates_each_slice(v in values(20)) {
        let s = lattice(v.len());
        let w = Weight::unit(&s);
        let mg = MorreyGrowth::Power(0.5);
        let gp = GrandParams::new(2.0, GrandWeight::Power(1.0), 0).unwrap();
        let grand = grand_generalized_morrey_norm(&s, &pf(&v), &w, &gp, &mg).unwrap().value;
        for &eps in gp.grid.nodes() {
            let slice = generalized_morrey_norm(&s, &pf(&v), &w, 2.0 - eps, &mg).unwrap().value;
            prop_assert!(grand >= gp.factor(eps) * slice);
        }
    }

    #[test]
    fn lp_triangle(v in values(24), shift in -1.0..1.0f64) {
        let s = lattice(v.len());
        let w = Weight::unit(&s);
        let g: Vec<f64> = v.iter().rev().map(|x| x + shift).collect();
        let sum: Vec<f64> = v.iter().zip(&g).map(|(a, b)| a + b).collect();
        let lhs = lp_norm(&s, &pf(&sum), &w, 1.5).unwrap();
        let rhs = lp_norm(&s, &pf(&v), &w, 1.5).unwrap() + lp_norm(&s, &pf(&g), &w, 1.5).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-9));
    }

    #[test]
    fn bmo_bounded_by_twice_sup(v in values(24)) {
        let s = lattice(v.len());
        let sup = v.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
        prop_assert!(bmo_norm(&s, &pf(&v)).unwrap().value <= 2.0 * sup * (1.0 + 1e-12));
    }

    #[test]
    fn commutator_is_bt_minus_tb(v in values(20), b in values(20)) {
        let n = v.len().min(b.len());
        let s = lattice(n);
        let k = builtin_kernel(&s, &KernelShape::Riesz1d, None, None).unwrap();
        let (f, b) = (pf(&v[..n]), pf(&b[..n]));
        let c = commutator(&s, &k, &b, &f).unwrap();
        let tf = apply_cz(&s, &k, &f).unwrap();
        let bf: Vec<f64> = (0..n).map(|i| b.values()[i] * f.values()[i]).collect();
        let tbf = apply_cz(&s, &k, &pf(&bf)).unwrap();
        let scale: f64 = 1.0 + (0..n).map(|i| b.values()[i].abs() * tf.values()[i].abs() + tbf.values()[i].abs()).sum::<f64>();
        for i in 0..n {
            let want = b.values()[i] * tf.values()[i] - tbf.values()[i];
            prop_assert!((c.values()[i] - want).abs() <= 1e-12 * scale);
        }
    }
}
