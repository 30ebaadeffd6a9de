mod common;

use clubval::regression::{ln_gamma, regularized_incomplete_beta, t_two_sided_p};
use common::{beta_reg_quadrature, ln_gamma_half_integer, t_tail_two_sided};
use proptest::prelude::*;

#[test]
fn ln_gamma_matches_half_integer_recurrence() {
    for m in 1..=400u32 {
        let x = m as f64 / 2.0;
        let got = ln_gamma(x).unwrap();
        let want = ln_gamma_half_integer(m);
        assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "ln Γ({x}) = {got} vs {want}");
    }
}

#[test]
fn incomplete_beta_matches_quadrature() {
    for &(a, b) in &[(0.5, 0.5), (1.0, 3.0), (2.5, 0.5), (17.5, 0.5), (4.0, 9.0), (30.0, 2.0)] {
        for i in 1..20 {
            let x = i as f64 / 20.0;
            let got = regularized_incomplete_beta(a, b, x).unwrap();
            let want = beta_reg_quadrature(a, b, x);
            assert!((got - want).abs() < 1e-10, "I_{x}({a}, {b}) = {got} vs {want}");
        }
    }
}

#[test]
fn far_tail_is_relatively_accurate() {
    for &(t, dof) in &[(12.0, 35u32), (25.0, 100), (8.0, 5), (40.0, 35)] {
        let got = t_two_sided_p(t, dof as usize).unwrap();
        let want = t_tail_two_sided(t, dof);
        assert!((got - want).abs() <= 1e-9 * want, "p({t}, {dof}) = {got:e} vs {want:e}");
    }
}

#[test]
fn cauchy_closed_form() {
    for i in 0..=40 {
        let t = i as f64 * 0.5;
        let want = 1.0 - 2.0 * t.atan() / std::f64::consts::PI;
        assert!((t_two_sided_p(t, 1).unwrap() - want).abs() < 1e-12);
    }
}

#[test]
fn domain_errors() {
    assert!(t_two_sided_p(1.0, 0).is_err());
    assert!(t_two_sided_p(f64::NAN, 5).is_err());
    assert_eq!(t_two_sided_p(f64::INFINITY, 5).unwrap(), 0.0);
    assert!(regularized_incomplete_beta(-1.0, 1.0, 0.5).is_err());
    assert!(regularized_incomplete_beta(1.0, 1.0, 1.5).is_err());
}

proptest! {
    #[test]
    fn p_value_is_symmetric_and_monotone(t in 0.0f64..30.0, dt in 1e-3f64..5.0, dof in 1usize..200) {
        let p = t_two_sided_p(t, dof).unwrap();
        prop_assert_eq!(p, t_two_sided_p(-t, dof).unwrap());
        prop_assert!(t_two_sided_p(t + dt, dof).unwrap() <= p);
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn heavier_tails_for_fewer_dof(t in 0.5f64..20.0, dof in 1usize..150) {
        prop_assert!(t_two_sided_p(t, dof + 1).unwrap() <= t_two_sided_p(t, dof).unwrap() + 1e-15);
    }

    #[test]
    fn beta_reflection(a in 0.1f64..40.0, b in 0.1f64..40.0, x in 0.0f64..=1.0) {
        let lhs = regularized_incomplete_beta(a, b, x).unwrap();
        let rhs = 1.0 - regularized_incomplete_beta(b, a, 1.0 - x).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12, "{} vs {}", lhs, rhs);
    }
}
