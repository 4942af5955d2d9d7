mod common;

use std::f64::consts::PI;

use common::*;
use ellipse_rigidity::elliptic::*;

fn m(v: f64) -> Modulus {
    Modulus::new(v).unwrap()
}

#[test]
fn complete_integrals_match_quadrature() {
    for v in [0.0, 0.1, 0.5, 0.81, 0.99] {
        assert!(rel(complete_k(m(v)), k_oracle(v)) < 1e-13, "K({v})");
        assert!(rel(complete_e(m(v)), e_oracle(v)) < 1e-13, "E({v})");
    }
}

#[test]
fn legendre_relation() {
    for v in [0.05, 0.3, 0.5, 0.77, 0.95] {
        let (k, e) = (complete_k(m(v)), complete_e(m(v)));
        let (kp, ep) = (complete_k(m(1.0 - v)), complete_e(m(1.0 - v)));
        assert!((e * kp + ep * k - k * kp - PI / 2.0).abs() < 1e-13, "m = {v}");
    }
}

#[test]
fn incomplete_integrals_match_quadrature() {
    for &(phi, v) in &[
        (0.3, 0.2),
        (0.9, 0.6),
        (1.2, 0.99),
        (PI / 2.0, 0.5),
        (3.0 * PI / 2.0, 0.3),
        (-2.5, 0.7),
        (7.0, 0.45),
    ] {
        assert!(rel(incomplete_f(phi, m(v)), f_oracle(phi, v)) < 1e-12, "F({phi}|{v})");
        assert!(rel(incomplete_e(phi, m(v)), einc_oracle(phi, v)) < 1e-12, "E({phi}|{v})");
    }
}

#[test]
fn amplitude_inverts_f() {
    for v in [0.0, 0.2, 0.6, 0.9, 0.99] {
        for i in -20..=20 {
            let phi = 0.37 * f64::from(i);
            let am = jacobi(incomplete_f(phi, m(v)), m(v)).am;
            assert!((am - phi).abs() < 1e-12, "am(F({phi}|{v})) = {am}");
        }
    }
}

#[test]
fn sn_cn_pythagoras_on_grid() {
    for v in [0.0, 0.25, 0.5, 0.75, 0.999] {
        let k = complete_k(m(v));
        for i in -40..=40 {
            let j = jacobi(8.0 * k * f64::from(i) / 40.0 + 0.01, m(v));
            assert!((j.sn * j.sn + j.cn * j.cn - 1.0).abs() < 1e-14);
            assert!((j.sn - j.am.sin()).abs() < 1e-15);
        }
    }
}

#[test]
fn zeta_matches_partial_sums() {
    for s in [3.01, 3.1, 3.5, 3.9] {
        let z = riemann_zeta(s).unwrap();
        assert!(rel(z, zeta_oracle(s)) < 1e-13, "zeta({s}) = {z}");
    }
}

#[test]
fn zeta_classical_values() {
    assert!((riemann_zeta(2.0).unwrap() - PI * PI / 6.0).abs() < 1e-12);
    let z20 = riemann_zeta(20.0).unwrap();
    assert!(z20 > 1.0 && z20 < 1.0 + 1e-5);
    assert!(riemann_zeta(1.0).is_err());
}
