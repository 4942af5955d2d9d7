//! Elliptic integrals and Jacobi elliptic functions in double precision.
//!
//! Everything is parametrized by `m = k²` (the parameter, not the modulus).
//! Complete integrals use the arithmetic-geometric mean; incomplete integrals
//! and the Jacobi amplitude use the Landen sequence generated by the same
//! mean, so all routines stay well conditioned for `m` up to `1 - 1e-9`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Iteration cap for the AGM. Convergence is quadratic, so this is never hit
/// for `m < 1`.
const AGM_MAX_ITER: usize = 64;

/// The elliptic parameter `m`, restricted to `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Modulus(f64);

impl Modulus {
    pub fn new(m: f64) -> Result<Self> {
        if (0.0..1.0).contains(&m) {
            Ok(Modulus(m))
        } else {
            Err(Error::domain("m", m, "0 <= m < 1"))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Modulus {
    type Error = Error;

    fn try_from(m: f64) -> Result<Self> {
        Modulus::new(m)
    }
}

/// Values of the Jacobi elliptic functions at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiValues {
    pub sn: f64,
    pub cn: f64,
    /// Amplitude in radians.
    pub am: f64,
}

/// One step of the arithmetic-geometric mean, keeping `c = (a - b) / 2`
/// without cancellation.
#[derive(Debug, Clone, Copy)]
struct AgmStep {
    a: f64,
    b: f64,
    c: f64,
}

/// The full AGM ladder starting at `(1, sqrt(1-m), sqrt(m))`.
fn agm_ladder(m: f64) -> Vec<AgmStep> {
    let mut steps = Vec::with_capacity(8);
    let mut cur = AgmStep {
        a: 1.0,
        b: (1.0 - m).sqrt(),
        c: m.sqrt(),
    };
    steps.push(cur);
    for _ in 0..AGM_MAX_ITER {
        if cur.c <= f64::EPSILON * cur.a {
            break;
        }
        let a = 0.5 * (cur.a + cur.b);
        let b = (cur.a * cur.b).sqrt();
        let c = 0.25 * cur.c * cur.c / a;
        cur = AgmStep { a, b, c };
        steps.push(cur);
    }
    steps
}

/// Complete elliptic integral of the first kind, `K(m) = F(π/2 | m)`.
pub fn complete_k(m: Modulus) -> f64 {
    let ladder = agm_ladder(m.0);
    let last = ladder.last().expect("ladder is never empty");
    FRAC_PI_2 / last.a
}

/// Complete elliptic integral of the second kind, `E(m) = E(π/2 | m)`.
pub fn complete_e(m: Modulus) -> f64 {
    let ladder = agm_ladder(m.0);
    let last = ladder.last().expect("ladder is never empty");
    let k = FRAC_PI_2 / last.a;
    k * e_over_k(&ladder)
}

/// `E(m) / K(m) = 1 - ½ Σ 2ⁿ cₙ²`.
fn e_over_k(ladder: &[AgmStep]) -> f64 {
    let mut pow = 1.0;
    let mut sum = 0.0;
    for step in ladder {
        sum += pow * step.c * step.c;
        pow *= 2.0;
    }
    1.0 - 0.5 * sum
}

/// Nearest integer to `t`, with ties broken toward zero.
fn nearest_toward_zero(t: f64) -> f64 {
    (t.abs() - 0.5).ceil().max(0.0).copysign(t)
}

/// Splits `phi = n·π + r` with `r ∈ [-π/2, π/2]`.
fn reduce_amplitude(phi: f64) -> (f64, f64) {
    let n = nearest_toward_zero(phi / PI);
    (n, phi - n * PI)
}

/// Landen phase sequence for an amplitude in `[-π/2, π/2]`.
///
/// Returns `(F(phi | m), E(phi | m))`. The phase update
/// `φₙ₊₁ = 2φₙ + atan((bₙ - aₙ) sin φₙ cos φₙ / (aₙ cos² φₙ + bₙ sin² φₙ))`
/// is the branch-free form of `tan(φₙ₊₁ - φₙ) = (bₙ/aₙ) tan φₙ`.
fn incomplete_reduced(phi: f64, m: f64) -> (f64, f64) {
    let ladder = agm_ladder(m);
    let mut phase = phi;
    let mut pow = 1.0;
    let mut sin_sum = 0.0;
    for pair in ladder.windows(2) {
        let (cur, next) = (pair[0], pair[1]);
        let (s, c) = phase.sin_cos();
        let den = cur.a * c * c + cur.b * s * s;
        phase = 2.0 * phase + ((cur.b - cur.a) * s * c / den).atan();
        pow *= 2.0;
        sin_sum += next.c * phase.sin();
    }
    let last = ladder.last().expect("ladder is never empty");
    let f = phase / (pow * last.a);
    let e = f * e_over_k(&ladder) + sin_sum;
    (f, e)
}

/// Incomplete elliptic integral of the first kind, `F(phi | m)`.
///
/// Defined for every real `phi`: odd, and `F(phi + π) = F(phi) + 2K(m)`.
pub fn incomplete_f(phi: f64, m: Modulus) -> f64 {
    let (n, r) = reduce_amplitude(phi);
    let base = if n == 0.0 { 0.0 } else { 2.0 * n * complete_k(m) };
    base + incomplete_reduced(r, m.0).0
}

/// Incomplete elliptic integral of the second kind, `E(phi | m)`.
///
/// Odd in `phi`, with `E(phi + π) = E(phi) + 2E(m)`.
pub fn incomplete_e(phi: f64, m: Modulus) -> f64 {
    let (n, r) = reduce_amplitude(phi);
    let base = if n == 0.0 { 0.0 } else { 2.0 * n * complete_e(m) };
    base + incomplete_reduced(r, m.0).1
}

/// Jacobi amplitude via descending Landen transformation, for `|u| <= K`.
fn amplitude_reduced(u: f64, ladder: &[AgmStep]) -> f64 {
    let last = ladder.last().expect("ladder is never empty");
    let n = ladder.len() - 1;
    let mut phase = (n as f64).exp2() * last.a * u;
    for step in ladder[1..].iter().rev() {
        phase = 0.5 * (phase + (step.c / step.a * phase.sin()).asin());
    }
    phase
}

/// Jacobi elliptic functions `sn`, `cn` and the amplitude `am` at `u`.
///
/// The amplitude is the continuous increasing inverse of `F(· | m)`, so
/// `am(u + 2K) = am(u) + π`.
pub fn jacobi(u: f64, m: Modulus) -> JacobiValues {
    let am = if m.0 == 0.0 {
        u
    } else {
        let ladder = agm_ladder(m.0);
        let half_period = PI / ladder.last().expect("ladder is never empty").a;
        let n = nearest_toward_zero(u / half_period);
        n * PI + amplitude_reduced(u - n * half_period, &ladder)
    };
    let (sn, cn) = am.sin_cos();
    JacobiValues { sn, cn, am }
}

/// Riemann zeta function for real `s > 1`.
///
/// Sums the first `N - 1` terms directly and replaces the tail by its integral
/// plus Euler–Maclaurin corrections.
pub fn riemann_zeta(s: f64) -> Result<f64> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::domain("gamma", s, "gamma > 1"));
    }
    const N: f64 = 16.0;
    // B_{2k} / (2k)!
    const BERNOULLI_OVER_FACT: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30_240.0,
        -1.0 / 1_209_600.0,
        1.0 / 47_900_160.0,
        -691.0 / 1_307_674_368_000.0,
        1.0 / 74_724_249_600.0,
    ];
    let head: f64 = (1..N as u32).map(|n| f64::from(n).powf(-s)).sum();
    let mut tail = N.powf(1.0 - s) / (s - 1.0) + 0.5 * N.powf(-s);
    // rising factorial s (s+1) ... (s+2k-2) times N^{-s-2k+1}
    let mut rising = s;
    let mut power = N.powf(-s - 1.0);
    for (k, coef) in BERNOULLI_OVER_FACT.iter().enumerate() {
        tail += coef * rising * power;
        let k = k as f64;
        rising *= (s + 2.0 * k + 1.0) * (s + 2.0 * k + 2.0);
        power /= N * N;
    }
    Ok(head + tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(v: f64) -> Modulus {
        Modulus::new(v).unwrap()
    }

    #[test]
    fn modulus_domain() {
        assert!(Modulus::new(-0.1).is_err());
        assert!(Modulus::new(1.0).is_err());
        assert!(Modulus::new(f64::NAN).is_err());
        assert!(Modulus::new(0.0).is_ok());
        assert!(Modulus::try_from(0.999_999_999).is_ok());
    }

    #[test]
    fn circle_values() {
        assert_eq!(complete_k(m(0.0)), FRAC_PI_2);
        assert_eq!(complete_e(m(0.0)), FRAC_PI_2);
        assert!((incomplete_f(1.1, m(0.0)) - 1.1).abs() < 1e-15);
        assert!((incomplete_e(0.7, m(0.0)) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn complete_matches_incomplete_at_quarter_period() {
        assert!((incomplete_f(FRAC_PI_2, m(0.25)) - complete_k(m(0.25))).abs() < 1e-14);
        assert!((incomplete_e(FRAC_PI_2, m(0.4)) - complete_e(m(0.4))).abs() < 1e-14);
    }

    #[test]
    fn k_increasing_e_decreasing() {
        let grid: Vec<f64> = (0..100).map(|i| i as f64 / 100.0).collect();
        for w in grid.windows(2) {
            assert!(complete_k(m(w[1])) > complete_k(m(w[0])));
            assert!(complete_e(m(w[1])) < complete_e(m(w[0])));
        }
    }

    #[test]
    fn near_one_is_finite() {
        let k = complete_k(m(1.0 - 1e-9));
        // K ~ ln(4/sqrt(1-m)) for m -> 1
        assert!((k - (4.0 / 1e-9f64.sqrt()).ln()).abs() < 1e-6);
        assert!((complete_e(m(1.0 - 1e-9)) - 1.0).abs() < 1e-7);
    }

    #[test]
    fn jacobi_special_points() {
        let j = jacobi(0.0, m(0.6));
        assert_eq!((j.sn, j.cn, j.am), (0.0, 1.0, 0.0));
        let mm = m(0.37);
        let j = jacobi(complete_k(mm), mm);
        assert!((j.sn - 1.0).abs() < 1e-12);
        assert!(j.cn.abs() < 1e-12);
        assert!((j.am - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn amplitude_shift_by_period() {
        let mm = m(0.81);
        let k = complete_k(mm);
        for u in [-3.0, -0.4, 0.3, 1.9, 5.5] {
            let a0 = jacobi(u, mm).am;
            let a1 = jacobi(u + 2.0 * k, mm).am;
            assert!((a1 - a0 - PI).abs() < 1e-12, "u = {u}");
        }
    }

    #[test]
    fn zeta_known_values() {
        let z2 = riemann_zeta(2.0).unwrap();
        assert!((z2 - PI * PI / 6.0).abs() < 1e-12);
        let z4 = riemann_zeta(4.0).unwrap();
        assert!((z4 - PI.powi(4) / 90.0).abs() < 1e-12);
        let z20 = riemann_zeta(20.0).unwrap();
        assert!(z20 > 1.0 && z20 < 1.0 + 1e-5);
    }

    #[test]
    fn zeta_domain() {
        assert!(riemann_zeta(1.0).is_err());
        assert!(riemann_zeta(0.5).is_err());
        assert!(riemann_zeta(f64::NAN).is_err());
        assert!(riemann_zeta(f64::INFINITY).is_err());
    }
}
