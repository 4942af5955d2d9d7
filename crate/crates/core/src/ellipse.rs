//! Ellipses normalized to unit perimeter, with the Lazutkin coordinate and
//! weight in closed form.
//!
//! Points on the boundary are addressed by the amplitude `phi` through
//! `X(phi) = (a sin phi, -b cos phi)`, so `phi = 0` is the lowest point
//! `(0, -b)` and the marked point `P = (a, 0)` sits at `phi = π/2`. Arc length
//! and the Lazutkin coordinate are both measured from `P`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::elliptic::{complete_e, complete_k, incomplete_e, incomplete_f, Modulus};
use crate::error::{Error, Result};

/// Amplitude of the marked point `P = (a, 0)`.
pub const P_AMPLITUDE: f64 = FRAC_PI_2;

/// A unit-perimeter ellipse centred at the origin with its major axis on the
/// x-axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ellipse {
    /// Eccentricity.
    pub e: f64,
    /// Major semi-axis.
    pub a: f64,
    /// Minor semi-axis.
    pub b: f64,
    /// Focal distance.
    pub c: f64,
    /// `K(e²)`.
    pub k_e2: f64,
    /// `E(e²)`.
    pub e_e2: f64,
}

/// A point on the boundary together with its intrinsic coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub phi: f64,
    pub position: [f64; 2],
    /// Signed arc length from `P`.
    pub s: f64,
    /// Lazutkin coordinate in `[0, 1)`.
    pub x: f64,
    /// Radius of curvature.
    pub rho: f64,
    /// Lazutkin weight.
    pub mu: f64,
}

impl Ellipse {
    /// Builds the ellipse of eccentricity `e` whose perimeter `4aE(e²)` is 1.
    pub fn new(e: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&e) {
            return Err(Error::domain("eccentricity", e, "0 <= e < 1"));
        }
        let m = Modulus::new(e * e)?;
        let k_e2 = complete_k(m);
        let e_e2 = complete_e(m);
        let a = 1.0 / (4.0 * e_e2);
        Ok(Ellipse {
            e,
            a,
            b: a * (1.0 - e * e).sqrt(),
            c: a * e,
            k_e2,
            e_e2,
        })
    }

    /// The parameter `e²` used by every boundary integral.
    pub fn modulus(&self) -> Modulus {
        Modulus::new(self.e * self.e).expect("validated at construction")
    }

    pub fn perimeter(&self) -> f64 {
        4.0 * self.a * self.e_e2
    }

    pub fn position(&self, phi: f64) -> [f64; 2] {
        let (s, c) = phi.sin_cos();
        [self.a * s, -self.b * c]
    }

    /// `dX/dphi`, pointing counterclockwise.
    pub fn tangent(&self, phi: f64) -> [f64; 2] {
        let (s, c) = phi.sin_cos();
        [self.a * c, self.b * s]
    }

    /// Residual of the implicit equation `x²/a² + y²/b² - 1`.
    pub fn implicit_residual(&self, p: [f64; 2]) -> f64 {
        (p[0] / self.a).powi(2) + (p[1] / self.b).powi(2) - 1.0
    }

    /// Amplitude of a point on the boundary, in `(-π, π]`.
    pub fn amplitude_of(&self, p: [f64; 2]) -> f64 {
        // X(phi) = (a sin phi, -b cos phi)  =>  phi = atan2(x/a, -y/b)
        (p[0] / self.a).atan2(-p[1] / self.b)
    }

    pub fn arc_length(&self, phi: f64) -> f64 {
        self.a * (incomplete_e(phi, self.modulus()) - self.e_e2)
    }

    pub fn radius_of_curvature(&self, phi: f64) -> f64 {
        let m = self.e * self.e;
        let w = 1.0 - m * phi.sin().powi(2);
        self.a / (1.0 - m).sqrt() * w * w.sqrt()
    }

    /// Lazutkin coordinate before reduction mod 1; increases by 1 per turn.
    pub fn lazutkin_unwrapped(&self, phi: f64) -> f64 {
        (incomplete_f(phi, self.modulus()) - self.k_e2) / (4.0 * self.k_e2)
    }

    /// Lazutkin coordinate reduced into `[0, 1)`.
    pub fn lazutkin_x(&self, phi: f64) -> f64 {
        wrap_unit(self.lazutkin_unwrapped(phi))
    }

    /// Lazutkin weight `μ = 2K(e²) sqrt((1-e²)/(1-e² sin² phi))`.
    pub fn lazutkin_weight(&self, phi: f64) -> f64 {
        let m = self.e * self.e;
        2.0 * self.k_e2 * ((1.0 - m) / (1.0 - m * phi.sin().powi(2))).sqrt()
    }

    /// Normalizing constant `C = [∫ ρ^{-2/3} ds]^{-1}`.
    pub fn lazutkin_constant(&self) -> f64 {
        let one_minus = 1.0 - self.e * self.e;
        1.0 / (4.0 * self.k_e2 * self.a.cbrt() * one_minus.cbrt())
    }

    pub fn boundary_point(&self, phi: f64) -> BoundaryPoint {
        BoundaryPoint {
            phi,
            position: self.position(phi),
            s: self.arc_length(phi),
            x: self.lazutkin_x(phi),
            rho: self.radius_of_curvature(phi),
            mu: self.lazutkin_weight(phi),
        }
    }
}

/// Reduces into `[0, 1)`, snapping values within rounding of 1 back to 0.
pub(crate) fn wrap_unit(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rejects_bad_eccentricity() {
        assert!(Ellipse::new(1.0).is_err());
        assert!(Ellipse::new(-0.01).is_err());
        assert!(Ellipse::new(f64::NAN).is_err());
    }

    #[test]
    fn circle_of_unit_circumference() {
        let el = Ellipse::new(0.0).unwrap();
        let r = 1.0 / (2.0 * PI);
        assert!((el.a - r).abs() < 1e-15);
        assert!((el.b - r).abs() < 1e-15);
        assert_eq!(el.c, 0.0);
        for phi in [0.0, 0.3, 2.0, 5.0] {
            assert!((el.lazutkin_weight(phi) - PI).abs() < 1e-14);
            let expect = wrap_unit((phi - FRAC_PI_2) / (2.0 * PI));
            assert!((el.lazutkin_x(phi) - expect).abs() < 1e-14);
        }
        // μ = 1/(2Cρ^{1/3}) with ρ = 1/(2π)
        let mu = 1.0 / (2.0 * el.lazutkin_constant() * r.cbrt());
        assert!((mu - PI).abs() < 1e-13);
        assert!((el.lazutkin_constant() - r.powf(2.0 / 3.0)).abs() < 1e-14);
    }

    #[test]
    fn axis_relations() {
        for e in [0.1, 0.5, 0.9, 0.99] {
            let el = Ellipse::new(e).unwrap();
            assert!((el.perimeter() - 1.0).abs() < 1e-12);
            assert!((el.c * el.c - (el.a * el.a - el.b * el.b)).abs() < 1e-14);
            assert!((e * e - (1.0 - (el.b / el.a).powi(2))).abs() < 1e-14);
            assert!(el.b <= el.a);
        }
    }

    #[test]
    fn marked_point_and_antipode() {
        let el = Ellipse::new(0.6).unwrap();
        let p = el.boundary_point(FRAC_PI_2);
        assert!((p.position[0] - el.a).abs() < 1e-15);
        assert!(p.position[1].abs() < 1e-15);
        assert!(p.s.abs() < 1e-15);
        assert_eq!(p.x, 0.0);
        let q = el.boundary_point(3.0 * FRAC_PI_2);
        assert!((q.position[0] + el.a).abs() < 1e-15);
        assert!((q.x - 0.5).abs() < 1e-14);
        assert!((q.s - 0.5).abs() < 1e-12);
        assert!(q.rho > 0.0 && q.mu > 0.0);
    }

    #[test]
    fn amplitude_inverse_of_position() {
        let el = Ellipse::new(0.7).unwrap();
        for phi in [-3.0, -1.2, 0.0, 0.4, 1.5, 3.0] {
            let back = el.amplitude_of(el.position(phi));
            assert!((back - phi).abs() < 1e-13, "{phi} -> {back}");
        }
    }
}
