//! Periodic billiard orbits of rotation number `1/q` inside the ellipse.
//!
//! Orbits are generated from confocal elliptic caustics. For a caustic
//! parameter `λ ∈ (0, b)` the trajectory through `P` tangent to the caustic
//! has rotation number `ω(λ) = δ_λ / 4K(m_λ)`; the period-`q` orbit is found
//! by bisecting `ω(λ) = 1/q`, and its collision points are read off the Jacobi
//! functions at `uₙ = 4K(m_λ)(n/q + 1/4)`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use serde::Serialize;

use crate::elliptic::{complete_k, incomplete_f, jacobi, Modulus};
use crate::ellipse::{Ellipse, P_AMPLITUDE};
use crate::error::{Error, Result};

/// Residual tolerance on `ω(λ) - 1/q` for the caustic bisection.
pub const OMEGA_TOLERANCE: f64 = 1e-13;
/// Iteration cap for the caustic bisection.
pub const BISECTION_MAX_ITER: u32 = 200;
/// Maximum implicit-equation residual for a point to count as on the ellipse.
pub const ON_BOUNDARY_TOLERANCE: f64 = 1e-9;

/// A confocal caustic `x²/(a²-λ²) + y²/(b²-λ²) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Caustic {
    pub lambda: f64,
    /// `(a² - b²) / (a² - λ²)`, always in `(e², 1)`.
    pub m_lambda: f64,
    /// `2F(asin(λ/b) | m_λ)`, the argument increment between bounces.
    pub delta_lambda: f64,
    /// Rotation number of every orbit tangent to this caustic.
    pub omega: f64,
}

/// A periodic orbit through `P` with rotation number `1/q`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicOrbit {
    pub q: u32,
    /// Caustic of the orbit; `None` for the conventional orbits `q = 1, 2`.
    pub caustic: Option<Caustic>,
    /// Jacobi arguments `uₙ` (empty for `q <= 2`).
    pub u: Vec<f64>,
    /// Amplitudes of the collision points on the boundary.
    pub amplitudes: Vec<f64>,
    pub points: Vec<[f64; 2]>,
    /// Lazutkin coordinates in `[0, 1)`.
    pub x: Vec<f64>,
    /// Angles between the incoming edge and the tangent, in `(0, π)`.
    pub theta: Vec<f64>,
    /// Lazutkin weight at each collision point.
    pub mu: Vec<f64>,
    /// Worst violation of the reflection law over all collision points.
    pub reflection_residual: f64,
}

impl PeriodicOrbit {
    pub fn lambda(&self) -> Option<f64> {
        self.caustic.map(|c| c.lambda)
    }

    /// Total length of the closed polygon.
    pub fn length(&self) -> f64 {
        if self.q == 1 {
            return 0.0;
        }
        let n = self.points.len();
        (0..n)
            .map(|i| distance(self.points[i], self.points[(i + 1) % n]))
            .sum()
    }

    /// Number of turns the polygon makes around the origin.
    ///
    /// The degenerate orbits `q <= 2` pass through (or sit at) a single axis
    /// and are treated as simple by convention.
    pub fn winding_number(&self) -> i64 {
        if self.q <= 2 {
            return 1;
        }
        let n = self.points.len();
        let total: f64 = (0..n)
            .map(|i| {
                let (p, r) = (self.points[i], self.points[(i + 1) % n]);
                cross(p, r).atan2(dot(p, r))
            })
            .sum();
        (total / (2.0 * PI)).round() as i64
    }
}

/// Caustic data for a given `λ`.
pub fn rotation_number(ellipse: &Ellipse, lambda: f64) -> Result<Caustic> {
    let b = ellipse.b;
    if !(lambda > 0.0 && lambda < b) {
        return Err(Error::domain("lambda", lambda, "0 < lambda < b"));
    }
    let c2 = ellipse.c * ellipse.c;
    let m_lambda = c2 / (c2 + (b - lambda) * (b + lambda));
    let m = Modulus::new(m_lambda)?;
    let delta_lambda = 2.0 * incomplete_f((lambda / b).asin(), m);
    let omega = delta_lambda / (4.0 * complete_k(m));
    Ok(Caustic {
        lambda,
        m_lambda,
        delta_lambda,
        omega,
    })
}

/// Bisects `ω(λ) = 1/q` on `(0, b)`.
pub fn solve_caustic(ellipse: &Ellipse, q: u32) -> Result<Caustic> {
    if q < 3 {
        return Err(Error::domain(
            "q",
            f64::from(q),
            "q >= 3 (periods 1 and 2 have no caustic)",
        ));
    }
    let target = 1.0 / f64::from(q);
    let (mut lo, mut hi) = (0.0, ellipse.b);
    let mut residual = f64::INFINITY;
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let caustic = rotation_number(ellipse, mid)?;
        residual = caustic.omega - target;
        if residual.abs() <= OMEGA_TOLERANCE {
            return Ok(caustic);
        }
        if residual < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NonConvergence {
        q,
        lo,
        hi,
        residual,
    })
}

/// Builds the canonical period-`q` orbit through `P`.
pub fn build_orbit(ellipse: &Ellipse, q: u32) -> Result<PeriodicOrbit> {
    match q {
        0 => Err(Error::domain("q", 0.0, "q >= 1")),
        1 | 2 => Ok(degenerate_orbit(ellipse, q)),
        _ => orbit_from_caustic(ellipse, q, solve_caustic(ellipse, q)?),
    }
}

/// The conventional orbits: `P` alone for `q = 1` and the bouncing ball along
/// the major axis for `q = 2`.
fn degenerate_orbit(ellipse: &Ellipse, q: u32) -> PeriodicOrbit {
    let amplitudes: Vec<f64> = match q {
        1 => vec![P_AMPLITUDE],
        _ => vec![P_AMPLITUDE, P_AMPLITUDE + PI],
    };
    let points = match q {
        1 => vec![[ellipse.a, 0.0]],
        _ => vec![[ellipse.a, 0.0], [-ellipse.a, 0.0]],
    };
    let x = match q {
        1 => vec![0.0],
        _ => vec![0.0, 0.5],
    };
    let mu = amplitudes
        .iter()
        .map(|&phi| ellipse.lazutkin_weight(phi))
        .collect();
    PeriodicOrbit {
        q,
        caustic: None,
        u: Vec::new(),
        theta: vec![FRAC_PI_2; q as usize],
        amplitudes,
        points,
        x,
        mu,
        reflection_residual: 0.0,
    }
}

/// Builds the period-`q` orbit tangent to an already solved caustic.
pub fn orbit_from_caustic(ellipse: &Ellipse, q: u32, caustic: Caustic) -> Result<PeriodicOrbit> {
    if q < 3 {
        return Ok(degenerate_orbit(ellipse, q));
    }
    let m = Modulus::new(caustic.m_lambda)?;
    let quarter = complete_k(m);
    let qf = f64::from(q);
    let u: Vec<f64> = (0..q)
        .map(|n| 4.0 * quarter * (f64::from(n) / qf + 0.25))
        .collect();
    let amplitudes: Vec<f64> = u
        .iter()
        .enumerate()
        .map(|(n, &un)| if n == 0 { P_AMPLITUDE } else { jacobi(un, m).am })
        .collect();
    let points: Vec<[f64; 2]> = amplitudes.iter().map(|&p| ellipse.position(p)).collect();
    let x = amplitudes
        .iter()
        .enumerate()
        .map(|(n, &p)| if n == 0 { 0.0 } else { ellipse.lazutkin_x(p) })
        .collect();
    let mu = amplitudes
        .iter()
        .map(|&p| ellipse.lazutkin_weight(p))
        .collect();
    let (theta, reflection_residual) = angles_and_residual(ellipse, &points)?;
    Ok(PeriodicOrbit {
        q,
        caustic: Some(caustic),
        u,
        amplitudes,
        points,
        x,
        theta,
        mu,
        reflection_residual,
    })
}

/// Angle in `(0, π)` between each incoming edge `Xₙ₋₁Xₙ` and the
/// counterclockwise tangent at `Xₙ` (indices mod the number of points).
pub fn reflection_angles(ellipse: &Ellipse, points: &[[f64; 2]]) -> Result<Vec<f64>> {
    angles_and_residual(ellipse, points).map(|(theta, _)| theta)
}

/// Largest `|∠(t, in) + ∠(t, out)|` over the polygon: zero for a true
/// billiard trajectory.
pub fn reflection_residual(ellipse: &Ellipse, points: &[[f64; 2]]) -> Result<f64> {
    angles_and_residual(ellipse, points).map(|(_, r)| r)
}

fn angles_and_residual(ellipse: &Ellipse, points: &[[f64; 2]]) -> Result<(Vec<f64>, f64)> {
    let n = points.len();
    if n < 2 {
        return Err(Error::DegenerateOrbit(format!(
            "need at least two collision points, got {n}"
        )));
    }
    for (i, &p) in points.iter().enumerate() {
        let r = ellipse.implicit_residual(p);
        if r.abs() > ON_BOUNDARY_TOLERANCE {
            return Err(Error::DegenerateOrbit(format!(
                "point {i} ({}, {}) is off the boundary (residual {r:e})",
                p[0], p[1]
            )));
        }
    }
    let mut theta = Vec::with_capacity(n);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let prev = points[(i + n - 1) % n];
        let here = points[i];
        let next = points[(i + 1) % n];
        let d_in = sub(here, prev);
        let d_out = sub(next, here);
        if norm(d_in) == 0.0 || norm(d_out) == 0.0 {
            return Err(Error::DegenerateOrbit(format!(
                "zero-length edge at point {i}"
            )));
        }
        let t = ellipse.tangent(ellipse.amplitude_of(here));
        let signed_in = cross(t, d_in).atan2(dot(t, d_in));
        let signed_out = cross(t, d_out).atan2(dot(t, d_out));
        worst = worst.max((signed_in + signed_out).abs());
        theta.push(signed_in.abs());
    }
    Ok((theta, worst))
}

/// One step of the billiard map: from a boundary point moving along `dir`,
/// the next collision point and the reflected direction.
pub fn billiard_step(ellipse: &Ellipse, point: [f64; 2], dir: [f64; 2]) -> ([f64; 2], [f64; 2]) {
    let (ia, ib) = (1.0 / (ellipse.a * ellipse.a), 1.0 / (ellipse.b * ellipse.b));
    let qa = dir[0] * dir[0] * ia + dir[1] * dir[1] * ib;
    let qb = 2.0 * (point[0] * dir[0] * ia + point[1] * dir[1] * ib);
    let qc = ellipse.implicit_residual(point);
    let disc = (qb * qb - 4.0 * qa * qc).max(0.0);
    let t = (-qb + disc.sqrt()) / (2.0 * qa);
    let hit = [point[0] + t * dir[0], point[1] + t * dir[1]];
    let tan = ellipse.tangent(ellipse.amplitude_of(hit));
    let tn = norm(tan);
    let that = [tan[0] / tn, tan[1] / tn];
    let along = dot(dir, that);
    let reflected = [2.0 * along * that[0] - dir[0], 2.0 * along * that[1] - dir[1]];
    (hit, reflected)
}

/// Distance between the first collision point and where the billiard map
/// lands after `q` reflections, starting along the first edge.
pub fn closure_residual(ellipse: &Ellipse, orbit: &PeriodicOrbit) -> f64 {
    if orbit.points.len() < 2 {
        return 0.0;
    }
    let start = orbit.points[0];
    let first = sub(orbit.points[1], start);
    let len = norm(first);
    let mut dir = [first[0] / len, first[1] / len];
    let mut p = start;
    for _ in 0..orbit.q {
        let (hit, reflected) = billiard_step(ellipse, p, dir);
        p = hit;
        dir = reflected;
    }
    distance(p, start)
}

/// Lazily built orbits `q = 1..=maxq` of one ellipse, shareable across
/// threads.
///
/// Caustic parameters can be seeded from a cache; orbits built from a seeded
/// `λ` are bit-identical to orbits built from a freshly solved one.
#[derive(Debug)]
pub struct OrbitFamily {
    ellipse: Ellipse,
    maxq: u32,
    caustics: Vec<OnceLock<Caustic>>,
    orbits: Vec<OnceLock<PeriodicOrbit>>,
}

impl OrbitFamily {
    pub fn new(ellipse: Ellipse, maxq: u32) -> Self {
        let slots = maxq as usize + 1;
        OrbitFamily {
            ellipse,
            maxq,
            caustics: (0..slots).map(|_| OnceLock::new()).collect(),
            orbits: (0..slots).map(|_| OnceLock::new()).collect(),
        }
    }

    /// Seeds known caustic parameters, as `(q, λ_q)` pairs.
    pub fn with_lambdas(self, lambdas: impl IntoIterator<Item = (u32, f64)>) -> Result<Self> {
        for (q, lambda) in lambdas {
            if q < 3 || q > self.maxq {
                continue;
            }
            let caustic = rotation_number(&self.ellipse, lambda)?;
            let _ = self.caustics[q as usize].set(caustic);
        }
        Ok(self)
    }

    pub fn ellipse(&self) -> &Ellipse {
        &self.ellipse
    }

    pub fn maxq(&self) -> u32 {
        self.maxq
    }

    fn check(&self, q: u32) -> Result<()> {
        if q == 0 {
            return Err(Error::domain("q", 0.0, "q >= 1"));
        }
        if q > self.maxq {
            return Err(Error::PeriodCap { q, maxq: self.maxq });
        }
        Ok(())
    }

    pub fn caustic(&self, q: u32) -> Result<Caustic> {
        self.check(q)?;
        let slot = &self.caustics[q as usize];
        if let Some(c) = slot.get() {
            return Ok(*c);
        }
        let solved = solve_caustic(&self.ellipse, q)?;
        Ok(*slot.get_or_init(|| solved))
    }

    pub fn orbit(&self, q: u32) -> Result<&PeriodicOrbit> {
        self.check(q)?;
        let slot = &self.orbits[q as usize];
        if let Some(o) = slot.get() {
            return Ok(o);
        }
        let built = if q < 3 {
            degenerate_orbit(&self.ellipse, q)
        } else {
            orbit_from_caustic(&self.ellipse, q, self.caustic(q)?)?
        };
        Ok(slot.get_or_init(|| built))
    }

    /// All caustic parameters solved or seeded so far, ordered by `q`.
    pub fn known_lambdas(&self) -> Vec<(u32, f64)> {
        self.caustics
            .iter()
            .enumerate()
            .filter_map(|(q, slot)| slot.get().map(|c| (q as u32, c.lambda)))
            .collect()
    }
}

fn sub(p: [f64; 2], r: [f64; 2]) -> [f64; 2] {
    [p[0] - r[0], p[1] - r[1]]
}

fn dot(p: [f64; 2], r: [f64; 2]) -> f64 {
    p[0] * r[0] + p[1] * r[1]
}

fn cross(p: [f64; 2], r: [f64; 2]) -> f64 {
    p[0] * r[1] - p[1] * r[0]
}

fn norm(p: [f64; 2]) -> f64 {
    p[0].hypot(p[1])
}

fn distance(p: [f64; 2], r: [f64; 2]) -> f64 {
    norm(sub(p, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_zero_rejected() {
        let el = Ellipse::new(0.3).unwrap();
        assert!(build_orbit(&el, 0).is_err());
        assert!(solve_caustic(&el, 2).is_err());
    }

    #[test]
    fn lambda_domain() {
        let el = Ellipse::new(0.3).unwrap();
        assert!(rotation_number(&el, 0.0).is_err());
        assert!(rotation_number(&el, el.b).is_err());
        assert!(rotation_number(&el, -1e-3).is_err());
    }

    #[test]
    fn bouncing_ball() {
        for e in [0.0, 0.4, 0.95] {
            let el = Ellipse::new(e).unwrap();
            let o = build_orbit(&el, 2).unwrap();
            assert_eq!(o.x, vec![0.0, 0.5]);
            assert_eq!(o.theta, vec![FRAC_PI_2, FRAC_PI_2]);
            let angles = reflection_angles(&el, &o.points).unwrap();
            for a in angles {
                assert!((a - FRAC_PI_2).abs() < 1e-12);
            }
            assert!((o.length() - 4.0 * el.a).abs() < 1e-15);
        }
    }

    #[test]
    fn single_point_orbit() {
        let el = Ellipse::new(0.5).unwrap();
        let o = build_orbit(&el, 1).unwrap();
        assert_eq!(o.points, vec![[el.a, 0.0]]);
        assert_eq!(o.x, vec![0.0]);
        assert_eq!(o.theta, vec![FRAC_PI_2]);
        assert!(o.lambda().is_none());
    }

    #[test]
    fn zero_length_edge_is_degenerate() {
        let el = Ellipse::new(0.2).unwrap();
        let p = el.position(0.4);
        let err = reflection_angles(&el, &[p, p, el.position(2.0)]).unwrap_err();
        assert!(matches!(err, Error::DegenerateOrbit(_)));
    }

    #[test]
    fn off_boundary_point_rejected() {
        let el = Ellipse::new(0.2).unwrap();
        let pts = [el.position(0.1), [0.0, 0.0], el.position(3.0)];
        assert!(reflection_angles(&el, &pts).is_err());
    }

    #[test]
    fn family_respects_cap() {
        let fam = OrbitFamily::new(Ellipse::new(0.3).unwrap(), 20);
        assert!(matches!(fam.orbit(21), Err(Error::PeriodCap { .. })));
        assert!(fam.orbit(0).is_err());
        assert_eq!(fam.orbit(5).unwrap().q, 5);
        assert_eq!(fam.known_lambdas().len(), 1);
    }

    #[test]
    fn seeded_family_is_bit_identical() {
        let el = Ellipse::new(0.45).unwrap();
        let cold = OrbitFamily::new(el, 40);
        for q in 3..=40 {
            cold.orbit(q).unwrap();
        }
        let warm = OrbitFamily::new(el, 40)
            .with_lambdas(cold.known_lambdas())
            .unwrap();
        for q in 3..=40 {
            assert_eq!(cold.orbit(q).unwrap(), warm.orbit(q).unwrap());
        }
    }
}
