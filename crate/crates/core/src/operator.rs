//! The linearized isospectral operator of the ellipse and its distance to the
//! identity on the weighted sequence space `h_γ`.
//!
//! Row `q` of the operator is built from the period-`q` orbit:
//!
//! ```text
//! T[q][j] = Σₙ cos(2πj xₙ) sin θₙ / μ(xₙ)
//! ```
//!
//! The reduced operator subtracts `κ_j / q²`, where `κ_j = lim q² T[q][j]`.
//! Its distance to the identity is the supremum over rows of
//!
//! ```text
//! N_q = q^γ Σ_{j ≥ 1} j^{-γ} |T[q][j] - δ(q, j) - κ_j / q²|
//! ```
//!
//! and a value below one certifies that the reduced operator is invertible.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elliptic::riemann_zeta;
use crate::error::{Error, Result};
use crate::orbit::{OrbitFamily, PeriodicOrbit};

/// Default ratio between the harmonic cutoff and the period, `J = C·q`.
pub const DEFAULT_CUTOFF: usize = 100;
/// Default convergence threshold for consecutive `q² T[q][j]` iterates.
pub const DEFAULT_KAPPA_THRESHOLD: f64 = 1e-6;
/// Default largest period used when estimating `κ_j`.
pub const DEFAULT_MAXQ: u32 = 500;

/// One row `T[q][1..=J]` of the operator.
#[derive(Debug, Clone, PartialEq)]
pub struct TRow {
    pub q: u32,
    /// `values[j - 1] = T[q][j]`.
    pub values: Vec<f64>,
}

impl TRow {
    pub fn harmonics(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, j: usize) -> f64 {
        self.values[j - 1]
    }
}

/// `cos(2πjx)` with the product reduced mod 1 first.
fn harmonic(j: usize, x: f64) -> f64 {
    (2.0 * PI * (j as f64 * x).fract()).cos()
}

fn weights(orbit: &PeriodicOrbit) -> Vec<f64> {
    orbit
        .theta
        .iter()
        .zip(&orbit.mu)
        .map(|(t, mu)| t.sin() / mu)
        .collect()
}

/// A single entry `T[q][j]`.
pub fn t_entry(orbit: &PeriodicOrbit, j: usize) -> f64 {
    orbit
        .x
        .iter()
        .zip(weights(orbit))
        .map(|(&x, w)| harmonic(j, x) * w)
        .sum()
}

/// The row `T[q][1..=harmonics]` of a periodic orbit.
pub fn t_row(orbit: &PeriodicOrbit, harmonics: usize) -> TRow {
    let w = weights(orbit);
    let values = (1..=harmonics)
        .map(|j| {
            orbit
                .x
                .iter()
                .zip(&w)
                .map(|(&x, &wn)| harmonic(j, x) * wn)
                .sum()
        })
        .collect();
    TRow { q: orbit.q, values }
}

/// `c_q`: `1/π` for `q = 1`, otherwise `sin(π/q) / (π/q)`.
pub fn circle_coefficient(q: u32) -> f64 {
    if q == 1 {
        1.0 / PI
    } else {
        let t = PI / f64::from(q);
        t.sin() / t
    }
}

/// Entry of the operator for the circle: `c_q` when `q | j`, zero otherwise.
pub fn circle_t_entry(q: u32, j: usize) -> f64 {
    if j.is_multiple_of(q as usize) {
        circle_coefficient(q)
    } else {
        0.0
    }
}

/// Closed form of `N_q` for the circle: `1 + c_q (ζ(γ) - 2)`.
pub fn circle_norm_term(q: u32, gamma: f64) -> Result<f64> {
    if q == 0 {
        return Err(Error::domain("q", 0.0, "q >= 1"));
    }
    Ok(1.0 + circle_coefficient(q) * (riemann_zeta(gamma)? - 2.0))
}

/// How a `κ_j` entry was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KappaStatus {
    /// Odd harmonic, zero by the symmetries of the ellipse.
    Symmetry,
    /// Consecutive iterates agreed within the threshold.
    Converged,
    /// No agreement up to `maxq`; the last iterate is kept.
    NotConverged,
    /// `j >= maxq`: no unaliased period is available, the entry is zero.
    OutOfRange,
}

impl KappaStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            KappaStatus::Symmetry => "symmetry",
            KappaStatus::Converged => "converged",
            KappaStatus::NotConverged => "not-converged",
            KappaStatus::OutOfRange => "out-of-range",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            KappaStatus::Symmetry,
            KappaStatus::Converged,
            KappaStatus::NotConverged,
            KappaStatus::OutOfRange,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
    }

    pub fn is_converged(self) -> bool {
        matches!(self, KappaStatus::Symmetry | KappaStatus::Converged)
    }
}

/// One estimated coefficient `κ_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaEntry {
    pub value: f64,
    /// Period whose iterate was kept (0 when none was computed).
    pub q_used: u32,
    pub status: KappaStatus,
}

/// Estimates of `κ_1 ..= κ_J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaTable {
    pub entries: Vec<KappaEntry>,
    pub threshold: f64,
    pub maxq: u32,
}

impl KappaTable {
    pub fn harmonics(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, j: usize) -> f64 {
        self.entries[j - 1].value
    }

    /// Largest period used by any entry.
    pub fn q_used(&self) -> u32 {
        self.entries.iter().map(|k| k.q_used).max().unwrap_or(0)
    }

    pub fn unconverged(&self) -> usize {
        self.entries
            .iter()
            .filter(|k| !k.status.is_converged())
            .count()
    }
}

/// Estimates `κ_j = lim q² T[q][j]` for `j = 1..=harmonics`.
///
/// Odd harmonics are zero by symmetry. For even `j` the iterates
/// `q² T[q][j]` are followed from the first unaliased period `q = j + 1`
/// (at least 3) and the first one within `threshold` of its successor is
/// kept. Entries that never settle before `maxq` keep their last iterate and
/// are flagged; harmonics with no period in `(j, maxq]` are set to zero and
/// flagged as out of range.
pub fn kappa_table(family: &OrbitFamily, harmonics: usize, threshold: f64) -> Result<KappaTable> {
    if !(threshold > 0.0) {
        return Err(Error::domain("kappa threshold", threshold, "threshold > 0"));
    }
    let maxq = family.maxq();
    let entries = (1..=harmonics)
        .into_par_iter()
        .map(|j| kappa_entry(family, j, threshold))
        .collect::<Result<Vec<_>>>()?;
    Ok(KappaTable {
        entries,
        threshold,
        maxq,
    })
}

fn kappa_entry(family: &OrbitFamily, j: usize, threshold: f64) -> Result<KappaEntry> {
    if j % 2 == 1 {
        return Ok(KappaEntry {
            value: 0.0,
            q_used: 0,
            status: KappaStatus::Symmetry,
        });
    }
    let maxq = family.maxq();
    let start = (j as u64 + 1).max(3);
    if start > u64::from(maxq) {
        return Ok(KappaEntry {
            value: 0.0,
            q_used: 0,
            status: KappaStatus::OutOfRange,
        });
    }
    let start = start as u32;
    let scaled = |q: u32| -> Result<f64> {
        let qf = f64::from(q);
        Ok(qf * qf * t_entry(family.orbit(q)?, j))
    };
    let mut prev = scaled(start)?;
    for q in start + 1..=maxq {
        let cur = scaled(q)?;
        if (cur - prev).abs() < threshold {
            return Ok(KappaEntry {
                value: prev,
                q_used: q - 1,
                status: KappaStatus::Converged,
            });
        }
        prev = cur;
    }
    Ok(KappaEntry {
        value: prev,
        q_used: maxq,
        status: KappaStatus::NotConverged,
    })
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 3.0 && gamma < 4.0 {
        Ok(())
    } else {
        Err(Error::domain("gamma", gamma, "3 < gamma < 4"))
    }
}

/// `N_q` truncated at `J = cutoff·q`.
///
/// Dropping the tail beyond `J` changes the value by `O(cutoff^{1-γ})`.
pub fn norm_term(
    family: &OrbitFamily,
    q: u32,
    gamma: f64,
    kappa: &KappaTable,
    cutoff: usize,
) -> Result<f64> {
    check_gamma(gamma)?;
    if cutoff == 0 {
        return Err(Error::Config("harmonic cutoff must be positive".into()));
    }
    let harmonics = cutoff * q as usize;
    if kappa.harmonics() < harmonics {
        return Err(Error::KappaTooShort {
            required: harmonics,
            available: kappa.harmonics(),
        });
    }
    let row = t_row(family.orbit(q)?, harmonics);
    Ok(reduced_row_norm(&row, gamma, kappa))
}

fn reduced_row_norm(row: &TRow, gamma: f64, kappa: &KappaTable) -> f64 {
    let qf = f64::from(row.q);
    let q2 = qf * qf;
    row.values
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let j = i + 1;
            let delta = if j == row.q as usize { 1.0 } else { 0.0 };
            (qf / j as f64).powf(gamma) * (t - delta - kappa.get(j) / q2).abs()
        })
        .sum()
}

/// Why a scan stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    CircleAgreement,
    BelowHalf,
    QCap,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::CircleAgreement => "circle-agreement",
            StopReason::BelowHalf => "below-half",
            StopReason::QCap => "q-cap",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            StopReason::CircleAgreement,
            StopReason::BelowHalf,
            StopReason::QCap,
        ]
        .into_iter()
        .find(|r| r.as_str() == s)
    }
}

/// Outcome of a scan: a maximum below one is evidence of injectivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    InjectiveEvidence,
    Inconclusive,
}

impl Verdict {
    pub fn from_max(max_norm: f64) -> Self {
        if max_norm < 1.0 {
            Verdict::InjectiveEvidence
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::InjectiveEvidence => "injective-evidence",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Verdict::InjectiveEvidence, Verdict::Inconclusive]
            .into_iter()
            .find(|v| v.as_str() == s)
    }
}

/// When to stop scanning rows.
///
/// Rules are tried in order: agreement with the circle within
/// `circle_accord` (relative), then a term below `below`, then `q == q_cap`.
/// The first two are only consulted from `min_q` on, since the rows `q = 1`
/// and `q = 2` come from the conventional orbits rather than from caustics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopPolicy {
    pub circle_accord: Option<f64>,
    pub below: Option<f64>,
    pub q_cap: u32,
    pub min_q: u32,
}

impl Default for StopPolicy {
    fn default() -> Self {
        StopPolicy {
            circle_accord: Some(0.10),
            below: Some(0.5),
            q_cap: 30,
            min_q: 3,
        }
    }
}

/// One row term of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RowTerm {
    pub q: u32,
    pub norm: f64,
    /// The same term for the circle, `1 + c_q (ζ(γ) - 2)`.
    pub circle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormScan {
    pub e: f64,
    pub gamma: f64,
    pub terms: Vec<RowTerm>,
    pub max_norm: f64,
    pub argmax_q: u32,
    pub stop_reason: StopReason,
    pub verdict: Verdict,
    /// Number of `κ` entries used by the scan that are flagged unconverged.
    pub kappa_unconverged: usize,
}

/// Harmonics a `κ` table must cover for a scan up to `q_cap`.
pub fn required_harmonics(cutoff: usize, q_cap: u32) -> usize {
    cutoff * q_cap as usize
}

/// Computes `N_1, N_2, …` until the stop policy fires.
pub fn rigidity_scan(
    family: &OrbitFamily,
    kappa: &KappaTable,
    gamma: f64,
    cutoff: usize,
    policy: &StopPolicy,
) -> Result<NormScan> {
    check_gamma(gamma)?;
    if policy.q_cap == 0 {
        return Err(Error::Config("q_cap must be at least 1".into()));
    }
    let mut terms: Vec<RowTerm> = Vec::new();
    let mut stop = StopReason::QCap;
    for q in 1..=policy.q_cap {
        let norm = norm_term(family, q, gamma, kappa, cutoff)?;
        let circle = circle_norm_term(q, gamma)?;
        terms.push(RowTerm { q, norm, circle });
        if q >= policy.min_q {
            if let Some(accord) = policy.circle_accord {
                if ((norm - circle) / circle).abs() < accord {
                    stop = StopReason::CircleAgreement;
                    break;
                }
            }
            if let Some(below) = policy.below {
                if norm < below {
                    stop = StopReason::BelowHalf;
                    break;
                }
            }
        }
    }
    let (argmax_q, max_norm) = terms
        .iter()
        .fold((0, f64::NEG_INFINITY), |(bq, bv), t| {
            if t.norm > bv {
                (t.q, t.norm)
            } else {
                (bq, bv)
            }
        });
    let used = (cutoff * terms.len()).min(kappa.harmonics());
    let kappa_unconverged = kappa.entries[..used]
        .iter()
        .filter(|k| !k.status.is_converged())
        .count();
    Ok(NormScan {
        e: family.ellipse().e,
        gamma,
        terms,
        max_norm,
        argmax_q,
        stop_reason: stop,
        verdict: Verdict::from_max(max_norm),
        kappa_unconverged,
    })
}
