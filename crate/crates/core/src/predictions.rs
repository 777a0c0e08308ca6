//! Closed-form quantities for the process: the metastability threshold, the
//! round count until a constant fraction is active, the per-vertex
//! infection-round predictor, the growth envelopes for the infected region,
//! and probable maximum weights in a region.
//!
//! Natural logarithms are used throughout; envelope masses are carried in
//! log space because they grow doubly exponentially in the round index.

use crate::error::{Error, Result};
use crate::geometry::{ball_radius_for_volume, torus_norm_unchecked, Ball, Point};

/// Scale constants shared by all predictions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelConstants {
    /// Expected number of vertices in the starting ball.
    pub nu: f64,
    /// Expected total vertex count.
    pub n: f64,
    pub beta: f64,
    /// Envelope slack, in (0, zeta).
    pub epsilon: f64,
    /// Weight-cap slack.
    pub eta: f64,
}

impl ModelConstants {
    pub fn new(nu: f64, n: f64, beta: f64, epsilon: f64, eta: f64) -> Result<Self> {
        if !(beta > 2.0 && beta < 3.0) {
            return Err(Error::invalid(format!(
                "beta must lie strictly in (2, 3), got {beta}"
            )));
        }
        if !(nu > 1.0) || !nu.is_finite() {
            return Err(Error::invalid(format!("nu must exceed 1, got {nu}")));
        }
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::invalid(format!("n must be positive, got {n}")));
        }
        let zeta = 1.0 / (beta - 2.0);
        if !(epsilon > 0.0 && epsilon < zeta) {
            return Err(Error::invalid(format!(
                "epsilon must lie in (0, zeta) = (0, {zeta}), got {epsilon}"
            )));
        }
        if !(eta > 0.0 && eta < beta - 1.0) {
            return Err(Error::invalid(format!(
                "eta must lie in (0, beta - 1), got {eta}"
            )));
        }
        Ok(ModelConstants {
            nu,
            n,
            beta,
            epsilon,
            eta,
        })
    }

    /// Per-round growth exponent `zeta = 1 / (beta - 2)`, always derived.
    pub fn zeta(&self) -> f64 {
        1.0 / (self.beta - 2.0)
    }
}

/// Metastability threshold `rho_c = nu^(-1/(beta-1))`.
pub fn critical_density(c: &ModelConstants) -> f64 {
    c.nu.powf(-1.0 / (c.beta - 1.0))
}

/// Rounds until a constant fraction of all vertices is active:
/// `(ln(ln n / ln nu) + ln ln n) / |ln(beta - 2)|`.
pub fn i_infinity(c: &ModelConstants) -> Result<f64> {
    let e = std::f64::consts::E;
    if c.n <= e || c.nu <= e {
        return Err(Error::invalid(
            "round prediction needs n > e and nu > e so all logarithms are positive",
        ));
    }
    if c.nu > c.n {
        return Err(Error::invalid("round prediction needs nu <= n"));
    }
    let ln_n = c.n.ln();
    let ln_nu = c.nu.ln();
    Ok(((ln_n / ln_nu).ln() + ln_n.ln()) / (c.beta - 2.0).ln().abs())
}

/// Why a vertex falls outside the predictor's domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EllDomain {
    /// Position inside the starting ball.
    InsideStartRegion,
    /// Light branch with scaled distance `r <= nu`: the outer logarithm is
    /// non-positive.
    BelowStartScale,
    /// Light branch with weight at most 1: `ln log_nu w` is undefined.
    DegenerateWeight,
    /// Weight not a positive real.
    InvalidWeight,
}

/// Predicted infection round or a domain flag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Ell {
    Value(f64),
    OutOfDomain(EllDomain),
}

impl Ell {
    pub fn value(self) -> Option<f64> {
        match self {
            Ell::Value(v) => Some(v),
            Ell::OutOfDomain(_) => None,
        }
    }
}

/// Predictor on the scaled distance `r = |x|^d * n`, see
/// [`predicted_infection_round`]. `d` is only used to decide whether the
/// position lies inside the starting ball.
pub fn ell_from_scaled_distance(r: f64, w: f64, d: usize, c: &ModelConstants) -> Ell {
    if !(w > 0.0) || !w.is_finite() {
        return Ell::OutOfDomain(EllDomain::InvalidWeight);
    }
    // x inside the starting ball of volume nu/n means r <= nu / 2^d
    if r <= c.nu / (d as f64).exp2() {
        return Ell::OutOfDomain(EllDomain::InsideStartRegion);
    }
    let ln_nu = c.nu.ln();
    let denom = (c.beta - 2.0).ln().abs();
    if w > r.powf(1.0 / (c.beta - 1.0)) {
        // Heavy branch: max(0, ln log_nu(r/w)) / |ln(beta-2)|. When r/w < 1
        // the inner term counts as -infinity and the max clips to 0.
        let ratio = r / w;
        if ratio < 1.0 {
            return Ell::Value(0.0);
        }
        let inner = (ratio.ln() / ln_nu).ln() / denom;
        Ell::Value(inner.max(0.0))
    } else {
        // Light branch: (2 ln log_nu r - ln log_nu w) / |ln(beta-2)|.
        if r <= c.nu {
            return Ell::OutOfDomain(EllDomain::BelowStartScale);
        }
        if w <= 1.0 {
            return Ell::OutOfDomain(EllDomain::DegenerateWeight);
        }
        let a = (r.ln() / ln_nu).ln();
        let b = (w.ln() / ln_nu).ln();
        Ell::Value((2.0 * a - b) / denom)
    }
}

/// Predicted infection round of a vertex at position `x` with weight `w`,
/// for a starting ball centred at the origin.
pub fn predicted_infection_round(x: &Point, w: f64, c: &ModelConstants) -> Ell {
    let d = x.dim();
    let r = torus_norm_unchecked(x.coords()).powi(d as i32) * c.n;
    ell_from_scaled_distance(r, w, d, c)
}

/// Technical domain condition of the infection-time law:
/// `ell <= log2(r / nu_upper(0))`.
pub fn within_prediction_domain(ell: f64, r: f64, c: &ModelConstants) -> bool {
    let log2_gap = (r.ln() - nu_upper(0, c).ln_raw) / std::f64::consts::LN_2;
    ell <= log2_gap
}

/// An envelope mass, kept in log space to survive the doubly exponential
/// growth. `raw` may overflow to infinity; `clipped` is `min(raw, n)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnvelopeMass {
    pub ln_raw: f64,
    pub raw: f64,
    pub clipped: f64,
}

fn envelope_from_ln(ln_raw: f64, c: &ModelConstants) -> EnvelopeMass {
    EnvelopeMass {
        ln_raw,
        raw: ln_raw.exp(),
        clipped: ln_raw.min(c.n.ln()).exp(),
    }
}

/// Lower envelope mass after `i` rounds: `nu^((zeta - epsilon)^i)`.
pub fn nu_lower(i: u32, c: &ModelConstants) -> EnvelopeMass {
    let growth = (c.zeta() - c.epsilon).powi(i as i32);
    envelope_from_ln(growth * c.nu.ln(), c)
}

/// Upper envelope mass after `i` rounds:
/// `(nu^((beta-1)/(beta-2) + epsilon))^((zeta + epsilon)^i)`.
pub fn nu_upper(i: u32, c: &ModelConstants) -> EnvelopeMass {
    let base = ((c.beta - 1.0) / (c.beta - 2.0) + c.epsilon) * c.nu.ln();
    let growth = (c.zeta() + c.epsilon).powi(i as i32);
    envelope_from_ln(growth * base, c)
}

/// Ball centred at the origin of volume `min(nu_lower(i)/n, 1)`.
pub fn envelope_ball_lower(i: u32, c: &ModelConstants, d: usize) -> Result<Ball> {
    ball_from_mass(nu_lower(i, c), c, d)
}

/// Ball centred at the origin of volume `min(nu_upper(i)/n, 1)`.
pub fn envelope_ball_upper(i: u32, c: &ModelConstants, d: usize) -> Result<Ball> {
    ball_from_mass(nu_upper(i, c), c, d)
}

fn ball_from_mass(mass: EnvelopeMass, c: &ModelConstants, d: usize) -> Result<Ball> {
    // volume = clipped / n, computed in log space
    let vol = (mass.ln_raw.min(c.n.ln()) - c.n.ln()).exp().min(1.0);
    let radius = ball_radius_for_volume(vol, d)?;
    Ball::new(Point::origin(d), radius)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CapSign {
    /// `w_hat_minus`: lower end of the probable maximum weight.
    Lower,
    /// `w_hat_plus`: upper end.
    Upper,
}

/// Probable range of the largest weight among about `mu` vertices:
/// `mu^(1/(beta-1+eta))` for the lower cap, `mu^(1/(beta-1-eta))` for the
/// upper.
pub fn weight_cap(mu: f64, beta: f64, eta: f64, sign: CapSign) -> Result<f64> {
    if !(mu > 1.0) || !mu.is_finite() {
        return Err(Error::invalid(format!("mass mu must exceed 1, got {mu}")));
    }
    if !(eta > 0.0 && eta < beta - 1.0) {
        return Err(Error::invalid("eta must lie in (0, beta - 1)"));
    }
    let exponent = match sign {
        CapSign::Lower => 1.0 / (beta - 1.0 + eta),
        CapSign::Upper => 1.0 / (beta - 1.0 - eta),
    };
    Ok(mu.powf(exponent))
}
