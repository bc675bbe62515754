//! Closed-form analysis of the superimposed-XOR broadcast phase.
//!
//! Coordinates follow the convention `x = R12` (relay to node 2) and
//! `y = R10` (relay to node 0). Node 0 is the stronger receiver:
//! `γ10 >= γ12`.

use thiserror::Error;

use crate::channel::{cap, ChannelState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BcError {
    #[error("broadcast SNRs must be finite and positive, got γ10 = {0}, γ12 = {1}")]
    InvalidSnr(f64, f64),
    #[error("γ10 = {0} is below γ12 = {1}; relabel the sources first")]
    Unordered(f64, f64),
    #[error("power split θ = {0} is outside [0, 1]")]
    ThetaOutOfRange(f64),
    #[error("quadrature needs an even positive number of intervals, got {0}")]
    BadResolution(usize),
    #[error("gap quadrature came out negative ({0})")]
    NegativeGap(f64),
}

/// SNRs of the two broadcast links out of the relay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BcChannel {
    pub gamma10: f64,
    pub gamma12: f64,
}

impl BcChannel {
    pub fn new(gamma10: f64, gamma12: f64) -> Result<Self, BcError> {
        let valid = |g: f64| g.is_finite() && g > 0.0;
        if !(valid(gamma10) && valid(gamma12)) {
            return Err(BcError::InvalidSnr(gamma10, gamma12));
        }
        Ok(Self { gamma10, gamma12 })
    }

    /// Broadcast links of `ch`, relabeled so the stronger receiver is node 0.
    pub fn oriented(ch: &ChannelState) -> Result<Self, BcError> {
        let (a, b) = (ch.g10(), ch.g12());
        Self::new(a.max(b), a.min(b))
    }

    fn checked(&self) -> Result<(), BcError> {
        Self::new(self.gamma10, self.gamma12)?;
        if self.gamma10 < self.gamma12 {
            return Err(BcError::Unordered(self.gamma10, self.gamma12));
        }
        Ok(())
    }

    pub fn c10(&self) -> f64 {
        cap(self.gamma10)
    }

    pub fn c12(&self) -> f64 {
        cap(self.gamma12)
    }

    /// `C12(θ)`: rate of the common (XOR) stream at node 2.
    pub fn c12_at(&self, theta: f64) -> f64 {
        cap(self.gamma12 * theta)
    }

    /// `C10(1 - θ)`: rate of the private stream at node 0.
    pub fn c10_residual(&self, theta: f64) -> f64 {
        cap(self.gamma10 * (1.0 - theta))
    }

    /// Arc point `(C12(θ), C12(θ) + C10(1 - θ))`.
    pub fn arc_point(&self, theta: f64) -> [f64; 2] {
        let x = self.c12_at(theta);
        [x, x + self.c10_residual(theta)]
    }
}

/// Power split at which the common and private streams exactly fill the
/// stronger receiver: `θ' = [1 + 1/γ10 - 1/γ12]+`.
pub fn theta_prime(bc: &BcChannel) -> Result<f64, BcError> {
    bc.checked()?;
    Ok((1.0 + 1.0 / bc.gamma10 - 1.0 / bc.gamma12).max(0.0))
}

/// Named vertex of a fixed-θ broadcast region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vertex {
    A,
    B,
    C,
    D,
}

/// Which side of θ' the power split falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaRegime {
    /// `θ <= θ'`: the rate cap `R10 <= C10` is active (four vertices).
    BelowThreshold,
    /// `θ >= θ'`: the sum of both streams stays under `C10` (three vertices).
    AboveThreshold,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedThetaRegion {
    pub theta: f64,
    pub regime: ThetaRegime,
    pub vertices: Vec<(Vertex, [f64; 2])>,
}

impl FixedThetaRegion {
    /// Vertex coordinates with consecutive duplicates (within `tol`) removed.
    pub fn distinct_points(&self, tol: f64) -> Vec<[f64; 2]> {
        let mut out: Vec<[f64; 2]> = Vec::new();
        for &(_, p) in &self.vertices {
            if !out.iter().any(|q| (q[0] - p[0]).abs() <= tol && (q[1] - p[1]).abs() <= tol) {
                out.push(p);
            }
        }
        out
    }
}

/// Vertex set of the broadcast region for a fixed power split.
pub fn bc_region_fixed_theta(bc: &BcChannel, theta: f64) -> Result<FixedThetaRegion, BcError> {
    let tp = theta_prime(bc)?;
    if !(0.0..=1.0).contains(&theta) {
        return Err(BcError::ThetaOutOfRange(theta));
    }
    Ok(region_for_regime(bc, theta, if theta <= tp { ThetaRegime::BelowThreshold } else { ThetaRegime::AboveThreshold }))
}

/// Evaluates the vertex formulas of one regime regardless of where θ lies.
pub fn region_for_regime(bc: &BcChannel, theta: f64, regime: ThetaRegime) -> FixedThetaRegion {
    let c10 = bc.c10();
    let c12 = bc.c12();
    let private = bc.c10_residual(theta);
    let common = bc.c12_at(theta);
    let a = [0.0, private];
    let d = [c12, c12];
    let vertices = match regime {
        ThetaRegime::BelowThreshold => vec![
            (Vertex::A, a),
            (Vertex::B, [c10 - private, c10]),
            (Vertex::C, [common, c10]),
            (Vertex::D, d),
        ],
        ThetaRegime::AboveThreshold => vec![(Vertex::A, a), (Vertex::B, [common, common + private]), (Vertex::D, d)],
    };
    FixedThetaRegion { theta, regime, vertices }
}

/// Frontier of the union of fixed-θ regions.
#[derive(Debug, Clone, PartialEq)]
pub struct BcBoundary {
    pub theta_prime: f64,
    /// `(C12(θ'), C10)`.
    pub b: [f64; 2],
    /// `(C12, C12)`.
    pub c: [f64; 2],
    /// Corner `(C12, C10)` of the capacity rectangle.
    pub e: [f64; 2],
    /// Arc samples `(θ, [x, y])` for θ from θ' to 1.
    pub arc: Vec<(f64, [f64; 2])>,
}

pub fn bc_boundary(bc: &BcChannel, n_theta: usize) -> Result<BcBoundary, BcError> {
    let tp = theta_prime(bc)?;
    let (c10, c12) = (bc.c10(), bc.c12());
    let arc = match n_theta {
        0 => Vec::new(),
        1 => vec![(tp, bc.arc_point(tp))],
        n => (0..n)
            .map(|i| {
                let t = if i == n - 1 { 1.0 } else { tp + (1.0 - tp) * i as f64 / (n - 1) as f64 };
                (t, bc.arc_point(t))
            })
            .collect(),
    };
    Ok(BcBoundary { theta_prime: tp, b: [bc.c12_at(tp), c10], c: [c12, c12], e: [c12, c10], arc })
}

/// Default Simpson resolution for [`gap_area`].
pub const DEFAULT_GAP_INTERVALS: usize = 1024;

/// Integrand of the gap area as a function of θ.
pub fn gap_integrand(bc: &BcChannel, theta: f64) -> f64 {
    let g12 = bc.gamma12;
    let g10 = bc.gamma10;
    let slope = g12 / ((1.0 + theta * g12) * std::f64::consts::LN_2);
    let ratio = (1.0 + g10) / ((1.0 + theta * g12) * (1.0 + (1.0 - theta) * g10));
    slope * ratio.log2()
}

/// Area between the superimposed-XOR arc and the capacity corner.
///
/// Composite Simpson quadrature over `u` in `[0, 1]` with
/// `θ = θ' + (1 - θ') (3u² - 2u³)`. The substitution clusters nodes at both
/// ends, where the integrand varies on a scale of `1/γ10` near `θ = 1` and
/// `1/γ12` near `θ = 0`.
pub fn gap_area(bc: &BcChannel, intervals: usize) -> Result<f64, BcError> {
    if intervals == 0 || !intervals.is_multiple_of(2) {
        return Err(BcError::BadResolution(intervals));
    }
    let tp = theta_prime(bc)?;
    if tp >= 1.0 {
        return Ok(0.0);
    }
    let width = 1.0 - tp;
    let f = |i: usize| {
        let u = i as f64 / intervals as f64;
        let theta = if i == intervals { 1.0 } else { tp + width * u * u * (3.0 - 2.0 * u) };
        gap_integrand(bc, theta) * width * 6.0 * u * (1.0 - u)
    };
    let mut sum = f(0) + f(intervals);
    for i in 1..intervals {
        sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i);
    }
    let area = sum / (3.0 * intervals as f64);
    if area < -1e-12 {
        return Err(BcError::NegativeGap(area));
    }
    Ok(area.max(0.0))
}

/// Area of the triangle B-C-E, which bounds the gap from above.
pub fn gap_upper_bound(bc: &BcChannel) -> Result<f64, BcError> {
    bc.checked()?;
    let (g10, g12) = (bc.gamma10, bc.gamma12);
    let first = ((1.0 + g10) / (1.0 + g12)).log2();
    let second = (g10 * (1.0 + g12) / (g12 * (1.0 + g10))).log2();
    Ok((0.5 * first * second).max(0.0))
}
