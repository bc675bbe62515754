//! Link SNRs, Shannon capacities, the geometric path-loss layout and
//! Rayleigh block-fading draws.
//!
//! Node 0 and node 2 are the sources, node 1 is the relay. All SNRs are
//! linear (not dB) and already include transmit power, with noise power
//! normalized to one.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("SNR must be finite and non-negative, got {0}")]
    InvalidSnr(f64),
    #[error("invalid layout parameter {name} = {value}")]
    InvalidLayout { name: &'static str, value: f64 },
    #[error("relay at ({x}, {y}) coincides with a source node")]
    DegenerateGeometry { x: f64, y: f64 },
}

/// Shannon capacity `log2(1 + gamma)` in bits/s/Hz.
pub fn capacity(gamma: f64) -> Result<f64, ChannelError> {
    check_snr(gamma)?;
    Ok(cap(gamma))
}

/// Sum capacity of the two-user multiple-access channel into the relay.
pub fn mac_sum_capacity(gamma01: f64, gamma21: f64) -> Result<f64, ChannelError> {
    check_snr(gamma01)?;
    check_snr(gamma21)?;
    Ok(cap(gamma01 + gamma21))
}

#[inline]
pub(crate) fn cap(gamma: f64) -> f64 {
    gamma.ln_1p() / std::f64::consts::LN_2
}

fn check_snr(gamma: f64) -> Result<(), ChannelError> {
    if gamma.is_finite() && gamma >= 0.0 {
        Ok(())
    } else {
        Err(ChannelError::InvalidSnr(gamma))
    }
}

/// Node index in the three-node relay network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    Source0 = 0,
    Relay = 1,
    Source2 = 2,
}

/// The six directed link SNRs of the network.
///
/// No reciprocity is assumed: `gamma(i, j)` and `gamma(j, i)` are stored
/// separately.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelState {
    g: [[f64; 3]; 3],
}

impl ChannelState {
    /// Builds a channel from the directed SNRs
    /// `(g01, g10, g02, g20, g12, g21)`.
    pub fn new(
        g01: f64,
        g10: f64,
        g02: f64,
        g20: f64,
        g12: f64,
        g21: f64,
    ) -> Result<Self, ChannelError> {
        for v in [g01, g10, g02, g20, g12, g21] {
            check_snr(v)?;
        }
        Ok(Self {
            g: [[0.0, g01, g02], [g10, 0.0, g12], [g20, g21, 0.0]],
        })
    }

    /// Reciprocal channel: one SNR per unordered node pair.
    pub fn reciprocal(g01: f64, g02: f64, g12: f64) -> Result<Self, ChannelError> {
        Self::new(g01, g01, g02, g02, g12, g12)
    }

    /// Every link at the same SNR.
    pub fn uniform(gamma: f64) -> Result<Self, ChannelError> {
        Self::reciprocal(gamma, gamma, gamma)
    }

    /// SNR of the directed link `from -> to`.
    ///
    /// # Panics
    ///
    /// Panics if `from == to`.
    pub fn gamma(&self, from: Node, to: Node) -> f64 {
        assert_ne!(from, to, "self-links have no SNR");
        self.g[from as usize][to as usize]
    }

    /// Capacity of the directed link `from -> to`.
    pub fn capacity(&self, from: Node, to: Node) -> f64 {
        cap(self.gamma(from, to))
    }

    pub fn g01(&self) -> f64 {
        self.g[0][1]
    }
    pub fn g10(&self) -> f64 {
        self.g[1][0]
    }
    pub fn g02(&self) -> f64 {
        self.g[0][2]
    }
    pub fn g20(&self) -> f64 {
        self.g[2][0]
    }
    pub fn g12(&self) -> f64 {
        self.g[1][2]
    }
    pub fn g21(&self) -> f64 {
        self.g[2][1]
    }

    /// Relabels the sources (0 <-> 2). The relay keeps index 1.
    pub fn swapped(&self) -> Self {
        const SWAP: [usize; 3] = [2, 1, 0];
        let mut g = [[0.0; 3]; 3];
        for (i, row) in g.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.g[SWAP[i]][SWAP[j]];
            }
        }
        Self { g }
    }

    /// Capacities of every link plus the MAC sum capacity.
    pub fn capacities(&self) -> Capacities {
        Capacities {
            c01: cap(self.g01()),
            c10: cap(self.g10()),
            c02: cap(self.g02()),
            c20: cap(self.g20()),
            c12: cap(self.g12()),
            c21: cap(self.g21()),
            cm: cap(self.g01() + self.g21()),
        }
    }
}

/// Link capacities derived from a [`ChannelState`], in bits/s/Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Capacities {
    pub c01: f64,
    pub c10: f64,
    pub c02: f64,
    pub c20: f64,
    pub c12: f64,
    pub c21: f64,
    /// Sum capacity of the multiple-access phase.
    pub cm: f64,
}

/// Relay position and propagation parameters.
///
/// Sources sit at `(-0.5, 0)` and `(0.5, 0)`; the relay at `(x, y)`.
/// Channel gain on a link of length `d` is `c * d^-n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkLayout {
    pub x: f64,
    pub y: f64,
    /// Attenuation constant.
    pub c: f64,
    /// Path-loss exponent.
    pub n: f64,
    /// Per-node transmit power, linear, noise power normalized to one.
    pub power: f64,
}

impl NetworkLayout {
    pub const DEFAULT_ATTENUATION: f64 = 1.0;
    pub const DEFAULT_EXPONENT: f64 = 3.0;

    /// Layout with `c = 1` and `n = 3`.
    pub fn new(x: f64, y: f64, power: f64) -> Result<Self, ChannelError> {
        Self::with_path_loss(x, y, Self::DEFAULT_ATTENUATION, Self::DEFAULT_EXPONENT, power)
    }

    pub fn with_path_loss(x: f64, y: f64, c: f64, n: f64, power: f64) -> Result<Self, ChannelError> {
        let layout = Self { x, y, c, n, power };
        layout.validate()?;
        Ok(layout)
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        for (name, value) in [("x", self.x), ("y", self.y)] {
            if !value.is_finite() {
                return Err(ChannelError::InvalidLayout { name, value });
            }
        }
        for (name, value) in [("c", self.c), ("n", self.n), ("power", self.power)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ChannelError::InvalidLayout { name, value });
            }
        }
        if self.d01() == 0.0 || self.d12() == 0.0 {
            return Err(ChannelError::DegenerateGeometry { x: self.x, y: self.y });
        }
        Ok(())
    }

    /// Distance between source 0 and the relay.
    pub fn d01(&self) -> f64 {
        (self.x + 0.5).hypot(self.y)
    }

    /// Distance between the relay and source 2.
    pub fn d12(&self) -> f64 {
        (self.x - 0.5).hypot(self.y)
    }

    /// Distance between the two sources.
    pub fn d02(&self) -> f64 {
        1.0
    }

    /// Mean received SNRs `(γ01, γ02, γ12)` of the three node pairs.
    pub fn mean_snrs(&self) -> Result<[f64; 3], ChannelError> {
        self.validate()?;
        let gain = |d: f64| self.power * self.c * d.powf(-self.n);
        let snrs = [gain(self.d01()), gain(self.d02()), gain(self.d12())];
        for v in snrs {
            if !v.is_finite() {
                return Err(ChannelError::DegenerateGeometry { x: self.x, y: self.y });
            }
        }
        Ok(snrs)
    }

    /// Mirror image `x -> -x`, which swaps the roles of the two sources.
    pub fn mirrored(&self) -> Self {
        Self { x: -self.x, ..*self }
    }
}

/// Deterministic (non-fading) SNRs of a layout. The result is reciprocal.
pub fn snrs_from_layout(layout: &NetworkLayout) -> Result<ChannelState, ChannelError> {
    let [g01, g02, g12] = layout.mean_snrs()?;
    ChannelState::reciprocal(g01, g02, g12)
}

/// Squared Rayleigh fading magnitudes, one per unordered node pair.
///
/// Each entry is exponential with unit mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingDraw {
    pub h01: f64,
    pub h02: f64,
    pub h12: f64,
}

impl FadingDraw {
    /// Draws the three pair gains in the order `h01, h02, h12`.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut draw = || loop {
            let v: f64 = Exp1.sample(rng);
            if v > 0.0 {
                break v;
            }
        };
        let h01 = draw();
        let h02 = draw();
        let h12 = draw();
        Self { h01, h02, h12 }
    }

    /// The same draw seen with source labels swapped.
    pub fn mirrored(&self) -> Self {
        Self { h01: self.h12, h02: self.h02, h12: self.h01 }
    }

    /// Applies the draw to a layout's mean SNRs.
    pub fn apply(&self, layout: &NetworkLayout) -> Result<ChannelState, ChannelError> {
        let [g01, g02, g12] = layout.mean_snrs()?;
        ChannelState::reciprocal(g01 * self.h01, g02 * self.h02, g12 * self.h12)
    }
}

/// One reciprocal Rayleigh-faded channel realization of `layout`.
pub fn sample_fading<R: Rng + ?Sized>(
    layout: &NetworkLayout,
    rng: &mut R,
) -> Result<ChannelState, ChannelError> {
    layout.validate()?;
    FadingDraw::sample(rng).apply(layout)
}

/// Decibels to linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Linear power ratio to decibels.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
