//! Monte-Carlo experiments over Rayleigh block fading: averaged maximum
//! sum-rate along the source-source line, and queue-driven service delay.
//!
//! Random streams are ChaCha8 keyed by `seed_from_u64(seed)` and a stream
//! number, so results depend only on the configuration.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::channel::{ChannelError, FadingDraw, NetworkLayout};
use crate::region::{RegionError, RegionSolver};
use crate::scheme::Scheme;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("{scheme} failed on the draw with seed {seed}, stream {stream}: {source}")]
    Draw { scheme: Scheme, seed: u64, stream: u64, source: RegionError },
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Relay positions on the segment between the sources, `y` fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct MsrSweepConfig {
    pub x_grid: Vec<f64>,
    pub y: f64,
    pub c: f64,
    pub n: f64,
    /// Transmit power, linear scale.
    pub power: f64,
    pub trials: usize,
    pub base_seed: u64,
    pub schemes: Vec<Scheme>,
    pub n_theta: usize,
}

impl MsrSweepConfig {
    /// `x_grid` is 21 points from -0.45 to 0.45, `y = 0`, `c = 1`, `n = 3`.
    pub fn new(power: f64, trials: usize, base_seed: u64, schemes: Vec<Scheme>) -> Self {
        Self {
            x_grid: linspace(-0.45, 0.45, 21),
            y: 0.0,
            c: NetworkLayout::DEFAULT_ATTENUATION,
            n: NetworkLayout::DEFAULT_EXPONENT,
            power,
            trials,
            base_seed,
            schemes,
            n_theta: crate::region::DEFAULT_THETA_GRID,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.trials == 0 {
            return Err(SimError::Config("trials must be at least 1".into()));
        }
        if self.schemes.is_empty() {
            return Err(SimError::Config("scheme list is empty".into()));
        }
        if self.x_grid.is_empty() {
            return Err(SimError::Config("x grid is empty".into()));
        }
        if let Some(x) = self.x_grid.iter().find(|x| !(x.is_finite() && x.abs() < 0.5)) {
            return Err(SimError::Config(format!("x = {x} is not strictly inside (-0.5, 0.5)")));
        }
        for &x in &self.x_grid {
            self.layout(x)?;
        }
        Ok(())
    }

    fn layout(&self, x: f64) -> Result<NetworkLayout, SimError> {
        Ok(NetworkLayout::with_path_loss(x, self.y, self.c, self.n, self.power)?)
    }
}

/// `n` evenly spaced values from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| if i == n - 1 { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MsrPoint {
    pub x: f64,
    pub scheme: Scheme,
    pub mean: f64,
    pub stderr: f64,
}

/// Fading draw of one sweep trial as seen from a relay at `x`.
///
/// Trial `t` draws from stream `t` of `base_seed`. For `x < 0` the draw is
/// mirrored, so positions `x` and `-x` see the same gains on the links to
/// the nearer and the farther source.
pub fn sweep_draw(base_seed: u64, trial: usize, x: f64) -> FadingDraw {
    let draw = FadingDraw::sample(&mut rng(base_seed, trial as u64));
    if x < 0.0 {
        draw.mirrored()
    } else {
        draw
    }
}

/// Mean maximum sum-rate per `(x, scheme)`, in x-grid order then scheme
/// order. All schemes and positions share the per-trial fading draws.
pub fn avg_max_sum_rate_sweep(cfg: &MsrSweepConfig) -> Result<Vec<MsrPoint>, SimError> {
    cfg.validate()?;
    let solver = RegionSolver::with_theta_grid(cfg.n_theta);
    let tasks: Vec<(usize, usize)> =
        (0..cfg.x_grid.len()).flat_map(|i| (0..cfg.trials).map(move |t| (i, t))).collect();
    let rates = tasks
        .par_iter()
        .map(|&(i, trial)| {
            let x = cfg.x_grid[i];
            let ch = sweep_draw(cfg.base_seed, trial, x).apply(&cfg.layout(x)?)?;
            cfg.schemes
                .iter()
                .map(|&scheme| {
                    solver.max_sum_rate(scheme, &ch).map_err(|source| SimError::Draw {
                        scheme,
                        seed: cfg.base_seed,
                        stream: trial as u64,
                        source,
                    })
                })
                .collect::<Result<Vec<f64>, SimError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut out = Vec::with_capacity(cfg.x_grid.len() * cfg.schemes.len());
    for (i, &x) in cfg.x_grid.iter().enumerate() {
        let block = &rates[i * cfg.trials..(i + 1) * cfg.trials];
        for (k, &scheme) in cfg.schemes.iter().enumerate() {
            let values: Vec<f64> = block.iter().map(|r| r[k]).collect();
            let (mean, stderr) = mean_and_stderr(&values);
            out.push(MsrPoint { x, scheme, mean, stderr });
        }
    }
    Ok(out)
}

/// Fixed-point resolution of the queue simulation, in units per bit.
pub const UNITS_PER_BIT: u128 = 1 << 24;

/// Largest supported arrival mean, in packets per slot.
pub const MAX_RHO: f64 = 500.0;

/// Backlogs at a slot boundary, in units of `1 / UNITS_PER_BIT` bits.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueueState {
    pub units: [u128; 2],
}

impl QueueState {
    pub fn q0(&self) -> f64 {
        self.units[0] as f64 / UNITS_PER_BIT as f64
    }

    pub fn q2(&self) -> f64 {
        self.units[1] as f64 / UNITS_PER_BIT as f64
    }

    pub fn total_bits(&self) -> f64 {
        self.q0() + self.q2()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueueSimConfig {
    pub layout: NetworkLayout,
    /// Poisson arrival mean per source, packets per slot.
    pub rho: f64,
    pub packet_bits: u32,
    pub horizon: usize,
    pub scheme: Scheme,
    pub seed: u64,
    pub n_theta: usize,
    pub theta_tol: f64,
    /// Leading share of slots left out of the delay average.
    pub warmup_fraction: f64,
    pub record_trajectory: bool,
}

impl QueueSimConfig {
    /// `L = 10` bits, 10% warm-up, a 32-point θ grid refined to 1e-4.
    pub fn new(layout: NetworkLayout, scheme: Scheme, rho: f64, horizon: usize, seed: u64) -> Self {
        Self {
            layout,
            rho,
            packet_bits: 10,
            horizon,
            scheme,
            seed,
            n_theta: 32,
            theta_tol: 1e-4,
            warmup_fraction: 0.1,
            record_trajectory: false,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.layout.validate()?;
        if !(self.rho.is_finite() && (0.0..=MAX_RHO).contains(&self.rho)) {
            return Err(SimError::Config(format!("arrival mean ρ = {} must lie in [0, {MAX_RHO}]", self.rho)));
        }
        if self.packet_bits == 0 {
            return Err(SimError::Config("packet length must be positive".into()));
        }
        if self.horizon == 0 {
            return Err(SimError::Config("horizon must be at least one slot".into()));
        }
        if !(0.0..1.0).contains(&self.warmup_fraction) {
            return Err(SimError::Config(format!("warm-up fraction {} is outside [0, 1)", self.warmup_fraction)));
        }
        Ok(())
    }

    fn solver(&self) -> RegionSolver {
        RegionSolver { n_theta: self.n_theta, theta_tol: self.theta_tol, ..RegionSolver::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueueOutcome {
    /// Little's-law bit delay in slots; 0 when `ρ = 0`.
    pub delay: f64,
    /// Post-warm-up time averages, bits.
    pub mean_q0: f64,
    pub mean_q2: f64,
    /// Cumulative arrivals and service per source, fixed-point units.
    pub arrived: [u128; 2],
    pub served: [u128; 2],
    pub final_state: QueueState,
    /// State after each slot when recording is enabled.
    pub trajectory: Vec<QueueState>,
}

/// Poisson sampler by CDF inversion, so a larger mean never yields fewer
/// arrivals for the same uniform.
#[derive(Debug, Clone, Copy)]
struct PoissonInverse {
    p0: f64,
    mean: f64,
}

impl PoissonInverse {
    fn new(mean: f64) -> Self {
        Self { p0: (-mean).exp(), mean }
    }

    fn sample(&self, u: f64) -> u64 {
        if self.mean == 0.0 {
            return 0;
        }
        let mut k = 0u64;
        let mut p = self.p0;
        let mut cdf = p;
        // The tail beyond mean + 40 sd is below f64 resolution.
        let limit = (self.mean + 40.0 * self.mean.sqrt() + 40.0) as u64;
        while u > cdf && k < limit {
            k += 1;
            p *= self.mean / k as f64;
            cdf += p;
        }
        k
    }
}

/// Runs the queue recursion `Q(t) = Q(t-1) - R(t) + A(t) L`, where `R(t)`
/// is the queue-weighted allocation for `Q(t-1)` on slot `t`'s channel.
///
/// Fading uses stream 0 of `seed` and arrivals stream 1, so runs that
/// differ only in scheme or `ρ` share fading and coupled arrivals.
pub fn queue_delay_sim(cfg: &QueueSimConfig) -> Result<QueueOutcome, SimError> {
    cfg.validate()?;
    let solver = cfg.solver();
    let mut fading = rng(cfg.seed, 0);
    let mut arrivals = rng(cfg.seed, 1);
    let poisson = PoissonInverse::new(cfg.rho);
    let packet_units = cfg.packet_bits as u128 * UNITS_PER_BIT;
    let warmup = (cfg.warmup_fraction * cfg.horizon as f64).floor() as usize;

    let mut state = QueueState::default();
    let mut arrived = [0u128; 2];
    let mut served = [0u128; 2];
    let mut sums = [0.0f64; 2];
    let mut trajectory = Vec::with_capacity(if cfg.record_trajectory { cfg.horizon } else { 0 });

    for t in 0..cfg.horizon {
        let ch = FadingDraw::sample(&mut fading).apply(&cfg.layout)?;
        let u: [f64; 2] = [arrivals.random(), arrivals.random()];

        if state.units != [0, 0] {
            let alloc = solver.queue_weighted_allocation(cfg.scheme, &ch, state.q0(), state.q2()).map_err(|source| {
                SimError::Draw { scheme: cfg.scheme, seed: cfg.seed, stream: 0, source }
            })?;
            for (k, r) in [alloc.r0, alloc.r2].into_iter().enumerate() {
                let s = ((r.max(0.0) * UNITS_PER_BIT as f64).floor() as u128).min(state.units[k]);
                state.units[k] -= s;
                served[k] += s;
            }
        }
        for k in 0..2 {
            let a = poisson.sample(u[k]) as u128 * packet_units;
            state.units[k] += a;
            arrived[k] += a;
        }

        if t >= warmup {
            sums[0] += state.q0();
            sums[1] += state.q2();
        }
        if cfg.record_trajectory {
            trajectory.push(state);
        }
    }

    let counted = (cfg.horizon - warmup) as f64;
    let (mean_q0, mean_q2) = (sums[0] / counted, sums[1] / counted);
    let delay = if cfg.rho == 0.0 { 0.0 } else { (mean_q0 + mean_q2) / (2.0 * cfg.rho * cfg.packet_bits as f64) };
    Ok(QueueOutcome { delay, mean_q0, mean_q2, arrived, served, final_state: state, trajectory })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayPoint {
    pub rho: f64,
    pub scheme: Scheme,
    pub mean_delay: f64,
    pub stderr: f64,
}

/// Delay per `(ρ, scheme)` averaged over seeds `base_seed .. base_seed +
/// seeds`, in `rhos` order then `schemes` order. `base` supplies everything
/// except `rho`, `scheme` and `seed`.
pub fn delay_curve(
    base: &QueueSimConfig,
    rhos: &[f64],
    schemes: &[Scheme],
    base_seed: u64,
    seeds: usize,
) -> Result<Vec<DelayPoint>, SimError> {
    if seeds == 0 {
        return Err(SimError::Config("need at least one seed".into()));
    }
    let tasks: Vec<(f64, Scheme, u64)> = rhos
        .iter()
        .flat_map(|&rho| {
            schemes
                .iter()
                .flat_map(move |&scheme| (0..seeds as u64).map(move |s| (rho, scheme, base_seed.wrapping_add(s))))
        })
        .collect();
    let delays = tasks
        .par_iter()
        .map(|&(rho, scheme, seed)| {
            let cfg = QueueSimConfig { rho, scheme, seed, record_trajectory: false, ..base.clone() };
            queue_delay_sim(&cfg).map(|o| o.delay)
        })
        .collect::<Result<Vec<f64>, SimError>>()?;
    Ok(tasks
        .chunks(seeds)
        .zip(delays.chunks(seeds))
        .map(|(task, d)| {
            let (mean_delay, stderr) = mean_and_stderr(d);
            DelayPoint { rho: task[0].0, scheme: task[0].1, mean_delay, stderr }
        })
        .collect())
}
