//! The four subcommands, each turning resolved settings into a table.

use twrc::broadcast::{bc_boundary, gap_area, gap_upper_bound, theta_prime, BcChannel, DEFAULT_GAP_INTERVALS};
use twrc::channel::{db_to_linear, snrs_from_layout, NetworkLayout};
use twrc::region::{RegionSolver, DEFAULT_DIRECTIONS, DEFAULT_THETA_GRID};
use twrc::sim::{avg_max_sum_rate_sweep, delay_curve, linspace, MsrSweepConfig, QueueSimConfig};
use twrc::Scheme;

use crate::parse::Settings;
use crate::table::{Cell, Table};
use crate::CliError;

/// Relay position used by `bc-gap` when none is given.
pub const BC_GAP_LAYOUT: (f64, f64) = (-0.2, 0.3);
/// Arc samples per power in `bc-gap`.
pub const ARC_SAMPLES: usize = 33;
pub const DEFAULT_P_DB: f64 = 10.0;
pub const DEFAULT_MSR_TRIALS: usize = 200;
pub const DEFAULT_DELAY_SEEDS: usize = 20;
pub const DEFAULT_HORIZON: usize = 10_000;
pub const DEFAULT_PACKET_BITS: u32 = 10;
pub const DEFAULT_QUEUE_THETA_GRID: usize = 32;

/// Upper limits on sizes, so a typo cannot ask for hours of work.
const MAX_GRID: usize = 1_000_000;
const MAX_HORIZON: usize = 100_000_000;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| usage(format!("missing required option --{flag}")))
}

fn one(list: Vec<f64>, flag: &str) -> Result<f64, CliError> {
    match list.as_slice() {
        [v] => Ok(*v),
        _ => Err(usage(format!("--{flag} takes a single value here, got {}", list.len()))),
    }
}

fn bounded(v: usize, lo: usize, hi: usize, flag: &str) -> Result<usize, CliError> {
    if (lo..=hi).contains(&v) {
        Ok(v)
    } else {
        Err(usage(format!("--{flag} must lie in [{lo}, {hi}], got {v}")))
    }
}

fn layout(s: &Settings, x: f64, y: f64, p_db: f64) -> Result<NetworkLayout, CliError> {
    let c = s.c.unwrap_or(NetworkLayout::DEFAULT_ATTENUATION);
    let n = s.n_exp.unwrap_or(NetworkLayout::DEFAULT_EXPONENT);
    NetworkLayout::with_path_loss(x, y, c, n, db_to_linear(p_db)).map_err(|e| usage(e.to_string()))
}

fn p_db(s: &Settings) -> Result<f64, CliError> {
    s.p_db.clone().map_or(Ok(DEFAULT_P_DB), |p| one(p, "p-db"))
}

fn theta_grid(s: &Settings, default: usize) -> Result<usize, CliError> {
    bounded(s.theta_grid.unwrap_or(default), 2, MAX_GRID, "theta-grid")
}

/// Boundary polyline of each requested scheme, with the MABC bound appended
/// when it is not listed.
pub fn region(s: &Settings) -> Result<Table, CliError> {
    let x = one(required(s.x.clone(), "x")?, "x")?;
    let y = required(s.y, "y")?;
    let ch = snrs_from_layout(&layout(s, x, y, p_db(s)?)?)?;
    let mut schemes = s.schemes.clone().unwrap_or_else(|| Scheme::PLNC.to_vec());
    if !schemes.contains(&Scheme::MabcCapacity) {
        schemes.push(Scheme::MabcCapacity);
    }
    let dirs = bounded(s.dirs.unwrap_or(DEFAULT_DIRECTIONS), 2, MAX_GRID, "dirs")?;
    let solver = RegionSolver::with_theta_grid(theta_grid(s, DEFAULT_THETA_GRID)?);

    let mut table = Table::new(vec!["scheme", "R0", "R2"]);
    for scheme in schemes {
        let region = solver.boundary(scheme, &ch, dirs)?;
        for &[r0, r2] in region.boundary() {
            table.push(vec![scheme.name().into(), r0.into(), r2.into()]);
        }
    }
    Ok(table)
}

/// Mean maximum sum-rate against relay position.
pub fn msr_sweep(s: &Settings) -> Result<Table, CliError> {
    let trials = bounded(s.trials.unwrap_or(DEFAULT_MSR_TRIALS), 1, MAX_GRID, "trials")?;
    let schemes = s.schemes.clone().unwrap_or_else(|| [Scheme::PLNC.as_slice(), &[Scheme::MabcCapacity]].concat());
    let mut cfg = MsrSweepConfig::new(db_to_linear(p_db(s)?), trials, s.seed.unwrap_or(0), schemes);
    if let Some(x) = &s.x {
        cfg.x_grid = x.clone();
    }
    cfg.y = s.y.unwrap_or(cfg.y);
    cfg.c = s.c.unwrap_or(cfg.c);
    cfg.n = s.n_exp.unwrap_or(cfg.n);
    cfg.n_theta = theta_grid(s, cfg.n_theta)?;
    cfg.validate().map_err(|e| usage(e.to_string()))?;

    let mut table = Table::new(vec!["x", "scheme", "mean_msr", "stderr"]);
    for p in avg_max_sum_rate_sweep(&cfg)? {
        table.push(vec![p.x.into(), p.scheme.name().into(), p.mean.into(), p.stderr.into()]);
    }
    Ok(table)
}

/// Mean bit delay against packet arrival rate, averaged over `--trials`
/// seeds starting at `--seed`.
pub fn delay(s: &Settings) -> Result<Table, CliError> {
    let x = one(required(s.x.clone(), "x")?, "x")?;
    let y = required(s.y, "y")?;
    let rhos = s.rho.clone().unwrap_or_else(|| linspace(0.01, 0.15, 10));
    let schemes = s.schemes.clone().unwrap_or_else(|| vec![Scheme::TWO_STEP_XOR, Scheme::TWO_STEP_SUP, Scheme::TWO_STEP_SUX]);
    let seeds = bounded(s.trials.unwrap_or(DEFAULT_DELAY_SEEDS), 1, MAX_GRID, "trials")?;
    let horizon = bounded(s.horizon.unwrap_or(DEFAULT_HORIZON), 1, MAX_HORIZON, "horizon")?;
    let mut base = QueueSimConfig::new(layout(s, x, y, p_db(s)?)?, schemes[0], rhos[0], horizon, 0);
    base.packet_bits = s.packet_bits.unwrap_or(DEFAULT_PACKET_BITS);
    base.n_theta = theta_grid(s, DEFAULT_QUEUE_THETA_GRID)?;
    for &rho in &rhos {
        QueueSimConfig { rho, ..base.clone() }.validate().map_err(|e| usage(e.to_string()))?;
    }

    let mut table = Table::new(vec!["rho", "scheme", "delay", "stderr"]);
    for p in delay_curve(&base, &rhos, &schemes, s.seed.unwrap_or(0), seeds)? {
        table.push(vec![p.rho.into(), p.scheme.name().into(), p.mean_delay.into(), p.stderr.into()]);
    }
    Ok(table)
}

/// Broadcast gap summary per power, followed by arc samples. Summary rows
/// fill `theta_prime`, `gap` and `bound`; arc rows fill `theta`, `R12` and
/// `R10`.
pub fn bc_gap(s: &Settings) -> Result<Table, CliError> {
    let x = match s.x.clone() {
        Some(list) => one(list, "x")?,
        None => BC_GAP_LAYOUT.0,
    };
    let y = s.y.unwrap_or(BC_GAP_LAYOUT.1);
    let powers = s.p_db.clone().unwrap_or_else(|| vec![0.0, 5.0, 10.0, 20.0]);

    let mut table = Table::new(vec!["kind", "p_db", "theta_prime", "gap", "bound", "theta", "R12", "R10"]);
    let mut arcs = Vec::new();
    for p in powers {
        let ch = snrs_from_layout(&layout(s, x, y, p)?)?;
        let bc = BcChannel::oriented(&ch)?;
        let tp = theta_prime(&bc)?;
        let gap = gap_area(&bc, DEFAULT_GAP_INTERVALS)?;
        let bound = gap_upper_bound(&bc)?;
        table.push(vec![
            "summary".into(),
            p.into(),
            tp.into(),
            gap.into(),
            bound.into(),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
        ]);
        for (theta, [r12, r10]) in bc_boundary(&bc, ARC_SAMPLES)?.arc {
            arcs.push(vec![
                "arc".into(),
                p.into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                theta.into(),
                r12.into(),
                r10.into(),
            ]);
        }
    }
    for row in arcs {
        table.push(row);
    }
    Ok(table)
}
