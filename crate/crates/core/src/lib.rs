//! Achievable rate regions of physical-layer network coding over the
//! two-way relay channel.
//!
//! Sources are nodes 0 and 2 and the relay is node 1. Regions are described
//! by linear constraints over the rates `(R0, R2)` and the time-sharing
//! fractions, solved with a small dense simplex solver.

pub mod broadcast;
pub mod channel;
pub mod lp;
pub mod region;
pub mod scheme;
pub mod sim;

pub use broadcast::{bc_boundary, bc_region_fixed_theta, gap_area, gap_upper_bound, theta_prime, BcChannel};
pub use channel::{capacity, db_to_linear, linear_to_db, sample_fading, snrs_from_layout, ChannelState, NetworkLayout};
pub use lp::{solve_lp, LinearProgram, LpSolution, LpStatus};
pub use region::{boundary, max_sum_rate, queue_weighted_allocation, region_contains, support, RateRegion, RegionSolver};
pub use scheme::{scheme_constraints, ConstraintSet, PowerSplit, Scheme};
pub use sim::{avg_max_sum_rate_sweep, queue_delay_sim, MsrSweepConfig, QueueSimConfig};
