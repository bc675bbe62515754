//! Rate-region geometry built on top of the scheme constraint systems.
//!
//! A region is represented by its support function `h(w) = max w·(R0, R2)`
//! sampled on a grid of first-quadrant directions. For schemes with a relay
//! power split the support is the maximum over a `θ` grid, refined by a
//! golden-section search around the best grid point; this is the support
//! function of the convex hull of the union over `θ`.

use rayon::prelude::*;
use thiserror::Error;

use crate::channel::ChannelState;
use crate::lp::{solve_lp, LinearProgram, LpError, LpStatus};
use crate::scheme::{scheme_constraints_with, BuildOptions, ConstraintSet, PowerSplit, Protocol, Scheme, SchemeError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionError {
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("LP for {scheme} returned {status:?}")]
    UnexpectedStatus { scheme: Scheme, status: LpStatus },
    #[error("direction ({0}, {1}) is not a non-zero first-quadrant vector")]
    InvalidDirection(f64, f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("regions were sampled on different direction grids")]
    GridMismatch,
    #[error("queue backlog must be finite and non-negative, got ({0}, {1})")]
    InvalidBacklog(f64, f64),
}

/// Default number of uniformly spaced `θ` values on `[0, 1]`.
pub const DEFAULT_THETA_GRID: usize = 256;
/// Default number of directions on `[0, π/2]`.
pub const DEFAULT_DIRECTIONS: usize = 181;

/// One support-function sample together with the rate pair achieving it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportPoint {
    pub direction: [f64; 2],
    pub value: f64,
    /// A feasible `(R0, R2)` with `direction · point == value`.
    pub point: [f64; 2],
    /// The power split of the achieving polytope, for θ-dependent schemes.
    pub theta: Option<f64>,
}

/// A rate allocation chosen by the queue-weighted rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Allocation {
    pub r0: f64,
    pub r2: f64,
    pub theta: Option<f64>,
}

/// Evaluates region queries with a fixed `θ` resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionSolver {
    /// Grid points on `[0, 1]`, at least 2. Ignored for θ-free schemes.
    pub n_theta: usize,
    /// Width at which the golden-section refinement stops; `0` disables it.
    pub theta_tol: f64,
    pub build: BuildOptions,
}

impl Default for RegionSolver {
    fn default() -> Self {
        Self { n_theta: DEFAULT_THETA_GRID, theta_tol: 1e-6, build: BuildOptions::default() }
    }
}

/// Result of a search over the power split.
struct Best<T> {
    theta: Option<f64>,
    value: f64,
    payload: T,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

impl RegionSolver {
    pub fn with_theta_grid(n_theta: usize) -> Self {
        Self { n_theta, ..Self::default() }
    }

    fn constraints(&self, scheme: Scheme, ch: &ChannelState, theta: Option<f64>) -> Result<ConstraintSet, RegionError> {
        let split = theta.map(PowerSplit::new).transpose()?;
        Ok(scheme_constraints_with(scheme, ch, split, &self.build)?)
    }

    fn theta_grid(&self) -> Result<Vec<f64>, RegionError> {
        if self.n_theta < 2 {
            return Err(RegionError::InvalidGrid(format!("θ grid needs at least 2 points, got {}", self.n_theta)));
        }
        let last = (self.n_theta - 1) as f64;
        Ok((0..self.n_theta).map(|i| i as f64 / last).collect())
    }

    /// Maximizes `eval` over the θ grid plus golden-section refinement. For
    /// θ-free schemes `eval` runs once with `None`. The search stops early
    /// once a value reaches `ceiling`.
    fn search<T, F>(&self, scheme: Scheme, ceiling: f64, mut eval: F) -> Result<Best<T>, RegionError>
    where
        F: FnMut(Option<f64>) -> Result<(f64, T), RegionError>,
    {
        if !scheme.uses_theta() {
            let (value, payload) = eval(None)?;
            return Ok(Best { theta: None, value, payload });
        }
        let grid = self.theta_grid()?;
        let mut best: Option<Best<T>> = None;
        let mut best_idx = 0;
        for (i, &t) in grid.iter().enumerate() {
            let (value, payload) = eval(Some(t))?;
            if best.as_ref().is_none_or(|b| value > b.value) {
                best = Some(Best { theta: Some(t), value, payload });
                best_idx = i;
            }
            if value >= ceiling {
                return Ok(best.expect("set above"));
            }
        }
        let mut best = best.expect("grid is non-empty");
        if self.theta_tol > 0.0 {
            let mut probe = |x: f64, best: &mut Best<T>| -> Result<f64, RegionError> {
                let (value, payload) = eval(Some(x))?;
                if value > best.value {
                    *best = Best { theta: Some(x), value, payload };
                }
                Ok(value)
            };
            let mut a = grid[best_idx.saturating_sub(1)];
            let mut b = grid[(best_idx + 1).min(grid.len() - 1)];
            let mut x1 = b - INV_PHI * (b - a);
            let mut x2 = a + INV_PHI * (b - a);
            let mut f1 = probe(x1, &mut best)?;
            let mut f2 = probe(x2, &mut best)?;
            while b - a > self.theta_tol {
                if f1 >= f2 {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - INV_PHI * (b - a);
                    f1 = probe(x1, &mut best)?;
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + INV_PHI * (b - a);
                    f2 = probe(x2, &mut best)?;
                }
            }
        }
        Ok(best)
    }

    /// Support function of the scheme's region in direction `w`.
    ///
    /// `w` may have any positive length; the support function is positively
    /// homogeneous.
    pub fn support(&self, scheme: Scheme, ch: &ChannelState, w: [f64; 2]) -> Result<SupportPoint, RegionError> {
        check_direction(w)?;
        let best = self.search(scheme, f64::INFINITY, |theta| {
            let set = self.constraints(scheme, ch, theta)?;
            let sol = solve(scheme, &set.program(w)?)?;
            Ok((sol.0, [sol.1[ConstraintSet::R0], sol.1[ConstraintSet::R2]]))
        })?;
        let found = SupportPoint { direction: w, value: best.value, point: best.payload, theta: best.theta };
        // The two-step region at a given θ is the four-step one with the
        // first two time shares at zero. Its optimum may sit at a θ the
        // four-step search brackets differently.
        if let Scheme::Plnc(coding, Protocol::FourStep) = scheme {
            if scheme.uses_theta() {
                let embedded = self.support(Scheme::Plnc(coding, Protocol::TwoStep), ch, w)?;
                if embedded.value > found.value {
                    return Ok(SupportPoint { direction: w, ..embedded });
                }
            }
        }
        Ok(found)
    }

    /// Samples the support function on `n_dirs` uniformly spaced angles in
    /// `[0, π/2]`.
    pub fn boundary(&self, scheme: Scheme, ch: &ChannelState, n_dirs: usize) -> Result<RateRegion, RegionError> {
        if n_dirs < 3 {
            return Err(RegionError::InvalidGrid(format!("need at least 3 directions, got {n_dirs}")));
        }
        let dirs = direction_grid(n_dirs);
        let samples = dirs
            .par_iter()
            .map(|&w| self.support(scheme, ch, w))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RateRegion::from_samples(scheme, *ch, scheme.uses_theta().then_some(self.n_theta), samples))
    }

    /// Maximum of `R0 + R2` over the region.
    pub fn max_sum_rate(&self, scheme: Scheme, ch: &ChannelState) -> Result<f64, RegionError> {
        Ok(self.support(scheme, ch, [1.0, 1.0])?.value)
    }

    /// Maximizes `q0 R0 + q2 R2` over the region with `R0 <= q0`, `R2 <= q2`.
    ///
    /// Ties go to the larger `R0 + R2`, then to the larger `min(R0, R2)`.
    pub fn queue_weighted_allocation(
        &self,
        scheme: Scheme,
        ch: &ChannelState,
        q0: f64,
        q2: f64,
    ) -> Result<Allocation, RegionError> {
        if !(q0.is_finite() && q2.is_finite() && q0 >= 0.0 && q2 >= 0.0) {
            return Err(RegionError::InvalidBacklog(q0, q2));
        }
        if q0 == 0.0 && q2 == 0.0 {
            return Ok(Allocation { r0: 0.0, r2: 0.0, theta: None });
        }
        let w = [q0, q2];
        // Serving both queues completely is the best any θ can do.
        let full = q0 * q0 + q2 * q2;
        let full_tol = 1e-12 * full.max(1.0);
        let best = self.search(scheme, full - full_tol, |theta| {
            let set = self.constraints(scheme, ch, theta)?.with_rate_caps(q0, q2);
            let (value, point) = solve(scheme, &set.program(w)?)?;
            Ok((value, (set, [point[ConstraintSet::R0], point[ConstraintSet::R2]])))
        })?;
        if best.value >= full - full_tol {
            return Ok(Allocation { r0: q0, r2: q2, theta: best.theta });
        }
        let (set, point) = &best.payload;
        let [r0, r2] = tie_break(set, w, best.value, *point)?;
        Ok(Allocation { r0: r0.clamp(0.0, q0), r2: r2.clamp(0.0, q2), theta: best.theta })
    }
}

/// Secondary objectives at a fixed polytope: first `R0 + R2`, then
/// `min(R0, R2)`, each subject to keeping the earlier optima. A stage whose
/// program comes back non-optimal keeps the previous stage's point.
fn tie_break(set: &ConstraintSet, w: [f64; 2], v1: f64, first: [f64; 2]) -> Result<[f64; 2], RegionError> {
    let n = set.num_vars();
    let tol = |v: f64| 1e-9 * v.abs().max(1.0);

    let mut second = set.clone();
    let mut row = vec![0.0; n];
    row[ConstraintSet::R0] = -w[0];
    row[ConstraintSet::R2] = -w[1];
    second.push_row(&row, -(v1 - tol(v1)));
    let sol = solve_lp(&second.program([1.0, 1.0])?)?;
    if !sol.is_optimal() {
        return Ok(first);
    }
    let v2 = sol.value;
    let fallback = [sol.point[ConstraintSet::R0], sol.point[ConstraintSet::R2]];

    // Auxiliary variable t <= min(R0, R2) in the last column.
    let (mut a, mut rhs) = second.widened(1);
    let width = n + 1;
    let mut push = |coeffs: &[(usize, f64)], b: f64| {
        let start = a.len();
        a.resize(start + width, 0.0);
        for &(j, c) in coeffs {
            a[start + j] = c;
        }
        rhs.push(b);
    };
    push(&[(ConstraintSet::R0, -1.0), (ConstraintSet::R2, -1.0)], -(v2 - tol(v2)));
    push(&[(n, 1.0), (ConstraintSet::R0, -1.0)], 0.0);
    push(&[(n, 1.0), (ConstraintSet::R2, -1.0)], 0.0);
    let mut objective = vec![0.0; width];
    objective[n] = 1.0;
    let sol = solve_lp(&LinearProgram::from_dense(objective, a, rhs)?)?;
    if !sol.is_optimal() {
        return Ok(fallback);
    }
    Ok([sol.point[ConstraintSet::R0], sol.point[ConstraintSet::R2]])
}

fn solve(scheme: Scheme, lp: &LinearProgram) -> Result<(f64, Vec<f64>), RegionError> {
    let sol = solve_lp(lp)?;
    match sol.status {
        LpStatus::Optimal => Ok((sol.value, sol.point)),
        status => Err(RegionError::UnexpectedStatus { scheme, status }),
    }
}

fn check_direction(w: [f64; 2]) -> Result<(), RegionError> {
    let ok = w.iter().all(|v| v.is_finite() && *v >= 0.0) && (w[0] > 0.0 || w[1] > 0.0);
    if ok {
        Ok(())
    } else {
        Err(RegionError::InvalidDirection(w[0], w[1]))
    }
}

/// Unit directions at `n` uniformly spaced angles from 0 to π/2 inclusive.
pub fn direction_grid(n: usize) -> Vec<[f64; 2]> {
    let step = std::f64::consts::FRAC_PI_2 / (n - 1) as f64;
    (0..n)
        .map(|i| match i {
            0 => [1.0, 0.0],
            i if i == n - 1 => [0.0, 1.0],
            i => {
                let (s, c) = (i as f64 * step).sin_cos();
                [c, s]
            }
        })
        .collect()
}

/// A convex rate region described by support-function samples.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRegion {
    pub scheme: Scheme,
    pub channel: ChannelState,
    /// θ grid size used, for θ-dependent schemes.
    pub n_theta: Option<usize>,
    /// Samples ordered by increasing angle.
    pub samples: Vec<SupportPoint>,
    vertices: Vec<[f64; 2]>,
}

impl RateRegion {
    fn from_samples(scheme: Scheme, channel: ChannelState, n_theta: Option<usize>, samples: Vec<SupportPoint>) -> Self {
        let vertices = frontier(&samples);
        Self { scheme, channel, n_theta, samples, vertices }
    }

    pub fn directions(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        self.samples.iter().map(|s| s.direction)
    }

    pub fn support_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.value)
    }

    /// Frontier polyline from the `R2` axis to the `R0` axis, sorted by
    /// increasing `R0` with non-increasing `R2`.
    pub fn boundary(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    fn check_grid(&self, other: &RateRegion) -> Result<(), RegionError> {
        let same = self.samples.len() == other.samples.len()
            && self.directions().zip(other.directions()).all(|(a, b)| (a[0] - b[0]).abs() <= 1e-12 && (a[1] - b[1]).abs() <= 1e-12);
        if same {
            Ok(())
        } else {
            Err(RegionError::GridMismatch)
        }
    }

    /// Largest support-function difference over the shared direction grid.
    pub fn support_distance(&self, other: &RateRegion) -> Result<f64, RegionError> {
        self.check_grid(other)?;
        Ok(self
            .support_values()
            .zip(other.support_values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Frontier of the down-closed hull through the achieving points.
fn frontier(samples: &[SupportPoint]) -> Vec<[f64; 2]> {
    let (Some(top), Some(right)) = (samples.last(), samples.first()) else {
        return Vec::new();
    };
    // Clamp rounding residue so the axis endpoints stay extreme.
    let mut pts: Vec<[f64; 2]> = samples
        .iter()
        .rev()
        .map(|s| [s.point[0].clamp(0.0, right.value), s.point[1].clamp(0.0, top.value)])
        .collect();
    pts.insert(0, [0.0, top.value]);
    pts.push([right.value, 0.0]);
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(b[1].total_cmp(&a[1])));
    let mut out: Vec<[f64; 2]> = Vec::with_capacity(pts.len());
    for mut p in pts {
        if let Some(last) = out.last_mut() {
            p[1] = p[1].min(last[1]);
            // Merged points keep the lower one, so the axis endpoint survives.
            if (p[0] - last[0]).abs() <= 1e-12 && (p[1] - last[1]).abs() <= 1e-12 {
                last[1] = p[1];
                continue;
            }
        }
        out.push(p);
    }
    out
}

/// Support function with the default θ resolution.
pub fn support(scheme: Scheme, ch: &ChannelState, w: [f64; 2]) -> Result<f64, RegionError> {
    Ok(RegionSolver::default().support(scheme, ch, w)?.value)
}

pub fn boundary(scheme: Scheme, ch: &ChannelState, n_dirs: usize, n_theta: usize) -> Result<RateRegion, RegionError> {
    RegionSolver::with_theta_grid(n_theta).boundary(scheme, ch, n_dirs)
}

pub fn max_sum_rate(scheme: Scheme, ch: &ChannelState) -> Result<f64, RegionError> {
    RegionSolver::default().max_sum_rate(scheme, ch)
}

/// Whether `inner ⊆ outer` up to `tol`, judged on the shared direction grid.
pub fn region_contains(outer: &RateRegion, inner: &RateRegion, tol: f64) -> Result<bool, RegionError> {
    outer.check_grid(inner)?;
    Ok(inner.support_values().zip(outer.support_values()).all(|(i, o)| i <= o + tol))
}

pub fn queue_weighted_allocation(scheme: Scheme, ch: &ChannelState, q0: f64, q2: f64) -> Result<(f64, f64), RegionError> {
    let a = RegionSolver::default().queue_weighted_allocation(scheme, ch, q0, q2)?;
    Ok((a.r0, a.r2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform() -> ChannelState {
        ChannelState::uniform(1.0).unwrap()
    }

    #[test]
    fn mabc_axis_support() {
        let v = support(Scheme::MabcCapacity, &uniform(), [1.0, 0.0]).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn xor_axis_support() {
        // R0 <= λ1 and R0 <= λ2 with λ1 + λ2 <= 1.
        let v = support(Scheme::TWO_STEP_XOR, &uniform(), [1.0, 0.0]).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn xor_sum_rate() {
        let cm = 3f64.log2();
        let v = max_sum_rate(Scheme::TWO_STEP_XOR, &uniform()).unwrap();
        assert!((v - 2.0 * cm / (cm + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_directions() {
        assert!(support(Scheme::TWO_STEP_XOR, &uniform(), [0.0, 0.0]).is_err());
        assert!(support(Scheme::TWO_STEP_XOR, &uniform(), [-1.0, 1.0]).is_err());
        assert!(boundary(Scheme::TWO_STEP_XOR, &uniform(), 2, 16).is_err());
        assert!(RegionSolver::with_theta_grid(1).support(Scheme::TWO_STEP_SUX, &uniform(), [1.0, 1.0]).is_err());
    }

    #[test]
    fn mabc_boundary_hits_axes() {
        let region = boundary(Scheme::MabcCapacity, &uniform(), 19, 2).unwrap();
        let b = region.boundary();
        assert_eq!(b.first().copied(), Some([0.0, 0.5]));
        let last = b.last().unwrap();
        assert!((last[0] - 0.5).abs() < 1e-12 && last[1] == 0.0);
        for pair in b.windows(2) {
            assert!(pair[0][0] <= pair[1][0] && pair[0][1] >= pair[1][1]);
        }
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let a = boundary(Scheme::MabcCapacity, &uniform(), 5, 2).unwrap();
        let b = boundary(Scheme::MabcCapacity, &uniform(), 7, 2).unwrap();
        assert_eq!(region_contains(&a, &b, 0.0), Err(RegionError::GridMismatch));
        assert!(region_contains(&a, &a, 0.0).unwrap());
    }

    #[test]
    fn allocation_caps() {
        let ch = uniform();
        let (r0, r2) = queue_weighted_allocation(Scheme::TWO_STEP_XOR, &ch, 0.0, 5.0).unwrap();
        assert_eq!(r0, 0.0);
        assert!(r2 > 0.0);
        let (r0, r2) = queue_weighted_allocation(Scheme::TWO_STEP_SUX, &ch, 0.01, 0.02).unwrap();
        assert_eq!((r0, r2), (0.01, 0.02));
        assert!(queue_weighted_allocation(Scheme::TWO_STEP_XOR, &ch, -1.0, 0.0).is_err());
    }

    #[test]
    fn weighted_allocation_favours_heavier_queue() {
        let (r0, r2) = queue_weighted_allocation(Scheme::TWO_STEP_XOR, &uniform(), 10.0, 1.0).unwrap();
        assert!(r0 > r2);
        assert!((r0 - 0.5).abs() < 1e-9);
    }
}
