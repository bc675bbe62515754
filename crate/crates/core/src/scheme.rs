//! Linear constraint systems describing the achievable `(R0, R2)` rate
//! regions of each relaying scheme.
//!
//! Every system lives over the variable vector `[R0, R2, λ1, ..., λk]`
//! where the `λi` are the time-sharing fractions of the protocol steps.
//! For the superposition-based schemes the relay power split `θ` is fixed
//! at build time, so each system is an ordinary polytope; the scheme's
//! region is the union (convex hull) over `θ`.
//!
//! The schemes are derived under the convention `γ10 >= γ12`. When a
//! channel violates it, the builder relabels the sources, builds the
//! system, and swaps the `R0`/`R2` columns back.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::channel::{cap, Capacities, ChannelState};
use crate::lp::{self, LinearProgram, LpError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemeError {
    #[error("scheme {0} needs a power split θ")]
    MissingTheta(Scheme),
    #[error("scheme {0} takes no power split θ")]
    ThetaNotApplicable(Scheme),
    #[error("power split θ = {0} is outside [0, 1]")]
    ThetaOutOfRange(f64),
    #[error("direct transmission is dominated by relaying on this channel")]
    RelayingDominates,
    #[error("unknown scheme name {0:?}")]
    UnknownScheme(String),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Network-coding operation performed by the relay in the broadcast phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coding {
    /// Bitwise XOR with zero-padding or partitioning.
    Xor,
    /// Symbol-level superposition of the two flows.
    Sup,
    /// XOR of the common part superposed with the residual of the longer flow.
    Sux,
}

/// Time-control protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Protocol {
    /// Multiple access then broadcast; no direct link.
    TwoStep,
    /// Two one-way steps that also use the direct link, a multiple-access
    /// step and a broadcast step.
    FourStep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Plnc(Coding, Protocol),
    /// Capacity of the two-step protocol: intersection of the time-weighted
    /// multiple-access and broadcast capacity regions.
    MabcCapacity,
    /// Direct source-to-source transmission when the direct link beats the
    /// relay link.
    DirectCase,
}

impl Scheme {
    pub const TWO_STEP_XOR: Scheme = Scheme::Plnc(Coding::Xor, Protocol::TwoStep);
    pub const TWO_STEP_SUP: Scheme = Scheme::Plnc(Coding::Sup, Protocol::TwoStep);
    pub const TWO_STEP_SUX: Scheme = Scheme::Plnc(Coding::Sux, Protocol::TwoStep);
    pub const FOUR_STEP_XOR: Scheme = Scheme::Plnc(Coding::Xor, Protocol::FourStep);
    pub const FOUR_STEP_SUP: Scheme = Scheme::Plnc(Coding::Sup, Protocol::FourStep);
    pub const FOUR_STEP_SUX: Scheme = Scheme::Plnc(Coding::Sux, Protocol::FourStep);

    /// The six network-coding schemes.
    pub const PLNC: [Scheme; 6] = [
        Self::TWO_STEP_XOR,
        Self::TWO_STEP_SUP,
        Self::TWO_STEP_SUX,
        Self::FOUR_STEP_XOR,
        Self::FOUR_STEP_SUP,
        Self::FOUR_STEP_SUX,
    ];

    /// Whether the region depends on a relay power split θ.
    pub fn uses_theta(self) -> bool {
        matches!(self, Scheme::Plnc(Coding::Sup | Coding::Sux, _))
    }

    /// Number of time-sharing variables in the constraint system. Direct
    /// cases have 2 or 3 depending on the channel, reported here as 3.
    pub fn lambda_count(self) -> usize {
        match self {
            Scheme::Plnc(Coding::Xor, Protocol::FourStep) => 5,
            Scheme::Plnc(_, Protocol::FourStep) => 4,
            Scheme::Plnc(Coding::Xor, Protocol::TwoStep) => 3,
            Scheme::Plnc(_, Protocol::TwoStep) | Scheme::MabcCapacity => 2,
            Scheme::DirectCase => 3,
        }
    }

    /// The same coding on the other protocol; `None` for non-PLNC schemes.
    pub fn with_protocol(self, protocol: Protocol) -> Option<Scheme> {
        match self {
            Scheme::Plnc(coding, _) => Some(Scheme::Plnc(coding, protocol)),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::TWO_STEP_XOR => "2s-xor",
            Self::TWO_STEP_SUP => "2s-sup",
            Self::TWO_STEP_SUX => "2s-sux",
            Self::FOUR_STEP_XOR => "4s-xor",
            Self::FOUR_STEP_SUP => "4s-sup",
            Self::FOUR_STEP_SUX => "4s-sux",
            Scheme::MabcCapacity => "mabc",
            Scheme::DirectCase => "direct",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = SchemeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase();
        [Self::PLNC.as_slice(), &[Scheme::MabcCapacity, Scheme::DirectCase]]
            .concat()
            .into_iter()
            .find(|scheme| scheme.name() == key)
            .ok_or_else(|| SchemeError::UnknownScheme(s.to_string()))
    }
}

/// Fraction θ of relay power on the stream decoded by both destinations.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PowerSplit(f64);

impl PowerSplit {
    pub fn new(theta: f64) -> Result<Self, SchemeError> {
        if (0.0..=1.0).contains(&theta) {
            Ok(Self(theta))
        } else {
            Err(SchemeError::ThetaOutOfRange(theta))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `C(γ θ)`: capacity of a link when only the θ share of power is used.
    pub fn capacity(self, gamma: f64) -> f64 {
        cap(gamma * self.0)
    }

    /// `C(γ (1 - θ))`.
    pub fn residual_capacity(self, gamma: f64) -> f64 {
        cap(gamma * (1.0 - self.0))
    }
}

/// Construction switches for [`scheme_constraints_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildOptions {
    /// Adds `R0 - R2 <= λ1 C02 - λ2 C20` to the four-step superimposed-XOR
    /// system. The row comes from the partitioning branch of the
    /// achievability argument and is off by default.
    pub four_step_sux_partition_row: bool,
}

/// Which of the direct-transmission systems applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectKind {
    /// Node 2 reaches node 0 directly; node 0 still uses the relay.
    Node2Direct,
    /// Node 0 reaches node 2 directly; node 2 still uses the relay.
    Node0Direct,
    /// Both flows use the direct link; no relay.
    BothDirect,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DirectOutcome {
    Region(DirectKind, ConstraintSet),
    /// Both relay links beat the direct link.
    RelayingDominates,
}

/// A linear system `A v <= b` over `v = [R0, R2, λ1, ..., λk]`, all `v >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSet {
    n_lambda: usize,
    a: Vec<f64>,
    rhs: Vec<f64>,
    relabeled: bool,
}

impl ConstraintSet {
    pub const R0: usize = 0;
    pub const R2: usize = 1;

    fn new(n_lambda: usize) -> Self {
        Self { n_lambda, a: Vec::new(), rhs: Vec::new(), relabeled: false }
    }

    pub fn num_vars(&self) -> usize {
        2 + self.n_lambda
    }

    pub fn num_lambdas(&self) -> usize {
        self.n_lambda
    }

    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    /// Column of `λi`, with `i` counted from 1.
    pub fn lambda_index(&self, i: usize) -> usize {
        assert!((1..=self.n_lambda).contains(&i), "λ{i} out of range");
        1 + i
    }

    /// Whether the sources were relabeled to satisfy `γ10 >= γ12`.
    pub fn relabeled(&self) -> bool {
        self.relabeled
    }

    pub fn row(&self, i: usize) -> (&[f64], f64) {
        let n = self.num_vars();
        (&self.a[i * n..(i + 1) * n], self.rhs[i])
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        (0..self.num_rows()).map(|i| self.row(i))
    }

    /// Appends a rate inequality `r0·R0 + r2·R2 <= Σ coef·λi`.
    fn rate(&mut self, r0: f64, r2: f64, lambdas: &[(usize, f64)]) {
        let start = self.a.len();
        self.a.resize(start + self.num_vars(), 0.0);
        let row = &mut self.a[start..];
        row[Self::R0] = r0;
        row[Self::R2] = r2;
        for &(i, coef) in lambdas {
            row[1 + i] -= coef;
        }
        self.rhs.push(0.0);
    }

    /// Appends `Σ λi = 1` as two opposing rows.
    fn simplex(&mut self) {
        for sign in [1.0, -1.0] {
            let start = self.a.len();
            self.a.resize(start + self.num_vars(), 0.0);
            self.a[start + 2..].iter_mut().for_each(|v| *v = sign);
            self.rhs.push(sign);
        }
    }

    /// Appends an arbitrary row `coeffs · v <= rhs`.
    pub fn push_row(&mut self, coeffs: &[f64], rhs: f64) {
        assert_eq!(coeffs.len(), self.num_vars(), "row width mismatch");
        self.a.extend_from_slice(coeffs);
        self.rhs.push(rhs);
    }

    /// Caps `R0 <= q0` and `R2 <= q2`.
    pub fn with_rate_caps(mut self, q0: f64, q2: f64) -> Self {
        let n = self.num_vars();
        let mut row = vec![0.0; n];
        row[Self::R0] = 1.0;
        self.push_row(&row, q0);
        row[Self::R0] = 0.0;
        row[Self::R2] = 1.0;
        self.push_row(&row, q2);
        self
    }

    fn swap_rates(&mut self) {
        let n = self.num_vars();
        for row in self.a.chunks_exact_mut(n) {
            row.swap(Self::R0, Self::R2);
        }
        self.relabeled = !self.relabeled;
    }

    /// The LP maximizing `w0 R0 + w2 R2` over this system.
    pub fn program(&self, w: [f64; 2]) -> Result<LinearProgram, LpError> {
        let mut objective = vec![0.0; self.num_vars()];
        objective[Self::R0] = w[0];
        objective[Self::R2] = w[1];
        LinearProgram::from_dense(objective, self.a.clone(), self.rhs.clone())
    }

    /// The system with extra trailing variables (all-zero columns) for
    /// callers that add auxiliary variables.
    pub fn widened(&self, extra: usize) -> (Vec<f64>, Vec<f64>) {
        let n = self.num_vars();
        let mut a = Vec::with_capacity(self.num_rows() * (n + extra));
        for row in self.a.chunks_exact(n) {
            a.extend_from_slice(row);
            a.extend(std::iter::repeat_n(0.0, extra));
        }
        (a, self.rhs.clone())
    }

    /// Whether the rate pair is achievable for some time split, up to `tol`.
    pub fn admits(&self, r0: f64, r2: f64, tol: f64) -> Result<bool, LpError> {
        let mut fixed = self.clone();
        let n = fixed.num_vars();
        let mut row = vec![0.0; n];
        for (col, value) in [(Self::R0, r0), (Self::R2, r2)] {
            row.iter_mut().for_each(|v| *v = 0.0);
            row[col] = 1.0;
            fixed.push_row(&row, value + tol);
            row[col] = -1.0;
            fixed.push_row(&row, -(value - tol).max(0.0));
        }
        // Relax every rate row by `tol` as well.
        for b in fixed.rhs.iter_mut() {
            *b += tol;
        }
        lp::is_feasible(&LinearProgram::from_dense(vec![0.0; n], fixed.a, fixed.rhs)?)
    }
}

/// Constraint system of `scheme` on channel `ch`.
pub fn scheme_constraints(
    scheme: Scheme,
    ch: &ChannelState,
    theta: Option<PowerSplit>,
) -> Result<ConstraintSet, SchemeError> {
    scheme_constraints_with(scheme, ch, theta, &BuildOptions::default())
}

pub fn scheme_constraints_with(
    scheme: Scheme,
    ch: &ChannelState,
    theta: Option<PowerSplit>,
    options: &BuildOptions,
) -> Result<ConstraintSet, SchemeError> {
    match (scheme.uses_theta(), theta) {
        (true, None) => return Err(SchemeError::MissingTheta(scheme)),
        (false, Some(_)) => return Err(SchemeError::ThetaNotApplicable(scheme)),
        _ => {}
    }
    match scheme {
        Scheme::MabcCapacity => Ok(mabc_capacity_constraints(ch)),
        Scheme::DirectCase => match direct_case_constraints(ch) {
            DirectOutcome::Region(_, set) => Ok(set),
            DirectOutcome::RelayingDominates => Err(SchemeError::RelayingDominates),
        },
        Scheme::Plnc(coding, protocol) => {
            let relabel = ch.g10() < ch.g12();
            let oriented = if relabel { ch.swapped() } else { *ch };
            let mut set = plnc_constraints(coding, protocol, &oriented, theta, options);
            if relabel {
                set.swap_rates();
            }
            Ok(set)
        }
    }
}

fn plnc_constraints(
    coding: Coding,
    protocol: Protocol,
    ch: &ChannelState,
    theta: Option<PowerSplit>,
    options: &BuildOptions,
) -> ConstraintSet {
    let Capacities { c01, c10, c02, c20, c12, c21, cm } = ch.capacities();
    // C12(θ) and C10(1-θ); only read by the θ-dependent schemes.
    let (c12t, c10r) = theta.map_or((c12, 0.0), |t| (t.capacity(ch.g12()), t.residual_capacity(ch.g10())));

    use {Coding::*, Protocol::*};
    let mut s = ConstraintSet::new(Scheme::Plnc(coding, protocol).lambda_count());
    match (coding, protocol) {
        (Sux, FourStep) => {
            s.rate(1.0, 0.0, &[(1, c01), (3, c01)]);
            s.rate(1.0, 0.0, &[(1, c02), (4, c12t)]);
            s.rate(0.0, 1.0, &[(2, c21), (3, c21)]);
            s.rate(0.0, 1.0, &[(2, c20), (4, c10)]);
            s.rate(-1.0, 1.0, &[(1, -c02), (2, c20), (4, c10r)]);
            s.rate(1.0, 1.0, &[(1, c01), (2, c21), (3, cm)]);
            if options.four_step_sux_partition_row {
                s.rate(1.0, -1.0, &[(1, c02), (2, -c20)]);
            }
        }
        (Sux, TwoStep) => {
            s.rate(1.0, 0.0, &[(1, c01)]);
            s.rate(1.0, 0.0, &[(2, c12t)]);
            s.rate(0.0, 1.0, &[(1, c21)]);
            s.rate(0.0, 1.0, &[(2, c10)]);
            s.rate(-1.0, 1.0, &[(2, c10r)]);
            s.rate(1.0, 1.0, &[(1, cm)]);
        }
        (Xor, FourStep) => {
            s.rate(1.0, 0.0, &[(1, c01), (3, c01)]);
            s.rate(1.0, 0.0, &[(1, c02), (4, c12)]);
            s.rate(1.0, 1.0, &[(1, c01), (2, c21), (3, cm)]);
            s.rate(0.0, 1.0, &[(2, c21), (3, c21)]);
            s.rate(-1.0, 1.0, &[(1, -c02), (2, c20), (5, c10)]);
        }
        (Xor, TwoStep) => {
            s.rate(1.0, 0.0, &[(1, c01)]);
            s.rate(1.0, 0.0, &[(2, c12)]);
            s.rate(0.0, 1.0, &[(1, c21)]);
            s.rate(1.0, 1.0, &[(1, cm)]);
            s.rate(-1.0, 1.0, &[(3, c10)]);
        }
        (Sup, FourStep) => {
            s.rate(1.0, 0.0, &[(1, c01), (3, c01)]);
            s.rate(1.0, 0.0, &[(1, c02), (4, c12t)]);
            s.rate(0.0, 1.0, &[(2, c21), (3, c21)]);
            s.rate(0.0, 1.0, &[(2, c20), (4, c10r)]);
            s.rate(1.0, 1.0, &[(1, c01), (2, c21), (3, cm)]);
        }
        (Sup, TwoStep) => {
            s.rate(1.0, 0.0, &[(1, c01)]);
            s.rate(1.0, 0.0, &[(2, c12t)]);
            s.rate(1.0, 1.0, &[(1, cm)]);
            s.rate(0.0, 1.0, &[(1, c21)]);
            s.rate(0.0, 1.0, &[(2, c10r)]);
        }
    }
    s.simplex();
    s
}

/// Capacity bound of the two-step protocol: time-weighted multiple-access
/// region intersected with the broadcast capacity rectangle.
pub fn mabc_capacity_constraints(ch: &ChannelState) -> ConstraintSet {
    let Capacities { c01, c10, c12, c21, cm, .. } = ch.capacities();
    let mut s = ConstraintSet::new(2);
    s.rate(1.0, 0.0, &[(1, c01)]);
    s.rate(0.0, 1.0, &[(1, c21)]);
    s.rate(1.0, 1.0, &[(1, cm)]);
    s.rate(1.0, 0.0, &[(2, c12)]);
    s.rate(0.0, 1.0, &[(2, c10)]);
    s.simplex();
    s
}

/// Selects the direct-transmission system from the ordering of the direct
/// and relay link capacities.
pub fn direct_case_constraints(ch: &ChannelState) -> DirectOutcome {
    let Capacities { c01, c10, c02, c20, c12, c21, .. } = ch.capacities();
    let node0_direct = c02 >= c01;
    let node2_direct = c20 >= c21;
    let (kind, s) = match (node0_direct, node2_direct) {
        (false, false) => return DirectOutcome::RelayingDominates,
        (false, true) => {
            let mut s = ConstraintSet::new(3);
            s.rate(1.0, 0.0, &[(1, c01)]);
            s.rate(1.0, 0.0, &[(1, c02), (2, c12)]);
            s.rate(0.0, 1.0, &[(3, c20)]);
            (DirectKind::Node2Direct, s)
        }
        (true, false) => {
            let mut s = ConstraintSet::new(3);
            s.rate(0.0, 1.0, &[(2, c21)]);
            s.rate(0.0, 1.0, &[(2, c20), (3, c10)]);
            s.rate(1.0, 0.0, &[(1, c01)]);
            (DirectKind::Node0Direct, s)
        }
        (true, true) => {
            let mut s = ConstraintSet::new(2);
            s.rate(1.0, 0.0, &[(1, c02)]);
            s.rate(0.0, 1.0, &[(2, c20)]);
            (DirectKind::BothDirect, s)
        }
    };
    let mut s = s;
    s.simplex();
    DirectOutcome::Region(kind, s)
}
