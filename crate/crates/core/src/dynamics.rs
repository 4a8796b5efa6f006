//! Social and physical diffusion dynamics on a fixed network.
//!
//! Social diffusion pulls each node toward its local norm,
//! ds_i/dt = c (<s_j>^i_j - s_i), collectively c (D^-1 A - I) s. It does not
//! conserve the global state h^T s; it conserves the strength-state product
//! g^T s instead, and forward Euler preserves that invariant exactly in exact
//! arithmetic. Physical diffusion ds/dt = -c L s is the conservational
//! baseline (h^T s constant).

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::network::{Network, StateVector};
use crate::stats::linear_fit;

/// Which vector field to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dynamics {
    /// Assimilation to the local weighted average: c (D^-1 A - I) s.
    Social,
    /// Laplacian flow: -c L s with L = D - A.
    Physical,
}

impl std::fmt::Display for Dynamics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dynamics::Social => write!(f, "social"),
            Dynamics::Physical => write!(f, "physical"),
        }
    }
}

/// Integration parameters for the forward Euler scheme.
///
/// `c * dt <= 1` is required so each social update stays a convex combination
/// of the node state and its local average, which keeps trajectories inside
/// the initial state bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionParams {
    /// Diffusion constant (1/time).
    pub c: f64,
    /// Euler step size (time).
    pub dt: f64,
    /// Integration horizon (time); rounded to the nearest whole step.
    pub t_end: f64,
    /// Keep a full state snapshot every this many steps, in addition to the
    /// first and last states that are always kept. `None` keeps first/last
    /// only, which bounds memory for long runs at n = 1000.
    pub snapshot_stride: Option<usize>,
}

impl DiffusionParams {
    pub fn new(c: f64, dt: f64, t_end: f64) -> Result<Self> {
        let p = Self {
            c,
            dt,
            t_end,
            snapshot_stride: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_snapshot_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = Some(stride.max(1));
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(Error::InvalidParam(format!("c must be > 0, got {}", self.c)));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParam(format!(
                "dt must be > 0, got {}",
                self.dt
            )));
        }
        if self.c * self.dt > 1.0 {
            return Err(Error::InvalidParam(format!(
                "c * dt must be <= 1 for stable convex updates, got {}",
                self.c * self.dt
            )));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::InvalidParam(format!(
                "t_end must be >= 0, got {}",
                self.t_end
            )));
        }
        Ok(())
    }

    /// Number of Euler steps for the configured horizon.
    pub fn step_count(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// Per-step scalar observables of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    /// Global state h^T s (sum of node states).
    pub global_state: f64,
    /// Conserved strength-state product g^T s.
    pub strength_state_product: f64,
    /// w^T s with w the strength-ratio vector; NaN when w is undefined.
    pub w_state_product: f64,
    pub mean_state: f64,
    pub min_state: f64,
    pub max_state: f64,
    /// |h^T s - h^T s_inf| against the closed-form asymptote; NaN when the
    /// prediction is unavailable (disconnected network).
    pub dist_to_asymptote: f64,
}

/// Computes the observables of state `s`. `w` is the precomputed
/// strength-ratio vector (or `None` when undefined) and `asymptote_global`
/// the predicted asymptotic h^T s (or `None` when unavailable).
pub fn observables(
    net: &Network,
    s: &[f64],
    w: Option<&[f64]>,
    asymptote_global: Option<f64>,
) -> Observables {
    let n = net.node_count();
    debug_assert_eq!(s.len(), n);
    let global_state: f64 = s.iter().sum();
    let strength_state_product: f64 = net
        .strengths()
        .iter()
        .zip(s)
        .map(|(k, x)| k * x)
        .sum();
    let w_state_product = match w {
        Some(w) => w.iter().zip(s).map(|(a, b)| a * b).sum(),
        None => f64::NAN,
    };
    let mut min_state = f64::INFINITY;
    let mut max_state = f64::NEG_INFINITY;
    for &x in s {
        min_state = min_state.min(x);
        max_state = max_state.max(x);
    }
    // Clamp guards ulp rounding in the sum; mean must sit inside [min, max].
    let mean_state = (global_state / n as f64).clamp(min_state, max_state);
    let dist_to_asymptote = match asymptote_global {
        Some(a) => (global_state - a).abs(),
        None => f64::NAN,
    };
    Observables {
        global_state,
        strength_state_product,
        w_state_product,
        mean_state,
        min_state,
        max_state,
        dist_to_asymptote,
    }
}

/// Header of the trajectory CSV format.
pub const TRAJECTORY_CSV_HEADER: &str =
    "t,global_state,strength_state_product,w_state_product,mean,min,max,dist_to_asymptote";

/// Fixed-step time series of states and observables.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    /// t_k = k * dt, one entry per recorded step including t = 0.
    pub times: Vec<f64>,
    pub observables: Vec<Observables>,
    /// (step, state) snapshots; always holds the first and last states.
    pub snapshots: Vec<(usize, StateVector)>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn initial_state(&self) -> &StateVector {
        &self.snapshots.first().expect("trajectory has snapshots").1
    }

    pub fn final_state(&self) -> &StateVector {
        &self.snapshots.last().expect("trajectory has snapshots").1
    }

    /// Change of the global state over the whole run.
    pub fn global_state_delta(&self) -> f64 {
        self.observables.last().expect("non-empty").global_state
            - self.observables.first().expect("non-empty").global_state
    }

    /// Serializes times and observables as CSV with >= 12 significant digits
    /// per value (13-digit scientific notation).
    pub fn to_csv_string(&self) -> String {
        let mut out = String::with_capacity(self.times.len() * 140 + 100);
        out.push_str(TRAJECTORY_CSV_HEADER);
        out.push('\n');
        for (t, o) in self.times.iter().zip(&self.observables) {
            let _ = writeln!(
                out,
                "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                t,
                o.global_state,
                o.strength_state_product,
                o.w_state_product,
                o.mean_state,
                o.min_state,
                o.max_state,
                o.dist_to_asymptote
            );
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }
}

fn check_state_len(net: &Network, s: &[f64]) -> Result<()> {
    if s.len() != net.node_count() {
        return Err(Error::LengthMismatch {
            got: s.len(),
            expected: net.node_count(),
        });
    }
    Ok(())
}

fn check_positive_strengths(net: &Network) -> Result<()> {
    if let Some(i) = net.strengths().iter().position(|&k| !(k > 0.0)) {
        return Err(Error::ZeroStrength(i));
    }
    Ok(())
}

fn social_rate_into(net: &Network, s: &[f64], c: f64, out: &mut [f64]) {
    for i in 0..net.node_count() {
        let acc: f64 = net.neighbors(i).iter().map(|&(j, w)| w * s[j]).sum();
        out[i] = c * (acc / net.strength(i) - s[i]);
    }
}

fn physical_rate_into(net: &Network, s: &[f64], c: f64, out: &mut [f64]) {
    for i in 0..net.node_count() {
        let acc: f64 = net.neighbors(i).iter().map(|&(j, w)| w * s[j]).sum();
        out[i] = c * (acc - net.strength(i) * s[i]);
    }
}

/// ds/dt under social diffusion: (ds/dt)_i = c (<s_j>^i_j - s_i).
/// Errors when any node has zero strength (the local norm is undefined).
pub fn social_derivative(net: &Network, s: &[f64], c: f64) -> Result<Vec<f64>> {
    check_state_len(net, s)?;
    check_positive_strengths(net)?;
    let mut out = vec![0.0; s.len()];
    social_rate_into(net, s, c, &mut out);
    Ok(out)
}

/// ds/dt under physical diffusion: -c L s with L = D - A.
pub fn physical_derivative(net: &Network, s: &[f64], c: f64) -> Result<Vec<f64>> {
    check_state_len(net, s)?;
    let mut out = vec![0.0; s.len()];
    physical_rate_into(net, s, c, &mut out);
    Ok(out)
}

/// Strength-state product g^T s, the quantity social diffusion conserves.
pub fn strength_state_product(net: &Network, s: &[f64]) -> Result<f64> {
    check_state_len(net, s)?;
    Ok(net.strengths().iter().zip(s).map(|(k, x)| k * x).sum())
}

/// Predicted asymptotic node state: the strength-weighted average of the
/// initial states, g^T s0 / K. Requires a connected network; the asymptotic
/// state itself is this value on every node.
pub fn predict_asymptotic_mean(net: &Network, s0: &[f64]) -> Result<f64> {
    check_state_len(net, s0)?;
    if !net.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(strength_state_product(net, s0)? / net.total_strength())
}

/// Predicted asymptotic net gain or loss of the global state,
/// (g_hat - h)^T s0 with g_hat = g / <k>. Zero on regular networks.
pub fn predict_net_gain(net: &Network, s0: &[f64]) -> Result<f64> {
    check_state_len(net, s0)?;
    if !net.is_connected() {
        return Err(Error::Disconnected);
    }
    let mean_strength = net.total_strength() / net.node_count() as f64;
    Ok(net
        .strengths()
        .iter()
        .zip(s0)
        .map(|(k, x)| (k / mean_strength - 1.0) * x)
        .sum())
}

/// The strength-ratio vector w = A D^-1 h: w_i = sum_j a_ij / k_j, the local
/// average of self/neighbor strength ratios ("social status" of a node's
/// neighborhood). Satisfies w^T h = n; the instantaneous drift of the global
/// state is c (w - h)^T s.
pub fn w_vector(net: &Network) -> Result<Vec<f64>> {
    check_positive_strengths(net)?;
    let mut w = vec![0.0; net.node_count()];
    for (i, wi) in w.iter_mut().enumerate() {
        *wi = net
            .neighbors(i)
            .iter()
            .map(|&(j, weight)| weight / net.strength(j))
            .sum();
    }
    Ok(w)
}

/// The nested strength-ratio vector u = A D^-1 w, which closes the reduced
/// two-variable dynamics of (h^T s, w^T s).
pub fn u_vector(net: &Network) -> Result<Vec<f64>> {
    let w = w_vector(net)?;
    let mut u = vec![0.0; net.node_count()];
    for (i, ui) in u.iter_mut().enumerate() {
        *ui = net
            .neighbors(i)
            .iter()
            .map(|&(j, weight)| weight * w[j] / net.strength(j))
            .sum();
    }
    Ok(u)
}

/// Instantaneous drift of the global state, d(h^T s)/dt = c (w^T s - h^T s).
/// Equals h^T social_derivative(net, s, c). Non-negative whenever s is a
/// positive multiple of w.
pub fn instantaneous_drift(net: &Network, s: &[f64], c: f64) -> Result<f64> {
    check_state_len(net, s)?;
    let w = w_vector(net)?;
    let w_ts: f64 = w.iter().zip(s).map(|(a, b)| a * b).sum();
    let h_ts: f64 = s.iter().sum();
    Ok(c * (w_ts - h_ts))
}

/// Integrates the chosen dynamics with forward Euler at fixed step size.
/// Observables are recorded at every step including t = 0; full states are
/// kept per `params.snapshot_stride` plus first and last.
pub fn integrate(
    net: &Network,
    s0: &StateVector,
    params: &DiffusionParams,
    dynamics: Dynamics,
) -> Result<Trajectory> {
    params.validate()?;
    check_state_len(net, s0.as_slice())?;
    if dynamics == Dynamics::Social {
        check_positive_strengths(net)?;
    }
    let n = net.node_count();
    let steps = params.step_count();

    let w = if net.strengths().iter().all(|&k| k > 0.0) {
        Some(w_vector(net)?)
    } else {
        None
    };
    let asymptote_global = if net.is_connected() {
        Some(match dynamics {
            // h^T s_inf = n * (g^T s0 / K) from the conserved g^T s.
            Dynamics::Social => n as f64 * predict_asymptotic_mean(net, s0.as_slice())?,
            // Physical diffusion conserves h^T s outright.
            Dynamics::Physical => s0.iter().sum(),
        })
    } else {
        None
    };

    let mut s: Vec<f64> = s0.as_slice().to_vec();
    let mut rate = vec![0.0; n];
    let mut times = Vec::with_capacity(steps + 1);
    let mut obs = Vec::with_capacity(steps + 1);
    let mut snapshots: Vec<(usize, StateVector)> = vec![(0, s0.clone())];

    times.push(0.0);
    obs.push(observables(net, &s, w.as_deref(), asymptote_global));

    for step in 1..=steps {
        match dynamics {
            Dynamics::Social => social_rate_into(net, &s, params.c, &mut rate),
            Dynamics::Physical => physical_rate_into(net, &s, params.c, &mut rate),
        }
        for (x, dx) in s.iter_mut().zip(&rate) {
            *x += params.dt * dx;
        }
        let t = step as f64 * params.dt;
        if s.iter().any(|x| !x.is_finite()) {
            return Err(Error::Diverged(t));
        }
        times.push(t);
        obs.push(observables(net, &s, w.as_deref(), asymptote_global));
        if let Some(stride) = params.snapshot_stride {
            if step % stride == 0 && step != steps {
                snapshots.push((step, StateVector::new(s.clone())?));
            }
        }
    }
    if steps > 0 {
        snapshots.push((steps, StateVector::new(s)?));
    }

    Ok(Trajectory {
        dt: params.dt,
        times,
        observables: obs,
        snapshots,
    })
}

/// Reduced-model flavor by strength assortativity regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReducedKind {
    /// Non-assortative: 2x2 system with eigenvalues 0 and -c.
    Neutral,
    /// Strongly disassortative: 2x2 system with eigenvalues 0 and -2c.
    Disassortative,
    /// Strongly assortative: 1D decay at rate -c (b - 1) / b.
    Assortative,
}

/// Low-dimensional approximation of the (h^T s, w^T s) dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedModel {
    pub kind: ReducedKind,
    pub c: f64,
    /// Scale constant of the neighbor-strength scaling fit (assortative only).
    pub b: Option<f64>,
    /// Predicted slow eigenvalue: the homogenization speed.
    pub decay_rate: f64,
}

impl ReducedModel {
    /// Builds the model for a given assortativity regime. The assortative
    /// kind needs the scaling constant b > 0 from a neighbor-strength fit.
    pub fn new(kind: ReducedKind, c: f64, b: Option<f64>) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::InvalidParam(format!("c must be > 0, got {c}")));
        }
        let (b, decay_rate) = match kind {
            ReducedKind::Neutral => (None, -c),
            ReducedKind::Disassortative => (None, -2.0 * c),
            ReducedKind::Assortative => {
                let b = b.ok_or_else(|| {
                    Error::InvalidParam("assortative reduced model needs b".into())
                })?;
                if !(b > 0.0) {
                    return Err(Error::NonPositiveScale(b));
                }
                (Some(b), -c * (b - 1.0) / b)
            }
        };
        Ok(Self {
            kind,
            c,
            b,
            decay_rate,
        })
    }

    /// Coefficient matrix of the two-variable system d/dt (h^T s, w^T s);
    /// `None` for the assortative kind, whose dynamics collapse to one
    /// dimension.
    pub fn coefficient_matrix(&self) -> Option<[[f64; 2]; 2]> {
        match self.kind {
            ReducedKind::Neutral => Some([[-self.c, self.c], [0.0, 0.0]]),
            ReducedKind::Disassortative => Some([[-self.c, self.c], [self.c, -self.c]]),
            ReducedKind::Assortative => None,
        }
    }

    /// Time derivative of the reduced pair (h^T s, w^T s).
    pub fn derivative(&self, pair: [f64; 2]) -> [f64; 2] {
        match self.coefficient_matrix() {
            Some(m) => [
                m[0][0] * pair[0] + m[0][1] * pair[1],
                m[1][0] * pair[0] + m[1][1] * pair[1],
            ],
            None => [self.decay_rate * pair[0], self.decay_rate * pair[1]],
        }
    }
}

/// Builds the reduced model for `net`; the assortative kind fits the
/// neighbor-strength scaling constant b on the network first.
pub fn reduced_model(net: &Network, kind: ReducedKind, c: f64) -> Result<ReducedModel> {
    let b = if kind == ReducedKind::Assortative {
        Some(crate::gen::fit_scaling(net)?.b)
    } else {
        None
    };
    ReducedModel::new(kind, c, b)
}

/// Default early-time window for decay-rate fits.
pub const DEFAULT_DECAY_WINDOW: (f64, f64) = (0.0, 2.0);

/// Least-squares slope of ln(values) against time over `window` (inclusive).
/// Errors when fewer than 2 samples fall in the window or any value in the
/// window is not positive.
pub fn log_slope(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<f64> {
    assert_eq!(times.len(), values.len(), "log_slope: length mismatch");
    let slack = 1e-9 * (window.1 - window.0).abs().max(1.0);
    let mut ts = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in times.iter().zip(values) {
        if t < window.0 - slack || t > window.1 + slack {
            continue;
        }
        if !(v > 0.0) {
            return Err(Error::DistanceUnderflow(t));
        }
        ts.push(t);
        ys.push(v.ln());
    }
    if ts.len() < 2 {
        return Err(Error::EmptyFitWindow(window.0, window.1));
    }
    Ok(linear_fit(&ts, &ys)?.slope)
}

/// Empirical homogenization speed: the log-slope of dist_to_asymptote over
/// an early-time window (use [`DEFAULT_DECAY_WINDOW`] to match the reduced
/// models' range of validity).
pub fn measure_decay_rate(traj: &Trajectory, window: (f64, f64)) -> Result<f64> {
    let dists: Vec<f64> = traj
        .observables
        .iter()
        .map(|o| o.dist_to_asymptote)
        .collect();
    log_slope(&traj.times, &dists, window)
}
