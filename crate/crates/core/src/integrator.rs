//! Fixed-step and embedded adaptive integration with invariant monitoring.
//!
//! Conservation is monitored, never enforced: every accepted sample
//! records the invariant quadruple so drift stays observable. The
//! adaptive stepper is the classical Dormand-Prince 5(4) pair with the
//! first-same-as-last stage reuse and a PI step-size controller; the
//! fixed stepper is classical fourth-order Runge-Kutta.

use crate::linalg::Vec3;
use crate::model::{invariants_at, Invariants};
use crate::poisson::State;
use crate::{Error, Result};

pub const DEFAULT_BLOW_UP_NORM: f64 = 1e8;
pub const DEFAULT_MAX_STEPS: usize = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepMode {
    Fixed { dt: f64 },
    Adaptive { rel_tol: f64, abs_tol: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorSettings {
    mode: StepMode,
    blow_up_norm: f64,
    max_steps: usize,
}

impl IntegratorSettings {
    pub fn fixed(dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidSettings("dt must be positive and finite"));
        }
        Ok(IntegratorSettings {
            mode: StepMode::Fixed { dt },
            blow_up_norm: DEFAULT_BLOW_UP_NORM,
            max_steps: DEFAULT_MAX_STEPS,
        })
    }

    pub fn adaptive(rel_tol: f64, abs_tol: f64) -> Result<Self> {
        if !(rel_tol.is_finite() && rel_tol > 0.0 && abs_tol.is_finite() && abs_tol > 0.0) {
            return Err(Error::InvalidSettings("tolerances must be positive and finite"));
        }
        Ok(IntegratorSettings {
            mode: StepMode::Adaptive { rel_tol, abs_tol },
            blow_up_norm: DEFAULT_BLOW_UP_NORM,
            max_steps: DEFAULT_MAX_STEPS,
        })
    }

    pub fn with_blow_up_norm(mut self, norm: f64) -> Result<Self> {
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidSettings("blow-up norm must be positive and finite"));
        }
        self.blow_up_norm = norm;
        Ok(self)
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Result<Self> {
        if max_steps == 0 {
            return Err(Error::InvalidSettings("max_steps must be nonzero"));
        }
        self.max_steps = max_steps;
        Ok(self)
    }

    pub fn mode(&self) -> StepMode {
        self.mode
    }

    pub fn blow_up_norm(&self) -> f64 {
        self.blow_up_norm
    }

    pub fn max_steps(&self) -> usize {
        self.max_steps
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: State,
    pub invariants: Invariants,
}

impl Sample {
    fn at(t: f64, y: Vec3) -> Sample {
        Sample {
            t,
            state: State::new(y.x, y.y, y.z).expect("sample guarded finite"),
            invariants: invariants_at(y),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Termination {
    Completed,
    /// The step guard tripped; `t_star` is the last accepted time, and no
    /// non-finite or over-norm state was recorded.
    BlowUp { t_star: f64 },
    StepLimit,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Termination::Completed => write!(f, "completed"),
            Termination::BlowUp { t_star } => write!(f, "blow-up at t* = {t_star}"),
            Termination::StepLimit => write!(f, "step limit reached"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub termination: Termination,
}

impl Trajectory {
    /// Trajectories always hold at least the initial sample.
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("non-empty by construction")
    }
}

/// Largest deviation of each invariant from its initial value.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct DriftReport {
    pub h: f64,
    pub c: f64,
    pub f: f64,
    pub g: f64,
}

pub fn drift_report(traj: &Trajectory) -> DriftReport {
    let first = traj.samples[0].invariants;
    let mut r = DriftReport {
        h: 0.0,
        c: 0.0,
        f: 0.0,
        g: 0.0,
    };
    for s in &traj.samples {
        r.h = r.h.max((s.invariants.h - first.h).abs());
        r.c = r.c.max((s.invariants.c - first.c).abs());
        r.f = r.f.max((s.invariants.f - first.f).abs());
        r.g = r.g.max((s.invariants.g - first.g).abs());
    }
    r
}

fn rk4_raw<F: Fn(Vec3) -> Vec3>(field: &F, y: Vec3, dt: f64) -> Vec3 {
    let k1 = field(y);
    let k2 = field(y + k1 * (dt / 2.0));
    let k3 = field(y + k2 * (dt / 2.0));
    let k4 = field(y + k3 * dt);
    y + (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0)
}

/// One classical fourth-order step. A non-finite result reports as a
/// step overflow rather than propagating NaN.
pub fn rk4_step<F: Fn(Vec3) -> Vec3>(field: F, p: State, dt: f64) -> Result<State> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidSettings("dt must be positive and finite"));
    }
    let out = rk4_raw(&field, p.coords(), dt);
    if !out.is_finite() {
        return Err(Error::StepOverflow);
    }
    State::new(out.x, out.y, out.z)
}

/// Integrate from `p0` over [0, t_end]. The first sample is always
/// (0, p0); sample times are strictly increasing and the final sample
/// lands exactly on `t_end` unless a guard terminates the run early.
pub fn integrate<F: Fn(Vec3) -> Vec3>(
    field: F,
    p0: State,
    t_end: f64,
    settings: &IntegratorSettings,
) -> Trajectory {
    assert!(t_end.is_finite() && t_end >= 0.0, "t_end must be finite and nonnegative");
    match settings.mode {
        StepMode::Fixed { dt } => integrate_fixed(field, p0, t_end, dt, settings),
        StepMode::Adaptive { rel_tol, abs_tol } => {
            integrate_adaptive(field, p0, t_end, rel_tol, abs_tol, settings)
        }
    }
}

fn integrate_fixed<F: Fn(Vec3) -> Vec3>(
    field: F,
    p0: State,
    t_end: f64,
    dt: f64,
    settings: &IntegratorSettings,
) -> Trajectory {
    let mut samples = vec![Sample::at(0.0, p0.coords())];
    let mut t = 0.0;
    let mut y = p0.coords();
    let mut steps = 0usize;

    while t < t_end {
        if steps >= settings.max_steps {
            return Trajectory {
                samples,
                termination: Termination::StepLimit,
            };
        }
        steps += 1;

        let last = t + dt >= t_end;
        let h = if last { t_end - t } else { dt };
        let y_next = rk4_raw(&field, y, h);
        if !y_next.is_finite() || y_next.norm_inf() > settings.blow_up_norm {
            return Trajectory {
                samples,
                termination: Termination::BlowUp { t_star: t },
            };
        }
        t = if last { t_end } else { t + h };
        y = y_next;
        samples.push(Sample::at(t, y));
    }

    Trajectory {
        samples,
        termination: Termination::Completed,
    }
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the 5th-order weights and the embedded 4th-order
// weights; dotted with the stages it gives the local error estimate.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// PI controller constants.
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const SAFE: f64 = 0.9;
const FAC_GROW_CAP: f64 = 0.1; // hnew <= h / 0.1
const FAC_SHRINK_CAP: f64 = 5.0; // hnew >= h / 5

fn error_norm(err: Vec3, y0: Vec3, y1: Vec3, rel_tol: f64, abs_tol: f64) -> f64 {
    let sc = |a: f64, b: f64| abs_tol + rel_tol * a.abs().max(b.abs());
    let r = (err.x / sc(y0.x, y1.x)).powi(2)
        + (err.y / sc(y0.y, y1.y)).powi(2)
        + (err.z / sc(y0.z, y1.z)).powi(2);
    (r / 3.0).sqrt()
}

fn initial_step<F: Fn(Vec3) -> Vec3>(
    field: &F,
    y: Vec3,
    f0: Vec3,
    t_end: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> f64 {
    let scv = Vec3::new(
        abs_tol + rel_tol * y.x.abs(),
        abs_tol + rel_tol * y.y.abs(),
        abs_tol + rel_tol * y.z.abs(),
    );
    let rms = |v: Vec3| {
        (((v.x / scv.x).powi(2) + (v.y / scv.y).powi(2) + (v.z / scv.z).powi(2)) / 3.0).sqrt()
    };
    let d0 = rms(y);
    let d1 = rms(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * (d0 / d1)
    };
    let h0 = h0.min(t_end);
    let f1 = field(y + f0 * h0);
    if !f1.is_finite() {
        return (h0 * 1e-3).max(1e-12);
    }
    // second derivative estimate
    let d2 = rms(f1 - f0) / h0;
    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dm).powf(0.2)
    };
    (h0 * 100.0).min(h1).min(t_end)
}

fn integrate_adaptive<F: Fn(Vec3) -> Vec3>(
    field: F,
    p0: State,
    t_end: f64,
    rel_tol: f64,
    abs_tol: f64,
    settings: &IntegratorSettings,
) -> Trajectory {
    let mut samples = vec![Sample::at(0.0, p0.coords())];
    let mut t = 0.0f64;
    let mut y = p0.coords();

    if t_end == 0.0 {
        return Trajectory {
            samples,
            termination: Termination::Completed,
        };
    }

    let mut k1 = field(y);
    if !k1.is_finite() {
        return Trajectory {
            samples,
            termination: Termination::BlowUp { t_star: 0.0 },
        };
    }
    let mut h = initial_step(&field, y, k1, t_end, rel_tol, abs_tol);
    let mut facold = 1e-4f64;
    let mut steps = 0usize;

    loop {
        if steps >= settings.max_steps {
            return Trajectory {
                samples,
                termination: Termination::StepLimit,
            };
        }
        steps += 1;

        if h < 1e-14 * t.abs().max(1.0) {
            // Step size collapsed; the run cannot advance any further.
            return Trajectory {
                samples,
                termination: Termination::BlowUp { t_star: t },
            };
        }

        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }

        let k2 = field(y + k1 * (A21 * h));
        let k3 = field(y + (k1 * A31 + k2 * A32) * h);
        let k4 = field(y + (k1 * A41 + k2 * A42 + k3 * A43) * h);
        let k5 = field(y + (k1 * A51 + k2 * A52 + k3 * A53 + k4 * A54) * h);
        let k6 = field(y + (k1 * A61 + k2 * A62 + k3 * A63 + k4 * A64 + k5 * A65) * h);
        let y1 = y + (k1 * B1 + k3 * B3 + k4 * B4 + k5 * B5 + k6 * B6) * h;
        let finite = k2.is_finite()
            && k3.is_finite()
            && k4.is_finite()
            && k5.is_finite()
            && k6.is_finite()
            && y1.is_finite();
        if !finite {
            h *= 0.5;
            continue;
        }
        let k7 = field(y1);
        if !k7.is_finite() {
            h *= 0.5;
            continue;
        }

        let err_vec = (k1 * E1 + k3 * E3 + k4 * E4 + k5 * E5 + k6 * E6 + k7 * E7) * h;
        let err = error_norm(err_vec, y, y1, rel_tol, abs_tol);
        if !err.is_finite() {
            h *= 0.5;
            continue;
        }

        let fac11 = err.powf(EXPO1);
        if err <= 1.0 {
            // accept; the controller damps with the previous step's error
            let fac = (fac11 / facold.powf(BETA) / SAFE).clamp(FAC_GROW_CAP, FAC_SHRINK_CAP);
            facold = err.max(1e-4);
            if y1.norm_inf() > settings.blow_up_norm {
                return Trajectory {
                    samples,
                    termination: Termination::BlowUp { t_star: t },
                };
            }
            t = if last { t_end } else { t + h };
            y = y1;
            k1 = k7;
            samples.push(Sample::at(t, y));
            if t >= t_end {
                return Trajectory {
                    samples,
                    termination: Termination::Completed,
                };
            }
            h /= fac;
        } else {
            // reject, shrink, retry from the same state
            h /= (fac11 / SAFE).min(FAC_SHRINK_CAP);
        }
    }
}
