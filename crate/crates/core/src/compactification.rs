//! Dynamics at infinity through the six projective charts.
//!
//! Chart U1 uses the quotients z1 = y/x, z2 = z/x, z3 = 1/x on x > 0.
//! Differentiating the quotients along the flow and rescaling time by
//! dtau = x dt gives
//!
//! ```text
//! z1' = 2 z1 (1 - z1),   z2' = 2 z2 (1 - z2),   z3' = z3 (1 - z1 - z2)
//! ```
//!
//! and U2, U3 produce the identical system in their own quotients; the
//! symmetry of the field under coordinate relabeling is what collapses
//! the three charts to one formula. V charts carry the same quotients
//! over a negative dividing coordinate, where the rescale flips the
//! direction of time. The first two equations are logistic and decouple,
//! so the whole chart flow integrates in closed form: with
//! alpha_i = (1 - z_i(0))/z_i(0) and k3 = z3(0) sqrt((1+alpha1)(1+alpha2)),
//!
//! ```text
//! z_i(t) = e^{2t} / (e^{2t} + alpha_i),
//! z3(t)  = k3 e^t / (sqrt(e^{2t} + alpha1) sqrt(e^{2t} + alpha2)).
//! ```
//!
//! The plane z3 = 0 (infinity itself) is invariant and carries four
//! equilibria of the decoupled logistic pair.

use crate::linalg::Vec3;
use crate::{Error, Result};
use crate::poisson::State;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chart {
    U1,
    U2,
    U3,
    V1,
    V2,
    V3,
}

impl Chart {
    pub fn name(self) -> &'static str {
        match self {
            Chart::U1 => "U1",
            Chart::U2 => "U2",
            Chart::U3 => "U3",
            Chart::V1 => "V1",
            Chart::V2 => "V2",
            Chart::V3 => "V3",
        }
    }

    /// Coordinate divided by, and the sign it must have here.
    fn dividing(self) -> (char, bool) {
        match self {
            Chart::U1 => ('x', true),
            Chart::U2 => ('y', true),
            Chart::U3 => ('z', true),
            Chart::V1 => ('x', false),
            Chart::V2 => ('y', false),
            Chart::V3 => ('z', false),
        }
    }

    /// V charts see the rescaled time run backwards.
    pub fn time_direction(self) -> f64 {
        match self {
            Chart::U1 | Chart::U2 | Chart::U3 => 1.0,
            Chart::V1 | Chart::V2 | Chart::V3 => -1.0,
        }
    }
}

impl std::fmt::Display for Chart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Point in chart coordinates (z1, z2, z3); finite by construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChartState {
    z1: f64,
    z2: f64,
    z3: f64,
}

impl ChartState {
    pub fn new(z1: f64, z2: f64, z3: f64) -> Result<Self> {
        if z1.is_finite() && z2.is_finite() && z3.is_finite() {
            Ok(ChartState { z1, z2, z3 })
        } else {
            Err(Error::NonFinite {
                context: "chart state",
                x: z1,
                y: z2,
                z: z3,
            })
        }
    }

    pub fn z1(&self) -> f64 {
        self.z1
    }

    pub fn z2(&self) -> f64 {
        self.z2
    }

    pub fn z3(&self) -> f64 {
        self.z3
    }

    pub fn coords(&self) -> Vec3 {
        Vec3::new(self.z1, self.z2, self.z3)
    }
}

/// Express `p` in `chart`. The dividing coordinate must have the chart's
/// sign; quotients must stay finite.
pub fn to_chart(chart: Chart, p: State) -> Result<ChartState> {
    let (coord, positive) = chart.dividing();
    let d = match coord {
        'x' => p.x(),
        'y' => p.y(),
        _ => p.z(),
    };
    let ok = if positive { d > 0.0 } else { d < 0.0 };
    if !ok {
        return Err(Error::OutsideChart {
            chart: chart.name(),
            coord,
            requirement: if positive { "> 0" } else { "< 0" },
            value: d,
        });
    }
    let (n1, n2) = match coord {
        'x' => (p.y(), p.z()),
        'y' => (p.x(), p.z()),
        _ => (p.x(), p.y()),
    };
    ChartState::new(n1 / d, n2 / d, 1.0 / d)
}

/// The rescaled chart field (2 z1 (1-z1), 2 z2 (1-z2), z3 (1-z1-z2)),
/// shared by all six charts.
pub fn compactified_field_at(v: Vec3) -> Vec3 {
    Vec3::new(
        2.0 * v.x * (1.0 - v.x),
        2.0 * v.y * (1.0 - v.y),
        v.z * (1.0 - v.x - v.y),
    )
}

pub fn compactified_field(cs: &ChartState) -> Vec3 {
    compactified_field_at(cs.coords())
}

/// Chart-aware field: U charts flow forward in rescaled time, V charts
/// backward.
pub fn chart_field(chart: Chart, cs: &ChartState) -> Vec3 {
    compactified_field(cs) * chart.time_direction()
}

/// Constants of the closed-form chart flow.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowConstants {
    pub alpha1: f64,
    pub alpha2: f64,
    pub k3: f64,
}

/// Fit the closed-form constants to an initial chart point.
///
/// z3(0) = 0 selects the invariant plane at infinity and forces k3 = 0
/// without evaluating any square root, which keeps orbits with negative
/// logistic components representable. Off that plane the square roots
/// require z1(0) > 0 and z2(0) > 0.
pub fn fit_constants(cs0: &ChartState) -> Result<FlowConstants> {
    if cs0.z1() == 0.0 {
        return Err(Error::DegeneratePlaneOrbit { index: 1 });
    }
    if cs0.z2() == 0.0 {
        return Err(Error::DegeneratePlaneOrbit { index: 2 });
    }
    let alpha1 = (1.0 - cs0.z1()) / cs0.z1();
    let alpha2 = (1.0 - cs0.z2()) / cs0.z2();
    let k3 = if cs0.z3() == 0.0 {
        0.0
    } else {
        if cs0.z1() < 0.0 {
            return Err(Error::NoRealConstants { index: 1 });
        }
        if cs0.z2() < 0.0 {
            return Err(Error::NoRealConstants { index: 2 });
        }
        // 1 + alpha_i = 1/z_i(0), positive here
        cs0.z3() * (1.0 + alpha1).sqrt() * (1.0 + alpha2).sqrt()
    };
    Ok(FlowConstants { alpha1, alpha2, k3 })
}

/// Evaluate the closed-form flow at rescaled time `t`.
pub fn closed_form_flow(fc: &FlowConstants, t: f64) -> Result<ChartState> {
    let e2t = (2.0 * t).exp();
    let d1 = e2t + fc.alpha1;
    let d2 = e2t + fc.alpha2;
    let on_plane = fc.k3 == 0.0;
    for (d, alpha) in [(d1, fc.alpha1), (d2, fc.alpha2)] {
        // Off the invariant plane the square roots need d > 0; on it only
        // the pole d = 0 is excluded.
        let singular = if on_plane { d == 0.0 } else { d <= 0.0 };
        if singular {
            return Err(Error::SingularFlow {
                t_critical: 0.5 * (-alpha).ln(),
            });
        }
    }
    let z1 = e2t / d1;
    let z2 = e2t / d2;
    let z3 = if on_plane {
        0.0
    } else {
        fc.k3 * t.exp() / (d1.sqrt() * d2.sqrt())
    };
    ChartState::new(z1, z2, z3)
}

/// Restriction of the chart field to the invariant plane z3 = 0.
pub fn infinity_field(z1: f64, z2: f64) -> (f64, f64) {
    (2.0 * z1 * (1.0 - z1), 2.0 * z2 * (1.0 - z2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Repelling,
    Attracting,
    Saddle,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InfinityEquilibrium {
    pub z1: f64,
    pub z2: f64,
    /// Linearization spectrum, sorted descending.
    pub eigenvalues: (f64, f64),
    pub kind: NodeKind,
}

fn node(z1: f64, z2: f64) -> InfinityEquilibrium {
    let l1 = 2.0 * (1.0 - 2.0 * z1);
    let l2 = 2.0 * (1.0 - 2.0 * z2);
    let (hi, lo) = if l1 >= l2 { (l1, l2) } else { (l2, l1) };
    let kind = if hi < 0.0 {
        NodeKind::Attracting
    } else if lo > 0.0 {
        NodeKind::Repelling
    } else {
        NodeKind::Saddle
    };
    InfinityEquilibrium {
        z1,
        z2,
        eigenvalues: (hi, lo),
        kind,
    }
}

/// The four equilibria of the dynamics at infinity.
pub fn infinity_equilibria() -> [InfinityEquilibrium; 4] {
    [
        node(0.0, 0.0),
        node(1.0, 1.0),
        node(0.0, 1.0),
        node(1.0, 0.0),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::{integrate, IntegratorSettings, Termination};
    use crate::model;

    fn state(x: f64, y: f64, z: f64) -> State {
        State::new(x, y, z).unwrap()
    }

    fn chart_state(z1: f64, z2: f64, z3: f64) -> ChartState {
        ChartState::new(z1, z2, z3).unwrap()
    }

    #[test]
    fn chart_coordinates() {
        let cs = to_chart(Chart::U1, state(2.0, 4.0, 6.0)).unwrap();
        assert_eq!(cs, chart_state(2.0, 3.0, 0.5));

        let cs = to_chart(Chart::V1, state(-1.0, 2.0, 3.0)).unwrap();
        assert_eq!(cs, chart_state(-2.0, -3.0, -1.0));

        let cs = to_chart(Chart::U2, state(2.0, 4.0, 6.0)).unwrap();
        assert_eq!(cs, chart_state(0.5, 1.5, 0.25));

        let cs = to_chart(Chart::U3, state(2.0, 4.0, 6.0)).unwrap();
        assert_eq!(cs.coords(), Vec3::new(2.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0));
    }

    #[test]
    fn wrong_sign_is_rejected() {
        assert!(matches!(
            to_chart(Chart::U1, state(-2.0, 4.0, 6.0)),
            Err(Error::OutsideChart { chart: "U1", coord: 'x', .. })
        ));
        assert!(to_chart(Chart::U1, state(0.0, 4.0, 6.0)).is_err());
        assert!(to_chart(Chart::V2, state(1.0, 2.0, 3.0)).is_err());
    }

    #[test]
    fn field_at_probe_point() {
        let cs = chart_state(0.5, 0.5, 1.0);
        assert_eq!(compactified_field(&cs), Vec3::new(0.5, 0.5, 0.0));
        assert_eq!(chart_field(Chart::U1, &cs), Vec3::new(0.5, 0.5, 0.0));
        assert_eq!(chart_field(Chart::V1, &cs), Vec3::new(-0.5, -0.5, -0.0));
    }

    // d/dt of each U1 quotient along the raw field equals x times the
    // chart field component: the time rescale made explicit.
    #[test]
    fn quotient_derivatives_match_rescaled_field() {
        for p in [
            state(1.0, 2.0, 3.0),
            state(0.5, -4.0, 2.5),
            state(3.0, 0.25, -1.5),
        ] {
            let (x, y, z) = (p.x(), p.y(), p.z());
            let f = model::lv_field(p);
            let cs = to_chart(Chart::U1, p).unwrap();
            let g = compactified_field(&cs);

            let dz1 = (f.y * x - y * f.x) / (x * x);
            let dz2 = (f.z * x - z * f.x) / (x * x);
            let dz3 = -f.x / (x * x);
            for (num, rescaled) in [(dz1, x * g.x), (dz2, x * g.y), (dz3, x * g.z)] {
                let scale = 1.0 + num.abs().max(rescaled.abs());
                assert!(
                    (num - rescaled).abs() / scale <= 1e-12,
                    "{num} vs {rescaled} at {p:?}"
                );
            }
        }
    }

    // U2 and U3 quotients obey the same logistic equation, confirming the
    // shared formula instead of duplicating it per chart.
    #[test]
    fn other_charts_reduce_to_the_same_system() {
        for p in [state(1.0, 2.0, 3.0), state(2.0, 0.5, 1.25)] {
            let (x, y, z) = (p.x(), p.y(), p.z());
            let f = model::lv_field(p);

            // U2: w1 = x/y, dividing by y, rescale dtau = y dt
            let w1 = x / y;
            let num = (f.x * y - x * f.y) / (y * y);
            let rhs = y * (2.0 * w1 * (1.0 - w1));
            assert!((num - rhs).abs() / (1.0 + rhs.abs()) <= 1e-12);

            // U3: w2 = y/z, dividing by z, rescale dtau = z dt
            let w2 = y / z;
            let num = (f.y * z - y * f.z) / (z * z);
            let rhs = z * (2.0 * w2 * (1.0 - w2));
            assert!((num - rhs).abs() / (1.0 + rhs.abs()) <= 1e-12);
        }
    }

    #[test]
    fn fitted_constants_at_reference_point() {
        let fc = fit_constants(&chart_state(0.5, 0.5, 1.0)).unwrap();
        assert_eq!(fc.alpha1, 1.0);
        assert_eq!(fc.alpha2, 1.0);
        assert!((fc.k3 - 2.0).abs() <= 1e-15);
    }

    #[test]
    fn fit_domain_edges() {
        assert!(matches!(
            fit_constants(&chart_state(0.0, 0.5, 1.0)),
            Err(Error::DegeneratePlaneOrbit { index: 1 })
        ));
        assert!(matches!(
            fit_constants(&chart_state(0.5, 0.0, 1.0)),
            Err(Error::DegeneratePlaneOrbit { index: 2 })
        ));
        assert!(matches!(
            fit_constants(&chart_state(-0.5, 0.5, 1.0)),
            Err(Error::NoRealConstants { index: 1 })
        ));
        // on the invariant plane the same sign pattern is representable
        let fc = fit_constants(&chart_state(-0.5, 0.5, 0.0)).unwrap();
        assert_eq!(fc.k3, 0.0);
        assert_eq!(fc.alpha1, -3.0);
    }

    #[test]
    fn closed_form_matches_frozen_values() {
        let fc = FlowConstants {
            alpha1: 1.0,
            alpha2: 1.0,
            k3: 2.0,
        };
        let at0 = closed_form_flow(&fc, 0.0).unwrap();
        assert_eq!(at0.z1(), 0.5);
        assert_eq!(at0.z2(), 0.5);
        assert!((at0.z3() - 1.0).abs() <= 1e-15);

        let at1 = closed_form_flow(&fc, 1.0).unwrap();
        assert!((at1.z1() - 0.8807970779778824).abs() <= 1e-14);
        assert!((at1.z2() - 0.8807970779778824).abs() <= 1e-14);
        assert!((at1.z3() - 0.6480542736638854).abs() <= 1e-14);
    }

    #[test]
    fn reconstruction_round_trip() {
        let cs0 = chart_state(0.25, 0.75, -2.0);
        let fc = fit_constants(&cs0).unwrap();
        let back = closed_form_flow(&fc, 0.0).unwrap();
        assert!((back.z1() - cs0.z1()).abs() <= 1e-12);
        assert!((back.z2() - cs0.z2()).abs() <= 1e-12);
        assert!((back.z3() - cs0.z3()).abs() <= 1e-12);
    }

    #[test]
    fn singular_time_is_reported() {
        let fc = FlowConstants {
            alpha1: -4.0,
            alpha2: 1.0,
            k3: 1.0,
        };
        match closed_form_flow(&fc, 0.0) {
            Err(Error::SingularFlow { t_critical }) => {
                assert!((t_critical - 0.5 * 4.0f64.ln()).abs() <= 1e-15);
            }
            other => panic!("expected singular flow, got {other:?}"),
        }
        // same constants evaluated past the pole are fine
        assert!(closed_form_flow(&fc, 1.0).is_ok());

        // on the plane only the pole itself is excluded
        let fc = FlowConstants {
            alpha1: -1.0,
            alpha2: 1.0,
            k3: 0.0,
        };
        assert!(matches!(
            closed_form_flow(&fc, 0.0),
            Err(Error::SingularFlow { .. })
        ));
        let past = closed_form_flow(&fc, 1.0).unwrap();
        assert_eq!(past.z3(), 0.0);
    }

    #[test]
    fn numeric_chart_flow_tracks_closed_form() {
        let cs0 = chart_state(0.5, 0.5, 1.0);
        let fc = fit_constants(&cs0).unwrap();
        let settings = IntegratorSettings::adaptive(1e-10, 1e-10).unwrap();
        let traj = integrate(
            compactified_field_at,
            state(cs0.z1(), cs0.z2(), cs0.z3()),
            3.0,
            &settings,
        );
        assert_eq!(traj.termination, Termination::Completed);
        for s in &traj.samples {
            let exact = closed_form_flow(&fc, s.t).unwrap();
            let dev = (s.state.coords() - exact.coords()).norm_inf();
            assert!(dev <= 1e-8, "deviation {dev} at t = {}", s.t);
        }
    }

    #[test]
    fn infinity_plane_is_invariant() {
        // z3 = 0 stays exactly zero: the field's third component vanishes
        let settings = IntegratorSettings::fixed(1e-2).unwrap();
        let traj = integrate(compactified_field_at, state(0.25, 0.8, 0.0), 2.0, &settings);
        for s in &traj.samples {
            assert_eq!(s.state.z(), 0.0);
        }
    }

    #[test]
    fn four_equilibria_at_infinity() {
        let eqs = infinity_equilibria();
        assert_eq!(eqs.len(), 4);
        for eq in &eqs {
            let (f1, f2) = infinity_field(eq.z1, eq.z2);
            assert_eq!(f1, 0.0);
            assert_eq!(f2, 0.0);
        }
        assert_eq!(eqs[0].kind, NodeKind::Repelling);
        assert_eq!(eqs[0].eigenvalues, (2.0, 2.0));
        assert_eq!(eqs[1].kind, NodeKind::Attracting);
        assert_eq!(eqs[1].eigenvalues, (-2.0, -2.0));
        assert_eq!(eqs[2].kind, NodeKind::Saddle);
        assert_eq!(eqs[2].eigenvalues, (2.0, -2.0));
        assert_eq!(eqs[3].kind, NodeKind::Saddle);
        assert_eq!(eqs[3].eigenvalues, (2.0, -2.0));
    }
}
