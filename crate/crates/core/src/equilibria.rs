//! The three equilibrium lines of the flow and their spectral data.
//!
//! Every equilibrium lies on one of the lines (0, M, M), (M, 0, M),
//! (M, M, 0). Along each line the Jacobian has characteristic polynomial
//! lambda^3 - 4 M^2 lambda, hence eigenvalues {-2|M|, 0, 2|M|}: a zero
//! eigenvalue is structural (the line itself is a curve of equilibria),
//! and for M != 0 the positive eigenvalue forces instability. At M = 0
//! the spectrum degenerates to {0, 0, 0} and instability follows from
//! the unstable equilibria accumulating at the origin.

use crate::linalg::{Mat3, Vec3};
use crate::poisson::State;
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Family {
    E1,
    E2,
    E3,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::E1 => write!(f, "E1"),
            Family::E2 => write!(f, "E2"),
            Family::E3 => write!(f, "E3"),
        }
    }
}

/// The member of `family` at parameter `m`.
pub fn equilibrium(family: Family, m: f64) -> Result<State> {
    match family {
        Family::E1 => State::new(0.0, m, m),
        Family::E2 => State::new(m, 0.0, m),
        Family::E3 => State::new(m, m, 0.0),
    }
}

/// Derivative of the field at `p`, row i = gradient of component i.
pub fn jacobian(p: State) -> Mat3 {
    let (x, y, z) = (p.x(), p.y(), p.z());
    Mat3([
        [-2.0 * x + y + z, x, x],
        [y, x - 2.0 * y + z, y],
        [z, z, x + y - 2.0 * z],
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Unstable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Justification {
    /// A strictly positive eigenvalue exists (M != 0).
    PositiveEigenvalue,
    /// Degenerate spectrum {0,0,0}; unstable equilibria accumulate at the
    /// point (M = 0).
    NearbyUnstableEquilibria,
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct StabilityReport {
    pub family: Family,
    pub m: f64,
    pub point: [f64; 3],
    /// Monic cubic coefficients [c2, c1, c0] of
    /// lambda^3 + c2 lambda^2 + c1 lambda + c0.
    pub char_poly: [f64; 3],
    /// Ascending; always {-2|M|, 0, 2|M|}.
    pub eigenvalues: [f64; 3],
    pub hyperbolic: bool,
    pub verdict: Verdict,
    pub justification: Justification,
}

pub fn stability_report(family: Family, m: f64) -> Result<StabilityReport> {
    let point = equilibrium(family, m)?;
    let j = jacobian(point);

    // Monic characteristic polynomial from trace, principal minors, det.
    let c2 = -j.trace();
    let c1 = j.principal_minors_sum();
    let c0 = -j.det();

    // On the equilibrium lines c2 and c0 vanish identically, so the
    // spectrum is {0} plus the roots of lambda^2 + c1.
    let disc = (c2 * c2 - 4.0 * c1).max(0.0).sqrt();
    let r_neg = (-c2 - disc) / 2.0;
    let r_pos = (-c2 + disc) / 2.0;
    let mut eigenvalues = [r_neg, 0.0, r_pos];
    eigenvalues.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));

    let hyperbolic = eigenvalues.iter().all(|e| e.abs() > 0.0);
    let justification = if m == 0.0 {
        Justification::NearbyUnstableEquilibria
    } else {
        Justification::PositiveEigenvalue
    };

    Ok(StabilityReport {
        family,
        m,
        point: point.coords().as_array(),
        char_poly: [c2, c1, c0],
        eigenvalues,
        hyperbolic,
        verdict: Verdict::Unstable,
        justification,
    })
}

/// Identify which family a point belongs to, within `tol` in the
/// infinity norm. The families intersect at the origin; E1 wins ties.
pub fn is_equilibrium(p: State, tol: f64) -> Option<(Family, f64)> {
    let v = p.coords();
    let candidates = [
        (Family::E1, (v.y + v.z) / 2.0),
        (Family::E2, (v.x + v.z) / 2.0),
        (Family::E3, (v.x + v.y) / 2.0),
    ];
    for (family, m) in candidates {
        let target = match family {
            Family::E1 => Vec3::new(0.0, m, m),
            Family::E2 => Vec3::new(m, 0.0, m),
            Family::E3 => Vec3::new(m, m, 0.0),
        };
        if (v - target).norm_inf() <= tol {
            return Some((family, m));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::lv_field;

    #[test]
    fn jacobian_at_unit_e1_member() {
        let p = equilibrium(Family::E1, 1.0).unwrap();
        let expected = Mat3([[2.0, 0.0, 0.0], [1.0, -1.0, 1.0], [1.0, 1.0, -1.0]]);
        assert_eq!(jacobian(p), expected);
    }

    #[test]
    fn family_members_are_exact_zeros_of_the_field() {
        let mut m = -10.0;
        while m <= 10.0 {
            for family in [Family::E1, Family::E2, Family::E3] {
                let p = equilibrium(family, m).unwrap();
                assert_eq!(lv_field(p), Vec3::ZERO, "{family} at M = {m}");
            }
            m += 0.5;
        }
    }

    #[test]
    fn characteristic_polynomial_is_exact_on_the_grid() {
        let mut m = -10.0f64;
        while m <= 10.0 {
            for family in [Family::E1, Family::E2, Family::E3] {
                let r = stability_report(family, m).unwrap();
                // lambda^3 - 4 M^2 lambda, exactly representable on this grid
                assert_eq!(r.char_poly[0], 0.0);
                assert_eq!(r.char_poly[1], -4.0 * m * m);
                assert_eq!(r.char_poly[2], 0.0);
            }
            m += 0.5;
        }
    }

    #[test]
    fn spectrum_shape_and_verdict() {
        let r = stability_report(Family::E2, 5.0).unwrap();
        assert_eq!(r.eigenvalues, [-10.0, 0.0, 10.0]);
        assert!(!r.hyperbolic);
        assert_eq!(r.verdict, Verdict::Unstable);
        assert_eq!(r.justification, Justification::PositiveEigenvalue);

        let r = stability_report(Family::E1, -2.0).unwrap();
        assert_eq!(r.eigenvalues, [-4.0, 0.0, 4.0]);
        assert_eq!(r.point, [0.0, -2.0, -2.0]);
    }

    #[test]
    fn origin_report_uses_the_accumulation_argument() {
        for family in [Family::E1, Family::E2, Family::E3] {
            let r = stability_report(family, 0.0).unwrap();
            assert_eq!(r.eigenvalues, [0.0, 0.0, 0.0]);
            assert!(!r.hyperbolic);
            assert_eq!(r.verdict, Verdict::Unstable);
            assert_eq!(r.justification, Justification::NearbyUnstableEquilibria);
        }
    }

    #[test]
    fn membership_detection() {
        let p = State::new(0.0, 2.0, 2.0).unwrap();
        assert_eq!(is_equilibrium(p, 1e-9), Some((Family::E1, 2.0)));

        let p = State::new(1e-9, 1.0, 1.0).unwrap();
        assert_eq!(is_equilibrium(p, 1e-6), Some((Family::E1, 1.0)));

        let p = State::new(1.0, 2.0, 3.0).unwrap();
        assert_eq!(is_equilibrium(p, 1e-6), None);

        // The origin belongs to all three lines; E1 claims it.
        assert_eq!(
            is_equilibrium(State::origin(), 0.0),
            Some((Family::E1, 0.0))
        );
    }
}
