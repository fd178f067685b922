//! The energy-Casimir image and its stratification.
//!
//! The joint map p -> (h, c) = (H(p), C(p)) is onto R^2, and the plane
//! splits into nine strata by the exact signs of c, h, and c + h: three
//! open sectors with their two boundary rays each, plus the origin.
//! Classification is by exact comparison; callers decide if and how to
//! snap nearly-zero inputs beforehand.

use crate::equilibria::Family;
use crate::model;
use crate::poisson::State;
use crate::{Error, Result};

/// A value (h, c) of the joint energy-Casimir map.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct ECValue {
    pub h: f64,
    pub c: f64,
}

impl ECValue {
    pub fn new(h: f64, c: f64) -> Result<Self> {
        if h.is_finite() && c.is_finite() {
            Ok(ECValue { h, c })
        } else {
            Err(Error::NonFinite {
                context: "energy-casimir value",
                x: h,
                y: c,
                z: 0.0,
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Stratum {
    Sigma1Left,
    Sigma1Star,
    Sigma1Right,
    Sigma2,
    Sigma0,
    Sigma0Right,
    Sigma3Left,
    Sigma3Star,
    Sigma3Right,
}

impl std::fmt::Display for Stratum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stratum::Sigma1Left => "Sigma1Left",
            Stratum::Sigma1Star => "Sigma1Star",
            Stratum::Sigma1Right => "Sigma1Right",
            Stratum::Sigma2 => "Sigma2",
            Stratum::Sigma0 => "Sigma0",
            Stratum::Sigma0Right => "Sigma0Right",
            Stratum::Sigma3Left => "Sigma3Left",
            Stratum::Sigma3Star => "Sigma3Star",
            Stratum::Sigma3Right => "Sigma3Right",
        };
        f.write_str(s)
    }
}

impl Stratum {
    /// The three strata carrying equilibria off the generic pattern, plus
    /// the origin.
    pub fn is_starred(self) -> bool {
        matches!(self, Stratum::Sigma1Star | Stratum::Sigma2 | Stratum::Sigma3Star)
    }
}

/// Evaluate the joint map at a phase-space point.
pub fn ec(p: State) -> ECValue {
    let inv = model::invariants(p);
    ECValue { h: inv.h, c: inv.c }
}

/// Exact-sign classification of (h, c).
pub fn classify(v: ECValue) -> Stratum {
    if v.c > 0.0 {
        if v.h < 0.0 {
            Stratum::Sigma1Left
        } else if v.h == 0.0 {
            Stratum::Sigma1Star
        } else {
            Stratum::Sigma1Right
        }
    } else if v.c == 0.0 {
        if v.h < 0.0 {
            Stratum::Sigma2
        } else if v.h == 0.0 {
            Stratum::Sigma0
        } else {
            Stratum::Sigma0Right
        }
    } else {
        let s = v.c + v.h;
        if s < 0.0 {
            Stratum::Sigma3Left
        } else if s == 0.0 {
            Stratum::Sigma3Star
        } else {
            Stratum::Sigma3Right
        }
    }
}

/// Image of an equilibrium family member, from the closed forms
/// E1 -> (0, M^2), E2 -> (-M^2, 0), E3 -> (M^2, -M^2).
pub fn equilibrium_image(family: Family, m: f64) -> ECValue {
    let m2 = m * m;
    match family {
        Family::E1 => ECValue { h: 0.0, c: m2 },
        Family::E2 => ECValue { h: -m2, c: 0.0 },
        Family::E3 => ECValue { h: m2, c: -m2 },
    }
}

/// Geometry of a symplectic leaf {C = c}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum LeafType {
    /// y(z - x) = c with c != 0.
    HyperbolicCylinder,
    /// The degenerate level {y = 0} union {z = x}.
    PairOfPlanes,
}

pub fn leaf_type(c: f64) -> LeafType {
    if c == 0.0 {
        LeafType::PairOfPlanes
    } else {
        LeafType::HyperbolicCylinder
    }
}

/// An explicit preimage of `v` under the joint map, proving surjectivity
/// pointwise.
///
/// For h != 0 set x = t and impose y - z = h/t, which pins h = x(y - z);
/// c = y(z - x) then reads y^2 - sy - c = 0 with s = t + h/t, solved by
/// the root y = (s + sqrt(s^2 + 4c))/2, z = y - h/t. Doubling t from 1
/// makes the discriminant s^2 + 4c eventually nonnegative. For h = 0 and
/// c != 0 the point (0, sqrt|c|, c/sqrt|c|) works; (0, 0) maps to the
/// origin.
pub fn fiber_seed(v: ECValue) -> State {
    if v.h == 0.0 && v.c == 0.0 {
        return State::origin();
    }
    if v.h == 0.0 {
        // x = 0 makes h = 0 automatic and c = yz
        let y = v.c.abs().sqrt();
        return State::new(0.0, y, v.c / y).expect("finite seed");
    }
    let mut t = 1.0f64;
    loop {
        let s = t + v.h / t;
        let disc = s * s + 4.0 * v.c;
        if disc >= 0.0 {
            let y = (s + disc.sqrt()) / 2.0;
            let z = y - v.h / t;
            return State::new(t, y, z).expect("finite seed");
        }
        t *= 2.0;
    }
}

/// Nonnegative weights on the generators (0,1), (-1,0), (1,-1) writing
/// (h, c) as w1 (0,1) + w2 (-1,0) + w3 (1,-1); h = w3 - w2, c = w1 - w3.
pub fn convex_generation_witness(v: ECValue) -> [f64; 3] {
    let w3 = v.h.max(-v.c).max(0.0);
    [v.c + w3, w3 - v.h, w3]
}
