//! The Lotka-Volterra vector field, its conserved quantities, and the
//! two-parameter family of Hamilton-Poisson realizations.
//!
//! H = xy - xz and C = -xy + yz are independent first integrals; C
//! generates a bracket under which H produces the field, and any
//! unimodular recombination (aC + bH, cC + dH) with ad - bc = 1 does the
//! same. Two polynomial combinations recur downstream: the sextic
//! f = CH(C + H), which factors through the coordinates, and the positive
//! semidefinite quartic g = (C^2 + H^2 + (C + H)^2)/2.

use crate::linalg::{outer, Mat3, Vec3};
use crate::poisson::{Quadratic, ScalarField, State};
use crate::{Error, Result};
use rand::Rng;

/// Right-hand side (-x(x - y - z), -y(-x + y - z), -z(-x - y + z)).
pub fn field_at(v: Vec3) -> Vec3 {
    Vec3::new(
        -v.x * (v.x - v.y - v.z),
        -v.y * (-v.x + v.y - v.z),
        -v.z * (-v.x - v.y + v.z),
    )
}

pub fn lv_field(p: State) -> Vec3 {
    field_at(p.coords())
}

/// H = xy - xz.
pub fn hamiltonian() -> Quadratic {
    Quadratic {
        cxy: 1.0,
        cxz: -1.0,
        label: "H = xy - xz".into(),
        ..Quadratic::default()
    }
}

/// C = -xy + yz.
pub fn casimir() -> Quadratic {
    Quadratic {
        cxy: -1.0,
        cyz: 1.0,
        label: "C = -xy + yz".into(),
        ..Quadratic::default()
    }
}

pub(crate) fn h_at(v: Vec3) -> f64 {
    v.x * v.y - v.x * v.z
}

pub(crate) fn c_at(v: Vec3) -> f64 {
    v.y * v.z - v.x * v.y
}

pub(crate) fn grad_h(v: Vec3) -> Vec3 {
    Vec3::new(v.y - v.z, v.x, -v.x)
}

pub(crate) fn grad_c(v: Vec3) -> Vec3 {
    Vec3::new(-v.y, v.z - v.x, v.y)
}

const HESS_H: Mat3 = Mat3([[0.0, 1.0, -1.0], [1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]);
const HESS_C: Mat3 = Mat3([[0.0, -1.0, 0.0], [-1.0, 0.0, 1.0], [0.0, 1.0, 0.0]]);

/// Conserved quadruple along the flow: the base pair h, c plus the
/// derived invariants f = ch(c + h) and g = (c^2 + h^2 + (c + h)^2)/2.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Invariants {
    pub h: f64,
    pub c: f64,
    pub f: f64,
    pub g: f64,
}

pub fn invariants(p: State) -> Invariants {
    invariants_at(p.coords())
}

pub(crate) fn invariants_at(v: Vec3) -> Invariants {
    let h = h_at(v);
    let c = c_at(v);
    let s = c + h;
    Invariants {
        h,
        c,
        f: c * h * s,
        g: 0.5 * (c * c + h * h + s * s),
    }
}

/// The sextic invariant evaluated from its coordinate factorization,
/// independent of h and c.
pub fn sextic_direct(p: State) -> f64 {
    let v = p.coords();
    v.x * v.y * v.z * (v.x - v.y) * (v.x - v.z) * (v.y - v.z)
}

/// The quartic invariant evaluated monomial by monomial, independent of
/// h and c.
pub fn quartic_direct(p: State) -> f64 {
    let (x, y, z) = (p.x(), p.y(), p.z());
    x * x * y * y - x * x * y * z - x * y * y * z + x * x * z * z - x * y * z * z + y * y * z * z
}

///(f_composed - f_direct, g_composed - g_direct) at `p`. Both vanish in
/// exact arithmetic; the residuals expose rounding only.
pub fn invariant_identity_residual(p: State) -> (f64, f64) {
    let inv = invariants(p);
    (inv.f - sextic_direct(p), inv.g - quartic_direct(p))
}

/// f = CH(C+H) as a scalar field with chain-rule derivatives.
#[derive(Clone, Copy, Debug, Default)]
pub struct SexticInvariant;

impl ScalarField for SexticInvariant {
    fn eval(&self, v: Vec3) -> f64 {
        let (h, c) = (h_at(v), c_at(v));
        c * h * (c + h)
    }

    fn grad(&self, v: Vec3) -> Vec3 {
        let (h, c) = (h_at(v), c_at(v));
        // df = (2ch + h^2) dC + (c^2 + 2ch) dH
        grad_c(v) * (2.0 * c * h + h * h) + grad_h(v) * (c * c + 2.0 * c * h)
    }

    fn hess(&self, v: Vec3) -> Mat3 {
        let (h, c) = (h_at(v), c_at(v));
        let (gh, gc) = (grad_h(v), grad_c(v));
        let s = c + h;
        // d2f = 2h dC dC + 2(c+h)(dC dH + dH dC) + 2c dH dH
        //       + (2ch + h^2) HC + (c^2 + 2ch) HH
        outer(gc, gc) * (2.0 * h)
            + (outer(gc, gh) + outer(gh, gc)) * (2.0 * s)
            + outer(gh, gh) * (2.0 * c)
            + HESS_C * (2.0 * c * h + h * h)
            + HESS_H * (c * c + 2.0 * c * h)
    }

    fn descriptor(&self) -> &str {
        "f = ch(c+h)"
    }
}

/// g = (C^2 + H^2 + (C+H)^2)/2 as a scalar field with chain-rule
/// derivatives.
#[derive(Clone, Copy, Debug, Default)]
pub struct QuarticInvariant;

impl ScalarField for QuarticInvariant {
    fn eval(&self, v: Vec3) -> f64 {
        let (h, c) = (h_at(v), c_at(v));
        let s = c + h;
        0.5 * (c * c + h * h + s * s)
    }

    fn grad(&self, v: Vec3) -> Vec3 {
        let (h, c) = (h_at(v), c_at(v));
        // dg = (2c + h) dC + (c + 2h) dH
        grad_c(v) * (2.0 * c + h) + grad_h(v) * (c + 2.0 * h)
    }

    fn hess(&self, v: Vec3) -> Mat3 {
        let (h, c) = (h_at(v), c_at(v));
        let (gh, gc) = (grad_h(v), grad_c(v));
        outer(gc, gc) * 2.0
            + outer(gc, gh)
            + outer(gh, gc)
            + outer(gh, gh) * 2.0
            + HESS_C * (2.0 * c + h)
            + HESS_H * (c + 2.0 * h)
    }

    fn descriptor(&self) -> &str {
        "g = (c^2 + h^2 + (c+h)^2)/2"
    }
}

/// Parameters (a, b; c, d) with ad - bc = 1 selecting the recombined
/// Casimir aC + bH and Hamiltonian cC + dH.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sl2Params {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl Sl2Params {
    pub const DET_TOL: f64 = 1e-12;

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let defect = (a * d - b * c - 1.0).abs();
        if !defect.is_finite() || defect > Self::DET_TOL {
            return Err(Error::NotUnimodular { defect });
        }
        Ok(Sl2Params { a, b, c, d })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// (aC + bH, cC + dH) written out as explicit quadratics:
    /// C_ab = (b - a)xy + a yz - b xz and H_cd = (d - c)xy + c yz - d xz.
    pub fn fields(&self) -> (Quadratic, Quadratic) {
        let casimir_ab = Quadratic {
            cxy: -self.a + self.b,
            cyz: self.a,
            cxz: -self.b,
            label: format!("C[a={}, b={}]", self.a, self.b),
            ..Quadratic::default()
        };
        let ham_cd = Quadratic {
            cxy: -self.c + self.d,
            cyz: self.c,
            cxz: -self.d,
            label: format!("H[c={}, d={}]", self.c, self.d),
            ..Quadratic::default()
        };
        (casimir_ab, ham_cd)
    }

    /// The tensor of the aC + bH bracket written out entrywise. Tests pin
    /// this against the generated form so the two routes stay in lockstep.
    pub fn tensor(&self, p: State) -> Mat3 {
        let (a, b) = (self.a, self.b);
        let (x, y, z) = (p.x(), p.y(), p.z());
        let m01 = -b * x + a * y;
        let m02 = (a - b) * x - a * z;
        let m12 = (-a + b) * y - b * z;
        Mat3([
            [0.0, m01, m02],
            [-m01, 0.0, m12],
            [-m02, -m12, 0.0],
        ])
    }

    /// Pi_{a,b} grad(H_{c,d}) - F at `p`; zero in exact arithmetic
    /// whenever ad - bc = 1.
    pub fn realization_residual(&self, p: State) -> Vec3 {
        let (_, ham_cd) = self.fields();
        let xh = self.tensor(p).mul_vec(ham_cd.grad(p.coords()));
        xh - lv_field(p)
    }

    /// Matrix product of two parameter sets; stays unimodular up to
    /// rounding, so the constructor re-validates.
    pub fn compose(&self, o: &Sl2Params) -> Result<Sl2Params> {
        Sl2Params::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

/// Draw parameters with a, b, c uniform on [-3, 3], resampling until
/// |a| >= 0.1, and d = (1 + bc)/a so the determinant is 1 up to rounding.
pub fn sample_sl2<R: Rng>(rng: &mut R) -> Sl2Params {
    loop {
        let a: f64 = rng.gen_range(-3.0..=3.0);
        if a.abs() < 0.1 {
            continue;
        }
        let b: f64 = rng.gen_range(-3.0..=3.0);
        let c: f64 = rng.gen_range(-3.0..=3.0);
        let d = (1.0 + b * c) / a;
        if let Ok(q) = Sl2Params::new(a, b, c, d) {
            return q;
        }
    }
}
