//! Poisson tensors generated by a scalar function on R^3.
//!
//! A generator G defines the bracket {f, g} = grad G . (grad f x grad g).
//! The matching tensor acts as Pi v = v x grad G, entrywise
//!
//! ```text
//!        [    0    G_z  -G_y ]
//! Pi  =  [ -G_z     0    G_x ]
//!        [  G_y   -G_x    0  ]
//! ```
//!
//! so Pi grad G = grad G x grad G = 0 identically: the generator is a
//! Casimir of its own bracket, and the Jacobi identity holds for free in
//! three dimensions because the cyclic sum telescopes over the hat map.

use crate::linalg::{Mat3, Vec3};
use crate::{Error, Result};

/// Phase-space point; construction rejects non-finite components so the
/// rest of the crate can assume finiteness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct State {
    x: f64,
    y: f64,
    z: f64,
}

impl State {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() && z.is_finite() {
            Ok(State { x, y, z })
        } else {
            Err(Error::NonFinite {
                context: "state",
                x,
                y,
                z,
            })
        }
    }

    pub fn origin() -> Self {
        State {
            x: 0.0,
            y: 0.0,
            z: 0.0,
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn coords(&self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }
}

impl From<State> for Vec3 {
    fn from(p: State) -> Vec3 {
        p.coords()
    }
}

/// Scalar field with closed-form first and second derivatives.
pub trait ScalarField {
    fn eval(&self, p: Vec3) -> f64;
    fn grad(&self, p: Vec3) -> Vec3;
    fn hess(&self, p: Vec3) -> Mat3;
    /// Human-readable tag used in reports.
    fn descriptor(&self) -> &str;
}

/// Polynomial of total degree at most two with explicit coefficients:
/// cxx x^2 + cyy y^2 + czz z^2 + cxy xy + cxz xz + cyz yz + cx x + cy y + cz z + c0.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Quadratic {
    pub cxx: f64,
    pub cyy: f64,
    pub czz: f64,
    pub cxy: f64,
    pub cxz: f64,
    pub cyz: f64,
    pub cx: f64,
    pub cy: f64,
    pub cz: f64,
    pub c0: f64,
    pub label: String,
}

impl ScalarField for Quadratic {
    fn eval(&self, p: Vec3) -> f64 {
        self.cxx * p.x * p.x
            + self.cyy * p.y * p.y
            + self.czz * p.z * p.z
            + self.cxy * p.x * p.y
            + self.cxz * p.x * p.z
            + self.cyz * p.y * p.z
            + self.cx * p.x
            + self.cy * p.y
            + self.cz * p.z
            + self.c0
    }

    fn grad(&self, p: Vec3) -> Vec3 {
        Vec3::new(
            2.0 * self.cxx * p.x + self.cxy * p.y + self.cxz * p.z + self.cx,
            2.0 * self.cyy * p.y + self.cxy * p.x + self.cyz * p.z + self.cy,
            2.0 * self.czz * p.z + self.cxz * p.x + self.cyz * p.y + self.cz,
        )
    }

    fn hess(&self, _p: Vec3) -> Mat3 {
        Mat3([
            [2.0 * self.cxx, self.cxy, self.cxz],
            [self.cxy, 2.0 * self.cyy, self.cyz],
            [self.cxz, self.cyz, 2.0 * self.czz],
        ])
    }

    fn descriptor(&self) -> &str {
        &self.label
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// The coordinate function along `axis` as a degenerate quadratic.
pub fn coordinate(axis: Axis) -> Quadratic {
    let mut q = Quadratic::default();
    match axis {
        Axis::X => {
            q.cx = 1.0;
            q.label = "x".into();
        }
        Axis::Y => {
            q.cy = 1.0;
            q.label = "y".into();
        }
        Axis::Z => {
            q.cz = 1.0;
            q.label = "z".into();
        }
    }
    q
}

/// Antisymmetric tensor whose action is v -> v x g.
fn tensor_from_grad(g: Vec3) -> Mat3 {
    Mat3([
        [0.0, g.z, -g.y],
        [-g.z, 0.0, g.x],
        [g.y, -g.x, 0.0],
    ])
}

/// Poisson tensor of `gen` evaluated at `p`.
pub fn tensor_from_generator(gen: &dyn ScalarField, p: State) -> Mat3 {
    tensor_from_grad(gen.grad(p.coords()))
}

/// Bracket {f, g} = grad gen . (grad f x grad g) at `p`.
pub fn bracket(gen: &dyn ScalarField, f: &dyn ScalarField, g: &dyn ScalarField, p: State) -> f64 {
    let v = p.coords();
    gen.grad(v).dot(f.grad(v).cross(g.grad(v)))
}

/// Hamiltonian vector field Pi grad(ham) at `p`.
pub fn ham_vector_field(gen: &dyn ScalarField, ham: &dyn ScalarField, p: State) -> Vec3 {
    let v = p.coords();
    tensor_from_grad(gen.grad(v)).mul_vec(ham.grad(v))
}

/// Residual Pi grad(gen); zero in exact arithmetic for every generator.
pub fn casimir_residual(gen: &dyn ScalarField, p: State) -> Vec3 {
    let g = gen.grad(p.coords());
    tensor_from_grad(g).mul_vec(g)
}

/// Worst Jacobi-identity violation at `p`:
/// max over (i,j,k) of |sum_cyc sum_l Pi^{il} d_l Pi^{jk}|.
///
/// Because Pi is the hat map of grad gen, the partial d_l Pi has the same
/// antisymmetric structure built from column l of the Hessian.
pub fn jacobiator(gen: &dyn ScalarField, p: State) -> f64 {
    let v = p.coords();
    let pi = tensor_from_grad(gen.grad(v));
    let hess = gen.hess(v);

    let mut dpi = [Mat3::ZERO; 3];
    for (l, slot) in dpi.iter_mut().enumerate() {
        *slot = tensor_from_grad(hess.col(l));
    }

    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let mut s = 0.0;
                for l in 0..3 {
                    s += pi[(i, l)] * dpi[l][(j, k)]
                        + pi[(j, l)] * dpi[l][(k, i)]
                        + pi[(k, l)] * dpi[l][(i, j)];
                }
                worst = worst.max(s.abs());
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model;

    #[test]
    fn state_rejects_non_finite() {
        assert!(State::new(f64::NAN, 0.0, 0.0).is_err());
        assert!(State::new(0.0, f64::INFINITY, 0.0).is_err());
        assert!(State::new(1.0, 2.0, 3.0).is_ok());
    }

    #[test]
    fn casimir_tensor_at_probe_point() {
        let p = State::new(1.0, 2.0, 3.0).unwrap();
        let pi = tensor_from_generator(&model::casimir(), p);
        let expected = Mat3([[0.0, 2.0, -2.0], [-2.0, 0.0, -2.0], [2.0, 2.0, 0.0]]);
        assert_eq!(pi, expected);
    }

    #[test]
    fn tensor_is_exactly_antisymmetric() {
        let p = State::new(-3.5, 0.25, 7.0).unwrap();
        let pi = tensor_from_generator(&model::casimir(), p);
        assert_eq!(pi.transpose(), -pi);
        for i in 0..3 {
            assert_eq!(pi[(i, i)], 0.0);
        }
    }

    #[test]
    fn generator_annihilated_exactly() {
        for p in [
            State::new(1.0, 2.0, 3.0).unwrap(),
            State::new(-0.5, 4.25, -9.0).unwrap(),
            State::origin(),
        ] {
            let r = casimir_residual(&model::casimir(), p);
            assert_eq!(r, Vec3::ZERO);
        }
    }

    #[test]
    fn coordinate_brackets_match_tensor_entries() {
        let gen = model::casimir();
        let p = State::new(1.5, -2.0, 0.75).unwrap();
        let pi = tensor_from_generator(&gen, p);
        let axes = [coordinate(Axis::X), coordinate(Axis::Y), coordinate(Axis::Z)];
        for (i, fi) in axes.iter().enumerate() {
            for (j, fj) in axes.iter().enumerate() {
                let b = bracket(&gen, fi, fj, p);
                assert!(
                    (b - pi[(i, j)]).abs() <= 1e-12,
                    "{{x{i}, x{j}}} = {b}, tensor entry {}",
                    pi[(i, j)]
                );
            }
        }
    }

    #[test]
    fn bracket_is_exactly_antisymmetric_and_alternating() {
        let gen = model::casimir();
        let f = model::hamiltonian();
        let g = Quadratic {
            cxx: 0.5,
            cyz: -2.0,
            cy: 1.0,
            label: "test".into(),
            ..Quadratic::default()
        };
        let p = State::new(0.3, -1.7, 2.2).unwrap();
        assert_eq!(bracket(&gen, &f, &g, p), -bracket(&gen, &g, &f, p));
        assert_eq!(bracket(&gen, &f, &f, p), 0.0);
    }

    #[test]
    fn hamiltonian_field_realizes_flow_at_probe() {
        let p = State::new(1.0, 2.0, 3.0).unwrap();
        let xh = ham_vector_field(&model::casimir(), &model::hamiltonian(), p);
        assert_eq!(xh, Vec3::new(4.0, 4.0, 0.0));
        assert_eq!(xh, model::lv_field(p));
    }

    #[test]
    fn jacobiator_vanishes_for_quadratic_generators() {
        let gens = [
            model::casimir(),
            model::hamiltonian(),
            Quadratic {
                cxx: 1.25,
                cyy: -0.5,
                czz: 3.0,
                cxy: 0.7,
                cxz: -1.1,
                cyz: 2.3,
                cx: 0.1,
                cy: -4.0,
                cz: 0.9,
                c0: 5.0,
                label: "generic".into(),
            },
        ];
        for gen in &gens {
            for p in [
                State::new(1.0, 2.0, 3.0).unwrap(),
                State::new(-8.0, 0.0, 5.5).unwrap(),
            ] {
                assert!(jacobiator(gen, p) <= 1e-9);
            }
        }
    }
}
