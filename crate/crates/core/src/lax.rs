//! Isospectral matrix form of the flow.
//!
//! The coordinates assemble into the complex antisymmetric pair
//!
//! ```text
//!     [   0      x-y      z    ]        [   0      iz    i(x-y) ]
//! L = [ -(x-y)    0   i(x+y-z) ]    B = [ -iz       0      0    ]
//!     [  -z   -i(x+y-z)   0    ]        [ -i(x-y)   0      0    ]
//! ```
//!
//! and along the flow dL/dt = LB - BL entry by entry, so the spectrum of
//! L is constant on trajectories. The first nonvanishing trace power
//! satisfies tr L^2 = 4(H - C); tests recheck the derivation instead of
//! assuming it.

use crate::linalg::Vec3;
use crate::model;
use crate::poisson::State;
use num_complex::Complex64;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Dense complex 3x3 matrix, row major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat3(pub [[Complex64; 3]; 3]);

impl CMat3 {
    pub const ZERO: CMat3 = CMat3([[ZERO; 3]; 3]);

    pub fn mul(&self, o: &CMat3) -> CMat3 {
        let mut r = [[ZERO; 3]; 3];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                let mut acc = ZERO;
                for l in 0..3 {
                    acc += self.0[i][l] * o.0[l][j];
                }
                *slot = acc;
            }
        }
        CMat3(r)
    }

    pub fn add(&self, o: &CMat3) -> CMat3 {
        let mut r = [[ZERO; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                r[i][j] = self.0[i][j] + o.0[i][j];
            }
        }
        CMat3(r)
    }

    pub fn sub(&self, o: &CMat3) -> CMat3 {
        let mut r = [[ZERO; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                r[i][j] = self.0[i][j] - o.0[i][j];
            }
        }
        CMat3(r)
    }

    pub fn transpose(&self) -> CMat3 {
        let mut r = [[ZERO; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                r[i][j] = self.0[j][i];
            }
        }
        CMat3(r)
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0f64, |acc, e| acc.max(e.norm()))
    }
}

/// Build antisymmetric matrices of the shared shape from the three slot
/// values (0,1), (0,2), (1,2).
fn antisym(m01: Complex64, m02: Complex64, m12: Complex64) -> CMat3 {
    CMat3([
        [ZERO, m01, m02],
        [-m01, ZERO, m12],
        [-m02, -m12, ZERO],
    ])
}

pub fn lax_pair(p: State) -> (CMat3, CMat3) {
    let (x, y, z) = (p.x(), p.y(), p.z());
    let i = Complex64::i();
    let l = antisym(
        Complex64::new(x - y, 0.0),
        Complex64::new(z, 0.0),
        i * (x + y - z),
    );
    let b = antisym(i * z, i * (x - y), ZERO);
    (l, b)
}

/// Entrywise time derivative of L along the field: slot (0,1) holds
/// x - y so it moves at fx - fy, and so on.
fn derivative_along_field(f: Vec3) -> CMat3 {
    let i = Complex64::i();
    antisym(
        Complex64::new(f.x - f.y, 0.0),
        Complex64::new(f.z, 0.0),
        i * (f.x + f.y - f.z),
    )
}

/// Largest entry modulus of dL/dt - (LB - BL) at `p`; zero in exact
/// arithmetic.
pub fn lax_residual(p: State) -> f64 {
    let (l, b) = lax_pair(p);
    let ldot = derivative_along_field(model::lv_field(p));
    let commutator = l.mul(&b).sub(&b.mul(&l));
    ldot.sub(&commutator).max_abs()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralInvariant {
    /// tr L^2 as computed from the matrix.
    pub value: Complex64,
    /// The closed form 4(h - c) it must equal.
    pub reference: f64,
}

pub fn spectral_invariant(p: State) -> SpectralInvariant {
    let (l, _) = lax_pair(p);
    let inv = model::invariants(p);
    SpectralInvariant {
        value: l.mul(&l).trace(),
        reference: 4.0 * (inv.h - inv.c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::{integrate, IntegratorSettings, Termination};

    fn state(x: f64, y: f64, z: f64) -> State {
        State::new(x, y, z).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pair_at_probe_point() {
        let (l, b) = lax_pair(state(1.0, 2.0, 3.0));
        let l_expected = CMat3([
            [c(0.0, 0.0), c(-1.0, 0.0), c(3.0, 0.0)],
            [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            [c(-3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        let b_expected = CMat3([
            [c(0.0, 0.0), c(0.0, 3.0), c(0.0, -1.0)],
            [c(0.0, -3.0), c(0.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        assert_eq!(l, l_expected);
        assert_eq!(b, b_expected);
    }

    #[test]
    fn both_matrices_are_exactly_antisymmetric() {
        for p in [state(1.0, 2.0, 3.0), state(-0.5, 4.0, 2.25)] {
            let (l, b) = lax_pair(p);
            assert_eq!(l.add(&l.transpose()), CMat3::ZERO);
            assert_eq!(b.add(&b.transpose()), CMat3::ZERO);
        }
    }

    #[test]
    fn commutator_matches_derivative() {
        for p in [
            state(1.0, 2.0, 3.0),
            state(-2.0, 0.5, 1.5),
            state(4.0, -4.0, 0.25),
        ] {
            assert!(lax_residual(p) <= 1e-10, "residual at {p:?}");
        }
    }

    #[test]
    fn trace_identities_at_probe() {
        let (l, _) = lax_pair(state(1.0, 2.0, 3.0));
        assert_eq!(l.trace(), c(0.0, 0.0));
        let spec = spectral_invariant(state(1.0, 2.0, 3.0));
        assert_eq!(spec.value, c(-20.0, 0.0));
        assert_eq!(spec.reference, -20.0);
    }

    #[test]
    fn odd_trace_powers_vanish() {
        for p in [state(1.0, 2.0, 3.0), state(-3.0, 2.0, 5.0)] {
            let (l, _) = lax_pair(p);
            let l3 = l.mul(&l).mul(&l);
            assert!(l3.trace().norm() <= 1e-9);
        }
    }

    #[test]
    fn squared_trace_matches_closed_form() {
        for p in [
            state(1.0, 2.0, 3.0),
            state(0.3, -0.7, 9.0),
            state(-5.0, -5.0, -5.0),
        ] {
            let spec = spectral_invariant(p);
            let scale = 1.0 + spec.reference.abs();
            assert!((spec.value.re - spec.reference).abs() / scale <= 1e-12);
            assert!(spec.value.im.abs() / scale <= 1e-12);
        }
    }

    #[test]
    fn spectrum_is_constant_along_trajectories() {
        let settings = IntegratorSettings::adaptive(1e-10, 1e-10).unwrap();
        let traj = integrate(model::field_at, state(1.0, 2.0, 3.0), 0.1, &settings);
        assert_eq!(traj.termination, Termination::Completed);
        let first = spectral_invariant(traj.samples[0].state).value;
        for s in &traj.samples {
            let here = spectral_invariant(s.state).value;
            assert!((here - first).norm() <= 1e-8);
        }
    }
}
