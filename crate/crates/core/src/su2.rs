//! Closed-form SU(2) data: group elements, the action on the orbit sphere,
//! invariant Hamiltonians and fields, and exact flows.
//!
//! Basis of 𝔰𝔲(2): `A = [[0, i], [i, 0]]`, `B = [[0, 1], [−1, 0]]`,
//! `Z = [[i, 0], [0, −i]]`. A point `g·η` of the orbit has spherical
//! coordinates read off from `x = cos(θ/2) e^{iφ₁}`, `y = sin(θ/2) e^{−iφ₂}`,
//! `φ = φ₁ − φ₂`; in Cartesian form `u = (2 Re xy, 2 Im xy, |x|² − |y|²)`.

use std::ops::Mul;

use num_complex::Complex;

use crate::dynamics::{reparametrize, HamiltonianLoop, TimeDepHamiltonian};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sphere::{OrbitSphere, SpherePoint};
use crate::vec3::Vec3;

/// `g = [[x, y], [−ȳ, x̄]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SU2Element<T> {
    pub x: Complex<T>,
    pub y: Complex<T>,
}

impl<T: Real> SU2Element<T> {
    pub fn new(x: Complex<T>, y: Complex<T>) -> Self {
        Self { x, y }
    }

    pub fn identity() -> Self {
        Self::new(Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero()))
    }

    /// `|x|² + |y|²`, which is also the determinant.
    pub fn det(&self) -> T {
        self.x.norm_sqr() + self.y.norm_sqr()
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.x.conj(), -self.y)
    }

    /// Element representing the point `p` (`φ₂ = 0` branch).
    pub fn representative(p: &SpherePoint<T>) -> Self {
        let (theta, phi) = p.spherical_coords();
        let half = theta * T::lit(0.5);
        Self::new(Complex::from_polar(half.cos(), phi), Complex::new(half.sin(), T::zero()))
    }

    /// Projection `SU(2) → S²`, `g ↦ g·η`.
    pub fn orbit_point(&self) -> SpherePoint<T> {
        let xy = self.x * self.y;
        let two = T::lit(2.0);
        SpherePoint::new(Vec3::new(two * xy.re, two * xy.im, self.x.norm_sqr() - self.y.norm_sqr()))
    }

    /// The SO(3) matrix of the induced rotation (row-major).
    pub fn rotation_matrix(&self) -> [[T; 3]; 3] {
        // (x, ȳ) transforms by U = [[a, −b], [b̄, ā]] under left
        // multiplication by g = [[a, b], [−b̄, ā]]; images of spinors for
        // e_x, e_y, e_z give the columns.
        let (a, b) = (self.x, self.y);
        let s = T::lit(0.5).sqrt();
        let zero = Complex::new(T::zero(), T::zero());
        let one = Complex::new(T::one(), T::zero());
        let basis = [
            (one * s, one * s),
            (one * s, Complex::new(T::zero(), -s)),
            (one, zero),
        ];
        let mut r = [[T::zero(); 3]; 3];
        for (col, (p, q)) in basis.into_iter().enumerate() {
            let xi1 = a * p - b * q;
            let xi2 = b.conj() * p + a.conj() * q;
            let c = xi1 * xi2.conj();
            let two = T::lit(2.0);
            r[0][col] = two * c.re;
            r[1][col] = two * c.im;
            r[2][col] = xi1.norm_sqr() - xi2.norm_sqr();
        }
        r
    }
}

impl<T: Real> Mul for SU2Element<T> {
    type Output = Self;
    fn mul(self, h: Self) -> Self {
        Self::new(self.x * h.x - self.y * h.y.conj(), self.x * h.y + self.y * h.x.conj())
    }
}

/// `aA + bB + zZ ∈ 𝔰𝔲(2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlgebraDirection<T> {
    pub a: T,
    pub b: T,
    pub z: T,
}

impl<T: Real> AlgebraDirection<T> {
    pub fn new(a: T, b: T) -> Self {
        Self { a, b, z: T::zero() }
    }

    pub fn with_z(a: T, b: T, z: T) -> Self {
        Self { a, b, z }
    }

    pub fn a_axis() -> Self {
        Self::new(T::one(), T::zero())
    }

    pub fn b_axis() -> Self {
        Self::new(T::zero(), T::one())
    }

    /// Unit direction `(cos β, sin β)` in the `A, B` plane.
    pub fn from_angle(beta: T) -> Self {
        let (s, c) = beta.sin_cos();
        Self::new(c, s)
    }

    pub fn norm(&self) -> T {
        (self.a * self.a + self.b * self.b + self.z * self.z).sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self::with_z(self.a / n, self.b / n, self.z / n)
    }

    /// Phase `α` of `ε = (b + ai)/|b + ai|`.
    pub fn alpha(&self) -> T {
        self.a.atan2(self.b)
    }

    /// `w` with `−h_dir = k w·u`; the invariant field is `2 u × w`.
    pub fn axis_vector(&self) -> Vec3<T> {
        Vec3::new(self.a, -self.b, -self.z)
    }
}

/// `exp(t(aA + bB + zZ)) = cos r·I + (sin r / r)·t(aA + bB + zZ)`, `r = |t|·|dir|`.
pub fn exp_su2<T: Real>(dir: &AlgebraDirection<T>, t: T) -> SU2Element<T> {
    let r = (t * dir.norm()).abs();
    if r == T::zero() {
        return SU2Element::identity();
    }
    let s = r.sin() / r * t;
    SU2Element::new(Complex::new(r.cos(), dir.z * s), Complex::new(dir.b * s, dir.a * s))
}

/// Coadjoint action `p ↦ g·p`.
pub fn act<T: Real>(g: &SU2Element<T>, p: &SpherePoint<T>) -> SpherePoint<T> {
    let r = g.rotation_matrix();
    let u = p.vec();
    let row = |i: usize| r[i][0] * u.x + r[i][1] * u.y + r[i][2] * u.z;
    SpherePoint::new(Vec3::new(row(0), row(1), row(2)))
}

/// `h_dir = a·h_A + b·h_B + z·h_Z = k(−a u_x + b u_y + z u_z)`, zero mean.
pub fn invariant_hamiltonian<T: Real>(m: &OrbitSphere<T>, dir: &AlgebraDirection<T>) -> TimeDepHamiltonian<T> {
    let w = dir.axis_vector() * (-m.k());
    TimeDepHamiltonian::linear(format!("h({}, {}, {})", dir.a, dir.b, dir.z), w).mark_normalized()
}

/// `X_dir(p) = 2 u × w`, the generator of `t ↦ exp(t·dir)·p`.
pub fn invariant_field<T: Real>(_m: &OrbitSphere<T>, dir: &AlgebraDirection<T>, p: &SpherePoint<T>) -> Vec3<T> {
    p.vec().cross(&dir.axis_vector()) * T::lit(2.0)
}

/// `χ_t(p) = exp(t·dir)·p`.
pub fn closed_form_flow<T: Real>(dir: &AlgebraDirection<T>, t: T, p: &SpherePoint<T>) -> SpherePoint<T> {
    act(&exp_su2(dir, t), p)
}

/// The one-parameter subgroup `t ↦ exp(πt·dir)`, `t ∈ [0, 1]`, generated by
/// `π·(−h_dir)`. Requires a unit direction.
pub fn invariant_loop<T: Real>(m: &OrbitSphere<T>, dir: &AlgebraDirection<T>) -> Result<HamiltonianLoop<T>> {
    let norm = dir.norm();
    if (norm - T::one()).abs() > T::lit(1e-9).max(T::epsilon() * T::lit(100.0)) {
        return Err(Error::InvalidParameter(format!("direction must be a unit vector, |dir| = {norm}")));
    }
    let minus_h = invariant_hamiltonian(m, dir).scaled(-T::one()).with_span(T::PI());
    let f = reparametrize(&minus_h, T::PI())?.with_label(format!("subgroup({}, {}, {})", dir.a, dir.b, dir.z));
    Ok(HamiltonianLoop::new(f))
}
