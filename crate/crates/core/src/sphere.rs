//! The quantizable sphere: points, charts, symplectic form, local potentials
//! and surface quadrature.
//!
//! Points live on the unit sphere in ℝ³. The symplectic form is
//! `ω = (k/2) sinθ dθ∧dφ` with `k = n/2π`, so `∫ω = n`. Two local
//! primitives of `ω` serve as connection frames of the prequantum bundle:
//!
//! * North: `α_N = (k/2)(1 − cosθ) dφ`, regular away from the south pole;
//! * South: `α_S = −(k/2)(1 + cosθ) dφ`, regular away from the north pole.
//!
//! They differ by `k dφ`, so section components in the two frames are
//! related by the single-valued factor `e^{inφ}`.

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::scalar::Real;
use crate::vec3::Vec3;

/// Default Gauss–Legendre order in `cosθ`; the φ direction uses twice as many
/// trapezoid nodes.
pub const DEFAULT_QUADRATURE_ORDER: usize = 64;

/// Tolerance on `|u·v|` for tangent-vector checks.
pub(crate) fn tangent_tol<T: Real>() -> T {
    T::lit(1e-10).max(T::epsilon() * T::lit(1e4))
}

/// A point of the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpherePoint<T> {
    u: Vec3<T>,
}

impl<T: Real> SpherePoint<T> {
    /// Projects `v` onto the sphere. Panics on the zero vector.
    pub fn new(v: Vec3<T>) -> Self {
        let n = v.norm();
        assert!(n > T::zero(), "cannot project the zero vector onto the sphere");
        Self { u: v * n.recip() }
    }

    pub fn from_spherical(theta: T, phi: T) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self {
            u: Vec3::new(st * cp, st * sp, ct),
        }
    }

    pub fn north_pole() -> Self {
        Self { u: Vec3::e_z() }
    }

    pub fn south_pole() -> Self {
        Self { u: -Vec3::e_z() }
    }

    #[inline]
    pub fn vec(&self) -> Vec3<T> {
        self.u
    }

    /// `(θ, φ)` with `θ ∈ [0, π]`, `φ ∈ [0, 2π)`; `φ = 0` where `sinθ < 1e-14`.
    pub fn spherical_coords(&self) -> (T, T) {
        let u = self.u;
        let rho = u.x.hypot(u.y);
        let theta = rho.atan2(u.z);
        if rho < T::lit(1e-14) {
            return (theta, T::zero());
        }
        let mut phi = u.y.atan2(u.x);
        if phi < T::zero() {
            phi = phi + T::two_pi();
        }
        if phi >= T::two_pi() {
            phi = T::zero();
        }
        (theta, phi)
    }

    /// The coordinate vector `∂/∂θ` at this point.
    pub fn d_theta(&self) -> Vec3<T> {
        let (theta, phi) = self.spherical_coords();
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Vec3::new(ct * cp, ct * sp, -st)
    }

    /// The coordinate vector `∂/∂φ` at this point (vanishes at the poles).
    pub fn d_phi(&self) -> Vec3<T> {
        Vec3::new(-self.u.y, self.u.x, T::zero())
    }

    /// Geodesic distance to `other`.
    pub fn angle_to(&self, other: &Self) -> T {
        self.u.cross(&other.u).norm().atan2(self.u.dot(&other.u))
    }
}

/// Which local frame of the prequantum bundle is active.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Chart {
    North,
    South,
}

impl Chart {
    pub fn other(self) -> Self {
        match self {
            Chart::North => Chart::South,
            Chart::South => Chart::North,
        }
    }
}

/// A chart tag together with the pole it excludes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChartFrame<T> {
    pub tag: Chart,
    pub excluded_pole: SpherePoint<T>,
}

impl<T: Real> ChartFrame<T> {
    pub fn north() -> Self {
        Self {
            tag: Chart::North,
            excluded_pole: SpherePoint::south_pole(),
        }
    }

    pub fn south() -> Self {
        Self {
            tag: Chart::South,
            excluded_pole: SpherePoint::north_pole(),
        }
    }

    pub fn of(tag: Chart) -> Self {
        match tag {
            Chart::North => Self::north(),
            Chart::South => Self::south(),
        }
    }
}

/// `dφ(v)` at `u`, written so that `(1 ∓ cosθ) dφ` can be formed without
/// dividing by `sin²θ`.
#[inline]
fn dphi_numerator<T: Real>(u: &Vec3<T>, v: &Vec3<T>) -> T {
    u.x * v.y - u.y * v.x
}

/// The coadjoint orbit sphere at quantization level `n` (`k = n/2π`).
#[derive(Clone, Debug)]
pub struct OrbitSphere<T> {
    n: i64,
    quadrature_order: usize,
    nodes: Vec<(Vec3<T>, T)>,
}

impl<T: Real> OrbitSphere<T> {
    pub fn new(n: i64) -> Result<Self> {
        Self::with_quadrature(n, DEFAULT_QUADRATURE_ORDER)
    }

    pub fn with_quadrature(n: i64, quadrature_order: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroLevel);
        }
        if quadrature_order == 0 {
            return Err(Error::InvalidParameter("quadrature order must be positive".into()));
        }
        let gl = GaussLegendre::<T>::new(quadrature_order);
        let n_phi = 2 * quadrature_order;
        let k = T::from_int(n) / T::two_pi();
        let dphi = T::two_pi() / T::from_usize(n_phi).unwrap();
        // ω = (k/2) d(cosθ) ∧ dφ up to orientation
        let scale = k * T::lit(0.5) * dphi;
        let mut nodes = Vec::with_capacity(quadrature_order * n_phi);
        for (&c, &w) in gl.nodes.iter().zip(&gl.weights) {
            let s = (T::one() - c * c).max(T::zero()).sqrt();
            for j in 0..n_phi {
                let phi = dphi * T::from_usize(j).unwrap();
                let (sp, cp) = phi.sin_cos();
                nodes.push((Vec3::new(s * cp, s * sp, c), w * scale));
            }
        }
        Ok(Self {
            n,
            quadrature_order,
            nodes,
        })
    }

    #[inline]
    pub fn n(&self) -> i64 {
        self.n
    }

    #[inline]
    pub fn n_real(&self) -> T {
        T::from_int(self.n)
    }

    /// `k = n / 2π`.
    #[inline]
    pub fn k(&self) -> T {
        self.n_real() / T::two_pi()
    }

    pub fn quadrature_order(&self) -> usize {
        self.quadrature_order
    }

    /// `ω_p(v, w) = (k/2) u·(v × w)`.
    pub fn omega_eval(&self, p: &SpherePoint<T>, v: &Vec3<T>, w: &Vec3<T>) -> Result<T> {
        check_tangent(p, v)?;
        check_tangent(p, w)?;
        Ok(self.omega_unchecked(&p.vec(), v, w))
    }

    #[inline]
    pub(crate) fn omega_unchecked(&self, u: &Vec3<T>, v: &Vec3<T>, w: &Vec3<T>) -> T {
        self.k() * T::lit(0.5) * u.dot(&v.cross(w))
    }

    /// The local primitive `α_frame(v)` of `ω` at `p`.
    pub fn potential_eval(&self, frame: &ChartFrame<T>, p: &SpherePoint<T>, v: &Vec3<T>) -> Result<T> {
        let u = p.vec();
        let gap = match frame.tag {
            Chart::North => T::one() + u.z,
            Chart::South => T::one() - u.z,
        };
        if gap < T::lit(1e-12) {
            return Err(Error::ExcludedPole { chart: frame.tag });
        }
        Ok(self.potential_unchecked(frame.tag, &u, v))
    }

    /// `α_N(v) = (k/2) (u_x v_y − u_y v_x)/(1 + u_z)` and
    /// `α_S(v) = −(k/2) (u_x v_y − u_y v_x)/(1 − u_z)`.
    #[inline]
    pub(crate) fn potential_unchecked(&self, chart: Chart, u: &Vec3<T>, v: &Vec3<T>) -> T {
        let half_k = self.k() * T::lit(0.5);
        let num = dphi_numerator(u, v);
        match chart {
            Chart::North => half_k * num / (T::one() + u.z),
            Chart::South => -half_k * num / (T::one() - u.z),
        }
    }

    /// `∫_M f ω` by Gauss–Legendre in `cosθ` times trapezoid in `φ`.
    pub fn integrate_over_sphere<F>(&self, f: F) -> T
    where
        F: Fn(&SpherePoint<T>) -> T,
    {
        self.integrate_vec(|u| f(&SpherePoint { u: *u }))
    }

    pub(crate) fn integrate_vec<F>(&self, f: F) -> T
    where
        F: Fn(&Vec3<T>) -> T,
    {
        // Sum per θ-ring first to keep the accumulation well conditioned.
        let n_phi = 2 * self.quadrature_order;
        self.nodes
            .chunks(n_phi)
            .map(|ring| ring.iter().map(|(u, w)| *w * f(u)).sum::<T>())
            .sum()
    }

    /// `∫_M ω = n`, evaluated by the same quadrature as everything else.
    pub fn total_area(&self) -> T {
        self.integrate_vec(|_| T::one())
    }

    /// `∫_M f ω / ∫_M ω`.
    pub fn mean<F>(&self, f: F) -> T
    where
        F: Fn(&Vec3<T>) -> T,
    {
        self.integrate_vec(f) / self.n_real()
    }
}

fn check_tangent<T: Real>(p: &SpherePoint<T>, v: &Vec3<T>) -> Result<()> {
    let r = v.dot(&p.vec()).abs();
    if r > tangent_tol::<T>() {
        return Err(Error::NotTangent {
            residual: r.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}
