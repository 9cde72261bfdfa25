//! Families of Hamiltonian loops: the 1-form Ω, the κ-derivative identity,
//! and winding numbers of `s ↦ κ(φ^s)` over closed families.

use std::sync::Arc;

use rayon::prelude::*;

use crate::dynamics::{field_at, HamiltonianLoop, MeanTable, ScalarField, TimeDepHamiltonian};
use crate::error::{Error, Result};
use crate::holonomy::{transport_phase, TransportOptions};
use crate::ode::{self, OdeOptions, OdeSystem};
use crate::points::fibonacci_sphere;
use crate::quadrature::GaussLegendre;
use crate::scalar::Real;
use crate::sphere::{OrbitSphere, SpherePoint};
use crate::su2::{invariant_loop, AlgebraDirection};
use crate::vec3::Vec3;

pub type LoopAt<T> = Arc<dyn Fn(T) -> Result<HamiltonianLoop<T>> + Send + Sync>;
/// `(s, t, u) ↦ ∂f^s_t/∂s (u)`.
pub type FamilyDerivative<T> = Arc<dyn Fn(T, T, &Vec3<T>) -> T + Send + Sync>;

pub const DEFAULT_H_S: f64 = 1e-4;
/// Adjacent samples of the κ-phase may differ by less than this (revolutions).
pub const UNWRAP_THRESHOLD: f64 = 0.25;
pub const MAX_UNWRAP_SAMPLES: usize = 1 << 14;

/// An `s`-parametrized family of loops, `s ∈ [0, 1]`.
#[derive(Clone)]
pub struct LoopFamily<T> {
    loop_at: LoopAt<T>,
    s_deriv: Option<FamilyDerivative<T>>,
    pub closed: bool,
    /// Pass every `f^s` through `normalize` before use.
    pub normalize: bool,
    pub h_s: T,
    pub label: String,
}

impl<T: Real> std::fmt::Debug for LoopFamily<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LoopFamily")
            .field("label", &self.label)
            .field("closed", &self.closed)
            .field("normalize", &self.normalize)
            .field("analytic_s_deriv", &self.s_deriv.is_some())
            .finish()
    }
}

impl<T: Real> LoopFamily<T> {
    pub fn new(label: impl Into<String>, loop_at: LoopAt<T>, closed: bool) -> Self {
        Self {
            loop_at,
            s_deriv: None,
            closed,
            normalize: true,
            h_s: T::lit(DEFAULT_H_S),
            label: label.into(),
        }
    }

    pub fn with_s_deriv(mut self, d: FamilyDerivative<T>) -> Self {
        self.s_deriv = Some(d);
        self
    }

    /// Use the Hamiltonians exactly as produced by `loop_at`.
    pub fn unnormalized(mut self) -> Self {
        self.normalize = false;
        self
    }

    pub fn with_h_s(mut self, h: T) -> Self {
        self.h_s = h;
        self
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.s_deriv.is_some()
    }

    /// The loop `ψ^s`, normalized if the family says so.
    pub fn loop_at(&self, m: &OrbitSphere<T>, s: T) -> Result<HamiltonianLoop<T>> {
        let lp = (self.loop_at)(s)?;
        Ok(if self.normalize { lp.normalized(m) } else { lp })
    }

    /// `ḟ^s_t`, analytic when supplied (with its mean removed for normalized
    /// families), otherwise a centered difference of the `f^{s±h}_t`.
    pub fn f_dot(&self, m: &OrbitSphere<T>, s: T) -> Result<ScalarField<T>> {
        if let Some(d) = &self.s_deriv {
            let d = d.clone();
            if !self.normalize {
                return Ok(Arc::new(move |t, u| d(s, t, u)));
            }
            let knots = self.loop_at(m, s)?.f.knots();
            let table = MeanTable::build(m, &knots, |t, u| d(s, t, u));
            return Ok(Arc::new(move |t, u| d(s, t, u) - table.at(t)));
        }
        let h = self.h_s;
        let plus = self.loop_at(m, s + h)?.f;
        let minus = self.loop_at(m, s - h)?.f;
        let inv = (T::lit(2.0) * h).recip();
        Ok(Arc::new(move |t, u| (plus.eval_vec(t, u) - minus.eval_vec(t, u)) * inv))
    }

    /// Largest `|f⁰_t − f¹_t|` over a probe grid (20 points × 11 times).
    pub fn closure_residual(&self, m: &OrbitSphere<T>) -> Result<T> {
        let (a, b) = (self.loop_at(m, T::zero())?, self.loop_at(m, T::one())?);
        let mut worst = T::zero();
        for p in fibonacci_sphere::<T>(20) {
            for i in 0..=10 {
                let t = T::from_usize(i).unwrap() / T::lit(10.0);
                worst = worst.max((a.f.eval(t * a.period(), &p) - b.f.eval(t * b.period(), &p)).abs());
            }
        }
        Ok(worst)
    }

    /// `φ·φ′`: `φ` on `s ∈ [0, ½]`, then `φ′`.
    pub fn concat(&self, other: &Self) -> Self {
        let (a, b) = (self.loop_at.clone(), other.loop_at.clone());
        let half = T::lit(0.5);
        let two = T::lit(2.0);
        let loop_at: LoopAt<T> = Arc::new(move |s| if s <= half { a(two * s) } else { b(two * s - T::one()) });
        let s_deriv = match (&self.s_deriv, &other.s_deriv) {
            (Some(da), Some(db)) => {
                let (da, db) = (da.clone(), db.clone());
                let d: FamilyDerivative<T> = Arc::new(move |s, t, u| {
                    if s <= half {
                        two * da(two * s, t, u)
                    } else {
                        two * db(two * s - T::one(), t, u)
                    }
                });
                Some(d)
            }
            _ => None,
        };
        Self {
            loop_at,
            s_deriv,
            closed: self.closed && other.closed,
            normalize: self.normalize && other.normalize,
            h_s: self.h_s.min(other.h_s),
            label: format!("({})·({})", self.label, other.label),
        }
    }

    /// `ψ^s = lp` for every `s`.
    pub fn constant(lp: HamiltonianLoop<T>) -> Self {
        let label = format!("constant({})", lp.label());
        Self::new(label, Arc::new(move |_| Ok(lp.clone())), true).with_s_deriv(Arc::new(|_, _, _| T::zero()))
    }

    /// One-parameter subgroups with axis angle `β(s) = start + sweep·s` in the
    /// `A, B` plane. Closed when `sweep` is a multiple of `2π`.
    pub fn subgroup_rotation(m: &OrbitSphere<T>, start: T, sweep: T) -> Self {
        let m1 = m.clone();
        let loop_at: LoopAt<T> =
            Arc::new(move |s| invariant_loop(&m1, &AlgebraDirection::from_angle(start + sweep * s)));
        let turns = sweep / T::two_pi();
        let closed = (turns - turns.round()).abs() < T::lit(1e-12);
        // f^s = πk(a u_x − b u_y), a = cos β, b = sin β
        let pk = T::PI() * m.k();
        let d: FamilyDerivative<T> = Arc::new(move |s, _t, u| {
            let (sb, cb) = (start + sweep * s).sin_cos();
            pk * sweep * (-sb * u.x - cb * u.y)
        });
        Self::new(format!("subgroup-rotation({start}, {sweep})"), loop_at, closed).with_s_deriv(d)
    }

    /// Axis `((1 − s)A + sB)/|·|`; each member is a unit-period subgroup.
    pub fn two_axis_mix(m: &OrbitSphere<T>) -> Self {
        let m1 = m.clone();
        let loop_at: LoopAt<T> = Arc::new(move |s| {
            let dir = AlgebraDirection::new(T::one() - s, s).normalized();
            invariant_loop(&m1, &dir)
        });
        Self::new("two-axis-mix", loop_at, false)
    }

    /// Subgroup rotation with a closed time-profile perturbation
    /// `ρ_s(t) = 1 + ε sin(2πs) cos(2πt)`; `∫ρ_s dt = 1` keeps each member a loop.
    pub fn perturbed_subgroup(m: &OrbitSphere<T>, eps: T) -> Self {
        let m1 = m.clone();
        let tau = T::two_pi();
        let loop_at: LoopAt<T> = Arc::new(move |s| {
            let base = invariant_loop(&m1, &AlgebraDirection::from_angle(tau * s))?;
            let amp = eps * (tau * s).sin();
            let f = base.f.with_profile("perturb", Arc::new(move |t: T| T::one() + amp * (tau * t).cos()));
            Ok(HamiltonianLoop::new(f))
        });
        Self::new(format!("perturbed-subgroup({eps})"), loop_at, true)
    }

    /// `f^s = f + c·s` with no normalization; `Ω = c`, so κ drifts at `−c` rev per unit `s`.
    pub fn offset(lp: HamiltonianLoop<T>, c: T) -> Self {
        let loop_at: LoopAt<T> = Arc::new(move |s| {
            let mut l = lp.clone();
            l.f = l.f.plus_constant(c * s);
            Ok(l)
        });
        Self::new(format!("offset({c})"), loop_at, false)
            .unnormalized()
            .with_s_deriv(Arc::new(move |_, _, _| c))
    }

    /// `f^s = (1 + s) f`; only `s = 0` is a loop in general.
    pub fn scaling(lp: HamiltonianLoop<T>) -> Self {
        let f = lp.f.clone();
        let loop_at: LoopAt<T> = Arc::new(move |s| {
            let mut l = lp.clone();
            l.f = l.f.scaled(T::one() + s);
            Ok(l)
        });
        Self::new("scaling", loop_at, false).with_s_deriv(Arc::new(move |_, t, u| f.eval_vec(t, u)))
    }
}

struct OmegaSystem<'a, T: Real> {
    m: &'a OrbitSphere<T>,
    f: &'a TimeDepHamiltonian<T>,
    f_dot: &'a (dyn Fn(T, &Vec3<T>) -> T + Send + Sync),
}

impl<T: Real> OdeSystem<T, 4> for OmegaSystem<'_, T> {
    fn rhs(&self, t: T, y: &[T; 4]) -> [T; 4] {
        let u = Vec3::from_slice(y);
        let x = field_at(self.m, self.f, t, &u);
        [x.x, x.y, x.z, (self.f_dot)(t, &u)]
    }

    fn on_accept(&mut self, _t: T, y: &mut [T; 4]) {
        let u = Vec3::from_slice(y).normalized();
        y[0] = u.x;
        y[1] = u.y;
        y[2] = u.z;
    }
}

/// `Ω_{ψ^s}(Z) = ∫₀¹ ḟ^s_t(ψ^s_t(q)) dt`.
pub fn omega_eval<T: Real>(
    m: &OrbitSphere<T>,
    fam: &LoopFamily<T>,
    s: T,
    q: &SpherePoint<T>,
    rel_tol: T,
) -> Result<T> {
    crate::dynamics::check_rel_tol(rel_tol)?;
    let lp = fam.loop_at(m, s)?;
    let f_dot = fam.f_dot(m, s)?;
    let mut sys = OmegaSystem {
        m,
        f: &lp.f,
        f_dot: f_dot.as_ref(),
    };
    let u = q.vec();
    let mut opts = OdeOptions::with_tol(rel_tol);
    opts.abs_tol = rel_tol;
    let sol = ode::solve(&mut sys, &lp.f.knots(), [u.x, u.y, u.z, T::zero()], &opts, false)?;
    Ok(sol.y[3])
}

/// Spread of Ω over several base points (should vanish).
pub fn omega_spread<T: Real>(
    m: &OrbitSphere<T>,
    fam: &LoopFamily<T>,
    s: T,
    points: &[SpherePoint<T>],
    rel_tol: T,
) -> Result<T> {
    let vals: Vec<T> = points
        .par_iter()
        .map(|q| omega_eval(m, fam, s, q, rel_tol))
        .collect::<Result<_>>()?;
    let lo = vals.iter().copied().fold(T::infinity(), T::min);
    let hi = vals.iter().copied().fold(T::neg_infinity(), T::max);
    Ok(hi - lo)
}

/// Unreduced κ-phase of `ψ^s` at `q`.
pub fn family_phase<T: Real>(
    m: &OrbitSphere<T>,
    fam: &LoopFamily<T>,
    s: T,
    q: &SpherePoint<T>,
    opts: &TransportOptions<T>,
) -> Result<T> {
    let lp = fam.loop_at(m, s)?;
    Ok(transport_phase(m, &lp, q, opts)?.phase)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeCheck<T> {
    /// Centered difference of the κ-phase, revolutions per unit `s`.
    pub lhs: T,
    /// `−Ω`.
    pub rhs: T,
    /// `|lhs − rhs| / max(|lhs|, |rhs|, 1)`.
    pub rel_err: T,
}

/// Compares `d/ds` of the κ-phase with `−Ω_{ψ^s}(Z)`.
pub fn kappa_derivative_check<T: Real>(
    m: &OrbitSphere<T>,
    fam: &LoopFamily<T>,
    s: T,
    q: &SpherePoint<T>,
    h_s: T,
    opts: &TransportOptions<T>,
) -> Result<DerivativeCheck<T>> {
    if !(h_s > T::zero()) {
        return Err(Error::InvalidParameter("h_s must be positive".into()));
    }
    let plus = family_phase(m, fam, s + h_s, q, opts)?;
    let minus = family_phase(m, fam, s - h_s, q, opts)?;
    let lhs = (plus - minus).wrap_half() / (T::lit(2.0) * h_s);
    let rhs = -omega_eval(m, fam, s, q, opts.rel_tol)?;
    let scale = lhs.abs().max(rhs.abs()).max(T::one());
    Ok(DerivativeCheck {
        lhs,
        rhs,
        rel_err: (lhs - rhs).abs() / scale,
    })
}

#[derive(Clone, Debug)]
pub struct Winding<T> {
    /// Total change of the continuous lift of `s ↦ κ(φ^s)`, in turns.
    pub winding: i64,
    pub samples: usize,
    pub s: Vec<T>,
    /// Continuous phase lift at each `s`, starting from the reduced value at `s = 0`.
    pub lift: Vec<T>,
    /// `|total − winding|` before rounding.
    pub residual: T,
}

impl<T: Real> Winding<T> {
    /// `Deg = Ω([φ]) = −winding`.
    pub fn deg(&self) -> i64 {
        -self.winding
    }
}

/// Winding number of `s ↦ κ(φ^s)` over a closed family, refining the
/// `s`-grid dyadically until adjacent phases differ by less than
/// [`UNWRAP_THRESHOLD`].
pub fn winding_number<T: Real>(
    m: &OrbitSphere<T>,
    fam: &LoopFamily<T>,
    q: &SpherePoint<T>,
    s_samples: usize,
    opts: &TransportOptions<T>,
) -> Result<Winding<T>> {
    if !fam.closed {
        return Err(Error::OpenFamily);
    }
    if s_samples == 0 {
        return Err(Error::InvalidParameter("s_samples must be positive".into()));
    }
    let eval = |idx: &[usize], n: usize| -> Result<Vec<T>> {
        idx.par_iter()
            .map(|&i| {
                let s = T::from_usize(i).unwrap() / T::from_usize(n).unwrap();
                family_phase(m, fam, s, q, opts)
            })
            .collect()
    };
    let mut n = s_samples;
    let all: Vec<usize> = (0..=n).collect();
    let mut phases = eval(&all, n)?;
    let threshold = T::lit(UNWRAP_THRESHOLD);
    loop {
        let worst = phases
            .windows(2)
            .map(|w| (w[1] - w[0]).wrap_half().abs())
            .fold(T::zero(), T::max);
        if worst < threshold {
            break;
        }
        if 2 * n > MAX_UNWRAP_SAMPLES {
            return Err(Error::Unwrap {
                jump: worst.to_f64().unwrap_or(f64::NAN),
                samples: n,
            });
        }
        let odd: Vec<usize> = (0..n).map(|i| 2 * i + 1).collect();
        let fresh = eval(&odd, 2 * n)?;
        let mut merged = Vec::with_capacity(2 * n + 1);
        for i in 0..n {
            merged.push(phases[i]);
            merged.push(fresh[i]);
        }
        merged.push(phases[n]);
        phases = merged;
        n *= 2;
    }
    let mut lift = Vec::with_capacity(n + 1);
    lift.push(phases[0].frac01());
    for w in phases.windows(2) {
        let last = *lift.last().unwrap();
        lift.push(last + (w[1] - w[0]).wrap_half());
    }
    let total = lift[n] - lift[0];
    let winding = total.round();
    Ok(Winding {
        winding: winding.to_i64().unwrap_or(0),
        samples: n,
        s: (0..=n).map(|i| T::from_usize(i).unwrap() / T::from_usize(n).unwrap()).collect(),
        lift,
        residual: (total - winding).abs(),
    })
}

/// `∫₀¹ Ω_{φ^s} ds` by composite Gauss–Legendre in `s` (4 panels × 6 nodes).
pub fn double_integral_check<T: Real>(
    m: &OrbitSphere<T>,
    fam: &LoopFamily<T>,
    q: &SpherePoint<T>,
    rel_tol: T,
) -> Result<T> {
    let gl = GaussLegendre::<T>::new(6);
    let panels = 4;
    let quarter = T::one() / T::from_usize(panels).unwrap();
    let half = T::lit(0.5);
    let nodes: Vec<(T, T)> = (0..panels)
        .flat_map(|p| {
            let lo = quarter * T::from_usize(p).unwrap();
            gl.nodes
                .iter()
                .zip(&gl.weights)
                .map(move |(&x, &w)| (lo + quarter * half * (x + T::one()), w * quarter * half))
                .collect::<Vec<_>>()
        })
        .collect();
    let vals: Vec<T> = nodes
        .par_iter()
        .map(|(s, w)| omega_eval(m, fam, *s, q, rel_tol).map(|o| o * *w))
        .collect::<Result<_>>()?;
    Ok(vals.into_iter().sum())
}
