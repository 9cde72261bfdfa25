//! Prequantum phase transport along Hamiltonian loops and its holonomy κ.
//!
//! Along `σ(t) = ψ_t(q)` a section component in a local frame `μ` evolves
//! as `dĝ/dt = 2πi(α(X_t) − f_t) ĝ`, so only its argument changes. The
//! argument (in revolutions) is integrated together with the flow; when the
//! trajectory crosses into the other chart's zone the component is
//! re-expressed with the transition factor `e^{∓inφ}`. The final phase,
//! read in the starting frame and reduced mod 1, is the holonomy.

use rayon::prelude::*;

use crate::dynamics::{check_rel_tol, field_at, HamiltonianLoop, TimeDepHamiltonian, DEFAULT_REL_TOL};
use crate::error::{Error, Result};
use crate::ode::{self, OdeOptions, OdeSystem};
use crate::scalar::{circle_distance, Real};
use crate::sphere::{Chart, OrbitSphere, SpherePoint};
use crate::vec3::Vec3;

use num_complex::Complex;

/// An element of ℝ/ℤ, in revolutions.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct UnitPhase<T> {
    value: T,
}

impl<T: Real> UnitPhase<T> {
    pub fn new(revolutions: T) -> Self {
        Self {
            value: revolutions.frac01(),
        }
    }

    pub fn zero() -> Self {
        Self { value: T::zero() }
    }

    /// Representative in `[0, 1)`.
    pub fn value(&self) -> T {
        self.value
    }

    /// `e^{2πi·value}`.
    pub fn as_complex(&self) -> Complex<T> {
        Complex::from_polar(T::one(), T::two_pi() * self.value)
    }

    /// Group law of U(1) written additively.
    pub fn compose(&self, other: &Self) -> Self {
        Self::new(self.value + other.value)
    }

    pub fn inverse(&self) -> Self {
        Self::new(-self.value)
    }

    pub fn distance(&self, other: &Self) -> T {
        circle_distance(self.value, other.value)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TransportOptions<T> {
    pub rel_tol: T,
    /// Switch South → North once `θ` drops below this angle.
    pub switch_to_north: T,
    /// Switch North → South once `θ` exceeds this angle.
    pub switch_to_south: T,
}

impl<T: Real> Default for TransportOptions<T> {
    fn default() -> Self {
        Self::with_tol(T::lit(DEFAULT_REL_TOL))
    }
}

impl<T: Real> TransportOptions<T> {
    pub fn with_tol(rel_tol: T) -> Self {
        Self {
            rel_tol,
            switch_to_north: T::PI() / T::lit(3.0),
            switch_to_south: T::lit(2.0) * T::PI() / T::lit(3.0),
        }
    }

    pub fn with_thresholds(mut self, to_north: T, to_south: T) -> Self {
        self.switch_to_north = to_north;
        self.switch_to_south = to_south;
        self
    }

    fn validate(&self) -> Result<()> {
        check_rel_tol(self.rel_tol)?;
        let ok = self.switch_to_north > T::zero()
            && self.switch_to_north < self.switch_to_south
            && self.switch_to_south < T::PI();
        if !ok {
            return Err(Error::InvalidParameter(
                "chart thresholds must satisfy 0 < to_north < to_south < π".into(),
            ));
        }
        Ok(())
    }
}

/// Result of transporting a section component along `ψ_t(q)`.
#[derive(Clone, Copy, Debug)]
pub struct PhaseState<T> {
    pub t: T,
    pub point: SpherePoint<T>,
    /// Unreduced argument of `ĝ(t)/ĝ(0)` in revolutions, read in `chart`.
    pub phase: T,
    /// Connection part: `∫α(X_t)dt` plus chart transition jumps.
    pub connection: T,
    /// `∫₀ᵗ f_s(σ(s)) ds`.
    pub hamiltonian_integral: T,
    /// Frame in which `phase` is expressed (the starting frame).
    pub chart: Chart,
    pub transitions: usize,
}

impl<T: Real> PhaseState<T> {
    pub fn unit_phase(&self) -> UnitPhase<T> {
        UnitPhase::new(self.phase)
    }
}

/// Revolutions added when a component in `from` is re-expressed in the other
/// frame at `u`: `g_S = g_N e^{−inφ}`.
fn transition_jump<T: Real>(n: T, from: Chart, u: &Vec3<T>) -> T {
    let phi = u.y.atan2(u.x);
    let j = n * phi / T::two_pi();
    match from {
        Chart::North => -j,
        Chart::South => j,
    }
}

struct PhaseSystem<'a, T: Real> {
    m: &'a OrbitSphere<T>,
    f: &'a TimeDepHamiltonian<T>,
    chart: Chart,
    transitions: usize,
    cos_to_north: T,
    cos_to_south: T,
}

impl<T: Real> OdeSystem<T, 5> for PhaseSystem<'_, T> {
    fn rhs(&self, t: T, y: &[T; 5]) -> [T; 5] {
        let u = Vec3::from_slice(y);
        let x = field_at(self.m, self.f, t, &u);
        let a = self.m.potential_unchecked(self.chart, &u, &x);
        let h = self.f.eval_vec(t, &u);
        [x.x, x.y, x.z, a, h]
    }

    fn on_accept(&mut self, _t: T, y: &mut [T; 5]) {
        let u = Vec3::from_slice(y).normalized();
        y[0] = u.x;
        y[1] = u.y;
        y[2] = u.z;
        let switch = match self.chart {
            Chart::North => u.z < self.cos_to_south,
            Chart::South => u.z > self.cos_to_north,
        };
        if switch {
            y[3] = y[3] + transition_jump(self.m.n_real(), self.chart, &u);
            self.chart = self.chart.other();
            self.transitions += 1;
        }
    }
}

/// Transports the phase along `ψ_t(q)` for the loop as given (no
/// normalization is applied here).
pub fn transport_phase<T: Real>(
    m: &OrbitSphere<T>,
    lp: &HamiltonianLoop<T>,
    q: &SpherePoint<T>,
    opts: &TransportOptions<T>,
) -> Result<PhaseState<T>> {
    opts.validate()?;
    let start = if q.vec().z >= T::zero() { Chart::North } else { Chart::South };
    let mut sys = PhaseSystem {
        m,
        f: &lp.f,
        chart: start,
        transitions: 0,
        cos_to_north: opts.switch_to_north.cos(),
        cos_to_south: opts.switch_to_south.cos(),
    };
    let u0 = q.vec();
    let y0 = [u0.x, u0.y, u0.z, T::zero(), T::zero()];
    let sol = ode::solve(&mut sys, &lp.f.knots(), y0, &OdeOptions::with_tol(opts.rel_tol), false)?;
    let end = SpherePoint::new(Vec3::from_slice(&sol.y));
    let deviation = end.vec().max_abs_diff(&u0);
    if deviation > lp.closure_tol {
        return Err(Error::NotClosed {
            deviation: deviation.to_f64().unwrap_or(f64::NAN),
            tol: lp.closure_tol.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut connection = sol.y[3];
    if sys.chart != start {
        connection = connection + transition_jump(m.n_real(), sys.chart, &end.vec());
    }
    let hamiltonian_integral = sol.y[4];
    Ok(PhaseState {
        t: sol.t,
        point: end,
        phase: connection - hamiltonian_integral,
        connection,
        hamiltonian_integral,
        chart: start,
        transitions: sys.transitions,
    })
}

/// Holonomy κ(ψ) of the transport, computed at base point `q` with the
/// zero-mean Hamiltonian of the loop.
pub fn kappa<T: Real>(
    m: &OrbitSphere<T>,
    lp: &HamiltonianLoop<T>,
    q: &SpherePoint<T>,
    opts: &TransportOptions<T>,
) -> Result<UnitPhase<T>> {
    let normalized = lp.normalized(m);
    Ok(transport_phase(m, &normalized, q, opts)?.unit_phase())
}

/// `𝒜(ψ) = ∫_S ω − ∫₀¹ f_t(ψ_t(q)) dt mod ℤ`, in `[0, 1)`.
pub fn action_integral<T: Real>(
    m: &OrbitSphere<T>,
    lp: &HamiltonianLoop<T>,
    q: &SpherePoint<T>,
    opts: &TransportOptions<T>,
) -> Result<T> {
    Ok(kappa(m, lp, q, opts)?.value())
}

/// κ from a critical point of a time-independent unit-period Hamiltonian:
/// `κ = exp(−2πi f(p))` with `f` normalized.
pub fn kappa_at_fixed_point<T: Real>(
    m: &OrbitSphere<T>,
    f: &TimeDepHamiltonian<T>,
    p: &SpherePoint<T>,
) -> Result<UnitPhase<T>> {
    if !f.is_autonomous() {
        return Err(Error::InvalidParameter("fixed-point shortcut needs a time-independent Hamiltonian".into()));
    }
    let f = crate::dynamics::normalize(m, f);
    let g = f.grad(T::zero(), p).norm();
    if g > T::lit(1e-10).max(T::epsilon() * T::lit(1e3)) {
        return Err(Error::NotCritical {
            grad_norm: g.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(UnitPhase::new(-f.eval(T::zero(), p)))
}

/// κ at each point, evaluated concurrently; output order follows `points`.
pub fn kappa_many<T: Real>(
    m: &OrbitSphere<T>,
    lp: &HamiltonianLoop<T>,
    points: &[SpherePoint<T>],
    opts: &TransportOptions<T>,
) -> Result<Vec<UnitPhase<T>>> {
    let normalized = lp.normalized(m);
    points
        .par_iter()
        .map(|q| transport_phase(m, &normalized, q, opts).map(|s| s.unit_phase()))
        .collect()
}

/// Largest pairwise circle distance in a set of phases.
pub fn phase_spread<T: Real>(values: &[UnitPhase<T>]) -> T {
    let mut worst = T::zero();
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            worst = worst.max(a.distance(b));
        }
    }
    worst
}

/// Max over pairs of base points of the circle distance between κ values.
pub fn base_point_spread<T: Real>(
    m: &OrbitSphere<T>,
    lp: &HamiltonianLoop<T>,
    points: &[SpherePoint<T>],
    opts: &TransportOptions<T>,
) -> Result<T> {
    Ok(phase_spread(&kappa_many(m, lp, points, opts)?))
}

/// Path product `ξ·ψ`: `ψ` at double speed on `[0, ½]`, then `ξ` on `[½, 1]`.
pub fn product_loop<T: Real>(xi: &HamiltonianLoop<T>, psi: &HamiltonianLoop<T>) -> Result<HamiltonianLoop<T>> {
    let unit = |l: &HamiltonianLoop<T>| crate::dynamics::reparametrize(&l.f, l.period());
    let (first, second) = (unit(psi)?, unit(xi)?);
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let (e1, e2, g1, g2) = (first.clone(), second.clone(), first.clone(), second.clone());
    let eval = move |t: T, u: &Vec3<T>| {
        if t < half {
            two * e1.eval_vec(two * t, u)
        } else {
            two * e2.eval_vec(two * t - T::one(), u)
        }
    };
    let grad = move |t: T, u: &Vec3<T>| {
        if t < half {
            g1.grad_vec(two * t, u) * two
        } else {
            g2.grad_vec(two * t - T::one(), u) * two
        }
    };
    let mut bps: Vec<T> = first.breakpoints().iter().map(|b| *b * half).collect();
    bps.push(half);
    bps.extend(second.breakpoints().iter().map(|b| half + *b * half));
    let f = TimeDepHamiltonian::from_parts(
        format!("({})·({})", xi.label(), psi.label()),
        std::sync::Arc::new(eval),
        std::sync::Arc::new(grad),
        T::one(),
        first.is_normalized() && second.is_normalized(),
        bps,
    );
    Ok(HamiltonianLoop {
        f,
        closure_tol: xi.closure_tol.max(psi.closure_tol),
    })
}

/// Berry phase of the loop of Lagrangian leaves `ψ_t(N)` through `q`.
#[derive(Clone, Copy, Debug)]
pub struct BerryPhase<T> {
    pub phase: UnitPhase<T>,
    pub leaf_point: SpherePoint<T>,
    /// Number of frame changes along the transported point.
    pub transitions: usize,
}

/// For a simply connected leaf the Berry phase is the holonomy κ(ψ).
pub fn berry_phase<T: Real>(
    m: &OrbitSphere<T>,
    lp: &HamiltonianLoop<T>,
    q_on_leaf: &SpherePoint<T>,
    opts: &TransportOptions<T>,
) -> Result<BerryPhase<T>> {
    let state = transport_phase(m, &lp.normalized(m), q_on_leaf, opts)?;
    Ok(BerryPhase {
        phase: state.unit_phase(),
        leaf_point: *q_on_leaf,
        transitions: state.transitions,
    })
}
