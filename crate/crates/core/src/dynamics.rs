//! Time-dependent Hamiltonians, their vector fields, and the isotopies they
//! generate.
//!
//! Convention: `ι_X ω = −df`. With `ω = (k/2) u·(v × w)` this gives
//! `X = (2/k) u × ∇f`, where `∇f` is the surface gradient.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ode::{self, DenseSegment, OdeOptions, OdeSystem};
use crate::points::fibonacci_sphere;
use crate::scalar::Real;
use crate::sphere::{OrbitSphere, SpherePoint};
use crate::vec3::Vec3;

pub type ScalarField<T> = Arc<dyn Fn(T, &Vec3<T>) -> T + Send + Sync>;
pub type VectorField<T> = Arc<dyn Fn(T, &Vec3<T>) -> Vec3<T> + Send + Sync>;
pub type TimeProfile<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Samples per time segment for the cached mean of a non-autonomous family.
pub const MEAN_GRID_SAMPLES: usize = 257;

pub const DEFAULT_CLOSURE_TOL: f64 = 1e-6;
pub const DEFAULT_REL_TOL: f64 = 1e-10;
const CLOSURE_PROBES: usize = 20;

/// A time-dependent function `f_t` on the sphere together with its surface
/// gradient.
#[derive(Clone)]
pub struct TimeDepHamiltonian<T> {
    eval: ScalarField<T>,
    grad: VectorField<T>,
    s_deriv: Option<ScalarField<T>>,
    label: String,
    span: T,
    autonomous: bool,
    normalized: bool,
    breakpoints: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for TimeDepHamiltonian<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TimeDepHamiltonian")
            .field("label", &self.label)
            .field("span", &self.span)
            .field("autonomous", &self.autonomous)
            .field("normalized", &self.normalized)
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}

impl<T: Real> TimeDepHamiltonian<T> {
    /// General family on `[0, 1]`. `grad` need not be tangent; it is
    /// projected on evaluation.
    pub fn new(label: impl Into<String>, eval: ScalarField<T>, grad: VectorField<T>) -> Self {
        Self {
            eval,
            grad,
            s_deriv: None,
            label: label.into(),
            span: T::one(),
            autonomous: false,
            normalized: false,
            breakpoints: Vec::new(),
        }
    }

    /// Time-independent function.
    pub fn autonomous(
        label: impl Into<String>,
        eval: impl Fn(&Vec3<T>) -> T + Send + Sync + 'static,
        grad: impl Fn(&Vec3<T>) -> Vec3<T> + Send + Sync + 'static,
    ) -> Self {
        let mut h = Self::new(label, Arc::new(move |_, u| eval(u)), Arc::new(move |_, u| grad(u)));
        h.autonomous = true;
        h
    }

    pub fn zero() -> Self {
        let mut h = Self::constant(T::zero());
        h.label = "zero".into();
        h.normalized = true;
        h
    }

    pub fn constant(c: T) -> Self {
        Self::autonomous(format!("constant({c})"), move |_| c, |_| Vec3::zero())
    }

    /// `f(u) = w·u`; its flow is the rotation `u ↦` about `−w` with angular
    /// speed `(2/k)|w|`.
    pub fn linear(label: impl Into<String>, w: Vec3<T>) -> Self {
        Self::autonomous(label, move |u| w.dot(u), move |_| w)
    }

    #[inline]
    pub fn eval(&self, t: T, p: &SpherePoint<T>) -> T {
        (self.eval)(t, &p.vec())
    }

    #[inline]
    pub fn eval_vec(&self, t: T, u: &Vec3<T>) -> T {
        (self.eval)(t, u)
    }

    /// Surface gradient at `p`.
    #[inline]
    pub fn grad(&self, t: T, p: &SpherePoint<T>) -> Vec3<T> {
        self.grad_vec(t, &p.vec())
    }

    #[inline]
    pub fn grad_vec(&self, t: T, u: &Vec3<T>) -> Vec3<T> {
        (self.grad)(t, u).tangent_part(u)
    }

    pub fn s_deriv(&self) -> Option<&ScalarField<T>> {
        self.s_deriv.as_ref()
    }

    pub fn with_s_deriv(mut self, d: ScalarField<T>) -> Self {
        self.s_deriv = Some(d);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// End of the time domain `[0, span]`.
    pub fn span(&self) -> T {
        self.span
    }

    pub fn with_span(mut self, span: T) -> Self {
        self.span = span;
        self
    }

    pub fn is_autonomous(&self) -> bool {
        self.autonomous
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    /// `[0, breakpoints..., span]`.
    pub fn knots(&self) -> Vec<T> {
        let mut k = Vec::with_capacity(self.breakpoints.len() + 2);
        k.push(T::zero());
        k.extend(self.breakpoints.iter().copied().filter(|b| *b > T::zero() && *b < self.span));
        k.push(self.span);
        k
    }

    /// `c · f_t`.
    pub fn scaled(&self, c: T) -> Self {
        let (e, g) = (self.eval.clone(), self.grad.clone());
        Self {
            eval: Arc::new(move |t, u| c * e(t, u)),
            grad: Arc::new(move |t, u| g(t, u) * c),
            s_deriv: self.s_deriv.clone().map(|d| -> ScalarField<T> { Arc::new(move |t, u| c * d(t, u)) }),
            label: format!("{c}*({})", self.label),
            ..self.clone()
        }
    }

    /// `f_t + c`.
    pub fn plus_constant(&self, c: T) -> Self {
        let e = self.eval.clone();
        Self {
            eval: Arc::new(move |t, u| e(t, u) + c),
            label: format!("({})+{c}", self.label),
            normalized: false,
            ..self.clone()
        }
    }

    /// `ρ(t) · f_t`. A zero-mean family stays zero-mean.
    pub fn with_profile(&self, name: &str, rho: TimeProfile<T>) -> Self {
        let (e, g) = (self.eval.clone(), self.grad.clone());
        let (r1, r2) = (rho.clone(), rho.clone());
        Self {
            eval: Arc::new(move |t, u| r1(t) * e(t, u)),
            grad: Arc::new(move |t, u| g(t, u) * r2(t)),
            s_deriv: self
                .s_deriv
                .clone()
                .map(|d| -> ScalarField<T> { Arc::new(move |t, u| rho(t) * d(t, u)) }),
            label: format!("{name}*({})", self.label),
            autonomous: false,
            ..self.clone()
        }
    }

    /// Sum of two families on the same time domain.
    pub fn sum(&self, other: &Self) -> Self {
        let (e1, g1, e2, g2) = (self.eval.clone(), self.grad.clone(), other.eval.clone(), other.grad.clone());
        let mut bps = self.breakpoints.clone();
        bps.extend_from_slice(&other.breakpoints);
        bps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        bps.dedup();
        Self {
            eval: Arc::new(move |t, u| e1(t, u) + e2(t, u)),
            grad: Arc::new(move |t, u| g1(t, u) + g2(t, u)),
            s_deriv: None,
            label: format!("({})+({})", self.label, other.label),
            span: self.span,
            autonomous: self.autonomous && other.autonomous,
            normalized: self.normalized && other.normalized,
            breakpoints: bps,
        }
    }

    pub(crate) fn mark_normalized(mut self) -> Self {
        self.normalized = true;
        self
    }

    pub(crate) fn from_parts(
        label: String,
        eval: ScalarField<T>,
        grad: VectorField<T>,
        span: T,
        normalized: bool,
        breakpoints: Vec<T>,
    ) -> Self {
        Self {
            eval,
            grad,
            s_deriv: None,
            label,
            span,
            autonomous: false,
            normalized,
            breakpoints,
        }
    }
}

/// `X_t(p) = (2/k) u × ∇f_t(p)`, the field with `ι_X ω = −df_t`.
pub fn hamiltonian_vector_field<T: Real>(
    m: &OrbitSphere<T>,
    f: &TimeDepHamiltonian<T>,
    t: T,
    p: &SpherePoint<T>,
) -> Vec3<T> {
    field_at(m, f, t, &p.vec())
}

#[inline]
pub(crate) fn field_at<T: Real>(m: &OrbitSphere<T>, f: &TimeDepHamiltonian<T>, t: T, u: &Vec3<T>) -> Vec3<T> {
    u.cross(&f.grad_vec(t, u)) * (T::lit(2.0) / m.k())
}

/// A Hamiltonian loop based at the identity.
#[derive(Clone, Debug)]
pub struct HamiltonianLoop<T> {
    pub f: TimeDepHamiltonian<T>,
    pub closure_tol: T,
}

impl<T: Real> HamiltonianLoop<T> {
    pub fn new(f: TimeDepHamiltonian<T>) -> Self {
        Self {
            f,
            closure_tol: T::lit(DEFAULT_CLOSURE_TOL),
        }
    }

    pub fn constant() -> Self {
        Self::new(TimeDepHamiltonian::zero())
    }

    pub fn with_closure_tol(mut self, tol: T) -> Self {
        self.closure_tol = tol;
        self
    }

    pub fn period(&self) -> T {
        self.f.span()
    }

    pub fn label(&self) -> &str {
        self.f.label()
    }

    /// Same loop with a zero-mean Hamiltonian.
    pub fn normalized(&self, m: &OrbitSphere<T>) -> Self {
        Self {
            f: normalize(m, &self.f),
            closure_tol: self.closure_tol,
        }
    }

    /// Largest endpoint deviation over a fixed 20-point probe set; errors
    /// when it exceeds `closure_tol`.
    pub fn check_closure(&self, m: &OrbitSphere<T>, rel_tol: T) -> Result<T> {
        let mut worst = T::zero();
        for q in fibonacci_sphere::<T>(CLOSURE_PROBES) {
            let traj = integrate_isotopy(m, &self.f, &q, rel_tol)?;
            worst = worst.max(traj.end().vec().max_abs_diff(&q.vec()));
        }
        if worst > self.closure_tol {
            return Err(Error::NotClosed {
                deviation: worst.to_f64().unwrap_or(f64::NAN),
                tol: self.closure_tol.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(worst)
    }
}

/// A solution curve `t ↦ ψ_t(q)` with continuous output.
#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    pub samples: Vec<(T, SpherePoint<T>)>,
    dense: Vec<DenseSegment<T, 3>>,
}

impl<T: Real> Trajectory<T> {
    pub fn start(&self) -> SpherePoint<T> {
        self.samples[0].1
    }

    pub fn end(&self) -> SpherePoint<T> {
        self.samples.last().unwrap().1
    }

    pub fn t_end(&self) -> T {
        self.samples.last().unwrap().0
    }

    /// `ψ_t(q)` at an arbitrary `t` in the integrated range.
    pub fn at(&self, t: T) -> SpherePoint<T> {
        if self.dense.is_empty() || t <= self.samples[0].0 {
            return self.start();
        }
        if t >= self.t_end() {
            return self.end();
        }
        let i = self.dense.partition_point(|s| s.t1() < t).min(self.dense.len() - 1);
        SpherePoint::new(Vec3::from_slice(&self.dense[i].eval(t)))
    }
}

struct FlowSystem<'a, T: Real> {
    m: &'a OrbitSphere<T>,
    f: &'a TimeDepHamiltonian<T>,
}

impl<T: Real> OdeSystem<T, 3> for FlowSystem<'_, T> {
    fn rhs(&self, t: T, y: &[T; 3]) -> [T; 3] {
        field_at(self.m, self.f, t, &Vec3::from_slice(y)).to_array()
    }

    fn on_accept(&mut self, _t: T, y: &mut [T; 3]) {
        *y = Vec3::from_slice(y).normalized().to_array();
    }
}

pub(crate) fn check_rel_tol<T: Real>(rel_tol: T) -> Result<()> {
    let r = rel_tol.to_f64().unwrap_or(f64::NAN);
    if !(1e-13..=1e-3).contains(&r) {
        return Err(Error::Tolerance(r));
    }
    Ok(())
}

/// Integrates `dψ_t/dt = X_t ∘ ψ_t` from `q` over the full time domain of `f`.
pub fn integrate_isotopy<T: Real>(
    m: &OrbitSphere<T>,
    f: &TimeDepHamiltonian<T>,
    q: &SpherePoint<T>,
    rel_tol: T,
) -> Result<Trajectory<T>> {
    check_rel_tol(rel_tol)?;
    let mut sys = FlowSystem { m, f };
    let sol = ode::solve(&mut sys, &f.knots(), q.vec().to_array(), &OdeOptions::with_tol(rel_tol), true)?;
    Ok(Trajectory {
        samples: sol
            .samples
            .into_iter()
            .map(|(t, y)| (t, SpherePoint::new(Vec3::from_slice(&y))))
            .collect(),
        dense: sol.dense,
    })
}

/// Piecewise-uniform table of `t ↦ ∫f_t ω / ∫ω`, one grid per knot interval,
/// read back by local cubic interpolation.
#[derive(Clone, Debug)]
pub(crate) struct MeanTable<T> {
    segments: Vec<(T, T, Vec<T>)>,
}

impl<T: Real> MeanTable<T> {
    pub(crate) fn build<F>(m: &OrbitSphere<T>, knots: &[T], f: F) -> Self
    where
        F: Fn(T, &Vec3<T>) -> T,
    {
        let last = MEAN_GRID_SAMPLES - 1;
        let segments = knots
            .windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let h = (b - a) / T::from_usize(last).unwrap();
                let vals = (0..=last)
                    .map(|i| {
                        // sample just inside the segment so one-sided limits are used at knots
                        let t = if i == last { b } else { a + h * T::from_usize(i).unwrap() };
                        m.mean(|u| f(t, u))
                    })
                    .collect();
                (a, b, vals)
            })
            .collect();
        Self { segments }
    }

    pub(crate) fn at(&self, t: T) -> T {
        let idx = self
            .segments
            .iter()
            .position(|(_, b, _)| t < *b)
            .unwrap_or(self.segments.len() - 1);
        let (a, b, vals) = &self.segments[idx];
        let last = vals.len() - 1;
        let x = ((t - *a) / (*b - *a) * T::from_usize(last).unwrap())
            .max(T::zero())
            .min(T::from_usize(last).unwrap());
        // 4-point Lagrange stencil, shifted inward at the ends
        let i0 = (x.floor().to_usize().unwrap_or(0).saturating_sub(1)).min(last - 3);
        let xs = x - T::from_usize(i0).unwrap();
        let mut acc = T::zero();
        for j in 0..4 {
            let mut w = T::one();
            for l in 0..4 {
                if l != j {
                    w = w * (xs - T::from_usize(l).unwrap()) / (T::from_usize(j).unwrap() - T::from_usize(l).unwrap());
                }
            }
            acc = acc + w * vals[i0 + j];
        }
        acc
    }
}

/// `f_t − (∫f_t ω)/(∫ω)`.
///
/// Autonomous families get an exact constant shift; others subtract a cached
/// mean interpolated from [`MEAN_GRID_SAMPLES`] samples per time segment.
pub fn normalize<T: Real>(m: &OrbitSphere<T>, f: &TimeDepHamiltonian<T>) -> TimeDepHamiltonian<T> {
    if f.is_normalized() {
        return f.clone();
    }
    if f.is_autonomous() {
        let mean = m.mean(|u| f.eval_vec(T::zero(), u));
        let mut g = f.plus_constant(-mean).mark_normalized();
        g.label = format!("normalized({})", f.label);
        return g;
    }
    let e = f.eval.clone();
    let table = Arc::new(MeanTable::build(m, &f.knots(), |t, u| e(t, u)));
    TimeDepHamiltonian {
        eval: Arc::new(move |t, u| e(t, u) - table.at(t)),
        label: format!("normalized({})", f.label),
        normalized: true,
        ..f.clone()
    }
}

/// Rescales time: `f'(t') = T·f(T·t')`, so the flow of `f'` up to `t'`
/// equals the flow of `f` up to `T·t'`.
pub fn reparametrize<T: Real>(f: &TimeDepHamiltonian<T>, period: T) -> Result<TimeDepHamiltonian<T>> {
    if !(period > T::zero()) {
        return Err(Error::InvalidParameter(format!("period must be positive, got {period}")));
    }
    if period == T::one() {
        return Ok(f.clone());
    }
    let (e, g) = (f.eval.clone(), f.grad.clone());
    Ok(TimeDepHamiltonian {
        eval: Arc::new(move |t, u| period * e(period * t, u)),
        grad: Arc::new(move |t, u| g(period * t, u) * period),
        s_deriv: f
            .s_deriv
            .clone()
            .map(|d| -> ScalarField<T> { Arc::new(move |t, u| period * d(period * t, u)) }),
        label: format!("reparam({}, {period})", f.label),
        span: f.span / period,
        autonomous: f.autonomous,
        normalized: f.normalized,
        breakpoints: f.breakpoints.iter().map(|b| *b / period).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sphere(n: i64) -> OrbitSphere<f64> {
        OrbitSphere::new(n).unwrap()
    }

    /// `−h_A = k u_x`
    fn minus_h_a(m: &OrbitSphere<f64>) -> TimeDepHamiltonian<f64> {
        TimeDepHamiltonian::linear("-h_A", Vec3::e_x() * m.k())
    }

    #[test]
    fn field_matches_chart_expression() {
        let m = sphere(1);
        let f = minus_h_a(&m);
        let p = SpherePoint::from_spherical(PI / 2.0, PI / 2.0);
        let x = hamiltonian_vector_field(&m, &f, 0.0, &p);
        assert!(x.max_abs_diff(&(p.d_theta() * 2.0)) < 1e-14);
        let zero = hamiltonian_vector_field(&m, &TimeDepHamiltonian::constant(3.0), 0.0, &p);
        assert_eq!(zero, Vec3::zero());
    }

    #[test]
    fn field_of_minus_h_b() {
        let m = sphere(2);
        let f = TimeDepHamiltonian::linear("-h_B", Vec3::e_y() * -m.k());
        let p = SpherePoint::from_spherical(PI / 2.0, 0.0);
        let x = hamiltonian_vector_field(&m, &f, 0.0, &p);
        assert!(x.max_abs_diff(&(p.d_theta() * 2.0)) < 1e-14);
    }

    #[test]
    fn zero_hamiltonian_gives_constant_trajectory() {
        let m = sphere(1);
        let q = SpherePoint::from_spherical(0.7, 2.0);
        let tr = integrate_isotopy(&m, &TimeDepHamiltonian::zero(), &q, 1e-10).unwrap();
        assert!(tr.samples.iter().all(|(_, p)| p.vec().max_abs_diff(&q.vec()) < 1e-15));
        assert_eq!(tr.t_end(), 1.0);
    }

    #[test]
    fn north_pole_meridian_loop() {
        let m = sphere(1);
        let f = reparametrize(&minus_h_a(&m).with_span(PI), PI).unwrap();
        assert_eq!(f.span(), 1.0);
        let q = SpherePoint::north_pole();
        let tr = integrate_isotopy(&m, &f, &q, 1e-10).unwrap();
        assert!(tr.end().vec().max_abs_diff(&q.vec()) < 1e-8);
        // first half on φ = π/2, second on φ = 3π/2
        let (th, ph) = tr.at(0.25).spherical_coords();
        assert!((th - PI / 2.0).abs() < 1e-8 && (ph - PI / 2.0).abs() < 1e-8);
        let (th, ph) = tr.at(0.75).spherical_coords();
        assert!((th - PI / 2.0).abs() < 1e-8 && (ph - 1.5 * PI).abs() < 1e-8);
        assert!((tr.at(0.5).vec().z + 1.0).abs() < 1e-8);
        for (_, p) in &tr.samples {
            assert!((p.vec().norm() - 1.0).abs() < 1e-12);
        }
        assert!(tr.samples.windows(2).all(|w| w[1].0 > w[0].0));
    }

    #[test]
    fn reparametrize_rejects_nonpositive_period() {
        assert!(reparametrize(&TimeDepHamiltonian::<f64>::zero(), 0.0).is_err());
        let f = TimeDepHamiltonian::<f64>::constant(2.0);
        let g = reparametrize(&f, 1.0).unwrap();
        assert_eq!(g.eval_vec(0.3, &Vec3::e_x()), 2.0);
    }

    #[test]
    fn normalize_examples() {
        let m = sphere(3);
        let ha = TimeDepHamiltonian::linear("h_A", Vec3::e_x() * -m.k());
        let n = normalize(&m, &ha);
        let p = SpherePoint::from_spherical(1.1, 0.3);
        assert!((n.eval(0.0, &p) - ha.eval(0.0, &p)).abs() < 1e-13);
        let c = normalize(&m, &TimeDepHamiltonian::constant(4.5));
        assert!(c.eval(0.2, &p).abs() < 1e-12);
        let shifted = normalize(&m, &ha.plus_constant(5.0));
        assert!((shifted.eval(0.0, &p) - ha.eval(0.0, &p)).abs() < 1e-12);
    }

    #[test]
    fn normalize_time_dependent_mean() {
        let m = sphere(2);
        // mean(t) = 0.1 sin(2πt) + 0.3
        let f = TimeDepHamiltonian::new(
            "wobble",
            Arc::new(|t: f64, u: &Vec3<f64>| u.x + 0.1 * (2.0 * PI * t).sin() + 0.3),
            Arc::new(|_, _| Vec3::e_x()),
        );
        let g = normalize(&m, &f);
        for i in 0..=100 {
            let t = i as f64 / 100.0 + 0.0013;
            let t = t.min(1.0);
            let mean = m.mean(|u| g.eval_vec(t, u));
            assert!(mean.abs() < 1e-9, "t = {t}: {mean}");
        }
        // idempotent
        let gg = normalize(&m, &g);
        let u = Vec3::new(0.0, 0.6, 0.8);
        assert_eq!(gg.eval_vec(0.37, &u), g.eval_vec(0.37, &u));
    }

    #[test]
    fn closure_check() {
        let m = sphere(1);
        let loop_ = HamiltonianLoop::new(reparametrize(&minus_h_a(&m).with_span(PI), PI).unwrap());
        assert!(loop_.check_closure(&m, 1e-10).unwrap() < 1e-8);
        let open = HamiltonianLoop::new(minus_h_a(&m));
        assert!(matches!(open.check_closure(&m, 1e-10), Err(Error::NotClosed { .. })));
    }

    #[test]
    fn tolerance_range_enforced() {
        let m = sphere(1);
        let q = SpherePoint::north_pole();
        assert!(integrate_isotopy(&m, &TimeDepHamiltonian::zero(), &q, 1e-2).is_err());
        assert!(integrate_isotopy(&m, &TimeDepHamiltonian::zero(), &q, 1e-14).is_err());
    }
}
