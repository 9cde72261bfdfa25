//! Adaptive Dormand–Prince 5(4) integrator with continuous output.
//!
//! State is a fixed-size array so that flow (`N = 3`), flow plus phase
//! (`N = 4`) and flow plus auxiliary quadratures share one stepper. Systems
//! may project or re-chart the state after every accepted step through
//! [`OdeSystem::on_accept`]; the stage derivative is re-evaluated afterwards
//! so that jumps never leak into the next step.

use crate::error::{Error, Result};
use crate::scalar::Real;

pub trait OdeSystem<T: Real, const N: usize> {
    fn rhs(&self, t: T, y: &[T; N]) -> [T; N];

    /// Hook run on every accepted step. Default: no-op.
    fn on_accept(&mut self, _t: T, _y: &mut [T; N]) {}
}

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_steps: usize,
    pub h_max: Option<T>,
}

impl<T: Real> OdeOptions<T> {
    pub fn with_tol(rel_tol: T) -> Self {
        Self {
            rel_tol,
            abs_tol: rel_tol,
            max_steps: 1_000_000,
            h_max: None,
        }
    }
}

/// Quartic continuous extension over one accepted step.
#[derive(Clone, Debug)]
pub struct DenseSegment<T, const N: usize> {
    pub t0: T,
    pub h: T,
    r: [[T; N]; 5],
}

impl<T: Real, const N: usize> DenseSegment<T, N> {
    pub fn t1(&self) -> T {
        self.t0 + self.h
    }

    pub fn eval(&self, t: T) -> [T; N] {
        let th = (t - self.t0) / self.h;
        let th1 = T::one() - th;
        let mut out = [T::zero(); N];
        for i in 0..N {
            let r = |j: usize| self.r[j][i];
            out[i] = r(0) + th * (r(1) + th1 * (r(2) + th * (r(3) + th1 * r(4))));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct OdeSolution<T, const N: usize> {
    pub t: T,
    pub y: [T; N],
    pub accepted: usize,
    pub rejected: usize,
    /// Accepted states after the `on_accept` hook, including the initial one.
    pub samples: Vec<(T, [T; N])>,
    pub dense: Vec<DenseSegment<T, N>>,
}

struct Tableau<T> {
    c: [T; 7],
    a: [[T; 6]; 7],
    e: [T; 7],
    d: [T; 7],
}

impl<T: Real> Tableau<T> {
    fn new() -> Self {
        let l = T::lit;
        let z = T::zero();
        Self {
            c: [z, l(0.2), l(0.3), l(0.8), l(8.0 / 9.0), T::one(), T::one()],
            a: [
                [z; 6],
                [l(0.2), z, z, z, z, z],
                [l(3.0 / 40.0), l(9.0 / 40.0), z, z, z, z],
                [l(44.0 / 45.0), l(-56.0 / 15.0), l(32.0 / 9.0), z, z, z],
                [
                    l(19372.0 / 6561.0),
                    l(-25360.0 / 2187.0),
                    l(64448.0 / 6561.0),
                    l(-212.0 / 729.0),
                    z,
                    z,
                ],
                [
                    l(9017.0 / 3168.0),
                    l(-355.0 / 33.0),
                    l(46732.0 / 5247.0),
                    l(49.0 / 176.0),
                    l(-5103.0 / 18656.0),
                    z,
                ],
                [
                    l(35.0 / 384.0),
                    z,
                    l(500.0 / 1113.0),
                    l(125.0 / 192.0),
                    l(-2187.0 / 6784.0),
                    l(11.0 / 84.0),
                ],
            ],
            e: [
                l(71.0 / 57600.0),
                z,
                l(-71.0 / 16695.0),
                l(71.0 / 1920.0),
                l(-17253.0 / 339200.0),
                l(22.0 / 525.0),
                l(-1.0 / 40.0),
            ],
            d: [
                l(-12715105075.0 / 11282082432.0),
                z,
                l(87487479700.0 / 32700410799.0),
                l(-10690763975.0 / 1880347072.0),
                l(701980252875.0 / 199316789632.0),
                l(-1453857185.0 / 822651844.0),
                l(69997945.0 / 29380423.0),
            ],
        }
    }
}

/// Integrates `sys` from `knots[0]` to `knots.last()`, restarting the step
/// sequence at every interior knot (discontinuities of the right-hand side).
pub fn solve<T, S, const N: usize>(
    sys: &mut S,
    knots: &[T],
    y0: [T; N],
    opts: &OdeOptions<T>,
    keep_dense: bool,
) -> Result<OdeSolution<T, N>>
where
    T: Real,
    S: OdeSystem<T, N>,
{
    assert!(knots.len() >= 2, "need at least start and end time");
    let tab = Tableau::<T>::new();
    let mut sol = OdeSolution {
        t: knots[0],
        y: y0,
        accepted: 0,
        rejected: 0,
        samples: vec![(knots[0], y0)],
        dense: Vec::new(),
    };
    for w in knots.windows(2) {
        if w[1] > w[0] {
            solve_segment(sys, &tab, w[0], w[1], opts, keep_dense, &mut sol)?;
        }
    }
    Ok(sol)
}

fn solve_segment<T, S, const N: usize>(
    sys: &mut S,
    tab: &Tableau<T>,
    t0: T,
    t1: T,
    opts: &OdeOptions<T>,
    keep_dense: bool,
    sol: &mut OdeSolution<T, N>,
) -> Result<()>
where
    T: Real,
    S: OdeSystem<T, N>,
{
    let span = t1 - t0;
    let mut t = t0;
    let mut y = sol.y;
    let mut h = span * T::lit(0.5) * opts.rel_tol.powf(T::lit(0.2));
    if let Some(hm) = opts.h_max {
        h = h.min(hm);
    }
    h = h.min(span);
    let mut k = [[T::zero(); N]; 7];
    k[0] = sys.rhs(t, &y);
    let safety = T::lit(0.9);
    let fac_min = T::lit(0.2);
    let fac_max = T::lit(5.0);
    let mut steps = 0usize;

    while t < t1 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::TooManySteps { t: to_f64(t) });
        }
        let h_floor = T::epsilon() * T::lit(16.0) * t.abs().max(T::one());
        if h < h_floor {
            return Err(Error::StepUnderflow { t: to_f64(t) });
        }
        let last = t + h >= t1 || (t1 - (t + h)) < h_floor;
        if last {
            h = t1 - t;
        }

        for s in 1..7 {
            let mut ys = y;
            for (i, ysi) in ys.iter_mut().enumerate() {
                let mut acc = T::zero();
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc = acc + tab.a[s][j] * kj[i];
                }
                *ysi = *ysi + h * acc;
            }
            k[s] = sys.rhs(t + tab.c[s] * h, &ys);
        }
        // 5th-order solution = row 7 of the tableau (FSAL)
        let mut y_new = y;
        let mut err_sq = T::zero();
        for i in 0..N {
            let mut acc = T::zero();
            for j in 0..6 {
                acc = acc + tab.a[6][j] * k[j][i];
            }
            y_new[i] = y[i] + h * acc;
        }
        let k7 = sys.rhs(t + h, &y_new);
        for i in 0..N {
            let mut e = T::zero();
            for j in 0..6 {
                e = e + tab.e[j] * k[j][i];
            }
            e = (e + tab.e[6] * k7[i]) * h;
            let sc = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
            err_sq = err_sq + (e / sc) * (e / sc);
        }
        let err = (err_sq / T::from_usize(N).unwrap()).sqrt();
        if !err.is_finite() {
            sol.rejected += 1;
            h = h * fac_min;
            continue;
        }

        if err <= T::one() {
            if keep_dense {
                sol.dense.push(dense_segment(tab, t, h, &y, &y_new, &k, &k7));
            }
            t = if last { t1 } else { t + h };
            y = y_new;
            sys.on_accept(t, &mut y);
            k[0] = sys.rhs(t, &y);
            sol.accepted += 1;
            sol.samples.push((t, y));
            let fac = if err == T::zero() {
                fac_max
            } else {
                (safety * err.powf(T::lit(-0.2))).min(fac_max).max(fac_min)
            };
            h = h * fac;
            if let Some(hm) = opts.h_max {
                h = h.min(hm);
            }
        } else {
            sol.rejected += 1;
            let fac = (safety * err.powf(T::lit(-0.2))).max(fac_min).min(T::one());
            h = h * fac;
        }
    }
    sol.t = t1;
    sol.y = y;
    Ok(())
}

fn dense_segment<T: Real, const N: usize>(
    tab: &Tableau<T>,
    t: T,
    h: T,
    y0: &[T; N],
    y1: &[T; N],
    k: &[[T; N]; 7],
    k7: &[T; N],
) -> DenseSegment<T, N> {
    let mut r = [[T::zero(); N]; 5];
    for i in 0..N {
        let ydiff = y1[i] - y0[i];
        let bspl = h * k[0][i] - ydiff;
        r[0][i] = y0[i];
        r[1][i] = ydiff;
        r[2][i] = bspl;
        r[3][i] = ydiff - h * k7[i] - bspl;
        let mut acc = tab.d[6] * k7[i];
        for j in 0..6 {
            acc = acc + tab.d[j] * k[j][i];
        }
        r[4][i] = h * acc;
    }
    DenseSegment { t0: t, h, r }
}

fn to_f64<T: Real>(t: T) -> f64 {
    t.to_f64().unwrap_or(f64::NAN)
}
