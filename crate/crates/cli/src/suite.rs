//! Bundled property checks, run per orbit size.

use std::f64::consts::PI;
use std::sync::Arc;

use preq_core::points::{fibonacci_seeded, random_point};
use preq_core::{
    base_point_spread, circle_distance, double_integral_check, invariant_loop, kappa, kappa_at_fixed_point,
    kappa_derivative_check, omega_eval, phase_spread, product_loop, winding_number, Direction, Family, Loop, Point,
    Sphere, Transport,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::record::SuiteEntry;

pub const KAPPA_TOL: f64 = 1e-6;
pub const SPREAD_TOL: f64 = 1e-5;
pub const PRODUCT_TOL: f64 = 1e-5;
pub const FIXED_POINT_TOL: f64 = 1e-6;
pub const CRITICAL_GAP_TOL: f64 = 1e-9;
pub const OMEGA_TOL: f64 = 1e-6;
pub const DERIVATIVE_TOL: f64 = 1e-3;
pub const DOUBLE_INTEGRAL_TOL: f64 = 1e-4;

const LATTICE_POINTS: usize = 100;
const RANDOM_AXES: usize = 3;
const PRODUCT_PAIRS: usize = 5;
const OMEGA_SAMPLES: usize = 10;
const WINDING_SAMPLES: usize = 16;
const H_S: f64 = 1e-4;

type Check = Result<(f64, Option<f64>), preq_core::Error>;

/// The three reference base points: north pole, `(π/2, 0)`, `(π/2, π/2)`.
pub fn reference_points() -> [Point; 3] {
    [
        Point::north_pole(),
        Point::from_spherical(PI / 2.0, 0.0),
        Point::from_spherical(PI / 2.0, PI / 2.0),
    ]
}

/// Expected κ phase of a one-parameter subgroup loop.
pub fn subgroup_phase(n: i64) -> f64 {
    n.rem_euclid(2) as f64 / 2.0
}

fn unit_dir(rng: &mut ChaCha8Rng) -> Direction {
    let v = random_point::<f64, _>(rng).vec();
    Direction::with_z(v.x, v.y, v.z)
}

fn entry(name: &str, n: i64, threshold: f64, check: Check) -> SuiteEntry {
    match check {
        Ok((residual, value)) => {
            let e = SuiteEntry::new(name, Some(n), residual, threshold);
            match value {
                Some(v) => e.with_value(v),
                None => e,
            }
        }
        Err(err) => SuiteEntry::failed(name, Some(n), threshold, err.to_string()),
    }
}

fn ramp(lp: Loop) -> Loop {
    Loop::new(lp.f.with_profile("cosine-ramp", Arc::new(|t: f64| 1.0 - (2.0 * PI * t).cos())))
}

pub fn suite_for(n: i64, seed: u64, opts: &Transport) -> Vec<SuiteEntry> {
    let m = match Sphere::new(n) {
        Ok(m) => m,
        Err(e) => return vec![SuiteEntry::failed("orbit", Some(n), 0.0, e.to_string())],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ n as u64);
    let want = subgroup_phase(n);
    let mut out = Vec::new();

    let mut dirs = vec![Direction::a_axis(), Direction::b_axis()];
    dirs.extend((0..RANDOM_AXES).map(|_| Direction::from_angle(rng.gen_range(0.0..2.0 * PI))));
    let probes: Vec<Point> = dirs.iter().map(|_| random_point(&mut rng)).collect();
    out.push(entry("kappa-subgroup", n, KAPPA_TOL, {
        dirs.par_iter()
            .zip(&probes)
            .map(|(d, q)| Ok(kappa(&m, &invariant_loop(&m, d)?, q, opts)?.value()))
            .collect::<Result<Vec<f64>, _>>()
            .map(|v| (v.iter().map(|k| circle_distance(*k, want)).fold(0.0, f64::max), Some(v[0])))
    }));

    out.push(entry("three-point-agreement", n, KAPPA_TOL, {
        invariant_loop(&m, &Direction::a_axis()).and_then(|lp| {
            let pts = reference_points();
            let ks = pts.iter().map(|q| kappa(&m, &lp, q, opts)).collect::<Result<Vec<_>, _>>()?;
            Ok((phase_spread(&ks), Some(ks[0].value())))
        })
    }));

    let lattice_loop = invariant_loop(&m, &unit_dir(&mut rng)).map(ramp);
    out.push(entry("base-point-independence", n, SPREAD_TOL, {
        lattice_loop.and_then(|lp| Ok((base_point_spread(&m, &lp, &fibonacci_seeded(LATTICE_POINTS, seed), opts)?, None)))
    }));

    let pairs: Vec<(Direction, Direction, Point)> = (0..PRODUCT_PAIRS)
        .map(|_| (unit_dir(&mut rng), unit_dir(&mut rng), random_point(&mut rng)))
        .collect();
    out.push(entry("multiplicativity", n, PRODUCT_TOL, {
        pairs
            .par_iter()
            .map(|(a, b, q)| {
                let (xi, psi) = (invariant_loop(&m, a)?, invariant_loop(&m, b)?);
                let joint = kappa(&m, &product_loop(&xi, &psi)?, q, opts)?;
                let split = kappa(&m, &xi, q, opts)?.compose(&kappa(&m, &psi, q, opts)?);
                Ok(joint.distance(&split))
            })
            .collect::<Result<Vec<f64>, _>>()
            .map(|v| (v.into_iter().fold(0.0, f64::max), None))
    }));

    let fixed: Result<Vec<(f64, f64)>, preq_core::Error> = dirs
        .par_iter()
        .map(|d| {
            let lp = invariant_loop(&m, d)?;
            let w = d.axis_vector();
            let (p, p2) = (Point::new(w), Point::new(-w));
            let short = kappa_at_fixed_point(&m, &lp.f, &p)?;
            let full = kappa(&m, &lp, &p, opts)?;
            let gap = (lp.f.eval(0.0, &p) - lp.f.eval(0.0, &p2)).abs();
            Ok((short.distance(&full), (gap - n.unsigned_abs() as f64).abs()))
        })
        .collect();
    out.push(entry("fixed-point-shortcut", n, FIXED_POINT_TOL, {
        fixed.clone().map(|v| (v.iter().map(|x| x.0).fold(0.0, f64::max), None))
    }));
    out.push(entry("critical-value-gap", n, CRITICAL_GAP_TOL, {
        fixed.map(|v| (v.iter().map(|x| x.1).fold(0.0, f64::max), None))
    }));

    let subgroup = Family::subgroup_rotation(&m, rng.gen_range(0.0..2.0 * PI), 2.0 * PI);
    let q = random_point(&mut rng);
    out.push(entry("omega-subgroup", n, OMEGA_TOL, {
        (0..OMEGA_SAMPLES)
            .into_par_iter()
            .map(|i| omega_eval(&m, &subgroup, (i as f64 + 0.5) / OMEGA_SAMPLES as f64, &q, opts.rel_tol))
            .collect::<Result<Vec<f64>, _>>()
            .map(|v| (v.iter().map(|x| x.abs()).fold(0.0, f64::max), None))
    }));

    let mix = Family::two_axis_mix(&m);
    out.push(entry("derivative-formula", n, DERIVATIVE_TOL, {
        [0.25, 0.5, 0.75]
            .par_iter()
            .map(|&s| kappa_derivative_check(&m, &mix, s, &q, H_S, opts).map(|c| c.rel_err))
            .collect::<Result<Vec<f64>, _>>()
            .map(|v| (v.into_iter().fold(0.0, f64::max), None))
    }));

    let perturbed = Family::perturbed_subgroup(&m, 0.3);
    let w_sub = winding_number(&m, &subgroup, &q, WINDING_SAMPLES, opts);
    out.push(entry("degree-subgroup", n, 0.0, {
        w_sub.as_ref().map(|w| (w.deg().abs() as f64, Some(w.deg() as f64))).map_err(Clone::clone)
    }));
    out.push(entry("winding-additivity", n, 0.0, {
        w_sub.and_then(|wa| {
            let wb = winding_number(&m, &perturbed, &q, WINDING_SAMPLES, opts)?;
            let wab = winding_number(&m, &subgroup.concat(&perturbed), &q, 2 * WINDING_SAMPLES, opts)?;
            Ok(((wab.winding - wa.winding - wb.winding).abs() as f64, Some(wab.winding as f64)))
        })
    }));

    out.push(entry("double-integral", n, DOUBLE_INTEGRAL_TOL, {
        double_integral_check(&m, &subgroup, &q, opts.rel_tol).map(|v| (v.abs(), None))
    }));
    out
}

/// Runs [`suite_for`] for every orbit size; entries keep the order of `n_values`.
pub fn verify_suite(n_values: &[i64], seed: u64, opts: &Transport) -> Vec<SuiteEntry> {
    n_values.par_iter().map(|&n| suite_for(n, seed, opts)).collect::<Vec<_>>().concat()
}
