//! Task execution.

use std::f64::consts::PI;

use log::{debug, info};
use preq_core::{
    act, exp_su2, invariant_loop, kappa_at_fixed_point, kappa_derivative_check, omega_eval, transport_phase,
    winding_number, Direction, Family, Point, Sphere, Transport, UnitPhase,
};
use rayon::prelude::*;

use crate::config::{Scenario, Task};
use crate::error::CliError;
use crate::record::{OmegaRow, PlotRow, PointValue, ResultRecord, SuiteEntry, WindingSummary};
use crate::registry::{build_family, build_loop};
use crate::suite::{self, reference_points, subgroup_phase, DERIVATIVE_TOL, KAPPA_TOL};

const DERIVATIVE_STEP: f64 = 1e-4;
const DEMO_SWEEP_SAMPLES: usize = 16;
const UNWRAP_LIMIT: f64 = 0.25;

fn transport(sc: &Scenario) -> Transport {
    Transport::with_tol(sc.tolerances.flow_rel_tol)
}

fn sphere(sc: &Scenario) -> Result<Sphere, CliError> {
    Sphere::new(sc.n).map_err(|e| CliError::Config {
        element: "n".into(),
        message: e.to_string(),
    })
}

fn point_value(q: &Point, k: UnitPhase<f64>, action: Option<f64>, transitions: usize) -> PointValue {
    let (theta, phi) = q.spherical_coords();
    let c = k.as_complex();
    PointValue {
        theta,
        phi,
        phase_rev: k.value(),
        kappa_re: c.re,
        kappa_im: c.im,
        action,
        chart_transitions: transitions,
    }
}

fn plot_row(s: f64, lift: f64) -> PlotRow {
    let c = UnitPhase::new(lift).as_complex();
    PlotRow {
        s,
        phase_rev: lift,
        kappa_re: c.re,
        kappa_im: c.im,
    }
}

pub fn run(sc: &Scenario) -> Result<ResultRecord, CliError> {
    sc.validate()?;
    info!("task {} (n = {}, seed = {})", sc.task.name(), sc.n, sc.seed);
    match sc.task {
        Task::Kappa | Task::Action => run_kappa(sc),
        Task::Omega => run_omega(sc),
        Task::Winding => run_winding(sc),
        Task::Verify => Ok(run_verify(sc)),
        Task::Su2Demo => run_su2_demo(sc),
    }
}

fn run_kappa(sc: &Scenario) -> Result<ResultRecord, CliError> {
    let m = sphere(sc)?;
    let opts = transport(sc);
    let spec = sc.hamiltonian.as_ref().expect("validated");
    let lp = build_loop(&m, spec, sc.tolerances.closure_tol)?;
    let closure = lp
        .check_closure(&m, sc.tolerances.flow_rel_tol)
        .map_err(CliError::numerical("hamiltonian"))?;
    debug!("closure deviation {closure:e}");
    let normalized = lp.normalized(&m);
    let points = sc.base_points.resolve(sc.seed);
    let states = points
        .par_iter()
        .enumerate()
        .map(|(i, q)| transport_phase(&m, &normalized, q, &opts).map_err(CliError::numerical(format!("base_points[{i}]"))))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rec = ResultRecord::new(sc);
    let phases: Vec<UnitPhase<f64>> = states.iter().map(|s| s.unit_phase()).collect();
    for (q, st) in points.iter().zip(&states) {
        let action = (sc.task == Task::Action).then_some(st.phase);
        rec.points.push(point_value(q, st.unit_phase(), action, st.transitions));
    }
    let spread = preq_core::phase_spread(&phases);
    rec.spread = Some(spread);
    rec.push(SuiteEntry::new("base-point-spread", Some(sc.n), spread, sc.tolerances.phase_tol));
    Ok(rec)
}

fn run_omega(sc: &Scenario) -> Result<ResultRecord, CliError> {
    let m = sphere(sc)?;
    let opts = transport(sc);
    let fam = build_family(&m, sc.family.as_ref().expect("validated"), sc.hamiltonian.as_ref(), sc.tolerances.closure_tol)?;
    let points = sc.base_points.resolve(sc.seed);
    let mut rec = ResultRecord::new(sc);
    for &s in &sc.s_values {
        let values = points
            .par_iter()
            .map(|q| omega_eval(&m, &fam, s, q, opts.rel_tol))
            .collect::<Result<Vec<f64>, _>>()
            .map_err(CliError::numerical(format!("family at s = {s}")))?;
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        rec.push(SuiteEntry::new(&format!("omega-spread s={s}"), Some(sc.n), hi - lo, sc.tolerances.phase_tol));
        let chk = kappa_derivative_check(&m, &fam, s, &points[0], DERIVATIVE_STEP, &opts)
            .map_err(CliError::numerical(format!("family at s = {s}")))?;
        rec.push(
            SuiteEntry::new(&format!("derivative-formula s={s}"), Some(sc.n), chk.rel_err, DERIVATIVE_TOL)
                .with_value(chk.lhs),
        );
        rec.omega.push(OmegaRow { s, values, spread: hi - lo });
    }
    Ok(rec)
}

fn run_winding(sc: &Scenario) -> Result<ResultRecord, CliError> {
    let m = sphere(sc)?;
    let opts = transport(sc);
    let fam = build_family(&m, sc.family.as_ref().expect("validated"), sc.hamiltonian.as_ref(), sc.tolerances.closure_tol)?;
    let closure = fam.closure_residual(&m).map_err(CliError::numerical("family"))?;
    if closure > sc.tolerances.closure_tol {
        return Err(CliError::Numerical {
            element: "family".into(),
            source: preq_core::Error::NotClosed {
                deviation: closure,
                tol: sc.tolerances.closure_tol,
            },
        });
    }
    let q = sc.base_points.resolve(sc.seed)[0];
    let w = winding_number(&m, &fam, &q, sc.s_samples, &opts).map_err(CliError::numerical("family"))?;
    info!("winding {} over {} samples", w.winding, w.samples);
    let mut rec = ResultRecord::new(sc);
    rec.plot = w.s.iter().zip(&w.lift).map(|(&s, &l)| plot_row(s, l)).collect();
    rec.winding = Some(WindingSummary {
        winding: w.winding,
        deg: w.deg(),
        samples: w.samples,
        residual: w.residual,
    });
    rec.deg = Some(w.deg());
    rec.push(SuiteEntry::new("winding-integrality", Some(sc.n), w.residual, sc.tolerances.phase_tol.max(1e-3)));
    Ok(rec)
}

fn run_verify(sc: &Scenario) -> ResultRecord {
    let mut rec = ResultRecord::new(sc);
    for e in suite::verify_suite(&sc.orbit_sizes(), sc.seed, &transport(sc)) {
        rec.push(e);
    }
    rec
}

/// Phase of `s ↦ κ` along a family, lifted continuously.
fn phase_lift(m: &Sphere, fam: &Family, q: &Point, samples: usize, opts: &Transport) -> Result<Vec<PlotRow>, CliError> {
    let raw = (0..=samples)
        .into_par_iter()
        .map(|i| preq_core::loops::family_phase(m, fam, i as f64 / samples as f64, q, opts))
        .collect::<Result<Vec<f64>, _>>()
        .map_err(CliError::numerical("family"))?;
    let mut lift = vec![raw[0].rem_euclid(1.0)];
    for w in raw.windows(2) {
        let step = w[1] - w[0] - (w[1] - w[0]).round();
        if step.abs() >= UNWRAP_LIMIT {
            return Err(CliError::Numerical {
                element: "family".into(),
                source: preq_core::Error::Unwrap { jump: step.abs(), samples },
            });
        }
        lift.push(lift.last().unwrap() + step);
    }
    Ok(lift.iter().enumerate().map(|(i, &l)| plot_row(i as f64 / samples as f64, l)).collect())
}

fn run_su2_demo(sc: &Scenario) -> Result<ResultRecord, CliError> {
    let m = sphere(sc)?;
    let opts = transport(sc);
    let numerical = |what: &str| CliError::numerical(what.to_string());
    let lp = invariant_loop(&m, &Direction::a_axis()).map_err(numerical("hamiltonian"))?;
    let mut rec = ResultRecord::new(sc);
    let want = subgroup_phase(sc.n);

    let pts = reference_points();
    let mut phases = Vec::new();
    for q in &pts {
        let st = transport_phase(&m, &lp, q, &opts).map_err(numerical("base point"))?;
        phases.push(st.unit_phase());
        rec.points.push(point_value(q, st.unit_phase(), None, st.transitions));
    }
    let spread = preq_core::phase_spread(&phases);
    rec.spread = Some(spread);
    rec.push(SuiteEntry::new("three-point-agreement", Some(sc.n), spread, KAPPA_TOL));
    let worst = phases.iter().map(|k| preq_core::circle_distance(k.value(), want)).fold(0.0, f64::max);
    rec.push(SuiteEntry::new("kappa-subgroup", Some(sc.n), worst, KAPPA_TOL).with_value(phases[0].value()));

    let w = Direction::a_axis().axis_vector();
    let (p, p2) = (Point::new(w), Point::new(-w));
    let (fp, fp2) = (lp.f.eval(0.0, &p), lp.f.eval(0.0, &p2));
    let short = kappa_at_fixed_point(&m, &lp.f, &p).map_err(numerical("fixed point"))?;
    rec.push(SuiteEntry::new("fixed-point-shortcut", Some(sc.n), short.distance(&phases[0]), KAPPA_TOL));
    rec.push(SuiteEntry::new(
        "critical-value-gap",
        Some(sc.n),
        ((fp - fp2).abs() - sc.n.unsigned_abs() as f64).abs(),
        suite::CRITICAL_GAP_TOL,
    ));

    // orbit of the north pole under t ↦ exp(tA), t ∈ [0, π]
    let orbit: Vec<[f64; 3]> = (0..=8)
        .map(|i| {
            let t = PI * i as f64 / 8.0;
            let (theta, phi) = act(&exp_su2(&Direction::a_axis(), t), &Point::north_pole()).spherical_coords();
            [t, theta, phi]
        })
        .collect();
    rec.demo = Some(serde_json::json!({
        "loop": lp.label(),
        "critical_points": [p.spherical_coords(), p2.spherical_coords()],
        "critical_values": [fp, fp2],
        "fixed_point_phase": short.value(),
        "north_pole_orbit": orbit,
        "sweep": "subgroup axis rotated from A to B",
    }));

    let sweep = Family::subgroup_rotation(&m, 0.0, PI / 2.0);
    rec.plot = phase_lift(&m, &sweep, &pts[1], DEMO_SWEEP_SAMPLES, &opts)?;
    let drift = rec.plot.iter().map(|r| preq_core::circle_distance(r.phase_rev, want)).fold(0.0, f64::max);
    rec.push(SuiteEntry::new("homotopy-invariance", Some(sc.n), drift, KAPPA_TOL));
    Ok(rec)
}
