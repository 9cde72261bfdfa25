//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use preq_core::points::{fibonacci_seeded, fibonacci_sphere, random_point, random_points};
use preq_core::quadrature::GaussLegendre;
use preq_core::{
    base_point_spread, circle_distance, closed_form_flow, double_integral_check, hamiltonian_vector_field,
    integrate_isotopy, invariant_loop, kappa, kappa_at_fixed_point, kappa_derivative_check, omega_eval,
    product_loop, transport_phase, winding_number, Direction, Family, Hamiltonian, Loop, Point, Sphere, Transport,
    Vector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Measure {
    what: &'static str,
    value: f64,
    limit: f64,
}

impl Measure {
    fn new(what: &'static str, value: f64, limit: f64) -> Self {
        Self { what, value, limit }
    }

    fn pass(&self) -> bool {
        self.value <= self.limit
    }
}

type Outcome = Result<Vec<Measure>, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn sphere(n: i64) -> Sphere {
    Sphere::new(n).unwrap()
}

fn opts() -> Transport {
    Transport::default()
}

fn unit_dir(rng: &mut ChaCha8Rng) -> Direction {
    let v = random_point::<f64, _>(rng).vec();
    Direction::with_z(v.x, v.y, v.z)
}

fn ramp(lp: Loop) -> Loop {
    Loop::new(lp.f.with_profile("cosine-ramp", Arc::new(|t: f64| 1.0 - (2.0 * PI * t).cos())))
}

fn c1_kappa_sign() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for n in 1..=4 {
        let m = sphere(n);
        for _ in 0..5 {
            let dir = Direction::from_angle(rng.gen_range(0.0..2.0 * PI));
            let lp = invariant_loop(&m, &dir).map_err(|e| e.to_string())?;
            let q = random_point(&mut rng);
            let k = kappa(&m, &lp, &q, &opts()).map_err(|e| e.to_string())?;
            worst = worst.max(circle_distance(k.value(), (n % 2) as f64 / 2.0));
        }
    }
    Ok(vec![
        Measure::new("phase error", worst, 1e-6),
        Measure::new("runtime s", started.elapsed().as_secs_f64(), 30.0),
    ])
}

fn c2_three_points() -> Outcome {
    let m = sphere(1);
    let lp = invariant_loop(&m, &Direction::a_axis()).map_err(|e| e.to_string())?;
    let pts = [
        Point::north_pole(),
        Point::from_spherical(PI / 2.0, 0.0),
        Point::from_spherical(PI / 2.0, PI / 2.0),
    ];
    let mut worst: f64 = 0.0;
    for q in &pts {
        worst = worst.max(circle_distance(kappa(&m, &lp, q, &opts()).map_err(|e| e.to_string())?.value(), 0.5));
    }
    let spread = base_point_spread(&m, &lp, &pts, &opts()).map_err(|e| e.to_string())?;
    Ok(vec![Measure::new("distance to 1/2", worst, 1e-6), Measure::new("spread", spread, 1e-6)])
}

fn c3_base_points() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for n in [1, 2, 3] {
        let m = sphere(n);
        let a = invariant_loop(&m, &unit_dir(&mut rng)).map_err(|e| e.to_string())?;
        let b = invariant_loop(&m, &unit_dir(&mut rng)).map_err(|e| e.to_string())?;
        for lp in [ramp(a.clone()), product_loop(&a, &b).map_err(|e| e.to_string())?] {
            let s = base_point_spread(&m, &lp, &fibonacci_seeded(100, n as u64), &opts()).map_err(|e| e.to_string())?;
            worst = worst.max(s);
        }
    }
    Ok(vec![Measure::new("spread over 100 points", worst, 1e-5)])
}

fn c4_multiplicativity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let m = sphere(1 + i % 4);
        let xi = invariant_loop(&m, &unit_dir(&mut rng)).map_err(|e| e.to_string())?;
        let psi = invariant_loop(&m, &unit_dir(&mut rng)).map_err(|e| e.to_string())?;
        let q = random_point(&mut rng);
        let run = |lp: &Loop| kappa(&m, lp, &q, &opts()).map_err(|e| e.to_string());
        let joint = run(&product_loop(&xi, &psi).map_err(|e| e.to_string())?)?;
        worst = worst.max(joint.distance(&run(&xi)?.compose(&run(&psi)?)));
    }
    Ok(vec![Measure::new("circle distance", worst, 1e-5)])
}

fn c5_fixed_points() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut agree, mut gap): (f64, f64) = (0.0, 0.0);
    for n in 1..=5 {
        let m = sphere(n);
        let mut dirs = vec![Direction::a_axis(), Direction::b_axis()];
        dirs.extend((0..3).map(|_| Direction::from_angle(rng.gen_range(0.0..2.0 * PI))));
        for dir in dirs {
            let lp = invariant_loop(&m, &dir).map_err(|e| e.to_string())?;
            let w = dir.axis_vector();
            let (p, p2) = (Point::new(w), Point::new(-w));
            let short = kappa_at_fixed_point(&m, &lp.f, &p).map_err(|e| e.to_string())?;
            let full = kappa(&m, &lp, &p, &opts()).map_err(|e| e.to_string())?;
            agree = agree.max(short.distance(&full));
            gap = gap.max(((lp.f.eval(0.0, &p) - lp.f.eval(0.0, &p2)).abs() - n as f64).abs());
        }
    }
    Ok(vec![Measure::new("shortcut vs transport", agree, 1e-6), Measure::new("critical gap vs n", gap, 1e-9)])
}

/// Cap flux of ω minus the Hamiltonian integral along the closed-form orbit.
fn surface_oracle(m: &Sphere, dir: &Direction, q: &Point, offset: f64) -> f64 {
    let w = dir.axis_vector().normalized();
    let helper = if w.x.abs() < 0.9 { Vector::e_x() } else { Vector::e_y() };
    let e1 = helper.tangent_part(&w).normalized();
    let e2 = w.cross(&e1);
    let r = w.dot(&q.vec()).acos();
    let gl = GaussLegendre::<f64>::new(24);
    let flux = gl.integrate(0.0, r, |rho| {
        gl.integrate_composite(0.0, 2.0 * PI, 4, |psi| {
            let radial = e1 * psi.cos() + e2 * psi.sin();
            let u = w * rho.cos() + radial * rho.sin();
            let d_rho = w * (-rho.sin()) + radial * rho.cos();
            let d_psi = (e1 * (-psi.sin()) + e2 * psi.cos()) * rho.sin();
            m.k() * 0.5 * u.dot(&d_rho.cross(&d_psi))
        })
    });
    let sigma = |t: f64| closed_form_flow(dir, PI * t, q).vec();
    let vel = sigma(1e-6) - sigma(0.0);
    let sign = vel.dot(&w.cross(&q.vec())).signum();
    let lp = invariant_loop(m, dir).unwrap();
    let ham = gl.integrate_composite(0.0, 1.0, 4, |t| lp.f.eval(t, &Point::new(sigma(t))) + offset);
    sign * flux - ham
}

fn c6_transport() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut oracle: f64 = 0.0;
    for i in 0..12 {
        let m = sphere(1 + i % 3);
        let gamma: f64 = rng.gen_range(0.0..0.4);
        let beta: f64 = rng.gen_range(0.0..2.0 * PI);
        let axis = Vector::new(gamma.sin() * beta.cos(), gamma.sin() * beta.sin(), gamma.cos());
        let dir = Direction::with_z(axis.x, -axis.y, -axis.z);
        let r: f64 = rng.gen_range(0.2..0.7);
        let side = if gamma > 1e-3 { axis.cross(&Vector::e_z()).normalized() } else { Vector::e_x() };
        let q = Point::new(axis * r.cos() + side * r.sin());
        let offset = if i % 2 == 0 { 0.0 } else { 0.173 };
        let lp = invariant_loop(&m, &dir).map_err(|e| e.to_string())?;
        let lp = Loop::new(lp.f.plus_constant(offset));
        let st = transport_phase(&m, &lp, &q, &opts()).map_err(|e| e.to_string())?;
        if st.transitions != 0 {
            return Err("test curve left the chart".into());
        }
        oracle = oracle.max((st.phase - surface_oracle(&m, &dir, &q, offset)).abs());
    }
    let alt = Transport::default().with_thresholds(PI / 4.0, 3.0 * PI / 4.0);
    let mut frame: f64 = 0.0;
    for i in 0..20 {
        let m = sphere(1 + i % 3);
        let a = invariant_loop(&m, &unit_dir(&mut rng)).map_err(|e| e.to_string())?;
        let lp = if i % 2 == 0 { ramp(a) } else { a };
        let q = random_point(&mut rng);
        let k1 = kappa(&m, &lp, &q, &opts()).map_err(|e| e.to_string())?;
        let k2 = kappa(&m, &lp, &q, &alt).map_err(|e| e.to_string())?;
        frame = frame.max(k1.distance(&k2));
    }
    Ok(vec![Measure::new("ODE vs surface oracle", oracle, 1e-6), Measure::new("threshold change", frame, 1e-8)])
}

fn c7_omega() -> Outcome {
    let q = Point::from_spherical(0.9, 2.2);
    let mut rel: f64 = 0.0;
    let mut omega: f64 = 0.0;
    for n in [1, 2, 3] {
        let m = sphere(n);
        let mix = Family::two_axis_mix(&m);
        for s in [0.2, 0.4, 0.6, 0.8] {
            rel = rel.max(kappa_derivative_check(&m, &mix, s, &q, 1e-4, &opts()).map_err(|e| e.to_string())?.rel_err);
        }
        let sub = Family::subgroup_rotation(&m, 0.0, 2.0 * PI);
        for i in 0..10 {
            let s = (i as f64 + 0.5) / 10.0;
            omega = omega.max(omega_eval(&m, &sub, s, &q, 1e-10).map_err(|e| e.to_string())?.abs());
        }
    }
    let m = sphere(2);
    let shifted = Family::offset(invariant_loop(&m, &Direction::b_axis()).unwrap(), 0.45);
    let slope = kappa_derivative_check(&m, &shifted, 0.5, &q, 1e-3, &opts()).map_err(|e| e.to_string())?;
    Ok(vec![
        Measure::new("mixing slope rel err", rel, 1e-3),
        Measure::new("|Omega| subgroup", omega, 1e-6),
        Measure::new("offset slope rel err", slope.rel_err, 1e-3),
    ])
}

fn c8_winding() -> Outcome {
    let q = Point::from_spherical(1.2, 4.0);
    let mut deg = 0i64;
    let mut additivity = 0i64;
    let mut doubling = 0i64;
    let mut integral: f64 = 0.0;
    for n in [1, 2, 3] {
        let m = sphere(n);
        let cst = Family::constant(invariant_loop(&m, &Direction::a_axis()).unwrap());
        let sub = Family::subgroup_rotation(&m, 0.3, 2.0 * PI);
        let pert = Family::perturbed_subgroup(&m, 0.3);
        let w = |f: &Family, samples| winding_number(&m, f, &q, samples, &opts()).map_err(|e| e.to_string());
        let (wc, ws, wp) = (w(&cst, 16)?, w(&sub, 16)?, w(&pert, 16)?);
        deg = deg.max(wc.deg().abs()).max(ws.deg().abs());
        additivity = additivity.max((w(&sub.concat(&pert), 32)?.winding - ws.winding - wp.winding).abs());
        doubling = doubling.max((w(&sub, 32)?.winding - ws.winding).abs());
        integral = integral.max(double_integral_check(&m, &sub, &q, 1e-10).map_err(|e| e.to_string())?.abs());
    }
    Ok(vec![
        Measure::new("|Deg|", deg as f64, 0.0),
        Measure::new("additivity defect", additivity as f64, 0.0),
        Measure::new("doubling defect", doubling as f64, 0.0),
        Measure::new("double integral", integral, 1e-4),
    ])
}

fn wavy(m: &Sphere) -> Hamiltonian {
    let k = m.k();
    Hamiltonian::new(
        "wavy",
        Arc::new(move |t: f64, u: &Vector| k * ((2.0 * PI * t).cos() * u.x * u.y + u.z * u.z * (1.0 + t))),
        Arc::new(move |t: f64, u: &Vector| {
            Vector::new((2.0 * PI * t).cos() * u.y, (2.0 * PI * t).cos() * u.x, 2.0 * u.z * (1.0 + t)) * k
        }),
    )
}

fn c9_dynamics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut flow: f64 = 0.0;
    for _ in 0..100 {
        let m = sphere(rng.gen_range(1..=4));
        let dir = unit_dir(&mut rng);
        let q = random_point(&mut rng);
        let lp = invariant_loop(&m, &dir).map_err(|e| e.to_string())?;
        let tr = integrate_isotopy(&m, &lp.f, &q, 1e-10).map_err(|e| e.to_string())?;
        for i in 0..50 {
            let t = (i as f64 + 0.5) / 50.0;
            flow = flow.max(tr.at(t).vec().max_abs_diff(&closed_form_flow(&dir, PI * t, &q).vec()));
        }
    }
    let m = sphere(2);
    let k = m.k();
    let quartic = Hamiltonian::autonomous(
        "quartic",
        move |u: &Vector| k * (u.x * u.x * u.y + 0.5 * u.z),
        move |u: &Vector| Vector::new(2.0 * u.x * u.y, u.x * u.x, 0.5) * k,
    );
    let mut drift: f64 = 0.0;
    for p in fibonacci_sphere::<f64>(30) {
        let tr = integrate_isotopy(&m, &quartic, &p, 1e-10).map_err(|e| e.to_string())?;
        let e0 = quartic.eval(0.0, &p);
        for (t, q) in &tr.samples {
            drift = drift.max((quartic.eval(*t, q) - e0).abs());
        }
    }
    let m = sphere(3);
    let f = wavy(&m);
    let mut identity: f64 = 0.0;
    for p in random_points::<f64>(10_000, 12) {
        let t: f64 = rng.gen();
        let u = p.vec();
        let helper = if u.x.abs() < 0.9 { Vector::e_x() } else { Vector::e_y() };
        let e1 = helper.tangent_part(&u).normalized();
        let v = e1 * rng.gen_range(-1.0..1.0) + u.cross(&e1) * rng.gen_range(-1.0..1.0);
        let x = hamiltonian_vector_field(&m, &f, t, &p);
        let res = m.omega_eval(&p, &x, &v).map_err(|e| e.to_string())? + f.grad(t, &p).dot(&v);
        identity = identity.max(res.abs());
    }
    Ok(vec![
        Measure::new("flow vs closed form", flow, 1e-7),
        Measure::new("energy drift", drift, 1e-7),
        Measure::new("i_X omega + df", identity, 1e-8),
    ])
}

fn c10_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_preq");
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let run = Command::new(bin)
            .args(["verify", "--n", "1,2,3", "--seed", "7", "--out"])
            .arg(dir.path())
            .env("PREQ_LOG", "quiet")
            .output()
            .map_err(|e| e.to_string())?;
        if !run.status.success() {
            return Err(format!("verify exited with {}", run.status));
        }
        outputs.push(std::fs::read(dir.path().join("results.json")).map_err(|e| e.to_string())?);
    }
    let differing = outputs[0].iter().zip(&outputs[1]).filter(|(a, b)| a != b).count()
        + outputs[0].len().abs_diff(outputs[1].len());
    Ok(vec![Measure::new("differing bytes", differing as f64, 0.0)])
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("kappa of subgroup loops is (-1)^n", c1_kappa_sign),
        ("three reference base points agree", c2_three_points),
        ("base-point independence", c3_base_points),
        ("multiplicativity", c4_multiplicativity),
        ("fixed-point corollary", c5_fixed_points),
        ("transport consistency", c6_transport),
        ("Omega and derivative formula", c7_omega),
        ("winding and Deg", c8_winding),
        ("dynamics oracle", c9_dynamics),
        ("determinism of verify", c10_determinism),
    ];
    let mut failures = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let (ok, detail) = match check() {
            Ok(ms) => {
                let ok = ms.iter().all(Measure::pass);
                let detail = ms
                    .iter()
                    .map(|m| format!("{} {:.3e} <= {:.0e}", m.what, m.value, m.limit))
                    .collect::<Vec<_>>()
                    .join("; ");
                (ok, detail)
            }
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failures += 1;
        }
        println!("criterion {:>2} {} {title}: {detail}", i + 1, if ok { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
