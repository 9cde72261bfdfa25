//! Builtin Hamiltonians and loop families.

use std::f64::consts::PI;
use std::sync::Arc;

use preq_core::{invariant_hamiltonian, reparametrize, Direction, Family, Loop, Sphere};

use crate::config::{FamilySpec, HamiltonianSpec, Profile};
use crate::error::CliError;

/// Unit-period loop generated by `π·(−h_dir)`. Closed only for unit directions.
fn subgroup_loop(m: &Sphere, dir: Direction) -> Result<Loop, CliError> {
    let minus_h = invariant_hamiltonian(m, &dir).scaled(-1.0).with_span(PI);
    let f = reparametrize(&minus_h, PI)
        .map_err(CliError::numerical("hamiltonian"))?
        .with_label(format!("invariant({}, {}, {})", dir.a, dir.b, dir.z));
    Ok(Loop::new(f))
}

fn apply_profile(lp: Loop, profile: Profile) -> Loop {
    match profile {
        Profile::Constant => lp,
        Profile::CosineRamp => Loop::new(lp.f.with_profile("cosine-ramp", Arc::new(|t: f64| 1.0 - (2.0 * PI * t).cos()))),
    }
}

pub fn build_loop(m: &Sphere, spec: &HamiltonianSpec, closure_tol: f64) -> Result<Loop, CliError> {
    let lp = match spec {
        HamiltonianSpec::Zero => Loop::constant(),
        HamiltonianSpec::Invariant { a, b, z } => subgroup_loop(m, Direction::with_z(*a, *b, *z))?,
        HamiltonianSpec::Mix { weights, profile } => {
            apply_profile(subgroup_loop(m, Direction::new(weights[0], weights[1]))?, *profile)
        }
        HamiltonianSpec::Scaled { base, factor } => {
            let inner = build_loop(m, base, closure_tol)?;
            Loop::new(inner.f.scaled(*factor))
        }
    };
    Ok(lp.with_closure_tol(closure_tol))
}

pub fn build_family(
    m: &Sphere,
    spec: &FamilySpec,
    hamiltonian: Option<&HamiltonianSpec>,
    closure_tol: f64,
) -> Result<Family, CliError> {
    let base = || -> Result<Loop, CliError> {
        let h = hamiltonian.ok_or_else(|| CliError::Config {
            element: "hamiltonian".into(),
            message: "this family is built from the scenario hamiltonian".into(),
        })?;
        build_loop(m, h, closure_tol)
    };
    Ok(match spec {
        FamilySpec::Constant => Family::constant(base()?),
        FamilySpec::SubgroupRotation { start, sweep } => Family::subgroup_rotation(m, *start, *sweep),
        FamilySpec::TwoAxisMix => Family::two_axis_mix(m),
        FamilySpec::PerturbedSubgroup { eps } => Family::perturbed_subgroup(m, *eps),
        FamilySpec::Offset { c } => Family::offset(base()?, *c),
    })
}
