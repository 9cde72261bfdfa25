//! Holonomy of the natural prequantum transport along loops of Hamiltonian
//! symplectomorphisms of the quantizable sphere.
//!
//! The numeric kernels are generic over [`Real`] (`f32`/`f64`); the aliases
//! below fix `f64`, the precision every published tolerance assumes.

pub mod dynamics;
pub mod error;
pub mod holonomy;
pub mod loops;
pub mod ode;
pub mod points;
pub mod quadrature;
pub mod scalar;
pub mod sphere;
pub mod su2;
pub mod vec3;

pub use dynamics::{
    hamiltonian_vector_field, integrate_isotopy, normalize, reparametrize, HamiltonianLoop, TimeDepHamiltonian,
    Trajectory,
};
pub use error::{Error, Result};
pub use holonomy::{
    action_integral, base_point_spread, berry_phase, kappa, kappa_at_fixed_point, kappa_many, phase_spread,
    product_loop, transport_phase, BerryPhase, PhaseState, TransportOptions, UnitPhase,
};
pub use loops::{
    double_integral_check, kappa_derivative_check, omega_eval, winding_number, DerivativeCheck, LoopFamily, Winding,
};
pub use scalar::{circle_distance, Real};
pub use sphere::{Chart, ChartFrame, OrbitSphere, SpherePoint};
pub use su2::{
    act, closed_form_flow, exp_su2, invariant_field, invariant_hamiltonian, invariant_loop, AlgebraDirection,
    SU2Element,
};
pub use vec3::Vec3;

pub type Sphere = OrbitSphere<f64>;
pub type Point = SpherePoint<f64>;
pub type Vector = Vec3<f64>;
pub type Hamiltonian = TimeDepHamiltonian<f64>;
pub type Loop = HamiltonianLoop<f64>;
pub type Family = LoopFamily<f64>;
pub type Phase = UnitPhase<f64>;
pub type Direction = AlgebraDirection<f64>;
pub type Su2 = SU2Element<f64>;
pub type Transport = TransportOptions<f64>;
