//! Point sets on the sphere: quasi-uniform lattices and seeded random draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::Real;
use crate::sphere::SpherePoint;
use crate::vec3::Vec3;

/// Fibonacci (golden-angle) lattice of `count` points.
pub fn fibonacci_sphere<T: Real>(count: usize) -> Vec<SpherePoint<T>> {
    let golden = T::PI() * (T::lit(3.0) - T::lit(5.0).sqrt());
    let nf = T::from_usize(count).unwrap();
    (0..count)
        .map(|i| {
            let i = T::from_usize(i).unwrap();
            let z = T::one() - (T::lit(2.0) * i + T::one()) / nf;
            let r = (T::one() - z * z).max(T::zero()).sqrt();
            let (s, c) = (golden * i).sin_cos();
            SpherePoint::new(Vec3::new(r * c, r * s, z))
        })
        .collect()
}

/// Fibonacci lattice rotated by a seed-determined rotation.
pub fn fibonacci_seeded<T: Real>(count: usize, seed: u64) -> Vec<SpherePoint<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let axis = random_point::<T, _>(&mut rng).vec();
    let angle = T::lit(rng.gen::<f64>()) * T::two_pi();
    fibonacci_sphere(count)
        .into_iter()
        .map(|p| SpherePoint::new(rotate(&p.vec(), &axis, angle)))
        .collect()
}

/// Uniformly distributed point (area measure).
pub fn random_point<T: Real, R: Rng>(rng: &mut R) -> SpherePoint<T> {
    let z = T::lit(rng.gen_range(-1.0..=1.0));
    let phi = T::lit(rng.gen::<f64>()) * T::two_pi();
    let r = (T::one() - z * z).max(T::zero()).sqrt();
    SpherePoint::new(Vec3::new(r * phi.cos(), r * phi.sin(), z))
}

pub fn random_points<T: Real>(count: usize, seed: u64) -> Vec<SpherePoint<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_point(&mut rng)).collect()
}

/// Rodrigues rotation of `v` about the unit `axis`.
pub fn rotate<T: Real>(v: &Vec3<T>, axis: &Vec3<T>, angle: T) -> Vec3<T> {
    let (s, c) = angle.sin_cos();
    *v * c + axis.cross(v) * s + *axis * (axis.dot(v) * (T::one() - c))
}
