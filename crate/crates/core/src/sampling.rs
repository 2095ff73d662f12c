//! Direction sampling.  Random streams are keyed by (seed, block) so that results do
//! not depend on how blocks are scheduled across threads.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};

use crate::geom::Vec3;

pub const BLOCK: usize = 4096;

/// Generator for stream `stream` of `seed`.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Split `n` samples into `(block index, length)` chunks.
pub fn blocks(n: usize) -> Vec<(u64, usize)> {
    (0..n.div_ceil(BLOCK)).map(|b| (b as u64, BLOCK.min(n - b * BLOCK))).collect()
}

pub fn uniform_direction<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    let [x, y, z]: [f64; 3] = UnitSphere.sample(rng);
    Vec3::new(x, y, z)
}

/// `len` uniform directions from block `b` of `seed`.
pub fn uniform_block(seed: u64, b: u64, len: usize) -> impl Iterator<Item = Vec3> {
    // Stream 0 is reserved for one-off draws such as a global rotation.
    let mut r = rng(seed, b + 1);
    (0..len).map(move |_| uniform_direction(&mut r))
}

/// Fibonacci lattice of `n` nearly equal-area points.
pub fn fibonacci_sphere(n: usize) -> impl Iterator<Item = Vec3> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n).map(move |i| fibonacci_point(i, n, golden))
}

#[inline]
pub fn fibonacci_point(i: usize, n: usize, golden: f64) -> Vec3 {
    let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
    let r = (1.0 - z * z).max(0.0).sqrt();
    let a = golden * i as f64;
    Vec3::new(r * a.cos(), r * a.sin(), z)
}

/// A uniformly random rotation, as a 3x3 matrix (rows).
#[derive(Clone, Copy, Debug)]
pub struct Rotation([Vec3; 3]);

impl Rotation {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        // Uniform unit quaternion (Shoemake).
        let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
        let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
        let (w, x, y, z) = (
            a * (2.0 * PI * u2).sin(),
            a * (2.0 * PI * u2).cos(),
            b * (2.0 * PI * u3).sin(),
            b * (2.0 * PI * u3).cos(),
        );
        Rotation([
            Vec3::new(1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - z * w), 2.0 * (x * z + y * w)),
            Vec3::new(2.0 * (x * y + z * w), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - x * w)),
            Vec3::new(2.0 * (x * z - y * w), 2.0 * (y * z + x * w), 1.0 - 2.0 * (x * x + y * y)),
        ])
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        Vec3::new(self.0[0].dot(v), self.0[1].dot(v), self.0[2].dot(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_cover_exactly() {
        let b = blocks(10_000);
        assert_eq!(b.iter().map(|x| x.1).sum::<usize>(), 10_000);
        assert_eq!(b.last().unwrap().0, 2);
    }

    #[test]
    fn fibonacci_is_balanced() {
        let n = 10_000;
        let c: Vec3 = fibonacci_sphere(n).sum();
        assert!(c.norm() / (n as f64) < 1e-3);
        assert!(fibonacci_sphere(n).all(|p| (p.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn rotation_is_orthogonal() {
        let r = Rotation::random(&mut rng(5, 0));
        for v in [Vec3::X, Vec3::Y, Vec3::Z] {
            assert!((r.apply(v).norm() - 1.0).abs() < 1e-12);
        }
        assert!(r.apply(Vec3::X).dot(r.apply(Vec3::Y)).abs() < 1e-12);
    }

    #[test]
    fn streams_are_deterministic() {
        let a: Vec<Vec3> = uniform_block(3, 7, 5).collect();
        let b: Vec<Vec3> = uniform_block(3, 7, 5).collect();
        assert_eq!(a, b);
        let c: Vec<Vec3> = uniform_block(3, 8, 5).collect();
        assert_ne!(a, c);
    }
}
