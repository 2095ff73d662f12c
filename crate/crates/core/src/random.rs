//! Random stars, graphs and embeddings for property checks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::geom::{Point3, Vec3};
use crate::graph::{CombinatorialGraph, GraphBuilder, SpatialGraph};
use crate::sampling::uniform_direction;
use crate::vertex::VertexStar;

/// `d` independent uniform tangent directions.
pub fn random_star<R: Rng + ?Sized>(rng: &mut R, d: usize) -> VertexStar {
    let t: Vec<Vec3> = (0..d).map(|_| uniform_direction(rng)).collect();
    VertexStar::new("q", &t).expect("unit vectors are valid tangents")
}

/// A connected 3-regular multigraph without loops on `n` vertices (n even, n >= 2),
/// from the configuration model with rejection.
pub fn random_trivalent<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<CombinatorialGraph> {
    if n < 2 || n % 2 == 1 {
        return Err(Error::BadParameter(format!("trivalent graphs need an even vertex count >= 2, got {n}")));
    }
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| [v; 3]).collect();
    for _ in 0..10_000 {
        stubs.shuffle(rng);
        let edges: Vec<(usize, usize)> = stubs.chunks(2).map(|c| (c[0].min(c[1]), c[0].max(c[1]))).collect();
        if edges.iter().any(|&(a, b)| a == b) {
            continue;
        }
        let g = CombinatorialGraph::numbered(format!("trivalent{n}"), n, edges)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::BadParameter(format!("no connected trivalent graph found on {n} vertices")))
}

/// A connected multigraph on `n` vertices: a random spanning tree plus `extra`
/// further edges, possibly parallel, never loops.
pub fn random_connected<R: Rng + ?Sized>(rng: &mut R, n: usize, extra: usize) -> Result<CombinatorialGraph> {
    if n < 2 {
        return Err(Error::BadParameter(format!("need at least 2 vertices, got {n}")));
    }
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.random_range(0..v), v)).collect();
    for _ in 0..extra {
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        edges.push((a.min(b), a.max(b)));
    }
    CombinatorialGraph::numbered(format!("random{n}"), n, edges)
}

fn in_cube<R: Rng + ?Sized>(rng: &mut R) -> Point3 {
    Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Embed with vertices uniform in the cube `[-1, 1]^3` and between
/// `min_joints` and `max_joints` random joints per edge (at least one per loop).
pub fn random_embedding<R: Rng + ?Sized>(
    rng: &mut R,
    g: &CombinatorialGraph,
    min_joints: usize,
    max_joints: usize,
) -> Result<SpatialGraph> {
    if min_joints > max_joints {
        return Err(Error::BadParameter(format!("joint range {min_joints}..={max_joints} is empty")));
    }
    let mut b = GraphBuilder::new(g.name());
    let vs: Vec<usize> = g.vertex_names().iter().map(|name| b.vertex(name.clone(), in_cube(rng))).collect();
    for &(u, v) in g.edges() {
        let lo = if u == v { min_joints.max(1) } else { min_joints };
        let count = rng.random_range(lo..=max_joints.max(lo));
        let joints = (0..count).map(|_| in_cube(rng)).collect();
        b.auto_edge(vs[u], vs[v], joints);
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::rng;

    #[test]
    fn trivalent_degrees() {
        let mut r = rng(1, 0);
        for n in [2, 4, 6, 8, 10] {
            let g = random_trivalent(&mut r, n).unwrap();
            assert!(g.degrees().iter().all(|&d| d == 3));
            assert_eq!(g.loop_count(), 0);
        }
        assert!(random_trivalent(&mut r, 5).is_err());
    }

    #[test]
    fn connected_and_embedded() {
        let mut r = rng(2, 0);
        for _ in 0..20 {
            let g = random_connected(&mut r, 6, 4).unwrap();
            assert!(g.is_connected());
            let s = random_embedding(&mut r, &g, 0, 2).unwrap();
            assert_eq!(s.combinatorial().edges(), g.edges());
        }
    }
}
