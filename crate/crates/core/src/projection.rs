//! Height functions: up/down degrees, normalized local maximum counts, fibers.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{Direction, HalfInt, Point3};
use crate::graph::SpatialGraph;
use crate::sampling;

/// A segment is orthogonal to the direction if `|<e, seg>| <= ORTHO_TOL * |seg|`.
pub const ORTHO_TOL: f64 = 1e-12;
/// Critical heights must be more than this far apart.
pub const HEIGHT_SEP: f64 = 1e-9;
/// Rotation used to nudge a non-generic direction.
pub const PERTURB_ANGLE: f64 = 1e-7;
pub const PERTURB_ATTEMPTS: u64 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Location {
    Vertex { index: usize },
    Joint { edge: usize, index: usize },
}

/// Flattened geometry for evaluating many directions on one graph.
pub struct Projector<'g> {
    graph: &'g SpatialGraph,
    points: Vec<Point3>,
    locations: Vec<Location>,
    nbr_start: Vec<usize>,
    nbr: Vec<usize>,
    segments: Vec<(usize, usize, f64)>,
    seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalPoint {
    pub label: String,
    pub location: Location,
    pub height: f64,
    pub up: u32,
    pub down: u32,
    pub nlm: HalfInt,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectionProfile {
    pub direction: Direction,
    /// Vertices and extremal joints, highest first.
    pub points: Vec<CriticalPoint>,
    pub mu: HalfInt,
    pub width: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct Genericity {
    pub generic: bool,
    /// What breaks genericity, if anything.
    pub witness: Option<String>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FiberCount {
    pub level: f64,
    /// Segments crossing the level, counted with a half-open rule.
    pub crossings: i64,
    /// 2 * sum of nlm over points above the level.
    pub from_nlm: i64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ResolvedMu {
    pub mu: HalfInt,
    /// The direction actually used.
    pub direction: Direction,
    /// Number of perturbations applied (0 if the input was generic).
    pub perturbations: u64,
}

impl<'g> Projector<'g> {
    pub fn new(graph: &'g SpatialGraph) -> Self {
        let nv = graph.vertices().len();
        let mut points: Vec<Point3> = graph.vertices().iter().map(|v| v.pos).collect();
        let mut locations: Vec<Location> = (0..nv).map(|index| Location::Vertex { index }).collect();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nv];
        let mut segments = Vec::new();
        for (k, e) in graph.edges().iter().enumerate() {
            let mut chain = vec![e.ends[0]];
            for (j, &p) in e.joints.iter().enumerate() {
                points.push(p);
                locations.push(Location::Joint { edge: k, index: j });
                adj.push(Vec::new());
                chain.push(points.len() - 1);
            }
            chain.push(e.ends[1]);
            for w in chain.windows(2) {
                adj[w[0]].push(w[1]);
                adj[w[1]].push(w[0]);
                segments.push((w[0], w[1], points[w[0]].dist(points[w[1]])));
            }
        }
        let mut nbr_start = Vec::with_capacity(adj.len() + 1);
        let mut nbr = Vec::new();
        nbr_start.push(0);
        for a in adj {
            nbr.extend(a);
            nbr_start.push(nbr.len());
        }
        Projector { graph, points, locations, nbr_start, nbr, segments, seed: graph.content_hash() }
    }

    pub fn graph(&self) -> &SpatialGraph {
        self.graph
    }

    pub fn heights(&self, e: Direction) -> Vec<f64> {
        self.points.iter().map(|&p| e.height(p)).collect()
    }

    fn label(&self, i: usize) -> String {
        match self.locations[i] {
            Location::Vertex { index } => self.graph.vertex(index).id.clone(),
            Location::Joint { edge, index } => format!("{}[{}]", self.graph.edge(edge).id, index),
        }
    }

    /// (up, down) edge-end counts at point `i`; assumes no orthogonal segment.
    #[inline]
    fn updown(&self, i: usize, h: &[f64]) -> (u32, u32) {
        let mut up = 0;
        let mut down = 0;
        for &j in &self.nbr[self.nbr_start[i]..self.nbr_start[i + 1]] {
            if h[j] > h[i] {
                up += 1;
            } else {
                down += 1;
            }
        }
        (up, down)
    }

    fn is_critical(&self, i: usize, h: &[f64]) -> bool {
        match self.locations[i] {
            Location::Vertex { .. } => true,
            Location::Joint { .. } => {
                let (u, d) = self.updown(i, h);
                u == 0 || d == 0
            }
        }
    }

    pub fn genericity(&self, e: Direction) -> Genericity {
        let h = self.heights(e);
        let witness = self.witness(&h);
        Genericity { generic: witness.is_none(), witness }
    }

    fn witness(&self, h: &[f64]) -> Option<String> {
        for &(a, b, len) in &self.segments {
            if (h[a] - h[b]).abs() <= ORTHO_TOL * len {
                return Some(format!("segment {} - {} is orthogonal to the direction", self.label(a), self.label(b)));
            }
        }
        let mut crit: Vec<usize> = (0..self.points.len()).filter(|&i| self.is_critical(i, h)).collect();
        crit.sort_by(|&a, &b| h[a].total_cmp(&h[b]));
        for w in crit.windows(2) {
            if h[w[1]] - h[w[0]] <= HEIGHT_SEP {
                return Some(format!("{} and {} share a critical height", self.label(w[0]), self.label(w[1])));
            }
        }
        None
    }

    /// 2 * mu(e), or `None` if `e` is not generic.
    pub fn mu_doubled(&self, e: Direction) -> Option<i64> {
        let h = self.heights(e);
        if self.witness(&h).is_some() {
            return None;
        }
        Some(self.mu_doubled_unchecked(&h))
    }

    fn mu_doubled_unchecked(&self, h: &[f64]) -> i64 {
        (0..self.points.len())
            .map(|i| {
                let (u, d) = self.updown(i, h);
                (d as i64 - u as i64).max(0)
            })
            .sum()
    }

    /// 2 * mu at `e`, nudging a non-generic direction as in [`Projector::resolve`].
    pub fn mu_doubled_resolved(&self, e: Direction) -> Option<(i64, u64)> {
        if let Some(m) = self.mu_doubled(e) {
            return Some((m, 0));
        }
        (1..=PERTURB_ATTEMPTS).find_map(|k| self.mu_doubled(perturb(e, self.seed, k)).map(|m| (m, k)))
    }

    /// mu at `e`; a non-generic direction is tilted by [`PERTURB_ANGLE`] about
    /// pseudorandom axes seeded from the graph, up to [`PERTURB_ATTEMPTS`] times.
    pub fn resolve(&self, e: Direction) -> Result<ResolvedMu> {
        if let Some(m) = self.mu_doubled(e) {
            return Ok(ResolvedMu { mu: HalfInt::from_doubled(m), direction: e, perturbations: 0 });
        }
        for k in 1..=PERTURB_ATTEMPTS {
            let d = perturb(e, self.seed, k);
            if let Some(m) = self.mu_doubled(d) {
                return Ok(ResolvedMu { mu: HalfInt::from_doubled(m), direction: d, perturbations: k });
            }
        }
        Err(Error::NonGeneric(self.genericity(e).witness.unwrap_or_default()))
    }

    fn require_generic(&self, e: Direction) -> Result<Vec<f64>> {
        let h = self.heights(e);
        match self.witness(&h) {
            Some(w) => Err(Error::NonGeneric(w)),
            None => Ok(h),
        }
    }

    pub fn profile(&self, e: Direction) -> Result<ProjectionProfile> {
        let h = self.require_generic(e)?;
        let mut points: Vec<CriticalPoint> = (0..self.points.len())
            .filter(|&i| self.is_critical(i, &h))
            .map(|i| {
                let (up, down) = self.updown(i, &h);
                CriticalPoint {
                    label: self.label(i),
                    location: self.locations[i],
                    height: h[i],
                    up,
                    down,
                    nlm: HalfInt::from_doubled(down as i64 - up as i64),
                }
            })
            .collect();
        points.sort_by(|a, b| b.height.total_cmp(&a.height));
        let mu = HalfInt::from_doubled(self.mu_doubled_unchecked(&h));
        let width = self.width_from_heights(&h);
        Ok(ProjectionProfile { direction: e, points, mu, width })
    }

    fn crossings(&self, h: &[f64], s: f64) -> i64 {
        self.segments.iter().filter(|&&(a, b, _)| (h[a] < s) != (h[b] < s)).count() as i64
    }

    fn nlm_above(&self, h: &[f64], s: f64) -> i64 {
        (0..self.points.len())
            .filter(|&i| h[i] > s)
            .map(|i| {
                let (u, d) = self.updown(i, h);
                d as i64 - u as i64
            })
            .sum()
    }

    pub fn fiber_count(&self, e: Direction, s: f64) -> Result<FiberCount> {
        let h = self.require_generic(e)?;
        if (0..self.points.len()).any(|i| self.is_critical(i, &h) && (h[i] - s).abs() <= HEIGHT_SEP) {
            return Err(Error::CriticalLevel(s));
        }
        let fc = FiberCount { level: s, crossings: self.crossings(&h, s), from_nlm: self.nlm_above(&h, s) };
        if fc.crossings != fc.from_nlm {
            return Err(Error::FiberIdentity { level: s, geometric: fc.crossings, predicted: fc.from_nlm });
        }
        Ok(fc)
    }

    fn width_from_heights(&self, h: &[f64]) -> u32 {
        let mut crit: Vec<f64> = (0..self.points.len()).filter(|&i| self.is_critical(i, h)).map(|i| h[i]).collect();
        crit.sort_by(f64::total_cmp);
        crit.windows(2).map(|w| self.crossings(h, 0.5 * (w[0] + w[1])) as u32).max().unwrap_or(0)
    }

    /// Largest fiber over the gaps between consecutive critical heights.
    pub fn width(&self, e: Direction) -> Result<u32> {
        let h = self.require_generic(e)?;
        Ok(self.width_from_heights(&h))
    }

    /// (up, down) at graph vertex `v`.
    pub fn vertex_updown(&self, e: Direction, v: usize) -> Result<(u32, u32)> {
        let h = self.heights(e);
        for &j in &self.nbr[self.nbr_start[v]..self.nbr_start[v + 1]] {
            let len = self.points[v].dist(self.points[j]);
            if (h[j] - h[v]).abs() <= ORTHO_TOL * len {
                return Err(Error::NonGeneric(format!("an edge at {} is orthogonal to the direction", self.label(v))));
            }
        }
        Ok(self.updown(v, &h))
    }
}

/// Tilt `e` by [`PERTURB_ANGLE`] about an axis drawn from stream `attempt` of `seed`.
pub fn perturb(e: Direction, seed: u64, attempt: u64) -> Direction {
    let axis = sampling::uniform_direction(&mut sampling::rng(seed, attempt));
    e.tilt(axis, PERTURB_ANGLE)
}

pub fn is_generic(g: &SpatialGraph, e: Direction) -> Genericity {
    Projector::new(g).genericity(e)
}

pub fn updown_degrees(g: &SpatialGraph, e: Direction, vertex: &str) -> Result<(u32, u32)> {
    Projector::new(g).vertex_updown(e, g.vertex_index(vertex)?)
}

/// Normalized local maximum count (d- - d+)/2 at a vertex.
pub fn nlm(g: &SpatialGraph, e: Direction, vertex: &str) -> Result<HalfInt> {
    let (u, d) = updown_degrees(g, e, vertex)?;
    Ok(HalfInt::from_doubled(d as i64 - u as i64))
}

/// Sum of the positive parts of nlm over vertices and joints; errors if `e` is not generic.
pub fn mu(g: &SpatialGraph, e: Direction) -> Result<HalfInt> {
    let p = Projector::new(g);
    p.mu_doubled(e)
        .map(HalfInt::from_doubled)
        .ok_or_else(|| Error::NonGeneric(p.genericity(e).witness.unwrap_or_default()))
}

/// [`mu`], but nudges a non-generic direction first.
pub fn mu_resolved(g: &SpatialGraph, e: Direction) -> Result<ResolvedMu> {
    Projector::new(g).resolve(e)
}

pub fn profile(g: &SpatialGraph, e: Direction) -> Result<ProjectionProfile> {
    Projector::new(g).profile(e)
}

pub fn fiber_count(g: &SpatialGraph, e: Direction, s: f64) -> Result<FiberCount> {
    Projector::new(g).fiber_count(e, s)
}

pub fn width_in_direction(g: &SpatialGraph, e: Direction) -> Result<u32> {
    Projector::new(g).width(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec3;
    use crate::graph::{load_graph, GraphBuilder};
    use crate::inscribe::circle_polygon;

    fn theta() -> SpatialGraph {
        load_graph(
            r#"{"name": "theta",
            "vertices": [{"id": "p", "pos": [0, 1, 0]}, {"id": "q", "pos": [0, -1, 0]}],
            "edges": [
                {"id": "a", "ends": ["p", "q"], "polyline": [[1, 0, 0]]},
                {"id": "b", "ends": ["p", "q"]},
                {"id": "c", "ends": ["p", "q"], "polyline": [[-1, 0, 0]]}]}"#,
        )
        .unwrap()
    }

    fn dir(x: f64, y: f64, z: f64) -> Direction {
        Direction::new(Vec3::new(x, y, z)).unwrap()
    }

    #[test]
    fn theta_vertical() {
        let g = theta();
        let e = dir(0.1, 1.0, 0.05);
        assert_eq!(nlm(&g, e, "p").unwrap(), HalfInt::from_doubled(3));
        assert_eq!(nlm(&g, e, "q").unwrap(), HalfInt::from_doubled(-3));
        assert_eq!(mu(&g, e).unwrap(), HalfInt::from_doubled(3));
        assert_eq!(width_in_direction(&g, e).unwrap(), 3);
    }

    #[test]
    fn theta_sideways_has_joint_extrema() {
        let g = theta();
        let e = dir(1.0, 0.1, 0.05);
        let p = profile(&g, e).unwrap();
        assert_eq!(p.points.len(), 4);
        assert_eq!(p.points[0].label, "a[0]");
        assert_eq!(p.mu, HalfInt::from_doubled(3));
        assert_eq!(p.points.iter().map(|c| c.nlm).sum::<HalfInt>(), HalfInt::ZERO);
    }

    #[test]
    fn fiber_identity() {
        let g = theta();
        let e = dir(1.0, 0.3, 0.05);
        let p = Projector::new(&g);
        for s in [-0.9, -0.1, 0.1, 0.29, 0.5, 0.9] {
            let fc = p.fiber_count(e, s).unwrap();
            assert_eq!(fc.crossings, fc.from_nlm, "level {s}");
        }
    }

    #[test]
    fn orthogonal_segment_is_not_generic() {
        let g = theta();
        let w = is_generic(&g, Direction::x());
        assert!(!w.generic);
        assert!(w.witness.unwrap().contains("orthogonal"));
        assert!(matches!(mu(&g, Direction::x()), Err(Error::NonGeneric(_))));
        let r = mu_resolved(&g, Direction::x()).unwrap();
        assert!(r.perturbations >= 1);
        assert_eq!(r.mu, HalfInt::from_doubled(3));
    }

    #[test]
    fn equal_heights_are_not_generic() {
        let mut b = GraphBuilder::new("arch");
        let u = b.vertex("u", Vec3::ZERO);
        let v = b.vertex("v", Vec3::X);
        b.edge("a", u, v, vec![Vec3::new(0.5, 1.0, 0.0)]);
        let g = b.build().unwrap();
        let w = is_generic(&g, Direction::y());
        assert!(!w.generic);
        assert!(w.witness.unwrap().contains("share"));
        // Non-extremal joints may share heights.
        let g = circle_polygon(1.0, 4).unwrap();
        assert!(is_generic(&g, dir(1.0, 0.0, 0.3)).generic);
    }

    #[test]
    fn critical_level_rejected() {
        let g = theta();
        let e = dir(0.1, 1.0, 0.05);
        let h = e.height(Vec3::new(0.0, 1.0, 0.0));
        assert!(matches!(fiber_count(&g, e, h), Err(Error::CriticalLevel(_))));
    }
}
