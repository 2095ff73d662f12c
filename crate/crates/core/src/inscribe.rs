//! Polygons inscribed in parametric curves.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geom::{Point3, Vec3};
use crate::graph::{GraphBuilder, SpatialGraph};

/// A parametric curve sampled at strictly increasing parameters.
pub struct SampledArc<'a> {
    pub curve: &'a dyn Fn(f64) -> Point3,
    pub params: Vec<f64>,
    /// If set, the last sample is joined back to the first.
    pub closed: bool,
}

impl<'a> SampledArc<'a> {
    /// `n` samples evenly spaced in `[t0, t1]`; for a closed curve `t1` is omitted.
    pub fn uniform(curve: &'a dyn Fn(f64) -> Point3, t0: f64, t1: f64, n: usize, closed: bool) -> Self {
        let params = if closed {
            (0..n).map(|i| t0 + (t1 - t0) * i as f64 / n as f64).collect()
        } else if n == 1 {
            vec![t0]
        } else {
            (0..n).map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64).collect()
        };
        SampledArc { curve, params, closed }
    }
}

/// Inscribe a polygon: an open arc becomes an edge between two leaves, a closed one
/// a loop at the first sample.
pub fn inscribe(name: &str, arc: &SampledArc<'_>) -> Result<SpatialGraph> {
    let n = arc.params.len();
    if n < 2 {
        return Err(Error::BadParameter(format!("need at least 2 samples, got {n}")));
    }
    if arc.params.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
        return Err(Error::BadParameter("sample parameters must be strictly increasing".into()));
    }
    let pts: Vec<Point3> = arc.params.iter().map(|&t| (arc.curve)(t)).collect();
    let mut b = GraphBuilder::new(name);
    if arc.closed {
        let v = b.vertex("v0", pts[0]);
        b.edge("arc", v, v, pts[1..].to_vec());
    } else {
        let u = b.vertex("v0", pts[0]);
        let v = b.vertex("v1", pts[n - 1]);
        b.edge("arc", u, v, pts[1..n - 1].to_vec());
    }
    b.build()
}

/// Regular `n`-gon inscribed in a circle of radius `r` in the xy-plane.
pub fn circle_polygon(r: f64, n: usize) -> Result<SpatialGraph> {
    let f = move |t: f64| Vec3::new(r * t.cos(), r * t.sin(), 0.0);
    inscribe("circle", &SampledArc::uniform(&f, 0.0, 2.0 * PI, n, true))
}

/// Unit circle through `(0, +-1, 0)` plus the straight diameter between them; each
/// half circle is an `n`-segment polygon.
pub fn planar_theta(n: usize) -> Result<SpatialGraph> {
    if n < 2 {
        return Err(Error::BadParameter(format!("need at least 2 segments per arc, got {n}")));
    }
    let mut b = GraphBuilder::new(format!("planar_theta{n}"));
    let p = b.vertex("p", Vec3::new(0.0, 1.0, 0.0));
    let q = b.vertex("q", Vec3::new(0.0, -1.0, 0.0));
    for (id, side) in [("right", -1.0), ("left", 1.0)] {
        let joints = (1..n)
            .map(|j| {
                let t = PI / 2.0 + side * PI * j as f64 / n as f64;
                Vec3::new(t.cos(), t.sin(), 0.0)
            })
            .collect();
        b.edge(id, p, q, joints);
    }
    b.edge("chord", p, q, vec![]);
    b.build()
}

/// The curve `(x, -(x/pi) sin(pi/x))`, of infinite total curvature near 0.
pub fn wild_curve(x: f64) -> Point3 {
    Vec3::new(x, -(x / PI) * (PI / x).sin(), 0.0)
}

/// Parameters covering arches `first..=last` of [`wild_curve`] with `per_arch`
/// evenly spaced samples each; arch `n` spans `[1/(n+1), 1/n]`.
pub fn wild_arch_params(first: usize, last: usize, per_arch: usize) -> Vec<f64> {
    let mut xs = Vec::with_capacity((last + 1 - first) * per_arch + 1);
    for n in (first..=last).rev() {
        let (a, b) = (1.0 / (n + 1) as f64, 1.0 / n as f64);
        xs.extend((0..per_arch).map(|j| a + (b - a) * j as f64 / per_arch as f64));
    }
    xs.push(1.0 / first as f64);
    xs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_square() {
        let g = circle_polygon(1.0, 4).unwrap();
        assert_eq!(g.vertices().len(), 1);
        assert_eq!(g.edges().len(), 1);
        assert_eq!(g.edge(0).joints.len(), 3);
        assert!(g.edge(0).is_loop());
    }

    #[test]
    fn open_arc_has_leaves() {
        let f = |t: f64| Vec3::new(t, t * t, 0.0);
        let g = inscribe("parabola", &SampledArc::uniform(&f, -1.0, 1.0, 5, false)).unwrap();
        assert_eq!(g.vertices().len(), 2);
        assert_eq!(g.edge(0).joints.len(), 3);
        assert_eq!(g.degree(0), 1);
    }

    #[test]
    fn rejects_bad_samples() {
        let f = |t: f64| Vec3::new(t, 0.0, 0.0);
        let arc = SampledArc { curve: &f, params: vec![0.0, 1.0, 1.0], closed: false };
        assert!(inscribe("x", &arc).is_err());
        let arc = SampledArc { curve: &f, params: vec![0.0], closed: false };
        assert!(inscribe("x", &arc).is_err());
    }

    #[test]
    fn theta_shape() {
        let g = planar_theta(8).unwrap();
        assert_eq!(g.edges().len(), 3);
        assert!(g.edge(0).joints.iter().all(|p| p.x > 0.0));
        assert!(g.edge(1).joints.iter().all(|p| p.x < 0.0));
        assert!(planar_theta(1).is_err());
    }

    #[test]
    fn arch_params_are_increasing() {
        let p = wild_arch_params(3, 5, 4);
        assert_eq!(p.len(), 13);
        assert!(p.windows(2).all(|w| w[0] < w[1]));
    }
}
